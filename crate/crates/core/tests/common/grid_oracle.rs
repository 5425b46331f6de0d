//! Brute-force oracle for the smallest constraint violation of a qubit
//! candidate on the canonical trivial model (four ontic states, point masses
//! on `|0>, |1>, |+>, |+i>`).
//!
//! Each `G_j = a_j I + b_j . sigma` must be PSD (`|b_j| <= a_j`); the violation
//! `f(G)` is the largest of `|<psi_k|G_j|psi_k> - delta_kj|` and the entries of
//! `|sum_j G_j - I|`. `f` and the PSD cone are convex and invariant under the
//! antiunitary reflections `z -> -z` (swapping |0>, |1>) and `x <-> y`
//! (swapping |+>, |+i>), so its minimum is attained at a symmetric candidate:
//!
//!   G_0 = (a0; beta, beta, bz),  G_1 = (a0; beta, beta, -bz),
//!   G_+ = (ap; bx, by, 0),       G_+i = (ap; by, bx, 0).
//!
//! Every point with `f < 1/2` lies in `BOX`. The box is searched by best-first
//! branch and bound with Lipschitz bounds; cells without a PSD point are
//! dropped, which yields a certified lower bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const NP: usize = 6;

/// a0, beta, bz, ap, bx, by
pub const BOX: [(f64, f64); NP] = [(0.0, 1.0), (-1.5, 0.5), (0.0, 1.0), (-0.5, 0.5), (0.0, 2.0), (-1.0, 1.0)];

/// Coefficients of (a, bx, by, bz) of each G_j in the six parameters.
fn effects() -> [[[f64; NP]; 4]; 4] {
    let e = |i: usize| {
        let mut v = [0.0; NP];
        v[i] = 1.0;
        v
    };
    let neg = |mut v: [f64; NP]| {
        v.iter_mut().for_each(|x| *x = -*x);
        v
    };
    let z = [0.0; NP];
    [
        [e(0), e(1), e(1), e(2)],
        [e(0), e(1), e(1), neg(e(2))],
        [e(3), e(4), e(5), z],
        [e(3), e(5), e(4), z],
    ]
}

const BLOCH: [[f64; 3]; 4] = [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];

fn dot(c: &[f64; NP], p: &[f64; NP]) -> f64 {
    c.iter().zip(p).map(|(a, b)| a * b).sum()
}

fn spread(c: &[f64; NP], hw: &[f64; NP]) -> f64 {
    c.iter().zip(hw).map(|(a, b)| a.abs() * b).sum()
}

fn add(a: &[f64; NP], b: &[f64; NP], s: f64) -> [f64; NP] {
    let mut out = *a;
    out.iter_mut().zip(b).for_each(|(x, y)| *x += s * y);
    out
}

/// Bounds of `f` and of the PSD violation on the cell `p +- hw`.
pub struct Bounds {
    pub value: f64,
    pub lower: f64,
    /// `max_j (|b_j| - a_j)` at the centre.
    pub psd_gap: f64,
    /// Lower bound of `max_j (|b_j| - a_j)` on the cell; positive means no PSD point.
    pub psd_gap_lower: f64,
}

pub fn evaluate(p: &[f64; NP], hw: &[f64; NP]) -> Bounds {
    let g = effects();
    let mut val = 0.0f64;
    let mut lb = 0.0f64;
    let mut push = |v: f64, l: f64| {
        val = val.max(v);
        lb = lb.max(l);
    };
    for (k, n) in BLOCH.iter().enumerate() {
        for (j, gj) in g.iter().enumerate() {
            let mut c = gj[0];
            for a in 0..3 {
                c = add(&c, &gj[a + 1], n[a]);
            }
            let target = if j == k { 1.0 } else { 0.0 };
            let t = (dot(&c, p) - target).abs();
            push(t, t - spread(&c, hw));
        }
    }
    let mut sa = [0.0; NP];
    let mut sb = [[0.0; NP]; 3];
    for gj in &g {
        sa = add(&sa, &gj[0], 1.0);
        for a in 0..3 {
            sb[a] = add(&sb[a], &gj[a + 1], 1.0);
        }
    }
    for s in [1.0, -1.0] {
        let c = add(&sa, &sb[2], s);
        let t = (dot(&c, p) - 1.0).abs();
        push(t, t - spread(&c, hw));
    }
    let off = dot(&sb[0], p).hypot(dot(&sb[1], p));
    push(off, off - spread(&sb[0], hw).hypot(spread(&sb[1], hw)));
    let mut psd_gap = f64::NEG_INFINITY;
    let mut psd_gap_lower = f64::NEG_INFINITY;
    for gj in &g {
        let b = [dot(&gj[1], p), dot(&gj[2], p), dot(&gj[3], p)];
        let nb = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
        let lip = (spread(&gj[1], hw).powi(2) + spread(&gj[2], hw).powi(2) + spread(&gj[3], hw).powi(2)).sqrt()
            + spread(&gj[0], hw);
        let t = nb - dot(&gj[0], p);
        psd_gap = psd_gap.max(t);
        psd_gap_lower = psd_gap_lower.max(t - lip);
    }
    Bounds {
        value: val,
        lower: lb,
        psd_gap,
        psd_gap_lower,
    }
}

struct Cell {
    lb: f64,
    centre: [f64; NP],
    hw: [f64; NP],
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.lb == o.lb
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        o.lb.total_cmp(&self.lb)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleResult {
    /// Smallest violation found at a PSD grid point (an upper bound on the floor).
    pub best: f64,
    pub best_point: [f64; NP],
    /// Certified lower bound on the violation of every candidate.
    pub lower_bound: f64,
    pub cells: usize,
}

/// Starts from a uniform `per_dim^6` grid and refines by bisection of the cell
/// with the smallest bound until the certified gap is below `gap` or
/// `max_cells` cells were expanded.
pub fn contradiction_floor(per_dim: usize, gap: f64, max_cells: usize) -> OracleResult {
    let mut heap = BinaryHeap::new();
    let mut best = f64::INFINITY;
    let mut best_point = [0.0; NP];
    let hw0: [f64; NP] = std::array::from_fn(|i| (BOX[i].1 - BOX[i].0) / (2.0 * per_dim as f64));
    let total = per_dim.pow(NP as u32);
    for idx in 0..total {
        let mut r = idx;
        let centre: [f64; NP] = std::array::from_fn(|i| {
            let k = r % per_dim;
            r /= per_dim;
            BOX[i].0 + (2 * k + 1) as f64 * hw0[i]
        });
        let b = evaluate(&centre, &hw0);
        if b.psd_gap <= 0.0 && b.value < best {
            best = b.value;
            best_point = centre;
        }
        if b.lower < 0.5 && b.psd_gap_lower <= 0.0 {
            heap.push(Cell { lb: b.lower, centre, hw: hw0 });
        }
    }
    let mut cells = 0;
    let mut lower_bound = heap.peek().map_or(0.5, |c| c.lb);
    while let Some(c) = heap.pop() {
        lower_bound = c.lb.min(best);
        if best - lower_bound <= gap || cells >= max_cells {
            break;
        }
        cells += 1;
        let d = (0..NP).max_by(|&a, &b| c.hw[a].total_cmp(&c.hw[b])).unwrap();
        let mut hw = c.hw;
        hw[d] /= 2.0;
        for s in [-1.0, 1.0] {
            let mut centre = c.centre;
            centre[d] += s * hw[d];
            let b = evaluate(&centre, &hw);
            if b.psd_gap <= 0.0 && b.value < best {
                best = b.value;
                best_point = centre;
            }
            if b.lower < best && b.psd_gap_lower <= 0.0 {
                heap.push(Cell { lb: b.lower, centre, hw });
            }
        }
    }
    OracleResult {
        best,
        best_point,
        lower_bound: lower_bound.max(0.0),
        cells,
    }
}
