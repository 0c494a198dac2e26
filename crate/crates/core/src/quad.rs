//! Globally adaptive Gauss–Kronrod (7/15) quadrature with maps for infinite ranges.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Default cap on the number of subintervals.
pub const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// One 15-point Kronrod rule with its embedded 7-point Gauss estimate.
pub fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// `int_a^b f` to `max(abs_tol, rel_tol |I|)`, bisecting the worst segment first.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    integrate_with_limit(&mut f, a, b, abs_tol, rel_tol, MAX_INTERVALS)
}

pub fn integrate_with_limit(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    limit: usize,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Param(format!("finite limits required, got [{a}, {b}]")));
    }
    let (value, error) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let (mut total, mut total_err) = (value, error);
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Divergence(format!("non-finite integral on [{a}, {b}]")));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, error: total_err, intervals: heap.len() });
        }
        if heap.len() >= limit {
            return Err(Error::Divergence(format!(
                "no convergence on [{a}, {b}] after {limit} subintervals: value {total:e}, error {total_err:e}"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Divergence(format!(
                "worst subinterval near {mid:e} cannot be split further: value {total:e}, error {total_err:e}"
            )));
        }
        let (v1, e1) = gk15(f, worst.a, mid);
        let (v2, e2) = gk15(f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2 });
        // re-sum to keep the running error from drifting below zero
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// `int_a^inf f` through `x = a + s u / (1 - u)`.
pub fn integrate_upper(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    let mut g = |u: f64| {
        let w = 1.0 - u;
        let v = f(a + scale * u / w);
        if v == 0.0 {
            0.0
        } else {
            v * scale / (w * w)
        }
    };
    integrate_with_limit(&mut g, 0.0, 1.0, abs_tol, rel_tol, MAX_INTERVALS)
}

/// `int_-inf^b f` through `x = b - s u / (1 - u)`.
pub fn integrate_lower(
    mut f: impl FnMut(f64) -> f64,
    b: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    integrate_upper(move |x| f(2.0 * b - x), b, scale, abs_tol, rel_tol)
}

/// Integral over any sub-range of the real line, split at `split` when it is interior.
pub fn integrate_range(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    split: f64,
    scale: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadResult> {
    if lo >= hi {
        return Ok(QuadResult { value: 0.0, error: 0.0, intervals: 0 });
    }
    let split = if split > lo && split < hi {
        split
    } else if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo
    } else if hi.is_finite() {
        hi
    } else {
        0.0
    };
    let left = if lo == split {
        QuadResult { value: 0.0, error: 0.0, intervals: 0 }
    } else if lo.is_finite() {
        integrate_with_limit(&mut f, lo, split, abs_tol / 2.0, rel_tol, MAX_INTERVALS)?
    } else {
        integrate_lower(&mut f, split, scale, abs_tol / 2.0, rel_tol)?
    };
    let right = if hi == split {
        QuadResult { value: 0.0, error: 0.0, intervals: 0 }
    } else if hi.is_finite() {
        integrate_with_limit(&mut f, split, hi, abs_tol / 2.0, rel_tol, MAX_INTERVALS)?
    } else {
        integrate_upper(&mut f, split, scale, abs_tol / 2.0, rel_tol)?
    };
    Ok(QuadResult {
        value: left.value + right.value,
        error: left.error + right.error,
        intervals: left.intervals + right.intervals,
    })
}
