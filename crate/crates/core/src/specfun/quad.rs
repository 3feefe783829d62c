//! Real-line quadrature: Gauss-Legendre panels, adaptive Gauss-Kronrod and
//! tanh-sinh for endpoint singularities.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 16-point rule used by the contour integrators.
pub(crate) fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// Map the shared rule onto each panel `[b[k], b[k+1]]`, returning (nodes, weights).
pub(crate) fn panel_nodes(breaks: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gl16();
    let mut nodes = Vec::with_capacity(x.len() * breaks.len());
    let mut weights = Vec::with_capacity(x.len() * breaks.len());
    for pair in breaks.windows(2) {
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// Split every panel in two.
pub(crate) fn refine(breaks: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * breaks.len());
    for pair in breaks.windows(2) {
        out.push(pair[0]);
        out.push(0.5 * (pair[0] + pair[1]));
    }
    if let Some(&last) = breaks.last() {
        out.push(last);
    }
    out
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let err = ((kronrod - gauss) * half).abs();
    (kronrod * half, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
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
        self.err.total_cmp(&other.err)
    }
}

/// Result of a real-line quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss-Kronrod quadrature over consecutive breakpoints.
///
/// Converges when the summed error estimate is below
/// `max(abs_tol, rel_tol * |I|)`.
pub fn integrate_gk<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_segments: usize,
) -> Result<Quadrature> {
    assert!(breaks.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for pair in breaks.windows(2) {
        let (value, err) = gk15(&mut f, pair[0], pair[1]);
        evaluations += 15;
        heap.push(Segment {
            a: pair[0],
            b: pair[1],
            value,
            err,
        });
    }
    loop {
        let (value, err) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.err));
        if !value.is_finite() {
            return Err(Error::QuadratureFailed {
                estimate: value,
                error: err,
            });
        }
        if err <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Quadrature {
                value,
                error: err,
                evaluations,
            });
        }
        if heap.len() >= max_segments {
            return Err(Error::QuadratureFailed {
                estimate: value,
                error: err,
            });
        }
        let worst = heap.pop().expect("non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            return Ok(Quadrature {
                value,
                error: err,
                evaluations,
            });
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, err) = gk15(&mut f, a, b);
            evaluations += 15;
            heap.push(Segment { a, b, value, err });
        }
    }
}

/// tanh-sinh quadrature on [a, b]; tolerates integrable endpoint singularities
/// down to nodes ~1e-300 from either end.
///
/// `f` receives `(x, dist_a, dist_b)` where the distances to the endpoints
/// are computed without cancellation.
pub fn integrate_tanh_sinh<F: FnMut(f64, f64, f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<Quadrature> {
    let half = 0.5 * (b - a);
    let t_max = 6.5;
    let pi2 = std::f64::consts::FRAC_PI_2;
    let mut eval = |t: f64| -> f64 {
        let u = pi2 * t.sinh();
        let cosh_u = u.cosh();
        let weight = pi2 * t.cosh() / (cosh_u * cosh_u);
        // distance of the node from each end, as a fraction of the width
        let e = (2.0 * u.abs()).min(700.0).exp();
        let near = 1.0 / (1.0 + e) * 2.0 * half;
        let far = 2.0 * half - near;
        let (da, db) = if u < 0.0 { (near, far) } else { (far, near) };
        if da <= 0.0 || db <= 0.0 || weight == 0.0 {
            return 0.0;
        }
        let x = if u < 0.0 { a + da } else { b - db };
        let y = f(x, da, db);
        if y.is_finite() {
            y * weight * half
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut evaluations = 1;
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..9 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += eval(t) + eval(-t);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= abs_tol.max(rel_tol * next.abs()) {
            return Ok(Quadrature {
                value: next,
                error: diff,
                evaluations,
            });
        }
    }
    Err(Error::QuadratureFailed {
        estimate,
        error: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // x^30 integrates to 2/31
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
        for pair in x.windows(2) {
            assert!(pair[0] < pair[1]);
        }
    }

    #[test]
    fn kronrod_handles_peaks() {
        let q = integrate_gk(|x| 1.0 / (1e-4 + x * x), &[-1.0, 1.0], 1e-12, 1e-12, 2000).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((q.value - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        // integral of x^-0.8 on [0,1] = 5
        let q = integrate_tanh_sinh(|_, da, _| da.powf(-0.8), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((q.value - 5.0).abs() < 1e-9, "{}", q.value);
        let q = integrate_tanh_sinh(|x, _, _| x.ln(), 0.0, 1.0, 1e-12, 0.0).unwrap();
        assert!((q.value + 1.0).abs() < 1e-11);
    }
}
