use num_complex::Complex64;
use proptest::prelude::*;
use rffso::specfun::{
    egbmgf, egbmgf_contours, egbmgf_estimate, erf, log_gamma_complex, meijer_g, meijer_g_estimate,
    ContourConfig, Egbmgf2Spec, MeijerGSpec,
};

const ZS: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

// Weak-turbulence shape parameters at the default geometry.
const PSI: f64 = 0.900_772_018_912_108_6;
const ALPHA: f64 = 6.600_691_973_919_505;
const BETA: f64 = 5.053_573_766_851_191;

fn chi() -> Vec<f64> {
    let p2 = PSI * PSI;
    vec![
        p2 / 2.0,
        ALPHA / 2.0,
        (ALPHA + 1.0) / 2.0,
        BETA / 2.0,
        (BETA + 1.0) / 2.0,
        0.0,
    ]
}

fn spec(m: usize, n: usize, a: &[f64], b: &[f64], z: f64) -> MeijerGSpec {
    MeijerGSpec::new(m, n, a.to_vec(), b.to_vec(), z).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn exponential_identity() {
    for z in ZS {
        let v = meijer_g(&spec(1, 0, &[], &[0.0], z), None).unwrap();
        assert!(rel(v, (-z).exp()) < 1e-9, "z={z}: {v}");
    }
}

#[test]
fn rational_identity() {
    for z in ZS {
        let v = meijer_g(&spec(1, 1, &[0.0], &[0.0], z), None).unwrap();
        assert!(rel(v, 1.0 / (1.0 + z)) < 1e-9, "z={z}: {v}");
    }
}

/// K_0(x) from its power series, independent of the contour route.
fn bessel_k0(x: f64) -> f64 {
    let euler = 0.577_215_664_901_532_9;
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    let lead = -((0.5 * x).ln() + euler);
    for k in 0..80 {
        if k > 0 {
            term *= q / (k as f64 * k as f64);
            harmonic += 1.0 / k as f64;
        }
        sum += term * (lead + harmonic);
    }
    sum
}

#[test]
fn bessel_reduction() {
    for z in [0.05, 0.5, 1.0, 2.0, 6.0] {
        let v = meijer_g(&spec(2, 0, &[], &[0.0, 0.0], z), None).unwrap();
        let want = 2.0 * bessel_k0(2.0 * z.sqrt());
        assert!(rel(v, want) < 1e-8, "z={z}: {v} vs {want}");
    }
}

#[test]
fn turbulence_kernels_against_arbitrary_precision() {
    // mpmath.meijerg at 30 digits
    let p2 = PSI * PSI;
    let a = [(p2 + 2.0) / 2.0];
    let cases = [
        (1e-4, 85.588_121_810_082_67),
        (0.05, 77.370_045_533_917_72),
        (1.0, 58.416_876_090_197_28),
        (30.0, 16.134_324_388_394_816),
    ];
    for (z, want) in cases {
        let v = meijer_g(&spec(6, 0, &a, &chi(), z), None).unwrap();
        assert!(rel(v, want) < 1e-8, "z={z}: {v}");
    }
    // BER kernel G^{6,1}_{2,6}
    let cases = [
        (0.05, 0.5, 143.447_483_316_963_27),
        (2.0, 1.0, 55.328_703_365_866_43),
        (1e-6, 0.5, 152.875_937_579_688_3),
    ];
    for (z, p, want) in cases {
        let v = meijer_g(&spec(6, 1, &[1.0 - p, a[0]], &chi(), z), None).unwrap();
        assert!(rel(v, want) < 1e-8, "z={z}: {v}");
    }
    // an extra zero in the lower row puts a double pole at the origin
    let cases = [
        (0.05, 0.5, 142.214_543_381_976_9),
        (2.0, 1.0, 50.991_106_590_787_27),
    ];
    for (z, p, want) in cases {
        let mut b = chi();
        b.push(0.0);
        let v = meijer_g(&spec(6, 1, &[1.0 - p, a[0]], &b, z), None).unwrap();
        assert!(rel(v, want) < 1e-8, "z={z}: {v}");
    }
}

#[test]
fn contour_invariance() {
    let p2 = PSI * PSI;
    let s = spec(6, 0, &[(p2 + 2.0) / 2.0], &chi(), 0.7);
    let reference = meijer_g(&s, None).unwrap();
    for c in [-0.05, -0.5, -1.5, -3.0] {
        let cfg = ContourConfig::at_abscissa(&s, c, 1e-10).unwrap();
        let v = meijer_g(&s, Some(&cfg)).unwrap();
        assert!(rel(v, reference) < 1e-8, "c={c}: {v} vs {reference}");
    }
}

#[test]
fn refinement_reduces_residual() {
    let p2 = PSI * PSI;
    let s = spec(6, 0, &[(p2 + 2.0) / 2.0], &chi(), 1e-6);
    let auto = ContourConfig::auto(&s).unwrap();
    let coarse = ContourConfig {
        panels: 1,
        target_rel_err: 1e-13,
        ..auto
    };
    let e = meijer_g_estimate(&s, Some(&coarse)).unwrap();
    let residuals: Vec<f64> = e.residuals[..e.levels - 1].to_vec();
    assert!(residuals.len() >= 2, "{residuals:?}");
    let floor = 64.0 * f64::EPSILON * e.magnitude;
    for pair in residuals.windows(2) {
        assert!(pair[1] < pair[0] || pair[1] <= floor, "{residuals:?}");
    }
}

#[test]
fn explicit_contour_outside_strip_is_rejected() {
    let s = spec(1, 1, &[0.0], &[0.0], 1.0);
    let cfg = ContourConfig {
        abscissa: 0.5,
        half_height: 30.0,
        panels: 30,
        target_rel_err: 1e-8,
    };
    assert_eq!(
        meijer_g(&s, Some(&cfg)).unwrap_err().kind(),
        "InvalidContour"
    );
}

#[test]
fn capacity_kernel_against_arbitrary_precision() {
    // mpmath quad of e^{-u} /(1 + A u) G^{6,0}_{1,6}(B u) over (0, 60)
    let p2 = PSI * PSI;
    for (a, b, want) in [
        (40.0, 0.02, 6.701_972_565_168_367),
        (4.0, 3.0, 19.889_278_077_880_765),
    ] {
        let s = Egbmgf2Spec::capacity_kernel(p2, ALPHA, BETA, a, b).unwrap();
        let e = egbmgf_estimate(&s, None, None).unwrap();
        assert!(rel(e.value, want) < 1e-6, "A={a} B={b}: {e:?}");
    }
}

#[test]
fn capacity_kernel_refinement_self_consistency() {
    let p2 = PSI * PSI;
    let s = Egbmgf2Spec::capacity_kernel(p2, ALPHA, BETA, 10.0, 0.3).unwrap();
    let (cs, ct) = egbmgf_contours(&s).unwrap();
    let base = egbmgf(&s, Some(&cs), Some(&ct)).unwrap();
    let doubled = |c: ContourConfig| ContourConfig {
        panels: 2 * c.panels,
        ..c
    };
    let fine = egbmgf(&s, Some(&doubled(cs)), Some(&doubled(ct))).unwrap();
    assert!(rel(fine, base) < cs.target_rel_err.max(ct.target_rel_err));
}

#[test]
fn capacity_kernel_vanishes_with_first_argument() {
    let p2 = PSI * PSI;
    let mut last = f64::INFINITY;
    for a in [1e-1, 1e-2, 1e-3, 1e-4] {
        let s = Egbmgf2Spec::capacity_kernel(p2, ALPHA, BETA, a, 0.3).unwrap();
        let v = a * egbmgf(&s, None, None).unwrap();
        assert!(v < last, "A={a}: {v}");
        last = v;
    }
    // the kernel weight A * G tends to 0 like A
    assert!(last < 1e-2);
}

#[test]
fn erf_reference() {
    assert_eq!(erf(0.0), 0.0);
    assert!((erf(10.0) - 1.0).abs() <= 1e-15);
    assert!((erf(1.0) - 0.842_700_792_949_714_9).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn log_gamma_recurrence(r in 0.1f64..50.0, theta in -3.1f64..3.1) {
        let s = Complex64::from_polar(r, theta);
        prop_assume!(s.im.abs() > 1e-3 || s.re > 0.0);
        let g0 = log_gamma_complex(s).unwrap();
        let g1 = log_gamma_complex(s + 1.0).unwrap();
        // ratio Gamma(s+1) / (s Gamma(s)), compared in log space
        let diff = g1 - g0 - s.ln();
        let ratio = diff.exp();
        prop_assert!((ratio - 1.0).norm() < 1e-10, "s={} ratio={}", s, ratio);
    }
}
