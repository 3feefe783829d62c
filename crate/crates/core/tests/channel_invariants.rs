use proptest::prelude::*;

use rffso::channel::{
    gamma_eq, re_constant, rf_cdf, rf_pdf, FsoConfig, FsoLink, RfConfig, Turbulence,
};
use rffso::specfun::quad::integrate_gk;

fn rf(m: u32, l: u32, rho: f64) -> RfConfig {
    RfConfig::new(m, l, rho, 10.0).unwrap()
}

#[test]
fn rf_pdf_is_normalised() {
    for m in 1..=8 {
        for l in 1..=m {
            for rho in [0.0, 0.3, 0.72, 1.0] {
                let c = rf(m, l, rho);
                let top = 60.0 / c.terms().slowest_rate();
                let q =
                    integrate_gk(|x| rf_pdf(x, &c), &[0.0, c.mu, top], 1e-13, 1e-13, 4000).unwrap();
                assert!(
                    (q.value - 1.0).abs() < 1e-9,
                    "M={m} l={l} rho={rho}: {}",
                    q.value
                );
            }
        }
    }
}

#[test]
fn uncorrelated_selection_collapses_to_the_exponential_law() {
    for m in 1..=8 {
        let base = rf(m, 1, 0.0);
        for l in 1..=m {
            let c = rf(m, l, 0.0);
            assert!((re_constant(&c) - re_constant(&base)).abs() < 1e-10);
            for x in [0.0, 0.1, 1.0, 7.5, 30.0, 120.0] {
                let e = (-x / 10.0f64).exp();
                assert!(
                    (rf_pdf(x, &c) - e / 10.0).abs() < 1e-10,
                    "M={m} l={l} x={x}"
                );
                assert!(
                    (rf_cdf(x, &c) - (1.0 - e)).abs() < 1e-10,
                    "M={m} l={l} x={x}"
                );
            }
        }
    }
}

#[test]
fn fso_pdf_is_normalised_in_every_regime() {
    for t in Turbulence::ALL {
        let link = FsoLink::new(&FsoConfig::reference(t.cn2(), 100.0)).unwrap();
        // integrate over log-SNR; the integrand decays on both sides
        let q = integrate_gk(
            |u| {
                let g = u.exp();
                link.snr_pdf(g).unwrap() * g
            },
            &[-120.0, -20.0, 0.0, 5.0, 10.0, 20.0],
            1e-10,
            1e-8,
            2000,
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-6, "{t:?}: {}", q.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rf_cdf_is_a_distribution(
        m in 1u32..=8,
        l_frac in 0.0f64..1.0,
        rho in 0.0f64..=1.0,
        x in 0.0f64..200.0,
        dx in 0.0f64..50.0,
    ) {
        let l = 1 + ((m as f64) * l_frac) as u32;
        let l = l.min(m);
        let c = rf(m, l, rho);
        let (a, b) = (rf_cdf(x, &c), rf_cdf(x + dx, &c));
        prop_assert!((0.0..1.0).contains(&a) || (a - 1.0).abs() < 1e-12);
        prop_assert!(b >= a - 1e-13, "{a} {b}");
        prop_assert_eq!(rf_cdf(0.0, &c), 0.0);
    }

    #[test]
    fn relay_gain_constant_follows_selection_quality(
        m in 2u32..=8,
        r1 in 0.0f64..=1.0,
        r2 in 0.0f64..=1.0,
    ) {
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let best = |rho| re_constant(&rf(m, m, rho));
        let worst = |rho| re_constant(&rf(m, 1, rho));
        prop_assert!(best(hi) >= best(lo) - 1e-12);
        prop_assert!(worst(hi) <= worst(lo) + 1e-12);
    }

    #[test]
    fn combining_is_monotone(
        g1 in 0.0f64..1e4,
        g2 in 0.0f64..1e4,
        d in 0.0f64..1e3,
        re in 1.0f64..100.0,
    ) {
        prop_assert!(gamma_eq(g1 + d, g2, re) >= gamma_eq(g1, g2, re));
        prop_assert!(gamma_eq(g1, g2 + d, re) >= gamma_eq(g1, g2, re));
        prop_assert!(gamma_eq(g1, g2, re) <= g1);
    }
}
