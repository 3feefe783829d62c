use proptest::prelude::*;

use rffso::analytics::{avg_ber, cdf_eq, ergodic_capacity, ModulationScheme};
use rffso::channel::{db_to_linear, FsoConfig, FsoLink, RfConfig, Turbulence};

fn system(
    t: Turbulence,
    m: u32,
    l: u32,
    rho: f64,
    mu1_db: f64,
    mu2_db: f64,
) -> (RfConfig, FsoLink) {
    let rf = RfConfig::from_db(m, l, rho, mu1_db).unwrap();
    let link = FsoLink::new(&FsoConfig::reference(t.cn2(), db_to_linear(mu2_db))).unwrap();
    (rf, link)
}

fn ber(t: Turbulence, m: u32, l: u32, rho: f64, mu1: f64, mu2: f64) -> f64 {
    let (rf, link) = system(t, m, l, rho, mu1, mu2);
    avg_ber(ModulationScheme::Bpsk, &rf, &link).unwrap()
}

fn capacity(t: Turbulence, m: u32, l: u32, rho: f64, mu1: f64, mu2: f64) -> f64 {
    let (rf, link) = system(t, m, l, rho, mu1, mu2);
    ergodic_capacity(&rf, &link, 1.0).unwrap()
}

const RHO_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.72, 1.0];

#[test]
fn ber_is_bounded_and_coherent_beats_differential() {
    for t in Turbulence::ALL {
        for mu1 in [10.0, 20.0, 30.0] {
            for mu2 in [10.0, 20.0, 30.0] {
                let (rf, link) = system(t, 2, 2, 0.72, mu1, mu2);
                let b = avg_ber(ModulationScheme::Bpsk, &rf, &link).unwrap();
                let d = avg_ber(ModulationScheme::Dbpsk, &rf, &link).unwrap();
                assert!(b > 0.0 && b <= 0.5);
                assert!(b <= d, "{t:?} {mu1} {mu2}: {b} > {d}");
            }
        }
    }
}

#[test]
fn ber_strictly_falls_along_the_diagonal() {
    for t in Turbulence::ALL {
        let v: Vec<f64> = (0..=20)
            .map(|k| 2.0 * k as f64)
            .map(|mu| ber(t, 2, 2, 0.72, mu, mu))
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{t:?} {v:?}");
    }
}

#[test]
fn ber_floor_with_fixed_optical_hop() {
    for t in Turbulence::ALL {
        let a = ber(t, 2, 2, 0.72, 60.0, 30.0);
        let b = ber(t, 2, 2, 0.72, 80.0, 30.0);
        assert!(((a - b) / b).abs() < 0.01, "{t:?}: {a} vs {b}");
    }
}

#[test]
fn selection_trends_with_correlation() {
    let t = Turbulence::Weak;
    let best: Vec<f64> = RHO_GRID
        .iter()
        .map(|&r| ber(t, 4, 4, r, 20.0, 20.0))
        .collect();
    let worst: Vec<f64> = RHO_GRID
        .iter()
        .map(|&r| ber(t, 4, 1, r, 20.0, 20.0))
        .collect();
    assert!(best.windows(2).all(|w| w[1] <= w[0]), "{best:?}");
    assert!(worst.windows(2).all(|w| w[1] >= w[0]), "{worst:?}");

    let best: Vec<f64> = RHO_GRID
        .iter()
        .map(|&r| capacity(t, 4, 4, r, 20.0, 20.0))
        .collect();
    let worst: Vec<f64> = RHO_GRID
        .iter()
        .map(|&r| capacity(t, 4, 1, r, 20.0, 20.0))
        .collect();
    assert!(best.windows(2).all(|w| w[1] >= w[0]), "{best:?}");
    assert!(worst.windows(2).all(|w| w[1] <= w[0]), "{worst:?}");
}

#[test]
fn rank_is_irrelevant_without_correlation() {
    let t = Turbulence::Moderate;
    let b1 = ber(t, 4, 1, 0.0, 20.0, 20.0);
    let c1 = capacity(t, 4, 1, 0.0, 20.0, 20.0);
    for l in 2..=4 {
        let b = ber(t, 4, l, 0.0, 20.0, 20.0);
        let c = capacity(t, 4, l, 0.0, 20.0, 20.0);
        assert!(((b - b1) / b1).abs() < 1e-6, "l={l}");
        assert!(((c - c1) / c1).abs() < 1e-6, "l={l}");
    }
}

/// With the RF hop at 20 dB, capacity at 60 and 80 dB on the optical hop.
/// Weak turbulence is pointing-limited, so the approach to the floor is the
/// slowest of the three regimes and the 60/80 dB spread sits just above 1%.
#[test]
fn capacity_floor_with_fixed_rf_hop() {
    let spread = |t| {
        let a = capacity(t, 2, 2, 0.72, 20.0, 60.0);
        let b = capacity(t, 2, 2, 0.72, 20.0, 80.0);
        assert!(b > a);
        (b - a) / b
    };
    assert!(spread(Turbulence::Moderate) < 0.01);
    assert!(spread(Turbulence::Strong) < 0.01);
    let weak = spread(Turbulence::Weak);
    assert!((0.0105..0.0107).contains(&weak), "{weak}");
}

#[test]
fn capacity_grows_without_bound_on_the_diagonal() {
    let v: Vec<f64> = [20.0, 40.0, 60.0, 80.0]
        .iter()
        .map(|&mu| capacity(Turbulence::Weak, 2, 2, 0.72, mu, mu))
        .collect();
    // each 20 dB adds well over a bit
    assert!(v.windows(2).all(|w| w[1] - w[0] > 2.0), "{v:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outage_is_a_distribution_in_the_threshold(
        th in 1e-3f64..1e3,
        k in 1.0f64..10.0,
        mu1 in 0.0f64..40.0,
        mu2 in 0.0f64..40.0,
        regime in 0usize..3,
    ) {
        let (rf, link) = system(Turbulence::ALL[regime], 2, 2, 0.72, mu1, mu2);
        let a = cdf_eq(th, &rf, &link).unwrap();
        let b = cdf_eq(th * k, &rf, &link).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b >= a - 1e-9, "{a} {b}");
    }

    #[test]
    fn outage_falls_with_either_hop(
        mu1 in 0.0f64..40.0,
        mu2 in 0.0f64..40.0,
        d in 0.5f64..10.0,
        regime in 0usize..3,
    ) {
        let t = Turbulence::ALL[regime];
        let cdf = |m1, m2| {
            let (rf, link) = system(t, 2, 2, 0.72, m1, m2);
            cdf_eq(1.0, &rf, &link).unwrap()
        };
        let base = cdf(mu1, mu2);
        prop_assert!(cdf(mu1 + d, mu2) <= base + 1e-9);
        prop_assert!(cdf(mu1, mu2 + d) <= base + 1e-9);
    }
}
