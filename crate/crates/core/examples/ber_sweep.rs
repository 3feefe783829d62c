//! Average BER with both hops swept together, for each turbulence regime.

use rffso::analytics::{Metric, ModulationScheme};
use rffso::channel::{ChannelConfig, Turbulence};
use rffso::mc::SimPlan;
use rffso::validation::{run_sweep, Compare, SweepRange, SweepSpec, SweepVariable};

fn main() -> rffso::Result<()> {
    let range = SweepRange {
        start: 0.0,
        stop: 40.0,
        step: 5.0,
    };
    print!("mu_db ");
    for t in Turbulence::ALL {
        print!("{:>12}", t.name());
    }
    println!();
    let mut columns = Vec::new();
    for t in Turbulence::ALL {
        let spec = SweepSpec {
            variable: SweepVariable::MuDb,
            range,
            fixed: ChannelConfig::reference(t),
            metrics: vec![Metric::Ber(ModulationScheme::Bpsk)],
            compare: Compare::Analytic,
            gamma_th: 1.0,
            sim: SimPlan::new(0, 0, vec![]),
            z_threshold: 3.0,
        };
        columns.push(run_sweep(&spec)?.records());
    }
    for (i, x) in range.points().iter().enumerate() {
        print!("{x:>5} ");
        for c in &columns {
            print!("{:>12.4e}", c[i].value);
        }
        println!();
    }
    Ok(())
}
