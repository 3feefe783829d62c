//! Simulated outage, BER and capacity against the closed forms.

use rffso::analytics::{self, Metric, ModulationScheme};
use rffso::channel::{ChannelConfig, Turbulence};
use rffso::mc::{estimate, SimPlan};

fn main() -> rffso::Result<()> {
    let cfg = ChannelConfig::reference(Turbulence::Strong);
    let link = cfg.link()?;
    let metrics = vec![
        Metric::Cdf,
        Metric::Ber(ModulationScheme::Bpsk),
        Metric::Capacity,
    ];
    let plan = SimPlan::new(1_000_000, 7, metrics);
    let report = estimate(&plan, &cfg.rf, &link)?;
    println!("strong turbulence, 1e6 samples in {} streams", plan.streams);
    for (m, e) in &report.estimates {
        let a = analytics::evaluate(*m, plan.gamma_th, &cfg.rf, &link)?;
        println!(
            "{:<9} closed form {:.6}  simulated {:.6} +/- {:.1e}  z = {:+.2}",
            m.name(),
            a,
            e.mean,
            e.std_err,
            e.z_score(a)
        );
    }
    Ok(())
}
