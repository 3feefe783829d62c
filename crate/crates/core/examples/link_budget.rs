//! Hop SNRs from transmit powers, noise variances and photodetector
//! responsivity instead of dB values.

use rffso::analytics::{avg_ber, ModulationScheme};
use rffso::channel::{
    derive_fso, linear_to_db, FsoConfig, FsoLink, LinkBudget, RfConfig, Turbulence,
};

fn main() -> rffso::Result<()> {
    let budget = LinkBudget {
        source_power: 1.0,
        relay_noise: 1e-2,
        destination_noise: 1e-4,
        optical_power: 1.0,
        responsivity: 0.5,
    };
    budget.validate()?;
    let mut fso = FsoConfig::reference(Turbulence::Weak.cn2(), 1.0);
    let params = derive_fso(&fso)?;
    fso.mu = budget.fso_snr(&params);
    let rf = RfConfig::new(2, 2, 0.72, budget.rf_snr())?;
    println!("RF hop  {:.2} dB", linear_to_db(rf.mu));
    println!("FSO hop {:.2} dB", linear_to_db(fso.mu));
    let ber = avg_ber(ModulationScheme::Bpsk, &rf, &FsoLink::new(&fso)?)?;
    println!("average BPSK BER {ber:.4e}");
    Ok(())
}
