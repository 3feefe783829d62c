//! Outage, average BER and ergodic capacity of the end-to-end link at one
//! operating point, next to the direct numerical integrals they replace.

use rffso::analytics::{
    avg_ber, avg_ber_quadrature, capacity_quadrature, cdf_eq, cdf_eq_quadrature, ergodic_capacity,
    CapacityBound, ModulationScheme,
};
use rffso::channel::{ChannelConfig, Turbulence};

fn main() -> rffso::Result<()> {
    let cfg = ChannelConfig::reference(Turbulence::Moderate);
    let (rf, link) = (cfg.rf, cfg.link()?);
    println!("moderate turbulence, M=2 l=2 rho=0.72, both hops at 20 dB");
    println!(
        "outage at 0 dB   {:.10}  integral {:.10}",
        cdf_eq(1.0, &rf, &link)?,
        cdf_eq_quadrature(1.0, &rf, &link)?.value
    );
    for s in ModulationScheme::ALL {
        println!(
            "BER {:<6}       {:.10}  integral {:.10}",
            s.name(),
            avg_ber(s, &rf, &link)?,
            avg_ber_quadrature(s, &rf, &link)?.value
        );
    }
    println!(
        "capacity         {:.10}  integral {:.10}  bit/s/Hz",
        ergodic_capacity(&rf, &link, 1.0)?,
        capacity_quadrature(&rf, &link, 1.0, CapacityBound::Intensity)?.value
    );
    Ok(())
}
