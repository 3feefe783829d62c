//! Derived optical-link parameters per turbulence regime and the density of
//! the selected relay's RF SNR.

use rffso::channel::{derive_fso, re_constant, rf_cdf, rf_pdf, FsoConfig, RfConfig, Turbulence};

fn main() -> rffso::Result<()> {
    println!("regime     Cn2       rytov   alpha   beta    psi     A0");
    for t in Turbulence::ALL {
        let p = derive_fso(&FsoConfig::reference(t.cn2(), 1.0))?;
        println!(
            "{:<9} {:.1e}  {:.4}  {:.3}   {:.3}   {:.4}  {:.4}",
            t.name(),
            t.cn2(),
            p.rytov_variance,
            p.large_scale,
            p.small_scale,
            p.pointing_ratio,
            p.collected_fraction
        );
    }

    println!("\nselected relay SNR, M = 4, mean 10 (linear)");
    for (l, rho) in [(1, 0.5), (4, 0.5), (4, 1.0)] {
        let rf = RfConfig::new(4, l, rho, 10.0)?;
        println!(
            "  l={l} rho={rho}: pdf(5) = {:.5}  cdf(5) = {:.5}  relay constant {:.4}",
            rf_pdf(5.0, &rf),
            rf_cdf(5.0, &rf),
            re_constant(&rf)
        );
    }
    Ok(())
}
