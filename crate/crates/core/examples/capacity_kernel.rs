//! The bivariate Meijer G kernel behind the capacity closed form, for the
//! three turbulence regimes of the reference link.

use rffso::channel::{FsoConfig, FsoLink, Turbulence};
use rffso::specfun::{egbmgf_estimate, Egbmgf2Spec};

fn main() -> rffso::Result<()> {
    for t in Turbulence::ALL {
        let p = FsoLink::new(&FsoConfig::reference(t.cn2(), 100.0))?.params;
        let spec = Egbmgf2Spec::capacity_kernel(
            p.pointing_ratio_sq(),
            p.large_scale,
            p.small_scale,
            10.0,
            0.5,
        )?;
        let e = egbmgf_estimate(&spec, None, None)?;
        println!(
            "{:>8}: kernel(10, 0.5) = {:.10}  errors s {:.1e} t {:.1e}  panels {}x{}",
            t.name(),
            e.value,
            e.error_s,
            e.error_t,
            e.panels_s,
            e.panels_t
        );
    }
    Ok(())
}
