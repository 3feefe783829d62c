//! Meijer G-function values by contour quadrature, checked against
//! elementary closed forms.

use rffso::specfun::{meijer_g_estimate, MeijerGSpec};

fn main() -> rffso::Result<()> {
    for z in [0.1, 1.0, 10.0] {
        let exp = meijer_g_estimate(&MeijerGSpec::new(1, 0, vec![], vec![0.0], z)?, None)?;
        let rat = meijer_g_estimate(&MeijerGSpec::new(1, 1, vec![0.0], vec![0.0], z)?, None)?;
        println!(
            "z = {z:>5}: G10_01 = {:.15} (exp(-z) = {:.15}, est. error {:.1e})",
            exp.value,
            (-z).exp(),
            exp.error
        );
        println!(
            "          G11_11 = {:.15} (1/(1+z) = {:.15}, est. error {:.1e})",
            rat.value,
            1.0 / (1.0 + z),
            rat.error
        );
    }

    // Bessel reduction G20_02(z | 0, 0) = 2 K0(2 sqrt z)
    let k = meijer_g_estimate(&MeijerGSpec::new(2, 0, vec![], vec![0.0, 0.0], 1.0)?, None)?;
    println!(
        "G20_02(1) = {:.12} on the contour Re s = {:.3}",
        k.value, k.contour.abscissa
    );
    Ok(())
}
