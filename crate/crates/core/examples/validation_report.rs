//! Runs validation suites (default: the special-function suite) and prints
//! the report rows. Pass suite names as arguments, e.g. `qualitative`.

use rffso::validation::{run_suites, Suite, ValidationConfig};

fn main() -> rffso::Result<()> {
    let suites = std::env::args()
        .skip(1)
        .map(|s| s.parse::<Suite>())
        .collect::<rffso::Result<Vec<_>>>()?;
    let suites = if suites.is_empty() {
        vec![Suite::Specfun]
    } else {
        suites
    };
    let report = run_suites(&suites, &ValidationConfig::default());
    for r in &report.rows {
        println!(
            "{} {:<12} {:<48} {:<10} {:.3e} <= {:.1e}",
            if r.pass { "pass" } else { "FAIL" },
            r.suite,
            r.case,
            r.metric,
            r.score,
            r.tolerance
        );
    }
    println!("{:?}", report.summary);
    Ok(())
}
