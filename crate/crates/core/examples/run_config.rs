//! Loads a TOML run configuration, prints the resolved model and the
//! normalised config that outputs echo in their headers.

use rffso::cli::config::FileConfig;

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/reference.toml").into()
    });
    let run = FileConfig::load(path.as_ref())
        .and_then(FileConfig::normalised)
        .and_then(|f| {
            println!("{}", f.to_toml());
            f.resolve()
        });
    match run {
        Ok(r) => {
            println!("rf  {:?}", r.channel.rf);
            println!("fso {:?}", r.channel.fso);
            println!("threshold {} (linear), metrics {:?}", r.gamma_th, r.metrics);
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
