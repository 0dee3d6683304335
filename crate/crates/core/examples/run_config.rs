//! Driving the command layer from code: build a JSON config, run `moments`
//! into a scratch directory, then re-run from the manifest and compare bytes.
//!
//! `cargo run --release --example run_config`

use multistable::cli::{cmd_moments, RunConfig, RunOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = r#"{
        "process": {"kind": "levy", "alpha": "1.5", "stability": [1.5, 1.5]},
        "series": {"n_terms": 5000},
        "m_paths": 500,
        "seed": 17,
        "moments": {"t": 0.5, "eta": 0.5, "eps": {"start_exp": -4, "stop_exp": -8, "base": 2}}
    }"#;
    let cfg = RunConfig::from_json(config)?;
    let dir = std::env::temp_dir().join("multistable-run-config");
    let first = RunOptions {
        out: dir.join("first"),
        ..RunOptions::default()
    };
    let manifest = cmd_moments(&cfg, &first)?;
    println!("wrote {:?} to {}", manifest.outputs, first.out.display());
    println!("{}", std::fs::read_to_string(first.out.join("fit.csv"))?);

    let replay = RunConfig::load(&first.out.join("manifest.json"))?;
    let second = RunOptions {
        out: dir.join("second"),
        ..RunOptions::default()
    };
    cmd_moments(&replay, &second)?;
    for name in ["moments.csv", "fit.csv"] {
        let same = std::fs::read(first.out.join(name))? == std::fs::read(second.out.join(name))?;
        println!("{name}: identical on replay = {same}");
    }
    Ok(())
}
