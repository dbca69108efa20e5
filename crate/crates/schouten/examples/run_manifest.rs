//! Drive a verification from a JSON manifest through the library API — the
//! same path the `schouten verify` subcommand takes.
//!
//!     cargo run --release --example run_manifest

use schouten::manifest::{self, Manifest};

fn main() -> schouten::Result<()> {
    let text = r#"{
        "schema": 1,
        "dimension": 3,
        "metric": {"builtin": "flat_perturbed", "epsilon": 0.1},
        "potential": {"linear": [1.0, 1.0, 0.0, 0.0]},
        "tau": 2,
        "alpha": 1,
        "cone": {"kind": "gamma_k", "k": 3},
        "grid": 9,
        "mode": "search",
        "search": {"N_max": 64},
        "seed": 7,
        "diagnostics": {"v_identity_check": true}
    }"#;
    let m: Manifest = serde_json::from_str(text)?;
    let out = manifest::run(&m)?;
    println!("verified: {}", out.verified);
    println!("{}", manifest::report_to_json(&out.report)?);
    Ok(())
}
