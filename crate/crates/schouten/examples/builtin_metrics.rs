//! Walk the builtin metric catalog: construct each metric on its chart
//! domain and report the smallest metric eigenvalue over a 9^n grid.
//!
//!     cargo run --example builtin_metrics

use schouten::chart::{self, BuiltinParams};

fn main() -> schouten::Result<()> {
    let catalog: Vec<(&str, usize, BuiltinParams)> = vec![
        ("euclidean", 3, BuiltinParams::default()),
        (
            "round_sphere_chart",
            3,
            BuiltinParams {
                radius: Some(1.0),
                ..Default::default()
            },
        ),
        ("hyperbolic_ball", 3, BuiltinParams::default()),
        (
            "flat_perturbed",
            3,
            BuiltinParams {
                epsilon: Some(0.1),
                ..Default::default()
            },
        ),
        (
            "conformal_flat",
            3,
            BuiltinParams {
                phi: Some("x1 * x2".into()),
                ..Default::default()
            },
        ),
        ("flat_perturbed", 4, BuiltinParams::default()),
    ];

    println!("{:<22} {:>3} {:>28} {:>14}", "builtin", "n", "domain", "min eigenvalue");
    for (name, n, params) in catalog {
        let (domain, metric) = chart::builtin_metric(name, n, &params)?;
        let grid = chart::make_grid(&domain, 9)?;
        let min_eig = chart::check_spd_on_grid(&metric, &grid)?;
        let box_str = format!(
            "[{:+.1},{:+.1}]^{}x...",
            domain.lower()[0],
            domain.upper()[0],
            n
        );
        println!("{name:<22} {n:>3} {box_str:>28} {min_eig:>14.6}");
    }

    println!("\nall builtins stay positive definite on their stated domains");
    Ok(())
}
