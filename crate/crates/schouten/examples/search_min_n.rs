//! Find the smallest integer N for which the tensor of g_u = e^{2 e^{Nv}} g
//! has its eigenvalue vector strictly inside the cone at every grid point,
//! for the tau-family (here tau = 2 and 3, positive orthant) and for the
//! tau = 1 branch (gamma_1, eigenvalues of -A(g_u)).
//!
//!     cargo run --release --example search_min_n

use schouten::chart::{self, ScalarField};
use schouten::cones::Cone;
use schouten::construct::{self, VerifySetup};

fn main() -> schouten::Result<()> {
    let (domain, g) = chart::flat_perturbed(3, 0.1, None)?;
    let grid = chart::make_grid(&domain, 9)?;
    let v = ScalarField::linear(vec![1.0, 1.0, 0.0, 0.0]); // v = 1 + x1

    for (tau, alpha, k) in [(2.0, 1.0, 3), (3.0, 1.0, 3), (1.0, -1.0, 1)] {
        let setup = VerifySetup {
            tau,
            alpha,
            cone: Cone::gamma_k(3, k)?,
        };
        let outcome = construct::search_min_n(&g, &v, &setup, &grid, 64)?;
        println!(
            "tau = {tau}, alpha = {alpha:+}, cone gamma_{k} on {} grid points:",
            grid.len()
        );
        for p in &outcome.probes {
            println!(
                "  probe N = {:>3}: min margin {:+.6}  {}",
                p.big_n,
                p.min_margin,
                if p.verified { "ok" } else { "fail" }
            );
        }
        match outcome.n_star {
            Some(n_star) => println!(
                "  minimal verified N = {n_star} (min margin {:+.6}, non-monotone: {})\n",
                outcome.report.min_margin, outcome.non_monotone
            ),
            None => println!("  no N within budget\n"),
        }
    }

    // a stiffer run: on the round sphere the tau = 2 tensor starts out
    // negative definite (G = -g), and a shallow potential drags the search
    // through the full ladder-plus-bisection dance
    let (domain, g) = chart::round_sphere_chart(1.0)?;
    let grid = chart::make_grid(&domain, 9)?;
    let v = ScalarField::linear(vec![1.0, 0.05, 0.0, 0.0]);
    let setup = VerifySetup {
        tau: 2.0,
        alpha: 1.0,
        cone: Cone::gamma_k(3, 3)?,
    };
    let outcome = construct::search_min_n(&g, &v, &setup, &grid, 64)?;
    println!("round sphere, tau = 2, v = 1 + 0.05 x1:");
    for p in &outcome.probes {
        println!(
            "  probe N = {:>3}: min margin {:+.6}  {}",
            p.big_n,
            p.min_margin,
            if p.verified { "ok" } else { "fail" }
        );
    }
    println!("  minimal verified N = {:?}", outcome.n_star);
    Ok(())
}
