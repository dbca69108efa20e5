//! Parse a scalar expression and evaluate it to second order, then compare
//! the jet derivatives against central finite differences.
//!
//!     cargo run --example expression_jets

#![allow(clippy::needless_range_loop)]

use schouten::expr;
use schouten::sampling;

fn main() -> schouten::Result<()> {
    let text = "sin(x1 * x2) + exp(0.3 * x1) / (1 + x2^2)";
    let e = expr::parse(text, 2)?;
    println!("input:    {text}");
    println!("reparsed: {e}");

    let x = [0.7, 1.3];
    let jet = expr::eval_jet2(&e, &x)?;
    println!("\nat x = {x:?}");
    println!("value     {:+.12}", jet.val());
    println!("gradient  [{:+.12}, {:+.12}]", jet.grad()[0], jet.grad()[1]);
    println!("hessian");
    for i in 0..2 {
        println!(
            "  [{:+.12}, {:+.12}]",
            jet.hess_entry(i, 0),
            jet.hess_entry(i, 1)
        );
    }

    let (fd_grad, fd_hess) = sampling::finite_difference_jet(&e, &x, 1e-4)?;
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        worst = worst.max((jet.grad()[i] - fd_grad[i]).abs());
        for j in 0..2 {
            worst = worst.max((jet.hess_entry(i, j) - fd_hess[i][j]).abs());
        }
    }
    println!("\nlargest deviation from central finite differences: {worst:.3e}");

    // domain errors carry the offending subexpression
    let bad = expr::parse("1 + log(x1 - 2)", 1)?;
    match expr::eval_jet2(&bad, &[1.0]) {
        Err(err) => println!("\nexpected domain error: {err}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
