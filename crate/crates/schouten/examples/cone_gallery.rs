//! The Gamma_k cone family: membership margins, the boundary constant
//! varrho, type classification, and the admissible tau range.
//!
//!     cargo run --example cone_gallery

use schouten::cones::Cone;

fn main() -> schouten::Result<()> {
    println!("membership samples in R^3:");
    let samples: [[f64; 3]; 4] = [
        [1.0, 2.0, 3.0],
        [1.0, 1.0, -0.5],
        [1.0, 1.0, -1.0],
        [-1.0, -1.0, -1.0],
    ];
    for k in 1..=3 {
        let cone = Cone::gamma_k(3, k)?;
        for lam in &samples {
            let m = cone.contains(lam)?;
            println!(
                "  gamma_{k}  lambda = {lam:>18?}  member = {:<5}  margin = {:+.4}",
                m.member, m.margin
            );
        }
    }

    println!("\nboundary constant and type, 1 <= k <= n <= 6:");
    for n in 2..=6usize {
        for k in 1..=n {
            let cone = Cone::gamma_k(n, k)?;
            println!(
                "  n = {n}, k = {k}:  varrho = {:.6} (closed form {:.6})  {:?}",
                cone.varrho()?,
                n as f64 / k as f64,
                cone.classify_type()?
            );
        }
    }

    println!("\nadmissible tau thresholds (tau > 1 + (n-2)/varrho):");
    for (n, k) in [(3usize, 3usize), (3, 1), (4, 4), (5, 2)] {
        let cone = Cone::gamma_k(n, k)?;
        let threshold = 1.0 + (n as f64 - 2.0) / cone.varrho()?;
        println!(
            "  gamma_{k} in R^{n}: threshold {threshold:.4}; tau = n-1 = {} admissible: {}",
            n - 1,
            cone.tau_admissible(n as f64 - 1.0)?
        );
    }
    Ok(())
}
