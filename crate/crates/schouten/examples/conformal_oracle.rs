//! The two independent computation paths for the tensor of g_u = e^{2u} g:
//! the closed-form transformation law against direct recomputation on the
//! scaled metric, plus the rescaled-operator identity and the classical
//! flat-ball model of hyperbolic space.
//!
//!     cargo run --example conformal_oracle

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schouten::chart::{MetricField, ScalarField};
use schouten::conformal;
use schouten::curvature;
use schouten::linalg;
use schouten::sampling;

fn main() -> schouten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);

    println!("closed-form law vs direct recomputation on e^{{2u}} g:");
    for tau in [1.0, 2.0, 3.0] {
        let (domain, g) = sampling::random_flat_perturbed(&mut rng, 3, 0.1);
        let u = ScalarField::expression(sampling::random_polynomial(&mut rng, 3, 2, 0.4));
        let mut worst: f64 = 0.0;
        for _ in 0..5 {
            let x = sampling::random_interior_point(&mut rng, &domain);
            let jets = g.jets(&x)?;
            let curv = curvature::riemann(&jets)?;
            let a_g = curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0)?;
            let cov = conformal::covariant_data(&g, &u, &x)?;
            let closed = if tau == 1.0 {
                conformal::transform_schouten(&a_g, &cov, &jets.g)?
            } else {
                conformal::transform_modified_schouten(&a_g, &cov, &jets.g, tau)?
            };
            let direct = conformal::direct_modified_schouten(&g, &u, tau, &x)?;
            let gap = linalg::sup_norm(&linalg::sub(&closed, &direct))
                / (1.0 + linalg::sup_norm(&direct));
            worst = worst.max(gap);
        }
        println!("  tau = {tau}: worst relative gap over 5 points = {worst:.3e}");
    }

    println!("\nrescaled-operator identity V[u] = rho * A^tau(g_u):");
    for tau in [2.0, 3.0] {
        let (domain, g) = sampling::random_flat_perturbed(&mut rng, 4, 0.1);
        let u = ScalarField::expression(sampling::random_polynomial(&mut rng, 4, 2, 0.4));
        let x = sampling::random_interior_point(&mut rng, &domain);
        let rho = 2.0 / (tau - 1.0);
        let jets = g.jets(&x)?;
        let curv = curvature::riemann(&jets)?;
        let a_tau = curvature::modified_schouten(&curv.ric, curv.scal, &jets.g, tau, 1.0)?;
        let cov = conformal::covariant_data(&g, &u, &x)?;
        let v = conformal::v_operator(&cov, &linalg::scale(&a_tau, rho), &jets.g, tau)?;
        let a_gu = conformal::transform_modified_schouten(&a_tau, &cov, &jets.g, tau)?;
        let gap = linalg::sup_norm(&linalg::sub(&v, &linalg::scale(&a_gu, rho)));
        println!("  tau = {tau} (n = 4): |V - rho A| = {gap:.3e}");
    }

    println!("\nhyperbolic space as a conformal factor over the flat ball:");
    let flat = MetricField::identity(3);
    let u = ScalarField::parse("log(2 / (1 - (x1^2 + x2^2 + x3^2)))", 3)?;
    for x in [[0.0, 0.0, 0.0], [0.2, -0.1, 0.3]] {
        let jets = flat.jets(&x)?;
        let cov = conformal::covariant_data(&flat, &u, &x)?;
        let a_u = conformal::transform_schouten(&linalg::zeros(3), &cov, &jets.g)?;
        let eigs = conformal::eigs_vs_conformal(&a_u, &jets.g, u.value(&x)?)?;
        println!("  at {x:?}: eigs of A rel g_u = {:?} (expect -1/2)", eigs.as_slice());
    }
    Ok(())
}
