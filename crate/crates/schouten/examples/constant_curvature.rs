//! Curvature of the constant-curvature charts: the round sphere has
//! Ric = 2g, R = 6, K = 1/radius^2, and the hyperbolic ball mirrors all
//! signs. Also demonstrates the dimension-3 identity G(n, n) = -K(plane).
//!
//!     cargo run --example constant_curvature

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schouten::chart;
use schouten::curvature::{self, TangentPlane};
use schouten::eigen;
use schouten::linalg;

fn main() -> schouten::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for radius in [1.0, 2.0] {
        let (_, metric) = chart::round_sphere_chart(radius)?;
        let x = [0.8, 0.9, 0.4];
        let jets = metric.jets(&x)?;
        let curv = curvature::riemann(&jets)?;
        println!("sphere (radius {radius}) at {x:?}:");
        println!("  scalar curvature R = {:.9} (expect {})", curv.scal, 6.0 / (radius * radius));
        let ric_over_g = curv.ric[1][1] / jets.g[1][1];
        println!("  Ric/g ratio        = {:.9} (expect {})", ric_over_g, 2.0 / (radius * radius));
        let plane = TangentPlane {
            v1: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
            v2: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let k = curvature::sectional(&curv, &jets.g, &plane)?;
        println!("  sectional K        = {:.9} (expect {})", k, 1.0 / (radius * radius));
    }

    let (_, hyper) = chart::hyperbolic_ball(3)?;
    let x = [0.1, -0.2, 0.25];
    let jets = hyper.jets(&x)?;
    let curv = curvature::riemann(&jets)?;
    println!("\nhyperbolic ball at {x:?}:");
    println!("  scalar curvature R = {:.9} (expect -6)", curv.scal);

    // Einstein tensor vs sectional curvature in dimension three
    let g_tensor = curvature::einstein(&curv.ric, curv.scal, &jets.g);
    let eigs = eigen::generalized_eigs(&g_tensor, &jets.g)?;
    println!("  eigs of G rel g    = {:?} (expect all +1)", eigs.as_slice());
    let plane = TangentPlane {
        v1: vec![1.0, 0.2, 0.0],
        v2: vec![0.0, 1.0, -0.3],
    };
    let k = curvature::sectional(&curv, &jets.g, &plane)?;
    let normal = curvature::unit_normal(&jets.g, &plane)?;
    let gnn = linalg::quadratic_form(&g_tensor, &normal, &normal);
    println!("  K(plane)           = {k:.12}");
    println!("  G(normal, normal)  = {gnn:.12}");
    println!("  identity residual  = {:.3e}", (gnn + k).abs());
    Ok(())
}
