//! Compare the pseudodistance with the Hilbert metric on a convex domain.
//!
//! On the Euclidean ball the chain distance never exceeds the Hilbert
//! cross-ratio metric, and the two agree exactly when the endpoints lie on
//! a common maximal null chord (a single-link chain is then optimal).
//!
//! Run with: cargo run --example hilbert_comparison

use markgeo::domains::ConcreteDomain;
use markgeo::markowitz::{delta_upper, hilbert_distance, ChainBudget};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let domain = ConcreteDomain::EuclideanBall {
        center: vec![0.0, 0.0],
        radius: 1.0,
    };
    let budget = ChainBudget {
        seeds: 12,
        refine_iters: 120,
        ..ChainBudget::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    println!("general pairs:");
    println!("{:>12} {:>12} {:>12}", "hilbert", "estimate", "h - est");
    for _ in 0..8 {
        let x = domain.sample_interior(&mut rng);
        let y = domain.sample_interior(&mut rng);
        let h = hilbert_distance(&domain, &x, &y).unwrap();
        let est = delta_upper(&domain, &x, &y, &budget).unwrap().0;
        println!("{:>12.6} {:>12.6} {:>12.2e}", h, est, h - est);
    }

    println!();
    println!("pairs on a common null chord (equality):");
    println!("{:>12} {:>12} {:>12}", "hilbert", "estimate", "|diff|");
    let s = 1.0 / 2f64.sqrt();
    for _ in 0..5 {
        let x = domain.sample_interior(&mut rng);
        let dir = [s, s];
        let span = domain.ray_exit(&x, &dir).unwrap();
        let tau = rng.random_range(0.2..0.8) * span.pos.value_or(1.0);
        let y = [x[0] + tau * dir[0], x[1] + tau * dir[1]];
        let h = hilbert_distance(&domain, &x, &y).unwrap();
        let est = delta_upper(&domain, &x, &y, &budget).unwrap().0;
        println!("{:>12.6} {:>12.6} {:>12.2e}", h, est, (h - est).abs());
    }
}
