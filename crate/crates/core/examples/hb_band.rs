//! Bi-Lipschitz comparison on the hyperbolic-band domain Omega_1 in R^{1,2}.
//!
//! On Omega_l the pseudodistance is comparable to the Pythagorean
//! combination of a hyperboloid distance and a half-space hyperbolic
//! distance.  This example estimates the comparison constant empirically by
//! sampling well-separated pairs.
//!
//! Run with: cargo run --example hb_band

use markgeo::domains::ConcreteDomain;
use markgeo::markowitz::{delta_upper, hb_reference_distance, ChainBudget};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let domain = ConcreteDomain::HB { n: 2, l: 1 };
    let budget = ChainBudget {
        seeds: 16,
        refine_iters: 100,
        ..ChainBudget::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = 0.0f64;
    let mut printed = 0;
    println!("{:>12} {:>12} {:>8}", "reference", "estimate", "ratio");
    while printed < 30 {
        let x = domain.sample_interior(&mut rng);
        let y = domain.sample_interior(&mut rng);
        let reference = hb_reference_distance(2, 1, &x, &y).unwrap();
        if !(0.5..=4.0).contains(&reference) {
            continue;
        }
        let estimate = delta_upper(&domain, &x, &y, &budget).unwrap().0;
        let ratio = estimate / reference;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        println!("{:>12.5} {:>12.5} {:>8.4}", reference, estimate, ratio);
        printed += 1;
    }
    println!();
    println!(
        "empirical band: {:.3} <= estimate / reference <= {:.3}",
        min_ratio, max_ratio
    );
    println!(
        "two-sided comparison constant C = {:.3}",
        max_ratio.max(1.0 / min_ratio)
    );
}
