//! Degeneracy of the pseudodistance on the slit square.
//!
//! Removing a null segment from the square leaves the domain connected by
//! lightlike chains that slide around the slit at arbitrarily small cost:
//! the pseudodistance between points on opposite sides of the slit is 0,
//! even though every continuous path must make a detour.  A three-link
//! staircase through the corridor at u = eps certifies cost -> 0 as
//! eps -> 0.
//!
//! Run with: cargo run --example slit_degeneracy

use markgeo::domains::ConcreteDomain;
use markgeo::markowitz::{chain_length, tcli_check, ChainLink, LightlikeChain};

fn main() {
    let domain = ConcreteDomain::Slit;
    // Chart points with null coordinates (u, w) = (0, 0.6) and (0, -0.6):
    // separated by the slit along u = 0.
    let uw = |u: f64, w: f64| vec![0.5 * (u - w), 0.5 * (u + w)];

    println!(
        "two-sided chord condition holds: {}",
        tcli_check(&domain, 128, 0)
    );
    println!();
    println!("{:>10} {:>14}", "eps", "chain length");
    for k in 1..=6 {
        let eps = 10f64.powi(-k);
        let mk = |base: Vec<f64>, dir: Vec<f64>, tau: f64| ChainLink {
            span: domain.ray_exit(&base, &dir).unwrap(),
            base,
            dir,
            tau_a: 0.0,
            tau_b: tau,
        };
        let chain = LightlikeChain {
            links: vec![
                mk(uw(0.0, 0.6), vec![1.0, 1.0], eps / 2.0),
                mk(uw(eps, 0.6), vec![-1.0, 1.0], -0.6),
                mk(uw(eps, -0.6), vec![1.0, 1.0], -eps / 2.0),
            ],
        };
        let len = chain_length(&chain).unwrap();
        println!("{:>10.0e} {:>14.8}", eps, len);
    }
    println!();
    println!("The chain length vanishes with eps: the pseudodistance between");
    println!("the two sides of the slit is zero and the domain is not");
    println!("hyperbolic, despite satisfying the two-sided chord condition.");
}
