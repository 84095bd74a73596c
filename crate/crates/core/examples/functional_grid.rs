//! Tabulate the infinitesimal functional F on a causal diamond.
//!
//! F(x, v) measures how strongly the domain pinches the maximal lightlike
//! chord through `x` in direction `v`: it blows up near the boundary and
//! vanishes when the chord is a full line.
//!
//! Run with: cargo run --example functional_grid

use markgeo::domains::ConcreteDomain;
use markgeo::markowitz::f_flat;

fn main() {
    let domain = ConcreteDomain::Diamond {
        a: vec![-1.0, 0.0],
        b: vec![1.0, 0.0],
    };
    let s = 1.0 / 2f64.sqrt();
    let dirs = [[s, s], [-s, s]];

    println!("{:>8} {:>8} {:>12} {:>12}", "t", "x1", "F(+null)", "F(-null)");
    for i in -4i32..=4 {
        for j in -4i32..=4 {
            let x = [0.18 * i as f64, 0.18 * j as f64];
            if !domain.contains(&x) {
                continue;
            }
            let f: Vec<f64> = dirs
                .iter()
                .map(|v| f_flat(&domain, &x, v).unwrap())
                .collect();
            println!(
                "{:>8.2} {:>8.2} {:>12.5} {:>12.5}",
                x[0], x[1], f[0], f[1]
            );
        }
    }
    println!();
    println!("Values grow without bound toward the corners of the diamond,");
    println!("where both null chords through the point become short.");
}
