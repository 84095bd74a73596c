//! Brody reparametrization of a projectively parametrized lightlike
//! geodesic (PPL).
//!
//! Given a PPL gamma : I -> M with |gamma'(0)| > c, a homography h of I
//! produces alpha = gamma . h with |alpha'(0)| = c and the uniform speed
//! bound |alpha'(t)| <= c / (1 - t^2) on all of I.  This is the lightlike
//! analogue of the classical reparametrization lemma behind Brody limits.
//!
//! Run with: cargo run --example brody_bound

use markgeo::domains::ConcreteDomain;
use markgeo::geodesic::{brody_reparametrize, maximal_ppl_flat};

fn main() {
    let domain = ConcreteDomain::EuclideanBall {
        center: vec![0.0, 0.0],
        radius: 1.0,
    };
    let norm = |_x: &[f64], v: &[f64]| -> f64 { v.iter().map(|c| c * c).sum::<f64>().sqrt() };

    let s = 1.0 / 2f64.sqrt();
    let x = [0.3, -0.2];
    let v = [s, s];
    let gamma = maximal_ppl_flat(&domain, &x, &v).unwrap();
    let speed0 = norm(&x, &gamma.deriv(0.0).unwrap());
    let c = 0.5 * speed0;
    println!("|gamma'(0)| = {speed0:.6}, target c = {c:.6}");

    let (h, _trace) = brody_reparametrize(&gamma, c, &norm).unwrap();
    println!();
    println!("{:>8} {:>14} {:>14} {:>8}", "t", "|alpha'(t)|", "c/(1-t^2)", "ratio");
    let mut sup_ratio = 0.0f64;
    for i in 0..=20 {
        let t = -0.95 + 1.9 * i as f64 / 20.0;
        let speed = norm(&[0.0; 2], &gamma.deriv_composed(&h, t).unwrap());
        let bound = c / (1.0 - t * t);
        sup_ratio = sup_ratio.max(speed / bound);
        println!("{:>8.3} {:>14.6} {:>14.6} {:>8.4}", t, speed, bound, speed / bound);
    }
    let a0 = norm(&[0.0; 2], &gamma.deriv_composed(&h, 0.0).unwrap());
    println!();
    println!("|alpha'(0)| = {a0:.10}  (target {c:.10})");
    println!("sup |alpha'(t)| / bound = {sup_ratio:.6}  (<= 1)");
}
