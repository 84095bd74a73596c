//! Conformal convexity probes and the quasi-hyperbolic lower bound.
//!
//! A domain is conformally convex when every boundary point admits a
//! supporting Möbius hyperplane.  The probe samples boundary points and
//! searches for supports; a boundary point where the search fails with a
//! definite margin is reported as a counterexample.  On the non-convex
//! union of two tilted half-space futures, the distance still diverges
//! toward the boundary, which the quasi-hyperbolic lower bound detects.
//!
//! Run with: cargo run --example convexity_report

use markgeo::domains::convexity::{conformal_convexity_report, ConvexityVerdict};
use markgeo::domains::ConcreteDomain;
use markgeo::markowitz::quasi_hyperbolic_lower;

fn main() {
    let cases: Vec<(&str, ConcreteDomain)> = vec![
        (
            "causal diamond",
            ConcreteDomain::Diamond {
                a: vec![-1.0, 0.0],
                b: vec![1.0, 0.0],
            },
        ),
        ("hyperboloid shell", ConcreteDomain::HyperboloidShell),
        (
            "union of tilted futures",
            ConcreteDomain::TwoHalfFutureUnion { n: 1, tilt: 0.5 },
        ),
    ];
    for (name, domain) in &cases {
        let report = conformal_convexity_report(domain, 10, 200, 0);
        match &report.verdict {
            ConvexityVerdict::LikelyConformallyConvex => {
                println!("{name}: likely conformally convex ({} boundary samples supported)",
                    report.samples.len());
            }
            ConvexityVerdict::CounterexamplePoint(p) => {
                println!("{name}: NOT conformally convex, no support at {p:?}");
            }
        }
    }

    // Divergence toward the boundary of the non-convex union.
    let wedge = ConcreteDomain::TwoHalfFutureUnion { n: 1, tilt: 0.5 };
    let x0 = [1.0, 0.0];
    let b = [-0.4, 0.8]; // boundary point
    println!();
    println!("quasi-hyperbolic lower bound from {x0:?} toward boundary point {b:?}:");
    println!("{:>12} {:>14}", "lambda", "lower bound");
    for k in 0..5 {
        let lam = 0.3 * 0.25f64.powi(k);
        let y = [b[0] + lam * (x0[0] - b[0]), b[1] + lam * (x0[1] - b[1])];
        let q = quasi_hyperbolic_lower(&wedge, &x0, &y, 4.0, 60, 0).unwrap();
        println!("{:>12.2e} {:>14.4}", lam, q);
    }
    println!();
    println!("The bound increases without limit: the union is hyperbolic");
    println!("even though it is not conformally convex.");
}
