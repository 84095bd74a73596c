//! Approximate conformal-convexity checking.
//!
//! A domain is conformally convex when every boundary point admits a
//! supporting Möbius hyperplane: a hyperplane of the projective model
//! through the point whose trace misses the domain.  The checker samples
//! boundary points by ray shooting from interior seeds, then solves the
//! linear feasibility problem "find `u` with `b(u, lift(boundary)) = 0` and
//! `b(u, lift(sample))` one-signed with margin" by projecting onto the
//! orthocomplement of the boundary lift and maximizing the minimum
//! normalized margin (sampled sphere of candidate normals plus local
//! simplex ascent).  Verdicts are sampled evidence, not proofs.

use super::ConcreteDomain;
use crate::bilinear::SpaceVec;
use crate::models::{MobiusHyperplane, StereoChart};
use crate::opt::nelder_mead;
use rand::Rng;
use rand::SeedableRng;

/// Minimum accepted normalized margin.
pub const MARGIN_THRESHOLD: f64 = 1e-6;

/// Outcome of a convexity scan.
#[derive(Debug, Clone)]
pub enum ConvexityVerdict {
    LikelyConformallyConvex,
    /// A sampled boundary point with no supporting hyperplane above the
    /// margin threshold.
    CounterexamplePoint(Vec<f64>),
}

/// Per-boundary-sample outcome.
#[derive(Debug, Clone)]
pub struct SupportResult {
    pub boundary_point: Vec<f64>,
    pub hyperplane: Option<(MobiusHyperplane, f64)>,
}

#[derive(Debug, Clone)]
pub struct ConvexityReport {
    pub samples: Vec<SupportResult>,
    pub verdict: ConvexityVerdict,
}

/// Orthonormal (Euclidean) basis of the orthocomplement of `w` in R^N.
fn euclid_complement_basis(w: &[f64]) -> Vec<Vec<f64>> {
    let n = w.len();
    let nw: f64 = w.iter().map(|c| c * c).sum::<f64>().sqrt();
    let wn: Vec<f64> = w.iter().map(|c| c / nw).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        // Remove the w component, then previously accepted directions.
        let d: f64 = e.iter().zip(&wn).map(|(a, b)| a * b).sum();
        for (c, v) in e.iter_mut().zip(&wn) {
            *c -= d * v;
        }
        for b in &basis {
            let d: f64 = e.iter().zip(b).map(|(a, b)| a * b).sum();
            for (c, v) in e.iter_mut().zip(b) {
                *c -= d * v;
            }
        }
        let norm: f64 = e.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-8 {
            e.iter_mut().for_each(|c| *c /= norm);
            basis.push(e);
            if basis.len() == n - 1 {
                break;
            }
        }
    }
    basis
}

/// Search for a supporting Möbius hyperplane at chart boundary point `bpt`
/// against the given interior samples.  Returns the hyperplane and its
/// normalized margin when one clears [`MARGIN_THRESHOLD`].
pub fn supporting_hyperplane_search(
    chart: &StereoChart,
    bpt: &[f64],
    interior_samples: &[Vec<f64>],
    seed: u64,
) -> Option<(MobiusHyperplane, f64)> {
    assert!(!interior_samples.is_empty());
    let amb = chart.ambient();
    let n = amb.dim();
    let lift_b = chart.lift(bpt);
    let lifts: Vec<(Vec<f64>, f64)> = interior_samples
        .iter()
        .map(|s| {
            let l = chart.lift(s);
            let norm = l.euclid_norm();
            (l.coords, norm)
        })
        .collect();
    // Candidates live in the Euclidean orthocomplement of G * lift_b, where
    // G is the sign matrix, so that b(u, lift_b) = 0 automatically.
    let g_lift: Vec<f64> = lift_b
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| amb.basis_sign(i) * c)
        .collect();
    let basis = euclid_complement_basis(&g_lift);
    let expand = |c: &[f64]| -> Vec<f64> {
        let mut u = vec![0.0; n];
        for (ci, b) in c.iter().zip(&basis) {
            for (uc, bc) in u.iter_mut().zip(b) {
                *uc += ci * bc;
            }
        }
        u
    };
    // Signed minimum normalized margin; the sign of u is free, so take the
    // better orientation.
    let margin_of = |u: &[f64]| -> f64 {
        let un: f64 = u.iter().map(|c| c * c).sum::<f64>().sqrt();
        if un < 1e-12 {
            return f64::NEG_INFINITY;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (l, norm) in &lifts {
            let m = amb.beta(u, l) / (un * norm);
            lo = lo.min(m);
            hi = hi.max(m);
        }
        lo.max(-hi)
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let k = basis.len();
    let mut best: (Vec<f64>, f64) = (vec![0.0; k], f64::NEG_INFINITY);
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for _ in 0..300 {
        let c: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
        candidates.push(c);
    }
    let mut scored: Vec<(Vec<f64>, f64)> = candidates
        .into_iter()
        .map(|c| {
            let m = margin_of(&expand(&c));
            (c, m)
        })
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    for (c, _) in scored.into_iter().take(4) {
        let (copt, neg_margin) = nelder_mead(|c| -margin_of(&expand(c)), &c, 0.3, 300);
        if -neg_margin > best.1 {
            best = (copt, -neg_margin);
        }
    }
    if best.1 < MARGIN_THRESHOLD {
        return None;
    }
    let mut u = expand(&best.0);
    // Orient so domain samples pair positively.
    let first: f64 = amb.beta(&u, &lifts[0].0);
    if first < 0.0 {
        u.iter_mut().for_each(|c| *c = -*c);
    }
    let normal = SpaceVec::new(amb, u).ok()?;
    Some((MobiusHyperplane::new(normal).ok()?, best.1))
}

/// Sample boundary points by shooting rays from interior seeds in random
/// directions and bisecting to the first crossing.
pub fn sample_boundary<R: Rng>(
    domain: &ConcreteDomain,
    count: usize,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let dim = domain.dim();
    let mut out = Vec::with_capacity(count);
    let mut guard = 0;
    while out.len() < count && guard < 100 * count {
        guard += 1;
        let x = domain.sample_interior(rng);
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() < 1e-6 {
            continue;
        }
        let span = domain.ray_exit_bisect(&x, &v);
        let side = if rng.random::<bool>() { span.pos } else { span.neg };
        if let Some(t) = side.finite() {
            out.push(x.iter().zip(&v).map(|(a, b)| a + t * b).collect());
        }
    }
    out
}

/// Run the sampled convexity scan.
pub fn conformal_convexity_report(
    domain: &ConcreteDomain,
    n_boundary: usize,
    n_interior: usize,
    seed: u64,
) -> ConvexityReport {
    assert!(n_boundary >= 1 && n_interior >= 1);
    let space = domain.space();
    let chart = StereoChart::canonical(space.signature.p, space.signature.q).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let boundary = sample_boundary(domain, n_boundary, &mut rng);
    let mut interior: Vec<Vec<f64>> = (0..n_interior)
        .map(|_| domain.sample_interior(&mut rng))
        .collect();
    // Near-boundary constraint points: boundary samples pulled slightly
    // inward.  Uniform interior samples alone let the margin search cut off
    // thin unsampled slivers; points hugging the boundary pin candidate
    // hyperplanes to genuine tangency.
    for b in sample_boundary(domain, n_interior, &mut rng) {
        let anchor = domain.sample_interior(&mut rng);
        let p: Vec<f64> = b
            .iter()
            .zip(&anchor)
            .map(|(x, a)| x + 0.01 * (a - x))
            .collect();
        if domain.contains(&p) {
            interior.push(p);
        }
    }
    let mut samples = Vec::with_capacity(boundary.len());
    let mut verdict = ConvexityVerdict::LikelyConformallyConvex;
    for (i, bpt) in boundary.iter().enumerate() {
        let found = supporting_hyperplane_search(&chart, bpt, &interior, seed ^ (i as u64 + 1));
        if found.is_none() {
            if matches!(verdict, ConvexityVerdict::LikelyConformallyConvex) {
                verdict = ConvexityVerdict::CounterexamplePoint(bpt.clone());
            }
        }
        samples.push(SupportResult {
            boundary_point: bpt.clone(),
            hyperplane: found,
        });
    }
    ConvexityReport { samples, verdict }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_ball_is_conformally_convex() {
        let d = ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let report = conformal_convexity_report(&d, 12, 40, 3);
        assert!(
            matches!(report.verdict, ConvexityVerdict::LikelyConformallyConvex),
            "ball verdict: {:?}",
            report.verdict
        );
        for s in &report.samples {
            let (_, margin) = s.hyperplane.as_ref().unwrap();
            assert!(*margin > MARGIN_THRESHOLD);
        }
    }

    #[test]
    fn diamond_is_conformally_convex() {
        let d = ConcreteDomain::Diamond {
            a: vec![-1.0, 0.0, 0.0],
            b: vec![1.0, 0.0, 0.0],
        };
        let report = conformal_convexity_report(&d, 10, 40, 5);
        assert!(matches!(
            report.verdict,
            ConvexityVerdict::LikelyConformallyConvex
        ));
    }

    #[test]
    fn two_half_future_union_is_not() {
        let d = ConcreteDomain::TwoHalfFutureUnion { n: 1, tilt: 0.5 };
        let report = conformal_convexity_report(&d, 14, 60, 11);
        assert!(
            matches!(report.verdict, ConvexityVerdict::CounterexamplePoint(_)),
            "expected a counterexample, got {:?}",
            report.verdict
        );
    }

    #[test]
    fn hyperplanes_separate_fresh_samples() {
        let d = ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let report = conformal_convexity_report(&d, 8, 300, 17);
        let space = d.space();
        let chart = StereoChart::canonical(space.signature.p, space.signature.q).unwrap();
        let amb = chart.ambient();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let fresh: Vec<Vec<f64>> = (0..60).map(|_| d.sample_interior(&mut rng)).collect();
        for s in &report.samples {
            let (h, margin) = s.hyperplane.as_ref().unwrap();
            let un = h.normal.euclid_norm();
            for f in &fresh {
                let l = chart.lift(f);
                let m = amb.beta(&h.normal.coords, &l.coords) / (un * l.euclid_norm());
                assert!(
                    m > 0.0,
                    "fresh sample crosses a reported hyperplane: {m} vs margin {margin}"
                );
            }
        }
    }

    #[test]
    fn slit_inner_corner_has_no_support() {
        // The reflex corner (u,w) = (0,1) -> chart (t,s) = (-0.5, 0.5): the
        // box edge w = 1 (u < 0) meets the hyperbola branch w = 1/u, which
        // climbs the w-axis as u -> 0+.  The domain fills three of the four
        // local quadrants, so no trace through the point can keep it all on
        // one side.
        let d = ConcreteDomain::Slit;
        let chart = StereoChart::canonical(1, 1).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let interior: Vec<Vec<f64>> = (0..160).map(|_| d.sample_interior(&mut rng)).collect();
        let found = supporting_hyperplane_search(&chart, &[-0.5, 0.5], &interior, 31);
        assert!(found.is_none(), "slit corner unexpectedly supported");
    }
}
