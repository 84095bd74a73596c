//! The acceptance suite: ten numbered end-to-end checks, each pinned to an
//! oracle or a property with explicit tolerances.  Every check reports a
//! single pass/fail line; nothing here adapts thresholds to make a run green.

use crate::bilinear::random_isotropic;
use crate::cli::{diamond_box_oracle, lower_bound_for};
use crate::domains::convexity::{conformal_convexity_report, ConvexityVerdict};
use crate::domains::{ConcreteDomain, SphereProductDomain};
use crate::geodesic::{
    brody_reparametrize, maximal_ppl_flat, solve_projective_parameter, MetricField,
    ProjectiveParamState,
};
use crate::markowitz::{
    chain_length, delta_upper, f_flat, f_general, f_sphere_product, hb_reference_distance,
    hilbert_distance, quasi_hyperbolic_lower, tcli_check, ChainBudget, ChainLink, LightlikeChain,
};
use crate::Tolerances;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn summary_line(&self) -> String {
        format!(
            "criterion {:02} [{}] {} — {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.seconds
        )
    }
}

fn timed(
    id: usize,
    name: &'static str,
    f: impl FnOnce() -> (bool, String),
) -> CriterionResult {
    let start = Instant::now();
    let (passed, detail) = f();
    CriterionResult {
        id,
        name,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

/// Run all ten criteria with the given tolerances and seed.
pub fn run_all(tol: &Tolerances, seed: u64) -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(seed),
        criterion_3(seed),
        criterion_4(seed),
        criterion_5(seed),
        criterion_6(seed),
        criterion_7(seed),
        criterion_8(seed),
        criterion_9(tol, seed),
        criterion_10(seed),
    ]
}

fn ball11() -> ConcreteDomain {
    ConcreteDomain::EuclideanBall {
        center: vec![0.0, 0.0],
        radius: 1.0,
    }
}

fn null_box() -> ConcreteDomain {
    ConcreteDomain::Diamond {
        a: vec![-1.0, 0.0],
        b: vec![1.0, 0.0],
    }
}

// ---------------------------------------------------------------------------
// 1. Projective-parameter oracle on S^1 x S^2: u(t) = tan(t).
// ---------------------------------------------------------------------------
fn criterion_1() -> CriterionResult {
    timed(1, "projective parameter u = tan on S^1 x S^2", || {
        let metric = MetricField::s1xs2_chart();
        let x0 = [0.0, PI / 2.0, 0.0];
        let v0 = [1.0, 0.0, 1.0];
        let trace = match solve_projective_parameter(
            &metric,
            &x0,
            &v0,
            (0.0, 1.2),
            1e-4,
            ProjectiveParamState::SEED,
        ) {
            Ok(t) => t,
            Err(e) => return (false, format!("integration failed: {e}")),
        };
        let mut max_err = 0.0f64;
        let mut compared = 0;
        for (t, theta) in trace.times.iter().zip(&trace.theta) {
            if *t < 0.0 || *t > 1.2 {
                continue;
            }
            // theta = arctan(u) continued across chart flips, so tan(theta)
            // recovers u on every branch.
            let err = (theta.tan() - t.tan()).abs();
            max_err = max_err.max(err);
            compared += 1;
        }
        (
            compared > 1000 && max_err < 1e-6,
            format!("max |u - tan t| = {max_err:.2e} over {compared} samples"),
        )
    })
}

// ---------------------------------------------------------------------------
// 2. Dual-path F agreement: ODE development vs closed forms.
// ---------------------------------------------------------------------------
fn criterion_2(seed: u64) -> CriterionResult {
    timed(2, "dual-path F agreement", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x2222);
        let mut max_rel = 0.0f64;
        for (domain, count) in [
            (ball11(), 50usize),
            (
                ConcreteDomain::HalfSpaceFuture {
                    base: vec![0.0, 0.0, 0.0],
                    normal: vec![1.0, 0.0, 0.0],
                },
                50usize,
            ),
        ] {
            let metric = MetricField::flat(domain.space());
            let inside = |z: &[f64]| domain.contains(z);
            for _ in 0..count {
                let x = domain.sample_interior(&mut rng);
                let v = random_isotropic(domain.space(), &mut rng);
                let nn = v.euclid_norm();
                let unit: Vec<f64> = v.coords.iter().map(|c| c / nn).collect();
                let a = match f_flat(&domain, &x, &unit) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("closed form failed: {e}")),
                };
                let b = match f_general(&metric, &inside, &x, &unit, 0.02) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("ODE path failed: {e}")),
                };
                max_rel = max_rel.max((a - b).abs() / (1.0 + a.abs()));
            }
        }
        if max_rel >= 1e-8 {
            return (false, format!("flat-chart max relative error {max_rel:.2e}"));
        }
        // Sphere-product path: closed arc formula vs the ambient-metric ODE.
        let cp = vec![1.0, 0.0];
        let cq = vec![1.0, 0.0, 0.0];
        let domain = SphereProductDomain::from_caps(cp.clone(), 0.8, cq.clone(), 0.9);
        let metric = MetricField::sphere_product_ambient(1, 2);
        let inside = |z: &[f64]| domain.contains(&z[..2], &z[2..]);
        let mut max_err = 0.0f64;
        for _ in 0..50 {
            let a_p: f64 = rng.random_range(-0.35..0.35);
            let x_p = vec![a_p.cos(), a_p.sin()];
            let tilt: f64 = rng.random_range(-0.4..0.4);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let x_q = vec![
                tilt.cos(),
                tilt.sin() * phi.cos(),
                tilt.sin() * phi.sin(),
            ];
            let sgn = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let v_p = vec![-sgn * x_p[1], sgn * x_p[0]];
            // Random unit tangent at x_q.
            let mut v_q: Vec<f64>;
            loop {
                let raw: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let d: f64 = raw.iter().zip(&x_q).map(|(a, b)| a * b).sum();
                v_q = raw.iter().zip(&x_q).map(|(r, c)| r - d * c).collect();
                let n: f64 = v_q.iter().map(|c| c * c).sum::<f64>().sqrt();
                if n > 1e-3 {
                    v_q.iter_mut().for_each(|c| *c /= n);
                    break;
                }
            }
            let a = match f_sphere_product(&domain, &x_p, &x_q, &v_p, &v_q) {
                Ok(v) => v,
                Err(e) => return (false, format!("arc formula failed: {e}")),
            };
            let x: Vec<f64> = x_p.iter().chain(&x_q).copied().collect();
            let v: Vec<f64> = v_p.iter().chain(&v_q).copied().collect();
            let b = match f_general(&metric, &inside, &x, &v, 0.005) {
                Ok(v) => v,
                Err(e) => return (false, format!("sphere ODE path failed: {e}")),
            };
            max_err = max_err.max((a - b).abs() / (1.0 + a.abs()));
        }
        (
            max_err < 1e-6,
            format!("flat paths {max_rel:.2e}, sphere paths {max_err:.2e}"),
        )
    })
}

// ---------------------------------------------------------------------------
// 3. Diamond pinch on the (1,1) null-coordinate box.
// ---------------------------------------------------------------------------
fn criterion_3(seed: u64) -> CriterionResult {
    timed(3, "diamond pinch (lower oracle + upper gap)", || {
        let d = null_box();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3333);
        let budget = ChainBudget {
            max_links: 4,
            seeds: 64,
            ..ChainBudget::default()
        };
        let mut max_lower_err = 0.0f64;
        let mut max_upper_ratio = 0.0f64;
        let mut max_sum_slack = 0.0f64;
        for _ in 0..25 {
            let x = d.sample_interior(&mut rng);
            let y = d.sample_interior(&mut rng);
            let oracle = diamond_box_oracle(&x, &y);
            let (lower, _) = lower_bound_for(&d, &x, &y);
            max_lower_err = max_lower_err.max((lower - oracle).abs() / (1.0 + oracle));
            let upper = match delta_upper(&d, &x, &y, &budget) {
                Ok((v, _)) => v,
                Err(e) => return (false, format!("no chain: {e}")),
            };
            if oracle > 1e-12 {
                max_upper_ratio = max_upper_ratio.max(upper / oracle);
            }
            // Sum of the factor distances: the value the alternating-chain
            // infimum attains on the 2-d box.
            let u_d = |z: &[f64]| 2.0 * (z[1] + z[0]).atanh();
            let w_d = |z: &[f64]| 2.0 * (z[1] - z[0]).atanh();
            let chain_sum = (u_d(&x) - u_d(&y)).abs() + (w_d(&x) - w_d(&y)).abs();
            max_sum_slack = max_sum_slack.max((upper - chain_sum) / (1.0 + chain_sum));
        }
        let lower_ok = max_lower_err < 1e-9;
        let upper_ok = max_upper_ratio <= 1.1;
        (
            lower_ok && upper_ok,
            format!(
                "lower-vs-oracle {max_lower_err:.1e} (pass: {lower_ok}); \
                 upper/oracle max {max_upper_ratio:.3} vs 1.10 (pass: {upper_ok}); \
                 upper tracks the factor-distance sum within {max_sum_slack:.1e}"
            ),
        )
    })
}

// ---------------------------------------------------------------------------
// 4. Maximal lightlike geodesics are isometries onto I in the half-space.
// ---------------------------------------------------------------------------
fn criterion_4(seed: u64) -> CriterionResult {
    timed(4, "geodesic bracket pinch on the half-space", || {
        let d = ConcreteDomain::HalfSpaceFuture {
            base: vec![0.0, 0.0, 0.0],
            normal: vec![1.0, 0.0, 0.0],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4444);
        // Maximal null chord through (1, 0.3, 0): tau in (-1, inf).
        let base = [1.0, 0.3, 0.0];
        let dir = [1.0, 1.0, 0.0];
        let budget = ChainBudget {
            seeds: 16,
            ..ChainBudget::default()
        };
        let mut worst_width = 0.0f64;
        for _ in 0..10 {
            let s: f64 = rng.random_range(-0.9..4.0);
            let t: f64 = rng.random_range(-0.9..4.0);
            if (s - t).abs() < 0.05 {
                continue;
            }
            let p: Vec<f64> = base.iter().zip(&dir).map(|(b, v)| b + s * v).collect();
            let q: Vec<f64> = base.iter().zip(&dir).map(|(b, v)| b + t * v).collect();
            // d_I along the chord (one-sided maximal interval at tau = -1).
            let d_i = (((t + 1.0) / (s + 1.0)) as f64).ln().abs();
            let (lower, _) = lower_bound_for(&d, &p, &q);
            let upper = match delta_upper(&d, &p, &q, &budget) {
                Ok((v, _)) => v,
                Err(e) => return (false, format!("no chain: {e}")),
            };
            if !(lower <= d_i + 1e-9 && d_i <= upper + 1e-9) {
                return (
                    false,
                    format!("bracket [{lower}, {upper}] misses d_I = {d_i}"),
                );
            }
            worst_width = worst_width.max((upper - lower) / d_i.max(1e-12));
        }
        (
            worst_width < 0.05,
            format!("bracket contains d_I; worst relative width {worst_width:.2e}"),
        )
    })
}

// ---------------------------------------------------------------------------
// 5. Homogeneity, similarity invariance, domain monotonicity.
// ---------------------------------------------------------------------------
fn criterion_5(seed: u64) -> CriterionResult {
    timed(5, "homogeneity, similarity invariance, monotonicity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
        // F(lambda v) = |lambda| F(v).
        let ball = ball11();
        let mut max_hom = 0.0f64;
        for _ in 0..200 {
            let x = ball.sample_interior(&mut rng);
            let v = random_isotropic(ball.space(), &mut rng);
            let lam: f64 = rng.random_range(0.1..10.0);
            let f1 = f_flat(&ball, &x, &v.coords).unwrap();
            let scaled: Vec<f64> = v.coords.iter().map(|c| lam * c).collect();
            let f2 = f_flat(&ball, &x, &scaled).unwrap();
            max_hom = max_hom.max((f2 - lam * f1).abs() / (1.0 + f2.abs()));
        }
        if max_hom >= 1e-10 {
            return (false, format!("homogeneity violated: {max_hom:.2e}"));
        }
        // delta_upper invariance under domain-preserving similarities.
        let budget = ChainBudget {
            seeds: 12,
            refine_iters: 120,
            ..ChainBudget::default()
        };
        let mut max_dev = 0.0f64;
        for l in [0usize, 1usize] {
            let d = ConcreteDomain::HB { n: 2, l };
            let x = vec![1.0, 0.25, 0.1];
            let y = vec![1.7, -0.3, 0.55];
            let base = match delta_upper(&d, &x, &y, &budget) {
                Ok((v, _)) => v,
                Err(e) => return (false, format!("HB({l}) base pair infeasible: {e}")),
            };
            for k in 0..20 {
                let lam: f64 = rng.random_range(0.4..2.5);
                let phi: f64 = if l == 0 {
                    rng.random_range(0.0..2.0 * PI)
                } else {
                    // Only half-turns of the perp coordinate preserve Omega_1.
                    if k % 2 == 0 {
                        0.0
                    } else {
                        PI
                    }
                };
                let apply = |z: &[f64]| -> Vec<f64> {
                    vec![
                        lam * z[0],
                        lam * (phi.cos() * z[1] - phi.sin() * z[2]),
                        lam * (phi.sin() * z[1] + phi.cos() * z[2]),
                    ]
                };
                let (gx, gy) = (apply(&x), apply(&y));
                let (gx, gy) = if l == 1 && phi != 0.0 {
                    // The perp block of Omega_1 is (t, x1): flip x1 instead.
                    (
                        vec![lam * x[0], -lam * x[1], lam * x[2]],
                        vec![lam * y[0], -lam * y[1], lam * y[2]],
                    )
                } else {
                    (gx, gy)
                };
                let moved = match delta_upper(&d, &gx, &gy, &budget) {
                    Ok((v, _)) => v,
                    Err(e) => return (false, format!("HB({l}) moved pair infeasible: {e}")),
                };
                max_dev = max_dev.max((moved - base).abs() / base);
            }
        }
        if max_dev >= 0.02 {
            return (false, format!("similarity deviation {max_dev:.2e} >= 2%"));
        }
        // Exact monotonicity of F under inclusion of boolean domains.
        let small = ConcreteDomain::Intersection(vec![ball11(), null_box()]);
        let mut mono_ok = true;
        for _ in 0..50 {
            let x = small.sample_interior(&mut rng);
            let v = random_isotropic(small.space(), &mut rng);
            let f_big = f_flat(&ball, &x, &v.coords).unwrap();
            let f_small = f_flat(&small, &x, &v.coords).unwrap();
            mono_ok &= f_big <= f_small + 1e-12;
        }
        (
            mono_ok,
            format!(
                "homogeneity {max_hom:.1e}; similarity deviation {max_dev:.1e}; \
                 inclusion monotonicity {}",
                if mono_ok { "exact" } else { "violated" }
            ),
        )
    })
}

// ---------------------------------------------------------------------------
// 6. HB bi-Lipschitz band.
// ---------------------------------------------------------------------------
fn criterion_6(seed: u64) -> CriterionResult {
    timed(6, "HB bi-Lipschitz band", || {
        let d = ConcreteDomain::HB { n: 2, l: 1 };
        let budget_base = ChainBudget {
            seeds: 16,
            refine_iters: 100,
            ..ChainBudget::default()
        };
        let band = |s: u64| -> Result<f64, String> {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let budget = ChainBudget {
                seed: s,
                ..budget_base.clone()
            };
            let mut min_ratio = f64::INFINITY;
            let mut max_ratio = 0.0f64;
            let mut n_pairs = 0;
            let mut guard = 0;
            while n_pairs < 100 && guard < 4000 {
                guard += 1;
                let x = d.sample_interior(&mut rng);
                let y = d.sample_interior(&mut rng);
                let reference = hb_reference_distance(2, 1, &x, &y).map_err(|e| e.to_string())?;
                if !(0.5..=4.0).contains(&reference) {
                    continue;
                }
                let upper = delta_upper(&d, &x, &y, &budget)
                    .map_err(|e| format!("infeasible pair: {e}"))?
                    .0;
                let ratio = upper / reference;
                min_ratio = min_ratio.min(ratio);
                max_ratio = max_ratio.max(ratio);
                n_pairs += 1;
            }
            if n_pairs < 100 {
                return Err("could not sample 100 well-separated pairs".into());
            }
            Ok(max_ratio.max(1.0 / min_ratio))
        };
        let c_a = match band(seed ^ 0x6666) {
            Ok(c) => c,
            Err(e) => return (false, e),
        };
        let c_b = match band(seed ^ 0x6667) {
            Ok(c) => c,
            Err(e) => return (false, e),
        };
        let stable = (c_a - c_b).abs() <= 0.10 * c_a.max(c_b);
        (
            c_a <= 10.0 && c_b <= 10.0 && stable,
            format!("band constants C = {c_a:.3} / {c_b:.3} (<= 10, stable: {stable})"),
        )
    })
}

// ---------------------------------------------------------------------------
// 7. Non-hyperbolicity of the slit domain.
// ---------------------------------------------------------------------------
fn criterion_7(seed: u64) -> CriterionResult {
    timed(7, "slit-domain degeneracy with TCLI", || {
        let d = ConcreteDomain::Slit;
        if !tcli_check(&d, 128, seed ^ 0x7777) {
            return (false, "tcli_check unexpectedly false".into());
        }
        // Hand-constructed sliding chain between the chart points of
        // (u,w) = (0, ±0.6): a three-link staircase through u = eps.
        let eps = 0.005;
        let uw_pt = |u: f64, w: f64| vec![0.5 * (u - w), 0.5 * (u + w)];
        let mk = |base: Vec<f64>, dir: Vec<f64>, tau: f64| -> Result<ChainLink, String> {
            let span = d.ray_exit(&base, &dir).map_err(|e| e.to_string())?;
            Ok(ChainLink {
                base,
                dir,
                span,
                tau_a: 0.0,
                tau_b: tau,
            })
        };
        let links = (|| -> Result<Vec<ChainLink>, String> {
            Ok(vec![
                mk(uw_pt(0.0, 0.6), vec![1.0, 1.0], eps / 2.0)?,
                mk(uw_pt(eps, 0.6), vec![-1.0, 1.0], -0.6)?,
                mk(uw_pt(eps, -0.6), vec![1.0, 1.0], -eps / 2.0)?,
            ])
        })();
        let cert = match links {
            Ok(links) => match chain_length(&LightlikeChain { links }) {
                Ok(v) => v,
                Err(e) => return (false, format!("certificate chain invalid: {e}")),
            },
            Err(e) => return (false, format!("certificate chain failed: {e}")),
        };
        if cert >= 0.05 {
            return (false, format!("hand certificate {cert:.4} >= 0.05"));
        }
        let x = uw_pt(0.0, 0.6);
        let y = uw_pt(0.0, -0.6);
        let budget = ChainBudget {
            max_links: 4,
            seeds: 32,
            ..ChainBudget {
                seed: seed ^ 0x7778,
                ..ChainBudget::default()
            }
        };
        let upper = match delta_upper(&d, &x, &y, &budget) {
            Ok((v, _)) => v,
            Err(e) => return (false, format!("optimizer found no chain: {e}")),
        };
        (
            upper < 0.05,
            format!("hand certificate {cert:.4}; optimizer upper {upper:.4} (< 0.05)"),
        )
    })
}

// ---------------------------------------------------------------------------
// 8. Hilbert comparison on the ball.
// ---------------------------------------------------------------------------
fn criterion_8(seed: u64) -> CriterionResult {
    timed(8, "Hilbert distance vs delta on the ball", || {
        let d = ball11();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x8888);
        let budget = ChainBudget {
            seeds: 12,
            refine_iters: 120,
            ..ChainBudget::default()
        };
        let mut worst_gap = f64::NEG_INFINITY;
        for _ in 0..50 {
            let x = d.sample_interior(&mut rng);
            let y = d.sample_interior(&mut rng);
            let h = match hilbert_distance(&d, &x, &y) {
                Ok(v) => v,
                Err(e) => return (false, format!("hilbert failed: {e}")),
            };
            let upper = match delta_upper(&d, &x, &y, &budget) {
                Ok((v, _)) => v,
                Err(e) => return (false, format!("no chain: {e}")),
            };
            worst_gap = worst_gap.max(h - upper);
        }
        if worst_gap > 1e-6 {
            return (false, format!("H exceeds upper by {worst_gap:.2e}"));
        }
        // Lightlike-aligned pairs: equality within 1e-4.
        let s = 1.0 / 2f64.sqrt();
        let mut worst_eq = 0.0f64;
        for _ in 0..10 {
            let x = d.sample_interior(&mut rng);
            let sg = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let dir = [sg * s, s];
            let span = d.ray_exit(&x, &dir).unwrap();
            let (a, b) = (span.neg.value_or(-1e9), span.pos.value_or(1e9));
            let tau = rng.random_range(0.15 * a..0.85 * b);
            let y = [x[0] + tau * dir[0], x[1] + tau * dir[1]];
            let h = hilbert_distance(&d, &x, &y).unwrap();
            let upper = delta_upper(&d, &x, &y, &budget).unwrap().0;
            worst_eq = worst_eq.max((h - upper).abs());
        }
        (
            worst_eq < 1e-4,
            format!("H <= upper (gap {worst_gap:.1e}); null-chord equality {worst_eq:.1e}"),
        )
    })
}

// ---------------------------------------------------------------------------
// 9. Convexity verdicts and the quasi-hyperbolic bracket.
// ---------------------------------------------------------------------------
fn criterion_9(tol: &Tolerances, seed: u64) -> CriterionResult {
    timed(9, "convexity verdicts + quasi-hyperbolic bracket", || {
        let _ = tol;
        let s = seed ^ 0x9999;
        let diamond = conformal_convexity_report(&null_box(), 8, 200, s);
        if !matches!(diamond.verdict, ConvexityVerdict::LikelyConformallyConvex) {
            return (false, "diamond not reported conformally convex".into());
        }
        let shell = conformal_convexity_report(&ConcreteDomain::HyperboloidShell, 8, 200, s);
        if !matches!(shell.verdict, ConvexityVerdict::LikelyConformallyConvex) {
            return (false, "shell not reported conformally convex".into());
        }
        let wedge = ConcreteDomain::TwoHalfFutureUnion { n: 1, tilt: 0.5 };
        let wedge_report = conformal_convexity_report(&wedge, 10, 200, s);
        let counterexample = match &wedge_report.verdict {
            ConvexityVerdict::CounterexamplePoint(p) => p.clone(),
            _ => return (false, "wedge union reported convex".into()),
        };
        // Quasi-hyperbolic lower bound stays below the chain upper bound.
        // alpha = 4: the wedge is scale-invariant, so the one-sided null exit
        // distance is at most ~3.2 boundary distances (angle bound between
        // the 45-degree null lines and the boundary slopes), with slack for
        // the graph-path overshoot.
        let alpha = 4.0;
        let budget = ChainBudget {
            seeds: 12,
            refine_iters: 120,
            seed: s,
            ..ChainBudget::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut worst_gap = f64::NEG_INFINITY;
        for _ in 0..20 {
            let x = wedge.sample_interior(&mut rng);
            let y = wedge.sample_interior(&mut rng);
            let q = match quasi_hyperbolic_lower(&wedge, &x, &y, alpha, 60, s) {
                Ok(v) => v,
                Err(e) => return (false, format!("quasi-hyperbolic failed: {e}")),
            };
            let upper = match delta_upper(&wedge, &x, &y, &budget) {
                Ok((v, _)) => v,
                Err(e) => return (false, format!("no chain: {e}")),
            };
            worst_gap = worst_gap.max(q - upper);
        }
        if worst_gap > 1e-9 {
            return (
                false,
                format!("quasi-hyperbolic exceeds upper by {worst_gap:.2e}"),
            );
        }
        // Divergence along a boundary-approach sequence.
        let x0 = [1.0, 0.0];
        let b = [-0.4, 0.8]; // boundary point of {t > -0.5 |x1|}
        let mut prev = -1.0;
        let mut increasing = true;
        let mut last = 0.0;
        for k in 0..5 {
            let lam = 0.3 * 0.25f64.powi(k);
            let y = [b[0] + lam * (x0[0] - b[0]), b[1] + lam * (x0[1] - b[1])];
            let q = match quasi_hyperbolic_lower(&wedge, &x0, &y, alpha, 60, s) {
                Ok(v) => v,
                Err(e) => return (false, format!("sequence point failed: {e}")),
            };
            increasing &= q > prev;
            prev = q;
            last = q;
        }
        (
            increasing,
            format!(
                "verdicts ok (wedge counterexample near {counterexample:?}); \
                 quasi <= upper (gap {worst_gap:.1e}); boundary sequence rises to {last:.2}"
            ),
        )
    })
}

// ---------------------------------------------------------------------------
// 10. Brody reparametrization postconditions.
// ---------------------------------------------------------------------------
fn criterion_10(seed: u64) -> CriterionResult {
    timed(10, "Brody reparametrization bounds", || {
        let d = ball11();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xaaaa);
        let norm = |_x: &[f64], v: &[f64]| -> f64 {
            v.iter().map(|c| c * c).sum::<f64>().sqrt()
        };
        let mut worst0 = 0.0f64;
        let mut worst_bound = 0.0f64;
        for _ in 0..20 {
            let x = d.sample_interior(&mut rng);
            let s = 1.0 / 2f64.sqrt();
            let sg = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let v = [sg * s, s];
            let ppl = match maximal_ppl_flat(&d, &x, &v) {
                Ok(p) => p,
                Err(e) => return (false, format!("chord failed: {e}")),
            };
            let speed0 = norm(&x, &ppl.deriv(0.0).unwrap());
            let c = rng.random_range(0.3..0.9) * speed0;
            let (h, _samples) = match brody_reparametrize(&ppl, c, &norm) {
                Ok(r) => r,
                Err(e) => return (false, format!("reparametrization failed: {e}")),
            };
            let a0 = norm(&[0.0; 2], &ppl.deriv_composed(&h, 0.0).unwrap());
            worst0 = worst0.max((a0 - c).abs() / c);
            for i in 0..101 {
                let t = -0.99 + 1.98 * i as f64 / 100.0;
                let at = norm(&[0.0; 2], &ppl.deriv_composed(&h, t).unwrap());
                let bound = c / (1.0 - t * t) * (1.0 + 1e-6);
                worst_bound = worst_bound.max(at / bound);
            }
        }
        (
            worst0 < 1e-8 && worst_bound <= 1.0,
            format!(
                "|alpha'(0)| error {worst0:.1e}; sup |alpha'(t)| / bound = {worst_bound:.6}"
            ),
        )
    })
}
