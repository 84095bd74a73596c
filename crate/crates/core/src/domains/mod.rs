//! Domains of flat charts: membership predicates and lightlike ray-exit
//! queries, a library of concrete domains, and an approximate
//! conformal-convexity checker (see [`convexity`]).
//!
//! `ray_exit` returns the endpoints of the maximal segment
//! `{x + tau v : tau in (tau_minus, tau_plus)}` inside the domain; unbounded
//! ends carry an explicit [`Exit::Infinite`] marker (never a large float), so
//! downstream functional computations can drop the corresponding reciprocal
//! term exactly.  For boolean unions the in-domain parameter set along a ray
//! may be disconnected; the solver returns the connected component of 0.

pub mod convexity;

use crate::bilinear::QuadraticSpace;
use crate::{Error, Result};
use rand::Rng;

/// Relative tolerance of ray-exit bisection.
pub const RAY_EXIT_REL_TOL: f64 = 1e-10;
/// Bracket-doubling horizon beyond which an exit is declared unbounded.
pub const RAY_HORIZON: f64 = 1e6;
/// Numerical noise floor for coefficient tests in closed-form exits.
const COEFF_TOL: f64 = 1e-13;

/// One end of a maximal in-domain segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exit {
    Finite(f64),
    Infinite,
}

impl Exit {
    pub fn finite(self) -> Option<f64> {
        match self {
            Exit::Finite(t) => Some(t),
            Exit::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exit::Infinite)
    }

    /// The parameter value, with unbounded ends mapped to `inf_value`.
    pub fn value_or(self, inf_value: f64) -> f64 {
        match self {
            Exit::Finite(t) => t,
            Exit::Infinite => inf_value,
        }
    }
}

/// The maximal parameter interval `(neg, pos)` around 0 with the ray inside
/// the domain; `neg` is negative (or unbounded below), `pos` positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySpan {
    pub neg: Exit,
    pub pos: Exit,
}

impl RaySpan {
    pub const FULL: RaySpan = RaySpan {
        neg: Exit::Infinite,
        pos: Exit::Infinite,
    };

    /// Intersection of two spans (both containing 0).
    pub fn meet(self, other: RaySpan) -> RaySpan {
        let neg = match (self.neg, other.neg) {
            (Exit::Infinite, e) | (e, Exit::Infinite) => e,
            (Exit::Finite(a), Exit::Finite(b)) => Exit::Finite(a.max(b)),
        };
        let pos = match (self.pos, other.pos) {
            (Exit::Infinite, e) | (e, Exit::Infinite) => e,
            (Exit::Finite(a), Exit::Finite(b)) => Exit::Finite(a.min(b)),
        };
        RaySpan { neg, pos }
    }
}

/// Component of `{tau : linear(tau) = c0 + c1 tau > 0}` containing 0
/// (requires `c0 > 0` up to noise).
fn linear_component(c0: f64, c1: f64, scale: f64) -> RaySpan {
    if c1.abs() <= COEFF_TOL * scale {
        return RaySpan::FULL;
    }
    let root = -c0 / c1;
    if c1 > 0.0 {
        RaySpan {
            neg: Exit::Finite(root),
            pos: Exit::Infinite,
        }
    } else {
        RaySpan {
            neg: Exit::Infinite,
            pos: Exit::Finite(root),
        }
    }
}

/// Component of `{tau : a tau^2 + b tau + c > 0}` containing 0
/// (requires `c > 0` up to noise).
fn quad_component(a: f64, b: f64, c: f64, scale: f64) -> RaySpan {
    if a.abs() <= COEFF_TOL * scale {
        return linear_component(c, b, scale);
    }
    let disc = b * b - 4.0 * a * c;
    if a > 0.0 {
        if disc <= 0.0 {
            return RaySpan::FULL;
        }
        let sq = disc.sqrt();
        let r1 = (-b - sq) / (2.0 * a);
        let r2 = (-b + sq) / (2.0 * a);
        // c > 0 => the roots share a sign; the positive-set component of 0 is
        // one-sided.
        if r1 > 0.0 {
            RaySpan {
                neg: Exit::Infinite,
                pos: Exit::Finite(r1),
            }
        } else {
            RaySpan {
                neg: Exit::Finite(r2),
                pos: Exit::Infinite,
            }
        }
    } else {
        // Downward parabola positive at 0: both roots exist and straddle 0.
        let sq = disc.max(0.0).sqrt();
        let r1 = (-b + sq) / (2.0 * a); // negative root (division flips order)
        let r2 = (-b - sq) / (2.0 * a);
        RaySpan {
            neg: Exit::Finite(r1.min(r2)),
            pos: Exit::Finite(r1.max(r2)),
        }
    }
}

/// A concrete domain of a flat chart `R^{p,q}` (time coordinates first).
#[derive(Debug, Clone)]
pub enum ConcreteDomain {
    /// Future `I^+(H)` of the spacelike hyperplane through `base` with
    /// future-pointing timelike normal `normal` in `R^{1,n}`.
    HalfSpaceFuture { base: Vec<f64>, normal: Vec<f64> },
    /// Chronal diamond `I(a, b) = I^+(a) ∩ I^-(b)` in `R^{1,n}`.
    Diamond { a: Vec<f64>, b: Vec<f64> },
    /// `{ v : sqrt(-b(v_p,v_p)) + sqrt(b(v_q,v_q)) < radius }` in `R^{p,q}`.
    PQBall {
        p: usize,
        q: usize,
        radius: f64,
    },
    /// `Omega_l = I^+(F_l)` for the spacelike l-plane spanned by the last `l`
    /// spatial coordinates of `R^{1,n}`: `{ t > |x_perp| }`.
    HB { n: usize, l: usize },
    /// `R^{1,n}` minus the causal past of `apex` for the widened cone metric
    /// `b_eps = -(1+eps)^2 dt^2 + dx^2`.
    EpsConeComplement {
        n: usize,
        eps: f64,
        apex: Vec<f64>,
    },
    /// The 2-d slit example in null coordinates `u = s+t`, `w = s-t`:
    /// `(max(|u|,|w|) < 1) ∪ (|uw| < 1 and u > 0)`.
    Slit,
    /// Union of the futures of two transverse spacelike hyperplanes of
    /// `R^{1,n}`, with normals `(1, ±tilt, 0, ...)`.
    TwoHalfFutureUnion { n: usize, tilt: f64 },
    /// Round Euclidean ball in `R^{1,1}`.
    EuclideanBall { center: Vec<f64>, radius: f64 },
    /// The `R^{1,2}` shell `{0 < t < 1, 0 < -t^2 + x^2 + y^2 < 1}`.
    HyperboloidShell,
    /// All of `R^{p,q}`.
    FullSpace { p: usize, q: usize },
    /// Finite boolean combinations.
    Union(Vec<ConcreteDomain>),
    Intersection(Vec<ConcreteDomain>),
}

impl ConcreteDomain {
    /// The ambient quadratic space of the chart.
    pub fn space(&self) -> QuadraticSpace {
        use ConcreteDomain::*;
        match self {
            HalfSpaceFuture { base, .. } => QuadraticSpace::new(1, base.len() - 1).unwrap(),
            Diamond { a, .. } => QuadraticSpace::new(1, a.len() - 1).unwrap(),
            PQBall { p, q, .. } => QuadraticSpace::new(*p, *q).unwrap(),
            HB { n, .. } => QuadraticSpace::new(1, *n).unwrap(),
            EpsConeComplement { n, .. } => QuadraticSpace::new(1, *n).unwrap(),
            Slit => QuadraticSpace::new(1, 1).unwrap(),
            TwoHalfFutureUnion { n, .. } => QuadraticSpace::new(1, *n).unwrap(),
            EuclideanBall { center, .. } => {
                QuadraticSpace::new(1, center.len() - 1).unwrap()
            }
            HyperboloidShell => QuadraticSpace::new(1, 2).unwrap(),
            FullSpace { p, q } => QuadraticSpace::new(*p, *q).unwrap(),
            Union(children) | Intersection(children) => children[0].space(),
        }
    }

    pub fn dim(&self) -> usize {
        self.space().dim()
    }

    /// Membership predicate (open domain).
    pub fn contains(&self, x: &[f64]) -> bool {
        use ConcreteDomain::*;
        match self {
            HalfSpaceFuture { base, normal } => {
                let s = self.space();
                let d: Vec<f64> = x.iter().zip(base).map(|(a, b)| a - b).collect();
                s.beta(&d, normal) < 0.0
            }
            Diamond { a, b } => {
                let s = self.space();
                let da: Vec<f64> = x.iter().zip(a).map(|(x, a)| x - a).collect();
                let db: Vec<f64> = b.iter().zip(x).map(|(b, x)| b - x).collect();
                s.quad(&da) < 0.0 && da[0] > 0.0 && s.quad(&db) < 0.0 && db[0] > 0.0
            }
            PQBall { p, radius, .. } => pq_norm(x, *p) < *radius,
            HB { n, l } => {
                let m = n - l;
                let r: f64 = x[1..=m].iter().map(|c| c * c).sum::<f64>().sqrt();
                x[0] > r
            }
            EpsConeComplement { eps, apex, .. } => {
                let dt = x[0] - apex[0];
                let r: f64 = x[1..]
                    .iter()
                    .zip(&apex[1..])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (1.0 + eps) * dt + r > 0.0
            }
            Slit => {
                let (u, w) = (x[1] + x[0], x[1] - x[0]);
                (u.abs().max(w.abs()) < 1.0) || ((u * w).abs() < 1.0 && u > 0.0)
            }
            TwoHalfFutureUnion { tilt, .. } => {
                x[0] + tilt * x[1] > 0.0 || x[0] - tilt * x[1] > 0.0
            }
            EuclideanBall { center, radius } => {
                let r2: f64 = x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum();
                r2 < radius * radius
            }
            HyperboloidShell => {
                let q = -x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                x[0] > 0.0 && x[0] < 1.0 && q > 0.0 && q < 1.0
            }
            FullSpace { .. } => true,
            Union(children) => children.iter().any(|c| c.contains(x)),
            Intersection(children) => children.iter().all(|c| c.contains(x)),
        }
    }

    /// A canonical interior base point.
    pub fn interior_point(&self) -> Vec<f64> {
        use ConcreteDomain::*;
        match self {
            HalfSpaceFuture { base, normal } => {
                // Step from `base` against the Lorentz pairing: base + normal
                // is in the future (normal is future-pointing timelike).
                base.iter().zip(normal).map(|(b, u)| b + u).collect()
            }
            Diamond { a, b } => a.iter().zip(b).map(|(a, b)| 0.5 * (a + b)).collect(),
            PQBall { p, q, .. } => vec![0.0; p + q],
            HB { n, .. } => {
                let mut x = vec![0.0; n + 1];
                x[0] = 1.0;
                x
            }
            EpsConeComplement { n, apex, .. } => {
                let mut x = apex.clone();
                x[0] += 1.0;
                x.resize(n + 1, 0.0);
                x
            }
            Slit => vec![0.0, 0.0],
            TwoHalfFutureUnion { n, .. } => {
                let mut x = vec![0.0; n + 1];
                x[0] = 1.0;
                x
            }
            EuclideanBall { center, .. } => center.clone(),
            HyperboloidShell => vec![0.5, 0.8, 0.0],
            FullSpace { p, q } => vec![0.0; p + q],
            Union(children) => children[0].interior_point(),
            Intersection(children) => {
                // Try children's base points; fall back to the first.
                for c in children {
                    let x = c.interior_point();
                    if self.contains(&x) {
                        return x;
                    }
                }
                children[0].interior_point()
            }
        }
    }

    /// Axis-aligned sampling box `(center, halfwidths)` covering a useful
    /// chunk of the domain (for rejection sampling; not a bounding box for
    /// unbounded domains).
    pub fn sample_box(&self) -> (Vec<f64>, Vec<f64>) {
        use ConcreteDomain::*;
        match self {
            Diamond { a, b } => {
                let c: Vec<f64> = a.iter().zip(b).map(|(a, b)| 0.5 * (a + b)).collect();
                let h: Vec<f64> = a
                    .iter()
                    .zip(b)
                    .map(|(a, b)| 0.5 * (b - a).abs().max(1e-3) * 1.2)
                    .collect();
                (c, h)
            }
            PQBall { p, q, radius } => {
                (vec![0.0; p + q], vec![*radius; p + q])
            }
            EuclideanBall { center, radius } => {
                (center.clone(), vec![*radius; center.len()])
            }
            Slit => (vec![0.0, 0.5], vec![1.2, 1.7]),
            HyperboloidShell => (vec![0.5, 0.0, 0.0], vec![0.5, 1.5, 1.5]),
            _ => {
                let c = self.interior_point();
                let h = vec![2.0; c.len()];
                (c, h)
            }
        }
    }

    /// Rejection-sample an interior point.
    pub fn sample_interior<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let (c, h) = self.sample_box();
        for _ in 0..20_000 {
            let x: Vec<f64> = c
                .iter()
                .zip(&h)
                .map(|(c, h)| c + rng.random_range(-1.0..1.0) * h)
                .collect();
            if self.contains(&x) {
                return x;
            }
        }
        self.interior_point()
    }

    /// Closed-form ray span, when the variant admits one for this direction.
    fn closed_form_span(&self, x: &[f64], v: &[f64]) -> Option<RaySpan> {
        use ConcreteDomain::*;
        let s = self.space();
        let vnorm2: f64 = v.iter().map(|c| c * c).sum();
        let null = s.quad(v).abs() <= 1e-10 * vnorm2;
        match self {
            HalfSpaceFuture { base, normal } => {
                // -b(x - base + tau v, u) > 0 is linear in tau.
                let d: Vec<f64> = x.iter().zip(base).map(|(a, b)| a - b).collect();
                Some(linear_component(
                    -s.beta(&d, normal),
                    -s.beta(v, normal),
                    vnorm2.sqrt(),
                ))
            }
            Diamond { a, b } if null => {
                let da: Vec<f64> = x.iter().zip(a).map(|(x, a)| x - a).collect();
                let db: Vec<f64> = x.iter().zip(b).map(|(x, b)| x - b).collect();
                let scale = vnorm2.sqrt() * (1.0 + da.iter().map(|c| c.abs()).sum::<f64>());
                // v null kills the quadratic terms: all four chronology
                // constraints are linear in tau.
                let span = linear_component(-s.quad(&da), -2.0 * s.beta(&da, v), scale)
                    .meet(linear_component(da[0], v[0], scale))
                    .meet(linear_component(-s.quad(&db), -2.0 * s.beta(&db, v), scale))
                    .meet(linear_component(-db[0], -v[0], scale));
                Some(span)
            }
            HB { n, l } => {
                let m = n - l;
                // (t + tau v_t)^2 - |x~ + tau v~|^2 > 0 with t + tau v_t > 0.
                let c = x[0] * x[0] - x[1..=m].iter().map(|c| c * c).sum::<f64>();
                let b1 = 2.0
                    * (x[0] * v[0]
                        - x[1..=m]
                            .iter()
                            .zip(&v[1..=m])
                            .map(|(a, b)| a * b)
                            .sum::<f64>());
                let a2 = v[0] * v[0] - v[1..=m].iter().map(|c| c * c).sum::<f64>();
                Some(
                    quad_component(a2, b1, c, vnorm2)
                        .meet(linear_component(x[0], v[0], vnorm2.sqrt())),
                )
            }
            EpsConeComplement { eps, apex, .. } => {
                Some(eps_cone_span(x, v, *eps, apex))
            }
            EuclideanBall { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let c = radius * radius - d.iter().map(|c| c * c).sum::<f64>();
                let b1 = -2.0 * d.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
                let a2 = -vnorm2;
                Some(quad_component(a2, b1, c, vnorm2))
            }
            HyperboloidShell if null => {
                // q(x + tau v) is linear in tau for null v.
                let q0 = -x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
                let bq = 2.0 * (-x[0] * v[0] + x[1] * v[1] + x[2] * v[2]);
                let scale = vnorm2.sqrt();
                Some(
                    linear_component(q0, bq, scale)
                        .meet(linear_component(1.0 - q0, -bq, scale))
                        .meet(linear_component(x[0], v[0], scale))
                        .meet(linear_component(1.0 - x[0], -v[0], scale)),
                )
            }
            Slit if null => Some(slit_null_span(x, v)),
            TwoHalfFutureUnion { tilt, .. } => {
                let f1 = (x[0] + tilt * x[1], v[0] + tilt * v[1]);
                let f2 = (x[0] - tilt * x[1], v[0] - tilt * v[1]);
                Some(union_of_halflines(f1, f2, vnorm2.sqrt()))
            }
            FullSpace { .. } => Some(RaySpan::FULL),
            _ => None,
        }
    }

    /// Maximal in-domain parameter interval around 0 along `x + tau v`
    /// (connected component of 0 for non-convex/boolean domains).
    pub fn ray_exit(&self, x: &[f64], v: &[f64]) -> Result<RaySpan> {
        if x.len() != self.dim() || v.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "domain dimension {}, point/direction {}/{}",
                self.dim(),
                x.len(),
                v.len()
            )));
        }
        if !self.contains(x) {
            return Err(Error::OutsideDomain(format!("{x:?}")));
        }
        if let Some(span) = self.closed_form_span(x, v) {
            return Ok(span);
        }
        Ok(self.ray_exit_bisect(x, v))
    }

    /// Bracketing + bisection fallback (also used to cross-check closed
    /// forms).  Assumes `x` is inside.
    pub fn ray_exit_bisect(&self, x: &[f64], v: &[f64]) -> RaySpan {
        let probe = |tau: f64| -> bool {
            let p: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + tau * b).collect();
            self.contains(&p)
        };
        let one_side = |sign: f64| -> Exit {
            let mut inside = 0.0;
            let mut h = 1e-3;
            loop {
                let tau = sign * h;
                if !probe(tau) {
                    let root = crate::opt::bisect(
                        |t| if probe(t) { -1.0 } else { 1.0 },
                        inside,
                        tau,
                        RAY_EXIT_REL_TOL,
                    );
                    return Exit::Finite(root);
                }
                inside = tau;
                h *= 2.0;
                if h > RAY_HORIZON {
                    return Exit::Infinite;
                }
            }
        };
        RaySpan {
            neg: one_side(-1.0),
            pos: one_side(1.0),
        }
    }
}

/// A domain of the double cover `S^p x S^q`, given by a membership callback
/// on ambient unit-vector pairs `(x_p in R^{p+1}, x_q in R^{q+1})`.
#[derive(Clone)]
pub struct SphereProductDomain {
    pub p: usize,
    pub q: usize,
    pub member: std::sync::Arc<dyn Fn(&[f64], &[f64]) -> bool + Send + Sync>,
}

impl std::fmt::Debug for SphereProductDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SphereProductDomain(p={}, q={})", self.p, self.q)
    }
}

/// Maximal in-domain arc interval of a product great-circle flow.
#[derive(Debug, Clone, Copy)]
pub struct SphereArcExit {
    pub s_minus: f64,
    pub s_plus: f64,
    /// The flow stayed inside over a full per-factor arc of length >= pi.
    pub full: bool,
}

impl SphereProductDomain {
    /// Product of geodesic caps `d(x_p, c_p) < r_p`, `d(x_q, c_q) < r_q`.
    pub fn from_caps(c_p: Vec<f64>, r_p: f64, c_q: Vec<f64>, r_q: f64) -> Self {
        let p = c_p.len() - 1;
        let q = c_q.len() - 1;
        let dist = |x: &[f64], c: &[f64]| -> f64 {
            let dot: f64 = x.iter().zip(c).map(|(a, b)| a * b).sum();
            dot.clamp(-1.0, 1.0).acos()
        };
        SphereProductDomain {
            p,
            q,
            member: std::sync::Arc::new(move |xp: &[f64], xq: &[f64]| {
                dist(xp, &c_p) < r_p && dist(xq, &c_q) < r_q
            }),
        }
    }

    pub fn contains(&self, x_p: &[f64], x_q: &[f64]) -> bool {
        (self.member)(x_p, x_q)
    }

    /// Exit arcs of the flow `s -> (x_p cos s + w_p sin s, x_q cos s + w_q
    /// sin s)` (per-factor unit-speed tangents `w`), searched over one full
    /// period.  `full` is set when the in-domain arc reaches length pi.
    pub fn arc_exit(&self, x_p: &[f64], w_p: &[f64], x_q: &[f64], w_q: &[f64]) -> SphereArcExit {
        let flow_inside = |s: f64| -> bool {
            let (c, sn) = (s.cos(), s.sin());
            let yp: Vec<f64> = x_p.iter().zip(w_p).map(|(x, w)| x * c + w * sn).collect();
            let yq: Vec<f64> = x_q.iter().zip(w_q).map(|(x, w)| x * c + w * sn).collect();
            self.contains(&yp, &yq)
        };
        let one_side = |sign: f64| -> Option<f64> {
            let mut prev = 0.0;
            let mut s = 0.01;
            while s <= std::f64::consts::PI + 0.02 {
                if !flow_inside(sign * s) {
                    let root = crate::opt::bisect(
                        |t| if flow_inside(sign * t) { -1.0 } else { 1.0 },
                        prev,
                        s,
                        RAY_EXIT_REL_TOL,
                    );
                    return Some(sign * root);
                }
                prev = s;
                s += 0.01;
            }
            None
        };
        match (one_side(-1.0), one_side(1.0)) {
            (Some(a), Some(b)) if b - a < std::f64::consts::PI => SphereArcExit {
                s_minus: a,
                s_plus: b,
                full: false,
            },
            (a, b) => SphereArcExit {
                s_minus: a.unwrap_or(-std::f64::consts::PI),
                s_plus: b.unwrap_or(std::f64::consts::PI),
                full: true,
            },
        }
    }
}

/// `sqrt(-b(v_p,v_p)) + sqrt(b(v_q,v_q))` with the first `p` coordinates
/// negative.
pub fn pq_norm(v: &[f64], p: usize) -> f64 {
    let np: f64 = v[..p].iter().map(|c| c * c).sum::<f64>().sqrt();
    let nq: f64 = v[p..].iter().map(|c| c * c).sum::<f64>().sqrt();
    np + nq
}

/// Component of 0 of `{(1+eps)(dt + tau v_t) + |dx + tau vx| > 0}`
/// (complement of the widened past cone).
fn eps_cone_span(x: &[f64], v: &[f64], eps: f64, apex: &[f64]) -> RaySpan {
    let k = 1.0 + eps;
    let dt = x[0] - apex[0];
    let dx: Vec<f64> = x[1..]
        .iter()
        .zip(&apex[1..])
        .map(|(a, b)| a - b)
        .collect();
    // Crossings satisfy k^2 (dt + tau v_t)^2 = |dx + tau vx|^2 with the
    // linear part (dt + tau v_t) <= 0.
    let a2 = k * k * v[0] * v[0] - v[1..].iter().map(|c| c * c).sum::<f64>();
    let b1 = 2.0
        * (k * k * dt * v[0]
            - dx.iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>());
    let c0 = k * k * dt * dt - dx.iter().map(|c| c * c).sum::<f64>();
    let mut roots: Vec<f64> = Vec::new();
    if a2.abs() > COEFF_TOL {
        let disc = b1 * b1 - 4.0 * a2 * c0;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            roots.push((-b1 - sq) / (2.0 * a2));
            roots.push((-b1 + sq) / (2.0 * a2));
        }
    } else if b1.abs() > COEFF_TOL {
        roots.push(-c0 / b1);
    }
    roots.retain(|&t| dt + t * v[0] <= 1e-12 * (1.0 + dt.abs()));
    let neg = roots
        .iter()
        .filter(|&&t| t < 0.0)
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let pos = roots
        .iter()
        .filter(|&&t| t > 0.0)
        .cloned()
        .fold(f64::INFINITY, f64::min);
    RaySpan {
        neg: if neg.is_finite() {
            Exit::Finite(neg)
        } else {
            Exit::Infinite
        },
        pos: if pos.is_finite() {
            Exit::Finite(pos)
        } else {
            Exit::Infinite
        },
    }
}

/// Component of 0 of the union of two half-lines `{f_i(tau) > 0}` given the
/// linear data `(f_i(0), f_i')`.
fn union_of_halflines(f1: (f64, f64), f2: (f64, f64), scale: f64) -> RaySpan {
    let s1 = if f1.0 > 0.0 {
        Some(linear_component(f1.0, f1.1, scale))
    } else {
        None
    };
    let s2 = if f2.0 > 0.0 {
        Some(linear_component(f2.0, f2.1, scale))
    } else {
        None
    };
    // A half-line not containing 0 can still extend the component when its
    // in-set overlaps the component of the other: the union's component of 0
    // is then the envelope.
    let other_interval = |f: (f64, f64)| -> Option<(f64, f64)> {
        if f.1.abs() <= COEFF_TOL * scale {
            return None; // constant nonpositive: empty in-set
        }
        let root = -f.0 / f.1;
        if f.1 > 0.0 {
            Some((root, f64::INFINITY))
        } else {
            Some((f64::NEG_INFINITY, root))
        }
    };
    let extend = |span: RaySpan, f: (f64, f64)| -> RaySpan {
        let Some((lo, hi)) = other_interval(f) else {
            return span;
        };
        let mut out = span;
        // Overlap below: the other interval reaches past the component's
        // negative end and extends it downward.
        if let Exit::Finite(a) = out.neg {
            if hi > a {
                out.neg = if lo.is_finite() {
                    Exit::Finite(lo.min(a))
                } else {
                    Exit::Infinite
                };
            }
        }
        if let Exit::Finite(b) = out.pos {
            if lo < b {
                out.pos = if hi.is_finite() {
                    Exit::Finite(hi.max(b))
                } else {
                    Exit::Infinite
                };
            }
        }
        out
    };
    match (s1, s2) {
        (Some(a), None) => extend(a, f2),
        (None, Some(b)) => extend(b, f1),
        (Some(a), Some(b)) => {
            // Both half-lines contain 0; their union's component of 0 merges
            // overlapping intervals.  Each span here is one-sided or full, so
            // the union component is simply the envelope.
            let neg = match (a.neg, b.neg) {
                (Exit::Infinite, _) | (_, Exit::Infinite) => Exit::Infinite,
                (Exit::Finite(x), Exit::Finite(y)) => Exit::Finite(x.min(y)),
            };
            let pos = match (a.pos, b.pos) {
                (Exit::Infinite, _) | (_, Exit::Infinite) => Exit::Infinite,
                (Exit::Finite(x), Exit::Finite(y)) => Exit::Finite(x.max(y)),
            };
            RaySpan { neg, pos }
        }
        (None, None) => RaySpan {
            // Base point outside both; callers guard with `contains`.
            neg: Exit::Finite(0.0),
            pos: Exit::Finite(0.0),
        },
    }
}

/// Closed-form null-ray span of the slit domain.  In null coordinates
/// `u = s + t`, `w = s - t` a null direction moves exactly one of `u`, `w`.
fn slit_null_span(x: &[f64], v: &[f64]) -> RaySpan {
    let (u0, w0) = (x[1] + x[0], x[1] - x[0]);
    let (du, dw) = (v[1] + v[0], v[1] - v[0]);
    let to_span = |z0: f64, dz: f64, lo: f64, hi: f64| -> RaySpan {
        // In-set in the moving coordinate is (lo, hi); convert to tau.
        let t1 = if lo.is_finite() {
            Exit::Finite((lo - z0) / dz)
        } else {
            Exit::Infinite
        };
        let t2 = if hi.is_finite() {
            Exit::Finite((hi - z0) / dz)
        } else {
            Exit::Infinite
        };
        if dz > 0.0 {
            RaySpan { neg: t1, pos: t2 }
        } else {
            RaySpan { neg: t2, pos: t1 }
        }
    };
    if du.abs() > dw.abs() {
        // w frozen at w0; u-interval of the section.
        let (lo, hi) = if w0.abs() < 1e-12 {
            (-1.0, f64::INFINITY)
        } else if w0.abs() < 1.0 {
            (-1.0, 1.0 / w0.abs())
        } else {
            (0.0, 1.0 / w0.abs())
        };
        to_span(u0, du, lo, hi)
    } else {
        // u frozen at u0; w-interval of the section.
        let (lo, hi) = if u0 <= 1e-12 {
            (-1.0, 1.0)
        } else {
            // Box section (-1,1) when |u0| < 1 is contained in the flare
            // section (-1/u0, 1/u0); for u0 >= 1 only the flare remains.
            let m = 1.0 / u0;
            (-m, m)
        };
        to_span(w0, dw, lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::random_isotropic;
    use rand::SeedableRng;

    fn assert_exit_close(e: Exit, expected: Exit, tol: f64) {
        match (e, expected) {
            (Exit::Finite(a), Exit::Finite(b)) => {
                assert!(
                    (a - b).abs() <= tol * (1.0 + b.abs()),
                    "exit {a} vs expected {b}"
                )
            }
            (Exit::Infinite, Exit::Infinite) => {}
            other => panic!("exit kind mismatch: {other:?}"),
        }
    }

    #[test]
    fn euclidean_ball_center_chord() {
        let d = ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let s = 1.0 / 2f64.sqrt();
        let span = d.ray_exit(&[0.0, 0.0], &[s, s]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-1.0), 1e-12);
        assert_exit_close(span.pos, Exit::Finite(1.0), 1e-12);
    }

    #[test]
    fn half_space_future_linear_crossing() {
        // {t > 0} in R^{1,2}: base (1,0,0), v = (1,1,0) exits at tau = -1.
        let d = ConcreteDomain::HalfSpaceFuture {
            base: vec![0.0, 0.0, 0.0],
            normal: vec![1.0, 0.0, 0.0],
        };
        let span = d.ray_exit(&[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-1.0), 1e-12);
        assert!(span.pos.is_infinite());
    }

    #[test]
    fn hb_future_of_origin() {
        // HB(0) = I^+(0) in R^{1,2}: x = (2,0,0), v = (1,1,0) -> (-1, inf).
        let d = ConcreteDomain::HB { n: 2, l: 0 };
        let span = d.ray_exit(&[2.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-1.0), 1e-12);
        assert!(span.pos.is_infinite());
    }

    #[test]
    fn outside_point_is_rejected() {
        let d = ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert!(d.ray_exit(&[3.0, 0.0], &[1.0, 1.0]).is_err());
    }

    fn null_dir<R: rand::Rng>(d: &ConcreteDomain, rng: &mut R) -> Vec<f64> {
        random_isotropic(d.space(), rng).coords
    }

    fn roster() -> Vec<ConcreteDomain> {
        use ConcreteDomain::*;
        vec![
            HalfSpaceFuture {
                base: vec![0.0, 0.0, 0.0],
                normal: vec![1.0, 0.2, 0.0],
            },
            Diamond {
                a: vec![-1.0, 0.0, 0.0],
                b: vec![1.0, 0.0, 0.0],
            },
            PQBall {
                p: 1,
                q: 2,
                radius: 1.0,
            },
            HB { n: 2, l: 1 },
            EpsConeComplement {
                n: 2,
                eps: 0.3,
                apex: vec![0.0, 0.0, 0.0],
            },
            Slit,
            TwoHalfFutureUnion { n: 2, tilt: 0.5 },
            EuclideanBall {
                center: vec![0.1, -0.2],
                radius: 0.8,
            },
            HyperboloidShell,
        ]
    }

    #[test]
    fn closed_form_matches_bisection() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for d in roster() {
            for _ in 0..120 {
                let x = d.sample_interior(&mut rng);
                let v = null_dir(&d, &mut rng);
                let span = d.ray_exit(&x, &v).unwrap();
                let bis = d.ray_exit_bisect(&x, &v);
                let ok = |a: Exit, b: Exit| match (a, b) {
                    (Exit::Finite(a), Exit::Finite(b)) => {
                        (a - b).abs() <= 1e-9 * (1.0 + b.abs())
                    }
                    (Exit::Infinite, Exit::Infinite) => true,
                    _ => false,
                };
                assert!(
                    ok(span.neg, bis.neg) && ok(span.pos, bis.pos),
                    "domain {d:?} x {x:?} v {v:?}: closed {span:?} vs bisect {bis:?}"
                );
            }
        }
    }

    #[test]
    fn segment_interiority_and_boundary_flip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for d in roster() {
            for _ in 0..40 {
                let x = d.sample_interior(&mut rng);
                let v = null_dir(&d, &mut rng);
                let span = d.ray_exit(&x, &v).unwrap();
                let lo = span.neg.value_or(-10.0);
                let hi = span.pos.value_or(10.0);
                assert!(lo < 0.0 && hi > 0.0);
                for k in 1..50 {
                    let tau = lo + (hi - lo) * k as f64 / 50.0;
                    let p: Vec<f64> =
                        x.iter().zip(&v).map(|(a, b)| a + tau * b).collect();
                    assert!(d.contains(&p), "interior sample left the domain");
                }
                // Finite endpoints sit on the boundary: membership flips
                // within a small parameter nudge.
                for e in [span.neg, span.pos] {
                    if let Exit::Finite(t) = e {
                        let eps = 1e-7 * (1.0 + t.abs());
                        let inside: Vec<f64> = x
                            .iter()
                            .zip(&v)
                            .map(|(a, b)| a + (t - t.signum() * eps) * b)
                            .collect();
                        let outside: Vec<f64> = x
                            .iter()
                            .zip(&v)
                            .map(|(a, b)| a + (t + t.signum() * eps) * b)
                            .collect();
                        assert!(d.contains(&inside));
                        assert!(!d.contains(&outside));
                    }
                }
            }
        }
    }

    #[test]
    fn boolean_nesting_monotonicity() {
        // Omega = ball(0.5) subset Omega' = ball(0.5) ∪ ball(1.0): spans nest.
        let small = ConcreteDomain::EuclideanBall {
            center: vec![0.0, 0.0],
            radius: 0.5,
        };
        let big = ConcreteDomain::Union(vec![
            small.clone(),
            ConcreteDomain::EuclideanBall {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
        ]);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let x = small.sample_interior(&mut rng);
            let v = null_dir(&small, &mut rng);
            let a = small.ray_exit(&x, &v).unwrap();
            let b = big.ray_exit(&x, &v).unwrap();
            assert!(b.neg.value_or(f64::NEG_INFINITY) <= a.neg.value_or(f64::NEG_INFINITY) + 1e-9);
            assert!(b.pos.value_or(f64::INFINITY) >= a.pos.value_or(f64::INFINITY) - 1e-9);
        }
    }

    #[test]
    fn boolean_union_returns_component_of_zero() {
        // Two disjoint balls: the span from inside one never reaches the other.
        let d = ConcreteDomain::Union(vec![
            ConcreteDomain::EuclideanBall {
                center: vec![0.0, 0.0],
                radius: 1.0,
            },
            ConcreteDomain::EuclideanBall {
                center: vec![0.0, 5.0],
                radius: 1.0,
            },
        ]);
        let s = 1.0 / 2f64.sqrt();
        let span = d.ray_exit(&[0.0, 0.0], &[s, s]).unwrap();
        assert_exit_close(span.pos, Exit::Finite(1.0), 1e-8);
        assert_exit_close(span.neg, Exit::Finite(-1.0), 1e-8);
    }

    #[test]
    fn slit_sections() {
        let d = ConcreteDomain::Slit;
        // Base (t,s) = (-0.3, 0.3): (u,w) = (0, 0.6). Move u with v=(1,1)
        // (du = 2): u-interval (-1, 1/0.6).
        let span = d.ray_exit(&[-0.3, 0.3], &[1.0, 1.0]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-0.5), 1e-12);
        assert_exit_close(span.pos, Exit::Finite(0.5 / 0.6), 1e-12);
        // Base (u,w) = (0.005, 0): move w with v = (-1, 1) (dw = 2):
        // w-interval (-200, 200).
        let x = [0.0025, 0.0025];
        let span = d.ray_exit(&x, &[-1.0, 1.0]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-100.0), 1e-12);
        assert_exit_close(span.pos, Exit::Finite(100.0), 1e-12);
        // On the slit axis w0 = 0 moving u: unbounded to the right.
        let span = d.ray_exit(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_exit_close(span.neg, Exit::Finite(-0.5), 1e-12);
        assert!(span.pos.is_infinite());
    }

    #[test]
    fn pq_ball_exit_is_on_boundary() {
        let d = ConcreteDomain::PQBall {
            p: 1,
            q: 2,
            radius: 1.3,
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let x = d.sample_interior(&mut rng);
            let v = null_dir(&d, &mut rng);
            let span = d.ray_exit(&x, &v).unwrap();
            for e in [span.neg, span.pos] {
                let t = e.finite().expect("pq ball exits are finite");
                let p: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + t * b).collect();
                assert!((pq_norm(&p, 1) - 1.3).abs() < 1e-7);
            }
        }
    }
}
