//! Affine lightlike geodesics, the projective-parameter ODE, homography
//! algebra on `I = (-1, 1)`, the Poincaré distance `d_I`, maximal
//! projectively parametrized lightlike geodesics (PPLs), and Brody
//! reparametrization.
//!
//! The projective parameter `u` along a lightlike geodesic satisfies the
//! Schwarzian equation `S u = (2/(n-2)) Ric(xi', xi')` (standard convention
//! `S f = (f''/f')' - (1/2)(f''/f')^2`), integrated as the first-order
//! system `y' = (y2, y3, R y2 + (3/2) y3^2 / y2)`.  To survive `u` passing
//! through infinity the solver tracks the development angle
//! `theta = arctan(u) + c`, flipping to the chart `u -> -1/u` (a homography,
//! hence Schwarzian-neutral) whenever `|u|` grows large.

use crate::domains::{ConcreteDomain, Exit, RaySpan};
use crate::{Error, Result};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Default finite-difference step for metric derivatives.
pub const H_FD: f64 = 1e-5;
/// Finite-difference step for derivatives of Christoffel symbols.
const H_FD_GAMMA: f64 = 1e-4;
/// `|u|` threshold that triggers a projective chart flip.
const FLIP_THRESHOLD: f64 = 2.0;

type MetricFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type ChristoffelFn = dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync;
type RicciFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// A pseudo-Riemannian metric given by callbacks.
#[derive(Clone)]
pub struct MetricField {
    pub dim: usize,
    pub g: Arc<MetricFn>,
    /// Optional analytic Christoffel symbols, indexed `[k](i, j)`.
    pub christoffel: Option<Arc<ChristoffelFn>>,
    /// Optional analytic `Ric(v, v)`.
    pub ricci: Option<Arc<RicciFn>>,
    /// Dimension of the conformal structure the metric represents, when it
    /// differs from `dim` (e.g. ambient extensions with flat padding
    /// directions).  The projective-parameter coefficient `2/(n - 2)` uses
    /// this value.
    pub conformal_dim: Option<usize>,
    pub h_fd: f64,
    /// Marks a constant flat metric: geodesics are straight lines and the
    /// projective parameter is affine.
    pub flat: bool,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricField(dim={}, flat={})", self.dim, self.flat)
    }
}

impl MetricField {
    /// The constant diagonal metric of `R^{p,q}`.
    pub fn flat(space: crate::bilinear::QuadraticSpace) -> Self {
        let n = space.dim();
        MetricField {
            dim: n,
            g: Arc::new(move |_x| {
                DMatrix::from_fn(n, n, |i, j| if i == j { space.basis_sign(i) } else { 0.0 })
            }),
            christoffel: Some(Arc::new(move |_x| {
                vec![DMatrix::zeros(n, n); n]
            })),
            ricci: Some(Arc::new(|_x, _v| 0.0)),
            conformal_dim: None,
            h_fd: H_FD,
            flat: true,
        }
    }

    /// The Lorentzian product metric of `S^1 x S^2` in intrinsic coordinates
    /// `(theta, phi, psi)`: `-dtheta^2 + dphi^2 + sin^2(phi) dpsi^2`,
    /// with analytic Christoffel symbols and Ricci.
    pub fn s1xs2_chart() -> Self {
        MetricField {
            dim: 3,
            g: Arc::new(|x: &[f64]| {
                let s = x[1].sin();
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, s * s]))
            }),
            christoffel: Some(Arc::new(|x: &[f64]| {
                let (s, c) = x[1].sin_cos();
                let mut out = vec![DMatrix::zeros(3, 3); 3];
                out[1][(2, 2)] = -s * c;
                let cot = c / s;
                out[2][(1, 2)] = cot;
                out[2][(2, 1)] = cot;
                out
            })),
            ricci: Some(Arc::new(|x: &[f64], v: &[f64]| {
                // S^1 is flat; Ric_{S^2} = g_{S^2}.
                let s = x[1].sin();
                v[1] * v[1] + s * s * v[2] * v[2]
            })),
            conformal_dim: None,
            h_fd: H_FD,
            flat: false,
        }
    }

    /// Same metric with the analytic shortcuts stripped, forcing the
    /// finite-difference paths (used for dual-path cross-checks).
    pub fn s1xs2_chart_fd() -> Self {
        let mut m = Self::s1xs2_chart();
        m.christoffel = None;
        m.ricci = None;
        m
    }

    /// Extended ambient metric of `S^p x S^q` on `(R^{p+1} \ 0) x (R^{q+1} \ 0)`:
    /// per factor `±(y^ y^T + (I - y^ y^T)/r^2)` with `y^ = y/r`.  The metric
    /// is the product `dr^2 + g_S` in polar form, so unit spheres are totally
    /// geodesic; used for integrator drift checks.
    pub fn sphere_product_ambient(p: usize, q: usize) -> Self {
        let n = p + q + 2;
        MetricField {
            dim: n,
            g: Arc::new(move |x: &[f64]| {
                let mut g = DMatrix::zeros(n, n);
                let mut fill = |offset: usize, len: usize, sign: f64| {
                    let y = &x[offset..offset + len];
                    let r2: f64 = y.iter().map(|c| c * c).sum();
                    for i in 0..len {
                        for j in 0..len {
                            let hat = y[i] * y[j] / r2;
                            let proj = (if i == j { 1.0 } else { 0.0 } - hat) / r2;
                            g[(offset + i, offset + j)] = sign * (hat + proj);
                        }
                    }
                };
                fill(0, p + 1, -1.0);
                fill(p + 1, q + 1, 1.0);
                g
            }),
            christoffel: None,
            // Product of a flat radial line with a unit round sphere per
            // factor: Ricci vanishes radially and is (d-1) g_S on the
            // S^d part, independent of the overall factor sign.
            ricci: Some(Arc::new(move |x: &[f64], v: &[f64]| {
                let mut total = 0.0;
                for (offset, len) in [(0usize, p + 1), (p + 1, q + 1)] {
                    if len < 3 {
                        continue;
                    }
                    let y = &x[offset..offset + len];
                    let vf = &v[offset..offset + len];
                    let r2: f64 = y.iter().map(|c| c * c).sum();
                    let rad: f64 = y.iter().zip(vf).map(|(a, b)| a * b).sum::<f64>() / r2;
                    let vt2: f64 = vf
                        .iter()
                        .zip(y)
                        .map(|(vc, yc)| {
                            let t = vc - rad * yc;
                            t * t
                        })
                        .sum();
                    total += (len as f64 - 2.0) * vt2 / r2;
                }
                total
            })),
            // The ambient coordinates add one flat radial line per factor;
            // the conformal structure represented is the (p+q)-dimensional
            // sphere product itself.
            conformal_dim: Some(p + q),
            h_fd: H_FD,
            flat: false,
        }
    }

    fn metric_at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.g)(x)
    }
}

/// Levi-Civita Christoffel symbols `Gamma^k_ij` at `x` (analytic callback
/// when present, central finite differences otherwise).
pub fn christoffel(metric: &MetricField, x: &[f64]) -> Result<Vec<DMatrix<f64>>> {
    if let Some(cb) = &metric.christoffel {
        return Ok(cb(x));
    }
    let n = metric.dim;
    let g = metric.metric_at(x);
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("metric is singular".into()))?;
    if g.determinant().abs() < 1e-10 {
        return Err(Error::Degenerate("metric determinant below 1e-10".into()));
    }
    let h = metric.h_fd;
    let mut dg: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for l in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[l] += h;
        xm[l] -= h;
        dg.push((metric.metric_at(&xp) - metric.metric_at(&xm)) / (2.0 * h));
    }
    let mut out = vec![DMatrix::zeros(n, n); n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                out[k][(i, j)] = 0.5 * s;
            }
        }
    }
    Ok(out)
}

/// `Ric(v, v)` at `x` (analytic callback or second finite differences of the
/// Christoffel symbols).
pub fn ricci_lightlike(metric: &MetricField, x: &[f64], v: &[f64]) -> Result<f64> {
    if let Some(cb) = &metric.ricci {
        return Ok(cb(x, v));
    }
    let n = metric.dim;
    let h = H_FD_GAMMA;
    let gamma0 = christoffel(metric, x)?;
    let mut dgamma: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(n);
    for l in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[l] += h;
        xm[l] -= h;
        let gp = christoffel(metric, &xp)?;
        let gm = christoffel(metric, &xm)?;
        dgamma.push(
            gp.into_iter()
                .zip(gm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    // Ric_ij = d_k Gamma^k_ij - d_j Gamma^k_ik
    //        + Gamma^k_km Gamma^m_ij - Gamma^k_jm Gamma^m_ik.
    let mut out = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut r = 0.0;
            for k in 0..n {
                r += dgamma[k][k][(i, j)] - dgamma[j][k][(i, k)];
                for m in 0..n {
                    r += gamma0[k][(k, m)] * gamma0[m][(i, j)]
                        - gamma0[k][(j, m)] * gamma0[m][(i, k)];
                }
            }
            out += r * v[i] * v[j];
        }
    }
    Ok(out)
}

/// A dense fixed-step trace of an affine geodesic.
#[derive(Debug, Clone)]
pub struct AffineGeodesic {
    /// Strictly increasing sample times (containing 0).
    pub times: Vec<f64>,
    /// Positions and velocities at the sample times.
    pub states: Vec<(Vec<f64>, Vec<f64>)>,
    pub step: f64,
}

fn geodesic_rhs(metric: &MetricField, x: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let gamma = christoffel(metric, x)?;
    let n = metric.dim;
    let mut acc = vec![0.0; n];
    for k in 0..n {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += gamma[k][(i, j)] * v[i] * v[j];
            }
        }
        acc[k] = -s;
    }
    Ok((v.to_vec(), acc))
}

fn rk4_step(metric: &MetricField, x: &[f64], v: &[f64], h: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = metric.dim;
    let (k1x, k1v) = geodesic_rhs(metric, x, v)?;
    let add = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> {
        a.iter().zip(b).map(|(a, b)| a + s * b).collect()
    };
    let (k2x, k2v) = geodesic_rhs(metric, &add(x, &k1x, 0.5 * h), &add(v, &k1v, 0.5 * h))?;
    let (k3x, k3v) = geodesic_rhs(metric, &add(x, &k2x, 0.5 * h), &add(v, &k2v, 0.5 * h))?;
    let (k4x, k4v) = geodesic_rhs(metric, &add(x, &k3x, h), &add(v, &k3v, h))?;
    let mut xo = x.to_vec();
    let mut vo = v.to_vec();
    for i in 0..n {
        xo[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
        vo[i] += h / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
    Ok((xo, vo))
}

/// Fixed-step RK4 trace of the geodesic through `(x0, v0)` over
/// `span = (t_min, t_max)` with `t_min <= 0 <= t_max`.
pub fn integrate_affine_geodesic(
    metric: &MetricField,
    x0: &[f64],
    v0: &[f64],
    span: (f64, f64),
    step: f64,
) -> Result<AffineGeodesic> {
    if step <= 0.0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if v0.iter().map(|c| c * c).sum::<f64>() == 0.0 {
        return Err(Error::InvalidArgument("zero initial velocity".into()));
    }
    if !(span.0 <= 0.0 && span.1 >= 0.0) {
        return Err(Error::InvalidArgument("span must contain 0".into()));
    }
    let march = |sign: f64, limit: f64| -> Result<Vec<(f64, Vec<f64>, Vec<f64>)>> {
        let mut out = Vec::new();
        // Exact uniform steps: downstream finite differences on the trace
        // assume equal spacing.
        let nsteps = (limit.abs() / step).round() as usize;
        let h = if nsteps == 0 { 0.0 } else { sign * limit.abs() / nsteps as f64 };
        let mut x = x0.to_vec();
        let mut v = v0.to_vec();
        for k in 1..=nsteps {
            let (xn, vn) = rk4_step(metric, &x, &v, h)?;
            x = xn;
            v = vn;
            out.push((h * k as f64, x.clone(), v.clone()));
        }
        Ok(out)
    };
    let back = march(-1.0, span.0)?;
    let fwd = march(1.0, span.1)?;
    let mut times = Vec::with_capacity(back.len() + fwd.len() + 1);
    let mut states = Vec::with_capacity(back.len() + fwd.len() + 1);
    for (t, x, v) in back.into_iter().rev() {
        times.push(t);
        states.push((x, v));
    }
    times.push(0.0);
    states.push((x0.to_vec(), v0.to_vec()));
    for (t, x, v) in fwd {
        times.push(t);
        states.push((x, v));
    }
    Ok(AffineGeodesic {
        times,
        states,
        step,
    })
}

// ---------------------------------------------------------------------------
// Homographies.
// ---------------------------------------------------------------------------

/// A real homography `t -> (a t + b)/(c t + d)`, stored as a 2x2 matrix
/// modulo positive scale.
#[derive(Debug, Clone, Copy)]
pub struct Homography {
    pub m: [[f64; 2]; 2],
}

impl Homography {
    pub fn identity() -> Self {
        Homography {
            m: [[1.0, 0.0], [0.0, 1.0]],
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.m[0][0] * t + self.m[0][1]) / (self.m[1][0] * t + self.m[1][1])
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let d = self.m[1][0] * t + self.m[1][1];
        self.det() / (d * d)
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &Homography) -> Homography {
        let a = &self.m;
        let b = &other.m;
        Homography {
            m: [
                [
                    a[0][0] * b[0][0] + a[0][1] * b[1][0],
                    a[0][0] * b[0][1] + a[0][1] * b[1][1],
                ],
                [
                    a[1][0] * b[0][0] + a[1][1] * b[1][0],
                    a[1][0] * b[0][1] + a[1][1] * b[1][1],
                ],
            ],
        }
    }

    pub fn inverse(&self) -> Homography {
        let a = &self.m;
        Homography {
            m: [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]],
        }
    }
}

/// The homography mapping `(s1, s2, s3) -> (0, 1, inf)`.
fn to_standard(s: [f64; 3]) -> Homography {
    Homography {
        m: [
            [s[1] - s[2], -s[0] * (s[1] - s[2])],
            [s[1] - s[0], -s[2] * (s[1] - s[0])],
        ],
    }
}

/// The homography with `h(s_i) = t_i` (exact cross-ratio preservation).
pub fn homography_fit(s: [f64; 3], t: [f64; 3]) -> Result<Homography> {
    for (a, b) in [(s[0], s[1]), (s[0], s[2]), (s[1], s[2])] {
        if a == b {
            return Err(Error::InvalidArgument(
                "homography_fit needs pairwise distinct sources".into(),
            ));
        }
    }
    for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
        if a == b {
            return Err(Error::InvalidArgument(
                "homography_fit needs pairwise distinct targets".into(),
            ));
        }
    }
    let h = to_standard(t).inverse().compose(&to_standard(s));
    if h.det().abs() < 1e-14 {
        return Err(Error::Degenerate("degenerate homography fit".into()));
    }
    Ok(h)
}

/// Poincaré distance of the interval `I = (-1, 1)`:
/// `d_I(s, t) = 2 |artanh t - artanh s|` (density `2/(1 - x^2)`).
pub fn poincare_distance_i(s: f64, t: f64) -> Result<f64> {
    if s.abs() >= 1.0 || t.abs() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "poincare_distance_i needs arguments in (-1,1), got {s}, {t}"
        )));
    }
    Ok(2.0 * (t.atanh() - s.atanh()).abs())
}

// ---------------------------------------------------------------------------
// Projective parameter.
// ---------------------------------------------------------------------------

/// 2-jet state `(u, u', u'')` of the projective parameter.
#[derive(Debug, Clone, Copy)]
pub struct ProjectiveParamState {
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
}

impl ProjectiveParamState {
    pub const SEED: ProjectiveParamState = ProjectiveParamState {
        u: 0.0,
        du: 1.0,
        ddu: 0.0,
    };
}

/// A sampled projective-parameter trace along a geodesic.
#[derive(Debug, Clone)]
pub struct ProjectiveTrace {
    pub times: Vec<f64>,
    /// Geodesic positions at the sample times.
    pub positions: Vec<Vec<f64>>,
    /// `u(t)` values; `None` where the trace has passed through infinity in
    /// the original projective chart.
    pub u: Vec<Option<f64>>,
    /// Development angle `theta(t) = arctan(u) + c`, continuous and strictly
    /// increasing across chart flips.
    pub theta: Vec<f64>,
    /// Set when `u' <= 0` was reached numerically and the trace truncated.
    pub truncated: bool,
}

/// Full ODE state: geodesic `(x, v)` plus projective jet in the current
/// chart, plus the chart bookkeeping `(offset, flipped)`.
#[derive(Clone)]
struct CombinedState {
    x: Vec<f64>,
    v: Vec<f64>,
    jet: [f64; 3],
    /// `theta = arctan(jet u) + offset`.
    offset: f64,
    flipped: bool,
}

impl CombinedState {
    fn theta(&self) -> f64 {
        self.jet[0].atan() + self.offset
    }

    fn maybe_flip(&mut self) {
        let u = self.jet[0];
        if u.abs() > FLIP_THRESHOLD {
            let [u, du, ddu] = self.jet;
            self.jet = [
                -1.0 / u,
                du / (u * u),
                ddu / (u * u) - 2.0 * du * du / (u * u * u),
            ];
            // arctan(u) = arctan(-1/u) + sign(u) * pi/2.
            self.offset += u.signum() * std::f64::consts::FRAC_PI_2;
            self.flipped = !self.flipped;
        }
    }
}

fn combined_rhs(metric: &MetricField, n: usize, s: &CombinedState) -> Result<CombinedState> {
    let (dx, dv) = geodesic_rhs(metric, &s.x, &s.v)?;
    // In dimension 2 the Ricci tensor is proportional to the metric, so its
    // value on the (null) tangent vanishes identically.
    let nc = metric.conformal_dim.unwrap_or(n);
    let r = if nc <= 2 {
        0.0
    } else {
        2.0 / (nc as f64 - 2.0) * ricci_lightlike(metric, &s.x, &s.v)?
    };
    let [_, du, ddu] = s.jet;
    Ok(CombinedState {
        x: dx,
        v: dv,
        jet: [du, ddu, r * du + 1.5 * ddu * ddu / du],
        offset: 0.0,
        flipped: false,
    })
}

fn combined_rk4(metric: &MetricField, s: &CombinedState, h: f64) -> Result<CombinedState> {
    let n = metric.dim;
    let add = |a: &CombinedState, k: &CombinedState, c: f64| -> CombinedState {
        CombinedState {
            x: a.x.iter().zip(&k.x).map(|(a, b)| a + c * b).collect(),
            v: a.v.iter().zip(&k.v).map(|(a, b)| a + c * b).collect(),
            jet: [
                a.jet[0] + c * k.jet[0],
                a.jet[1] + c * k.jet[1],
                a.jet[2] + c * k.jet[2],
            ],
            offset: a.offset,
            flipped: a.flipped,
        }
    };
    let k1 = combined_rhs(metric, n, s)?;
    let k2 = combined_rhs(metric, n, &add(s, &k1, 0.5 * h))?;
    let k3 = combined_rhs(metric, n, &add(s, &k2, 0.5 * h))?;
    let k4 = combined_rhs(metric, n, &add(s, &k3, h))?;
    let mut out = s.clone();
    for i in 0..out.x.len() {
        out.x[i] += h / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
        out.v[i] += h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }
    for j in 0..3 {
        out.jet[j] += h / 6.0 * (k1.jet[j] + 2.0 * k2.jet[j] + 2.0 * k3.jet[j] + k4.jet[j]);
    }
    Ok(out)
}

/// Integrate the projective parameter along the geodesic through `(x0, v0)`
/// over `span` (containing 0), seeded with `init` at `t = 0`.
/// Requires `n >= 3` (curved case); flat metrics have affine `u`.
pub fn solve_projective_parameter(
    metric: &MetricField,
    x0: &[f64],
    v0: &[f64],
    span: (f64, f64),
    step: f64,
    init: ProjectiveParamState,
) -> Result<ProjectiveTrace> {
    if init.du <= 0.0 {
        return Err(Error::InvalidArgument("init.u' must be positive".into()));
    }
    if metric.dim < 3 {
        return Err(Error::InvalidArgument(
            "projective parameter ODE requires ambient dimension >= 3".into(),
        ));
    }
    if step <= 0.0 {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    let start = CombinedState {
        x: x0.to_vec(),
        v: v0.to_vec(),
        jet: [init.u, init.du, init.ddu],
        offset: 0.0,
        flipped: false,
    };
    let mut truncated = false;
    let mut march = |sign: f64, limit: f64| -> Result<Vec<(f64, CombinedState)>> {
        let mut out = Vec::new();
        let nsteps = (limit.abs() / step).round() as usize;
        let h = if nsteps == 0 { 0.0 } else { sign * limit.abs() / nsteps as f64 };
        let mut s = start.clone();
        for k in 1..=nsteps {
            let next = combined_rk4(metric, &s, h)?;
            if next.jet[1] <= 0.0 {
                truncated = true;
                break;
            }
            s = next;
            s.maybe_flip();
            out.push((h * k as f64, s.clone()));
        }
        Ok(out)
    };
    let back = march(-1.0, span.0)?;
    let fwd = march(1.0, span.1)?;
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut u = Vec::new();
    let mut theta = Vec::new();
    let mut push = |t: f64, s: &CombinedState| {
        times.push(t);
        positions.push(s.x.clone());
        u.push(if s.flipped { None } else { Some(s.jet[0]) });
        theta.push(s.theta());
    };
    for (t, s) in back.iter().rev() {
        push(*t, s);
    }
    push(0.0, &start);
    for (t, s) in &fwd {
        push(*t, s);
    }
    Ok(ProjectiveTrace {
        times,
        positions,
        u,
        theta,
        truncated,
    })
}

/// Five-point finite-difference Schwarzian of a uniformly sampled function;
/// returns values at the interior samples `2..len-2`.
pub fn schwarzian_numeric(ts: &[f64], us: &[f64]) -> Vec<f64> {
    assert!(ts.len() == us.len() && ts.len() >= 5);
    let h = ts[1] - ts[0];
    let mut out = Vec::with_capacity(ts.len() - 4);
    for i in 2..ts.len() - 2 {
        let d1 = (-us[i + 2] + 8.0 * us[i + 1] - 8.0 * us[i - 1] + us[i - 2]) / (12.0 * h);
        let d2 = (-us[i + 2] + 16.0 * us[i + 1] - 30.0 * us[i] + 16.0 * us[i - 1] - us[i - 2])
            / (12.0 * h * h);
        let d3 = (us[i + 2] - 2.0 * us[i + 1] + 2.0 * us[i - 1] - us[i - 2]) / (2.0 * h * h * h);
        out.push(d3 / d1 - 1.5 * (d2 / d1) * (d2 / d1));
    }
    out
}

// ---------------------------------------------------------------------------
// Maximal PPLs.
// ---------------------------------------------------------------------------

/// Projective domain of a maximal PPL, described by the development angles
/// of its ends (`theta = 0` at the base point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectiveDomain {
    /// `theta_minus < 0 < theta_plus`, total opening < pi.
    Bounded { theta_minus: f64, theta_plus: f64 },
    /// The development covers a closed half-turn: the PPL extends over all of
    /// `R` in the projective parameter.
    ContainsRealLine,
}

/// A maximal PPL in a flat chart: a straight null line with affine
/// projective parameter, clipped by the domain.
#[derive(Debug, Clone)]
pub struct FlatPpl {
    pub base: Vec<f64>,
    pub dir: Vec<f64>,
    pub span: RaySpan,
}

impl FlatPpl {
    pub fn projective_domain(&self) -> ProjectiveDomain {
        match (self.span.neg, self.span.pos) {
            (Exit::Infinite, Exit::Infinite) => ProjectiveDomain::ContainsRealLine,
            (neg, pos) => ProjectiveDomain::Bounded {
                theta_minus: match neg {
                    Exit::Finite(a) => a.atan(),
                    Exit::Infinite => -std::f64::consts::FRAC_PI_2,
                },
                theta_plus: match pos {
                    Exit::Finite(b) => b.atan(),
                    Exit::Infinite => std::f64::consts::FRAC_PI_2,
                },
            },
        }
    }

    /// Affine parameter of the canonical homography `I -> (tau-, tau+)`
    /// with `tau(0) = 0` for one-sided spans.
    fn tau_map(&self, t: f64) -> Result<(f64, f64)> {
        match (self.span.neg, self.span.pos) {
            (Exit::Finite(a), Exit::Finite(b)) => {
                Ok((0.5 * (a + b) + 0.5 * (b - a) * t, 0.5 * (b - a)))
            }
            (Exit::Finite(a), Exit::Infinite) => {
                let k = -a;
                Ok((a + k * (1.0 + t) / (1.0 - t), k * 2.0 / ((1.0 - t) * (1.0 - t))))
            }
            (Exit::Infinite, Exit::Finite(b)) => {
                Ok((b - b * (1.0 - t) / (1.0 + t), b * 2.0 / ((1.0 + t) * (1.0 + t))))
            }
            (Exit::Infinite, Exit::Infinite) => Err(Error::InvalidArgument(
                "full null lines admit no homography onto I".into(),
            )),
        }
    }

    /// The PPL as a curve on `I = (-1, 1)`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (tau, _) = self.tau_map(t)?;
        Ok(self
            .base
            .iter()
            .zip(&self.dir)
            .map(|(x, v)| x + tau * v)
            .collect())
    }

    pub fn deriv(&self, t: f64) -> Result<Vec<f64>> {
        let (_, dtau) = self.tau_map(t)?;
        Ok(self.dir.iter().map(|v| dtau * v).collect())
    }

    /// Reparametrize by a homography `h` with `h(I)` inside `I`.
    pub fn eval_composed(&self, h: &Homography, t: f64) -> Result<Vec<f64>> {
        self.eval(h.apply(t))
    }

    pub fn deriv_composed(&self, h: &Homography, t: f64) -> Result<Vec<f64>> {
        let d = h.deriv(t);
        Ok(self.deriv(h.apply(t))?.iter().map(|v| v * d).collect())
    }
}

/// Maximal flat PPL: clip the null line by the domain.
pub fn maximal_ppl_flat(domain: &ConcreteDomain, x: &[f64], v: &[f64]) -> Result<FlatPpl> {
    let span = domain.ray_exit(x, v)?;
    Ok(FlatPpl {
        base: x.to_vec(),
        dir: v.to_vec(),
        span,
    })
}

/// A maximal PPL of a curved metric, described by its projective-parameter
/// trace and the development angles of the domain ends.
#[derive(Debug, Clone)]
pub struct CurvedPpl {
    pub domain: ProjectiveDomain,
    pub trace: ProjectiveTrace,
    /// Affine exit times (meaningful when the domain is bounded).
    pub t_minus: f64,
    pub t_plus: f64,
}

/// Limiting development angle of an unbounded trace tail: fit `u(t)` by a
/// homography through three well-spread samples of the final projective
/// chart and evaluate at `t = inf`.
fn mobius_tail_theta(samples: &[(f64, CombinedState)]) -> Option<f64> {
    let last = samples.last()?;
    let offset = last.1.offset;
    // Longest suffix sharing the final chart branch.
    let first = samples
        .iter()
        .position(|(_, st)| st.offset == offset && st.flipped == last.1.flipped)?;
    let branch = &samples[first..];
    if branch.len() < 3 {
        return None;
    }
    let pick = [0, branch.len() / 2, branch.len() - 1];
    let ts = [branch[pick[0]].0, branch[pick[1]].0, branch[pick[2]].0];
    let us = [
        branch[pick[0]].1.jet[0],
        branch[pick[1]].1.jet[0],
        branch[pick[2]].1.jet[0],
    ];
    let h = homography_fit(ts, us).ok()?;
    let (a, c) = (h.m[0][0], h.m[1][0]);
    if c.abs() <= 1e-300 {
        return Some(offset + std::f64::consts::FRAC_PI_2 * (us[2] - us[0]).signum());
    }
    Some((a / c).atan() + offset)
}

/// Integrate a curved maximal PPL: run the combined geodesic + projective
/// system in both directions until the membership callback fails (exit time
/// refined by bisection on trial RK4 sub-steps) or until the development
/// angle has swept a half-turn.
pub fn maximal_ppl_curved(
    metric: &MetricField,
    inside: &dyn Fn(&[f64]) -> bool,
    x: &[f64],
    v: &[f64],
    step: f64,
) -> Result<CurvedPpl> {
    if !inside(x) {
        return Err(Error::OutsideDomain(format!("{x:?}")));
    }
    let start = CombinedState {
        x: x.to_vec(),
        v: v.to_vec(),
        jet: [0.0, 1.0, 0.0],
        offset: 0.0,
        flipped: false,
    };
    let half_turn = std::f64::consts::PI;
    // March one direction; return (exit time, exit theta, swept past pi?).
    let march = |sign: f64| -> Result<(f64, f64, bool, Vec<(f64, CombinedState)>)> {
        let mut t: f64 = 0.0;
        let mut s = start.clone();
        let mut samples: Vec<(f64, CombinedState)> = Vec::new();
        loop {
            // Grow the step geometrically in the far tail: once |t| is large
            // the trace is heading to an unbounded end and only the limiting
            // development angle matters.
            let h = sign * step * 1f64.max(0.05 * t.abs());
            let next = combined_rk4(metric, &s, h)?;
            if next.jet[1] <= 0.0 {
                return Err(Error::Numerical(
                    "projective parameter lost monotonicity".into(),
                ));
            }
            if !inside(&next.x) {
                // Bisect the step fraction of the crossing.
                let mut lo = 0.0;
                let mut hi = 1.0;
                let mut s_hi = next.clone();
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let trial = combined_rk4(metric, &s, h * mid)?;
                    if inside(&trial.x) {
                        lo = mid;
                    } else {
                        hi = mid;
                        s_hi = trial;
                    }
                    if hi - lo < 1e-12 {
                        break;
                    }
                }
                let exit_theta = s_hi.theta();
                return Ok((t + h * hi, exit_theta, false, samples));
            }
            t += h;
            s = next;
            s.maybe_flip();
            samples.push((t, s.clone()));
            if (s.theta() - start.theta()).abs() >= half_turn + 0.05 {
                return Ok((t, s.theta(), true, samples));
            }
            if t.abs() > 1e4 {
                // The chord is unbounded on this side.  The limiting
                // development angle is the value of arctan(u) at t = ±inf;
                // fit a Möbius tail through well-spread samples of the final
                // projective chart (exact for flat metrics, asymptotically
                // correct otherwise).
                let theta_end = mobius_tail_theta(&samples).unwrap_or_else(|| s.theta());
                return Ok((sign * f64::INFINITY, theta_end, false, samples));
            }
        }
    };
    let (t_minus, theta_minus, swept_m, back) = march(-1.0)?;
    let (t_plus, theta_plus, swept_p, fwd) = march(1.0)?;
    let mut times = Vec::new();
    let mut positions = Vec::new();
    let mut u = Vec::new();
    let mut theta = Vec::new();
    let mut push = |t: f64, s: &CombinedState| {
        times.push(t);
        positions.push(s.x.clone());
        u.push(if s.flipped { None } else { Some(s.jet[0]) });
        theta.push(s.theta());
    };
    for (t, s) in back.iter().rev() {
        push(*t, s);
    }
    push(0.0, &start);
    for (t, s) in &fwd {
        push(*t, s);
    }
    let opening = theta_plus - theta_minus;
    let domain = if swept_m || swept_p || opening >= half_turn - 1e-9 {
        ProjectiveDomain::ContainsRealLine
    } else {
        ProjectiveDomain::Bounded {
            theta_minus,
            theta_plus,
        }
    };
    Ok(CurvedPpl {
        domain,
        trace: ProjectiveTrace {
            times,
            positions,
            u,
            theta,
            truncated: false,
        },
        t_minus,
        t_plus,
    })
}

// ---------------------------------------------------------------------------
// Brody reparametrization.
// ---------------------------------------------------------------------------

/// Reparametrize a PPL `gamma : I -> M` with `|gamma'(0)| > c` into
/// `alpha = gamma . h` with `|alpha'(0)| = c` and
/// `|alpha'(t)| <= c/(1 - t^2)` on `I` (`norm` supplies the Riemannian norm
/// of a velocity at a point).
pub fn brody_reparametrize(
    gamma: &FlatPpl,
    c: f64,
    norm: &dyn Fn(&[f64], &[f64]) -> f64,
) -> Result<(Homography, Vec<(f64, f64)>)> {
    if c <= 0.0 {
        return Err(Error::InvalidArgument("c must be positive".into()));
    }
    let speed0 = norm(&gamma.eval(0.0)?, &gamma.deriv(0.0)?);
    if speed0 <= c {
        return Err(Error::InvalidArgument(format!(
            "brody_reparametrize requires |gamma'(0)| > c ({speed0} <= {c})"
        )));
    }
    let grid: Vec<f64> = (1..400).map(|i| -1.0 + i as f64 / 200.0).collect();
    // M(r) = max_t (1 - t^2) |(gamma(rt))' |; M(0) = 0, M(1-) >= |gamma'(0)|.
    let weighted = |r: f64, t: f64| -> Result<f64> {
        let s = r * t;
        let x = gamma.eval(s)?;
        let d = gamma.deriv(s)?;
        Ok((1.0 - t * t) * r * norm(&x, &d))
    };
    let weighted_max = |r: f64| -> Result<(f64, f64)> {
        let mut best = (0.0, 0.0);
        for &t in &grid {
            let w = weighted(r, t)?;
            if w > best.0 {
                best = (w, t);
            }
        }
        // Golden-section refinement around the grid maximum so the reported
        // maximum is the continuum one (the downstream bound is tight there).
        let gap = 1.0 / 200.0;
        let (mut a, mut b) = ((best.1 - gap).max(-1.0 + 1e-9), (best.1 + gap).min(1.0 - 1e-9));
        let phi = 0.618_033_988_749_894_8;
        let mut t1 = b - phi * (b - a);
        let mut t2 = a + phi * (b - a);
        let mut f1 = weighted(r, t1)?;
        let mut f2 = weighted(r, t2)?;
        for _ in 0..80 {
            if f1 < f2 {
                a = t1;
                t1 = t2;
                f1 = f2;
                t2 = a + phi * (b - a);
                f2 = weighted(r, t2)?;
            } else {
                b = t2;
                t2 = t1;
                f2 = f1;
                t1 = b - phi * (b - a);
                f1 = weighted(r, t1)?;
            }
        }
        let tm = 0.5 * (a + b);
        Ok((weighted(r, tm)?.max(best.0), tm))
    };
    let mut lo = 0.0;
    let mut hi = 1.0 - 1e-9;
    if weighted_max(hi)?.0 <= c {
        return Err(Error::Numerical(
            "weighted speed never reaches c on the sampling grid".into(),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if weighted_max(mid)?.0 < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let (_, t0) = weighted_max(r)?;
    // Recenter the interior max to 0 with the isometry
    // phi(t) = (t + t0)/(1 + t0 t); then (1 - t^2) phi'(t) = 1 - phi(t)^2,
    // so the weighted speed bound transports and is attained at t = 0.
    let scale = Homography {
        m: [[r, 0.0], [0.0, 1.0]],
    };
    let recenter = Homography {
        m: [[1.0, t0], [t0, 1.0]],
    };
    let h = scale.compose(&recenter);
    let mut samples = Vec::with_capacity(101);
    for i in 0..101 {
        let t = -0.99 + 1.98 * i as f64 / 100.0;
        let x = gamma.eval_composed(&h, t)?;
        let d = gamma.deriv_composed(&h, t)?;
        samples.push((t, norm(&x, &d)));
    }
    Ok((h, samples))
}
