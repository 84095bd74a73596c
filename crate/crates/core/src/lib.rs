//! Numerical conformal-geometry engine for the Markowitz pseudodistance.
//!
//! The crate computes, on domains of flat-model pseudo-Riemannian conformal
//! manifolds (Minkowski charts, the Einstein universe `Ein^{p,q}`, its double
//! cover `S^p x S^q` and the universal cover of `Ein^{1,n}`):
//!
//! * the infinitesimal functional `F` of the Markowitz pseudodistance,
//! * certified upper/lower brackets on the pseudodistance `delta` itself,
//! * exact oracles (diamond distance, Hilbert metric, HB-domain reference
//!   metrics) used to pinch those brackets,
//! * hyperbolicity and conformal-convexity probes.
//!
//! Modules follow the mathematical layering:
//!
//! * [`bilinear`] — signature-(p,q) forms, causal typing, isotropic algebra;
//! * [`models`] — the projective model of the Einstein universe, stereographic
//!   charts, photons, Möbius hyperplanes, cylinder causality;
//! * [`domains`] — membership + lightlike ray-exit queries for the concrete
//!   domains studied in the reference material, plus a conformal-convexity
//!   checker;
//! * [`geodesic`] — affine lightlike geodesics, the projective-parameter ODE
//!   (a Schwarzian equation), homographies, Brody reparametrization;
//! * [`markowitz`] — the functional `F`, lightlike chains, distance
//!   estimators and oracles;
//! * [`cli`] — the command-line surface (`functional`, `distance`, `figure`,
//!   `convexity`, `suite`) with CSV/JSON outputs;
//! * [`suite`] — the acceptance criteria, shared by `markgeo suite` and the
//!   integration tests.
//!
//! The primary interface for exploration is the `examples/` directory; each
//! example exercises one capability end to end.

pub mod bilinear;
pub mod cli;
pub mod domains;
pub mod geodesic;
pub mod markowitz;
pub mod models;
pub mod opt;
pub mod suite;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("point outside domain: {0}")]
    OutsideDomain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("no feasible chain found within budget: {0}")]
    NoFeasibleChain(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Named tolerances used across the engine.  Defaults match the documented
/// contract; the CLI can override individual entries via `--tol name=value`.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative causal-classification tolerance (scaled by squared Euclidean norm).
    pub eps_type: f64,
    /// Chain joint agreement tolerance (chart metric).
    pub joint: f64,
    /// Relative tolerance of domain-exit bisection.
    pub ray_exit_rel: f64,
    /// Geodesic-equation residual bound at trace points (step 1e-3).
    pub geo_residual: f64,
    /// Schwarzian residual bound for projective parameter traces.
    pub schwarzian: f64,
    /// Minimal supporting-hyperplane margin accepted by the convexity search.
    pub margin: f64,
    /// Floor on min-F for a LikelyHyperbolic verdict.
    pub min_f_floor: f64,
    /// Margin to the per-factor arc-length threshold pi.
    pub pi_margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_type: 1e-12,
            joint: 1e-8,
            ray_exit_rel: 1e-10,
            geo_residual: 1e-7,
            schwarzian: 1e-4,
            margin: 1e-6,
            min_f_floor: 1e-4,
            pi_margin: 1e-3,
        }
    }
}

impl Tolerances {
    /// Set a tolerance by name; unknown names are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance {name} must be nonnegative, got {value}"
            )));
        }
        match name {
            "eps_type" => self.eps_type = value,
            "joint" => self.joint = value,
            "ray_exit_rel" => self.ray_exit_rel = value,
            "geo_residual" => self.geo_residual = value,
            "schwarzian" => self.schwarzian = value,
            "margin" => self.margin = value,
            "min_f_floor" => self.min_f_floor = value,
            "pi_margin" => self.pi_margin = value,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown tolerance name: {other}"
                )))
            }
        }
        Ok(())
    }
}
