//! Projective model of the Einstein universe and its covers.
//!
//! `Ein^{p,q}` is the projectivized null quadric of `R^{p+1,q+1}`.  This
//! module provides points (normalized isotropic lifts), photons (totally
//! degenerate 2-planes), Möbius hyperplanes and their chart traces,
//! stereographic charts identifying the complement of a lightcone with
//! `R^{p,q}`, the double cover `S^p x S^q`, and the causal structure of the
//! universal cover of `Ein^{1,n}` as a cylinder `R x S^n`.
//!
//! Chart convention: with pole lift `v`, isotropic partner `w` (`b(v,w)=1`)
//! and a `b`-orthonormal frame of `span(v,w)^perp`, a chart point `h` embeds
//! as the isotropic lift `w + h - (b(h,h)/2) v`.  (The factor 1/2 is forced
//! by isotropy of the image; `b(lift, v) = 1` holds on this canonical lift.)

use crate::bilinear::{isotropic_partner, QuadraticSpace, SpaceVec};
use crate::{Error, Result};

/// Absolute tolerance used for projective-model incidence decisions,
/// relative to the Euclidean norms of the participating lifts.
const INCIDENCE_TOL: f64 = 1e-10;

/// A point of `Ein^{p,q}`: a normalized isotropic lift in `R^{p+1,q+1}`
/// (unit Euclidean norm, first coordinate of magnitude above the noise floor
/// is positive), so equality of points is directly testable.
#[derive(Debug, Clone, PartialEq)]
pub struct EinPoint {
    pub lift: SpaceVec,
}

impl EinPoint {
    pub fn new(lift: SpaceVec) -> Result<Self> {
        let norm = lift.euclid_norm();
        if norm < 1e-14 {
            return Err(Error::Degenerate("zero lift".into()));
        }
        let b = lift.space.quad(&lift.coords);
        if b.abs() > 1e-8 * norm * norm {
            return Err(Error::InvalidArgument(format!(
                "lift is not isotropic: b(x,x)/|x|^2 = {}",
                b / (norm * norm)
            )));
        }
        let mut coords: Vec<f64> = lift.coords.iter().map(|c| c / norm).collect();
        let flip = coords
            .iter()
            .find(|c| c.abs() > 1e-9)
            .map(|c| *c < 0.0)
            .unwrap_or(false);
        if flip {
            coords.iter_mut().for_each(|c| *c = -*c);
        }
        Ok(EinPoint {
            lift: SpaceVec::new(lift.space, coords)?,
        })
    }

    pub fn ambient(&self) -> QuadraticSpace {
        self.lift.space
    }

    /// Projective equality within tolerance.
    pub fn approx_eq(&self, other: &EinPoint, tol: f64) -> bool {
        self.lift
            .coords
            .iter()
            .zip(&other.lift.coords)
            .all(|(a, b)| (a - b).abs() <= tol)
    }
}

/// A photon: the projectivization of a totally degenerate 2-plane,
/// stored through two spanning lifts.
#[derive(Debug, Clone)]
pub struct Photon {
    pub u1: SpaceVec,
    pub u2: SpaceVec,
}

impl Photon {
    pub fn new(u1: SpaceVec, u2: SpaceVec) -> Result<Self> {
        let s = u1.space;
        let scale = u1.euclid_norm() * u2.euclid_norm();
        if scale < 1e-14 {
            return Err(Error::Degenerate("zero spanning lift".into()));
        }
        for (name, val) in [
            ("b(u1,u1)", s.quad(&u1.coords)),
            ("b(u2,u2)", s.quad(&u2.coords)),
            ("b(u1,u2)", s.beta(&u1.coords, &u2.coords)),
        ] {
            if val.abs() > INCIDENCE_TOL * scale {
                return Err(Error::InvalidArgument(format!(
                    "photon plane not totally degenerate: {name} = {val}"
                )));
            }
        }
        // Linear independence via the Euclidean Gram determinant.
        let g11 = u1.euclid_norm_sq();
        let g22 = u2.euclid_norm_sq();
        let g12: f64 = u1.coords.iter().zip(&u2.coords).map(|(a, b)| a * b).sum();
        if g11 * g22 - g12 * g12 < 1e-12 * g11 * g22 {
            return Err(Error::Degenerate("spanning lifts are collinear".into()));
        }
        Ok(Photon { u1, u2 })
    }

    /// Does the photon contain this point?  (Euclidean least-squares residual
    /// of the lift against the spanning plane.)
    pub fn contains(&self, x: &EinPoint) -> bool {
        let g11 = self.u1.euclid_norm_sq();
        let g22 = self.u2.euclid_norm_sq();
        let g12: f64 = self
            .u1
            .coords
            .iter()
            .zip(&self.u2.coords)
            .map(|(a, b)| a * b)
            .sum();
        let b1: f64 = self
            .u1
            .coords
            .iter()
            .zip(&x.lift.coords)
            .map(|(a, b)| a * b)
            .sum();
        let b2: f64 = self
            .u2
            .coords
            .iter()
            .zip(&x.lift.coords)
            .map(|(a, b)| a * b)
            .sum();
        let det = g11 * g22 - g12 * g12;
        let a = (b1 * g22 - b2 * g12) / det;
        let c = (b2 * g11 - b1 * g12) / det;
        let res: f64 = self
            .u1
            .coords
            .iter()
            .zip(&self.u2.coords)
            .zip(&x.lift.coords)
            .map(|((u1, u2), x)| {
                let d = x - a * u1 - c * u2;
                d * d
            })
            .sum();
        res.sqrt() < 1e-8
    }
}

/// A Möbius hyperplane `H = {x : b(u,x) = 0}` of the projective model.
#[derive(Debug, Clone)]
pub struct MobiusHyperplane {
    pub normal: SpaceVec,
}

impl MobiusHyperplane {
    pub fn new(normal: SpaceVec) -> Result<Self> {
        if normal.euclid_norm() < 1e-14 {
            return Err(Error::Degenerate("zero hyperplane normal".into()));
        }
        Ok(MobiusHyperplane { normal })
    }

    pub fn contains_lift(&self, x: &SpaceVec) -> bool {
        let s = self.normal.space;
        s.beta(&self.normal.coords, &x.coords).abs()
            <= INCIDENCE_TOL * self.normal.euclid_norm() * x.euclid_norm()
    }
}

/// A stereographic chart of `Ein^{p,q}`: the complement of the lightcone of
/// the pole, identified with `R^{p,q}`.
#[derive(Debug, Clone)]
pub struct StereoChart {
    /// Pole lift `v` (isotropic).
    pub pole: SpaceVec,
    /// Isotropic partner `w`, `b(v,w) = 1`.
    pub partner: SpaceVec,
    /// `b`-orthonormal frame of `span(v,w)^perp`, negative directions first.
    pub frame: Vec<SpaceVec>,
    /// The chart space `R^{p,q}`.
    pub chart_space: QuadraticSpace,
}

impl StereoChart {
    /// The canonical chart of `Ein^{p,q}` in `R^{p+1,q+1}` with
    /// `v = e_0 + e_{last}`, `w = (-e_0 + e_{last})/2`, frame `e_1..e_{p+q}`.
    pub fn canonical(p: usize, q: usize) -> Result<Self> {
        let ambient = QuadraticSpace::new(p + 1, q + 1)?;
        let n = ambient.dim();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        v[n - 1] = 1.0;
        let mut w = vec![0.0; n];
        w[0] = -0.5;
        w[n - 1] = 0.5;
        let frame = (1..=p + q).map(|i| ambient.basis(i)).collect();
        Ok(StereoChart {
            pole: SpaceVec::new(ambient, v)?,
            partner: SpaceVec::new(ambient, w)?,
            frame,
            chart_space: QuadraticSpace::new(p, q)?,
        })
    }

    /// Build a chart from an arbitrary pole, using `isotropic_partner`.
    pub fn from_pole(pole: &EinPoint) -> Result<Self> {
        let (w, mut basis) = isotropic_partner(&pole.lift)?;
        // Negative directions first in the chart frame.
        basis.sort_by(|a, b| {
            let qa = a.space.quad(&a.coords);
            let qb = b.space.quad(&b.coords);
            qa.partial_cmp(&qb).unwrap()
        });
        let p = basis
            .iter()
            .filter(|e| e.space.quad(&e.coords) < 0.0)
            .count();
        let q = basis.len() - p;
        Ok(StereoChart {
            pole: pole.lift.clone(),
            partner: w,
            frame: basis,
            chart_space: QuadraticSpace::new(p, q)?,
        })
    }

    pub fn ambient(&self) -> QuadraticSpace {
        self.pole.space
    }

    /// Canonical (un-normalized, sign-consistent) chart lift
    /// `w + h - (b(h,h)/2) v`.  Its `b`-pairing with the pole is exactly 1.
    pub fn lift(&self, h: &[f64]) -> SpaceVec {
        let bhh = self.chart_space.quad(h);
        let mut coords = self.partner.coords.clone();
        for (hi, f) in h.iter().zip(&self.frame) {
            for (c, fc) in coords.iter_mut().zip(&f.coords) {
                *c += hi * fc;
            }
        }
        for (c, vc) in coords.iter_mut().zip(&self.pole.coords) {
            *c -= 0.5 * bhh * vc;
        }
        SpaceVec {
            space: self.ambient(),
            coords,
        }
    }
}

/// Embed a chart point into the Einstein universe.
pub fn stereo_embed(chart: &StereoChart, h: &[f64]) -> Result<EinPoint> {
    if h.len() != chart.chart_space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "chart point has {} coordinates, chart is {}-dimensional",
            h.len(),
            chart.chart_space.dim()
        )));
    }
    EinPoint::new(chart.lift(h))
}

/// Inverse of [`stereo_embed`]; `None` exactly when the point lies on the
/// lightcone of the pole (`b(lift, v) = 0`).
pub fn stereo_project(chart: &StereoChart, x: &EinPoint) -> Option<Vec<f64>> {
    let amb = chart.ambient();
    let c = amb.beta(&x.lift.coords, &chart.pole.coords);
    if c.abs() <= INCIDENCE_TOL * x.lift.euclid_norm() * chart.pole.euclid_norm() {
        return None;
    }
    let scaled: Vec<f64> = x.lift.coords.iter().map(|v| v / c).collect();
    Some(
        chart
            .frame
            .iter()
            .map(|f| {
                let s = amb.quad(&f.coords); // +-1
                amb.beta(&scaled, &f.coords) / s
            })
            .collect(),
    )
}

/// The double-cover projection `S^p x S^q -> Ein^{p,q}`: a pair of unit
/// vectors maps to the isotropic line through `(x_p, x_q)`.
pub fn double_cover_point(x_p: &[f64], x_q: &[f64]) -> Result<EinPoint> {
    let np: f64 = x_p.iter().map(|c| c * c).sum::<f64>().sqrt();
    let nq: f64 = x_q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (np - 1.0).abs() > 1e-9 || (nq - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(
            "double_cover_point requires unit vectors".into(),
        ));
    }
    let space = QuadraticSpace::new(x_p.len(), x_q.len())?;
    let mut coords = x_p.to_vec();
    coords.extend_from_slice(x_q);
    EinPoint::new(SpaceVec::new(space, coords)?)
}

/// The photon through two distinct incident points; `None` when the lifts are
/// not `b`-orthogonal (no photon joins them).
pub fn photon_through(a: &EinPoint, b: &EinPoint) -> Result<Option<Photon>> {
    if a.approx_eq(b, 1e-12) {
        return Err(Error::InvalidArgument(
            "photon_through requires distinct points".into(),
        ));
    }
    let s = a.ambient();
    let pairing = s.beta(&a.lift.coords, &b.lift.coords);
    if pairing.abs() > INCIDENCE_TOL {
        return Ok(None);
    }
    Ok(Some(Photon::new(a.lift.clone(), b.lift.clone())?))
}

/// Chart trace of a Möbius hyperplane.
#[derive(Debug, Clone)]
pub enum MobiusTrace {
    /// `{h : normal . h = offset}` with a Euclidean unit normal.
    AffineHyperplane { normal: Vec<f64>, offset: f64 },
    /// `{h : b(h - center, h - center) = radius_sq}`; `sign` is the sign of
    /// `b(u,u)` (so of `radius_sq`): -1 hyperboloid of timelike normal type,
    /// 0 a lightcone, +1 the other hyperboloid family.
    Quadric {
        center: Vec<f64>,
        sign: i8,
        radius_sq: f64,
    },
    /// The hyperplane coincides with the polar hyperplane of the pole; its
    /// trace is the (empty) chart trace of the pole cone.
    PoleCone,
}

/// Classify the chart trace of `H = {b(u,.) = 0}`: an affine hyperplane iff
/// the pole lies on `H`, otherwise a quadric centered by completing the
/// square, with sign given by `b(u,u)`.
pub fn mobius_trace_classify(h: &MobiusHyperplane, chart: &StereoChart) -> MobiusTrace {
    let amb = chart.ambient();
    let u = &h.normal;
    let scale = u.euclid_norm();
    let c = amb.beta(&u.coords, &chart.pole.coords);
    let a = amb.beta(&u.coords, &chart.partner.coords);
    let beta: Vec<f64> = chart
        .frame
        .iter()
        .map(|f| amb.beta(&u.coords, &f.coords))
        .collect();
    let beta_norm: f64 = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
    let tol = INCIDENCE_TOL * scale;
    if c.abs() <= tol {
        if beta_norm <= tol {
            return MobiusTrace::PoleCone;
        }
        // b(u, lift(h)) = a + sum_i beta_i h_i = 0.
        return MobiusTrace::AffineHyperplane {
            normal: beta.iter().map(|b| b / beta_norm).collect(),
            offset: -a / beta_norm,
        };
    }
    let cs = chart.chart_space;
    let center: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(i, b)| cs.basis_sign(i) * b / c)
        .collect();
    let buu = amb.quad(&u.coords);
    let radius_sq = buu / (c * c);
    let sign = if buu.abs() <= 1e-10 * scale * scale {
        0
    } else if buu > 0.0 {
        1
    } else {
        -1
    };
    MobiusTrace::Quadric {
        center,
        sign,
        radius_sq,
    }
}

/// Intersection pattern of a photon with a Möbius hyperplane.
#[derive(Debug, Clone)]
pub enum PhotonMeet {
    Contained,
    TransversePoint(EinPoint),
}

/// A photon either lies inside a Möbius hyperplane or meets it transversely
/// at the single point `P(Pi ∩ H)`.
pub fn photon_hyperplane_meet(photon: &Photon, h: &MobiusHyperplane) -> Result<PhotonMeet> {
    let amb = photon.u1.space;
    let scale = h.normal.euclid_norm();
    let c1 = amb.beta(&h.normal.coords, &photon.u1.coords) / (scale * photon.u1.euclid_norm());
    let c2 = amb.beta(&h.normal.coords, &photon.u2.coords) / (scale * photon.u2.euclid_norm());
    if c1.abs() <= INCIDENCE_TOL && c2.abs() <= INCIDENCE_TOL {
        return Ok(PhotonMeet::Contained);
    }
    // b(u, c2' u1 - c1' u2) = 0 with the normalized coefficients.
    let a1 = c2 / photon.u1.euclid_norm();
    let a2 = c1 / photon.u2.euclid_norm();
    let coords: Vec<f64> = photon
        .u1
        .coords
        .iter()
        .zip(&photon.u2.coords)
        .map(|(x1, x2)| a1 * x1 - a2 * x2)
        .collect();
    Ok(PhotonMeet::TransversePoint(EinPoint::new(SpaceVec::new(
        amb, coords,
    )?)?))
}

// ---------------------------------------------------------------------------
// Universal cover of Ein^{1,n}: the cylinder R x S^n, n >= 2.
// ---------------------------------------------------------------------------

/// A point `(t, x)` of the cylinder `R x S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPoint {
    pub t: f64,
    pub x: Vec<f64>,
}

impl CylinderPoint {
    /// The cover is `R x S^n` only for `n >= 2`, so `x` must live in
    /// `R^{n+1}` with `n + 1 >= 3`.
    pub fn new(t: f64, x: Vec<f64>) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::InvalidArgument(
                "cylinder points require n >= 2 (x in R^{n+1}, n+1 >= 3)".into(),
            ));
        }
        let norm: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "cylinder sphere component must be unit: |x| = {norm}"
            )));
        }
        Ok(CylinderPoint { t, x })
    }
}

fn sphere_dist(x: &[f64], y: &[f64]) -> f64 {
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    dot.clamp(-1.0, 1.0).acos()
}

/// Causal order of the cylinder: `(s,x) <= (t,y)` iff `d(x,y) <= t - s`.
pub fn cyl_causal_leq(a: &CylinderPoint, b: &CylinderPoint) -> bool {
    sphere_dist(&a.x, &b.x) <= b.t - a.t + 1e-12
}

/// The deck transformation power `sigma^k (t,x) = (t + k pi, (-1)^k x)`.
pub fn cyl_sigma(a: &CylinderPoint, k: i64) -> CylinderPoint {
    let flip = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    CylinderPoint {
        t: a.t + (k as f64) * std::f64::consts::PI,
        x: a.x.iter().map(|c| flip * c).collect(),
    }
}

/// Lightcone membership on the cylinder: `|t - s| = d(x,y) mod 2 pi`.
pub fn cyl_lightcone_contains(p: &CylinderPoint, q: &CylinderPoint) -> bool {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = ((q.t - p.t).abs() - sphere_dist(&p.x, &q.x)).rem_euclid(two_pi);
    r.min(two_pi - r) <= 1e-9
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    fn rand_chart_point<R: Rng>(chart: &StereoChart, rng: &mut R) -> Vec<f64> {
        (0..chart.chart_space.dim())
            .map(|_| rng.random_range(-1.5..1.5))
            .collect()
    }

    #[test]
    fn embed_origin_is_partner() {
        let chart = StereoChart::canonical(1, 2).unwrap();
        let x = stereo_embed(&chart, &[0.0, 0.0, 0.0]).unwrap();
        let w = EinPoint::new(chart.partner.clone()).unwrap();
        assert!(x.approx_eq(&w, 1e-12));
    }

    #[test]
    fn canonical_lift_pairs_to_one_and_is_isotropic() {
        let chart = StereoChart::canonical(2, 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let amb = chart.ambient();
        for _ in 0..100 {
            let h = rand_chart_point(&chart, &mut rng);
            let lift = chart.lift(&h);
            assert!((amb.beta(&lift.coords, &chart.pole.coords) - 1.0).abs() < 1e-12);
            assert!(amb.quad(&lift.coords).abs() < 1e-10 * lift.euclid_norm_sq());
        }
    }

    #[test]
    fn round_trip_project_embed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for &(p, q) in &[(1usize, 1usize), (1, 2), (2, 2)] {
            let chart = StereoChart::canonical(p, q).unwrap();
            for _ in 0..100 {
                let h = rand_chart_point(&chart, &mut rng);
                let x = stereo_embed(&chart, &h).unwrap();
                let back = stereo_project(&chart, &x).unwrap();
                for (a, b) in h.iter().zip(&back) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pole_projects_to_none() {
        let chart = StereoChart::canonical(1, 2).unwrap();
        let pole = EinPoint::new(chart.pole.clone()).unwrap();
        assert!(stereo_project(&chart, &pole).is_none());
    }

    #[test]
    fn photon_through_pole_escapes_chart() {
        // A point on a photon through the pole pairs to 0 with the pole lift.
        let chart = StereoChart::canonical(1, 2).unwrap();
        let amb = chart.ambient();
        // v = e0 + e3_last; pick another isotropic lift orthogonal to v:
        // u = e1 + e2 (signs: -,+) has b(u,u)=0, b(u,v)=0.
        let u = SpaceVec::new(amb, vec![0.0, 1.0, 1.0, 0.0, 0.0]).unwrap();
        let x = EinPoint::new(u).unwrap();
        let pole = EinPoint::new(chart.pole.clone()).unwrap();
        let ph = photon_through(&pole, &x).unwrap().unwrap();
        assert!(ph.contains(&pole) && ph.contains(&x));
        assert!(stereo_project(&chart, &x).is_none());
    }

    #[test]
    fn double_cover_identifies_antipodes() {
        let a = double_cover_point(&[1.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        let b = double_cover_point(&[-1.0, 0.0], &[0.0, -1.0, 0.0]).unwrap();
        assert!(a.approx_eq(&b, 1e-12));
        let amb = a.ambient();
        assert!(amb.quad(&a.lift.coords).abs() < 1e-12);
    }

    #[test]
    fn photon_pairing_obstruction() {
        let chart = StereoChart::canonical(1, 1).unwrap();
        let a = stereo_embed(&chart, &[0.0, 0.0]).unwrap();
        // Chart null direction (1,1): embeds of points on this line are
        // mutually incident.
        let b = stereo_embed(&chart, &[1.0, 1.0]).unwrap();
        let c = stereo_embed(&chart, &[1.0, 0.0]).unwrap();
        assert!(photon_through(&a, &b).unwrap().is_some());
        assert!(photon_through(&a, &c).unwrap().is_none());
        assert!(photon_through(&a, &a.clone()).is_err());
    }

    #[test]
    fn photon_trace_is_affine_null_line() {
        // The chart trace of a photon avoiding the pole cone is an affine
        // lightlike line.
        let chart = StereoChart::canonical(1, 2).unwrap();
        let base = [0.3, -0.2, 0.5];
        let dir = [1.0, 0.6, 0.8]; // b = -1 + .36 + .64 = 0
        assert!(chart.chart_space.quad(&dir).abs() < 1e-12);
        let a = stereo_embed(&chart, &base).unwrap();
        let b_pt: Vec<f64> = base.iter().zip(&dir).map(|(x, d)| x + d).collect();
        let b = stereo_embed(&chart, &b_pt).unwrap();
        let ph = photon_through(&a, &b).unwrap().unwrap();
        // Sample points of the photon plane and check they project onto the
        // affine line (or escape the chart).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let s: f64 = rng.random_range(-2.0..2.0);
            let t: f64 = rng.random_range(-2.0..2.0);
            let coords: Vec<f64> = ph
                .u1
                .coords
                .iter()
                .zip(&ph.u2.coords)
                .map(|(x1, x2)| s * x1 + t * x2)
                .collect();
            let v = SpaceVec::new(chart.ambient(), coords).unwrap();
            if v.euclid_norm() < 1e-3 {
                continue;
            }
            let pt = EinPoint::new(v).unwrap();
            if let Some(h) = stereo_project(&chart, &pt) {
                // h = base + tau * dir for some tau: check collinearity.
                let tau = (h[0] - base[0]) / dir[0];
                for i in 0..3 {
                    assert!((h[i] - base[i] - tau * dir[i]).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn trace_classification() {
        let chart = StereoChart::canonical(1, 2).unwrap();
        let amb = chart.ambient();
        // u = pole => PoleCone.
        let h = MobiusHyperplane::new(chart.pole.clone()).unwrap();
        assert!(matches!(
            mobius_trace_classify(&h, &chart),
            MobiusTrace::PoleCone
        ));
        // b(u, v) = 0 but u not collinear with v => affine hyperplane.
        let u = SpaceVec::new(amb, vec![0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let h = MobiusHyperplane::new(u).unwrap();
        match mobius_trace_classify(&h, &chart) {
            MobiusTrace::AffineHyperplane { normal, offset } => {
                assert!((normal[0].abs() - 1.0).abs() < 1e-12);
                assert!(offset.abs() < 1e-12);
            }
            other => panic!("expected affine hyperplane, got {other:?}"),
        }
        // Isotropic u with b(u,v) != 0 => lightcone trace (sign 0).
        let u = SpaceVec::new(amb, vec![1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(amb.quad(&u.coords).abs() < 1e-12);
        let h = MobiusHyperplane::new(u).unwrap();
        match mobius_trace_classify(&h, &chart) {
            MobiusTrace::Quadric { sign, .. } => assert_eq!(sign, 0),
            other => panic!("expected quadric, got {other:?}"),
        }
    }

    #[test]
    fn trace_quadric_matches_membership() {
        // Points on the classified quadric embed into H and vice versa.
        let chart = StereoChart::canonical(1, 1).unwrap();
        let amb = chart.ambient();
        let u = SpaceVec::new(amb, vec![0.3, 0.2, -0.4, 1.0]).unwrap();
        let h = MobiusHyperplane::new(u.clone()).unwrap();
        if let MobiusTrace::Quadric {
            center, radius_sq, ..
        } = mobius_trace_classify(&h, &chart)
        {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
            for _ in 0..200 {
                let pt = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let shifted: Vec<f64> = pt.iter().zip(&center).map(|(a, c)| a - c).collect();
                let lhs = chart.chart_space.quad(&shifted) - radius_sq;
                let lift = chart.lift(&pt);
                let pairing = amb.beta(&u.coords, &lift.coords);
                // Same zero set: the two functions vanish together.
                assert!((lhs.abs() < 1e-9) == (pairing.abs() < 1e-9 * 0.5 * 2.0));
            }
        } else {
            panic!("expected a quadric trace");
        }
    }

    #[test]
    fn photon_meets_hyperplane() {
        let chart = StereoChart::canonical(1, 2).unwrap();
        let amb = chart.ambient();
        let a = stereo_embed(&chart, &[0.0, 0.0, 0.0]).unwrap();
        let b = stereo_embed(&chart, &[1.0, 1.0, 0.0]).unwrap();
        let ph = photon_through(&a, &b).unwrap().unwrap();
        // Generic hyperplane: transverse point.
        let u = SpaceVec::new(amb, vec![0.1, 0.7, -0.3, 0.2, 0.9]).unwrap();
        let h = MobiusHyperplane::new(u).unwrap();
        match photon_hyperplane_meet(&ph, &h).unwrap() {
            PhotonMeet::TransversePoint(pt) => {
                assert!(h.contains_lift(&pt.lift));
                assert!(ph.contains(&pt));
            }
            PhotonMeet::Contained => panic!("expected transverse intersection"),
        }
        // Hyperplane containing both span lifts: contained.
        // Find u0 orthogonal to both lifts by solving a small system: take
        // u0 = lift(a) (isotropic, b(lift_a, lift_a) = 0 and b(lift_a, lift_b) = 0).
        let h2 = MobiusHyperplane::new(a.lift.clone()).unwrap();
        assert!(matches!(
            photon_hyperplane_meet(&ph, &h2).unwrap(),
            PhotonMeet::Contained
        ));
    }

    #[test]
    fn chart_embedding_is_conformal() {
        // Finite-difference tangent maps of the normalized lift pull b back
        // to a positive multiple of the chart form.
        let chart = StereoChart::canonical(1, 2).unwrap();
        let amb = chart.ambient();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let eps = 1e-6;
        for _ in 0..20 {
            let h = rand_chart_point(&chart, &mut rng);
            let base = stereo_embed(&chart, &h).unwrap();
            // Consistent local section: flip normalized lifts to pair
            // positively with the base lift.
            let section = |pt: &[f64]| -> Vec<f64> {
                let e = stereo_embed(&chart, pt).unwrap();
                let dot: f64 = e
                    .lift
                    .coords
                    .iter()
                    .zip(&base.lift.coords)
                    .map(|(a, b)| a * b)
                    .sum();
                let s = if dot < 0.0 { -1.0 } else { 1.0 };
                e.lift.coords.iter().map(|c| s * c).collect()
            };
            let f0 = section(&h);
            let mut tangents = Vec::new();
            for i in 0..3 {
                let mut hp = h.clone();
                hp[i] += eps;
                let fi = section(&hp);
                tangents.push(
                    fi.iter()
                        .zip(&f0)
                        .map(|(a, b)| (a - b) / eps)
                        .collect::<Vec<f64>>(),
                );
            }
            let g00 = amb.beta(&tangents[0], &tangents[0]);
            let lambda = -g00; // chart sign of direction 0 is -1
            assert!(lambda > 0.0);
            for i in 0..3 {
                for j in 0..3 {
                    let gij = amb.beta(&tangents[i], &tangents[j]);
                    let expected = if i == j {
                        lambda * chart.chart_space.basis_sign(i)
                    } else {
                        0.0
                    };
                    assert!(
                        (gij - expected).abs() < 1e-4 * lambda.max(1.0),
                        "conformality violated: g[{i}][{j}] = {gij}, expected {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn cylinder_causal_order() {
        let x = vec![1.0, 0.0, 0.0];
        let mx = vec![-1.0, 0.0, 0.0];
        let a = CylinderPoint::new(0.0, x.clone()).unwrap();
        assert!(cyl_causal_leq(&a, &a));
        let b = CylinderPoint::new(PI, mx).unwrap();
        assert!(cyl_causal_leq(&a, &b));
        let y = vec![-0.416146836547142, 0.909297426825682, 0.0]; // angle 2 from x
        let c = CylinderPoint::new(1.0, y).unwrap();
        assert!(!cyl_causal_leq(&a, &c));
    }

    #[test]
    fn cylinder_partial_order_properties() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let rand_pt = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n: f64 = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            x.iter_mut().for_each(|c| *c /= n);
            CylinderPoint::new(rng.random_range(-3.0..3.0), x).unwrap()
        };
        for _ in 0..300 {
            let (a, b, c) = (rand_pt(&mut rng), rand_pt(&mut rng), rand_pt(&mut rng));
            if cyl_causal_leq(&a, &b) && cyl_causal_leq(&b, &c) {
                assert!(cyl_causal_leq(&a, &c), "transitivity");
            }
            if cyl_causal_leq(&a, &b) && cyl_causal_leq(&b, &a) {
                assert!((a.t - b.t).abs() < 1e-9 && sphere_dist(&a.x, &b.x) < 1e-6);
            }
        }
    }

    #[test]
    fn sigma_and_lightcone() {
        let x = vec![0.0, 1.0, 0.0];
        let p = CylinderPoint::new(0.3, x).unwrap();
        let s0 = cyl_sigma(&p, 0);
        assert_eq!(s0, p);
        let s1 = cyl_sigma(&p, 1);
        assert!((s1.t - (0.3 + PI)).abs() < 1e-12 && s1.x[1] == -1.0);
        let s2 = cyl_sigma(&p, 2);
        assert!((s2.t - (0.3 + 2.0 * PI)).abs() < 1e-12 && s2.x[1] == 1.0);
        let back = cyl_sigma(&cyl_sigma(&p, 3), -3);
        assert!((back.t - p.t).abs() < 1e-12 && back.x == p.x);
        assert!(cyl_lightcone_contains(&p, &p));
        assert!(cyl_lightcone_contains(&p, &s1));
        // Strictly inside E(p): |dt| < d.
        let y = vec![(0.5f64).cos(), (0.5f64).sin() * 0.0, (0.5f64).sin()];
        let ny: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        let y: Vec<f64> = y.iter().map(|c| c / ny).collect();
        let q = CylinderPoint::new(p.t + 0.1, y.clone()).unwrap();
        assert!(!cyl_lightcone_contains(&p, &q));
    }

    #[test]
    fn cone_complement_decomposes_into_sheets() {
        // Every point off C(p) lies in exactly one sheet E(sigma^k(p)).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let x = vec![1.0, 0.0, 0.0];
        let p = CylinderPoint::new(0.0, x).unwrap();
        for _ in 0..300 {
            let mut y: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n: f64 = y.iter().map(|c| c * c).sum::<f64>().sqrt();
            if n < 1e-3 {
                continue;
            }
            y.iter_mut().for_each(|c| *c /= n);
            let t = rng.random_range(-6.0..6.0);
            let q = CylinderPoint::new(t, y).unwrap();
            if cyl_lightcone_contains(&p, &q) {
                continue;
            }
            let mut count = 0;
            for k in -4..=4 {
                let pk = cyl_sigma(&p, k);
                // E(pk) = {(t,y) : |t - t_k| < d(x_k, y)}.
                if (q.t - pk.t).abs() < sphere_dist(&pk.x, &q.x) {
                    count += 1;
                }
            }
            assert_eq!(count, 1, "point must lie in exactly one sheet");
        }
    }
}
