//! Signature-(p,q) bilinear forms, causal typing, and isotropic linear algebra.
//!
//! All causal decisions in the engine flow through [`QuadraticSpace`]: the
//! standard flat form `b = -dx_1^2 - ... - dx_p^2 + dx_{p+1}^2 + ...` with the
//! negative directions first.

use crate::{Error, Result};

/// Default relative classification tolerance for causal typing.
pub const EPS_TYPE: f64 = 1e-12;

/// Number of negative (`p`) and positive (`q`) directions of a quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q < 2 {
            return Err(Error::InvalidArgument(format!(
                "signature ({p},{q}) has dimension < 2"
            )));
        }
        Ok(Signature { p, q })
    }

    pub fn dim(&self) -> usize {
        self.p + self.q
    }
}

/// The diagonal quadratic space `R^{p,q}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadraticSpace {
    pub signature: Signature,
}

/// Causal type of a nonzero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalType {
    Timelike,
    Lightlike,
    Spacelike,
}

impl QuadraticSpace {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        Ok(QuadraticSpace {
            signature: Signature::new(p, q)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.signature.dim()
    }

    /// Sign of basis direction `i`: -1 for `i < p`, +1 otherwise.
    pub fn basis_sign(&self, i: usize) -> f64 {
        if i < self.signature.p {
            -1.0
        } else {
            1.0
        }
    }

    /// Evaluate the bilinear form on raw coordinate slices.
    pub fn beta(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim());
        debug_assert_eq!(v.len(), self.dim());
        let p = self.signature.p;
        let mut acc = 0.0;
        for i in 0..u.len() {
            let s = if i < p { -1.0 } else { 1.0 };
            acc += s * u[i] * v[i];
        }
        acc
    }

    /// Quadratic form `b(v,v)` on a raw slice.
    pub fn quad(&self, v: &[f64]) -> f64 {
        self.beta(v, v)
    }

    pub fn vec(&self, coords: Vec<f64>) -> Result<SpaceVec> {
        SpaceVec::new(*self, coords)
    }

    /// Basis vector `i`.
    pub fn basis(&self, i: usize) -> SpaceVec {
        let mut coords = vec![0.0; self.dim()];
        coords[i] = 1.0;
        SpaceVec {
            space: *self,
            coords,
        }
    }
}

/// A vector of a [`QuadraticSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceVec {
    pub space: QuadraticSpace,
    pub coords: Vec<f64>,
}

impl SpaceVec {
    pub fn new(space: QuadraticSpace, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                space.dim(),
                coords.len()
            )));
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        Ok(SpaceVec { space, coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn euclid_norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn euclid_norm(&self) -> f64 {
        self.euclid_norm_sq().sqrt()
    }

    pub fn scale(&self, lambda: f64) -> SpaceVec {
        SpaceVec {
            space: self.space,
            coords: self.coords.iter().map(|c| lambda * c).collect(),
        }
    }

    pub fn add(&self, other: &SpaceVec) -> SpaceVec {
        SpaceVec {
            space: self.space,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SpaceVec) -> SpaceVec {
        SpaceVec {
            space: self.space,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// The bilinear form `b(u,v)` of the common ambient space.
pub fn beta_eval(u: &SpaceVec, v: &SpaceVec) -> Result<f64> {
    if u.space != v.space {
        return Err(Error::DimensionMismatch(
            "vectors belong to different quadratic spaces".into(),
        ));
    }
    Ok(u.space.beta(&u.coords, &v.coords))
}

/// Causal classification of a nonzero vector with relative tolerance
/// `eps_type * ||v||^2_euclid`.
pub fn causal_type_with(v: &SpaceVec, eps_type: f64) -> Result<CausalType> {
    let n2 = v.euclid_norm_sq();
    if n2 == 0.0 {
        return Err(Error::Degenerate("cannot classify the zero vector".into()));
    }
    let b = v.space.quad(&v.coords);
    if b.abs() <= eps_type * n2 {
        Ok(CausalType::Lightlike)
    } else if b < 0.0 {
        Ok(CausalType::Timelike)
    } else {
        Ok(CausalType::Spacelike)
    }
}

/// Causal classification with the default tolerance [`EPS_TYPE`].
pub fn causal_type(v: &SpaceVec) -> Result<CausalType> {
    causal_type_with(v, EPS_TYPE)
}

/// For an isotropic `v`, return an isotropic partner `w` with `b(v,w) = 1`,
/// `b(w,w) = 0`, together with a `b`-orthogonal basis of `span(v,w)^perp`
/// (each basis vector normalized to `b(e,e) = +-1`).
///
/// Construction: split `v = v_- + v_+` into negative/positive blocks; since
/// `v` is isotropic the two blocks have equal Euclidean norm `r > 0` and
/// `w = (-v_- + v_+) / (2 r^2)` satisfies both conditions.  The complement is
/// produced by projecting the standard basis off `span(v,w)` (using the dual
/// pairing of the isotropic pair) and running a pivoted Gram-Schmidt for the
/// indefinite form.
pub fn isotropic_partner(v: &SpaceVec) -> Result<(SpaceVec, Vec<SpaceVec>)> {
    if causal_type(v)? != CausalType::Lightlike {
        return Err(Error::InvalidArgument(
            "isotropic_partner requires an isotropic vector".into(),
        ));
    }
    let space = v.space;
    let p = space.signature.p;
    let n = space.dim();
    let r2: f64 = v.coords[p..].iter().map(|c| c * c).sum();
    if r2 == 0.0 {
        return Err(Error::Degenerate(
            "isotropic vector with vanishing positive block".into(),
        ));
    }
    let mut w_coords = vec![0.0; n];
    for i in 0..n {
        let s = if i < p { -1.0 } else { 1.0 };
        w_coords[i] = s * v.coords[i] / (2.0 * r2);
    }
    let w = SpaceVec::new(space, w_coords)?;
    debug_assert!((space.beta(&v.coords, &w.coords) - 1.0).abs() < 1e-10);

    // Candidates: standard basis minus the span(v,w) component.  Because
    // b(v,w) = 1 and both are isotropic, the b-orthogonal projection onto
    // span(v,w) of x is b(x,w) v + b(x,v) w.
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let bw = space.beta(&e, &w.coords);
        let bv = space.beta(&e, &v.coords);
        for k in 0..n {
            e[k] -= bw * v.coords[k] + bv * w.coords[k];
        }
        candidates.push(e);
    }

    // Pivoted Gram-Schmidt for the indefinite form: repeatedly take the
    // candidate with the largest |b(x,x)| after projecting off the vectors
    // already chosen, then normalize to b = +-1.
    let mut basis: Vec<SpaceVec> = Vec::new();
    while basis.len() + 2 < n {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (i, cand) in candidates.iter().enumerate() {
            let mut x = cand.clone();
            for eb in &basis {
                let s = space.quad(&eb.coords); // +-1 after normalization
                let c = space.beta(&x, &eb.coords) / s;
                for k in 0..n {
                    x[k] -= c * eb.coords[k];
                }
            }
            let q = space.quad(&x).abs();
            if best.as_ref().map(|(_, _, bq)| q > *bq).unwrap_or(true) {
                best = Some((i, x, q));
            }
        }
        let (idx, x, q) = best.expect("candidate list nonempty");
        if q < 1e-12 {
            return Err(Error::Numerical(
                "failed to complete an orthogonal complement basis".into(),
            ));
        }
        candidates.remove(idx);
        let norm = space.quad(&x).abs().sqrt();
        let e = SpaceVec::new(space, x.iter().map(|c| c / norm).collect())?;
        basis.push(e);
    }
    Ok((w, basis))
}

/// Draw a random isotropic vector: unit vectors on both blocks, scaled.
pub fn random_isotropic<R: rand::Rng>(space: QuadraticSpace, rng: &mut R) -> SpaceVec {
    let p = space.signature.p;
    let n = space.dim();
    loop {
        let mut neg: Vec<f64> = (0..p).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut pos: Vec<f64> = (p..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nn: f64 = neg.iter().map(|c| c * c).sum::<f64>().sqrt();
        let np: f64 = pos.iter().map(|c| c * c).sum::<f64>().sqrt();
        if nn < 1e-3 || np < 1e-3 {
            continue;
        }
        neg.iter_mut().for_each(|c| *c /= nn);
        pos.iter_mut().for_each(|c| *c /= np);
        let scale = rng.random_range(0.2..2.0);
        let mut coords = neg;
        coords.extend(pos);
        coords.iter_mut().for_each(|c| *c *= scale);
        return SpaceVec { space, coords };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn r11() -> QuadraticSpace {
        QuadraticSpace::new(1, 1).unwrap()
    }

    fn r12() -> QuadraticSpace {
        QuadraticSpace::new(1, 2).unwrap()
    }

    #[test]
    fn beta_basis_signs() {
        let s = r11();
        let e1 = s.basis(0);
        assert_eq!(beta_eval(&e1, &e1).unwrap(), -1.0);
        let v = s.vec(vec![1.0, 1.0]).unwrap();
        assert_eq!(beta_eval(&v, &v).unwrap(), 0.0);
        let s3 = r12();
        let a = s3.vec(vec![1.0, 1.0, 0.0]).unwrap();
        let b = s3.vec(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(beta_eval(&a, &b).unwrap(), -1.0);
    }

    #[test]
    fn beta_rejects_mismatch() {
        let a = r11().vec(vec![1.0, 0.0]).unwrap();
        let b = r12().vec(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(beta_eval(&a, &b).is_err());
    }

    #[test]
    fn causal_types() {
        let s = r11();
        assert_eq!(
            causal_type(&s.vec(vec![1.0, 0.0]).unwrap()).unwrap(),
            CausalType::Timelike
        );
        assert_eq!(
            causal_type(&s.vec(vec![1.0, 1.0]).unwrap()).unwrap(),
            CausalType::Lightlike
        );
        assert_eq!(
            causal_type(&s.vec(vec![1.0, 2.0]).unwrap()).unwrap(),
            CausalType::Spacelike
        );
        assert!(causal_type(&s.vec(vec![0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn causal_type_scale_invariant() {
        let s = r12();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let v = s
                .vec((0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
                .unwrap();
            if v.euclid_norm() < 1e-6 {
                continue;
            }
            let t = causal_type(&v).unwrap();
            for lambda in [0.5, -3.0, 1e4] {
                assert_eq!(causal_type(&v.scale(lambda)).unwrap(), t);
            }
        }
    }

    #[test]
    fn partner_in_r11() {
        let s = r11();
        let v = s.vec(vec![1.0, 1.0]).unwrap();
        let (w, basis) = isotropic_partner(&v).unwrap();
        assert!((w.coords[0] + 0.5).abs() < 1e-15);
        assert!((w.coords[1] - 0.5).abs() < 1e-15);
        assert!(basis.is_empty());
    }

    #[test]
    fn partner_in_r12() {
        let s = r12();
        let v = s.vec(vec![1.0, 0.0, 1.0]).unwrap();
        let (w, basis) = isotropic_partner(&v).unwrap();
        assert!(beta_eval(&w, &w).unwrap().abs() < 1e-12);
        assert!((beta_eval(&v, &w).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(basis.len(), 1);
        let e = &basis[0];
        assert!((beta_eval(e, e).unwrap() - 1.0).abs() < 1e-12);
        assert!(beta_eval(e, &v).unwrap().abs() < 1e-12);
        assert!(beta_eval(e, &w).unwrap().abs() < 1e-12);
    }

    #[test]
    fn partner_random_postconditions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for &(p, q) in &[(1usize, 1usize), (1, 2), (2, 2), (2, 3)] {
            let s = QuadraticSpace::new(p, q).unwrap();
            for _ in 0..100 {
                let v = random_isotropic(s, &mut rng);
                let (w, basis) = isotropic_partner(&v).unwrap();
                assert!((beta_eval(&v, &w).unwrap() - 1.0).abs() < 1e-10);
                assert!(beta_eval(&w, &w).unwrap().abs() < 1e-10);
                assert_eq!(basis.len(), p + q - 2);
                for (i, a) in basis.iter().enumerate() {
                    assert!(beta_eval(a, &v).unwrap().abs() < 1e-9);
                    assert!(beta_eval(a, &w).unwrap().abs() < 1e-9);
                    assert!((beta_eval(a, a).unwrap().abs() - 1.0).abs() < 1e-9);
                    for b in basis.iter().skip(i + 1) {
                        assert!(beta_eval(a, b).unwrap().abs() < 1e-9);
                    }
                }
                // The complement must have signature (p-1, q-1).
                let negs = basis
                    .iter()
                    .filter(|e| beta_eval(e, e).unwrap() < 0.0)
                    .count();
                assert_eq!(negs, p - 1);
            }
        }
    }

    #[test]
    fn partner_rejects_non_isotropic() {
        let s = r11();
        let v = s.vec(vec![1.0, 0.0]).unwrap();
        assert!(isotropic_partner(&v).is_err());
    }

    #[test]
    fn beta_symmetric_bilinear() {
        let s = QuadraticSpace::new(2, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let rv = |rng: &mut rand_chacha::ChaCha8Rng| {
                s.vec((0..5).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .unwrap()
            };
            let (u, v, w) = (rv(&mut rng), rv(&mut rng), rv(&mut rng));
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let sym = (beta_eval(&u, &v).unwrap() - beta_eval(&v, &u).unwrap()).abs();
            assert!(sym < 1e-14);
            let lin = (beta_eval(&u.scale(a).add(&v.scale(b)), &w).unwrap()
                - a * beta_eval(&u, &w).unwrap()
                - b * beta_eval(&v, &w).unwrap())
            .abs();
            assert!(lin < 1e-13);
        }
    }
}
