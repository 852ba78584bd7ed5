//! Exact primitives on the extended plane and the Poincaré disk.
//!
//! All hyperbolic quantities use the curvature −4 normalization
//! `ρ(z, w) = ½·log((1 + t)/(1 − t))`, `t = |(z − w)/(1 − z·w̄)|`, so the
//! disk density is `1/(1 − |z|²)`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance below which a Möbius determinant counts as zero.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Post-normalization threshold for treating a coefficient as zero.
pub const COEFF_ZERO_TOL: f64 = 1e-12;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    Infinity,
}

impl ComplexPoint {
    /// Finite point; panics on non-finite coordinates.
    pub fn new(re: f64, im: f64) -> Self {
        assert!(
            re.is_finite() && im.is_finite(),
            "finite point with NaN/inf coordinate"
        );
        ComplexPoint::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ComplexPoint::Finite(z) => Some(z),
            ComplexPoint::Infinity => None,
        }
    }

    /// Spherical-free comparison: both infinite, or both finite and within `tol`.
    pub fn approx_eq(&self, other: &ComplexPoint, tol: f64) -> bool {
        match (self, other) {
            (ComplexPoint::Infinity, ComplexPoint::Infinity) => true,
            (ComplexPoint::Finite(a), ComplexPoint::Finite(b)) => (a - b).norm() <= tol,
            _ => false,
        }
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::Finite(z)
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexPoint::Finite(z) => write!(f, "{},{}", z.re, z.im),
            ComplexPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad − bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPointSet {
    Identity,
    One(ComplexPoint),
    Two(ComplexPoint, ComplexPoint),
}

impl FixedPointSet {
    /// Number of fixed points, `None` for the identity.
    pub fn cardinality(&self) -> Option<usize> {
        match self {
            FixedPointSet::Identity => None,
            FixedPointSet::One(_) => Some(1),
            FixedPointSet::Two(..) => Some(2),
        }
    }

    pub fn points(&self) -> Vec<ComplexPoint> {
        match *self {
            FixedPointSet::Identity => Vec::new(),
            FixedPointSet::One(p) => vec![p],
            FixedPointSet::Two(p, q) => vec![p, q],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MobiusClass {
    Identity,
    Parabolic,
    Elliptic,
    Hyperbolic,
    Loxodromic,
}

impl MobiusMap {
    /// Builds and normalizes a map; rejects `|ad − bc| < 1e−12·max|coef|²`.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let det = a * d - b * c;
        if !(det.norm() >= DEGENERACY_TOL * scale * scale) || scale == 0.0 {
            return Err(Error::DegenerateMap { det: det.norm() });
        }
        let s = det.sqrt();
        let mut m = MobiusMap {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        };
        m.canonicalize_sign();
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        MobiusMap {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn translation(t: Complex64) -> Self {
        Self::new(
            Complex64::new(1.0, 0.0),
            t,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
        .expect("translations are nondegenerate")
    }

    /// `z ↦ k·z`, `k ≠ 0`.
    pub fn scaling(k: Complex64) -> Result<Self> {
        Self::new(
            k,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        )
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn canonicalize_sign(&mut self) {
        let coeffs = [self.a, self.b, self.c, self.d];
        let scale = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lead = coeffs
            .iter()
            .find(|z| z.norm() > COEFF_ZERO_TOL * scale)
            .copied()
            .unwrap_or(self.a);
        let flip = if lead.re != 0.0 {
            lead.re < 0.0
        } else {
            lead.im < 0.0
        };
        if flip {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c;
            self.d = -self.d;
        }
    }

    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        match z {
            ComplexPoint::Infinity => {
                if self.c == Complex64::new(0.0, 0.0) {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::Finite(self.a / self.c)
                }
            }
            ComplexPoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Finite-only evaluation; maps the pole to a non-finite value.
    pub fn apply_finite(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        Complex64::new(1.0, 0.0) / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        MobiusMap::new(a, b, c, d).expect("product of unimodular matrices is unimodular")
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(self.d, -self.b, -self.c, self.a).expect("inverse of a unimodular matrix")
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Coefficient-level identity test (up to the normalization sign).
    pub fn is_identity(&self, tol: f64) -> bool {
        self.b.norm() <= tol && self.c.norm() <= tol && (self.a - self.d).norm() <= tol
    }

    /// Roots of `cz² + (d − a)z − b = 0` on the Riemann sphere.
    pub fn fixed_points(&self) -> FixedPointSet {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let zero = Complex64::new(0.0, 0.0);
        if c.norm() <= COEFF_ZERO_TOL {
            // Affine: (a − d)z = −b, plus the point at infinity.
            let diff = a - d;
            if diff.norm() <= COEFF_ZERO_TOL {
                if b.norm() <= COEFF_ZERO_TOL {
                    return FixedPointSet::Identity;
                }
                return FixedPointSet::One(ComplexPoint::Infinity);
            }
            return FixedPointSet::Two(ComplexPoint::Finite(b / (d - a)), ComplexPoint::Infinity);
        }
        let qa = c;
        let qb = d - a;
        let qc = -b;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc.norm() <= COEFF_ZERO_TOL {
            return FixedPointSet::One(ComplexPoint::Finite(-qb / (2.0 * qa)));
        }
        let mut s = disc.sqrt();
        // Pick the root of the discriminant aligned with qb to avoid cancellation.
        if (qb.conj() * s).re < 0.0 {
            s = -s;
        }
        let q = -0.5 * (qb + s);
        let r1 = q / qa;
        let r2 = if q == zero { -qb / qa } else { qc / q };
        FixedPointSet::Two(ComplexPoint::Finite(r1), ComplexPoint::Finite(r2))
    }

    pub fn classify(&self) -> MobiusClass {
        let tr = self.trace();
        let tr2 = tr * tr;
        let eps = 1e-12;
        if (tr2 - Complex64::new(4.0, 0.0)).norm() <= eps {
            if self.is_identity(COEFF_ZERO_TOL) {
                MobiusClass::Identity
            } else {
                MobiusClass::Parabolic
            }
        } else if tr2.im.abs() <= eps && tr2.re >= -eps && tr2.re < 4.0 {
            MobiusClass::Elliptic
        } else if tr2.im.abs() <= eps && tr2.re > 4.0 {
            MobiusClass::Hyperbolic
        } else {
            MobiusClass::Loxodromic
        }
    }

    /// Returns whether the map is the identity, given three distinct points
    /// it is claimed to fix. A non-identity Möbius map has at most two fixed
    /// points, so three verified fixed points with non-identity coefficients
    /// is reported as [`Error::Inconsistent`].
    pub fn is_identity_given_three_fixed(
        &self,
        points: [ComplexPoint; 3],
        tol: f64,
    ) -> Result<bool> {
        for i in 0..3 {
            for j in (i + 1)..3 {
                if points[i].approx_eq(&points[j], 0.0) {
                    return Err(Error::Precondition(format!(
                        "fixed points must be pairwise distinct ({} repeated)",
                        points[i]
                    )));
                }
            }
        }
        for p in points {
            if !self.apply(p).approx_eq(&p, tol) {
                return Err(Error::NotFixed(p));
            }
        }
        if self.is_identity(tol.max(COEFF_ZERO_TOL)) {
            Ok(true)
        } else {
            Err(Error::Inconsistent(format!(
                "three fixed points verified but coefficients {:?} are not the identity",
                self.coefficients()
            )))
        }
    }
}

fn check_disk(z: Complex64, what: &str) -> Result<()> {
    if z.norm_sqr() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!(
            "{what} {z} is not inside the unit disk"
        )))
    }
}

/// Poincaré distance on the unit disk (curvature −4).
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    check_disk(z, "point")?;
    check_disk(w, "point")?;
    // Canonical argument order makes the result bit-for-bit symmetric.
    let (z, w) = if (z.re, z.im) <= (w.re, w.im) {
        (z, w)
    } else {
        (w, z)
    };
    let t = ((z - w) / (Complex64::new(1.0, 0.0) - z * w.conj())).norm();
    Ok(0.5 * ((1.0 + t) / (1.0 - t)).ln())
}

/// `z ↦ e^{iθ}(z − a)/(1 − āz)`.
pub fn disk_automorphism(a: Complex64, theta: f64) -> Result<MobiusMap> {
    check_disk(a, "automorphism center")?;
    let rot = Complex64::from_polar(1.0, theta);
    MobiusMap::new(rot, -rot * a, -a.conj(), Complex64::new(1.0, 0.0))
}

/// Constant-speed geodesic from `z` to `w`, evaluated at `t ∈ [0, 1]`.
/// Coincident endpoints yield `z` for every `t`.
pub fn poincare_geodesic(z: Complex64, w: Complex64, t: f64) -> Result<Complex64> {
    check_disk(z, "endpoint")?;
    check_disk(w, "endpoint")?;
    if z == w {
        return Ok(z);
    }
    let to_origin = disk_automorphism(z, 0.0)?;
    let w0 = to_origin.apply_finite(w);
    let dist = w0.norm().atanh();
    let s = (t * dist).tanh();
    let moved = w0 / w0.norm() * s;
    Ok(to_origin.inverse().apply_finite(moved))
}

/// Euclidean center and radius of the hyperbolic ball `{ρ(center, ·) < R}`.
pub fn poincare_ball_euclidean(center: Complex64, radius: f64) -> Result<(Complex64, f64)> {
    check_disk(center, "ball center")?;
    if !(radius > 0.0) {
        return Err(Error::NonPositive(format!("ball radius {radius}")));
    }
    let s = radius.tanh();
    let c2 = center.norm_sqr();
    let den = 1.0 - s * s * c2;
    Ok((center * ((1.0 - s * s) / den), s * (1.0 - c2) / den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    #[test]
    fn apply_conventions() {
        let id = MobiusMap::identity();
        assert_eq!(id.apply(pt(3.0, 4.0)), pt(3.0, 4.0));
        let recip = MobiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(recip.apply(ComplexPoint::Infinity), pt(0.0, 0.0));
        assert_eq!(recip.apply(pt(0.0, 0.0)), ComplexPoint::Infinity);
        let m = MobiusMap::new(c(1.0, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(1.0, 0.0)).unwrap();
        assert!(m.apply(pt(0.5, 0.0)).approx_eq(&pt(0.0, 0.0), 1e-15));
    }

    #[test]
    fn degenerate_rejected() {
        let err = MobiusMap::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)).unwrap_err();
        assert_eq!(err.name(), "DegenerateMap");
    }

    #[test]
    fn normalization_is_unimodular_and_signed() {
        let m = MobiusMap::new(c(-2.0, 0.0), c(1.0, 1.0), c(0.5, 0.0), c(-3.0, 0.0)).unwrap();
        let [a, b, cc, d] = m.coefficients();
        assert!((a * d - b * cc - 1.0).norm() < 1e-14);
        assert!(a.re >= 0.0);
    }

    #[test]
    fn composition_examples() {
        let m = MobiusMap::new(c(2.0, 1.0), c(0.3, 0.0), c(0.1, -0.2), c(1.0, 0.0)).unwrap();
        assert!(m.compose(&m.inverse()).is_identity(1e-12));
        let t1 = MobiusMap::translation(c(1.0, 0.0));
        let t2 = t1.compose(&t1);
        assert_eq!(t2, MobiusMap::translation(c(2.0, 0.0)));
        let recip = MobiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        // [[0,1],[1,0]]² = I up to the normalization factor i² = −1.
        assert!(recip.compose(&recip).is_identity(1e-15));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(
            MobiusMap::identity().fixed_points(),
            FixedPointSet::Identity
        );
        let t = MobiusMap::translation(c(1.0, 0.0));
        assert_eq!(t.fixed_points(), FixedPointSet::One(ComplexPoint::Infinity));
        let recip = MobiusMap::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        match recip.fixed_points() {
            FixedPointSet::Two(p, q) => {
                let mut v = [p.finite().unwrap().re, q.finite().unwrap().re];
                v.sort_by(f64::total_cmp);
                assert!((v[0] + 1.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
            }
            other => panic!("expected two fixed points, got {other:?}"),
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(MobiusMap::identity().classify(), MobiusClass::Identity);
        assert_eq!(
            MobiusMap::translation(c(1.0, 0.0)).classify(),
            MobiusClass::Parabolic
        );
        let dilate = MobiusMap::scaling(c(2.0, 0.0)).unwrap();
        // tr = √2 + 1/√2 = 3/√2, tr² = 4.5.
        assert!((dilate.trace() * dilate.trace() - 4.5).norm() < 1e-14);
        assert_eq!(dilate.classify(), MobiusClass::Hyperbolic);
        let rot = disk_automorphism(c(0.0, 0.0), std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(rot.classify(), MobiusClass::Elliptic);
        assert_eq!(
            MobiusMap::scaling(c(2.0, 1.0)).unwrap().classify(),
            MobiusClass::Loxodromic
        );
    }

    #[test]
    fn three_fixed_points() {
        let id = MobiusMap::identity();
        assert_eq!(
            id.is_identity_given_three_fixed(
                [pt(0.0, 0.0), pt(1.0, 0.0), ComplexPoint::Infinity],
                1e-12
            ),
            Ok(true)
        );
        let rot = MobiusMap::scaling(c(0.0, 1.0)).unwrap();
        let err = rot
            .is_identity_given_three_fixed(
                [pt(0.0, 0.0), ComplexPoint::Infinity, pt(1.0, 0.0)],
                1e-9,
            )
            .unwrap_err();
        assert_eq!(err, Error::NotFixed(pt(1.0, 0.0)));

        let ell = disk_automorphism(c(0.3, -0.2), 1.1).unwrap();
        let third = pt(0.25, 0.6);
        // Oracle: the third point moves.
        assert!(!ell.apply(third).approx_eq(&third, 1e-6));
        let fp = ell.fixed_points().points();
        let err = ell
            .is_identity_given_three_fixed([fp[0], fp[1], third], 1e-9)
            .unwrap_err();
        assert_eq!(err, Error::NotFixed(third));

        let dup =
            id.is_identity_given_three_fixed([pt(0.0, 0.0), pt(0.0, 0.0), pt(1.0, 0.0)], 1e-9);
        assert_eq!(dup.unwrap_err().name(), "Precondition");
    }

    #[test]
    fn poincare_distance_examples() {
        assert_eq!(poincare_distance(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 0.0);
        let half_log3 = 0.5 * 3f64.ln();
        assert!((poincare_distance(c(0.0, 0.0), c(0.5, 0.0)).unwrap() - half_log3).abs() < 1e-15);
        assert!((poincare_distance(c(0.5, 0.0), c(-0.5, 0.0)).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((0.549306144 - half_log3).abs() < 1e-9);
        assert_eq!(
            poincare_distance(c(1.0, 0.0), c(0.0, 0.0))
                .unwrap_err()
                .name(),
            "OutOfDomain"
        );
    }

    #[test]
    fn automorphism_examples() {
        assert!(disk_automorphism(c(0.0, 0.0), 0.0)
            .unwrap()
            .is_identity(1e-15));
        let m = disk_automorphism(c(0.5, 0.0), 0.0).unwrap();
        assert!(m.apply_finite(c(0.5, 0.0)).norm() < 1e-15);
        assert!(disk_automorphism(c(1.5, 0.0), 0.0).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let (z, w) = (c(0.1, 0.2), c(-0.4, 0.5));
        assert!((poincare_geodesic(z, w, 0.0).unwrap() - z).norm() < 1e-14);
        assert!((poincare_geodesic(z, w, 1.0).unwrap() - w).norm() < 1e-14);
        let mid = poincare_geodesic(c(0.0, 0.0), c(0.5, 0.0), 0.5).unwrap();
        let oracle = (0.5 * 0.5f64.atanh()).tanh();
        assert!((mid - c(oracle, 0.0)).norm() < 1e-14);
        assert!((oracle - 0.268).abs() < 1e-3);
        assert!(
            poincare_geodesic(c(-0.5, 0.0), c(0.5, 0.0), 0.5)
                .unwrap()
                .norm()
                < 1e-15
        );
        assert_eq!(poincare_geodesic(z, z, 0.7).unwrap(), z);
    }

    #[test]
    fn geodesic_is_constant_speed_on_circle_arc() {
        let (z, w) = (c(0.3, -0.1), c(-0.2, 0.6));
        let total = poincare_distance(z, w).unwrap();
        // Oracle: circle orthogonal to the unit circle through z and w has
        // center m with |m|² = r² + 1; solve the 2×2 linear system directly.
        let (x1, y1, x2, y2) = (z.re, z.im, w.re, w.im);
        let r1 = (z.norm_sqr() + 1.0) / 2.0;
        let r2 = (w.norm_sqr() + 1.0) / 2.0;
        let det = x1 * y2 - x2 * y1;
        let m = c((r1 * y2 - r2 * y1) / det, (x1 * r2 - x2 * r1) / det);
        let radius = (z - m).norm();
        for k in 1..10 {
            let t = k as f64 / 10.0;
            let g = poincare_geodesic(z, w, t).unwrap();
            assert!((poincare_distance(z, g).unwrap() - t * total).abs() < 1e-12);
            assert!(((g - m).norm() - radius).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_euclidean_examples() {
        let (ctr, rad) = poincare_ball_euclidean(c(0.0, 0.0), 0.5f64.atanh()).unwrap();
        assert!(ctr.norm() < 1e-16 && (rad - 0.5).abs() < 1e-15);
        let (ctr, rad) = poincare_ball_euclidean(c(0.0, 0.0), 1e-9).unwrap();
        assert!(ctr.norm() == 0.0 && rad < 2e-9);

        // Oracle: pull the circle of radius tanh(R) back through the
        // automorphism sending 0.5 to 0 and fit a circle through samples.
        let center = c(0.5, 0.0);
        let (ctr, rad) = poincare_ball_euclidean(center, 0.1).unwrap();
        let back = disk_automorphism(center, 0.0).unwrap().inverse();
        let s = 0.1f64.tanh();
        for k in 0..16 {
            let p = back.apply_finite(Complex64::from_polar(s, k as f64 * 0.39));
            assert!(((p - ctr).norm() - rad).abs() < 1e-14);
            assert!((poincare_distance(center, p).unwrap() - 0.1).abs() < 1e-12);
        }
        assert!(ctr.norm() + rad < 1.0);
        assert!((center - ctr).norm() < rad);
    }

    fn disk_point() -> impl Strategy<Value = Complex64> {
        (0.0..0.95f64, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
    }

    fn coeff() -> impl Strategy<Value = Complex64> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| c(a, b) / 1.5)
    }

    fn mobius() -> impl Strategy<Value = MobiusMap> {
        (coeff(), coeff(), coeff(), coeff())
            .prop_filter_map("degenerate", |(a, b, cc, d)| {
                MobiusMap::new(a, b, cc, d).ok()
            })
            .prop_filter("ill-conditioned", |m| {
                m.coefficients().iter().all(|z| z.norm() < 10.0)
            })
    }

    proptest! {
        #[test]
        fn isometry_invariance(z in disk_point(), w in disk_point(), a in disk_point(), th in 0.0..6.3f64) {
            let a = a * 0.9;
            let phi = disk_automorphism(a, th).unwrap();
            let d0 = poincare_distance(z, w).unwrap();
            let d1 = poincare_distance(phi.apply_finite(z), phi.apply_finite(w)).unwrap();
            prop_assert!((d0 - d1).abs() <= 1e-9 * (1.0 + d0));
        }

        #[test]
        fn metric_axioms(x in disk_point(), y in disk_point(), z in disk_point()) {
            let dxy = poincare_distance(x, y).unwrap();
            prop_assert_eq!(dxy, poincare_distance(y, x).unwrap());
            let dyz = poincare_distance(y, z).unwrap();
            let dxz = poincare_distance(x, z).unwrap();
            prop_assert!(dxz <= dxy + dyz + 1e-9);
        }

        #[test]
        fn fixed_points_are_fixed(m in mobius()) {
            for p in m.fixed_points().points() {
                prop_assert!(m.apply(p).approx_eq(&p, 1e-9), "{:?} moved", p);
            }
        }

        #[test]
        fn non_identity_has_at_most_two_fixed_points(m in mobius()) {
            prop_assume!(!m.is_identity(1e-9));
            let n = m.fixed_points().cardinality();
            prop_assert!(matches!(n, Some(1) | Some(2)));
        }

        #[test]
        fn composition_associative(m1 in mobius(), m2 in mobius(), m3 in mobius(), z in disk_point()) {
            let left = m1.compose(&m2).compose(&m3);
            let right = m1.compose(&m2.compose(&m3));
            let (l, r) = (left.apply(z.into()), right.apply(z.into()));
            if let (Some(l), Some(r)) = (l.finite(), r.finite()) {
                prop_assume!(l.norm() < 1e6);
                prop_assert!((l - r).norm() <= 1e-9 * (1.0 + l.norm()));
            }
        }

        #[test]
        fn compose_matches_sequential_apply(m1 in mobius(), m2 in mobius(), z in disk_point()) {
            let seq = m1.apply(m2.apply(z.into()));
            let comp = m1.compose(&m2).apply(z.into());
            if let (Some(s), Some(c)) = (seq.finite(), comp.finite()) {
                prop_assume!(s.norm() < 1e6);
                prop_assert!((s - c).norm() <= 1e-8 * (1.0 + s.norm()));
            }
        }
    }
}
