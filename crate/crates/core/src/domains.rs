//! The domain catalog (disk, left half-plane, punctured disk, annulus) with
//! covering data, and raster frames shared by every rasterizing operation.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::MobiusMap;
use crate::grid::GridDomain;
use crate::topology::Raster;

/// Relative margin added beyond a domain's bounding circle when framing it.
pub const FRAME_MARGIN: f64 = 0.1;

/// Placement of a `width × height` cell grid in the plane. `origin` is the
/// center of cell `(0, 0)`; row index grows with the imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub origin: Complex64,
    pub spacing: f64,
    pub width: usize,
    pub height: usize,
}

impl Frame {
    /// Square frame `[c − half, c + half]²` of cells centered on `c`.
    pub fn square(center: Complex64, half_extent: f64, spacing: f64) -> Result<Frame> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::Validation(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if !(half_extent > 0.0) {
            return Err(Error::Validation(format!(
                "frame extent must be positive, got {half_extent}"
            )));
        }
        let n = ((2.0 * half_extent / spacing) - 1e-9).ceil().max(3.0) as usize;
        let offset = (n as f64 - 1.0) * spacing / 2.0;
        Ok(Frame {
            origin: center - Complex64::new(offset, offset),
            spacing,
            width: n,
            height: n,
        })
    }

    /// The standard frame `[−1.1, 1.1]²` around the unit disk.
    pub fn unit(spacing: f64) -> Result<Frame> {
        Frame::square(Complex64::new(0.0, 0.0), 1.0 + FRAME_MARGIN, spacing)
    }

    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        self.origin + Complex64::new(i as f64 * self.spacing, j as f64 * self.spacing)
    }

    pub fn center_of_index(&self, idx: usize) -> Complex64 {
        self.center(idx % self.width, idx / self.width)
    }

    /// Cell containing `z`, if inside the frame.
    pub fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let fi = ((z.re - self.origin.re) / self.spacing).round();
        let fj = ((z.im - self.origin.im) / self.spacing).round();
        if fi >= 0.0 && fj >= 0.0 && (fi as usize) < self.width && (fj as usize) < self.height {
            Some((fi as usize, fj as usize))
        } else {
            None
        }
    }

    /// Row-major rasterization of a predicate on cell centers.
    pub fn rasterize(&self, mut pred: impl FnMut(Complex64) -> bool) -> Raster {
        Raster::from_fn(self.width, self.height, |i, j| pred(self.center(i, j)))
    }
}

/// A hyperbolic planar domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk,
    /// The left half-plane `{Re z < 0}`.
    HalfPlane,
    PuncturedDisk,
    /// `{r < |z| < 1}` with `0 < r < 1`.
    Annulus(f64),
    Grid(GridDomain),
}

impl DomainSpec {
    pub fn annulus(r: f64) -> Result<DomainSpec> {
        let d = DomainSpec::Annulus(r);
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Annulus(r) if !(*r > 0.0 && *r < 1.0) => Err(Error::Validation(format!(
                "annulus inner radius must lie in (0,1), got {r}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self, DomainSpec::Grid(_))
    }

    pub fn name(&self) -> String {
        match self {
            DomainSpec::Disk => "disk".into(),
            DomainSpec::HalfPlane => "halfplane".into(),
            DomainSpec::PuncturedDisk => "punctured".into(),
            DomainSpec::Annulus(r) => format!("annulus:{r}"),
            DomainSpec::Grid(_) => "grid".into(),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        let m = z.norm();
        match self {
            DomainSpec::Disk => m < 1.0,
            DomainSpec::HalfPlane => z.re < 0.0,
            DomainSpec::PuncturedDisk => m > 0.0 && m < 1.0,
            DomainSpec::Annulus(r) => m > *r && m < 1.0,
            DomainSpec::Grid(g) => g.contains(z),
        }
    }

    pub fn require(&self, z: Complex64) -> Result<()> {
        if self.contains(z) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(format!(
                "{z} is not in the {} domain",
                self.name()
            )))
        }
    }

    /// Hyperbolic density (curvature −4) of a catalog domain.
    pub fn density(&self, z: Complex64) -> Result<f64> {
        if let DomainSpec::Grid(_) = self {
            return Err(Error::Unsupported(
                "grid domains expose only density bounds".into(),
            ));
        }
        self.require(z)?;
        let m = z.norm();
        Ok(match self {
            DomainSpec::Disk => 1.0 / (1.0 - z.norm_sqr()),
            DomainSpec::HalfPlane => 1.0 / (2.0 * z.re.abs()),
            DomainSpec::PuncturedDisk => 1.0 / (2.0 * m * (1.0 / m).ln()),
            DomainSpec::Annulus(r) => {
                let log_r = r.ln();
                PI / (2.0 * m * (-log_r) * (PI * m.ln() / log_r).sin())
            }
            DomainSpec::Grid(_) => unreachable!(),
        })
    }

    /// Euclidean distance from `z` to the complement of the domain.
    pub fn clearance(&self, z: Complex64) -> f64 {
        if !self.contains(z) {
            return 0.0;
        }
        let m = z.norm();
        match self {
            DomainSpec::Disk => 1.0 - m,
            DomainSpec::HalfPlane => -z.re,
            DomainSpec::PuncturedDisk => m.min(1.0 - m),
            DomainSpec::Annulus(r) => (m - r).min(1.0 - m),
            DomainSpec::Grid(g) => g.clearance(z),
        }
    }

    /// Raster frame for the domain; `None` for the unbounded half-plane.
    pub fn frame(&self, spacing: f64) -> Result<Option<Frame>> {
        match self {
            DomainSpec::HalfPlane => Ok(None),
            DomainSpec::Grid(g) => Ok(Some(*g.frame())),
            _ => Frame::unit(spacing).map(Some),
        }
    }

    /// Cells of `frame` whose centers lie in the domain. The cell containing
    /// the puncture of the punctured disk is excluded.
    pub fn mask(&self, frame: &Frame) -> Raster {
        let mut mask = frame.rasterize(|z| self.contains(z));
        if let DomainSpec::PuncturedDisk = self {
            if let Some((i, j)) = frame.cell_of(Complex64::new(0.0, 0.0)) {
                mask.set(i, j, false);
            }
        }
        mask
    }

    /// Number of complement components on the sphere minus one.
    pub fn connectivity(&self) -> Option<usize> {
        match self {
            DomainSpec::Disk | DomainSpec::HalfPlane => Some(0),
            DomainSpec::PuncturedDisk | DomainSpec::Annulus(_) => Some(1),
            DomainSpec::Grid(g) => crate::topology::connectivity_number(g.mask()).ok(),
        }
    }
}

/// Simply connected model on which the universal cover is built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoverModel {
    Disk,
    /// `{Re w < 0}`.
    LeftHalfPlane,
    /// `{log r < Re w < 0}`.
    Band {
        log_r: f64,
    },
}

impl CoverModel {
    pub fn contains(&self, w: Complex64) -> bool {
        match *self {
            CoverModel::Disk => w.norm_sqr() < 1.0,
            CoverModel::LeftHalfPlane => w.re < 0.0,
            CoverModel::Band { log_r } => w.re > log_r && w.re < 0.0,
        }
    }

    pub fn density(&self, w: Complex64) -> f64 {
        match *self {
            CoverModel::Disk => 1.0 / (1.0 - w.norm_sqr()),
            CoverModel::LeftHalfPlane => 1.0 / (2.0 * w.re.abs()),
            CoverModel::Band { log_r } => {
                let width = -log_r;
                PI / (2.0 * width * (PI * (w.re - log_r) / width).sin())
            }
        }
    }

    /// Hyperbolic distance within the model.
    pub fn distance(&self, w1: Complex64, w2: Complex64) -> f64 {
        match *self {
            CoverModel::Disk => {
                let num = (w1 - w2).norm();
                let den = ((1.0 - w1.norm_sqr()) * (1.0 - w2.norm_sqr())).sqrt();
                (num / den).asinh()
            }
            CoverModel::LeftHalfPlane => half_plane_distance(w1, w2),
            CoverModel::Band { log_r } => {
                let a = PI / (-log_r);
                // Order so the relative scale factor is at most one.
                let (w1, w2) = if w2.im >= w1.im { (w1, w2) } else { (w2, w1) };
                let z1 = Complex64::from_polar(1.0, a * (w1.re - log_r));
                let z2 = Complex64::from_polar((-a * (w2.im - w1.im)).exp(), a * (w2.re - log_r));
                let num = (z1 - z2).norm();
                let den = 2.0 * (z1.im * z2.im).sqrt();
                (num / den).asinh()
            }
        }
    }

    /// Conformal map of the model onto the unit disk.
    pub fn to_disk(&self, w: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            CoverModel::Disk => w,
            CoverModel::LeftHalfPlane => (w + one) / (w - one),
            CoverModel::Band { log_r } => {
                let a = PI / (-log_r);
                let zeta = (Complex64::new(0.0, a) * (w - log_r)).exp();
                let i = Complex64::new(0.0, 1.0);
                (zeta - i) / (zeta + i)
            }
        }
    }

    /// Inverse of [`CoverModel::to_disk`].
    pub fn from_disk(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            CoverModel::Disk => z,
            CoverModel::LeftHalfPlane => (z + one) / (z - one),
            CoverModel::Band { log_r } => {
                let a = PI / (-log_r);
                let i = Complex64::new(0.0, 1.0);
                let zeta = i * (one + z) / (one - z);
                Complex64::new(zeta.arg() / a + log_r, -zeta.norm().ln() / a)
            }
        }
    }
}

/// Distance in the left half-plane, `asinh(|w1 − w2| / (2√(|Re w1|·|Re w2|)))`.
pub fn half_plane_distance(w1: Complex64, w2: Complex64) -> f64 {
    let num = (w1 - w2).norm();
    let den = 2.0 * (w1.re.abs() * w2.re.abs()).sqrt();
    (num / den).asinh()
}

/// Universal-cover data for a catalog domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringAtlas {
    model: CoverModel,
    /// `true` when the cover is `w ↦ e^w` with deck group `w ↦ w + 2πik`.
    exponential: bool,
}

impl CoveringAtlas {
    pub fn model(&self) -> CoverModel {
        self.model
    }

    pub fn has_deck_group(&self) -> bool {
        self.exponential
    }

    pub fn cover(&self, w: Complex64) -> Complex64 {
        if self.exponential {
            w.exp()
        } else {
            w
        }
    }

    pub fn cover_derivative(&self, w: Complex64) -> Complex64 {
        if self.exponential {
            w.exp()
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Principal local inverse of the cover.
    pub fn lift(&self, z: Complex64) -> Result<Complex64> {
        let w = if self.exponential {
            if z.norm() == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::LiftFailure(format!("no branch of log at {z}")));
            }
            Complex64::new(z.norm().ln(), z.arg())
        } else {
            z
        };
        if self.model.contains(w) {
            Ok(w)
        } else {
            Err(Error::LiftFailure(format!(
                "lift {w} of {z} is outside the model"
            )))
        }
    }

    /// Generator of the deck group, `w ↦ w + 2πi`.
    pub fn deck_generator(&self) -> Option<MobiusMap> {
        self.exponential
            .then(|| MobiusMap::translation(Complex64::new(0.0, TAU)))
    }

    pub fn deck(&self, w: Complex64, k: i64) -> Complex64 {
        if self.exponential {
            w + Complex64::new(0.0, TAU * k as f64)
        } else {
            w
        }
    }

    pub fn model_distance(&self, w1: Complex64, w2: Complex64) -> f64 {
        self.model.distance(w1, w2)
    }

    /// Certified lower bound on the model distance from `wp` to the `k`-th
    /// deck translate of `wq`: both models sit inside the left half-plane,
    /// whose distance is dominated by theirs.
    pub fn tail_bound(&self, wp: Complex64, wq: Complex64, k: i64) -> f64 {
        half_plane_distance(wp, self.deck(wq, k))
    }
}

pub fn covering_atlas(domain: &DomainSpec) -> Result<CoveringAtlas> {
    domain.validate()?;
    let (model, exponential) = match domain {
        DomainSpec::Disk => (CoverModel::Disk, false),
        DomainSpec::HalfPlane => (CoverModel::LeftHalfPlane, false),
        DomainSpec::PuncturedDisk => (CoverModel::LeftHalfPlane, true),
        DomainSpec::Annulus(r) => (CoverModel::Band { log_r: r.ln() }, true),
        DomainSpec::Grid(_) => {
            return Err(Error::Unsupported(
                "grid domains have no explicit covering".into(),
            ))
        }
    };
    Ok(CoveringAtlas { model, exponential })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn contains_examples() {
        assert!(DomainSpec::Disk.contains(c(0.0, 0.0)));
        assert!(!DomainSpec::Annulus(0.1).contains(c(0.05, 0.0)));
        assert!(!DomainSpec::PuncturedDisk.contains(c(0.0, 0.0)));
        assert!(DomainSpec::HalfPlane.contains(c(-1e-3, 5.0)));
        assert!(DomainSpec::annulus(1.0).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(DomainSpec::Disk.density(c(0.0, 0.0)).unwrap(), 1.0);
        let e = std::f64::consts::E;
        let v = DomainSpec::PuncturedDisk.density(c(1.0 / e, 0.0)).unwrap();
        assert!((v - e / 2.0).abs() < 1e-14);
        let s = 0.1f64.sqrt();
        let v = DomainSpec::Annulus(0.1).density(c(s, 0.0)).unwrap();
        let oracle = PI / (2.0 * s * 10f64.ln());
        assert!((v - oracle).abs() < 1e-13 && (v - 2.1572).abs() < 1e-4);
        assert_eq!(
            DomainSpec::Disk.density(c(1.0, 0.0)).unwrap_err().name(),
            "OutOfDomain"
        );
    }

    #[test]
    fn atlas_examples() {
        let e = std::f64::consts::E;
        let punct = covering_atlas(&DomainSpec::PuncturedDisk).unwrap();
        assert!((punct.cover(c(-1.0, 0.0)) - c(1.0 / e, 0.0)).norm() < 1e-15);
        assert!((punct.cover(c(-1.0, TAU)) - c(1.0 / e, 0.0)).norm() < 1e-15);
        let ann = covering_atlas(&DomainSpec::Annulus(0.1)).unwrap();
        assert!((ann.cover(c(0.1f64.ln() / 2.0, 0.0)) - c(0.1f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(covering_atlas(&DomainSpec::Disk)
            .unwrap()
            .deck_generator()
            .is_none());
        let gen = ann.deck_generator().unwrap();
        let w = c(-1.0, 0.3);
        assert!((ann.cover(gen.apply_finite(w)) - ann.cover(w)).norm() < 1e-14);
    }

    #[test]
    fn model_disk_maps_are_inverse() {
        for model in [
            CoverModel::LeftHalfPlane,
            CoverModel::Band { log_r: 0.2f64.ln() },
        ] {
            for w in [c(-0.3, 0.1), c(-1.2, -2.0), c(-0.8, 5.0)] {
                if !model.contains(w) {
                    continue;
                }
                let z = model.to_disk(w);
                assert!(z.norm() < 1.0);
                assert!((model.from_disk(z) - w).norm() < 1e-12, "{model:?} {w}");
            }
        }
    }

    #[test]
    fn band_distance_matches_disk_transfer() {
        let model = CoverModel::Band { log_r: 0.1f64.ln() };
        let (w1, w2) = (c(-0.4, 0.2), c(-1.9, 1.7));
        let oracle =
            crate::geometry::poincare_distance(model.to_disk(w1), model.to_disk(w2)).unwrap();
        assert!((model.distance(w1, w2) - oracle).abs() < 1e-12);
        let hp = CoverModel::LeftHalfPlane;
        let oracle = crate::geometry::poincare_distance(hp.to_disk(w1), hp.to_disk(w2)).unwrap();
        assert!((hp.distance(w1, w2) - oracle).abs() < 1e-12);
    }

    #[test]
    fn punctured_density_is_annulus_limit() {
        // The relative gap is 1 − x/sin(x)·… with x = π·log|z|/log r, i.e.
        // ≈ x²/6 to leading order; it vanishes as r → 0 for every fixed z.
        for k in 0..7 {
            let m = 0.3 + 0.1 * k as f64;
            let z = Complex64::from_polar(m, 0.7 * k as f64);
            let p = DomainSpec::PuncturedDisk.density(z).unwrap();
            let mut previous = f64::INFINITY;
            for r in [1e-6, 1e-12, 1e-30] {
                let a = DomainSpec::Annulus(r).density(z).unwrap();
                let gap = (a - p) / p;
                let x = PI * m.ln() / r.ln();
                assert!(
                    (gap - x * x / 6.0).abs() <= 0.1 * x * x / 6.0,
                    "|z|={m} r={r}"
                );
                assert!(gap < previous);
                previous = gap;
            }
            assert!(previous <= 1e-3);
        }
    }

    #[test]
    fn frame_is_centered() {
        let f = Frame::unit(0.02).unwrap();
        assert_eq!(f.width, 110);
        assert!((f.center(0, 0).re + 1.09).abs() < 1e-12);
        assert!((f.center(109, 109).re - 1.09).abs() < 1e-12);
        assert_eq!(f.cell_of(c(1.09, -1.09)), Some((109, 0)));
        assert_eq!(f.cell_of(c(1.2, 0.0)), None);
    }

    fn model_point(log_r: f64) -> impl Strategy<Value = Complex64> {
        (0.02..0.98f64, -10.0..10.0f64).prop_map(move |(s, y)| c(log_r * s, y))
    }

    proptest! {
        #[test]
        fn atlas_local_isometry(w in model_point(0.1f64.ln()), which in 0..2usize) {
            let (domain, w) = if which == 0 {
                (DomainSpec::Annulus(0.1), w)
            } else {
                (DomainSpec::PuncturedDisk, w * 2.0)
            };
            let atlas = covering_atlas(&domain).unwrap();
            let h = 1e-6;
            let fd = (atlas.cover(w + h) - atlas.cover(w - h)) / (2.0 * h);
            let lhs = domain.density(atlas.cover(w)).unwrap() * fd.norm();
            let rhs = atlas.model().density(w);
            prop_assert!((lhs - rhs).abs() <= 1e-6 * rhs, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn deck_invariance(w in model_point(0.3f64.ln()), k in -3i64..=3) {
            let atlas = covering_atlas(&DomainSpec::Annulus(0.3)).unwrap();
            prop_assert!((atlas.cover(atlas.deck(w, k)) - atlas.cover(w)).norm() <= 1e-10);
        }

        #[test]
        fn density_decreases_under_inclusion(r in 0.01..0.5f64, t in 0.0..1.0f64, th in 0.0..TAU) {
            let m = r + (1.0 - r) * (0.01 + 0.98 * t);
            let z = Complex64::from_polar(m, th);
            let a = DomainSpec::Annulus(r).density(z).unwrap();
            let p = DomainSpec::PuncturedDisk.density(z).unwrap();
            let d = DomainSpec::Disk.density(z).unwrap();
            prop_assert!(a >= p * (1.0 - 1e-12) && p >= d);
        }
    }
}
