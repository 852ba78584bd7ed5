//! Raster domains: a boolean occupancy mask placed on a [`Frame`], the
//! grid-domain file format, and fixture generators.
//!
//! A point belongs to a grid domain iff the cell containing it is true, so
//! the domain is the union of the true cells' squares.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domains::Frame;
use crate::error::{Error, Result};
use crate::topology::{flood_components, Connectivity, Raster};

#[derive(Clone)]
pub struct GridDomain {
    frame: Frame,
    mask: Raster,
    clearance: OnceLock<Arc<ClearanceIndex>>,
    edges: OnceLock<Arc<Vec<[f64; 8]>>>,
}

impl fmt::Debug for GridDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridDomain")
            .field("frame", &self.frame)
            .field("cells", &self.mask.count())
            .finish()
    }
}

impl PartialEq for GridDomain {
    fn eq(&self, other: &Self) -> bool {
        self.frame == other.frame && self.mask == other.mask
    }
}

impl GridDomain {
    /// Validates the mask: positive spacing, clear border ring, and exactly
    /// one 4-connected component of true cells.
    pub fn new(frame: Frame, mask: Raster) -> Result<GridDomain> {
        if !(frame.spacing > 0.0 && frame.spacing.is_finite()) {
            return Err(Error::Validation(format!(
                "spacing must be positive, got {}",
                frame.spacing
            )));
        }
        if !(frame.origin.re.is_finite() && frame.origin.im.is_finite()) {
            return Err(Error::Validation("origin must be finite".into()));
        }
        if frame.width < 3 || frame.height < 3 {
            return Err(Error::Validation("grid must be at least 3×3".into()));
        }
        if mask.width() != frame.width || mask.height() != frame.height {
            return Err(Error::Validation("mask size does not match frame".into()));
        }
        if !mask.border_is_clear() {
            return Err(Error::Validation("mask border ring must be false".into()));
        }
        let components = flood_components(&mask, Connectivity::Four).component_count();
        if components != 1 {
            return Err(Error::Validation(format!(
                "domain mask must form one 4-connected component, found {components}"
            )));
        }
        Ok(GridDomain {
            frame,
            mask,
            clearance: OnceLock::new(),
            edges: OnceLock::new(),
        })
    }

    pub fn from_predicate(frame: Frame, pred: impl FnMut(Complex64) -> bool) -> Result<GridDomain> {
        let mask = frame.rasterize(pred);
        GridDomain::new(frame, mask)
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn mask(&self) -> &Raster {
        &self.mask
    }

    pub fn spacing(&self) -> f64 {
        self.frame.spacing
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.frame
            .cell_of(z)
            .is_some_and(|(i, j)| self.mask.get(i, j))
    }

    fn index(&self) -> &ClearanceIndex {
        self.clearance
            .get_or_init(|| Arc::new(ClearanceIndex::build(&self.frame, &self.mask)))
    }

    /// Euclidean distance from `z` to the complement (0 outside the domain).
    pub fn clearance(&self, z: Complex64) -> f64 {
        if !self.contains(z) {
            return 0.0;
        }
        self.index().point_distance(&self.frame, z)
    }

    /// Euclidean distance from the segment `[a, b]` to the complement.
    pub fn segment_clearance(&self, a: Complex64, b: Complex64) -> f64 {
        if !self.contains(a) || !self.contains(b) {
            return 0.0;
        }
        let mid = (a + b) / 2.0;
        let reach = self.index().point_distance(&self.frame, mid) + (b - a).norm() / 2.0;
        self.index().segment_distance(&self.frame, a, b, reach)
    }

    /// Upper bound on the hyperbolic length of `[a, b]`: Euclidean length
    /// times `1/δ`, where `δ` is the segment's clearance. The density of a
    /// disk of radius `δ` at its center is `1/δ`, and inclusion of that disk
    /// can only decrease the density.
    pub fn segment_length_bound(&self, a: Complex64, b: Complex64) -> f64 {
        let len = (b - a).norm();
        if len == 0.0 {
            return 0.0;
        }
        let clear = self.segment_clearance(a, b);
        if clear > 0.0 {
            len / clear
        } else {
            f64::INFINITY
        }
    }

    /// Per-cell length bounds towards the 8 neighbors, in
    /// [`Connectivity::Eight`] offset order; infinite when not an edge.
    pub(crate) fn edge_bounds(&self) -> &[[f64; 8]] {
        self.edges.get_or_init(|| {
            let f = &self.frame;
            let offsets = Connectivity::Eight.offsets();
            let mut out = vec![[f64::INFINITY; 8]; f.cell_count()];
            for j in 0..f.height {
                for i in 0..f.width {
                    if !self.mask.get(i, j) {
                        continue;
                    }
                    let idx = j * f.width + i;
                    for (k, &(di, dj)) in offsets.iter().enumerate() {
                        let (ni, nj) = (i as isize + di, j as isize + dj);
                        if !self.mask.get_signed(ni, nj) {
                            continue;
                        }
                        let nidx = nj as usize * f.width + ni as usize;
                        if nidx < idx {
                            // Reuse the bound computed from the other endpoint.
                            let back = offsets.iter().position(|&o| o == (-di, -dj)).unwrap();
                            out[idx][k] = out[nidx][back];
                            continue;
                        }
                        out[idx][k] = self.segment_length_bound(
                            f.center(i, j),
                            f.center(ni as usize, nj as usize),
                        );
                    }
                }
            }
            Arc::new(out)
        })
    }
}

/// Complement cells adjacent to the domain, bucketed for nearest queries.
/// The complement point nearest to any domain point lies on one of these
/// cells' squares.
#[derive(Debug)]
struct ClearanceIndex {
    bucket: usize,
    bw: usize,
    bh: usize,
    buckets: Vec<Vec<(usize, usize)>>,
}

const BUCKET_CELLS: usize = 8;

impl ClearanceIndex {
    fn build(frame: &Frame, mask: &Raster) -> ClearanceIndex {
        let bucket = BUCKET_CELLS;
        let bw = frame.width.div_ceil(bucket);
        let bh = frame.height.div_ceil(bucket);
        let mut buckets = vec![Vec::new(); bw * bh];
        for j in 0..frame.height {
            for i in 0..frame.width {
                if mask.get(i, j) {
                    continue;
                }
                let touches = Connectivity::Eight
                    .offsets()
                    .iter()
                    .any(|&(di, dj)| mask.get_signed(i as isize + di, j as isize + dj));
                if touches {
                    buckets[(j / bucket) * bw + i / bucket].push((i, j));
                }
            }
        }
        ClearanceIndex {
            bucket,
            bw,
            bh,
            buckets,
        }
    }

    fn square(frame: &Frame, i: usize, j: usize) -> (Complex64, f64) {
        (frame.center(i, j), frame.spacing / 2.0)
    }

    fn point_distance(&self, frame: &Frame, z: Complex64) -> f64 {
        let h = frame.spacing;
        let bi = (((z.re - frame.origin.re) / h).round().max(0.0) as usize / self.bucket)
            .min(self.bw - 1);
        let bj = (((z.im - frame.origin.im) / h).round().max(0.0) as usize / self.bucket)
            .min(self.bh - 1);
        let mut best = f64::INFINITY;
        let max_ring = self.bw.max(self.bh);
        for ring in 0..=max_ring {
            // Any bucket in this ring is at least (ring − 1) buckets away.
            let guaranteed = ((ring as f64 - 1.0) * self.bucket as f64 - 1.0).max(0.0) * h;
            if best <= guaranteed {
                break;
            }
            for (x, y) in ring_buckets(bi, bj, ring, self.bw, self.bh) {
                for &(i, j) in &self.buckets[y * self.bw + x] {
                    let (c, half) = Self::square(frame, i, j);
                    best = best.min(point_box_distance(z, c, half));
                }
            }
        }
        best
    }

    fn segment_distance(&self, frame: &Frame, a: Complex64, b: Complex64, reach: f64) -> f64 {
        let h = frame.spacing;
        let pad = reach + h;
        let lo = Complex64::new(a.re.min(b.re), a.im.min(b.im)) - Complex64::new(pad, pad);
        let hi = Complex64::new(a.re.max(b.re), a.im.max(b.im)) + Complex64::new(pad, pad);
        let to_bucket = |v: f64, o: f64, n: usize| -> usize {
            let cell = ((v - o) / h).round().max(0.0) as usize;
            (cell / self.bucket).min(n - 1)
        };
        let (x0, x1) = (
            to_bucket(lo.re, frame.origin.re, self.bw),
            to_bucket(hi.re, frame.origin.re, self.bw),
        );
        let (y0, y1) = (
            to_bucket(lo.im, frame.origin.im, self.bh),
            to_bucket(hi.im, frame.origin.im, self.bh),
        );
        let mut best = f64::INFINITY;
        for y in y0..=y1 {
            for x in x0..=x1 {
                for &(i, j) in &self.buckets[y * self.bw + x] {
                    let (c, half) = Self::square(frame, i, j);
                    best = best.min(segment_box_distance(a, b, c, half));
                }
            }
        }
        best
    }
}

fn ring_buckets(
    bi: usize,
    bj: usize,
    ring: usize,
    bw: usize,
    bh: usize,
) -> impl Iterator<Item = (usize, usize)> {
    let (bi, bj, r) = (bi as isize, bj as isize, ring as isize);
    (-r..=r)
        .flat_map(move |dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(move |&(dx, dy)| dx.abs() == r || dy.abs() == r)
        .map(move |(dx, dy)| (bi + dx, bj + dy))
        .filter(move |&(x, y)| x >= 0 && y >= 0 && (x as usize) < bw && (y as usize) < bh)
        .map(|(x, y)| (x as usize, y as usize))
}

pub(crate) fn point_box_distance(z: Complex64, center: Complex64, half: f64) -> f64 {
    let dx = ((z.re - center.re).abs() - half).max(0.0);
    let dy = ((z.im - center.im).abs() - half).max(0.0);
    dx.hypot(dy)
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance between a segment and a closed axis-aligned square.
pub(crate) fn segment_box_distance(
    a: Complex64,
    b: Complex64,
    center: Complex64,
    half: f64,
) -> f64 {
    if segment_hits_box(a, b, center, half) {
        return 0.0;
    }
    let corners = [
        center + Complex64::new(half, half),
        center + Complex64::new(-half, half),
        center + Complex64::new(-half, -half),
        center + Complex64::new(half, -half),
    ];
    let mut best = point_box_distance(a, center, half).min(point_box_distance(b, center, half));
    for c in corners {
        best = best.min(point_segment_distance(c, a, b));
    }
    best
}

fn segment_hits_box(a: Complex64, b: Complex64, center: Complex64, half: f64) -> bool {
    // Liang–Barsky clipping against the closed square.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = b - a;
    let checks = [
        (-d.re, a.re - (center.re - half)),
        (d.re, (center.re + half) - a.re),
        (-d.im, a.im - (center.im - half)),
        (d.im, (center.im + half) - a.im),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let t = q / p;
            if p < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Metadata attached to an exported metric ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallMetadata {
    pub metric: String,
    pub center: [f64; 2],
    pub radius: f64,
}

/// On-disk layout of a grid file. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub format_version: u32,
    pub origin: [f64; 2],
    pub spacing: f64,
    pub width: usize,
    pub height: usize,
    pub rows: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<BallMetadata>,
}

impl GridFile {
    pub fn from_raster(frame: &Frame, mask: &Raster, metadata: Option<BallMetadata>) -> GridFile {
        GridFile {
            format_version: 1,
            origin: [frame.origin.re, frame.origin.im],
            spacing: frame.spacing,
            width: frame.width,
            height: frame.height,
            rows: (0..frame.height).map(|j| mask.row_string(j)).collect(),
            metadata,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("grid files always serialize");
        out.push(b'\n');
        out
    }

    pub fn parse(bytes: &[u8]) -> Result<GridFile> {
        serde_json::from_slice(bytes).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Frame and mask, checking shape and row alphabet.
    pub fn to_raster(&self) -> Result<(Frame, Raster)> {
        if self.format_version != 1 {
            return Err(Error::Validation(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        if self.rows.len() != self.height {
            return Err(Error::Validation(format!(
                "expected {} rows, found {}",
                self.height,
                self.rows.len()
            )));
        }
        let mut cells = Vec::with_capacity(self.width * self.height);
        for (j, row) in self.rows.iter().enumerate() {
            if row.len() != self.width {
                return Err(Error::Validation(format!(
                    "row {j} has length {}, expected {}",
                    row.len(),
                    self.width
                )));
            }
            for ch in row.bytes() {
                match ch {
                    b'0' => cells.push(false),
                    b'1' => cells.push(true),
                    other => {
                        return Err(Error::Validation(format!(
                            "row {j} contains invalid byte {other:#x}"
                        )))
                    }
                }
            }
        }
        let frame = Frame {
            origin: Complex64::new(self.origin[0], self.origin[1]),
            spacing: self.spacing,
            width: self.width,
            height: self.height,
        };
        Ok((frame, Raster::new(self.width, self.height, cells)))
    }
}

pub fn grid_load(bytes: &[u8]) -> Result<GridDomain> {
    let file = GridFile::parse(bytes)?;
    let (frame, mask) = file.to_raster()?;
    GridDomain::new(frame, mask)
}

pub fn grid_save(grid: &GridDomain) -> Vec<u8> {
    GridFile::from_raster(&grid.frame, &grid.mask, None).to_bytes()
}

/// Rasterized `{r < |z| < 1}` on the frame `[−1.1, 1.1]²`.
pub fn grid_annulus(r: f64, spacing: f64) -> Result<GridDomain> {
    grid_annulus_at(Complex64::new(0.0, 0.0), 1.0, r, spacing)
}

/// Rasterized `{s·r < |z − c| < s}` framed 10% beyond the outer circle.
pub fn grid_annulus_at(center: Complex64, scale: f64, r: f64, spacing: f64) -> Result<GridDomain> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Validation(format!(
            "annulus inner radius must lie in (0,1), got {r}"
        )));
    }
    if !(spacing > 0.0 && spacing < scale * (1.0 - r) / 4.0) {
        return Err(Error::Validation(format!(
            "spacing {spacing} must be positive and below (1 − r)/4 of the outer radius"
        )));
    }
    let frame = Frame::square(center, scale * 1.1, spacing)?;
    GridDomain::from_predicate(frame, |z| {
        let m = (z - center).norm();
        m > scale * r && m < scale
    })
}

/// Unit disk minus the closed disks of radius 0.2 centered at ±0.45.
pub fn grid_pair_of_pants(spacing: f64) -> Result<GridDomain> {
    let frame = Frame::unit(spacing)?;
    let holes = [Complex64::new(-0.45, 0.0), Complex64::new(0.45, 0.0)];
    GridDomain::from_predicate(frame, |z| {
        z.norm() < 1.0 && holes.iter().all(|&h| (z - h).norm() > 0.2)
    })
}

/// Square of side `outer` minus a concentric square of side `inner`, both
/// rotated by `angle` radians about `center`.
pub fn grid_square_frame(
    center: Complex64,
    outer: f64,
    inner: f64,
    angle: f64,
    spacing: f64,
) -> Result<GridDomain> {
    if !(0.0 < inner && inner < outer) {
        return Err(Error::Validation("need 0 < inner < outer".into()));
    }
    let frame = Frame::square(center, outer * 0.5 * 2f64.sqrt() * 1.1, spacing)?;
    let rot = Complex64::from_polar(1.0, -angle);
    GridDomain::from_predicate(frame, |z| {
        let p = (z - center) * rot;
        let m = p.re.abs().max(p.im.abs());
        m > inner / 2.0 && m < outer / 2.0
    })
}

/// 16×16 unit-spacing square ring: cells 1..15 occupied except the central
/// 4×4 block 6..10.
pub fn grid_square_with_hole() -> GridDomain {
    let frame = Frame {
        origin: Complex64::new(0.0, 0.0),
        spacing: 1.0,
        width: 16,
        height: 16,
    };
    let mask = Raster::from_fn(16, 16, |i, j| {
        (2..14).contains(&i)
            && (2..14).contains(&j)
            && !((6..10).contains(&i) && (6..10).contains(&j))
    });
    GridDomain::new(frame, mask).expect("fixture is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::complement_components;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let g = grid_square_with_hole();
        let bytes = grid_save(&g);
        let back = grid_load(&bytes).unwrap();
        assert_eq!(back, g);
        assert_eq!(grid_save(&back), bytes);

        let ann = grid_annulus(0.25, 0.05).unwrap();
        let bytes = grid_save(&ann);
        assert_eq!(grid_save(&grid_load(&bytes).unwrap()), bytes);
    }

    #[test]
    fn two_components_rejected() {
        let frame = Frame {
            origin: c(0.0, 0.0),
            spacing: 1.0,
            width: 6,
            height: 4,
        };
        let mask = Raster::from_rows(&["000000", "011010", "011010", "000000"]);
        let file = GridFile::from_raster(&frame, &mask, None);
        assert_eq!(
            grid_load(&file.to_bytes()).unwrap_err().name(),
            "ValidationError"
        );
    }

    #[test]
    fn zero_spacing_rejected() {
        let mut file = GridFile::from_raster(
            grid_square_with_hole().frame(),
            grid_square_with_hole().mask(),
            None,
        );
        file.spacing = 0.0;
        assert_eq!(
            grid_load(&file.to_bytes()).unwrap_err().name(),
            "ValidationError"
        );
    }

    #[test]
    fn parse_error_reports_position() {
        let err = grid_load(b"{\n  \"format_version\": 1,\n  oops\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn annulus_fixture() {
        let g = grid_annulus(0.25, 0.02).unwrap();
        let comps = complement_components(g.mask());
        assert_eq!(comps.count(), 2);
        assert!(!g.contains(c(0.0, 0.0)));
        assert!(g.contains(c(0.6, 0.0)));
        assert!(grid_annulus(0.25, 0.2).is_err());
        assert!(grid_annulus(1.5, 0.01).is_err());
    }

    #[test]
    fn pants_fixture_is_triply_connected() {
        let g = grid_pair_of_pants(0.02).unwrap();
        assert_eq!(complement_components(g.mask()).count(), 3);
    }

    #[test]
    fn clearance_matches_brute_force() {
        let g = grid_annulus(0.3, 0.05).unwrap();
        let f = *g.frame();
        let brute = |z: Complex64| {
            let mut best = f64::INFINITY;
            for j in 0..f.height {
                for i in 0..f.width {
                    if !g.mask().get(i, j) {
                        best = best.min(point_box_distance(z, f.center(i, j), f.spacing / 2.0));
                    }
                }
            }
            best
        };
        for z in [c(0.5, 0.1), c(-0.7, 0.3), c(0.0, 0.93), c(0.33, -0.2)] {
            assert!((g.clearance(z) - brute(z)).abs() < 1e-12, "{z}");
        }
        // Segment clearance is at most the clearance of any point on it.
        let (a, b) = (c(0.5, 0.0), c(0.55, 0.05));
        let s = g.segment_clearance(a, b);
        for k in 0..=10 {
            let p = a + (b - a) * (k as f64 / 10.0);
            assert!(s <= brute(p) + 1e-12);
        }
        assert!(s > 0.0);
    }

    #[test]
    fn segment_box_geometry() {
        let d = segment_box_distance(c(-2.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), 0.5);
        assert!((d - 0.5).abs() < 1e-15);
        assert_eq!(
            segment_box_distance(c(-2.0, 0.0), c(2.0, 0.0), c(0.0, 0.2), 0.5),
            0.0
        );
        let d = segment_box_distance(c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0), 0.5);
        assert!(
            (d - (1.5f64.hypot(0.5) - 0.0)
                .min(0.5f64.hypot(0.5))
                .min(1.0 / 2f64.sqrt()))
            .abs()
                < 1e-12
        );
    }
}
