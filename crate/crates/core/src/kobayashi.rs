//! Kobayashi distance, curve length, inner distance, geodesics and metric
//! balls.
//!
//! On catalog domains the distance is the covering-lift infimum: fix a lift
//! of `p` and minimize the model distance over all lifts of `q`, enumerating
//! deck translates outward until a certified tail bound exceeds the best
//! value found. On grid domains only a certified interval is available: the
//! upper end is a shortest path under the density bound `1/δ`, the lower end
//! comes from the Carathéodory dictionary (`c ≤ d`).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::caratheodory::{car_lower, default_dictionary};
use crate::domains::{covering_atlas, half_plane_distance, CoveringAtlas, DomainSpec, Frame};
use crate::error::{Error, Result};
use crate::geometry::{poincare_distance, poincare_geodesic};
use crate::grid::{BallMetadata, GridDomain, GridFile};
use crate::paths::dijkstra;
use crate::topology::{Connectivity, Raster};

pub const DEFAULT_GEODESIC_SAMPLES: usize = 256;
/// Hard cap on deck enumeration; catalog atlases terminate far earlier.
const MAX_DECK_INDEX: i64 = 1 << 20;

/// Certified enclosure `lower ≤ d ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceInterval {
    pub lower: f64,
    pub upper: f64,
    pub certified: bool,
}

impl DistanceInterval {
    pub fn exact(v: f64) -> Self {
        DistanceInterval {
            lower: v,
            upper: v,
            certified: true,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64, slack: f64) -> bool {
        self.lower - slack <= v && v <= self.upper + slack
    }
}

/// Optimal lift pair realizing the covering infimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftWitness {
    pub distance: f64,
    pub lift_p: Complex64,
    pub lift_q: Complex64,
    pub deck_index: i64,
}

pub fn lift_infimum(atlas: &CoveringAtlas, p: Complex64, q: Complex64, tol: f64) -> Result<f64> {
    lift_infimum_witness(atlas, p, q, tol).map(|w| w.distance)
}

pub fn lift_infimum_witness(
    atlas: &CoveringAtlas,
    p: Complex64,
    q: Complex64,
    tol: f64,
) -> Result<LiftWitness> {
    let wp = atlas.lift(p)?;
    let mut wq = atlas.lift(q)?;
    if !atlas.has_deck_group() {
        return Ok(LiftWitness {
            distance: atlas.model_distance(wp, wq),
            lift_p: wp,
            lift_q: wq,
            deck_index: 0,
        });
    }
    // Start from the translate with |Im(wq − wp)| ≤ π; beyond it the tail
    // bound grows monotonically in |k| in each direction.
    let shift = ((wq.im - wp.im) / TAU).round();
    wq -= Complex64::new(0.0, TAU * shift);
    let mut best = LiftWitness {
        distance: atlas.model_distance(wp, wq),
        lift_p: wp,
        lift_q: wq,
        deck_index: 0,
    };
    for dir in [1i64, -1] {
        let mut k = dir;
        loop {
            if k.abs() > MAX_DECK_INDEX {
                return Err(Error::NonConvergence(format!(
                    "deck tail bound did not certify within {MAX_DECK_INDEX} translates"
                )));
            }
            if atlas.tail_bound(wp, wq, k) > best.distance + tol {
                break;
            }
            let cand = atlas.deck(wq, k);
            let d = atlas.model_distance(wp, cand);
            if d < best.distance {
                best = LiftWitness {
                    distance: d,
                    lift_p: wp,
                    lift_q: cand,
                    deck_index: k,
                };
            }
            k += dir;
        }
    }
    Ok(best)
}

/// Exact distance on a catalog domain.
fn catalog_distance(
    domain: &DomainSpec,
    atlas: &CoveringAtlas,
    p: Complex64,
    q: Complex64,
) -> Result<f64> {
    match domain {
        DomainSpec::Disk => poincare_distance(p, q),
        DomainSpec::HalfPlane => Ok(half_plane_distance(p, q)),
        _ => lift_infimum(atlas, p, q, 0.0),
    }
}

/// Reusable distance evaluator for a catalog domain.
#[derive(Debug, Clone)]
pub struct CatalogMetric {
    domain: DomainSpec,
    atlas: CoveringAtlas,
}

impl CatalogMetric {
    pub fn new(domain: &DomainSpec) -> Result<Self> {
        let atlas = covering_atlas(domain)?;
        Ok(CatalogMetric {
            domain: domain.clone(),
            atlas,
        })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn atlas(&self) -> &CoveringAtlas {
        &self.atlas
    }

    pub fn distance(&self, p: Complex64, q: Complex64) -> Result<f64> {
        self.domain.require(p)?;
        self.domain.require(q)?;
        catalog_distance(&self.domain, &self.atlas, p, q)
    }
}

pub fn kob_distance(
    domain: &DomainSpec,
    p: Complex64,
    q: Complex64,
    tol: f64,
) -> Result<DistanceInterval> {
    domain.require(p)?;
    domain.require(q)?;
    match domain {
        DomainSpec::Disk | DomainSpec::HalfPlane => {
            let atlas = covering_atlas(domain)?;
            Ok(DistanceInterval::exact(catalog_distance(
                domain, &atlas, p, q,
            )?))
        }
        DomainSpec::PuncturedDisk | DomainSpec::Annulus(_) => {
            let atlas = covering_atlas(domain)?;
            let v = lift_infimum(&atlas, p, q, tol)?;
            Ok(DistanceInterval {
                lower: (v - tol).max(0.0),
                upper: v,
                certified: true,
            })
        }
        DomainSpec::Grid(g) => {
            let upper = grid_upper_bound(g, p, q)?;
            let dict = default_dictionary(domain)?;
            let lower = car_lower(domain, p, q, &dict)?.min(upper);
            Ok(DistanceInterval {
                lower,
                upper,
                certified: true,
            })
        }
    }
}

/// Shortest path over the 8-neighbor cell graph with certified segment
/// length bounds, joined to `p` and `q` by straight segments.
pub fn grid_upper_bound(g: &GridDomain, p: Complex64, q: Complex64) -> Result<f64> {
    let f = *g.frame();
    let (pi, pj) = f
        .cell_of(p)
        .ok_or_else(|| Error::OutOfDomain(format!("{p} outside grid frame")))?;
    let (qi, qj) = f
        .cell_of(q)
        .ok_or_else(|| Error::OutOfDomain(format!("{q} outside grid frame")))?;
    let (src, dst) = (pj * f.width + pi, qj * f.width + qi);
    let direct = g.segment_length_bound(p, q);
    let head = g.segment_length_bound(p, f.center(pi, pj));
    let tail = g.segment_length_bound(f.center(qi, qj), q);
    let edges = g.edge_bounds();
    let offsets = Connectivity::Eight.offsets();
    let sp = dijkstra(f.cell_count(), src, Some(dst), |u, out| {
        let (i, j) = ((u % f.width) as isize, (u / f.width) as isize);
        for (k, &(di, dj)) in offsets.iter().enumerate() {
            let w = edges[u][k];
            if w.is_finite() {
                out.push(((j + dj) as usize * f.width + (i + di) as usize, w));
            }
        }
    });
    let via_cells = head + sp.dist[dst] + tail;
    let best = direct.min(via_cells);
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Disconnected(format!(
            "no cell path joins {p} and {q}"
        )))
    }
}

/// Polygonal path; consecutive vertices are joined by straight segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPath {
    vertices: Vec<Complex64>,
}

impl PolyPath {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Precondition(
                "a path needs at least two vertices".into(),
            ));
        }
        Ok(PolyPath { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn euclidean_length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }
}

/// Length of a curve; `upper_bound_only` is set on grid domains, where only
/// distance upper bounds are available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveLength {
    pub value: f64,
    pub upper_bound_only: bool,
}

const LENGTH_REL_TOL: f64 = 1e-8;
const MAX_REFINEMENT: u32 = 22;

/// Supremum over partitions of summed pairwise distances, by dyadic
/// refinement of every segment until the sum stabilizes.
pub fn curve_length(domain: &DomainSpec, path: &PolyPath) -> Result<CurveLength> {
    let metric = match domain {
        DomainSpec::Grid(_) => None,
        _ => Some(CatalogMetric::new(domain)?),
    };
    for &v in path.vertices() {
        domain.require(v)?;
    }
    let mut total = 0.0;
    for seg in path.vertices().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        if a == b {
            continue;
        }
        total += match (&metric, domain) {
            (Some(m), _) => segment_length(m, a, b)?,
            (None, DomainSpec::Grid(g)) => grid_segment_length(g, a, b)?,
            _ => unreachable!(),
        };
    }
    Ok(CurveLength {
        value: total,
        upper_bound_only: metric.is_none(),
    })
}

fn segment_length(metric: &CatalogMetric, a: Complex64, b: Complex64) -> Result<f64> {
    let mut prev = metric.distance(a, b)?;
    for level in 1..=MAX_REFINEMENT {
        let n = 1usize << level;
        let mut sum = 0.0;
        let mut last = a;
        for k in 1..=n {
            let next = a + (b - a) * (k as f64 / n as f64);
            sum += metric.distance(last, next)?;
            last = next;
        }
        if (sum - prev).abs() <= LENGTH_REL_TOL * sum {
            return Ok(sum);
        }
        prev = sum;
    }
    Ok(prev)
}

fn grid_segment_length(g: &GridDomain, a: Complex64, b: Complex64) -> Result<f64> {
    // Subdivide to cell scale so clearance is measured locally.
    let n = ((b - a).norm() / g.spacing()).ceil().max(1.0) as usize;
    let mut sum = 0.0;
    let mut last = a;
    for k in 1..=n {
        let next = a + (b - a) * (k as f64 / n as f64);
        let piece = g.segment_length_bound(last, next);
        if !piece.is_finite() {
            return Err(Error::OutOfDomain(format!(
                "segment near {next} leaves the grid domain"
            )));
        }
        sum += piece;
        last = next;
    }
    Ok(sum)
}

/// Projects the model geodesic between the optimal lift pair.
pub fn geodesic(
    domain: &DomainSpec,
    p: Complex64,
    q: Complex64,
    samples: usize,
) -> Result<PolyPath> {
    domain.require(p)?;
    domain.require(q)?;
    if p == q {
        return Err(Error::Precondition("geodesic endpoints must differ".into()));
    }
    let atlas = covering_atlas(domain)?;
    let wit = lift_infimum_witness(&atlas, p, q, 0.0)?;
    let model = atlas.model();
    let (zp, zq) = (model.to_disk(wit.lift_p), model.to_disk(wit.lift_q));
    let samples = samples.max(2);
    let mut vertices = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        let z = poincare_geodesic(zp, zq, t)?;
        vertices.push(atlas.cover(model.from_disk(z)));
    }
    // Pin the endpoints exactly.
    vertices[0] = p;
    *vertices.last_mut().unwrap() = q;
    PolyPath::new(vertices)
}

/// Frame for rasterizing around a catalog domain. The half-plane is framed
/// around `focus`, a Euclidean disk that must be covered.
fn catalog_frame(domain: &DomainSpec, spacing: f64, focus: (Complex64, f64)) -> Result<Frame> {
    match domain.frame(spacing)? {
        Some(f) => Ok(f),
        None => Frame::square(focus.0, focus.1 * 1.1, spacing),
    }
}

/// Euclidean disk containing the half-plane ball `{d(center, ·) < radius}`.
pub(crate) fn half_plane_ball_disk(center: Complex64, radius: f64) -> (Complex64, f64) {
    let x0 = -center.re;
    let s = 2.0 * radius;
    (Complex64::new(-x0 * s.cosh(), center.im), x0 * s.sinh())
}

/// Dijkstra over cells with exact density midpoint weights, followed by
/// coarse-to-fine relaxation of the path's vertices; the result is the
/// hyperbolic length of the relaxed polygon (midpoint rule per segment),
/// whose segments are no longer than `spacing`.
pub fn inner_distance(
    domain: &DomainSpec,
    p: Complex64,
    q: Complex64,
    spacing: f64,
) -> Result<f64> {
    if !domain.is_catalog() {
        return Err(Error::Unsupported(
            "inner distance needs exact densities".into(),
        ));
    }
    if !(spacing > 0.0) {
        return Err(Error::NonPositive(format!("spacing {spacing}")));
    }
    domain.require(p)?;
    domain.require(q)?;
    if p == q {
        return Ok(0.0);
    }
    let focus = match domain {
        DomainSpec::HalfPlane => {
            // Circle through p and q centered on the imaginary axis.
            let yc = (q.norm_sqr() - p.norm_sqr()) / (2.0 * (q.im - p.im));
            if yc.is_finite() {
                let c = Complex64::new(0.0, yc);
                (c, (p - c).norm())
            } else {
                ((p + q) / 2.0, (p - q).norm())
            }
        }
        _ => (Complex64::new(0.0, 0.0), 1.0),
    };
    let frame = catalog_frame(domain, spacing, focus)?;
    let mask = domain.mask(&frame);
    let cell = |z: Complex64| -> Result<usize> {
        match frame.cell_of(z) {
            Some((i, j)) if mask.get(i, j) => Ok(j * frame.width + i),
            _ => Err(Error::OutOfDomain(format!(
                "{z} has no domain cell at spacing {spacing}"
            ))),
        }
    };
    let (src, dst) = (cell(p)?, cell(q)?);
    let offsets = Connectivity::Eight.offsets();
    let sp = dijkstra(frame.cell_count(), src, Some(dst), |u, out| {
        let (i, j) = ((u % frame.width) as isize, (u / frame.width) as isize);
        let a = frame.center_of_index(u);
        for &(di, dj) in offsets {
            if !mask.get_signed(i + di, j + dj) {
                continue;
            }
            let v = (j + dj) as usize * frame.width + (i + di) as usize;
            let b = frame.center_of_index(v);
            if let Ok(lambda) = domain.density((a + b) / 2.0) {
                out.push((v, (b - a).norm() * lambda));
            }
        }
    });
    let cells = sp
        .path_to(dst)
        .ok_or_else(|| Error::Disconnected(format!("no cell path joins {p} and {q}")))?;

    let mut route = Vec::with_capacity(cells.len() + 2);
    route.push(p);
    route.extend(
        cells
            .iter()
            .skip(1)
            .take(cells.len().saturating_sub(2))
            .map(|&c| frame.center_of_index(c)),
    );
    route.push(q);

    // Coarse start: every 8th route vertex.
    let stride = 8;
    let mut pts: Vec<Complex64> = route.iter().copied().step_by(stride).collect();
    if *pts.last().unwrap() != q {
        pts.push(q);
    }
    let relax = PolylineRelaxer { domain };
    for _ in 0..MAX_REFINEMENT {
        relax.run(&mut pts);
        if pts.windows(2).all(|w| (w[1] - w[0]).norm() <= spacing) {
            break;
        }
        let mut finer = Vec::with_capacity(2 * pts.len());
        for w in pts.windows(2) {
            finer.push(w[0]);
            if (w[1] - w[0]).norm() > spacing {
                finer.push((w[0] + w[1]) / 2.0);
            }
        }
        finer.push(q);
        pts = finer;
    }
    Ok(relax.total(&pts))
}

struct PolylineRelaxer<'a> {
    domain: &'a DomainSpec,
}

impl PolylineRelaxer<'_> {
    const MAX_SWEEPS: usize = 20_000;
    const STOP_REL: f64 = 1e-14;

    fn segment(&self, a: Complex64, b: Complex64) -> f64 {
        let len = (b - a).norm();
        if len == 0.0 {
            return 0.0;
        }
        for t in [0.0, 0.25, 0.75, 1.0] {
            if !self.domain.contains(a + (b - a) * t) {
                return f64::INFINITY;
            }
        }
        self.domain
            .density((a + b) / 2.0)
            .map_or(f64::INFINITY, |lambda| lambda * len)
    }

    fn total(&self, pts: &[Complex64]) -> f64 {
        pts.windows(2).map(|w| self.segment(w[0], w[1])).sum()
    }

    fn run(&self, pts: &mut [Complex64]) {
        let n = pts.len();
        if n < 3 {
            return;
        }
        for _ in 0..Self::MAX_SWEEPS {
            let mut gain = 0.0;
            for i in 1..n - 1 {
                let (a, v, b) = (pts[i - 1], pts[i], pts[i + 1]);
                let local = |x: Complex64| self.segment(a, x) + self.segment(x, b);
                let f0 = local(v);
                let (l1, l2) = ((v - a).norm(), (b - v).norm());
                let scale = l1.min(l2).max(1e-300);
                let h = 1e-6 * scale;
                // Moves are normal to the chord so the parametrization set by
                // subdivision is kept; tangential sliding only games the
                // midpoint rule.
                let normal = (b - a) * Complex64::new(0.0, 1.0) / (b - a).norm();
                let g = (local(v + normal * h) - local(v - normal * h)) / (2.0 * h);
                if !g.is_finite() {
                    continue;
                }
                let lambda = self.domain.density(v).unwrap_or(1.0);
                let stiffness = lambda * (1.0 / l1.max(1e-300) + 1.0 / l2.max(1e-300));
                let mut step = -normal * (g / stiffness);
                if step.norm() > 0.5 * scale {
                    step *= 0.5 * scale / step.norm();
                }
                for _ in 0..40 {
                    let cand = v + step;
                    let f1 = local(cand);
                    if f1 < f0 {
                        pts[i] = cand;
                        gain += f0 - f1;
                        break;
                    }
                    step /= 2.0;
                }
            }
            if gain <= Self::STOP_REL * self.total(pts) {
                break;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    Kobayashi,
    /// The dictionary surrogate of the Carathéodory distance.
    Caratheodory,
}

impl MetricKind {
    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Kobayashi => "kobayashi",
            MetricKind::Caratheodory => "caratheodory",
        }
    }
}

/// Rasterized open ball `{z : dist(center, z) < radius}`.
#[derive(Debug, Clone)]
pub struct MetricBall {
    pub domain: DomainSpec,
    pub center: Complex64,
    pub radius: f64,
    pub metric: MetricKind,
    pub frame: Frame,
    pub raster: Raster,
}

impl MetricBall {
    /// Grid-file bytes with a metadata block.
    pub fn export(&self) -> Vec<u8> {
        let meta = BallMetadata {
            metric: self.metric.name().into(),
            center: [self.center.re, self.center.im],
            radius: self.radius,
        };
        GridFile::from_raster(&self.frame, &self.raster, Some(meta)).to_bytes()
    }

    /// Domain cells of the ball's frame.
    pub fn domain_mask(&self) -> Raster {
        self.domain.mask(&self.frame)
    }
}

pub fn kob_ball_raster(
    domain: &DomainSpec,
    center: Complex64,
    radius: f64,
    spacing: f64,
) -> Result<MetricBall> {
    if !(radius > 0.0) {
        return Err(Error::NonPositive(format!("ball radius {radius}")));
    }
    let metric = CatalogMetric::new(domain)?;
    domain.require(center)?;
    let focus = match domain {
        DomainSpec::HalfPlane => half_plane_ball_disk(center, radius),
        _ => (Complex64::new(0.0, 0.0), 1.0),
    };
    let frame = catalog_frame(domain, spacing, focus)?;
    let in_domain = domain.mask(&frame);
    let mut raster = Raster::filled(frame.width, frame.height, false);
    for j in 0..frame.height {
        for i in 0..frame.width {
            if in_domain.get(i, j) && metric.distance(center, frame.center(i, j))? < radius {
                raster.set(i, j, true);
            }
        }
    }
    if let Some((i, j)) = frame.cell_of(center) {
        if in_domain.get(i, j) {
            raster.set(i, j, true);
        }
    }
    Ok(MetricBall {
        domain: domain.clone(),
        center,
        radius,
        metric: MetricKind::Kobayashi,
        frame,
        raster,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::poincare_ball_euclidean;
    use crate::grid::grid_annulus;
    use crate::topology::connectivity_number;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sqrt_tenth() -> f64 {
        0.1f64.sqrt()
    }

    /// Independent half-plane closed form: ρ = artanh(|w1 − w2| / |w1 + w̄2|).
    fn half_plane_oracle(w1: Complex64, w2: Complex64) -> f64 {
        ((w1 - w2).norm() / (w1 + w2.conj()).norm()).atanh()
    }

    #[test]
    fn punctured_lift_example() {
        let atlas = covering_atlas(&DomainSpec::PuncturedDisk).unwrap();
        let v = lift_infimum(&atlas, c(1.0 / E, 0.0), c(1.0 / (E * E), 0.0), 1e-10).unwrap();
        let oracle = half_plane_oracle(c(-1.0, 0.0), c(-2.0, 0.0));
        assert!((oracle - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.346573590).abs() < 1e-8);
        assert_eq!(
            lift_infimum(&atlas, c(0.3, 0.2), c(0.3, 0.2), 1e-10).unwrap(),
            0.0
        );
    }

    #[test]
    fn annulus_antipodal_lift() {
        let atlas = covering_atlas(&DomainSpec::Annulus(0.1)).unwrap();
        let s = sqrt_tenth();
        let v = lift_infimum(&atlas, c(s, 0.0), c(-s, 0.0), 1e-12).unwrap();
        // Oracle: density line integral along the core circle.
        let n = 20_000;
        let mut length = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) * PI / n as f64;
            length += DomainSpec::Annulus(0.1)
                .density(Complex64::from_polar(s, t))
                .unwrap()
                * s
                * PI
                / n as f64;
        }
        assert!((v - length).abs() < 1e-6, "{v} vs {length}");
        assert!((v - PI * PI / (2.0 * 10f64.ln())).abs() < 1e-10);
        assert!((v - 2.14323).abs() < 1e-3);
    }

    #[test]
    fn lift_failure_at_puncture() {
        let atlas = covering_atlas(&DomainSpec::PuncturedDisk).unwrap();
        assert_eq!(
            lift_infimum(&atlas, c(0.0, 0.0), c(0.5, 0.0), 1e-9)
                .unwrap_err()
                .name(),
            "LiftFailure"
        );
    }

    #[test]
    fn kob_distance_examples() {
        let d = kob_distance(&DomainSpec::Disk, c(0.0, 0.0), c(0.5, 0.0), 1e-9).unwrap();
        assert_eq!(d.lower, d.upper);
        assert!((d.upper - 0.549306144).abs() < 1e-9);
        let d = kob_distance(
            &DomainSpec::PuncturedDisk,
            c(1.0 / E, 0.0),
            c(1.0 / (E * E), 0.0),
            1e-8,
        )
        .unwrap();
        assert!((d.upper - 0.346573590).abs() < 1e-8 && d.upper - d.lower <= 1e-8 + 1e-15);
        let hp = kob_distance(&DomainSpec::HalfPlane, c(-1.0, 0.3), c(-0.2, -1.0), 1e-9).unwrap();
        assert!((hp.upper - half_plane_oracle(c(-1.0, 0.3), c(-0.2, -1.0))).abs() < 1e-12);
        assert_eq!(
            kob_distance(&DomainSpec::Annulus(0.1), c(0.05, 0.0), c(0.5, 0.0), 1e-9)
                .unwrap_err()
                .name(),
            "OutOfDomain"
        );
    }

    #[test]
    fn grid_interval_contains_analytic() {
        let g = grid_annulus(0.25, 0.02).unwrap();
        let grid = DomainSpec::Grid(g);
        let ann = DomainSpec::Annulus(0.25);
        let atlas = covering_atlas(&ann).unwrap();
        let pairs = [
            (c(0.5, 0.0), c(-0.5, 0.05)),
            (c(0.4, 0.3), c(0.45, 0.35)),
            (c(0.0, 0.6), c(0.7, 0.0)),
            (c(-0.3, -0.3), c(0.2, -0.6)),
        ];
        for (p, q) in pairs {
            let exact = lift_infimum(&atlas, p, q, 1e-12).unwrap();
            let iv = kob_distance(&grid, p, q, 1e-9).unwrap();
            assert!(iv.certified && iv.lower <= iv.upper);
            assert!(iv.contains(exact, 0.0), "{p} {q}: {exact} not in {iv:?}");
        }
    }

    #[test]
    fn curve_length_examples() {
        let path = PolyPath::new(vec![c(0.2, 0.1), c(0.2, 0.1)]).unwrap();
        assert_eq!(curve_length(&DomainSpec::Disk, &path).unwrap().value, 0.0);
        let path = PolyPath::new(vec![c(0.0, 0.0), c(0.5, 0.0)]).unwrap();
        let l = curve_length(&DomainSpec::Disk, &path).unwrap();
        assert!((l.value - 0.5f64.atanh()).abs() < 1e-12 && !l.upper_bound_only);

        let s = sqrt_tenth();
        let verts: Vec<_> = (0..256)
            .map(|k| Complex64::from_polar(s, PI * k as f64 / 255.0))
            .collect();
        let l = curve_length(&DomainSpec::Annulus(0.1), &PolyPath::new(verts).unwrap()).unwrap();
        assert!(
            (l.value - PI * PI / (2.0 * 10f64.ln())).abs() < 1e-3,
            "{}",
            l.value
        );

        let bad = PolyPath::new(vec![c(0.5, 0.0), c(1.5, 0.0)]).unwrap();
        assert_eq!(
            curve_length(&DomainSpec::Disk, &bad).unwrap_err().name(),
            "OutOfDomain"
        );
    }

    #[test]
    fn curve_length_dominates_distance() {
        let d = DomainSpec::Annulus(0.2);
        let path =
            PolyPath::new(vec![c(0.5, 0.0), c(0.3, 0.4), c(-0.1, 0.6), c(-0.5, 0.1)]).unwrap();
        let l = curve_length(&d, &path).unwrap().value;
        let dist = kob_distance(&d, c(0.5, 0.0), c(-0.5, 0.1), 1e-12)
            .unwrap()
            .upper;
        assert!(l >= dist);
    }

    #[test]
    fn grid_curve_length_is_flagged_upper_bound() {
        let g = DomainSpec::Grid(grid_annulus(0.25, 0.02).unwrap());
        let path = PolyPath::new(vec![c(0.5, 0.0), c(0.0, 0.5)]).unwrap();
        let l = curve_length(&g, &path).unwrap();
        assert!(l.upper_bound_only);
        let exact = kob_distance(&DomainSpec::Annulus(0.25), c(0.5, 0.0), c(0.0, 0.5), 1e-12)
            .unwrap()
            .upper;
        assert!(l.value >= exact);
    }

    #[test]
    fn inner_distance_examples() {
        let v = inner_distance(&DomainSpec::Disk, c(0.0, 0.0), c(0.5, 0.0), 0.01).unwrap();
        assert!((v - 0.549306144).abs() <= 5e-3, "{v}");
        assert_eq!(
            inner_distance(&DomainSpec::Disk, c(0.3, 0.0), c(0.3, 0.0), 0.01).unwrap(),
            0.0
        );
        let s = sqrt_tenth();
        let v = inner_distance(&DomainSpec::Annulus(0.1), c(s, 0.0), c(-s, 0.0), 0.005).unwrap();
        assert!((v - 2.14323).abs() <= 2e-2, "{v}");
    }

    #[test]
    fn inner_distance_half_plane() {
        let (p, q) = (c(-0.5, 0.0), c(-0.3, 0.8));
        let v = inner_distance(&DomainSpec::HalfPlane, p, q, 0.01).unwrap();
        assert!((v - half_plane_oracle(p, q)).abs() <= 5e-3, "{v}");
    }

    #[test]
    fn geodesic_examples() {
        let g = geodesic(&DomainSpec::Disk, c(-0.5, 0.0), c(0.5, 0.0), 257).unwrap();
        assert!(g.vertices()[128].norm() < 1e-12);

        let g = geodesic(
            &DomainSpec::PuncturedDisk,
            c(1.0 / E, 0.0),
            c(1.0 / (E * E), 0.0),
            64,
        )
        .unwrap();
        assert!(g
            .vertices()
            .iter()
            .all(|v| v.im.abs() < 1e-12 && v.re > 0.0));

        let s = sqrt_tenth();
        let g = geodesic(&DomainSpec::Annulus(0.1), c(s, 0.0), c(-s, 0.0), 256).unwrap();
        assert!(g.vertices().iter().all(|v| (v.norm() - s).abs() < 1e-9));
        let len = curve_length(&DomainSpec::Annulus(0.1), &g).unwrap().value;
        let d = kob_distance(&DomainSpec::Annulus(0.1), c(s, 0.0), c(-s, 0.0), 1e-12).unwrap();
        assert!(len <= d.upper + 1e-4);
    }

    #[test]
    fn disk_ball_matches_apollonius() {
        let radius = 0.5f64.atanh();
        let h = 0.01;
        let ball = kob_ball_raster(&DomainSpec::Disk, c(0.0, 0.0), radius, h).unwrap();
        let (ec, er) = poincare_ball_euclidean(c(0.0, 0.0), radius).unwrap();
        for j in 0..ball.frame.height {
            for i in 0..ball.frame.width {
                let z = ball.frame.center(i, j);
                let gap = (z - ec).norm() - er;
                if ball.raster.get(i, j) {
                    assert!(gap <= 2.0 * h);
                } else {
                    assert!(gap >= -2.0 * h);
                }
            }
        }
    }

    #[test]
    fn annulus_ball_connectivity() {
        let s = sqrt_tenth();
        let small = kob_ball_raster(&DomainSpec::Annulus(0.1), c(s, 0.0), 0.5, 0.02).unwrap();
        assert_eq!(connectivity_number(&small.raster).unwrap(), 0);
        let big = kob_ball_raster(&DomainSpec::Annulus(0.1), c(s, 0.0), 2.5, 0.02).unwrap();
        assert_eq!(connectivity_number(&big.raster).unwrap(), 1);
        assert!(small.raster.is_subset_of(&big.raster));
    }

    #[test]
    fn half_plane_ball_is_framed() {
        let ball = kob_ball_raster(&DomainSpec::HalfPlane, c(-0.5, 0.2), 0.8, 0.02).unwrap();
        assert!(ball.raster.border_is_clear());
        assert_eq!(connectivity_number(&ball.raster).unwrap(), 0);
    }

    #[test]
    fn ball_export_carries_metadata() {
        let ball = kob_ball_raster(&DomainSpec::Disk, c(0.1, 0.0), 0.3, 0.1).unwrap();
        let bytes = ball.export();
        let file = GridFile::parse(&bytes).unwrap();
        let meta = file.metadata.unwrap();
        assert_eq!(meta.metric, "kobayashi");
        assert_eq!(meta.center, [0.1, 0.0]);
        assert_eq!(file.rows.len(), ball.frame.height);
    }

    fn point_in(domain: DomainSpec) -> impl Strategy<Value = Complex64> {
        (0.0..1.0f64, 0.0..TAU).prop_map(move |(t, th)| match domain {
            DomainSpec::Annulus(r) => Complex64::from_polar(r + (1.0 - r) * (0.02 + 0.96 * t), th),
            DomainSpec::HalfPlane => c(-0.05 - 2.0 * t, 3.0 * th.sin()),
            _ => Complex64::from_polar(0.02 + 0.96 * t, th),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn symmetric_and_triangle(
            p in point_in(DomainSpec::Annulus(0.2)),
            q in point_in(DomainSpec::Annulus(0.2)),
            r in point_in(DomainSpec::Annulus(0.2)),
        ) {
            let m = CatalogMetric::new(&DomainSpec::Annulus(0.2)).unwrap();
            let (pq, qp) = (m.distance(p, q).unwrap(), m.distance(q, p).unwrap());
            prop_assert!((pq - qp).abs() <= 1e-8);
            let pr = m.distance(p, r).unwrap();
            let qr = m.distance(q, r).unwrap();
            prop_assert!(pr <= pq + qr + 1e-8);
        }

        #[test]
        fn distance_decreasing_inclusions(p in point_in(DomainSpec::Annulus(0.3)), q in point_in(DomainSpec::Annulus(0.3))) {
            let a = CatalogMetric::new(&DomainSpec::Annulus(0.3)).unwrap().distance(p, q).unwrap();
            let pd = CatalogMetric::new(&DomainSpec::PuncturedDisk).unwrap().distance(p, q).unwrap();
            let d = poincare_distance(p, q).unwrap();
            prop_assert!(pd <= a + 1e-8 && d <= pd + 1e-8);
        }

        #[test]
        fn disk_coincides_with_poincare(p in point_in(DomainSpec::Disk), q in point_in(DomainSpec::Disk)) {
            let iv = kob_distance(&DomainSpec::Disk, p, q, 1e-9).unwrap();
            prop_assert_eq!(iv.upper, poincare_distance(p, q).unwrap());
            prop_assert_eq!(iv.lower, iv.upper);
        }
    }

    #[test]
    fn ball_monotone_in_radius() {
        let d = DomainSpec::PuncturedDisk;
        let mut prev: Option<Raster> = None;
        for r in [0.2, 0.5, 1.0, 1.5] {
            let b = kob_ball_raster(&d, c(0.4, 0.1), r, 0.04).unwrap().raster;
            if let Some(p) = &prev {
                assert!(p.is_subset_of(&b));
            }
            prev = Some(b);
        }
    }
}
