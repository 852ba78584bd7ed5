//! Carathéodory distance through a finite dictionary of holomorphic maps
//! into the unit disk.
//!
//! Each dictionary entry is a genuine competitor in the supremum defining
//! `c_D`, so `max_f ρ(f(p), f(q))` is a certified lower bound and is itself a
//! pseudo-distance of Carathéodory type: distance-decreasing, dominated by
//! the Kobayashi distance, and with `log` subharmonic in each variable.

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domains::{DomainSpec, Frame};
use crate::error::{Error, Result};
use crate::geometry::{disk_automorphism, poincare_distance};
use crate::grid::GridDomain;
use crate::kobayashi::{half_plane_ball_disk, kob_distance, DistanceInterval};
use crate::topology::{
    complement_components, connectivity_number, flood_components, Connectivity, Raster,
};

const DICTIONARY_SEED: u64 = 0x00c0_ffee_d15c;
const MOBIUS_PER_ENTRY: usize = 8;
const JOUKOWSKI_ANGLES: usize = 8;

type MapFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// One holomorphic map `D → 𝔻` with a descriptive tag.
#[derive(Clone)]
pub struct MapEntry {
    tag: String,
    f: Arc<MapFn>,
}

impl MapEntry {
    pub fn new(
        tag: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        MapEntry {
            tag: tag.into(),
            f: Arc::new(f),
        }
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    /// `g ∘ self` for a disk automorphism `g`.
    fn post_mobius(&self, a: Complex64, theta: f64) -> MapEntry {
        let g = disk_automorphism(a, theta).expect("automorphism center inside the disk");
        let f = self.f.clone();
        MapEntry {
            tag: format!(
                "Möbius({:.3},{:.3}; {:.3}) ∘ {}",
                a.re, a.im, theta, self.tag
            ),
            f: Arc::new(move |z| g.apply_finite(f(z))),
        }
    }
}

impl fmt::Debug for MapEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapEntry").field("tag", &self.tag).finish()
    }
}

/// Finite family of holomorphic maps into the unit disk, validated on
/// sample points of the domain.
#[derive(Debug, Clone)]
pub struct MapDictionary {
    entries: Vec<MapEntry>,
}

impl MapDictionary {
    /// Validates every entry on the sample points of `domain`.
    pub fn new(domain: &DomainSpec, entries: Vec<MapEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation(
                "a dictionary needs at least one map".into(),
            ));
        }
        let samples = sample_points(domain)?;
        for e in &entries {
            for &z in &samples {
                let w = e.apply(z);
                if !(w.re.is_finite() && w.im.is_finite() && w.norm_sqr() < 1.0) {
                    return Err(Error::Validation(format!(
                        "map '{}' sends {z} to {w}, outside the unit disk",
                        e.tag
                    )));
                }
            }
        }
        Ok(MapDictionary { entries })
    }

    pub fn entries(&self) -> &[MapEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Dictionary enlarged by validated extra entries.
    pub fn extended(&self, domain: &DomainSpec, extra: Vec<MapEntry>) -> Result<Self> {
        let extra = MapDictionary::new(domain, extra)?;
        let mut entries = self.entries.clone();
        entries.extend(extra.entries);
        Ok(MapDictionary { entries })
    }
}

fn sample_points(domain: &DomainSpec) -> Result<Vec<Complex64>> {
    let frame = match domain {
        DomainSpec::HalfPlane => Frame::square(Complex64::new(-2.0, 0.0), 2.0, 0.05)?,
        DomainSpec::Grid(g) => *g.frame(),
        _ => Frame::unit(0.02)?,
    };
    let mask = domain.mask(&frame);
    let mut pts = Vec::new();
    for j in 0..frame.height {
        for i in 0..frame.width {
            if mask.get(i, j) {
                pts.push(frame.center(i, j));
            }
        }
    }
    Ok(pts)
}

fn inclusion() -> MapEntry {
    MapEntry::new("inclusion", |z| z)
}

/// Base maps of a domain, before Möbius post-composition.
fn base_entries(domain: &DomainSpec) -> Vec<MapEntry> {
    let one = Complex64::new(1.0, 0.0);
    match domain {
        DomainSpec::Disk => vec![MapEntry::new("identity", |z| z)],
        DomainSpec::HalfPlane => vec![MapEntry::new("Cayley (z+1)/(z-1)", move |z| {
            (z + one) / (z - one)
        })],
        DomainSpec::PuncturedDisk => vec![inclusion()],
        &DomainSpec::Annulus(r) => {
            let mut v = vec![
                inclusion(),
                MapEntry::new(format!("reciprocal about 0 with radius {r}"), move |z| {
                    r / z
                }),
            ];
            for k in 0..JOUKOWSKI_ANGLES {
                let rot = Complex64::from_polar(r, TAU * k as f64 / JOUKOWSKI_ANGLES as f64);
                v.push(MapEntry::new(
                    format!(
                        "Joukowski (z - e^(i{:.4})r/z)/(1+r)",
                        TAU * k as f64 / JOUKOWSKI_ANGLES as f64
                    ),
                    move |z| (z - rot / z) / (1.0 + r),
                ));
            }
            v
        }
        DomainSpec::Grid(g) => grid_entries(g),
    }
}

/// Rescaled inclusion plus, per hole with center `w0`, the reciprocal
/// `r0/(z − w0)` and Joukowski-type combinations. Radii are measured over
/// whole domain squares, so each bound holds on the domain, not just on
/// cell centers.
fn grid_entries(g: &GridDomain) -> Vec<MapEntry> {
    let f = *g.frame();
    let h = f.spacing;
    let mask = g.mask();
    let cells: Vec<Complex64> = (0..f.cell_count())
        .filter(|&idx| mask.cells()[idx])
        .map(|idx| f.center_of_index(idx))
        .collect();
    let (mut lo, mut hi) = (cells[0], cells[0]);
    for z in &cells {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let c = (lo + hi) / 2.0;
    let big_r = cells.iter().map(|z| (z - c).norm()).fold(0.0, f64::max) + h;
    let mut out = vec![MapEntry::new(
        format!("inclusion rescaled about {c} by {big_r}"),
        move |z| (z - c) / big_r,
    )];

    let comps = complement_components(mask);
    for &label in &comps.bounded {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut n = 0usize;
        for (idx, &l) in comps.labels.labels().iter().enumerate() {
            if l == label {
                sum += f.center_of_index(idx);
                n += 1;
            }
        }
        let w0 = sum / n as f64;
        let r0 = cells
            .iter()
            .map(|z| (z - w0).norm())
            .fold(f64::INFINITY, f64::min)
            - h;
        if !(r0 > 0.0) || g.contains(w0) {
            continue;
        }
        let rw = cells.iter().map(|z| (z - w0).norm()).fold(0.0, f64::max) + h;
        out.push(MapEntry::new(
            format!("reciprocal about hole center {w0} with radius {r0}"),
            move |z| r0 / (z - w0),
        ));
        for k in 0..JOUKOWSKI_ANGLES {
            let theta = TAU * k as f64 / JOUKOWSKI_ANGLES as f64;
            let rot = Complex64::from_polar(r0, theta);
            out.push(MapEntry::new(
                format!("Joukowski about hole center {w0}, angle {theta:.4}"),
                move |z| ((z - w0) / rw - rot / (z - w0)) / 2.0,
            ));
        }
    }
    out
}

/// Base maps of the domain together with seeded random disk-automorphism
/// post-compositions of each.
pub fn default_dictionary(domain: &DomainSpec) -> Result<MapDictionary> {
    domain.validate()?;
    let base = base_entries(domain);
    let mut entries = base.clone();
    if !matches!(domain, DomainSpec::Disk) {
        let mut rng = ChaCha8Rng::seed_from_u64(DICTIONARY_SEED);
        for e in &base {
            for _ in 0..MOBIUS_PER_ENTRY {
                let a = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TAU));
                entries.push(e.post_mobius(a, rng.gen_range(0.0..TAU)));
            }
        }
    }
    MapDictionary::new(domain, entries)
}

pub fn car_lower(
    domain: &DomainSpec,
    p: Complex64,
    q: Complex64,
    dict: &MapDictionary,
) -> Result<f64> {
    domain.require(p)?;
    domain.require(q)?;
    if p == q {
        return Ok(0.0);
    }
    let mut best = 0.0f64;
    for e in dict.entries() {
        let d = poincare_distance(e.apply(p), e.apply(q)).map_err(|_| {
            Error::Inconsistent(format!("dictionary map '{}' left the unit disk", e.tag))
        })?;
        best = best.max(d);
    }
    Ok(best)
}

pub fn car_interval(
    domain: &DomainSpec,
    p: Complex64,
    q: Complex64,
    dict: &MapDictionary,
    tol: f64,
) -> Result<DistanceInterval> {
    let lower = car_lower(domain, p, q, dict)?;
    let upper = kob_distance(domain, p, q, tol)?.upper;
    Ok(DistanceInterval {
        lower: lower.min(upper),
        upper,
        certified: true,
    })
}

/// Real values on the cell centers of a frame; non-finite values mark cells
/// where the function is not given.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid {
    pub frame: Frame,
    pub values: Vec<f64>,
}

impl ScalarGrid {
    pub fn from_fn(frame: Frame, mut f: impl FnMut(Complex64) -> f64) -> Self {
        let values = (0..frame.cell_count())
            .map(|idx| f(frame.center_of_index(idx)))
            .collect();
        ScalarGrid { frame, values }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.frame.width + i]
    }

    /// Bilinear interpolation; NaN when any of the four surrounding values
    /// is missing.
    pub fn sample(&self, z: Complex64) -> f64 {
        let f = &self.frame;
        let x = (z.re - f.origin.re) / f.spacing;
        let y = (z.im - f.origin.im) / f.spacing;
        let (i0, j0) = (x.floor(), y.floor());
        if i0 < 0.0 || j0 < 0.0 || i0 + 1.0 >= f.width as f64 || j0 + 1.0 >= f.height as f64 {
            return f64::NAN;
        }
        let (i, j) = (i0 as usize, j0 as usize);
        let (tx, ty) = (x - i0, y - j0);
        let v00 = self.get(i, j);
        let v10 = self.get(i + 1, j);
        let v01 = self.get(i, j + 1);
        let v11 = self.get(i + 1, j + 1);
        (1.0 - ty) * ((1.0 - tx) * v00 + tx * v10) + ty * ((1.0 - tx) * v01 + tx * v11)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubharmonicityReport {
    pub checked: usize,
    pub violations: usize,
    /// Largest `u(z) − mean` observed; negative when every check passes
    /// with room to spare.
    pub worst_gap: f64,
}

const CIRCLE_POINTS: usize = 32;

/// Sub-mean-value check of `u` on circles of the given radii about every
/// cell whose circles lie inside the domain and where `u` is given.
pub fn subharmonicity_check(
    domain: &DomainSpec,
    u: &ScalarGrid,
    radii: &[f64],
) -> Result<SubharmonicityReport> {
    let max_r = radii.iter().copied().fold(0.0, f64::max);
    if radii.is_empty() || !(radii.iter().all(|&r| r > 0.0)) {
        return Err(Error::NonPositive(
            "subharmonicity radii must be positive".into(),
        ));
    }
    let f = &u.frame;
    let mut report = SubharmonicityReport {
        checked: 0,
        violations: 0,
        worst_gap: f64::NEG_INFINITY,
    };
    let ring: Vec<Complex64> = (0..CIRCLE_POINTS)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / CIRCLE_POINTS as f64))
        .collect();
    for j in 0..f.height {
        'cell: for i in 0..f.width {
            let z = f.center(i, j);
            let uz = u.get(i, j);
            if !uz.is_finite() || domain.clearance(z) <= max_r + 2.0 * f.spacing {
                continue;
            }
            let mut gaps = Vec::with_capacity(radii.len());
            for &r in radii {
                let mut sum = 0.0;
                for w in &ring {
                    let v = u.sample(z + w * r);
                    if !v.is_finite() {
                        continue 'cell;
                    }
                    sum += v;
                }
                gaps.push(uz - sum / CIRCLE_POINTS as f64);
            }
            report.checked += 1;
            let tol = 1e-3 * (1.0 + uz.abs());
            for g in gaps {
                report.worst_gap = report.worst_gap.max(g);
                if g > tol {
                    report.violations += 1;
                }
            }
        }
    }
    if report.checked == 0 {
        return Err(Error::MarginTooSmall(max_r));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallComponent {
    pub id: usize,
    pub mask: Raster,
    pub cell_count: usize,
    pub relatively_compact: bool,
    pub connectivity_number: usize,
    pub complement_component_count: usize,
    /// Bounded complement components lying wholly among domain cells more
    /// than `2·spacing` from the boundary.
    pub lemma_violations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallComponentReport {
    pub frame: Frame,
    pub ball: Raster,
    pub components: Vec<BallComponent>,
}

impl BallComponentReport {
    pub fn lemma_violations(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.relatively_compact)
            .map(|c| c.lemma_violations)
            .sum()
    }

    /// Fails with a theorem violation when a relatively compact component
    /// has a hole compactly inside the domain.
    pub fn ensure_lemma(&self) -> Result<()> {
        match self.lemma_violations() {
            0 => Ok(()),
            n => Err(Error::TheoremViolation(format!(
                "{n} complement component(s) of relatively compact ball components lie compactly inside the domain"
            ))),
        }
    }

    pub fn export(&self) -> String {
        let mut s = String::new();
        for c in &self.components {
            let _ = writeln!(
                s,
                "component {{id = {}, cell_count = {}, relatively_compact = {}, connectivity_number = {}}}",
                c.id, c.cell_count, c.relatively_compact, c.connectivity_number
            );
        }
        s
    }
}

/// Domain cells 8-adjacent to a non-domain cell (or to the frame edge).
pub(crate) fn boundary_layer(domain_mask: &Raster) -> Raster {
    Raster::from_fn(domain_mask.width(), domain_mask.height(), |i, j| {
        domain_mask.get(i, j)
            && Connectivity::Eight
                .offsets()
                .iter()
                .any(|&(di, dj)| !domain_mask.get_signed(i as isize + di, j as isize + dj))
    })
}

/// Frame for rasterizing the dictionary ball; the half-plane frame covers
/// the exact ball of the Cayley entry with margin.
fn ball_frame(domain: &DomainSpec, p: Complex64, radius: f64, spacing: f64) -> Result<Frame> {
    match domain.frame(spacing)? {
        Some(f) => Ok(f),
        None => {
            let (c, r) = half_plane_ball_disk(p, radius);
            Frame::square(c, r * 1.1, spacing)
        }
    }
}

pub fn car_ball_components(
    domain: &DomainSpec,
    p: Complex64,
    radius: f64,
    dict: &MapDictionary,
    spacing: f64,
) -> Result<BallComponentReport> {
    domain.require(p)?;
    if !(radius > 0.0) {
        return Err(Error::NonPositive(format!("ball radius {radius}")));
    }
    let frame = ball_frame(domain, p, radius, spacing)?;
    let in_domain = domain.mask(&frame);
    let mut ball = Raster::filled(frame.width, frame.height, false);
    for j in 0..frame.height {
        for i in 0..frame.width {
            if in_domain.get(i, j) && car_lower(domain, p, frame.center(i, j), dict)? < radius {
                ball.set(i, j, true);
            }
        }
    }
    if let Some((i, j)) = frame.cell_of(p) {
        if in_domain.get(i, j) {
            ball.set(i, j, true);
        }
    }
    if ball.is_empty() {
        return Err(Error::EmptyBall);
    }
    let layer = boundary_layer(&in_domain);
    let near_boundary = Raster::from_fn(frame.width, frame.height, |i, j| {
        layer.get(i, j)
            || Connectivity::Eight
                .offsets()
                .iter()
                .any(|&(di, dj)| layer.get_signed(i as isize + di, j as isize + dj))
    });
    let labels = flood_components(&ball, Connectivity::Four);
    let mut components = Vec::with_capacity(labels.component_count());
    for id in 1..=labels.component_count() {
        let mask = labels.component_mask(id);
        let relatively_compact = mask.and(&near_boundary).is_empty();
        let n = connectivity_number(&mask)?;
        let holes = complement_components(&mask);
        let lemma_violations = holes
            .bounded
            .iter()
            .filter(|&&l| {
                holes.labels.labels().iter().enumerate().all(|(idx, &m)| {
                    m != l || {
                        let (i, j) = (idx % frame.width, idx / frame.width);
                        in_domain.get(i, j) && domain.clearance(frame.center(i, j)) > 2.0 * spacing
                    }
                })
            })
            .count();
        components.push(BallComponent {
            id,
            cell_count: mask.count(),
            mask,
            relatively_compact,
            connectivity_number: n,
            complement_component_count: n + 1,
            lemma_violations,
        });
    }
    Ok(BallComponentReport {
        frame,
        ball,
        components,
    })
}
