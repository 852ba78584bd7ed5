//! The acceptance suite: one self-contained check per numbered criterion,
//! each reporting what it measured against what it expected.

use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::caratheodory::{
    car_ball_components, car_lower, default_dictionary, subharmonicity_check, ScalarGrid,
};
use crate::conformal::{
    canonical_annulus_radius, cartan_check, catalog_maps, grid_modulus, isotropy_group,
    maskit_demo, watt_check, AnnulusAutomorphism, HoloSelfMap, MaskitVerdict, WattVerdict,
};
use crate::domains::{covering_atlas, half_plane_distance, DomainSpec, Frame};
use crate::export::fmt_g;
use crate::geometry::{disk_automorphism, poincare_distance, ComplexPoint};
use crate::grid::{grid_annulus, grid_pair_of_pants, GridDomain};
use crate::kobayashi::{
    curve_length, geodesic, inner_distance, kob_ball_raster, kob_distance, lift_infimum,
    CatalogMetric,
};
use crate::topology::{
    complement_components, connectivity_number, nerve_cover, separating_cycle, winding_number,
};
use crate::Result;

const SEED: u64 = 0x5eed_0001;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub measured: String,
    pub expected: String,
}

impl CriterionResult {
    /// `criterion 3 PASS annulus_kobayashi | measured: … | expected: …`
    pub fn line(&self) -> String {
        format!(
            "criterion {} {} {} | measured: {} | expected: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.expected
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Criterion 11 at spacing 0.02 with a 5% tolerance.
    Quick,
    /// Criterion 11 at spacing 0.01 with a 2% tolerance.
    Full,
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "poincare_exactness"),
    (2, "covering_formula"),
    (3, "annulus_kobayashi"),
    (4, "kobayashi_ball_connectivity"),
    (5, "caratheodory_ball_components"),
    (6, "separation"),
    (7, "inner_distance"),
    (8, "distance_decreasing"),
    (9, "subharmonicity"),
    (10, "self_map_suite"),
    (11, "canonical_annulus"),
];

struct Outcome {
    passed: bool,
    measured: String,
    expected: String,
}

fn outcome(
    passed: bool,
    measured: impl Into<String>,
    expected: impl Into<String>,
) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        measured: measured.into(),
        expected: expected.into(),
    })
}

pub fn run_criterion(id: u8, mode: Mode) -> Option<CriterionResult> {
    let &(_, name) = CRITERIA.iter().find(|(i, _)| *i == id)?;
    let res = match id {
        1 => poincare_exactness(),
        2 => covering_formula(),
        3 => annulus_kobayashi(),
        4 => kobayashi_ball_connectivity(),
        5 => caratheodory_ball_components(),
        6 => separation(),
        7 => inner_distance_convergence(),
        8 => distance_decreasing(),
        9 => subharmonicity(),
        10 => self_map_suite(),
        _ => canonical_annulus(mode),
    };
    let o = res.unwrap_or_else(|e| Outcome {
        passed: false,
        measured: format!("error {}: {e}", e.name()),
        expected: "no error".into(),
    });
    Some(CriterionResult {
        id,
        name,
        passed: o.passed,
        measured: o.measured,
        expected: o.expected,
    })
}

pub fn run_all(mode: Mode) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter_map(|&(id, _)| run_criterion(id, mode))
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn disk_point(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(max * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

fn catalog_point(rng: &mut ChaCha8Rng, d: &DomainSpec) -> Complex64 {
    let t: f64 = rng.gen_range(0.02..0.98);
    let th = rng.gen_range(0.0..TAU);
    match d {
        DomainSpec::Annulus(r) => Complex64::from_polar(r + (1.0 - r) * t, th),
        DomainSpec::HalfPlane => c(-0.05 - 3.0 * t, rng.gen_range(-4.0..4.0)),
        _ => Complex64::from_polar(t, th),
    }
}

fn poincare_exactness() -> Result<Outcome> {
    let a = poincare_distance(c(0.0, 0.0), c(0.5, 0.0))?;
    let b = poincare_distance(c(0.5, 0.0), c(-0.5, 0.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let m = disk_automorphism(disk_point(&mut rng, 0.9), rng.gen_range(0.0..TAU))?;
        let (z, w) = (disk_point(&mut rng, 0.9), disk_point(&mut rng, 0.9));
        let before = poincare_distance(z, w)?;
        let after = poincare_distance(m.apply_finite(z), m.apply_finite(w))?;
        worst = worst.max((before - after).abs());
    }
    let ok = (a - 0.549306144).abs() <= 1e-9 && (b - 1.098612289).abs() <= 1e-9 && worst <= 1e-9;
    outcome(
        ok,
        format!(
            "rho(0,0.5)={} rho(0.5,-0.5)={} max_isometry_defect={}",
            fmt_g(a),
            fmt_g(b),
            fmt_g(worst)
        ),
        "0.549306144±1e-9, 1.098612289±1e-9, defect<=1e-9 over 1000 automorphisms",
    )
}

fn covering_formula() -> Result<Outcome> {
    let (p, q) = (c(1.0 / E, 0.0), c(1.0 / (E * E), 0.0));
    let iv = kob_distance(&DomainSpec::PuncturedDisk, p, q, 1e-10)?;
    let closed = half_plane_distance(c(-1.0, 0.0), c(-2.0, 0.0));
    let ok =
        iv.certified && (iv.upper - 0.346573590).abs() <= 1e-8 && (iv.upper - closed).abs() <= 1e-8;
    outcome(
        ok,
        format!(
            "deck={} half_plane={} certified={}",
            fmt_g(iv.upper),
            fmt_g(closed),
            iv.certified
        ),
        "0.346573590±1e-8, agreeing with the half-plane closed form",
    )
}

fn annulus_kobayashi() -> Result<Outcome> {
    let d = DomainSpec::Annulus(0.1);
    let s = 0.1f64.sqrt();
    let (p, q) = (c(s, 0.0), c(-s, 0.0));
    let atlas = covering_atlas(&d)?;
    let inf = lift_infimum(&atlas, p, q, 1e-12)?;
    let len = curve_length(&d, &geodesic(&d, p, q, 1024)?)?.value;
    let candidate = PI * PI / (2.0 * 10f64.ln());
    let ok = (inf - len).abs() <= 1e-3
        && (inf - candidate).abs() <= 1e-3
        && (inf - 2.143235).abs() <= 1e-3;
    outcome(
        ok,
        format!(
            "deck_infimum={} geodesic_length={} pi^2/(2 ln 10)={}",
            fmt_g(inf),
            fmt_g(len),
            fmt_g(candidate)
        ),
        "all three within 1e-3 of each other and of 2.143235",
    )
}

fn kobayashi_ball_connectivity() -> Result<Outcome> {
    let d = DomainSpec::Annulus(0.1);
    let s = 0.1f64.sqrt();
    let mut found = Vec::new();
    let mut ok = true;
    for (radius, expected) in [(0.5, 0), (2.5, 1)] {
        let ball = kob_ball_raster(&d, c(s, 0.0), radius, 0.02)?;
        let conn = connectivity_number(&ball.raster)?;
        let rank = nerve_cover(&d, &ball, 0.5)?.cycle_rank;
        ok &= conn == expected && rank == expected;
        found.push(format!("R={radius}: connectivity={conn} cycle_rank={rank}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut disk_max = 0;
    for _ in 0..20 {
        let center = disk_point(&mut rng, 0.8);
        let radius = rng.gen_range(0.1..2.5);
        let ball = kob_ball_raster(&DomainSpec::Disk, center, radius, 0.02)?;
        disk_max = disk_max.max(connectivity_number(&ball.raster)?);
    }
    ok &= disk_max == 0;
    outcome(
        ok,
        format!(
            "{}; max disk-ball connectivity over 20={disk_max}",
            found.join(", ")
        ),
        "R=0.5 → 0, R=2.5 → 1 for both measures; disk balls 0",
    )
}

fn caratheodory_ball_components() -> Result<Outcome> {
    let cases = [
        (DomainSpec::Annulus(0.1), c(0.1f64.sqrt(), 0.0)),
        (DomainSpec::Grid(grid_pair_of_pants(0.02)?), c(0.0, 0.5)),
    ];
    let mut violations = 0;
    let mut compact = 0;
    for (d, p) in &cases {
        let dict = default_dictionary(d)?;
        for k in 1..=10 {
            let rep = car_ball_components(d, *p, 0.25 * k as f64, &dict, 0.02)?;
            violations += rep.lemma_violations();
            compact += rep
                .components
                .iter()
                .filter(|c| c.relatively_compact)
                .count();
        }
    }
    outcome(
        violations == 0 && compact > 0,
        format!("{compact} relatively compact components over 2 domains × 10 radii, {violations} violations"),
        "0 violations",
    )
}

fn separation_violations(grid: &GridDomain, k1: usize, k2: usize) -> Result<(usize, usize)> {
    let poly = separating_cycle(grid, k1, k2)?;
    let comps = complement_components(grid.mask());
    let k2_unbounded = comps.unbounded.contains(&k2);
    let f = grid.frame();
    let (mut checked, mut bad) = (0, usize::from(!poly.is_simple()));
    for j in 0..f.height {
        for i in 0..f.width {
            let l = comps.labels.label(i, j);
            let want = if l == k1 {
                1
            } else if l == k2 || (k2_unbounded && comps.unbounded.contains(&l)) {
                0
            } else {
                continue;
            };
            checked += 1;
            if winding_number(&poly, ComplexPoint::Finite(f.center(i, j)))? != want {
                bad += 1;
            }
        }
    }
    Ok((checked, bad))
}

fn separation() -> Result<Outcome> {
    let ann = grid_annulus(0.1, 0.02)?;
    let pants = grid_pair_of_pants(0.02)?;
    let ca = complement_components(ann.mask());
    let cp = complement_components(pants.mask());
    let (h1, h2, out) = (cp.bounded[0], cp.bounded[1], cp.unbounded[0]);
    let cases = [
        (&ann, ca.bounded[0], ca.unbounded[0]),
        (&pants, h1, h2),
        (&pants, h2, h1),
        (&pants, h1, out),
        (&pants, h2, out),
    ];
    let (mut checked, mut bad) = (0, 0);
    for (g, k1, k2) in cases {
        let (n, b) = separation_violations(g, k1, k2)?;
        checked += n;
        bad += b;
    }
    outcome(
        bad == 0,
        format!("5 polygons, {checked} cells checked, {bad} wrong winding numbers or non-simple polygons"),
        "simple polygons; winding 1 on K1, 0 on K2",
    )
}

fn inner_distance_convergence() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let (mut coarse_max, mut fine_max): (f64, f64) = (0.0, 0.0);
    let mut increases = 0;
    for _ in 0..20 {
        let (p, q) = (disk_point(&mut rng, 0.8), disk_point(&mut rng, 0.8));
        let rho = poincare_distance(p, q)?;
        let coarse = (inner_distance(&DomainSpec::Disk, p, q, 0.01)? - rho).abs();
        let fine = (inner_distance(&DomainSpec::Disk, p, q, 0.005)? - rho).abs();
        coarse_max = coarse_max.max(coarse);
        fine_max = fine_max.max(fine);
        if fine > coarse + 1e-9 {
            increases += 1;
        }
    }
    outcome(
        coarse_max <= 5e-3 && fine_max < coarse_max,
        format!(
            "max error {} at h=0.01, {} at h=0.005 ({increases} of 20 pairs not improving)",
            fmt_g(coarse_max),
            fmt_g(fine_max)
        ),
        "max error <= 5e-3 at h=0.01, smaller at h=0.005",
    )
}

fn distance_decreasing() -> Result<Outcome> {
    let domains = [
        DomainSpec::Disk,
        DomainSpec::HalfPlane,
        DomainSpec::PuncturedDisk,
        DomainSpec::Annulus(0.1),
    ];
    let dicts = domains
        .iter()
        .map(default_dictionary)
        .collect::<Result<Vec<_>>>()?;
    let maps = catalog_maps(0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
    for k in 0..1000 {
        let d = &domains[k % domains.len()];
        let (p, q) = (catalog_point(&mut rng, d), catalog_point(&mut rng, d));
        let car = car_lower(d, p, q, &dicts[k % domains.len()])?;
        let kob = kob_distance(d, p, q, 1e-12)?.upper;
        let m = &maps[k % maps.len()];
        let (a, b) = (
            catalog_point(&mut rng, &m.source),
            catalog_point(&mut rng, &m.source),
        );
        let before = CatalogMetric::new(&m.source)?.distance(a, b)?;
        let after = CatalogMetric::new(&m.target)?.distance(m.apply(a), m.apply(b))?;
        for excess in [car - kob, after - before] {
            worst = worst.max(excess);
            if excess > 1e-8 {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} violations over 1000 pairs; max excess {}",
            fmt_g(worst)
        ),
        "0 violations at tolerance 1e-8",
    )
}

fn subharmonicity() -> Result<Outcome> {
    let radii = [0.02, 0.04, 0.06];
    let frame = Frame::unit(0.01)?;
    let disk_p = c(0.2, 0.0);
    let disk_u = |sign: f64| {
        ScalarGrid::from_fn(frame.clone(), |z| match poincare_distance(disk_p, z) {
            Ok(v) if (z - disk_p).norm() >= 0.25 => sign * v.ln(),
            _ => f64::NAN,
        })
    };
    let ann = DomainSpec::Annulus(0.1);
    let dict = default_dictionary(&ann)?;
    let ann_p = c(0.5, 0.0);
    let car: Vec<f64> = (0..frame.cell_count())
        .map(|i| {
            let z = frame.center_of_index(i);
            match car_lower(&ann, ann_p, z, &dict) {
                Ok(v) if (z - ann_p).norm() >= 0.25 => v.ln(),
                _ => f64::NAN,
            }
        })
        .collect();
    let ann_u = |sign: f64| {
        let mut k = 0;
        ScalarGrid::from_fn(frame.clone(), |_| {
            k += 1;
            sign * car[k - 1]
        })
    };
    let d1 = subharmonicity_check(&DomainSpec::Disk, &disk_u(1.0), &radii)?;
    let a1 = subharmonicity_check(&ann, &ann_u(1.0), &radii)?;
    let d2 = subharmonicity_check(&DomainSpec::Disk, &disk_u(-1.0), &radii)?;
    let a2 = subharmonicity_check(&ann, &ann_u(-1.0), &radii)?;
    outcome(
        d1.violations == 0 && a1.violations == 0 && d2.violations >= 1 && a2.violations >= 1,
        format!(
            "disk {}/{} and annulus {}/{} violations; negated controls {} and {}",
            d1.violations, d1.checked, a1.violations, a1.checked, d2.violations, a2.violations
        ),
        "0 violations; controls >= 1",
    )
}

/// Gaussian integer `(re, im)`.
type Gi = (i64, i64);

fn gmul(a: Gi, b: Gi) -> Gi {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn gsub(a: Gi, b: Gi) -> Gi {
    (a.0 - b.0, a.1 - b.1)
}

/// Exhaustive exact check over every Möbius map with Gaussian-integer
/// coefficients in {−1, 0, 1} + i{−1, 0, 1}: any map fixing three of the 26
/// points {Gaussian integers in [−2, 2]²} ∪ {∞} is a scalar matrix.
/// Returns (maps checked, maps fixing three points, counterexamples).
pub fn exact_three_fixed_point_sweep() -> (usize, usize, usize) {
    let units: Vec<Gi> = (-1..=1)
        .flat_map(|x| (-1..=1).map(move |y| (x, y)))
        .collect();
    let points: Vec<Option<Gi>> = (-2..=2)
        .flat_map(|x| (-2..=2).map(move |y| Some((x, y))))
        .chain(std::iter::once(None))
        .collect();
    let (mut maps, mut triple, mut bad) = (0, 0, 0);
    for &a in &units {
        for &b in &units {
            for &cc in &units {
                for &d in &units {
                    if gsub(gmul(a, d), gmul(b, cc)) == (0, 0) {
                        continue;
                    }
                    maps += 1;
                    // z fixed ⇔ c z² + (d − a) z − b = 0; ∞ fixed ⇔ c = 0.
                    let fixed = points
                        .iter()
                        .filter(|p| match p {
                            Some(z) => {
                                let q = gmul(cc, gmul(*z, *z));
                                let l = gmul(gsub(d, a), *z);
                                gsub((q.0 + l.0, q.1 + l.1), b) == (0, 0)
                            }
                            None => cc == (0, 0),
                        })
                        .count();
                    if fixed >= 3 {
                        triple += 1;
                        if !(b == (0, 0) && cc == (0, 0) && a == d) {
                            bad += 1;
                        }
                    }
                }
            }
        }
    }
    (maps, triple, bad)
}

fn self_map_suite() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let mut cartan_bad = 0;
    let mut cartan_max: f64 = 0.0;
    for _ in 0..200 {
        let deg = rng.gen_range(1..=4);
        let mut zeros = vec![c(0.0, 0.0)];
        for _ in 1..deg {
            zeros.push(disk_point(&mut rng, 0.95));
        }
        let b = HoloSelfMap::blaschke(&zeros, rng.gen_range(0.0..TAU))?;
        let rep = cartan_check(&b, c(0.0, 0.0), 1e-9)?;
        cartan_max = cartan_max.max(rep.deriv_modulus);
        let equality = (rep.deriv_modulus - 1.0).abs() <= 1e-9;
        if rep.deriv_modulus > 1.0 + 1e-9
            || equality != (deg == 1)
            || rep.automorphism_flag != (deg == 1)
        {
            cartan_bad += 1;
        }
    }

    let gap = match watt_check(&HoloSelfMap::disk_power(2)?, c(0.0, 0.0), c(0.5, 0.0), 1e-9)? {
        WattVerdict::ContractionWitness { gap, .. } => gap,
        WattVerdict::AutomorphismCertified { .. } => f64::NAN,
    };

    let mut iso_bad = 0;
    for k in 0..100 {
        let r: f64 = rng.gen_range(0.05..0.8);
        let m = if k % 3 == 0 {
            r.sqrt()
        } else {
            rng.gen_range(r * 1.01..0.99)
        };
        let rep = isotropy_group(r, Complex64::from_polar(m, rng.gen_range(0.0..TAU)))?;
        if !(rep.order == 1 || rep.order == 2)
            || rep.derivative_moduli.iter().any(|d| (d - 1.0).abs() > 1e-9)
        {
            iso_bad += 1;
        }
    }

    let (maps, triple, exact_bad) = exact_three_fixed_point_sweep();
    // Annulus automorphisms: only the identity fixes three sample points.
    let mut maskit_bad = 0;
    let pts = [c(0.5, 0.0), c(0.0, -0.6), c(-0.3, 0.3)];
    for k in 0..360 {
        let theta = TAU * k as f64 / 360.0;
        for g in [
            AnnulusAutomorphism::rotation(0.1, theta),
            AnnulusAutomorphism::inversion(0.1, theta),
        ] {
            let m = g.mobius();
            let identity = m.is_identity(1e-12);
            if !identity && m.fixed_points().cardinality().is_none() {
                maskit_bad += 1;
            }
            match maskit_demo(&g.to_self_map()?, pts, 1e-12) {
                Ok(MaskitVerdict::Identity) if identity => {}
                Err(e) if !identity && e.name() == "NotFixed" => {}
                _ => maskit_bad += 1,
            }
        }
    }

    let ok = cartan_bad == 0
        && (gap - 0.293893).abs() <= 1e-6
        && iso_bad == 0
        && exact_bad == 0
        && maskit_bad == 0;
    outcome(
        ok,
        format!(
            "cartan: {cartan_bad}/200 bad, max |f'(0)|={}; watt gap={}; isotropy: {iso_bad}/100 bad; \
             three-fixed-point: {exact_bad} counterexamples among {triple} of {maps} exact maps, {maskit_bad} annulus failures",
            fmt_g(cartan_max),
            fmt_g(gap)
        ),
        "cartan 0 bad; gap 0.293893±1e-6; isotropy orders in {1,2} with |f'(p)|=1; 0 counterexamples",
    )
}

fn canonical_annulus(mode: Mode) -> Result<Outcome> {
    let (h, tol) = match mode {
        Mode::Quick => (0.02, 0.05),
        Mode::Full => (0.01, 0.02),
    };
    let m = grid_modulus(&grid_annulus(0.25, h)?)?;
    let rhat = canonical_annulus_radius(m)?;
    // Rigid motions relative to a fixed lattice: the annulus center moves
    // off the cell grid, so the raster genuinely changes.
    let frame = Frame::square(c(0.0, 0.0), 1.6, h)?;
    let mut rel_m: f64 = 0.0;
    for center in [c(0.3 * h, 0.45 * h), c(0.373, -0.217), c(-0.291, 0.338)] {
        let g = GridDomain::from_predicate(frame.clone(), |z| {
            let r = (z - center).norm();
            r > 0.25 && r < 1.0
        })?;
        rel_m = rel_m.max((grid_modulus(&g)? - m).abs() / m);
    }
    let rel_r = (rhat - 0.25).abs() / 0.25;
    outcome(
        rel_r <= tol && rel_m <= 0.01,
        format!(
            "h={h}: r_hat={} (rel err {}), max moved-annulus modulus rel diff {}",
            fmt_g(rhat),
            fmt_g(rel_r),
            fmt_g(rel_m)
        ),
        format!(
            "r_hat=0.25 within {}%, motion invariance within 1%",
            tol * 100.0
        ),
    )
}
