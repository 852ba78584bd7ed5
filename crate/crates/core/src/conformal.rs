//! Applications of the invariant distances: the Cartan–Carathéodory bound,
//! Watt's isometry criterion, three-fixed-point rigidity, annulus isotropy
//! groups, and the canonical annulus of a doubly-connected grid domain.

use std::f64::consts::TAU;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use num_complex::Complex64;

use crate::domains::{DomainSpec, Frame};
use crate::error::{Error, Result};
use crate::export::fmt_g;
use crate::geometry::{ComplexPoint, MobiusMap};
use crate::grid::GridDomain;
use crate::kobayashi::CatalogMetric;
use crate::topology::complement_components;

pub const DEFAULT_TOL: f64 = 1e-6;

type ComplexFn = dyn Fn(Complex64) -> Complex64 + Send + Sync;

/// A holomorphic self-map of a domain.
#[derive(Clone)]
pub struct HoloSelfMap {
    name: String,
    domain: DomainSpec,
    f: Arc<ComplexFn>,
    df: Option<Arc<ComplexFn>>,
    mobius: Option<MobiusMap>,
    invertible: Option<bool>,
}

impl fmt::Debug for HoloSelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HoloSelfMap")
            .field("name", &self.name)
            .field("domain", &self.domain.name())
            .field("mobius", &self.mobius)
            .field("invertible", &self.invertible)
            .finish()
    }
}

const SAMPLE_SPACING: f64 = 0.05;
const SAMPLE_MARGIN: f64 = 0.02;

impl HoloSelfMap {
    /// Wraps an evaluator (and optional closed-form derivative), checking on
    /// sample points away from the boundary that the domain maps into itself.
    pub fn new(
        domain: &DomainSpec,
        name: impl Into<String>,
        f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        df: Option<Arc<ComplexFn>>,
    ) -> Result<Self> {
        let map = HoloSelfMap {
            name: name.into(),
            domain: domain.clone(),
            f: Arc::new(f),
            df,
            mobius: None,
            invertible: None,
        };
        map.validate()?;
        Ok(map)
    }

    /// A Möbius map restricted to the domain; `invertible` records whether it
    /// is known to be onto (an automorphism).
    pub fn from_mobius(
        domain: &DomainSpec,
        name: impl Into<String>,
        m: MobiusMap,
        invertible: bool,
    ) -> Result<Self> {
        let (mf, md) = (m, m);
        let mut map = HoloSelfMap::new(
            domain,
            name,
            move |z| mf.apply_finite(z),
            Some(Arc::new(move |z| md.derivative(z))),
        )?;
        map.mobius = Some(m);
        map.invertible = Some(invertible);
        Ok(map)
    }

    pub fn identity(domain: &DomainSpec) -> Result<Self> {
        HoloSelfMap::from_mobius(domain, "identity", MobiusMap::identity(), true)
    }

    pub fn disk_rotation(theta: f64) -> Result<Self> {
        let m = MobiusMap::scaling(Complex64::from_polar(1.0, theta))?;
        HoloSelfMap::from_mobius(&DomainSpec::Disk, format!("rotation by {theta}"), m, true)
    }

    /// `z ↦ zⁿ` on the disk.
    pub fn disk_power(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("power must be at least 1".into()));
        }
        let mut map = HoloSelfMap::new(
            &DomainSpec::Disk,
            format!("z^{n}"),
            move |z| z.powu(n),
            Some(Arc::new(move |z| z.powu(n - 1) * n as f64)),
        )?;
        map.invertible = Some(n == 1);
        if n == 1 {
            map.mobius = Some(MobiusMap::identity());
        }
        Ok(map)
    }

    /// Finite Blaschke product `e^{iθ} Π (z − a_k)/(1 − ā_k z)`.
    pub fn blaschke(zeros: &[Complex64], theta: f64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::Precondition(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        if zeros.iter().any(|a| !(a.norm_sqr() < 1.0)) {
            return Err(Error::OutOfDomain(
                "Blaschke zeros must lie in the unit disk".into(),
            ));
        }
        let one = Complex64::new(1.0, 0.0);
        let rot = Complex64::from_polar(1.0, theta);
        let a: Arc<[Complex64]> = zeros.into();
        let (fa, da) = (a.clone(), a.clone());
        let factor = move |ak: Complex64, z: Complex64| (z - ak) / (one - ak.conj() * z);
        let eval = move |z: Complex64| rot * fa.iter().fold(one, |acc, &ak| acc * factor(ak, z));
        let deriv = move |z: Complex64| {
            let mut total = Complex64::new(0.0, 0.0);
            for (k, &ak) in da.iter().enumerate() {
                let dk = (1.0 - ak.norm_sqr()) / (one - ak.conj() * z).powu(2);
                let rest = da
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(one, |acc, (_, &aj)| acc * factor(aj, z));
                total += dk * rest;
            }
            rot * total
        };
        let mut map = HoloSelfMap::new(
            &DomainSpec::Disk,
            format!("Blaschke(degree {}, θ = {theta})", zeros.len()),
            eval,
            Some(Arc::new(deriv)),
        )?;
        map.invertible = Some(zeros.len() == 1);
        if let [a0] = zeros {
            map.mobius = Some(MobiusMap::new(rot, -rot * a0, -a0.conj(), one)?);
        }
        Ok(map)
    }

    fn validate(&self) -> Result<()> {
        let frame = match &self.domain {
            DomainSpec::HalfPlane => Frame::square(Complex64::new(-1.5, 0.0), 1.5, SAMPLE_SPACING)?,
            DomainSpec::Grid(g) => *g.frame(),
            d => d.frame(SAMPLE_SPACING)?.expect("bounded catalog frame"),
        };
        let mask = self.domain.mask(&frame);
        for idx in 0..frame.cell_count() {
            let z = frame.center_of_index(idx);
            if !mask.cells()[idx] || self.domain.clearance(z) <= SAMPLE_MARGIN {
                continue;
            }
            let w = self.apply(z);
            if !self.domain.contains(w) {
                return Err(Error::Validation(format!(
                    "map '{}' sends {z} to {w}, outside the {} domain",
                    self.name,
                    self.domain.name()
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn mobius(&self) -> Option<&MobiusMap> {
        self.mobius.as_ref()
    }

    pub fn invertible(&self) -> Option<bool> {
        self.invertible
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    /// Closed-form derivative when available, otherwise a Richardson-
    /// extrapolated central difference; returns the value and an error
    /// estimate (0 for closed forms).
    pub fn derivative(&self, z: Complex64) -> (Complex64, f64) {
        if let Some(df) = &self.df {
            return (df(z), 0.0);
        }
        let scale = self.domain.clearance(z).clamp(1e-3, 1.0);
        let h = 1e-5 * scale;
        let central = |h: f64| (self.apply(z + h) - self.apply(z - h)) / (2.0 * h);
        let (d1, d2) = (central(h), central(h / 2.0));
        ((4.0 * d2 - d1) / 3.0, (d2 - d1).norm() / 3.0)
    }
}

fn require_fixed(f: &HoloSelfMap, a: Complex64, tol: f64) -> Result<()> {
    f.domain.require(a)?;
    if (f.apply(a) - a).norm() <= tol {
        Ok(())
    } else {
        Err(Error::NotFixed(ComplexPoint::Finite(a)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartanReport {
    pub deriv_modulus: f64,
    pub is_contraction: bool,
    pub automorphism_flag: bool,
    pub tol: f64,
}

impl CartanReport {
    pub fn export(&self) -> String {
        format!(
            "verdict = {}\nderiv_modulus = {}\nis_contraction = {}\nautomorphism_flag = {}\ntol = {}\n",
            if self.automorphism_flag { "automorphism" } else { "contraction" },
            fmt_g(self.deriv_modulus),
            self.is_contraction,
            self.automorphism_flag,
            fmt_g(self.tol)
        )
    }
}

/// `|f′(a)| ≤ 1` at a fixed point, with equality exactly for automorphisms.
pub fn cartan_check(f: &HoloSelfMap, a: Complex64, tol: f64) -> Result<CartanReport> {
    require_fixed(f, a, tol)?;
    let (d, err) = f.derivative(a);
    let m = d.norm();
    if m > 1.0 + tol + err {
        return Err(Error::TheoremViolation(format!(
            "|f'({a})| = {m} exceeds 1 for '{}'",
            f.name
        )));
    }
    let automorphism_flag = (m - 1.0).abs() <= tol + err;
    if let Some(inv) = f.invertible {
        if inv != automorphism_flag {
            return Err(Error::TheoremViolation(format!(
                "'{}' is {}an automorphism but |f'({a})| = {m}",
                f.name,
                if inv { "" } else { "not " }
            )));
        }
    }
    Ok(CartanReport {
        deriv_modulus: m,
        is_contraction: m < 1.0 - tol - err,
        automorphism_flag,
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WattVerdict {
    AutomorphismCertified { distance: f64, deriv_modulus: f64 },
    ContractionWitness { d_ab: f64, d_afb: f64, gap: f64 },
}

impl WattVerdict {
    pub fn export(&self) -> String {
        match *self {
            WattVerdict::AutomorphismCertified {
                distance,
                deriv_modulus,
            } => format!(
                "verdict = automorphism_certified\ndistance = {}\nderiv_modulus = {}\n",
                fmt_g(distance),
                fmt_g(deriv_modulus)
            ),
            WattVerdict::ContractionWitness { d_ab, d_afb, gap } => {
                format!(
                    "verdict = contraction_witness\nd_ab = {}\nd_afb = {}\ngap = {}\n",
                    fmt_g(d_ab),
                    fmt_g(d_afb),
                    fmt_g(gap)
                )
            }
        }
    }
}

/// Compares `d(a, b)` with `d(a, f(b))` for a self-map fixing `a`: equality
/// forces an automorphism, confirmed through `|f′(a)| = 1`; otherwise the
/// strict decrease is the witness.
pub fn watt_check(f: &HoloSelfMap, a: Complex64, b: Complex64, tol: f64) -> Result<WattVerdict> {
    let metric = CatalogMetric::new(&f.domain)?;
    require_fixed(f, a, tol)?;
    f.domain.require(b)?;
    if a == b {
        return Err(Error::Precondition(
            "b must differ from the fixed point a".into(),
        ));
    }
    let d_ab = metric.distance(a, b)?;
    let d_afb = metric.distance(a, f.apply(b))?;
    if (d_ab - d_afb).abs() <= tol {
        let (d, err) = f.derivative(a);
        let m = d.norm();
        if (m - 1.0).abs() <= tol + err {
            Ok(WattVerdict::AutomorphismCertified {
                distance: d_ab,
                deriv_modulus: m,
            })
        } else {
            Err(Error::TheoremViolation(format!(
                "d(a,b) = d(a,f(b)) = {d_ab} but |f'(a)| = {m}"
            )))
        }
    } else if d_afb < d_ab {
        Ok(WattVerdict::ContractionWitness {
            d_ab,
            d_afb,
            gap: d_ab - d_afb,
        })
    } else {
        Err(Error::TheoremViolation(format!(
            "holomorphic self-map increased distance: {d_afb} > {d_ab}"
        )))
    }
}

/// A self-map with two distinct fixed points is an automorphism.
pub fn two_fixed_point_check(
    f: &HoloSelfMap,
    a: Complex64,
    b: Complex64,
    tol: f64,
) -> Result<WattVerdict> {
    require_fixed(f, a, tol)?;
    require_fixed(f, b, tol)?;
    match watt_check(f, a, b, tol)? {
        v @ WattVerdict::AutomorphismCertified { .. } => Ok(v),
        WattVerdict::ContractionWitness { .. } => Err(Error::TheoremViolation(
            "two fixed points but the distance between them decreased".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnnulusAutomorphismKind {
    /// `z ↦ e^{iθ} z`
    Rotation,
    /// `z ↦ e^{iθ} r / z`
    Inversion,
}

/// Element of the classical automorphism group of `A(r, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusAutomorphism {
    pub r: f64,
    pub kind: AnnulusAutomorphismKind,
    pub theta: f64,
}

impl AnnulusAutomorphism {
    pub fn rotation(r: f64, theta: f64) -> Self {
        AnnulusAutomorphism {
            r,
            kind: AnnulusAutomorphismKind::Rotation,
            theta,
        }
    }

    pub fn inversion(r: f64, theta: f64) -> Self {
        AnnulusAutomorphism {
            r,
            kind: AnnulusAutomorphismKind::Inversion,
            theta,
        }
    }

    pub fn mobius(&self) -> MobiusMap {
        let rot = Complex64::from_polar(1.0, self.theta);
        let (zero, one) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let m = match self.kind {
            AnnulusAutomorphismKind::Rotation => MobiusMap::new(rot, zero, zero, one),
            AnnulusAutomorphismKind::Inversion => MobiusMap::new(zero, rot * self.r, one, zero),
        };
        m.expect("annulus automorphisms are non-degenerate")
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.mobius().apply_finite(z)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.mobius().derivative(z)
    }

    pub fn name(&self) -> String {
        match self.kind {
            AnnulusAutomorphismKind::Rotation => format!("rot({})", fmt_g(self.theta)),
            AnnulusAutomorphismKind::Inversion => format!("inv({})", fmt_g(self.theta)),
        }
    }

    pub fn to_self_map(&self) -> Result<HoloSelfMap> {
        HoloSelfMap::from_mobius(
            &DomainSpec::annulus(self.r)?,
            self.name(),
            self.mobius(),
            true,
        )
    }
}

/// Generator families of an automorphism group. The annulus group is taken
/// to be the classical rotation/inversion family.
#[derive(Debug, Clone, PartialEq)]
pub struct AutomorphismGroupDesc {
    pub domain: DomainSpec,
    pub families: Vec<String>,
}

pub fn annulus_automorphisms(r: f64) -> Result<AutomorphismGroupDesc> {
    Ok(AutomorphismGroupDesc {
        domain: DomainSpec::annulus(r)?,
        families: vec![
            "rot_θ: z ↦ e^{iθ} z".into(),
            format!("inv_θ: z ↦ e^{{iθ}} {r}/z"),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskitVerdict {
    Identity,
}

/// A Möbius-representable automorphism fixing three distinct points is the
/// identity; anything else is reported as a theorem violation.
pub fn maskit_demo(g: &HoloSelfMap, points: [Complex64; 3], tol: f64) -> Result<MaskitVerdict> {
    let m = g
        .mobius
        .ok_or_else(|| Error::NotMobiusRepresentable(g.name.clone()))?;
    for p in points {
        require_fixed(g, p, tol)?;
    }
    match m.is_identity_given_three_fixed(points.map(ComplexPoint::Finite), tol) {
        Ok(true) => Ok(MaskitVerdict::Identity),
        Ok(false) | Err(Error::Inconsistent(_)) => Err(Error::TheoremViolation(format!(
            "'{}' fixes three points but is not the identity",
            g.name
        ))),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyReport {
    pub r: f64,
    pub p: Complex64,
    pub elements: Vec<AnnulusAutomorphism>,
    pub order: usize,
    pub cyclic: bool,
    pub derivatives: Vec<Complex64>,
    pub derivative_moduli: Vec<f64>,
}

impl IsotropyReport {
    pub fn export(&self) -> String {
        let mut s = format!("order = {}\ncyclic = {}\n", self.order, self.cyclic);
        for (e, m) in self.elements.iter().zip(&self.derivative_moduli) {
            let _ = writeln!(s, "element {} |f'(p)| = {}", e.name(), fmt_g(*m));
        }
        s
    }
}

const ISOTROPY_TOL: f64 = 1e-9;

/// The stabilizer of `p` in the annulus group: the identity, plus the
/// inversion `inv_{2 arg p}` when `p` lies on the core circle `|p|² = r`.
pub fn isotropy_group(r: f64, p: Complex64) -> Result<IsotropyReport> {
    let domain = DomainSpec::annulus(r)?;
    domain.require(p)?;
    let mut elements = vec![AnnulusAutomorphism::rotation(r, 0.0)];
    if (p.norm_sqr() - r).abs() <= 1e-12 * r {
        elements.push(AnnulusAutomorphism::inversion(r, 2.0 * p.arg()));
    }
    for e in &elements {
        if (e.apply(p) - p).norm() > ISOTROPY_TOL {
            return Err(Error::Inconsistent(format!(
                "{} does not fix {p}",
                e.name()
            )));
        }
    }
    // Closure: every product is again an element.
    let same = |x: &MobiusMap, y: &MobiusMap| {
        [
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.5, 0.4),
            Complex64::new(0.2, -0.7),
        ]
        .iter()
        .all(|&z| (x.apply_finite(z) - y.apply_finite(z)).norm() <= ISOTROPY_TOL)
    };
    for x in &elements {
        for y in &elements {
            let prod = x.mobius().compose(&y.mobius());
            if !elements.iter().any(|e| same(&e.mobius(), &prod)) {
                return Err(Error::TheoremViolation("isotropy set is not closed".into()));
            }
        }
    }
    let derivatives: Vec<Complex64> = elements.iter().map(|e| e.derivative(p)).collect();
    let derivative_moduli: Vec<f64> = derivatives.iter().map(|d| d.norm()).collect();
    if derivative_moduli
        .iter()
        .any(|m| (m - 1.0).abs() > ISOTROPY_TOL)
    {
        return Err(Error::TheoremViolation(format!(
            "isotropy element with |f'(p)| ≠ 1: {derivative_moduli:?}"
        )));
    }
    // f ↦ f′(p) must be injective.
    for i in 0..derivatives.len() {
        for j in i + 1..derivatives.len() {
            if (derivatives[i] - derivatives[j]).norm() <= ISOTROPY_TOL {
                return Err(Error::TheoremViolation(
                    "derivative map is not injective".into(),
                ));
            }
        }
    }
    let order = elements.len();
    // Groups of order 1 or 2 are cyclic; check the generator's powers anyway.
    let gen = elements.last().unwrap().mobius();
    let mut power = gen;
    let mut seen = 1;
    while !same(&power, &MobiusMap::identity()) && seen <= order {
        power = power.compose(&gen);
        seen += 1;
    }
    Ok(IsotropyReport {
        r,
        p,
        elements,
        order,
        cyclic: seen == order,
        derivatives,
        derivative_moduli,
    })
}

/// Dirichlet-energy modulus `log(1/r)/(2π)` of a doubly-connected grid
/// domain. `u = 1` on the inner component and `0` on the outer one, imposed
/// at the cell faces shared with the complement (half-cell conductance 2).
pub fn conformal_modulus(grid: &GridDomain, inner_label: usize, outer_label: usize) -> Result<f64> {
    let mask = grid.mask();
    let comps = complement_components(mask);
    if comps.count() != 2 {
        return Err(Error::WrongConnectivity(comps.count()));
    }
    let n_labels = comps.labels.component_count();
    if inner_label == 0 || inner_label > n_labels || !comps.is_bounded(inner_label) {
        return Err(Error::LabelNotBounded(inner_label));
    }
    if outer_label == 0 || outer_label > n_labels || !comps.unbounded.contains(&outer_label) {
        return Err(Error::Precondition(format!(
            "label {outer_label} is not the outer complement component"
        )));
    }
    let (w, h) = (mask.width(), mask.height());
    let mut index = vec![usize::MAX; w * h];
    let mut cells = Vec::new();
    for idx in 0..w * h {
        if mask.cells()[idx] {
            index[idx] = cells.len();
            cells.push(idx);
        }
    }
    let n = cells.len();
    // Per unknown: interior neighbors, diagonal weight, and right-hand side.
    let mut nbrs: Vec<[usize; 4]> = vec![[usize::MAX; 4]; n];
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for (k, &idx) in cells.iter().enumerate() {
        let (i, j) = ((idx % w) as isize, (idx / w) as isize);
        for (s, &(di, dj)) in [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .enumerate()
        {
            let nidx = (j + dj) as usize * w + (i + di) as usize;
            if mask.cells()[nidx] {
                nbrs[k][s] = index[nidx];
                diag[k] += 1.0;
            } else {
                diag[k] += 2.0;
                if comps.labels.labels()[nidx] == inner_label {
                    rhs[k] += 2.0;
                }
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for k in 0..n {
            let mut v = diag[k] * x[k];
            for &m in &nbrs[k] {
                if m != usize::MAX {
                    v -= x[m];
                }
            }
            out[k] = v;
        }
    };
    let u = conjugate_gradient(n, apply, &rhs, 1e-10, 1_000_000)?;

    let mut energy = 0.0;
    for (k, &idx) in cells.iter().enumerate() {
        for (s, &m) in nbrs[k].iter().enumerate() {
            if m != usize::MAX {
                // Each interior edge once.
                if m > k {
                    energy += (u[k] - u[m]).powi(2);
                }
            } else {
                let (i, j) = ((idx % w) as isize, (idx / w) as isize);
                let (di, dj) = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)][s];
                let nidx = (j + dj) as usize * w + (i + di) as usize;
                let g = if comps.labels.labels()[nidx] == inner_label {
                    1.0
                } else {
                    0.0
                };
                energy += 2.0 * (u[k] - g).powi(2);
            }
        }
    }
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::SolverDivergence(format!(
            "Dirichlet energy {energy}"
        )));
    }
    Ok(1.0 / energy)
}

fn conjugate_gradient(
    n: usize,
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let dotp = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let b_norm = dotp(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut rr = dotp(&r, &r);
    for _ in 0..max_iter {
        if rr.sqrt() <= rel_tol * b_norm {
            return Ok(x);
        }
        apply(&p, &mut ap);
        let pap = dotp(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::SolverDivergence(format!(
                "non-positive curvature {pap}"
            )));
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new = dotp(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
    }
    Err(Error::SolverDivergence(format!(
        "residual {} after {max_iter} iterations",
        rr.sqrt() / b_norm
    )))
}

/// Modulus of the grid annulus using its unique inner and outer labels.
pub fn grid_modulus(grid: &GridDomain) -> Result<f64> {
    let comps = complement_components(grid.mask());
    if comps.count() != 2 {
        return Err(Error::WrongConnectivity(comps.count()));
    }
    conformal_modulus(grid, comps.bounded[0], comps.unbounded[0])
}

/// Inner radius `exp(−2π·modulus)` of the canonical annulus `A(r̂, 1)`.
pub fn canonical_annulus_radius(modulus: f64) -> Result<f64> {
    if !(modulus > 0.0) {
        return Err(Error::NonPositive(format!("modulus {modulus}")));
    }
    Ok((-TAU * modulus).exp())
}

/// A holomorphic map between catalog domains.
#[derive(Clone)]
pub struct CatalogMap {
    pub name: &'static str,
    pub source: DomainSpec,
    pub target: DomainSpec,
    f: fn(Complex64) -> Complex64,
}

impl fmt::Debug for CatalogMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CatalogMap({})", self.name)
    }
}

impl CatalogMap {
    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }
}

/// Inclusions `A(r, 1) → 𝔻* → 𝔻`, the cover `e^w` of the punctured disk by
/// the left half-plane, and squaring on the disk.
pub fn catalog_maps(r: f64) -> Result<Vec<CatalogMap>> {
    Ok(vec![
        CatalogMap {
            name: "inclusion annulus -> punctured disk",
            source: DomainSpec::annulus(r)?,
            target: DomainSpec::PuncturedDisk,
            f: |z| z,
        },
        CatalogMap {
            name: "inclusion punctured disk -> disk",
            source: DomainSpec::PuncturedDisk,
            target: DomainSpec::Disk,
            f: |z| z,
        },
        CatalogMap {
            name: "exp: half-plane -> punctured disk",
            source: DomainSpec::HalfPlane,
            target: DomainSpec::PuncturedDisk,
            f: |w| w.exp(),
        },
        CatalogMap {
            name: "square: disk -> disk",
            source: DomainSpec::Disk,
            target: DomainSpec::Disk,
            f: |z| z * z,
        },
    ])
}
