use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{complement_components, Connectivity, Raster};
use crate::error::{Error, Result};
use crate::export::fmt_point;
use crate::geometry::ComplexPoint;
use crate::grid::GridDomain;

/// Closed polygon, stored without repeating the first vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePolygon {
    vertices: Vec<Complex64>,
}

impl SimplePolygon {
    /// Accepts any closed vertex list of at least three points and checks
    /// simplicity.
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::Precondition(
                "a polygon needs at least three vertices".into(),
            ));
        }
        let poly = SimplePolygon { vertices };
        if !poly.is_simple() {
            return Err(Error::Precondition("polygon is self-intersecting".into()));
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = (Complex64, Complex64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Twice the signed area; positive for counter-clockwise orientation.
    pub fn signed_area2(&self) -> f64 {
        self.edges().map(|(a, b)| a.re * b.im - a.im * b.re).sum()
    }

    /// No two non-adjacent edges meet and adjacent edges share only their
    /// common vertex.
    pub fn is_simple(&self) -> bool {
        let n = self.vertices.len();
        let edges: Vec<_> = self.edges().collect();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b) = edges[i];
                let (c, d) = edges[j];
                if adjacent {
                    // Adjacent edges must not fold back onto each other.
                    let shared = if j == i + 1 { b } else { a };
                    let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                    if cross(p - shared, q - shared) == 0.0 && dot(p - shared, q - shared) > 0.0 {
                        return false;
                    }
                } else if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Vertex list, one `re,im` pair per line, closed by repeating the first.
    pub fn export(&self) -> String {
        let mut s = String::new();
        for v in self.vertices.iter().chain(self.vertices.first()) {
            let _ = writeln!(s, "{}", fmt_point(*v));
        }
        s
    }
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn dot(a: Complex64, b: Complex64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn on_segment(p: Complex64, a: Complex64, b: Complex64) -> bool {
    cross(b - a, p - a) == 0.0
        && p.re >= a.re.min(b.re)
        && p.re <= a.re.max(b.re)
        && p.im >= a.im.min(b.im)
        && p.im <= a.im.max(b.im)
}

fn segments_intersect(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// Signed crossing count: each upward crossing to the right of `z` counts
/// +1, each downward one −1. The point at infinity has winding 0.
pub fn winding_number(poly: &SimplePolygon, z: ComplexPoint) -> Result<i64> {
    let z = match z {
        ComplexPoint::Infinity => return Ok(0),
        ComplexPoint::Finite(z) => z,
    };
    let mut w = 0i64;
    for (a, b) in poly.edges() {
        if on_segment(z, a, b) {
            return Err(Error::OnBoundary);
        }
        let side = cross(b - a, z - a);
        if a.im <= z.im && z.im < b.im && side > 0.0 {
            w += 1;
        } else if b.im <= z.im && z.im < a.im && side < 0.0 {
            w -= 1;
        }
    }
    Ok(w)
}

/// Simple polygon in the grid domain winding once around the bounded
/// complement component `k1` and zero times around `k2`. Labels are those of
/// [`complement_components`] on the domain mask; any label of the unbounded
/// component stands for all of it.
pub fn separating_cycle(grid: &GridDomain, k1: usize, k2: usize) -> Result<SimplePolygon> {
    let mask = grid.mask();
    let comps = complement_components(mask);
    let n_labels = comps.labels.component_count();
    for k in [k1, k2] {
        if k == 0 || k > n_labels {
            return Err(Error::LabelNotBounded(k));
        }
    }
    if !comps.is_bounded(k1) {
        return Err(Error::LabelNotBounded(k1));
    }
    let same = k1 == k2 || (comps.unbounded.contains(&k1) && comps.unbounded.contains(&k2));
    if same {
        return Err(Error::Precondition(
            "K1 and K2 must be distinct complement components".into(),
        ));
    }
    let (w, h) = (mask.width(), mask.height());
    let k1_mask = comps.labels.component_mask(k1);

    // Chebyshev distance from K1, and the nearest cell that is neither
    // domain nor K1 (K2, other holes, the frame border).
    let dist = chebyshev_distance(&k1_mask);
    let forbidden = (0..w * h)
        .filter(|&idx| !mask.cells()[idx] && !k1_mask.cells()[idx])
        .map(|idx| dist[idx])
        .min()
        .unwrap_or(usize::MAX);
    // The dilation B_s and two further rings must stay clear of forbidden
    // cells: one ring for pinch repair, one for the contour's outer side.
    let s_max = forbidden.saturating_sub(3);
    for s in (1..=s_max).rev() {
        if let Some(poly) = try_dilation(grid, &dist, s) {
            return Ok(poly);
        }
    }
    Err(Error::NoCorridor)
}

fn chebyshev_distance(seed: &Raster) -> Vec<usize> {
    let (w, h) = (seed.width(), seed.height());
    let mut dist = vec![usize::MAX; w * h];
    let mut queue = VecDeque::new();
    for idx in 0..w * h {
        if seed.cells()[idx] {
            dist[idx] = 0;
            queue.push_back(idx);
        }
    }
    while let Some(idx) = queue.pop_front() {
        let (i, j) = ((idx % w) as isize, (idx / w) as isize);
        for &(di, dj) in Connectivity::Eight.offsets() {
            let (ni, nj) = (i + di, j + dj);
            if ni >= 0 && nj >= 0 && (ni as usize) < w && (nj as usize) < h {
                let n = nj as usize * w + ni as usize;
                if dist[n] == usize::MAX {
                    dist[n] = dist[idx] + 1;
                    queue.push_back(n);
                }
            }
        }
    }
    dist
}

fn fill_holes(blob: &Raster) -> Raster {
    let comps = complement_components(blob);
    Raster::from_fn(blob.width(), blob.height(), |i, j| {
        blob.get(i, j) || comps.is_bounded(comps.labels.label(i, j))
    })
}

/// Finds a 2×2 block with exactly two diagonal blob cells; returns one of its
/// outside cells.
fn find_pinch(blob: &Raster) -> Option<[(usize, usize); 2]> {
    for j in 0..blob.height() - 1 {
        for i in 0..blob.width() - 1 {
            let (a, b, c, d) = (
                blob.get(i, j),
                blob.get(i + 1, j),
                blob.get(i, j + 1),
                blob.get(i + 1, j + 1),
            );
            if a && d && !b && !c {
                return Some([(i + 1, j), (i, j + 1)]);
            }
            if b && c && !a && !d {
                return Some([(i, j), (i + 1, j + 1)]);
            }
        }
    }
    None
}

fn try_dilation(grid: &GridDomain, dist: &[usize], s: usize) -> Option<SimplePolygon> {
    let mask = grid.mask();
    let (w, h) = (mask.width(), mask.height());
    let mut blob = fill_holes(&Raster::new(w, h, dist.iter().map(|&d| d <= s).collect()));
    while let Some(cands) = find_pinch(&blob) {
        let (i, j) = cands.into_iter().find(|&(i, j)| dist[j * w + i] <= s + 1)?;
        blob.set(i, j, true);
        blob = fill_holes(&blob);
    }
    let poly = trace_outer_boundary(&blob, grid)?;
    poly.is_simple().then_some(poly)
}

/// Counter-clockwise boundary of a hole-free, pinch-free, 4-connected blob
/// on cell corners, with collinear vertices merged.
fn trace_outer_boundary(blob: &Raster, grid: &GridDomain) -> Option<SimplePolygon> {
    // Corners in doubled lattice coordinates: cell (i, j) spans
    // [2i − 1, 2i + 1] × [2j − 1, 2j + 1].
    let mut next: HashMap<(i64, i64), (i64, i64)> = HashMap::new();
    for j in 0..blob.height() {
        for i in 0..blob.width() {
            if !blob.get(i, j) {
                continue;
            }
            let (x, y) = (2 * i as i64, 2 * j as i64);
            let (ii, jj) = (i as isize, j as isize);
            let sides = [
                (!blob.get_signed(ii, jj - 1), (x - 1, y - 1), (x + 1, y - 1)),
                (!blob.get_signed(ii + 1, jj), (x + 1, y - 1), (x + 1, y + 1)),
                (!blob.get_signed(ii, jj + 1), (x + 1, y + 1), (x - 1, y + 1)),
                (!blob.get_signed(ii - 1, jj), (x - 1, y + 1), (x - 1, y - 1)),
            ];
            for (open, from, to) in sides {
                if open && next.insert(from, to).is_some() {
                    return None;
                }
            }
        }
    }
    let start = *next.keys().min()?;
    let mut cycle = vec![start];
    let mut cur = next[&start];
    while cur != start {
        cycle.push(cur);
        cur = *next.get(&cur)?;
        if cycle.len() > next.len() {
            return None;
        }
    }
    if cycle.len() != next.len() {
        return None;
    }
    let n = cycle.len();
    let corners: Vec<(i64, i64)> = (0..n)
        .filter(|&k| {
            let (p, c, q) = (cycle[(k + n - 1) % n], cycle[k], cycle[(k + 1) % n]);
            (c.0 - p.0) * (q.1 - c.1) - (c.1 - p.1) * (q.0 - c.0) != 0
        })
        .map(|k| cycle[k])
        .collect();
    let f = grid.frame();
    let vertices = corners
        .into_iter()
        .map(|(x, y)| f.origin + Complex64::new(x as f64, y as f64) * (f.spacing / 2.0))
        .collect();
    Some(SimplePolygon { vertices })
}
