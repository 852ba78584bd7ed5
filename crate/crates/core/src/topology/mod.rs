//! Planar raster topology: component labeling, connectivity numbers,
//! separating polygons, winding numbers and nerve covers.
//!
//! Foreground is labeled with 4-connectivity and background with
//! 8-connectivity, the dual pair for which the discrete Jordan curve theorem
//! holds.

mod nerve;
mod separation;

pub use nerve::{injectivity_lower_bound, nerve_cover, NerveGraph};
pub use separation::{separating_cycle, winding_number, SimplePolygon};

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A rectangular boolean grid, row-major, row 0 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: usize,
    height: usize,
    cells: Vec<bool>,
}

impl Raster {
    pub fn new(width: usize, height: usize, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), width * height, "raster size mismatch");
        Raster {
            width,
            height,
            cells,
        }
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Raster::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut cells = Vec::with_capacity(width * height);
        for j in 0..height {
            for i in 0..width {
                cells.push(f(i, j));
            }
        }
        Raster::new(width, height, cells)
    }

    /// Parses rows of `'0'`/`'1'`; `rows[0]` is row 0.
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        Raster::from_fn(width, height, |i, j| rows[j].as_bytes()[i] == b'1')
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[j * self.width + i]
    }

    /// Out-of-range coordinates read as `false`.
    pub fn get_signed(&self, i: isize, j: isize) -> bool {
        i >= 0
            && j >= 0
            && (i as usize) < self.width
            && (j as usize) < self.height
            && self.cells[j as usize * self.width + i as usize]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.cells[j * self.width + i] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn complement(&self) -> Raster {
        Raster::new(
            self.width,
            self.height,
            self.cells.iter().map(|c| !c).collect(),
        )
    }

    pub fn and(&self, other: &Raster) -> Raster {
        assert_eq!((self.width, self.height), (other.width, other.height));
        Raster::new(
            self.width,
            self.height,
            self.cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| *a && *b)
                .collect(),
        )
    }

    pub fn is_subset_of(&self, other: &Raster) -> bool {
        self.cells.iter().zip(&other.cells).all(|(a, b)| !*a || *b)
    }

    pub fn border_is_clear(&self) -> bool {
        (0..self.width).all(|i| !self.get(i, 0) && !self.get(i, self.height - 1))
            && (0..self.height).all(|j| !self.get(0, j) && !self.get(self.width - 1, j))
    }

    pub fn row_string(&self, j: usize) -> String {
        (0..self.width)
            .map(|i| if self.get(i, j) { '1' } else { '0' })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    pub(crate) fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(isize, isize); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// Component labels: 0 = off, `1..=component_count` = component id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRaster {
    width: usize,
    height: usize,
    labels: Vec<usize>,
    component_count: usize,
}

impl LabeledRaster {
    pub fn label(&self, i: usize, j: usize) -> usize {
        self.labels[j * self.width + i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn component_mask(&self, id: usize) -> Raster {
        Raster::new(
            self.width,
            self.height,
            self.labels.iter().map(|&l| l == id).collect(),
        )
    }

    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.component_count + 1];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes[1..].to_vec()
    }

    /// Labels of components with at least one cell on the raster border.
    pub fn border_labels(&self) -> Vec<usize> {
        let mut seen = vec![false; self.component_count + 1];
        let (w, h) = (self.width, self.height);
        for i in 0..w {
            seen[self.label(i, 0)] = true;
            seen[self.label(i, h - 1)] = true;
        }
        for j in 0..h {
            seen[self.label(0, j)] = true;
            seen[self.label(w - 1, j)] = true;
        }
        (1..=self.component_count).filter(|&l| seen[l]).collect()
    }
}

/// Labels the true cells of `mask`. Labels are assigned in row-major order
/// of each component's first cell.
pub fn flood_components(mask: &Raster, connectivity: Connectivity) -> LabeledRaster {
    let (w, h) = (mask.width, mask.height);
    let mut labels = vec![0usize; w * h];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if !mask.cells[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (i, j) = ((idx % w) as isize, (idx / w) as isize);
            for &(di, dj) in connectivity.offsets() {
                let (ni, nj) = (i + di, j + dj);
                if mask.get_signed(ni, nj) {
                    let n = nj as usize * w + ni as usize;
                    if labels[n] == 0 {
                        labels[n] = next;
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    LabeledRaster {
        width: w,
        height: h,
        labels,
        component_count: next,
    }
}

/// Complement components of a region, with every border-touching background
/// component merged into the single unbounded one.
#[derive(Debug, Clone)]
pub struct ComplementComponents {
    /// 8-connected background labeling of the complement.
    pub labels: LabeledRaster,
    /// Labels that touch the frame border (jointly the unbounded component).
    pub unbounded: Vec<usize>,
    /// Labels of bounded complement components.
    pub bounded: Vec<usize>,
}

impl ComplementComponents {
    /// Total number of complement components on the sphere.
    pub fn count(&self) -> usize {
        self.bounded.len() + usize::from(!self.unbounded.is_empty())
    }

    pub fn is_bounded(&self, label: usize) -> bool {
        self.bounded.contains(&label)
    }
}

pub fn complement_components(region: &Raster) -> ComplementComponents {
    let labels = flood_components(&region.complement(), Connectivity::Eight);
    let unbounded = labels.border_labels();
    let bounded = (1..=labels.component_count())
        .filter(|l| !unbounded.contains(l))
        .collect();
    ComplementComponents {
        labels,
        unbounded,
        bounded,
    }
}

/// `n` such that the complement of the region on the Riemann sphere has
/// `n + 1` components.
pub fn connectivity_number(region: &Raster) -> Result<usize> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let comps = complement_components(region);
    // A region filling the whole frame still has the point at infinity outside.
    Ok(comps.count().max(1) - 1)
}
