use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::export::{fmt_g, fmt_point};
use crate::kobayashi::{CatalogMetric, MetricBall};

/// Nerve of a cover of a ball raster by pieces of radius `r_cover` about
/// greedily chosen centers.
///
/// Each ball cell is assigned to its nearest center, so the pieces are the
/// closed Voronoi regions, each contained in the `r_cover` disk about its
/// center. Edges join regions meeting along a cell side or corner and
/// triangles come from corners shared by three regions, so `cycle_rank` is
/// the first Betti number of the 2-skeleton; `graph_cycle_rank` ignores the
/// triangles and only bounds it from above.
#[derive(Debug, Clone, PartialEq)]
pub struct NerveGraph {
    pub centers: Vec<Complex64>,
    pub r_cover: f64,
    pub edges: Vec<(usize, usize)>,
    pub triangles: Vec<[usize; 3]>,
    pub component_count: usize,
    pub graph_cycle_rank: usize,
    pub cycle_rank: usize,
}

impl NerveGraph {
    pub fn export(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "r_cover = {}", fmt_g(self.r_cover));
        let _ = writeln!(s, "vertices = {}", self.centers.len());
        for (k, c) in self.centers.iter().enumerate() {
            let _ = writeln!(s, "vertex {k} {} {}", fmt_point(*c), fmt_g(self.r_cover));
        }
        let _ = writeln!(s, "edges = {}", self.edges.len());
        for (a, b) in &self.edges {
            let _ = writeln!(s, "edge {a} {b}");
        }
        let _ = writeln!(s, "triangles = {}", self.triangles.len());
        let _ = writeln!(s, "components = {}", self.component_count);
        let _ = writeln!(s, "graph_cycle_rank = {}", self.graph_cycle_rank);
        let _ = writeln!(s, "cycle_rank = {}", self.cycle_rank);
        s
    }
}

/// Half the smallest distance between a lifted ball cell and its first
/// deck translate, less a small tolerance; `+∞` without a deck group.
pub fn injectivity_lower_bound(domain: &DomainSpec, ball: &MetricBall) -> Result<f64> {
    let metric = CatalogMetric::new(domain)?;
    let atlas = metric.atlas();
    if !atlas.has_deck_group() {
        return Ok(f64::INFINITY);
    }
    let f = &ball.frame;
    let mut best = f64::INFINITY;
    for idx in 0..f.cell_count() {
        if ball.raster.cells()[idx] {
            let w = atlas.lift(f.center_of_index(idx))?;
            best = best.min(atlas.model_distance(w, atlas.deck(w, 1)));
        }
    }
    if !best.is_finite() {
        return Err(Error::EmptyBall);
    }
    Ok(0.5 * best - 1e-9)
}

pub fn nerve_cover(domain: &DomainSpec, ball: &MetricBall, r_cover: f64) -> Result<NerveGraph> {
    if !(r_cover > 0.0) {
        return Err(Error::NonPositive(format!("r_cover {r_cover}")));
    }
    let bound = injectivity_lower_bound(domain, ball)?;
    if r_cover > bound / 2.0 {
        return Err(Error::CoverScaleTooLarge { r_cover, bound });
    }
    let metric = CatalogMetric::new(domain)?;
    let f = &ball.frame;
    let cells: Vec<usize> = (0..f.cell_count())
        .filter(|&i| ball.raster.cells()[i])
        .collect();
    if cells.is_empty() {
        return Err(Error::EmptyBall);
    }
    let pts: Vec<Complex64> = cells.iter().map(|&i| f.center_of_index(i)).collect();

    // Farthest-point greedy, first center nearest the ball center; ties go
    // to the first cell in scan order.
    let first = (0..pts.len())
        .min_by(|&a, &b| {
            (pts[a] - ball.center)
                .norm()
                .total_cmp(&(pts[b] - ball.center).norm())
        })
        .unwrap();
    let mut centers = Vec::new();
    let mut nearest = vec![usize::MAX; pts.len()];
    let mut dmin = vec![f64::INFINITY; pts.len()];
    let mut pick = first;
    loop {
        let id = centers.len();
        centers.push(pts[pick]);
        for (k, &z) in pts.iter().enumerate() {
            let d = metric.distance(pts[pick], z)?;
            if d < dmin[k] {
                dmin[k] = d;
                nearest[k] = id;
            }
        }
        let (far, &dmax) = dmin
            .iter()
            .enumerate()
            .fold(
                (0, &f64::NEG_INFINITY),
                |acc, x| if *x.1 > *acc.1 { x } else { acc },
            );
        if dmax <= r_cover {
            break;
        }
        pick = far;
    }

    let mut label = vec![usize::MAX; f.cell_count()];
    for (k, &idx) in cells.iter().enumerate() {
        label[idx] = nearest[k];
    }
    let mut edges = BTreeSet::new();
    let mut triangles = BTreeSet::new();
    // Every 2×2 block of ball cells is a square of the raster's cubical
    // complex; side-adjacent pairs are its edges.
    for j in 0..f.height {
        for i in 0..f.width {
            let a = label[j * f.width + i];
            if a == usize::MAX {
                continue;
            }
            for (di, dj) in [(1, 0), (0, 1)] {
                if i + di < f.width && j + dj < f.height {
                    let b = label[(j + dj) * f.width + i + di];
                    if b != usize::MAX && b != a {
                        edges.insert((a.min(b), a.max(b)));
                    }
                }
            }
            if i + 1 < f.width && j + 1 < f.height {
                let block = [
                    a,
                    label[j * f.width + i + 1],
                    label[(j + 1) * f.width + i],
                    label[(j + 1) * f.width + i + 1],
                ];
                if block.contains(&usize::MAX) {
                    continue;
                }
                let mut ids: Vec<usize> = block.to_vec();
                ids.sort_unstable();
                ids.dedup();
                for x in 0..ids.len() {
                    for y in x + 1..ids.len() {
                        edges.insert((ids[x], ids[y]));
                        for z in y + 1..ids.len() {
                            triangles.insert([ids[x], ids[y], ids[z]]);
                        }
                    }
                }
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let triangles: Vec<[usize; 3]> = triangles.into_iter().collect();
    let v = centers.len();
    let component_count = graph_components(v, &edges);
    let graph_cycle_rank = edges.len() + component_count - v;
    let boundary_rank = boundary_rank_gf2(&edges, &triangles);
    Ok(NerveGraph {
        centers,
        r_cover,
        edges,
        triangles,
        component_count,
        graph_cycle_rank,
        cycle_rank: graph_cycle_rank - boundary_rank,
    })
}

fn graph_components(n: usize, edges: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut count = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            count -= 1;
        }
    }
    count
}

/// Rank over GF(2) of the triangle-to-edge boundary matrix, by the standard
/// column reduction on sparse sorted columns.
fn boundary_rank_gf2(edges: &[(usize, usize)], triangles: &[[usize; 3]]) -> usize {
    let index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut pivot_owner: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut rank = 0;
    for t in triangles {
        let mut col: Vec<usize> = vec![
            index[&(t[0], t[1])],
            index[&(t[0], t[2])],
            index[&(t[1], t[2])],
        ];
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match pivot_owner.get(&low) {
                Some(other) => col = xor_sorted(&col, other),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_owner.insert(low, col);
            rank += 1;
        }
    }
    rank
}

fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::covering_atlas;
    use crate::kobayashi::kob_ball_raster;
    use crate::topology::connectivity_number;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rank_of_filled_and_hollow_triangle() {
        let edges = vec![(0, 1), (0, 2), (1, 2)];
        assert_eq!(boundary_rank_gf2(&edges, &[[0, 1, 2]]), 1);
        assert_eq!(boundary_rank_gf2(&edges, &[]), 0);
        // Tetrahedron surface: 4 triangles, boundary rank 3.
        let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert_eq!(
            boundary_rank_gf2(&edges, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]),
            3
        );
    }

    #[test]
    fn disk_nerve_is_acyclic() {
        let ball = kob_ball_raster(&DomainSpec::Disk, c(0.2, -0.1), 1.5, 0.02).unwrap();
        let nerve = nerve_cover(&DomainSpec::Disk, &ball, 0.5).unwrap();
        assert_eq!(nerve.component_count, 1);
        assert_eq!(nerve.cycle_rank, 0);
        assert!(nerve.graph_cycle_rank > 0);
        assert!(nerve.export().contains("cycle_rank = 0"));
    }

    #[test]
    fn annulus_nerve_matches_connectivity() {
        let d = DomainSpec::Annulus(0.1);
        let s = 0.1f64.sqrt();
        for (radius, expected) in [(0.5, 0), (2.5, 1)] {
            let ball = kob_ball_raster(&d, c(s, 0.0), radius, 0.02).unwrap();
            let nerve = nerve_cover(&d, &ball, 0.5).unwrap();
            assert_eq!(nerve.cycle_rank, expected, "radius {radius}");
            assert_eq!(connectivity_number(&ball.raster).unwrap(), expected);
        }
    }

    #[test]
    fn injectivity_examples() {
        let disk = kob_ball_raster(&DomainSpec::Disk, c(0.0, 0.0), 1.0, 0.05).unwrap();
        assert_eq!(
            injectivity_lower_bound(&DomainSpec::Disk, &disk).unwrap(),
            f64::INFINITY
        );

        let pd = DomainSpec::PuncturedDisk;
        let ball = kob_ball_raster(&pd, c(1.0 / E, 0.0), 1.0, 0.02).unwrap();
        let bound = injectivity_lower_bound(&pd, &ball).unwrap();
        // Oracle: half-plane distance between w and w + 2πi is asinh(π/|Re w|).
        let atlas = covering_atlas(&pd).unwrap();
        let oracle = (0..ball.frame.cell_count())
            .filter(|&i| ball.raster.cells()[i])
            .map(|i| {
                let w = atlas.lift(ball.frame.center_of_index(i)).unwrap();
                (std::f64::consts::PI / w.re.abs()).asinh()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(bound > 0.0 && (bound - 0.5 * oracle).abs() < 1e-8);

        let ann = DomainSpec::Annulus(0.1);
        let ball = kob_ball_raster(&ann, c(0.1f64.sqrt(), 0.0), 2.5, 0.02).unwrap();
        let bound = injectivity_lower_bound(&ann, &ball).unwrap();
        assert!(bound > 0.0 && bound < 2.14323);
    }

    #[test]
    fn cover_scale_guard() {
        let d = DomainSpec::Annulus(0.1);
        let ball = kob_ball_raster(&d, c(0.1f64.sqrt(), 0.0), 2.5, 0.04).unwrap();
        assert!(matches!(
            nerve_cover(&d, &ball, 5.0),
            Err(Error::CoverScaleTooLarge { .. })
        ));
    }
}
