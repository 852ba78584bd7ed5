use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, PartialEq)]
struct State {
    cost: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on cost, ties broken by node index for determinism.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) struct ShortestPaths {
    pub dist: Vec<f64>,
    pub prev: Vec<usize>,
}

impl ShortestPaths {
    /// Node sequence from the source to `target`, or `None` if unreached.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while self.prev[cur] != usize::MAX {
            cur = self.prev[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// Single-source Dijkstra over `n` nodes; stops early once `target` is settled.
pub(crate) fn dijkstra(
    n: usize,
    source: usize,
    target: Option<usize>,
    mut neighbors: impl FnMut(usize, &mut Vec<(usize, f64)>),
) -> ShortestPaths {
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let mut scratch = Vec::with_capacity(16);
    dist[source] = 0.0;
    heap.push(State {
        cost: 0.0,
        node: source,
    });
    while let Some(State { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if Some(node) == target {
            break;
        }
        scratch.clear();
        neighbors(node, &mut scratch);
        for &(next, w) in &scratch {
            let c = cost + w;
            if c < dist[next] {
                dist[next] = c;
                prev[next] = node;
                heap.push(State {
                    cost: c,
                    node: next,
                });
            }
        }
    }
    ShortestPaths { dist, prev }
}
