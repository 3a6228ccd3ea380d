//! Exact clique search over an abstract adjacency oracle.
//!
//! The engine is shared by the GL_n(F_q) graph and the S_n agreement graph.
//! [`max_clique`] is a bitset branch-and-bound in the style of MCQ/BBMC:
//! vertices are renumbered in a static degeneracy (smallest-last) order and
//! every node bounds its subtree by a greedy coloring of the candidate set.
//! [`exhaustive_max_clique`] is the unpruned search used to check it.

/// Symmetric adjacency between vertices `0..vertex_count()`.
pub trait AdjacencyOracle {
    fn vertex_count(&self) -> usize;
    /// Only queried for `i != j`.
    fn adjacent(&self, i: usize, j: usize) -> bool;
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn empty(n: usize) -> Bits {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits { words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect() }
    }

    fn and_not_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }
}

/// A materialized simple graph with bitset adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    rows: Vec<Bits>,
}

impl BitGraph {
    pub fn from_oracle<O: AdjacencyOracle + ?Sized>(oracle: &O) -> BitGraph {
        let n = oracle.vertex_count();
        let mut rows = vec![Bits::empty(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if oracle.adjacent(i, j) {
                    rows[i].insert(j);
                    rows[j].insert(i);
                }
            }
        }
        BitGraph { n, rows }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> BitGraph {
        let mut rows = vec![Bits::empty(n); n];
        for &(i, j) in edges {
            if i != j {
                rows[i].insert(j);
                rows[j].insert(i);
            }
        }
        BitGraph { n, rows }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i].count()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[i].iter()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn complement(&self) -> BitGraph {
        let mut rows = vec![Bits::empty(self.n); self.n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in 0..self.n {
                if i != j && !self.adjacent(i, j) {
                    row.insert(j);
                }
            }
        }
        BitGraph { n: self.n, rows }
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(k, &a)| vertices[k + 1..].iter().all(|&b| a != b && self.adjacent(a, b)))
    }

    /// Smallest-last order, highest core first.
    fn degeneracy_order(&self) -> Vec<usize> {
        let mut degree: Vec<usize> = (0..self.n).map(|i| self.degree(i)).collect();
        let mut removed = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let v = (0..self.n)
                .filter(|&i| !removed[i])
                .min_by_key(|&i| (degree[i], i))
                .expect("vertices remain");
            removed[v] = true;
            order.push(v);
            for u in self.rows[v].iter() {
                if !removed[u] {
                    degree[u] -= 1;
                }
            }
        }
        order.reverse();
        order
    }

    /// Copy of the graph with vertex `order[k]` renamed to `k`.
    fn renumbered(&self, order: &[usize]) -> BitGraph {
        let mut pos = vec![0; self.n];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let mut rows = vec![Bits::empty(self.n); self.n];
        for (k, &v) in order.iter().enumerate() {
            for u in self.rows[v].iter() {
                rows[k].insert(pos[u]);
            }
        }
        BitGraph { n: self.n, rows }
    }
}

// Greedy sequential coloring of `p` in index order. Returns vertices with
// non-decreasing color numbers (1-based).
fn color_sort(g: &BitGraph, p: &Bits) -> (Vec<usize>, Vec<usize>) {
    let mut uncolored = p.clone();
    let mut order = Vec::with_capacity(p.count());
    let mut colors = Vec::with_capacity(order.capacity());
    let mut k = 0;
    while !uncolored.is_empty() {
        k += 1;
        let mut q = uncolored.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            uncolored.remove(v);
            q.and_not_assign(&g.rows[v]);
            order.push(v);
            colors.push(k);
        }
    }
    (order, colors)
}

struct Search<'a> {
    g: &'a BitGraph,
    current: Vec<usize>,
    best: Vec<usize>,
    // collect every clique of the best size instead of one
    collect_all: bool,
    all: Vec<Vec<usize>>,
    nodes: u64,
}

impl Search<'_> {
    fn expand(&mut self, mut p: Bits) {
        self.nodes += 1;
        let (order, colors) = color_sort(self.g, &p);
        for idx in (0..order.len()).rev() {
            let bound = self.current.len() + colors[idx];
            let best = self.best.len();
            if bound < best || (bound == best && !self.collect_all) {
                return;
            }
            let v = order[idx];
            let next = p.and(&self.g.rows[v]);
            self.current.push(v);
            if next.is_empty() {
                self.record();
            } else {
                self.expand(next);
            }
            self.current.pop();
            p.remove(v);
        }
    }

    fn record(&mut self) {
        let size = self.current.len();
        if size > self.best.len() {
            self.best = self.current.clone();
            if self.collect_all {
                self.all.clear();
            }
        }
        if self.collect_all && size == self.best.len() {
            self.all.push(self.current.clone());
        }
    }
}

/// Search statistics returned alongside a clique.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
}

fn run_search(g: &BitGraph, anchor: Option<usize>, collect_all: bool) -> (Vec<usize>, Vec<Vec<usize>>, SearchStats) {
    if g.n == 0 {
        return (Vec::new(), vec![Vec::new()], SearchStats::default());
    }
    let order = g.degeneracy_order();
    let h = g.renumbered(&order);
    let mut search = Search { g: &h, current: Vec::new(), best: Vec::new(), collect_all, all: Vec::new(), nodes: 0 };
    let mut p = Bits::empty(h.n);
    match anchor {
        Some(a) => {
            let a = order.iter().position(|&v| v == a).expect("anchor is a vertex");
            search.current.push(a);
            p = h.rows[a].clone();
            if p.is_empty() {
                search.record();
            }
        }
        None => (0..h.n).for_each(|i| p.insert(i)),
    }
    if !p.is_empty() {
        search.expand(p);
    }
    let restore = |c: &Vec<usize>| {
        let mut c: Vec<usize> = c.iter().map(|&k| order[k]).collect();
        c.sort_unstable();
        c
    };
    let best = restore(&search.best);
    let mut all: Vec<Vec<usize>> = search.all.iter().map(restore).collect();
    all.sort();
    (best, all, SearchStats { nodes: search.nodes })
}

/// A maximum clique as sorted vertex indices. With `anchor`, only cliques
/// containing that vertex are considered.
pub fn max_clique(g: &BitGraph, anchor: Option<usize>) -> Vec<usize> {
    max_clique_with_stats(g, anchor).0
}

pub fn max_clique_with_stats(g: &BitGraph, anchor: Option<usize>) -> (Vec<usize>, SearchStats) {
    let (best, _, stats) = run_search(g, anchor, false);
    (best, stats)
}

/// Every maximum clique, each sorted, in lexicographic order.
pub fn all_max_cliques(g: &BitGraph) -> Vec<Vec<usize>> {
    run_search(g, None, true).1
}

/// Unpruned search: visits every clique of the graph.
pub fn exhaustive_max_clique(g: &BitGraph) -> Vec<usize> {
    fn grow(g: &BitGraph, current: &mut Vec<usize>, candidates: &[usize], best: &mut Vec<usize>) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        for (k, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[k + 1..].iter().copied().filter(|&u| g.adjacent(v, u)).collect();
            current.push(v);
            grow(g, current, &next, best);
            current.pop();
        }
    }
    let all: Vec<usize> = (0..g.n).collect();
    let mut best = Vec::new();
    grow(g, &mut Vec::new(), &all, &mut best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Cycle(usize);

    impl AdjacencyOracle for Cycle {
        fn vertex_count(&self) -> usize {
            self.0
        }
        fn adjacent(&self, i: usize, j: usize) -> bool {
            (i + 1) % self.0 == j || (j + 1) % self.0 == i
        }
    }

    fn petersen() -> BitGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        BitGraph::from_edges(10, &edges)
    }

    #[test]
    fn small_graphs() {
        let c5 = BitGraph::from_oracle(&Cycle(5));
        assert_eq!(max_clique(&c5, None).len(), 2);
        assert_eq!(max_clique(&c5.complement(), None).len(), 2);
        let pet = petersen();
        assert_eq!(max_clique(&pet, None).len(), 2);
        assert_eq!(max_clique(&pet.complement(), None).len(), 4);
        assert_eq!(all_max_cliques(&pet).len(), 15);
    }

    #[test]
    fn empty_and_edgeless() {
        let g = BitGraph::from_edges(0, &[]);
        assert!(max_clique(&g, None).is_empty());
        let g = BitGraph::from_edges(4, &[]);
        assert_eq!(max_clique(&g, None), vec![0]);
        assert_eq!(max_clique(&g, Some(2)), vec![2]);
        assert_eq!(all_max_cliques(&g).len(), 4);
    }

    #[test]
    fn complete_multipartite() {
        // K_{3,3,3}: clique number 3, 27 maximum cliques
        let mut edges = Vec::new();
        for i in 0..9 {
            for j in i + 1..9 {
                if i % 3 != j % 3 {
                    edges.push((i, j));
                }
            }
        }
        let g = BitGraph::from_edges(9, &edges);
        let c = max_clique(&g, None);
        assert_eq!(c.len(), 3);
        assert!(g.is_clique(&c));
        assert_eq!(all_max_cliques(&g).len(), 27);
    }

    #[test]
    fn anchored_search_contains_anchor() {
        let pet = petersen().complement();
        for a in 0..10 {
            let c = max_clique(&pet, Some(a));
            assert!(c.contains(&a));
            assert!(pet.is_clique(&c));
            assert_eq!(c.len(), 4);
        }
    }

    // Deterministic pseudo-random graphs checked against the unpruned search.
    #[test]
    fn matches_exhaustive_on_random_graphs() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for trial in 0..40 {
            let n = 10 + trial % 25;
            let density = 20 + (trial * 7) % 70;
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if next() % 100 < density as u64 {
                        edges.push((i, j));
                    }
                }
            }
            let g = BitGraph::from_edges(n, &edges);
            let fast = max_clique(&g, None);
            let slow = exhaustive_max_clique(&g);
            assert!(g.is_clique(&fast));
            assert_eq!(fast.len(), slow.len(), "trial {trial}");
            for clique in all_max_cliques(&g) {
                assert_eq!(clique.len(), slow.len());
                assert!(g.is_clique(&clique));
            }
        }
    }
}
