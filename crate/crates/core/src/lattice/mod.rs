//! Finite boxes of Z^d, edge indexing, configurations and connectivity.

mod config;
pub mod event;
mod union_find;

pub use config::Configuration;
pub use event::{Event, Monotonicity};
pub use union_find::UnionFind;

use crate::error::{invalid, Error, Result};

/// Default cap on the number of vertices of a box.
pub const VERTEX_BUDGET: usize = 100_000_000;

/// A box of Z^d with nearest-neighbour edges.
///
/// Vertices are numbered in row-major order (last axis fastest). Edges are
/// listed by (lesser endpoint, axis), so the order only depends on the box.
#[derive(Clone, Debug)]
pub struct LatticeGraph {
    d: usize,
    lo: Vec<i64>,
    hi: Vec<i64>,
    stride: Vec<usize>,
    vertices: usize,
    edges: Vec<[u32; 2]>,
    axis: Vec<u8>,
    offsets: Vec<u32>,
    incident: Vec<u32>,
    boundary: Vec<u32>,
    on_boundary: Vec<bool>,
}

impl LatticeGraph {
    /// The box [-n, n]^d.
    pub fn new(d: usize, n: usize) -> Result<LatticeGraph> {
        Self::with_budget(d, n, VERTEX_BUDGET)
    }

    pub fn with_budget(d: usize, n: usize, budget: usize) -> Result<LatticeGraph> {
        let n = n as i64;
        Self::rectangle(&vec![-n; d], &vec![n; d], budget)
    }

    /// The box prod_a [lo_a, hi_a].
    pub fn rectangle(lo: &[i64], hi: &[i64], budget: usize) -> Result<LatticeGraph> {
        let d = lo.len();
        if d == 0 || hi.len() != d {
            return invalid("dimension must be at least 1 and bounds must agree");
        }
        if lo.iter().zip(hi).any(|(a, b)| a > b) {
            return invalid("empty box");
        }
        let mut vertices: usize = 1;
        for (a, b) in lo.iter().zip(hi) {
            vertices = vertices
                .checked_mul((b - a + 1) as usize)
                .filter(|v| *v <= budget)
                .ok_or_else(|| Error::Budget(format!("box exceeds the vertex budget {budget}")))?;
        }
        let mut stride = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            stride[a] = stride[a + 1] * (hi[a + 1] - lo[a + 1] + 1) as usize;
        }
        let mut g = LatticeGraph {
            d,
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            stride,
            vertices,
            edges: Vec::new(),
            axis: Vec::new(),
            offsets: Vec::new(),
            incident: Vec::new(),
            boundary: Vec::new(),
            on_boundary: vec![false; vertices],
        };
        let mut x = lo.to_vec();
        for v in 0..vertices {
            for a in 0..d {
                if x[a] < hi[a] {
                    g.edges.push([v as u32, (v + g.stride[a]) as u32]);
                    g.axis.push(a as u8);
                }
            }
            if x.iter().zip(lo).zip(hi).any(|((c, l), h)| c == l || c == h) {
                g.on_boundary[v] = true;
                g.boundary.push(v as u32);
            }
            for a in (0..d).rev() {
                if x[a] < hi[a] {
                    x[a] += 1;
                    break;
                }
                x[a] = lo[a];
            }
        }
        let mut degree = vec![0u32; vertices + 1];
        for [u, w] in &g.edges {
            degree[*u as usize + 1] += 1;
            degree[*w as usize + 1] += 1;
        }
        for v in 0..vertices {
            degree[v + 1] += degree[v];
        }
        let mut fill = degree.clone();
        g.incident = vec![0; g.edges.len() * 2];
        for (e, [u, w]) in g.edges.iter().enumerate() {
            for v in [*u as usize, *w as usize] {
                g.incident[fill[v] as usize] = e as u32;
                fill[v] += 1;
            }
        }
        g.offsets = degree;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Radius n for the symmetric box [-n, n]^d.
    pub fn radius(&self) -> Option<usize> {
        let n = self.hi[0];
        (self.lo.iter().all(|l| *l == -n) && self.hi.iter().all(|h| *h == n)).then_some(n as usize)
    }

    pub fn lower(&self) -> &[i64] {
        &self.lo
    }

    pub fn upper(&self) -> &[i64] {
        &self.hi
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let [u, w] = self.edges[e];
        (u as usize, w as usize)
    }

    pub fn edge_axis(&self, e: usize) -> usize {
        self.axis[e] as usize
    }

    /// Edges incident to `v`, in increasing edge order.
    pub fn incident(&self, v: usize) -> &[u32] {
        &self.incident[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    pub fn coords(&self, v: usize) -> Vec<i64> {
        let mut rest = v;
        (0..self.d)
            .map(|a| {
                let c = rest / self.stride[a];
                rest %= self.stride[a];
                self.lo[a] + c as i64
            })
            .collect()
    }

    pub fn index_of(&self, x: &[i64]) -> Option<usize> {
        if x.len() != self.d {
            return None;
        }
        let mut v = 0;
        for a in 0..self.d {
            if x[a] < self.lo[a] || x[a] > self.hi[a] {
                return None;
            }
            v += (x[a] - self.lo[a]) as usize * self.stride[a];
        }
        Some(v)
    }

    pub fn origin(&self) -> Option<usize> {
        self.index_of(&vec![0; self.d])
    }

    /// Max-norm of a vertex's coordinates.
    pub fn sup_norm(&self, v: usize) -> usize {
        self.coords(v).iter().map(|c| c.unsigned_abs() as usize).max().unwrap_or(0)
    }

    /// Sup-norms of all vertices, indexed by vertex.
    pub fn sup_norms(&self) -> Vec<u32> {
        (0..self.vertices).map(|v| self.sup_norm(v) as u32).collect()
    }

    /// Vertices with at least one neighbour outside the box.
    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    /// Vertices whose coordinate along `axis` equals the lower or upper bound.
    pub fn face(&self, axis: usize, upper: bool) -> Vec<usize> {
        let target = if upper { self.hi[axis] } else { self.lo[axis] };
        (0..self.vertices).filter(|&v| self.coords(v)[axis] == target).collect()
    }

    /// Vertices at sup-norm exactly `k`.
    pub fn sphere(&self, k: usize) -> Vec<usize> {
        (0..self.vertices).filter(|&v| self.sup_norm(v) == k).collect()
    }
}

/// Union-find over the open edges of `cfg`.
pub fn open_clusters(g: &LatticeGraph, cfg: &Configuration) -> UnionFind {
    let mut uf = UnionFind::new(g.vertex_count());
    for e in cfg.open_edges() {
        let (u, w) = g.endpoints(e);
        uf.union(u, w);
    }
    uf
}

/// True iff an open path joins `x` and `y`.
pub fn connected(cfg: &Configuration, g: &LatticeGraph, x: usize, y: usize) -> bool {
    x == y || open_clusters(g, cfg).same(x, y)
}

/// True iff the origin is joined to the boundary of the box. A box of radius
/// zero has the origin as its boundary.
pub fn connected_to_boundary(cfg: &Configuration, g: &LatticeGraph) -> bool {
    let Some(o) = g.origin() else { return false };
    if g.is_boundary(o) {
        return true;
    }
    let mut uf = open_clusters(g, cfg);
    let root = uf.find(o);
    g.boundary().iter().any(|&b| uf.find(b as usize) == root)
}

/// Breadth-first search state reused across calls.
#[derive(Clone, Debug, Default)]
pub struct Explorer {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl Explorer {
    pub fn new() -> Explorer {
        Explorer::default()
    }

    fn begin(&mut self, vertices: usize) {
        if self.stamp.len() != vertices || self.epoch == u32::MAX {
            self.stamp = vec![0; vertices];
            self.epoch = 0;
        }
        self.epoch += 1;
        self.queue.clear();
    }

    /// Explores the open cluster of `start` using only edges accepted by
    /// `open` and vertices accepted by `allowed`; stops early as soon as
    /// `goal` accepts a visited vertex.
    pub fn search(
        &mut self,
        g: &LatticeGraph,
        start: usize,
        open: impl Fn(usize) -> bool,
        allowed: impl Fn(usize) -> bool,
        goal: impl Fn(usize) -> bool,
    ) -> bool {
        self.begin(g.vertex_count());
        self.stamp[start] = self.epoch;
        self.queue.push(start as u32);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head] as usize;
            head += 1;
            if goal(v) {
                return true;
            }
            for &e in g.incident(v) {
                let e = e as usize;
                if !open(e) {
                    continue;
                }
                let w = g.other_end(e, v);
                if self.stamp[w] != self.epoch && allowed(w) {
                    self.stamp[w] = self.epoch;
                    self.queue.push(w as u32);
                }
            }
        }
        false
    }
}
