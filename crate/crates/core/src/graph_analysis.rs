//! Separation, chordality, chordless cycles and nondecomposable partitions.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model_core::UndirectedGraph;

pub const DEFAULT_VERTEX_CAP: usize = 12;

/// `Z` separates `X` from `Y`. Vertex sets are sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Separation {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub z: Vec<usize>,
}

impl Separation {
    pub fn is_saturated(&self, nvertices: usize) -> bool {
        self.x.len() + self.y.len() + self.z.len() == nvertices
    }
}

fn disjoint(sets: &[&[usize]], n: usize) -> bool {
    let mut seen = vec![false; n];
    for s in sets {
        for &v in *s {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
    }
    true
}

/// Whether every path from `x` to `y` meets `z`. Panics unless the sets are
/// disjoint.
pub fn separates(g: &UndirectedGraph, x: &[usize], y: &[usize], z: &[usize]) -> bool {
    let n = g.nvertices();
    assert!(disjoint(&[x, y, z], n), "separation sets must be disjoint vertex sets");
    let mut blocked = vec![false; n];
    for &v in z {
        blocked[v] = true;
    }
    let mut target = vec![false; n];
    for &v in y {
        target[v] = true;
    }
    let mut seen = vec![false; n];
    let mut queue: VecDeque<usize> = x.iter().copied().collect();
    for &v in x {
        seen[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        if target[v] {
            return false;
        }
        for w in g.neighbors(v) {
            if !seen[w] && !blocked[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    true
}

pub fn saturated_separations(g: &UndirectedGraph) -> Result<Vec<Separation>> {
    saturated_separations_capped(g, DEFAULT_VERTEX_CAP)
}

/// Every saturated separation, one representative per `X <-> Y` swap
/// (the one with `x < y`), in lexicographic order.
pub fn saturated_separations_capped(g: &UndirectedGraph, cap: usize) -> Result<Vec<Separation>> {
    let n = g.nvertices();
    if n > cap {
        return Err(Error::VertexCapExceeded { cap, found: n });
    }
    let mut out = Vec::new();
    let mut assign = vec![0u8; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for a in assign.iter_mut() {
            *a = (c % 3) as u8;
            c /= 3;
        }
        let part = |k: u8| (0..n).filter(|&v| assign[v] == k).collect::<Vec<_>>();
        let (x, y, z) = (part(0), part(1), part(2));
        if x.is_empty() || y.is_empty() || x > y {
            continue;
        }
        // with X, Y, Z covering all vertices, separation means no X-Y edge
        if x.iter().all(|&a| y.iter().all(|&b| !g.has_edge(a, b))) {
            out.push(Separation { x, y, z });
        }
    }
    out.sort();
    Ok(out)
}

/// Maximum cardinality search verdict, with a perfect elimination order
/// (first vertex eliminated first) when chordal.
pub fn is_chordal(g: &UndirectedGraph) -> (bool, Option<Vec<usize>>) {
    let n = g.nvertices();
    let mut weight = vec![0usize; n];
    let mut numbered = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !numbered[v]).max_by_key(|&v| (weight[v], std::cmp::Reverse(v))).unwrap();
        numbered[v] = true;
        visit.push(v);
        for w in g.neighbors(v) {
            if !numbered[w] {
                weight[w] += 1;
            }
        }
    }
    visit.reverse();
    if is_perfect_elimination_order(g, &visit) {
        (true, Some(visit))
    } else {
        (false, None)
    }
}

/// Each vertex's later neighbours form a clique.
pub fn is_perfect_elimination_order(g: &UndirectedGraph, order: &[usize]) -> bool {
    let n = g.nvertices();
    let mut pos = vec![0; n];
    for (k, &v) in order.iter().enumerate() {
        pos[v] = k;
    }
    order.iter().all(|&v| {
        let later: Vec<usize> = g.neighbors(v).into_iter().filter(|&w| pos[w] > pos[v]).collect();
        later.iter().all(|&a| later.iter().all(|&b| a == b || g.has_edge(a, b)))
    })
}

/// A shortest chordless cycle of length at least 4, written from its
/// smallest vertex in the direction of the smaller neighbour; ties broken
/// lexicographically.
pub fn chordless_cycle(g: &UndirectedGraph) -> Option<Vec<usize>> {
    let n = g.nvertices();
    let mut best: Option<Vec<usize>> = None;
    for b in 0..n {
        let nb = g.neighbors(b);
        for (k, &a) in nb.iter().enumerate() {
            for &c in &nb[k + 1..] {
                if g.has_edge(a, c) {
                    continue;
                }
                // shortest a-c path avoiding b and its other neighbours
                let mut allowed = vec![true; n];
                allowed[b] = false;
                for &w in &nb {
                    if w != a && w != c {
                        allowed[w] = false;
                    }
                }
                if let Some(path) = lex_shortest_path(g, a, c, &allowed) {
                    let mut cyc = vec![b];
                    cyc.extend(path);
                    let cyc = canonical_cycle(&cyc);
                    let better = match &best {
                        None => true,
                        Some(cur) => (cyc.len(), &cyc) < (cur.len(), cur),
                    };
                    if better {
                        best = Some(cyc);
                    }
                }
            }
        }
    }
    best
}

fn lex_shortest_path(g: &UndirectedGraph, from: usize, to: usize, allowed: &[bool]) -> Option<Vec<usize>> {
    let n = g.nvertices();
    let mut dist = vec![usize::MAX; n];
    dist[to] = 0;
    let mut queue = VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if allowed[w] && dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    if dist[from] == usize::MAX {
        return None;
    }
    let mut path = vec![from];
    let mut v = from;
    while v != to {
        v = g.neighbors(v).into_iter().find(|&w| allowed[w] && dist[w] + 1 == dist[v]).unwrap();
        path.push(v);
    }
    Some(path)
}

fn canonical_cycle(c: &[usize]) -> Vec<usize> {
    let k = c.len();
    let start = (0..k).min_by_key(|&i| c[i]).unwrap();
    let fwd: Vec<usize> = (0..k).map(|i| c[(start + i) % k]).collect();
    let bwd: Vec<usize> = (0..k).map(|i| c[(start + k - i) % k]).collect();
    fwd.min(bwd)
}

/// Blocks `A, B, C, D, E` lifting a chordless cycle to the whole graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NondecomposablePartition {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
    pub d: Vec<usize>,
    pub e: Vec<usize>,
}

impl NondecomposablePartition {
    pub fn blocks(&self) -> [&[usize]; 5] {
        [&self.a, &self.b, &self.c, &self.d, &self.e]
    }

    /// Block index (0 = A .. 4 = E) of each vertex.
    pub fn block_of(&self, n: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; n];
        for (k, blk) in self.blocks().iter().enumerate() {
            for &v in *blk {
                out[v] = k;
            }
        }
        out
    }
}

/// Partition from `chordless_cycle` with `A = {C1}`, `B = {C2}`, `C = {C3}`,
/// `D = {C4..Cn}` and the rest in `E`.
pub fn nondecomposable_partition(g: &UndirectedGraph) -> Result<NondecomposablePartition> {
    let cyc = chordless_cycle(g).ok_or(Error::ChordalGraph)?;
    let on_cycle: Vec<bool> = (0..g.nvertices()).map(|v| cyc.contains(&v)).collect();
    let mut d = cyc[3..].to_vec();
    d.sort_unstable();
    let part = NondecomposablePartition {
        a: vec![cyc[0]],
        b: vec![cyc[1]],
        c: vec![cyc[2]],
        d,
        e: (0..g.nvertices()).filter(|&v| !on_cycle[v]).collect(),
    };
    validate_partition(g, &part)?;
    Ok(part)
}

fn connected_within(g: &UndirectedGraph, set: &[usize]) -> bool {
    let n = g.nvertices();
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![set[0]];
    seen[set[0]] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for w in g.neighbors(v) {
            if inside[w] && !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == set.len()
}

/// Checks the five defining properties: disjoint blocks covering every
/// vertex, `A..D` nonempty, `A..D` inducing a chordless cycle whose blocks
/// follow each other around it, and each of `A..D` connected.
pub fn validate_partition(g: &UndirectedGraph, p: &NondecomposablePartition) -> Result<()> {
    let n = g.nvertices();
    let bad = |s: &str| Err(Error::InvalidPartition(s.to_string()));
    if !disjoint(&p.blocks(), n) {
        return bad("blocks overlap or name unknown vertices");
    }
    if p.blocks().iter().map(|b| b.len()).sum::<usize>() != n {
        return bad("blocks do not cover every vertex");
    }
    if p.blocks()[..4].iter().any(|b| b.is_empty()) {
        return bad("one of A, B, C, D is empty");
    }
    let ring: Vec<usize> = p.blocks()[..4].iter().flat_map(|b| b.iter().copied()).collect();
    if ring.len() < 4 {
        return bad("cycle shorter than 4");
    }
    let mut in_ring = vec![false; n];
    for &v in &ring {
        in_ring[v] = true;
    }
    if ring.iter().any(|&v| g.neighbors(v).into_iter().filter(|&w| in_ring[w]).count() != 2)
        || !connected_within(g, &ring)
    {
        return bad("A, B, C, D do not induce a chordless cycle");
    }
    let block = p.block_of(n);
    let touches = |x: usize, y: usize| {
        p.blocks()[x].iter().any(|&u| g.neighbors(u).into_iter().any(|w| block[w] == y))
    };
    // contracted blocks must form a 4-cycle
    let adj: Vec<Vec<bool>> = (0..4).map(|x| (0..4).map(|y| x != y && touches(x, y)).collect()).collect();
    let degs: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    if degs.iter().any(|&k| k != 2) {
        return bad("blocks do not contract to a 4-cycle");
    }
    if let Some(k) = p.blocks()[..4].iter().position(|b| !connected_within(g, b)) {
        return Err(Error::InvalidPartition(format!("block {} is not connected", ["A", "B", "C", "D"][k])));
    }
    Ok(())
}
