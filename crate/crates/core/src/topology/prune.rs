use log::debug;

use super::{Incidence, Stage, TopologyGraph, VertexRole};
use crate::error::{Error, Result};

impl TopologyGraph {
    fn is_deadend_tip(&self, v: usize, deg: &[usize]) -> bool {
        deg[v] == 1 && self.vertices[v].role == VertexRole::Normal
    }

    /// The far side of an incidence is a dead-end tip, or the edge is a ray.
    fn leads_nowhere(&self, inc: Incidence, deg: &[usize]) -> bool {
        let e = &self.edges[inc.edge];
        let far = if inc.at_start { e.to } else { e.from };
        e.ray || self.is_deadend_tip(far, deg)
    }

    /// Picks the half-polygon that takes over the atoms of edge `e` when it
    /// is removed at vertex `j`: the next halfedge around `j`, or the last
    /// one if the next leads to another dead end.
    fn absorption_target(&self, e: usize, j: usize, deg: &[usize]) -> Option<(Incidence, usize)> {
        let rot = self.rotation(j);
        let at_start = self.edges[e].from == j;
        let i = rot.iter().position(|r| r.edge == e && r.at_start == at_start)?;
        let n = rot.len();
        let next = rot[(i + 1) % n];
        let last = rot[(i + n - 1) % n];
        let usable = |inc: Incidence| inc.edge != e && !self.edges[inc.edge].ray;
        if usable(next) && !self.leads_nowhere(next, deg) {
            return Some((next, Self::leaving_half(next)));
        }
        if usable(last) {
            return Some((last, Self::arriving_half(last)));
        }
        if usable(next) {
            return Some((next, Self::leaving_half(next)));
        }
        None
    }
}

/// One pass of dead-end removal: every edge from a dead-end tip to a
/// junction shorter than `min_length_px` is deleted and its polygon joins a
/// neighbouring half-polygon. Returns the number of removed edges.
pub fn remove_deadends(g: &mut TopologyGraph, min_length_px: f64) -> usize {
    let deg0 = g.degrees();
    let candidates: Vec<usize> = (0..g.edges.len())
        .filter(|&e| {
            let edge = &g.edges[e];
            !edge.ray && edge.length_px() < min_length_px && (g.is_deadend_tip(edge.from, &deg0) || g.is_deadend_tip(edge.to, &deg0))
        })
        .collect();
    let mut pending = candidates;
    let mut count = 0;
    while !pending.is_empty() {
        let e = pending.remove(0);
        let deg = g.degrees();
        let (from, to) = (g.edges[e].from, g.edges[e].to);
        let j = match (g.is_deadend_tip(from, &deg), g.is_deadend_tip(to, &deg)) {
            (true, false) => to,
            (false, true) => from,
            _ => continue,
        };
        if deg[j] < 3 {
            continue;
        }
        let Some((inc, half)) = g.absorption_target(e, j, &deg) else { continue };
        let anchor = g.anchor_near(inc);
        g.absorb(e, inc.edge, half, anchor);
        g.edges.remove(e);
        for p in &mut pending {
            if *p > e {
                *p -= 1;
            }
        }
        count += 1;
    }
    g.compact();
    g.collapse_chains();
    g.stage = Stage::DeadendsRemoved;
    debug!("removed {count} dead-end edges");
    count
}

/// Keeps the connected component with the largest total edge length.
pub fn keep_biggest_group(g: &mut TopologyGraph) -> Result<()> {
    if g.edges.is_empty() {
        return Err(Error::NoTraversableSpace);
    }
    let n = g.vertices.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in &g.edges {
        let (a, b) = (find(&mut parent, e.from), find(&mut parent, e.to));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let roots: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    let mut length = vec![0.0; n];
    let mut count = vec![0usize; n];
    let mut lowest = vec![None::<(f64, f64)>; n];
    for e in &g.edges {
        if !e.ray {
            length[roots[e.from]] += e.length_px();
        }
    }
    for v in 0..n {
        let r = roots[v];
        count[r] += 1;
        let p = g.vertices[v].position;
        let key = (p.x, p.y);
        if lowest[r].is_none_or(|l| key.partial_cmp(&l) == Some(std::cmp::Ordering::Less)) {
            lowest[r] = Some(key);
        }
    }
    let best = (0..n)
        .filter(|&r| roots[r] == r && count[r] > 0)
        .max_by(|&a, &b| {
            length[a]
                .total_cmp(&length[b])
                .then(count[a].cmp(&count[b]))
                .then_with(|| {
                    let (la, lb) = (lowest[a].unwrap(), lowest[b].unwrap());
                    lb.0.total_cmp(&la.0).then(lb.1.total_cmp(&la.1))
                })
        })
        .expect("non-empty graph has a component");
    g.edges.retain(|e| roots[e.from] == best);
    g.compact();
    g.stage = Stage::BiggestGroup;
    Ok(())
}

/// Deletes unbounded edges and re-joins the chains they interrupted.
pub fn remove_rays(g: &mut TopologyGraph) {
    let before = g.edges.len();
    g.edges.retain(|e| !e.ray);
    debug!("removed {} rays", before - g.edges.len());
    g.compact();
    g.collapse_chains();
    g.stage = Stage::RaysRemoved;
}

/// Contracts edges shorter than `max_dist_px` whose endpoints are both
/// junctions. The surviving vertex is the edge's start; the contracted
/// edge's polygon goes to a neighbouring half-polygon by the dead-end rule.
pub fn merge_close_vertices(g: &mut TopologyGraph, max_dist_px: f64) -> usize {
    let mut merged = 0;
    loop {
        let deg = g.degrees();
        let candidate = g.edges.iter().position(|e| {
            !e.ray && e.from != e.to && deg[e.from] >= 3 && deg[e.to] >= 3 && e.length_px() < max_dist_px
        });
        let Some(e) = candidate else { break };
        let (u, v) = (g.edges[e].from, g.edges[e].to);
        if let Some((inc, half)) = g.absorption_target(e, v, &deg) {
            let anchor = g.anchor_near(inc);
            g.absorb(e, inc.edge, half, anchor);
        }
        let bridge = g.edges[e].chain.clone();
        let back: Vec<_> = bridge.iter().rev().copied().collect();
        for (i, f) in g.edges.iter_mut().enumerate() {
            if i == e {
                continue;
            }
            if f.from == v {
                let mut c = bridge.clone();
                c.extend_from_slice(&f.chain[1..]);
                f.chain = c;
                f.from = u;
            }
            if f.to == v {
                f.chain.extend_from_slice(&back[1..]);
                f.to = u;
            }
        }
        g.edges.remove(e);
        g.compact();
        merged += 1;
    }
    g.stage = Stage::VerticesMerged;
    debug!("merged {merged} close vertex pairs");
    merged
}
