//! Biconnected block decomposition of an embedded graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Instance, PlanarError, PlanarGraph, VertexId};

/// One biconnected block as a standalone instance, with the hole faces it
/// inherits and the projection of outside vertices onto its attachment
/// vertices.
#[derive(Debug, Clone)]
pub struct Block {
    pub instance: Instance,
    /// Every vertex id of the parent graph that is not in the block, mapped
    /// to the block vertex through which it is attached.
    pub attach: BTreeMap<VertexId, VertexId>,
}

impl Block {
    /// Lift a vertex set of the block to the parent vertex set.
    pub fn lift(&self, side: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
        let mut out = side.clone();
        for (&v, &a) in &self.attach {
            if side.contains(&a) {
                out.insert(v);
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

impl Instance {
    /// True when the graph has at least one edge, a single block, and every
    /// face is a simple cycle.
    pub fn is_biconnected(&self) -> bool {
        self.graph.edge_count() >= 3 && edge_blocks(&self.graph).len() == 1
    }

    pub fn blocks(&self) -> Result<BlockDecomposition, PlanarError> {
        let g = &self.graph;
        let groups = edge_blocks(g);
        let mut blocks = Vec::with_capacity(groups.len());
        for edges in groups {
            blocks.push(self.extract_block(&edges)?);
        }
        Ok(BlockDecomposition { blocks })
    }

    fn extract_block(&self, edges: &[usize]) -> Result<Block, PlanarError> {
        let g = &self.graph;
        let in_block: BTreeSet<usize> = edges.iter().copied().collect();
        let mut verts = BTreeSet::new();
        for &e in edges {
            let [u, v] = g.ends(e);
            verts.insert(u);
            verts.insert(v);
        }
        let verts: Vec<usize> = verts.into_iter().collect();
        let vmap: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let emap: BTreeMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let ends: Vec<[usize; 2]> = edges
            .iter()
            .map(|&e| {
                let [u, v] = g.ends(e);
                [vmap[&u], vmap[&v]]
            })
            .collect();
        let rotation: Vec<Vec<usize>> = verts
            .iter()
            .map(|&v| {
                g.rotation(v)
                    .iter()
                    .filter(|&&d| in_block.contains(&(d >> 1)))
                    .map(|&d| 2 * emap[&(d >> 1)] + (d & 1))
                    .collect()
            })
            .collect();
        let mut sub = PlanarGraph::assemble(
            verts.iter().map(|&v| g.vertex_id(v)).collect(),
            edges.iter().map(|&e| g.edge_id(e)).collect(),
            ends,
            rotation,
        )?;
        let mut holes = BTreeSet::new();
        for &h in g.holes() {
            for &d in g.face_darts(h) {
                if let Some(&be) = emap.get(&(d >> 1)) {
                    holes.insert(sub.face_of(2 * be + (d & 1)));
                }
            }
        }
        sub.set_holes(holes.into_iter().collect());
        let lengths = edges.iter().map(|&e| self.lengths[e]).collect();
        let mut inst = Instance::new(sub, lengths)?;
        inst.reserve_ids_from(self);
        // attachment: components of G minus block edges
        let n = g.vertex_count();
        let mut owner = vec![usize::MAX; n];
        for &v in &verts {
            owner[v] = v;
            let mut queue = VecDeque::from([v]);
            while let Some(x) = queue.pop_front() {
                for &d in g.rotation(x) {
                    if in_block.contains(&(d >> 1)) {
                        continue;
                    }
                    let y = g.head(d);
                    if owner[y] == usize::MAX {
                        owner[y] = v;
                        queue.push_back(y);
                    }
                }
            }
        }
        let attach = (0..n)
            .filter(|v| vmap.get(v).is_none())
            .map(|v| (g.vertex_id(v), g.vertex_id(owner[v])))
            .collect();
        Ok(Block { instance: inst, attach })
    }
}

/// Edge sets of the biconnected components, each sorted, ordered by their
/// smallest edge index.
pub(crate) fn edge_blocks(g: &PlanarGraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut edge_stack: Vec<usize> = Vec::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        // frame: (vertex, parent edge, next rotation index)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (v, pe, ref mut i)) = stack.last_mut() {
            if *i < g.degree(v) {
                let d = g.rotation(v)[*i];
                *i += 1;
                let e = d >> 1;
                if e == pe {
                    continue;
                }
                let w = g.head(d);
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, e, 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut comp = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            comp.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
    }
    out.sort();
    out
}
