//! Face regions cut out by closed walks, and sub-instances induced by them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{Instance, PlanarError, PlanarGraph};

/// Faces on the two sides of a set of barrier edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionSplit {
    /// Connected component label of every face in the dual graph with the
    /// barrier edges removed.
    pub component: Vec<usize>,
    pub count: usize,
}

/// A sub-map spanned by a set of faces. Vertex and edge ids are those of the
/// parent instance.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub instance: Instance,
    /// Faces of the sub-map that do not correspond to a face of the region.
    pub outer_faces: Vec<usize>,
}

impl PlanarGraph {
    /// Dual components after removing the given edges.
    pub fn split_faces(&self, barrier: &BTreeSet<usize>) -> RegionSplit {
        let nf = self.face_count();
        let mut component = vec![usize::MAX; nf];
        let mut count = 0;
        for start in 0..nf {
            if component[start] != usize::MAX {
                continue;
            }
            component[start] = count;
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                for &d in self.face_darts(f) {
                    if barrier.contains(&(d >> 1)) {
                        continue;
                    }
                    let g = self.face_of(d ^ 1);
                    if component[g] == usize::MAX {
                        component[g] = count;
                        queue.push_back(g);
                    }
                }
            }
            count += 1;
        }
        RegionSplit { component, count }
    }

    /// Faces separated from `anchor` by the union of the given dart paths.
    pub fn faces_cut_off(&self, paths: &[&[usize]], anchor: usize) -> BTreeSet<usize> {
        let barrier: BTreeSet<usize> = paths.iter().flat_map(|p| p.iter().map(|&d| d >> 1)).collect();
        let split = self.split_faces(&barrier);
        let a = split.component[anchor];
        (0..self.face_count()).filter(|&f| split.component[f] != a).collect()
    }

    /// Holes inside a face set.
    pub fn holes_in(&self, faces: &BTreeSet<usize>) -> Vec<usize> {
        self.holes().iter().copied().filter(|h| faces.contains(h)).collect()
    }
}

impl Instance {
    /// The sub-map consisting of the edges of the given faces. The faces of
    /// `region` keep their identity; every other face of the sub-map is an
    /// outer face. Holes of the result: those of `holes` lying in `region`,
    /// plus the outer faces when `outer_is_hole` is set.
    pub fn sub_instance(
        &self,
        region: &BTreeSet<usize>,
        holes: &[usize],
        outer_is_hole: bool,
    ) -> Result<SubInstance, PlanarError> {
        let g = &self.graph;
        let mut edges = BTreeSet::new();
        for &f in region {
            for &d in g.face_darts(f) {
                edges.insert(d >> 1);
            }
        }
        let edges: Vec<usize> = edges.into_iter().collect();
        let emap: BTreeMap<usize, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut verts = BTreeSet::new();
        for &e in &edges {
            let [u, v] = g.ends(e);
            verts.insert(u);
            verts.insert(v);
        }
        let verts: Vec<usize> = verts.into_iter().collect();
        let vmap: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ends = edges
            .iter()
            .map(|&e| {
                let [u, v] = g.ends(e);
                [vmap[&u], vmap[&v]]
            })
            .collect();
        let rotation = verts
            .iter()
            .map(|&v| {
                g.rotation(v)
                    .iter()
                    .filter_map(|&d| emap.get(&(d >> 1)).map(|&i| 2 * i + (d & 1)))
                    .collect()
            })
            .collect();
        let mut sub = PlanarGraph::assemble(
            verts.iter().map(|&v| g.vertex_id(v)).collect(),
            edges.iter().map(|&e| g.edge_id(e)).collect(),
            ends,
            rotation,
        )?;
        let map_dart = |d: usize| 2 * emap[&(d >> 1)] + (d & 1);
        let inner: BTreeSet<usize> = region.iter().map(|&f| sub.face_of(map_dart(g.face_darts(f)[0]))).collect();
        let outer_faces: Vec<usize> = (0..sub.face_count()).filter(|f| !inner.contains(f)).collect();
        let mut new_holes: Vec<usize> = holes
            .iter()
            .filter(|h| region.contains(h))
            .map(|&h| sub.face_of(map_dart(g.face_darts(h)[0])))
            .collect();
        if outer_is_hole {
            new_holes.extend(outer_faces.iter().copied());
        }
        sub.set_holes(new_holes);
        let lengths = edges.iter().map(|&e| self.lengths[e]).collect();
        let mut inst = Instance::new(sub, lengths)?;
        inst.reserve_ids_from(self);
        Ok(SubInstance { instance: inst, outer_faces })
    }

    /// Copy of the instance with a different hole set (faces of this graph).
    pub fn with_holes(&self, holes: &[usize]) -> Instance {
        let mut out = self.clone();
        out.graph.set_holes(holes.to_vec());
        out
    }

    /// Copy with different lengths.
    pub fn with_lengths(&self, lengths: Vec<i64>) -> Instance {
        let mut out = self.clone();
        out.lengths = lengths;
        out
    }
}
