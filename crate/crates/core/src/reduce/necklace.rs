//! Procedure II: interplay of the most remote type-0 geodesics of antipodal
//! boundary pairs of one hole.

use std::collections::{BTreeMap, BTreeSet};

use super::{ReduceContext, ReduceError, ReduceStep, StepAction};
use crate::geodesics::{all_distances, geodesic_region, path_vertices, DistanceTable, GeodesicError, HoleBoundary};
use crate::metricspace::VertexSet;
use crate::planar::{Instance, PlanarGraph, VertexId};
use crate::twohole::{
    apply_certificate, certify_reduction, make_certificate, pack_cuts_small_holes, CutPacking, MonotonicityCheck,
    ReductionCertificate,
};

/// An instance whose hole boundary was made centrally symmetric.
#[derive(Debug, Clone)]
pub struct Symmetrized {
    pub instance: Instance,
    /// The hole as a face of `instance`.
    pub hole: usize,
    /// Vertices inserted as antipodes.
    pub added: Vec<VertexId>,
}

/// Insert, for every vertex of the hole boundary lacking one, a vertex at
/// boundary distance `sigma / 2`.
pub fn symmetrize(inst: &Instance, hole: usize) -> Result<Symmetrized, ReduceError> {
    let g = &inst.graph;
    let hb = HoleBoundary::of(inst, hole);
    let sigma = hb.sigma();
    let half = sigma / 2;
    let positions: BTreeSet<i64> = hb.prefix[..hb.len()].iter().copied().collect();
    let mut wanted: BTreeMap<usize, BTreeSet<i64>> = BTreeMap::new();
    for &p in &positions {
        let a = (p + half) % sigma;
        if positions.contains(&a) {
            continue;
        }
        let k = hb.prefix.partition_point(|&q| q <= a) - 1;
        let d = hb.darts[k];
        let along = a - hb.prefix[k];
        let from_first = if d & 1 == 0 { along } else { inst.lengths[d >> 1] - along };
        wanted.entry(d >> 1).or_default().insert(from_first);
    }
    if wanted.is_empty() {
        return Ok(Symmetrized { instance: inst.clone(), hole, added: Vec::new() });
    }
    let requests: Vec<(usize, Vec<i64>)> = wanted.into_iter().map(|(e, offs)| (e, offs.into_iter().collect())).collect();
    let (sym, created) = inst.subdivide_many(&requests)?;
    let d0 = hb.darts[0];
    let e0 = sym.graph.edge_index(g.edge_id(d0 >> 1)).expect("first piece keeps its id");
    let new_hole = sym.graph.face_of(2 * e0 + (d0 & 1));
    Ok(Symmetrized { instance: sym, hole: new_hole, added: created.into_iter().flatten().collect() })
}

/// The subcase of a pair of antipodal pairs, named as in the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NecklaceCase {
    Shortcut1a,
    Shortcut1b,
    Cross2a,
    Cross2b,
    Cross2c,
    Cross2dFlip,
    Cross2dAntipodal,
}

impl NecklaceCase {
    pub fn label(self) -> &'static str {
        match self {
            NecklaceCase::Shortcut1a => "1a",
            NecklaceCase::Shortcut1b => "1b",
            NecklaceCase::Cross2a => "2a",
            NecklaceCase::Cross2b => "2b",
            NecklaceCase::Cross2c => "2c",
            NecklaceCase::Cross2dFlip => "2d-I",
            NecklaceCase::Cross2dAntipodal => "2d-II",
        }
    }
}

/// A good reduction prescribed by the case analysis: solve the auxiliary
/// problem with `aux_holes` and keep the cuts that meet `meet` (if given)
/// and miss every edge of `miss`.
#[derive(Debug, Clone)]
pub struct NecklacePlan {
    pub case: NecklaceCase,
    pub i: usize,
    pub j: usize,
    pub aux_holes: Vec<usize>,
    pub meet: Option<Vec<usize>>,
    pub miss: Vec<usize>,
    pub expected: i64,
}

/// Result of analysing one pair `{i, j}`.
#[derive(Debug, Clone)]
pub enum PairAnalysis {
    /// Nothing to do: Subcase 1a, or the final state of Subcase 2d-II.
    Settled(NecklaceCase),
    Reduce(NecklacePlan),
    /// The configuration does not match the case analysis.
    Unexpected(String),
}

fn rev(path: &[usize]) -> Vec<usize> {
    path.iter().rev().map(|&d| d ^ 1).collect()
}

fn cat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

struct Walk {
    darts: Vec<usize>,
    verts: Vec<usize>,
    pos: BTreeMap<usize, usize>,
}

impl Walk {
    fn new(g: &PlanarGraph, start: usize, darts: Vec<usize>) -> Walk {
        let verts = path_vertices(g, start, &darts);
        let pos = verts.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        Walk { darts, verts, pos }
    }

    fn sub(&self, a: usize, b: usize) -> &[usize] {
        &self.darts[self.pos[&a]..self.pos[&b]]
    }

    fn head(&self, a: usize) -> &[usize] {
        &self.darts[..self.pos[&a]]
    }

    fn tail(&self, a: usize) -> &[usize] {
        &self.darts[self.pos[&a]..]
    }
}

/// Everything the case analysis needs about the symmetrized hole.
pub struct HoleFrame<'a> {
    pub inst: &'a Instance,
    pub dist: &'a DistanceTable,
    pub hb: &'a HoleBoundary,
    /// `remote[i]` is `D(s_i t_i)`.
    pub remote: &'a [Vec<usize>],
}

impl HoleFrame<'_> {
    fn n(&self) -> usize {
        self.hb.len() / 2
    }

    fn s(&self, i: usize) -> usize {
        self.hb.vertices[i % self.hb.len()]
    }

    fn arc(&self, i: usize, j: usize) -> Vec<usize> {
        let m = self.hb.len();
        self.hb.arc(i % m, j % m)
    }

    fn walk(&self, i: usize) -> Walk {
        let m = self.hb.len();
        Walk::new(&self.inst.graph, self.s(i), self.remote[i % m].clone())
    }

    fn len(&self, p: &[usize]) -> i64 {
        self.inst.path_length(p)
    }

    /// Case 1 for paths `a` (in `P(s_ia t_ia)`) and `b` (in `P(s_ib t_ib)`)
    /// with `s_ia -> s_ib -> t_ia -> t_ib`.
    fn case_one(&self, a: &Walk, b: &Walk, ia: usize, ib: usize, tag: NecklaceCase) -> PairAnalysis {
        let common: Vec<usize> = a.verts.iter().copied().filter(|v| b.pos.contains_key(v)).collect();
        let (Some(&x), Some(&y)) = (common.first(), common.last()) else {
            return PairAnalysis::Unexpected("paths are disjoint".into());
        };
        if x != y && b.pos[&x] > b.pos[&y] {
            return PairAnalysis::Unexpected("paths cross in reverse order".into());
        }
        let hat = a.sub(x, y);
        let p_prime = cat(&[b.head(x), hat, a.tail(y)]);
        let b0 = b.verts[0];
        let a1 = *a.verts.last().unwrap();
        let eps = self.len(&p_prime) - self.dist.get(b0, a1);
        if eps == 0 {
            return PairAnalysis::Settled(NecklaceCase::Shortcut1a);
        }
        let p = cat(&[a.head(x), hat, b.tail(y)]);
        let mut miss = self.arc(ib, ia + self.n());
        miss.extend(p);
        PairAnalysis::Reduce(NecklacePlan {
            case: tag,
            i: ia % self.hb.len(),
            j: ib % self.hb.len(),
            aux_holes: vec![self.hb.face],
            meet: Some(self.arc(ia, ib)),
            miss,
            expected: eps / 2,
        })
    }

    /// Classify the pair `{i, j}` with `s_i -> s_j -> t_i -> t_j`, using
    /// `M = D_i` and `N = D_j`.
    pub fn analyse(&self, i: usize, j: usize) -> PairAnalysis {
        let g = &self.inst.graph;
        let n = self.n();
        let m = self.walk(i);
        let nw = self.walk(j);
        let common: Vec<usize> = m.verts.iter().copied().filter(|v| nw.pos.contains_key(v)).collect();
        let (Some(&x), Some(&y)) = (common.first(), common.last()) else {
            return PairAnalysis::Unexpected("remote paths are disjoint".into());
        };
        if x == y || nw.pos[&x] < nw.pos[&y] {
            return self.case_one(&m, &nw, i, j, NecklaceCase::Shortcut1b);
        }
        if common.windows(2).any(|w| nw.pos[&w[0]] <= nw.pos[&w[1]]) {
            return PairAnalysis::Unexpected("common vertices not in reverse order".into());
        }
        // Segments between consecutive common vertices; hole-free ones are
        // flattened onto M.
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        let mut essential: Vec<(usize, Vec<usize>)> = Vec::new();
        for p in 1..common.len() {
            let (a, b) = (common[p - 1], common[p]);
            let mp = m.sub(a, b);
            let np = nw.sub(b, a);
            if np == rev(mp).as_slice() {
                pieces.push(np.to_vec());
                continue;
            }
            let region = g.faces_cut_off(&[mp, np], self.hb.face);
            let holes = g.holes_in(&region);
            if holes.is_empty() {
                pieces.push(rev(mp));
            } else {
                pieces.push(np.to_vec());
                essential.push((p, holes));
            }
        }
        let n2: Vec<usize> = pieces.iter().rev().flatten().copied().collect();
        let (m1, m3) = (m.head(x), m.tail(y));
        let (n1, n3) = (nw.head(y), nw.tail(x));
        let m2 = m.sub(x, y);
        let t = self.s(i + n);
        let s2 = self.s(j);
        let antipodal = (j + 2 * n - i) % (2 * n) == n;
        let p_prime = cat(&[n1, m3]);
        let eps = self.len(&p_prime) - self.dist.get(s2, t);
        let plan = |case, aux_holes, meet, miss, expected| {
            PairAnalysis::Reduce(NecklacePlan { case, i, j, aux_holes, meet, miss, expected })
        };
        let shortcut = |case, aux| plan(case, aux, Some(self.arc(i, j)), cat(&[m1, n3]), self.len(m2) + eps / 2);
        match essential.as_slice() {
            [] => shortcut(NecklaceCase::Cross2a, vec![self.hb.face]),
            [(_, h)] if h.len() == 1 => shortcut(NecklaceCase::Cross2b, vec![self.hb.face, h[0]]),
            [(q, hq), (_, hp)] if hq.len() == 1 && hp.len() == 1 => {
                let z = common[*q];
                let f = self.len(m.sub(z, y));
                plan(NecklaceCase::Cross2c, vec![self.hb.face, hp[0]], Some(self.arc(i, j)), m.head(z).to_vec(), f + eps / 2)
            }
            [(p, h)] if h.len() == 2 => {
                if !antipodal {
                    let r = cat(&[m1, m2, &rev(n1)]);
                    let r2 = cat(&[&rev(m3), &n2, n3]);
                    if self.len(&r) >= self.len(&r2) {
                        let flipped = cat(&[&rev(n3), m2, &rev(n1)]);
                        let a = Walk::new(g, self.s(j + n), flipped);
                        self.case_one(&a, &m, j + n, i, NecklaceCase::Cross2dFlip)
                    } else {
                        let flipped = cat(&[&rev(m3), &n2, &rev(m1)]);
                        let b = Walk::new(g, t, flipped);
                        self.case_one(&nw, &b, j, i + n, NecklaceCase::Cross2dFlip)
                    }
                } else {
                    let (z, u) = (common[p - 1], common[*p]);
                    let tail = if u != y {
                        m.sub(u, y)
                    } else if x != z {
                        m.sub(x, z)
                    } else {
                        return PairAnalysis::Settled(NecklaceCase::Cross2dAntipodal);
                    };
                    plan(NecklaceCase::Cross2dAntipodal, vec![self.hb.face], Some(tail.to_vec()), Vec::new(), self.len(tail))
                }
            }
            other => PairAnalysis::Unexpected(format!("{} essential regions", other.len())),
        }
    }
}

fn crosses(g: &PlanarGraph, x: &VertexSet, darts: &[usize]) -> bool {
    darts.iter().any(|&d| x.contains(&g.vertex_id(g.tail(d))) != x.contains(&g.vertex_id(g.head(d))))
}

/// Cuts of the auxiliary packing selected by a plan.
pub fn select_cuts(g: &PlanarGraph, packing: &CutPacking, plan: &NecklacePlan) -> Vec<(VertexSet, i64)> {
    packing
        .cuts
        .iter()
        .filter(|(x, _)| plan.meet.as_ref().is_none_or(|m| crosses(g, x, m)) && !crosses(g, x, &plan.miss))
        .cloned()
        .collect()
}

/// What Procedure II found.
#[derive(Debug, Clone)]
pub enum NecklaceOutcome {
    Step(ReduceStep),
    /// Every pair of every hole is settled.
    Clean,
    /// Some pair needed a reduction that could not be carried out.
    Stuck(Vec<String>),
}

/// The pair list `{i, j}` with `s_i -> s_j -> t_i -> t_j` for `2n` boundary
/// vertices.
pub fn antipodal_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..2 * n {
        for k in 1..=n {
            if k == n && i >= n {
                continue;
            }
            out.push((i, (i + k) % (2 * n)));
        }
    }
    out
}

/// The remote paths `D(s_i t_i)` of a symmetrized hole.
pub fn remote_paths(inst: &Instance, dist: &DistanceTable, hb: &HoleBoundary) -> Result<Vec<Vec<usize>>, GeodesicError> {
    let m = hb.len();
    (0..m).map(|i| geodesic_region(inst, dist, hb, i, (i + m / 2) % m).map(|r| r.remote)).collect()
}

/// Run the case analysis over all holes and return the first reduction.
pub fn procedure_two(inst: &Instance, ctx: &ReduceContext) -> Result<NecklaceOutcome, ReduceError> {
    let mut notes = Vec::new();
    let mut oracle_calls = 0;
    for &h in inst.graph.holes() {
        let sym = symmetrize(inst, h)?;
        let si = &sym.instance;
        let dist = all_distances(si, ctx.mode);
        let hb = HoleBoundary::of(si, sym.hole);
        if !hb.len().is_multiple_of(2) {
            notes.push(format!("hole {h}: odd boundary after symmetrization"));
            continue;
        }
        let remote = match remote_paths(si, &dist, &hb) {
            Ok(r) => r,
            Err(e) => {
                notes.push(format!("hole {h}: {e}"));
                continue;
            }
        };
        let frame = HoleFrame { inst: si, dist: &dist, hb: &hb, remote: &remote };
        let mut packings: BTreeMap<Vec<usize>, Option<CutPacking>> = BTreeMap::new();
        for (i, j) in antipodal_pairs(hb.len() / 2) {
            let plan = match frame.analyse(i, j) {
                PairAnalysis::Settled(_) => continue,
                PairAnalysis::Unexpected(why) => {
                    notes.push(format!("hole {h} pair ({i},{j}): {why}"));
                    continue;
                }
                PairAnalysis::Reduce(plan) => plan,
            };
            let packing = packings.entry(plan.aux_holes.clone()).or_insert_with(|| {
                oracle_calls += 1;
                pack_cuts_small_holes(&si.with_holes(&plan.aux_holes), ctx.oracle).ok()
            });
            let Some(packing) = packing else {
                notes.push(format!("hole {h} pair ({i},{j}): auxiliary problem unsolved"));
                continue;
            };
            let cuts = select_cuts(&si.graph, packing, &plan);
            let total: i64 = cuts.iter().map(|(_, w)| w).sum();
            if total != plan.expected || cuts.is_empty() {
                notes.push(format!(
                    "hole {h} pair ({i},{j}) {}: selected weight {total}, expected {}",
                    plan.case.label(),
                    plan.expected
                ));
                continue;
            }
            let cert = certificate(si, &plan, cuts);
            let check = certify_reduction(si, &cert, MonotonicityCheck::None, ctx.mode);
            if !check.ok {
                notes.push(format!("hole {h} pair ({i},{j}) {}: {}", plan.case.label(), check.diagnostics.join("; ")));
                continue;
            }
            let mut actions = Vec::new();
            if !sym.added.is_empty() {
                actions.push(StepAction::Replace { instance: si.clone(), merges: Vec::new() });
            }
            let after = apply_certificate(si, &cert);
            actions.push(StepAction::Reduce(cert));
            if !sym.added.is_empty() {
                actions.push(StepAction::Replace { instance: after.suppress_vertices(&sym.added)?, merges: Vec::new() });
            }
            return Ok(NecklaceOutcome::Step(ReduceStep { phase: "procedure II", actions, oracle_calls }));
        }
    }
    Ok(if notes.is_empty() { NecklaceOutcome::Clean } else { NecklaceOutcome::Stuck(notes) })
}

fn certificate(inst: &Instance, plan: &NecklacePlan, cuts: Vec<(VertexSet, i64)>) -> ReductionCertificate {
    let mut registers = BTreeMap::new();
    registers.insert("i".to_string(), plan.i as i64);
    registers.insert("j".to_string(), plan.j as i64);
    registers.insert("expected".to_string(), plan.expected);
    let phase = format!("procedure II {}", plan.case.label());
    make_certificate(inst, &phase, cuts, registers)
}
