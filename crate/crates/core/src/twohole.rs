//! Cut packings for at most two holes and the good-reduction certifier.
//!
//! A good reduction subtracts weighted cut incidence vectors from the edge
//! lengths so that every terminal distance drops by exactly the weight of
//! the cuts separating the pair. The reference oracle builds a full cut
//! packing by repeatedly finding such a cut: a candidate is generated from
//! a split of each hole boundary that carries positive weight in the
//! boundary's circular decomposition, closed under the implications that
//! every terminal geodesic must cross the cut exactly as often as its
//! endpoints are separated, and then checked exactly.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Parallelism;
use crate::geodesics::{all_distances, dag_darts, dijkstra, DistanceTable};
use crate::metricspace::VertexSet;
use crate::planar::{EdgeId, Instance, PlanarError, PlanarGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle failed: {0}")]
    OracleFailure(String),
    #[error("instance has {0} holes, at most two are supported")]
    TooManyHoles(usize),
    #[error("instance too large for the reference oracle: {0} candidates")]
    TooLarge(usize),
    #[error(transparent)]
    Planar(#[from] PlanarError),
}

/// Cuts given by one side, with positive integer weights.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPacking {
    pub cuts: Vec<(VertexSet, i64)>,
}

/// One good-reduction step.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCertificate {
    /// Which procedure produced the step.
    pub phase: String,
    pub cuts: Vec<(VertexSet, i64)>,
    pub lengths_before: Vec<(EdgeId, i64)>,
    pub lengths_after: Vec<(EdgeId, i64)>,
    /// Claimed distance decrease for every terminal pair.
    pub ledger: Vec<((VertexId, VertexId), i64)>,
    /// Named integer quantities of the invoking step.
    pub registers: BTreeMap<String, i64>,
}

/// Interface of an exact cut-packing solver for one or two holes.
pub trait CutOracle: Send + Sync {
    fn pack(&self, inst: &Instance) -> Result<CutPacking, OracleError>;
}

/// Greedy good-cut search with exact checking.
#[derive(Debug, Clone)]
pub struct ReferenceOracle {
    pub mode: Parallelism,
    /// Refuse instances whose boundary patterns exceed this count.
    pub candidate_limit: usize,
    /// Largest vertex count for the exhaustive last-resort search.
    pub exhaustive_limit: usize,
}

impl Default for ReferenceOracle {
    fn default() -> Self {
        ReferenceOracle { mode: Parallelism::Parallel, candidate_limit: 10_000, exhaustive_limit: 14 }
    }
}

impl ReferenceOracle {
    pub fn with_mode(mode: Parallelism) -> Self {
        ReferenceOracle { mode, ..Default::default() }
    }
}

impl CutOracle for ReferenceOracle {
    fn pack(&self, inst: &Instance) -> Result<CutPacking, OracleError> {
        let mut out = Vec::new();
        self.solve_into(inst.clone(), &mut out, 0)?;
        Ok(CutPacking { cuts: out })
    }
}

/// Solve a one- or two-hole instance and certify the packing.
pub fn pack_cuts_small_holes(inst: &Instance, oracle: &dyn CutOracle) -> Result<CutPacking, OracleError> {
    let nh = inst.graph.holes().len();
    if nh > 2 {
        return Err(OracleError::TooManyHoles(nh));
    }
    let packing = oracle.pack(inst)?;
    if let Some(problem) = check_cut_packing(inst, &packing) {
        return Err(OracleError::OracleFailure(problem));
    }
    Ok(packing)
}

/// First violation of: simple cuts, positive weights, nonnegative reduced
/// lengths, exact realization of every terminal distance.
pub fn check_cut_packing(inst: &Instance, packing: &CutPacking) -> Option<String> {
    let g = &inst.graph;
    let mut load = vec![0i64; g.edge_count()];
    for (x, w) in &packing.cuts {
        if *w <= 0 {
            return Some(format!("nonpositive weight {w}"));
        }
        if !crate::metricspace::is_simple_cut(g, x) {
            return Some(format!("cut {x:?} is not simple"));
        }
        for (e, l) in load.iter_mut().enumerate() {
            let [u, v] = g.ends(e);
            if x.contains(&g.vertex_id(u)) != x.contains(&g.vertex_id(v)) {
                *l += w;
            }
        }
    }
    for e in 0..g.edge_count() {
        if load[e] > inst.lengths[e] {
            return Some(format!("edge {} overloaded: {} > {}", g.edge_id(e), load[e], inst.lengths[e]));
        }
    }
    for (s, row) in terminal_rows(inst) {
        for t in g.terminals() {
            if !shares_hole(g, s, t) || t <= s {
                continue;
            }
            let sep: i64 = packing
                .cuts
                .iter()
                .filter(|(x, _)| x.contains(&g.vertex_id(s)) != x.contains(&g.vertex_id(t)))
                .map(|(_, w)| w)
                .sum();
            if sep != row[t] {
                return Some(format!(
                    "pair {}-{}: distance {} but separated weight {}",
                    g.vertex_id(s),
                    g.vertex_id(t),
                    row[t],
                    sep
                ));
            }
        }
    }
    None
}

fn terminal_rows(inst: &Instance) -> Vec<(usize, Vec<i64>)> {
    inst.graph
        .terminals()
        .into_iter()
        .map(|s| (s, dijkstra(&inst.graph, &inst.lengths, s)))
        .collect()
}

fn shares_hole(g: &PlanarGraph, s: usize, t: usize) -> bool {
    g.holes().iter().any(|&h| {
        let vs = g.face_vertices(h);
        vs.contains(&s) && vs.contains(&t)
    })
}

/// Reduced lengths after subtracting the weighted cuts (may be negative).
pub fn reduced_lengths(inst: &Instance, cuts: &[(VertexSet, i64)]) -> Vec<i64> {
    let g = &inst.graph;
    let mut out = inst.lengths.clone();
    for (x, w) in cuts {
        for (e, l) in out.iter_mut().enumerate() {
            let [u, v] = g.ends(e);
            if x.contains(&g.vertex_id(u)) != x.contains(&g.vertex_id(v)) {
                *l -= w;
            }
        }
    }
    out
}

/// Build the certificate for applying `cuts` to `inst`.
pub fn make_certificate(
    inst: &Instance,
    phase: &str,
    cuts: Vec<(VertexSet, i64)>,
    registers: BTreeMap<String, i64>,
) -> ReductionCertificate {
    let g = &inst.graph;
    let after = reduced_lengths(inst, &cuts);
    let ledger = crate::metricspace::terminal_pairs(g)
        .into_iter()
        .map(|(s, t)| {
            let dec = cuts.iter().filter(|(x, _)| x.contains(&s) != x.contains(&t)).map(|(_, w)| w).sum();
            ((s, t), dec)
        })
        .collect();
    ReductionCertificate {
        phase: phase.to_string(),
        cuts,
        lengths_before: (0..g.edge_count()).map(|e| (g.edge_id(e), inst.lengths[e])).collect(),
        lengths_after: (0..g.edge_count()).map(|e| (g.edge_id(e), after[e])).collect(),
        ledger,
        registers,
    }
}

/// How much of the zero-excess monotonicity to re-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonotonicityCheck {
    None,
    /// Pairs within faces and all `eps(x|st)` values.
    Sampled,
    /// All vertex pairs and all `eps(x|st)` values.
    Full,
}

/// Result of certifying a reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyOutcome {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

/// Check a certificate against the instance it claims to reduce.
pub fn certify_reduction(
    inst: &Instance,
    cert: &ReductionCertificate,
    level: MonotonicityCheck,
    mode: Parallelism,
) -> CertifyOutcome {
    let g = &inst.graph;
    let mut diag = Vec::new();
    let before: Vec<(EdgeId, i64)> = (0..g.edge_count()).map(|e| (g.edge_id(e), inst.lengths[e])).collect();
    if before != cert.lengths_before {
        diag.push("lengths_before does not match the instance".to_string());
    }
    for (x, w) in &cert.cuts {
        if *w <= 0 {
            diag.push(format!("nonpositive weight {w}"));
        }
        if x.iter().any(|v| g.vertex_index(*v).is_none()) {
            diag.push("cut mentions an unknown vertex".to_string());
        }
    }
    let after = reduced_lengths(inst, &cert.cuts);
    let after_ids: Vec<(EdgeId, i64)> = (0..g.edge_count()).map(|e| (g.edge_id(e), after[e])).collect();
    if after_ids != cert.lengths_after {
        diag.push("lengths_after does not equal lengths_before minus the cuts".to_string());
    }
    if let Some(&(e, l)) = after_ids.iter().find(|&&(_, l)| l < 0) {
        diag.push(format!("edge {e} gets negative length {l}"));
    }
    if !diag.is_empty() {
        return CertifyOutcome { ok: false, diagnostics: diag };
    }
    let reduced = inst.with_lengths(after);
    let (d0, d1) = match level {
        MonotonicityCheck::None => {
            let t = g.terminals();
            (
                crate::geodesics::distances_from(inst, &t, mode),
                crate::geodesics::distances_from(&reduced, &t, mode),
            )
        }
        _ => (all_distances(inst, mode), all_distances(&reduced, mode)),
    };
    let pairs = g.terminal_pairs();
    let ledger: BTreeMap<(VertexId, VertexId), i64> = cert.ledger.iter().copied().collect();
    for &(a, b) in &pairs {
        let (s, t) = (g.vertex_id(a), g.vertex_id(b));
        let key = (s.min(t), s.max(t));
        let sep: i64 = cert.cuts.iter().filter(|(x, _)| x.contains(&s) != x.contains(&t)).map(|(_, w)| w).sum();
        match ledger.get(&key) {
            Some(&claimed) if claimed == sep => {}
            Some(&claimed) => diag.push(format!("pair {s}-{t}: ledger {claimed}, separated weight {sep}")),
            None => diag.push(format!("pair {s}-{t} missing from ledger")),
        }
        if d1.get(a, b) != d0.get(a, b) - sep {
            diag.push(format!(
                "pair {s}-{t}: distance {} -> {}, expected decrease {sep}",
                d0.get(a, b),
                d1.get(a, b)
            ));
        }
    }
    if level != MonotonicityCheck::None && diag.is_empty() {
        diag.extend(monotonicity_violations(g, &pairs, &d0, &d1, level == MonotonicityCheck::Full));
    }
    CertifyOutcome { ok: diag.is_empty(), diagnostics: diag }
}

/// Zero values of `eps(x|st)` and of the excess that became positive.
pub fn monotonicity_violations(
    g: &PlanarGraph,
    pairs: &[(usize, usize)],
    d0: &DistanceTable,
    d1: &DistanceTable,
    full: bool,
) -> Vec<String> {
    let mut out = Vec::new();
    let n = g.vertex_count();
    for &(s, t) in pairs {
        for x in 0..n {
            if d0.eps(x, s, t) == 0 && d1.eps(x, s, t) != 0 {
                out.push(format!(
                    "eps({}|{},{}) left zero",
                    g.vertex_id(x),
                    g.vertex_id(s),
                    g.vertex_id(t)
                ));
                return out;
            }
        }
    }
    let mut xy: Vec<(usize, usize)> = Vec::new();
    if full {
        for x in 0..n {
            for y in x..n {
                xy.push((x, y));
            }
        }
    } else {
        let mut set = BTreeSet::new();
        for f in 0..g.face_count() {
            let vs = g.face_vertices(f);
            for &x in &vs {
                for &y in &vs {
                    set.insert((x.min(y), x.max(y)));
                }
            }
        }
        xy.extend(set);
    }
    for (x, y) in xy {
        if d0.excess(pairs, x, y) == 0 && d1.excess(pairs, x, y) != 0 {
            out.push(format!("excess of {}-{} left zero", g.vertex_id(x), g.vertex_id(y)));
            return out;
        }
    }
    out
}

/// Lengths after applying a certificate.
pub fn apply_certificate(inst: &Instance, cert: &ReductionCertificate) -> Instance {
    inst.with_lengths(reduced_lengths(inst, &cert.cuts))
}

/// Split a vertex set into sides of simple cuts whose incidence vectors sum
/// to that of the original cut.
pub fn simple_pieces(g: &PlanarGraph, x: &VertexSet) -> Vec<VertexSet> {
    let n = g.vertex_count();
    let inside: Vec<bool> = (0..n).map(|v| x.contains(&g.vertex_id(v))).collect();
    let mut pieces = Vec::new();
    for comp in components(g, &|v| inside[v]) {
        let in_comp: BTreeSet<usize> = comp.iter().copied().collect();
        for other in components(g, &|v| !in_comp.contains(&v)) {
            pieces.push(other.iter().map(|&v| g.vertex_id(v)).collect());
        }
    }
    pieces.sort();
    pieces
}

fn components(g: &PlanarGraph, keep: &dyn Fn(usize) -> bool) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || !keep(s) {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &d in g.rotation(v) {
                let w = g.head(d);
                if !seen[w] && keep(w) {
                    seen[w] = true;
                    comp.push(w);
                    queue.push_back(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Per terminal pair with positive distance: endpoints and the darts of its
/// shortest-path DAG directed from the first endpoint.
struct PairDag {
    s: usize,
    t: usize,
    darts: Vec<(usize, usize)>,
    vertices: Vec<usize>,
}

struct StepContext<'a> {
    inst: &'a Instance,
    dist: DistanceTable,
    pairs: Vec<PairDag>,
    terminals: Vec<usize>,
}

/// A terminal labeling: `true` means inside the cut side.
type Pattern = BTreeMap<usize, bool>;

impl ReferenceOracle {
    fn solve_into(&self, inst: Instance, out: &mut Vec<(VertexSet, i64)>, depth: usize) -> Result<(), OracleError> {
        if depth > 64 {
            return Err(OracleError::OracleFailure("block recursion too deep".into()));
        }
        let mut members: BTreeMap<VertexId, Vec<VertexId>> =
            inst.graph.vertex_ids().iter().map(|&v| (v, vec![v])).collect();
        let lift = |members: &BTreeMap<VertexId, Vec<VertexId>>, side: &VertexSet| -> VertexSet {
            side.iter().flat_map(|v| members[v].iter().copied()).collect()
        };
        let mut cur = inst;
        let mut steps = 0usize;
        loop {
            let (norm, log) = cur.normalize()?;
            for (gone, keep) in log.merges {
                let moved = members.remove(&gone).unwrap_or_default();
                members.entry(keep).or_default().extend(moved);
            }
            cur = norm;
            if cur.graph.holes().is_empty() || cur.graph.vertex_count() <= 1 {
                return Ok(());
            }
            if cur.graph.terminal_pairs().is_empty() {
                return Ok(());
            }
            if !cur.is_biconnected() {
                let dec = cur.blocks()?;
                for block in &dec.blocks {
                    if block.instance.graph.holes().is_empty() {
                        continue;
                    }
                    let mut sub = Vec::new();
                    if block.instance.graph.edge_count() == 1 {
                        let id = block.instance.graph.vertex_id(0);
                        sub.push((VertexSet::from([id]), block.instance.lengths[0]));
                    } else {
                        self.solve_into(block.instance.clone(), &mut sub, depth + 1)?;
                    }
                    for (side, w) in sub {
                        out.push((lift(&members, &block.lift(&side)), w));
                    }
                }
                return Ok(());
            }
            let (x, w) = self.find_good_cut(&cur)?;
            let pieces = simple_pieces(&cur.graph, &x);
            let cuts: Vec<(VertexSet, i64)> = pieces.into_iter().map(|p| (p, w)).collect();
            cur = cur.with_lengths(reduced_lengths(&cur, &cuts));
            for (side, w) in cuts {
                out.push((lift(&members, &side), w));
            }
            steps += 1;
            if steps > 1_000_000 {
                return Err(OracleError::OracleFailure("step budget exceeded".into()));
            }
        }
    }

    /// A vertex set whose cut is good for `inst`, with the largest weight
    /// for which it stays good.
    pub fn find_good_cut(&self, inst: &Instance) -> Result<(VertexSet, i64), OracleError> {
        let ctx = StepContext::new(inst, self.mode);
        let options = ctx.hole_options();
        let total = StepContext::pattern_count(&options);
        if total > self.candidate_limit.saturating_mul(64) {
            return Err(OracleError::TooLarge(total));
        }
        let patterns: Vec<Pattern> = (0..total).filter_map(|k| StepContext::pattern_at(&options, k)).collect();
        if patterns.len() > self.candidate_limit {
            return Err(OracleError::TooLarge(patterns.len()));
        }
        let strategies: [&(dyn Fn(&Pattern) -> Option<Vec<bool>> + Sync); 2] =
            [&|p| ctx.min_closure(p, &[]), &|p| ctx.max_closure(p)];
        for closure in strategies {
            let found = self.mode.find_first(patterns.len(), |i| {
                let x = closure(&patterns[i])?;
                let w = ctx.max_good_weight(&x)?;
                Some((x, w))
            });
            if let Some((_, (x, w))) = found {
                return Ok((ctx.to_ids(&x), w));
            }
        }
        // seed one extra vertex into the minimal closure
        let n = inst.graph.vertex_count();
        let found = self.mode.find_first(patterns.len() * n, |k| {
            let (i, v) = (k / n, k % n);
            if ctx.terminals.binary_search(&v).is_ok() {
                return None;
            }
            let x = ctx.min_closure(&patterns[i], &[v])?;
            let w = ctx.max_good_weight(&x)?;
            Some((x, w))
        });
        if let Some((_, (x, w))) = found {
            return Ok((ctx.to_ids(&x), w));
        }
        if n <= self.exhaustive_limit {
            let total = 1usize << (n - 1);
            let found = self.mode.find_first(total, |mask| {
                let x: Vec<bool> = (0..n).map(|v| v > 0 && (mask >> (v - 1)) & 1 == 1).collect();
                if !x.iter().any(|&b| b) {
                    return None;
                }
                let w = ctx.max_good_weight(&x)?;
                Some((x, w))
            });
            if let Some((_, (x, w))) = found {
                return Ok((ctx.to_ids(&x), w));
            }
        }
        Err(OracleError::OracleFailure(format!(
            "no good cut found among {} boundary patterns on {} vertices",
            patterns.len(),
            n
        )))
    }
}

impl<'a> StepContext<'a> {
    fn new(inst: &'a Instance, mode: Parallelism) -> Self {
        let g = &inst.graph;
        let dist = all_distances(inst, mode);
        let pairs: Vec<PairDag> = g
            .terminal_pairs()
            .into_iter()
            .filter(|&(s, t)| dist.get(s, t) > 0)
            .map(|(s, t)| {
                let darts: Vec<(usize, usize)> =
                    dag_darts(inst, &dist, s, t).into_iter().map(|d| (g.tail(d), g.head(d))).collect();
                let mut vertices: Vec<usize> = darts.iter().flat_map(|&(a, b)| [a, b]).collect();
                vertices.sort_unstable();
                vertices.dedup();
                PairDag { s, t, darts, vertices }
            })
            .collect();
        StepContext { inst, dist, pairs, terminals: g.terminals() }
    }

    fn to_ids(&self, x: &[bool]) -> VertexSet {
        (0..x.len()).filter(|&v| x[v]).map(|v| self.inst.graph.vertex_id(v)).collect()
    }

    /// Positive-weight arcs of each hole boundary, as position ranges
    /// `(start, len)` into the boundary sequence.
    fn positive_arcs(&self, seq: &[usize]) -> Vec<(usize, usize)> {
        let m = seq.len();
        let d = |i: usize, j: usize| self.dist.get(seq[i % m], seq[j % m]);
        let mut out = Vec::new();
        for len in 1..m {
            for i in 0..m {
                let j = i + len - 1;
                let prev = i + m - 1;
                let next = j + 1;
                let twice = d(prev, j) + d(i, next) - d(i, j) - d(prev, next);
                if twice > 0 {
                    out.push((i, len));
                }
            }
        }
        out
    }

    /// Labelings of each hole boundary: every positive arc (either side
    /// inside), all inside and all outside.
    fn hole_options(&self) -> Vec<Vec<Vec<(usize, bool)>>> {
        let g = &self.inst.graph;
        g.holes()
            .iter()
            .map(|&h| {
                let seq = g.face_vertices(h);
                let m = seq.len();
                let mut opts: Vec<Vec<(usize, bool)>> = Vec::new();
                for (i, len) in self.positive_arcs(&seq) {
                    let inside: BTreeSet<usize> = (i..i + len).map(|p| p % m).collect();
                    opts.push((0..m).map(|p| (seq[p], inside.contains(&p))).collect());
                }
                opts.push(seq.iter().map(|&v| (v, false)).collect());
                opts.push(seq.iter().map(|&v| (v, true)).collect());
                opts
            })
            .collect()
    }

    /// Number of option combinations, saturating.
    fn pattern_count(options: &[Vec<Vec<(usize, bool)>>]) -> usize {
        options.iter().fold(1usize, |acc, o| acc.saturating_mul(o.len()))
    }

    /// The combination with mixed-radix index `k`, when its labels agree on
    /// shared vertices, are not constant, and put the smallest terminal
    /// outside (each cut is listed once, not together with its complement).
    fn pattern_at(options: &[Vec<Vec<(usize, bool)>>], mut k: usize) -> Option<Pattern> {
        let mut p = Pattern::new();
        for opts in options {
            let o = &opts[k % opts.len()];
            k /= opts.len();
            for &(v, b) in o {
                if let Some(&old) = p.get(&v) {
                    if old != b {
                        return None;
                    }
                }
                p.insert(v, b);
            }
        }
        let (_, &first) = p.iter().next()?;
        if first || p.values().all(|&b| !b) {
            return None;
        }
        Some(p)
    }

    /// Smallest vertex set containing the in-terminals (and `extra`) that
    /// respects the crossing implications, or `None` when they conflict.
    fn min_closure(&self, p: &Pattern, extra: &[usize]) -> Option<Vec<bool>> {
        let n = self.inst.graph.vertex_count();
        let mut inside = vec![false; n];
        let mut forced_out = vec![false; n];
        let mut implied: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut queue = VecDeque::new();
        let push = |v: usize, inside: &mut Vec<bool>, queue: &mut VecDeque<usize>| {
            if !inside[v] {
                inside[v] = true;
                queue.push_back(v);
            }
        };
        for (&v, &b) in p {
            if b {
                push(v, &mut inside, &mut queue);
            } else {
                forced_out[v] = true;
            }
        }
        for &v in extra {
            push(v, &mut inside, &mut queue);
        }
        for pd in &self.pairs {
            let (bs, bt) = (p[&pd.s], p[&pd.t]);
            match (bs, bt) {
                (true, true) => {
                    for &v in &pd.vertices {
                        push(v, &mut inside, &mut queue);
                    }
                }
                (false, false) => {
                    for &v in &pd.vertices {
                        forced_out[v] = true;
                    }
                }
                (true, false) => {
                    for &(a, b) in &pd.darts {
                        implied[b].push(a);
                    }
                }
                (false, true) => {
                    for &(a, b) in &pd.darts {
                        implied[a].push(b);
                    }
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            if forced_out[v] {
                return None;
            }
            for &w in &implied[v] {
                push(w, &mut inside, &mut queue);
            }
        }
        Some(inside)
    }

    /// Largest vertex set avoiding the out-terminals that respects the
    /// crossing implications.
    fn max_closure(&self, p: &Pattern) -> Option<Vec<bool>> {
        let flipped: Pattern = p.iter().map(|(&v, &b)| (v, !b)).collect();
        let out = self.min_closure(&flipped, &[])?;
        Some(out.into_iter().map(|b| !b).collect())
    }

    /// Whether reducing by `w` times the cut of `x` is a good reduction.
    fn is_good(&self, x: &[bool], w: i64) -> bool {
        let g = &self.inst.graph;
        let mut lens = self.inst.lengths.clone();
        for (e, l) in lens.iter_mut().enumerate() {
            let [u, v] = g.ends(e);
            if x[u] != x[v] {
                *l -= w;
                if *l < 0 {
                    return false;
                }
            }
        }
        let mut by_source: BTreeMap<usize, Vec<&PairDag>> = BTreeMap::new();
        for pd in &self.pairs {
            by_source.entry(pd.s).or_default().push(pd);
        }
        for (s, list) in by_source {
            let row = dijkstra(g, &lens, s);
            for pd in list {
                let sep = i64::from(x[pd.s] != x[pd.t]);
                if row[pd.t] != self.dist.get(pd.s, pd.t) - w * sep {
                    return false;
                }
            }
        }
        true
    }

    fn max_good_weight(&self, x: &[bool]) -> Option<i64> {
        let g = &self.inst.graph;
        if !self.pairs.iter().any(|pd| x[pd.s] != x[pd.t]) {
            return None;
        }
        let cap = (0..g.edge_count())
            .filter(|&e| {
                let [u, v] = g.ends(e);
                x[u] != x[v]
            })
            .map(|e| self.inst.lengths[e])
            .min()?;
        if cap <= 0 || !self.is_good(x, 1) {
            return None;
        }
        let (mut lo, mut hi) = (1, cap);
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if self.is_good(x, mid) {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(lo)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fixtures::{random_grid, theta};
    use crate::metricspace::is_simple_cut;

    #[test]
    fn tampered_certificate_is_rejected() {
        let inst = random_grid(11, 4, 1, 6);
        let packing = pack_cuts_small_holes(&inst, &ReferenceOracle::default()).unwrap();
        let (x, w) = packing.cuts[0].clone();
        let mut cert = make_certificate(&inst, "test", vec![(x.clone(), w)], BTreeMap::new());
        assert!(certify_reduction(&inst, &cert, MonotonicityCheck::Full, Parallelism::Sequential).ok);
        cert.lengths_after[0].1 += 2;
        assert!(!certify_reduction(&inst, &cert, MonotonicityCheck::None, Parallelism::Sequential).ok);
        let heavy = make_certificate(&inst, "test", vec![(x, 1000)], BTreeMap::new());
        assert!(!certify_reduction(&inst, &heavy, MonotonicityCheck::None, Parallelism::Sequential).ok);
    }

    #[test]
    fn three_holes_are_refused() {
        assert!(matches!(
            pack_cuts_small_holes(&theta(), &ReferenceOracle::default()),
            Err(OracleError::TooManyHoles(3))
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn small_hole_packings_are_exact_and_simple(seed in 0u64..100_000, k in 3usize..6, holes in 1usize..3) {
            let inst = random_grid(seed, k, holes, 10);
            let (inst, _) = inst.normalize().unwrap();
            if inst.graph.c1_violation().is_some() {
                return Ok(());
            }
            let packing = pack_cuts_small_holes(&inst, &ReferenceOracle::default()).unwrap();
            let g = &inst.graph;
            let dist = all_distances(&inst, Parallelism::Sequential);
            for (x, w) in &packing.cuts {
                prop_assert!(*w > 0);
                prop_assert!(is_simple_cut(g, x));
            }
            for (a, b) in g.terminal_pairs() {
                let (s, t) = (g.vertex_id(a), g.vertex_id(b));
                let sep: i64 = packing.cuts.iter().filter(|(x, _)| x.contains(&s) != x.contains(&t)).map(|(_, w)| w).sum();
                prop_assert_eq!(sep, dist.get(a, b));
            }
            for (e, l) in reduced_lengths(&inst, &packing.cuts).into_iter().enumerate() {
                prop_assert!(l >= 0, "edge {} overloaded", e);
            }
        }
    }
}
