//! Instance and solution files, in a line-oriented text form and a JSON form.
//!
//! Instance text:
//!
//! ```text
//! holepack-instance 1
//! vertices 4
//! edge 0 0 1 2
//! rotation 0 0 3
//! hole 0 1 2 3
//! ```
//!
//! `vertices N` declares ids `0..N`; `vertex-ids a b c` lists them
//! explicitly. `edge id u v length`, one `rotation v e1 e2 ...` line per vertex
//! giving the clockwise order of incident edge ids, and one `hole` line per
//! hole boundary cycle. Lines starting with `#` are comments.
//!
//! Solution text:
//!
//! ```text
//! holepack-solution 1
//! cut 2 | 0 1 5
//! k23 1 | 0 | 3 | 1 2 | 4 | 5
//! ```

use std::collections::BTreeMap;

use holepack::metricspace::{CutMetric, Metric, TwoThreeMetric, VertexSet, WeightedPacking};
use holepack::planar::EdgeId;
use holepack::{Instance, PlanarError, RotationSpec, VertexId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const INSTANCE_TAG: &str = "holepack-instance";
pub const SOLUTION_TAG: &str = "holepack-solution";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Planar(#[from] PlanarError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> FileError {
    FileError::Parse { line, message: message.into() }
}

/// An instance as written in a file, before any graph checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub format: String,
    pub version: u32,
    pub vertices: Vec<VertexId>,
    /// `(id, u, v, length)`.
    pub edges: Vec<(EdgeId, VertexId, VertexId, i64)>,
    /// Clockwise edge ids around each vertex, aligned with `vertices`.
    pub rotation: Vec<Vec<EdgeId>>,
    pub holes: Vec<Vec<VertexId>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> InstanceFile {
        let spec = inst.graph.to_spec();
        let lengths = inst.length_by_id();
        let mut order: Vec<usize> = (0..spec.vertices.len()).collect();
        order.sort_by_key(|&i| spec.vertices[i]);
        let mut edges: Vec<_> = spec.edges.iter().map(|&(e, u, v)| (e, u, v, lengths[&e])).collect();
        edges.sort_unstable();
        InstanceFile {
            format: INSTANCE_TAG.into(),
            version: VERSION,
            vertices: order.iter().map(|&i| spec.vertices[i]).collect(),
            edges,
            rotation: order.iter().map(|&i| spec.rotation[i].clone()).collect(),
            holes: spec.holes,
        }
    }

    /// Build the instance, checking the embedding and cyclic evenness.
    pub fn to_instance(&self) -> Result<Instance, FileError> {
        let spec = RotationSpec {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|&(e, u, v, _)| (e, u, v)).collect(),
            rotation: self.rotation.clone(),
            holes: self.holes.clone(),
        };
        let lengths: BTreeMap<EdgeId, i64> = self.edges.iter().map(|&(e, _, _, l)| (e, l)).collect();
        let inst = Instance::from_spec(&spec, &lengths)?;
        inst.parity_potential()?;
        Ok(inst)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{INSTANCE_TAG} {VERSION}\n");
        let contiguous = self.vertices.iter().enumerate().all(|(i, &v)| v as usize == i);
        if contiguous {
            out += &format!("vertices {}\n", self.vertices.len());
        } else {
            out += &format!("vertex-ids {}\n", join(&self.vertices));
        }
        for &(e, u, v, l) in &self.edges {
            out += &format!("edge {e} {u} {v} {l}\n");
        }
        for (v, rot) in self.vertices.iter().zip(&self.rotation) {
            out += &format!("rotation {v} {}\n", join(rot));
        }
        for h in &self.holes {
            out += &format!("hole {}\n", join(h));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    pub fn parse_text(text: &str) -> Result<InstanceFile, FileError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
        check_header(ln, header, INSTANCE_TAG)?;
        let mut vertices: Option<Vec<VertexId>> = None;
        let mut edges = Vec::new();
        let mut rotation: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
        let mut holes = Vec::new();
        for (ln, line) in lines {
            let mut words = line.split_whitespace();
            let key = words.next().unwrap_or_default();
            let nums: Vec<i64> = words.map(|w| w.parse::<i64>().map_err(|_| parse_err(ln, format!("not an integer: {w}")))).collect::<Result<_, _>>()?;
            let id = |x: i64| -> Result<u32, FileError> { u32::try_from(x).map_err(|_| parse_err(ln, format!("bad id {x}"))) };
            match key {
                "vertices" => {
                    let [n] = nums[..] else { return Err(parse_err(ln, "expected `vertices N`")) };
                    set_once(&mut vertices, (0..id(n)?).collect(), ln)?;
                }
                "vertex-ids" => {
                    let ids = nums.iter().map(|&x| id(x)).collect::<Result<_, _>>()?;
                    set_once(&mut vertices, ids, ln)?;
                }
                "edge" => {
                    let [e, u, v, l] = nums[..] else { return Err(parse_err(ln, "expected `edge id u v length`")) };
                    if l < 0 {
                        return Err(parse_err(ln, format!("negative length {l}")));
                    }
                    edges.push((id(e)?, id(u)?, id(v)?, l));
                }
                "rotation" => {
                    let Some((&v, rest)) = nums.split_first() else { return Err(parse_err(ln, "expected `rotation v e...`")) };
                    let rot = rest.iter().map(|&x| id(x)).collect::<Result<_, _>>()?;
                    if rotation.insert(id(v)?, rot).is_some() {
                        return Err(parse_err(ln, format!("second rotation for vertex {v}")));
                    }
                }
                "hole" => holes.push(nums.iter().map(|&x| id(x)).collect::<Result<_, _>>()?),
                other => return Err(parse_err(ln, format!("unknown record `{other}`"))),
            }
        }
        let vertices = vertices.ok_or_else(|| parse_err(0, "missing `vertices` line"))?;
        let mut rot = Vec::with_capacity(vertices.len());
        for v in &vertices {
            rot.push(rotation.remove(v).ok_or_else(|| parse_err(0, format!("no rotation for vertex {v}")))?);
        }
        if let Some(v) = rotation.keys().next() {
            return Err(parse_err(0, format!("rotation for undeclared vertex {v}")));
        }
        Ok(InstanceFile { format: INSTANCE_TAG.into(), version: VERSION, vertices, edges, rotation: rot, holes })
    }

    /// Parse either form, telling them apart by a leading `{`.
    pub fn parse(text: &str) -> Result<InstanceFile, FileError> {
        if text.trim_start().starts_with('{') {
            let f: InstanceFile = serde_json::from_str(text)?;
            check_tag(&f.format, f.version, INSTANCE_TAG)?;
            Ok(f)
        } else {
            InstanceFile::parse_text(text)
        }
    }
}

/// Parse and build an instance in one go.
pub fn read_instance(text: &str) -> Result<Instance, FileError> {
    InstanceFile::parse(text)?.to_instance()
}

/// One metric of a solution file: a cut has one block, a (2,3)-metric has
/// five (`s0, s1, t0, t1, t2`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub kind: String,
    pub weight: i64,
    pub blocks: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub format: String,
    pub version: u32,
    pub metrics: Vec<MetricRecord>,
}

impl SolutionFile {
    pub fn from_packing(p: &WeightedPacking) -> SolutionFile {
        let metrics = p
            .items
            .iter()
            .map(|(m, w)| match m {
                Metric::Cut(c) => MetricRecord { kind: "cut".into(), weight: *w, blocks: vec![c.side.iter().copied().collect()] },
                Metric::TwoThree(t) => MetricRecord {
                    kind: "k23".into(),
                    weight: *w,
                    blocks: t.s.iter().chain(t.t.iter()).map(|b| b.iter().copied().collect()).collect(),
                },
            })
            .collect();
        SolutionFile { format: SOLUTION_TAG.into(), version: VERSION, metrics }
    }

    pub fn to_packing(&self) -> Result<WeightedPacking, FileError> {
        let mut p = WeightedPacking::default();
        for (i, r) in self.metrics.iter().enumerate() {
            let sets: Vec<VertexSet> = r.blocks.iter().map(|b| b.iter().copied().collect()).collect();
            let m = match (r.kind.as_str(), sets.len()) {
                ("cut", 1) => Metric::Cut(CutMetric::new(sets[0].clone())),
                ("k23", 5) => Metric::TwoThree(TwoThreeMetric {
                    s: [sets[0].clone(), sets[1].clone()],
                    t: [sets[2].clone(), sets[3].clone(), sets[4].clone()],
                }),
                (k, n) => return Err(parse_err(i + 2, format!("metric `{k}` with {n} blocks"))),
            };
            p.items.push((m, r.weight));
        }
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{SOLUTION_TAG} {VERSION}\n");
        for r in &self.metrics {
            out += &format!("{} {}", r.kind, r.weight);
            for b in &r.blocks {
                out += &format!(" | {}", join(b));
            }
            out += "\n";
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes") + "\n"
    }

    pub fn parse(text: &str) -> Result<SolutionFile, FileError> {
        if text.trim_start().starts_with('{') {
            let f: SolutionFile = serde_json::from_str(text)?;
            check_tag(&f.format, f.version, SOLUTION_TAG)?;
            return Ok(f);
        }
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
        check_header(ln, header, SOLUTION_TAG)?;
        let mut metrics = Vec::new();
        for (ln, line) in lines {
            let mut parts = line.split('|');
            let head: Vec<&str> = parts.next().unwrap_or_default().split_whitespace().collect();
            let [kind, weight] = head[..] else { return Err(parse_err(ln, "expected `kind weight | block ...`")) };
            let weight = weight.parse().map_err(|_| parse_err(ln, format!("bad weight {weight}")))?;
            let blocks = parts
                .map(|p| {
                    p.split_whitespace()
                        .map(|w| w.parse::<VertexId>().map_err(|_| parse_err(ln, format!("bad vertex id {w}"))))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            metrics.push(MetricRecord { kind: kind.to_string(), weight, blocks });
        }
        Ok(SolutionFile { format: SOLUTION_TAG.into(), version: VERSION, metrics })
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn check_header(ln: usize, header: &str, tag: &str) -> Result<(), FileError> {
    let words: Vec<&str> = header.split_whitespace().collect();
    match words[..] {
        [t, v] if t == tag => {
            let v: u32 = v.parse().map_err(|_| parse_err(ln, format!("bad version {v}")))?;
            check_tag(t, v, tag).map_err(|_| parse_err(ln, format!("unsupported version {v}")))
        }
        _ => Err(parse_err(ln, format!("expected header `{tag} {VERSION}`"))),
    }
}

fn check_tag(format: &str, version: u32, tag: &str) -> Result<(), FileError> {
    if format != tag || version != VERSION {
        return Err(parse_err(1, format!("expected format {tag} version {VERSION}, found {format} {version}")));
    }
    Ok(())
}

fn set_once<T>(slot: &mut Option<T>, value: T, ln: usize) -> Result<(), FileError> {
    if slot.replace(value).is_some() {
        return Err(parse_err(ln, "vertices declared twice"));
    }
    Ok(())
}
