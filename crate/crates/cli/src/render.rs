//! Drawings of trace frames as Graphviz DOT or standalone SVG.
//!
//! Vertices are placed by a barycentric (Tutte) layout with the longest face
//! on a circle. Holes are shaded, necklace edges off the hole boundaries are
//! drawn green, and every applied cut is drawn as a dual curve through the
//! midpoints of the edges it crosses.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use holepack::finalize::TraceFrame;
use holepack::geodesics::all_distances;
use holepack::metricspace::VertexSet;
use holepack::reduce::build_necklace;
use holepack::{Instance, Parallelism, PlanarGraph};

use crate::files::FileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Dot,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Dot => "dot",
            Format::Svg => "svg",
        }
    }
}

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const CUT_COLORS: [&str; 6] = ["#d62728", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// Vertex positions in canvas coordinates, by vertex index.
pub fn layout(g: &PlanarGraph) -> Vec<(f64, f64)> {
    let n = g.vertex_count();
    let mut pos = vec![(0.0, 0.0); n];
    let mut fixed = vec![false; n];
    if let Some(outer) = (0..g.face_count()).max_by_key(|&f| (g.face_darts(f).len(), std::cmp::Reverse(f))) {
        let mut ring = Vec::new();
        for &d in g.face_darts(outer) {
            let v = g.tail(d);
            if !ring.contains(&v) {
                ring.push(v);
            }
        }
        let m = ring.len() as f64;
        for (k, &v) in ring.iter().enumerate() {
            let a = std::f64::consts::TAU * k as f64 / m;
            pos[v] = (a.cos(), a.sin());
            fixed[v] = true;
        }
    }
    for _ in 0..400 {
        for v in 0..n {
            if fixed[v] || g.degree(v) == 0 {
                continue;
            }
            let (mut sx, mut sy) = (0.0, 0.0);
            for &d in g.rotation(v) {
                let (x, y) = pos[g.head(d)];
                sx += x;
                sy += y;
            }
            let k = g.degree(v) as f64;
            pos[v] = (sx / k, sy / k);
        }
    }
    let scale = (SIZE - 2.0 * MARGIN) / 2.0;
    pos.iter().map(|&(x, y)| (SIZE / 2.0 + x * scale, SIZE / 2.0 - y * scale)).collect()
}

/// Everything needed to draw one frame.
struct Scene {
    inst: Instance,
    pos: Vec<(f64, f64)>,
    hole_edges: BTreeSet<usize>,
    necklace_edges: BTreeSet<usize>,
    /// For every cut, the crossed edges grouped by face.
    cuts: Vec<Vec<Vec<usize>>>,
}

impl Scene {
    fn new(frame: &TraceFrame) -> Result<Scene, FileError> {
        let lengths: BTreeMap<_, _> = frame.snapshot.lengths.iter().copied().collect();
        let inst = Instance::from_spec(&frame.snapshot.spec, &lengths)?;
        let g = &inst.graph;
        let pos = layout(g);
        let hole_edges: BTreeSet<usize> = g.holes().iter().flat_map(|&h| g.face_darts(h).iter().map(|&d| d >> 1)).collect();
        let dist = all_distances(&inst, Parallelism::Sequential);
        let mut necklace_edges = BTreeSet::new();
        for &h in g.holes() {
            if let Ok(n) = build_necklace(&inst, &dist, h) {
                necklace_edges.extend(n.darts.iter().map(|&d| d >> 1).filter(|e| !hole_edges.contains(e)));
            }
        }
        let cuts = frame.cuts.iter().map(|x| crossings_by_face(g, x)).collect();
        Ok(Scene { inst, pos, hole_edges, necklace_edges, cuts })
    }

    fn mid(&self, e: usize) -> (f64, f64) {
        let [u, v] = self.inst.graph.ends(e);
        ((self.pos[u].0 + self.pos[v].0) / 2.0, (self.pos[u].1 + self.pos[v].1) / 2.0)
    }
}

fn crossings_by_face(g: &PlanarGraph, x: &VertexSet) -> Vec<Vec<usize>> {
    (0..g.face_count())
        .map(|f| {
            g.face_darts(f)
                .iter()
                .map(|&d| d >> 1)
                .filter(|&e| {
                    let [u, v] = g.ends(e);
                    x.contains(&g.vertex_id(u)) != x.contains(&g.vertex_id(v))
                })
                .collect::<Vec<_>>()
        })
        .filter(|c| !c.is_empty())
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn frame_to_dot(frame: &TraceFrame) -> Result<String, FileError> {
    let sc = Scene::new(frame)?;
    let g = &sc.inst.graph;
    let crossed: BTreeMap<usize, usize> = sc
        .cuts
        .iter()
        .enumerate()
        .flat_map(|(i, faces)| faces.iter().flatten().map(move |&e| (e, i)))
        .collect();
    let mut out = String::new();
    writeln!(out, "graph \"{}\" {{", frame.label.replace('"', "'")).unwrap();
    writeln!(out, "  label=\"{}\";", frame.label.replace('"', "'")).unwrap();
    writeln!(out, "  layout=neato;").unwrap();
    writeln!(out, "  node [shape=circle, fontsize=10, width=0.3, fixedsize=true];").unwrap();
    for &h in g.holes() {
        let vs: Vec<String> = g.face_vertices(h).iter().map(|&v| g.vertex_id(v).to_string()).collect();
        writeln!(out, "  // hole {}", vs.join(" ")).unwrap();
    }
    for v in 0..g.vertex_count() {
        let (x, y) = sc.pos[v];
        writeln!(out, "  v{} [label=\"{}\", pos=\"{:.1},{:.1}!\"];", g.vertex_id(v), g.vertex_id(v), x, SIZE - y).unwrap();
    }
    for e in 0..g.edge_count() {
        let [u, v] = g.ends(e);
        let mut attrs = vec![format!("label=\"{}\"", sc.inst.lengths[e])];
        if sc.hole_edges.contains(&e) {
            attrs.push("color=\"#1f4e9c\"".into());
            attrs.push("penwidth=2.5".into());
        } else if sc.necklace_edges.contains(&e) {
            attrs.push("color=\"#2ca02c\"".into());
            attrs.push("penwidth=2".into());
        }
        if let Some(&i) = crossed.get(&e) {
            attrs.push(format!("fontcolor=\"{}\"", CUT_COLORS[i % CUT_COLORS.len()]));
            attrs.push("style=dashed".into());
        }
        writeln!(out, "  v{} -- v{} [{}];", g.vertex_id(u), g.vertex_id(v), attrs.join(", ")).unwrap();
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}

pub fn frame_to_svg(frame: &TraceFrame) -> Result<String, FileError> {
    let sc = Scene::new(frame)?;
    let g = &sc.inst.graph;
    let mut out = String::new();
    writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{}\" viewBox=\"0 0 {SIZE} {}\">", SIZE + 30.0, SIZE + 30.0).unwrap();
    writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    writeln!(out, "<text x=\"10\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\">{}</text>", SIZE + 20.0, escape(&frame.label)).unwrap();
    let outer = (0..g.face_count()).max_by_key(|&f| (g.face_darts(f).len(), std::cmp::Reverse(f)));
    for &h in g.holes() {
        if Some(h) == outer {
            continue;
        }
        let pts: Vec<String> = g.face_darts(h).iter().map(|&d| sc.pos[g.tail(d)]).map(|(x, y)| format!("{x:.1},{y:.1}")).collect();
        writeln!(out, "<polygon points=\"{}\" fill=\"#c9d6ea\" stroke=\"none\"/>", pts.join(" ")).unwrap();
    }
    for e in 0..g.edge_count() {
        let [u, v] = g.ends(e);
        let ((x1, y1), (x2, y2)) = (sc.pos[u], sc.pos[v]);
        let (color, width) = if sc.hole_edges.contains(&e) {
            ("#1f4e9c", 2.5)
        } else if sc.necklace_edges.contains(&e) {
            ("#2ca02c", 2.0)
        } else {
            ("#888888", 1.0)
        };
        writeln!(out, "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{color}\" stroke-width=\"{width}\"/>").unwrap();
        let (mx, my) = sc.mid(e);
        writeln!(out, "<text x=\"{mx:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#555\">{}</text>", my - 3.0, sc.inst.lengths[e]).unwrap();
    }
    for (i, faces) in sc.cuts.iter().enumerate() {
        let color = CUT_COLORS[i % CUT_COLORS.len()];
        for edges in faces {
            if let [a, b] = edges[..] {
                let ((x1, y1), (x2, y2)) = (sc.mid(a), sc.mid(b));
                writeln!(out, "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{color}\" stroke-width=\"2\" stroke-dasharray=\"5,3\"/>").unwrap();
            } else {
                for &e in edges {
                    let (x, y) = sc.mid(e);
                    writeln!(out, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"3\" fill=\"{color}\"/>").unwrap();
                }
            }
        }
    }
    for v in 0..g.vertex_count() {
        let (x, y) = sc.pos[v];
        writeln!(out, "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"7\" fill=\"white\" stroke=\"black\"/>").unwrap();
        writeln!(out, "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"8\" text-anchor=\"middle\">{}</text>", y + 3.0, g.vertex_id(v)).unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

fn slug(label: &str) -> String {
    let s: String = label.chars().map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' }).collect();
    s.trim_matches('_').to_string()
}

/// Write one drawing per frame into `dir`; returns the written paths.
pub fn render_frames(frames: &[TraceFrame], format: Format, dir: &Path) -> Result<Vec<PathBuf>, FileError> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let body = match format {
            Format::Dot => frame_to_dot(f)?,
            Format::Svg => frame_to_svg(f)?,
        };
        let path = dir.join(format!("frame_{i:03}_{}.{}", slug(&f.label), format.ext()));
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
