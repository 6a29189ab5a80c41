//! Honeycomb networks: construction, labeling, smoothing, composition and
//! the pixel importer.

mod build;
mod canonical;
pub mod geometry;
mod pixels;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recoupling::{is_admissible, SpinColor};
use crate::scalar::QParam;
use crate::tl_oracle::PlanarNet;

pub use build::{build_bo, build_h, build_hh, build_o, compose, compose_colored, Composed};
pub use canonical::CanonicalForm;
pub use geometry::{Corner, EdgeLabel, Hex, Letter, RawEdge};
pub use pixels::{pixels_to_coloring, PixelGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "n")]
pub enum NetKind {
    H(usize),
    O(usize),
    HH(usize),
    BO(usize),
    Composite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Left,
    Center,
    Right,
}

impl Branch {
    fn of_position(pos: i32) -> Self {
        match pos.signum() {
            -1 => Branch::Left,
            0 => Branch::Center,
            _ => Branch::Right,
        }
    }
}

/// One end of an edge: `end` 0 is `edge.ends[0]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub corner: Option<Corner>,
    pub level: i32,
    pub position: i32,
    pub x: f64,
    pub y: f64,
    /// Incident darts in counterclockwise order.
    pub rotation: Vec<Dart>,
}

impl Vertex {
    pub fn valence(&self) -> usize {
        self.rotation.len()
    }

    pub fn edge_ids(&self) -> Vec<usize> {
        self.rotation.iter().map(|d| d.edge).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    /// `None` marks a free end.
    pub ends: [Option<usize>; 2],
    pub label: EdgeLabel,
    /// The pair of hexes the edge separates, when it is a single lattice edge.
    pub hexes: Option<[Hex; 2]>,
    /// Labels of the lattice edges merged into this one, in path order.
    pub parts: Vec<EdgeLabel>,
    /// Unit direction in which the edge leaves each end.
    pub dirs: [[f64; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenEnd {
    pub edge: usize,
    /// Which end of the edge is free.
    pub end: usize,
    pub branch: Branch,
    /// Corner of the network this end is meant to be glued to.
    pub target: Option<Corner>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoneycombNet {
    pub kind: NetKind,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub open_ends: Vec<OpenEnd>,
}

/// A maximal path of edges joined through binary vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub edges: Vec<usize>,
    /// End vertices (`None` for a free end); `None` altogether for a closed loop.
    pub ends: Option<[Option<usize>; 2]>,
    pub label: EdgeLabel,
}

/// Chains of a network together with the edge-to-chain map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smoothing {
    pub chains: Vec<Chain>,
    pub chain_of_edge: Vec<usize>,
}

impl Smoothing {
    pub fn chain_by_label(&self) -> HashMap<EdgeLabel, usize> {
        self.chains
            .iter()
            .enumerate()
            .map(|(k, c)| (c.label, k))
            .collect()
    }
}

/// Colors indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub colors: Vec<SpinColor>,
}

impl EdgeColoring {
    pub fn new(colors: Vec<SpinColor>) -> Self {
        EdgeColoring { colors }
    }

    pub fn uniform(net: &HoneycombNet, c: SpinColor) -> Self {
        EdgeColoring {
            colors: vec![c; net.edges.len()],
        }
    }

    pub fn get(&self, e: usize) -> SpinColor {
        self.colors[e]
    }

    pub fn max_color(&self) -> SpinColor {
        self.colors.iter().copied().max().unwrap_or(0)
    }
}

/// Where a coloring fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Defect {
    BinaryMismatch { vertex: usize },
    NotAdmissible { vertex: usize },
}

impl HoneycombNet {
    pub fn is_closed(&self) -> bool {
        self.open_ends.is_empty()
    }

    pub fn vertex_by_corner(&self) -> HashMap<Corner, usize> {
        self.vertices
            .iter()
            .filter_map(|v| v.corner.map(|c| (c, v.id)))
            .collect()
    }

    pub fn edge_by_hexes(&self) -> HashMap<[Hex; 2], usize> {
        self.edges
            .iter()
            .filter_map(|e| e.hexes.map(|h| (h, e.id)))
            .collect()
    }

    pub fn edge_by_label(&self) -> HashMap<EdgeLabel, usize> {
        self.edges.iter().map(|e| (e.label, e.id)).collect()
    }

    pub fn count_valence(&self, k: usize) -> usize {
        self.vertices.iter().filter(|v| v.valence() == k).count()
    }

    /// Hexagonal faces of a patch.
    pub fn hexagons(&self) -> Vec<Hex> {
        let n = match self.kind {
            NetKind::H(n) => n as i32,
            NetKind::HH(n) => n as i32 - 1,
            _ => return Vec::new(),
        };
        (0..n)
            .flat_map(|j| (0..n).map(move |i| Hex::new(i, j)))
            .collect()
    }

    /// Vertices on the upper boundary where the next crown is glued, in
    /// `(level, position)` order.
    pub fn top_attach_vertices(&self) -> Result<Vec<usize>> {
        let n = match self.kind {
            NetKind::H(n) => n as i32,
            NetKind::HH(n) if n >= 2 => n as i32 - 1,
            _ => {
                return Err(Error::Malformed(
                    "top attachment vertices exist only for H and HH".into(),
                ))
            }
        };
        let lookup = self.vertex_by_corner();
        let mut ids = build::attach_corners(n)
            .iter()
            .map(|c| {
                lookup
                    .get(c)
                    .copied()
                    .ok_or_else(|| Error::Malformed(format!("missing corner {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ids.sort_by_key(|&v| (self.vertices[v].level, self.vertices[v].position));
        Ok(ids)
    }

    /// Check binary equality, vertex admissibility and the level bound.
    pub fn check_coloring(
        &self,
        coloring: &EdgeColoring,
        p: QParam,
    ) -> std::result::Result<(), Defect> {
        for v in &self.vertices {
            let c: Vec<SpinColor> = v.rotation.iter().map(|d| coloring.get(d.edge)).collect();
            match c.len() {
                2 if c[0] != c[1] => return Err(Defect::BinaryMismatch { vertex: v.id }),
                3 if !is_admissible(c[0], c[1], c[2], p) => {
                    return Err(Defect::NotAdmissible { vertex: v.id })
                }
                _ => {}
            }
            if let Some(max) = p.max_color() {
                if c.iter().any(|&x| x > max) {
                    return Err(Defect::NotAdmissible { vertex: v.id });
                }
            }
        }
        Ok(())
    }

    pub fn validate_coloring(&self, coloring: &EdgeColoring) -> Result<()> {
        if coloring.colors.len() != self.edges.len() {
            return Err(Error::Coloring(format!(
                "{} colors for {} edges",
                coloring.colors.len(),
                self.edges.len()
            )));
        }
        Ok(())
    }

    /// Rotation system of a closed network, for the oracle.
    pub fn to_planar(&self) -> Result<PlanarNet> {
        if !self.is_closed() {
            return Err(Error::OpenNetwork(self.open_ends.len()));
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            match e.ends {
                [Some(u), Some(v)] => edges.push([u, v]),
                _ => return Err(Error::OpenNetwork(1)),
            }
        }
        let rotation = self
            .vertices
            .iter()
            .map(|v| v.rotation.iter().map(|d| (d.edge, d.end)).collect())
            .collect();
        let net = PlanarNet { edges, rotation };
        net.validate()?;
        Ok(net)
    }

    /// Merge edges through binary vertices into chains. Each chain is
    /// labeled by [`merge_label`].
    pub fn smoothing(&self) -> Smoothing {
        let (smooth, members, vmap) = build::smooth(self, |_| false);
        let mut chain_of_edge = vec![usize::MAX; self.edges.len()];
        let mut chains = Vec::with_capacity(smooth.edges.len());
        for (k, e) in smooth.edges.iter().enumerate() {
            for &m in &members[k] {
                chain_of_edge[m] = k;
            }
            let loop_through_binary =
                matches!(e.ends, [Some(u), Some(v)] if u == v && smooth.vertices[u].valence() == 2);
            let ends = if loop_through_binary {
                None
            } else {
                Some(e.ends.map(|x| x.map(|v| vmap[v])))
            };
            chains.push(Chain {
                edges: members[k].clone(),
                ends,
                label: e.label,
            });
        }
        Smoothing {
            chains,
            chain_of_edge,
        }
    }

    /// The network with every binary vertex smoothed away.
    pub fn smoothed(&self) -> HoneycombNet {
        build::smooth(self, |_| false).0
    }

    /// Stable JSON dump.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canonical::canonical_form(self)
    }

    /// One color per chain label.
    pub fn chain_colors(
        &self,
        smoothing: &Smoothing,
        coloring: &EdgeColoring,
    ) -> BTreeMap<EdgeLabel, SpinColor> {
        smoothing
            .chains
            .iter()
            .map(|c| (c.label, coloring.get(c.edges[0])))
            .collect()
    }
}

fn side_rank(letter: Letter, right: bool) -> u8 {
    match (letter, right) {
        (Letter::D, true) | (Letter::C, false) => 0,
        (Letter::C, true) | (Letter::D, false) => 1,
        (Letter::E, _) => 2,
        (Letter::A, _) | (Letter::B, _) => 3,
        (Letter::P, _) => 4,
        (Letter::I, _) => 5,
    }
}

/// Label of a chain from the labels of its lattice edges: on the right the
/// smallest under d<c<e, on the left the smallest under c<d<e, ties broken
/// by lower level then by distance from the center line. Chains that touch
/// both sides take the largest label.
pub fn merge_label(labels: &[EdgeLabel]) -> EdgeLabel {
    let right = labels.iter().all(|l| l.position >= 0) && labels.iter().any(|l| l.position > 0);
    let left = labels.iter().all(|l| l.position <= 0) && labels.iter().any(|l| l.position < 0);
    if right || left {
        *labels
            .iter()
            .min_by_key(|l| (side_rank(l.letter, right), l.level, l.position.abs()))
            .expect("chains are nonempty")
    } else {
        *labels
            .iter()
            .max_by_key(|l| (l.letter, -l.level, -l.position.abs(), l.position))
            .expect("chains are nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_rule_is_mirror_equivariant() {
        let right = [
            EdgeLabel::new(Letter::E, 2, 1),
            EdgeLabel::new(Letter::C, 2, 2),
            EdgeLabel::new(Letter::D, 3, 1),
        ];
        let m = merge_label(&right);
        assert_eq!(m, EdgeLabel::new(Letter::D, 3, 1));
        let mirrored: Vec<EdgeLabel> = right.iter().map(|l| l.iota()).collect();
        assert_eq!(merge_label(&mirrored), m.iota());
    }
}
