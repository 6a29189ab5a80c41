use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::geometry::{Corner, EdgeLabel, Hex, Letter, RawEdge};
use super::{
    merge_label, Branch, Dart, Edge, EdgeColoring, HoneycombNet, NetKind, OpenEnd, Vertex,
};
use crate::error::{Error, Result};
use crate::recoupling::is_admissible;
use crate::scalar::QParam;

fn unit(from: (f64, f64), to: (f64, f64)) -> [f64; 2] {
    let (dx, dy) = (to.0 - from.0, to.1 - from.1);
    let r = dx.hypot(dy);
    [dx / r, dy / r]
}

/// Corners of `H_n` where the crown `O_n` is glued.
pub(crate) fn attach_corners(n: i32) -> Vec<Corner> {
    let mut corners = vec![Corner::Up(n - 1, n - 1)];
    for j in -1..n - 1 {
        corners.push(Corner::Down(n - 1, j));
        corners.push(Corner::Down(j, n - 1));
    }
    corners
}

/// Recompute vertex ids and counterclockwise rotations from the edge list.
fn rebuild_rotations(net: &mut HoneycombNet) {
    let mut around: Vec<Vec<(f64, Dart)>> = vec![Vec::new(); net.vertices.len()];
    for e in &net.edges {
        for end in 0..2 {
            if let Some(v) = e.ends[end] {
                let [dx, dy] = e.dirs[end];
                around[v].push((dy.atan2(dx), Dart { edge: e.id, end }));
            }
        }
    }
    for (v, mut ds) in around.into_iter().enumerate() {
        ds.sort_by(|a, b| a.0.total_cmp(&b.0));
        net.vertices[v].id = v;
        net.vertices[v].rotation = ds.into_iter().map(|(_, d)| d).collect();
    }
}

/// The lattice edges of `faces` accepted by `include`. Corners for which
/// `open` holds are left as free ends.
fn raw_net(
    kind: NetKind,
    faces: &[Hex],
    include: impl Fn(&RawEdge) -> bool,
    open: impl Fn(Corner) -> bool,
) -> HoneycombNet {
    let mut raw = BTreeMap::new();
    for &h in faces {
        for q in h.neighbors() {
            let e = RawEdge::between(h, q).expect("neighbors share an edge");
            if include(&e) {
                raw.insert(e.hexes, e);
            }
        }
    }
    let mut raw: Vec<RawEdge> = raw.into_values().collect();
    raw.sort_by_key(|e| (e.label.level, e.label.position, e.label.letter));

    let corners: BTreeSet<(i32, i32, Corner)> = raw
        .iter()
        .flat_map(|e| e.ends)
        .filter(|&c| !open(c))
        .map(|c| (c.key().0, c.key().1, c))
        .collect();
    let mut index = HashMap::new();
    let vertices = corners
        .into_iter()
        .enumerate()
        .map(|(id, (level, position, c))| {
            index.insert(c, id);
            let (x, y) = c.coord();
            Vertex {
                id,
                corner: Some(c),
                level,
                position,
                x,
                y,
                rotation: Vec::new(),
            }
        })
        .collect();

    let mut open_ends = Vec::new();
    let edges = raw
        .iter()
        .enumerate()
        .map(|(id, r)| {
            let ends = r.ends.map(|c| index.get(&c).copied());
            for (end, c) in r.ends.iter().enumerate() {
                if ends[end].is_none() {
                    open_ends.push(OpenEnd {
                        edge: id,
                        end,
                        branch: Branch::of_position(c.key().1),
                        target: Some(*c),
                    });
                }
            }
            let (p, q) = (r.ends[0].coord(), r.ends[1].coord());
            Edge {
                id,
                ends,
                label: r.label,
                hexes: Some(r.hexes),
                parts: vec![r.label],
                dirs: [unit(p, q), unit(q, p)],
            }
        })
        .collect();
    open_ends.sort_by_key(|o| o.target.map(|c| c.key()));
    let mut net = HoneycombNet {
        kind,
        vertices,
        edges,
        open_ends,
    };
    rebuild_rotations(&mut net);
    net
}

/// Remove binary vertices for which `keep` is false, merging their two edges.
/// Returns the new network, the original edges making up each new edge, and
/// the original id of each surviving vertex.
pub(crate) fn smooth(
    net: &HoneycombNet,
    keep: impl Fn(&Vertex) -> bool,
) -> (HoneycombNet, Vec<Vec<usize>>, Vec<usize>) {
    let mut edges: Vec<Option<Edge>> = net.edges.iter().cloned().map(Some).collect();
    let mut members: Vec<Vec<usize>> = (0..net.edges.len()).map(|e| vec![e]).collect();
    let mut verts: Vec<Option<Vertex>> = net.vertices.iter().cloned().map(Some).collect();
    let mut open = net.open_ends.clone();

    for v in 0..verts.len() {
        let vert = verts[v].as_ref().expect("vertices are removed only here");
        if vert.valence() != 2 || keep(vert) {
            continue;
        }
        let (d1, d2) = (vert.rotation[0], vert.rotation[1]);
        if d1.edge == d2.edge {
            continue;
        }
        let e1 = edges[d1.edge].take().expect("live edge");
        let e2 = edges[d2.edge].take().expect("live edge");
        let (f1, f2) = (1 - d1.end, 1 - d2.end);
        let mut parts = e1.parts.clone();
        let mut m = std::mem::take(&mut members[d1.edge]);
        if f1 == 1 {
            parts.reverse();
            m.reverse();
        }
        let mut tail = e2.parts.clone();
        let mut mt = std::mem::take(&mut members[d2.edge]);
        if d2.end == 1 {
            tail.reverse();
            mt.reverse();
        }
        parts.extend(tail);
        m.extend(mt);
        members[d1.edge] = m;

        let id = d1.edge;
        let merged = Edge {
            id,
            ends: [e1.ends[f1], e2.ends[f2]],
            label: merge_label(&parts),
            hexes: None,
            parts,
            dirs: [e1.dirs[f1], e2.dirs[f2]],
        };
        let renames = [((d1.edge, f1), (id, 0)), ((d2.edge, f2), (id, 1))];
        for (old, new) in renames {
            let far = if old.0 == d1.edge {
                e1.ends[f1]
            } else {
                e2.ends[f2]
            };
            match far {
                Some(u) => {
                    let rot = &mut verts[u].as_mut().expect("live vertex").rotation;
                    let d = rot
                        .iter_mut()
                        .find(|d| (d.edge, d.end) == old)
                        .expect("dart present at far vertex");
                    *d = Dart {
                        edge: new.0,
                        end: new.1,
                    };
                }
                None => {
                    let o = open
                        .iter_mut()
                        .find(|o| (o.edge, o.end) == old)
                        .expect("free end registered");
                    o.edge = new.0;
                    o.end = new.1;
                }
            }
        }
        edges[id] = Some(merged);
        verts[v] = None;
    }

    let mut emap = vec![usize::MAX; edges.len()];
    let mut new_members = Vec::new();
    let mut kept_edges = Vec::new();
    for (old, e) in edges.into_iter().enumerate() {
        if let Some(e) = e {
            emap[old] = kept_edges.len();
            new_members.push(std::mem::take(&mut members[old]));
            kept_edges.push(e);
        }
    }
    let mut vmap = vec![usize::MAX; verts.len()];
    let mut origin = Vec::new();
    let mut kept_verts = Vec::new();
    for (old, v) in verts.into_iter().enumerate() {
        if let Some(v) = v {
            vmap[old] = kept_verts.len();
            origin.push(old);
            kept_verts.push(v);
        }
    }
    for (id, e) in kept_edges.iter_mut().enumerate() {
        e.id = id;
        e.ends = e.ends.map(|x| x.map(|v| vmap[v]));
    }
    for (id, v) in kept_verts.iter_mut().enumerate() {
        v.id = id;
        for d in &mut v.rotation {
            d.edge = emap[d.edge];
        }
    }
    for o in &mut open {
        o.edge = emap[o.edge];
    }
    let out = HoneycombNet {
        kind: net.kind,
        vertices: kept_verts,
        edges: kept_edges,
        open_ends: open,
    };
    (out, new_members, origin)
}

/// The side-`n` rhombic patch with every lattice edge kept.
pub fn build_h(n: usize) -> Result<HoneycombNet> {
    if n < 1 {
        return Err(Error::InvalidParam("H_n needs n >= 1".into()));
    }
    let faces: Vec<Hex> = (0..n as i32)
        .flat_map(|j| (0..n as i32).map(move |i| Hex::new(i, j)))
        .collect();
    Ok(raw_net(NetKind::H(n), &faces, |_| true, |_| false))
}

/// The crown glued on top of `H_n` to give `H_{n+1}`: the top hexagon kept
/// edge by edge and two lateral branches of `n` horizontal and `n - 1`
/// vertical edges, with free ends at the attachment corners of `H_n`.
pub fn build_o(n: usize) -> Result<HoneycombNet> {
    if n < 1 {
        return Err(Error::InvalidParam("O_n needs n >= 1".into()));
    }
    let m = n as i32;
    let bulk = |h: Hex| (0..m).contains(&h.i) && (0..m).contains(&h.j);
    let crown: Vec<Hex> = (0..=m)
        .flat_map(|k| [Hex::new(m, k), Hex::new(k, m)])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let raw = raw_net(
        NetKind::O(n),
        &crown,
        |e| !e.hexes.iter().any(|&h| bulk(h)),
        |c| c.hexes().iter().any(|&h| bulk(h)),
    );
    debug_assert!(raw.edges.iter().all(|e| e.ends.iter().any(|x| x.is_some())));
    let apex = Hex::new(m, m);
    Ok(smooth(&raw, |v| {
        v.corner.is_some_and(|c| c.hexes().contains(&apex))
    })
    .0)
}

/// `H_n` with its upper perimeter removed, which leaves the `H_{n-1}` patch
/// carrying the attachment corners; `HH_1` is the lone bottom edge.
pub fn build_hh(n: usize) -> Result<HoneycombNet> {
    match n {
        0 => Err(Error::InvalidParam("HH_n needs n >= 1".into())),
        1 => {
            let label = EdgeLabel::new(Letter::A, -1, 0);
            let edge = Edge {
                id: 0,
                ends: [None, None],
                label,
                hexes: None,
                parts: vec![label],
                dirs: [[1.0, 0.0], [-1.0, 0.0]],
            };
            let open_ends = (0..2)
                .map(|end| OpenEnd {
                    edge: 0,
                    end,
                    branch: Branch::Center,
                    target: None,
                })
                .collect();
            Ok(HoneycombNet {
                kind: NetKind::HH(1),
                vertices: Vec::new(),
                edges: vec![edge],
                open_ends,
            })
        }
        _ => {
            let mut net = build_h(n - 1)?;
            net.kind = NetKind::HH(n);
            Ok(net)
        }
    }
}

/// `O_n` with each trivalent vertex on a lateral branch opened into a
/// triangle of `p` edges.
pub fn build_bo(n: usize) -> Result<HoneycombNet> {
    let mut net = build_o(n)?;
    net.kind = NetKind::BO(n);
    let apex = Hex::new(n as i32, n as i32);
    let targets: Vec<usize> = net
        .vertices
        .iter()
        .filter(|v| v.valence() == 3 && v.corner.is_some_and(|c| !c.hexes().contains(&apex)))
        .map(|v| v.id)
        .collect();
    for &v in &targets {
        let vert = net.vertices[v].clone();
        let base = net.vertices.len();
        let pts: Vec<(f64, f64)> = vert
            .rotation
            .iter()
            .map(|d| {
                let [dx, dy] = net.edges[d.edge].dirs[d.end];
                (vert.x + 0.3 * dx, vert.y + 0.3 * dy)
            })
            .collect();
        for (i, d) in vert.rotation.iter().enumerate() {
            net.edges[d.edge].ends[d.end] = Some(base + i);
            net.vertices.push(Vertex {
                id: base + i,
                corner: None,
                level: vert.level,
                position: vert.position,
                x: pts[i].0,
                y: pts[i].1,
                rotation: Vec::new(),
            });
        }
        let sign = if vert.position < 0 { -1 } else { 1 };
        for i in 0..3 {
            let j = (i + 1) % 3;
            let label = EdgeLabel::new(
                Letter::P,
                vert.level,
                sign * (3 * vert.position.abs() + i as i32),
            );
            let id = net.edges.len();
            net.edges.push(Edge {
                id,
                ends: [Some(base + i), Some(base + j)],
                label,
                hexes: None,
                parts: vec![label],
                dirs: [unit(pts[i], pts[j]), unit(pts[j], pts[i])],
            });
        }
    }
    // drop the truncated vertices
    let mut vmap = vec![usize::MAX; net.vertices.len()];
    let mut kept = Vec::new();
    for v in std::mem::take(&mut net.vertices) {
        if !targets.contains(&v.id) {
            vmap[v.id] = kept.len();
            kept.push(v);
        }
    }
    net.vertices = kept;
    for e in &mut net.edges {
        e.ends = e.ends.map(|x| x.map(|v| vmap[v]));
    }
    rebuild_rotations(&mut net);
    Ok(net)
}

/// Glue the `k`-th free end of `attach` to vertex `at[k]` of `base`.
pub fn compose(base: &HoneycombNet, attach: &HoneycombNet, at: &[usize]) -> Result<HoneycombNet> {
    if attach.open_ends.len() != at.len() {
        return Err(Error::Arity {
            open: attach.open_ends.len(),
            targets: at.len(),
        });
    }
    let distinct: BTreeSet<usize> = at.iter().copied().collect();
    if distinct.len() != at.len() || at.iter().any(|&v| v >= base.vertices.len()) {
        return Err(Error::Malformed(
            "attachment vertices must be distinct vertices of the base".into(),
        ));
    }
    let (nv, ne) = (base.vertices.len(), base.edges.len());
    let mut net = base.clone();
    net.kind = NetKind::Composite;
    net.vertices.extend(attach.vertices.iter().cloned());
    net.edges.extend(attach.edges.iter().map(|e| {
        let mut e = e.clone();
        e.id += ne;
        e.ends = e.ends.map(|x| x.map(|v| v + nv));
        e
    }));
    for (o, &v) in attach.open_ends.iter().zip(at) {
        net.edges[o.edge + ne].ends[o.end] = Some(v);
    }
    rebuild_rotations(&mut net);
    if let Some(v) = net.vertices.iter().find(|v| v.valence() > 3) {
        return Err(Error::Malformed(format!(
            "vertex {} would have valence {}",
            v.id,
            v.valence()
        )));
    }
    Ok(net)
}

/// A composed network with its coloring; `zero` marks a join whose colors
/// are not admissible, which makes the whole network evaluate to zero.
#[derive(Debug, Clone)]
pub struct Composed {
    pub net: HoneycombNet,
    pub coloring: EdgeColoring,
    pub zero: bool,
}

pub fn compose_colored(
    base: &HoneycombNet,
    base_colors: &EdgeColoring,
    attach: &HoneycombNet,
    attach_colors: &EdgeColoring,
    at: &[usize],
    p: QParam,
) -> Result<Composed> {
    base.validate_coloring(base_colors)?;
    attach.validate_coloring(attach_colors)?;
    let net = compose(base, attach, at)?;
    let mut colors = base_colors.colors.clone();
    colors.extend(&attach_colors.colors);
    let coloring = EdgeColoring::new(colors);
    let zero = at.iter().any(|&v| {
        let c: Vec<u32> = net.vertices[v]
            .rotation
            .iter()
            .map(|d| coloring.get(d.edge))
            .collect();
        match c.len() {
            3 => !is_admissible(c[0], c[1], c[2], p),
            2 => c[0] != c[1],
            _ => false,
        }
    });
    Ok(Composed {
        net,
        coloring,
        zero,
    })
}
