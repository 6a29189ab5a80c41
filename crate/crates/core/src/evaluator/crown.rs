//! Named edges of the crown of `H_n`, addressed by the pair of hexagons they
//! separate. Right-side coordinates are given; the left side is the mirror.

use std::collections::HashMap;
use std::sync::Arc;

use dashmap::DashMap;
use once_cell::sync::Lazy;

use crate::lattice::{build_h, EdgeLabel, Hex, HoneycombNet, Smoothing};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn mirror(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub(crate) fn sign(self) -> i32 {
        match self {
            Side::Left => -1,
            Side::Right => 1,
        }
    }
}

pub(crate) type Pair = [Hex; 2];

fn pair(side: Side, a: (i32, i32), b: (i32, i32)) -> Pair {
    let (mut p, mut q) = (Hex::new(a.0, a.1), Hex::new(b.0, b.1));
    if side == Side::Left {
        p = p.mirror();
        q = q.mirror();
    }
    if p <= q {
        [p, q]
    } else {
        [q, p]
    }
}

/// Crown of `H_n`, `n >= 2`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Crown {
    pub n: i32,
}

impl Crown {
    pub fn new(n: usize) -> Self {
        Crown { n: n as i32 }
    }

    /// Arc over the top of the apex hexagon.
    pub fn top_arc(&self) -> Pair {
        let n = self.n;
        pair(Side::Right, (n - 1, n - 1), (n, n - 1))
    }

    /// Edge between the apex hexagon and the top hexagon of one side.
    pub fn top_side(&self, s: Side) -> Pair {
        let n = self.n;
        pair(s, (n - 1, n - 1), (n - 1, n - 2))
    }

    /// The vertical edge under the apex, shared by the two top side hexagons.
    pub fn center(&self) -> Pair {
        let n = self.n;
        pair(Side::Right, (n - 1, n - 2), (n - 2, n - 1))
    }

    /// Outer boundary of side hexagon `k`.
    pub fn outer(&self, s: Side, k: i32) -> Pair {
        pair(s, (self.n - 1, k), (self.n, k))
    }

    /// Edge between side hexagons `k` and `k + 1`.
    pub fn spoke(&self, s: Side, k: i32) -> Pair {
        pair(s, (self.n - 1, k), (self.n - 1, k + 1))
    }

    /// Upper edge between side hexagon `k` and the bulk.
    pub fn riser(&self, s: Side, k: i32) -> Pair {
        pair(s, (self.n - 1, k), (self.n - 2, k + 1))
    }

    /// Lower edge between side hexagon `k` and the bulk.
    pub fn gate(&self, s: Side, k: i32) -> Pair {
        pair(s, (self.n - 1, k), (self.n - 2, k))
    }

    /// Bulk edge between hexagons `k` and `k + 1` of the row under the crown.
    pub fn inner(&self, s: Side, k: i32) -> Pair {
        pair(s, (self.n - 2, k), (self.n - 2, k + 1))
    }

    /// Boundary edge of the bulk just below the crown on one side.
    pub fn foot(&self, s: Side) -> Pair {
        pair(s, (self.n - 1, -1), (self.n - 2, 0))
    }
}

/// `H_n` with lookup tables from hex pairs to edges and chain labels.
pub(crate) struct Layout {
    pub net: HoneycombNet,
    pub index: HashMap<Pair, usize>,
    pub smoothing: Smoothing,
}

impl Layout {
    pub fn edge(&self, p: Pair) -> usize {
        self.index[&p]
    }

    pub fn label(&self, p: Pair) -> EdgeLabel {
        self.smoothing.chains[self.smoothing.chain_of_edge[self.edge(p)]].label
    }
}

static LAYOUTS: Lazy<DashMap<usize, Arc<Layout>>> = Lazy::new(DashMap::new);

pub(crate) fn layout(n: usize) -> Arc<Layout> {
    LAYOUTS
        .entry(n)
        .or_insert_with(|| {
            let net = build_h(n).expect("n >= 1");
            let index = net.edge_by_hexes();
            let smoothing = net.smoothing();
            Arc::new(Layout {
                net,
                index,
                smoothing,
            })
        })
        .clone()
}
