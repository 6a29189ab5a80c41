//! Hexagon coordinates, corners and the edge-labeling scheme.
//!
//! Hexagon `(i, j)` sits in a vertical rhombus: `i` grows up-right, `j` grows
//! up-left, `(0,0)` is the bottom apex. Hexes are pointy-top, so every corner
//! is the meeting point of three hexes. `Up(a,b)` is the top corner of hex
//! `(a,b)`; `Down(a,b)` is the bottom corner of hex `(a+1,b+1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hex {
    pub i: i32,
    pub j: i32,
}

impl Hex {
    pub const fn new(i: i32, j: i32) -> Self {
        Hex { i, j }
    }

    /// Left-right reflection of the rhombus.
    pub fn mirror(self) -> Self {
        Hex {
            i: self.j,
            j: self.i,
        }
    }

    pub fn neighbors(self) -> [Hex; 6] {
        let Hex { i, j } = self;
        [
            Hex::new(i + 1, j),
            Hex::new(i - 1, j),
            Hex::new(i, j + 1),
            Hex::new(i, j - 1),
            Hex::new(i + 1, j - 1),
            Hex::new(i - 1, j + 1),
        ]
    }

    pub fn center(self) -> (f64, f64) {
        let s = 3f64.sqrt() / 2.0;
        (s * (self.i - self.j) as f64, 1.5 * (self.i + self.j) as f64)
    }

    pub fn in_patch(self, n: usize) -> bool {
        let n = n as i32;
        (0..n).contains(&self.i) && (0..n).contains(&self.j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Corner {
    Up(i32, i32),
    Down(i32, i32),
}

impl Corner {
    pub fn hexes(self) -> [Hex; 3] {
        match self {
            Corner::Up(a, b) => [Hex::new(a, b), Hex::new(a + 1, b), Hex::new(a, b + 1)],
            Corner::Down(a, b) => [
                Hex::new(a + 1, b),
                Hex::new(a, b + 1),
                Hex::new(a + 1, b + 1),
            ],
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            Corner::Up(a, b) => Corner::Up(b, a),
            Corner::Down(a, b) => Corner::Down(b, a),
        }
    }

    pub fn coord(self) -> (f64, f64) {
        match self {
            Corner::Up(a, b) => {
                let (x, y) = Hex::new(a, b).center();
                (x, y + 1.0)
            }
            Corner::Down(a, b) => {
                let (x, y) = Hex::new(a, b).center();
                (x, y + 2.0)
            }
        }
    }

    /// Integer `(level, position)`: twice the height and the horizontal offset
    /// in units of half a hex width.
    pub fn key(self) -> (i32, i32) {
        match self {
            Corner::Up(a, b) => (3 * (a + b) + 2, a - b),
            Corner::Down(a, b) => (3 * (a + b) + 4, a - b),
        }
    }

    /// Number of the three surrounding hexes that lie in the side-`n` patch.
    pub fn patch_hexes(self, n: usize) -> usize {
        self.hexes().iter().filter(|h| h.in_patch(n)).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Letter {
    A,
    B,
    C,
    D,
    E,
    P,
    I,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
            Letter::D => 'd',
            Letter::E => 'e',
            Letter::P => 'p',
            Letter::I => 'i',
        }
    }

    fn mirror(self) -> Self {
        match self {
            Letter::A => Letter::B,
            Letter::B => Letter::A,
            Letter::C => Letter::D,
            Letter::D => Letter::C,
            other => other,
        }
    }
}

/// `letter_level^position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeLabel {
    pub letter: Letter,
    pub level: i32,
    pub position: i32,
}

impl EdgeLabel {
    pub const fn new(letter: Letter, level: i32, position: i32) -> Self {
        EdgeLabel {
            letter,
            level,
            position,
        }
    }

    /// Swap c and d (and a and b), negate the position, keep the level.
    pub fn iota(self) -> Self {
        EdgeLabel {
            letter: self.letter.mirror(),
            level: self.level,
            position: -self.position,
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut chars = text.chars();
        let letter = match chars.next()? {
            'a' => Letter::A,
            'b' => Letter::B,
            'c' => Letter::C,
            'd' => Letter::D,
            'e' => Letter::E,
            'p' => Letter::P,
            'i' => Letter::I,
            _ => return None,
        };
        let rest = chars.as_str().strip_prefix('_')?;
        let (level, position) = rest.split_once('^')?;
        Some(EdgeLabel::new(
            letter,
            level.parse().ok()?,
            position.parse().ok()?,
        ))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}_{}^{}",
            self.letter.as_char(),
            self.level,
            self.position
        )
    }
}

/// Position index for the horizontal offset `x` at level `k`: odd levels are
/// centered on 0, even levels skip 0.
pub fn position_index(k: i32, x: i32) -> i32 {
    if k.rem_euclid(2) == 1 {
        x / 2
    } else {
        x.signum() * (x.abs() + 1) / 2
    }
}

/// The edge shared by two adjacent hexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RawEdge {
    /// Sorted pair of hexes.
    pub hexes: [Hex; 2],
    /// Lower corner first.
    pub ends: [Corner; 2],
    pub label: EdgeLabel,
}

impl RawEdge {
    pub fn between(p: Hex, q: Hex) -> Option<RawEdge> {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        let (di, dj) = (q.i - p.i, q.j - p.j);
        let (i, j) = (p.i, p.j);
        let (ends, label) = match (di, dj) {
            // up-right neighbor; edge rises to the left from Down(i, j-1)
            (1, 0) => {
                let (k, x) = (i + j, i - j + 1);
                (
                    [Corner::Down(i, j - 1), Corner::Up(i, j)],
                    EdgeLabel::new(Letter::D, k, position_index(k, x)),
                )
            }
            // up-left neighbor; edge rises to the right from Down(i-1, j)
            (0, 1) => {
                let (k, x) = (i + j, i - 1 - j);
                (
                    [Corner::Down(i - 1, j), Corner::Up(i, j)],
                    EdgeLabel::new(Letter::C, k, position_index(k, x)),
                )
            }
            // side by side; vertical edge, p is the left hex (i, j) = (a, b+1)
            (1, -1) => {
                let (a, b) = (i, j - 1);
                let (k, x) = (a + b + 1, a - b);
                (
                    [Corner::Up(a, b), Corner::Down(a, b)],
                    EdgeLabel::new(Letter::E, k, position_index(k, x)),
                )
            }
            _ => return None,
        };
        Some(RawEdge {
            hexes: [p, q],
            ends,
            label,
        })
    }

    pub fn mirror(&self) -> RawEdge {
        RawEdge::between(self.hexes[0].mirror(), self.hexes[1].mirror())
            .expect("mirror of an edge is an edge")
    }

    pub fn other_end(&self, c: Corner) -> Corner {
        if self.ends[0] == c {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn label(h1: (i32, i32), h2: (i32, i32)) -> String {
        RawEdge::between(Hex::new(h1.0, h1.1), Hex::new(h2.0, h2.1))
            .unwrap()
            .label
            .to_string()
    }

    #[test]
    fn single_hexagon_labels() {
        let h = (0, 0);
        assert_eq!(label(h, (1, 0)), "d_0^1");
        assert_eq!(label(h, (0, 1)), "c_0^-1");
        assert_eq!(label(h, (-1, 0)), "d_-1^0");
        assert_eq!(label(h, (0, -1)), "c_-1^0");
        assert_eq!(label(h, (1, -1)), "e_0^1");
        assert_eq!(label(h, (-1, 1)), "e_0^-1");
    }

    #[test]
    fn corners_share_their_hexes() {
        for p in [Hex::new(0, 0), Hex::new(2, 1)] {
            for q in p.neighbors() {
                let e = RawEdge::between(p, q).unwrap();
                for c in e.ends {
                    assert!(c.hexes().contains(&p) && c.hexes().contains(&q));
                }
                let (x0, y0) = e.ends[0].coord();
                let (x1, y1) = e.ends[1].coord();
                assert!(
                    ((x1 - x0).powi(2) + (y1 - y0).powi(2) - 1.0).abs() < 1e-9,
                    "unit edge length"
                );
                assert!(y1 > y0, "lower corner first");
            }
        }
    }

    #[test]
    fn mirror_is_iota_on_labels() {
        for p in [Hex::new(0, 0), Hex::new(3, 1), Hex::new(-1, 2)] {
            for q in p.neighbors() {
                let e = RawEdge::between(p, q).unwrap();
                assert_eq!(e.mirror().label, e.label.iota());
            }
        }
    }

    #[test]
    fn label_text_round_trips() {
        let l = EdgeLabel::new(Letter::I, 4, -2);
        assert_eq!(EdgeLabel::parse(&l.to_string()), Some(l));
        assert_eq!(l.iota().iota(), l);
    }

    #[test]
    fn position_parity_scheme() {
        assert_eq!(position_index(1, 0), 0);
        assert_eq!(position_index(1, -2), -1);
        assert_eq!(position_index(0, 1), 1);
        assert_eq!(position_index(0, -3), -2);
    }
}
