//! Grayscale images as honeycomb colorings: each pixel is a hexagon and
//! every edge carries the sum of the pixel values on its two sides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::geometry::Hex;
use super::{build_h, EdgeColoring, HoneycombNet};
use crate::error::{Error, Result};

/// Square grid of intensities in `[0, max]`. Row `r`, column `c` is hexagon
/// `(c, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelGrid {
    pub n: usize,
    pub max: u32,
    pub values: Vec<Vec<u32>>,
}

impl PixelGrid {
    pub fn new(max: u32, values: Vec<Vec<u32>>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::Parse("empty pixel grid".into()));
        }
        if let Some(r) = values.iter().position(|row| row.len() != n) {
            return Err(Error::Parse(format!(
                "row {r} has {} values, expected {n}",
                values[r].len()
            )));
        }
        if let Some(v) = values.iter().flatten().find(|&&v| v > max) {
            return Err(Error::Parse(format!(
                "pixel value {v} exceeds the maximum {max}"
            )));
        }
        Ok(PixelGrid { n, max, values })
    }

    /// Text format: a line `n N`, then `n` rows of `n` integers.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let nums = |l: &str| -> Result<Vec<u32>> {
            l.split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
                })
                .collect()
        };
        let h = nums(header)?;
        if h.len() != 2 {
            return Err(Error::Parse("header must be `n N`".into()));
        }
        let (n, max) = (h[0] as usize, h[1]);
        let values = lines.take(n).map(nums).collect::<Result<Vec<_>>>()?;
        if values.len() != n {
            return Err(Error::Parse(format!(
                "expected {n} rows, found {}",
                values.len()
            )));
        }
        Self::new(max, values)
    }

    /// Binary 8-bit PGM (`P5`). The image must be square.
    pub fn parse_pgm(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut fields = Vec::new();
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(Error::Parse("truncated PGM header".into()));
            }
            fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
        }
        if fields[0] != "P5" {
            return Err(Error::Parse("only binary PGM (P5) is supported".into()));
        }
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad PGM field {s:?}")))
        };
        let (w, h, max) = (parse(&fields[1])?, parse(&fields[2])?, parse(&fields[3])?);
        if w != h {
            return Err(Error::Parse(format!(
                "image is {w}x{h}; a square image is required"
            )));
        }
        if max == 0 || max > 255 {
            return Err(Error::Parse(format!("maxval {max} is not an 8-bit value")));
        }
        let raster = bytes
            .get(pos + 1..pos + 1 + w * h)
            .ok_or_else(|| Error::Parse("truncated PGM raster".into()))?;
        let values = raster
            .chunks(w)
            .map(|row| row.iter().map(|&b| b as u32).collect())
            .collect();
        Self::new(max as u32, values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(b"P5") {
            Self::parse_pgm(&bytes)
        } else {
            let text = String::from_utf8(bytes)
                .map_err(|_| Error::Parse("pixel file is not UTF-8 text".into()))?;
            Self::parse_text(&text)
        }
    }

    pub fn value(&self, h: Hex) -> u32 {
        self.values[h.j as usize][h.i as usize]
    }
}

/// `H_n` colored from the grid: shared edges get `r_i + r_j`, boundary edges
/// the value of their one hexagon.
pub fn pixels_to_coloring(grid: &PixelGrid) -> (HoneycombNet, EdgeColoring) {
    let net = build_h(grid.n).expect("grids are nonempty");
    let colors = net
        .edges
        .iter()
        .map(|e| {
            let hexes = e.hexes.expect("H_n edges are lattice edges");
            hexes
                .iter()
                .filter(|h| h.in_patch(grid.n))
                .map(|&h| grid.value(h))
                .sum()
        })
        .collect();
    (net, EdgeColoring::new(colors))
}
