use std::fmt::Write as _;

use super::{check_range, sorted_unique};
use crate::{Error, Result};

/// Total coloring of the pairs `{x < y}` below a horizon with `palette`
/// colors.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteColoring2 {
    horizon: usize,
    palette: u32,
    colors: Vec<u32>,
}

impl std::fmt::Debug for FiniteColoring2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteColoring2")
            .field("horizon", &self.horizon)
            .field("palette", &self.palette)
            .finish()
    }
}

/// Outcome of a homogeneity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Homogeneity {
    /// Fewer than two elements: homogeneous for every color.
    Vacuous,
    Color(u32),
    Mixed,
}

#[inline]
fn pair_index(x: usize, y: usize) -> usize {
    let (x, y) = if x < y { (x, y) } else { (y, x) };
    y * (y - 1) / 2 + x
}

impl FiniteColoring2 {
    /// Builds from `color(x, y)` for `x < y`; fails on a color outside the
    /// palette.
    pub fn from_fn(
        horizon: usize,
        palette: u32,
        mut color: impl FnMut(usize, usize) -> u32,
    ) -> Result<Self> {
        let mut colors = Vec::with_capacity(horizon * horizon.saturating_sub(1) / 2);
        for y in 0..horizon {
            for x in 0..y {
                let c = color(x, y);
                if c >= palette {
                    return Err(Error::ColorOutOfPalette {
                        x,
                        y,
                        color: c,
                        palette,
                    });
                }
                colors.push(c);
            }
        }
        Ok(FiniteColoring2 {
            horizon,
            palette,
            colors,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn palette(&self) -> u32 {
        self.palette
    }

    /// Color of the pair `{x, y}`; argument order is irrelevant.
    #[inline]
    pub fn color(&self, x: usize, y: usize) -> u32 {
        debug_assert!(x != y && x < self.horizon && y < self.horizon);
        self.colors[pair_index(x, y)]
    }

    fn pair_colors(&self, a: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.palette as usize];
        for (i, &x) in a.iter().enumerate() {
            for &y in &a[i + 1..] {
                seen[self.color(x, y) as usize] = true;
            }
        }
        seen
    }

    /// Least color absent from `f([A]^2)`, if any.
    pub fn is_thin(&self, a: &[usize]) -> Result<Option<u32>> {
        check_range(a, self.horizon)?;
        let a = sorted_unique(a);
        Ok(self
            .pair_colors(&a)
            .iter()
            .position(|&s| !s)
            .map(|c| c as u32))
    }

    pub fn is_homogeneous(&self, a: &[usize]) -> Result<Homogeneity> {
        check_range(a, self.horizon)?;
        let a = sorted_unique(a);
        if a.len() < 2 {
            return Ok(Homogeneity::Vacuous);
        }
        let c = self.color(a[0], a[1]);
        for (i, &x) in a.iter().enumerate() {
            for &y in &a[i + 1..] {
                if self.color(x, y) != c {
                    return Ok(Homogeneity::Mixed);
                }
            }
        }
        Ok(Homogeneity::Color(c))
    }

    /// Canonical text: `coloring H k` then `x y color` per pair, `y` major.
    pub fn to_text(&self) -> String {
        let mut s = format!("coloring {} {}\n", self.horizon, self.palette);
        for y in 0..self.horizon {
            for x in 0..y {
                let _ = writeln!(s, "{x} {y} {}", self.color(x, y));
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty coloring text".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        let (horizon, palette) = match parts.as_slice() {
            ["coloring", h, k] => (
                h.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("horizon: {e}")))?,
                k.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("palette: {e}")))?,
            ),
            _ => return Err(Error::Parse(format!("bad coloring header {header:?}"))),
        };
        let total = horizon * horizon.saturating_sub(1) / 2;
        let mut colors = vec![None; total];
        for (ln, line) in lines.enumerate() {
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(|w| w.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", ln + 2)))?;
            let [x, y, c] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected `x y color`",
                    ln + 2
                )));
            };
            if x >= y || y >= horizon {
                return Err(Error::Parse(format!("line {}: bad pair ({x},{y})", ln + 2)));
            }
            colors[pair_index(x, y)] = Some(c as u32);
        }
        let mut out = Vec::with_capacity(total);
        for (i, c) in colors.into_iter().enumerate() {
            out.push(c.ok_or_else(|| Error::Parse(format!("pair #{i} missing")))?);
        }
        let f = FiniteColoring2 {
            horizon,
            palette,
            colors: out,
        };
        if let Some(pos) = f.colors.iter().position(|&c| c >= palette) {
            let y = (0..horizon).find(|&y| y * (y + 1) / 2 > pos).unwrap_or(0);
            let x = pos - y * (y - 1) / 2;
            return Err(Error::ColorOutOfPalette {
                x,
                y,
                color: f.colors[pos],
                palette,
            });
        }
        Ok(f)
    }
}
