//! Site layouts and block hierarchies for the protocol variants.
//!
//! The nested variant lives on the half-open cube `{0, ..., 2^n - 1}^d`
//! with levels `B_q = {0, ..., 2^q - 1}^d`, so `|B_q| = 2^{qd}` and the
//! target sits at the corner `(2^n - 1, 0, ..., 0)`.
//!
//! The disjoint variants live on a one-dimensional chain of blocks with
//! sizes `1, 2, 4, ..., 2^n, ..., 4, 2, 1` (mirrored around the largest
//! block), separated by empty gaps of `ceil(beta * 2^q)` lattice cells.
//! Gap cells host no sites, but physical distance still counts them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Refuse to build layouts beyond this many sites.
pub const MAX_SITES: u64 = 1 << 22;

/// Integer lattice coordinates for every site, in index order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiteLayout {
    /// One coordinate tuple per site index.
    pub coords: Vec<Vec<i64>>,
    /// Maximum Manhattan span of the layout.
    pub total_extent: i64,
}

impl SiteLayout {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Manhattan distance between two sites.
    pub fn pair_distance(&self, i: usize, j: usize) -> Result<u64> {
        let n = self.coords.len();
        let a = self.coords.get(i).ok_or(Error::IndexOutOfRange { index: i, len: n })?;
        let b = self.coords.get(j).ok_or(Error::IndexOutOfRange { index: j, len: n })?;
        Ok(a.iter().zip(b).map(|(x, y)| x.abs_diff(*y)).sum())
    }
}

/// Which family of hierarchies a [`BlockHierarchy`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HierarchyKind {
    /// Nested cubes around source and target.
    Nested { d: u32, n: u32 },
    /// Mirror-symmetric chain of disjoint blocks; `base` is `log2` of the
    /// size of the first block (0 for single-qubit runs).
    Chain { n: u32, base: u32 },
}

/// Per-level site membership for one protocol geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockHierarchy {
    /// Nested: cumulative cubes `B_0 ..= B_n`. Chain: the disjoint blocks
    /// in left-to-right order.
    pub levels: Vec<Vec<usize>>,
    /// Nested: the new shells `B~_1 ..= B~_n`. Empty for chains.
    pub shells: Vec<Vec<usize>>,
    /// Nested: cubes `B'_0 ..= B'_n` around the target. Empty for chains.
    pub collapse_levels: Vec<Vec<usize>>,
    /// Nested: shells of the collapse hierarchy. Empty for chains.
    pub collapse_shells: Vec<Vec<usize>>,
    pub source_site: usize,
    pub target_site: usize,
    pub kind: HierarchyKind,
}

/// Expand or collapse phase of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Expand,
    Collapse,
}

impl BlockHierarchy {
    /// The pair of site sets coupled by the step at level `q` of `phase`.
    pub fn step_blocks(&self, phase: Phase, q: u32) -> Result<(&[usize], &[usize])> {
        match self.kind {
            HierarchyKind::Nested { n, .. } => {
                if q < 1 || q > n {
                    return Err(Error::InvalidArgument(format!("step level {q} outside 1..={n}")));
                }
                let qi = q as usize;
                match phase {
                    Phase::Expand => Ok((&self.levels[qi - 1], &self.shells[qi - 1])),
                    Phase::Collapse => {
                        Ok((&self.collapse_levels[qi - 1], &self.collapse_shells[qi - 1]))
                    }
                }
            }
            HierarchyKind::Chain { n, base } => {
                if q <= base || q > n {
                    return Err(Error::InvalidArgument(format!(
                        "step level {q} outside {}..={n}",
                        base + 1
                    )));
                }
                let (from, to) = match phase {
                    Phase::Expand => ((q - 1 - base) as usize, (q - base) as usize),
                    Phase::Collapse => {
                        let from = (2 * n - base - q) as usize;
                        (from, from + 1)
                    }
                };
                Ok((&self.levels[from], &self.levels[to]))
            }
        }
    }

    /// Number of levels stepped per phase.
    pub fn steps_per_phase(&self) -> u32 {
        match self.kind {
            HierarchyKind::Nested { n, .. } => n,
            HierarchyKind::Chain { n, base } => n - base,
        }
    }
}

fn check_capacity(total: u128) -> Result<()> {
    if total > MAX_SITES as u128 {
        return Err(Error::Capacity { requested: total, limit: MAX_SITES });
    }
    Ok(())
}

/// Builds the nested cube hierarchy of the ideal protocol.
pub fn nested_hierarchy(d: u32, n: u32) -> Result<(SiteLayout, BlockHierarchy)> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidArgument("nested_hierarchy requires d >= 1 and n >= 1".into()));
    }
    let side: u64 = 1 << n;
    check_capacity((side as u128).pow(d))?;
    let total = (side as usize).pow(d);

    // Index order: first axis fastest.
    let mut coords = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rem = idx;
        let mut c = Vec::with_capacity(d as usize);
        for _ in 0..d {
            c.push((rem % side as usize) as i64);
            rem /= side as usize;
        }
        coords.push(c);
    }

    let mut levels = Vec::with_capacity(n as usize + 1);
    let mut collapse_levels = Vec::with_capacity(n as usize + 1);
    for q in 0..=n {
        let s = 1i64 << q;
        let mut lv = Vec::new();
        let mut cl = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            if c.iter().all(|&x| x < s) {
                lv.push(i);
            }
            if c[0] >= side as i64 - s && c[1..].iter().all(|&x| x < s) {
                cl.push(i);
            }
        }
        levels.push(lv);
        collapse_levels.push(cl);
    }
    let shells = shell_diff(&levels);
    let collapse_shells = shell_diff(&collapse_levels);

    let source_site = levels[0][0];
    let target_site = collapse_levels[0][0];
    let layout = SiteLayout { coords, total_extent: d as i64 * (side as i64 - 1) };
    let hierarchy = BlockHierarchy {
        levels,
        shells,
        collapse_levels,
        collapse_shells,
        source_site,
        target_site,
        kind: HierarchyKind::Nested { d, n },
    };
    Ok((layout, hierarchy))
}

fn shell_diff(levels: &[Vec<usize>]) -> Vec<Vec<usize>> {
    levels
        .windows(2)
        .map(|w| {
            let inner: std::collections::HashSet<usize> = w[0].iter().copied().collect();
            w[1].iter().copied().filter(|i| !inner.contains(i)).collect()
        })
        .collect()
}

/// Builds the gapped one-dimensional chain of the disjoint variants.
///
/// Equivalent to [`disjoint_chain`] with a base block of one site.
pub fn disjoint_layout(d: u32, n: u32, beta: f64) -> Result<(SiteLayout, BlockHierarchy)> {
    if d != 1 {
        return Err(Error::InvalidArgument("disjoint layouts are restricted to d = 1".into()));
    }
    disjoint_chain(n, beta, 0)
}

/// Builds the gapped chain with block sizes
/// `2^base, 2^{base+1}, ..., 2^n, ..., 2^{base+1}, 2^base`.
///
/// `base > 0` is used by the multi-qubit protocol, whose first and last
/// blocks hold one site per transferable mode.
pub fn disjoint_chain(n: u32, beta: f64, base: u32) -> Result<(SiteLayout, BlockHierarchy)> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidArgument("beta must be >= 0".into()));
    }
    if n <= base {
        return Err(Error::InvalidArgument(format!(
            "disjoint chain requires n > base (n = {n}, base = {base})"
        )));
    }
    let total: u128 = (base..=n).map(|q| 1u128 << q).sum::<u128>() * 2 - (1u128 << n);
    check_capacity(total)?;

    // Block sizes up to 2^n and mirrored back down; the gap inserted
    // before the block of a level-q step is ceil(beta * 2^q) cells.
    let up: Vec<u32> = (base..=n).collect();
    let down: Vec<u32> = (base..n).rev().collect();
    let sizes: Vec<u64> =
        up.iter().map(|&q| 1 << q).chain(down.iter().map(|&q| 1 << q)).collect();
    let gap_levels: Vec<u32> = (base + 1..=n).chain((base + 1..=n).rev()).collect();

    let mut coords = Vec::new();
    let mut levels = Vec::new();
    let mut x: i64 = 0;
    for (b, &size) in sizes.iter().enumerate() {
        if b > 0 {
            x += (beta * (1u64 << gap_levels[b - 1]) as f64).ceil() as i64;
        }
        let mut block = Vec::with_capacity(size as usize);
        for _ in 0..size {
            block.push(coords.len());
            coords.push(vec![x]);
            x += 1;
        }
        levels.push(block);
    }

    let source_site = 0;
    let target_site = coords.len() - 1;
    let layout = SiteLayout { coords, total_extent: x - 1 };
    let hierarchy = BlockHierarchy {
        levels,
        shells: Vec::new(),
        collapse_levels: Vec::new(),
        collapse_shells: Vec::new(),
        source_site,
        target_site,
        kind: HierarchyKind::Chain { n, base },
    };
    Ok((layout, hierarchy))
}
