//! Orthogonal sign-vector families and block transfer matrices for
//! multi-qubit transfer.
//!
//! The recursive family doubles by concatenation,
//! `u_i -> u_i (+) u_i` and `u_i -> u_i (+) (-u_i)`, which is the
//! Sylvester construction: stacking the vectors as columns gives the
//! order-`2^w` Hadamard-type matrix `S_{w+1} = [[S, S], [S, -S]]`.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Largest supported recursion depth (2^13 = 8192-site blocks).
pub const MAX_DEPTH: u32 = 13;

/// `2^w` mutually orthogonal sign vectors of dimension `2^w`, stored as
/// the columns of a +-1 matrix.
#[derive(Debug, Clone)]
pub struct OrthoFamily {
    pub w: u32,
    pub vectors: DMatrix<f64>,
}

/// A rectangular block transfer matrix with orthonormal rows.
#[derive(Debug, Clone)]
pub struct TransferBasis {
    pub level: u32,
    pub matrix: DMatrix<f64>,
}

impl TransferBasis {
    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }
}

/// Builds the depth-`w` family of `2^w` orthogonal +-1 vectors.
pub fn recursive_family(w: u32) -> Result<OrthoFamily> {
    if w > MAX_DEPTH {
        return Err(Error::Capacity { requested: 1u128 << (2 * w), limit: 1 << (2 * MAX_DEPTH) });
    }
    let mut s = DMatrix::from_element(1, 1, 1.0);
    for _ in 0..w {
        let k = s.nrows();
        s = DMatrix::from_fn(2 * k, 2 * k, |i, j| {
            let sign = if i >= k && j >= k { -1.0 } else { 1.0 };
            sign * s[(i % k, j % k)]
        });
    }
    Ok(OrthoFamily { w, vectors: s })
}

/// Smallest power of `2^d` holding at least `m` modes.
pub fn block_size(m: usize, d: u32) -> Result<usize> {
    if m < 1 {
        return Err(Error::InvalidArgument("mode count must be >= 1".into()));
    }
    if d < 1 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let base = 1usize << d;
    let mut w = 1usize;
    while w < m {
        w *= base;
    }
    Ok(w)
}

/// The orthogonal base matrix with columns `u_i / 2^{w/2}`, `W = 2^w`.
pub fn m1_matrix(big_w: usize) -> Result<TransferBasis> {
    if !big_w.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("block size {big_w} is not a power of 2")));
    }
    let w = big_w.trailing_zeros();
    let fam = recursive_family(w)?;
    let scale = 1.0 / (big_w as f64).sqrt();
    Ok(TransferBasis { level: 1, matrix: fam.vectors * scale })
}

/// One level of the block recursion: `2^d` horizontal copies of the
/// matrix, scaled by `2^{-d/2}` so rows stay orthonormal.
pub fn extend(basis: &TransferBasis, d: u32) -> TransferBasis {
    let (r, c) = basis.matrix.shape();
    let copies = 1usize << d;
    let scale = 1.0 / (copies as f64).sqrt();
    let matrix =
        DMatrix::from_fn(r, c * copies, |i, j| scale * basis.matrix[(i, j % c)]);
    TransferBasis { level: basis.level + 1, matrix }
}

/// Tiles the depth-`w` sign matrix into a `rows x cols` coupling
/// pattern. Both dimensions must be multiples of `2^w`.
pub fn tile_pattern(w: u32, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let width = 1usize << w;
    if rows % width != 0 || cols % width != 0 || rows == 0 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "tile_pattern: {rows}x{cols} not divisible by {width}"
        )));
    }
    let s = recursive_family(w)?.vectors;
    Ok(DMatrix::from_fn(rows, cols, |i, j| s[(i % width, j % width)]))
}

/// Orthonormal replicated modes on a block of `copies * 2^w` sites: each
/// sign vector repeated periodically and renormalized. Returns a
/// `block_len x 2^w` matrix with orthonormal columns.
pub fn replicated_family(w: u32, block_len: usize) -> Result<DMatrix<f64>> {
    let width = 1usize << w;
    if block_len == 0 || block_len % width != 0 {
        return Err(Error::InvalidArgument(format!(
            "replicated_family: block of {block_len} sites not divisible by {width}"
        )));
    }
    let s = recursive_family(w)?.vectors;
    let norm = 1.0 / (block_len as f64).sqrt();
    Ok(DMatrix::from_fn(block_len, width, |i, j| norm * s[(i % width, j)]))
}
