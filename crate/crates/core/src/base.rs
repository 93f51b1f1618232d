//! Ambient spaces and numeric tolerances shared by every other module.
//!
//! Scalars are complex throughout; real data embeds with zero imaginary
//! parts. The output space Y is modeled as finite-dimensional C^m with the
//! standard inner product `<u, v> = sum_k u_k * conj(v_k)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used across the crate.
pub type C64 = Complex64;

/// An element of the input set X: a finite real coordinate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Builds a point, rejecting NaN/Inf coordinates and zero dimension.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput("point coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("point coordinates"));
        }
        Ok(Self { coords })
    }

    /// 1-d convenience constructor.
    pub fn scalar(x: f64) -> Self {
        Self::new(vec![x]).expect("finite scalar coordinate")
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn dist2(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Squared Euclidean distance.
    pub fn dist2_sq(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Euclidean dot product of the coordinate vectors.
    pub fn dot(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub(crate) fn check_same_dim(&self, other: &Point, context: &'static str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
                context,
            });
        }
        Ok(())
    }
}

/// An element y of the output space Y = C^m.
#[derive(Debug, Clone, PartialEq)]
pub struct OutVector {
    entries: DVector<C64>,
}

impl OutVector {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyInput("output vector entries"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("output vector entries"));
        }
        Ok(Self {
            entries: DVector::from_vec(entries),
        })
    }

    /// Embeds a real vector with zero imaginary parts.
    pub fn from_reals(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    /// 1-d convenience constructor from a real scalar.
    pub fn scalar(v: f64) -> Self {
        Self::from_reals(&[v]).expect("finite scalar entry")
    }

    pub fn zero(m: usize) -> Self {
        Self {
            entries: DVector::zeros(m),
        }
    }

    /// The k-th standard basis vector of C^m.
    pub fn basis(m: usize, k: usize) -> Self {
        let mut entries = DVector::zeros(m);
        entries[k] = C64::new(1.0, 0.0);
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub(crate) fn from_dvector(entries: DVector<C64>) -> Self {
        Self { entries }
    }

    /// Standard inner product on Y, linear in `self`, conjugate-linear in `other`.
    pub fn inner(&self, other: &OutVector) -> C64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(u, v)| u * v.conj())
            .sum()
    }

    /// Euclidean norm on Y.
    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &OutVector) -> OutVector {
        OutVector {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &OutVector) -> OutVector {
        OutVector {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, alpha: C64) -> OutVector {
        OutVector {
            entries: &self.entries * alpha,
        }
    }

    pub(crate) fn check_dim(&self, m: usize, context: &'static str) -> Result<()> {
        if self.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: self.dim(),
                context,
            });
        }
        Ok(())
    }
}

/// A value of the kernel: an m-by-m complex matrix, an operator on Y.
#[derive(Debug, Clone, PartialEq)]
pub struct OpMatrix {
    entries: DMatrix<C64>,
}

impl OpMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
                context: "operator matrix must be square",
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator matrix entries"));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: rows.iter().map(Vec::len).max().unwrap_or(0),
                context: "operator matrix rows",
            });
        }
        let entries = DMatrix::from_fn(m, m, |i, j| rows[i][j]);
        Self::new(entries)
    }

    pub fn identity(m: usize) -> Self {
        Self {
            entries: DMatrix::identity(m, m),
        }
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            entries: DMatrix::zeros(m, m),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub(crate) fn from_dmatrix(entries: DMatrix<C64>) -> Self {
        Self { entries }
    }

    /// Applies the operator to a vector of Y.
    pub fn apply(&self, y: &OutVector) -> Result<OutVector> {
        y.check_dim(self.dim(), "operator application")?;
        Ok(OutVector {
            entries: &self.entries * y.entries(),
        })
    }

    pub fn add(&self, other: &OpMatrix) -> OpMatrix {
        OpMatrix {
            entries: &self.entries + &other.entries,
        }
    }

    pub fn sub(&self, other: &OpMatrix) -> OpMatrix {
        OpMatrix {
            entries: &self.entries - &other.entries,
        }
    }

    pub fn scale(&self, alpha: C64) -> OpMatrix {
        OpMatrix {
            entries: &self.entries * alpha,
        }
    }

    pub fn adjoint(&self) -> OpMatrix {
        OpMatrix {
            entries: self.entries.adjoint(),
        }
    }
}

/// Absolute/relative comparison thresholds plus the PSD eigenvalue floor.
///
/// `psd_eig_floor` is a per-dimension coefficient: a Gram matrix of side n*m
/// passes the PSD check when its smallest eigenvalue is at least
/// `psd_eig_floor * (n*m) as f64`. The floor scales with dimension to absorb
/// Gershgorin-style rounding growth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub psd_eig_floor: f64,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, psd_eig_floor: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&abs_tol) || !abs_tol.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "abs_tol must lie in [0, 1), got {abs_tol}"
            )));
        }
        if !(0.0..1.0).contains(&rel_tol) || !rel_tol.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "rel_tol must lie in [0, 1), got {rel_tol}"
            )));
        }
        if !psd_eig_floor.is_finite() {
            return Err(Error::InvalidTolerance(
                "psd_eig_floor must be finite".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            psd_eig_floor,
        })
    }

    /// The eigenvalue floor for a Gram matrix of side `dim`.
    pub fn eig_floor(&self, dim: usize) -> f64 {
        self.psd_eig_floor * dim as f64
    }

    /// Entrywise closeness threshold for magnitudes `a` and `b`.
    pub fn close(&self, diff: f64, mag_a: f64, mag_b: f64) -> bool {
        diff <= self.abs_tol + self.rel_tol * mag_a.max(mag_b)
    }
}

impl Default for Tolerance {
    /// Defaults sized for double-precision Gram matrices of side up to a few
    /// hundred: abs 1e-10, rel 1e-8, eigenvalue floor -1e-8 per dimension.
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            psd_eig_floor: -1e-8,
        }
    }
}

/// Entrywise approximate equality of two complex scalars.
pub fn approx_eq_scalar(a: C64, b: C64, tol: &Tolerance) -> bool {
    tol.close((a - b).norm(), a.norm(), b.norm())
}

/// Entrywise approximate equality of two real scalars.
pub fn approx_eq_real(a: f64, b: f64, tol: &Tolerance) -> bool {
    tol.close((a - b).abs(), a.abs(), b.abs())
}

/// Entrywise approximate equality of two operator matrices of the same shape.
pub fn approx_eq_mat(a: &OpMatrix, b: &OpMatrix, tol: &Tolerance) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
            context: "approx_eq operands",
        });
    }
    Ok(a.entries()
        .iter()
        .zip(b.entries().iter())
        .all(|(x, y)| approx_eq_scalar(*x, *y, tol)))
}

/// Entrywise approximate equality of two output vectors of the same length.
pub fn approx_eq_vec(a: &OutVector, b: &OutVector, tol: &Tolerance) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
            context: "approx_eq operands",
        });
    }
    Ok(a.entries()
        .iter()
        .zip(b.entries().iter())
        .all(|(x, y)| approx_eq_scalar(*x, *y, tol)))
}

/// Largest entry magnitude of the skew-Hermitian part (A - A^H)/2.
///
/// Zero exactly when A equals its conjugate transpose.
pub fn hermitian_part_distance(a: &OpMatrix) -> f64 {
    hermitian_distance_raw(a.entries())
}

/// [`hermitian_part_distance`] on a bare matrix, used internally on
/// assembled Gram matrices.
pub(crate) fn hermitian_distance_raw(m: &DMatrix<C64>) -> f64 {
    let mut max = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let skew = (m[(i, j)] - m[(j, i)].conj()) * 0.5;
            max = max.max(skew.norm());
        }
    }
    max
}
