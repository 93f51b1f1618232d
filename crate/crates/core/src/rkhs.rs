//! Finite spans in the reproducing kernel Hilbert space of an operator
//! kernel.
//!
//! An element is stored as a list of centers with vector coefficients,
//! `f = sum_j K(., x_j) c_j`. Evaluation, the inner product, and norm all
//! reduce to kernel evaluations against this representation, and value
//! interpolation reduces to a block Gram solve.

use nalgebra::DVector;

use crate::base::{C64, OutVector, Point, Tolerance};
use crate::error::{Error, Result};
use crate::kernels::{common_dim, gram, Kernel, OperatorKernel};
use crate::linalg;

/// Relative slack allowed when deciding whether a rank-deficient system is
/// consistent: the residual may not exceed this times `1 + ||rhs||`.
pub const FEASIBILITY_REL: f64 = 1e-8;

/// A prescribed value `f(x) = value`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueConstraint {
    pub x: Point,
    pub value: OutVector,
}

impl ValueConstraint {
    pub fn new(x: Point, value: OutVector) -> Self {
        ValueConstraint { x, value }
    }
}

/// A finite span `f = sum_j K(., x_j) c_j` in the space induced by `kernel`.
#[derive(Debug, Clone, PartialEq)]
pub struct RkhsElement {
    kernel: Kernel,
    centers: Vec<Point>,
    coefficients: Vec<OutVector>,
}

impl RkhsElement {
    /// Builds a span from matching lists of centers and coefficients.
    pub fn new(kernel: Kernel, centers: Vec<Point>, coefficients: Vec<OutVector>) -> Result<Self> {
        if centers.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                got: coefficients.len(),
                context: "one coefficient vector per center",
            });
        }
        if !centers.is_empty() {
            common_dim(&centers)?;
        }
        for c in &coefficients {
            c.check_dim(kernel.output_dim(), "span coefficient")?;
        }
        Ok(RkhsElement {
            kernel,
            centers,
            coefficients,
        })
    }

    /// The zero element of the space.
    pub fn zero(kernel: Kernel) -> Self {
        RkhsElement {
            kernel,
            centers: Vec::new(),
            coefficients: Vec::new(),
        }
    }

    /// The kernel section `K(., x) y` as a one-term span.
    pub fn section(kernel: Kernel, x: Point, y: OutVector) -> Result<Self> {
        Self::new(kernel, vec![x], vec![y])
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn coefficients(&self) -> &[OutVector] {
        &self.coefficients
    }

    /// Evaluates the span at `x`.
    pub fn evaluate(&self, x: &Point) -> Result<OutVector> {
        let m = self.kernel.output_dim();
        let mut acc = OutVector::zero(m);
        for (center, coeff) in self.centers.iter().zip(&self.coefficients) {
            x.check_same_dim(center, "evaluation point")?;
            acc = acc.add(&self.kernel.eval(x, center).apply(coeff)?);
        }
        Ok(acc)
    }

    /// Concatenates two spans over the same kernel.
    pub fn sum_with(&self, other: &Self) -> Result<Self> {
        check_same_kernel(&self.kernel, &other.kernel)?;
        let mut centers = self.centers.clone();
        centers.extend(other.centers.iter().cloned());
        let mut coefficients = self.coefficients.clone();
        coefficients.extend(other.coefficients.iter().cloned());
        Self::new(self.kernel.clone(), centers, coefficients)
    }

    /// Scales every coefficient by `alpha`.
    pub fn scale(&self, alpha: C64) -> Self {
        RkhsElement {
            kernel: self.kernel.clone(),
            centers: self.centers.clone(),
            coefficients: self.coefficients.iter().map(|c| c.scale(alpha)).collect(),
        }
    }
}

fn check_same_kernel(left: &Kernel, right: &Kernel) -> Result<()> {
    if left.spec() != right.spec() {
        return Err(Error::KernelMismatch);
    }
    Ok(())
}

/// Inner product of two spans over the same kernel,
/// `<f, g> = sum_{i,j} < K(b_j, a_i) c_i, d_j >` in the output space.
///
/// The product is linear in `f` and conjugate-linear in `g`.
pub fn inner_product(f: &RkhsElement, g: &RkhsElement) -> Result<C64> {
    check_same_kernel(f.kernel(), g.kernel())?;
    let mut acc = C64::new(0.0, 0.0);
    for (a_i, c_i) in f.centers.iter().zip(&f.coefficients) {
        for (b_j, d_j) in g.centers.iter().zip(&g.coefficients) {
            a_i.check_same_dim(b_j, "span centers")?;
            let w = f.kernel.eval(b_j, a_i).apply(c_i)?;
            acc += w.inner(d_j);
        }
    }
    Ok(acc)
}

/// Norm induced by [`inner_product`].
///
/// For a positive semidefinite kernel `<f, f>` is real and nonnegative up to
/// rounding; a substantial imaginary part means the kernel is not Hermitian
/// and is reported as an error instead of being silently dropped.
pub fn norm(f: &RkhsElement) -> Result<f64> {
    let ip = inner_product(f, f)?;
    let tol = Tolerance::default();
    if ip.im.abs() > tol.abs_tol + tol.rel_tol * ip.re.abs() {
        return Err(Error::ComplexNorm { imag: ip.im });
    }
    Ok(ip.re.max(0.0).sqrt())
}

/// Result of fitting a span through prescribed values.
#[derive(Debug, Clone)]
pub struct ValueFit {
    /// interpolant with one coefficient vector per constraint point
    pub element: RkhsElement,
    /// Euclidean norm of the stacked constraint residual `||G c - v||`,
    /// measured against the unridged Gram so it reports how far the fit is
    /// from actually interpolating, whatever the regularization
    pub residual: f64,
    /// true when the Gram system was solved by a minimum-norm pseudo-solve
    pub used_pseudo_solve: bool,
    /// smallest singular value seen by the pseudo-solve, when taken
    pub min_singular_value: Option<f64>,
}

impl ValueFit {
    /// True when the residual is small enough to call the fit an actual
    /// interpolant of the prescribed values, whose stacked Euclidean norm
    /// is `value_norm`.
    pub fn is_consistent(&self, value_norm: f64) -> bool {
        self.residual <= FEASIBILITY_REL * (1.0 + value_norm)
    }
}

/// Fits `f = sum_j K(., x_j) c_j` through the prescribed values by solving
/// `(G + ridge I) c = v` over the block Gram matrix `G` of the constraint
/// points.
///
/// With `ridge = 0` an exactly singular but consistent system falls back to
/// the minimum-norm solution; an inconsistent one fails with
/// [`Error::SingularSystem`] carrying the smallest singular value. A positive
/// ridge always yields the regularized solution.
pub fn fit_values(kernel: &Kernel, constraints: &[ValueConstraint], ridge: f64) -> Result<ValueFit> {
    if constraints.is_empty() {
        return Err(Error::EmptyInput("value constraints"));
    }
    let m = kernel.output_dim();
    let points: Vec<Point> = constraints.iter().map(|c| c.x.clone()).collect();
    for c in constraints {
        c.value.check_dim(m, "prescribed value")?;
    }
    let g = gram(kernel, &points)?;
    let mut rhs = DVector::zeros(points.len() * m);
    for (i, c) in constraints.iter().enumerate() {
        rhs.rows_mut(i * m, m).copy_from(c.value.entries());
    }
    let outcome = linalg::solve_hermitian_psd(&g, &rhs, ridge)?;
    let residual = (&g * &outcome.solution - &rhs).norm();
    if ridge == 0.0
        && outcome.used_pseudo_solve
        && residual > FEASIBILITY_REL * (1.0 + rhs.norm())
    {
        return Err(Error::SingularSystem {
            min_singular_value: outcome.min_singular_value.unwrap_or(0.0),
            residual,
        });
    }
    let coefficients = (0..points.len())
        .map(|i| OutVector::from_dvector(outcome.solution.rows(i * m, m).into_owned()))
        .collect();
    Ok(ValueFit {
        element: RkhsElement::new(kernel.clone(), points, coefficients)?,
        residual,
        used_pseudo_solve: outcome.used_pseudo_solve,
        min_singular_value: outcome.min_singular_value,
    })
}
