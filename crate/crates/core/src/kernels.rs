//! Operator-valued kernel construction and positivity checking.
//!
//! A kernel here maps a pair of points `(t, x)` to an `m x m` complex matrix.
//! Kernels are described declaratively by [`KernelSpec`], validated into a
//! [`Kernel`], and consumed through the [`OperatorKernel`] trait by the rest
//! of the crate. Block Gram assembly and the positive-semidefiniteness check
//! live here as well, since they are meaningful for any operator kernel.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::base::{hermitian_distance_raw, C64, OpMatrix, OutVector, Point, Tolerance};
use crate::complexfmt::JsonComplex;
use crate::error::{Error, Result};
use crate::linalg;

/// Scalar base kernel on points, parameterized per family.
///
/// All families except `negative_distance` are positive semidefinite.
/// `negative_distance` evaluates to minus the Euclidean distance and exists
/// purely as a diagnostic: it gives the positivity checker something honest
/// to reject.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum BaseKernel {
    /// `exp(-gamma * ||t - x||^2)`
    Gaussian { gamma: f64 },
    /// `exp(-gamma * ||t - x||)`
    Laplacian { gamma: f64 },
    /// `t . x`
    Linear,
    /// `(t . x + offset)^degree`
    Polynomial { degree: u32, offset: f64 },
    /// `-||t - x||`; not positive semidefinite, for diagnostics only
    NegativeDistance,
}

impl BaseKernel {
    /// Evaluates the scalar kernel. Both points must share a dimension.
    pub fn eval(&self, t: &Point, x: &Point) -> f64 {
        assert_eq!(t.dim(), x.dim(), "base kernel points must share dimension");
        match self {
            BaseKernel::Gaussian { gamma } => (-gamma * t.dist2_sq(x)).exp(),
            BaseKernel::Laplacian { gamma } => (-gamma * t.dist2(x)).exp(),
            BaseKernel::Linear => t.dot(x),
            BaseKernel::Polynomial { degree, offset } => (t.dot(x) + offset).powi(*degree as i32),
            BaseKernel::NegativeDistance => -t.dist2(x),
        }
    }

    /// True for the families that are positive semidefinite by construction.
    pub fn is_positive_semidefinite(&self) -> bool {
        !matches!(self, BaseKernel::NegativeDistance)
    }

    fn validate(&self) -> Result<()> {
        match self {
            BaseKernel::Gaussian { gamma } | BaseKernel::Laplacian { gamma } => {
                if !(gamma.is_finite() && *gamma > 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "kernel bandwidth gamma must be positive and finite, got {gamma}"
                    )));
                }
            }
            BaseKernel::Linear => {}
            BaseKernel::Polynomial { degree, offset } => {
                if *degree < 1 {
                    return Err(Error::InvalidSpec(
                        "polynomial degree must be at least 1".into(),
                    ));
                }
                if !(offset.is_finite() && *offset >= 0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "polynomial offset must be nonnegative and finite, got {offset}"
                    )));
                }
            }
            BaseKernel::NegativeDistance => {}
        }
        Ok(())
    }
}

/// Structural combinator applied on top of base kernels or child specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `k(t,x) * I_m` for a scalar base kernel `k`
    ScalarTimesIdentity,
    /// `k(t,x) * A` for a fixed Hermitian positive semidefinite matrix `A`
    Separable,
    /// entrywise sum of child kernels with equal output dimension
    Sum,
    /// positive scalar multiple of a single child kernel
    Scaled,
    /// diagonal matrix of entrywise products of the children's diagonals
    PointwiseProductDiagonal,
}

/// Declarative description of an operator-valued kernel.
///
/// The JSON form uses exactly the fields below; fields that do not apply to
/// the chosen `variant` must be absent. `A` entries may be plain numbers or
/// `"a+bi"` strings. `scaled` takes exactly one child in `children`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub variant: Variant,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<BaseKernel>,
    /// output dimension of the operator values
    pub m: usize,
    /// mixing matrix for the `separable` variant, row-major
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<JsonComplex>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub children: Option<Vec<KernelSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl KernelSpec {
    /// Scalar base kernel times the `m x m` identity.
    pub fn scalar_times_identity(base: BaseKernel, m: usize) -> Self {
        KernelSpec {
            variant: Variant::ScalarTimesIdentity,
            base: Some(base),
            m,
            a: None,
            children: None,
            scale: None,
        }
    }

    /// Scalar base kernel times a fixed mixing matrix.
    pub fn separable(base: BaseKernel, a: &OpMatrix) -> Self {
        let rows = (0..a.dim())
            .map(|i| (0..a.dim()).map(|j| JsonComplex(a.entries()[(i, j)])).collect())
            .collect();
        KernelSpec {
            variant: Variant::Separable,
            base: Some(base),
            m: a.dim(),
            a: Some(rows),
            children: None,
            scale: None,
        }
    }

    /// Entrywise sum of child kernels sharing one output dimension.
    pub fn sum(children: Vec<KernelSpec>) -> Self {
        let m = children.first().map_or(0, |c| c.m);
        KernelSpec {
            variant: Variant::Sum,
            base: None,
            m,
            a: None,
            children: Some(children),
            scale: None,
        }
    }

    /// Positive scalar multiple of one child kernel.
    pub fn scaled(scale: f64, child: KernelSpec) -> Self {
        let m = child.m;
        KernelSpec {
            variant: Variant::Scaled,
            base: None,
            m,
            a: None,
            children: Some(vec![child]),
            scale: Some(scale),
        }
    }

    /// Diagonal kernel whose `i`-th diagonal entry is the product of the
    /// children's `i`-th diagonal entries.
    pub fn pointwise_product_diagonal(children: Vec<KernelSpec>) -> Self {
        let m = children.first().map_or(0, |c| c.m);
        KernelSpec {
            variant: Variant::PointwiseProductDiagonal,
            base: None,
            m,
            a: None,
            children: Some(children),
            scale: None,
        }
    }

    /// Reads a spec from its JSON form without validating it; use
    /// [`build_kernel`] to validate.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Serializes the spec to JSON.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// True when every base kernel in the tree is positive semidefinite.
    pub fn is_positive_semidefinite_family(&self) -> bool {
        let base_ok = self.base.as_ref().is_none_or(BaseKernel::is_positive_semidefinite);
        let children_ok = self
            .children
            .as_ref()
            .is_none_or(|cs| cs.iter().all(Self::is_positive_semidefinite_family));
        base_ok && children_ok
    }
}

/// An operator-valued kernel: a map from point pairs to `m x m` matrices.
///
/// Implementations may assume both points share a dimension; the public
/// entry points that accept user data validate dimensions before calling.
pub trait OperatorKernel {
    /// Dimension `m` of the operator values.
    fn output_dim(&self) -> usize;

    /// Evaluates `K(t, x)`.
    fn eval(&self, t: &Point, x: &Point) -> OpMatrix;
}

/// A validated, evaluable kernel built from a [`KernelSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    spec: KernelSpec,
}

/// Validates a spec and returns an evaluable kernel.
///
/// Rejected inputs include nonpositive bandwidths and scales, a zero output
/// dimension, missing or surplus fields for the chosen variant, children
/// with mismatched output dimensions, and a mixing matrix that is not
/// Hermitian positive semidefinite.
pub fn build_kernel(spec: &KernelSpec) -> Result<Kernel> {
    validate_spec(spec)?;
    Ok(Kernel { spec: spec.clone() })
}

fn validate_spec(spec: &KernelSpec) -> Result<()> {
    if spec.m == 0 {
        return Err(Error::InvalidSpec(
            "output dimension m must be at least 1".into(),
        ));
    }
    let forbid = |field: Option<&str>| -> Result<()> {
        if let Some(name) = field {
            return Err(Error::InvalidSpec(format!(
                "field {name} is not valid for variant {:?}",
                spec.variant
            )));
        }
        Ok(())
    };
    match spec.variant {
        Variant::ScalarTimesIdentity => {
            let base = spec.base.as_ref().ok_or_else(|| {
                Error::InvalidSpec("scalar_times_identity requires a base kernel".into())
            })?;
            base.validate()?;
            forbid(spec.a.as_ref().map(|_| "A"))?;
            forbid(spec.children.as_ref().map(|_| "children"))?;
            forbid(spec.scale.as_ref().map(|_| "scale"))?;
        }
        Variant::Separable => {
            let base = spec
                .base
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("separable requires a base kernel".into()))?;
            base.validate()?;
            forbid(spec.children.as_ref().map(|_| "children"))?;
            forbid(spec.scale.as_ref().map(|_| "scale"))?;
            let a = mixing_matrix(spec)?;
            let herm = hermitian_distance_raw(&a);
            if herm > 1e-12 {
                return Err(Error::NonHermitian {
                    distance: herm,
                    tol: 1e-12,
                });
            }
            let min_eig = linalg::min_eigenvalue(&a);
            if min_eig < -1e-10 * spec.m as f64 {
                return Err(Error::InvalidSpec(format!(
                    "mixing matrix A must be positive semidefinite; \
                     smallest eigenvalue {min_eig:.3e}"
                )));
            }
        }
        Variant::Sum | Variant::PointwiseProductDiagonal => {
            forbid(spec.base.as_ref().map(|_| "base"))?;
            forbid(spec.a.as_ref().map(|_| "A"))?;
            forbid(spec.scale.as_ref().map(|_| "scale"))?;
            let children = spec
                .children
                .as_ref()
                .filter(|cs| !cs.is_empty())
                .ok_or_else(|| {
                    Error::InvalidSpec(format!(
                        "variant {:?} requires at least one child",
                        spec.variant
                    ))
                })?;
            for child in children {
                if child.m != spec.m {
                    return Err(Error::InvalidSpec(format!(
                        "child output dimension {} does not match parent {}",
                        child.m, spec.m
                    )));
                }
                validate_spec(child)?;
            }
        }
        Variant::Scaled => {
            forbid(spec.base.as_ref().map(|_| "base"))?;
            forbid(spec.a.as_ref().map(|_| "A"))?;
            let scale = spec
                .scale
                .ok_or_else(|| Error::InvalidSpec("scaled requires a scale".into()))?;
            if !(scale.is_finite() && scale > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "scale must be positive and finite, got {scale}"
                )));
            }
            let children = spec.children.as_ref().ok_or_else(|| {
                Error::InvalidSpec("scaled requires exactly one child".into())
            })?;
            if children.len() != 1 {
                return Err(Error::InvalidSpec(format!(
                    "scaled requires exactly one child, got {}",
                    children.len()
                )));
            }
            if children[0].m != spec.m {
                return Err(Error::InvalidSpec(format!(
                    "child output dimension {} does not match parent {}",
                    children[0].m, spec.m
                )));
            }
            validate_spec(&children[0])?;
        }
    }
    Ok(())
}

fn mixing_matrix(spec: &KernelSpec) -> Result<DMatrix<C64>> {
    let rows = spec
        .a
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("separable requires a mixing matrix A".into()))?;
    if rows.len() != spec.m || rows.iter().any(|r| r.len() != spec.m) {
        return Err(Error::InvalidSpec(format!(
            "mixing matrix A must be {m} x {m}",
            m = spec.m
        )));
    }
    let mut a = DMatrix::zeros(spec.m, spec.m);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if !z.0.re.is_finite() || !z.0.im.is_finite() {
                return Err(Error::NonFinite("mixing matrix A"));
            }
            a[(i, j)] = z.0;
        }
    }
    Ok(a)
}

impl Kernel {
    /// The validated spec this kernel was built from.
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    fn eval_spec(spec: &KernelSpec, t: &Point, x: &Point) -> DMatrix<C64> {
        let m = spec.m;
        match spec.variant {
            Variant::ScalarTimesIdentity => {
                let k = spec.base.as_ref().expect("validated").eval(t, x);
                DMatrix::from_diagonal_element(m, m, C64::new(k, 0.0))
            }
            Variant::Separable => {
                let k = spec.base.as_ref().expect("validated").eval(t, x);
                let a = mixing_matrix(spec).expect("validated");
                a * C64::new(k, 0.0)
            }
            Variant::Sum => {
                let children = spec.children.as_ref().expect("validated");
                let mut acc = DMatrix::zeros(m, m);
                for child in children {
                    acc += Self::eval_spec(child, t, x);
                }
                acc
            }
            Variant::Scaled => {
                let child = &spec.children.as_ref().expect("validated")[0];
                Self::eval_spec(child, t, x) * C64::new(spec.scale.expect("validated"), 0.0)
            }
            Variant::PointwiseProductDiagonal => {
                let children = spec.children.as_ref().expect("validated");
                let mut diag = DMatrix::from_diagonal_element(m, m, C64::new(1.0, 0.0));
                for child in children {
                    let block = Self::eval_spec(child, t, x);
                    for i in 0..m {
                        diag[(i, i)] *= block[(i, i)];
                    }
                }
                diag
            }
        }
    }
}

impl OperatorKernel for Kernel {
    fn output_dim(&self) -> usize {
        self.spec.m
    }

    fn eval(&self, t: &Point, x: &Point) -> OpMatrix {
        assert_eq!(t.dim(), x.dim(), "kernel points must share dimension");
        OpMatrix::from_dmatrix(Self::eval_spec(&self.spec, t, x))
    }
}

/// Checks that all points share one dimension and returns it.
pub fn common_dim(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput("points"))?;
    for p in points {
        first.check_same_dim(p, "point set")?;
    }
    Ok(first.dim())
}

/// Assembles the `n*m x n*m` block Gram matrix with block `(i, j)` equal to
/// `K(x_i, x_j)`. Blocks are computed independently, so any asymmetry in the
/// kernel shows up in the result rather than being hidden by mirroring.
pub fn gram<K: OperatorKernel>(kernel: &K, points: &[Point]) -> Result<DMatrix<C64>> {
    common_dim(points)?;
    let n = points.len();
    let m = kernel.output_dim();
    let mut g = DMatrix::zeros(n * m, n * m);
    for i in 0..n {
        for j in 0..n {
            let block = kernel.eval(&points[i], &points[j]);
            g.view_mut((i * m, j * m), (m, m)).copy_from(block.entries());
        }
    }
    Ok(g)
}

/// Outcome of a positivity check on a block Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    /// true when the smallest eigenvalue clears the dimension-scaled floor
    pub is_psd: bool,
    /// smallest eigenvalue of the Hermitian part of the Gram matrix
    pub min_eigenvalue: f64,
    /// entrywise distance from the Gram matrix to its Hermitian part
    pub hermitian_distance: f64,
    /// eigenvalue floor used for the verdict, `psd_eig_floor * n * m`
    pub eig_floor: f64,
}

/// Assembles the block Gram matrix for `points` and tests it for positive
/// semidefiniteness against `tol`.
///
/// The Gram matrix must be Hermitian within `tol.abs_tol`; beyond that the
/// check fails with [`Error::NonHermitian`] rather than reporting a verdict
/// on a matrix whose eigenvalues are not trustworthy.
pub fn check_psd<K: OperatorKernel>(
    kernel: &K,
    points: &[Point],
    tol: &Tolerance,
) -> Result<PsdReport> {
    let g = gram(kernel, points)?;
    let herm = hermitian_distance_raw(&g);
    if herm > tol.abs_tol {
        return Err(Error::NonHermitian {
            distance: herm,
            tol: tol.abs_tol,
        });
    }
    let min_eigenvalue = linalg::min_eigenvalue(&g);
    let eig_floor = tol.eig_floor(g.nrows());
    Ok(PsdReport {
        is_psd: min_eigenvalue >= eig_floor,
        min_eigenvalue,
        hermitian_distance: herm,
        eig_floor,
    })
}

/// Applies the kernel section at `x` with coefficient `y` to the point `t`,
/// returning `K(t, x) y`.
pub fn section_apply<K: OperatorKernel>(
    kernel: &K,
    x: &Point,
    y: &OutVector,
    t: &Point,
) -> Result<OutVector> {
    t.check_same_dim(x, "kernel section points")?;
    y.check_dim(kernel.output_dim(), "kernel section coefficient")?;
    kernel.eval(t, x).apply(y)
}
