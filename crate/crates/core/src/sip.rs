//! Compatible semi-inner products on finite-dimensional `l^p` spaces and a
//! discrete model of vector-valued Banach function spaces built on them.
//!
//! For `1 < p < infinity` the space `l^p` is not an inner product space
//! unless `p = 2`, but it carries a semi-inner product `[f, g]` that is
//! linear in `f`, recovers the norm on the diagonal, and satisfies the
//! Cauchy-Schwarz inequality. The duality map sends `f` to the norming
//! functional it induces, which lands isometrically in `l^q` with
//! `q = p / (p - 1)`. On top of this the module models functions on a finite
//! domain with values in `l^p`, where point evaluation and point-difference
//! evaluation become bounded maps whose norms can be estimated empirically.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{C64, Point, Tolerance};
use crate::error::{Error, Result};

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// A finite-dimensional `l^p` space with `1 < p < infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SipSpace {
    p: f64,
    dim: usize,
}

impl SipSpace {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        check_exponent(p)?;
        if dim == 0 {
            return Err(Error::EmptyInput("l^p dimension"));
        }
        Ok(SipSpace { p, dim })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The Hoelder conjugate `q = p / (p - 1)`.
    pub fn conjugate_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }
}

/// A vector tagged with the `l^p` space it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct SipVector {
    space: SipSpace,
    entries: DVector<C64>,
}

impl SipVector {
    pub fn new(space: SipSpace, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                got: entries.len(),
                context: "l^p vector",
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("l^p vector"));
        }
        Ok(SipVector {
            space,
            entries: DVector::from_vec(entries),
        })
    }

    pub fn from_reals(space: SipSpace, entries: &[f64]) -> Result<Self> {
        Self::new(space, entries.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    pub fn zero(space: SipSpace) -> Self {
        SipVector {
            space,
            entries: DVector::zeros(space.dim()),
        }
    }

    pub fn space(&self) -> SipSpace {
        self.space
    }

    pub fn entries(&self) -> &DVector<C64> {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same_space(self, other)?;
        Ok(SipVector {
            space: self.space,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_space(self, other)?;
        Ok(SipVector {
            space: self.space,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, alpha: C64) -> Self {
        SipVector {
            space: self.space,
            entries: &self.entries * alpha,
        }
    }
}

fn check_same_space(f: &SipVector, g: &SipVector) -> Result<()> {
    if f.space != g.space {
        return Err(Error::SpaceMismatch {
            p_left: f.space.p(),
            p_right: g.space.p(),
            dim_left: f.space.dim(),
            dim_right: g.space.dim(),
        });
    }
    Ok(())
}

/// The `l^p` norm of a plain coefficient slice.
pub fn lp_norm_of(entries: &DVector<C64>, p: f64) -> f64 {
    entries.iter().map(|z| z.norm().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// The norm of `f` in its own space.
pub fn lp_norm(f: &SipVector) -> f64 {
    lp_norm_of(&f.entries, f.space.p())
}

/// The compatible semi-inner product on `l^p`:
///
/// `[f, g] = sum_i f_i conj(g_i) |g_i|^(p-2) / ||g||^(p-2)`, with
/// `[f, 0] = 0`.
///
/// Linear in `f`, with `[f, f] = ||f||^2` and `|[f, g]| <= ||f|| ||g||`.
/// In the second argument the map is homogeneous of conjugate type:
/// `[f, a g] = conj(a) [f, g]`, which restricts to plain scaling for real
/// `a`.
pub fn sip(f: &SipVector, g: &SipVector) -> Result<C64> {
    check_same_space(f, g)?;
    let p = f.space.p();
    let g_norm = lp_norm(g);
    if g_norm == 0.0 {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut acc = C64::new(0.0, 0.0);
    for (fi, gi) in f.entries.iter().zip(g.entries.iter()) {
        let mag = gi.norm();
        if mag == 0.0 {
            continue;
        }
        // conj(g_i) |g_i|^(p-2) written as phase times |g_i|^(p-1) so that
        // p < 2 cannot produce an infinity at small entries
        let phase = gi.conj() / mag;
        acc += fi * phase * mag.powf(p - 1.0);
    }
    Ok(acc / g_norm.powf(p - 2.0))
}

/// The norming functional induced by `f`, represented by its coefficient
/// vector in `l^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualFunctional {
    coefficients: DVector<C64>,
    q: f64,
}

impl DualFunctional {
    pub fn coefficients(&self) -> &DVector<C64> {
        &self.coefficients
    }

    pub fn conjugate_exponent(&self) -> f64 {
        self.q
    }

    /// Applies the functional to `g`. The action `g -> sum_i g_i w_i` is
    /// genuinely linear in `g`, unlike the semi-inner product.
    pub fn apply(&self, g: &SipVector) -> Result<C64> {
        if g.entries.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                got: g.entries.len(),
                context: "dual functional argument",
            });
        }
        Ok(g.entries
            .iter()
            .zip(self.coefficients.iter())
            .map(|(gi, wi)| gi * wi)
            .sum())
    }

    /// The `l^q` norm of the coefficient vector.
    pub fn dual_norm(&self) -> f64 {
        lp_norm_of(&self.coefficients, self.q)
    }
}

/// The duality map `f -> w` with
/// `w_i = conj(f_i) |f_i|^(p-2) / ||f||^(p-2)`, so that applying `w` to `g`
/// equals `[g, f]`.
pub fn duality_map(f: &SipVector) -> DualFunctional {
    let p = f.space.p();
    let q = f.space.conjugate_exponent();
    let f_norm = lp_norm(f);
    let mut w = DVector::zeros(f.entries.len());
    if f_norm > 0.0 {
        let scale = f_norm.powf(p - 2.0);
        for (i, fi) in f.entries.iter().enumerate() {
            let mag = fi.norm();
            if mag > 0.0 {
                w[i] = fi.conj() / mag * mag.powf(p - 1.0) / scale;
            }
        }
    }
    DualFunctional { coefficients: w, q }
}

/// Comparison of `||f||_p` with the `l^q` norm of its dual functional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualNormCheck {
    pub primal: f64,
    pub dual: f64,
    pub equal: bool,
}

/// Checks the isometry `|| duality_map(f) ||_q = || f ||_p`.
pub fn dual_norm_check(f: &SipVector, tol: &Tolerance) -> DualNormCheck {
    let primal = lp_norm(f);
    let dual = duality_map(f).dual_norm();
    DualNormCheck {
        primal,
        dual,
        equal: (primal - dual).abs() <= tol.abs_tol + tol.rel_tol * primal.abs().max(dual.abs()),
    }
}

/// Which scaling law the homogeneity check asserts in the second argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomogeneityForm {
    /// `[f, a g] = a [f, g]` over real `a`; the restriction of the
    /// conjugate law to real scalars
    RealScalars,
    /// `[f, a g] = conj(a) [f, g]` over complex `a`
    ConjugateComplexScalars,
}

/// Randomized audit of the semi-inner-product axioms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SipAxiomReport {
    pub p: f64,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// worst defect of linearity in the first argument
    pub linearity_defect: f64,
    /// true when `[f, f] > 0` held for every nonzero sample
    pub positivity_ok: bool,
    /// worst defect of the asserted homogeneity law in the second argument
    pub homogeneity_defect: f64,
    pub homogeneity_form: HomogeneityForm,
    /// worst defect of `[f, a g] = conj(a) [f, g]` over complex `a`,
    /// reported regardless of the asserted form
    pub conjugate_homogeneity_defect: f64,
    /// number of samples violating `|[f, g]| <= ||f|| ||g||` beyond
    /// tolerance
    pub cauchy_schwarz_violations: usize,
}

fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

fn random_vector(space: SipSpace, rng: &mut ChaCha8Rng) -> SipVector {
    let entries = (0..space.dim()).map(|_| random_c64(rng)).collect();
    SipVector::new(space, entries).expect("random entries are finite")
}

/// Samples the axioms of the semi-inner product on random vectors and
/// reports the worst defects seen.
pub fn sip_axiom_report(
    space: SipSpace,
    trials: usize,
    seed: u64,
    form: HomogeneityForm,
    tol: &Tolerance,
) -> Result<SipAxiomReport> {
    if trials == 0 {
        return Err(Error::EmptyInput("axiom audit trials"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut linearity_defect: f64 = 0.0;
    let mut positivity_ok = true;
    let mut homogeneity_defect: f64 = 0.0;
    let mut conjugate_defect: f64 = 0.0;
    let mut cs_violations = 0usize;
    for _ in 0..trials {
        let f = random_vector(space, &mut rng);
        let g = random_vector(space, &mut rng);
        let h = random_vector(space, &mut rng);
        let alpha = random_c64(&mut rng);
        let beta = random_c64(&mut rng);

        let combo = f.scale(alpha).add(&g.scale(beta))?;
        let lhs = sip(&combo, &h)?;
        let rhs = alpha * sip(&f, &h)? + beta * sip(&g, &h)?;
        linearity_defect = linearity_defect.max((lhs - rhs).norm());

        let ff = sip(&f, &f)?;
        let norm_sq = lp_norm(&f).powi(2);
        if norm_sq > 0.0 {
            let on_diagonal = ff.re > 0.0 && ff.im.abs() <= tol.abs_tol + tol.rel_tol * ff.re;
            let matches_norm =
                (ff.re - norm_sq).abs() <= tol.abs_tol + tol.rel_tol * norm_sq;
            if !(on_diagonal && matches_norm) {
                positivity_ok = false;
            }
        }

        let real_alpha = rng.gen_range(-2.0..=2.0);
        let scaled_real = g.scale(C64::new(real_alpha, 0.0));
        let real_defect = (sip(&f, &scaled_real)? - real_alpha * sip(&f, &g)?).norm();
        let scaled_complex = g.scale(alpha);
        let complex_defect = (sip(&f, &scaled_complex)? - alpha.conj() * sip(&f, &g)?).norm();
        conjugate_defect = conjugate_defect.max(complex_defect);
        homogeneity_defect = homogeneity_defect.max(match form {
            HomogeneityForm::RealScalars => real_defect,
            HomogeneityForm::ConjugateComplexScalars => complex_defect,
        });

        let bound = lp_norm(&f) * lp_norm(&g) + tol.abs_tol;
        if sip(&f, &g)?.norm() > bound {
            cs_violations += 1;
        }
    }
    Ok(SipAxiomReport {
        p: space.p(),
        dim: space.dim(),
        trials,
        seed,
        linearity_defect,
        positivity_ok,
        homogeneity_defect,
        homogeneity_form: form,
        conjugate_homogeneity_defect: conjugate_defect,
        cauchy_schwarz_violations: cs_violations,
    })
}

/// A discrete model of a Banach space of functions: a finite domain, values
/// in an `l^p` space, and a stacked `l^(p_b)` norm over the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct BanachSampleSpace {
    domain: Vec<Point>,
    value_space: SipSpace,
    p_b: f64,
}

impl BanachSampleSpace {
    pub fn new(domain: Vec<Point>, value_space: SipSpace, p_b: f64) -> Result<Self> {
        check_exponent(p_b)?;
        if domain.is_empty() {
            return Err(Error::EmptyInput("sample space domain"));
        }
        crate::kernels::common_dim(&domain)?;
        for (i, p) in domain.iter().enumerate() {
            for q in &domain[i + 1..] {
                if p == q {
                    return Err(Error::InvalidSpec(format!(
                        "domain points must be distinct, found {:?} twice",
                        p.coords()
                    )));
                }
            }
        }
        Ok(BanachSampleSpace {
            domain,
            value_space,
            p_b,
        })
    }

    pub fn domain(&self) -> &[Point] {
        &self.domain
    }

    pub fn value_space(&self) -> SipSpace {
        self.value_space
    }

    pub fn p_b(&self) -> f64 {
        self.p_b
    }

    fn index_of(&self, x: &Point) -> Result<usize> {
        self.domain
            .iter()
            .position(|p| p == x)
            .ok_or_else(|| Error::PointNotInDomain(x.coords().to_vec()))
    }

    /// Draws a function with independent complex entries uniform on the
    /// unit square.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> BanachFunctionSample {
        let values = self
            .domain
            .iter()
            .map(|_| random_vector(self.value_space, rng))
            .collect();
        BanachFunctionSample {
            space: self.clone(),
            values,
        }
    }

    /// A function supported at `x` only, with the given value there.
    pub fn indicator(&self, x: &Point, value: SipVector) -> Result<BanachFunctionSample> {
        let idx = self.index_of(x)?;
        if value.space() != self.value_space {
            return Err(Error::SpaceMismatch {
                p_left: self.value_space.p(),
                p_right: value.space().p(),
                dim_left: self.value_space.dim(),
                dim_right: value.space().dim(),
            });
        }
        let values = (0..self.domain.len())
            .map(|i| {
                if i == idx {
                    value.clone()
                } else {
                    SipVector::zero(self.value_space)
                }
            })
            .collect();
        Ok(BanachFunctionSample {
            space: self.clone(),
            values,
        })
    }

    /// Empirical norm of the point-evaluation map at `x`: the largest ratio
    /// `||f(x)|| / ||f||_B` over random draws plus structured candidates.
    ///
    /// For this discrete model the supremum is exactly 1: any function
    /// supported at `x` alone has `||f||_B = ||f(x)||`, and the stacked norm
    /// dominates every individual term, so no sample can push the ratio
    /// higher. The structured candidates (single active coordinate, then all
    /// coordinates equal) attain the supremum, so the estimate is exact and
    /// random draws can only confirm it.
    pub fn point_evaluation_norm(&self, x: &Point, trials: usize, seed: u64) -> Result<f64> {
        self.index_of(x)?;
        let mut best: f64 = 0.0;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..trials {
            let f = self.sample(&mut rng);
            let denom = f.b_norm();
            if denom > 1e-12 {
                best = best.max(lp_norm(f.value_at(x)?) / denom);
            }
        }
        for k in 0..self.value_space.dim() {
            let mut entries = vec![C64::new(0.0, 0.0); self.value_space.dim()];
            entries[k] = C64::new(1.0, 0.0);
            let f = self.indicator(x, SipVector::new(self.value_space, entries)?)?;
            best = best.max(lp_norm(f.value_at(x)?) / f.b_norm());
        }
        let ones = vec![C64::new(1.0, 0.0); self.value_space.dim()];
        let f = self.indicator(x, SipVector::new(self.value_space, ones)?)?;
        best = best.max(lp_norm(f.value_at(x)?) / f.b_norm());
        Ok(best)
    }
}

/// A function in a [`BanachSampleSpace`]: one value per domain point.
#[derive(Debug, Clone, PartialEq)]
pub struct BanachFunctionSample {
    space: BanachSampleSpace,
    values: Vec<SipVector>,
}

impl BanachFunctionSample {
    pub fn new(space: BanachSampleSpace, values: Vec<SipVector>) -> Result<Self> {
        if values.len() != space.domain.len() {
            return Err(Error::DimensionMismatch {
                expected: space.domain.len(),
                got: values.len(),
                context: "one value per domain point",
            });
        }
        for v in &values {
            if v.space() != space.value_space {
                return Err(Error::SpaceMismatch {
                    p_left: space.value_space.p(),
                    p_right: v.space().p(),
                    dim_left: space.value_space.dim(),
                    dim_right: v.space().dim(),
                });
            }
        }
        Ok(BanachFunctionSample { space, values })
    }

    pub fn space(&self) -> &BanachSampleSpace {
        &self.space
    }

    pub fn values(&self) -> &[SipVector] {
        &self.values
    }

    /// The value at a domain point; coordinates must match exactly.
    pub fn value_at(&self, x: &Point) -> Result<&SipVector> {
        Ok(&self.values[self.space.index_of(x)?])
    }

    /// The stacked norm `( sum_x ||f(x)||_p^(p_b) )^(1/p_b)`.
    pub fn b_norm(&self) -> f64 {
        let p_b = self.space.p_b;
        self.values
            .iter()
            .map(|v| lp_norm(v).powf(p_b))
            .sum::<f64>()
            .powf(1.0 / p_b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.space != other.space {
            return Err(Error::InvalidSpec(
                "samples live in different spaces".into(),
            ));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.space.clone(), values)
    }

    pub fn scale(&self, alpha: C64) -> Self {
        BanachFunctionSample {
            space: self.space.clone(),
            values: self.values.iter().map(|v| v.scale(alpha)).collect(),
        }
    }
}

/// The relative point evaluation `zeta(x, y) f = f(y) - f(x)`.
pub fn relative_evaluation(
    f: &BanachFunctionSample,
    x: &Point,
    y: &Point,
) -> Result<SipVector> {
    f.value_at(y)?.sub(f.value_at(x)?)
}

/// Upper bound `2^(1/q_b)` on the norm of the relative point evaluation for
/// matched exponents, where `q_b` is the conjugate of `p_b`.
pub fn zeta_bound(p_b: f64) -> Result<f64> {
    check_exponent(p_b)?;
    let q_b = p_b / (p_b - 1.0);
    Ok(2f64.powf(1.0 / q_b))
}
