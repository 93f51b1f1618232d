//! Seeded verification suites over the built-in kernel families.
//!
//! Each suite samples randomized instances of one identity and records the
//! worst defect seen together with the threshold it must stay under. Runs
//! are deterministic: a fixed seed and configuration produce an identical
//! report, byte for byte. The fault hook deliberately corrupts the Gram
//! assembly inside the positivity suite so that failure reporting can be
//! exercised end to end.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{hermitian_distance_raw, C64, OutVector, Point, Tolerance};
use crate::error::Result;
use crate::kernels::{build_kernel, gram, BaseKernel, Kernel, KernelSpec, OperatorKernel};
use crate::linalg;
use crate::relative::{
    cocycle_defect, cocycle_probe_points, containment_residual, fit_differences,
    DifferenceConstraint, RelativeElement, RelativeSection,
};
use crate::rkhs::{self, RkhsElement};
use crate::sip::{
    dual_norm_check, lp_norm, relative_evaluation, sip, BanachSampleSpace, SipSpace, SipVector,
};

/// Deliberate defects for exercising failure paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// adds a one-sided perturbation to the assembled Gram matrix, breaking
    /// its symmetry
    AsymmetricGram,
}

/// Trial counts and settings for one verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: Tolerance,
    /// random point sets per kernel family in the positivity suite
    pub psd_point_sets: usize,
    pub reproducing_trials: usize,
    pub adjoint_trials: usize,
    /// random triples per kernel family in the cocycle suite
    pub cocycle_triples: usize,
    pub containment_trials: usize,
    pub difference_fit_trials: usize,
    /// random pairs per exponent in the semi-inner-product suites
    pub sip_pair_trials: usize,
    /// random vectors per exponent in the duality suite
    pub sip_dual_trials: usize,
    pub p2_trials: usize,
    pub zeta_trials: usize,
    pub fault: Option<Fault>,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        VerifyConfig {
            seed,
            tol: Tolerance::default(),
            psd_point_sets: 100,
            reproducing_trials: 100,
            adjoint_trials: 100,
            cocycle_triples: 100,
            containment_trials: 100,
            difference_fit_trials: 100,
            sip_pair_trials: 10_000,
            sip_dual_trials: 1_000,
            p2_trials: 1_000,
            zeta_trials: 1_000,
            fault: None,
        }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub trials: usize,
    pub max_defect: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(name: &str, trials: usize, max_defect: f64, threshold: f64) -> Self {
        SuiteResult {
            name: name.to_string(),
            trials,
            max_defect,
            threshold,
            pass: max_defect <= threshold,
        }
    }
}

/// Full report of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub all_pass: bool,
}

impl VerifyReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The first failing suite, if any.
    pub fn first_failure(&self) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| !s.pass)
    }
}

/// The built-in kernel families exercised by the suites: every base kernel
/// and every structural variant, with output dimensions up to 4.
pub fn builtin_kernel_specs() -> Vec<(&'static str, KernelSpec)> {
    let gaussian = |gamma, m| KernelSpec::scalar_times_identity(BaseKernel::Gaussian { gamma }, m);
    let laplacian =
        |gamma, m| KernelSpec::scalar_times_identity(BaseKernel::Laplacian { gamma }, m);
    let mixing = crate::base::OpMatrix::from_rows(&[
        vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)],
        vec![C64::new(0.0, -1.0), C64::new(3.0, 0.0)],
    ])
    .expect("square");
    vec![
        ("gaussian_m1", gaussian(1.0, 1)),
        ("gaussian_m2", gaussian(0.5, 2)),
        ("gaussian_m4", gaussian(2.0, 4)),
        ("laplacian_m2", laplacian(1.0, 2)),
        (
            "linear_m1",
            KernelSpec::scalar_times_identity(BaseKernel::Linear, 1),
        ),
        (
            "polynomial_m1",
            KernelSpec::scalar_times_identity(
                BaseKernel::Polynomial {
                    degree: 2,
                    offset: 1.0,
                },
                1,
            ),
        ),
        (
            "separable_gaussian_m2",
            KernelSpec::separable(BaseKernel::Gaussian { gamma: 1.0 }, &mixing),
        ),
        (
            "sum_gaussian_laplacian_m2",
            KernelSpec::sum(vec![gaussian(1.0, 2), laplacian(0.5, 2)]),
        ),
        ("scaled_gaussian_m3", KernelSpec::scaled(2.5, gaussian(1.0, 3))),
        (
            "product_diagonal_m2",
            KernelSpec::pointwise_product_diagonal(vec![
                gaussian(1.0, 2),
                KernelSpec::scalar_times_identity(
                    BaseKernel::Polynomial {
                        degree: 1,
                        offset: 1.0,
                    },
                    2,
                ),
            ]),
        ),
    ]
}

fn built_kernels() -> Vec<(&'static str, Kernel)> {
    builtin_kernel_specs()
        .into_iter()
        .map(|(name, spec)| (name, build_kernel(&spec).expect("built-in specs are valid")))
        .collect()
}

fn suite_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (ordinal.wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Point {
    let coords = (0..d).map(|_| rng.gen_range(-2.0..=2.0)).collect();
    Point::new(coords).expect("finite coordinates")
}

fn random_out_vector(rng: &mut ChaCha8Rng, m: usize) -> OutVector {
    let entries = (0..m)
        .map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    OutVector::new(entries).expect("finite entries")
}

fn random_span(rng: &mut ChaCha8Rng, kernel: &Kernel, d: usize, max_terms: usize) -> RkhsElement {
    let s = rng.gen_range(1..=max_terms);
    let centers = (0..s).map(|_| random_point(rng, d)).collect();
    let coefficients = (0..s)
        .map(|_| random_out_vector(rng, kernel.output_dim()))
        .collect();
    RkhsElement::new(kernel.clone(), centers, coefficients).expect("consistent dimensions")
}

fn random_relative_span(
    rng: &mut ChaCha8Rng,
    kernel: &Kernel,
    d: usize,
    max_terms: usize,
) -> RelativeElement {
    let s = rng.gen_range(1..=max_terms);
    let pairs: Vec<(Point, Point)> = (0..s)
        .map(|_| (random_point(rng, d), random_point(rng, d)))
        .collect();
    let coefficients = (0..s)
        .map(|_| random_out_vector(rng, kernel.output_dim()))
        .collect();
    RelativeElement::from_pairs(kernel.clone(), &pairs, coefficients)
        .expect("consistent dimensions")
}

const SIP_EXPONENTS: [f64; 4] = [1.5, 2.0, 3.0, 4.0];

fn psd_suite(config: &VerifyConfig, kernels: &[(&'static str, Kernel)]) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 1);
    let mut max_defect: f64 = 0.0;
    let mut trials = 0usize;
    for (_, kernel) in kernels {
        for _ in 0..config.psd_point_sets {
            let n = rng.gen_range(2..=12);
            let d = rng.gen_range(1..=3);
            let points: Vec<Point> = (0..n).map(|_| random_point(&mut rng, d)).collect();
            let mut g = gram(kernel, &points)?;
            if config.fault == Some(Fault::AsymmetricGram) {
                g[(0, 1)] += C64::new(1e-3, 0.0);
            }
            let herm = hermitian_distance_raw(&g);
            let min_eig = linalg::min_eigenvalue(&g);
            let normalized = (-min_eig / g.nrows() as f64).max(0.0);
            max_defect = max_defect.max(herm).max(normalized);
            trials += 1;
        }
    }
    Ok(SuiteResult::new("psd", trials, max_defect, 1e-8))
}

fn reproducing_suite(
    config: &VerifyConfig,
    kernels: &[(&'static str, Kernel)],
) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 2);
    let mut max_defect: f64 = 0.0;
    for trial in 0..config.reproducing_trials {
        let (_, kernel) = &kernels[trial % kernels.len()];
        let d = rng.gen_range(1..=3);
        let f = random_span(&mut rng, kernel, d, 5);
        let x = random_point(&mut rng, d);
        let y = random_out_vector(&mut rng, kernel.output_dim());
        let section = RkhsElement::section(kernel.clone(), x.clone(), y.clone())?;
        let lhs = rkhs::inner_product(&f, &section)?;
        let rhs = f.evaluate(&x)?.inner(&y);
        max_defect = max_defect.max((lhs - rhs).norm());
    }
    Ok(SuiteResult::new(
        "reproducing",
        config.reproducing_trials,
        max_defect,
        1e-9,
    ))
}

fn relative_adjoint_suite(
    config: &VerifyConfig,
    kernels: &[(&'static str, Kernel)],
) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 3);
    let mut max_defect: f64 = 0.0;
    for trial in 0..config.adjoint_trials {
        let (_, kernel) = &kernels[trial % kernels.len()];
        let m = kernel.output_dim();
        let d = rng.gen_range(1..=3);
        let f = random_span(&mut rng, kernel, d, 6);
        let x = random_point(&mut rng, d);
        let y = random_point(&mut rng, d);
        let section = RelativeSection::new(kernel.clone(), x.clone(), y.clone())?;
        let diff = section.adjoint(&f)?;
        for i in 0..m {
            let e_i = OutVector::basis(m, i);
            let paired = rkhs::inner_product(&f, &section.expand(&e_i)?)?;
            max_defect = max_defect.max((paired - diff.entries()[i]).norm());
        }
    }
    Ok(SuiteResult::new(
        "relative_adjoint",
        config.adjoint_trials,
        max_defect,
        1e-9,
    ))
}

fn cocycle_suite(config: &VerifyConfig, kernels: &[(&'static str, Kernel)]) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 4);
    let mut max_defect: f64 = 0.0;
    let mut trials = 0usize;
    for (_, kernel) in kernels {
        for _ in 0..config.cocycle_triples {
            let d = rng.gen_range(1..=3);
            let x1 = random_point(&mut rng, d);
            let x2 = random_point(&mut rng, d);
            let x3 = random_point(&mut rng, d);
            let u = random_out_vector(&mut rng, kernel.output_dim());
            let probe_seed = rng.gen();
            let probes = cocycle_probe_points(&x1, &x2, &x3, 10, probe_seed)?;
            let defect = cocycle_defect(kernel, &x1, &x2, &x3, &u, &probes)?;
            max_defect = max_defect.max(defect);
            trials += 1;
        }
    }
    Ok(SuiteResult::new("cocycle", trials, max_defect, 1e-10))
}

fn containment_suite(
    config: &VerifyConfig,
    kernels: &[(&'static str, Kernel)],
) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 5);
    let mut max_defect: f64 = 0.0;
    for trial in 0..config.containment_trials {
        let (_, kernel) = &kernels[trial % kernels.len()];
        let d = rng.gen_range(1..=3);
        let g = random_relative_span(&mut rng, kernel, d, 4);
        max_defect = max_defect.max(containment_residual(&g)?);
    }
    Ok(SuiteResult::new(
        "containment",
        config.containment_trials,
        max_defect,
        1e-10,
    ))
}

fn norm_embedding_suite(
    config: &VerifyConfig,
    kernels: &[(&'static str, Kernel)],
) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 6);
    let mut max_defect: f64 = 0.0;
    for trial in 0..config.containment_trials {
        let (_, kernel) = &kernels[trial % kernels.len()];
        let d = rng.gen_range(1..=3);
        let g = random_relative_span(&mut rng, kernel, d, 4);
        let relative_norm = g.norm()?;
        let ambient_norm = rkhs::norm(&g.expand()?)?;
        let scale = relative_norm.max(ambient_norm).max(1.0);
        max_defect = max_defect.max((relative_norm - ambient_norm).abs() / scale);
    }
    Ok(SuiteResult::new(
        "norm_embedding",
        config.containment_trials,
        max_defect,
        1e-8,
    ))
}

fn difference_fit_suite(
    config: &VerifyConfig,
    kernels: &[(&'static str, Kernel)],
) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 7);
    // restrict to strictly positive definite families so the fits stay
    // well-posed for generic point draws
    let fit_families: Vec<&(&'static str, Kernel)> = kernels
        .iter()
        .filter(|(name, _)| {
            matches!(
                *name,
                "gaussian_m1" | "gaussian_m2" | "laplacian_m2" | "separable_gaussian_m2"
            )
        })
        .collect();
    let mut max_defect: f64 = 0.0;
    for trial in 0..config.difference_fit_trials {
        let (_, kernel) = fit_families[trial % fit_families.len()];
        let d = rng.gen_range(1..=3);
        // prescribe differences sampled from an ambient element so that the
        // constraint set is consistent by construction
        let f = random_span(&mut rng, kernel, d, 4);
        let s = rng.gen_range(1..=8);
        let constraints = (0..s)
            .map(|_| {
                let x = random_point(&mut rng, d);
                let y = random_point(&mut rng, d);
                let delta = f.evaluate(&y)?.sub(&f.evaluate(&x)?);
                Ok(DifferenceConstraint::new(x, y, delta))
            })
            .collect::<Result<Vec<_>>>()?;
        let fit = fit_differences(kernel, &constraints, 0.0)?;
        for c in &constraints {
            let got = fit.element.difference(&c.x, &c.y)?;
            max_defect = max_defect.max(got.sub(&c.delta).norm());
        }
    }
    Ok(SuiteResult::new(
        "difference_fit",
        config.difference_fit_trials,
        max_defect,
        1e-8,
    ))
}

fn random_sip_vector(rng: &mut ChaCha8Rng, space: SipSpace) -> SipVector {
    let entries = (0..space.dim())
        .map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    SipVector::new(space, entries).expect("finite entries")
}

fn sip_compatibility_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 8);
    let mut max_defect: f64 = 0.0;
    let mut trials = 0usize;
    for &p in &SIP_EXPONENTS {
        for _ in 0..config.sip_pair_trials {
            let dim = rng.gen_range(2..=6);
            let space = SipSpace::new(p, dim)?;
            let f = random_sip_vector(&mut rng, space);
            let ff = sip(&f, &f)?;
            let norm_sq = lp_norm(&f).powi(2);
            max_defect = max_defect
                .max((ff.re - norm_sq).abs())
                .max(ff.im.abs());
            trials += 1;
        }
    }
    Ok(SuiteResult::new(
        "sip_compatibility",
        trials,
        max_defect,
        1e-10,
    ))
}

fn sip_cauchy_schwarz_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 9);
    let mut violations = 0usize;
    let mut trials = 0usize;
    for &p in &SIP_EXPONENTS {
        for _ in 0..config.sip_pair_trials {
            let dim = rng.gen_range(2..=6);
            let space = SipSpace::new(p, dim)?;
            let f = random_sip_vector(&mut rng, space);
            let g = random_sip_vector(&mut rng, space);
            if sip(&f, &g)?.norm() > lp_norm(&f) * lp_norm(&g) + config.tol.abs_tol {
                violations += 1;
            }
            trials += 1;
        }
    }
    Ok(SuiteResult::new(
        "sip_cauchy_schwarz",
        trials,
        violations as f64,
        0.0,
    ))
}

fn sip_duality_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 10);
    let mut max_defect: f64 = 0.0;
    let mut trials = 0usize;
    for &p in &SIP_EXPONENTS {
        for _ in 0..config.sip_dual_trials {
            let dim = rng.gen_range(2..=6);
            let space = SipSpace::new(p, dim)?;
            let f = random_sip_vector(&mut rng, space);
            let check = dual_norm_check(&f, &config.tol);
            max_defect = max_defect.max((check.primal - check.dual).abs());
            trials += 1;
        }
    }
    Ok(SuiteResult::new("sip_duality", trials, max_defect, 1e-9))
}

fn sip_p2_reduction_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 11);
    let mut max_defect: f64 = 0.0;
    for _ in 0..config.p2_trials {
        let dim = rng.gen_range(2..=6);
        let space = SipSpace::new(2.0, dim)?;
        let f = random_sip_vector(&mut rng, space);
        let g = random_sip_vector(&mut rng, space);
        let euclidean: C64 = f
            .entries()
            .iter()
            .zip(g.entries().iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        max_defect = max_defect.max((sip(&f, &g)? - euclidean).norm());
    }
    Ok(SuiteResult::new(
        "sip_p2_reduction",
        config.p2_trials,
        max_defect,
        1e-12,
    ))
}

fn random_banach_space(rng: &mut ChaCha8Rng) -> Result<BanachSampleSpace> {
    let p = SIP_EXPONENTS[rng.gen_range(0..SIP_EXPONENTS.len())];
    let mu = rng.gen_range(2..=4);
    let n = rng.gen_range(3..=6);
    let domain = (0..n)
        .map(|i| Point::new(vec![i as f64]).expect("finite"))
        .collect();
    BanachSampleSpace::new(domain, SipSpace::new(p, mu)?, p)
}

fn zeta_telescoping_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 12);
    let mut max_defect: f64 = 0.0;
    for _ in 0..config.zeta_trials {
        let space = random_banach_space(&mut rng)?;
        let f = space.sample(&mut rng);
        let g = space.sample(&mut rng);
        let alpha = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let idx = |k: usize| space.domain()[k].clone();
        let (x1, x2, x3) = (idx(0), idx(1), idx(2));

        let combo = f.scale(alpha).add(&g)?;
        let lhs = relative_evaluation(&combo, &x1, &x2)?;
        let rhs = relative_evaluation(&f, &x1, &x2)?
            .scale(alpha)
            .add(&relative_evaluation(&g, &x1, &x2)?)?;
        max_defect = max_defect.max(lp_norm(&lhs.sub(&rhs)?));

        let chain = relative_evaluation(&f, &x1, &x2)?
            .add(&relative_evaluation(&f, &x2, &x3)?)?;
        let direct = relative_evaluation(&f, &x1, &x3)?;
        max_defect = max_defect.max(lp_norm(&chain.sub(&direct)?));
    }
    Ok(SuiteResult::new(
        "zeta_telescoping",
        config.zeta_trials,
        max_defect,
        1e-12,
    ))
}

fn zeta_boundedness_suite(config: &VerifyConfig) -> Result<SuiteResult> {
    let mut rng = suite_rng(config.seed, 13);
    let mut max_ratio: f64 = 0.0;
    for _ in 0..config.zeta_trials {
        let space = random_banach_space(&mut rng)?;
        let f = space.sample(&mut rng);
        let denom = f.b_norm();
        if denom < 1e-9 {
            continue;
        }
        let x = space.domain()[0].clone();
        let y = space.domain()[space.domain().len() - 1].clone();
        let z = relative_evaluation(&f, &x, &y)?;
        max_ratio = max_ratio.max(lp_norm(&z) / denom);
    }
    Ok(SuiteResult::new(
        "zeta_boundedness",
        config.zeta_trials,
        max_ratio,
        2.0,
    ))
}

/// Runs every suite and collects the report.
pub fn run_verify(config: &VerifyConfig) -> Result<VerifyReport> {
    let kernels = built_kernels();
    let suites = vec![
        psd_suite(config, &kernels)?,
        reproducing_suite(config, &kernels)?,
        relative_adjoint_suite(config, &kernels)?,
        cocycle_suite(config, &kernels)?,
        containment_suite(config, &kernels)?,
        norm_embedding_suite(config, &kernels)?,
        difference_fit_suite(config, &kernels)?,
        sip_compatibility_suite(config)?,
        sip_cauchy_schwarz_suite(config)?,
        sip_duality_suite(config)?,
        sip_p2_reduction_suite(config)?,
        zeta_telescoping_suite(config)?,
        zeta_boundedness_suite(config)?,
    ];
    let all_pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport {
        seed: config.seed,
        suites,
        all_pass,
    })
}
