//! Randomized law suites for the differential and integral operators.
//!
//! Every algebraic identity exposed by this crate is backed by a seeded
//! property suite.  A suite draws random inputs (polynomials, expressions,
//! one-forms, linear maps), checks one family of identities per trial, and
//! aggregates the outcomes into a [`LawReport`].
//!
//! Two modes are available:
//!
//! * [`Mode::Poly`] — identities are checked by exact rational arithmetic on
//!   polynomials; any nonzero difference is a failure and `worst_error`
//!   reports the largest coefficient of the difference.
//! * [`Mode::Smooth`] — identities are checked pointwise on random sample
//!   points in `[-1, 1]^n`; deviations are scaled by the magnitude of the
//!   values being compared, and quadrature that fails to converge marks the
//!   trial inconclusive rather than failed.
//!
//! Suites are deterministic: the per-trial RNG stream depends only on the
//! configured seed and the trial index, and trial outcomes are folded in
//! trial order even though trials run in parallel.

mod generators;
mod poly_suites;
mod smooth_suites;

pub use generators::{
    gen_expr, gen_matrix, gen_poly, gen_poly_one_form, gen_rational_matrix, gen_smooth_one_form,
    sample_dimension, sample_points,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::quad::QuadConfig;

/// Controls the shape of randomly generated inputs.
#[derive(Debug, Clone)]
pub struct GenConfig {
    /// Smallest ambient dimension to sample (inclusive).
    pub dim_min: usize,
    /// Largest ambient dimension to sample (inclusive).
    pub dim_max: usize,
    /// Maximum total degree of generated polynomials.
    pub max_degree: usize,
    /// Maximum number of terms in a generated polynomial.
    pub max_terms: usize,
    /// Maximum nesting depth of generated expressions.
    pub max_depth: usize,
    /// Absolute bound on integer numerators of generated coefficients.
    pub coeff_bound: i64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            dim_min: 1,
            dim_max: 3,
            max_degree: 6,
            max_terms: 6,
            max_depth: 5,
            coeff_bound: 4,
        }
    }
}

/// Runtime parameters of a suite run.
#[derive(Debug, Clone)]
pub struct TrialConfig {
    /// Base seed; trial `i` derives its own RNG stream from this.
    pub seed: u64,
    /// Number of independent trials.
    pub trials: u32,
    /// Sample points per trial (smooth mode only).
    pub points: usize,
    /// Comparison tolerance; `None` selects a per-suite default.
    pub tol: Option<f64>,
    /// Quadrature settings used by integral operators in smooth mode.
    pub quad: QuadConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            seed: 0,
            trials: 100,
            points: 10,
            tol: None,
            quad: QuadConfig::default(),
        }
    }
}

/// Arithmetic backend a suite runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact rational arithmetic on polynomials.
    Poly,
    /// Floating-point evaluation of expressions, with quadrature.
    Smooth,
}

impl Mode {
    /// Stable identifier used in reports ("poly-exact" / "smooth-numeric").
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Poly => "poly-exact",
            Mode::Smooth => "smooth-numeric",
        }
    }
}

/// One family of identities checked together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Constants, Leibniz rule, linearity, symmetry of second derivatives.
    DAxioms,
    /// Action on generator differentials and the shuffle-style product rule
    /// of the integral transformation.
    SAxioms,
    /// Fundamental identity `s(df)(v) + f(0) = f(v)` and exactness of
    /// closed forms in the image of `d`.
    Calculus,
    /// Order independence of slot-wise integration of two-tensors.
    Interchange,
    /// The origin-derivative functional: vanishing on constants, product
    /// rule, coordinate normalization, chain rule.
    Epsilon,
    /// Compatibility of `d` and `s` with linear substitutions.
    Naturality,
    /// Agreement of the polynomial and expression backends on embedded
    /// polynomials.
    LambdaCompat,
    /// Chain rule for `d` under composition.
    Chain,
    /// Invertibility of the degree-style operators and the factorizations
    /// of the integral transformation through them.
    Inverses,
    /// Rota–Baxter identity for the averaging operator and
    /// multiplicativity on the double product.
    RotaBaxter,
    /// Square-zero extension: composition and product laws for the induced
    /// tangent maps.
    Derivation,
    /// Deliberately wrong integral rule; the suite passes only if trials
    /// detect the discrepancy.
    NegativeControl,
}

impl Suite {
    /// All suites, in canonical order.
    pub fn all() -> [Suite; 12] {
        [
            Suite::DAxioms,
            Suite::SAxioms,
            Suite::Calculus,
            Suite::Interchange,
            Suite::Epsilon,
            Suite::Naturality,
            Suite::LambdaCompat,
            Suite::Chain,
            Suite::Inverses,
            Suite::RotaBaxter,
            Suite::Derivation,
            Suite::NegativeControl,
        ]
    }

    /// Stable identifier of this suite.
    pub fn id(self) -> &'static str {
        match self {
            Suite::DAxioms => "d-axioms",
            Suite::SAxioms => "s-axioms",
            Suite::Calculus => "calculus",
            Suite::Interchange => "interchange",
            Suite::Epsilon => "epsilon",
            Suite::Naturality => "naturality",
            Suite::LambdaCompat => "lambda-compat",
            Suite::Chain => "chain",
            Suite::Inverses => "inverses",
            Suite::RotaBaxter => "rota-baxter",
            Suite::Derivation => "derivation",
            Suite::NegativeControl => "negative-control",
        }
    }

    /// Looks a suite up by its identifier.
    pub fn from_id(id: &str) -> Option<Suite> {
        Suite::all().into_iter().find(|s| s.id() == id)
    }

    /// Whether this suite is implemented for the given mode.
    ///
    /// The origin-derivative, square-zero, and backend-agreement suites
    /// only exist in smooth mode; the negative control targets the broken
    /// polynomial integral rule and only exists in poly mode.
    pub fn available_in(self, mode: Mode) -> bool {
        match (self, mode) {
            (Suite::Epsilon | Suite::Derivation | Suite::LambdaCompat, Mode::Poly) => false,
            (Suite::NegativeControl, Mode::Smooth) => false,
            _ => true,
        }
    }

    /// Suites available in the given mode, in canonical order.
    pub fn all_for(mode: Mode) -> Vec<Suite> {
        Suite::all()
            .into_iter()
            .filter(|s| s.available_in(mode))
            .collect()
    }

    /// Default comparison tolerance for smooth-mode pointwise checks.
    pub fn default_tolerance(self) -> f64 {
        match self {
            Suite::DAxioms => 1e-9,
            Suite::SAxioms => 1e-8,
            Suite::Calculus => 1e-7,
            Suite::Interchange => 1e-8,
            Suite::Epsilon => 1e-8,
            Suite::Naturality => 1e-9,
            Suite::LambdaCompat => 1e-9,
            Suite::Chain => 1e-9,
            Suite::Inverses => 1e-7,
            Suite::RotaBaxter => 1e-8,
            Suite::Derivation => 1e-9,
            Suite::NegativeControl => 1e-8,
        }
    }
}

/// Errors reported by [`run_suite`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LawsError {
    /// The requested suite does not exist in the requested mode.
    #[error("suite '{suite}' is not available in {mode} mode")]
    Unavailable {
        /// Identifier of the requested suite.
        suite: &'static str,
        /// Identifier of the requested mode.
        mode: &'static str,
    },
}

/// Aggregated result of one suite run.
#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    /// Suite identifier.
    pub law: String,
    /// Mode identifier ("poly-exact" / "smooth-numeric").
    pub mode: String,
    /// Base seed the run used.
    pub seed: u64,
    /// Number of trials executed.
    pub trials: u32,
    /// Trials on which an identity was violated.
    pub failures: u32,
    /// Trials that could not be decided (quadrature did not converge or
    /// evaluation overflowed).
    pub inconclusive: u32,
    /// Largest deviation observed across all trials.  Exact zero in poly
    /// mode unless a failure occurred.
    pub worst_error: f64,
    /// Always zero in canonical reports so that equal-seed runs are
    /// byte-identical; wall-clock time is reported separately by callers
    /// that want it.
    pub elapsed_ms: u64,
}

/// Fraction of trials allowed to be inconclusive before a suite is deemed
/// failed (5%).
pub const INCONCLUSIVE_CAP: f64 = 0.05;

impl LawReport {
    /// Whether the suite passed.
    ///
    /// Ordinary suites pass when no trial failed and at most 5% of trials
    /// were inconclusive.  The negative control inverts the first clause:
    /// it passes only when at least one trial detected the planted bug.
    pub fn passed(&self) -> bool {
        let cap = (f64::from(self.trials) * INCONCLUSIVE_CAP).floor() as u32;
        if self.inconclusive > cap {
            return false;
        }
        if self.law == Suite::NegativeControl.id() {
            self.failures > 0
        } else {
            self.failures == 0
        }
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub failed: bool,
    pub inconclusive: bool,
    pub error: f64,
}

impl Outcome {
    pub(crate) fn pass(error: f64) -> Outcome {
        Outcome {
            failed: false,
            inconclusive: false,
            error,
        }
    }

    pub(crate) fn fail(error: f64) -> Outcome {
        Outcome {
            failed: true,
            inconclusive: false,
            error,
        }
    }

    pub(crate) fn inconclusive() -> Outcome {
        Outcome {
            failed: false,
            inconclusive: true,
            error: 0.0,
        }
    }

    /// Combines the outcome of several checks within one trial.
    pub(crate) fn merge(self, other: Outcome) -> Outcome {
        Outcome {
            failed: self.failed || other.failed,
            inconclusive: self.inconclusive || other.inconclusive,
            error: self.error.max(other.error),
        }
    }
}

/// Shared per-trial context for smooth-mode suites.
pub(crate) struct SmoothCtx<'a> {
    pub gen: &'a GenConfig,
    pub points: usize,
    pub tol: f64,
    pub quad: &'a QuadConfig,
}

const TRIAL_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// RNG stream for trial `index` of a run seeded with `seed`.
fn trial_rng(seed: u64, index: u32) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(u64::from(index).wrapping_mul(TRIAL_STRIDE)))
}

/// Runs one suite and aggregates its trials into a report.
///
/// Trials execute in parallel but outcomes are folded in trial order, so
/// reports depend only on the configuration.
pub fn run_suite(
    suite: Suite,
    mode: Mode,
    trial: &TrialConfig,
    gen: &GenConfig,
) -> Result<LawReport, LawsError> {
    if !suite.available_in(mode) {
        return Err(LawsError::Unavailable {
            suite: suite.id(),
            mode: mode.as_str(),
        });
    }
    let tol = trial.tol.unwrap_or_else(|| suite.default_tolerance());
    let outcomes: Vec<Outcome> = (0..trial.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(trial.seed, i);
            match mode {
                Mode::Poly => poly_suites::run_trial(suite, &mut rng, gen),
                Mode::Smooth => {
                    let ctx = SmoothCtx {
                        gen,
                        points: trial.points,
                        tol,
                        quad: &trial.quad,
                    };
                    smooth_suites::run_trial(suite, &mut rng, &ctx)
                }
            }
        })
        .collect();

    let mut failures = 0u32;
    let mut inconclusive = 0u32;
    let mut worst_error = 0.0f64;
    for outcome in &outcomes {
        if outcome.failed {
            failures += 1;
        }
        if outcome.inconclusive {
            inconclusive += 1;
        }
        worst_error = worst_error.max(outcome.error);
    }

    Ok(LawReport {
        law: suite.id().to_string(),
        mode: mode.as_str().to_string(),
        seed: trial.seed,
        trials: trial.trials,
        failures,
        inconclusive,
        worst_error,
        elapsed_ms: 0,
    })
}

/// Serializes reports to a deterministic, pretty-printed JSON array.
pub fn reports_json(reports: &[LawReport]) -> String {
    serde_json::to_string_pretty(reports).expect("law reports serialize to JSON")
}
