//! Ladder search for the largest tolerable noise width.
//!
//! One run raises `σ` from zero in steps of `d_sigma`, evolving a fresh noisy
//! trajectory at every rung, and reports the first rung whose success
//! probability after `m_max` steps falls below `p_cut`. Many independent
//! runs are averaged, and the step-size bias of the first-crossing estimator
//! is removed by extrapolating `σ_max(dσ) = ζ + ξ·dσ^α` to `dσ → 0`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_shifted_power, ExtrapolationFit, WeightedPoint};
use crate::kernel::{initial_state, m_max, success_probability, ProblemSize};
use crate::noise::{derive_seed, noisy_step, NoiseConvention, NoiseSpec, RandomStream};

/// Reseeding attempts for a run that hits a degenerate state.
const MAX_RESEEDS: u64 = 8;

/// Parameters of one ladder cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderConfig {
    pub d_sigma: f64,
    pub p_cut: f64,
    pub runs: usize,
    pub master_seed: u64,
    pub sigma_ceiling: f64,
    pub convention: NoiseConvention,
}

impl LadderConfig {
    pub fn new(d_sigma: f64, p_cut: f64, runs: usize, master_seed: u64) -> Result<Self> {
        let cfg = Self {
            d_sigma,
            p_cut,
            runs,
            master_seed,
            sigma_ceiling: 1.0,
            convention: NoiseConvention::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_convention(mut self, convention: NoiseConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_ceiling(mut self, sigma_ceiling: f64) -> Self {
        self.sigma_ceiling = sigma_ceiling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.d_sigma > 0.0 && self.d_sigma <= 0.01) {
            return bad(format!("d_sigma must be in (0, 0.01], got {}", self.d_sigma));
        }
        if !(self.p_cut > 0.0 && self.p_cut < 1.0) {
            return bad(format!("p_cut must be in (0, 1), got {}", self.p_cut));
        }
        if self.runs == 0 {
            return bad("runs must be >= 1".into());
        }
        if !(self.sigma_ceiling.is_finite() && self.sigma_ceiling >= self.d_sigma) {
            return bad(format!(
                "sigma_ceiling must be finite and >= d_sigma, got {}",
                self.sigma_ceiling
            ));
        }
        Ok(())
    }
}

/// Result of one ladder run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderBreak {
    /// First rung with `P(m_max) < p_cut`.
    pub sigma_max: f64,
    /// `P(m_max)` observed at that rung.
    pub p_at_break: f64,
    /// Number of rungs evaluated.
    pub rungs: u64,
}

/// A ladder run together with the stream that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOutcome {
    pub run_index: usize,
    pub seed: u64,
    pub result: LadderBreak,
}

/// Mean and standard error of `σ_max` over the runs of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaMaxStat {
    pub mean: f64,
    /// Sample standard deviation over `√runs`; `None` for a single run.
    pub stderr: Option<f64>,
    pub runs: usize,
    pub d_sigma: f64,
}

/// Evolves the uniform state through `m_max` noisy steps and returns `|a|²`.
pub fn trajectory_success_probability(
    size: ProblemSize,
    spec: &NoiseSpec,
    rng: &mut RandomStream,
) -> Result<f64> {
    let mut state = initial_state(size);
    for _ in 0..m_max(size) {
        state = noisy_step(state, size, spec, rng)?;
    }
    Ok(state.probability())
}

/// One ladder sweep starting from `σ = 0`.
pub fn sigma_max_single_run(
    size: ProblemSize,
    ladder: &LadderConfig,
    rng: &mut RandomStream,
) -> Result<LadderBreak> {
    ladder.validate()?;
    let p_noiseless = success_probability(size, m_max(size));
    if p_noiseless < ladder.p_cut {
        return Err(Error::PCutUnreachable {
            p_cut: ladder.p_cut,
            p_noiseless,
        });
    }
    let last_rung = (ladder.sigma_ceiling / ladder.d_sigma * (1.0 + 1e-12)).floor() as u64;
    for rung in 1..=last_rung {
        let sigma = rung as f64 * ladder.d_sigma;
        let spec = NoiseSpec::new(sigma, ladder.convention)?;
        let p = trajectory_success_probability(size, &spec, rng)?;
        if p < ladder.p_cut {
            return Ok(LadderBreak {
                sigma_max: sigma,
                p_at_break: p,
                rungs: rung,
            });
        }
    }
    Err(Error::CeilingExceeded {
        ceiling: ladder.sigma_ceiling,
    })
}

/// Runs `ladder.runs` independent ladders in parallel. Run `i` uses the
/// stream seeded by `derive_seed(master_seed, i)`; a run that degenerates
/// is retried on a reseeded stream. Output is ordered by run index.
pub fn sigma_max_runs(size: ProblemSize, ladder: &LadderConfig) -> Result<Vec<RunOutcome>> {
    ladder.validate()?;
    (0..ladder.runs)
        .into_par_iter()
        .map(|run_index| {
            let base = derive_seed(ladder.master_seed, run_index as u64);
            let mut attempt = 0;
            loop {
                let seed = if attempt == 0 {
                    base
                } else {
                    derive_seed(base, attempt)
                };
                let mut rng = RandomStream::new(seed);
                match sigma_max_single_run(size, ladder, &mut rng) {
                    Ok(result) => {
                        return Ok(RunOutcome {
                            run_index,
                            seed,
                            result,
                        })
                    }
                    Err(Error::DegenerateState(_)) if attempt + 1 < MAX_RESEEDS => attempt += 1,
                    Err(e) => return Err(e),
                }
            }
        })
        .collect()
}

/// Mean and standard error, accumulated in slice order.
pub fn summarize(values: &[f64], d_sigma: f64) -> SigmaMaxStat {
    let runs = values.len();
    let mean = values.iter().sum::<f64>() / runs as f64;
    let stderr = (runs >= 2).then(|| {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
        (var / runs as f64).sqrt()
    });
    SigmaMaxStat {
        mean,
        stderr,
        runs,
        d_sigma,
    }
}

pub fn sigma_max_averaged(size: ProblemSize, ladder: &LadderConfig) -> Result<SigmaMaxStat> {
    let runs = sigma_max_runs(size, ladder)?;
    let values: Vec<f64> = runs.iter().map(|r| r.result.sigma_max).collect();
    Ok(summarize(&values, ladder.d_sigma))
}

/// Extrapolates cell means over a `dσ` ladder to zero step size.
///
/// Needs at least four distinct steps spanning two decades.
pub fn extrapolate_to_zero_step(stats: &[SigmaMaxStat]) -> Result<ExtrapolationFit> {
    let mut steps: Vec<f64> = stats.iter().map(|s| s.d_sigma).collect();
    steps.sort_by(f64::total_cmp);
    steps.dedup();
    if steps.len() < 4 {
        return Err(Error::TooFewPoints {
            need: 4,
            got: steps.len(),
        });
    }
    if steps[steps.len() - 1] / steps[0] < 100.0 * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(
            "d_sigma ladder must span at least two decades".into(),
        ));
    }
    let points: Vec<WeightedPoint> = stats
        .iter()
        .map(|s| WeightedPoint::new(s.d_sigma, s.mean, s.stderr.unwrap_or(0.0)))
        .collect();
    fit_shifted_power(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(n: u32) -> ProblemSize {
        ProblemSize::new(n).unwrap()
    }

    #[test]
    fn ladder_validation() {
        assert!(LadderConfig::new(0.0, 0.7, 10, 0).is_err());
        assert!(LadderConfig::new(0.02, 0.7, 10, 0).is_err());
        assert!(LadderConfig::new(1e-4, 1.0, 10, 0).is_err());
        assert!(LadderConfig::new(1e-4, 0.0, 10, 0).is_err());
        assert!(LadderConfig::new(1e-4, 0.7, 0, 0).is_err());
        assert!(LadderConfig::new(1e-4, 0.7, 1, 0).is_ok());
    }

    #[test]
    fn noiseless_trajectory_hits_peak() {
        let s = size(10);
        let mut rng = RandomStream::new(3);
        let p = trajectory_success_probability(s, &NoiseSpec::noiseless(), &mut rng).unwrap();
        assert!(p >= 0.999);
        assert!((p - success_probability(s, 25)).abs() < 1e-12);
    }

    #[test]
    fn huge_noise_destroys_the_signal() {
        let s = size(10);
        let spec = NoiseSpec::new(1.0, NoiseConvention::StandardDeviation).unwrap();
        let mean = (0..100)
            .map(|seed| {
                let mut rng = RandomStream::new(seed);
                trajectory_success_probability(s, &spec, &mut rng).unwrap()
            })
            .sum::<f64>()
            / 100.0;
        assert!(mean < 0.5, "mean={mean}");
    }

    #[test]
    fn trajectory_is_deterministic() {
        let s = size(11);
        let spec = NoiseSpec::new(0.002, NoiseConvention::StandardDeviation).unwrap();
        let a = trajectory_success_probability(s, &spec, &mut RandomStream::new(77)).unwrap();
        let b = trajectory_success_probability(s, &spec, &mut RandomStream::new(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_rung_break() {
        // p_cut just below the noiseless peak: any noise at all breaks it.
        let s = size(10);
        let p0 = success_probability(s, m_max(s));
        let ladder = LadderConfig::new(1e-3, p0 - 1e-9, 1, 0).unwrap();
        let out = sigma_max_single_run(s, &ladder, &mut RandomStream::new(1)).unwrap();
        assert_eq!(out.sigma_max, 1e-3);
        assert_eq!(out.rungs, 1);
    }

    #[test]
    fn unreachable_p_cut_is_a_config_error() {
        let s = size(10);
        let ladder = LadderConfig::new(1e-4, 0.99999, 1, 0).unwrap();
        let err = sigma_max_single_run(s, &ladder, &mut RandomStream::new(1)).unwrap_err();
        assert!(matches!(err, Error::PCutUnreachable { .. }));
        assert!(err.is_config());
    }

    #[test]
    fn ceiling_is_reported() {
        let s = size(10);
        let ladder = LadderConfig::new(1e-4, 1e-12, 1, 0).unwrap().with_ceiling(5e-4);
        let err = sigma_max_single_run(s, &ladder, &mut RandomStream::new(1)).unwrap_err();
        assert_eq!(err, Error::CeilingExceeded { ceiling: 5e-4 });
    }

    #[test]
    fn ladder_output_is_a_multiple_of_the_step() {
        let s = size(10);
        let ladder = LadderConfig::new(1e-4, 0.7, 30, 9).unwrap();
        for run in sigma_max_runs(s, &ladder).unwrap() {
            let k = run.result.sigma_max / ladder.d_sigma;
            assert!((k - k.round()).abs() < 1e-9 && k >= 1.0);
            assert_eq!(run.result.sigma_max, k.round() * ladder.d_sigma);
            assert!(run.result.sigma_max <= ladder.sigma_ceiling);
            assert!(run.result.p_at_break < ladder.p_cut);
        }
    }

    #[test]
    fn runs_are_independent_of_thread_count() {
        let s = size(10);
        let ladder = LadderConfig::new(1e-4, 0.7, 24, 2024).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sigma_max_averaged(s, &ladder)).unwrap();
        let b = four.install(|| sigma_max_averaged(s, &ladder)).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.unwrap().to_bits(), b.stderr.unwrap().to_bits());
    }

    #[test]
    fn identical_runs_have_zero_stderr() {
        let s = size(10);
        let ladder = LadderConfig::new(1e-4, 0.7, 2, 0).unwrap();
        let values: Vec<f64> = (0..2)
            .map(|_| {
                sigma_max_single_run(s, &ladder, &mut RandomStream::new(5))
                    .unwrap()
                    .sigma_max
            })
            .collect();
        let stat = summarize(&values, ladder.d_sigma);
        assert_eq!(stat.stderr, Some(0.0));
        assert_eq!(summarize(&values[..1], 1e-4).stderr, None);
    }

    #[test]
    fn extrapolation_preconditions() {
        let stat = |d_sigma, mean| SigmaMaxStat {
            mean,
            stderr: Some(1e-5),
            runs: 10,
            d_sigma,
        };
        let three = [stat(1e-4, 3e-3), stat(1e-5, 2e-3), stat(1e-6, 1.6e-3)];
        assert!(matches!(
            extrapolate_to_zero_step(&three),
            Err(Error::TooFewPoints { .. })
        ));
        let narrow = [stat(1e-4, 3e-3), stat(8e-5, 2.9e-3), stat(5e-5, 2.6e-3), stat(2e-5, 2.3e-3)];
        assert!(matches!(
            extrapolate_to_zero_step(&narrow),
            Err(Error::InvalidParameter(_))
        ));
        let exact: Vec<_> = [1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
            .iter()
            .map(|&d: &f64| stat(d, 0.5 + 2.0 * d.powf(0.3)))
            .collect();
        let fit = extrapolate_to_zero_step(&exact).unwrap();
        assert!((fit.zeta - 0.5).abs() < 1e-9);
        assert!((fit.xi - 2.0).abs() < 1e-9);
        assert!((fit.alpha_exp - 0.3).abs() < 1e-9);
    }
}
