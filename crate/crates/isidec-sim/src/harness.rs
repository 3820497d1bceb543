//! Paired Monte Carlo experiments: every decoder sees the same codebook and
//! the same noise realization in each trial, so decoder comparisons are
//! paired and the whole experiment is a pure function of `(config, seed)`.
//!
//! Trials are independent given their derived child seeds; the orchestrator
//! may run any number of them concurrently and the aggregation is
//! order-independent.

use std::time::Instant;

use rayon::prelude::*;

use isidec_core::channel::{transmit, transmit_with_interference, ChannelParams};
use isidec_core::decoder::{decode, delta_error_event, DecodeRule};
use isidec_core::ensemble::{generate_codebook_sized, Codebook};
use isidec_core::rng::{derive, Rng};

use crate::config::{ExperimentConfig, ResolvedRun, UniversalRule};
use crate::error::SimError;

const TAG_CODEBOOK: u64 = 0;
const TAG_NOISE: u64 = 1;
const TAG_FIXED_CODEBOOK: u64 = 0xF1ED;

/// 97.5% normal quantile, for 95% Wilson intervals.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Per-trial correctness record for every configured decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub ml_error: bool,
    pub universal_error: bool,
    /// One event per entry of `delta_list`, in config order.
    pub delta_errors: Vec<bool>,
    /// Interference-aware universal decoder, when configured.
    pub aware_error: Option<bool>,
    /// Set when a decoder failed numerically; the trial is excluded from
    /// counts and reported.
    pub invalid: Option<String>,
}

/// Seed of the per-`n` stream within an experiment.
pub fn run_stream_seed(run: &ResolvedRun) -> u64 {
    derive(run.root_seed, run.n as u64)
}

/// Runs one trial: fresh codebook (unless one is shared), transmit codeword
/// 0, decode with every configured rule on the identical received block.
pub fn run_trial(run: &ResolvedRun, shared: Option<&Codebook>, trial: u64) -> TrialOutcome {
    let trial_seed = derive(run_stream_seed(run), trial);
    match run_trial_inner(run, shared, trial_seed) {
        Ok(outcome) => outcome,
        Err(e) => TrialOutcome {
            ml_error: false,
            universal_error: false,
            delta_errors: vec![false; run.delta_list.len()],
            aware_error: None,
            invalid: Some(e.to_string()),
        },
    }
}

fn run_trial_inner(
    run: &ResolvedRun,
    shared: Option<&Codebook>,
    trial_seed: u64,
) -> Result<TrialOutcome, isidec_core::CoreError> {
    let fresh;
    let codebook = match shared {
        Some(cb) => cb,
        None => {
            fresh = generate_codebook_sized(
                &run.ensemble,
                derive(trial_seed, TAG_CODEBOOK),
                run.num_messages,
            )?;
            &fresh
        }
    };
    let mut noise_rng = Rng::new(derive(trial_seed, TAG_NOISE));
    let sent = codebook.codeword(0);
    let y = match &run.interference {
        Some(intf) => transmit_with_interference(sent, &run.params, &intf.model, &mut noise_rng)?,
        None => transmit(sent, &run.params, &mut noise_rng),
    };

    // σ² = 0 is a diagnostic mode; the ML argmax is invariant to the variance
    // plugged into the metric, so evaluate with a unit-variance stand-in.
    let metric_params = if run.params.noise_var() > 0.0 {
        run.params.clone()
    } else {
        ChannelParams::new(run.params.impulse().to_vec(), 1.0).expect("valid impulse")
    };

    let ml = decode(codebook, &y, &DecodeRule::MaximumLikelihood(&metric_params))?;
    let ml_error = ml.chosen_index != 0;

    let universal_error = match run.universal_rule {
        UniversalRule::MlShadow => ml_error,
        UniversalRule::Metric => {
            let verdict = decode(
                codebook,
                &y,
                &DecodeRule::Universal {
                    k_dec: run.k_dec,
                    ensemble: &run.ensemble,
                },
            )?;
            verdict.chosen_index != 0
        }
    };

    let delta_errors = run
        .delta_list
        .iter()
        .map(|&d| delta_error_event(codebook, &y, 0, &metric_params, d))
        .collect();

    let aware_error = match &run.interference {
        Some(intf) if intf.decode_aware => {
            let verdict = decode(
                codebook,
                &y,
                &DecodeRule::UniversalInterference {
                    k_dec: run.k_dec,
                    ensemble: &run.ensemble,
                    basis_spectra: &intf.spectra,
                },
            )?;
            Some(verdict.chosen_index != 0)
        }
        _ => None,
    };

    Ok(TrialOutcome {
        ml_error,
        universal_error,
        delta_errors,
        aware_error,
        invalid: None,
    })
}

/// Error counts and interval estimates for one decoder row.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderStats {
    /// "ml", "universal", "delta", or "universal_intf".
    pub decoder: String,
    /// The δ value for "delta" rows.
    pub delta: Option<f64>,
    /// Valid trials this decoder was evaluated on.
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `-(1/n) ln p̂`; for zero errors the rule-of-three upper limit stands
    /// in for `p̂`, making this a conservative lower bound on the exponent.
    pub exponent_hat: f64,
}

/// Aggregated experiment output.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub n: usize,
    pub rate_bits: f64,
    pub snr_db: f64,
    pub noise_var: f64,
    pub k: usize,
    pub k_dec: usize,
    pub trials: u64,
    pub valid_trials: u64,
    pub invalid_trials: u64,
    pub root_seed: u64,
    pub config_hash: String,
    pub rows: Vec<DecoderStats>,
    /// Every valid trial had nondecreasing δ-events along increasing δ.
    pub delta_pointwise_monotone: bool,
    /// When `delta_list` contains 0, whether its event matched the ML error
    /// on every valid trial.
    pub delta_zero_matches_ml: Option<bool>,
    /// Wall-clock seconds; in-memory diagnostic only, never serialized
    /// (reports must be byte-identical across reruns).
    pub wall_time_secs: f64,
}

impl ExperimentResult {
    pub fn row(&self, decoder: &str, delta: Option<f64>) -> Option<&DecoderStats> {
        self.rows
            .iter()
            .find(|r| r.decoder == decoder && r.delta == delta)
    }
}

/// 95% Wilson score interval, with the rule of three substituted at the
/// boundaries.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && errors <= trials);
    let t = trials as f64;
    if errors == 0 {
        return (0.0, (3.0 / t).min(1.0));
    }
    if errors == trials {
        return ((1.0 - 3.0 / t).max(0.0), 1.0);
    }
    let p = errors as f64 / t;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / t;
    let center = p + z2 / (2.0 * t);
    let spread = Z95 * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt();
    (
        ((center - spread) / denom).max(0.0),
        ((center + spread) / denom).min(1.0),
    )
}

fn exponent_estimate(errors: u64, trials: u64, n: usize) -> f64 {
    let p = if errors == 0 {
        3.0 / trials as f64 // rule-of-three stand-in; a lower bound on the exponent
    } else {
        errors as f64 / trials as f64
    };
    -p.ln() / n as f64
}

fn stats_row(
    decoder: &str,
    delta: Option<f64>,
    errors: u64,
    trials: u64,
    n: usize,
) -> DecoderStats {
    let (ci_lo, ci_hi) = wilson_interval(errors, trials);
    DecoderStats {
        decoder: decoder.to_string(),
        delta,
        trials,
        errors,
        p_hat: errors as f64 / trials as f64,
        ci_lo,
        ci_hi,
        exponent_hat: exponent_estimate(errors, trials, n),
    }
}

/// Runs the experiment described by `cfg` at its own block length.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, SimError> {
    let run = cfg.resolve()?;
    run_resolved(cfg, &run)
}

/// Runs an already-resolved experiment point.
pub fn run_resolved(
    cfg: &ExperimentConfig,
    run: &ResolvedRun,
) -> Result<ExperimentResult, SimError> {
    let start = Instant::now();
    let shared = if run.fixed_codebook {
        Some(generate_codebook_sized(
            &run.ensemble,
            derive(run_stream_seed(run), TAG_FIXED_CODEBOOK),
            run.num_messages,
        )?)
    } else {
        None
    };
    let outcomes: Vec<TrialOutcome> = (0..run.trials)
        .into_par_iter()
        .map(|t| run_trial(run, shared.as_ref(), t))
        .collect();

    let mut valid = 0u64;
    let mut invalid = 0u64;
    let mut ml_errors = 0u64;
    let mut universal_errors = 0u64;
    let mut delta_errors = vec![0u64; run.delta_list.len()];
    let mut aware_errors = 0u64;
    let mut aware_present = false;
    let mut pointwise_monotone = true;
    let zero_idx = run.delta_list.iter().position(|d| *d == 0.0);
    let mut zero_matches_ml = zero_idx.map(|_| true);

    // δ indices in increasing δ order, for the pointwise nesting check.
    let mut order: Vec<usize> = (0..run.delta_list.len()).collect();
    order.sort_by(|&a, &b| run.delta_list[a].partial_cmp(&run.delta_list[b]).unwrap());

    for outcome in &outcomes {
        if outcome.invalid.is_some() {
            invalid += 1;
            continue;
        }
        valid += 1;
        ml_errors += u64::from(outcome.ml_error);
        universal_errors += u64::from(outcome.universal_error);
        for (i, &e) in outcome.delta_errors.iter().enumerate() {
            delta_errors[i] += u64::from(e);
        }
        for pair in order.windows(2) {
            if outcome.delta_errors[pair[0]] && !outcome.delta_errors[pair[1]] {
                pointwise_monotone = false;
            }
        }
        if let (Some(idx), Some(flag)) = (zero_idx, zero_matches_ml.as_mut()) {
            if outcome.delta_errors[idx] != outcome.ml_error {
                *flag = false;
            }
        }
        if let Some(a) = outcome.aware_error {
            aware_present = true;
            aware_errors += u64::from(a);
        }
    }
    if valid == 0 {
        return Err(SimError::Numerical(isidec_core::CoreError::InvalidInput {
            what: "every trial was invalid",
        }));
    }

    let mut rows = vec![
        stats_row("ml", None, ml_errors, valid, run.n),
        stats_row("universal", None, universal_errors, valid, run.n),
    ];
    for (i, &d) in run.delta_list.iter().enumerate() {
        rows.push(stats_row("delta", Some(d), delta_errors[i], valid, run.n));
    }
    if aware_present {
        rows.push(stats_row(
            "universal_intf",
            None,
            aware_errors,
            valid,
            run.n,
        ));
    }

    Ok(ExperimentResult {
        n: run.n,
        rate_bits: run.rate_bits_effective,
        snr_db: run.snr_db,
        noise_var: run.params.noise_var(),
        k: run.k,
        k_dec: run.k_dec,
        trials: run.trials,
        valid_trials: valid,
        invalid_trials: invalid,
        root_seed: run.root_seed,
        config_hash: cfg.stable_hash(),
        rows,
        delta_pointwise_monotone: pointwise_monotone,
        delta_zero_matches_ml: zero_matches_ml,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// One point of an exponent sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub n: usize,
    pub snr_db: f64,
    /// `(1/n) |ln p̂_UNIV - ln p̂_ML|` with rule-of-three stand-ins at zero
    /// counts.
    pub gap: f64,
    /// Combined interval half-width of the gap in the same units; infinite
    /// when a decoder recorded zero errors.
    pub gap_halfwidth: f64,
    /// Set when either decoder recorded zero errors.
    pub degenerate: bool,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

/// Runs the configured `n_list` and reports the per-`n` exponent gap between
/// the universal and ML decoders.
pub fn exponent_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, SimError> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| SimError::Config("sweep.n_list is required for a sweep".into()))?;
    if sweep.n_list.len() < 2 {
        return Err(SimError::Config(
            "a sweep needs at least two block lengths".into(),
        ));
    }
    if let Some(snrs) = &sweep.snr_db_list {
        if snrs.len() != sweep.n_list.len() {
            return Err(SimError::Config("snr_db_list must parallel n_list".into()));
        }
    }
    let mut points = Vec::with_capacity(sweep.n_list.len());
    for (i, &n) in sweep.n_list.iter().enumerate() {
        let snr = sweep.snr_db_list.as_ref().map(|v| v[i]);
        let run = cfg.resolve_at(n, snr)?;
        let result = run_resolved(cfg, &run)?;
        points.push(make_sweep_point(result));
    }
    Ok(SweepResult { points })
}

fn make_sweep_point(result: ExperimentResult) -> SweepPoint {
    let ml = result.row("ml", None).expect("ml row").clone();
    let un = result
        .row("universal", None)
        .expect("universal row")
        .clone();
    let n = result.n as f64;
    let t = ml.trials as f64;
    let degenerate = ml.errors == 0 || un.errors == 0;
    let p_of = |row: &DecoderStats| {
        if row.errors == 0 {
            3.0 / t
        } else {
            row.p_hat
        }
    };
    let gap = (p_of(&un).ln() - p_of(&ml).ln()).abs() / n;
    let gap_halfwidth = if degenerate {
        f64::INFINITY
    } else {
        ((ml.ci_hi.ln() - ml.ci_lo.ln()) + (un.ci_hi.ln() - un.ci_lo.ln())) / (2.0 * n)
    };
    SweepPoint {
        n: result.n,
        snr_db: result.snr_db,
        gap,
        gap_halfwidth,
        degenerate,
        result,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
            root_seed = 11
            trials = 200
            k_dec = 1
            delta_list = [0.0, 0.05, 0.2]

            [ensemble]
            n = 16
            num_messages = 8
            sigma_x_sq = 1.0
            delta = 0.1

            [channel]
            impulse = [1.0, 0.5]
            snr_db = 3.0
            "#,
        )
        .unwrap()
    }

    #[test]
    fn wilson_contains_point_estimate() {
        for (e, t) in [(0u64, 100u64), (1, 100), (50, 100), (99, 100), (100, 100)] {
            let (lo, hi) = wilson_interval(e, t);
            let p = e as f64 / t as f64;
            assert!(lo <= p + 1e-12 && p <= hi + 1e-12, "({e}, {t})");
        }
    }

    #[test]
    fn rule_of_three_at_zero() {
        let (lo, hi) = wilson_interval(0, 1000);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.003).abs() < 1e-15);
    }

    #[test]
    fn deterministic_experiment() {
        let cfg = small_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a.valid_trials, b.valid_trials);
    }

    #[test]
    fn single_trial_counts_are_binary() {
        let mut cfg = small_config();
        cfg.trials = 1;
        let r = run_experiment(&cfg).unwrap();
        for row in &r.rows {
            assert!(row.errors <= 1);
        }
    }

    #[test]
    fn noiseless_mode_makes_no_errors() {
        let mut cfg = small_config();
        cfg.trials = 300;
        cfg.channel.snr_db = None;
        cfg.channel.noise_var = Some(0.0);
        let r = run_experiment(&cfg).unwrap();
        for row in &r.rows {
            if row.decoder == "delta" && row.delta == Some(0.0) || row.decoder != "delta" {
                assert_eq!(row.errors, 0, "decoder {} {:?}", row.decoder, row.delta);
            }
        }
        assert_eq!(r.invalid_trials, 0);
    }

    #[test]
    fn delta_events_nest_and_zero_matches_ml() {
        let r = run_experiment(&small_config()).unwrap();
        assert!(r.delta_pointwise_monotone);
        assert_eq!(r.delta_zero_matches_ml, Some(true));
        let d0 = r.row("delta", Some(0.0)).unwrap().errors;
        let d1 = r.row("delta", Some(0.05)).unwrap().errors;
        let d2 = r.row("delta", Some(0.2)).unwrap().errors;
        assert!(d0 <= d1 && d1 <= d2);
        assert_eq!(d0, r.row("ml", None).unwrap().errors);
    }

    #[test]
    fn ml_shadow_hook_zeroes_the_gap() {
        let mut cfg = small_config();
        cfg.universal_rule = UniversalRule::MlShadow;
        cfg.sweep = Some(crate::config::SweepSection {
            n_list: vec![16, 32],
            snr_db_list: None,
        });
        let sweep = exponent_sweep(&cfg).unwrap();
        for p in &sweep.points {
            assert_eq!(p.gap, 0.0, "n = {}", p.n);
        }
    }

    #[test]
    fn fixed_codebook_mode_runs() {
        let mut cfg = small_config();
        cfg.fixed_codebook = true;
        cfg.trials = 50;
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.valid_trials, 50);
    }
}
