//! Monte Carlo campaign runner.
//!
//! Each trial derives its channel and solver seeds from the master seed and
//! the trial index alone, so campaigns are reproducible bit-for-bit on any
//! number of workers and any single trial can be re-run in isolation.
//! Averaged convergence curves use active-trial semantics: the mean at
//! iteration `i` is taken only over trials whose trace reached `i`, which is
//! what gives the curves their declining sample counts. Infeasible trials are
//! recorded and counted but never abort a campaign.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{sample_channel, ChannelModel, ConvergenceTrace, QosSpec, SystemConfig};
use crate::scalar::{to_f64, Scalar};
use crate::seed::derive_seed;
use crate::solver::{
    ao_solve, diwf_solve_matrix, ga_solve, DiwfParams, GaParams, SolverError,
};

/// Which solver a campaign runs, with its per-algorithm parameters.
#[derive(Debug, Clone)]
pub enum AlgoSpec<T> {
    Ao { qos: Option<QosSpec<T>> },
    Diwf(DiwfParams<T>),
    Ga { params: GaParams<T>, qos: QosSpec<T> },
}

impl<T> AlgoSpec<T> {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoSpec::Ao { .. } => "ao",
            AlgoSpec::Diwf(_) => "diwf",
            AlgoSpec::Ga { .. } => "ga",
        }
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone)]
pub struct TrialRecord<T> {
    pub trial: usize,
    pub outcome: Result<ConvergenceTrace<T>, SolverError>,
}

/// Per-iteration aggregate over the still-active trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationStat {
    /// 1-based iteration (or generation) index.
    pub iteration: usize,
    pub mean_bps: f64,
    /// Number of trials whose trace reached this iteration.
    pub active: usize,
}

/// Campaign-level aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n_trials: usize,
    /// Trials rejected as infeasible by the solver.
    pub infeasible: usize,
    pub per_iteration: Vec<IterationStat>,
    /// Mean / extreme final sum rates over completed trials, bits/s.
    pub final_mean_bps: f64,
    pub final_max_bps: f64,
    pub final_min_bps: f64,
    /// Count of completed trials per stopping iteration.
    pub histogram: BTreeMap<usize, usize>,
    /// Completed trials that hit the iteration cap without converging.
    pub non_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("a campaign needs at least one trial")]
    NoTrials,
    #[error("cannot summarize an empty trace collection")]
    EmptyTraces,
}

/// Full campaign output: per-trial records plus the aggregate summary.
#[derive(Debug, Clone)]
pub struct Campaign<T> {
    pub records: Vec<TrialRecord<T>>,
    pub summary: McSummary,
}

/// Run one trial: sample a fresh channel from the trial's derived seed and
/// solve it. Pure function of its arguments.
pub fn run_trial<T: Scalar>(
    algo: &AlgoSpec<T>,
    config: &SystemConfig<T>,
    model: &ChannelModel,
    master_seed: u64,
    trial: usize,
) -> TrialRecord<T> {
    let channel_seed = derive_seed(master_seed, trial as u64, 0);
    let solver_seed = derive_seed(master_seed, trial as u64, 1);
    let outcome = (|| -> Result<ConvergenceTrace<T>, SolverError> {
        let h = sample_channel(channel_seed, config, model)?;
        match algo {
            AlgoSpec::Ao { qos } => Ok(ao_solve(&h, config, qos.as_ref(), solver_seed)?.trace),
            AlgoSpec::Diwf(params) => Ok(diwf_solve_matrix(&h, config, params)?.1.trace),
            AlgoSpec::Ga { params, qos } => Ok(ga_solve(&h, config, qos, params, solver_seed)?.trace),
        }
    })();
    TrialRecord { trial, outcome }
}

/// Run `n_trials` independent trials and aggregate them. Trials execute on
/// the current rayon pool; the reduction is performed in trial order, so the
/// output is identical regardless of worker count.
pub fn run_campaign<T: Scalar>(
    algo: &AlgoSpec<T>,
    config: &SystemConfig<T>,
    model: &ChannelModel,
    n_trials: usize,
    master_seed: u64,
) -> Result<Campaign<T>, HarnessError> {
    if n_trials == 0 {
        return Err(HarnessError::NoTrials);
    }
    let records: Vec<TrialRecord<T>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| run_trial(algo, config, model, master_seed, trial))
        .collect();

    let traces: Vec<&ConvergenceTrace<T>> = records
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let infeasible = n_trials - traces.len();
    let mut summary = if traces.is_empty() {
        McSummary {
            n_trials,
            infeasible,
            per_iteration: Vec::new(),
            final_mean_bps: 0.0,
            final_max_bps: 0.0,
            final_min_bps: 0.0,
            histogram: BTreeMap::new(),
            non_converged: 0,
        }
    } else {
        summarize(&traces)?
    };
    summary.n_trials = n_trials;
    summary.infeasible = infeasible;
    Ok(Campaign { records, summary })
}

/// Aggregate traces under the active-trial rule:
/// `mean[i] = sum over traces with len >= i of trace[i] / active_count[i]`.
pub fn summarize<T: Scalar>(traces: &[&ConvergenceTrace<T>]) -> Result<McSummary, HarnessError> {
    if traces.is_empty() {
        return Err(HarnessError::EmptyTraces);
    }
    let max_len = traces.iter().map(|t| t.len()).max().unwrap_or(0);
    let mut per_iteration = Vec::with_capacity(max_len);
    for i in 0..max_len {
        let mut sum = 0.0;
        let mut active = 0;
        for trace in traces {
            if let Some(&v) = trace.sum_rates_bps.get(i) {
                sum += to_f64(v);
                active += 1;
            }
        }
        per_iteration.push(IterationStat {
            iteration: i + 1,
            mean_bps: sum / active as f64,
            active,
        });
    }

    let finals: Vec<f64> = traces
        .iter()
        .filter_map(|t| t.final_sum_rate_bps())
        .map(to_f64)
        .collect();
    let final_mean_bps = finals.iter().sum::<f64>() / finals.len() as f64;
    let final_max_bps = finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let final_min_bps = finals.iter().copied().fold(f64::INFINITY, f64::min);

    let mut histogram = BTreeMap::new();
    let mut non_converged = 0;
    for trace in traces {
        match trace.converged_at {
            Some(at) => *histogram.entry(at).or_insert(0) += 1,
            None => non_converged += 1,
        }
    }

    Ok(McSummary {
        n_trials: traces.len(),
        infeasible: 0,
        per_iteration,
        final_mean_bps,
        final_max_bps,
        final_min_bps,
        histogram,
        non_converged,
    })
}

/// Write the raw trace store: one `trial,iteration,sum_rate_bps` row per
/// recorded iteration, trials in order, iterations 1-based.
pub fn write_traces_csv<T: Scalar, W: Write>(
    mut w: W,
    records: &[TrialRecord<T>],
) -> io::Result<()> {
    writeln!(w, "trial,iteration,sum_rate_bps")?;
    for record in records {
        if let Ok(trace) = &record.outcome {
            for (i, &v) in trace.sum_rates_bps.iter().enumerate() {
                writeln!(w, "{},{},{}", record.trial, i + 1, to_f64(v))?;
            }
        }
    }
    Ok(())
}

/// Serializable campaign summary document; rates are reported in Mbps to
/// match the usual plotting units, while trace CSVs stay in bits/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub algo: String,
    pub params: serde_json::Value,
    pub n_trials: usize,
    pub master_seed: u64,
    pub per_iteration: Vec<SummaryIteration>,
    pub histogram: BTreeMap<usize, usize>,
    pub final_stats: FinalStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryIteration {
    pub iteration: usize,
    pub mean_mbps: f64,
    pub active: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalStats {
    pub mean_mbps: f64,
    pub max_mbps: f64,
    pub min_mbps: f64,
    pub infeasible: usize,
    pub non_converged: usize,
}

impl SummaryDoc {
    pub fn new(
        algo: &str,
        params: serde_json::Value,
        master_seed: u64,
        summary: &McSummary,
    ) -> Self {
        Self {
            algo: algo.to_string(),
            params,
            n_trials: summary.n_trials,
            master_seed,
            per_iteration: summary
                .per_iteration
                .iter()
                .map(|s| SummaryIteration {
                    iteration: s.iteration,
                    mean_mbps: s.mean_bps / 1e6,
                    active: s.active,
                })
                .collect(),
            histogram: summary.histogram.clone(),
            final_stats: FinalStats {
                mean_mbps: summary.final_mean_bps / 1e6,
                max_mbps: summary.final_max_bps / 1e6,
                min_mbps: summary.final_min_bps / 1e6,
                infeasible: summary.infeasible,
                non_converged: summary.non_converged,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::RateFloor;

    fn trace(values: &[f64], converged: bool) -> ConvergenceTrace<f64> {
        ConvergenceTrace {
            sum_rates_bps: values.to_vec(),
            converged_at: converged.then(|| values.len()),
        }
    }

    #[test]
    fn summarize_follows_active_trial_rule() {
        let a = trace(&[1.0, 2.0], true);
        let b = trace(&[1.0], true);
        let summary = summarize(&[&a, &b]).unwrap();
        assert_eq!(summary.per_iteration.len(), 2);
        assert_eq!(summary.per_iteration[0].mean_bps, 1.0);
        assert_eq!(summary.per_iteration[0].active, 2);
        assert_eq!(summary.per_iteration[1].mean_bps, 2.0);
        assert_eq!(summary.per_iteration[1].active, 1);
        assert_eq!(summary.histogram.get(&2), Some(&1));
        assert_eq!(summary.histogram.get(&1), Some(&1));
    }

    #[test]
    fn summarize_single_trace_is_identity() {
        let t = trace(&[3.0, 4.0, 5.0], true);
        let summary = summarize(&[&t]).unwrap();
        let means: Vec<f64> = summary.per_iteration.iter().map(|s| s.mean_bps).collect();
        assert_eq!(means, vec![3.0, 4.0, 5.0]);
        assert!(summary.per_iteration.iter().all(|s| s.active == 1));
        assert_eq!(summary.final_mean_bps, 5.0);
        assert_eq!(summary.final_max_bps, 5.0);
        assert_eq!(summary.final_min_bps, 5.0);
    }

    #[test]
    fn summarize_identical_traces_equals_any_single_trace() {
        let t = trace(&[2.0, 6.0], true);
        let summary = summarize(&[&t, &t, &t]).unwrap();
        assert_eq!(summary.per_iteration[0].mean_bps, 2.0);
        assert_eq!(summary.per_iteration[1].mean_bps, 6.0);
        assert!(summary.per_iteration.iter().all(|s| s.active == 3));
    }

    #[test]
    fn summarize_rejects_empty_input() {
        assert_eq!(
            summarize::<f64>(&[]).unwrap_err(),
            HarnessError::EmptyTraces
        );
    }

    #[test]
    fn active_counts_never_increase() {
        let traces = [
            trace(&[1.0, 2.0, 3.0, 4.0], true),
            trace(&[1.0], true),
            trace(&[1.0, 2.0], true),
        ];
        let refs: Vec<&ConvergenceTrace<f64>> = traces.iter().collect();
        let summary = summarize(&refs).unwrap();
        let actives: Vec<usize> = summary.per_iteration.iter().map(|s| s.active).collect();
        assert!(actives.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(actives[0], 3);
    }

    #[test]
    fn single_trial_campaign_equals_its_trace() {
        let config = SystemConfig::<f64>::default();
        let algo = AlgoSpec::Ao { qos: None };
        let campaign =
            run_campaign(&algo, &config, &ChannelModel::UnitExp, 1, 7).unwrap();
        let record = &campaign.records[0];
        let t = record.outcome.as_ref().unwrap();
        assert_eq!(campaign.summary.per_iteration.len(), t.len());
        for (stat, &v) in campaign.summary.per_iteration.iter().zip(&t.sum_rates_bps) {
            assert_eq!(stat.mean_bps, v);
            assert_eq!(stat.active, 1);
        }
    }

    #[test]
    fn trials_can_be_reproduced_in_isolation() {
        let config = SystemConfig::<f64>::default();
        let algo = AlgoSpec::Ao { qos: None };
        let campaign =
            run_campaign(&algo, &config, &ChannelModel::UnitExp, 8, 99).unwrap();
        let lone = run_trial(&algo, &config, &ChannelModel::UnitExp, 99, 5);
        assert_eq!(
            campaign.records[5].outcome.as_ref().unwrap().sum_rates_bps,
            lone.outcome.as_ref().unwrap().sum_rates_bps
        );
    }

    #[test]
    fn infeasible_trials_are_counted_not_fatal() {
        // A constant channel of tiny gain makes every DIWF floor enormous.
        let config = SystemConfig::<f64>::default();
        let params = DiwfParams::new(RateFloor::Uniform(1e5), 0.15, 1e-5).unwrap();
        let algo = AlgoSpec::Diwf(params);
        let model = ChannelModel::Constant(1e-12);
        let campaign = run_campaign(&algo, &config, &model, 4, 1).unwrap();
        assert_eq!(campaign.summary.infeasible, 4);
        assert!(campaign.summary.per_iteration.is_empty());
        assert!(campaign
            .records
            .iter()
            .all(|r| matches!(&r.outcome, Err(e) if e.is_infeasible())));
    }

    #[test]
    fn csv_rows_are_trial_iteration_rate() {
        let records = vec![
            TrialRecord {
                trial: 0,
                outcome: Ok(trace(&[1.5, 2.5], true)),
            },
            TrialRecord {
                trial: 1,
                outcome: Err(SolverError::EmptyAssignment),
            },
        ];
        let mut buf = Vec::new();
        write_traces_csv(&mut buf, &records).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "trial,iteration,sum_rate_bps\n0,1,1.5\n0,2,2.5\n");
    }

    #[test]
    fn summary_doc_round_trips_through_json() {
        let summary = McSummary {
            n_trials: 2,
            infeasible: 0,
            per_iteration: vec![IterationStat {
                iteration: 1,
                mean_bps: 2e6,
                active: 2,
            }],
            final_mean_bps: 2e6,
            final_max_bps: 3e6,
            final_min_bps: 1e6,
            histogram: BTreeMap::from([(1, 2)]),
            non_converged: 0,
        };
        let doc = SummaryDoc::new("ao", serde_json::json!({}), 42, &summary);
        let text = serde_json::to_string(&doc).unwrap();
        let back: SummaryDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(doc, back);
        assert_eq!(back.per_iteration[0].mean_mbps, 2.0);
    }
}
