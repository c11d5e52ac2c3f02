//! The comparison protocol: a baseline trained on the full training side
//! against distance-based selections at each budget, several seeded runs
//! per treatment, all scored on one shared test set.

pub mod stats;

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use stats::{
    effective_size_summary, mark_significance, rank_sum_exact, rank_sum_normal, shapiro_wilk,
    wilcoxon_rank_sum, Mark, RankSumResult, StatsError,
};

use crate::clustering::{cluster_dataset, ClusterError};
use crate::datasets::{split_train_test, Dataset, DatasetError, Domain};
use crate::dbs::{budget_schedule, dbs_select, DbsError};
use crate::fitness::{test_score, training_fitness, Orientation};
use crate::ge::{evolve, EngineError, EvolutionConfig};
use crate::grammar::Grammar;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("at least one run per treatment is required")]
    NoRuns,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Dbs(#[from] DbsError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub evolution: EvolutionConfig,
    pub runs: usize,
    pub budgets: Vec<f64>,
    pub train_fraction: f64,
    pub alpha: f64,
    /// Worker threads for runs within a treatment.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            evolution: EvolutionConfig::default(),
            runs: 30,
            budgets: budget_schedule(),
            train_fraction: 0.7,
            alpha: 0.05,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    /// Master seed: drives the split, the clustering and, offset by the
    /// run index, every run.
    pub fn seed(&self) -> u64 {
        self.evolution.rng_seed
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.evolution.validate()?;
        if self.runs == 0 {
            return Err(ExperimentError::NoRuns);
        }
        if self.jobs == 0 {
            return Err(ExperimentError::InvalidConfig(
                "jobs must be at least 1".into(),
            ));
        }
        if let Some(b) = self.budgets.iter().find(|b| !(**b > 0.0 && **b <= 100.0)) {
            return Err(DbsError::InvalidBudget(*b).into());
        }
        Ok(())
    }
}

pub fn treatment_label(budget: f64) -> String {
    if budget.fract() == 0.0 {
        format!("dbs_{budget:.0}")
    } else {
        format!("dbs_{budget}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub run: usize,
    pub seed: u64,
    /// Set when the run panicked or failed; such runs are left out of means.
    pub error: Option<String>,
    pub test_score: f64,
    pub best_phenotype: Option<String>,
    pub effective_size: usize,
    pub run_seconds: f64,
    /// Test score of the best individual of each generation.
    pub generation_test_scores: Vec<f64>,
    /// Training fitness of the best individual of each generation.
    pub generation_train_fitness: Vec<f64>,
}

impl RunReport {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub mark: Mark,
    pub p_two_sided: f64,
    pub p_less: f64,
    pub p_greater: f64,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreatmentReport {
    pub label: String,
    pub budget_percent: Option<f64>,
    pub training_size: usize,
    pub cluster_count: Option<usize>,
    pub per_cluster_counts: Vec<usize>,
    /// Row ids of the training cases, in selection order.
    pub training_case_ids: Vec<usize>,
    pub selection_seconds: f64,
    pub runs: Vec<RunReport>,
    pub failed_runs: usize,
    pub mean_test_score: Option<f64>,
    pub mean_run_seconds: Option<f64>,
    pub mean_effective_size: Option<f64>,
    /// Against the baseline; absent for the baseline itself.
    pub comparison: Option<Comparison>,
}

impl TreatmentReport {
    pub fn completed_scores(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.completed())
            .map(|r| r.test_score)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub benchmark: String,
    pub domain: Domain,
    pub orientation: Orientation,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub train_size: usize,
    pub test_size: usize,
    pub treatments: Vec<TreatmentReport>,
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

impl ExperimentReport {
    pub fn all_runs_completed(&self) -> bool {
        self.treatments.iter().all(|t| t.failed_runs == 0)
    }

    pub fn treatment(&self, label: &str) -> Option<&TreatmentReport> {
        self.treatments.iter().find(|t| t.label == label)
    }

    /// Copy with every wall-clock field zeroed, for comparing reruns.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        for t in &mut r.treatments {
            t.selection_seconds = 0.0;
            t.mean_run_seconds = t.mean_run_seconds.map(|_| 0.0);
            for run in &mut t.runs {
                run.run_seconds = 0.0;
            }
        }
        r
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One row per treatment:
    /// `benchmark,treatment,mean_test_score,mark,mean_run_seconds,selection_seconds,mean_effective_size`.
    pub fn write_summary_csv<W: Write>(&self, w: W) -> Result<(), ExperimentError> {
        let mut out = csv::Writer::from_writer(w);
        let io = |e: csv::Error| ExperimentError::Io(e.into());
        out.write_record([
            "benchmark",
            "treatment",
            "mean_test_score",
            "mark",
            "mean_run_seconds",
            "selection_seconds",
            "mean_effective_size",
        ])
        .map_err(io)?;
        let num = |v: Option<f64>| v.map(|x| format!("{:.4}", round4(x))).unwrap_or_default();
        for t in &self.treatments {
            out.write_record([
                self.benchmark.clone(),
                t.label.clone(),
                num(t.mean_test_score),
                t.comparison
                    .as_ref()
                    .map(|c| c.mark.to_string())
                    .unwrap_or_default(),
                num(t.mean_run_seconds),
                num(Some(t.selection_seconds)),
                num(t.mean_effective_size),
            ])
            .map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Write `report.json` and `summary.csv` into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<(), ExperimentError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        self.write_summary_csv(fs::File::create(dir.join("summary.csv"))?)?;
        Ok(())
    }

    /// Recompute means and marks from the stored per-run scores.
    pub fn recompute_summaries(&mut self) -> Result<(), ExperimentError> {
        let alpha = self.config.alpha;
        let orientation = self.orientation;
        for t in &mut self.treatments {
            summarize(t);
        }
        let baseline = self
            .treatments
            .first()
            .map(TreatmentReport::completed_scores);
        for t in self.treatments.iter_mut().skip(1) {
            t.comparison = compare(baseline.as_deref(), t, orientation, alpha)?;
        }
        Ok(())
    }
}

fn summarize(t: &mut TreatmentReport) {
    let done: Vec<&RunReport> = t.runs.iter().filter(|r| r.completed()).collect();
    t.failed_runs = t.runs.len() - done.len();
    t.mean_test_score = mean(done.iter().map(|r| r.test_score)).map(round4);
    t.mean_run_seconds = mean(done.iter().map(|r| r.run_seconds)).map(round4);
    let sizes: Vec<usize> = done.iter().map(|r| r.effective_size).collect();
    t.mean_effective_size = effective_size_summary(&sizes).map(round4);
}

fn compare(
    baseline: Option<&[f64]>,
    t: &TreatmentReport,
    orientation: Orientation,
    alpha: f64,
) -> Result<Option<Comparison>, ExperimentError> {
    let scores = t.completed_scores();
    match baseline {
        Some(b) if !b.is_empty() && !scores.is_empty() => {
            let (mark, r) = mark_significance(b, &scores, orientation, alpha)?;
            Ok(Some(Comparison {
                mark,
                p_two_sided: r.p_two_sided,
                p_less: r.p_less,
                p_greater: r.p_greater,
                exact: r.exact,
            }))
        }
        _ => Ok(None),
    }
}

/// One seeded GE run on `train`, scored on `test`.
pub fn run_once(
    config: &EvolutionConfig,
    grammar: &Grammar,
    train: &Dataset,
    test: &Dataset,
    run: usize,
) -> RunReport {
    let seed = config.rng_seed.wrapping_add(run as u64);
    let run_config = EvolutionConfig {
        rng_seed: seed,
        ..config.clone()
    };
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(|| {
        evolve(&run_config, grammar, |p| training_fitness(p, train))
    }));
    let run_seconds = start.elapsed().as_secs_f64();
    let failed = |error: String| RunReport {
        run,
        seed,
        error: Some(error),
        test_score: f64::NAN,
        best_phenotype: None,
        effective_size: 0,
        run_seconds,
        generation_test_scores: Vec::new(),
        generation_train_fitness: Vec::new(),
    };
    let trace = match outcome {
        Ok(Ok(trace)) => trace,
        Ok(Err(e)) => return failed(e.to_string()),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "run panicked".to_string());
            return failed(msg);
        }
    };
    let mut cache: HashMap<Option<String>, f64> = HashMap::new();
    let generation_test_scores = trace
        .best
        .iter()
        .map(|ind| {
            *cache
                .entry(ind.phenotype.clone())
                .or_insert_with(|| test_score(ind.phenotype.as_deref(), test))
        })
        .collect();
    let best = trace.final_best().expect("generation 0 is always recorded");
    RunReport {
        run,
        seed,
        error: None,
        test_score: cache[&best.phenotype],
        best_phenotype: best.phenotype.clone(),
        effective_size: best.effective_length,
        run_seconds,
        generation_test_scores,
        generation_train_fitness: trace.records.iter().map(|r| r.best_fitness).collect(),
    }
}

/// Train/test sides for the protocol: a seeded split for regression data,
/// the full truth table on both sides for circuits.
pub fn protocol_sets(
    dataset: &Dataset,
    config: &ExperimentConfig,
) -> Result<(Dataset, Dataset), ExperimentError> {
    Ok(match dataset.domain() {
        Domain::RealSr => split_train_test(dataset, config.train_fraction, config.seed())?,
        Domain::Circuit => (dataset.clone(), dataset.clone()),
    })
}

/// Baseline plus one treatment per budget, `config.runs` runs each.
pub fn run_experiment(
    dataset: &Dataset,
    grammar: &Grammar,
    config: &ExperimentConfig,
) -> Result<ExperimentReport, ExperimentError> {
    config.validate()?;
    let (train, test) = protocol_sets(dataset, config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ExperimentError::InvalidConfig(e.to_string()))?;

    let run_all = |training: &Dataset| -> Vec<RunReport> {
        pool.install(|| {
            (0..config.runs)
                .into_par_iter()
                .map(|r| run_once(&config.evolution, grammar, training, &test, r))
                .collect()
        })
    };

    let mut treatments = Vec::with_capacity(config.budgets.len() + 1);
    treatments.push(TreatmentReport {
        label: "baseline".to_string(),
        budget_percent: None,
        training_size: train.len(),
        cluster_count: None,
        per_cluster_counts: Vec::new(),
        training_case_ids: train.cases().iter().map(|c| c.id).collect(),
        selection_seconds: 0.0,
        runs: run_all(&train),
        failed_runs: 0,
        mean_test_score: None,
        mean_run_seconds: None,
        mean_effective_size: None,
        comparison: None,
    });

    for &budget in &config.budgets {
        let start = Instant::now();
        let assignment = cluster_dataset(&train, config.seed())?;
        let plan = dbs_select(&train, &assignment, budget)?;
        let selection_seconds = start.elapsed().as_secs_f64();
        let training = plan.training_set(&train)?;
        treatments.push(TreatmentReport {
            label: treatment_label(budget),
            budget_percent: Some(budget),
            training_size: training.len(),
            cluster_count: Some(assignment.k()),
            per_cluster_counts: plan.per_cluster_counts.clone(),
            training_case_ids: training.cases().iter().map(|c| c.id).collect(),
            selection_seconds,
            runs: run_all(&training),
            failed_runs: 0,
            mean_test_score: None,
            mean_run_seconds: None,
            mean_effective_size: None,
            comparison: None,
        });
    }

    let mut report = ExperimentReport {
        benchmark: dataset.name().to_string(),
        domain: dataset.domain(),
        orientation: Orientation::for_domain(dataset.domain()),
        seed: config.seed(),
        config: config.clone(),
        train_size: train.len(),
        test_size: test.len(),
        treatments,
    };
    report.recompute_summaries()?;
    Ok(report)
}
