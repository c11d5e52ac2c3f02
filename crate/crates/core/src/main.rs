use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use ge_dbs::clustering::cluster_dataset;
use ge_dbs::datasets::{self, load_csv, split_train_test, CsvOptions, Dataset, Domain, Target};
use ge_dbs::dbs::dbs_select;
use ge_dbs::experiment::{
    mark_significance, run_experiment, shapiro_wilk, treatment_label, ExperimentConfig,
};
use ge_dbs::fitness::{test_score, training_fitness, Orientation};
use ge_dbs::ge::evolve;
use ge_dbs::grammar::{parse_bnf, Grammar};
use ge_dbs::grammars::default_grammar;

#[derive(Parser)]
#[command(
    name = "ge-dbs",
    version,
    about = "Grammatical evolution with distance-based training-set selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in benchmark to CSV.
    GenData {
        /// Benchmark id, e.g. keijzer-4 or parity5.
        benchmark: String,
        #[command(flatten)]
        common: Common,
    },
    /// Cluster a dataset and keep a budgeted, distance-based subset.
    Select {
        #[command(flatten)]
        source: Source,
        /// Percentage of each cluster to keep, in (0, 100].
        #[arg(long)]
        budget: f64,
        #[command(flatten)]
        common: Common,
    },
    /// One GE run; regression data is split into train and test first.
    Evolve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        evo: EvoArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Baseline against each selection budget over several runs.
    Experiment {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        evo: EvoArgs,
        /// Runs per treatment.
        #[arg(long)]
        runs: Option<usize>,
        /// Comma-separated budgets in percent.
        #[arg(long, value_delimiter = ',')]
        budgets: Option<Vec<f64>>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Rank-sum comparison of two samples plus normality tests.
    Stats {
        /// Comma-separated baseline scores.
        #[arg(long, value_delimiter = ',', required = true)]
        baseline: Vec<f64>,
        /// Comma-separated treatment scores.
        #[arg(long, value_delimiter = ',', required = true)]
        treatment: Vec<f64>,
        #[arg(long, value_enum, default_value = "lower")]
        better: Better,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Master seed.
    #[arg(long, env = "GE_DBS_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct Source {
    /// Built-in benchmark id.
    #[arg(required_unless_present = "data", conflicts_with = "data")]
    benchmark: Option<String>,
    /// CSV file instead of a built-in benchmark.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Domain of the CSV data.
    #[arg(long, value_enum, default_value = "sr")]
    domain: DomainArg,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    /// Number of trailing CSV columns that are outputs.
    #[arg(long, default_value_t = 1)]
    outputs: usize,
}

#[derive(Args)]
struct EvoArgs {
    /// BNF grammar file; defaults to the built-in grammar for the data.
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// TOML file with evolution settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long)]
    generations: Option<usize>,
    #[arg(long)]
    crossover_rate: Option<f64>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    tournament_size: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Sr,
    Circuit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Better {
    Lower,
    Higher,
}

/// Flat config file: evolution settings plus experiment settings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    population_size: Option<usize>,
    generations: Option<usize>,
    crossover_rate: Option<f64>,
    mutation_rate: Option<f64>,
    tournament_size: Option<usize>,
    elitism: Option<usize>,
    max_wraps: Option<usize>,
    max_derivation_depth: Option<usize>,
    init_min_depth: Option<usize>,
    init_max_depth: Option<usize>,
    rng_seed: Option<u64>,
    runs: Option<usize>,
    budgets: Option<Vec<f64>>,
    train_fraction: Option<f64>,
    alpha: Option<f64>,
    jobs: Option<usize>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn experiment_config(file: FileConfig, evo: &EvoArgs, seed: Option<u64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    let e = &mut cfg.evolution;
    macro_rules! layer {
        ($field:ident, $($value:expr),+) => {
            $(if let Some(v) = $value { e.$field = v; })+
        };
    }
    layer!(population_size, file.population_size, evo.population);
    layer!(generations, file.generations, evo.generations);
    layer!(crossover_rate, file.crossover_rate, evo.crossover_rate);
    layer!(mutation_rate, file.mutation_rate, evo.mutation_rate);
    layer!(tournament_size, file.tournament_size, evo.tournament_size);
    layer!(elitism, file.elitism);
    layer!(max_wraps, file.max_wraps);
    layer!(max_derivation_depth, file.max_derivation_depth);
    layer!(init_min_depth, file.init_min_depth);
    layer!(init_max_depth, file.init_max_depth);
    layer!(rng_seed, file.rng_seed, seed);
    if let Some(v) = file.runs {
        cfg.runs = v;
    }
    if let Some(v) = file.budgets {
        cfg.budgets = v;
    }
    if let Some(v) = file.train_fraction {
        cfg.train_fraction = v;
    }
    if let Some(v) = file.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = file.jobs {
        cfg.jobs = v;
    }
    cfg
}

fn load_source(source: &Source, seed: u64) -> Result<Dataset> {
    match (&source.benchmark, &source.data) {
        (Some(id), None) => Ok(datasets::generate(id, seed)?),
        (None, Some(path)) => {
            let options = CsvOptions {
                has_header: !source.no_header,
                target: Target::Last(source.outputs),
                domain: match source.domain {
                    DomainArg::Sr => Domain::RealSr,
                    DomainArg::Circuit => Domain::Circuit,
                },
            };
            load_csv(path, &options).with_context(|| format!("loading {}", path.display()))
        }
        _ => bail!("give either a benchmark id or --data"),
    }
}

fn load_grammar(path: Option<&Path>, dataset: &Dataset) -> Result<Grammar> {
    match path {
        None => Ok(default_grammar(dataset)),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading grammar {}", path.display()))?;
            parse_bnf(&text).with_context(|| format!("parsing grammar {}", path.display()))
        }
    }
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn create_file(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn gen_data(benchmark: &str, common: &Common) -> Result<()> {
    let d = datasets::generate(benchmark, common.seed.unwrap_or(0))?;
    create_out(&common.out)?;
    let path = common.out.join(format!("{}.csv", d.name()));
    datasets::write_csv(&d, create_file(&path)?)?;
    println!(
        "{}: {} rows, {} features, {} outputs -> {}",
        d.name(),
        d.len(),
        d.feature_count(),
        d.output_count(),
        path.display()
    );
    Ok(())
}

fn select(source: &Source, budget: f64, common: &Common) -> Result<()> {
    let seed = common.seed.unwrap_or(0);
    let d = load_source(source, seed)?;
    let start = Instant::now();
    let assignment = cluster_dataset(&d, seed)?;
    let plan = dbs_select(&d, &assignment, budget)?;
    let elapsed = start.elapsed();
    let training = plan.training_set(&d)?;

    create_out(&common.out)?;
    let stem = format!("{}_{}", d.name(), treatment_label(budget));
    datasets::write_csv(
        &training,
        create_file(&common.out.join(format!("{stem}.csv")))?,
    )?;
    plan.write_csv(create_file(&common.out.join(format!("{stem}_plan.csv")))?)?;
    assignment.write_csv(create_file(
        &common.out.join(format!("{}_clusters.csv", d.name())),
    )?)?;

    println!("clusters: {}", assignment.k());
    println!("per-cluster counts: {:?}", plan.per_cluster_counts);
    println!("selected: {} of {}", plan.len(), d.len());
    println!("elapsed: {:.3} s", elapsed.as_secs_f64());
    Ok(())
}

fn evolve_once(source: &Source, evo: &EvoArgs, common: &Common) -> Result<()> {
    let cfg = experiment_config(load_file_config(evo.config.as_deref())?, evo, common.seed);
    cfg.validate()?;
    let d = load_source(source, cfg.seed())?;
    let grammar = load_grammar(evo.grammar.as_deref(), &d)?;
    let (train, test) = match d.domain() {
        Domain::RealSr => split_train_test(&d, cfg.train_fraction, cfg.seed())?,
        Domain::Circuit => (d.clone(), d.clone()),
    };
    let start = Instant::now();
    let trace = evolve(&cfg.evolution, &grammar, |p| training_fitness(p, &train))?;
    let elapsed = start.elapsed();
    let best = trace.final_best().context("empty run")?;
    let score = test_score(best.phenotype.as_deref(), &test);

    create_out(&common.out)?;
    fs::write(common.out.join("trace.jsonl"), trace.to_json_lines())?;
    let summary = serde_json::json!({
        "benchmark": d.name(),
        "seed": cfg.seed(),
        "train_size": train.len(),
        "test_size": test.len(),
        "best_phenotype": best.phenotype,
        "train_fitness": best.fitness,
        "test_score": score,
        "effective_size": best.effective_length,
        "run_seconds": elapsed.as_secs_f64(),
    });
    fs::write(
        common.out.join("best.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    println!("best: {}", best.phenotype.as_deref().unwrap_or("<invalid>"));
    println!("train fitness: {}  test score: {}", best.fitness, score);
    Ok(())
}

fn experiment(
    source: &Source,
    evo: &EvoArgs,
    runs: Option<usize>,
    budgets: Option<Vec<f64>>,
    jobs: Option<usize>,
    common: &Common,
) -> Result<bool> {
    let mut cfg = experiment_config(load_file_config(evo.config.as_deref())?, evo, common.seed);
    if let Some(r) = runs {
        cfg.runs = r;
    }
    if let Some(b) = budgets {
        cfg.budgets = b;
    }
    if let Some(j) = jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    let d = load_source(source, cfg.seed())?;
    let grammar = load_grammar(evo.grammar.as_deref(), &d)?;
    let report = run_experiment(&d, &grammar, &cfg)?;
    create_out(&common.out)?;
    report.write_to_dir(&common.out)?;

    println!(
        "{} (train {}, test {})",
        report.benchmark, report.train_size, report.test_size
    );
    for t in &report.treatments {
        let mark = t
            .comparison
            .as_ref()
            .map_or(String::new(), |c| c.mark.to_string());
        let score = t
            .mean_test_score
            .map_or("n/a".to_string(), |s| s.to_string());
        println!(
            "  {:<10} n={:<6} score={score}{mark}  failed={}",
            t.label, t.training_size, t.failed_runs
        );
    }
    println!("report written to {}", common.out.display());
    Ok(report.all_runs_completed())
}

fn stats(
    baseline: &[f64],
    treatment: &[f64],
    better: Better,
    alpha: f64,
    common: &Common,
) -> Result<()> {
    let orientation = match better {
        Better::Lower => Orientation::LowerBetter,
        Better::Higher => Orientation::HigherBetter,
    };
    let (mark, r) = mark_significance(baseline, treatment, orientation, alpha)?;
    let normality = |xs: &[f64]| {
        shapiro_wilk(xs)
            .ok()
            .map(|(w, p)| serde_json::json!({"w": w, "p": p}))
    };
    let out = serde_json::json!({
        "mark": mark,
        "rank_sum": r.rank_sum,
        "p_less": r.p_less,
        "p_greater": r.p_greater,
        "p_two_sided": r.p_two_sided,
        "exact": r.exact,
        "shapiro_baseline": normality(baseline),
        "shapiro_treatment": normality(treatment),
    });
    let text = serde_json::to_string_pretty(&out)?;
    create_out(&common.out)?;
    fs::write(common.out.join("stats.json"), &text)?;
    println!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::GenData { benchmark, common } => gen_data(benchmark, common).map(|_| true),
        Command::Select {
            source,
            budget,
            common,
        } => select(source, *budget, common).map(|_| true),
        Command::Evolve {
            source,
            evo,
            common,
        } => evolve_once(source, evo, common).map(|_| true),
        Command::Experiment {
            source,
            evo,
            runs,
            budgets,
            jobs,
            common,
        } => experiment(source, evo, *runs, budgets.clone(), *jobs, common),
        Command::Stats {
            baseline,
            treatment,
            better,
            alpha,
            common,
        } => stats(baseline, treatment, *better, *alpha, common).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: some runs failed; see the report");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
