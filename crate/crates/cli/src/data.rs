use std::path::{Path, PathBuf};

use clap::Args;
use log::warn;
use serde_json::json;
use spi_discovery::io::{discretize, load_cases_csv, to_json_string, write_cases_csv, DatasetSchema, StoredModel};
use spi_discovery::learner::{
    evaluate_round_robin, learn_classifier, Diagnostic, LearnError, Preset, SearchConfig, TargetSpec,
};
use spi_discovery::rule_core::{Conjunction, Dataset, Literal, Probability};
use spi_discovery::synthetic::{self, SyntheticConfig};

use crate::parse_preset;
use crate::report::{Failure, Report};

#[derive(Args)]
pub struct DataArgs {
    /// Cases, one row each, with an optional `id` column.
    #[arg(long)]
    data: PathBuf,
    /// Signature and discretization (`{"signature", "discretization"}`).
    #[arg(long)]
    spec: PathBuf,
    /// Goal literal, e.g. `malignant`, `!malignant` or `size>30`.
    #[arg(long)]
    target: String,
    /// Longest premise considered.
    #[arg(long, default_value_t = 4)]
    max_premise: usize,
}

#[derive(Args)]
pub struct LearnArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Start from a preset; --min-cp and --alpha override it.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Minimum conditional probability, as a decimal.
    #[arg(long)]
    min_cp: Option<String>,
    /// Fisher significance level.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Presets to run; all three when omitted.
    #[arg(long = "preset", value_parser = parse_preset)]
    presets: Vec<Preset>,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    cases: usize,
    /// Probability of flipping each label.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Also write the matching `--spec` file here.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

fn learn_failure(e: LearnError) -> Failure {
    match e {
        LearnError::InvalidConfig(m) | LearnError::InvalidTarget(m) => Failure::Usage(m),
        LearnError::TooFewCases(n) => Failure::Degenerate(format!("{n} cases; at least two are needed")),
        other => Failure::Other(other.into()),
    }
}

struct Loaded {
    dataset: Dataset,
    target: TargetSpec,
}

fn load(args: &DataArgs) -> Result<Loaded, Failure> {
    let schema = DatasetSchema::load(&args.spec)?;
    let dataset = load_cases_csv(&args.data, &schema.signature)?;
    let disc = discretize(&dataset, &schema.discretization)?;
    for w in &disc.warnings {
        warn!("{w}");
    }
    let goal = Literal::parse(&args.target, dataset.signature()).map_err(|e| Failure::Usage(e.to_string()))?;
    let goal = Conjunction::single(goal);
    let pool = disc.pool_for(&goal);
    let target = TargetSpec::new(goal, pool).map_err(learn_failure)?;
    Ok(Loaded { dataset, target })
}

fn constant_goal(target: &str) -> Failure {
    Failure::Degenerate(format!("`{target}` takes the same value in every case"))
}

pub fn learn(args: LearnArgs) -> Result<Report, Failure> {
    let loaded = load(&args.data)?;
    let mut cfg = args.preset.map_or_else(SearchConfig::default, Preset::config);
    cfg.max_premise_len = args.data.max_premise;
    if let Some(text) = &args.min_cp {
        cfg.min_conditional_probability =
            Probability::from_decimal_str(text).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    if args.alpha.is_some() {
        cfg.significance_alpha = args.alpha;
    }
    let learned = learn_classifier(&loaded.target, &loaded.dataset, &cfg).map_err(learn_failure)?;
    if learned.diagnostic == Some(Diagnostic::ConstantGoal) {
        return Err(constant_goal(&args.data.target));
    }
    let rules = learned.rules;
    let positive = rules.iter().filter(|a| rules.is_positive(&a.rule)).count();
    let mut text = format!(
        "rules: {} ({positive} for the target, {} against)\n",
        rules.len(),
        rules.len() - positive
    );
    text += &rules.render();
    let stored = StoredModel::RuleSet(rules);
    let doc = to_json_string(&stored);
    let json = serde_json::from_str(&doc).expect("stored models are JSON");
    Ok(Report::new(text, json).with_artifact(doc + "\n"))
}

pub fn evaluate(args: EvaluateArgs) -> Result<Report, Failure> {
    let loaded = load(&args.data)?;
    let sig = loaded.dataset.signature();
    let mut holds = loaded.dataset.cases().iter().map(|c| loaded.target.goal().satisfied(c, sig));
    let first = holds.next().transpose()?;
    if let Some(first) = first {
        if holds.try_fold(true, |same, h| h.map(|h| same && h == first))? {
            return Err(constant_goal(&args.data.target));
        }
    }
    let presets = if args.presets.is_empty() {
        Preset::ALL.to_vec()
    } else {
        args.presets
    };
    let mut text = format!(
        "{:<11} {:>6} {:>9} {:>7} {:>8} {:>6} {:>6}\n",
        "preset", "min-cp", "diagnosed", "refused", "accuracy", "FPR", "FNR"
    );
    let mut rows = Vec::new();
    for preset in presets {
        let mut cfg = preset.config();
        cfg.max_premise_len = args.data.max_premise;
        let m = evaluate_round_robin(&loaded.dataset, &loaded.target, &cfg).map_err(learn_failure)?;
        text += &format!(
            "{:<11} {:>6.2} {:>9} {:>7} {:>8.4} {:>6.4} {:>6.4}\n",
            preset.name(),
            preset.min_conditional_probability().as_f64(),
            m.diagnosed,
            m.refused,
            m.accuracy,
            m.false_positive_rate,
            m.false_negative_rate
        );
        rows.push(json!({
            "preset": preset.name(),
            "min_cp": preset.min_conditional_probability().as_f64(),
            "metrics": m,
        }));
    }
    Ok(Report::new(text, json!({ "cases": loaded.dataset.len(), "results": rows })))
}

pub fn synth(args: SynthArgs, seed: u64, output: Option<&Path>) -> Result<Report, Failure> {
    if !(0.0..=1.0).contains(&args.noise) {
        return Err(Failure::Usage(format!("noise {} not in [0, 1]", args.noise)));
    }
    let cfg = SyntheticConfig {
        cases: args.cases,
        noise: args.noise,
        seed,
    };
    let d = synthetic::expert_cases(&cfg);
    if let Some(path) = &args.spec_out {
        let schema = DatasetSchema {
            signature: d.signature().clone(),
            discretization: Default::default(),
        };
        let doc = serde_json::to_string_pretty(&schema).expect("schemas serialize");
        std::fs::write(path, doc + "\n").map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    }
    let mut csv = Vec::new();
    write_cases_csv(&d, &mut csv)?;
    let csv = String::from_utf8(csv).expect("CSV output is UTF-8");
    let json = json!({ "cases": d.len(), "noise": cfg.noise, "seed": seed, "label": synthetic::LABEL });
    // the CSV goes to stdout only when there is no file to hold it
    let text = match output {
        Some(path) => format!("{} cases written to {}\n", d.len(), path.display()),
        None => csv.clone(),
    };
    Ok(Report::new(text, json).with_artifact(csv))
}
