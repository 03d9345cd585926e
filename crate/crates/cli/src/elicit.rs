use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;
use serde_json::json;
use spi_discovery::io::{load_model, save_model, StoredModel};
use spi_discovery::monotone::{
    extract_dnf, hansel_chains, phrase_question, question_bound, run_interview, variable_names, ChainPlan,
    ElicitationState, HierarchySpec, MonotoneError, Provenance, TruthTable,
};

use crate::report::{Failure, Report};
use crate::{load_plan, ModeArg};

#[derive(Args)]
pub struct ElicitArgs {
    /// Number of inputs; taken from the oracle when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Truth table answering every question (`{"n", "values", "names"?}`).
    #[arg(long, required_unless_present = "interactive")]
    oracle: Option<PathBuf>,
    /// Ask on the terminal instead: y, n, u (undo) or q (save and stop).
    #[arg(long, conflicts_with = "oracle")]
    interactive: bool,
    /// Continue an interview saved by an earlier interactive run.
    #[arg(long, requires = "interactive")]
    resume: Option<PathBuf>,
    /// Chain order file (`{"n", "chain_order"}`); Hansel's construction otherwise.
    #[arg(long)]
    chain_order: Option<PathBuf>,
    /// Input names, comma separated.
    #[arg(long, value_delimiter = ',')]
    names: Option<Vec<String>>,
    /// Name prefix when no names are given.
    #[arg(long, default_value = "x")]
    prefix: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Hansel)]
    mode: ModeArg,
    /// With --h-oracle: elicit g and h too and compose f(g(w), h(y), ...).
    #[arg(long, requires_all = ["h_oracle", "oracle"])]
    g_oracle: Option<PathBuf>,
    #[arg(long, requires = "g_oracle")]
    h_oracle: Option<PathBuf>,
}

#[derive(Deserialize)]
struct OracleNames {
    names: Option<Vec<String>>,
}

struct Oracle {
    table: TruthTable,
    names: Option<Vec<String>>,
}

fn load_oracle(path: &Path) -> Result<Oracle, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let table: TruthTable =
        serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    let names = serde_json::from_str::<OracleNames>(&text).ok().and_then(|d| d.names);
    Ok(Oracle { table, names })
}

fn inconsistency(e: MonotoneError) -> Failure {
    match e {
        MonotoneError::Inconsistent { .. } | MonotoneError::NotMonotone { .. } => Failure::Inconsistent(e.to_string()),
        other => Failure::Usage(other.to_string()),
    }
}

fn plan_for(n: usize, chain_order: Option<&Path>) -> Result<ChainPlan, Failure> {
    let plan = match chain_order {
        Some(path) => load_plan(path)?,
        None => hansel_chains(n).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    if plan.width() != n {
        return Err(Failure::Usage(format!(
            "chain order is for n = {}, the function has n = {n}",
            plan.width()
        )));
    }
    Ok(plan)
}

/// Everything reported about one finished interview.
struct Finished {
    names: Vec<String>,
    state: ElicitationState,
    table: TruthTable,
    plan: ChainPlan,
}

impl Finished {
    fn summary(&self) -> Result<(String, serde_json::Value), Failure> {
        let model = extract_dnf(&self.table, &self.plan).map_err(inconsistency)?;
        let n = self.plan.width();
        let asked = self.state.asked();
        let mut text = format!(
            "questions: {} (bound {}, exhaustive {})\n",
            asked.len(),
            question_bound(n),
            1u64 << n
        );
        let order: Vec<String> = asked.iter().map(|(v, x)| format!("{v}={}", u8::from(*x))).collect();
        text += &format!("asked: {}\n", order.join(" "));
        text += "chains (* = asked):\n";
        for (i, chain) in self.plan.chains().iter().enumerate() {
            let cells: Vec<String> = chain
                .vectors()
                .iter()
                .map(|v| {
                    let mark = if self.state.provenance(v) == Some(Provenance::Asked) { "*" } else { "" };
                    format!("{v}{mark}={}", u8::from(self.table.get(v).expect("width matches")))
                })
                .collect();
            text += &format!("  {:>2}: {}\n", i + 1, cells.join("  "));
        }
        let units: Vec<String> = model.units.iter().map(|v| v.to_string()).collect();
        text += &format!("lower units: {}\n", units.join(" "));
        let dnf = model.minimal.render_with(&self.names);
        text += &format!("dnf: {dnf}\n");
        let json = json!({
            "n": n,
            "names": self.names,
            "questions": asked.len(),
            "bound": question_bound(n),
            "exhaustive": 1u64 << n,
            "asked": order,
            "lower_units": units,
            "dnf": dnf,
            "dnf_unminimized": model.raw.render_with(&self.names),
        });
        Ok((text, json))
    }
}

fn resolve_names(args: &ElicitArgs, from_oracle: Option<Vec<String>>, n: usize) -> Result<Vec<String>, Failure> {
    let names = args
        .names
        .clone()
        .or(from_oracle)
        .unwrap_or_else(|| variable_names(&args.prefix, n));
    if names.len() != n {
        return Err(Failure::Usage(format!("{} names given for {n} inputs", names.len())));
    }
    Ok(names)
}

fn scripted(plan: ChainPlan, oracle: &Oracle, args: &ElicitArgs, names: Vec<String>) -> Result<Finished, Failure> {
    let outcome = run_interview(plan.clone(), args.mode.into(), |v| {
        oracle.table.get(&v).expect("width checked")
    })
    .map_err(inconsistency)?;
    Ok(Finished {
        names,
        state: outcome.state,
        table: outcome.table,
        plan,
    })
}

fn check_width(table: &TruthTable, n: Option<usize>) -> Result<usize, Failure> {
    match n {
        Some(n) if n != table.width() => Err(Failure::Usage(format!(
            "--n {n} but the oracle has {} inputs",
            table.width()
        ))),
        _ => Ok(table.width()),
    }
}

pub fn run(args: ElicitArgs, output: Option<&Path>) -> Result<Report, Failure> {
    if args.g_oracle.is_some() {
        return hierarchical(&args, output);
    }
    let saved_to = output.map_or_else(|| PathBuf::from("session.json"), Path::to_path_buf);
    let finished = if args.interactive {
        match interactive(&args, &saved_to)? {
            Some(f) => f,
            None => {
                let text = format!("interview stopped; progress saved to {}\n", saved_to.display());
                return Ok(Report::new(text, json!({ "complete": false, "session": saved_to })));
            }
        }
    } else {
        let oracle = load_oracle(args.oracle.as_deref().expect("clap requires an oracle"))?;
        let n = check_width(&oracle.table, args.n)?;
        let plan = plan_for(n, args.chain_order.as_deref())?;
        let names = resolve_names(&args, oracle.names.clone(), n)?;
        scripted(plan, &oracle, &args, names)?
    };
    save_model(&StoredModel::Session(finished.state.clone()), &saved_to)?;
    let (mut text, mut json) = finished.summary()?;
    text += &format!("session saved to {}\n", saved_to.display());
    json["session"] = json!(saved_to);
    Ok(Report::new(text, json))
}

fn hierarchical(args: &ElicitArgs, output: Option<&Path>) -> Result<Report, Failure> {
    let f = load_oracle(args.oracle.as_deref().expect("clap requires --oracle"))?;
    let g = load_oracle(args.g_oracle.as_deref().expect("checked by caller"))?;
    let h = load_oracle(args.h_oracle.as_deref().expect("clap requires --h-oracle"))?;
    let nf = check_width(&f.table, args.n)?;
    if nf < 2 {
        return Err(Failure::Usage("f needs at least two inputs".into()));
    }
    let mut text = String::new();
    let mut stages = Vec::new();
    let mut dnfs = Vec::new();
    let mut total = 0;
    for (label, oracle, prefix) in [("g", &g, "w"), ("h", &h, "y"), ("f", &f, "x")] {
        let n = oracle.table.width();
        let plan = match &args.chain_order {
            Some(path) if load_plan(path)?.width() == n => load_plan(path)?,
            _ => hansel_chains(n).map_err(|e| Failure::Usage(e.to_string()))?,
        };
        let names = oracle.names.clone().unwrap_or_else(|| variable_names(prefix, n));
        let done = scripted(plan, oracle, args, names)?;
        let (_, summary) = done.summary()?;
        let asked = done.state.question_count();
        total += asked;
        text += &format!("{label}: {asked} questions, {}\n", summary["dnf"].as_str().unwrap_or_default());
        dnfs.push(extract_dnf(&done.table, &done.plan).map_err(inconsistency)?.minimal);
        stages.push(json!({ "function": label, "questions": asked, "dnf": summary["dnf"] }));
    }
    let [g_dnf, h_dnf, f_dnf]: [_; 3] = dnfs.try_into().expect("three stages");
    let spec = HierarchySpec::new(f_dnf, g_dnf, h_dnf).map_err(|e| Failure::Usage(e.to_string()))?;
    let unassisted = spec.unassisted_question_count();
    text += &format!("total: {total} questions\n");
    text += &format!(
        "without monotonicity and hierarchy: 2^{} = {unassisted} questions\n",
        spec.input_width()
    );
    let saved_to = output.map_or_else(|| PathBuf::from("hierarchy.json"), Path::to_path_buf);
    save_model(&StoredModel::Hierarchy(spec), &saved_to)?;
    text += &format!("model saved to {}\n", saved_to.display());
    let json = json!({
        "stages": stages,
        "total_questions": total,
        "unassisted_questions": unassisted,
        "model": saved_to,
    });
    Ok(Report::new(text, json))
}

enum Reply {
    Yes,
    No,
    Undo,
    Quit,
}

fn read_reply(input: &mut impl BufRead) -> std::io::Result<Reply> {
    loop {
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(Reply::Quit);
        }
        match line.trim().to_ascii_lowercase().as_str() {
            "y" | "yes" | "1" => return Ok(Reply::Yes),
            "n" | "no" | "0" => return Ok(Reply::No),
            "u" | "undo" => return Ok(Reply::Undo),
            "q" | "quit" => return Ok(Reply::Quit),
            _ => eprint!("answer y, n, u or q: "),
        }
    }
}

/// Returns `None` when the expert stops early; the partial session is saved.
fn interactive(args: &ElicitArgs, saved_to: &Path) -> Result<Option<Finished>, Failure> {
    let mut state = match &args.resume {
        Some(path) => match load_model(path)? {
            StoredModel::Session(s) => s,
            other => {
                return Err(Failure::Usage(format!(
                    "{} holds a {}, not an interview",
                    path.display(),
                    other.kind()
                )))
            }
        },
        None => {
            let n = args
                .n
                .ok_or_else(|| Failure::Usage("--interactive needs --n or --resume".into()))?;
            ElicitationState::with_mode(plan_for(n, args.chain_order.as_deref())?, args.mode.into())
        }
    };
    let n = state.width();
    let names = resolve_names(args, None, n)?;
    let stdin = std::io::stdin();
    let mut input = stdin.lock();
    while let Some(q) = state.next_question() {
        let (chain, pos) = state.plan().label(&q).expect("questions come from the plan");
        eprint!(
            "[{}] chain {}, case {}: {}\n(y/n/u/q) ",
            state.question_count() + 1,
            chain + 1,
            pos + 1,
            phrase_question(&q, &names)
        );
        std::io::stderr().flush().ok();
        let value = match read_reply(&mut input)? {
            Reply::Yes => true,
            Reply::No => false,
            Reply::Undo => {
                match state.undo() {
                    Ok(cleared) => eprintln!("withdrawn; {} values cleared", cleared.len()),
                    Err(e) => eprintln!("{e}"),
                }
                continue;
            }
            Reply::Quit => {
                save_model(&StoredModel::Session(state), saved_to)?;
                return Ok(None);
            }
        };
        match state.submit_answer(q, value) {
            Ok(spread) if !spread.is_empty() => eprintln!("also settled: {} cases", spread.len()),
            Ok(_) => {}
            Err(e) => eprintln!("{e}"),
        }
    }
    let table = state.table().expect("interview complete");
    let plan = state.plan().clone();
    Ok(Some(Finished {
        names,
        state,
        table,
        plan,
    }))
}
