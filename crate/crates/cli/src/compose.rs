use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;
use spi_discovery::io::{load_model, StoredModel};
use spi_discovery::monotone::{fixtures, BitVector, Dnf, HierarchySpec};

use crate::report::{Failure, Report};

#[derive(Args)]
pub struct ComposeArgs {
    /// A saved hierarchy model; the bundled expert model when nothing is given.
    #[arg(long, conflicts_with_all = ["f", "g", "h"])]
    model: Option<PathBuf>,
    /// DNF files for the parts; each replaces the bundled one.
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    g: Option<PathBuf>,
    #[arg(long)]
    h: Option<PathBuf>,
    /// Raw inputs `w y x3...`; spaces are ignored.
    #[arg(long)]
    eval: Option<String>,
}

fn load_dnf(path: &Path) -> Result<Dnf, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
    Ok(serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?)
}

fn model(args: &ComposeArgs) -> Result<HierarchySpec, Failure> {
    if let Some(path) = &args.model {
        return match load_model(path)? {
            StoredModel::Hierarchy(h) => Ok(h),
            other => Err(Failure::Usage(format!(
                "{} holds a {}, not a hierarchy",
                path.display(),
                other.kind()
            ))),
        };
    }
    let bundled = fixtures::expert_model();
    let pick = |path: &Option<PathBuf>, default: Dnf| path.as_deref().map_or(Ok(default), load_dnf);
    let f = pick(&args.f, bundled.f)?;
    let g = pick(&args.g, bundled.g)?;
    let h = pick(&args.h, bundled.h)?;
    HierarchySpec::new(f, g, h).map_err(|e| Failure::Usage(e.to_string()))
}

pub fn run(args: ComposeArgs) -> Result<Report, Failure> {
    let spec = model(&args)?;
    let width = spec.input_width();
    let names = spec.input_names();
    let flat = spec.flatten().render_with(&names);
    let unassisted = spec.unassisted_question_count();
    let mut text = format!("f(g(w), h(y), x3..) = {flat}\n");
    let mut json = json!({ "inputs": names, "dnf": flat, "unassisted_questions": unassisted });
    if let Some(raw) = &args.eval {
        let bits: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
        let v: BitVector = bits.parse().map_err(|e: spi_discovery::monotone::MonotoneError| Failure::Usage(e.to_string()))?;
        if v.width() != width {
            return Err(Failure::Usage(format!("--eval has {} bits, the model takes {width}", v.width())));
        }
        let (gw, hw) = (spec.g.width(), spec.h.width());
        let slice = |from: usize, len: usize| {
            BitVector::from_bools(&v.to_bools()[from..from + len]).expect("widths come from the model")
        };
        let x1 = spec.g.eval(&slice(0, gw)).expect("width matches");
        let x2 = spec.h.eval(&slice(gw, hw)).expect("width matches");
        let value = spec.eval_flat(&v).expect("width checked");
        text += &format!("g(w) = {}, h(y) = {}\n", u8::from(x1), u8::from(x2));
        text += &format!("value: {}\n", u8::from(value));
        json["input"] = json!(bits);
        json["g"] = json!(u8::from(x1));
        json["h"] = json!(u8::from(x2));
        json["value"] = json!(u8::from(value));
    }
    text += &format!("unassisted tabulation: 2^{width} = {unassisted} questions\n");
    Ok(Report::new(text, json))
}
