//! `p20`: JSON front end to the p20-core library.
//!
//! Exit status 0 on success, 1 on a domain error (structured JSON on stdout), 2 on a usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use p20_core::arith::primes_up_to;
use p20_core::atverify::{
    classify_h1, classify_two_torsion, fundamental_decomposition, lemma_r_check, table_check, verify_surface,
};
use p20_core::ellsurf::{Point, Surface, SurfaceModel};
use p20_core::heckecm::{split_type, CMRule, SplitType, Twist};
use p20_core::mwheights::{compute_po, contribution, height, ns_discriminant, ConfigLattice};
use p20_core::qforms::FormClassGroup;
use p20_core::registry::{builtin, builtin_names};
use p20_core::{BigRational, Error, Result};

const TWO_TORSION_NOTE: &str = "Completeness beyond the bound is not proven: at most one further \
discriminant can exist, and none does if the generalized Riemann hypothesis holds.";

#[derive(Parser)]
#[command(name = "p20", version, about = "Arithmetic of singular K3 surfaces with Picard rank 20 over Q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class group of a negative discriminant.
    Classgroup {
        #[arg(short = 'd', allow_negative_numbers = true)]
        d: i64,
    },
    /// Discriminants with class number one, or with 2-torsion class group.
    Classify {
        #[arg(long, default_value_t = 10_000)]
        bound: u64,
        #[arg(long)]
        two_torsion: bool,
    },
    /// CM newform coefficients at primes up to a bound.
    Ap {
        #[arg(long = "dK", visible_alias = "dk", allow_negative_numbers = true)]
        d_k: i64,
        /// Squarefree quadratic twist parameter.
        #[arg(long, allow_negative_numbers = true)]
        twist: Option<i64>,
        #[arg(long, default_value_t = 100)]
        pmax: u64,
    },
    /// Points of the smooth surface (or of one fiber) over F_p.
    Count {
        #[arg(long)]
        model: String,
        #[arg(long)]
        p: u64,
        /// A residue `0..p-1` or `inf`; omit for the whole surface.
        #[arg(long)]
        t: Option<String>,
    },
    /// Singular fibers of a model.
    Fibers {
        #[arg(long)]
        model: String,
    },
    /// Artin-Tate and CM verification at all primes up to a bound.
    Verify {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 200)]
        pmax: u64,
        /// Field discriminant; defaults to the fundamental part of the model discriminant.
        #[arg(long = "dK", visible_alias = "dk", allow_negative_numbers = true)]
        d_k: Option<i64>,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Height of a declared section.
    Height {
        #[arg(long)]
        model: String,
        #[arg(long)]
        section: usize,
    },
    /// Discriminant of the Neron-Severi lattice from fibers and Mordell-Weil data.
    Nsdisc {
        #[arg(long)]
        model: String,
    },
    /// Compare primes represented by the principal forms of discriminants d and d r^2.
    LemmaR {
        #[arg(short = 'd', allow_negative_numbers = true)]
        d: i64,
        #[arg(short = 'r')]
        r: u64,
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
    },
    /// Consistency checks on the reference table of configurations.
    TableCheck,
    /// Built-in models.
    ListModels,
}

fn load_model(arg: &str) -> Result<SurfaceModel> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Model(format!("{arg}: {e}")))?;
        return SurfaceModel::from_json(&text);
    }
    builtin(arg)
}

fn surface(arg: &str) -> Result<Surface> {
    Surface::new(load_model(arg)?)
}

fn rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn classgroup(d: i64) -> Result<Value> {
    let g = FormClassGroup::new(d)?;
    let forms: Vec<[i64; 3]> = g.forms().iter().map(|f| [f.a, f.b, f.c]).collect();
    Ok(json!({
        "d": d,
        "h": g.class_number(),
        "invariant_factors": g.elementary_divisors(),
        "two_torsion": g.is_two_torsion(),
        "forms": forms,
    }))
}

fn classify(bound: u64, two_torsion: bool) -> Value {
    if two_torsion {
        let list = classify_two_torsion(bound);
        json!({
            "bound": bound,
            "mode": "two_torsion",
            "count": list.len(),
            "discriminants": list,
            "note": TWO_TORSION_NOTE,
        })
    } else {
        let list = classify_h1(bound);
        json!({ "bound": bound, "mode": "class_number_one", "count": list.len(), "discriminants": list })
    }
}

fn ap(d_k: i64, twist: Option<i64>, pmax: u64) -> Result<Value> {
    let mut rule = CMRule::new(d_k)?;
    if let Some(delta) = twist {
        rule = rule.with_twist(Twist::Quadratic(delta))?;
    }
    let rows: Vec<Value> = primes_up_to(pmax)
        .into_iter()
        .map(|p| {
            let st = split_type(d_k, p);
            let a = match st {
                SplitType::Ramified => Value::Null,
                _ => rule.ap(p).map_or(Value::Null, |a| json!(a)),
            };
            json!({ "p": p, "split": st, "ap": a })
        })
        .collect();
    Ok(json!({ "rule": to_json(&rule), "coefficients": rows }))
}

fn count(model: &str, p: u64, t: Option<&str>) -> Result<Value> {
    let s = surface(model)?;
    let counter = s.counter(p)?;
    let name = &s.model().name;
    match t {
        None => Ok(json!({ "model": name, "p": p, "count": counter.total()?.to_string() })),
        Some(t) => {
            let pt = if t == "inf" {
                Point::Infinity
            } else {
                let v: u64 = t.parse().map_err(|_| Error::Precondition(format!("bad fiber {t:?}")))?;
                if v >= p {
                    return Err(Error::Precondition(format!("fiber t = {v} must be below p = {p}")));
                }
                Point::Finite(v)
            };
            Ok(json!({ "model": name, "p": p, "t": t, "count": counter.count(pt)?.to_string() }))
        }
    }
}

fn fibers(model: &str) -> Result<Value> {
    let s = surface(model)?;
    Ok(json!({
        "model": s.model().name,
        "d": s.model().d,
        "rank20_over_Q": s.model().rank20_over_q,
        "fibers": to_json(&s.fibers()),
        "euler_sum": s.euler_sum(),
        "matches_expected": s.matches_expected(),
    }))
}

fn verify(model: &str, pmax: u64, d_k: Option<i64>, out: Option<&Path>) -> Result<Value> {
    let m = load_model(model)?;
    let d_k = match d_k {
        Some(d) => d,
        None => fundamental_decomposition(m.d)?.0,
    };
    let report = verify_surface(&m, &CMRule::new(d_k)?, pmax)?;
    let v = to_json(&report);
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&v).expect("json");
        std::fs::write(path, text + "\n").map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
    }
    Ok(v)
}

fn height_cmd(model: &str, index: usize) -> Result<Value> {
    let s = surface(model)?;
    let sec = s
        .model()
        .sections
        .get(index)
        .ok_or_else(|| Error::Precondition(format!("model has {} sections", s.model().sections.len())))?;
    let fibers: Vec<(String, _)> = s.places().iter().map(|p| (p.label(), p.kodaira)).collect();
    let po = compute_po(sec)?;
    let h = height(sec, &fibers, po)?;
    let mut contributions = Vec::new();
    for (label, idx) in &sec.component_hits {
        if let Some((_, t)) = fibers.iter().find(|(l, _)| l == label) {
            contributions.push(json!({
                "place": label,
                "type": t.to_string(),
                "component": idx,
                "value": rational(&contribution(*t, *idx)?),
            }));
        }
    }
    Ok(json!({
        "model": s.model().name,
        "section": index,
        "torsion_order": sec.torsion_order,
        "PO": po,
        "contributions": contributions,
        "height": rational(&h),
    }))
}

fn nsdisc(model: &str) -> Result<Value> {
    let s = surface(model)?;
    let cfg = ConfigLattice::from_surface(&s)?;
    let nd = ns_discriminant(&cfg)?;
    let gram = cfg.mw_gram.as_ref().map(|g| {
        g.iter().map(|r| r.iter().map(rational).collect::<Vec<_>>()).collect::<Vec<_>>()
    });
    Ok(json!({
        "model": s.model().name,
        "d": s.model().d,
        "root_discs": cfg.root_discs(),
        "mw_rank": cfg.mw_rank,
        "torsion_order": cfg.torsion_order,
        "mw_gram": gram,
        "ns_discriminant": nd,
        "matches_d": nd == s.model().d,
    }))
}

fn list_models() -> Result<Value> {
    let mut out = Vec::new();
    for name in builtin_names() {
        let m = builtin(name)?;
        let config: Vec<Value> = m.expected_config.iter().map(|(l, t)| json!([l, t.to_string()])).collect();
        out.push(json!({
            "name": name,
            "d": m.d,
            "rank20_over_Q": m.rank20_over_q,
            "sections": m.sections.len(),
            "expected_config": config,
        }));
    }
    Ok(json!({ "models": out, "families": ["d4:<delta>"] }))
}

fn run(cmd: Command) -> Result<Value> {
    match cmd {
        Command::Classgroup { d } => classgroup(d),
        Command::Classify { bound, two_torsion } => Ok(classify(bound, two_torsion)),
        Command::Ap { d_k, twist, pmax } => ap(d_k, twist, pmax),
        Command::Count { model, p, t } => count(&model, p, t.as_deref()),
        Command::Fibers { model } => fibers(&model),
        Command::Verify { model, pmax, d_k, out } => verify(&model, pmax, d_k, out.as_deref()),
        Command::Height { model, section } => height_cmd(&model, section),
        Command::Nsdisc { model } => nsdisc(&model),
        Command::LemmaR { d, r, bound } => lemma_r_check(d, r, bound).map(|x| to_json(&x)),
        Command::TableCheck => table_check().map(|x| to_json(&x)),
        Command::ListModels => list_models(),
    }
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn configure_threads() {
    if let Some(n) = std::env::var("P20_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            print(&json!({ "error": { "code": "USAGE", "message": e.to_string().trim_end() } }));
            return ExitCode::from(2);
        }
    };
    configure_threads();
    match run(cli.command) {
        Ok(v) => {
            print(&v);
            ExitCode::SUCCESS
        }
        Err(e) => {
            print(&json!({ "error": { "code": e.code(), "message": e.to_string() } }));
            ExitCode::from(1)
        }
    }
}
