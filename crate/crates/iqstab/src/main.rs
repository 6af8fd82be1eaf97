use std::io::Write;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_traits::Zero;
use serde_json::json;

use iqstab::checks::{run_checks, CheckReport, Status};
use iqstab::gcb::{based_irreducible, based_tensor, Based};
use iqstab::iqg::{g_m, trivial_submodule, IContext, IrrCache};
use iqstab::rep::DEFAULT_SIZE_BOUND;
use iqstab::rootdata::{admissible_pair, build_datum, fmt_weight, parse_weight, AdmissiblePair, PairKind, RootDatum, Series, Weight};
use iqstab::stability::build_pi_i;
use iqstab::{Error, Result};

#[derive(Parser)]
#[command(name = "iqstab", version, about = "Canonical and icanonical bases of quantum symmetric pairs")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for `verify`.
    #[arg(long, global = true, default_value_t = 1)]
    parallel: usize,
    /// Largest module dimension that will be constructed.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_BOUND)]
    size_bound: usize,
    #[command(subcommand)]
    cmd: Cmd,
}

/// A module, either `--module <series><rank>:<weight>[,<weight>..]` (a
/// tensor product) or `--kind K [--n N] [--weight W,..]` on the pair's root
/// datum, defaulting to `V(varpi)`.
#[derive(clap::Args)]
struct ModuleArgs {
    #[arg(long, conflicts_with = "kind", required_unless_present = "kind")]
    module: Option<String>,
    #[arg(long)]
    kind: Option<PairKind>,
    #[arg(long, requires = "kind")]
    n: Option<usize>,
    #[arg(long, requires = "kind")]
    weight: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cartan datum of a series, or of the pair `--kind`.
    Datum {
        #[arg(long, required_unless_present = "kind")]
        series: Option<String>,
        #[arg(long)]
        kind: Option<PairKind>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Admissible pair data, as JSON.
    Pair {
        #[arg(long)]
        kind: PairKind,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Representation matrices of a module.
    Module {
        #[command(flatten)]
        module: ModuleArgs,
        /// Print every nonzero matrix entry.
        #[arg(long)]
        dump: bool,
    },
    /// Global basis of a module.
    Gcb {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        dump_global: bool,
    },
    /// Crystal of a module.
    Crystal {
        #[command(flatten)]
        module: ModuleArgs,
        #[arg(long)]
        dump_dot: bool,
    },
    /// Coideal data on `V(weight)` (default: the distinguished weight).
    Iqg {
        #[arg(long)]
        kind: PairKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        weight: Option<String>,
        /// The invariant vector `w_0`.
        #[arg(long)]
        w0: bool,
        /// The icanonical basis.
        #[arg(long)]
        icb: bool,
        /// The functional `g_m` on `V(m varpi)`.
        #[arg(long)]
        g: Option<usize>,
    },
    /// One stability instance.
    Stability {
        #[arg(long)]
        kind: PairKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value = "0")]
        lambda: String,
        #[arg(long, default_value = "0")]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Run registered checks matching a glob.
    Verify {
        #[arg(default_value = "*")]
        selection: String,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Report elapsed_ms as 0 so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Summarize a JSON report written by `verify`.
    Report { file: std::path::PathBuf },
}

/// `A3`, `F4`, `A1xA1`, or a bare letter whose rank comes from `--n`.
fn parse_series(s: &str) -> Result<(Series, Option<usize>)> {
    let bad = || Error::UnsupportedType(s.to_string());
    if s.eq_ignore_ascii_case("A1xA1") {
        return Ok((Series::A1xA1, Some(2)));
    }
    if s.is_empty() {
        return Err(bad());
    }
    let (head, rank) = s.split_at(1);
    let n = if rank.is_empty() { None } else { Some(rank.parse::<usize>().map_err(|_| bad())?) };
    let series = match head.to_ascii_uppercase().as_str() {
        "A" => Series::A,
        "B" => Series::B,
        "C" => Series::C,
        "D" => Series::D,
        "F" => Series::F4,
        _ => return Err(bad()),
    };
    Ok((series, n))
}

fn datum_of(series: &str, n: Option<usize>) -> Result<Arc<RootDatum>> {
    let (s, r) = parse_series(series)?;
    let rank = n.or(r).ok_or_else(|| Error::UnsupportedType(format!("{series} needs a rank")))?;
    Ok(Arc::new(build_datum(s, rank)?))
}

/// Parses `A2:w1,w2` into a datum and factor weights.
fn parse_module(args: &ModuleArgs) -> Result<(Arc<RootDatum>, Vec<Weight>)> {
    let Some(spec) = &args.module else {
        let pair = pair_of(args.kind.expect("clap requires --kind"), args.n)?;
        let datum = Arc::new(pair.datum.clone());
        let weights = match &args.weight {
            Some(ws) => ws.split(',').map(|w| parse_weight(w, datum.rank)).collect::<Result<Vec<_>>>()?,
            None => vec![pair.varpi.clone()],
        };
        for w in &weights {
            datum.check_dominant(w)?;
        }
        return Ok((datum, weights));
    };
    let (series, ws) = spec.split_once(':').ok_or_else(|| Error::UnsupportedType(format!("module spec {spec:?} needs <series><rank>:<weights>")))?;
    let datum = datum_of(series, None)?;
    let weights = ws.split(',').map(|w| parse_weight(w, datum.rank)).collect::<Result<Vec<_>>>()?;
    for w in &weights {
        datum.check_dominant(w)?;
    }
    Ok((datum, weights))
}

/// The based module together with its factor irreducibles.
fn build_module(args: &ModuleArgs, bound: usize) -> Result<(String, Based, Vec<Based>)> {
    let (datum, weights) = parse_module(args)?;
    let name = format!("{}:{}", datum.name(), weights.iter().map(|w| fmt_weight(w)).collect::<Vec<_>>().join(","));
    let total: u64 = weights.iter().map(|w| datum.weyl_dimension(w)).product();
    if total as usize > bound {
        return Err(Error::SizeBound { dim: total as usize, bound });
    }
    let factors = weights.iter().map(|w| based_irreducible(&datum, w, bound)).collect::<Result<Vec<_>>>()?;
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        acc = based_tensor(&acc, f)?;
    }
    Ok((name, acc, factors))
}

/// Label of pure index `p` as `l1 (x) l2 (x) ..`.
fn pure_label(factors: &[Based], mut p: usize) -> String {
    let mut parts = Vec::with_capacity(factors.len());
    for f in factors.iter().rev() {
        parts.push(f.label(p % f.dim()).to_string());
        p /= f.dim();
    }
    parts.reverse();
    parts.join("⊗")
}

fn render_pure(factors: &[Based], v: &iqstab::linalg::SVec) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.iter().map(|(k, x)| if x.is_one() { pure_label(factors, k) } else { format!("({x})*{}", pure_label(factors, k)) }).collect::<Vec<_>>().join(" + ")
}

fn pair_of(kind: PairKind, n: Option<usize>) -> Result<Arc<AdmissiblePair>> {
    Ok(Arc::new(admissible_pair(kind, n.unwrap_or(kind.min_rank()))?))
}

/// Pair data as JSON, including the table `varpi_i + w_black tau varpi_i`.
fn pair_info(p: &AdmissiblePair) -> serde_json::Value {
    let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
    let sig: Vec<String> = p.varsigma.iter().map(|s| s.as_ref().map_or("-".into(), |x| x.to_string())).collect();
    let table: Vec<String> = (0..p.rank()).map(|i| fmt_weight(&p.nu_plus_theta(&p.datum.fundamental(i)))).collect();
    json!({"pair": p.name(), "datum": p.datum.name(), "cartan": p.datum.cartan, "black": one(&p.black), "tau": one(&p.tau), "varsigma": sig, "varpi": fmt_weight(&p.varpi), "w_black": one(&p.w_black), "y_imath_basis": p.y_imath_basis(), "varpi_i_plus_theta": table})
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn print(json_mode: bool, value: serde_json::Value, text: String) {
    if json_mode {
        emit(&format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable")));
    } else {
        emit(&text);
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let bound = cli.size_bound;
    let js = cli.json;
    match cli.cmd {
        Cmd::Datum { series, kind, n } => {
            if let Some(kind) = kind {
                let value = pair_info(&*pair_of(kind, n)?);
                print(true, value, String::new());
            } else {
                let d = datum_of(series.as_deref().unwrap_or_default(), n)?;
                let text = format!("{}\ncartan {:?}\nd {:?}\npositive roots {}\n", d.name(), d.cartan, d.d, d.positive_roots().len());
                print(js, json!({"name": d.name(), "cartan": d.cartan, "d": d.d, "positive_roots": d.positive_roots().len()}), text);
            }
        }
        Cmd::Pair { kind, n } => {
            print(true, pair_info(&*pair_of(kind, n)?), String::new());
        }
        Cmd::Module { module, dump } => {
            let (module, b, _) = build_module(&module, bound)?;
            let m = &b.module;
            m.check_relations().map_err(Error::Internal)?;
            let mut text = format!("dim {}\nweights {}\n", m.dim(), m.by_weight.len());
            if dump {
                text.push_str(&m.dump());
            }
            let wts: Vec<String> = m.weights.iter().map(|w| fmt_weight(w)).collect();
            print(js, json!({"module": module, "dim": m.dim(), "weights": wts}), text);
        }
        Cmd::Gcb { module, dump_global } => {
            let (module, b, factors) = build_module(&module, bound)?;
            let mut text = format!("dim {}\n", b.dim());
            let mut rows = Vec::new();
            for k in 0..b.dim() {
                let v = render_pure(&factors, &b.to_pure.apply(&iqstab::linalg::SVec::unit(k)));
                if dump_global {
                    text.push_str(&format!("b={} : {v}\n", b.label(k)));
                }
                rows.push(json!({"b": b.label(k), "vector": v}));
            }
            print(js, json!({"module": module, "dim": b.dim(), "global": rows}), text);
        }
        Cmd::Crystal { module, dump_dot } => {
            let (module, b, _) = build_module(&module, bound)?;
            let c = &b.crystal;
            let text = if dump_dot {
                c.to_dot()
            } else {
                let hw: Vec<String> = c.hw_elements().iter().map(|&h| c.labels[h].clone()).collect();
                format!("elements {}\ncomponents {}\nhighest {}\n", c.len(), c.components().len(), hw.join(" "))
            };
            let hw: Vec<String> = c.hw_elements().iter().map(|&h| c.labels[h].clone()).collect();
            print(js, json!({"module": module, "elements": c.len(), "highest": hw, "dot": c.to_dot()}), text);
        }
        Cmd::Iqg { kind, n, weight, w0, icb, g } => {
            let p = pair_of(kind, n)?;
            let datum = Arc::new(p.datum.clone());
            let mut cache = IrrCache::default();
            if let Some(m) = g {
                let (gm, ctx) = g_m(&p, m, &mut cache, bound)?;
                let terms: Vec<String> = (0..ctx.dim()).filter(|&k| !gm.get(0, k).is_zero()).map(|k| format!("{} -> {}", ctx.label(k), gm.get(0, k))).collect();
                print(js, json!({"pair": p.name(), "m": m, "g": terms}), terms.iter().map(|t| format!("{t}\n")).collect());
                return Ok(ExitCode::SUCCESS);
            }
            let lambda = match &weight {
                Some(w) => parse_weight(w, datum.rank)?,
                None => p.varpi.clone(),
            };
            let v = based_irreducible(&datum, &lambda, bound)?;
            let ctx = IContext::new(p.clone(), v, &mut cache, bound)?;
            let mut text = format!("{} V({}) dim {} ibar via {}\n", p.name(), fmt_weight(&lambda), ctx.dim(), ctx.path);
            let mut value = json!({"pair": p.name(), "weight": fmt_weight(&lambda), "dim": ctx.dim(), "ibar_path": ctx.path.to_string()});
            if w0 {
                let w = trivial_submodule(&ctx)?;
                let r = ctx.module().render(&w);
                text.push_str(&format!("w0 = {r}\n"));
                value["w0"] = json!(r);
            }
            if icb {
                let mut rows = Vec::new();
                for b in 0..ctx.dim() {
                    let r = ctx.module().render(&ctx.icb.cols[b]);
                    text.push_str(&format!("b={} : {r}\n", ctx.label(b)));
                    rows.push(json!({"b": ctx.label(b), "vector": r}));
                }
                value["icb"] = json!(rows);
            }
            print(js, value, text);
        }
        Cmd::Stability { kind, n, lambda, mu, nu } => {
            let p = pair_of(kind, n)?;
            let r = p.rank();
            let (l, m, v) = (parse_weight(&lambda, r)?, parse_weight(&mu, r)?, parse_weight(&nu, r)?);
            let mut cache = IrrCache::default();
            let inst = build_pi_i(&p, &l, &m, &v, &mut cache, bound)?;
            let rep = inst.verify(&mut cache, bound)?;
            let items: Vec<serde_json::Value> = rep.items.iter().map(|i| json!({"name": i.name, "pass": i.result.is_ok(), "witness": i.result.as_ref().err()})).collect();
            let map: Vec<serde_json::Value> = rep
                .crystal_map
                .iter()
                .enumerate()
                .map(|(b, t)| json!({"b": inst.source.sub.label(b), "image": t.map(|t| inst.target.sub.label(t).to_string())}))
                .collect();
            let mut text = format!("{} source dim {} target dim {} m={}\n", inst.key(), rep.source_dim, rep.target_dim, inst.m);
            for i in &rep.items {
                text.push_str(&format!("{:<20} {}\n", i.name, i.result.as_ref().map_or_else(|w| format!("FAIL {w}"), |_| "ok".into())));
            }
            let value = json!({"instance": inst.key(), "m": inst.m, "source_dim": rep.source_dim, "target_dim": rep.target_dim, "pass": rep.pass(), "items": items, "crystal_map": map});
            print(js, value, text);
            if !rep.pass() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Verify { selection, out, no_timing } => {
            let mut reports = run_checks(&selection, cli.parallel, bound)?;
            if no_timing {
                for r in &mut reports {
                    r.elapsed_ms = 0;
                }
            }
            let doc = serde_json::to_string_pretty(&reports).expect("serializable");
            if let Some(path) = out {
                std::fs::write(&path, &doc).map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
            }
            if js {
                emit(&format!("{doc}\n"));
            } else {
                for r in &reports {
                    emit(&format!("{}\n", line(r)));
                }
            }
            if reports.iter().any(|r| r.status == Status::Fail) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Report { file } => {
            let s = std::fs::read_to_string(&file).map_err(|e| Error::Internal(format!("{}: {e}", file.display())))?;
            let reports: Vec<CheckReport> = serde_json::from_str(&s).map_err(|e| Error::Internal(e.to_string()))?;
            let count = |st: Status| reports.iter().filter(|r| r.status == st).count();
            let (p, f, s) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
            let mut text = String::new();
            for r in reports.iter().filter(|r| r.status != Status::Pass) {
                text.push_str(&format!("{}\n", line(r)));
            }
            text.push_str(&format!("{p} pass, {f} fail, {s} skipped\n"));
            print(js, json!({"pass": p, "fail": f, "skipped": s}), text);
            if f > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn line(r: &CheckReport) -> String {
    let st = match r.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skipped => "SKIPPED",
    };
    match &r.witness {
        Some(w) => format!("{st:<8}{} ({} ms) {w}", r.check_id, r.elapsed_ms),
        None => format!("{st:<8}{} ({} ms)", r.check_id, r.elapsed_ms),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
