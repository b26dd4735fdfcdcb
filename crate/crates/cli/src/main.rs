use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use multistat::analysis::{self, AnalysisError, AnalyzeOptions};
use multistat::connectivity::{probe, ProbeConfig};
use multistat::network::{parse_network, ReactionNetwork};
use multistat::regions::{regions_for, RegionError, RegionKind};
use multistat::scalar::parse_rational;
use multistat::unipoly::{descartes_sign_changes, sturm_count_positive, trinomial_d, trinomial_positive_roots, TrinomialForm};
use multistat::{RatPoly, Rational};

const EXIT_PARSE: u8 = 2;
const EXIT_UNSUPPORTED: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(name = "multistat", version, about = "Multistationarity of small mass-action networks")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Allowing,
    Enabling,
}

impl From<Kind> for RegionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Allowing => RegionKind::Allowing,
            Kind::Enabling => RegionKind::Enabling,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a network file and print its structure.
    Parse { file: PathBuf },
    /// Classification, regions, connectivity and a self-check.
    Analyze {
        file: PathBuf,
        /// Skip the region-versus-oracle self-check.
        #[arg(long)]
        no_verify: bool,
        /// Also probe the enabling region with this many samples.
        #[arg(long)]
        samples: Option<usize>,
        /// Sampling interval for rates, `lo:hi`.
        #[arg(long = "box", default_value = "0.125:8")]
        bounds: String,
    },
    /// Print one region.
    Region {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "enabling")]
        kind: Kind,
    },
    /// Steady states at given parameters, or at a point of the region.
    Witness {
        file: PathBuf,
        /// Comma-separated rate constants.
        #[arg(long)]
        rates: Option<String>,
        /// Comma-separated total constants.
        #[arg(long)]
        totals: Option<String>,
    },
    /// Sampling evidence for the connectivity of a region.
    Probe {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "allowing")]
        kind: Kind,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[arg(long = "box", default_value = "0.125:8")]
        bounds: String,
        /// Write accepted samples with component labels here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Compare Descartes, Sturm and the trinomial trichotomy.
    CountRoots {
        #[arg(long)]
        poly: String,
    },
}

struct Failure {
    code: u8,
    msg: String,
    report: Option<Value>,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into(), report: None }
}

fn read_network(path: &PathBuf) -> Result<ReactionNetwork, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    parse_network(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn parse_box(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || fail(EXIT_PARSE, format!("--box expects lo:hi with 0 < lo <= hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let (lo, hi): (f64, f64) = (lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?);
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn parse_list(s: Option<&str>, what: &str) -> Result<Vec<Rational>, Failure> {
    let Some(s) = s else { return Ok(Vec::new()) };
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| parse_rational(t).ok_or_else(|| fail(EXIT_PARSE, format!("bad {what} value {t:?}"))))
        .collect()
}

fn region_failure(e: RegionError) -> Failure {
    match e {
        RegionError::Unsupported(_) | RegionError::NotInFamily(_) => fail(EXIT_UNSUPPORTED, e.to_string()),
        RegionError::Dimension { .. } => fail(EXIT_PARSE, e.to_string()),
    }
}

/// `(json, text)` for the chosen command.
fn run(cli: &Cli) -> Result<(Value, String), Failure> {
    match &cli.cmd {
        Cmd::Parse { file } => {
            let net = read_network(file)?;
            let dims = analysis::dimensions(&net);
            let cons = net.conservation_matrix();
            let rows: Vec<Vec<String>> = (0..cons.d()).map(|i| cons.row(i).iter().map(ToString::to_string).collect()).collect();
            let reactions: Vec<Value> = net
                .reactions
                .iter()
                .map(|r| json!({ "reactant": r.reactant.coeffs, "product": r.product.coeffs, "label": r.rate_label, "vector": r.vector() }))
                .collect();
            let v = json!({
                "schema_version": analysis::SCHEMA_VERSION,
                "network": net.to_string(),
                "species": net.species,
                "reactions": reactions,
                "dimensions": dims,
                "conservation_matrix": rows,
            });
            let text = format!("{}species: {}\nn = {}, r = {}, dim S = {}, d = {}\n", net, net.species.join(" "), dims.n, dims.r, dims.dim_s, dims.d);
            Ok((v, text))
        }
        Cmd::Analyze { file, no_verify, samples, bounds } => {
            let net = read_network(file)?;
            let (lo, hi) = parse_box(bounds)?;
            let opts = AnalyzeOptions { seed: cli.seed, verify: !no_verify, probe: samples.map(|n| (lo, hi, n)), ..Default::default() };
            match analysis::analyze(&net, &opts) {
                Ok(rep) => Ok((serde_json::to_value(&rep).expect("serializable"), rep.to_text())),
                Err(AnalysisError::Unsupported(m)) => Err(fail(EXIT_UNSUPPORTED, m)),
                Err(AnalysisError::Inconsistency { detail, report }) => Err(Failure {
                    code: EXIT_INCONSISTENT,
                    msg: detail,
                    report: serde_json::to_value(&*report).ok(),
                }),
            }
        }
        Cmd::Region { file, kind } => {
            let net = read_network(file)?;
            let pair = regions_for(&net).map_err(region_failure)?;
            let region = pair.get((*kind).into());
            let text = format!(
                "{} region [{}] ({}):\n{}connectivity: {:?} ({:?})\n",
                if matches!(kind, Kind::Allowing) { "allowing" } else { "enabling" },
                region.ambient.join(", "),
                region.case_tag(),
                analysis::region_text(region),
                region.connectivity.value,
                region.connectivity.justification
            );
            Ok((serde_json::to_value(region).expect("serializable"), text))
        }
        Cmd::Witness { file, rates, totals } => {
            let net = read_network(file)?;
            let w = match rates {
                Some(r) => {
                    let rates = parse_list(Some(r), "rate")?;
                    let totals = parse_list(totals.as_deref(), "total")?;
                    analysis::oracle_at(&net, &rates, &totals).map_err(|e| {
                        let code = if matches!(e, multistat::massaction::OracleError::TooManySpecies(_)) { EXIT_UNSUPPORTED } else { EXIT_PARSE };
                        fail(code, e.to_string())
                    })?
                }
                None => match analysis::find_witness(&net, cli.seed) {
                    Ok(Some(w)) => w,
                    Ok(None) => return Ok((json!({ "schema_version": analysis::SCHEMA_VERSION, "witness": null }), "no point with two or more steady states found\n".into())),
                    Err(AnalysisError::Unsupported(m)) => return Err(fail(EXIT_UNSUPPORTED, m)),
                    Err(e) => return Err(fail(EXIT_INCONSISTENT, e.to_string())),
                },
            };
            let pt: Vec<String> = w.rates.iter().map(ToString::to_string).collect();
            let ct: Vec<String> = w.totals.iter().map(ToString::to_string).collect();
            let mut text = format!("rates: {}\ntotals: {}\ncount: {:?}\n", pt.join(", "), ct.join(", "), w.count);
            for s in &w.steady_states {
                let xs: Vec<String> = s.x.iter().map(ToString::to_string).collect();
                text.push_str(&format!("  ({}){}\n", xs.join(", "), if s.exact { "" } else { " approx" }));
            }
            let mut v = serde_json::to_value(&w).expect("serializable");
            v["schema_version"] = json!(analysis::SCHEMA_VERSION);
            Ok((v, text))
        }
        Cmd::Probe { file, kind, samples, bounds, csv } => {
            let net = read_network(file)?;
            let (lo, hi) = parse_box(bounds)?;
            let pair = regions_for(&net).map_err(region_failure)?;
            let region = pair.get((*kind).into());
            let cfg = ProbeConfig::for_region(region, lo, hi, *samples, cli.seed);
            let rep = probe(region, &cfg).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
            if let Some(path) = csv {
                std::fs::write(path, rep.to_csv(&region.ambient)).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
            }
            let text = format!(
                "analytic: {:?} ({:?})\nprobe (evidence, seed {}): {} of {} samples accepted, {} components, {} edges\n",
                region.connectivity.value,
                region.connectivity.justification,
                rep.seed,
                rep.accepted_samples,
                rep.n_samples,
                rep.component_count,
                rep.edge_count
            );
            let v = json!({
                "schema_version": analysis::SCHEMA_VERSION,
                "connectivity": region.connectivity,
                "probe": rep,
            });
            Ok((v, text))
        }
        Cmd::CountRoots { poly } => {
            let p = RatPoly::parse(poly).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
            let descartes = descartes_sign_changes(&p).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
            let sturm = sturm_count_positive(&p).map_err(|e| fail(EXIT_PARSE, e.to_string()))?;
            let tri = TrinomialForm::from_poly(&p).map(|t| {
                json!({
                    "n": t.n(),
                    "k": t.k(),
                    "b": t.b().to_string(),
                    "c": t.c().to_string(),
                    "D": trinomial_d(&t).to_string(),
                    "positive_roots": trinomial_positive_roots(&t),
                })
            });
            let mut text = format!("polynomial: {p}\ndescartes: {descartes}\nsturm: {sturm}\n");
            match &tri {
                Some(t) => text.push_str(&format!("trichotomy: {} (D = {})\n", t["positive_roots"], t["D"].as_str().unwrap_or(""))),
                None => text.push_str("trichotomy: not an alternating trinomial\n"),
            }
            let v = json!({
                "schema_version": analysis::SCHEMA_VERSION,
                "polynomial": p.to_string(),
                "descartes": descartes,
                "sturm": sturm,
                "trichotomy": tri,
            });
            Ok((v, text))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((v, text)) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&v).expect("json")),
                Format::Text => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let (Some(r), Format::Json) = (&f.report, cli.format) {
                println!("{}", serde_json::to_string_pretty(r).expect("json"));
            }
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
