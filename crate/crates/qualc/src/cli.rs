//! Command-line surface: `convert`, `solve`, `casestudy`, `bench` and
//! `validate`. Each command produces a [`RunReport`] whose status fixes the
//! process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use qualc_core::emit::{default_colors, emit, emit_coloring, Variant};
use qualc_core::geo::{self, build_network, buffer, Region};
use qualc_core::solver::{
    brute_force, brute_force_models, color_graph, overlap_graph, solve_with, solve_with_coloring,
    verify, Assignment, Mode, SolveConfig, SolveResult, Status,
};
use qualc_core::{normalize, Calculus, NormalizedNetwork, RelationSet, Tier};

use crate::antenna::{read_antennas_file, write_antennas, write_pair_table, Synthetic};
use crate::error::{io_err, Error, Result};
use crate::external::run_external;
use crate::format::{parse_calculus_spec, parse_network, write_network};
use crate::report::{peak_memory_bytes, time_budget_ms, ReportStats, ReportStatus, RunReport, WallClock};

#[derive(Parser, Debug)]
#[command(name = "qualc", version, about = "Model existence for binary qualitative calculi")]
pub struct Cli {
    /// Write the JSON run report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate answer-set programs for a calculus.
    Convert(ConvertArgs),
    /// Decide model existence of a constraint network.
    Solve(SolveArgs),
    /// Antenna placement: RCC-5 completion plus frequency coloring.
    Casestudy(CasestudyArgs),
    /// Solve synthetic case-study instances of increasing size.
    Bench(BenchArgs),
    /// Check a calculus and report its algebraic profile.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Calculus specification file, or `rcc5` for the built-in table.
    pub calculus: PathBuf,
    #[arg(long, default_value = "gen2")]
    pub variant: String,
    /// Network whose instance facts are written alongside the theory.
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write a coloring program with this many colors.
    #[arg(long)]
    pub colors: Option<usize>,
    /// Relations that make two elements interfere, comma separated.
    #[arg(long, default_value = "eq,po,pp,ppi")]
    pub overlap: String,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub calculus: PathBuf,
    pub network: PathBuf,
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// List up to this many models.
    #[arg(long)]
    pub enumerate: Option<usize>,
    /// Cross-check the verdict by exhaustive enumeration.
    #[arg(long)]
    pub oracle: bool,
    /// Largest candidate count the oracle will enumerate.
    #[arg(long, default_value_t = qualc_core::solver::DEFAULT_CANDIDATE_BOUND)]
    pub oracle_bound: u64,
    #[arg(long)]
    pub first_fail: bool,
    /// Check complete assignments only, without propagation.
    #[arg(long)]
    pub no_propagate: bool,
    /// Seconds; defaults to the QUALC_TIME_BUDGET_S environment variable.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// ASP system command line run on the emitted encoding for comparison.
    #[arg(long)]
    pub external_solver: Option<String>,
    /// Write models as JSON.
    #[arg(long)]
    pub models_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CasestudyArgs {
    /// Antenna CSV with header `id,lat,lon`.
    #[arg(long, conflicts_with = "synthetic", required_unless_present = "synthetic")]
    pub csv: Option<PathBuf>,
    /// Generate this many antennas instead of reading a CSV.
    #[arg(long)]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coverage radius in meters.
    #[arg(long, default_value_t = geo::DEFAULT_RADIUS_M)]
    pub radius: f64,
    /// Classified relations given to the solver per region.
    #[arg(long, default_value_t = 1)]
    pub known_per_region: usize,
    #[arg(long, default_value_t = 3)]
    pub colors: usize,
    #[arg(long, default_value = "auto")]
    pub mode: String,
    /// Boundary tolerance in meters.
    #[arg(long, default_value_t = geo::DEFAULT_EPS_M)]
    pub eps: f64,
    /// RCC-5 specification to use instead of the built-in table.
    #[arg(long)]
    pub calculus: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub time_budget: Option<f64>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub calculus: PathBuf,
    /// `start:end:step` (inclusive) or a comma-separated list.
    #[arg(long, default_value = "10:50:10")]
    pub sizes: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated solver modes.
    #[arg(long, default_value = "auto")]
    pub modes: String,
    #[arg(long, default_value_t = geo::DEFAULT_RADIUS_M)]
    pub radius: f64,
    #[arg(long, default_value_t = 1)]
    pub known_per_region: usize,
    #[arg(long, default_value_t = 3)]
    pub colors: usize,
    /// Write the result rows to this JSON file instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory for the generated instance files.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Per-solve budget in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub calculus: PathBuf,
}

/// Runs a parsed command line. `echo` is recorded as the report's command.
pub fn run(cli: &Cli, echo: &str, out: &mut dyn Write, err: &mut dyn Write) -> RunReport {
    let clock = WallClock::start();
    let mut report = RunReport::new(echo);
    let outcome = match &cli.command {
        Command::Convert(a) => convert(a, &mut report, out),
        Command::Solve(a) => solve_cmd(a, &mut report, out),
        Command::Casestudy(a) => casestudy(a, &mut report, out),
        Command::Bench(a) => bench(a, &mut report, out),
        Command::Validate(a) => validate(a, &mut report, out),
    };
    if let Err(e) = outcome {
        let _ = writeln!(err, "error: {e}");
        report.status = ReportStatus::Error;
    }
    report.elapsed_ms = clock.elapsed().as_millis() as u64;
    report.peak_memory_bytes = peak_memory_bytes();
    if let Some(path) = &cli.report {
        if let Err(e) = fs::write(path, report.to_json()) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            report.status = ReportStatus::Error;
        }
    }
    report
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, text: &str, report: &mut RunReport) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))?;
    report.outputs.push(path.display().to_string());
    Ok(())
}

fn make_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

/// Reads a calculus file; the bare name `rcc5` selects the built-in table
/// when no such file exists.
pub fn load_calculus(path: &Path) -> Result<Calculus> {
    if path == Path::new("rcc5") && !path.exists() {
        return Ok(Calculus::rcc5());
    }
    parse_calculus_spec(&read(path)?).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_network(path: &Path, calc: &Calculus) -> Result<NormalizedNetwork> {
    let net = parse_network(&read(path)?).map_err(|source| Error::Parse {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(normalize(&net, calc)?)
}

fn parse_mode(s: &str) -> Result<Mode> {
    Mode::parse(s).ok_or_else(|| Error::Invalid(format!("unknown mode `{s}`")))
}

fn relation_set(calc: &Calculus, list: &str) -> Result<RelationSet> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            calc.relation_index(s)
                .ok_or_else(|| Error::Invalid(format!("unknown relation `{s}`")))
        })
        .collect()
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn convert(a: &ConvertArgs, report: &mut RunReport, out: &mut dyn Write) -> Result<()> {
    let calc = load_calculus(&a.calculus)?;
    let variant = Variant::parse(&a.variant)
        .ok_or_else(|| Error::Invalid(format!("unknown variant `{}`", a.variant)))?;
    let net = a.network.as_deref().map(|p| load_network(p, &calc)).transpose()?;
    let program = emit(&calc, net.as_ref(), variant)?;
    make_dir(&a.output)?;
    let stem = format!("{}-{}", calc.name(), variant.tag());
    write(&a.output.join(format!("{stem}.lp")), &program.theory, report)?;
    if let Some(inst) = &program.instance {
        write(&a.output.join(format!("{stem}-instance.lp")), inst, report)?;
    }
    if let Some(k) = a.colors {
        let overlap = relation_set(&calc, &a.overlap)?;
        let frag = emit_coloring(&calc, overlap, &default_colors(k))?;
        write(&a.output.join(format!("{}-coloring-k{k}.lp", calc.name())), &frag, report)?;
    }
    for o in &report.outputs {
        let _ = writeln!(out, "wrote {o}");
    }
    let _ = writeln!(out, "{} facts, {} rules", program.fact_count, program.rule_count);
    Ok(())
}

fn print_model(calc: &Calculus, m: &Assignment, out: &mut dyn Write, label: &str) {
    let involutive = calc.detect_involution();
    let mut parts = Vec::new();
    for x in 0..m.len() {
        for y in 0..m.len() {
            if x != y && (x < y || !involutive) {
                if let Some(r) = m.get(x, y) {
                    parts.push(format!("{x} {y} {}", calc.relation_name(r)));
                }
            }
        }
    }
    let _ = writeln!(out, "{label}: {}", parts.join("; "));
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct PairRelation {
    pub a: String,
    pub b: String,
    pub relation: String,
}

fn model_rows(calc: &Calculus, m: &Assignment, names: &[String]) -> Vec<PairRelation> {
    let involutive = calc.detect_involution();
    let mut rows = Vec::new();
    for x in 0..m.len() {
        for y in 0..m.len() {
            if x != y && (x < y || !involutive) {
                if let Some(r) = m.get(x, y) {
                    rows.push(PairRelation {
                        a: names[x].clone(),
                        b: names[y].clone(),
                        relation: calc.relation_name(r).to_string(),
                    });
                }
            }
        }
    }
    rows
}

fn encoding_for(mode: Mode) -> Variant {
    match mode {
        Mode::Gen0 => Variant::Gen0,
        Mode::Gen1 => Variant::Gen1,
        _ => Variant::Gen2,
    }
}

fn solve_cmd(a: &SolveArgs, report: &mut RunReport, out: &mut dyn Write) -> Result<()> {
    let calc = load_calculus(&a.calculus)?;
    let net = load_network(&a.network, &calc)?;
    let mode = parse_mode(&a.mode)?.resolve(&calc)?;
    let cfg = SolveConfig {
        mode,
        max_models: Some(a.enumerate.unwrap_or(1).max(1)),
        time_budget_ms: time_budget_ms(a.time_budget).map_err(Error::Invalid)?,
        first_fail: a.first_fail,
        propagate: !a.no_propagate,
    };
    let mut clock = WallClock::start();
    let result = solve_with(&calc, &net, &cfg, Some(&mut clock), &mut |_| true)?;
    report.status = result.status.into();
    report.stats = ReportStats::from(&result.stats);
    let _ = writeln!(out, "status: {}", result.status.as_str());
    let _ = writeln!(out, "mode: {mode}");
    for m in &result.models {
        if !verify(&calc, &net, m).ok {
            return Err(Error::Invalid("solver returned a model that fails verification".into()));
        }
    }
    if a.enumerate.is_some() {
        for (i, m) in result.models.iter().enumerate() {
            print_model(&calc, m, out, &format!("model {}", i + 1));
        }
        let _ = writeln!(out, "models: {}", result.models.len());
    } else if let Some(m) = &result.model {
        print_model(&calc, m, out, "model");
    }
    if let Some(path) = &a.models_out {
        let rows: Vec<Vec<PairRelation>> = result.models.iter().map(|m| model_rows(&calc, m, &net.elements)).collect();
        write(path, &serde_json::to_string_pretty(&rows).expect("models serialize"), report)?;
    }

    if a.oracle && result.status != Status::Timeout {
        report.oracle_agreement = oracle(&calc, &net, &result, a, out)?;
        if report.oracle_agreement == Some(false) {
            return Err(Error::Invalid("solver and exhaustive enumeration disagree".into()));
        }
    }
    if let Some(cmd) = &a.external_solver {
        if result.status != Status::Timeout {
            let program = emit(&calc, Some(&net), encoding_for(mode))?;
            let path = std::env::temp_dir().join(format!("qualc-{}-{}.lp", std::process::id(), calc.name()));
            fs::write(&path, program.text()).map_err(io_err(&path))?;
            let verdict = run_external(cmd, &path);
            let _ = fs::remove_file(&path);
            let verdict = verdict?;
            let agree = verdict == result.status;
            let _ = writeln!(out, "external: {} ({})", verdict.as_str(), if agree { "agrees" } else { "DISAGREES" });
            if !agree {
                return Err(Error::Invalid("external ASP system disagrees with the native solver".into()));
            }
        }
    }
    Ok(())
}

fn oracle(
    calc: &Calculus,
    net: &NormalizedNetwork,
    result: &SolveResult,
    a: &SolveArgs,
    out: &mut dyn Write,
) -> Result<Option<bool>> {
    let agree = if let Some(limit) = a.enumerate {
        match brute_force_models(calc, net, a.oracle_bound) {
            Ok(models) => {
                let expected = models.len().min(limit.max(1));
                Some(result.models.len() == expected && result.models.iter().all(|m| models.contains(m)))
            }
            Err(e) => {
                let _ = writeln!(out, "oracle: skipped ({e})");
                None
            }
        }
    } else {
        match brute_force(calc, net, a.oracle_bound) {
            Ok(r) => Some(r.status == result.status),
            Err(e) => {
                let _ = writeln!(out, "oracle: skipped ({e})");
                None
            }
        }
    };
    if let Some(agree) = agree {
        let _ = writeln!(out, "oracle: {}", if agree { "agrees" } else { "DISAGREES" });
    }
    Ok(agree)
}

/// RCC-5 calculus for the case study, checked for the relation names the
/// geometry produces.
fn casestudy_calculus(path: Option<&Path>) -> Result<Calculus> {
    let calc = match path {
        Some(p) => load_calculus(p)?,
        None => Calculus::rcc5(),
    };
    for name in ["dr", "eq", "po", "pp", "ppi"] {
        if calc.relation_index(name).is_none() {
            return Err(Error::Invalid(format!("case study calculus lacks relation `{name}`")));
        }
    }
    Ok(calc)
}

fn overlap_relations(calc: &Calculus) -> RelationSet {
    relation_set(calc, "eq,po,pp,ppi").expect("checked by casestudy_calculus")
}

/// Everything derived from an antenna set before solving.
pub struct Instance {
    pub regions: Vec<Region>,
    pub pairs: Vec<geo::SpatialPair>,
    pub network: NormalizedNetwork,
}

pub fn build_instance(
    calc: &Calculus,
    antennas: &[qualc_core::geo::Antenna],
    radius: f64,
    known_per_region: usize,
    eps: f64,
) -> Result<Instance> {
    let regions = antennas
        .iter()
        .map(|a| buffer(a, radius))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let (net, pairs) = build_network(&regions, known_per_region, eps)?;
    let network = normalize(&net, calc)?;
    Ok(Instance {
        regions,
        pairs,
        network,
    })
}

#[derive(Serialize, Deserialize, Debug)]
pub struct Solution {
    pub status: String,
    pub colors: usize,
    pub model: Vec<PairRelation>,
    pub coloring: Vec<(String, String)>,
    pub arcs: Vec<(String, String)>,
}

fn casestudy(a: &CasestudyArgs, report: &mut RunReport, out: &mut dyn Write) -> Result<()> {
    let calc = casestudy_calculus(a.calculus.as_deref())?;
    let antennas = match (&a.csv, a.synthetic) {
        (Some(p), _) => read_antennas_file(p)?,
        (None, Some(n)) => Synthetic::new(n, a.seed, a.radius).generate()?,
        (None, None) => return Err(Error::Invalid("give --csv or --synthetic".into())),
    };
    if antennas.is_empty() {
        return Err(Error::Invalid("no antennas".into()));
    }
    if a.colors == 0 {
        return Err(Error::Invalid("--colors must be at least 1".into()));
    }
    let inst = build_instance(&calc, &antennas, a.radius, a.known_per_region, a.eps)?;
    let ids: Vec<String> = inst.regions.iter().map(|r| r.id.clone()).collect();
    let mode = parse_mode(&a.mode)?;
    let cfg = SolveConfig {
        mode,
        time_budget_ms: time_budget_ms(a.time_budget).map_err(Error::Invalid)?,
        ..Default::default()
    };
    let overlap = overlap_relations(&calc);
    let mut clock = WallClock::start();
    let outcome = solve_with_coloring(&calc, &inst.network, overlap, a.colors, &cfg, Some(&mut clock))?;
    report.status = outcome.result.status.into();
    report.stats = ReportStats::from(&outcome.result.stats);

    if let (Some(m), Some(colors)) = (&outcome.result.model, &outcome.coloring) {
        let arcs = overlap_graph(m, overlap);
        let proper = arcs.iter().all(|&(x, y)| colors[x] != colors[y]) && colors.iter().all(|&c| c < a.colors);
        if !verify(&calc, &inst.network, m).ok || arcs != outcome.arcs || !proper {
            return Err(Error::Invalid("reported solution failed verification".into()));
        }
    }

    let known = inst.network.constraints.len();
    let _ = writeln!(
        out,
        "{} regions, {} pairs classified, {known} known relations, {} colors",
        inst.regions.len(),
        inst.pairs.len(),
        a.colors
    );
    let _ = writeln!(out, "status: {}", outcome.result.status.as_str());

    if let Some(dir) = &a.output {
        make_dir(dir)?;
        if a.synthetic.is_some() {
            let mut buf = Vec::new();
            write_antennas(&mut buf, &antennas).map_err(io_err(dir))?;
            write(&dir.join("antennas.csv"), &String::from_utf8(buf).expect("csv is utf-8"), report)?;
        }
        let mut buf = Vec::new();
        write_pair_table(&mut buf, &inst.regions, &inst.pairs).map_err(io_err(dir))?;
        write(&dir.join("pairs.csv"), &String::from_utf8(buf).expect("csv is utf-8"), report)?;
        let names: String = std::iter::once("index,id\n".to_string())
            .chain(ids.iter().enumerate().map(|(i, id)| format!("{i},{id}\n")))
            .collect();
        write(&dir.join("names.csv"), &names, report)?;
        let comment = format!("{} regions, radius {} m, {} known per region", ids.len(), a.radius, a.known_per_region);
        write(&dir.join("network.txt"), &write_network(&inst.network.to_network(&calc), &comment), report)?;
        let palette = default_colors(a.colors);
        let solution = Solution {
            status: outcome.result.status.as_str().to_string(),
            colors: a.colors,
            model: outcome
                .result
                .model
                .as_ref()
                .map(|m| model_rows(&calc, m, &ids))
                .unwrap_or_default(),
            coloring: outcome
                .coloring
                .as_ref()
                .map(|c| c.iter().enumerate().map(|(i, &k)| (ids[i].clone(), palette[k].clone())).collect())
                .unwrap_or_default(),
            arcs: outcome.arcs.iter().map(|&(x, y)| (ids[x].clone(), ids[y].clone())).collect(),
        };
        write(&dir.join("solution.json"), &serde_json::to_string_pretty(&solution).expect("solution serializes"), report)?;
    }
    Ok(())
}

/// Sizes from `start:end:step` (inclusive) or `a,b,c`.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::Invalid(format!("invalid size list `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let sizes: Vec<usize> = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(bad()),
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        (start..=end).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<_>>()?
    };
    if sizes.is_empty() || sizes.iter().any(|&n| n < 2) {
        return Err(Error::Invalid("bench sizes must be at least 2".into()));
    }
    Ok(sizes)
}

/// Seed of the instance of `size` in a bench run seeded with `seed`.
pub fn instance_seed(seed: u64, size: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ size as u64
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub mode: String,
    pub status: String,
    pub elapsed_ms: u64,
    pub peak_memory_bytes: Option<u64>,
    pub known_relations: usize,
    pub decisions: u64,
    pub backtracks: u64,
    pub nogoods_added: u64,
    pub propagation_checks: u64,
    pub identity_checks: u64,
    pub arcs: usize,
}

fn bench(a: &BenchArgs, report: &mut RunReport, out: &mut dyn Write) -> Result<()> {
    let calc = casestudy_calculus(Some(&a.calculus))?;
    let sizes = parse_sizes(&a.sizes)?;
    let modes = a
        .modes
        .split(',')
        .map(|m| parse_mode(m.trim()).and_then(|m| Ok(m.resolve(&calc)?)))
        .collect::<Result<Vec<_>>>()?;
    let budget = time_budget_ms(a.time_budget).map_err(Error::Invalid)?;
    let overlap = overlap_relations(&calc);
    if let Some(dir) = &a.output {
        make_dir(dir)?;
    }
    let mut rows = Vec::new();
    let mut disagreement = false;
    for &size in &sizes {
        let antennas = Synthetic::new(size, instance_seed(a.seed, size), a.radius).generate()?;
        let inst = build_instance(&calc, &antennas, a.radius, a.known_per_region, geo::DEFAULT_EPS_M)?;
        if let Some(dir) = &a.output {
            let comment = format!("bench size {size} seed {}", a.seed);
            write(&dir.join(format!("bench-{size}.txt")), &write_network(&inst.network.to_network(&calc), &comment), report)?;
        }
        let mut verdict: Option<Status> = None;
        for &mode in &modes {
            let cfg = SolveConfig {
                mode,
                time_budget_ms: budget,
                ..Default::default()
            };
            let mut clock = WallClock::start();
            let outcome = solve_with_coloring(&calc, &inst.network, overlap, a.colors, &cfg, Some(&mut clock))?;
            let r = &outcome.result;
            if r.status != Status::Timeout {
                if verdict.is_some_and(|v| v != r.status) {
                    disagreement = true;
                }
                verdict = Some(r.status);
            }
            if let (Some(m), Some(c)) = (&r.model, &outcome.coloring) {
                if !verify(&calc, &inst.network, m).ok || color_graph(m.len(), &outcome.arcs, a.colors).is_none() || outcome.arcs.iter().any(|&(x, y)| c[x] == c[y]) {
                    return Err(Error::Invalid(format!("size {size}: solution failed verification")));
                }
            }
            let row = BenchRow {
                size,
                mode: mode.as_str().to_string(),
                status: r.status.as_str().to_string(),
                elapsed_ms: clock.elapsed().as_millis() as u64,
                peak_memory_bytes: peak_memory_bytes(),
                known_relations: inst.network.constraints.len(),
                decisions: r.stats.decisions,
                backtracks: r.stats.backtracks,
                nogoods_added: r.stats.nogoods_added,
                propagation_checks: r.stats.propagation_checks,
                identity_checks: r.stats.identity_checks,
                arcs: outcome.arcs.len(),
            };
            report.stats.decisions += row.decisions;
            report.stats.backtracks += row.backtracks;
            report.stats.nogoods_added += row.nogoods_added;
            if a.json.is_some() {
                let _ = writeln!(out, "size {size} {}: {} in {} ms", row.mode, row.status, row.elapsed_ms);
            }
            rows.push(row);
        }
    }
    let json = serde_json::to_string_pretty(&rows).expect("rows serialize");
    match &a.json {
        Some(p) => write(p, &json, report)?,
        None => {
            let _ = writeln!(out, "{json}");
        }
    }
    if disagreement {
        return Err(Error::Invalid("modes disagree on some instance".into()));
    }
    Ok(())
}

fn validate(a: &ValidateArgs, _report: &mut RunReport, out: &mut dyn Write) -> Result<()> {
    let calc = load_calculus(&a.calculus)?;
    let p = calc.classify();
    let _ = writeln!(out, "calculus {}: {} relations", calc.name(), calc.relation_count());
    let _ = writeln!(
        out,
        "identity: {}",
        calc.identity().map(|i| calc.relation_name(i)).unwrap_or("none")
    );
    let _ = writeln!(out, "all symmetric: {}", yes_no(p.all_symmetric));
    if calc.identity().is_some() && !p.identity_law {
        let law = calc.detect_identity_law();
        let failing: Vec<&str> = law
            .per_relation
            .iter()
            .enumerate()
            .filter(|(_, ok)| !**ok)
            .map(|(i, _)| calc.relation_name(i as u8))
            .collect();
        let _ = writeln!(out, "identity law fails for: {}", failing.join(" "));
    }
    let _ = writeln!(
        out,
        "involution: {}, identity law: {}, tier: {}",
        yes_no(p.involution),
        yes_no(p.identity_law),
        p.tier.as_str()
    );
    let recommended = match p.tier {
        Tier::Gen2 => Variant::Gen2,
        Tier::Gen1 => Variant::Gen1,
        Tier::Gen0 => Variant::Gen0,
    };
    let _ = writeln!(out, "recommended variant: {}", recommended.tag());
    Ok(())
}
