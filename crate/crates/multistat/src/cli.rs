//! Argument types and the four commands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use multistat_core::cayley::{find_mixed_decorated, from_unmixed, MixedSimplex};
use multistat_core::crn::messi::Partition;
use multistat_core::crn::model::MessiModel;
use multistat_core::crn::param::{Route, SteadyParametrization};
use multistat_core::crn::parse::{parse_partition, parse_rational, write_network, NetworkFile};
use multistat_core::crn::region::RegionSystem;
use multistat_core::crn::{CrnError, Network};
use multistat_core::decoration::{decoration_conditions, find_decorated, DecoratedFamily};
use multistat_core::geometry::{enumerate_simplices, joint_cone, regular_subdivision, PointConfiguration, Simplex};
use multistat_core::linalg::Q;
use multistat_core::lp::{gordan_certificate, Feasibility};
use multistat_core::witness::{
    certify_mixed, certify_multistationarity, NetworkWitness, Route as WitnessRoute, SeedExecutor, WitnessError,
    WitnessOptions, WitnessStatus,
};

use crate::exec::Parallel;
use crate::io::{load_network, parse_cells, parse_points, read_text};
use crate::report::*;
use crate::{CliError, EXIT_INCONCLUSIVE, EXIT_INTERNAL, EXIT_OK};

#[derive(Debug, Parser)]
#[command(name = "multistat", version, about = "Multistationarity via positively decorated simplices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parametrize, assemble the region system and search decorated simplices.
    Analyze(NetworkArgs),
    /// Analyze, then search for certified positive steady states.
    Witness(WitnessArgs),
    /// Regular subdivision of a point configuration, or a regularity check.
    Subdivision(SubdivisionArgs),
    /// Analyze through the Cayley configuration and mixed simplices.
    MixedAnalyze(NetworkArgs),
}

#[derive(Debug, Clone, Args)]
pub struct NetworkArgs {
    /// Network file.
    pub file: Option<PathBuf>,
    /// hk, mm, mixed-phospho or phospho:n.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Rate constants, in reaction order or as name=value pairs.
    #[arg(long = "k", allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Totals, in block order or as name=value pairs.
    #[arg(long = "T", allow_hyphen_values = true)]
    pub totals: Option<String>,
    /// Partition such as "0: ES ; 1: E ; 2: S0 S1".
    #[arg(long)]
    pub partition: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Suppress the summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// Deepest schedule step k, with t = 2^-k.
    #[arg(long, default_value_t = 60)]
    pub budget: u32,
    /// Worker threads for Newton runs (default: one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Use the Cayley/mixed-simplex route.
    #[arg(long)]
    pub mixed: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SubdivisionArgs {
    /// Points file, one integer vector per line.
    pub points: PathBuf,
    /// Height per point, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub heights: Option<String>,
    /// Candidate triangulation, one cell of point indices per line.
    #[arg(long)]
    pub check: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub quiet: bool,
}

impl Cli {
    pub fn quiet(&self) -> bool {
        match &self.command {
            Command::Analyze(a) | Command::MixedAnalyze(a) => a.quiet,
            Command::Witness(w) => w.network.quiet,
            Command::Subdivision(s) => s.quiet,
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match &self.command {
            Command::Analyze(a) | Command::MixedAnalyze(a) => a.out.as_deref(),
            Command::Witness(w) => w.network.out.as_deref(),
            Command::Subdivision(s) => s.out.as_deref(),
        }
    }
}

pub struct Outcome {
    pub report: Report,
    pub summary: String,
    pub code: i32,
    /// Printed to standard error.
    pub message: Option<String>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Witness(w) => {
            let exec = Parallel::new(w.threads).map_err(|e| CliError::internal(e.to_string()))?;
            cmd_witness(w, &exec)
        }
        Command::Subdivision(s) => cmd_subdivision(s),
        Command::MixedAnalyze(a) => cmd_mixed_analyze(a),
    }
}

fn crn_error(e: CrnError) -> CliError {
    match e {
        CrnError::Postcondition(_) => CliError::internal(e.to_string()),
        _ => CliError::hypothesis(e.to_string()),
    }
}

/// Split "a,b" or "n=a;m=b" into (optional name, value) items.
fn split_values(text: &str) -> Result<Vec<(Option<String>, Q)>, CliError> {
    text.split([',', ';'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| {
            let (name, v) = match item.split_once('=') {
                Some((n, v)) => (Some(n.trim().to_string()), v),
                None => (None, item),
            };
            let q = parse_rational(v).ok_or_else(|| CliError::parse(format!("bad number '{}'", v.trim())))?;
            Ok((name, q))
        })
        .collect()
}

/// Values given positionally (all of them) or by name (over the defaults).
fn assign(
    text: &str,
    names: &[String],
    defaults: Vec<Option<Q>>,
    what: &str,
) -> Result<Vec<Q>, CliError> {
    let items = split_values(text)?;
    let named = items.iter().filter(|(n, _)| n.is_some()).count();
    let mut out = defaults;
    if named == 0 {
        if items.len() != names.len() {
            return Err(CliError::parse(format!("expected {} {what}, got {}", names.len(), items.len())));
        }
        out = items.into_iter().map(|(_, v)| Some(v)).collect();
    } else if named == items.len() {
        for (n, v) in items {
            let n = n.expect("named");
            let i = names
                .iter()
                .position(|x| *x == n)
                .ok_or_else(|| CliError::parse(format!("unknown name '{n}' (expected one of {})", names.join(", "))))?;
            out[i] = Some(v);
        }
    } else {
        return Err(CliError::parse(format!("mix of named and positional {what}")));
    }
    out.into_iter()
        .zip(names)
        .map(|(v, n)| v.ok_or_else(|| CliError::parse(format!("no value for {n}"))))
        .collect()
}

/// Network with the rates, partition and totals actually used.
pub struct Prepared {
    pub source: String,
    pub file: NetworkFile,
    pub model: MessiModel,
    pub kappa: Vec<Q>,
    /// Indexed by block.
    pub totals: Vec<Q>,
}

impl Prepared {
    pub fn echo(&self) -> InputEcho {
        InputEcho {
            source: Some(self.source.clone()),
            network: Some(write_network(&self.file)),
            kappa: Some(rats(&self.kappa)),
            totals: Some(rats(&self.totals)),
            partition: Some(partition_text(&self.file.network, self.model.partition())),
            ..InputEcho::default()
        }
    }
}

fn partition_text(net: &Network, p: &Partition) -> String {
    let names = |v: &[usize]| v.iter().map(|&i| net.species()[i].clone()).collect::<Vec<_>>().join(" ");
    let mut segs = Vec::new();
    if !p.intermediates().is_empty() {
        segs.push(format!("0: {}", names(p.intermediates())));
    }
    for (a, b) in p.blocks().iter().enumerate() {
        segs.push(format!("{}: {}", a + 1, names(b)));
    }
    segs.join(" ; ")
}

pub fn prepare(args: &NetworkArgs) -> Result<Prepared, CliError> {
    let (mut file, source) = load_network(args.file.as_deref(), args.builtin.as_deref())?;
    if let Some(p) = &args.partition {
        let part = parse_partition(p, &file.network).map_err(CliError::parse)?;
        if file.totals.as_ref().is_some_and(|t| t.len() != part.num_blocks()) {
            file.totals = None;
        }
        if file.chosen.as_ref().is_some_and(|c| c.len() != part.num_blocks()) {
            file.chosen = None;
        }
        file.partition = Some(part);
    }
    let net = &file.network;
    let kappa = match &args.k {
        Some(text) => assign(text, &net.rate_names(), net.reactions().iter().map(|r| r.value.clone()).collect(), "rate constants")?,
        None => net.rates().map_err(|e| CliError::parse(format!("{e}; give rates with --k")))?,
    };
    file.network = file.network.with_rates(&kappa).map_err(|e| CliError::parse(e.to_string()))?;
    let model = MessiModel::from_file(&file).map_err(crn_error)?;
    let defaults: Vec<Option<Q>> = match &file.totals {
        Some(t) => t.iter().map(|(_, v)| Some(v.clone())).collect(),
        None => vec![None; model.total_names.len()],
    };
    let totals = match &args.totals {
        Some(text) => assign(text, &model.total_names, defaults, "totals")?,
        None => defaults
            .into_iter()
            .zip(&model.total_names)
            .map(|(v, n)| v.ok_or_else(|| CliError::parse(format!("no value for total {n}; give totals with --T"))))
            .collect::<Result<_, _>>()?,
    };
    file.totals = Some(model.total_names.iter().cloned().zip(totals.iter().cloned()).collect());
    if file.chosen.is_none() {
        file.chosen = Some(model.chosen.clone());
    }
    Ok(Prepared { source, file, model, kappa, totals })
}

fn route_name(r: Route) -> &'static str {
    match r {
        Route::Messi => "messi",
        Route::Elimination => "elimination",
    }
}

fn messi_out(model: &MessiModel) -> MessiOut {
    let st = &model.structure;
    MessiOut {
        s_toric: st.s_toric.holds(),
        unique_sources: st.s_toric.unique_sources,
        no_parallel_edges: st.s_toric.no_parallel_edges,
        weakly_reversible: st.s_toric.weakly_reversible,
        unique_simple_paths: st.s_toric.unique_simple_paths,
        minimal: st.minimal,
        diagnostics: st.s_toric.diagnostics.clone(),
        layers: st.layers().ok().map(|l| l.into_iter().map(|b| b.into_iter().map(|x| x + 1).collect()).collect()),
        route: route_name(model.route()).to_string(),
    }
}

fn laws_out(model: &MessiModel) -> Vec<LawOut> {
    let sp = model.network.species();
    model
        .laws
        .iter()
        .enumerate()
        .map(|(b, law)| LawOut {
            total: model.total_names[b].clone(),
            block: b + 1,
            species: law.iter().zip(sp).filter(|(c, _)| **c != Q::from_integer(0.into())).map(|(_, s)| s.clone()).collect(),
            coefficients: rats(law),
        })
        .collect()
}

fn param_out(model: &MessiModel, param: &SteadyParametrization) -> ParamOut {
    let sp = model.network.species();
    ParamOut {
        route: route_name(param.route).to_string(),
        chosen: param.chosen.iter().map(|&c| sp[c].clone()).collect(),
        species: (0..sp.len()).map(|s| SpeciesOut { species: sp[s].clone(), expression: param.species_expr(s).to_string() }).collect(),
    }
}

fn system_out(model: &MessiModel, region: &RegionSystem) -> SystemOut {
    let sp = model.network.species();
    let c = region.coefficients.matrix();
    let sym = region.coefficients.symbolic();
    SystemOut {
        variables: region.chosen.iter().map(|&v| sp[v].clone()).collect(),
        exponents: region.exponents().to_vec(),
        rows: (0..c.rows())
            .map(|i| RowOut {
                block: region.row_blocks[i] + 1,
                total: region.total_names[i].clone(),
                total_value: Rat(region.totals[i].clone()),
                coefficients: rats(c.row(i)),
                symbolic: (0..c.cols()).map(|j| sym.map_or(String::new(), |s| s[i][j].to_string())).collect(),
            })
            .collect(),
    }
}

fn decoration_out(region: &RegionSystem, dec: &DecoratedFamily) -> DecorationOut {
    let cfg = &region.config;
    DecorationOut {
        simplices_checked: enumerate_simplices(cfg).len(),
        decorated: dec
            .decorated
            .iter()
            .map(|s| SimplexOut {
                indices: s.indices().to_vec(),
                points: s.indices().iter().map(|&j| cfg.point(j).to_vec()).collect(),
                conditions: decoration_conditions(&region.coefficients, s)
                    .into_iter()
                    .map(|m| ConditionOut {
                        deleted: m.deleted,
                        value: Rat(m.value),
                        expression: m.symbolic.map(|e| e.to_string()),
                    })
                    .collect(),
            })
            .collect(),
        facet_pairs: dec.facet_pairs.clone(),
        families: dec
            .families
            .iter()
            .map(|f| FamilyOut {
                simplices: f.simplices.iter().map(|s| s.indices().to_vec()).collect(),
                height: rats(&f.height),
                cone_normals: f.cone.normals.iter().map(|n| rats(n)).collect(),
            })
            .collect(),
    }
}

fn fmt_point(p: &[i64]) -> String {
    format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn fmt_simplex(cfg: &PointConfiguration, idx: &[usize]) -> String {
    format!("{:?} {}", idx, idx.iter().map(|&j| fmt_point(cfg.point(j))).collect::<Vec<_>>().join(" "))
}

/// Stages shared by analyze, witness and mixed-analyze.
struct Analysis {
    prepared: Prepared,
    param: SteadyParametrization,
    region: RegionSystem,
    decorated: DecoratedFamily,
}

fn analysis(args: &NetworkArgs) -> Result<Analysis, CliError> {
    let prepared = prepare(args)?;
    let (param, region) = prepared.model.region_system(&prepared.kappa, &prepared.totals).map_err(crn_error)?;
    let decorated = find_decorated(&region.config, &region.coefficients);
    Ok(Analysis { prepared, param, region, decorated })
}

fn analysis_report(command: &str, a: &Analysis) -> Report {
    let mut r = Report::new(command, a.prepared.echo());
    r.messi = Some(messi_out(&a.prepared.model));
    r.conservation_laws = Some(laws_out(&a.prepared.model));
    r.parametrization = Some(param_out(&a.prepared.model, &a.param));
    r.system = Some(system_out(&a.prepared.model, &a.region));
    r.decoration = Some(decoration_out(&a.region, &a.decorated));
    r
}

fn analysis_summary(a: &Analysis) -> String {
    let model = &a.prepared.model;
    let net = &model.network;
    let sp = net.species();
    let cfg = &a.region.config;
    let mut s = String::new();
    let _ = writeln!(s, "network: {} ({} species, {} reactions)", a.prepared.source, sp.len(), net.reactions().len());
    let _ = writeln!(
        s,
        "parametrization: {} route, variables {}",
        route_name(a.param.route),
        a.param.chosen.iter().map(|&c| sp[c].as_str()).collect::<Vec<_>>().join(", ")
    );
    if let Ok(layers) = model.structure.layers() {
        let _ = writeln!(s, "layers of G_E: {:?}", layers.iter().map(|l| l.iter().map(|b| b + 1).collect()).collect::<Vec<Vec<_>>>());
    }
    let _ = writeln!(s, "system in {} variables over {} monomials:", a.region.chosen.len(), cfg.len());
    for (j, p) in cfg.points().iter().enumerate() {
        let _ = writeln!(s, "  a{j} = {}", fmt_point(p));
    }
    let all = enumerate_simplices(cfg);
    let _ = writeln!(s, "positively decorated simplices: {} of {}", a.decorated.decorated.len(), all.len());
    for d in &a.decorated.decorated {
        let _ = writeln!(s, "  {}", fmt_simplex(cfg, d.indices()));
    }
    if all.len() <= 20 {
        for simplex in all.iter().filter(|x| !a.decorated.decorated.contains(x)) {
            let _ = writeln!(s, "  not decorated: {}", fmt_simplex(cfg, simplex.indices()));
            for m in decoration_conditions(&a.region.coefficients, simplex) {
                let e = m.symbolic.map(|e| e.to_string()).unwrap_or_default();
                let _ = writeln!(s, "    minor without a{} = {} [{}]", m.deleted, m.value, e);
            }
        }
    }
    if !a.decorated.facet_pairs.is_empty() {
        let pairs: Vec<String> = a
            .decorated
            .facet_pairs
            .iter()
            .map(|&(i, j)| format!("{:?}|{:?}", a.decorated.decorated[i].indices(), a.decorated.decorated[j].indices()))
            .collect();
        let _ = writeln!(s, "facet-sharing pairs: {}", pairs.join(", "));
    }
    match a.decorated.best() {
        Some(f) => {
            let _ = writeln!(
                s,
                "best realizable family (p = {}): {:?}",
                f.simplices.len(),
                f.simplices.iter().map(|x| x.indices().to_vec()).collect::<Vec<_>>()
            );
            let _ = writeln!(s, "  height: [{}]", f.height.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(", "));
        }
        None => {
            let _ = writeln!(s, "no realizable decorated family");
        }
    }
    s
}

pub fn cmd_analyze(args: &NetworkArgs) -> Result<Outcome, CliError> {
    let a = analysis(args)?;
    Ok(Outcome { report: analysis_report("analyze", &a), summary: analysis_summary(&a), code: EXIT_OK, message: None })
}

fn lattice_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("MULTISTAT_SEED") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::parse(format!("MULTISTAT_SEED '{v}' is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn witness_out(model: &MessiModel, w: &NetworkWitness) -> WitnessOut {
    let net = &model.network;
    let r = &w.report;
    WitnessOut {
        route: match w.route {
            WitnessRoute::Unmixed => "unmixed",
            WitnessRoute::Mixed => "mixed",
        }
        .to_string(),
        status: match r.status {
            WitnessStatus::Success => "success",
            WitnessStatus::Exhausted => "exhausted",
        }
        .to_string(),
        p: r.p,
        family: r.family.clone(),
        height: floats(&r.height),
        cone_normals: r.cone.normals.iter().map(|n| rats(n)).collect(),
        k_star: r.k_star,
        t_star: r.t_star().map(F64),
        gamma: r.log_gamma.as_ref().map(|g| g.iter().map(|x| F64(x.exp())).collect()),
        roots: r
            .roots
            .iter()
            .map(|x| RootOut {
                x: floats(&x.x),
                residual: F64(x.residual),
                sigma_min: F64(x.sigma_min),
                sigma_max: F64(x.sigma_max),
                iterations: x.iterations,
                seed_index: x.seed_index,
                basin: x.basin,
            })
            .collect(),
        search_log: r
            .log
            .iter()
            .map(|s| StepOut {
                k: s.k,
                t: F64(2f64.powi(-(s.k as i32))),
                seeds: s.seeds,
                roots: s.roots,
                seed_failures: s.seed_failures,
                after_success: s.after_success,
            })
            .collect(),
        exclusion: r.exclusion.as_ref().map(|e| ExclusionOut {
            lower: floats(&e.lower),
            upper: floats(&e.upper),
            cells: e.cells,
            excluded: e.excluded,
            near_roots: e.near_roots,
            unresolved: e.unresolved,
            missed_roots: e.missed_roots.iter().map(|m| floats(&m.x)).collect(),
            complete: e.complete,
        }),
        kappa_bar: w.rescale.as_ref().map(|o| floats(&o.kappa_bar)),
        changed_rates: w.rescale.as_ref().map(|_| w.changed_rates.iter().map(|&i| net.rate_names()[i].clone()).collect()),
        multipliers: w.rescale.as_ref().map(|o| {
            o.multipliers.iter().map(|&(c, f)| MultiplierOut { complex: net.complex_label(c), factor: F64(f) }).collect()
        }),
        rescale_note: w.rescale_note.clone(),
        steady_states: w.rescale.as_ref().map(|_| {
            w.steady_states
                .iter()
                .map(|s| SteadyStateOut {
                    concentrations: floats(&s.concentrations),
                    mass_action_residual: F64(s.mass_action_residual),
                    conservation_residual: F64(s.conservation_residual),
                    recertified: s.recertified,
                })
                .collect()
        }),
        validated: w.validated(),
    }
}

fn witness_summary(model: &MessiModel, w: &NetworkWitness) -> String {
    let net = &model.network;
    let r = &w.report;
    let mut s = String::new();
    match r.status {
        WitnessStatus::Success => {
            let _ = writeln!(
                s,
                "witness: {} certified positive roots for p = {} at t = 2^-{} ({} route)",
                r.roots.len(),
                r.p,
                r.k_star.unwrap_or(0),
                if w.route == WitnessRoute::Mixed { "mixed" } else { "unmixed" }
            );
        }
        WitnessStatus::Exhausted => {
            let _ = writeln!(
                s,
                "witness: inconclusive, no t down to 2^-{} gave {} certified roots",
                r.log.last().map_or(0, |l| l.k),
                r.p
            );
        }
    }
    for x in &r.roots {
        let _ = writeln!(
            s,
            "  x = [{}]  residual {:.1e}  sigma_min/sigma_max {:.2e}",
            x.x.iter().map(|v| format!("{v:.6e}")).collect::<Vec<_>>().join(", "),
            x.residual,
            x.sigma_min / x.sigma_max
        );
    }
    if let Some(e) = &r.exclusion {
        let _ = writeln!(
            s,
            "  exclusion test: {} cells, {} unresolved, {} missed roots{}",
            e.cells,
            e.unresolved,
            e.missed_roots.len(),
            if e.complete { "" } else { " (cell budget exhausted)" }
        );
    }
    if let Some(o) = &w.rescale {
        let names = net.rate_names();
        let _ = writeln!(s, "rescaled rates (changed: {}):", w.changed_rates.iter().map(|&i| names[i].as_str()).collect::<Vec<_>>().join(", "));
        for &i in &w.changed_rates {
            let _ = writeln!(s, "  {} = {:.16e}", names[i], o.kappa_bar[i]);
        }
        let sp = net.species();
        for (n, st) in w.steady_states.iter().enumerate() {
            let vals: Vec<String> = st.concentrations.iter().zip(sp).map(|(v, name)| format!("{name}={v:.6e}")).collect();
            let _ = writeln!(s, "  steady state {}: {}", n + 1, vals.join(" "));
        }
        let _ = writeln!(s, "re-validated at rescaled rates: {}", if w.validated() { "yes" } else { "no" });
    }
    if let Some(n) = &w.rescale_note {
        let _ = writeln!(s, "no rescaled rates: {n}");
    }
    s
}

pub fn cmd_witness(args: &WitnessArgs, exec: &dyn SeedExecutor) -> Result<Outcome, CliError> {
    let a = analysis(&args.network)?;
    let seed = lattice_seed()?;
    let opts = WitnessOptions { budget: args.budget, jitter_seed: seed, ..WitnessOptions::default() };
    let model = &a.prepared.model;
    let (kappa, totals) = (&a.prepared.kappa, &a.prepared.totals);
    let res = if args.mixed {
        certify_mixed(model, kappa, totals, &opts, exec)
    } else {
        certify_multistationarity(model, kappa, totals, &opts, exec)
    };
    let w = res.map_err(|e| match e {
        WitnessError::Crn(c) => crn_error(c),
        e @ WitnessError::NoDecorated => CliError::hypothesis(e.to_string()),
        e => CliError::internal(e.to_string()),
    })?;
    let mut report = analysis_report("witness", &a);
    report.input.budget = Some(args.budget);
    report.input.mixed = Some(args.mixed);
    report.input.lattice_seed = seed;
    report.witness = Some(witness_out(model, &w));
    if args.mixed {
        report.mixed = Some(mixed_out(&a.region).map_err(CliError::hypothesis)?);
    }
    let mut summary = analysis_summary(&a);
    summary.push_str(&witness_summary(model, &w));
    let (code, message) = match w.report.status {
        WitnessStatus::Exhausted => (EXIT_INCONCLUSIVE, Some(String::from("witness search exhausted its budget (inconclusive)"))),
        WitnessStatus::Success if w.route == WitnessRoute::Unmixed && !w.validated() => (
            EXIT_INTERNAL,
            Some(format!("roots were not re-validated at rescaled rates{}", w.rescale_note.as_ref().map(|n| format!(": {n}")).unwrap_or_default())),
        ),
        WitnessStatus::Success => (EXIT_OK, None),
    };
    Ok(Outcome { report, summary, code, message })
}

fn mixed_out(region: &RegionSystem) -> Result<MixedOut, String> {
    let (cay, coeffs, _) = from_unmixed(&region.config, &region.coefficients).map_err(|e| e.to_string())?;
    let (dec, best, cone) = find_mixed_decorated(&cay, &coeffs);
    let pairs = |m: &MixedSimplex| m.pairs.clone();
    Ok(MixedOut {
        blocks: cay.blocks().to_vec(),
        decorated: dec.iter().map(pairs).collect(),
        family: best.iter().map(pairs).collect(),
        height: cone.as_ref().map(|(_, h)| rats(h)),
        cone_normals: cone.as_ref().map(|(c, _)| c.normals.iter().map(|n| rats(n)).collect()),
    })
}

pub fn cmd_mixed_analyze(args: &NetworkArgs) -> Result<Outcome, CliError> {
    let a = analysis(args)?;
    let mixed = mixed_out(&a.region).map_err(CliError::hypothesis)?;
    let mut summary = analysis_summary(&a);
    let _ = writeln!(summary, "Cayley blocks:");
    for (i, b) in mixed.blocks.iter().enumerate() {
        let _ = writeln!(summary, "  row {}: {}", i + 1, b.iter().map(|p| fmt_point(p)).collect::<Vec<_>>().join(" "));
    }
    let _ = writeln!(summary, "mixed decorated simplices: {}", mixed.decorated.len());
    for m in &mixed.decorated {
        let _ = writeln!(summary, "  {m:?}");
    }
    let _ = writeln!(summary, "best mixed family (p = {}): {:?}", mixed.family.len(), mixed.family);
    let mut report = analysis_report("mixed-analyze", &a);
    report.mixed = Some(mixed);
    Ok(Outcome { report, summary, code: EXIT_OK, message: None })
}

pub fn cmd_subdivision(args: &SubdivisionArgs) -> Result<Outcome, CliError> {
    let points = parse_points(&read_text(&args.points)?)?;
    let cfg = PointConfiguration::new(points.clone()).map_err(|e| CliError::parse(e.to_string()))?;
    if args.heights.is_none() && args.check.is_none() {
        return Err(CliError::parse("give --heights, --check or both"));
    }
    let mut echo = InputEcho { source: Some(args.points.display().to_string()), points: Some(points), ..InputEcho::default() };
    let mut out = SubdivisionOut { cells: None, is_triangulation: None, check: None };
    let mut summary = String::new();
    if let Some(text) = &args.heights {
        let h: Vec<Q> = split_values(text)?
            .into_iter()
            .map(|(n, v)| if n.is_some() { Err(CliError::parse("heights are positional")) } else { Ok(v) })
            .collect::<Result<_, _>>()?;
        if h.len() != cfg.len() {
            return Err(CliError::parse(format!("expected {} heights, got {}", cfg.len(), h.len())));
        }
        let sub = regular_subdivision(&cfg, &h);
        let tri = sub.is_triangulation(&cfg);
        let _ = writeln!(summary, "regular subdivision ({}): {} cells", if tri { "triangulation" } else { "not a triangulation" }, sub.cells.len());
        for c in &sub.cells {
            let _ = writeln!(summary, "  {}", fmt_simplex(&cfg, c));
        }
        echo.heights = Some(rats(&h));
        out.cells = Some(sub.cells);
        out.is_triangulation = Some(tri);
    }
    if let Some(path) = &args.check {
        let cells = parse_cells(&read_text(path)?)?;
        let simplices: Vec<Simplex> = cells
            .iter()
            .map(|c| Simplex::new(&cfg, c.clone()).map_err(|e| CliError::parse(format!("cell {c:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        let (cone, feas) = joint_cone(&cfg, &simplices);
        let normals: Vec<Vec<Rat>> = cone.normals.iter().map(|n| rats(n)).collect();
        let check = match feas {
            Feasibility::Interior(h) => {
                let _ = writeln!(summary, "regular: witness height [{}]", h.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
                RegularityOut { regular: true, height: Some(rats(&h)), certificate: None, cone_normals: normals }
            }
            Feasibility::Infeasible => {
                let cert = gordan_certificate(&cone.normals);
                let _ = writeln!(summary, "non-regular: the height cone is empty");
                if let Some(c) = &cert {
                    let _ = writeln!(
                        summary,
                        "  certificate: weights [{}] on the {} cone normals sum to zero",
                        c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "),
                        c.len()
                    );
                }
                RegularityOut { regular: false, height: None, certificate: cert.map(|c| rats(&c)), cone_normals: normals }
            }
        };
        echo.check = Some(cells);
        out.check = Some(check);
    }
    let mut report = Report::new("subdivision", echo);
    report.subdivision = Some(out);
    Ok(Outcome { report, summary, code: EXIT_OK, message: None })
}
