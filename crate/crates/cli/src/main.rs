use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use nice_einstein::algebra::{FamilyAlgebra, NiceLieAlgebra};
use nice_einstein::catalog::{self, CatalogEntry};
use nice_einstein::curvature::{
    ad_invariance_check, projected_norm, ricci, riemann_norm, scalar_curvature, GeneralMetric, Scalar,
};
use nice_einstein::diagram::NodePermutation;
use nice_einstein::einstein::{classify, parameter_solve, Mode, Options};
use nice_einstein::linalg::{fmt_rat, fmt_vec, kernel_basis, parse_rat, rat, Rat};
use nice_einstein::record::{write_csv, RecordSet, ResultRecord};

const TOL_ENV: &str = "NICE_EINSTEIN_TOL";

#[derive(Parser)]
#[command(
    name = "nice-einstein",
    version,
    about = "Diagonal and σ-diagonal Einstein metrics on nice nilpotent Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a structure string defines a nice nilpotent Lie algebra (exit 1 if not).
    Validate {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Root matrix, kernels, automorphisms and normal form.
    Info {
        #[command(flatten)]
        alg: AlgebraArgs,
    },
    /// Decide existence of Einstein metrics (exit 0 found, 2 none, 3 numeric failure).
    Einstein {
        #[command(flatten)]
        alg: AlgebraArgs,
        /// Right-hand side of ᵀM X = k·(1,…,1); the Ricci operator equals ½k.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        k: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Diagonal)]
        mode: ModeArg,
        /// Involution in cycle notation, e.g. "(23)(45)"; 0 stands for node 10.
        #[arg(long)]
        sigma: Option<String>,
        /// Leave this parameter free and solve for the values that admit a metric.
        #[arg(long)]
        solve_param: Option<String>,
        #[arg(long, value_enum, default_value_t = Out::Text)]
        out: Out,
        /// Record wall-clock time in the output.
        #[arg(long)]
        timing: bool,
    },
    /// Check the Einstein equation for a given metric with the Koszul formula.
    Verify {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        metric: MetricArgs,
        /// Einstein constant: Ric = lambda·id.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Curvature invariants of a metric.
    Curvature {
        #[command(flatten)]
        alg: AlgebraArgs,
        #[command(flatten)]
        metric: MetricArgs,
    },
    /// Run or list the built-in catalogue.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Recompute every case and compare with the stored expectations (exit 1 on any mismatch).
    Run {
        /// Glob on entry names, e.g. "7*".
        #[arg(long, default_value = "*")]
        filter: String,
        #[arg(long, value_enum, default_value_t = Out::Text)]
        out: Out,
        /// Read entries from this JSON file instead of the built-in catalogue.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
    List {
        #[arg(long, default_value = "*")]
        filter: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct AlgebraArgs {
    /// Catalogue name such as "741:6", or a structure string such as "(0,0,e^{12})".
    algebra: String,
    /// Parameter value, NAME=RAT; repeatable.
    #[arg(long = "param", value_name = "NAME=RAT")]
    params: Vec<String>,
}

#[derive(clap::Args)]
struct MetricArgs {
    /// Diagonal entries "g1,g2,…", or a full Gram matrix with rows separated by ';'.
    #[arg(long, allow_hyphen_values = true)]
    metric: String,
    /// Read --metric entries as the σ-diagonal metric Σ g_i e^i ⊗ e^{σ(i)}.
    #[arg(long)]
    sigma: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Diagonal,
    Sigma,
}

#[derive(Clone, Copy, ValueEnum)]
enum Out {
    Text,
    Json,
    Csv,
}

type Result<T> = std::result::Result<T, String>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn options() -> Result<Options> {
    let mut opts = Options::default();
    if let Ok(v) = std::env::var(TOL_ENV) {
        opts.tol = v
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite() && *t > 0.0)
            .ok_or_else(|| format!("{TOL_ENV}: `{v}` is not a positive number"))?;
    }
    Ok(opts)
}

fn rat_arg(what: &str, s: &str) -> Result<Rat> {
    parse_rat(s).ok_or_else(|| format!("{what}: `{s}` is not a rational number"))
}

struct Input {
    name: String,
    family: FamilyAlgebra,
    values: BTreeMap<String, Rat>,
}

impl Input {
    fn resolve(args: &AlgebraArgs) -> Result<Self> {
        let (name, structure) = match catalog::builtin().into_iter().find(|e| e.name == args.algebra) {
            Some(e) => (e.name, e.structure),
            None => (String::new(), args.algebra.clone()),
        };
        let family = FamilyAlgebra::parse(&structure).map_err(|e| e.to_string())?;
        let mut values = BTreeMap::new();
        for p in &args.params {
            let (k, v) = p.split_once('=').ok_or_else(|| format!("--param `{p}`: expected NAME=RAT"))?;
            let k = k.trim();
            if !family.params().contains(k) {
                return Err(format!("--param: the algebra has no parameter `{k}`"));
            }
            values.insert(k.to_string(), rat_arg(k, v.trim())?);
        }
        Ok(Self { name, family, values })
    }

    fn label(&self) -> &str {
        if self.name.is_empty() {
            "algebra"
        } else {
            &self.name
        }
    }

    fn structure(&self) -> String {
        self.family.structure_string()
    }

    fn algebra(&self) -> Result<NiceLieAlgebra> {
        self.family.substitute(&self.values).map_err(|e| e.to_string())
    }

    fn permutation(&self, s: &str) -> Result<NodePermutation> {
        NodePermutation::parse(s, self.family.n()).map_err(|e| e.to_string())
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { alg } => validate(&alg),
        Command::Info { alg } => info(&alg),
        Command::Einstein { alg, k, mode, sigma, solve_param, out, timing } => {
            einstein(&alg, &k, mode, sigma.as_deref(), solve_param.as_deref(), out, timing)
        }
        Command::Verify { alg, metric, lambda, tol } => verify(&alg, &metric, &lambda, tol),
        Command::Curvature { alg, metric } => curvature(&alg, &metric),
        Command::Catalog { action } => match action {
            CatalogAction::Run { filter, out, file, timing } => catalog_run(&filter, out, file, timing),
            CatalogAction::List { filter, file } => catalog_list(&filter, file),
        },
    }
}

fn validate(alg: &AlgebraArgs) -> Result<ExitCode> {
    let input = match Input::resolve(alg) {
        Ok(i) => i,
        Err(e) => {
            println!("invalid: {e}");
            return Ok(ExitCode::from(1));
        }
    };
    let free: Vec<String> = input.family.params().into_iter().filter(|p| !input.values.contains_key(p)).collect();
    if !free.is_empty() {
        println!("valid nice diagram; Jacobi identity not checked (unbound parameters: {})", free.join(", "));
        return Ok(ExitCode::SUCCESS);
    }
    match input.algebra() {
        Ok(a) => {
            println!("valid: {} (dimension {}, {} brackets)", a.structure_string(), a.n(), a.m());
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn info(alg: &AlgebraArgs) -> Result<ExitCode> {
    let input = Input::resolve(alg)?;
    let d = input.family.diagram();
    let rm = d.root_matrix();
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("{}: {}", input.label(), input.structure()));
    line(format!("dimension {}, |Δ| = {}", d.n(), d.m()));
    line("root matrix (row {ij,k} for [e_i,e_j] ∝ e_k):".into());
    for (e, row) in d.index_set().iter().zip(&rm.ints) {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>2}")).collect();
        line(format!("  {e:<10} {}", cells.join(" ")));
    }
    line(format!("rank over Q: {}", rm.q.rank()));
    line(format!("rank over F2: {}", rm.f2.rank()));
    let ker = kernel_basis(&rm.q);
    line(format!("ker M (diagonal derivations), dim {}:", ker.len()));
    for v in &ker {
        line(format!("  {}", fmt_vec(v)));
    }
    let coker = kernel_basis(&rm.q.transpose());
    line(format!("ker ᵀM, dim {}:", coker.len()));
    for v in &coker {
        line(format!("  {}", fmt_vec(v)));
    }
    match d.automorphisms() {
        Ok(auts) => {
            line(format!("Aut(Δ): {} elements", auts.len()));
            for s in &auts {
                line(format!("  {s}"));
            }
        }
        Err(e) => line(format!("Aut(Δ): {e}")),
    }
    match d.involutions() {
        Ok(inv) => {
            line(format!("involutions: {}", inv.len()));
            for (s, free) in &inv {
                line(format!("  {s}{}", if *free { "  (fixed-point free)" } else { "" }));
            }
        }
        Err(e) => line(format!("involutions: {e}")),
    }
    match input.algebra() {
        Ok(a) => {
            let fd = a.fundamental_domain();
            let show = |v: &[nice_einstein::diagram::IndexEntry]| {
                v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
            };
            line("fundamental domain:".into());
            line(format!("  c = 1:  {}", show(&fd.normalized_one)));
            line(format!("  c = ±1: {}", show(&fd.normalized_sign)));
            line(format!("  free:   {}", show(&fd.free)));
        }
        Err(e) => line(format!("fundamental domain: {e}")),
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn emit(records: &[ResultRecord], out: Out) -> Result<()> {
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match out {
        Out::Text => {
            for r in records {
                writeln!(w, "{}", r.to_text()).map_err(|e| e.to_string())?;
            }
        }
        Out::Json => {
            let s = serde_json::to_string_pretty(&RecordSet::new(records.to_vec())).map_err(|e| e.to_string())?;
            writeln!(w, "{s}").map_err(|e| e.to_string())?;
        }
        Out::Csv => write_csv(records, &mut w).map_err(|e| e.to_string())?,
    }
    Ok(())
}

fn einstein(
    alg: &AlgebraArgs,
    k: &str,
    mode: ModeArg,
    sigma: Option<&str>,
    solve_param: Option<&str>,
    out: Out,
    timing: bool,
) -> Result<ExitCode> {
    let input = Input::resolve(alg)?;
    let k = rat_arg("--k", k)?;
    let opts = options()?;
    let sigma = match (mode, sigma) {
        (ModeArg::Sigma, Some(s)) => Some(input.permutation(s)?),
        (ModeArg::Sigma, None) => return Err("--mode sigma needs --sigma".into()),
        (ModeArg::Diagonal, Some(s)) => Some(input.permutation(s)?),
        (ModeArg::Diagonal, None) => None,
    };
    let start = Instant::now();
    let mut record = match solve_param {
        Some(p) => {
            let sol = parameter_solve(&input.family.partial(&input.values), p, sigma.as_ref(), &k, &opts)
                .map_err(|e| e.to_string())?;
            ResultRecord::from_param_solution(
                input.label(),
                &input.structure(),
                sigma.as_ref().map(|s| s.to_string()),
                &k,
                &input.values,
                &sol,
            )
        }
        None => {
            let a = input.algebra()?;
            let mode = sigma.map_or(Mode::Diagonal, Mode::Sigma);
            let c = classify(&a, mode, &k, &opts).map_err(|e| e.to_string())?;
            ResultRecord::from_classification(input.label(), &input.structure(), &input.values, &c)
        }
    };
    if timing {
        record.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    emit(std::slice::from_ref(&record), out)?;
    Ok(if record.is_found() {
        ExitCode::SUCCESS
    } else if record.numeric {
        ExitCode::from(3)
    } else {
        ExitCode::from(2)
    })
}

fn parse_metric(input: &Input, m: &MetricArgs) -> Result<GeneralMetric<Rat>> {
    let n = input.family.n();
    let rows: Vec<Vec<Rat>> = m
        .metric
        .split(';')
        .map(|row| row.split(',').map(|x| rat_arg("--metric", x.trim())).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if rows.len() == 1 {
        let g = &rows[0];
        if g.len() != n {
            return Err(format!("--metric has {} entries, algebra has dimension {n}", g.len()));
        }
        return Ok(match &m.sigma {
            None => GeneralMetric::diagonal(g),
            Some(s) => {
                let s = input.permutation(s)?;
                let images: Vec<usize> = (1..=n).map(|i| s.apply(i) - 1).collect();
                GeneralMetric::sigma_diagonal(g, &images)
            }
        });
    }
    if m.sigma.is_some() {
        return Err("--sigma applies only to a list of diagonal entries".into());
    }
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(format!("--metric must be a {n}×{n} matrix"));
    }
    let g = GeneralMetric::new(n, rows.concat()).map_err(|e| e.to_string())?;
    if !g.is_symmetric() {
        return Err("--metric is not symmetric".into());
    }
    Ok(g)
}

fn verify(alg: &AlgebraArgs, m: &MetricArgs, lambda: &str, tol: Option<f64>) -> Result<ExitCode> {
    let input = Input::resolve(alg)?;
    let a = input.algebra()?;
    let g = parse_metric(&input, m)?;
    let lambda = rat_arg("--lambda", lambda)?;
    let tol = match tol {
        Some(t) => t,
        None => options()?.tol,
    };
    let ric = ricci(&a.structure_constants(), &g).map_err(|e| e.to_string())?;
    let n = a.n();
    let mut worst = rat(0);
    let mut at = None;
    for i in 0..n {
        for j in 0..n {
            let mut v = ric.operator[i * n + j].clone();
            if i == j {
                v -= &lambda;
            }
            let v = if v < rat(0) { -v } else { v };
            if v > worst {
                worst = v;
                at = Some((i + 1, j + 1));
            }
        }
    }
    let diag: Vec<Rat> = ric.operator_diagonal();
    println!("{}: {}", input.label(), a.structure_string());
    println!("Ricci operator diagonal: {}", fmt_vec(&diag));
    println!("Ricci operator is diagonal: {}", ric.operator_is_diagonal());
    println!("scalar curvature: {}", fmt_rat(&ric.scalar()));
    let value = Scalar::to_f64(&worst);
    match at {
        None => println!("residual |Ric - {}·id|: 0 (exact)", fmt_rat(&lambda)),
        Some((i, j)) => println!("residual |Ric - {}·id|: {} at ({i},{j})", fmt_rat(&lambda), fmt_rat(&worst)),
    }
    let pass = value <= tol;
    println!("{}", if pass { "Einstein: yes" } else { "Einstein: no" });
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn curvature(alg: &AlgebraArgs, m: &MetricArgs) -> Result<ExitCode> {
    let input = Input::resolve(alg)?;
    let a = input.algebra()?;
    let g = parse_metric(&input, m)?;
    let sc = a.structure_constants();
    let err = |e: nice_einstein::error::CurvatureError| e.to_string();
    println!("{}: {}", input.label(), a.structure_string());
    println!("g(R,R) = {}", fmt_rat(&riemann_norm(&sc, &g).map_err(err)?));
    match projected_norm(&sc, &g) {
        Ok(v) => println!("g(R',R') = {}", fmt_rat(&v)),
        Err(e) => println!("g(R',R'): {e}"),
    }
    println!("scalar curvature = {}", fmt_rat(&scalar_curvature(&sc, &g).map_err(err)?));
    match ad_invariance_check(&sc, &g) {
        None => println!("ad-invariant: yes"),
        Some((x, y, z)) => println!("ad-invariant: no (<[e{x},e{y}],e{z}> + <e{y},[e{x},e{z}]> ≠ 0)"),
    }
    Ok(ExitCode::SUCCESS)
}

fn load_catalog(file: Option<PathBuf>) -> Result<Vec<CatalogEntry>> {
    match file {
        None => Ok(catalog::builtin()),
        Some(p) => {
            let s = std::fs::read_to_string(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            catalog::parse(&s).map_err(|e| format!("{}: {e}", p.display()))
        }
    }
}

fn catalog_run(filter: &str, out: Out, file: Option<PathBuf>, timing: bool) -> Result<ExitCode> {
    let entries: Vec<CatalogEntry> =
        load_catalog(file)?.into_iter().filter(|e| catalog::glob_match(filter, &e.name)).collect();
    if entries.is_empty() {
        return Err(format!("no catalogue entry matches `{filter}`"));
    }
    let opts = options()?;
    let results: Vec<Vec<std::result::Result<ResultRecord, String>>> = entries
        .par_iter()
        .map(|e| {
            e.cases
                .iter()
                .map(|c| {
                    let start = Instant::now();
                    let mut r = e.run_case(c, &opts).map_err(|x| x.to_string())?.record;
                    if timing {
                        r.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                    }
                    Ok(r)
                })
                .collect()
        })
        .collect();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for r in results.into_iter().flatten() {
        match r {
            Ok(r) => records.push(r),
            Err(e) => errors.push(e),
        }
    }
    emit(&records, out)?;
    let mismatched = records.iter().filter(|r| !r.diffs.is_empty()).count();
    eprintln!("{} cases, {} mismatched, {} errors", records.len() + errors.len(), mismatched, errors.len());
    for e in &errors {
        eprintln!("error: {e}");
    }
    Ok(if mismatched == 0 && errors.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn catalog_list(filter: &str, file: Option<PathBuf>) -> Result<ExitCode> {
    for e in load_catalog(file)?.iter().filter(|e| catalog::glob_match(filter, &e.name)) {
        let params: Vec<String> = e
            .params
            .iter()
            .map(|p| {
                if p.excluded.is_empty() {
                    p.name.clone()
                } else {
                    format!("{} ∉ {{{}}}", p.name, p.excluded.join(", "))
                }
            })
            .collect();
        let mut line = format!("{:<10} {}", e.name, e.structure);
        if !params.is_empty() {
            line.push_str(&format!("  [{}]", params.join("; ")));
        }
        line.push_str(&format!("  {} case{}", e.cases.len(), if e.cases.len() == 1 { "" } else { "s" }));
        println!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}
