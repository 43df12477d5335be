use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entangle_cli::io::{file_stem, read_state, write_file, State, TensorFile};
use entangle_cli::report::ClassificationReport;
use entangle_cli::selftest;
use entangle_core::catalog::{entries, Table};
use entangle_core::classify::{classify3, ClassifyConfig};
use entangle_core::formulas::{self, MonomialSpec, PropositionReport, Status, Tagged};
use entangle_core::slocc::{orbit_invariance_test, orbit_invariance_test2, random_secant_point, random_tensor, OrbitReport};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "entangle", version, about = "Entanglement-family classification of three-qutrit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify tensor files
    Classify(ClassifyArgs),
    /// List, export or self-test the built-in catalog
    Catalog(CatalogArgs),
    /// Closed-form rank formulas
    Formulas(FormulasArgs),
    /// Check that the label survives random local transforms
    Orbit(OrbitArgs),
    /// Emit seeded random tensors
    Random(RandomArgs),
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Args, Clone)]
struct Tolerances {
    /// Relative singular-value threshold for every rank decision
    #[arg(long, default_value_t = ClassifyConfig::default().rank_tol)]
    tol: f64,
    /// |det F| must exceed this times |t|^9 to count as nonzero
    #[arg(long, default_value_t = ClassifyConfig::default().det_tol)]
    det_tol: f64,
    /// CP fitting restarts per rank
    #[arg(long, default_value_t = ClassifyConfig::default().als.restarts, value_parser = positive)]
    restarts: usize,
    /// CP fitting sweep budget per restart
    #[arg(long, default_value_t = ClassifyConfig::default().als.max_iters)]
    max_iters: usize,
    /// Relative residual that counts as an exact fit
    #[arg(long, default_value_t = ClassifyConfig::default().als.tol_fit)]
    fit_tol: f64,
    /// Largest CP rank tried by the witness search
    #[arg(long, default_value_t = ClassifyConfig::default().r_max, value_parser = positive)]
    r_max: usize,
    /// Also search tensor-rank witnesses for k = 4 and k = 5
    #[arg(long)]
    witness_high_rank: bool,
    /// Skip the larger-budget second pass on unsettled fits
    #[arg(long)]
    no_escalate: bool,
}

impl Tolerances {
    fn config(&self, seed: Option<u64>) -> ClassifyConfig {
        let mut cfg = ClassifyConfig {
            rank_tol: self.tol,
            det_tol: self.det_tol,
            r_max: self.r_max,
            witness_high_rank: self.witness_high_rank,
            escalate: !self.no_escalate,
            ..ClassifyConfig::default()
        };
        cfg.als.restarts = self.restarts;
        cfg.als.max_iters = self.max_iters;
        cfg.als.tol_fit = self.fit_tol;
        if let Some(seed) = seed {
            cfg.als.seed = seed;
        }
        cfg
    }
}

#[derive(Args)]
struct OutputFormat {
    /// Machine-readable output
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Human-readable output (default)
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    #[command(flatten)]
    tolerances: Tolerances,
    /// Seed of the CP fitting restarts
    #[arg(long, env = "ENTANGLE_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    #[command(flatten)]
    format: OutputFormat,
}

#[derive(Args)]
#[group(id = "action", required = true, multiple = false, args = ["list", "emit", "selftest"])]
struct CatalogArgs {
    /// Print every entry with its expected label
    #[arg(long)]
    list: bool,
    /// Write every entry as a tensor file into this directory
    #[arg(long, value_name = "DIR")]
    emit: Option<PathBuf>,
    /// Classify every entry and compare with its expected label
    #[arg(long)]
    selftest: bool,
    #[command(flatten)]
    tolerances: Tolerances,
    /// Seed of the CP fitting restarts
    #[arg(long, env = "ENTANGLE_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
}

#[derive(Args)]
struct FormulasArgs {
    #[command(subcommand)]
    query: Formula,
    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Formula {
    /// Waring rank and border rank of a monomial given by its exponents
    Waring {
        #[arg(required = true)]
        exponents: Vec<u64>,
    },
    /// Generic rank of d x d x d tensors
    GenericRank { d: u64 },
    /// Generic symmetric rank of degree-n forms in d variables
    SymmetricRank { n: u64, d: u64 },
    /// Expected generic rank of a multipartite shape
    ExpectedRank {
        #[arg(required = true)]
        dims: Vec<u64>,
    },
    /// Ranks of the n-qubit Dicke state with l excitations
    DickeQubit { n: u64, l: u64 },
    /// Secant family of the most entangled n-qutrit Dicke state
    DickeQutrit { n: u64 },
    /// Symmetric cubics against tripartite generic rank, d in FROM..=TO
    Prop1 {
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long, default_value_t = 10)]
        to: u64,
    },
    /// Qutrit Dicke secant index against generic symmetric rank, n in FROM..=TO
    Prop2 {
        #[arg(long, default_value_t = 3)]
        from: u64,
        #[arg(long, default_value_t = 15)]
        to: u64,
    },
}

#[derive(Args)]
struct OrbitArgs {
    path: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Seed of the random local transforms
    #[arg(long, env = "ENTANGLE_SEED", value_parser = parse_seed, default_value = "0")]
    seed: u64,
    #[command(flatten)]
    tolerances: Tolerances,
    #[command(flatten)]
    format: OutputFormat,
}

#[derive(Args)]
struct RandomArgs {
    /// Local dimension of each of the three parties
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, env = "ENTANGLE_SEED", value_parser = parse_seed, default_value = "0")]
    seed: u64,
    /// Only emit states the classifier puts in the k-secant family
    #[arg(long, value_name = "K")]
    family: Option<usize>,
    /// Candidates drawn per emitted state before giving up
    #[arg(long, default_value_t = 100)]
    max_attempts: usize,
    /// Directory for the files; without it a JSON array goes to stdout
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify(a) => classify(a),
        Command::Catalog(a) => catalog(a),
        Command::Formulas(a) => run_formula(a),
        Command::Orbit(a) => orbit(a),
        Command::Random(a) => random(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

type CmdResult = Result<bool, Box<dyn std::error::Error>>;

fn print_json(value: &impl Serialize) -> Result<(), serde_json::Error> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn classify(a: ClassifyArgs) -> CmdResult {
    let cfg = a.tolerances.config(a.seed);
    let reports: Vec<ClassificationReport> = a
        .paths
        .par_iter()
        .map(|p| {
            let id = p.display().to_string();
            match read_state(p) {
                Ok(state) => ClassificationReport::classify(id, &state, &cfg),
                Err(e) => ClassificationReport::failed(id, e.detail(), &cfg),
            }
        })
        .collect();
    if a.format.json {
        print_json(&reports)?;
    } else {
        for r in &reports {
            print!("{}", r.to_text());
        }
    }
    Ok(reports.iter().all(|r| !r.is_error()))
}

fn catalog(a: CatalogArgs) -> CmdResult {
    if a.list {
        for e in entries() {
            let table = match e.table {
                Some(Table::ThreeQutrit) => "three-qutrit table",
                Some(Table::TwoQutrit) => "two-qutrit table",
                None => "extra",
            };
            println!("{:<17} {:<10} {:<18} {}", e.name, format!("{:?}", e.state.dims()), table, e.expected);
        }
        return Ok(true);
    }
    if let Some(dir) = a.emit {
        fs::create_dir_all(&dir)?;
        let all = entries();
        for e in &all {
            let path = dir.join(format!("{}.json", file_stem(&e.name)));
            write_file(&path, &TensorFile::from_amps(&e.state.dims(), e.state.amps()))?;
        }
        println!("wrote {} files to {}", all.len(), dir.display());
        return Ok(true);
    }
    let rows = selftest::run(&a.tolerances.config(a.seed));
    print!("{}", selftest::render(&rows));
    Ok(rows.iter().all(|r| r.ok()))
}

fn tag_note(t: &Tagged, exception: &str) -> String {
    match t.status {
        Status::Exception => format!("{} (exception: {exception})", t.value),
        s => format!("{} ({s})", t.value),
    }
}

fn family(k: u64, tangent: bool) -> String {
    format!("{}_{k}", if tangent { "tau" } else { "sigma" })
}

fn proposition_text(report: &PropositionReport, name: &str) -> String {
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| {
            let verdict = if c.holds { "holds" } else { "VIOLATED" };
            format!("{name}={}: {} < {} {verdict}", c.parameter, c.lhs, c.rhs)
        })
        .collect();
    lines.extend(report.skipped.iter().map(|(p, why)| format!("{name}={p}: skipped, {why}")));
    lines.push(if report.passed() { "all checks hold".into() } else { "some checks fail".into() });
    lines.join("\n")
}

fn run_formula(a: FormulasArgs) -> CmdResult {
    let (text, value, ok) = match a.query {
        Formula::Waring { exponents } => {
            let m = MonomialSpec::new(&exponents)?;
            let rank = formulas::waring_rank(&m);
            let border = formulas::waring_border_rank(&m);
            let text = format!(
                "monomial exponents {:?}, degree {}\nrank {} ({})\nborder rank {} ({})",
                m.exponents(),
                m.degree(),
                rank.value,
                rank.status,
                border.value,
                border.status
            );
            (text, json!({"exponents": m.exponents(), "rank": rank, "border_rank": border}), true)
        }
        Formula::GenericRank { d } => {
            let r = formulas::generic_rank_tripartite(d)?;
            let note = format!("the formula ceil(d^3/(3d-2)) gives {} at d = {d}", (d * d * d).div_ceil(3 * d - 2));
            (format!("generic rank {}", tag_note(&r, &note)), json!({"d": d, "generic_rank": r}), true)
        }
        Formula::SymmetricRank { n, d } => {
            let r = formulas::generic_symmetric_rank(n, d)?;
            let note = "listed exception to ceil(C(n+d-1, n)/d)";
            (format!("generic symmetric rank {}", tag_note(&r, note)), json!({"n": n, "d": d, "generic_symmetric_rank": r}), true)
        }
        Formula::ExpectedRank { dims } => {
            let r = formulas::expected_rank_multipartite(&dims)?;
            let text = match r.status {
                Status::Exception => format!("expected generic rank {} (exceptional shape, one above the count)", r.value),
                _ => format!("expected generic rank {} (equality with the generic rank is conjectural)", r.value),
            };
            (text, json!({"dims": dims, "expected_rank": r}), true)
        }
        Formula::DickeQubit { n, l } => {
            let r = formulas::qubit_dicke_ranks(n, l)?;
            let text = format!("rank {}, border rank {}, family {} ({})", r.rank, r.border, family(r.k, r.tangent), r.status);
            (text, json!({"n": n, "l": l, "ranks": r, "family": family(r.k, r.tangent)}), true)
        }
        Formula::DickeQutrit { n } => {
            let r = formulas::qutrit_dicke_secant(n)?;
            let text = format!(
                "excitations {:?}, secant index {}, family {} ({})",
                r.excitations,
                r.k,
                family(r.k, r.tangent),
                r.status
            );
            (text, json!({"n": n, "dicke": r, "family": family(r.k, r.tangent)}), true)
        }
        Formula::Prop1 { from, to } => {
            let r = formulas::check_proposition1(from..=to)?;
            (proposition_text(&r, "d"), serde_json::to_value(&r)?, r.passed())
        }
        Formula::Prop2 { from, to } => {
            let r = formulas::check_proposition2(from..=to)?;
            (proposition_text(&r, "n"), serde_json::to_value(&r)?, r.passed())
        }
    };
    if a.json {
        print_json(&value)?;
    } else {
        println!("{text}");
    }
    Ok(ok)
}

fn orbit_text(r: &OrbitReport) -> String {
    let mut lines = vec![
        format!("baseline: {}", r.baseline),
        format!("agreements: {}/{}", r.agreements, r.trials),
    ];
    if !r.near_threshold.is_empty() {
        lines.push(format!("agreeing trials with warnings: {:?}", r.near_threshold));
    }
    for t in &r.disagreements {
        let got = match (&t.label, &t.error) {
            (Some(l), _) => l.to_string(),
            (None, Some(e)) => format!("error: {e}"),
            (None, None) => "no result".into(),
        };
        lines.push(format!("trial {} disagrees: {got}", t.trial));
    }
    lines.join("\n")
}

fn orbit(a: OrbitArgs) -> CmdResult {
    let cfg = a.tolerances.config(None);
    let report = match read_state(&a.path)? {
        State::Three(t) => orbit_invariance_test(&t, a.trials, a.seed, &cfg)?,
        State::Two(t) => orbit_invariance_test2(&t, a.trials, a.seed, &cfg)?,
    };
    if a.format.json {
        print_json(&report)?;
    } else {
        println!("{}", orbit_text(&report));
    }
    Ok(report.passed())
}

/// Sample `index` of a family run, or `None` once the attempt budget is spent.
fn sample_family(d: usize, k: usize, seed: u64, index: u64, attempts: usize, cfg: &ClassifyConfig) -> Option<TensorFile> {
    (0..attempts as u64).find_map(|attempt| {
        let t = random_secant_point([d; 3], k, seed, index * attempts as u64 + attempt);
        let label = classify3(&t, cfg).ok()?.label;
        (label.k == k).then(|| TensorFile::from_amps(&t.dims(), t.amps()))
    })
}

fn random(a: RandomArgs) -> CmdResult {
    if a.d == 0 {
        return Err("--d must be positive".into());
    }
    let files: Vec<TensorFile> = match a.family {
        None => (0..a.count as u64)
            .map(|i| random_tensor([a.d; 3], a.seed, i).map(|t| TensorFile::from_amps(&t.dims(), t.amps())))
            .collect::<Result<_, _>>()?,
        Some(k) => {
            if a.d != 3 {
                return Err("--family needs --d 3".into());
            }
            if !(1..=5).contains(&k) {
                return Err(format!("--family must be between 1 and 5, got {k}").into());
            }
            let cfg = ClassifyConfig::default();
            let drawn: Vec<Option<TensorFile>> = (0..a.count as u64)
                .into_par_iter()
                .map(|i| sample_family(a.d, k, a.seed, i, a.max_attempts, &cfg))
                .collect();
            if let Some(i) = drawn.iter().position(Option::is_none) {
                return Err(format!("sample {i}: no state of family k = {k} in {} attempts", a.max_attempts).into());
            }
            drawn.into_iter().flatten().collect()
        }
    };
    match a.out {
        Some(dir) => {
            fs::create_dir_all(&dir)?;
            for (i, f) in files.iter().enumerate() {
                let path = dir.join(format!("random_{i:04}.json"));
                write_file(&path, f)?;
                println!("{}", path.display());
            }
        }
        None => print_json(&files)?,
    }
    Ok(true)
}
