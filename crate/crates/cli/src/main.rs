use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use posiqubo::anf::{parse_anf, system_to_qubo, AnfReport};
use posiqubo::factor::{factor_pipeline, FactorConfig, FactorReport, SolverChoice, FACTOR_RESTARTS, FACTOR_SWEEPS};
use posiqubo::io;
use posiqubo::quadratize::{reduce_alg1, reduce_alg2, reduce_alg3, EquationSystem};
use posiqubo::qubo::{poly_to_qubo, qubo_stats, solve_exact, solve_sa, AnnealSchedule, QuboModel, SolveResult};
use posiqubo::{Error, Polynomial};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "posiqubo",
    version,
    about = "Compile pseudo-Boolean problems into QUBO models and solve them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
struct Common {
    /// Solver; auto picks exact when the model fits the cap
    #[arg(long, global = true, value_enum, default_value_t = Solver::Auto)]
    solver: Solver,
    /// Seed for the annealer
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Annealing sweeps per restart [default: 2000 for factor, 5000 otherwise]
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// Annealing restarts [default: 16384 for factor, 8 otherwise]
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Largest model the exact solver accepts
    #[arg(long, global = true, default_value_t = posiqubo::qubo::EXACT_CAP)]
    cap: usize,
    /// Write the JSON report (factor, solve, stats) or the model (reduce, anf2qubo) here
    #[arg(long, global = true)]
    #[serde(skip)]
    output: Option<PathBuf>,
    /// Format of standard output
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    #[serde(skip)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Solver {
    Auto,
    Exact,
    Sa,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Factor an odd semiprime through block equations and a QUBO model
    Factor {
        number: u64,
        /// Multiplication-table columns per block equation
        #[arg(long, default_value_t = 4)]
        block_width: usize,
        /// Skip the conflict-graph reductions
        #[arg(long)]
        no_graph_opt: bool,
        /// Bit lengths of the two factors, as n,m [default: searched]
        #[arg(long, value_parser = parse_bits)]
        bits: Option<(usize, usize)>,
    },
    /// Quadratize a polynomial (.poly or .json) or an equation system (.json)
    Reduce {
        file: PathBuf,
        /// 1: pairwise substitution; 2: half-degree substitution; 3: equation system
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        alg: u8,
        /// Target degree for --alg 2
        #[arg(long, default_value_t = 2)]
        target: usize,
    },
    /// Compile a GF(2) system (.anf) into a QUBO model
    Anf2qubo {
        file: PathBuf,
        /// Fix variables before compiling, as name=bit,...
        #[arg(long)]
        fix: Option<String>,
        /// Print the variable count and coefficient range
        #[arg(long)]
        stats: bool,
    },
    /// Minimize a QUBO model (.qubo, .json, or quadratic .poly)
    Solve { file: PathBuf },
    /// Print size and coefficient statistics of a QUBO model
    Stats { file: PathBuf },
}

fn parse_bits(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected n,m")?;
    let n = a.trim().parse().map_err(|e| format!("{e}"))?;
    let m = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((n, m))
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure {
            code: 4,
            message: format!("{}: {e}", path.display()),
        }
    }

    /// Errors raised while reading `path`.
    fn file(path: &Path, e: Error) -> Self {
        let code = match e {
            Error::Cap { .. } => 3,
            Error::Parse { .. } | Error::Dimension { .. } => 4,
            _ => 1,
        };
        Failure {
            code,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Cap { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let c = &cli.common;
    match &cli.command {
        Command::Factor {
            number,
            block_width,
            no_graph_opt,
            bits,
        } => factor(c, *number, *block_width, !no_graph_opt, *bits),
        Command::Reduce { file, alg, target } => reduce(c, file, *alg, *target),
        Command::Anf2qubo { file, fix, stats } => anf2qubo(c, file, fix.as_deref(), *stats),
        Command::Solve { file } => solve(c, file),
        Command::Stats { file } => stats(c, file),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::io(path, e))
}

fn extension(path: &Path) -> &str {
    path.extension().and_then(|e| e.to_str()).unwrap_or("")
}

fn load_qubo(path: &Path) -> Result<QuboModel, Failure> {
    let text = read(path)?;
    let ext = extension(path);
    let q = match ext {
        "qubo" => QuboModel::from_text(&text),
        "json" => io::qubo_from_json(&text),
        "poly" => io::polynomial_from_json(&text).and_then(|p| poly_to_qubo(&p)),
        _ => {
            return Err(Failure::usage(format!(
                "{}: expected a .qubo, .json or .poly file",
                path.display()
            )))
        }
    };
    q.map_err(|e| Failure::file(path, e))
}

fn store_qubo(path: &Path, q: &QuboModel) -> Result<(), Failure> {
    let text = if extension(path) == "qubo" {
        q.to_text()
    } else {
        io::qubo_to_json(q)
    };
    write(path, &text)
}

/// Prints `text` or the JSON of `report`, and writes the JSON to `--output`.
fn emit<T: Serialize>(c: &Common, text: &str, report: &T, report_to_file: bool) -> Result<(), Failure> {
    let json = io::to_json(report);
    match c.format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{json}"),
    }
    if report_to_file {
        if let Some(path) = &c.output {
            write(path, &format!("{json}\n"))?;
        }
    }
    Ok(())
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
}

fn factor(c: &Common, number: u64, block_width: usize, graph_opt: bool, bits: Option<(usize, usize)>) -> Outcome {
    if number < 9 || number.is_multiple_of(2) {
        return Err(Failure::usage(format!("N = {number} must be odd and at least 9")));
    }
    if block_width < 1 {
        return Err(Failure::usage("--block-width must be at least 1"));
    }
    let config = FactorConfig {
        bits,
        block_width,
        graph_opt,
        solver: match c.solver {
            Solver::Auto => SolverChoice::Auto,
            Solver::Exact => SolverChoice::Exact,
            Solver::Sa => SolverChoice::Sa,
        },
        cap: c.cap,
        seed: c.seed,
        sweeps: Some(c.sweeps.unwrap_or(FACTOR_SWEEPS)),
        restarts: Some(c.restarts.unwrap_or(FACTOR_RESTARTS)),
    };
    let run = factor_pipeline(number, &config)?;
    let r: &FactorReport = &run.report;
    let mut text = match (r.p, r.q) {
        (Some(p), Some(q)) => format!("{number} = {q} x {p}\n"),
        _ => format!("{number}: no factors found (best energy {})\n", r.energy),
    };
    text += &format!(
        "bits ({}, {}): {} equations, {} carries, {} variables before graph reduction, {} after\n",
        r.bits.0, r.bits.1, r.n_equations, r.n_carries, r.n_vars_pre, r.n_vars_post
    );
    text += &format!(
        "coefficient range [{}, {}] before, [{}, {}] after; solver {}, energy {}\n",
        r.coeff_min, r.coeff_max, r.coeff_min_post, r.coeff_max_post, r.solver, r.energy
    );
    emit(c, &text, r, true)?;
    Ok(if r.factored() { 0 } else { 2 })
}

#[derive(Serialize)]
struct ReduceReport {
    alg: u8,
    target: usize,
    n_in: usize,
    degree_in: usize,
    n_out: usize,
    degree_out: usize,
    n_aux: usize,
    coeff_min: i64,
    coeff_max: i64,
    substitutions: Vec<Substitution>,
}

#[derive(Serialize)]
struct Substitution {
    aux: usize,
    replaced: Vec<usize>,
}

fn load_system(path: &Path) -> Result<EquationSystem, Failure> {
    let text = read(path)?;
    let parsed = match extension(path) {
        "poly" => io::polynomial_from_json(&text).and_then(|p| EquationSystem::new(p.n(), vec![p])),
        "json" => io::system_from_json(&text).or_else(|e| {
            io::polynomial_from_json(&text)
                .and_then(|p| EquationSystem::new(p.n(), vec![p]))
                .map_err(|_| e)
        }),
        _ => {
            return Err(Failure::usage(format!(
                "{}: expected a .poly or .json file",
                path.display()
            )))
        }
    };
    parsed.map_err(|e| Failure::file(path, e))
}

fn reduce(c: &Common, path: &Path, alg: u8, target: usize) -> Outcome {
    let sys = load_system(path)?;
    let (input, (g, trace)) = if alg == 3 {
        let sum = sys.sum_of_squares()?;
        (sum, reduce_alg3(&sys)?)
    } else {
        if sys.len() != 1 {
            return Err(Failure::usage(format!(
                "--alg {alg} takes one polynomial, found {} equations",
                sys.len()
            )));
        }
        let f: &Polynomial = &sys.polys()[0];
        let reduced = if alg == 1 {
            reduce_alg1(f)?
        } else {
            reduce_alg2(f, target)?
        };
        (f.clone(), reduced)
    };
    let s = g.stats();
    let report = ReduceReport {
        alg,
        target: if alg == 2 { target } else { 2 },
        n_in: input.n(),
        degree_in: input.degree(),
        n_out: g.n(),
        degree_out: g.degree(),
        n_aux: trace.len(),
        coeff_min: s.min_coeff,
        coeff_max: s.max_coeff,
        substitutions: trace
            .records
            .iter()
            .map(|r| Substitution {
                aux: r.aux.index(),
                replaced: r.replaced.vars().iter().map(|v| v.index()).collect(),
            })
            .collect(),
    };
    let text = format!(
        "{} variables of degree {} -> {} variables of degree {} ({} auxiliary)\ncoefficient range [{}, {}]\n{}\n",
        report.n_in, report.degree_in, report.n_out, report.degree_out, report.n_aux, s.min_coeff, s.max_coeff, g
    );
    emit(c, &text, &report, false)?;
    if let Some(out) = &c.output {
        if g.degree() > 2 {
            write(out, &io::polynomial_to_json(&g))?;
        } else {
            store_qubo(out, &poly_to_qubo(&g)?)?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct AnfOutput<'a> {
    #[serde(flatten)]
    report: &'a AnfReport,
    fix: Vec<String>,
}

fn anf2qubo(c: &Common, path: &Path, fix: Option<&str>, stats: bool) -> Outcome {
    let sys = parse_anf(&read(path)?).map_err(|e| Failure::file(path, e))?;
    let fixes = sys
        .parse_fixes(fix.unwrap_or(""))
        .map_err(|e| Failure::usage(format!("--fix: {e}")))?;
    let compiled = system_to_qubo(&sys, &fixes).map_err(|e| match e {
        Error::Argument(m) => Failure::usage(format!("--fix: {m}")),
        e => e.into(),
    })?;
    let r = &compiled.report;
    let mut text = format!(
        "{} equations over {} inputs ({} fixed): {} variables, {} live\n",
        r.n_equations, r.n_inputs, r.n_fixed, r.n_vars, r.live_vars
    );
    if stats {
        text += &format!(
            "carries {}, auxiliary {}, largest equation {} monomials, variable bound {}\ncoefficient range [{}, {}]\n",
            r.n_carries, r.n_aux, r.max_m_f, r.var_bound, r.coeff_min, r.coeff_max
        );
    }
    let out = AnfOutput {
        report: r,
        fix: fixes
            .iter()
            .map(|(v, b)| format!("{}={}", sys.name(*v), *b as u8))
            .collect(),
    };
    emit(c, &text, &out, false)?;
    if let Some(path) = &c.output {
        store_qubo(path, &compiled.qubo)?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct SolveReport {
    n: usize,
    energy: i64,
    assignment: Vec<u8>,
    solver: String,
    work: u64,
    config: Common,
}

fn solve(c: &Common, path: &Path) -> Outcome {
    let q = load_qubo(path)?;
    let r: SolveResult = if c.solver == Solver::Exact || (c.solver == Solver::Auto && q.n() <= c.cap) {
        solve_exact(&q, c.cap)?
    } else {
        let d = AnnealSchedule::default_for(&q, c.seed);
        let s = AnnealSchedule {
            sweeps: c.sweeps.unwrap_or(d.sweeps),
            restarts: c.restarts.unwrap_or(d.restarts),
            ..d
        };
        solve_sa(&q, &s)?
    };
    let sa_defaults = AnnealSchedule::default_for(&q, c.seed);
    let config = Common {
        sweeps: Some(c.sweeps.unwrap_or(sa_defaults.sweeps)),
        restarts: Some(c.restarts.unwrap_or(sa_defaults.restarts)),
        ..c.clone()
    };
    let report = SolveReport {
        n: q.n(),
        energy: r.energy,
        assignment: r.assignment.bits().iter().map(|b| *b as u8).collect(),
        solver: r.solver.as_str().to_string(),
        work: r.work,
        config,
    };
    let text = format!(
        "energy {}\nx = {}\nsolver {}\n",
        r.energy,
        bits_string(r.assignment.bits()),
        report.solver
    );
    emit(c, &text, &report, true)?;
    Ok(if r.energy > 0 { 2 } else { 0 })
}

#[derive(Serialize)]
struct StatsReport {
    n: usize,
    live: usize,
    min_coeff: i64,
    max_coeff: i64,
    density: f64,
    offset: i64,
    n_offdiag: usize,
}

fn stats(c: &Common, path: &Path) -> Outcome {
    let q = load_qubo(path)?;
    let s = qubo_stats(&q);
    let report = StatsReport {
        n: s.n,
        live: s.live,
        min_coeff: s.min_coeff,
        max_coeff: s.max_coeff,
        density: s.density,
        offset: q.offset(),
        n_offdiag: q.offdiag().len(),
    };
    let text = format!(
        "{} variables ({} live), {} couplings, density {:.4}\ncoefficient range [{}, {}], offset {}\n",
        s.n, s.live, report.n_offdiag, s.density, s.min_coeff, s.max_coeff, report.offset
    );
    emit(c, &text, &report, true)?;
    Ok(0)
}
