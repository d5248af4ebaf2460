use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use subkraus::casestudy::{composite_kraus, sweep, DampingRates, SweepConfig};
use subkraus::io::{choi_to_json, parse_density, sweep_csv, MapFile};
use subkraus::reduction::{reduce_subsystem, Bipartition};
use subkraus::verify::{run_verify, Scope};
use subkraus::{
    choi_matrix, completeness_defect, cp_verdict, tol, Error, Execution, KrausMap, Subsystem,
};

/// Subsystem Kraus operators from composite maps, CP diagnostics and the two-qubit case study.
#[derive(Parser)]
#[command(name = "subkraus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a composite map to one factor, given the initial state of the other.
    Reduce {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        d1: usize,
        #[arg(long)]
        d2: usize,
        /// Initial state of the factor that is traced out.
        #[arg(long)]
        rho: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        keep: u8,
        #[arg(long, default_value_t = tol::TRUNCATION)]
        truncation: f64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the JSON report here (it always goes to stdout).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sweep the two-qubit model over a uniform time grid and write CSV.
    CaseStudy {
        #[arg(long)]
        gamma1: f64,
        #[arg(long)]
        gamma2: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the eight interaction-picture operators of the two-qubit model at time t.
    CaseMap {
        #[arg(long)]
        gamma1: f64,
        #[arg(long)]
        gamma2: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the built-in invariant suites.
    Verify {
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
    /// Dump the Choi matrix of a map file and its minimum eigenvalue.
    Choi {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    Structural,
    Model,
    All,
}

enum Failure {
    Verify,
    Validation(String),
    Model(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_model_diagnostic() {
            Failure::Model(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

#[derive(Serialize)]
struct ReduceReport {
    kept: u8,
    b_eigenvalues: Vec<f64>,
    operators: usize,
    truncated: usize,
    parent_completeness_defect: f64,
    completeness_defect: f64,
}

#[derive(Serialize)]
struct CompletenessReport {
    error: &'static str,
    completeness_defect: f64,
    tolerance: f64,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    let f = Failure::from(e);
    match f {
        Failure::Validation(m) => Failure::Validation(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report is plain data") + "\n"
}

#[allow(clippy::too_many_arguments)]
fn reduce(
    map_path: &Path,
    d1: usize,
    d2: usize,
    rho_path: &Path,
    keep: u8,
    truncation: f64,
    out: &Path,
    report_path: Option<&Path>,
) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&truncation) {
        return Err(Failure::Validation(format!(
            "--truncation must lie in [0, 1), got {truncation}"
        )));
    }
    let file = MapFile::parse(&read(map_path)?).map_err(|e| in_file(map_path, e))?;
    let rho = parse_density(&read(rho_path)?).map_err(|e| in_file(rho_path, e))?;
    let split = Bipartition::new(d1, d2)?;
    if file.map.dim() != split.composite_dim() {
        return Err(Failure::Validation(format!(
            "map dimension {} does not equal d1 * d2 = {}",
            file.map.dim(),
            split.composite_dim()
        )));
    }
    let parent_defect = completeness_defect(&file.map);
    if parent_defect > tol::MODEL {
        println!(
            "{}",
            to_json(&CompletenessReport {
                error: "completeness condition violated",
                completeness_defect: parent_defect,
                tolerance: tol::MODEL,
            })
            .trim_end()
        );
        return Err(Error::CompletenessViolated {
            defect: parent_defect,
            tol: tol::MODEL,
        }
        .into());
    }
    let map = KrausMap::trace_preserving(file.map.into_operators())?;
    let keep_sub = if keep == 1 {
        Subsystem::First
    } else {
        Subsystem::Second
    };
    let result = reduce_subsystem(&map, split, &rho, keep_sub, truncation)?;

    let label = file
        .label
        .map(|l| format!("{l} (reduced to factor {keep})"));
    write(
        out,
        &MapFile::new(result.subsystem_map.clone(), label).to_canonical_json()?,
    )?;
    let report = to_json(&ReduceReport {
        kept: keep,
        b_eigenvalues: result.eigenvalues.clone(),
        operators: result.subsystem_map.len(),
        truncated: result.truncated(),
        parent_completeness_defect: parent_defect,
        completeness_defect: completeness_defect(&result.subsystem_map),
    });
    print!("{report}");
    if let Some(p) = report_path {
        write(p, &report)?;
    }
    Ok(())
}

fn case_study(
    gamma1: f64,
    gamma2: f64,
    a: f64,
    t_max: f64,
    steps: usize,
    out: &Path,
) -> Result<(), Failure> {
    let cfg = SweepConfig::new(gamma1, gamma2, a, t_max, steps)?;
    let rows = sweep(&cfg, Execution::default())?;
    write(out, &sweep_csv(&rows)?)
}

fn case_map(gamma1: f64, gamma2: f64, t: f64, out: &Path) -> Result<(), Failure> {
    let rates = DampingRates::new(gamma1, gamma2)?;
    let map = composite_kraus(t, &rates)?;
    let label = format!("two-qubit model, gamma1 = {gamma1}, gamma2 = {gamma2}, t = {t}");
    write(out, &MapFile::new(map, Some(label)).to_canonical_json()?)
}

fn choi(map_path: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let file = MapFile::parse(&read(map_path)?).map_err(|e| in_file(map_path, e))?;
    let choi = choi_matrix(&file.map);
    let verdict = cp_verdict(&choi, tol::STRUCTURAL)?;
    let text = choi_to_json(&choi, &verdict)?;
    match out {
        Some(p) => {
            write(p, &text)?;
            println!(
                "min_eigenvalue {:.16e} is_cp {}",
                verdict.min_eigenvalue, verdict.is_cp
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn verify(scope: ScopeArg) -> Result<(), Failure> {
    let scope = match scope {
        ScopeArg::Structural => Scope::Structural,
        ScopeArg::Model => Scope::Model,
        ScopeArg::All => Scope::All,
    };
    let report = run_verify(scope);
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Reduce {
            map,
            d1,
            d2,
            rho,
            keep,
            truncation,
            out,
            report,
        } => reduce(
            &map,
            d1,
            d2,
            &rho,
            keep,
            truncation,
            &out,
            report.as_deref(),
        ),
        Command::CaseStudy {
            gamma1,
            gamma2,
            a,
            t_max,
            steps,
            out,
        } => case_study(gamma1, gamma2, a, t_max, steps, &out),
        Command::CaseMap {
            gamma1,
            gamma2,
            t,
            out,
        } => case_map(gamma1, gamma2, t, &out),
        Command::Verify { scope } => verify(scope),
        Command::Choi { map, out } => choi(&map, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Model(m)) => {
            eprintln!("model diagnostic: {m}");
            ExitCode::from(3)
        }
    }
}
