//! `qde` — command-line front end for the quaternion linear-QDE engine.
//!
//! Verbs: `exp`, `solve`, `fund`, `eig`, `wronskian`, `liouville`, `preset`.
//! Exit codes: 0 success, 2 input/parse errors, 3 numerical failures (the
//! structured error name is printed to stderr). All numeric output is
//! formatted with 17 significant digits so identical invocations produce
//! byte-identical artifacts.

mod presets;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qde::engine::{
    fundamental_auto, fundamental_constant, fundamental_eigen, fundamental_numeric,
    fundamental_split, right_eigenpairs, solve_ivp, FundamentalMatrix, Ivp, LinearQde,
};
use qde::io::{
    self, fmt_f64, format_matrix_fixed, format_quat_fixed, parse_matrix_inline,
    parse_vector_inline, MatrixJson, MethodChoice, Scenario,
};
use qde::matrix::{ddet, QMat, QVec};
use qde::tol;
use qde::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qde",
    version,
    about = "Quaternion linear differential equation engine",
    after_help = "Inline matrices use comma-separated quaternion literals with \
                  semicolon-separated rows, e.g. \"k,1;0,k\". Set QDE_LOG=debug \
                  for diagnostics."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the matrix exponential exp(A t).
    Exp {
        /// Inline matrix, e.g. "k,1;0,k".
        #[arg(long)]
        matrix: String,
        /// Evaluation time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// expm (adjoint), series (oracle) or split (closed form).
        #[arg(long, default_value = "expm")]
        method: String,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate an initial value problem and emit the trajectory.
    Solve {
        #[arg(long)]
        matrix: Option<String>,
        /// Initial value, comma-separated literals, e.g. "1,i".
        #[arg(long)]
        x0: Option<String>,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long)]
        t1: Option<f64>,
        /// Integration steps (default: 10000 per unit time).
        #[arg(long)]
        steps: Option<usize>,
        /// auto | numeric | expm | split | eigen.
        #[arg(long, default_value = "auto")]
        method: String,
        /// Scenario JSON file(s); may repeat for batch runs.
        #[arg(long = "scenario")]
        scenarios: Vec<PathBuf>,
        /// Worker threads for batch scenario runs.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
    },
    /// Construct a fundamental matrix and evaluate it.
    Fund {
        #[arg(long)]
        matrix: String,
        /// Evaluation time.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Anchor time for the certificate.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value = "auto")]
        method: String,
        #[arg(long)]
        steps: Option<usize>,
        /// Also residual-check M' = A M over the span.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standardized right eigenpairs A q = q lambda.
    Eig {
        #[arg(long)]
        matrix: String,
        #[arg(long, value_enum, default_value_t = OutFormat::Csv)]
        format: OutFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the Wronskian ddet M(t) of a fundamental matrix.
    Wronskian {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the Wronskian against the Liouville formula.
    Liouville {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long)]
        steps: Option<usize>,
        /// Fail (exit 3) when max_rel_err exceeds 1e-6.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named example preset.
    Preset {
        /// example1 | example2 | example3 | counterexample | frenet-helix |
        /// attitude-spin.
        name: String,
        /// Evaluation time override (preset-specific default otherwise).
        #[arg(long)]
        t: Option<f64>,
        /// Self-verify residuals; any breach exits 3.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QDE_LOG", "error")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err);
            if err.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Exp {
            matrix,
            t,
            method,
            format,
            out,
        } => cmd_exp(&matrix, t, &method, format, out.as_deref()),
        Command::Solve {
            matrix,
            x0,
            t0,
            t1,
            steps,
            method,
            scenarios,
            jobs,
            out,
            format,
        } => {
            if scenarios.is_empty() {
                cmd_solve_inline(
                    matrix.as_deref(),
                    x0.as_deref(),
                    t0,
                    t1,
                    steps,
                    &method,
                    format,
                    out.as_deref(),
                )
            } else {
                cmd_solve_scenarios(&scenarios, jobs, out.as_deref(), format)
            }
        }
        Command::Fund {
            matrix,
            t,
            t0,
            method,
            steps,
            verify,
            format,
            out,
        } => cmd_fund(
            &matrix,
            t,
            t0,
            &method,
            steps,
            verify,
            format,
            out.as_deref(),
        ),
        Command::Eig {
            matrix,
            format,
            out,
        } => cmd_eig(&matrix, format, out.as_deref()),
        Command::Wronskian {
            matrix,
            scenario,
            t0,
            t1,
            samples,
            steps,
            out,
        } => cmd_wronskian(
            matrix.as_deref(),
            scenario.as_deref(),
            t0,
            t1,
            samples,
            steps,
            out.as_deref(),
        ),
        Command::Liouville {
            matrix,
            scenario,
            t0,
            t1,
            samples,
            steps,
            verify,
            out,
        } => cmd_liouville(
            matrix.as_deref(),
            scenario.as_deref(),
            t0,
            t1,
            samples,
            steps,
            verify,
            out.as_deref(),
        ),
        Command::Preset {
            name,
            t,
            verify,
            out,
        } => presets::run(&name, t, verify, out.as_deref()),
    }
}

/// Writes `content` to the output file, or stdout when none is given.
/// Content is fully materialized before any byte is written, so failed runs
/// leave no partial artifacts.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(Error::from),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

fn matrix_output(m: &QMat, format: OutFormat) -> String {
    match format {
        OutFormat::Csv => format_matrix_fixed(m),
        OutFormat::Json => {
            let mut s = serde_json::to_string_pretty(&MatrixJson::from_mat(m))
                .expect("matrix serialization");
            s.push('\n');
            s
        }
    }
}

fn default_steps(span: f64) -> usize {
    ((span.abs() * tol::DEFAULT_STEPS_PER_UNIT as f64).ceil() as usize).max(1)
}

fn cmd_exp(
    matrix: &str,
    t: f64,
    method: &str,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<()> {
    let a = parse_matrix_inline(matrix)?;
    let result = match method {
        "expm" | "auto" => qde::matrix::expm(&a, t)?,
        "series" => qde::matrix::expm_series(&a, t)?,
        "split" => match fundamental_split(&a)? {
            Some(fm) => fm.eval(t),
            None => return Err(split_rejection(&a)),
        },
        other => {
            return Err(Error::Parse {
                offset: 0,
                msg: format!("unknown exp method {:?} (expm|series|split)", other),
            })
        }
    };
    emit(out, &matrix_output(&result, format))
}

/// Diagnoses why the commuting split is unusable for `a`: the closed form
/// needs the diagonal and off-diagonal parts to commute.
fn split_rejection(a: &QMat) -> Error {
    let n = a.rows();
    let d = QMat::diag(&(0..n).map(|i| a[(i, i)]).collect::<Vec<_>>());
    let nil = a.sub(&d).expect("same shape");
    let comm = d
        .matmul(&nil)
        .and_then(|dn| dn.sub(&nil.matmul(&d).expect("square")))
        .map(|c| c.norm())
        .unwrap_or(f64::INFINITY);
    Error::ConditionViolated {
        index: 0,
        t: 0.0,
        commutator: comm,
    }
}

fn build_fundamental(
    a: &QMat,
    method: MethodChoice,
    qde_sys: &LinearQde,
    t0: f64,
    steps: Option<usize>,
) -> Result<FundamentalMatrix> {
    let (lo, hi) = qde_sys.interval();
    log::debug!(
        "building fundamental matrix: method {:?}, interval [{}, {}]",
        method,
        lo,
        hi
    );
    match method {
        MethodChoice::Auto => fundamental_auto(a),
        MethodChoice::Expm => fundamental_constant(a),
        MethodChoice::Eigen => fundamental_eigen(a),
        MethodChoice::Split => match fundamental_split(a)? {
            Some(fm) => Ok(fm),
            None => Err(split_rejection(a)),
        },
        MethodChoice::Numeric => {
            let steps = steps.unwrap_or_else(|| default_steps(hi - lo));
            fundamental_numeric(qde_sys, t0, steps)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_fund(
    matrix: &str,
    t: f64,
    t0: f64,
    method: &str,
    steps: Option<usize>,
    verify: bool,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<()> {
    let a = parse_matrix_inline(matrix)?;
    let method: MethodChoice = method.parse()?;
    let lo = t0.min(t);
    let hi = t0.max(t);
    let interval = if lo < hi { (lo, hi) } else { (lo, lo + 1.0) };
    let sys = LinearQde::constant(a.clone(), interval, "fund")?;
    let fm = build_fundamental(&a, method, &sys, t0, steps)?;
    log::info!(
        "fund: selected method {} (certificate {:e})",
        fm.method(),
        fm.certificate()
    );
    let m_t = fm.eval(t);

    let residual = if verify {
        Some(fm.residual_max(&sys, tol::SAMPLE_COUNT))
    } else {
        None
    };
    let content = match format {
        OutFormat::Csv => {
            let mut s = format!(
                "# method: {}\n# t: {}\n# certificate: {}\n",
                fm.method(),
                fmt_f64(t),
                fmt_f64(fm.certificate())
            );
            if let Some(r) = residual {
                s.push_str(&format!("# residual_max: {}\n", fmt_f64(r)));
            }
            s.push_str(&format_matrix_fixed(&m_t));
            s
        }
        OutFormat::Json => {
            let value = serde_json::json!({
                "method": fm.method().to_string(),
                "t": t,
                "certificate": fm.certificate(),
                "residual_max": residual,
                "matrix": MatrixJson::from_mat(&m_t),
            });
            let mut s = serde_json::to_string_pretty(&value).expect("json");
            s.push('\n');
            s
        }
    };
    if let Some(r) = residual {
        if r > tol::FUNDAMENTAL_RESIDUAL {
            return Err(Error::ResidualTooLarge {
                residual: r,
                limit: tol::FUNDAMENTAL_RESIDUAL,
            });
        }
    }
    emit(out, &content)
}

fn cmd_eig(matrix: &str, format: OutFormat, out: Option<&Path>) -> Result<()> {
    let a = parse_matrix_inline(matrix)?;
    let pairs = right_eigenpairs(&a)?;
    let content = match format {
        OutFormat::Csv => {
            let mut s = String::from("lambda,vector,residual\n");
            for p in &pairs {
                let vec_lits: Vec<String> =
                    p.vector.entries().iter().map(format_quat_fixed).collect();
                s.push_str(&format!(
                    "{},\"{}\",{}\n",
                    format_quat_fixed(&p.lambda),
                    vec_lits.join(";"),
                    fmt_f64(p.residual)
                ));
            }
            s
        }
        OutFormat::Json => {
            let items: Vec<serde_json::Value> = pairs
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "lambda": p.lambda.components(),
                        "vector": p.vector.entries().iter()
                            .map(|q| q.components()).collect::<Vec<_>>(),
                        "residual": p.residual,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&items).expect("json");
            s.push('\n');
            s
        }
    };
    emit(out, &content)
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve_inline(
    matrix: Option<&str>,
    x0: Option<&str>,
    t0: Option<f64>,
    t1: Option<f64>,
    steps: Option<usize>,
    method: &str,
    format: OutFormat,
    out: Option<&Path>,
) -> Result<()> {
    let missing = |what: &str| Error::Parse {
        offset: 0,
        msg: format!("--{} is required without --scenario", what),
    };
    let matrix = matrix.ok_or_else(|| missing("matrix"))?;
    let x0 = parse_vector_inline(x0.ok_or_else(|| missing("x0"))?)?;
    let t0 = t0.ok_or_else(|| missing("t0"))?;
    let t1 = t1.ok_or_else(|| missing("t1"))?;
    let a = parse_matrix_inline(matrix)?;
    let method: MethodChoice = method.parse()?;
    let lo = t0.min(t1);
    let hi = t0.max(t1);
    let interval = if lo < hi { (lo, hi) } else { (lo, lo + 1.0) };
    let sys = LinearQde::constant(a.clone(), interval, "solve")?;
    let content = solve_to_output(&sys, Some(&a), method, t0, x0, t1, steps, format)?;
    emit(out, &content)
}

/// Runs one solve and renders the sampled trajectory.
#[allow(clippy::too_many_arguments)]
fn solve_to_output(
    sys: &LinearQde,
    constant: Option<&QMat>,
    method: MethodChoice,
    t0: f64,
    x0: QVec,
    t_end: f64,
    steps: Option<usize>,
    format: OutFormat,
) -> Result<String> {
    let steps = steps.unwrap_or_else(|| default_steps(t_end - t0));
    let (ts, xs): (Vec<f64>, Vec<QVec>) = match (method, constant) {
        (MethodChoice::Numeric, _) | (MethodChoice::Auto, None) => {
            let traj = solve_ivp(&Ivp::new(sys.clone(), t0, x0)?, t_end, steps)?;
            let (ts, xs) = traj.nodes();
            (ts.to_vec(), xs.to_vec())
        }
        (_, None) => {
            return Err(Error::Parse {
                offset: 0,
                msg: "closed-form methods need a constant matrix".into(),
            })
        }
        (choice, Some(a)) => {
            let fm = build_fundamental(a, choice, sys, t0, Some(steps))?;
            let h = (t_end - t0) / steps as f64;
            let mut ts = Vec::with_capacity(steps + 1);
            let mut xs = Vec::with_capacity(steps + 1);
            for k in 0..=steps {
                let t = t0 + k as f64 * h;
                ts.push(t);
                xs.push(fm.propagate(&x0, t)?);
            }
            (ts, xs)
        }
    };
    Ok(match format {
        OutFormat::Csv => io::trajectory_csv(&ts, &xs),
        OutFormat::Json => {
            let value = serde_json::json!({
                "t": ts,
                "x": xs.iter()
                    .map(|v| v.entries().iter().map(|q| q.components()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            let mut s = serde_json::to_string_pretty(&value).expect("json");
            s.push('\n');
            s
        }
    })
}

fn solve_one_scenario(path: &Path, format: OutFormat) -> Result<String> {
    log::info!("running scenario {}", path.display());
    let text = std::fs::read_to_string(path)?;
    let sc = Scenario::from_json(&text)?;
    let sys = sc.system()?;
    let x0 = sc.initial_value()?;
    let method = sc.method_choice()?;
    let constant = sc.constant_matrix()?;
    solve_to_output(
        &sys,
        constant.as_ref(),
        method,
        sc.t0,
        x0,
        sc.t_end,
        sc.steps,
        format,
    )
}

fn scenario_output_path(input: &Path) -> PathBuf {
    if input.extension().is_some_and(|e| e == "csv") {
        input.with_extension("out.csv")
    } else {
        input.with_extension("csv")
    }
}

fn cmd_solve_scenarios(
    scenarios: &[PathBuf],
    jobs: usize,
    out: Option<&Path>,
    format: OutFormat,
) -> Result<()> {
    if scenarios.len() == 1 {
        let content = solve_one_scenario(&scenarios[0], format)?;
        return emit(out, &content);
    }
    if out.is_some() {
        return Err(Error::Parse {
            offset: 0,
            msg: "--out applies to a single scenario; batch runs write next to each input"
                .into(),
        });
    }
    let jobs = jobs.clamp(1, scenarios.len());
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<Result<String>>>> = scenarios
        .iter()
        .map(|_| std::sync::Mutex::new(None))
        .collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if idx >= scenarios.len() {
                    break;
                }
                let res = solve_one_scenario(&scenarios[idx], format);
                *slots[idx].lock().unwrap() = Some(res);
            });
        }
    });

    // Report in input order so batch output is deterministic.
    for (idx, slot) in slots.into_iter().enumerate() {
        let res = slot.into_inner().unwrap().expect("worker filled slot");
        let content = res?;
        let path = scenario_output_path(&scenarios[idx]);
        std::fs::write(&path, content)?;
        println!("{} -> {}", scenarios[idx].display(), path.display());
    }
    Ok(())
}

fn system_from_inputs(
    matrix: Option<&str>,
    scenario: Option<&Path>,
    t0: f64,
    t1: f64,
) -> Result<(LinearQde, f64, f64)> {
    match (matrix, scenario) {
        (Some(m), None) => {
            let a = parse_matrix_inline(m)?;
            let lo = t0.min(t1);
            let hi = t0.max(t1);
            let interval = if lo < hi { (lo, hi) } else { (lo, lo + 1.0) };
            let sys = LinearQde::constant(a, interval, "cli")?;
            Ok((sys, t0, t1))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let sc = Scenario::from_json(&text)?;
            let sys = sc.system()?;
            Ok((sys, sc.t0, sc.t_end))
        }
        _ => Err(Error::Parse {
            offset: 0,
            msg: "exactly one of --matrix or --scenario is required".into(),
        }),
    }
}

fn cmd_wronskian(
    matrix: Option<&str>,
    scenario: Option<&Path>,
    t0: f64,
    t1: f64,
    samples: usize,
    steps: Option<usize>,
    out: Option<&Path>,
) -> Result<()> {
    let (sys, t0, t1) = system_from_inputs(matrix, scenario, t0, t1)?;
    let steps = steps.unwrap_or_else(|| default_steps(t1 - t0));
    let fm = fundamental_numeric(&sys, t0, steps)?;
    let mut content = String::from("t,w\n");
    let n = samples.max(1);
    for k in 0..=n {
        let t = t0 + (t1 - t0) * k as f64 / n as f64;
        let w = ddet(&fm.eval(t))?;
        content.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(w)));
    }
    emit(out, &content)
}

#[allow(clippy::too_many_arguments)]
fn cmd_liouville(
    matrix: Option<&str>,
    scenario: Option<&Path>,
    t0: f64,
    t1: f64,
    samples: usize,
    steps: Option<usize>,
    verify: bool,
    out: Option<&Path>,
) -> Result<()> {
    let (sys, t0, t1) = system_from_inputs(matrix, scenario, t0, t1)?;
    let steps = steps.unwrap_or_else(|| default_steps(t1 - t0));
    let fm = fundamental_numeric(&sys, t0, steps)?;
    let n = samples.max(1);
    let ts: Vec<f64> = (0..=n)
        .map(|k| t0 + (t1 - t0) * k as f64 / n as f64)
        .collect();
    let report = qde::analysis::liouville_check(&sys, &fm, t0, &ts)?;
    let mut content = report.to_csv();
    content.push_str(&format!(
        "# max_rel_err: {}\n",
        fmt_f64(report.max_rel_err)
    ));
    if verify && report.max_rel_err > 1e-6 {
        return Err(Error::ResidualTooLarge {
            residual: report.max_rel_err,
            limit: 1e-6,
        });
    }
    emit(out, &content)
}
