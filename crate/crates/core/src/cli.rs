//! `cakecut` command line.
//!
//! Exit codes: 0 success, 1 unreadable or invalid input, 2 negative verdict
//! (labeling violation, failed verification, no valid ordering), 3 budget
//! exhausted. Every report is JSON on standard output, except for
//! `export-cdf` which writes CSV.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use itertools::Itertools;
use serde_json::{json, Value};

use crate::classes::{self, ClassReport, PermutationSearch, DEFAULT_FALSIFIER_RESOLUTION};
use crate::format::{self, cutset_value, rational_value, scalars, scalars_f64};
use crate::oracle;
use crate::rational::{self, Rational};
use crate::sperner::{self, SolveOptions, SolveReport, SolveStatus};
use crate::two_agent::{self, TwoAgentStatus};
use crate::valuation::{AdditiveInstance, Scalar, Valuations};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Decimal places in `export-cdf` output.
pub const CSV_DIGITS: usize = 12;

#[derive(Parser, Debug)]
#[command(name = "cakecut", version, about = "Connected epsilon-equitable cake division")]
struct Cli {
    /// Worker threads for the parallel searches (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Refinement solver over happiest-agent labelings.
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long, default_value_t = 8)]
        m0: u64,
        #[arg(long, default_value_t = 1024)]
        mmax: u64,
        /// Solve the negated instance (nonpositive orientation).
        #[arg(long)]
        sanp: bool,
    },
    /// Bisection on the cut for two agents.
    Solve2 {
        instance: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        /// Lipschitz bound of v_1 - v_2 in the cut position.
        #[arg(long)]
        lipschitz: Option<f64>,
    },
    /// Family membership, split-cake thresholds and ordering search.
    Classes {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FALSIFIER_RESOLUTION)]
        m: u64,
    },
    /// First agent ordering without a grid violation of the nonnegativity condition.
    Permute {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FALSIFIER_RESOLUTION)]
        m: u64,
    },
    /// Checks a cut-set such as `1/5,2/5,2/5` for equitability.
    Verify {
        instance: PathBuf,
        #[arg(long)]
        cutset: String,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
    },
    /// Exhaustive grid search for the smallest equity gap.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        m: u64,
    },
    /// Cdf knots of every agent as CSV.
    ExportCdf {
        instance: PathBuf,
        /// Output file; standard output when omitted.
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl ToString) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.to_string(),
    }
}

fn load(path: &Path) -> Result<AdditiveInstance, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    format::parse_instance(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, report: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    writeln!(out, "{text}").map_err(|e| input_error(format!("writing output: {e}")))
}

pub fn solve_report_json<S: Scalar>(report: &SolveReport<S>, opts: &SolveOptions, sanp: bool) -> Value {
    let best = report.best.as_ref();
    let violation = match &report.status {
        SolveStatus::LabelingViolation(v) => json!({
            "vertex": cutset_value(&v.vertex),
            "label": v.label.0 + 1,
            "facet": v.facet() + 1,
            "at_corner": v.at_corner,
        }),
        _ => Value::Null,
    };
    let levels: Vec<Value> = report
        .levels
        .iter()
        .map(|l| {
            json!({
                "m": l.m,
                "fully_labeled": l.fully_labeled,
                "barycenter_gap": l.barycenter_gap.as_ref().map(|g| g.to_f64()),
                "best_gap": l.best_gap.as_ref().map(|g| g.to_f64()),
            })
        })
        .collect();
    json!({
        "status": report.status.as_str(),
        "orientation": if sanp { "nonpositive" } else { "nonnegative" },
        "eps": opts.eps,
        "m0": opts.m0,
        "mmax": opts.mmax,
        "best_cutset": best.map(|b| cutset_value(&b.cutset)),
        "best_cutset_f64": best.map(|b| json!(b.cutset.to_f64())),
        "values": best.map(|b| scalars(&b.values)),
        "values_f64": best.map(|b| scalars_f64(&b.values)),
        "gap": best.map(|b| b.gap.render()),
        "gap_f64": best.map(|b| b.gap.to_f64()),
        "candidate": best.map(|b| json!({"source": b.source.as_str(), "resolution": b.resolution})),
        "resolution_reached": report.resolution_reached,
        "fully_labeled_counts": report.fully_labeled_counts(),
        "levels": levels,
        "violation": violation,
    })
}

fn search_json(s: &PermutationSearch) -> Value {
    json!({
        "resolution": s.resolution,
        "found": s.found.as_ref().map(|p| p.to_one_based()),
        "proves_none": s.proves_none(),
        "rejected": s.rejected.iter().map(|w| json!({
            "order": w.order.to_one_based(),
            "cutset": cutset_value(&w.cutset),
            "values": scalars(&w.values),
        })).collect::<Vec<_>>(),
    })
}

pub fn class_report_json(r: &ClassReport) -> Value {
    let profiles: Vec<Value> = r
        .profiles
        .iter()
        .enumerate()
        .map(|(i, p)| match p {
            Ok(p) => json!({
                "agent": i + 1,
                "l": rational_value(&p.l),
                "r": rational_value(&p.r),
                "theta": rational_value(&p.theta),
            }),
            Err(e) => json!({"agent": i + 1, "error": e.to_string()}),
        })
        .collect();
    let thetas: Option<Vec<Value>> = r
        .profiles
        .iter()
        .map(|p| p.as_ref().ok().map(|p| rational_value(&p.theta)))
        .collect();
    json!({
        "value_ordered": r.value_ordered,
        "value_order_witness": r.value_order_witness.as_ref().map(|w| json!({
            "agents": [w.agent + 1, w.agent + 2],
            "t": rational_value(&w.t),
        })),
        "identical": r.identical,
        "split_cake": r.split_cake,
        "single_peaked": r.single_peaked,
        "single_peaked_agents": r.single_peaked_agents,
        "profiles": profiles,
        "theta": thetas,
        "witness": r.witness.as_ref().map(cutset_value),
        "sann_search": search_json(&r.search),
    })
}

/// Cdf knots on the union of all breakpoints: `t,t_exact,F_1,F_1_exact,...`.
pub fn cdf_csv(inst: &AdditiveInstance) -> String {
    let knots: Vec<Rational> = inst
        .densities()
        .iter()
        .flat_map(|d| d.breakpoints().iter().cloned())
        .sorted()
        .dedup()
        .collect();
    let mut csv = String::from("t,t_exact");
    for i in 1..=inst.agents() {
        csv.push_str(&format!(",F_{i},F_{i}_exact"));
    }
    csv.push('\n');
    for t in &knots {
        let mut row = vec![rational::to_decimal(t, CSV_DIGITS), rational::format_rational(t)];
        for d in inst.densities() {
            let f = d.cdf(t).expect("knots lie in [0, 1]");
            row.push(rational::to_decimal(&f, CSV_DIGITS));
            row.push(rational::format_rational(&f));
        }
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    csv
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Solve {
            instance,
            eps,
            m0,
            mmax,
            sanp,
        } => {
            let inst = load(&instance)?;
            let opts = SolveOptions { eps, m0, mmax };
            let report = if sanp {
                sperner::solve_sanp(&inst, &opts)
            } else {
                sperner::solve(&inst, &opts)
            }
            .map_err(input_error)?;
            emit(out, &solve_report_json(&report, &opts, sanp))?;
            Ok(match report.status {
                SolveStatus::Converged => EXIT_OK,
                SolveStatus::LabelingViolation(_) => EXIT_NEGATIVE,
                SolveStatus::BudgetExhausted => EXIT_BUDGET,
            })
        }
        Command::Solve2 {
            instance,
            eps,
            lipschitz,
        } => {
            let inst = load(&instance)?;
            let lipschitz = lipschitz.unwrap_or_else(|| two_agent::default_lipschitz(&inst));
            let r = two_agent::solve_two_with(&inst, eps, lipschitz).map_err(input_error)?;
            let converged = r.status == TwoAgentStatus::Converged;
            emit(
                out,
                &json!({
                    "status": if converged { "converged" } else { "budget-exhausted" },
                    "t": rational_value(&r.t),
                    "t_f64": rational::to_f64(&r.t),
                    "cutset": cutset_value(&r.cutset),
                    "values": scalars(&r.values),
                    "values_f64": scalars_f64(&r.values),
                    "gap": r.gap.render(),
                    "gap_f64": r.gap.to_f64(),
                    "iterations": r.iterations,
                    "iteration_limit": r.iteration_limit,
                }),
            )?;
            Ok(if converged { EXIT_OK } else { EXIT_BUDGET })
        }
        Command::Classes { instance, m } => {
            let inst = load(&instance)?;
            let report = classes::class_report(&inst, m).map_err(input_error)?;
            emit(out, &class_report_json(&report))?;
            Ok(EXIT_OK)
        }
        Command::Permute { instance, m } => {
            let inst = load(&instance)?;
            let search = classes::find_sann_permutation(&inst, m).map_err(input_error)?;
            emit(out, &search_json(&search))?;
            Ok(if search.found.is_some() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Verify {
            instance,
            cutset,
            eps,
        } => {
            let inst = load(&instance)?;
            let x = format::parse_cutset(&cutset).map_err(input_error)?;
            let v = oracle::verify_equitable(&inst, &x, eps).map_err(input_error)?;
            emit(
                out,
                &json!({
                    "pass": v.pass,
                    "eps": eps,
                    "cutset": cutset_value(&x),
                    "values": scalars(&v.values),
                    "gap": v.gap.render(),
                    "gap_f64": v.gap.to_f64(),
                }),
            )?;
            Ok(if v.pass { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Oracle { instance, m } => {
            let inst = load(&instance)?;
            let best = oracle::min_gap_grid(&inst, m).map_err(input_error)?;
            emit(
                out,
                &json!({
                    "m": m,
                    "cutset": cutset_value(&best.cutset),
                    "values": scalars(&best.values),
                    "gap": best.gap.render(),
                    "gap_f64": best.gap.to_f64(),
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::ExportCdf { instance, out: path } => {
            let inst = load(&instance)?;
            let csv = cdf_csv(&inst);
            match path {
                Some(p) => std::fs::write(&p, csv)
                    .map_err(|e| input_error(format!("{}: {e}", p.display())))?,
                None => out
                    .write_all(csv.as_bytes())
                    .map_err(|e| input_error(format!("writing output: {e}")))?,
            }
            Ok(EXIT_OK)
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => {
                // the pool runs the command on one of its own threads
                let mut buffer = Vec::new();
                let result = pool.install(|| execute(cli.command, &mut buffer));
                out.write_all(&buffer)
                    .map_err(|e| input_error(format!("writing output: {e}")))
                    .and(result)
            }
            Err(e) => Err(input_error(format!("thread pool: {e}"))),
        },
        None => execute(cli.command, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::rational::ratio;

    #[test]
    fn csv_has_header_and_exact_columns() {
        let csv = cdf_csv(&catalog::no_sann_ordering());
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,t_exact,F_1,F_1_exact,F_2,F_2_exact,F_3,F_3_exact");
        assert!(csv.contains(
            "0.200000000000,1/5,2.000000000000,2,-1.000000000000,-1,-0.500000000000,-1/2"
        ));
        let constant = AdditiveInstance::new(vec![crate::valuation::PiecewiseConstantDensity::constant(
            ratio(1, 1),
        )])
        .unwrap();
        assert_eq!(
            cdf_csv(&constant),
            "t,t_exact,F_1,F_1_exact\n0.000000000000,0,0.000000000000,0\n1.000000000000,1,1.000000000000,1\n"
        );
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["cakecut", "solve"], &mut out, &mut err), EXIT_INPUT);
        assert!(!err.is_empty());
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["cakecut", "--help"], &mut out, &mut err), EXIT_OK);
        assert!(String::from_utf8(out).unwrap().contains("export-cdf"));
    }
}
