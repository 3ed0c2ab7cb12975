use std::path::PathBuf;
use std::sync::atomic::AtomicBool;

use clap::{Args, Parser, Subcommand};
use projtomo::dykstra::DykstraConfig;
use projtomo::experiments::{
    gen_noisy_choi, gen_noisy_povm, gen_noisy_povm_shared, instance_seed, project_choi,
    project_povm, run_experiment_cancellable, summarize, ExperimentConfig, Method, Task, MAX_QDT_QUBITS,
    MAX_QPT_QUBITS, ORACLE_MAX_QDT_QUBITS, ORACLE_MAX_QPT_QUBITS,
};
use projtomo::matcore::{frobenius_dist, frobenius_dist_list, Rng};
use projtomo::projections::{completeness_residual, proj_cp1, psd_violation, tp_residual};
use serde_json::json;

use crate::error::CliError;
use crate::formats::Document;
use crate::tables::{write_file, write_results, write_summary};

#[derive(Debug, Parser)]
#[command(name = "projtomo", version, about = "Project tomography estimates onto valid channels and POVMs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project a single Choi matrix, Hermitian matrix or POVM file.
    Project(ProjectArgs),
    /// Run a seeded benchmark sweep and write per-instance results.
    Benchmark(BenchmarkArgs),
    /// Write one seeded noisy benchmark instance.
    Generate(GenerateArgs),
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: projtomo::Error| e.to_string())
}

fn parse_task(s: &str) -> Result<Task, String> {
    s.parse().map_err(|e: projtomo::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// cba, tss, dykstra-cba, dykstra-id or oracle.
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[arg(long, default_value_t = 1e-7)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print feasibility diagnostics as JSON on stderr.
    #[arg(long)]
    pub diagnostics: bool,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long, value_parser = parse_task)]
    pub task: Task,
    #[arg(long, value_delimiter = ',', required = true)]
    pub qubits: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1")]
    pub noise: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "cba,dykstra-cba")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 1e-7)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fill dist_to_oracle using the reference solver.
    #[arg(long)]
    pub with_oracle: bool,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Share one noise matrix across POVM elements.
    #[arg(long)]
    pub shared_noise: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = parse_task)]
    pub task: Task,
    #[arg(long)]
    pub qubits: usize,
    #[arg(long)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the noiseless reference object.
    #[arg(long)]
    pub also_clean: Option<PathBuf>,
    /// Share one noise matrix across POVM elements.
    #[arg(long)]
    pub shared_noise: bool,
}

pub fn cmd_project(args: &ProjectArgs) -> Result<(), CliError> {
    let input = Document::load(&args.input)?;
    let cfg = DykstraConfig { epsilon: args.epsilon, max_iters: args.max_iters, ..DykstraConfig::default() };
    cfg.validate()?;
    let method = args.method;
    let incompatible = |why: &str| CliError::Incompatible(format!("method {method} cannot project {why}"));

    let (output, iterations, converged) = match &input {
        Document::Choi(c) => {
            if method == Method::Oracle && c.sys_dim() > 1 << ORACLE_MAX_QPT_QUBITS {
                return Err(incompatible("channels larger than two qubits"));
            }
            let run = project_choi(method, c, &cfg)?;
            (Document::Choi(run.output), run.iterations, run.converged)
        }
        Document::Hermitian(h) => match method {
            Method::Cba | Method::Oracle => (Document::Hermitian(proj_cp1(h)?), None, None),
            _ => return Err(incompatible("a bare hermitian matrix")),
        },
        Document::Povm(p) => {
            if !method.supports(Task::Qdt) {
                return Err(incompatible("a povm"));
            }
            if method == Method::Oracle && p.dim() > 1 << ORACLE_MAX_QDT_QUBITS {
                return Err(incompatible("povms larger than four qubits"));
            }
            let run = project_povm(method, p, &cfg)?;
            (Document::Povm(run.output), run.iterations, run.converged)
        }
    };

    let mut report = json!({
        "kind": output.kind(),
        "method": method.as_str(),
        "iterations": iterations,
        "converged": converged,
    });
    let fields = report.as_object_mut().expect("object literal");
    let mut worst_psd = 0.0_f64;
    let (linear, dist) = match (&output, &input) {
        (Document::Choi(o), Document::Choi(i)) => {
            worst_psd = psd_violation(o.matrix())?;
            fields.insert("tp_residual".into(), json!(tp_residual(o)));
            (tp_residual(o), frobenius_dist(o.matrix().as_ref(), i.matrix().as_ref())?)
        }
        (Document::Hermitian(o), Document::Hermitian(i)) => {
            worst_psd = psd_violation(o)?;
            let trace_error = (o.trace() - 1.0).abs();
            fields.insert("trace_residual".into(), json!(trace_error));
            (trace_error, frobenius_dist(o.as_ref(), i.as_ref())?)
        }
        (Document::Povm(o), Document::Povm(i)) => {
            for e in o.elements() {
                worst_psd = worst_psd.max(psd_violation(e)?);
            }
            fields.insert("completeness_residual".into(), json!(completeness_residual(o)));
            (completeness_residual(o), frobenius_dist_list(o.elements(), i.elements())?)
        }
        _ => unreachable!("output kind follows input kind"),
    };
    if !(linear.is_finite() && dist.is_finite()) {
        return Err(CliError::Numerical(projtomo::Error::NonFinite));
    }
    fields.insert("psd_violation".into(), json!(worst_psd));
    fields.insert("feasibility_residual".into(), json!(linear.max(worst_psd)));
    fields.insert("dist_to_input".into(), json!(dist));

    output.store(args.output.as_deref())?;
    if args.diagnostics {
        eprintln!("{report}");
    }
    Ok(())
}

pub fn benchmark_config(args: &BenchmarkArgs) -> ExperimentConfig {
    ExperimentConfig {
        task: args.task,
        sizes: args.qubits.clone(),
        noise_levels: args.noise.clone(),
        samples: args.samples,
        methods: args.methods.clone(),
        dykstra: DykstraConfig { epsilon: args.epsilon, max_iters: args.max_iters, ..DykstraConfig::default() },
        seed: args.seed,
        with_oracle: args.with_oracle,
        jobs: args.jobs,
        shared_povm_noise: args.shared_noise,
    }
}

/// Runs the sweep. If `cancel` is raised mid-run, the finished instances
/// are written followed by a truncation marker and
/// [`CliError::Interrupted`] is returned.
pub fn cmd_benchmark(args: &BenchmarkArgs, cancel: &AtomicBool) -> Result<(), CliError> {
    let cfg = benchmark_config(args);
    cfg.validate()?;
    let outcome = run_experiment_cancellable(&cfg, cancel)?;
    write_file(&args.out, |buf| write_results(buf, &outcome.records, outcome.truncated))?;
    if let Some(path) = &args.summary {
        let rows = summarize(&outcome.records);
        write_file(path, |buf| write_summary(buf, &rows))?;
    }
    if outcome.truncated {
        return Err(CliError::Interrupted);
    }
    Ok(())
}

/// Writes the instance the benchmark would use as sample 0 for the same
/// seed, task, size and noise level.
pub fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let max = match args.task {
        Task::Qpt => MAX_QPT_QUBITS,
        Task::Qdt => MAX_QDT_QUBITS,
    };
    if args.qubits == 0 || args.qubits > max {
        return Err(CliError::Usage(format!("{} size must be 1..={max} qubits, got {}", args.task, args.qubits)));
    }
    if !(0.0..=1.0).contains(&args.noise) {
        return Err(CliError::Usage(format!("noise must lie in [0, 1], got {}", args.noise)));
    }
    let mut rng = Rng::new(instance_seed(args.seed, args.task, args.qubits, args.noise, 0));
    let (noisy, clean) = match args.task {
        Task::Qpt => {
            let (n, c) = gen_noisy_choi(args.qubits, args.noise, &mut rng);
            (Document::Choi(n), Document::Choi(c))
        }
        Task::Qdt => {
            let (n, c) = if args.shared_noise {
                gen_noisy_povm_shared(args.qubits, args.noise, &mut rng)
            } else {
                gen_noisy_povm(args.qubits, args.noise, &mut rng)
            };
            (Document::Povm(n), Document::Povm(c))
        }
    };
    noisy.store(Some(&args.out))?;
    if let Some(path) = &args.also_clean {
        clean.store(Some(path))?;
    }
    Ok(())
}
