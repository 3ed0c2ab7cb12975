//! Benchmark inputs, sweeps and summary statistics.
//!
//! Channel inputs are `J̃ = (1−p)·J + p·N` with `J` the Choi matrix of a
//! Haar-random unitary and `N` normalized Hermitian Ginibre noise. Detector
//! inputs perturb each element of a random Pauli POVM the same way.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::time::Instant;

use rayon::prelude::*;

use crate::cba::{cba_qdt, cba_qpt, restore_tp, CbaDiagnostics};
use crate::dykstra::{dykstra_cba_qdt, dykstra_cba_qpt, dykstra_id_qpt, DykstraConfig};
use crate::error::{Error, Result};
use crate::matcore::{
    choi_of_unitary, fingerprint, frobenius_dist, frobenius_dist_list, mix_seed, pauli_povm,
    random_haar_unitary, random_hermitian_noise, ChoiCandidate, HermitianMatrix, PovmCandidate, Rng,
};
use crate::oracle::{oracle_qdt, oracle_qpt};
use crate::projections::{choi_violation, povm_violation, proj_psd};

/// Largest channel size (qubits) the oracle accepts.
pub const ORACLE_MAX_QPT_QUBITS: usize = 2;
/// Largest detector size (qubits) the oracle accepts.
pub const ORACLE_MAX_QDT_QUBITS: usize = 4;
pub const MAX_QPT_QUBITS: usize = 4;
pub const MAX_QDT_QUBITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Task {
    Qpt,
    Qdt,
}

impl Task {
    pub fn as_str(self) -> &'static str {
        match self {
            Task::Qpt => "qpt",
            Task::Qdt => "qdt",
        }
    }

    fn seed_key(self) -> u64 {
        match self {
            Task::Qpt => 1,
            Task::Qdt => 2,
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qpt" => Ok(Task::Qpt),
            "qdt" => Ok(Task::Qdt),
            _ => Err(Error::InvalidConfig(format!("unknown task `{s}`"))),
        }
    }
}

/// Projection methods, in output order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cba,
    Tss,
    DykstraCba,
    DykstraId,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Cba, Method::Tss, Method::DykstraCba, Method::DykstraId, Method::Oracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Cba => "cba",
            Method::Tss => "tss",
            Method::DykstraCba => "dykstra-cba",
            Method::DykstraId => "dykstra-id",
            Method::Oracle => "oracle",
        }
    }

    pub fn supports(self, task: Task) -> bool {
        !(task == Task::Qdt && matches!(self, Method::Tss | Method::DykstraId))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-");
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == norm)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

pub fn oracle_supported(task: Task, qubits: usize) -> bool {
    match task {
        Task::Qpt => qubits <= ORACLE_MAX_QPT_QUBITS,
        Task::Qdt => qubits <= ORACLE_MAX_QDT_QUBITS,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub sizes: Vec<usize>,
    pub noise_levels: Vec<f64>,
    pub samples: usize,
    pub methods: Vec<Method>,
    pub dykstra: DykstraConfig,
    pub seed: u64,
    /// Compute the reference projection for every instance and fill
    /// `dist_to_oracle`. Implied when [`Method::Oracle`] is listed.
    pub with_oracle: bool,
    /// Worker threads for the sweep.
    pub jobs: usize,
    /// Reuse one noise matrix for every POVM element instead of fresh draws.
    pub shared_povm_noise: bool,
}

impl ExperimentConfig {
    pub fn new(task: Task, sizes: Vec<usize>, methods: Vec<Method>) -> Self {
        Self {
            task,
            sizes,
            noise_levels: vec![0.001, 0.01, 0.1],
            samples: 100,
            methods,
            dykstra: DykstraConfig::default(),
            seed: 0,
            with_oracle: false,
            jobs: 1,
            shared_povm_noise: false,
        }
    }

    pub fn needs_oracle(&self) -> bool {
        self.with_oracle || self.methods.contains(&Method::Oracle)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.sizes.is_empty() {
            return bad("no sizes given".into());
        }
        let max = match self.task {
            Task::Qpt => MAX_QPT_QUBITS,
            Task::Qdt => MAX_QDT_QUBITS,
        };
        if let Some(&q) = self.sizes.iter().find(|&&q| q == 0 || q > max) {
            return bad(format!("{} size must be 1..={max} qubits, got {q}", self.task));
        }
        if self.noise_levels.is_empty() {
            return bad("no noise levels given".into());
        }
        if let Some(p) = self.noise_levels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return bad(format!("noise level must lie in [0, 1], got {p}"));
        }
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("no methods given".into());
        }
        if let Some(m) = self.methods.iter().find(|m| !m.supports(self.task)) {
            return bad(format!("method {m} is not available for {}", self.task));
        }
        if self.needs_oracle() {
            if let Some(q) = self.sizes.iter().find(|&&q| !oracle_supported(self.task, q)) {
                return bad(format!("oracle is not supported for {} at {q} qubits", self.task));
            }
        }
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        self.dykstra.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRecord {
    pub task: Task,
    pub method: Method,
    pub qubits: usize,
    pub noise_p: f64,
    pub sample: usize,
    /// Seed of the instance generator; identical for every method on the
    /// same instance.
    pub seed: u64,
    pub dist_to_oracle: Option<f64>,
    pub dist_to_input: f64,
    /// `f64::INFINITY` marks a failed method call.
    pub feasibility_residual: f64,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub wall_time_ns: u64,
    pub input_fingerprint: u64,
}

impl ExperimentRecord {
    pub fn failed(&self) -> bool {
        self.feasibility_residual.is_infinite()
    }

    fn sort_key(&self) -> (Task, usize, f64, usize, Method) {
        (self.task, self.qubits, self.noise_p, self.sample, self.method)
    }
}

fn compare_records(a: &ExperimentRecord, b: &ExperimentRecord) -> Ordering {
    let (ka, kb) = (a.sort_key(), b.sort_key());
    ka.0.cmp(&kb.0)
        .then(ka.1.cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
        .then(ka.3.cmp(&kb.3))
        .then(ka.4.cmp(&kb.4))
}

/// Noisy channel `(1−p)·J + p·N` and the clean Choi matrix `J`.
pub fn gen_noisy_choi(qubits: usize, p: f64, rng: &mut Rng) -> (ChoiCandidate, ChoiCandidate) {
    let d = 1usize << qubits;
    let clean = choi_of_unitary(random_haar_unitary(d, rng).as_ref()).expect("Haar sample is unitary");
    let noise = random_hermitian_noise(d * d, rng);
    let noisy = clean.with_matrix(HermitianMatrix::linear_combination(&[(1.0 - p, clean.matrix()), (p, &noise)]));
    (noisy, clean)
}

/// Noisy Pauli POVM with an independent noise draw per element.
pub fn gen_noisy_povm(m_qubits: usize, p: f64, rng: &mut Rng) -> (PovmCandidate, PovmCandidate) {
    noisy_povm(m_qubits, p, rng, false)
}

/// Noisy Pauli POVM with one noise matrix shared by every element.
pub fn gen_noisy_povm_shared(m_qubits: usize, p: f64, rng: &mut Rng) -> (PovmCandidate, PovmCandidate) {
    noisy_povm(m_qubits, p, rng, true)
}

fn noisy_povm(m_qubits: usize, p: f64, rng: &mut Rng, shared: bool) -> (PovmCandidate, PovmCandidate) {
    let clean = pauli_povm(m_qubits, rng);
    let d = clean.dim();
    let shared_noise = shared.then(|| random_hermitian_noise(d, rng));
    let elements = clean
        .elements()
        .iter()
        .map(|e| {
            let noise = match &shared_noise {
                Some(n) => n.clone(),
                None => random_hermitian_noise(d, rng),
            };
            HermitianMatrix::linear_combination(&[(1.0 - p, e), (p, &noise)])
        })
        .collect();
    (PovmCandidate::from_elements_unchecked(elements), clean)
}

/// Two-step baseline: clip negative eigenvalues, then restore TP with the
/// congruence correction.
pub fn tss_qpt(f: &ChoiCandidate) -> Result<(ChoiCandidate, CbaDiagnostics)> {
    let x = f.with_matrix(proj_psd(f.matrix())?);
    restore_tp(&x)
}

/// Output of one method call.
#[derive(Clone, Debug)]
pub struct MethodRun<T> {
    pub output: T,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
}

impl<T> MethodRun<T> {
    fn one_shot(output: T) -> Self {
        Self { output, iterations: None, converged: None }
    }
}

/// Runs `method` on a channel candidate. The oracle ignores `cfg` and uses
/// its own tight settings; `converged` then reports solver agreement.
pub fn project_choi(method: Method, f: &ChoiCandidate, cfg: &DykstraConfig) -> Result<MethodRun<ChoiCandidate>> {
    Ok(match method {
        Method::Cba => MethodRun::one_shot(cba_qpt(f)?.0),
        Method::Tss => MethodRun::one_shot(tss_qpt(f)?.0),
        Method::DykstraCba => {
            let (out, trace, _) = dykstra_cba_qpt(f, cfg)?;
            MethodRun { output: out, iterations: Some(trace.iterations), converged: Some(trace.converged) }
        }
        Method::DykstraId => {
            let (out, trace) = dykstra_id_qpt(f, cfg)?;
            MethodRun { output: out, iterations: Some(trace.iterations), converged: Some(trace.converged) }
        }
        Method::Oracle => {
            let r = oracle_qpt(f)?;
            MethodRun { output: r.solution, iterations: Some(r.dykstra_trace.iterations), converged: Some(r.reliable) }
        }
    })
}

/// Runs `method` on a detector candidate. `tss` and `dykstra-id` are
/// channel-only and return [`Error::InvalidConfig`].
pub fn project_povm(method: Method, fs: &PovmCandidate, cfg: &DykstraConfig) -> Result<MethodRun<PovmCandidate>> {
    Ok(match method {
        Method::Cba => MethodRun::one_shot(cba_qdt(fs)?.0),
        Method::DykstraCba => {
            let (out, trace, _) = dykstra_cba_qdt(fs, cfg)?;
            MethodRun { output: out, iterations: Some(trace.iterations), converged: Some(trace.converged) }
        }
        Method::Oracle => {
            let r = oracle_qdt(fs)?;
            MethodRun { output: r.solution, iterations: Some(r.dykstra_trace.iterations), converged: Some(r.reliable) }
        }
        Method::Tss | Method::DykstraId => {
            return Err(Error::InvalidConfig(format!("method {method} is not available for qdt")))
        }
    })
}

/// Seed of the instance at `(task, qubits, p, sample)`.
pub fn instance_seed(base: u64, task: Task, qubits: usize, p: f64, sample: usize) -> u64 {
    let s = mix_seed(base, task.seed_key());
    let s = mix_seed(s, qubits as u64);
    let s = mix_seed(s, p.to_bits());
    mix_seed(s, sample as u64)
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutcome {
    pub records: Vec<ExperimentRecord>,
    /// The sweep was cancelled before every instance ran.
    pub truncated: bool,
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>> {
    run_experiment_cancellable(cfg, &AtomicBool::new(false)).map(|o| o.records)
}

/// Runs the sweep, skipping instances not yet started once `cancel` is set.
pub fn run_experiment_cancellable(cfg: &ExperimentConfig, cancel: &AtomicBool) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();

    let mut instances = Vec::new();
    for &qubits in &cfg.sizes {
        for &p in &cfg.noise_levels {
            for sample in 0..cfg.samples {
                instances.push((qubits, p, sample));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;
    let chunks: Vec<Option<Vec<ExperimentRecord>>> = pool.install(|| {
        instances
            .par_iter()
            .map(|&(qubits, p, sample)| {
                if cancel.load(AtomicOrdering::Relaxed) {
                    return None;
                }
                Some(run_instance(cfg, &methods, qubits, p, sample))
            })
            .collect()
    });
    let truncated = chunks.iter().any(Option::is_none);
    let mut records: Vec<ExperimentRecord> = chunks.into_iter().flatten().flatten().collect();
    records.sort_by(compare_records);
    Ok(SweepOutcome { records, truncated })
}

fn run_instance(cfg: &ExperimentConfig, methods: &[Method], qubits: usize, p: f64, sample: usize) -> Vec<ExperimentRecord> {
    let seed = instance_seed(cfg.seed, cfg.task, qubits, p, sample);
    let mut rng = Rng::new(seed);
    let template = ExperimentRecord {
        task: cfg.task,
        method: Method::Cba,
        qubits,
        noise_p: p,
        sample,
        seed,
        dist_to_oracle: None,
        dist_to_input: f64::INFINITY,
        feasibility_residual: f64::INFINITY,
        iterations: None,
        converged: None,
        wall_time_ns: 1,
        input_fingerprint: 0,
    };
    match cfg.task {
        Task::Qpt => {
            let (f, _) = gen_noisy_choi(qubits, p, &mut rng);
            let eval = Evaluator {
                input: f.clone(),
                dist: |a: &ChoiCandidate, b: &ChoiCandidate| frobenius_dist(a.matrix().as_ref(), b.matrix().as_ref()),
                violation: choi_violation,
                project: |m: Method, x: &ChoiCandidate| project_choi(m, x, &cfg.dykstra),
            };
            let fp = fingerprint(f.matrix());
            eval.run(cfg.needs_oracle(), methods, ExperimentRecord { input_fingerprint: fp, ..template })
        }
        Task::Qdt => {
            let (fs, _) = if cfg.shared_povm_noise {
                gen_noisy_povm_shared(qubits, p, &mut rng)
            } else {
                gen_noisy_povm(qubits, p, &mut rng)
            };
            let fp = fs.elements().iter().fold(0u64, |acc, e| mix_seed(acc, fingerprint(e)));
            let eval = Evaluator {
                input: fs.clone(),
                dist: |a: &PovmCandidate, b: &PovmCandidate| frobenius_dist_list(a.elements(), b.elements()),
                violation: povm_violation,
                project: |m: Method, x: &PovmCandidate| project_povm(m, x, &cfg.dykstra),
            };
            eval.run(cfg.needs_oracle(), methods, ExperimentRecord { input_fingerprint: fp, ..template })
        }
    }
}

struct Evaluator<T, D, V, P> {
    input: T,
    dist: D,
    violation: V,
    project: P,
}

impl<T: Clone, D, V, P> Evaluator<T, D, V, P>
where
    D: Fn(&T, &T) -> Result<f64>,
    V: Fn(&T) -> Result<f64>,
    P: Fn(Method, &T) -> Result<MethodRun<T>>,
{
    fn timed(&self, method: Method) -> (Result<MethodRun<T>>, u64) {
        let start = Instant::now();
        let run = (self.project)(method, &self.input);
        let ns = u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX).max(1);
        (run, ns)
    }

    fn run(&self, with_oracle: bool, methods: &[Method], template: ExperimentRecord) -> Vec<ExperimentRecord> {
        let oracle = with_oracle.then(|| self.timed(Method::Oracle));
        let reference = match &oracle {
            Some((Ok(run), _)) => Some(&run.output),
            _ => None,
        };
        let mut records = Vec::with_capacity(methods.len());
        for &method in methods {
            let (run, ns) = match (&oracle, method) {
                (Some((run, ns)), Method::Oracle) => (run.as_ref().map_err(Clone::clone).cloned(), *ns),
                _ => self.timed(method),
            };
            let mut record = ExperimentRecord { method, wall_time_ns: ns, ..template.clone() };
            if let Ok(run) = run {
                if let Ok(done) = self.measure(&run, reference, method) {
                    record = ExperimentRecord {
                        dist_to_oracle: done.0,
                        dist_to_input: done.1,
                        feasibility_residual: done.2,
                        iterations: run.iterations,
                        converged: run.converged,
                        ..record
                    };
                }
            }
            records.push(record);
        }
        records
    }

    fn measure(&self, run: &MethodRun<T>, reference: Option<&T>, method: Method) -> Result<(Option<f64>, f64, f64)> {
        let to_oracle = match reference {
            Some(r) if method != Method::Oracle => Some((self.dist)(&run.output, r)?),
            _ => None,
        };
        let to_input = (self.dist)(&run.output, &self.input)?;
        let violation = (self.violation)(&run.output)?;
        Ok((to_oracle, to_input, violation))
    }
}

/// Median and quartiles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub median: f64,
    pub q25: f64,
    pub q75: f64,
}

impl Stats {
    /// `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Stats {
            median: percentile_sorted(&sorted, 0.5),
            q25: percentile_sorted(&sorted, 0.25),
            q75: percentile_sorted(&sorted, 0.75),
        })
    }
}

/// Linear-interpolation percentile at fraction `q ∈ [0, 1]` of sorted data.
pub fn percentile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub task: Task,
    pub method: Method,
    pub qubits: usize,
    pub noise_p: f64,
    pub count: usize,
    pub failures: usize,
    pub dist_to_oracle: Option<Stats>,
    pub dist_to_input: Stats,
    pub feasibility_residual: Stats,
    pub iterations: Option<Stats>,
    pub wall_time_ns: Stats,
}

/// Groups by `(task, method, qubits, noise_p)`. Output is ordered by task,
/// qubits, noise and method.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&ExperimentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        a.task
            .cmp(&b.task)
            .then(a.qubits.cmp(&b.qubits))
            .then(a.noise_p.total_cmp(&b.noise_p))
            .then(a.method.cmp(&b.method))
    });
    let same = |a: &ExperimentRecord, b: &ExperimentRecord| {
        a.task == b.task && a.method == b.method && a.qubits == b.qubits && a.noise_p.to_bits() == b.noise_p.to_bits()
    };
    let mut rows = Vec::new();
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && same(sorted[start], sorted[end]) {
            end += 1;
        }
        rows.push(summary_row(&sorted[start..end]));
        start = end;
    }
    rows
}

fn summary_row(group: &[&ExperimentRecord]) -> SummaryRow {
    let first = group[0];
    let collect = |f: &dyn Fn(&ExperimentRecord) -> Option<f64>| -> Vec<f64> { group.iter().filter_map(|r| f(r)).collect() };
    SummaryRow {
        task: first.task,
        method: first.method,
        qubits: first.qubits,
        noise_p: first.noise_p,
        count: group.len(),
        failures: group.iter().filter(|r| r.failed()).count(),
        dist_to_oracle: Stats::of(&collect(&|r| r.dist_to_oracle)),
        dist_to_input: Stats::of(&collect(&|r| Some(r.dist_to_input))).expect("nonempty group"),
        feasibility_residual: Stats::of(&collect(&|r| Some(r.feasibility_residual))).expect("nonempty group"),
        iterations: Stats::of(&collect(&|r| r.iterations.map(|i| i as f64))),
        wall_time_ns: Stats::of(&collect(&|r| Some(r.wall_time_ns as f64))).expect("nonempty group"),
    }
}
