//! Randomized invariant checks shared by the property suite and the
//! acceptance run. Each check draws one case from its seed and returns a
//! description of the first violated invariant.

#![allow(dead_code)]

use projtomo::cba::{cba_povm_correction, cba_qdt, cba_qpt, cba_tp_correction};
use projtomo::dykstra::{dykstra, dykstra_cba_qdt, dykstra_cba_qpt, dykstra_id_qpt, DykstraConfig, Point};
use projtomo::experiments::{gen_noisy_choi, gen_noisy_povm};
use projtomo::matcore::{
    c64, default_rel_tol, frobenius_dist, hermitian_eig, inv_sqrt_psd, kron, min_eigenvalue, partial_trace_s,
    random_ginibre, Mat,
};
use projtomo::projections::{
    completeness_residual, proj_cp1, proj_psd, proj_sum_id, proj_tp, psd_violation, tp_residual,
};
use projtomo::{ChoiCandidate, HermitianMatrix, PovmCandidate, Rng};

pub type Check = fn(u64) -> Result<(), String>;

/// Every check, grouped by invariant family.
pub const CHECKS: &[(&str, &str, Check)] = &[
    ("matcore", "kron associativity", kron_associative),
    ("matcore", "partial trace of a product", partial_trace_of_kron),
    ("matcore", "eigendecomposition trace and reconstruction", eig_trace_and_reconstruction),
    ("matcore", "inverse square root range projector", inv_sqrt_range_projector),
    ("idempotence", "proj_tp", idempotent_tp),
    ("idempotence", "proj_cp1", idempotent_cp1),
    ("idempotence", "proj_psd", idempotent_psd),
    ("idempotence", "proj_sum_id", idempotent_sum_id),
    ("idempotence", "cba_qpt", idempotent_cba_qpt),
    ("idempotence", "cba_qdt", idempotent_cba_qdt),
    ("contraction", "proj_tp", contraction_tp),
    ("contraction", "proj_cp1", contraction_cp1),
    ("contraction", "proj_psd", contraction_psd),
    ("contraction", "proj_sum_id", contraction_sum_id),
    ("affine", "proj_tp", affine_tp),
    ("affine", "proj_sum_id", affine_sum_id),
    ("spectral", "proj_cp1 eigenvalues match the simplex oracle", cp1_matches_simplex_oracle),
    ("spectral", "proj_psd complementarity", psd_complementarity),
    ("congruence positivity", "channel correction", channel_correction_feasible),
    ("congruence positivity", "povm correction", povm_correction_feasible),
    ("congruence positivity", "one-shot pipelines", one_shot_pipelines_feasible),
    ("bookkeeping", "channel loop", bookkeeping_channel),
    ("bookkeeping", "povm loop", bookkeeping_povm),
    ("bookkeeping", "composed methods stay feasible", composed_methods_feasible),
    ("determinism", "generators across threads", generators_thread_independent),
];

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: projtomo::Error) -> String {
    e.to_string()
}

/// Uniform integer in `lo..=hi`.
pub fn between(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    lo + rng.index(hi - lo + 1)
}

pub fn unit(rng: &mut Rng) -> f64 {
    rng.index(1_000_001) as f64 / 1e6
}

pub fn max_abs(m: &Mat<c64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

pub fn dist(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    frobenius_dist(a.as_ref(), b.as_ref()).expect("same shape")
}

pub fn dist_list(a: &PovmCandidate, b: &PovmCandidate) -> f64 {
    a.elements().iter().zip(b.elements()).map(|(x, y)| dist(x, y).powi(2)).sum::<f64>().sqrt()
}

pub fn random_hermitian(n: usize, rng: &mut Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrize(random_ginibre(n, rng).as_ref())
}

/// `G·G†` for an `n × rank` Ginibre factor `G`, scaled to unit trace.
pub fn random_psd(n: usize, rank: usize, rng: &mut Rng) -> (HermitianMatrix, Mat<c64>) {
    let g = Mat::from_fn(n, rank, |_, _| c64::new(rng.standard_normal(), rng.standard_normal()));
    let m = HermitianMatrix::symmetrize((&g * g.adjoint()).as_ref());
    let tr = m.trace();
    (m.scaled(1.0 / tr), g)
}

pub fn random_choi(d: usize, rng: &mut Rng) -> ChoiCandidate {
    ChoiCandidate::new(d, random_hermitian(d * d, rng)).unwrap()
}

pub fn random_list(len: usize, d: usize, rng: &mut Rng) -> PovmCandidate {
    PovmCandidate::new((0..len).map(|_| random_hermitian(d, rng)).collect()).unwrap()
}

fn combine(a: &HermitianMatrix, b: &HermitianMatrix, alpha: f64) -> HermitianMatrix {
    HermitianMatrix::linear_combination(&[(alpha, a), (1.0 - alpha, b)])
}

pub fn kron_associative(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let dims: Vec<usize> = (0..3).map(|_| between(&mut rng, 1, 3)).collect();
    let [a, b, c] = [0, 1, 2].map(|k| random_ginibre(dims[k], &mut rng));
    let left = kron(kron(a.as_ref(), b.as_ref()).as_ref(), c.as_ref());
    let right = kron(a.as_ref(), kron(b.as_ref(), c.as_ref()).as_ref());
    let diff = max_abs(&(&left - &right));
    ensure(diff <= 1e-12 * (1.0 + max_abs(&left)), || format!("dims {dims:?}: deviation {diff:e}"))
}

pub fn partial_trace_of_kron(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let a = random_ginibre(d, &mut rng);
    let b = random_ginibre(d, &mut rng);
    let tr_a = (0..d).fold(c64::new(0.0, 0.0), |acc, i| acc + a[(i, i)]);
    let got = partial_trace_s(kron(a.as_ref(), b.as_ref()).as_ref(), d).map_err(err)?;
    let want = Mat::from_fn(d, d, |i, j| tr_a * b[(i, j)]);
    let diff = max_abs(&(&got - &want));
    ensure(diff <= 1e-12 * (1.0 + max_abs(&want)), || format!("d={d}: deviation {diff:e}"))
}

pub fn eig_trace_and_reconstruction(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 1, 10);
    let m = random_hermitian(n, &mut rng);
    let spec = hermitian_eig(&m).map_err(err)?;
    let sum: f64 = spec.eigenvalues.iter().sum();
    ensure((sum - m.trace()).abs() <= 1e-10 * n as f64, || format!("n={n}: eigenvalue sum off by {:e}", sum - m.trace()))?;
    ensure(spec.eigenvalues.windows(2).all(|w| w[0] <= w[1]), || "eigenvalues not ascending".into())?;
    let r = dist(&spec.reconstruct(), &m);
    ensure(r <= 1e-10 * (1.0 + m.norm()), || format!("n={n}: reconstruction error {r:e}"))
}

pub fn inv_sqrt_range_projector(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 2, 6);
    let rank = between(&mut rng, 1, n);
    let (m, g) = random_psd(n, rank, &mut rng);
    let s = inv_sqrt_psd(&m, default_rel_tol(n)).map_err(err)?;
    let got = s.as_ref() * m.as_ref() * s.as_ref();
    // orthonormal basis of range(G) = range(m)
    let q = g.as_ref().qr().compute_Q();
    let basis = q.as_ref().subcols(0, rank);
    let want = basis * basis.adjoint();
    let diff = max_abs(&(&got - &want));
    ensure(diff <= 1e-8, || format!("n={n}, rank={rank}: deviation {diff:e}"))
}

pub fn idempotent_tp(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let once = proj_tp(&random_choi(d, &mut rng));
    let twice = proj_tp(&once);
    let diff = dist(once.matrix(), twice.matrix());
    ensure(diff <= 1e-10, || format!("d={d}: {diff:e}"))
}

pub fn idempotent_cp1(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 2, 16);
    let m = random_hermitian(n, &mut rng).scaled(unit(&mut rng) * 2.0);
    let once = proj_cp1(&m).map_err(err)?;
    let twice = proj_cp1(&once).map_err(err)?;
    let diff = dist(&once, &twice);
    ensure(diff <= 1e-10, || format!("n={n}: {diff:e}"))
}

pub fn idempotent_psd(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 2, 16);
    let once = proj_psd(&random_hermitian(n, &mut rng)).map_err(err)?;
    let twice = proj_psd(&once).map_err(err)?;
    let diff = dist(&once, &twice);
    ensure(diff <= 1e-10, || format!("n={n}: {diff:e}"))
}

pub fn idempotent_sum_id(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let (len, d) = (between(&mut rng, 1, 6), between(&mut rng, 2, 4));
    let once = proj_sum_id(&random_list(len, d, &mut rng));
    let twice = proj_sum_id(&once);
    let diff = dist_list(&once, &twice);
    ensure(diff <= 1e-10, || format!("{len} x {d}: {diff:e}"))
}

pub fn idempotent_cba_qpt(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let qubits = between(&mut rng, 1, 2);
    let (noisy, _) = gen_noisy_choi(qubits, unit(&mut rng) * 0.3, &mut rng);
    let once = cba_qpt(&noisy).map_err(err)?.0;
    let twice = cba_qpt(&once).map_err(err)?.0;
    let diff = dist(once.matrix(), twice.matrix());
    ensure(diff <= 1e-10, || format!("{qubits} qubits: {diff:e}"))
}

pub fn idempotent_cba_qdt(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let m = between(&mut rng, 1, 3);
    let (noisy, _) = gen_noisy_povm(m, unit(&mut rng) * 0.1, &mut rng);
    let once = cba_qdt(&noisy).map_err(err)?.0;
    let twice = cba_qdt(&once).map_err(err)?.0;
    let diff = dist_list(&once, &twice);
    ensure(diff <= 1e-10, || format!("m={m}: {diff:e}"))
}

/// `‖P(x) − y‖ ≤ ‖x − y‖` for `y` in the target set.
fn contraction(px: f64, x: f64, what: &str) -> Result<(), String> {
    ensure(px <= x + 1e-12 * (1.0 + x), || format!("{what}: {px:e} > {x:e}"))
}

pub fn contraction_tp(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let x = random_choi(d, &mut rng);
    let y = proj_tp(&random_choi(d, &mut rng));
    contraction(dist(proj_tp(&x).matrix(), y.matrix()), dist(x.matrix(), y.matrix()), &format!("d={d}"))
}

pub fn contraction_cp1(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let x = random_hermitian(d, &mut rng);
    let rank = between(&mut rng, 1, d);
    let (y, _) = random_psd(d, rank, &mut rng);
    contraction(dist(&proj_cp1(&x).map_err(err)?, &y), dist(&x, &y), &format!("d={d}"))
}

pub fn contraction_psd(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let x = random_hermitian(d, &mut rng);
    let rank = between(&mut rng, 1, d);
    let y = random_psd(d, rank, &mut rng).0.scaled(3.0 * unit(&mut rng));
    contraction(dist(&proj_psd(&x).map_err(err)?, &y), dist(&x, &y), &format!("d={d}"))
}

pub fn contraction_sum_id(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let (len, d) = (between(&mut rng, 2, 4), between(&mut rng, 2, 4));
    let x = random_list(len, d, &mut rng);
    let y = proj_sum_id(&random_list(len, d, &mut rng));
    contraction(dist_list(&proj_sum_id(&x), &y), dist_list(&x, &y), &format!("{len} x {d}"))
}

pub fn affine_tp(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = between(&mut rng, 2, 4);
    let (x, y) = (random_choi(d, &mut rng), random_choi(d, &mut rng));
    let alpha = unit(&mut rng);
    let mixed = ChoiCandidate::new(d, combine(x.matrix(), y.matrix(), alpha)).unwrap();
    let lhs = proj_tp(&mixed);
    let rhs = combine(proj_tp(&x).matrix(), proj_tp(&y).matrix(), alpha);
    let diff = dist(lhs.matrix(), &rhs);
    ensure(diff <= 1e-10, || format!("d={d}, alpha={alpha}: {diff:e}"))
}

pub fn affine_sum_id(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let (len, d) = (between(&mut rng, 1, 5), between(&mut rng, 2, 4));
    let (x, y) = (random_list(len, d, &mut rng), random_list(len, d, &mut rng));
    let alpha = unit(&mut rng);
    let mix = |a: &PovmCandidate, b: &PovmCandidate| {
        PovmCandidate::new(a.elements().iter().zip(b.elements()).map(|(p, q)| combine(p, q, alpha)).collect()).unwrap()
    };
    let lhs = proj_sum_id(&mix(&x, &y));
    let rhs = mix(&proj_sum_id(&x), &proj_sum_id(&y));
    let diff = dist_list(&lhs, &rhs);
    ensure(diff <= 1e-10, || format!("{len} x {d}, alpha={alpha}: {diff:e}"))
}

/// Shift `τ` with `Σ max(λ_i − τ, 0) = 1`, found by bisection on the
/// monotone left-hand side.
pub fn simplex_threshold(values: &[f64]) -> f64 {
    let excess = |t: f64| values.iter().map(|&l| (l - t).max(0.0)).sum::<f64>() - 1.0;
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (max - 1.0, max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn cp1_matches_simplex_oracle(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 1, 6);
    let m = random_hermitian(n, &mut rng).scaled(2.0 * unit(&mut rng));
    let lambdas = hermitian_eig(&m).map_err(err)?.eigenvalues;
    let tau = simplex_threshold(&lambdas);
    let want: Vec<f64> = lambdas.iter().map(|&l| (l - tau).max(0.0)).collect();
    let got = hermitian_eig(&proj_cp1(&m).map_err(err)?).map_err(err)?.eigenvalues;
    let worst = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("n={n}: eigenvalues {got:?} vs {want:?}"))
}

pub fn psd_complementarity(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let n = between(&mut rng, 2, 12);
    let x = random_hermitian(n, &mut rng);
    let p = proj_psd(&x).map_err(err)?;
    let r = &x - &p;
    let inner: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (r.get(i, j).conj() * p.get(i, j)).re).sum();
    ensure(inner.abs() <= 1e-8, || format!("n={n}: <x - P(x), P(x)> = {inner:e}"))?;
    let top = hermitian_eig(&r).map_err(err)?.max();
    ensure(top <= 1e-10, || format!("n={n}: residual has eigenvalue {top:e}"))
}

pub fn channel_correction_feasible(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let d = [2, 4, 8][rng.index(3)];
    let rank = between(&mut rng, d, d * d);
    let x = ChoiCandidate::new(d, random_psd(d * d, rank, &mut rng).0).unwrap();
    let (y, _) = cba_tp_correction(&x).map_err(err)?;
    let tp = tp_residual(&y);
    ensure(tp <= 1e-10, || format!("d={d}: TP residual {tp:e}"))?;
    let low = min_eigenvalue(y.matrix()).map_err(err)?;
    ensure(low >= -1e-10, || format!("d={d}: min eigenvalue {low:e}"))
}

pub fn povm_correction_feasible(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let (len, d) = (between(&mut rng, 2, 6), between(&mut rng, 2, 4));
    let els = (0..len).map(|_| {
        let rank = between(&mut rng, 1, d);
        random_psd(d, rank, &mut rng).0
    });
    let xs = PovmCandidate::new(els.collect()).unwrap();
    if min_eigenvalue(&xs.element_sum()).map_err(err)? < 1e-6 {
        return Ok(());
    }
    let (ys, _) = cba_povm_correction(&xs).map_err(err)?;
    let c = completeness_residual(&ys);
    ensure(c <= 1e-10, || format!("{len} x {d}: completeness residual {c:e}"))?;
    for e in ys.elements() {
        let low = min_eigenvalue(e).map_err(err)?;
        ensure(low >= -1e-10, || format!("{len} x {d}: element eigenvalue {low:e}"))?;
    }
    Ok(())
}

pub fn one_shot_pipelines_feasible(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let qubits = between(&mut rng, 1, 3);
    let p = unit(&mut rng) * 0.5;
    let (choi, _) = gen_noisy_choi(qubits, p, &mut rng);
    let out = cba_qpt(&choi).map_err(err)?.0;
    let v = tp_residual(&out).max(psd_violation(out.matrix()).map_err(err)?);
    ensure(v <= 1e-10, || format!("cba_qpt {qubits} qubits p={p}: violation {v:e}"))?;
    let (povm, _) = gen_noisy_povm(qubits, p, &mut rng);
    let out = cba_qdt(&povm).map_err(err)?.0;
    let mut v = completeness_residual(&out);
    for e in out.elements() {
        v = v.max(psd_violation(e).map_err(err)?);
    }
    ensure(v <= 1e-10, || format!("cba_qdt m={qubits} p={p}: violation {v:e}"))
}

/// Replays the loop from the arguments and results each projection saw:
/// the increments `p_{k+1} = a_k − P_A(a_k)` and `q_{k+1} = b_k − P_B(b_k)`
/// must reproduce the next arguments, the returned iterates and every
/// recorded residual.
fn replay<P: Point>(x0: &P, pa: impl Fn(&P) -> P, pb: impl Fn(&P) -> P, max_iters: usize) -> Result<(), String> {
    let cfg = DykstraConfig { verify_bookkeeping: true, ..DykstraConfig::default() }.with_max_iters(max_iters);
    let (mut a_in, mut a_out, mut b_in, mut b_out) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let out = dykstra(
        x0,
        |x: &P| {
            let y = pa(x);
            a_in.push(x.clone());
            a_out.push(y.clone());
            Ok(y)
        },
        |x: &P| {
            let y = pb(x);
            b_in.push(x.clone());
            b_out.push(y.clone());
            Ok(y)
        },
        &cfg,
    )
    .map_err(err)?;
    let k = out.trace.iterations;
    ensure(a_in.len() == k && b_in.len() == k, || "projection call count differs from iterations".into())?;
    ensure(out.trace.residuals.len() == k, || "one residual per iteration".into())?;
    let close = |a: &P, b: &P, scale: f64| a.sub(b).norm_sq().sqrt() <= 1e-12 * (1.0 + scale);
    let zero = x0.sub(x0);
    let (mut p, mut q) = (zero.clone(), zero);
    ensure(close(&a_in[0], x0, 0.0), || "first argument is not the input".into())?;
    for i in 0..k {
        let scale = a_in[i].norm_sq().sqrt();
        let p_next = a_in[i].sub(&a_out[i]);
        let q_next = b_in[i].sub(&b_out[i]);
        ensure(close(&b_in[i], &a_out[i].add(&q), scale), || format!("iteration {i}: P_B argument is not y + q"))?;
        if i + 1 < k {
            ensure(close(&a_in[i + 1], &b_out[i].add(&p_next), scale), || format!("iteration {i}: P_A argument is not x + p"))?;
        }
        let c = p.sub(&p_next).norm_sq() + q.sub(&q_next).norm_sq();
        let recorded = out.trace.residuals[i];
        ensure(recorded.is_finite(), || format!("iteration {i}: residual not finite"))?;
        ensure((c - recorded).abs() <= 1e-10 * (1.0 + c), || format!("iteration {i}: residual {recorded:e} vs replayed {c:e}"))?;
        p = p_next;
        q = q_next;
    }
    ensure(close(&out.x, &b_out[k - 1], 0.0) && close(&out.y, &a_out[k - 1], 0.0), || "returned iterates are not the last projections".into())?;
    let last = out.trace.residuals[k - 1];
    ensure(!out.trace.converged || last <= cfg.epsilon, || format!("converged with residual {last:e}"))?;
    ensure(out.trace.converged || k == max_iters, || "stopped early without converging".into())
}

pub fn bookkeeping_channel(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let qubits = between(&mut rng, 1, 2);
    let (f, _) = gen_noisy_choi(qubits, unit(&mut rng) * 0.3, &mut rng);
    let d = f.sys_dim();
    let max_iters = between(&mut rng, 1, 40);
    replay(&f, proj_tp, |c: &ChoiCandidate| ChoiCandidate::new(d, proj_cp1(c.matrix()).unwrap()).unwrap(), max_iters)
}

pub fn bookkeeping_povm(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let m = between(&mut rng, 1, 2);
    let (f, _) = gen_noisy_povm(m, unit(&mut rng) * 0.3, &mut rng);
    let max_iters = between(&mut rng, 1, 40);
    let clip = |p: &PovmCandidate| PovmCandidate::new(p.elements().iter().map(|e| proj_psd(e).unwrap()).collect()).unwrap();
    replay(&f, clip, proj_sum_id, max_iters)
}

pub fn composed_methods_feasible(seed: u64) -> Result<(), String> {
    let mut rng = Rng::new(seed);
    let qubits = between(&mut rng, 1, 2);
    let p = unit(&mut rng) * 0.3;
    let cfg = DykstraConfig::default().with_max_iters(between(&mut rng, 1, 20));
    let (f, _) = gen_noisy_choi(qubits, p, &mut rng);
    for (name, out) in [
        ("dykstra-cba", dykstra_cba_qpt(&f, &cfg).map_err(err)?.0),
        ("dykstra-id", dykstra_id_qpt(&f, &cfg).map_err(err)?.0),
    ] {
        let v = tp_residual(&out).max(psd_violation(out.matrix()).map_err(err)?);
        ensure(v <= 1e-10, || format!("{name} {qubits} qubits p={p} after {} iterations: {v:e}", cfg.max_iters))?;
    }
    let (fs, _) = gen_noisy_povm(qubits, p, &mut rng);
    let out = dykstra_cba_qdt(&fs, &cfg).map_err(err)?.0;
    let mut v = completeness_residual(&out);
    for e in out.elements() {
        v = v.max(psd_violation(e).map_err(err)?);
    }
    ensure(v <= 1e-10, || format!("dykstra-cba qdt m={qubits} p={p}: {v:e}"))
}

pub fn generators_thread_independent(seed: u64) -> Result<(), String> {
    let draw = move || {
        let mut rng = Rng::new(seed).split(7);
        let (c, _) = gen_noisy_choi(1, 0.1, &mut rng);
        let (p, _) = gen_noisy_povm(2, 0.1, &mut rng);
        (c, p)
    };
    let here = draw();
    let there = std::thread::spawn(draw).join().expect("worker thread");
    ensure(here.0 == there.0 && here.1 == there.1, || "draws differ between threads".into())?;
    let mut used = Rng::new(seed);
    used.standard_normal();
    let fresh = Rng::new(seed);
    let (mut a, mut b) = (used.split(3), fresh.split(3));
    ensure(a.standard_normal().to_bits() == b.standard_normal().to_bits(), || "split depends on parent consumption".into())
}
