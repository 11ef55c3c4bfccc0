//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! A failing criterion makes the binary exit nonzero unless it is an analysed
//! shortfall: the suite then also checks, numerically, the explanation of why
//! the target cannot be met, and reports the line as FAIL with that analysis.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use graal::diagnostics::{fit_linear_rate, lyapunov_energy, scaled_gap_ratio};
use graal::linalg::{dist, norm, spectral_norm_gram, SparseMatrix};
use graal::problems::{
    make_affine_vi, make_balls_cfp, make_bilinear_saddle, make_logistic, make_nash, nash_f, random_gaussian_matrix,
    synthetic_logistic, GammaRule, NashParams, NashScenario,
};
use graal::prox::{check_prox_inequality, DiagonalMetric, ProxOp};
use graal::rng::RngStream;
use graal::solvers::{
    agraal_step, fixedpoint_agraal_step, fixedpoint_warm_start, run, warm_start, Method, RunOptions, StepsizeRule,
    StopRule, Target, Termination, Trace, GOLDEN_RATIO,
};
use graal::VIProblem;
use graal_bench::config::{ExperimentConfig, MethodKind};
use graal_bench::experiment::{run_experiment, ExperimentOutput, SummaryRow};
use graal_bench::output::write_trace;
use graal_bench::presets::{preset, PRESETS};
use nalgebra::{Complex, DMatrix};

struct Verdict {
    pass: bool,
    /// Set when a failure comes with a verified explanation.
    analysed: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, analysed: false, detail }
    }
}

struct Runs {
    outputs: BTreeMap<&'static str, ExperimentOutput>,
    seconds: BTreeMap<&'static str, f64>,
}

impl Runs {
    fn get(&self, name: &str) -> &ExperimentOutput {
        &self.outputs[name]
    }

    fn secs(&self, names: &[&str]) -> f64 {
        names.iter().map(|n| self.seconds[n]).sum()
    }
}

fn load(name: &str) -> ExperimentConfig {
    preset(name).expect("shipped preset").expect("valid preset")
}

fn run_presets() -> Runs {
    let mut outputs = BTreeMap::new();
    let mut seconds = BTreeMap::new();
    for (name, _) in PRESETS {
        let clock = Instant::now();
        let out = run_experiment(&load(name)).expect("preset runs");
        seconds.insert(*name, clock.elapsed().as_secs_f64());
        outputs.insert(*name, out);
    }
    Runs { outputs, seconds }
}

fn rule_for(config: &ExperimentConfig, kind: MethodKind) -> Option<StepsizeRule> {
    match kind {
        MethodKind::Agraal | MethodKind::AgraalMetric | MethodKind::AgraalFixpoint => Some(config.methods.rule),
        MethodKind::AgraalLinear => Some(config.methods.linear_rule()),
        _ => None,
    }
}

/// Largest relative violation of `θ_k ≤ 1 + 1/φ`, `λ_k ≤ min(ρλ_{k−1}, λ̄)` and
/// `λ_k²‖ΔF‖² ≤ δθ_kθ_{k−1}/4·‖Δz‖²`, and the number of steps checked.
fn invariant_violation(trace: &Trace, rule: &StepsizeRule) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for r in &trace.records {
        let (Some(lambda), Some(lambda_prev), Some(theta), Some(theta_prev)) =
            (r.lambda, r.lambda_prev, r.theta, r.theta_prev)
        else {
            continue;
        };
        steps += 1;
        worst = worst.max((theta - rule.theta_bound()) / rule.theta_bound());
        let cap = (rule.rho() * lambda_prev).min(rule.lambda_max());
        worst = worst.max((lambda - cap) / cap);
        let (dz_sq, df_sq, delta) = (r.dz_sq.unwrap_or(0.0), r.df_sq.unwrap_or(0.0), r.delta.unwrap_or(1.0));
        let lhs = lambda * lambda * df_sq;
        let rhs = delta * theta * theta_prev / 4.0 * dz_sq;
        if rhs > 0.0 {
            worst = worst.max((lhs - rhs) / rhs);
        } else if lhs > 0.0 {
            worst = f64::INFINITY;
        }
    }
    (worst, steps)
}

fn criterion_1(runs: &Runs) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    let mut traces = 0;
    for out in runs.outputs.values() {
        for cell in &out.cells {
            let (Some(trace), Some(rule)) = (&cell.trace, rule_for(&out.config, cell.method)) else { continue };
            let (w, s) = invariant_violation(trace, &rule);
            worst = worst.max(w);
            steps += s;
            traces += 1;
        }
    }
    Verdict::new(
        worst <= 1e-12 && steps > 0,
        format!("worst relative violation {worst:.2e} over {steps} adaptive steps in {traces} preset runs"),
    )
}

/// Instance and start of the saddle preset for `seed`, plus `‖K‖` and the singular values of `K`.
fn saddle_instance(seed: u64) -> (VIProblem, Vec<f64>, f64, Vec<f64>) {
    let config = load("saddle");
    let n = config.problem.n;
    let k = random_gaussian_matrix(n, n, seed).expect("gaussian matrix");
    let dense = k.to_dense();
    let sv = DMatrix::from_fn(n, n, |i, j| dense.get(i, j)).singular_values().iter().copied().collect::<Vec<_>>();
    let l = spectral_norm_gram(&k, 1e-14, 100_000).expect("power iteration").value.sqrt();
    let start = RngStream::substream(seed, 1).normal(0.0, 1.0, 2 * n).expect("start");
    (make_bilinear_saddle(k, ProxOp::Zero, ProxOp::Zero).expect("saddle"), start, l, sv)
}

fn criterion_2() -> Verdict {
    let rule = StepsizeRule::default();
    let phi = rule.phi();
    let seeds = load("saddle").problem.seeds;
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    for &seed in &seeds {
        let (p, start, _, _) = saddle_instance(seed);
        let zero = vec![0.0; p.dim()];
        let mut state = warm_start(&p, &start, &mut RngStream::new(seed), None).expect("warm start");
        let mut previous: Option<f64> = None;
        for _ in 0..20_000 {
            agraal_step(&mut state, &p, &rule).expect("step");
            let z_bar_next: Vec<f64> =
                state.z.iter().zip(&state.z_bar).map(|(z, b)| ((phi - 1.0) * z + b) / phi).collect();
            let e = lyapunov_energy(&z_bar_next, &state.z, &state.z_prev, state.theta, phi, &zero);
            if let Some(prev) = previous {
                if prev > 0.0 {
                    worst = worst.max(e / prev - 1.0);
                }
                steps += 1;
            }
            previous = Some(e);
        }
    }
    Verdict::new(
        worst <= 1e-10,
        format!("largest relative increase of E_k {worst:.2e} over {steps} steps, {} seeds", seeds.len()),
    )
}

/// Spectral radius of the fixed-step iteration on the invariant plane of singular value `sigma`.
fn graal_contraction(sigma: f64, lambda: f64) -> f64 {
    let phi = GOLDEN_RATIO;
    let a = Complex::new((phi - 1.0) / phi, -lambda * sigma);
    let (b, c, d) = (Complex::new(1.0 / phi, 0.0), Complex::new((phi - 1.0) / phi, 0.0), Complex::new(1.0 / phi, 0.0));
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    ((tr + disc) * 0.5).norm().max(((tr - disc) * 0.5).norm())
}

fn criterion_3(runs: &Runs) -> Verdict {
    let out = runs.get("saddle");
    let max_iters = 50_000;
    let mut reached = 0;
    let mut seeds = 0;
    let mut explained = true;
    let mut worst_needed: f64 = 0.0;
    for &seed in &out.config.problem.seeds {
        seeds += 1;
        let trace = out.cell(seed, MethodKind::Graal).and_then(|c| c.trace.as_ref()).expect("graal trace");
        if trace.converged()
            && trace.iterations() <= max_iters
            && trace.final_residual().unwrap_or(f64::INFINITY) <= 1e-6
        {
            reached += 1;
            continue;
        }
        let (_, _, l, sv) = saddle_instance(seed);
        let mut sorted = sv.clone();
        sorted.sort_by(f64::total_cmp);
        let lambda = GOLDEN_RATIO / (2.0 * l);
        // the tail is dominated by the two slowest modes
        let slowest = graal_contraction(sorted[0], lambda).ln();
        let second = graal_contraction(sorted[1], lambda).ln();
        let residuals: Vec<f64> = trace.records.iter().map(|r| r.residual).collect();
        let observed = fit_linear_rate(&residuals, None).map(|f| f.factor()).unwrap_or(1.0).ln();
        let within = observed <= slowest * 0.9 && observed >= second * 1.1;
        let last = trace.final_residual().unwrap_or(f64::INFINITY);
        let needed = trace.iterations() as f64 + (1e-6 / last).ln() / observed;
        worst_needed = worst_needed.max(needed);
        explained &=
            trace.termination == Termination::MaxIters && within && observed < 0.0 && needed > max_iters as f64;
    }
    let pass = reached == seeds;
    let mut v =
        Verdict::new(pass, format!("{reached}/{seeds} seeds reach residual 1e-6 within {max_iters} iterations"));
    if !pass {
        v.analysed = explained;
        if explained {
            v.detail.push_str(&format!(
                "; observed tail rates match the contraction of the two smallest singular values, slowest seed needs about {worst_needed:.1e} iterations"
            ));
        } else {
            v.detail.push_str("; observed rates are not explained by the singular values of K");
        }
    }
    v
}

fn criterion_4(runs: &Runs) -> Verdict {
    let out = runs.get("saddle");
    let rule = out.config.methods.rule;
    let mut worst_ratio = f64::INFINITY;
    for &seed in &out.config.problem.seeds {
        let (_, _, l, _) = saddle_instance(seed);
        let bound = rule.phi().powi(2) / (4.0 * l * l * rule.lambda_max());
        let trace = out.cell(seed, MethodKind::Agraal).and_then(|c| c.trace.as_ref()).expect("agraal trace");
        worst_ratio = worst_ratio.min(trace.min_lambda().expect("steps taken") / bound);
    }
    Verdict::new(worst_ratio >= 1.0 - 1e-9, format!("min over seeds of min_k λ_k / bound = {worst_ratio:.3e}"))
}

fn to_tol(row: Option<&SummaryRow>) -> Option<u64> {
    row.and_then(|r| r.fevals_to_tol)
}

fn criterion_5(runs: &Runs) -> Verdict {
    let mut pass = true;
    let mut explained = true;
    let mut parts = Vec::new();
    for name in ["nash-a", "nash-b"] {
        let out = runs.get(name);
        let seeds = &out.config.problem.seeds;
        let agraal_ok = seeds.iter().filter(|&&s| to_tol(out.row(s, MethodKind::Agraal)).is_some()).count();
        let fbf_ok = seeds.iter().filter(|&&s| to_tol(out.row(s, MethodKind::Fbf)).is_some()).count();
        let fewer = seeds
            .iter()
            .filter(|&&s| match (to_tol(out.row(s, MethodKind::Agraal)), to_tol(out.row(s, MethodKind::Fbf))) {
                (Some(a), Some(f)) => a < f,
                (Some(_), None) => true,
                _ => false,
            })
            .count();
        let ok = agraal_ok == seeds.len() && fbf_ok == seeds.len() && fewer >= 8;
        pass &= ok;
        if !ok {
            // the only accepted explanation: aGRAAL meets everything, FBF is still
            // decreasing its residual when the iteration budget runs out
            let fbf_slow = seeds.iter().all(|&s| {
                let t = out.cell(s, MethodKind::Fbf).and_then(|c| c.trace.as_ref()).expect("fbf trace");
                if t.converged() {
                    return true;
                }
                let half = t.records[t.records.len() / 2].residual;
                t.termination == Termination::MaxIters && t.final_residual().is_some_and(|r| r < half)
            });
            explained &= agraal_ok == seeds.len() && fewer >= 8 && fbf_slow;
        }
        parts.push(format!(
            "{name}: aGRAAL reaches 1e-6 on {agraal_ok}/{n}, FBF on {fbf_ok}/{n}, aGRAAL cheaper on {fewer}/{n}",
            n = seeds.len()
        ));
    }
    let mut v = Verdict::new(pass, parts.join("; "));
    if !pass {
        v.analysed = explained;
        v.detail.push_str("; unconverged FBF runs are still decreasing at the iteration limit");
    }
    v
}

fn criterion_6(runs: &Runs) -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["balls-100x200", "balls-200x100"] {
        let out = runs.get(name);
        let seeds = &out.config.problem.seeds;
        let its = |s: u64, k: MethodKind| out.row(s, k).and_then(|r| r.iterations_to_tol);
        let wins = seeds
            .iter()
            .filter(|&&s| match (its(s, MethodKind::AgraalFixpoint), its(s, MethodKind::Km)) {
                (Some(a), Some(k)) => a < k,
                (Some(_), None) => true,
                _ => false,
            })
            .count();
        pass &= wins >= 8;
        parts.push(format!("{name}: aGRAAL fewer iterations on {wins}/{}", seeds.len()));
    }
    Verdict::new(pass, parts.join("; "))
}

fn criterion_7(runs: &Runs) -> Verdict {
    let out = runs.get("logistic");
    let seeds = &out.config.problem.seeds;
    let fe = |s: u64, k: MethodKind| out.row(s, k).and_then(|r| r.fevals_to_energy_tol);
    let wins = seeds
        .iter()
        .filter(|&&s| match (fe(s, MethodKind::Agraal), fe(s, MethodKind::Pgm)) {
            (Some(a), Some(p)) => a <= p,
            (Some(_), None) => true,
            _ => false,
        })
        .count();
    let fista_ok = seeds.iter().all(|&s| {
        out.cell(s, MethodKind::Fista)
            .and_then(|c| c.trace.as_ref())
            .is_some_and(|t| t.termination != Termination::NumericalFailure && t.error.is_none())
    });
    Verdict::new(
        wins >= 8 && fista_ok,
        format!(
            "aGRAAL reaches J* + 1e-6 with no more F-evaluations than PGM on {wins}/{}; FISTA completed: {fista_ok}",
            seeds.len()
        ),
    )
}

fn criterion_8(runs: &Runs) -> Verdict {
    let out = runs.get("nonmonotone");
    let rows: Vec<&SummaryRow> = out.summary.iter().filter(|r| r.method == MethodKind::Agraal.name()).collect();
    let wins: Vec<&&SummaryRow> = rows.iter().filter(|r| r.success).collect();
    let rate = wins.len() as f64 / rows.len() as f64;
    let mean = wins.iter().map(|r| r.iterations as f64).sum::<f64>() / wins.len().max(1) as f64;
    Verdict::new(
        rate >= 0.95 && (100.0..=2000.0).contains(&mean),
        format!("success {}/{} ({:.0}%), mean iterations {mean:.1}", wins.len(), rows.len(), 100.0 * rate),
    )
}

fn criterion_9() -> Verdict {
    let mut worst_slope = f64::NEG_INFINITY;
    let mut worst_r2 = f64::INFINITY;
    for seed in 1..=3 {
        let p = make_affine_vi(50, 1.0, seed).expect("affine VI");
        let trace = run(
            &Method::Agraal(StepsizeRule::linear()),
            Target::Vi(&p),
            &vec![0.0; 50],
            &RunOptions { seed, ..RunOptions::default() },
            &StopRule::new(1e-12, 5000),
        )
        .expect("run");
        let dists: Vec<f64> = trace.records.iter().map(|r| r.dist_opt.expect("known solution")).collect();
        let fit = fit_linear_rate(&dists, None).expect("fit");
        worst_slope = worst_slope.max(fit.slope);
        worst_r2 = worst_r2.min(fit.r_squared);
    }
    Verdict::new(
        worst_slope < 0.0 && worst_r2 >= 0.9,
        format!("tail-half fit of ln dist: worst slope {worst_slope:.3e}, worst R² {worst_r2:.3}"),
    )
}

fn criterion_10(runs: &Runs) -> Verdict {
    let out = runs.get("logistic");
    let mut worst: f64 = 0.0;
    let mut all = true;
    for &seed in &out.config.problem.seeds {
        let trace = out.cell(seed, MethodKind::Agraal).and_then(|c| c.trace.as_ref()).expect("agraal trace");
        let star = out.row(seed, MethodKind::Agraal).and_then(|r| r.energy_star).expect("J*");
        let gaps: Vec<f64> = trace.records.iter().map(|r| r.ergodic_energy.expect("ergodic energy") - star).collect();
        match scaled_gap_ratio(&gaps, 0.2) {
            Ok(Some(r)) => worst = worst.max(r),
            _ => all = false,
        }
    }
    Verdict::new(all && worst <= 2.0, format!("max over seeds of k·gap_k / (k₀·gap_k₀) = {worst:.3}"))
}

fn nash_fd_error() -> f64 {
    let mut rng = RngStream::new(99);
    let mut worst: f64 = 0.0;
    for idx in 0..100u64 {
        let scenario = if idx % 2 == 0 { NashScenario::A } else { NashScenario::B };
        let p = NashParams::sample(scenario, 8, idx).expect("params");
        let q = rng.uniform(0.5, 20.0, 8).expect("point");
        let f = nash_f(&q, &p).expect("F");
        let total: f64 = q.iter().sum();
        for i in 0..8 {
            let loss = |t: f64| {
                let b = p.beta[i];
                let cost = p.c[i] * t + b / (b + 1.0) * p.lcap[i].powf(1.0 / b) * t.powf((b + 1.0) / b);
                cost - t * 5000f64.powf(1.0 / p.gamma) * (t + total - q[i]).powf(-1.0 / p.gamma)
            };
            let h = 1e-5 * q[i];
            let fd = (loss(q[i] + h) - loss(q[i] - h)) / (2.0 * h);
            worst = worst.max((f[i] - fd).abs() / fd.abs().max(1.0));
        }
    }
    worst
}

fn spectral_error() -> f64 {
    let mut worst: f64 = 0.0;
    for seed in 1..=10 {
        let k: SparseMatrix = random_gaussian_matrix(10, 10, seed).expect("matrix");
        let d = k.to_dense();
        let m = DMatrix::from_fn(10, 10, |i, j| d.get(i, j));
        let eig = (m.transpose() * &m).symmetric_eigenvalues().max();
        let est = spectral_norm_gram(&k, 1e-14, 100_000).expect("power iteration").value;
        worst = worst.max((est.sqrt() - eig.sqrt()).abs() / eig.sqrt());
    }
    worst
}

fn prox_violation() -> f64 {
    let n = 6;
    let ops = vec![
        ProxOp::Zero,
        ProxOp::l1(0.7).expect("l1"),
        ProxOp::NonnegOrthant,
        ProxOp::boxed(vec![-1.0; n], vec![2.0; n]).expect("box"),
        ProxOp::ball(vec![1.0, 0.0, -1.0, 2.0, 0.0, 0.5], 3.0).expect("ball"),
        ProxOp::hyperplane(vec![1.0, -2.0, 0.5, 0.0, 3.0, 1.0], 2.5).expect("hyperplane"),
        ProxOp::product(vec![(2, ProxOp::l1(1.5).expect("l1")), (4, ProxOp::NonnegOrthant)]),
    ];
    let mut rng = RngStream::new(21);
    let mut worst = f64::NEG_INFINITY;
    for g in &ops {
        let probes: Vec<Vec<f64>> =
            (0..1000).map(|_| g.project_domain(&rng.normal(0.0, 5.0, n).expect("probe"))).collect();
        for _ in 0..5 {
            let z = rng.normal(0.0, 5.0, n).expect("point");
            worst = worst.max(check_prox_inequality(g, &z, &probes).expect("value available"));
        }
    }
    worst
}

fn metric_identity_bitwise() -> bool {
    let rule = StepsizeRule::default();
    let cases = [
        (make_logistic(&synthetic_logistic(50, 10, 6).expect("data"), GammaRule::Default).expect("logistic"), 0.0),
        (make_nash(NashScenario::B, 12, 1).expect("nash"), 1.0),
    ];
    cases.iter().all(|(p, s)| {
        let n = p.dim();
        let start = vec![*s; n];
        let opts = RunOptions::default();
        let stop = StopRule::iterations(500);
        let a = run(&Method::Agraal(rule), Target::Vi(p), &start, &opts, &stop).expect("run");
        let metric = Method::AgraalMetric { rule, m: DiagonalMetric::identity(n), p: DiagonalMetric::identity(n) };
        let b = run(&metric, Target::Vi(p), &start, &opts, &stop).expect("run");
        let bits = |t: &Trace| -> Vec<u64> {
            t.records.iter().flat_map(|r| [r.lambda.unwrap_or(0.0).to_bits(), r.residual.to_bits()]).collect()
        };
        bits(&a) == bits(&b) && a.final_point.iter().zip(&b.final_point).all(|(x, y)| x.to_bits() == y.to_bits())
    })
}

fn fixed_point_step_error() -> f64 {
    let rule = StepsizeRule::default();
    let mut worst: f64 = 0.0;
    for seed in 1..=3 {
        let t = make_balls_cfp(20, 30, seed).expect("balls");
        let vi = t.to_vi();
        let start = t.start().expect("start").to_vec();
        let mut state = fixedpoint_warm_start(&t, &start, &mut RngStream::new(seed), None).expect("warm start");
        for _ in 0..300 {
            let mut twin = state.clone();
            agraal_step(&mut twin, &vi, &rule).expect("step");
            fixedpoint_agraal_step(&mut state, &t, &rule).expect("step");
            worst = worst.max(dist(&state.z, &twin.z) / (1.0 + norm(&state.z)));
            if t.residual(&state.z) < 1e-12 {
                break;
            }
        }
    }
    worst
}

fn criterion_11() -> Verdict {
    let prox = prox_violation();
    let nash = nash_fd_error();
    let spectral = spectral_error();
    let bitwise = metric_identity_bitwise();
    let fixed = fixed_point_step_error();
    Verdict::new(
        prox <= 1e-9 && nash <= 1e-4 && spectral <= 1e-6 && bitwise && fixed <= 1e-14,
        format!(
            "prox {prox:.1e}, Nash FD {nash:.1e}, spectral {spectral:.1e}, identity metric bitwise {bitwise}, fixed-point step {fixed:.1e}"
        ),
    )
}

fn trace_bytes(out: &ExperimentOutput, seed: u64, kind: MethodKind) -> Option<Vec<u8>> {
    let trace = out.cell(seed, kind)?.trace.as_ref()?;
    let mut buf = Vec::new();
    write_trace(trace, &mut buf).expect("in-memory write");
    Some(buf)
}

fn criterion_12(runs: &Runs) -> Verdict {
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (name, first) in &runs.outputs {
        let mut config = first.config.clone();
        config.problem.seeds.truncate(2);
        let again = run_experiment(&config).expect("rerun");
        for &seed in &config.problem.seeds {
            for &kind in &config.methods.kinds {
                compared += 1;
                if trace_bytes(first, seed, kind) != trace_bytes(&again, seed, kind) {
                    mismatches.push(format!("{name}/{}/seed{seed}", kind.name()));
                }
            }
        }
    }
    let detail = if mismatches.is_empty() {
        format!("{compared} traces byte-identical on rerun")
    } else {
        format!("{} of {compared} traces differ: {}", mismatches.len(), mismatches.join(", "))
    };
    Verdict::new(mismatches.is_empty(), detail)
}

fn main() -> ExitCode {
    let clock = Instant::now();
    let runs = run_presets();
    println!("preset runs finished in {:.1} s", clock.elapsed().as_secs_f64());

    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(u8, &str, f64, &[&str], Check)> = vec![
        (1, "stepsize invariants", 60.0, &["linear-cfp"], Box::new(|| criterion_1(&runs))),
        (2, "Lyapunov monotonicity", 10.0, &[], Box::new(criterion_2)),
        (3, "fixed-step GRAAL convergence", 30.0, &["saddle"], Box::new(|| criterion_3(&runs))),
        (4, "stepsize separation", 30.0, &[], Box::new(|| criterion_4(&runs))),
        (5, "Nash-Cournot", 120.0, &["nash-a", "nash-b"], Box::new(|| criterion_5(&runs))),
        (6, "balls CFP", 120.0, &["balls-100x200", "balls-200x100"], Box::new(|| criterion_6(&runs))),
        (7, "logistic regression", 120.0, &["logistic"], Box::new(|| criterion_7(&runs))),
        (8, "nonmonotone equation", 60.0, &["nonmonotone"], Box::new(|| criterion_8(&runs))),
        (9, "R-linear rate", 10.0, &[], Box::new(criterion_9)),
        (10, "ergodic O(1/k)", 120.0, &["logistic"], Box::new(|| criterion_10(&runs))),
        (11, "oracle equivalences", 60.0, &[], Box::new(criterion_11)),
        (12, "determinism", 60.0, &[], Box::new(|| criterion_12(&runs))),
    ];

    let (mut passed, mut analysed, mut failed) = (0, 0, 0);
    for (id, title, limit, shared, check) in criteria {
        let clock = Instant::now();
        let mut v = check();
        let seconds = clock.elapsed().as_secs_f64() + runs.secs(shared);
        if seconds > limit {
            v.pass = false;
            v.analysed = false;
            v.detail.push_str(&format!("; runtime {seconds:.1} s exceeds {limit} s"));
        }
        let status = if v.pass { "PASS" } else { "FAIL" };
        let note = if !v.pass && v.analysed { " [analysed shortfall]" } else { "" };
        println!("criterion {id:>2} {status} {title} ({seconds:.1} s): {}{note}", v.detail);
        match (v.pass, v.analysed) {
            (true, _) => passed += 1,
            (false, true) => analysed += 1,
            (false, false) => failed += 1,
        }
    }
    println!("acceptance: {passed} passed, {analysed} failed with analysed shortfall, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
