//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest harness so the
//! lines are always printed; exits nonzero when any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kirchfrac::cli_io::{ResultFile, EXIT_GEOMETRY, EXIT_INVALID_SPEC};
use kirchfrac::constants::{c_lambda_upper_from, d_lambda, vnorm_pow_bound};
use kirchfrac::energy::{energy, energy_gradient, pairing};
use kirchfrac::grid_frac::{frac_integral, gamma_fn, FracOperator, Grid, GridFunction, Side};
use kirchfrac::nonlinearity::check_growth;
use kirchfrac::solver::test_element;
use kirchfrac::spaces::norm_report;
use kirchfrac::{
    benchmark_spec, compute_lambdas, solve, sweep, ConstantsReport, Error, LogReal, Model,
    MountainPassConfig, NonlinearitySpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn example() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/benchmark_n2_p3.json")
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kirchfrac"))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn constants_reproduction() -> Outcome {
    let start = Instant::now();
    let out = bin()
        .arg("constants")
        .arg("--json")
        .arg(example())
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        out.status.success(),
        format!("exit {:?}", out.status.code()),
    )?;
    let rep: ConstantsReport = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let ls = rep.lambda_star.log10_abs();
    let d = (4.0f64 / 3.0).cbrt() * PI.powf(-4.0 / 3.0);
    let g = (16.0f64 / 5.0).cbrt() / PI.sqrt();
    let g0 = 5f64.powf(-1.0 / 3.0) * 16f64.powf(2.0 / 3.0) / PI;
    let worst = rel(rep.d.to_f64(), d)
        .max(rel(rep.g.to_f64(), g))
        .max(rel(rep.g0.to_f64(), g0));
    ensure((ls - 54.316).abs() <= 0.01, format!("log10 lambda* = {ls}"))?;
    ensure(worst <= 1e-12, format!("D, G, G0 relative error {worst:e}"))?;
    ensure(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "log10 lambda* = {ls:.4} (|diff| {:.4}), D/G/G0 rel err {worst:.1e}, {elapsed:.2?}",
        (ls - 54.316).abs()
    ))
}

fn discrete_norms() -> Outcome {
    let spec = benchmark_spec();
    let rep = compute_lambdas(&spec).map_err(|e| e.to_string())?;
    let model = Model::new(spec, 4096).map_err(|e| e.to_string())?;
    let n = norm_report(&model, &test_element(&model)).map_err(|e| e.to_string())?;
    let d = (4.0f64 / 3.0).cbrt() * PI.powf(-4.0 / 3.0);
    let g = rep.g.to_f64();
    let err = rel(n.lp_norm, d);
    ensure(err <= 1e-3, format!("||e||_L3 relative error {err:e}"))?;
    ensure(
        n.frac_seminorm <= 1.01 * g,
        format!("seminorm {} > 1.01 G = {}", n.frac_seminorm, 1.01 * g),
    )?;
    Ok(format!(
        "||e||_L3 rel err {err:.1e}; seminorm {:.5} <= 1.01 G = {:.5}",
        n.frac_seminorm,
        1.01 * g
    ))
}

fn l2_rel(grid: &Grid, approx: &[f64], exact: &[f64], from: usize) -> f64 {
    let w = grid.trapezoid_weights();
    let (mut num, mut den) = (0.0, 0.0);
    for i in from..exact.len() {
        num += w[i] * (approx[i] - exact[i]).powi(2);
        den += w[i] * exact[i].powi(2);
    }
    (num / den).sqrt()
}

/// Relative L2 error of the left derivative of `t^k`.
fn power_rule_error(alpha: f64, k: f64, cells: usize) -> Result<f64, String> {
    let grid = Grid::new(1.0, cells).map_err(|e| e.to_string())?;
    let d = FracOperator::derivative(grid, alpha, Side::Left).map_err(|e| e.to_string())?;
    let f: Vec<f64> = grid.nodes().map(|t| t.powf(k)).collect();
    let c = gamma_fn(k + 1.0).unwrap() / gamma_fn(k + 1.0 - alpha).unwrap();
    let exact: Vec<f64> = grid.nodes().map(|t| c * t.powf(k - alpha)).collect();
    Ok(l2_rel(&grid, &d.apply_slice(&f), &exact, 0))
}

fn operator_oracles() -> Outcome {
    let start = Instant::now();
    let mut worst_err = 0.0f64;
    let mut worst_order = f64::INFINITY;
    for &alpha in &[0.4, 0.5, 0.7, 0.9] {
        for &k in &[2.0, 3.0] {
            let coarse = power_rule_error(alpha, k, 512)?;
            let fine = power_rule_error(alpha, k, 1024)?;
            worst_err = worst_err.max(fine);
            worst_order = worst_order.min((coarse / fine).log2());
        }
    }
    ensure(worst_err <= 1e-2, format!("power-rule error {worst_err:e}"))?;
    ensure(worst_order >= 1.0, format!("observed order {worst_order}"))?;

    let grid = Grid::new(1.0, 1024).unwrap();
    let mut int_err = 0.0f64;
    for &gamma in &[0.3, 0.5, 0.8] {
        let f = GridFunction::from_scalar(grid, 1, 0, |t| t * t);
        let c = 2.0 / gamma_fn(3.0 + gamma).unwrap();
        let exact: Vec<f64> = grid.nodes().map(|t| c * t.powf(2.0 + gamma)).collect();
        let got = frac_integral(&f, gamma, Side::Left).map_err(|e| e.to_string())?;
        int_err = int_err.max(l2_rel(&grid, got.values(), &exact, 0));
    }
    ensure(
        int_err <= 1e-2,
        format!("integral power-rule error {int_err:e}"),
    )?;

    let d1 = FracOperator::derivative(grid, 1.0, Side::Left).map_err(|e| e.to_string())?;
    let sq: Vec<f64> = grid.nodes().map(|t| t * t).collect();
    let two_t: Vec<f64> = grid.nodes().map(|t| 2.0 * t).collect();
    let classical = l2_rel(&grid, &d1.apply_slice(&sq), &two_t, 1);
    let s: Vec<f64> = grid.nodes().map(|t| (3.0 * t).sin()).collect();
    let c3: Vec<f64> = grid.nodes().map(|t| 3.0 * (3.0 * t).cos()).collect();
    let classical = classical.max(l2_rel(&grid, &d1.apply_slice(&s), &c3, 1));
    ensure(classical <= 1e-2, format!("alpha = 1 error {classical:e}"))?;
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(30),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "power-rule err {worst_err:.1e}, min order {worst_order:.2}, integral err {int_err:.1e}, alpha = 1 err {classical:.1e}, {elapsed:.2?}"
    ))
}

fn gradient_consistency() -> Outcome {
    let model = Model::new(benchmark_spec(), 128).map_err(|e| e.to_string())?;
    let lambda = 10.0;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for k in 0..50 {
        // amplitudes sweep through the cut-off band and beyond the radius δ = 1
        let amp = 0.05 + 1.5 * k as f64 / 49.0;
        let modes: Vec<f64> = (0..8).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let u = GridFunction::dirichlet_from_fn(model.grid, 2, |t, o| {
            o[0] = amp
                * (0..4)
                    .map(|j| modes[j] * ((j + 1) as f64 * PI * t).sin())
                    .sum::<f64>();
            o[1] = amp
                * (4..8)
                    .map(|j| modes[j] * ((j - 3) as f64 * PI * t).sin())
                    .sum::<f64>();
        });
        let mut v = GridFunction::zeros(model.grid, 2);
        for x in v.values_mut() {
            *x = rng.random::<f64>() * 2.0 - 1.0;
        }
        v.enforce_dirichlet();
        let g = energy_gradient(&model, &u, lambda).map_err(|e| e.to_string())?;
        let analytic = pairing(&g, &v).map_err(|e| e.to_string())?;
        let eps = 1e-6;
        let shifted = |s: f64| {
            let mut w = u.clone();
            w.axpy(s, &v).unwrap();
            energy(&model, &w, lambda, true).unwrap().total
        };
        let fd = (shifted(eps) - shifted(-eps)) / (2.0 * eps);
        worst = worst.max((analytic - fd).abs() / analytic.abs().max(fd.abs()));
    }
    ensure(worst <= 1e-6, format!("max relative error {worst:e}"))?;
    Ok(format!(
        "50 points, max relative directional error {worst:.1e}"
    ))
}

fn growth_properties() -> Outcome {
    let spec = benchmark_spec();
    let r = check_growth(spec.nl(), spec.t_len, spec.dim, 100_000, 7);
    let bad = r.extended_growth.violations + r.extended_superlinearity.violations;
    ensure(
        bad == 0
            && r.extended_growth.samples >= 100_000
            && r.extended_superlinearity.samples >= 100_000,
        format!("{bad} violations ({:?})", r),
    )?;
    Ok(format!(
        "{} samples of 0 <= F_bar <= M2|x|^q2, {} of theta F_bar <= (grad F_bar, x), 0 violations",
        r.extended_growth.samples, r.extended_superlinearity.samples
    ))
}

fn mountain_pass_solve() -> Outcome {
    let spec = benchmark_spec();
    let rep = compute_lambdas(&spec).map_err(|e| e.to_string())?;
    let lambda = 1e55;
    let cfg = MountainPassConfig {
        grid_m: 512,
        ..Default::default()
    };
    let start = Instant::now();
    let r = solve(&spec, lambda, &cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let d = d_lambda(&spec, lambda).unwrap();
    let upper = c_lambda_upper_from(&rep, LogReal::from_log10(55.0));
    let upper = upper.value.to_f64();
    let vp = r.norms.v_norm.powi(3);
    let bound = vnorm_pow_bound(&rep, LogReal::from_log10(55.0)).to_f64();
    ensure(
        r.residual <= 1e-8,
        format!("relative residual {:e}", r.residual),
    )?;
    ensure(
        r.c_lambda >= 0.95 * d && r.c_lambda <= 1.05 * upper,
        format!(
            "c_lambda {:e} outside [{:e}, {:e}]",
            r.c_lambda,
            0.95 * d,
            1.05 * upper
        ),
    )?;
    ensure(vp < bound, format!("||u||_V^3 = {vp:e} >= {bound:e}"))?;
    ensure(
        r.norms.sup_norm <= 0.5,
        format!("sup norm {}", r.norms.sup_norm),
    )?;
    ensure(!r.u.is_zero(), "trivial solution")?;
    ensure(
        elapsed < Duration::from_secs(300),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "residual {:.1e}, c_lambda {:.3e} in [{:.2e}, {:.2e}], ||u||_V^3 {:.2e} < {:.2e}, sup {:.2e}, {elapsed:.1?}",
        r.residual,
        r.c_lambda,
        0.95 * d,
        1.05 * upper,
        vp,
        bound,
        r.norms.sup_norm
    ))
}

fn decay_sweep() -> Outcome {
    let spec = benchmark_spec();
    let rep = compute_lambdas(&spec).map_err(|e| e.to_string())?;
    let cfg = MountainPassConfig::default();
    let table = sweep(&spec, &[55.0, 57.0, 59.0], &cfg).map_err(|e| e.to_string())?;
    for e in &table {
        ensure(
            e.is_ok(),
            format!("log10 lambda {}: {}", e.lambda_log10, e.status),
        )?;
        let bound = vnorm_pow_bound(&rep, LogReal::from_log10(e.lambda_log10)).to_f64();
        ensure(
            e.vnorm.powi(3) < bound,
            format!("log10 lambda {} above the bound line", e.lambda_log10),
        )?;
    }
    let (first, last) = (&table[0], &table[2]);
    ensure(last.vnorm < first.vnorm, "V-norm did not decrease")?;
    ensure(last.supnorm < first.supnorm, "sup-norm did not decrease")?;
    let verdict = kirchfrac::check_decay(&table);
    ensure(verdict.verdict == kirchfrac::Verdict::Pass, verdict.reason)?;
    Ok(format!(
        "||u||_V {:.3e} -> {:.3e} -> {:.3e}, sup {:.3e} -> {:.3e}, all below the bound line",
        table[0].vnorm, table[1].vnorm, table[2].vnorm, first.supnorm, last.supnorm
    ))
}

fn negative_controls() -> Outcome {
    let spec = benchmark_spec();
    let cfg = MountainPassConfig {
        grid_m: 128,
        ..Default::default()
    };
    match solve(&spec, 1.0, &cfg) {
        Err(Error::GeometryNotVerified {
            endpoint_energy, ..
        }) if endpoint_energy >= 0.0 => {}
        other => return Err(format!("lambda = 1 gave {:?}", other.map(|r| r.c_lambda))),
    }
    let mut bad = spec.clone();
    let NonlinearitySpec::Power(f) = &mut bad.nonlinearity;
    f.q2 = 9.0;
    let msg = match bad.validate() {
        Err(Error::InvalidSpec { hypothesis }) => hypothesis,
        other => return Err(format!("q2 = p^2 accepted: {other:?}")),
    };
    ensure(
        msg.contains("requires q2 in (p^2, q1)"),
        format!("unexpected message {msg}"),
    )?;

    let out = bin()
        .args(["solve", "--lambda-log10", "0", "--grid", "64"])
        .arg(example())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.code() == Some(EXIT_GEOMETRY),
        format!("lambda = 1 exit {:?}", out.status.code()),
    )?;
    ensure(out.stdout.is_empty(), "lambda = 1 produced a result")?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("bad.json");
    let text = std::fs::read_to_string(example())
        .unwrap()
        .replace("\"q2\": 10", "\"q2\": 9");
    std::fs::write(&path, text).unwrap();
    let out = bin()
        .arg("constants")
        .arg(&path)
        .output()
        .map_err(|e| e.to_string())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    ensure(
        out.status.code() == Some(EXIT_INVALID_SPEC) && stderr.contains("requires q2 in (p^2, q1)"),
        format!("q2 = 9 exit {:?}: {stderr}", out.status.code()),
    )?;
    Ok(format!("lambda = 1 -> geometry error (exit {EXIT_GEOMETRY}); q2 = 9 -> \"{msg}\" (exit {EXIT_INVALID_SPEC})"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let status = bin()
            .args([
                "solve",
                "--lambda-log10",
                "55",
                "--grid",
                "512",
                "--seed",
                "3",
                "--out",
            ])
            .arg(&path)
            .arg(example())
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), format!("solve exit {:?}", status.code()))?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.json")?, run("b.json")?);
    let ra = ResultFile::parse(std::str::from_utf8(&a).unwrap()).map_err(|e| e.to_string())?;
    let rb = ResultFile::parse(std::str::from_utf8(&b).unwrap()).map_err(|e| e.to_string())?;
    let bits = |r: &ResultFile| {
        r.result
            .u
            .values()
            .iter()
            .map(|x| x.to_bits())
            .collect::<Vec<_>>()
    };
    ensure(bits(&ra) == bits(&rb), "nodal arrays differ")?;
    ensure(a == b, "result files differ")?;
    Ok(format!(
        "{} nodal values bit-identical; result files byte-identical",
        ra.result.u.values().len()
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("constants reproduction", constants_reproduction),
        ("discrete vs analytic norms", discrete_norms),
        ("operator oracles", operator_oracles),
        ("gradient consistency", gradient_consistency),
        (
            "growth properties of the modified nonlinearity",
            growth_properties,
        ),
        ("mountain-pass solve at lambda = 1e55", mountain_pass_solve),
        ("decay sweep", decay_sweep),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
