use proptest::prelude::*;

use kirchfrac::cli_io::{ResultFile, SpecFile};
use kirchfrac::grid_frac::LANCZOS_COEFFS;
use kirchfrac::nonlinearity::PowerFamily;
use kirchfrac::verify::check_bounds;
use kirchfrac::{
    benchmark_spec, compute_lambdas, solve, sweep, MountainPassConfig, NonlinearitySpec, Potential,
    ProblemSpec,
};

fn cfg(m: usize) -> MountainPassConfig {
    MountainPassConfig {
        grid_m: m,
        ..Default::default()
    }
}

#[test]
fn single_entry_sweep_matches_solve() {
    let spec = benchmark_spec();
    let r = solve(&spec, 1e56, &cfg(64)).unwrap();
    let t = sweep(&spec, &[56.0], &cfg(64)).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t[0].vnorm, r.norms.v_norm);
    assert_eq!(t[0].c_lambda, r.c_lambda);
    assert_eq!(t[0].residual, r.residual);
}

#[test]
fn verdicts_replay_from_result_file() {
    let spec = benchmark_spec();
    let r = solve(&spec, 1e55, &cfg(128)).unwrap();
    let rep = compute_lambdas(&spec).unwrap();
    let file = ResultFile::new(SpecFile::from_problem(&spec, cfg(128)), rep, r, true);
    let back = ResultFile::parse(&file.to_json()).unwrap();
    let replayed = check_bounds(
        &back.result,
        &back.spec.problem().unwrap(),
        &back.constants,
        0.05,
    )
    .unwrap();
    assert_eq!(Some(replayed), file.result.bounds);
}

#[test]
fn level_is_stable_under_grid_refinement() {
    let spec = benchmark_spec();
    let coarse = solve(&spec, 1e55, &cfg(256)).unwrap();
    let fine = solve(&spec, 1e55, &cfg(512)).unwrap();
    let change = (fine.c_lambda - coarse.c_lambda).abs() / fine.c_lambda;
    assert!(change <= 0.02, "c_lambda changed by {change}");
}

#[test]
fn solution_stays_inside_the_unmodified_region() {
    let spec = benchmark_spec();
    let r = solve(&spec, 1e55, &cfg(128)).unwrap();
    let model = kirchfrac::Model::new(spec, 128).unwrap();
    let modified = kirchfrac::energy::energy(&model, &r.u, 1e55, true).unwrap();
    let original = kirchfrac::energy::energy(&model, &r.u, 1e55, false).unwrap();
    assert_eq!(modified.total, original.total);
}

#[test]
fn corrupted_gamma_table_is_caught() {
    let mut bad = LANCZOS_COEFFS;
    bad[1] += 1e-3;
    let reports = kirchfrac::cli_io::run_selftest(&bad);
    let gamma = reports.iter().find(|r| r.name == "gamma").unwrap();
    assert!(!gamma.pass, "{}", gamma.detail);
}

fn arb_spec() -> impl Strategy<Value = ProblemSpec> {
    (
        0.1f64..5.0,
        0.1f64..5.0,
        prop_oneof![Just(2u32), Just(3u32)],
        0.0f64..1.0,
        0.5f64..3.0,
        1usize..4,
        prop::collection::vec(0.0f64..4.0, 1..4),
    )
        .prop_map(|(a, b, p, af, t_len, dim, mut coeffs)| {
            let pf = p as f64;
            coeffs[0] += 0.5;
            let q1 = pf * pf + 3.0;
            ProblemSpec {
                a,
                b,
                p,
                alpha: 1.0 / pf + af * (1.0 - 1.0 / pf) * 0.999 + 1e-3,
                t_len,
                dim,
                potential: Potential::Poly { coeffs },
                nonlinearity: NonlinearitySpec::Power(PowerFamily {
                    c0: 1.0,
                    c1: 1.0,
                    r: q1 - 1.0,
                    delta: 1.0,
                    q1,
                    q2: pf * pf + 1.0,
                    m1: 1.0,
                    m2: 2.0,
                    beta: pf * pf + 1.0,
                }),
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_files_round_trip(spec in arb_spec(), seed in any::<u64>(), l in prop::option::of(-5.0f64..80.0)) {
        let mut file = SpecFile::from_problem(&spec, MountainPassConfig { seed, ..Default::default() });
        file.lambda_log10 = l;
        let back = SpecFile::parse(&file.to_json()).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(back.problem().ok(), file.problem().ok());
    }
}
