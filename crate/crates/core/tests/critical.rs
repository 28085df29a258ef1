use unidisc::criterion::{bessel_sum_closed_form, dini_sum_closed_form, Decision, Mode};
use unidisc::critical::{
    solve_critical, threshold_consistency, CriticalId, CriticalOptions, Refinement,
};
use unidisc::par::Execution;
use unidisc::series::EvalOptions;
use unidisc::zeros::ZeroOptions;
use unidisc::Error;

fn solve(id: CriticalId, refinement: Refinement) -> f64 {
    let opts = CriticalOptions { refinement, ..CriticalOptions::default() };
    let p = solve_critical(id, &opts).unwrap();
    assert!(p.residual.abs() <= 1e-10, "{id:?} residual {:e}", p.residual);
    assert!(p.bracket.0 <= p.value && p.value <= p.bracket.1);
    assert!(p.bracket.1 - p.bracket.0 <= 2.0 * p.tol);
    p.value
}

#[test]
fn reference_values() {
    let cases = [
        (CriticalId::NuStar, -0.7745),
        (CriticalId::Nu0, -0.5623),
        (CriticalId::Nu1, -0.1438),
    ];
    for (id, want) in cases {
        let v = solve(id, Refinement::Bisection);
        assert!((v - want).abs() <= 5e-4, "{id:?}: {v}");
    }
}

#[test]
fn ordering_and_refinement_paths_agree() {
    let bis: Vec<f64> = CriticalId::ALL.iter().map(|&id| solve(id, Refinement::Bisection)).collect();
    let sec: Vec<f64> =
        CriticalId::ALL.iter().map(|&id| solve(id, Refinement::BisectionSecant)).collect();
    assert!(bis[0] < bis[1] && bis[1] < bis[2]);
    for (a, b) in bis.iter().zip(&sec) {
        assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
    }
}

#[test]
fn secant_path_uses_fewer_evaluations() {
    let count = |refinement| {
        solve_critical(CriticalId::Nu1, &CriticalOptions { refinement, ..CriticalOptions::default() })
            .unwrap()
            .evaluations
    };
    assert!(count(Refinement::BisectionSecant) < count(Refinement::Bisection));
}

#[test]
fn sequential_scan_gives_the_same_value() {
    let seq = CriticalOptions { exec: Execution::Sequential, ..CriticalOptions::default() };
    for id in CriticalId::ALL {
        let a = solve_critical(id, &seq).unwrap();
        let b = solve_critical(id, &CriticalOptions::default()).unwrap();
        assert_eq!(a.value, b.value);
    }
}

#[test]
fn closed_forms_equal_one_at_the_thresholds() {
    let e = EvalOptions::default();
    let nu0 = solve(CriticalId::Nu0, Refinement::Bisection);
    let nu1 = solve(CriticalId::Nu1, Refinement::Bisection);
    assert!((bessel_sum_closed_form(nu0, &e).unwrap() - 1.0).abs() <= 1e-8);
    assert!((dini_sum_closed_form(nu1, &e).unwrap() - 1.0).abs() <= 1e-6);
}

#[test]
fn threshold_flips_at_a_twentieth() {
    let o = ZeroOptions::default();
    let r = threshold_consistency(CriticalId::Nu0, 0.05, 100, &o).unwrap();
    assert_eq!(r.mode, Mode::StarlikeCtc);
    assert_eq!((r.above.decision, r.below.decision), (Decision::Holds, Decision::Fails));
    let r = threshold_consistency(CriticalId::Nu1, 0.05, 100, &o).unwrap();
    assert_eq!(r.mode, Mode::ConvexAllDerivatives);
    assert_eq!((r.above.decision, r.below.decision), (Decision::Holds, Decision::Fails));
}

#[test]
fn threshold_at_a_thousandth() {
    // either outcome is allowed at N = 100, but a reported flip must be the right one
    match threshold_consistency(CriticalId::Nu0, 1e-3, 100, &ZeroOptions::default()) {
        Ok(r) => assert_eq!((r.above.decision, r.below.decision), (Decision::Holds, Decision::Fails)),
        Err(Error::InsufficientN { n }) => assert_eq!(n, 100),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn tolerance_floor() {
    let opts = CriticalOptions { tol: 1e-13, ..CriticalOptions::default() };
    assert!(solve_critical(CriticalId::Nu0, &opts).is_ok());
    let opts = CriticalOptions { tol: 5e-14, ..CriticalOptions::default() };
    assert!(solve_critical(CriticalId::Nu0, &opts).is_err());
}
