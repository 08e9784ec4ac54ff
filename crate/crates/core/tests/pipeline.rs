use num_complex::Complex64;
use proptest::prelude::*;

use lctk_core::algebra::{parse_param_poly, rational, Binding, ParamPoly};
use lctk_core::circuits::{
    netlist_tf, parse_netlist, realize_compensator, realize_controller, CompensatorKind, ComponentValues,
    ControllerKind, Realization,
};
use lctk_core::exec::Execution;
use lctk_core::lti::{simulate, transfer_function, Input, LtiError, OdeSystem};
use lctk_core::margins::{bode_sweep, SweepRange};

fn p(s: &str) -> ParamPoly {
    parse_param_poly(s).unwrap()
}

#[test]
fn pid_netlist_matches_behavioral_ode() {
    let behav = OdeSystem::improper(
        vec![ParamPoly::zero(), p("R1*C2")],
        vec![p("-1"), p("-(R2*C2 + R1*C1)"), p("-R1*R2*C1*C2")],
    )
    .unwrap();
    assert!(!behav.is_proper());
    let net = realize_controller(ControllerKind::PID, &ComponentValues::default()).unwrap();
    let (tf, _) = netlist_tf(&net).unwrap();
    assert!(tf.equals(&transfer_function(&behav)), "{tf}");
}

#[test]
fn improper_system_has_no_realization() {
    let sys = OdeSystem::improper(vec![ParamPoly::int(1)], vec![ParamPoly::zero(), ParamPoly::int(1)]).unwrap();
    let err = simulate(&sys, &Binding::default(), &Input::Step, 0.01, 1.0).unwrap_err();
    assert!(matches!(err, LtiError::OrderMismatch { m: 1, n: 0 }));
    assert!(OdeSystem::new(sys.alpha().to_vec(), sys.beta().to_vec()).is_err());
}

#[test]
fn every_realization_replays_and_reparses() {
    let values = ComponentValues::default();
    let mut nets: Vec<_> = [
        ControllerKind::P,
        ControllerKind::I,
        ControllerKind::D,
        ControllerKind::PI,
        ControllerKind::PD,
        ControllerKind::PID,
    ]
    .into_iter()
    .map(|k| realize_controller(k, &values).unwrap())
    .collect();
    for kind in [CompensatorKind::Lag, CompensatorKind::Lead, CompensatorKind::LagLead] {
        for how in [Realization::Active, Realization::Passive] {
            if let Ok(net) = realize_compensator(kind, how, &values) {
                nets.push(net);
            }
        }
    }
    for net in nets {
        let (tf, trace) = netlist_tf(&net).unwrap();
        assert!(trace.replay().unwrap().equals(&tf), "{net}");
        let again = parse_netlist(&net.to_string()).unwrap();
        assert!(netlist_tf(&again).unwrap().0.equals(&tf), "{net}");
    }
}

#[test]
fn sequential_and_parallel_sweeps_agree() {
    let tf = lctk_core::ufss::ufss_pitch_tf(&lctk_core::ufss::UfssParams::numeric(
        rational::int(2),
        rational::int(3),
    ));
    let range = SweepRange::new(1e-2, 1e2, 50).unwrap();
    let b = Binding::default();
    let seq = bode_sweep(&tf, &b, &range, Execution::Sequential).unwrap();
    let par = bode_sweep(&tf, &b, &range, Execution::Parallel).unwrap();
    assert_eq!(seq.to_csv(), par.to_csv());
}

fn values(r1: i64, c1: i64, r2: i64, c2: i64) -> ComponentValues {
    ComponentValues {
        r1: ParamPoly::int(r1),
        c1: ParamPoly::constant(rational::frac(1, c1)),
        r2: ParamPoly::int(r2),
        c2: ParamPoly::constant(rational::frac(1, c2)),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Multiplying every resistance by k and dividing every capacitance by k
    // keeps all RC products, hence the transfer function.
    #[test]
    fn impedance_scaling_is_invisible(r1 in 1i64..50, c1 in 1i64..50, r2 in 1i64..50, c2 in 1i64..50, k in 2i64..9, kind in 0usize..6) {
        let kind = [ControllerKind::P, ControllerKind::I, ControllerKind::D, ControllerKind::PI, ControllerKind::PD, ControllerKind::PID][kind];
        let base = netlist_tf(&realize_controller(kind, &values(r1, c1, r2, c2)).unwrap()).unwrap().0;
        let scaled = netlist_tf(&realize_controller(kind, &values(r1 * k, c1 * k, r2 * k, c2 * k)).unwrap()).unwrap().0;
        prop_assert!(base.equals(&scaled), "{} vs {}", base, scaled);
    }

    #[test]
    fn ode_json_round_trips(alpha in prop::collection::vec(-20i64..20, 1..8), beta in prop::collection::vec(-20i64..20, 0..8)) {
        prop_assume!(alpha.iter().any(|&a| a != 0));
        let n = alpha.iter().rposition(|&a| a != 0).unwrap();
        let beta: Vec<i64> = beta.into_iter().take(n + 1).collect();
        let sys = OdeSystem::from_ints(&alpha, &beta).unwrap();
        let back = OdeSystem::from_json_str(&sys.to_json().to_string()).unwrap();
        prop_assert!(transfer_function(&back).equals(&transfer_function(&sys)));
    }

    // H(jw) from the exact transfer function equals the state-space
    // realization's response.
    #[test]
    fn realization_reproduces_frequency_response(alpha in prop::collection::vec(1i64..9, 2..6), beta in prop::collection::vec(-9i64..9, 1..3), w in 0.01f64..100.0) {
        let sys = OdeSystem::from_ints(&alpha, &beta).unwrap();
        let b = Binding::default();
        let s = Complex64::new(0.0, w);
        let exact = transfer_function(&sys).eval(&b, s).unwrap();
        let ss = lctk_core::lti::state_space(&sys, &b).unwrap().eval(s).unwrap();
        prop_assert!((exact - ss).norm() <= 1e-9 * (1.0 + exact.norm()), "{} vs {}", exact, ss);
    }
}
