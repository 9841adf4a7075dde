//! Property tests across modules: closed-form limiting cycles over random
//! parameters, configuration round trips, and invariants of finite-time
//! cycles at random stroke durations.

use proptest::prelude::*;

use qstirling::config::RunConfig;
use qstirling::cycle::{run_cycle, EngineParameters};
use qstirling::generator::markov_rates;
use qstirling::thermo::{carnot_efficiency, ledger, limiting_cycles, LimitCase};

fn engine(beta_h: f64, ratio: f64, omega_1: f64, gap: f64, delta_frac: f64) -> EngineParameters {
    EngineParameters {
        beta_h,
        beta_c: beta_h * ratio,
        omega_1,
        omega_2: omega_1 + gap,
        delta: delta_frac * omega_1 / 2.0,
        ..EngineParameters::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn limiting_cycles_close_and_respect_carnot(
        beta_h in 0.5..4.0f64,
        ratio in 1.2..5.0f64,
        omega_1 in 0.3..0.8f64,
        gap in 0.05..0.6f64,
        delta_frac in 0.05..0.9f64,
    ) {
        let p = engine(beta_h, ratio, omega_1, gap, delta_frac);
        let td = p.tau_d().unwrap();
        let reports = limiting_cycles(&p.cycle(td, td).unwrap()).unwrap();
        let carnot = carnot_efficiency(p.beta_h, p.beta_c);
        for r in &reports {
            let total: f64 = r.heat.iter().sum::<f64>() + r.work.iter().sum::<f64>();
            prop_assert!(total.abs() < 1e-12, "{}: {total}", r.case.as_str());
            if let Some(eta) = r.efficiency {
                prop_assert!(eta < carnot + 1e-12, "{}: {eta} vs {carnot}", r.case.as_str());
            }
            if r.case == LimitCase::FastFast {
                prop_assert_eq!(r.heat[0], 0.0);
                prop_assert_eq!(r.heat[2], 0.0);
            }
        }
    }

    #[test]
    fn markov_rates_obey_detailed_balance(omega in 0.05..2.0f64, beta in 0.2..8.0f64, f in 1.0..4.0f64) {
        let p = EngineParameters { beta_h: beta, f, ..EngineParameters::default() };
        let r = markov_rates(&p.hot().unwrap(), omega);
        let ratio = r.gamma_up / r.gamma_down;
        prop_assert!((ratio / (-beta * omega).exp() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn config_round_trips(
        beta_h in 0.1..10.0f64,
        f in 0.6..5.0f64,
        tau_ab in 1e-3..100.0f64,
        points in 1usize..100,
        g2 in any::<bool>(),
        rotating in any::<bool>(),
    ) {
        let mut c = RunConfig::default();
        c.set("beta_h", &beta_h.to_string()).unwrap();
        c.set("f", &f.to_string()).unwrap();
        c.set("tau_ab", &tau_ab.to_string()).unwrap();
        c.set("sweep_points", &points.to_string()).unwrap();
        c.set("coupling_set", if g2 { "g2" } else { "g1" }).unwrap();
        c.set("mode", if rotating { "rotating" } else { "full" }).unwrap();
        prop_assert_eq!(RunConfig::parse(&c.render()).unwrap(), c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn finite_time_cycles_are_clean_engines(ab in 0.05..3.0f64, cd in 0.05..3.0f64) {
        let p = EngineParameters::default();
        let td = p.tau_d().unwrap();
        let run = run_cycle(&p.cycle(ab * td, cd * td).unwrap()).unwrap();
        prop_assert!(run.hygiene.passes(), "{:?}", run.hygiene);
        prop_assert!(run.periodicity < 1e-3);
        for rec in &run.strokes {
            for s in &rec.samples {
                prop_assert!(s.polarization.abs() <= 0.5 + 1e-12);
            }
        }
        let l = ledger(&run).unwrap();
        prop_assert!(l.bare.first_law_residual < 1e-4 && l.effective.first_law_residual < 1e-4);
        let (bare, eff) = (l.bare.efficiency.unwrap(), l.effective.efficiency.unwrap());
        prop_assert!(bare < 0.6 && eff < 0.6);
        prop_assert!(eff > bare, "effective {eff} vs bare {bare}");
        prop_assert!(l.effective.w_extract > l.bare.w_extract);
    }
}
