//! One finite-time cycle: energy ledger of both Hamiltonian variants,
//! end-point distances and run diagnostics.

use qstirling::cycle::{distance_diagnostics, run_cycle, EngineParameters};
use qstirling::drive::Stroke;
use qstirling::thermo::{ledger, Variant};

fn main() -> qstirling::Result<()> {
    let tau: f64 = std::env::args().nth(1).map_or(Ok(0.2), |s| s.parse()).expect("tau in units of tau_D");
    let p = EngineParameters::default();
    let td = p.tau_d()?;
    let run = run_cycle(&p.cycle(tau * td, tau * td)?)?;
    let l = ledger(&run)?;

    println!("tau_ab = tau_cd = {tau} tau_D, period {:.2}", l.period);
    for v in [Variant::Bare, Variant::Effective] {
        let x = l.variant(v);
        println!("\n{}", v.as_str());
        for s in Stroke::ALL {
            println!("  {}  Q = {:+.6e}  W = {:+.6e}", s.label(), x.heat(s), x.work(s));
        }
        println!(
            "  W_extract {:.6e}  Q_h {:.6e}  eta {:.6}  P {:.4e}  first-law residual {:.1e}",
            x.w_extract,
            x.q_h,
            x.efficiency.unwrap_or(f64::NAN),
            x.power,
            x.first_law_residual
        );
    }
    let d = distance_diagnostics(&run);
    println!("\nS(b'|b*) {:.3e}  S(d'|d*) {:.3e}  S(b'|c) {:.3e}  S(d'|a) {:.3e}", d.b_to_b_star, d.d_to_d_star, d.b_to_c, d.d_to_a);
    println!("periodicity {:.1e}  thermalization gaps {:.1e} {:.1e}", run.periodicity, run.thermalization_gap[0], run.thermalization_gap[1]);
    println!("{:?}", run.hygiene);
    Ok(())
}
