//! Time-dependent decay rates and Lamb shifts along a slow and a fast cycle,
//! next to the Markovian rates `2πG(±ω)`.

use qstirling::cycle::{run_cycle, EngineParameters};
use qstirling::drive::Stroke;
use qstirling::generator::markov_rates;

fn main() -> qstirling::Result<()> {
    let p = EngineParameters::default();
    let td = p.tau_d()?;
    for tau in [0.1, 20.0] {
        let cfg = p.cycle(tau * td, tau * td)?;
        let run = run_cycle(&cfg)?;
        println!("tau_ab = tau_cd = {tau} tau_D");
        println!("  stroke  frac   omega    gamma_down   2piG(w)      gamma_up     delta_r      delta_cr");
        for s in [Stroke::Ab, Stroke::Cd] {
            let rec = run.stroke(s);
            let spec = cfg.bath(s.bath());
            let n = rec.samples.len() - 1;
            for frac in [0.1, 0.5, 0.9] {
                let x = &rec.samples[(frac * n as f64) as usize];
                let m = markov_rates(spec, x.omega);
                let r = &x.rates;
                println!(
                    "  {:6}  {frac:.1}  {:.4}  {:+.4e}  {:+.4e}  {:+.4e}  {:+.4e}  {:+.4e}",
                    s.label(),
                    x.omega,
                    r.gamma_down,
                    m.gamma_down,
                    r.gamma_up,
                    r.delta_r,
                    r.delta_cr
                );
            }
        }
    }
    Ok(())
}
