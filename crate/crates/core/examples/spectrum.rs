//! Coupling spectra of both baths and the derived time scales for the
//! four reference bath configurations.

use qstirling::bath::{coupling_spectrum, time_scales};
use qstirling::config::{CouplingSet, RunConfig};

fn main() -> qstirling::Result<()> {
    for set in [CouplingSet::G1, CouplingSet::G2] {
        for f in [2.0, 3.0] {
            let mut cfg = RunConfig::default();
            cfg.coupling_set = set;
            cfg.f = f;
            let e = cfg.engine();
            let (cold, hot) = (e.cold()?, e.hot()?);
            let mut kms = 0.0f64;
            for spec in [&cold, &hot] {
                for k in 0..1000 {
                    let w = 0.002 + 3.0 * k as f64 / 1000.0;
                    let d = coupling_spectrum(-w, spec) - (-spec.beta * w).exp() * coupling_spectrum(w, spec);
                    kms = kms.max(d.abs());
                }
            }
            let ts = time_scales(&hot)?;
            println!(
                "{set:?} f={f}: G_cold(w_r)={:.5e} G_hot(w_r)={:.5e} tau_R={:.3} tau_B={:.3} tau_C={:.3} KMS defect {kms:.1e}",
                coupling_spectrum(cfg.omega_r, &cold),
                coupling_spectrum(cfg.omega_r, &hot),
                ts.tau_r,
                ts.tau_b,
                ts.tau_c,
            );
        }
    }
    println!("\n  omega     G_cold       G_hot");
    let e = RunConfig::default().engine();
    let (cold, hot) = (e.cold()?, e.hot()?);
    for k in -4..=12 {
        let w = 0.1 * k as f64;
        println!("{w:7.2}  {:.5e}  {:.5e}", coupling_spectrum(w, &cold), coupling_spectrum(w, &hot));
    }
    Ok(())
}
