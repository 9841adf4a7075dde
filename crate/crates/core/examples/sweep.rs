//! Efficiency and power over a log sweep of stroke durations, in the
//! symmetric or one of the two asymmetric modes.
//!
//! `cargo run --release --example sweep -- fix-ab 13`

use qstirling::cli::sweep_rows;
use qstirling::config::RunConfig;
use qstirling::cycle::SweepMode;

fn main() -> qstirling::Result<()> {
    let mut args = std::env::args().skip(1);
    let mode = SweepMode::parse(&args.next().unwrap_or_else(|| "symmetric".into()))?;
    let mut cfg = RunConfig::default();
    if let Some(n) = args.next() {
        cfg.set("sweep_points", &n)?;
    }
    let td = cfg.engine().tau_d()?;
    let rows = sweep_rows(&cfg, mode)?;
    println!("mode {}", mode.as_str());
    println!("  tau_ab   tau_cd   eta_bare  eta_eff   P_bare");
    for r in &rows {
        match &r.outcome {
            Ok(p) => {
                let l = &p.ledger;
                println!(
                    "{:8.4} {:8.4}  {:.5}  {:.5}  {:.4e}",
                    r.tau_ab / td,
                    r.tau_cd / td,
                    l.bare.efficiency.unwrap_or(f64::NAN),
                    l.effective.efficiency.unwrap_or(f64::NAN),
                    l.bare.power
                );
            }
            Err(e) => println!("{:8.4} {:8.4}  failed: {e}", r.tau_ab / td, r.tau_cd / td),
        }
    }
    Ok(())
}
