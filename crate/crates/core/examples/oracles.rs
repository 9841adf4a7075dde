//! Closed-form limiting cycles against dynamic runs at very fast and very
//! slow driven strokes.

use qstirling::cycle::{run_cycle, EngineParameters};
use qstirling::thermo::{carnot_efficiency, ledger, limiting_cycles};

fn main() -> qstirling::Result<()> {
    let p = EngineParameters::default();
    let td = p.tau_d()?;
    let reports = limiting_cycles(&p.cycle(td, td)?)?;
    let speeds = [(20.0, 20.0), (0.01, 20.0), (20.0, 0.01), (0.01, 0.01)];
    println!("case  eta_closed  eta_dynamic  rel.dev");
    for (rep, (ab, cd)) in reports.iter().zip(speeds) {
        let run = run_cycle(&p.cycle(ab * td, cd * td)?)?;
        let dynamic = ledger(&run)?.bare.efficiency.unwrap_or(f64::NAN);
        let closed = rep.efficiency.unwrap_or(f64::NAN);
        println!("{:4}  {closed:.6}    {dynamic:.6}     {:.2e}", rep.case.as_str(), (dynamic - closed).abs() / closed);
    }
    println!("Carnot {:.3}", carnot_efficiency(p.beta_h, p.beta_c));
    Ok(())
}
