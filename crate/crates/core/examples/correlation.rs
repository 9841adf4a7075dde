//! Bath correlation function by frequency quadrature, compared with the
//! residue expansion used inside the memory kernels, and its envelope decay.

use qstirling::bath::{correlation_function, envelope_decay_time, time_scales, ResidueExpansion};
use qstirling::cycle::EngineParameters;

fn main() -> qstirling::Result<()> {
    let hot = EngineParameters::default().hot()?;
    let ts = time_scales(&hot)?;
    let table = correlation_function(&hot, 0.05, 12.0 * ts.tau_c)?;
    let exp = ResidueExpansion::new(&hot, 0.05)?;

    println!("     t        Re quad       Im quad      |quad - residue|");
    for k in [1usize, 20, 50, 100, 200, 400, 800] {
        let t = k as f64 * table.dt;
        if t > table.t_max() {
            break;
        }
        let q = table.values[k];
        let r = exp.phi(t)?;
        println!("{t:7.2}  {:+.6e}  {:+.6e}  {:.2e}", q.re, q.im, (q - r).norm());
    }
    let fit = envelope_decay_time(&table, 2.0 * ts.tau_b, 10.0 * ts.tau_c);
    println!("\ntau_C from poles {:.3}, from envelope fit {:?}", ts.tau_c, fit);
    Ok(())
}
