//! Closed evolution along a driven stroke: unitarity of the RK4 grid,
//! agreement with the matrix exponential for a frozen Hamiltonian, and the
//! fourth-order step convergence.

use qstirling::drive::{system_hamiltonian, Direction, DriveProtocol};
use qstirling::propagator::{evolve_unitaries, expm_hermitian, unitarity_defect};

fn main() -> qstirling::Result<()> {
    let proto = DriveProtocol::new(0.49, 0.78, 0.1, Direction::Compress, 40.0)?;
    let mut last = None;
    for dt in [0.2, 0.1, 0.05, 0.025] {
        let g = evolve_unitaries(&proto, dt)?;
        let u = g.u[g.len() - 1];
        let defect = g.u.iter().map(unitarity_defect).fold(0.0, f64::max);
        let change = last.map_or("-".to_string(), |p: qstirling::qops::Mat2| format!("{:.2e}", (u - p).max_abs()));
        println!("dt={dt:<6} nodes={:<5} max unitarity defect {defect:.2e} change vs 2dt {change}", g.len());
        last = Some(u);
    }

    let frozen = DriveProtocol::new(0.6, 0.6, 0.1, Direction::Hold, 25.0)?;
    let g = evolve_unitaries(&frozen, 0.05)?;
    let h = system_hamiltonian(frozen.hamiltonian_at(0.0)?.q, 0.1);
    let exact = expm_hermitian(&h, 25.0);
    println!("\nconstant H: |U_rk4 - exp(-iHt)| = {:.2e}", (g.u[g.len() - 1] - exact).max_abs());
    Ok(())
}
