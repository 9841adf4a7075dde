//! Markovian generator at a fixed splitting: rotating-invariant state,
//! relaxation towards it, and the closed-form relaxation rate.

use qstirling::cycle::EngineParameters;
use qstirling::drive::{drive_coordinate, system_hamiltonian};
use qstirling::generator::{asymptotic_state, markov_rates, rotating_invariant_state, GeneratorMatrix, GeneratorMode};
use qstirling::qops::{eigenframe_at, gibbs_state, DensityMatrix};

fn main() -> qstirling::Result<()> {
    let hot = EngineParameters::default().hot()?;
    let omega = 0.6;
    let q = drive_coordinate(omega, 0.1)?;
    let h = system_hamiltonian(q, 0.1);
    let frame = eigenframe_at(q, 0.1)?;
    let rates = markov_rates(&hot, omega);
    let gen = GeneratorMatrix::build(&rates, &frame, &h, q, GeneratorMode::RotatingOnly);

    let inv = rotating_invariant_state(&rates, &frame)?;
    let gibbs = gibbs_state(&h, hot.beta)?;
    println!("gamma_down {:.5e} gamma_up {:.5e}", rates.gamma_down, rates.gamma_up);
    println!("invariant vs Gibbs trace distance {:.1e}", inv.trace_distance(&gibbs));
    println!("relaxation rate {:.5e}, gamma_up + gamma_down {:.5e}", gen.relaxation_rate(), rates.gamma_down + rates.gamma_up);

    let start = DensityMatrix::pure([1.0, 0.0]);
    for t in [0.0, 10.0, 40.0, 160.0] {
        let v = gen.exp(t).apply_state(&start);
        let rho = DensityMatrix::from_vector([v[1], v[2], v[3]]);
        println!("t={t:6.1}  distance to invariant {:.3e}", rho.trace_distance(&inv));
    }
    let asym = asymptotic_state(&gen, &start)?;
    println!("asymptotic vs invariant {:.1e}", asym.trace_distance(&inv));
    Ok(())
}
