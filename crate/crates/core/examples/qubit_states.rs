//! Exact one- and two-qubit states: Bloch vectors, Bell pairs, Ramsey
//! evolution, partial traces and sampled measurements.
//!
//! Run with `cargo run --example qubit_states`.

use qrs::qcore::{
    bell_state, bloch_from_density, born_probability, density_from_bloch, evolve_phase, fidelity_pure,
    measure_first_qubit, partial_trace, phi_plus, Axis, BlochVector, SensingField, Subsystem,
};
use qrs::rng::SeedStream;

fn main() -> qrs::Result<()> {
    let plus = density_from_bloch(BlochVector::new(1.0, 0.0, 0.0)?)?;
    let field = SensingField::new(0.05, 1.0)?;
    let evolved = evolve_phase(&plus, &field)?;
    let p = born_probability(&evolved, &Axis::Y.plus_projector())?;
    println!("|+> after omega t = {}: P(y = +1) = {p:.6} (expected {:.6})", field.phase(), (1.0 + 0.05f64.sin()) / 2.0);
    println!("Bloch vector after evolution: {:?}", bloch_from_density(&evolved)?);

    let phi = phi_plus();
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        println!("F(beta_{i}{j}, Phi+) = {:.3}", fidelity_pure(&bell_state(i, j)?, &phi)?);
    }
    let server_half = partial_trace(&phi, Subsystem::Second)?;
    println!("server half of Phi+: {:?}", bloch_from_density(&server_half)?);

    let mut rng = SeedStream::new(1).rng();
    for _ in 0..3 {
        let (bit, rest) = measure_first_qubit(&phi, Axis::X, &mut rng)?;
        println!("client sigma_x bit {} leaves the server qubit at {:?}", bit.bit(), bloch_from_density(&rest)?);
    }
    Ok(())
}
