//! Pauli noise on the transmitted half of each Bell pair, and which
//! stabilizer test each error trips.
//!
//! Run with `cargo run --example noise_channels`.

use qrs::noise::{apply_noise, NoiseSchedule, Pauli};
use qrs::qcore::{fidelity_pure, phi_plus};
use qrs::rng::SeedStream;

fn main() -> qrs::Result<()> {
    for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
        println!("{p:?}: fails X test {}, fails Z test {}", p.fails_x_test(), p.fails_z_test());
    }

    let schedules = [
        NoiseSchedule::Identity,
        NoiseSchedule::iid(0.02, 0.01, 0.03)?,
        NoiseSchedule::periodic(10, Pauli::X)?,
        NoiseSchedule::delta_matched(0.1, Pauli::Y)?,
        serde_json::from_str(r#"{"kind": "scripted", "ops": ["I", "X", "XZ", "Z"]}"#)?,
    ];
    let mut rng = SeedStream::new(2).rng();
    for s in &schedules {
        let hits: Vec<String> = (0..4)
            .map(|i| {
                let rho = apply_noise(&phi_plus(), i, s, &mut rng)?;
                Ok(format!("{:.0}", fidelity_pure(&rho, &phi_plus())?))
            })
            .collect::<qrs::Result<_>>()?;
        println!(
            "{} -> expected fail rate {:.4}, fidelities of registers 0..4: {}",
            serde_json::to_string(s)?,
            s.expected_fail_rate(),
            hits.join(" ")
        );
    }
    Ok(())
}
