//! Full protocol runs: the client decodes s xor o into an estimate of the
//! field, while a server holding only its readouts learns nothing.
//!
//! Run with `cargo run --release --example remote_sensing`.

use qrs::bounds::standard_uncertainty;
use qrs::noise::NoiseSchedule;
use qrs::protocol::{client_estimate, marginal_server_estimate, run_protocol};
use qrs::qcore::SensingField;
use qrs::rng::SeedStream;
use qrs::verify::TestParams;

fn main() -> qrs::Result<()> {
    let params = TestParams::from_resources(7, 1.0, 0.0)?;
    let m = 2_000;
    let root = SeedStream::new(5);
    let mut sq = 0.0;
    let runs = 20;
    for omega in [0.0, 0.05, 0.2] {
        let field = SensingField::new(omega, 1.0)?;
        let run = run_protocol(m, &params, &NoiseSchedule::Identity, &field, &mut root.named(&omega.to_string()).rng())?;
        let view = run.server_view();
        println!(
            "omega = {omega:<4}: client estimate {:+.4}, server P(o=1) = {:.4}, marginal server estimate: {}",
            client_estimate(&run)?,
            view.frequency()?,
            match marginal_server_estimate(&view) {
                Ok(v) => format!("{v:.4}"),
                Err(e) => e.to_string(),
            }
        );
    }
    let field = SensingField::new(0.05, 1.0)?;
    for i in 0..runs {
        let run = run_protocol(m, &params, &NoiseSchedule::Identity, &field, &mut root.child(i).rng())?;
        sq += (client_estimate(&run)? - field.omega).powi(2);
    }
    println!(
        "client RMS over {runs} runs of M = {m}: {:.4} (standard limit {:.4})",
        (sq / runs as f64).sqrt(),
        standard_uncertainty(m, field.t)?
    );
    Ok(())
}
