//! One round of the two-party protocol with its classical transcript, and
//! what each party gets to see.
//!
//! Run with `cargo run --example protocol_round`.

use qrs::noise::NoiseSchedule;
use qrs::protocol::{run_round_with, validate_transcript, Message, RoundOptions};
use qrs::qcore::SensingField;
use qrs::rng::SeedStream;
use qrs::verify::TestParams;

fn main() -> qrs::Result<()> {
    let params = TestParams::from_resources(7, 1.0, 0.0)?;
    let field = SensingField::new(0.05, 1.0)?;
    let noise = NoiseSchedule::iid(0.02, 0.0, 0.02)?;
    let mut rng = SeedStream::new(4).rng();
    let round = run_round_with(&params, &noise, &field, &mut rng, RoundOptions { record_transcript: true })?;

    let transcript = round.transcript.as_deref().unwrap_or_default();
    for m in transcript.iter().filter(|m| !matches!(m, Message::QubitSent { .. })) {
        println!("{:?} -> {}", m.sender(), serde_json::to_string(m)?);
    }
    println!("failed tests on the wire: {}", validate_transcript(transcript, &params)?);
    println!("client view: s = {:?}, o = {:?}, s xor o = {:?}", round.s, round.o, round.sensing_bit);
    let mut view = round.server_view();
    view.transcript = None;
    println!("server view: {}", serde_json::to_string(&view)?);
    Ok(())
}
