use rand::Rng;
use serde::Serialize;

use super::messages::Message;
use super::parties::{Client, Server};
use crate::error::{Error, Result};
use crate::noise::{apply_noise, NoiseSchedule};
use crate::qcore::{measure_first_qubit, pauli_pair_measure, phi_plus, Axis, Outcome, SensingField};
use crate::verify::{Role, TestParams, TestVerdict};

/// One repetition of the protocol.
#[derive(Clone, Debug, Serialize)]
pub struct RoundRecord {
    /// Index of the repetition slot within the run.
    pub round: u64,
    /// Attempt number within the slot (non-zero only under a retry policy).
    pub attempt: u32,
    pub verdict: TestVerdict,
    /// The client's private outcome; `None` only if the target was never measured.
    pub s: Option<Outcome>,
    pub o: Option<Outcome>,
    pub sensing_bit: Option<Outcome>,
    pub aborted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<Message>>,
}

/// What the server can see of a round: everything except `s` and `s ⊕ o`.
#[derive(Clone, Debug, Serialize)]
pub struct ServerView {
    pub round: u64,
    pub attempt: u32,
    /// Failed tests, countable from the bit exchange.
    pub n_fail: u64,
    pub aborted: bool,
    pub o: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript: Option<Vec<Message>>,
}

impl RoundRecord {
    pub fn server_view(&self) -> ServerView {
        ServerView {
            round: self.round,
            attempt: self.attempt,
            n_fail: self.verdict.n_fail,
            aborted: self.aborted,
            o: self.o,
            transcript: self.transcript.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundOptions {
    pub record_transcript: bool,
}

/// Steps 1 to 10 with the quantum plane simulated exactly. Registers are
/// created lazily, one per transmitted half, so memory stays `O(k)`.
pub fn run_round<R: Rng + ?Sized>(
    params: &TestParams,
    sched: &NoiseSchedule,
    field: &SensingField,
    rng: &mut R,
) -> Result<RoundRecord> {
    run_round_with(params, sched, field, rng, RoundOptions::default())
}

pub fn run_round_with<R: Rng + ?Sized>(
    params: &TestParams,
    sched: &NoiseSchedule,
    field: &SensingField,
    rng: &mut R,
    options: RoundOptions,
) -> Result<RoundRecord> {
    field.validate()?;
    sched.validate()?;
    let mut log = options.record_transcript.then(Vec::new);
    let mut note = |m: &Message| {
        if let Some(log) = log.as_mut() {
            log.push(m.clone());
        }
    };

    let mut client = Client::new(*params)?;
    let mut server = Server::new();

    let msg = client.announce()?;
    note(&msg);
    server.handle(&msg)?;
    let msg = client.select(rng)?;
    note(&msg);
    server.handle(&msg)?;

    let bell = phi_plus();
    for index in 0..params.registers() {
        let (msg, role) = server.send_qubit()?;
        note(&msg);
        let client_role = client.receive_qubit(&msg)?;
        if client_role != role {
            return Err(Error::Protocol(format!("parties disagree on the role of register {index}")));
        }
        let register = apply_noise(&bell, index, sched, rng)?;
        match role {
            Role::XTest | Role::ZTest => {
                let axis = if role == Role::XTest { Axis::X } else { Axis::Z };
                let (c, s) = pauli_pair_measure(&register, axis, rng)?;
                let to_client = server.test_outcome(s)?;
                note(&to_client);
                let to_server = client.exchange_test(c, &to_client)?;
                note(&to_server);
                server.handle(&to_server)?;
            }
            Role::Target => {
                let (bit, server_half) = measure_first_qubit(&register, Axis::X, rng)?;
                client.measure_target(bit, &register)?;
                server.store_target(server_half)?;
            }
            Role::Discard => client.discard(&register)?,
        }
    }
    server.finish_transmission()?;

    let (o, sensing_bit, aborted) = match client.decide()? {
        Some(abort) => {
            note(&abort);
            server.handle(&abort)?;
            (None, None, true)
        }
        None => {
            let readout = server.sense(field, rng)?;
            note(&readout);
            let bit = client.receive_readout(&readout)?;
            (server.o(), Some(bit), false)
        }
    };
    let s = client.s();
    let verdict = client.into_verdict().ok_or_else(|| Error::Protocol("round ended without a verdict".into()))?;
    Ok(RoundRecord { round: 0, attempt: 0, verdict, s, o, sensing_bit, aborted, transcript: log })
}
