use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::Outcome;
use crate::verify::{RegisterPartition, Role, TestParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Client,
    Server,
}

/// Classical traffic of one round, in step order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Message {
    /// Client → server.
    AnnounceParams {
        epsilon: f64,
        delta: f64,
        #[serde(rename = "Delta")]
        tolerance: f64,
    },
    /// Client → server: the X set, the Z set and the target.
    SetSelection { x_set: Vec<u64>, z_set: Vec<u64>, target: u64 },
    /// Server → client: one transmitted half.
    QubitSent { register_index: u64 },
    /// Either direction: one party's bit for a tested register.
    TestOutcome { register_index: u64, bit: Outcome, party: Party },
    /// Server → client: the σ_y readout.
    ReadoutOutcome { o: Outcome },
    /// Client → server.
    Abort,
}

impl Message {
    pub fn sender(&self) -> Party {
        match self {
            Message::AnnounceParams { .. } | Message::SetSelection { .. } | Message::Abort => Party::Client,
            Message::QubitSent { .. } | Message::ReadoutOutcome { .. } => Party::Server,
            Message::TestOutcome { party, .. } => *party,
        }
    }
}

fn violation(msg: impl Into<String>) -> Error {
    Error::Protocol(msg.into())
}

/// Checks that a recorded round follows the step order: parameters, the
/// selection, then every register in index order (tested registers carry
/// one server and one client bit), and finally either an abort or a
/// readout. Returns the number of failed tests seen on the wire.
pub fn validate_transcript(messages: &[Message], params: &TestParams) -> Result<u64> {
    let mut it = messages.iter().peekable();
    match it.next() {
        Some(Message::AnnounceParams { epsilon, delta, tolerance })
            if *epsilon == params.epsilon && *delta == params.delta && *tolerance == params.tolerance => {}
        other => return Err(violation(format!("expected the parameter announcement first, got {other:?}"))),
    }
    let roles = match it.next() {
        Some(Message::SetSelection { x_set, z_set, target }) => {
            let discarded = (0..4 * x_set.len() as u64)
                .filter(|i| !x_set.contains(i) && !z_set.contains(i) && i != target)
                .collect();
            let partition =
                RegisterPartition { x_set: x_set.clone(), z_set: z_set.clone(), target: *target, discarded };
            partition.validate()?;
            if partition.k() != params.k {
                return Err(violation("selection size does not match k"));
            }
            partition.roles()
        }
        other => return Err(violation(format!("expected the set selection, got {other:?}"))),
    };
    let mut n_fail = 0;
    for (index, role) in roles.iter().enumerate() {
        let index = index as u64;
        match it.next() {
            Some(Message::QubitSent { register_index }) if *register_index == index => {}
            other => return Err(violation(format!("expected qubit {index}, got {other:?}"))),
        }
        if matches!(role, Role::XTest | Role::ZTest) {
            let mut bits = [None, None];
            for _ in 0..2 {
                match it.next() {
                    Some(Message::TestOutcome { register_index, bit, party }) if *register_index == index => {
                        let slot = &mut bits[usize::from(*party == Party::Client)];
                        if slot.replace(*bit).is_some() {
                            return Err(violation(format!("duplicate test bit for register {index}")));
                        }
                    }
                    other => return Err(violation(format!("expected test bits for register {index}, got {other:?}"))),
                }
            }
            if bits[0] != bits[1] {
                n_fail += 1;
            }
        }
    }
    let accepted = params.accepts(n_fail);
    match (it.next(), accepted) {
        (Some(Message::Abort), false) | (Some(Message::ReadoutOutcome { .. }), true) => {}
        (other, _) => {
            return Err(violation(format!("round with {n_fail} failures ended with {other:?}")));
        }
    }
    if let Some(extra) = it.next() {
        return Err(violation(format!("trailing message {extra:?}")));
    }
    Ok(n_fail)
}
