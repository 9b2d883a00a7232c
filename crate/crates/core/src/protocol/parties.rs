use rand::Rng;

use super::messages::{Message, Party};
use crate::error::{Error, Result};
use crate::qcore::{evolve_phase, sample_outcome, Axis, DensityMatrix, Outcome, SensingField};
use crate::verify::{partition_registers, required_k, Role, TestEngine, TestParams, TestVerdict};

fn out_of_order(who: &str, phase: impl std::fmt::Debug, what: &str) -> Error {
    Error::Protocol(format!("{who} in phase {phase:?} cannot {what}"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClientPhase {
    Idle,
    Announced,
    /// Waiting for register `next`.
    Receiving { next: u64 },
    /// Holding register `index`, waiting to act on it.
    Handling { index: u64 },
    AllReceived,
    Accepted,
    Aborted,
    Done,
}

/// The client: owns the test bookkeeping and the private bit `s`.
#[derive(Debug)]
pub struct Client {
    params: TestParams,
    phase: ClientPhase,
    engine: Option<TestEngine>,
    s: Option<Outcome>,
    verdict: Option<TestVerdict>,
    sensing_bit: Option<Outcome>,
}

impl Client {
    pub fn new(params: TestParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params, phase: ClientPhase::Idle, engine: None, s: None, verdict: None, sensing_bit: None })
    }

    pub fn phase(&self) -> ClientPhase {
        self.phase
    }

    /// Announces the test parameters to the server.
    pub fn announce(&mut self) -> Result<Message> {
        if self.phase != ClientPhase::Idle {
            return Err(out_of_order("client", self.phase, "announce parameters"));
        }
        self.phase = ClientPhase::Announced;
        let p = &self.params;
        Ok(Message::AnnounceParams { epsilon: p.epsilon, delta: p.delta, tolerance: p.tolerance })
    }

    /// Partitions the registers into X tests, Z tests and the target, and announces it.
    pub fn select<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Message> {
        if self.phase != ClientPhase::Announced {
            return Err(out_of_order("client", self.phase, "select registers"));
        }
        let partition = partition_registers(self.params.k, rng)?;
        self.engine = Some(TestEngine::new(self.params, &partition)?);
        self.phase = ClientPhase::Receiving { next: 0 };
        Ok(Message::SetSelection { x_set: partition.x_set, z_set: partition.z_set, target: partition.target })
    }

    fn engine(&mut self) -> &mut TestEngine {
        self.engine.as_mut().expect("engine exists after selection")
    }

    /// A half arrives. Returns what to do with it.
    pub fn receive_qubit(&mut self, msg: &Message) -> Result<Role> {
        let ClientPhase::Receiving { next } = self.phase else {
            return Err(out_of_order("client", self.phase, "receive a qubit"));
        };
        match msg {
            Message::QubitSent { register_index } if *register_index == next => {
                self.phase = ClientPhase::Handling { index: next };
                self.engine().role(next)
            }
            other => Err(Error::Protocol(format!("client expected qubit {next}, got {other:?}"))),
        }
    }

    fn finish_register(&mut self, index: u64) {
        let next = index + 1;
        self.phase = if next == self.params.registers() {
            ClientPhase::AllReceived
        } else {
            ClientPhase::Receiving { next }
        };
    }

    fn handling(&self, what: &str) -> Result<u64> {
        match self.phase {
            ClientPhase::Handling { index } => Ok(index),
            phase => Err(out_of_order("client", phase, what)),
        }
    }

    /// Compares the client's own bit with the server's and
    /// answers with the client's bit.
    pub fn exchange_test(&mut self, own: Outcome, server_msg: &Message) -> Result<Message> {
        let index = self.handling("exchange test bits")?;
        let server_bit = match server_msg {
            Message::TestOutcome { register_index, bit, party: Party::Server } if *register_index == index => *bit,
            other => return Err(Error::Protocol(format!("client expected the server's bit for {index}, got {other:?}"))),
        };
        self.engine().record_test(index, own, server_bit)?;
        self.finish_register(index);
        Ok(Message::TestOutcome { register_index: index, bit: own, party: Party::Client })
    }

    /// `bit` is the σ_x readout of the client's half (1 for the
    /// +1 eigenvalue). `s` labels the σ_z correction relating the server's
    /// half to `|+⟩`, so `s = 0` for the +1 outcome. `state` is the
    /// pre-measurement register, kept only for simulation introspection.
    pub fn measure_target(&mut self, bit: Outcome, state: &DensityMatrix) -> Result<()> {
        let index = self.handling("measure the target")?;
        self.engine().hold_target(index, state)?;
        self.s = Some(bit.flipped());
        self.finish_register(index);
        Ok(())
    }

    /// Throws away an unused half. `state` is kept only for simulation introspection.
    pub fn discard(&mut self, state: &DensityMatrix) -> Result<()> {
        let index = self.handling("discard")?;
        self.engine().discard(index, state)?;
        self.finish_register(index);
        Ok(())
    }

    /// Returns `Some(Abort)` when the test failed.
    pub fn decide(&mut self) -> Result<Option<Message>> {
        if self.phase != ClientPhase::AllReceived {
            return Err(out_of_order("client", self.phase, "decide"));
        }
        let verdict = self.engine.take().expect("engine exists after selection").verdict()?;
        let accepted = verdict.accepted;
        self.verdict = Some(verdict);
        if accepted {
            self.phase = ClientPhase::Accepted;
            Ok(None)
        } else {
            self.phase = ClientPhase::Aborted;
            Ok(Some(Message::Abort))
        }
    }

    /// Takes the server readout and returns `s ⊕ o`.
    pub fn receive_readout(&mut self, msg: &Message) -> Result<Outcome> {
        if self.phase != ClientPhase::Accepted {
            return Err(out_of_order("client", self.phase, "receive a readout"));
        }
        let Message::ReadoutOutcome { o } = msg else {
            return Err(Error::Protocol(format!("client expected a readout, got {msg:?}")));
        };
        let s = self.s.ok_or_else(|| Error::Protocol("target was never measured".into()))?;
        let bit = s ^ *o;
        self.sensing_bit = Some(bit);
        self.phase = ClientPhase::Done;
        Ok(bit)
    }

    pub fn s(&self) -> Option<Outcome> {
        self.s
    }

    pub fn verdict(&self) -> Option<&TestVerdict> {
        self.verdict.as_ref()
    }

    pub(crate) fn into_verdict(self) -> Option<TestVerdict> {
        self.verdict
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ServerPhase {
    Idle,
    ParamsKnown,
    /// About to send register `next`.
    Sending { next: u64 },
    /// Register `index` is a test register awaiting the bit exchange.
    Testing { index: u64, own: Outcome },
    /// Register `index` was sent and needs no classical follow-up.
    Sent { index: u64 },
    AwaitDecision,
    Aborted,
    Done,
}

/// The honest server. It follows instructions and keeps only what it is
/// told plus its own measurement results.
#[derive(Debug)]
pub struct Server {
    phase: ServerPhase,
    k: u64,
    roles: Vec<Role>,
    stored: Option<DensityMatrix>,
    failures_seen: u64,
    o: Option<Outcome>,
}

impl Default for Server {
    fn default() -> Self {
        Self { phase: ServerPhase::Idle, k: 0, roles: Vec::new(), stored: None, failures_seen: 0, o: None }
    }
}

impl Server {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn phase(&self) -> ServerPhase {
        self.phase
    }

    /// Handles a client message.
    pub fn handle(&mut self, msg: &Message) -> Result<()> {
        match (self.phase, msg) {
            (ServerPhase::Idle, Message::AnnounceParams { epsilon, delta, tolerance }) => {
                // The register count follows from the parameters.
                self.k = required_k(*epsilon, *delta, *tolerance)?;
                self.phase = ServerPhase::ParamsKnown;
                Ok(())
            }
            (ServerPhase::ParamsKnown, Message::SetSelection { x_set, z_set, target }) => {
                if x_set.len() as u64 != self.k || z_set.len() as u64 != self.k {
                    return Err(Error::Protocol(format!(
                        "selection of size {} does not match k = {}",
                        x_set.len(),
                        self.k
                    )));
                }
                let mut roles = vec![Role::Discard; 4 * self.k as usize];
                for (set, role) in [(x_set, Role::XTest), (z_set, Role::ZTest)] {
                    for &i in set {
                        let slot = roles
                            .get_mut(i as usize)
                            .ok_or_else(|| Error::Protocol(format!("register {i} out of range")))?;
                        if *slot != Role::Discard {
                            return Err(Error::Protocol(format!("register {i} selected twice")));
                        }
                        *slot = role;
                    }
                }
                match roles.get_mut(*target as usize) {
                    Some(slot @ Role::Discard) => *slot = Role::Target,
                    _ => return Err(Error::Protocol(format!("invalid target register {target}"))),
                }
                self.roles = roles;
                self.phase = ServerPhase::Sending { next: 0 };
                Ok(())
            }
            (
                ServerPhase::Testing { index, own },
                Message::TestOutcome { register_index, bit, party: Party::Client },
            ) if *register_index == index => {
                if *bit != own {
                    self.failures_seen += 1;
                }
                self.advance(index);
                Ok(())
            }
            (ServerPhase::AwaitDecision, Message::Abort) => {
                self.phase = ServerPhase::Aborted;
                Ok(())
            }
            (phase, msg) => Err(Error::Protocol(format!("server in phase {phase:?} received {msg:?}"))),
        }
    }

    fn advance(&mut self, index: u64) {
        let next = index + 1;
        self.phase = if next == 4 * self.k { ServerPhase::AwaitDecision } else { ServerPhase::Sending { next } };
    }

    /// Sends the next half. Returns the message and the register's role.
    pub fn send_qubit(&mut self) -> Result<(Message, Role)> {
        // A register that needed no follow-up is closed when the next one goes out.
        if let ServerPhase::Sent { index } = self.phase {
            self.advance(index);
        }
        let ServerPhase::Sending { next } = self.phase else {
            return Err(out_of_order("server", self.phase, "send a qubit"));
        };
        let role = self.roles[next as usize];
        self.phase = ServerPhase::Sent { index: next };
        Ok((Message::QubitSent { register_index: next }, role))
    }

    /// The server's own bit for the register just sent.
    pub fn test_outcome(&mut self, own: Outcome) -> Result<Message> {
        let ServerPhase::Sent { index } = self.phase else {
            return Err(out_of_order("server", self.phase, "report a test bit"));
        };
        if !matches!(self.roles[index as usize], Role::XTest | Role::ZTest) {
            return Err(Error::Protocol(format!("register {index} is not a test register")));
        }
        self.phase = ServerPhase::Testing { index, own };
        Ok(Message::TestOutcome { register_index: index, bit: own, party: Party::Server })
    }

    /// Keeps its half of the target register.
    pub fn store_target(&mut self, state: DensityMatrix) -> Result<()> {
        match self.phase {
            ServerPhase::Sent { index } if self.roles[index as usize] == Role::Target => {
                self.stored = Some(state);
                Ok(())
            }
            phase => Err(out_of_order("server", phase, "store the target")),
        }
    }

    /// Closes the transmission phase once the last register has gone out.
    pub fn finish_transmission(&mut self) -> Result<()> {
        if let ServerPhase::Sent { index } = self.phase {
            self.advance(index);
        }
        if self.phase != ServerPhase::AwaitDecision {
            return Err(out_of_order("server", self.phase, "finish transmission"));
        }
        Ok(())
    }

    /// Ramsey readout of the stored half.
    pub fn sense<R: Rng + ?Sized>(&mut self, field: &SensingField, rng: &mut R) -> Result<Message> {
        if self.phase != ServerPhase::AwaitDecision {
            return Err(out_of_order("server", self.phase, "sense"));
        }
        let stored = self.stored.take().ok_or_else(|| Error::Protocol("no target stored".into()))?;
        let evolved = evolve_phase(&stored, field)?;
        let (o, _) = sample_outcome(&evolved, Axis::Y, rng)?;
        self.o = Some(o);
        self.phase = ServerPhase::Done;
        Ok(Message::ReadoutOutcome { o })
    }

    /// The server's half of the target before evolution, once stored.
    pub fn stored(&self) -> Option<&DensityMatrix> {
        self.stored.as_ref()
    }

    /// Failed tests the server can count from the bit exchange.
    pub fn failures_seen(&self) -> u64 {
        self.failures_seen
    }

    pub fn o(&self) -> Option<Outcome> {
        self.o
    }
}
