//! Supervised entanglement-sharing session: preparation, distribution,
//! detecting mode, check decision, and assisted distillation.
//!
//! Each tripartite state lives in its own small register (one triple plus,
//! later, a message qubit and any probe ancillas). States never entangle
//! across triples, so batching per triple is exact rather than approximate.

use rand::Rng;

use crate::channels::{
    send_qubit, Bus, ClassicalRecord, PartyId, QuantumChannel, QubitRole, RecordTag, Register,
};
use crate::error::{Error, Result};
use crate::rng::{seeded, SimRng};
use crate::states::{initial_state, InitialStateKind};

/// Parameters of one entanglement-sharing session.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SessionConfig {
    /// Number of initial tripartite states Charlie prepares.
    pub sequence_length: usize,
    /// Probability that a triple is sacrificed in detecting mode.
    pub check_fraction: f64,
    pub initial_state: InitialStateKind,
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sequence_length == 0 {
            return Err(Error::InvalidConfig("sequence_length must be positive".into()));
        }
        if !self.check_fraction.is_finite()
            || self.check_fraction <= 0.0
            || self.check_fraction >= 1.0
        {
            return Err(Error::InvalidConfig(format!(
                "check_fraction {} outside (0, 1); checking cannot be disabled",
                self.check_fraction
            )));
        }
        let expected_checks = self.check_fraction * self.sequence_length as f64;
        if expected_checks < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "expected checks {expected_checks:.3} < 1; grow sequence_length or check_fraction"
            )));
        }
        Ok(())
    }
}

/// Lifecycle of one batched triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleStatus {
    /// Distributed, unmeasured, available.
    Distributed,
    /// Sacrificed in detecting mode.
    Checked,
    /// Distillation kept it; the (a, b) pair is in the pool.
    Pooled,
    /// Distillation measured the home qubit as 1; pair discarded.
    Discarded,
    /// A teleportation or under-table decode used it up.
    Consumed,
}

/// One tripartite state with its register and bookkeeping.
#[derive(Debug, Clone)]
pub struct Triple {
    pub register: Register,
    pub status: TripleStatus,
    /// Detecting-mode outcomes in subscript order (a, b, c), once checked.
    pub check_outcomes: Option<[u8; 3]>,
}

/// Pool of successfully distilled pairs, consumed in order.
#[derive(Debug, Default, Clone)]
pub struct EntanglementPool {
    pairs: Vec<usize>,
    next: usize,
}

impl EntanglementPool {
    pub fn push(&mut self, triple_index: usize) {
        self.pairs.push(triple_index);
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn available(&self) -> usize {
        self.pairs.len() - self.next
    }

    pub fn indices(&self) -> &[usize] {
        &self.pairs
    }

    /// Next unconsumed pair handle.
    pub fn take_next(&mut self) -> Option<usize> {
        let idx = self.pairs.get(self.next).copied();
        if idx.is_some() {
            self.next += 1;
        }
        idx
    }
}

/// Outcome-pattern test of one checked triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckResult {
    Pass,
    Fail,
}

/// Pattern test on detecting-mode outcomes (a, b, c).
///
/// The ideal W state always shows exactly one 1 across the three
/// computational outcomes; the even-parity variant always shows an even
/// number of 1s. These are the strongest tests available from the published
/// outcomes alone.
pub fn check_triple(outcomes: [u8; 3], kind: InitialStateKind) -> CheckResult {
    let weight = outcomes.iter().filter(|&&b| b != 0).count();
    let pass = match kind {
        InitialStateKind::W => weight == 1,
        InitialStateKind::Xi => weight % 2 == 0,
    };
    if pass {
        CheckResult::Pass
    } else {
        CheckResult::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Abort,
}

/// Zero-tolerance check decision: any failed triple aborts the session.
pub fn decide(results: &[CheckResult]) -> Decision {
    if results.contains(&CheckResult::Fail) {
        Decision::Abort
    } else {
        Decision::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Completed,
    Aborted,
}

/// Ordered public records plus the final verdict.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SessionTranscript {
    pub records: Vec<ClassicalRecord>,
    pub verdict: Verdict,
}

/// Mode codes carried by mode-switch records.
pub const MODE_TRANSMISSION: i64 = 0;
pub const MODE_DETECTING: i64 = 1;

/// One full protocol run: state distribution through distillation.
pub struct Session {
    pub config: SessionConfig,
    pub triples: Vec<Triple>,
    pub bus: Bus,
    pub pool: EntanglementPool,
    verdict: Option<Verdict>,
    channel: QuantumChannel,
    pub(crate) rng: SimRng,
}

impl Session {
    pub fn new(config: SessionConfig) -> Result<Self> {
        Self::with_channel(config, QuantumChannel::clean())
    }

    /// Session over a possibly tapped quantum channel.
    pub fn with_channel(config: SessionConfig, channel: QuantumChannel) -> Result<Self> {
        config.validate()?;
        let rng = seeded(config.seed);
        Ok(Session {
            config,
            triples: Vec::new(),
            bus: Bus::new(),
            pool: EntanglementPool::default(),
            verdict: None,
            channel,
            rng,
        })
    }

    pub fn verdict(&self) -> Option<Verdict> {
        self.verdict
    }

    pub fn transcript(&self) -> SessionTranscript {
        SessionTranscript {
            records: self.bus.records().to_vec(),
            verdict: self.verdict.unwrap_or(Verdict::Completed),
        }
    }

    /// S.0–S.1: Charlie prepares the sequence, keeps the home qubits and
    /// sends each travel qubit through the (hookable) quantum channel.
    pub fn prepare_and_distribute(&mut self) -> Result<()> {
        let kind = self.config.initial_state;
        for _ in 0..self.config.sequence_length {
            let mut register = Register::new(
                initial_state(kind),
                vec![
                    (QubitRole::TravelA, PartyId::Charlie),
                    (QubitRole::TravelB, PartyId::Charlie),
                    (QubitRole::Home, PartyId::Charlie),
                ],
            )?;
            send_qubit(
                &self.channel,
                &mut register,
                QubitRole::TravelA,
                PartyId::Charlie,
                PartyId::Alice,
                &mut self.rng,
            )?;
            send_qubit(
                &self.channel,
                &mut register,
                QubitRole::TravelB,
                PartyId::Charlie,
                PartyId::Bob,
                &mut self.rng,
            )?;
            self.triples.push(Triple {
                register,
                status: TripleStatus::Distributed,
                check_outcomes: None,
            });
        }
        Ok(())
    }

    /// One detecting round on triple `index`: Charlie, then Alice, then Bob
    /// measure in the computational basis and publish. Returns outcomes in
    /// subscript order (a, b, c).
    pub fn detecting_round(&mut self, index: usize) -> Result<[u8; 3]> {
        let triple = self
            .triples
            .get_mut(index)
            .ok_or(Error::TripleConsumed { index })?;
        if triple.status != TripleStatus::Distributed {
            return Err(Error::TripleConsumed { index });
        }
        let c = triple
            .register
            .measure_bz(PartyId::Charlie, QubitRole::Home, &mut self.rng)?;
        self.bus.publish(
            PartyId::Charlie,
            RecordTag::Outcomes,
            vec![index as i64, c as i64],
        )?;
        let a = triple
            .register
            .measure_bz(PartyId::Alice, QubitRole::TravelA, &mut self.rng)?;
        self.bus.publish(
            PartyId::Alice,
            RecordTag::Outcomes,
            vec![index as i64, a as i64],
        )?;
        let b = triple
            .register
            .measure_bz(PartyId::Bob, QubitRole::TravelB, &mut self.rng)?;
        self.bus.publish(
            PartyId::Bob,
            RecordTag::Outcomes,
            vec![index as i64, b as i64],
        )?;
        let outcomes = [a, b, c];
        triple.status = TripleStatus::Checked;
        triple.check_outcomes = Some(outcomes);
        Ok(outcomes)
    }

    /// S.2: Charlie announces detecting mode, selects triples independently
    /// with probability `check_fraction`, publishes their locations and runs
    /// the rounds. At least one triple is always checked.
    pub fn run_detecting_mode(&mut self) -> Result<Vec<CheckResult>> {
        self.bus.publish(
            PartyId::Charlie,
            RecordTag::ModeSwitch,
            vec![MODE_DETECTING],
        )?;
        let mut selected: Vec<usize> = (0..self.triples.len())
            .filter(|_| self.rng.gen::<f64>() < self.config.check_fraction)
            .collect();
        if selected.is_empty() {
            // The decision step needs at least one check round.
            selected.push(self.rng.gen_range(0..self.triples.len()));
        }
        self.bus.publish(
            PartyId::Charlie,
            RecordTag::Locations,
            selected.iter().map(|&i| i as i64).collect(),
        )?;
        let kind = self.config.initial_state;
        let mut results = Vec::with_capacity(selected.len());
        for index in selected {
            let outcomes = self.detecting_round(index)?;
            results.push(check_triple(outcomes, kind));
        }
        Ok(results)
    }

    /// S.3: zero-tolerance comparison. Aborting publishes an abort record;
    /// continuing switches back to transmission mode.
    pub fn decide_and_publish(&mut self, results: &[CheckResult]) -> Result<Decision> {
        let decision = decide(results);
        match decision {
            Decision::Abort => {
                self.bus.publish(PartyId::Charlie, RecordTag::Abort, vec![])?;
                self.verdict = Some(Verdict::Aborted);
            }
            Decision::Continue => {
                self.bus.publish(
                    PartyId::Charlie,
                    RecordTag::ModeSwitch,
                    vec![MODE_TRANSMISSION],
                )?;
            }
        }
        Ok(decision)
    }

    /// S.4–S.5: Charlie measures every remaining home qubit, publishes the
    /// locations that came out 0, and those (a, b) pairs enter the pool.
    pub fn distill(&mut self) -> Result<()> {
        if self.verdict == Some(Verdict::Aborted) {
            return Err(Error::InvalidConfig("session already aborted".into()));
        }
        let mut kept = Vec::new();
        for index in 0..self.triples.len() {
            if self.triples[index].status != TripleStatus::Distributed {
                continue;
            }
            let outcome = self.triples[index].register.measure_bz(
                PartyId::Charlie,
                QubitRole::Home,
                &mut self.rng,
            )?;
            if outcome == 0 {
                self.triples[index].status = TripleStatus::Pooled;
                self.pool.push(index);
                kept.push(index as i64);
            } else {
                self.triples[index].status = TripleStatus::Discarded;
            }
        }
        self.bus
            .publish(PartyId::Charlie, RecordTag::Locations, kept)?;
        Ok(())
    }

    /// S.0 through S.5 composed; stops early on abort.
    pub fn run_entanglement_sharing(&mut self) -> Result<Verdict> {
        self.prepare_and_distribute()?;
        let results = self.run_detecting_mode()?;
        if self.decide_and_publish(&results)? == Decision::Abort {
            return Ok(Verdict::Aborted);
        }
        self.distill()?;
        self.verdict = Some(Verdict::Completed);
        Ok(Verdict::Completed)
    }

    /// S.0 through S.3 only: distribution and checks, no distillation.
    /// This is the state the under-table attack operates from.
    pub fn run_checks_without_distillation(&mut self) -> Result<Decision> {
        self.prepare_and_distribute()?;
        let results = self.run_detecting_mode()?;
        let decision = self.decide_and_publish(&results)?;
        if decision == Decision::Continue {
            self.verdict = Some(Verdict::Completed);
        }
        Ok(decision)
    }

    pub fn checked_count(&self) -> usize {
        self.triples
            .iter()
            .filter(|t| t.status == TripleStatus::Checked)
            .count()
    }

    pub fn check_failures(&self) -> usize {
        self.triples
            .iter()
            .filter_map(|t| t.check_outcomes)
            .filter(|&o| check_triple(o, self.config.initial_state) == CheckResult::Fail)
            .count()
    }

    /// Triples that survived detecting mode (distillation candidates).
    pub fn remaining_after_checks(&self) -> usize {
        self.triples
            .iter()
            .filter(|t| t.status != TripleStatus::Checked)
            .count()
    }
}
