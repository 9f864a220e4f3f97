//! Simulated classical bus and quantum channel.
//!
//! The classical bus is public but authenticated: every party reads all
//! records, Eve cannot publish. The quantum channel is lossless; "sending" a
//! qubit only moves custody, because entangled amplitudes cannot be split
//! between parties. An adversary attaches to the channel as an
//! [`InterceptHook`] and acts while a qubit is in transit, with access
//! restricted to that qubit plus ancillas of her own.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::statevec::{BellOutcome, Gate, Sign, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartyId {
    Alice,
    Bob,
    Charlie,
    Eve,
}

/// Kinds of classical records that appear in a transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RecordTag {
    ModeSwitch,
    Locations,
    Outcomes,
    BellResult,
    Abort,
}

/// One immutable entry of the public transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalRecord {
    pub seq: u64,
    pub sender: PartyId,
    pub tag: RecordTag,
    pub payload: Vec<i64>,
}

/// Append-only authenticated broadcast bus.
#[derive(Debug, Default, Clone)]
pub struct Bus {
    records: Vec<ClassicalRecord>,
}

impl Bus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Append a record. Only legitimate parties may publish.
    pub fn publish(&mut self, sender: PartyId, tag: RecordTag, payload: Vec<i64>) -> Result<u64> {
        if sender == PartyId::Eve {
            return Err(Error::UnauthenticatedSender { party: sender });
        }
        let seq = self.records.len() as u64;
        self.records.push(ClassicalRecord {
            seq,
            sender,
            tag,
            payload,
        });
        Ok(seq)
    }

    pub fn records(&self) -> &[ClassicalRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Transcript as a JSON array of `{seq, sender, tag, payload}` objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records).expect("records serialize")
    }
}

/// Which particle of a batched register a qubit plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QubitRole {
    /// Alice's message qubit, prepended for teleportation.
    Message,
    /// Travel qubit bound for Alice.
    TravelA,
    /// Travel qubit bound for Bob.
    TravelB,
    /// Charlie's home qubit.
    Home,
    /// Eve's k-th probe ancilla in this register.
    Probe(u8),
}

impl QubitRole {
    pub fn label(self) -> String {
        match self {
            QubitRole::Message => "m".into(),
            QubitRole::TravelA => "a".into(),
            QubitRole::TravelB => "b".into(),
            QubitRole::Home => "c".into(),
            QubitRole::Probe(k) => format!("e{k}"),
        }
    }
}

/// One batched register with its role layout and custody map.
///
/// Register order follows the subscript order m, a, b, c with probe
/// ancillas appended at the end, so ket transcriptions read left to right.
#[derive(Debug, Clone)]
pub struct Register {
    state: StateVector,
    layout: Vec<QubitRole>,
    custody: Vec<PartyId>,
    probe_targets: Vec<(QubitRole, QubitRole)>,
}

impl Register {
    pub fn new(state: StateVector, qubits: Vec<(QubitRole, PartyId)>) -> Result<Self> {
        if qubits.len() != state.num_qubits() {
            return Err(Error::DimensionMismatch {
                left: 1 << qubits.len(),
                right: state.dim(),
            });
        }
        let mut layout = Vec::with_capacity(qubits.len());
        let mut custody = Vec::with_capacity(qubits.len());
        for (role, holder) in qubits {
            if layout.contains(&role) {
                return Err(Error::UnknownRole {
                    role: format!("duplicate {}", role.label()),
                });
            }
            layout.push(role);
            custody.push(holder);
        }
        Ok(Register {
            state,
            layout,
            custody,
            probe_targets: Vec::new(),
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn num_qubits(&self) -> usize {
        self.layout.len()
    }

    pub fn roles(&self) -> impl Iterator<Item = (QubitRole, PartyId)> + '_ {
        self.layout.iter().copied().zip(self.custody.iter().copied())
    }

    pub fn index_of(&self, role: QubitRole) -> Result<usize> {
        self.layout
            .iter()
            .position(|&r| r == role)
            .ok_or(Error::UnknownRole { role: role.label() })
    }

    pub fn has_role(&self, role: QubitRole) -> bool {
        self.layout.contains(&role)
    }

    pub fn holder(&self, role: QubitRole) -> Result<PartyId> {
        Ok(self.custody[self.index_of(role)?])
    }

    fn ensure_holder(&self, party: PartyId, role: QubitRole) -> Result<usize> {
        let idx = self.index_of(role)?;
        if self.custody[idx] != party {
            return Err(Error::CustodyViolation { party });
        }
        Ok(idx)
    }

    /// Targets of Eve's probes, in adjoin order.
    pub fn probes(&self) -> &[(QubitRole, QubitRole)] {
        &self.probe_targets
    }

    /// Prepend a fresh qubit owned by `holder` (used for the message qubit;
    /// the new qubit becomes index 0).
    pub fn prepend_qubit(
        &mut self,
        qubit: StateVector,
        role: QubitRole,
        holder: PartyId,
    ) -> Result<()> {
        if self.layout.contains(&role) {
            return Err(Error::UnknownRole {
                role: format!("duplicate {}", role.label()),
            });
        }
        if qubit.num_qubits() != 1 {
            return Err(Error::RegisterSize {
                requested: qubit.num_qubits(),
                max: 1,
            });
        }
        self.state = qubit.tensor(&self.state)?;
        self.layout.insert(0, role);
        self.custody.insert(0, holder);
        Ok(())
    }

    /// Measure `role` in the computational basis as `party`.
    pub fn measure_bz(&mut self, party: PartyId, role: QubitRole, rng: &mut SimRng) -> Result<u8> {
        let idx = self.ensure_holder(party, role)?;
        self.state.measure_bz(idx, rng)
    }

    /// Measure `role` in the diagonal basis as `party`.
    pub fn measure_bx(
        &mut self,
        party: PartyId,
        role: QubitRole,
        rng: &mut SimRng,
    ) -> Result<Sign> {
        let idx = self.ensure_holder(party, role)?;
        self.state.measure_bx(idx, rng)
    }

    /// Joint Bell measurement, both qubits held by `party`.
    pub fn measure_bell(
        &mut self,
        party: PartyId,
        first: QubitRole,
        second: QubitRole,
        rng: &mut SimRng,
    ) -> Result<BellOutcome> {
        let i = self.ensure_holder(party, first)?;
        let j = self.ensure_holder(party, second)?;
        self.state.measure_bell(i, j, rng)
    }

    /// Apply a local Pauli/Hadamard to a qubit `party` holds.
    pub fn apply_local(&mut self, party: PartyId, role: QubitRole, gate: LocalGate) -> Result<()> {
        let idx = self.ensure_holder(party, role)?;
        let gate = match gate {
            LocalGate::X => Gate::X(idx),
            LocalGate::Z => Gate::Z(idx),
            LocalGate::H => Gate::H(idx),
        };
        self.state.apply_gate(gate)
    }

    /// Single-qubit state of `role`, if it is unentangled from the rest.
    pub fn extract_qubit(&self, role: QubitRole) -> Result<StateVector> {
        let idx = self.index_of(role)?;
        self.state.extract_single_qubit(idx)
    }
}

/// Gates a party may apply locally to its own qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalGate {
    X,
    Z,
    H,
}

/// Adversary access to one qubit in transit.
///
/// The API is the enforcement: a hook can measure the transit qubit, adjoin
/// `|0⟩` ancillas of its own, and entangle the transit qubit with those
/// ancillas. Nothing else in the register is reachable.
pub struct Transit<'a> {
    register: &'a mut Register,
    transit_role: QubitRole,
}

impl Transit<'_> {
    pub fn role(&self) -> QubitRole {
        self.transit_role
    }

    /// Measure the in-transit qubit in the computational basis and forward
    /// the collapsed eigenstate.
    pub fn measure_bz(&mut self, rng: &mut SimRng) -> Result<u8> {
        let idx = self.register.index_of(self.transit_role)?;
        self.register.state.measure_bz(idx, rng)
    }

    /// Measure the in-transit qubit in the diagonal basis and forward the
    /// collapsed eigenstate.
    pub fn measure_bx(&mut self, rng: &mut SimRng) -> Result<Sign> {
        let idx = self.register.index_of(self.transit_role)?;
        self.register.state.measure_bx(idx, rng)
    }

    /// Append a `|0⟩` ancilla owned by Eve; returns its role handle.
    pub fn adjoin_ancilla(&mut self) -> Result<QubitRole> {
        let next = self
            .register
            .layout
            .iter()
            .filter(|r| matches!(r, QubitRole::Probe(_)))
            .count() as u8;
        let role = QubitRole::Probe(next);
        let zero = StateVector::new_register(1)?;
        self.register.state = self.register.state.tensor(&zero)?;
        self.register.layout.push(role);
        self.register.custody.push(PartyId::Eve);
        self.register
            .probe_targets
            .push((role, self.transit_role));
        Ok(role)
    }

    /// CNOT with the transit qubit as control and one of Eve's ancillas as
    /// target.
    pub fn cnot_onto(&mut self, ancilla: QubitRole) -> Result<()> {
        let target = self.register.ensure_holder(PartyId::Eve, ancilla)?;
        let control = self.register.index_of(self.transit_role)?;
        self.register
            .state
            .apply_gate(Gate::Cnot { control, target })
    }
}

/// Adversary callback run on each qubit passing through a tapped channel.
pub trait InterceptHook {
    fn name(&self) -> &'static str;
    fn on_transit(&self, transit: &mut Transit<'_>, rng: &mut SimRng) -> Result<()>;
}

/// The quantum channel; hooks are keyed by the receiving party's link.
#[derive(Default)]
pub struct QuantumChannel {
    hooks: Vec<(PartyId, Box<dyn InterceptHook>)>,
}

impl QuantumChannel {
    pub fn clean() -> Self {
        Self::default()
    }

    /// Tap the link that delivers qubits to `to`.
    pub fn install_hook(&mut self, to: PartyId, hook: Box<dyn InterceptHook>) {
        self.hooks.push((to, hook));
    }

    fn hook_for(&self, to: PartyId) -> Option<&dyn InterceptHook> {
        self.hooks
            .iter()
            .find(|(party, _)| *party == to)
            .map(|(_, hook)| hook.as_ref())
    }

    pub fn is_clean(&self) -> bool {
        self.hooks.is_empty()
    }
}

/// Transfer custody of `role` from `from` to `to`, running any installed
/// hook while the qubit is in transit. Without a hook the global state is
/// untouched; the transfer is bookkeeping only.
pub fn send_qubit(
    channel: &QuantumChannel,
    register: &mut Register,
    role: QubitRole,
    from: PartyId,
    to: PartyId,
    rng: &mut SimRng,
) -> Result<()> {
    register.ensure_holder(from, role)?;
    if let Some(hook) = channel.hook_for(to) {
        let mut transit = Transit {
            register,
            transit_role: role,
        };
        hook.on_transit(&mut transit, rng)?;
    }
    let idx = register.index_of(role)?;
    register.custody[idx] = to;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::states::w_state;

    fn fresh_triple() -> Register {
        Register::new(
            w_state(),
            vec![
                (QubitRole::TravelA, PartyId::Charlie),
                (QubitRole::TravelB, PartyId::Charlie),
                (QubitRole::Home, PartyId::Charlie),
            ],
        )
        .unwrap()
    }

    #[test]
    fn publish_appends_with_monotone_sequence() {
        let mut bus = Bus::new();
        let s0 = bus
            .publish(PartyId::Charlie, RecordTag::Locations, vec![2, 5, 7])
            .unwrap();
        let s1 = bus
            .publish(PartyId::Alice, RecordTag::Outcomes, vec![2, 1])
            .unwrap();
        assert_eq!((s0, s1), (0, 1));
        assert_eq!(bus.records().len(), 2);
        assert_eq!(bus.records()[0].payload, vec![2, 5, 7]);
    }

    #[test]
    fn eve_cannot_publish() {
        let mut bus = Bus::new();
        assert!(matches!(
            bus.publish(PartyId::Eve, RecordTag::Outcomes, vec![0]),
            Err(Error::UnauthenticatedSender { .. })
        ));
    }

    #[test]
    fn transcript_serializes_to_flat_records() {
        let mut bus = Bus::new();
        bus.publish(PartyId::Charlie, RecordTag::ModeSwitch, vec![1])
            .unwrap();
        let json: serde_json::Value = serde_json::from_str(&bus.to_json()).unwrap();
        assert_eq!(json[0]["seq"], 0);
        assert_eq!(json[0]["sender"], "charlie");
        assert_eq!(json[0]["tag"], "mode-switch");
        assert_eq!(json[0]["payload"][0], 1);
    }

    #[test]
    fn send_qubit_moves_custody_only() {
        let mut reg = fresh_triple();
        let channel = QuantumChannel::clean();
        let mut rng = seeded(2);
        let before = reg.state().clone();

        send_qubit(
            &channel,
            &mut reg,
            QubitRole::TravelA,
            PartyId::Charlie,
            PartyId::Alice,
            &mut rng,
        )
        .unwrap();
        assert_eq!(reg.holder(QubitRole::TravelA).unwrap(), PartyId::Alice);
        assert_eq!(reg.holder(QubitRole::Home).unwrap(), PartyId::Charlie);
        assert!(reg
            .state()
            .equal_up_to_global_phase(&before, 1e-12)
            .unwrap());
        // Amplitudes are literally untouched, not merely phase-equal.
        for (x, y) in reg.state().amplitudes().iter().zip(before.amplitudes()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn send_requires_custody() {
        let mut reg = fresh_triple();
        let channel = QuantumChannel::clean();
        let mut rng = seeded(3);
        assert!(matches!(
            send_qubit(
                &channel,
                &mut reg,
                QubitRole::TravelA,
                PartyId::Alice,
                PartyId::Bob,
                &mut rng,
            ),
            Err(Error::CustodyViolation { .. })
        ));
    }

    struct BzTap;
    impl InterceptHook for BzTap {
        fn name(&self) -> &'static str {
            "bz-tap"
        }
        fn on_transit(&self, transit: &mut Transit<'_>, rng: &mut SimRng) -> Result<()> {
            transit.measure_bz(rng)?;
            Ok(())
        }
    }

    #[test]
    fn hook_runs_during_transit_and_only_there() {
        let mut reg = fresh_triple();
        let mut channel = QuantumChannel::clean();
        channel.install_hook(PartyId::Alice, Box::new(BzTap));
        let mut rng = seeded(5);

        send_qubit(
            &channel,
            &mut reg,
            QubitRole::TravelA,
            PartyId::Charlie,
            PartyId::Alice,
            &mut rng,
        )
        .unwrap();
        // Qubit a collapsed: P(a) is now 0 or 1 exactly.
        let idx = reg.index_of(QubitRole::TravelA).unwrap();
        let p = reg.state().bz_probabilities(idx).unwrap();
        assert!(p[0].min(p[1]) < 1e-12);

        // The Bob-bound link is untapped.
        let before = reg.state().clone();
        send_qubit(
            &channel,
            &mut reg,
            QubitRole::TravelB,
            PartyId::Charlie,
            PartyId::Bob,
            &mut rng,
        )
        .unwrap();
        for (x, y) in reg.state().amplitudes().iter().zip(before.amplitudes()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn custody_multiset_is_conserved() {
        let mut reg = fresh_triple();
        let channel = QuantumChannel::clean();
        let mut rng = seeded(7);
        let roles_before: Vec<_> = reg.roles().map(|(r, _)| r).collect();
        send_qubit(
            &channel,
            &mut reg,
            QubitRole::TravelB,
            PartyId::Charlie,
            PartyId::Bob,
            &mut rng,
        )
        .unwrap();
        let roles_after: Vec<_> = reg.roles().map(|(r, _)| r).collect();
        assert_eq!(roles_before, roles_after);
    }

    #[test]
    fn measurement_requires_custody() {
        let mut reg = fresh_triple();
        let mut rng = seeded(11);
        assert!(reg
            .measure_bz(PartyId::Alice, QubitRole::TravelA, &mut rng)
            .is_err());
        assert!(reg
            .measure_bz(PartyId::Charlie, QubitRole::Home, &mut rng)
            .is_ok());
    }
}
