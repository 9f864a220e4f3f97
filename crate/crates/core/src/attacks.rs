//! Adversary models.
//!
//! Channel adversaries install as [`InterceptHook`]s and touch travel qubits
//! in transit: intercept-resend measures and forwards the collapsed state,
//! the entangle-probe adjoins a CNOT-copied ancilla and reads it later. The
//! out-of-control attack is different in kind: Alice and Bob themselves
//! decode teleported bits from the published Bell results and Bob's local
//! diagonal readout, without the supervisor's distillation measurements.

use serde::{Deserialize, Serialize};

use crate::channels::{InterceptHook, PartyId, QubitRole, RecordTag, Transit};
use crate::error::{Error, Result};
use crate::protocol::{Session, TripleStatus};
use crate::rng::SimRng;
use crate::states::{encode_message_qubit, MessageBit};
use crate::statevec::{BellOutcome, Sign};

/// Which adversary a scenario runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    InterceptResendBz,
    InterceptResendBx,
    EntangleProbe,
    OcaXi,
    OcaW,
}

impl AttackKind {
    pub fn is_channel_attack(self) -> bool {
        matches!(
            self,
            AttackKind::InterceptResendBz | AttackKind::InterceptResendBx | AttackKind::EntangleProbe
        )
    }

    pub fn is_oca(self) -> bool {
        matches!(self, AttackKind::OcaXi | AttackKind::OcaW)
    }
}

/// Measurement basis an intercept-resend adversary uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Bz,
    Bx,
}

/// Eve measures the in-transit qubit and forwards the collapsed eigenstate.
pub struct InterceptResend {
    basis: Basis,
}

impl InterceptHook for InterceptResend {
    fn name(&self) -> &'static str {
        match self.basis {
            Basis::Bz => "intercept-resend-bz",
            Basis::Bx => "intercept-resend-bx",
        }
    }

    fn on_transit(&self, transit: &mut Transit<'_>, rng: &mut SimRng) -> Result<()> {
        match self.basis {
            Basis::Bz => {
                transit.measure_bz(rng)?;
            }
            Basis::Bx => {
                transit.measure_bx(rng)?;
            }
        }
        Ok(())
    }
}

pub fn intercept_resend(basis: Basis) -> Box<dyn InterceptHook> {
    Box::new(InterceptResend { basis })
}

/// Eve adjoins a `|0⟩` ancilla and CNOTs the transit qubit onto it, reading
/// the ancilla in the computational basis once the transcript is over.
pub struct EntangleProbe;

impl InterceptHook for EntangleProbe {
    fn name(&self) -> &'static str {
        "entangle-probe"
    }

    fn on_transit(&self, transit: &mut Transit<'_>, _rng: &mut SimRng) -> Result<()> {
        let ancilla = transit.adjoin_ancilla()?;
        transit.cnot_onto(ancilla)
    }
}

pub fn entangle_probe() -> Box<dyn InterceptHook> {
    Box::new(EntangleProbe)
}

/// After a session, Eve measures every probe ancilla attached to a checked
/// triple and compares with the owner's published outcome for the probed
/// travel qubit. Returns (matches, compared).
pub fn probe_correlation(session: &mut Session) -> Result<(usize, usize)> {
    let mut matches = 0;
    let mut compared = 0;
    for index in 0..session.triples.len() {
        let Some(outcomes) = session.triples[index].check_outcomes else {
            continue;
        };
        let probes: Vec<(QubitRole, QubitRole)> =
            session.triples[index].register.probes().to_vec();
        for (probe, target) in probes {
            let published = match target {
                QubitRole::TravelA => outcomes[0],
                QubitRole::TravelB => outcomes[1],
                _ => continue,
            };
            let eve_bit = session.triples[index].register.measure_bz(
                PartyId::Eve,
                probe,
                &mut session.rng,
            )?;
            compared += 1;
            if eve_bit == published {
                matches += 1;
            }
        }
    }
    Ok((matches, compared))
}

/// Decode table for the under-table scheme: a bit for each of the eight
/// (Bell result, diagonal sign) combinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OcaDecodeRule {
    bits: [MessageBit; 8],
}

impl OcaDecodeRule {
    fn slot(bell: BellOutcome, sign: Sign) -> usize {
        bell.code() as usize * 2
            + match sign {
                Sign::Plus => 0,
                Sign::Minus => 1,
            }
    }

    /// The published correlation table: same-sign Bell results (φ+, ψ+)
    /// with `+` read 1, opposite-sign results (φ−, ψ−) with `−` read 1,
    /// and the mirror combinations read 0.
    pub fn correlation_table() -> Self {
        let mut bits = [0u8; 8];
        for bell in BellOutcome::ALL {
            for sign in [Sign::Plus, Sign::Minus] {
                let flip = matches!(bell, BellOutcome::PhiMinus | BellOutcome::PsiMinus);
                let one = match (flip, sign) {
                    (false, Sign::Plus) | (true, Sign::Minus) => 1,
                    _ => 0,
                };
                bits[Self::slot(bell, sign)] = one;
            }
        }
        OcaDecodeRule { bits }
    }

    /// One of the 256 possible decode tables, for exhaustive search.
    pub fn from_index(index: u8) -> Self {
        let mut bits = [0u8; 8];
        for (k, bit) in bits.iter_mut().enumerate() {
            *bit = (index >> k) & 1;
        }
        OcaDecodeRule { bits }
    }

    /// Total lookup over all eight combinations.
    pub fn decode(&self, bell: BellOutcome, sign: Sign) -> MessageBit {
        self.bits[Self::slot(bell, sign)]
    }
}

/// Under-table decode statistics for one message.
#[derive(Debug, Clone, Default)]
pub struct OcaRun {
    pub sent: Vec<MessageBit>,
    pub bell_outcomes: Vec<BellOutcome>,
    pub signs: Vec<Sign>,
    pub decoded: Vec<MessageBit>,
    pub triples_consumed: usize,
}

impl OcaRun {
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

/// Run the out-of-control attack over a session whose checks have passed
/// but whose distillation never happened: for each bit Alice encodes,
/// Bell-measures (m, a) against a raw triple and publishes; Bob reads b in
/// the diagonal basis and applies `rule`. The home qubits stay unmeasured.
pub fn run_oca_session(
    session: &mut Session,
    bits: &[MessageBit],
    rule: &OcaDecodeRule,
) -> Result<OcaRun> {
    let available = session
        .triples
        .iter()
        .filter(|t| t.status == TripleStatus::Distributed)
        .count();
    if available < bits.len() {
        return Err(Error::PoolExhausted {
            needed: bits.len(),
            available,
        });
    }
    let mut run = OcaRun {
        sent: bits.to_vec(),
        ..Default::default()
    };
    let mut cursor = 0usize;
    for &bit in bits {
        let index = (cursor..session.triples.len())
            .find(|&i| session.triples[i].status == TripleStatus::Distributed)
            .ok_or(Error::PoolExhausted {
                needed: bits.len(),
                available: 0,
            })?;
        cursor = index + 1;
        let triple = &mut session.triples[index];
        triple.status = TripleStatus::Consumed;
        triple
            .register
            .prepend_qubit(encode_message_qubit(bit), QubitRole::Message, PartyId::Alice)?;
        let bell = triple.register.measure_bell(
            PartyId::Alice,
            QubitRole::Message,
            QubitRole::TravelA,
            &mut session.rng,
        )?;
        session
            .bus
            .publish(PartyId::Alice, RecordTag::BellResult, vec![bell.code()])?;
        let sign =
            triple
                .register
                .measure_bx(PartyId::Bob, QubitRole::TravelB, &mut session.rng)?;
        run.bell_outcomes.push(bell);
        run.signs.push(sign);
        run.decoded.push(rule.decode(bell, sign));
        run.triples_consumed += 1;
    }
    Ok(run)
}

/// Exact joint distribution of (Bell result, Bob's sign) for one encoded
/// bit sent through the under-table scheme, obtained by enumerating the
/// projection branches of `|M⟩ ⊗ initial` with the home qubit untouched.
pub fn oca_branch_distribution(
    initial: &crate::statevec::StateVector,
    bit: MessageBit,
) -> Result<[[f64; 2]; 4]> {
    let joint = encode_message_qubit(bit).tensor(initial)?;
    let mut table = [[0.0; 2]; 4];
    for (bi, bell) in BellOutcome::ALL.into_iter().enumerate() {
        let (p_bell, collapsed) = match joint.project_bell(0, 1, bell) {
            Ok(x) => x,
            Err(Error::ImpossibleOutcome) => continue,
            Err(e) => return Err(e),
        };
        // Qubit b sits at index 2 of (m, a, b, c).
        let signs = collapsed.bx_probabilities(2)?;
        table[bi][0] = p_bell * signs[0];
        table[bi][1] = p_bell * signs[1];
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::QuantumChannel;
    use crate::protocol::{Decision, SessionConfig, Verdict};
    use crate::qsdc::run_qsdc;
    use crate::rng::seeded;
    use crate::states::{w_state, xi_state, InitialStateKind};
    use crate::statevec::{StateVector, NORM_TOL};
    use rand::Rng;

    fn config(kind: InitialStateKind, len: usize, seed: u64) -> SessionConfig {
        SessionConfig {
            sequence_length: len,
            check_fraction: 0.5,
            initial_state: kind,
            seed,
        }
    }

    fn tapped_channel(kind: AttackKind) -> QuantumChannel {
        let mut channel = QuantumChannel::clean();
        let hook = match kind {
            AttackKind::InterceptResendBz => intercept_resend(Basis::Bz),
            AttackKind::InterceptResendBx => intercept_resend(Basis::Bx),
            AttackKind::EntangleProbe => entangle_probe(),
            _ => panic!("not a channel attack"),
        };
        channel.install_hook(PartyId::Alice, hook);
        channel
    }

    /// Exact oracle for the diagonal-basis intercept-resend on qubit a of
    /// the W state: rewrite a in the diagonal basis, enumerate every
    /// computational pattern, and sum the weight of patterns that slip past
    /// the weight-one check.
    fn bx_intercept_pass_probability() -> f64 {
        let w = w_state();
        let mut pass = 0.0;
        for sign in [Sign::Plus, Sign::Minus] {
            let (p_sign, collapsed) = w.project_bx(0, sign).unwrap();
            for a_bit in 0..2u8 {
                let (p_a, after_a) = match collapsed.project_bz(0, a_bit) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                for b_bit in 0..2u8 {
                    let (p_b, after_b) = match after_a.project_bz(1, b_bit) {
                        Ok(x) => x,
                        Err(_) => continue,
                    };
                    for c_bit in 0..2u8 {
                        let p_c = match after_b.project_bz(2, c_bit) {
                            Ok((p, _)) => p,
                            Err(_) => continue,
                        };
                        if a_bit + b_bit + c_bit == 1 {
                            pass += p_sign * p_a * p_b * p_c;
                        }
                    }
                }
            }
        }
        pass
    }

    #[test]
    fn bx_intercept_detection_oracle_is_exactly_half() {
        let pass = bx_intercept_pass_probability();
        assert!((pass - 0.5).abs() < NORM_TOL, "pass probability {pass}");
    }

    #[test]
    fn bz_intercept_passes_every_check() {
        let mut checked = 0usize;
        let mut failures = 0usize;
        for seed in 0..10 {
            let mut session = Session::with_channel(
                config(InitialStateKind::W, 1000, seed),
                tapped_channel(AttackKind::InterceptResendBz),
            )
            .unwrap();
            session.prepare_and_distribute().unwrap();
            session.run_detecting_mode().unwrap();
            checked += session.checked_count();
            failures += session.check_failures();
        }
        assert!(checked > 4000);
        assert_eq!(failures, 0);
    }

    #[test]
    fn bx_intercept_detection_rate_matches_oracle() {
        let mut checked = 0usize;
        let mut failures = 0usize;
        for seed in 0..20 {
            let mut session = Session::with_channel(
                config(InitialStateKind::W, 1100, 100 + seed),
                tapped_channel(AttackKind::InterceptResendBx),
            )
            .unwrap();
            session.prepare_and_distribute().unwrap();
            session.run_detecting_mode().unwrap();
            checked += session.checked_count();
            failures += session.check_failures();
        }
        assert!(checked >= 10000);
        let rate = failures as f64 / checked as f64;
        assert!((rate - 0.5).abs() < 0.02, "detection rate {rate}");
    }

    #[test]
    fn bx_intercept_aborts_sessions_of_realistic_length() {
        // 200 triples at check fraction 0.5: the chance a session slips
        // through is (1/2)^(~100 checks); none of these may continue.
        for seed in 0..50 {
            let mut session = Session::with_channel(
                config(InitialStateKind::W, 200, 5000 + seed),
                tapped_channel(AttackKind::InterceptResendBx),
            )
            .unwrap();
            session.prepare_and_distribute().unwrap();
            let results = session.run_detecting_mode().unwrap();
            assert_eq!(
                session.decide_and_publish(&results).unwrap(),
                Decision::Abort
            );
        }
    }

    #[test]
    fn probe_passes_checks_and_copies_outcomes() {
        let mut checked = 0usize;
        let mut failures = 0usize;
        let mut matches = 0usize;
        let mut compared = 0usize;
        for seed in 0..10 {
            let mut session = Session::with_channel(
                config(InitialStateKind::W, 500, 300 + seed),
                tapped_channel(AttackKind::EntangleProbe),
            )
            .unwrap();
            session.prepare_and_distribute().unwrap();
            session.run_detecting_mode().unwrap();
            checked += session.checked_count();
            failures += session.check_failures();
            let (m, c) = probe_correlation(&mut session).unwrap();
            matches += m;
            compared += c;
        }
        assert_eq!(failures, 0, "probe must be invisible to the pattern check");
        assert_eq!(compared, checked, "one probe comparison per checked triple");
        assert_eq!(matches, compared, "ancilla copies the travel outcome");
    }

    #[test]
    fn probe_scopes_to_transit_qubit_and_own_ancillas() {
        let mut session = Session::with_channel(
            config(InitialStateKind::W, 20, 71),
            tapped_channel(AttackKind::EntangleProbe),
        )
        .unwrap();
        session.prepare_and_distribute().unwrap();
        for triple in &session.triples {
            let probes = triple.register.probes();
            assert_eq!(probes.len(), 1);
            assert_eq!(probes[0].1, QubitRole::TravelA);
            // Custody: probes are Eve's, everything else is honest.
            for (role, holder) in triple.register.roles() {
                match role {
                    QubitRole::Probe(_) => assert_eq!(holder, PartyId::Eve),
                    QubitRole::TravelA => assert_eq!(holder, PartyId::Alice),
                    QubitRole::TravelB => assert_eq!(holder, PartyId::Bob),
                    QubitRole::Home => assert_eq!(holder, PartyId::Charlie),
                    QubitRole::Message => unreachable!("no message yet"),
                }
            }
        }
    }

    /// Oracle: a probed, distilled pair dephases the teleportation channel,
    /// so Bob's decoded bit carries no diagonal-basis correlation. Computed
    /// exactly by branch enumeration on bare states.
    fn probed_pair_match_probability(bit: MessageBit) -> f64 {
        // Build (a, b, c, e): W state, CNOT a→e, then Charlie projects c=0.
        let w = w_state();
        let zero = StateVector::new_register(1).unwrap();
        let mut joint = w.tensor(&zero).unwrap();
        joint
            .apply_gate(crate::statevec::Gate::Cnot {
                control: 0,
                target: 3,
            })
            .unwrap();
        let (_, distilled) = joint.project_bz(2, 0).unwrap();
        // Prepend the message: order (m, a, b, c, e).
        let full = encode_message_qubit(bit).tensor(&distilled).unwrap();
        let mut match_prob = 0.0;
        for bell in BellOutcome::ALL {
            let (p_bell, collapsed) = match full.project_bell(0, 1, bell) {
                Ok(x) => x,
                Err(_) => continue,
            };
            // Bob corrects exactly as in the honest protocol.
            let mut corrected = collapsed;
            for &gate in crate::qsdc::correction_for(bell) {
                let g = match gate {
                    crate::channels::LocalGate::X => crate::statevec::Gate::X(2),
                    crate::channels::LocalGate::Z => crate::statevec::Gate::Z(2),
                    crate::channels::LocalGate::H => crate::statevec::Gate::H(2),
                };
                corrected.apply_gate(g).unwrap();
            }
            let signs = corrected.bx_probabilities(2).unwrap();
            let p_match = if bit == 1 { signs[0] } else { signs[1] };
            match_prob += p_bell * p_match;
        }
        match_prob
    }

    #[test]
    fn probed_pairs_randomize_decoded_bits_exactly() {
        for bit in [0u8, 1] {
            let p = probed_pair_match_probability(bit);
            assert!((p - 0.5).abs() < NORM_TOL, "match probability {p}");
        }
    }

    #[test]
    fn probed_pairs_randomize_decoded_bits_in_simulation() {
        let mut sent = 0usize;
        let mut wrong = 0usize;
        for seed in 0..12 {
            let mut session = Session::with_channel(
                config(InitialStateKind::W, 260, 900 + seed),
                tapped_channel(AttackKind::EntangleProbe),
            )
            .unwrap();
            assert_eq!(
                session.run_entanglement_sharing().unwrap(),
                Verdict::Completed
            );
            let mut msg_rng = seeded(7000 + seed);
            let bits: Vec<u8> = (0..64).map(|_| msg_rng.gen_range(0..2u8)).collect();
            let run = run_qsdc(&mut session, &bits).unwrap();
            sent += bits.len();
            wrong += run.bit_errors();
        }
        let ber = wrong as f64 / sent as f64;
        assert!((ber - 0.5).abs() < 0.06, "bit error rate {ber}");
    }

    #[test]
    fn decode_rule_matches_published_correlations() {
        let rule = OcaDecodeRule::correlation_table();
        assert_eq!(rule.decode(BellOutcome::PhiPlus, Sign::Plus), 1);
        assert_eq!(rule.decode(BellOutcome::PsiMinus, Sign::Minus), 1);
        assert_eq!(rule.decode(BellOutcome::PsiPlus, Sign::Minus), 0);
        assert_eq!(rule.decode(BellOutcome::PhiMinus, Sign::Plus), 0);
        // Total on all eight combinations.
        for bell in BellOutcome::ALL {
            for sign in [Sign::Plus, Sign::Minus] {
                assert!(rule.decode(bell, sign) <= 1);
            }
        }
    }

    #[test]
    fn oca_branches_on_xi_are_deterministic_per_table() {
        // Enumerating every branch of |M⟩ ⊗ |ξ⟩: each Bell result forces
        // Bob's sign to the correlation-table value whichever way the home
        // qubit would collapse.
        let rule = OcaDecodeRule::correlation_table();
        for bit in [0u8, 1] {
            let table = oca_branch_distribution(&xi_state(), bit).unwrap();
            let mut total = 0.0;
            for (bi, bell) in BellOutcome::ALL.into_iter().enumerate() {
                for (si, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
                    let p = table[bi][si];
                    total += p;
                    if p > NORM_TOL {
                        assert_eq!(
                            rule.decode(bell, sign),
                            bit,
                            "bell {bell:?} sign {sign:?} has weight {p}"
                        );
                    }
                }
            }
            assert!((total - 1.0).abs() < NORM_TOL);
        }
    }

    /// Frozen analytic branch weights for the W-state under-table run:
    /// the home-qubit-0 sector (weight 2/3) reproduces the correlation
    /// table exactly; the home-qubit-1 sector (weight 1/3) leaves Bob's
    /// sign uniform. Per (bell, sign): 1/6 on the four table-consistent
    /// cells plus 1/24 background everywhere.
    fn expected_w_cell(bell: BellOutcome, sign: Sign, bit: MessageBit) -> f64 {
        let rule = OcaDecodeRule::correlation_table();
        let consistent = rule.decode(bell, sign) == bit;
        let table_part = if consistent { 1.0 / 6.0 } else { 0.0 };
        table_part + 1.0 / 24.0
    }

    #[test]
    fn oca_branches_on_w_match_frozen_weights() {
        for bit in [0u8, 1] {
            let table = oca_branch_distribution(&w_state(), bit).unwrap();
            for (bi, bell) in BellOutcome::ALL.into_iter().enumerate() {
                for (si, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
                    let expected = expected_w_cell(bell, sign, bit);
                    assert!(
                        (table[bi][si] - expected).abs() < NORM_TOL,
                        "bell {bell:?} sign {sign:?}: {} vs {expected}",
                        table[bi][si]
                    );
                }
            }
        }
    }

    #[test]
    fn oca_on_w_conditioned_on_home_zero_is_correct() {
        // Forcing the home qubit to 0 before the Bell measurement restores
        // the table correlations exactly.
        let rule = OcaDecodeRule::correlation_table();
        for bit in [0u8, 1] {
            let joint = encode_message_qubit(bit).tensor(&w_state()).unwrap();
            let (_, sector) = joint.project_bz(3, 0).unwrap();
            for bell in BellOutcome::ALL {
                let (p_bell, collapsed) = sector.project_bell(0, 1, bell).unwrap();
                assert!((p_bell - 0.25).abs() < NORM_TOL);
                let signs = collapsed.bx_probabilities(2).unwrap();
                let sign = if signs[0] > 0.5 { Sign::Plus } else { Sign::Minus };
                assert!(signs[0].max(signs[1]) > 1.0 - NORM_TOL);
                assert_eq!(rule.decode(bell, sign), bit);
            }
        }
    }

    fn checked_session(kind: InitialStateKind, len: usize, seed: u64) -> Session {
        let mut session = Session::new(config(kind, len, seed)).unwrap();
        assert_eq!(
            session.run_checks_without_distillation().unwrap(),
            Decision::Continue
        );
        session
    }

    #[test]
    fn oca_on_xi_decodes_perfectly() {
        let mut session = checked_session(InitialStateKind::Xi, 24_000, 61);
        let mut msg_rng = seeded(62);
        let bits: Vec<u8> = (0..10_000).map(|_| msg_rng.gen_range(0..2u8)).collect();
        let run = run_oca_session(&mut session, &bits, &OcaDecodeRule::correlation_table()).unwrap();
        assert_eq!(run.bit_errors(), 0);
        assert_eq!(run.decoded, bits);
    }

    #[test]
    fn oca_on_w_errs_at_one_sixth() {
        let mut session = checked_session(InitialStateKind::W, 24_000, 67);
        let mut msg_rng = seeded(68);
        let bits: Vec<u8> = (0..10_000).map(|_| msg_rng.gen_range(0..2u8)).collect();
        let run = run_oca_session(&mut session, &bits, &OcaDecodeRule::correlation_table()).unwrap();
        let ber = run.bit_error_rate().unwrap();
        assert!((ber - 1.0 / 6.0).abs() < 0.01, "bit error rate {ber}");
    }

    #[test]
    fn no_decode_rule_beats_five_sixths_on_w() {
        // Success of a rule r over uniform message bits:
        //   Σ_cells P(bit = r(cell), cell) with the frozen branch weights.
        let mut best = 0.0f64;
        let mut best_index = 0u16;
        for index in 0..=255u16 {
            let rule = OcaDecodeRule::from_index(index as u8);
            let mut success = 0.0;
            for (bi, bell) in BellOutcome::ALL.into_iter().enumerate() {
                for (si, sign) in [Sign::Plus, Sign::Minus].into_iter().enumerate() {
                    let _ = (bi, si);
                    let guessed = rule.decode(bell, sign);
                    // P(bit, cell) = 1/2 · cell weight given bit.
                    success += 0.5 * expected_w_cell(bell, sign, guessed);
                }
            }
            if success > best {
                best = success;
                best_index = index;
            }
            assert!(success < 1.0 - 1e-9, "rule {index} would be deterministic");
        }
        assert!((best - 5.0 / 6.0).abs() < NORM_TOL, "best success {best}");
        assert_eq!(
            OcaDecodeRule::from_index(best_index as u8),
            OcaDecodeRule::correlation_table(),
            "the correlation table is the unique optimum"
        );
    }

    #[test]
    fn oca_requires_enough_raw_triples() {
        let mut session = checked_session(InitialStateKind::Xi, 12, 73);
        let available = session
            .triples
            .iter()
            .filter(|t| t.status == TripleStatus::Distributed)
            .count();
        let bits = vec![1u8; available + 1];
        assert!(matches!(
            run_oca_session(&mut session, &bits, &OcaDecodeRule::correlation_table()),
            Err(Error::PoolExhausted { .. })
        ));
    }

    #[test]
    fn oca_leaves_home_qubits_unmeasured() {
        let mut session = checked_session(InitialStateKind::Xi, 40, 79);
        let bits = [1u8, 0, 1];
        run_oca_session(&mut session, &bits, &OcaDecodeRule::correlation_table()).unwrap();
        // Consumed triples keep a genuinely undetermined home qubit: for the
        // even-parity state every decode branch leaves it at exactly 1/2.
        let mut saw_consumed = 0;
        for triple in session
            .triples
            .iter()
            .filter(|t| t.status == TripleStatus::Consumed)
        {
            saw_consumed += 1;
            let idx = triple.register.index_of(QubitRole::Home).unwrap();
            let p = triple.register.state().bz_probabilities(idx).unwrap();
            assert!((p[0] - 0.5).abs() < NORM_TOL, "home collapsed: {p:?}");
        }
        assert_eq!(saw_consumed, bits.len());
    }
}
