//! Constructors for every named state the protocol uses.

use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::statevec::{BellOutcome, StateVector};

/// One classical message bit.
pub type MessageBit = u8;

/// Which tripartite state a session starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialStateKind {
    /// `(|100⟩ + |010⟩ + |001⟩)/√3` on (a, b, c).
    W,
    /// `(|000⟩ + |110⟩ + |011⟩ + |101⟩)/2` on (a, b, c).
    Xi,
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Tripartite W state on qubits (a, b, c).
pub fn w_state() -> StateVector {
    let s = re(1.0 / 3.0_f64.sqrt());
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b100] = s;
    amps[0b010] = s;
    amps[0b001] = s;
    StateVector::from_amplitudes(amps).expect("w state is unit length")
}

/// The even-parity tripartite state used by the out-of-control attack.
pub fn xi_state() -> StateVector {
    let s = re(0.5);
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = s;
    amps[0b110] = s;
    amps[0b011] = s;
    amps[0b101] = s;
    StateVector::from_amplitudes(amps).expect("xi state is unit length")
}

pub fn initial_state(kind: InitialStateKind) -> StateVector {
    match kind {
        InitialStateKind::W => w_state(),
        InitialStateKind::Xi => xi_state(),
    }
}

/// One of the four two-qubit Bell kets.
pub fn bell_state(kind: BellOutcome) -> StateVector {
    let (lo, hi, sgn) = match kind {
        BellOutcome::PhiPlus => (0b00, 0b11, 1.0),
        BellOutcome::PhiMinus => (0b00, 0b11, -1.0),
        BellOutcome::PsiPlus => (0b01, 0b10, 1.0),
        BellOutcome::PsiMinus => (0b01, 0b10, -1.0),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[lo] = re(FRAC_1_SQRT_2);
    amps[hi] = re(sgn * FRAC_1_SQRT_2);
    StateVector::from_amplitudes(amps).expect("bell states are unit length")
}

/// General message qubit `α|0⟩ + β|1⟩`; the pair must be unit length.
pub fn message_qubit(alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-9 {
        return Err(Error::NotAUnitVector { norm_sqr });
    }
    StateVector::from_amplitudes(vec![alpha, beta])
}

/// Diagonal-basis encoding: bit 1 prepares `|+⟩`, bit 0 prepares `|−⟩`.
pub fn encode_message_qubit(bit: MessageBit) -> StateVector {
    let sign = if bit != 0 { 1.0 } else { -1.0 };
    StateVector::from_amplitudes(vec![re(FRAC_1_SQRT_2), re(sign * FRAC_1_SQRT_2)])
        .expect("encoded qubits are unit length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevec::NORM_TOL;

    #[test]
    fn w_state_amplitudes() {
        let w = w_state();
        let s = 1.0 / 3.0_f64.sqrt();
        assert!((w.amplitude(0b100).re - s).abs() < NORM_TOL);
        assert!((w.amplitude(0b010).re - s).abs() < NORM_TOL);
        assert!((w.amplitude(0b001).re - s).abs() < NORM_TOL);
        assert!(w.amplitude(0b000).norm() < NORM_TOL);
        assert!((w.norm_sqr() - 1.0).abs() < NORM_TOL);

        let nonzero = w
            .amplitudes()
            .iter()
            .filter(|a| a.norm() > NORM_TOL)
            .count();
        assert_eq!(nonzero, 3);
        for a in w.amplitudes().iter().filter(|a| a.norm() > NORM_TOL) {
            assert!((a.norm_sqr() - 1.0 / 3.0).abs() < NORM_TOL);
        }
    }

    #[test]
    fn xi_state_amplitudes() {
        let xi = xi_state();
        assert!((xi.amplitude(0b110).re - 0.5).abs() < NORM_TOL);
        assert!(xi.amplitude(0b100).norm() < NORM_TOL);

        let mut nonzero = 0;
        for (i, a) in xi.amplitudes().iter().enumerate() {
            if a.norm() > NORM_TOL {
                nonzero += 1;
                assert_eq!((i as u32).count_ones() % 2, 0, "ket {i:03b} has odd parity");
                assert!((a.norm_sqr() - 0.25).abs() < NORM_TOL);
            }
        }
        assert_eq!(nonzero, 4);
    }

    #[test]
    fn bell_states_are_orthonormal() {
        let all: Vec<StateVector> = BellOutcome::ALL.iter().map(|&k| bell_state(k)).collect();
        for (i, x) in all.iter().enumerate() {
            for (j, y) in all.iter().enumerate() {
                let overlap: Complex64 = x
                    .amplitudes()
                    .iter()
                    .zip(y.amplitudes())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((overlap.norm() - expected).abs() < NORM_TOL);
            }
        }
        let psi_plus = bell_state(BellOutcome::PsiPlus);
        assert!((psi_plus.amplitude(0b01).re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        assert!((psi_plus.amplitude(0b10).re - FRAC_1_SQRT_2).abs() < NORM_TOL);
        let phi_minus = bell_state(BellOutcome::PhiMinus);
        assert!((phi_minus.amplitude(0b11).re + FRAC_1_SQRT_2).abs() < NORM_TOL);
    }

    #[test]
    fn encoding_follows_the_bit_convention() {
        let minus = encode_message_qubit(0);
        assert!((minus.amplitude(1).re + FRAC_1_SQRT_2).abs() < NORM_TOL);
        let plus = encode_message_qubit(1);
        assert!((plus.amplitude(1).re - FRAC_1_SQRT_2).abs() < NORM_TOL);

        // ⟨+|−⟩ = 0
        let overlap: Complex64 = plus
            .amplitudes()
            .iter()
            .zip(minus.amplitudes())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(overlap.norm() < NORM_TOL);
    }

    #[test]
    fn example_message_encodes_to_the_expected_sequence() {
        // 010110 → |−⟩|+⟩|−⟩|+⟩|+⟩|−⟩
        let bits = [0u8, 1, 0, 1, 1, 0];
        for (bit, expected_sign) in bits.iter().zip([-1.0, 1.0, -1.0, 1.0, 1.0, -1.0]) {
            let q = encode_message_qubit(*bit);
            assert!((q.amplitude(1).re - expected_sign * FRAC_1_SQRT_2).abs() < NORM_TOL);
        }
    }

    #[test]
    fn message_qubit_requires_unit_norm() {
        assert!(message_qubit(re(0.6), re(0.8)).is_ok());
        assert!(matches!(
            message_qubit(re(1.0), re(1.0)),
            Err(Error::NotAUnitVector { .. })
        ));
    }
}
