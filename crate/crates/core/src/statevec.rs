//! Dense state-vector engine for small registers.
//!
//! A register of `n` qubits holds `2^n` complex amplitudes. Qubit 0 is the
//! leftmost label in ket notation and the most significant bit of the basis
//! index, so `|100⟩` on three qubits lives at index `0b100 = 4`. Keeping
//! registers at 8 qubits or fewer makes every operation exact to well below
//! the 1e-12 bookkeeping tolerance.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Hard cap on register width; the protocol never needs more than
/// message + triple + two probe ancillas = 6.
pub const MAX_QUBITS: usize = 8;

/// Tolerance for exact-math checks (normalization, orthogonality, fidelity).
pub const NORM_TOL: f64 = 1e-12;

/// Cutoff below which an outcome is treated as impossible when projecting.
const ZERO_PROB: f64 = 1e-12;

/// The four Bell-measurement results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellOutcome {
    pub const ALL: [BellOutcome; 4] = [
        BellOutcome::PhiPlus,
        BellOutcome::PhiMinus,
        BellOutcome::PsiPlus,
        BellOutcome::PsiMinus,
    ];

    /// Stable numeric code used in transcripts: φ+ 0, φ− 1, ψ+ 2, ψ− 3.
    pub fn code(self) -> i64 {
        match self {
            BellOutcome::PhiPlus => 0,
            BellOutcome::PhiMinus => 1,
            BellOutcome::PsiPlus => 2,
            BellOutcome::PsiMinus => 3,
        }
    }

    pub fn from_code(code: i64) -> Option<Self> {
        Self::ALL.get(usize::try_from(code).ok()?).copied()
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi+",
            BellOutcome::PhiMinus => "phi-",
            BellOutcome::PsiPlus => "psi+",
            BellOutcome::PsiMinus => "psi-",
        }
    }
}

/// Result of a diagonal-basis measurement: `Plus` is `|+⟩`, `Minus` is `|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// Classical-bit reading of the sign: `|+⟩` encodes 1, `|−⟩` encodes 0.
    pub fn as_bit(self) -> u8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => 0,
        }
    }
}

/// Single- and two-qubit unitaries the simulator needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    X(usize),
    Z(usize),
    H(usize),
    Cnot { control: usize, target: usize },
}

/// Dense amplitudes of an n-qubit register.
#[derive(Debug, Clone)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Fresh register in `|0…0⟩`.
    pub fn new_register(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::RegisterSize {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    /// Register from explicit amplitudes; must be unit length within 1e-9.
    /// The stored vector is renormalized so downstream checks see exactly 1.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::NotAPowerOfTwo { len });
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::RegisterSize {
                requested: num_qubits,
                max: MAX_QUBITS,
            });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::NotAUnitVector { norm_sqr });
        }
        let scale = 1.0 / norm_sqr.sqrt();
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of a computational basis ket by its big-endian index.
    pub fn amplitude(&self, basis_index: usize) -> Complex64 {
        self.amps[basis_index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask selecting qubit `q` inside a basis index (big-endian).
    fn mask(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }

    /// Kronecker product; `self`'s qubits precede `other`'s in the result.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let total = self.num_qubits + other.num_qubits;
        if total > MAX_QUBITS {
            return Err(Error::RegisterOverflow {
                left: self.num_qubits,
                right: other.num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for l in &self.amps {
            for r in &other.amps {
                amps.push(l * r);
            }
        }
        Ok(StateVector {
            num_qubits: total,
            amps,
        })
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::X(q) => {
                self.check_qubit(q)?;
                let m = self.mask(q);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        self.amps.swap(i, i | m);
                    }
                }
            }
            Gate::Z(q) => {
                self.check_qubit(q)?;
                let m = self.mask(q);
                for i in 0..self.amps.len() {
                    if i & m != 0 {
                        self.amps[i] = -self.amps[i];
                    }
                }
            }
            Gate::H(q) => {
                self.check_qubit(q)?;
                let m = self.mask(q);
                for i in 0..self.amps.len() {
                    if i & m == 0 {
                        let a = self.amps[i];
                        let b = self.amps[i | m];
                        self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amps[i | m] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::Cnot { control, target } => {
                self.check_qubit(control)?;
                self.check_qubit(target)?;
                if control == target {
                    return Err(Error::IdenticalOperands { index: control });
                }
                let mc = self.mask(control);
                let mt = self.mask(target);
                for i in 0..self.amps.len() {
                    if i & mc != 0 && i & mt == 0 {
                        self.amps.swap(i, i | mt);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_gates(&mut self, gates: &[Gate]) -> Result<()> {
        for &g in gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Born probabilities of measuring qubit `q` in the computational basis.
    pub fn bz_probabilities(&self, q: usize) -> Result<[f64; 2]> {
        self.check_qubit(q)?;
        let m = self.mask(q);
        let mut p = [0.0; 2];
        for (i, a) in self.amps.iter().enumerate() {
            p[usize::from(i & m != 0)] += a.norm_sqr();
        }
        Ok(p)
    }

    /// Born probabilities of measuring qubit `q` in the diagonal basis,
    /// ordered `[P(+), P(−)]`.
    pub fn bx_probabilities(&self, q: usize) -> Result<[f64; 2]> {
        let mut rotated = self.clone();
        rotated.apply_gate(Gate::H(q))?;
        rotated.bz_probabilities(q)
    }

    /// Born probabilities of a joint Bell measurement on `(q1, q2)`,
    /// ordered as [`BellOutcome::ALL`].
    pub fn bell_probabilities(&self, q1: usize, q2: usize) -> Result<[f64; 4]> {
        self.check_pair(q1, q2)?;
        let m1 = self.mask(q1);
        let m2 = self.mask(q2);
        let mut p = [0.0; 4];
        for i in 0..self.amps.len() {
            if i & m1 == 0 && i & m2 == 0 {
                let a00 = self.amps[i];
                let a01 = self.amps[i | m2];
                let a10 = self.amps[i | m1];
                let a11 = self.amps[i | m1 | m2];
                p[0] += ((a00 + a11) * FRAC_1_SQRT_2).norm_sqr();
                p[1] += ((a00 - a11) * FRAC_1_SQRT_2).norm_sqr();
                p[2] += ((a01 + a10) * FRAC_1_SQRT_2).norm_sqr();
                p[3] += ((a01 - a10) * FRAC_1_SQRT_2).norm_sqr();
            }
        }
        Ok(p)
    }

    fn check_pair(&self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::IdenticalOperands { index: q1 });
        }
        Ok(())
    }

    /// Renormalized projection of qubit `q` onto computational outcome `bit`.
    /// Returns the outcome probability alongside the collapsed state, or
    /// `Err(ImpossibleOutcome)` when the branch has no weight.
    pub fn project_bz(&self, q: usize, bit: u8) -> Result<(f64, StateVector)> {
        self.check_qubit(q)?;
        let m = self.mask(q);
        let want = bit != 0;
        let prob: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i & m != 0) == want)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        if prob < ZERO_PROB {
            return Err(Error::ImpossibleOutcome);
        }
        let scale = 1.0 / prob.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i & m != 0) == want {
                    a * scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        Ok((
            prob,
            StateVector {
                num_qubits: self.num_qubits,
                amps,
            },
        ))
    }

    /// Renormalized projection of qubit `q` onto `|+⟩` or `|−⟩`.
    pub fn project_bx(&self, q: usize, sign: Sign) -> Result<(f64, StateVector)> {
        let mut rotated = self.clone();
        rotated.apply_gate(Gate::H(q))?;
        let bit = match sign {
            Sign::Plus => 0,
            Sign::Minus => 1,
        };
        let (prob, mut collapsed) = rotated.project_bz(q, bit)?;
        collapsed.apply_gate(Gate::H(q))?;
        Ok((prob, collapsed))
    }

    /// Renormalized projection of the pair `(q1, q2)` onto one Bell ket.
    pub fn project_bell(
        &self,
        q1: usize,
        q2: usize,
        outcome: BellOutcome,
    ) -> Result<(f64, StateVector)> {
        self.check_pair(q1, q2)?;
        let m1 = self.mask(q1);
        let m2 = self.mask(q2);
        // Indices of the two basis kets spanned by the Bell ket, and its sign.
        let (lo_mask, hi_mask, sgn) = match outcome {
            BellOutcome::PhiPlus => (0, m1 | m2, 1.0),
            BellOutcome::PhiMinus => (0, m1 | m2, -1.0),
            BellOutcome::PsiPlus => (m2, m1, 1.0),
            BellOutcome::PsiMinus => (m2, m1, -1.0),
        };
        let mut amps = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let mut prob = 0.0;
        for i in 0..self.amps.len() {
            if i & m1 == 0 && i & m2 == 0 {
                let lo = self.amps[i | lo_mask];
                let hi = self.amps[i | hi_mask];
                let overlap = (lo + sgn * hi) * FRAC_1_SQRT_2;
                prob += overlap.norm_sqr();
                amps[i | lo_mask] = overlap * FRAC_1_SQRT_2;
                amps[i | hi_mask] = overlap * sgn * FRAC_1_SQRT_2;
            }
        }
        if prob < ZERO_PROB {
            return Err(Error::ImpossibleOutcome);
        }
        let scale = 1.0 / prob.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok((
            prob,
            StateVector {
                num_qubits: self.num_qubits,
                amps,
            },
        ))
    }

    /// Inverse-CDF draw over a small outcome distribution.
    fn sample_outcome(probs: &[f64], rng: &mut SimRng) -> usize {
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        for (k, p) in probs.iter().enumerate() {
            cum += p.max(0.0);
            if u < cum {
                return k;
            }
        }
        probs.len() - 1
    }

    /// Measure qubit `q` in the computational basis and collapse in place.
    pub fn measure_bz(&mut self, q: usize, rng: &mut SimRng) -> Result<u8> {
        let probs = self.bz_probabilities(q)?;
        let bit = Self::sample_outcome(&probs, rng) as u8;
        let (_, collapsed) = self.project_bz(q, bit)?;
        *self = collapsed;
        Ok(bit)
    }

    /// Measure qubit `q` in the diagonal basis and collapse in place.
    /// Equivalent to H, computational measurement, H.
    pub fn measure_bx(&mut self, q: usize, rng: &mut SimRng) -> Result<Sign> {
        let probs = self.bx_probabilities(q)?;
        let sign = match Self::sample_outcome(&probs, rng) {
            0 => Sign::Plus,
            _ => Sign::Minus,
        };
        let (_, collapsed) = self.project_bx(q, sign)?;
        *self = collapsed;
        Ok(sign)
    }

    /// Joint Bell measurement on `(q1, q2)`; collapses onto the measured
    /// Bell ket in place.
    pub fn measure_bell(&mut self, q1: usize, q2: usize, rng: &mut SimRng) -> Result<BellOutcome> {
        let probs = self.bell_probabilities(q1, q2)?;
        let outcome = BellOutcome::ALL[Self::sample_outcome(&probs, rng)];
        let (_, collapsed) = self.project_bell(q1, q2, outcome)?;
        *self = collapsed;
        Ok(outcome)
    }

    /// True iff some unit-modulus scalar λ makes `self ≈ λ·other` within
    /// `tol` in Euclidean norm.
    pub fn equal_up_to_global_phase(&self, other: &StateVector, tol: f64) -> Result<bool> {
        if self.amps.len() != other.amps.len() {
            return Err(Error::DimensionMismatch {
                left: self.amps.len(),
                right: other.amps.len(),
            });
        }
        // ‖x − λy‖ is minimized by λ = ⟨x,y⟩*/|⟨x,y⟩|. The residual is then
        // summed amplitude by amplitude; the closed form ‖x‖²+‖y‖²−2|⟨x,y⟩|
        // would cancel catastrophically and bottom out near 1e-8.
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| x.conj() * y)
            .sum();
        let lambda = if inner.norm() > 1e-15 {
            inner.conj() / inner.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let residual: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum();
        Ok(residual.sqrt() <= tol)
    }

    /// Pure single-qubit state of `q`, available only when `q` is in a
    /// product with the rest of the register (e.g. after the rest collapsed).
    pub fn extract_single_qubit(&self, q: usize) -> Result<StateVector> {
        self.check_qubit(q)?;
        let m = self.mask(q);
        // 2x2 reduced density matrix of q.
        let mut r00 = 0.0;
        let mut r11 = 0.0;
        let mut r01 = Complex64::new(0.0, 0.0);
        for i in 0..self.amps.len() {
            if i & m == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | m];
                r00 += a0.norm_sqr();
                r11 += a1.norm_sqr();
                r01 += a0 * a1.conj();
            }
        }
        // Largest eigenvalue of [[r00, r01], [r01*, r11]].
        let tr = r00 + r11;
        let det = r00 * r11 - r01.norm_sqr();
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        let lambda = (tr + disc) / 2.0;
        if (lambda - 1.0).abs() > 1e-9 {
            return Err(Error::NotProductState { index: q });
        }
        let (v0, v1) = if r01.norm() > 1e-12 {
            (r01, Complex64::new(lambda - r00, 0.0))
        } else if r00 >= r11 {
            (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        };
        let norm = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
        StateVector::from_amplitudes(vec![v0 / norm, v1 / norm])
    }
}
