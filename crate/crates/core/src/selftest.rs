//! Engine invariant suite behind the `self-test` subcommand: normalization,
//! Born-rule sums, projection idempotence and Bell-projector completeness,
//! all at the 1e-12 exact-math tolerance.

use num_complex::Complex64;
use rand::Rng;

use crate::rng::{seeded, SimRng};
use crate::states::{bell_state, encode_message_qubit, w_state, xi_state};
use crate::statevec::{BellOutcome, Gate, Sign, StateVector, NORM_TOL};

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const SELF_TEST_SEED: u64 = 0x5E1F_7E57;

fn random_state(n: usize, rng: &mut SimRng) -> StateVector {
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
        .expect("normalized by construction")
}

fn random_gate(n: usize, rng: &mut SimRng) -> Gate {
    let q = rng.gen_range(0..n);
    match rng.gen_range(0..4) {
        0 => Gate::X(q),
        1 => Gate::Z(q),
        2 => Gate::H(q),
        _ if n > 1 => {
            let mut t = rng.gen_range(0..n);
            if t == q {
                t = (t + 1) % n;
            }
            Gate::Cnot { control: q, target: t }
        }
        _ => Gate::H(q),
    }
}

fn named_states() -> Vec<StateVector> {
    let mut states = vec![w_state(), xi_state(), encode_message_qubit(0), encode_message_qubit(1)];
    for outcome in BellOutcome::ALL {
        states.push(bell_state(outcome));
    }
    states
}

fn check_normalization() -> CheckReport {
    let mut rng = seeded(SELF_TEST_SEED);
    let mut worst: f64 = 0.0;
    for state in named_states() {
        worst = worst.max((state.norm_sqr() - 1.0).abs());
    }
    for n in 1..=6 {
        let reg = StateVector::new_register(n).expect("in range");
        worst = worst.max((reg.norm_sqr() - 1.0).abs());
        let mut state = random_state(n, &mut rng);
        for _ in 0..50 {
            state.apply_gate(random_gate(n, &mut rng)).expect("valid gate");
            worst = worst.max((state.norm_sqr() - 1.0).abs());
        }
        // Measurement collapse renormalizes too.
        let q = rng.gen_range(0..n);
        state.measure_bz(q, &mut rng).expect("valid qubit");
        worst = worst.max((state.norm_sqr() - 1.0).abs());
    }
    CheckReport {
        name: "normalization",
        passed: worst < NORM_TOL,
        detail: format!("max |Σ|amp|² − 1| = {worst:.3e}"),
    }
}

fn check_born_rule_sums() -> CheckReport {
    let mut rng = seeded(SELF_TEST_SEED ^ 1);
    let mut worst: f64 = 0.0;
    let mut states = named_states();
    for n in 2..=5 {
        states.push(random_state(n, &mut rng));
    }
    for state in &states {
        let n = state.num_qubits();
        for q in 0..n {
            let p = state.bz_probabilities(q).expect("valid qubit");
            worst = worst.max((p[0] + p[1] - 1.0).abs());
            let p = state.bx_probabilities(q).expect("valid qubit");
            worst = worst.max((p[0] + p[1] - 1.0).abs());
        }
        if n >= 2 {
            let p = state.bell_probabilities(0, n - 1).expect("valid pair");
            worst = worst.max((p.iter().sum::<f64>() - 1.0).abs());
        }
    }
    CheckReport {
        name: "born-rule-sums",
        passed: worst < NORM_TOL,
        detail: format!("max |Σp − 1| = {worst:.3e}"),
    }
}

fn check_projection_idempotence() -> CheckReport {
    let mut rng = seeded(SELF_TEST_SEED ^ 2);
    let mut failures = 0usize;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=4);
        let mut state = random_state(n, &mut rng);
        let q = rng.gen_range(0..n);

        let first = state.measure_bz(q, &mut rng).expect("valid");
        let snapshot = state.clone();
        let second = state.measure_bz(q, &mut rng).expect("valid");
        if first != second {
            failures += 1;
        }
        let p0 = state.bz_probabilities(q).expect("valid")[usize::from(second)];
        worst = worst.max((p0 - 1.0).abs());
        if !state
            .equal_up_to_global_phase(&snapshot, NORM_TOL)
            .expect("same size")
        {
            failures += 1;
        }

        let sign = state.measure_bx(q, &mut rng).expect("valid");
        let again = state.measure_bx(q, &mut rng).expect("valid");
        if sign != again {
            failures += 1;
        }
        let px = state.bx_probabilities(q).expect("valid");
        let certain = match again {
            Sign::Plus => px[0],
            Sign::Minus => px[1],
        };
        worst = worst.max((certain - 1.0).abs());
    }
    CheckReport {
        name: "projection-idempotence",
        passed: failures == 0 && worst < NORM_TOL,
        detail: format!("{failures} outcome flips, max residual {worst:.3e}"),
    }
}

fn check_bell_completeness() -> CheckReport {
    let mut rng = seeded(SELF_TEST_SEED ^ 3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.gen_range(2..=4);
        let state = random_state(n, &mut rng);
        let (q1, q2) = (0, n - 1);
        // Σ_o P_o |x⟩ must reconstruct |x⟩: completeness of the projectors.
        let mut rebuilt = vec![Complex64::new(0.0, 0.0); state.dim()];
        let mut prob_sum = 0.0;
        for outcome in BellOutcome::ALL {
            if let Ok((prob, collapsed)) = state.project_bell(q1, q2, outcome) {
                prob_sum += prob;
                for (r, a) in rebuilt.iter_mut().zip(collapsed.amplitudes()) {
                    *r += a * prob.sqrt();
                }
            }
        }
        worst = worst.max((prob_sum - 1.0).abs());
        for (r, a) in rebuilt.iter().zip(state.amplitudes()) {
            worst = worst.max((r - a).norm());
        }
    }
    CheckReport {
        name: "bell-completeness",
        passed: worst < NORM_TOL,
        detail: format!("max reconstruction residual {worst:.3e}"),
    }
}

/// Run the whole invariant suite.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        check_normalization(),
        check_born_rule_sums(),
        check_projection_idempotence(),
        check_bell_completeness(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_invariants_hold() {
        for check in run_all() {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
    }
}
