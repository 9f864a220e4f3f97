//! Scenario runner: compose protocol, teleportation and attacks into named
//! experiments, run seeded trials, aggregate metrics and emit reports.
//!
//! Reports are deterministic down to the byte for a fixed scenario: trial
//! streams derive from `(master_seed, trial_index)`, fields serialize in a
//! fixed order and floats are rounded to six significant digits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attacks::{
    self, entangle_probe, intercept_resend, run_oca_session, AttackKind, Basis, OcaDecodeRule,
};
use crate::channels::{PartyId, QuantumChannel};
use crate::error::{Error, Result};
use crate::protocol::{Decision, Session, SessionConfig, Verdict};
use crate::qsdc::run_qsdc;
use crate::rng::{seeded, trial_seed};
use crate::states::{InitialStateKind, MessageBit};

/// What Alice sends each trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageSpec {
    /// Fixed bit string, e.g. "010110".
    Bits(String),
    /// Fresh random bits of this length every trial.
    RandomLen(usize),
}

impl MessageSpec {
    pub fn len(&self) -> usize {
        match self {
            MessageSpec::Bits(s) => s.len(),
            MessageSpec::RandomLen(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn bits_for_trial(&self, rng: &mut crate::rng::SimRng) -> Result<Vec<MessageBit>> {
        match self {
            MessageSpec::Bits(s) => parse_bits(s),
            MessageSpec::RandomLen(n) => Ok((0..*n).map(|_| rng.gen_range(0..2u8)).collect()),
        }
    }
}

/// Parse a "0101…" string into bits.
pub fn parse_bits(s: &str) -> Result<Vec<MessageBit>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidMessage(format!(
                "unexpected character {other:?}; messages are strings of 0 and 1"
            ))),
        })
        .collect()
}

/// One named experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub initial_state: InitialStateKind,
    pub attack: Option<AttackKind>,
    pub message: MessageSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub check_fraction: f64,
    /// Triples per trial; derived from the message length when absent.
    #[serde(default)]
    pub sequence_length: Option<usize>,
}

pub const BUILTIN_SCENARIO_NAMES: [&str; 7] = [
    "honest-w",
    "honest-xi",
    "eve-ir-bz",
    "eve-ir-bx",
    "eve-probe",
    "oca-xi",
    "oca-w",
];

/// Built-in scenarios with one-line descriptions.
pub fn list_scenarios() -> Vec<(&'static str, &'static str)> {
    vec![
        (
            "honest-w",
            "W-state sharing, distillation and encoded teleportation, no adversary",
        ),
        (
            "honest-xi",
            "even-parity-state variant of the honest protocol",
        ),
        (
            "eve-ir-bz",
            "computational-basis intercept-resend on the Alice-bound link",
        ),
        (
            "eve-ir-bx",
            "diagonal-basis intercept-resend on the Alice-bound link",
        ),
        (
            "eve-probe",
            "CNOT entangle-probe on the Alice-bound link, ancilla read afterwards",
        ),
        (
            "oca-xi",
            "under-table decode by Alice and Bob over the even-parity state",
        ),
        (
            "oca-w",
            "under-table decode attempted over the W state",
        ),
    ]
}

impl Scenario {
    /// A built-in scenario by name with default message and check fraction.
    pub fn builtin(name: &str, trials: u64, master_seed: u64) -> Result<Scenario> {
        let (initial_state, attack) = match name {
            "honest-w" => (InitialStateKind::W, None),
            "honest-xi" => (InitialStateKind::Xi, None),
            "eve-ir-bz" => (InitialStateKind::W, Some(AttackKind::InterceptResendBz)),
            "eve-ir-bx" => (InitialStateKind::W, Some(AttackKind::InterceptResendBx)),
            "eve-probe" => (InitialStateKind::W, Some(AttackKind::EntangleProbe)),
            "oca-xi" => (InitialStateKind::Xi, Some(AttackKind::OcaXi)),
            "oca-w" => (InitialStateKind::W, Some(AttackKind::OcaW)),
            other => return Err(Error::UnknownScenario(other.to_string())),
        };
        Ok(Scenario {
            name: name.to_string(),
            initial_state,
            attack,
            message: MessageSpec::Bits("010110".into()),
            trials,
            master_seed,
            check_fraction: 0.5,
            sequence_length: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidScenario("trials must be positive".into()));
        }
        if !self.check_fraction.is_finite()
            || self.check_fraction <= 0.0
            || self.check_fraction >= 1.0
        {
            return Err(Error::InvalidScenario(format!(
                "check_fraction {} outside (0, 1)",
                self.check_fraction
            )));
        }
        if let MessageSpec::Bits(s) = &self.message {
            parse_bits(s)?;
        }
        match self.attack {
            Some(AttackKind::OcaXi) if self.initial_state != InitialStateKind::Xi => {
                return Err(Error::InvalidScenario(
                    "the xi-variant under-table attack requires the xi initial state".into(),
                ));
            }
            Some(AttackKind::OcaW) if self.initial_state != InitialStateKind::W => {
                return Err(Error::InvalidScenario(
                    "the W under-table attack requires the W initial state".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Triples per trial: explicit override, or enough for the message at
    /// this check fraction and pair yield with generous slack.
    pub fn effective_sequence_length(&self) -> usize {
        if let Some(n) = self.sequence_length {
            return n;
        }
        let keep = match self.attack {
            // Under-table decodes consume raw triples, no distillation loss.
            Some(a) if a.is_oca() => 1.0,
            _ => match self.initial_state {
                InitialStateKind::W => 2.0 / 3.0,
                InitialStateKind::Xi => 0.5,
            },
        };
        let len = self.message.len() as f64;
        let target = len + 6.0 * len.sqrt() + 8.0;
        let derived = (target / ((1.0 - self.check_fraction) * keep)).ceil() as usize;
        let floor = (1.0 / self.check_fraction).ceil() as usize;
        derived.max(floor).max(4)
    }
}

/// Per-trial metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: u64,
    pub verdict: Verdict,
    pub sequence_length: usize,
    pub checked: usize,
    pub check_failures: usize,
    pub detection_rate: Option<f64>,
    pub remaining: usize,
    pub pooled: usize,
    pub distill_yield: Option<f64>,
    pub sent_bits: usize,
    pub bit_errors: usize,
    pub bit_error_rate: Option<f64>,
    pub eve_correlation: Option<f64>,
}

/// Aggregates over all trials. Rates prefixed `mean_` are unweighted means
/// of the per-trial values; the bare rates pool counts across trials, and
/// half-widths are 3σ binomial intervals on the pooled rates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: u64,
    pub aborted: u64,
    pub abort_rate: f64,
    pub total_checked: u64,
    pub total_check_failures: u64,
    pub detection_rate: Option<f64>,
    pub mean_detection_rate: Option<f64>,
    pub detection_rate_half_width: Option<f64>,
    pub total_remaining: u64,
    pub total_pooled: u64,
    pub distill_yield: Option<f64>,
    pub mean_distill_yield: Option<f64>,
    pub distill_yield_half_width: Option<f64>,
    pub total_sent_bits: u64,
    pub total_bit_errors: u64,
    pub bit_error_rate: Option<f64>,
    pub mean_bit_error_rate: Option<f64>,
    pub bit_error_rate_half_width: Option<f64>,
    pub mean_eve_correlation: Option<f64>,
}

/// Full report for one scenario batch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialReport {
    pub scenario: Scenario,
    pub trials: Vec<TrialResult>,
    pub aggregates: Aggregates,
}

fn channel_for(attack: Option<AttackKind>) -> QuantumChannel {
    let mut channel = QuantumChannel::clean();
    match attack {
        Some(AttackKind::InterceptResendBz) => {
            channel.install_hook(PartyId::Alice, intercept_resend(Basis::Bz));
        }
        Some(AttackKind::InterceptResendBx) => {
            channel.install_hook(PartyId::Alice, intercept_resend(Basis::Bx));
        }
        Some(AttackKind::EntangleProbe) => {
            channel.install_hook(PartyId::Alice, entangle_probe());
        }
        _ => {}
    }
    channel
}

fn run_trial(scenario: &Scenario, trial: u64) -> Result<TrialResult> {
    let session_seed = trial_seed(scenario.master_seed, trial);
    // Random message bits come from an auxiliary stream so the protocol
    // transcript depends only on the session seed.
    let mut message_rng = seeded(trial_seed(session_seed, 1));
    let bits = scenario.message.bits_for_trial(&mut message_rng)?;

    let config = SessionConfig {
        sequence_length: scenario.effective_sequence_length(),
        check_fraction: scenario.check_fraction,
        initial_state: scenario.initial_state,
        seed: session_seed,
    };
    let mut session = Session::with_channel(config, channel_for(scenario.attack))?;

    session.prepare_and_distribute()?;
    let checks = session.run_detecting_mode()?;
    let decision = session.decide_and_publish(&checks)?;

    let mut result = TrialResult {
        trial,
        verdict: Verdict::Aborted,
        sequence_length: session.config.sequence_length,
        checked: session.checked_count(),
        check_failures: session.check_failures(),
        detection_rate: None,
        remaining: session.remaining_after_checks(),
        pooled: 0,
        distill_yield: None,
        sent_bits: 0,
        bit_errors: 0,
        bit_error_rate: None,
        eve_correlation: None,
    };
    if result.checked > 0 {
        result.detection_rate = Some(result.check_failures as f64 / result.checked as f64);
    }

    if decision == Decision::Abort {
        return Ok(result);
    }
    result.verdict = Verdict::Completed;

    match scenario.attack {
        Some(kind) if kind.is_oca() => {
            let run = run_oca_session(&mut session, &bits, &OcaDecodeRule::correlation_table())?;
            result.sent_bits = run.sent.len();
            result.bit_errors = run.bit_errors();
            result.bit_error_rate = run.bit_error_rate();
        }
        _ => {
            session.distill()?;
            result.pooled = session.pool.len();
            if result.remaining > 0 {
                result.distill_yield = Some(result.pooled as f64 / result.remaining as f64);
            }
            let run = run_qsdc(&mut session, &bits)?;
            result.sent_bits = run.sent.len();
            result.bit_errors = run.bit_errors();
            result.bit_error_rate = run.bit_error_rate();
        }
    }

    if scenario.attack == Some(AttackKind::EntangleProbe) {
        let (matches, compared) = attacks::probe_correlation(&mut session)?;
        if compared > 0 {
            result.eve_correlation = Some(matches as f64 / compared as f64);
        }
    }
    Ok(result)
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    if present.is_empty() {
        None
    } else {
        Some(present.iter().sum::<f64>() / present.len() as f64)
    }
}

fn pooled_rate(successes: u64, total: u64) -> Option<f64> {
    (total > 0).then(|| successes as f64 / total as f64)
}

/// 3σ binomial half-width around a pooled rate.
fn binomial_half_width(rate: Option<f64>, n: u64) -> Option<f64> {
    let p = rate?;
    (n > 0).then(|| 3.0 * (p * (1.0 - p) / n as f64).sqrt())
}

fn aggregate(scenario: &Scenario, trials: &[TrialResult]) -> Aggregates {
    let aborted = trials
        .iter()
        .filter(|t| t.verdict == Verdict::Aborted)
        .count() as u64;
    let total_checked: u64 = trials.iter().map(|t| t.checked as u64).sum();
    let total_check_failures: u64 = trials.iter().map(|t| t.check_failures as u64).sum();
    let total_remaining: u64 = trials
        .iter()
        .filter(|t| t.distill_yield.is_some())
        .map(|t| t.remaining as u64)
        .sum();
    let total_pooled: u64 = trials.iter().map(|t| t.pooled as u64).sum();
    let total_sent_bits: u64 = trials.iter().map(|t| t.sent_bits as u64).sum();
    let total_bit_errors: u64 = trials.iter().map(|t| t.bit_errors as u64).sum();

    let detection_rate = pooled_rate(total_check_failures, total_checked);
    let distill_yield = pooled_rate(total_pooled, total_remaining);
    let bit_error_rate = pooled_rate(total_bit_errors, total_sent_bits);

    Aggregates {
        trials: scenario.trials,
        aborted,
        abort_rate: aborted as f64 / trials.len().max(1) as f64,
        total_checked,
        total_check_failures,
        detection_rate,
        mean_detection_rate: mean_of(trials.iter().map(|t| t.detection_rate)),
        detection_rate_half_width: binomial_half_width(detection_rate, total_checked),
        total_remaining,
        total_pooled,
        distill_yield,
        mean_distill_yield: mean_of(trials.iter().map(|t| t.distill_yield)),
        distill_yield_half_width: binomial_half_width(distill_yield, total_remaining),
        total_sent_bits,
        total_bit_errors,
        bit_error_rate,
        mean_bit_error_rate: mean_of(trials.iter().map(|t| t.bit_error_rate)),
        bit_error_rate_half_width: binomial_half_width(bit_error_rate, total_sent_bits),
        mean_eve_correlation: mean_of(trials.iter().map(|t| t.eve_correlation)),
    }
}

/// Run every trial of `scenario` and aggregate. Deterministic in
/// `(scenario, master_seed)`; trials derive independent streams, so the
/// execution order cannot matter.
pub fn run_scenario(scenario: &Scenario) -> Result<TrialReport> {
    scenario.validate()?;
    let trials: Vec<TrialResult> = (0..scenario.trials)
        .map(|t| run_trial(scenario, t))
        .collect::<Result<_>>()?;
    let aggregates = aggregate(scenario, &trials);
    Ok(TrialReport {
        scenario: scenario.clone(),
        trials,
        aggregates,
    })
}

/// Run a single trial by index (used to check order independence).
pub fn run_single_trial(scenario: &Scenario, trial: u64) -> Result<TrialResult> {
    scenario.validate()?;
    run_trial(scenario, trial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

/// Round to six significant digits; the shortest-round-trip float printer
/// then renders exactly those digits.
fn round_sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let exp: i32 = format!("{x:e}")
        .split('e')
        .nth(1)
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let scale = 10f64.powi(5 - exp);
    (x * scale).round() / scale
}

fn round_json_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                if let Some(x) = n.as_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig6(x)) {
                        *n = rounded;
                    }
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| round_sig6(v).to_string()).unwrap_or_default()
}

/// Fixed CSV header, one row per trial.
pub const CSV_HEADER: &str = "scenario,trial,verdict,sequence_length,checked,check_failures,\
detection_rate,remaining,pooled,distill_yield,sent_bits,bit_errors,bit_error_rate,eve_correlation";

/// Serialize a report with a stable field order and 6-significant-digit
/// floats; identical reports emit identical bytes.
pub fn emit_report(report: &TrialReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut value = serde_json::to_value(report).expect("report serializes");
            round_json_floats(&mut value);
            let mut bytes = serde_json::to_vec_pretty(&value).expect("value prints");
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => {
            let mut out = String::with_capacity(64 * (report.trials.len() + 1));
            out.push_str(CSV_HEADER);
            out.push('\n');
            for t in &report.trials {
                let verdict = match t.verdict {
                    Verdict::Completed => "completed",
                    Verdict::Aborted => "aborted",
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                    report.scenario.name,
                    t.trial,
                    verdict,
                    t.sequence_length,
                    t.checked,
                    t.check_failures,
                    fmt_opt(t.detection_rate),
                    t.remaining,
                    t.pooled,
                    fmt_opt(t.distill_yield),
                    t.sent_bits,
                    t.bit_errors,
                    fmt_opt(t.bit_error_rate),
                    fmt_opt(t.eve_correlation),
                ));
            }
            Ok(out.into_bytes())
        }
    }
}
