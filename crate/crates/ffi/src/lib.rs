//! C ABI for the scenario runner.
//!
//! The surface is deliberately small: build a scenario (from a built-in
//! name or a JSON description), run it, and emit the report as a JSON or
//! CSV string. Handles are opaque; every function returns a status code and
//! writes its result through an out-pointer. Strings returned by this
//! library must be released with [`qsdc_sim_string_free`], handles with
//! their matching `_free` function.
//!
//! The generated header lives at `include/qsdc_sim.h`.

use std::ffi::{c_char, CStr, CString};

use qsdc_sim::harness::{emit_report, run_scenario, MessageSpec, ReportFormat, Scenario};
use qsdc_sim::selftest;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsdcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidScenario = 3,
    InvalidFormat = 4,
    RunFailed = 5,
}

/// Report serialization formats.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QsdcFormat {
    Json = 0,
    Csv = 1,
}

/// Opaque scenario handle.
pub struct QsdcScenario {
    inner: Scenario,
}

/// Opaque report handle.
pub struct QsdcReport {
    inner: qsdc_sim::TrialReport,
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qsdc_sim_status_name(status: QsdcStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        QsdcStatus::Ok => b"ok\0",
        QsdcStatus::NullPointer => b"null pointer argument\0",
        QsdcStatus::InvalidUtf8 => b"argument is not valid UTF-8\0",
        QsdcStatus::InvalidScenario => b"invalid or unknown scenario\0",
        QsdcStatus::InvalidFormat => b"unknown report format\0",
        QsdcStatus::RunFailed => b"scenario run failed\0",
    };
    name.as_ptr().cast()
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, QsdcStatus> {
    if ptr.is_null() {
        return Err(QsdcStatus::NullPointer);
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| QsdcStatus::InvalidUtf8)
}

fn give_string(s: String, out: *mut *mut c_char) -> QsdcStatus {
    match CString::new(s) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            QsdcStatus::Ok
        }
        Err(_) => QsdcStatus::RunFailed,
    }
}

/// Create a built-in scenario by name ("honest-w", "oca-xi", ...).
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_builtin(
    name: *const c_char,
    trials: u64,
    master_seed: u64,
    out: *mut *mut QsdcScenario,
) -> QsdcStatus {
    if out.is_null() {
        return QsdcStatus::NullPointer;
    }
    let name = match read_str(name) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match Scenario::builtin(name, trials, master_seed) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(QsdcScenario { inner }));
            QsdcStatus::Ok
        }
        Err(_) => QsdcStatus::InvalidScenario,
    }
}

/// Create a scenario from its JSON description (the same object that
/// appears under `"scenario"` in emitted reports).
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_from_json(
    json: *const c_char,
    out: *mut *mut QsdcScenario,
) -> QsdcStatus {
    if out.is_null() {
        return QsdcStatus::NullPointer;
    }
    let json = match read_str(json) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let inner: Scenario = match serde_json::from_str(json) {
        Ok(s) => s,
        Err(_) => return QsdcStatus::InvalidScenario,
    };
    if inner.validate().is_err() {
        return QsdcStatus::InvalidScenario;
    }
    *out = Box::into_raw(Box::new(QsdcScenario { inner }));
    QsdcStatus::Ok
}

/// Replace the scenario's message with fixed bits, e.g. "010110".
///
/// # Safety
/// `scenario` must come from a constructor of this library; `bits` must be
/// a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_set_message(
    scenario: *mut QsdcScenario,
    bits: *const c_char,
) -> QsdcStatus {
    if scenario.is_null() {
        return QsdcStatus::NullPointer;
    }
    let bits = match read_str(bits) {
        Ok(s) => s,
        Err(status) => return status,
    };
    if qsdc_sim::harness::parse_bits(bits).is_err() {
        return QsdcStatus::InvalidScenario;
    }
    (*scenario).inner.message = MessageSpec::Bits(bits.to_string());
    QsdcStatus::Ok
}

/// Replace the scenario's message with fresh random bits per trial.
///
/// # Safety
/// `scenario` must come from a constructor of this library.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_set_random_message(
    scenario: *mut QsdcScenario,
    length: usize,
) -> QsdcStatus {
    if scenario.is_null() {
        return QsdcStatus::NullPointer;
    }
    (*scenario).inner.message = MessageSpec::RandomLen(length);
    QsdcStatus::Ok
}

/// Set the detecting-mode fraction (must be strictly between 0 and 1).
///
/// # Safety
/// `scenario` must come from a constructor of this library.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_set_check_fraction(
    scenario: *mut QsdcScenario,
    fraction: f64,
) -> QsdcStatus {
    if scenario.is_null() {
        return QsdcStatus::NullPointer;
    }
    (*scenario).inner.check_fraction = fraction;
    if (*scenario).inner.validate().is_err() {
        return QsdcStatus::InvalidScenario;
    }
    QsdcStatus::Ok
}

/// Override the triples per trial; 0 restores the derived default.
///
/// # Safety
/// `scenario` must come from a constructor of this library.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_set_sequence_length(
    scenario: *mut QsdcScenario,
    length: usize,
) -> QsdcStatus {
    if scenario.is_null() {
        return QsdcStatus::NullPointer;
    }
    (*scenario).inner.sequence_length = (length > 0).then_some(length);
    QsdcStatus::Ok
}

/// Serialize the scenario to JSON (release with `qsdc_sim_string_free`).
///
/// # Safety
/// `scenario` must come from a constructor of this library; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_to_json(
    scenario: *const QsdcScenario,
    out: *mut *mut c_char,
) -> QsdcStatus {
    if scenario.is_null() || out.is_null() {
        return QsdcStatus::NullPointer;
    }
    match serde_json::to_string(&(*scenario).inner) {
        Ok(json) => give_string(json, out),
        Err(_) => QsdcStatus::RunFailed,
    }
}

/// Release a scenario handle.
///
/// # Safety
/// `scenario` must come from a constructor of this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_scenario_free(scenario: *mut QsdcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Run every trial of the scenario and hand back a report handle.
///
/// # Safety
/// `scenario` must come from a constructor of this library; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_run(
    scenario: *const QsdcScenario,
    out: *mut *mut QsdcReport,
) -> QsdcStatus {
    if scenario.is_null() || out.is_null() {
        return QsdcStatus::NullPointer;
    }
    let scenario = &(*scenario).inner;
    if scenario.validate().is_err() {
        return QsdcStatus::InvalidScenario;
    }
    match run_scenario(scenario) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(QsdcReport { inner }));
            QsdcStatus::Ok
        }
        Err(_) => QsdcStatus::RunFailed,
    }
}

/// Serialize a report (release the string with `qsdc_sim_string_free`).
/// JSON is canonical and byte-stable for a fixed scenario and seed.
///
/// # Safety
/// `report` must come from `qsdc_sim_run`; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_report_emit(
    report: *const QsdcReport,
    format: QsdcFormat,
    out: *mut *mut c_char,
) -> QsdcStatus {
    if report.is_null() || out.is_null() {
        return QsdcStatus::NullPointer;
    }
    let format = match format {
        QsdcFormat::Json => ReportFormat::Json,
        QsdcFormat::Csv => ReportFormat::Csv,
    };
    match emit_report(&(*report).inner, format) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(text) => give_string(text, out),
            Err(_) => QsdcStatus::RunFailed,
        },
        Err(_) => QsdcStatus::InvalidFormat,
    }
}

/// Release a report handle.
///
/// # Safety
/// `report` must come from `qsdc_sim_run` or be null.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_report_free(report: *mut QsdcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must have been returned by this library or be null.
#[no_mangle]
pub unsafe extern "C" fn qsdc_sim_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Run the engine invariant suite; returns the number of failed checks
/// (0 means everything holds at the 1e-12 tolerance).
#[no_mangle]
pub extern "C" fn qsdc_sim_self_test() -> u32 {
    selftest::run_all().iter().filter(|c| !c.passed).count() as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    unsafe fn take_string(ptr: *mut c_char) -> String {
        let text = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        qsdc_sim_string_free(ptr);
        text
    }

    #[test]
    fn builtin_run_and_emit_round_trip() {
        unsafe {
            let mut scenario: *mut QsdcScenario = ptr::null_mut();
            let status =
                qsdc_sim_scenario_builtin(cstring("honest-w").as_ptr(), 2, 7, &mut scenario);
            assert_eq!(status, QsdcStatus::Ok);

            let mut report: *mut QsdcReport = ptr::null_mut();
            assert_eq!(qsdc_sim_run(scenario, &mut report), QsdcStatus::Ok);

            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(
                qsdc_sim_report_emit(report, QsdcFormat::Json, &mut text),
                QsdcStatus::Ok
            );
            let json: serde_json::Value = serde_json::from_str(&take_string(text)).unwrap();
            assert_eq!(json["scenario"]["name"], "honest-w");
            assert_eq!(json["aggregates"]["bit_error_rate"], 0.0);

            qsdc_sim_report_free(report);
            qsdc_sim_scenario_free(scenario);
        }
    }

    #[test]
    fn reports_are_deterministic_through_the_abi() {
        let emit_once = || unsafe {
            let mut scenario: *mut QsdcScenario = ptr::null_mut();
            qsdc_sim_scenario_builtin(cstring("eve-probe").as_ptr(), 2, 41, &mut scenario);
            let mut report: *mut QsdcReport = ptr::null_mut();
            assert_eq!(qsdc_sim_run(scenario, &mut report), QsdcStatus::Ok);
            let mut text: *mut c_char = ptr::null_mut();
            qsdc_sim_report_emit(report, QsdcFormat::Json, &mut text);
            let out = take_string(text);
            qsdc_sim_report_free(report);
            qsdc_sim_scenario_free(scenario);
            out
        };
        assert_eq!(emit_once(), emit_once());
    }

    #[test]
    fn scenario_json_round_trip() {
        unsafe {
            let mut scenario: *mut QsdcScenario = ptr::null_mut();
            qsdc_sim_scenario_builtin(cstring("oca-xi").as_ptr(), 1, 13, &mut scenario);
            assert_eq!(
                qsdc_sim_scenario_set_random_message(scenario, 32),
                QsdcStatus::Ok
            );

            let mut text: *mut c_char = ptr::null_mut();
            assert_eq!(
                qsdc_sim_scenario_to_json(scenario, &mut text),
                QsdcStatus::Ok
            );
            let json = take_string(text);
            qsdc_sim_scenario_free(scenario);

            let mut reparsed: *mut QsdcScenario = ptr::null_mut();
            assert_eq!(
                qsdc_sim_scenario_from_json(cstring(&json).as_ptr(), &mut reparsed),
                QsdcStatus::Ok
            );
            let mut report: *mut QsdcReport = ptr::null_mut();
            assert_eq!(qsdc_sim_run(reparsed, &mut report), QsdcStatus::Ok);
            let mut emitted: *mut c_char = ptr::null_mut();
            assert_eq!(
                qsdc_sim_report_emit(report, QsdcFormat::Csv, &mut emitted),
                QsdcStatus::Ok
            );
            let csv = take_string(emitted);
            assert!(csv.starts_with("scenario,trial,"));
            qsdc_sim_report_free(report);
            qsdc_sim_scenario_free(reparsed);
        }
    }

    #[test]
    fn error_codes_cover_bad_inputs() {
        unsafe {
            let mut scenario: *mut QsdcScenario = ptr::null_mut();
            assert_eq!(
                qsdc_sim_scenario_builtin(cstring("bogus").as_ptr(), 1, 1, &mut scenario),
                QsdcStatus::InvalidScenario
            );
            assert_eq!(
                qsdc_sim_scenario_builtin(ptr::null(), 1, 1, &mut scenario),
                QsdcStatus::NullPointer
            );
            assert_eq!(
                qsdc_sim_scenario_builtin(cstring("honest-w").as_ptr(), 1, 1, ptr::null_mut()),
                QsdcStatus::NullPointer
            );

            let mut report: *mut QsdcReport = ptr::null_mut();
            assert_eq!(
                qsdc_sim_run(ptr::null(), &mut report),
                QsdcStatus::NullPointer
            );

            assert_eq!(
                qsdc_sim_scenario_from_json(cstring("{not json").as_ptr(), &mut scenario),
                QsdcStatus::InvalidScenario
            );

            // Invariant violations are rejected at parse time too.
            let mismatched = r#"{
                "name": "oca-w",
                "initial_state": "xi",
                "attack": "oca-w",
                "message": {"bits": "01"},
                "trials": 1,
                "master_seed": 1,
                "check_fraction": 0.5,
                "sequence_length": null
            }"#;
            assert_eq!(
                qsdc_sim_scenario_from_json(cstring(mismatched).as_ptr(), &mut scenario),
                QsdcStatus::InvalidScenario
            );

            qsdc_sim_scenario_builtin(cstring("honest-w").as_ptr(), 1, 1, &mut scenario);
            assert_eq!(
                qsdc_sim_scenario_set_check_fraction(scenario, 2.0),
                QsdcStatus::InvalidScenario
            );
            assert_eq!(
                qsdc_sim_scenario_set_message(scenario, cstring("01x").as_ptr()),
                QsdcStatus::InvalidScenario
            );
            qsdc_sim_scenario_free(scenario);

            // Frees tolerate null.
            qsdc_sim_scenario_free(ptr::null_mut());
            qsdc_sim_report_free(ptr::null_mut());
            qsdc_sim_string_free(ptr::null_mut());
        }
    }

    #[test]
    fn self_test_reports_zero_failures() {
        assert_eq!(qsdc_sim_self_test(), 0);
    }

    #[test]
    fn status_names_are_stable() {
        unsafe {
            let name = CStr::from_ptr(qsdc_sim_status_name(QsdcStatus::Ok));
            assert_eq!(name.to_str().unwrap(), "ok");
            let name = CStr::from_ptr(qsdc_sim_status_name(QsdcStatus::InvalidScenario));
            assert_eq!(name.to_str().unwrap(), "invalid or unknown scenario");
        }
    }
}
