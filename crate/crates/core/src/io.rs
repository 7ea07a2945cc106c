//! Versioned state files, protocol reports and CSV tables.
//!
//! State amplitudes are written with 17 significant digits; table values use
//! the shortest representation that parses back to the same `f64`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::Value;
use std::io::Write;

use crate::error::{CatsimError, Result};
use crate::fock::{PureState, NORM_TOLERANCE};
use crate::modes::{MixedState, PhaseSpaceGrid, TwoModePureState};
use crate::protocols::selftest::SelfTestCheck;
use crate::protocols::{CatProtocolReport, EcsReport, HeraldedState, NoonRow, SweepRow};

pub const STATE_FORMAT: &str = "catsim-state-v1";

/// Any state that can be stored in a state file.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFile {
    Single(PureState),
    TwoMode(TwoModePureState),
    Mixed(MixedState),
}

impl From<HeraldedState> for StateFile {
    fn from(s: HeraldedState) -> Self {
        match s {
            HeraldedState::Pure(p) => StateFile::Single(p),
            HeraldedState::Mixed(m) => StateFile::Mixed(m),
        }
    }
}

fn bad(msg: impl Into<String>) -> CatsimError {
    CatsimError::InvalidState(msg.into())
}

/// Table number: shortest round-trip form, exponent notation outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex_text(z: C64) -> String {
    format!("[{},{}]", fmt_full(z.re), fmt_full(z.im))
}

fn vector_text<'a>(values: impl IntoIterator<Item = &'a C64>) -> String {
    let parts: Vec<String> = values.into_iter().map(|z| complex_text(*z)).collect();
    format!("[{}]", parts.join(","))
}

fn matrix_text(m: &Array2<C64>) -> String {
    let rows: Vec<String> = m.rows().into_iter().map(|r| vector_text(r.iter())).collect();
    format!("[{}]", rows.join(","))
}

fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("generated JSON is valid")
}

#[derive(Serialize)]
struct SingleOut {
    format: &'static str,
    modes: u8,
    cutoff: usize,
    amplitudes: Box<RawValue>,
}

#[derive(Serialize)]
struct TwoModeOut {
    format: &'static str,
    modes: u8,
    cutoff_a: usize,
    cutoff_b: usize,
    amplitudes: Box<RawValue>,
}

#[derive(Serialize)]
struct MixedOut {
    format: &'static str,
    modes: usize,
    dims: Vec<usize>,
    density: Box<RawValue>,
}

fn state_raw(state: &StateFile) -> Box<RawValue> {
    let text = match state {
        StateFile::Single(s) => serde_json::to_string(&SingleOut {
            format: STATE_FORMAT,
            modes: 1,
            cutoff: s.cutoff(),
            amplitudes: raw(vector_text(s.amplitudes())),
        }),
        StateFile::TwoMode(s) => serde_json::to_string(&TwoModeOut {
            format: STATE_FORMAT,
            modes: 2,
            cutoff_a: s.cutoff_a(),
            cutoff_b: s.cutoff_b(),
            amplitudes: raw(matrix_text(s.amplitudes())),
        }),
        StateFile::Mixed(m) => serde_json::to_string(&MixedOut {
            format: STATE_FORMAT,
            modes: m.modes(),
            dims: m.dims().to_vec(),
            density: raw(matrix_text(m.matrix())),
        }),
    };
    raw(text.expect("serializable"))
}

/// Serializes a state as a `catsim-state-v1` document.
pub fn state_to_json(state: &StateFile) -> String {
    let mut text = state_raw(state).get().to_string();
    text.push('\n');
    text
}

fn parse_complex(v: &Value) -> Result<C64> {
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(bad("amplitude entries must be numbers")),
        },
        _ => Err(bad("amplitudes must be [re, im] pairs")),
    }
}

fn parse_vector(v: &Value) -> Result<Vec<C64>> {
    v.as_array().ok_or_else(|| bad("expected an array of amplitudes"))?.iter().map(parse_complex).collect()
}

fn parse_matrix(v: &Value, rows: usize, cols: usize) -> Result<Array2<C64>> {
    let outer = v.as_array().ok_or_else(|| bad("expected a nested amplitude array"))?;
    if outer.len() != rows {
        return Err(bad(format!("expected {rows} rows, found {}", outer.len())));
    }
    let mut m = Array2::<C64>::zeros((rows, cols));
    for (i, row) in outer.iter().enumerate() {
        let row = parse_vector(row)?;
        if row.len() != cols {
            return Err(bad(format!("row {i} has {} entries, expected {cols}", row.len())));
        }
        for (j, z) in row.into_iter().enumerate() {
            m[(i, j)] = z;
        }
    }
    Ok(m)
}

fn usize_field(doc: &Value, key: &str) -> Result<usize> {
    doc.get(key).and_then(Value::as_u64).map(|v| v as usize).ok_or_else(|| bad(format!("missing integer field \"{key}\"")))
}

/// Parses a state document. A protocol report whose `"state"` key holds a
/// state document is accepted too.
pub fn state_from_json(text: &str) -> Result<StateFile> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(format!("not valid JSON: {e}")))?;
    let doc = if doc.get("format").is_none() { doc.get("state").cloned().unwrap_or(doc) } else { doc };
    match doc.get("format").and_then(Value::as_str) {
        Some(STATE_FORMAT) => {}
        Some(other) => return Err(bad(format!("unsupported state format \"{other}\""))),
        None => return Err(bad("missing \"format\" field")),
    }
    let modes = usize_field(&doc, "modes")?;
    if let Some(density) = doc.get("density") {
        let dims: Vec<usize> = doc
            .get("dims")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("mixed state needs \"dims\""))?
            .iter()
            .map(|d| d.as_u64().map(|v| v as usize).ok_or_else(|| bad("dims must be integers")))
            .collect::<Result<_>>()?;
        if dims.len() != modes {
            return Err(bad("\"dims\" length must equal \"modes\""));
        }
        let total: usize = dims.iter().product();
        let rho = parse_matrix(density, total, total)?;
        let m = MixedState::from_matrix(dims, rho)?;
        if (m.trace() - 1.0).abs() > NORM_TOLERANCE {
            return Err(bad(format!("density matrix has trace {}", m.trace())));
        }
        return Ok(StateFile::Mixed(m));
    }
    let amplitudes = doc.get("amplitudes").ok_or_else(|| bad("missing \"amplitudes\""))?;
    match modes {
        1 => {
            let cutoff = usize_field(&doc, "cutoff")?;
            let v = parse_vector(amplitudes)?;
            if v.len() != cutoff + 1 {
                return Err(bad(format!("cutoff {cutoff} needs {} amplitudes, found {}", cutoff + 1, v.len())));
            }
            let s = PureState::from_amplitudes(v)?;
            if !s.is_normalized() {
                return Err(bad(format!("state is not normalized, norm² = {}", s.norm_sqr())));
            }
            Ok(StateFile::Single(s))
        }
        2 => {
            let (ca, cb) = (usize_field(&doc, "cutoff_a")?, usize_field(&doc, "cutoff_b")?);
            let s = TwoModePureState::from_amplitudes(parse_matrix(amplitudes, ca + 1, cb + 1)?)?;
            if !s.is_normalized() {
                return Err(bad(format!("state is not normalized, norm² = {}", s.norm_sqr())));
            }
            Ok(StateFile::TwoMode(s))
        }
        other => Err(bad(format!("unsupported mode count {other}"))),
    }
}

#[derive(Serialize)]
struct CatReportOut<'a> {
    herald_probability: f64,
    fidelity: f64,
    alpha_star: f64,
    fidelity_star: f64,
    xi_t: f64,
    config: &'a crate::protocols::ProtocolConfig,
    state: Box<RawValue>,
}

/// JSON report of a heralded cat run.
pub fn cat_report_json(r: &CatProtocolReport) -> String {
    let out = CatReportOut {
        herald_probability: r.herald_probability,
        fidelity: r.fidelity,
        alpha_star: r.alpha_star,
        fidelity_star: r.fidelity_star,
        xi_t: r.xi_t,
        config: &r.config,
        state: state_raw(&StateFile::from(r.state.clone())),
    };
    serde_json::to_string_pretty(&out).expect("serializable") + "\n"
}

#[derive(Serialize)]
struct EcsReportOut<'a> {
    herald_probability: f64,
    fidelity_vs_qudit_ecs: f64,
    xi_t: f64,
    config: &'a crate::protocols::ProtocolConfig,
    coefficients: Vec<CoefficientOut>,
    state: Box<RawValue>,
}

#[derive(Serialize)]
struct CoefficientOut {
    n: usize,
    upper: [f64; 2],
    lower: [f64; 2],
    tau_exact: f64,
    tau_signed: f64,
}

/// JSON report of the two-mode protocol, listing coefficients next to both
/// closed-form coefficient formulas.
pub fn ecs_report_json(r: &EcsReport, max_n: usize) -> Result<String> {
    let cfg = &r.config;
    let coefficients = r
        .coefficients
        .iter()
        .filter(|c| c.n <= max_n)
        .map(|c| {
            Ok(CoefficientOut {
                n: c.n,
                upper: [c.upper.re, c.upper.im],
                lower: [c.lower.re, c.lower.im],
                tau_exact: crate::analytic::tau_exact(c.n, cfg.xi.abs(), cfg.transmission)?,
                tau_signed: crate::analytic::tau_signed(c.n, cfg.xi.abs(), cfg.transmission)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let out = EcsReportOut {
        herald_probability: r.herald_probability,
        fidelity_vs_qudit_ecs: r.fidelity_vs_qudit_ecs,
        xi_t: cfg.xi_t(),
        config: cfg,
        coefficients,
        state: state_raw(&StateFile::TwoMode(r.state.clone())),
    };
    Ok(serde_json::to_string_pretty(&out).expect("serializable") + "\n")
}

fn csv_error(e: csv::Error) -> CatsimError {
    CatsimError::InvalidArgument(format!("CSV output failed: {e}"))
}

fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush().map_err(|e| CatsimError::InvalidArgument(format!("CSV output failed: {e}")))
}

pub fn write_fig2_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_table(
        out,
        &["alpha", "xi", "fidelity"],
        rows.iter().map(|r| vec![fmt_f64(r.alpha), fmt_f64(r.xi.unwrap_or(f64::NAN)), fmt_f64(r.fidelity)]),
    )
}

pub fn write_fig3_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_table(out, &["xi_T", "alpha", "fidelity"], rows.iter().map(|r| vec![fmt_f64(r.xi_t), fmt_f64(r.alpha), fmt_f64(r.fidelity)]))
}

pub fn write_noon_csv<W: Write>(out: W, rows: &[NoonRow]) -> Result<()> {
    write_table(
        out,
        &["state", "theta", "eta", "trace_distance"],
        rows.iter().map(|r| vec![r.state.to_string(), fmt_f64(r.theta), fmt_f64(r.eta), fmt_f64(r.trace_distance)]),
    )
}

pub fn write_wigner_csv<W: Write>(out: W, grid: &PhaseSpaceGrid, w: &Array2<f64>) -> Result<()> {
    let rows = grid.x.iter().enumerate().flat_map(|(i, &x)| {
        grid.p.iter().enumerate().map(move |(j, &p)| vec![fmt_f64(x), fmt_f64(p), fmt_f64(w[(i, j)])])
    });
    write_table(out, &["x", "p", "w"], rows)
}

pub fn write_quadrature_csv<W: Write>(out: W, xs: &[f64], pdf: &[f64]) -> Result<()> {
    write_table(out, &["x", "pdf"], xs.iter().zip(pdf).map(|(x, p)| vec![fmt_f64(*x), fmt_f64(*p)]))
}

pub fn write_selftest_csv<W: Write>(out: W, checks: &[SelfTestCheck]) -> Result<()> {
    write_table(
        out,
        &["check", "deviation", "tolerance", "passed"],
        checks.iter().map(|c| vec![c.name.to_string(), fmt_f64(c.deviation), fmt_f64(c.tolerance), c.passed.to_string()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{make_cat, make_coherent, CatSign};
    use crate::modes::{beam_splitter, tensor, BeamSplitterSpec};

    #[test]
    fn number_formatting_round_trips() {
        for x in [0.0, 0.1, -1.5e-7, 1.0 / 3.0, 6.02e23, 1e-300, -0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_full(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn single_mode_round_trip() {
        let s = make_cat(C64::new(0.3, 1.1), CatSign::Minus, 30).unwrap();
        let text = state_to_json(&StateFile::Single(s.clone()));
        assert!(text.starts_with("{\"format\":\"catsim-state-v1\",\"modes\":1,\"cutoff\":30,\"amplitudes\":[["));
        assert_eq!(state_from_json(&text).unwrap(), StateFile::Single(s));
    }

    #[test]
    fn two_mode_and_mixed_round_trip() {
        let t = tensor(&make_coherent(C64::new(0.3, 0.1), 20).unwrap(), &make_coherent(C64::new(-0.2, 0.0), 20).unwrap());
        let t = beam_splitter(&t, BeamSplitterSpec::new(0.7).unwrap()).unwrap();
        let text = state_to_json(&StateFile::TwoMode(t.clone()));
        assert_eq!(state_from_json(&text).unwrap(), StateFile::TwoMode(t.clone()));
        let m = MixedState::from_two_mode(&t);
        let text = state_to_json(&StateFile::Mixed(m.clone()));
        assert_eq!(state_from_json(&text).unwrap(), StateFile::Mixed(m));
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(state_from_json("not json").is_err());
        assert!(state_from_json(r#"{"format":"other","modes":1}"#).is_err());
        assert!(state_from_json(r#"{"format":"catsim-state-v1","modes":1,"cutoff":1,"amplitudes":[[1,0]]}"#).is_err());
        assert!(state_from_json(r#"{"format":"catsim-state-v1","modes":1,"cutoff":1,"amplitudes":[[2,0],[0,0]]}"#).is_err());
        let ok = r#"{"format":"catsim-state-v1","modes":1,"cutoff":1,"amplitudes":[[0,0],[1,0]]}"#;
        assert!(state_from_json(ok).is_ok());
        let wrapped = format!(r#"{{"fidelity":0.5,"state":{ok}}}"#);
        assert!(state_from_json(&wrapped).is_ok());
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        write_quadrature_csv(&mut buf, &[0.0, 0.5], &[0.25, 1e-9]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,pdf\n0,0.25\n0.5,1e-9\n");
    }
}
