//! Rendering of results as CSV tables or JSON documents.
//!
//! Floats are written with 9 significant digits. A non-finite value anywhere
//! is reported as a numerical failure instead of being printed.

use rfwpt::fft::signed_bin;
use rfwpt::signal::SampledSignal;
use rfwpt::system::StageReport;
use rfwpt::{Complex, OptimizationResult64, PowerBreakdown64};

type Complex64 = Complex<f64>;
use serde_json::{json, Map, Value};

use crate::commands::SweepRow;
use crate::config::FormatName;
use crate::error::CliError;

/// Schema version of every emitted table and document.
pub const FORMAT_VERSION: u32 = 1;

pub const STAGE_COLUMNS: [&str; 7] = ["stage", "sample", "time_s", "re", "im", "freq_hz", "spectrum_mag"];

pub const SWEEP_COLUMNS: [&str; 15] = [
    "point",
    "seed",
    "assignment",
    "p_total",
    "p_dac",
    "p_mix",
    "p_lo",
    "p_hpa",
    "p_s",
    "p_out_dc",
    "v_out_dc",
    "feasible",
    "fitness",
    "flags",
    "error",
];

/// `x` with 9 significant digits.
pub fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

fn round9(x: f64) -> f64 {
    fmt9(x).parse().unwrap_or(x)
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numerical(format!("{name} is {x}")))
    }
}

fn num(name: &str, x: f64) -> Result<Value, CliError> {
    Ok(json!(round9(finite(name, x)?)))
}

fn cell(name: &str, x: f64) -> Result<String, CliError> {
    Ok(fmt9(finite(name, x)?))
}

/// Warnings attached to a result, currently only negative HPA power.
pub fn flags(b: &PowerBreakdown64) -> Vec<&'static str> {
    if b.hpa < 0.0 {
        vec!["negative_p_hpa"]
    } else {
        vec![]
    }
}

fn breakdown_json(b: &PowerBreakdown64) -> Result<Value, CliError> {
    Ok(json!({
        "p_dac": num("p_dac", b.dac)?,
        "p_mix": num("p_mix", b.mixer)?,
        "p_lo": num("p_lo", b.local_oscillator)?,
        "p_hpa": num("p_hpa", b.hpa)?,
        "p_s": num("p_s", b.signal)?,
        "p_total": num("p_total", b.total)?,
    }))
}

fn csv_text(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<(), CliError>, preamble: &str) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w)?;
    let body = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(format!("{preamble}{}", String::from_utf8_lossy(&body)))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Stage dumps in chain order. The low-pass stage reports the filter's own spectrum.
fn stages(report: &StageReport<f64>) -> [(&'static str, &SampledSignal<f64>); 6] {
    [
        ("digital", &report.digital),
        ("dac", &report.dac),
        ("lowpass", &report.lowpass),
        ("mixer", &report.mixer),
        ("hpa", &report.hpa),
        ("receiver", &report.receiver),
    ]
}

struct StageDump {
    time: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    freq: Vec<f64>,
    mag: Vec<f64>,
}

fn dump(s: &SampledSignal<f64>, spectrum: Option<&[Complex64]>) -> StageDump {
    let len = s.len();
    let spectrum = spectrum.map_or_else(|| s.spectrum(), <[Complex64]>::to_vec);
    let dt = 1.0 / s.sample_rate();
    StageDump {
        time: (0..len).map(|n| n as f64 * dt).collect(),
        re: s.samples().iter().map(|c| c.re).collect(),
        im: s.samples().iter().map(|c| c.im).collect(),
        freq: (0..len).map(|m| signed_bin(m, len) as f64 * s.tone_spacing()).collect(),
        mag: spectrum.iter().map(|c| c.norm() / len as f64).collect(),
    }
}

pub fn render_simulation(report: &StageReport<f64>, format: FormatName) -> Result<String, CliError> {
    let h = &report.evaluation.harvest;
    let b = &report.evaluation.breakdown;
    match format {
        FormatName::Structured => {
            let mut stage_map = Map::new();
            for (name, s) in stages(report) {
                let d = dump(s, (name == "lowpass").then_some(report.lowpass_spectrum.as_slice()));
                let arr = |label: &str, v: &[f64]| -> Result<Value, CliError> {
                    v.iter().map(|&x| num(label, x)).collect::<Result<Vec<_>, _>>().map(Value::Array)
                };
                stage_map.insert(
                    name.to_string(),
                    json!({
                        "sample_rate_hz": num("sample_rate", s.sample_rate())?,
                        "time_s": arr("time", &d.time)?,
                        "re": arr("re", &d.re)?,
                        "im": arr("im", &d.im)?,
                        "freq_hz": arr("freq", &d.freq)?,
                        "spectrum_mag": arr("spectrum", &d.mag)?,
                    }),
                );
            }
            let doc = json!({
                "format_version": FORMAT_VERSION,
                "harvest": {
                    "v_out_dc": num("v_out_dc", h.v_out_dc)?,
                    "p_out_dc": num("p_out_dc", h.p_out_dc)?,
                    "rhs_log": num("rhs_log", h.rhs_log)?,
                },
                "power": breakdown_json(b)?,
                "flags": flags(b),
                "stages": Value::Object(stage_map),
            });
            Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
        }
        FormatName::Table => {
            let preamble = format!(
                "# format_version={FORMAT_VERSION}\n# v_out_dc={}\n# p_out_dc={}\n# p_dac={}\n# p_mix={}\n# p_lo={}\n# p_hpa={}\n# p_s={}\n# p_total={}\n# flags={}\n",
                cell("v_out_dc", h.v_out_dc)?,
                cell("p_out_dc", h.p_out_dc)?,
                cell("p_dac", b.dac)?,
                cell("p_mix", b.mixer)?,
                cell("p_lo", b.local_oscillator)?,
                cell("p_hpa", b.hpa)?,
                cell("p_s", b.signal)?,
                cell("p_total", b.total)?,
                flags(b).join(";"),
            );
            csv_text(
                |w| {
                    w.write_record(STAGE_COLUMNS).map_err(csv_err)?;
                    for (name, s) in stages(report) {
                        let d = dump(s, (name == "lowpass").then_some(report.lowpass_spectrum.as_slice()));
                        for n in 0..s.len() {
                            w.write_record([
                                name.to_string(),
                                n.to_string(),
                                cell("time", d.time[n])?,
                                cell("re", d.re[n])?,
                                cell("im", d.im[n])?,
                                cell("freq", d.freq[n])?,
                                cell("spectrum", d.mag[n])?,
                            ])
                            .map_err(csv_err)?;
                        }
                    }
                    Ok(())
                },
                &preamble,
            )
        }
    }
}

pub fn render_optimization(r: &OptimizationResult64, seed: u64, format: FormatName) -> Result<String, CliError> {
    let b = &r.breakdown;
    let amps = r.tones.amplitudes();
    let phases = r.tones.phases();
    match format {
        FormatName::Structured => {
            let list = |label: &str, v: &[f64]| -> Result<Vec<Value>, CliError> { v.iter().map(|&x| num(label, x)).collect() };
            let doc = json!({
                "format_version": FORMAT_VERSION,
                "seed": seed,
                "feasible": r.feasible,
                "fitness": num("fitness", r.fitness)?,
                "v_out_dc": num("v_out_dc", r.v_out_dc)?,
                "p_out_dc": num("p_out_dc", r.p_out_dc)?,
                "power": breakdown_json(b)?,
                "flags": flags(b),
                "amplitudes": list("amplitude", amps)?,
                "phases": list("phase", phases)?,
                "phase_word": r.phase_word.words(),
                "evaluations": r.evaluations,
                "fitness_trace": list("fitness_trace", &r.fitness_trace)?,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
        }
        FormatName::Table => csv_text(
            |w| {
                let mut put = |k: String, v: String| w.write_record([k, v]).map_err(csv_err);
                put("field".into(), "value".into())?;
                put("format_version".into(), FORMAT_VERSION.to_string())?;
                put("seed".into(), seed.to_string())?;
                put("feasible".into(), r.feasible.to_string())?;
                put("fitness".into(), cell("fitness", r.fitness)?)?;
                put("v_out_dc".into(), cell("v_out_dc", r.v_out_dc)?)?;
                put("p_out_dc".into(), cell("p_out_dc", r.p_out_dc)?)?;
                put("p_dac".into(), cell("p_dac", b.dac)?)?;
                put("p_mix".into(), cell("p_mix", b.mixer)?)?;
                put("p_lo".into(), cell("p_lo", b.local_oscillator)?)?;
                put("p_hpa".into(), cell("p_hpa", b.hpa)?)?;
                put("p_s".into(), cell("p_s", b.signal)?)?;
                put("p_total".into(), cell("p_total", b.total)?)?;
                put("flags".into(), flags(b).join(";"))?;
                put("evaluations".into(), r.evaluations.to_string())?;
                for (k, a) in amps.iter().enumerate() {
                    put(format!("amplitude[{k}]"), cell("amplitude", *a)?)?;
                }
                for (k, p) in phases.iter().enumerate() {
                    put(format!("phase[{k}]"), cell("phase", *p)?)?;
                }
                for (i, b) in r.phase_word.words().iter().enumerate() {
                    put(format!("phase_word[{i}]"), b.to_string())?;
                }
                for (t, f) in r.fitness_trace.iter().enumerate() {
                    put(format!("fitness_trace[{t}]"), cell("fitness_trace", *f)?)?;
                }
                Ok(())
            },
            "",
        ),
    }
}

fn sweep_cells(row: &SweepRow) -> Result<Vec<String>, CliError> {
    let mut cells = vec![row.point.to_string(), row.seed.to_string(), row.assignment.clone()];
    match &row.outcome {
        Ok(r) => {
            let b = &r.breakdown;
            for (name, x) in [
                ("p_total", b.total),
                ("p_dac", b.dac),
                ("p_mix", b.mixer),
                ("p_lo", b.local_oscillator),
                ("p_hpa", b.hpa),
                ("p_s", b.signal),
                ("p_out_dc", r.p_out_dc),
                ("v_out_dc", r.v_out_dc),
            ] {
                cells.push(cell(name, x)?);
            }
            cells.push(r.feasible.to_string());
            cells.push(cell("fitness", r.fitness)?);
            cells.push(flags(b).join(";"));
            cells.push(String::new());
        }
        Err(e) => {
            cells.extend(std::iter::repeat_n(String::new(), 11));
            cells.push(e.clone());
        }
    }
    Ok(cells)
}

pub fn render_sweep(rows: &[SweepRow], format: FormatName) -> Result<String, CliError> {
    match format {
        FormatName::Table => csv_text(
            |w| {
                w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
                for row in rows {
                    w.write_record(sweep_cells(row)?).map_err(csv_err)?;
                }
                Ok(())
            },
            &format!("# format_version={FORMAT_VERSION}\n"),
        ),
        FormatName::Structured => {
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                let mut m = Map::new();
                m.insert("point".into(), json!(row.point));
                m.insert("seed".into(), json!(row.seed));
                m.insert("assignment".into(), json!(row.assignment));
                match &row.outcome {
                    Ok(r) => {
                        m.insert("power".into(), breakdown_json(&r.breakdown)?);
                        m.insert("p_out_dc".into(), num("p_out_dc", r.p_out_dc)?);
                        m.insert("v_out_dc".into(), num("v_out_dc", r.v_out_dc)?);
                        m.insert("feasible".into(), json!(r.feasible));
                        m.insert("fitness".into(), num("fitness", r.fitness)?);
                        m.insert("flags".into(), json!(flags(&r.breakdown)));
                    }
                    Err(e) => {
                        m.insert("error".into(), json!(e));
                    }
                }
                out.push(Value::Object(m));
            }
            let doc = json!({ "format_version": FORMAT_VERSION, "rows": out });
            Ok(serde_json::to_string_pretty(&doc).expect("json") + "\n")
        }
    }
}
