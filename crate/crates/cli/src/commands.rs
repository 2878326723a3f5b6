//! The five subcommands: grid scans, event-time queries, figure data,
//! invariant suites and reservoir validation.

use std::io::Write;

use cavres::checks::{all_passed, run_all, CheckTolerances};
use cavres::dynamics::{critical_angles, event_times, plateau, scan_grid, ScanRow};
use cavres::reservoir::{
    phase_rotation_equivalence, validate_flat_spectrum, ReservoirModel, ReservoirSpec,
};
use cavres::Error as CoreError;
use serde_json::json;

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

/// 17 significant digits: enough for a lossless f64 round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn core_err(e: CoreError) -> CliError {
    match e {
        CoreError::BeyondHorizon { .. } | CoreError::InvalidParameter(_) => {
            CliError::usage(e.to_string())
        }
        other => CliError::failure(other.to_string()),
    }
}

const EVOLVE_HEADER: &str = "gamma,kappa_t,c2_c1c2,c2_r1r2,c2_c1r1,c2_c2r2,c2_c1r2,c2_c2r1,e_bb,e_qb_c1,e_qb_r1,e_ms,c2_block";

fn evolve_row_values(row: &ScanRow) -> [f64; 13] {
    let r = &row.report;
    [
        row.gamma,
        row.kappa_t,
        r.c2_c1c2,
        r.c2_r1r2,
        r.c2_c1r1,
        r.c2_c2r2,
        r.c2_c1r2,
        r.c2_c2r1,
        r.e_bb,
        r.e_qb_c1,
        r.e_qb_r1,
        r.e_ms,
        r.c2_block,
    ]
}

/// Emit one scan row per grid point, gamma-major, as CSV or JSON.
pub fn cmd_evolve(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = scan_grid(&cfg.params, &cfg.t_grid(), &cfg.gamma_grid()).map_err(core_err)?;
    match cfg.format {
        OutputFormat::Csv => {
            let mut buf = String::new();
            buf.push_str(EVOLVE_HEADER);
            buf.push('\n');
            for row in &rows {
                let values = evolve_row_values(row);
                let mut first = true;
                for v in values {
                    if !first {
                        buf.push(',');
                    }
                    buf.push_str(&fmt_f64(v));
                    first = false;
                }
                buf.push('\n');
            }
            out.write_all(buf.as_bytes()).map_err(CliError::io)?;
        }
        OutputFormat::Json => {
            let array: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    let names = EVOLVE_HEADER.split(',');
                    let values = evolve_row_values(row);
                    let mut obj = serde_json::Map::new();
                    for (name, value) in names.zip(values) {
                        obj.insert(name.to_string(), json!(value));
                    }
                    serde_json::Value::Object(obj)
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &array).map_err(|e| CliError::io(e.into()))?;
            out.write_all(b"\n").map_err(CliError::io)?;
        }
    }
    Ok(())
}

/// Event times (converted to real time via kappa), critical angles and
/// the plateau interval, as JSON with null for absent events.
pub fn cmd_times(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let p = &cfg.params;
    let kappa = p.kappa();
    let times = event_times(p).map_err(core_err)?;
    let angles = critical_angles(p).map_err(core_err)?;
    let plat = plateau(p).map_err(core_err)?;

    let scale = |kt: Option<f64>| kt.map(|v| v / kappa);
    let value = json!({
        "esd_c1c2": scale(times.esd_c1c2),
        "esb_r1r2": scale(times.esb_r1r2),
        "esd_c1r2": scale(times.esd_c1r2),
        "esb_c1r2": scale(times.esb_c1r2),
        "gamma_window": angles.gamma_window,
        "gamma_route": angles.gamma_route,
        "plateau": plat.map(|p| json!({
            "start": p.start / kappa,
            "end": p.end / kappa,
            "width": p.width / kappa,
        })),
    });
    serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| CliError::io(e.into()))?;
    out.write_all(b"\n").map_err(CliError::io)?;
    Ok(())
}

/// A figure's identifier and data layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    F1a,
    F1b,
    F1c,
    F1d,
    F2,
    F3a,
    F3b,
    F4a,
    F4b,
    F4c,
    F4d,
}

impl FigureId {
    pub const ALL: [FigureId; 11] = [
        FigureId::F1a,
        FigureId::F1b,
        FigureId::F1c,
        FigureId::F1d,
        FigureId::F2,
        FigureId::F3a,
        FigureId::F3b,
        FigureId::F4a,
        FigureId::F4b,
        FigureId::F4c,
        FigureId::F4d,
    ];

    pub fn parse(s: &str) -> Result<FigureId, CliError> {
        match s {
            "1a" => Ok(FigureId::F1a),
            "1b" => Ok(FigureId::F1b),
            "1c" => Ok(FigureId::F1c),
            "1d" => Ok(FigureId::F1d),
            "2" => Ok(FigureId::F2),
            "3a" => Ok(FigureId::F3a),
            "3b" => Ok(FigureId::F3b),
            "4a" => Ok(FigureId::F4a),
            "4b" => Ok(FigureId::F4b),
            "4c" => Ok(FigureId::F4c),
            "4d" => Ok(FigureId::F4d),
            other => Err(CliError::usage(format!(
                "unknown figure id '{other}' (expected one of 1a 1b 1c 1d 2 3a 3b 4a 4b 4c 4d)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::F1a => "1a",
            FigureId::F1b => "1b",
            FigureId::F1c => "1c",
            FigureId::F1d => "1d",
            FigureId::F2 => "2",
            FigureId::F3a => "3a",
            FigureId::F3b => "3b",
            FigureId::F4a => "4a",
            FigureId::F4b => "4b",
            FigureId::F4c => "4c",
            FigureId::F4d => "4d",
        }
    }

    /// Surface figures sweep gamma; curve figures pin it.
    pub fn is_surface(&self) -> bool {
        !matches!(
            self,
            FigureId::F4a | FigureId::F4b | FigureId::F4c | FigureId::F4d
        )
    }

    /// The pinned rotation angle of the curve figures.
    pub fn fixed_gamma(&self) -> Option<f64> {
        match self {
            FigureId::F4a => Some(0.0),
            FigureId::F4b => Some(2.0 * (2.0f64 / 3.0).sqrt().acos()),
            FigureId::F4c => Some(2.0 * (1.0f64 / 3.0).sqrt().acos()),
            FigureId::F4d => Some(std::f64::consts::PI),
            _ => None,
        }
    }

    fn surface_column(&self) -> &'static str {
        match self {
            FigureId::F1a => "c2_c1c2",
            FigureId::F1b => "c2_r1r2",
            FigureId::F1c => "c2_c1r1",
            FigureId::F1d => "c2_c1r2",
            FigureId::F2 => "e_bb",
            FigureId::F3a => "e_qb_c1",
            FigureId::F3b => "e_qb_r1",
            _ => unreachable!("curve figures have no single column"),
        }
    }

    fn surface_value(&self, row: &ScanRow) -> f64 {
        match self {
            FigureId::F1a => row.report.c2_c1c2,
            FigureId::F1b => row.report.c2_r1r2,
            FigureId::F1c => row.report.c2_c1r1,
            FigureId::F1d => row.report.c2_c1r2,
            FigureId::F2 => row.report.e_bb,
            FigureId::F3a => row.report.e_qb_c1,
            FigureId::F3b => row.report.e_qb_r1,
            _ => unreachable!(),
        }
    }
}

/// Figure data as CSV bytes. Surfaces carry (gamma, kappa_t, value);
/// curves carry the four plotted quantities plus the caption's
/// presentation scaling of the cross-pair sum as its own column.
pub fn figure_csv(id: FigureId, cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let rows = scan_grid(&cfg.params, &cfg.t_grid(), &cfg.gamma_grid()).map_err(core_err)?;
    let mut buf = String::new();
    if id.is_surface() {
        buf.push_str("gamma,kappa_t,");
        buf.push_str(id.surface_column());
        buf.push('\n');
        for row in &rows {
            buf.push_str(&fmt_f64(row.gamma));
            buf.push(',');
            buf.push_str(&fmt_f64(row.kappa_t));
            buf.push(',');
            buf.push_str(&fmt_f64(id.surface_value(row)));
            buf.push('\n');
        }
    } else {
        buf.push_str(
            "gamma,kappa_t,c2_c1c2,c2_r1r2,c2_c1r2_c2r1_sum,c2_c1r2_c2r1_sum_times_5,e_bb\n",
        );
        for row in &rows {
            let sum = row.report.c2_c1r2 + row.report.c2_c2r1;
            for (i, v) in [
                row.gamma,
                row.kappa_t,
                row.report.c2_c1c2,
                row.report.c2_r1r2,
                sum,
                5.0 * sum,
                row.report.e_bb,
            ]
            .into_iter()
            .enumerate()
            {
                if i > 0 {
                    buf.push(',');
                }
                buf.push_str(&fmt_f64(v));
            }
            buf.push('\n');
        }
    }
    Ok(buf.into_bytes())
}

/// Default grids for a figure: coarse surfaces over the reference axes,
/// fine curves at the pinned angle.
pub fn figure_grid_defaults(id: FigureId) -> crate::config::Overrides {
    let mut o = crate::config::Overrides {
        t_min: Some(0.0),
        t_max: Some(6.0),
        ..crate::config::Overrides::default()
    };
    if id.is_surface() {
        o.t_steps = Some(61);
        o.gamma_min = Some(0.0);
        o.gamma_max = Some(std::f64::consts::PI);
        o.gamma_steps = Some(13);
    } else {
        o.t_steps = Some(601);
        let gamma = id.fixed_gamma().expect("curve figure");
        o.gamma = Some(gamma);
        o.gamma_min = Some(gamma);
        o.gamma_max = Some(gamma);
        o.gamma_steps = Some(1);
    }
    o
}

pub fn cmd_figure(id: FigureId, cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let bytes = figure_csv(id, cfg)?;
    out.write_all(&bytes).map_err(CliError::io)
}

/// Run every module's invariant suite; exit 0 only if all pass.
pub fn cmd_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let outcomes = run_all(cfg.seed, cfg.samples, &CheckTolerances::default());
    for o in &outcomes {
        let status = if o.passed { "PASS" } else { "FAIL" };
        writeln!(out, "suite {:<10} {status}  {}", o.name, o.detail).map_err(CliError::io)?;
    }
    if all_passed(&outcomes) {
        Ok(())
    } else {
        Err(CliError::failure("one or more invariant suites failed"))
    }
}

/// Validate the finite-N reservoir against the flat-spectrum amplitudes
/// and the phase-conjugation identity; JSON report plus pass/fail exit.
pub fn cmd_reservoir_validate(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    const AMPLITUDE_BOUND: f64 = 5e-3;
    const MODE_SUM_BOUND: f64 = 5e-3;
    const PHASE_BOUND: f64 = 1e-10;

    let kappa = cfg.params.kappa();
    let spec = ReservoirSpec::new(cfg.n_modes, 0.0, cfg.bandwidth_over_kappa * kappa, kappa)
        .map_err(core_err)?;
    // kappa t samples 0.1 apart up to kappa t_max.
    let kt_max = kappa * cfg.t_max;
    let n_samples = (kt_max / 0.1).floor() as usize;
    if n_samples == 0 {
        return Err(CliError::usage(
            "t_max too small: no samples at kappa t >= 0.1",
        ));
    }
    let samples: Vec<f64> = (1..=n_samples).map(|k| 0.1 * k as f64 / kappa).collect();

    let model = ReservoirModel::new(spec).map_err(core_err)?;
    let flat = validate_flat_spectrum(&model, &samples).map_err(core_err)?;
    let phase =
        phase_rotation_equivalence(&spec, 1.3, samples[samples.len() / 2]).map_err(core_err)?;

    let passed = flat.amplitude <= AMPLITUDE_BOUND
        && flat.mode_sum <= MODE_SUM_BOUND
        && phase <= PHASE_BOUND;
    let value = json!({
        "n_modes": cfg.n_modes,
        "bandwidth_over_kappa": cfg.bandwidth_over_kappa,
        "kappa_t_max": kt_max,
        "amplitude_deviation": flat.amplitude,
        "mode_sum_deviation": flat.mode_sum,
        "phase_rotation_deviation": phase,
        "amplitude_bound": AMPLITUDE_BOUND,
        "mode_sum_bound": MODE_SUM_BOUND,
        "phase_bound": PHASE_BOUND,
        "passed": passed,
    });
    serde_json::to_writer_pretty(&mut *out, &value).map_err(|e| CliError::io(e.into()))?;
    out.write_all(b"\n").map_err(CliError::io)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::failure(format!(
            "deviations exceed bounds: amplitude {:.3e}, mode sum {:.3e}, phase {:.3e}",
            flat.amplitude, flat.mode_sum, phase
        )))
    }
}
