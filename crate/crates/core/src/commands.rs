//! Subcommand implementations. Each writes CSV (and optional gnuplot scripts)
//! into the run's output directory and returns the paths it wrote.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{config, domain, Error, Result};
use crate::fidelity::{fidelity_at, ConverterKind, ConverterProfile, FidelityParams};
use crate::netsim::{
    Architecture, RateRow, ScenarioKind, SimReport, TABLE1_FIDELITY, TABLE1_FIDELITY_NODES, TABLE1_RATES_KHZ,
};
use crate::optics::{build_itu_grid, plan_dfg_retune, TuningModel, TuningPlan};
use crate::raman::{spectrum, WaveguideGeometry};

pub const GRID_START_NM: f64 = 1519.86;
pub const GRID_END_NM: f64 = 1577.03;
pub const GRID_SPACING_GHZ: f64 = 50.0;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn out_dir(cfg: &RunConfig) -> Result<&Path> {
    fs::create_dir_all(&cfg.output_dir).map_err(|e| io_err(&cfg.output_dir, e))?;
    Ok(&cfg.output_dir)
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(bytes).map_err(|e| io_err(path, e))
}

/// Writes `rows` with a fingerprint comment line followed by a header row.
pub fn write_csv<T: Serialize>(path: &Path, fingerprint: &str, rows: &[T]) -> Result<()> {
    let mut buf = format!("# config-fingerprint: sha256:{fingerprint}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for r in rows {
            w.serialize(r)?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    write_bytes(path, &buf)
}

fn write_plot(path: &Path, script: &str) -> Result<()> {
    write_bytes(path, script.as_bytes())
}

#[derive(Serialize)]
struct RateCsvRow {
    scenario: &'static str,
    architecture: &'static str,
    n_tot: u64,
    n_channels: u32,
    per_channel_hz: f64,
    aggregate_hz: f64,
    effective_hz: f64,
}

impl From<RateRow> for RateCsvRow {
    fn from(r: RateRow) -> Self {
        Self {
            scenario: r.scenario.as_str(),
            architecture: r.architecture.as_str(),
            n_tot: r.n_tot,
            n_channels: r.n_channels,
            per_channel_hz: r.per_channel_hz,
            aggregate_hz: r.aggregate_hz,
            effective_hz: r.effective_hz,
        }
    }
}

/// Rate sweep over N_tot for every scenario × architecture cell.
pub fn rate_rows(cfg: &RunConfig) -> Result<Vec<RateRow>> {
    let net = &cfg.network;
    let mut points = Vec::new();
    for kind in ScenarioKind::ALL {
        for arch in Architecture::ALL {
            for &n_tot in &cfg.sweeps.n_tot {
                points.push((kind, arch, n_tot));
            }
        }
    }
    points
        .par_iter()
        .map(|&(kind, arch, n_tot)| {
            let scenario = net.scenario(kind)?;
            // A QPU with fewer qubits than channels lights only as many channels.
            let channels = (net.config.n_channels as u64).min(n_tot) as u32;
            net.rate_row(scenario, arch, n_tot, channels)
        })
        .collect()
}

pub fn cmd_rate(cfg: &RunConfig, plot: bool) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let rows: Vec<RateCsvRow> = rate_rows(cfg)?.into_iter().map(Into::into).collect();
    let path = dir.join("rates.csv");
    write_csv(&path, &cfg.fingerprint(), &rows)?;
    let mut out = vec![path];
    if plot {
        let p = dir.join("rates.gp");
        write_plot(
            &p,
            "set datafile separator ','\nset logscale xy\nset xlabel 'communication qubits'\n\
             set ylabel 'aggregate rate (Hz)'\nset key outside\n\
             plot for [s in 'intra_rack inter_rack cross_dc'] for [a in 'no_qfc_single qfc_single rqi_dwdm'] \\\n  \
             'rates.csv' every ::1 using (strcol(1) eq s && strcol(2) eq a ? $3 : NaN):6 with linespoints title s.' '.a\n",
        )?;
        out.push(p);
    }
    Ok(out)
}

fn converter_profile(kind: ConverterKind, base: &FidelityParams) -> Result<ConverterProfile> {
    if base.converter.kind == kind {
        return Ok(base.converter);
    }
    match kind {
        ConverterKind::Chi2Dfg => Ok(ConverterProfile::chi2_default()),
        ConverterKind::Chi3Tdfg => Ok(ConverterProfile::tdfg()),
        ConverterKind::None => Ok(ConverterProfile::none()),
        ConverterKind::Chi3FwmBg => config("chi3_fwm_bg has no default profile; set it as the network converter"),
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct FidelityRow {
    pub architecture: &'static str,
    pub nodes: u32,
    pub fidelity: f64,
    pub converter_kind: &'static str,
}

pub fn fidelity_rows(cfg: &RunConfig) -> Result<Vec<FidelityRow>> {
    let base = cfg.network.config.fidelity;
    let nodes = &cfg.sweeps.nodes;
    let mut rows = Vec::new();
    for &n in nodes {
        rows.push(FidelityRow {
            architecture: Architecture::NoQfcSingle.as_str(),
            nodes: n,
            fidelity: fidelity_at(Architecture::NoQfcSingle, n, &base)?,
            converter_kind: ConverterKind::None.as_str(),
        });
    }
    for &kind in &cfg.sweeps.converters {
        let params = FidelityParams {
            converter: converter_profile(kind, &base)?,
            ..base
        };
        for arch in [Architecture::QfcSingle, Architecture::RqiDwdm] {
            for &n in nodes {
                rows.push(FidelityRow {
                    architecture: arch.as_str(),
                    nodes: n,
                    fidelity: fidelity_at(arch, n, &params)?,
                    converter_kind: kind.as_str(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn cmd_fidelity(cfg: &RunConfig, plot: bool) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let path = dir.join("fidelity.csv");
    write_csv(&path, &cfg.fingerprint(), &fidelity_rows(cfg)?)?;
    let mut out = vec![path];
    if plot {
        let p = dir.join("fidelity.gp");
        write_plot(
            &p,
            "set datafile separator ','\nset xlabel 'nodes'\nset ylabel 'fidelity'\nset key bottom left\n\
             plot for [a in 'no_qfc_single qfc_single rqi_dwdm'] for [c in 'none chi2_dfg chi3_tdfg'] \\\n  \
             'fidelity.csv' every ::1 using (strcol(1) eq a && strcol(4) eq c ? $2 : NaN):3 with linespoints title a.' '.c\n",
        )?;
        out.push(p);
    }
    Ok(out)
}

pub fn cmd_raman(cfg: &RunConfig, plot: bool) -> Result<Vec<PathBuf>> {
    let dir = out_dir(cfg)?;
    let s = &cfg.sweeps.raman;
    let geom = WaveguideGeometry::gaussian(s.length_m, s.pump_waist_m, s.signal_waist_m)?;
    let rows = spectrum(
        &cfg.raman,
        &geom,
        s.power_w,
        s.signal_nm,
        &s.pumps.values()?,
        &s.temperatures_k,
    )?;
    let path = dir.join("raman_spectrum.csv");
    write_csv(&path, &cfg.fingerprint(), &rows)?;
    let mut out = vec![path];
    if plot {
        let p = dir.join("raman_spectrum.gp");
        write_plot(
            &p,
            "set datafile separator ','\nset logscale y\nset xlabel 'pump wavelength (nm)'\n\
             set ylabel 'noise (photons/s/nm)'\nset key outside\n\
             plot for [b in 'antistokes stokes'] 'raman_spectrum.csv' every ::1 \\\n  \
             using (strcol(6) eq b ? $1 : NaN):5 with points title b\n",
        )?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuneRow {
    pub channel_index: usize,
    pub signal_nm: f64,
    pub current_idler_nm: f64,
    pub target_idler_nm: f64,
    pub pump_nm: f64,
    pub delta_t_c: f64,
    pub temperature_c: f64,
}

impl TuneRow {
    fn new(channel_index: usize, p: TuningPlan) -> Self {
        Self {
            channel_index,
            signal_nm: p.signal_nm,
            current_idler_nm: p.current_idler_nm,
            target_idler_nm: p.target_idler_nm,
            pump_nm: p.pump_nm,
            delta_t_c: p.delta_t_c,
            temperature_c: p.temperature_c,
        }
    }
}

/// Retuning plan from `current_nm` to the grid channel nearest `target_nm`.
pub fn tune_plan(signal_nm: f64, current_nm: f64, target_nm: f64) -> Result<TuneRow> {
    let grid = build_itu_grid(GRID_START_NM, GRID_END_NM, GRID_SPACING_GHZ)?;
    let lo = grid.channels_nm.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid.channels_nm.iter().cloned().fold(0.0, f64::max);
    let half = 0.5 * (hi - lo) / (grid.len() - 1) as f64;
    if target_nm < lo - half || target_nm > hi + half {
        return domain(format!("target {target_nm} nm lies outside the {lo:.2}–{hi:.2} nm grid"));
    }
    let idx = grid
        .nearest_channel(target_nm)
        .ok_or_else(|| Error::Domain("empty channel grid".into()))?;
    let plan = plan_dfg_retune(signal_nm, current_nm, grid.channels_nm[idx], &TuningModel::default())?;
    Ok(TuneRow::new(idx, plan))
}

pub fn cmd_tune(cfg: &RunConfig, signal_nm: f64, target_nm: f64, current_nm: Option<f64>) -> Result<Vec<PathBuf>> {
    let row = tune_plan(signal_nm, current_nm.unwrap_or(GRID_START_NM), target_nm)?;
    let dir = out_dir(cfg)?;
    let path = dir.join("tune.csv");
    write_csv(&path, &cfg.fingerprint(), &[row])?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct EventRow<'a> {
    time_s: f64,
    event_kind: &'static str,
    qpu_pair: &'a str,
    channel: u32,
}

#[derive(Serialize)]
struct ReportSummary {
    config_fingerprint: String,
    scenario: ScenarioKind,
    architecture: Architecture,
    per_channel_rate_hz: f64,
    aggregate_rate_hz: f64,
    effective_rate_hz: f64,
    makespan_s: f64,
    pairs_demanded: u64,
    pairs_delivered: u64,
    events: usize,
}

pub fn simulate(cfg: &RunConfig) -> Result<SimReport> {
    let scenario = cfg.network.scenario(cfg.simulate.scenario)?;
    cfg.network
        .simulate_job(&cfg.job, scenario, cfg.simulate.architecture, cfg.mode, cfg.seed)
}

pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let report = simulate(cfg)?;
    let dir = out_dir(cfg)?;
    let fp = cfg.fingerprint();
    let events: Vec<EventRow> = report
        .events
        .iter()
        .map(|e| EventRow {
            time_s: e.time_s,
            event_kind: e.kind.as_str(),
            qpu_pair: &e.qpu_pair,
            channel: e.channel,
        })
        .collect();
    let ev_path = dir.join("events.csv");
    write_csv(&ev_path, &fp, &events)?;

    let summary = ReportSummary {
        config_fingerprint: format!("sha256:{fp}"),
        scenario: cfg.simulate.scenario,
        architecture: cfg.simulate.architecture,
        per_channel_rate_hz: report.per_channel_rate_hz,
        aggregate_rate_hz: report.aggregate_rate_hz,
        effective_rate_hz: report.effective_rate_hz,
        makespan_s: report.makespan_s,
        pairs_demanded: report.pairs_demanded,
        pairs_delivered: report.pairs_delivered,
        events: report.events.len(),
    };
    let rep_path = dir.join("sim_report.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    write_bytes(&rep_path, text.as_bytes())?;
    Ok(vec![rep_path, ev_path])
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Table1Row {
    pub metric: &'static str,
    pub case: String,
    pub architecture: &'static str,
    pub value: f64,
    pub reference: f64,
    pub error: f64,
}

pub fn table1_rows(cfg: &RunConfig) -> Result<Vec<Table1Row>> {
    let rep = cfg.network.table1_report()?;
    let mut rows = Vec::new();
    for (i, kind) in ScenarioKind::ALL.iter().enumerate() {
        for (j, arch) in Architecture::ALL.iter().enumerate() {
            rows.push(Table1Row {
                metric: "rate_khz",
                case: kind.as_str().to_string(),
                architecture: arch.as_str(),
                value: rep.rates_khz[i][j],
                reference: TABLE1_RATES_KHZ[i][j],
                error: rep.rate_rel_errors[i][j],
            });
        }
    }
    for (i, nodes) in TABLE1_FIDELITY_NODES.iter().enumerate() {
        for (j, arch) in Architecture::ALL.iter().enumerate() {
            rows.push(Table1Row {
                metric: "fidelity",
                case: format!("{nodes}_nodes"),
                architecture: arch.as_str(),
                value: rep.fidelity[i][j],
                reference: TABLE1_FIDELITY[i][j],
                error: rep.fidelity_abs_errors[i][j],
            });
        }
    }
    Ok(rows)
}

pub fn cmd_table1(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let rows = table1_rows(cfg)?;
    let dir = out_dir(cfg)?;
    let path = dir.join("table1.csv");
    write_csv(&path, &cfg.fingerprint(), &rows)?;
    Ok(vec![path])
}
