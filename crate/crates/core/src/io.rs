//! Flat-file formats: CSV outputs and the `key=value` run configuration.
//!
//! Every floating-point CSV field is written with 17 significant digits so
//! that it parses back to the identical `f64`.

use std::io::{self, Write};

use crate::diagnostics::DiagnosticsRecord;
use crate::error::{invalid, Error, Result};
use crate::experiments::{ExperimentConfig, ExperimentName, Overrides, RunArtifact, RunOutcome, Snapshot};
use crate::integrator::Method;
use crate::reference::{classify, RowStatus, TableRow};
use crate::spectral::{Spectrum, StabilityReport};
use crate::stability::RegionSample;

pub const DIAGNOSTICS_HEADER: &str = "t,linf,c1,c3,rel_c1,rel_c3";
pub const SNAPSHOTS_HEADER: &str = "t,x,abs_u,f,g";
pub const SPECTRUM_HEADER: &str = "re,im";
pub const REGION_HEADER: &str = "re,im,inside";
pub const STABILITY_HEADER: &str = "order,dt,tolerance,admissible,worst_re,worst_im,worst_abs_s";

/// Round-trip exact scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_diagnostics<W: Write>(out: &mut W, records: &[DiagnosticsRecord]) -> io::Result<()> {
    writeln!(out, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_f64(r.time),
            r.linf.map(fmt_f64).unwrap_or_default(),
            fmt_f64(r.c1),
            fmt_f64(r.c3),
            fmt_f64(r.rel_change_c1),
            fmt_f64(r.rel_change_c3)
        )?;
    }
    Ok(())
}

pub fn write_snapshots<W: Write>(out: &mut W, nodes: &[f64], snapshots: &[Snapshot]) -> io::Result<()> {
    writeln!(out, "{SNAPSHOTS_HEADER}")?;
    for s in snapshots {
        for (m, x) in nodes.iter().enumerate() {
            let (f, g) = (s.state.f[m], s.state.g[m]);
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(s.time),
                fmt_f64(*x),
                fmt_f64(f.hypot(g)),
                fmt_f64(f),
                fmt_f64(g)
            )?;
        }
    }
    Ok(())
}

pub fn write_spectrum<W: Write>(out: &mut W, spectrum: &Spectrum) -> io::Result<()> {
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for l in &spectrum.lambda {
        writeln!(out, "{},{}", fmt_f64(l.re), fmt_f64(l.im))?;
    }
    Ok(())
}

pub fn write_region<W: Write>(out: &mut W, region: &RegionSample) -> io::Result<()> {
    writeln!(out, "{REGION_HEADER}")?;
    for (x, y, inside) in region.points() {
        writeln!(out, "{},{},{}", fmt_f64(x), fmt_f64(y), u8::from(inside))?;
    }
    Ok(())
}

pub fn write_stability<W: Write>(out: &mut W, report: &StabilityReport) -> io::Result<()> {
    writeln!(out, "{STABILITY_HEADER}")?;
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        report.order,
        fmt_f64(report.delta_t),
        fmt_f64(report.tolerance),
        report.admissible,
        fmt_f64(report.worst_z.re),
        fmt_f64(report.worst_z.im),
        fmt_f64(report.worst_magnitude)
    )
}

pub const COMPARISON_HEADER: &str = "table,method,dx,dt,amplitude,bound_n,ref_linf,ref_rel_c1,ref_rel_c3,linf,rel_c1,rel_c3,c1_initial,c3_initial,diverged_at,status";

/// Measured side of one benchmark row. For a diverged run the values are
/// those of the last record before the blow-up.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonEntry {
    pub row: TableRow,
    pub linf: Option<f64>,
    pub rel_c1: f64,
    pub rel_c3: f64,
    pub c1_initial: f64,
    pub c3_initial: f64,
    pub diverged_at: Option<f64>,
    pub status: RowStatus,
}

impl ComparisonEntry {
    pub fn from_run(row: TableRow, artifact: &RunArtifact) -> Self {
        let last = artifact.last_record();
        let status = classify(&row, artifact);
        Self {
            linf: last.and_then(|r| r.linf),
            rel_c1: last.map_or(f64::NAN, |r| r.rel_change_c1),
            rel_c3: last.map_or(f64::NAN, |r| r.rel_change_c3),
            c1_initial: artifact.c1_initial,
            c3_initial: artifact.c3_initial,
            diverged_at: match artifact.outcome {
                RunOutcome::Diverged { time, .. } => Some(time),
                RunOutcome::Completed => None,
            },
            status,
            row,
        }
    }
}

pub fn write_comparison<W: Write>(out: &mut W, entries: &[ComparisonEntry]) -> io::Result<()> {
    writeln!(out, "{COMPARISON_HEADER}")?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    for e in entries {
        let r = &e.row;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.table,
            r.method,
            r.delta_x,
            r.delta_t,
            r.amplitude.map(|a| a.to_string()).unwrap_or_default(),
            r.bound_n.map(|n| n.to_string()).unwrap_or_default(),
            r.linf.map(|v| v.to_string()).unwrap_or_default(),
            r.rel_c1,
            r.rel_c3,
            opt(e.linf),
            fmt_f64(e.rel_c1),
            fmt_f64(e.rel_c3),
            fmt_f64(e.c1_initial),
            fmt_f64(e.c3_initial),
            opt(e.diverged_at),
            e.status.as_str()
        )?;
    }
    Ok(())
}

/// Informational manifest keys that [`RunSettings::parse`] accepts and ignores.
pub const METADATA_KEYS: [&str; 4] = ["version", "elapsed-seconds", "outcome", "grid-b"];

/// A preset name plus overrides, as read from a config file or the CLI.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunSettings {
    pub preset: Option<ExperimentName>,
    pub overrides: Overrides,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value `{value}` for `{key}`")))
}

pub fn parse_time_list(value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num("snapshot-times", s))
        .collect()
}

impl RunSettings {
    /// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = RunSettings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return invalid(format!("line {}: expected key=value", lineno + 1));
            };
            settings.set(key.trim(), value.trim())?;
        }
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let o = &mut self.overrides;
        match key {
            "preset" => self.preset = Some(value.parse()?),
            "method" => o.method = Some(value.parse::<Method>()?),
            "dx" => o.delta_x = Some(parse_num(key, value)?),
            "dt" => o.delta_t = Some(parse_num(key, value)?),
            "t-end" => o.t_end = Some(parse_num(key, value)?),
            "amplitude" => o.amplitude = Some(parse_num(key, value)?),
            "bound-n" => o.bound_n = Some(parse_num(key, value)?),
            "snapshot-times" => o.snapshot_times = Some(parse_time_list(value)?),
            "diag-every" => o.diag_every = Some(parse_num(key, value)?),
            "stability-tolerance" => o.stability_tolerance = Some(parse_num(key, value)?),
            k if METADATA_KEYS.contains(&k) => {}
            other => return invalid(format!("unknown configuration key `{other}`")),
        }
        Ok(())
    }

    /// `other` wins wherever it sets a value.
    pub fn overlay(mut self, other: RunSettings) -> Self {
        let (o, n) = (&mut self.overrides, other.overrides);
        self.preset = other.preset.or(self.preset);
        o.delta_x = n.delta_x.or(o.delta_x);
        o.delta_t = n.delta_t.or(o.delta_t);
        o.method = n.method.or(o.method);
        o.t_end = n.t_end.or(o.t_end);
        o.amplitude = n.amplitude.or(o.amplitude);
        o.bound_n = n.bound_n.or(o.bound_n);
        o.snapshot_times = n.snapshot_times.or(o.snapshot_times.take());
        o.diag_every = n.diag_every.or(o.diag_every);
        o.stability_tolerance = n.stability_tolerance.or(o.stability_tolerance);
        self
    }
}

/// Fully resolved `key=value` echo of a configuration. Feeding it back
/// through [`RunSettings::parse`] reproduces the same configuration.
pub fn manifest(config: &ExperimentConfig, diag_every: usize, extra: &[(&str, String)]) -> String {
    let mut lines = vec![
        format!("preset={}", config.name),
        format!("method={}", config.method),
        format!("dx={}", config.delta_x),
        format!("dt={}", config.delta_t),
        format!("t-end={}", config.t_end),
    ];
    if let Some(a) = config.amplitude() {
        lines.push(format!("amplitude={a}"));
    }
    if let Some(n) = config.bound_n {
        lines.push(format!("bound-n={n}"));
    }
    let times: Vec<String> = config.snapshot_times.iter().map(|t| t.to_string()).collect();
    lines.push(format!("snapshot-times={}", times.join(",")));
    lines.push(format!("diag-every={diag_every}"));
    lines.push(format!("stability-tolerance={}", config.stability_tolerance));
    for (k, v) in extra {
        lines.push(format!("{k}={v}"));
    }
    lines.join("\n") + "\n"
}
