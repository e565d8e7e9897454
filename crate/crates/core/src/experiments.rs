//! Named experiment presets and the driver that runs them.

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::{DiagnosticsRecord, Monitor};
use crate::error::{invalid, Error, Result};
use crate::grid::Grid;
use crate::integrator::{step_count, ExplicitRk, Method, Schedule};
use crate::model::{
    exact_single_soliton, initial_bound_state, initial_maxwellian, initial_sech_pulses, initial_single_soliton,
    NlsProblem, SechPulse, State,
};
use crate::spectral::{check_stability, frozen_spectrum, Spectrum, StabilityReport, STRICT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentName {
    SingleSoliton,
    Collision,
    MaxwellianStanding,
    MaxwellianMoving,
    BoundState,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 5] = [
        ExperimentName::SingleSoliton,
        ExperimentName::Collision,
        ExperimentName::MaxwellianStanding,
        ExperimentName::MaxwellianMoving,
        ExperimentName::BoundState,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::SingleSoliton => "single-soliton",
            ExperimentName::Collision => "collision",
            ExperimentName::MaxwellianStanding => "maxwellian-standing",
            ExperimentName::MaxwellianMoving => "maxwellian-moving",
            ExperimentName::BoundState => "bound-state",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        ExperimentName::ALL
            .into_iter()
            .find(|n| n.as_str() == key)
            .ok_or_else(|| Error::UnsupportedPreset(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Travelling soliton with a known exact solution.
    SingleSoliton { alpha: f64, c: f64 },
    SechPulses(Vec<SechPulse>),
    Maxwellian { amplitude: f64, moving: bool },
    /// `sech x`
    BoundState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    pub delta_x: f64,
    pub delta_t: f64,
    pub t_end: f64,
    pub method: Method,
    pub initial: InitialCondition,
    pub bound_n: Option<u32>,
    pub snapshot_times: Vec<f64>,
    /// Diagnostics cadence in steps; `None` picks one giving at least 100 records.
    pub diag_every: Option<usize>,
    pub stability_tolerance: f64,
}

impl ExperimentConfig {
    pub fn amplitude(&self) -> Option<f64> {
        match self.initial {
            InitialCondition::Maxwellian { amplitude, .. } => Some(amplitude),
            _ => None,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::with_spacing(self.a, self.b, self.delta_x)
    }

    pub fn problem(&self) -> Result<NlsProblem> {
        Ok(NlsProblem::new(self.grid()?, self.kappa))
    }

    pub fn initial_state(&self, grid: &Grid) -> Result<State> {
        match &self.initial {
            InitialCondition::SingleSoliton { alpha, c } => initial_single_soliton(grid, *alpha, *c, self.kappa),
            InitialCondition::SechPulses(p) => initial_sech_pulses(grid, p, self.kappa),
            InitialCondition::Maxwellian { amplitude, moving } => Ok(initial_maxwellian(grid, *amplitude, *moving)),
            InitialCondition::BoundState => Ok(initial_bound_state(grid)),
        }
    }

    /// Exact solution at time `t`, when the preset has one.
    pub fn exact_state(&self, grid: &Grid, t: f64) -> Result<Option<State>> {
        match self.initial {
            InitialCondition::SingleSoliton { alpha, c } => {
                exact_single_soliton(grid, t, alpha, c, self.kappa).map(Some)
            }
            _ => Ok(None),
        }
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(0.0, self.t_end, self.delta_t)
    }

    /// Steps between diagnostics records; by default about a hundred per run.
    pub fn diag_cadence(&self) -> Result<usize> {
        match self.diag_every {
            Some(0) => invalid("diagnostics cadence must be at least 1"),
            Some(k) => Ok(k),
            None => Ok((self.steps()? / 100).max(1)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_x > 0.0 && self.delta_t > 0.0 && self.t_end >= 0.0) {
            return invalid("spacing, time step and end time must be positive");
        }
        if !(self.b > self.a) {
            return invalid("domain must have positive length");
        }
        if !(self.stability_tolerance >= 0.0) {
            return invalid("stability tolerance must be non-negative");
        }
        if let Some(n) = self.bound_n {
            if self.kappa != 2.0 * f64::from(n * n) {
                return invalid(format!("bound state n = {n} requires kappa = {}", 2 * n * n));
            }
        }
        self.diag_cadence()?;
        Ok(())
    }
}

/// Per-run parameter overrides on top of a preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub delta_x: Option<f64>,
    pub delta_t: Option<f64>,
    pub method: Option<Method>,
    pub t_end: Option<f64>,
    pub amplitude: Option<f64>,
    pub bound_n: Option<u32>,
    pub snapshot_times: Option<Vec<f64>>,
    pub diag_every: Option<usize>,
    pub stability_tolerance: Option<f64>,
}

const BOUND_STATE_TIMES: [f64; 13] = [
    0.0, 0.175, 0.2, 0.225, 0.25, 0.3, 0.325, 0.375, 0.4, 0.475, 0.5, 0.55, 0.6,
];

pub fn preset(name: ExperimentName, overrides: &Overrides) -> Result<ExperimentConfig> {
    use ExperimentName::*;
    if overrides.amplitude.is_some() && !matches!(name, MaxwellianStanding | MaxwellianMoving) {
        return invalid(format!("preset {name} has no amplitude parameter"));
    }
    if overrides.bound_n.is_some() && name != BoundState {
        return invalid(format!("preset {name} has no bound-state parameter"));
    }
    let amplitude = overrides.amplitude.unwrap_or(1.78);
    let mut cfg = match name {
        SingleSoliton => ExperimentConfig {
            name,
            a: -20.0,
            b: 24.0,
            kappa: 2.0,
            delta_x: 0.1,
            delta_t: 0.001,
            t_end: 1.0,
            method: Method::Rk4,
            initial: InitialCondition::SingleSoliton { alpha: 1.0, c: 4.0 },
            bound_n: None,
            snapshot_times: vec![0.0, 0.5, 1.0],
            diag_every: None,
            stability_tolerance: STRICT_TOLERANCE,
        },
        Collision => ExperimentConfig {
            name,
            a: -20.0,
            b: 20.0,
            kappa: 2.0,
            delta_x: 0.25,
            delta_t: 0.005,
            t_end: 5.0,
            method: Method::Rk4,
            initial: InitialCondition::SechPulses(vec![
                SechPulse { beta: 1.0, c: 4.0, centre: -10.0 },
                SechPulse { beta: 1.0, c: -4.0, centre: 10.0 },
            ]),
            bound_n: None,
            snapshot_times: vec![0.0, 1.75, 2.5, 3.25, 5.0],
            diag_every: None,
            stability_tolerance: STRICT_TOLERANCE,
        },
        MaxwellianStanding => ExperimentConfig {
            name,
            a: -45.0,
            b: 45.0,
            kappa: 2.0,
            delta_x: 0.5,
            delta_t: 0.0005,
            t_end: 6.0,
            method: Method::Rk4,
            initial: InitialCondition::Maxwellian { amplitude, moving: false },
            bound_n: None,
            snapshot_times: (0..=6).map(f64::from).collect(),
            diag_every: None,
            stability_tolerance: STRICT_TOLERANCE,
        },
        MaxwellianMoving => ExperimentConfig {
            name,
            a: -30.0,
            b: 60.0,
            kappa: 2.0,
            delta_x: 0.25,
            delta_t: 0.001,
            t_end: 6.0,
            method: Method::Rk4,
            initial: InitialCondition::Maxwellian { amplitude, moving: true },
            bound_n: None,
            snapshot_times: (0..=6).map(f64::from).collect(),
            diag_every: None,
            stability_tolerance: STRICT_TOLERANCE,
        },
        BoundState => {
            let n = overrides.bound_n.unwrap_or(2);
            if !(2..=4).contains(&n) {
                return Err(Error::UnsupportedPreset(format!(
                    "bound state supports n = 2, 3, 4; got {n}"
                )));
            }
            ExperimentConfig {
                name,
                a: -20.0,
                b: 20.0,
                kappa: 2.0 * f64::from(n * n),
                delta_x: 0.125,
                delta_t: 0.001,
                t_end: 0.6,
                method: Method::Rk4,
                initial: InitialCondition::BoundState,
                bound_n: Some(n),
                snapshot_times: BOUND_STATE_TIMES.to_vec(),
                diag_every: None,
                stability_tolerance: STRICT_TOLERANCE,
            }
        }
    };
    if let Some(v) = overrides.delta_x {
        cfg.delta_x = v;
    }
    if let Some(v) = overrides.delta_t {
        cfg.delta_t = v;
    }
    if let Some(v) = overrides.method {
        cfg.method = v;
    }
    if let Some(v) = overrides.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = &overrides.snapshot_times {
        cfg.snapshot_times = v.clone();
    }
    if overrides.diag_every.is_some() {
        cfg.diag_every = overrides.diag_every;
    }
    if let Some(v) = overrides.stability_tolerance {
        cfg.stability_tolerance = v;
    }
    cfg.snapshot_times.retain(|&t| t <= cfg.t_end + 1e-12);
    cfg.validate()?;
    Ok(cfg)
}

/// `|u|` and the components at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub state: State,
}

impl Snapshot {
    pub fn peak(&self) -> f64 {
        self.state.peak()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunOutcome {
    Completed,
    Diverged { step: usize, time: f64 },
}

#[derive(Debug, Clone)]
pub struct RunArtifact {
    pub config: ExperimentConfig,
    pub grid: Grid,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    /// `(t, max |u|)` at every diagnostics record.
    pub peaks: Vec<(f64, f64)>,
    pub spectrum: Spectrum,
    pub stability: StabilityReport,
    pub c1_initial: f64,
    pub c3_initial: f64,
    pub outcome: RunOutcome,
    pub final_state: Option<State>,
}

impl RunArtifact {
    pub fn diverged(&self) -> bool {
        matches!(self.outcome, RunOutcome::Diverged { .. })
    }

    pub fn last_record(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    pub fn snapshot_at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().find(|s| (s.time - t).abs() < 1e-9)
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunArtifact> {
    run_with_spectrum(config, None)
}

/// As [`run`], reusing a spectrum computed for the same grid, kappa and
/// initial condition.
pub fn run_with_spectrum(config: &ExperimentConfig, spectrum: Option<Spectrum>) -> Result<RunArtifact> {
    config.validate()?;
    let grid = config.grid()?;
    let problem = NlsProblem::new(grid.clone(), config.kappa);
    let initial = config.initial_state(&grid)?;
    let tableau = config.method.tableau();

    let spectrum = match spectrum {
        Some(s) => s,
        None => frozen_spectrum(&problem, &initial)?,
    };
    let stability = check_stability(&spectrum, config.delta_t, tableau.order, config.stability_tolerance)?;

    let steps = config.steps()?;
    let every = config.diag_cadence()?;
    let snapshot_steps: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|t| (t / config.delta_t).round() as usize)
        .filter(|&k| k <= steps)
        .collect();
    let schedule = Schedule::every(every).with_steps(snapshot_steps.iter().copied());

    let monitor = Monitor::new(&grid, config.kappa, &initial)?;
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut peaks = Vec::new();
    let mut failure = None;

    let mut rk = ExplicitRk::new(tableau);
    let result = rk.integrate(&problem, &initial, config.delta_t, config.t_end, &schedule, |k, state| {
        if failure.is_some() {
            return;
        }
        if k % every == 0 || k == steps {
            let exact = match config.exact_state(&grid, state.time) {
                Ok(e) => e,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            match monitor.record(state, exact.as_ref()) {
                Ok(r) => {
                    records.push(r);
                    peaks.push((state.time, state.peak()));
                }
                Err(e) => failure = Some(e),
            }
        }
        if snapshot_steps.contains(&k) {
            snapshots.push(Snapshot {
                time: state.time,
                state: state.clone(),
            });
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (outcome, final_state) = match result {
        Ok(s) => (RunOutcome::Completed, Some(s)),
        Err(Error::Divergence { step, time }) => (RunOutcome::Diverged { step, time }, None),
        Err(e) => return Err(e),
    };
    Ok(RunArtifact {
        config: config.clone(),
        grid,
        records,
        snapshots,
        peaks,
        spectrum,
        stability,
        c1_initial: monitor.c1_initial(),
        c3_initial: monitor.c3_initial(),
        outcome,
        final_state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_defaults() {
        let c = preset(ExperimentName::SingleSoliton, &Overrides::default()).unwrap();
        assert_eq!((c.a, c.b, c.kappa, c.t_end), (-20.0, 24.0, 2.0, 1.0));
        assert_eq!(c.initial, InitialCondition::SingleSoliton { alpha: 1.0, c: 4.0 });

        let c = preset(ExperimentName::Collision, &Overrides::default()).unwrap();
        assert_eq!((c.delta_x, c.delta_t, c.t_end), (0.25, 0.005, 5.0));
        match &c.initial {
            InitialCondition::SechPulses(p) => {
                assert_eq!(p.iter().map(|p| p.centre).collect::<Vec<_>>(), vec![-10.0, 10.0]);
                assert_eq!(p.iter().map(|p| p.c).collect::<Vec<_>>(), vec![4.0, -4.0]);
            }
            other => panic!("{other:?}"),
        }

        let c = preset(ExperimentName::MaxwellianStanding, &Overrides::default()).unwrap();
        assert_eq!((c.a, c.b, c.delta_x, c.delta_t), (-45.0, 45.0, 0.5, 0.0005));
        let c = preset(ExperimentName::MaxwellianMoving, &Overrides::default()).unwrap();
        assert_eq!((c.a, c.b, c.delta_x, c.t_end), (-30.0, 60.0, 0.25, 6.0));
    }

    #[test]
    fn bound_state_kappa_and_limits() {
        let o = Overrides { bound_n: Some(3), ..Default::default() };
        let c = preset(ExperimentName::BoundState, &o).unwrap();
        assert_eq!(c.kappa, 18.0);
        assert_eq!(c.snapshot_times.last(), Some(&0.6));
        for n in [1, 5] {
            let o = Overrides { bound_n: Some(n), ..Default::default() };
            assert!(matches!(preset(ExperimentName::BoundState, &o), Err(Error::UnsupportedPreset(_))));
        }
    }

    #[test]
    fn overrides_validated() {
        let o = Overrides { amplitude: Some(1.0), ..Default::default() };
        assert!(preset(ExperimentName::Collision, &o).is_err());
        let o = Overrides { bound_n: Some(2), ..Default::default() };
        assert!(preset(ExperimentName::SingleSoliton, &o).is_err());
        let o = Overrides { delta_t: Some(0.3), ..Default::default() };
        assert!(preset(ExperimentName::SingleSoliton, &o).is_err());
        assert!("nope".parse::<ExperimentName>().is_err());
        assert_eq!("single_soliton".parse::<ExperimentName>().unwrap(), ExperimentName::SingleSoliton);
    }

    #[test]
    fn snapshot_times_filtered_to_horizon() {
        let o = Overrides { t_end: Some(0.3), ..Default::default() };
        let c = preset(ExperimentName::BoundState, &o).unwrap();
        assert_eq!(c.snapshot_times, vec![0.0, 0.175, 0.2, 0.225, 0.25, 0.3]);
    }

    #[test]
    fn short_run_records_and_snapshots() {
        let o = Overrides {
            t_end: Some(0.1),
            delta_x: Some(0.5),
            delta_t: Some(0.01),
            snapshot_times: Some(vec![0.0, 0.05, 0.1]),
            ..Default::default()
        };
        let c = preset(ExperimentName::SingleSoliton, &o).unwrap();
        let r = run(&c).unwrap();
        assert_eq!(r.outcome, RunOutcome::Completed);
        assert_eq!(r.records.len(), 11);
        assert_eq!(r.records[0].rel_change_c1, 0.0);
        assert!(r.records.iter().all(|r| r.linf.is_some()));
        assert_eq!(r.snapshots.len(), 3);
        assert!((r.snapshots[1].time - 0.05).abs() < 1e-12);
        assert_eq!(r.records.last().unwrap().time, 0.1);
    }
}
