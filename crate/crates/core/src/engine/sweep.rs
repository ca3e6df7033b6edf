use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{run, EngineError, RunMetrics, ScenarioSchedule};
use crate::model::CandidateSpec;
use crate::params::SimParams;

/// Parameter varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Potential of every entry in the schedule template.
    ScandalPotential,
    FalloffRate,
    AppeasementDelta,
    MaxOpenness,
    MaxTolerance,
    NumVoters,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::ScandalPotential,
        SweepAxis::FalloffRate,
        SweepAxis::AppeasementDelta,
        SweepAxis::MaxOpenness,
        SweepAxis::MaxTolerance,
        SweepAxis::NumVoters,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::ScandalPotential => "scandal-potential",
            SweepAxis::FalloffRate => "falloff-rate",
            SweepAxis::AppeasementDelta => "appeasement-delta",
            SweepAxis::MaxOpenness => "max-openness",
            SweepAxis::MaxTolerance => "max-tolerance",
            SweepAxis::NumVoters => "num-voters",
        }
    }

    fn apply(
        self,
        value: f64,
        params: &mut SimParams,
        schedule: &mut ScenarioSchedule,
    ) -> Result<(), SweepError> {
        match self {
            SweepAxis::ScandalPotential => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(SweepError::BadValue(self, value));
                }
                *schedule = schedule.with_potential(value);
            }
            SweepAxis::FalloffRate => params.falloff_rate = value,
            SweepAxis::AppeasementDelta => params.appeasement_delta = value,
            SweepAxis::MaxOpenness => params.max_openness = value,
            SweepAxis::MaxTolerance => params.max_tolerance = value,
            SweepAxis::NumVoters => {
                if value < 0.0 || value.fract() != 0.0 || value > u32::MAX as f64 {
                    return Err(SweepError::BadValue(self, value));
                }
                params.num_voters = value as usize;
            }
        }
        params
            .validate()
            .map_err(|_| SweepError::BadValue(self, value))
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.replace('_', "-");
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == wanted)
            .ok_or_else(|| SweepError::UnknownAxis(s.to_string()))
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("unknown sweep axis `{0}` (expected one of scandal-potential, falloff-rate, appeasement-delta, max-openness, max-tolerance, num-voters)")]
    UnknownAxis(String),
    #[error("value {1} is not valid for axis {0}")]
    BadValue(SweepAxis, f64),
    #[error("axis {axis}={value}, seed {seed}: {source}")]
    Run {
        axis: SweepAxis,
        value: f64,
        seed: u64,
        source: EngineError,
    },
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub seed: u64,
    pub metrics: RunMetrics,
}

/// Runs every `(value, seed)` cell; rows come back value-major, seed-minor.
pub fn sweep(
    base: &SimParams,
    candidates: &[CandidateSpec],
    template: &ScenarioSchedule,
    axis: SweepAxis,
    values: &[f64],
    seeds: &[u64],
) -> Result<Vec<SweepRow>, SweepError> {
    for &v in values {
        axis.apply(v, &mut base.clone(), &mut template.clone())?;
    }
    let cells: Vec<(f64, u64)> = values
        .iter()
        .flat_map(|&v| seeds.iter().map(move |&s| (v, s)))
        .collect();
    run_cells(base, candidates, template, axis, &cells)
}

/// [`sweep`] on a dedicated pool of at most `jobs` threads.
pub fn sweep_with_jobs(
    base: &SimParams,
    candidates: &[CandidateSpec],
    template: &ScenarioSchedule,
    axis: SweepAxis,
    values: &[f64],
    seeds: &[u64],
    jobs: usize,
) -> Result<Vec<SweepRow>, SweepError> {
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .expect("thread pool");
        pool.install(|| sweep(base, candidates, template, axis, values, seeds))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        sweep(base, candidates, template, axis, values, seeds)
    }
}

fn run_cell(
    base: &SimParams,
    candidates: &[CandidateSpec],
    template: &ScenarioSchedule,
    axis: SweepAxis,
    (value, seed): (f64, u64),
) -> Result<SweepRow, SweepError> {
    let mut params = SimParams {
        seed,
        ..base.clone()
    };
    let mut schedule = template.clone();
    axis.apply(value, &mut params, &mut schedule)?;
    let out = run(&params, candidates, &schedule, false).map_err(|source| SweepError::Run {
        axis,
        value,
        seed,
        source,
    })?;
    Ok(SweepRow {
        value,
        seed,
        metrics: out.metrics,
    })
}

fn run_cells(
    base: &SimParams,
    candidates: &[CandidateSpec],
    template: &ScenarioSchedule,
    axis: SweepAxis,
    cells: &[(f64, u64)],
) -> Result<Vec<SweepRow>, SweepError> {
    #[cfg(feature = "parallel")]
    let rows = cells
        .par_iter()
        .map(|&cell| run_cell(base, candidates, template, axis, cell))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let rows = cells
        .iter()
        .map(|&cell| run_cell(base, candidates, template, axis, cell))
        .collect();
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CandidateId;

    fn base() -> (SimParams, Vec<CandidateSpec>, ScenarioSchedule) {
        let p = SimParams {
            num_voters: 60,
            num_candidates: 3,
            ..SimParams::default()
        };
        (
            p,
            CandidateSpec::default_line(3),
            ScenarioSchedule::single(40, 10, CandidateId(1), 0.5),
        )
    }

    #[test]
    fn axis_names_parse() {
        for a in SweepAxis::ALL {
            assert_eq!(a.name().parse::<SweepAxis>().unwrap(), a);
        }
        assert_eq!("falloff_rate".parse::<SweepAxis>().unwrap(), SweepAxis::FalloffRate);
        assert!(matches!("speed".parse::<SweepAxis>(), Err(SweepError::UnknownAxis(_))));
    }

    #[test]
    fn singleton_sweep_equals_run() {
        let (p, c, s) = base();
        let rows = sweep(&p, &c, &s, SweepAxis::MaxTolerance, &[0.8], &[9]).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = run(
            &SimParams { seed: 9, max_tolerance: 0.8, ..p },
            &c,
            &s,
            false,
        )
        .unwrap();
        assert_eq!(rows[0].metrics, direct.metrics);
    }

    #[test]
    fn zero_potential_matches_baseline() {
        let (p, c, s) = base();
        let rows = sweep(&p, &c, &s, SweepAxis::ScandalPotential, &[0.0], &[1, 2, 3]).unwrap();
        for row in rows {
            let baseline = run(
                &SimParams { seed: row.seed, ..p.clone() },
                &c,
                &ScenarioSchedule::empty(s.run_length),
                false,
            )
            .unwrap();
            assert_eq!(row.metrics, baseline.metrics);
        }
    }

    #[test]
    fn parallel_matches_serial_order() {
        let (p, c, s) = base();
        let values = [0.0, 0.5, 1.0];
        let seeds = [4, 5];
        let a = sweep_with_jobs(&p, &c, &s, SweepAxis::ScandalPotential, &values, &seeds, 1)
            .unwrap();
        let b = sweep_with_jobs(&p, &c, &s, SweepAxis::ScandalPotential, &values, &seeds, 4)
            .unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.value, x.seed), (y.value, y.seed));
            assert_eq!(x.metrics, y.metrics);
        }
        assert_eq!((a[1].value, a[1].seed), (0.0, 5));
    }

    #[test]
    fn bad_values_rejected() {
        let (p, c, s) = base();
        assert!(matches!(
            sweep(&p, &c, &s, SweepAxis::NumVoters, &[2.5], &[1]),
            Err(SweepError::BadValue(..))
        ));
        assert!(matches!(
            sweep(&p, &c, &s, SweepAxis::ScandalPotential, &[1.2], &[1]),
            Err(SweepError::BadValue(..))
        ));
        assert!(matches!(
            sweep(&p, &c, &s, SweepAxis::FalloffRate, &[-0.2], &[1]),
            Err(SweepError::BadValue(..))
        ));
    }
}
