//! CSV emitters. Floats use Rust's shortest round-trip formatting, so equal
//! inputs always give equal bytes.

use std::io::Write;

use votesim_core::engine::{RunMetrics, SweepAxis, SweepRow};
use votesim_core::CandidateSpec;

pub const RESULT_FILE: &str = "result.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_AGGREGATE_FILE: &str = "sweep_aggregate.csv";

/// Row label used for abstentions in `result.csv`.
pub const ABSTENTION_ROW: &str = "abstention";

fn share_columns(candidates: &[CandidateSpec], prefix: &str) -> Vec<String> {
    candidates
        .iter()
        .map(|c| format!("{prefix}{}", c.id))
        .collect()
}

/// Sorts by id, matching the order of shares inside [`RunMetrics`].
fn sorted(candidates: &[CandidateSpec]) -> Vec<CandidateSpec> {
    let mut out = candidates.to_vec();
    out.sort_by_key(|c| c.id);
    out
}

/// `seed,time,candidate_id,label,votes,share` with one trailing abstention row.
pub fn write_result<W: Write>(
    out: W,
    seed: u64,
    final_time: u64,
    candidates: &[CandidateSpec],
    metrics: &RunMetrics,
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "time", "candidate_id", "label", "votes", "share"])?;
    let result = &metrics.final_result;
    for c in sorted(candidates) {
        let votes = result.votes.get(&c.id).copied().unwrap_or(0);
        w.write_record([
            seed.to_string(),
            final_time.to_string(),
            c.id.to_string(),
            c.label.clone(),
            votes.to_string(),
            result.share(c.id).to_string(),
        ])?;
    }
    w.write_record([
        seed.to_string(),
        final_time.to_string(),
        ABSTENTION_ROW.to_string(),
        String::new(),
        result.abstentions.to_string(),
        result.abstention_rate().to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

/// `seed,time,abstention_rate,share_<id>...`, one row per recorded time.
pub fn write_series<W: Write>(
    out: W,
    seed: u64,
    candidates: &[CandidateSpec],
    metrics: &RunMetrics,
) -> csv::Result<()> {
    let candidates = sorted(candidates);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["seed".to_string(), "time".into(), "abstention_rate".into()];
    header.extend(share_columns(&candidates, "share_"));
    w.write_record(&header)?;
    for (t, (abstention, shares)) in metrics
        .abstention_series
        .iter()
        .zip(&metrics.share_series)
        .enumerate()
    {
        let mut row = vec![seed.to_string(), t.to_string(), abstention.to_string()];
        row.extend(shares.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `axis,value,seed,abstention_rate,share_<id>...`, one row per sweep cell.
pub fn write_sweep<W: Write>(
    out: W,
    axis: SweepAxis,
    candidates: &[CandidateSpec],
    rows: &[SweepRow],
) -> csv::Result<()> {
    let candidates = sorted(candidates);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "axis".to_string(),
        "value".into(),
        "seed".into(),
        "abstention_rate".into(),
    ];
    header.extend(share_columns(&candidates, "share_"));
    w.write_record(&header)?;
    for r in rows {
        let result = &r.metrics.final_result;
        let mut row = vec![
            axis.name().to_string(),
            r.value.to_string(),
            r.seed.to_string(),
            result.abstention_rate().to_string(),
        ];
        row.extend(result.shares().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-value means over seeds, in the order values first appear.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub value: f64,
    pub runs: usize,
    pub mean_abstention_rate: f64,
    pub mean_shares: Vec<f64>,
}

pub fn aggregate(rows: &[SweepRow]) -> Vec<AggregateRow> {
    let mut values: Vec<f64> = Vec::new();
    for r in rows {
        if !values.iter().any(|v| v.to_bits() == r.value.to_bits()) {
            values.push(r.value);
        }
    }
    values
        .into_iter()
        .map(|value| {
            let cell: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.value.to_bits() == value.to_bits())
                .collect();
            let n = cell.len() as f64;
            let width = cell[0].metrics.final_result.votes.len();
            let mut mean_shares = vec![0.0; width];
            let mut mean_abstention_rate = 0.0;
            for r in &cell {
                mean_abstention_rate += r.metrics.final_result.abstention_rate();
                for (m, s) in mean_shares.iter_mut().zip(r.metrics.final_result.shares()) {
                    *m += s;
                }
            }
            AggregateRow {
                value,
                runs: cell.len(),
                mean_abstention_rate: mean_abstention_rate / n,
                mean_shares: mean_shares.into_iter().map(|s| s / n).collect(),
            }
        })
        .collect()
}

/// `axis,value,runs,mean_abstention_rate,mean_share_<id>...`
pub fn write_aggregate<W: Write>(
    out: W,
    axis: SweepAxis,
    candidates: &[CandidateSpec],
    rows: &[AggregateRow],
) -> csv::Result<()> {
    let candidates = sorted(candidates);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "axis".to_string(),
        "value".into(),
        "runs".into(),
        "mean_abstention_rate".into(),
    ];
    header.extend(share_columns(&candidates, "mean_share_"));
    w.write_record(&header)?;
    for r in rows {
        let mut row = vec![
            axis.name().to_string(),
            r.value.to_string(),
            r.runs.to_string(),
            r.mean_abstention_rate.to_string(),
        ];
        row.extend(r.mean_shares.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
