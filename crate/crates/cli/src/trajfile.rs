//! `trajectory.bin-v1`: little-endian, length-prefixed per-step records.
//!
//! Layout (see `docs/trajectory-format.md`):
//!
//! ```text
//! header:
//!   magic          4 bytes  "VSTJ"
//!   version        u16      1
//!   flags          u16      bit 0 = voter positions recorded
//!   seed           u64
//!   num_voters     u64
//!   num_candidates u32
//!   candidate ids  u32 × num_candidates
//!   record_count   u64
//! record (× record_count):
//!   length         u32      byte length of the payload that follows
//!   time           u64
//!   repulsions     f64 × num_candidates
//!   scandal_count  u32
//!   scandals       (id u64, target u32, potential f64) × scandal_count
//!   votes          u64 × num_candidates
//!   abstentions    u64
//!   positions      (x f64, y f64) × num_voters      only if flag bit 0
//! ```

use std::collections::BTreeMap;

use thiserror::Error;
use votesim_core::engine::{ScandalRecord, StepRecord, Trajectory};
use votesim_core::{CandidateId, ElectionResult, Point, ScandalId};

pub const MAGIC: &[u8; 4] = b"VSTJ";
pub const VERSION: u16 = 1;
pub const FILE_NAME: &str = "trajectory.bin-v1";

const FLAG_VOTERS: u16 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TrajectoryFileError {
    #[error("not a trajectory file (bad magic)")]
    BadMagic,
    #[error("unsupported trajectory version {0}")]
    Version(u16),
    #[error("unknown flag bits {0:#06x}")]
    Flags(u16),
    #[error("duplicate candidate id in header")]
    DuplicateCandidate,
    #[error("truncated {0}")]
    Truncated(String),
    #[error("record {index}: {reason}")]
    Record { index: u64, reason: String },
    #[error("{0} trailing bytes after the last record")]
    Trailing(usize),
}

pub fn encode(trajectory: &Trajectory) -> Vec<u8> {
    let with_voters = trajectory.records_voters();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(if with_voters { FLAG_VOTERS } else { 0 }).to_le_bytes());
    out.extend_from_slice(&trajectory.seed.to_le_bytes());
    out.extend_from_slice(&trajectory.num_voters.to_le_bytes());
    out.extend_from_slice(&(trajectory.candidate_ids.len() as u32).to_le_bytes());
    for id in &trajectory.candidate_ids {
        out.extend_from_slice(&id.0.to_le_bytes());
    }
    out.extend_from_slice(&(trajectory.records.len() as u64).to_le_bytes());

    let mut payload = Vec::new();
    for r in &trajectory.records {
        payload.clear();
        payload.extend_from_slice(&r.time.to_le_bytes());
        for g in &r.repulsions {
            payload.extend_from_slice(&g.to_le_bytes());
        }
        payload.extend_from_slice(&(r.scandals.len() as u32).to_le_bytes());
        for s in &r.scandals {
            payload.extend_from_slice(&s.id.0.to_le_bytes());
            payload.extend_from_slice(&s.target.0.to_le_bytes());
            payload.extend_from_slice(&s.potential.to_le_bytes());
        }
        for id in &trajectory.candidate_ids {
            let votes = r.tally.votes.get(id).copied().unwrap_or(0);
            payload.extend_from_slice(&votes.to_le_bytes());
        }
        payload.extend_from_slice(&r.tally.abstentions.to_le_bytes());
        if let Some(voters) = &r.voters {
            for p in voters {
                payload.extend_from_slice(&p.x.to_le_bytes());
                payload.extend_from_slice(&p.y.to_le_bytes());
            }
        }
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&payload);
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], String> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| what.to_string())?;
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u16(&mut self, what: &str) -> Result<u16, String> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().unwrap()))
    }

    fn u32(&mut self, what: &str) -> Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64, String> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

pub fn decode(bytes: &[u8]) -> Result<Trajectory, TrajectoryFileError> {
    let truncated = TrajectoryFileError::Truncated;
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4, "magic").map_err(truncated)? != MAGIC {
        return Err(TrajectoryFileError::BadMagic);
    }
    let version = r.u16("version").map_err(truncated)?;
    if version != VERSION {
        return Err(TrajectoryFileError::Version(version));
    }
    let flags = r.u16("flags").map_err(truncated)?;
    if flags & !FLAG_VOTERS != 0 {
        return Err(TrajectoryFileError::Flags(flags));
    }
    let with_voters = flags & FLAG_VOTERS != 0;
    let seed = r.u64("seed").map_err(truncated)?;
    let num_voters = r.u64("num_voters").map_err(truncated)?;
    let num_candidates = r.u32("num_candidates").map_err(truncated)? as usize;
    if num_candidates > r.remaining() / 4 {
        return Err(truncated("candidate ids".into()));
    }
    let mut candidate_ids = Vec::with_capacity(num_candidates);
    for _ in 0..num_candidates {
        candidate_ids.push(CandidateId(r.u32("candidate ids").map_err(truncated)?));
    }
    let mut sorted = candidate_ids.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != candidate_ids.len() {
        return Err(TrajectoryFileError::DuplicateCandidate);
    }
    let record_count = r.u64("record_count").map_err(truncated)?;

    let mut records = Vec::new();
    for index in 0..record_count {
        let bad = |reason: String| TrajectoryFileError::Record { index, reason };
        let len = r.u32("record length").map_err(bad)? as usize;
        let payload = r.take(len, "record payload").map_err(bad)?;
        let record = decode_record(payload, &candidate_ids, num_voters, with_voters).map_err(bad)?;
        records.push(record);
    }
    if r.remaining() != 0 {
        return Err(TrajectoryFileError::Trailing(r.remaining()));
    }
    Ok(Trajectory {
        seed,
        num_voters,
        candidate_ids,
        records,
    })
}

fn decode_record(
    payload: &[u8],
    candidate_ids: &[CandidateId],
    num_voters: u64,
    with_voters: bool,
) -> Result<StepRecord, String> {
    let mut r = Reader { buf: payload, pos: 0 };
    let time = r.u64("time")?;
    let repulsions = candidate_ids
        .iter()
        .map(|_| r.f64("repulsions"))
        .collect::<Result<Vec<_>, _>>()?;
    let scandal_count = r.u32("scandal_count")? as usize;
    if scandal_count > r.remaining() / 20 {
        return Err(format!("scandal_count {scandal_count} exceeds payload"));
    }
    let mut scandals = Vec::with_capacity(scandal_count);
    for _ in 0..scandal_count {
        scandals.push(ScandalRecord {
            id: ScandalId(r.u64("scandal id")?),
            target: CandidateId(r.u32("scandal target")?),
            potential: r.f64("scandal potential")?,
        });
    }
    let mut votes = BTreeMap::new();
    for id in candidate_ids {
        votes.insert(*id, r.u64("votes")?);
    }
    let abstentions = r.u64("abstentions")?;
    let voters = if with_voters {
        if num_voters > (r.remaining() / 16) as u64 {
            return Err("voter positions exceed payload".into());
        }
        let mut points = Vec::with_capacity(num_voters as usize);
        for _ in 0..num_voters {
            points.push(Point::new(r.f64("voter x")?, r.f64("voter y")?));
        }
        Some(points)
    } else {
        None
    };
    if r.remaining() != 0 {
        return Err(format!("{} unexpected bytes in payload", r.remaining()));
    }
    Ok(StepRecord {
        time,
        repulsions,
        scandals,
        voters,
        tally: ElectionResult { votes, abstentions },
    })
}
