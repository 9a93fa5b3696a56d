//! Antibody-antigen alignment and match scoring.
//!
//! An antigen is the job sequence of one machine in a good schedule for
//! one scenario. An antibody is a shorter job sequence, possibly holding
//! wildcards, that is slid along the antigen and scored position by
//! position: 5 for an exact job match, 1 for a wildcard, 0 otherwise.
//! The match score of a pair is the best single alignment's sum.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::JobId;

/// One antibody position: a concrete job or the wildcard `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symbol {
    Job(JobId),
    Wildcard,
}

impl Symbol {
    pub fn job(self) -> Option<JobId> {
        match self {
            Symbol::Job(id) => Some(id),
            Symbol::Wildcard => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Job(id) => write!(f, "{id}"),
            Symbol::Wildcard => write!(f, "*"),
        }
    }
}

pub const EXACT_MATCH_SCORE: u64 = 5;
pub const WILDCARD_MATCH_SCORE: u64 = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchError {
    #[error("antigen sequence must be non-empty with distinct job ids")]
    InvalidAntigen,
    #[error("antibody must be non-empty with distinct non-wildcard job ids")]
    InvalidAntibody,
    #[error("offset {offset} exceeds {max} for this antibody/antigen pair")]
    OffsetOutOfRange { offset: usize, max: usize },
    #[error("antibody of length {antibody} must be shorter than the antigen of length {antigen}")]
    AntibodyTooLong { antibody: usize, antigen: usize },
    #[error("antibody set is empty")]
    EmptyAntibodySet,
    #[error("cannot parse `{0}` as a job sequence")]
    Unparseable(String),
}

/// A machine's job sequence under one scenario, tagged with its origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Antigen {
    sequence: Vec<JobId>,
    pub machine: usize,
    pub scenario_id: usize,
}

impl Antigen {
    pub fn new(sequence: Vec<JobId>, machine: usize, scenario_id: usize) -> Result<Self, MatchError> {
        if sequence.is_empty() {
            return Err(MatchError::InvalidAntigen);
        }
        let mut seen = sequence.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != sequence.len() || sequence.contains(&0) {
            return Err(MatchError::InvalidAntigen);
        }
        Ok(Antigen {
            sequence,
            machine,
            scenario_id,
        })
    }

    pub fn sequence(&self) -> &[JobId] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    /// Always false: antigens are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Antigen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.sequence.iter().map(|id| id.to_string()).collect();
        write!(f, "{}", tokens.join(","))
    }
}

impl FromStr for Antigen {
    type Err = MatchError;

    /// Parses the debugging text form; machine and scenario default to 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = parse_symbols(s)?;
        let mut sequence = Vec::with_capacity(symbols.len());
        for sym in symbols {
            match sym {
                Symbol::Job(id) => sequence.push(id),
                Symbol::Wildcard => return Err(MatchError::Unparseable(s.to_string())),
            }
        }
        Antigen::new(sequence, 0, 0)
    }
}

/// A short job sequence acting as a reusable scheduling building block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Antibody {
    symbols: Vec<Symbol>,
}

impl Antibody {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self, MatchError> {
        if symbols.is_empty() {
            return Err(MatchError::InvalidAntibody);
        }
        let mut jobs: Vec<JobId> = symbols.iter().filter_map(|s| s.job()).collect();
        if jobs.contains(&0) {
            return Err(MatchError::InvalidAntibody);
        }
        jobs.sort_unstable();
        let distinct = jobs.len();
        jobs.dedup();
        if jobs.len() != distinct {
            return Err(MatchError::InvalidAntibody);
        }
        Ok(Antibody { symbols })
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false: antibodies are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Non-wildcard job ids in antibody order.
    pub fn jobs(&self) -> Vec<JobId> {
        self.symbols.iter().filter_map(|s| s.job()).collect()
    }

    pub fn wildcard_count(&self) -> usize {
        self.symbols
            .iter()
            .filter(|s| matches!(s, Symbol::Wildcard))
            .count()
    }
}

impl fmt::Display for Antibody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tokens: Vec<String> = self.symbols.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", tokens.join(","))
    }
}

impl FromStr for Antibody {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Antibody::new(parse_symbols(s)?)
    }
}

/// Accepts the comma form `9,8,*` always, and the contiguous single-digit
/// form `98*` when every id is below 10.
fn parse_symbols(s: &str) -> Result<Vec<Symbol>, MatchError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(MatchError::Unparseable(s.to_string()));
    }
    if s.contains(',') {
        s.split(',')
            .map(|tok| match tok.trim() {
                "*" => Ok(Symbol::Wildcard),
                t => t
                    .parse::<JobId>()
                    .ok()
                    .filter(|&id| id > 0)
                    .map(Symbol::Job)
                    .ok_or_else(|| MatchError::Unparseable(s.to_string())),
            })
            .collect()
    } else {
        s.chars()
            .map(|ch| match ch {
                '*' => Ok(Symbol::Wildcard),
                '1'..='9' => Ok(Symbol::Job(ch as JobId - '0' as JobId)),
                _ => Err(MatchError::Unparseable(s.to_string())),
            })
            .collect()
    }
}

/// Scores one alignment of `antibody` against `antigen` at `offset`:
/// 5 per exact job match, 1 per wildcard, 0 otherwise.
pub fn alignment_score(
    antibody: &Antibody,
    antigen: &Antigen,
    offset: usize,
) -> Result<u64, MatchError> {
    let max = antigen
        .len()
        .checked_sub(antibody.len())
        .ok_or(MatchError::OffsetOutOfRange {
            offset,
            max: 0,
        })?;
    if offset > max {
        return Err(MatchError::OffsetOutOfRange { offset, max });
    }
    let mut score = 0;
    for (i, sym) in antibody.symbols().iter().enumerate() {
        score += match sym {
            Symbol::Wildcard => WILDCARD_MATCH_SCORE,
            Symbol::Job(id) if *id == antigen.sequence()[offset + i] => EXACT_MATCH_SCORE,
            Symbol::Job(_) => 0,
        };
    }
    Ok(score)
}

/// Best alignment score over every valid offset. The antibody must be
/// strictly shorter than the antigen.
pub fn match_score(antibody: &Antibody, antigen: &Antigen) -> Result<u64, MatchError> {
    if antibody.len() >= antigen.len() {
        return Err(MatchError::AntibodyTooLong {
            antibody: antibody.len(),
            antigen: antigen.len(),
        });
    }
    let mut best = 0;
    for offset in 0..=(antigen.len() - antibody.len()) {
        best = best.max(alignment_score(antibody, antigen, offset)?);
    }
    Ok(best)
}

/// Highest score an antibody of this shape could reach: 5 per concrete
/// job plus 1 per wildcard.
pub fn perfect_score(antibody: &Antibody) -> u64 {
    EXACT_MATCH_SCORE * antibody.len() as u64
}

/// How far the best antibody in the set falls short of covering the
/// antigen: `5 * len(best) - match_score(best)`, where `best` maximizes
/// the match score (ties to the lowest index). Zero means the winner
/// aligns perfectly somewhere in the antigen.
pub fn antigen_deficit(antigen: &Antigen, antibodies: &[Antibody]) -> Result<u64, MatchError> {
    if antibodies.is_empty() {
        return Err(MatchError::EmptyAntibodySet);
    }
    let mut best: Option<(u64, &Antibody)> = None;
    for antibody in antibodies {
        let score = match_score(antibody, antigen)?;
        let wins = match best {
            None => true,
            Some((best_score, _)) => score > best_score,
        };
        if wins {
            best = Some((score, antibody));
        }
    }
    let (score, winner) = best.expect("non-empty set");
    Ok(perfect_score(winner) - score)
}
