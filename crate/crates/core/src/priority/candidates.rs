use std::collections::BTreeMap;

use crate::limit::Delta2Approx;
use crate::{Error, Result};

/// A candidate set: either fixed, or a stagewise membership approximation
/// (member at stage `s` iff the approximation is nonzero there).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Candidate {
    Static(Vec<usize>),
    Approx(Delta2Approx),
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Indexed {
    members: Vec<bool>,
    final_members: Vec<bool>,
    changes: BTreeMap<usize, Vec<(usize, bool)>>,
}

/// Candidate sets over `[0, H)` with per-stage change lists precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateFamily {
    horizon: usize,
    candidates: Vec<Candidate>,
    index: Vec<Indexed>,
}

impl CandidateFamily {
    pub fn new(horizon: usize, candidates: Vec<Candidate>) -> Result<Self> {
        let mut index = Vec::with_capacity(candidates.len());
        for c in &candidates {
            let mut members = vec![false; horizon];
            let mut changes: BTreeMap<usize, Vec<(usize, bool)>> = BTreeMap::new();
            match c {
                Candidate::Static(set) => {
                    for &x in set {
                        if x >= horizon {
                            return Err(Error::VertexOutOfRange {
                                vertex: x,
                                size: horizon,
                            });
                        }
                        members[x] = true;
                    }
                }
                Candidate::Approx(a) => {
                    if a.horizon() > horizon {
                        return Err(Error::StageOutOfRange {
                            stage: a.horizon(),
                            horizon,
                        });
                    }
                    for ev in a.events() {
                        if ev.point >= horizon {
                            return Err(Error::VertexOutOfRange {
                                vertex: ev.point,
                                size: horizon,
                            });
                        }
                        changes
                            .entry(ev.stage)
                            .or_default()
                            .push((ev.point, ev.value != 0));
                    }
                }
            }
            let final_members = match c {
                Candidate::Static(_) => members.clone(),
                Candidate::Approx(a) => (0..horizon).map(|x| a.limit(x) != 0).collect(),
            };
            index.push(Indexed {
                members,
                final_members,
                changes,
            });
        }
        Ok(CandidateFamily {
            horizon,
            candidates,
            index,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn candidates(&self) -> &[Candidate] {
        &self.candidates
    }

    /// Membership of `a` in candidate `e` at stage `s`.
    pub fn contains_at(&self, e: usize, a: usize, s: usize) -> bool {
        if a >= self.horizon {
            return false;
        }
        match &self.candidates[e] {
            Candidate::Static(_) => self.index[e].members[a],
            Candidate::Approx(ap) => ap.value_clamped(a, s) != 0,
        }
    }

    /// Membership in the final (stage `H - 1`) set.
    pub fn contains(&self, e: usize, a: usize) -> bool {
        a < self.horizon && self.index[e].final_members[a]
    }

    /// Final members of candidate `e`, ascending.
    pub fn final_members(&self, e: usize) -> Vec<usize> {
        (0..self.horizon).filter(|&a| self.contains(e, a)).collect()
    }

    /// Membership changes `(point, now_member)` taking effect at stage `s`.
    pub fn changes_at(&self, e: usize, s: usize) -> &[(usize, bool)] {
        self.index[e].changes.get(&s).map_or(&[], Vec::as_slice)
    }

    /// Stagewise membership as `(from_stage, member)` runs for point `a`.
    pub fn membership_runs(&self, e: usize, a: usize) -> Vec<(usize, bool)> {
        match &self.candidates[e] {
            Candidate::Static(_) => vec![(0, self.contains(e, a))],
            Candidate::Approx(ap) => {
                let mut runs = vec![(0, false)];
                for &(stage, value) in ap.events_of(a) {
                    runs.push((stage, value != 0));
                }
                runs
            }
        }
    }
}
