//! Stable ascending/descending-sequence avoider: builds a stable linear
//! order of type ω+ω* whose ω part `U` splits every large candidate.

use std::fmt;

use super::trace::{EngineTag, TraceValue};
use super::{CandidateFamily, Check, EventKind, PriorityTrace, Status, Verdict, Verification};
use crate::structures::{Beats, LinearOrderPrefix, Tournament};
use crate::{Error, Result};

/// How a requirement decides whether it needs attention for a decision-maker `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatusMode {
    /// Unsatisfied by witnesses below `u`: the inner approximation at
    /// outer index `u`.
    #[default]
    Threshold,
    /// Unsatisfied by any witness below the current stage.
    Stage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SadsOptions {
    /// Require `i < u` instead of `i <= u` for `R_i` to claim `u`.
    pub strict: bool,
    pub status: StatusMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClaimAction {
    Add,
    Remove,
    None,
}

impl ClaimAction {
    fn as_str(self) -> &'static str {
        match self {
            ClaimAction::Add => "add",
            ClaimAction::Remove => "remove",
            ClaimAction::None => "none",
        }
    }
}

impl fmt::Display for ClaimAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Claim {
    pub stage: usize,
    pub req: usize,
    pub dm: usize,
    pub action: ClaimAction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SadsRun {
    pub horizon: usize,
    pub options: SadsOptions,
    /// Per element, `(s, member)`: membership in `U_{s+1}` set at stage `s`.
    pub u_history: Vec<Vec<(usize, bool)>>,
    pub final_u: Vec<bool>,
    /// `x -> y` iff `x <_L y`.
    pub relation: Tournament,
    /// Per element, `(s, leader)`: from stage `s` on the element follows `leader`.
    pub followers: Vec<Vec<(usize, usize)>>,
    pub claims: Vec<Claim>,
    pub trace: PriorityTrace,
}

/// Membership of `v` in `U_s` given its change history.
pub fn in_u_at(history: &[(usize, bool)], s: usize) -> bool {
    let idx = history.partition_point(|&(st, _)| st < s);
    idx > 0 && history[idx - 1].1
}

fn relation_from_history(u_history: &[Vec<(usize, bool)>]) -> Tournament {
    Tournament::from_fn(u_history.len(), |u, s| in_u_at(&u_history[u], s))
}

impl SadsRun {
    pub fn order(&self) -> Result<LinearOrderPrefix> {
        LinearOrderPrefix::from_tournament(self.relation.clone())
    }

    pub fn u_members(&self) -> Vec<usize> {
        (0..self.horizon).filter(|&v| self.final_u[v]).collect()
    }

    pub fn flips(&self, v: usize) -> usize {
        self.u_history[v].len()
    }
}

/// Runs the construction for `horizon` stages.
pub fn run_sads(z: &CandidateFamily, horizon: usize, options: SadsOptions) -> SadsRun {
    let nreq = 2 * z.len();
    let mut trace = PriorityTrace::new(EngineTag::Sads);
    let mut in_u = vec![false; horizon];
    let mut u_history = vec![Vec::new(); horizon];
    let mut dm = vec![true; horizon];
    let mut followers = vec![Vec::new(); horizon];
    let mut claims = Vec::new();
    let mut member: Vec<Vec<bool>> = (0..z.len())
        .map(|e| (0..horizon).map(|a| z.contains_at(e, a, 0)).collect())
        .collect();
    let mut sat = vec![false; nreq];

    for s in 0..horizon {
        trace.push(s, EventKind::Assign, [("x", s)]);
        for (e, m) in member.iter_mut().enumerate() {
            for &(a, now) in z.changes_at(e, s) {
                if a < horizon {
                    m[a] = now;
                }
            }
        }
        // Least witness below s for each requirement; `s` when none.
        let witness: Vec<usize> = (0..nreq)
            .map(|k| {
                let m = &member[k / 2];
                (0..s)
                    .find(|&a| m[a] && in_u[a] == (k % 2 == 0))
                    .unwrap_or(s)
            })
            .collect();
        for k in 0..nreq {
            let now = witness[k] < s;
            if now && !sat[k] {
                trace.push(s, EventKind::Satisfy, [("req", k), ("a", witness[k])]);
            } else if !now && sat[k] {
                trace.push(s, EventKind::Injure, [("req", k)]);
            }
            sat[k] = now;
        }
        let mut u = 0;
        while u <= s {
            if !dm[u] {
                u += 1;
                continue;
            }
            let bound = match options.status {
                StatusMode::Threshold => u,
                StatusMode::Stage => s,
            };
            let claimer = (0..nreq)
                .take_while(|&k| if options.strict { k < u } else { k <= u })
                .find(|&k| witness[k] >= bound);
            let Some(k) = claimer else {
                u += 1;
                continue;
            };
            let action = if k % 2 == 0 && !in_u[u] {
                ClaimAction::Add
            } else if k % 2 == 1 && in_u[u] {
                ClaimAction::Remove
            } else {
                ClaimAction::None
            };
            claims.push(Claim {
                stage: s,
                req: k,
                dm: u,
                action,
            });
            trace.push(
                s,
                EventKind::Claim,
                [
                    ("req", TraceValue::from(k)),
                    ("dm", u.into()),
                    ("action", TraceValue::Word(action.as_str())),
                    ("lo", u.into()),
                    ("hi", s.into()),
                ],
            );
            if action != ClaimAction::None {
                let target = action == ClaimAction::Add;
                for v in u..=s {
                    if in_u[v] != target {
                        in_u[v] = target;
                        u_history[v].push((s, target));
                        trace.push(s, EventKind::Uflip, [("x", v), ("in", target as usize)]);
                    }
                }
                for v in u + 1..=s {
                    dm[v] = false;
                    if followers[v].last().map(|&(_, l)| l) != Some(u) {
                        followers[v].push((s, u));
                    }
                }
                u = s + 1;
            } else {
                u += 1;
            }
        }
    }
    let relation = relation_from_history(&u_history);
    SadsRun {
        horizon,
        options,
        u_history,
        final_u: in_u,
        relation,
        followers,
        claims,
        trace,
    }
}

/// Rebuilds a run from CLAIM and UFLIP records.
pub fn sads_from_trace(
    trace: &PriorityTrace,
    horizon: usize,
    options: SadsOptions,
) -> Result<SadsRun> {
    trace.check_complete(horizon)?;
    let mut u_history = vec![Vec::new(); horizon];
    let mut followers: Vec<Vec<(usize, usize)>> = vec![Vec::new(); horizon];
    let mut claims = Vec::new();
    let mut in_u = vec![false; horizon];
    for r in &trace.records {
        match r.kind {
            EventKind::Claim => {
                let action = match r.get("action").as_deref() {
                    Some("add") => ClaimAction::Add,
                    Some("remove") => ClaimAction::Remove,
                    Some("none") => ClaimAction::None,
                    other => {
                        return Err(Error::MalformedTrace(format!("bad claim action {other:?}")))
                    }
                };
                let (dm, hi) = (r.get_usize("dm")?, r.get_usize("hi")?);
                if dm > hi || hi >= horizon {
                    return Err(Error::MalformedTrace(format!("claim interval [{dm},{hi}]")));
                }
                claims.push(Claim {
                    stage: r.stage,
                    req: r.get_usize("req")?,
                    dm,
                    action,
                });
                if action != ClaimAction::None {
                    for hist in &mut followers[dm + 1..=hi] {
                        if hist.last().map(|&(_, l)| l) != Some(dm) {
                            hist.push((r.stage, dm));
                        }
                    }
                }
            }
            EventKind::Uflip => {
                let v = r.get_usize("x")?;
                let now = r.get_usize("in")? == 1;
                if v >= horizon || in_u[v] == now {
                    return Err(Error::MalformedTrace(format!(
                        "UFLIP of {v} changes nothing"
                    )));
                }
                in_u[v] = now;
                u_history[v].push((r.stage, now));
            }
            _ => {}
        }
    }
    let relation = relation_from_history(&u_history);
    Ok(SadsRun {
        horizon,
        options,
        u_history,
        final_u: in_u,
        relation,
        followers,
        claims,
        trace: trace.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateOutcome {
    pub e: usize,
    /// First stage after which no higher-priority requirement is
    /// unsatisfied or acts.
    pub quiescence: usize,
    pub late_elements: usize,
    pub meets_u: bool,
    pub meets_complement: bool,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SadsReport {
    pub three_cycle: Option<[usize; 3]>,
    /// A pair `(u, s)` where `L` disagrees with `u ∈ U_s`.
    pub order_mismatch: Option<(usize, usize)>,
    /// Elements whose flip count exceeds the acting claims covering them.
    pub flip_excess: Vec<(usize, usize, usize)>,
    /// Elements breaking the ω/ω* pattern after their last change.
    pub tail_violations: Vec<usize>,
    /// Largest number of elements `L`-below a final member of `U`.
    pub omega_bound: usize,
    pub follower_violations: Vec<usize>,
    pub candidates: Vec<CandidateOutcome>,
}

impl SadsReport {
    pub fn structurally_ok(&self) -> bool {
        self.three_cycle.is_none()
            && self.order_mismatch.is_none()
            && self.flip_excess.is_empty()
            && self.tail_violations.is_empty()
            && self.follower_violations.is_empty()
    }

    pub fn requirements_ok(&self) -> bool {
        self.candidates.iter().all(|c| c.status != Status::Fail)
    }

    pub fn to_verification(&self) -> Verification {
        let mut v = Verification::default();
        v.checks.push(Check::new(
            "linear",
            self.three_cycle.is_none(),
            match self.three_cycle {
                Some(c) => format!("3-cycle {c:?}"),
                None => "no 3-cycle".into(),
            },
        ));
        v.checks.push(Check::new(
            "order-history",
            self.order_mismatch.is_none(),
            format!("{:?}", self.order_mismatch),
        ));
        v.checks.push(Check::new(
            "flips-by-claims",
            self.flip_excess.is_empty(),
            format!("{} elements over budget", self.flip_excess.len()),
        ));
        v.checks.push(Check::new(
            "omega-tail",
            self.tail_violations.is_empty(),
            format!("bound {}", self.omega_bound),
        ));
        v.checks.push(Check::new(
            "followers",
            self.follower_violations.is_empty(),
            format!("{} violations", self.follower_violations.len()),
        ));
        for c in &self.candidates {
            v.verdicts.push(Verdict {
                subject: format!("Z{}", c.e),
                status: c.status,
                detail: format!(
                    "quiet from {}, {} late elements, in U: {}, outside U: {}",
                    c.quiescence, c.late_elements, c.meets_u, c.meets_complement
                ),
                record: None,
            });
        }
        v.counters
            .insert("omega-bound".into(), self.omega_bound as u64);
        v
    }
}

/// Late elements a candidate needs before its split is required.
pub const SPLIT_THRESHOLD: usize = 16;

pub fn verify_sads(run: &SadsRun, z: &CandidateFamily) -> SadsReport {
    let h = run.horizon;
    let three_cycle = run.relation.find_three_cycle();
    let order_mismatch = (0..h).find_map(|s| {
        (0..s)
            .find(|&u| run.relation.beats(u, s) != in_u_at(&run.u_history[u], s))
            .map(|u| (u, s))
    });

    let mut covering = vec![0i64; h + 1];
    for c in run.claims.iter().filter(|c| c.action != ClaimAction::None) {
        covering[c.dm] += 1;
        covering[c.stage + 1] -= 1;
    }
    let mut acc = 0;
    let mut flip_excess = Vec::new();
    for v in 0..h {
        acc += covering[v];
        if run.flips(v) as i64 > acc {
            flip_excess.push((v, run.flips(v), acc as usize));
        }
    }

    let mut tail_violations = Vec::new();
    let mut omega_bound = 0;
    for v in 0..h {
        let settled = run.u_history[v].last().map_or(v, |&(s, _)| s.max(v));
        let member = run.final_u[v];
        if (settled + 1..h).any(|w| run.relation.beats(v, w) != member) {
            tail_violations.push(v);
        }
        if member {
            let below = (0..h)
                .filter(|&w| w != v && run.relation.beats(w, v))
                .count();
            omega_bound = omega_bound.max(below);
        }
    }

    let mut follower_violations = Vec::new();
    for v in 0..h {
        let hist = &run.followers[v];
        let ok = hist
            .windows(2)
            .all(|w| w[1].1 <= w[0].1 && w[0].0 <= w[1].0)
            && hist
                .iter()
                .all(|&(s, l)| l < v && !run.followers[l].iter().any(|&(st, _)| st <= s));
        if !ok {
            follower_violations.push(v);
        }
    }

    let candidates = candidate_outcomes(run, z);
    SadsReport {
        three_cycle,
        order_mismatch,
        flip_excess,
        tail_violations,
        omega_bound,
        follower_violations,
        candidates,
    }
}

/// Stage-level requirement status, recomputed from the U history: the
/// status of `R_k` at stage `s` counts witnesses `a < s` whose membership
/// in `Z_{e,s}` and `U_s` is constant between breakpoints.
fn stage_status(run: &SadsRun, z: &CandidateFamily) -> Vec<Vec<bool>> {
    let h = run.horizon;
    (0..2 * z.len())
        .map(|k| {
            let (e, want) = (k / 2, k % 2 == 0);
            let mut diff = vec![0i64; h + 1];
            for a in 0..h {
                let mut bounds: Vec<usize> = z
                    .membership_runs(e, a)
                    .iter()
                    .map(|&(s, _)| s)
                    .chain(run.u_history[a].iter().map(|&(s, _)| s + 1))
                    .chain([a + 1])
                    .filter(|&s| s > a && s < h)
                    .collect();
                bounds.sort_unstable();
                bounds.dedup();
                for (i, &lo) in bounds.iter().enumerate() {
                    let hi = bounds.get(i + 1).copied().unwrap_or(h);
                    if z.contains_at(e, a, lo) && in_u_at(&run.u_history[a], lo) == want {
                        diff[lo] += 1;
                        diff[hi] -= 1;
                    }
                }
            }
            let mut acc = 0;
            (0..h)
                .map(|s| {
                    acc += diff[s];
                    acc > 0
                })
                .collect()
        })
        .collect()
}

fn candidate_outcomes(run: &SadsRun, z: &CandidateFamily) -> Vec<CandidateOutcome> {
    let h = run.horizon;
    let status = stage_status(run, z);
    let mut last_active = vec![0usize; 2 * z.len()];
    for (k, row) in status.iter().enumerate() {
        if let Some(s) = (0..h).rev().find(|&s| !row[s]) {
            last_active[k] = s + 1;
        }
    }
    for c in run.claims.iter().filter(|c| c.action != ClaimAction::None) {
        last_active[c.req] = last_active[c.req].max(c.stage + 1);
    }
    (0..z.len())
        .map(|e| {
            let quiescence = last_active[..2 * e].iter().copied().max().unwrap_or(0);
            let members = z.final_members(e);
            let late_elements = members.iter().filter(|&&a| a >= quiescence).count();
            let meets_u = members.iter().any(|&a| run.final_u[a]);
            let meets_complement = members.iter().any(|&a| !run.final_u[a]);
            let status = if late_elements < SPLIT_THRESHOLD {
                Status::Undetermined
            } else {
                Status::from_bool(meets_u && meets_complement)
            };
            CandidateOutcome {
                e,
                quiescence,
                late_elements,
                meets_u,
                meets_complement,
                status,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::{Delta2Approx, Event};
    use crate::priority::Candidate;

    fn scripted() -> CandidateFamily {
        let z1 = Delta2Approx::new(
            24,
            [
                Event {
                    point: 2,
                    stage: 0,
                    value: 1,
                },
                Event {
                    point: 2,
                    stage: 8,
                    value: 0,
                },
                Event {
                    point: 10,
                    stage: 5,
                    value: 1,
                },
                Event {
                    point: 15,
                    stage: 5,
                    value: 1,
                },
                Event {
                    point: 21,
                    stage: 5,
                    value: 1,
                },
            ],
        )
        .unwrap();
        CandidateFamily::new(
            24,
            vec![
                Candidate::Static(vec![4, 6, 9, 13, 17, 20]),
                Candidate::Approx(z1),
            ],
        )
        .unwrap()
    }

    fn acting(run: &SadsRun) -> Vec<(usize, usize, usize)> {
        run.claims
            .iter()
            .filter(|c| c.action != ClaimAction::None)
            .map(|c| (c.stage, c.req, c.dm))
            .collect()
    }

    #[test]
    fn empty_family_is_descending() {
        let z = CandidateFamily::new(20, vec![]).unwrap();
        let run = run_sads(&z, 20, SadsOptions::default());
        assert!(run.final_u.iter().all(|&m| !m));
        assert_eq!(run.relation, Tournament::descending(20));
        let rep = verify_sads(&run, &z);
        assert!(rep.structurally_ok() && rep.candidates.is_empty());
    }

    #[test]
    fn full_candidate_hand_replay() {
        // R_0 puts 0 into U at stage 0 and is met from stage 1; R_1 is met
        // by 1 from stage 2 without acting. Nothing is ever removed.
        let z = CandidateFamily::new(32, vec![Candidate::Static((0..32).collect())]).unwrap();
        let run = run_sads(&z, 32, SadsOptions::default());
        assert_eq!(run.u_members(), vec![0]);
        assert_eq!(acting(&run), vec![(0, 0, 0)]);
        assert_eq!(run.claims.len(), 63);
        let rep = verify_sads(&run, &z);
        assert!(rep.structurally_ok());
        assert!(rep.candidates[0].meets_u && rep.candidates[0].meets_complement);
    }

    #[test]
    fn scripted_two_candidates() {
        let z = scripted();
        let run = run_sads(&z, 24, SadsOptions::default());
        assert_eq!(run.u_members(), vec![0, 1, 2, 3, 4, 7, 8, 9, 10]);
        assert_eq!(
            acting(&run),
            vec![
                (0, 0, 0),
                (1, 0, 1),
                (2, 0, 2),
                (3, 0, 3),
                (4, 0, 4),
                (8, 2, 7),
                (9, 2, 9),
                (10, 2, 10)
            ]
        );
        let rep = verify_sads(&run, &z);
        assert!(rep.structurally_ok(), "{rep:?}");
        assert!(run.order().is_ok());

        let strict = run_sads(
            &z,
            24,
            SadsOptions {
                strict: true,
                ..Default::default()
            },
        );
        assert_eq!(strict.u_members(), vec![1, 2, 3, 4, 7, 8, 9, 10]);
    }

    #[test]
    fn stage_status_oscillates() {
        let z = scripted();
        let run = run_sads(
            &z,
            24,
            SadsOptions {
                status: StatusMode::Stage,
                ..Default::default()
            },
        );
        assert_eq!(run.u_members(), vec![0]);
        let flips: usize = (0..24).map(|v| run.flips(v)).sum();
        assert_eq!(flips, 261);
        let rep = verify_sads(&run, &z);
        assert!(rep.three_cycle.is_none() && rep.flip_excess.is_empty());
    }

    #[test]
    fn trace_round_trip_and_tamper() {
        let z = scripted();
        let run = run_sads(&z, 24, SadsOptions::default());
        let back = sads_from_trace(&run.trace, 24, SadsOptions::default()).unwrap();
        assert_eq!(back, run);
        let mut bad = run.clone();
        bad.relation.orient(10, 3);
        let rep = verify_sads(&bad, &z);
        assert!(rep.order_mismatch.is_some());
    }
}
