//! Stable thin-set diagonalizer: colors stages so that each candidate set
//! meets every color, or is exhausted while its requirement waits.

use std::fmt;

use super::trace::EngineTag;
use super::{
    cantor_pair, CandidateFamily, Check, EventKind, PriorityTrace, Status, Verdict, Verification,
};
use crate::limit::{to_stable_pairs, Delta2Approx, Event};
use crate::Result;

/// Requirement `R_{e,i}`: candidate `e` meets color `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Req {
    pub e: usize,
    pub i: u32,
}

impl Req {
    pub fn priority(self) -> usize {
        cantor_pair(self.e, self.i as usize)
    }
}

impl fmt::Display for Req {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.e, self.i)
    }
}

fn parse_req(s: &str) -> Option<Req> {
    let (e, i) = s.split_once(',')?;
    Some(Req {
        e: e.parse().ok()?,
        i: i.parse().ok()?,
    })
}

/// Final state of one requirement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Satisfaction {
    pub req: Req,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StsRun {
    pub horizon: usize,
    pub colors: u32,
    pub c: Vec<u32>,
    /// Scheduled requirements in priority order.
    pub satisfaction: Vec<Satisfaction>,
    pub trace: PriorityTrace,
}

/// Requirements in priority order that can become eligible before `horizon`.
pub fn scheduled(candidates: usize, colors: u32, horizon: usize) -> Vec<Req> {
    let mut reqs: Vec<Req> = (0..candidates)
        .flat_map(|e| (0..colors).map(move |i| Req { e, i }))
        .filter(|r| r.priority() + 1 < horizon)
        .collect();
    reqs.sort_by_key(|r| r.priority());
    reqs
}

fn least_witness(
    z: &CandidateFamily,
    c: &[u32],
    r: Req,
    below: usize,
    stage: usize,
) -> Option<usize> {
    (0..below).find(|&a| c[a] == r.i && z.contains_at(r.e, a, stage))
}

/// Runs the diagonalizer for `horizon` stages with colors `0..colors`.
pub fn run_sts(z: &CandidateFamily, colors: u32, horizon: usize) -> StsRun {
    let reqs = scheduled(z.len(), colors, horizon);
    let mut trace = PriorityTrace::new(EngineTag::Sts);
    let mut member: Vec<Vec<bool>> = (0..z.len())
        .map(|e| (0..horizon).map(|a| z.contains_at(e, a, 0)).collect())
        .collect();
    let mut counts = vec![vec![0usize; colors as usize]; z.len()];
    let mut sat = vec![false; reqs.len()];
    let mut c: Vec<u32> = Vec::with_capacity(horizon);
    let mut active: Option<usize> = None;

    for s in 0..horizon {
        for (e, cnt) in counts.iter_mut().enumerate() {
            for &(a, m) in z.changes_at(e, s) {
                if a >= horizon || member[e][a] == m {
                    continue;
                }
                member[e][a] = m;
                if a + 1 < s && (c[a] as usize) < cnt.len() {
                    if m {
                        cnt[c[a] as usize] += 1;
                    } else {
                        cnt[c[a] as usize] -= 1;
                    }
                }
            }
            if s > 0 && member[e][s - 1] && (c[s - 1] as usize) < cnt.len() {
                cnt[c[s - 1] as usize] += 1;
            }
        }
        for (k, r) in reqs.iter().enumerate() {
            let now = counts[r.e][r.i as usize] > 0;
            if now && !sat[k] {
                let a = least_witness(z, &c, *r, s, s).expect("positive count has a witness");
                trace.push(
                    s,
                    EventKind::Satisfy,
                    [("req", r.to_string()), ("a", a.to_string())],
                );
            } else if !now && sat[k] {
                trace.push(s, EventKind::Injure, [("req", r.to_string())]);
            }
            sat[k] = now;
        }
        let chosen = reqs
            .iter()
            .enumerate()
            .take_while(|(_, r)| r.priority() < s)
            .find(|&(k, _)| !sat[k])
            .map(|(k, _)| k);
        if let Some(k) = chosen.filter(|_| chosen != active) {
            trace.push(s, EventKind::Activate, [("req", reqs[k].to_string())]);
        }
        active = chosen;
        let value = chosen.map_or(0, |k| reqs[k].i);
        c.push(value);
        trace.push(s, EventKind::Assign, [("value", value)]);
    }

    let satisfaction = reqs
        .iter()
        .map(|&req| Satisfaction {
            req,
            witness: (0..horizon).find(|&a| c[a] == req.i && z.contains(req.e, a)),
        })
        .collect();
    StsRun {
        horizon,
        colors,
        c,
        satisfaction,
        trace,
    }
}

/// Rebuilds a run from its trace; the final satisfaction table is
/// recomputed against `z`.
pub fn sts_from_trace(
    trace: &PriorityTrace,
    z: &CandidateFamily,
    colors: u32,
    horizon: usize,
) -> Result<StsRun> {
    trace.check_complete(horizon)?;
    let mut c = vec![None; horizon];
    for r in trace.records.iter().filter(|r| r.kind == EventKind::Assign) {
        if r.stage >= horizon || c[r.stage].is_some() {
            return Err(crate::Error::MalformedTrace(format!(
                "duplicate or stray ASSIGN at stage {}",
                r.stage
            )));
        }
        c[r.stage] = Some(r.get_u32("value")?);
    }
    let c: Vec<u32> = c
        .into_iter()
        .enumerate()
        .map(|(s, v)| v.ok_or(crate::Error::TruncatedTrace(s)))
        .collect::<Result<_>>()?;
    let satisfaction = scheduled(z.len(), colors, horizon)
        .into_iter()
        .map(|req| Satisfaction {
            req,
            witness: (0..horizon).find(|&a| c[a] == req.i && z.contains(req.e, a)),
        })
        .collect();
    Ok(StsRun {
        horizon,
        colors,
        c,
        satisfaction,
        trace: trace.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StsVerdict {
    Satisfied {
        witness: usize,
    },
    /// Continuously the least unsatisfied requirement from `since` on, and
    /// the candidate has no element in `[since, H)`.
    Excused {
        since: usize,
    },
    /// Unsatisfied behind the final active requirement.
    Blocked {
        by: Req,
    },
    Violated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementReport {
    pub req: Req,
    pub verdict: StsVerdict,
    pub record: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StsReport {
    pub requirements: Vec<RequirementReport>,
    /// First stage whose color differs from the independent replay.
    pub replay_mismatch: Option<usize>,
    /// Trace records citing an invalid witness or an activation the replay
    /// does not reproduce.
    pub bad_records: Vec<usize>,
    pub palette_ok: bool,
    pub thin_window: usize,
    pub thin_subsets_checked: usize,
    pub thin_counterexample: Option<[usize; 4]>,
}

impl StsReport {
    pub fn satisfied(&self) -> usize {
        self.requirements
            .iter()
            .filter(|r| matches!(r.verdict, StsVerdict::Satisfied { .. }))
            .count()
    }

    pub fn count(&self, pred: impl Fn(&StsVerdict) -> bool) -> usize {
        self.requirements
            .iter()
            .filter(|r| pred(&r.verdict))
            .count()
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied() == self.requirements.len()
    }

    /// Every unsatisfied requirement carries a proven excuse.
    pub fn all_accounted(&self) -> bool {
        self.requirements.iter().all(|r| {
            matches!(
                r.verdict,
                StsVerdict::Satisfied { .. } | StsVerdict::Excused { .. }
            )
        })
    }

    pub fn structurally_ok(&self) -> bool {
        self.replay_mismatch.is_none()
            && self.bad_records.is_empty()
            && self.palette_ok
            && self.thin_counterexample.is_none()
    }

    pub fn to_verification(&self) -> Verification {
        let mut v = Verification::default();
        v.checks.push(Check::new(
            "replay",
            self.replay_mismatch.is_none(),
            match self.replay_mismatch {
                Some(s) => format!("color differs at stage {s}"),
                None => "colors reproduced".into(),
            },
        ));
        v.checks.push(Check::new(
            "trace-records",
            self.bad_records.is_empty(),
            format!("{} invalid records", self.bad_records.len()),
        ));
        v.checks.push(Check::new(
            "palette",
            self.palette_ok,
            "c(s) below color bound",
        ));
        v.checks.push(Check::new(
            "thin-transfer",
            self.thin_counterexample.is_none(),
            match self.thin_counterexample {
                Some(a) => format!("color sets differ on {a:?}"),
                None => format!(
                    "{} four-element subsets of [0,{})",
                    self.thin_subsets_checked, self.thin_window
                ),
            },
        ));
        for r in &self.requirements {
            let (status, detail) = match r.verdict {
                StsVerdict::Satisfied { witness } => (Status::Pass, format!("witness {witness}")),
                StsVerdict::Excused { since } => {
                    (Status::Pass, format!("candidate empty from stage {since}"))
                }
                StsVerdict::Blocked { by } => (Status::Undetermined, format!("blocked by R{by}")),
                StsVerdict::Violated => (Status::Fail, "unsatisfied without excuse".into()),
            };
            v.verdicts.push(Verdict {
                subject: format!("R{}", r.req),
                status,
                detail,
                record: r.record,
            });
        }
        v.counters
            .insert("requirements".into(), self.requirements.len() as u64);
        v.counters
            .insert("satisfied".into(), self.satisfied() as u64);
        v
    }
}

/// Status of `r` at each stage `0..=H`; index `H` is the final state.
fn status_timeline(z: &CandidateFamily, c: &[u32], r: Req) -> Vec<bool> {
    let h = c.len();
    let mut diff = vec![0i64; h + 2];
    for a in (0..h).filter(|&a| c[a] == r.i) {
        let runs = z.membership_runs(r.e, a);
        for (k, &(from, member)) in runs.iter().enumerate() {
            if !member {
                continue;
            }
            let to = runs.get(k + 1).map_or(h + 1, |&(s, _)| s);
            let lo = from.max(a + 1);
            if lo < to {
                diff[lo] += 1;
                diff[to.min(h + 1)] -= 1;
            }
        }
    }
    let mut acc = 0;
    (0..=h)
        .map(|s| {
            acc += diff[s];
            acc > 0
        })
        .collect()
}

/// Checks the color sets of `h` on `[A]^2` against those of `c` on
/// `A \ {max A}` over all 4-subsets of the window.
fn thin_transfer(c: &[u32], window: usize) -> Result<(usize, Option<[usize; 4]>)> {
    let w = window.min(c.len());
    if w < 4 {
        return Ok((0, None));
    }
    let events = (0..w).filter(|&x| c[x] != 0).map(|x| Event {
        point: x,
        stage: x,
        value: c[x],
    });
    let approx = Delta2Approx::new(w, events)?;
    let h = to_stable_pairs(&approx)?;
    let mask = |v: u32| 1u128 << v.min(127);
    let mut checked = 0;
    for a in 0..w {
        for b in a + 1..w {
            for d in b + 1..w {
                for m in d + 1..w {
                    checked += 1;
                    let set = [a, b, d, m];
                    let mut hm = 0u128;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            hm |= mask(h.color(set[i], set[j]));
                        }
                    }
                    let cm = mask(c[a]) | mask(c[b]) | mask(c[d]);
                    if hm != cm {
                        return Ok((checked, Some(set)));
                    }
                }
            }
        }
    }
    Ok((checked, None))
}

/// Replays `run` against `z` and classifies every scheduled requirement.
pub fn verify_sts(run: &StsRun, z: &CandidateFamily, thin_window: usize) -> Result<StsReport> {
    let h = run.horizon;
    let c = &run.c;
    if c.len() != h {
        return Err(crate::Error::MalformedTrace(format!(
            "color sequence has length {} for horizon {h}",
            c.len()
        )));
    }
    let reqs = scheduled(z.len(), run.colors, h);
    let timelines: Vec<Vec<bool>> = crate::batch::map(&reqs, |&r| status_timeline(z, c, r));
    let chosen: Vec<Option<usize>> = (0..h)
        .map(|s| {
            reqs.iter()
                .enumerate()
                .take_while(|(_, r)| r.priority() < s)
                .find(|&(k, _)| !timelines[k][s])
                .map(|(k, _)| k)
        })
        .collect();
    let replay_mismatch = (0..h).find(|&s| c[s] != chosen[s].map_or(0, |k| reqs[k].i));
    let palette_ok =
        run.colors == 0 && c.iter().all(|&v| v == 0) || c.iter().all(|&v| v < run.colors);

    let mut bad_records = Vec::new();
    let mut last_satisfy = vec![None; reqs.len()];
    for (idx, rec) in run.trace.records.iter().enumerate() {
        match rec.kind {
            EventKind::Satisfy => {
                let ok = (|| {
                    let r = parse_req(&rec.get("req")?)?;
                    let a = rec.get_usize("a").ok()?;
                    let k = reqs.iter().position(|&q| q == r)?;
                    last_satisfy[k] = Some(idx);
                    Some(a < rec.stage && c[a] == r.i && z.contains_at(r.e, a, rec.stage))
                })();
                if ok != Some(true) {
                    bad_records.push(idx);
                }
            }
            EventKind::Activate => {
                let ok = rec.stage < h
                    && rec
                        .get("req")
                        .and_then(|v| parse_req(&v))
                        .is_some_and(|r| chosen[rec.stage].map(|k| reqs[k]) == Some(r))
                    && (rec.stage == 0 || chosen[rec.stage - 1] != chosen[rec.stage]);
                if !ok {
                    bad_records.push(idx);
                }
            }
            _ => {}
        }
    }

    let last_chosen = h.checked_sub(1).and_then(|s| chosen[s]);
    let requirements = reqs
        .iter()
        .enumerate()
        .map(|(k, &req)| {
            let final_witness = (0..h).find(|&a| c[a] == req.i && z.contains(req.e, a));
            let verdict = if let Some(witness) = final_witness {
                StsVerdict::Satisfied { witness }
            } else if last_chosen == Some(k) {
                let since = (0..h)
                    .rev()
                    .take_while(|&s| chosen[s] == Some(k))
                    .last()
                    .expect("chosen at the last stage");
                if (since..h).any(|a| z.contains(req.e, a)) {
                    StsVerdict::Violated
                } else {
                    StsVerdict::Excused { since }
                }
            } else if let Some(b) = last_chosen.filter(|&b| b < k) {
                StsVerdict::Blocked { by: reqs[b] }
            } else {
                StsVerdict::Violated
            };
            RequirementReport {
                req,
                verdict,
                record: last_satisfy[k],
            }
        })
        .collect();
    let (thin_subsets_checked, thin_counterexample) = thin_transfer(c, thin_window)?;
    Ok(StsReport {
        requirements,
        replay_mismatch,
        bad_records,
        palette_ok,
        thin_window: thin_window.min(h),
        thin_subsets_checked,
        thin_counterexample,
    })
}
