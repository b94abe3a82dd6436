//! Strong diagonal non-recovery: builds a limit function `f` that no
//! tabled functional with a settling-time-bounded use can diagonalize.

use std::fmt;

use super::trace::EngineTag;
use super::{
    Check, Computation, EventKind, FunctionalTable, PriorityTrace, Status, Verdict, Verification,
};
use crate::limit::{Delta2Approx, EnumeratedSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InjuryReason {
    /// A higher-priority strategy restrained the same point.
    Higher,
    /// The matched computation or its use changed.
    Computation,
    Theta,
}

impl InjuryReason {
    fn as_str(self) -> &'static str {
        match self {
            InjuryReason::Higher => "higher",
            InjuryReason::Computation => "use",
            InjuryReason::Theta => "theta",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "higher" => InjuryReason::Higher,
            "use" => InjuryReason::Computation,
            "theta" => InjuryReason::Theta,
            other => {
                return Err(Error::MalformedTrace(format!(
                    "bad injury reason {other:?}"
                )))
            }
        })
    }
}

impl fmt::Display for InjuryReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A restraint held by strategy `e` on `a` during stages `from..until`
/// (`until = None` while still held at the horizon).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restraint {
    pub e: usize,
    pub a: usize,
    pub value: u32,
    pub use_len: usize,
    pub from: usize,
    pub until: Option<usize>,
}

impl Restraint {
    pub fn active_at(&self, s: usize) -> bool {
        self.from <= s && self.until.is_none_or(|u| s < u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Injury {
    pub stage: usize,
    pub e: usize,
    pub a: usize,
    pub reason: InjuryReason,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdnrRun {
    pub horizon: usize,
    /// Per point `y`: `(y, f_y(y))` followed by every later change.
    pub f_history: Vec<Vec<(usize, u32)>>,
    pub final_f: Vec<u32>,
    pub restraints: Vec<Restraint>,
    pub injuries: Vec<Injury>,
    pub trace: PriorityTrace,
}

impl SdnrRun {
    pub fn flips(&self, y: usize) -> usize {
        self.f_history[y].len() - 1
    }

    /// `f_s(y)` for `y <= s`.
    pub fn value_at(&self, y: usize, s: usize) -> u32 {
        let h = &self.f_history[y];
        let idx = h.partition_point(|&(st, _)| st <= s);
        if idx == 0 {
            0
        } else {
            h[idx - 1].1
        }
    }

    pub fn injuries_at(&self, y: usize) -> usize {
        self.injuries.iter().filter(|i| i.a == y).count()
    }
}

/// The stage-`s` oracle view of `d`.
pub fn oracle_at(d: &Delta2Approx, s: usize) -> impl Fn(usize) -> bool + '_ {
    move |b| d.value_clamped(b, s) != 0
}

/// `Φ_{e,s}^{D_s}(a)` restricted to computations with `use < θ_s(a)`.
pub fn qualifying(
    table: &FunctionalTable,
    a: usize,
    d: &Delta2Approx,
    e_set: &EnumeratedSet,
    s: usize,
) -> Option<(Computation, usize)> {
    let theta = e_set.theta(a, s)?;
    let comp = table.apply(a, oracle_at(d, s), s)?;
    (comp.use_len < theta).then_some((comp, theta))
}

struct Hold {
    restraint: usize,
    a: usize,
    comp: Computation,
    theta: usize,
}

pub fn run_sdnr(
    tables: &[FunctionalTable],
    d: &Delta2Approx,
    e_set: &EnumeratedSet,
    horizon: usize,
) -> SdnrRun {
    let mut trace = PriorityTrace::new(EngineTag::Sdnr);
    let mut holds: Vec<Option<Hold>> = (0..tables.len()).map(|_| None).collect();
    let mut restraints: Vec<Restraint> = Vec::new();
    let mut injuries = Vec::new();
    let mut f: Vec<u32> = Vec::with_capacity(horizon);
    let mut f_history: Vec<Vec<(usize, u32)>> = Vec::with_capacity(horizon);

    for s in 0..horizon {
        let oracle = oracle_at(d, s);
        let mut held: Vec<usize> = Vec::new();
        for (e, table) in tables.iter().enumerate() {
            if let Some(h) = &holds[e] {
                let reason = if held.contains(&h.a) {
                    Some(InjuryReason::Higher)
                } else if table.apply(h.a, &oracle, s).as_ref() != Some(&h.comp) {
                    Some(InjuryReason::Computation)
                } else if e_set.theta(h.a, s) != Some(h.theta) {
                    Some(InjuryReason::Theta)
                } else {
                    None
                };
                if let Some(reason) = reason {
                    trace.push(
                        s,
                        EventKind::Injure,
                        [
                            ("e", e.to_string()),
                            ("a", h.a.to_string()),
                            ("reason", reason.to_string()),
                        ],
                    );
                    injuries.push(Injury {
                        stage: s,
                        e,
                        a: h.a,
                        reason,
                    });
                    restraints[h.restraint].until = Some(s);
                    holds[e] = None;
                }
            }
            if holds[e].is_none() {
                let found = (e..=s)
                    .filter(|a| !held.contains(a))
                    .find_map(|a| qualifying(table, a, d, e_set, s).map(|q| (a, q)));
                if let Some((a, (comp, theta))) = found {
                    trace.push(
                        s,
                        EventKind::Restrain,
                        [("e", e), ("a", a), ("use", comp.use_len)],
                    );
                    trace.push(
                        s,
                        EventKind::Commit,
                        [("e", e), ("a", a), ("value", comp.value as usize)],
                    );
                    restraints.push(Restraint {
                        e,
                        a,
                        value: comp.value,
                        use_len: comp.use_len,
                        from: s,
                        until: None,
                    });
                    holds[e] = Some(Hold {
                        restraint: restraints.len() - 1,
                        a,
                        comp,
                        theta,
                    });
                }
            }
            if let Some(h) = &holds[e] {
                held.push(h.a);
            }
        }
        let mut next = vec![0u32; s + 1];
        for h in holds.iter().flatten() {
            next[h.a] = h.comp.value;
        }
        let mut changes = Vec::new();
        for y in 0..s {
            if next[y] != f[y] {
                changes.push(format!("{y}:{}", next[y]));
                f_history[y].push((s, next[y]));
            }
        }
        f_history.push(vec![(s, next[s])]);
        f = next;
        let changes = if changes.is_empty() {
            "-".to_string()
        } else {
            changes.join(",")
        };
        trace.push(
            s,
            EventKind::Assign,
            [
                ("y", s.to_string()),
                ("value", f[s].to_string()),
                ("changes", changes),
            ],
        );
    }
    SdnrRun {
        horizon,
        f_history,
        final_f: f,
        restraints,
        injuries,
        trace,
    }
}

/// Rebuilds a run from its RESTRAIN, COMMIT, INJURE and ASSIGN records.
pub fn sdnr_from_trace(trace: &PriorityTrace, horizon: usize) -> Result<SdnrRun> {
    trace.check_complete(horizon)?;
    let mut restraints: Vec<Restraint> = Vec::new();
    let mut open: std::collections::HashMap<usize, usize> = Default::default();
    let mut injuries = Vec::new();
    let mut f: Vec<u32> = Vec::new();
    let mut f_history: Vec<Vec<(usize, u32)>> = Vec::new();
    for r in &trace.records {
        match r.kind {
            EventKind::Injure => {
                let e = r.get_usize("e")?;
                let idx = open
                    .remove(&e)
                    .ok_or_else(|| Error::MalformedTrace(format!("injury of idle strategy {e}")))?;
                restraints[idx].until = Some(r.stage);
                injuries.push(Injury {
                    stage: r.stage,
                    e,
                    a: r.get_usize("a")?,
                    reason: InjuryReason::parse(r.get("reason").as_deref().unwrap_or(""))?,
                });
            }
            EventKind::Restrain => {
                let e = r.get_usize("e")?;
                if open.contains_key(&e) {
                    return Err(Error::MalformedTrace(format!(
                        "strategy {e} restrains twice"
                    )));
                }
                open.insert(e, restraints.len());
                restraints.push(Restraint {
                    e,
                    a: r.get_usize("a")?,
                    value: 0,
                    use_len: r.get_usize("use")?,
                    from: r.stage,
                    until: None,
                });
            }
            EventKind::Commit => {
                let e = r.get_usize("e")?;
                let idx = *open.get(&e).ok_or_else(|| {
                    Error::MalformedTrace(format!("commit without restraint for {e}"))
                })?;
                restraints[idx].value = r.get_u32("value")?;
            }
            EventKind::Assign => {
                let y = r.get_usize("y")?;
                if y != f.len() || y != r.stage {
                    return Err(Error::MalformedTrace(format!("ASSIGN of {y} out of order")));
                }
                let changes = r.get("changes");
                let changes = changes.as_deref().unwrap_or("-");
                if changes != "-" {
                    for item in changes.split(',') {
                        let (p, v) = item
                            .split_once(':')
                            .ok_or_else(|| Error::MalformedTrace(format!("bad change {item:?}")))?;
                        let p: usize = p.parse().map_err(|_| Error::MalformedTrace(item.into()))?;
                        let v: u32 = v.parse().map_err(|_| Error::MalformedTrace(item.into()))?;
                        if p >= y {
                            return Err(Error::MalformedTrace(format!("change of unassigned {p}")));
                        }
                        f[p] = v;
                        f_history[p].push((r.stage, v));
                    }
                }
                let v = r.get_u32("value")?;
                f.push(v);
                f_history.push(vec![(y, v)]);
            }
            _ => {}
        }
    }
    Ok(SdnrRun {
        horizon,
        f_history,
        final_f: f,
        restraints,
        injuries,
        trace: trace.clone(),
    })
}

/// Stages during which strategy `e` restrains `a`, classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestraintClass {
    Empty,
    Finite {
        last: usize,
    },
    /// Held from `since` through the last stage.
    Cofinite {
        since: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub e: usize,
    pub a: usize,
    pub class: RestraintClass,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementReport {
    pub e: usize,
    /// Least eligible witness under the final oracle, if any.
    pub witness: Option<usize>,
    /// A point where final `f` equals `Φ_e^D`.
    pub agreement: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SdnrReport {
    /// Stages with two strategies on one point or one strategy on two.
    pub overlap_stages: Vec<usize>,
    /// `(stage, point)` where a held commitment is missing from `f_s`.
    pub unrealized: Vec<(usize, usize)>,
    /// Restraints the replay cannot justify.
    pub unjustified: Vec<usize>,
    pub pairs: Vec<PairReport>,
    pub agreements: Vec<AgreementReport>,
    /// `(point, flips, injuries)` exceeding `1 + injuries`.
    pub flip_excess: Vec<(usize, usize, usize)>,
    /// Same shape, against `1 + 2 * injuries`: each injury can force one
    /// flip away from the held value and one back.
    pub flip_excess_doubled: Vec<(usize, usize, usize)>,
    pub max_flips: usize,
}

impl SdnrReport {
    pub fn structurally_ok(&self) -> bool {
        self.overlap_stages.is_empty()
            && self.unrealized.is_empty()
            && self.unjustified.is_empty()
            && self.pairs.iter().all(|p| p.consistent)
    }

    pub fn agreement_ok(&self) -> bool {
        self.agreements
            .iter()
            .all(|a| a.witness.is_none() || a.agreement.is_some())
    }

    pub fn flips_ok(&self) -> bool {
        self.flip_excess.is_empty()
    }

    pub fn doubled_flips_ok(&self) -> bool {
        self.flip_excess_doubled.is_empty()
    }

    pub fn to_verification(&self) -> Verification {
        let mut v = Verification::default();
        v.checks.push(Check::new(
            "restraints-disjoint",
            self.overlap_stages.is_empty(),
            format!("{} bad stages", self.overlap_stages.len()),
        ));
        v.checks.push(Check::new(
            "commitments-realized",
            self.unrealized.is_empty(),
            format!("{} missing", self.unrealized.len()),
        ));
        v.checks.push(Check::new(
            "restraints-justified",
            self.unjustified.is_empty(),
            format!("{} unjustified", self.unjustified.len()),
        ));
        let bad_pairs = self.pairs.iter().filter(|p| !p.consistent).count();
        v.checks.push(Check::new(
            "restraint-classes",
            bad_pairs == 0,
            format!(
                "{} pairs classified, {bad_pairs} inconsistent",
                self.pairs.len()
            ),
        ));
        v.checks.push(Check::new(
            "flips-by-injuries",
            self.flip_excess.is_empty(),
            match self.flip_excess.first() {
                Some((y, f, i)) => format!("point {y}: {f} flips, {i} injuries"),
                None => format!("max flips {}", self.max_flips),
            },
        ));
        v.checks.push(Check::new(
            "flips-by-double-injuries",
            self.flip_excess_doubled.is_empty(),
            match self.flip_excess_doubled.first() {
                Some((y, f, i)) => format!("point {y}: {f} flips, {i} injuries"),
                None => format!("{} points over the single bound", self.flip_excess.len()),
            },
        ));
        for a in &self.agreements {
            let (status, detail) = match (a.witness, a.agreement) {
                (None, _) => (Status::Pass, "no eligible witness".to_string()),
                (Some(w), Some(p)) => (Status::Pass, format!("witness {w}, agrees at {p}")),
                (Some(w), None) => (Status::Fail, format!("witness {w}, no agreement")),
            };
            v.verdicts.push(Verdict {
                subject: format!("Phi{}", a.e),
                status,
                detail,
                record: None,
            });
        }
        v.counters.insert("max-flips".into(), self.max_flips as u64);
        v
    }
}

/// Least `a` where a qualifying computation at stage `s` outputs `values[a]`.
pub fn first_agreement(
    table: &FunctionalTable,
    values: &[u32],
    d: &Delta2Approx,
    e_set: &EnumeratedSet,
    s: usize,
) -> Option<usize> {
    (0..values.len())
        .find(|&a| qualifying(table, a, d, e_set, s).is_some_and(|(c, _)| c.value == values[a]))
}

pub fn verify_sdnr(
    run: &SdnrRun,
    tables: &[FunctionalTable],
    d: &Delta2Approx,
    e_set: &EnumeratedSet,
) -> SdnrReport {
    let h = run.horizon;
    let last = h.saturating_sub(1);

    let mut overlap_stages = Vec::new();
    let mut unrealized = Vec::new();
    for s in 0..h {
        let active: Vec<&Restraint> = run.restraints.iter().filter(|r| r.active_at(s)).collect();
        let mut points: Vec<usize> = active.iter().map(|r| r.a).collect();
        let mut owners: Vec<usize> = active.iter().map(|r| r.e).collect();
        points.sort_unstable();
        owners.sort_unstable();
        if points.windows(2).any(|w| w[0] == w[1]) || owners.windows(2).any(|w| w[0] == w[1]) {
            overlap_stages.push(s);
        }
        for r in active {
            if r.a > s || run.value_at(r.a, s) != r.value {
                unrealized.push((s, r.a));
            }
        }
    }
    for y in 0..h {
        for s in y..h {
            let held = run.restraints.iter().any(|r| r.a == y && r.active_at(s));
            if !held && run.value_at(y, s) != 0 {
                unrealized.push((s, y));
                break;
            }
        }
    }

    let unjustified = run
        .restraints
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            let Some(table) = tables.get(r.e) else {
                return true;
            };
            r.a < r.e
                || qualifying(table, r.a, d, e_set, r.from)
                    .is_none_or(|(c, _)| c.value != r.value || c.use_len != r.use_len)
        })
        .map(|(i, _)| i)
        .collect();

    let final_oracle = oracle_at(d, last);
    let final_comp = |e: usize, a: usize| tables[e].apply(a, &final_oracle, last);
    let mut pairs = Vec::new();
    for (e, _) in tables.iter().enumerate() {
        for a in 0..h {
            let mut stages = run
                .restraints
                .iter()
                .filter(|r| r.e == e && r.a == a)
                .peekable();
            if stages.peek().is_none() {
                continue;
            }
            let rs: Vec<&Restraint> = stages.collect();
            let cofinite = rs.iter().find(|r| r.until.is_none()).map(|r| r.from);
            let class = match cofinite {
                Some(since) => RestraintClass::Cofinite { since },
                None => RestraintClass::Finite {
                    last: rs.iter().filter_map(|r| r.until).max().unwrap_or(0) - 1,
                },
            };
            let comp = final_comp(e, a);
            let consistent = a >= e
                && e_set.theta(a, last).is_some()
                && match class {
                    RestraintClass::Cofinite { .. } => comp.is_some_and(|c| {
                        e_set.theta(a, last).is_some_and(|t| c.use_len < t)
                            && run.final_f[a] == c.value
                    }),
                    _ => true,
                };
            pairs.push(PairReport {
                e,
                a,
                class,
                consistent,
            });
        }
    }

    let held_final: Vec<(usize, usize)> = run
        .restraints
        .iter()
        .filter(|r| r.until.is_none())
        .map(|r| (r.e, r.a))
        .collect();
    let agreements = (0..tables.len())
        .map(|e| {
            let witness = (e..h).find(|&a| {
                !held_final.iter().any(|&(e2, a2)| e2 < e && a2 == a)
                    && qualifying(&tables[e], a, d, e_set, last).is_some()
            });
            let agreement = first_agreement(&tables[e], &run.final_f, d, e_set, last);
            AgreementReport {
                e,
                witness,
                agreement,
            }
        })
        .collect();

    let mut flip_excess = Vec::new();
    let mut flip_excess_doubled = Vec::new();
    let mut max_flips = 0;
    for y in 0..h {
        let flips = run.flips(y);
        max_flips = max_flips.max(flips);
        let inj = run.injuries_at(y);
        if flips > 1 + inj {
            flip_excess.push((y, flips, inj));
        }
        if flips > 1 + 2 * inj {
            flip_excess_doubled.push((y, flips, inj));
        }
    }
    SdnrReport {
        overlap_stages,
        unrealized,
        unjustified,
        pairs,
        agreements,
        flip_excess,
        flip_excess_doubled,
        max_flips,
    }
}
