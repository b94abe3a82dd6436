use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::gen;
use super::scenario::{approx_from_events, CandidateKind, Engine, FamilySource, Scenario};
use crate::em::{em_walk, verify_walk, WalkConfig};
use crate::limit::{Delta2Approx, EnumeratedSet};
use crate::priority::sads::{run_sads, sads_from_trace, verify_sads, SadsOptions};
use crate::priority::sdnr::{run_sdnr, sdnr_from_trace, verify_sdnr};
use crate::priority::sts::{run_sts, sts_from_trace, verify_sts};
use crate::priority::{
    Candidate, CandidateFamily, Check, EngineTag, EventKind, FunctionalTable, PriorityTrace,
    Status, TableEntry, Verdict, Verification,
};
use crate::reductions::{
    canonical_cohesive_instance, collapse_with_tail, find_cohesive, find_cohesive_exhaustive,
    greedy_rainbow, is_rainbow, lift_rainbow, tail_len, Collapse, KBoundedColoring,
};
use crate::structures::{cohesive_report, Beats, HashedTournament, SetFamily, Tournament};
use crate::{batch, Error, Result};

/// First line of every trace file, followed by `engine=<name>`.
pub const TRACE_HEADER: &str = "# finjury-trace v1";
/// Prefix of the embedded scenario lines.
pub const SCENARIO_PREFIX: &str = "#> ";
/// First line of every machine report.
pub const REPORT_HEADER: &str = "# finjury-report v1";

/// Largest family for which the exhaustive cohesive oracle is run.
const COHESIVE_ORACLE_LIMIT: usize = 12;

/// Verifier outcome for one scenario. Everything except `wall_time` is a
/// function of the scenario and the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub engine: Engine,
    pub digest: String,
    pub horizon: usize,
    pub seed: u64,
    pub verification: Verification,
    /// File line of the first trace record.
    pub first_record_line: usize,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn passed(&self, strict: bool) -> bool {
        self.verification.passed(strict)
    }

    /// Deterministic line records.
    pub fn render_machine(&self) -> String {
        let v = &self.verification;
        let mut out = format!(
            "{REPORT_HEADER}\nscenario {}\ndigest {}\nengine {}\nhorizon {}\nseed {}\n",
            self.name, self.digest, self.engine, self.horizon, self.seed
        );
        for c in &v.checks {
            out.push_str(&format!("check {} {} {}\n", c.name, c.status, c.detail));
        }
        for d in &v.verdicts {
            let line = d.record.map_or("-".to_string(), |r| {
                (self.first_record_line + r).to_string()
            });
            out.push_str(&format!(
                "verdict {} {} line={line} {}\n",
                d.subject, d.status, d.detail
            ));
        }
        for (k, n) in &v.counters {
            out.push_str(&format!("counter {k} {n}\n"));
        }
        let word = |ok: bool| if ok { "pass" } else { "fail" };
        out.push_str(&format!(
            "result lenient={} strict={}\n",
            word(self.passed(false)),
            word(self.passed(true))
        ));
        out
    }
}

/// Fixed-width table over several reports, with wall times.
pub fn render_table(reports: &[RunReport], strict: bool) -> String {
    let mut out = format!(
        "{:<28} {:<9} {:>7} {:>7} {:>6} {:>6} {:>6} {:>6} {:>9}\n",
        "scenario", "engine", "H", "checks", "pass", "fail", "undet", "result", "wall ms"
    );
    for r in reports {
        let v = &r.verification;
        let statuses = v
            .checks
            .iter()
            .map(|c| c.status)
            .chain(v.verdicts.iter().map(|d| d.status));
        let (mut p, mut f, mut u) = (0, 0, 0);
        for s in statuses {
            match s {
                Status::Pass => p += 1,
                Status::Fail => f += 1,
                Status::Undetermined => u += 1,
            }
        }
        out.push_str(&format!(
            "{:<28} {:<9} {:>7} {:>7} {:>6} {:>6} {:>6} {:>6} {:>9.1}\n",
            r.name,
            r.engine.as_str(),
            r.horizon,
            v.checks.len(),
            p,
            f,
            u,
            if r.passed(strict) { "PASS" } else { "FAIL" },
            r.wall_time.as_secs_f64() * 1e3
        ));
    }
    out
}

/// A finished run: its report and the full trace file text.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: RunReport,
    pub trace: String,
}

fn header_lines(s: &Scenario) -> Vec<String> {
    let mut lines = vec![format!("{TRACE_HEADER} engine={}", s.engine)];
    lines.extend(s.to_text().lines().map(|l| format!("{SCENARIO_PREFIX}{l}")));
    lines
}

/// Candidate family of a priority scenario.
pub fn build_candidates(s: &Scenario) -> Result<CandidateFamily> {
    let p = s.candidates();
    let h = s.horizon;
    let list = if !p.inline.is_empty() {
        p.inline
            .iter()
            .map(|c| match (&c.members, &c.events) {
                (Some(m), _) => Ok(Candidate::Static(m.clone())),
                (None, Some(ev)) => Ok(Candidate::Approx(approx_from_events(h, ev)?)),
                (None, None) => Err(Error::Scenario {
                    location: "candidates.inline".into(),
                    message: "empty candidate".into(),
                }),
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        let mut r = gen::rng(s.seed);
        match p.kind {
            CandidateKind::Windowed => (0..p.count)
                .map(|_| Candidate::Static(gen::windowed_set(&mut r, h, p.window)))
                .collect(),
            CandidateKind::Approx => (0..p.count)
                .map(|_| Candidate::Approx(gen::delta2_set(&mut r, h, p.flips, p.density)))
                .collect(),
            CandidateKind::Mixed => gen::mixed_candidates(&mut r, p.count, h, p.flips),
        }
    };
    CandidateFamily::new(h, list)
}

/// Functional tables, oracle approximation and enumeration of an `sdnr`
/// scenario.
pub fn build_sdnr(s: &Scenario) -> Result<(Vec<FunctionalTable>, Delta2Approx, EnumeratedSet)> {
    let p = s.sdnr();
    match &p.inline {
        Some(inl) => {
            let tables = inl
                .tables
                .iter()
                .enumerate()
                .map(|(e, t)| {
                    FunctionalTable::new(
                        e,
                        t.iter().map(|en| TableEntry {
                            input: en.input,
                            prefix: en.prefix.bytes().map(|b| b == b'1').collect(),
                            value: en.value,
                        }),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let d = approx_from_events(s.horizon, &inl.oracle)?;
            let e = EnumeratedSet::new(inl.enumeration.iter().map(|&[x, st]| (x, st)).collect())?;
            Ok((tables, d, e))
        }
        None => gen::sdnr_instance(&mut gen::rng(s.seed), s.horizon, p.functionals, p.live_bits),
    }
}

/// Generated or inline tournaments of an `em-walk` scenario.
#[derive(Debug, Clone)]
pub enum WalkTournament {
    Hashed(HashedTournament),
    Table(Tournament),
}

impl Beats for WalkTournament {
    fn order(&self) -> usize {
        match self {
            WalkTournament::Hashed(t) => t.order(),
            WalkTournament::Table(t) => t.order(),
        }
    }

    fn beats(&self, x: usize, y: usize) -> bool {
        match self {
            WalkTournament::Hashed(t) => t.beats(x, y),
            WalkTournament::Table(t) => t.beats(x, y),
        }
    }
}

pub fn build_tournaments(s: &Scenario) -> Result<Vec<WalkTournament>> {
    let p = s.em_walk();
    if !p.inline.is_empty() {
        return p
            .inline
            .iter()
            .map(|t| Tournament::from_text(t).map(WalkTournament::Table))
            .collect();
    }
    Ok(gen::tournament_seeds(s.seed, p.tournaments)
        .into_iter()
        .map(|seed| WalkTournament::Hashed(HashedTournament::new(s.horizon, seed)))
        .collect())
}

pub fn build_collapse(s: &Scenario) -> Result<(KBoundedColoring, Vec<usize>)> {
    let p = s.collapse();
    match &p.inline {
        Some(text) => {
            let f = KBoundedColoring::from_text(text)?;
            let z = p.z.clone().unwrap_or_else(|| (0..s.horizon).collect());
            Ok((f, z))
        }
        None => {
            let (f, z) = gen::settled_collapse_instance(&mut gen::rng(s.seed), s.horizon)?;
            Ok((f, p.z.clone().unwrap_or(z)))
        }
    }
}

pub fn build_family(s: &Scenario) -> Result<SetFamily> {
    let p = s.cohesive();
    if !p.inline.is_empty() {
        return SetFamily::new(s.horizon, p.inline.clone());
    }
    let mut r = gen::rng(s.seed);
    match p.source {
        FamilySource::Random => gen::random_family(&mut r, p.members, s.horizon),
        FamilySource::Canonical => {
            let (tables, _, e) = gen::sdnr_instance(&mut r, s.horizon, p.members, 4)?;
            canonical_cohesive_instance(&tables, &e, s.horizon)
        }
    }
}

fn to_lines(trace: &PriorityTrace) -> Vec<String> {
    trace.records.iter().map(|r| r.to_string()).collect()
}

fn collapse_trace(c: &std::result::Result<Collapse, Error>) -> PriorityTrace {
    let mut t = PriorityTrace::new(EngineTag::Collapse);
    match c {
        Ok(c) => {
            for (sigma, tau) in &c.witness {
                t.push(
                    0,
                    EventKind::Assign,
                    [
                        ("sigma", format!("{},{}", sigma[0], sigma[1])),
                        ("value", format!("{},{}", tau[0], tau[1])),
                    ],
                );
            }
            t.push(
                0,
                EventKind::Commit,
                [
                    ("domain", c.domain.len().to_string()),
                    ("tail", c.tail.len().to_string()),
                ],
            );
        }
        Err(Error::NotSettled { sigma, tau }) => {
            t.push(
                0,
                EventKind::Injure,
                [
                    ("sigma", format!("{},{}", sigma[0], sigma[1])),
                    ("tau", format!("{},{}", tau[0], tau[1])),
                ],
            );
        }
        Err(_) => {
            t.push(0, EventKind::Injure, [("reason", "invalid")]);
        }
    }
    t
}

fn verify_collapse(
    s: &Scenario,
    f: &KBoundedColoring,
    z: &[usize],
) -> (PriorityTrace, Verification) {
    let zs = crate::structures::sorted_unique(z);
    let default_tail = s.collapse().tail.unwrap_or_else(|| tail_len(zs.len()));
    let result = collapse_with_tail(f, &zs, default_tail);
    let trace = collapse_trace(&result);
    let mut v = Verification::default();
    match &result {
        Ok(c) => {
            v.checks.push(Check::new(
                "settled",
                true,
                format!("tail of {}", c.tail.len()),
            ));
            let worst = c.ftilde.worst_color().map_or(0, |w| w.1);
            v.checks.push(Check::new(
                "ftilde-2-bounded",
                worst <= 2,
                format!("max preimages {worst}"),
            ));
            let r = greedy_rainbow(&c.ftilde, &c.domain);
            let lifted = lift_rainbow(f, c, &r);
            let ok = is_rainbow(f, &lifted).unwrap_or(false);
            v.checks.push(Check::new(
                "rainbow-lifts",
                ok,
                format!("|R| = {}, lifted {}", r.len(), lifted.len()),
            ));
            v.counters
                .insert("witnesses".into(), c.witness.len() as u64);
            // Whether halving or doubling the tail changes anything.
            let alt: Vec<bool> = [zs.len().div_ceil(8), zs.len().div_ceil(2)]
                .into_iter()
                .map(|t| match collapse_with_tail(f, &zs, t) {
                    Ok(other) => other.witness != c.witness,
                    Err(_) => true,
                })
                .collect();
            let sensitive = alt.iter().any(|&b| b);
            v.counters
                .insert("threshold-sensitive".into(), sensitive as u64);
            v.verdicts.push(Verdict {
                subject: "tail-threshold".into(),
                status: if sensitive {
                    Status::Undetermined
                } else {
                    Status::Pass
                },
                detail: format!("eighth {} half {}", changed(alt[0]), changed(alt[1])),
                record: None,
            });
        }
        Err(e) => v.checks.push(Check::new("settled", false, e.to_string())),
    }
    (trace, v)
}

fn changed(b: bool) -> &'static str {
    if b {
        "differs"
    } else {
        "agrees"
    }
}

fn verify_family(family: &SetFamily, n: usize) -> Result<(PriorityTrace, Verification)> {
    let cell = find_cohesive(family, n)?;
    let mut t = PriorityTrace::new(EngineTag::Cohesive);
    let signs: String = cell
        .signs
        .iter()
        .map(|&b| if b { '1' } else { '0' })
        .collect();
    let signs = if signs.is_empty() {
        "-".to_string()
    } else {
        signs
    };
    let report = cohesive_report(&cell.set, family);
    for (i, r) in report.iter().enumerate() {
        t.push(
            0,
            EventKind::Assign,
            [
                ("member", i.to_string()),
                ("side", format!("{:?}", r.side).to_lowercase()),
                ("exceptions", r.exceptions.to_string()),
            ],
        );
    }
    t.push(
        0,
        EventKind::Commit,
        [("signs", signs), ("size", cell.set.len().to_string())],
    );
    let mut v = Verification::default();
    let exc: usize = report.iter().map(|r| r.exceptions).sum();
    v.checks.push(Check::new(
        "no-exceptions",
        exc == 0,
        format!("{exc} exceptions"),
    ));
    if family.len() <= COHESIVE_ORACLE_LIMIT {
        let oracle = find_cohesive_exhaustive(family, n)?;
        v.checks.push(Check::new(
            "oracle-maximum",
            oracle == cell,
            format!("size {} vs oracle {}", cell.set.len(), oracle.set.len()),
        ));
    } else {
        v.checks.push(Check {
            name: "oracle-maximum".into(),
            status: Status::Undetermined,
            detail: format!("{} members above oracle limit", family.len()),
        });
    }
    v.counters.insert("cell-size".into(), cell.set.len() as u64);
    Ok((t, v))
}

/// Runs the engine: trace record lines plus the verifier outcome.
fn execute(s: &Scenario) -> Result<(Vec<String>, Verification)> {
    let h = s.horizon;
    Ok(match s.engine {
        Engine::Sts => {
            let z = build_candidates(s)?;
            let p = s.sts();
            let run = run_sts(&z, p.colors, h);
            let v = verify_sts(&run, &z, p.thin_window)?.to_verification();
            (to_lines(&run.trace), v)
        }
        Engine::Sads => {
            let z = build_candidates(s)?;
            let p = s.sads();
            let run = run_sads(
                &z,
                h,
                SadsOptions {
                    strict: p.strict,
                    status: p.status,
                },
            );
            (
                to_lines(&run.trace),
                verify_sads(&run, &z).to_verification(),
            )
        }
        Engine::Sdnr => {
            let (tables, d, e) = build_sdnr(s)?;
            let run = run_sdnr(&tables, &d, &e, h);
            let v = verify_sdnr(&run, &tables, &d, &e).to_verification();
            (to_lines(&run.trace), v)
        }
        Engine::EmWalk => {
            let ts = build_tournaments(s)?;
            let p = s.em_walk();
            let arrivals = if p.arrivals.is_empty() {
                vec![0; ts.len()]
            } else {
                p.arrivals.clone()
            };
            let mut cfg = WalkConfig::new(h, arrivals, p.target);
            cfg.chunk = p.chunk;
            cfg.cap = p.cap;
            let out = em_walk(&ts, &cfg)?;
            let mut v = Verification::default();
            for (nu, cyc) in verify_walk(&ts, &out).into_iter().enumerate() {
                v.checks.push(Check::new(
                    format!("transitive-{nu}"),
                    cyc.is_none(),
                    match cyc {
                        Some(c) => format!("3-cycle {c:?}"),
                        None => format!("past offset {}", out.sigma.get(nu).copied().unwrap_or(0)),
                    },
                ));
            }
            v.checks.push(Check::new(
                "target",
                out.reached_target,
                out.diagnostic
                    .clone()
                    .unwrap_or_else(|| format!("|G| = {}", out.g.len())),
            ));
            let bound = (usize::BITS - 1 - h.max(1).leading_zeros()) as usize / ts.len().max(1);
            v.checks.push(Check::new(
                "pigeonhole-bound",
                out.g.len() >= bound.min(p.target),
                format!("|G| = {}, guaranteed {bound}", out.g.len()),
            ));
            v.counters.insert("g-size".into(), out.g.len() as u64);
            v.counters.insert("steps".into(), out.trace.len() as u64);
            let mut lines = out.trace.clone();
            lines.push(format!(
                "end | g | [{}]",
                out.g
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            ));
            (lines, v)
        }
        Engine::Collapse => {
            let (f, z) = build_collapse(s)?;
            let (t, v) = verify_collapse(s, &f, &z);
            (to_lines(&t), v)
        }
        Engine::Cohesive => {
            let family = build_family(s)?;
            let (t, v) = verify_family(&family, h)?;
            (to_lines(&t), v)
        }
    })
}

fn report_for(s: &Scenario, verification: Verification, started: Instant) -> RunReport {
    RunReport {
        name: s.name.clone(),
        engine: s.engine,
        digest: s.digest(),
        horizon: s.horizon,
        seed: s.seed,
        verification,
        first_record_line: header_lines(s).len() + 1,
        wall_time: started.elapsed(),
    }
}

/// Runs a scenario in memory.
pub fn run(s: &Scenario) -> Result<RunOutput> {
    let started = Instant::now();
    let (records, v) = execute(s)?;
    let mut trace = header_lines(s).join("\n");
    trace.push('\n');
    for r in &records {
        trace.push_str(r);
        trace.push('\n');
    }
    Ok(RunOutput {
        report: report_for(s, v, started),
        trace,
    })
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Paths written by [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct Persisted {
    pub output: RunOutput,
    pub trace_path: PathBuf,
    pub report_path: PathBuf,
}

/// Runs a scenario and writes `<name>.trace` and `<name>.report` under
/// `dir`. The trace header is flushed before the engine starts, so a failed
/// run leaves it behind.
pub fn run_to_dir(s: &Scenario, dir: &Path) -> Result<Persisted> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let trace_path = dir.join(format!("{}.trace", s.name));
    let report_path = dir.join(format!("{}.report", s.name));
    let mut file = std::fs::File::create(&trace_path).map_err(|e| io_err(&trace_path, e))?;
    for l in header_lines(s) {
        writeln!(file, "{l}").map_err(|e| io_err(&trace_path, e))?;
    }
    file.flush().map_err(|e| io_err(&trace_path, e))?;
    let output = run(s)?;
    std::fs::write(&trace_path, &output.trace).map_err(|e| io_err(&trace_path, e))?;
    std::fs::write(&report_path, output.report.render_machine())
        .map_err(|e| io_err(&report_path, e))?;
    Ok(Persisted {
        output,
        trace_path,
        report_path,
    })
}

/// Independent scenarios, evaluated through [`batch::map`].
pub fn run_all(scenarios: &[Scenario]) -> Vec<Result<RunOutput>> {
    batch::map(scenarios, run)
}

/// Re-derives the report from trace text. Priority engines are rebuilt from
/// their records; the other engines are re-executed and compared line by
/// line. `expected` guards against replaying a foreign trace.
pub fn replay(text: &str, expected: Option<Engine>) -> Result<RunReport> {
    let started = Instant::now();
    let mut lines = text.lines();
    let first = lines.next().unwrap_or("");
    let engine: Engine = first
        .strip_prefix(TRACE_HEADER)
        .and_then(|rest| rest.trim().strip_prefix("engine="))
        .ok_or_else(|| Error::CorruptTrace {
            line: 1,
            message: format!("expected `{TRACE_HEADER} engine=<name>`"),
        })?
        .parse()
        .map_err(|_| Error::CorruptTrace {
            line: 1,
            message: "unknown engine".into(),
        })?;
    if let Some(exp) = expected {
        if exp != engine {
            return Err(Error::EngineMismatch {
                expected: exp.to_string(),
                found: engine.to_string(),
            });
        }
    }
    let all: Vec<&str> = text.lines().collect();
    let n_header = 1 + all[1..]
        .iter()
        .take_while(|l| l.starts_with(SCENARIO_PREFIX.trim_end()))
        .count();
    let scenario_text: String = all[1..n_header]
        .iter()
        .map(|l| {
            let body = l.strip_prefix(SCENARIO_PREFIX).unwrap_or("");
            format!("{body}\n")
        })
        .collect();
    let s = Scenario::parse(&scenario_text).map_err(|e| Error::CorruptTrace {
        line: 2,
        message: e.to_string(),
    })?;
    if s.engine != engine {
        return Err(Error::EngineMismatch {
            expected: engine.to_string(),
            found: s.engine.to_string(),
        });
    }
    let records = &all[n_header..];
    let first_line = n_header + 1;
    let h = s.horizon;
    let tag = |e: EngineTag| PriorityTrace::parse_lines(e, records.iter().copied(), first_line);
    let v = match engine {
        Engine::Sts => {
            let z = build_candidates(&s)?;
            let p = s.sts();
            let run = sts_from_trace(&tag(EngineTag::Sts)?, &z, p.colors, h)?;
            verify_sts(&run, &z, p.thin_window)?.to_verification()
        }
        Engine::Sads => {
            let z = build_candidates(&s)?;
            let p = s.sads();
            let opts = SadsOptions {
                strict: p.strict,
                status: p.status,
            };
            let run = sads_from_trace(&tag(EngineTag::Sads)?, h, opts)?;
            verify_sads(&run, &z).to_verification()
        }
        Engine::Sdnr => {
            let (tables, d, e) = build_sdnr(&s)?;
            let run = sdnr_from_trace(&tag(EngineTag::Sdnr)?, h)?;
            verify_sdnr(&run, &tables, &d, &e).to_verification()
        }
        Engine::EmWalk | Engine::Collapse | Engine::Cohesive => {
            if engine != Engine::EmWalk {
                let etag = if engine == Engine::Collapse {
                    EngineTag::Collapse
                } else {
                    EngineTag::Cohesive
                };
                tag(etag)?;
            }
            let (fresh, v) = execute(&s)?;
            for (i, want) in fresh.iter().enumerate() {
                match records.get(i) {
                    Some(got) if got == want => {}
                    Some(got) => {
                        return Err(Error::CorruptTrace {
                            line: first_line + i,
                            message: format!("expected {want:?}, found {got:?}"),
                        })
                    }
                    None => {
                        return Err(Error::CorruptTrace {
                            line: first_line + i,
                            message: format!("missing {want:?}"),
                        })
                    }
                }
            }
            if records.len() > fresh.len() {
                return Err(Error::CorruptTrace {
                    line: first_line + fresh.len(),
                    message: "unexpected trailing record".into(),
                });
            }
            v
        }
    };
    Ok(RunReport {
        name: s.name.clone(),
        engine,
        digest: s.digest(),
        horizon: h,
        seed: s.seed,
        verification: v,
        first_record_line: first_line,
        wall_time: started.elapsed(),
    })
}

pub fn replay_file(path: &Path, expected: Option<Engine>) -> Result<RunReport> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    replay(&text, expected)
}
