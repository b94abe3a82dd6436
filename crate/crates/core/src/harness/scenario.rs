use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::limit::{Delta2Approx, Event};
use crate::priority::sads::StatusMode;
use crate::reductions::KBoundedColoring;
use crate::structures::Tournament;
use crate::{Error, Result};

/// First line of every scenario file.
pub const SCENARIO_HEADER: &str = "# finjury-scenario v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    Sts,
    Sads,
    Sdnr,
    EmWalk,
    Collapse,
    Cohesive,
}

impl Engine {
    pub fn as_str(self) -> &'static str {
        match self {
            Engine::Sts => "sts",
            Engine::Sads => "sads",
            Engine::Sdnr => "sdnr",
            Engine::EmWalk => "em-walk",
            Engine::Collapse => "collapse",
            Engine::Cohesive => "cohesive",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sts" => Engine::Sts,
            "sads" => Engine::Sads,
            "sdnr" => Engine::Sdnr,
            "em-walk" => Engine::EmWalk,
            "collapse" => Engine::Collapse,
            "cohesive" => Engine::Cohesive,
            other => {
                return Err(Error::Scenario {
                    location: "engine".into(),
                    message: format!("unknown engine {other:?}"),
                })
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateKind {
    /// Static sets meeting every window of length `window`.
    #[default]
    Windowed,
    /// Approximations with at most `flips` changes per point.
    Approx,
    /// Static and approximated sets of assorted densities, alternating.
    Mixed,
}

/// One inline candidate: either `members` or `events` as
/// `[point, stage, value]`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineCandidate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<[usize; 3]>>,
}

fn default_window() -> usize {
    64
}

fn default_flips() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CandidateParams {
    #[serde(default)]
    pub count: usize,
    #[serde(default)]
    pub kind: CandidateKind,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default = "default_flips")]
    pub flips: usize,
    #[serde(default = "default_density")]
    pub density: f64,
    /// Used instead of generated candidates when non-empty.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inline: Vec<InlineCandidate>,
}

fn default_density() -> f64 {
    0.3
}

impl Default for CandidateParams {
    fn default() -> Self {
        CandidateParams {
            count: 0,
            kind: CandidateKind::default(),
            window: default_window(),
            flips: default_flips(),
            density: default_density(),
            inline: Vec::new(),
        }
    }
}

fn default_colors() -> u32 {
    2
}

fn default_thin_window() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StsParams {
    #[serde(default = "default_colors")]
    pub colors: u32,
    /// Prefix of the stage set searched for thin-transfer counterexamples.
    #[serde(default = "default_thin_window")]
    pub thin_window: usize,
}

impl Default for StsParams {
    fn default() -> Self {
        StsParams {
            colors: default_colors(),
            thin_window: default_thin_window(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SadsParams {
    #[serde(default)]
    pub status: StatusMode,
    /// Requirement `R_i` may only claim decision-makers above `i`.
    #[serde(default)]
    pub strict: bool,
}

/// Table entry with the oracle prefix written as a bit string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineEntry {
    pub input: usize,
    pub prefix: String,
    pub value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdnrInline {
    pub tables: Vec<Vec<InlineEntry>>,
    /// Oracle approximation events `[point, stage, value]`.
    #[serde(default)]
    pub oracle: Vec<[usize; 3]>,
    /// Enumeration entries `[point, stage]`.
    #[serde(default)]
    pub enumeration: Vec<[usize; 2]>,
}

fn default_functionals() -> usize {
    4
}

fn default_live() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdnrParams {
    #[serde(default = "default_functionals")]
    pub functionals: usize,
    #[serde(default = "default_live")]
    pub live_bits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<SdnrInline>,
}

impl Default for SdnrParams {
    fn default() -> Self {
        SdnrParams {
            functionals: default_functionals(),
            live_bits: default_live(),
            inline: None,
        }
    }
}

fn default_tournaments() -> usize {
    2
}

fn default_target() -> usize {
    16
}

fn default_chunk() -> usize {
    64
}

fn default_cap() -> usize {
    crate::structures::DEFAULT_SEARCH_CAP
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmWalkParams {
    #[serde(default = "default_tournaments")]
    pub tournaments: usize,
    /// Registration step per tournament; defaults to all at step 0.
    #[serde(default)]
    pub arrivals: Vec<usize>,
    #[serde(default = "default_target")]
    pub target: usize,
    #[serde(default = "default_chunk")]
    pub chunk: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
    /// Tournament files, relative to the scenario; read into `inline` on
    /// load.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
    /// Tournaments in text form; replace the generated ones when present.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inline: Vec<String>,
}

impl Default for EmWalkParams {
    fn default() -> Self {
        EmWalkParams {
            tournaments: default_tournaments(),
            arrivals: Vec::new(),
            target: default_target(),
            chunk: default_chunk(),
            cap: default_cap(),
            files: Vec::new(),
            inline: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollapseParams {
    /// Tail length override; defaults to a quarter of `Z`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<usize>,
    /// Coloring file (`bounded 3 H k` text), read into `inline` on load.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<String>,
    /// Defaults to `[0, H)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySource {
    #[default]
    Random,
    /// Stages at which random tables output 1 on their own index.
    Canonical,
}

fn default_members() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CohesiveParams {
    #[serde(default = "default_members")]
    pub members: usize,
    #[serde(default)]
    pub source: FamilySource,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inline: Vec<Vec<usize>>,
}

impl Default for CohesiveParams {
    fn default() -> Self {
        CohesiveParams {
            members: default_members(),
            source: FamilySource::default(),
            inline: Vec::new(),
        }
    }
}

/// A run request: engine, horizon, seed, and the engine's parameter table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub engine: Engine,
    pub horizon: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<CandidateParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sts: Option<StsParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sads: Option<SadsParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sdnr: Option<SdnrParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub em_walk: Option<EmWalkParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse: Option<CollapseParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohesive: Option<CohesiveParams>,
}

fn scenario_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Scenario {
        location: location.into(),
        message: message.into(),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl Scenario {
    /// A scenario with default parameters for `engine`.
    pub fn new(engine: Engine, horizon: usize, seed: u64) -> Self {
        Scenario {
            name: engine.as_str().into(),
            engine,
            horizon,
            seed,
            candidates: None,
            sts: None,
            sads: None,
            sdnr: None,
            em_walk: None,
            collapse: None,
            cohesive: None,
        }
    }

    /// Parses scenario text; the header line is required.
    pub fn parse(text: &str) -> Result<Self> {
        let first = text.lines().next().unwrap_or("");
        if first.trim_end() != SCENARIO_HEADER {
            return Err(scenario_err(
                "line 1",
                format!("expected header {SCENARIO_HEADER:?}"),
            ));
        }
        let s: Scenario = toml::from_str(text).map_err(|e| {
            let loc = e
                .span()
                .map(|sp| format!("line {}", line_of(text, sp.start)))
                .unwrap_or_else(|| "scenario".into());
            scenario_err(loc, e.message().to_string())
        })?;
        s.validate()?;
        Ok(s)
    }

    /// Canonical text: header plus the serialized tables.
    pub fn to_text(&self) -> String {
        let body = toml::to_string(self).expect("scenario serializes");
        format!("{SCENARIO_HEADER}\n{body}")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    pub fn candidates(&self) -> CandidateParams {
        self.candidates.clone().unwrap_or_default()
    }

    pub fn sts(&self) -> StsParams {
        self.sts.clone().unwrap_or_default()
    }

    pub fn sads(&self) -> SadsParams {
        self.sads.unwrap_or_default()
    }

    pub fn sdnr(&self) -> SdnrParams {
        self.sdnr.clone().unwrap_or_default()
    }

    pub fn em_walk(&self) -> EmWalkParams {
        self.em_walk.clone().unwrap_or_default()
    }

    pub fn collapse(&self) -> CollapseParams {
        self.collapse.clone().unwrap_or_default()
    }

    pub fn cohesive(&self) -> CohesiveParams {
        self.cohesive.clone().unwrap_or_default()
    }

    /// Checks bounds and the invariants of inline inputs.
    pub fn validate(&self) -> Result<()> {
        let h = self.horizon;
        if h == 0 {
            return Err(scenario_err("horizon", "must be positive"));
        }
        let cand = self.candidates();
        for (i, c) in cand.inline.iter().enumerate() {
            let loc = format!("candidates.inline[{i}]");
            match (&c.members, &c.events) {
                (Some(m), None) => {
                    if let Some(&x) = m.iter().find(|&&x| x >= h) {
                        return Err(scenario_err(loc, format!("member {x} outside horizon")));
                    }
                }
                (None, Some(ev)) => {
                    let a =
                        approx_from_events(h, ev).map_err(|e| scenario_err(&loc, e.to_string()))?;
                    a.check_flip_budget(cand.flips)
                        .map_err(|e| scenario_err(&loc, e.to_string()))?;
                }
                _ => {
                    return Err(scenario_err(
                        loc,
                        "give exactly one of `members` or `events`",
                    ))
                }
            }
        }
        if self.engine == Engine::Sts && self.sts().colors == 0 {
            return Err(scenario_err("sts.colors", "must be positive"));
        }
        if let Some(inl) = &self.sdnr().inline {
            for (e, t) in inl.tables.iter().enumerate() {
                for (j, entry) in t.iter().enumerate() {
                    if entry.prefix.bytes().any(|b| b != b'0' && b != b'1') {
                        return Err(scenario_err(
                            format!("sdnr.inline.tables[{e}][{j}].prefix"),
                            "expected a bit string",
                        ));
                    }
                }
            }
            approx_from_events(h, &inl.oracle)
                .map_err(|e| scenario_err("sdnr.inline.oracle", e.to_string()))?;
        }
        let walk = self.em_walk();
        for (i, t) in walk.inline.iter().enumerate() {
            let t = Tournament::from_text(t)
                .map_err(|e| scenario_err(format!("em_walk.inline[{i}]"), e.to_string()))?;
            t.validate()
                .map_err(|e| scenario_err(format!("em_walk.inline[{i}]"), e.to_string()))?;
            if t.len() < h {
                return Err(scenario_err(
                    format!("em_walk.inline[{i}]"),
                    format!("{} vertices, horizon {h}", t.len()),
                ));
            }
        }
        if walk.arrivals.windows(2).any(|w| w[0] > w[1]) {
            return Err(scenario_err("em_walk.arrivals", "must be nondecreasing"));
        }
        let col = self.collapse();
        if let Some(text) = &col.inline {
            let f = KBoundedColoring::from_text(text)
                .map_err(|e| scenario_err("collapse.inline", e.to_string()))?;
            if f.horizon() != h {
                return Err(scenario_err(
                    "collapse.inline",
                    format!("horizon {} != {h}", f.horizon()),
                ));
            }
        }
        if let Some(z) = &col.z {
            if let Some(&x) = z.iter().find(|&&x| x >= h) {
                return Err(scenario_err(
                    "collapse.z",
                    format!("point {x} outside horizon"),
                ));
            }
        }
        if let Some(m) = self.cohesive().inline.iter().flatten().find(|&&x| x >= h) {
            return Err(scenario_err(
                "cohesive.inline",
                format!("point {m} outside horizon"),
            ));
        }
        Ok(())
    }

    /// Replaces file references with their contents, relative to `base`.
    pub fn resolve_files(&mut self, base: &Path) -> Result<()> {
        let read = |name: &str, loc: &str| -> Result<String> {
            let p = base.join(name);
            std::fs::read_to_string(&p)
                .map_err(|e| scenario_err(loc, format!("{}: {e}", p.display())))
        };
        if let Some(w) = &mut self.em_walk {
            for f in std::mem::take(&mut w.files) {
                w.inline.push(read(&f, "em_walk.files")?);
            }
        }
        if let Some(c) = &mut self.collapse {
            if let Some(f) = c.file.take() {
                c.inline = Some(read(&f, "collapse.file")?);
            }
        }
        Ok(())
    }
}

pub(crate) fn approx_from_events(h: usize, ev: &[[usize; 3]]) -> Result<Delta2Approx> {
    Delta2Approx::new(
        h,
        ev.iter().map(|&[point, stage, value]| Event {
            point,
            stage,
            value: value as u32,
        }),
    )
}

/// Reads, resolves file references and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut s = Scenario::parse(&text).map_err(|e| match e {
        Error::Scenario { location, message } => Error::Scenario {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })?;
    if s.name.is_empty() {
        s.name = path
            .file_stem()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    s.resolve_files(path.parent().unwrap_or(Path::new(".")))?;
    s.validate()?;
    Ok(s)
}

/// Writes the canonical text.
pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, s.to_text()).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
