use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EngineTag {
    Sts,
    Sads,
    Sdnr,
    Collapse,
    Cohesive,
}

impl EngineTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EngineTag::Sts => "sts",
            EngineTag::Sads => "sads",
            EngineTag::Sdnr => "sdnr",
            EngineTag::Collapse => "collapse",
            EngineTag::Cohesive => "cohesive",
        }
    }
}

impl fmt::Display for EngineTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EngineTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sts" => EngineTag::Sts,
            "sads" => EngineTag::Sads,
            "sdnr" => EngineTag::Sdnr,
            "collapse" => EngineTag::Collapse,
            "cohesive" => EngineTag::Cohesive,
            other => return Err(Error::MalformedTrace(format!("unknown engine {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Activate,
    Satisfy,
    Claim,
    Restrain,
    Commit,
    Injure,
    Uflip,
    Assign,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Activate => "ACTIVATE",
            EventKind::Satisfy => "SATISFY",
            EventKind::Claim => "CLAIM",
            EventKind::Restrain => "RESTRAIN",
            EventKind::Commit => "COMMIT",
            EventKind::Injure => "INJURE",
            EventKind::Uflip => "UFLIP",
            EventKind::Assign => "ASSIGN",
        }
    }
}

impl FromStr for EventKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ACTIVATE" => EventKind::Activate,
            "SATISFY" => EventKind::Satisfy,
            "CLAIM" => EventKind::Claim,
            "RESTRAIN" => EventKind::Restrain,
            "COMMIT" => EventKind::Commit,
            "INJURE" => EventKind::Injure,
            "UFLIP" => EventKind::Uflip,
            "ASSIGN" => EventKind::Assign,
            other => return Err(Error::MalformedTrace(format!("unknown event {other:?}"))),
        })
    }
}

/// A payload value. Decimal text is always held as `Int`, so records
/// built in memory compare equal to their parsed form.
#[derive(Debug, Clone)]
pub enum TraceValue {
    Int(u64),
    Word(&'static str),
    Text(String),
}

impl TraceValue {
    fn canonical_int(s: &str) -> Option<u64> {
        let digits = !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
        if digits && (s == "0" || !s.starts_with('0')) {
            s.parse().ok()
        } else {
            None
        }
    }

    pub fn as_str(&self) -> Cow<'_, str> {
        match self {
            TraceValue::Int(n) => Cow::Owned(n.to_string()),
            TraceValue::Word(w) => Cow::Borrowed(w),
            TraceValue::Text(t) => Cow::Borrowed(t),
        }
    }
}

impl PartialEq for TraceValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (TraceValue::Int(a), TraceValue::Int(b)) => a == b,
            (TraceValue::Int(_), _) | (_, TraceValue::Int(_)) => false,
            (a, b) => a.as_str() == b.as_str(),
        }
    }
}

impl Eq for TraceValue {}

impl fmt::Display for TraceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceValue::Int(n) => write!(f, "{n}"),
            TraceValue::Word(w) => f.write_str(w),
            TraceValue::Text(t) => f.write_str(t),
        }
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl From<$t> for TraceValue {
            fn from(n: $t) -> Self {
                TraceValue::Int(n as u64)
            }
        }
    )*};
}
int_value!(u8, u32, u64, usize);

impl From<&'static str> for TraceValue {
    fn from(s: &'static str) -> Self {
        TraceValue::canonical_int(s).map_or(TraceValue::Word(s), TraceValue::Int)
    }
}

impl From<String> for TraceValue {
    fn from(s: String) -> Self {
        TraceValue::canonical_int(&s).map_or(TraceValue::Text(s), TraceValue::Int)
    }
}

/// One line `stage | engine | EVENT | k=v k=v ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub stage: usize,
    pub engine: EngineTag,
    pub kind: EventKind,
    pub payload: Vec<(Cow<'static, str>, TraceValue)>,
}

impl TraceRecord {
    fn value(&self, key: &str) -> Option<&TraceValue> {
        self.payload.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get(&self, key: &str) -> Option<Cow<'_, str>> {
        self.value(key).map(TraceValue::as_str)
    }

    pub fn get_usize(&self, key: &str) -> Result<usize> {
        match self.value(key) {
            Some(&TraceValue::Int(n)) => usize::try_from(n)
                .map_err(|_| Error::MalformedTrace(format!("`{key}` value {n} out of range"))),
            Some(v) => Err(Error::MalformedTrace(format!(
                "bad `{key}` value {:?}",
                v.as_str()
            ))),
            None => Err(Error::MalformedTrace(format!("missing `{key}` in {self}"))),
        }
    }

    pub fn get_u32(&self, key: &str) -> Result<u32> {
        Ok(self.get_usize(key)? as u32)
    }

    pub fn parse(line: &str) -> Result<Self> {
        let parts: Vec<&str> = line.splitn(4, '|').map(str::trim).collect();
        let [stage, engine, kind, payload] = parts[..] else {
            return Err(Error::MalformedTrace(format!(
                "expected 4 fields in {line:?}"
            )));
        };
        let stage = stage
            .parse()
            .map_err(|_| Error::MalformedTrace(format!("bad stage {stage:?}")))?;
        let payload = payload
            .split_whitespace()
            .map(|kv| {
                kv.split_once('=')
                    .map(|(k, v)| (Cow::Owned(k.to_string()), TraceValue::from(v.to_string())))
                    .ok_or_else(|| Error::MalformedTrace(format!("bad payload item {kv:?}")))
            })
            .collect::<Result<_>>()?;
        Ok(TraceRecord {
            stage,
            engine: engine.parse()?,
            kind: kind.parse()?,
            payload,
        })
    }
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} | {} | {} |",
            self.stage,
            self.engine,
            self.kind.as_str()
        )?;
        for (k, v) in &self.payload {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// Append-only stage log of one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PriorityTrace {
    pub engine: EngineTag,
    pub records: Vec<TraceRecord>,
}

impl PriorityTrace {
    pub fn new(engine: EngineTag) -> Self {
        PriorityTrace {
            engine,
            records: Vec::new(),
        }
    }

    /// Appends a record and returns its index.
    pub fn push<I, K, V>(&mut self, stage: usize, kind: EventKind, payload: I) -> usize
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<Cow<'static, str>>,
        V: Into<TraceValue>,
    {
        self.records.push(TraceRecord {
            stage,
            engine: self.engine,
            kind,
            payload: payload
                .into_iter()
                .map(|(k, v)| (k.into(), v.into()))
                .collect(),
        });
        self.records.len() - 1
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn of_kind(&self, kind: EventKind) -> impl Iterator<Item = (usize, &TraceRecord)> {
        self.records
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.kind == kind)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&r.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses record lines; `first_line` is the file line number of the
    /// first record, used in diagnostics.
    pub fn parse_lines<'a>(
        expected: EngineTag,
        lines: impl IntoIterator<Item = &'a str>,
        first_line: usize,
    ) -> Result<Self> {
        let mut trace = PriorityTrace::new(expected);
        for (i, line) in lines.into_iter().enumerate() {
            let rec = TraceRecord::parse(line).map_err(|e| Error::CorruptTrace {
                line: first_line + i,
                message: e.to_string(),
            })?;
            if rec.engine != expected {
                return Err(Error::EngineMismatch {
                    expected: expected.to_string(),
                    found: rec.engine.to_string(),
                });
            }
            trace.records.push(rec);
        }
        Ok(trace)
    }

    /// Fails with the first stage in `0..horizon` that has no record.
    pub fn check_complete(&self, horizon: usize) -> Result<()> {
        let mut seen = vec![false; horizon];
        for r in &self.records {
            if r.stage < horizon {
                seen[r.stage] = true;
            }
        }
        match seen.iter().position(|&s| !s) {
            Some(stage) => Err(Error::TruncatedTrace(stage)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let mut t = PriorityTrace::new(EngineTag::Sts);
        t.push(3, EventKind::Satisfy, [("req", "0,1"), ("a", "7")]);
        t.push(4, EventKind::Assign, [("value", 0usize)]);
        let text = t.render();
        assert_eq!(
            text,
            "3 | sts | SATISFY | req=0,1 a=7\n4 | sts | ASSIGN | value=0\n"
        );
        let back = PriorityTrace::parse_lines(EngineTag::Sts, text.lines(), 1).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn engine_mismatch_and_corruption() {
        let err = PriorityTrace::parse_lines(EngineTag::Sads, ["0 | sts | ASSIGN | value=0"], 1);
        assert!(matches!(err, Err(Error::EngineMismatch { .. })));
        let err = PriorityTrace::parse_lines(EngineTag::Sts, ["0 | sts | ASSIGN", "x"], 5);
        assert!(matches!(err, Err(Error::CorruptTrace { line: 5, .. })));
    }

    #[test]
    fn completeness() {
        let mut t = PriorityTrace::new(EngineTag::Sts);
        t.push(0, EventKind::Assign, [("value", 0usize)]);
        t.push(2, EventKind::Assign, [("value", 0usize)]);
        assert_eq!(t.check_complete(3), Err(Error::TruncatedTrace(1)));
    }
}
