use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::{Error, Result};

/// One value change: from `stage` on, `point` has `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub point: usize,
    pub stage: usize,
    pub value: u32,
}

/// Limit value of a point and the stage of its last change (0 if none).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LimitReport {
    pub value: u32,
    pub settled_at: usize,
}

/// Stage-indexed function on points with value 0 before any event.
///
/// Events per point are strictly increasing in stage and each one changes
/// the value, so the declared events are exactly the discontinuities.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Delta2Approx {
    horizon: usize,
    events: BTreeMap<usize, Vec<(usize, u32)>>,
}

impl Delta2Approx {
    pub fn new(horizon: usize, events: impl IntoIterator<Item = Event>) -> Result<Self> {
        let mut by_point: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
        for e in events {
            if e.stage >= horizon {
                return Err(Error::StageOutOfRange {
                    stage: e.stage,
                    horizon,
                });
            }
            by_point
                .entry(e.point)
                .or_default()
                .push((e.stage, e.value));
        }
        for (&point, evs) in by_point.iter_mut() {
            evs.sort_by_key(|&(s, _)| s);
            let mut prev = 0u32;
            for (i, &(stage, value)) in evs.iter().enumerate() {
                if i > 0 && evs[i - 1].0 == stage {
                    return Err(Error::MalformedApprox(format!(
                        "point {point} has two events at stage {stage}"
                    )));
                }
                if value == prev {
                    return Err(Error::MalformedApprox(format!(
                        "event ({point},{stage},{value}) does not change the value"
                    )));
                }
                prev = value;
            }
        }
        Ok(Delta2Approx {
            horizon,
            events: by_point,
        })
    }

    /// The constant-zero approximation.
    pub fn zero(horizon: usize) -> Self {
        Delta2Approx {
            horizon,
            events: BTreeMap::new(),
        }
    }

    /// A static 0/1 membership function: every member has one event at stage 0.
    pub fn from_static_set(horizon: usize, members: &[usize]) -> Self {
        let events = members.iter().map(|&point| Event {
            point,
            stage: 0,
            value: 1,
        });
        Self::new(horizon.max(1), events).expect("static set events are well formed")
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Fails if some point has more than `budget` events.
    pub fn check_flip_budget(&self, budget: usize) -> Result<()> {
        for (&point, evs) in &self.events {
            if evs.len() > budget {
                return Err(Error::FlipBudget {
                    point,
                    flips: evs.len(),
                    budget,
                });
            }
        }
        Ok(())
    }

    pub fn flips(&self, x: usize) -> usize {
        self.events.get(&x).map_or(0, Vec::len)
    }

    /// Points carrying at least one event, ascending.
    pub fn points(&self) -> impl Iterator<Item = usize> + '_ {
        self.events.keys().copied()
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.events.iter().flat_map(|(&point, evs)| {
            evs.iter().map(move |&(stage, value)| Event {
                point,
                stage,
                value,
            })
        })
    }

    /// Events of point `x` as `(stage, value)`, ascending in stage.
    pub fn events_of(&self, x: usize) -> &[(usize, u32)] {
        self.events.get(&x).map_or(&[], Vec::as_slice)
    }

    pub fn max_value(&self) -> u32 {
        self.events().map(|e| e.value).max().unwrap_or(0)
    }

    pub fn value_at(&self, x: usize, s: usize) -> Result<u32> {
        if s >= self.horizon {
            return Err(Error::StageOutOfRange {
                stage: s,
                horizon: self.horizon,
            });
        }
        Ok(self.value_clamped(x, s))
    }

    /// Value at `min(s, horizon - 1)`.
    pub fn value_clamped(&self, x: usize, s: usize) -> u32 {
        let Some(evs) = self.events.get(&x) else {
            return 0;
        };
        let idx = evs.partition_point(|&(st, _)| st <= s);
        if idx == 0 {
            0
        } else {
            evs[idx - 1].1
        }
    }

    pub fn limit_report(&self, x: usize) -> LimitReport {
        match self.events.get(&x).and_then(|e| e.last()) {
            Some(&(stage, value)) => LimitReport {
                value,
                settled_at: stage,
            },
            None => LimitReport {
                value: 0,
                settled_at: 0,
            },
        }
    }

    pub fn limit(&self, x: usize) -> u32 {
        self.limit_report(x).value
    }

    /// Text form: `approx H` then `point stage value` per event.
    pub fn to_text(&self) -> String {
        let mut s = format!("approx {}\n", self.horizon);
        for e in self.events() {
            let _ = writeln!(s, "{} {} {}", e.point, e.stage, e.value);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty approximation text".into()))?;
        let horizon = header
            .strip_prefix("approx ")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad approximation header {header:?}")))?;
        let mut events = Vec::new();
        for (ln, line) in lines {
            let nums =
                parse_nums(line).map_err(|m| Error::Parse(format!("line {}: {m}", ln + 1)))?;
            let [point, stage, value] = nums[..] else {
                return Err(Error::Parse(format!(
                    "line {}: expected `point stage value`",
                    ln + 1
                )));
            };
            events.push(Event {
                point,
                stage,
                value: value as u32,
            });
        }
        Self::new(horizon, events)
    }
}

pub(crate) fn parse_nums(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|e| format!("{w:?}: {e}")))
        .collect()
}

/// Layers `g(., ., t)` of a double-limit approximation; layer `t` is an
/// ordinary [`Delta2Approx`] in the inner stage `s`. Beyond the last layer
/// the outer index has settled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleLimitApprox {
    layers: Vec<Delta2Approx>,
}

impl DoubleLimitApprox {
    pub fn new(layers: Vec<Delta2Approx>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::MalformedApprox("double limit needs a layer".into()));
        }
        Ok(DoubleLimitApprox { layers })
    }

    fn layer(&self, t: usize) -> &Delta2Approx {
        &self.layers[t.min(self.layers.len() - 1)]
    }

    pub fn value_at(&self, m: usize, s: usize, t: usize) -> Result<u32> {
        self.layer(t).value_at(m, s)
    }

    /// `lim_s g(m, s, t)`.
    pub fn inner_limit(&self, m: usize, t: usize) -> u32 {
        self.layer(t).limit(m)
    }

    /// `lim_t lim_s g(m, s, t)`, with the outer settling index.
    pub fn double_limit(&self, m: usize) -> LimitReport {
        let value = self.inner_limit(m, self.layers.len() - 1);
        let settled_at = (0..self.layers.len())
            .rev()
            .find(|&t| self.inner_limit(m, t) != value)
            .map_or(0, |t| t + 1);
        LimitReport { value, settled_at }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(point: usize, stage: usize, value: u32) -> Event {
        Event {
            point,
            stage,
            value,
        }
    }

    #[test]
    fn no_events_is_zero() {
        let a = Delta2Approx::zero(10);
        assert_eq!(a.value_at(3, 9).unwrap(), 0);
        assert_eq!(
            a.limit_report(3),
            LimitReport {
                value: 0,
                settled_at: 0
            }
        );
    }

    #[test]
    fn single_event() {
        let a = Delta2Approx::new(10, [ev(0, 5, 7)]).unwrap();
        assert_eq!(a.value_at(0, 4).unwrap(), 0);
        assert_eq!(a.value_at(0, 5).unwrap(), 7);
        assert_eq!(
            a.limit_report(0),
            LimitReport {
                value: 7,
                settled_at: 5
            }
        );
        assert_eq!(
            a.value_at(0, 10),
            Err(Error::StageOutOfRange {
                stage: 10,
                horizon: 10
            })
        );
    }

    #[test]
    fn malformed_events_rejected() {
        assert!(Delta2Approx::new(10, [ev(0, 10, 1)]).is_err());
        assert!(Delta2Approx::new(10, [ev(0, 2, 1), ev(0, 2, 0)]).is_err());
        assert!(Delta2Approx::new(10, [ev(0, 2, 1), ev(0, 4, 1)]).is_err());
        assert!(Delta2Approx::new(10, [ev(0, 2, 0)]).is_err());
    }

    #[test]
    fn budget() {
        let a = Delta2Approx::new(10, [ev(1, 1, 1), ev(1, 2, 0), ev(1, 3, 1)]).unwrap();
        assert!(a.check_flip_budget(3).is_ok());
        assert_eq!(
            a.check_flip_budget(2),
            Err(Error::FlipBudget {
                point: 1,
                flips: 3,
                budget: 2
            })
        );
    }

    #[test]
    fn text_round_trip() {
        let a = Delta2Approx::new(20, [ev(1, 1, 1), ev(1, 2, 0), ev(4, 19, 3)]).unwrap();
        assert_eq!(Delta2Approx::from_text(&a.to_text()).unwrap(), a);
        assert!(Delta2Approx::from_text("approx 5\n1 2\n").is_err());
    }

    #[test]
    fn double_limit_uses_last_layer() {
        let l0 = Delta2Approx::new(8, [ev(0, 3, 1)]).unwrap();
        let l1 = Delta2Approx::new(8, [ev(0, 2, 1), ev(0, 5, 0)]).unwrap();
        let d = DoubleLimitApprox::new(vec![l0, l1.clone(), l1]).unwrap();
        assert_eq!(d.inner_limit(0, 0), 1);
        assert_eq!(d.inner_limit(0, 7), 0);
        assert_eq!(
            d.double_limit(0),
            LimitReport {
                value: 0,
                settled_at: 1
            }
        );
        assert_eq!(d.value_at(0, 4, 1).unwrap(), 1);
    }
}
