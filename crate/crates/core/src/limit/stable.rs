use super::approx::{Delta2Approx, Event};
use crate::structures::FiniteColoring2;
use crate::Result;

/// `h(x, s) = c_s(x)` for `x < s < H`.
///
/// The column of `x` starts at stage `x + 1`, so events of `c` at stages
/// `<= x` are folded into the first column entry.
pub fn to_stable_pairs(c: &Delta2Approx) -> Result<FiniteColoring2> {
    let palette = c.max_value() + 1;
    FiniteColoring2::from_fn(c.horizon(), palette, |x, s| c.value_clamped(x, s))
}

/// Points whose column is not constant on the tail window.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StabilityReport {
    pub window_start: usize,
    pub unstable: Vec<usize>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.unstable.is_empty()
    }
}

/// Reads each column `s -> h(x, s)` back into an approximation: an event
/// at every stage `s > x` where the column changes (starting from 0), and
/// reports the points not constant on `[H - tail, H)`.
pub fn from_stable_pairs(h: &FiniteColoring2, tail: usize) -> (Delta2Approx, StabilityReport) {
    let horizon = h.horizon();
    let window_start = horizon.saturating_sub(tail);
    let mut events = Vec::new();
    let mut unstable = Vec::new();
    for x in 0..horizon.saturating_sub(1) {
        let mut prev = 0u32;
        for s in x + 1..horizon {
            let v = h.color(x, s);
            if v != prev {
                events.push(Event {
                    point: x,
                    stage: s,
                    value: v,
                });
                prev = v;
            }
        }
        let lo = window_start.max(x + 1);
        if lo < horizon {
            let v = h.color(x, lo);
            if (lo + 1..horizon).any(|s| h.color(x, s) != v) {
                unstable.push(x);
            }
        }
    }
    let approx = Delta2Approx::new(horizon, events).expect("column events are well formed");
    (
        approx,
        StabilityReport {
            window_start,
            unstable,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::LimitReport;

    #[test]
    fn constant_columns() {
        let c = Delta2Approx::new(
            12,
            [Event {
                point: 2,
                stage: 0,
                value: 3,
            }],
        )
        .unwrap();
        let h = to_stable_pairs(&c).unwrap();
        assert!((3..12).all(|s| h.color(2, s) == 3));
        assert!((1..12).all(|s| h.color(0, s) == 0));
    }

    #[test]
    fn one_flip_column_constant_after() {
        let c = Delta2Approx::new(
            20,
            [Event {
                point: 1,
                stage: 6,
                value: 1,
            }],
        )
        .unwrap();
        let h = to_stable_pairs(&c).unwrap();
        assert!((2..6).all(|s| h.color(1, s) == 0));
        assert!((6..20).all(|s| h.color(1, s) == 1));
        let (back, rep) = from_stable_pairs(&h, 5);
        assert!(rep.is_stable());
        assert_eq!(
            back.limit_report(1),
            LimitReport {
                value: 1,
                settled_at: 6
            }
        );
    }

    #[test]
    fn parity_is_unstable() {
        let h = FiniteColoring2::from_fn(16, 2, |_, s| (s % 2) as u32).unwrap();
        let (_, rep) = from_stable_pairs(&h, 6);
        assert_eq!(rep.unstable, (0..14).collect::<Vec<_>>());
    }

    #[test]
    fn constant_h_recovers_stage_zero() {
        let h = FiniteColoring2::from_fn(10, 1, |_, _| 0).unwrap();
        let (back, rep) = from_stable_pairs(&h, 3);
        assert!(rep.is_stable());
        for x in 0..10 {
            assert_eq!(
                back.limit_report(x),
                LimitReport {
                    value: 0,
                    settled_at: 0
                }
            );
        }
    }
}
