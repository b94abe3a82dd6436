use super::block::block_extend;
use super::condition::{register_tournament, EMCondition};
use super::rho_string;
use crate::structures::{three_cycle_in, Beats, DEFAULT_SEARCH_CAP};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkConfig {
    pub horizon: usize,
    /// Step at which each tournament is registered; nondecreasing.
    pub arrivals: Vec<usize>,
    pub target: usize,
    /// Largest block tried per step.
    pub chunk: usize,
    /// Exact transitive search up to this class size, greedy above.
    pub cap: usize,
}

impl WalkConfig {
    pub fn new(horizon: usize, arrivals: Vec<usize>, target: usize) -> Self {
        WalkConfig {
            horizon,
            arrivals,
            target,
            chunk: 64,
            cap: DEFAULT_SEARCH_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkOutcome {
    pub g: Vec<usize>,
    pub sigma: Vec<usize>,
    pub trace: Vec<String>,
    pub reached_target: bool,
    pub diagnostic: Option<String>,
}

fn line(step: usize, op: &str, c: &EMCondition, rho: &str) -> String {
    let sigma: Vec<String> = c.sigma.iter().map(usize::to_string).collect();
    format!(
        "{step} | {op} | [{}] | {} | {} | {rho}",
        sigma.join(","),
        c.core.len(),
        c.reservoir.len()
    )
}

/// Least reservoir size a step may leave: one-point pigeonhole over `2^k`
/// behaviour classes.
fn keep_bound(x: usize, k: usize) -> usize {
    let rest = x.saturating_sub(1) as u128;
    if k >= 64 {
        return usize::from(rest > 0);
    }
    rest.div_ceil(1u128 << k) as usize
}

/// Registers tournaments at their arrival steps and extends by blocks until
/// `|F|` reaches the target or the reservoir runs out.
pub fn em_walk<B: Beats + Sync>(ts: &[B], cfg: &WalkConfig) -> Result<WalkOutcome> {
    if cfg.arrivals.len() > ts.len() {
        return Err(Error::TooFewTournaments(cfg.arrivals.len(), ts.len()));
    }
    if cfg.arrivals.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidCondition(
            "arrival steps must be nondecreasing".into(),
        ));
    }
    if let Some(t) = ts.iter().find(|t| t.order() < cfg.horizon) {
        return Err(Error::VertexOutOfRange {
            vertex: cfg.horizon - 1,
            size: t.order(),
        });
    }
    let mut c = EMCondition::fresh(cfg.horizon);
    let mut trace = Vec::new();
    let mut step = 0;
    loop {
        while c.sigma.len() < cfg.arrivals.len() && cfg.arrivals[c.sigma.len()] <= step {
            if c.reservoir.is_empty() {
                break;
            }
            c = register_tournament(&c, ts)?;
            trace.push(line(step, "register", &c, "-"));
        }
        if c.core.len() >= cfg.target || c.reservoir.is_empty() {
            break;
        }
        let k = c.sigma.len();
        if c.reservoir.len() == 1 {
            let x = c.reservoir[0];
            c = EMCondition::new(c.sigma.clone(), [c.core.clone(), vec![x]].concat(), vec![])?;
            trace.push(line(step, "last", &c, "-"));
            step += 1;
            continue;
        }
        let need = keep_bound(c.reservoir.len(), k);
        let mut m = cfg.chunk.clamp(1, c.reservoir.len() - 1);
        let split = loop {
            let split = block_extend(&c, ts, &c.reservoir[..m])?;
            if split.reservoir.len() >= need || m == 1 {
                break split;
            }
            m /= 2;
        };
        let (rho, chain) = split.best_chain(ts, cfg.cap)?;
        c = split.extend(ts, rho, &chain)?;
        trace.push(line(step, &format!("block m={m}"), &c, &rho_string(rho, k)));
        step += 1;
    }
    let reached_target = c.core.len() >= cfg.target;
    let diagnostic = (!reached_target).then(|| {
        format!(
            "reservoir exhausted after {step} steps with |F| = {} < target {}",
            c.core.len(),
            cfg.target
        )
    });
    Ok(WalkOutcome {
        g: c.core,
        sigma: c.sigma,
        trace,
        reached_target,
        diagnostic,
    })
}

/// Brute-force recheck: for each registered `ν`, a 3-cycle of `T_ν` inside
/// `G \ [0, σ(ν)]`, if any.
pub fn verify_walk<B: Beats>(ts: &[B], out: &WalkOutcome) -> Vec<Option<[usize; 3]>> {
    out.sigma
        .iter()
        .zip(ts)
        .map(|(&cut, t)| {
            let tail: Vec<usize> = out.g.iter().copied().filter(|&x| x > cut).collect();
            three_cycle_in(t, &tail)
        })
        .collect()
}
