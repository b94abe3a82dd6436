//! Scenario files, seeded generators, trace persistence and replay.
//!
//! A scenario names an engine, a horizon and a seed; the seed fixes every
//! generated input. A run writes a trace file that embeds the scenario, so
//! [`replay`] can rebuild the report from the file alone.

pub mod gen;
mod run;
mod scenario;

pub use run::{
    build_candidates, build_collapse, build_family, build_sdnr, build_tournaments, render_table,
    replay, replay_file, run, run_all, run_to_dir, Persisted, RunOutput, RunReport, WalkTournament,
    REPORT_HEADER, SCENARIO_PREFIX, TRACE_HEADER,
};
pub use scenario::{
    load_scenario, save_scenario, CandidateKind, CandidateParams, CohesiveParams, CollapseParams,
    EmWalkParams, Engine, FamilySource, InlineCandidate, InlineEntry, SadsParams, Scenario,
    SdnrInline, SdnrParams, StsParams, SCENARIO_HEADER,
};
