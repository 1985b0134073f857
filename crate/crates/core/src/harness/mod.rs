//! Experiment harness: protocol loop, regret accounting, sweeps and the
//! invariant suites.

mod run;
mod sweep;
mod verify;

pub use run::{
    best_fixed_action, doubling_bound, doubling_bound_constant, fixed_alpha_bound, lower_bound_reference,
    mean_and_stderr, regret_from_records, run, run_seed, run_seed_jsonl, write_summaries_csv, RegretSummary,
    RoundRecord, RunConfig, SeedRun,
};
pub use sweep::{clique_sizes, sweep, write_sweep_csv, SweepGrid, SweepRow};
pub use verify::{
    random_simplex_point, random_strongly_observable_graph, self_looped_graphs, verify, CheckKind, CheckOutcome,
    Suite, VerifyBudget, VerifyReport,
};
