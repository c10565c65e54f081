//! Problem builders for the standard experiments, initial guesses, solution
//! classification and parameter sweeps.

mod builders;
mod classify;
mod initial;
mod spec;
mod sweep;

pub use builders::{
    builder_names, example1, example2, example3, named, singular, stirrer, two_component_semitrivial,
    StirrerLayout,
};
pub use classify::{
    classify_solution, symmetry_defect, Classification, ComponentClass, SolutionClass,
    SymmetryDefect, DEFAULT_TRIVIAL_THRESHOLD,
};
pub use initial::{gaussian_initial, randomized_initial};
pub use spec::{GridSpec, InitialGuess, PotentialSpec, ScenarioSpec};
pub use sweep::{solve_scenario, sweep, ScenarioOutcome, SweepRow, SweepSummary};
