//! The holomorphic flow s′ = λL(s) and the zeros that organise it.

pub mod integrator;
pub mod zeros;

pub use integrator::{
    integrate_flow, integrate_flow_sampled, newton_zero, pole_distance, FlowConfig, Termination,
    Trajectory, ESCAPE_NORM,
};
pub use zeros::{
    classify_zero, count_zeros_argument_principle, find_critical_zeros,
    find_critical_zeros_between, first_critical_sink, sink_proportion, sink_proportion_csv,
    SkippedSeed, ZeroKind, ZeroRecord, ZeroScan, MAX_SCAN_HEIGHT, MAX_WINDOW_HEIGHT,
};
