//! Timed inhibitor/reset Petri nets for DRAM command protocols.
//!
//! A [`ProtocolConfig`] describes the hierarchy and timing rules. From it
//! [`DramNet::from_config`] builds the command net, which can be unrolled
//! into its reachability graph, enumerated into legal traces, used as a
//! scoreboard for timed traces, or emitted as DOT, CSV and assertion text.
//!
//! ```
//! use dram_petri::{DramNet, ProtocolConfig, unroll, k_min};
//!
//! let dnet = DramNet::from_config(&ProtocolConfig::functional(1, 2)).unwrap();
//! let sg = unroll(&dnet).unwrap();
//! assert_eq!((sg.state_count(), k_min(&sg)), (9, 3));
//! ```

pub mod analysis;
pub mod config;
pub mod dram;
pub mod emit;
pub mod petri;
pub mod timing;
pub mod verify;

pub use analysis::{
    count_traces, enumerate_traces, equivalent, k_min, render_trace, state_count_formula, unroll,
    AnalysisError, Equivalence, StateGraph, Trace, TraceSet,
};
pub use config::{
    CommandTimingConstraint, ConfigError, ProtocolConfig, ScopePredicate, ScopeRegistry,
    TimingValue, WindowGroup, WindowSpec,
};
pub use dram::{BuildError, DramNet, TimingArcInfo};
pub use emit::{emit, EmissionTarget};
pub use petri::{
    ArcKind, CommandKind, CommandLabel, Coordinate, Marking, NetBuilder, PetriNet, PlaceKind,
};
pub use timing::{TimeStamp, TimingState, WindowRule};
pub use verify::{parse_trace, replay, ReplayMode, ReplayOptions, TimedCommand, ViolationKind};
