//! Incremental multi-objective shortest-path planning on dynamic graphs.
//!
//! The library provides three planners behind one [`Planner`] interface:
//!
//! * [`mopbd::Session`] — incremental path-based search that keeps its search
//!   tree alive across edge-cost changes and start moves, exact or
//!   eps-approximate;
//! * [`namoa::NamoaPlanner`] — from-scratch path-based search, the reference
//!   baseline;
//! * [`modstar::ModStarPlanner`] — node-based incremental baseline.
//!
//! Around them: cost-vector kernels ([`costvec`]), dynamic grid graphs with
//! MovingAI map ingestion ([`graph`]), an exhaustive enumeration oracle
//! ([`exhaustive`]), the dynamic-replanning simulator ([`simulator`]), and a
//! scalarization counterexample ([`scalarize`]).

pub mod costvec;
pub mod exhaustive;
pub mod graph;
pub mod labels;
pub mod modstar;
pub mod mopbd;
pub mod namoa;
pub mod planner;
pub mod scalarize;
pub mod simulator;

pub use costvec::{Cost, CostVec, NdKernel};
pub use graph::{DynGraph, EdgeChange, GridMap, Heuristic, ManhattanHeuristic, NodeId};
pub use planner::{Plan, Planner, TimedOut};
