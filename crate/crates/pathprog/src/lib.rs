//! Scheduling analysis for sporadic DAG tasks built on parallel path
//! progression: tracking the simultaneous progress of a whole collection of
//! paths (not just the critical path) with a two-level priority scheme, so
//! the response-time analysis only charges the subjobs outside the
//! collection.
//!
//! The crate provides:
//!
//! * the task model and graph operations ([`task`]),
//! * minimum path cover and DAG width ([`cover`]),
//! * path-collection selection, greedy and exhaustive ([`collection`]),
//! * closed-form response-time bounds ([`bounds`]),
//! * gang and ordinary reservation provisioning ([`reservation`]),
//! * an event-driven List-FP simulator that validates every bound
//!   empirically ([`sim`]),
//! * a layered random DAG generator ([`generator`]),
//! * batch experiment harnesses with CSV output ([`experiments`]),
//! * the JSON interchange formats ([`io`]).
//!
//! The `book/` directory of the repository walks through the concepts; its
//! code snippets compile against this crate and run as doctests.

pub mod bounds;
pub mod collection;
pub mod cover;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod io;
pub mod reservation;
pub mod sim;
pub mod task;
pub mod time;

pub use error::{Error, Result};
pub use task::{DagTask, Path, VertexId};
pub use time::Time;

// The guide's code samples double as doctests: `cargo test --doc` compiles
// and runs every Rust block in the book chapters.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            pub struct $name;
        };
    }

    chapter!(Introduction, "../../../book/src/introduction.md");
    chapter!(TaskModel, "../../../book/src/task-model.md");
    chapter!(PathCollections, "../../../book/src/path-collections.md");
    chapter!(CollectionSearch, "../../../book/src/collection-search.md");
    chapter!(Reservations, "../../../book/src/reservations.md");
    chapter!(Simulation, "../../../book/src/simulation.md");
    chapter!(Experiments, "../../../book/src/experiments.md");
}
