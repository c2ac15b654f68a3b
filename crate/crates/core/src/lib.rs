//! Exact solvers for the draft game: two players alternately pick agents
//! (efficiency vectors over a set of tasks), each then solves an assignment
//! problem on their own agents, and the score is Alice's value minus Bob's.
//!
//! * [`solver`]: memoised alpha-beta search with dominance pruning.
//! * [`otp`]: dedicated algorithms when every agent has at most one nonzero
//!   efficiency.
//! * [`reduction`]: the QBF-game gadget construction and a brute-force QBF
//!   referee.
//! * [`oracle`]: unpruned ground truth, game sums, generators.

pub mod error;
pub mod instance;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod otp;
pub mod reduction;
pub mod score;
pub mod solver;
pub mod suites;
pub mod weight;

pub use error::{DraftError, Result};
pub use instance::{Agent, Instance, Player, Position};
pub use matching::assignment_value;
pub use score::{final_score, provisional_values, score_upper_bound};
pub use solver::{engine_move, evaluate_moves, solve, MoveEval, MoveValue, Pruning, SolveOptions, SolveResult};
