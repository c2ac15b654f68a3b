//! QBF game to draft game: the gadget construction, a brute-force referee
//! for the QBF game, and a replay that checks the intended forced order.
//!
//! Efficiencies form a chain `alpha = 5 beta = 25 gamma_1 = ...` ending at
//! `a_{n+1} = 1`, so every symbol is a power of five and a position's
//! largest free efficiency always dominates everything below it.

mod corpus;
mod gadget;
mod qbf;
mod verify;

pub use corpus::{bundled_corpus, check_formula, single_pair_corpus, CorpusOutcome};
pub use gadget::{build_draft_instance, ChainSymbol, GadgetInstance};
pub use qbf::{
    normalize_qbf, parse_qdimacs, qbf_game_winner, qbf_game_winner_bounded, to_qdimacs, used_variables, Lit,
    QbfFormula, QbfPlayer, DEFAULT_MAX_QBF_PAIRS,
};
pub use verify::{verify_forced_order, ForcedOrderReport, PairPolicy, PlyCheck, PlyReport};
