//! Computing with finite-index subgroups and coset partitions of free
//! groups of finite rank.
//!
//! The toolkit covers:
//!
//! - freely reduced words and the group operations ([`word`]);
//! - Schreier automata of finite-index subgroups, built by Stallings
//!   folding, with membership, canonical forms, conjugation and DOT export
//!   ([`automaton`]);
//! - permutation machinery for the transition groups acting on cosets,
//!   including bounded group enumeration and product-group witness
//!   searches ([`perm`], [`search`]);
//! - coset partitions as points of a metric space carrying a right
//!   `F_n`-action: exact-cover verification, the first-difference
//!   ultrametric, orbits and conjugate intersections ([`partition`]);
//! - analyzers for the sufficient multiplicity conditions tied to the
//!   Herzog-Schonheim conjecture, with certificate-carrying verdicts and
//!   neighborhood transfer checks ([`analyzer`]);
//! - seeded random generation of verified partitions for test corpora
//!   ([`gen`]).

pub mod analyzer;
pub mod automaton;
pub mod error;
pub mod gen;
pub mod partition;
pub mod perm;
pub mod search;
pub mod word;

pub use analyzer::{
    analyze, check_neighborhood, check_theorem1, check_theorem2, compute_kp_sharp, AnalysisReport,
    AnalyzeOptions, Certificate, ConditionVerdict, IvReading, KPSharp, NeighborhoodFinding,
    Theorem1Verdict, Theorem2Report, TransferOutcome,
};
pub use automaton::{CanonicalForm, SubgroupAutomaton, DEFAULT_MAX_INDEX};
pub use error::{Error, Result};
pub use gen::{random_partition, random_subgroup, GenConfig};
pub use partition::{
    CosetPair, CosetPartition, CoverDefect, Distance, Theorem3Verdict, VerificationResult,
    DEFAULT_PRODUCT_CAP,
};
pub use perm::{
    enumerate_group, has_full_cycle, max_cycle_length, CycleSearch, GroupEnumeration, Permutation,
};
pub use search::{search_witnesses, MarkedAutomaton, TransitionGroup, WitnessSearch, WitnessTuple};
pub use word::{all_reduced_words, Letter, Rank, ReducedWord, MAX_RANK};

#[cfg(test)]
mod thread_safety {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    // Everything is immutable after construction; keep it shareable.
    #[test]
    fn core_types_are_send_and_sync() {
        assert_send_sync::<ReducedWord>();
        assert_send_sync::<SubgroupAutomaton>();
        assert_send_sync::<Permutation>();
        assert_send_sync::<GroupEnumeration>();
        assert_send_sync::<TransitionGroup>();
        assert_send_sync::<WitnessSearch>();
        assert_send_sync::<CosetPartition>();
        assert_send_sync::<VerificationResult>();
        assert_send_sync::<AnalysisReport>();
        assert_send_sync::<GenConfig>();
        assert_send_sync::<Error>();
    }
}
