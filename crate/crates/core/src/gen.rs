//! Seeded random generation of verified coset partitions.
//!
//! Generation is refinement-based: start from the full coset partition of a
//! random finite-index subgroup, then repeatedly replace one coset `H a` by
//! the cosets of a random finite-index subgroup of `H`, rewritten through
//! `H`'s Schreier basis. Every step preserves exact cover, so the output
//! verifies by construction (and is re-verified before being returned).
//!
//! This reaches a useful corpus, not all of the partition space; it is a
//! test-corpus generator, not a uniform sampler.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::SubgroupAutomaton;
use crate::error::{Error, Result};
use crate::partition::CosetPartition;
use crate::perm::Permutation;
use crate::word::{Letter, Rank, ReducedWord, MAX_RANK};

/// Parameters of one generated partition; the seed fully determines the
/// output.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub rank: Rank,
    pub max_parts: usize,
    pub max_index: usize,
    pub refinement_depth: usize,
    pub seed: u64,
}

impl GenConfig {
    pub fn new(rank: Rank, seed: u64) -> GenConfig {
        GenConfig {
            rank,
            max_parts: 8,
            max_index: 12,
            refinement_depth: 2,
            seed,
        }
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform random permutation by Fisher-Yates.
fn random_permutation<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<u32> = (0..degree as u32).collect();
    for i in (1..degree).rev() {
        let j = rng.gen_range(0..=i);
        images.swap(i, j);
    }
    Permutation::from_images(images).expect("shuffle is a bijection")
}

/// Uniform random full cycle (for rank 1, where transitivity means exactly
/// that).
fn random_full_cycle<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    let shuffled = random_permutation(degree, rng);
    let mut images = vec![0u32; degree];
    for i in 0..degree {
        images[shuffled.apply(i as u32) as usize] = shuffled.apply(((i + 1) % degree) as u32);
    }
    Permutation::from_images(images).expect("cycle is a bijection")
}

fn is_transitive(perms: &[Permutation], degree: usize) -> bool {
    let mut seen = vec![false; degree];
    let mut stack = vec![0u32];
    seen[0] = true;
    let mut count = 1;
    while let Some(q) = stack.pop() {
        for p in perms {
            for next in [p.apply(q), p.inverse().apply(q)] {
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    count += 1;
                    stack.push(next);
                }
            }
        }
    }
    count == degree
}

fn random_transitive_tuple<R: Rng>(rank: Rank, degree: usize, rng: &mut R) -> Vec<Permutation> {
    if degree == 1 {
        return vec![Permutation::identity(1); rank.get()];
    }
    if rank.get() == 1 {
        return vec![random_full_cycle(degree, rng)];
    }
    // For two or more generators a random tuple is transitive with
    // overwhelming probability; the retry loop is a formality.
    for _ in 0..10_000 {
        let perms: Vec<Permutation> = (0..rank.get())
            .map(|_| random_permutation(degree, rng))
            .collect();
        if is_transitive(&perms, degree) {
            return perms;
        }
    }
    unreachable!("random transitive tuples are abundant for rank >= 2");
}

fn random_subgroup_with<R: Rng>(rank: Rank, index: usize, rng: &mut R) -> SubgroupAutomaton {
    if index <= 1 {
        return SubgroupAutomaton::full_group(rank);
    }
    let perms = random_transitive_tuple(rank, index, rng);
    SubgroupAutomaton::from_permutations(rank, &perms)
        .expect("transitive tuples give connected automata")
}

/// A random subgroup of the given index: the stabilizer of a point under a
/// random transitive action on `index` points. Deterministic in the seed.
pub fn random_subgroup(rank: Rank, index: usize, seed: u64) -> SubgroupAutomaton {
    random_subgroup_with(rank, index, &mut rng_for(seed))
}

/// A random reduced word of exactly `len` letters (non-backtracking walk).
pub fn random_reduced_word<R: Rng>(rank: Rank, len: usize, rng: &mut R) -> ReducedWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        loop {
            let index = rng.gen_range(1..=rank.get());
            let letter = if rng.gen_bool(0.5) {
                Letter::generator(index)
            } else {
                Letter::inverse_generator(index)
            };
            if letters.last() != Some(&letter.inverse()) {
                letters.push(letter);
                break;
            }
        }
    }
    ReducedWord::reduce(letters)
}

/// A seeded random reduced word (convenience over [`random_reduced_word`]).
pub fn seeded_word(rank: Rank, len: usize, seed: u64) -> ReducedWord {
    random_reduced_word(rank, len, &mut StdRng::seed_from_u64(seed))
}

/// Substitute each letter of `word` (over the inner alphabet) by the
/// corresponding basis word of the outer group.
fn substitute(word: &ReducedWord, basis: &[ReducedWord]) -> ReducedWord {
    let mut out = ReducedWord::identity();
    for &letter in word.letters() {
        let factor = &basis[letter.index() - 1];
        out = if letter.is_inverse() {
            out.multiply(&factor.inverse())
        } else {
            out.multiply(factor)
        };
    }
    out
}

/// Generate a verified coset partition from the configuration.
///
/// Starts from the full coset partition of a random subgroup of small
/// index, then performs `refinement_depth` random refinements, skipping any
/// that would exceed `max_index` or `max_parts`. The result is re-verified
/// before being returned; a verification failure is a bug and panics.
pub fn random_partition(cfg: &GenConfig) -> Result<CosetPartition> {
    if cfg.max_index < 2 {
        return Err(Error::InvalidArgument(
            "max_index must be at least 2".to_string(),
        ));
    }
    let mut rng = rng_for(cfg.seed);

    let initial_index = rng.gen_range(2..=cfg.max_index.min(4));
    let root = random_subgroup_with(cfg.rank, initial_index, &mut rng);
    let mut parts: Vec<(SubgroupAutomaton, ReducedWord)> = root
        .coset_representatives()
        .into_iter()
        .map(|rep| (root.clone(), rep))
        .collect();

    for _ in 0..cfg.refinement_depth {
        let position = rng.gen_range(0..parts.len());
        let (parent, rep) = parts[position].clone();
        let parent_index = parent.index();

        let index_room = cfg.max_index / parent_index;
        let part_room = cfg.max_parts.saturating_sub(parts.len() - 1);
        let max_split = index_room.min(part_room);
        if max_split < 2 {
            continue;
        }
        let basis = parent.schreier_generators();
        let Ok(inner_rank) = Rank::new(basis.len().min(MAX_RANK)) else {
            continue;
        };
        if basis.len() > MAX_RANK {
            // The subgroup's free rank exceeds the letter alphabet; skip
            // this refinement rather than truncate the basis.
            continue;
        }
        let split = rng.gen_range(2..=max_split);

        // A random index-`split` subgroup of the parent, built inside the
        // parent's own free basis and rewritten into the ambient group.
        let inner = random_subgroup_with(inner_rank, split, &mut rng);
        let gens: Vec<ReducedWord> = inner
            .generator_words()
            .iter()
            .map(|g| substitute(g, &basis))
            .collect();
        let refined = SubgroupAutomaton::from_generators(&gens, cfg.rank)
            .expect("finite-index subgroup of a finite-index subgroup");
        assert_eq!(
            refined.index(),
            parent_index * split,
            "refined subgroup must have index {parent_index} * {split}"
        );

        parts.remove(position);
        for inner_rep in inner.coset_representatives() {
            let coset_rep = substitute(&inner_rep, &basis).multiply(&rep);
            parts.push((refined.clone(), coset_rep));
        }
    }

    let partition = CosetPartition::new(cfg.rank, parts)?;
    let verification = partition.verify()?;
    assert!(
        verification.is_partition,
        "generated partition failed verification: {:?}",
        verification.defect
    );
    Ok(partition)
}
