//! Word-tracked enumeration of transition groups and the product-group
//! search for witness elements.
//!
//! Both walks explore with the fixed letter order
//! `g_1, g_1^{-1}, g_2, g_2^{-1}, ...`, so every element carries the
//! breadth-first-shortest realizing word under that order and all results
//! are reproducible.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::automaton::SubgroupAutomaton;
use crate::perm::Permutation;
use crate::word::{Letter, ReducedWord};

/// The transition group of a Schreier automaton, enumerated with a
/// shortest realizing word per element.
#[derive(Debug, Clone)]
pub struct TransitionGroup {
    /// `(word, permutation)` pairs in breadth-first discovery order; the
    /// identity comes first.
    pub elements: Vec<(ReducedWord, Permutation)>,
    /// Whether the closure finished under the cap.
    pub complete: bool,
}

impl TransitionGroup {
    /// Enumerate the group generated by the coset actions of the
    /// generators, up to `cap` elements.
    pub fn enumerate(automaton: &SubgroupAutomaton, cap: usize) -> TransitionGroup {
        let letters = signed_letters(automaton.rank().get());
        let steps: Vec<Permutation> = letters
            .iter()
            .map(|&l| automaton.word_permutation(&ReducedWord::reduce([l])))
            .collect();

        let id = Permutation::identity(automaton.index());
        let mut seen: HashMap<Permutation, usize> = HashMap::from([(id.clone(), 0)]);
        let mut elements = vec![(ReducedWord::identity(), id)];
        let mut queue = VecDeque::from([0usize]);
        let mut complete = true;

        'bfs: while let Some(idx) = queue.pop_front() {
            let (word, perm) = elements[idx].clone();
            for (l, step) in letters.iter().zip(&steps) {
                let next = perm.then(step);
                if !seen.contains_key(&next) {
                    if elements.len() >= cap {
                        complete = false;
                        break 'bfs;
                    }
                    seen.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    // Appending one letter to a shortest word stays reduced:
                    // a cancellation would revisit an earlier element.
                    elements.push((word.multiply(&ReducedWord::reduce([*l])), next));
                }
            }
        }

        TransitionGroup { elements, complete }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// First element (in discovery order) that is a single full cycle.
    pub fn find_full_cycle(&self) -> Option<&(ReducedWord, Permutation)> {
        self.elements.iter().find(|(_, p)| p.is_full_cycle())
    }

    /// Longest cycle over all enumerated elements, with the first word
    /// realizing it.
    pub fn max_cycle(&self) -> Option<(usize, &ReducedWord)> {
        let mut best: Option<(usize, &ReducedWord)> = None;
        for (word, perm) in &self.elements {
            let len = perm.max_cycle_length();
            if best.is_none_or(|(b, _)| len > b) {
                best = Some((len, word));
            }
        }
        best
    }
}

/// One part of a partition as seen by the witness search: its automaton and
/// the coset state of its representative.
#[derive(Debug, Clone, Copy)]
pub struct MarkedAutomaton<'a> {
    pub automaton: &'a SubgroupAutomaton,
    pub marked: u32,
}

/// A product-group element whose largest marked-vertex cycle reaches `k`.
#[derive(Debug, Clone)]
pub struct WitnessTuple {
    /// Shortest realizing word.
    pub word: ReducedWord,
    /// The coset permutation induced on each part, in part order.
    pub permutations: Vec<Permutation>,
    /// Cycle length of each part's marked vertex under its permutation.
    pub cycle_lengths: Vec<usize>,
    /// How many parts attain the maximum `k`.
    pub sharp: usize,
}

/// Result of a bounded walk over the product transition group.
#[derive(Debug, Clone)]
pub struct WitnessSearch {
    /// All witnesses found, in breadth-first discovery order.
    pub witnesses: Vec<WitnessTuple>,
    /// Whether the whole product group was visited under the cap.
    pub exhaustive: bool,
    /// Product-group elements explored.
    pub explored: usize,
    /// Largest marked-vertex cycle length observed on any element; when
    /// `exhaustive`, this is an independent computation of `k`.
    pub max_marked_cycle: usize,
}

/// Walk the group generated by the tuples of generator actions, collecting
/// every element whose maximal marked-vertex cycle length equals `k`.
///
/// Parts sharing a subgroup share a coordinate: their permutations coincide
/// identically, so the walk runs over the distinct automata and each part
/// reads its cycle length off its own marked vertex.
pub fn search_witnesses(parts: &[MarkedAutomaton<'_>], k: usize, cap: usize) -> WitnessSearch {
    assert!(!parts.is_empty(), "witness search needs at least one part");
    let rank = parts[0].automaton.rank();

    // Deduplicate automata by canonical form, preserving first-seen order.
    let mut unique: Vec<&SubgroupAutomaton> = Vec::new();
    let mut part_slot = Vec::with_capacity(parts.len());
    for part in parts {
        let form = part.automaton.canonical_form();
        let slot = unique
            .iter()
            .position(|u| u.canonical_form() == form)
            .unwrap_or_else(|| {
                unique.push(part.automaton);
                unique.len() - 1
            });
        part_slot.push(slot);
    }

    let letters = signed_letters(rank.get());
    // steps[slot][letter] = action of that letter on that automaton.
    let steps: Vec<Vec<Permutation>> = unique
        .iter()
        .map(|u| {
            letters
                .iter()
                .map(|&l| u.word_permutation(&ReducedWord::reduce([l])))
                .collect()
        })
        .collect();

    let encode = |tuple: &[Permutation]| -> Vec<u8> {
        let mut key = Vec::with_capacity(tuple.iter().map(Permutation::degree).sum());
        for p in tuple {
            key.extend(p.images().iter().map(|&x| x as u8));
        }
        key
    };

    let identity: Vec<Permutation> = unique
        .iter()
        .map(|u| Permutation::identity(u.index()))
        .collect();

    let mut seen: HashMap<Vec<u8>, u32> = HashMap::from([(encode(&identity), 0)]);
    // Parent pointers let witness words be rebuilt without storing a word
    // per element.
    let mut meta: Vec<(u32, Option<Letter>)> = vec![(0, None)];
    let mut queue: VecDeque<(u32, Vec<Permutation>)> = VecDeque::from([(0, identity.clone())]);
    let mut witnesses = Vec::new();
    let mut exhaustive = true;
    let mut max_marked_cycle = 0;

    let word_of = |meta: &[(u32, Option<Letter>)], mut idx: u32| -> ReducedWord {
        let mut letters_rev = Vec::new();
        while let (parent, Some(letter)) = meta[idx as usize] {
            letters_rev.push(letter);
            idx = parent;
        }
        letters_rev.reverse();
        ReducedWord::reduce(letters_rev)
    };

    let inspect = |idx: u32,
                   tuple: &[Permutation],
                   meta: &[(u32, Option<Letter>)],
                   witnesses: &mut Vec<WitnessTuple>,
                   max_marked_cycle: &mut usize| {
        let cycle_lengths: Vec<usize> = parts
            .iter()
            .zip(&part_slot)
            .map(|(part, &slot)| tuple[slot].cycle_length_at(part.marked))
            .collect();
        let o_max = cycle_lengths.iter().copied().max().unwrap_or(1);
        *max_marked_cycle = (*max_marked_cycle).max(o_max);
        if o_max == k {
            let sharp = cycle_lengths.iter().filter(|&&o| o == k).count();
            witnesses.push(WitnessTuple {
                word: word_of(meta, idx),
                permutations: part_slot.iter().map(|&slot| tuple[slot].clone()).collect(),
                cycle_lengths,
                sharp,
            });
        }
    };

    inspect(0, &identity, &meta, &mut witnesses, &mut max_marked_cycle);

    'bfs: while let Some((idx, tuple)) = queue.pop_front() {
        for (li, &letter) in letters.iter().enumerate() {
            let next: Vec<Permutation> = tuple
                .iter()
                .zip(&steps)
                .map(|(p, s)| p.then(&s[li]))
                .collect();
            let key = encode(&next);
            if !seen.contains_key(&key) {
                if seen.len() >= cap {
                    exhaustive = false;
                    break 'bfs;
                }
                let next_idx = meta.len() as u32;
                seen.insert(key, next_idx);
                meta.push((idx, Some(letter)));
                inspect(
                    next_idx,
                    &next,
                    &meta,
                    &mut witnesses,
                    &mut max_marked_cycle,
                );
                queue.push_back((next_idx, next));
            }
        }
    }

    WitnessSearch {
        witnesses,
        exhaustive,
        explored: meta.len(),
        max_marked_cycle,
    }
}

fn signed_letters(n: usize) -> Vec<Letter> {
    (1..=n)
        .flat_map(|i| [Letter::generator(i), Letter::inverse_generator(i)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Rank;

    fn rank2() -> Rank {
        Rank::new(2).unwrap()
    }

    fn w(text: &str) -> ReducedWord {
        ReducedWord::parse(text, rank2()).unwrap()
    }

    fn ker_b_mod3() -> SubgroupAutomaton {
        let gens = [w("a"), w("bbb"), w("baB"), w("bbaBB")];
        SubgroupAutomaton::from_generators(&gens, rank2()).unwrap()
    }

    fn ker_b_parity() -> SubgroupAutomaton {
        let gens = [w("a"), w("bb"), w("baB")];
        SubgroupAutomaton::from_generators(&gens, rank2()).unwrap()
    }

    #[test]
    fn transition_group_of_cyclic_kernel() {
        let t = TransitionGroup::enumerate(&ker_b_mod3(), 1000);
        assert!(t.complete);
        assert_eq!(t.order(), 3);
        let (len, word) = t.max_cycle().unwrap();
        assert_eq!(len, 3);
        assert_eq!(word.surface(), "b");
        let (cycle_word, cycle_perm) = t.find_full_cycle().unwrap();
        assert_eq!(cycle_word.surface(), "b");
        assert!(cycle_perm.is_full_cycle());
    }

    #[test]
    fn transition_group_words_realize_their_permutations() {
        let h = SubgroupAutomaton::from_permutations(
            rank2(),
            &[
                Permutation::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap(),
                Permutation::from_cycles(4, &[&[0, 1]]).unwrap(),
            ],
        )
        .unwrap();
        let t = TransitionGroup::enumerate(&h, 100);
        assert!(t.complete);
        assert_eq!(t.order(), 24);
        for (word, perm) in &t.elements {
            assert_eq!(&h.word_permutation(word), perm);
        }
    }

    #[test]
    fn incomplete_enumeration_is_flagged() {
        let h = SubgroupAutomaton::from_permutations(
            rank2(),
            &[
                Permutation::from_cycles(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]]).unwrap(),
                Permutation::from_cycles(8, &[&[0, 1]]).unwrap(),
            ],
        )
        .unwrap();
        let t = TransitionGroup::enumerate(&h, 100);
        assert!(!t.complete);
        assert_eq!(t.order(), 100);
    }

    #[test]
    fn single_part_witness() {
        let h = ker_b_mod3();
        let parts = [MarkedAutomaton {
            automaton: &h,
            marked: 0,
        }];
        let found = search_witnesses(&parts, 3, 1000);
        assert!(found.exhaustive);
        assert_eq!(found.max_marked_cycle, 3);
        let first = &found.witnesses[0];
        assert_eq!(first.word.surface(), "b");
        assert_eq!(first.cycle_lengths, vec![3]);
        assert_eq!(first.sharp, 1);
    }

    #[test]
    fn two_part_witness_with_shared_subgroup() {
        let h = ker_b_parity();
        let parts = [
            MarkedAutomaton {
                automaton: &h,
                marked: 0,
            },
            MarkedAutomaton {
                automaton: &h,
                marked: 1,
            },
        ];
        let found = search_witnesses(&parts, 2, 1000);
        assert!(found.exhaustive);
        // The product collapses to the single shared transition group.
        assert_eq!(found.explored, 2);
        let b = found
            .witnesses
            .iter()
            .find(|wt| wt.word.surface() == "b")
            .expect("b is a witness");
        assert_eq!(b.cycle_lengths, vec![2, 2]);
        assert_eq!(b.sharp, 2);
    }

    #[test]
    fn degenerate_identity_witness() {
        let f = SubgroupAutomaton::full_group(rank2());
        let parts = [MarkedAutomaton {
            automaton: &f,
            marked: 0,
        }];
        let found = search_witnesses(&parts, 1, 10);
        assert!(found.exhaustive);
        assert_eq!(found.witnesses.len(), 1);
        assert!(found.witnesses[0].word.is_identity());
        assert_eq!(found.witnesses[0].sharp, 1);
    }

    #[test]
    fn mixed_parts_find_the_exact_witness_set() {
        // Parts (L4 at 0, L4 at 2, H at 1) with L4 the b-mod-4 kernel and H
        // the b-parity kernel. Both have trivial a-action, so the product
        // group is cyclic of order 4, generated by the b-pair. By hand: the
        // generator and its inverse have marked cycles (4, 4, 2), its
        // square (2, 2, 1), the identity (1, 1, 1). The witnesses for k = 4
        // are exactly the two full-order elements, reached by the length-1
        // words b and B.
        let l4 = {
            let gens = [w("a"), w("bbbb"), w("baB"), w("bbaBB"), w("bbbaBBB")];
            SubgroupAutomaton::from_generators(&gens, rank2()).unwrap()
        };
        let h = ker_b_parity();
        let parts = [
            MarkedAutomaton {
                automaton: &l4,
                marked: 0,
            },
            MarkedAutomaton {
                automaton: &l4,
                marked: 2,
            },
            MarkedAutomaton {
                automaton: &h,
                marked: 1,
            },
        ];
        let found = search_witnesses(&parts, 4, 1000);
        assert!(found.exhaustive);
        assert_eq!(found.explored, 4);
        assert_eq!(found.max_marked_cycle, 4);
        let words: Vec<String> = found.witnesses.iter().map(|wt| wt.word.surface()).collect();
        assert_eq!(words, vec!["b".to_string(), "B".to_string()]);
        for wt in &found.witnesses {
            assert_eq!(wt.cycle_lengths, vec![4, 4, 2]);
            assert_eq!(wt.sharp, 2);
        }
    }

    #[test]
    fn witness_words_reproduce_their_permutations() {
        let h2 = ker_b_parity();
        let h3 = ker_b_mod3();
        let parts = [
            MarkedAutomaton {
                automaton: &h2,
                marked: 1,
            },
            MarkedAutomaton {
                automaton: &h3,
                marked: 2,
            },
        ];
        let found = search_witnesses(&parts, 3, 1000);
        assert!(found.exhaustive);
        assert!(!found.witnesses.is_empty());
        for wt in &found.witnesses {
            assert_eq!(wt.permutations[0], h2.word_permutation(&wt.word));
            assert_eq!(wt.permutations[1], h3.word_permutation(&wt.word));
            let expect: Vec<usize> = vec![
                wt.permutations[0].cycle_length_at(1),
                wt.permutations[1].cycle_length_at(2),
            ];
            assert_eq!(wt.cycle_lengths, expect);
        }
    }
}
