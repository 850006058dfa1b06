//! Coset partitions of `F_n` and the space they live in.
//!
//! A partition point is an ordered list of (subgroup, representative)
//! pairs, kept in a fixed canonical order: index descending, ties broken by
//! canonical-form bytes, then by representative string. The first place
//! therefore holds a largest-index part, matching the tuple convention the
//! first-difference metric compares against.
//!
//! The metric looks only at the subgroup tuple, never at representatives,
//! so partitions related by the right action of `F_n` are at distance zero.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num::{BigInt, BigRational, One, Zero};

use crate::automaton::{SubgroupAutomaton, DEFAULT_MAX_INDEX};
use crate::error::{Error, Result};
use crate::word::{Letter, Rank, ReducedWord};

/// Hard ceiling on product-reachability walks (verification and orbits).
pub const DEFAULT_PRODUCT_CAP: usize = 1 << 24;

/// One part of a partition: a finite-index subgroup together with the
/// representative of its coset.
#[derive(Debug, Clone)]
pub struct CosetPair {
    subgroup: SubgroupAutomaton,
    representative: ReducedWord,
    marked: u32,
    form: crate::automaton::CanonicalForm,
}

impl CosetPair {
    pub fn subgroup(&self) -> &SubgroupAutomaton {
        &self.subgroup
    }

    pub fn representative(&self) -> &ReducedWord {
        &self.representative
    }

    /// The coset state of the representative in the subgroup's automaton.
    pub fn marked_vertex(&self) -> u32 {
        self.marked
    }

    pub fn index(&self) -> usize {
        self.subgroup.index()
    }

    pub fn form(&self) -> &crate::automaton::CanonicalForm {
        &self.form
    }
}

/// An ordered coset partition of `F_n`, in canonical order.
#[derive(Debug, Clone)]
pub struct CosetPartition {
    rank: Rank,
    pairs: Vec<CosetPair>,
}

/// Why a family of cosets fails to be a partition.
#[derive(Debug, Clone)]
pub enum CoverDefect {
    /// The index reciprocals do not sum to 1 (necessary condition, checked
    /// before any product walk). The sum is carried as an exact fraction.
    Density { sum: String },
    /// A word no coset covers.
    Uncovered { word: ReducedWord },
    /// A word covered by more than one coset.
    MultiplyCovered { word: ReducedWord, count: usize },
}

/// Outcome of exact-cover verification.
#[derive(Debug, Clone)]
pub struct VerificationResult {
    pub is_partition: bool,
    pub defect: Option<CoverDefect>,
    /// Tuples of the product automaton visited by the check.
    pub reachable_product_states: usize,
}

impl VerificationResult {
    pub fn witness_word(&self) -> Option<&ReducedWord> {
        match &self.defect {
            Some(CoverDefect::Uncovered { word }) => Some(word),
            Some(CoverDefect::MultiplyCovered { word, .. }) => Some(word),
            _ => None,
        }
    }
}

/// Value of the first-difference metric: zero or a dyadic `2^{-m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distance {
    Zero,
    /// `2^{-m}` where `m >= 1` is the first differing place.
    Dyadic(u32),
}

impl Distance {
    pub fn is_zero(self) -> bool {
        matches!(self, Distance::Zero)
    }

    /// The exponent `m` of `2^{-m}`, if nonzero.
    pub fn place(self) -> Option<u32> {
        match self {
            Distance::Zero => None,
            Distance::Dyadic(m) => Some(m),
        }
    }

    /// `self < 2^{-exponent}`.
    pub fn less_than_dyadic(self, exponent: u32) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Dyadic(m) => m > exponent,
        }
    }

    /// `self <= 2^{-exponent}`.
    pub fn at_most_dyadic(self, exponent: u32) -> bool {
        match self {
            Distance::Zero => true,
            Distance::Dyadic(m) => m >= exponent,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Dyadic(m) => (0.5f64).powi(m as i32),
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (Distance::Zero, Distance::Zero) => Ordering::Equal,
            (Distance::Zero, Distance::Dyadic(_)) => Ordering::Less,
            (Distance::Dyadic(_), Distance::Zero) => Ordering::Greater,
            // Larger exponent means smaller distance.
            (Distance::Dyadic(a), Distance::Dyadic(b)) => b.cmp(a),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::Dyadic(m) => write!(f, "2^-{m}"),
        }
    }
}

/// Verdict of the strict-intersection criterion on a pair of parts.
#[derive(Debug, Clone)]
pub enum Theorem3Verdict {
    /// The full conjugate intersection already equals the intersection with
    /// the two parts omitted; the criterion does not apply.
    ConditionFails,
    /// Strict inclusion held and every consequence checked out: the two
    /// subgroups are equal, the separating word has marked cycle length 2
    /// on both parts, and its square lies in the full intersection.
    SubgroupsEqual { separating_word: ReducedWord },
    /// Strict inclusion held but a consequence failed. This cannot happen
    /// for a verified partition; seeing it means a bug.
    Contradiction { detail: String },
}

impl CosetPartition {
    /// Assemble and canonically order a partition point.
    ///
    /// Parts of index 1 are rejected unless the whole partition is the
    /// single trivial coset of the full group.
    pub fn new(rank: Rank, parts: Vec<(SubgroupAutomaton, ReducedWord)>) -> Result<CosetPartition> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition(
                "a partition needs at least one coset".to_string(),
            ));
        }
        if parts.len() > 1 && parts.iter().any(|(h, _)| h.index() == 1) {
            return Err(Error::InvalidPartition(
                "index-1 parts are only allowed in the trivial one-coset partition".to_string(),
            ));
        }
        let mut pairs = Vec::with_capacity(parts.len());
        for (subgroup, representative) in parts {
            if subgroup.rank() != rank {
                return Err(Error::InvalidPartition(format!(
                    "subgroup rank {} does not match partition rank {}",
                    subgroup.rank(),
                    rank
                )));
            }
            if !representative.fits(rank) {
                return Err(Error::InvalidPartition(format!(
                    "representative {representative} does not fit rank {rank}"
                )));
            }
            let marked = subgroup.state_of(&representative);
            let form = subgroup.canonical_form();
            pairs.push(CosetPair {
                subgroup,
                representative,
                marked,
                form,
            });
        }
        pairs.sort_by(|a, b| {
            b.index()
                .cmp(&a.index())
                .then_with(|| a.form.cmp(&b.form))
                .then_with(|| a.representative.surface().cmp(&b.representative.surface()))
        });
        Ok(CosetPartition { rank, pairs })
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn pairs(&self) -> &[CosetPair] {
        &self.pairs
    }

    pub fn part_count(&self) -> usize {
        self.pairs.len()
    }

    /// Part indices in ascending order `d_1 <= ... <= d_s`.
    pub fn indices_ascending(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.pairs.iter().map(CosetPair::index).collect();
        out.reverse();
        out
    }

    /// Two parts share an index.
    pub fn multiplicity(&self) -> bool {
        self.pairs.windows(2).any(|w| w[0].index() == w[1].index())
    }

    /// Product of all part indices, saturating; the orbit and reachability
    /// bound.
    pub fn index_product(&self) -> u128 {
        self.pairs
            .iter()
            .map(|p| p.index() as u128)
            .fold(1u128, |acc, d| acc.saturating_mul(d))
    }

    /// Exact-cover check by reachability over the product of the distinct
    /// subgroup automata.
    ///
    /// A word `w` lies in the coset `H_i a_i` exactly when its state in
    /// `H_i`'s automaton is the marked vertex of part `i`, so the partition
    /// is exact if and only if every reachable state tuple marks exactly
    /// one part. Parts sharing a subgroup share a coordinate.
    pub fn verify(&self) -> Result<VerificationResult> {
        self.verify_capped(DEFAULT_PRODUCT_CAP)
    }

    pub fn verify_capped(&self, cap: usize) -> Result<VerificationResult> {
        // Density fast-fail: sum of index reciprocals must be exactly 1.
        let mut sum = BigRational::zero();
        for pair in &self.pairs {
            sum += BigRational::new(BigInt::one(), BigInt::from(pair.index()));
        }
        if sum != BigRational::one() {
            return Ok(VerificationResult {
                is_partition: false,
                defect: Some(CoverDefect::Density {
                    sum: sum.to_string(),
                }),
                reachable_product_states: 0,
            });
        }

        // Distinct automata, each a coordinate of the product.
        let mut unique: Vec<&SubgroupAutomaton> = Vec::new();
        let mut slot_of_part = Vec::with_capacity(self.pairs.len());
        for pair in &self.pairs {
            let slot = unique
                .iter()
                .position(|u| u.canonical_form() == pair.form)
                .unwrap_or_else(|| {
                    unique.push(&pair.subgroup);
                    unique.len() - 1
                });
            slot_of_part.push(slot);
        }

        let bound: u128 = unique.iter().map(|u| u.index() as u128).product();
        let cap = (cap as u128).min(bound) as usize;
        let start = vec![0u32; unique.len()];
        let walk = product_walk(&unique, start, cap, "partition verification")?;

        let mut result = VerificationResult {
            is_partition: true,
            defect: None,
            reachable_product_states: walk.tuples.len(),
        };
        for (idx, tuple) in walk.tuples.iter().enumerate() {
            let covered = self
                .pairs
                .iter()
                .zip(&slot_of_part)
                .filter(|(pair, &slot)| tuple[slot] == pair.marked)
                .count();
            if covered != 1 {
                let word = walk.word_of(idx as u32);
                result.is_partition = false;
                result.defect = Some(if covered == 0 {
                    CoverDefect::Uncovered { word }
                } else {
                    CoverDefect::MultiplyCovered {
                        word,
                        count: covered,
                    }
                });
                break;
            }
        }
        Ok(result)
    }

    /// First-difference distance between the canonical subgroup tuples.
    ///
    /// Representatives never matter. When one tuple is a proper prefix of
    /// the other the first difference is at place `min(s, t) + 1`.
    pub fn distance(&self, other: &CosetPartition) -> Distance {
        let shared = self.pairs.len().min(other.pairs.len());
        for m in 0..shared {
            if self.pairs[m].form != other.pairs[m].form {
                return Distance::Dyadic(m as u32 + 1);
            }
        }
        if self.pairs.len() == other.pairs.len() {
            Distance::Zero
        } else {
            Distance::Dyadic(shared as u32 + 1)
        }
    }

    /// Distance zero: same point of the quotient space.
    pub fn equivalent(&self, other: &CosetPartition) -> bool {
        self.distance(other).is_zero()
    }

    /// Same subgroups with the same representatives, place by place.
    pub fn identical(&self, other: &CosetPartition) -> bool {
        self.rank == other.rank
            && self.pairs.len() == other.pairs.len()
            && self
                .pairs
                .iter()
                .zip(&other.pairs)
                .all(|(a, b)| a.form == b.form && a.representative == b.representative)
    }

    /// The right action: multiply every representative by `word` and
    /// re-canonicalize.
    pub fn act(&self, word: &ReducedWord) -> CosetPartition {
        let parts = self
            .pairs
            .iter()
            .map(|p| (p.subgroup.clone(), p.representative.multiply(word)))
            .collect();
        CosetPartition::new(self.rank, parts).expect("acting preserves well-formedness")
    }

    /// Marked vertices in canonical part order.
    pub fn marked_tuple(&self) -> Vec<u32> {
        self.pairs.iter().map(|p| p.marked).collect()
    }

    /// Diagonal action of a word on a tuple of per-part states.
    pub fn act_on_marked_tuple(&self, tuple: &[u32], word: &ReducedWord) -> Vec<u32> {
        self.pairs
            .iter()
            .zip(tuple)
            .map(|(p, &q)| p.subgroup.read_from(q, word))
            .collect()
    }

    /// Orbit size of this partition under the cyclic group of `word`: the
    /// least common multiple of the marked-vertex cycle lengths.
    pub fn orbit_size_word(&self, word: &ReducedWord) -> u64 {
        self.pairs.iter().fold(1u64, |acc, p| {
            let len = p.subgroup.word_permutation(word).cycle_length_at(p.marked) as u64;
            num::integer::lcm(acc, len)
        })
    }

    /// Orbit size of this partition under all of `F_n`: the number of
    /// marked-vertex tuples reachable under the diagonal action. Always at
    /// most the product of the part indices.
    pub fn orbit_size_full(&self) -> Result<u64> {
        self.orbit_size_full_capped(DEFAULT_PRODUCT_CAP)
    }

    pub fn orbit_size_full_capped(&self, cap: usize) -> Result<u64> {
        let automata: Vec<&SubgroupAutomaton> = self.pairs.iter().map(|p| &p.subgroup).collect();
        let cap = (cap as u128).min(self.index_product()) as usize;
        let walk = product_walk(&automata, self.marked_tuple(), cap, "orbit walk")?;
        Ok(walk.tuples.len() as u64)
    }

    /// The intersection of the conjugates `a_i^{-1} H_i a_i` over all parts
    /// not listed in `omit`, as a subgroup automaton.
    ///
    /// Computed as the reachable component of the product rooted at the
    /// marked tuple: a word loops there exactly when it fixes every kept
    /// part's coset.
    pub fn intersect_conjugates(&self, omit: &[usize]) -> Result<SubgroupAutomaton> {
        self.intersect_conjugates_capped(omit, DEFAULT_MAX_INDEX)
    }

    pub fn intersect_conjugates_capped(
        &self,
        omit: &[usize],
        cap: usize,
    ) -> Result<SubgroupAutomaton> {
        let kept: Vec<&CosetPair> = self
            .pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| !omit.contains(i))
            .map(|(_, p)| p)
            .collect();
        if kept.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot intersect an empty family of parts".to_string(),
            ));
        }
        let automata: Vec<&SubgroupAutomaton> = kept.iter().map(|p| &p.subgroup).collect();
        let start: Vec<u32> = kept.iter().map(|p| p.marked).collect();
        let bound: u128 = automata.iter().map(|a| a.index() as u128).product();
        let cap = (cap as u128).min(bound) as usize;
        let walk = product_walk(&automata, start, cap, "conjugate intersection")?;

        // Forward tables over the reachable tuples.
        let n = self.rank.get();
        let d = walk.tuples.len();
        let mut forward = vec![vec![0u32; d]; n];
        for (idx, tuple) in walk.tuples.iter().enumerate() {
            for (g, row) in forward.iter_mut().enumerate() {
                let letter = Letter::generator(g + 1);
                let next: Vec<u32> = automata
                    .iter()
                    .zip(tuple)
                    .map(|(a, &q)| a.step(q, letter))
                    .collect();
                row[idx] = walk.map[&next];
            }
        }
        let perms: Vec<crate::perm::Permutation> = forward
            .into_iter()
            .map(|row| crate::perm::Permutation::from_images(row).expect("product is bijective"))
            .collect();
        SubgroupAutomaton::from_permutations(self.rank, &perms)
    }

    /// Strict-intersection criterion for parts `j` and `k` (0-based
    /// positions in canonical order).
    ///
    /// When the full conjugate intersection is strictly smaller than the
    /// intersection omitting parts `j` and `k`, the two subgroups must be
    /// equal; this checks that equality, and that a separating word has
    /// marked cycle length 2 on both parts with its square in the full
    /// intersection. The caller is responsible for only invoking this on a
    /// verified partition.
    pub fn check_theorem3(&self, j: usize, k: usize) -> Result<Theorem3Verdict> {
        self.check_theorem3_capped(j, k, DEFAULT_MAX_INDEX)
    }

    pub fn check_theorem3_capped(&self, j: usize, k: usize, cap: usize) -> Result<Theorem3Verdict> {
        let s = self.pairs.len();
        if j == k || j >= s || k >= s {
            return Err(Error::InvalidArgument(format!(
                "positions ({j}, {k}) invalid for {s} parts"
            )));
        }
        let full = self.intersect_conjugates_capped(&[], cap)?;
        let rest = if s == 2 {
            // Intersection over the empty family is the whole group.
            SubgroupAutomaton::full_group(self.rank)
        } else {
            self.intersect_conjugates_capped(&[j, k], cap)?
        };
        // full <= rest always; strictness is an index comparison.
        if full.index() == rest.index() {
            return Ok(Theorem3Verdict::ConditionFails);
        }

        let separating = rest
            .schreier_generators()
            .into_iter()
            .find(|g| !full.contains(g));
        let Some(word) = separating else {
            return Ok(Theorem3Verdict::Contradiction {
                detail: "strict inclusion reported but no separating generator found".to_string(),
            });
        };

        if self.pairs[j].form != self.pairs[k].form {
            return Ok(Theorem3Verdict::Contradiction {
                detail: format!("parts {j} and {k} are distinct subgroups"),
            });
        }
        for part in [j, k] {
            let p = &self.pairs[part];
            let o = p.subgroup.word_permutation(&word).cycle_length_at(p.marked);
            if o != 2 {
                return Ok(Theorem3Verdict::Contradiction {
                    detail: format!("separating word {word} has cycle length {o} at part {part}"),
                });
            }
        }
        if !full.contains(&word.multiply(&word)) {
            return Ok(Theorem3Verdict::Contradiction {
                detail: format!("square of separating word {word} escapes the intersection"),
            });
        }
        Ok(Theorem3Verdict::SubgroupsEqual {
            separating_word: word,
        })
    }

    /// Parse the partition text format.
    ///
    /// ```text
    /// rank <n>
    /// coset
    ///   rep <word>
    ///   gens <word> [<word> ...]
    /// end
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<CosetPartition> {
        let fail = |line: usize, message: String| Error::ParseError { line, message };

        let mut rank: Option<Rank> = None;
        let mut parts: Vec<(SubgroupAutomaton, ReducedWord)> = Vec::new();
        let mut current: Option<(usize, Option<ReducedWord>, Vec<ReducedWord>)> = None;

        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let keyword = tokens.next().expect("nonempty line has a token");
            match keyword {
                "rank" => {
                    if rank.is_some() {
                        return Err(fail(lineno, "duplicate rank line".to_string()));
                    }
                    let value: usize = tokens
                        .next()
                        .ok_or_else(|| fail(lineno, "rank needs a value".to_string()))?
                        .parse()
                        .map_err(|_| fail(lineno, "rank must be a positive integer".to_string()))?;
                    if tokens.next().is_some() {
                        return Err(fail(lineno, "trailing tokens after rank".to_string()));
                    }
                    rank = Some(Rank::new(value).map_err(|e| fail(lineno, e.to_string()))?);
                }
                "coset" => {
                    if rank.is_none() {
                        return Err(fail(lineno, "rank must come before cosets".to_string()));
                    }
                    if current.is_some() {
                        return Err(fail(lineno, "previous coset block not ended".to_string()));
                    }
                    current = Some((lineno, None, Vec::new()));
                }
                "rep" => {
                    let rank = rank.ok_or_else(|| fail(lineno, "rank not set".to_string()))?;
                    let block = current
                        .as_mut()
                        .ok_or_else(|| fail(lineno, "rep outside a coset block".to_string()))?;
                    let text = tokens
                        .next()
                        .ok_or_else(|| fail(lineno, "rep needs a word".to_string()))?;
                    if block.1.is_some() {
                        return Err(fail(lineno, "duplicate rep line".to_string()));
                    }
                    if tokens.next().is_some() {
                        return Err(fail(lineno, "rep takes a single word".to_string()));
                    }
                    block.1 = Some(
                        ReducedWord::parse(text, rank).map_err(|e| fail(lineno, e.to_string()))?,
                    );
                }
                "gens" => {
                    let rank = rank.ok_or_else(|| fail(lineno, "rank not set".to_string()))?;
                    let block = current
                        .as_mut()
                        .ok_or_else(|| fail(lineno, "gens outside a coset block".to_string()))?;
                    for token in tokens {
                        block.2.push(
                            ReducedWord::parse(token, rank)
                                .map_err(|e| fail(lineno, e.to_string()))?,
                        );
                    }
                }
                "end" => {
                    let rank = rank.ok_or_else(|| fail(lineno, "rank not set".to_string()))?;
                    let (start, rep, gens) = current
                        .take()
                        .ok_or_else(|| fail(lineno, "end outside a coset block".to_string()))?;
                    let rep = rep.ok_or_else(|| {
                        fail(start, "coset block is missing its rep line".to_string())
                    })?;
                    if gens.is_empty() {
                        return Err(fail(start, "coset block needs generators".to_string()));
                    }
                    let subgroup = SubgroupAutomaton::from_generators(&gens, rank)
                        .map_err(|e| fail(start, e.to_string()))?;
                    parts.push((subgroup, rep));
                }
                other => {
                    return Err(fail(lineno, format!("unknown keyword {other:?}")));
                }
            }
        }
        if let Some((start, _, _)) = current {
            return Err(fail(start, "unterminated coset block".to_string()));
        }
        let rank = rank.ok_or_else(|| fail(1, "missing rank line".to_string()))?;
        CosetPartition::new(rank, parts)
    }

    /// Serialize in the partition text format, in canonical part order.
    pub fn to_text(&self) -> String {
        let mut out = format!("rank {}\n", self.rank);
        for pair in &self.pairs {
            out.push_str("coset\n");
            out.push_str(&format!("  rep {}\n", pair.representative));
            out.push_str("  gens");
            for g in pair.subgroup.generator_words() {
                out.push(' ');
                out.push_str(&g.surface());
            }
            out.push_str("\nend\n");
        }
        out
    }
}

struct ProductWalk {
    tuples: Vec<Vec<u32>>,
    map: HashMap<Vec<u32>, u32>,
    parents: Vec<(u32, Option<Letter>)>,
}

impl ProductWalk {
    /// Reconstruct the breadth-first tree word reaching a tuple; tree paths
    /// are reduced because a cancellation would revisit a tuple.
    fn word_of(&self, mut idx: u32) -> ReducedWord {
        let mut letters = Vec::new();
        while let (parent, Some(letter)) = self.parents[idx as usize] {
            letters.push(letter);
            idx = parent;
        }
        letters.reverse();
        ReducedWord::reduce(letters)
    }
}

/// Breadth-first reachability over tuples of automaton states under the
/// diagonal action, exploring letters in the canonical order.
fn product_walk(
    automata: &[&SubgroupAutomaton],
    start: Vec<u32>,
    cap: usize,
    what: &str,
) -> Result<ProductWalk> {
    let n = automata
        .first()
        .map(|a| a.rank().get())
        .expect("product walk needs at least one automaton");
    let letters: Vec<Letter> = (1..=n)
        .flat_map(|i| [Letter::generator(i), Letter::inverse_generator(i)])
        .collect();

    let mut walk = ProductWalk {
        tuples: vec![start.clone()],
        map: HashMap::from([(start, 0)]),
        parents: vec![(0, None)],
    };
    let mut queue = VecDeque::from([0u32]);
    while let Some(idx) = queue.pop_front() {
        for &letter in &letters {
            let next: Vec<u32> = automata
                .iter()
                .zip(&walk.tuples[idx as usize])
                .map(|(a, &q)| a.step(q, letter))
                .collect();
            if !walk.map.contains_key(&next) {
                if walk.tuples.len() >= cap {
                    return Err(Error::ResourceExceeded(format!(
                        "{what} exceeded {cap} product states"
                    )));
                }
                let next_idx = walk.tuples.len() as u32;
                walk.map.insert(next.clone(), next_idx);
                walk.tuples.push(next);
                walk.parents.push((idx, Some(letter)));
                queue.push_back(next_idx);
            }
        }
    }
    Ok(walk)
}
