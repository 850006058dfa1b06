//! Schreier automata of finite-index subgroups of `F_n`.
//!
//! A subgroup given by generator words is built by folding the wedge of its
//! generator loops. When the folded graph is complete it is exactly the
//! Schreier coset graph of the subgroup: states are right cosets, the
//! basepoint is the subgroup itself, and reading a word from the basepoint
//! lands in the coset of that word. An incomplete folded graph means the
//! subgroup has infinite index, which this type refuses to represent.
//!
//! States are always numbered canonically: breadth-first from the basepoint
//! with edge order `g_1, g_1^{-1}, g_2, g_2^{-1}, ...`. Two automata then
//! describe the same subgroup if and only if their transition tables are
//! byte-for-byte equal, which is what [`CanonicalForm`] serializes.

use std::collections::VecDeque;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::word::{Letter, Rank, ReducedWord};

/// Hard ceiling on automaton sizes produced by product constructions.
pub const DEFAULT_MAX_INDEX: usize = 4096;

/// Per-state `(parent, letter)` entries of a BFS spanning tree.
type TreeParents = Vec<Option<(u32, Letter)>>;

/// The Schreier automaton of a finite-index subgroup `H <= F_n`.
#[derive(Debug, Clone)]
pub struct SubgroupAutomaton {
    rank: Rank,
    /// `forward[g][q]` is the state reached from `q` by generator `g+1`.
    forward: Vec<Vec<u32>>,
    /// Inverse maps of `forward`, one per generator.
    backward: Vec<Vec<u32>>,
    /// Generating set this automaton was built from, kept for provenance
    /// and for the textual partition format.
    generator_words: Vec<ReducedWord>,
}

/// Byte encoding of a canonically numbered automaton.
///
/// Equal bytes exactly characterize equal subgroups (basepoint-preserving
/// isomorphism of the rooted labelled graphs).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl SubgroupAutomaton {
    /// The whole group as an index-1 subgroup.
    pub fn full_group(rank: Rank) -> SubgroupAutomaton {
        let n = rank.get();
        SubgroupAutomaton {
            rank,
            forward: vec![vec![0]; n],
            backward: vec![vec![0]; n],
            generator_words: (1..=n)
                .map(|i| ReducedWord::reduce([Letter::generator(i)]))
                .collect(),
        }
    }

    /// Build the automaton of `<gens>` by Stallings folding.
    ///
    /// Returns [`Error::InfiniteIndex`] when the folded graph is not
    /// complete, i.e. the subgroup has infinite index.
    pub fn from_generators(gens: &[ReducedWord], rank: Rank) -> Result<SubgroupAutomaton> {
        for g in gens {
            if !g.fits(rank) {
                return Err(Error::LetterOutOfRange {
                    index: g.max_index(),
                    rank: rank.get(),
                });
            }
        }
        let folded = fold_wedge(gens, rank)?;
        let mut automaton = finalize(rank, folded, 0)?;
        automaton.generator_words = gens.to_vec();
        Ok(automaton)
    }

    /// Build from the permutation action of the generators on `{0..d-1}`,
    /// taking the subgroup to be the stabilizer of point 0.
    ///
    /// The action must be transitive so that the graph is connected.
    pub fn from_permutations(rank: Rank, perms: &[Permutation]) -> Result<SubgroupAutomaton> {
        if perms.len() != rank.get() {
            return Err(Error::InvalidArgument(format!(
                "need one permutation per generator: got {} for rank {}",
                perms.len(),
                rank
            )));
        }
        let d = perms[0].degree();
        if d == 0 || perms.iter().any(|p| p.degree() != d) {
            return Err(Error::InvalidArgument(
                "permutations must share a positive degree".to_string(),
            ));
        }
        let forward: Vec<Vec<u32>> = perms.iter().map(|p| p.images().to_vec()).collect();
        finalize(rank, forward, 0)
            .map_err(|_| Error::InvalidArgument("permutation action is not transitive".to_string()))
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    /// The index `[F_n : H]`, which equals the state count.
    pub fn index(&self) -> usize {
        self.forward[0].len()
    }

    /// The basepoint is always state 0 after canonical numbering.
    pub fn basepoint(&self) -> u32 {
        0
    }

    pub fn is_full_group(&self) -> bool {
        self.index() == 1
    }

    pub fn generator_words(&self) -> &[ReducedWord] {
        &self.generator_words
    }

    /// One transition step.
    pub fn step(&self, state: u32, letter: Letter) -> u32 {
        let g = letter.index() - 1;
        assert!(
            g < self.rank.get(),
            "letter index {} beyond automaton rank {}",
            letter.index(),
            self.rank
        );
        if letter.is_inverse() {
            self.backward[g][state as usize]
        } else {
            self.forward[g][state as usize]
        }
    }

    /// Read a word starting from an arbitrary state.
    pub fn read_from(&self, state: u32, word: &ReducedWord) -> u32 {
        word.letters().iter().fold(state, |q, &l| self.step(q, l))
    }

    /// The coset state of `word`: read it from the basepoint.
    pub fn state_of(&self, word: &ReducedWord) -> u32 {
        self.read_from(0, word)
    }

    /// Membership: a word lies in the subgroup iff it loops at the basepoint.
    pub fn contains(&self, word: &ReducedWord) -> bool {
        self.state_of(word) == 0
    }

    /// The generator actions on cosets, as permutations of `{0..d-1}`.
    pub fn generator_permutations(&self) -> Vec<Permutation> {
        self.forward
            .iter()
            .map(|row| Permutation::from_images(row.clone()).expect("rows are bijections"))
            .collect()
    }

    /// The coset permutation induced by an arbitrary word.
    pub fn word_permutation(&self, word: &ReducedWord) -> Permutation {
        let images = (0..self.index() as u32)
            .map(|q| self.read_from(q, word))
            .collect();
        Permutation::from_images(images).expect("transition maps are bijections")
    }

    /// Deterministic byte encoding deciding subgroup equality.
    pub fn canonical_form(&self) -> CanonicalForm {
        let d = self.index();
        let n = self.rank.get();
        let mut bytes = Vec::with_capacity(8 + 4 * d * n);
        bytes.extend_from_slice(&(d as u32).to_le_bytes());
        bytes.extend_from_slice(&(n as u32).to_le_bytes());
        for q in 0..d {
            for row in &self.forward {
                bytes.extend_from_slice(&row[q].to_le_bytes());
            }
        }
        CanonicalForm(bytes)
    }

    /// True when `self` and `other` are the same subgroup of the same group.
    pub fn same_subgroup(&self, other: &SubgroupAutomaton) -> bool {
        self.rank == other.rank && self.forward == other.forward
    }

    /// The automaton of the conjugate `alpha^{-1} H alpha`: the same graph
    /// re-rooted at the coset state of `alpha` and renumbered canonically.
    pub fn conjugate(&self, alpha: &ReducedWord) -> SubgroupAutomaton {
        let base = self.state_of(alpha);
        finalize(self.rank, self.forward.clone(), base)
            .expect("re-rooting a complete connected graph cannot fail")
    }

    /// Shortest coset representatives: for each state the word labelling its
    /// breadth-first tree path from the basepoint (identity for state 0).
    pub fn coset_representatives(&self) -> Vec<ReducedWord> {
        let (parents, _) = self.spanning_tree();
        let d = self.index();
        let mut reps: Vec<ReducedWord> = vec![ReducedWord::identity(); d];
        // Parents are discovered in BFS order, so a parent's word is always
        // ready before its children need it.
        let mut order: Vec<u32> = (0..d as u32).collect();
        order.sort_by_key(|&q| self.rep_depth(&parents, q));
        for q in order {
            if let Some((parent, letter)) = parents[q as usize] {
                reps[q as usize] = reps[parent as usize].multiply(&ReducedWord::reduce([letter]));
            }
        }
        reps
    }

    fn rep_depth(&self, parents: &[Option<(u32, Letter)>], mut q: u32) -> usize {
        let mut depth = 0;
        while let Some((p, _)) = parents[q as usize] {
            depth += 1;
            q = p;
        }
        depth
    }

    /// BFS spanning tree from the basepoint in canonical edge order.
    ///
    /// Returns per-state `(parent, letter)` entries (`None` for the
    /// basepoint) and, per generator, the flags of forward edges used by
    /// the tree.
    fn spanning_tree(&self) -> (TreeParents, Vec<Vec<bool>>) {
        let d = self.index();
        let n = self.rank.get();
        let mut parents: TreeParents = vec![None; d];
        let mut seen = vec![false; d];
        let mut tree_edge = vec![vec![false; d]; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0u32]);
        while let Some(q) = queue.pop_front() {
            for (g, tree_row) in tree_edge.iter_mut().enumerate() {
                let fwd = self.forward[g][q as usize];
                if !seen[fwd as usize] {
                    seen[fwd as usize] = true;
                    parents[fwd as usize] = Some((q, Letter::generator(g + 1)));
                    tree_row[q as usize] = true;
                    queue.push_back(fwd);
                }
                let bwd = self.backward[g][q as usize];
                if !seen[bwd as usize] {
                    seen[bwd as usize] = true;
                    parents[bwd as usize] = Some((q, Letter::inverse_generator(g + 1)));
                    // The underlying forward edge is bwd --g--> q.
                    tree_row[bwd as usize] = true;
                    queue.push_back(bwd);
                }
            }
        }
        (parents, tree_edge)
    }

    /// A free basis of the subgroup: one word per non-tree edge of the
    /// Schreier graph, `rep(q) · g · rep(q·g)^{-1}`.
    pub fn schreier_generators(&self) -> Vec<ReducedWord> {
        let reps = self.coset_representatives();
        let (_, tree_edge) = self.spanning_tree();
        let d = self.index();
        let n = self.rank.get();
        let mut gens = Vec::with_capacity(n * d + 1 - d);
        for q in 0..d {
            for (g, (row, tree_row)) in self.forward.iter().zip(&tree_edge).enumerate() {
                if tree_row[q] {
                    continue;
                }
                let target = row[q] as usize;
                let gen = reps[q]
                    .multiply(&ReducedWord::reduce([Letter::generator(g + 1)]))
                    .multiply(&reps[target].inverse());
                debug_assert!(!gen.is_identity());
                gens.push(gen);
            }
        }
        gens
    }

    /// Graphviz rendering: one node per state (basepoint doubled), one
    /// labelled edge per (state, generator), in deterministic order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph subgroup {\n  rankdir=LR;\n");
        for q in 0..self.index() {
            let shape = if q == 0 { "doublecircle" } else { "circle" };
            writeln!(out, "  {q} [shape={shape}];").unwrap();
        }
        for q in 0..self.index() {
            for (g, row) in self.forward.iter().enumerate() {
                let label = Letter::generator(g + 1).to_char();
                writeln!(out, "  {q} -> {} [label=\"{label}\"];", row[q]).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Renumber states canonically (BFS from `base`), validate bijectivity and
/// connectivity, and attach a Schreier generating set as provenance.
fn finalize(rank: Rank, forward: Vec<Vec<u32>>, base: u32) -> Result<SubgroupAutomaton> {
    let n = rank.get();
    let d = forward[0].len();
    debug_assert!(forward.len() == n && forward.iter().all(|row| row.len() == d));

    let mut backward = vec![vec![u32::MAX; d]; n];
    for (fwd_row, bwd_row) in forward.iter().zip(backward.iter_mut()) {
        for (q, &target) in fwd_row.iter().enumerate() {
            let t = target as usize;
            if t >= d || bwd_row[t] != u32::MAX {
                return Err(Error::InvalidArgument(
                    "transition map is not a bijection".to_string(),
                ));
            }
            bwd_row[t] = q as u32;
        }
    }

    // Canonical discovery order: g_1, g_1^{-1}, g_2, g_2^{-1}, ...
    let mut new_id = vec![u32::MAX; d];
    let mut order = Vec::with_capacity(d);
    new_id[base as usize] = 0;
    order.push(base);
    let mut queue = VecDeque::from([base]);
    while let Some(q) = queue.pop_front() {
        for g in 0..n {
            for t in [forward[g][q as usize], backward[g][q as usize]] {
                if new_id[t as usize] == u32::MAX {
                    new_id[t as usize] = order.len() as u32;
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }
    }
    if order.len() != d {
        return Err(Error::InvalidArgument(
            "transition graph is not connected".to_string(),
        ));
    }

    let canon_forward: Vec<Vec<u32>> = (0..n)
        .map(|g| {
            order
                .iter()
                .map(|&old| new_id[forward[g][old as usize] as usize])
                .collect()
        })
        .collect();
    let canon_backward: Vec<Vec<u32>> = (0..n)
        .map(|g| {
            order
                .iter()
                .map(|&old| new_id[backward[g][old as usize] as usize])
                .collect()
        })
        .collect();

    let mut automaton = SubgroupAutomaton {
        rank,
        forward: canon_forward,
        backward: canon_backward,
        generator_words: Vec::new(),
    };
    automaton.generator_words = automaton.schreier_generators();
    Ok(automaton)
}

/// Stallings folding of the wedge of generator loops.
///
/// Returns complete forward tables over the surviving states (basepoint
/// first), or `InfiniteIndex` if some transition is missing after folding.
fn fold_wedge(gens: &[ReducedWord], rank: Rank) -> Result<Vec<Vec<u32>>> {
    let n = rank.get();
    // Each node stores half-edges (slot, target); slot 2g is generator g+1,
    // slot 2g+1 its inverse. Both directions of every edge are recorded.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    let mut parent: Vec<usize> = vec![0];

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let slot_of = |l: Letter| -> usize { (l.index() - 1) * 2 + if l.is_inverse() { 1 } else { 0 } };

    for gen in gens {
        let mut current = 0usize;
        let len = gen.len();
        for (i, &letter) in gen.letters().iter().enumerate() {
            let target = if i + 1 == len {
                0
            } else {
                adj.push(Vec::new());
                parent.push(adj.len() - 1);
                adj.len() - 1
            };
            let s = slot_of(letter);
            adj[current].push((s, target));
            adj[target].push((s ^ 1, current));
            current = target;
        }
    }

    // Fold to a fixpoint: while some live node has two same-slot edges to
    // distinct classes, identify those classes.
    loop {
        let mut changed = false;
        for u in 0..adj.len() {
            if find(&mut parent, u) != u {
                continue;
            }
            let mut list = std::mem::take(&mut adj[u]);
            for e in list.iter_mut() {
                e.1 = find(&mut parent, e.1);
            }
            list.sort_unstable();
            list.dedup();
            let conflict = list
                .windows(2)
                .find(|w| w[0].0 == w[1].0)
                .map(|w| (w[0].1, w[1].1));
            adj[u] = list;
            if let Some((a, b)) = conflict {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                debug_assert_ne!(ra, rb);
                let (win, lose) = if adj[ra].len() >= adj[rb].len() {
                    (ra, rb)
                } else {
                    (rb, ra)
                };
                parent[lose] = win;
                let mut moved = std::mem::take(&mut adj[lose]);
                adj[win].append(&mut moved);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // Collect live nodes, basepoint's class first.
    let base_root = find(&mut parent, 0);
    let mut live: Vec<usize> = (0..adj.len())
        .filter(|&u| find(&mut parent, u) == u)
        .collect();
    live.sort_unstable_by_key(|&u| (u != base_root, u));
    let mut compact = vec![usize::MAX; adj.len()];
    for (i, &u) in live.iter().enumerate() {
        compact[u] = i;
    }

    let d = live.len();
    let mut forward = vec![vec![u32::MAX; d]; n];
    for (i, &u) in live.iter().enumerate() {
        let list = adj[u].clone();
        for (slot, target) in list {
            let t = compact[find(&mut parent, target)] as u32;
            let g = slot / 2;
            let table = if slot % 2 == 0 {
                &mut forward[g][i]
            } else {
                // Reverse half-edge u --g^{-1}--> t is the forward edge t --g--> u.
                &mut forward[g][t as usize]
            };
            let value = if slot % 2 == 0 { t } else { i as u32 };
            debug_assert!(
                *table == u32::MAX || *table == value,
                "unfolded edge survived"
            );
            *table = value;
        }
    }

    if forward.iter().any(|row| row.contains(&u32::MAX)) {
        return Err(Error::InfiniteIndex);
    }
    Ok(forward)
}
