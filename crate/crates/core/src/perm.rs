//! Permutations of `{0..d-1}` and bounded enumeration of the groups they
//! generate.
//!
//! Enumeration is a plain breadth-first closure with an element cap.
//! Incompleteness is data, not an error: callers that reason from an
//! incomplete enumeration get an explicit `complete = false` flag, while a
//! found element is a certificate regardless of completeness.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A bijection on `{0..d-1}`, stored as its image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Permutation {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Build from an image table, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Permutation> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &img in &images {
            if (img as usize) >= d || seen[img as usize] {
                return Err(Error::InvalidArgument(format!(
                    "image table {images:?} is not a bijection on 0..{d}"
                )));
            }
            seen[img as usize] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from a list of cycles, e.g. `from_cycles(4, &[&[0, 1], &[2, 3]])`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Permutation> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (pos, &v) in cycle.iter().enumerate() {
                if v as usize >= degree {
                    return Err(Error::InvalidArgument(format!(
                        "cycle point {v} out of range for degree {degree}"
                    )));
                }
                images[v as usize] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: u32) -> u32 {
        self.images[point as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// `self` followed by `other`: `(self.then(other))(x) = other(self(x))`.
    ///
    /// With this orientation the coset action of a word is the `then`-product
    /// of its letters' permutations, read left to right.
    pub fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self
                .images
                .iter()
                .map(|&x| other.images[x as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (x, &y) in self.images.iter().enumerate() {
            images[y as usize] = x as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Length of the cycle through `point`: the least `m >= 1` with
    /// `self^m(point) = point`.
    pub fn cycle_length_at(&self, point: u32) -> usize {
        let mut cur = self.apply(point);
        let mut len = 1;
        while cur != point {
            cur = self.apply(cur);
            len += 1;
        }
        len
    }

    /// Longest cycle length anywhere in the permutation.
    pub fn max_cycle_length(&self) -> usize {
        let mut seen = vec![false; self.degree()];
        let mut best = 0;
        for start in 0..self.degree() as u32 {
            if !seen[start as usize] {
                let mut cur = start;
                let mut len = 0;
                loop {
                    seen[cur as usize] = true;
                    len += 1;
                    cur = self.apply(cur);
                    if cur == start {
                        break;
                    }
                }
                best = best.max(len);
            }
        }
        best
    }

    /// True when the permutation is a single cycle through all `d` points.
    pub fn is_full_cycle(&self) -> bool {
        self.degree() > 0 && self.cycle_length_at(0) == self.degree()
    }

    /// Cycle decomposition; each cycle starts at its least point, cycles
    /// ordered by least point, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() as u32 {
            if !seen[start as usize] && self.apply(start) != start {
                let mut cycle = Vec::new();
                let mut cur = start;
                loop {
                    seen[cur as usize] = true;
                    cycle.push(cur);
                    cur = self.apply(cur);
                    if cur == start {
                        break;
                    }
                }
                out.push(cycle);
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("id");
        }
        for cycle in cycles {
            f.write_str("(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Result of a bounded closure: the elements found, in breadth-first
/// discovery order, and whether the closure finished under the cap.
#[derive(Debug, Clone)]
pub struct GroupEnumeration {
    pub elements: Vec<Permutation>,
    pub complete: bool,
    pub cap: usize,
}

impl GroupEnumeration {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Breadth-first closure of the group generated by `gens`, capped at `cap`
/// elements. In a finite group the multiplicative closure of a generating
/// set already contains all inverses, so only the given generators are
/// multiplied.
pub fn enumerate_group(gens: &[Permutation], cap: usize) -> GroupEnumeration {
    let degree = gens.first().map_or(0, Permutation::degree);
    debug_assert!(gens.iter().all(|g| g.degree() == degree));

    let id = Permutation::identity(degree);
    let mut elements = vec![id.clone()];
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    let mut complete = true;

    'bfs: while let Some(cur) = queue.pop_front() {
        for g in gens {
            let next = cur.then(g);
            if !seen.contains(&next) {
                if elements.len() >= cap {
                    complete = false;
                    break 'bfs;
                }
                seen.insert(next.clone());
                elements.push(next.clone());
                queue.push_back(next);
            }
        }
    }

    GroupEnumeration {
        elements,
        complete,
        cap,
    }
}

/// Outcome of looking for a full `d`-cycle in an enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CycleSearch {
    /// A full cycle was found; the element is a certificate even when the
    /// enumeration is incomplete.
    Found(Permutation),
    /// The enumeration is complete and contains no full cycle.
    Absent,
    /// Incomplete enumeration with no witness: no verdict.
    Unknown,
}

/// Look for a permutation that is a single `d`-cycle.
pub fn has_full_cycle(enumeration: &GroupEnumeration, d: usize) -> CycleSearch {
    for p in &enumeration.elements {
        if p.degree() == d && p.is_full_cycle() {
            return CycleSearch::Found(p.clone());
        }
    }
    if enumeration.complete {
        CycleSearch::Absent
    } else {
        CycleSearch::Unknown
    }
}

/// Maximum cycle length over all enumerated elements of all groups, with an
/// exactness flag that is the conjunction of the completeness flags.
pub fn max_cycle_length(groups: &[GroupEnumeration]) -> (usize, bool) {
    let mut best = 0;
    let mut exact = true;
    for g in groups {
        exact &= g.complete;
        for p in &g.elements {
            best = best.max(p.max_cycle_length());
        }
    }
    (best, exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cyc(d: usize, cycles: &[&[u32]]) -> Permutation {
        Permutation::from_cycles(d, cycles).unwrap()
    }

    #[test]
    fn cycle_length_examples() {
        assert_eq!(cyc(3, &[&[0, 1, 2]]).cycle_length_at(0), 3);
        assert_eq!(Permutation::identity(5).cycle_length_at(3), 1);
        let p = cyc(5, &[&[0, 1], &[2, 3, 4]]);
        assert_eq!(p.cycle_length_at(2), 3);
        assert_eq!(p.max_cycle_length(), 3);
    }

    #[test]
    fn from_images_rejects_non_bijections() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_images(vec![2, 0]).is_err());
        assert!(Permutation::from_images(vec![1, 0]).is_ok());
    }

    #[test]
    fn enumerate_cyclic_group() {
        let e = enumerate_group(&[cyc(3, &[&[0, 1, 2]])], 100);
        assert_eq!(e.order(), 3);
        assert!(e.complete);
    }

    #[test]
    fn enumerate_symmetric_group_on_three_points() {
        let e = enumerate_group(&[cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])], 100);
        assert_eq!(e.order(), 6);
        assert!(e.complete);
    }

    #[test]
    fn enumeration_respects_cap() {
        // A transposition and an 8-cycle generate all of S_8.
        let gens = [cyc(8, &[&[0, 1]]), cyc(8, &[&[0, 1, 2, 3, 4, 5, 6, 7]])];
        let e = enumerate_group(&gens, 100);
        assert!(!e.complete);
        assert!(e.order() <= 100);
    }

    #[test]
    fn full_cycle_search() {
        let cyclic = enumerate_group(&[cyc(3, &[&[0, 1, 2]])], 100);
        assert!(matches!(has_full_cycle(&cyclic, 3), CycleSearch::Found(_)));

        let klein = enumerate_group(&[cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])], 100);
        assert!(klein.complete);
        assert_eq!(klein.order(), 4);
        assert_eq!(has_full_cycle(&klein, 4), CycleSearch::Absent);

        let capped = enumerate_group(&[cyc(4, &[&[0, 1]]), cyc(4, &[&[2, 3]])], 2);
        assert_eq!(has_full_cycle(&capped, 4), CycleSearch::Unknown);
    }

    #[test]
    fn max_cycle_length_over_groups() {
        let a = enumerate_group(&[cyc(2, &[&[0, 1]])], 10);
        let b = enumerate_group(&[cyc(3, &[&[0, 1, 2]])], 10);
        assert_eq!(max_cycle_length(&[a.clone(), b.clone()]), (3, true));

        let s3 = enumerate_group(&[cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])], 100);
        assert_eq!(max_cycle_length(&[s3]), (3, true));

        let capped = enumerate_group(&[cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])], 2);
        let (_, exact) = max_cycle_length(&[a, capped]);
        assert!(!exact);
    }

    #[test]
    fn transitive_groups_transfer_cycles_through_every_point() {
        // In a transitive group, conjugation carries any cycle through any
        // point, so the maximum cycle length seen at a fixed point equals
        // the maximum anywhere. Exhaustive over a catalog of transitive
        // groups of degree <= 6.
        let catalog: Vec<Vec<Permutation>> = vec![
            vec![cyc(3, &[&[0, 1, 2]])],
            vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[0, 1, 2]])],
            vec![cyc(4, &[&[0, 1, 2, 3]])],
            vec![cyc(4, &[&[0, 1], &[2, 3]]), cyc(4, &[&[0, 2], &[1, 3]])],
            vec![cyc(4, &[&[0, 1, 2, 3]]), cyc(4, &[&[0, 2]])],
            vec![cyc(4, &[&[0, 1, 2]]), cyc(4, &[&[1, 2, 3]])],
            vec![cyc(4, &[&[0, 1]]), cyc(4, &[&[0, 1, 2, 3]])],
            vec![cyc(5, &[&[0, 1, 2, 3, 4]])],
            vec![cyc(5, &[&[0, 1]]), cyc(5, &[&[0, 1, 2, 3, 4]])],
            vec![cyc(6, &[&[0, 1, 2, 3, 4, 5]])],
            vec![cyc(6, &[&[0, 1, 2, 3, 4, 5]]), cyc(6, &[&[1, 5], &[2, 4]])],
            vec![cyc(6, &[&[0, 1]]), cyc(6, &[&[0, 1, 2, 3, 4, 5]])],
        ];
        for gens in catalog {
            let d = gens[0].degree();
            let e = enumerate_group(&gens, 1000);
            assert!(e.complete, "catalog groups fit the cap");
            let (group_max, exact) = max_cycle_length(std::slice::from_ref(&e));
            assert!(exact);
            for v in 0..d as u32 {
                let at_v = e
                    .elements
                    .iter()
                    .map(|p| p.cycle_length_at(v))
                    .max()
                    .unwrap();
                assert_eq!(at_v, group_max, "degree {d}, point {v}");
            }
            // Order divisibility: |T| divides d! and d divides |T|.
            let factorial: usize = (1..=d).product();
            assert_eq!(factorial % e.order(), 0);
            assert_eq!(e.order() % d, 0);
        }
    }

    fn arb_perm(d: usize) -> impl Strategy<Value = Permutation> {
        // Shuffle driven by a vector of raw draws, keeping the strategy
        // independent of any particular Rng API.
        prop::collection::vec(any::<u64>(), d).prop_map(move |draws| {
            let mut images: Vec<u32> = (0..d as u32).collect();
            for i in (1..d).rev() {
                let j = (draws[i] % (i as u64 + 1)) as usize;
                images.swap(i, j);
            }
            Permutation { images }
        })
    }

    proptest! {
        #[test]
        fn compose_and_invert(a in arb_perm(7), b in arb_perm(7), x in 0u32..7) {
            prop_assert_eq!(a.then(&b).apply(x), b.apply(a.apply(x)));
            prop_assert!(a.then(&a.inverse()).is_identity());
            prop_assert_eq!(a.inverse().inverse(), a);
        }

        #[test]
        fn cycle_length_divides_into_identity(a in arb_perm(9), x in 0u32..9) {
            let m = a.cycle_length_at(x);
            let mut cur = x;
            for _ in 0..m {
                cur = a.apply(cur);
            }
            prop_assert_eq!(cur, x);
            prop_assert!((1..=9).contains(&m));
        }
    }
}
