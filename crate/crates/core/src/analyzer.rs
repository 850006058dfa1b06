//! Sufficient-condition analyzers for coset-partition multiplicity.
//!
//! Three families of checks run on a verified partition:
//!
//! - `theorem1`: a full `d_s`-cycle in the transition group of the
//!   largest-index part forces that index to repeat at least `p` times,
//!   `p` the least prime dividing `d_s`.
//! - `theorem2`: four conditions (i)-(iv) over the invariants `k` (largest
//!   cycle length across all transition groups), `p` (least prime dividing
//!   `k`) and `#` (how many parts a witness element moves with full cycle
//!   length `k`). Any of them holding forces multiplicity.
//! - neighborhood transfer: a partition satisfying one of the conditions
//!   carries it to every partition within an explicit metric radius.
//!
//! Verdicts are honest under bounded enumeration: `Holds` always carries a
//! certificate that re-verifies without enumeration, `Unknown` means the
//! caps ran out before a verdict, and `Fails` is only reported from
//! complete evidence.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::{CosetPartition, Distance};
use crate::search::{search_witnesses, MarkedAutomaton, TransitionGroup, WitnessTuple};
use crate::word::ReducedWord;

/// Default ceiling for group enumerations and witness searches.
pub const DEFAULT_CAP: usize = 1_000_000;

/// How to scope the ambiguous disjunction in condition (iv).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IvReading {
    /// `k > d_{s-r} AND (p >= r OR # = p OR # >= r+1)` — the default.
    Conjunctive,
    /// `(k > d_{s-r} AND p >= r) OR # = p OR # >= r+1`.
    Disjunctive,
}

impl IvReading {
    pub fn label(self) -> &'static str {
        match self {
            IvReading::Conjunctive => "iv-a",
            IvReading::Disjunctive => "iv-b",
        }
    }

    pub fn parse(text: &str) -> Result<IvReading> {
        match text {
            "iv-a" => Ok(IvReading::Conjunctive),
            "iv-b" => Ok(IvReading::Disjunctive),
            other => Err(Error::InvalidArgument(format!(
                "unknown reading {other:?} (expected iv-a or iv-b)"
            ))),
        }
    }
}

/// Options shared by the analyzers.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub cap: usize,
    pub r: usize,
    pub reading: IvReading,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            cap: DEFAULT_CAP,
            r: 2,
            reading: IvReading::Conjunctive,
        }
    }
}

/// A machine-checkable piece of evidence behind a `Holds` verdict.
#[derive(Debug, Clone)]
pub enum Certificate {
    /// `word` acts on part `part` (0-based canonical position) with a cycle
    /// of length `length`.
    Cycle {
        part: usize,
        word: ReducedWord,
        length: usize,
    },
    /// A product-group element attaining `o_max = k` on `sharp` parts.
    Witness {
        word: ReducedWord,
        cycle_lengths: Vec<usize>,
        sharp: usize,
    },
}

impl Certificate {
    /// Re-verify the certified fact directly from the word, with no
    /// enumeration involved.
    pub fn reverify(&self, partition: &CosetPartition) -> bool {
        match self {
            Certificate::Cycle { part, word, length } => {
                let Some(pair) = partition.pairs().get(*part) else {
                    return false;
                };
                pair.subgroup().word_permutation(word).max_cycle_length() == *length
            }
            Certificate::Witness {
                word,
                cycle_lengths,
                sharp,
            } => {
                if cycle_lengths.len() != partition.part_count() {
                    return false;
                }
                let computed: Vec<usize> = partition
                    .pairs()
                    .iter()
                    .map(|p| {
                        p.subgroup()
                            .word_permutation(word)
                            .cycle_length_at(p.marked_vertex())
                    })
                    .collect();
                let k = computed.iter().copied().max().unwrap_or(1);
                computed == *cycle_lengths && computed.iter().filter(|&&o| o == k).count() == *sharp
            }
        }
    }
}

/// Verdict of the full-cycle condition on the top part.
#[derive(Debug, Clone)]
pub enum Theorem1Verdict {
    /// A `d_s`-cycle exists in the top transition group; carries the word
    /// realizing it and the verified consequence data.
    Holds {
        /// Word acting as a full cycle on the top part's cosets.
        certificate: ReducedWord,
        /// The top index `d_s`.
        top_index: usize,
        /// Number of parts of index `d_s`.
        count_top: usize,
        /// Least prime dividing `d_s`.
        p: usize,
    },
    /// Complete enumeration found no full cycle.
    Fails,
    /// Enumeration hit the cap without finding one.
    Unknown,
}

impl Theorem1Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Theorem1Verdict::Holds { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Theorem1Verdict::Holds { .. } => "holds",
            Theorem1Verdict::Fails => "fails",
            Theorem1Verdict::Unknown => "unknown",
        }
    }
}

/// The invariants `k`, `p` and the achieved `#` values of a partition.
#[derive(Debug, Clone)]
pub struct KPSharp {
    /// Largest cycle length found across the transition groups of all
    /// parts; a lower bound when `k_exact` is false.
    pub k: usize,
    /// All transition-group enumerations completed.
    pub k_exact: bool,
    /// Least prime dividing `k`; `None` in the degenerate `k = 1` case.
    pub p: Option<usize>,
    /// Values `#(u)` achieved by found witnesses.
    pub sharp_values: std::collections::BTreeSet<usize>,
    /// Enumerations complete and the witness search closed the product
    /// group, so `sharp_values` is the full set.
    pub exhaustive: bool,
    /// A word realizing a cycle of length `k`, with its part.
    pub k_certificate: Option<(usize, ReducedWord)>,
    /// First witness found for each achieved `#` value.
    pub sharp_witnesses: BTreeMap<usize, WitnessTuple>,
    /// Largest marked-vertex cycle length over explored product elements:
    /// the second route to `k`.
    pub k_marked: usize,
    /// The witness search visited the whole product group.
    pub marked_exact: bool,
}

/// Per-condition outcome of the theorem-2 evaluation.
#[derive(Debug, Clone)]
pub enum ConditionVerdict {
    Holds(Vec<Certificate>),
    Fails,
    Unknown,
    /// The condition refers to a part the partition does not have
    /// (for example `d_{s-3}` with s = 3).
    NotApplicable,
}

impl ConditionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, ConditionVerdict::Holds(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            ConditionVerdict::Holds(_) => "holds",
            ConditionVerdict::Fails => "fails",
            ConditionVerdict::Unknown => "unknown",
            ConditionVerdict::NotApplicable => "not-applicable",
        }
    }
}

/// The four theorem-2 condition verdicts for a given `r` and reading.
#[derive(Debug, Clone)]
pub struct Theorem2Report {
    pub r: usize,
    pub reading: IvReading,
    pub i: ConditionVerdict,
    pub ii: ConditionVerdict,
    pub iii: ConditionVerdict,
    pub iv: ConditionVerdict,
}

impl Theorem2Report {
    pub fn conditions(&self) -> [(&'static str, &ConditionVerdict); 4] {
        [
            ("i", &self.i),
            ("ii", &self.ii),
            ("iii", &self.iii),
            ("iv", &self.iv),
        ]
    }

    pub fn any_holds(&self) -> bool {
        self.conditions().iter().any(|(_, v)| v.holds())
    }
}

/// Aggregated analysis of one partition.
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub rank: usize,
    pub part_count: usize,
    /// Ascending indices `d_1 <= ... <= d_s`.
    pub indices: Vec<usize>,
    /// One summary line per part in canonical order: index,
    /// representative, generating set.
    pub part_echo: Vec<String>,
    pub is_partition: bool,
    pub cover_witness: Option<String>,
    pub multiplicity: bool,
    pub theorem1: Option<Theorem1Verdict>,
    pub kps: Option<KPSharp>,
    pub theorem2: Option<Theorem2Report>,
    /// `(condition label, radius exponent m)` claims: any partition within
    /// `2^-m` of this one inherits the condition (or at least
    /// multiplicity, for (iii)/(iv)).
    pub neighborhood_radii: Vec<(String, u32)>,
    pub cap: usize,
}

/// Three-valued truth for condition terms under bounded evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tri {
    True,
    False,
    Unknown,
}

impl Tri {
    fn and(self, other: Tri) -> Tri {
        use Tri::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Unknown,
        }
    }

    fn or(self, other: Tri) -> Tri {
        use Tri::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Unknown,
        }
    }
}

fn least_prime_factor(n: usize) -> Option<usize> {
    if n < 2 {
        return None;
    }
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return Some(f);
        }
        f += 1;
    }
    Some(n)
}

/// Full-cycle condition on the canonical top part.
///
/// `Holds` requires a certificate word; when it fires, the forced
/// consequence (the top index appears at least `p` times) is asserted
/// outright, since its failure would falsify either the theorem or this
/// implementation.
pub fn check_theorem1(partition: &CosetPartition, cap: usize) -> Theorem1Verdict {
    let top = &partition.pairs()[0];
    let d_s = top.index();
    if d_s == 1 {
        // Trivial one-coset partition: the condition is about nontrivial
        // indices, so it never fires.
        return Theorem1Verdict::Fails;
    }
    let group = TransitionGroup::enumerate(top.subgroup(), cap);
    match group.find_full_cycle() {
        Some((word, _)) => {
            let count_top = partition
                .pairs()
                .iter()
                .filter(|p| p.index() == d_s)
                .count();
            let p = least_prime_factor(d_s).expect("d_s >= 2 has a prime factor");
            assert!(
                count_top >= p,
                "full-cycle condition fired but index {d_s} appears only {count_top} < {p} times"
            );
            Theorem1Verdict::Holds {
                certificate: word.clone(),
                top_index: d_s,
                count_top,
                p,
            }
        }
        None if group.complete => Theorem1Verdict::Fails,
        None => Theorem1Verdict::Unknown,
    }
}

/// Compute `k`, `p` and the achieved `#` values.
pub fn compute_kp_sharp(partition: &CosetPartition, cap: usize) -> KPSharp {
    // Enumerate each distinct transition group once.
    let mut unique: Vec<(usize, &crate::automaton::SubgroupAutomaton)> = Vec::new();
    for (i, pair) in partition.pairs().iter().enumerate() {
        if !unique
            .iter()
            .any(|(_, u)| u.canonical_form() == *pair.form())
        {
            unique.push((i, pair.subgroup()));
        }
    }
    let groups: Vec<TransitionGroup> = unique
        .iter()
        .map(|(_, u)| TransitionGroup::enumerate(u, cap))
        .collect();

    let mut k = 0usize;
    let mut k_exact = true;
    let mut k_certificate: Option<(usize, ReducedWord)> = None;
    for ((part, _), group) in unique.iter().zip(&groups) {
        k_exact &= group.complete;
        if let Some((len, word)) = group.max_cycle() {
            if len > k {
                k = len;
                k_certificate = Some((*part, word.clone()));
            }
        }
    }

    let parts: Vec<MarkedAutomaton<'_>> = partition
        .pairs()
        .iter()
        .map(|p| MarkedAutomaton {
            automaton: p.subgroup(),
            marked: p.marked_vertex(),
        })
        .collect();
    let found = search_witnesses(&parts, k, cap);

    let mut sharp_values = std::collections::BTreeSet::new();
    let mut sharp_witnesses = BTreeMap::new();
    for witness in found.witnesses {
        sharp_values.insert(witness.sharp);
        sharp_witnesses.entry(witness.sharp).or_insert(witness);
    }

    KPSharp {
        k,
        k_exact,
        p: least_prime_factor(k),
        sharp_values,
        exhaustive: k_exact && found.exhaustive,
        k_certificate,
        sharp_witnesses,
        k_marked: found.max_marked_cycle,
        marked_exact: found.exhaustive,
    }
}

struct ConditionBuilder<'a> {
    partition: &'a CosetPartition,
    kps: &'a KPSharp,
}

impl<'a> ConditionBuilder<'a> {
    /// The index at canonical place `m` (1-based): `d_{s-(m-1)}` in
    /// ascending notation. `None` when the partition is too short.
    fn index_at_place(&self, place: usize) -> Option<usize> {
        self.partition.pairs().get(place - 1).map(|p| p.index())
    }

    /// `k > d` with lower-bound semantics: an inexact `k` can still prove
    /// the strict inequality, never refute it.
    fn k_gt(&self, d: usize, certs: &mut Vec<Certificate>) -> Tri {
        if self.kps.k > d {
            if let Some((part, word)) = &self.kps.k_certificate {
                certs.push(Certificate::Cycle {
                    part: *part,
                    word: word.clone(),
                    length: self.kps.k,
                });
            }
            Tri::True
        } else if self.kps.k_exact {
            Tri::False
        } else {
            Tri::Unknown
        }
    }

    /// `p >= bound`; meaningless without an exact `k`.
    fn p_ge(&self, bound: usize) -> Tri {
        if !self.kps.k_exact {
            return Tri::Unknown;
        }
        match self.kps.p {
            Some(p) if p >= bound => Tri::True,
            Some(_) => Tri::False,
            None => Tri::Unknown,
        }
    }

    fn p_eq(&self, value: usize) -> Tri {
        if !self.kps.k_exact {
            return Tri::Unknown;
        }
        match self.kps.p {
            Some(p) if p == value => Tri::True,
            Some(_) => Tri::False,
            None => Tri::Unknown,
        }
    }

    /// Existential `#(u) = value`. A found witness certifies it even if the
    /// search was capped; refutation needs exhaustiveness.
    fn sharp_eq(&self, value: usize, certs: &mut Vec<Certificate>) -> Tri {
        if !self.kps.k_exact {
            return Tri::Unknown;
        }
        if self.kps.sharp_values.contains(&value) {
            if let Some(wt) = self.kps.sharp_witnesses.get(&value) {
                certs.push(Certificate::Witness {
                    word: wt.word.clone(),
                    cycle_lengths: wt.cycle_lengths.clone(),
                    sharp: wt.sharp,
                });
            }
            Tri::True
        } else if self.kps.exhaustive {
            Tri::False
        } else {
            Tri::Unknown
        }
    }

    fn sharp_ge(&self, bound: usize, certs: &mut Vec<Certificate>) -> Tri {
        if !self.kps.k_exact {
            return Tri::Unknown;
        }
        if let Some(&value) = self.kps.sharp_values.iter().next_back() {
            if value >= bound {
                if let Some(wt) = self.kps.sharp_witnesses.get(&value) {
                    certs.push(Certificate::Witness {
                        word: wt.word.clone(),
                        cycle_lengths: wt.cycle_lengths.clone(),
                        sharp: wt.sharp,
                    });
                }
                return Tri::True;
            }
        }
        if self.kps.exhaustive {
            Tri::False
        } else {
            Tri::Unknown
        }
    }

    fn verdict(&self, tri: Tri, certs: Vec<Certificate>) -> ConditionVerdict {
        match tri {
            Tri::True => ConditionVerdict::Holds(certs),
            Tri::False => ConditionVerdict::Fails,
            Tri::Unknown => ConditionVerdict::Unknown,
        }
    }
}

/// Evaluate conditions (i)-(iv) for the given `r` (which only (iv) uses).
///
/// Any condition reported `Holds` triggers a hard multiplicity assertion:
/// the conditions are sufficient, so a verified partition satisfying one
/// without multiplicity would falsify theorem or implementation.
pub fn check_theorem2(
    partition: &CosetPartition,
    kps: &KPSharp,
    r: usize,
    reading: IvReading,
) -> Result<Theorem2Report> {
    let s = partition.part_count();
    if r < 2 || r + 1 > s {
        return Err(Error::InvalidArgument(format!(
            "r must satisfy 2 <= r <= s-1 = {}, got {r}",
            s.saturating_sub(1)
        )));
    }
    let b = ConditionBuilder { partition, kps };

    // (i): k > d_{s-2}, the index at canonical place 3.
    let i = match b.index_at_place(3) {
        Some(d) => {
            let mut certs = Vec::new();
            let tri = b.k_gt(d, &mut certs);
            b.verdict(tri, certs)
        }
        None => ConditionVerdict::NotApplicable,
    };

    // (ii): k > d_{s-3} and p >= 3.
    let ii = match b.index_at_place(4) {
        Some(d) => {
            let mut certs = Vec::new();
            let tri = b.k_gt(d, &mut certs).and(b.p_ge(3));
            b.verdict(tri, certs)
        }
        None => ConditionVerdict::NotApplicable,
    };

    // (iii): k > d_{s-3}, p = 2, and # = 2 or # >= 4.
    let iii = match b.index_at_place(4) {
        Some(d) => {
            let mut certs = Vec::new();
            let tri = b
                .k_gt(d, &mut certs)
                .and(b.p_eq(2))
                .and(b.sharp_eq(2, &mut certs).or(b.sharp_ge(4, &mut certs)));
            b.verdict(tri, certs)
        }
        None => ConditionVerdict::NotApplicable,
    };

    // (iv): over d_{s-r}, the index at place r+1.
    let iv = match b.index_at_place(r + 1) {
        Some(d) => {
            let mut certs = Vec::new();
            let p_for_sharp = kps.p.unwrap_or(0);
            let tri = match reading {
                IvReading::Conjunctive => b.k_gt(d, &mut certs).and(
                    b.p_ge(r)
                        .or(b.sharp_eq(p_for_sharp, &mut certs))
                        .or(b.sharp_ge(r + 1, &mut certs)),
                ),
                IvReading::Disjunctive => b
                    .k_gt(d, &mut certs)
                    .and(b.p_ge(r))
                    .or(b.sharp_eq(p_for_sharp, &mut certs))
                    .or(b.sharp_ge(r + 1, &mut certs)),
            };
            b.verdict(tri, certs)
        }
        None => ConditionVerdict::NotApplicable,
    };

    let report = Theorem2Report {
        r,
        reading,
        i,
        ii,
        iii,
        iv,
    };
    if report.any_holds() {
        assert!(
            partition.multiplicity(),
            "a sufficient condition fired on a partition without multiplicity"
        );
    }
    Ok(report)
}

/// Radius exponents within which each certified condition transfers.
///
/// Conditions (i)-(iii) have fixed effective `r` (2 for (i), 3 for the
/// others); (iv) uses the `r` it was checked with. The full-cycle condition
/// transfers within `2^-1`.
fn neighborhood_claims(
    theorem1: &Theorem1Verdict,
    theorem2: Option<&Theorem2Report>,
) -> Vec<(String, u32)> {
    let mut out = Vec::new();
    if theorem1.holds() {
        out.push(("theorem1".to_string(), 1));
    }
    if let Some(t2) = theorem2 {
        for (name, verdict, r_eff) in [
            ("theorem2_i", &t2.i, 2usize),
            ("theorem2_ii", &t2.ii, 3),
            ("theorem2_iii", &t2.iii, 3),
            ("theorem2_iv", &t2.iv, t2.r),
        ] {
            if verdict.holds() {
                out.push((name.to_string(), r_eff as u32 + 1));
            }
        }
    }
    out
}

/// Run every analyzer on one partition and aggregate the report.
///
/// The partition is verified first; on an invalid partition the
/// theorem-level fields stay empty.
pub fn analyze(partition: &CosetPartition, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    let verification = partition.verify()?;
    let part_echo = partition
        .pairs()
        .iter()
        .map(|pair| {
            let gens: Vec<String> = pair
                .subgroup()
                .generator_words()
                .iter()
                .map(|g| g.surface())
                .collect();
            format!(
                "d={} rep={} gens={}",
                pair.index(),
                pair.representative(),
                gens.join(" ")
            )
        })
        .collect();
    let mut report = AnalysisReport {
        rank: partition.rank().get(),
        part_count: partition.part_count(),
        indices: partition.indices_ascending(),
        part_echo,
        is_partition: verification.is_partition,
        cover_witness: verification.witness_word().map(|w| w.surface()),
        multiplicity: partition.multiplicity(),
        theorem1: None,
        kps: None,
        theorem2: None,
        neighborhood_radii: Vec::new(),
        cap: opts.cap,
    };
    if !verification.is_partition {
        return Ok(report);
    }

    let theorem1 = check_theorem1(partition, opts.cap);
    let kps = compute_kp_sharp(partition, opts.cap);
    if kps.k_exact && kps.marked_exact {
        assert_eq!(
            kps.k, kps.k_marked,
            "the two routes to k disagree on a complete enumeration"
        );
    }
    let theorem2 = if partition.part_count() >= 3 && opts.r < partition.part_count() {
        Some(check_theorem2(partition, &kps, opts.r, opts.reading)?)
    } else {
        None
    };
    report.neighborhood_radii = neighborhood_claims(&theorem1, theorem2.as_ref());
    report.theorem1 = Some(theorem1);
    report.kps = Some(kps);
    report.theorem2 = theorem2;
    Ok(report)
}

impl AnalysisReport {
    /// Machine-readable `field = value` lines in a stable order.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let mut push = |key: &str, value: String| {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        };
        push("rank", self.rank.to_string());
        push("parts", self.part_count.to_string());
        push(
            "indices",
            self.indices
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        for (i, line) in self.part_echo.iter().enumerate() {
            push(&format!("part_{}", i + 1), line.clone());
        }
        push("is_partition", self.is_partition.to_string());
        push(
            "cover_witness",
            self.cover_witness
                .clone()
                .unwrap_or_else(|| "-".to_string()),
        );
        push("multiplicity", self.multiplicity.to_string());
        push("cap", self.cap.to_string());

        match &self.theorem1 {
            Some(v) => {
                push("theorem1", v.label().to_string());
                if let Theorem1Verdict::Holds {
                    certificate,
                    top_index,
                    count_top,
                    p,
                } = v
                {
                    push("theorem1_certificate", certificate.surface());
                    push("theorem1_top_index", top_index.to_string());
                    push("theorem1_count_top", count_top.to_string());
                    push("theorem1_p", p.to_string());
                }
            }
            None => push("theorem1", "not-applicable".to_string()),
        }

        match &self.kps {
            Some(kps) => {
                push("k", kps.k.to_string());
                push("k_exact", kps.k_exact.to_string());
                push(
                    "p",
                    kps.p.map_or_else(|| "none".to_string(), |p| p.to_string()),
                );
                push(
                    "sharp_values",
                    if kps.sharp_values.is_empty() {
                        "-".to_string()
                    } else {
                        kps.sharp_values
                            .iter()
                            .map(|v| v.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    },
                );
                push("sharp_exhaustive", kps.exhaustive.to_string());
                push("k_marked", kps.k_marked.to_string());
            }
            None => {
                push("k", "not-applicable".to_string());
            }
        }

        match &self.theorem2 {
            Some(t2) => {
                push("r", t2.r.to_string());
                push("reading", t2.reading.label().to_string());
                for (name, verdict) in t2.conditions() {
                    push(&format!("theorem2_{name}"), verdict.label().to_string());
                    if let ConditionVerdict::Holds(certs) = verdict {
                        for (ci, cert) in certs.iter().enumerate() {
                            let text = match cert {
                                Certificate::Cycle { part, word, length } => {
                                    format!("cycle part={part} word={word} length={length}")
                                }
                                Certificate::Witness { word, sharp, .. } => {
                                    format!("witness word={word} sharp={sharp}")
                                }
                            };
                            push(&format!("theorem2_{name}_certificate_{ci}"), text);
                        }
                    }
                }
            }
            None => push("theorem2", "not-applicable".to_string()),
        }

        if self.neighborhood_radii.is_empty() {
            push("neighborhood", "-".to_string());
        } else {
            for (condition, exponent) in &self.neighborhood_radii {
                push(
                    &format!("neighborhood_{condition}"),
                    format!("2^-{exponent}"),
                );
            }
        }
        out
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "partition of F_{} with {} parts, indices {:?}",
            self.rank, self.part_count, self.indices
        )?;
        for (i, line) in self.part_echo.iter().enumerate() {
            writeln!(f, "  part {}: {line}", i + 1)?;
        }
        if !self.is_partition {
            writeln!(f, "NOT a partition")?;
            if let Some(witness) = &self.cover_witness {
                writeln!(f, "  cover violation at word {witness}")?;
            }
            return Ok(());
        }
        writeln!(f, "multiplicity: {}", self.multiplicity)?;
        if let Some(t1) = &self.theorem1 {
            writeln!(f, "full-cycle condition (theorem 1): {}", t1.label())?;
        }
        if let Some(kps) = &self.kps {
            writeln!(
                f,
                "k = {}{}, p = {}, # values {:?}{}",
                kps.k,
                if kps.k_exact { "" } else { " (lower bound)" },
                kps.p.map_or_else(|| "none".to_string(), |p| p.to_string()),
                kps.sharp_values,
                if kps.exhaustive {
                    ""
                } else {
                    " (not exhaustive)"
                },
            )?;
        }
        if let Some(t2) = &self.theorem2 {
            writeln!(
                f,
                "theorem 2 (r = {}, reading {}): i {}, ii {}, iii {}, iv {}",
                t2.r,
                t2.reading.label(),
                t2.i.label(),
                t2.ii.label(),
                t2.iii.label(),
                t2.iv.label()
            )?;
        }
        for (condition, exponent) in &self.neighborhood_radii {
            writeln!(
                f,
                "neighborhood: {condition} transfers within 2^-{exponent}"
            )?;
        }
        Ok(())
    }
}

/// How a transfer claim fared on a corpus partner.
#[derive(Debug, Clone)]
pub enum TransferOutcome {
    Transferred,
    Falsified { detail: String },
}

impl TransferOutcome {
    pub fn ok(&self) -> bool {
        matches!(self, TransferOutcome::Transferred)
    }
}

/// Transfer checks against one corpus member.
#[derive(Debug, Clone)]
pub struct NeighborhoodFinding {
    /// Position of the partner in the corpus slice.
    pub corpus_index: usize,
    pub distance: Distance,
    /// `(condition, radius exponent, outcome)` for every claim whose radius
    /// covered the partner.
    pub claims: Vec<(String, u32, TransferOutcome)>,
}

/// Check the neighborhood statements of a certified base partition against
/// a corpus.
///
/// For each corpus partition inside a claimed radius the transferred fact
/// is re-established directly: the full-cycle certificate word is replayed
/// on the partner's top part, `k > d` certificates are replayed on the
/// shared places, and multiplicity is recomputed. Any failure is reported
/// as a falsifying instance rather than asserted away.
pub fn check_neighborhood(
    base: &CosetPartition,
    corpus: &[CosetPartition],
    opts: &AnalyzeOptions,
) -> Result<Vec<NeighborhoodFinding>> {
    let theorem1 = check_theorem1(base, opts.cap);
    let kps = compute_kp_sharp(base, opts.cap);
    let theorem2 = if base.part_count() >= 3 && opts.r < base.part_count() {
        Some(check_theorem2(base, &kps, opts.r, opts.reading)?)
    } else {
        None
    };

    let mut findings = Vec::new();
    for (corpus_index, partner) in corpus.iter().enumerate() {
        let distance = base.distance(partner);
        let mut claims = Vec::new();

        if let Theorem1Verdict::Holds {
            certificate,
            top_index,
            p,
            ..
        } = &theorem1
        {
            if distance.less_than_dyadic(1) {
                claims.push((
                    "theorem1".to_string(),
                    1,
                    transfer_theorem1(partner, certificate, *top_index),
                ));
                // Derived bound: both partitions repeat the top index at
                // least p times, so they agree through place p.
                let outcome = if distance.at_most_dyadic(*p as u32 + 1) {
                    TransferOutcome::Transferred
                } else {
                    TransferOutcome::Falsified {
                        detail: format!(
                            "distance {distance} exceeds the derived bound 2^-{}",
                            p + 1
                        ),
                    }
                };
                claims.push(("theorem1_derived_bound".to_string(), *p as u32 + 1, outcome));
            }
        }

        if let Some(t2) = &theorem2 {
            for (name, verdict, r_eff, condition_transfers) in [
                ("theorem2_i", &t2.i, 2usize, true),
                ("theorem2_ii", &t2.ii, 3, true),
                ("theorem2_iii", &t2.iii, 3, false),
                ("theorem2_iv", &t2.iv, t2.r, false),
            ] {
                if !verdict.holds() || !distance.less_than_dyadic(r_eff as u32 + 1) {
                    continue;
                }
                let outcome = if condition_transfers {
                    transfer_condition(base, partner, verdict, r_eff)
                } else if partner.multiplicity() {
                    TransferOutcome::Transferred
                } else {
                    TransferOutcome::Falsified {
                        detail: "partner lacks multiplicity".to_string(),
                    }
                };
                claims.push((name.to_string(), r_eff as u32 + 1, outcome));
            }
        }

        if !claims.is_empty() {
            findings.push(NeighborhoodFinding {
                corpus_index,
                distance,
                claims,
            });
        }
    }
    Ok(findings)
}

fn transfer_theorem1(
    partner: &CosetPartition,
    certificate: &ReducedWord,
    top_index: usize,
) -> TransferOutcome {
    let top = &partner.pairs()[0];
    if top.index() != top_index {
        return TransferOutcome::Falsified {
            detail: format!("partner top index {} differs from {top_index}", top.index()),
        };
    }
    let perm = top.subgroup().word_permutation(certificate);
    if !perm.is_full_cycle() {
        return TransferOutcome::Falsified {
            detail: "certificate word is not a full cycle on the partner".to_string(),
        };
    }
    let p = least_prime_factor(top_index).unwrap_or(usize::MAX);
    let count = partner
        .pairs()
        .iter()
        .filter(|q| q.index() == top_index)
        .count();
    if count < p {
        return TransferOutcome::Falsified {
            detail: format!("top index repeats {count} < {p} times on the partner"),
        };
    }
    if !partner.multiplicity() {
        return TransferOutcome::Falsified {
            detail: "partner lacks multiplicity".to_string(),
        };
    }
    TransferOutcome::Transferred
}

/// Replay a `k > d` cycle certificate on the partner: within radius
/// `2^-(r_eff+1)` the first `r_eff + 1` subgroups agree, the certified
/// cycle lives in one of the top `r_eff` parts, and the compared index sits
/// at a shared place, so the condition carries over verbatim.
fn transfer_condition(
    base: &CosetPartition,
    partner: &CosetPartition,
    verdict: &ConditionVerdict,
    r_eff: usize,
) -> TransferOutcome {
    let ConditionVerdict::Holds(certs) = verdict else {
        unreachable!("transfer_condition called on a non-holding verdict");
    };
    if !partner.multiplicity() {
        return TransferOutcome::Falsified {
            detail: "partner lacks multiplicity".to_string(),
        };
    }
    for cert in certs {
        if let Certificate::Cycle { part, word, length } = cert {
            // Locate the certified subgroup among the shared places.
            let form = base.pairs()[*part].form();
            let shared = partner
                .pairs()
                .iter()
                .take(r_eff + 1)
                .find(|q| q.form() == form);
            let Some(shared) = shared else {
                return TransferOutcome::Falsified {
                    detail: "certified subgroup not among the partner's shared places".to_string(),
                };
            };
            let observed = shared.subgroup().word_permutation(word).max_cycle_length();
            if observed != *length {
                return TransferOutcome::Falsified {
                    detail: format!(
                        "certificate cycle length {observed} != {length} on the partner"
                    ),
                };
            }
            let compared_place = r_eff + 1;
            match (
                base.pairs().get(compared_place - 1),
                partner.pairs().get(compared_place - 1),
            ) {
                (Some(b), Some(q)) => {
                    if q.index() != b.index() {
                        return TransferOutcome::Falsified {
                            detail: format!("compared index differs at place {compared_place}"),
                        };
                    }
                    if *length <= q.index() {
                        return TransferOutcome::Falsified {
                            detail: "certificate no longer beats the compared index".to_string(),
                        };
                    }
                }
                _ => {
                    return TransferOutcome::Falsified {
                        detail: format!("no part at place {compared_place}"),
                    };
                }
            }
        }
    }
    TransferOutcome::Transferred
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::SubgroupAutomaton;
    use crate::word::Rank;

    fn rank2() -> Rank {
        Rank::new(2).unwrap()
    }

    fn w(text: &str) -> ReducedWord {
        ReducedWord::parse(text, rank2()).unwrap()
    }

    fn ker_b_parity() -> SubgroupAutomaton {
        SubgroupAutomaton::from_generators(&[w("a"), w("bb"), w("baB")], rank2()).unwrap()
    }

    fn ker_b_mod(m: usize) -> SubgroupAutomaton {
        // Kernel of the b-exponent map onto Z_m: sigma_b the m-cycle,
        // sigma_a trivial.
        let b_cycle: Vec<u32> = (0..m as u32).collect();
        SubgroupAutomaton::from_permutations(
            rank2(),
            &[
                crate::perm::Permutation::identity(m),
                crate::perm::Permutation::from_cycles(m, &[&b_cycle]).unwrap(),
            ],
        )
        .unwrap()
    }

    fn p2() -> CosetPartition {
        let h = ker_b_parity();
        CosetPartition::new(rank2(), vec![(h.clone(), w("1")), (h, w("b"))]).unwrap()
    }

    fn p3() -> CosetPartition {
        let k = ker_b_mod(3);
        CosetPartition::new(
            rank2(),
            vec![(k.clone(), w("1")), (k.clone(), w("b")), (k, w("bb"))],
        )
        .unwrap()
    }

    /// Indices (2, 4, 4): the parity kernel coset Hb plus the two cosets of
    /// the b-mod-4 kernel inside H.
    fn p244() -> CosetPartition {
        let h = ker_b_parity();
        let k = ker_b_mod(4);
        CosetPartition::new(
            rank2(),
            vec![(h, w("b")), (k.clone(), w("1")), (k, w("bb"))],
        )
        .unwrap()
    }

    #[test]
    fn theorem1_on_cyclic_kernels() {
        for (p, expected_count) in [(p2(), 2usize), (p3(), 3)] {
            assert!(p.verify().unwrap().is_partition);
            match check_theorem1(&p, 10_000) {
                Theorem1Verdict::Holds {
                    certificate,
                    count_top,
                    p: prime,
                    top_index,
                } => {
                    assert_eq!(certificate.surface(), "b");
                    assert_eq!(count_top, expected_count);
                    assert_eq!(prime, top_index);
                }
                other => panic!("expected Holds, got {other:?}"),
            }
        }
    }

    #[test]
    fn theorem1_fails_without_full_cycle() {
        // Top part whose transition group is the Klein four-group on 4
        // points: no 4-cycle. sigma_a = (0 1)(2 3), sigma_b = (0 2)(1 3) is
        // transitive with all elements of order 2.
        let klein = SubgroupAutomaton::from_permutations(
            rank2(),
            &[
                crate::perm::Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]).unwrap(),
                crate::perm::Permutation::from_cycles(4, &[&[0, 2], &[1, 3]]).unwrap(),
            ],
        )
        .unwrap();
        let reps = klein.coset_representatives();
        let parts = reps.into_iter().map(|rep| (klein.clone(), rep)).collect();
        let p = CosetPartition::new(rank2(), parts).unwrap();
        assert!(p.verify().unwrap().is_partition);
        assert!(matches!(check_theorem1(&p, 10_000), Theorem1Verdict::Fails));
    }

    #[test]
    fn theorem1_unknown_under_tiny_cap() {
        // S_8-like top group with a cap too small to finish and too small
        // to stumble on a full cycle certificate: cap 1 only holds the
        // identity.
        let big = SubgroupAutomaton::from_permutations(
            rank2(),
            &[
                crate::perm::Permutation::from_cycles(8, &[&[0, 1]]).unwrap(),
                crate::perm::Permutation::from_cycles(8, &[&[1, 2, 3, 4, 5, 6, 7]]).unwrap(),
            ],
        )
        .unwrap();
        let reps = big.coset_representatives();
        let parts = reps.into_iter().map(|rep| (big.clone(), rep)).collect();
        let p = CosetPartition::new(rank2(), parts).unwrap();
        assert!(matches!(check_theorem1(&p, 1), Theorem1Verdict::Unknown));
    }

    #[test]
    fn kp_sharp_on_small_kernels() {
        let kps = compute_kp_sharp(&p3(), 10_000);
        assert_eq!(kps.k, 3);
        assert!(kps.k_exact);
        assert_eq!(kps.p, Some(3));
        assert!(kps.sharp_values.contains(&3));
        assert!(kps.exhaustive);
        assert_eq!(kps.k_marked, 3);

        let kps2 = compute_kp_sharp(&p2(), 10_000);
        assert_eq!(kps2.k, 2);
        assert_eq!(kps2.p, Some(2));
        assert!(kps2.sharp_values.contains(&2));
    }

    #[test]
    fn kp_sharp_degenerate_trivial_partition() {
        let trivial = CosetPartition::new(
            rank2(),
            vec![(SubgroupAutomaton::full_group(rank2()), w("1"))],
        )
        .unwrap();
        let kps = compute_kp_sharp(&trivial, 100);
        assert_eq!(kps.k, 1);
        assert_eq!(kps.p, None);
        assert_eq!(
            kps.sharp_values.iter().copied().collect::<Vec<_>>(),
            vec![1]
        );
    }

    #[test]
    fn theorem2_on_p3() {
        let p = p3();
        let kps = compute_kp_sharp(&p, 10_000);
        let report = check_theorem2(&p, &kps, 2, IvReading::Conjunctive).unwrap();
        // k = 3 is not greater than d_1 = 3.
        assert!(matches!(report.i, ConditionVerdict::Fails));
        assert!(matches!(report.ii, ConditionVerdict::NotApplicable));
        assert!(matches!(report.iii, ConditionVerdict::NotApplicable));
        assert!(matches!(report.iv, ConditionVerdict::Fails));
        // The disjunctive reading lets # = p fire on its own.
        let disj = check_theorem2(&p, &kps, 2, IvReading::Disjunctive).unwrap();
        assert!(disj.iv.holds());
    }

    #[test]
    fn theorem2_holds_on_244() {
        let p = p244();
        assert!(p.verify().unwrap().is_partition);
        let kps = compute_kp_sharp(&p, 10_000);
        assert_eq!(kps.k, 4);
        let report = check_theorem2(&p, &kps, 2, IvReading::Conjunctive).unwrap();
        match &report.i {
            ConditionVerdict::Holds(certs) => {
                assert!(!certs.is_empty());
                for cert in certs {
                    assert!(cert.reverify(&p));
                }
            }
            other => panic!("expected (i) to hold, got {other:?}"),
        }
        assert!(p.multiplicity());
    }

    #[test]
    fn theorem2_rejects_bad_r() {
        let p = p3();
        let kps = compute_kp_sharp(&p, 1000);
        assert!(check_theorem2(&p, &kps, 1, IvReading::Conjunctive).is_err());
        assert!(check_theorem2(&p, &kps, 3, IvReading::Conjunctive).is_err());
    }

    #[test]
    fn analyze_produces_stable_kv() {
        let p = p244();
        let opts = AnalyzeOptions {
            cap: 10_000,
            ..AnalyzeOptions::default()
        };
        let a = analyze(&p, &opts).unwrap().to_kv();
        let b = analyze(&p, &opts).unwrap().to_kv();
        assert_eq!(a, b);
        assert!(a.contains("is_partition = true"));
        assert!(a.contains("theorem2_i = holds"));
        assert!(a.contains("reading = iv-a"));
    }

    #[test]
    fn analyze_invalid_partition_reports_witness() {
        let h = ker_b_parity();
        let p = CosetPartition::new(rank2(), vec![(h.clone(), w("1")), (h, w("1"))]).unwrap();
        let report = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert!(!report.is_partition);
        assert_eq!(report.cover_witness.as_deref(), Some("1"));
        assert!(report.theorem1.is_none());
    }

    #[test]
    fn neighborhood_transfers_to_equivalent_point() {
        let p = p2();
        let moved = p.act(&w("b"));
        let corpus = vec![moved, p3()];
        let findings = check_neighborhood(
            &p,
            &corpus,
            &AnalyzeOptions {
                cap: 10_000,
                ..Default::default()
            },
        )
        .unwrap();
        // Only the equivalent point is within 1/2 of p2: p3 differs at the
        // first place.
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].corpus_index, 0);
        assert!(findings[0].distance.is_zero());
        assert!(findings[0].claims.iter().all(|(_, _, o)| o.ok()));
    }

    #[test]
    fn certificates_reverify() {
        let p = p3();
        if let Theorem1Verdict::Holds { certificate, .. } = check_theorem1(&p, 10_000) {
            let perm = p.pairs()[0].subgroup().word_permutation(&certificate);
            assert!(perm.is_full_cycle());
        } else {
            panic!("expected theorem1 to hold on p3");
        }
        let kps = compute_kp_sharp(&p, 10_000);
        for wt in kps.sharp_witnesses.values() {
            let cert = Certificate::Witness {
                word: wt.word.clone(),
                cycle_lengths: wt.cycle_lengths.clone(),
                sharp: wt.sharp,
            };
            assert!(cert.reverify(&p));
        }
    }
}
