//! Checks that `rotation` is injective, i.e. that no nonempty reduced word
//! maps to the identity.
//!
//! For a reduced word `w` of length `n`, write `rotation(w)·(0,1,0)` as
//! `(x', y', z')` and set `(x, y, z) = 3ⁿ·(x'/√2, y', z'/√2)`. These are
//! integers, and prepending a letter acts on them by a fixed integer matrix
//! ([`step_matrix`]). Modulo 3 the triple of a nonempty word is never
//! `(0, 0, 0)`, whereas the identity would give `(0, 3ⁿ, 0)`.
//!
//! Two routes establish this:
//! * [`check_nonidentity_upto`] walks every reduced word up to a length bound
//!   in exact arithmetic;
//! * [`certify_mod3_machine`] closes the finite space of
//!   (first letter, residue triple) states under all admissible prepends,
//!   which covers every length at once.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::Serializer;
use serde::Serialize;

use crate::mat3::{Mat3, Vec3};
use crate::rotmap::{generator, rotation, walk_prepend};
use crate::scalar::{Int3, QSqrt2, ScalarError};
use crate::words::{compose, Letter, ReducedWord, WordClass};

/// The scaled integer image of the base point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct InvariantTriple {
    pub value: Int3,
    pub length: usize,
}

impl InvariantTriple {
    /// The empty word's triple `(0, 1, 0)`.
    pub fn base() -> Self {
        InvariantTriple {
            value: Int3::new(0, 1, 0),
            length: 0,
        }
    }

    pub fn residues(&self) -> [u8; 3] {
        self.value.mod3()
    }

    /// `(x√2/3ⁿ, y/3ⁿ, z√2/3ⁿ)`.
    pub fn embed(&self) -> Vec3 {
        let k = -(self.length as i32);
        let s2 = QSqrt2::sqrt2();
        let c = |v: &BigInt| QSqrt2::from_integer(v.clone());
        Vec3::new(
            (&c(&self.value.x) * &s2).scale_pow3(k),
            c(&self.value.y).scale_pow3(k),
            (&c(&self.value.z) * &s2).scale_pow3(k),
        )
    }
}

/// Scales the image `(x', y', z')` of the base point under a word of length `n`.
pub fn invariant_of_image(v: &Vec3, length: usize) -> Result<InvariantTriple, ScalarError> {
    let n = length as i32;
    let x = v[0].div_exact_sqrt2().scale_pow3(n).as_integer()?;
    let y = v[1].scale_pow3(n).as_integer()?;
    let z = v[2].div_exact_sqrt2().scale_pow3(n).as_integer()?;
    Ok(InvariantTriple {
        value: Int3 { x, y, z },
        length,
    })
}

/// Invariant triple of `w`, computed from the exact rotation matrix.
pub fn invariant_exact(w: &ReducedWord) -> Result<InvariantTriple, ScalarError> {
    invariant_of_image(&rotation(w).apply(&Vec3::unit_y()), w.len())
}

/// Integer matrix by which prepending `l` acts on the invariant triple.
pub const fn step_matrix(l: Letter) -> [[i64; 3]; 3] {
    match l {
        Letter::GenA => [[3, 0, 0], [0, 1, -4], [0, 2, 1]],
        Letter::InvA => [[3, 0, 0], [0, 1, 4], [0, -2, 1]],
        Letter::GenB => [[1, -2, 0], [4, 1, 0], [0, 0, 3]],
        Letter::InvB => [[1, 2, 0], [-4, 1, 0], [0, 0, 3]],
    }
}

pub fn invariant_step(l: Letter, t: &InvariantTriple) -> InvariantTriple {
    let m = step_matrix(l);
    let v = [&t.value.x, &t.value.y, &t.value.z];
    let row = |r: [i64; 3]| -> BigInt { r.iter().zip(v).map(|(&c, x)| c * x).sum() };
    InvariantTriple {
        value: Int3 {
            x: row(m[0]),
            y: row(m[1]),
            z: row(m[2]),
        },
        length: t.length + 1,
    }
}

pub fn step_mod3(l: Letter, cls: [u8; 3]) -> [u8; 3] {
    let m = step_matrix(l);
    std::array::from_fn(|i| {
        let s: i64 = (0..3).map(|j| m[i][j] * cls[j] as i64).sum();
        s.rem_euclid(3) as u8
    })
}

/// Checks symbolically that `3·D·X_ℓ·D⁻¹` equals [`step_matrix`] for every
/// letter, with `D = diag(1/√2, 1, 1/√2)`. This makes the recurrence hold
/// for every vector, not just the sampled ones.
pub fn step_table_matches_generators() -> bool {
    let half_sqrt2 = QSqrt2::from_parts(0, 1, 1, 2);
    let d = Mat3::diag(half_sqrt2.clone(), QSqrt2::one(), half_sqrt2);
    let d_inv = Mat3::diag(QSqrt2::sqrt2(), QSqrt2::one(), QSqrt2::sqrt2());
    Letter::ALL.iter().all(|&l| {
        let conj = d.mul(generator(l)).mul(&d_inv);
        let expect = step_matrix(l);
        (0..3).all(|i| (0..3).all(|j| conj[(i, j)].scale_pow3(1) == QSqrt2::from_int(expect[i][j])))
    })
}

/// A residue class tagged with the first letter of its word (`None` for ε).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod3State {
    pub tag: Option<Letter>,
    pub cls: [u8; 3],
}

impl Mod3State {
    pub fn is_zero_class(&self) -> bool {
        self.cls == [0, 0, 0]
    }
}

impl fmt::Display for Mod3State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = self.tag.map_or('ε', Letter::to_char);
        write!(f, "{tag}:{}{}{}", self.cls[0], self.cls[1], self.cls[2])
    }
}

impl Serialize for Mod3State {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn word_json<S: Serializer>(w: &ReducedWord, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(w)
}

/// Something that went wrong for a particular word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Identity {
        #[serde(serialize_with = "word_json")]
        word: ReducedWord,
    },
    ZeroClass {
        #[serde(serialize_with = "word_json")]
        word: ReducedWord,
        triple: Int3,
    },
    StepMismatch {
        #[serde(serialize_with = "word_json")]
        word: ReducedWord,
        exact: Int3,
        stepped: Int3,
    },
    NonIntegral {
        #[serde(serialize_with = "word_json")]
        word: ReducedWord,
        detail: String,
    },
    Collision {
        #[serde(serialize_with = "word_json")]
        first: ReducedWord,
        #[serde(serialize_with = "word_json")]
        second: ReducedWord,
    },
    Overlap {
        #[serde(serialize_with = "word_json")]
        first: ReducedWord,
        #[serde(serialize_with = "word_json")]
        second: ReducedWord,
    },
    ReplayMismatch {
        state: Mod3State,
        #[serde(serialize_with = "word_json")]
        witness: ReducedWord,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Identity { word } => write!(f, "rotation({word}) is the identity"),
            Violation::ZeroClass { word, triple } => {
                write!(f, "invariant of {word} is {triple} ≡ (0,0,0) mod 3")
            }
            Violation::StepMismatch { word, exact, stepped } => {
                write!(f, "invariant of {word}: exact {exact} but recurrence gives {stepped}")
            }
            Violation::NonIntegral { word, detail } => {
                write!(f, "invariant of {word} is not integral: {detail}")
            }
            Violation::Collision { first, second } => {
                write!(f, "{first} and {second} have the same rotation")
            }
            Violation::Overlap { first, second } => {
                write!(f, "{first} and {second} land in different classes with equal rotations")
            }
            Violation::ReplayMismatch { state, witness } => {
                write!(f, "witness {witness} does not reproduce state {state}")
            }
        }
    }
}

/// Outcome of the exhaustive walk.
#[derive(Clone, Debug, Serialize)]
pub struct NonidentityReport {
    pub max_len: usize,
    /// Words checked per length `1..=max_len`.
    pub words_checked: BTreeMap<usize, u64>,
    pub total_checked: u64,
    pub violations: Vec<Violation>,
    /// Every (first letter, residue) state seen along the way.
    pub observed_states: BTreeSet<Mod3State>,
}

impl NonidentityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

struct SubtreeTally {
    counts: Vec<u64>,
    observed: BTreeSet<Mod3State>,
    violation: Option<Violation>,
}

fn check_subtree(root: Letter, max_len: usize) -> SubtreeTally {
    let mut counts = vec![0u64; max_len + 1];
    let mut observed = BTreeSet::new();
    // invariants along the current root-to-node path, indexed by length
    let mut path: Vec<InvariantTriple> = vec![InvariantTriple::base()];

    let flow = walk_prepend(root, max_len, &mut |w: &ReducedWord, m: &Mat3| {
        let n = w.len();
        counts[n] += 1;
        if m.is_identity() {
            return ControlFlow::Break(Violation::Identity { word: w.clone() });
        }
        let exact = match invariant_of_image(&m.column(1), n) {
            Ok(t) => t,
            Err(e) => {
                return ControlFlow::Break(Violation::NonIntegral {
                    word: w.clone(),
                    detail: e.to_string(),
                })
            }
        };
        let first = w.first().expect("walk only yields nonempty words");
        let stepped = invariant_step(first, &path[n - 1]);
        if stepped != exact {
            return ControlFlow::Break(Violation::StepMismatch {
                word: w.clone(),
                exact: exact.value,
                stepped: stepped.value,
            });
        }
        let cls = exact.residues();
        if cls == [0, 0, 0] {
            return ControlFlow::Break(Violation::ZeroClass {
                word: w.clone(),
                triple: exact.value,
            });
        }
        observed.insert(Mod3State { tag: Some(first), cls });
        path.truncate(n);
        path.push(exact);
        ControlFlow::Continue(())
    });

    SubtreeTally {
        counts,
        observed,
        violation: flow.break_value(),
    }
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("failed to start worker pool")
}

/// Exhaustively checks every reduced word with `1 ≤ |w| ≤ max_len`:
/// `rotation(w) ≠ I`, the invariant triple is integral, agrees with the
/// prepend recurrence, and is nonzero mod 3.
///
/// Work is split into four subtrees by the word's last letter and run on
/// `jobs` threads; the merged report does not depend on `jobs`. Each
/// subtree stops at its first violation.
pub fn check_nonidentity_upto(max_len: usize, jobs: usize) -> NonidentityReport {
    let tallies: Vec<SubtreeTally> = pool(jobs).install(|| {
        Letter::ALL
            .par_iter()
            .map(|&root| check_subtree(root, max_len))
            .collect()
    });

    let mut words_checked: BTreeMap<usize, u64> = (1..=max_len).map(|n| (n, 0)).collect();
    let mut observed_states = BTreeSet::new();
    let mut violations = Vec::new();
    for t in tallies {
        for (n, c) in t.counts.iter().enumerate().skip(1) {
            *words_checked.get_mut(&n).unwrap() += c;
        }
        observed_states.extend(t.observed);
        violations.extend(t.violation);
    }
    NonidentityReport {
        max_len,
        total_checked: words_checked.values().sum(),
        words_checked,
        violations,
        observed_states,
    }
}

/// The reachable part of the mod-3 state machine.
#[derive(Clone, Debug, Serialize)]
pub struct Mod3Certificate {
    pub start_states: Vec<Mod3State>,
    /// Reachable states in discovery order.
    pub reachable_states: Vec<Mod3State>,
    /// A shortest word reaching each state.
    #[serde(serialize_with = "witness_json")]
    pub witness_paths: BTreeMap<Mod3State, ReducedWord>,
    pub transitions: usize,
    /// Whether [`step_matrix`] was confirmed against the generator matrices.
    pub step_table_verified: bool,
    /// A word reaching the zero class, if one exists.
    #[serde(serialize_with = "counterexample_json")]
    pub counterexample: Option<ReducedWord>,
}

fn witness_json<S: Serializer>(m: &BTreeMap<Mod3State, ReducedWord>, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v.to_string())))
}

fn counterexample_json<S: Serializer>(w: &Option<ReducedWord>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) => s.collect_str(w),
        None => s.serialize_none(),
    }
}

impl Mod3Certificate {
    /// The machine is closed, avoids the zero class, and its transition
    /// table is the true action of the generators.
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
            && self.step_table_verified
            && self.reachable_states.iter().all(|s| !s.is_zero_class())
    }

    pub fn contains(&self, s: &Mod3State) -> bool {
        self.witness_paths.contains_key(s)
    }

    /// Recomputes each state's class from its witness in exact arithmetic.
    pub fn replay(&self) -> Vec<Violation> {
        self.witness_paths
            .iter()
            .filter(|(state, w)| {
                let ok = invariant_exact(w)
                    .map(|t| t.residues() == state.cls && w.first() == state.tag)
                    .unwrap_or(false);
                !ok
            })
            .map(|(state, w)| Violation::ReplayMismatch {
                state: *state,
                witness: w.clone(),
            })
            .collect()
    }
}

/// Breadth-first closure of the mod-3 state machine from the four
/// one-letter words, prepending every letter that does not cancel the
/// current first letter.
pub fn certify_mod3_machine() -> Mod3Certificate {
    let base = [0u8, 1, 0];
    let mut witness_paths = BTreeMap::new();
    let mut reachable_states = Vec::new();
    let mut queue = VecDeque::new();
    let mut counterexample = None;
    let mut transitions = 0;

    let mut start_states = Vec::new();
    for l in Letter::ALL {
        let s = Mod3State {
            tag: Some(l),
            cls: step_mod3(l, base),
        };
        start_states.push(s);
        if witness_paths.insert(s, ReducedWord::generator(l)).is_none() {
            reachable_states.push(s);
            queue.push_back(s);
        }
    }

    while let Some(s) = queue.pop_front() {
        if s.is_zero_class() {
            counterexample = Some(witness_paths[&s].clone());
            break;
        }
        let tag = s.tag.expect("machine states are nonempty");
        for l in Letter::ALL {
            if l == tag.inverse() {
                continue;
            }
            transitions += 1;
            let next = Mod3State {
                tag: Some(l),
                cls: step_mod3(l, s.cls),
            };
            if !witness_paths.contains_key(&next) {
                let w = witness_paths[&s].prepend(l).expect("admissible letter");
                witness_paths.insert(next, w);
                reachable_states.push(next);
                queue.push_back(next);
            }
        }
    }

    Mod3Certificate {
        start_states,
        reachable_states,
        witness_paths,
        transitions,
        step_table_verified: step_table_matches_generators(),
        counterexample,
    }
}

/// Outcome of the injectivity check.
#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub max_len: usize,
    pub words: u64,
    pub distinct_matrices: u64,
    pub spot_checks: usize,
    pub violations: Vec<Violation>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.words == self.distinct_matrices
    }
}

/// Every rotation of a reduced word of length `≤ max_len`, keyed by matrix.
/// On a collision the first word seen is kept and the pair is returned.
fn collect_images(max_len: usize, jobs: usize) -> (Vec<(ReducedWord, Mat3)>, u64) {
    let subtrees: Vec<Vec<(ReducedWord, Mat3)>> = pool(jobs).install(|| {
        Letter::ALL
            .par_iter()
            .map(|&root| {
                let mut out = Vec::new();
                let _ = walk_prepend::<(), _>(root, max_len, &mut |w, m| {
                    out.push((w.clone(), m.clone()));
                    ControlFlow::Continue(())
                });
                out
            })
            .collect()
    });
    let mut all = vec![(ReducedWord::empty(), Mat3::identity())];
    for s in subtrees {
        all.extend(s);
    }
    let n = all.len() as u64;
    (all, n)
}

/// Inserts every image into a set and checks the count matches the number
/// of words. Then, for `spot_checks` random pairs `w₁ ≠ w₂` (seeded),
/// checks `rotation(w₁·w₂⁻¹) ≠ I`.
pub fn check_injectivity_upto(max_len: usize, jobs: usize, seed: u64, spot_checks: usize) -> InjectivityReport {
    let (images, words) = collect_images(max_len, jobs);
    let mut seen: HashMap<&Mat3, &ReducedWord> = HashMap::with_capacity(images.len());
    let mut violations = Vec::new();
    for (w, m) in &images {
        if let Some(prev) = seen.insert(m, w) {
            violations.push(Violation::Collision {
                first: prev.clone(),
                second: w.clone(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < spot_checks && images.len() > 1 {
        let (w1, _) = images.choose(&mut rng).unwrap();
        let (w2, _) = images.choose(&mut rng).unwrap();
        if w1 == w2 {
            continue;
        }
        done += 1;
        if rotation(&compose(w1, &w2.inverse())).is_identity() {
            violations.push(Violation::Collision {
                first: w1.clone(),
                second: w2.clone(),
            });
        }
    }

    InjectivityReport {
        max_len,
        words,
        distinct_matrices: seen.len() as u64,
        spot_checks: done,
        violations,
    }
}

/// Images bucketed by the class of their word.
#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub max_len: usize,
    pub buckets: BTreeMap<WordClass, u64>,
    pub union_size: u64,
    pub words: u64,
    pub violations: Vec<Violation>,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.union_size == self.words
    }
}

/// Buckets `rotation(w)` for `|w| ≤ max_len` by the class of `w` and checks
/// the buckets are pairwise disjoint and together hold every image.
pub fn partition_census(max_len: usize, jobs: usize) -> PartitionReport {
    let (images, words) = collect_images(max_len, jobs);
    let mut buckets: BTreeMap<WordClass, u64> = WordClass::ALL.iter().map(|&c| (c, 0)).collect();
    let mut owner: HashMap<&Mat3, &ReducedWord> = HashMap::with_capacity(images.len());
    let mut violations = Vec::new();
    for (w, m) in &images {
        let class = w.classify();
        match owner.get(m) {
            Some(prev) if prev.classify() != class => violations.push(Violation::Overlap {
                first: (*prev).clone(),
                second: w.clone(),
            }),
            Some(_) => {}
            None => {
                owner.insert(m, w);
                *buckets.get_mut(&class).unwrap() += 1;
            }
        }
    }
    PartitionReport {
        max_len,
        union_size: buckets.values().sum(),
        buckets,
        words,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::{enumerate_upto, parse_word};
    use Letter::*;

    fn r(s: &str) -> ReducedWord {
        ReducedWord::try_from(parse_word(s).unwrap()).unwrap()
    }

    fn t(x: i64, y: i64, z: i64, length: usize) -> InvariantTriple {
        InvariantTriple {
            value: Int3::new(x, y, z),
            length,
        }
    }

    #[test]
    fn exact_invariants() {
        assert_eq!(invariant_exact(&r("")).unwrap(), t(0, 1, 0, 0));
        assert_eq!(invariant_exact(&r("a")).unwrap(), t(0, 1, 2, 1));
        assert_eq!(invariant_exact(&r("b")).unwrap(), t(-2, 1, 0, 1));
        assert_eq!(invariant_exact(&r("A")).unwrap(), t(0, 1, -2, 1));
        assert_eq!(invariant_exact(&r("B")).unwrap(), t(2, 1, 0, 1));
    }

    #[test]
    fn step_examples() {
        let base = InvariantTriple::base();
        assert_eq!(invariant_step(GenA, &base), t(0, 1, 2, 1));
        assert_eq!(invariant_step(GenB, &base), t(-2, 1, 0, 1));
        // A⁻·A⁺ = I, so the unreduced step lands on 3²·(0,1,0)
        assert_eq!(invariant_step(InvA, &t(0, 1, 2, 1)), t(0, 9, 0, 2));
        let exact = invariant_of_image(&crate::rotmap::product(&[InvA, GenA]).column(1), 2).unwrap();
        assert_eq!(exact, t(0, 9, 0, 2));
    }

    #[test]
    fn embed_round_trips() {
        for w in enumerate_upto(4) {
            let inv = invariant_exact(&w).unwrap();
            assert_eq!(inv.embed(), rotation(&w).apply(&Vec3::unit_y()));
        }
    }

    #[test]
    fn recurrence_matches_exact_for_all_short_words() {
        for w in enumerate_upto(5) {
            let base = invariant_exact(&w).unwrap();
            for l in Letter::ALL {
                if let Some(lw) = w.prepend(l) {
                    assert_eq!(invariant_step(l, &base), invariant_exact(&lw).unwrap(), "{lw}");
                }
            }
        }
    }

    #[test]
    fn step_table_is_the_generator_action() {
        assert!(step_table_matches_generators());
    }

    #[test]
    fn small_exhaustive_runs() {
        let rep = check_nonidentity_upto(1, 1);
        assert_eq!(rep.total_checked, 4);
        assert!(rep.passed());
        let rep = check_nonidentity_upto(3, 2);
        assert_eq!(rep.total_checked, 52);
        assert_eq!(rep.words_checked[&3], 36);
        assert!(rep.passed());
    }

    #[test]
    fn start_states() {
        let cert = certify_mod3_machine();
        let s = |l, cls| Mod3State { tag: Some(l), cls };
        assert_eq!(
            cert.start_states,
            vec![s(GenA, [0, 1, 2]), s(InvA, [0, 1, 1]), s(GenB, [1, 1, 0]), s(InvB, [2, 1, 0])]
        );
    }

    #[test]
    fn certificate_holds_and_replays() {
        let cert = certify_mod3_machine();
        assert!(cert.holds());
        assert!(cert.reachable_states.len() <= 4 * 27);
        assert!(cert.replay().is_empty());
    }

    #[test]
    fn certificate_covers_observed_states() {
        let cert = certify_mod3_machine();
        let rep = check_nonidentity_upto(4, 1);
        assert!(rep.observed_states.iter().all(|s| cert.contains(s)));
    }

    #[test]
    fn injectivity_small() {
        let rep = check_injectivity_upto(1, 1, 7, 10);
        assert_eq!(rep.distinct_matrices, 5);
        assert!(rep.passed());
        let rep = check_injectivity_upto(2, 1, 7, 10);
        assert_eq!(rep.distinct_matrices, 17);
        assert!(rep.passed());
    }

    #[test]
    fn partition_small() {
        let rep = partition_census(1, 1);
        assert!(rep.buckets.values().all(|&c| c == 1));
        let rep = partition_census(2, 1);
        let sizes: Vec<u64> = rep.buckets.values().copied().collect();
        assert_eq!(sizes, vec![1, 4, 4, 4, 4]);
        assert!(rep.passed());
    }

    #[test]
    fn violation_json_carries_words() {
        let v = Violation::Identity { word: r("ab") };
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"kind":"identity","word":"ab"}"#);
    }
}
