//! Seeded randomized property suites.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)` with a
//! distinct stream per suite (`set_stream`), so a suite's samples depend
//! only on the seed and the suite, never on which other suites ran first.
//! Any reported counterexample can be replayed from the seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::mat3::{Mat3, Vec3};
use crate::rotmap::rotation;
use crate::scalar::QSqrt2;
use crate::words::{compose, is_reduced, reduce, reduce_paper, Letter, ReducedWord, Word};

/// Counterexamples kept per suite; the failure count is always exact.
const MAX_REPORTED: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub seed: u64,
    pub trials: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
}

impl SuiteOutcome {
    fn new(name: &'static str, seed: u64) -> Self {
        SuiteOutcome {
            name,
            seed,
            trials: 0,
            failure_count: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failure_count += 1;
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_letter<R: Rng>(rng: &mut R) -> Letter {
    Letter::ALL[rng.gen_range(0..4)]
}

/// Uniform length in `0..=max_len`, then uniform letters.
pub fn random_weak<R: Rng>(rng: &mut R, max_len: usize) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::new((0..n).map(|_| random_letter(rng)).collect())
}

/// Uniform length in `0..=max_len`; each letter uniform among those not
/// cancelling the previous one.
pub fn random_reduced<R: Rng>(rng: &mut R, max_len: usize) -> ReducedWord {
    let n = rng.gen_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(n);
    while letters.len() < n {
        let l = random_letter(rng);
        if letters.last() != Some(&l.inverse()) {
            letters.push(l);
        }
    }
    ReducedWord::try_from(Word::new(letters)).expect("built without cancellations")
}

fn random_rational_scalar<R: Rng>(rng: &mut R) -> QSqrt2 {
    QSqrt2::from_parts(rng.gen_range(-20..=20), rng.gen_range(1..=12), 0, 1)
}

fn random_scalar<R: Rng>(rng: &mut R) -> QSqrt2 {
    QSqrt2::from_parts(
        rng.gen_range(-9..=9),
        rng.gen_range(1..=6),
        rng.gen_range(-9..=9),
        rng.gen_range(1..=6),
    )
}

pub fn random_rational_point<R: Rng>(rng: &mut R) -> Vec3 {
    Vec3::new(
        random_rational_scalar(rng),
        random_rational_scalar(rng),
        random_rational_scalar(rng),
    )
}

pub fn random_matrix<R: Rng>(rng: &mut R) -> Mat3 {
    Mat3::from_fn(|_, _| random_scalar(rng))
}

/// Closure, associativity, identity and two-sided inverses on random triples
/// of reduced words.
pub fn group_axioms(seed: u64, trials: u64, max_len: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("group-axioms", seed);
    let mut rng = rng_for(seed, 1);
    let eps = ReducedWord::empty();
    for _ in 0..trials {
        let x = random_reduced(&mut rng, max_len);
        let y = random_reduced(&mut rng, max_len);
        let z = random_reduced(&mut rng, max_len);
        out.trials += 1;

        let xy = compose(&x, &y);
        out.check(is_reduced(xy.letters()), || format!("closure: {x}·{y} = {xy}"));
        let lhs = compose(&xy, &z);
        let rhs = compose(&x, &compose(&y, &z));
        out.check(lhs == rhs, || format!("associativity: ({x},{y},{z})"));
        out.check(compose(&x, &eps) == x && compose(&eps, &x) == x, || format!("identity: {x}"));
        let xi = x.inverse();
        out.check(compose(&x, &xi).is_empty(), || format!("right inverse: {x}"));
        out.check(compose(&xi, &x).is_empty(), || format!("left inverse: {x}"));
        out.check(xi.inverse() == x, || format!("involution: {x}"));
        out.check(xy.inverse() == compose(&y.inverse(), &xi), || {
            format!("inverse anti-homomorphism: ({x},{y})")
        });
    }
    out
}

/// Stack reduction against the tail-first oracle on random weak words.
pub fn reduction_oracle(seed: u64, trials: u64, max_len: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("reduction-oracle", seed);
    let mut rng = rng_for(seed, 2);
    for _ in 0..trials {
        let w = random_weak(&mut rng, max_len);
        out.trials += 1;
        let fast = reduce(&w);
        out.check(fast == reduce_paper(&w), || format!("reduce ≠ tail-first reduce on {w}"));
        out.check((w.len() - fast.len()).is_multiple_of(2), || format!("odd shrinkage on {w}"));
        out.check(reduce(&fast.as_word()) == fast, || format!("not idempotent on {w}"));
    }
    out
}

/// Fix-fusion on both sides and reversal commutation, on random weak triples.
pub fn fix_fusion(seed: u64, trials: u64, max_len: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("fix-fusion", seed);
    let mut rng = rng_for(seed, 3);
    for _ in 0..trials {
        let x = random_weak(&mut rng, max_len);
        let y = random_weak(&mut rng, max_len);
        let z = random_weak(&mut rng, max_len);
        out.trials += 1;
        let all = reduce(&x.append(&y).append(&z));
        let right = reduce(&x.append(&reduce(&y.append(&z)).into()));
        let left = reduce(&Word::from(reduce(&x.append(&y))).append(&z));
        out.check(right == all, || format!("right fusion: ({x},{y},{z})"));
        out.check(left == all, || format!("left fusion: ({x},{y},{z})"));
        let rev = reduce(&x.reversed());
        out.check(rev.as_word() == Word::from(reduce(&x)).reversed(), || {
            format!("reversal: {x}")
        });
    }
    out
}

/// `rotation(w₁)·rotation(w₂) = rotation(w₁∘w₂)` on random pairs.
pub fn homomorphism(seed: u64, trials: u64, max_len: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("homomorphism", seed);
    let mut rng = rng_for(seed, 4);
    for _ in 0..trials {
        let x = random_reduced(&mut rng, max_len);
        let y = random_reduced(&mut rng, max_len);
        out.trials += 1;
        let lhs = rotation(&x).mul(&rotation(&y));
        out.check(lhs == rotation(&compose(&x, &y)), || format!("homomorphism: ({x},{y})"));
    }
    out
}

/// The matrix lemmas on rotations of random words and random points, plus
/// determinant and inverse laws on random general matrices.
pub fn matrix_lemmas(seed: u64, trials: u64, max_len: usize) -> SuiteOutcome {
    let mut out = SuiteOutcome::new("matrix-lemmas", seed);
    let mut rng = rng_for(seed, 5);
    for _ in 0..trials {
        let w1 = random_reduced(&mut rng, max_len);
        let w2 = random_reduced(&mut rng, max_len);
        let p = random_rational_point(&mut rng);
        out.trials += 1;

        let r1 = rotation(&w1);
        let r2 = rotation(&w2);
        let prod = r1.mul(&r2);
        out.check(prod.det() == &r1.det() * &r2.det(), || format!("det multiplicative: ({w1},{w2})"));
        out.check(prod.is_rotation(), || format!("rotation closure: ({w1},{w2})"));
        let (Ok(r1i), Ok(r2i), Ok(pi)) = (r1.inverse(), r2.inverse(), prod.inverse()) else {
            out.check(false, || format!("rotation not invertible: ({w1},{w2})"));
            continue;
        };
        out.check(r1i.is_rotation(), || format!("rotation inverse: {w1}"));
        out.check(r1.mul(&r1i).is_identity() && r1i.mul(&r1).is_identity(), || {
            format!("two-sided inverse: {w1}")
        });
        out.check(pi == r2i.mul(&r1i), || format!("inverse anti-homomorphism: ({w1},{w2})"));
        out.check(r1.apply(&p).norm_sq() == p.norm_sq(), || format!("distance: {w1} on {p}"));
        let i = Mat3::identity();
        out.check(r1.mul(&i) == r1 && i.mul(&r1) == r1, || format!("identity: {w1}"));

        let m1 = random_matrix(&mut rng);
        let m2 = random_matrix(&mut rng);
        let m12 = m1.mul(&m2);
        out.check(m12.det() == &m1.det() * &m2.det(), || "det multiplicative on general matrices".into());
        out.check(m12.transpose() == m2.transpose().mul(&m1.transpose()), || {
            "transpose anti-homomorphism".into()
        });
        if let (Ok(a), Ok(b), Ok(ab)) = (m1.inverse(), m2.inverse(), m12.inverse()) {
            out.check(ab == b.mul(&a), || "inverse anti-homomorphism on general matrices".into());
            out.check(m1.mul(&a).is_identity() && a.mul(&m1).is_identity(), || {
                "two-sided inverse on general matrices".into()
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samplers_respect_bounds() {
        let mut rng = rng_for(1, 0);
        for _ in 0..500 {
            assert!(random_reduced(&mut rng, 12).len() <= 12);
            assert!(random_weak(&mut rng, 7).len() <= 7);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<_> = (0..20).map({
            let mut r = rng_for(42, 3);
            move |_| random_weak(&mut r, 10)
        }).collect();
        let b: Vec<_> = (0..20).map({
            let mut r = rng_for(42, 3);
            move |_| random_weak(&mut r, 10)
        }).collect();
        assert_eq!(a, b);
        let mut other = rng_for(42, 4);
        assert_ne!(a[..5].to_vec(), (0..5).map(|_| random_weak(&mut other, 10)).collect::<Vec<_>>());
    }

    #[test]
    fn small_runs_pass() {
        assert!(group_axioms(3, 200, 20).passed());
        assert!(reduction_oracle(3, 500, 50).passed());
        assert!(fix_fusion(3, 200, 20).passed());
        assert!(homomorphism(3, 50, 6).passed());
        assert!(matrix_lemmas(3, 20, 5).passed());
    }

    #[test]
    fn failures_are_capped_but_counted() {
        let mut o = SuiteOutcome::new("t", 0);
        for _ in 0..25 {
            o.check(false, || "x".into());
        }
        assert_eq!(o.failure_count, 25);
        assert_eq!(o.failures.len(), MAX_REPORTED);
        assert!(!o.passed());
    }
}
