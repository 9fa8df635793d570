//! The homomorphism from reduced words to rotation matrices.
//!
//! The generators are rotations by `arccos(1/3)` about the x-axis (`a`) and
//! the z-axis (`b`); the inverse letters map to the transposes.

use std::ops::ControlFlow;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::mat3::Mat3;
use crate::scalar::QSqrt2;
use crate::words::{reduce, Letter, ReducedWord, Word};

/// The four generator matrices, indexed by [`Letter::index`].
pub struct GeneratorTable([Mat3; 4]);

impl GeneratorTable {
    fn build() -> Self {
        let zero = QSqrt2::zero;
        let one = QSqrt2::one;
        let third = || QSqrt2::from_parts(1, 3, 0, 1);
        // ±2√2/3
        let s = |sign: i64| QSqrt2::from_parts(0, 1, 2 * sign, 3);

        let a = |sign: i64| {
            Mat3::from_rows([
                [one(), zero(), zero()],
                [zero(), third(), s(-sign)],
                [zero(), s(sign), third()],
            ])
        };
        let b = |sign: i64| {
            Mat3::from_rows([
                [third(), s(-sign), zero()],
                [s(sign), third(), zero()],
                [zero(), zero(), one()],
            ])
        };
        GeneratorTable([a(1), a(-1), b(1), b(-1)])
    }

    pub fn get(&self, l: Letter) -> &Mat3 {
        &self.0[l.index()]
    }
}

pub fn table() -> &'static GeneratorTable {
    static TABLE: OnceLock<GeneratorTable> = OnceLock::new();
    TABLE.get_or_init(GeneratorTable::build)
}

pub fn generator(l: Letter) -> &'static Mat3 {
    table().get(l)
}

/// `X₁·X₂·…·Xₙ`, accumulated from the right so each step is a left
/// multiplication by one generator.
pub fn rotation(w: &ReducedWord) -> Mat3 {
    product(w.letters())
}

/// Rotation of a weak word, reduced first.
pub fn rotation_weak(w: &Word) -> Mat3 {
    rotation(&reduce(w))
}

/// Product of generators without reducing; equal to [`rotation_weak`] since
/// every generator is inverted by its inverse letter.
pub fn product(letters: &[Letter]) -> Mat3 {
    let mut iter = letters.iter().rev();
    let Some(&last) = iter.next() else {
        return Mat3::identity();
    };
    iter.fold(generator(last).clone(), |acc, &l| generator(l).mul(&acc))
}

/// `rotation(w⁻¹)`.
pub fn rotation_of_inverse(w: &ReducedWord) -> Mat3 {
    rotation(&w.inverse())
}

/// Depth-first walk over every reduced word of length `1..=max_len` whose
/// last letter is `root`, growing words by prepending letters. Each child's
/// matrix is one product `X_ℓ · parent`. Visiting order is pre-order with
/// letters tried in `a < A < b < B` order, so ancestors are always visited
/// before descendants. The visitor may stop the walk with `Break`.
pub fn walk_prepend<B, F>(root: Letter, max_len: usize, visit: &mut F) -> ControlFlow<B>
where
    F: FnMut(&ReducedWord, &Mat3) -> ControlFlow<B>,
{
    if max_len == 0 {
        return ControlFlow::Continue(());
    }
    walk_node(
        ReducedWord::generator(root),
        generator(root).clone(),
        max_len,
        visit,
    )
}

fn walk_node<B, F>(word: ReducedWord, m: Mat3, max_len: usize, visit: &mut F) -> ControlFlow<B>
where
    F: FnMut(&ReducedWord, &Mat3) -> ControlFlow<B>,
{
    visit(&word, &m)?;
    if word.len() == max_len {
        return ControlFlow::Continue(());
    }
    for l in Letter::ALL {
        if let Some(child) = word.prepend(l) {
            let cm = generator(l).mul(&m);
            walk_node(child, cm, max_len, visit)?;
        }
    }
    ControlFlow::Continue(())
}

/// True when every entry's denominators divide `3^len` in both components.
/// The common denominator is the lcm of the two, so checking it suffices.
pub fn denominators_divide_pow3(m: &Mat3, len: usize) -> bool {
    let p = BigInt::from(3).pow(len as u32);
    m.rows()
        .iter()
        .flatten()
        .all(|e| (&p % e.denominator()).is_zero())
}

/// Outcome of [`check_rotation_axioms_upto`].
#[derive(Clone, Debug, Serialize)]
pub struct RotationAxiomsReport {
    pub max_len: usize,
    /// Words checked, the empty word included.
    pub words_checked: u64,
    pub failures: Vec<String>,
}

impl RotationAxiomsReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn rotation_axiom_failure(w: &ReducedWord, m: &Mat3) -> Option<String> {
    if !m.det().is_one() {
        return Some(format!("{w}: det = {}", m.det()));
    }
    let t = m.transpose();
    if !t.mul(m).is_identity() {
        return Some(format!("{w}: MᵀM ≠ I"));
    }
    match m.inverse() {
        Ok(inv) if inv == t => {}
        _ => return Some(format!("{w}: M⁻¹ ≠ Mᵀ")),
    }
    if rotation_of_inverse(w) != t {
        return Some(format!("{w}: rotation(w⁻¹) ≠ Mᵀ"));
    }
    if !denominators_divide_pow3(m, w.len()) {
        return Some(format!("{w}: denominator does not divide 3^{}", w.len()));
    }
    None
}

/// For every reduced word of length `≤ max_len`: `det = 1`, `MᵀM = I`,
/// `M⁻¹ = Mᵀ`, `rotation(w⁻¹) = Mᵀ` and all denominators divide `3^|w|`.
pub fn check_rotation_axioms_upto(max_len: usize) -> RotationAxiomsReport {
    let mut failures = Vec::new();
    let mut words_checked = 1;
    if let Some(f) = rotation_axiom_failure(&ReducedWord::empty(), &Mat3::identity()) {
        failures.push(f);
    }
    for root in Letter::ALL {
        let _ = walk_prepend::<(), _>(root, max_len, &mut |w, m| {
            words_checked += 1;
            failures.extend(rotation_axiom_failure(w, m));
            ControlFlow::Continue(())
        });
    }
    RotationAxiomsReport {
        max_len,
        words_checked,
        failures,
    }
}
