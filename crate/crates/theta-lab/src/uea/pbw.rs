//! Integer PBW normal forms in U(𝔰𝔭₄).
//!
//! Structure constants are integers, so every normal form of a product of
//! basis monomials has integer coefficients; ring-specific reduction happens
//! one level up.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::lie::{sp4, DIM, LABELS, WEIGHTS};
use crate::weights::Weight;

/// A PBW monomial: exponents over the ordered basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mono(pub [u32; DIM]);

impl Mono {
    pub const ONE: Mono = Mono([0; DIM]);

    pub fn gen(g: usize) -> Mono {
        let mut e = [0; DIM];
        e[g] = 1;
        Mono(e)
    }

    pub fn power(g: usize, n: u32) -> Mono {
        let mut e = [0; DIM];
        e[g] = n;
        Mono(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.iter().position(|&x| x > 0)
    }

    fn inc(mut self, g: usize) -> Mono {
        self.0[g] += 1;
        self
    }

    fn dec(mut self, g: usize) -> Mono {
        self.0[g] -= 1;
        self
    }

    /// Generators of the monomial as an ordered word.
    pub fn word(&self) -> Vec<usize> {
        (0..DIM).flat_map(|g| std::iter::repeat_n(g, self.0[g] as usize)).collect()
    }

    pub fn weight(&self) -> Weight {
        (0..DIM).fold(Weight::new(0, 0), |acc, g| acc.plus(WEIGHTS[g].scale(self.0[g] as i64)))
    }

    pub fn is_lowering(&self) -> bool {
        self.0[super::lie::H_ALPHA..].iter().all(|&x| x == 0)
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 0 {
            return f.write_str("1");
        }
        let parts: Vec<String> = (0..DIM)
            .filter(|&g| self.0[g] > 0)
            .map(|g| match self.0[g] {
                1 => LABELS[g].to_string(),
                n => format!("{}^{n}", LABELS[g]),
            })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

pub type ZTerms = Vec<(Mono, BigInt)>;

fn add_into(acc: &mut HashMap<Mono, BigInt>, m: Mono, c: BigInt) {
    let e = acc.entry(m).or_insert_with(BigInt::zero);
    *e += c;
}

fn finish(acc: HashMap<Mono, BigInt>) -> ZTerms {
    let mut v: ZTerms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

type Cache = Mutex<HashMap<(usize, Mono), Arc<ZTerms>>>;

fn cache() -> &'static Cache {
    static C: OnceLock<Cache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normal form of x_g · m for a normal monomial m.
pub fn left_mul_gen(g: usize, m: Mono) -> Arc<ZTerms> {
    if let Some(hit) = cache().lock().expect("cache").get(&(g, m)) {
        return hit.clone();
    }
    let result = Arc::new(left_mul_gen_uncached(g, m));
    cache().lock().expect("cache").insert((g, m), result.clone());
    result
}

fn left_mul_gen_uncached(g: usize, m: Mono) -> ZTerms {
    let Some(i) = m.first().filter(|&i| g > i) else {
        return vec![(m.inc(g), BigInt::one())];
    };
    // g·x_i·m' = x_i·(g·m') + [g, x_i]·m'
    let rest = m.dec(i);
    let mut acc = HashMap::new();
    for (n, c) in left_mul_gen(g, rest).iter() {
        for (n2, c2) in left_mul_gen(i, *n).iter() {
            add_into(&mut acc, *n2, c * c2);
        }
    }
    for &(k, c) in sp4().br(g, i) {
        for (n2, c2) in left_mul_gen(k, rest).iter() {
            add_into(&mut acc, *n2, c2 * BigInt::from(c));
        }
    }
    finish(acc)
}

/// Normal form of x_g · (Σ c·m).
pub fn left_mul_gen_terms(g: usize, terms: &[(Mono, BigInt)]) -> ZTerms {
    let mut acc = HashMap::new();
    for (m, c) in terms {
        for (n, c2) in left_mul_gen(g, *m).iter() {
            add_into(&mut acc, *n, c * c2);
        }
    }
    finish(acc)
}

/// Normal form of the product of two normal monomials.
pub fn mono_mul(a: &Mono, b: &Mono) -> ZTerms {
    let mut terms = vec![(*b, BigInt::one())];
    for g in a.word().into_iter().rev() {
        terms = left_mul_gen_terms(g, &terms);
    }
    terms
}

/// Normal form of a word of generators, by left multiplication from the right end.
pub fn normalize_word(word: &[usize]) -> ZTerms {
    let mut terms = vec![(Mono::ONE, BigInt::one())];
    for &g in word.iter().rev() {
        terms = left_mul_gen_terms(g, &terms);
    }
    terms
}

/// Rewrite strategy for [`normalize_word_rewriting`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteOrder {
    LeftmostInversion,
    RightmostInversion,
}

/// Normal form of a word by direct rewriting xy → yx + [x,y], without caching.
pub fn normalize_word_rewriting(word: &[usize], order: RewriteOrder) -> ZTerms {
    let alg = sp4();
    let mut acc = HashMap::new();
    let mut stack: Vec<(Vec<usize>, BigInt)> = vec![(word.to_vec(), BigInt::one())];
    while let Some((w, c)) = stack.pop() {
        let mut inversions = (0..w.len().saturating_sub(1)).filter(|&j| w[j] > w[j + 1]);
        let pos = match order {
            RewriteOrder::LeftmostInversion => inversions.next(),
            RewriteOrder::RightmostInversion => inversions.last(),
        };
        let Some(j) = pos else {
            let mut e = [0; DIM];
            for &g in &w {
                e[g] += 1;
            }
            add_into(&mut acc, Mono(e), c);
            continue;
        };
        let mut swapped = w.clone();
        swapped.swap(j, j + 1);
        stack.push((swapped, c.clone()));
        for &(k, b) in alg.br(w[j], w[j + 1]) {
            let mut nw = w[..j].to_vec();
            nw.push(k);
            nw.extend_from_slice(&w[j + 2..]);
            stack.push((nw, &c * BigInt::from(b)));
        }
    }
    finish(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uea::lie::*;

    #[test]
    fn commuting_e_beta_past_f_beta() {
        let t = normalize_word(&[E_BETA, F_BETA]);
        assert_eq!(
            t,
            vec![(Mono::gen(H_BETA), BigInt::one()), (Mono([1, 0, 0, 0, 0, 0, 0, 1, 0, 0]), BigInt::one())]
        );
    }

    #[test]
    fn ordered_word_is_fixed() {
        let w = [F_BETA, F_BETA, F_ALPHA, H_BETA, E_2AB];
        let t = normalize_word(&w);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].0.word(), w.to_vec());
    }

    #[test]
    fn strategies_agree_on_small_words() {
        let words: [&[usize]; 4] = [
            &[E_2AB, F_2AB, F_BETA],
            &[E_ALPHA, E_BETA, F_ALPHA, F_BETA],
            &[H_ALPHA, F_AB, E_AB, F_ALPHA],
            &[E_AB, E_AB, F_BETA, F_ALPHA],
        ];
        for w in words {
            let a = normalize_word(w);
            assert_eq!(a, normalize_word_rewriting(w, RewriteOrder::LeftmostInversion));
            assert_eq!(a, normalize_word_rewriting(w, RewriteOrder::RightmostInversion));
        }
    }
}
