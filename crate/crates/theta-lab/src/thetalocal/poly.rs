//! Polynomials over 𝔽_p in T, T₁₁, T₁₂, T₂₂.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::linalg::{inv_mod, reduce};

/// Exponents of (T, T₁₁, T₁₂, T₂₂).
pub type Exp = [u32; 4];

pub const T: usize = 0;
pub const T11: usize = 1;
pub const T12: usize = 2;
pub const T22: usize = 3;

pub const VAR_NAMES: [&str; 4] = ["T", "T11", "T12", "T22"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    terms: BTreeMap<Exp, u64>,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

impl Poly {
    pub fn zero(p: u64) -> Self {
        Poly { p, terms: BTreeMap::new() }
    }

    pub fn constant(c: i64, p: u64) -> Self {
        Self::monomial([0; 4], c, p)
    }

    pub fn var(v: usize, p: u64) -> Self {
        let mut e = [0; 4];
        e[v] = 1;
        Self::monomial(e, 1, p)
    }

    pub fn monomial(e: Exp, c: i64, p: u64) -> Self {
        let mut terms = BTreeMap::new();
        let c = reduce(c, p);
        if c != 0 {
            terms.insert(e, c);
        }
        Poly { p, terms }
    }

    pub fn from_terms(p: u64, terms: impl IntoIterator<Item = (Exp, i64)>) -> Self {
        let mut acc: HashMap<Exp, u64> = HashMap::new();
        for (e, c) in terms {
            let x = acc.entry(e).or_insert(0);
            *x = (*x + reduce(c, p)) % p;
        }
        Poly { p, terms: acc.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    fn add_term(&mut self, e: Exp, c: u64) {
        if c == 0 {
            return;
        }
        let p = self.p;
        let entry = self.terms.entry(e).or_insert(0);
        *entry = (*entry + c) % p;
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn terms(&self) -> &BTreeMap<Exp, u64> {
        &self.terms
    }

    pub fn coeff(&self, e: &Exp) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(*e, *c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let p = self.p;
        Poly { p, terms: self.terms.iter().map(|(e, c)| (*e, p - c)).collect() }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: i64) -> Poly {
        let s = reduce(s, self.p);
        let mut out = Poly::zero(self.p);
        for (e, c) in &self.terms {
            out.add_term(*e, mulmod(*c, s, self.p));
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let p = self.p;
        let mut acc: HashMap<Exp, u64> = HashMap::with_capacity(self.terms.len() * o.terms.len().min(64));
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                let x = acc.entry(e).or_insert(0);
                *x = (*x + mulmod(*ca, *cb, p)) % p;
            }
        }
        Poly { p, terms: acc.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(1, self.p);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplies by the monomial var^n.
    pub fn shift(&self, v: usize, n: u32) -> Poly {
        Poly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e = *e;
                    e[v] += n;
                    (e, *c)
                })
                .collect(),
        }
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::zero(self.p);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut f = *e;
            f[v] -= 1;
            out.add_term(f, mulmod(*c, e[v] as u64 % self.p, self.p));
        }
        out
    }

    pub fn degree_in(&self, v: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[v]).max()
    }

    /// Total degree in T₁₁, T₁₂, T₂₂ of a monomial.
    pub fn local_degree(e: &Exp) -> u32 {
        e[1] + e[2] + e[3]
    }

    /// Drops every monomial of local degree ≥ `precision`.
    pub fn truncate(&self, precision: u32) -> Poly {
        Poly {
            p: self.p,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| Self::local_degree(e) < precision)
                .map(|(e, c)| (*e, *c))
                .collect(),
        }
    }

    /// Whether the monomial var divides every term.
    pub fn divisible_by_var(&self, v: usize) -> bool {
        self.terms.keys().all(|e| e[v] > 0)
    }

    /// Exact division by `d`, viewing both as polynomials in T whose
    /// coefficients are polynomials in the T_ij. The leading T-coefficient
    /// of `d` must be a nonzero constant.
    pub fn div_exact_in_t(&self, d: &Poly) -> Option<Poly> {
        let dd = d.degree_in(T)?;
        let lead: Vec<(&Exp, &u64)> = d.terms.iter().filter(|(e, _)| e[T] == dd).collect();
        assert!(
            lead.len() == 1 && Self::local_degree(lead[0].0) == 0,
            "leading coefficient of the divisor must be a constant"
        );
        let p = self.p;
        let lead_inv = inv_mod(*lead[0].1, p);
        let top = match self.degree_in(T) {
            None => return Some(Poly::zero(p)),
            Some(t) if t < dd => return None,
            Some(t) => t as usize,
        };
        // slices by T-degree, keyed by the local exponents
        let mut rem: Vec<HashMap<[u32; 3], u64>> = vec![HashMap::new(); top + 1];
        for (e, c) in &self.terms {
            rem[e[T] as usize].insert([e[1], e[2], e[3]], *c);
        }
        let dterms: Vec<(usize, [u32; 3], u64)> =
            d.terms.iter().map(|(e, c)| (e[T] as usize, [e[1], e[2], e[3]], *c)).collect();
        let dd = dd as usize;
        let mut q = Poly::zero(p);
        for deg in (dd..=top).rev() {
            let step: Vec<([u32; 3], u64)> = rem[deg]
                .iter()
                .filter(|(_, c)| **c != 0)
                .map(|(x, c)| (*x, mulmod(*c, lead_inv, p)))
                .collect();
            for (x, c) in &step {
                q.add_term([(deg - dd) as u32, x[0], x[1], x[2]], *c);
                for (j, ex, dc) in &dterms {
                    let slot = rem[deg - dd + j].entry([x[0] + ex[0], x[1] + ex[1], x[2] + ex[2]]).or_insert(0);
                    *slot = (*slot + p - mulmod(*c, *dc, p)) % p;
                }
            }
        }
        rem[..dd].iter().all(|m| m.values().all(|c| *c == 0)).then_some(q)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut factors: Vec<String> = Vec::new();
                if *c != 1 || e.iter().all(|&x| x == 0) {
                    factors.push(c.to_string());
                }
                for (v, &n) in e.iter().enumerate() {
                    match n {
                        0 => {}
                        1 => factors.push(VAR_NAMES[v].to_string()),
                        _ => factors.push(format!("{}^{n}", VAR_NAMES[v])),
                    }
                }
                factors.join("*")
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}
