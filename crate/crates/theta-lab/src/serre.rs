//! Serre-weight combinatorics for GSp₄: tame inertial types, Herzig's set,
//! entailment targets, Fontaine–Laffaille predicates and weight recipes.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{span_rank, Fp, Matrix};
use crate::thetalocal::{cycle_digits, global_theta_shift, reflection_digits};
use crate::weights::{
    alcove_of, autweight_convert, is_delta_generic, is_p_restricted, is_regular, jh_factors, AlcoveLabel, ConvertDirection, Gen,
    pair, PosRoot, Weight, WeylElement, RHO,
};

fn modulus(p: u64, niveau: u32) -> u64 {
    p.pow(niveau) - 1
}

/// ω_t^e, stored at its minimal niveau with e ∈ [0, p^t − 2].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameChar {
    #[serde(skip)]
    pub p: u64,
    pub niveau: u32,
    #[serde(rename = "exp")]
    pub exponent: u64,
}

impl TameChar {
    pub fn new(p: u64, niveau: u32, exponent: i64) -> Self {
        assert!(matches!(niveau, 1 | 2 | 4), "niveau {niveau} not in {{1,2,4}}");
        let m = modulus(p, niveau);
        let e = exponent.rem_euclid(m as i64) as u64;
        for s in [1, 2] {
            if s < niveau && niveau % s == 0 {
                let f = m / modulus(p, s);
                if e % f == 0 {
                    return TameChar { p, niveau: s, exponent: e / f };
                }
            }
        }
        TameChar { p, niveau, exponent: e }
    }

    /// ω = ω₁.
    pub fn omega(p: u64, e: i64) -> Self {
        Self::new(p, 1, e)
    }

    /// Exponent after lifting to niveau `n`, a multiple of the niveau.
    pub fn lift(&self, n: u32) -> u64 {
        assert_eq!(n % self.niveau, 0);
        let f = modulus(self.p, n) / modulus(self.p, self.niveau);
        (self.exponent as u128 * f as u128 % modulus(self.p, n) as u128) as u64
    }

    pub fn frobenius(&self) -> Self {
        Self::new(self.p, self.niveau, (self.exponent * self.p) as i64)
    }

    /// The character times ω^j.
    pub fn twist(&self, j: i64) -> Self {
        let f = modulus(self.p, self.niveau) / (self.p - 1);
        let m = modulus(self.p, self.niveau) as i64;
        Self::new(self.p, self.niveau, self.exponent as i64 + j.rem_euclid(m) * f as i64 % m)
    }
}

impl fmt::Display for TameChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ω{}^{}", self.niveau, self.exponent)
    }
}

/// The (μ, w) a type was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub mu: Weight,
    pub w: WeylElement,
}

/// A multiset of four tame characters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TameJson", into = "TameJson")]
pub struct TameInertialType {
    pub p: u64,
    chars: Vec<TameChar>,
    pub provenance: Option<Provenance>,
}

#[derive(Serialize, Deserialize)]
struct TameJson {
    p: u64,
    chars: Vec<TameChar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

impl From<TameInertialType> for TameJson {
    fn from(t: TameInertialType) -> Self {
        TameJson { p: t.p, chars: t.chars, provenance: t.provenance }
    }
}

impl TryFrom<TameJson> for TameInertialType {
    type Error = Error;

    fn try_from(j: TameJson) -> Result<Self> {
        if j.chars.len() != 4 {
            return Err(Error::Precondition(format!("a tame type has 4 characters, got {}", j.chars.len())));
        }
        let chars = j.chars.iter().map(|c| TameChar::new(j.p, c.niveau, c.exponent as i64)).collect();
        let t = TameInertialType::new(j.p, chars, j.provenance);
        if !t.is_frobenius_stable() {
            return Err(Error::Precondition("character multiset is not Frobenius-stable".into()));
        }
        Ok(t)
    }
}

impl TameInertialType {
    pub fn new(p: u64, mut chars: Vec<TameChar>, provenance: Option<Provenance>) -> Self {
        chars.sort();
        TameInertialType { p, chars, provenance }
    }

    pub fn chars(&self) -> &[TameChar] {
        &self.chars
    }

    fn common_niveau(&self) -> u32 {
        self.chars.iter().map(|c| c.niveau).max().unwrap_or(1)
    }

    /// Sorted exponents at niveau `n`.
    pub fn exponents_at(&self, n: u32) -> Vec<u64> {
        let mut v: Vec<u64> = self.chars.iter().map(|c| c.lift(n)).collect();
        v.sort_unstable();
        v
    }

    pub fn is_frobenius_stable(&self) -> bool {
        let n = self.common_niveau();
        let m = modulus(self.p, n) as u128;
        let mut fr: Vec<u64> =
            self.exponents_at(n).iter().map(|&e| (e as u128 * self.p as u128 % m) as u64).collect();
        fr.sort_unstable();
        fr == self.exponents_at(n)
    }

    pub fn twist(&self, j: i64) -> Self {
        Self::new(self.p, self.chars.iter().map(|c| c.twist(j)).collect(), self.provenance)
    }
}

impl fmt::Display for TameInertialType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chars.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Multiset equality after lifting to a common niveau.
pub fn tame_equal(t1: &TameInertialType, t2: &TameInertialType) -> bool {
    let n = t1.common_niveau().max(t2.common_niveau());
    t1.p == t2.p && t1.exponents_at(n) == t2.exponents_at(n)
}

/// Equality up to a power of the cyclotomic character.
pub fn tame_equal_up_to_twist(t1: &TameInertialType, t2: &TameInertialType) -> bool {
    (0..t1.p as i64 - 1).any(|j| tame_equal(&t1.twist(j), t2))
}

/// How τ(μ, w) turns (μ̄, w) into exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TameConvention {
    /// s0 acts on the dual torus as the long-root permutation and s1 as the short one.
    pub dual_swap: bool,
    /// Use w^{−i} instead of w^{i} in the i-th term.
    pub inverse_powers: bool,
    /// Start the powers of w at 1 instead of 0.
    pub start_at_one: bool,
}

impl TameConvention {
    pub const CALIBRATED: TameConvention =
        TameConvention { dual_swap: true, inverse_powers: false, start_at_one: false };

    pub fn all() -> Vec<TameConvention> {
        let mut out = Vec::new();
        for dual_swap in [true, false] {
            for inverse_powers in [false, true] {
                for start_at_one in [false, true] {
                    out.push(TameConvention { dual_swap, inverse_powers, start_at_one });
                }
            }
        }
        out
    }

    fn permute(self, g: Gen, d: [i64; 4]) -> [i64; 4] {
        let long = matches!(g, Gen::S0) == self.dual_swap;
        if long {
            [d[1], d[0], d[3], d[2]]
        } else {
            [d[0], d[2], d[1], d[3]]
        }
    }

    fn act(self, w: WeylElement, d: [i64; 4]) -> [i64; 4] {
        w.word().iter().rev().fold(d, |v, &g| self.permute(g, v))
    }
}

/// μ̄ = ((a+b+c)/2, (a−b+c)/2, c) as a diagonal cocharacter (x₁, x₂, c−x₂, c−x₁).
pub fn mu_bar_diagonal(mu: Weight) -> Result<[i64; 4]> {
    let c = mu.c.ok_or_else(|| Error::Parity(format!("{mu} has no central character")))?;
    if (mu.a + mu.b + c).rem_euclid(2) != 0 {
        return Err(Error::Parity(format!("a+b and c differ in parity for {mu}")));
    }
    let x1 = (mu.a + mu.b + c) / 2;
    let x2 = (mu.a - mu.b + c) / 2;
    Ok([x1, x2, c - x2, c - x1])
}

/// τ(μ, w) with the calibrated convention.
pub fn tame_type(mu: Weight, w: WeylElement, p: u64) -> Result<TameInertialType> {
    tame_type_with(mu, w, p, TameConvention::CALIBRATED)
}

pub fn tame_type_with(mu: Weight, w: WeylElement, p: u64, conv: TameConvention) -> Result<TameInertialType> {
    let d = mu_bar_diagonal(mu)?;
    let t = w.order();
    let m = modulus(p, t) as i64;
    let mut e = [0i64; 4];
    let mut pi = 1i64;
    for i in 0..t {
        let k = i + conv.start_at_one as u32;
        let wk = if conv.inverse_powers { w.inverse().pow(k) } else { w.pow(k) };
        let v = conv.act(wk, d);
        for j in 0..4 {
            e[j] = (e[j] + pi * v[j]).rem_euclid(m);
        }
        pi *= p as i64;
    }
    let chars = e.iter().map(|&x| TameChar::new(p, t, x)).collect();
    Ok(TameInertialType::new(p, chars, Some(Provenance { mu, w })))
}

/// The local Galois families, by the conjugacy class of w.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GaloisCase {
    IrredS0S1,
    IrredS1S0,
    Endoscopic,
    SiegelOrd,
    SiegelNonOrd,
    KlingenOrd,
    KlingenNonOrd,
    Borel,
}

impl GaloisCase {
    pub const ALL: [GaloisCase; 8] = [
        GaloisCase::IrredS0S1,
        GaloisCase::IrredS1S0,
        GaloisCase::Endoscopic,
        GaloisCase::SiegelOrd,
        GaloisCase::SiegelNonOrd,
        GaloisCase::KlingenOrd,
        GaloisCase::KlingenNonOrd,
        GaloisCase::Borel,
    ];

    pub fn weyl_element(self) -> WeylElement {
        match self {
            GaloisCase::IrredS0S1 => WeylElement::S0S1,
            GaloisCase::IrredS1S0 => WeylElement::S1S0,
            GaloisCase::Endoscopic => WeylElement::W0,
            GaloisCase::SiegelOrd => WeylElement::S0,
            GaloisCase::SiegelNonOrd => WeylElement::S1S0S1,
            GaloisCase::KlingenOrd => WeylElement::S1,
            GaloisCase::KlingenNonOrd => WeylElement::S0S1S0,
            GaloisCase::Borel => WeylElement::Id,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GaloisCase::IrredS0S1 => "irred-s0s1",
            GaloisCase::IrredS1S0 => "irred-s1s0",
            GaloisCase::Endoscopic => "endoscopic",
            GaloisCase::SiegelOrd => "siegel-ord",
            GaloisCase::SiegelNonOrd => "siegel-nonord",
            GaloisCase::KlingenOrd => "klingen-ord",
            GaloisCase::KlingenNonOrd => "klingen-nonord",
            GaloisCase::Borel => "borel",
        }
    }

    pub fn parse(s: &str) -> Option<GaloisCase> {
        GaloisCase::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// μ = (k−1, l−2, k+l−3).
pub fn case_mu(k: i64, l: i64) -> Weight {
    Weight { a: k - 1, b: l - 2, c: Some(k + l - 3) }
}

fn ind2(p: u64, e: i64) -> [TameChar; 2] {
    [TameChar::new(p, 2, e), TameChar::new(p, 2, e * p as i64)]
}

fn irred4(p: u64, a: i64) -> Vec<TameChar> {
    let p_i = p as i64;
    (0..4).map(|i| TameChar::new(p, 4, a * p_i.pow(i))).collect()
}

/// The character data of each family for μ = (k−1, l−2, k+l−3).
pub fn tame_type_from_case(case: GaloisCase, k: i64, l: i64, p: u64) -> TameInertialType {
    let (a, kk, ll) = (k + l - 3, k - 1, l - 2);
    let pi = p as i64;
    let w = |e| TameChar::omega(p, e);
    let chars: Vec<TameChar> = match case {
        GaloisCase::IrredS0S1 => irred4(p, a + ll * pi + kk * pi.pow(3)),
        GaloisCase::IrredS1S0 => irred4(p, a + kk * pi + ll * pi.pow(3)),
        GaloisCase::Endoscopic => [ind2(p, ll + kk * pi), ind2(p, a * pi)].concat(),
        GaloisCase::SiegelNonOrd => [ind2(p, kk), ind2(p, ll + a * pi)].concat(),
        GaloisCase::SiegelOrd => [ind2(p, kk + a * pi), ind2(p, ll)].concat(),
        GaloisCase::KlingenOrd => [vec![w(a), w(0)], ind2(p, ll + kk * pi).to_vec()].concat(),
        GaloisCase::KlingenNonOrd => [vec![w(kk), w(ll)], ind2(p, a).to_vec()].concat(),
        GaloisCase::Borel => vec![w(a), w(kk), w(ll), w(0)],
    };
    let prov = Provenance { mu: case_mu(k, l), w: case.weyl_element() };
    TameInertialType::new(p, chars, Some(prov))
}

/// The Borel family with the third diagonal entry ω^{l−1}, as displayed in
/// the source; it differs from τ(μ, 1) by that one exponent.
pub fn borel_as_displayed(k: i64, l: i64, p: u64) -> TameInertialType {
    let chars = [k + l - 3, k - 1, l - 1, 0].iter().map(|&e| TameChar::omega(p, e)).collect();
    TameInertialType::new(p, chars, Some(Provenance { mu: case_mu(k, l), w: WeylElement::Id }))
}

/// Conventions under which τ(μ, w) matches every family in `cases` for all
/// the given (k, l).
pub fn calibrate_convention(p: u64, kls: &[(i64, i64)], cases: &[GaloisCase]) -> Vec<TameConvention> {
    TameConvention::all()
        .into_iter()
        .filter(|&conv| {
            kls.iter().all(|&(k, l)| {
                cases.iter().all(|&c| {
                    tame_type_with(case_mu(k, l), c.weyl_element(), p, conv)
                        .is_ok_and(|t| tame_equal(&t, &tame_type_from_case(c, k, l, p)))
                })
            })
        })
        .collect()
}

/// (k, l) with (k−1, l−2) p-restricted.
pub fn admissible_case_weights(p: u64) -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for l in 2..p as i64 + 2 {
        for k in l - 1..l + p as i64 - 1 {
            if is_p_restricted(Weight::new(k - 1, l - 2), p) {
                out.push((k, l));
            }
        }
    }
    out
}

/// Dominant p-restricted weights (a, b).
pub fn restricted_box(p: u64) -> Vec<Weight> {
    let p = p as i64;
    (0..p).flat_map(|b| (b..b + p).map(move |a| Weight::new(a, b))).collect()
}

fn twist_classes(tau: &TameInertialType) -> HashSet<Vec<u64>> {
    (0..tau.p as i64 - 1).map(|j| tau.twist(j).exponents_at(4)).collect()
}

/// Regular μ'' such that τ(μ''+ρ, w'') agrees with τ up to twist for some w''.
pub fn obvious_weights(tau: &TameInertialType, p: u64) -> BTreeSet<Weight> {
    let targets = twist_classes(tau);
    restricted_box(p)
        .into_iter()
        .filter(|&mu| is_regular(mu, p))
        .filter(|&mu| {
            let s = mu.plus(RHO);
            let lifted = Weight { a: s.a, b: s.b, c: Some(s.a + s.b) };
            WeylElement::ALL.iter().any(|&w| {
                tame_type(lifted, w, p).is_ok_and(|t| targets.contains(&t.exponents_at(4)))
            })
        })
        .collect()
}

/// Smallest superset of `seed` in X₁ such that F(λ) is included whenever a
/// Jordan–Hölder factor of V(λ) is.
pub fn herzig_closure(seed: &BTreeSet<Weight>, p: u64) -> BTreeSet<Weight> {
    let candidates: Vec<(Weight, Vec<Weight>)> =
        restricted_box(p).into_iter().filter_map(|l| jh_factors(l, p).ok().map(|f| (l, f))).collect();
    let mut set = seed.clone();
    loop {
        let before = set.len();
        for (lambda, factors) in &candidates {
            if !set.contains(lambda) && factors.iter().any(|f| set.contains(f)) {
                set.insert(*lambda);
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HerzigSet {
    pub weights: BTreeSet<Weight>,
    pub obvious: BTreeSet<Weight>,
    pub shadows: BTreeSet<Weight>,
}

pub fn herzig_set(tau: &TameInertialType, p: u64) -> HerzigSet {
    let obvious = obvious_weights(tau, p);
    let weights: BTreeSet<Weight> =
        herzig_closure(&obvious, p).into_iter().filter(|&w| is_regular(w, p)).collect();
    let shadows = weights.difference(&obvious).copied().collect();
    HerzigSet { weights, obvious, shadows }
}

/// δ-generic for μ+ρ, and also away from the lines where 2⟨μ+ρ, γ∨⟩ is within δ of
/// (p−1)ℤ. On those lines two obvious weights can be linked, and the closure loses weights.
pub fn is_tame_generic(mu: Weight, p: u64, delta: u64) -> bool {
    let shifted = mu.plus(RHO);
    is_delta_generic(shifted, p, delta)
        && PosRoot::ALL.iter().all(|&g| {
            let r = (2 * pair(shifted, g)).rem_euclid(p as i64 - 1) as u64;
            r.min(p - 1 - r) >= delta
        })
}

/// λ₀ = (a, b) ∈ C0 ↦ (λ₁, λ₂) = ((p−b−3, p−a−3), (p+b−1, p−a−3)).
pub fn entailment_targets(lambda0: Weight, p: u64) -> Result<(Weight, Weight)> {
    let (a, b, pi) = (lambda0.a, lambda0.b, p as i64);
    if alcove_of(lambda0, p) != AlcoveLabel::C0 || b < 1 || a + b >= pi - 3 {
        return Err(Error::Precondition(format!("{lambda0} needs C0, b ≥ 1 and a+b < p−3 (p={p})")));
    }
    let l1 = Weight::new(pi - b - 3, pi - a - 3);
    let l2 = Weight::new(pi + b - 1, pi - a - 3);
    if alcove_of(l1, p) != AlcoveLabel::C1 || alcove_of(l2, p) != AlcoveLabel::C2 {
        return Err(Error::TheoremViolation(format!("entailment targets {l1}, {l2} left C1/C2")));
    }
    Ok((l1, l2))
}

/// The four ways a C0 weight (k, l) can have a second C0 weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompanionCase {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
    #[serde(rename = "4")]
    Four,
}

impl CompanionCase {
    pub const ALL: [CompanionCase; 4] =
        [CompanionCase::One, CompanionCase::Two, CompanionCase::Three, CompanionCase::Four];

    pub fn index(self) -> u8 {
        self as u8 + 1
    }

    pub fn parse(s: &str) -> Option<CompanionCase> {
        CompanionCase::ALL.into_iter().find(|c| c.index().to_string() == s)
    }

    pub fn predicate_id(self) -> &'static str {
        match self {
            CompanionCase::One => "phi(gr^{k-1}) + phi(gr^{k+l-3}) = M^{k-1}",
            CompanionCase::Two => "phi(gr^{k+l-3}) in M^{k-1}, dim(D_{l-2} & M^{k-1}) = 1",
            CompanionCase::Three => "M^{k-1} in D_{k-1}, phi(gr^{k-1}) in M^{k-1}",
            CompanionCase::Four => "D_{l-2} = M^{k-1}",
        }
    }

    pub fn galois_types(self) -> &'static str {
        match self {
            CompanionCase::One => "Borel ordinary or Siegel ordinary split",
            CompanionCase::Two => "Klingen ordinary or Irred(s0s1)",
            CompanionCase::Three => "Klingen non-ordinary or Irred(s1s0)",
            CompanionCase::Four => "Endoscopic or Siegel non-ordinary",
        }
    }

    pub fn weight(self, k: i64, l: i64, p: u64) -> Weight {
        let p = p as i64;
        match self {
            CompanionCase::One => Weight::new(p - k + 1, l),
            CompanionCase::Two => Weight::new(p - k + 2, l + 1),
            CompanionCase::Three => Weight::new(p - k + 2, l - 1),
            CompanionCase::Four => Weight::new(p - k + 3, l),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanionCandidate {
    pub case: CompanionCase,
    pub weight: Weight,
    pub predicate: String,
    pub galois_types: String,
}

/// Candidate second C0 weights of (k, l), meaningful for k ≥ l ≥ 3 and k+l ≤ p+1.
pub fn companion_cases(k: i64, l: i64, p: u64) -> Vec<CompanionCandidate> {
    CompanionCase::ALL
        .into_iter()
        .map(|c| CompanionCandidate {
            case: c,
            weight: c.weight(k, l, p),
            predicate: c.predicate_id().to_string(),
            galois_types: c.galois_types().to_string(),
        })
        .collect()
}

/// A Fontaine–Laffaille module of weights {0, l−2, k−1, k+l−3} on the basis
/// e₀, e_{l−2}, e_{k−1}, e_{k+l−3}; column j of φ is φ(gr^{jump j}).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FlJson", into = "FlJson")]
pub struct FLModule {
    pub p: u64,
    pub k: i64,
    pub l: i64,
    phi: [[u64; 4]; 4],
    j: [[u64; 4]; 4],
}

#[derive(Serialize, Deserialize)]
struct FlJson {
    p: u64,
    k: i64,
    l: i64,
    phi: [[i64; 4]; 4],
    #[serde(rename = "J")]
    j: [[i64; 4]; 4],
}

impl From<FLModule> for FlJson {
    fn from(m: FLModule) -> Self {
        let c = |x: [[u64; 4]; 4]| x.map(|r| r.map(|v| v as i64));
        FlJson { p: m.p, k: m.k, l: m.l, phi: c(m.phi), j: c(m.j) }
    }
}

impl TryFrom<FlJson> for FLModule {
    type Error = Error;

    fn try_from(j: FlJson) -> Result<Self> {
        FLModule::with_form(j.p, j.k, j.l, j.phi, j.j)
    }
}

/// The standard form pairing e₀ with e_{k+l−3} and e_{l−2} with e_{k−1}.
pub const STANDARD_J: [[i64; 4]; 4] = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]];

fn fp_matrix(m: &[[u64; 4]; 4], p: u64) -> Matrix<Fp> {
    Matrix::from_rows(m.iter().map(|r| r.iter().map(|&v| Fp::new(v as i64, p)).collect()).collect(), Fp::new(0, p))
}

fn mat_mul(a: &[[u64; 4]; 4], b: &[[u64; 4]; 4], p: u64) -> [[u64; 4]; 4] {
    let mut out = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|t| a[i][t] * b[t][j] % p).sum::<u64>() % p;
        }
    }
    out
}

fn transpose(a: &[[u64; 4]; 4]) -> [[u64; 4]; 4] {
    let mut out = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i];
        }
    }
    out
}

impl FLModule {
    pub fn new(p: u64, k: i64, l: i64, phi: [[i64; 4]; 4]) -> Result<Self> {
        Self::with_form(p, k, l, phi, STANDARD_J)
    }

    pub fn with_form(p: u64, k: i64, l: i64, phi: [[i64; 4]; 4], j: [[i64; 4]; 4]) -> Result<Self> {
        let jumps = [0, l - 2, k - 1, k + l - 3];
        if !jumps.windows(2).all(|w| w[0] < w[1]) || jumps[3] > p as i64 - 2 {
            return Err(Error::InvalidModule(format!("jumps {jumps:?} not increasing within [0, p−2]")));
        }
        let red = |m: [[i64; 4]; 4]| m.map(|r| r.map(|v| v.rem_euclid(p as i64) as u64));
        let (phi, j) = (red(phi), red(j));
        if fp_matrix(&j, p).rank() != 4 || transpose(&j) != j.map(|r| r.map(|v| (p - v) % p)) {
            return Err(Error::InvalidModule("J is not a nondegenerate alternating form".into()));
        }
        if fp_matrix(&phi, p).rank() != 4 {
            return Err(Error::InvalidModule("phi is not invertible".into()));
        }
        let g = mat_mul(&mat_mul(&transpose(&phi), &j, p), &phi, p);
        let off_antidiagonal = (0..4).any(|r| (0..4).any(|c| r + c != 3 && g[r][c] != 0));
        if off_antidiagonal || (0..4).any(|r| g[r][3 - r] == 0) {
            return Err(Error::InvalidModule("phi does not carry the graded pairing to the form".into()));
        }
        Ok(FLModule { p, k, l, phi, j })
    }

    pub fn jumps(&self) -> [i64; 4] {
        [0, self.l - 2, self.k - 1, self.k + self.l - 3]
    }

    pub fn phi(&self) -> [[u64; 4]; 4] {
        self.phi
    }

    pub fn form(&self) -> [[u64; 4]; 4] {
        self.j
    }

    /// φ(gr^{jump i}).
    fn image(&self, i: usize) -> Vec<Fp> {
        (0..4).map(|r| Fp::new(self.phi[r][i] as i64, self.p)).collect()
    }

    fn basis(&self, i: usize) -> Vec<Fp> {
        (0..4).map(|r| Fp::new((r == i) as i64, self.p)).collect()
    }

    /// M^{jump i} = span(e_i, …, e₃).
    pub fn hodge(&self, i: usize) -> Vec<Vec<Fp>> {
        (i..4).map(|r| self.basis(r)).collect()
    }

    /// D_{jump i} = Σ_{j ≤ i} φ(gr^{jump j}).
    pub fn conjugate(&self, i: usize) -> Vec<Vec<Fp>> {
        (0..=i).map(|r| self.image(r)).collect()
    }

    fn zero(&self) -> Fp {
        Fp::new(0, self.p)
    }

    fn dim(&self, vs: &[Vec<Fp>]) -> usize {
        span_rank(vs, self.zero())
    }

    fn contained(&self, a: &[Vec<Fp>], b: &[Vec<Fp>]) -> bool {
        self.dim(&[a, b].concat()) == self.dim(b)
    }

    fn equal(&self, a: &[Vec<Fp>], b: &[Vec<Fp>]) -> bool {
        self.contained(a, b) && self.contained(b, a)
    }

    fn intersection_dim(&self, a: &[Vec<Fp>], b: &[Vec<Fp>]) -> usize {
        self.dim(a) + self.dim(b) - self.dim(&[a, b].concat())
    }
}

/// The conjugate filtration as (jump, basis of D_jump) pairs.
pub fn fl_conjugate_filtration(m: &FLModule) -> Vec<(i64, Vec<Vec<u64>>)> {
    let jumps = m.jumps();
    (0..4)
        .map(|i| {
            let vs = m.conjugate(i).into_iter().map(|v| v.iter().map(|x| x.v).collect()).collect();
            (jumps[i], vs)
        })
        .collect()
}

pub fn fl_case_predicate(m: &FLModule, case: CompanionCase) -> bool {
    // basis indices: 0 ↔ 0, 1 ↔ l−2, 2 ↔ k−1, 3 ↔ k+l−3
    let m_k1 = m.hodge(2);
    match case {
        CompanionCase::One => m.equal(&[m.image(2), m.image(3)], &m_k1) && m.dim(&[m.image(2), m.image(3)]) == 2,
        CompanionCase::Two => m.contained(&[m.image(3)], &m_k1) && m.intersection_dim(&m.conjugate(1), &m_k1) == 1,
        CompanionCase::Three => m.contained(&m_k1, &m.conjugate(2)) && m.contained(&[m.image(2)], &m_k1),
        CompanionCase::Four => m.equal(&m.conjugate(1), &m_k1),
    }
}

/// The Siegel non-ordinary family φ(x, y).
pub fn siegel_nonord_family(p: u64, k: i64, l: i64, x: i64, y: i64) -> Result<FLModule> {
    FLModule::new(p, k, l, [[0, 0, 1, 0], [x, 0, -y, 1], [1, 0, 0, 0], [y, -1, 0, 0]])
}

/// Steps of a weight recipe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeStep {
    #[serde(rename = "theta1")]
    ApplyTheta1,
    #[serde(rename = "theta2")]
    ApplyTheta2,
    #[serde(rename = "theta3")]
    ApplyTheta3,
    #[serde(rename = "theta4")]
    ApplyTheta4,
    #[serde(rename = "theta_cycle")]
    ApplyThetaCycle,
    #[serde(rename = "theta4_refl")]
    ApplyTheta4Refl,
    #[serde(rename = "theta_alpha_beta")]
    ApplyThetaAlphaBeta,
    #[serde(rename = "h1")]
    MultH1,
    #[serde(rename = "h2")]
    MultH2,
    #[serde(rename = "div_h1")]
    DivH1,
    #[serde(rename = "div_h2")]
    DivH2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Apply,
    Reverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub step: RecipeStep,
    pub dir: Direction,
}

pub type WeightPath = Vec<PathStep>;

pub fn path(steps: &[(RecipeStep, Direction)]) -> WeightPath {
    steps.iter().map(|&(step, dir)| PathStep { step, dir }).collect()
}

impl RecipeStep {
    /// Constant weight shift, for the steps that have one.
    pub fn shift(self, p: u64) -> Option<(i64, i64)> {
        let pi = p as i64;
        let neg = |(a, b): (i64, i64)| (-a, -b);
        match self {
            RecipeStep::ApplyTheta1 => Some(global_theta_shift(1, p)),
            RecipeStep::ApplyTheta2 => Some(global_theta_shift(2, p)),
            RecipeStep::ApplyTheta3 => Some(global_theta_shift(3, p)),
            RecipeStep::ApplyTheta4 => Some((pi - 1, 0)),
            RecipeStep::MultH1 => Some((pi - 1, pi - 1)),
            RecipeStep::MultH2 => Some((pi, -1)),
            RecipeStep::DivH1 => Some(neg((pi - 1, pi - 1))),
            RecipeStep::DivH2 => Some(neg((pi, -1))),
            _ => None,
        }
    }

    /// Image of (k, l) under the step.
    pub fn forward(self, (k, l): (i64, i64), p: u64) -> (i64, i64) {
        if let Some((dk, dl)) = self.shift(p) {
            return (k + dk, l + dl);
        }
        let pi = p as i64;
        match self {
            RecipeStep::ApplyThetaCycle => {
                let (_, a) = cycle_digits(k, p);
                (2 * pi - 2 * a + k + 2, l)
            }
            RecipeStep::ApplyTheta4Refl => {
                let (_, b) = reflection_digits(k, l, p);
                (k - b - 1, l + b + 1)
            }
            RecipeStep::ApplyThetaAlphaBeta => (pi - l + 3, pi - k + 3),
            _ => unreachable!("shift steps handled above"),
        }
    }

    /// The unique (k, l) mapped to `target`, if any.
    pub fn backward(self, target: (i64, i64), p: u64) -> Result<(i64, i64)> {
        if let Some((dk, dl)) = self.shift(p) {
            return Ok((target.0 - dk, target.1 - dl));
        }
        let (k, l) = target;
        let span = 2 * p as i64 + 2;
        let candidates: Vec<(i64, i64)> = match self {
            RecipeStep::ApplyThetaCycle => (k - span..=k + span).map(|x| (x, l)).collect(),
            RecipeStep::ApplyTheta4Refl => (0..=span).map(|d| (k + d, l - d)).collect(),
            _ => vec![self.forward(target, p)],
        };
        let hits: Vec<(i64, i64)> = candidates.into_iter().filter(|&w| self.forward(w, p) == target).collect();
        match hits.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Precondition(format!("{self:?} has {} preimages of {target:?}", hits.len()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeStepReport {
    pub step: PathStep,
    pub weight: (i64, i64),
    pub alcove: AlcoveLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeReport {
    pub start: (i64, i64),
    pub steps: Vec<RecipeStepReport>,
    pub endpoint: (i64, i64),
    pub target: Option<(i64, i64)>,
    pub matches: bool,
    pub error: Option<String>,
}

fn automorphic_alcove((k, l): (i64, i64), p: u64) -> AlcoveLabel {
    alcove_of(autweight_convert(Weight::new(k, l), ConvertDirection::AutomorphicToIntrinsic), p)
}

/// Folds the steps of `path` from `start`; alcoves are those of (k−3, l−3).
pub fn recipe_check(path: &WeightPath, start: (i64, i64), target: Option<(i64, i64)>, p: u64) -> RecipeReport {
    let mut cur = start;
    let mut steps = Vec::new();
    let mut error = None;
    for s in path {
        let next = match s.dir {
            Direction::Apply => Ok(s.step.forward(cur, p)),
            Direction::Reverse => s.step.backward(cur, p),
        };
        match next {
            Ok(w) => cur = w,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        }
        steps.push(RecipeStepReport { step: *s, weight: cur, alcove: automorphic_alcove(cur, p) });
    }
    let matches = error.is_none() && target.is_none_or(|t| t == cur);
    RecipeReport { start, steps, endpoint: cur, target, matches, error }
}

/// (a, b) ↦ (a, 4 − b), between H¹ and H⁰ labels.
pub fn h1_relabel((a, b): (i64, i64)) -> (i64, i64) {
    (a, 4 - b)
}

/// A named recipe: start, path, declared endpoint, and the companion case
/// whose weight the endpoint represents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub name: String,
    pub start: (i64, i64),
    pub path: WeightPath,
    pub target: (i64, i64),
    pub on_h1: bool,
    pub case: CompanionCase,
}

/// The three C0 recipes and the companion path for (k, l).
pub fn standard_recipes(k: i64, l: i64, p: u64) -> Vec<Recipe> {
    use Direction::*;
    use RecipeStep::*;
    let pi = p as i64;
    vec![
        Recipe {
            name: "recipe-1".into(),
            start: (k, l),
            path: path(&[(ApplyThetaCycle, Apply), (MultH1, Apply), (ApplyTheta2, Reverse)]),
            target: (pi - k + 1, l),
            on_h1: false,
            case: CompanionCase::One,
        },
        Recipe {
            name: "recipe-2".into(),
            start: (k, l),
            path: path(&[(ApplyThetaCycle, Apply), (MultH2, Reverse)]),
            target: (pi - k + 2, l + 1),
            on_h1: false,
            case: CompanionCase::Two,
        },
        Recipe {
            name: "recipe-3".into(),
            start: (k, 4 - l),
            path: path(&[(ApplyThetaCycle, Apply), (MultH2, Reverse)]),
            target: (pi - k + 2, 5 - l),
            on_h1: true,
            case: CompanionCase::Three,
        },
        Recipe {
            name: "companion".into(),
            start: (k, 4 - l),
            path: path(&[(ApplyThetaCycle, Apply), (ApplyTheta4, Reverse)]),
            target: (pi - k + 3, 4 - l),
            on_h1: true,
            case: CompanionCase::Four,
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecipeOutcome {
    pub recipe: Recipe,
    pub report: RecipeReport,
    /// The endpoint, relabelled to H⁰ if needed, is the companion case weight.
    pub lands_on_case: bool,
}

pub fn check_standard_recipes(k: i64, l: i64, p: u64) -> Vec<RecipeOutcome> {
    standard_recipes(k, l, p)
        .into_iter()
        .map(|r| {
            let report = recipe_check(&r.path, r.start, Some(r.target), p);
            let label = if r.on_h1 { h1_relabel(report.endpoint) } else { report.endpoint };
            let w = r.case.weight(k, l, p);
            let lands_on_case = label == (w.a, w.b);
            RecipeOutcome { recipe: r, report, lands_on_case }
        })
        .collect()
}
