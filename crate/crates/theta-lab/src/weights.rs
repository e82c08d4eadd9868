//! Root datum of GSp₄, its Weyl group, p-restricted alcoves and affine linkage.
//!
//! Weights are pairs `(a, b)` in X*(T) with an optional central character `c`.
//! The simple roots are α = (1,−1) and β = (0,2), so β is long, and
//! ρ = (2,1). All alcove inequalities are evaluated on λ+ρ.
//!
//! Automorphic weights `(k, l)` of line bundles are related to intrinsic
//! weights by `(k, l) = λ + (3, 3)`. The line bundle 𝓛(k,l) comes from the
//! B-representation of weight `(l, k)`, so the Verma module attached to it has
//! highest weight `−s₀(k, l) = (−l, −k)`; see [`autweight_convert`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A character of the maximal torus, `(a, b)` plus optional central part `c`.
///
/// Equality, hashing and ordering only look at `(a, b)`.
#[derive(Clone, Copy, Debug)]
pub struct Weight {
    pub a: i64,
    pub b: i64,
    pub c: Option<i64>,
}

impl Weight {
    pub const fn new(a: i64, b: i64) -> Self {
        Weight { a, b, c: None }
    }

    /// Weight with central character; fails unless `a + b ≡ c (mod 2)`.
    pub fn with_central(a: i64, b: i64, c: i64) -> Result<Self> {
        if (a + b - c).rem_euclid(2) != 0 {
            return Err(Error::Parity(format!("a+b={} and c={c} differ in parity", a + b)));
        }
        Ok(Weight { a, b, c: Some(c) })
    }

    pub fn eq_with_central(&self, o: &Weight) -> bool {
        self.a == o.a && self.b == o.b && self.c == o.c
    }

    pub fn plus(self, o: Weight) -> Weight {
        Weight::new(self.a + o.a, self.b + o.b)
    }

    pub fn minus(self, o: Weight) -> Weight {
        Weight::new(self.a - o.a, self.b - o.b)
    }

    pub fn scale(self, n: i64) -> Weight {
        Weight::new(n * self.a, n * self.b)
    }

    pub fn neg(self) -> Weight {
        self.scale(-1)
    }

    /// Dominant for the Borel: ⟨λ,α∨⟩ ≥ 0 and ⟨λ,β∨⟩ ≥ 0.
    pub fn is_dominant(&self) -> bool {
        self.a >= self.b && self.b >= 0
    }

    /// Coefficients `(x, y)` with `self = xα + yβ`, if it lies in the root lattice.
    pub fn root_coordinates(&self) -> Option<(i64, i64)> {
        let x = self.a;
        let twice_y = self.b + self.a;
        (twice_y % 2 == 0).then_some((x, twice_y / 2))
    }
}

impl PartialEq for Weight {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl Eq for Weight {}

impl Hash for Weight {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (self.a, self.b).hash(state);
    }
}

impl PartialOrd for Weight {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Weight {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.a, self.b).cmp(&(o.a, o.b))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c {
            Some(c) => write!(f, "({},{};{})", self.a, self.b, c),
            None => write!(f, "({},{})", self.a, self.b),
        }
    }
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        match self.c {
            None => [self.a, self.b].serialize(s),
            Some(c) => {
                let mut st = s.serialize_struct("Weight", 3)?;
                st.serialize_field("a", &self.a)?;
                st.serialize_field("b", &self.b)?;
                st.serialize_field("c", &c)?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([i64; 2]),
            Full { a: i64, b: i64, c: Option<i64> },
        }
        Ok(match Repr::deserialize(d)? {
            Repr::Pair([a, b]) => Weight::new(a, b),
            Repr::Full { a, b, c } => Weight { a, b, c },
        })
    }
}

/// ρ, half the sum of positive roots (central part dropped).
pub const RHO: Weight = Weight::new(2, 1);

/// The four positive roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PosRoot {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "beta")]
    Beta,
    #[serde(rename = "alpha+beta")]
    AlphaBeta,
    #[serde(rename = "2alpha+beta")]
    TwoAlphaBeta,
}

impl PosRoot {
    pub const ALL: [PosRoot; 4] =
        [PosRoot::Alpha, PosRoot::Beta, PosRoot::AlphaBeta, PosRoot::TwoAlphaBeta];

    pub fn vector(self) -> Weight {
        match self {
            PosRoot::Alpha => Weight::new(1, -1),
            PosRoot::Beta => Weight::new(0, 2),
            PosRoot::AlphaBeta => Weight::new(1, 1),
            PosRoot::TwoAlphaBeta => Weight::new(2, 0),
        }
    }

    pub fn coroot(self) -> Weight {
        match self {
            PosRoot::Alpha => Weight::new(1, -1),
            PosRoot::Beta => Weight::new(0, 1),
            PosRoot::AlphaBeta => Weight::new(1, 1),
            PosRoot::TwoAlphaBeta => Weight::new(1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PosRoot::Alpha => "alpha",
            PosRoot::Beta => "beta",
            PosRoot::AlphaBeta => "alpha+beta",
            PosRoot::TwoAlphaBeta => "2alpha+beta",
        }
    }

    pub fn parse(s: &str) -> Option<PosRoot> {
        PosRoot::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// A root: a positive root and a sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub positive: PosRoot,
    pub negative: bool,
}

impl Root {
    pub fn pos(r: PosRoot) -> Self {
        Root { positive: r, negative: false }
    }

    pub fn neg(r: PosRoot) -> Self {
        Root { positive: r, negative: true }
    }

    fn sign(&self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn vector(&self) -> Weight {
        self.positive.vector().scale(self.sign())
    }

    pub fn coroot_vector(&self) -> Weight {
        self.positive.coroot().scale(self.sign())
    }

    pub fn all() -> Vec<Root> {
        PosRoot::ALL.iter().flat_map(|&r| [Root::pos(r), Root::neg(r)]).collect()
    }
}

impl From<PosRoot> for Root {
    fn from(r: PosRoot) -> Self {
        Root::pos(r)
    }
}

/// ⟨λ, γ∨⟩.
pub fn pair(lambda: Weight, gamma: impl Into<Root>) -> i64 {
    let c = gamma.into().coroot_vector();
    lambda.a * c.a + lambda.b * c.b
}

/// Simple reflections generating W.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    S0,
    S1,
}

impl Gen {
    fn act(self, (a, b): (i64, i64)) -> (i64, i64) {
        match self {
            Gen::S0 => (b, a),
            Gen::S1 => (a, -b),
        }
    }
}

/// One of the eight elements of the Weyl group, stored by its canonical
/// reduced word. The word `[g1, g2, ..., gn]` acts as g1 ∘ g2 ∘ … ∘ gn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeylElement {
    #[serde(rename = "1")]
    Id,
    #[serde(rename = "s0")]
    S0,
    #[serde(rename = "s1")]
    S1,
    #[serde(rename = "s0s1")]
    S0S1,
    #[serde(rename = "s1s0")]
    S1S0,
    #[serde(rename = "s0s1s0")]
    S0S1S0,
    #[serde(rename = "s1s0s1")]
    S1S0S1,
    #[serde(rename = "w0")]
    W0,
}

impl WeylElement {
    pub const ALL: [WeylElement; 8] = [
        WeylElement::Id,
        WeylElement::S0,
        WeylElement::S1,
        WeylElement::S0S1,
        WeylElement::S1S0,
        WeylElement::S0S1S0,
        WeylElement::S1S0S1,
        WeylElement::W0,
    ];

    pub fn word(self) -> &'static [Gen] {
        use Gen::*;
        match self {
            WeylElement::Id => &[],
            WeylElement::S0 => &[S0],
            WeylElement::S1 => &[S1],
            WeylElement::S0S1 => &[S0, S1],
            WeylElement::S1S0 => &[S1, S0],
            WeylElement::S0S1S0 => &[S0, S1, S0],
            WeylElement::S1S0S1 => &[S1, S0, S1],
            WeylElement::W0 => &[S0, S1, S0, S1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WeylElement::Id => "1",
            WeylElement::S0 => "s0",
            WeylElement::S1 => "s1",
            WeylElement::S0S1 => "s0s1",
            WeylElement::S1S0 => "s1s0",
            WeylElement::S0S1S0 => "s0s1s0",
            WeylElement::S1S0S1 => "s1s0s1",
            WeylElement::W0 => "w0",
        }
    }

    pub fn parse(s: &str) -> Option<WeylElement> {
        WeylElement::ALL.into_iter().find(|w| w.name() == s)
    }

    pub fn length(self) -> usize {
        self.word().len()
    }

    /// Linear action on X*(T).
    pub fn act(self, lambda: Weight) -> Weight {
        let (a, b) = self
            .word()
            .iter()
            .rev()
            .fold((lambda.a, lambda.b), |v, g| g.act(v));
        Weight::new(a, b)
    }

    /// Matrix of the action in the (a, b) basis, as images of (1,0) and (0,1).
    fn signature(self) -> [i64; 4] {
        let e1 = self.act(Weight::new(1, 0));
        let e2 = self.act(Weight::new(0, 1));
        [e1.a, e1.b, e2.a, e2.b]
    }

    fn from_signature(sig: [i64; 4]) -> WeylElement {
        WeylElement::ALL
            .into_iter()
            .find(|w| w.signature() == sig)
            .expect("closed under composition")
    }

    /// Composition `self ∘ other`.
    pub fn compose(self, other: WeylElement) -> WeylElement {
        let e1 = self.act(other.act(Weight::new(1, 0)));
        let e2 = self.act(other.act(Weight::new(0, 1)));
        WeylElement::from_signature([e1.a, e1.b, e2.a, e2.b])
    }

    pub fn inverse(self) -> WeylElement {
        WeylElement::ALL
            .into_iter()
            .find(|&w| self.compose(w) == WeylElement::Id)
            .expect("group")
    }

    pub fn pow(self, n: u32) -> WeylElement {
        (0..n).fold(WeylElement::Id, |acc, _| acc.compose(self))
    }

    /// Order of the element in W.
    pub fn order(self) -> u32 {
        (1..=8).find(|&n| self.pow(n) == WeylElement::Id).expect("finite group")
    }

    pub fn from_gen(g: Gen) -> WeylElement {
        match g {
            Gen::S0 => WeylElement::S0,
            Gen::S1 => WeylElement::S1,
        }
    }
}

/// W_M = ⟨s0⟩, the Weyl group of the Siegel Levi.
pub fn w_m() -> [WeylElement; 2] {
    [WeylElement::Id, WeylElement::S0]
}

/// Minimal length representatives of W_M \ W.
pub fn w_m_reps() -> [WeylElement; 4] {
    [WeylElement::Id, WeylElement::S1, WeylElement::S1S0, WeylElement::S1S0S1]
}

/// w·λ = w(λ+ρ) − ρ.
pub fn dot_act(w: WeylElement, lambda: Weight) -> Weight {
    w.act(lambda.plus(RHO)).minus(RHO)
}

/// p-restricted alcoves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlcoveLabel {
    C0,
    C1,
    C2,
    C3,
    #[serde(rename = "non-alcove")]
    NonAlcove,
}

impl fmt::Display for AlcoveLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlcoveLabel::C0 => "C0",
            AlcoveLabel::C1 => "C1",
            AlcoveLabel::C2 => "C2",
            AlcoveLabel::C3 => "C3",
            AlcoveLabel::NonAlcove => "non-alcove",
        })
    }
}

/// The four alcove predicates evaluated on `(a, b) = λ+ρ`.
pub fn alcove_predicates(lambda: Weight, p: u64) -> [bool; 4] {
    let p = p as i64;
    let Weight { a, b, .. } = lambda.plus(RHO);
    [
        a > b && b > 0 && a + b < p,
        a + b > p && b < a && a < p,
        a - b < p && p < a && a + b < 2 * p,
        b < p && a + b > 2 * p && a - b < p,
    ]
}

pub fn alcove_of(lambda: Weight, p: u64) -> AlcoveLabel {
    let preds = alcove_predicates(lambda, p);
    let labels = [AlcoveLabel::C0, AlcoveLabel::C1, AlcoveLabel::C2, AlcoveLabel::C3];
    preds
        .iter()
        .zip(labels)
        .find(|(&t, _)| t)
        .map_or(AlcoveLabel::NonAlcove, |(_, l)| l)
}

/// 0 ≤ a−b < p and 0 ≤ b < p.
pub fn is_p_restricted(lambda: Weight, p: u64) -> bool {
    let p = p as i64;
    let d = lambda.a - lambda.b;
    (0..p).contains(&d) && (0..p).contains(&lambda.b)
}

/// |⟨λ+ρ, γ∨⟩| < p for every root γ.
pub fn is_p_small(lambda: Weight, p: u64) -> bool {
    let s = lambda.plus(RHO);
    PosRoot::ALL.iter().all(|&g| pair(s, g).abs() < p as i64)
}

/// Distance from ⟨λ,γ∨⟩ to pℤ is at least δ for every root γ.
pub fn is_delta_generic(lambda: Weight, p: u64, delta: u64) -> bool {
    PosRoot::ALL.iter().all(|&g| {
        let r = pair(lambda, g).rem_euclid(p as i64) as u64;
        r.min(p - r) >= delta
    })
}

/// X_reg: p-restricted with a−b < p−1 and b < p−1.
pub fn is_regular(lambda: Weight, p: u64) -> bool {
    let p = p as i64;
    is_p_restricted(lambda, p as u64) && lambda.a - lambda.b < p - 1 && lambda.b < p - 1
}

/// The affine reflection s_{γ,n}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineReflection {
    pub gamma: PosRoot,
    pub n: i64,
}

/// s_{γ,n}·λ = λ + (np − ⟨λ+ρ,γ∨⟩)γ.
pub fn affine_reflect(lambda: Weight, r: AffineReflection, p: u64) -> Weight {
    let m = r.n * p as i64 - pair(lambda.plus(RHO), r.gamma);
    lambda.plus(r.gamma.vector().scale(m))
}

/// Reflection of λ across the nearest γ-wall in the positive direction.
pub fn up_arrow_min(lambda: Weight, gamma: PosRoot, p: u64) -> Result<(Weight, AffineReflection)> {
    let c = pair(lambda.plus(RHO), gamma);
    let pi = p as i64;
    if c.rem_euclid(pi) == 0 {
        return Err(Error::WallWeight(format!("{lambda} on a {} wall mod {p}", gamma.name())));
    }
    let r = AffineReflection { gamma, n: c.div_euclid(pi) + 1 };
    Ok((affine_reflect(lambda, r, p), r))
}

/// The linkage chain C0 ↑ C1 ↑ C2 ↑ C3 through the walls α+β, 2α+β, α+β.
pub fn linked_chain_c0(lambda0: Weight, p: u64) -> Result<[Weight; 3]> {
    if alcove_of(lambda0, p) != AlcoveLabel::C0 {
        return Err(Error::Precondition(format!("{lambda0} is not in C0 for p={p}")));
    }
    let walls = [PosRoot::AlphaBeta, PosRoot::TwoAlphaBeta, PosRoot::AlphaBeta];
    let targets = [AlcoveLabel::C1, AlcoveLabel::C2, AlcoveLabel::C3];
    let mut out = [lambda0; 3];
    let mut cur = lambda0;
    for (i, (&g, &t)) in walls.iter().zip(&targets).enumerate() {
        cur = up_arrow_min(cur, g, p)?.0;
        if alcove_of(cur, p) != t {
            return Err(Error::TheoremViolation(format!("chain step {i} left alcove {t}: {cur}")));
        }
        out[i] = cur;
    }
    Ok(out)
}

/// Highest weights of the composition factors of the Weyl module V(λ) over 𝔽_p,
/// socle first.
pub fn jh_factors(lambda: Weight, p: u64) -> Result<Vec<Weight>> {
    if !lambda.is_dominant() || !is_p_restricted(lambda, p) {
        return Err(Error::Precondition(format!("{lambda} is not dominant p-restricted")));
    }
    let (a, b, pi) = (lambda.a, lambda.b, p as i64);
    let second = match alcove_of(lambda, p) {
        AlcoveLabel::C0 => None,
        AlcoveLabel::C1 => Some(Weight::new(pi - b - 3, pi - a - 3)),
        AlcoveLabel::C2 => Some(Weight::new(2 * pi - a - 4, b)),
        AlcoveLabel::C3 => Some(Weight::new(2 * pi - b - 3, 2 * pi - a - 3)),
        AlcoveLabel::NonAlcove => {
            let boundary = a - b == pi - 1 && pi < 2 * (b + 1) && b + 1 < pi;
            if boundary || (p == 2 && a == 1 && b == 1) {
                return Err(Error::UnknownDecomposition(format!("{lambda} at p={p}")));
            }
            None
        }
    };
    let mut out = vec![lambda];
    out.extend(second.map(|mut w| {
        w.c = lambda.c;
        w
    }));
    Ok(out)
}

/// Directions for [`autweight_convert`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConvertDirection {
    /// λ ↦ (k, l) = λ + (3,3).
    IntrinsicToAutomorphic,
    /// (k, l) ↦ λ = (k−3, l−3).
    AutomorphicToIntrinsic,
    /// (k, l) ↦ highest weight −s₀(k,l) = (−l, −k) of the Verma module behind 𝓛(k,l).
    AutomorphicToVerma,
    /// Inverse of `AutomorphicToVerma`.
    VermaToAutomorphic,
}

pub fn autweight_convert(w: Weight, dir: ConvertDirection) -> Weight {
    match dir {
        ConvertDirection::IntrinsicToAutomorphic => w.plus(Weight::new(3, 3)),
        ConvertDirection::AutomorphicToIntrinsic => w.minus(Weight::new(3, 3)),
        ConvertDirection::AutomorphicToVerma | ConvertDirection::VermaToAutomorphic => {
            WeylElement::S0.act(w).neg()
        }
    }
}

/// Weight data of the BGG complex attached to (k, l).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BggWeights {
    pub shimura: Vec<Weight>,
    pub flag: Vec<Weight>,
    pub hodge_jumps: Vec<i64>,
    /// Set when (k−3, l−3) is outside C0 for the supplied prime.
    pub warning: Option<String>,
}

pub fn bgg_weights(k: i64, l: i64, p: Option<u64>) -> BggWeights {
    let w = Weight::new;
    let warning = p.and_then(|p| {
        (alcove_of(w(k - 3, l - 3), p) != AlcoveLabel::C0)
            .then(|| format!("({},{}) is not in C0 for p={p}", k - 3, l - 3))
    });
    BggWeights {
        shimura: vec![w(3 - l, 3 - k), w(l - 1, 3 - k), w(k, 4 - l), w(k, l)],
        flag: vec![
            w(3 - l, 3 - k),
            w(2 - k, 4 - l),
            w(l - 1, 3 - k),
            w(2 - k, l),
            w(k, 4 - l),
            w(3 - l, k + 1),
            w(k, l),
            w(l - 1, k + 1),
        ],
        hodge_jumps: vec![0, l - 2, k - 1, k + l - 3],
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairings() {
        assert_eq!(pair(Weight::new(2, 1), PosRoot::Beta), 1);
        assert_eq!(pair(Weight::new(2, 1), PosRoot::Alpha), 1);
        assert_eq!(pair(Weight::new(4, 2), PosRoot::AlphaBeta), 6);
        for r in PosRoot::ALL {
            assert_eq!(pair(r.vector(), r), 2);
        }
    }

    #[test]
    fn dot_action_examples() {
        let l = Weight::new(5, 3);
        assert_eq!(dot_act(WeylElement::Id, l), l);
        assert_eq!(dot_act(WeylElement::S1, l), Weight::new(5, -5));
        assert_eq!(dot_act(WeylElement::S0, l), Weight::new(2, 6));
    }

    #[test]
    fn weyl_group_is_dihedral_of_order_8() {
        let s0 = WeylElement::S0;
        let s1 = WeylElement::S1;
        assert_eq!(s0.compose(s0), WeylElement::Id);
        assert_eq!(s1.compose(s1), WeylElement::Id);
        assert_eq!(s0.compose(s1).pow(4), WeylElement::Id);
        assert_eq!(s0.compose(s1).order(), 4);
        for w in WeylElement::ALL {
            let built = w
                .word()
                .iter()
                .fold(WeylElement::Id, |acc, &g| acc.compose(WeylElement::from_gen(g)));
            assert_eq!(built, w);
        }
        for a in WeylElement::ALL {
            for b in WeylElement::ALL {
                for c in WeylElement::ALL {
                    assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
                }
            }
        }
        let sigs: std::collections::HashSet<_> =
            WeylElement::ALL.iter().map(|w| w.signature()).collect();
        assert_eq!(sigs.len(), 8);
        let rot = s0.compose(s1);
        assert_eq!(s0.compose(rot).compose(s0), rot.inverse());
        assert_eq!(WeylElement::W0.act(Weight::new(3, 1)), Weight::new(-3, -1));
    }

    #[test]
    fn alcove_examples() {
        assert_eq!(alcove_of(Weight::new(2, 1), 11), AlcoveLabel::C0);
        assert_eq!(alcove_of(Weight::new(7, 6), 11), AlcoveLabel::C1);
        assert_eq!(alcove_of(Weight::new(4, 4), 11), AlcoveLabel::NonAlcove);
    }

    #[test]
    fn alcoves_exclusive_and_match_restricted_regular_interior() {
        for p in [5u64, 7, 11] {
            let pi = p as i64;
            for a in -1..=2 * pi + 2 {
                for b in -1..=2 * pi + 2 {
                    let lam = Weight::new(a, b).minus(RHO);
                    let n = alcove_predicates(lam, p).iter().filter(|&&x| x).count();
                    assert!(n <= 1);
                    let s = lam.plus(RHO);
                    let on_wall = PosRoot::ALL.iter().any(|&g| pair(s, g).rem_euclid(pi) == 0);
                    let inside = is_p_restricted(lam, p) && !on_wall;
                    assert_eq!(alcove_of(lam, p) != AlcoveLabel::NonAlcove, inside, "{lam} p={p}");
                }
            }
        }
    }

    #[test]
    fn predicates_examples() {
        assert!(is_p_restricted(Weight::new(10, 0), 11));
        assert!(!is_p_small(Weight::new(9, 0), 11));
        assert!(!is_delta_generic(Weight::new(2, 1), 11, 3));
        assert!(is_delta_generic(Weight::new(6, 3), 13, 3));
        assert!(is_regular(Weight::new(2, 1), 11));
        assert!(!is_regular(Weight::new(10, 0), 11));
    }

    #[test]
    fn reflections() {
        let l = Weight::new(2, 1);
        let r0 = AffineReflection { gamma: PosRoot::Beta, n: 0 };
        let r1 = AffineReflection { gamma: PosRoot::Beta, n: 1 };
        assert_eq!(affine_reflect(l, r0, 11), Weight::new(2, -3));
        assert_eq!(affine_reflect(l, r1, 11), Weight::new(2, 19));
        assert_eq!(up_arrow_min(l, PosRoot::AlphaBeta, 11).unwrap().0, Weight::new(7, 6));
        assert_eq!(
            up_arrow_min(Weight::new(7, 6), PosRoot::TwoAlphaBeta, 11).unwrap().0,
            Weight::new(11, 6)
        );
        let (m, r) = up_arrow_min(Weight::new(11, 6), PosRoot::AlphaBeta, 11).unwrap();
        assert_eq!((m, r.n), (Weight::new(13, 8), 2));
        assert!(matches!(
            up_arrow_min(Weight::new(3, 5), PosRoot::AlphaBeta, 11),
            Err(Error::WallWeight(_))
        ));
    }

    #[test]
    fn chain_and_factors() {
        assert_eq!(
            linked_chain_c0(Weight::new(2, 1), 11).unwrap(),
            [Weight::new(7, 6), Weight::new(11, 6), Weight::new(13, 8)]
        );
        assert_eq!(
            jh_factors(Weight::new(7, 6), 11).unwrap(),
            vec![Weight::new(7, 6), Weight::new(2, 1)]
        );
        assert_eq!(jh_factors(Weight::new(2, 1), 11).unwrap(), vec![Weight::new(2, 1)]);
        assert_eq!(
            jh_factors(Weight::new(11, 6), 11).unwrap(),
            vec![Weight::new(11, 6), Weight::new(7, 6)]
        );
        // a−b = p−1 with p/2 < b+1 < p
        assert!(matches!(
            jh_factors(Weight::new(16, 6), 11),
            Err(Error::UnknownDecomposition(_))
        ));
    }

    #[test]
    fn full_c0_enumeration_p11() {
        let p = 11;
        for a in 0..p as i64 {
            for b in 0..=a {
                let l0 = Weight::new(a, b);
                if alcove_of(l0, p) != AlcoveLabel::C0 {
                    continue;
                }
                let [l1, l2, l3] = linked_chain_c0(l0, p).unwrap();
                assert_eq!(l1, Weight::new(11 - b - 3, 11 - a - 3));
                assert_eq!(l2, Weight::new(11 + b - 1, 11 - a - 3));
                assert_eq!(alcove_of(l3, p), AlcoveLabel::C3);
            }
        }
    }

    #[test]
    fn second_factor_is_linked_below() {
        for p in [5u64, 7, 11, 13] {
            for a in 0..2 * p as i64 {
                for b in 0..=a {
                    let lam = Weight::new(a, b);
                    let Ok(f) = jh_factors(lam, p) else { continue };
                    assert!(f.iter().all(|w| w.is_dominant()));
                    if f.len() == 2 {
                        let lower = f[1];
                        let from = alcove_of(lower, p);
                        let reached = PosRoot::ALL.iter().any(|&g| {
                            up_arrow_min(lower, g, p).map(|(m, _)| m == lam).unwrap_or(false)
                        });
                        assert!(reached, "{lower} does not reach {lam}");
                        assert!(from < alcove_of(lam, p));
                    }
                }
            }
        }
    }

    #[test]
    fn conversions_and_bgg() {
        let k = autweight_convert(Weight::new(2, 1), ConvertDirection::IntrinsicToAutomorphic);
        assert_eq!(k, Weight::new(5, 4));
        assert!(k.a - 1 > k.b - 2 && k.b - 2 > 0 && k.a + k.b < 11 + 3);
        assert_eq!(
            autweight_convert(Weight::new(7, 5), ConvertDirection::AutomorphicToVerma),
            Weight::new(-5, -7)
        );
        let g = bgg_weights(7, 5, None);
        let w = Weight::new;
        assert_eq!(g.shimura, vec![w(-2, -4), w(4, -4), w(7, -1), w(7, 5)]);
        assert_eq!(g.hodge_jumps, vec![0, 3, 6, 9]);
        assert_eq!(bgg_weights(4, 3, None).shimura, vec![w(0, -1), w(2, -1), w(4, 1), w(4, 3)]);
        assert!(bgg_weights(4, 3, Some(5)).warning.is_none());
        assert!(bgg_weights(6, 3, Some(5)).warning.is_some());
    }

    #[test]
    fn weight_json() {
        let j = serde_json::to_string(&Weight::new(2, 1)).unwrap();
        assert_eq!(j, "[2,1]");
        let w: Weight = serde_json::from_str(r#"{"a":2,"b":1,"c":3}"#).unwrap();
        assert!(w.eq_with_central(&Weight::with_central(2, 1, 3).unwrap()));
        assert!(Weight::with_central(2, 1, 2).is_err());
    }

    fn weight() -> impl Strategy<Value = Weight> {
        (-40i64..40, -40i64..40).prop_map(|(a, b)| Weight::new(a, b))
    }

    proptest! {
        #[test]
        fn dot_action_is_an_action(l in weight(), i in 0usize..8, j in 0usize..8) {
            let (w1, w2) = (WeylElement::ALL[i], WeylElement::ALL[j]);
            prop_assert_eq!(dot_act(w1, dot_act(w2, l)), dot_act(w1.compose(w2), l));
        }

        #[test]
        fn affine_reflection_is_involution(l in weight(), g in 0usize..4, n in -2i64..=2, pi in 0usize..3) {
            let p = [5u64, 7, 11][pi];
            let r = AffineReflection { gamma: PosRoot::ALL[g], n };
            prop_assert_eq!(affine_reflect(affine_reflect(l, r, p), r, p), l);
        }

        #[test]
        fn automorphic_round_trip(l in weight()) {
            use ConvertDirection::*;
            prop_assert_eq!(autweight_convert(autweight_convert(l, IntrinsicToAutomorphic), AutomorphicToIntrinsic), l);
            prop_assert_eq!(autweight_convert(autweight_convert(l, AutomorphicToVerma), VermaToAutomorphic), l);
        }
    }
}
