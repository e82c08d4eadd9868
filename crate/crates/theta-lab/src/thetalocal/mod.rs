//! Theta operators and Hasse invariants on local charts of the flag space.
//!
//! A section is a polynomial coefficient f in T, T₁₁, T₁₂, T₂₂ over 𝔽_p
//! together with its weight (k, l). On the ordinary chart the Hasse lifts are
//! H̃₁ = 1 and H̃₂ = T − T^p and D_ij = (T_ij + 1)∂/∂T_ij. On the p-rank-one
//! chart H̃₁ = T₂₂, H̃₂ = T₁₂ + T₂₂T − T^p, and every result is only known
//! modulo a power of the maximal ideal (T₁₁, T₁₂, T₂₂).

pub mod poly;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{same_span, Fp, Matrix};
use crate::weights::{affine_reflect, AffineReflection, PosRoot, Weight};
pub use poly::{Exp, Poly, T, T11, T12, T22};

/// Which chart a section lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    Ordinary,
    /// Results are valid modulo (T₁₁, T₁₂, T₂₂)^precision.
    PRankOne { precision: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SectionJson", into = "SectionJson")]
pub struct ChartSection {
    pub p: u64,
    pub weight: (i64, i64),
    pub chart: Chart,
    pub poly: Poly,
}

/// The operators, with their weight shifts in the chart normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThetaOperator {
    Theta1,
    Theta2,
    Theta3,
    #[serde(rename = "theta4")]
    SmallTheta4,
    H1Mult,
    H2Mult,
    BigTheta,
}

impl ThetaOperator {
    pub fn weight_shift(self, p: u64) -> (i64, i64) {
        let p = p as i64;
        match self {
            ThetaOperator::Theta1 => (2, 0),
            ThetaOperator::Theta2 => (p + 1, 0),
            ThetaOperator::Theta3 => (2 * p, 0),
            ThetaOperator::SmallTheta4 => (p - 1, 0),
            ThetaOperator::H1Mult => (p - 1, p - 1),
            ThetaOperator::H2Mult => (p, -1),
            ThetaOperator::BigTheta => (2, 2),
        }
    }

    pub fn parse(s: &str) -> Option<ThetaOperator> {
        Some(match s {
            "Theta1" | "theta1" => ThetaOperator::Theta1,
            "Theta2" | "theta2" => ThetaOperator::Theta2,
            "Theta3" | "theta3" => ThetaOperator::Theta3,
            "theta4" => ThetaOperator::SmallTheta4,
            "H1" | "h1" => ThetaOperator::H1Mult,
            "H2" | "h2" => ThetaOperator::H2Mult,
            "BigTheta" | "Theta" => ThetaOperator::BigTheta,
            _ => return None,
        })
    }
}

/// Weight shift of the global operators θ₁ = H₁Θ₁, θ₂ = H₁Θ₂, θ₃ = Θ₃.
pub fn global_theta_shift(i: u8, p: u64) -> (i64, i64) {
    let p = p as i64;
    match i {
        1 => (p + 1, p - 1),
        2 => (2 * p, p - 1),
        3 => (2 * p, 0),
        _ => panic!("no global theta_{i}"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hasse {
    H1,
    H2,
}

impl ChartSection {
    pub fn new(p: u64, weight: (i64, i64), chart: Chart, poly: Poly) -> Self {
        let chart = match chart {
            Chart::PRankOne { precision } => Chart::PRankOne { precision: precision.min(max_precision(p)) },
            c => c,
        };
        let poly = match chart {
            Chart::PRankOne { precision } => poly.truncate(precision),
            Chart::Ordinary => poly,
        };
        ChartSection { p, weight, chart, poly }
    }

    pub fn ordinary(p: u64, weight: (i64, i64), poly: Poly) -> Self {
        Self::new(p, weight, Chart::Ordinary, poly)
    }

    fn with(&self, poly: Poly, shift: (i64, i64)) -> Self {
        let weight = (self.weight.0 + shift.0, self.weight.1 + shift.1);
        ChartSection { p: self.p, weight, chart: self.chart, poly }
    }

    fn require_ordinary(&self, op: &str) -> Result<()> {
        if self.chart != Chart::Ordinary {
            return Err(Error::WrongChart(format!("{op} needs the ordinary chart")));
        }
        Ok(())
    }

    /// l − k, which enters the θ₄ coefficient.
    pub fn l_minus_k(&self) -> i64 {
        self.weight.1 - self.weight.0
    }
}

/// The p-rank-one expansions are only stated modulo 𝔪^{p−1}.
pub fn max_precision(p: u64) -> u32 {
    (p - 1) as u32
}

/// (T_v + 1)∂f/∂T_v.
pub fn d_op(f: &Poly, v: usize) -> Poly {
    f.derivative(v).mul(&Poly::var(v, f.p()).add(&Poly::constant(1, f.p())))
}

/// Θᵢ f = A·D₁₁f + B·D₁₂f + C·D₂₂f, with A, B, C given as (T-power, coefficient) lists.
fn theta_coefficients(i: u8, p: u64) -> [Vec<(u32, i64)>; 3] {
    let q = p as u32;
    match i {
        1 => [vec![(2, 1)], vec![(1, -1)], vec![(0, 1)]],
        2 => [vec![(q + 1, 2)], vec![(1, -1), (q, -1)], vec![(0, 2)]],
        3 => [vec![(2 * q, 1)], vec![(q, -1)], vec![(0, 1)]],
        _ => panic!("no Theta_{i}"),
    }
}

fn apply_big_theta_i(i: u8, f: &Poly) -> Poly {
    let p = f.p();
    let coeffs = theta_coefficients(i, p);
    let mut out = Vec::new();
    for (e, c) in f.terms() {
        for (slot, v) in [T11, T12, T22].into_iter().enumerate() {
            let n = e[v] as i64;
            if n % p as i64 == 0 {
                continue;
            }
            // D_v x^n = n·x^n + n·x^{n−1}
            for drop in [0, 1] {
                for &(tp, cc) in &coeffs[slot] {
                    let mut g = *e;
                    g[v] -= drop;
                    g[T] += tp;
                    out.push((g, (*c as i64) * n % p as i64 * cc));
                }
            }
        }
    }
    Poly::from_terms(p, out)
}

fn theta_i(i: u8, s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary(&format!("Theta{i}"))?;
    let op = [ThetaOperator::Theta1, ThetaOperator::Theta2, ThetaOperator::Theta3][i as usize - 1];
    Ok(s.with(apply_big_theta_i(i, &s.poly), op.weight_shift(s.p)))
}

pub fn theta1(s: &ChartSection) -> Result<ChartSection> {
    theta_i(1, s)
}

pub fn theta2(s: &ChartSection) -> Result<ChartSection> {
    theta_i(2, s)
}

pub fn theta3(s: &ChartSection) -> Result<ChartSection> {
    theta_i(3, s)
}

/// θᵢ for i ∈ {1,2,3} with the global weight bookkeeping; the coefficient is
/// that of Θᵢ since H̃₁ = 1 on this chart.
pub fn global_theta(i: u8, s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary(&format!("theta{i}"))?;
    Ok(s.with(apply_big_theta_i(i, &s.poly), global_theta_shift(i, s.p)))
}

/// H̃₂ = T − T^p.
pub fn igusa_h2(p: u64) -> Poly {
    Poly::var(T, p).sub(&Poly::var(T, p).pow(p as u32))
}

/// H̃₂ = T₁₂ + T₂₂T − T^p.
pub fn prank1_h2(p: u64) -> Poly {
    Poly::var(T12, p).add(&Poly::var(T22, p).mul(&Poly::var(T, p))).sub(&Poly::var(T, p).pow(p as u32))
}

fn theta4_coefficient(f: &Poly, h2: &Poly, l_minus_k: i64) -> Poly {
    h2.mul(&f.derivative(T)).add(&f.mul(&h2.derivative(T)).scale(l_minus_k))
}

/// θ₄ on the ordinary chart: (T − T^p)∂f/∂T + (l − k)f.
pub fn theta4(s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary("theta4")?;
    let f = &s.poly;
    let out = igusa_h2(s.p).mul(&f.derivative(T)).add(&f.scale(s.l_minus_k()));
    Ok(s.with(out, ThetaOperator::SmallTheta4.weight_shift(s.p)))
}

/// θ₄ with an explicit Hasse lift: H̃₂∂f/∂T + (l − k)f·∂H̃₂/∂T. On the
/// p-rank-one chart the output loses one step of precision.
pub fn theta4_with_hasse(s: &ChartSection, h2: &Poly) -> Result<ChartSection> {
    let out = theta4_coefficient(&s.poly, h2, s.l_minus_k());
    let shift = ThetaOperator::SmallTheta4.weight_shift(s.p);
    match s.chart {
        Chart::Ordinary => Ok(s.with(out, shift)),
        Chart::PRankOne { precision } => {
            let precision = lose_precision(precision)?;
            let mut r = s.with(out.truncate(precision), shift);
            r.chart = Chart::PRankOne { precision };
            Ok(r)
        }
    }
}

fn lose_precision(precision: u32) -> Result<u32> {
    if precision < 2 {
        return Err(Error::InsufficientPrecision(format!("precision {precision} leaves nothing")));
    }
    Ok(precision - 1)
}

pub fn hasse_mult(s: &ChartSection, which: Hasse) -> Result<ChartSection> {
    s.require_ordinary("hasse_mult")?;
    Ok(match which {
        Hasse::H1 => s.with(s.poly.clone(), ThetaOperator::H1Mult.weight_shift(s.p)),
        Hasse::H2 => s.with(s.poly.mul(&igusa_h2(s.p)), ThetaOperator::H2Mult.weight_shift(s.p)),
    })
}

pub fn hasse_divide(s: &ChartSection, which: Hasse, m: u32) -> Result<ChartSection> {
    s.require_ordinary("hasse_divide")?;
    let mi = m as i64;
    match which {
        Hasse::H1 => {
            let (dk, dl) = ThetaOperator::H1Mult.weight_shift(s.p);
            Ok(s.with(s.poly.clone(), (-mi * dk, -mi * dl)))
        }
        Hasse::H2 => {
            let (dk, dl) = ThetaOperator::H2Mult.weight_shift(s.p);
            let q = s
                .poly
                .div_exact_in_t(&igusa_h2(s.p).pow(m))
                .ok_or_else(|| Error::NotDivisible(format!("{} by H2^{m}", s.poly)))?;
            Ok(s.with(q, (-mi * dk, -mi * dl)))
        }
    }
}

/// Writes k = pb + a with 1 ≤ a ≤ p.
pub fn cycle_digits(k: i64, p: u64) -> (i64, i64) {
    let p = p as i64;
    let a = (k - 1).rem_euclid(p) + 1;
    ((k - a) / p, a)
}

/// θ¹_{(k,l)} = θ₁^{p−a+1}/H₁^{p−a+1}.
pub fn theta_cycle(s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary("theta_cycle")?;
    let (k, l) = s.weight;
    let (b, a) = cycle_digits(k, s.p);
    let m = (s.p as i64 - a + 1) as u32;
    let mut cur = s.clone();
    for _ in 0..m {
        cur = global_theta(1, &cur)?;
    }
    let out = hasse_divide(&cur, Hasse::H1, m)?;
    let p = s.p as i64;
    if out.weight != (2 * p - 2 * a + k + 2, l) {
        return Err(Error::TheoremViolation(format!("theta cycle landed at {:?}", out.weight)));
    }
    // (k, l) ↦ (k + 2(p − a + 1), l) is the reflection s_{2α+β, b+1} on (k − 3, l − 3)
    let r = AffineReflection { gamma: PosRoot::TwoAlphaBeta, n: b + 1 };
    let reflected = affine_reflect(Weight::new(k - 3, l - 3), r, s.p);
    if (reflected.a + 3, reflected.b + 3) != out.weight {
        return Err(Error::TheoremViolation(format!("theta cycle is not the reflection {r:?}")));
    }
    Ok(out)
}

/// b with k − l = ap + b, 0 ≤ b < p.
pub fn reflection_digits(k: i64, l: i64, p: u64) -> (i64, i64) {
    let p = p as i64;
    let b = (k - l).rem_euclid(p);
    ((k - l - b) / p, b)
}

/// θ⁴_{(k,l)} = θ₄^{b+1}/H₂^{b+1}.
pub fn theta4_reflection(s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary("theta4_reflection")?;
    let (k, l) = s.weight;
    let (_, b) = reflection_digits(k, l, s.p);
    let mut cur = s.clone();
    for _ in 0..=b {
        cur = theta4(&cur)?;
    }
    let out = hasse_divide(&cur, Hasse::H2, (b + 1) as u32).map_err(|e| match e {
        Error::NotDivisible(m) => Error::TheoremViolation(format!("theta4 reflection: {m}")),
        e => e,
    })?;
    debug_assert_eq!(out.weight, (k - b - 1, l + b + 1));
    Ok(out)
}

/// Θ = (4Θ₁Θ₃ − Θ₂²)/H̃₂².
pub fn big_theta(s: &ChartSection) -> Result<ChartSection> {
    s.require_ordinary("Theta")?;
    let f = &s.poly;
    let num = apply_big_theta_i(1, &apply_big_theta_i(3, f))
        .scale(4)
        .sub(&apply_big_theta_i(2, &apply_big_theta_i(2, f)));
    let q = num
        .div_exact_in_t(&igusa_h2(s.p).pow(2))
        .ok_or_else(|| Error::TheoremViolation(format!("4Θ1Θ3 − Θ2² not divisible by H2² on {f}")))?;
    Ok(s.with(q, ThetaOperator::BigTheta.weight_shift(s.p)))
}

/// Applies an operator by name.
pub fn apply(op: ThetaOperator, s: &ChartSection) -> Result<ChartSection> {
    match op {
        ThetaOperator::Theta1 => theta1(s),
        ThetaOperator::Theta2 => theta2(s),
        ThetaOperator::Theta3 => theta3(s),
        ThetaOperator::SmallTheta4 => theta4(s),
        ThetaOperator::H1Mult => hasse_mult(s, Hasse::H1),
        ThetaOperator::H2Mult => hasse_mult(s, Hasse::H2),
        ThetaOperator::BigTheta => big_theta(s),
    }
}

/// Polynomials in T of degree ≤ k − l, as sections of weight (k, l).
fn t_space(k: i64, l: i64, p: u64) -> Vec<ChartSection> {
    (0..=(k - l).max(-1))
        .map(|i| ChartSection::ordinary(p, (k, l), Poly::monomial([i as u32, 0, 0, 0], 1, p)))
        .collect()
}

fn t_coefficients(f: &Poly, len: usize) -> Vec<Fp> {
    let p = f.p();
    let mut v = vec![Fp::new(0, p); len];
    for (e, c) in f.terms() {
        assert!(e[1..].iter().all(|&x| x == 0), "not a polynomial in T");
        v[e[T] as usize] = Fp { v: *c, p };
    }
    v
}

/// Closed-form basis of Ker θ₄ on polynomials in T of degree ≤ k − l:
/// (T − T^p)^b·T^{pj}, 0 ≤ j ≤ a − b.
pub fn kernel_basis_theta4(k: i64, l: i64, p: u64) -> Vec<ChartSection> {
    if k < l {
        return Vec::new();
    }
    let (a, b) = reflection_digits(k, l, p);
    let hb = igusa_h2(p).pow(b as u32);
    (0..=a - b)
        .map(|j| ChartSection::ordinary(p, (k, l), hb.shift(T, (p as i64 * j) as u32)))
        .collect()
}

/// Closed-form basis of Ker θ⁴_{(k,l)}: T^i·T^{pj}, 0 ≤ i ≤ b, 0 ≤ j ≤ a.
pub fn kernel_basis_theta4_reflection(k: i64, l: i64, p: u64) -> Vec<ChartSection> {
    if k < l {
        return Vec::new();
    }
    let (a, b) = reflection_digits(k, l, p);
    let mut out = Vec::new();
    for j in 0..=a {
        for i in 0..=b {
            let e = (i + p as i64 * j) as u32;
            out.push(ChartSection::ordinary(p, (k, l), Poly::monomial([e, 0, 0, 0], 1, p)));
        }
    }
    out
}

/// Nullspace of θ₄^n on polynomials in T of degree ≤ k − l.
pub fn brute_force_kernel(k: i64, l: i64, p: u64, n: u32) -> Result<Vec<Vec<Fp>>> {
    let space = t_space(k, l, p);
    if space.is_empty() {
        return Ok(Vec::new());
    }
    let out_len = (k - l) as usize + n as usize * (p as usize - 1) + 1;
    let mut cols = Vec::new();
    for s in &space {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = theta4(&cur)?;
        }
        cols.push(t_coefficients(&cur.poly, out_len));
    }
    let rows: Vec<Vec<Fp>> = (0..out_len).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    Ok(Matrix::from_rows(rows, Fp::new(0, p)).nullspace())
}

/// Whether closed-form and brute-force kernels coincide, for θ₄ and θ⁴.
pub fn kernels_match(k: i64, l: i64, p: u64) -> Result<(bool, bool)> {
    let (_, b) = reflection_digits(k, l, p);
    let len = (k - l).max(0) as usize + 1;
    let zero = Fp::new(0, p);
    let closed4: Vec<Vec<Fp>> = kernel_basis_theta4(k, l, p).iter().map(|s| t_coefficients(&s.poly, len)).collect();
    let closed_r: Vec<Vec<Fp>> =
        kernel_basis_theta4_reflection(k, l, p).iter().map(|s| t_coefficients(&s.poly, len)).collect();
    let brute4 = brute_force_kernel(k, l, p, 1)?;
    let brute_r = brute_force_kernel(k, l, p, (b + 1) as u32)?;
    let ok4 = brute4.len() == closed4.len() && same_span(&closed4, &brute4, zero);
    let ok_r = brute_r.len() == closed_r.len() && same_span(&closed_r, &brute_r, zero);
    Ok((ok4, ok_r))
}

/// A section whose coefficient has every monomial with each exponent ≤
/// `max_deg`, coefficients independent and uniform in 𝔽_p.
pub fn random_section(p: u64, weight: (i64, i64), chart: Chart, max_deg: u32, rng: &mut impl Rng) -> ChartSection {
    let mut terms = Vec::new();
    let d = max_deg + 1;
    for idx in 0..d.pow(4) {
        let e = [idx % d, idx / d % d, idx / d / d % d, idx / d / d / d];
        terms.push((e, rng.gen_range(0..p) as i64));
    }
    ChartSection::new(p, weight, chart, Poly::from_terms(p, terms))
}

/// A seeded generator for reproducible sweeps.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationResult {
    pub name: String,
    pub passed: bool,
    pub counterexample: Option<ChartSection>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub p: u64,
    pub trials: usize,
    pub max_deg: u32,
    pub seed: u64,
    pub relations: Vec<RelationResult>,
}

impl RelationReport {
    pub fn all_passed(&self) -> bool {
        self.relations.iter().all(|r| r.passed)
    }
}

type Check = fn(&ChartSection) -> Result<bool>;

fn iterate(s: &ChartSection, n: u64, f: fn(&ChartSection) -> Result<ChartSection>) -> Result<ChartSection> {
    let mut cur = s.clone();
    for _ in 0..n {
        cur = f(&cur)?;
    }
    Ok(cur)
}

/// [A, θ₄] f = A(θ₄ f) − θ₄(A f), each θ₄ at its own input weight.
fn commutator_with_theta4(s: &ChartSection, a: &dyn Fn(&ChartSection) -> Result<ChartSection>) -> Result<Poly> {
    let x = a(&theta4(s)?)?;
    let y = theta4(&a(s)?)?;
    Ok(x.poly.sub(&y.poly))
}

fn commutator(s: &ChartSection, a: fn(&ChartSection) -> Result<ChartSection>, b: fn(&ChartSection) -> Result<ChartSection>) -> Result<bool> {
    Ok(a(&b(s)?)?.poly == b(&a(s)?)?.poly)
}

fn relation_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("[Theta1,theta4]=Theta2", |s| Ok(commutator_with_theta4(s, &theta1)? == theta2(s)?.poly)),
        ("[Theta2,theta4]=2Theta3", |s| {
            Ok(commutator_with_theta4(s, &theta2)? == theta3(s)?.poly.scale(2))
        }),
        ("[Theta3,theta4]=0", |s| Ok(commutator_with_theta4(s, &theta3)?.is_zero())),
        ("[Theta1,Theta2]=0", |s| commutator(s, theta1, theta2)),
        ("[Theta1,Theta3]=0", |s| commutator(s, theta1, theta3)),
        ("[Theta2,Theta3]=0", |s| commutator(s, theta2, theta3)),
        ("Theta1^p=Theta3", |s| Ok(iterate(s, s.p, theta1)?.poly == theta3(s)?.poly)),
        ("theta4^p=0", |s| Ok(iterate(s, s.p, theta4)?.poly.is_zero())),
        ("[Theta2^p,theta4]=0", |s| {
            let p = s.p;
            Ok(commutator_with_theta4(s, &|x| iterate(x, p, theta2))?.is_zero())
        }),
        ("[Theta,theta4]=0", |s| Ok(commutator_with_theta4(s, &big_theta)?.is_zero())),
        ("Theta^p=Theta", |s| Ok(iterate(s, s.p, big_theta)?.poly == big_theta(s)?.poly)),
    ]
}

/// Checks every operator relation on `trials` random sections. A relation
/// that raises an error counts as failed on that section.
pub fn verify_relations(p: u64, trials: usize, max_deg: u32, seed: u64) -> RelationReport {
    let mut rng = rng_for(seed);
    let pi = p as i64;
    let sections: Vec<ChartSection> = (0..trials)
        .map(|_| {
            let weight = (rng.gen_range(0..3 * pi), rng.gen_range(0..3 * pi));
            random_section(p, weight, Chart::Ordinary, max_deg, &mut rng)
        })
        .collect();
    let relations = relation_checks()
        .into_iter()
        .map(|(name, check)| {
            let counterexample = sections
                .par_iter()
                .find_first(|s| !check(s).unwrap_or(false))
                .cloned();
            RelationResult { name: name.to_string(), passed: counterexample.is_none(), counterexample }
        })
        .collect();
    RelationReport { p, trials, max_deg, seed, relations }
}

/// H₁Θ₁ on the p-rank-one chart:
/// k·f + T²T₂₂∂f/∂T₁₁ − T·T₂₂∂f/∂T₁₂ + T₂₂∂f/∂T₂₂.
pub fn prank1_theta1(s: &ChartSection) -> Result<ChartSection> {
    let Chart::PRankOne { precision } = s.chart else {
        return Err(Error::WrongChart("prank1_theta1 needs the p-rank-one chart".into()));
    };
    let precision = lose_precision(precision)?;
    let p = s.p;
    let f = &s.poly;
    let t = Poly::var(T, p);
    let t22 = Poly::var(T22, p);
    let out = f
        .scale(s.weight.0)
        .add(&t.pow(2).mul(&t22).mul(&f.derivative(T11)))
        .sub(&t.mul(&t22).mul(&f.derivative(T12)))
        .add(&t22.mul(&f.derivative(T22)));
    let mut r = s.with(out.truncate(precision), global_theta_shift(1, p));
    r.chart = Chart::PRankOne { precision };
    Ok(r)
}

/// θ₄ on the p-rank-one chart, with H̃₂ = T₁₂ + T₂₂T − T^p.
pub fn prank1_theta4(s: &ChartSection) -> Result<ChartSection> {
    if s.chart == Chart::Ordinary {
        return Err(Error::WrongChart("prank1_theta4 needs the p-rank-one chart".into()));
    }
    theta4_with_hasse(s, &prank1_h2(s.p))
}

/// Whether T₂₂ = H̃₁ divides H₁Θ₁(f) within the available precision.
pub fn prank1_divisibility(s: &ChartSection) -> Result<bool> {
    if s.poly.is_zero() || s.poly.divisible_by_var(T22) {
        return Err(Error::Precondition("T22 divides the section".into()));
    }
    Ok(prank1_theta1(s)?.poly.divisible_by_var(T22))
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(rename = "T")]
    t: u32,
    #[serde(rename = "T11")]
    t11: u32,
    #[serde(rename = "T12")]
    t12: u32,
    #[serde(rename = "T22")]
    t22: u32,
    coeff: i64,
}

#[derive(Serialize, Deserialize)]
struct SectionJson {
    p: u64,
    chart: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    precision: Option<u32>,
    weight: [i64; 2],
    poly: Vec<TermJson>,
}

impl From<ChartSection> for SectionJson {
    fn from(s: ChartSection) -> Self {
        let (chart, precision) = match s.chart {
            Chart::Ordinary => ("ordinary", None),
            Chart::PRankOne { precision } => ("prank1", Some(precision)),
        };
        SectionJson {
            p: s.p,
            chart: chart.into(),
            precision,
            weight: [s.weight.0, s.weight.1],
            poly: s
                .poly
                .terms()
                .iter()
                .map(|(e, c)| TermJson { t: e[0], t11: e[1], t12: e[2], t22: e[3], coeff: *c as i64 })
                .collect(),
        }
    }
}

impl TryFrom<SectionJson> for ChartSection {
    type Error = String;

    fn try_from(j: SectionJson) -> std::result::Result<Self, String> {
        let chart = match (j.chart.as_str(), j.precision) {
            ("ordinary", _) => Chart::Ordinary,
            ("prank1", Some(precision)) => Chart::PRankOne { precision },
            ("prank1", None) => return Err("prank1 chart needs a precision".into()),
            (c, _) => return Err(format!("unknown chart {c}")),
        };
        let poly = Poly::from_terms(j.p, j.poly.into_iter().map(|t| ([t.t, t.t11, t.t12, t.t22], t.coeff)));
        Ok(ChartSection::new(j.p, (j.weight[0], j.weight[1]), chart, poly))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sec(p: u64, weight: (i64, i64), poly: Poly) -> ChartSection {
        ChartSection::ordinary(p, weight, poly)
    }

    fn var(v: usize, p: u64) -> Poly {
        Poly::var(v, p)
    }

    #[test]
    fn big_theta_examples() {
        let p = 5;
        let s = sec(p, (4, 2), var(T22, p));
        let r = theta1(&s).unwrap();
        assert_eq!(r.poly, var(T22, p).add(&Poly::constant(1, p)));
        assert_eq!(r.weight, (6, 2));
        assert!(theta1(&sec(p, (0, 0), Poly::constant(3, p))).unwrap().poly.is_zero());
        let t11 = theta3(&sec(p, (0, 0), var(T11, p))).unwrap();
        assert_eq!(t11.poly, var(T, p).pow(10).mul(&var(T11, p).add(&Poly::constant(1, p))));
        let wrong = ChartSection::new(p, (0, 0), Chart::PRankOne { precision: 3 }, var(T11, p));
        assert!(matches!(theta1(&wrong), Err(Error::WrongChart(_))));
    }

    #[test]
    fn theta4_examples() {
        let p = 5;
        let r = theta4(&sec(p, (6, 5), var(T, p))).unwrap();
        assert_eq!(r.poly, var(T, p).pow(5).neg());
        assert_eq!(r.weight, (10, 5));
        // p | k − l and f a polynomial in T^p
        let f = var(T, p).pow(10).add(&Poly::constant(2, p));
        assert!(theta4(&sec(p, (12, 2), f)).unwrap().poly.is_zero());
        assert!(theta4(&sec(p, (p as i64, -1), igusa_h2(p))).unwrap().poly.is_zero());
    }

    #[test]
    fn hasse_examples() {
        let p = 5;
        let s = sec(p, (3, 3), var(T11, p));
        let h = hasse_mult(&s, Hasse::H1).unwrap();
        assert_eq!((h.poly.clone(), h.weight), (s.poly.clone(), (7, 7)));
        let sq = sec(p, (0, 0), igusa_h2(p).pow(2));
        let d = hasse_divide(&sq, Hasse::H2, 2).unwrap();
        assert_eq!(d.poly, Poly::constant(1, p));
        assert_eq!(d.weight, (-10, 2));
        assert!(matches!(hasse_divide(&sec(p, (0, 0), var(T, p)), Hasse::H2, 1), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn hasse_sections_are_annihilated() {
        for p in [3u64, 5, 7] {
            let pi = p as i64;
            let h2 = sec(p, (pi, -1), igusa_h2(p));
            let h1 = sec(p, (pi - 1, pi - 1), Poly::constant(1, p));
            for s in [&h2, &h1] {
                for op in [theta1, theta2, theta3, theta4] {
                    assert!(op(s).unwrap().poly.is_zero());
                }
            }
        }
    }

    #[test]
    fn theta_cycle_examples() {
        let p = 5u64;
        let s = sec(p, (3, 0), var(T11, p).add(&var(T, p)));
        let r = theta_cycle(&s).unwrap();
        assert_eq!(r.weight, (9, 0));
        assert_eq!(r.poly, iterate(&s, 3, theta1).unwrap().poly);
        let single = theta_cycle(&sec(p, (10, 1), var(T12, p))).unwrap();
        assert_eq!(single.poly, theta1(&sec(p, (10, 1), var(T12, p))).unwrap().poly);
        assert_eq!(single.weight, (12, 1));
    }

    #[test]
    fn double_cycle_is_theta3() {
        let p = 5u64;
        let mut rng = rng_for(7);
        for k in 2..=p as i64 {
            let s = random_section(p, (k, 1), Chart::Ordinary, 2, &mut rng);
            let twice = theta_cycle(&theta_cycle(&s).unwrap()).unwrap();
            assert_eq!(twice.poly, theta3(&s).unwrap().poly);
            assert_eq!(twice.weight, (k + 2 * p as i64, 1));
        }
    }

    #[test]
    fn theta4_reflection_sweep_p5() {
        let p = 5u64;
        for d in 0..=24i64 {
            for i in 0..=d {
                let s = sec(p, (d, 0), var(T, p).pow(i as u32));
                let r = theta4_reflection(&s).unwrap();
                assert_eq!(r.weight, (d - d % 5 - 1, d % 5 + 1));
                if d % 5 == 4 {
                    assert!(r.poly.is_zero());
                }
            }
        }
        for s in kernel_basis_theta4_reflection(11, 0, p) {
            assert!(theta4_reflection(&s).unwrap().poly.is_zero());
        }
    }

    #[test]
    fn kernel_examples() {
        let p = 5;
        let k4 = kernel_basis_theta4(11, 0, p);
        let h = igusa_h2(p);
        assert_eq!(k4.iter().map(|s| s.poly.clone()).collect::<Vec<_>>(), vec![h.clone(), h.shift(T, 5)]);
        assert_eq!(brute_force_kernel(11, 0, p, 1).unwrap().len(), 2);
        assert_eq!(kernel_basis_theta4_reflection(11, 0, p).len(), 6);
        assert_eq!(brute_force_kernel(11, 0, p, 2).unwrap().len(), 6);
        assert_eq!(kernel_basis_theta4(4, 4, p).len(), 1);
        assert_eq!(kernels_match(11, 0, p).unwrap(), (true, true));
    }

    #[test]
    fn kernels_match_brute_force() {
        for p in [3u64, 5, 7] {
            for d in 0..=3 * p as i64 {
                assert_eq!(kernels_match(d + 2, 2, p).unwrap(), (true, true), "p={p}, k-l={d}");
            }
        }
    }

    #[test]
    fn big_theta_on_constants_and_random() {
        for p in [3u64, 5, 7] {
            assert!(big_theta(&sec(p, (1, 1), Poly::constant(4, p))).unwrap().poly.is_zero());
            let mut rng = rng_for(p);
            for _ in 0..20 {
                let s = random_section(p, (3, 1), Chart::Ordinary, 2, &mut rng);
                let r = big_theta(&s).unwrap();
                assert_eq!(r.weight, (5, 3));
            }
        }
    }

    #[test]
    fn theta1_to_the_p_on_t11() {
        let p = 3;
        let s = sec(p, (0, 0), var(T11, p));
        // Θ₁ multiplies T₁₁ + 1 by T² each time
        let expected = var(T, p).pow(6).mul(&var(T11, p).add(&Poly::constant(1, p)));
        assert_eq!(iterate(&s, 3, theta1).unwrap().poly, expected);
        assert_eq!(theta3(&s).unwrap().poly, expected);
    }

    #[test]
    fn theta4_nilpotent_on_powers_of_t() {
        for p in [3u64, 5, 7] {
            for j in 0..=2 * p as u32 {
                for c in 0..p as i64 {
                    let s = sec(p, (c, 0), var(T, p).pow(j));
                    assert!(iterate(&s, p, theta4).unwrap().poly.is_zero());
                }
            }
        }
    }

    #[test]
    fn relation_suite_small() {
        let r = verify_relations(5, 10, 2, 42);
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.relations.len(), 11);
    }

    #[test]
    fn prank1_examples() {
        let p = 7;
        let chart = Chart::PRankOne { precision: 4 };
        let one = ChartSection::new(p, (3, 2), chart, Poly::constant(1, p));
        assert_eq!(prank1_theta1(&one).unwrap().poly, Poly::constant(3, p));
        assert!(!prank1_divisibility(&one).unwrap());
        let one_p = ChartSection::new(p, (7, 2), chart, Poly::constant(1, p));
        assert!(prank1_divisibility(&one_p).unwrap());
        let t22 = ChartSection::new(p, (3, 2), chart, var(T22, p));
        assert_eq!(prank1_theta1(&t22).unwrap().poly, var(T22, p).scale(4));
        let t12 = ChartSection::new(p, (3, 2), chart, var(T12, p));
        assert_eq!(
            prank1_theta1(&t12).unwrap().poly,
            var(T12, p).scale(3).sub(&var(T, p).mul(&var(T22, p)))
        );
        let f = ChartSection::new(p, (14, 0), chart, var(T11, p).add(&Poly::constant(1, p)));
        assert!(prank1_divisibility(&f).unwrap());
        let thin = ChartSection::new(p, (3, 2), Chart::PRankOne { precision: 1 }, Poly::constant(1, p));
        assert!(matches!(prank1_theta1(&thin), Err(Error::InsufficientPrecision(_))));
        assert_eq!(prank1_theta1(&one).unwrap().chart, Chart::PRankOne { precision: 3 });
    }

    #[test]
    fn prank1_precision_is_capped() {
        let s = ChartSection::new(5, (1, 1), Chart::PRankOne { precision: 10 }, Poly::constant(1, 5));
        assert_eq!(s.chart, Chart::PRankOne { precision: 4 });
    }

    #[test]
    fn prank1_precision_drops_and_agrees() {
        let p = 11;
        let mut rng = rng_for(3);
        for _ in 0..10 {
            let hi = random_section(p, (5, 2), Chart::PRankOne { precision: 8 }, 3, &mut rng);
            let lo = ChartSection::new(p, hi.weight, Chart::PRankOne { precision: 6 }, hi.poly.clone());
            let mut a = hi.clone();
            let mut b = lo.clone();
            for n in 1..=3 {
                a = if n % 2 == 0 { prank1_theta4(&a).unwrap() } else { prank1_theta1(&a).unwrap() };
                b = if n % 2 == 0 { prank1_theta4(&b).unwrap() } else { prank1_theta1(&b).unwrap() };
                assert_eq!(b.chart, Chart::PRankOne { precision: 6 - n });
                assert_eq!(a.poly.truncate(6 - n), b.poly);
            }
        }
    }

    #[test]
    fn section_json() {
        let s = sec(5, (6, 5), var(T, 5));
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(
            j,
            r#"{"p":5,"chart":"ordinary","weight":[6,5],"poly":[{"T":1,"T11":0,"T12":0,"T22":0,"coeff":1}]}"#
        );
        assert_eq!(serde_json::from_str::<ChartSection>(&j).unwrap(), s);
    }

    fn section_strategy(p: u64) -> impl Strategy<Value = ChartSection> {
        (0i64..3 * p as i64, 0i64..3 * p as i64, any::<u64>()).prop_map(move |(k, l, seed)| {
            random_section(p, (k, l), Chart::Ordinary, 2, &mut rng_for(seed))
        })
    }

    fn leibniz(p: u64, f: &ChartSection, g: &ChartSection) {
        let fg = ChartSection::ordinary(p, (f.weight.0 + g.weight.0, f.weight.1 + g.weight.1), f.poly.mul(&g.poly));
        for op in [theta1, theta2, theta3, theta4] {
            let lhs = op(&fg).unwrap().poly;
            let rhs = f.poly.mul(&op(g).unwrap().poly).add(&op(f).unwrap().poly.mul(&g.poly));
            assert_eq!(lhs, rhs);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn leibniz_p3(f in section_strategy(3), g in section_strategy(3)) { leibniz(3, &f, &g); }

        #[test]
        fn leibniz_p5(f in section_strategy(5), g in section_strategy(5)) { leibniz(5, &f, &g); }

        #[test]
        fn leibniz_p7(f in section_strategy(7), g in section_strategy(7)) { leibniz(7, &f, &g); }

        #[test]
        fn shifts_match_declared(s in section_strategy(5)) {
            for op in [ThetaOperator::Theta1, ThetaOperator::Theta2, ThetaOperator::Theta3,
                       ThetaOperator::SmallTheta4, ThetaOperator::H1Mult, ThetaOperator::H2Mult,
                       ThetaOperator::BigTheta] {
                let r = apply(op, &s).unwrap();
                let (dk, dl) = op.weight_shift(5);
                prop_assert_eq!(r.weight, (s.weight.0 + dk, s.weight.1 + dl));
            }
        }
    }
}
