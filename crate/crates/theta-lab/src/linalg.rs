//! Exact linear algebra over prime fields and over the rationals.
//!
//! Matrices are dense and row-major. Every routine is plain Gauss-Jordan
//! elimination; the systems met in this crate have at most a few hundred
//! unknowns.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Modular exponentiation.
pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a, p - 2, p)
}

/// Canonical residue of a signed integer.
pub fn reduce(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Canonical residue of a big integer.
pub fn reduce_big(a: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((a % &m) + &m) % &m;
    u64::try_from(r).expect("residue fits")
}

/// Residue of a rational number whose denominator is prime to `p`.
pub fn reduce_rational(q: &BigRational, p: u64) -> Option<u64> {
    let d = reduce_big(q.denom(), p);
    if d == 0 {
        return None;
    }
    let n = reduce_big(q.numer(), p);
    Some((n as u128 * inv_mod(d, p) as u128 % p as u128) as u64)
}

/// p-adic valuation of a nonzero big integer.
pub fn valuation(a: &BigInt, p: u64) -> u32 {
    assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut x = a.clone();
    while (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

/// Field operations needed by the elimination routines.
pub trait FieldElem: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
}

/// Element of 𝔽_p carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    pub v: u64,
    pub p: u64,
}

impl Fp {
    pub fn new(v: i64, p: u64) -> Self {
        Fp { v: reduce(v, p), p }
    }
}

impl FieldElem for Fp {
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1, p: self.p }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp { v: (self.v + o.v) % self.p, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: (self.v + self.p - o.v) % self.p, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: (self.v as u128 * o.v as u128 % self.p as u128) as u64, p: self.p }
    }
    fn inv(&self) -> Self {
        Fp { v: inv_mod(self.v, self.p), p: self.p }
    }
}

impl FieldElem for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

/// Dense matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: FieldElem> {
    pub rows: usize,
    pub cols: usize,
    zero: F,
    data: Vec<F>,
}

impl<F: FieldElem> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize, zero: F) -> Self {
        let data = vec![zero.clone(); rows * cols];
        Matrix { rows, cols, zero, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>, zero: F) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(r, c, zero);
        for (i, row) in rows.into_iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.into_iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows, self.zero.clone());
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self.get(r, c).inv();
            for j in c..self.cols {
                let x = self.get(r, j).mul(&inv);
                self.set(r, j, x);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let x = self.get(i, j).sub(&f.mul(self.get(r, j)));
                    self.set(i, j, x);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel {x : A x = 0}.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let one = self.zero.one_like();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![self.zero.clone(); self.cols];
            v[free] = one.clone();
            for (r, &pc) in pivots.iter().enumerate() {
                let x = self.zero.sub(m.get(r, free));
                v[pc] = x;
            }
            basis.push(v);
        }
        basis
    }

    /// Some solution of A x = b, if one exists.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1, self.zero.clone());
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![self.zero.clone(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(self.zero.clone(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect()
    }
}

/// Rank of a list of vectors (as rows).
pub fn span_rank<F: FieldElem>(vectors: &[Vec<F>], zero: F) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_rows(vectors.to_vec(), zero).rank()
}

/// Whether two families of vectors span the same subspace.
pub fn same_span<F: FieldElem>(a: &[Vec<F>], b: &[Vec<F>], zero: F) -> bool {
    let ra = span_rank(a, zero.clone());
    let rb = span_rank(b, zero.clone());
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    ra == rb && span_rank(&both, zero) == ra
}

/// Scale a rational vector to a primitive integer vector (gcd of entries 1,
/// first nonzero entry positive).
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| {
        if x.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        }
    });
    ints.into_iter().map(|x| x / &g * &sign).collect()
}
