//! 𝔰𝔭₄ from its 4×4 matrix realization.

use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::weights::Weight;

pub type Mat4 = [[i64; 4]; 4];

/// Number of basis elements.
pub const DIM: usize = 10;

/// Basis labels in PBW order.
pub const LABELS: [&str; DIM] = [
    "f_beta", "f_alpha+beta", "f_2alpha+beta", "f_alpha", "h_alpha", "h_beta", "e_alpha",
    "e_beta", "e_alpha+beta", "e_2alpha+beta",
];

pub const F_BETA: usize = 0;
pub const F_AB: usize = 1;
pub const F_2AB: usize = 2;
pub const F_ALPHA: usize = 3;
pub const H_ALPHA: usize = 4;
pub const H_BETA: usize = 5;
pub const E_ALPHA: usize = 6;
pub const E_BETA: usize = 7;
pub const E_AB: usize = 8;
pub const E_2AB: usize = 9;

/// Weight of each basis element under the adjoint torus action.
pub const WEIGHTS: [Weight; DIM] = [
    Weight::new(0, -2),
    Weight::new(-1, -1),
    Weight::new(-2, 0),
    Weight::new(-1, 1),
    Weight::new(0, 0),
    Weight::new(0, 0),
    Weight::new(1, -1),
    Weight::new(0, 2),
    Weight::new(1, 1),
    Weight::new(2, 0),
];

pub fn is_lowering(g: usize) -> bool {
    g < H_ALPHA
}

pub fn is_cartan(g: usize) -> bool {
    g == H_ALPHA || g == H_BETA
}

pub fn is_raising(g: usize) -> bool {
    g > H_BETA
}

/// The realized Lie algebra: basis matrices and the integer bracket table.
#[derive(Clone, Debug, Serialize)]
pub struct LieAlgebraC2 {
    pub basis: Vec<Mat4>,
    /// `bracket[i][j]` lists `(k, c)` with [x_i, x_j] = Σ c·x_k.
    pub bracket: Vec<Vec<Vec<(usize, i64)>>>,
}

/// The symplectic form J = [[0,S],[−S,0]] with S antidiagonal.
pub const J: Mat4 = [[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]];

/// Characters of the diagonal torus diag(x1, x2, −x2, −x1) in (a,b) coordinates.
const EPS: [(i64, i64); 4] = [(1, 0), (0, 1), (0, -1), (-1, 0)];

pub fn mat_mul(x: &Mat4, y: &Mat4) -> Mat4 {
    let mut z = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            z[i][j] = (0..4).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    z
}

pub fn transpose(x: &Mat4) -> Mat4 {
    let mut t = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[j][i] = x[i][j];
        }
    }
    t
}

pub fn commutator(x: &Mat4, y: &Mat4) -> Mat4 {
    let a = mat_mul(x, y);
    let b = mat_mul(y, x);
    let mut z = [[0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            z[i][j] = a[i][j] - b[i][j];
        }
    }
    z
}

/// Xᵀ J + J X = 0.
pub fn is_symplectic_algebra_element(x: &Mat4) -> bool {
    let a = mat_mul(&transpose(x), &J);
    let b = mat_mul(&J, x);
    (0..4).all(|i| (0..4).all(|j| a[i][j] + b[i][j] == 0))
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Generator of the one-dimensional root space of 𝔰𝔭₄ for `root`, with
/// entries normalized so the first nonzero entry is 1.
fn root_vector(root: (i64, i64)) -> Result<Mat4> {
    let cells: Vec<(usize, usize)> = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|&(i, j)| (EPS[i].0 - EPS[j].0, EPS[i].1 - EPS[j].1) == root)
        .collect();
    // Unknown coefficients on each cell; one equation per entry of XᵀJ + JX.
    let mut rows = Vec::new();
    for r in 0..4 {
        for c in 0..4 {
            let row: Vec<BigRational> = cells
                .iter()
                .map(|&(i, j)| {
                    let mut x = [[0; 4]; 4];
                    x[i][j] = 1;
                    let a = mat_mul(&transpose(&x), &J);
                    let b = mat_mul(&J, &x);
                    q(a[r][c] + b[r][c])
                })
                .collect();
            rows.push(row);
        }
    }
    let ns = Matrix::from_rows(rows, BigRational::zero()).nullspace();
    if ns.len() != 1 {
        return Err(Error::RealizationInconsistent(format!(
            "root space {root:?} has dimension {}",
            ns.len()
        )));
    }
    let v = crate::linalg::primitive_integer(&ns[0]);
    let mut x = [[0; 4]; 4];
    for (&(i, j), c) in cells.iter().zip(v) {
        x[i][j] = c.to_i64().expect("small entry");
    }
    Ok(x)
}

fn coordinates(basis: &[Mat4], x: &Mat4) -> Result<Vec<(usize, i64)>> {
    let rows: Vec<Vec<BigRational>> = (0..16)
        .map(|e| basis.iter().map(|b| q(b[e / 4][e % 4])).collect())
        .collect();
    let rhs: Vec<BigRational> = (0..16).map(|e| q(x[e / 4][e % 4])).collect();
    let sol = Matrix::from_rows(rows, BigRational::zero())
        .solve(&rhs)
        .ok_or_else(|| Error::RealizationInconsistent("bracket leaves the algebra".into()))?;
    let mut out = Vec::new();
    for (k, c) in sol.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if !c.is_integer() {
            return Err(Error::RealizationInconsistent(format!("non-integral constant {c}")));
        }
        out.push((k, c.to_integer().to_i64().expect("small constant")));
    }
    Ok(out)
}

/// Builds the realization and tabulates all brackets.
pub fn build_sp4() -> Result<LieAlgebraC2> {
    let roots = [(0, 2), (1, 1), (2, 0), (1, -1)];
    let mut es = Vec::new();
    let mut fs = Vec::new();
    for &(a, b) in &roots {
        let e = root_vector((a, b))?;
        let f0 = root_vector((-a, -b))?;
        // scale f so that (e, f, [e,f]) is an sl₂-triple
        let h0 = commutator(&e, &f0);
        let he = commutator(&h0, &e);
        let (i, j) = (0..16)
            .map(|t| (t / 4, t % 4))
            .find(|&(i, j)| e[i][j] != 0)
            .expect("nonzero root vector");
        let ratio = he[i][j] / e[i][j];
        if ratio == 0 || 2 % ratio != 0 {
            return Err(Error::RealizationInconsistent(format!("cannot normalize f for {a},{b}")));
        }
        let s = 2 / ratio;
        let f = f0.map(|r| r.map(|x| x * s));
        es.push(e);
        fs.push(f);
    }
    let h_alpha = commutator(&es[3], &fs[3]);
    let h_beta = commutator(&es[0], &fs[0]);
    let mut basis = fs.clone();
    basis.push(h_alpha);
    basis.push(h_beta);
    // e's in order α, β, α+β, 2α+β
    basis.push(es[3]);
    basis.push(es[0]);
    basis.push(es[1]);
    basis.push(es[2]);
    for x in &basis {
        if !is_symplectic_algebra_element(x) {
            return Err(Error::RealizationInconsistent("basis element not in sp4".into()));
        }
    }
    let mut bracket = vec![vec![Vec::new(); DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            bracket[i][j] = coordinates(&basis, &commutator(&basis[i], &basis[j]))?;
        }
    }
    Ok(LieAlgebraC2 { basis, bracket })
}

/// Shared instance of the realization.
pub fn sp4() -> &'static LieAlgebraC2 {
    static ALG: OnceLock<LieAlgebraC2> = OnceLock::new();
    ALG.get_or_init(|| build_sp4().expect("the symplectic realization is consistent"))
}

impl LieAlgebraC2 {
    /// Bracket of two basis elements.
    pub fn br(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.bracket[i][j]
    }

    /// Bracket of two vectors in coordinates.
    pub fn br_vec(&self, x: &[i64; DIM], y: &[i64; DIM]) -> [i64; DIM] {
        let mut out = [0; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                if x[i] == 0 || y[j] == 0 {
                    continue;
                }
                for &(k, c) in self.br(i, j) {
                    out[k] += x[i] * y[j] * c;
                }
            }
        }
        out
    }
}

/// ⟨λ, h⟩ for the Cartan generators.
pub fn cartan_eval(g: usize, lambda: Weight) -> i64 {
    match g {
        H_ALPHA => lambda.a - lambda.b,
        H_BETA => lambda.b,
        _ => panic!("not a Cartan generator"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{pair, PosRoot};

    fn unit(i: usize) -> [i64; DIM] {
        let mut v = [0; DIM];
        v[i] = 1;
        v
    }

    #[test]
    fn bracket_examples() {
        let g = sp4();
        assert_eq!(g.br(H_ALPHA, E_ALPHA), &[(E_ALPHA, 2)]);
        assert_eq!(g.br(E_BETA, F_BETA), &[(H_BETA, 1)]);
        assert!(g.br(F_BETA, F_AB).is_empty());
    }

    #[test]
    fn jacobi_on_all_triples() {
        let g = sp4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let (x, y, z) = (unit(i), unit(j), unit(k));
                    let a = g.br_vec(&g.br_vec(&x, &y), &z);
                    let b = g.br_vec(&g.br_vec(&y, &z), &x);
                    let c = g.br_vec(&g.br_vec(&z, &x), &y);
                    assert!((0..DIM).all(|t| a[t] + b[t] + c[t] == 0));
                }
            }
        }
    }

    #[test]
    fn root_vectors_have_their_weights() {
        let g = sp4();
        for x in 0..DIM {
            if is_cartan(x) {
                continue;
            }
            let w = WEIGHTS[x];
            for (h, r) in [(H_ALPHA, PosRoot::Alpha), (H_BETA, PosRoot::Beta)] {
                let expected: Vec<(usize, i64)> =
                    Some((x, pair(w, r))).filter(|&(_, c)| c != 0).into_iter().collect();
                assert_eq!(g.br(h, x), &expected[..]);
            }
        }
        assert_eq!(cartan_eval(H_ALPHA, Weight::new(5, 2)), 3);
        assert_eq!(cartan_eval(H_BETA, Weight::new(5, 2)), 2);
    }
}
