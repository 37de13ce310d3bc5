//! Random instances and dense oracles shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use qipm_bound::basis::BasisSelection;
use qipm_bound::lp::StandardLp;
use qipm_bound::newton::Iterate;
use qipm_bound::sparse::SparseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Sparse `m × n` matrix with a nonzero per row on a random transversal, so
/// it has full row rank with probability one.
pub fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> SparseMatrix {
    let mut cols: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        cols.swap(i, rng.random_range(0..=i));
    }
    let mut t = Vec::new();
    for i in 0..m {
        t.push((i, cols[i], 1.0 + rng.random::<f64>()));
        for j in 0..n {
            if j != cols[i] && rng.random::<f64>() < density {
                t.push((i, j, normal(rng)));
            }
        }
    }
    SparseMatrix::from_triplets(m, n, t).unwrap()
}

/// Feasible bounded LP: `b = A x₀`, `c = Aᵀ y₀ + s₀` with `x₀, s₀ > 0`.
pub fn random_lp(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> StandardLp {
    let a = random_matrix(rng, m, n, density);
    let x0: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let y0: Vec<f64> = (0..m).map(|_| normal(rng)).collect();
    let s0: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let b = a.mul_vec(&x0);
    let aty = a.mul_t_vec(&y0);
    let c = (0..n).map(|j| aty[j] + s0[j]).collect();
    StandardLp::new(a, b, c)
}

/// Strictly positive iterate with entries in `[0.25, 4]`.
pub fn random_iterate(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Iterate {
    let pos = |rng: &mut ChaCha8Rng| 0.25 * 16f64.powf(rng.random::<f64>());
    let x = (0..n).map(|_| pos(rng)).collect();
    let s = (0..n).map(|_| pos(rng)).collect();
    let y = (0..m).map(|_| normal(rng)).collect();
    Iterate::new(x, y, s).unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| normal(rng)).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Largest column-wise relative difference `‖a_j − b_j‖ / max(‖b_j‖, 1)`.
pub fn column_rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (0..a.ncols())
        .map(|j| (a.column(j) - b.column(j)).norm() / b.column(j).norm().max(1.0))
        .fold(0.0, f64::max)
}

/// Dense blocks `A_B` (columns in basis order) and `A_N`.
pub fn dense_blocks(a: &SparseMatrix, basis: &BasisSelection) -> (DMatrix<f64>, DMatrix<f64>) {
    let dense = a.to_dense();
    let ab = DMatrix::from_fn(a.n_rows(), basis.basic.len(), |i, k| dense[(i, basis.basic[k])]);
    let an = DMatrix::from_fn(a.n_rows(), basis.nonbasic.len(), |i, k| dense[(i, basis.nonbasic[k])]);
    (ab, an)
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Dense matrix with prescribed singular values and random orthogonal factors.
pub fn with_singular_values(rng: &mut ChaCha8Rng, rows: usize, cols: usize, sv: &[f64]) -> DMatrix<f64> {
    let q = |rng: &mut ChaCha8Rng, k: usize| {
        let g = DMatrix::from_fn(k, k, |_, _| normal(rng));
        g.qr().q()
    };
    let u = q(rng, rows);
    let v = q(rng, cols);
    let mut s = DMatrix::zeros(rows, cols);
    for (i, &x) in sv.iter().enumerate() {
        s[(i, i)] = x;
    }
    u * s * v.transpose()
}

/// Path of a bundled corpus file.
pub fn corpus(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(rel)
}

pub fn data(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(rel)
}

/// Dense oracles of the Newton-system operators, built from their defining
/// formulas with explicit inverses.
pub struct DenseSystems {
    pub nes: DMatrix<f64>,
    pub mnes: DMatrix<f64>,
    pub fbar: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub oss: DMatrix<f64>,
}

pub fn dense_systems(std: &StandardLp, it: &Iterate, basis: &BasisSelection) -> DenseSystems {
    let (m, n) = (std.m(), std.n());
    let a = std.a.to_dense();
    let d2 = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, it.x.iter().zip(&it.s).map(|(x, s)| x / s)));
    let d: Vec<f64> = it.x.iter().zip(&it.s).map(|(x, s)| (x / s).sqrt()).collect();
    let (ab, an) = dense_blocks(&std.a, basis);
    let ab_inv = ab.clone().try_inverse().expect("basis is invertible");
    let db_inv = DMatrix::from_fn(m, m, |i, k| if i == k { 1.0 / d[basis.basic[i]] } else { 0.0 });
    let dn = DMatrix::from_fn(n - m, n - m, |i, k| if i == k { d[basis.nonbasic[i]] } else { 0.0 });
    let nes = &a * &d2 * a.transpose();
    let mnes = &db_inv * &ab_inv * &nes * ab_inv.transpose() * &db_inv;
    let fbar = &db_inv * &ab_inv * &an * &dn;
    let ab_an = &ab_inv * &an;
    let mut v = DMatrix::zeros(n, n - m);
    for (k, &j) in basis.basic.iter().enumerate() {
        v.row_mut(j).copy_from(&ab_an.row(k));
    }
    for (l, &j) in basis.nonbasic.iter().enumerate() {
        v[(j, l)] = -1.0;
    }
    let mut oss = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..m {
            oss[(j, i)] = -it.x[j] * a[(i, j)];
        }
        for l in 0..n - m {
            oss[(j, m + l)] = it.s[j] * v[(j, l)];
        }
    }
    DenseSystems { nes, mnes, fbar, v, oss }
}

/// Dense solve of the full Newton system
/// `A Δx = b − Ax`, `AᵀΔy + Δs = c − Aᵀy − s`, `SΔx + XΔs = βμ1 − Xs`.
pub fn exact_newton_step(std: &StandardLp, it: &Iterate, beta_mu: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (m, n) = (std.m(), std.n());
    let a = std.a.to_dense();
    let k = 2 * n + m;
    let mut kkt = DMatrix::zeros(k, k);
    let mut rhs = nalgebra::DVector::zeros(k);
    let ax = std.a.mul_vec(&it.x);
    let aty = std.a.mul_t_vec(&it.y);
    for i in 0..m {
        for j in 0..n {
            kkt[(i, j)] = a[(i, j)];
            kkt[(m + j, n + i)] = a[(i, j)];
        }
        rhs[i] = std.b[i] - ax[i];
    }
    for j in 0..n {
        kkt[(m + j, n + m + j)] = 1.0;
        rhs[m + j] = std.c[j] - aty[j] - it.s[j];
        kkt[(m + n + j, j)] = it.s[j];
        kkt[(m + n + j, n + m + j)] = it.x[j];
        rhs[m + n + j] = beta_mu - it.x[j] * it.s[j];
    }
    let sol = kkt.lu().solve(&rhs).expect("Newton system is nonsingular");
    let dx = sol.rows(0, n).iter().copied().collect();
    let dy = sol.rows(n, m).iter().copied().collect();
    let ds = sol.rows(n + m, n).iter().copied().collect();
    (dx, dy, ds)
}
