//! Dense symmetric kernels: eigendecomposition, shifted solves, spectral
//! matrix functions and operator norms.

use std::ops::Range;

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{domain, Error, Result};

pub type C64 = Complex<f64>;

/// Relative tolerance for the symmetry check on real inputs.
pub const SYMMETRY_TOL: f64 = 1e-13;

/// Eigenvalues closer than this (times `max(1, ‖A‖)`) share a spectral cluster.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Spectral radius, which is the operator norm for symmetric input.
    pub fn norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Index ranges of eigenvalues grouped by [`CLUSTER_TOL`].
    pub fn clusters(&self) -> Vec<Range<usize>> {
        spectral_clusters(self.values.as_slice(), CLUSTER_TOL * self.norm().max(1.0))
    }

    /// Mean eigenvalue of each cluster, paired with its index range.
    pub fn cluster_values(&self) -> Vec<(f64, Range<usize>)> {
        self.clusters()
            .into_iter()
            .map(|r| {
                let mean = self.values.rows_range(r.clone()).mean();
                (mean, r)
            })
            .collect()
    }

    /// `π(x, y)` for the projection onto the eigenvectors in `range`.
    pub fn projection_entry(&self, range: Range<usize>, x: usize, y: usize) -> f64 {
        range
            .map(|k| self.vectors[(x, k)] * self.vectors[(y, k)])
            .sum()
    }

    /// `‖A v_k − ν_k v_k‖` maximized over k, and `‖VᵀV − I‖_max`.
    pub fn residuals(&self, a: &DMatrix<f64>) -> (f64, f64) {
        let av = a * &self.vectors;
        let mut res = 0.0f64;
        for k in 0..self.dim() {
            let r = (av.column(k) - self.vectors.column(k) * self.values[k]).norm();
            res = res.max(r);
        }
        let gram = self.vectors.transpose() * &self.vectors;
        let ortho = (gram - DMatrix::identity(self.dim(), self.dim())).amax();
        (res, ortho)
    }
}

/// Group sorted values into maximal runs whose consecutive gaps are `<= tol`.
pub fn spectral_clusters(sorted: &[f64], tol: f64) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Largest asymmetry `|a_ij − a_ji|`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit-shift QR), sorted ascending.
pub fn eig_sym(a: &DMatrix<f64>) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return domain(format!("matrix is {}x{}, not square", a.nrows(), a.ncols()));
    }
    let scale = a.amax().max(1.0);
    let asym = asymmetry(a);
    if asym > SYMMETRY_TOL * scale {
        return domain(format!("matrix is not symmetric (asymmetry {asym:.3e})"));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return domain("matrix has non-finite entries");
    }
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    let decomp = EigenDecomposition { values, vectors };
    #[cfg(debug_assertions)]
    {
        let (res, ortho) = decomp.residuals(a);
        let norm = decomp.norm().max(1.0);
        debug_assert!(res <= 1e-10 * norm, "eigen residual {res:.3e}");
        debug_assert!(ortho <= 1e-10, "eigenvector orthonormality {ortho:.3e}");
    }
    Ok(decomp)
}

/// LU factorization of `A − z` for repeated column solves.
pub struct ShiftedSolver {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    shifted: DMatrix<C64>,
    scale: f64,
    condition: f64,
}

/// Pivot-ratio threshold below which a shift is declared singular.
const PIVOT_FLOOR: f64 = 1e-14;

impl ShiftedSolver {
    pub fn new(a: &DMatrix<f64>, z: C64) -> Result<ShiftedSolver> {
        if !a.is_square() {
            return domain("shifted solve needs a square matrix");
        }
        let n = a.nrows();
        let mut shifted = a.map(|v| C64::new(v, 0.0));
        for i in 0..n {
            shifted[(i, i)] -= z;
        }
        let lu = shifted.clone().lu();
        let u = lu.u();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let p = u[(i, i)].norm();
            lo = lo.min(p);
            hi = hi.max(p);
        }
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition.is_finite() && 1.0 / condition > PIVOT_FLOOR) {
            return Err(Error::NearSingular { condition });
        }
        let scale = a.amax() * (n as f64).sqrt() + z.norm();
        Ok(ShiftedSolver {
            lu,
            shifted,
            scale,
            condition,
        })
    }

    /// Ratio of largest to smallest pivot magnitude.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, rhs: &DVector<C64>) -> Result<DVector<C64>> {
        let u = self
            .lu
            .solve(rhs)
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let residual = (&self.shifted * &u - rhs).norm();
        if !(residual <= 1e-10 * self.scale.max(1.0) * rhs.norm().max(1.0)) {
            return Err(Error::NearSingular {
                condition: self.condition,
            });
        }
        Ok(u)
    }

    /// The column `(A − z)^{-1} e_y`.
    pub fn column(&self, y: usize) -> Result<DVector<C64>> {
        let n = self.shifted.nrows();
        if y >= n {
            return domain(format!("column {y} out of range {n}"));
        }
        let mut e = DVector::zeros(n);
        e[y] = C64::new(1.0, 0.0);
        self.solve(&e)
    }

    /// The full resolvent matrix.
    pub fn inverse(&self) -> Result<DMatrix<C64>> {
        let n = self.shifted.nrows();
        let inv = self
            .lu
            .try_inverse()
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let residual = (&self.shifted * &inv - DMatrix::<C64>::identity(n, n)).camax();
        if !(residual <= 1e-9 * self.scale.max(1.0)) {
            return Err(Error::NearSingular {
                condition: self.condition,
            });
        }
        Ok(inv)
    }
}

/// Column `y` of `(A − z)^{-1}`.
pub fn solve_shifted(a: &DMatrix<f64>, z: C64, y: usize) -> Result<DVector<C64>> {
    ShiftedSolver::new(a, z)?.column(y)
}

/// `V f(D) Vᵀ` for a real scalar function.
pub fn matrix_function(decomp: &EigenDecomposition, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let fv = decomp.values.map(&f);
    let scaled = DMatrix::from_fn(decomp.dim(), decomp.dim(), |i, k| {
        decomp.vectors[(i, k)] * fv[k]
    });
    scaled * decomp.vectors.transpose()
}

/// `V f(D) Vᵀ` for a complex-valued scalar function.
pub fn matrix_function_complex(
    decomp: &EigenDecomposition,
    f: impl Fn(f64) -> C64,
) -> DMatrix<C64> {
    let n = decomp.dim();
    let v = decomp.vectors.map(|x| C64::new(x, 0.0));
    let fv: Vec<C64> = decomp.values.iter().map(|&x| f(x)).collect();
    let scaled = DMatrix::from_fn(n, n, |i, k| v[(i, k)] * fv[k]);
    scaled * v.transpose()
}

/// Column `y` of `f(A)`, without forming the full matrix.
pub fn matrix_function_column(
    decomp: &EigenDecomposition,
    f: impl Fn(f64) -> C64,
    y: usize,
) -> DVector<C64> {
    let n = decomp.dim();
    let w: Vec<C64> = (0..n)
        .map(|k| f(decomp.values[k]) * decomp.vectors[(y, k)])
        .collect();
    DVector::from_fn(n, |i, _| {
        (0..n).fold(C64::new(0.0, 0.0), |acc, k| acc + w[k] * decomp.vectors[(i, k)])
    })
}

/// Largest singular value of a real matrix.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.transpose()
    } else {
        m.transpose() * m
    };
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b)).max(0.0).sqrt()
}

/// Largest singular value of a complex matrix.
pub fn operator_norm_complex(m: &DMatrix<C64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let eig = SymmetricEigen::new(gram);
    eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b)).max(0.0).sqrt()
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    Ok(eig_sym(a)?.values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn trivial_decompositions() {
        let e = eig_sym(&DMatrix::from_element(1, 1, 0.0)).unwrap();
        assert_eq!(e.values.as_slice(), &[0.0]);
        let e = eig_sym(&DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]))).unwrap();
        assert_eq!(e.values.as_slice(), &[1.0, 2.0]);
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.5, 1.0]);
        assert!(matches!(eig_sym(&m), Err(Error::Domain(_))));
    }

    #[test]
    fn tridiagonal_band_matches_closed_form() {
        let (l, delta) = (12, 3.0);
        let m = DMatrix::from_fn(l, l, |i, j| {
            if i == j {
                1.0
            } else if i.abs_diff(j) == 1 {
                -0.5 / delta
            } else {
                0.0
            }
        });
        let e = eig_sym(&m).unwrap();
        let mut expect: Vec<f64> = (1..=l)
            .map(|j| 1.0 - (j as f64 * PI / (l as f64 + 1.0)).cos() / delta)
            .collect();
        expect.sort_by(f64::total_cmp);
        for (a, b) in e.values.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn shifted_solves() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let col = solve_shifted(&a, c(0.0, 1.0), 0).unwrap();
        let want = c(1.0, 0.0) / c(1.0, -1.0);
        assert!((col[0] - want).norm() < 1e-15);
        assert_eq!(col[1], c(0.0, 0.0));
        // Vacuum sector: G(∅,∅) = −1/z.
        let z = c(0.3, 0.7);
        let g = solve_shifted(&DMatrix::from_element(1, 1, 0.0), z, 0).unwrap()[0];
        assert!((g + c(1.0, 0.0) / z).norm() < 1e-15);
        // Exactly at an eigenvalue.
        assert!(matches!(
            solve_shifted(&a, c(2.0, 0.0), 0),
            Err(Error::NearSingular { .. })
        ));
    }

    #[test]
    fn shifted_solve_agrees_with_spectral_resolvent() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| ((i * 7 + j * 7 + i * j) % 11) as f64 / 11.0);
        let a = (&a + a.transpose()) * 0.5;
        let z = c(0.4, 0.01);
        let e = eig_sym(&a).unwrap();
        let solver = ShiftedSolver::new(&a, z).unwrap();
        for y in [0, 17, 39] {
            let lu = solver.column(y).unwrap();
            let sp = matrix_function_column(&e, |x| c(1.0, 0.0) / (c(x, 0.0) - z), y);
            assert!((lu - sp).camax() < 1e-8);
        }
        let inv = solver.inverse().unwrap();
        let full = matrix_function_complex(&e, |x| c(1.0, 0.0) / (c(x, 0.0) - z));
        assert!((inv - full).camax() < 1e-8);
    }

    #[test]
    fn matrix_functions() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, 0.5, 0.0, 0.5, -1.0]);
        let e = eig_sym(&a).unwrap();
        assert!((matrix_function(&e, |x| x) - &a).amax() < 1e-9);
        assert!((matrix_function(&e, |_| 1.0) - DMatrix::identity(3, 3)).amax() < 1e-12);
        let u = matrix_function_complex(&e, |x| (c(0.0, -1.3) * x).exp());
        let id = DMatrix::<C64>::identity(3, 3);
        assert!((u.adjoint() * &u - id).camax() < 1e-9);
    }

    #[test]
    fn clusters_group_degenerate_values() {
        let r = spectral_clusters(&[0.0, 1.0, 1.0 + 1e-12, 2.0], 1e-9);
        assert_eq!(r, vec![0..1, 1..3, 3..4]);
        assert_eq!(spectral_clusters(&[], 1e-9), Vec::<Range<usize>>::new());
    }

    #[test]
    fn operator_norms() {
        let m = DMatrix::from_row_slice(2, 3, &[3.0, 0.0, 0.0, 0.0, -4.0, 0.0]);
        assert!((operator_norm(&m) - 4.0).abs() < 1e-12);
        let mc = m.map(|v| c(0.0, v));
        assert!((operator_norm_complex(&mc) - 4.0).abs() < 1e-12);
        assert_eq!(operator_norm(&DMatrix::zeros(0, 3)), 0.0);
    }
}
