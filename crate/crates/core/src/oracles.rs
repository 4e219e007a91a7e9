//! Independent ground truth.
//!
//! The tensor oracle builds `H` on the full `2^|Λ|`-dimensional spin space as
//! a literal sum of Kronecker-embedded one- and two-site terms and reads the
//! particle-number blocks back out, so it shares nothing with the sector
//! assembly except the definition. The exponential-sum oracles evaluate the
//! combinatorial bounds by exhaustive dynamic programming over lattice
//! configurations of `ℤ`, with truncation certificates.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;
use sprs::{kronecker_product, CsMat, TriMat};

use crate::config_space::{cluster_count_unchecked, Configuration, Region, SectorBasis};
use crate::disorder::DisorderSample;
use crate::error::{domain, Error, Result};
use crate::numerics::C64;
use crate::operators::ModelParams;

/// Largest region the tensor oracle accepts.
pub const MAX_TENSOR_SITES: usize = 14;

type Sparse = CsMat<f64>;

fn local(entries: &[(usize, usize, f64)]) -> Sparse {
    let mut t = TriMat::new((2, 2));
    for &(i, j, v) in entries {
        t.add_triplet(i, j, v);
    }
    t.to_csr()
}

/// Local basis `(↑, ↓) = (0, 1)`; a particle is a down spin.
fn number_op() -> Sparse {
    local(&[(1, 1, 1.0)])
}

/// `σ⁻ = |↓⟩⟨↑|`, which creates a particle.
fn sigma_minus() -> Sparse {
    local(&[(1, 0, 1.0)])
}

fn sigma_plus() -> Sparse {
    local(&[(0, 1, 1.0)])
}

fn identity(dim: usize) -> Sparse {
    CsMat::eye(dim)
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` in tensor factor `i` of `n`.
fn embed(op: &Sparse, i: usize, n: usize) -> Sparse {
    let left = identity(1 << i);
    let right = identity(1 << (n - 1 - i));
    let lo: Sparse = kronecker_product(left.view(), op.view());
    kronecker_product(lo.view(), right.view())
}

fn scaled(m: &Sparse, c: f64) -> Sparse {
    m.map(|v| v * c)
}

/// A Hamiltonian on the full tensor space, reordered so that basis states
/// are sorted by particle number and then colexicographically.
#[derive(Debug, Clone)]
pub struct TensorOperator {
    region: Region,
    /// Matrix in the (N, colex) ordered basis.
    matrix: Sparse,
    /// Number operator in the same basis.
    number: Sparse,
    offsets: Vec<usize>,
}

/// Configuration of tensor basis index `b` (site `i` is bit `n − 1 − i`).
fn config_of_index(region: &Region, b: usize) -> Configuration {
    let n = region.len();
    let sites = (0..n)
        .filter(|&i| b >> (n - 1 - i) & 1 == 1)
        .map(|i| region.sites()[i])
        .collect();
    Configuration::new(sites).expect("site order is increasing")
}

/// Build `H` on the full spin space of `region` (cut edges omitted).
pub fn tensor_hamiltonian(
    region: &Region,
    params: &ModelParams,
    omega: &DisorderSample,
) -> Result<TensorOperator> {
    let n = region.len();
    if n > MAX_TENSOR_SITES {
        return Err(Error::Refused(format!(
            "tensor oracle capped at {MAX_TENSOR_SITES} sites, got {n}"
        )));
    }
    let dim = 1usize << n;
    let num: Vec<Sparse> = (0..n).map(|i| embed(&number_op(), i, n)).collect();
    let mut h: Sparse = CsMat::zero((dim, dim)).to_csr();
    for i in 0..n {
        let w = omega.value(region.sites()[i])?;
        h = &h + &scaled(&num[i], 1.0 + params.lambda * w);
    }
    for i in 0..n.saturating_sub(1) {
        if !region.adjacent(region.sites()[i], region.sites()[i + 1]) {
            continue;
        }
        let pm = &embed(&sigma_plus(), i, n) * &embed(&sigma_minus(), i + 1, n);
        let mp = &embed(&sigma_minus(), i, n) * &embed(&sigma_plus(), i + 1, n);
        let hop = &pm + &mp;
        let pair = &num[i] * &num[i + 1];
        h = &h - &scaled(&hop, params.hop());
        h = &h - &pair;
    }
    let total = num.iter().fold(CsMat::zero((dim, dim)).to_csr(), |acc: Sparse, m| &acc + m);

    // Permutation to (N, colex) order.
    let bases: Vec<SectorBasis> = (0..=n)
        .map(|k| SectorBasis::new(region, k))
        .collect::<Result<_>>()?;
    let mut offsets = vec![0usize; n + 2];
    for k in 0..=n {
        offsets[k + 1] = offsets[k] + bases[k].size();
    }
    let mut perm = vec![0usize; dim];
    for (b, slot) in perm.iter_mut().enumerate() {
        let x = config_of_index(region, b);
        *slot = offsets[x.len()] + bases[x.len()].rank(&x)?;
    }
    let reorder = |m: &Sparse| {
        let mut t = TriMat::new((dim, dim));
        for (v, (i, j)) in m.iter() {
            t.add_triplet(perm[i], perm[j], *v);
        }
        t.to_csr::<usize>()
    };
    Ok(TensorOperator {
        region: region.clone(),
        matrix: reorder(&h),
        number: reorder(&total),
        offsets,
    })
}

impl TensorOperator {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Sparse {
        &self.matrix
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// The `N`-particle diagonal block, as a dense matrix.
    pub fn sector_block(&self, n_particles: usize) -> Result<DMatrix<f64>> {
        if n_particles > self.region.len() {
            return domain(format!("no sector with {n_particles} particles"));
        }
        let (lo, hi) = (self.offsets[n_particles], self.offsets[n_particles + 1]);
        let mut m = DMatrix::zeros(hi - lo, hi - lo);
        for (v, (i, j)) in self.matrix.iter() {
            if (lo..hi).contains(&i) && (lo..hi).contains(&j) {
                m[(i - lo, j - lo)] += *v;
            }
        }
        Ok(m)
    }

    /// Largest entry connecting different particle-number sectors.
    pub fn off_block_max(&self) -> f64 {
        let sector = |i: usize| self.offsets.partition_point(|&o| o <= i) - 1;
        self.matrix
            .iter()
            .filter(|(_, (i, j))| sector(*i) != sector(*j))
            .fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }

    /// Largest entry of `[H, 𝒩]`.
    pub fn number_commutator_max(&self) -> f64 {
        let hn = &self.matrix * &self.number;
        let nh = &self.number * &self.matrix;
        let c = &hn - &nh;
        c.iter().fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }

    /// Largest asymmetry of the sparse matrix.
    pub fn asymmetry(&self) -> f64 {
        let t = self.matrix.transpose_view().to_csr();
        let d = &self.matrix - &t;
        d.iter().fold(0.0f64, |m, (v, _)| m.max(v.abs()))
    }
}

/// Number of integer partitions `P(0..=n_max)`, by Euler's pentagonal recurrence.
pub fn partition_counts(n_max: usize) -> Result<Vec<u128>> {
    let mut p: Vec<i128> = vec![0; n_max + 1];
    p[0] = 1;
    for n in 1..=n_max {
        let mut acc: i128 = 0;
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > n {
                break;
            }
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc += sign * p[n - g1];
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= n {
                acc += sign * p[n - g2];
            }
        }
        if acc <= 0 || acc > i128::MAX / 4 {
            return Err(Error::Refused(format!("P({n}) overflows 128-bit arithmetic")));
        }
        p[n] = acc;
    }
    Ok(p.into_iter().map(|v| v as u128).collect())
}

pub fn partition_count(n: usize) -> Result<u128> {
    Ok(partition_counts(n)?[n])
}

/// `Σ_n P(n) e^{−αn}` and `Π_n (1 − e^{−αn})^{−1}`, both truncated once
/// terms fall below `1e−18` relative.
pub fn partition_generating_function(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    // P(n) ≤ e^{π√(2n/3)}, so the terms are below e^{−50} past this point.
    let n_max = (1..=1000usize)
        .find(|&n| alpha * n as f64 - PI * (2.0 * n as f64 / 3.0).sqrt() > 50.0)
        .ok_or_else(|| Error::Refused(format!("partition series for alpha = {alpha} needs more than 1000 terms")))?;
    let p = partition_counts(n_max)?;
    let mut series = 0.0;
    for (n, &pn) in p.iter().enumerate() {
        let term = pn as f64 * (-alpha * n as f64).exp();
        series += term;
        if n > 10 && term < 1e-18 * series {
            break;
        }
    }
    let mut log_prod = 0.0;
    for n in 1.. {
        let q = (-alpha * n as f64).exp();
        if q < 1e-18 {
            break;
        }
        log_prod -= (-q).ln_1p();
    }
    Ok((series, log_prod.exp()))
}

/// `C_α = (1 − e^{−α})^{−1} (Π_n (1 − e^{−αn})^{−1})²`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let mut log_c = -(-(-alpha).exp()).ln_1p();
    for n in 1.. {
        let q = (-alpha * n as f64).exp();
        if q < 1e-15 {
            break;
        }
        log_c -= 2.0 * (-q).ln_1p();
    }
    Ok(log_c.exp())
}

/// A truncated lattice sum with its convergence certificate.
#[derive(Debug, Clone, Serialize)]
pub struct SumBoundResult {
    pub value: f64,
    pub radius: u64,
    /// Contribution of the outermost shell included.
    pub last_increment: f64,
    pub bound: f64,
    pub holds: bool,
}

const CERTIFICATE: f64 = 1e-12;
const MAX_DOUBLINGS: u32 = 6;

fn default_radius(alpha: f64) -> u64 {
    (60.0 / alpha).ceil() as u64
}

/// Σ over increasing `x` with `|x_i − c_i| ≤ radius` of `e^{−α Σ|x_i − c_i|}`,
/// restricted to at most `max_clusters` clusters (`None`: unrestricted).
fn d1_sum(centers: &[i64], alpha: f64, radius: i64, max_clusters: Option<usize>) -> f64 {
    let n = centers.len();
    if n == 0 {
        return 1.0;
    }
    let lo = centers[0] - radius;
    let hi = centers[n - 1] + radius;
    let width = (hi - lo + 1) as usize;
    let kmax = max_clusters.unwrap_or(1);
    let track = max_clusters.is_some();
    // f[w][p]: weight of partial configurations ending at position lo + p with w + 1 clusters.
    let mut f = vec![vec![0.0f64; width]; kmax];
    let weight = |p: i64, c: i64| {
        if (p - c).abs() <= radius {
            (-alpha * (p - c).abs() as f64).exp()
        } else {
            0.0
        }
    };
    for p in 0..width {
        f[0][p] = weight(lo + p as i64, centers[0]);
    }
    for &c in &centers[1..] {
        let mut g = vec![vec![0.0f64; width]; kmax];
        // prefix[w][p] = Σ_{p' < p} f[w][p'].
        let prefix: Vec<Vec<f64>> = f
            .iter()
            .map(|row| {
                let mut acc = 0.0;
                let mut out = Vec::with_capacity(width + 1);
                out.push(0.0);
                for v in row {
                    acc += v;
                    out.push(acc);
                }
                out
            })
            .collect();
        for p in 1..width {
            let wgt = weight(lo + p as i64, c);
            if wgt == 0.0 {
                continue;
            }
            for w in 0..kmax {
                let joined = f[w][p - 1];
                let fresh = if !track {
                    prefix[w][p - 1]
                } else if w > 0 {
                    prefix[w - 1][p - 1]
                } else {
                    0.0
                };
                g[w][p] = wgt * (joined + fresh);
            }
        }
        f = g;
    }
    f.iter().flatten().sum()
}

fn certified_d1(
    centers: &[i64],
    alpha: f64,
    max_clusters: Option<usize>,
    radius: Option<u64>,
    bound: f64,
) -> Result<SumBoundResult> {
    let mut r = radius.unwrap_or_else(|| default_radius(alpha)).max(1);
    for _ in 0..=MAX_DOUBLINGS {
        let value = d1_sum(centers, alpha, r as i64, max_clusters);
        let inner = d1_sum(centers, alpha, r as i64 - 1, max_clusters);
        let last_increment = value - inner;
        if last_increment <= CERTIFICATE * value {
            return Ok(SumBoundResult {
                value,
                radius: r,
                last_increment,
                bound,
                holds: value <= bound,
            });
        }
        r *= 2;
    }
    Err(Error::Refused(format!(
        "exponential sum not certified up to radius {r}"
    )))
}

/// `Σ_{x ∈ 𝒫_{N,k}(ℤ)} e^{−α|x − y|₁}` with `N = |y|`, against `C_α^{k+1}`.
pub fn exp_sum_d1(y: &Configuration, k: usize, alpha: f64, radius: Option<u64>) -> Result<SumBoundResult> {
    let n = y.len();
    if !(1 <= k && k <= n) {
        return domain(format!("need 1 <= k <= N, got k = {k}, N = {n}"));
    }
    let bound = c_alpha(alpha)?.powi(k as i32 + 1);
    certified_d1(y.sites(), alpha, Some(k), radius, bound)
}

/// `Σ_{y ∈ 𝒫_N(ℤ)} e^{−α|x − y|₁}` for `x` with at most `k` clusters, against `C_α^k`.
pub fn exp_sum_d1_dual(x: &Configuration, k: usize, alpha: f64, radius: Option<u64>) -> Result<SumBoundResult> {
    let line = Region::interval(x.sites().first().copied().unwrap_or(0), x.sites().last().copied().unwrap_or(0))?;
    let w = cluster_count_unchecked(x, &line);
    if x.is_empty() || w > k {
        return domain(format!("x must be nonempty with at most {k} clusters (has {w})"));
    }
    let bound = c_alpha(alpha)?.powi(k as i32);
    certified_d1(x.sites(), alpha, None, radius, bound)
}

/// Numbers of `y ∈ 𝒫_N(ℤ)` with `d_H(x, y) ≤ r`, split by the cluster
/// count of `y` (index `m − 1` for `m = 1..=k`); configurations with more
/// than `k` clusters are not counted.
pub fn hausdorff_ball_counts(x: &Configuration, r: u64, k: usize) -> Vec<u128> {
    let n = x.len();
    let xs = x.sites();
    if n == 0 || k == 0 {
        return vec![0; k];
    }
    let r = r as i64;
    let lo = xs[0] - r;
    let hi = xs[n - 1] + r;
    // Gap since the last chosen site; `cap` means none within reach.
    let cap = (2 * r + 1) as usize;
    let idx = |c: usize, m: usize, g: usize| (c * (k + 1) + m) * (cap + 1) + g;
    let size = (n + 1) * (k + 1) * (cap + 1);
    let mut cur = vec![0u128; size];
    cur[idx(0, 0, cap)] = 1;
    let mut next = vec![0u128; size];
    let mut deadline = 0usize;
    for p in lo..=hi {
        next.iter_mut().for_each(|v| *v = 0);
        let allowed = xs.iter().any(|&s| (p - s).abs() <= r);
        for c in 0..=n {
            for m in 0..=k {
                for g in 0..=cap {
                    let v = cur[idx(c, m, g)];
                    if v == 0 {
                        continue;
                    }
                    // Skip p: the gap grows (first position has no predecessor).
                    let g_skip = if p == lo { cap } else { (g + 1).min(cap) };
                    next[idx(c, m, g_skip)] += v;
                    if allowed && c < n {
                        let joins = p != lo && g == 0;
                        let m2 = if joins { m } else { m + 1 };
                        if m2 <= k {
                            next[idx(c + 1, m2, 0)] += v;
                        }
                    }
                }
            }
        }
        // Every x_j must have a chosen site within r once the scan passes x_j + r.
        while deadline < n && xs[deadline] + r == p {
            for c in 0..=n {
                for m in 0..=k {
                    for g in 0..=cap {
                        if g > 2 * r as usize {
                            next[idx(c, m, g)] = 0;
                        }
                    }
                }
            }
            deadline += 1;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    (1..=k)
        .map(|m| (0..=cap).map(|g| cur[idx(n, m, g)]).sum())
        .collect()
}

/// Shell-resolved Hausdorff exponential sum.
#[derive(Debug, Clone, Serialize)]
pub struct HausdorffSum {
    pub value: f64,
    pub radius: u64,
    pub last_increment: f64,
    /// `shells[r][m − 1] = |{y : d_H(x, y) = r, W_y = m}|`.
    pub shells: Vec<Vec<u128>>,
    /// `sum / N^{2k}`.
    pub ratio: f64,
}

/// `Σ_{y ∈ 𝒫_{N,k}(ℤ)} e^{−α d_H(x, y)}` shell by shell.
pub fn exp_sum_dh(x: &Configuration, k: usize, alpha: f64, radius: Option<u64>) -> Result<HausdorffSum> {
    let n = x.len();
    if !(1 <= k && k <= n) {
        return domain(format!("need 1 <= k <= N, got k = {k}, N = {n}"));
    }
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    let mut r_max = radius.unwrap_or_else(|| default_radius(alpha)).max(1);
    let mut shells: Vec<Vec<u128>> = Vec::new();
    let mut previous = vec![0u128; k];
    let mut value = 0.0;
    for _ in 0..=MAX_DOUBLINGS {
        while (shells.len() as u64) <= r_max {
            let r = shells.len() as u64;
            let ball = hausdorff_ball_counts(x, r, k);
            let shell: Vec<u128> = ball.iter().zip(&previous).map(|(b, p)| b - p).collect();
            value += shell.iter().sum::<u128>() as f64 * (-alpha * r as f64).exp();
            previous = ball;
            shells.push(shell);
        }
        let last = shells[r_max as usize].iter().sum::<u128>() as f64 * (-alpha * r_max as f64).exp();
        if last <= CERTIFICATE * value {
            return Ok(HausdorffSum {
                value,
                radius: r_max,
                last_increment: last,
                ratio: value / (n as f64).powi(2 * k as i32),
                shells,
            });
        }
        r_max *= 2;
    }
    Err(Error::Refused(format!(
        "Hausdorff sum not certified up to radius {r_max}"
    )))
}

/// Sparse complex matrices for the spin-space counterexample.
pub(crate) mod spin {
    use super::*;

    pub type SparseC = CsMat<C64>;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn local(entries: &[(usize, usize, C64)]) -> SparseC {
        let mut t = TriMat::new((2, 2));
        for &(i, j, v) in entries {
            t.add_triplet(i, j, v);
        }
        t.to_csr()
    }

    pub fn pauli_x() -> SparseC {
        local(&[(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
    }

    pub fn pauli_y() -> SparseC {
        local(&[(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))])
    }

    pub fn pauli_z() -> SparseC {
        local(&[(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))])
    }

    /// `op` on tensor factor `i` of `n`.
    pub fn embed(op: &SparseC, i: usize, n: usize) -> SparseC {
        let left: SparseC = CsMat::eye(1 << i);
        let right: SparseC = CsMat::eye(1 << (n - 1 - i));
        let lo: SparseC = kronecker_product(left.view(), op.view());
        kronecker_product(lo.view(), right.view())
    }

    pub fn zero(dim: usize) -> SparseC {
        CsMat::zero((dim, dim)).to_csr()
    }

    /// Largest entry modulus of `a − b`.
    pub fn max_diff(a: &SparseC, b: &SparseC) -> f64 {
        let d = a - b;
        d.iter().fold(0.0f64, |m, (v, _)| m.max(v.norm()))
    }

    /// Operator norm, exactly: the Gram matrix splits into connected
    /// components of its sparsity graph, each diagonalized densely.
    pub fn operator_norm(m: &SparseC) -> Result<f64> {
        let adj: SparseC = m.transpose_view().to_csr().map(|v| v.conj());
        let gram: SparseC = &adj * m;
        let n = gram.rows();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for (_, (i, j)) in gram.iter() {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a] = b;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().push(i);
        }
        let mut best = 0.0f64;
        for members in groups.values() {
            if members.len() > 4096 {
                return Err(Error::Refused("Gram block too large for a dense norm".into()));
            }
            let pos: std::collections::HashMap<usize, usize> =
                members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let mut block = DMatrix::<C64>::zeros(members.len(), members.len());
            for &i in members {
                if let Some(row) = gram.outer_view(i) {
                    for (j, v) in row.iter() {
                        block[(pos[&i], pos[&j])] = *v;
                    }
                }
            }
            let eig = nalgebra::SymmetricEigen::new(block);
            best = eig.eigenvalues.iter().fold(best, |a, &b| a.max(b));
        }
        Ok(best.max(0.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::Distribution;
    use crate::operators::assemble_hamiltonian;

    fn cfg(v: &[i64]) -> Configuration {
        Configuration::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_site_tensor() {
        let r = Region::interval(3, 3).unwrap();
        let om = DisorderSample::explicit(vec![3], vec![0.25]).unwrap();
        let p = ModelParams::new(2.0, 2.0).unwrap();
        let t = tensor_hamiltonian(&r, &p, &om).unwrap();
        assert_eq!(t.sector_block(0).unwrap()[(0, 0)], 0.0);
        assert_eq!(t.sector_block(1).unwrap()[(0, 0)], 1.5);
    }

    #[test]
    fn tensor_matches_sector_assembly() {
        let p = ModelParams::new(3.0, 1.7).unwrap();
        for region in [
            Region::interval(0, 6).unwrap(),
            Region::interval(0, 6).unwrap().with_cut_intervals(&[[2, 4]]).unwrap(),
            Region::from_intervals(&[[0, 2], [5, 7]]).unwrap(),
        ] {
            let om = DisorderSample::sample(&region, Distribution::Uniform01, 4).unwrap();
            let t = tensor_hamiltonian(&region, &p, &om).unwrap();
            assert_eq!(t.number_commutator_max(), 0.0);
            assert_eq!(t.off_block_max(), 0.0);
            assert_eq!(t.asymmetry(), 0.0);
            for n in 0..=region.len() {
                let h = assemble_hamiltonian(&region, n, &p, &om).unwrap();
                let diff = (t.sector_block(n).unwrap() - h.matrix()).amax();
                assert!(diff <= 1e-12, "N = {n}: {diff}");
            }
        }
    }

    #[test]
    fn tensor_size_cap() {
        let r = Region::interval(0, 14).unwrap();
        let om = DisorderSample::zeros(&r);
        let p = ModelParams::new(2.0, 0.0).unwrap();
        assert!(matches!(tensor_hamiltonian(&r, &p, &om), Err(Error::Refused(_))));
    }

    #[test]
    fn partitions() {
        let p = partition_counts(100).unwrap();
        assert_eq!(&p[..8], &[1, 1, 2, 3, 5, 7, 11, 15]);
        assert_eq!(p[100], 190_569_292);
        let (series, product) = partition_generating_function(1.0).unwrap();
        assert!((series - product).abs() < 1e-10 * product);
    }

    #[test]
    fn c_alpha_shape() {
        assert!(c_alpha(0.0).is_err());
        assert!((c_alpha(60.0).unwrap() - 1.0).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for a in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let c = c_alpha(a).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn d1_sum_single_particle_closed_form() {
        for alpha in [0.5, 1.0, 2.0] {
            let q = (-alpha as f64).exp();
            let exact = (1.0 + q) / (1.0 - q);
            let s = exp_sum_d1(&cfg(&[0]), 1, alpha, None).unwrap();
            assert!((s.value - exact).abs() <= 1e-12 * exact);
            assert!(s.holds);
            let d = exp_sum_d1_dual(&cfg(&[5]), 1, alpha, None).unwrap();
            assert!((d.value - exact).abs() <= 1e-12 * exact);
            assert!(d.value <= c_alpha(alpha).unwrap());
        }
    }

    #[test]
    fn d1_sum_matches_brute_force() {
        // All 2-particle configurations in a window, restricted to one cluster.
        let (alpha, radius) = (1.3, 6i64);
        let y = cfg(&[0, 3]);
        let mut brute = 0.0;
        for a in -radius..=radius {
            for b in (3 - radius)..=(3 + radius) {
                if a < b && b - a == 1 {
                    brute += (-alpha * ((a.abs() + (b - 3).abs()) as f64)).exp();
                }
            }
        }
        let dp = d1_sum(y.sites(), alpha, radius, Some(1));
        assert!((dp - brute).abs() < 1e-14);
    }

    #[test]
    fn sums_are_translation_invariant() {
        let a = exp_sum_d1(&cfg(&[0, 1, 4]), 2, 1.0, None).unwrap();
        let b = exp_sum_d1(&cfg(&[100, 101, 104]), 2, 1.0, None).unwrap();
        assert_eq!(a.value, b.value);
        let a = exp_sum_dh(&cfg(&[0, 1]), 1, 1.0, Some(20)).unwrap();
        let b = exp_sum_dh(&cfg(&[-7, -6]), 1, 1.0, Some(20)).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn hausdorff_balls_match_enumeration() {
        let x = cfg(&[0, 1, 4]);
        for r in 0..=3u64 {
            let counts = hausdorff_ball_counts(&x, r, 3);
            let window = Region::interval(-(r as i64), 4 + r as i64).unwrap();
            let line = Region::interval(-50, 50).unwrap();
            let mut want = vec![0u128; 3];
            for y in crate::config_space::enumerate_sector(&window, 3).unwrap() {
                let d = crate::config_space::dist_hausdorff(&x, &y, &line).unwrap();
                if d <= crate::config_space::ExtDist::Finite(r) {
                    want[cluster_count_unchecked(&y, &line) - 1] += 1;
                }
            }
            assert_eq!(counts, want, "r = {r}");
        }
    }

    #[test]
    fn hausdorff_shells() {
        let s = exp_sum_dh(&cfg(&[0, 1]), 1, 1.0, None).unwrap();
        assert_eq!(s.shells[0], vec![1]);
        for (r, shell) in s.shells.iter().enumerate() {
            let envelope = crate::config_space::binomial_f64(2 + 2 * r as u64, 2);
            assert!(shell[0] as f64 <= envelope);
        }
        let total: u128 = s.shells.iter().map(|v| v[0]).sum();
        assert_eq!(total, hausdorff_ball_counts(&cfg(&[0, 1]), s.radius, 1)[0]);
    }

    #[test]
    fn sparse_norm_of_permutation_like_matrix() {
        let x = spin::embed(&spin::pauli_x(), 1, 3);
        assert!((spin::operator_norm(&x).unwrap() - 1.0).abs() < 1e-12);
        let z0 = spin::embed(&spin::pauli_z(), 0, 3);
        let comm = &(&x * &z0) - &(&z0 * &x);
        assert_eq!(spin::operator_norm(&comm).unwrap(), 0.0);
        let x0 = spin::embed(&spin::pauli_x(), 0, 3);
        let comm = &(&x0 * &z0) - &(&z0 * &x0);
        assert!((spin::operator_norm(&comm).unwrap() - 2.0).abs() < 1e-12);
    }
}
