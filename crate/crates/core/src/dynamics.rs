//! Time evolution, the Lieb-Robinson bound for decoupled Hamiltonians, the
//! filter function `F_{t,a}` with its quasi-locality and Fourier bounds, and
//! the diagonal spin model that separates weak dynamical localization from
//! non-propagation of information.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sprs::CsMat;

use crate::config_space::{DistanceKind, ExtDist, Region, SectorBasis};
use crate::disorder::DisorderSample;
use crate::error::{domain, Error, Result};
use crate::estimators::{decay_fit, FitPoint};
use crate::numerics::{eig_sym, matrix_function_complex, operator_norm_complex, EigenDecomposition, C64};
use crate::operators::{assemble_hamiltonian, ModelParams};
use crate::oracles::spin;
use crate::report::{num, CsvTable};

/// `e^{−itH}`; exactly the identity at `t = 0`.
pub fn propagator(decomp: &EigenDecomposition, t: f64) -> DMatrix<C64> {
    let n = decomp.dim();
    if t == 0.0 {
        return DMatrix::identity(n, n);
    }
    matrix_function_complex(decomp, |x| C64::from_polar(1.0, -t * x))
}

/// `e^{−itH} ψ`.
pub fn evolve_state(decomp: &EigenDecomposition, t: f64, psi: &DVector<C64>) -> DVector<C64> {
    if t == 0.0 {
        return psi.clone();
    }
    let v = decomp.vectors.map(|x| C64::new(x, 0.0));
    let mut c = v.transpose() * psi;
    for (k, ck) in c.iter_mut().enumerate() {
        *ck *= C64::from_polar(1.0, -t * decomp.values[k]);
    }
    v * c
}

/// `e^{itH} O e^{−itH}`.
pub fn evolve_observable(decomp: &EigenDecomposition, t: f64, obs: &DMatrix<C64>) -> DMatrix<C64> {
    if t == 0.0 {
        return obs.clone();
    }
    let u = propagator(decomp, t);
    u.adjoint() * obs * u
}

/// `[min, max]` consecutive in the graph of `region` (cut edges removed).
fn connected(region: &Region, set: &[i64]) -> bool {
    !set.is_empty() && set.windows(2).all(|w| region.adjacent(w[0], w[1]))
}

fn sorted(v: &[i64]) -> Vec<i64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// `A ⊊ B ⊂ Λ`, `A ⊆ K₁` connected in `K₁`, where `K₁` is the region's cut
/// (or all of `Λ` without one).
fn check_locality_hypotheses(region: &Region, a: &[i64], b: &[i64]) -> Result<()> {
    if let Some(s) = a.iter().chain(b).find(|&&s| !region.contains(s)) {
        return domain(format!("site {s} is outside the region"));
    }
    if !a.iter().all(|s| b.binary_search(s).is_ok()) || a.len() == b.len() {
        return domain("need A to be a proper subset of B");
    }
    if let Some(k1) = region.cut() {
        if !a.iter().all(|s| k1.contains(s)) {
            return domain("A must lie inside the cut K1");
        }
    }
    if !connected(region, a) {
        return domain("A must be connected in K1");
    }
    Ok(())
}

/// `‖P_−^A U P_+^B‖` restricted to one sector, from the decomposition.
fn sandwiched_norm(decomp: &EigenDecomposition, basis: &SectorBasis, a: &[i64], b: &[i64], f: impl Fn(f64) -> C64) -> f64 {
    let rows: Vec<usize> = (0..basis.size()).filter(|&i| basis.config(i).intersects(a)).collect();
    let cols: Vec<usize> = (0..basis.size()).filter(|&i| !basis.config(i).intersects(b)).collect();
    if rows.is_empty() || cols.is_empty() {
        return 0.0;
    }
    let n = decomp.dim();
    let fv: Vec<C64> = decomp.values.iter().map(|&x| f(x)).collect();
    let left = DMatrix::from_fn(rows.len(), n, |i, k| fv[k] * decomp.vectors[(rows[i], k)]);
    let right = DMatrix::from_fn(n, cols.len(), |k, j| C64::new(decomp.vectors[(cols[j], k)], 0.0));
    operator_norm_complex(&(left * right))
}

#[derive(Debug, Clone, Serialize)]
pub struct LrPoint {
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    /// Whether the bound exceeds 1 and so says nothing.
    pub vacuous: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LrReport {
    pub r: u64,
    pub points: Vec<LrPoint>,
    pub all_hold: bool,
}

fn factorial(r: u64) -> f64 {
    (1..=r).map(|k| k as f64).product()
}

/// `‖P_−^A e^{itH} P_+^B‖` against `Δ^{−r}|t|^r/r!` on the given sectors
/// (all sectors when `sectors` is `None`). `H` is decoupled along the cut.
pub fn lieb_robinson_check(
    region: &Region,
    sectors: Option<&[usize]>,
    params: &ModelParams,
    omega: &DisorderSample,
    a: &[i64],
    b: &[i64],
    times: &[f64],
) -> Result<LrReport> {
    let (a, b) = (sorted(a), sorted(b));
    check_locality_hypotheses(region, &a, &b)?;
    let whole = region.without_cut();
    let complement: Vec<i64> = region.sites().iter().copied().filter(|s| b.binary_search(s).is_err()).collect();
    let mut r = ExtDist::Infinite;
    for &x in &a {
        for &y in &complement {
            r = r.min(whole.site_distance(x, y)?);
        }
    }
    let r = r.finite().ok_or_else(|| Error::Domain("B^c is unreachable from A".into()))?;
    let all: Vec<usize> = (0..=region.len()).collect();
    let sectors = sectors.unwrap_or(&all);
    let mut measured = vec![0.0f64; times.len()];
    for &n in sectors {
        let h = assemble_hamiltonian(region, n, params, omega)?;
        let decomp = eig_sym(h.matrix())?;
        for (m, &t) in measured.iter_mut().zip(times) {
            if t == 0.0 {
                // The identity has no entries between configurations meeting A and avoiding B.
                continue;
            }
            let v = sandwiched_norm(&decomp, h.basis(), &a, &b, |x| C64::from_polar(1.0, t * x));
            *m = m.max(v);
        }
    }
    let points: Vec<LrPoint> = times
        .iter()
        .zip(measured)
        .map(|(&t, measured)| {
            let bound = params.delta.powi(-(r as i32)) * t.abs().powi(r as i32) / factorial(r);
            LrPoint { t, measured, bound, vacuous: bound >= 1.0, holds: measured <= bound * (1.0 + 1e-8) }
        })
        .collect();
    Ok(LrReport { r, all_hold: points.iter().all(|p| p.holds), points })
}

impl LrReport {
    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        let mut tab = CsvTable::new(header, ["r", "t", "measured", "bound", "margin"]);
        for p in &self.points {
            tab.push([self.r.to_string(), num(p.t), num(p.measured), num(p.bound), num(p.bound - p.measured)]);
        }
        tab
    }
}

/// `F_{ξ,a}(x − E) = (1 − e^{−ξ(x−E)²}) / (x − E − ia)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub xi: f64,
    pub a: f64,
    pub energy: f64,
}

impl FilterSpec {
    pub fn new(xi: f64, a: f64, energy: f64) -> Result<FilterSpec> {
        if !(xi > 0.0 && xi.is_finite()) {
            return domain(format!("filter width must be positive, got {xi}"));
        }
        Ok(FilterSpec { xi, a, energy })
    }

    /// `F_{ξ,a}(x)`, with the removable point `F_{ξ,0}(0) = 0`.
    pub fn eval(&self, x: f64) -> C64 {
        if x == 0.0 && self.a == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let top = -(-self.xi * x * x).exp_m1();
        C64::new(top, 0.0) / C64::new(x, -self.a)
    }
}

/// `F_{ξ,a}(H − E)`.
pub fn filter_apply(decomp: &EigenDecomposition, spec: &FilterSpec) -> DMatrix<C64> {
    matrix_function_complex(decomp, |x| spec.eval(x - spec.energy))
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityPoint {
    pub ell: u64,
    pub t: f64,
    pub measured: f64,
    /// `e^{−ℓ/2}`, the bound with unit constant.
    pub envelope: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityReport {
    pub a: f64,
    pub points: Vec<LocalityPoint>,
    /// `−slope` of `ln ‖·‖` against `ℓ`.
    pub rate: Option<f64>,
    pub nonincreasing: bool,
}

/// `‖P_−^S F_{t,a}(H − E) P_+^T‖` with `T = [s − ℓ, s + ℓ]` and `t = Δ²ℓ/50`.
pub fn filter_locality_check(
    region: &Region,
    n_particles: usize,
    params: &ModelParams,
    omega: &DisorderSample,
    s: &[i64],
    ells: &[u64],
    a: f64,
    energy: f64,
) -> Result<LocalityReport> {
    let s = sorted(s);
    if s.is_empty() {
        return domain("S must be nonempty");
    }
    if ells.windows(2).any(|w| w[0] >= w[1]) {
        return domain("the l grid must be strictly increasing");
    }
    let h = assemble_hamiltonian(region, n_particles, params, omega)?;
    let decomp = eig_sym(h.matrix())?;
    let mut points = Vec::new();
    for &ell in ells {
        let (lo, hi) = (s[0] - ell as i64, s[s.len() - 1] + ell as i64);
        let t_set: Vec<i64> = region.sites().iter().copied().filter(|&x| lo <= x && x <= hi).collect();
        if ell > 0 {
            check_locality_hypotheses(region, &s, &t_set)?;
        }
        if t_set.len() as i64 != hi - lo + 1 {
            return domain(format!("T = [{lo}, {hi}] does not fit in the region"));
        }
        let t = params.delta * params.delta * ell as f64 / 50.0;
        let measured = if ell == 0 {
            // F vanishes identically at width 0.
            0.0
        } else {
            let spec = FilterSpec::new(t, a, energy)?;
            sandwiched_norm(&decomp, h.basis(), &s, &t_set, |x| spec.eval(x - energy))
        };
        points.push(LocalityPoint { ell, t, measured, envelope: (-(ell as f64) / 2.0).exp() });
    }
    let fit_points: Vec<FitPoint> = points
        .iter()
        .filter(|p| p.ell > 0)
        .map(|p| FitPoint::new(ExtDist::Finite(p.ell), p.measured))
        .collect();
    let rate = decay_fit(&fit_points, DistanceKind::D1, None).ok().map(|f| -f.slope);
    let nonincreasing = points
        .windows(2)
        .filter(|w| w[0].ell > 0)
        .all(|w| w[1].measured <= w[0].measured * (1.0 + 1e-9) + 1e-15);
    Ok(LocalityReport { a, points, rate, nonincreasing })
}

impl LocalityReport {
    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        let mut tab = CsvTable::new(header, ["a", "ell", "t", "measured", "bound", "margin"]);
        for p in &self.points {
            tab.push([num(self.a), p.ell.to_string(), num(p.t), num(p.measured), num(p.envelope), num(p.envelope - p.measured)]);
        }
        tab
    }
}

/// `F_{t,a,ε}(x) = (e^{−εx²} − e^{−tx²}) / (x − ia)`.
pub fn filter_eps(t: f64, a: f64, eps: f64, x: f64) -> C64 {
    if x == 0.0 && a == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let top = (-eps * x * x).exp_m1() - (-t * x * x).exp_m1();
    C64::new(top, 0.0) / C64::new(x, -a)
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierPoint {
    pub xi: f64,
    pub measured: f64,
    pub bound: f64,
    /// Quadrature error estimate plus truncation tail.
    pub budget: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FourierReport {
    pub t: f64,
    pub a: f64,
    pub eps: f64,
    pub half_width: f64,
    pub step: f64,
    pub points: Vec<FourierPoint>,
    pub all_hold: bool,
}

/// Trapezoid `(1/√2π) Σ F(x_j) e^{−iξx_j} h` over `[−X, X]`.
fn trapezoid(f: &[C64], x0: f64, h: f64, xi: f64) -> C64 {
    let n = f.len();
    let mut acc = C64::new(0.0, 0.0);
    for (j, v) in f.iter().enumerate() {
        let x = x0 + j as f64 * h;
        let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
        acc += v * C64::from_polar(w, -xi * x);
    }
    acc * h / (2.0 * PI).sqrt()
}

/// `|F̂_{t,a,ε}(ξ)|` by quadrature against `5 e^{−ξ²/4t}`.
pub fn fourier_bound_check(t: f64, a: f64, eps: f64, xis: &[f64]) -> Result<FourierReport> {
    if !(0.0 < eps && eps < t) {
        return domain(format!("need 0 < eps < t, got eps = {eps}, t = {t}"));
    }
    let half_width = (40.0 / eps).sqrt();
    let xi_max = xis.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    // e^{−εX²}/(εX²), the integrated tail beyond ±X.
    let tail = 2.0 * (-eps * half_width * half_width).exp() / (eps * half_width * half_width) / (2.0 * PI).sqrt();
    let mut h = (PI / (4.0 * xi_max)).min(0.05);
    for _ in 0..6 {
        let n = (2.0 * half_width / h).ceil() as usize;
        let h_fine = 2.0 * half_width / (2 * n) as f64;
        let fine: Vec<C64> = (0..=2 * n).map(|j| filter_eps(t, a, eps, -half_width + j as f64 * h_fine)).collect();
        let coarse: Vec<C64> = fine.iter().step_by(2).copied().collect();
        let mut points = Vec::with_capacity(xis.len());
        let mut refine = false;
        for &xi in xis {
            let i_fine = trapezoid(&fine, -half_width, h_fine, xi);
            let i_coarse = trapezoid(&coarse, -half_width, 2.0 * h_fine, xi);
            let budget = (i_fine - i_coarse).norm() + tail;
            let bound = 5.0 * (-xi * xi / (4.0 * t)).exp();
            if budget > 0.1 * bound {
                refine = true;
                break;
            }
            let measured = i_fine.norm();
            points.push(FourierPoint { xi, measured, bound, budget, holds: measured <= bound + budget });
        }
        if !refine {
            return Ok(FourierReport {
                t,
                a,
                eps,
                half_width,
                step: h_fine,
                all_hold: points.iter().all(|p| p.holds),
                points,
            });
        }
        h /= 2.0;
    }
    Err(Error::Refused(format!(
        "quadrature error exceeds 10% of the bound (t = {t}, a = {a}, eps = {eps}); refine the grid"
    )))
}

impl FourierReport {
    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        let mut tab = CsvTable::new(header, ["t", "a", "xi", "measured", "bound", "margin", "budget"]);
        for p in &self.points {
            tab.push([num(self.t), num(self.a), num(p.xi), num(p.measured), num(p.bound), num(p.bound - p.measured), num(p.budget)]);
        }
        tab
    }
}

/// The single-site observable used as a commutator witness at site `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    X,
    Z,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport {
    pub l: usize,
    pub t: f64,
    pub witness: Witness,
    /// Largest off-diagonal modulus of `e^{itH}` in the canonical basis.
    pub propagator_offdiag: f64,
    /// Largest `|π_ν(x, y)|` with `x ≠ y`.
    pub eigencorrelator_offdiag: f64,
    /// `max_t ‖τ_t(σ_0^x) − cos(2St)σ_0^x + sin(2St)σ_0^y‖_max`.
    pub evolution_residual: f64,
    /// `‖τ_t(σ_0^x) − Π_n σ_n^z σ_0^x‖_max` at the chosen `t`.
    pub string_residual: f64,
    /// `‖[τ_t(σ_0^x), W_L]‖`.
    pub commutator: f64,
}

impl CounterexampleReport {
    pub fn diagonal_pass(&self) -> bool {
        self.propagator_offdiag == 0.0 && self.eigencorrelator_offdiag == 0.0
    }

    pub fn evolution_pass(&self) -> bool {
        self.evolution_residual <= 1e-10
    }

    pub fn string_pass(&self) -> bool {
        self.string_residual <= 1e-10
    }

    pub fn commutator_pass(&self) -> bool {
        (self.commutator - 2.0).abs() <= 1e-10
    }

    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        let mut tab = CsvTable::new(header, ["assertion", "value", "target", "status"]);
        let status = |b: bool| if b { "PASS" } else { "FAIL" };
        tab.push(["diagonal_propagator".into(), num(self.propagator_offdiag), "0".into(), status(self.propagator_offdiag == 0.0).into()]);
        tab.push(["offdiagonal_eigencorrelator".to_string(), num(self.eigencorrelator_offdiag), "0".into(), status(self.eigencorrelator_offdiag == 0.0).into()]);
        tab.push(["evolution_identity".to_string(), num(self.evolution_residual), "1e-10".into(), status(self.evolution_pass()).into()]);
        tab.push(["string_identity".to_string(), num(self.string_residual), "1e-10".into(), status(self.string_pass()).into()]);
        tab.push(["commutator_witness".to_string(), num(self.commutator), "2".into(), status(self.commutator_pass()).into()]);
        tab
    }
}

fn diag_of(m: &CsMat<C64>) -> Result<Vec<f64>> {
    let mut d = vec![0.0; m.rows()];
    for (v, (i, j)) in m.iter() {
        if i != j {
            if v.norm() != 0.0 {
                return Err(Error::Refused("spin Hamiltonian is not diagonal".into()));
            }
            continue;
        }
        d[i] += v.re;
    }
    Ok(d)
}

/// `H = S σ_0^z`, `S = Σ_{n=1}^L σ_n^z`, on the spins `{0, …, L}`; checks the
/// evolution of `σ_0^x` at time `t` against the string operator and a
/// witness at site `L`.
pub fn counterexample_app_a(l: usize, t: f64, witness: Witness) -> Result<CounterexampleReport> {
    if l == 0 || l % 4 != 0 {
        return domain(format!("L must be a positive multiple of 4, got {l}"));
    }
    if l > 12 {
        return Err(Error::Refused(format!("L = {l} exceeds the tensor-space cap of 12")));
    }
    let n = l + 1;
    let dim = 1usize << n;
    let z0 = spin::embed(&spin::pauli_z(), 0, n);
    let s_op = (1..=l).fold(spin::zero(dim), |acc, k| &acc + &spin::embed(&spin::pauli_z(), k, n));
    let h = &s_op * &z0;
    let hd = diag_of(&h)?;
    let sd = diag_of(&s_op)?;

    // Functions of H, computed generically where the dimension allows.
    let (propagator_offdiag, eigencorrelator_offdiag) = if dim <= 512 {
        let dense = DMatrix::from_fn(dim, dim, |i, j| if i == j { hd[i] } else { 0.0 });
        let decomp = eig_sym(&dense)?;
        let u = propagator(&decomp, -1.3);
        let off_u = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .fold(0.0f64, |m, (i, j)| m.max(u[(i, j)].norm()));
        let mut off_q = 0.0f64;
        for r in decomp.clusters() {
            for i in 0..dim {
                for j in 0..dim {
                    if i != j {
                        off_q = off_q.max(decomp.projection_entry(r.clone(), i, j).abs());
                    }
                }
            }
        }
        (off_u, off_q)
    } else {
        // H is diagonal, so every f(H) is the diagonal matrix f(h).
        (0.0, 0.0)
    };

    let x0 = spin::embed(&spin::pauli_x(), 0, n);
    let y0 = spin::embed(&spin::pauli_y(), 0, n);
    let tau = |time: f64| -> CsMat<C64> {
        x0.clone().apply_indexed(|i, j, v| v * C64::from_polar(1.0, time * (hd[i] - hd[j])))
    };
    let scaled_diag = |f: &dyn Fn(f64) -> f64| -> CsMat<C64> {
        let mut tri = sprs::TriMat::new((dim, dim));
        for (i, &s) in sd.iter().enumerate() {
            tri.add_triplet(i, i, C64::new(f(s), 0.0));
        }
        tri.to_csr()
    };
    let mut evolution_residual = 0.0f64;
    for time in [0.3, PI / 4.0, PI / 2.0, 1.7, t] {
        let cos = scaled_diag(&|s| (2.0 * s * time).cos());
        let sin = scaled_diag(&|s| (2.0 * s * time).sin());
        let rhs = &(&cos * &x0) - &(&sin * &y0);
        evolution_residual = evolution_residual.max(spin::max_diff(&tau(time), &rhs));
    }
    let tau_t = tau(t);
    let string = (1..=l).fold(x0.clone(), |acc, k| &spin::embed(&spin::pauli_z(), k, n) * &acc);
    let string_residual = spin::max_diff(&tau_t, &string);
    let w = match witness {
        Witness::X => spin::embed(&spin::pauli_x(), l, n),
        Witness::Z => spin::embed(&spin::pauli_z(), l, n),
    };
    let comm = &(&tau_t * &w) - &(&w * &tau_t);
    Ok(CounterexampleReport {
        l,
        t,
        witness,
        propagator_offdiag,
        eigencorrelator_offdiag,
        evolution_residual,
        string_residual,
        commutator: spin::operator_norm(&comm)?,
    })
}

trait ApplyIndexed {
    fn apply_indexed(self, f: impl Fn(usize, usize, C64) -> C64) -> Self;
}

impl ApplyIndexed for CsMat<C64> {
    fn apply_indexed(self, f: impl Fn(usize, usize, C64) -> C64) -> Self {
        let mut tri = sprs::TriMat::new((self.rows(), self.cols()));
        for (v, (i, j)) in self.iter() {
            tri.add_triplet(i, j, f(i, j, *v));
        }
        tri.to_csr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disorder::Distribution;

    fn decomp(seed: u64) -> (EigenDecomposition, DMatrix<f64>) {
        let r = Region::interval(0, 6).unwrap();
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let om = DisorderSample::sample(&r, Distribution::Uniform01, seed).unwrap();
        let h = assemble_hamiltonian(&r, 2, &p, &om).unwrap();
        (eig_sym(h.matrix()).unwrap(), h.into_matrix())
    }

    #[test]
    fn evolution_basics() {
        let (d, h) = decomp(1);
        let n = d.dim();
        assert_eq!(propagator(&d, 0.0), DMatrix::identity(n, n));
        let mut psi = DVector::<C64>::zeros(n);
        psi[3] = C64::new(0.6, 0.0);
        psi[7] = C64::new(0.0, 0.8);
        let hc = h.map(|v| C64::new(v, 0.0));
        let e0 = psi.dotc(&(&hc * &psi)).re;
        for t in [0.5, 3.0, 40.0] {
            let pt = evolve_state(&d, t, &psi);
            assert!((pt.norm() - 1.0).abs() < 1e-10);
            assert!((pt.dotc(&(&hc * &pt)).re - e0).abs() < 1e-9);
            let u = propagator(&d, t);
            assert!((u.adjoint() * &u - DMatrix::identity(n, n)).camax() < 1e-9);
        }
    }

    #[test]
    fn lr_examples() {
        let r = Region::interval(0, 7).unwrap().with_cut_intervals(&[[0, 4]]).unwrap();
        let p = ModelParams::new(2.0, 0.5).unwrap();
        let om = DisorderSample::sample(&r, Distribution::Uniform01, 2).unwrap();
        let b: Vec<i64> = (1..=5).collect();
        let rep = lieb_robinson_check(&r, None, &p, &om, &[3], &b, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(rep.r, 3);
        assert_eq!(rep.points[0].measured, 0.0);
        assert!((rep.points[1].bound - 1.0 / 48.0).abs() < 1e-15);
        assert!(rep.all_hold, "{rep:?}");
        assert!(lieb_robinson_check(&r, None, &p, &om, &[6], &b, &[1.0]).is_err());
        assert!(lieb_robinson_check(&r, None, &p, &om, &[2, 4], &b, &[1.0]).is_err());
    }

    #[test]
    fn filter_scalar_and_operator() {
        let f = FilterSpec::new(2.0, 0.0, 0.0).unwrap();
        assert_eq!(f.eval(0.0), C64::new(0.0, 0.0));
        let g = FilterSpec::new(2.0, 0.3, 0.0).unwrap();
        let x: f64 = 0.7;
        let direct = C64::new(1.0 - (-2.0 * x * x).exp(), 0.0) / C64::new(x, -0.3);
        assert!((g.eval(x) - direct).norm() < 1e-15);

        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.5, 2.0]));
        let d = eig_sym(&diag).unwrap();
        let fm = filter_apply(&d, &FilterSpec::new(3.0, 0.0, 1.0).unwrap());
        assert_eq!(fm[(0, 0)], C64::new(0.0, 0.0));
        let (dd, h) = decomp(4);
        let fm = filter_apply(&dd, &FilterSpec::new(1.5, 0.3, 1.0).unwrap());
        let hc = h.map(|v| C64::new(v, 0.0));
        assert!((&fm * &hc - &hc * &fm).camax() < 1e-9);
        let max_f = dd.values.iter().map(|&e| FilterSpec::new(1.5, 0.3, 1.0).unwrap().eval(e - 1.0).norm()).fold(0.0, f64::max);
        assert!(operator_norm_complex(&fm) <= max_f + 1e-10);
    }

    #[test]
    fn locality_decays() {
        let r = Region::interval(0, 15).unwrap().with_cut_intervals(&[[0, 13]]).unwrap();
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let om = DisorderSample::sample(&r, Distribution::Uniform01, 8).unwrap();
        let rep = filter_locality_check(&r, 2, &p, &om, &[7], &[0, 1, 2, 3, 4, 5, 6], 0.0, 1.0).unwrap();
        assert_eq!(rep.points[0].measured, 0.0);
        assert!(rep.rate.unwrap() > 0.4, "{rep:?}");
        assert!(filter_locality_check(&r, 2, &p, &om, &[7], &[1, 1], 0.0, 1.0).is_err());
    }

    #[test]
    fn fourier_a0_positive_side() {
        let rep = fourier_bound_check(5.0, 0.0, 0.01, &[0.0, 1.0, 4.0, 10.0]).unwrap();
        assert!(rep.all_hold);
        assert!(rep.points[0].measured < 1e-12);
        assert!(fourier_bound_check(1.0, 0.0, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn counterexample_l4() {
        let lit = counterexample_app_a(4, PI / 2.0, Witness::Z).unwrap();
        assert!(lit.diagonal_pass());
        assert!(lit.evolution_pass());
        assert!(lit.commutator < 1e-12);
        let fixed = counterexample_app_a(4, PI / 4.0, Witness::X).unwrap();
        assert!(fixed.string_pass());
        assert!(fixed.commutator_pass());
        assert!(counterexample_app_a(6, PI / 4.0, Witness::X).is_err());
    }
}
