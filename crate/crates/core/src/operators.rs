//! Sector matrices of the XXZ Hamiltonian and of the diagonal projections
//! built from the cluster structure.
//!
//! In the `N`-particle sector, `H = −(1/2Δ)·A + 𝒲 + λV` where `A` is the
//! adjacency matrix of single hard-core hops, `𝒲` counts clusters and `V`
//! sums the couplings of occupied sites. Open boundary conditions throughout.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config_space::{
    cluster_count_unchecked, hop_neighbors, Configuration, Region, RegionSpec, SectorBasis,
};
use crate::disorder::DisorderSample;
use crate::error::{domain, Error, Result};

/// Anisotropy `Δ > 1` and disorder strength `λ ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(delta: f64, lambda: f64) -> Result<ModelParams> {
        if !(delta > 1.0 && delta.is_finite()) {
            return domain(format!("anisotropy must satisfy delta > 1, got {delta}"));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return domain(format!("disorder strength must be >= 0, got {lambda}"));
        }
        Ok(ModelParams { delta, lambda })
    }

    /// Magnitude `1/(2Δ)` of the hopping amplitude.
    pub fn hop(&self) -> f64 {
        0.5 / self.delta
    }

    /// The droplet gap `1 − 1/Δ`.
    pub fn gap(&self) -> f64 {
        1.0 - 1.0 / self.delta
    }
}

/// A non-negative half-integer, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct HalfInt {
    twice: u32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };

    pub fn from_twice(twice: u32) -> HalfInt {
        HalfInt { twice }
    }

    pub fn integer(k: u32) -> HalfInt {
        HalfInt { twice: 2 * k }
    }

    pub fn from_f64(q: f64) -> Result<HalfInt> {
        let t = 2.0 * q;
        if !(q >= 0.0) || t != t.round() || t > u32::MAX as f64 {
            return domain(format!("{q} is not a non-negative half-integer"));
        }
        Ok(HalfInt { twice: t as u32 })
    }

    pub fn twice(self) -> u32 {
        self.twice
    }

    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// `⌈q⌉`.
    pub fn ceil(self) -> u32 {
        self.twice.div_ceil(2)
    }

    /// `q − ½`, if non-negative.
    pub fn minus_half(self) -> Option<HalfInt> {
        self.twice.checked_sub(1).map(HalfInt::from_twice)
    }
}

impl TryFrom<f64> for HalfInt {
    type Error = Error;

    fn try_from(q: f64) -> Result<HalfInt> {
        HalfInt::from_f64(q)
    }
}

impl From<HalfInt> for f64 {
    fn from(q: HalfInt) -> f64 {
        q.value()
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice % 2 == 0 {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// An energy interval `[lo, hi)` or `(lo, hi)`; `lo` may be `−∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
}

impl Interval {
    pub fn everything() -> Interval {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            lo_closed: false,
        }
    }

    pub fn below(hi: f64) -> Interval {
        Interval {
            lo: f64::NEG_INFINITY,
            hi,
            lo_closed: false,
        }
    }

    pub fn half_open(lo: f64, hi: f64) -> Interval {
        Interval {
            lo,
            hi,
            lo_closed: true,
        }
    }

    pub fn contains(&self, e: f64) -> bool {
        let above = if self.lo_closed { e >= self.lo } else { e > self.lo };
        above && e < self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo || (self.hi == self.lo)
    }
}

/// The energy windows labelled by a half-integer `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub q: HalfInt,
    pub delta: f64,
}

impl EnergyWindow {
    pub fn new(q: HalfInt, delta: f64) -> Result<EnergyWindow> {
        if !(delta > 1.0 && delta.is_finite()) {
            return domain(format!("anisotropy must satisfy delta > 1, got {delta}"));
        }
        Ok(EnergyWindow { q, delta })
    }

    fn gap(&self) -> f64 {
        1.0 - 1.0 / self.delta
    }

    /// `(q + ¼)(1 − 1/Δ)`, the common upper endpoint.
    pub fn upper(&self) -> f64 {
        (self.q.value() + 0.25) * self.gap()
    }

    /// `(−∞, (q + ¼)(1 − 1/Δ))`.
    pub fn at_most(&self) -> Interval {
        Interval::below(self.upper())
    }

    /// `[1 − 1/Δ, (q + ¼)(1 − 1/Δ))`; empty for `q = 0, ½`.
    pub fn band(&self) -> Interval {
        Interval::half_open(self.gap(), self.upper())
    }

    /// Whether `Re z` lies in the half-plane region for this window.
    pub fn admits(&self, z: crate::numerics::C64) -> bool {
        z.re < self.upper()
    }
}

/// A real matrix over a sector basis.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    basis: Arc<SectorBasis>,
    matrix: DMatrix<f64>,
}

/// JSON export: basis descriptor plus nonzero entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripletExport {
    pub region: RegionSpec,
    pub n_particles: usize,
    pub dim: usize,
    pub triplets: Vec<(usize, usize, f64)>,
}

impl SectorOperator {
    pub fn new(basis: Arc<SectorBasis>, matrix: DMatrix<f64>) -> Result<SectorOperator> {
        let n = basis.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return domain(format!(
                "matrix is {}x{}, basis has size {n}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        Ok(SectorOperator { basis, matrix })
    }

    /// Densify a coordinate list; repeated coordinates are summed.
    pub fn from_triplets(basis: Arc<SectorBasis>, triplets: &[(usize, usize, f64)]) -> Result<SectorOperator> {
        let n = basis.size();
        let mut m = DMatrix::zeros(n, n);
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return domain(format!("triplet ({i}, {j}) outside dimension {n}"));
            }
            m[(i, j)] += v;
        }
        SectorOperator::new(basis, m)
    }

    pub fn diagonal(basis: Arc<SectorBasis>, diag: &[f64]) -> Result<SectorOperator> {
        let m = DMatrix::from_diagonal(&DVector::from_column_slice(diag));
        SectorOperator::new(basis, m)
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Matrix element `⟨φ_x, A φ_y⟩`.
    pub fn entry(&self, x: &Configuration, y: &Configuration) -> Result<f64> {
        Ok(self.matrix[(self.basis.rank(x)?, self.basis.rank(y)?)])
    }

    /// `self + c·other`, over the same basis.
    pub fn plus_scaled(&self, c: f64, other: &SectorOperator) -> Result<SectorOperator> {
        if self.dim() != other.dim() || self.basis.n_particles() != other.basis.n_particles() {
            return domain("operators live on different sectors");
        }
        SectorOperator::new(self.basis.clone(), &self.matrix + &other.matrix * c)
    }

    pub fn to_triplets(&self) -> TripletExport {
        let n = self.dim();
        let mut triplets = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let v = self.matrix[(i, j)];
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        triplets.sort_unstable_by_key(|&(i, j, _)| (i, j));
        TripletExport {
            region: self.basis.region().clone().into(),
            n_particles: self.basis.n_particles(),
            dim: n,
            triplets,
        }
    }
}

fn check_field(region: &Region, omega: &DisorderSample) -> Result<()> {
    match region.sites().iter().find(|&&s| omega.get(s).is_none()) {
        Some(s) => domain(format!("disorder field has no value at site {s}")),
        None => Ok(()),
    }
}

/// `Σ_{i∈x} ω_i`, summed in site order.
fn potential(x: &Configuration, omega: &DisorderSample) -> f64 {
    let mut v = 0.0;
    for &s in x.sites() {
        v += omega.get(s).expect("field checked against region");
    }
    v
}

/// The three pieces of `H`: adjacency `A` (unit entries), cluster count `𝒲`,
/// and potential `V`.
#[derive(Debug, Clone)]
pub struct HamiltonianParts {
    pub adjacency: SectorOperator,
    pub cluster: SectorOperator,
    pub potential: SectorOperator,
}

impl HamiltonianParts {
    /// `−(1/2Δ)·A + 𝒲 + λV`.
    pub fn combine(&self, params: &ModelParams) -> Result<SectorOperator> {
        self.cluster
            .plus_scaled(-params.hop(), &self.adjacency)?
            .plus_scaled(params.lambda, &self.potential)
    }
}

fn hop_triplets(basis: &SectorBasis, value: f64) -> Result<Vec<(usize, usize, f64)>> {
    let region = basis.region();
    let mut out = Vec::new();
    for (i, x) in basis.configs().iter().enumerate() {
        for (y, _) in hop_neighbors(x, region)? {
            out.push((i, basis.rank(&y)?, value));
        }
    }
    Ok(out)
}

pub fn assemble_parts(
    region: &Region,
    n_particles: usize,
    omega: &DisorderSample,
) -> Result<HamiltonianParts> {
    check_field(region, omega)?;
    let basis = Arc::new(SectorBasis::new(region, n_particles)?);
    let adjacency = SectorOperator::from_triplets(basis.clone(), &hop_triplets(&basis, 1.0)?)?;
    let w: Vec<f64> = basis
        .configs()
        .iter()
        .map(|x| cluster_count_unchecked(x, region) as f64)
        .collect();
    let v: Vec<f64> = basis.configs().iter().map(|x| potential(x, omega)).collect();
    Ok(HamiltonianParts {
        adjacency,
        cluster: SectorOperator::diagonal(basis.clone(), &w)?,
        potential: SectorOperator::diagonal(basis, &v)?,
    })
}

/// `H` on the `N`-particle sector of `region`. A cut on the region yields
/// the decoupled Hamiltonian `H^K + H^{K^c}`.
pub fn assemble_hamiltonian(
    region: &Region,
    n_particles: usize,
    params: &ModelParams,
    omega: &DisorderSample,
) -> Result<SectorOperator> {
    check_field(region, omega)?;
    let basis = Arc::new(SectorBasis::new(region, n_particles)?);
    let mut triplets = hop_triplets(&basis, -params.hop())?;
    for (i, x) in basis.configs().iter().enumerate() {
        let w = cluster_count_unchecked(x, region) as f64;
        triplets.push((i, i, w + params.lambda * potential(x, omega)));
    }
    SectorOperator::from_triplets(basis, &triplets)
}

/// `Γ = H^Λ − H^{K,K^c}` for the cut carried by `region`.
pub fn boundary_operator(
    region: &Region,
    n_particles: usize,
    params: &ModelParams,
) -> Result<SectorOperator> {
    if !region.has_proper_cut() {
        return domain("boundary operator needs a nonempty proper cut");
    }
    let whole = region.without_cut();
    let zero = DisorderSample::zeros(&whole);
    let full = assemble_hamiltonian(&whole, n_particles, params, &zero)?;
    let split = assemble_hamiltonian(region, n_particles, params, &zero)?;
    SectorOperator::new(full.basis().clone(), full.matrix() - split.matrix())
}

/// The diagonal projections (and the one weighted variant `Q̂_{≤k}`).
#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    /// Configurations avoiding `S`.
    PPlus(Vec<i64>),
    /// Configurations meeting `S`.
    PMinus(Vec<i64>),
    /// Site `i` occupied.
    NumberAt(i64),
    /// The single configuration `u`.
    RankOne(Configuration),
    /// `1 ≤ W ≤ k`.
    QLeq(usize),
    /// `Q_{≤k} + ((k+1)/k)·Q_0`.
    QHatLeq(usize),
    /// `W = m`.
    QExact(usize),
}

/// Diagonal of a projection over `basis`.
pub fn projection_weights(basis: &SectorBasis, kind: &Projection) -> Result<Vec<f64>> {
    let region = basis.region();
    let check_sites = |s: &[i64]| match s.iter().find(|&&i| !region.contains(i)) {
        Some(i) => domain(format!("site {i} is not in the region")),
        None => Ok(()),
    };
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let w = |x: &Configuration| cluster_count_unchecked(x, region);
    let configs = basis.configs();
    let out = match kind {
        Projection::PPlus(s) => {
            check_sites(s)?;
            configs.iter().map(|x| ind(!x.intersects(s))).collect()
        }
        Projection::PMinus(s) => {
            check_sites(s)?;
            configs.iter().map(|x| ind(x.intersects(s))).collect()
        }
        Projection::NumberAt(i) => {
            check_sites(&[*i])?;
            configs.iter().map(|x| ind(x.contains(*i))).collect()
        }
        Projection::RankOne(u) => {
            let r = basis.rank(u)?;
            (0..configs.len()).map(|i| ind(i == r)).collect()
        }
        Projection::QLeq(k) | Projection::QHatLeq(k) if *k < 1 => {
            return domain("cluster bound k must be at least 1")
        }
        Projection::QLeq(k) => configs.iter().map(|x| ind((1..=*k).contains(&w(x)))).collect(),
        Projection::QHatLeq(k) => {
            let zero_weight = (*k as f64 + 1.0) / *k as f64;
            configs
                .iter()
                .map(|x| match w(x) {
                    0 => zero_weight,
                    m if m <= *k => 1.0,
                    _ => 0.0,
                })
                .collect()
        }
        Projection::QExact(m) => configs.iter().map(|x| ind(w(x) == *m)).collect(),
    };
    Ok(out)
}

pub fn projection(region: &Region, n_particles: usize, kind: &Projection) -> Result<SectorOperator> {
    let basis = Arc::new(SectorBasis::new(region, n_particles)?);
    let w = projection_weights(&basis, kind)?;
    SectorOperator::diagonal(basis, &w)
}

/// The term added to `H` to lift its low spectrum: `coefficient · diag(weights)`.
#[derive(Debug, Clone)]
pub struct LiftTerm {
    pub coefficient: f64,
    pub weights: Vec<f64>,
}

impl LiftTerm {
    pub fn new(basis: &SectorBasis, q: HalfInt, params: &ModelParams) -> Result<LiftTerm> {
        let (coefficient, kind) = if q.twice() <= 1 {
            (params.gap(), Projection::QExact(0))
        } else {
            let k = q.ceil() as usize;
            (k as f64 * params.gap(), Projection::QHatLeq(k))
        };
        Ok(LiftTerm {
            coefficient,
            weights: projection_weights(basis, &kind)?,
        })
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.weights))
    }
}

/// `Ĥ_q`: `H + (1−1/Δ)Q_0` for `q ∈ {0, ½}`, else `H + ⌈q⌉(1−1/Δ)Q̂_{≤⌈q⌉}`.
pub fn lifted_hamiltonian(h: &SectorOperator, q: HalfInt, params: &ModelParams) -> Result<SectorOperator> {
    let lift = LiftTerm::new(h.basis(), q, params)?;
    let mut m = h.matrix().clone();
    for (i, w) in lift.weights.iter().enumerate() {
        m[(i, i)] += lift.coefficient * w;
    }
    SectorOperator::new(h.basis().clone(), m)
}
