//! Localization diagnostics: Green functions, fractional moments,
//! eigencorrelators, Combes-Thomas checks, the large-deviation event,
//! localization centers, and log-linear decay fits.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config_space::{
    cluster_count_unchecked, enumerate_bounded_clusters, enumerate_sector, Configuration,
    DistanceKind, ExtDist, Region, SectorBasis,
};
use crate::disorder::{DisorderSample, Distribution, MCEstimate, MonteCarlo};
use crate::error::{domain, Error, Result};
use crate::numerics::{eig_sym, operator_norm, operator_norm_complex, EigenDecomposition, ShiftedSolver, C64};
use crate::operators::{
    assemble_hamiltonian, lifted_hamiltonian, EnergyWindow, HalfInt, Interval, LiftTerm,
    ModelParams, SectorOperator,
};
use crate::report::{num, CsvTable};

/// `⟨φ_x, (H − z)^{-1} φ_y⟩`.
pub fn green(h: &SectorOperator, z: C64, x: &Configuration, y: &Configuration) -> Result<C64> {
    let (rx, ry) = (h.basis().rank(x)?, h.basis().rank(y)?);
    let col = ShiftedSolver::new(h.matrix(), z)?.column(ry)?;
    Ok(col[rx])
}

/// `|G_z(x, y)|^s`, which vanishes identically across particle-number sectors.
pub fn fractional_moment(h: &SectorOperator, z: C64, s: f64, x: &Configuration, y: &Configuration) -> Result<f64> {
    if x.len() != y.len() {
        return Ok(0.0);
    }
    Ok(green(h, z, x, y)?.norm().powf(s))
}

/// One `(distance, value)` observation for a decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitPoint {
    pub distance: ExtDist,
    pub value: f64,
    pub stderr: f64,
    /// Monte Carlo samples excluded while estimating `value`.
    pub excluded: usize,
}

impl FitPoint {
    pub fn new(distance: ExtDist, value: f64) -> FitPoint {
        FitPoint { distance, value, stderr: 0.0, excluded: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub distance: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Number of points averaged.
    pub n: usize,
    pub excluded: usize,
    /// Whether the bin entered the regression.
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub kind: DistanceKind,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub slope_se: f64,
    pub bins: Vec<Bin>,
    pub dropped_infinite: usize,
    pub dropped_nonpositive: usize,
    pub range: Option<(u64, u64)>,
}

/// Average points into integer distance bins. Infinite distances are
/// dropped and counted.
pub fn bin_points(points: &[FitPoint]) -> (Vec<Bin>, usize) {
    let mut groups: BTreeMap<u64, Vec<&FitPoint>> = BTreeMap::new();
    let mut infinite = 0;
    for p in points {
        match p.distance {
            ExtDist::Finite(d) => groups.entry(d).or_default().push(p),
            ExtDist::Infinite => infinite += 1,
        }
    }
    let bins = groups
        .into_iter()
        .map(|(d, ps)| {
            let n = ps.len();
            let mean = ps.iter().map(|p| p.value).sum::<f64>() / n as f64;
            let stderr = ps.iter().map(|p| p.stderr * p.stderr).sum::<f64>().sqrt() / n as f64;
            Bin {
                distance: d,
                mean,
                stderr,
                n,
                excluded: ps.iter().map(|p| p.excluded).sum(),
                used: false,
            }
        })
        .collect();
    (bins, infinite)
}

/// Least squares of `ln(bin mean)` against distance, over the bins inside
/// `range` (inclusive) with positive means.
pub fn decay_fit(points: &[FitPoint], kind: DistanceKind, range: Option<(u64, u64)>) -> Result<DecayFit> {
    let (mut bins, dropped_infinite) = bin_points(points);
    let in_range = |d: u64| range.is_none_or(|(lo, hi)| lo <= d && d <= hi);
    let mut dropped_nonpositive = 0;
    for b in bins.iter_mut().filter(|b| in_range(b.distance)) {
        if b.mean > 0.0 && b.mean.is_finite() {
            b.used = true;
        } else {
            dropped_nonpositive += 1;
        }
    }
    let xy: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.used)
        .map(|b| (b.distance as f64, b.mean.ln()))
        .collect();
    if xy.len() < 3 {
        return Err(Error::Refused(format!(
            "decay fit needs at least 3 usable distance bins, have {}",
            xy.len()
        )));
    }
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = xy.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xy.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    let slope_se = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(DecayFit {
        kind,
        slope,
        intercept,
        r_squared,
        slope_se,
        bins,
        dropped_infinite,
        dropped_nonpositive,
        range,
    })
}

/// CSV table of binned values, with or without a successful fit.
pub fn bins_table(header: serde_json::Value, kind: DistanceKind, bins: &[Bin]) -> CsvTable {
    let mut t = CsvTable::new(header, ["distance_kind", "distance", "mean", "stderr", "n", "excluded"]);
    for b in bins {
        t.push([
            kind.tag().to_string(),
            b.distance.to_string(),
            num(b.mean),
            num(b.stderr),
            b.n.to_string(),
            b.excluded.to_string(),
        ]);
    }
    t
}

impl DecayFit {
    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        bins_table(header, self.kind, &self.bins)
    }
}

/// Which `(x, y)` pairs a scan visits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PairFamily {
    /// Fixed `x`, every `y` in the sector.
    Anchored { x: Option<Configuration> },
    /// Fixed `x`, every translate `x + c` inside the region.
    Translated { x: Option<Configuration> },
    /// Uniformly random pairs from the sector.
    Random { count: usize, seed: u64 },
}

impl Default for PairFamily {
    fn default() -> Self {
        PairFamily::Anchored { x: None }
    }
}

/// The first `N` sites of the region.
pub fn default_anchor(region: &Region, n: usize) -> Result<Configuration> {
    if n > region.len() {
        return domain(format!("{n} particles do not fit in {} sites", region.len()));
    }
    Configuration::new(region.sites()[..n].to_vec())
}

impl PairFamily {
    /// Pairs as basis ranks.
    pub fn pairs(&self, basis: &SectorBasis) -> Result<Vec<(usize, usize)>> {
        let region = basis.region();
        let n = basis.n_particles();
        let anchor = |x: &Option<Configuration>| -> Result<usize> {
            let x = match x {
                Some(x) => x.clone(),
                None => default_anchor(region, n)?,
            };
            if x.len() != n {
                return domain(format!("anchor {x} is not in the {n}-particle sector"));
            }
            basis.rank(&x)
        };
        match self {
            PairFamily::Anchored { x } => {
                let rx = anchor(x)?;
                Ok((0..basis.size()).map(|ry| (rx, ry)).collect())
            }
            PairFamily::Translated { x } => {
                let rx = anchor(x)?;
                let x = basis.config(rx);
                let (lo, hi) = (region.sites()[0], region.sites()[region.len() - 1]);
                let span = x.sites().last().copied().unwrap_or(0) - x.sites().first().copied().unwrap_or(0);
                let mut out = Vec::new();
                let first = x.sites().first().copied().unwrap_or(0);
                for start in lo..=(hi - span) {
                    let y = x.translate(start - first);
                    if y.sites().iter().all(|&s| region.contains(s)) {
                        out.push((rx, basis.rank(&y)?));
                    }
                }
                Ok(out)
            }
            PairFamily::Random { count, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let d = basis.size();
                Ok((0..*count)
                    .map(|_| (rng.random_range(0..d), rng.random_range(0..d)))
                    .collect())
            }
        }
    }
}

/// Disorder ensemble and sector shared by the sample-averaged scans.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub region: Region,
    pub n_particles: usize,
    pub params: ModelParams,
    pub distribution: Distribution,
    pub n_samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl ScanConfig {
    pub fn new(region: Region, n_particles: usize, params: ModelParams) -> ScanConfig {
        ScanConfig {
            region,
            n_particles,
            params,
            distribution: Distribution::Uniform01,
            n_samples: 100,
            seed: 0,
            workers: 1,
        }
    }

    pub fn monte_carlo(&self) -> MonteCarlo {
        MonteCarlo::new(self.n_samples, self.seed, self.workers)
    }

    pub fn omega(&self, sample_seed: u64) -> Result<DisorderSample> {
        DisorderSample::sample(&self.region, self.distribution, sample_seed)
    }

    pub fn hamiltonian(&self, sample_seed: u64) -> Result<SectorOperator> {
        assemble_hamiltonian(&self.region, self.n_particles, &self.params, &self.omega(sample_seed)?)
    }

    pub fn basis(&self) -> Result<SectorBasis> {
        SectorBasis::new(&self.region, self.n_particles)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairEstimate {
    pub x: Configuration,
    pub y: Configuration,
    pub estimate: MCEstimate,
}

/// Per-pair sample means from a scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub region: Region,
    pub pairs: Vec<PairEstimate>,
}

impl ScanResult {
    pub fn points(&self, kind: DistanceKind) -> Result<Vec<FitPoint>> {
        self.pairs
            .iter()
            .map(|p| {
                Ok(FitPoint {
                    distance: kind.eval(&p.x, &p.y, &self.region)?,
                    value: p.estimate.mean,
                    stderr: p.estimate.stderr,
                    excluded: p.estimate.excluded,
                })
            })
            .collect()
    }

    pub fn fit(&self, kind: DistanceKind, range: Option<(u64, u64)>) -> Result<DecayFit> {
        decay_fit(&self.points(kind)?, kind, range)
    }

    pub fn bins(&self, kind: DistanceKind) -> Result<Vec<Bin>> {
        Ok(bin_points(&self.points(kind)?).0)
    }
}

fn collect_scan(cfg: &ScanConfig, basis: &SectorBasis, pairs: &[(usize, usize)], est: Vec<MCEstimate>) -> ScanResult {
    ScanResult {
        region: cfg.region.clone(),
        pairs: pairs
            .iter()
            .zip(est)
            .map(|(&(rx, ry), estimate)| PairEstimate {
                x: basis.config(rx).clone(),
                y: basis.config(ry).clone(),
                estimate,
            })
            .collect(),
    }
}

/// Distinct first components, so each needs a single resolvent column.
fn columns_needed(pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut xs: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    xs.sort_unstable();
    xs.dedup();
    xs
}

/// `E|G_z(x, y)|^s` for every pair of the family.
pub fn fractional_moment_scan(
    cfg: &ScanConfig,
    q: HalfInt,
    s: f64,
    z: C64,
    family: &PairFamily,
) -> Result<ScanResult> {
    if !(s > 0.0 && s <= 1.0 / 3.0) {
        return domain(format!("fractional moment exponent must lie in (0, 1/3], got {s}"));
    }
    let window = EnergyWindow::new(q, cfg.params.delta)?;
    if !window.admits(z) {
        return domain(format!("Re z = {} is not below {}", z.re, window.upper()));
    }
    let basis = cfg.basis()?;
    let pairs = family.pairs(&basis)?;
    let xs = columns_needed(&pairs);
    let est = cfg.monte_carlo().estimate_vec(pairs.len(), |_, seed| {
        let h = cfg.hamiltonian(seed)?;
        let solver = match ShiftedSolver::new(h.matrix(), z) {
            Ok(s) => s,
            Err(Error::NearSingular { .. }) => return Ok(vec![f64::NAN; pairs.len()]),
            Err(e) => return Err(e),
        };
        // G is symmetric, so column x gives G(x, ·) = G(·, x).
        let mut cols = BTreeMap::new();
        for &x in &xs {
            match solver.column(x) {
                Ok(c) => cols.insert(x, c),
                Err(Error::NearSingular { .. }) => return Ok(vec![f64::NAN; pairs.len()]),
                Err(e) => return Err(e),
            };
        }
        Ok(pairs.iter().map(|&(x, y)| cols[&x][y].norm().powf(s)).collect())
    })?;
    Ok(collect_scan(cfg, &basis, &pairs, est))
}

#[derive(Debug, Clone, Serialize)]
pub struct EigencorrelatorResult {
    pub value: f64,
    pub interval: Interval,
    /// Spectral clusters with energy in the interval.
    pub clusters: usize,
}

fn clusters_in(decomp: &EigenDecomposition, interval: &Interval) -> Vec<std::ops::Range<usize>> {
    decomp
        .cluster_values()
        .into_iter()
        .filter(|(e, _)| interval.contains(*e))
        .map(|(_, r)| r)
        .collect()
}

/// `Σ_{ν ∈ I} |π_ν(x, y)|` from a decomposition and basis ranks.
pub fn eigencorrelator_ranks(decomp: &EigenDecomposition, interval: &Interval, x: usize, y: usize) -> EigencorrelatorResult {
    let clusters = clusters_in(decomp, interval);
    let value = clusters
        .iter()
        .map(|r| decomp.projection_entry(r.clone(), x, y).abs())
        .fold(0.0, |acc, v| acc + v);
    EigencorrelatorResult { value, interval: *interval, clusters: clusters.len() }
}

/// `𝒬_I(x, y)` for `H`; zero when `|x| ≠ |y|`.
pub fn eigencorrelator(h: &SectorOperator, interval: &Interval, x: &Configuration, y: &Configuration) -> Result<EigencorrelatorResult> {
    if x.len() != y.len() {
        return Ok(EigencorrelatorResult { value: 0.0, interval: *interval, clusters: 0 });
    }
    let (rx, ry) = (h.basis().rank(x)?, h.basis().rank(y)?);
    Ok(eigencorrelator_ranks(&eig_sym(h.matrix())?, interval, rx, ry))
}

/// `E 𝒬_{I_{≤q}}(x, y)` for every pair of the family.
pub fn eigencorrelator_scan(cfg: &ScanConfig, q: HalfInt, family: &PairFamily) -> Result<ScanResult> {
    let interval = EnergyWindow::new(q, cfg.params.delta)?.at_most();
    let basis = cfg.basis()?;
    let pairs = family.pairs(&basis)?;
    let est = cfg.monte_carlo().estimate_vec(pairs.len(), |_, seed| {
        let decomp = eig_sym(cfg.hamiltonian(seed)?.matrix())?;
        let clusters = clusters_in(&decomp, &interval);
        Ok(pairs
            .iter()
            .map(|&(x, y)| {
                clusters
                    .iter()
                    .map(|r| decomp.projection_entry(r.clone(), x, y).abs())
                    .fold(0.0, |acc, v| acc + v)
            })
            .collect())
    })?;
    Ok(collect_scan(cfg, &basis, &pairs, est))
}

/// Imaginary parts used to approximate suprema over half-planes.
pub const ETA_GRID: [f64; 3] = [1e-2, 1e-4, 1e-6];

/// `G_z(x, y)` for all `y` from an eigendecomposition.
fn spectral_green_row(decomp: &EigenDecomposition, z: C64, x: usize) -> Vec<C64> {
    let n = decomp.dim();
    let w: Vec<C64> = (0..n)
        .map(|k| decomp.vectors[(x, k)] / (decomp.values[k] - z))
        .collect();
    (0..n)
        .map(|y| (0..n).fold(C64::new(0.0, 0.0), |acc, k| acc + w[k] * decomp.vectors[(y, k)]))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AprioriRow {
    pub z: (f64, f64),
    pub estimate: MCEstimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct AprioriReport {
    pub s: f64,
    pub rows: Vec<AprioriRow>,
    /// Largest max/min ratio over the η grid at fixed `Re z`.
    pub eta_ratio: f64,
    /// max/min over the whole grid.
    pub grid_ratio: f64,
    pub all_finite: bool,
}

/// `E|G_z(x, y)|^{s'}` across a grid of `z`, to exhibit its uniform boundedness.
pub fn apriori_moment_check(
    cfg: &ScanConfig,
    s: f64,
    x: &Configuration,
    y: &Configuration,
    re_grid: &[f64],
    eta_grid: &[f64],
) -> Result<AprioriReport> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("moment exponent must lie in (0, 1), got {s}"));
    }
    if eta_grid.iter().any(|&e| !(e > 0.0)) || re_grid.is_empty() || eta_grid.is_empty() {
        return domain("need nonempty grids with positive imaginary parts");
    }
    let basis = cfg.basis()?;
    let (rx, ry) = (basis.rank(x)?, basis.rank(y)?);
    let grid: Vec<C64> = re_grid
        .iter()
        .flat_map(|&re| eta_grid.iter().map(move |&eta| C64::new(re, eta)))
        .collect();
    let est = cfg.monte_carlo().estimate_vec(grid.len(), |_, seed| {
        let decomp = eig_sym(cfg.hamiltonian(seed)?.matrix())?;
        Ok(grid
            .iter()
            .map(|&z| spectral_green_row(&decomp, z, rx)[ry].norm().powf(s))
            .collect())
    })?;
    let means: Vec<f64> = est.iter().map(|e| e.mean).collect();
    let ratio = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        hi / lo
    };
    let eta_ratio = means
        .chunks(eta_grid.len())
        .map(ratio)
        .fold(0.0f64, f64::max);
    Ok(AprioriReport {
        s,
        all_finite: means.iter().all(|m| m.is_finite()),
        grid_ratio: ratio(&means),
        eta_ratio,
        rows: grid
            .iter()
            .zip(est)
            .map(|(z, estimate)| AprioriRow { z: (z.re, z.im), estimate })
            .collect(),
    })
}

/// Fractions of the window's upper endpoint used as real parts.
pub const CT_RE_FRACTIONS: [f64; 5] = [-1.0, 0.0, 0.5, 0.9, 0.99];

/// The `z` grid approximating `ℍ_q`.
pub fn half_plane_grid(window: &EnergyWindow) -> Vec<C64> {
    let u = window.upper();
    CT_RE_FRACTIONS
        .iter()
        .flat_map(|f| ETA_GRID.iter().map(move |&eta| C64::new(f * u, eta)))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CtSample {
    pub index: u64,
    pub seed: u64,
    pub slope: f64,
    pub r_squared: f64,
    /// Largest `|G|` between configurations that split differently across the cut.
    pub cross_cut_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CtReport {
    pub window: HalfInt,
    pub lifted: bool,
    pub samples: Vec<CtSample>,
    pub all_decaying: bool,
    pub cross_cut_max: f64,
}

fn cut_profile(x: &Configuration, cut: Option<&[i64]>) -> usize {
    cut.map_or(0, |k| x.sites().iter().filter(|s| k.binary_search(s).is_ok()).count())
}

fn ct_run(cfg: &ScanConfig, window: HalfInt, lifted: bool, anchor: Option<Configuration>) -> Result<CtReport> {
    let win = EnergyWindow::new(window, cfg.params.delta)?;
    let grid = half_plane_grid(&win);
    let basis = cfg.basis()?;
    let x = match anchor {
        Some(x) => x,
        None => default_anchor(&cfg.region, cfg.n_particles)?,
    };
    let rx = basis.rank(&x)?;
    let cut = cfg.region.cut().map(|k| {
        let mut v = k.to_vec();
        v.sort_unstable();
        v
    });
    let profile_x = cut_profile(&x, cut.as_deref());
    let distances: Vec<ExtDist> = basis
        .configs()
        .iter()
        .map(|y| DistanceKind::D1.eval(&x, y, &cfg.region))
        .collect::<Result<_>>()?;
    let samples = cfg.monte_carlo().map(|index, seed| {
        let h = cfg.hamiltonian(seed)?;
        let h = if lifted { lifted_hamiltonian(&h, window, &cfg.params)? } else { h };
        let decomp = eig_sym(h.matrix())?;
        let mut sup = vec![0.0f64; basis.size()];
        for &z in &grid {
            for (s, g) in sup.iter_mut().zip(spectral_green_row(&decomp, z, rx)) {
                *s = s.max(g.norm());
            }
        }
        let points: Vec<FitPoint> = distances
            .iter()
            .zip(&sup)
            .map(|(&d, &v)| FitPoint::new(d, v))
            .collect();
        let fit = decay_fit(&points, DistanceKind::D1, None)?;
        // Block structure: an LU solve keeps exact zeros across the cut.
        let mut cross_cut_max = 0.0f64;
        if cut.is_some() {
            let col = ShiftedSolver::new(h.matrix(), grid[0])?.column(rx)?;
            for (ry, y) in basis.configs().iter().enumerate() {
                if cut_profile(y, cut.as_deref()) != profile_x {
                    cross_cut_max = cross_cut_max.max(col[ry].norm());
                }
            }
        }
        Ok(CtSample { index, seed, slope: fit.slope, r_squared: fit.r_squared, cross_cut_max })
    })?;
    Ok(CtReport {
        window,
        lifted,
        all_decaying: samples.iter().all(|s| s.slope < 0.0),
        cross_cut_max: samples.iter().fold(0.0, |m, s| m.max(s.cross_cut_max)),
        samples,
    })
}

/// Per-sample decay of `sup_z |G_z(x, ·)|` in `d̃_1` over a grid in `ℍ_m`.
pub fn combes_thomas_check(cfg: &ScanConfig, m: HalfInt, anchor: Option<Configuration>) -> Result<CtReport> {
    if m.twice() > 1 {
        return domain(format!("plain Combes-Thomas check needs m <= 1/2, got {m}"));
    }
    ct_run(cfg, m, false, anchor)
}

/// The same check for the lifted Hamiltonian `Ĥ_q` over `ℍ_q`.
pub fn lifted_ct_check(cfg: &ScanConfig, q: HalfInt, anchor: Option<Configuration>) -> Result<CtReport> {
    ct_run(cfg, q, true, anchor)
}

impl CtReport {
    pub fn table(&self, header: serde_json::Value) -> CsvTable {
        let mut t = CsvTable::new(header, ["index", "seed", "slope", "r_squared", "cross_cut_max"]);
        for s in &self.samples {
            t.push([s.index.to_string(), s.seed.to_string(), num(s.slope), num(s.r_squared), num(s.cross_cut_max)]);
        }
        t
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LdProbe {
    pub n_particles: usize,
    pub threshold: f64,
    /// Sites of `S = [x]_N`.
    pub set: Vec<i64>,
    /// `|𝒫_{N,⌈q⌉}(S)|`.
    pub configurations: usize,
    pub frequency: MCEstimate,
    /// Whether `Nλ E ω > 2⌈q⌉(1 − 1/Δ)`.
    pub bound_applies: bool,
}

/// Frequency of `{λV_ω(u) < ⌈q⌉(1 − 1/Δ) for some u ∈ 𝒫_{N,⌈q⌉}(S)}`.
pub fn large_deviation_probe(cfg: &ScanConfig, q: HalfInt, anchor: Option<Configuration>) -> Result<LdProbe> {
    let k = q.ceil() as usize;
    if k == 0 {
        return domain("the large-deviation event needs q >= 1/2");
    }
    let n = cfg.n_particles;
    let x = match anchor {
        Some(x) => x,
        None => default_anchor(&cfg.region, n)?,
    };
    let set = cfg.region.neighborhood(x.sites(), n as u64)?;
    let s_region = Region::new(set.clone())?;
    let configs = enumerate_bounded_clusters(&s_region, n, k)?;
    let threshold = k as f64 * cfg.params.gap();
    let lambda = cfg.params.lambda;
    let frequency = cfg.monte_carlo().estimate(|_, seed| {
        let omega = DisorderSample::sample_sites(&set, cfg.distribution, seed)?;
        let hit = configs.iter().any(|u| {
            let v: f64 = u.sites().iter().map(|&s| omega.get(s).unwrap_or(0.0)).sum();
            lambda * v < threshold
        });
        Ok(if hit { 1.0 } else { 0.0 })
    })?;
    let bound_applies = cfg
        .distribution
        .mean()
        .is_some_and(|mu| n as f64 * lambda * mu > 2.0 * threshold);
    Ok(LdProbe {
        n_particles: n,
        threshold,
        set,
        configurations: configs.len(),
        frequency,
        bound_applies,
    })
}

fn check_normalized(psi: &DVector<f64>) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return domain(format!("state must be normalized, has norm {norm}"));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizationCenter {
    pub center: Configuration,
    pub rank: usize,
    /// `|ψ(x*)|²`.
    pub weight: f64,
    /// `w(x*) / Σ_u w(u)` with `w(u) = (|u|₂ + 1)^{−(N+1)}`.
    pub threshold: f64,
    pub inequality_holds: bool,
}

/// The configuration maximizing `|ψ(x)|² (|x|₂ + 1)^{N+1}`.
pub fn localization_center(psi: &DVector<f64>, basis: &SectorBasis) -> Result<LocalizationCenter> {
    check_normalized(psi)?;
    if psi.len() != basis.size() {
        return domain("state dimension does not match the basis");
    }
    let n = basis.n_particles() as i32;
    let w: Vec<f64> = basis
        .configs()
        .iter()
        .map(|u| (u.norm2() + 1.0).powi(-(n + 1)))
        .collect();
    let total: f64 = w.iter().sum();
    let mut best = (0usize, f64::NEG_INFINITY);
    for (i, (&a, &wi)) in psi.iter().zip(&w).enumerate() {
        let score = a * a / wi;
        if score > best.1 {
            best = (i, score);
        }
    }
    let rank = best.0;
    let weight = psi[rank] * psi[rank];
    let threshold = w[rank] / total;
    Ok(LocalizationCenter {
        center: basis.config(rank).clone(),
        rank,
        weight,
        threshold,
        inequality_holds: weight >= threshold * (1.0 - 1e-12),
    })
}

/// `Σ |ψ(y)|²` over `y` with `d̃_H(y, center) ≤ radius`.
pub fn mass_near(psi: &DVector<f64>, basis: &SectorBasis, center: &Configuration, radius: u64) -> Result<f64> {
    let mut mass = 0.0;
    for (i, y) in basis.configs().iter().enumerate() {
        if DistanceKind::ModHausdorff.eval(y, center, basis.region())? <= ExtDist::Finite(radius) {
            mass += psi[i] * psi[i];
        }
    }
    Ok(mass)
}

/// `Σ_x |ψ(x)|⁴`.
pub fn ipr(psi: &DVector<f64>) -> Result<f64> {
    check_normalized(psi)?;
    Ok(psi.iter().map(|a| a.powi(4)).sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterRow {
    pub energy: f64,
    pub center: Configuration,
    pub inequality_holds: bool,
    pub mass_near: f64,
    pub ipr: f64,
}

/// Centers, nearby mass and IPR for every eigenvector with energy in `interval`.
pub fn eigenvector_centers(h: &SectorOperator, interval: &Interval, radius: u64) -> Result<Vec<CenterRow>> {
    let decomp = eig_sym(h.matrix())?;
    let basis = h.basis();
    let mut rows = Vec::new();
    for k in 0..decomp.dim() {
        let e = decomp.values[k];
        if !interval.contains(e) {
            continue;
        }
        let psi: DVector<f64> = decomp.vectors.column(k).into();
        let c = localization_center(&psi, basis)?;
        rows.push(CenterRow {
            energy: e,
            mass_near: mass_near(&psi, basis, &c.center, radius)?,
            ipr: ipr(&psi)?,
            inequality_holds: c.inequality_holds,
            center: c.center,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceCount {
    pub k: usize,
    /// Eigenvalues of `H^Λ` (all sectors) in `I_{≤k}`.
    pub count: usize,
    /// `k|Λ|^{2k} + 1`.
    pub bound: f64,
    pub within: bool,
}

/// Count of eigenvalues below `(k + ¼)(1 − 1/Δ)` over every sector,
/// compared with `k|Λ|^{2k} + 1`. Reported as a flag, not a claim.
pub fn trace_count(region: &Region, params: &ModelParams, omega: &DisorderSample, k: usize) -> Result<TraceCount> {
    if k < 1 {
        return domain("k must be at least 1");
    }
    let upper = EnergyWindow::new(HalfInt::integer(k as u32), params.delta)?.upper();
    let mut count = 0;
    for n in 0..=region.len() {
        let h = assemble_hamiltonian(region, n, params, omega)?;
        count += eig_sym(h.matrix())?.values.iter().filter(|&&e| e < upper).count();
    }
    let bound = k as f64 * (region.len() as f64).powi(2 * k as i32) + 1.0;
    Ok(TraceCount { k, count, bound, within: count as f64 <= bound })
}

/// `‖R_z − R̂_z − c R_z Q̂ R̂_z‖` for the lift attached to `q`.
pub fn resolvent_identity_residual(h: &SectorOperator, q: HalfInt, params: &ModelParams, z: C64) -> Result<f64> {
    let lift = LiftTerm::new(h.basis(), q, params)?;
    let hat = lifted_hamiltonian(h, q, params)?;
    let r = ShiftedSolver::new(h.matrix(), z)?.inverse()?;
    let rh = ShiftedSolver::new(hat.matrix(), z)?.inverse()?;
    let qhat = lift.matrix().map(|v| C64::new(v * lift.coefficient, 0.0));
    let diff = &r - &rh - &r * qhat * &rh;
    Ok(operator_norm_complex(&diff))
}

#[derive(Debug, Clone, Serialize)]
pub struct EigestResidual {
    /// Clusters of `σ(H)` inside `I_q`.
    pub clusters: usize,
    /// `max_ν ‖π_ν − c R̂_ν Q̂ π_ν‖`.
    pub first: f64,
    /// `max_ν ‖π_ν − c² R̂_ν Q̂ π_ν Q̂ R̂_ν‖`.
    pub second: f64,
    /// The second identity with the right factor written `R̂_ν Q̂` literally.
    pub second_literal: f64,
}

/// Residuals of `π_ν = c R̂_{q,ν} Q̂ π_ν` over eigenvalues `ν ∈ I_q`.
pub fn eigest_residual(h: &SectorOperator, q: HalfInt, params: &ModelParams) -> Result<EigestResidual> {
    let lift = LiftTerm::new(h.basis(), q, params)?;
    let hat = lifted_hamiltonian(h, q, params)?;
    let band = EnergyWindow::new(q, params.delta)?.band();
    let decomp = eig_sym(h.matrix())?;
    let c = lift.coefficient;
    let qhat = lift.matrix();
    let n = decomp.dim();
    let mut out = EigestResidual { clusters: 0, first: 0.0, second: 0.0, second_literal: 0.0 };
    for (nu, range) in decomp.cluster_values() {
        if !band.contains(nu) {
            continue;
        }
        out.clusters += 1;
        let v = decomp.vectors.columns(range.start, range.len());
        let pi = &v * v.transpose();
        let mut shifted = hat.matrix().clone();
        for i in 0..n {
            shifted[(i, i)] -= nu;
        }
        let rhat = shifted
            .lu()
            .try_inverse()
            .ok_or(Error::NearSingular { condition: f64::INFINITY })?;
        let rq = &rhat * &qhat;
        let qr = &qhat * &rhat;
        let first = operator_norm(&(&pi - c * &rq * &pi));
        let second = operator_norm(&(&pi - c * c * &rq * &pi * &qr));
        let literal = operator_norm(&(&pi - c * c * &rq * &pi * &rq));
        out.first = out.first.max(first);
        out.second = out.second.max(second);
        out.second_literal = out.second_literal.max(literal);
    }
    Ok(out)
}

/// Eigenvalue spectrum of every requested sector, as CSV rows `(N, index, energy, clusters)`.
pub fn spectrum_table(region: &Region, params: &ModelParams, omega: &DisorderSample, sectors: &[usize], header: serde_json::Value) -> Result<CsvTable> {
    let mut t = CsvTable::new(header, ["n", "index", "energy", "min_clusters"]);
    for &n in sectors {
        let h = assemble_hamiltonian(region, n, params, omega)?;
        let d = eig_sym(h.matrix())?;
        for k in 0..d.dim() {
            // Smallest cluster count with appreciable weight in the eigenvector.
            let w = (0..d.dim())
                .filter(|&i| d.vectors[(i, k)].abs() > 1e-6)
                .map(|i| cluster_count_unchecked(h.basis().config(i), region))
                .min()
                .unwrap_or(0);
            t.push([n.to_string(), k.to_string(), num(d.values[k]), w.to_string()]);
        }
    }
    Ok(t)
}

/// JSON header fields common to scan artifacts.
pub fn scan_header(cfg: &ScanConfig) -> serde_json::Value {
    json!({
        "region": cfg.region,
        "n_particles": cfg.n_particles,
        "delta": cfg.params.delta,
        "lambda": cfg.params.lambda,
        "distribution": cfg.distribution,
        "seed": cfg.seed,
        "n_samples": cfg.n_samples,
    })
}

/// Every configuration pair in a sector with its three distances; used by
/// tests and examples to sanity-check pair families.
pub fn sector_pairs(region: &Region, n: usize) -> Result<Vec<(Configuration, Configuration)>> {
    let all = enumerate_sector(region, n)?;
    Ok(all
        .iter()
        .flat_map(|x| all.iter().map(move |y| (x.clone(), y.clone())))
        .collect())
}

/// Dense `f(H)` entries aren't needed by the scans; this exposes the full
/// Green matrix for small checks.
pub fn green_matrix(h: &SectorOperator, z: C64) -> Result<DMatrix<C64>> {
    ShiftedSolver::new(h.matrix(), z)?.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[i64]) -> Configuration {
        Configuration::new(v.to_vec()).unwrap()
    }

    fn small_h(lambda: f64, seed: u64) -> SectorOperator {
        let r = Region::interval(0, 7).unwrap();
        let p = ModelParams::new(3.0, lambda).unwrap();
        let om = DisorderSample::sample(&r, Distribution::Uniform01, seed).unwrap();
        assemble_hamiltonian(&r, 2, &p, &om).unwrap()
    }

    #[test]
    fn vacuum_green() {
        let r = Region::interval(0, 3).unwrap();
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let h = assemble_hamiltonian(&r, 0, &p, &DisorderSample::zeros(&r)).unwrap();
        let g = green(&h, C64::new(0.0, 1.0), &Configuration::vacuum(), &Configuration::vacuum()).unwrap();
        assert!((g - C64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn green_symmetry_and_residual() {
        let h = small_h(1.0, 3);
        let z = C64::new(0.4, 0.05);
        let (x, y) = (cfg(&[0, 1]), cfg(&[3, 6]));
        let a = green(&h, z, &x, &y).unwrap();
        let b = green(&h, z, &y, &x).unwrap();
        assert!((a - b).norm() < 1e-10);
        let ry = h.basis().rank(&y).unwrap();
        let col = solve_col(&h, z, ry);
        let mut e = DVector::<C64>::zeros(h.dim());
        e[ry] = C64::new(1.0, 0.0);
        let shifted = h.matrix().map(|v| C64::new(v, 0.0)) - DMatrix::<C64>::identity(h.dim(), h.dim()) * z;
        assert!((shifted * col - e).norm() < 1e-10);
        assert_eq!(fractional_moment(&h, z, 0.3, &cfg(&[1]), &x).unwrap(), 0.0);
    }

    fn solve_col(h: &SectorOperator, z: C64, y: usize) -> DVector<C64> {
        ShiftedSolver::new(h.matrix(), z).unwrap().column(y).unwrap()
    }

    #[test]
    fn fit_exact_exponential() {
        let pts: Vec<FitPoint> = (0..8)
            .map(|d| FitPoint::new(ExtDist::Finite(d), (-0.7 * d as f64).exp()))
            .chain([FitPoint::new(ExtDist::Infinite, 1.0)])
            .collect();
        let f = decay_fit(&pts, DistanceKind::Hausdorff, None).unwrap();
        assert!((f.slope + 0.7).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.dropped_infinite, 1);
        let flat: Vec<FitPoint> = (0..5).map(|d| FitPoint::new(ExtDist::Finite(d), 2.0)).collect();
        assert_eq!(decay_fit(&flat, DistanceKind::D1, None).unwrap().slope, 0.0);
    }

    #[test]
    fn fit_refusals_and_range() {
        let pts: Vec<FitPoint> = (0..6)
            .map(|d| FitPoint::new(ExtDist::Finite(d), if d < 2 { 1.0 } else { 0.0 }))
            .collect();
        let err = decay_fit(&pts, DistanceKind::D1, None).unwrap_err();
        assert!(matches!(err, Error::Refused(_)));
        let pts: Vec<FitPoint> = (0..10)
            .map(|d| FitPoint::new(ExtDist::Finite(d), if d < 2 { 5.0 } else { (-(d as f64)).exp() }))
            .collect();
        let f = decay_fit(&pts, DistanceKind::D1, Some((2, 9))).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-12);
        assert_eq!(f.bins.iter().filter(|b| b.used).count(), 8);
    }

    #[test]
    fn pair_families() {
        let r = Region::interval(0, 5).unwrap();
        let b = SectorBasis::new(&r, 2).unwrap();
        assert_eq!(PairFamily::default().pairs(&b).unwrap().len(), 15);
        let t = PairFamily::Translated { x: Some(cfg(&[0, 2])) }.pairs(&b).unwrap();
        assert_eq!(t.len(), 4);
        let rnd = PairFamily::Random { count: 7, seed: 1 };
        assert_eq!(rnd.pairs(&b).unwrap(), rnd.pairs(&b).unwrap());
        let bad = PairFamily::Anchored { x: Some(cfg(&[0])) };
        assert!(bad.pairs(&b).is_err());
    }

    #[test]
    fn eigencorrelator_bounds() {
        let h = small_h(2.0, 9);
        let x = cfg(&[2, 3]);
        let full = eigencorrelator(&h, &Interval::everything(), &x, &x).unwrap();
        assert!((full.value - 1.0).abs() < 1e-10);
        for y in h.basis().configs() {
            for iv in [Interval::everything(), Interval::below(1.5), Interval::half_open(1.0, 2.0)] {
                assert!(eigencorrelator(&h, &iv, &x, y).unwrap().value <= 1.0 + 1e-10);
            }
        }
        let gap = Interval::below(2.0 / 3.0 - 1e-9);
        assert_eq!(eigencorrelator(&h, &gap, &x, &cfg(&[5, 6])).unwrap().value, 0.0);
        assert_eq!(eigencorrelator(&h, &Interval::everything(), &x, &cfg(&[1])).unwrap().value, 0.0);
    }

    #[test]
    fn centers_and_ipr() {
        let r = Region::interval(0, 4).unwrap();
        let b = SectorBasis::new(&r, 2).unwrap();
        let mut psi = DVector::zeros(b.size());
        let x = cfg(&[1, 3]);
        psi[b.rank(&x).unwrap()] = 1.0;
        let c = localization_center(&psi, &b).unwrap();
        assert_eq!(c.center, x);
        assert!(c.inequality_holds);
        assert_eq!(ipr(&psi).unwrap(), 1.0);
        let d = b.size() as f64;
        let uniform = DVector::from_element(b.size(), 1.0 / d.sqrt());
        assert!((ipr(&uniform).unwrap() - 1.0 / d).abs() < 1e-15);
        assert!(localization_center(&uniform, &b).unwrap().inequality_holds);
        assert!(ipr(&(uniform * 2.0)).is_err());
    }

    #[test]
    fn identities_hold() {
        let r = Region::interval(0, 6).unwrap();
        let p = ModelParams::new(2.0, 0.3).unwrap();
        let om = DisorderSample::sample(&r, Distribution::Uniform01, 5).unwrap();
        for n in 1..=3 {
            let h = assemble_hamiltonian(&r, n, &p, &om).unwrap();
            for q in [HalfInt::ZERO, HalfInt::HALF, HalfInt::integer(1), HalfInt::from_twice(3)] {
                let res = resolvent_identity_residual(&h, q, &p, C64::new(0.2, 0.3)).unwrap();
                assert!(res < 1e-9, "{res}");
            }
            let e = eigest_residual(&h, HalfInt::integer(1), &p).unwrap();
            assert!(e.first < 1e-9 && e.second < 1e-9, "{e:?}");
        }
    }

    #[test]
    fn fm_scan_is_deterministic_across_workers() {
        let r = Region::interval(0, 7).unwrap();
        let p = ModelParams::new(4.0, 4.0).unwrap();
        let mut c = ScanConfig::new(r, 2, p);
        c.n_samples = 6;
        c.seed = 11;
        let z = C64::new(0.3, 1e-4);
        let a = fractional_moment_scan(&c, HalfInt::integer(1), 0.3, z, &PairFamily::default()).unwrap();
        c.workers = 3;
        let b = fractional_moment_scan(&c, HalfInt::integer(1), 0.3, z, &PairFamily::default()).unwrap();
        let ma: Vec<f64> = a.pairs.iter().map(|p| p.estimate.mean).collect();
        let mb: Vec<f64> = b.pairs.iter().map(|p| p.estimate.mean).collect();
        assert_eq!(ma, mb);
        assert!(fractional_moment_scan(&c, HalfInt::integer(1), 0.5, z, &PairFamily::default()).is_err());
        assert!(fractional_moment_scan(&c, HalfInt::ZERO, 0.3, C64::new(1.0, 0.1), &PairFamily::default()).is_err());
    }

    #[test]
    fn ct_with_cut_vanishes_across() {
        let r = Region::interval(0, 9).unwrap().with_cut_intervals(&[[0, 4]]).unwrap();
        let p = ModelParams::new(2.0, 1.0).unwrap();
        let mut c = ScanConfig::new(r, 2, p);
        c.n_samples = 3;
        let rep = combes_thomas_check(&c, HalfInt::HALF, Some(cfg(&[3, 4]))).unwrap();
        assert_eq!(rep.cross_cut_max, 0.0);
        assert!(rep.all_decaying);
        assert!(combes_thomas_check(&c, HalfInt::integer(1), None).is_err());
    }

    #[test]
    fn ld_probe_extremes() {
        let r = Region::interval(0, 11).unwrap();
        let mut c = ScanConfig::new(r, 2, ModelParams::new(2.0, 100.0).unwrap());
        c.n_samples = 200;
        let hi = large_deviation_probe(&c, HalfInt::integer(1), None).unwrap();
        assert_eq!(hi.frequency.mean, 0.0);
        c.params = ModelParams::new(2.0, 0.01).unwrap();
        let lo = large_deviation_probe(&c, HalfInt::integer(1), None).unwrap();
        assert_eq!(lo.frequency.mean, 1.0);
    }
}
