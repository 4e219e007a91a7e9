//! Experiment runner behind the `xxz-bench` binary.
//!
//! A run is described by a [`RunSpec`], read from a TOML or JSON file and/or
//! command-line flags (flags win). Every run writes one CSV artifact whose
//! first line is `# {json}` holding the fully resolved spec, the tool
//! version and a summary of the result.
//!
//! Exit codes: 0 success, 2 invalid spec, 3 numerical refusal, 4 a checked
//! bound failed.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config_space::{Configuration, DistanceKind, Region};
use crate::disorder::{default_workers, sample_seed, DisorderSample, Distribution};
use crate::dynamics::{
    counterexample_app_a, filter_locality_check, fourier_bound_check, lieb_robinson_check, Witness,
};
use crate::error::{domain, Error, Result};
use crate::estimators::{
    bins_table, combes_thomas_check, default_anchor, eigencorrelator_scan, eigenvector_centers,
    fractional_moment_scan, green_matrix, large_deviation_probe, lifted_ct_check, spectrum_table,
    PairFamily, ScanConfig, ScanResult,
};
use crate::numerics::C64;
use crate::operators::{assemble_hamiltonian, EnergyWindow, HalfInt, ModelParams};
use crate::oracles::{c_alpha, exp_sum_d1, exp_sum_d1_dual, exp_sum_dh, tensor_hamiltonian};
use crate::report::{num, CsvTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Assemble,
    Spectrum,
    Green,
    FmScan,
    QcScan,
    CtCheck,
    LiftedCt,
    LdProbe,
    Centers,
    FilterLocality,
    LrCheck,
    FourierCheck,
    Counterexample,
    OracleSums,
    OracleEquivalence,
}

fn default_region() -> String {
    "0:9".into()
}
fn default_delta() -> f64 {
    2.0
}
fn default_lambda() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    1e-6
}
fn default_samples() -> usize {
    100
}
fn default_out() -> PathBuf {
    PathBuf::from("out.csv")
}
fn default_distance() -> DistanceKind {
    DistanceKind::ModHausdorff
}
fn default_eps() -> f64 {
    0.01
}
fn default_l() -> usize {
    4
}
fn default_ell_max() -> u64 {
    6
}

/// A fully specified run. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub experiment: Experiment,
    /// Site intervals, `"a:b,c:d"`.
    #[serde(default = "default_region")]
    pub region: String,
    /// Intervals of the cut `K`.
    #[serde(default)]
    pub cut: Option<String>,
    /// Sector; all sectors where the experiment allows it when absent.
    #[serde(default)]
    pub n_particles: Option<usize>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,

    // Experiment-specific knobs; file-only.
    #[serde(default)]
    pub distribution: Distribution,
    #[serde(default)]
    pub family: PairFamily,
    #[serde(default = "default_distance")]
    pub distance: DistanceKind,
    #[serde(default)]
    pub fit_range: Option<[u64; 2]>,
    /// Real part of `z`; defaults to the middle of the window.
    #[serde(default)]
    pub re_z: Option<f64>,
    /// Anchor configuration `x` (or the set `S`, `A`).
    #[serde(default)]
    pub sites: Option<Vec<i64>>,
    #[serde(default)]
    pub energy: Option<f64>,
    #[serde(default)]
    pub a_values: Option<Vec<f64>>,
    #[serde(default)]
    pub t_values: Option<Vec<f64>>,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_ell_max")]
    pub ell_max: u64,
    #[serde(default = "default_l")]
    pub l: usize,
}

impl Default for Distribution {
    fn default() -> Self {
        Distribution::Uniform01
    }
}

/// Command-line flags; each overrides the corresponding spec key.
#[derive(Debug, Parser)]
#[command(name = "xxz-bench", version, about = "Random XXZ chain localization workbench")]
pub struct Flags {
    /// TOML or JSON run specification.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long)]
    pub cut: Option<String>,
    #[arg(long)]
    pub n_particles: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_spec_text(text: &str, path: &Path) -> Result<Value> {
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        Ok(serde_json::from_str(text)?)
    } else {
        let v: toml::Value = toml::from_str(text).map_err(|e| Error::Domain(format!("spec: {e}")))?;
        serde_json::to_value(v).map_err(Error::from)
    }
}

/// Resolve a spec from an optional file plus flag overrides.
pub fn load_spec(flags: &Flags) -> Result<RunSpec> {
    let mut value = match &flags.spec {
        Some(path) => parse_spec_text(&fs::read_to_string(path)?, path)?,
        None => json!({}),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Domain("spec must be a table".into()))?;
    macro_rules! overlay {
        ($($field:ident),*) => {
            $(if let Some(v) = &flags.$field {
                obj.insert(stringify!($field).into(), serde_json::to_value(v)?);
            })*
        };
    }
    overlay!(experiment, region, cut, n_particles, delta, lambda, q, s, eta, seed, samples, workers, out);
    let spec: RunSpec = serde_json::from_value(value).map_err(|e| Error::Domain(format!("spec: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

impl RunSpec {
    pub fn from_toml(text: &str) -> Result<RunSpec> {
        let v: toml::Value = toml::from_str(text).map_err(|e| Error::Domain(format!("spec: {e}")))?;
        let spec: RunSpec = serde_json::from_value(serde_json::to_value(v)?)
            .map_err(|e| Error::Domain(format!("spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.delta, self.lambda)
    }

    pub fn region(&self) -> Result<Region> {
        let r = Region::from_intervals(&Region::parse_intervals(&self.region)?)?;
        match &self.cut {
            Some(c) => r.with_cut_intervals(&Region::parse_intervals(c)?),
            None => Ok(r),
        }
    }

    pub fn half_int_q(&self) -> Result<Option<HalfInt>> {
        self.q.map(HalfInt::from_f64).transpose()
    }

    /// Hypotheses checked before anything runs.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.region()?;
        self.half_int_q()?;
        if !(self.eta > 0.0) {
            return domain(format!("eta must be positive, got {}", self.eta));
        }
        if self.workers == 0 {
            return domain("workers must be at least 1");
        }
        use Experiment::*;
        if self.experiment == FmScan {
            match self.s {
                Some(s) if s > 0.0 && s <= 1.0 / 3.0 => {}
                Some(s) => return domain(format!("s must lie in (0, 1/3], got {s}")),
                None => return domain("fm-scan needs s"),
            }
        }
        if matches!(self.experiment, FmScan | QcScan | LiftedCt | LdProbe | Centers) && self.q.is_none() {
            return domain(format!("{:?} needs q", self.experiment));
        }
        if matches!(self.experiment, Green | FmScan | QcScan | CtCheck | LiftedCt | LdProbe | Assemble)
            && self.n_particles.is_none()
        {
            return domain(format!("{:?} needs n_particles", self.experiment));
        }
        if matches!(self.experiment, FmScan | QcScan | CtCheck | LiftedCt | LdProbe) && self.samples < 2 {
            return domain("Monte Carlo runs need at least 2 samples");
        }
        Ok(())
    }

    fn scan_config(&self) -> Result<ScanConfig> {
        Ok(ScanConfig {
            region: self.region()?,
            n_particles: self.n_particles.unwrap_or(1),
            params: self.params()?,
            distribution: self.distribution,
            n_samples: self.samples,
            seed: self.seed,
            workers: self.workers,
        })
    }

    fn anchor(&self) -> Result<Option<Configuration>> {
        self.sites.clone().map(Configuration::from_unsorted).transpose()
    }

    fn omega(&self, region: &Region) -> Result<DisorderSample> {
        DisorderSample::sample(region, self.distribution, self.seed)
    }
}

/// The outcome of a run: the artifact plus an optional failed assertion.
pub struct RunOutput {
    pub table: CsvTable,
    pub violation: Option<String>,
}

fn header(spec: &RunSpec, result: Value) -> Value {
    json!({
        "tool": "xxz-bench",
        "version": env!("CARGO_PKG_VERSION"),
        "spec": spec,
        "result": result,
    })
}

fn scan_output(spec: &RunSpec, scan: &ScanResult, extra: Value) -> Result<RunOutput> {
    let range = spec.fit_range.map(|[a, b]| (a, b));
    let (fit, bins) = match scan.fit(spec.distance, range) {
        Ok(f) => (json!({"slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared, "slope_se": f.slope_se}), f.bins),
        Err(Error::Refused(msg)) => (json!({"refused": msg}), scan.bins(spec.distance)?),
        Err(e) => return Err(e),
    };
    let table = bins_table(header(spec, json!({"fit": fit, "details": extra})), spec.distance, &bins);
    Ok(RunOutput { table, violation: None })
}

/// Run one experiment, returning the artifact without writing it.
pub fn execute(spec: &RunSpec) -> Result<RunOutput> {
    spec.validate()?;
    let params = spec.params()?;
    let region = spec.region()?;
    use Experiment::*;
    match spec.experiment {
        Assemble => {
            let n = spec.n_particles.unwrap_or(0);
            let h = assemble_hamiltonian(&region, n, &params, &spec.omega(&region)?)?;
            let ex = h.to_triplets();
            let mut t = CsvTable::new(header(spec, json!({"dim": ex.dim})), ["row", "col", "x", "y", "value"]);
            for (i, j, v) in ex.triplets {
                t.push([i.to_string(), j.to_string(), h.basis().config(i).to_string().replace(',', " "), h.basis().config(j).to_string().replace(',', " "), num(v)]);
            }
            Ok(RunOutput { table: t, violation: None })
        }
        Spectrum => {
            let sectors: Vec<usize> = match spec.n_particles {
                Some(n) => vec![n],
                None => (0..=region.len()).collect(),
            };
            let omega = spec.omega(&region)?;
            let mut min_nonvacuum = f64::INFINITY;
            for &n in sectors.iter().filter(|&&n| n > 0) {
                let h = assemble_hamiltonian(&region, n, &params, &omega)?;
                min_nonvacuum = min_nonvacuum.min(crate::numerics::min_eigenvalue(h.matrix())?);
            }
            let gap_ok = !min_nonvacuum.is_finite() || min_nonvacuum >= params.gap() - 1e-10;
            let result = json!({"gap": params.gap(), "min_eigenvalue": if min_nonvacuum.is_finite() { json!(min_nonvacuum) } else { Value::Null }});
            let table = spectrum_table(&region, &params, &omega, &sectors, header(spec, result))?;
            Ok(RunOutput {
                table,
                violation: (!gap_ok).then(|| format!("eigenvalue {min_nonvacuum} below the gap {}", params.gap())),
            })
        }
        Green => {
            let n = spec.n_particles.unwrap_or(0);
            let h = assemble_hamiltonian(&region, n, &params, &spec.omega(&region)?)?;
            let x = match spec.anchor()? {
                Some(x) => x,
                None => default_anchor(&region, n)?,
            };
            let z = C64::new(spec.re_z.unwrap_or(0.5 * params.gap()), spec.eta);
            let g = green_matrix(&h, z)?;
            let rx = h.basis().rank(&x)?;
            let mut t = CsvTable::new(header(spec, json!({"x": x, "z": [z.re, z.im]})), ["y", "distance", "re", "im", "abs"]);
            for (ry, y) in h.basis().configs().iter().enumerate() {
                let d = spec.distance.eval(&x, y, &region)?;
                let v = g[(rx, ry)];
                t.push([y.to_string().replace(',', " "), d.to_string(), num(v.re), num(v.im), num(v.norm())]);
            }
            Ok(RunOutput { table: t, violation: None })
        }
        FmScan => {
            let q = spec.half_int_q()?.expect("validated");
            let cfg = spec.scan_config()?;
            let z = C64::new(spec.re_z.unwrap_or(0.5 * params.gap()), spec.eta);
            let scan = fractional_moment_scan(&cfg, q, spec.s.expect("validated"), z, &spec.family)?;
            scan_output(spec, &scan, json!({"z": [z.re, z.im]}))
        }
        QcScan => {
            let q = spec.half_int_q()?.expect("validated");
            let scan = eigencorrelator_scan(&spec.scan_config()?, q, &spec.family)?;
            let window = EnergyWindow::new(q, params.delta)?;
            scan_output(spec, &scan, json!({"window_upper": window.upper()}))
        }
        CtCheck | LiftedCt => {
            let cfg = spec.scan_config()?;
            let rep = if spec.experiment == CtCheck {
                combes_thomas_check(&cfg, spec.half_int_q()?.unwrap_or(HalfInt::HALF), spec.anchor()?)?
            } else {
                lifted_ct_check(&cfg, spec.half_int_q()?.expect("validated"), spec.anchor()?)?
            };
            let ok = rep.all_decaying && rep.cross_cut_max == 0.0;
            let result = json!({"all_decaying": rep.all_decaying, "cross_cut_max": rep.cross_cut_max});
            Ok(RunOutput {
                table: rep.table(header(spec, result)),
                violation: (!ok).then(|| "Combes-Thomas decay failed for some sample".to_string()),
            })
        }
        LdProbe => {
            let q = spec.half_int_q()?.expect("validated");
            let probe = large_deviation_probe(&spec.scan_config()?, q, spec.anchor()?)?;
            let mut t = CsvTable::new(
                header(spec, json!({"set": probe.set, "bound_applies": probe.bound_applies})),
                ["n", "threshold", "set_size", "configurations", "frequency", "stderr", "count"],
            );
            t.push([
                probe.n_particles.to_string(),
                num(probe.threshold),
                probe.set.len().to_string(),
                probe.configurations.to_string(),
                num(probe.frequency.mean),
                num(probe.frequency.stderr),
                probe.frequency.count.to_string(),
            ]);
            Ok(RunOutput { table: t, violation: None })
        }
        Centers => {
            let q = spec.half_int_q()?.expect("validated");
            let window = EnergyWindow::new(q, params.delta)?;
            let omega = spec.omega(&region)?;
            let sectors: Vec<usize> = match spec.n_particles {
                Some(n) => vec![n],
                None => (1..=region.len().min(3)).collect(),
            };
            let mut t = CsvTable::new(header(spec, json!({"window_upper": window.upper(), "radius": 3})), ["n", "energy", "center", "inequality", "mass_near", "ipr"]);
            let mut all_hold = true;
            for n in sectors {
                let h = assemble_hamiltonian(&region, n, &params, &omega)?;
                for row in eigenvector_centers(&h, &window.at_most(), 3)? {
                    all_hold &= row.inequality_holds;
                    t.push([n.to_string(), num(row.energy), row.center.to_string().replace(',', " "), row.inequality_holds.to_string(), num(row.mass_near), num(row.ipr)]);
                }
            }
            Ok(RunOutput { table: t, violation: (!all_hold).then(|| "center inequality failed".to_string()) })
        }
        FilterLocality => {
            let n = spec.n_particles.unwrap_or(2);
            let omega = spec.omega(&region)?;
            let mid = region.sites()[region.len() / 2];
            let s_set = spec.sites.clone().unwrap_or_else(|| vec![mid]);
            let energy = spec.energy.unwrap_or(1.0);
            let ells: Vec<u64> = (1..=spec.ell_max).collect();
            let a_values = spec.a_values.clone().unwrap_or_else(|| vec![0.0, 0.3, 1.0]);
            let mut rates = Vec::new();
            let mut t: Option<CsvTable> = None;
            for &a in &a_values {
                let rep = filter_locality_check(&region, n, &params, &omega, &s_set, &ells, a, energy)?;
                rates.push(json!({"a": a, "rate": rep.rate, "nonincreasing": rep.nonincreasing}));
                let part = rep.table(Value::Null);
                match &mut t {
                    None => t = Some(part),
                    Some(tab) => tab.rows.extend(part.rows),
                }
            }
            let mut table = t.ok_or_else(|| Error::Domain("no a values".into()))?;
            table.header = header(spec, json!({"rates": rates}));
            Ok(RunOutput { table, violation: None })
        }
        LrCheck => {
            let omega = spec.omega(&region)?;
            let k1 = region.cut().map(|c| c.to_vec()).unwrap_or_else(|| region.sites().to_vec());
            let a_set = spec.sites.clone().unwrap_or_else(|| vec![k1[k1.len().saturating_sub(3)]]);
            let times = spec.t_values.clone().unwrap_or_else(|| (0..=10).map(|k| k as f64 * 0.5).collect());
            let centre = a_set[0];
            let sectors = spec.n_particles.map(|n| vec![n]);
            let mut table = CsvTable::new(Value::Null, ["r", "t", "measured", "bound", "margin"]);
            let mut all_hold = true;
            for r in 1..=spec.ell_max as i64 {
                let b: Vec<i64> = region.sites().iter().copied().filter(|&s| s - centre >= -r && s - centre < r).collect();
                if b.len() == region.len() {
                    break;
                }
                let rep = lieb_robinson_check(&region, sectors.as_deref(), &params, &omega, &a_set, &b, &times)?;
                all_hold &= rep.all_hold;
                table.rows.extend(rep.table(Value::Null).rows);
            }
            table.header = header(spec, json!({"all_hold": all_hold}));
            Ok(RunOutput { table, violation: (!all_hold).then(|| "Lieb-Robinson bound violated".to_string()) })
        }
        FourierCheck => {
            let ts = spec.t_values.clone().unwrap_or_else(|| vec![1.0, 5.0, 20.0]);
            let a_values = spec.a_values.clone().unwrap_or_else(|| vec![0.0, 0.3]);
            let xis: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.5).collect();
            let mut table = CsvTable::new(Value::Null, ["t", "a", "xi", "measured", "bound", "margin", "budget"]);
            let mut failures = Vec::new();
            for &t in &ts {
                for &a in &a_values {
                    let rep = fourier_bound_check(t, a, spec.eps, &xis)?;
                    if !rep.all_hold {
                        failures.push(json!({"t": t, "a": a}));
                    }
                    table.rows.extend(rep.table(Value::Null).rows);
                }
            }
            table.header = header(spec, json!({"failures": failures}));
            let violation = (!failures.is_empty()).then(|| format!("Fourier bound fails for {}", Value::from(failures)));
            Ok(RunOutput { table, violation })
        }
        Counterexample => {
            let literal = counterexample_app_a(spec.l, PI / 2.0, Witness::Z)?;
            let corrected = counterexample_app_a(spec.l, PI / 4.0, Witness::X)?;
            let mut table = CsvTable::new(Value::Null, ["variant", "assertion", "value", "target", "status"]);
            for (name, rep) in [("literal", &literal), ("corrected", &corrected)] {
                for row in rep.table(Value::Null).rows {
                    table.rows.push(std::iter::once(name.to_string()).chain(row).collect());
                }
            }
            let pass = literal.diagonal_pass() && literal.evolution_pass() && literal.string_pass() && literal.commutator_pass();
            table.header = header(spec, json!({"literal_pass": pass}));
            Ok(RunOutput { table, violation: (!pass).then(|| "literal counterexample assertions fail".to_string()) })
        }
        OracleSums => oracle_sums(spec),
        OracleEquivalence => oracle_equivalence(spec, &region),
    }
}

fn oracle_sums(spec: &RunSpec) -> Result<RunOutput> {
    let mut t = CsvTable::new(Value::Null, ["sum", "alpha", "n", "k", "value", "bound", "radius", "holds"]);
    let mut all_hold = true;
    for alpha in [0.5, 1.0, 2.0] {
        for n in 1..=6usize {
            for k in 1..=n.min(3) {
                // A configuration of N sites with exactly k clusters.
                let mut sites: Vec<i64> = (0..n as i64).collect();
                for (c, s) in sites.iter_mut().enumerate() {
                    *s += 2 * (c.min(k - 1) as i64);
                }
                let x = Configuration::new(sites)?;
                let a = exp_sum_d1(&x, k, alpha, None)?;
                let b = exp_sum_d1_dual(&x, k, alpha, None)?;
                all_hold &= a.holds && b.holds;
                t.push(["d1".into(), num(alpha), n.to_string(), k.to_string(), num(a.value), num(a.bound), a.radius.to_string(), a.holds.to_string()]);
                t.push(["d1_dual".into(), num(alpha), n.to_string(), k.to_string(), num(b.value), num(b.bound), b.radius.to_string(), b.holds.to_string()]);
            }
        }
    }
    for n in 2..=6usize {
        let x = Configuration::new((0..n as i64).collect())?;
        let h = exp_sum_dh(&x, 1, 1.0, None)?;
        t.push(["dH_ratio".into(), num(1.0), n.to_string(), "1".into(), num(h.ratio), "".into(), h.radius.to_string(), "".into()]);
    }
    t.header = header(spec, json!({"all_hold": all_hold, "c_alpha_1": c_alpha(1.0)?}));
    Ok(RunOutput { table: t, violation: (!all_hold).then(|| "exponential-sum bound violated".to_string()) })
}

fn oracle_equivalence(spec: &RunSpec, region: &Region) -> Result<RunOutput> {
    let mut t = CsvTable::new(Value::Null, ["seed", "delta", "lambda", "cut", "n", "max_abs_diff", "number_commutator"]);
    let mut worst = 0.0f64;
    for i in 0..spec.samples as u64 {
        let seed = sample_seed(spec.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = rng.random_range(1.5..8.0);
        let lambda = rng.random_range(0.0..10.0);
        let whole = region.without_cut();
        let r = if rng.random_bool(0.5) && whole.len() > 1 {
            let k = rng.random_range(1..whole.len());
            whole.clone().with_cut(whole.sites()[..k].to_vec())?
        } else {
            whole
        };
        let params = ModelParams::new(delta, lambda)?;
        let omega = DisorderSample::sample(&r, spec.distribution, seed)?;
        let tensor = tensor_hamiltonian(&r, &params, &omega)?;
        let comm = tensor.number_commutator_max();
        for n in 0..=r.len() {
            let h = assemble_hamiltonian(&r, n, &params, &omega)?;
            let diff = (tensor.sector_block(n)? - h.matrix()).amax();
            worst = worst.max(diff);
            let cut = r.cut().map(|c| format!("{}:{}", c[0], c[c.len() - 1])).unwrap_or_default();
            t.push([seed.to_string(), num(delta), num(lambda), cut, n.to_string(), num(diff), num(comm)]);
        }
    }
    t.header = header(spec, json!({"max_abs_diff": worst}));
    Ok(RunOutput { table: t, violation: (worst > 1e-12).then(|| format!("oracle mismatch {worst}")) })
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Json(_) | Error::Io(_) => 2,
        Error::Refused(_) | Error::NearSingular { .. } => 3,
        Error::BoundViolation(_) => 4,
    }
}

fn error_line(e: &Error) -> String {
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::NearSingular { .. } => "near_singular",
        Error::Refused(_) => "refused",
        Error::BoundViolation(_) => "bound_violation",
        Error::Io(_) => "io",
        Error::Json(_) => "spec",
    };
    json!({"error": kind, "message": e.to_string()}).to_string()
}

/// Parse, run, write; returns the process exit code.
pub fn run(flags: &Flags) -> i32 {
    let result = load_spec(flags).and_then(|spec| {
        let out = execute(&spec)?;
        out.table.write(&spec.out)?;
        match out.violation {
            Some(msg) => Err(Error::BoundViolation(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            exit_code(&e)
        }
    }
}

pub fn main_from_env() -> i32 {
    match Flags::try_parse() {
        Ok(flags) => run(&flags),
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            0
        }
        Err(e) => {
            eprintln!("{}", json!({"error": "usage", "message": e.to_string().lines().next().unwrap_or_default()}));
            2
        }
    }
}
