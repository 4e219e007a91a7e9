//! Particle configurations on finite pieces of the integer lattice.
//!
//! A [`Region`] is a finite union of integer intervals, optionally split by a
//! cut into two halves that share no edges. Configurations are sorted lists of
//! occupied sites; a [`SectorBasis`] enumerates every configuration with a
//! fixed particle number in colexicographic order and supplies the rank/unrank
//! bijection that indexes all sector matrices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// A graph distance that may be infinite (disconnected sites, or
/// configurations with different particle numbers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtDist {
    Finite(u64),
    Infinite,
}

impl ExtDist {
    pub fn finite(self) -> Option<u64> {
        match self {
            ExtDist::Finite(d) => Some(d),
            ExtDist::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtDist::Finite(_))
    }
}

impl Add for ExtDist {
    type Output = ExtDist;

    fn add(self, rhs: ExtDist) -> ExtDist {
        match (self, rhs) {
            (ExtDist::Finite(a), ExtDist::Finite(b)) => ExtDist::Finite(a + b),
            _ => ExtDist::Infinite,
        }
    }
}

/// Serialized as the integer, or the string `"inf"`.
impl Serialize for ExtDist {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtDist::Finite(d) => s.serialize_u64(*d),
            ExtDist::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for ExtDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtDist::Finite(d) => write!(f, "{d}"),
            ExtDist::Infinite => f.write_str("inf"),
        }
    }
}

/// Which configuration distance a fit or a CSV row refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceKind {
    /// Sum of graph distances between the i-th smallest sites; infinite when
    /// particle numbers differ.
    #[serde(rename = "d1")]
    D1,
    /// Plain Hausdorff distance between the occupied sets.
    #[serde(rename = "dH")]
    Hausdorff,
    /// Hausdorff distance, infinite when particle numbers differ.
    #[serde(rename = "dH_mod")]
    ModHausdorff,
}

impl DistanceKind {
    pub fn tag(self) -> &'static str {
        match self {
            DistanceKind::D1 => "d1",
            DistanceKind::Hausdorff => "dH",
            DistanceKind::ModHausdorff => "dH_mod",
        }
    }

    pub fn eval(self, x: &Configuration, y: &Configuration, region: &Region) -> Result<ExtDist> {
        match self {
            DistanceKind::D1 => dist_d1(x, y, region),
            DistanceKind::Hausdorff => dist_hausdorff(x, y, region),
            DistanceKind::ModHausdorff => dist_hausdorff_mod(x, y, region),
        }
    }
}

/// Serialized form of a region: inclusive intervals plus optional cut intervals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub intervals: Vec<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<Vec<[i64; 2]>>,
}

/// A finite set of lattice sites with nearest-neighbour edges, optionally
/// decoupled along a cut `K`: edges survive only when both endpoints lie in
/// `K` or both lie outside it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RegionSpec", into = "RegionSpec")]
pub struct Region {
    sites: Vec<i64>,
    cut: Option<Vec<i64>>,
    // Connected component of each site (indexed like `sites`).
    component: Vec<u32>,
    // Offset table: `lookup[s - sites[0]]` is the index of `s`, or u32::MAX.
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl Region {
    pub fn new(sites: Vec<i64>) -> Result<Region> {
        if sites.is_empty() {
            return domain("region must contain at least one site");
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return domain("region sites must be strictly increasing");
        }
        let span = (sites[sites.len() - 1] - sites[0]) as usize + 1;
        let mut lookup = vec![ABSENT; span];
        for (i, &s) in sites.iter().enumerate() {
            lookup[(s - sites[0]) as usize] = i as u32;
        }
        let mut region = Region {
            sites,
            cut: None,
            component: Vec::new(),
            lookup,
        };
        region.rebuild_components();
        Ok(region)
    }

    /// The interval `[a, b]` (inclusive).
    pub fn interval(a: i64, b: i64) -> Result<Region> {
        if b < a {
            return domain(format!("empty interval [{a}, {b}]"));
        }
        Region::new((a..=b).collect())
    }

    pub fn from_intervals(intervals: &[[i64; 2]]) -> Result<Region> {
        Region::new(sites_of_intervals(intervals)?)
    }

    /// Decouple the region along `k`, which must be a subset of its sites.
    pub fn with_cut(mut self, k: Vec<i64>) -> Result<Region> {
        let mut k = k;
        k.sort_unstable();
        k.dedup();
        if let Some(&s) = k.iter().find(|&&s| !self.contains(s)) {
            return domain(format!("cut site {s} is not in the region"));
        }
        self.cut = Some(k);
        self.rebuild_components();
        Ok(self)
    }

    pub fn with_cut_intervals(self, intervals: &[[i64; 2]]) -> Result<Region> {
        let k = sites_of_intervals(intervals)?;
        self.with_cut(k)
    }

    /// The same site set with every edge restored.
    pub fn without_cut(&self) -> Region {
        let mut r = self.clone();
        r.cut = None;
        r.rebuild_components();
        r
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn cut(&self) -> Option<&[i64]> {
        self.cut.as_deref()
    }

    /// True when the cut is present, nonempty, and a proper subset.
    pub fn has_proper_cut(&self) -> bool {
        matches!(&self.cut, Some(k) if !k.is_empty() && k.len() < self.sites.len())
    }

    pub fn contains(&self, site: i64) -> bool {
        self.index_of(site).is_some()
    }

    /// Position of `site` in the sorted site list.
    pub fn index_of(&self, site: i64) -> Option<usize> {
        let off = site.checked_sub(self.sites[0])?;
        if off < 0 {
            return None;
        }
        match self.lookup.get(off as usize) {
            Some(&i) if i != ABSENT => Some(i as usize),
            _ => None,
        }
    }

    fn in_cut(&self, site: i64) -> bool {
        self.cut
            .as_ref()
            .is_some_and(|k| k.binary_search(&site).is_ok())
    }

    fn rebuild_components(&mut self) {
        let mut comp = Vec::with_capacity(self.sites.len());
        let mut id = 0u32;
        for (i, &s) in self.sites.iter().enumerate() {
            if i > 0 {
                let prev = self.sites[i - 1];
                let joined = s - prev == 1 && self.in_cut(s) == self.in_cut(prev);
                if !joined {
                    id += 1;
                }
            }
            comp.push(id);
        }
        self.component = comp;
    }

    /// Graph distance between two sites of the region.
    pub fn site_distance(&self, a: i64, b: i64) -> Result<ExtDist> {
        let (ia, ib) = match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => (ia, ib),
            _ => return domain(format!("site pair ({a}, {b}) not in region")),
        };
        Ok(self.distance_by_index(ia, ib))
    }

    fn distance_by_index(&self, ia: usize, ib: usize) -> ExtDist {
        // Components are runs of consecutive integers, so the graph distance
        // inside one is the plain absolute difference.
        if self.component[ia] == self.component[ib] {
            ExtDist::Finite(self.sites[ia].abs_diff(self.sites[ib]))
        } else {
            ExtDist::Infinite
        }
    }

    /// Whether `{a, b}` is an edge of the (possibly decoupled) graph.
    pub fn adjacent(&self, a: i64, b: i64) -> bool {
        if a.abs_diff(b) != 1 {
            return false;
        }
        match (self.index_of(a), self.index_of(b)) {
            (Some(ia), Some(ib)) => self.component[ia] == self.component[ib],
            _ => false,
        }
    }

    /// Edges `{i, i+1}` of the graph in increasing order of `i`.
    pub fn edges(&self) -> Vec<(i64, i64)> {
        self.sites
            .windows(2)
            .filter(|w| self.adjacent(w[0], w[1]))
            .map(|w| (w[0], w[1]))
            .collect()
    }

    /// Sites within graph distance `p` of the set `s`.
    pub fn neighborhood(&self, s: &[i64], p: u64) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        for &site in &self.sites {
            let mut best = ExtDist::Infinite;
            for &t in s {
                best = best.min(self.site_distance(site, t)?);
            }
            if best <= ExtDist::Finite(p) {
                out.push(site);
            }
        }
        Ok(out)
    }

    /// Compact interval description of the site set.
    pub fn intervals(&self) -> Vec<[i64; 2]> {
        intervals_of_sites(&self.sites)
    }

    /// Parse `"0:9"` or `"0:4,7:9"` (inclusive ranges; a bare `"5"` is one site).
    pub fn parse_intervals(text: &str) -> Result<Vec<[i64; 2]>> {
        let mut out = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let parse = |s: &str| {
                s.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Domain(format!("bad interval bound `{s}`")))
            };
            let iv = match part.split_once(':') {
                Some((a, b)) => [parse(a)?, parse(b)?],
                None => {
                    let a = parse(part)?;
                    [a, a]
                }
            };
            out.push(iv);
        }
        if out.is_empty() {
            return domain("empty interval list");
        }
        Ok(out)
    }
}

fn sites_of_intervals(intervals: &[[i64; 2]]) -> Result<Vec<i64>> {
    let mut sites = Vec::new();
    for &[a, b] in intervals {
        if b < a {
            return domain(format!("empty interval [{a}, {b}]"));
        }
        sites.extend(a..=b);
    }
    sites.sort_unstable();
    let before = sites.len();
    sites.dedup();
    if sites.len() != before {
        return domain("intervals overlap");
    }
    Ok(sites)
}

fn intervals_of_sites(sites: &[i64]) -> Vec<[i64; 2]> {
    let mut out: Vec<[i64; 2]> = Vec::new();
    for &s in sites {
        match out.last_mut() {
            Some(last) if last[1] + 1 == s => last[1] = s,
            _ => out.push([s, s]),
        }
    }
    out
}

impl TryFrom<RegionSpec> for Region {
    type Error = Error;

    fn try_from(spec: RegionSpec) -> Result<Region> {
        let region = Region::from_intervals(&spec.intervals)?;
        match spec.cut {
            Some(cut) => region.with_cut_intervals(&cut),
            None => Ok(region),
        }
    }
}

impl From<Region> for RegionSpec {
    fn from(r: Region) -> RegionSpec {
        RegionSpec {
            intervals: r.intervals(),
            cut: r.cut.as_deref().map(intervals_of_sites),
        }
    }
}

/// A particle configuration: a strictly increasing list of occupied sites.
/// The empty list is the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct Configuration(Vec<i64>);

impl Configuration {
    pub fn new(sites: Vec<i64>) -> Result<Configuration> {
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!("configuration {sites:?} is not strictly increasing"));
        }
        Ok(Configuration(sites))
    }

    /// Build from an arbitrary site list by sorting; duplicates are rejected.
    pub fn from_unsorted(mut sites: Vec<i64>) -> Result<Configuration> {
        sites.sort_unstable();
        Configuration::new(sites)
    }

    pub fn vacuum() -> Configuration {
        Configuration(Vec::new())
    }

    pub fn sites(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, site: i64) -> bool {
        self.0.binary_search(&site).is_ok()
    }

    pub fn intersects(&self, set: &[i64]) -> bool {
        self.0.iter().any(|s| set.contains(s))
    }

    /// Euclidean norm of the site labels.
    pub fn norm2(&self) -> f64 {
        self.0
            .iter()
            .map(|&s| (s as f64) * (s as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn translate(&self, by: i64) -> Configuration {
        Configuration(self.0.iter().map(|s| s + by).collect())
    }

    fn check_in(&self, region: &Region) -> Result<()> {
        match self.0.iter().find(|&&s| !region.contains(s)) {
            Some(s) => domain(format!("site {s} of {self} is outside the region")),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<i64>> for Configuration {
    type Error = Error;

    fn try_from(v: Vec<i64>) -> Result<Configuration> {
        Configuration::new(v)
    }
}

impl From<Configuration> for Vec<i64> {
    fn from(c: Configuration) -> Vec<i64> {
        c.0
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

/// Pascal triangle up to row `n`, `table[m][j] = C(m, j)`.
fn binomial_table(n: usize) -> Vec<Vec<u64>> {
    let mut table = vec![vec![0u64; n + 2]; n + 1];
    for m in 0..=n {
        table[m][0] = 1;
        for j in 1..=m {
            table[m][j] = table[m - 1][j - 1].saturating_add(table[m - 1][j]);
        }
    }
    table
}

/// `C(n, k)` as a float; used where counts may exceed `u64`.
pub fn binomial_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// The `N`-particle configurations of a region in colexicographic order,
/// with the combinatorial-number-system rank/unrank bijection.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    region: Region,
    n_particles: usize,
    binom: Vec<Vec<u64>>,
    configs: Vec<Configuration>,
}

impl SectorBasis {
    pub fn new(region: &Region, n_particles: usize) -> Result<SectorBasis> {
        let l = region.len();
        if n_particles > l {
            return domain(format!("N = {n_particles} exceeds |region| = {l}"));
        }
        let binom = binomial_table(l);
        let size = binom[l][n_particles];
        if size > 50_000_000 {
            return Err(Error::Refused(format!("sector dimension {size} is not desk scale")));
        }
        let mut basis = SectorBasis {
            region: region.clone(),
            n_particles,
            binom,
            configs: Vec::new(),
        };
        basis.configs = (0..size as usize).map(|r| basis.unrank_raw(r)).collect();
        Ok(basis)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn size(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[Configuration] {
        &self.configs
    }

    pub fn config(&self, rank: usize) -> &Configuration {
        &self.configs[rank]
    }

    /// Colex rank: `sum_i C(p_i, i + 1)` over the site positions `p_0 < p_1 < ...`.
    pub fn rank(&self, x: &Configuration) -> Result<usize> {
        if x.len() != self.n_particles {
            return domain(format!(
                "{x} has {} particles, sector has {}",
                x.len(),
                self.n_particles
            ));
        }
        let mut r = 0u64;
        for (i, &s) in x.sites().iter().enumerate() {
            let p = self
                .region
                .index_of(s)
                .ok_or_else(|| Error::Domain(format!("site {s} of {x} is outside the region")))?;
            r += self.binom[p][i + 1];
        }
        Ok(r as usize)
    }

    pub fn unrank(&self, rank: usize) -> Result<Configuration> {
        self.configs
            .get(rank)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("rank {rank} out of range {}", self.size())))
    }

    fn unrank_raw(&self, rank: usize) -> Configuration {
        let mut r = rank as u64;
        let mut positions = vec![0usize; self.n_particles];
        let mut upper = self.region.len();
        for i in (1..=self.n_particles).rev() {
            // Largest p < upper with C(p, i) <= r.
            let mut p = upper - 1;
            while self.binom[p][i] > r {
                p -= 1;
            }
            r -= self.binom[p][i];
            positions[i - 1] = p;
            upper = p;
        }
        Configuration(positions.iter().map(|&p| self.region.sites[p]).collect())
    }
}

/// Every `N`-particle configuration of `region`, in colex order.
pub fn enumerate_sector(region: &Region, n_particles: usize) -> Result<Vec<Configuration>> {
    Ok(SectorBasis::new(region, n_particles)?.configs)
}

/// Number of connected components of `x` in the region's graph.
pub fn cluster_count(x: &Configuration, region: &Region) -> Result<usize> {
    x.check_in(region)?;
    Ok(cluster_count_unchecked(x, region))
}

pub(crate) fn cluster_count_unchecked(x: &Configuration, region: &Region) -> usize {
    let s = x.sites();
    if s.is_empty() {
        return 0;
    }
    // Graph edges join consecutive integers only, so only neighbours in the
    // sorted list can be joined.
    1 + s.windows(2).filter(|w| !region.adjacent(w[0], w[1])).count()
}

/// `sum_i dist(x_i, y_i)`; infinite when sizes differ or any pair is disconnected.
pub fn dist_d1(x: &Configuration, y: &Configuration, region: &Region) -> Result<ExtDist> {
    x.check_in(region)?;
    y.check_in(region)?;
    if x.len() != y.len() {
        return Ok(ExtDist::Infinite);
    }
    let mut total = ExtDist::Finite(0);
    for (&a, &b) in x.sites().iter().zip(y.sites()) {
        total = total + region.site_distance(a, b)?;
    }
    Ok(total)
}

fn point_to_set(region: &Region, a: i64, set: &[i64]) -> Result<ExtDist> {
    let mut best = ExtDist::Infinite;
    for &b in set {
        best = best.min(region.site_distance(a, b)?);
    }
    Ok(best)
}

/// Hausdorff distance between the occupied sets, in the region's graph metric.
/// The empty set is at distance 0 from itself and infinitely far from
/// everything else.
pub fn dist_hausdorff(x: &Configuration, y: &Configuration, region: &Region) -> Result<ExtDist> {
    x.check_in(region)?;
    y.check_in(region)?;
    match (x.is_empty(), y.is_empty()) {
        (true, true) => return Ok(ExtDist::Finite(0)),
        (true, false) | (false, true) => return Ok(ExtDist::Infinite),
        _ => {}
    }
    let mut worst = ExtDist::Finite(0);
    for &a in x.sites() {
        worst = worst.max(point_to_set(region, a, y.sites())?);
    }
    for &b in y.sites() {
        worst = worst.max(point_to_set(region, b, x.sites())?);
    }
    Ok(worst)
}

/// Hausdorff distance, set to infinity when the particle numbers differ.
pub fn dist_hausdorff_mod(
    x: &Configuration,
    y: &Configuration,
    region: &Region,
) -> Result<ExtDist> {
    if x.len() != y.len() {
        x.check_in(region)?;
        y.check_in(region)?;
        return Ok(ExtDist::Infinite);
    }
    dist_hausdorff(x, y, region)
}

/// Configurations with `N` particles and between 1 and `k` clusters.
pub fn enumerate_bounded_clusters(
    region: &Region,
    n_particles: usize,
    k: usize,
) -> Result<Vec<Configuration>> {
    if k < 1 {
        return domain("cluster bound k must be at least 1");
    }
    let all = enumerate_sector(region, n_particles)?;
    Ok(all
        .into_iter()
        .filter(|x| {
            let w = cluster_count_unchecked(x, region);
            (1..=k).contains(&w)
        })
        .collect())
}

/// All configurations reachable from `x` by moving one particle across one
/// edge onto an empty site, with the `(from, to)` move that produced each.
pub fn hop_neighbors(x: &Configuration, region: &Region) -> Result<Vec<(Configuration, (i64, i64))>> {
    x.check_in(region)?;
    let mut out = Vec::new();
    for (i, &s) in x.sites().iter().enumerate() {
        for t in [s - 1, s + 1] {
            if !region.adjacent(s, t) || x.contains(t) {
                continue;
            }
            let mut sites = x.sites().to_vec();
            sites[i] = t;
            // A hop to an empty neighbour never passes another particle.
            debug_assert!(sites.windows(2).all(|w| w[0] < w[1]));
            out.push((Configuration(sites), (s, t)));
        }
    }
    Ok(out)
}

/// Compare configurations in the colex order used by [`SectorBasis`].
pub fn colex_cmp(a: &Configuration, b: &Configuration) -> Ordering {
    a.sites().iter().rev().cmp(b.sites().iter().rev())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[i64]) -> Configuration {
        Configuration::new(v.to_vec()).unwrap()
    }

    fn binom(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
    }

    #[test]
    fn sector_enumeration_examples() {
        let r = Region::interval(0, 2).unwrap();
        assert_eq!(
            enumerate_sector(&r, 2).unwrap(),
            vec![cfg(&[0, 1]), cfg(&[0, 2]), cfg(&[1, 2])]
        );
        let r = Region::interval(0, 4).unwrap();
        assert_eq!(enumerate_sector(&r, 0).unwrap(), vec![Configuration::vacuum()]);
        let r = Region::interval(0, 19).unwrap();
        assert_eq!(enumerate_sector(&r, 3).unwrap().len() as u64, binom(20, 3));
        assert!(enumerate_sector(&Region::interval(0, 2).unwrap(), 4).is_err());
    }

    #[test]
    fn sector_order_is_colex() {
        let r = Region::from_intervals(&[[0, 3], [6, 9]]).unwrap();
        let all = enumerate_sector(&r, 3).unwrap();
        for w in all.windows(2) {
            assert_eq!(colex_cmp(&w[0], &w[1]), Ordering::Less);
        }
    }

    #[test]
    fn rank_unrank_round_trip_small_sectors() {
        for l in 1..=20i64 {
            let r = Region::interval(0, l - 1).unwrap();
            for n in 0..=5usize.min(l as usize) {
                let basis = SectorBasis::new(&r, n).unwrap();
                assert_eq!(basis.size() as u64, binom(l as u64, n as u64));
                for (i, x) in basis.configs().iter().enumerate() {
                    assert_eq!(basis.rank(x).unwrap(), i);
                    assert_eq!(&basis.unrank(i).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn cluster_counts() {
        let r = Region::interval(0, 9).unwrap();
        assert_eq!(cluster_count(&cfg(&[1, 2, 5]), &r).unwrap(), 2);
        assert_eq!(cluster_count(&Configuration::vacuum(), &r).unwrap(), 0);
        let cut = r.clone().with_cut_intervals(&[[0, 4]]).unwrap();
        assert_eq!(cluster_count(&cfg(&[4, 5]), &cut).unwrap(), 2);
        assert_eq!(cluster_count(&cfg(&[4, 5]), &r).unwrap(), 1);
        assert!(cluster_count(&cfg(&[10]), &r).is_err());
    }

    #[test]
    fn d1_examples() {
        let r = Region::interval(-2, 12).unwrap();
        assert_eq!(dist_d1(&cfg(&[0, 10]), &cfg(&[1, 9]), &r).unwrap(), ExtDist::Finite(2));
        assert_eq!(dist_d1(&cfg(&[0]), &cfg(&[3, 4]), &r).unwrap(), ExtDist::Infinite);
        let cut = Region::interval(0, 9).unwrap().with_cut_intervals(&[[0, 4]]).unwrap();
        assert_eq!(dist_d1(&cfg(&[3]), &cfg(&[6]), &cut).unwrap(), ExtDist::Infinite);
    }

    #[test]
    fn hausdorff_examples() {
        let r = Region::interval(0, 10).unwrap();
        assert_eq!(
            dist_hausdorff(&cfg(&[0, 10]), &cfg(&[1, 9]), &r).unwrap(),
            ExtDist::Finite(1)
        );
        assert_eq!(dist_hausdorff(&cfg(&[0]), &cfg(&[0]), &r).unwrap(), ExtDist::Finite(0));
        let r = Region::interval(0, 8).unwrap();
        assert_eq!(
            dist_hausdorff(&cfg(&[0, 1]), &cfg(&[7, 8]), &r).unwrap(),
            ExtDist::Finite(7)
        );
        // Plain Hausdorff is finite across particle numbers; the modified one is not.
        assert_eq!(dist_hausdorff(&cfg(&[0]), &cfg(&[0, 1]), &r).unwrap(), ExtDist::Finite(1));
        assert_eq!(dist_hausdorff_mod(&cfg(&[0]), &cfg(&[0, 1]), &r).unwrap(), ExtDist::Infinite);
    }

    #[test]
    fn bounded_clusters() {
        let r = Region::interval(0, 4).unwrap();
        assert_eq!(
            enumerate_bounded_clusters(&r, 2, 1).unwrap(),
            vec![cfg(&[0, 1]), cfg(&[1, 2]), cfg(&[2, 3]), cfg(&[3, 4])]
        );
        assert_eq!(enumerate_bounded_clusters(&r, 2, 2).unwrap().len(), 10);
        let r = Region::interval(0, 9).unwrap();
        assert_eq!(enumerate_bounded_clusters(&r, 3, 2).unwrap().len(), 64);
        assert!(enumerate_bounded_clusters(&r, 3, 0).is_err());
    }

    #[test]
    fn hop_neighbor_examples() {
        let only = |x: &[i64], r: &Region| -> Vec<Configuration> {
            hop_neighbors(&cfg(x), r).unwrap().into_iter().map(|(c, _)| c).collect()
        };
        // Hard-core hopping: {0,1} on three sites can only reach {0,2}.
        let r = Region::interval(0, 2).unwrap();
        assert_eq!(only(&[0, 1], &r), vec![cfg(&[0, 2])]);
        let r = Region::interval(0, 4).unwrap();
        assert_eq!(only(&[2], &r), vec![cfg(&[1]), cfg(&[3])]);
        let cut = Region::interval(0, 9).unwrap().with_cut_intervals(&[[0, 4]]).unwrap();
        assert_eq!(only(&[4, 5], &cut), vec![cfg(&[3, 5]), cfg(&[4, 6])]);
    }

    #[test]
    fn region_serializes_as_intervals() {
        let r = Region::from_intervals(&[[0, 3], [5, 6]])
            .unwrap()
            .with_cut_intervals(&[[0, 1]])
            .unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"intervals":[[0,3],[5,6]],"cut":[[0,1]]}"#);
        let back: Region = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(serde_json::from_str::<Region>(r#"{"intervals":[[0,3]],"bogus":1}"#).is_err());
        let x: Configuration = serde_json::from_str("[1,4,7]").unwrap();
        assert_eq!(x, cfg(&[1, 4, 7]));
        assert!(serde_json::from_str::<Configuration>("[4,1]").is_err());
    }

    #[test]
    fn parse_interval_text() {
        assert_eq!(Region::parse_intervals("0:4, 7:9").unwrap(), vec![[0, 4], [7, 9]]);
        assert_eq!(Region::parse_intervals("5").unwrap(), vec![[5, 5]]);
        assert!(Region::parse_intervals("a:b").is_err());
    }
}
