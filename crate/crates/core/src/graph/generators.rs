//! Seeded generators for every graph family used in the experiments.
//!
//! Each generator is a pure function of its arguments: one ChaCha stream is
//! seeded from `seed` and consumed in a fixed order (topology first, then
//! weights in edge order).

use std::path::PathBuf;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::locations::{read_locations, synthetic_locations, LocationRecord};
use super::spatial::pairs_within;
use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Rng};
use crate::weights::WeightModel;

/// Where edge weights come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSource {
    /// i.i.d. draws from a discrete model.
    Model { model: WeightModel },
    /// Each node caches a random `cache_size`-subset of `library_size` files;
    /// nodes with identical caches are never linked and the weight is the
    /// size of the symmetric difference.
    Caches { library_size: usize, cache_size: usize },
}

impl From<WeightModel> for WeightSource {
    fn from(model: WeightModel) -> Self {
        WeightSource::Model { model }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Line { n: usize },
    Grid2d { side: usize },
    Gnp { n: usize, p: f64 },
    Geometric { n: usize, radius: f64, range: f64 },
    /// Location-driven caching graph; synthetic locations when no file is given.
    Caching {
        #[serde(default)]
        locations: Option<PathBuf>,
        #[serde(default = "default_synthetic_users")]
        users: usize,
        range: f64,
    },
}

fn default_synthetic_users() -> usize {
    300
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub family: Family,
    pub weights: WeightSource,
    pub seed: u64,
}

/// Builds the graph described by `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<WeightedGraph> {
    let model = || match &spec.weights {
        WeightSource::Model { model } => Ok(model),
        WeightSource::Caches { .. } => Err(Error::Config(
            "cache-derived weights are only available for geometric and caching families".into(),
        )),
    };
    match &spec.family {
        Family::Line { n } => generate_line(*n, model()?, spec.seed),
        Family::Grid2d { side } => generate_grid2d(*side, model()?, spec.seed),
        Family::Gnp { n, p } => generate_gnp(*n, *p, model()?, spec.seed),
        Family::Geometric { n, radius, range } => generate_geometric(*n, *radius, *range, &spec.weights, spec.seed),
        Family::Caching { locations, users, range } => {
            let WeightSource::Caches { library_size, cache_size } = spec.weights else {
                return Err(Error::Config("the caching family needs cache-derived weights".into()));
            };
            let records = match locations {
                Some(path) => read_locations(path)?,
                None => synthetic_locations(*users, 3, spec.seed),
            };
            ingest_caching_instance(&records, library_size, cache_size, *range, spec.seed)
        }
    }
}

fn sample_levels(count: usize, model: &WeightModel, rng: &mut Rng) -> Vec<u16> {
    (0..count).map(|_| model.sample_level(rng)).collect()
}

fn attach_levels(pairs: Vec<(usize, usize)>, model: &WeightModel, rng: &mut Rng) -> Vec<(usize, usize, u16)> {
    let levels = sample_levels(pairs.len(), model, rng);
    pairs.into_iter().zip(levels).map(|((i, j), l)| (i, j, l)).collect()
}

/// Path `0 - 1 - ... - (n-1)` with i.i.d. weights.
pub fn generate_line(n: usize, model: &WeightModel, seed: u64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("a line needs n >= 2, got {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let edges = attach_levels((0..n - 1).map(|i| (i, i + 1)).collect(), model, &mut rng);
    Ok(WeightedGraph::build(n, edges, model.values().to_vec()))
}

/// `side x side` lattice, node id `row * side + col`. Edges are emitted row by
/// row, each node contributing its right edge then its down edge.
pub fn generate_grid2d(side: usize, model: &WeightModel, seed: u64) -> Result<WeightedGraph> {
    if side < 2 {
        return Err(Error::InvalidSize(format!("a grid needs side >= 2, got {side}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut pairs = Vec::with_capacity(2 * side * (side - 1));
    for r in 0..side {
        for c in 0..side {
            let id = r * side + c;
            if c + 1 < side {
                pairs.push((id, id + 1));
            }
            if r + 1 < side {
                pairs.push((id, id + side));
            }
        }
    }
    let edges = attach_levels(pairs, model, &mut rng);
    Ok(WeightedGraph::build(side * side, edges, model.values().to_vec()))
}

/// Erdős–Rényi `G(n, p)` by geometric skipping over the pairs `(w, v)`,
/// `w < v`, in lexicographic order of `(v, w)`.
pub fn generate_gnp(n: usize, p: f64, model: &WeightModel, seed: u64) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("G(n, p) needs n >= 2, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("edge probability must be in (0, 1], got {p}")));
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidSize(format!("n = {n} exceeds the node id range")));
    }
    let mut rng = rng_from_seed(seed);
    let mut pairs = Vec::with_capacity((p * (n as f64) * (n as f64 - 1.0) / 2.0 * 1.05) as usize + 16);
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                pairs.push((w, v));
            }
        }
    } else {
        let log_q = (1.0 - p).ln();
        let mut v: usize = 1;
        let mut w: i64 = -1;
        while v < n {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / log_q).floor();
            w += 1 + if skip.is_finite() { skip.min(i64::MAX as f64 / 4.0) as i64 } else { 0 };
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                pairs.push((w as usize, v));
            }
        }
    }
    let edges = attach_levels(pairs, model, &mut rng);
    Ok(WeightedGraph::build(n, edges, model.values().to_vec()))
}

/// Uniform point on a disk of radius `radius` centred at the origin.
pub(crate) fn sample_disk(radius: f64, rng: &mut Rng) -> [f64; 2] {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = std::f64::consts::TAU * rng.random::<f64>();
    [r * theta.cos(), r * theta.sin()]
}

/// Random geometric graph: `n` users uniform on a disk of radius `radius`,
/// linked when closer than `range`.
pub fn generate_geometric(
    n: usize,
    radius: f64,
    range: f64,
    weights: &WeightSource,
    seed: u64,
) -> Result<WeightedGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("a geometric graph needs n >= 2, got {n}")));
    }
    if !(radius > 0.0 && radius.is_finite()) || !(range > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "geometric graph needs R > 0 and L > 0, got R = {radius}, L = {range}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let coords: Vec<[f64; 2]> = (0..n).map(|_| sample_disk(radius, &mut rng)).collect();
    geometric_over(coords, None, range, weights, &mut rng)
}

/// Links points closer than `range` (and on the same floor, when floors are
/// given) and assigns weights from `weights`.
pub(crate) fn geometric_over(
    coords: Vec<[f64; 2]>,
    floors: Option<&[i64]>,
    range: f64,
    weights: &WeightSource,
    rng: &mut Rng,
) -> Result<WeightedGraph> {
    let n = coords.len();
    let mut pairs = if range > 0.0 { pairs_within(&coords, range) } else { Vec::new() };
    if let Some(f) = floors {
        pairs.retain(|&(i, j)| f[i] == f[j]);
    }
    let g = match weights {
        WeightSource::Model { model } => {
            let edges = attach_levels(pairs, model, rng);
            WeightedGraph::build(n, edges, model.values().to_vec())
        }
        WeightSource::Caches { library_size, cache_size } => {
            let caches = sample_caches(n, *library_size, *cache_size, rng)?;
            let support = cache_support(*library_size, *cache_size);
            let edges = pairs
                .into_iter()
                .filter(|&(i, j)| caches[i] != caches[j])
                .map(|(i, j)| {
                    let diff = (caches[i] ^ caches[j]).count_ones() as usize;
                    (i, j, (diff / 2 - 1) as u16)
                })
                .collect();
            WeightedGraph::build(n, edges, support)
        }
    };
    g.with_coords(coords)
}

fn validate_caches(library: usize, cache: usize) -> Result<()> {
    if cache == 0 || cache > library {
        return Err(Error::InvalidParameter(format!(
            "need library size >= cache size >= 1, got library {library}, cache {cache}"
        )));
    }
    if library > 128 {
        return Err(Error::InvalidParameter(format!("library size {library} exceeds 128 files")));
    }
    Ok(())
}

/// Cache sets as bitmasks over the library (file `f` is bit `f - 1`).
fn sample_caches(n: usize, library: usize, cache: usize, rng: &mut Rng) -> Result<Vec<u128>> {
    validate_caches(library, cache)?;
    Ok((0..n)
        .map(|_| sample(rng, library, cache).iter().fold(0u128, |m, f| m | 1 << f))
        .collect())
}

/// Possible symmetric-difference sizes between distinct equal-size caches:
/// `2, 4, ..., 2 min(c, library - c)`.
fn cache_support(library: usize, cache: usize) -> Vec<f64> {
    let top = cache.min(library - cache);
    (1..=top).map(|t| 2.0 * t as f64).collect()
}

/// Distribution of the caching weight between two independent uniform caches,
/// conditioned on the caches differing.
pub fn caching_weight_model(library: usize, cache: usize) -> Result<WeightModel> {
    validate_caches(library, cache)?;
    if cache == library {
        return Err(Error::InvalidParameter("every cache holds the whole library, so no pair differs".into()));
    }
    let binom = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let top = cache.min(library - cache);
    // overlap j = cache - t gives weight 2t
    let raw: Vec<f64> = (1..=top)
        .map(|t| binom(cache, cache - t) * binom(library - cache, t))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = probs[..top - 1].iter().sum();
    probs[top - 1] = 1.0 - head;
    WeightModel::new(cache_support(library, cache), probs)
}

/// Builds the caching graph over location records: random caches, an edge
/// between users closer than `range` (same floor when floors are recorded)
/// whose caches differ. Node ids follow record order.
pub fn ingest_caching_instance(
    records: &[LocationRecord],
    library_size: usize,
    cache_size: usize,
    range: f64,
    seed: u64,
) -> Result<WeightedGraph> {
    validate_caches(library_size, cache_size)?;
    if !(range >= 0.0) {
        return Err(Error::InvalidParameter(format!("range must be >= 0, got {range}")));
    }
    let coords: Vec<[f64; 2]> = records.iter().map(|r| [r.x, r.y]).collect();
    let floors: Option<Vec<i64>> = if records.iter().any(|r| r.floor.is_some()) {
        Some(records.iter().map(|r| r.floor.unwrap_or(0)).collect())
    } else {
        None
    };
    let mut rng = rng_from_seed(seed);
    let weights = WeightSource::Caches { library_size, cache_size };
    geometric_over(coords, floors.as_deref(), range, &weights, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::spatial::dist;

    fn k2() -> WeightModel {
        WeightModel::uniform(vec![1.0, 2.0]).unwrap()
    }

    #[test]
    fn line_shape_and_errors() {
        assert!(matches!(generate_line(1, &k2(), 0), Err(Error::InvalidSize(_))));
        let g = generate_line(2, &k2(), 0).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert!(k2().values().contains(&g.edges()[0].weight));
    }

    #[test]
    fn line_weight_frequencies() {
        let g = generate_line(100_000, &k2(), 42).unwrap();
        let ones = g.edges().iter().filter(|e| e.level == 0).count() as f64;
        assert!((ones / g.num_edges() as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn grid_counts_and_degrees() {
        assert_eq!(generate_grid2d(2, &k2(), 0).unwrap().num_edges(), 4);
        assert_eq!(generate_grid2d(3, &k2(), 0).unwrap().num_edges(), 12);
        let g = generate_grid2d(100, &k2(), 0).unwrap();
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(99 * 100 + 99), 2);
        assert_eq!(g.degree(50 * 100 + 50), 4);
        assert!(g.find_edge(50 * 100 + 50, 51 * 100 + 50).is_some());
        assert!(matches!(generate_grid2d(1, &k2(), 0), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn gnp_complete_and_errors() {
        let g = generate_gnp(30, 1.0, &k2(), 1).unwrap();
        assert_eq!(g.num_edges(), 30 * 29 / 2);
        assert!(matches!(generate_gnp(30, 0.0, &k2(), 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_gnp(30, 1.5, &k2(), 1), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn gnp_mean_degree() {
        let n = 10_000;
        let mean: f64 = (0..20)
            .map(|s| generate_gnp(n, 0.5 / n as f64, &k2(), s).unwrap().mean_degree())
            .sum::<f64>()
            / 20.0;
        assert!((mean - 0.5 * (n - 1) as f64 / n as f64).abs() < 0.02, "{mean}");
    }

    #[test]
    fn gnp_pair_frequencies_are_uniform() {
        // every pair of a 6-node graph should appear with probability p
        let (n, p, trials) = (6, 0.3, 20_000);
        let mut counts = vec![0usize; n * n];
        for s in 0..trials {
            for e in generate_gnp(n, p, &k2(), s).unwrap().edges() {
                counts[e.u as usize * n + e.v as usize] += 1;
            }
        }
        for v in 1..n {
            for w in 0..v {
                let f = counts[w * n + v] as f64 / trials as f64;
                assert!((f - p).abs() < 0.015, "pair ({w},{v}) freq {f}");
            }
        }
    }

    #[test]
    fn sparse_gnp_is_mostly_acyclic() {
        let g = generate_gnp(10_000, 0.5 / 10_000.0, &k2(), 9).unwrap();
        assert!(g.cyclic_component_fraction() < 0.01);
    }

    #[test]
    fn geometric_limits() {
        let src: WeightSource = k2().into();
        let g = generate_geometric(40, 10.0, 20.0, &src, 3).unwrap();
        assert_eq!(g.num_edges(), 40 * 39 / 2);
        let g = generate_geometric(40, 10.0, 1e-9, &src, 3).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(generate_geometric(40, 0.0, 1.0, &src, 3).is_err());
        assert!(generate_geometric(40, 1.0, 0.0, &src, 3).is_err());
    }

    #[test]
    fn geometric_edges_recompute_from_coords() {
        let g = generate_geometric(500, 100.0, 12.0, &k2().into(), 8).unwrap();
        let c = g.coords().unwrap();
        let mut expected = 0;
        for i in 0..g.n() {
            for j in i + 1..g.n() {
                let close = dist(&c[i], &c[j]) < 12.0;
                expected += close as usize;
                assert_eq!(close, g.find_edge(i, j).is_some());
            }
        }
        assert_eq!(expected, g.num_edges());
    }

    /// `(n - 1) P(|X - Y| < l)` for X, Y uniform on the disk, by numeric
    /// integration of the lens area over `|X|`.
    fn mean_degree_oracle(n: usize, r: f64, l: f64) -> f64 {
        // P(|X-Y| < l) = E_X[ area(B(X, l) ∩ D) ] / (π r²); integrate over |X| = s
        let lens = |s: f64| -> f64 {
            // intersection area of circles radius r (centre 0) and l (centre at distance s)
            if s + l <= r {
                return std::f64::consts::PI * l * l;
            }
            if s >= r + l {
                return 0.0;
            }
            let a = ((s * s + l * l - r * r) / (2.0 * s * l)).clamp(-1.0, 1.0).acos();
            let b = ((s * s + r * r - l * l) / (2.0 * s * r)).clamp(-1.0, 1.0).acos();
            l * l * a + r * r * b - 0.5 * ((-s + l + r) * (s + l - r) * (s - l + r) * (s + l + r)).max(0.0).sqrt()
        };
        let steps = 20_000;
        let h = r / steps as f64;
        let mut acc = 0.0;
        for k in 0..steps {
            let s = (k as f64 + 0.5) * h;
            acc += lens(s) * 2.0 * s * h / (r * r);
        }
        (n - 1) as f64 * acc / (std::f64::consts::PI * r * r)
    }

    #[test]
    fn geometric_mean_degree_matches_integration() {
        let (n, r, l) = (10_000, 1000.0, 100.0);
        let oracle = mean_degree_oracle(n, r, l);
        let sim: f64 = (0..5)
            .map(|s| generate_geometric(n, r, l, &k2().into(), s).unwrap().mean_degree())
            .sum::<f64>()
            / 5.0;
        assert!((sim - oracle).abs() / oracle < 0.01, "sim {sim} oracle {oracle}");
    }

    fn recs(points: &[(f64, f64)]) -> Vec<LocationRecord> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| LocationRecord { user_id: i.to_string(), x, y, floor: None })
            .collect()
    }

    #[test]
    fn caching_weights_are_even_and_bounded() {
        let locs = synthetic_locations(300, 3, 4);
        let g = ingest_caching_instance(&locs, 10, 3, 15.0, 4).unwrap();
        assert_eq!(g.support(), &[2.0, 4.0, 6.0]);
        assert!(g.num_edges() > 0);
        let f = locs.iter().map(|r| r.floor).collect::<Vec<_>>();
        assert!(g.edges().iter().all(|e| f[e.u as usize] == f[e.v as usize]));
    }

    #[test]
    fn identical_caches_never_link() {
        // library == cache forces identical caches
        let g = ingest_caching_instance(&recs(&[(0.0, 0.0), (1.0, 0.0)]), 3, 3, 5.0, 0).unwrap();
        assert_eq!(g.num_edges(), 0);
        // zero range links nobody
        let g = ingest_caching_instance(&recs(&[(0.0, 0.0), (1.0, 0.0)]), 10, 3, 0.0, 0).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(ingest_caching_instance(&recs(&[(0.0, 0.0)]), 2, 3, 1.0, 0).is_err());
    }

    #[test]
    fn disjoint_caches_weigh_six() {
        let (a, b): (u128, u128) = (0b111, 0b111000);
        assert_eq!((a ^ b).count_ones(), 6);
    }

    #[test]
    fn caching_model_matches_enumeration() {
        let m = caching_weight_model(10, 3).unwrap();
        assert_eq!(m.values(), &[2.0, 4.0, 6.0]);
        // C(3,2)C(7,1) = 21, C(3,1)C(7,2) = 63, C(3,0)C(7,3) = 35
        for (p, c) in m.probs().iter().zip([21.0, 63.0, 35.0]) {
            assert!((p - c / 119.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_are_deterministic() {
        let spec = GeneratorSpec {
            family: Family::Gnp { n: 500, p: 0.01 },
            weights: k2().into(),
            seed: 77,
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let spec = GeneratorSpec {
            family: Family::Caching { locations: None, users: 120, range: 10.0 },
            weights: WeightSource::Caches { library_size: 10, cache_size: 3 },
            seed: 5,
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn spec_serialises_flat() {
        let spec = GeneratorSpec {
            family: Family::Grid2d { side: 4 },
            weights: k2().into(),
            seed: 1,
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains(r#""family":"grid2d""#), "{text}");
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}
