//! Genetic optimization of S-box populations.
//!
//! Multi-population (island) GA: size-2 tournament selection on the
//! per-bit nonlinearity score, one-point crossover, a deterministic
//! bit-flip repair step that restores bijectivity, digest-based
//! duplicate removal, and elitist merge-and-truncate survival. Islands
//! exchange their best individuals on a ring every few generations.

use crate::metrics;
use crate::sbox::{SBox, SBoxDigest};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvolveError {
    #[error("no candidates left after the fitness filter")]
    EmptyAfterFilter,
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

/// One member of a population.
#[derive(Debug, Clone)]
pub struct Individual {
    pub sbox: SBox,
    /// Per-bit nonlinearity score of `sbox` (see
    /// [`metrics::bit_mean_nonlinearity`]).
    pub fitness: u32,
    pub digest: SBoxDigest,
}

impl Individual {
    pub fn new(sbox: SBox) -> Self {
        let fitness = metrics::bit_mean_nonlinearity(&sbox);
        let digest = sbox.digest();
        Self { sbox, fitness, digest }
    }
}

/// Genetic algorithm parameters.
#[derive(Debug, Clone)]
pub struct GAConfig {
    pub islands: usize,
    pub population_per_island: usize,
    pub generations: usize,
    /// Migrate every this many generations (when more than one island).
    pub migration_interval: usize,
    /// How many of an island's best individuals are copied to its ring
    /// neighbor at each migration.
    pub migration_count: usize,
    /// Inclusive fitness band a candidate must hit to enter the initial
    /// population.
    pub selection_range: (u32, u32),
    /// One-point crossover cut position.
    pub crossover_point: usize,
    pub rng_seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            islands: 4,
            population_per_island: 100,
            generations: 50,
            migration_interval: 10,
            migration_count: 2,
            selection_range: (100, 106),
            crossover_point: 128,
            rng_seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.islands == 0 {
            return Err(EvolveError::BadConfig("islands must be at least 1".into()));
        }
        if self.population_per_island == 0 {
            return Err(EvolveError::BadConfig("population_per_island must be at least 1".into()));
        }
        if self.migration_interval == 0 {
            return Err(EvolveError::BadConfig("migration_interval must be at least 1".into()));
        }
        if !(1..=255).contains(&self.crossover_point) {
            return Err(EvolveError::BadConfig(format!(
                "crossover_point {} out of range 1..=255",
                self.crossover_point
            )));
        }
        if self.selection_range.0 > self.selection_range.1 {
            return Err(EvolveError::BadConfig(format!(
                "selection range ({}, {}) is inverted",
                self.selection_range.0, self.selection_range.1
            )));
        }
        Ok(())
    }
}

/// A set of islands, each a digest-deduplicated collection of individuals
/// kept sorted best-first (fitness descending, digest ascending).
#[derive(Debug, Clone)]
pub struct Population {
    islands: Vec<Vec<Individual>>,
    generation: usize,
}

impl Population {
    pub fn islands(&self) -> &[Vec<Individual>] {
        &self.islands
    }

    pub fn generation(&self) -> usize {
        self.generation
    }

    /// Total individuals across all islands.
    pub fn len(&self) -> usize {
        self.islands.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.islands.iter().all(Vec::is_empty)
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.islands.iter().flatten()
    }

    /// The fittest individual overall.
    pub fn best(&self) -> Option<&Individual> {
        self.individuals().min_by(|a, b| rank(a).cmp(&rank(b)))
    }
}

/// Sort key: better individuals first.
fn rank(ind: &Individual) -> (std::cmp::Reverse<u32>, SBoxDigest) {
    (std::cmp::Reverse(ind.fitness), ind.digest)
}

fn sort_island(island: &mut [Individual]) {
    island.sort_by_key(rank);
}

/// Drops individuals whose digest already occurred earlier in the island.
fn dedup_island(island: &mut Vec<Individual>) {
    let mut seen = std::collections::HashSet::new();
    island.retain(|ind| seen.insert(ind.digest));
}

/// Builds the initial population: candidates scoring inside
/// `cfg.selection_range` are deduplicated by digest and dealt round-robin
/// across the islands.
pub fn seed_population(candidates: &[SBox], cfg: &GAConfig) -> Result<Population, EvolveError> {
    cfg.validate()?;
    let (lo, hi) = cfg.selection_range;
    let mut islands = vec![Vec::new(); cfg.islands];
    let mut seen = std::collections::HashSet::new();
    let mut next = 0usize;
    for sbox in candidates {
        let ind = Individual::new(sbox.clone());
        if ind.fitness < lo || ind.fitness > hi || !seen.insert(ind.digest) {
            continue;
        }
        islands[next].push(ind);
        next = (next + 1) % cfg.islands;
    }
    if islands.iter().all(Vec::is_empty) {
        return Err(EvolveError::EmptyAfterFilter);
    }
    for island in &mut islands {
        sort_island(island);
    }
    Ok(Population { islands, generation: 0 })
}

/// One-point crossover: the children swap tails at `point`.
/// The outputs are raw byte tables and are usually not bijective.
pub fn crossover(a: &SBox, b: &SBox, point: usize) -> ([u8; 256], [u8; 256]) {
    assert!((1..=255).contains(&point), "crossover point out of range");
    let mut raw_a = *a.table();
    let mut raw_b = *b.table();
    raw_a[point..].copy_from_slice(&b.table()[point..]);
    raw_b[point..].copy_from_slice(&a.table()[point..]);
    (raw_a, raw_b)
}

/// Restores bijectivity in place of a mutation operator.
///
/// Scanning left to right, a value that has already been used is replaced
/// by the first single-bit flip of the original value (bit 0 upward) that
/// is still unused; if all eight flips are taken, one is added to the
/// original value (mod 256) repeatedly until an unused value appears.
pub fn repair(raw: &[u8; 256]) -> SBox {
    let mut seen = [false; 256];
    let mut out = [0u8; 256];
    for (i, &orig) in raw.iter().enumerate() {
        let mut v = orig;
        if seen[v as usize] {
            let flip = (0..8).map(|bit| orig ^ (1 << bit)).find(|&f| !seen[f as usize]);
            v = match flip {
                Some(f) => f,
                None => {
                    let mut w = orig.wrapping_add(1);
                    while seen[w as usize] {
                        w = w.wrapping_add(1);
                    }
                    w
                }
            };
        }
        seen[v as usize] = true;
        out[i] = v;
    }
    SBox::from_bytes(&out).expect("repair always yields a permutation")
}

/// Per-generation, per-island progress figures.
#[derive(Debug, Clone, PartialEq)]
pub struct GenRow {
    pub generation: usize,
    pub island: usize,
    pub best: u32,
    pub mean: f64,
    pub population_size: usize,
}

/// Progress log of an [`evolve`] run.
#[derive(Debug, Clone, Default)]
pub struct GenerationLog {
    pub rows: Vec<GenRow>,
}

impl GenerationLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("generation,island,best,mean,population_size\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{:.3},{}\n",
                r.generation, r.island, r.best, r.mean, r.population_size
            ));
        }
        out
    }
}

/// Size-2 tournament on a best-first sorted island: the earlier index wins.
fn tournament(len: usize, rng: &mut ChaCha20Rng) -> usize {
    let i = rng.random_range(0..len);
    let j = rng.random_range(0..len);
    i.min(j)
}

/// Runs the GA for `cfg.generations` generations and returns the evolved
/// population with its log. With a fixed seed the outcome is fully
/// deterministic.
pub fn evolve(mut pop: Population, cfg: &GAConfig) -> Result<(Population, GenerationLog), EvolveError> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.rng_seed);
    let mut log = GenerationLog::default();
    for g in 1..=cfg.generations {
        for (island_idx, island) in pop.islands.iter_mut().enumerate() {
            if !island.is_empty() {
                let mut children = Vec::with_capacity(cfg.population_per_island);
                while children.len() < cfg.population_per_island {
                    let pa = tournament(island.len(), &mut rng);
                    let pb = tournament(island.len(), &mut rng);
                    let (raw_a, raw_b) =
                        crossover(&island[pa].sbox, &island[pb].sbox, cfg.crossover_point);
                    children.push(Individual::new(repair(&raw_a)));
                    if children.len() < cfg.population_per_island {
                        children.push(Individual::new(repair(&raw_b)));
                    }
                }
                island.extend(children);
                dedup_island(island);
                sort_island(island);
                island.truncate(cfg.population_per_island);
            }
            log.rows.push(GenRow {
                generation: g,
                island: island_idx,
                best: island.first().map(|i| i.fitness).unwrap_or(0),
                mean: if island.is_empty() {
                    0.0
                } else {
                    island.iter().map(|i| i.fitness as f64).sum::<f64>() / island.len() as f64
                },
                population_size: island.len(),
            });
        }
        if cfg.islands > 1 && cfg.migration_count > 0 && g % cfg.migration_interval == 0 {
            migrate(&mut pop.islands, cfg);
        }
        pop.generation += 1;
    }
    Ok((pop, log))
}

/// Copies each island's best `migration_count` individuals to the next
/// island on the ring, then re-deduplicates and re-truncates the receivers.
fn migrate(islands: &mut [Vec<Individual>], cfg: &GAConfig) {
    let n = islands.len();
    let migrants: Vec<Vec<Individual>> = islands
        .iter()
        .map(|isl| isl.iter().take(cfg.migration_count).cloned().collect())
        .collect();
    for (i, pack) in migrants.into_iter().enumerate() {
        let target = &mut islands[(i + 1) % n];
        target.extend(pack);
        dedup_island(target);
        sort_island(target);
        target.truncate(cfg.population_per_island);
    }
}

/// Score bands of the fitness histogram.
pub const HISTOGRAM_BANDS: [&str; 5] = ["<=99", "100-102", "103-104", "105-106", "107-108"];

/// Fitness histogram over the five reporting bands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins: [usize; 5],
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.bins.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("band,count\n");
        for (label, count) in HISTOGRAM_BANDS.iter().zip(self.bins) {
            out.push_str(&format!("{label},{count}\n"));
        }
        out
    }
}

/// Bins every individual's fitness: <=99, 100-102, 103-104, 105-106, >=107.
pub fn nl_histogram(pop: &Population) -> Histogram {
    let mut bins = [0usize; 5];
    for ind in pop.individuals() {
        let idx = match ind.fitness {
            0..=99 => 0,
            100..=102 => 1,
            103..=104 => 2,
            105..=106 => 3,
            _ => 4,
        };
        bins[idx] += 1;
    }
    Histogram { bins }
}
