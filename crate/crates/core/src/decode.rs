//! Code-capacity decoding: i.i.d. Pauli noise, stabilizer syndromes split by charge,
//! greedy matching per charge class and Monte Carlo failure rates.
//!
//! Defects are grouped by the basis charges of the stabilizer charge group. Each
//! class is matched greedily and matched pairs are joined by hop strings of that
//! charge. Whatever charge-neutral residue is left at a site is cancelled by a local
//! Pauli.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charge::strings::{solve_band, Axis, Morphism, StringKit};
use crate::charge::{Charge, ChargeAnalysis};
use crate::code::{CodeDefinition, Letter, PauliTerm};
use crate::exec::{map_indices, Execution};
use crate::gf2::BitVector;
use crate::lattice::{place_all, syndrome, Generator, LatticePauli, TorusLattice};
use crate::torus::{extract_cycles, extract_logicals, min_torus_size, LogicalOperatorSet};
use crate::Error;

/// Identifier of the random generator and how per-trial streams are derived.
pub const RNG_ALGORITHM: &str = "chacha8 seed_from_u64(seed) stream=trial";

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959964;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    /// X and Z bits flip independently with probability `p`.
    IndependentXz,
    /// X, Y or Z with probability `p/3` each.
    Depolarizing,
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "independent-xz" | "xz" => Ok(NoiseKind::IndependentXz),
            "depolarizing" => Ok(NoiseKind::Depolarizing),
            other => Err(Error::Config(format!("unknown noise model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub p: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, p: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("error probability {p} outside [0, 1]")));
        }
        Ok(NoiseModel { kind, p })
    }
}

pub fn sample_error<R: Rng>(noise: &NoiseModel, lat: TorusLattice, rng: &mut R) -> LatticePauli {
    let mut e = LatticePauli::identity(lat);
    for i in 0..lat.n_qubits() {
        match noise.kind {
            NoiseKind::IndependentXz => {
                if rng.random_bool(noise.p) {
                    e.vec.x.flip(i);
                }
                if rng.random_bool(noise.p) {
                    e.vec.z.flip(i);
                }
            }
            NoiseKind::Depolarizing => {
                if rng.random_bool(noise.p) {
                    let letter = [Letter::X, Letter::Y, Letter::Z][rng.random_range(0..3)];
                    e.apply_letter(i, letter);
                }
            }
        }
    }
    e
}

/// Flipped stabilizer generators, plus the sites carrying each basis charge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyndromeSample {
    /// Bit `recipe·n_sites + site` set iff that generator anticommutes with the error.
    pub bits: BitVector,
    /// `classes[b]`: sites whose total charge has bit `b` set, ascending.
    pub classes: Vec<Vec<(usize, usize)>>,
}

impl SyndromeSample {
    pub fn is_empty(&self) -> bool {
        self.bits.is_zero()
    }
}

pub fn extract_syndrome(
    error: &LatticePauli,
    gens: &[Generator],
    recipe_charges: &[Charge],
    dim: usize,
) -> SyndromeSample {
    let bits = syndrome(gens, error);
    let mut site_charge: BTreeMap<(usize, usize), Charge> = BTreeMap::new();
    for i in bits.iter_ones() {
        let g = &gens[i];
        *site_charge.entry(g.site).or_default() ^= recipe_charges[g.recipe];
    }
    let mut classes = vec![Vec::new(); dim];
    for (site, c) in site_charge {
        for (b, class) in classes.iter_mut().enumerate() {
            if c >> b & 1 == 1 {
                class.push(site);
            }
        }
    }
    SyndromeSample { bits, classes }
}

/// Greedy matching: all pairs sorted by torus distance, then by the sites
/// themselves, taken while both ends are free.
pub fn greedy_matching(lat: &TorusLattice, sites: &[(usize, usize)]) -> Vec<((usize, usize), (usize, usize))> {
    let mut pairs = Vec::with_capacity(sites.len() * sites.len().saturating_sub(1) / 2);
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            pairs.push((lat.torus_distance(sites[i], sites[j]), sites[i].min(sites[j]), sites[i].max(sites[j]), i, j));
        }
    }
    pairs.sort_unstable();
    let mut used = vec![false; sites.len()];
    let mut out = Vec::with_capacity(sites.len() / 2);
    for (_, a, b, i, j) in pairs {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            out.push((a, b));
        }
    }
    out
}

/// Everything needed to decode on one torus.
pub struct Decoder {
    pub lattice: TorusLattice,
    pub gens: Vec<Generator>,
    pub logicals: LogicalOperatorSet,
    code: CodeDefinition,
    kit: StringKit,
    recipe_charges: Vec<Charge>,
    dim: usize,
    fix_radius: usize,
    fixes: Mutex<BTreeMap<BTreeSet<usize>, Option<Vec<PauliTerm>>>>,
}

impl Decoder {
    /// Decoder on a torus of `size × size` normalized sites.
    pub fn new(a: &ChargeAnalysis, normalized: &CodeDefinition, size: usize) -> Result<Decoder, Error> {
        let (m, _) = min_torus_size(normalized, a.level);
        if size < m || !size.is_multiple_of(a.level) {
            return Err(Error::TorusTooSmall {
                lx: size,
                ly: size,
                reason: format!("decoding needs at least {m} sites per axis in multiples of {}", a.level),
            });
        }
        if a.kits.stab.step != 1 {
            return Err(Error::Config("decoding needs single-site stabilizer hops".into()));
        }
        let code = a.code.clone();
        let lattice = TorusLattice::new(size / a.level, size / a.level, code.qubits_per_site);
        let cycles = extract_cycles(a, lattice)?;
        Ok(Decoder {
            lattice,
            gens: place_all(&lattice, &code.stabilizer_recipes),
            logicals: extract_logicals(&cycles),
            kit: a.kits.stab.clone(),
            recipe_charges: a.stabilizer.recipe_charges.clone(),
            dim: a.stabilizer.dim,
            fix_radius: a.radius() + code.reach() + 1,
            code,
            fixes: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn syndrome_of(&self, error: &LatticePauli) -> SyndromeSample {
        extract_syndrome(error, &self.gens, &self.recipe_charges, self.dim)
    }

    /// Joins `a` and `b` with a string of charge `c`: along the row of `a`, then the
    /// column of `b`, each the short way round.
    fn connect(&self, p: &mut LatticePauli, c: Charge, a: (usize, usize), b: (usize, usize)) {
        let lat = self.lattice;
        let leg = |from: usize, to: usize, l: usize| -> (i64, usize) {
            let d = (to + l - from) % l;
            if d > l / 2 {
                (to as i64, l - d)
            } else {
                (from as i64, d)
            }
        };
        let (sx, hx) = leg(a.0, b.0, lat.lx);
        self.kit.apply_line(p, c, (sx, a.1 as i64), Axis::X, hx);
        let (sy, hy) = leg(a.1, b.1, lat.ly);
        self.kit.apply_line(p, c, (b.0 as i64, sy), Axis::Y, hy);
    }

    fn local_fix(&self, recipes: BTreeSet<usize>) -> Result<Vec<PauliTerm>, Error> {
        if let Some(hit) = self.fixes.lock().expect("fix cache").get(&recipes) {
            return hit.clone().ok_or_else(|| self.no_fix(&recipes));
        }
        let target = Morphism::at(&recipes.iter().copied().collect::<Vec<_>>(), (0, 0));
        let sol = solve_band(
            &self.code.stabilizer_recipes,
            self.code.qubits_per_site,
            &[(0, 0)],
            &[target],
            self.fix_radius,
            Execution::Sequential,
        )
        .pop()
        .flatten();
        self.fixes.lock().expect("fix cache").insert(recipes.clone(), sol.clone());
        sol.ok_or_else(|| self.no_fix(&recipes))
    }

    fn no_fix(&self, recipes: &BTreeSet<usize>) -> Error {
        Error::Structural(format!("no local operator flips exactly the neutral defect set {recipes:?}"))
    }

    /// Correction whose syndrome equals the sample's.
    pub fn decode(&self, s: &SyndromeSample) -> Result<LatticePauli, Error> {
        let lat = self.lattice;
        let mut corr = LatticePauli::identity(lat);
        for (b, sites) in s.classes.iter().enumerate() {
            if sites.len() % 2 == 1 {
                return Err(Error::InvalidSyndrome(format!(
                    "odd number ({}) of defects in charge class {b}",
                    sites.len()
                )));
            }
            for (x, y) in greedy_matching(&lat, sites) {
                self.connect(&mut corr, 1 << b, x, y);
            }
        }
        let mut left = syndrome(&self.gens, &corr);
        left.xor_assign(&s.bits);
        if !left.is_zero() {
            let mut per_site: BTreeMap<(usize, usize), BTreeSet<usize>> = BTreeMap::new();
            for i in left.iter_ones() {
                per_site.entry(self.gens[i].site).or_default().insert(self.gens[i].recipe);
            }
            for (site, recipes) in per_site {
                let fix = self.local_fix(recipes)?;
                corr.apply_terms((site.0 as i64, site.1 as i64), &fix);
            }
        }
        if syndrome(&self.gens, &corr) != s.bits {
            return Err(Error::Structural("correction does not reproduce the syndrome".into()));
        }
        Ok(corr)
    }

    /// Per logical qubit: does `error · correction` act on it?
    pub fn logical_failure(&self, error: &LatticePauli, correction: &LatticePauli) -> Result<Vec<bool>, Error> {
        let residual = error.mul(correction);
        if !syndrome(&self.gens, &residual).is_zero() {
            return Err(Error::Structural("residual error has a non-trivial syndrome".into()));
        }
        Ok(self.logicals.flipped(&residual))
    }

    /// One seeded trial.
    pub fn trial(&self, noise: &NoiseModel, seed: u64, index: u64) -> Result<Vec<bool>, Error> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let error = sample_error(noise, self.lattice, &mut rng);
        let s = self.syndrome_of(&error);
        let corr = self.decode(&s)?;
        self.logical_failure(&error, &corr)
    }
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub size: usize,
    pub p: f64,
    pub noise: NoiseKind,
    pub trials: u64,
    /// Trials in which any logical qubit was flipped.
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Failures counted per logical qubit.
    pub failures_per_logical: Vec<u64>,
    pub seed: u64,
    pub rng: String,
    /// Indices of the failed trials.
    #[serde(skip)]
    pub failed_trials: Vec<u64>,
}

#[derive(Clone, Debug)]
pub struct DecodeConfig {
    /// Torus sides in normalized sites.
    pub sizes: Vec<usize>,
    pub noise: NoiseModel,
    pub trials: u64,
    pub seed: u64,
    pub exec: Execution,
}

pub fn monte_carlo(
    a: &ChargeAnalysis,
    normalized: &CodeDefinition,
    cfg: &DecodeConfig,
) -> Result<Vec<TrialStats>, Error> {
    if a.characteristic.alpha == 0 {
        return Err(Error::NoLogicalQubits);
    }
    let mut out = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let dec = Decoder::new(a, normalized, size)?;
        let results = map_indices(cfg.trials as usize, cfg.exec, |t| dec.trial(&cfg.noise, cfg.seed, t as u64));
        let mut per_logical = vec![0u64; dec.logicals.len()];
        let mut failed = Vec::new();
        for (t, r) in results.into_iter().enumerate() {
            let flags = r?;
            for (count, f) in per_logical.iter_mut().zip(&flags) {
                *count += *f as u64;
            }
            if flags.iter().any(|&f| f) {
                failed.push(t as u64);
            }
        }
        let failures = failed.len() as u64;
        let (ci_low, ci_high) = wilson_interval(failures, cfg.trials);
        out.push(TrialStats {
            size,
            p: cfg.noise.p,
            noise: cfg.noise.kind,
            trials: cfg.trials,
            failures,
            rate: if cfg.trials == 0 { 0.0 } else { failures as f64 / cfg.trials as f64 },
            ci_low,
            ci_high,
            failures_per_logical: per_logical,
            seed: cfg.seed,
            rng: RNG_ALGORITHM.into(),
            failed_trials: failed,
        });
    }
    Ok(out)
}
