//! Charge groups, the map from gauge charges to stabilizer charges, string
//! statistics and canonical generators.
//!
//! Charges are read off global constraints on a small torus: each basis constraint
//! contains every copy of a generator class or none, so a recipe's charge is its
//! membership pattern across the echelonized basis. Charges are stored as bitmasks
//! over that basis.

pub mod canonical;
pub mod framework;
pub mod strings;

use serde::{Deserialize, Serialize};

use crate::code::{CodeDefinition, GeneratorRecipe};
use crate::exec::{map_indices, Execution};
use crate::gf2::{BitMatrix, BitVector};
use crate::group::constraint_space;
use crate::lattice::{generator_matrix, place_all, Generator, LatticePauli, TorusLattice};
use crate::Error;

pub use canonical::{compose_characteristics, CanonicalGenerators, Characteristic};
use strings::{Axis, StringKit};

/// A charge as a bitmask over the constraint basis.
pub type Charge = u64;

/// Largest charge-group dimension for which every charge gets its own strings.
pub const MAX_CHARGE_DIM: usize = 12;

/// +1 or -1.
pub type Sign = i8;

pub fn sign(anticommute: bool) -> Sign {
    if anticommute {
        -1
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Stabilizer,
    Gauge,
}

/// Charges of a generator set, with the torus evidence they were read from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeGroup {
    pub kind: GroupKind,
    pub dim: usize,
    /// Charge carried by each recipe of the (coarse-grained) code.
    pub recipe_charges: Vec<Charge>,
    /// Torus sides, in sites, at which constraints were counted.
    pub sizes: [usize; 2],
    pub constraint_dims: [usize; 2],
}

impl ChargeGroup {
    pub fn order(&self) -> u64 {
        1u64 << self.dim
    }

    /// Every charge, as its bitmask.
    pub fn charges(&self) -> impl Iterator<Item = Charge> {
        0..self.order()
    }
}

/// Why a level could not host charges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LevelRejection {
    UnstableDimension { sizes: [usize; 2], dims: [usize; 2] },
    NotTranslationInvariant,
}

/// Global constraints of `recipes` on an `n x n` torus: the dimension and, when every
/// basis constraint is translation invariant, the per-recipe charges.
fn constraints_at(recipes: &[GeneratorRecipe], q: usize, n: usize) -> (usize, Option<Vec<Charge>>) {
    if recipes.is_empty() {
        return (0, Some(Vec::new()));
    }
    let lat = TorusLattice::new(n, n, q);
    let gens = place_all(&lat, recipes);
    let space = constraint_space(&generator_matrix(&lat, &gens));
    let dim = space.dim();
    let ns = lat.n_sites();
    let mut charges = vec![0 as Charge; recipes.len()];
    for (k, row) in space.basis.rows().iter().enumerate() {
        for (r, charge) in charges.iter_mut().enumerate() {
            let first = row.get(r * ns);
            if (1..ns).any(|s| row.get(r * ns + s) != first) {
                return (dim, None);
            }
            if first {
                *charge |= 1 << k;
            }
        }
    }
    (dim, Some(charges))
}

/// Charge group of `recipes`, counted at two torus sizes. Fails if the dimension
/// depends on size or if some constraint is not translation invariant.
pub fn charge_group(
    kind: GroupKind,
    recipes: &[GeneratorRecipe],
    qubits_per_site: usize,
    sizes: [usize; 2],
) -> Result<ChargeGroup, LevelRejection> {
    let (d0, c0) = constraints_at(recipes, qubits_per_site, sizes[0]);
    let (d1, c1) = constraints_at(recipes, qubits_per_site, sizes[1]);
    if d0 != d1 {
        return Err(LevelRejection::UnstableDimension { sizes, dims: [d0, d1] });
    }
    match (c0, c1) {
        (Some(a), Some(b)) if a == b => {
            Ok(ChargeGroup { kind, dim: d0, recipe_charges: a, sizes, constraint_dims: [d0, d1] })
        }
        _ => Err(LevelRejection::NotTranslationInvariant),
    }
}

/// A generator instance relative to the origin: (recipe, dx, dy).
pub type Placement = (usize, i64, i64);

/// Expresses each stabilizer recipe, placed at the origin, as a product of nearby
/// gauge generators. For subspace codes every stabilizer is its own decomposition.
/// Failure means the stabilizer is not inside the gauge group.
pub fn decompose_stabilizers(code: &CodeDefinition, exec: Execution) -> Result<Vec<Vec<Placement>>, Error> {
    if !code.is_subsystem() {
        return Ok((0..code.stabilizer_recipes.len()).map(|s| vec![(s, 0, 0)]).collect());
    }
    let stabs = &code.stabilizer_recipes;
    if stabs.is_empty() {
        return Ok(Vec::new());
    }
    let gauge = code.charge_recipes();
    let reach = code.reach().max(1) as i64;
    let q = code.qubits_per_site;
    let mut missing = Vec::new();
    for rad in [reach, 2 * reach, 2 * reach + 2] {
        let side = (2 * (rad + reach) + 3) as usize;
        let lat = TorusLattice::new(side, side, q);
        let mut unknowns: Vec<(Placement, Generator)> = Vec::new();
        for (g, rec) in gauge.iter().enumerate() {
            for dx in -rad..=rad {
                for dy in -rad..=rad {
                    unknowns.push(((g, dx, dy), Generator::place(&lat, g, rec, lat.wrap(dx, dy))));
                }
            }
        }
        let n = lat.n_qubits();
        let mut touched = BitVector::zeros(2 * n);
        for (_, gen) in &unknowns {
            for &(i, x, z) in &gen.support {
                if x {
                    touched.set(i, true);
                }
                if z {
                    touched.set(n + i, true);
                }
            }
        }
        let row_of: Vec<Option<usize>> = {
            let mut next = 0;
            (0..2 * n)
                .map(|b| {
                    touched.get(b).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let n_rows = touched.count_ones();
        let mut cols = Vec::with_capacity(unknowns.len());
        for (_, gen) in &unknowns {
            let mut col = BitVector::zeros(n_rows);
            for &(i, x, z) in &gen.support {
                if x {
                    col.set(row_of[i].expect("touched"), true);
                }
                if z {
                    col.set(row_of[n + i].expect("touched"), true);
                }
            }
            cols.push(col);
        }
        let a = BitMatrix::from_rows(cols, n_rows)?.transpose();
        let mut rhs = Vec::with_capacity(stabs.len());
        let mut reachable = true;
        for (s, rec) in stabs.iter().enumerate() {
            let p = Generator::place(&lat, s, rec, (0, 0));
            let mut b = BitVector::zeros(n_rows);
            for &(i, x, z) in &p.support {
                for (bit, on) in [(i, x), (n + i, z)] {
                    if on {
                        match row_of[bit] {
                            Some(r) => b.set(r, true),
                            None => reachable = false,
                        }
                    }
                }
            }
            rhs.push(b);
        }
        if !reachable {
            continue;
        }
        let (sols, _) = a.solve_many_with_kernel(&rhs, exec)?;
        missing.clear();
        let mut out = Vec::with_capacity(stabs.len());
        for (s, sol) in sols.into_iter().enumerate() {
            match sol {
                Some(v) => out.push(v.iter_ones().map(|j| unknowns[j].0).collect()),
                None => missing.push(stabs[s].label.clone()),
            }
        }
        if missing.is_empty() {
            return Ok(out);
        }
    }
    Err(Error::Structural(format!(
        "stabilizer generators not expressible through nearby gauge generators: {}",
        if missing.is_empty() { "support out of reach".to_string() } else { missing.join(", ") }
    )))
}

/// XOR of `images[i]` over the set bits `i` of `c`.
pub fn apply_linear(images: &[Charge], c: Charge) -> Charge {
    images.iter().enumerate().filter(|(i, _)| (c >> i) & 1 == 1).fold(0, |acc, (_, &v)| acc ^ v)
}

/// The gauge-to-stabilizer charge map, as images of the unit gauge charges.
///
/// Restricting the morphism that flips gauge recipe `g` at the origin to the
/// stabilizers flips stabilizer `s` once per copy of `g` in its decomposition, so
/// the image of `g`'s charge is the sum of `charge(s)` over those copies.
pub fn iota_map(
    stab: &ChargeGroup,
    gauge: &ChargeGroup,
    decompositions: &[Vec<Placement>],
) -> Result<Vec<Charge>, Error> {
    let mut per_recipe = vec![0 as Charge; gauge.recipe_charges.len()];
    for (s, dec) in decompositions.iter().enumerate() {
        for &(g, _, _) in dec {
            per_recipe[g] ^= stab.recipe_charges[s];
        }
    }
    // Solve for the linear map one output bit at a time.
    let mut x = BitMatrix::new(gauge.dim);
    for &c in &gauge.recipe_charges {
        x.push_row(BitVector::from_u64(c, gauge.dim))?;
    }
    let mut images = vec![0 as Charge; gauge.dim];
    for j in 0..stab.dim {
        let b = BitVector::from_bools(&per_recipe.iter().map(|v| (v >> j) & 1 == 1).collect::<Vec<_>>());
        let Some((m, _)) = x.solve(&b)? else {
            return Err(Error::Structural("restriction to the stabilizer is not linear in the gauge charge".into()));
        };
        for i in m.iter_ones() {
            images[i] |= 1 << j;
        }
    }
    Ok(images)
}

/// Hop kits for the gauge and stabilizer charge groups at one step.
#[derive(Clone, Debug)]
pub struct Kits {
    pub gauge: StringKit,
    pub stab: StringKit,
}

/// Solves hops for the given charges, escalating the band radius up to `r_max`.
#[allow(clippy::too_many_arguments)]
pub fn solve_kit(
    recipes: &[GeneratorRecipe],
    recipe_charges: &[Charge],
    dim: usize,
    q: usize,
    charges: &[Charge],
    step: usize,
    r_min: usize,
    r_max: usize,
    exec: Execution,
) -> Option<StringKit> {
    (r_min..=r_max).find_map(|r| StringKit::solve(recipes, recipe_charges, dim, q, charges, step, r, exec))
}

/// Geometry shared by the statistics evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Geometry {
    /// Leg length, a multiple of the hop step.
    pub leg: usize,
    /// Torus side on which strings are laid out.
    pub side: usize,
}

impl Geometry {
    pub fn for_kit(r: usize, reach: usize, step: usize, extra: usize) -> Geometry {
        let mut leg = (2 * r + reach + 3).max(3) + extra;
        leg = leg.div_ceil(2) * 2;
        leg = leg.div_ceil(step) * step;
        Geometry { leg, side: 2 * (leg + r + 2 * reach) + 8 }
    }
}

/// The four legs from a shared endpoint at the origin: left, right, down, up.
fn legs(kit: &StringKit, lat: TorusLattice, c: Charge, a: usize) -> [LatticePauli; 4] {
    let hops = a / kit.step;
    let a = a as i64;
    [
        kit.line(lat, c, (-a, 0), Axis::X, hops),
        kit.line(lat, c, (0, 0), Axis::X, hops),
        kit.line(lat, c, (0, -a), Axis::Y, hops),
        kit.line(lat, c, (0, 0), Axis::Y, hops),
    ]
}

/// Topological spin from three strings with a shared endpoint, evaluated for all
/// four triples of legs. `None` if the triples disagree.
pub fn spin(kit: &StringKit, lat: TorusLattice, c: Charge, a: usize) -> Option<Sign> {
    let l = legs(kit, lat, c, a);
    let f =
        |p: usize, q: usize, r: usize| l[p].anticommutes(&l[q]) ^ l[p].anticommutes(&l[r]) ^ l[q].anticommutes(&l[r]);
    let vals = [f(0, 1, 2), f(0, 1, 3), f(0, 2, 3), f(1, 2, 3)];
    vals.iter().all(|&v| v == vals[0]).then(|| sign(vals[0]))
}

/// Horizontal string of `c` through the origin, covering `[-a, a]`.
pub fn crossing_h(kit: &StringKit, lat: TorusLattice, c: Charge, a: usize) -> LatticePauli {
    kit.line(lat, c, (-(a as i64), 0), Axis::X, 2 * a / kit.step)
}

/// Vertical string of `c` through the origin, covering `[-a, a]`.
pub fn crossing_v(kit: &StringKit, lat: TorusLattice, c: Charge, a: usize) -> LatticePauli {
    kit.line(lat, c, (0, -(a as i64)), Axis::Y, 2 * a / kit.step)
}

/// Spin, mutual and mixed statistics over every charge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatTables {
    /// Spin of each gauge charge, indexed by its bitmask.
    pub theta: Vec<Sign>,
    /// Mutual statistics of gauge charges: horizontal first argument, vertical second.
    pub kappa: Vec<Vec<Sign>>,
    /// Gauge charge (horizontal) against stabilizer charge (vertical).
    pub kappa_mixed: Vec<Vec<Sign>>,
}

impl StatTables {
    pub fn theta(&self, c: Charge) -> Sign {
        self.theta[c as usize]
    }
    pub fn kappa(&self, c: Charge, d: Charge) -> Sign {
        self.kappa[c as usize][d as usize]
    }
    pub fn kappa_mixed(&self, c: Charge, s: Charge) -> Sign {
        self.kappa_mixed[c as usize][s as usize]
    }
}

/// Evaluates all tables with one pair of kits.
pub fn stat_tables(
    kits: &Kits,
    gauge_dim: usize,
    stab_dim: usize,
    geom: Geometry,
    q: usize,
    exec: Execution,
) -> Result<StatTables, Error> {
    let lat = TorusLattice::new(geom.side, geom.side, q);
    let ng = 1usize << gauge_dim;
    let ns = 1usize << stab_dim;
    let theta: Vec<Option<Sign>> = map_indices(ng, exec, |c| spin(&kits.gauge, lat, c as Charge, geom.leg));
    let theta = theta
        .into_iter()
        .enumerate()
        .map(|(c, t)| {
            t.ok_or_else(|| Error::ChargeAnalysis(format!("spin of charge {c:#b} depends on the choice of legs")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hs: Vec<LatticePauli> = map_indices(ng, exec, |c| crossing_h(&kits.gauge, lat, c as Charge, geom.leg));
    let vs: Vec<LatticePauli> = map_indices(ng, exec, |c| crossing_v(&kits.gauge, lat, c as Charge, geom.leg));
    let vs_stab: Vec<LatticePauli> = map_indices(ns, exec, |s| crossing_v(&kits.stab, lat, s as Charge, geom.leg));
    let kappa = map_indices(ng, exec, |c| (0..ng).map(|d| sign(hs[c].anticommutes(&vs[d]))).collect());
    let kappa_mixed = map_indices(ng, exec, |c| (0..ns).map(|s| sign(hs[c].anticommutes(&vs_stab[s]))).collect());
    Ok(StatTables { theta, kappa, kappa_mixed })
}

/// A named pass/fail verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

fn first_failure<I: IntoIterator<Item = (Charge, Charge)>>(
    pairs: I,
    ok: impl Fn(Charge, Charge) -> bool,
) -> Option<(Charge, Charge)> {
    pairs.into_iter().find(|&(a, b)| !ok(a, b))
}

fn pairs(n: u64, m: u64) -> impl Iterator<Item = (Charge, Charge)> {
    (0..n).flat_map(move |a| (0..m).map(move |b| (a, b)))
}

fn pair_check(name: &str, bad: Option<(Charge, Charge)>) -> Check {
    match bad {
        None => Check::new(name, true, "holds for every pair"),
        Some((a, b)) => Check::new(name, false, format!("fails at ({a:#b}, {b:#b})")),
    }
}

/// Exhaustive checks of the algebraic identities relating spin, mutual statistics
/// and the gauge-to-stabilizer map.
pub fn identity_checks(t: &StatTables, gauge: &ChargeGroup, stab: &ChargeGroup, iota: &[Charge]) -> Vec<Check> {
    let ng = gauge.order();
    let ns = stab.order();
    let mut out = Vec::new();
    out.push(Check::new(
        "charge groups have equal order",
        gauge.dim == stab.dim,
        format!("gauge 2^{}, stabilizer 2^{}", gauge.dim, stab.dim),
    ));
    out.push(Check::new("trivial charge is a boson", t.theta(0) == 1, format!("theta(1) = {}", t.theta(0))));
    out.push(pair_check(
        "spin of products",
        first_failure(pairs(ng, ng), |a, b| t.theta(a ^ b) == t.theta(a) * t.theta(b) * t.kappa(a, b)),
    ));
    out.push(pair_check(
        "mutual statistics symmetric",
        first_failure(pairs(ng, ng), |a, b| t.kappa(a, b) == t.kappa(b, a)),
    ));
    out.push(pair_check(
        "mutual statistics bilinear",
        first_failure(pairs(ng, ng), |a, b| (0..ng).all(|d| t.kappa(a ^ b, d) == t.kappa(a, d) * t.kappa(b, d))),
    ));
    out.push(pair_check(
        "mixed statistics bilinear",
        first_failure(pairs(ng, ng), |a, b| {
            (0..ns).all(|s| t.kappa_mixed(a ^ b, s) == t.kappa_mixed(a, s) * t.kappa_mixed(b, s))
        })
        .or_else(|| {
            first_failure(pairs(ns, ns), |s, u| {
                (0..ng).all(|c| t.kappa_mixed(c, s ^ u) == t.kappa_mixed(c, s) * t.kappa_mixed(c, u))
            })
        }),
    ));
    out.push(pair_check("self statistics trivial", first_failure((0..ng).map(|c| (c, c)), |a, b| t.kappa(a, b) == 1)));
    out.push(pair_check(
        "statistics with trivial charge",
        first_failure((0..ng).map(|c| (c, 0)), |a, b| {
            t.kappa(a, b) == 1 && t.kappa(b, a) == 1 && t.kappa_mixed(a, 0) == 1
        }),
    ));
    out.push(pair_check(
        "mutual statistics through the stabilizer image",
        first_failure(pairs(ng, ng), |a, b| t.kappa(a, b) == t.kappa_mixed(a, apply_linear(iota, b))),
    ));
    out.push(pair_check(
        "kernel charges are exactly the transparent ones",
        first_failure((0..ng).map(|c| (c, 0)), |c, _| {
            (apply_linear(iota, c) == 0) == (0..ng).all(|d| t.kappa(c, d) == 1)
        }),
    ));
    out
}

/// Analysis settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeConfig {
    /// Largest coarse-graining level tried.
    pub coarse_max: usize,
    /// Largest band radius for string solves.
    pub r_max: usize,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for ChargeConfig {
    fn default() -> Self {
        ChargeConfig { coarse_max: 4, r_max: 4, exec: Execution::default() }
    }
}

/// Everything the charge stage computes.
#[derive(Clone, Debug)]
pub struct ChargeAnalysis {
    /// Coarse-graining level over the normalized code.
    pub level: usize,
    /// The code at that level.
    pub code: CodeDefinition,
    pub stabilizer: ChargeGroup,
    pub gauge: ChargeGroup,
    pub decompositions: Vec<Vec<Placement>>,
    /// Images of the unit gauge charges in the stabilizer charge group.
    pub iota: Vec<Charge>,
    pub kits: Kits,
    pub geometry: Geometry,
    pub tables: StatTables,
    /// Tables recomputed with step-2 hops and longer legs.
    pub alt_tables: StatTables,
    pub identities: Vec<Check>,
    pub canonical: CanonicalGenerators,
    pub characteristic: Characteristic,
    pub canonical_checks: Vec<Check>,
    /// Levels skipped on the way, with the reason.
    pub rejected_levels: Vec<(usize, String)>,
}

impl ChargeAnalysis {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.identities.iter().chain(&self.canonical_checks)
    }

    pub fn iota(&self, c: Charge) -> Charge {
        apply_linear(&self.iota, c)
    }

    pub fn radius(&self) -> usize {
        self.kits.gauge.r.max(self.kits.stab.r)
    }
}

fn all_kits(
    code: &CodeDefinition,
    stab: &ChargeGroup,
    gauge: &ChargeGroup,
    step: usize,
    r_min: usize,
    cfg: &ChargeConfig,
) -> Option<Kits> {
    let q = code.qubits_per_site;
    let gauge_charges: Vec<Charge> = gauge.charges().collect();
    let gk = solve_kit(
        code.charge_recipes(),
        &gauge.recipe_charges,
        gauge.dim,
        q,
        &gauge_charges,
        step,
        r_min,
        cfg.r_max,
        cfg.exec,
    )?;
    let sk = if code.is_subsystem() {
        let stab_charges: Vec<Charge> = stab.charges().collect();
        solve_kit(
            &code.stabilizer_recipes,
            &stab.recipe_charges,
            stab.dim,
            q,
            &stab_charges,
            step,
            r_min,
            cfg.r_max,
            cfg.exec,
        )?
    } else {
        gk.clone()
    };
    Some(Kits { gauge: gk, stab: sk })
}

/// Runs the charge stage on a normalized code: finds a coarse-graining level with
/// stable, translation-invariant charges and local strings, then evaluates
/// statistics and canonical generators.
pub fn analyze_charges(code: &CodeDefinition, cfg: &ChargeConfig) -> Result<ChargeAnalysis, Error> {
    let mut rejected = Vec::new();
    for level in 1..=cfg.coarse_max.max(1) {
        let coarse = code.coarse_grain(level);
        let q = coarse.qubits_per_site;
        let sizes = [4, 6];
        let groups = charge_group(GroupKind::Stabilizer, &coarse.stabilizer_recipes, q, sizes)
            .and_then(|s| charge_group(GroupKind::Gauge, coarse.charge_recipes(), q, sizes).map(|g| (s, g)));
        let (stab, gauge) = match groups {
            Ok(v) => v,
            Err(LevelRejection::UnstableDimension { sizes, dims }) => {
                rejected.push((
                    level,
                    format!(
                        "constraint dimension {} at side {} but {} at side {}",
                        dims[0], sizes[0], dims[1], sizes[1]
                    ),
                ));
                continue;
            }
            Err(LevelRejection::NotTranslationInvariant) => {
                rejected.push((level, "constraints are not translation invariant".into()));
                continue;
            }
        };
        if gauge.dim > MAX_CHARGE_DIM || stab.dim > MAX_CHARGE_DIM {
            return Err(Error::ChargeAnalysis(format!(
                "charge group of dimension {} exceeds the supported {MAX_CHARGE_DIM}",
                gauge.dim.max(stab.dim)
            )));
        }
        let decompositions = decompose_stabilizers(&coarse, cfg.exec)?;
        let iota = iota_map(&stab, &gauge, &decompositions)?;
        let Some(kits) = all_kits(&coarse, &stab, &gauge, 1, 1, cfg) else {
            rejected.push((level, format!("no local strings up to radius {}", cfg.r_max)));
            continue;
        };
        let r = kits.gauge.r.max(kits.stab.r);
        let Some(alt_kits) = all_kits(&coarse, &stab, &gauge, 2, r, cfg) else {
            rejected.push((level, format!("no two-site hops up to radius {}", cfg.r_max)));
            continue;
        };
        let reach = coarse.reach();
        let geometry = Geometry::for_kit(r, reach, 1, 0);
        let tables = stat_tables(&kits, gauge.dim, stab.dim, geometry, q, cfg.exec)?;
        let r_alt = alt_kits.gauge.r.max(alt_kits.stab.r);
        let alt_geometry = Geometry::for_kit(r_alt, reach, 2, 2);
        let alt_tables = stat_tables(&alt_kits, gauge.dim, stab.dim, alt_geometry, q, cfg.exec)?;
        let mut identities = identity_checks(&tables, &gauge, &stab, &iota);
        identities.push(Check::new(
            "statistics independent of string geometry",
            tables == alt_tables,
            format!("legs {} with unit hops against legs {} with two-site hops", geometry.leg, alt_geometry.leg),
        ));
        let canonical = canonical::canonical_generators(&tables, &gauge, &stab, &iota)?;
        let characteristic = canonical.characteristic();
        let mut canonical_checks = vec![canonical::boson_count_check(&tables, &gauge, &characteristic)];
        canonical_checks.extend(canonical::verify_canonical(&coarse, &canonical, &stab, &gauge, &iota, r, cfg)?);
        return Ok(ChargeAnalysis {
            level,
            code: coarse,
            stabilizer: stab,
            gauge,
            decompositions,
            iota,
            kits,
            geometry,
            tables,
            alt_tables,
            identities,
            canonical,
            characteristic,
            canonical_checks,
            rejected_levels: rejected,
        });
    }
    let reasons: Vec<String> = rejected.iter().map(|(l, r)| format!("level {l}: {r}")).collect();
    Err(Error::ChargeAnalysis(format!(
        "no coarse-graining level up to {} supports charges ({})",
        cfg.coarse_max,
        reasons.join("; ")
    )))
}
