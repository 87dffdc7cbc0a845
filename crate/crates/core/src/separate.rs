//! Separation certificates.
//!
//! Two points are treated as separable exactly when they lie in different
//! orbits, so a set `S` of invariants is separating iff its evaluations at
//! the canonical orbit representatives are pairwise distinct. Everything
//! here works on that table of fingerprints.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::group::{Group, PointTuple};
use crate::invariants::{expand_set, set_tm, set_tm2, InvariantSet};
use crate::invspace::invariant_basis_for;
use crate::orbits::{
    orbit_count_formula, orbit_reps_grammar, same_orbit, CanonicalForm, OrbitType,
};
use crate::poly::Poly;

/// Largest pool accepted by [`min_separating_subset`].
pub const MAX_POOL: usize = 24;

/// Values of an ordered list of invariants at one point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint(pub Vec<Fe>);

impl Serialize for Fingerprint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|x| x.index()))
    }
}

impl Fingerprint {
    fn project(&self, columns: &[usize]) -> Fingerprint {
        Fingerprint(columns.iter().map(|&c| self.0[c]).collect())
    }
}

/// The canonical representatives of all orbits on `V^m`.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    group: Group,
    m: usize,
    reps: Vec<CanonicalForm>,
}

impl OrbitTable {
    pub fn new(field: &Field, m: usize) -> Self {
        let group = Group::new(field);
        let reps = orbit_reps_grammar(&group, m);
        OrbitTable { group, m, reps }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn field(&self) -> &Field {
        self.group.field()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn reps(&self) -> &[CanonicalForm] {
        &self.reps
    }

    pub fn kappa(&self) -> usize {
        self.reps.len()
    }

    /// One fingerprint per representative, in representative order.
    pub fn fingerprints<'a>(&self, polys: impl IntoIterator<Item = &'a Poly>) -> Vec<Fingerprint> {
        let polys: Vec<&Poly> = polys.into_iter().collect();
        self.reps
            .par_iter()
            .map(|r| {
                let coords = r.point.coords();
                Fingerprint(polys.iter().map(|p| p.eval_coords(&coords)).collect())
            })
            .collect()
    }

    fn check_set(&self, set: &InvariantSet) -> Result<()> {
        if set.field() != self.field() {
            return Err(Error::MixedFields);
        }
        if set.m() != self.m {
            return Err(Error::MixedArity {
                expected: self.m,
                found: set.m(),
            });
        }
        Ok(())
    }
}

/// Indices of the first pair of representatives with equal fingerprints,
/// after sorting by fingerprint (ties by representative order).
pub fn first_collision(fps: &[Fingerprint]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..fps.len()).collect();
    order.sort_by(|&a, &b| fps[a].cmp(&fps[b]).then(a.cmp(&b)));
    order
        .windows(2)
        .find(|w| fps[w[0]] == fps[w[1]])
        .map(|w| (w[0], w[1]))
}

fn first_collision_on(fps: &[Fingerprint], columns: &[usize]) -> Option<(usize, usize)> {
    let projected: Vec<Fingerprint> = fps.iter().map(|f| f.project(columns)).collect();
    first_collision(&projected)
}

/// Groups representatives with equal fingerprints; classes are listed by
/// their smallest member.
pub fn partition(fps: &[Fingerprint]) -> Vec<Vec<usize>> {
    let mut classes: std::collections::BTreeMap<&Fingerprint, Vec<usize>> = Default::default();
    for (i, f) in fps.iter().enumerate() {
        classes.entry(f).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort();
    out
}

/// Whether every class of `finer` lies inside a class of `coarser`.
pub fn refines(finer: &[Fingerprint], coarser: &[Fingerprint]) -> bool {
    assert_eq!(finer.len(), coarser.len());
    partition(finer)
        .iter()
        .all(|class| class.iter().all(|&i| coarser[i] == coarser[class[0]]))
}

/// Two orbit representatives that a set of invariants fails to tell apart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Label of the member removed to produce the collision, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub removed: Option<String>,
    pub left: PointTuple,
    pub left_type: OrbitType,
    pub right: PointTuple,
    pub right_type: OrbitType,
    /// The shared fingerprint.
    pub fingerprint: Fingerprint,
    /// Re-checked by trying every group element on the raw points.
    pub distinct_orbits: bool,
}

impl Witness {
    fn new(
        table: &OrbitTable,
        fps: &[Fingerprint],
        pair: (usize, usize),
        removed: Option<String>,
    ) -> Self {
        let (a, b) = (&table.reps[pair.0], &table.reps[pair.1]);
        let distinct_orbits = !same_orbit(&table.group, &a.point, &b.point).expect("same arity");
        Witness {
            removed,
            left: a.point.clone(),
            left_type: a.otype,
            right: b.point.clone(),
            right_type: b.otype,
            fingerprint: fps[pair.0].clone(),
            distinct_orbits,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SeparationReport {
    pub q: usize,
    pub m: usize,
    pub set: String,
    pub size: usize,
    pub kappa: usize,
    pub separating: bool,
    /// Only present once minimality has been checked.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal: Option<bool>,
    pub witnesses: Vec<Witness>,
    pub runtime_ms: u128,
}

/// Certifies whether `set` separates the orbits in `table`.
///
/// Members are first checked against the group generators.
pub fn is_separating(table: &OrbitTable, set: &InvariantSet) -> Result<SeparationReport> {
    let start = Instant::now();
    table.check_set(set)?;
    set.check_invariance(&table.group, &table.group.generators())?;
    let fps = table.fingerprints(set.polys());
    let collision = first_collision(&fps);
    Ok(SeparationReport {
        q: table.field().q(),
        m: table.m,
        set: set.name.clone(),
        size: set.len(),
        kappa: table.kappa(),
        separating: collision.is_none(),
        minimal: None,
        witnesses: collision
            .map(|pair| Witness::new(table, &fps, pair, None))
            .into_iter()
            .collect(),
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Certifies that `set` is separating and reports, for each member, a
/// collision produced by removing it.
pub fn is_minimal(table: &OrbitTable, set: &InvariantSet) -> Result<SeparationReport> {
    let start = Instant::now();
    let mut report = is_separating(table, set)?;
    if !report.separating {
        return Err(Error::NotSeparating(set.name.clone()));
    }
    let fps = table.fingerprints(set.polys());
    let n = set.len();
    let mut minimal = true;
    for (i, member) in set.members().iter().enumerate() {
        let keep: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        match first_collision_on(&fps, &keep) {
            Some(pair) => {
                let projected: Vec<Fingerprint> = fps.iter().map(|f| f.project(&keep)).collect();
                report
                    .witnesses
                    .push(Witness::new(table, &projected, pair, Some(member.label())));
            }
            None => minimal = false,
        }
    }
    report.minimal = Some(minimal);
    report.runtime_ms = start.elapsed().as_millis();
    Ok(report)
}

/// `T_m^(2)` over GF(2) and `T_m` otherwise.
pub fn main_set(m: usize, field: &Field) -> Result<InvariantSet> {
    if field.q() == 2 {
        set_tm2(m, field)
    } else {
        set_tm(m, field)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaReport {
    pub q: usize,
    pub m: usize,
    pub kappa: usize,
    pub beta_sep: u32,
    /// Dimension of the homogeneous invariants in degrees `1..=beta_sep`.
    pub dims: Vec<usize>,
    /// A collision among invariants of degree `< beta_sep`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub below: Option<Witness>,
    pub runtime_ms: u128,
}

/// Smallest `d <= max_degree` such that all invariants of degree at most
/// `d` separate the orbits on `V^m`.
pub fn beta_sep(m: usize, field: &Field, max_degree: u32) -> Result<BetaReport> {
    beta_sep_with(m, field, max_degree, field.primitive_element())
}

/// As [`beta_sep`], building invariant bases from `sigma_1` and `tau_gamma`.
pub fn beta_sep_with(m: usize, field: &Field, max_degree: u32, gamma: Fe) -> Result<BetaReport> {
    let start = Instant::now();
    if max_degree == 0 {
        return Err(Error::InvalidArgument(
            "max degree must be at least 1".into(),
        ));
    }
    if field.multiplicative_order(gamma)? != field.q() - 1 {
        return Err(Error::InvalidArgument(format!("{gamma} is not primitive")));
    }
    let table = OrbitTable::new(field, m);
    let gens = table.group.generators_with(gamma)?;
    let mut fps: Vec<Fingerprint> = vec![Fingerprint(Vec::new()); table.kappa()];
    let mut dims = Vec::new();
    let mut below = None;
    for d in 1..=max_degree {
        let basis = invariant_basis_for(&table.group, m, d, &gens)?;
        dims.push(basis.dim());
        for (fp, new) in fps.iter_mut().zip(table.fingerprints(&basis.basis)) {
            fp.0.extend(new.0);
        }
        match first_collision(&fps) {
            Some(pair) => below = Some(Witness::new(&table, &fps, pair, None)),
            None => {
                return Ok(BetaReport {
                    q: field.q(),
                    m,
                    kappa: table.kappa(),
                    beta_sep: d,
                    dims,
                    below,
                    runtime_ms: start.elapsed().as_millis(),
                })
            }
        }
    }
    Err(Error::NotFoundWithinBudget(max_degree))
}

#[derive(Debug, Clone, Serialize)]
pub struct SigmaReport {
    pub q: usize,
    pub max_m: usize,
    /// `T_1` expanded to two slots; must fail to separate.
    pub base_one: SeparationReport,
    /// The two-slot set whose expansions are checked.
    pub base_two: String,
    pub expansions: Vec<SeparationReport>,
    /// `2` when every check passed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_sep: Option<usize>,
    pub verified_up_to: usize,
    pub runtime_ms: u128,
}

/// Checks that arity one is not enough and that expanding the two-slot main
/// set separates for every arity `2..=max_m`.
pub fn sigma_sep_bounded(field: &Field, max_m: usize) -> Result<SigmaReport> {
    let start = Instant::now();
    if max_m < 2 {
        return Err(Error::InvalidArgument("max m must be at least 2".into()));
    }
    let t1 = set_tm(1, field)?;
    let base_one = is_separating(&OrbitTable::new(field, 2), &expand_set(&t1, 2)?)?;
    let base = main_set(2, field)?;
    let mut expansions = Vec::new();
    let mut verified_up_to = 1;
    for m in 2..=max_m {
        let report = is_separating(&OrbitTable::new(field, m), &expand_set(&base, m)?)?;
        let ok = report.separating;
        expansions.push(report);
        if !ok {
            break;
        }
        verified_up_to = m;
    }
    let sigma_sep = (!base_one.separating && verified_up_to == max_m).then_some(2);
    Ok(SigmaReport {
        q: field.q(),
        max_m,
        base_one,
        base_two: base.name.clone(),
        expansions,
        sigma_sep,
        verified_up_to,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// Smallest `g` with `q^g >= kappa`.
pub fn ceil_log(q: u128, kappa: u128) -> u32 {
    let mut g = 0;
    let mut power = 1u128;
    while power < kappa {
        power *= q;
        g += 1;
    }
    g
}

#[derive(Debug, Clone, Serialize)]
pub struct PoolCheck {
    pub set: String,
    pub size: usize,
    /// Smallest separating subset found by exact search, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smallest: Option<usize>,
    /// No subset smaller than `gamma` separates.
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub q: usize,
    pub m: usize,
    pub kappa: u128,
    pub gamma: u32,
    pub bound: usize,
    pub within_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool: Option<PoolCheck>,
}

/// `gamma = ceil(log_q kappa)` against the bound `2m`, and, for a pool, an
/// exact search showing that fewer than `gamma` members never separate.
pub fn gamma_sep_check(
    m: usize,
    field: &Field,
    pool: Option<&InvariantSet>,
) -> Result<GammaReport> {
    let q = field.q();
    let kappa = orbit_count_formula(m, q).kappa;
    let gamma = ceil_log(q as u128, kappa);
    let pool = match pool {
        None => None,
        Some(set) => {
            let found = match min_separating_subset(set, set.len()) {
                Ok(found) => Some(found.indices.len()),
                Err(Error::NotFound(_)) => None,
                Err(e) => return Err(e),
            };
            Some(PoolCheck {
                set: set.name.clone(),
                size: set.len(),
                smallest: found,
                ok: found.map_or(true, |s| s >= gamma as usize),
            })
        }
    };
    Ok(GammaReport {
        q,
        m,
        kappa,
        gamma,
        bound: 2 * m,
        within_bound: gamma as usize <= 2 * m,
        pool,
    })
}

#[derive(Debug, Clone)]
pub struct SubsetSearch {
    /// Positions in the pool, increasing.
    pub indices: Vec<usize>,
    pub set: InvariantSet,
    /// Number of subsets tested.
    pub tried: u64,
}

/// Advances `c` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The lexicographically first separating subset of smallest size, up to
/// `size_cap` members.
pub fn min_separating_subset(pool: &InvariantSet, size_cap: usize) -> Result<SubsetSearch> {
    if pool.len() > MAX_POOL {
        return Err(Error::PoolTooLarge {
            size: pool.len(),
            max: MAX_POOL,
        });
    }
    let table = OrbitTable::new(pool.field(), pool.m());
    table.check_set(pool)?;
    pool.check_invariance(&table.group, &table.group.generators())?;
    let fps = table.fingerprints(pool.polys());
    let mut tried = 0;
    for k in 1..=size_cap.min(pool.len()) {
        let mut c: Vec<usize> = (0..k).collect();
        loop {
            tried += 1;
            if first_collision_on(&fps, &c).is_none() {
                let labels: Vec<String> = c.iter().map(|&i| pool.members()[i].label()).collect();
                let name = format!("{{{}}}", labels.join(", "));
                return Ok(SubsetSearch {
                    set: pool.subset(name, &c),
                    indices: c,
                    tried,
                });
            }
            if !next_combination(&mut c, pool.len()) {
                break;
            }
        }
    }
    Err(Error::NotFound(size_cap))
}
