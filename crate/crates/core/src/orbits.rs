//! Classification of O2+(F_q)-orbits on `V^m`.
//!
//! Every orbit contains exactly one canonical point of one of the shapes
//!
//! ```text
//! (0)  (0, ..., 0)
//! (a)  (0^r, e_0, u_1, ..., u_t)
//! (b)  (0^r, e_a, b_1 e_a, ..., b_s e_a)
//! (c)  (0^r, e_a, b_1 e_a, ..., b_s e_a, w, u_1, ..., u_t)      w in Omega_a
//! ```
//!
//! with `e_a = (1, a)`, `a != 0` in (b) and (c), and arbitrary `u_i`.
//! `Omega_a` picks one point from each pair `{w, sigma_{a^-1} w}` of
//! `S_a = V \ F_q e_a`; here it is always the lexicographically smaller one.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::group::{Group, GroupElement, Kind, PointTuple, Vector2};

/// Default cap on `q^(2m)` for brute-force enumeration.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OrbitType {
    Zero,
    A,
    B,
    C,
}

impl std::fmt::Display for OrbitType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OrbitType::Zero => "0",
            OrbitType::A => "a",
            OrbitType::B => "b",
            OrbitType::C => "c",
        };
        f.write_str(s)
    }
}

/// Shape parameters of a canonical point, as read off the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Shape {
    /// Number of leading zero slots.
    pub r: usize,
    /// `alpha` of the leading `e_alpha` (zero for type a).
    #[serde(serialize_with = "ser_opt_fe")]
    pub alpha: Option<Fe>,
    /// Number of multiples of `e_alpha` following it (types b and c).
    pub s: Option<usize>,
    /// Slot index (0-based) of `w` (type c).
    pub w_pos: Option<usize>,
}

fn ser_opt_fe<S: serde::Serializer>(v: &Option<Fe>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(a) => s.serialize_some(&a.index()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalForm {
    pub point: PointTuple,
    pub otype: OrbitType,
    pub shape: Shape,
}

/// Whether `v` lies on the line `F_q e_alpha`, i.e. `v(2) = alpha v(1)`.
fn on_line(field: &Field, alpha: Fe, v: &Vector2) -> bool {
    v.c2 == field.mul(alpha, v.c1)
}

fn sigma_inv(group: &Group, alpha: Fe) -> GroupElement {
    GroupElement {
        kind: Kind::Sigma,
        alpha: group.field().inv(alpha).expect("alpha is nonzero"),
    }
}

/// Whether `w` is the chosen representative of `{w, sigma_{alpha^-1} w}`.
pub fn omega_contains(group: &Group, alpha: Fe, w: &Vector2) -> Result<bool> {
    let field = group.field();
    field.check(alpha)?;
    field.check(w.c1)?;
    field.check(w.c2)?;
    if alpha.is_zero() {
        return Err(Error::ZeroAlpha);
    }
    if on_line(field, alpha, w) {
        return Err(Error::NotInSAlpha(w.to_string()));
    }
    let partner = group.act_vec(&sigma_inv(group, alpha), w);
    Ok(*w < partner)
}

/// Canonical point of the orbit of `v` and a witness `g` with `g . v` equal
/// to it.
pub fn canonicalize(group: &Group, v: &PointTuple) -> Result<(CanonicalForm, GroupElement)> {
    v.check(group.field())?;
    Ok(canonicalize_unchecked(group, v))
}

pub(crate) fn canonicalize_unchecked(
    group: &Group,
    v: &PointTuple,
) -> (CanonicalForm, GroupElement) {
    let field = group.field();
    let entries = v.entries();
    let m = entries.len();
    let Some(r) = entries.iter().position(|u| !u.is_zero()) else {
        let shape = Shape {
            r: m,
            alpha: None,
            s: None,
            w_pos: None,
        };
        let form = CanonicalForm {
            point: v.clone(),
            otype: OrbitType::Zero,
            shape,
        };
        return (form, GroupElement::identity());
    };

    // Bring the first nonzero slot to e_alpha.
    let lead = entries[r];
    let mut g = GroupElement::identity();
    if lead.c1.is_zero() {
        g = GroupElement {
            kind: Kind::Sigma,
            alpha: Fe::ONE,
        };
    }
    let head = group.act_vec(&g, &lead).c1;
    let scale = GroupElement {
        kind: Kind::Tau,
        alpha: field.inv(head).expect("nonzero first coordinate"),
    };
    g = group.compose(&scale, &g).expect("same field");
    let alpha = group.act_vec(&g, &lead).c2;

    if alpha.is_zero() {
        let form = CanonicalForm {
            point: group.act_tuple_unchecked(&g, v),
            otype: OrbitType::A,
            shape: Shape {
                r,
                alpha: Some(alpha),
                s: None,
                w_pos: None,
            },
        };
        return (form, g);
    }

    let moved = group.act_tuple_unchecked(&g, v);
    let w_pos = (r + 1..m).find(|&j| !on_line(field, alpha, &moved.entries()[j]));
    match w_pos {
        None => {
            let form = CanonicalForm {
                point: moved,
                otype: OrbitType::B,
                shape: Shape {
                    r,
                    alpha: Some(alpha),
                    s: Some(m - r - 1),
                    w_pos: None,
                },
            };
            (form, g)
        }
        Some(j) => {
            let w = moved.entries()[j];
            let point = if omega_contains(group, alpha, &w).expect("w lies in S_alpha") {
                moved
            } else {
                let flip = sigma_inv(group, alpha);
                g = group.compose(&flip, &g).expect("same field");
                group.act_tuple_unchecked(&flip, &moved)
            };
            let form = CanonicalForm {
                point,
                otype: OrbitType::C,
                shape: Shape {
                    r,
                    alpha: Some(alpha),
                    s: Some(j - r - 1),
                    w_pos: Some(j),
                },
            };
            (form, g)
        }
    }
}

/// Parses `v` as a canonical point, returning `None` if it is not one.
pub fn classify(group: &Group, v: &PointTuple) -> Option<CanonicalForm> {
    let (form, witness) = canonicalize(group, v).ok()?;
    // a canonical point is its own canonical form, reached without moving
    (form.point == *v && group.act_tuple_unchecked(&witness, v) == *v).then_some(form)
}

/// Canonical representatives by canonicalizing every point of `V^m`,
/// together with orbit sizes. Sorted by point.
pub fn orbit_census_brute_force(
    group: &Group,
    m: usize,
    budget: u128,
) -> Result<Vec<(CanonicalForm, u64)>> {
    let q = group.field().q() as u128;
    let total = q.checked_pow(2 * m as u32).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded {
            what: "brute-force orbit enumeration",
            needed: total,
            budget,
        });
    }
    let total = total as u64;
    let counts = (0..total)
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<CanonicalForm, u64>, i| {
            let p = PointTuple::from_index(group.field(), m, i);
            *acc.entry(canonicalize_unchecked(group, &p).0).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let mut out: Vec<_> = counts.into_iter().collect();
    out.sort_by(|a, b| a.0.point.cmp(&b.0.point));
    Ok(out)
}

/// Canonical representatives by canonicalizing every point of `V^m`.
pub fn orbit_reps_brute_force(group: &Group, m: usize, budget: u128) -> Result<Vec<CanonicalForm>> {
    Ok(orbit_census_brute_force(group, m, budget)?
        .into_iter()
        .map(|(f, _)| f)
        .collect())
}

/// Canonical representatives generated directly from the four shapes.
/// Sorted by point.
pub fn orbit_reps_grammar(group: &Group, m: usize) -> Vec<CanonicalForm> {
    let field = group.field();
    let all_vectors: Vec<Vector2> = field
        .elements()
        .flat_map(|a| field.elements().map(move |b| Vector2::new(a, b)))
        .collect();
    let mut out = vec![CanonicalForm {
        point: PointTuple::zero(m),
        otype: OrbitType::Zero,
        shape: Shape {
            r: m,
            alpha: None,
            s: None,
            w_pos: None,
        },
    }];

    // every tail in V^t, lexicographic
    let tails = |t: usize| -> Vec<Vec<Vector2>> {
        let mut acc: Vec<Vec<Vector2>> = vec![Vec::new()];
        for _ in 0..t {
            acc = acc
                .into_iter()
                .flat_map(|p| {
                    all_vectors.iter().map(move |v| {
                        let mut p = p.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        acc
    };
    let multiples = |alpha: Fe, s: usize| -> Vec<Vec<Vector2>> {
        let mut acc: Vec<Vec<Vector2>> = vec![Vec::new()];
        for _ in 0..s {
            acc = acc
                .into_iter()
                .flat_map(|p| {
                    field.elements().map(move |b| {
                        let mut p = p.clone();
                        p.push(Vector2::e(alpha).scale(field, b));
                        p
                    })
                })
                .collect();
        }
        acc
    };

    for r in 0..m {
        let prefix = vec![Vector2::ZERO; r];
        let rest = m - r - 1;
        // (a)
        for tail in tails(rest) {
            let mut p = prefix.clone();
            p.push(Vector2::e(Fe::ZERO));
            p.extend(tail);
            out.push(CanonicalForm {
                point: PointTuple::new(p),
                otype: OrbitType::A,
                shape: Shape {
                    r,
                    alpha: Some(Fe::ZERO),
                    s: None,
                    w_pos: None,
                },
            });
        }
        for alpha in field.units() {
            let omega: Vec<Vector2> = all_vectors
                .iter()
                .copied()
                .filter(|w| !on_line(field, alpha, w))
                .filter(|w| omega_contains(group, alpha, w).unwrap())
                .collect();
            // (b)
            for mult in multiples(alpha, rest) {
                let mut p = prefix.clone();
                p.push(Vector2::e(alpha));
                p.extend(mult);
                out.push(CanonicalForm {
                    point: PointTuple::new(p),
                    otype: OrbitType::B,
                    shape: Shape {
                        r,
                        alpha: Some(alpha),
                        s: Some(rest),
                        w_pos: None,
                    },
                });
            }
            // (c)
            for s in 0..rest {
                let t = rest - s - 1;
                let tail_set = tails(t);
                for mult in multiples(alpha, s) {
                    for w in &omega {
                        for tail in &tail_set {
                            let mut p = prefix.clone();
                            p.push(Vector2::e(alpha));
                            p.extend(mult.iter().copied());
                            p.push(*w);
                            p.extend(tail.iter().copied());
                            out.push(CanonicalForm {
                                point: PointTuple::new(p),
                                otype: OrbitType::C,
                                shape: Shape {
                                    r,
                                    alpha: Some(alpha),
                                    s: Some(s),
                                    w_pos: Some(r + s + 1),
                                },
                            });
                        }
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.point.cmp(&b.point));
    out
}

/// Orbit count and its breakdown by canonical type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrbitCount {
    pub kappa: u128,
    /// Type (a) orbits.
    pub kappa1: u128,
    /// Type (b) orbits.
    pub kappa2: u128,
    /// Type (c) orbits.
    pub kappa3: u128,
}

/// Closed-form orbit count `(q^m + 1)(q^m + q - 2) / (2(q - 1))`.
pub fn orbit_count_formula(m: usize, q: usize) -> OrbitCount {
    assert!(m >= 1 && q >= 2);
    let q = q as u128;
    let qm = q.pow(m as u32);
    let kappa = (qm + 1) * (qm + q - 2) / (2 * (q - 1));
    let kappa1 = (q.pow(2 * m as u32) - 1) / (q * q - 1);
    let kappa2 = qm - 1;
    let kappa3 = q * (qm - 1) * (q.pow(m as u32 - 1) - 1) / (2 * (q + 1));
    let count = OrbitCount {
        kappa,
        kappa1,
        kappa2,
        kappa3,
    };
    assert_eq!(
        1 + kappa1 + kappa2 + kappa3,
        kappa,
        "orbit count decomposition"
    );
    count
}

/// Counts canonical forms by type as `(zero, a, b, c)`.
pub fn type_breakdown(reps: &[CanonicalForm]) -> [u128; 4] {
    let mut out = [0u128; 4];
    for r in reps {
        out[r.otype as usize] += 1;
    }
    out
}

/// Whether some group element maps `u` to `v`, by trying all of them.
pub fn same_orbit(group: &Group, u: &PointTuple, v: &PointTuple) -> Result<bool> {
    if u.m() != v.m() {
        return Err(Error::MixedArity {
            expected: u.m(),
            found: v.m(),
        });
    }
    u.check(group.field())?;
    v.check(group.field())?;
    Ok(group
        .elements()
        .iter()
        .any(|g| group.act_tuple_unchecked(g, u) == *v))
}

/// The orbit of `v` as a sorted, deduplicated list.
pub fn orbit_of(group: &Group, v: &PointTuple) -> Vec<PointTuple> {
    let mut pts: Vec<PointTuple> = group
        .elements()
        .iter()
        .map(|g| group.act_tuple_unchecked(g, v))
        .collect();
    pts.sort();
    pts.dedup();
    pts
}

/// `|G| / |Stab(v)|`.
pub fn orbit_size(group: &Group, v: &PointTuple) -> usize {
    group.order() / group.tuple_stabilizer(v).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u64) -> (Field, Group) {
        let f = Field::new(q).unwrap();
        let g = Group::new(&f);
        (f, g)
    }

    fn pt(f: &Field, v: &[(i64, i64)]) -> PointTuple {
        PointTuple::new(
            v.iter()
                .map(|&(a, b)| Vector2::new(f.from_int(a), f.from_int(b)))
                .collect(),
        )
    }

    #[test]
    fn omega_examples() {
        let (f, g) = setup(2);
        let w10 = Vector2::new(Fe::ONE, Fe::ZERO);
        let w01 = Vector2::new(Fe::ZERO, Fe::ONE);
        assert!(!omega_contains(&g, Fe::ONE, &w10).unwrap());
        assert!(omega_contains(&g, Fe::ONE, &w01).unwrap());

        let (f3, g3) = setup(3);
        assert_eq!(
            omega_contains(&g3, Fe::ONE, &Vector2::ZERO),
            Err(Error::NotInSAlpha("(0,0)".into()))
        );
        assert_eq!(omega_contains(&g3, Fe::ZERO, &w10), Err(Error::ZeroAlpha));
        let _ = (f, f3);
    }

    #[test]
    fn omega_picks_one_per_pair() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let (f, g) = setup(q);
            for alpha in f.units() {
                let mut chosen = 0;
                let mut s_alpha = 0;
                for a in f.elements() {
                    for b in f.elements() {
                        let w = Vector2::new(a, b);
                        if on_line(&f, alpha, &w) {
                            continue;
                        }
                        s_alpha += 1;
                        let partner = g.act_vec(&sigma_inv(&g, alpha), &w);
                        assert_ne!(partner, w);
                        let here = omega_contains(&g, alpha, &w).unwrap();
                        assert_ne!(here, omega_contains(&g, alpha, &partner).unwrap());
                        chosen += usize::from(here);
                    }
                }
                assert_eq!(s_alpha, f.q() * (f.q() - 1));
                assert_eq!(chosen, f.q() * (f.q() - 1) / 2);
            }
        }
    }

    #[test]
    fn canonicalize_examples() {
        let (f2, g2) = setup(2);
        let (form, w) = canonicalize(&g2, &PointTuple::zero(3)).unwrap();
        assert_eq!(form.otype, OrbitType::Zero);
        assert!(w.is_identity());

        let (f3, g3) = setup(3);
        let (form, w) = canonicalize(&g3, &pt(&f3, &[(2, 0)])).unwrap();
        assert_eq!(form.point, pt(&f3, &[(1, 0)]));
        assert_eq!(form.otype, OrbitType::A);
        assert_eq!(w, g3.tau(f3.from_int(2)).unwrap());

        let (form, w) = canonicalize(&g2, &pt(&f2, &[(1, 1), (1, 0)])).unwrap();
        assert_eq!(form.point, pt(&f2, &[(1, 1), (0, 1)]));
        assert_eq!(form.otype, OrbitType::C);
        assert_eq!(form.shape.alpha, Some(Fe::ONE));
        assert_eq!(form.shape.s, Some(0));
        assert_eq!(form.shape.w_pos, Some(1));
        assert_eq!(w, g2.sigma(Fe::ONE).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let (f2, g2) = setup(2);
        let reps = orbit_reps_brute_force(&g2, 1, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        let pts: Vec<_> = reps.iter().map(|r| r.point.clone()).collect();
        assert_eq!(
            pts,
            vec![pt(&f2, &[(0, 0)]), pt(&f2, &[(1, 0)]), pt(&f2, &[(1, 1)])]
        );

        let (_, g3) = setup(3);
        let census = orbit_census_brute_force(&g3, 1, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
        let mut sizes: Vec<u64> = census.iter().map(|c| c.1).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2, 2, 4]);

        assert_eq!(
            orbit_reps_brute_force(&g2, 2, DEFAULT_BRUTE_FORCE_BUDGET)
                .unwrap()
                .len(),
            10
        );
        assert_eq!(orbit_reps_grammar(&g2, 2).len(), 10);
        assert!(matches!(
            orbit_reps_brute_force(&g3, 3, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn count_examples() {
        assert_eq!(
            orbit_count_formula(1, 2),
            OrbitCount {
                kappa: 3,
                kappa1: 1,
                kappa2: 1,
                kappa3: 0
            }
        );
        assert_eq!(orbit_count_formula(2, 3).kappa, 25);
        assert_eq!(orbit_count_formula(3, 2).kappa, 36);
        assert_eq!(orbit_count_formula(3, 3).kappa, 196);
    }

    #[test]
    fn same_orbit_examples() {
        let (f2, g2) = setup(2);
        let a = pt(&f2, &[(1, 0)]);
        assert!(same_orbit(&g2, &a, &a).unwrap());
        assert!(same_orbit(&g2, &a, &pt(&f2, &[(0, 1)])).unwrap());
        assert!(!same_orbit(&g2, &a, &pt(&f2, &[(1, 1)])).unwrap());
        assert!(matches!(
            same_orbit(&g2, &a, &PointTuple::zero(2)),
            Err(Error::MixedArity { .. })
        ));
    }

    #[test]
    fn grammar_matches_brute_force_and_formula() {
        for (q, ms) in [
            (2u64, 1..=4),
            (3, 1..=3),
            (4, 1..=3),
            (5, 1..=2),
            (7, 1..=2),
            (8, 1..=2),
            (9, 1..=2),
        ] {
            let (_, g) = setup(q);
            for m in ms {
                let count = orbit_count_formula(m, q as usize);
                let census = orbit_census_brute_force(&g, m, DEFAULT_BRUTE_FORCE_BUDGET).unwrap();
                let grammar = orbit_reps_grammar(&g, m);
                let brute: Vec<_> = census.iter().map(|c| c.0.clone()).collect();
                assert_eq!(brute, grammar, "q={q} m={m}");
                assert_eq!(grammar.len() as u128, count.kappa);
                assert_eq!(
                    type_breakdown(&grammar),
                    [1, count.kappa1, count.kappa2, count.kappa3]
                );
                let total: u64 = census.iter().map(|c| c.1).sum();
                assert_eq!(total as u128, (q as u128).pow(2 * m as u32));
                for (form, size) in &census {
                    assert_eq!(orbit_size(&g, &form.point) as u64, *size);
                }
            }
        }
    }

    #[test]
    fn canonicalization_is_sound_and_idempotent() {
        for (q, m) in [(2u64, 3), (3, 3), (4, 3), (5, 2), (7, 2)] {
            let (f, g) = setup(q);
            let total = q.pow(2 * m as u32);
            for i in 0..total {
                let v = PointTuple::from_index(&f, m, i);
                let (form, w) = canonicalize(&g, &v).unwrap();
                assert_eq!(g.act_tuple(&w, &v).unwrap(), form.point);
                for (a, b) in v.entries().iter().zip(form.point.entries()) {
                    assert_eq!(a.is_zero(), b.is_zero());
                }
                let (again, w2) = canonicalize(&g, &form.point).unwrap();
                assert_eq!(again, form);
                assert!(w2.is_identity());
                assert_eq!(classify(&g, &form.point), Some(form.clone()));
            }
        }
    }

    #[test]
    fn classify_rejects_non_canonical() {
        let (f, g) = setup(3);
        assert_eq!(classify(&g, &pt(&f, &[(2, 0)])), None);
        assert!(classify(&g, &pt(&f, &[(1, 0)])).is_some());
    }
}
