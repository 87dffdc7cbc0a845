//! Invariant families of O2+(F_q) on `V^m` and the candidate separating
//! sets built from them.
//!
//! ```text
//! N_i    = x_i y_i
//! U_ij   = x_i y_j + x_j y_i                       (i < j)
//! B_ii   = x^ii + y^ii                              (|ii| = q - 1)
//! D_IJ   = x_I y_J + x_J y_I                        (I < J, |J| - |I| in {0, q-1})
//! T_i    = x_i^(q-1) + y_i^(q-1)
//! H_ij   = x_i x_j^(q-2) + y_i y_j^(q-2)            (i < j)
//! ```
//!
//! Descriptor indices are 1-based, as in the formulas above.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::group::{Group, GroupElement};
use crate::poly::{Monomial, Poly};

/// Symbolic name of a family member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Descriptor {
    N { i: usize },
    U { i: usize, j: usize },
    B { exponents: Vec<u32> },
    D { left: Vec<usize>, right: Vec<usize> },
    T { i: usize },
    H { i: usize, j: usize },
}

fn join(ix: &[usize]) -> String {
    ix.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Descriptor::N { i } => write!(f, "N_{i}"),
            Descriptor::T { i } => write!(f, "T_{i}"),
            Descriptor::U { i, j } => write!(f, "U_{{{i},{j}}}"),
            Descriptor::H { i, j } => write!(f, "H_{{{i},{j}}}"),
            Descriptor::B { exponents } => {
                let e: Vec<String> = exponents.iter().map(u32::to_string).collect();
                write!(f, "B_({})", e.join(","))
            }
            Descriptor::D { left, right } => write!(f, "D_{{{}}}{{{}}}", join(left), join(right)),
        }
    }
}

fn bad(msg: String) -> Error {
    Error::BadDescriptor(msg)
}

fn strictly_increasing(ix: &[usize]) -> bool {
    ix.windows(2).all(|w| w[0] < w[1])
}

impl Descriptor {
    /// Checks the index constraints of the family for arity `m` over GF(q).
    pub fn validate(&self, m: usize, q: usize) -> Result<()> {
        let in_range = |i: usize| (1..=m).contains(&i);
        match self {
            Descriptor::N { i } | Descriptor::T { i } => {
                if !in_range(*i) {
                    return Err(bad(format!("{self}: index must lie in 1..={m}")));
                }
            }
            Descriptor::U { i, j } | Descriptor::H { i, j } => {
                if !(in_range(*i) && in_range(*j) && i < j) {
                    return Err(bad(format!("{self}: need 1 <= i < j <= {m}")));
                }
            }
            Descriptor::B { exponents } => {
                if exponents.len() != m {
                    return Err(bad(format!("{self}: multi-index must have length {m}")));
                }
                let total: u32 = exponents.iter().sum();
                if total as usize != q - 1 {
                    return Err(bad(format!(
                        "{self}: |i| = {total}, expected q-1 = {}",
                        q - 1
                    )));
                }
            }
            Descriptor::D { left, right } => {
                if left.is_empty() || right.is_empty() {
                    return Err(bad(format!("{self}: index sets must be nonempty")));
                }
                if !strictly_increasing(left) || !strictly_increasing(right) {
                    return Err(bad(format!(
                        "{self}: index sets must be sorted without repeats"
                    )));
                }
                if !left.iter().chain(right).all(|&i| in_range(i)) {
                    return Err(bad(format!("{self}: indices must lie in 1..={m}")));
                }
                if left.last() >= right.first() {
                    return Err(bad(format!("{self}: need i < j for all i in I, j in J")));
                }
                let diff = right.len() - left.len().min(right.len());
                if right.len() < left.len() || (diff != 0 && diff != q - 1) {
                    return Err(bad(format!("{self}: |J| - |I| must be 0 or q-1")));
                }
            }
        }
        Ok(())
    }

    /// The same descriptor with slot `i` (1-based) moved to `slot_map[i-1] + 1`.
    pub fn reindex(&self, slot_map: &[usize], new_m: usize) -> Descriptor {
        let mv = |i: &usize| slot_map[i - 1] + 1;
        match self {
            Descriptor::N { i } => Descriptor::N { i: mv(i) },
            Descriptor::T { i } => Descriptor::T { i: mv(i) },
            Descriptor::U { i, j } => Descriptor::U { i: mv(i), j: mv(j) },
            Descriptor::H { i, j } => Descriptor::H { i: mv(i), j: mv(j) },
            Descriptor::B { exponents } => {
                let mut e = vec![0; new_m];
                for (k, &x) in exponents.iter().enumerate() {
                    e[slot_map[k]] = x;
                }
                Descriptor::B { exponents: e }
            }
            Descriptor::D { left, right } => Descriptor::D {
                left: left.iter().map(mv).collect(),
                right: right.iter().map(mv).collect(),
            },
        }
    }
}

/// `prod x^a + prod y^b` with the given per-slot exponents.
fn binomial(field: &Field, m: usize, x_exp: &[u32], y_exp: &[u32]) -> Poly {
    let mut ex = vec![0; 2 * m];
    ex[..m].copy_from_slice(x_exp);
    let mut ey = vec![0; 2 * m];
    ey[m..].copy_from_slice(y_exp);
    Poly::monomial(field, m, Monomial::new(ex), Fe::ONE)
        .add(&Poly::monomial(field, m, Monomial::new(ey), Fe::ONE))
        .expect("same ring")
}

fn unit(m: usize, entries: &[(usize, u32)]) -> Vec<u32> {
    let mut e = vec![0; m];
    for &(i, x) in entries {
        e[i - 1] += x;
    }
    e
}

/// The polynomial named by `d`.
pub fn make_invariant(d: &Descriptor, m: usize, field: &Field) -> Result<Poly> {
    let q = field.q();
    d.validate(m, q)?;
    let qm1 = q as u32 - 1;
    Ok(match d {
        Descriptor::N { i } => {
            let mut e = vec![0; 2 * m];
            e[i - 1] = 1;
            e[m + i - 1] = 1;
            Poly::monomial(field, m, Monomial::new(e), Fe::ONE)
        }
        Descriptor::T { i } => {
            let e = unit(m, &[(*i, qm1)]);
            binomial(field, m, &e, &e)
        }
        Descriptor::H { i, j } => {
            let e = unit(m, &[(*i, 1), (*j, qm1 - 1)]);
            binomial(field, m, &e, &e)
        }
        Descriptor::B { exponents } => binomial(field, m, exponents, exponents),
        Descriptor::U { i, j } => {
            let (a, b) = (unit(m, &[(*i, 1)]), unit(m, &[(*j, 1)]));
            cross(field, m, &a, &b)
        }
        Descriptor::D { left, right } => {
            let a = unit(m, &left.iter().map(|&i| (i, 1)).collect::<Vec<_>>());
            let b = unit(m, &right.iter().map(|&i| (i, 1)).collect::<Vec<_>>());
            cross(field, m, &a, &b)
        }
    })
}

/// `x^a y^b + x^b y^a`.
fn cross(field: &Field, m: usize, a: &[u32], b: &[u32]) -> Poly {
    let mono = |xs: &[u32], ys: &[u32]| {
        let mut e = xs.to_vec();
        e.extend_from_slice(ys);
        Poly::monomial(field, m, Monomial::new(e), Fe::ONE)
    };
    mono(a, b).add(&mono(b, a)).expect("same ring")
}

/// All `ii in N^m` with `|ii| = total`, in descending lexicographic order.
///
/// Yields `C(m + total - 1, m - 1)` items without materializing them.
#[derive(Debug, Clone)]
pub struct MultiIndices {
    current: Option<Vec<u32>>,
}

pub fn multi_indices(m: usize, total: u32) -> MultiIndices {
    let current = (m > 0).then(|| {
        let mut v = vec![0; m];
        v[0] = total;
        v
    });
    MultiIndices { current }
}

impl Iterator for MultiIndices {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let out = self.current.take()?;
        let m = out.len();
        if let Some(i) = (0..m.saturating_sub(1)).rev().find(|&i| out[i] > 0) {
            let mut next = out.clone();
            let tail: u32 = next[i + 1..].iter().sum();
            next[i] -= 1;
            for x in &mut next[i + 1..] {
                *x = 0;
            }
            next[i + 1] = tail + 1;
            self.current = Some(next);
        }
        Some(out)
    }
}

/// One member of an [`InvariantSet`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Member {
    pub descriptor: Option<Descriptor>,
    pub poly: Poly,
}

impl Member {
    pub fn label(&self) -> String {
        match &self.descriptor {
            Some(d) => d.to_string(),
            None => self.poly.to_string(),
        }
    }
}

/// An ordered, duplicate-free collection of polynomials in one ring.
#[derive(Debug, Clone)]
pub struct InvariantSet {
    pub name: String,
    m: usize,
    field: Field,
    members: Vec<Member>,
}

impl InvariantSet {
    pub fn new(name: impl Into<String>, m: usize, field: &Field) -> Self {
        InvariantSet {
            name: name.into(),
            m,
            field: field.clone(),
            members: Vec::new(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn polys(&self) -> impl Iterator<Item = &Poly> {
        self.members.iter().map(|m| &m.poly)
    }

    /// Appends unless an equal polynomial is already present. Returns
    /// whether the member was added.
    pub fn push(&mut self, member: Member) -> Result<bool> {
        if member.poly.field() != &self.field {
            return Err(Error::MixedFields);
        }
        if member.poly.m() != self.m {
            return Err(Error::MixedArity {
                expected: self.m,
                found: member.poly.m(),
            });
        }
        if self.members.iter().any(|x| x.poly == member.poly) {
            return Ok(false);
        }
        self.members.push(member);
        Ok(true)
    }

    pub fn push_descriptor(&mut self, d: Descriptor) -> Result<bool> {
        let poly = make_invariant(&d, self.m, &self.field)?;
        self.push(Member {
            descriptor: Some(d),
            poly,
        })
    }

    /// The members at `indices`, in the given order.
    pub fn subset(&self, name: impl Into<String>, indices: &[usize]) -> InvariantSet {
        InvariantSet {
            name: name.into(),
            m: self.m,
            field: self.field.clone(),
            members: indices.iter().map(|&i| self.members[i].clone()).collect(),
        }
    }

    /// The set with member `index` removed.
    pub fn without(&self, index: usize) -> InvariantSet {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| i != index).collect();
        let name = format!("{} \\ {{{}}}", self.name, self.members[index].label());
        self.subset(name, &keep)
    }

    /// Equality as sets of polynomials.
    pub fn same_polys(&self, other: &InvariantSet) -> bool {
        let a: HashSet<&Poly> = self.polys().collect();
        let b: HashSet<&Poly> = other.polys().collect();
        a == b
    }

    /// Fails with the first member moved by some element of `elements`.
    pub fn check_invariance(&self, group: &Group, elements: &[GroupElement]) -> Result<()> {
        for member in &self.members {
            for g in elements {
                if group.act_poly(g, &member.poly)? != member.poly {
                    return Err(Error::NonInvariantMember {
                        member: member.label(),
                        element: g.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            name: self.name.clone(),
            q: self.field.q(),
            m: self.m,
            members: self
                .members
                .iter()
                .map(|x| ManifestMember {
                    descriptor: x.descriptor.clone(),
                    label: x.label(),
                    poly: x.poly.to_string(),
                })
                .collect(),
        }
    }

    /// Rebuilds a set from a manifest. Members that carry a descriptor must
    /// render to the stated polynomial.
    pub fn from_manifest(manifest: &Manifest, field: &Field) -> Result<InvariantSet> {
        if manifest.q != field.q() {
            return Err(Error::MixedFields);
        }
        let mut set = InvariantSet::new(manifest.name.clone(), manifest.m, field);
        for mm in &manifest.members {
            let poly = Poly::parse(field, manifest.m, &mm.poly)?;
            if let Some(d) = &mm.descriptor {
                if make_invariant(d, manifest.m, field)? != poly {
                    return Err(bad(format!("{d} does not match polynomial {}", mm.poly)));
                }
            }
            set.push(Member {
                descriptor: mm.descriptor.clone(),
                poly,
            })?;
        }
        Ok(set)
    }
}

/// Serializable description of an [`InvariantSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub q: usize,
    pub m: usize,
    pub members: Vec<ManifestMember>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestMember {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub descriptor: Option<Descriptor>,
    #[serde(default)]
    pub label: String,
    pub poly: String,
}

fn pairs(m: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=m).flat_map(move |i| (i + 1..=m).map(move |j| (i, j)))
}

/// `{N_i, T_i : i <= m} u {U_ij, H_ij : i < j}`. Over GF(2) each `H_ij`
/// coincides with `T_i` and is dropped.
pub fn set_tm(m: usize, field: &Field) -> Result<InvariantSet> {
    let mut set = InvariantSet::new(format!("T_{m}"), m, field);
    for i in 1..=m {
        set.push_descriptor(Descriptor::N { i })?;
    }
    for i in 1..=m {
        set.push_descriptor(Descriptor::T { i })?;
    }
    for (i, j) in pairs(m) {
        set.push_descriptor(Descriptor::U { i, j })?;
    }
    for (i, j) in pairs(m) {
        set.push_descriptor(Descriptor::H { i, j })?;
    }
    Ok(set)
}

/// `{N_i, T_i : i <= m} u {U_ij : i < j}`.
pub fn set_tm2(m: usize, field: &Field) -> Result<InvariantSet> {
    let mut set = InvariantSet::new(format!("T_{m}^(2)"), m, field);
    for i in 1..=m {
        set.push_descriptor(Descriptor::N { i })?;
    }
    for i in 1..=m {
        set.push_descriptor(Descriptor::T { i })?;
    }
    for (i, j) in pairs(m) {
        set.push_descriptor(Descriptor::U { i, j })?;
    }
    Ok(set)
}

/// All `I < J` pairs of nonempty index sets with `|J| - |I|` in `{0, q-1}`.
pub fn d_index_pairs(m: usize, q: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let subsets: Vec<Vec<usize>> = {
        let mut all: Vec<Vec<usize>> = (1u32..(1 << m))
            .map(|mask| (1..=m).filter(|&i| mask & (1 << (i - 1)) != 0).collect())
            .collect();
        all.sort();
        all
    };
    let mut out = Vec::new();
    for left in &subsets {
        for right in &subsets {
            let d = Descriptor::D {
                left: left.clone(),
                right: right.clone(),
            };
            if d.validate(m, q).is_ok() {
                out.push((left.clone(), right.clone()));
            }
        }
    }
    out
}

/// The family `N u B u D`, deduplicated.
pub fn set_chen(m: usize, field: &Field) -> Result<InvariantSet> {
    let q = field.q();
    let mut set = InvariantSet::new(format!("Chen_{m}"), m, field);
    for i in 1..=m {
        set.push_descriptor(Descriptor::N { i })?;
    }
    for exponents in multi_indices(m, q as u32 - 1) {
        set.push_descriptor(Descriptor::B { exponents })?;
    }
    for (left, right) in d_index_pairs(m, q) {
        set.push_descriptor(Descriptor::D { left, right })?;
    }
    Ok(set)
}

/// Strictly increasing `k`-tuples from `0..n`, lexicographically.
pub fn admissible_tuples(k: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, k, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, n, &mut Vec::new(), &mut out);
    out
}

/// The expansion `S^[m]`: every member re-instantiated at every strictly
/// increasing choice of `m0` slots out of `m`.
pub fn expand_set(set: &InvariantSet, m: usize) -> Result<InvariantSet> {
    let m0 = set.m();
    if m < m0 {
        return Err(Error::ArityShrink { from: m0, to: m });
    }
    let mut out = InvariantSet::new(format!("{}^[{m}]", set.name), m, set.field());
    for member in set.members() {
        for slots in admissible_tuples(m0, m) {
            out.push(Member {
                descriptor: member.descriptor.as_ref().map(|d| d.reindex(&slots, m)),
                poly: member.poly.reindex(&slots, m)?,
            })?;
        }
    }
    Ok(out)
}
