//! The group O2+(F_q) = { sigma_a, tau_a : a in F_q^x } and its actions.
//!
//! ```text
//! tau_a   = [[a, 0], [0, a^-1]]
//! sigma_a = [[0, a], [a^-1, 0]]
//! ```
//!
//! The group acts on `V = F_q^2` by matrix multiplication, on `V^m`
//! diagonally, and on polynomials by `(g.f)(v) = f(g^-1 . v)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::invspace::DenseMatrix;
use crate::poly::Poly;

/// A plane vector `(v(1), v(2))`. Ordered lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Vector2 {
    pub c1: Fe,
    pub c2: Fe,
}

impl Vector2 {
    pub const ZERO: Vector2 = Vector2 {
        c1: Fe::ZERO,
        c2: Fe::ZERO,
    };

    pub fn new(c1: Fe, c2: Fe) -> Self {
        Vector2 { c1, c2 }
    }

    /// `e_alpha = (1, alpha)`.
    pub fn e(alpha: Fe) -> Self {
        Vector2::new(Fe::ONE, alpha)
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c2.is_zero()
    }

    pub fn scale(&self, field: &Field, c: Fe) -> Self {
        Vector2::new(field.mul(c, self.c1), field.mul(c, self.c2))
    }
}

impl fmt::Display for Vector2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.c1, self.c2)
    }
}

/// A point `(v_1, ..., v_m)` of `V^m`. Ordered lexicographically by slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointTuple(Vec<Vector2>);

impl PointTuple {
    pub fn new(entries: Vec<Vector2>) -> Self {
        PointTuple(entries)
    }

    pub fn zero(m: usize) -> Self {
        PointTuple(vec![Vector2::ZERO; m])
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Vector2] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Vector2> {
        self.0
    }

    /// Coordinates ordered like the polynomial variables: `x_1..x_m, y_1..y_m`.
    pub fn coords(&self) -> Vec<Fe> {
        self.0
            .iter()
            .map(|v| v.c1)
            .chain(self.0.iter().map(|v| v.c2))
            .collect()
    }

    /// The `index`-th point of `V^m` in lexicographic order, `index < q^(2m)`.
    pub fn from_index(field: &Field, m: usize, mut index: u64) -> Self {
        let q = field.q() as u64;
        let mut coords = vec![Fe::ZERO; 2 * m];
        for c in coords.iter_mut().rev() {
            *c = field.element((index % q) as usize).unwrap();
            index /= q;
        }
        PointTuple(coords.chunks(2).map(|c| Vector2::new(c[0], c[1])).collect())
    }

    /// Confirms every coordinate lies in `field`.
    pub fn check(&self, field: &Field) -> Result<()> {
        for v in &self.0 {
            field.check(v.c1)?;
            field.check(v.c2)?;
        }
        Ok(())
    }
}

impl fmt::Display for PointTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for PointTuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|v| [v.c1.index(), v.c2.index()]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Tau,
    Sigma,
}

/// `tau_alpha` or `sigma_alpha`; canonical by `(kind, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub kind: Kind,
    pub alpha: Fe,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            kind: Kind::Tau,
            alpha: Fe::ONE,
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Tau => write!(f, "tau({})", self.alpha),
            Kind::Sigma => write!(f, "sigma({})", self.alpha),
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// O2+(F_q) over a fixed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    field: Field,
}

type Mat2 = [[Fe; 2]; 2];

impl Group {
    pub fn new(field: &Field) -> Self {
        Group {
            field: field.clone(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `2(q - 1)`.
    pub fn order(&self) -> usize {
        2 * (self.field.q() - 1)
    }

    pub fn tau(&self, alpha: Fe) -> Result<GroupElement> {
        self.element(Kind::Tau, alpha)
    }

    pub fn sigma(&self, alpha: Fe) -> Result<GroupElement> {
        self.element(Kind::Sigma, alpha)
    }

    fn element(&self, kind: Kind, alpha: Fe) -> Result<GroupElement> {
        self.field.check(alpha)?;
        if alpha.is_zero() {
            return Err(Error::ZeroAlpha);
        }
        Ok(GroupElement { kind, alpha })
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        self.element(g.kind, g.alpha).map(|_| ())
    }

    /// The 2x2 matrix of `g`.
    pub fn matrix(&self, g: &GroupElement) -> Mat2 {
        let a = g.alpha;
        let ai = self.field.inv(a).expect("alpha is nonzero");
        match g.kind {
            Kind::Tau => [[a, Fe::ZERO], [Fe::ZERO, ai]],
            Kind::Sigma => [[Fe::ZERO, a], [ai, Fe::ZERO]],
        }
    }

    fn element_of(&self, m: &Mat2) -> GroupElement {
        if m[0][1].is_zero() && m[1][0].is_zero() {
            GroupElement {
                kind: Kind::Tau,
                alpha: m[0][0],
            }
        } else {
            debug_assert!(m[0][0].is_zero() && m[1][1].is_zero());
            GroupElement {
                kind: Kind::Sigma,
                alpha: m[0][1],
            }
        }
    }

    /// The product `g h` (apply `h` first).
    pub fn compose(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        let f = &self.field;
        let (a, b) = (self.matrix(g), self.matrix(h));
        let mut c = [[Fe::ZERO; 2]; 2];
        for (i, row) in c.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = f.add(f.mul(a[i][0], b[0][j]), f.mul(a[i][1], b[1][j]));
            }
        }
        Ok(self.element_of(&c))
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(match g.kind {
            Kind::Tau => GroupElement {
                kind: Kind::Tau,
                alpha: self.field.inv(g.alpha)?,
            },
            Kind::Sigma => *g,
        })
    }

    /// `g . v`. Elements must belong to the group's field (unchecked here;
    /// see [`Group::act_tuple`]).
    #[inline]
    pub fn act_vec(&self, g: &GroupElement, v: &Vector2) -> Vector2 {
        let f = &self.field;
        let a = g.alpha;
        let ai = f.inv(a).expect("alpha is nonzero");
        match g.kind {
            Kind::Tau => Vector2::new(f.mul(a, v.c1), f.mul(ai, v.c2)),
            Kind::Sigma => Vector2::new(f.mul(a, v.c2), f.mul(ai, v.c1)),
        }
    }

    pub fn act_tuple(&self, g: &GroupElement, v: &PointTuple) -> Result<PointTuple> {
        self.check(g)?;
        v.check(&self.field)?;
        Ok(self.act_tuple_unchecked(g, v))
    }

    pub(crate) fn act_tuple_unchecked(&self, g: &GroupElement, v: &PointTuple) -> PointTuple {
        PointTuple(v.0.iter().map(|u| self.act_vec(g, u)).collect())
    }

    /// The `2m x 2m` matrix acting slot-wise as `g` on the coordinate vector
    /// `(x_1..x_m, y_1..y_m)`.
    pub fn block_matrix(&self, g: &GroupElement, m: usize) -> DenseMatrix {
        let g2 = self.matrix(g);
        let mut out = DenseMatrix::zeros(&self.field, 2 * m, 2 * m);
        for i in 0..m {
            out.set(i, i, g2[0][0]);
            out.set(i, m + i, g2[0][1]);
            out.set(m + i, i, g2[1][0]);
            out.set(m + i, m + i, g2[1][1]);
        }
        out
    }

    /// `g . f`, defined by `(g.f)(v) = f(g^-1 v)`.
    pub fn act_poly(&self, g: &GroupElement, f: &Poly) -> Result<Poly> {
        if f.field() != &self.field {
            return Err(Error::MixedFields);
        }
        let inv = self.inverse(g)?;
        f.linear_substitute(&self.block_matrix(&inv, f.m()))
    }

    /// All `2(q-1)` elements: every `tau` then every `sigma`, by `alpha`.
    pub fn elements(&self) -> Vec<GroupElement> {
        let units = self.field.units();
        units
            .clone()
            .map(|alpha| GroupElement {
                kind: Kind::Tau,
                alpha,
            })
            .chain(units.map(|alpha| GroupElement {
                kind: Kind::Sigma,
                alpha,
            }))
            .collect()
    }

    /// `sigma_1` and `tau_gamma` for a primitive `gamma`.
    pub fn generators(&self) -> [GroupElement; 2] {
        self.generators_with(self.field.primitive_element())
            .expect("primitive element is nonzero")
    }

    /// `sigma_1` and `tau_gamma` for a caller-chosen `gamma`.
    pub fn generators_with(&self, gamma: Fe) -> Result<[GroupElement; 2]> {
        Ok([self.sigma(Fe::ONE)?, self.tau(gamma)?])
    }

    /// All elements fixing `v`, by exhaustive search.
    pub fn stabilizer(&self, v: &Vector2) -> Vec<GroupElement> {
        self.elements()
            .into_iter()
            .filter(|g| self.act_vec(g, v) == *v)
            .collect()
    }

    /// All elements fixing every slot of `v`.
    pub fn tuple_stabilizer(&self, v: &PointTuple) -> Vec<GroupElement> {
        self.elements()
            .into_iter()
            .filter(|g| v.entries().iter().all(|u| self.act_vec(g, u) == *u))
            .collect()
    }

    /// Closure of a set of elements under composition.
    pub fn generated_by(&self, gens: &[GroupElement]) -> Result<Vec<GroupElement>> {
        let mut found = std::collections::BTreeSet::from([GroupElement::identity()]);
        let mut frontier = vec![GroupElement::identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.compose(g, &x)?;
                if found.insert(y) {
                    frontier.push(y);
                }
            }
        }
        Ok(found.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(q: u64) -> (Field, Group) {
        let f = Field::new(q).unwrap();
        let g = Group::new(&f);
        (f, g)
    }

    #[test]
    fn compose_examples() {
        let (f, g) = setup(7);
        for a in f.units() {
            for b in f.units() {
                let ta = g.tau(a).unwrap();
                let tb = g.tau(b).unwrap();
                let sa = g.sigma(a).unwrap();
                let sb = g.sigma(b).unwrap();
                let bi = f.inv(b).unwrap();
                assert_eq!(g.compose(&ta, &tb).unwrap(), g.tau(f.mul(a, b)).unwrap());
                assert_eq!(g.compose(&sa, &sb).unwrap(), g.tau(f.mul(a, bi)).unwrap());
            }
            let s1 = g.sigma(Fe::ONE).unwrap();
            assert_eq!(
                g.compose(&s1, &g.tau(a).unwrap()).unwrap(),
                g.sigma(f.inv(a).unwrap()).unwrap()
            );
        }
    }

    #[test]
    fn inverse_examples() {
        let (f, g) = setup(5);
        let a = f.from_int(2);
        assert_eq!(
            g.inverse(&g.tau(a).unwrap()).unwrap(),
            g.tau(f.from_int(3)).unwrap()
        );
        let s = g.sigma(a).unwrap();
        assert_eq!(g.inverse(&s).unwrap(), s);
        assert_eq!(
            g.inverse(&GroupElement::identity()).unwrap(),
            GroupElement::identity()
        );
        for x in g.elements() {
            assert!(g
                .compose(&x, &g.inverse(&x).unwrap())
                .unwrap()
                .is_identity());
        }
    }

    #[test]
    fn action_examples() {
        let (f, g) = setup(5);
        let (a, b, c) = (f.from_int(2), f.from_int(3), f.from_int(4));
        let ai = f.inv(a).unwrap();
        assert_eq!(
            g.act_vec(&g.tau(a).unwrap(), &Vector2::new(Fe::ONE, b)),
            Vector2::new(a, f.mul(ai, b))
        );
        assert_eq!(
            g.act_vec(&g.sigma(Fe::ONE).unwrap(), &Vector2::new(Fe::ONE, Fe::ZERO)),
            Vector2::new(Fe::ZERO, Fe::ONE)
        );
        assert_eq!(
            g.act_vec(&g.sigma(ai).unwrap(), &Vector2::new(b, c)),
            Vector2::new(f.mul(ai, c), f.mul(a, b))
        );
    }

    #[test]
    fn poly_action_examples() {
        let (f, g) = setup(5);
        let a = f.from_int(2);
        let x1 = Poly::x(&f, 1, 0);
        let y1 = Poly::y(&f, 1, 0);
        assert_eq!(g.act_poly(&g.sigma(Fe::ONE).unwrap(), &x1).unwrap(), y1);
        let tau = g.tau(a).unwrap();
        assert_eq!(g.act_poly(&tau, &y1).unwrap(), y1.scale(a));
        assert_eq!(g.act_poly(&tau, &x1).unwrap(), x1.scale(f.inv(a).unwrap()));
        let n1 = x1.mul(&y1).unwrap();
        assert_eq!(g.act_poly(&tau, &n1).unwrap(), n1);
        let other = Poly::x(&Field::new(7).unwrap(), 1, 0);
        assert_eq!(g.act_poly(&tau, &other), Err(Error::MixedFields));
    }

    #[test]
    fn element_counts() {
        for (q, n) in [(2, 2), (3, 4), (5, 8), (9, 16)] {
            let (_, g) = setup(q);
            let els = g.elements();
            assert_eq!(els.len(), n);
            let set: std::collections::BTreeSet<_> = els.iter().collect();
            assert_eq!(set.len(), n);
        }
        let (_, g) = setup(2);
        assert_eq!(
            g.elements(),
            vec![GroupElement::identity(), g.sigma(Fe::ONE).unwrap()]
        );
    }

    #[test]
    fn stabilizer_examples() {
        let (_, g) = setup(5);
        assert_eq!(
            g.stabilizer(&Vector2::new(Fe::ONE, Fe::ZERO)),
            vec![GroupElement::identity()]
        );
        assert_eq!(
            g.stabilizer(&Vector2::new(Fe::ONE, Fe::ONE)),
            vec![GroupElement::identity(), g.sigma(Fe::ONE).unwrap()]
        );
        assert_eq!(g.stabilizer(&Vector2::ZERO).len(), 8);
    }

    #[test]
    fn group_axioms() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let (_, g) = setup(q);
            let all = g.elements();
            let e = GroupElement::identity();
            for x in &all {
                assert_eq!(g.compose(&e, x).unwrap(), *x);
                let inv = g.inverse(x).unwrap();
                assert!(g.compose(x, &inv).unwrap().is_identity());
                for y in &all {
                    let xy = g.compose(x, y).unwrap();
                    assert!(all.contains(&xy));
                    for z in &all {
                        assert_eq!(
                            g.compose(&xy, z).unwrap(),
                            g.compose(x, &g.compose(y, z).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generators_generate() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16] {
            let (_, g) = setup(q);
            let mut all = g.elements();
            all.sort();
            assert_eq!(g.generated_by(&g.generators()).unwrap(), all);
        }
    }

    // Stabilizer of a nonzero (a, b): only the identity when a or b is zero,
    // otherwise the identity and sigma_{a/b}.
    #[test]
    fn stabilizers_match_formula() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let (f, g) = setup(q);
            for a in f.elements() {
                for b in f.elements() {
                    let v = Vector2::new(a, b);
                    let mut expected = vec![GroupElement::identity()];
                    if v.is_zero() {
                        expected = g.elements();
                    } else if !a.is_zero() && !b.is_zero() {
                        expected.push(g.sigma(f.div(a, b).unwrap()).unwrap());
                    }
                    let mut found = g.stabilizer(&v);
                    found.sort();
                    expected.sort();
                    assert_eq!(found, expected, "q={q} v={v}");
                }
            }
        }
    }

    #[test]
    fn independent_vectors_have_trivial_joint_stabilizer() {
        for q in [2, 3, 4, 5, 7] {
            let (f, g) = setup(q);
            let vs: Vec<Vector2> = f
                .elements()
                .flat_map(|a| f.elements().map(move |b| Vector2::new(a, b)))
                .filter(|v| !v.is_zero())
                .collect();
            for u in &vs {
                for v in &vs {
                    let dependent = f.elements().any(|c| v.scale(&f, c) == *u);
                    if dependent {
                        continue;
                    }
                    let joint = g.tuple_stabilizer(&PointTuple::new(vec![*u, *v]));
                    assert_eq!(joint, vec![GroupElement::identity()]);
                }
            }
        }
    }

    #[test]
    fn polynomial_action_composes() {
        for q in [2, 3, 4, 5] {
            let (f, g) = setup(q);
            let polys = [
                Poly::parse(&f, 2, "x1*y2 + x2*y1").unwrap(),
                Poly::parse(&f, 2, "x1^2*y2 + 1*x2").unwrap(),
                Poly::x(&f, 2, 0)
                    .pow(q as u32 - 1)
                    .add(&Poly::y(&f, 2, 1))
                    .unwrap(),
            ];
            let all = g.elements();
            for p in &polys {
                for x in &all {
                    for y in &all {
                        let xy = g.compose(x, y).unwrap();
                        assert_eq!(
                            g.act_poly(&xy, p).unwrap(),
                            g.act_poly(x, &g.act_poly(y, p).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn zero_alpha_and_foreign_elements() {
        let (_, g) = setup(3);
        assert_eq!(g.tau(Fe::ZERO), Err(Error::ZeroAlpha));
        let foreign = Field::new(7).unwrap().from_int(5);
        assert_eq!(g.sigma(foreign), Err(Error::MixedFields));
        let bad = GroupElement {
            kind: Kind::Tau,
            alpha: foreign,
        };
        assert_eq!(
            g.compose(&bad, &GroupElement::identity()),
            Err(Error::MixedFields)
        );
        let v = PointTuple::new(vec![Vector2::new(foreign, Fe::ZERO)]);
        assert_eq!(
            g.act_tuple(&GroupElement::identity(), &v),
            Err(Error::MixedFields)
        );
    }

    #[test]
    fn from_index_enumerates_lexicographically() {
        let (f, _) = setup(3);
        let pts: Vec<_> = (0..81).map(|i| PointTuple::from_index(&f, 2, i)).collect();
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[0], PointTuple::zero(2));
    }
}
