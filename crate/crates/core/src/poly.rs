//! Sparse polynomials over GF(q) in the coordinate functions
//! `x_1..x_m, y_1..y_m` of `V^m`.
//!
//! Variables are numbered `0..2m`: slot `i` contributes `x_{i+1}` at index
//! `i` and `y_{i+1}` at index `m + i`. Exponents are never reduced modulo
//! `x^q - x`; polynomials are formal objects and keep their true degree.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::group::PointTuple;
use crate::invspace::DenseMatrix;

/// Exponent vector of a monomial, ordered `x_1..x_m, y_1..y_m`.
///
/// Ordered graded-lexicographically: first by total degree, then
/// lexicographically on the exponent tuple.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `d` in `nvars` variables, ascending.
pub fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Monomial> {
    fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[pos] = e;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    if nvars == 0 {
        return if d == 0 {
            vec![Monomial(Vec::new())]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; nvars], &mut out);
    out.sort();
    out
}

/// Number of monomials of degree `d` in `n` variables, `C(n + d - 1, d)`.
pub fn monomial_count(n: usize, d: u32) -> u128 {
    if n == 0 {
        return u128::from(d == 0);
    }
    let mut c: u128 = 1;
    for i in 0..d as u128 {
        c = c * (n as u128 + i) / (i + 1);
    }
    c
}

/// A polynomial in `F_q[x_1..x_m, y_1..y_m]` in normalized sparse form.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    m: usize,
    terms: BTreeMap<Monomial, Fe>,
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.m.hash(state);
        self.terms.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}; m={}]({})", self.field, self.m, self)
    }
}

impl Poly {
    pub fn zero(field: &Field, m: usize) -> Self {
        Poly {
            field: field.clone(),
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, m: usize, c: Fe) -> Self {
        Self::monomial(field, m, Monomial::one(2 * m), c)
    }

    pub fn monomial(field: &Field, m: usize, mono: Monomial, c: Fe) -> Self {
        assert_eq!(mono.0.len(), 2 * m, "monomial arity");
        let mut p = Self::zero(field, m);
        if !c.is_zero() {
            p.terms.insert(mono, c);
        }
        p
    }

    /// The variable with index `var` (`x_{var+1}` for `var < m`, else `y_{var-m+1}`).
    pub fn var(field: &Field, m: usize, var: usize) -> Self {
        let mut e = vec![0; 2 * m];
        e[var] = 1;
        Self::monomial(field, m, Monomial(e), Fe::ONE)
    }

    /// `x_{slot+1}`.
    pub fn x(field: &Field, m: usize, slot: usize) -> Self {
        Self::var(field, m, slot)
    }

    /// `y_{slot+1}`.
    pub fn y(field: &Field, m: usize, slot: usize) -> Self {
        Self::var(field, m, m + slot)
    }

    pub fn from_terms(
        field: &Field,
        m: usize,
        terms: impl IntoIterator<Item = (Monomial, Fe)>,
    ) -> Result<Self> {
        let mut p = Self::zero(field, m);
        for (mono, c) in terms {
            if mono.0.len() != 2 * m {
                return Err(Error::MixedArity {
                    expected: 2 * m,
                    found: mono.0.len(),
                });
            }
            field.check(c)?;
            p.add_term(mono, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, mono: Monomial, c: Fe) {
        if c.is_zero() {
            return;
        }
        let f = &self.field;
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of vector slots.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn nvars(&self) -> usize {
        2 * self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, Fe)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn coefficient(&self, mono: &Monomial) -> Fe {
        self.terms.get(mono).copied().unwrap_or(Fe::ZERO)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn compatible(&self, other: &Poly) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.m != other.m {
            return Err(Error::MixedArity {
                expected: self.m,
                found: other.m,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (mono, &c) in &other.terms {
            out.add_term(mono.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly {
        self.scale(self.field.neg(Fe::ONE))
    }

    pub fn scale(&self, c: Fe) -> Poly {
        let mut out = Self::zero(&self.field, self.m);
        if c.is_zero() {
            return out;
        }
        out.terms = self
            .terms
            .iter()
            .map(|(k, &v)| (k.clone(), self.field.mul(v, c)))
            .collect();
        out
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.compatible(other)?;
        let mut out = Self::zero(&self.field, self.m);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Self::constant(&self.field, self.m, Fe::ONE);
        for _ in 0..n {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Evaluates at a point of `V^m`.
    pub fn eval(&self, point: &PointTuple) -> Result<Fe> {
        if point.m() != self.m {
            return Err(Error::MixedArity {
                expected: self.m,
                found: point.m(),
            });
        }
        for v in point.entries() {
            self.field.check(v.c1)?;
            self.field.check(v.c2)?;
        }
        Ok(self.eval_coords(&point.coords()))
    }

    /// Evaluates at a coordinate vector ordered like the variables.
    ///
    /// Panics if `coords.len() != 2m`.
    pub fn eval_coords(&self, coords: &[Fe]) -> Fe {
        assert_eq!(coords.len(), 2 * self.m);
        let f = &self.field;
        self.terms.iter().fold(Fe::ZERO, |acc, (mono, &c)| {
            let v = mono
                .0
                .iter()
                .zip(coords)
                .filter(|(&e, _)| e > 0)
                .fold(c, |t, (&e, &x)| f.mul(t, f.pow(x, u64::from(e))));
            f.add(acc, v)
        })
    }

    /// Replaces variable `j` by the linear form `sum_k l[j][k] * z_k` and
    /// re-expands, i.e. returns `z -> self(l * z)`.
    pub fn linear_substitute(&self, l: &DenseMatrix) -> Result<Poly> {
        let n = self.nvars();
        if l.rows() != n || l.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                found: format!("{}x{}", l.rows(), l.cols()),
            });
        }
        if l.field() != &self.field {
            return Err(Error::MixedFields);
        }
        let forms: Vec<Poly> = (0..n)
            .map(|j| {
                let mut form = Self::zero(&self.field, self.m);
                for k in 0..n {
                    let c = l.get(j, k);
                    if !c.is_zero() {
                        let mut e = vec![0; n];
                        e[k] = 1;
                        form.add_term(Monomial(e), c);
                    }
                }
                form
            })
            .collect();
        // powers[j][e] = forms[j]^e, filled on demand
        let mut powers: Vec<Vec<Poly>> = forms
            .iter()
            .map(|f| vec![Self::constant(&self.field, self.m, Fe::ONE), f.clone()])
            .collect();
        let mut out = Self::zero(&self.field, self.m);
        for (mono, &c) in &self.terms {
            let mut prod = Self::constant(&self.field, self.m, c);
            for (j, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(&forms[j])?;
                    powers[j].push(next);
                }
                prod = prod.mul(&powers[j][e as usize])?;
            }
            for (mono, &c) in &prod.terms {
                out.add_term(mono.clone(), c);
            }
        }
        Ok(out)
    }

    /// Moves slot `i` to slot `slot_map[i]` in a ring with `new_m` slots.
    pub fn reindex(&self, slot_map: &[usize], new_m: usize) -> Result<Poly> {
        if slot_map.len() != self.m {
            return Err(Error::MixedArity {
                expected: self.m,
                found: slot_map.len(),
            });
        }
        if let Some(&bad) = slot_map.iter().find(|&&s| s >= new_m) {
            return Err(Error::DimensionMismatch {
                expected: format!("slot < {new_m}"),
                found: bad.to_string(),
            });
        }
        let mut out = Self::zero(&self.field, new_m);
        for (mono, &c) in &self.terms {
            let mut e = vec![0; 2 * new_m];
            for (i, &target) in slot_map.iter().enumerate() {
                e[target] += mono.0[i];
                e[new_m + target] += mono.0[self.m + i];
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Parses the textual form produced by `Display`, e.g. `x1*y2 + 2*x2^3`.
    ///
    /// Coefficients are canonical-order indices; over prime fields any
    /// integer is accepted and reduced modulo `p`.
    pub fn parse(field: &Field, m: usize, text: &str) -> Result<Poly> {
        Parser {
            field,
            m,
            src: text.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

fn var_name(m: usize, var: usize) -> String {
    if var < m {
        format!("x{}", var + 1)
    } else {
        format!("y{}", var - m + 1)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (mono, c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if *c != Fe::ONE || mono.degree() == 0 {
                factors.push(c.to_string());
            }
            for (var, &e) in mono.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(var_name(self.m, var)),
                    _ => factors.push(format!("{}^{}", var_name(self.m, var), e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    field: &'a Field,
    m: usize,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .or_else(|_| self.err("number out of range"))
    }

    fn coefficient(&mut self, n: u64) -> Result<Fe> {
        if self.field.is_prime_field() {
            Ok(self.field.from_int((n % u64::from(self.field.p())) as i64))
        } else if (n as usize) < self.field.q() {
            self.field.element(n as usize)
        } else {
            self.err(format!(
                "coefficient {n} is not an element index of {}",
                self.field
            ))
        }
    }

    fn parse(mut self) -> Result<Poly> {
        let mut out = Poly::zero(self.field, self.m);
        loop {
            let (mono, c) = self.term()?;
            out.add_term(mono, c);
            match self.peek() {
                None => return Ok(out),
                Some(b'+') => self.pos += 1,
                Some(ch) => return self.err(format!("unexpected '{}'", ch as char)),
            }
        }
    }

    fn term(&mut self) -> Result<(Monomial, Fe)> {
        let mut coeff = Fe::ONE;
        let mut exps = vec![0u32; 2 * self.m];
        loop {
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let n = self.number()?;
                    coeff = self.field.mul(coeff, self.coefficient(n)?);
                }
                Some(ch @ (b'x' | b'y')) => {
                    self.pos += 1;
                    let idx = self.number()? as usize;
                    if idx == 0 || idx > self.m {
                        return self.err(format!("variable index {idx} outside 1..={}", self.m));
                    }
                    let var = if ch == b'x' {
                        idx - 1
                    } else {
                        self.m + idx - 1
                    };
                    let mut e = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        e = u32::try_from(self.number()?)
                            .or_else(|_| self.err("exponent too large"))?;
                    }
                    exps[var] += e;
                }
                _ => return self.err("expected a coefficient or variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                return Ok((Monomial(exps), coeff));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Vector2;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn p(field: &Field, m: usize, s: &str) -> Poly {
        Poly::parse(field, m, s).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = f(2);
        let s = Poly::x(&f2, 1, 0).add(&Poly::y(&f2, 1, 0)).unwrap();
        assert_eq!(s.mul(&s).unwrap(), p(&f2, 1, "x1^2 + y1^2"));

        let f3 = f(3);
        let xy = Poly::x(&f3, 1, 0).mul(&Poly::y(&f3, 1, 0)).unwrap();
        assert_eq!(xy.to_string(), "x1*y1");
        let s = Poly::x(&f3, 1, 0).add(&Poly::y(&f3, 1, 0)).unwrap();
        assert_eq!(s.add(&s).unwrap().to_string(), "2*x1 + 2*y1");
        assert!(s.sub(&s).unwrap().is_zero());
    }

    #[test]
    fn mixed_operands_rejected() {
        let a = Poly::x(&f(2), 1, 0);
        let b = Poly::x(&f(3), 1, 0);
        assert_eq!(a.add(&b), Err(Error::MixedFields));
        let c = Poly::x(&f(2), 2, 0);
        assert!(matches!(a.mul(&c), Err(Error::MixedArity { .. })));
    }

    #[test]
    fn eval_examples() {
        let f5 = f(5);
        let alpha = f5.from_int(3);
        let v = PointTuple::new(vec![Vector2::new(Fe::ONE, alpha)]);
        assert_eq!(p(&f5, 1, "x1*y1").eval(&v).unwrap(), alpha);

        let v = PointTuple::new(vec![
            Vector2::new(Fe::ONE, Fe::ZERO),
            Vector2::new(Fe::ZERO, Fe::ONE),
        ]);
        assert_eq!(p(&f5, 2, "x1*y2 + x2*y1").eval(&v).unwrap(), Fe::ONE);

        let f3 = f(3);
        let two = f3.from_int(2);
        let v = PointTuple::new(vec![Vector2::new(two, two)]);
        assert_eq!(p(&f3, 1, "x1^2 + y1^2").eval(&v).unwrap(), two);

        let wrong = PointTuple::new(vec![Vector2::new(two, two); 2]);
        assert!(matches!(
            p(&f3, 1, "x1").eval(&wrong),
            Err(Error::MixedArity { .. })
        ));
        let foreign = PointTuple::new(vec![Vector2::new(f(7).from_int(6), Fe::ZERO)]);
        assert_eq!(p(&f3, 1, "x1").eval(&foreign), Err(Error::MixedFields));
    }

    #[test]
    fn substitution_examples() {
        let f5 = f(5);
        let x1 = p(&f5, 1, "x1");
        assert_eq!(
            x1.linear_substitute(&DenseMatrix::identity(&f5, 2))
                .unwrap(),
            x1
        );

        let swap =
            DenseMatrix::from_rows(&f5, vec![vec![Fe::ZERO, Fe::ONE], vec![Fe::ONE, Fe::ZERO]])
                .unwrap();
        assert_eq!(x1.linear_substitute(&swap).unwrap(), p(&f5, 1, "y1"));

        let alpha = f5.from_int(2);
        let diag = DenseMatrix::from_rows(
            &f5,
            vec![
                vec![f5.inv(alpha).unwrap(), Fe::ZERO],
                vec![Fe::ZERO, alpha],
            ],
        )
        .unwrap();
        let n1 = p(&f5, 1, "x1*y1");
        assert_eq!(n1.linear_substitute(&diag).unwrap(), n1);
        assert!(matches!(
            n1.linear_substitute(&DenseMatrix::identity(&f5, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rendering_and_parsing() {
        let f4 = f(4);
        let poly = p(&f4, 2, "3*x1^2*y2 + 2 + x2 + 2*y1");
        assert_eq!(poly.to_string(), "3*x1^2*y2 + x2 + 2*y1 + 2");
        assert_eq!(Poly::parse(&f4, 2, &poly.to_string()).unwrap(), poly);
        assert_eq!(p(&f4, 1, "0").to_string(), "0");
        assert_eq!(p(&f(3), 1, "5*x1").to_string(), "2*x1");
        assert!(Poly::parse(&f4, 2, "4*x1").is_err());
        assert!(Poly::parse(&f4, 2, "x3").is_err());
        assert!(Poly::parse(&f4, 2, "x1 +").is_err());
        assert!(Poly::parse(&f4, 2, "x1 - y1").is_err());
    }

    #[test]
    fn degree_and_monomials() {
        let f2 = f(2);
        let poly = p(&f2, 2, "x1*y2 + x1");
        assert_eq!(poly.degree(), Some(2));
        assert!(!poly.is_homogeneous());
        assert_eq!(Poly::zero(&f2, 1).degree(), None);
        for (n, d) in [(2, 0), (2, 3), (4, 6), (6, 5)] {
            assert_eq!(
                monomials_of_degree(n, d).len() as u128,
                monomial_count(n, d)
            );
        }
    }

    #[test]
    fn reindex_moves_slots() {
        let f3 = f(3);
        let u = p(&f3, 2, "x1*y2 + x2*y1");
        assert_eq!(u.reindex(&[0, 2], 3).unwrap(), p(&f3, 3, "x1*y3 + x3*y1"));
        assert!(u.reindex(&[0, 3], 3).is_err());
    }
}
