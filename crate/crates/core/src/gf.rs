//! Exact arithmetic in GF(p^k).
//!
//! Elements are stored as their position in the canonical order of the
//! field, which coincides with the base-`p` integer encoding of the
//! residue polynomial `c_0 + c_1 t + ... + c_{k-1} t^{k-1}` (so `0` and `1`
//! come first and prime fields are ordered like the integers). All
//! arithmetic is table driven; tables are built once per [`Field`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 64;

/// A field element, identified by its index in the canonical order.
///
/// The derived `Ord` is the canonical total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fe(u8);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    k: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Handle to a finite field GF(q). Cheap to clone; immutable.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        // the modulus is a deterministic function of q
        Arc::ptr_eq(&self.0, &other.0) || self.0.q == other.0.q
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.0.p)
            .field("k", &self.0.k)
            .field("modulus", &self.0.modulus)
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.q)
    }
}

/// Splits `q` into `(p, k)` with `q = p^k`, `p` prime.
pub fn factor_prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotAPrimePower(q));
    }
    let p = (2..=q).find(|d| q % d == 0).unwrap();
    let mut rest = q;
    let mut k = 0;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(Error::NotAPrimePower(q));
    }
    Ok((p as u32, k))
}

// Polynomials over Z_p, low degree first, no trailing zeros.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inverse_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = r[r.len() - 1] * lead_inv % p;
        for (i, &mi) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p - c * mi % p) % p;
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    trim(out)
}

fn inverse_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|x| a * x % p == 1).expect("nonzero residue")
}

fn digits(mut n: usize, p: u32, len: usize) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = (n % p as usize) as u32;
            n /= p as usize;
            d
        })
        .collect()
}

/// Whether the monic polynomial `f` (low degree first) is irreducible over
/// Z_p, by trial division with every monic polynomial of degree at most
/// half its degree.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        let count = (p as usize).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree
/// `k` over Z_p, comparing coefficients from the highest degree down.
pub fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    let count = (p as usize).pow(k);
    (0..count)
        .map(|low| {
            let mut f = digits(low, p, k as usize);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("irreducible polynomials exist in every degree")
}

impl Field {
    /// Builds GF(q). Fails if `q` is not a prime power or exceeds [`MAX_ORDER`].
    pub fn new(q: u64) -> Result<Field> {
        let (p, k) = factor_prime_power(q)?;
        if q > MAX_ORDER {
            return Err(Error::FieldTooLarge { q, max: MAX_ORDER });
        }
        let q = q as usize;
        let modulus = smallest_irreducible(p, k);
        let residues: Vec<Vec<u32>> = (0..q).map(|i| digits(i, p, k as usize)).collect();
        let encode = |c: &[u32]| -> u8 {
            c.iter()
                .rev()
                .fold(0usize, |acc, &d| acc * p as usize + d as usize) as u8
        };

        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                let sum: Vec<u32> = residues[a]
                    .iter()
                    .zip(&residues[b])
                    .map(|(x, y)| (x + y) % p)
                    .collect();
                add[a * q + b] = encode(&sum);
                let mut prod = poly_rem(
                    &poly_mul(&trim(residues[a].clone()), &trim(residues[b].clone()), p),
                    &modulus,
                    p,
                );
                prod.resize(k as usize, 0);
                mul[a * q + b] = encode(&prod);
            }
        }
        let neg = (0..q)
            .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
            .collect();
        let inv = (0..q)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..q)
                        .find(|&b| mul[a * q + b] == 1)
                        .expect("field has inverses") as u8
                }
            })
            .collect();

        Ok(Field(Arc::new(Tables {
            p,
            k,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
        })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn k(&self) -> u32 {
        self.0.k
    }

    /// The field order q.
    pub fn q(&self) -> usize {
        self.0.q
    }

    /// The defining polynomial (low degree first). For prime fields this is `x`.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        Fe::ZERO
    }

    #[inline]
    pub fn one(&self) -> Fe {
        Fe::ONE
    }

    /// Element with the given canonical index.
    pub fn element(&self, index: usize) -> Result<Fe> {
        if index < self.0.q {
            Ok(Fe(index as u8))
        } else {
            Err(Error::MixedFields)
        }
    }

    /// Confirms that `a` is an element of this field.
    pub fn check(&self, a: Fe) -> Result<Fe> {
        self.element(a.index())
    }

    pub fn contains(&self, a: Fe) -> bool {
        a.index() < self.0.q
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        Fe(n.rem_euclid(self.0.p as i64) as u8)
    }

    /// Element with the given residue coefficients (low degree first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Fe> {
        if coeffs.len() > self.0.k as usize || coeffs.iter().any(|&c| c >= self.0.p) {
            return Err(Error::MixedFields);
        }
        let idx = coeffs
            .iter()
            .rev()
            .fold(0usize, |acc, &d| acc * self.0.p as usize + d as usize);
        Ok(Fe(idx as u8))
    }

    /// Residue coefficients of `a`, length k, low degree first.
    pub fn coeffs(&self, a: Fe) -> Vec<u32> {
        digits(a.index(), self.0.p, self.0.k as usize)
    }

    /// All q elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> + Clone {
        (0..self.0.q).map(|i| Fe(i as u8))
    }

    /// The nonzero elements in canonical order.
    pub fn units(&self) -> impl Iterator<Item = Fe> + Clone {
        (1..self.0.q).map(|i| Fe(i as u8))
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.0.add[a.index() * self.0.q + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.0.neg[a.index()])
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        Fe(self.0.mul[a.index() * self.0.q + b.index()])
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(Fe(self.0.inv[a.index()]))
        }
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, mut n: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, a: Fe) -> Result<usize> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut x = a;
        let mut n = 1;
        while x != Fe::ONE {
            x = self.mul(x, a);
            n += 1;
        }
        Ok(n)
    }

    /// The first element in canonical order that generates the unit group.
    pub fn primitive_element(&self) -> Fe {
        let target = self.0.q - 1;
        self.units()
            .find(|&a| self.multiplicative_order(a).unwrap() == target)
            .expect("the unit group of a finite field is cyclic")
    }

    /// Human-readable residue form, e.g. `t+1` for index 3 in GF(4).
    pub fn residue_string(&self, a: Fe) -> String {
        if self.is_prime_field() {
            return a.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let var = match i {
                    0 => String::new(),
                    1 => "t".to_string(),
                    _ => format!("t^{i}"),
                };
                match (c, i) {
                    (_, 0) => c.to_string(),
                    (1, _) => var,
                    _ => format!("{c}{var}"),
                }
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factoring() {
        assert_eq!(factor_prime_power(2).unwrap(), (2, 1));
        assert_eq!(factor_prime_power(64).unwrap(), (2, 6));
        assert_eq!(factor_prime_power(49).unwrap(), (7, 2));
        assert_eq!(factor_prime_power(12), Err(Error::NotAPrimePower(12)));
        assert_eq!(factor_prime_power(1), Err(Error::NotAPrimePower(1)));
        assert_eq!(factor_prime_power(0), Err(Error::NotAPrimePower(0)));
    }

    #[test]
    fn field_make_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!((f2.p(), f2.k(), f2.q()), (2, 1, 2));
        let f4 = Field::new(4).unwrap();
        assert_eq!((f4.p(), f4.k()), (2, 2));
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(Field::new(12).unwrap_err(), Error::NotAPrimePower(12));
        assert!(matches!(Field::new(81), Err(Error::FieldTooLarge { .. })));
    }

    // Brute-force root test: a cubic or quadratic is irreducible iff it has no root.
    fn has_root(f: &[u32], p: u32) -> bool {
        (0..p).any(|x| f.iter().rev().fold(0, |acc, &c| (acc * x + c) % p) == 0)
    }

    #[test]
    fn moduli_are_smallest_rootless_for_low_degree() {
        for (p, k) in [(2, 2), (2, 3), (3, 2), (3, 3), (5, 2), (7, 2)] {
            let m = smallest_irreducible(p, k);
            assert!(!has_root(&m, p));
            let count = (p as usize).pow(k);
            let first = (0..count)
                .map(|low| {
                    let mut f = digits(low, p, k as usize);
                    f.push(1);
                    f
                })
                .find(|f| !has_root(f, p))
                .unwrap();
            assert_eq!(m, first, "p={p} k={k}");
        }
        // degree 4 over F2: x^4+x+1, and x^4+x^2+1 = (x^2+x+1)^2 is rejected
        assert_eq!(smallest_irreducible(2, 4), vec![1, 1, 0, 0, 1]);
        assert!(!is_irreducible(&[1, 0, 1, 0, 1], 2));
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(f2.add(Fe::ONE, Fe::ONE), Fe::ZERO);
        let f3 = Field::new(3).unwrap();
        assert_eq!(f3.inv(f3.from_int(2)).unwrap(), f3.from_int(2));
        assert_eq!(f3.inv(Fe::ZERO), Err(Error::DivisionByZero));
        let f4 = Field::new(4).unwrap();
        let t = f4.from_coeffs(&[0, 1]).unwrap();
        let t1 = f4.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(f4.mul(t, t), t1);
        assert_eq!(f4.residue_string(t1), "t+1");
    }

    #[test]
    fn enumerate_examples() {
        let f2 = Field::new(2).unwrap();
        assert_eq!(f2.elements().collect::<Vec<_>>(), vec![Fe(0), Fe(1)]);
        let f4 = Field::new(4).unwrap();
        let names: Vec<_> = f4.elements().map(|a| f4.residue_string(a)).collect();
        assert_eq!(names, ["0", "1", "t", "t+1"]);
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64] {
            let f = Field::new(q).unwrap();
            let all: Vec<_> = f.elements().collect();
            assert_eq!(all.len() as u64, q);
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(Field::new(2).unwrap().primitive_element(), Fe::ONE);
        let f3 = Field::new(3).unwrap();
        assert_eq!(f3.primitive_element(), f3.from_int(2));
        let f5 = Field::new(5).unwrap();
        assert_eq!(f5.primitive_element(), f5.from_int(2));
        let f9 = Field::new(9).unwrap();
        assert_eq!(f9.multiplicative_order(f9.primitive_element()).unwrap(), 8);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Field::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.pow(a, q), a, "Frobenius in GF({q})");
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fe::ONE);
                    assert_eq!(f.pow(a, q - 1), Fe::ONE);
                }
                assert_eq!(f.add(a, f.neg(a)), Fe::ZERO);
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn foreign_elements_rejected() {
        let f3 = Field::new(3).unwrap();
        let f5 = Field::new(5).unwrap();
        assert_eq!(f3.check(f5.from_int(4)), Err(Error::MixedFields));
        assert!(f3.check(f5.from_int(2)).is_ok());
        assert_ne!(f3, f5);
        assert_eq!(f3, Field::new(3).unwrap());
    }
}
