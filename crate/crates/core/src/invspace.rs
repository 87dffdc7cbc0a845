//! Exact linear algebra over GF(q) and the graded pieces of the invariant
//! ring.
//!
//! The degree-`d` invariants are the common kernel of `A_g - I` over the
//! monomial basis, for `g` ranging over the generators `sigma_1` and
//! `tau_gamma`. The action preserves degree, so inhomogeneous invariants of
//! degree at most `D` are exactly sums of homogeneous ones; bases are
//! therefore computed one degree at a time.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::{Fe, Field};
use crate::group::{Group, GroupElement};
use crate::poly::{monomial_count, monomials_of_degree, Monomial, Poly};

/// Largest monomial basis the fixed-space solver will accept.
pub const COLUMN_BUDGET: u128 = 5000;

/// Row-major matrix with entries in one field.
#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "DenseMatrix {}x{} over {}",
            self.rows, self.cols, self.field
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(Fe::to_string).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl DenseMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        DenseMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Fe::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Fe>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(field, rows.len(), cols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{cols} columns"),
                    found: format!("{} in row {r}", row.len()),
                });
            }
            for (c, x) in row.into_iter().enumerate() {
                m.set(r, c, field.check(x)?);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Fe {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, x: Fe) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[Fe] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Reduced row-echelon form and the pivot columns.
    pub fn rref(&self) -> (DenseMatrix, Vec<usize>) {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let v = f.mul(m.get(r, j), inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                let factor = m.get(i, c);
                if i == r || factor.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of the right kernel, one vector per free column, read off the RREF.
    pub fn kernel(&self) -> Vec<Vec<Fe>> {
        let f = &self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Fe::ZERO; self.cols];
                v[free] = Fe::ONE;
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = f.neg(r.get(row, free));
                }
                v
            })
            .collect()
    }
}

/// Basis of the homogeneous degree-`d` invariants of `F_q[V^m]`.
#[derive(Debug, Clone)]
pub struct GradedInvariantBasis {
    pub m: usize,
    pub d: u32,
    pub basis: Vec<Poly>,
}

impl GradedInvariantBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Coefficient vector of `p` against an indexed monomial basis.
fn coefficient_row(p: &Poly, index: &HashMap<Monomial, usize>) -> Vec<Fe> {
    let mut row = vec![Fe::ZERO; index.len()];
    for (mono, c) in p.terms() {
        row[index[mono]] = c;
    }
    row
}

fn check_budget(m: usize, d: u32) -> Result<u128> {
    let cols = monomial_count(2 * m, d);
    if cols > COLUMN_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "monomial basis",
            needed: cols,
            budget: COLUMN_BUDGET,
        });
    }
    Ok(cols)
}

/// Degree-`d` invariants using `sigma_1` and `tau_gamma` for the field's
/// primitive element `gamma`.
pub fn invariant_basis(m: usize, d: u32, field: &Field) -> Result<GradedInvariantBasis> {
    let group = Group::new(field);
    invariant_basis_for(&group, m, d, &group.generators())
}

/// Degree-`d` polynomials fixed by every element of `generators`.
pub fn invariant_basis_for(
    group: &Group,
    m: usize,
    d: u32,
    generators: &[GroupElement],
) -> Result<GradedInvariantBasis> {
    check_budget(m, d)?;
    let field = group.field();
    let monos = monomials_of_degree(2 * m, d);
    let index: HashMap<Monomial, usize> = monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, mono)| (mono, i))
        .collect();
    let n = monos.len();

    // Stack (A_g - I) for each generator; column j is the image of monomial j.
    let mut system = DenseMatrix::zeros(field, n * generators.len(), n);
    for (gi, g) in generators.iter().enumerate() {
        for (j, mono) in monos.iter().enumerate() {
            let image = group.act_poly(g, &Poly::monomial(field, m, mono.clone(), Fe::ONE))?;
            for (img_mono, c) in image.terms() {
                system.set(gi * n + index[img_mono], j, c);
            }
            let diag = field.sub(system.get(gi * n + j, j), Fe::ONE);
            system.set(gi * n + j, j, diag);
        }
    }
    let basis = system
        .kernel()
        .into_iter()
        .map(|v| Poly::from_terms(field, m, monos.iter().cloned().zip(v)).expect("same ring"))
        .collect();
    Ok(GradedInvariantBasis { m, d, basis })
}

/// Bases for degrees `1..=max_degree`; constants are excluded.
pub fn invariant_basis_up_to(
    m: usize,
    max_degree: u32,
    field: &Field,
) -> Result<Vec<GradedInvariantBasis>> {
    (1..=max_degree)
        .map(|d| invariant_basis(m, d, field))
        .collect()
}

/// Whether `p` lies in the span of `basis` (all homogeneous of one degree).
pub fn in_span(p: &Poly, basis: &[Poly]) -> Result<bool> {
    let Some(d) = p.degree() else {
        return Ok(true);
    };
    let monos = monomials_of_degree(p.nvars(), d);
    let index: HashMap<Monomial, usize> = monos
        .into_iter()
        .enumerate()
        .map(|(i, mono)| (mono, i))
        .collect();
    if !p.is_homogeneous() || basis.iter().any(|b| b.degree() != Some(d)) {
        return Ok(false);
    }
    let rows: Vec<Vec<Fe>> = basis.iter().map(|b| coefficient_row(b, &index)).collect();
    let base_rank = if rows.is_empty() {
        0
    } else {
        DenseMatrix::from_rows(p.field(), rows.clone())?.rank()
    };
    let mut with = rows;
    with.push(coefficient_row(p, &index));
    Ok(DenseMatrix::from_rows(p.field(), with)?.rank() == base_rank)
}

/// Per-degree outcome of the `m = 1` generation check.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeGeneration {
    pub d: u32,
    /// Dimension of the degree-`d` invariant space.
    pub dim: usize,
    /// `(a, b)` with `2a + (q-1)b = d`, i.e. the products `N1^a T1^b`.
    pub exponents: Vec<(u32, u32)>,
    /// Rank of the products' coefficient matrix.
    pub product_rank: usize,
    /// Rank of the products stacked with the invariant basis.
    pub joint_rank: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct M1GenerationReport {
    pub q: usize,
    pub degrees: Vec<DegreeGeneration>,
    pub ok: bool,
}

/// Checks, degree by degree up to `max_degree`, that the products
/// `N1^a T1^b` form a basis of the degree-`d` invariants of `F_q[V]`.
pub fn check_m1_generation(field: &Field, max_degree: u32) -> Result<M1GenerationReport> {
    let q = field.q() as u32;
    let n1 = Poly::x(field, 1, 0).mul(&Poly::y(field, 1, 0))?;
    let t1 = Poly::x(field, 1, 0)
        .pow(q - 1)
        .add(&Poly::y(field, 1, 0).pow(q - 1))?;
    let mut degrees = Vec::new();
    for d in 1..=max_degree {
        let basis = invariant_basis(1, d, field)?;
        let exponents: Vec<(u32, u32)> = (0..=d / 2)
            .filter(|a| (d - 2 * a) % (q - 1) == 0)
            .map(|a| (a, (d - 2 * a) / (q - 1)))
            .collect();
        let products: Vec<Poly> = exponents
            .iter()
            .map(|&(a, b)| n1.pow(a).mul(&t1.pow(b)))
            .collect::<Result<_>>()?;
        let index: HashMap<Monomial, usize> = monomials_of_degree(2, d)
            .into_iter()
            .enumerate()
            .map(|(i, mono)| (mono, i))
            .collect();
        let rank_of = |polys: &[&Poly]| -> Result<usize> {
            if polys.is_empty() {
                return Ok(0);
            }
            let rows = polys.iter().map(|p| coefficient_row(p, &index)).collect();
            Ok(DenseMatrix::from_rows(field, rows)?.rank())
        };
        let product_rank = rank_of(&products.iter().collect::<Vec<_>>())?;
        let joint_rank = rank_of(&products.iter().chain(&basis.basis).collect::<Vec<_>>())?;
        let ok = basis.dim() == exponents.len()
            && product_rank == exponents.len()
            && joint_rank == basis.dim();
        degrees.push(DegreeGeneration {
            d,
            dim: basis.dim(),
            exponents,
            product_rank,
            joint_rank,
            ok,
        });
    }
    let ok = degrees.iter().all(|d| d.ok);
    Ok(M1GenerationReport {
        q: field.q(),
        degrees,
        ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Field {
        Field::new(q).unwrap()
    }

    fn mat(field: &Field, rows: &[&[i64]]) -> DenseMatrix {
        DenseMatrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    // Independent rank oracle for prime fields: count distinct vectors in the row space.
    fn rank_by_span(field: &Field, rows: &[&[i64]]) -> usize {
        let p = field.q() as i64;
        let n = rows.len() as u32;
        let cols = rows[0].len();
        let mut span = std::collections::BTreeSet::new();
        for coeffs in 0..p.pow(n) {
            let mut c = coeffs;
            let mut v = vec![0i64; cols];
            for r in rows {
                let k = c % p;
                c /= p;
                for (j, x) in r.iter().enumerate() {
                    v[j] = (v[j] + k * x).rem_euclid(p);
                }
            }
            span.insert(v);
        }
        (span.len() as f64).log(p as f64).round() as usize
    }

    #[test]
    fn rref_examples() {
        let f3 = f(3);
        let id = DenseMatrix::identity(&f3, 3);
        assert_eq!(id.rref(), (id.clone(), vec![0, 1, 2]));

        let f2 = f(2);
        let (r, piv) = mat(&f2, &[&[1, 1], &[1, 1]]).rref();
        assert_eq!(r, mat(&f2, &[&[1, 1], &[0, 0]]));
        assert_eq!(piv, vec![0]);

        // det = 1 - 4 = 0 mod 3
        let m = mat(&f3, &[&[1, 2], &[2, 1]]);
        let (r, piv) = m.rref();
        assert_eq!(r, mat(&f3, &[&[1, 2], &[0, 0]]));
        assert_eq!(piv.len(), rank_by_span(&f3, &[&[1, 2], &[2, 1]]));
        assert_eq!(piv.len(), 1);
    }

    #[test]
    fn rank_matches_span_oracle() {
        let f5 = f(5);
        let cases: [&[&[i64]]; 3] = [
            &[&[1, 2, 3], &[2, 4, 1], &[3, 1, 4]],
            &[&[1, 0, 4, 2], &[2, 0, 3, 4], &[0, 1, 1, 1]],
            &[&[0, 0], &[0, 0]],
        ];
        for rows in cases {
            assert_eq!(mat(&f5, rows).rank(), rank_by_span(&f5, rows));
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f7 = f(7);
        let m = mat(&f7, &[&[1, 2, 3, 4], &[2, 4, 6, 2]]);
        let ker = m.kernel();
        assert_eq!(ker.len(), 2);
        for v in ker {
            let col =
                DenseMatrix::from_rows(&f7, v.into_iter().map(|x| vec![x]).collect()).unwrap();
            let prod = m.mul(&col).unwrap();
            assert!((0..2).all(|r| prod.get(r, 0).is_zero()));
        }
    }

    #[test]
    fn basis_examples() {
        assert_eq!(invariant_basis(1, 1, &f(3)).unwrap().dim(), 0);
        let f2 = f(2);
        let b = invariant_basis(1, 1, &f2).unwrap();
        assert_eq!(b.basis, vec![Poly::parse(&f2, 1, "x1 + y1").unwrap()]);

        let f3 = f(3);
        let b = invariant_basis(1, 2, &f3).unwrap();
        assert_eq!(b.dim(), 2);
        for s in ["x1*y1", "x1^2 + y1^2"] {
            assert!(in_span(&Poly::parse(&f3, 1, s).unwrap(), &b.basis).unwrap());
        }
        assert!(!in_span(&Poly::parse(&f3, 1, "x1^2").unwrap(), &b.basis).unwrap());
    }

    #[test]
    fn basis_up_to_examples() {
        let f2 = f(2);
        let bases = invariant_basis_up_to(1, 2, &f2).unwrap();
        assert_eq!(
            bases.iter().map(|b| b.dim()).collect::<Vec<_>>(),
            vec![1, 2]
        );
        for s in ["x1*y1", "x1^2 + y1^2"] {
            assert!(in_span(&Poly::parse(&f2, 1, s).unwrap(), &bases[1].basis).unwrap());
        }
        assert!(invariant_basis_up_to(1, 1, &f(3))
            .unwrap()
            .iter()
            .all(|b| b.dim() == 0));
        assert!(invariant_basis_up_to(2, 0, &f(5)).unwrap().is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        // C(2*3 + 12 - 1, 12) = 6188 > 5000
        assert!(matches!(
            invariant_basis(3, 12, &f(2)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn m1_generation_examples() {
        let r = check_m1_generation(&f(2), 4).unwrap();
        assert!(r.ok);
        assert_eq!(r.degrees[1].exponents, vec![(0, 2), (1, 0)]);
        assert_eq!(r.degrees[1].dim, 2);

        let r = check_m1_generation(&f(3), 4).unwrap();
        assert!(r.ok);
        assert_eq!(r.degrees[2].dim, 0);
        assert!(r.degrees[2].exponents.is_empty());
        assert_eq!(r.degrees[3].exponents, vec![(0, 2), (1, 1), (2, 0)]);
        assert_eq!(r.degrees[3].dim, 3);
    }

    #[test]
    fn basis_is_fixed_by_all_elements() {
        for q in [2, 3, 4, 5] {
            let field = f(q);
            let group = Group::new(&field);
            for m in 1..=2 {
                for d in 1..=(q as u32) {
                    for b in invariant_basis(m, d, &field).unwrap().basis {
                        for g in group.elements() {
                            assert_eq!(group.act_poly(&g, &b).unwrap(), b);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dimension_independent_of_primitive_choice() {
        for q in [7u64, 8, 9] {
            let field = f(q);
            let group = Group::new(&field);
            let prims: Vec<Fe> = field
                .units()
                .filter(|&a| field.multiplicative_order(a).unwrap() == field.q() - 1)
                .collect();
            assert!(prims.len() >= 2);
            for m in 1..=2 {
                for d in 1..=(q as u32 - 1) {
                    let dims: Vec<usize> = prims
                        .iter()
                        .take(2)
                        .map(|&g| {
                            let gens = group.generators_with(g).unwrap();
                            invariant_basis_for(&group, m, d, &gens).unwrap().dim()
                        })
                        .collect();
                    assert_eq!(dims[0], dims[1], "q={q} m={m} d={d}");
                }
            }
        }
    }
}
