//! Elements of graded free modules `F = ⊕ S·e_i`: flat sorted term lists.
//!
//! Two module term orders are used. `Top` is term-over-position grevlex
//! (monomials compared first, ties broken toward the *lower* component
//! index). `Elim { split }` makes every term in a component `< split`
//! greater than every term in a component `>= split`, with `Top` inside
//! each block; it is the elimination order behind kernel and lift
//! computations. Both are multiplicative, so multiplying by a monomial
//! never reorders terms.

use crate::field::{BaseField, Coeff};
use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::ring::PolyRing;
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModOrder {
    Top,
    Elim { split: usize },
}

impl ModOrder {
    fn block(&self, comp: usize) -> usize {
        match self {
            ModOrder::Top => 0,
            ModOrder::Elim { split } => usize::from(comp >= *split),
        }
    }

    /// Compare positions `(comp, mono)`; greater means earlier in a stored
    /// element.
    pub fn cmp(&self, a_comp: usize, a_mono: &Monomial, b_comp: usize, b_mono: &Monomial) -> Ordering {
        // Lower block index dominates.
        match self.block(a_comp).cmp(&self.block(b_comp)) {
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
            Ordering::Equal => {}
        }
        match a_mono.cmp_grevlex(b_mono) {
            Ordering::Equal => b_comp.cmp(&a_comp),
            ord => ord,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecTerm {
    pub comp: usize,
    pub mono: Monomial,
    pub coeff: Coeff,
}

/// A vector in a free module of the given rank, terms sorted strictly
/// descending under a fixed [`ModOrder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecElem {
    pub rank: usize,
    pub terms: Vec<VecTerm>,
}

impl VecElem {
    pub fn zero(rank: usize) -> Self {
        VecElem { rank, terms: Vec::new() }
    }

    pub fn unit(rank: usize, comp: usize, nvars: usize, field: &BaseField) -> Self {
        VecElem {
            rank,
            terms: vec![VecTerm { comp, mono: Monomial::one(nvars), coeff: field.one() }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&VecTerm> {
        self.terms.first()
    }

    /// Are all terms in one single component?
    pub fn single_component(&self) -> Option<usize> {
        let c = self.terms.first()?.comp;
        self.terms.iter().all(|t| t.comp == c).then_some(c)
    }

    pub fn normalize(field: &BaseField, order: ModOrder, rank: usize, mut ts: Vec<VecTerm>) -> Self {
        ts.sort_by(|a, b| order.cmp(b.comp, &b.mono, a.comp, &a.mono));
        let mut out: Vec<VecTerm> = Vec::with_capacity(ts.len());
        for t in ts {
            if let Some(last) = out.last_mut() {
                if last.comp == t.comp && last.mono == t.mono {
                    last.coeff = field.add(&last.coeff, &t.coeff);
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| !t.coeff.is_zero());
        VecElem { rank, terms: out }
    }

    pub fn add(&self, other: &VecElem, field: &BaseField, order: ModOrder) -> VecElem {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let a = &self.terms[i];
            let b = &other.terms[j];
            match order.cmp(a.comp, &a.mono, b.comp, &b.mono) {
                Ordering::Greater => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = field.add(&a.coeff, &b.coeff);
                    if !c.is_zero() {
                        out.push(VecTerm { comp: a.comp, mono: a.mono.clone(), coeff: c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        VecElem { rank: self.rank, terms: out }
    }

    pub fn neg(&self, field: &BaseField) -> VecElem {
        VecElem {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|t| VecTerm { comp: t.comp, mono: t.mono.clone(), coeff: field.neg(&t.coeff) })
                .collect(),
        }
    }

    pub fn sub(&self, other: &VecElem, field: &BaseField, order: ModOrder) -> VecElem {
        self.add(&other.neg(field), field, order)
    }

    /// Multiply by a single term `c·m`; sortedness is preserved.
    pub fn mul_term(&self, m: &Monomial, c: &Coeff, field: &BaseField) -> VecElem {
        if c.is_zero() {
            return VecElem::zero(self.rank);
        }
        VecElem {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|t| VecTerm {
                    comp: t.comp,
                    mono: t.mono.mul(m),
                    coeff: field.mul(&t.coeff, c),
                })
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff, field: &BaseField) -> VecElem {
        self.mul_term(&Monomial::one(first_nvars(self)), c, field)
    }

    /// Multiply by a full polynomial.
    pub fn mul_poly(&self, p: &Polynomial, field: &BaseField, order: ModOrder) -> VecElem {
        let mut acc = VecElem::zero(self.rank);
        for (m, c) in p.terms() {
            acc = acc.add(&self.mul_term(m, c, field), field, order);
        }
        acc
    }

    pub fn monic(&self, field: &BaseField) -> VecElem {
        match self.leading() {
            None => self.clone(),
            Some(t) => {
                let inv = field.inv(&t.coeff);
                self.scale(&inv, field)
            }
        }
    }

    /// Degree of a homogeneous vector w.r.t. component shifts: every term
    /// must satisfy `deg(mono) + shift[comp] = d`. `None` for 0, error-free.
    pub fn homogeneous_degree(&self, shifts: &[i64]) -> Option<i64> {
        let first = self.terms.first()?;
        let d = first.mono.degree() as i64 + shifts[first.comp];
        self.terms
            .iter()
            .all(|t| t.mono.degree() as i64 + shifts[t.comp] == d)
            .then_some(d)
    }

    pub fn is_homogeneous(&self, shifts: &[i64]) -> bool {
        self.is_zero() || self.homogeneous_degree(shifts).is_some()
    }

    /// Component projection as a polynomial.
    pub fn component_poly(&self, ring: &Arc<PolyRing>, comp: usize) -> Polynomial {
        Polynomial::from_terms(
            ring,
            self.terms
                .iter()
                .filter(|t| t.comp == comp)
                .map(|t| (t.mono.clone(), t.coeff.clone()))
                .collect(),
        )
    }

    /// Keep components in `lo..hi`, shifting indices down by `lo`; the
    /// result has rank `hi - lo` and is re-sorted for `new_order`.
    pub fn slice_components(
        &self,
        lo: usize,
        hi: usize,
        field: &BaseField,
        new_order: ModOrder,
    ) -> VecElem {
        let ts: Vec<VecTerm> = self
            .terms
            .iter()
            .filter(|t| t.comp >= lo && t.comp < hi)
            .map(|t| VecTerm { comp: t.comp - lo, mono: t.mono.clone(), coeff: t.coeff.clone() })
            .collect();
        VecElem::normalize(field, new_order, hi - lo, ts)
    }

    /// Re-embed into a larger free module, components offset by `at`.
    pub fn embed(&self, rank: usize, at: usize, field: &BaseField, order: ModOrder) -> VecElem {
        let ts: Vec<VecTerm> = self
            .terms
            .iter()
            .map(|t| VecTerm { comp: t.comp + at, mono: t.mono.clone(), coeff: t.coeff.clone() })
            .collect();
        VecElem::normalize(field, order, rank, ts)
    }

    pub fn render(&self, ring: &Arc<PolyRing>) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for c in 0..self.rank {
            let p = self.component_poly(ring, c);
            if !p.is_zero() {
                parts.push(format!("({})e{}", p.render(), c));
            }
        }
        parts.join(" + ")
    }
}

fn first_nvars(v: &VecElem) -> usize {
    v.terms.first().map(|t| t.mono.nvars()).unwrap_or(0)
}

/// Column vector from a polynomial placed in one component.
pub fn poly_to_vec(p: &Polynomial, rank: usize, comp: usize, field: &BaseField, order: ModOrder) -> VecElem {
    let ts: Vec<VecTerm> = p
        .terms()
        .iter()
        .map(|(m, c)| VecTerm { comp, mono: m.clone(), coeff: c.clone() })
        .collect();
    VecElem::normalize(field, order, rank, ts)
}

/// Columns of a polynomial matrix (`mat[i][j]` = row i, column j) as
/// vectors in a free module of rank `nrows`.
pub fn matrix_columns(
    mat: &[Vec<Polynomial>],
    field: &BaseField,
    order: ModOrder,
) -> Vec<VecElem> {
    let nrows = mat.len();
    let ncols = mat.first().map(|r| r.len()).unwrap_or(0);
    (0..ncols)
        .map(|j| {
            let mut ts = Vec::new();
            for (i, row) in mat.iter().enumerate() {
                for (m, c) in row[j].terms() {
                    ts.push(VecTerm { comp: i, mono: m.clone(), coeff: c.clone() });
                }
            }
            VecElem::normalize(field, order, nrows, ts)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_ring};

    #[test]
    fn top_order_breaks_ties_toward_lower_component() {
        let ord = ModOrder::Top;
        let m = Monomial::new(vec![1, 0]);
        assert_eq!(ord.cmp(0, &m, 1, &m), Ordering::Greater);
        let bigger = Monomial::new(vec![2, 0]);
        // Monomial dominates component.
        assert_eq!(ord.cmp(1, &bigger, 0, &m), Ordering::Greater);
    }

    #[test]
    fn elimination_order_blocks_dominate() {
        let ord = ModOrder::Elim { split: 2 };
        let one = Monomial::one(2);
        let big = Monomial::new(vec![5, 5]);
        // Component 1 (first block) beats component 2 (second block) even
        // with a much smaller monomial.
        assert_eq!(ord.cmp(1, &one, 2, &big), Ordering::Greater);
        // Inside a block, Top applies.
        assert_eq!(ord.cmp(3, &big, 2, &one), Ordering::Greater);
        assert_eq!(ord.cmp(2, &one, 3, &one), Ordering::Greater);
    }

    #[test]
    fn arithmetic_round_trip() {
        let r = parse_ring("p=5; vars x,y").unwrap();
        let f = r.field.clone();
        let p = parse_poly(&r, "x^2 + 2y^2").unwrap();
        let q = parse_poly(&r, "3x^2").unwrap();
        let a = poly_to_vec(&p, 2, 0, &f, ModOrder::Top);
        let b = poly_to_vec(&q, 2, 0, &f, ModOrder::Top);
        let s = a.add(&b, &f, ModOrder::Top);
        assert_eq!(
            s.component_poly(&r, 0),
            parse_poly(&r, "4x^2 + 2y^2").unwrap()
        );
        assert!(s.component_poly(&r, 1).is_zero());
        let z = s.sub(&s, &f, ModOrder::Top);
        assert!(z.is_zero());
    }

    #[test]
    fn homogeneity_respects_shifts() {
        let r = parse_ring("q; vars x,y").unwrap();
        let f = r.field.clone();
        let p = parse_poly(&r, "x^2").unwrap();
        let q = parse_poly(&r, "y").unwrap();
        let mut ts = poly_to_vec(&p, 2, 0, &f, ModOrder::Top).terms;
        ts.extend(poly_to_vec(&q, 2, 1, &f, ModOrder::Top).terms);
        let v = VecElem::normalize(&f, ModOrder::Top, 2, ts);
        // deg x^2 + 0 = 2, deg y + 1 = 2: homogeneous for shifts (0, 1).
        assert_eq!(v.homogeneous_degree(&[0, 1]), Some(2));
        assert!(v.homogeneous_degree(&[0, 0]).is_none());
    }

    #[test]
    fn matrix_columns_layout() {
        let r = parse_ring("q; vars x,y").unwrap();
        let m = vec![
            vec![parse_poly(&r, "x").unwrap(), parse_poly(&r, "y").unwrap()],
            vec![parse_poly(&r, "0").unwrap(), parse_poly(&r, "x - y").unwrap()],
        ];
        let cols = matrix_columns(&m, &r.field, ModOrder::Top);
        assert_eq!(cols.len(), 2);
        assert_eq!(cols[0].render(&r), "(x)e0");
        assert_eq!(cols[1].render(&r), "(y)e0 + (x - y)e1");
    }
}
