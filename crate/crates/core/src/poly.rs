//! Dense-ordered sparse polynomials: a canonical list of terms sorted in
//! strictly descending grevlex order, zero coefficients never stored.

use crate::error::{Error, Result};
use crate::field::{coeff_is_negative_display, Coeff};
use crate::monomial::Monomial;
use crate::ring::{same_ring, PolyRing};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub ring: Arc<PolyRing>,
    /// Sorted descending by grevlex; monomials strictly distinct.
    terms: Vec<(Monomial, Coeff)>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Self {
        Polynomial::constant(ring, ring.field.one())
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Coeff) -> Self {
        if c.is_zero() {
            return Polynomial::zero(ring);
        }
        Polynomial { ring: ring.clone(), terms: vec![(Monomial::one(ring.nvars()), c)] }
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: vec![(Monomial::var(ring.nvars(), i), ring.field.one())],
        }
    }

    pub fn monomial_term(ring: &Arc<PolyRing>, m: Monomial, c: Coeff) -> Self {
        if c.is_zero() {
            return Polynomial::zero(ring);
        }
        Polynomial { ring: ring.clone(), terms: vec![(m, c)] }
    }

    /// Normalize an arbitrary term list: sort, merge equal monomials, drop
    /// zeros.
    pub fn from_terms(ring: &Arc<PolyRing>, mut ts: Vec<(Monomial, Coeff)>) -> Self {
        ts.sort_by(|a, b| b.0.cmp_grevlex(&a.0));
        let mut out: Vec<(Monomial, Coeff)> = Vec::with_capacity(ts.len());
        for (m, c) in ts {
            if let Some(last) = out.last_mut() {
                if last.0 == m {
                    last.1 = ring.field.add(&last.1, &c);
                    continue;
                }
            }
            out.push((m, c));
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial { ring: ring.clone(), terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Coeff)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `None` is the degree of the zero polynomial (minus
    /// infinity).
    pub fn degree(&self) -> Option<i64> {
        self.terms.iter().map(|(m, _)| m.degree() as i64).max()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Coeff)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    /// `Some(d)` when every term has total degree `d`; the zero polynomial
    /// is homogeneous of every degree and reports `None` here.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.terms.first()?.0.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.homogeneous_degree().is_some()
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch");
        let field = &self.ring.field;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp_grevlex(&other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = field.add(&self.terms[i].1, &other.terms[j].1);
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        Polynomial { ring: self.ring.clone(), terms: out }
    }

    pub fn neg(&self) -> Polynomial {
        let field = &self.ring.field;
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), field.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul_term(&self, m: &Monomial, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        let field = &self.ring.field;
        Polynomial {
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .map(|(tm, tc)| (tm.mul(m), field.mul(tc, c)))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        self.mul_term(&Monomial::one(self.ring.nvars()), c)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        assert!(same_ring(&self.ring, &other.ring), "ring mismatch");
        let mut acc: Vec<(Monomial, Coeff)> = Vec::new();
        for (m, c) in &other.terms {
            acc.extend(self.mul_term(m, c).terms);
        }
        Polynomial::from_terms(&self.ring, acc)
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.ring);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Divide by the leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.ring.field.inv(c);
                self.scale(&inv)
            }
        }
    }

    /// Canonical text form, also used in structural fingerprints.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = coeff_is_negative_display(c);
            let c_abs = if neg { self.ring.field.neg(c) } else { c.clone() };
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coeff_part = if c_abs.is_one() && !m.is_one() {
                None
            } else {
                Some(c_abs.to_string())
            };
            match (coeff_part, m.is_one()) {
                (Some(cs), true) => s.push_str(&cs),
                (Some(cs), false) => {
                    s.push_str(&cs);
                    s.push('*');
                    s.push_str(&self.ring.monomial_string(m));
                }
                (None, _) => s.push_str(&self.ring.monomial_string(m)),
            }
        }
        s
    }

    /// Substitute variables by polynomials (used for linear coordinate
    /// changes when sampling superficial elements).
    pub fn substitute(&self, images: &[Polynomial]) -> Result<Polynomial> {
        if images.len() != self.ring.nvars() {
            return Err(Error::ShapeMismatch(format!(
                "substitution needs {} images, got {}",
                self.ring.nvars(),
                images.len()
            )));
        }
        let target = images
            .first()
            .map(|p| p.ring.clone())
            .unwrap_or_else(|| self.ring.clone());
        let mut acc = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t = t.mul(&images[i].pow(e as u32));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use crate::parse::{parse_poly, parse_ring};

    #[test]
    fn cancellation_gives_zero() {
        let r = parse_ring("q; vars x,y").unwrap();
        let p = parse_poly(&r, "x^2 - x^2").unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), None);
    }

    #[test]
    fn characteristic_collapse() {
        let r = parse_ring("p=5; vars x").unwrap();
        let p = parse_poly(&r, "2x + 3x").unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn product_difference_of_squares() {
        let r = parse_ring("q; vars x,y").unwrap();
        let a = parse_poly(&r, "x + y").unwrap();
        let b = parse_poly(&r, "x - y").unwrap();
        let expect = parse_poly(&r, "x^2 - y^2").unwrap();
        assert_eq!(a.mul(&b), expect);
    }

    #[test]
    fn leading_term_under_grevlex() {
        let r = parse_ring("q; vars x,y").unwrap();
        let p = parse_poly(&r, "x^2 + x*y^2").unwrap();
        let (m, _) = p.leading().unwrap();
        assert_eq!(r.monomial_string(m), "x*y^2");
        assert_eq!(p.degree(), Some(3));
        assert!(!p.is_homogeneous());
    }

    #[test]
    fn render_is_canonical() {
        let r = parse_ring("q; vars x,y").unwrap();
        let p = parse_poly(&r, "y^2 - 1*x^2 + 0*x").unwrap();
        assert_eq!(p.render(), "-x^2 + y^2");
        let q = parse_poly(&r, "-x^2 + y^2").unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn substitution_is_ring_map() {
        let r = parse_ring("q; vars x,y").unwrap();
        let p = parse_poly(&r, "x^2 + y^2").unwrap();
        let imgs = vec![parse_poly(&r, "x+y").unwrap(), parse_poly(&r, "x-y").unwrap()];
        let q = p.substitute(&imgs).unwrap();
        assert_eq!(q, parse_poly(&r, "2x^2 + 2y^2").unwrap());
    }
}
