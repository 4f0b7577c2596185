//! Graded quotient rings `A = S/I` with a recorded reason to believe `A`
//! is Gorenstein.
//!
//! The engine models a local Gorenstein ring by its graded avatar: `S`
//! standard-graded, `I` homogeneous, and the maximal ideal is the
//! irrelevant one. Every length, multiplicity, and syzygy computed here is
//! the graded shadow of the corresponding local computation, and all
//! algorithms work degree by degree with this in mind.

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::groebner::{ideal_groebner, poly_normal_form};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::Polynomial;
use crate::ring::PolyRing;
use crate::vecelem::{poly_to_vec, ModOrder, VecElem};
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum GorensteinEvidence {
    /// Principal ideal: quotients of regular rings by one element are
    /// Gorenstein.
    Hypersurface,
    /// The listed generators are checked to be a regular sequence (their
    /// number equals the codimension of the ideal).
    CompleteIntersection,
    /// Taken on faith from the input; reports carry the flag.
    UserAsserted,
}

#[derive(Debug)]
pub struct QuotientRing {
    pub ring: Arc<PolyRing>,
    pub ideal_gens: Vec<Polynomial>,
    /// Reduced monic Groebner basis of `I` under grevlex.
    pub ideal_gb: Vec<Polynomial>,
    pub evidence: GorensteinEvidence,
    /// Krull dimension of `A` (from the leading-term ideal).
    pub dim: usize,
    pub codim: usize,
}

impl QuotientRing {
    pub fn new(
        ring: Arc<PolyRing>,
        ideal_gens: Vec<Polynomial>,
        evidence: GorensteinEvidence,
    ) -> Result<Arc<Self>> {
        for g in &ideal_gens {
            if g.is_zero() {
                return Err(Error::Invalid("zero ideal generator".into()));
            }
            match g.homogeneous_degree() {
                Some(d) if d >= 1 => {}
                Some(_) => {
                    return Err(Error::Invalid("ideal contains a unit".into()));
                }
                None => {
                    return Err(Error::Inhomogeneous(format!("ideal generator {}", g.render())));
                }
            }
        }
        let ideal_gb = ideal_groebner(&ring, &ideal_gens);
        if ideal_gb.iter().any(|g| g.degree() == Some(0)) {
            return Err(Error::Invalid("ideal is the unit ideal".into()));
        }
        let dim = monomial_quotient_dim(&ring, &ideal_gb);
        let codim = ring.nvars() - dim;
        match evidence {
            GorensteinEvidence::Hypersurface => {
                if ideal_gens.len() != 1 {
                    return Err(Error::Invalid(format!(
                        "hypersurface evidence requires exactly one generator, got {}",
                        ideal_gens.len()
                    )));
                }
            }
            GorensteinEvidence::CompleteIntersection => {
                // Homogeneous gens form a regular sequence iff their number
                // equals the codimension they cut out.
                if ideal_gens.len() != codim {
                    return Err(Error::Invalid(format!(
                        "complete-intersection evidence fails: {} generators but codimension {}",
                        ideal_gens.len(),
                        codim
                    )));
                }
            }
            GorensteinEvidence::UserAsserted => {}
        }
        Ok(Arc::new(QuotientRing { ring, ideal_gens, ideal_gb, evidence, dim, codim }))
    }

    /// The regular ring itself (empty ideal), with complete-intersection
    /// evidence of codimension zero.
    pub fn regular(ring: Arc<PolyRing>) -> Result<Arc<Self>> {
        QuotientRing::new(ring, Vec::new(), GorensteinEvidence::CompleteIntersection)
    }

    pub fn field(&self) -> &BaseField {
        &self.ring.field
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn reduce(&self, p: &Polynomial) -> Polynomial {
        poly_normal_form(&self.ring, p, &self.ideal_gb)
    }

    pub fn is_zero_in_quotient(&self, p: &Polynomial) -> bool {
        self.reduce(p).is_zero()
    }

    /// Columns `f·e_j` for every Groebner generator `f` of `I` and every
    /// component: adjoining them to any generating set realizes submodules
    /// of free `A`-modules inside the Groebner engine.
    pub fn ideal_multiples(&self, rank: usize, order: ModOrder) -> Vec<VecElem> {
        let mut out = Vec::with_capacity(self.ideal_gb.len() * rank);
        for j in 0..rank {
            for f in &self.ideal_gb {
                out.push(poly_to_vec(f, rank, j, self.field(), order));
            }
        }
        out
    }

    /// Monomials of total degree `deg` outside the leading-term ideal: a
    /// k-basis of `A_deg`, in descending grevlex order.
    pub fn std_monomials(&self, deg: u32) -> Vec<Monomial> {
        monomials_of_degree(self.nvars(), deg)
            .into_iter()
            .filter(|m| {
                !self
                    .ideal_gb
                    .iter()
                    .any(|g| g.leading().map(|(lm, _)| lm.divides(m)).unwrap_or(false))
            })
            .collect()
    }

    pub fn dim_k_of_degree(&self, deg: u32) -> usize {
        self.std_monomials(deg).len()
    }

    /// A linear form with the given coefficients on the variables.
    pub fn linear_form(&self, coeffs: &[i64]) -> Polynomial {
        let mut acc = Polynomial::zero(&self.ring);
        for (i, &c) in coeffs.iter().enumerate() {
            let term = Polynomial::var(&self.ring, i).scale(&self.field().from_i64(c));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn describe(&self) -> String {
        if self.ideal_gens.is_empty() {
            format!("{}", self.ring)
        } else {
            format!(
                "{}/({})",
                self.ring,
                self.ideal_gens.iter().map(|g| g.render()).collect::<Vec<_>>().join(", ")
            )
        }
    }
}

/// Krull dimension of `S/J` for the monomial ideal `J = LT(I)`: the size of
/// the largest set of variables meeting no generator's support.
fn monomial_quotient_dim(ring: &Arc<PolyRing>, gb: &[Polynomial]) -> usize {
    let v = ring.nvars();
    let supports: Vec<Vec<usize>> = gb
        .iter()
        .map(|g| {
            let (lm, _) = g.leading().expect("nonzero GB element");
            (0..v).filter(|&i| lm.exps()[i] > 0).collect()
        })
        .collect();
    let mut best = 0usize;
    for mask in 0u32..(1 << v) {
        let members: Vec<usize> = (0..v).filter(|&i| mask & (1 << i) != 0).collect();
        if members.len() <= best {
            continue;
        }
        // T is independent iff no leading monomial has support inside T.
        let independent = supports.iter().all(|s| !s.iter().all(|i| members.contains(i)));
        if independent {
            best = members.len();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_ring};

    fn hypersurface(ring_decl: &str, f: &str) -> Arc<QuotientRing> {
        let r = parse_ring(ring_decl).unwrap();
        let p = parse_poly(&r, f).unwrap();
        QuotientRing::new(r, vec![p], GorensteinEvidence::Hypersurface).unwrap()
    }

    #[test]
    fn dimensions_of_standard_examples() {
        let a = hypersurface("p=5; vars x,y", "x^2");
        assert_eq!(a.dim, 1);
        assert_eq!(a.codim, 1);

        let quadric = hypersurface("p=5; vars x,y,z,w", "x^2 + y^2 + z^2 + w^2");
        assert_eq!(quadric.dim, 3);

        let r = parse_ring("q; vars x,y,z").unwrap();
        let s = QuotientRing::regular(r).unwrap();
        assert_eq!(s.dim, 3);
        assert_eq!(s.codim, 0);
    }

    #[test]
    fn complete_intersection_evidence_is_checked() {
        let r = parse_ring("q; vars x,y,z").unwrap();
        let good = QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "x^2").unwrap(), parse_poly(&r, "y^3").unwrap()],
            GorensteinEvidence::CompleteIntersection,
        );
        assert!(good.is_ok());
        assert_eq!(good.unwrap().dim, 1);

        // x^2, x*y cut out V(x), codimension 1, so two generators are not
        // a regular sequence.
        let bad = QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "x^2").unwrap(), parse_poly(&r, "x*y").unwrap()],
            GorensteinEvidence::CompleteIntersection,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn artinian_quotient_has_dimension_zero() {
        let r = parse_ring("q; vars x,y").unwrap();
        let a = QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "x^2").unwrap(), parse_poly(&r, "y^2").unwrap()],
            GorensteinEvidence::CompleteIntersection,
        )
        .unwrap();
        assert_eq!(a.dim, 0);
        assert_eq!(a.dim_k_of_degree(0), 1);
        assert_eq!(a.dim_k_of_degree(1), 2);
        assert_eq!(a.dim_k_of_degree(2), 1); // only x*y survives
        assert_eq!(a.dim_k_of_degree(3), 0);
    }

    #[test]
    fn reduction_uses_the_ideal() {
        let a = hypersurface("p=5; vars x,y", "x^2");
        let p = parse_poly(&a.ring, "x^3 + x*y").unwrap();
        assert_eq!(a.reduce(&p).render(), "x*y");
        assert!(a.is_zero_in_quotient(&parse_poly(&a.ring, "2x^2").unwrap()));
    }

    #[test]
    fn rejects_inhomogeneous_and_unit_ideals() {
        let r = parse_ring("q; vars x,y").unwrap();
        assert!(QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "x^2 + y").unwrap()],
            GorensteinEvidence::Hypersurface
        )
        .is_err());
        assert!(QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "1").unwrap()],
            GorensteinEvidence::Hypersurface
        )
        .is_err());
    }
}
