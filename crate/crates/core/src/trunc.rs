//! Finite shadow of a local hypersurface: arithmetic in `S/((f) + 𝔪^N)`
//! for a possibly non-graded equation `f`. Length samples, torsion
//! lengths of factorization modules, and colon subspaces all reduce to
//! exact linear algebra over the monomial basis; resolutions on this
//! backend come only from matrix factorizations.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::groebner::{ideal_groebner, poly_normal_form};
use crate::hilbert::{binomial_coefficients, fit_window};
use crate::linalg::{Echelon, KMat};
use crate::mf::MatrixFactorization;
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::Polynomial;
use crate::ring::PolyRing;
use std::collections::HashMap;
use std::sync::Arc;

/// `S/((f) + 𝔪^N)` with its standard-monomial basis. Any statement read
/// off this ring is a statement about the local ring `S_𝔪/(f)` only up
/// to degree `N` minus a safety margin; the accessors enforce the
/// margin and refuse to overreach.
pub struct TruncatedAlgebra {
    pub ring: Arc<PolyRing>,
    pub f: Polynomial,
    pub order: u32,
    gb: Vec<Polynomial>,
    basis: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

const MARGIN: u32 = 2;

impl TruncatedAlgebra {
    pub fn new(ring: Arc<PolyRing>, f: Polynomial, order: u32) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::Invalid("the equation must be nonzero".into()));
        }
        if f.terms().iter().any(|(m, _)| m.is_one()) {
            return Err(Error::Invalid("the equation has a unit term, so the quotient collapses".into()));
        }
        if order < MARGIN + 2 {
            return Err(Error::TruncationTooSmall(format!("order {order} leaves no working room")));
        }
        let mut gens = vec![f.clone()];
        for m in monomials_of_degree(ring.nvars(), order) {
            gens.push(Polynomial::from_terms(&ring, vec![(m, ring.field.one())]));
        }
        let gb = ideal_groebner(&ring, &gens);
        let lts: Vec<Monomial> = gb.iter().map(|g| g.terms()[0].0.clone()).collect();
        let mut basis = Vec::new();
        for d in 0..order {
            for m in monomials_of_degree(ring.nvars(), d) {
                if !lts.iter().any(|lt| lt.divides(&m)) {
                    basis.push(m);
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Ok(TruncatedAlgebra { ring, f, order, gb, basis, index })
    }

    /// Order sized for sample indices up to `max_n` plus the margin.
    pub fn for_samples(ring: Arc<PolyRing>, f: Polynomial, max_n: usize) -> Result<Self> {
        TruncatedAlgebra::new(ring, f, max_n as u32 + MARGIN + 2)
    }

    pub fn dim_k(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn nf(&self, p: &Polynomial) -> Polynomial {
        poly_normal_form(&self.ring, p, &self.gb)
    }

    /// Coordinates of the class of `p` over the standard-monomial basis.
    pub fn coords(&self, p: &Polynomial) -> Vec<Coeff> {
        let n = self.nf(p);
        let mut out = vec![self.ring.field.zero(); self.basis.len()];
        for (m, c) in n.terms() {
            let i = *self.index.get(m).expect("normal form supported on the standard basis");
            out[i] = c.clone();
        }
        out
    }

    fn mono_poly(&self, m: &Monomial) -> Polynomial {
        Polynomial::from_terms(&self.ring, vec![(m.clone(), self.ring.field.one())])
    }

    fn guard(&self, need: u32) -> Result<()> {
        if need + MARGIN > self.order {
            return Err(Error::TruncationTooSmall(format!(
                "order {} cannot certify data at level {need}",
                self.order
            )));
        }
        Ok(())
    }

    /// Row span of the image of `𝔪^s`, as an echelon over the basis.
    fn power_span(&self, s: u32) -> Echelon {
        let mut ech = Echelon::new(self.ring.field.clone(), self.dim_k());
        for d in s..self.order {
            for m in monomials_of_degree(self.ring.nvars(), d) {
                ech.insert(self.coords(&self.mono_poly(&m)));
            }
        }
        ech
    }

    /// `ℓ(A/𝔪^{n+1})` for the local ring behind the shadow.
    pub fn length_of_power_quotient(&self, n: usize) -> Result<i64> {
        self.guard(n as u32 + 1)?;
        Ok(self.dim_k() as i64 - self.power_span(n as u32 + 1).rank() as i64)
    }

    pub fn hilbert_samuel_samples(&self, up_to: usize) -> Result<Vec<i64>> {
        (0..=up_to).map(|n| self.length_of_power_quotient(n)).collect()
    }

    /// Fit the degree-`r` Hilbert-Samuel polynomial and return
    /// `e_0..e_r` in the binomial convention.
    pub fn e_coefficients(&self, r: usize) -> Result<Vec<i64>> {
        let cap = crate::hilbert::sample_cap(r);
        let samples = self.hilbert_samuel_samples(cap)?;
        let (_, poly) = fit_window(&samples, r)?;
        binomial_coefficients(&poly, r)
    }

    /// `ℓ(Tor₁(coker φ, A/𝔪^{n+1}))` from the two-periodic resolution
    /// `… → A^r →ψ A^r →φ A^r → coker φ → 0`.
    pub fn tor_length(&self, mf: &MatrixFactorization, n: usize) -> Result<i64> {
        if !mf.f.sub(&self.f).is_zero() {
            return Err(Error::Invalid("factorization equation differs from the shadow's".into()));
        }
        self.guard(n as u32 + 1)?;
        let r = mf.size();
        let dim = self.dim_k();
        let field = &self.ring.field;
        let block = |comp: usize, v: &[Coeff]| -> Vec<Coeff> {
            let mut out = vec![field.zero(); r * dim];
            out[comp * dim..(comp + 1) * dim].clone_from_slice(v);
            out
        };
        // 𝔪^{n+1}·V as a subspace of V = (A/𝔪^N)^r.
        let mut wall = Echelon::new(field.clone(), r * dim);
        for d in n as u32 + 1..self.order {
            for m in monomials_of_degree(self.ring.nvars(), d) {
                let v = self.coords(&self.mono_poly(&m));
                for comp in 0..r {
                    wall.insert(block(comp, &v));
                }
            }
        }
        let r0 = wall.rank();
        let dim_q = r * dim - r0;
        let map_rank = |mat: &[Vec<Polynomial>]| -> usize {
            let mut ech = self.power_span_stack(n as u32 + 1, r, &block);
            for j in 0..r {
                for b in &self.basis {
                    let mut img = vec![field.zero(); r * dim];
                    for (i, row) in mat.iter().enumerate() {
                        let p = row[j].mul(&self.mono_poly(b));
                        let v = self.coords(&p);
                        for (k, c) in v.into_iter().enumerate() {
                            if !c.is_zero() {
                                img[i * dim + k] = field.add(&img[i * dim + k], &c);
                            }
                        }
                    }
                    ech.insert(img);
                }
            }
            ech.rank() - r0
        };
        let phi_rank = map_rank(&mf.phi);
        let psi_rank = map_rank(&mf.psi);
        let value = dim_q as i64 - phi_rank as i64 - psi_rank as i64;
        if value < 0 {
            return Err(Error::Invalid(format!(
                "torsion length came out negative ({value}) at level {n}"
            )));
        }
        Ok(value)
    }

    fn power_span_stack(
        &self,
        s: u32,
        r: usize,
        block: &dyn Fn(usize, &[Coeff]) -> Vec<Coeff>,
    ) -> Echelon {
        let mut ech = Echelon::new(self.ring.field.clone(), r * self.dim_k());
        for d in s..self.order {
            for m in monomials_of_degree(self.ring.nvars(), d) {
                let v = self.coords(&self.mono_poly(&m));
                for comp in 0..r {
                    ech.insert(block(comp, &v));
                }
            }
        }
        ech
    }

    pub fn tor_samples(&self, mf: &MatrixFactorization, up_to: usize) -> Result<Vec<i64>> {
        (0..=up_to).map(|n| self.tor_length(mf, n)).collect()
    }

    /// Limit of the (eventually polynomial) torsion lengths for a
    /// factorization module over a one-dimensional local ring — its
    /// triangle value.
    pub fn tor_limit(&self, mf: &MatrixFactorization) -> Result<i64> {
        let cap = crate::hilbert::sample_cap(0);
        let samples = self.tor_samples(mf, cap)?;
        let (_, poly) = fit_window(&samples, 0)?;
        crate::field::big_rational_to_i64(&poly[0])
            .ok_or_else(|| Error::Invalid("stabilized torsion length is not an integer".into()))
    }

    /// Basis rows of `((g) : 𝔪^k)` restricted to classes supported in
    /// degrees at most `cutoff`. The restriction is what makes two colon
    /// subspaces comparable: without it each carries its own truncation
    /// tail `𝔪^{N-k}`.
    pub fn colon_subspace(&self, g: &Polynomial, k: usize, cutoff: u32) -> Result<Vec<Vec<Coeff>>> {
        self.guard(cutoff + k as u32)?;
        let field = &self.ring.field;
        let dim = self.dim_k();
        // Row span of (g) in the shadow.
        let mut jspan = Echelon::new(field.clone(), dim);
        for b in &self.basis {
            jspan.insert(self.coords(&g.mul(&self.mono_poly(b))));
        }
        if k == 0 {
            // The colon by 𝔪^0 = A is (g) itself; return its capped span.
            let mut ech = Echelon::new(field.clone(), dim);
            for b in &self.basis {
                let v = self.coords(&g.mul(&self.mono_poly(b)));
                if self
                    .basis
                    .iter()
                    .zip(&v)
                    .all(|(m, c)| c.is_zero() || m.degree() <= cutoff)
                {
                    ech.insert(v);
                }
            }
            return Ok(ech_rows(&ech, dim, field));
        }
        let multipliers = monomials_of_degree(self.ring.nvars(), k as u32);
        // One constraint row per (multiplier, output coordinate), one
        // column per basis element of the shadow.
        let mut mat_rows: Vec<Vec<Coeff>> = Vec::new();
        for m in &multipliers {
            let mono = self.mono_poly(m);
            let images: Vec<Vec<Coeff>> = self
                .basis
                .iter()
                .map(|b| jspan.reduce(self.coords(&mono.mul(&self.mono_poly(b)))))
                .collect();
            for slot in 0..dim {
                if images.iter().all(|v| v[slot].is_zero()) {
                    continue;
                }
                mat_rows.push(images.iter().map(|v| v[slot].clone()).collect());
            }
        }
        // Kill coordinates above the cutoff.
        for (j, b) in self.basis.iter().enumerate() {
            if b.degree() > cutoff {
                let mut row = vec![field.zero(); dim];
                row[j] = field.one();
                mat_rows.push(row);
            }
        }
        let mat = KMat::from_rows(field.clone(), mat_rows);
        let null = mat.nullspace();
        let mut ech = Echelon::new(field.clone(), dim);
        for v in null {
            ech.insert(v);
        }
        Ok(ech_rows(&ech, dim, field))
    }

    /// Does `a·𝔪^n` fill all of `𝔪^{n+s}`? The shadow certifies the
    /// local identity: the truncation gap `𝔪^N` lies inside
    /// `𝔪·𝔪^{n+s}`, so by graded Nakayama it cannot hide a missing
    /// generator once `N ≥ n+s+1`, which the guard enforces.
    pub fn reduction_identity(&self, a: &Polynomial, n: usize, s: usize) -> Result<bool> {
        let need = n as u32 + s as u32;
        self.guard(need + 1)?;
        let target = self.power_span(need);
        let t_rank = target.rank();
        let field = &self.ring.field;
        let mut image = Echelon::new(field.clone(), self.dim_k());
        let mut joint = target;
        for d in n as u32..self.order {
            for m in monomials_of_degree(self.ring.nvars(), d) {
                let v = self.coords(&a.mul(&self.mono_poly(&m)));
                image.insert(v.clone());
                joint.insert(v);
            }
        }
        // Equality is inclusion (no growth of the joint span) plus full
        // rank of the image alone.
        Ok(joint.rank() == t_rank && image.rank() == t_rank)
    }

    /// Equality of two row spans over the basis coordinates.
    pub fn same_span(&self, a: &[Vec<Coeff>], b: &[Vec<Coeff>]) -> bool {
        let field = &self.ring.field;
        let mut ea = Echelon::new(field.clone(), self.dim_k());
        for v in a {
            ea.insert(v.clone());
        }
        let mut eb = Echelon::new(field.clone(), self.dim_k());
        for v in b {
            eb.insert(v.clone());
        }
        ea.rank() == eb.rank()
            && a.iter().all(|v| eb.contains(v.clone()))
            && b.iter().all(|v| ea.contains(v.clone()))
    }

    /// Membership of a class in the span.
    pub fn span_contains(&self, span: &[Vec<Coeff>], p: &Polynomial) -> bool {
        let mut ech = Echelon::new(self.ring.field.clone(), self.dim_k());
        for v in span {
            ech.insert(v.clone());
        }
        ech.contains(self.coords(p))
    }
}

fn ech_rows(ech: &Echelon, dim: usize, field: &crate::field::BaseField) -> Vec<Vec<Coeff>> {
    // Echelon does not expose its rows; `unit - reduce(unit)` over all
    // unit vectors spans the same row space, so canonicalize that.
    let mut rows = Vec::new();
    for j in 0..dim {
        let mut unit = vec![field.zero(); dim];
        unit[j] = field.one();
        let red = ech.reduce(unit.clone());
        // unit - red lies in the span; collect the nonzero ones.
        let diff: Vec<Coeff> = unit
            .iter()
            .zip(&red)
            .map(|(u, r)| field.add(u, &field.neg(r)))
            .collect();
        if diff.iter().any(|c| !c.is_zero()) {
            rows.push(diff);
        }
    }
    let mut canon = Echelon::new(field.clone(), dim);
    let mut out = Vec::new();
    for v in rows {
        if canon.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mf::{ade_catalog, AdeFamily};
    use crate::parse::{parse_poly, parse_ring};

    fn shadow(decl: &str, f: &str, order: u32) -> TruncatedAlgebra {
        let r = parse_ring(decl).unwrap();
        let p = parse_poly(&r, f).unwrap();
        TruncatedAlgebra::new(r, p, order).unwrap()
    }

    #[test]
    fn cusp_lengths_match_the_known_polynomial() {
        // k[x,y] local at the origin mod x^2 + y^3: ℓ(A/𝔪^{n+1}) = 2n+1
        // for n ≥ 1, so e0 = 2 and e1 = 1.
        let a = shadow("p=5; vars x,y", "x^2 + y^3", 20);
        assert_eq!(a.hilbert_samuel_samples(4).unwrap(), vec![1, 3, 5, 7, 9]);
        assert_eq!(a.e_coefficients(1).unwrap(), vec![2, 1]);
    }

    #[test]
    fn graded_curve_agrees_with_the_graded_backend() {
        let a = shadow("p=5; vars x,y", "x^2", 20);
        assert_eq!(a.hilbert_samuel_samples(5).unwrap(), vec![1, 3, 5, 7, 9, 11]);
        assert_eq!(a.e_coefficients(1).unwrap(), vec![2, 1]);
    }

    #[test]
    fn margin_is_enforced() {
        let a = shadow("p=5; vars x,y", "x^2", 6);
        assert!(a.length_of_power_quotient(3).is_ok());
        assert!(matches!(
            a.length_of_power_quotient(4),
            Err(Error::TruncationTooSmall(_))
        ));
    }

    #[test]
    fn unit_equation_is_refused() {
        let r = parse_ring("p=5; vars x,y").unwrap();
        let p = parse_poly(&r, "1 + x").unwrap();
        assert!(TruncatedAlgebra::new(r, p, 10).is_err());
    }

    #[test]
    fn torsion_lengths_of_the_node_module() {
        // A1 chart j=1 over x^2 + y^2: over F5 the node splits into two
        // lines and the chart module is the sum of the two branch
        // modules, each contributing 1 to the stable torsion length.
        let r = parse_ring("p=5; vars x,y").unwrap();
        let entries = ade_catalog(&r, AdeFamily::A(1)).unwrap();
        let mf = &entries.iter().find(|e| e.id == "ade:A1:j=1").unwrap().mf;
        let a = TruncatedAlgebra::for_samples(r, mf.f.clone(), 16).unwrap();
        let samples = a.tor_samples(mf, 6).unwrap();
        assert_eq!(samples[3..], [2, 2, 2, 2]);
        assert_eq!(a.tor_limit(mf).unwrap(), 2);
    }

    #[test]
    fn cusp_chart_torsion_limit() {
        // The chart module of the cusp is the normalization k[[t]], with
        // e1 = 0 both for it and its syzygy: the limit is 2·e1(A) = 2.
        let r = parse_ring("p=5; vars x,y").unwrap();
        let entries = ade_catalog(&r, AdeFamily::A(2)).unwrap();
        let mf = &entries.iter().find(|e| e.id == "ade:A2:j=1").unwrap().mf;
        let a = TruncatedAlgebra::for_samples(r, mf.f.clone(), 16).unwrap();
        assert_eq!(a.tor_limit(mf).unwrap(), 2);
    }

    #[test]
    fn colon_of_a_principal_ideal_on_the_dual_numbers_curve() {
        // In k[x,y]/(x^2) with 𝔪^2 = (y^2, xy): multiplying y^2 by xy
        // gives x y^3 ∉ (y^4), so y^2 is outside ((y^4) : 𝔪^2), while
        // y^3 and x y^2 are inside.
        let a = shadow("p=5; vars x,y", "x^2", 16);
        let y4 = parse_poly(&a.ring, "y^4").unwrap();
        let span = a.colon_subspace(&y4, 2, 8).unwrap();
        for (s, inside) in [("y^3", true), ("x*y^2", true), ("y^2", false), ("y", false)] {
            let p = parse_poly(&a.ring, s).unwrap();
            assert_eq!(a.span_contains(&span, &p), inside, "{s}");
        }
    }

    #[test]
    fn reduction_identity_separates_parameters_from_nilpotents() {
        // On k[x,y]/(x^2) the class of y satisfies y·𝔪^n = 𝔪^{n+1} from
        // n = 1 on (but not at n = 0), while the nilpotent x never does.
        let a = shadow("p=5; vars x,y", "x^2", 14);
        let y = parse_poly(&a.ring, "y").unwrap();
        let x = parse_poly(&a.ring, "x").unwrap();
        assert!(!a.reduction_identity(&y, 0, 1).unwrap());
        for n in 1..=4 {
            assert!(a.reduction_identity(&y, n, 1).unwrap(), "n = {n}");
            assert!(!a.reduction_identity(&x, n, 1).unwrap(), "n = {n}");
        }
        // The cusp behaves the same way for its smooth parameter.
        let c = shadow("p=5; vars x,y", "x^2 + y^3", 14);
        let y = parse_poly(&c.ring, "y").unwrap();
        for n in 1..=4 {
            assert!(c.reduction_identity(&y, n, 1).unwrap(), "cusp n = {n}");
        }
    }

    #[test]
    fn same_span_detects_genuine_differences() {
        let a = shadow("p=5; vars x,y", "x^2", 12);
        let g = parse_poly(&a.ring, "y^3").unwrap();
        let h = parse_poly(&a.ring, "y^2").unwrap();
        let s1 = a.colon_subspace(&g, 1, 6).unwrap();
        let s2 = a.colon_subspace(&h, 1, 6).unwrap();
        assert!(a.same_span(&s1, &s1));
        assert!(!a.same_span(&s1, &s2));
    }
}
