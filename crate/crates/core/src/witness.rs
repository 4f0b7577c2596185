//! Certified exactness. A short exact sequence or an exact triangle is
//! only admitted as evidence after every arrow has been machine-checked:
//! injectivity, surjectivity, kernel-image matching, and an independent
//! Hilbert-series cross-check. Constructors run the full certification,
//! so holding one of these values means the checks passed.

use crate::error::{Error, Result};
use crate::functors::{cone, is_stably_iso, ModuleMap, StableIso};
use crate::hilbert::hilbert_series;
use crate::module::{kernel_over_quotient, lift_solver, ModulePresentation};
use crate::resolution::is_mcm;
use crate::vecelem::VecElem;
use std::collections::BTreeMap;

fn same_presentation(a: &ModulePresentation, b: &ModulePresentation) -> bool {
    a.q().describe() == b.q().describe()
        && a.shifts() == b.shifts()
        && a.render_matrix() == b.render_matrix()
}

fn add_numerators(a: &BTreeMap<i64, i64>, b: &BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
    let mut out = a.clone();
    for (&k, &v) in b {
        let e = out.entry(k).or_insert(0);
        *e += v;
        if *e == 0 {
            out.remove(&k);
        }
    }
    out
}

/// A short exact sequence `0 → M₁ →α M₂ →β M₃ → 0` together with its
/// certificate.
#[derive(Clone, Debug)]
pub struct SESWitness {
    pub alpha: ModuleMap,
    pub beta: ModuleMap,
}

impl SESWitness {
    pub fn new(alpha: ModuleMap, beta: ModuleMap) -> Result<Self> {
        let w = SESWitness { alpha, beta };
        w.certify()?;
        Ok(w)
    }

    pub fn sub(&self) -> &ModulePresentation {
        &self.alpha.source
    }

    pub fn mid(&self) -> &ModulePresentation {
        &self.alpha.target
    }

    pub fn quot(&self) -> &ModulePresentation {
        &self.beta.target
    }

    /// Re-runs every check; each failure names the broken condition.
    pub fn certify(&self) -> Result<()> {
        if !same_presentation(&self.alpha.target, &self.beta.source) {
            return Err(Error::UncertifiedWitness(
                "the two maps do not share a middle term".into(),
            ));
        }
        if !self.beta.compose(&self.alpha)?.is_zero_map() {
            return Err(Error::UncertifiedWitness("the composite β∘α is not zero".into()));
        }
        if !self.alpha.kernel_module().is_zero_module() {
            return Err(Error::UncertifiedWitness("α is not injective".into()));
        }
        if !self.beta.is_surjective() {
            return Err(Error::UncertifiedWitness("β is not surjective".into()));
        }
        // Exactness in the middle: every kernel generator of β must lift
        // through α.
        let mid = self.mid();
        let q = mid.q().clone();
        let ker: Vec<VecElem> =
            kernel_over_quotient(&q, self.quot().rank(), &self.beta.columns(), &self.quot().rels);
        let image = lift_solver(&q, mid.rank(), &self.alpha.columns(), &mid.rels);
        for k in &ker {
            if image.lift(k).is_none() {
                return Err(Error::UncertifiedWitness(format!(
                    "kernel element {} of β does not come from α",
                    k.render(&q.ring)
                )));
            }
        }
        // Independent cross-check: graded Hilbert series must be additive.
        let hs_sub = hilbert_series(self.sub());
        let hs_mid = hilbert_series(mid);
        let hs_quot = hilbert_series(self.quot());
        if add_numerators(&hs_sub.numer, &hs_quot.numer) != hs_mid.numer {
            return Err(Error::UncertifiedWitness(
                "Hilbert series are not additive across the sequence".into(),
            ));
        }
        Ok(())
    }
}

/// The split sequence `0 → M → M ⊕ N → N → 0` with the block inclusion
/// and projection.
pub fn split_sequence(m: &ModulePresentation, n: &ModulePresentation) -> Result<SESWitness> {
    let sum = m.direct_sum(n);
    let ring = &m.q().ring;
    let one = crate::poly::Polynomial::one(ring);
    let zero = crate::poly::Polynomial::zero(ring);
    let inc: Vec<Vec<crate::poly::Polynomial>> = (0..sum.rank())
        .map(|i| {
            (0..m.rank()).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()
        })
        .collect();
    let proj: Vec<Vec<crate::poly::Polynomial>> = (0..n.rank())
        .map(|i| {
            (0..sum.rank())
                .map(|j| if j == m.rank() + i { one.clone() } else { zero.clone() })
                .collect()
        })
        .collect();
    let alpha = ModuleMap::new(m.clone(), sum.clone(), inc)?;
    let beta = ModuleMap::new(sum, n.clone(), proj)?;
    SESWitness::new(alpha, beta)
}

/// How a triangle witness was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleProvenance {
    /// Built as the mapping cone of a map of maximal Cohen-Macaulay
    /// modules.
    Cone,
    /// Read off a short exact sequence, with the third corner identified
    /// with the cone up to free summands.
    Ses,
}

/// An exact triangle `M →f N →g L → Ω⁻¹M` in the stable category, with
/// the construction data that certifies it.
#[derive(Clone, Debug)]
pub struct TriangleWitness {
    pub f: ModuleMap,
    /// `N → L`: the cone inclusion, or the surjection of the source
    /// sequence.
    pub g: ModuleMap,
    /// `L → Ω⁻¹M`, available when `L` is literally the cone.
    pub h: Option<ModuleMap>,
    /// The third corner `L`.
    pub third: ModulePresentation,
    /// The cosyzygy `Ω⁻¹M` the triangle rotates into.
    pub cosyzygy: ModulePresentation,
    pub provenance: TriangleProvenance,
}

impl TriangleWitness {
    pub fn m(&self) -> &ModulePresentation {
        &self.f.source
    }

    pub fn n(&self) -> &ModulePresentation {
        &self.f.target
    }
}

/// Certifies `0 → N → C(f) → Ω⁻¹M → 0` and that `g∘f` factors through
/// the free module the cosyzygy embedding lands in, which makes the
/// composite vanish stably.
fn certify_cone(f: &ModuleMap) -> Result<crate::functors::ConeData> {
    let data = cone(f)?;
    SESWitness::new(data.include.clone(), data.project.clone())?;
    let q = f.source.q().clone();
    let ring = &q.ring;
    let n_rank = f.target.rank();
    let gstar = &data.embedding.target;
    let jprime_mat: Vec<Vec<crate::poly::Polynomial>> = (0..data.cone.rank())
        .map(|i| {
            (0..gstar.rank())
                .map(|j| {
                    if i == n_rank + j {
                        crate::poly::Polynomial::one(ring)
                    } else {
                        crate::poly::Polynomial::zero(ring)
                    }
                })
                .collect()
        })
        .collect();
    let jprime = ModuleMap::new(gstar.clone(), data.cone.clone(), jprime_mat)?;
    let through_cone = data.include.compose(f)?;
    let through_free = jprime.compose(&data.embedding)?;
    let field = q.field();
    for (a, b) in through_cone.columns().iter().zip(through_free.columns().iter()) {
        if !data.cone.is_zero_element(&a.sub(b, field, crate::vecelem::ModOrder::Top)) {
            return Err(Error::UncertifiedWitness(
                "the composite into the cone does not factor through a free module".into(),
            ));
        }
    }
    Ok(data)
}

/// The basic triangle on `f: M → N`: pushout of the cosyzygy embedding
/// of `M` along `f`, fully certified.
pub fn triangle_from_map(f: &ModuleMap) -> Result<TriangleWitness> {
    let data = certify_cone(f)?;
    Ok(TriangleWitness {
        f: f.clone(),
        g: data.include,
        h: Some(data.project),
        third: data.cone,
        cosyzygy: data.cosyzygy,
        provenance: TriangleProvenance::Cone,
    })
}

/// Reads a triangle off a certified short exact sequence of maximal
/// Cohen-Macaulay modules: the cone of `α` splits as a free module plus
/// the quotient, so the quotient itself serves as the third corner once
/// the identification is certified.
pub fn triangle_from_ses(ses: &SESWitness, seed: u64, budget: u32) -> Result<TriangleWitness> {
    for (name, corner) in
        [("first", ses.sub()), ("middle", ses.mid()), ("third", ses.quot())]
    {
        if !is_mcm(corner) {
            let _ = name;
            return Err(Error::NotMCM);
        }
    }
    let data = certify_cone(&ses.alpha)?;
    match is_stably_iso(&data.cone, ses.quot(), seed, budget) {
        StableIso::Yes(_) => {}
        StableIso::No(why) => {
            return Err(Error::UncertifiedWitness(format!(
                "the cone is not the quotient up to free summands: {why}"
            )));
        }
        StableIso::Unknown(tried) => {
            return Err(Error::UncertifiedWitness(format!(
                "could not match the cone with the quotient after {tried} attempts"
            )));
        }
    }
    Ok(TriangleWitness {
        f: ses.alpha.clone(),
        g: ses.beta.clone(),
        h: None,
        third: ses.quot().clone(),
        cosyzygy: data.cosyzygy,
        provenance: TriangleProvenance::Ses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::FreeModuleSpec;
    use crate::parse::{parse_matrix, parse_poly, parse_ring};
    use crate::qring::{GorensteinEvidence, QuotientRing};
    use std::sync::Arc;

    fn dual_numbers_curve() -> Arc<QuotientRing> {
        let r = parse_ring("p=5; vars x,y").unwrap();
        QuotientRing::new(
            r.clone(),
            vec![parse_poly(&r, "x^2").unwrap()],
            GorensteinEvidence::Hypersurface,
        )
        .unwrap()
    }

    fn cyclic(q: &Arc<QuotientRing>, rels: &[&str]) -> ModulePresentation {
        let rows: Vec<Vec<String>> = vec![rels.iter().map(|s| s.to_string()).collect()];
        let m = parse_matrix(&q.ring, &rows).unwrap();
        ModulePresentation::from_matrix(q.clone(), vec![0], &m).unwrap()
    }

    fn map(
        source: &ModulePresentation,
        target: &ModulePresentation,
        entries: &[&[&str]],
    ) -> ModuleMap {
        let ring = &source.q().ring;
        let matrix = entries
            .iter()
            .map(|row| row.iter().map(|e| parse_poly(ring, e).unwrap()).collect())
            .collect();
        ModuleMap::new(source.clone(), target.clone(), matrix).unwrap()
    }

    fn multiplication_ses(a: &Arc<QuotientRing>) -> SESWitness {
        let point = cyclic(a, &["x"]);
        let shifted = point.twist(1);
        let free = ModulePresentation::free_module(a.clone(), vec![0]);
        let alpha = map(&shifted, &free, &[&["x"]]);
        let beta = map(&free, &point, &[&["1"]]);
        SESWitness::new(alpha, beta).unwrap()
    }

    #[test]
    fn multiplication_sequence_is_certified() {
        let a = dual_numbers_curve();
        let ses = multiplication_ses(&a);
        assert_eq!(ses.sub().shifts(), &[1]);
        assert_eq!(ses.mid().shifts(), &[0]);
        assert_eq!(ses.quot().shifts(), &[0]);
        // Certification is idempotent.
        ses.certify().unwrap();
    }

    #[test]
    fn split_sequences_certify() {
        let a = dual_numbers_curve();
        let point = cyclic(&a, &["x"]);
        let free = ModulePresentation::free_module(a.clone(), vec![1]);
        let ses = split_sequence(&point, &free).unwrap();
        assert_eq!(ses.mid().rank(), 2);
        assert_eq!(ses.mid().shifts(), &[0, 1]);
        let swapped = split_sequence(&free, &point).unwrap();
        assert_eq!(swapped.quot().rank(), 1);
    }

    #[test]
    fn broken_surjection_is_refused() {
        let a = dual_numbers_curve();
        let point = cyclic(&a, &["x"]);
        let shifted = point.twist(1);
        let free = ModulePresentation::free_module(a.clone(), vec![0]);
        let alpha = map(&shifted, &free, &[&["x"]]);
        let beta = ModuleMap::zero_map(free, point);
        let err = SESWitness::new(alpha, beta).unwrap_err();
        assert!(err.is_falsified_assertion());
        assert!(err.to_string().contains("surjective"));
    }

    #[test]
    fn mismatched_middle_is_refused() {
        let a = dual_numbers_curve();
        let point = cyclic(&a, &["x"]);
        let shifted = point.twist(1);
        let free = ModulePresentation::free_module(a.clone(), vec![0]);
        let other = ModulePresentation::free_module(a.clone(), vec![1]);
        let alpha = map(&shifted, &free, &[&["x"]]);
        let beta = map(&other, &point, &[&["x"]]);
        let err = SESWitness::new(alpha, beta).unwrap_err();
        assert!(err.to_string().contains("middle"));
    }

    #[test]
    fn non_exact_middle_is_refused() {
        let a = dual_numbers_curve();
        // A →x A →1 A/(x) has kernel (x) in the middle but the first map
        // only reaches (x^2) = 0, so exactness fails at the middle term.
        let free1 = ModulePresentation::free_module(a.clone(), vec![2]);
        let free0 = ModulePresentation::free_module(a.clone(), vec![0]);
        let point = cyclic(&a, &["x"]);
        let alpha = map(&free1, &free0, &[&["x^2"]]);
        let beta = map(&free0, &point, &[&["1"]]);
        let err = SESWitness::new(alpha, beta).unwrap_err();
        assert!(err.is_falsified_assertion());
    }

    #[test]
    fn cone_triangle_of_multiplication_is_certified() {
        let a = dual_numbers_curve();
        let point = cyclic(&a, &["x"]);
        let shifted = point.twist(1);
        let f = map(&shifted, &point, &[&["y"]]);
        let tri = triangle_from_map(&f).unwrap();
        assert_eq!(tri.provenance, TriangleProvenance::Cone);
        assert_eq!(tri.m().shifts(), &[1]);
        assert_eq!(tri.cosyzygy.minimalize().shifts(), &[0]);
        assert!(tri.h.is_some());
        // The third corner carries both cone blocks.
        assert_eq!(tri.third.rank(), 2);
    }

    #[test]
    fn ses_triangle_identifies_quotient_with_cone() {
        let a = dual_numbers_curve();
        let ses = multiplication_ses(&a);
        let tri = triangle_from_ses(&ses, 7, 64).unwrap();
        assert_eq!(tri.provenance, TriangleProvenance::Ses);
        assert_eq!(tri.third.render_matrix(), ses.quot().render_matrix());
        assert!(tri.h.is_none());
    }

    #[test]
    fn ses_triangle_needs_mcm_corners() {
        let a = dual_numbers_curve();
        // 0 → (x,y)(0 ⊕ -1 gens) → A → k → 0: the residue field has depth
        // zero, so no triangle comes out of this sequence.
        let k = cyclic(&a, &["x", "y"]);
        let free = ModulePresentation::free_module(a.clone(), vec![0]);
        let ideal = {
            let gens = vec![
                crate::vecelem::poly_to_vec(
                    &parse_poly(&a.ring, "x").unwrap(),
                    1,
                    0,
                    a.field(),
                    crate::vecelem::ModOrder::Top,
                ),
                crate::vecelem::poly_to_vec(
                    &parse_poly(&a.ring, "y").unwrap(),
                    1,
                    0,
                    a.field(),
                    crate::vecelem::ModOrder::Top,
                ),
            ];
            let rels = crate::module::kernel_over_quotient(&a, 1, &gens, &[]);
            ModulePresentation::new(FreeModuleSpec::new(a.clone(), vec![1, 1]), rels).unwrap()
        };
        let alpha = map(&ideal, &free, &[&["x", "y"]]);
        let beta = map(&free, &k, &[&["1"]]);
        let ses = SESWitness::new(alpha, beta).unwrap();
        let err = triangle_from_ses(&ses, 3, 32).unwrap_err();
        assert!(matches!(err, Error::NotMCM));
    }
}
