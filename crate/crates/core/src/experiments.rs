//! Two batch experiments over a graded Gorenstein ring: the growth of
//! triangle values along the thickenings `M/𝔪^{n+1}M`, and the
//! fingerprint bucketing of approximations of cyclic modules by their
//! stable invariants.

use crate::approx::{mcm_approximation, theta};
use crate::error::{Error, Result};
use crate::etriangle::{e_triangle, is_superficial};
use crate::functors::{cosyzygy, is_stably_iso, strip_free_summands, StableIso};
use crate::hilbert::{hilbert_data, hilbert_function_h, hilbert_series};
use crate::module::{FreeModuleSpec, ModulePresentation};
use crate::poly::Polynomial;
use crate::qring::{GorensteinEvidence, QuotientRing};
use crate::resolution::is_mcm;
use crate::vecelem::{ModOrder, VecElem, VecTerm};
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

/// `M/𝔪^t M`: the presentation of `M` with every degree-`t` monomial
/// multiple of every generator adjoined as a relation.
pub fn thickening(m: &ModulePresentation, t: usize) -> Result<ModulePresentation> {
    let q = m.q().clone();
    let field = q.field().clone();
    let mut rels = m.rels.clone();
    for j in 0..m.rank() {
        for mono in q.std_monomials(t as u32) {
            rels.push(VecElem::normalize(
                &field,
                ModOrder::Top,
                m.rank(),
                vec![VecTerm { comp: j, mono, coeff: field.one() }],
            ));
        }
    }
    ModulePresentation::new(FreeModuleSpec::new(q, m.shifts().to_vec()), rels)
}

#[derive(Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    /// Triangle value of the approximation of `M/𝔪^{n+1}M`.
    pub theta: i64,
    /// `ℓ(𝔪^n M / 𝔪^{n+1} M)`.
    pub h: i64,
    /// `h` times the cosyzygy constant: the lower-bound sequence.
    pub bound: i64,
}

#[derive(Debug, Serialize)]
pub struct GrowthReport {
    pub ring: String,
    pub n_max: usize,
    pub regular: bool,
    /// The ring-level constant: e^T of the cosyzygy of the stripped
    /// approximation of the residue field.
    pub xi_cosyzygy: i64,
    pub rows: Vec<GrowthRow>,
    /// Regular ring: every theta vanishes. Otherwise: the bound
    /// sequence strictly increases.
    pub pass: bool,
}

/// Triangle values along the thickenings of an MCM module. Over a
/// regular ring every value must vanish; over a singular ring the
/// lower-bound sequence `H(M,n)·e^T(Ω⁻¹X_k)` must strictly increase, so
/// the values cannot stay bounded.
pub fn growth_experiment(m: &ModulePresentation, n_max: usize) -> Result<GrowthReport> {
    let q = m.q().clone();
    if q.dim < 2 {
        return Err(Error::Invalid(
            "the growth experiment needs a ring of dimension at least two".into(),
        ));
    }
    if !is_mcm(m) {
        return Err(Error::NotMCM);
    }
    let regular = q.codim == 0;
    let vars: Vec<Polynomial> = (0..q.nvars()).map(|i| Polynomial::var(&q.ring, i)).collect();
    let k = ModulePresentation::cyclic(q.clone(), &vars)?;
    let aw = mcm_approximation(&k)?;
    let xk = strip_free_summands(aw.x());
    let xi_cosyzygy = if xk.is_zero_module() { 0 } else { e_triangle(&cosyzygy(&xk)?)? };
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let nn = thickening(m, n + 1)?;
        let th = theta(&nn)?;
        let h = hilbert_function_h(m, n);
        rows.push(GrowthRow { n, theta: th, h, bound: h * xi_cosyzygy });
    }
    let pass = if regular {
        rows.iter().all(|r| r.theta == 0)
    } else {
        rows.windows(2).all(|w| w[1].bound > w[0].bound) && xi_cosyzygy > 0
    };
    Ok(GrowthReport { ring: q.describe(), n_max, regular, xi_cosyzygy, rows, pass })
}

/// Stable invariants of one approximation, recorded raw and stripped
/// where free summands can interfere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fingerprint {
    /// Hilbert series of the stripped approximation.
    pub series: String,
    pub mu_raw: usize,
    pub mu_stripped: usize,
    pub rank_raw: Option<i64>,
    pub rank_stripped: Option<i64>,
    pub e_triangle: i64,
}

impl Fingerprint {
    fn stable_key(&self) -> String {
        format!(
            "{} | mu {} | rank {:?} | et {}",
            self.series, self.mu_stripped, self.rank_stripped, self.e_triangle
        )
    }
}

#[derive(Debug, Serialize)]
pub struct FingerprintEntry {
    pub ideal: Vec<String>,
    /// "ok", or the reason the ideal was skipped.
    pub status: String,
    pub e0: Option<i64>,
    pub theta: Option<i64>,
    /// The entrywise ceiling `e₀(A/I)` times the section residue theta.
    pub e0_bound: Option<i64>,
    /// Whether theta respects the entrywise bound, when both exist.
    pub bound_ok: Option<bool>,
    pub fingerprint: Option<Fingerprint>,
    pub bucket: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct FingerprintReport {
    pub ring: String,
    pub multiplicity_bound: i64,
    pub superficial_form: Option<String>,
    /// Theta of the residue field over the hyperplane section.
    pub theta_of_section_residue: Option<i64>,
    /// `multiplicity_bound` times the section residue theta.
    pub theta_bound: Option<i64>,
    pub entries: Vec<FingerprintEntry>,
    pub coarse_buckets: usize,
    pub refined_buckets: usize,
    /// Comparisons the search could not settle; buckets stay split, so
    /// the refined count may overshoot.
    pub unknown_splits: u32,
    pub pass: bool,
}

/// Cut the ring by a certified-superficial linear form, keeping the
/// complete-intersection certificate. Candidates are deterministic:
/// single variables from the last, adjacent sums, the all-ones form.
fn section_ring(q: &Arc<QuotientRing>) -> Option<(Arc<QuotientRing>, Polynomial)> {
    let nv = q.nvars();
    let a_free = ModulePresentation::free_module(q.clone(), vec![0]);
    let mut coeffs: Vec<Vec<i64>> = Vec::new();
    for i in (0..nv).rev() {
        let mut c = vec![0; nv];
        c[i] = 1;
        coeffs.push(c);
    }
    for i in 0..nv.saturating_sub(1) {
        let mut c = vec![0; nv];
        c[i] = 1;
        c[i + 1] = 1;
        coeffs.push(c);
    }
    coeffs.push(vec![1; nv]);
    for c in coeffs {
        let l = q.linear_form(&c);
        if l.is_zero() || !is_superficial(&l, &a_free, 6) {
            continue;
        }
        let mut gens = q.ideal_gens.clone();
        gens.push(l.clone());
        let Ok(b) =
            QuotientRing::new(q.ring.clone(), gens, GorensteinEvidence::CompleteIntersection)
        else {
            continue;
        };
        if b.dim + 1 == q.dim {
            return Some((b, l));
        }
    }
    None
}

fn rank_estimate(m: &ModulePresentation, e0_ring: i64) -> Option<i64> {
    if m.rank() == 0 {
        return Some(0);
    }
    if hilbert_series(m).dim() != Some(m.q().dim) {
        return None;
    }
    let e = hilbert_data(m).ok()?.e0();
    (e0_ring != 0 && e % e0_ring == 0).then(|| e / e0_ring)
}

/// Approximate `A/I` for each ideal, fingerprint the approximations,
/// bucket by fingerprint equality, and refine the buckets by stable
/// isomorphism. Ideals that are not codimension-two Cohen-Macaulay of
/// multiplicity within the bound are skipped with a notice.
pub fn fingerprint_experiment(
    q: &Arc<QuotientRing>,
    ideals: &[Vec<Polynomial>],
    m_bound: i64,
    seed: u64,
    budget: u32,
) -> Result<FingerprintReport> {
    if q.dim < 2 {
        return Err(Error::Invalid(
            "the fingerprint experiment needs a ring of dimension at least two".into(),
        ));
    }
    let ring_desc = q.describe();
    if ideals.is_empty() {
        return Ok(FingerprintReport {
            ring: ring_desc,
            multiplicity_bound: m_bound,
            superficial_form: None,
            theta_of_section_residue: None,
            theta_bound: None,
            entries: Vec::new(),
            coarse_buckets: 0,
            refined_buckets: 0,
            unknown_splits: 0,
            pass: true,
        });
    }
    let e0_ring = hilbert_data(&ModulePresentation::free_module(q.clone(), vec![0]))?.e0();
    let (superficial_form, theta_of_section_residue) = match section_ring(q) {
        Some((b, l)) => {
            let vars: Vec<Polynomial> =
                (0..b.nvars()).map(|i| Polynomial::var(&b.ring, i)).collect();
            let kb = ModulePresentation::cyclic(b, &vars)?;
            (Some(l.render()), theta(&kb).ok())
        }
        None => (None, None),
    };
    let theta_bound = theta_of_section_residue.map(|t| m_bound * t);

    let mut entries = Vec::new();
    let mut stripped: Vec<Option<ModulePresentation>> = Vec::new();
    for gens in ideals {
        let ideal: Vec<String> = gens.iter().map(|g| g.render()).collect();
        let skip = |status: String| FingerprintEntry {
            ideal: ideal.clone(),
            status,
            e0: None,
            theta: None,
            e0_bound: None,
            bound_ok: None,
            fingerprint: None,
            bucket: None,
        };
        let n = match ModulePresentation::cyclic(q.clone(), gens) {
            Ok(n) if !n.is_zero_module() => n,
            Ok(_) => {
                entries.push(skip("skipped: the ideal is the unit ideal".into()));
                stripped.push(None);
                continue;
            }
            Err(e) => {
                entries.push(skip(format!("skipped: {e}")));
                stripped.push(None);
                continue;
            }
        };
        let codim = hilbert_series(&n).dim().map(|d| q.dim - d);
        if codim != Some(2) {
            entries.push(skip(format!("skipped: codimension {codim:?}, not 2")));
            stripped.push(None);
            continue;
        }
        let e0 = hilbert_data(&n)?.e0();
        if e0 > m_bound {
            entries.push(skip(format!(
                "skipped: multiplicity {e0} exceeds the bound {m_bound}"
            )));
            stripped.push(None);
            continue;
        }
        let aw = match mcm_approximation(&n) {
            Ok(aw) => aw,
            Err(e) => {
                entries.push(skip(format!("skipped: approximation failed: {e}")));
                stripped.push(None);
                continue;
            }
        };
        let x = aw.x().clone();
        let xs = strip_free_summands(&x);
        let et = if xs.is_zero_module() { 0 } else { e_triangle(&xs)? };
        let fingerprint = Fingerprint {
            series: hilbert_series(&xs).render(),
            mu_raw: x.mu(),
            mu_stripped: xs.rank(),
            rank_raw: rank_estimate(&x, e0_ring),
            rank_stripped: rank_estimate(&xs, e0_ring),
            e_triangle: et,
        };
        let e0_bound = theta_of_section_residue.map(|t| e0 * t);
        entries.push(FingerprintEntry {
            ideal: ideal.clone(),
            status: "ok".into(),
            e0: Some(e0),
            theta: Some(et),
            e0_bound,
            bound_ok: e0_bound.map(|b| et <= b),
            fingerprint: Some(fingerprint),
            bucket: None,
        });
        stripped.push(Some(xs));
    }

    // Coarse buckets by fingerprint, then stable-isomorphism refinement
    // inside each; unresolved comparisons leave the split in place.
    let mut coarse: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, e) in entries.iter().enumerate() {
        if let Some(fp) = &e.fingerprint {
            coarse.entry(fp.stable_key()).or_default().push(i);
        }
    }
    let coarse_buckets = coarse.len();
    let mut next_id = 0usize;
    let mut unknown_splits = 0u32;
    for members in coarse.values() {
        let mut reps: Vec<(usize, usize)> = Vec::new();
        for &i in members {
            let xi = stripped[i].as_ref().expect("fingerprinted entries keep their module");
            let mut assigned = None;
            for &(rep, id) in &reps {
                let xr = stripped[rep].as_ref().unwrap();
                match is_stably_iso(xi, xr, seed, budget) {
                    StableIso::Yes(_) => {
                        assigned = Some(id);
                        break;
                    }
                    StableIso::Unknown(_) => unknown_splits += 1,
                    StableIso::No(_) => {}
                }
            }
            let id = assigned.unwrap_or_else(|| {
                let id = next_id;
                next_id += 1;
                reps.push((i, id));
                id
            });
            entries[i].bucket = Some(id);
        }
    }
    let pass = entries.iter().all(|e| e.bound_ok != Some(false));
    Ok(FingerprintReport {
        ring: ring_desc,
        multiplicity_bound: m_bound,
        superficial_form,
        theta_of_section_residue,
        theta_bound,
        entries,
        coarse_buckets,
        refined_buckets: next_id,
        unknown_splits,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_ring};
    use crate::ring::PolyRing;

    fn polys(ring: &Arc<PolyRing>, ss: &[&str]) -> Vec<Polynomial> {
        ss.iter().map(|s| parse_poly(ring, s).unwrap()).collect()
    }

    fn quadric_surface() -> Arc<QuotientRing> {
        let ring = parse_ring("p=5; vars x,y,z").unwrap();
        let f = parse_poly(&ring, "x^2 + y^2 + z^2").unwrap();
        QuotientRing::new(ring, vec![f], GorensteinEvidence::Hypersurface).unwrap()
    }

    #[test]
    fn regular_rings_have_flat_growth() {
        let ring = parse_ring("q; vars x,y").unwrap();
        let q = QuotientRing::regular(ring).unwrap();
        let free = ModulePresentation::free_module(q, vec![0]);
        let rep = growth_experiment(&free, 2).unwrap();
        assert!(rep.regular);
        assert!(rep.pass);
        assert_eq!(rep.xi_cosyzygy, 0);
        assert!(rep.rows.iter().all(|r| r.theta == 0));
    }

    #[test]
    fn quadric_growth_bounds_strictly_increase() {
        let q = quadric_surface();
        let free = ModulePresentation::free_module(q, vec![0]);
        let rep = growth_experiment(&free, 2).unwrap();
        assert!(!rep.regular);
        assert!(rep.pass, "xi {} rows {:?}", rep.xi_cosyzygy, rep.rows);
        assert!(rep.xi_cosyzygy > 0);
        let hs: Vec<i64> = rep.rows.iter().map(|r| r.h).collect();
        assert_eq!(hs, vec![3, 5]);
        assert!(rep.rows[0].bound < rep.rows[1].bound);
        assert!(rep.rows.iter().all(|r| r.theta > 0));
    }

    #[test]
    fn free_rank_doubles_the_growth_sequence() {
        let q = quadric_surface();
        let one = ModulePresentation::free_module(q.clone(), vec![0]);
        let two = ModulePresentation::free_module(q, vec![0, 0]);
        let r1 = growth_experiment(&one, 1).unwrap();
        let r2 = growth_experiment(&two, 1).unwrap();
        assert_eq!(r2.rows[0].theta, 2 * r1.rows[0].theta);
        assert_eq!(r2.rows[0].h, 2 * r1.rows[0].h);
        assert_eq!(r2.xi_cosyzygy, r1.xi_cosyzygy);
    }

    #[test]
    fn fingerprint_buckets_complete_intersections_together() {
        let q = quadric_surface();
        let ideals = vec![polys(&q.ring, &["x", "y"]), polys(&q.ring, &["x", "z"])];
        let rep = fingerprint_experiment(&q, &ideals, 2, 17, 24).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.entries.len(), 2);
        assert!(rep.entries.iter().all(|e| e.status == "ok"), "{:?}", rep.entries);
        assert_eq!(rep.entries[0].theta, Some(0));
        assert_eq!(rep.entries[1].theta, Some(0));
        assert_eq!(rep.coarse_buckets, 1);
        assert_eq!(rep.refined_buckets, 1);
        assert!(rep.theta_bound.unwrap() > 0);
        assert!(rep.entries.iter().all(|e| e.bound_ok == Some(true)));
    }

    #[test]
    fn fingerprint_skips_wrong_codimension() {
        let q = quadric_surface();
        let ideals = vec![polys(&q.ring, &["x"])];
        let rep = fingerprint_experiment(&q, &ideals, 4, 3, 8).unwrap();
        assert!(rep.pass);
        assert!(rep.entries[0].status.contains("codimension"));
        assert_eq!(rep.entries[0].bucket, None);
        assert_eq!(rep.refined_buckets, 0);
    }

    #[test]
    fn empty_fingerprint_input_is_an_empty_report() {
        let q = quadric_surface();
        let rep = fingerprint_experiment(&q, &[], 3, 1, 4).unwrap();
        assert!(rep.pass);
        assert!(rep.entries.is_empty());
        assert_eq!(rep.coarse_buckets, 0);
    }
}
