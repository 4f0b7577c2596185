//! Ideal linkage through complete-intersection ideals, the horizontal
//! linkage operator Ω∘Tr on modules, and the dimension-one colon-identity
//! window on truncated curve shadows.
//!
//! Two ideals are linked through 𝔮 when each is the colon of the other:
//! `I = (𝔮 : J)` and `J = (𝔮 : I)`. The engine computes colons by a
//! syzygy computation over the ambient polynomial ring, canonicalizes
//! every ideal as its reduced Groebner basis, and certifies the linking
//! ideal as a complete intersection unless the caller explicitly vouches
//! for it.

use crate::error::{Error, Result};
use crate::functors::{is_stably_iso, transpose, StableIso};
use crate::groebner::{ideal_groebner, poly_normal_form, KernelSolver};
use crate::module::{minimal_generators_over_s, ModulePresentation};
use crate::poly::Polynomial;
use crate::qring::{GorensteinEvidence, QuotientRing};
use crate::resolution::resolve_over_quotient;
use crate::ring::PolyRing;
use crate::trunc::TruncatedAlgebra;
use crate::vecelem::{matrix_columns, poly_to_vec, ModOrder, VecElem};
use serde::Serialize;
use std::sync::Arc;

/// Both colon computations around one link, with the evidence that the
/// linking ideal deserves to be linked through.
#[derive(Debug)]
pub struct LinkageWitness {
    /// Reduced Groebner basis of the input ideal `I`.
    pub i_basis: Vec<Polynomial>,
    /// Reduced Groebner basis of the linking ideal `𝔮`.
    pub q_basis: Vec<Polynomial>,
    /// Reduced Groebner basis of `J = (𝔮 : I)`.
    pub j_basis: Vec<Polynomial>,
    /// Reduced Groebner basis of the back colon `(𝔮 : J)`.
    pub back_basis: Vec<Polynomial>,
    pub evidence: GorensteinEvidence,
    /// Set when the linking ideal is accepted on the caller's word.
    pub warning: Option<String>,
    /// False when `J` is the unit ideal (linking an ideal to itself).
    pub proper: bool,
    /// Whether the back colon returned `I`, so the two ideals are
    /// genuinely linked rather than merely coloned.
    pub truly_linked: bool,
}

impl LinkageWitness {
    pub fn is_certified_link(&self) -> bool {
        self.proper && self.truly_linked
    }

    pub fn report(&self) -> LinkageReport {
        let render = |v: &[Polynomial]| v.iter().map(|p| p.render()).collect();
        LinkageReport {
            q: render(&self.q_basis),
            i: render(&self.i_basis),
            j: render(&self.j_basis),
            back: render(&self.back_basis),
            evidence: self.evidence,
            warning: self.warning.clone(),
            proper: self.proper,
            truly_linked: self.truly_linked,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LinkageReport {
    pub q: Vec<String>,
    pub i: Vec<String>,
    pub j: Vec<String>,
    pub back: Vec<String>,
    pub evidence: GorensteinEvidence,
    pub warning: Option<String>,
    pub proper: bool,
    pub truly_linked: bool,
}

/// Equality of ideals presented by their reduced Groebner bases (which
/// are unique, so listwise comparison decides it).
pub fn gb_equal(a: &[Polynomial], b: &[Polynomial]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.sub(y).is_zero())
}

/// Generators of the ideal quotient `(𝔮 : I)`: syzygies of the single
/// column `(f_1, …, f_t)` against the 𝔮-multiples of each slot. A
/// coefficient `g` with `g·f_j ∈ 𝔮` for every `j` is exactly a colon
/// element, and the solver's kernel generators reach them all.
pub fn ideal_colon(
    ring: &Arc<PolyRing>,
    q_gens: &[Polynomial],
    divisors: &[Polynomial],
) -> Vec<Polynomial> {
    let field = &ring.field;
    let live: Vec<Polynomial> = divisors.iter().filter(|f| !f.is_zero()).cloned().collect();
    if live.is_empty() {
        return vec![Polynomial::one(ring)];
    }
    let t = live.len();
    let col_mat: Vec<Vec<Polynomial>> = live.into_iter().map(|f| vec![f]).collect();
    let cols = matrix_columns(&col_mat, field, ModOrder::Top);
    let mut plain = Vec::new();
    for qg in q_gens {
        for j in 0..t {
            plain.push(poly_to_vec(qg, t, j, field, ModOrder::Top));
        }
    }
    let solver = KernelSolver::new(ring, t, &cols, &plain);
    let mut out: Vec<Polynomial> = solver
        .kernel_gens()
        .iter()
        .map(|k| k.component_poly(ring, 0))
        .filter(|p| !p.is_zero())
        .collect();
    // 𝔮 itself always sits inside the colon.
    out.extend(q_gens.iter().cloned());
    out
}

fn homogeneous_nonzero(gens: &[Polynomial], what: &str) -> Result<Vec<Polynomial>> {
    let live: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if live.is_empty() {
        return Err(Error::Invalid(format!("{what} needs at least one nonzero generator")));
    }
    for g in &live {
        if !g.is_homogeneous() {
            return Err(Error::Inhomogeneous(format!("{what} generator {}", g.render())));
        }
    }
    Ok(live)
}

fn minimal_ideal_gens(ring: &Arc<PolyRing>, gens: &[Polynomial]) -> Result<Vec<Polynomial>> {
    let q = QuotientRing::regular(ring.clone())?;
    let vecs: Vec<VecElem> = gens
        .iter()
        .map(|g| poly_to_vec(g, 1, 0, &ring.field, ModOrder::Top))
        .collect();
    let min = minimal_generators_over_s(&q, &[0], &vecs);
    Ok(min.iter().map(|v| v.component_poly(ring, 0)).collect())
}

/// Link `I` through `𝔮`, insisting that `𝔮` certifies as a complete
/// intersection (its minimal generators match its codimension).
pub fn link_ideal(
    ring: &Arc<PolyRing>,
    i_gens: &[Polynomial],
    q_gens: &[Polynomial],
) -> Result<(Vec<Polynomial>, LinkageWitness)> {
    link_ideal_with(ring, i_gens, q_gens, GorensteinEvidence::CompleteIntersection)
}

/// Link `I` through `𝔮` with the caller's choice of evidence. Anything
/// other than `UserAsserted` demands the complete-intersection
/// certificate; `UserAsserted` proceeds without it but the witness then
/// carries a warning.
pub fn link_ideal_with(
    ring: &Arc<PolyRing>,
    i_gens: &[Polynomial],
    q_gens: &[Polynomial],
    evidence: GorensteinEvidence,
) -> Result<(Vec<Polynomial>, LinkageWitness)> {
    let i_gens = homogeneous_nonzero(i_gens, "the ideal")?;
    let q_gens = homogeneous_nonzero(q_gens, "the linking ideal")?;
    let i_gb = ideal_groebner(ring, &i_gens);
    let q_gb = ideal_groebner(ring, &q_gens);
    if q_gb.iter().any(|g| !poly_normal_form(ring, g, &i_gb).is_zero()) {
        return Err(Error::QNotInsideI);
    }
    let q_min = minimal_ideal_gens(ring, &q_gens)?;
    let certified = QuotientRing::new(
        ring.clone(),
        q_min.clone(),
        GorensteinEvidence::CompleteIntersection,
    )
    .is_ok();
    let (evidence, warning) = if certified {
        (GorensteinEvidence::CompleteIntersection, None)
    } else if matches!(evidence, GorensteinEvidence::UserAsserted) {
        (
            GorensteinEvidence::UserAsserted,
            Some(format!(
                "the linking ideal is not a certified complete intersection \
                 ({} minimal generators); proceeding on the caller's assertion \
                 that it is Gorenstein",
                q_min.len()
            )),
        )
    } else {
        return Err(Error::QNotCI);
    };
    let j_gb = ideal_groebner(ring, &ideal_colon(ring, &q_gb, &i_gb));
    let proper = !j_gb.iter().any(|g| g.degree() == Some(0));
    let back_gb = ideal_groebner(ring, &ideal_colon(ring, &q_gb, &j_gb));
    let truly_linked = gb_equal(&back_gb, &i_gb);
    let witness = LinkageWitness {
        i_basis: i_gb,
        q_basis: q_gb,
        j_basis: j_gb.clone(),
        back_basis: back_gb,
        evidence,
        warning,
        proper,
        truly_linked,
    };
    Ok((j_gb, witness))
}

/// The horizontal linkage operator `M ↦ Ω(Tr(M))`: first syzygy of the
/// Auslander transpose. Free modules transpose to zero, so the partner
/// of a free module is the zero module.
pub fn horizontal_link_partner(m: &ModulePresentation) -> ModulePresentation {
    let t = transpose(m);
    if t.rank() == 0 {
        return ModulePresentation::zero_module(m.q().clone());
    }
    let res = resolve_over_quotient(&t, 2);
    res.syzygy_presentation(1)
        .expect("a two-step resolution always exposes its first syzygy")
        .minimalize()
}

#[derive(Debug, Serialize)]
pub struct HorizontalReport {
    pub partner_of_first: String,
    pub partner_of_second: String,
    /// A partner degenerated to zero (free input).
    pub degenerate: bool,
    pub forward: String,
    pub backward: String,
    pub pass: bool,
}

fn shape(m: &ModulePresentation) -> String {
    format!("rank {} shifts {:?}", m.rank(), m.shifts())
}

fn iso_verdict(s: &StableIso) -> String {
    match s {
        StableIso::Yes(_) => "stably isomorphic".into(),
        StableIso::No(reason) => format!("not stably isomorphic: {reason}"),
        StableIso::Unknown(n) => format!("unresolved after {n} candidate maps"),
    }
}

/// The two stable isomorphisms making `M` and `N` horizontal partners:
/// `Ω Tr M` against `N` and `Ω Tr N` against `M`.
pub fn check_horizontal(
    m: &ModulePresentation,
    n: &ModulePresentation,
    seed: u64,
    budget: u32,
) -> HorizontalReport {
    let pm = horizontal_link_partner(m);
    let pn = horizontal_link_partner(n);
    let forward = is_stably_iso(&pm, n, seed, budget);
    let backward = is_stably_iso(&pn, m, seed, budget);
    HorizontalReport {
        partner_of_first: shape(&pm),
        partner_of_second: shape(&pn),
        degenerate: pm.is_zero_module() || pn.is_zero_module(),
        forward: iso_verdict(&forward),
        backward: iso_verdict(&backward),
        pass: forward.is_yes() && backward.is_yes(),
    }
}

#[derive(Debug, Serialize)]
pub struct ReductionCell {
    pub n: usize,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct ColonCell {
    pub r: usize,
    pub n: usize,
    pub holds: bool,
}

#[derive(Debug, Serialize)]
pub struct OnsetCell {
    pub r: usize,
    /// First window index from which the identity holds through the top.
    pub onset: Option<usize>,
}

/// Window evidence for the colon identities behind even linkage of the
/// powers of the maximal ideal on a curve: every verdict is a statement
/// about classes of degree at most `cutoff` in the shadow of order
/// `order`, both of which are recorded.
#[derive(Debug, Serialize)]
pub struct Dim1WindowReport {
    pub equation: String,
    pub parameter: String,
    pub s: usize,
    pub window_lo: usize,
    pub window_hi: usize,
    pub order: u32,
    pub cutoff: u32,
    /// `𝔪^{n+s} = a·𝔪^n` across the window.
    pub reduction: Vec<ReductionCell>,
    /// `(a^n : 𝔪^{sn−r}) = (a^{n−1} : 𝔪^{s(n−1)−r})` per `r` and `n`.
    pub cells: Vec<ColonCell>,
    pub onsets: Vec<OnsetCell>,
    pub pass: bool,
}

/// Check the colon identities `(a^n : 𝔪^{sn−r}) = (a^{n−1} : 𝔪^{s(n−1)−r})`
/// on the curve `k[x,y]` localized mod `f`, for `n` over the window and
/// `r = 0..s`. The truncation order starts large enough for the window
/// and doubles (up to 64) if a guard still trips.
pub fn dim1_linkage_window(
    ring: &Arc<PolyRing>,
    f: &Polynomial,
    a: &Polynomial,
    s: usize,
    window: (usize, usize),
) -> Result<Dim1WindowReport> {
    dim1_linkage_window_from(ring, f, a, s, window, None)
}

/// Same sweep with an explicit starting truncation order; the order
/// still doubles on a too-small shadow, capped as usual.
pub fn dim1_linkage_window_from(
    ring: &Arc<PolyRing>,
    f: &Polynomial,
    a: &Polynomial,
    s: usize,
    window: (usize, usize),
    start_order: Option<u32>,
) -> Result<Dim1WindowReport> {
    if ring.nvars() != 2 {
        return Err(Error::Invalid(
            "the colon-identity window runs on plane-curve shadows (two variables)".into(),
        ));
    }
    if s == 0 {
        return Err(Error::Invalid("the parameter order s must be positive".into()));
    }
    let lo = window.0.max(2);
    let hi = window.1;
    if hi < lo {
        return Err(Error::Invalid(format!("empty window ({lo}, {hi})")));
    }
    let ord = a
        .terms()
        .iter()
        .map(|(m, _)| m.degree())
        .min()
        .ok_or_else(|| Error::Invalid("the parameter must be nonzero".into()))?;
    if (ord as usize) < s {
        return Err(Error::Invalid(format!(
            "the parameter has order {ord}, so it lies outside 𝔪^{s}"
        )));
    }
    let default_order = (2 * s * hi + 4) as u32;
    let mut order = start_order.unwrap_or(default_order).max(4);
    let cap = order.max(64);
    loop {
        match window_attempt(ring, f, a, s, lo, hi, order) {
            Err(Error::TruncationTooSmall(_)) if order < cap => order = (order * 2).min(cap),
            other => return other,
        }
    }
}

fn window_attempt(
    ring: &Arc<PolyRing>,
    f: &Polynomial,
    a: &Polynomial,
    s: usize,
    lo: usize,
    hi: usize,
    order: u32,
) -> Result<Dim1WindowReport> {
    let shadow = TruncatedAlgebra::new(ring.clone(), f.clone(), order)?;
    let cutoff = (s * hi + 2) as u32;
    let mut reduction = Vec::new();
    for n in lo..=hi {
        reduction.push(ReductionCell { n, holds: shadow.reduction_identity(a, n, s)? });
    }
    if !reduction.last().map(|c| c.holds).unwrap_or(false) {
        return Err(Error::ParameterPropertyFails(format!(
            "𝔪^(n+{s}) = a·𝔪^n fails at n = {hi} (truncation order {order})"
        )));
    }
    let mut cells = Vec::new();
    let mut onsets = Vec::new();
    for r in 0..s {
        let spans = ((lo - 1)..=hi)
            .map(|n| shadow.colon_subspace(&a.pow(n as u32), s * n - r, cutoff))
            .collect::<Result<Vec<_>>>()?;
        let holds: Vec<bool> = (1..spans.len())
            .map(|idx| shadow.same_span(&spans[idx], &spans[idx - 1]))
            .collect();
        for (off, h) in holds.iter().enumerate() {
            cells.push(ColonCell { r, n: lo + off, holds: *h });
        }
        let mut onset = None;
        for (off, h) in holds.iter().enumerate().rev() {
            if !h {
                break;
            }
            onset = Some(lo + off);
        }
        onsets.push(OnsetCell { r, onset });
    }
    let pass = onsets.iter().all(|o| o.onset.is_some());
    Ok(Dim1WindowReport {
        equation: f.render(),
        parameter: a.render(),
        s,
        window_lo: lo,
        window_hi: hi,
        order,
        cutoff,
        reduction,
        cells,
        onsets,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_ring};

    fn polys(ring: &Arc<PolyRing>, ss: &[&str]) -> Vec<Polynomial> {
        ss.iter().map(|s| parse_poly(ring, s).unwrap()).collect()
    }

    #[test]
    fn linking_the_maximal_ideal_through_x3_y() {
        let ring = parse_ring("q; vars x,y").unwrap();
        let i = polys(&ring, &["x", "y"]);
        let q = polys(&ring, &["x^3", "y"]);
        let (j, w) = link_ideal(&ring, &i, &q).unwrap();
        let expect = ideal_groebner(&ring, &polys(&ring, &["x^2", "y"]));
        assert!(gb_equal(&j, &expect));
        assert!(w.proper);
        assert!(w.truly_linked);
        assert!(w.is_certified_link());
        assert_eq!(w.evidence, GorensteinEvidence::CompleteIntersection);
        assert!(w.warning.is_none());
        // Linking again returns to the original ideal.
        let (j2, w2) = link_ideal(&ring, &j, &q).unwrap();
        assert!(gb_equal(&j2, &w.i_basis));
        assert!(w2.truly_linked);
    }

    #[test]
    fn self_linked_maximal_ideal() {
        let ring = parse_ring("q; vars x,y").unwrap();
        let i = polys(&ring, &["x", "y"]);
        let q = polys(&ring, &["x", "y^2"]);
        let (j, w) = link_ideal(&ring, &i, &q).unwrap();
        assert!(gb_equal(&j, &w.i_basis));
        assert!(w.is_certified_link());
    }

    #[test]
    fn linking_an_ideal_to_itself_is_degenerate() {
        let ring = parse_ring("q; vars x,y").unwrap();
        let q = polys(&ring, &["x^3", "y"]);
        let (j, w) = link_ideal(&ring, &q, &q).unwrap();
        assert_eq!(j.len(), 1);
        assert_eq!(j[0].degree(), Some(0));
        assert!(!w.proper);
        assert!(!w.is_certified_link());
    }

    #[test]
    fn linking_ideal_must_sit_inside() {
        let ring = parse_ring("q; vars x,y").unwrap();
        let i = polys(&ring, &["x^2"]);
        let q = polys(&ring, &["x^3", "y"]);
        assert!(matches!(link_ideal(&ring, &i, &q), Err(Error::QNotInsideI)));
    }

    #[test]
    fn non_ci_linking_ideal_requires_user_assertion() {
        // 𝔪² has three minimal generators in codimension two, so it fails
        // the complete-intersection certificate.
        let ring = parse_ring("q; vars x,y").unwrap();
        let i = polys(&ring, &["x", "y"]);
        let q = polys(&ring, &["x^2", "x*y", "y^2"]);
        assert!(matches!(link_ideal(&ring, &i, &q), Err(Error::QNotCI)));
        let (j, w) =
            link_ideal_with(&ring, &i, &q, GorensteinEvidence::UserAsserted).unwrap();
        assert!(w.warning.is_some());
        assert_eq!(w.evidence, GorensteinEvidence::UserAsserted);
        // (𝔪² : 𝔪) = 𝔪, so the ideal is self-linked here too.
        assert!(gb_equal(&j, &w.i_basis));
        assert!(w.truly_linked);
    }

    #[test]
    fn partner_of_a_cyclic_module_matches_the_colon_ideal() {
        // Over B = k[x]/(x³): the module partner of B/(x) is B/(x²),
        // the cyclic module on the colon ideal ((x³) : (x)).
        let ring = parse_ring("p=5; vars x").unwrap();
        let i = polys(&ring, &["x"]);
        let qi = polys(&ring, &["x^3"]);
        let (j, w) = link_ideal(&ring, &i, &qi).unwrap();
        assert!(w.is_certified_link());
        let b = QuotientRing::new(ring.clone(), qi, GorensteinEvidence::Hypersurface).unwrap();
        let m = ModulePresentation::cyclic(b.clone(), &i).unwrap();
        let partner = horizontal_link_partner(&m);
        let expected = ModulePresentation::cyclic(b, &j).unwrap();
        assert!(is_stably_iso(&partner, &expected, 11, 40).is_yes());
        let rep = check_horizontal(&m, &expected, 11, 40);
        assert!(rep.pass, "forward {} backward {}", rep.forward, rep.backward);
        assert!(!rep.degenerate);
    }

    #[test]
    fn free_modules_degenerate_under_horizontal_linkage() {
        let ring = parse_ring("p=5; vars x").unwrap();
        let qi = polys(&ring, &["x^3"]);
        let b = QuotientRing::new(ring, qi, GorensteinEvidence::Hypersurface).unwrap();
        let free = ModulePresentation::free_module(b, vec![0]);
        assert!(horizontal_link_partner(&free).is_zero_module());
        let rep = check_horizontal(&free, &free, 7, 16);
        assert!(rep.degenerate);
    }

    #[test]
    fn double_partner_is_the_identity_on_the_dual_numbers() {
        let ring = parse_ring("p=5; vars x").unwrap();
        let qi = polys(&ring, &["x^2"]);
        let b = QuotientRing::new(ring.clone(), qi, GorensteinEvidence::Hypersurface).unwrap();
        let k = ModulePresentation::cyclic(b, &polys(&ring, &["x"])).unwrap();
        let p1 = horizontal_link_partner(&k);
        let p2 = horizontal_link_partner(&p1);
        assert!(is_stably_iso(&p1, &k, 13, 32).is_yes());
        assert!(is_stably_iso(&p2, &k, 13, 32).is_yes());
    }

    #[test]
    fn colon_identity_window_on_the_dual_numbers_curve() {
        let ring = parse_ring("p=5; vars x,y").unwrap();
        let f = parse_poly(&ring, "x^2").unwrap();
        let a = parse_poly(&ring, "y").unwrap();
        let rep = dim1_linkage_window(&ring, &f, &a, 1, (2, 6)).unwrap();
        assert!(rep.pass);
        assert!(rep.cells.iter().all(|c| c.holds));
        assert_eq!(rep.onsets.len(), 1);
        assert_eq!(rep.onsets[0].onset, Some(2));
        assert!(rep.reduction.iter().all(|c| c.holds));
    }

    #[test]
    fn colon_identity_window_on_the_cusp() {
        let ring = parse_ring("p=5; vars x,y").unwrap();
        let f = parse_poly(&ring, "x^2 + y^3").unwrap();
        let a = parse_poly(&ring, "y").unwrap();
        let rep = dim1_linkage_window(&ring, &f, &a, 1, (2, 5)).unwrap();
        assert!(rep.pass);
        assert!(rep.onsets[0].onset.is_some());
    }

    #[test]
    fn nilpotent_parameter_is_rejected() {
        let ring = parse_ring("p=5; vars x,y").unwrap();
        let f = parse_poly(&ring, "x^2").unwrap();
        let a = parse_poly(&ring, "x").unwrap();
        assert!(matches!(
            dim1_linkage_window(&ring, &f, &a, 1, (2, 5)),
            Err(Error::ParameterPropertyFails(_))
        ));
    }
}
