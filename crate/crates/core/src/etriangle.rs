//! The triangle invariant of a maximal Cohen-Macaulay module, computed
//! three independent ways: the Hilbert-coefficient formula, the same
//! formula read off any free cover, and a sampling oracle that fits the
//! lengths of torsion against truncations of the ring. On top of it sit
//! the derived-function algebra, the axiom checkers for certified
//! sequences and triangles, and the hyperplane-section consistency check
//! through a superficial element.

use crate::error::{Error, Result};
use crate::field::big_rational_to_i64;
use crate::functors::{cosyzygy, is_stably_iso, ModuleMap, StableIso};
use crate::hilbert::{fit_window, hilbert_data, hilbert_series, sample_cap};
use crate::linalg::Echelon;
use crate::module::{FreeModuleSpec, ModulePresentation};
use crate::monomial::{monomials_of_degree, Monomial};
use crate::poly::Polynomial;
use crate::qring::{GorensteinEvidence, QuotientRing};
use crate::resolution::{is_mcm, resolve_over_quotient};
use crate::vecelem::{ModOrder, VecElem, VecTerm};
use crate::witness::{SESWitness, TriangleWitness};
use num::rational::BigRational;
use num::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

fn e1_of(m: &ModulePresentation) -> Result<i64> {
    Ok(hilbert_data(m)?.e1())
}

fn ring_as_module(q: &Arc<QuotientRing>) -> ModulePresentation {
    ModulePresentation::free_module(q.clone(), vec![0])
}

/// The `i`-th syzygy in a minimal free resolution; `i = 0` returns the
/// minimal presentation itself.
pub fn syzygy_module(m: &ModulePresentation, i: usize) -> Result<ModulePresentation> {
    let mm = m.minimalize();
    if i == 0 {
        return Ok(mm);
    }
    resolve_over_quotient(&mm, i + 1).syzygy_presentation(i)
}

/// The triangle invariant by the coefficient formula
/// `μ(M)e₁(A) − e₁(M) − e₁(ΩM)`, with two built-in plausibility checks:
/// the value vanishes exactly for free modules, and a nonzero value is
/// at least the multiplicity of the syzygy.
pub fn e_triangle(m: &ModulePresentation) -> Result<i64> {
    let mm = m.minimalize();
    if !is_mcm(&mm) {
        return Err(Error::NotMCM);
    }
    let q = mm.q().clone();
    if q.dim == 0 {
        return Err(Error::Invalid(
            "the triangle invariant needs a ring of positive dimension".into(),
        ));
    }
    if mm.is_zero_module() {
        return Ok(0);
    }
    let mu = mm.rank() as i64;
    let ring_e1 = e1_of(&ring_as_module(&q))?;
    let omega = resolve_over_quotient(&mm, 2).syzygy_presentation(1)?;
    let value = mu * ring_e1 - e1_of(&mm)? - e1_of(&omega)?;
    let free = mm.rels.is_empty();
    if (value == 0) != free {
        return Err(Error::UncertifiedWitness(format!(
            "triangle invariant {value} contradicts freeness of the module"
        )));
    }
    if !free {
        let syzygy_mult = hilbert_data(&omega)?.e0();
        if value < syzygy_mult {
            return Err(Error::UncertifiedWitness(format!(
                "triangle invariant {value} is below the syzygy multiplicity {syzygy_mult}"
            )));
        }
    }
    Ok(value)
}

/// The same invariant read off any certified free cover
/// `0 → N → F → M → 0`: the value `e₁(F) − e₁(M) − e₁(N)` does not
/// depend on the cover chosen.
pub fn e_triangle_from_cover(ses: &SESWitness) -> Result<i64> {
    if !ses.mid().minimalize().rels.is_empty() {
        return Err(Error::MiddleNotFree);
    }
    if !is_mcm(ses.quot()) || !is_mcm(ses.sub()) {
        return Err(Error::NotMCM);
    }
    Ok(e1_of(ses.mid())? - e1_of(ses.quot())? - e1_of(ses.sub())?)
}

/// The minimal free cover as a certified sequence `0 → ΩM → F → M → 0`:
/// the syzygy generators embed as the first differential's columns and
/// the cover surjection is the identity on minimal generators.
pub fn cover_sequence(m: &ModulePresentation) -> Result<SESWitness> {
    let mm = m.minimalize();
    let q = mm.q().clone();
    let ring = &q.ring;
    let res = resolve_over_quotient(&mm, 2);
    let cover = ModulePresentation::free_module(q.clone(), res.base_shifts.clone());
    let omega = res.syzygy_presentation(1)?;
    let alpha_matrix: Vec<Vec<Polynomial>> = (0..cover.rank())
        .map(|i| {
            res.steps
                .first()
                .map(|s| s.cols.iter().map(|c| c.component_poly(ring, i)).collect())
                .unwrap_or_default()
        })
        .collect();
    let alpha = ModuleMap::new(omega, cover.clone(), alpha_matrix)?;
    let beta_matrix: Vec<Vec<Polynomial>> = (0..mm.rank())
        .map(|i| {
            (0..cover.rank())
                .map(|j| if i == j { Polynomial::one(ring) } else { Polynomial::zero(ring) })
                .collect()
        })
        .collect();
    let beta = ModuleMap::new(cover, mm, beta_matrix)?;
    SESWitness::new(alpha, beta)
}

/// First two differentials of a minimal resolution, held for repeated
/// truncated-rank computations.
struct TorSampler {
    q: Arc<QuotientRing>,
    f0_rank: usize,
    f1_rank: usize,
    d1: Vec<VecElem>,
    d2: Vec<VecElem>,
}

impl TorSampler {
    fn new(m: &ModulePresentation) -> TorSampler {
        let mm = m.minimalize();
        let res = resolve_over_quotient(&mm, 2);
        let (d1, f1_rank) = res
            .steps
            .first()
            .map(|s| (s.cols.clone(), s.shifts.len()))
            .unwrap_or((Vec::new(), 0));
        let d2 = res.steps.get(1).map(|s| s.cols.clone()).unwrap_or_default();
        TorSampler { q: mm.q().clone(), f0_rank: res.base_shifts.len(), f1_rank, d1, d2 }
    }

    /// Flat basis `(component, standard monomial of degree ≤ n)` of a
    /// truncated free module.
    fn truncated_basis(&self, rank: usize, n: usize) -> HashMap<(usize, Monomial), usize> {
        let mut index = HashMap::new();
        let mut next = 0;
        for comp in 0..rank {
            for t in 0..=n {
                for mono in self.q.std_monomials(t as u32) {
                    index.insert((comp, mono), next);
                    next += 1;
                }
            }
        }
        index
    }

    /// Rank of a differential after tensoring down to the truncated ring:
    /// every column is multiplied by every standard monomial, reduced,
    /// and chopped above degree `n`.
    fn truncated_rank(&self, cols: &[VecElem], target_rank: usize, n: usize) -> usize {
        if cols.is_empty() || target_rank == 0 {
            return 0;
        }
        let field = self.q.field().clone();
        let ring = &self.q.ring;
        let index = self.truncated_basis(target_rank, n);
        let mut ech = Echelon::new(field.clone(), index.len());
        for col in cols {
            for t in 0..=n {
                for mono in self.q.std_monomials(t as u32) {
                    let moved = col.mul_term(&mono, &field.one(), &field);
                    let mut coords = vec![field.zero(); index.len()];
                    let mut nonzero = false;
                    for comp in 0..target_rank {
                        let p = self.q.reduce(&moved.component_poly(ring, comp));
                        for (m, c) in p.terms() {
                            if m.degree() as usize > n {
                                continue;
                            }
                            let idx = index[&(comp, m.clone())];
                            coords[idx] = field.add(&coords[idx], c);
                            nonzero = true;
                        }
                    }
                    if nonzero {
                        ech.insert(coords);
                    }
                }
            }
        }
        ech.rank()
    }

    /// `ℓ(Tor₁)` against the truncation at `n`: nullity of the first
    /// reduced differential minus the rank of the second.
    fn length(&self, n: usize) -> i64 {
        let monos: usize = (0..=n).map(|t| self.q.std_monomials(t as u32).len()).sum();
        let d1_cols = self.f1_rank * monos;
        let d1_rank = self.truncated_rank(&self.d1, self.f0_rank, n);
        let d2_rank = self.truncated_rank(&self.d2, self.f1_rank, n);
        d1_cols as i64 - d1_rank as i64 - d2_rank as i64
    }
}

/// `ℓ(Tor₁(M, A/𝔪^{n+1}))` by exact linear algebra over the base field.
pub fn tor_length(m: &ModulePresentation, n: usize) -> i64 {
    TorSampler::new(m).length(n)
}

/// The sampling oracle for the triangle invariant: fit a polynomial of
/// degree `d − 1` to the torsion lengths and normalize the leading
/// coefficient. Shares the stabilization policy with the Hilbert fits,
/// and hard-errors when the fitted degree contradicts freeness.
pub fn e_triangle_oracle(m: &ModulePresentation) -> Result<i64> {
    let mm = m.minimalize();
    if !is_mcm(&mm) {
        return Err(Error::NotMCM);
    }
    let q = mm.q().clone();
    if q.dim == 0 {
        return Err(Error::Invalid(
            "the triangle invariant needs a ring of positive dimension".into(),
        ));
    }
    let r = q.dim - 1;
    let sampler = TorSampler::new(&mm);
    let samples: Vec<i64> = (0..=sample_cap(r)).map(|n| sampler.length(n)).collect();
    let (_, poly) = fit_window(&samples, r)?;
    let mut factorial = BigRational::one();
    for j in 1..=r {
        factorial = factorial * BigRational::from_integer((j as i64).into());
    }
    let lead = poly.get(r).cloned().unwrap_or_else(BigRational::zero);
    let value = big_rational_to_i64(&(lead * factorial)).ok_or_else(|| {
        Error::Invalid("torsion growth rate is not an integer".into())
    })?;
    if value < 0 {
        return Err(Error::UncertifiedWitness(format!(
            "torsion lengths fit a negative growth rate {value}"
        )));
    }
    let free = mm.rels.is_empty();
    if (value == 0) != free {
        return Err(Error::UncertifiedWitness(format!(
            "fitted torsion degree contradicts freeness: rate {value}"
        )));
    }
    Ok(value)
}

/// Recipe for a function on stable isomorphism classes built from the
/// triangle invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XiDescriptor {
    /// The triangle invariant itself.
    ET,
    /// Precompose with the `i`-th syzygy.
    Derived(Box<XiDescriptor>, usize),
    /// Pointwise sum.
    Sum(Vec<XiDescriptor>),
    /// Multiply values by `k ≥ 1`.
    Scaled(Box<XiDescriptor>, u32),
}

impl XiDescriptor {
    fn validate(&self) -> Result<()> {
        match self {
            XiDescriptor::ET => Ok(()),
            XiDescriptor::Derived(base, _) => base.validate(),
            XiDescriptor::Sum(list) => {
                if list.is_empty() {
                    return Err(Error::Invalid("empty sum descriptor".into()));
                }
                list.iter().try_for_each(|d| d.validate())
            }
            XiDescriptor::Scaled(base, k) => {
                if *k == 0 {
                    return Err(Error::Invalid("scale factor must be at least 1".into()));
                }
                base.validate()
            }
        }
    }

    pub fn render(&self) -> String {
        match self {
            XiDescriptor::ET => "eT".into(),
            XiDescriptor::Derived(base, i) => format!("derived({},{})", base.render(), i),
            XiDescriptor::Sum(list) => {
                let parts: Vec<String> = list.iter().map(|d| d.render()).collect();
                format!("sum({})", parts.join(","))
            }
            XiDescriptor::Scaled(base, k) => format!("scaled({},{})", base.render(), k),
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Deterministic fingerprint of a presentation: ring description, graded
/// series numerator, generator count and degrees, relation matrix. Stable
/// across runs, so cached evaluations replay identically.
pub fn module_fingerprint(m: &ModulePresentation) -> u64 {
    let mm = m.minimalize();
    let hs = hilbert_series(&mm);
    let mut s = mm.q().describe();
    for (k, v) in &hs.numer {
        s.push_str(&format!("{k}:{v};"));
    }
    s.push_str(&format!("|mu={}|shifts={:?}|", mm.rank(), mm.shifts()));
    s.push_str(&mm.render_matrix());
    fnv1a(s.as_bytes())
}

fn eval_descriptor(d: &XiDescriptor, m: &ModulePresentation) -> Result<i64> {
    match d {
        XiDescriptor::ET => e_triangle(m),
        XiDescriptor::Derived(base, i) => eval_descriptor(base, &syzygy_module(m, *i)?),
        XiDescriptor::Sum(list) => {
            let mut total = 0;
            for part in list {
                total += eval_descriptor(part, m)?;
            }
            Ok(total)
        }
        XiDescriptor::Scaled(base, k) => Ok(i64::from(*k) * eval_descriptor(base, m)?),
    }
}

/// A descriptor plus a memo table keyed by module fingerprint.
#[derive(Clone, Debug)]
pub struct TriangleFunction {
    descriptor: XiDescriptor,
    cache: RefCell<HashMap<u64, i64>>,
}

pub fn make_xi(descriptor: XiDescriptor) -> Result<TriangleFunction> {
    descriptor.validate()?;
    Ok(TriangleFunction { descriptor, cache: RefCell::new(HashMap::new()) })
}

impl TriangleFunction {
    pub fn descriptor(&self) -> &XiDescriptor {
        &self.descriptor
    }

    pub fn render(&self) -> String {
        self.descriptor.render()
    }

    pub fn evaluate(&self, m: &ModulePresentation) -> Result<i64> {
        let key = module_fingerprint(m);
        if let Some(&v) = self.cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = eval_descriptor(&self.descriptor, m)?;
        self.cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// Recomputes from scratch and cross-checks any cached value; a
    /// disagreement means the cache or the fingerprint is broken.
    pub fn evaluate_audited(&self, m: &ModulePresentation) -> Result<i64> {
        let key = module_fingerprint(m);
        let fresh = eval_descriptor(&self.descriptor, m)?;
        if let Some(&cached) = self.cache.borrow().get(&key) {
            if cached != fresh {
                return Err(Error::Invalid(format!(
                    "cached value {cached} disagrees with recomputation {fresh}"
                )));
            }
        }
        self.cache.borrow_mut().insert(key, fresh);
        Ok(fresh)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: String,
    pub detail: String,
    pub pass: bool,
}

/// Everything a single axiom sweep computed, ready to serialize.
#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub witness: String,
    pub function: String,
    pub values: BTreeMap<String, i64>,
    pub checks: Vec<AxiomCheck>,
    pub pass: bool,
}

fn is_stably_zero(m: &ModulePresentation) -> bool {
    let zero = ModulePresentation::zero_module(m.q().clone());
    matches!(is_stably_iso(m, &zero, 11, 8), StableIso::Yes(_))
}

fn value_axioms(
    xi: &TriangleFunction,
    labeled: &[(&str, &ModulePresentation)],
    values: &mut BTreeMap<String, i64>,
    checks: &mut Vec<AxiomCheck>,
) -> Result<()> {
    for (label, m) in labeled {
        let v = xi.evaluate(m)?;
        values.insert((*label).to_string(), v);
        checks.push(AxiomCheck {
            axiom: "nonnegative".into(),
            detail: format!("{label} evaluates to {v}"),
            pass: v >= 0,
        });
        let stably_zero = is_stably_zero(m);
        checks.push(AxiomCheck {
            axiom: "zero-iff-stably-free".into(),
            detail: format!("{label}: value {v}, stably free: {stably_zero}"),
            pass: (v == 0) == stably_zero,
        });
    }
    Ok(())
}

fn additivity_check(
    xi: &TriangleFunction,
    a: &ModulePresentation,
    b: &ModulePresentation,
    values: &mut BTreeMap<String, i64>,
    checks: &mut Vec<AxiomCheck>,
) -> Result<()> {
    let sum = a.direct_sum(b);
    let vs = xi.evaluate(&sum)?;
    let va = xi.evaluate(a)?;
    let vb = xi.evaluate(b)?;
    values.insert("direct-sum".into(), vs);
    checks.push(AxiomCheck {
        axiom: "additive-on-sums".into(),
        detail: format!("{vs} against {va} + {vb}"),
        pass: vs == va + vb,
    });
    Ok(())
}

/// Axioms of a pre-triangle function checked against one certified short
/// exact sequence: nonnegativity, vanishing exactly on stably free
/// modules, additivity on a synthesized direct sum, and sub-additivity
/// of the middle term.
pub fn check_pretriangle(xi: &TriangleFunction, ses: &SESWitness) -> Result<AxiomReport> {
    ses.certify()?;
    for m in [ses.sub(), ses.mid(), ses.quot()] {
        if !is_mcm(m) {
            return Err(Error::NotMCM);
        }
    }
    let mut values = BTreeMap::new();
    let mut checks = Vec::new();
    value_axioms(
        xi,
        &[("first", ses.sub()), ("middle", ses.mid()), ("third", ses.quot())],
        &mut values,
        &mut checks,
    )?;
    additivity_check(xi, ses.sub(), ses.quot(), &mut values, &mut checks)?;
    let (v1, v2, v3) = (values["first"], values["middle"], values["third"]);
    checks.push(AxiomCheck {
        axiom: "sub-additive".into(),
        detail: format!("{v2} against {v1} + {v3}"),
        pass: v2 <= v1 + v3,
    });
    let pass = checks.iter().all(|c| c.pass);
    Ok(AxiomReport {
        witness: format!(
            "short exact sequence with generator counts {} -> {} -> {}",
            ses.sub().mu(),
            ses.mid().mu(),
            ses.quot().mu()
        ),
        function: xi.render(),
        values,
        checks,
        pass,
    })
}

/// Axioms of a triangle function on one certified triangle
/// `M → N → L → Ω⁻¹M`: the pre-triangle checks plus sub-additivity on
/// all three rotations.
pub fn check_triangle(xi: &TriangleFunction, tri: &TriangleWitness) -> Result<AxiomReport> {
    for m in [tri.m(), tri.n(), &tri.third] {
        if !is_mcm(m) {
            return Err(Error::NotMCM);
        }
    }
    let cosyz_m = tri.cosyzygy.minimalize();
    let cosyz_n = cosyzygy(tri.n())?;
    let mut values = BTreeMap::new();
    let mut checks = Vec::new();
    value_axioms(
        xi,
        &[
            ("first", tri.m()),
            ("second", tri.n()),
            ("third", &tri.third),
            ("first-cosyzygy", &cosyz_m),
            ("second-cosyzygy", &cosyz_n),
        ],
        &mut values,
        &mut checks,
    )?;
    additivity_check(xi, tri.m(), &tri.third, &mut values, &mut checks)?;
    let (vm, vn, vl) = (values["first"], values["second"], values["third"]);
    let (vom, von) = (values["first-cosyzygy"], values["second-cosyzygy"]);
    for (name, lhs, rhs) in [
        ("rotation-a", vn, vm + vl),
        ("rotation-b", vl, vn + vom),
        ("rotation-c", vom, vl + von),
    ] {
        checks.push(AxiomCheck {
            axiom: format!("sub-additive-{name}"),
            detail: format!("{lhs} against {rhs}"),
            pass: lhs <= rhs,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(AxiomReport {
        witness: format!(
            "triangle with generator counts {} -> {} -> {}",
            tri.m().mu(),
            tri.n().mu(),
            tri.third.mu()
        ),
        function: xi.render(),
        values,
        checks,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct E1Report {
    pub e1_first: i64,
    pub e1_middle: i64,
    pub e1_third: i64,
    pub pass: bool,
}

/// The second Hilbert coefficient is super-additive over short exact
/// sequences of maximal Cohen-Macaulay modules.
pub fn check_e1_superadditive(ses: &SESWitness) -> Result<E1Report> {
    ses.certify()?;
    for m in [ses.sub(), ses.mid(), ses.quot()] {
        if !is_mcm(m) {
            return Err(Error::NotMCM);
        }
    }
    let e1_first = e1_of(ses.sub())?;
    let e1_middle = e1_of(ses.mid())?;
    let e1_third = e1_of(ses.quot())?;
    Ok(E1Report { e1_first, e1_middle, e1_third, pass: e1_middle >= e1_first + e1_third })
}

fn power_span(m: &ModulePresentation, s: i64, t: i64) -> Vec<VecElem> {
    let q = m.q();
    let field = q.field();
    let nvars = q.nvars();
    let mut out = Vec::new();
    for (i, &d) in m.shifts().iter().enumerate() {
        let u = t - d;
        if u < s || u < 0 {
            continue;
        }
        for mono in monomials_of_degree(nvars, u as u32) {
            out.push(VecElem::normalize(
                field,
                ModOrder::Top,
                m.rank(),
                vec![VecTerm { comp: i, mono, coeff: field.one() }],
            ));
        }
    }
    out
}

/// The colon criterion for a superficial element, checked degree by
/// degree over the window: `(𝔪^{s+1}N : x) = 𝔪^s N` for `s = 1..window`.
pub fn is_superficial(x: &Polynomial, n: &ModulePresentation, window: usize) -> bool {
    let q = n.q().clone();
    if n.rank() == 0 {
        return true;
    }
    let field = q.field().clone();
    let min_d = *n.shifts().iter().min().unwrap();
    let max_d = *n.shifts().iter().max().unwrap();
    for s in 1..=window as i64 {
        for t in min_d..=(s + max_d) {
            let basis_t = n.std_basis(t);
            let basis_t1 = n.std_basis(t + 1);
            let mut wall = Echelon::new(field.clone(), basis_t1.len());
            for v in power_span(n, s + 1, t + 1) {
                wall.insert(n.coords(&v, &basis_t1));
            }
            let wall_rank = wall.rank();
            // Kernel of multiplication by x into the quotient by `wall`.
            let mut both = wall;
            for (comp, mono) in &basis_t {
                let e = VecElem::normalize(
                    &field,
                    ModOrder::Top,
                    n.rank(),
                    vec![VecTerm { comp: *comp, mono: mono.clone(), coeff: field.one() }],
                );
                let xv = e.mul_poly(x, &field, ModOrder::Top);
                both.insert(n.coords(&xv, &basis_t1));
            }
            let colon_dim = basis_t.len() - (both.rank() - wall_rank);
            let mut pw = Echelon::new(field.clone(), basis_t.len());
            for v in power_span(n, s, t) {
                pw.insert(n.coords(&v, &basis_t));
            }
            if colon_dim != pw.rank() {
                return false;
            }
        }
    }
    true
}

/// One hyperplane-section consistency sweep, serialized for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ModSuperficialReport {
    /// The sampled superficial linear form.
    pub element: String,
    pub attempts: u32,
    pub et_original: i64,
    pub et_section: i64,
    pub ring_coefficients: Vec<i64>,
    pub ring_section_coefficients: Vec<i64>,
    pub module_coefficients: Vec<i64>,
    pub module_section_coefficients: Vec<i64>,
    pub pass: bool,
}

/// Samples a linear form superficial for `A ⊕ M ⊕ ΩM`, cuts everything
/// by it, and verifies the triangle invariant and the lower Hilbert
/// coefficients survive the section.
pub fn check_mod_superficial(
    m: &ModulePresentation,
    seed: u64,
    retries: u32,
    window: usize,
) -> Result<ModSuperficialReport> {
    let mm = m.minimalize();
    if !is_mcm(&mm) {
        return Err(Error::NotMCM);
    }
    let q = mm.q().clone();
    let d = q.dim;
    if d < 2 {
        return Err(Error::Invalid(
            "hyperplane sections need a ring of dimension at least 2".into(),
        ));
    }
    let omega = resolve_over_quotient(&mm, 2).syzygy_presentation(1)?;
    let probe = ring_as_module(&q).direct_sum(&mm).direct_sum(&omega);
    let et_original = e_triangle(&mm)?;
    let ring_data = hilbert_data(&ring_as_module(&q))?;
    let module_data = hilbert_data(&mm)?;
    let p = q.field().characteristic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=retries {
        let coeffs: Vec<i64> = (0..q.nvars())
            .map(|_| {
                if p == 0 {
                    rng.gen_range(-3..=3)
                } else {
                    rng.gen_range(0..p as i64)
                }
            })
            .collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let x = q.linear_form(&coeffs);
        if q.reduce(&x).is_zero() || !is_superficial(&x, &probe, window) {
            continue;
        }
        let mut gens = q.ideal_gens.clone();
        gens.push(x.clone());
        let evidence = match q.evidence {
            GorensteinEvidence::UserAsserted => GorensteinEvidence::UserAsserted,
            _ => GorensteinEvidence::CompleteIntersection,
        };
        let b = QuotientRing::new(q.ring.clone(), gens, evidence)?;
        let section = ModulePresentation::new(
            FreeModuleSpec::new(b.clone(), mm.shifts().to_vec()),
            mm.rels.clone(),
        )?;
        let et_section = e_triangle(&section)?;
        let ring_section_data = hilbert_data(&ring_as_module(&b))?;
        let section_data = hilbert_data(&section)?;
        let mut pass = et_section == et_original;
        for i in 0..d {
            if ring_section_data.e(i) != ring_data.e(i) {
                pass = false;
            }
            if section_data.e(i) != module_data.e(i) {
                pass = false;
            }
        }
        return Ok(ModSuperficialReport {
            element: x.render(),
            attempts: attempt,
            et_original,
            et_section,
            ring_coefficients: ring_data.coefficients.clone(),
            ring_section_coefficients: ring_section_data.coefficients.clone(),
            module_coefficients: module_data.coefficients.clone(),
            module_section_coefficients: section_data.coefficients.clone(),
            pass,
        });
    }
    Err(Error::SuperficialSamplingExhausted(retries))
}
