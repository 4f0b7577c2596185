//! Buchberger's algorithm for submodules of graded free modules, plus the
//! elimination-order solver that turns one Groebner computation into both a
//! kernel basis and a membership/lift oracle.
//!
//! Quotient rings never appear here: callers that work over `S/I` adjoin
//! the columns `f·e_j` (`f` an ideal generator) to the generating set, which
//! realizes the submodule over the quotient exactly.

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::ring::PolyRing;
use crate::vecelem::{poly_to_vec, ModOrder, VecElem, VecTerm};
use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashSet};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub ring: Arc<PolyRing>,
    pub order: ModOrder,
    pub rank: usize,
    /// Auto-reduced, monic, sorted by descending leading term.
    pub elems: Vec<VecElem>,
}

/// Total deterministic comparison used for sorting bases: leading terms
/// first, then the full term lists.
fn canonical_cmp(order: ModOrder, a: &VecElem, b: &VecElem) -> Ordering {
    let mut i = 0;
    loop {
        match (a.terms.get(i), b.terms.get(i)) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                match order.cmp(x.comp, &x.mono, y.comp, &y.mono) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                match format!("{}", x.coeff).cmp(&format!("{}", y.coeff)) {
                    Ordering::Equal => {}
                    ord => return ord,
                }
                i += 1;
            }
        }
    }
}

/// Full normal form of `v` against `basis`: every remaining term is
/// divisible by no leading term. Reducers are scanned in stored order, so
/// the result is deterministic.
pub fn reduce_full(ring: &Arc<PolyRing>, order: ModOrder, v: &VecElem, basis: &[VecElem]) -> VecElem {
    let field = &ring.field;
    let mut rest = v.clone();
    let mut done: Vec<VecTerm> = Vec::new();
    'outer: while let Some(lt) = rest.leading() {
        for g in basis {
            let glt = g.leading().expect("basis elements are nonzero");
            if glt.comp == lt.comp {
                if let Some(q) = lt.mono.try_div(&glt.mono) {
                    let c = field.div(&lt.coeff, &glt.coeff);
                    let sub = g.mul_term(&q, &c, field);
                    rest = rest.sub(&sub, field, order);
                    continue 'outer;
                }
            }
        }
        done.push(rest.terms.remove(0));
    }
    VecElem { rank: v.rank, terms: done }
}

fn s_pair(ring: &Arc<PolyRing>, order: ModOrder, a: &VecElem, b: &VecElem) -> VecElem {
    let field = &ring.field;
    let la = a.leading().unwrap();
    let lb = b.leading().unwrap();
    debug_assert_eq!(la.comp, lb.comp);
    let lcm = la.mono.lcm(&lb.mono);
    let ua = lcm.try_div(&la.mono).unwrap();
    let ub = lcm.try_div(&lb.mono).unwrap();
    let ca = field.inv(&la.coeff);
    let cb = field.inv(&lb.coeff);
    a.mul_term(&ua, &ca, field).sub(&b.mul_term(&ub, &cb, field), field, order)
}

/// Buchberger with the product criterion (valid for module elements only
/// when both sides live in a single common component) and the chain
/// criterion, processing pairs by ascending lcm degree.
pub fn buchberger(ring: &Arc<PolyRing>, order: ModOrder, rank: usize, gens: Vec<VecElem>) -> GroebnerBasis {
    let field = &ring.field;
    let mut basis: Vec<VecElem> = gens
        .into_iter()
        .filter(|g| !g.is_zero())
        .map(|g| g.monic(field))
        .collect();
    basis.sort_by(|a, b| canonical_cmp(order, b, a));
    basis.dedup();

    // (lcm total degree, i, j) with i < j; pending tracks heap membership
    // for the chain criterion.
    let mut heap: BinaryHeap<Reverse<(u32, usize, usize)>> = BinaryHeap::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let push_pairs = |heap: &mut BinaryHeap<Reverse<(u32, usize, usize)>>,
                          pending: &mut HashSet<(usize, usize)>,
                          basis: &[VecElem],
                          j: usize| {
        let lj = basis[j].leading().unwrap();
        for i in 0..j {
            let li = basis[i].leading().unwrap();
            if li.comp == lj.comp {
                let deg = li.mono.lcm(&lj.mono).degree();
                heap.push(Reverse((deg, i, j)));
                pending.insert((i, j));
            }
        }
    };
    for j in 0..basis.len() {
        push_pairs(&mut heap, &mut pending, &basis, j);
    }

    while let Some(Reverse((_, i, j))) = heap.pop() {
        pending.remove(&(i, j));
        let (li, lj) = (basis[i].leading().unwrap(), basis[j].leading().unwrap());
        debug_assert_eq!(li.comp, lj.comp);
        let comp = li.comp;
        // Product criterion: both concentrated in the shared component and
        // coprime leading monomials.
        if li.mono.coprime_with(&lj.mono)
            && basis[i].single_component() == Some(comp)
            && basis[j].single_component() == Some(comp)
        {
            continue;
        }
        // Chain criterion.
        let lcm = li.mono.lcm(&lj.mono);
        let chained = (0..basis.len()).any(|k| {
            if k == i || k == j {
                return false;
            }
            let lk = basis[k].leading().unwrap();
            lk.comp == comp
                && lk.mono.divides(&lcm)
                && !pending.contains(&key(i, k))
                && !pending.contains(&key(j, k))
        });
        if chained {
            continue;
        }
        let s = s_pair(ring, order, &basis[i], &basis[j]);
        let r = reduce_full(ring, order, &s, &basis);
        if !r.is_zero() {
            basis.push(r.monic(field));
            let j_new = basis.len() - 1;
            push_pairs(&mut heap, &mut pending, &basis, j_new);
        }
    }

    let elems = auto_reduce(ring, order, basis);
    GroebnerBasis { ring: ring.clone(), order, rank, elems }
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Minimalize (no leading term divides another) and tail-reduce, producing
/// the unique reduced monic basis for the given order.
fn auto_reduce(ring: &Arc<PolyRing>, order: ModOrder, mut elems: Vec<VecElem>) -> Vec<VecElem> {
    let field = &ring.field;
    elems.retain(|e| !e.is_zero());
    elems.sort_by(|a, b| canonical_cmp(order, b, a));
    let n = elems.len();
    let mut drop = vec![false; n];
    for i in 0..n {
        let lti = elems[i].leading().unwrap().clone();
        for j in 0..n {
            if i == j || drop[j] {
                continue;
            }
            let ltj = elems[j].leading().unwrap();
            let same = ltj.comp == lti.comp && ltj.mono == lti.mono;
            if ltj.comp == lti.comp && ltj.mono.divides(&lti.mono) && (!same || j < i) {
                drop[i] = true;
                break;
            }
        }
    }
    let kept: Vec<VecElem> = elems
        .into_iter()
        .enumerate()
        .filter(|(i, _)| !drop[*i])
        .map(|(_, e)| e)
        .collect();
    // Leading terms are now pairwise non-divisible, so full reduction of
    // each element against the others only rewrites tails.
    (0..kept.len())
        .map(|i| {
            let others: Vec<VecElem> = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, e)| e.clone())
                .collect();
            reduce_full(ring, order, &kept[i], &others).monic(field)
        })
        .collect()
}

impl GroebnerBasis {
    pub fn normal_form(&self, v: &VecElem) -> VecElem {
        reduce_full(&self.ring, self.order, v, &self.elems)
    }

    pub fn reduces_to_zero(&self, v: &VecElem) -> bool {
        self.normal_form(v).is_zero()
    }

    /// Is `(comp, mono)` outside the leading-term submodule? Such monomials
    /// form the standard basis of the quotient.
    pub fn is_standard_monomial(&self, comp: usize, mono: &Monomial) -> bool {
        !self.elems.iter().any(|e| {
            let lt = e.leading().unwrap();
            lt.comp == comp && lt.mono.divides(mono)
        })
    }

    /// Post-hoc soundness audit: re-reduce every S-pair with no criteria.
    /// Used by tests to guard the pair-skipping logic.
    pub fn audit_s_pairs(&self) -> bool {
        for i in 0..self.elems.len() {
            for j in i + 1..self.elems.len() {
                let (a, b) = (&self.elems[i], &self.elems[j]);
                if a.leading().unwrap().comp != b.leading().unwrap().comp {
                    continue;
                }
                let s = s_pair(&self.ring, self.order, a, b);
                if !self.reduces_to_zero(&s) {
                    return false;
                }
            }
        }
        true
    }
}

/// Groebner basis of an ideal, as plain polynomials.
pub fn ideal_groebner(ring: &Arc<PolyRing>, gens: &[Polynomial]) -> Vec<Polynomial> {
    let vecs: Vec<VecElem> = gens
        .iter()
        .map(|p| poly_to_vec(p, 1, 0, &ring.field, ModOrder::Top))
        .collect();
    let gb = buchberger(ring, ModOrder::Top, 1, vecs);
    gb.elems.iter().map(|e| e.component_poly(ring, 0)).collect()
}

pub fn poly_normal_form(ring: &Arc<PolyRing>, p: &Polynomial, gb: &[Polynomial]) -> Polynomial {
    let basis: Vec<VecElem> = gb
        .iter()
        .map(|g| poly_to_vec(g, 1, 0, &ring.field, ModOrder::Top))
        .collect();
    let v = poly_to_vec(p, 1, 0, &ring.field, ModOrder::Top);
    reduce_full(ring, ModOrder::Top, &v, &basis).component_poly(ring, 0)
}

/// One elimination-order Groebner computation that answers both "what is
/// the kernel" and "express this vector in the generators".
///
/// Fix a free module `F` of rank `rank_f`, columns `h_1..h_t` in `F`, and
/// extra columns `w_1..w_s` (typically `f·e_j` for ideal generators `f`,
/// plus generators of a submodule being quotiented by). The solver computes
/// a basis of `U = ⟨h_j + ε_j, w_l⟩ ⊆ F ⊕ S^t` under the order that makes
/// every `F`-term dominate every `ε`-term. Elements with zero `F`-part cut
/// out the syzygies of the `h_j` modulo the `w_l`; reducing `(v, 0)`
/// decides membership of `v` in `⟨h_j⟩ + ⟨w_l⟩` and yields coefficients.
pub struct KernelSolver {
    pub ring: Arc<PolyRing>,
    pub rank_f: usize,
    pub ncols: usize,
    gb: GroebnerBasis,
}

impl KernelSolver {
    pub fn new(ring: &Arc<PolyRing>, rank_f: usize, columns: &[VecElem], plain: &[VecElem]) -> Self {
        let field = &ring.field;
        let ncols = columns.len();
        let big = rank_f + ncols;
        let order = ModOrder::Elim { split: rank_f };
        let mut gens = Vec::with_capacity(ncols + plain.len());
        for (j, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.rank, rank_f);
            let mut ts: Vec<VecTerm> = col.terms.clone();
            ts.push(VecTerm {
                comp: rank_f + j,
                mono: Monomial::one(ring.nvars()),
                coeff: field.one(),
            });
            gens.push(VecElem::normalize(field, order, big, ts));
        }
        for w in plain {
            debug_assert_eq!(w.rank, rank_f);
            gens.push(w.embed(big, 0, field, order));
        }
        let gb = buchberger(ring, order, big, gens);
        KernelSolver { ring: ring.clone(), rank_f, ncols, gb }
    }

    /// Basis of the syzygies of the columns modulo the plain columns, as
    /// vectors of rank `ncols` under the `Top` order.
    pub fn kernel_gens(&self) -> Vec<VecElem> {
        self.gb
            .elems
            .iter()
            .filter(|e| e.leading().map(|t| t.comp >= self.rank_f).unwrap_or(false))
            .map(|e| {
                e.slice_components(self.rank_f, self.rank_f + self.ncols, &self.ring.field, ModOrder::Top)
            })
            .collect()
    }

    /// Coefficients `c` with `v = Σ c_j h_j` modulo the plain columns, if
    /// `v` is in the span.
    pub fn lift(&self, v: &VecElem) -> Option<Vec<Polynomial>> {
        debug_assert_eq!(v.rank, self.rank_f);
        let order = ModOrder::Elim { split: self.rank_f };
        let big = v.embed(self.rank_f + self.ncols, 0, &self.ring.field, order);
        let nf = self.gb.normal_form(&big);
        if nf.terms.iter().any(|t| t.comp < self.rank_f) {
            return None;
        }
        Some(
            (0..self.ncols)
                .map(|j| nf.component_poly(&self.ring, self.rank_f + j).neg())
                .collect(),
        )
    }

    pub fn contains(&self, v: &VecElem) -> bool {
        self.lift(v).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_poly, parse_ring};
    use crate::vecelem::matrix_columns;

    #[test]
    fn ideal_basis_completes_with_cross_term() {
        let r = parse_ring("q; vars x,y").unwrap();
        let gens = vec![
            parse_poly(&r, "x^2 - y^2").unwrap(),
            parse_poly(&r, "x*y").unwrap(),
        ];
        let gb = ideal_groebner(&r, &gens);
        // Stored by descending leading term: y^3 has degree 3.
        let rendered: Vec<String> = gb.iter().map(|p| p.render()).collect();
        assert_eq!(rendered, vec!["y^3", "x^2 - y^2", "x*y"]);

        let nf = |s: &str| poly_normal_form(&r, &parse_poly(&r, s).unwrap(), &gb).render();
        assert_eq!(nf("x^3"), "0");
        assert_eq!(nf("y^4"), "0");
        assert_eq!(nf("y^2"), "y^2");
        assert_eq!(nf("x^2"), "y^2");
    }

    #[test]
    fn basis_passes_s_pair_audit() {
        let r = parse_ring("p=5; vars x,y,z").unwrap();
        let gens = vec![
            parse_poly(&r, "x^2 + y*z").unwrap(),
            parse_poly(&r, "x*z + y^2").unwrap(),
            parse_poly(&r, "z^3 - x*y*z").unwrap(),
        ];
        let vecs: Vec<VecElem> = gens
            .iter()
            .map(|p| poly_to_vec(p, 1, 0, &r.field, ModOrder::Top))
            .collect();
        let gb = buchberger(&r, ModOrder::Top, 1, vecs);
        assert!(gb.audit_s_pairs());
    }

    #[test]
    fn module_basis_audit_with_mixed_components() {
        let r = parse_ring("q; vars x,y").unwrap();
        let mat = vec![
            vec![parse_poly(&r, "x").unwrap(), parse_poly(&r, "y").unwrap(), parse_poly(&r, "0").unwrap()],
            vec![parse_poly(&r, "y").unwrap(), parse_poly(&r, "0").unwrap(), parse_poly(&r, "x").unwrap()],
        ];
        let cols = matrix_columns(&mat, &r.field, ModOrder::Top);
        let gb = buchberger(&r, ModOrder::Top, 2, cols);
        assert!(gb.audit_s_pairs());
        for w in gb.elems.windows(2) {
            let a = w[0].leading().unwrap();
            let b = w[1].leading().unwrap();
            assert_eq!(ModOrder::Top.cmp(a.comp, &a.mono, b.comp, &b.mono), Ordering::Greater);
        }
    }

    #[test]
    fn syzygy_of_two_variables() {
        let r = parse_ring("q; vars x,y").unwrap();
        let cols = vec![
            poly_to_vec(&parse_poly(&r, "x").unwrap(), 1, 0, &r.field, ModOrder::Top),
            poly_to_vec(&parse_poly(&r, "y").unwrap(), 1, 0, &r.field, ModOrder::Top),
        ];
        let solver = KernelSolver::new(&r, 1, &cols, &[]);
        let ker = solver.kernel_gens();
        assert_eq!(ker.len(), 1);
        let k = &ker[0];
        // The Koszul relation (-y, x) up to sign and scale.
        let a = k.component_poly(&r, 0);
        let b = k.component_poly(&r, 1);
        assert_eq!(a.mul(&parse_poly(&r, "x").unwrap()).add(&b.mul(&parse_poly(&r, "y").unwrap())), crate::poly::Polynomial::zero(&r));
        assert!(!a.is_zero() && !b.is_zero());
    }

    #[test]
    fn lift_recombines_to_the_target() {
        let r = parse_ring("q; vars x,y").unwrap();
        let h: Vec<VecElem> = ["x^2", "y^2"]
            .iter()
            .map(|s| poly_to_vec(&parse_poly(&r, s).unwrap(), 1, 0, &r.field, ModOrder::Top))
            .collect();
        let solver = KernelSolver::new(&r, 1, &h, &[]);
        let v = poly_to_vec(&parse_poly(&r, "x^3 + x*y^2").unwrap(), 1, 0, &r.field, ModOrder::Top);
        let coeffs = solver.lift(&v).expect("in the ideal");
        let mut acc = Polynomial::zero(&r);
        for (c, hs) in coeffs.iter().zip(["x^2", "y^2"]) {
            acc = acc.add(&c.mul(&parse_poly(&r, hs).unwrap()));
        }
        assert_eq!(acc, parse_poly(&r, "x^3 + x*y^2").unwrap());

        let outside = poly_to_vec(&parse_poly(&r, "x*y").unwrap(), 1, 0, &r.field, ModOrder::Top);
        assert!(solver.lift(&outside).is_none());
    }

    #[test]
    fn lift_respects_plain_columns() {
        // Membership modulo an ideal: x^2 is in <y^2> + (x^2 - y^2).
        let r = parse_ring("q; vars x,y").unwrap();
        let cols = vec![poly_to_vec(&parse_poly(&r, "y^2").unwrap(), 1, 0, &r.field, ModOrder::Top)];
        let plain = vec![poly_to_vec(&parse_poly(&r, "x^2 - y^2").unwrap(), 1, 0, &r.field, ModOrder::Top)];
        let solver = KernelSolver::new(&r, 1, &cols, &plain);
        let v = poly_to_vec(&parse_poly(&r, "x^2").unwrap(), 1, 0, &r.field, ModOrder::Top);
        let c = solver.lift(&v).expect("congruent mod the plain column");
        // x^2 = c * y^2 + (multiple of x^2 - y^2); checking mod the ideal:
        let gb = ideal_groebner(&r, &[parse_poly(&r, "x^2 - y^2").unwrap()]);
        let lhs = poly_normal_form(&r, &parse_poly(&r, "x^2").unwrap(), &gb);
        let rhs = poly_normal_form(&r, &c[0].mul(&parse_poly(&r, "y^2").unwrap()), &gb);
        assert_eq!(lhs, rhs);
    }
}
