//! Minimal graded free resolutions, over the quotient ring (possibly
//! infinite, caller-capped) and over the ambient polynomial ring (always
//! finite). The ambient resolution feeds Hilbert series and, through the
//! Auslander-Buchsbaum equality, depth and the maximal Cohen-Macaulay test.

use crate::error::{Error, Result};
use crate::groebner::KernelSolver;
use crate::module::{
    kernel_over_quotient, minimal_generators, minimal_generators_over_s, FreeModuleSpec,
    ModulePresentation,
};
use crate::qring::QuotientRing;
use crate::vecelem::{poly_to_vec, ModOrder, VecElem};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct ResStep {
    /// Generator degrees of the source free module.
    pub shifts: Vec<i64>,
    /// Differential columns, living in the previous (target) free module.
    pub cols: Vec<VecElem>,
}

#[derive(Clone, Debug)]
pub struct FreeRes {
    pub q: Arc<QuotientRing>,
    /// Generator degrees of `F_0`.
    pub base_shifts: Vec<i64>,
    /// `steps[i]` is the differential `F_{i+1} → F_i`.
    pub steps: Vec<ResStep>,
    /// True when the last computed kernel was zero (finite resolution).
    pub complete: bool,
    /// Earliest `i` with `∂_{i+3} = ∂_{i+1}` up to column permutation and a
    /// uniform degree shift (`steps[i+2]` matches `steps[i]`).
    pub periodic_from: Option<usize>,
}

impl FreeRes {
    pub fn level_shifts(&self, i: usize) -> &[i64] {
        if i == 0 {
            &self.base_shifts
        } else {
            &self.steps[i - 1].shifts
        }
    }

    /// Number of differentials computed; for a complete resolution this is
    /// the projective dimension.
    pub fn length(&self) -> usize {
        self.steps.len()
    }

    pub fn betti(&self, i: usize) -> usize {
        if i == 0 {
            self.base_shifts.len()
        } else if i <= self.steps.len() {
            self.steps[i - 1].shifts.len()
        } else {
            0
        }
    }

    /// The cokernel of `∂_{i+1}`, which presents the `i`-th syzygy module.
    pub fn syzygy_presentation(&self, i: usize) -> Result<ModulePresentation> {
        if i == 0 {
            let rels = self.steps.first().map(|s| s.cols.clone()).unwrap_or_default();
            return ModulePresentation::new(
                FreeModuleSpec::new(self.q.clone(), self.base_shifts.clone()),
                rels,
            );
        }
        if i > self.steps.len() {
            if self.complete {
                return Ok(ModulePresentation::zero_module(self.q.clone()));
            }
            return Err(Error::Invalid(format!(
                "resolution computed to length {} cannot produce syzygy {}",
                self.steps.len(),
                i
            )));
        }
        let gens = self.steps[i - 1].shifts.clone();
        let rels = if i < self.steps.len() {
            self.steps[i].cols.clone()
        } else if self.complete {
            Vec::new()
        } else {
            return Err(Error::Invalid(format!(
                "syzygy {} needs {} resolution steps, have {}",
                i,
                i + 1,
                self.steps.len()
            )));
        };
        ModulePresentation::new(FreeModuleSpec::new(self.q.clone(), gens), rels)
    }
}

fn degrees_of(cols: &[VecElem], target_shifts: &[i64]) -> Vec<i64> {
    cols.iter()
        .map(|c| c.homogeneous_degree(target_shifts).expect("homogeneous differential column"))
        .collect()
}

/// Minimal free resolution over the quotient ring, at most `max_steps`
/// differentials.
pub fn resolve_over_quotient(m: &ModulePresentation, max_steps: usize) -> FreeRes {
    let q = m.q().clone();
    let mp = m.minimalize();
    let base_shifts = mp.shifts().to_vec();
    let mut steps: Vec<ResStep> = Vec::new();
    let mut complete = mp.rels.is_empty();
    let mut target_shifts = base_shifts.clone();
    let mut cols = mp.rels.clone();
    while !cols.is_empty() && steps.len() < max_steps {
        let shifts = degrees_of(&cols, &target_shifts);
        steps.push(ResStep { shifts: shifts.clone(), cols: cols.clone() });
        if steps.len() == max_steps {
            break;
        }
        let ker = kernel_over_quotient(&q, target_shifts.len(), &cols, &[]);
        let min = minimal_generators(&q, &shifts, &ker);
        if min.is_empty() {
            complete = true;
            break;
        }
        target_shifts = shifts;
        cols = min;
    }
    let periodic_from = detect_periodicity(&q, &base_shifts, &steps);
    FreeRes { q, base_shifts, steps, complete, periodic_from }
}

/// Minimal free resolution of the same module viewed over the ambient
/// polynomial ring; finite by Hilbert's syzygy theorem.
pub fn resolve_over_ambient(m: &ModulePresentation) -> FreeRes {
    let q = m.q().clone();
    let ring = &q.ring;
    let mp = m.minimalize();
    let base_shifts = mp.shifts().to_vec();
    // Relations over S: the module relations plus I times each generator.
    let mut gens: Vec<VecElem> = mp.rels.clone();
    for j in 0..base_shifts.len() {
        for f in &q.ideal_gens {
            gens.push(poly_to_vec(f, base_shifts.len(), j, q.field(), ModOrder::Top));
        }
    }
    let mut cols = minimal_generators_over_s(&q, &base_shifts, &gens);
    let mut target_shifts = base_shifts.clone();
    let mut steps: Vec<ResStep> = Vec::new();
    let cap = ring.nvars() + 1;
    while !cols.is_empty() {
        assert!(
            steps.len() < cap,
            "ambient resolution exceeded the variable count; this is a bug"
        );
        let shifts = degrees_of(&cols, &target_shifts);
        steps.push(ResStep { shifts: shifts.clone(), cols: cols.clone() });
        let solver = KernelSolver::new(ring, target_shifts.len(), &cols, &[]);
        let ker = solver.kernel_gens();
        cols = minimal_generators_over_s(&q, &shifts, &ker);
        target_shifts = shifts;
    }
    FreeRes { q, base_shifts, steps, complete: true, periodic_from: None }
}

/// Projective dimension over the ambient ring; `None` for the zero module.
pub fn pd_over_ambient(m: &ModulePresentation) -> Option<usize> {
    let res = resolve_over_ambient(m);
    if res.base_shifts.is_empty() {
        None
    } else {
        Some(res.length())
    }
}

/// Depth via Auslander-Buchsbaum over the regular ambient ring; `None`
/// (infinite) for the zero module.
pub fn depth(m: &ModulePresentation) -> Option<usize> {
    pd_over_ambient(m).map(|pd| m.q().nvars() - pd)
}

/// Maximal Cohen-Macaulay: depth equals the ring dimension. The zero
/// module counts as MCM.
pub fn is_mcm(m: &ModulePresentation) -> bool {
    match depth(m) {
        None => true,
        Some(d) => d == m.q().dim,
    }
}

fn canon_step(q: &Arc<QuotientRing>, target_shifts: &[i64], step: &ResStep) -> (Vec<i64>, Vec<(i64, String)>) {
    let offset = target_shifts.iter().copied().min().unwrap_or(0);
    let t_norm: Vec<i64> = target_shifts.iter().map(|s| s - offset).collect();
    let mut cols: Vec<(i64, String)> = step
        .cols
        .iter()
        .zip(&step.shifts)
        .map(|(c, s)| (s - offset, c.render(&q.ring)))
        .collect();
    cols.sort();
    (t_norm, cols)
}

fn detect_periodicity(q: &Arc<QuotientRing>, base: &[i64], steps: &[ResStep]) -> Option<usize> {
    for i in 0..steps.len().saturating_sub(2) {
        let t_i = if i == 0 { base } else { &steps[i - 1].shifts };
        let t_i2 = &steps[i + 1].shifts;
        if canon_step(q, t_i, &steps[i]) == canon_step(q, t_i2, &steps[i + 2]) {
            return Some(i);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_matrix, parse_poly, parse_ring};
    use crate::qring::GorensteinEvidence;

    fn dual_numbers() -> Arc<QuotientRing> {
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

    #[test]
    fn quotient_resolution_of_a_mod_x_is_two_periodic() {
        let a = dual_numbers();
        let m = cyclic(&a, &["x"]);
        let res = resolve_over_quotient(&m, 5);
        assert_eq!(res.length(), 5);
        assert!(!res.complete);
        for i in 0..5 {
            assert_eq!(res.betti(i), 1);
        }
        assert_eq!(res.periodic_from, Some(0));
        // Each differential is multiplication by x with degrees climbing
        // by one.
        assert_eq!(res.steps[0].shifts, vec![1]);
        assert_eq!(res.steps[3].shifts, vec![4]);
    }

    #[test]
    fn ambient_resolution_and_depth() {
        let a = dual_numbers(); // dim 1
        let m = cyclic(&a, &["x"]); // = S/(x): pd_S 1, depth 1 -> MCM
        assert_eq!(pd_over_ambient(&m), Some(1));
        assert_eq!(depth(&m), Some(1));
        assert!(is_mcm(&m));

        let k = cyclic(&a, &["x", "y"]); // residue field: depth 0
        assert_eq!(pd_over_ambient(&k), Some(2));
        assert_eq!(depth(&k), Some(0));
        assert!(!is_mcm(&k));

        let free = ModulePresentation::free_module(a.clone(), vec![0, 3]);
        // A itself as S-module: S/(x^2), pd 1, depth 1: free A-modules are
        // MCM over this curve.
        assert!(is_mcm(&free));

        let zero = ModulePresentation::zero_module(a.clone());
        assert!(is_mcm(&zero));
        assert_eq!(depth(&zero), None);
    }

    #[test]
    fn residue_field_betti_numbers_over_hypersurface() {
        let a = dual_numbers();
        let k = cyclic(&a, &["x", "y"]);
        let res = resolve_over_quotient(&k, 4);
        assert_eq!(res.betti(0), 1);
        assert_eq!(res.betti(1), 2);
        assert!(!res.complete);
        // All syzygy presentations are consistent: relation columns of one
        // step are killed by the next differential.
        for i in 1..res.steps.len() {
            let prev_rank = res.level_shifts(i).len();
            for c in &res.steps[i].cols {
                assert_eq!(c.rank, prev_rank);
            }
        }
    }

    #[test]
    fn syzygy_presentations_line_up() {
        let a = dual_numbers();
        let m = cyclic(&a, &["x"]);
        let res = resolve_over_quotient(&m, 3);
        let s1 = res.syzygy_presentation(1).unwrap();
        assert_eq!(s1.shifts(), &[1]);
        assert_eq!(s1.rels.len(), 1);
        // First syzygy of A/(x) is (x) which is again A/(x) shifted by 1.
        let direct = cyclic(&a, &["x"]).twist(1);
        assert_eq!(s1.render_matrix(), direct.render_matrix());
    }

    #[test]
    fn regular_ring_finite_resolutions() {
        let r = parse_ring("q; vars x,y,z").unwrap();
        let s = QuotientRing::regular(r.clone()).unwrap();
        let k = cyclic(&s, &["x", "y", "z"]);
        let res = resolve_over_quotient(&k, 10);
        assert!(res.complete);
        assert_eq!(res.length(), 3);
        let betti: Vec<usize> = (0..4).map(|i| res.betti(i)).collect();
        assert_eq!(betti, vec![1, 3, 3, 1]); // Koszul complex
        assert_eq!(depth(&k), Some(0));
        assert!(!is_mcm(&k));
        assert!(is_mcm(&ModulePresentation::free_module(s.clone(), vec![0])));
    }
}
