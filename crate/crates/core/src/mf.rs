//! Matrix factorizations over hypersurfaces: validation of the defining
//! identity, the cokernel module with its two-periodic resolution data,
//! and the catalog of standard factorizations for the simple curve
//! singularities and small quadrics.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::module::ModulePresentation;
use crate::poly::Polynomial;
use crate::qring::{GorensteinEvidence, QuotientRing};
use crate::ring::PolyRing;
use std::sync::Arc;

/// A pair of square matrices with `φψ = ψφ = f·I`, certified at
/// construction.
#[derive(Clone, Debug)]
pub struct MatrixFactorization {
    pub ring: Arc<PolyRing>,
    pub f: Polynomial,
    pub phi: Vec<Vec<Polynomial>>,
    pub psi: Vec<Vec<Polynomial>>,
}

fn mat_mul(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>], ring: &Arc<PolyRing>) -> Vec<Vec<Polynomial>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = Polynomial::zero(ring);
                    for (k, row_b) in b.iter().enumerate() {
                        acc = acc.add(&a[i][k].mul(&row_b[j]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn check_product(
    a: &[Vec<Polynomial>],
    b: &[Vec<Polynomial>],
    f: &Polynomial,
    ring: &Arc<PolyRing>,
    label: &str,
) -> Result<()> {
    let prod = mat_mul(a, b, ring);
    for (i, row) in prod.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            let want = if i == j { f.clone() } else { Polynomial::zero(ring) };
            if !p.sub(&want).is_zero() {
                return Err(Error::NotAFactorization(format!(
                    "{label} entry ({i},{j}) is {}, expected {}",
                    p.render(),
                    want.render()
                )));
            }
        }
    }
    Ok(())
}

/// Certify `φψ = ψφ = f·I` by exact polynomial arithmetic.
pub fn mf_validate(
    phi: Vec<Vec<Polynomial>>,
    psi: Vec<Vec<Polynomial>>,
    f: Polynomial,
    ring: Arc<PolyRing>,
) -> Result<MatrixFactorization> {
    let n = phi.len();
    if n == 0
        || phi.iter().any(|r| r.len() != n)
        || psi.len() != n
        || psi.iter().any(|r| r.len() != n)
    {
        return Err(Error::ShapeMismatch("factorization matrices must be square, same size".into()));
    }
    if f.is_zero() {
        return Err(Error::NotAFactorization("the hypersurface equation is zero".into()));
    }
    check_product(&phi, &psi, &f, &ring, "phi*psi")?;
    check_product(&psi, &phi, &f, &ring, "psi*phi")?;
    Ok(MatrixFactorization { ring, f, phi, psi })
}

impl MatrixFactorization {
    pub fn size(&self) -> usize {
        self.phi.len()
    }

    /// No entry of either matrix is a unit; unit entries mean the
    /// factorization carries a split trivial block.
    pub fn is_reduced(&self) -> bool {
        self.phi
            .iter()
            .chain(self.psi.iter())
            .flatten()
            .all(|p| p.is_zero() || p.degree() != Some(0))
    }

    /// Swap of the two matrices: the factorization of the syzygy module.
    pub fn flip(&self) -> MatrixFactorization {
        mf_validate(self.psi.clone(), self.phi.clone(), self.f.clone(), self.ring.clone())
            .expect("flip preserves the factorization identity")
    }

    /// Transposed pair, re-certified.
    pub fn transpose(&self) -> MatrixFactorization {
        let n = self.size();
        let t = |m: &[Vec<Polynomial>]| -> Vec<Vec<Polynomial>> {
            (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
        };
        mf_validate(t(&self.psi), t(&self.phi), self.f.clone(), self.ring.clone())
            .expect("transposition preserves the factorization identity")
    }

    /// Block direct sum with another factorization of the same equation,
    /// re-certified.
    pub fn direct_sum(&self, other: &MatrixFactorization) -> Result<MatrixFactorization> {
        if !self.f.sub(&other.f).is_zero() {
            return Err(Error::NotAFactorization(
                "direct sum needs matching hypersurface equations".into(),
            ));
        }
        let (n, m) = (self.size(), other.size());
        let block = |a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]| -> Vec<Vec<Polynomial>> {
            (0..n + m)
                .map(|i| {
                    (0..n + m)
                        .map(|j| {
                            if i < n && j < n {
                                a[i][j].clone()
                            } else if i >= n && j >= n {
                                b[i - n][j - n].clone()
                            } else {
                                Polynomial::zero(&self.ring)
                            }
                        })
                        .collect()
                })
                .collect()
        };
        mf_validate(
            block(&self.phi, &other.phi),
            block(&self.psi, &other.psi),
            self.f.clone(),
            self.ring.clone(),
        )
    }
}

/// Consistent generator/relation degrees for a matrix with homogeneous
/// entries: row shifts `d_i` and column degrees `c_j` with
/// `deg(entry_{ij}) = c_j − d_i`. The first row is pinned at shift 0.
fn graded_shifts(m: &[Vec<Polynomial>]) -> Option<(Vec<i64>, Vec<i64>)> {
    let n = m.len();
    let mut rows: Vec<Option<i64>> = vec![None; n];
    let mut cols: Vec<Option<i64>> = vec![None; n];
    rows[0] = Some(0);
    for _ in 0..2 * n {
        for (i, row) in m.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let d = i64::from(p.homogeneous_degree()?);
                match (rows[i], cols[j]) {
                    (Some(r), None) => cols[j] = Some(r + d),
                    (None, Some(c)) => rows[i] = Some(c - d),
                    (Some(r), Some(c)) => {
                        if c - r != d {
                            return None;
                        }
                    }
                    (None, None) => {}
                }
            }
        }
    }
    let rows: Option<Vec<i64>> = rows.into_iter().collect();
    let cols: Option<Vec<i64>> = cols.into_iter().collect();
    Some((rows?, cols?))
}

/// The cokernel module of a factorization over the graded backend, with
/// its syzygy from the flipped matrix.
pub struct MfModuleData {
    pub q: Arc<QuotientRing>,
    pub module: ModulePresentation,
    /// Cokernel of the partner matrix: the syzygy of `module`, one
    /// degree up.
    pub omega: ModulePresentation,
}

/// Requires a reduced factorization of a standard-graded equation; the
/// weighted curve equations go through the truncation backend instead.
pub fn mf_module(mf: &MatrixFactorization) -> Result<MfModuleData> {
    if !mf.is_reduced() {
        return Err(Error::Invalid(
            "factorization has unit entries: the cokernel would drop a free summand".into(),
        ));
    }
    if !mf.f.is_homogeneous() {
        return Err(Error::Inhomogeneous(format!(
            "equation {} needs the truncation backend",
            mf.f.render()
        )));
    }
    let (shifts, _) = graded_shifts(&mf.phi).ok_or_else(|| {
        Error::Inhomogeneous("factorization entries admit no consistent grading".into())
    })?;
    let q = QuotientRing::new(
        mf.ring.clone(),
        vec![mf.f.clone()],
        GorensteinEvidence::Hypersurface,
    )?;
    let module = ModulePresentation::from_matrix(q.clone(), shifts, &mf.phi)?;
    let (omega_shifts, _) = graded_shifts(&mf.psi).ok_or_else(|| {
        Error::Inhomogeneous("partner matrix admits no consistent grading".into())
    })?;
    // Align the syzygy grading with its role as the kernel of the cover:
    // its generators sit at the column degrees of φ.
    let offset = {
        let (_, phi_cols) = graded_shifts(&mf.phi).unwrap();
        phi_cols[0] - omega_shifts[0]
    };
    let omega_shifts: Vec<i64> = omega_shifts.iter().map(|d| d + offset).collect();
    let omega = ModulePresentation::from_matrix(q.clone(), omega_shifts, &mf.psi)?;
    Ok(MfModuleData { q, module, omega })
}

/// One catalog item, addressable by its identifier.
pub struct CatalogEntry {
    pub id: String,
    pub mf: MatrixFactorization,
}

/// The supported singularity charts. The numeric parameters follow the
/// two-variable normal forms `x² + y^{n+1}`, `x²y + y^{n−1}`,
/// `x³ + y⁴`, `x³ + xy³`, `x³ + y⁵`, and the quadrics in three and
/// four variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdeFamily {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
    Quadric3,
    Quadric4,
}

fn var(ring: &Arc<PolyRing>, i: usize) -> Polynomial {
    Polynomial::var(ring, i)
}

fn ipow(ring: &Arc<PolyRing>, i: usize, e: usize) -> Polynomial {
    Polynomial::var(ring, i).pow(e as u32)
}

fn scaled(p: &Polynomial, c: &Coeff) -> Polynomial {
    p.scale(c)
}

fn entry(id: String, phi: Vec<Vec<Polynomial>>, psi: Vec<Vec<Polynomial>>, f: &Polynomial, ring: &Arc<PolyRing>) -> Result<CatalogEntry> {
    Ok(CatalogEntry { id, mf: mf_validate(phi, psi, f.clone(), ring.clone())? })
}

/// The standard indecomposable factorizations for a family. Every entry
/// is re-validated on the way out; completeness of the list is a
/// classification fact the system does not certify.
pub fn ade_catalog(ring: &Arc<PolyRing>, family: AdeFamily) -> Result<Vec<CatalogEntry>> {
    if ring.field.characteristic() == 2 {
        return Err(Error::Invalid(
            "catalog charts need characteristic different from 2".into(),
        ));
    }
    let needed = match family {
        AdeFamily::Quadric3 => 3,
        AdeFamily::Quadric4 => 4,
        _ => 2,
    };
    if ring.nvars() != needed {
        return Err(Error::Invalid(format!(
            "family needs exactly {needed} variables, ring has {}",
            ring.nvars()
        )));
    }
    let mut out = Vec::new();
    match family {
        AdeFamily::A(n) => {
            if n < 1 {
                return Err(Error::Invalid("family index must be at least 1".into()));
            }
            let f = ipow(ring, 0, 2).add(&ipow(ring, 1, n + 1));
            let x = var(ring, 0);
            for j in 1..=n {
                let m = vec![
                    vec![x.clone(), ipow(ring, 1, j)],
                    vec![ipow(ring, 1, n + 1 - j), x.neg()],
                ];
                out.push(entry(format!("ade:A{n}:j={j}"), m.clone(), m, &f, ring)?);
            }
            if n % 2 == 1 {
                if let Some(i) = ring.field.sqrt_minus_one() {
                    let m = (n + 1) / 2;
                    let plus = x.add(&scaled(&ipow(ring, 1, m), &i));
                    let minus = x.sub(&scaled(&ipow(ring, 1, m), &i));
                    out.push(entry(
                        format!("ade:A{n}:u=+"),
                        vec![vec![plus.clone()]],
                        vec![vec![minus.clone()]],
                        &f,
                        ring,
                    )?);
                    out.push(entry(
                        format!("ade:A{n}:u=-"),
                        vec![vec![minus]],
                        vec![vec![plus]],
                        &f,
                        ring,
                    )?);
                }
            }
        }
        AdeFamily::D(n) => {
            if n < 4 {
                return Err(Error::Invalid("family index must be at least 4".into()));
            }
            let f = ipow(ring, 0, 2).mul(&var(ring, 1)).add(&ipow(ring, 1, n - 1));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let co = ipow(ring, 0, 2).add(&ipow(ring, 1, n - 2));
            out.push(entry(
                format!("ade:D{n}:lin"),
                vec![vec![y.clone()]],
                vec![vec![co.clone()]],
                &f,
                ring,
            )?);
            out.push(entry(
                format!("ade:D{n}:quad"),
                vec![vec![co]],
                vec![vec![y.clone()]],
                &f,
                ring,
            )?);
            for j in 1..=n.saturating_sub(3) {
                let phi = vec![
                    vec![x.clone(), ipow(ring, 1, j)],
                    vec![ipow(ring, 1, n - 2 - j).neg(), x.clone()],
                ];
                let psi = vec![
                    vec![x.mul(&y), ipow(ring, 1, j + 1).neg()],
                    vec![ipow(ring, 1, n - 1 - j), x.mul(&y)],
                ];
                out.push(entry(format!("ade:D{n}:j={j}"), phi, psi, &f, ring)?);
            }
        }
        AdeFamily::E6 => {
            let f = ipow(ring, 0, 3).add(&ipow(ring, 1, 4));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let phi = vec![vec![x.clone(), ipow(ring, 1, 3)], vec![y.clone(), ipow(ring, 0, 2).neg()]];
            let psi = vec![vec![ipow(ring, 0, 2), ipow(ring, 1, 3)], vec![y.clone(), x.neg()]];
            out.push(entry("ade:E6:a".into(), phi.clone(), psi.clone(), &f, ring)?);
            out.push(entry("ade:E6:b".into(), psi, phi, &f, ring)?);
        }
        AdeFamily::E7 => {
            let f = ipow(ring, 0, 3).add(&var(ring, 0).mul(&ipow(ring, 1, 3)));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let co = ipow(ring, 0, 2).add(&ipow(ring, 1, 3));
            out.push(entry(
                "ade:E7:lin".into(),
                vec![vec![x.clone()]],
                vec![vec![co.clone()]],
                &f,
                ring,
            )?);
            out.push(entry(
                "ade:E7:quad".into(),
                vec![vec![co]],
                vec![vec![x.clone()]],
                &f,
                ring,
            )?);
            let phi = vec![
                vec![ipow(ring, 0, 2), x.mul(&y)],
                vec![ipow(ring, 1, 2), x.neg()],
            ];
            let psi = vec![
                vec![x.clone(), x.mul(&y)],
                vec![ipow(ring, 1, 2), ipow(ring, 0, 2).neg()],
            ];
            out.push(entry("ade:E7:a".into(), phi.clone(), psi.clone(), &f, ring)?);
            out.push(entry("ade:E7:b".into(), psi, phi, &f, ring)?);
        }
        AdeFamily::E8 => {
            let f = ipow(ring, 0, 3).add(&ipow(ring, 1, 5));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let phi = vec![vec![x.clone(), ipow(ring, 1, 4)], vec![y.clone(), ipow(ring, 0, 2).neg()]];
            let psi = vec![vec![ipow(ring, 0, 2), ipow(ring, 1, 4)], vec![y.clone(), x.neg()]];
            out.push(entry("ade:E8:a".into(), phi.clone(), psi.clone(), &f, ring)?);
            out.push(entry("ade:E8:b".into(), psi, phi, &f, ring)?);
        }
        AdeFamily::Quadric3 => {
            let i = ring.field.sqrt_minus_one().ok_or_else(|| {
                Error::Invalid("the quadric chart needs a square root of -1 in the field".into())
            })?;
            let f = ipow(ring, 0, 2).add(&ipow(ring, 1, 2)).add(&ipow(ring, 2, 2));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let z = var(ring, 2);
            let m = vec![
                vec![x.clone(), y.add(&scaled(&z, &i))],
                vec![y.sub(&scaled(&z, &i)), x.neg()],
            ];
            out.push(entry("quadric3:spinor".into(), m.clone(), m, &f, ring)?);
        }
        AdeFamily::Quadric4 => {
            let i = ring.field.sqrt_minus_one().ok_or_else(|| {
                Error::Invalid("the quadric chart needs a square root of -1 in the field".into())
            })?;
            let f = ipow(ring, 0, 2)
                .add(&ipow(ring, 1, 2))
                .add(&ipow(ring, 2, 2))
                .add(&ipow(ring, 3, 2));
            let x = var(ring, 0);
            let y = var(ring, 1);
            let z = var(ring, 2);
            let w = var(ring, 3);
            let a = x.add(&scaled(&y, &i));
            let abar = x.sub(&scaled(&y, &i));
            let b = z.add(&scaled(&w, &i));
            let bbar = z.sub(&scaled(&w, &i));
            let phi = vec![vec![a.clone(), b.clone()], vec![bbar.neg(), abar.clone()]];
            let psi = vec![vec![abar, b.neg()], vec![bbar, a]];
            out.push(entry("quadric4:spinor+".into(), phi.clone(), psi.clone(), &f, ring)?);
            out.push(entry("quadric4:spinor-".into(), psi, phi, &f, ring)?);
        }
    }
    Ok(out)
}

/// Look up a single catalog entry by its `ade:A3:j=1`-style identifier.
pub fn catalog_lookup(ring: &Arc<PolyRing>, id: &str) -> Result<MatrixFactorization> {
    let family = parse_family(id)?;
    let entries = ade_catalog(ring, family)?;
    entries
        .into_iter()
        .find(|e| e.id == id)
        .map(|e| e.mf)
        .ok_or_else(|| Error::Invalid(format!("no catalog entry named {id}")))
}

/// Family of a catalog identifier: `ade:A3:j=1` and plain `ade:A3` both
/// name the `A₃` chart.
pub fn parse_family(id: &str) -> Result<AdeFamily> {
    let head = id.split(':').next().unwrap_or("");
    if head == "quadric3" {
        return Ok(AdeFamily::Quadric3);
    }
    if head == "quadric4" {
        return Ok(AdeFamily::Quadric4);
    }
    let name = id.strip_prefix("ade:").and_then(|rest| rest.split(':').next()).unwrap_or("");
    match name {
        "E6" => Ok(AdeFamily::E6),
        "E7" => Ok(AdeFamily::E7),
        "E8" => Ok(AdeFamily::E8),
        _ => {
            if let Some(n) = name.strip_prefix('A').and_then(|s| s.parse().ok()) {
                Ok(AdeFamily::A(n))
            } else if let Some(n) = name.strip_prefix('D').and_then(|s| s.parse().ok()) {
                Ok(AdeFamily::D(n))
            } else {
                Err(Error::Invalid(format!("unrecognized catalog identifier {id}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etriangle::{e_triangle, syzygy_module};
    use crate::functors::{is_stably_iso, StableIso};
    use crate::parse::{parse_poly, parse_ring};

    fn curve_ring() -> Arc<PolyRing> {
        parse_ring("p=5; vars x,y").unwrap()
    }

    #[test]
    fn validation_accepts_and_rejects() {
        let r = curve_ring();
        let x = parse_poly(&r, "x").unwrap();
        let f = parse_poly(&r, "x^2").unwrap();
        let y = parse_poly(&r, "y").unwrap();
        assert!(mf_validate(vec![vec![x.clone()]], vec![vec![x.clone()]], f.clone(), r.clone()).is_ok());
        let err = mf_validate(vec![vec![x]], vec![vec![y]], f, r.clone()).unwrap_err();
        assert!(matches!(err, Error::NotAFactorization(_)));
        assert!(err.is_falsified_assertion());
    }

    #[test]
    fn a_family_entries_all_hold() {
        let r = curve_ring();
        let entries = ade_catalog(&r, AdeFamily::A(3)).unwrap();
        let ids: Vec<&str> = entries.iter().map(|e| e.id.as_str()).collect();
        assert!(ids.contains(&"ade:A3:j=1"));
        assert!(ids.contains(&"ade:A3:j=3"));
        // 5 ≡ 1 mod 4, so the equation also splits into linear factors.
        assert!(ids.contains(&"ade:A3:u=+"));
        for e in &entries {
            assert!(e.mf.is_reduced(), "{}", e.id);
        }
    }

    #[test]
    fn mirrored_indices_give_matching_cokernels() {
        // Row/column swaps and sign scalings carry phi_j to phi_{n+1-j},
        // so the two cokernels are isomorphic on the nose.
        let r = curve_ring();
        let entries = ade_catalog(&r, AdeFamily::A(3)).unwrap();
        let phi1 = &entries.iter().find(|e| e.id == "ade:A3:j=1").unwrap().mf.phi;
        let phi3 = &entries.iter().find(|e| e.id == "ade:A3:j=3").unwrap().mf.phi;
        let swapped: Vec<Vec<Polynomial>> = vec![
            vec![phi3[1][1].neg(), phi3[1][0].clone()],
            vec![phi3[0][1].clone(), phi3[0][0].neg()],
        ];
        for i in 0..2 {
            for j in 0..2 {
                assert!(swapped[i][j].sub(&phi1[i][j]).is_zero());
            }
        }
    }

    #[test]
    fn linear_factors_multiply_out() {
        let r = curve_ring();
        let entries = ade_catalog(&r, AdeFamily::A(1)).unwrap();
        let lin: Vec<_> = entries.iter().filter(|e| e.mf.size() == 1).collect();
        assert_eq!(lin.len(), 2);
        let prod = lin[0].mf.phi[0][0].mul(&lin[0].mf.psi[0][0]);
        let f = parse_poly(&r, "x^2+y^2").unwrap();
        assert!(prod.sub(&f).is_zero());
    }

    #[test]
    fn d_and_e_charts_validate() {
        let r = parse_ring("p=7; vars x,y").unwrap();
        assert_eq!(ade_catalog(&r, AdeFamily::D(5)).unwrap().len(), 4);
        assert_eq!(ade_catalog(&r, AdeFamily::E6).unwrap().len(), 2);
        assert_eq!(ade_catalog(&r, AdeFamily::E7).unwrap().len(), 4);
        assert_eq!(ade_catalog(&r, AdeFamily::E8).unwrap().len(), 2);
    }

    #[test]
    fn characteristic_two_is_refused() {
        let r = parse_ring("p=2; vars x,y").unwrap();
        assert!(ade_catalog(&r, AdeFamily::A(2)).is_err());
    }

    #[test]
    fn quadric_chart_recovers_the_spinor_module() {
        let r = parse_ring("p=5; vars x,y,z").unwrap();
        let entries = ade_catalog(&r, AdeFamily::Quadric3).unwrap();
        let data = mf_module(&entries[0].mf).unwrap();
        assert_eq!(data.module.mu(), 2);
        assert_eq!(e_triangle(&data.module).unwrap(), 2);
        // Two-periodicity: the second syzygy is the module again, two
        // internal degrees up.
        let syz2 = syzygy_module(&data.module, 2).unwrap();
        assert!(matches!(
            is_stably_iso(&syz2, &data.module.twist(2), 5, 32),
            StableIso::Yes(_)
        ));
        // The recorded syzygy data is the flip, one degree up.
        assert_eq!(data.omega.shifts(), &[1, 1]);
    }

    #[test]
    fn quadric_fourfold_chart_validates() {
        let r = parse_ring("p=13; vars x,y,z,w").unwrap();
        let entries = ade_catalog(&r, AdeFamily::Quadric4).unwrap();
        assert_eq!(entries.len(), 2);
        let data = mf_module(&entries[0].mf).unwrap();
        assert_eq!(data.module.mu(), 2);
    }

    #[test]
    fn degenerate_factorization_is_kept_out_of_modules() {
        let r = curve_ring();
        let f = parse_poly(&r, "x^2").unwrap();
        let one = Polynomial::one(&r);
        let mf = mf_validate(vec![vec![f.clone()]], vec![vec![one]], f, r.clone()).unwrap();
        assert!(!mf.is_reduced());
        assert!(matches!(mf_module(&mf), Err(Error::Invalid(_))));
    }

    #[test]
    fn weighted_equations_route_to_truncation() {
        let r = curve_ring();
        let entries = ade_catalog(&r, AdeFamily::A(2)).unwrap();
        assert!(matches!(mf_module(&entries[0].mf), Err(Error::Inhomogeneous(_))));
    }

    #[test]
    fn manipulations_revalidate() {
        let r = curve_ring();
        let entries = ade_catalog(&r, AdeFamily::A(3)).unwrap();
        let mf = &entries.iter().find(|e| e.id == "ade:A3:j=1").unwrap().mf;
        let t = mf.transpose();
        assert_eq!(t.size(), 2);
        let d = mf.direct_sum(&t).unwrap();
        assert_eq!(d.size(), 4);
        let flipped = mf.flip();
        assert!(flipped.phi[0][0].sub(&mf.psi[0][0]).is_zero());
    }

    #[test]
    fn lookup_by_identifier() {
        let r = curve_ring();
        assert!(catalog_lookup(&r, "ade:A3:j=2").is_ok());
        assert!(catalog_lookup(&r, "ade:A3:j=9").is_err());
        let r3 = parse_ring("p=5; vars x,y,z").unwrap();
        assert!(catalog_lookup(&r3, "quadric3:spinor").is_ok());
    }
}

