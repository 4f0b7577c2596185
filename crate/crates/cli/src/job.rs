//! Job documents: one ring declaration plus named modules and ideals,
//! deserialized from JSON and resolved into live presentations. Matrices
//! arrive as arrays of polynomial strings in the same grammar the parser
//! accepts everywhere else.

use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use stablecm_core::error::{Error, Result};
use stablecm_core::experiments::thickening;
use stablecm_core::mf::{catalog_lookup, mf_module, mf_validate, MatrixFactorization};
use stablecm_core::module::{FreeModuleSpec, ModulePresentation};
use stablecm_core::parse::{parse_matrix, parse_poly, parse_ring};
use stablecm_core::poly::Polynomial;
use stablecm_core::qring::{GorensteinEvidence, QuotientRing};
use stablecm_core::ring::PolyRing;

pub const SCHEMA: &str = "stablecm/1";

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDocument {
    pub schema: Option<String>,
    pub ring: RingDecl,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub ideals: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDecl {
    /// `q` for the rationals or `p=<prime>` for a prime field.
    pub field: String,
    pub vars: Vec<String>,
    #[serde(default)]
    pub equations: Vec<String>,
    /// `hypersurface`, `complete-intersection`, or `user-asserted`;
    /// defaults by equation count.
    pub evidence: Option<String>,
}

/// Exactly one construction per module; `twist` applies afterwards.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub matrix: Option<Vec<Vec<String>>>,
    pub shifts: Option<Vec<i64>>,
    pub free: Option<Vec<i64>>,
    pub cyclic: Option<Vec<String>>,
    pub catalog: Option<String>,
    pub mf: Option<MfSpec>,
    /// `n` builds `A/𝔪ⁿ`.
    pub power_quotient: Option<usize>,
    /// `n` builds `𝔪ⁿ/𝔪ⁿ⁺¹`.
    pub graded_piece: Option<usize>,
    pub twist: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfSpec {
    pub phi: Vec<Vec<String>>,
    pub psi: Vec<Vec<String>>,
    pub f: String,
}

pub struct ResolvedModule {
    pub pres: ModulePresentation,
    /// Kept when the module came from a factorization, for the
    /// truncation-backend cross-checks.
    pub mf: Option<MatrixFactorization>,
}

pub struct Workspace {
    pub ring: Arc<PolyRing>,
    pub q: Arc<QuotientRing>,
    pub equations: Vec<Polynomial>,
    pub modules: BTreeMap<String, ResolvedModule>,
    pub ideals: BTreeMap<String, Vec<Polynomial>>,
}

impl JobDocument {
    pub fn load(path: &Path) -> Result<JobDocument> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Workspace> {
        if let Some(s) = &self.schema {
            if s != SCHEMA {
                return Err(Error::Invalid(format!(
                    "unsupported schema {s:?} (this build reads {SCHEMA})"
                )));
            }
        }
        let ring = parse_ring(&format!("{}; vars {}", self.ring.field, self.ring.vars.join(",")))?;
        let equations: Vec<Polynomial> = self
            .ring
            .equations
            .iter()
            .map(|e| parse_poly(&ring, e))
            .collect::<Result<_>>()?;
        let q = if equations.is_empty() {
            QuotientRing::regular(ring.clone())?
        } else {
            let evidence = match &self.ring.evidence {
                Some(tag) => parse_evidence(tag)?,
                None if equations.len() == 1 => GorensteinEvidence::Hypersurface,
                None => GorensteinEvidence::CompleteIntersection,
            };
            QuotientRing::new(ring.clone(), equations.clone(), evidence)?
        };
        let mut modules = BTreeMap::new();
        for (name, spec) in &self.modules {
            modules.insert(name.clone(), resolve_module(&ring, &q, name, spec)?);
        }
        let mut ideals = BTreeMap::new();
        for (name, gens) in &self.ideals {
            let polys: Vec<Polynomial> =
                gens.iter().map(|g| parse_poly(&ring, g)).collect::<Result<_>>()?;
            ideals.insert(name.clone(), polys);
        }
        Ok(Workspace { ring, q, equations, modules, ideals })
    }
}

impl Workspace {
    pub fn module(&self, name: &str) -> Result<&ResolvedModule> {
        self.modules
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("no module named {name:?} in the job")))
    }

    pub fn ideal(&self, name: &str) -> Result<&[Polynomial]> {
        self.ideals
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::Invalid(format!("no ideal named {name:?} in the job")))
    }
}

fn parse_evidence(tag: &str) -> Result<GorensteinEvidence> {
    match tag {
        "hypersurface" => Ok(GorensteinEvidence::Hypersurface),
        "complete-intersection" | "ci" => Ok(GorensteinEvidence::CompleteIntersection),
        "user-asserted" => Ok(GorensteinEvidence::UserAsserted),
        other => Err(Error::Invalid(format!("unknown evidence tag {other:?}"))),
    }
}

/// Move a factorization cokernel onto the job's quotient ring. The two
/// rings must present the same ideal; sharing the job's `Arc` keeps maps
/// between catalog modules and hand-declared ones well-typed.
fn rehome(
    q: &Arc<QuotientRing>,
    data_q: &Arc<QuotientRing>,
    m: &ModulePresentation,
) -> Result<ModulePresentation> {
    let same = data_q.ideal_gens.iter().all(|g| q.reduce(g).is_zero())
        && q.ideal_gens.iter().all(|g| data_q.reduce(g).is_zero());
    if !same {
        return Err(Error::RingMismatch(format!(
            "the factorization equation defines {} but the job ring is {}",
            data_q.describe(),
            q.describe()
        )));
    }
    ModulePresentation::new(
        FreeModuleSpec::new(q.clone(), m.shifts().to_vec()),
        m.rels.clone(),
    )
}

fn resolve_module(
    ring: &Arc<PolyRing>,
    q: &Arc<QuotientRing>,
    name: &str,
    spec: &ModuleSpec,
) -> Result<ResolvedModule> {
    let chosen = [
        spec.matrix.is_some(),
        spec.free.is_some(),
        spec.cyclic.is_some(),
        spec.catalog.is_some(),
        spec.mf.is_some(),
        spec.power_quotient.is_some(),
        spec.graded_piece.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if chosen != 1 {
        return Err(Error::Invalid(format!(
            "module {name:?} must use exactly one of matrix, free, cyclic, \
             catalog, mf, power_quotient, graded_piece"
        )));
    }
    let (mut pres, mf) = if let Some(rows) = &spec.matrix {
        let matrix = parse_matrix(ring, rows)?;
        let pres = match &spec.shifts {
            Some(sh) => ModulePresentation::from_matrix(q.clone(), sh.clone(), &matrix)?,
            None => ModulePresentation::from_matrix_auto(q.clone(), &matrix)?,
        };
        (pres, None)
    } else if let Some(sh) = &spec.free {
        (ModulePresentation::free_module(q.clone(), sh.clone()), None)
    } else if let Some(gens) = &spec.cyclic {
        let polys: Vec<Polynomial> =
            gens.iter().map(|g| parse_poly(ring, g)).collect::<Result<_>>()?;
        (ModulePresentation::cyclic(q.clone(), &polys)?, None)
    } else if let Some(id) = &spec.catalog {
        let mf = catalog_lookup(ring, id)?;
        let data = mf_module(&mf)?;
        (rehome(q, &data.q, &data.module)?, Some(mf))
    } else if let Some(raw) = &spec.mf {
        let phi = parse_matrix(ring, &raw.phi)?;
        let psi = parse_matrix(ring, &raw.psi)?;
        let f = parse_poly(ring, &raw.f)?;
        let mf = mf_validate(phi, psi, f, ring.clone())?;
        let data = mf_module(&mf)?;
        (rehome(q, &data.q, &data.module)?, Some(mf))
    } else if let Some(n) = spec.power_quotient {
        if n == 0 {
            return Err(Error::Invalid(format!(
                "module {name:?}: the power quotient needs n >= 1"
            )));
        }
        let unit = ModulePresentation::free_module(q.clone(), vec![0]);
        (thickening(&unit, n)?, None)
    } else if let Some(n) = spec.graded_piece {
        let h = q.std_monomials(n as u32).len();
        if h == 0 {
            return Err(Error::Invalid(format!(
                "module {name:?}: the degree-{n} piece of the ring is zero"
            )));
        }
        let piece = ModulePresentation::free_module(q.clone(), vec![n as i64; h]);
        (thickening(&piece, 1)?, None)
    } else {
        unreachable!("construction count checked above")
    };
    if spec.shifts.is_some() && spec.matrix.is_none() {
        return Err(Error::Invalid(format!(
            "module {name:?}: shifts only accompany an explicit matrix"
        )));
    }
    if let Some(t) = spec.twist {
        pres = pres.twist(t);
    }
    Ok(ResolvedModule { pres, mf })
}
