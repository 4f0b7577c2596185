//! The ambient graded polynomial ring `S = k[x_1..x_v]` with the standard
//! grading (`deg x_i = 1`).

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::monomial::Monomial;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
pub struct PolyRing {
    pub field: BaseField,
    pub vars: Vec<String>,
}

impl PolyRing {
    pub fn new(field: BaseField, vars: Vec<String>) -> Result<Arc<Self>> {
        if vars.is_empty() {
            return Err(Error::EmptyVariables);
        }
        for (i, v) in vars.iter().enumerate() {
            if v.is_empty()
                || !v.chars().next().unwrap().is_ascii_alphabetic() && !v.starts_with('_')
                || !v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Parse(format!("bad variable name `{v}`")));
            }
            if vars[..i].contains(v) {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        Ok(Arc::new(PolyRing { field, vars }))
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn monomial_string(&self, m: &Monomial) -> String {
        if m.is_one() {
            return "1".into();
        }
        let mut parts = Vec::new();
        for (i, &e) in m.exps().iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(self.vars[i].clone()),
                _ => parts.push(format!("{}^{}", self.vars[i], e)),
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            BaseField::Rationals => write!(f, "QQ[{}]", self.vars.join(",")),
            BaseField::PrimeField(p) => write!(f, "F{}[{}]", p, self.vars.join(",")),
        }
    }
}

/// Two ring handles denote the same ring iff field and variable list agree;
/// most call sites share one `Arc` so this is usually pointer equality.
pub fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}
