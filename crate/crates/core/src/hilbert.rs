//! Hilbert data for graded modules: the graded series (from the finite
//! ambient resolution), exact Hilbert-Samuel lengths `ℓ(M/𝔪^{n+1}M)`
//! computed degree by degree, and the Hilbert-Samuel polynomial with its
//! integer coefficients.
//!
//! Lengths are never obtained by truncating internal degrees: for modules
//! with generators in mixed degrees the two filtrations disagree below the
//! leading term, so every value here comes from an honest rank computation
//! of `(𝔪^{s}M)_t` inside each graded piece.

use crate::error::{Error, Result};
use crate::field::big_rational_to_i64;
use crate::linalg::Echelon;
use crate::module::ModulePresentation;
use crate::monomial::monomials_of_degree;
use crate::resolution::resolve_over_ambient;
use crate::vecelem::{VecElem, VecTerm};
use num::{BigRational, One, Signed, Zero};
use std::collections::BTreeMap;

/// Graded Hilbert series as `numer / (1-z)^nvars`, numerator a Laurent
/// polynomial with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    pub numer: BTreeMap<i64, i64>,
    pub nvars: usize,
}

impl HilbertSeries {
    pub fn is_zero(&self) -> bool {
        self.numer.is_empty()
    }

    /// Factor out `(1-z)^k` completely: returns the reduced numerator and
    /// the Krull dimension `nvars - k`. `None` for the zero module.
    pub fn reduced(&self) -> Option<(BTreeMap<i64, i64>, usize)> {
        if self.numer.is_empty() {
            return None;
        }
        let mut cur: BTreeMap<i64, i64> = self.numer.clone();
        let mut divisions = 0usize;
        while cur.values().sum::<i64>() == 0 {
            cur = divide_by_one_minus_z(&cur);
            divisions += 1;
            assert!(divisions <= self.nvars, "numerator vanishes too deeply at z=1");
        }
        Some((cur, self.nvars - divisions))
    }

    pub fn dim(&self) -> Option<usize> {
        self.reduced().map(|(_, d)| d)
    }

    /// Multiplicity read off the series: reduced numerator at `z = 1`.
    pub fn e0(&self) -> Option<i64> {
        self.reduced().map(|(num, _)| num.values().sum())
    }

    pub fn render(&self) -> String {
        if self.numer.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in &self.numer {
            if *c == 0 {
                continue;
            }
            let mag = c.abs();
            if s.is_empty() {
                if *c < 0 {
                    s.push('-');
                }
            } else {
                s.push_str(if *c < 0 { " - " } else { " + " });
            }
            match (mag, k) {
                (m, 0) => s.push_str(&m.to_string()),
                (1, 1) => s.push('z'),
                (1, k) => s.push_str(&format!("z^{k}")),
                (m, 1) => s.push_str(&format!("{m}*z")),
                (m, k) => s.push_str(&format!("{m}*z^{k}")),
            }
        }
        format!("({s})/(1-z)^{}", self.nvars)
    }
}

fn divide_by_one_minus_z(p: &BTreeMap<i64, i64>) -> BTreeMap<i64, i64> {
    // (1-z) q = p with p(1) = 0: prefix sums give q.
    let lo = *p.keys().next().unwrap();
    let hi = *p.keys().last().unwrap();
    let mut out = BTreeMap::new();
    let mut acc = 0i64;
    for k in lo..=hi {
        acc += p.get(&k).copied().unwrap_or(0);
        if acc != 0 {
            out.insert(k, acc);
        }
    }
    debug_assert_eq!(acc, 0, "numerator not divisible by 1-z");
    out
}

/// Series from the minimal ambient resolution: alternating sum of the
/// shifted free series.
pub fn hilbert_series(m: &ModulePresentation) -> HilbertSeries {
    let res = resolve_over_ambient(m);
    let mut numer: BTreeMap<i64, i64> = BTreeMap::new();
    for (level, sign) in std::iter::once(&res.base_shifts[..])
        .chain(res.steps.iter().map(|s| &s.shifts[..]))
        .zip([1i64, -1].into_iter().cycle())
    {
        for &d in level {
            *numer.entry(d).or_insert(0) += sign;
        }
    }
    numer.retain(|_, v| *v != 0);
    HilbertSeries { numer, nvars: m.q().nvars() }
}

/// `ℓ(M/𝔪^{n+1}M)` for `n = 0..=n_max`, by exact per-degree ranks.
pub fn hilbert_samuel_values(m: &ModulePresentation, n_max: usize) -> Vec<i64> {
    if m.rank() == 0 {
        return vec![0; n_max + 1];
    }
    let q = m.q();
    let ring = &q.ring;
    let field = &ring.field;
    let min_d = *m.shifts().iter().min().unwrap();
    let max_d = *m.shifts().iter().max().unwrap();
    let mut lengths = vec![0i64; n_max + 1];
    for t in min_d..=(n_max as i64 + max_d) {
        let basis = m.std_basis(t);
        if basis.is_empty() {
            continue;
        }
        let dim_t = basis.len() as i64;
        // Group the spanning classes of (𝔪^s M)_t by multiplier degree
        // s = t - d_i and insert groups from the deepest filtration level
        // outward, recording cumulative ranks.
        let mut groups: BTreeMap<i64, Vec<Vec<crate::field::Coeff>>> = BTreeMap::new();
        for (i, &d) in m.shifts().iter().enumerate() {
            let Some(s) = t.checked_sub(d).filter(|s| *s >= 0) else { continue };
            let entry = groups.entry(s).or_default();
            for mono in monomials_of_degree(ring.nvars(), s as u32) {
                let v = VecElem::normalize(
                    field,
                    crate::vecelem::ModOrder::Top,
                    m.rank(),
                    vec![VecTerm { comp: i, mono, coeff: field.one() }],
                );
                entry.push(m.coords(&v, &basis));
            }
        }
        let mut ech = Echelon::new(field.clone(), basis.len());
        // cum[k] = (s value, rank of all groups with multiplier degree >= s)
        let mut cum: Vec<(i64, i64)> = Vec::new();
        for (&s, vs) in groups.iter().rev() {
            for v in vs {
                ech.insert(v.clone());
            }
            cum.push((s, ech.rank() as i64));
        }
        let rank_ge = |threshold: i64| -> i64 {
            cum.iter()
                .take_while(|(s, _)| *s >= threshold)
                .last()
                .map(|(_, r)| *r)
                .unwrap_or(0)
        };
        for (n, len) in lengths.iter_mut().enumerate() {
            *len += dim_t - rank_ge(n as i64 + 1);
        }
    }
    lengths
}

/// `ℓ(𝔪^n M / 𝔪^{n+1} M)`: first difference of the Samuel values.
pub fn hilbert_function_h(m: &ModulePresentation, n: usize) -> i64 {
    let vals = hilbert_samuel_values(m, n);
    if n == 0 {
        vals[0]
    } else {
        vals[n] - vals[n - 1]
    }
}

/// Degree-`r` polynomial through `samples[start..=start+r]` by Newton
/// forward differences; coefficients ascending in `n`, exact rationals.
fn newton_fit(samples: &[i64], start: usize, r: usize) -> Vec<BigRational> {
    let mut diffs: Vec<BigRational> = samples[start..=start + r]
        .iter()
        .map(|&v| BigRational::from_integer(v.into()))
        .collect();
    let mut poly = vec![BigRational::zero()];
    let mut factorial = BigRational::one();
    for j in 0..=r {
        if j > 0 {
            for i in 0..diffs.len() - j {
                diffs[i] = &diffs[i + 1] - &diffs[i];
            }
            factorial = factorial * BigRational::from_integer((j as i64).into());
        }
        // term: Δ^j / j! · (z - start)(z - start - 1)...(z - start - j + 1)
        let mut basis = vec![BigRational::one()];
        for s in 0..j {
            basis = poly_mul(
                &basis,
                &[BigRational::from_integer((-(start as i64) - s as i64).into()), BigRational::one()],
            );
        }
        let coef = &diffs[0] / &factorial;
        let term: Vec<BigRational> = basis.iter().map(|b| b * &coef).collect();
        poly = poly_add(&poly, &term);
    }
    poly
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn poly_add(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x + y
        })
        .collect()
}

pub fn poly_eval(p: &[BigRational], n: i64) -> BigRational {
    let z = BigRational::from_integer(n.into());
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * &z + c;
    }
    acc
}

/// `binom(z + a, k)` as a polynomial in `z`, ascending coefficients.
fn binom_poly(a: i64, k: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::one()];
    for s in 0..k {
        out = poly_mul(&out, &[BigRational::from_integer((a - s as i64).into()), BigRational::one()]);
    }
    let mut fact = BigRational::one();
    for j in 1..=k {
        fact = fact * BigRational::from_integer((j as i64).into());
    }
    out.into_iter().map(|c| c / &fact).collect()
}

/// Extract `e_0..e_r` from `P(z) = Σ (-1)^i e_i binom(z + r - i, r - i)`.
pub fn binomial_coefficients(poly: &[BigRational], r: usize) -> Result<Vec<i64>> {
    let mut rest: Vec<BigRational> = poly.to_vec();
    let mut out = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let k = r - i;
        let lead = rest.get(k).cloned().unwrap_or_else(BigRational::zero);
        for c in rest.iter().skip(k + 1) {
            if !c.is_zero() {
                return Err(Error::Invalid(
                    "Hilbert-Samuel polynomial exceeds the expected degree".into(),
                ));
            }
        }
        let mut factorial = BigRational::one();
        for j in 1..=k {
            factorial = factorial * BigRational::from_integer((j as i64).into());
        }
        let sign = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        let e_i = lead * factorial * sign;
        let e_int = big_rational_to_i64(&e_i).ok_or_else(|| {
            Error::Invalid(format!("Hilbert coefficient e_{i} is not an integer"))
        })?;
        out.push(e_int);
        let term = binom_poly(k as i64, k);
        let signed: Vec<BigRational> = term
            .iter()
            .map(|c| {
                let v = c * BigRational::from_integer(e_int.into());
                if i % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect();
        rest = poly_add(&rest, &signed.iter().map(|c| -c.clone()).collect::<Vec<_>>());
    }
    if rest.iter().any(|c| !c.is_zero()) {
        return Err(Error::Invalid("binomial expansion left a remainder".into()));
    }
    Ok(out)
}

/// Everything the engine knows about the Hilbert data of one module.
#[derive(Clone, Debug)]
pub struct HilbertData {
    pub series: HilbertSeries,
    /// Krull dimension; `None` for the zero module.
    pub dim: Option<usize>,
    /// `ℓ(M/𝔪^{n+1}M)` for `n = 0..`, up to the stabilization cap.
    pub samples: Vec<i64>,
    /// First sample index where the polynomial fit holds from then on.
    pub fit_start: usize,
    /// Hilbert-Samuel polynomial, ascending coefficients in `n`.
    pub poly: Vec<BigRational>,
    /// `e_0, e_1, ..., e_dim` in the binomial convention.
    pub coefficients: Vec<i64>,
}

impl HilbertData {
    pub fn e(&self, i: usize) -> i64 {
        self.coefficients.get(i).copied().unwrap_or(0)
    }

    pub fn e0(&self) -> i64 {
        self.e(0)
    }

    pub fn e1(&self) -> i64 {
        self.e(1)
    }
}

/// How far `fit_window` wants samples for a degree-`r` fit: the first
/// window starts at `n = r + 2` and twelve further samples verify it.
pub fn sample_cap(r: usize) -> usize {
    r + 14
}

/// Shared stabilization policy: fit a degree-`r` polynomial through
/// `r + 1` consecutive samples starting at `n = r + 2`, accept only if
/// every later sample agrees, and slide the window forward otherwise.
pub fn fit_window(samples: &[i64], r: usize) -> Result<(usize, Vec<BigRational>)> {
    let n_cap = samples.len().saturating_sub(1);
    for start in r + 2..=n_cap.saturating_sub(r + 3) {
        let poly = newton_fit(samples, start, r);
        let ok = (start + r + 1..=n_cap)
            .all(|n| poly_eval(&poly, n as i64) == BigRational::from_integer(samples[n].into()));
        if ok {
            return Ok((start, poly));
        }
    }
    Err(Error::NoStabilization)
}

/// Sampling window policy: first fit at `n = r + 2`, sliding forward while
/// verification fails, sampling cap 12 past the first window.
pub fn hilbert_data(m: &ModulePresentation) -> Result<HilbertData> {
    let series = hilbert_series(m);
    let Some(dim) = series.dim() else {
        return Ok(HilbertData {
            series,
            dim: None,
            samples: Vec::new(),
            fit_start: 0,
            poly: Vec::new(),
            coefficients: Vec::new(),
        });
    };
    let r = dim;
    let samples = hilbert_samuel_values(m, sample_cap(r));
    let (fit_start, poly) = fit_window(&samples, r)?;
    let coefficients = binomial_coefficients(&poly, r)?;
    if coefficients[0] <= 0 {
        return Err(Error::Invalid(format!(
            "multiplicity e_0 = {} must be positive",
            coefficients[0]
        )));
    }
    // Independent cross-check against the graded series.
    if let Some(e0s) = series.e0() {
        if e0s != coefficients[0] {
            return Err(Error::Invalid(format!(
                "multiplicity mismatch: series gives {e0s}, Samuel fit gives {}",
                coefficients[0]
            )));
        }
    }
    Ok(HilbertData { series, dim: Some(dim), samples, fit_start, poly, coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_matrix, parse_poly, parse_ring};
    use crate::qring::{GorensteinEvidence, QuotientRing};
    use std::sync::Arc;

    fn ring_mod(decl: &str, fs: &[&str], ev: GorensteinEvidence) -> Arc<QuotientRing> {
        let r = parse_ring(decl).unwrap();
        let gens = fs.iter().map(|f| parse_poly(&r, f).unwrap()).collect();
        QuotientRing::new(r, gens, ev).unwrap()
    }

    fn cyclic(q: &Arc<QuotientRing>, rels: &[&str]) -> ModulePresentation {
        let rows: Vec<Vec<String>> = vec![rels.iter().map(|s| s.to_string()).collect()];
        let m = parse_matrix(&q.ring, &rows).unwrap();
        ModulePresentation::from_matrix(q.clone(), vec![0], &m).unwrap()
    }

    #[test]
    fn series_of_dual_numbers_curve() {
        let a = ring_mod("p=5; vars x,y", &["x^2"], GorensteinEvidence::Hypersurface);
        let m = ModulePresentation::free_module(a.clone(), vec![0]);
        let s = hilbert_series(&m);
        assert_eq!(s.render(), "(1 - z^2)/(1-z)^2");
        assert_eq!(s.dim(), Some(1));
        assert_eq!(s.e0(), Some(2));
    }

    #[test]
    fn samuel_values_of_dual_numbers_curve() {
        let a = ring_mod("p=5; vars x,y", &["x^2"], GorensteinEvidence::Hypersurface);
        let m = ModulePresentation::free_module(a.clone(), vec![0]);
        // ℓ(A/𝔪^{n+1}) = 2n + 1: degrees 0..n contribute 1, 2, 2, ...
        assert_eq!(hilbert_samuel_values(&m, 5), vec![1, 3, 5, 7, 9, 11]);
        let d = hilbert_data(&m).unwrap();
        assert_eq!(d.dim, Some(1));
        assert_eq!(d.coefficients, vec![2, 1]);
    }

    #[test]
    fn quadric_surface_data() {
        let a = ring_mod(
            "p=5; vars x,y,z",
            &["x^2 + y^2 + z^2"],
            GorensteinEvidence::Hypersurface,
        );
        let m = ModulePresentation::free_module(a.clone(), vec![0]);
        // ℓ(A/𝔪^{n+1}) = (n+1)^2.
        assert_eq!(hilbert_samuel_values(&m, 4), vec![1, 4, 9, 16, 25]);
        let d = hilbert_data(&m).unwrap();
        assert_eq!(d.dim, Some(2));
        assert_eq!(d.coefficients, vec![2, 1, 0]);
        // H(A, n) = 2n + 1.
        assert_eq!(hilbert_function_h(&m, 0), 1);
        assert_eq!(hilbert_function_h(&m, 3), 7);
    }

    #[test]
    fn mixed_generator_degrees_are_not_truncations() {
        // M = A(0) ⊕ A(-1) over the dual-numbers curve: ℓ(M/𝔪^{n+1}M) =
        // (2n+1) + (2n+1) = 4n + 2, NOT the sum of degreewise truncations
        // at a common internal degree.
        let a = ring_mod("p=5; vars x,y", &["x^2"], GorensteinEvidence::Hypersurface);
        let m = ModulePresentation::free_module(a.clone(), vec![0, 1]);
        assert_eq!(hilbert_samuel_values(&m, 3), vec![2, 6, 10, 14]);
        let d = hilbert_data(&m).unwrap();
        assert_eq!(d.coefficients, vec![4, 2]);
    }

    #[test]
    fn residue_field_is_zero_dimensional() {
        let a = ring_mod("p=5; vars x,y", &["x^2"], GorensteinEvidence::Hypersurface);
        let k = cyclic(&a, &["x", "y"]);
        let d = hilbert_data(&k).unwrap();
        assert_eq!(d.dim, Some(0));
        assert_eq!(d.coefficients, vec![1]);
        assert_eq!(hilbert_samuel_values(&k, 3), vec![1, 1, 1, 1]);
    }

    #[test]
    fn maximal_ideal_of_quadric_has_shifted_data() {
        // 𝔪 ⊆ A = F5[x,y,z]/(x^2+y^2+z^2), generated in degree 1 with
        // μ = 3: ℓ(𝔪/𝔪^{n+1}) = (n+2)^2 - 1 - (2n+3) = n^2 + 2n ... compute
        // honestly: ℓ(𝔪/𝔪^{n+1}𝔪)? The module is 𝔪 with its own filtration:
        // ℓ(𝔪/𝔪^{n+1}·𝔪) = ℓ(A/𝔪^{n+2}) - 1 only if 𝔪^{n+1}·𝔪 = 𝔪^{n+2},
        // which holds here; so values are (n+2)^2 - 1.
        let a = ring_mod(
            "p=5; vars x,y,z",
            &["x^2 + y^2 + z^2"],
            GorensteinEvidence::Hypersurface,
        );
        let rows = vec![
            vec!["x".to_string(), "y".to_string(), "z".to_string()],
        ];
        let t = parse_matrix(&a.ring, &rows).unwrap();
        // Present 𝔪 by generators x, y, z: relations are the syzygies.
        let cols = crate::vecelem::matrix_columns(&t, a.field(), crate::vecelem::ModOrder::Top);
        let ker = crate::module::kernel_over_quotient(&a, 1, &cols, &[]);
        let syz = crate::module::minimal_generators(&a, &[1, 1, 1], &ker);
        let m = ModulePresentation::new(
            crate::module::FreeModuleSpec::new(a.clone(), vec![1, 1, 1]),
            syz,
        )
        .unwrap();
        assert_eq!(hilbert_samuel_values(&m, 3), vec![3, 8, 15, 24]);
        let d = hilbert_data(&m).unwrap();
        assert_eq!(d.e0(), 2);
    }
}
