//! Monomials with cached total degree and the graded reverse lexicographic
//! order (the only monomial order the engine uses).

use std::cmp::Ordering;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u16>,
    deg: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        let deg = exps.iter().map(|&e| e as u32).sum();
        Monomial { exps, deg }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars], deg: 0 }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = 1;
        Monomial { exps, deg: 1 }
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn is_one(&self) -> bool {
        self.deg == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial { exps, deg: self.deg + other.deg }
    }

    /// `self / other` when `other` divides `self`.
    pub fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        if other.deg > self.deg {
            return None;
        }
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(&other.exps) {
            if b > a {
                return None;
            }
            exps.push(a - b);
        }
        Some(Monomial { exps, deg: self.deg - other.deg })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        other.try_div(self).is_some()
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u16> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| *a.max(b))
            .collect();
        Monomial::new(exps)
    }

    pub fn coprime_with(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Graded reverse lexicographic comparison: higher total degree wins;
    /// on equal degree the monomial with the *smaller* exponent on the last
    /// differing (rightmost) variable is the larger one.
    pub fn cmp_grevlex(&self, other: &Monomial) -> Ordering {
        match self.deg.cmp(&other.deg) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for i in (0..self.exps.len()).rev() {
            match self.exps[i].cmp(&other.exps[i]) {
                Ordering::Equal => {}
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

/// All monomials of the given total degree, listed in descending grevlex
/// order. Deterministic; used to build degreewise bases.
pub fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut cur = vec![0u16; nvars];
    gen_rec(&mut cur, 0, deg, &mut out);
    out.sort_by(|a, b| b.cmp_grevlex(a));
    out
}

fn gen_rec(cur: &mut Vec<u16>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining as u16;
        out.push(Monomial::new(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e as u16;
        gen_rec(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(exps: &[u16]) -> Monomial {
        Monomial::new(exps.to_vec())
    }

    #[test]
    fn grevlex_prefers_degree_then_reverse_lex() {
        // With vars (x, y): x^2 < x*y^2 because of degree.
        assert_eq!(m(&[2, 0]).cmp_grevlex(&m(&[1, 2])), Ordering::Less);
        // Same degree: x^2 > x*y and x*y > y^2.
        assert_eq!(m(&[2, 0]).cmp_grevlex(&m(&[1, 1])), Ordering::Greater);
        assert_eq!(m(&[1, 1]).cmp_grevlex(&m(&[0, 2])), Ordering::Greater);
        // Three variables: x*z < y^2 in grevlex (z-exponent decides).
        assert_eq!(m(&[1, 0, 1]).cmp_grevlex(&m(&[0, 2, 0])), Ordering::Less);
    }

    #[test]
    fn division_and_lcm() {
        let a = m(&[3, 1]);
        let b = m(&[1, 1]);
        assert_eq!(a.try_div(&b), Some(m(&[2, 0])));
        assert_eq!(b.try_div(&a), None);
        assert_eq!(a.lcm(&m(&[0, 4])), m(&[3, 4]));
        assert!(m(&[2, 0]).coprime_with(&m(&[0, 3])));
        assert!(!m(&[1, 1]).coprime_with(&m(&[0, 3])));
    }

    #[test]
    fn degree_enumeration_is_complete_and_sorted() {
        let ms = monomials_of_degree(3, 2);
        assert_eq!(ms.len(), 6);
        for w in ms.windows(2) {
            assert_eq!(w[0].cmp_grevlex(&w[1]), Ordering::Greater);
        }
    }
}
