//! ψ and λ₁ integrals over M̄_{0,n} and M̄_{1,n}.
//!
//! Genus 0 uses the multinomial closed form. Genus 1 is reduced with the
//! string and dilaton equations down to M̄_{1,1}, where the two base values
//! ∫ψ₁ and ∫λ₁ are stored constants (both 1/24 for the real table). The
//! constants are injectable so that downstream checks can be shown to
//! depend on them.

use std::collections::HashMap;
use std::sync::RwLock;

use serde::Serialize;

use crate::algebra::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HodgeError {
    #[error("M̄_{{{genus},{n}}} is not a stable moduli space")]
    UnstableSpace { genus: u8, n: usize },
    #[error("genus {0} Hodge integrals are not supported")]
    UnsupportedGenus(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    genus: u8,
    psi: Vec<u32>,
    lambda1: u32,
}

/// One row of a dumped table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HodgeEntry {
    pub genus: u8,
    pub psi: Vec<u32>,
    pub lambda1: u32,
    pub value: Rational,
}

/// Memoized Hodge integrals. Reads take a shared lock; inserts are
/// serialized behind the write lock.
pub struct HodgeTable {
    psi_base: Rational,
    lambda_base: Rational,
    memo: RwLock<HashMap<Key, Rational>>,
}

impl Default for HodgeTable {
    fn default() -> Self {
        Self::new()
    }
}

impl std::fmt::Debug for HodgeTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HodgeTable")
            .field("psi_base", &self.psi_base)
            .field("lambda_base", &self.lambda_base)
            .finish_non_exhaustive()
    }
}

impl HodgeTable {
    pub fn new() -> Self {
        let base = Rational::new(1, 24).unwrap();
        Self::with_base_constants(base.clone(), base)
    }

    /// A table whose genus-1 values are generated from the given
    /// ∫_{M̄_{1,1}} ψ₁ and ∫_{M̄_{1,1}} λ₁.
    pub fn with_base_constants(psi_base: Rational, lambda_base: Rational) -> Self {
        HodgeTable {
            psi_base,
            lambda_base,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn psi_base(&self) -> &Rational {
        &self.psi_base
    }

    pub fn lambda_base(&self) -> &Rational {
        &self.lambda_base
    }

    /// ∫_{M̄_{0,n}} ∏ψ_i^{a_i}.
    pub fn psi_integral_g0(&self, psi: &[u32]) -> Result<Rational, HodgeError> {
        self.integral(0, psi, 0)
    }

    /// ∫_{M̄_{1,n}} ∏ψ_i^{a_i} λ₁^b.
    pub fn hodge_integral_g1(&self, psi: &[u32], lambda1: u32) -> Result<Rational, HodgeError> {
        self.integral(1, psi, lambda1)
    }

    /// Dispatch on genus. Dimension mismatch gives exactly zero.
    pub fn integral(&self, genus: u8, psi: &[u32], lambda1: u32) -> Result<Rational, HodgeError> {
        let n = psi.len();
        match genus {
            0 if n < 3 => return Err(HodgeError::UnstableSpace { genus, n }),
            1 if n < 1 => return Err(HodgeError::UnstableSpace { genus, n }),
            0 | 1 => {}
            g => return Err(HodgeError::UnsupportedGenus(g)),
        }
        let dim = if genus == 0 { n - 3 } else { n };
        let total: usize = psi.iter().map(|&a| a as usize).sum::<usize>() + lambda1 as usize;
        // λ₁ vanishes in genus 0 and squares to zero in genus 1
        if total != dim || lambda1 > genus as u32 {
            return Ok(Rational::zero());
        }
        let mut sorted = psi.to_vec();
        sorted.sort_unstable();
        let key = Key {
            genus,
            psi: sorted,
            lambda1,
        };
        if let Some(v) = self.memo.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let value = match genus {
            0 => multinomial(&key.psi),
            _ => self.reduce_g1(&key.psi, lambda1)?,
        };
        self.memo.write().unwrap().insert(key, value.clone());
        Ok(value)
    }

    // Dimension already matches here.
    fn reduce_g1(&self, psi: &[u32], lambda1: u32) -> Result<Rational, HodgeError> {
        let n = psi.len();
        if n == 1 {
            return Ok(if lambda1 == 1 {
                self.lambda_base.clone()
            } else {
                self.psi_base.clone()
            });
        }
        // string: ⟨τ_0 ∏τ_{a_i}⟩ = Σ_j ⟨τ_{a_j - 1} ∏_{i≠j} τ_{a_i}⟩
        if let Some(pos) = psi.iter().position(|&a| a == 0) {
            let mut rest = psi.to_vec();
            rest.remove(pos);
            let mut acc = Rational::zero();
            for j in 0..rest.len() {
                if rest[j] == 0 {
                    continue;
                }
                let mut lowered = rest.clone();
                lowered[j] -= 1;
                acc += &self.integral(1, &lowered, lambda1)?;
            }
            return Ok(acc);
        }
        // all exponents ≥ 1 and Σ = n forces all = 1 (λ₁ absent): dilaton
        let pos = psi.iter().position(|&a| a == 1).expect("dimension count");
        let mut rest = psi.to_vec();
        rest.remove(pos);
        let factor = Rational::from((n - 1) as i64);
        Ok(factor * self.integral(1, &rest, lambda1)?)
    }

    /// All monomials (sorted exponent multisets) of matching dimension for
    /// `n` in `1..=max_n`, skipping unstable `n`.
    pub fn dump(&self, genus: u8, max_n: usize) -> Result<Vec<HodgeEntry>, HodgeError> {
        if genus > 1 {
            return Err(HodgeError::UnsupportedGenus(genus));
        }
        let mut out = Vec::new();
        let min_n = if genus == 0 { 3 } else { 1 };
        for n in min_n..=max_n {
            for lambda1 in 0..=genus as u32 {
                let dim = if genus == 0 { n - 3 } else { n } as u32;
                if lambda1 > dim {
                    continue;
                }
                for psi in sorted_compositions(dim - lambda1, n) {
                    let value = self.integral(genus, &psi, lambda1)?;
                    out.push(HodgeEntry {
                        genus,
                        psi,
                        lambda1,
                        value,
                    });
                }
            }
        }
        Ok(out)
    }
}

fn multinomial(psi: &[u32]) -> Rational {
    let n: u32 = psi.iter().sum();
    let mut num = factorial(n);
    for &a in psi {
        num = num / factorial(a);
    }
    num
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).map(Rational::from).product()
}

/// Non-decreasing sequences of `parts` non-negative integers summing to `total`.
fn sorted_compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn go(total: u32, parts: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut a = min;
        while a * parts as u32 <= total {
            cur.push(a);
            go(total - a, parts - 1, a, cur, out);
            cur.pop();
            a += 1;
        }
    }
    let mut out = Vec::new();
    go(total, parts, 0, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p, d).unwrap()
    }

    // Genus-0 string-equation recursion from ⟨τ_0^3⟩ = 1, independent of the
    // multinomial closed form.
    fn string_oracle_g0(psi: &[u32]) -> Rational {
        let n = psi.len();
        if psi.iter().sum::<u32>() as usize != n - 3 {
            return Rational::zero();
        }
        if n == 3 {
            return Rational::one();
        }
        let pos = psi.iter().position(|&a| a == 0).unwrap();
        let mut rest = psi.to_vec();
        rest.remove(pos);
        (0..rest.len())
            .filter(|&j| rest[j] > 0)
            .map(|j| {
                let mut l = rest.clone();
                l[j] -= 1;
                string_oracle_g0(&l)
            })
            .sum()
    }

    // Closed formula ⟨∏τ_{d_i}⟩_1 = (1/24)·binom(n; d)·(1 − Σ_{k≥2} (k−2)!(n−k)!/n! e_k(d)).
    fn closed_form_g1(psi: &[u32]) -> Rational {
        let n = psi.len();
        let multi = multinomial(psi);
        let mut s = Rational::zero();
        for k in 2..=n {
            let ek: i64 = subsets(n, k)
                .iter()
                .map(|idx| idx.iter().map(|&i| psi[i] as i64).product::<i64>())
                .sum();
            let w = factorial(k as u32 - 2) * factorial((n - k) as u32) / factorial(n as u32);
            s += &(w * Rational::from(ek));
        }
        q(1, 24) * multi * (Rational::one() - s)
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..(1 << n))
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
            .collect()
    }

    #[test]
    fn genus_zero_examples() {
        let t = HodgeTable::new();
        assert_eq!(t.psi_integral_g0(&[0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(t.psi_integral_g0(&[1, 0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(t.psi_integral_g0(&[2, 0, 0, 0, 0]).unwrap(), q(1, 1));
        assert_eq!(t.psi_integral_g0(&[1, 1, 0, 0, 0]).unwrap(), q(2, 1));
        for psi in [[1u32, 0, 0, 0].as_slice(), &[2, 0, 0, 0, 0], &[1, 1, 0, 0, 0]] {
            assert_eq!(t.psi_integral_g0(psi).unwrap(), string_oracle_g0(psi));
        }
    }

    #[test]
    fn genus_one_base_values() {
        let t = HodgeTable::new();
        assert_eq!(t.hodge_integral_g1(&[1], 0).unwrap(), q(1, 24));
        assert_eq!(t.hodge_integral_g1(&[0], 1).unwrap(), q(1, 24));
        // λ₁ = δ_irr/12 on M̄_{1,1}; the nodal point has automorphism group of order 2
        assert_eq!(q(1, 12) * q(1, 2), q(1, 24));
        // dilaton bootstrap: ⟨τ_1^n⟩_1 = (n-1)!/24
        assert_eq!(t.hodge_integral_g1(&[1, 1, 1, 1], 0).unwrap(), q(6, 24));
    }

    #[test]
    fn lambda_squared_vanishes() {
        let t = HodgeTable::new();
        assert_eq!(t.hodge_integral_g1(&[0, 0], 2).unwrap(), Rational::zero());
        assert_eq!(t.hodge_integral_g1(&[1, 0, 0], 2).unwrap(), Rational::zero());
        assert_eq!(t.integral(0, &[0, 0, 0, 0], 1).unwrap(), Rational::zero());
    }

    #[test]
    fn dimension_mismatch_is_zero() {
        let t = HodgeTable::new();
        assert_eq!(t.psi_integral_g0(&[1, 0, 0]).unwrap(), Rational::zero());
        assert_eq!(t.hodge_integral_g1(&[2, 0], 1).unwrap(), Rational::zero());
        assert_eq!(t.hodge_integral_g1(&[0, 0], 0).unwrap(), Rational::zero());
    }

    #[test]
    fn unstable_and_unsupported() {
        let t = HodgeTable::new();
        assert_eq!(
            t.psi_integral_g0(&[0, 0]),
            Err(HodgeError::UnstableSpace { genus: 0, n: 2 })
        );
        assert!(t.hodge_integral_g1(&[], 0).is_err());
        assert_eq!(t.integral(2, &[0], 0), Err(HodgeError::UnsupportedGenus(2)));
    }

    #[test]
    fn genus_one_matches_closed_form() {
        let t = HodgeTable::new();
        for n in 1..=6 {
            for psi in sorted_compositions(n as u32, n) {
                assert_eq!(
                    t.hodge_integral_g1(&psi, 0).unwrap(),
                    closed_form_g1(&psi),
                    "{psi:?}"
                );
            }
            // λ₁ is pulled back from M̄_{1,1}: same recursion as genus 0, base 1/24
            for psi in sorted_compositions(n as u32 - 1, n) {
                assert_eq!(
                    t.hodge_integral_g1(&psi, 1).unwrap(),
                    q(1, 24) * multinomial(&psi),
                    "{psi:?}"
                );
            }
        }
    }

    #[test]
    fn string_and_dilaton_consistency() {
        let t = HodgeTable::new();
        for genus in 0..=1u8 {
            for e in t.dump(genus, 6).unwrap() {
                // string: add τ_0
                let mut with0 = e.psi.clone();
                with0.push(0);
                let expected: Rational = (0..e.psi.len())
                    .filter(|&j| e.psi[j] > 0)
                    .map(|j| {
                        let mut l = e.psi.clone();
                        l[j] -= 1;
                        t.integral(genus, &l, e.lambda1)
                            .unwrap_or_else(|_| Rational::zero())
                    })
                    .sum();
                if e.psi.len() < 6 {
                    assert_eq!(t.integral(genus, &with0, e.lambda1).unwrap(), expected);
                }
                // dilaton: add τ_1
                if e.psi.len() <= 5 {
                    let mut with1 = e.psi.clone();
                    with1.push(1);
                    let factor = Rational::from(2 * genus as i64 - 2 + e.psi.len() as i64);
                    assert_eq!(t.integral(genus, &with1, e.lambda1).unwrap(), factor * &e.value);
                }
            }
        }
    }

    #[test]
    fn values_scale_with_base_constants() {
        let t = HodgeTable::with_base_constants(q(1, 12), q(1, 24));
        assert_eq!(t.hodge_integral_g1(&[1, 1], 0).unwrap(), q(1, 12));
        assert_eq!(t.hodge_integral_g1(&[1, 0], 1).unwrap(), q(1, 24));
        let u = HodgeTable::with_base_constants(q(1, 24), q(1, 7));
        assert_eq!(u.hodge_integral_g1(&[1, 1, 0], 1).unwrap(), q(2, 7));
    }

    #[test]
    fn dump_sizes() {
        let t = HodgeTable::new();
        let g0 = t.dump(0, 5).unwrap();
        // n=3: (0,0,0); n=4: (0,0,0,1); n=5: (0,0,0,0,2),(0,0,0,1,1)
        assert_eq!(g0.len(), 4);
        let g1 = t.dump(1, 2).unwrap();
        // n=1: ψ, λ; n=2: (0,2),(1,1),(0,1)λ
        assert_eq!(g1.len(), 5);
    }
}
