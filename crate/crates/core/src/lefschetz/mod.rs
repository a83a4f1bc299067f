//! Quantum-Lefschetz bookkeeping for a hypersurface D ⊂ P^N: virtual
//! dimensions, vanishing bounds, the masterspace fixed loci, initial data,
//! and recursion plans.
//!
//! Curve classes are recorded by their H-degree d, so (β_D, D) = d·deg D.

mod hypergraphs;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use hypergraphs::{enumerate_hypergraphs, enumerate_stable_graphs, Hypergraph, HypergraphVertex};

use crate::algebra::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LefschetzError {
    #[error("invalid pair: {0}")]
    InvalidPair(String),
    #[error("hypergraphs are only enumerated for g >= 2, got g = {0}")]
    GenusOutOfRegime(u32),
    #[error("initial data checks need a Calabi-Yau threefold hypersurface")]
    NotCalabiYau3,
    #[error("initial data regime, no recursion: 2 - 2g + (beta, D) = {0} does not exceed 0")]
    NoRecursion(i64),
}

/// A smooth hypersurface of degree `d_degree` in P^N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairGeometry {
    pub ambient_dim: u32,
    pub d_degree: u32,
}

impl PairGeometry {
    pub fn new(ambient_dim: u32, d_degree: u32) -> Result<Self, LefschetzError> {
        if ambient_dim < 2 || d_degree < 1 {
            return Err(LefschetzError::InvalidPair(format!(
                "need N >= 2 and deg D >= 1, got N = {ambient_dim}, deg D = {d_degree}"
            )));
        }
        Ok(PairGeometry {
            ambient_dim,
            d_degree,
        })
    }

    pub fn quintic() -> Self {
        PairGeometry {
            ambient_dim: 4,
            d_degree: 5,
        }
    }

    /// c_1(TP^N) per hyperplane.
    pub fn c1_x_degree(&self) -> i64 {
        self.ambient_dim as i64 + 1
    }

    /// c_1(TD) per hyperplane, by adjunction.
    pub fn c1_d_degree(&self) -> i64 {
        self.c1_x_degree() - self.d_degree as i64
    }

    pub fn is_calabi_yau_threefold(&self) -> bool {
        self.ambient_dim == 4 && self.c1_d_degree() == 0
    }
}

impl fmt::Display for PairGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}:{}", self.ambient_dim, self.d_degree)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// The ambient P^N.
    X,
    /// The hypersurface.
    D,
    /// The masterspace, the deformation to the normal cone of D.
    Masterspace,
}

/// Virtual dimension of M̄_{g,n}(Y, β) with β of H-degree d.
pub fn vdim(pair: &PairGeometry, space: Space, g: u32, n: u32, d: u32) -> i64 {
    let g = g as i64;
    let n_amb = pair.ambient_dim as i64;
    let d = d as i64;
    match space {
        Space::X => (1 - g) * (n_amb - 3) + d * pair.c1_x_degree() + n as i64,
        Space::D => (1 - g) * (n_amb - 4) + d * pair.c1_d_degree() + n as i64,
        Space::Masterspace => {
            vdim(pair, Space::D, g as u32, n, d as u32) + vdim_difference(pair, g as u32, d as u32)
        }
    }
}

/// vdim^𝔛 − vdim^D = 2 − 2g + (β_D, D).
pub fn vdim_difference(pair: &PairGeometry, g: u32, d: u32) -> i64 {
    2 - 2 * g as i64 + d as i64 * pair.d_degree as i64
}

/// True iff 2 − 2g + d·deg D > m, i.e. the masterspace invariant with m
/// primitive insertions vanishes and the recursion step fires.
pub fn vanishing_bound(pair: &PairGeometry, g: u32, d: u32, m: u32) -> bool {
    vdim_difference(pair, g, d) > m as i64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Locus {
    D0,
    X0,
    XInf,
}

impl fmt::Display for Locus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locus::D0 => "D_0",
            Locus::X0 => "X_0",
            Locus::XInf => "X_inf",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasterspaceSpec {
    pub pair: PairGeometry,
    pub l_degree: i64,
}

/// A normal line bundle of a fixed locus: its H-degree and the sign of its
/// ℂ*-weight in units of λ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalLine {
    pub bundle: String,
    pub degree: i64,
    pub lambda_weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedLocusData {
    pub locus: Locus,
    pub normal_bundle: Vec<NormalLine>,
}

impl FixedLocusData {
    pub fn twist_degrees(&self) -> Vec<i64> {
        self.normal_bundle.iter().map(|l| l.degree).collect()
    }
}

/// Normal data of D_0, X_0 and X_∞ in the masterspace built from 𝒫_L.
pub fn masterspace_fixed_data(spec: &MasterspaceSpec) -> Vec<FixedLocusData> {
    let l = spec.l_degree;
    let dd = spec.pair.d_degree as i64;
    let line = |bundle: &str, degree: i64, lambda_weight: i64| NormalLine {
        bundle: bundle.to_string(),
        degree,
        lambda_weight,
    };
    vec![
        FixedLocusData {
            locus: Locus::D0,
            normal_bundle: vec![line("L", l, -1), line("O_D(D)*L^-1", dd - l, 1)],
        },
        FixedLocusData {
            locus: Locus::X0,
            normal_bundle: vec![line("O(-D)*L", l - dd, -1)],
        },
        FixedLocusData {
            locus: Locus::XInf,
            normal_bundle: vec![line("L^-1", -l, 1)],
        },
    ]
}

/// ∫_β c_1(N_{D/X}) > 2(g − 1), with the normal bundle O_D(D) read off the
/// D_0 data of the masterspace.
pub fn degree_condition_modified(pair: &PairGeometry, d: u32, g: u32) -> bool {
    let data = masterspace_fixed_data(&MasterspaceSpec {
        pair: *pair,
        l_degree: 0,
    });
    let c1_normal: i64 = data[0].normal_bundle.iter().map(|l| l.degree).sum();
    d as i64 * c1_normal > 2 * (g as i64 - 1)
}

/// Fiber-class relation condition on P_X(O ⊕ O(D)) for β = β_X + k f:
/// Σ deg α_i < (1−g)(N − 2) + (c_1(X) − D)·β_X + k + n.
pub fn fiber_class_bound(
    pair: &PairGeometry,
    g: u32,
    k: u32,
    n: u32,
    insertion_degrees: &[u32],
    beta_degree: u32,
) -> bool {
    let lhs: i64 = insertion_degrees.iter().map(|&x| x as i64).sum();
    let rhs = (1 - g as i64) * (pair.ambient_dim as i64 - 2)
        + (pair.c1_x_degree() - pair.d_degree as i64) * beta_degree as i64
        + k as i64
        + n as i64;
    lhs < rhs
}

/// The polynomial P_g(q) of masterspace initial data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialDataPolynomial {
    pub genus: u32,
    pub coefficients: BTreeMap<u32, Rational>,
}

impl InitialDataPolynomial {
    pub fn new(genus: u32, coefficients: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        InitialDataPolynomial {
            genus,
            coefficients: coefficients.into_iter().collect(),
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.coefficients
            .iter()
            .rev()
            .find(|(_, c)| !c.is_zero())
            .map(|(&d, _)| d)
    }
}

/// Largest q-degree allowed in P_g: ⌊(2g − 2)/deg D⌋.
pub fn initial_data_degree_bound(pair: &PairGeometry, g: u32) -> i64 {
    (2 * g as i64 - 2).div_euclid(pair.d_degree as i64)
}

pub fn initial_data_check(poly: &InitialDataPolynomial, pair: &PairGeometry) -> Result<bool, LefschetzError> {
    if !pair.is_calabi_yau_threefold() {
        return Err(LefschetzError::NotCalabiYau3);
    }
    Ok(match poly.degree() {
        None => true,
        Some(d) => d as i64 <= initial_data_degree_bound(pair, poly.genus),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerTerm {
    pub space: Space,
    pub genus: u32,
    pub degree: u32,
}

/// What one recursion step isolates: the vanishing masterspace invariant
/// produces (−1)^{1−g} λ^{−2+2g−(β,D)} times the hypersurface invariant,
/// plus terms of lower (g, d).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecursionPlan {
    pub pair: PairGeometry,
    pub genus: u32,
    pub degree: u32,
    pub vanishing: String,
    pub leading_sign: i64,
    pub lambda_exponent: i64,
    pub lower_terms: Vec<LowerTerm>,
}

pub fn recursion_plan(pair: &PairGeometry, g: u32, d: u32) -> Result<RecursionPlan, LefschetzError> {
    let diff = vdim_difference(pair, g, d);
    if !vanishing_bound(pair, g, d, 0) {
        return Err(LefschetzError::NoRecursion(diff));
    }
    let mut lower_terms = Vec::new();
    for gg in 0..=g {
        for dd in 0..=d {
            if (gg, dd) != (g, d) {
                lower_terms.push(LowerTerm {
                    space: Space::D,
                    genus: gg,
                    degree: dd,
                });
            }
        }
    }
    Ok(RecursionPlan {
        pair: *pair,
        genus: g,
        degree: d,
        vanishing: format!("<...>^{{masterspace}}_{{{g},{d}}} = 0 (vdim difference {diff} > 0)"),
        leading_sign: if (1 - g as i64).rem_euclid(2) == 0 { 1 } else { -1 },
        lambda_exponent: -diff,
        lower_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(n: u32, d: u32) -> PairGeometry {
        PairGeometry::new(n, d).unwrap()
    }

    #[test]
    fn virtual_dimensions() {
        let q = PairGeometry::quintic();
        for g in 0..5 {
            for d in 0..4 {
                assert_eq!(vdim(&q, Space::D, g, 0, d), 0);
            }
        }
        assert_eq!(vdim_difference(&q, 1, 1), 5);
        assert_eq!(vdim_difference(&q, 0, 0), 2);
        assert_eq!(vdim(&q, Space::X, 0, 0, 1), 6);
        assert_eq!(
            vdim(&q, Space::Masterspace, 1, 0, 1) - vdim(&q, Space::D, 1, 0, 1),
            5
        );
        assert!(PairGeometry::new(1, 1).is_err());
        assert!(PairGeometry::new(3, 0).is_err());
    }

    #[test]
    fn bounds() {
        let q = PairGeometry::quintic();
        assert!(vanishing_bound(&q, 2, 1, 0));
        assert!(vanishing_bound(&q, 0, 0, 0));
        assert!(vanishing_bound(&q, 1, 1, 3));
        assert!(!vanishing_bound(&q, 1, 0, 3));
        assert!(degree_condition_modified(&q, 1, 2));
        assert!(degree_condition_modified(&q, 0, 0));
        assert!(!degree_condition_modified(&q, 0, 3));
        for n in 2..6 {
            for dd in 1..7 {
                let p = pair(n, dd);
                for g in 0..6 {
                    for d in 1..6 {
                        assert_eq!(vanishing_bound(&p, g, d, 0), degree_condition_modified(&p, d, g));
                    }
                }
            }
        }
    }

    #[test]
    fn fiber_bound() {
        // K3 in a Fano threefold: c_1(X) = D
        let k3 = pair(3, 4);
        for g in 0..2 {
            for k in 0..4 {
                for n in 0..3 {
                    let rhs = (1 - g as i64) + k as i64 + n as i64;
                    for s in 0..6u32 {
                        let degs = vec![s];
                        assert_eq!(fiber_class_bound(&k3, g, k, n, &degs, 2), (s as i64) < rhs);
                    }
                }
            }
        }
        assert!(fiber_class_bound(&pair(2, 2), 0, 50, 1, &[0], 1));
        // equality is not enough
        assert!(!fiber_class_bound(&k3, 0, 0, 1, &[2], 1));
    }

    #[test]
    fn masterspace_loci() {
        let q = PairGeometry::quintic();
        let data = masterspace_fixed_data(&MasterspaceSpec { pair: q, l_degree: 1 });
        assert_eq!(data[1].twist_degrees(), vec![-4]);
        assert_eq!(data[2].twist_degrees(), vec![-1]);
        let orig = masterspace_fixed_data(&MasterspaceSpec { pair: q, l_degree: 0 });
        assert_eq!(orig[0].twist_degrees(), vec![0, 5]);
        assert_eq!(orig[1].twist_degrees(), vec![-5]);
        assert_eq!(orig[2].twist_degrees(), vec![0]);
        for l in -6..7 {
            let data = masterspace_fixed_data(&MasterspaceSpec { pair: q, l_degree: l });
            assert_eq!(data.len(), 3);
            assert_eq!(data[0].normal_bundle.len(), 2);
            assert_eq!(data[1].twist_degrees()[0] + data[2].twist_degrees()[0], -5);
        }
    }

    #[test]
    fn initial_data() {
        let q = PairGeometry::quintic();
        let c = |d: u32| InitialDataPolynomial::new(7, [(d, Rational::one())]);
        assert!(initial_data_check(&c(2), &q).unwrap());
        assert!(!initial_data_check(&c(3), &q).unwrap());
        let g2 = InitialDataPolynomial::new(2, [(0, Rational::from_integer(3))]);
        assert!(initial_data_check(&g2, &q).unwrap());
        let g2_bad = InitialDataPolynomial::new(2, [(0, Rational::one()), (1, Rational::one())]);
        assert!(!initial_data_check(&g2_bad, &q).unwrap());
        let g1 = InitialDataPolynomial::new(1, [(0, Rational::one()), (1, Rational::zero())]);
        assert!(initial_data_check(&g1, &q).unwrap());
        assert_eq!(initial_data_degree_bound(&q, 0), -1);
        assert_eq!(
            initial_data_check(&g1, &pair(3, 4)),
            Err(LefschetzError::NotCalabiYau3)
        );
    }

    #[test]
    fn plans() {
        let q = PairGeometry::quintic();
        let p = recursion_plan(&q, 1, 1).unwrap();
        assert_eq!((p.lambda_exponent, p.leading_sign), (-5, 1));
        assert_eq!(recursion_plan(&q, 0, 0).unwrap().lambda_exponent, -2);
        let p = recursion_plan(&q, 2, 1).unwrap();
        assert_eq!((p.lambda_exponent, p.leading_sign), (-3, -1));
        assert_eq!(p.lower_terms.len(), 5);
        assert!(matches!(
            recursion_plan(&q, 3, 0),
            Err(LefschetzError::NoRecursion(-4))
        ));
    }
}
