//! Genus-1 / genus-0 relations for twisted invariants of P^N, assembled
//! from independent engine queries and compared exactly.
//!
//! With the kernel 1/(λ − D − ψ) and the twist by O(−D) (fiber weight 1):
//!
//! * `rel1`: ⟨1/(λ−D−ψ)⟩_{1,1,β} = −1/(24λ²)⟨D·c_{N−1}/(λ−D−ψ)⟩_{0,1,β} − 1/(24λ)⟨c_{N−1}/(λ−D−ψ)⟩_{0,1,β}
//! * `rel2`: ⟨D/(λ−D−ψ)⟩_{1,1,β} = −1/(24λ)⟨D·c_{N−1}/(λ−D−ψ)⟩_{0,1,β} − 1/24⟨D·c_{N−2}/(λ−D−ψ)⟩_{0,1,β}
//! * `fano`: D = −K_X on a Fano threefold, with K_X² in place of D·c_{N−2}.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{LaurentSeries, Rational};
use crate::engine::{InsertionClass, InsertionDescriptor, InvariantDescriptor, TwistEntry, TwistSign};
use crate::{Engine, EngineError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RelationError {
    #[error("preconditions fail for {0}")]
    Preconditions(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationId {
    #[serde(rename = "rel1")]
    Rel1,
    #[serde(rename = "rel2")]
    Rel2,
    #[serde(rename = "fano")]
    Fano,
}

impl RelationId {
    pub const ALL: [RelationId; 3] = [RelationId::Rel1, RelationId::Rel2, RelationId::Fano];

    pub fn as_str(self) -> &'static str {
        match self {
            RelationId::Rel1 => "rel1",
            RelationId::Rel2 => "rel2",
            RelationId::Fano => "fano",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationId::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown relation {s:?} (expected rel1, rel2 or fano)"))
    }
}

/// A relation on X = P^N with D of degree `d_degree` and β of degree `beta_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationCase {
    pub relation: RelationId,
    #[serde(rename = "N")]
    pub ambient_dim: usize,
    pub d_degree: u32,
    pub beta_degree: u32,
}

impl RelationCase {
    pub fn new(relation: RelationId, ambient_dim: usize, d_degree: u32, beta_degree: u32) -> Self {
        RelationCase {
            relation,
            ambient_dim,
            d_degree,
            beta_degree,
        }
    }

    /// The Fano case on P^3 with D = −K = O(4).
    pub fn fano_p3(beta_degree: u32) -> Self {
        Self::new(RelationId::Fano, 3, 4, beta_degree)
    }
}

impl fmt::Display for RelationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} on P{} (D = {}H, beta = {})",
            self.relation, self.ambient_dim, self.d_degree, self.beta_degree
        )
    }
}

pub fn check_preconditions(case: &RelationCase) -> bool {
    let n = case.ambient_dim as i64;
    if case.beta_degree == 0 || case.ambient_dim < 2 {
        return false;
    }
    match case.relation {
        // (γ, D) > 1 for all nonzero effective γ, and (β, c_1 − D) + 1 > 0
        RelationId::Rel1 | RelationId::Rel2 => {
            case.d_degree > 1 && case.beta_degree as i64 * (n + 1 - case.d_degree as i64) + 1 > 0
        }
        RelationId::Fano => case.ambient_dim == 3 && case.d_degree as i64 == n + 1,
    }
}

/// One side's single query and its coefficient, a monomial in λ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationTerm {
    pub descriptor: InvariantDescriptor,
    pub coefficient: LaurentSeries,
    pub value: LaurentSeries,
    pub graph_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelationOutcome {
    pub case: RelationCase,
    pub lhs: LaurentSeries,
    pub rhs: LaurentSeries,
    pub lhs_range: Option<(i64, i64)>,
    pub rhs_range: Option<(i64, i64)>,
    pub equal: bool,
    pub terms: Vec<RelationTerm>,
    pub kernel_order: u32,
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p, d).expect("nonzero denominator")
}

fn chern_class(index: usize) -> InsertionClass {
    if index == 0 {
        InsertionClass::one()
    } else {
        InsertionClass::monomial(Rational::one(), 0, vec![index as u32])
    }
}

fn range(s: &LaurentSeries) -> Option<(i64, i64)> {
    Some((s.valuation()?, s.degree()?))
}

/// The queries of a relation: the LHS first, then (coefficient, query) on the RHS.
fn queries(case: &RelationCase, order: u32) -> Vec<(LaurentSeries, InvariantDescriptor)> {
    let n = case.ambient_dim;
    let dd = case.d_degree as i64;
    let twist = vec![TwistEntry::new(-dd, 1, TwistSign::Minus)];
    let kernel = |class: InsertionClass| InsertionDescriptor::with_kernel(class, q(dd, 1), order);
    let desc = |genus: u8, class: InsertionClass| {
        InvariantDescriptor::new(n, twist.clone(), genus, case.beta_degree, vec![kernel(class)])
    };
    let d_class = InsertionClass::hyperplane_power(q(dd, 1), 1);
    let m24 = |exp: i64| LaurentSeries::monomial(q(-1, 24), exp);
    let one = LaurentSeries::one();
    match case.relation {
        RelationId::Rel1 => vec![
            (one, desc(1, InsertionClass::one())),
            (m24(-2), desc(0, d_class.mul(&chern_class(n - 1)))),
            (m24(-1), desc(0, chern_class(n - 1))),
        ],
        RelationId::Rel2 => vec![
            (one, desc(1, d_class.clone())),
            (m24(-1), desc(0, d_class.mul(&chern_class(n - 1)))),
            (m24(0), desc(0, d_class.mul(&chern_class(n - 2)))),
        ],
        RelationId::Fano => vec![
            (one, desc(1, d_class.clone())),
            (m24(-1), desc(0, d_class.mul(&chern_class(2)))),
            (m24(0), desc(0, d_class.mul(&d_class))),
        ],
    }
}

/// Smallest kernel order that no query truncates: the largest virtual dimension.
pub fn default_kernel_order(case: &RelationCase) -> u32 {
    queries(case, 0)
        .iter()
        .map(|(_, d)| d.vdim().max(0) as u32)
        .max()
        .unwrap_or(0)
}

pub fn check_relation(engine: &Engine, case: &RelationCase) -> Result<RelationOutcome, RelationError> {
    check_relation_with_order(engine, case, default_kernel_order(case))
}

/// As [`check_relation`] with an explicit kernel expansion order; an order
/// below some query's virtual dimension is an error, never a comparison.
pub fn check_relation_with_order(
    engine: &Engine,
    case: &RelationCase,
    kernel_order: u32,
) -> Result<RelationOutcome, RelationError> {
    if !check_preconditions(case) {
        return Err(RelationError::Preconditions(case.to_string()));
    }
    let qs = queries(case, kernel_order);
    for (_, desc) in &qs {
        engine.validate(desc)?;
    }
    let mut terms = Vec::with_capacity(qs.len());
    for (coefficient, descriptor) in qs {
        let eval = engine.evaluate(&descriptor)?;
        terms.push(RelationTerm {
            descriptor,
            coefficient,
            value: eval.value,
            graph_count: eval.graph_count,
        });
    }
    let lhs = terms[0].coefficient.mul(&terms[0].value);
    let rhs = terms[1..].iter().fold(LaurentSeries::zero(), |acc, t| {
        acc.add(&t.coefficient.mul(&t.value))
    });
    let (lhs_range, rhs_range) = (range(&lhs), range(&rhs));
    let equal = lhs_range == rhs_range && lhs == rhs;
    Ok(RelationOutcome {
        case: *case,
        lhs,
        rhs,
        lhs_range,
        rhs_range,
        equal,
        terms,
        kernel_order,
    })
}

fn series_json(s: &LaurentSeries) -> serde_json::Value {
    serde_json::Value::Object(
        s.terms()
            .into_iter()
            .map(|(e, c)| (e.to_string(), serde_json::Value::String(c.to_string())))
            .collect(),
    )
}

/// Per-case JSON records, computed in parallel, in input order.
pub fn relation_report(engine: &Engine, cases: &[RelationCase]) -> Vec<serde_json::Value> {
    cases
        .par_iter()
        .map(|case| {
            let start = Instant::now();
            let pre = check_preconditions(case);
            let mut rec = serde_json::json!({
                "case": case,
                "preconditions": pre,
            });
            match check_relation(engine, case) {
                Ok(out) => {
                    rec["lhs"] = series_json(&out.lhs);
                    rec["rhs"] = series_json(&out.rhs);
                    rec["lhs_range"] = serde_json::json!(out.lhs_range);
                    rec["rhs_range"] = serde_json::json!(out.rhs_range);
                    rec["equal"] = serde_json::json!(out.equal);
                    rec["kernel_order"] = serde_json::json!(out.kernel_order);
                    rec["graph_counts"] =
                        serde_json::json!(out.terms.iter().map(|t| t.graph_count).collect::<Vec<_>>());
                }
                Err(e) => {
                    rec["equal"] = serde_json::json!(false);
                    rec["error"] = serde_json::json!(e.to_string());
                }
            }
            rec["seconds"] = serde_json::json!(start.elapsed().as_secs_f64());
            rec
        })
        .collect()
}

/// True iff every record of a report reports equality.
pub fn report_passes(report: &[serde_json::Value]) -> bool {
    report.iter().all(|r| r["equal"] == serde_json::Value::Bool(true))
}
