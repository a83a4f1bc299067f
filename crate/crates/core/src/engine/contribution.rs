//! Contribution of a single localization graph.
//!
//! Every factor is a Laurent series in λ expanded at λ = 0 with the torus
//! weights specialized to rationals. Inverses are expanded to a working
//! order; if the product is not known far enough the whole graph is
//! recomputed with a larger working order.

use super::descriptor::{InsertionDescriptor, SpaceDescriptor, TwistEntry, TwistSign};
use super::EngineError;
use crate::algebra::{LaurentSeries, Rational};
use crate::graphs::{LocGraph, VertexKind};
use crate::hodge::HodgeTable;

const MAX_REFINEMENTS: usize = 8;

/// Elementary symmetric functions e_0..e_N of the tangent weights at `i`.
pub(crate) fn tangent_chern_all(space: &SpaceDescriptor, i: usize) -> Vec<Rational> {
    let a = space.alpha(i);
    let mut e = vec![Rational::one()];
    for j in 0..=space.target_dim {
        if j == i {
            continue;
        }
        let w = a - space.alpha(j);
        e.push(Rational::zero());
        for k in (1..e.len()).rev() {
            let add = &e[k - 1] * &w;
            e[k] += &add;
        }
    }
    e
}

/// c_k(TP^N) at fixed point `i`: the k-th elementary symmetric function of
/// the weights α_i − α_j, j ≠ i.
pub fn tangent_chern_at_fixed_point(
    space: &SpaceDescriptor,
    fixed_point: usize,
    k: usize,
) -> Result<Rational, EngineError> {
    if fixed_point > space.target_dim || k > space.target_dim {
        return Err(EngineError::InvalidInput(format!(
            "need 0 <= i, k <= {}, got i = {fixed_point}, k = {k}",
            space.target_dim
        )));
    }
    Ok(tangent_chern_all(space, fixed_point).swap_remove(k))
}

fn non_generic(what: &str) -> EngineError {
    EngineError::NonGenericWeights(what.to_string())
}

fn factorial(n: u64) -> Rational {
    Rational::from_integer((1..=n as i64).product())
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut r = Rational::one();
    for i in 0..k {
        r = r * Rational::from_integer((n - i) as i64) / Rational::from_integer((i + 1) as i64);
    }
    r
}

fn invert(s: &LaurentSeries, order: i64, what: &str) -> Result<LaurentSeries, EngineError> {
    s.invert(order).map_err(|_| non_generic(what))
}

/// Everything needed to evaluate graphs of one invariant at fixed weights.
pub struct GraphEvaluator<'a> {
    pub space: &'a SpaceDescriptor,
    pub twists: &'a [TwistEntry],
    pub insertions: &'a [InsertionDescriptor],
    pub hodge: &'a HodgeTable,
    chern: Vec<Vec<Rational>>,
    margin: i64,
}

impl<'a> GraphEvaluator<'a> {
    pub fn new(
        space: &'a SpaceDescriptor,
        twists: &'a [TwistEntry],
        insertions: &'a [InsertionDescriptor],
        hodge: &'a HodgeTable,
        margin: u32,
    ) -> Self {
        let chern = (0..=space.target_dim)
            .map(|i| tangent_chern_all(space, i))
            .collect();
        GraphEvaluator {
            space,
            twists,
            insertions,
            hodge,
            chern,
            margin: margin as i64,
        }
    }

    /// The graph's contribution, known at least through λ^through.
    pub fn contribution(&self, graph: &LocGraph, through: i64) -> Result<LaurentSeries, EngineError> {
        let kernel_depth: i64 = self
            .insertions
            .iter()
            .filter_map(|i| i.kernel.as_ref())
            .map(|k| k.expansion_order as i64 + 1)
            .sum();
        let mut work = through + kernel_depth + self.margin;
        for _ in 0..MAX_REFINEMENTS {
            let s = self.evaluate(graph, work, through)?;
            match s.truncation_order() {
                Some(t) if t < through => work += through - t + 1,
                _ => return Ok(s),
            }
        }
        Err(EngineError::InvalidInput(format!(
            "working order did not converge for target λ^{through}"
        )))
    }

    fn twist_weight(&self, tw: &TwistEntry, i: usize) -> LaurentSeries {
        LaurentSeries::linear(
            Rational::from_integer(tw.bundle_degree) * self.space.alpha(i),
            Rational::from_integer(tw.lambda_multiplier),
        )
    }

    fn power(&self, s: &LaurentSeries, e: i64, work: i64) -> Result<LaurentSeries, EngineError> {
        if e >= 0 {
            Ok(s.pow(e as u32))
        } else {
            invert(
                &s.pow((-e) as u32),
                work,
                "twist weight vanishes at a fixed point",
            )
        }
    }

    fn evaluate(&self, graph: &LocGraph, work: i64, through: i64) -> Result<LaurentSeries, EngineError> {
        let n = self.space.target_dim;
        let alpha = |v: usize| self.space.alpha(graph.vertices[v].fixed_point);
        let mut scalar = Rational::one();
        let mut factors: Vec<LaurentSeries> = Vec::new();

        // flag weights ω_F per vertex
        let mut flags: Vec<Vec<Rational>> = vec![Vec::new(); graph.vertices.len()];

        for e in &graph.edges {
            let (u, v) = e.ends;
            let d = e.degree as i64;
            let dq = Rational::from_integer(d);
            let (ai, aj) = (alpha(u), alpha(v));
            let w = ai - aj;
            let om = &w / &dq;
            flags[u].push(om.clone());
            flags[v].push(-&om);

            let sign = if d % 2 == 0 { 1 } else { -1 };
            let fd = factorial(d as u64);
            let mut h0 = Rational::from_integer(sign) * &fd * &fd
                / Rational::from_integer(d).pow(2 * d as i32).expect("d > 0")
                * w.pow(2 * d as i32).expect("nonnegative");
            let (i, j) = (graph.vertices[u].fixed_point, graph.vertices[v].fixed_point);
            for k in 0..=n {
                if k == i || k == j {
                    continue;
                }
                for a in 0..=d {
                    let p = (Rational::from_integer(a) * ai + Rational::from_integer(d - a) * aj) / &dq
                        - self.space.alpha(k);
                    h0 *= &p;
                }
            }
            if h0.is_zero() {
                return Err(non_generic("edge normal weight vanishes"));
            }
            scalar = scalar / (h0 * &dq);

            for tw in self.twists {
                let ci = self.twist_weight(tw, i);
                let kd = tw.bundle_degree * d;
                let mut h0 = LaurentSeries::one();
                let mut h1 = LaurentSeries::one();
                if kd >= 0 {
                    for a in 0..=kd {
                        let f = ci.sub(&LaurentSeries::constant(Rational::from_integer(a) * &om));
                        if f.is_zero() {
                            return Err(non_generic("twist weight vanishes on an edge"));
                        }
                        h0 = h0.mul(&f);
                    }
                } else {
                    for a in 1..-kd {
                        let f = ci.add(&LaurentSeries::constant(Rational::from_integer(a) * &om));
                        if f.is_zero() {
                            return Err(non_generic("twist weight vanishes on an edge"));
                        }
                        h1 = h1.mul(&f);
                    }
                }
                let (top, bottom) = match tw.sign {
                    TwistSign::Plus => (h0, h1),
                    TwistSign::Minus => (h1, h0),
                };
                factors.push(top);
                if bottom != LaurentSeries::one() {
                    factors.push(invert(&bottom, work, "twist weight vanishes on an edge")?);
                }
            }
        }

        for (v, vert) in graph.vertices.iter().enumerate() {
            let i = vert.fixed_point;
            let a = self.space.alpha(i);
            let chern = &self.chern[i];
            let e_top = &chern[n];
            let fl = &flags[v];
            match graph.kind(v) {
                VertexKind::UnmarkedLeaf => scalar *= &fl[0],
                VertexKind::MarkedLeaf => {
                    let ins = &self.insertions[vert.markings[0]];
                    factors.push(self.insertion_at_point(ins, a, chern, &-&fl[0]));
                }
                VertexKind::Bridge => {
                    let s = &fl[0] + &fl[1];
                    if s.is_zero() {
                        return Err(non_generic("flag weights cancel at a node"));
                    }
                    scalar = scalar * e_top / s;
                    for tw in self.twists {
                        let c = self.twist_weight(tw, i);
                        factors.push(self.power(&c, -tw.sign.exponent(), work)?);
                    }
                }
                VertexKind::Stable => {
                    factors.push(self.stable_vertex(graph, v, &fl[..], work)?);
                }
            }
        }

        scalar = scalar / Rational::from_integer(graph.automorphism_order as i64);
        if scalar.is_zero() {
            return Ok(LaurentSeries::zero());
        }
        Ok(product_through(&factors, through).scale(&scalar))
    }

    // Insertion at a marking sitting on an edge component, ψ = `psi`.
    fn insertion_at_point(
        &self,
        ins: &InsertionDescriptor,
        a: &Rational,
        chern: &[Rational],
        psi: &Rational,
    ) -> LaurentSeries {
        let value = ins.class.evaluate(a, chern) * psi.pow(ins.psi_power as i32).expect("nonnegative");
        match &ins.kernel {
            None => LaurentSeries::constant(value),
            Some(k) => {
                let shift = &k.h_coeff * a + psi;
                LaurentSeries::inverse_linear_at_infinity(&shift, k.expansion_order).scale(&value)
            }
        }
    }

    // Coefficients of ψ^0..ψ^max of an insertion at a stable vertex.
    fn insertion_psi_series(
        &self,
        ins: &InsertionDescriptor,
        a: &Rational,
        chern: &[Rational],
        max: usize,
    ) -> Vec<LaurentSeries> {
        let value = ins.class.evaluate(a, chern);
        let p = ins.psi_power as usize;
        let mut out = vec![LaurentSeries::zero(); max + 1];
        match &ins.kernel {
            None => {
                if p <= max {
                    out[p] = LaurentSeries::constant(value);
                }
            }
            Some(k) => {
                let ca = &k.h_coeff * a;
                for kk in 0..=k.expansion_order {
                    for j in 0..=kk {
                        if p + j as usize > max {
                            break;
                        }
                        let c = binomial(kk, j) * ca.pow((kk - j) as i32).expect("nonnegative") * &value;
                        out[p + j as usize] =
                            out[p + j as usize].add(&LaurentSeries::monomial(c, -(kk as i64) - 1));
                    }
                }
            }
        }
        out
    }

    fn stable_vertex(
        &self,
        graph: &LocGraph,
        v: usize,
        flags: &[Rational],
        work: i64,
    ) -> Result<LaurentSeries, EngineError> {
        let n = self.space.target_dim;
        let vert = &graph.vertices[v];
        let i = vert.fixed_point;
        let a = self.space.alpha(i);
        let chern = &self.chern[i];
        let val = flags.len();
        let npts = val + vert.markings.len();
        let genus = vert.genus;
        let dim = if genus == 0 { npts - 3 } else { npts };

        let mut pts: Vec<Vec<LaurentSeries>> = Vec::with_capacity(npts);
        for om in flags {
            let inv = om.recip().map_err(|_| non_generic("zero flag weight"))?;
            let mut col = Vec::with_capacity(dim + 1);
            let mut p = inv.clone();
            for _ in 0..=dim {
                col.push(LaurentSeries::constant(p.clone()));
                p = &p * &inv;
            }
            pts.push(col);
        }
        for &m in &vert.markings {
            pts.push(self.insertion_psi_series(&self.insertions[m], a, chern, dim));
        }

        let mut glob = LaurentSeries::constant(
            chern[n]
                .pow(val as i32 - 1)
                .map_err(|_| non_generic("e(T) vanishes"))?,
        );
        // λ₁-linear factor [constant, λ₁-coefficient]
        let mut l1 = if genus == 1 {
            [
                LaurentSeries::constant(chern[n].clone()),
                LaurentSeries::constant(-&chern[n - 1]),
            ]
        } else {
            [LaurentSeries::one(), LaurentSeries::zero()]
        };
        for tw in self.twists {
            let c = self.twist_weight(tw, i);
            glob = glob.mul(&self.power(&c, (1 - val as i64) * tw.sign.exponent(), work)?);
            if genus == 1 {
                // (c − λ₁)^{−ε} mod λ₁²
                let fac = match tw.sign {
                    TwistSign::Minus => [c.clone(), LaurentSeries::constant(-Rational::one())],
                    TwistSign::Plus => {
                        let inv = invert(&c, work, "twist weight vanishes at a fixed point")?;
                        let inv2 = inv.mul(&inv);
                        [inv, inv2]
                    }
                };
                l1 = [l1[0].mul(&fac[0]), l1[0].mul(&fac[1]).add(&l1[1].mul(&fac[0]))];
            }
        }

        let mut total = LaurentSeries::zero();
        for b in 0..=(genus as usize).min(dim) {
            let mut exps = vec![0u32; npts];
            let mut inner = LaurentSeries::zero();
            for_each_composition(dim - b, npts, &mut exps, 0, &mut |exps| {
                let h = self.hodge.integral(genus, exps, b as u32)?;
                if h.is_zero() {
                    return Ok(());
                }
                let mut t = LaurentSeries::constant(h);
                for (p, &e) in exps.iter().enumerate() {
                    t = t.mul(&pts[p][e as usize]);
                    if t.is_zero() && t.is_exact() {
                        return Ok(());
                    }
                }
                inner = inner.add(&t);
                Ok(())
            })?;
            total = total.add(&l1[b].mul(&inner));
        }
        Ok(glob.mul(&total))
    }
}

fn for_each_composition(
    total: usize,
    parts: usize,
    cur: &mut Vec<u32>,
    idx: usize,
    f: &mut dyn FnMut(&[u32]) -> Result<(), EngineError>,
) -> Result<(), EngineError> {
    if idx + 1 == parts {
        cur[idx] = total as u32;
        return f(cur);
    }
    for x in 0..=total {
        cur[idx] = x as u32;
        for_each_composition(total - x, parts, cur, idx + 1, f)?;
    }
    Ok(())
}

/// Product of `factors`, dropping everything that cannot reach λ^through.
pub(crate) fn product_through(factors: &[LaurentSeries], through: i64) -> LaurentSeries {
    let mut bounds = Vec::with_capacity(factors.len());
    for f in factors {
        match f.valuation_bound() {
            Some(v) => bounds.push(v),
            None => return LaurentSeries::zero(),
        }
    }
    let mut suffix = vec![0i64; factors.len() + 1];
    for k in (0..factors.len()).rev() {
        suffix[k] = suffix[k + 1] + bounds[k];
    }
    let mut acc = LaurentSeries::one();
    for (k, f) in factors.iter().enumerate() {
        acc = acc.mul(f).truncate(through - suffix[k + 1]);
    }
    acc
}
