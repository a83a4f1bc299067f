//! Genus-0 no-insertion twisted invariants from the hypergeometric I-function.
//!
//! Used as an oracle independent of graph sums. For a complete
//! intersection of index ι = N+1−Σk the no-insertion invariant is nonzero
//! only when d·ι = r − N + 3 (r twists). Calabi-Yau threefolds (ι = 0) go
//! through the Yukawa coupling and the mirror map; Fano cases read
//! ⟨H⟩_{0,1,d} = d⟨⟩_{0,0,d} off the J-function, which equals I for ι ≥ 2
//! and e^{−c q/ħ} I for ι = 1.

use super::EngineError;
use crate::algebra::Rational;

type Series = Vec<Rational>;

fn zeros(n: usize) -> Series {
    vec![Rational::zero(); n]
}

fn mul(a: &Series, b: &Series) -> Series {
    let n = a.len();
    let mut out = zeros(n);
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += &(x * y);
        }
    }
    out
}

fn inv(a: &Series) -> Series {
    let n = a.len();
    let lead = a[0].recip().expect("unit constant term");
    let mut out = zeros(n);
    out[0] = lead.clone();
    for k in 1..n {
        let mut acc = Rational::zero();
        for j in 1..=k {
            acc += &(&a[j] * &out[k - j]);
        }
        out[k] = -(acc * &lead);
    }
    out
}

// exp of a series with zero constant term
fn exp(t: &Series) -> Series {
    let n = t.len();
    let mut e = zeros(n);
    e[0] = Rational::one();
    for m in 1..n {
        let mut acc = Rational::zero();
        for k in 1..=m {
            acc += &(Rational::from_integer(k as i64) * &t[k] * &e[m - k]);
        }
        e[m] = acc / Rational::from_integer(m as i64);
    }
    e
}

// f(g(Q)) for g with zero constant term
fn compose(f: &Series, g: &Series) -> Series {
    let n = f.len();
    let mut out = zeros(n);
    for c in f.iter().rev() {
        out = mul(&out, g);
        out[0] += c;
    }
    out
}

fn harmonic(n: i64) -> Rational {
    (1..=n).map(|k| Rational::new(1, k).expect("k > 0")).sum()
}

fn factorial(n: i64) -> Rational {
    (1..=n).map(Rational::from_integer).product()
}

/// Genus-0 degree-`d` no-insertion invariant of the complete intersection
/// cut out by `twist_degrees` in P^N, i.e. of the twist by ⊕O(k_j).
pub fn hypergeom_genus0_oracle(
    target_dim: usize,
    twist_degrees: &[u32],
    d: u32,
) -> Result<Rational, EngineError> {
    let unsupported = |why: String| Err(EngineError::UnsupportedOracle(why));
    if d == 0 || target_dim == 0 {
        return unsupported("need N >= 1 and d >= 1".into());
    }
    if twist_degrees.contains(&0) {
        return unsupported("twist degrees must be positive".into());
    }
    let n = target_dim as i64;
    let sum_k: i64 = twist_degrees.iter().map(|&k| k as i64).sum();
    if sum_k > n + 1 {
        return unsupported(format!("non-convex twist: Σk = {sum_k} > N+1 = {}", n + 1));
    }
    let vdim = n - 3 + d as i64 * (n + 1);
    let integrand = twist_degrees
        .iter()
        .map(|&k| k as i64 * d as i64 + 1)
        .sum::<i64>();
    if vdim != integrand {
        return Ok(Rational::zero());
    }
    if sum_k < n + 1 {
        return Ok(fano_invariant(target_dim, twist_degrees, d));
    }
    // Calabi-Yau threefold: Σk = N+1 and N−3 twists
    let len = d as usize + 1;
    let mut i0 = zeros(len);
    let mut i1 = zeros(len);
    for m in 0..len as i64 {
        let mut c = Rational::one();
        let mut h = Rational::zero();
        for &k in twist_degrees {
            let k = k as i64;
            c = c * factorial(k * m);
            h = h + Rational::from_integer(k) * harmonic(k * m);
        }
        c = c / factorial(m).pow(n as i32 + 1).expect("nonnegative");
        h = h - Rational::from_integer(n + 1) * harmonic(m);
        i1[m as usize] = &c * &h;
        i0[m as usize] = c;
    }
    let t = mul(&i1, &inv(&i0));
    let mut theta_t = t.clone();
    for (m, c) in theta_t.iter_mut().enumerate() {
        *c = &*c * &Rational::from_integer(m as i64);
    }
    let mut dt = theta_t;
    dt[0] += &Rational::one();
    let kappa: Rational = twist_degrees
        .iter()
        .map(|&k| Rational::from_integer(k as i64))
        .product();
    let big_c: Rational = twist_degrees
        .iter()
        .map(|&k| {
            Rational::from_integer(k as i64)
                .pow(k as i32)
                .expect("nonnegative")
        })
        .product();
    let mut disc = zeros(len);
    disc[0] = Rational::one();
    if len > 1 {
        disc[1] = -big_c;
    }
    let denom = mul(&mul(&disc, &mul(&i0, &i0)), &mul(&dt, &mul(&dt, &dt)));
    let yukawa_q: Series = inv(&denom).into_iter().map(|c| c * &kappa).collect();

    // invert the mirror map Q = q exp(t(q))
    let mut q_of_big_q = zeros(len);
    if len > 1 {
        q_of_big_q[1] = Rational::one();
    }
    for _ in 0..len {
        let e = exp(&compose(&t, &q_of_big_q).iter().map(|c| -c).collect::<Series>());
        let mut next = zeros(len);
        for m in 1..len {
            next[m] = e[m - 1].clone();
        }
        q_of_big_q = next;
    }
    let yukawa = compose(&yukawa_q, &q_of_big_q);
    let d3 = Rational::from_integer((d as i64).pow(3));
    Ok(&yukawa[d as usize] / &d3)
}

// Coefficients of H^0..H^top of I_d at ħ = 1.
fn i_coefficient(target_dim: usize, twist_degrees: &[u32], d: u32, top: usize) -> Series {
    let len = top + 1;
    let linear = |a: i64, b: i64| {
        let mut s = zeros(len);
        s[0] = Rational::from_integer(b);
        if len > 1 {
            s[1] = Rational::from_integer(a);
        }
        s
    };
    let mut num = zeros(len);
    num[0] = Rational::one();
    for &k in twist_degrees {
        for m in 1..=(k * d) as i64 {
            num = mul(&num, &linear(k as i64, m));
        }
    }
    let mut den = zeros(len);
    den[0] = Rational::one();
    for m in 1..=d as i64 {
        for _ in 0..=target_dim {
            den = mul(&den, &linear(1, m));
        }
    }
    mul(&num, &inv(&den))
}

fn fano_invariant(target_dim: usize, twist_degrees: &[u32], d: u32) -> Rational {
    let n = target_dim as i64;
    let r = twist_degrees.len() as i64;
    let index = n + 1 - twist_degrees.iter().map(|&k| k as i64).sum::<i64>();
    // ⟨H⟩ pairs with H^{N−r−1}/κ
    let a = n - r - 1;
    if a < 0 {
        return Rational::zero();
    }
    let a = a as usize;
    let kappa: Rational = twist_degrees
        .iter()
        .map(|&k| Rational::from_integer(k as i64))
        .product();
    let mut coeff = i_coefficient(target_dim, twist_degrees, d, a)[a].clone();
    if index == 1 {
        // J_d = Σ_j (−c)^j/j! I_{d−j}, c = ∏ k!
        let c: Rational = twist_degrees.iter().map(|&k| factorial(k as i64)).product();
        coeff = Rational::zero();
        let mut weight = Rational::one();
        for j in 0..=d {
            let term = if j == d {
                let mut s = zeros(a + 1);
                s[0] = Rational::one();
                s
            } else {
                i_coefficient(target_dim, twist_degrees, d - j, a)
            };
            coeff += &(&weight * &term[a]);
            weight = -(&weight * &c) / Rational::from_integer(j as i64 + 1);
        }
    }
    kappa * coeff / Rational::from_integer(d as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_lines_and_conics() {
        assert_eq!(
            hypergeom_genus0_oracle(4, &[5], 1).unwrap(),
            Rational::from_integer(2875)
        );
        assert_eq!(
            hypergeom_genus0_oracle(4, &[5], 2).unwrap(),
            Rational::new(4876875, 8).unwrap()
        );
        // 317206375 lines-of-degree-3 count plus multiple cover 2875/27
        let expected = Rational::from_integer(317206375) + Rational::new(2875, 27).unwrap();
        assert_eq!(hypergeom_genus0_oracle(4, &[5], 3).unwrap(), expected);
    }

    #[test]
    fn other_complete_intersections() {
        // (3,3) in P^5 and (2,4) in P^5: degree-1 counts 1053 and 1280
        assert_eq!(
            hypergeom_genus0_oracle(5, &[3, 3], 1).unwrap(),
            Rational::from_integer(1053)
        );
        assert_eq!(
            hypergeom_genus0_oracle(5, &[2, 4], 1).unwrap(),
            Rational::from_integer(1280)
        );
    }

    #[test]
    fn fano_cases() {
        // a hyperplane line in P^2, a line in P^3 cut by two hyperplanes,
        // and a conic in P^2 (a line of the conic is degree 2 in P^2)
        assert_eq!(hypergeom_genus0_oracle(2, &[1], 1).unwrap(), Rational::one());
        assert_eq!(hypergeom_genus0_oracle(3, &[1, 1], 1).unwrap(), Rational::one());
        assert_eq!(hypergeom_genus0_oracle(2, &[2], 2).unwrap(), Rational::one());
        assert_eq!(hypergeom_genus0_oracle(2, &[2], 1).unwrap(), Rational::zero());
    }

    #[test]
    fn dimension_forced_cases() {
        assert_eq!(hypergeom_genus0_oracle(1, &[], 1).unwrap(), Rational::one());
        assert_eq!(hypergeom_genus0_oracle(1, &[], 2).unwrap(), Rational::zero());
        assert_eq!(hypergeom_genus0_oracle(3, &[4], 1).unwrap(), Rational::zero());
        assert_eq!(hypergeom_genus0_oracle(2, &[3], 2).unwrap(), Rational::zero());
        assert!(hypergeom_genus0_oracle(4, &[6], 1).is_err());
        assert!(hypergeom_genus0_oracle(4, &[5], 0).is_err());
    }
}
