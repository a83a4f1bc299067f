//! Invariant descriptors and their canonical serialization.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EngineError;
use crate::algebra::{Rational, WeightVector};

/// Target P^N together with the torus weights used for a computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpaceDescriptor {
    pub target_dim: usize,
    pub weights: WeightVector,
}

impl SpaceDescriptor {
    pub fn new(target_dim: usize, weights: WeightVector) -> Result<Self, EngineError> {
        if target_dim < 1 {
            return Err(EngineError::InvalidInput(
                "target dimension must be at least 1".into(),
            ));
        }
        if weights.len() != target_dim + 1 {
            return Err(EngineError::InvalidInput(format!(
                "P^{target_dim} needs {} weights, got {}",
                target_dim + 1,
                weights.len()
            )));
        }
        Ok(SpaceDescriptor { target_dim, weights })
    }

    pub fn with_seed(target_dim: usize, seed: u64) -> Result<Self, EngineError> {
        Self::new(target_dim, WeightVector::draw(target_dim + 1, seed))
    }

    /// H restricted to fixed point `i`.
    pub fn alpha(&self, i: usize) -> &Rational {
        self.weights.get(i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwistSign {
    /// Euler class e(Rπ_* E).
    Plus,
    /// Inverse Euler class e(Rπ_* E)^{-1}.
    Minus,
}

impl TwistSign {
    pub fn exponent(self) -> i64 {
        match self {
            TwistSign::Plus => 1,
            TwistSign::Minus => -1,
        }
    }
}

impl Serialize for TwistSign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            TwistSign::Plus => "+",
            TwistSign::Minus => "-",
        })
    }
}

impl<'de> Deserialize<'de> for TwistSign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match String::deserialize(d)?.as_str() {
            "+" => Ok(TwistSign::Plus),
            "-" => Ok(TwistSign::Minus),
            other => Err(serde::de::Error::custom(format!("bad twist sign {other:?}"))),
        }
    }
}

/// The line bundle O(k) with fiber weight mλ, entering as e(Rπ_*)^{±1}.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TwistEntry {
    #[serde(rename = "k")]
    pub bundle_degree: i64,
    #[serde(rename = "m")]
    pub lambda_multiplier: i64,
    pub sign: TwistSign,
}

impl TwistEntry {
    pub fn new(bundle_degree: i64, lambda_multiplier: i64, sign: TwistSign) -> Self {
        TwistEntry {
            bundle_degree,
            lambda_multiplier,
            sign,
        }
    }

    /// Rank of Rπ_*O(k) on a genus-g degree-d family.
    pub fn rank(&self, genus: u8, degree: u32) -> i64 {
        self.bundle_degree * degree as i64 + 1 - genus as i64
    }

    /// λ-homogeneous degree of the twisting class.
    pub fn class_degree(&self, genus: u8, degree: u32) -> i64 {
        self.sign.exponent() * self.rank(genus, degree)
    }
}

impl FromStr for TwistEntry {
    type Err = EngineError;

    /// `k:m[:euler|inverse]`; the sign defaults to euler for k ≥ 0 and
    /// inverse for k < 0.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EngineError::Parse(format!("twist {s:?}: expected k:m[:euler|inverse]"));
        let parts: Vec<&str> = s.trim().split(':').map(str::trim).collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(bad());
        }
        let k: i64 = parts[0].parse().map_err(|_| bad())?;
        let m: i64 = parts[1].trim_start_matches('+').parse().map_err(|_| bad())?;
        let sign = match parts.get(2) {
            None => {
                if k >= 0 {
                    TwistSign::Plus
                } else {
                    TwistSign::Minus
                }
            }
            Some(&"euler") | Some(&"+") => TwistSign::Plus,
            Some(&"inverse") | Some(&"-") => TwistSign::Minus,
            Some(_) => return Err(bad()),
        };
        Ok(TwistEntry::new(k, m, sign))
    }
}

/// `coeff · H^h_power · ∏ c_k`, with the Chern indices sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassTerm {
    pub coeff: Rational,
    pub h_power: u32,
    pub chern: Vec<u32>,
}

impl ClassTerm {
    pub fn degree(&self) -> u32 {
        self.h_power + self.chern.iter().sum::<u32>()
    }

    // by degree, then higher powers of H first
    fn monomial_key(&self) -> (u32, Reverse<u32>, Vec<u32>) {
        (self.degree(), Reverse(self.h_power), self.chern.clone())
    }
}

/// A polynomial in H and the Chern classes c_k(TP^N), with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct InsertionClass {
    terms: Vec<ClassTerm>,
}

impl InsertionClass {
    pub fn from_terms(terms: Vec<ClassTerm>) -> Self {
        let mut merged: BTreeMap<(u32, Reverse<u32>, Vec<u32>), Rational> = BTreeMap::new();
        for mut t in terms {
            t.chern.retain(|&k| k != 0);
            t.chern.sort_unstable();
            *merged.entry(t.monomial_key()).or_default() += &t.coeff;
        }
        InsertionClass {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((_, Reverse(h_power), chern), coeff)| ClassTerm {
                    coeff,
                    h_power,
                    chern,
                })
                .collect(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0, vec![])
    }

    pub fn monomial(coeff: Rational, h_power: u32, chern: Vec<u32>) -> Self {
        Self::from_terms(vec![ClassTerm {
            coeff,
            h_power,
            chern,
        }])
    }

    /// `c · H^a`.
    pub fn hyperplane_power(coeff: Rational, a: u32) -> Self {
        Self::monomial(coeff, a, vec![])
    }

    pub fn terms(&self) -> &[ClassTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_chern_index(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|t| t.chern.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Homogeneous pieces keyed by cohomological degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, InsertionClass> {
        let mut out: BTreeMap<u32, Vec<ClassTerm>> = BTreeMap::new();
        for t in &self.terms {
            out.entry(t.degree()).or_default().push(t.clone());
        }
        out.into_iter()
            .map(|(d, ts)| (d, InsertionClass { terms: ts }))
            .collect()
    }

    pub fn mul(&self, other: &InsertionClass) -> InsertionClass {
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let mut chern = a.chern.clone();
                chern.extend_from_slice(&b.chern);
                out.push(ClassTerm {
                    coeff: &a.coeff * &b.coeff,
                    h_power: a.h_power + b.h_power,
                    chern,
                });
            }
        }
        Self::from_terms(out)
    }

    /// Value at a fixed point where H = `h` and c_k = `chern[k]`.
    pub fn evaluate(&self, h: &Rational, chern: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|t| {
                let mut v = &t.coeff * &h.pow(t.h_power as i32).expect("nonnegative power");
                for &k in &t.chern {
                    v *= &chern[k as usize];
                }
                v
            })
            .sum()
    }
}

fn fmt_coeff(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        c.to_string()
    }
}

impl fmt::Display for InsertionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if t.h_power == 1 {
                factors.push("H".to_string());
            } else if t.h_power > 1 {
                factors.push(format!("H^{}", t.h_power));
            }
            for k in &t.chern {
                factors.push(format!("c{k}"));
            }
            let mag = t.coeff.abs();
            let body = match (mag.is_one(), factors.is_empty()) {
                (true, true) => "1".to_string(),
                (true, false) => factors.join("*"),
                (false, true) => fmt_coeff(&mag),
                (false, false) => format!("{}*{}", fmt_coeff(&mag), factors.join("*")),
            };
            match (i, t.coeff.is_negative()) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for InsertionClass {
    type Err = EngineError;

    /// Sums of products of rationals, `H`, `H^a`, `c<k>`, `c<k>^a`, e.g.
    /// `2*H*c1 - 1/2*H^2 + 1`. Juxtaposition is not multiplication.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| EngineError::Parse(format!("class {s:?}: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        // split into signed terms
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut negative = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && !cur.is_empty() {
                pieces.push((negative, std::mem::take(&mut cur)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                negative = ch == '-';
            } else if ch == '+' || ch == '-' {
                return Err(bad("dangling sign"));
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(bad("dangling sign"));
        }
        pieces.push((negative, cur));

        let mut terms = Vec::new();
        for (neg, piece) in pieces {
            let mut coeff = Rational::one();
            let mut h_power = 0u32;
            let mut chern = Vec::new();
            for factor in piece.split('*') {
                let (base, exp) = match factor.split_once('^') {
                    Some((b, e)) => (b, e.parse::<u32>().map_err(|_| bad("bad exponent"))?),
                    None => (factor, 1),
                };
                if base == "H" {
                    h_power += exp;
                } else if let Some(k) = base.strip_prefix('c') {
                    let k: u32 = k.parse().map_err(|_| bad("bad Chern index"))?;
                    chern.extend(std::iter::repeat_n(k, exp as usize));
                } else {
                    let c: Rational = base.parse().map_err(|_| bad("unknown factor"))?;
                    coeff = &coeff * &c.pow(exp as i32).map_err(|_| bad("bad power"))?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            terms.push(ClassTerm {
                coeff,
                h_power,
                chern,
            });
        }
        Ok(Self::from_terms(terms))
    }
}

impl Serialize for InsertionClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for InsertionClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The kernel 1/(λ − cH − ψ), expanded to `expansion_order` geometric terms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Kernel {
    pub h_coeff: Rational,
    pub expansion_order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InsertionDescriptor {
    pub class: InsertionClass,
    #[serde(rename = "psi")]
    pub psi_power: u32,
    pub kernel: Option<Kernel>,
}

impl InsertionDescriptor {
    pub fn plain(class: InsertionClass) -> Self {
        InsertionDescriptor {
            class,
            psi_power: 0,
            kernel: None,
        }
    }

    pub fn with_kernel(class: InsertionClass, h_coeff: Rational, expansion_order: u32) -> Self {
        InsertionDescriptor {
            class,
            psi_power: 0,
            kernel: Some(Kernel {
                h_coeff,
                expansion_order,
            }),
        }
    }

    /// λ-homogeneous degree when `class` has cohomological degree `class_degree`.
    pub fn degree_with(&self, class_degree: u32) -> i64 {
        class_degree as i64 + self.psi_power as i64 - self.kernel.is_some() as i64
    }
}

impl FromStr for InsertionDescriptor {
    type Err = EngineError;

    /// `<class>[;psi=<p>][;kernel=<c>,<order>]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| EngineError::Parse(format!("insertion {s:?}: {why}"));
        let mut parts = s.split(';');
        let class: InsertionClass = parts.next().unwrap_or("").parse()?;
        let mut ins = InsertionDescriptor::plain(class);
        for p in parts {
            let p = p.trim();
            if let Some(v) = p.strip_prefix("psi=") {
                ins.psi_power = v.trim().parse().map_err(|_| bad("bad psi power"))?;
            } else if let Some(v) = p.strip_prefix("kernel=") {
                let (c, k) = v.split_once(',').ok_or_else(|| bad("kernel needs c,order"))?;
                ins.kernel = Some(Kernel {
                    h_coeff: c.trim().parse().map_err(|_| bad("bad kernel coefficient"))?,
                    expansion_order: k.trim().parse().map_err(|_| bad("bad kernel order"))?,
                });
            } else if !p.is_empty() {
                return Err(bad("unknown field"));
            }
        }
        Ok(ins)
    }
}

/// A twisted descendant invariant ⟨…⟩_{g,n,d} of P^N, weights abstracted away.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantDescriptor {
    #[serde(rename = "N")]
    pub target_dim: usize,
    pub twists: Vec<TwistEntry>,
    pub genus: u8,
    pub degree: u32,
    pub insertions: Vec<InsertionDescriptor>,
}

impl InvariantDescriptor {
    pub fn new(
        target_dim: usize,
        twists: Vec<TwistEntry>,
        genus: u8,
        degree: u32,
        insertions: Vec<InsertionDescriptor>,
    ) -> Self {
        InvariantDescriptor {
            target_dim,
            twists,
            genus,
            degree,
            insertions,
        }
        .normalized()
    }

    /// Twists and insertions sorted; the invariant is symmetric in both.
    pub fn normalized(mut self) -> Self {
        self.twists.sort();
        self.insertions.sort();
        self
    }

    pub fn marking_count(&self) -> usize {
        self.insertions.len()
    }

    /// Virtual dimension of M̄_{g,n}(P^N, d).
    pub fn vdim(&self) -> i64 {
        let n = self.target_dim as i64;
        (1 - self.genus as i64) * (n - 3) + self.degree as i64 * (n + 1) + self.insertions.len() as i64
    }

    pub fn twist_degree(&self) -> i64 {
        self.twists
            .iter()
            .map(|t| t.class_degree(self.genus, self.degree))
            .sum()
    }

    pub fn canonical_key(&self) -> String {
        serde_json::to_string(&self.clone().normalized()).expect("descriptor serializes")
    }

    /// Parses a key and insists that it is already canonical.
    pub fn from_key(key: &str) -> Result<Self, EngineError> {
        let desc: InvariantDescriptor =
            serde_json::from_str(key).map_err(|e| EngineError::Parse(format!("descriptor key: {e}")))?;
        if desc.canonical_key() != key {
            return Err(EngineError::Parse(
                "descriptor key is not in canonical form".into(),
            ));
        }
        Ok(desc)
    }
}
