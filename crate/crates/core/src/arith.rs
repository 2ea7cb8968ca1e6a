//! Continued fractions, convergents and the Gauss map.
//!
//! Terms are 0-indexed: `theta = 1/(a_0 + 1/(a_1 + ...))`. Convergents follow
//! `q_0 = 1, q_1 = a_0, q_{n+1} = a_n q_n + q_{n-1}` and `p_0 = 0, p_1 = 1`, so
//! `p_n / q_n = [a_0, ..., a_{n-1}]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Continued fraction of a number in (0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    prefix: Vec<u64>,
    tail: Tail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
enum Tail {
    /// The expansion ends after the prefix (a rational number).
    Finite,
    /// The prefix is followed by this block repeated forever.
    Periodic(Vec<u64>),
    /// Only the prefix is known.
    Truncated,
}

impl ContinuedFraction {
    /// Golden mean `(sqrt 5 - 1)/2 = [1, 1, 1, ...]`.
    pub fn golden() -> Self {
        Self::periodic(&[], &[1]).expect("valid pattern")
    }

    /// Silver mean `sqrt 2 - 1 = [2, 2, 2, ...]`.
    pub fn silver() -> Self {
        Self::periodic(&[], &[2]).expect("valid pattern")
    }

    /// Eventually periodic expansion `prefix, block, block, ...`.
    pub fn periodic(prefix: &[u64], block: &[u64]) -> Result<Self> {
        if block.is_empty() {
            return Err(Error::InvalidInput("empty periodic block".into()));
        }
        check_terms(prefix)?;
        check_terms(block)?;
        Ok(Self {
            prefix: prefix.to_vec(),
            tail: Tail::Periodic(block.to_vec()),
        })
    }

    /// Finite expansion; exact for the rational it represents.
    pub fn finite(terms: &[u64]) -> Result<Self> {
        check_terms(terms)?;
        Ok(Self {
            prefix: terms.to_vec(),
            tail: Tail::Finite,
        })
    }

    /// Known leading terms of a number whose remaining terms are unknown.
    pub fn truncated(terms: &[u64]) -> Result<Self> {
        check_terms(terms)?;
        Ok(Self {
            prefix: terms.to_vec(),
            tail: Tail::Truncated,
        })
    }

    /// True when every term is determined (finite or eventually periodic).
    pub fn is_exact(&self) -> bool {
        !matches!(self.tail, Tail::Truncated)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.tail, Tail::Periodic(_))
    }

    /// Number of available terms, `None` if unbounded.
    pub fn available(&self) -> Option<usize> {
        match self.tail {
            Tail::Periodic(_) => None,
            _ => Some(self.prefix.len()),
        }
    }

    /// Term `a_i`, if known.
    pub fn term(&self, i: usize) -> Option<u64> {
        if i < self.prefix.len() {
            return Some(self.prefix[i]);
        }
        match &self.tail {
            Tail::Periodic(block) => Some(block[(i - self.prefix.len()) % block.len()]),
            _ => None,
        }
    }

    /// The first `n` terms, failing if fewer are known.
    pub fn terms(&self, n: usize) -> Result<Vec<u64>> {
        (0..n)
            .map(|i| {
                self.term(i).ok_or_else(|| {
                    Error::PrecisionExhausted(format!("only {} terms are known", self.prefix.len()))
                })
            })
            .collect()
    }

    /// Drop the first `k` terms: the expansion of `G^k(theta)`.
    pub fn shift(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return Self {
                prefix: self.prefix[k..].to_vec(),
                tail: self.tail.clone(),
            };
        }
        match &self.tail {
            Tail::Periodic(block) => {
                let r = (k - self.prefix.len()) % block.len();
                let mut rotated = block[r..].to_vec();
                rotated.extend_from_slice(&block[..r]);
                Self {
                    prefix: Vec::new(),
                    tail: Tail::Periodic(rotated),
                }
            }
            tail => Self {
                prefix: Vec::new(),
                tail: tail.clone(),
            },
        }
    }

    /// Floating-point value, evaluated from the deepest useful term backwards.
    pub fn value(&self) -> f64 {
        let n = self.available().unwrap_or(80);
        let mut x = 0.0;
        for i in (0..n).rev() {
            x = 1.0 / (self.term(i).unwrap() as f64 + x);
        }
        x
    }

    /// Parse `golden`, `silver`, `cf:a,b,c` (finite), `cf:a,b,...` (periodic
    /// repetition of the listed terms, reduced to their shortest period) or a
    /// decimal in (0, 1), which keeps only its certified terms.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        match s {
            "golden" => return Ok(Self::golden()),
            "silver" => return Ok(Self::silver()),
            _ => {}
        }
        if let Ok(theta) = s.parse::<f64>() {
            return cf_certified_prefix(theta);
        }
        let body = s
            .strip_prefix("cf:")
            .ok_or_else(|| Error::InvalidInput(format!("unknown rotation '{spec}'")))?;
        let mut parts: Vec<&str> = body.split(',').map(str::trim).collect();
        let repeat = parts.last() == Some(&"...");
        if repeat {
            parts.pop();
        }
        let terms = parts
            .iter()
            .map(|p| {
                p.parse::<u64>()
                    .map_err(|_| Error::InvalidInput(format!("bad term '{p}' in '{spec}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if terms.is_empty() {
            return Err(Error::InvalidInput(format!("no terms in '{spec}'")));
        }
        if repeat {
            let p = (1..=terms.len())
                .find(|&p| (p..terms.len()).all(|i| terms[i] == terms[i - p]))
                .unwrap_or(terms.len());
            Self::periodic(&[], &terms[..p])
        } else {
            Self::finite(&terms)
        }
    }
}

fn check_terms(terms: &[u64]) -> Result<()> {
    if terms.contains(&0) {
        return Err(Error::InvalidInput("partial quotients must be positive".into()));
    }
    Ok(())
}

fn exact_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn half_ulp(x: f64) -> BigRational {
    let next = f64::from_bits(x.to_bits() + 1);
    (exact_rational(next) - exact_rational(x)) / BigInt::from(2)
}

/// Partial quotients of `theta` certified against the enclosure
/// `theta ± ulp/2`, stopping at `depth` or at the first term whose enclosure
/// straddles a branch of the Gauss map.
fn certified_terms(theta: f64, depth: usize) -> Result<Vec<u64>> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidInput(format!("theta = {theta} not in (0, 1)")));
    }
    let center = exact_rational(theta);
    let radius = half_ulp(theta);
    let mut lo = &center - &radius;
    let mut hi = &center + &radius;
    let mut terms = Vec::with_capacity(depth);
    while terms.len() < depth && lo.is_positive() {
        let inv_lo = lo.recip();
        let inv_hi = hi.recip();
        let a_hi = inv_lo.floor();
        let a_lo = inv_hi.floor();
        // Both ends must share the branch and stay off its endpoints.
        if a_lo != a_hi || inv_hi == a_lo {
            break;
        }
        let a = a_lo.to_integer();
        let Some(term) = a.to_u64() else { break };
        terms.push(term);
        let a = BigRational::from_integer(a);
        lo = inv_hi - &a;
        hi = inv_lo - &a;
    }
    Ok(terms)
}

/// Expand a double into `depth` certified partial quotients, failing with
/// `PrecisionExhausted` if the enclosure runs out first.
pub fn cf_expand(theta: f64, depth: usize) -> Result<ContinuedFraction> {
    let terms = certified_terms(theta, depth)?;
    if terms.len() < depth {
        return Err(Error::PrecisionExhausted(format!(
            "term {} not certified; certified prefix {:?}",
            terms.len(),
            terms
        )));
    }
    ContinuedFraction::truncated(&terms)
}

/// All partial quotients of a double that its enclosure certifies.
pub fn cf_certified_prefix(theta: f64) -> Result<ContinuedFraction> {
    ContinuedFraction::truncated(&certified_terms(theta, 64)?)
}

/// Exact expansion of `num/den` in (0, 1), truncated at `depth` terms.
pub fn cf_expand_rational(num: u64, den: u64, depth: usize) -> Result<ContinuedFraction> {
    if num == 0 || num >= den {
        return Err(Error::InvalidInput(format!("{num}/{den} not in (0, 1)")));
    }
    let (mut n, mut d) = (BigInt::from(num), BigInt::from(den));
    let mut terms = Vec::new();
    while !n.is_zero() && terms.len() < depth {
        let (a, r) = d.div_rem(&n);
        terms.push(a.to_u64().expect("quotient fits"));
        d = n;
        n = r;
    }
    if n.is_zero() {
        ContinuedFraction::finite(&terms)
    } else {
        ContinuedFraction::truncated(&terms)
    }
}

/// Convergent numerators and denominators `p_0..=p_n`, `q_0..=q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergents {
    pub p: Vec<u64>,
    pub q: Vec<u64>,
}

impl Convergents {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn ratio(&self, k: usize) -> f64 {
        self.p[k] as f64 / self.q[k] as f64
    }
}

/// Convergents up to index `n` (uses `a_0..a_{n-1}`).
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<Convergents> {
    let a = cf.terms(n)?;
    let mut p = vec![0u64];
    let mut q = vec![1u64];
    if n >= 1 {
        p.push(1);
        q.push(a[0]);
    }
    for k in 1..n {
        let step = |x: &[u64]| {
            a[k].checked_mul(x[k]).and_then(|v| v.checked_add(x[k - 1]))
        };
        match (step(&p), step(&q)) {
            (Some(pk), Some(qk)) => {
                p.push(pk);
                q.push(qk);
            }
            _ => return Err(Error::IntegerOverflow { largest_valid: k }),
        }
    }
    Ok(Convergents { p, q })
}

/// Convergents while `q_k <= q_max`, for expansions with enough terms.
pub fn convergents_upto(cf: &ContinuedFraction, q_max: u64) -> Convergents {
    let mut p = vec![0u64, 1];
    let mut q = vec![1u64, cf.term(0).unwrap_or(u64::MAX)];
    if q[1] > q_max {
        p.pop();
        q.pop();
        return Convergents { p, q };
    }
    let mut k = 1;
    while let Some(a) = cf.term(k) {
        let next = a
            .checked_mul(q[k])
            .and_then(|v| v.checked_add(q[k - 1]))
            .filter(|&v| v <= q_max);
        let Some(qn) = next else { break };
        p.push(a * p[k] + p[k - 1]);
        q.push(qn);
        k += 1;
    }
    Convergents { p, q }
}

/// Gauss map `G(x) = 1/x - floor(1/x)`, with `G(0) = 0`.
pub fn gauss(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let inv = 1.0 / theta;
    inv - inv.floor()
}

/// Outcome of a bounded-type check on a truncated expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTypeEvidence {
    /// All inspected terms are below the bound.
    pub holds: bool,
    pub terms_checked: usize,
    pub max_term: u64,
    /// The conclusion covers every term, not just the inspected ones.
    pub exact: bool,
}

/// Check `a_n < bound` over the first `depth` terms. For periodic expansions
/// the answer is exact once the periodic block has been seen.
pub fn is_bounded_type(cf: &ContinuedFraction, bound: u64, depth: usize) -> BoundedTypeEvidence {
    let n = match cf.available() {
        Some(k) => depth.min(k),
        None => depth.max(cf.prefix.len() + period_len(cf)),
    };
    let max_term = (0..n).filter_map(|i| cf.term(i)).max().unwrap_or(0);
    BoundedTypeEvidence {
        holds: max_term < bound,
        terms_checked: n,
        max_term,
        exact: cf.is_exact() && (cf.is_infinite() || n == cf.prefix.len()),
    }
}

fn period_len(cf: &ContinuedFraction) -> usize {
    match &cf.tail {
        Tail::Periodic(b) => b.len(),
        _ => 0,
    }
}

/// Growth statistics of the partial quotients, with terms read as
/// `a_1, a_2, ...` in the order stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostics {
    /// `(1/n) sum_{j<=n} log a_j`.
    pub mean_log: Vec<f64>,
    /// `(1/n) log a_n`.
    pub last_log: Vec<f64>,
    /// `(k, n, (1/n) sum_{j=k+1}^{k+n} log a_j)` for `0 < n <= k`.
    pub window_log: Vec<(usize, usize, f64)>,
}

/// Diagnostics used to judge membership in the set of rotation numbers with
/// subexponential partial quotients. Purely descriptive.
pub fn growth_diagnostics(cf: &ContinuedFraction, depth: usize) -> Result<GrowthDiagnostics> {
    let a = cf.terms(depth)?;
    if a.len() < 2 {
        return Err(Error::InvalidInput("need at least two terms".into()));
    }
    let logs: Vec<f64> = a.iter().map(|&x| (x as f64).ln()).collect();
    let mut prefix = vec![0.0];
    for l in &logs {
        prefix.push(prefix.last().unwrap() + l);
    }
    let mean_log = (1..=logs.len()).map(|n| prefix[n] / n as f64).collect();
    let last_log = (1..=logs.len()).map(|n| logs[n - 1] / n as f64).collect();
    let mut window_log = Vec::new();
    for k in 1..logs.len() {
        for n in 1..=k.min(logs.len() - k) {
            window_log.push((k, n, (prefix[k + n] - prefix[k]) / n as f64));
        }
    }
    Ok(GrowthDiagnostics {
        mean_log,
        last_log,
        window_log,
    })
}
