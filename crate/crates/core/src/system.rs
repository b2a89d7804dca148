//! Moran systems: base and digit-count sequences with a finite description.
//!
//! A system is an explicit prefix of [`DigitLevel`]s followed by a [`Tail`]
//! rule. Level `n` (1-based) carries the digit set `scale·{0, …, count−1}`
//! placed at resolution `1/B_n`, where `B_n = b_1⋯b_n`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rational::{self, from_biguint, parse_rational, Rational};

/// Digit set `scale·{0, …, count−1}` at base `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DigitLevel {
    pub base: u64,
    pub count: u64,
    pub scale: u64,
}

impl DigitLevel {
    pub fn new(base: u64, count: u64) -> Self {
        DigitLevel {
            base,
            count,
            scale: 1,
        }
    }

    pub fn scaled(base: u64, count: u64, scale: u64) -> Self {
        DigitLevel { base, count, scale }
    }

    /// Spacing `B/(a·N)` of the zero stratum this level contributes when its
    /// level product is `product`.
    pub fn stratum_step(&self, product: &BigUint) -> Rational {
        Rational::new(
            BigInt::from(product.clone()),
            BigInt::from(self.scale) * BigInt::from(self.count),
        )
    }

    fn check(&self, level: usize) -> Result<()> {
        if self.base < 2 {
            return Err(Error::BaseTooSmall {
                level,
                base: self.base,
            });
        }
        if self.count < 1 {
            return Err(Error::CountTooSmall { level });
        }
        if self.scale < 1 {
            return Err(Error::ScaleTooSmall { level });
        }
        Ok(())
    }
}

/// How levels continue after the explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    /// Only prefix levels exist.
    None,
    /// The block repeats forever.
    Periodic(Vec<DigitLevel>),
    /// Constant base with `N_n = max(2, round(c·ρ^n))`, scale 1.
    Formula {
        base: u64,
        c: Rational,
        rho: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MoranSystem {
    prefix: Vec<DigitLevel>,
    tail: Tail,
}

impl MoranSystem {
    pub fn new(prefix: Vec<DigitLevel>, tail: Tail) -> Result<Self> {
        for (i, level) in prefix.iter().enumerate() {
            level.check(i + 1)?;
        }
        let mut nontrivial = prefix.iter().any(|l| l.count >= 2);
        match &tail {
            Tail::None => {
                if prefix.is_empty() {
                    return Err(Error::EmptySystem);
                }
            }
            Tail::Periodic(block) => {
                if block.is_empty() {
                    return Err(Error::Malformed(
                        "periodic tail needs at least one level".into(),
                    ));
                }
                for (i, level) in block.iter().enumerate() {
                    level.check(prefix.len() + i + 1)?;
                }
                nontrivial |= block.iter().any(|l| l.count >= 2);
            }
            Tail::Formula { base, c, rho } => {
                if *base < 2 {
                    return Err(Error::BaseTooSmall {
                        level: prefix.len() + 1,
                        base: *base,
                    });
                }
                if !c.is_positive() {
                    return Err(Error::Malformed("formula tail needs c > 0".into()));
                }
                if rho < &Rational::one() {
                    return Err(Error::Malformed("formula tail needs rho >= 1".into()));
                }
                nontrivial = true;
            }
        }
        if !nontrivial {
            return Err(Error::TrivialSystem);
        }
        Ok(MoranSystem { prefix, tail })
    }

    /// Finite system that may consist of single-digit levels only; complements
    /// of one-level truncations are of this kind.
    pub(crate) fn with_trivial_levels(prefix: Vec<DigitLevel>, tail: Tail) -> Result<Self> {
        match Self::new(prefix.clone(), tail.clone()) {
            Err(Error::TrivialSystem) => Ok(MoranSystem { prefix, tail }),
            other => other,
        }
    }

    /// Finite system from parallel base and count lists, all scales 1.
    pub fn finite(bases: &[u64], counts: &[u64]) -> Result<Self> {
        Self::new(zip_levels(bases, counts)?, Tail::None)
    }

    /// System whose whole sequence repeats `bases`/`counts`.
    pub fn periodic(bases: &[u64], counts: &[u64]) -> Result<Self> {
        Self::new(Vec::new(), Tail::Periodic(zip_levels(bases, counts)?))
    }

    pub fn prefix(&self) -> &[DigitLevel] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Last addressable level, `None` when the sequence is infinite.
    pub fn horizon(&self) -> Option<usize> {
        match self.tail {
            Tail::None => Some(self.prefix.len()),
            _ => None,
        }
    }

    pub fn is_addressable(&self, n: usize) -> bool {
        n >= 1 && self.horizon().is_none_or(|h| n <= h)
    }

    pub fn all_scales_one(&self) -> bool {
        let block_ok = match &self.tail {
            Tail::Periodic(block) => block.iter().all(|l| l.scale == 1),
            _ => true,
        };
        block_ok && self.prefix.iter().all(|l| l.scale == 1)
    }

    /// Level `n`, 1-based.
    pub fn level(&self, n: usize) -> Result<DigitLevel> {
        if n == 0 {
            return Err(Error::BeyondHorizon(0));
        }
        let p = self.prefix.len();
        if n <= p {
            return Ok(self.prefix[n - 1]);
        }
        match &self.tail {
            Tail::None => Err(Error::BeyondHorizon(n)),
            Tail::Periodic(block) => Ok(block[(n - p - 1) % block.len()]),
            Tail::Formula { base, c, rho } => {
                let exponent = i32::try_from(n).map_err(|_| Error::LevelOverflow(n))?;
                let raw = rational::round_half_up(&(c * num_traits::pow::Pow::pow(rho, exponent)));
                let count = raw.to_u64().ok_or(Error::LevelOverflow(n))?.max(2);
                Ok(DigitLevel::new(*base, count))
            }
        }
    }

    pub fn levels(&self, first: usize, last: usize) -> Result<Vec<DigitLevel>> {
        (first..=last).map(|k| self.level(k)).collect()
    }

    /// `B_n = b_1⋯b_n`.
    pub fn level_product(&self, n: usize) -> Result<BigUint> {
        if !self.is_addressable(n) {
            return Err(Error::BeyondHorizon(n));
        }
        let mut product = BigUint::one();
        for k in 1..=n {
            product *= self.level(k)?.base;
        }
        Ok(product)
    }

    /// `[B_1, …, B_n]`.
    pub fn level_products(&self, n: usize) -> Result<Vec<BigUint>> {
        if n > 0 && !self.is_addressable(n) {
            return Err(Error::BeyondHorizon(n));
        }
        let mut out = Vec::with_capacity(n);
        let mut product = BigUint::one();
        for k in 1..=n {
            product *= self.level(k)?.base;
            out.push(product.clone());
        }
        Ok(out)
    }

    /// `Σ_{k=first}^{last} w(level_k)/B_k`, exact.
    pub fn finite_series<F>(&self, first: usize, last: usize, weight: F) -> Result<Rational>
    where
        F: Fn(&DigitLevel) -> BigInt,
    {
        let mut sum = Rational::zero();
        let mut product = BigUint::one();
        for k in 1..=last {
            let level = self.level(k)?;
            product *= level.base;
            if k >= first {
                sum += Rational::new(weight(&level), BigInt::from(product.clone()));
            }
        }
        Ok(sum)
    }

    /// `Σ_{k>n} w(level_k)/B_k` in closed form; periodic tails only.
    pub fn periodic_tail_series<F>(&self, n: usize, weight: F) -> Result<Rational>
    where
        F: Fn(&DigitLevel) -> BigInt,
    {
        let block = match &self.tail {
            Tail::Periodic(block) => block,
            _ => {
                return Err(Error::InvalidWindow(
                    "closed-form tail sums need a periodic tail".into(),
                ))
            }
        };
        let p = self.prefix.len();
        let period = block.len();
        // One block of the series starting right after a block boundary m,
        // scaled by B_m, then summed geometrically over all later blocks.
        let mut block_sum = Rational::zero();
        let mut partial = BigUint::one();
        for level in block {
            partial *= level.base;
            block_sum += Rational::new(weight(level), BigInt::from(partial.clone()));
        }
        let ratio = from_biguint(&partial);
        let geometric = &ratio / (&ratio - Rational::one());
        let boundary = if n <= p {
            p
        } else {
            p + (n - p).div_ceil(period) * period
        };
        let explicit = if boundary > n {
            self.finite_series(n + 1, boundary, &weight)?
        } else {
            Rational::zero()
        };
        let scale = from_biguint(&self.level_product_unchecked(boundary)?);
        Ok(explicit + block_sum * geometric / scale)
    }

    fn level_product_unchecked(&self, n: usize) -> Result<BigUint> {
        let mut product = BigUint::one();
        for k in 1..=n {
            product *= self.level(k)?.base;
        }
        Ok(product)
    }
}

fn zip_levels(bases: &[u64], counts: &[u64]) -> Result<Vec<DigitLevel>> {
    if bases.len() != counts.len() {
        return Err(Error::Malformed("b and N must have equal length".into()));
    }
    Ok(bases
        .iter()
        .zip(counts)
        .map(|(&b, &n)| DigitLevel::new(b, n))
        .collect())
}

// ---------------------------------------------------------------------------
// JSON system documents

pub fn parse_system(text: &str) -> Result<MoranSystem> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Malformed("document must be an object".into()))?;
    let prefix = match obj.get("prefix") {
        Some(v) => parse_levels(v, "prefix")?,
        None => Vec::new(),
    };
    let tail = match obj.get("tail") {
        None => Tail::None,
        Some(t) => parse_tail(t)?,
    };
    MoranSystem::new(prefix, tail)
}

fn parse_levels(v: &Value, what: &str) -> Result<Vec<DigitLevel>> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Malformed(format!("{what} must be an object")))?;
    let bases = int_array(obj.get("b"), &format!("{what}.b"))?;
    let counts = int_array(obj.get("N"), &format!("{what}.N"))?;
    if bases.len() != counts.len() {
        return Err(Error::Malformed(format!("{what}: b and N lengths differ")));
    }
    let scales = match obj.get("scale") {
        Some(s) => int_array(Some(s), &format!("{what}.scale"))?,
        None => vec![1; bases.len()],
    };
    if scales.len() != bases.len() {
        return Err(Error::Malformed(format!(
            "{what}: scale length differs from b"
        )));
    }
    Ok(bases
        .iter()
        .zip(&counts)
        .zip(&scales)
        .map(|((&b, &n), &a)| DigitLevel::scaled(b, n, a))
        .collect())
}

fn int_array(v: Option<&Value>, what: &str) -> Result<Vec<u64>> {
    let arr = v
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed(format!("{what} must be an array of integers")))?;
    arr.iter()
        .map(|x| {
            if let Some(u) = x.as_u64() {
                Ok(u)
            } else if x.as_i64().is_some() {
                // negative values fail range checks rather than the parser
                Ok(0)
            } else {
                Err(Error::Malformed(format!("{what} must contain integers")))
            }
        })
        .collect()
}

fn parse_tail(v: &Value) -> Result<Tail> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Malformed("tail must be an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Malformed("tail.kind missing".into()))?;
    match kind {
        "none" => Ok(Tail::None),
        "periodic" => Ok(Tail::Periodic(parse_levels(v, "tail")?)),
        "formula" => {
            let base = obj
                .get("b")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Malformed("formula tail needs integer b".into()))?;
            let rho = obj.get("rho").map(rational_value).transpose()?;
            let c = obj.get("c").map(rational_value).transpose()?;
            match (c, rho) {
                (Some(c), Some(rho)) => Ok(Tail::Formula { base, c, rho }),
                (None, Some(_)) => Err(Error::Malformed("formula tail has rho but no c".into())),
                _ => Err(Error::Malformed("formula tail needs c and rho".into())),
            }
        }
        other => Err(Error::Malformed(format!("unknown tail kind {other:?}"))),
    }
}

fn rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => parse_rational(&n.to_string()),
        _ => Err(Error::Malformed(
            "expected a rational as string or number".into(),
        )),
    }
}

/// Canonical JSON text: keys in fixed order, `scale` only when not all ones.
pub fn serialize_system(system: &MoranSystem) -> String {
    let mut out = String::from("{");
    if !system.prefix.is_empty() {
        out.push_str("\"prefix\":");
        write_levels(&mut out, &system.prefix, None);
        out.push(',');
    }
    out.push_str("\"tail\":");
    match &system.tail {
        Tail::None => out.push_str("{\"kind\":\"none\"}"),
        Tail::Periodic(block) => write_levels(&mut out, block, Some("periodic")),
        Tail::Formula { base, c, rho } => {
            out.push_str(&format!(
                "{{\"kind\":\"formula\",\"b\":{base},\"c\":\"{c}\",\"rho\":\"{rho}\"}}"
            ));
        }
    }
    out.push('}');
    out
}

fn write_levels(out: &mut String, levels: &[DigitLevel], kind: Option<&str>) {
    let list = |f: fn(&DigitLevel) -> u64| {
        levels
            .iter()
            .map(|l| f(l).to_string())
            .collect::<Vec<_>>()
            .join(",")
    };
    out.push('{');
    if let Some(kind) = kind {
        out.push_str(&format!("\"kind\":\"{kind}\","));
    }
    out.push_str(&format!(
        "\"b\":[{}],\"N\":[{}]",
        list(|l| l.base),
        list(|l| l.count)
    ));
    if levels.iter().any(|l| l.scale != 1) {
        out.push_str(&format!(",\"scale\":[{}]", list(|l| l.scale)));
    }
    out.push('}');
}

// ---------------------------------------------------------------------------
// Convergence and support

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Convergent,
    Divergent,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    GeometricRatio,
    RatioTest,
    NonvanishingTerms,
    BoundedByCorollary,
    FinitePrefix,
}

impl Certificate {
    pub fn tag(self) -> &'static str {
        match self {
            Certificate::GeometricRatio => "geometric-ratio",
            Certificate::RatioTest => "ratio-test",
            Certificate::NonvanishingTerms => "nonvanishing-terms",
            Certificate::BoundedByCorollary => "bounded-by-corollary",
            Certificate::FinitePrefix => "finite-prefix",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Convergent => "Convergent",
            Verdict::Divergent => "Divergent",
            Verdict::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

/// Outcome of the `Σ N_n/B_n < ∞` test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub verdict: Verdict,
    /// Exact sum when `sum_is_exact`, otherwise an upper bound. Absent when divergent.
    pub sum: Option<Rational>,
    pub sum_is_exact: bool,
    pub certificate: Certificate,
    pub note: Option<String>,
}

fn mass_weight(level: &DigitLevel) -> BigInt {
    BigInt::from(level.count) * BigInt::from(level.scale)
}

fn span_weight(level: &DigitLevel) -> BigInt {
    BigInt::from(level.count - 1) * BigInt::from(level.scale)
}

pub fn check_convergence(system: &MoranSystem) -> ConvergenceReport {
    let p = system.prefix.len();
    let prefix_sum = || {
        system
            .finite_series(1, p, mass_weight)
            .expect("prefix levels exist")
    };
    match &system.tail {
        Tail::None => ConvergenceReport {
            verdict: Verdict::Convergent,
            sum: Some(prefix_sum()),
            sum_is_exact: true,
            certificate: Certificate::FinitePrefix,
            note: Some("finite prefix only; the infinite model is unspecified".into()),
        },
        Tail::Periodic(_) => {
            let tail = system
                .periodic_tail_series(p, mass_weight)
                .expect("periodic tail");
            ConvergenceReport {
                verdict: Verdict::Convergent,
                sum: Some(prefix_sum() + tail),
                sum_is_exact: true,
                certificate: Certificate::GeometricRatio,
                note: None,
            }
        }
        Tail::Formula { base, c, rho } => {
            let b = rational::int(*base as i64);
            if rho >= &b {
                return ConvergenceReport {
                    verdict: Verdict::Divergent,
                    sum: None,
                    sum_is_exact: false,
                    certificate: Certificate::NonvanishingTerms,
                    note: Some("terms N_n/B_n do not tend to zero".into()),
                };
            }
            // N_n ≤ c·ρ^n + 2, B_n = B_p·b^(n−p)
            let bp = from_biguint(&system.level_product_unchecked(p).expect("prefix"));
            let exponent = i32::try_from(p).unwrap_or(i32::MAX);
            let c_rho_p = c * num_traits::pow::Pow::pow(rho, exponent);
            let bound =
                (c_rho_p * rho / (&b - rho) + rational::int(2) / (&b - Rational::one())) / bp;
            let constant_count = rho.is_one() && {
                let n = rational::round_half_up(c).max(BigInt::from(2));
                n <= BigInt::from(*base)
            };
            ConvergenceReport {
                verdict: Verdict::Convergent,
                sum: Some(prefix_sum() + bound),
                sum_is_exact: false,
                certificate: if constant_count {
                    Certificate::BoundedByCorollary
                } else {
                    Certificate::RatioTest
                },
                note: None,
            }
        }
    }
}

/// Extent of the support `Σ_n scale_n·{0, …, N_n−1}/B_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportInfo {
    pub left: Rational,
    pub diameter: Rational,
    /// Atom grid spacing `1/B_n` for finite levels.
    pub resolution: Option<Rational>,
}

/// Support of the truncation at level `n`, or of the infinite measure when `n` is `None`.
pub fn support_info(system: &MoranSystem, n: Option<usize>) -> Result<SupportInfo> {
    match n {
        Some(n) => {
            let product = system.level_product(n)?;
            Ok(SupportInfo {
                left: Rational::zero(),
                diameter: system.finite_series(1, n, span_weight)?,
                resolution: Some(Rational::new(BigInt::one(), BigInt::from(product))),
            })
        }
        None => {
            if !matches!(system.tail, Tail::Periodic(_)) {
                return Err(Error::InvalidWindow(
                    "infinite support needs a periodic tail".into(),
                ));
            }
            let p = system.prefix.len();
            let diameter = system.finite_series(1, p, span_weight)?
                + system.periodic_tail_series(p, span_weight)?;
            Ok(SupportInfo {
                left: Rational::zero(),
                diameter,
                resolution: None,
            })
        }
    }
}
