//! Iterated digit sets and integer tiling.
//!
//! The level-`n` truncation of a Moran measure is uniform on
//! `(1/B_n)·𝐃_n`, where `𝐃_n = D_n + b_n·D_{n−1} + ⋯ + b_2⋯b_n·D_1`.
//! A finite `D ⊂ Z` is an integer tile when `D ⊕ C ≡ Z_m` for some `C` and `m`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::cyclotomic::{prime_factors, prime_power, prime_power_divisors, Poly};
use crate::error::{Error, Result};
use crate::fuglede::convolve_uniform_check;
use crate::system::{DigitLevel, MoranSystem, Tail};

pub const DEFAULT_MAX_PERIOD: u64 = 256;

/// `𝐃_n` as a sorted multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedDigitSet {
    pub level: usize,
    pub elements: Vec<u64>,
    pub direct_sum: bool,
    /// `a_1·N_1·b_2⋯b_n`, the length of the interval tiled in the spectral case.
    pub span: u64,
}

impl IteratedDigitSet {
    /// Distinct elements (equal to `elements` for a direct sum).
    pub fn distinct(&self) -> Vec<u64> {
        let mut out = self.elements.clone();
        out.dedup();
        out
    }
}

fn overflow(n: usize) -> Error {
    Error::LevelOverflow(n)
}

/// `{Σ_k a_k d_k B_n/B_k : d_k ∈ {0,…,N_k−1}}` with multiplicity.
pub fn iterated_digits(system: &MoranSystem, n: usize) -> Result<IteratedDigitSet> {
    let levels = system.levels(1, n)?;
    let products = system.level_products(n)?;
    let last = products
        .last()
        .cloned()
        .unwrap_or_else(|| BigUint::from(1u32));
    let mut elements = vec![0u64];
    for (level, product) in levels.iter().zip(&products) {
        let unit = (&last / product * level.scale)
            .to_u64()
            .ok_or_else(|| overflow(n))?;
        let mut next = Vec::with_capacity(elements.len() * level.count as usize);
        for d in 0..level.count {
            let shift = unit.checked_mul(d).ok_or_else(|| overflow(n))?;
            for &e in &elements {
                next.push(e.checked_add(shift).ok_or_else(|| overflow(n))?);
            }
        }
        elements = next;
    }
    elements.sort_unstable();
    let direct_sum = elements.windows(2).all(|w| w[0] != w[1]);
    let first = levels[0];
    let span = (&last / first.base * first.count * first.scale)
        .to_u64()
        .ok_or_else(|| overflow(n))?;
    Ok(IteratedDigitSet {
        level: n,
        elements,
        direct_sum,
        span,
    })
}

/// The complement system `C_1 = {0}`, `C_j = N_j·{0,…,r_j−1}` with `r_j = b_j/N_j`,
/// plus the exact certificate `𝐃_n ⊕ 𝐂_n = {0,…,L−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplementCertificate {
    pub complement: MoranSystem,
    pub length: u64,
    pub digits: IteratedDigitSet,
    pub complement_digits: IteratedDigitSet,
    pub verified: bool,
}

pub fn canonical_complement(system: &MoranSystem, n: usize) -> Result<ComplementCertificate> {
    let levels = system.levels(1, n)?;
    if levels.iter().any(|l| l.scale != 1) {
        return Err(Error::Precondition("complement needs unit scales".into()));
    }
    for (j, level) in levels.iter().enumerate().skip(1) {
        if level.base % level.count != 0 {
            return Err(Error::NotSpectral(j + 1));
        }
    }
    let mut complement_levels = vec![DigitLevel::new(levels[0].base, 1)];
    complement_levels.extend(
        levels[1..]
            .iter()
            .map(|l| DigitLevel::scaled(l.base, l.base / l.count, l.count)),
    );
    let complement = MoranSystem::with_trivial_levels(complement_levels, Tail::None)?;
    let digits = iterated_digits(system, n)?;
    let complement_digits = iterated_digits(&complement, n)?;
    let length = digits.span;
    let verified = convolve_uniform_check(&digits.elements, &complement_digits.elements, length);
    if !verified {
        return Err(Error::VerificationFailed(format!(
            "D_{n} ⊕ C_{n} is not {{0, …, {}}}",
            length - 1
        )));
    }
    Ok(ComplementCertificate {
        complement,
        length,
        digits,
        complement_digits,
        verified,
    })
}

// ---------------------------------------------------------------------------
// Tile decisions

/// Why a set cannot tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotTileCertificate {
    /// `D(1) ≠ Π_{s∈S_D} Φ_s(1)` over prime powers `s` with `Φ_s | D(x)`.
    T1Violation {
        mask_at_one: u64,
        product: u64,
        prime_powers: Vec<u64>,
    },
    /// `D = A ⊕ E` with `A = step·{0,…,q−1}`, `gcd(r, q) = 1`, yet `rA + E`
    /// repeats `collision`; a tile would make `rA ⊕ E` direct.
    TijdemanObstruction {
        length: u64,
        step: u64,
        r: u64,
        collision: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TileVerdict {
    Tile { period: u64, complement: Vec<u64> },
    NotTile(NotTileCertificate),
    Unknown { max_period: u64 },
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for TileVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TileVerdict::Tile { period, complement } => {
                write!(f, "TILE m={period} complement={}", join(complement))
            }
            TileVerdict::NotTile(NotTileCertificate::T1Violation {
                mask_at_one,
                product,
                ..
            }) => {
                write!(f, "NOTTILE T1 A(1)={mask_at_one} prod={product}")
            }
            TileVerdict::NotTile(NotTileCertificate::TijdemanObstruction {
                length,
                step,
                r,
                collision,
            }) => {
                write!(
                    f,
                    "NOTTILE TIJDEMAN q={length} step={step} r={r} collision={collision}"
                )
            }
            TileVerdict::Unknown { max_period } => write!(f, "UNKNOWN m_max={max_period}"),
        }
    }
}

/// Coven–Meyerowitz condition T1 as a certificate, if it fails.
pub fn t1_certificate(digits: &[u64]) -> Option<NotTileCertificate> {
    let mask = Poly::mask(digits);
    let prime_powers = prime_power_divisors(&mask);
    let product: u64 = prime_powers
        .iter()
        .map(|&s| prime_power(s).unwrap().0)
        .product();
    let mask_at_one = digits.len() as u64;
    (product != mask_at_one).then_some(NotTileCertificate::T1Violation {
        mask_at_one,
        product,
        prime_powers,
    })
}

/// Splits sorted `digits` as `A ⊕ E` for `A ∋ 0`; `E` is unique when it exists.
fn split_off(digits: &[u64], summand: &[u64]) -> Option<Vec<u64>> {
    let members: HashSet<u64> = digits.iter().copied().collect();
    let mut covered = HashSet::new();
    let mut rest = Vec::new();
    for &d in digits {
        if covered.contains(&d) {
            continue;
        }
        for &a in summand {
            let x = d + a;
            if !members.contains(&x) || !covered.insert(x) {
                return None;
            }
        }
        rest.push(d);
    }
    Some(rest)
}

/// Searches `D = step·{0,…,q−1} ⊕ E` (prime `q | #D`) and `r` coprime to `q`
/// for which `rA + E` is not direct.
pub fn tijdeman_obstruction(digits: &[u64]) -> Option<NotTileCertificate> {
    let max = *digits.last()?;
    for q in prime_factors(digits.len() as u64) {
        for step in 1..=max {
            let summand: Vec<u64> = (0..q).map(|i| i * step).collect();
            let Some(rest) = split_off(digits, &summand) else {
                continue;
            };
            for r in 2..=max + 1 {
                if r.gcd(&q) != 1 {
                    continue;
                }
                let mut seen = HashSet::new();
                for &a in &summand {
                    for &e in &rest {
                        let x = r * a + e;
                        if !seen.insert(x) {
                            return Some(NotTileCertificate::TijdemanObstruction {
                                length: q,
                                step,
                                r,
                                collision: x,
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Complement of `digits` in `Z_period`, if one exists; first found with
/// translates tried in ascending order while always covering the least
/// uncovered residue.
pub fn find_complement(digits: &[u64], period: u64) -> Option<Vec<u64>> {
    let m = period as usize;
    if m == 0 || !m.is_multiple_of(digits.len()) {
        return None;
    }
    let residues: Vec<usize> = digits.iter().map(|&d| (d % period) as usize).collect();
    let mut check = vec![false; m];
    for &r in &residues {
        if std::mem::replace(&mut check[r], true) {
            return None;
        }
    }
    let mut covered = vec![0u64; m.div_ceil(64)];
    let mut chosen = Vec::with_capacity(m / digits.len());
    if fill(&residues, m, &mut covered, &mut chosen, 0) {
        let mut out: Vec<u64> = chosen.into_iter().map(|t| t as u64).collect();
        out.sort_unstable();
        Some(out)
    } else {
        None
    }
}

fn is_set(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn toggle(bits: &mut [u64], i: usize) {
    bits[i / 64] ^= 1 << (i % 64);
}

fn fill(
    residues: &[usize],
    m: usize,
    covered: &mut Vec<u64>,
    chosen: &mut Vec<usize>,
    start: usize,
) -> bool {
    let Some(hole) = (start..m).find(|&i| !is_set(covered, i)) else {
        return true;
    };
    let mut translates: Vec<usize> = residues.iter().map(|&d| (hole + m - d) % m).collect();
    translates.sort_unstable();
    for t in translates {
        if residues.iter().any(|&d| is_set(covered, (d + t) % m)) {
            continue;
        }
        for &d in residues {
            toggle(covered, (d + t) % m);
        }
        chosen.push(t);
        if fill(residues, m, covered, chosen, hole + 1) {
            return true;
        }
        chosen.pop();
        for &d in residues {
            toggle(covered, (d + t) % m);
        }
    }
    false
}

/// Three-valued tile decision: certified non-tile, tile with verified
/// complement, or unknown up to `max_period`.
pub fn is_integer_tile(digits: &[u64], max_period: u64) -> Result<TileVerdict> {
    let mut digits = digits.to_vec();
    digits.sort_unstable();
    digits.dedup();
    if digits.first() != Some(&0) {
        return Err(Error::MissingZero);
    }
    if let Some(cert) = t1_certificate(&digits) {
        return Ok(TileVerdict::NotTile(cert));
    }
    if let Some(cert) = tijdeman_obstruction(&digits) {
        return Ok(TileVerdict::NotTile(cert));
    }
    let size = digits.len() as u64;
    let mut period = size;
    while period <= max_period {
        if let Some(complement) = find_complement(&digits, period) {
            if !is_tiling(&digits, &complement, period) {
                return Err(Error::VerificationFailed("complement does not tile".into()));
            }
            return Ok(TileVerdict::Tile { period, complement });
        }
        period += size;
    }
    Ok(TileVerdict::Unknown { max_period })
}

/// Every residue mod `period` is hit exactly once by `a + b`.
pub fn is_tiling(a: &[u64], b: &[u64], period: u64) -> bool {
    if period == 0 || (a.len() * b.len()) as u64 != period {
        return false;
    }
    let mut hits = vec![0u32; period as usize];
    for &x in a {
        for &y in b {
            hits[((x + y) % period) as usize] += 1;
        }
    }
    hits.iter().all(|&h| h == 1)
}

/// A tiling `rA ⊕ B ≡ Z_m` obtained by dilating a verified tiling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RescaledTiling {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub period: u64,
}

/// Dilates `A` by `r` (coprime to `#A`) in a tiling `A ⊕ B ≡ Z_m` and re-verifies.
pub fn tijdeman_rescale(a: &[u64], b: &[u64], period: u64, r: u64) -> Result<RescaledTiling> {
    if !a.contains(&0) || !b.contains(&0) {
        return Err(Error::Precondition("0 must lie in both A and B".into()));
    }
    if !is_tiling(a, b, period) {
        return Err(Error::Precondition(format!(
            "A ⊕ B is not a tiling of Z_{period}"
        )));
    }
    if r.gcd(&(a.len() as u64)) != 1 {
        return Err(Error::Precondition(format!("gcd({r}, #A) ≠ 1")));
    }
    let mut scaled: Vec<u64> = a
        .iter()
        .map(|&x| ((x as u128 * r as u128) % period as u128) as u64)
        .collect();
    scaled.sort_unstable();
    let mut b = b.to_vec();
    b.sort_unstable();
    if !is_tiling(&scaled, &b, period) {
        return Err(Error::VerificationFailed(format!(
            "{r}·A ⊕ B failed to tile Z_{period}"
        )));
    }
    Ok(RescaledTiling {
        a: scaled,
        b,
        period,
    })
}

/// Parses the one-nonnegative-integer-per-line digit format (`#` comments allowed).
pub fn parse_digits(text: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(body.parse().map_err(|_| {
            Error::Parse(format!(
                "line {}: not a nonnegative integer: {body:?}",
                i + 1
            ))
        })?);
    }
    Ok(out)
}

/// Multiplicity table of a multiset.
pub fn multiplicities(elements: &[u64]) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for &e in elements {
        *out.entry(e).or_insert(0) += 1;
    }
    out
}
