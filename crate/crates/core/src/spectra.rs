//! Bi-zero sets and spectra of finite windows.
//!
//! A finite window `μ_{m..n}` is a discrete measure with `M` distinct atoms,
//! so `L²` is `M`-dimensional: a set is a spectrum exactly when its nonzero
//! differences all lie in the zero set and it has `M` elements.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{evaluate_transform, zero_stratum, MeasureWindow, ScaledEvaluator};
use crate::rational::{self, parse_rational, Rational};
use crate::system::{MoranSystem, Tail};

/// Strictly sorted finite set of rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct CandidateSet {
    elements: Vec<Rational>,
}

impl CandidateSet {
    pub fn new(mut elements: Vec<Rational>) -> Self {
        elements.sort();
        elements.dedup();
        CandidateSet { elements }
    }

    pub fn singleton_zero() -> Self {
        CandidateSet {
            elements: vec![Rational::zero()],
        }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        Self::new(values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn elements(&self) -> &[Rational] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&Rational::zero())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.elements.iter()
    }

    /// `c·Λ`.
    pub fn scaled(&self, c: &Rational) -> Self {
        Self::new(self.elements.iter().map(|x| x * c).collect())
    }

    /// Parses the one-rational-per-line format; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let value =
                parse_rational(body).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
            elements.push(value);
        }
        Ok(Self::new(elements))
    }

    /// Sorted, one element per line, trailing newline.
    pub fn to_text(&self) -> String {
        self.elements.iter().map(|x| format!("{x}\n")).collect()
    }
}

impl FromIterator<Rational> for CandidateSet {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a CandidateSet {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

impl fmt::Display for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Zero-set membership for many differences

const TABLE_LIMIT: u64 = 1 << 24;

enum Membership {
    /// Good residues modulo `modulus` (the zero set is a union of
    /// `p·(Z ∖ R·Z)` in scaled units, so membership depends on `d mod lcm(p·R)`).
    Table {
        modulus: i64,
        good: Vec<bool>,
    },
    /// `(p, p·R)` per stratum, checked directly.
    Direct(Vec<(i128, i128)>),
    Exact,
}

/// Tests whether differences of a fixed point list lie in `Z(μ̂_window)`.
pub(crate) struct PairOracle<'w> {
    window: MeasureWindow<'w>,
    points: Vec<Rational>,
    coords: Vec<i128>,
    membership: Membership,
}

impl<'w> PairOracle<'w> {
    pub(crate) fn new(window: &MeasureWindow<'w>, points: &[Rational]) -> Result<Self> {
        let exact = |points: &[Rational]| PairOracle {
            window: *window,
            points: points.to_vec(),
            coords: Vec::new(),
            membership: Membership::Exact,
        };
        if !window.is_finite() || points.is_empty() {
            return Ok(exact(points));
        }
        let denominator = points
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let scale = Rational::from_integer(denominator.clone());
        let mut coords = Vec::with_capacity(points.len());
        for x in points {
            match (x * &scale).to_integer().to_i128() {
                Some(c) if c.unsigned_abs() < 1 << 100 => coords.push(c),
                _ => return Ok(exact(points)),
            }
        }
        let mut strata = Vec::new();
        for (level, product) in window.factors()? {
            if level.count < 2 {
                continue;
            }
            // stratum step in units of 1/denominator, reduced to p/q
            let step = level.stratum_step(&product) * &scale;
            let (p, q) = (step.numer().clone(), step.denom().clone());
            let count = BigInt::from(level.count);
            let repeat = &count / count.gcd(&q);
            if repeat.is_one() {
                continue;
            }
            let outer = &p * &repeat;
            match (p.to_i128(), outer.to_i128()) {
                (Some(p), Some(outer)) if outer < 1 << 100 => strata.push((p, outer)),
                _ => return Ok(exact(points)),
            }
        }
        let cap = 1i128 << 110;
        let modulus = strata.iter().fold(1i128, |acc, &(_, outer)| {
            if acc >= cap {
                return cap;
            }
            (acc / acc.gcd(&outer))
                .checked_mul(outer)
                .map_or(cap, |l| l.min(cap))
        });
        let membership = if (modulus as u128) <= TABLE_LIMIT as u128 {
            let modulus = modulus as i64;
            let mut good = vec![false; modulus as usize];
            for &(p, outer) in &strata {
                let (p, outer) = (p as i64, outer as i64);
                let mut r = 0;
                while r < modulus {
                    if r % outer != 0 {
                        good[r as usize] = true;
                    }
                    r += p;
                }
            }
            Membership::Table { modulus, good }
        } else {
            Membership::Direct(strata)
        };
        Ok(PairOracle {
            window: *window,
            points: points.to_vec(),
            coords,
            membership,
        })
    }

    /// `points[i] − points[j] ∈ Z(μ̂)`; `false` when the difference is zero.
    pub(crate) fn in_zero_set(&self, i: usize, j: usize) -> bool {
        match &self.membership {
            Membership::Table { modulus, good } => {
                let d = (self.coords[i] - self.coords[j]).rem_euclid(*modulus as i128);
                good[d as usize]
            }
            Membership::Direct(strata) => {
                let d = self.coords[i] - self.coords[j];
                d != 0
                    && strata
                        .iter()
                        .any(|&(p, outer)| d % p == 0 && d % outer != 0)
            }
            Membership::Exact => {
                let d = &self.points[i] - &self.points[j];
                !d.is_zero()
                    && zero_stratum(&self.window, &d)
                        .expect("nonzero difference")
                        .is_some()
            }
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.points.len()
    }
}

/// First pair `(i, j)`, `i < j`, in lexicographic order failing `ok`.
pub(crate) fn first_bad_pair<F>(len: usize, ok: F) -> Option<(usize, usize)>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    (0..len)
        .into_par_iter()
        .find_map_first(|i| ((i + 1)..len).find(|&j| !ok(i, j)).map(|j| (i, j)))
}

// ---------------------------------------------------------------------------
// Bi-zero sets and spectra

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiZeroCheck {
    pub is_bizero: bool,
    pub violating_pair: Option<(Rational, Rational)>,
}

/// `(Λ − Λ) ∖ {0} ⊂ Z(μ̂_window)`, with the lexicographically first violating pair.
pub fn is_bizero(window: &MeasureWindow<'_>, set: &CandidateSet) -> Result<BiZeroCheck> {
    let oracle = PairOracle::new(window, set.elements())?;
    let bad = first_bad_pair(oracle.len(), |i, j| oracle.in_zero_set(j, i));
    Ok(BiZeroCheck {
        is_bizero: bad.is_none(),
        violating_pair: bad.map(|(i, j)| (set.elements[i].clone(), set.elements[j].clone())),
    })
}

/// Atom positions of a finite window, scaled by `B_last` to integers (a multiset).
pub fn window_atoms(window: &MeasureWindow<'_>) -> Result<Vec<BigUint>> {
    let factors = window.factors()?;
    let last_product = factors
        .last()
        .map(|(_, b)| b.clone())
        .unwrap_or_else(BigUint::one);
    let mut atoms = vec![BigUint::zero()];
    for (level, product) in &factors {
        let unit = &last_product / product * level.scale;
        let mut next = Vec::with_capacity(atoms.len() * level.count as usize);
        for d in 0..level.count {
            let shift = &unit * d;
            next.extend(atoms.iter().map(|a| a + &shift));
        }
        atoms = next;
    }
    atoms.sort();
    Ok(atoms)
}

/// Number of distinct atoms and whether every atom is hit once.
pub fn atom_count(window: &MeasureWindow<'_>) -> Result<(usize, bool)> {
    let mut atoms = window_atoms(window)?;
    let total = atoms.len();
    atoms.dedup();
    Ok((atoms.len(), atoms.len() == total))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumStatus {
    Spectrum,
    OrthogonalityFail(Rational, Rational),
    CardinalityFail { found: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumCertificate {
    pub first: usize,
    pub last: usize,
    pub set: CandidateSet,
    pub atom_count: usize,
    /// Some atoms coincide (the iterated digit sum is not direct).
    pub collision: bool,
    pub status: SpectrumStatus,
}

impl SpectrumCertificate {
    pub fn is_spectrum(&self) -> bool {
        self.status == SpectrumStatus::Spectrum
    }
}

/// Decides whether `set` is a spectrum of a finite window.
pub fn is_spectrum(window: &MeasureWindow<'_>, set: &CandidateSet) -> Result<SpectrumCertificate> {
    let last = window
        .last()
        .ok_or_else(|| Error::InvalidWindow("spectrum decision needs a finite window".into()))?;
    let (atoms, direct) = atom_count(window)?;
    is_spectrum_with_atoms(window, set, atoms, !direct, last)
}

pub(crate) fn is_spectrum_with_atoms(
    window: &MeasureWindow<'_>,
    set: &CandidateSet,
    atoms: usize,
    collision: bool,
    last: usize,
) -> Result<SpectrumCertificate> {
    let check = is_bizero(window, set)?;
    let status = match check.violating_pair {
        Some((a, b)) => SpectrumStatus::OrthogonalityFail(a, b),
        None if set.len() != atoms => SpectrumStatus::CardinalityFail {
            found: set.len(),
            expected: atoms,
        },
        None => SpectrumStatus::Spectrum,
    };
    Ok(SpectrumCertificate {
        first: window.first(),
        last,
        set: set.clone(),
        atom_count: atoms,
        collision,
        status,
    })
}

fn first_nondividing(system: &MoranSystem, from: usize, to: usize) -> Result<Option<usize>> {
    for j in from..=to {
        let level = system.level(j)?;
        if level.base % level.count != 0 {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// `Σ_k (B_k/(a_k N_k))·{0, …, N_k−1}`, checked to be a spectrum of `μ_{1..n}`.
pub fn canonical_spectrum(system: &MoranSystem, n: usize) -> Result<CandidateSet> {
    if !system.is_addressable(n) {
        return Err(Error::BeyondHorizon(n));
    }
    if let Some(j) = first_nondividing(system, 2, n)? {
        return Err(Error::NotSpectral(j));
    }
    let window = MeasureWindow::head(system, n)?;
    let mut elements = vec![Rational::zero()];
    for (level, product) in window.factors()? {
        let step = level.stratum_step(&product);
        let mut next = Vec::with_capacity(elements.len() * level.count as usize);
        for d in 0..level.count {
            let shift = &step * Rational::from_integer(BigInt::from(d));
            next.extend(elements.iter().map(|x| x + &shift));
        }
        elements = next;
    }
    let set = CandidateSet::new(elements);
    let cert = is_spectrum(&window, &set)?;
    if !cert.is_spectrum() {
        return Err(Error::VerificationFailed(format!(
            "canonical set failed spectrum check: {:?}",
            cert.status
        )));
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralVerdict {
    Spectral,
    NotSpectral(usize),
    UnknownBeyondHorizon { checked_through: usize },
}

impl fmt::Display for SpectralVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralVerdict::Spectral => f.write_str("Spectral"),
            SpectralVerdict::NotSpectral(j) => write!(f, "NotSpectral({j})"),
            SpectralVerdict::UnknownBeyondHorizon { checked_through } => {
                write!(
                    f,
                    "UnknownBeyondHorizon(checked through level {checked_through})"
                )
            }
        }
    }
}

/// Levels of a formula tail examined before giving up.
const FORMULA_HORIZON: usize = 64;

/// Divisibility test `N_j | b_j` for `2 ≤ j ≤ n`, or for all `j ≥ 2` when `n` is `None`.
pub fn truncation_spectral_verdict(
    system: &MoranSystem,
    n: Option<usize>,
) -> Result<SpectralVerdict> {
    let p = system.prefix().len();
    let through = match (n, system.tail()) {
        (Some(n), _) => {
            if !system.is_addressable(n) {
                return Err(Error::BeyondHorizon(n));
            }
            n
        }
        (None, Tail::None) => {
            return Err(Error::InvalidWindow(
                "finite system has no infinite level".into(),
            ))
        }
        // every block position appears at some index ≥ 2 within one extra level
        (None, Tail::Periodic(block)) => p + block.len() + 1,
        (None, Tail::Formula { .. }) => p + FORMULA_HORIZON,
    };
    let mut last_checked = 1;
    for j in 2..=through {
        let level = match system.level(j) {
            Ok(level) => level,
            Err(Error::LevelOverflow(_)) => break,
            Err(e) => return Err(e),
        };
        if level.base % level.count != 0 {
            return Ok(SpectralVerdict::NotSpectral(j));
        }
        last_checked = j;
    }
    match (n, system.tail()) {
        (None, Tail::Formula { rho, .. }) if !rho.is_one() => {
            Ok(SpectralVerdict::UnknownBeyondHorizon {
                checked_through: last_checked,
            })
        }
        _ => Ok(SpectralVerdict::Spectral),
    }
}

/// Whether `C ∋ 0` is a spectrum of `δ_{{0,…,N−1}}`: `#C = N` and `C mod 1 = {0, 1/N, …}`.
pub fn single_factor_spectrum_check(count: u64, set: &CandidateSet) -> Result<bool> {
    if !set.contains_zero() {
        return Err(Error::MissingZero);
    }
    if set.len() as u64 != count {
        return Ok(false);
    }
    let n = BigInt::from(count);
    let mut residues = BTreeSet::new();
    for x in set {
        let r = rational::frac(x) * Rational::from_integer(n.clone());
        if !r.is_integer() || !residues.insert(r.to_integer()) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Completeness functional

/// `Q_Λ(ξ)` with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QValue {
    pub value: f64,
    pub error_bound: f64,
}

/// `Q_Λ(ξ) = Σ_{λ∈Λ} |μ̂(ξ+λ)|²`.
pub fn q_function(
    window: &MeasureWindow<'_>,
    set: &CandidateSet,
    xi: &Rational,
    eps: f64,
) -> Result<QValue> {
    let mut value = 0.0;
    let mut error_bound = 0.0;
    for lambda in set {
        let t = evaluate_transform(window, &(xi + lambda), eps)?;
        let magnitude = t.norm();
        value += magnitude * magnitude;
        error_bound += 2.0 * magnitude * t.error_bound + t.error_bound * t.error_bound;
    }
    error_bound += set.len() as f64 * f64::EPSILON;
    Ok(QValue { value, error_bound })
}

/// One row of a Q grid.
#[derive(Debug, Clone, PartialEq)]
pub struct QSample {
    pub xi: Rational,
    pub q: QValue,
}

/// `Q_Λ` at `from, from+step, …` up to and including `to`; rows in ascending order.
pub fn q_grid(
    window: &MeasureWindow<'_>,
    set: &CandidateSet,
    from: &Rational,
    to: &Rational,
    step: &Rational,
    eps: f64,
) -> Result<Vec<QSample>> {
    if !step.is_positive() {
        return Err(Error::Precondition("grid step must be positive".into()));
    }
    let count = ((to - from) / step).floor();
    let count = if count.is_negative() {
        0
    } else {
        count.to_integer().to_usize().unwrap_or(0) + 1
    };
    let points: Vec<Rational> = (0..count)
        .map(|i| from + step * Rational::from_integer(BigInt::from(i)))
        .collect();

    // Integer fast path: all ξ + λ share one denominator.
    if window.is_finite() {
        let denominator = points
            .iter()
            .chain(set.iter())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        if let Some(evaluator) = ScaledEvaluator::new(window, &denominator)? {
            let lambdas: Option<Vec<i128>> = set.iter().map(|l| evaluator.scale(l)).collect();
            let xis: Option<Vec<i128>> = points.iter().map(|x| evaluator.scale(x)).collect();
            if let (Some(lambdas), Some(xis)) = (lambdas, xis) {
                let fits = xis
                    .iter()
                    .chain(&lambdas)
                    .all(|v| v.unsigned_abs() < 1 << 98);
                if fits {
                    return Ok(points
                        .into_par_iter()
                        .zip(xis.into_par_iter())
                        .map(|(xi, x)| {
                            let mut value = 0.0;
                            let mut error_bound = 0.0;
                            for &l in &lambdas {
                                let t = evaluator.eval(x + l);
                                let m = t.norm();
                                value += m * m;
                                error_bound +=
                                    2.0 * m * t.error_bound + t.error_bound * t.error_bound;
                            }
                            error_bound += lambdas.len() as f64 * f64::EPSILON;
                            QSample {
                                xi,
                                q: QValue { value, error_bound },
                            }
                        })
                        .collect());
                }
            }
        }
    }
    points
        .into_par_iter()
        .map(|xi| q_function(window, set, &xi, eps).map(|q| QSample { xi, q }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::system::DigitLevel;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn set(values: &[i64]) -> CandidateSet {
        CandidateSet::from_integers(values)
    }

    // Gram matrix of exponentials over the atoms of a finite window; a
    // spectrum gives the identity and full rank.
    fn gram_is_identity(window: &MeasureWindow<'_>, lambdas: &CandidateSet) -> bool {
        let factors = window.factors().unwrap();
        let mut atoms = vec![(0.0f64, 1.0f64)];
        for (level, product) in &factors {
            let unit = level.scale as f64 / product.to_f64().unwrap();
            let mut next = Vec::new();
            for d in 0..level.count {
                for &(x, w) in &atoms {
                    next.push((x + unit * d as f64, w / level.count as f64));
                }
            }
            atoms = next;
        }
        let ls: Vec<f64> = lambdas.iter().map(rational::to_f64).collect();
        for (i, a) in ls.iter().enumerate() {
            for (j, b) in ls.iter().enumerate() {
                let g: Complex64 = atoms
                    .iter()
                    .map(|&(x, w)| Complex64::from_polar(w, 2.0 * PI * (a - b) * x))
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).norm() > 1e-9 {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn bizero_examples() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        assert!(is_bizero(&w, &set(&[0, 2, 8, 10])).unwrap().is_bizero);
        let r = is_bizero(&w, &set(&[0, 4])).unwrap();
        assert!(!r.is_bizero);
        assert_eq!(r.violating_pair, Some((int(0), int(4))));
        assert!(is_bizero(&w, &set(&[0])).unwrap().is_bizero);
    }

    #[test]
    fn spectrum_examples() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let c = is_spectrum(&w, &set(&[0, 2, 8, 10])).unwrap();
        assert_eq!(c.status, SpectrumStatus::Spectrum);
        assert_eq!(c.atom_count, 4);
        assert!(gram_is_identity(&w, &set(&[0, 2, 8, 10])));
        let c = is_spectrum(&w, &set(&[0, 2])).unwrap();
        assert_eq!(
            c.status,
            SpectrumStatus::CardinalityFail {
                found: 2,
                expected: 4
            }
        );

        let s = MoranSystem::finite(&[4], &[2]).unwrap();
        let w = MeasureWindow::head(&s, 1).unwrap();
        assert!(is_spectrum(&w, &set(&[0, 2])).unwrap().is_spectrum());

        let s = MoranSystem::periodic(&[4], &[2]).unwrap();
        let w = MeasureWindow::new(&s, 1, None).unwrap();
        assert!(is_spectrum(&w, &set(&[0, 2])).is_err());
    }

    #[test]
    fn canonical_examples() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        assert_eq!(canonical_spectrum(&s, 2).unwrap(), set(&[0, 2, 8, 10]));
        let s = MoranSystem::finite(&[6, 6], &[3, 3]).unwrap();
        let lambda = canonical_spectrum(&s, 2).unwrap();
        assert_eq!(lambda, set(&[0, 2, 4, 12, 14, 16, 24, 26, 28]));
        assert!(gram_is_identity(
            &MeasureWindow::head(&s, 2).unwrap(),
            &lambda
        ));
        let s = MoranSystem::finite(&[4, 6], &[3, 2]).unwrap();
        let lambda = canonical_spectrum(&s, 2).unwrap();
        let expected = CandidateSet::new(vec![
            int(0),
            ratio(4, 3),
            ratio(8, 3),
            int(12),
            ratio(40, 3),
            ratio(44, 3),
        ]);
        assert_eq!(lambda, expected);
        assert!(lambda.iter().all(|x| (x * int(3)).is_integer()));
        assert!(gram_is_identity(
            &MeasureWindow::head(&s, 2).unwrap(),
            &lambda
        ));
        let s = MoranSystem::finite(&[2, 3], &[2, 2]).unwrap();
        assert_eq!(canonical_spectrum(&s, 2), Err(Error::NotSpectral(2)));
    }

    #[test]
    fn verdict_examples() {
        let s = MoranSystem::new(
            vec![DigitLevel::new(4, 3)],
            Tail::Periodic(vec![DigitLevel::new(6, 6)]),
        )
        .unwrap();
        assert_eq!(
            truncation_spectral_verdict(&s, None).unwrap(),
            SpectralVerdict::Spectral
        );
        let s = MoranSystem::periodic(&[6], &[4]).unwrap();
        assert_eq!(
            truncation_spectral_verdict(&s, None).unwrap(),
            SpectralVerdict::NotSpectral(2)
        );
        assert_eq!(
            truncation_spectral_verdict(&s, Some(1)).unwrap(),
            SpectralVerdict::Spectral
        );

        let f = crate::system::parse_system(
            r#"{"prefix":{"b":[4],"N":[2]},"tail":{"kind":"formula","b":4,"c":"1/4","rho":"3/2"}}"#,
        )
        .unwrap();
        // counts stay at 2 for a while, then exceed the base
        assert!(matches!(
            truncation_spectral_verdict(&f, None).unwrap(),
            SpectralVerdict::NotSpectral(_)
        ));
        let f = crate::system::parse_system(
            r#"{"prefix":{"b":[4],"N":[2]},"tail":{"kind":"formula","b":4,"c":2,"rho":1}}"#,
        )
        .unwrap();
        assert_eq!(
            truncation_spectral_verdict(&f, None).unwrap(),
            SpectralVerdict::Spectral
        );
        let f = crate::system::parse_system(
            r#"{"prefix":{"b":[6],"N":[2]},"tail":{"kind":"formula","b":1024,"c":"1/1000000000000000000000","rho":2}}"#,
        )
        .unwrap();
        assert!(matches!(
            truncation_spectral_verdict(&f, None).unwrap(),
            SpectralVerdict::UnknownBeyondHorizon { .. }
        ));
        let fin = MoranSystem::finite(&[4], &[2]).unwrap();
        assert!(truncation_spectral_verdict(&fin, None).is_err());
    }

    #[test]
    fn single_factor_examples() {
        let c = |v: Vec<Rational>| CandidateSet::new(v);
        assert!(single_factor_spectrum_check(2, &c(vec![int(0), ratio(1, 2)])).unwrap());
        assert!(single_factor_spectrum_check(2, &c(vec![int(0), ratio(3, 2)])).unwrap());
        assert!(
            single_factor_spectrum_check(3, &c(vec![int(0), ratio(1, 3), ratio(5, 3)])).unwrap()
        );
        assert!(
            !single_factor_spectrum_check(3, &c(vec![int(0), ratio(1, 3), ratio(4, 3)])).unwrap()
        );
        assert!(!single_factor_spectrum_check(3, &c(vec![int(0), ratio(1, 3)])).unwrap());
        assert!(single_factor_spectrum_check(2, &c(vec![ratio(1, 2)])).is_err());
    }

    #[test]
    fn q_examples() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let grid = q_grid(
            &w,
            &set(&[0, 2, 8, 10]),
            &int(0),
            &int(1),
            &ratio(1, 100),
            1e-9,
        )
        .unwrap();
        assert_eq!(grid.len(), 101);
        assert!(grid.iter().all(|r| (r.q.value - 1.0).abs() < 1e-9));

        let q = q_function(&w, &set(&[0, 2]), &int(1), 1e-9).unwrap();
        let c = |x: f64| x.cos().powi(2);
        let oracle = c(PI / 4.0) * c(PI / 16.0) + c(3.0 * PI / 4.0) * c(3.0 * PI / 16.0);
        assert!((q.value - oracle).abs() < 1e-12);
        assert!((q.value - 0.8266).abs() < 1e-4);

        let q = q_function(&w, &set(&[0, 2]), &int(0), 1e-9).unwrap();
        assert_eq!(q.value, 1.0);
    }

    #[test]
    fn q_grid_fast_path_matches_exact_path() {
        let s = MoranSystem::finite(&[4, 6], &[3, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let lambda = canonical_spectrum(&s, 2).unwrap();
        let grid = q_grid(&w, &lambda, &ratio(-1, 2), &int(2), &ratio(1, 7), 1e-9).unwrap();
        for row in &grid {
            let slow = q_function(&w, &lambda, &row.xi, 1e-9).unwrap();
            assert!((row.q.value - slow.value).abs() < 1e-12);
        }
    }

    #[test]
    fn candidate_text_format() {
        let c = CandidateSet::parse("# spectrum\n10\n2 # two\n\n8\n0\n4/3\n").unwrap();
        assert_eq!(c.to_text(), "0\n4/3\n2\n8\n10\n");
        assert!(CandidateSet::parse("x\n").is_err());
    }

    #[test]
    fn atoms_with_collisions() {
        let s = MoranSystem::finite(&[2, 2], &[2, 3]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        assert_eq!(atom_count(&w).unwrap(), (5, false));
        let w = MeasureWindow::new(&s, 2, Some(2)).unwrap();
        assert_eq!(atom_count(&w).unwrap(), (3, true));
    }

    #[test]
    fn oracle_paths_agree() {
        // the second system's modulus exceeds the lookup-table limit
        for (bases, counts, step) in [
            ([7, 9, 10], [3, 3, 5], 7),
            ([1000, 1009, 997], [4, 7, 3], 1000 * 1009 / 7),
        ] {
            let s = MoranSystem::finite(&bases, &counts).unwrap();
            let w = MeasureWindow::head(&s, 3).unwrap();
            let points: Vec<Rational> = (-40..40).map(|i| ratio(i * step, 3)).collect();
            let fast = PairOracle::new(&w, &points).unwrap();
            assert!(!matches!(fast.membership, Membership::Exact));
            for i in 0..points.len() {
                for j in 0..points.len() {
                    let d = &points[i] - &points[j];
                    let exact = !d.is_zero() && zero_stratum(&w, &d).unwrap().is_some();
                    assert_eq!(fast.in_zero_set(i, j), exact, "{} {}", points[i], points[j]);
                }
            }
        }
    }
}
