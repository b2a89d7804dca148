//! Fourier transforms of measure windows and their exact zero sets.
//!
//! Level `k` contributes the factor
//! `δ̂(ξ) = (1/N)·Σ_{j<N} e^{−2πi·j·a·ξ/B_k}`, whose zeros are exactly the
//! stratum `(B_k/(a·N))·(Z ∖ N·Z)`. Zero membership is always decided on the
//! rational argument; floating point is only used for nonzero magnitudes.

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rational::{self, from_biguint, Rational};
use crate::system::{DigitLevel, MoranSystem, Tail};

const ULP: f64 = f64::EPSILON / 2.0; // 2^-53

/// Smallest `ε` accepted by infinite-window evaluation.
pub const ROUNDING_FLOOR: f64 = 1.0 / (1u64 << 43) as f64;

/// The partial convolution `μ_{first..last}`; `last == None` is the infinite tail.
#[derive(Debug, Clone, Copy)]
pub struct MeasureWindow<'a> {
    system: &'a MoranSystem,
    first: usize,
    last: Option<usize>,
}

impl<'a> MeasureWindow<'a> {
    pub fn new(system: &'a MoranSystem, first: usize, last: Option<usize>) -> Result<Self> {
        if first == 0 {
            return Err(Error::InvalidWindow("levels are numbered from 1".into()));
        }
        match last {
            Some(last) => {
                if last < first {
                    return Err(Error::InvalidWindow(format!(
                        "empty window {first}..{last}"
                    )));
                }
                if !system.is_addressable(last) {
                    return Err(Error::BeyondHorizon(last));
                }
            }
            None => {
                if !matches!(system.tail(), Tail::Periodic(_)) {
                    return Err(Error::InvalidWindow(
                        "infinite windows need a periodic tail".into(),
                    ));
                }
            }
        }
        Ok(MeasureWindow {
            system,
            first,
            last,
        })
    }

    /// Window `1..=n`.
    pub fn head(system: &'a MoranSystem, n: usize) -> Result<Self> {
        Self::new(system, 1, Some(n))
    }

    pub fn system(&self) -> &'a MoranSystem {
        self.system
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn last(&self) -> Option<usize> {
        self.last
    }

    pub fn is_finite(&self) -> bool {
        self.last.is_some()
    }

    /// `(level, B_k)` for every level of a finite window.
    pub fn factors(&self) -> Result<Vec<(DigitLevel, BigUint)>> {
        let last = self
            .last
            .ok_or_else(|| Error::InvalidWindow("window is infinite".into()))?;
        self.factors_through(last)
    }

    fn factors_through(&self, last: usize) -> Result<Vec<(DigitLevel, BigUint)>> {
        let mut out = Vec::with_capacity(last + 1 - self.first.min(last + 1));
        let mut product = BigUint::one();
        for k in 1..=last {
            let level = self.system.level(k)?;
            product *= level.base;
            if k >= self.first {
                out.push((level, product.clone()));
            }
        }
        Ok(out)
    }
}

/// A value of `μ̂` with a rigorous absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub error_bound: f64,
    pub exact_zero: bool,
}

impl TransformValue {
    const ONE: TransformValue = TransformValue {
        value: Complex64::new(1.0, 0.0),
        error_bound: 0.0,
        exact_zero: false,
    };
    const ZERO: TransformValue = TransformValue {
        value: Complex64::new(0.0, 0.0),
        error_bound: 0.0,
        exact_zero: true,
    };

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

/// `m` with `λ = (B/(a·N))·m` and `m ∉ N·Z`, if `λ` lies in this level's stratum.
pub fn stratum_multiplier(
    level: &DigitLevel,
    product: &BigUint,
    lambda: &Rational,
) -> Option<BigInt> {
    if level.count < 2 || lambda.is_zero() {
        return None;
    }
    let m = lambda / level.stratum_step(product);
    if !m.is_integer() {
        return None;
    }
    let m = m.to_integer();
    if m.is_multiple_of(&BigInt::from(level.count)) {
        None
    } else {
        Some(m)
    }
}

/// Transform of the single factor `δ_{(a/B)·{0,…,N−1}}` at `ξ`.
pub fn factor_transform(level: &DigitLevel, product: &BigUint, xi: &Rational) -> TransformValue {
    let t = xi * Rational::from_integer(BigInt::from(level.scale)) / from_biguint(product);
    let u = rational::frac(&t);
    if u.is_zero() {
        return TransformValue::ONE;
    }
    if stratum_multiplier(level, product, xi).is_some() {
        return TransformValue::ZERO;
    }
    dirichlet(level.count, rational::unit_to_f64(&u))
}

/// `(1/N)·Σ_{j<N} e^{−2πi·j·x}` for non-integer `x ∈ (0, 1)` away from the zeros.
fn dirichlet(count: u64, x: f64) -> TransformValue {
    // Reduce to |x| ≤ 1/2 so the quotient stays well conditioned.
    let x = if x > 0.5 { x - 1.0 } else { x };
    let n = count as f64;
    let ratio = if (n * x).abs() < 1e-4 {
        // sin(Nπx)/(N sin πx) = 1 − (πx)²(N²−1)/6 + O((Nπx)⁴); also covers x
        // underflowing to 0 for frequencies far below 1/B_k
        1.0 - (PI * x).powi(2) * (n * n - 1.0) / 6.0
    } else {
        (PI * n * x).sin() / (n * (PI * x).sin())
    };
    let phase = Complex64::from_polar(1.0, -PI * (n - 1.0) * x);
    TransformValue {
        value: phase * ratio,
        error_bound: (4.0 * PI * n + 16.0) * ULP,
        exact_zero: false,
    }
}

/// Evaluator for a finite window at frequencies `x/D` with a fixed common
/// denominator `D`, using 128-bit integer reductions instead of big rationals.
#[derive(Debug, Clone)]
pub struct ScaledEvaluator {
    denominator: BigInt,
    /// `(count, scale, D·B_k)` per level
    levels: Vec<(u64, i128, i128)>,
}

const FAST_LIMIT: u32 = 100;

impl ScaledEvaluator {
    /// `None` when the window's products are too large for the integer path.
    pub fn new(window: &MeasureWindow<'_>, denominator: &BigInt) -> Result<Option<Self>> {
        let mut levels = Vec::new();
        for (level, product) in window.factors()? {
            let den = BigInt::from(product) * denominator;
            if den.bits() > u64::from(FAST_LIMIT)
                || level.scale >= 1 << 20
                || level.count >= 1 << 20
            {
                return Ok(None);
            }
            levels.push((
                level.count,
                level.scale as i128,
                i128::try_from(den).unwrap(),
            ));
        }
        Ok(Some(ScaledEvaluator {
            denominator: denominator.clone(),
            levels,
        }))
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    /// `x/D` as a scaled integer, if it fits.
    pub fn scale(&self, xi: &Rational) -> Option<i128> {
        let scaled = xi * Rational::from_integer(self.denominator.clone());
        if !scaled.is_integer() || scaled.numer().bits() > 100 {
            return None;
        }
        i128::try_from(scaled.to_integer()).ok()
    }

    /// `μ̂(x/D)`.
    pub fn eval(&self, x: i128) -> TransformValue {
        multiply(self.levels.iter().map(|&(count, scale, den)| {
            let u = (x % den * scale).rem_euclid(den);
            if u == 0 {
                TransformValue::ONE
            } else if (u * count as i128) % den == 0 {
                TransformValue::ZERO
            } else {
                dirichlet(count, u as f64 / den as f64)
            }
        }))
    }
}

/// Level of the first stratum containing `λ`, with its multiplier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroStratumHit {
    pub level: usize,
    pub multiplier: BigInt,
}

impl ZeroStratumHit {
    /// Rebuilds `λ = (B_k/(a_k·N_k))·multiplier`.
    pub fn frequency(&self, system: &MoranSystem) -> Result<Rational> {
        let level = system.level(self.level)?;
        let product = system.level_product(self.level)?;
        Ok(level.stratum_step(&product) * Rational::from_integer(self.multiplier.clone()))
    }
}

/// Smallest level `k` of the window with `λ ∈ (B_k/(a_k N_k))·(Z ∖ N_k Z)`.
pub fn zero_stratum(
    window: &MeasureWindow<'_>,
    lambda: &Rational,
) -> Result<Option<ZeroStratumHit>> {
    if lambda.is_zero() {
        return Err(Error::ZeroFrequency);
    }
    let system = window.system;
    if let Some(last) = window.last {
        let mut product = BigUint::one();
        for k in 1..=last {
            let level = system.level(k)?;
            product *= level.base;
            if k < window.first {
                continue;
            }
            if let Some(multiplier) = stratum_multiplier(&level, &product, lambda) {
                return Ok(Some(ZeroStratumHit {
                    level: k,
                    multiplier,
                }));
            }
        }
        return Ok(None);
    }
    let block = match system.tail() {
        Tail::Periodic(block) => block,
        _ => unreachable!("infinite windows are periodic"),
    };
    // Past the prefix, B_k/(a_k N_k) ≥ B_k/max(a·N) grows with k; once that
    // exceeds |λ| no later stratum can contain λ.
    let max_weight = block.iter().map(|l| l.scale * l.count).max().unwrap_or(1);
    let max_weight = Rational::from_integer(BigInt::from(max_weight));
    let magnitude = lambda.abs();
    let p = system.prefix().len();
    let mut product = BigUint::one();
    for k in 1.. {
        let level = system.level(k)?;
        product *= level.base;
        if k > p && from_biguint(&product) / &max_weight > magnitude {
            return Ok(None);
        }
        if k < window.first {
            continue;
        }
        if let Some(multiplier) = stratum_multiplier(&level, &product, lambda) {
            return Ok(Some(ZeroStratumHit {
                level: k,
                multiplier,
            }));
        }
    }
    unreachable!()
}

fn multiply(factors: impl Iterator<Item = TransformValue>) -> TransformValue {
    let mut acc = TransformValue::ONE;
    let mut count = 0usize;
    for f in factors {
        if f.exact_zero {
            return TransformValue::ZERO;
        }
        acc.value *= f.value;
        acc.error_bound += f.error_bound;
        count += 1;
    }
    acc.error_bound += 4.0 * count as f64 * ULP;
    acc
}

/// Certified upper bound for π used in the tail estimate (355/113 > π).
fn pi_upper() -> Rational {
    rational::ratio(355, 113)
}

/// Smallest `n ≥ first − 1` with `π·|ξ|·Σ_{k>n} (N_k−1)a_k/B_k < ε/2`.
pub fn truncation_cutoff(window: &MeasureWindow<'_>, xi: &Rational, eps: f64) -> Result<usize> {
    let system = window.system;
    let target = rational::from_f64(eps / 2.0).ok_or(Error::PrecisionUnreachable(eps))?;
    let span = |l: &DigitLevel| BigInt::from(l.count - 1) * BigInt::from(l.scale);
    let factor = pi_upper() * xi.abs();
    let mut n = window.first - 1;
    let mut tail = system.periodic_tail_series(n, span)?;
    let mut product = system.level_product_or_one(n)?;
    while &tail * &factor >= target {
        n += 1;
        let level = system.level(n)?;
        product *= level.base;
        tail -= Rational::new(span(&level), BigInt::from(product.clone()));
    }
    Ok(n)
}

/// `μ̂_window(ξ)`. Finite windows multiply every factor; infinite windows
/// truncate at [`truncation_cutoff`] and add the certified tail bound.
pub fn evaluate_transform(
    window: &MeasureWindow<'_>,
    xi: &Rational,
    eps: f64,
) -> Result<TransformValue> {
    if xi.is_zero() {
        return Ok(TransformValue::ONE);
    }
    if window.is_finite() {
        let factors = window.factors()?;
        return Ok(multiply(
            factors.iter().map(|(l, b)| factor_transform(l, b, xi)),
        ));
    }
    if !(eps.is_finite() && eps >= ROUNDING_FLOOR) {
        return Err(Error::PrecisionUnreachable(eps));
    }
    if zero_stratum(window, xi)?.is_some() {
        return Ok(TransformValue::ZERO);
    }
    let cutoff = truncation_cutoff(window, xi, eps)?;
    if cutoff < window.first {
        // the tail bound alone is below ε/2
        let mut v = TransformValue::ONE;
        v.error_bound = eps / 2.0;
        return Ok(v);
    }
    let factors = window.factors_through(cutoff)?;
    let mut v = multiply(factors.iter().map(|(l, b)| factor_transform(l, b, xi)));
    v.error_bound += eps / 2.0;
    Ok(v)
}

/// Evaluates a batch of frequencies in parallel; output order follows `xs`.
pub fn evaluate_many(
    window: &MeasureWindow<'_>,
    xs: &[Rational],
    eps: f64,
) -> Result<Vec<TransformValue>> {
    xs.par_iter()
        .map(|xi| evaluate_transform(window, xi, eps))
        .collect()
}

impl MoranSystem {
    /// `B_n`, with `B_0 = 1`.
    pub(crate) fn level_product_or_one(&self, n: usize) -> Result<BigUint> {
        if n == 0 {
            Ok(BigUint::one())
        } else {
            self.level_product(n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn deep_levels_stay_finite() {
        // B_40 is far beyond f64 resolution of ξ/B_k
        let s = MoranSystem::periodic(&[6, 7], &[5, 2]).unwrap();
        let w = MeasureWindow::head(&s, 40).unwrap();
        let v = evaluate_transform(&w, &ratio(-2517, 55), 1e-12).unwrap();
        assert!(v.value.norm().is_finite());
        let small = dirichlet(5, 1e-300);
        assert!((small.value.re - 1.0).abs() < 1e-15);
    }

    // (1/N) Σ_j e^{−2πi j a ξ / B} summed term by term.
    fn direct(levels: &[(u64, u64, u64)], xi: f64) -> Complex64 {
        let mut product = 1.0;
        let mut acc = Complex64::new(1.0, 0.0);
        for &(b, n, a) in levels {
            product *= b as f64;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                s += Complex64::from_polar(1.0, -2.0 * PI * (j * a) as f64 * xi / product);
            }
            acc *= s / n as f64;
        }
        acc
    }

    #[test]
    fn single_factor_examples() {
        let level = DigitLevel::new(4, 2);
        let b = BigUint::from(4u32);
        let v = factor_transform(&level, &b, &int(0));
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        assert!(!v.exact_zero);
        let v = factor_transform(&level, &b, &int(2));
        assert!(v.exact_zero);
        assert_eq!(v.norm(), 0.0);
        let v = factor_transform(&level, &b, &int(1));
        assert!((v.norm() - (PI / 4.0).cos()).abs() < 1e-15);
        assert!((v.value - direct(&[(4, 2, 1)], 1.0)).norm() < 1e-14);
    }

    #[test]
    fn finite_window_product() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let v = evaluate_transform(&w, &int(1), 1e-9).unwrap();
        let oracle = (PI / 4.0).cos() * (PI / 16.0).cos();
        assert!((v.norm() - oracle).abs() < 1e-14);
        assert!((v.norm() - 0.69352).abs() < 1e-5);
        assert_eq!(
            evaluate_transform(&w, &int(0), 1e-9).unwrap().value,
            Complex64::new(1.0, 0.0)
        );
    }

    #[test]
    fn matches_direct_summation_with_scales() {
        let s = MoranSystem::new(
            vec![
                DigitLevel::scaled(6, 3, 1),
                DigitLevel::scaled(6, 2, 3),
                DigitLevel::new(5, 4),
            ],
            Tail::None,
        )
        .unwrap();
        let w = MeasureWindow::head(&s, 3).unwrap();
        for (p, q) in [(1, 3), (7, 5), (-11, 4), (123, 7), (5, 1)] {
            let xi = ratio(p, q);
            let v = evaluate_transform(&w, &xi, 1e-9).unwrap();
            let d = direct(&[(6, 3, 1), (6, 2, 3), (5, 4, 1)], p as f64 / q as f64);
            assert!((v.value - d).norm() < 1e-12, "{xi}");
            assert!(v.error_bound < 1e-12);
        }
    }

    #[test]
    fn infinite_window_zero() {
        let s = MoranSystem::periodic(&[4], &[2]).unwrap();
        let w = MeasureWindow::new(&s, 1, None).unwrap();
        let v = evaluate_transform(&w, &int(2), 1e-9).unwrap();
        assert!(v.exact_zero);
        assert_eq!(evaluate_transform(&w, &int(0), 1e-9).unwrap().value.re, 1.0);
    }

    #[test]
    fn precision_floor_is_reported() {
        let s = MoranSystem::periodic(&[4], &[2]).unwrap();
        let w = MeasureWindow::new(&s, 1, None).unwrap();
        assert!(matches!(
            evaluate_transform(&w, &int(1), 1e-20),
            Err(Error::PrecisionUnreachable(_))
        ));
    }

    #[test]
    fn zero_stratum_examples() {
        let s = MoranSystem::periodic(&[4], &[2]).unwrap();
        let w = MeasureWindow::new(&s, 1, None).unwrap();
        let hit = zero_stratum(&w, &int(2)).unwrap().unwrap();
        assert_eq!((hit.level, hit.multiplier.clone()), (1, BigInt::from(1)));
        assert_eq!(hit.frequency(&s).unwrap(), int(2));
        let hit = zero_stratum(&w, &int(8)).unwrap().unwrap();
        assert_eq!((hit.level, hit.multiplier), (2, BigInt::from(1)));
        assert_eq!(zero_stratum(&w, &int(4)).unwrap(), None);
        assert_eq!(zero_stratum(&w, &int(0)), Err(Error::ZeroFrequency));

        let s = MoranSystem::finite(&[4, 6], &[3, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let hit = zero_stratum(&w, &ratio(4, 3)).unwrap().unwrap();
        assert_eq!((hit.level, hit.multiplier), (1, BigInt::from(1)));
    }

    #[test]
    fn window_validation() {
        let s = MoranSystem::finite(&[4, 6], &[3, 2]).unwrap();
        assert!(MeasureWindow::new(&s, 1, None).is_err());
        assert!(MeasureWindow::new(&s, 2, Some(1)).is_err());
        assert!(MeasureWindow::new(&s, 0, Some(1)).is_err());
        assert!(MeasureWindow::new(&s, 1, Some(3)).is_err());
        let f = crate::system::parse_system(
            r#"{"prefix":{"b":[3],"N":[2]},"tail":{"kind":"formula","b":3,"c":1,"rho":2}}"#,
        )
        .unwrap();
        assert!(MeasureWindow::new(&f, 1, None).is_err());
    }

    #[test]
    fn infinite_tail_window_from_later_level() {
        let s = MoranSystem::periodic(&[4], &[2]).unwrap();
        let w = MeasureWindow::new(&s, 2, None).unwrap();
        // 2 lies only in the level-1 stratum
        assert_eq!(zero_stratum(&w, &int(2)).unwrap(), None);
        assert_eq!(zero_stratum(&w, &int(8)).unwrap().unwrap().level, 2);
        let v = evaluate_transform(&w, &ratio(1, 3), 1e-10).unwrap();
        let mut oracle = 1.0;
        for k in 2..40 {
            oracle *= (PI / 3.0 / 4f64.powi(k)).cos();
        }
        assert!((v.norm() - oracle).abs() <= 1e-10);
    }

    #[test]
    fn stratum_needs_nontrivial_level() {
        let trivial = DigitLevel::new(4, 1);
        assert_eq!(
            stratum_multiplier(&trivial, &BigUint::from(4u32), &int(2)),
            None
        );
    }

    #[test]
    fn negative_frequency_is_conjugate() {
        let s = MoranSystem::finite(&[5, 3], &[3, 2]).unwrap();
        let w = MeasureWindow::head(&s, 2).unwrap();
        let a = evaluate_transform(&w, &ratio(7, 4), 1e-9).unwrap().value;
        let b = evaluate_transform(&w, &ratio(-7, 4), 1e-9).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-14);
    }
}
