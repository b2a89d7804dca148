//! Truncated spectral measures as convolution factors of Lebesgue measure.
//!
//! When `N_k | b_k` for `k ≥ 2`, the level-`n` truncation convolved with its
//! canonical complement is the uniform measure on `{0,…,L−1}/B_n`, whose CDF
//! stays within `1/L` of Lebesgue measure on `[0, N_1/b_1]`.

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::spectra::{
    canonical_spectrum, truncation_spectral_verdict, CandidateSet, SpectralVerdict,
};
use crate::system::{serialize_system, MoranSystem};
use crate::tiling::canonical_complement;

/// True iff every `s ∈ {0,…,L−1}` has exactly one representation `d + c`
/// and no sum falls outside that range. Multiplicities count.
pub fn convolve_uniform_check(digits: &[u64], complement: &[u64], length: u64) -> bool {
    if (digits.len() as u128) * (complement.len() as u128) != length as u128 {
        return false;
    }
    let mut counts = vec![0u8; length as usize];
    for &d in digits {
        for &c in complement {
            let Some(slot) = d.checked_add(c).and_then(|s| counts.get_mut(s as usize)) else {
                return false;
            };
            if *slot == 1 {
                return false;
            }
            *slot = 1;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FugledeReport {
    pub level: usize,
    pub verdict: SpectralVerdict,
    pub spectrum: Option<CandidateSet>,
    pub complement: Option<MoranSystem>,
    pub convolution_uniform: bool,
    /// `[0, N_1/b_1]`
    pub interval: (Rational, Rational),
    /// `L = N_1·b_2⋯b_n`, present in the spectral case.
    pub length: Option<u64>,
    /// `1/L` in the spectral case.
    pub kolmogorov_distance: Option<Rational>,
}

/// Runs the divisibility verdict and, when spectral, builds and certifies the
/// canonical spectrum, the complement and the uniform convolution.
pub fn fuglede_report(system: &MoranSystem, n: usize) -> Result<FugledeReport> {
    let first = system.level(1)?;
    if !system.levels(1, n)?.iter().all(|l| l.scale == 1) {
        return Err(Error::Precondition("report needs unit scales".into()));
    }
    let interval = (
        Rational::from_integer(0.into()),
        Rational::new(BigInt::from(first.count), BigInt::from(first.base)),
    );
    let verdict = truncation_spectral_verdict(system, Some(n))?;
    let mut report = FugledeReport {
        level: n,
        verdict,
        spectrum: None,
        complement: None,
        convolution_uniform: false,
        interval,
        length: None,
        kolmogorov_distance: None,
    };
    if verdict == SpectralVerdict::Spectral {
        report.spectrum = Some(canonical_spectrum(system, n)?);
        let cert = canonical_complement(system, n)?;
        report.convolution_uniform = cert.verified;
        report.length = Some(cert.length);
        report.kolmogorov_distance = Some(Rational::new(BigInt::one(), BigInt::from(cert.length)));
        report.complement = Some(cert.complement);
    }
    Ok(report)
}

impl FugledeReport {
    pub fn to_json(&self) -> Value {
        let text = |q: &Rational| Value::String(format_rational(q));
        json!({
            "level": self.level,
            "verdict": self.verdict.to_string(),
            "spectrum": self.spectrum.as_ref().map(|s| s.iter().map(text).collect::<Vec<_>>()),
            "complement": self.complement.as_ref().map(|c| {
                serde_json::from_str::<Value>(&serialize_system(c)).expect("serializer emits JSON")
            }),
            "convolution_uniform": self.convolution_uniform,
            "interval": [text(&self.interval.0), text(&self.interval.1)],
            "length": self.length,
            "kolmogorov_distance": self.kolmogorov_distance.as_ref().map(text),
        })
    }

    /// Aligned `key  value` lines.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<(&str, String)> = vec![
            ("level", self.level.to_string()),
            ("verdict", self.verdict.to_string()),
            (
                "interval",
                format!(
                    "[{}, {}]",
                    format_rational(&self.interval.0),
                    format_rational(&self.interval.1)
                ),
            ),
            ("convolution_uniform", self.convolution_uniform.to_string()),
        ];
        if let Some(length) = self.length {
            rows.push(("L", length.to_string()));
        }
        if let Some(d) = &self.kolmogorov_distance {
            rows.push(("kolmogorov_distance", format_rational(d)));
        }
        if let Some(s) = &self.spectrum {
            rows.push(("spectrum_size", s.len().to_string()));
        }
        if let Some(c) = &self.complement {
            rows.push(("complement", serialize_system(c)));
        }
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}
