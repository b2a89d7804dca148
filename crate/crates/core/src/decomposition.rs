//! Suitable decompositions of a spectrum of `μ_{1..n}` along a split
//! `μ_{1..n} = ν ∗ ω` with `ν = μ_{1..k}` and `ω = μ_{k+1..n}`.
//!
//! Given a maximal bi-zero set `𝒜 ∋ 0` of `ν` inside `Λ`, each `α ∈ 𝒜` owns
//! `Λ_α = {λ ∈ Λ : λ − α ∈ Z(ω̂) ∖ Z(ν̂)} ∪ {α}`. For a spectrum the parts
//! partition `Λ`, `𝒜` is a spectrum of `ν`, and every `Λ_α` is a spectrum of `ω`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fourier::MeasureWindow;
use crate::rational::Rational;
use crate::spectra::{
    atom_count, first_bad_pair, is_spectrum, is_spectrum_with_atoms, CandidateSet, PairOracle,
};
use crate::system::MoranSystem;

/// Greedy ascending scan from `{0}`: keep `λ` when it is orthogonal to
/// everything kept so far under `μ̂_head`.
pub fn maximal_bizero_subset(head: &MeasureWindow<'_>, set: &CandidateSet) -> Result<CandidateSet> {
    if !set.contains_zero() {
        return Err(Error::MissingZero);
    }
    let oracle = PairOracle::new(head, set.elements())?;
    let zero = set.iter().position(Zero::is_zero).expect("checked above");
    let mut kept = vec![zero];
    for i in 0..set.len() {
        if i != zero && kept.iter().all(|&j| oracle.in_zero_set(i, j)) {
            kept.push(i);
        }
    }
    Ok(kept
        .into_iter()
        .map(|i| set.elements()[i].clone())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionResult {
    pub system: MoranSystem,
    pub level: usize,
    pub split: usize,
    pub spectrum: CandidateSet,
    pub head: CandidateSet,
    /// `α ↦ Λ_α`
    pub parts: BTreeMap<Rational, CandidateSet>,
}

/// Decomposes a verified spectrum of `μ_{1..n}` with respect to `(μ_{1..k}, μ_{k+1..n})`.
pub fn suitable_decomposition(
    system: &MoranSystem,
    n: usize,
    k: usize,
    spectrum: &CandidateSet,
) -> Result<DecompositionResult> {
    if k == 0 || k >= n {
        return Err(Error::Precondition(format!(
            "split k={k} must satisfy 1 ≤ k < n={n}"
        )));
    }
    if !spectrum.contains_zero() {
        return Err(Error::MissingZero);
    }
    let whole = MeasureWindow::head(system, n)?;
    if !is_spectrum(&whole, spectrum)?.is_spectrum() {
        return Err(Error::NotASpectrum);
    }
    let nu = MeasureWindow::head(system, k)?;
    let omega = MeasureWindow::new(system, k + 1, Some(n))?;
    let head = maximal_bizero_subset(&nu, spectrum)?;

    let points = spectrum.elements();
    let in_nu = PairOracle::new(&nu, points)?;
    let in_omega = PairOracle::new(&omega, points)?;
    let mut parts = BTreeMap::new();
    for alpha in &head {
        let a = points.binary_search(alpha).expect("head is a subset");
        let part: CandidateSet = (0..points.len())
            .filter(|&i| i == a || (in_omega.in_zero_set(i, a) && !in_nu.in_zero_set(i, a)))
            .map(|i| points[i].clone())
            .collect();
        parts.insert(alpha.clone(), part);
    }
    Ok(DecompositionResult {
        system: system.clone(),
        level: n,
        split: k,
        spectrum: spectrum.clone(),
        head,
        parts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Clause {
    /// parts are disjoint and cover `Λ`, with `α ∈ Λ_α`
    Partition,
    /// `𝒜` is a spectrum of `μ_{1..k}`
    HeadSpectrum,
    /// each `Λ_α` is a spectrum of `μ_{k+1..n}`
    PartSpectra,
    /// `(Λ_α−Λ_α)∖{0} ⊂ Z(ω̂)∖Z(ν̂)` and `Λ_α−Λ_α' ⊂ Z(ν̂)`
    Containments,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Partition => "(a) partition",
            Clause::HeadSpectrum => "(b) head spectrum",
            Clause::PartSpectra => "(c) part spectra",
            Clause::Containments => "(d) containments",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseFailure {
    pub clause: Clause,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecompositionReport {
    pub failures: Vec<ClauseFailure>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn clause_passed(&self, clause: Clause) -> bool {
        self.failures.iter().all(|f| f.clause != clause)
    }

    fn fail(&mut self, clause: Clause, witness: String) {
        self.failures.push(ClauseFailure { clause, witness });
    }
}

/// Checks the four decomposition clauses exactly; each failure carries a witness.
pub fn verify_decomposition(result: &DecompositionResult) -> Result<DecompositionReport> {
    let mut report = DecompositionReport::default();
    let system = &result.system;
    let (n, k) = (result.level, result.split);
    let nu = MeasureWindow::head(system, k)?;
    let omega = MeasureWindow::new(system, k + 1, Some(n))?;

    // (a)
    let mut owner: BTreeMap<&Rational, &Rational> = BTreeMap::new();
    for (alpha, part) in &result.parts {
        if !part.contains(alpha) {
            report.fail(
                Clause::Partition,
                format!("{alpha} is missing from its own part"),
            );
        }
        for x in part {
            if let Some(previous) = owner.insert(x, alpha) {
                report.fail(
                    Clause::Partition,
                    format!("{x} lies in both the part of {previous} and the part of {alpha}"),
                );
            }
            if !result.spectrum.contains(x) {
                report.fail(
                    Clause::Partition,
                    format!("{x} is not an element of the spectrum"),
                );
            }
        }
    }
    if let Some(x) = result.spectrum.iter().find(|x| !owner.contains_key(x)) {
        report.fail(Clause::Partition, format!("{x} belongs to no part"));
    }
    if result.head.iter().ne(result.parts.keys()) {
        report.fail(
            Clause::Partition,
            "part labels differ from the head set".into(),
        );
    }

    // (b)
    let head_cert = is_spectrum(&nu, &result.head)?;
    if !head_cert.is_spectrum() {
        report.fail(Clause::HeadSpectrum, format!("{:?}", head_cert.status));
    }

    // (c)
    let (atoms, direct) = atom_count(&omega)?;
    for (alpha, part) in &result.parts {
        let cert = is_spectrum_with_atoms(&omega, part, atoms, !direct, n)?;
        if !cert.is_spectrum() {
            report.fail(
                Clause::PartSpectra,
                format!("part of {alpha}: {:?}", cert.status),
            );
        }
    }

    // (d): label every point with its part, then scan all pairs once.
    let labelled: Vec<(Rational, usize)> = result
        .parts
        .values()
        .enumerate()
        .flat_map(|(idx, part)| part.iter().map(move |x| (x.clone(), idx)))
        .collect();
    let points: Vec<Rational> = labelled.iter().map(|(x, _)| x.clone()).collect();
    let in_nu = PairOracle::new(&nu, &points)?;
    let in_omega = PairOracle::new(&omega, &points)?;
    let bad = first_bad_pair(points.len(), |i, j| {
        if points[i] == points[j] {
            return true;
        }
        let nu_zero = in_nu.in_zero_set(j, i);
        if labelled[i].1 == labelled[j].1 {
            in_omega.in_zero_set(j, i) && !nu_zero
        } else {
            nu_zero
        }
    });
    if let Some((i, j)) = bad {
        let kind = if labelled[i].1 == labelled[j].1 {
            "same part, outside Z(ω̂)∖Z(ν̂)"
        } else {
            "different parts, outside Z(ν̂)"
        };
        report.fail(
            Clause::Containments,
            format!("{} − {}: {kind}", points[j], points[i]),
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::spectra::canonical_spectrum;

    fn set(values: &[i64]) -> CandidateSet {
        CandidateSet::from_integers(values)
    }

    #[test]
    fn maximal_subset_examples() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let head = MeasureWindow::head(&s, 1).unwrap();
        assert_eq!(
            maximal_bizero_subset(&head, &set(&[0, 2, 8, 10])).unwrap(),
            set(&[0, 2])
        );
        let whole = MeasureWindow::head(&s, 2).unwrap();
        assert_eq!(
            maximal_bizero_subset(&whole, &set(&[0, 2, 8, 10])).unwrap(),
            set(&[0, 2, 8, 10])
        );
        assert_eq!(maximal_bizero_subset(&head, &set(&[0])).unwrap(), set(&[0]));
        assert_eq!(
            maximal_bizero_subset(&head, &set(&[2, 8])),
            Err(Error::MissingZero)
        );
    }

    #[test]
    fn worked_decomposition() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let r = suitable_decomposition(&s, 2, 1, &set(&[0, 2, 8, 10])).unwrap();
        assert_eq!(r.head, set(&[0, 2]));
        assert_eq!(r.parts[&int(0)], set(&[0, 8]));
        assert_eq!(r.parts[&int(2)], set(&[2, 10]));
        assert!(verify_decomposition(&r).unwrap().passed());
        assert!(matches!(
            suitable_decomposition(&s, 2, 2, &set(&[0, 2, 8, 10])),
            Err(Error::Precondition(_))
        ));
        assert_eq!(
            suitable_decomposition(&s, 2, 1, &set(&[0, 2])),
            Err(Error::NotASpectrum)
        );
    }

    #[test]
    fn six_six_decomposition() {
        let s = MoranSystem::finite(&[6, 6], &[3, 3]).unwrap();
        let lambda = canonical_spectrum(&s, 2).unwrap();
        let r = suitable_decomposition(&s, 2, 1, &lambda).unwrap();
        assert_eq!(r.head, set(&[0, 2, 4]));
        for a in [0, 2, 4] {
            assert_eq!(r.parts[&int(a)], set(&[a, a + 12, a + 24]));
        }
        assert!(verify_decomposition(&r).unwrap().passed());
    }

    #[test]
    fn corrupted_part_is_caught() {
        let s = MoranSystem::finite(&[4, 4], &[2, 2]).unwrap();
        let mut r = suitable_decomposition(&s, 2, 1, &set(&[0, 2, 8, 10])).unwrap();
        r.parts.insert(int(0), set(&[0]));
        r.parts.insert(int(2), set(&[2, 8, 10]));
        let report = verify_decomposition(&r).unwrap();
        assert!(!report.passed());
        assert!(
            !report.clause_passed(Clause::PartSpectra)
                || !report.clause_passed(Clause::Containments)
        );
        assert!(report.failures.iter().all(|f| !f.witness.is_empty()));

        let mut r = suitable_decomposition(&s, 2, 1, &set(&[0, 2, 8, 10])).unwrap();
        r.parts.insert(int(2), set(&[2, 8, 10]));
        let report = verify_decomposition(&r).unwrap();
        assert!(!report.clause_passed(Clause::Partition));
    }
}
