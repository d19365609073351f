//! Truncated formal characters of highest-weight modules.
//!
//! A character is stored relative to its highest weight: the key `β` stands
//! for `e^{-β}`, so keys of highest-weight modules have nonnegative δ-degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::json;

use crate::fock::{ModuleSpec, Truncation};
use crate::pcenter::RestrictedQuotient;
use crate::report::CheckReport;
use crate::root_data::FiniteLieData;
use crate::scalars::{Prime, Scalar};

/// `Σ c_i ᾱ_i + d δ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AffineWeight {
    pub delta_deg: i64,
    pub alpha_coeffs: Vec<i64>,
}

impl AffineWeight {
    pub fn zero(rank: usize) -> Self {
        AffineWeight {
            delta_deg: 0,
            alpha_coeffs: vec![0; rank],
        }
    }

    pub fn new(alpha_coeffs: Vec<i64>, delta_deg: i64) -> Self {
        AffineWeight {
            delta_deg,
            alpha_coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        AffineWeight {
            delta_deg: self.delta_deg + other.delta_deg,
            alpha_coeffs: self
                .alpha_coeffs
                .iter()
                .zip(&other.alpha_coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scaled(&self, k: i64) -> Self {
        AffineWeight {
            delta_deg: self.delta_deg * k,
            alpha_coeffs: self.alpha_coeffs.iter().map(|c| c * k).collect(),
        }
    }

    fn max_alpha(&self) -> i64 {
        self.alpha_coeffs.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for AffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.delta_deg != 0 {
            parts.push(format!("{}d", self.delta_deg));
        }
        for (i, &c) in self.alpha_coeffs.iter().enumerate() {
            if c != 0 {
                parts.push(format!("{c}a{}", i + 1));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `{β̄ + nδ : n ≥ 0} ∪ {-β̄ + nδ : n ≥ 1}` for positive finite roots `β̄`, with `n ≤ depth`.
pub fn affine_positive_real_roots(data: &FiniteLieData, depth: u32) -> Vec<AffineWeight> {
    let mut out = Vec::new();
    for n in 0..=depth as i64 {
        for beta in &data.positive_roots {
            out.push(AffineWeight::new(beta.clone(), n));
            if n >= 1 {
                out.push(AffineWeight::new(beta.iter().map(|c| -c).collect(), n));
            }
        }
    }
    out.sort();
    out
}

/// A character truncated at δ-degree `depth`. When `alpha_max` is set, only
/// coefficients whose ᾱ-coordinates are all at most `alpha_max` are exact and
/// stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharSeries {
    rank: usize,
    depth: u32,
    alpha_max: Option<i64>,
    /// The series is `e^{kρ}` times the stored sum.
    rho_shift: i64,
    terms: BTreeMap<AffineWeight, i64>,
}

#[derive(Serialize)]
struct TermEntry<'a> {
    alpha_coeffs: &'a [i64],
    delta_deg: i64,
    coeff: i64,
}

impl CharSeries {
    pub fn zero(rank: usize, depth: u32) -> Self {
        CharSeries {
            rank,
            depth,
            alpha_max: None,
            rho_shift: 0,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize, depth: u32) -> Self {
        let mut s = Self::zero(rank, depth);
        s.add_term(AffineWeight::zero(rank), 1);
        s
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn alpha_max(&self) -> Option<i64> {
        self.alpha_max
    }

    pub fn rho_shift(&self) -> i64 {
        self.rho_shift
    }

    pub fn with_rho_shift(mut self, k: i64) -> Self {
        self.rho_shift = k;
        self
    }

    pub fn with_alpha_max(mut self, bound: i64) -> Self {
        self.alpha_max = Some(self.alpha_max.map_or(bound, |b| b.min(bound)));
        self.terms.retain(|w, _| w.max_alpha() <= bound);
        self
    }

    fn in_range(&self, w: &AffineWeight) -> bool {
        w.delta_deg >= 0
            && w.delta_deg <= self.depth as i64
            && self.alpha_max.is_none_or(|b| w.max_alpha() <= b)
    }

    pub fn add_term(&mut self, w: AffineWeight, c: i64) {
        assert_eq!(w.alpha_coeffs.len(), self.rank, "rank mismatch");
        if c == 0 || !self.in_range(&w) {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn coeff(&self, w: &AffineWeight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AffineWeight, i64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|&c| c >= 0)
    }

    /// Smallest `s ≥ 0` with every ᾱ-coordinate at least `-s` times the δ-degree.
    fn slope(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|w| {
                w.alpha_coeffs.iter().map(move |&c| {
                    if c >= 0 {
                        0
                    } else if w.delta_deg == 0 {
                        i64::MAX / 4
                    } else {
                        (-c + w.delta_deg - 1) / w.delta_deg
                    }
                })
            })
            .max()
            .unwrap_or(0)
    }

    /// Truncated product. The exact window shrinks by the other factor's
    /// slope times the depth, since missing terms may combine with terms of
    /// negative ᾱ-coordinate.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let depth = self.depth.min(other.depth);
        let n = depth as i64;
        let shrink = |bound: Option<i64>, slope: i64| {
            bound.map(|b| b.saturating_sub(slope.saturating_mul(n)))
        };
        let bounds = [
            shrink(self.alpha_max, other.slope()),
            shrink(other.alpha_max, self.slope()),
        ];
        let alpha_max = bounds.into_iter().flatten().min();
        let mut out = CharSeries {
            rank: self.rank,
            depth,
            alpha_max,
            rho_shift: self.rho_shift + other.rho_shift,
            terms: BTreeMap::new(),
        };
        for (w1, c1) in &self.terms {
            for (w2, c2) in &other.terms {
                let w = w1.add(w2);
                if out.in_range(&w) {
                    *out.terms.entry(w).or_insert(0) += c1 * c2;
                }
            }
        }
        out.terms.retain(|_, c| *c != 0);
        out
    }

    /// `Σ_{k ∈ ks} sign^k e^{-kβ}`.
    fn root_factor(
        rank: usize,
        depth: u32,
        beta: &AffineWeight,
        ks: impl Iterator<Item = i64>,
        sign: i64,
    ) -> Self {
        let mut s = Self::zero(rank, depth);
        for k in ks {
            s.add_term(beta.scaled(k), if k % 2 == 0 { 1 } else { sign });
        }
        s
    }

    /// Compares coefficients on the window where both series are exact.
    /// Returns the first disagreement as `(weight, self, other)`.
    pub fn agrees_with(&self, other: &Self) -> std::result::Result<(), (AffineWeight, i64, i64)> {
        let depth = self.depth.min(other.depth) as i64;
        let bound = [self.alpha_max, other.alpha_max]
            .into_iter()
            .flatten()
            .min();
        let keys: std::collections::BTreeSet<&AffineWeight> =
            self.terms.keys().chain(other.terms.keys()).collect();
        for w in keys {
            if w.delta_deg > depth || bound.is_some_and(|b| w.max_alpha() > b) {
                continue;
            }
            let (a, b) = (self.coeff(w), other.coeff(w));
            if a != b {
                return Err((w.clone(), a, b));
            }
        }
        if self.rho_shift != other.rho_shift {
            return Err((
                AffineWeight::zero(self.rank),
                self.rho_shift,
                other.rho_shift,
            ));
        }
        Ok(())
    }

    /// Coefficients at one δ-degree, keyed by ᾱ-coordinates.
    pub fn at_delta(&self, d: i64) -> Vec<(Vec<i64>, i64)> {
        self.terms
            .iter()
            .filter(|(w, _)| w.delta_deg == d)
            .map(|(w, c)| (w.alpha_coeffs.clone(), *c))
            .collect()
    }

    /// `[{alpha_coeffs, delta_deg, coeff}]`, ordered by δ-degree then ᾱ.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<TermEntry> = self
            .terms
            .iter()
            .map(|(w, &coeff)| TermEntry {
                alpha_coeffs: &w.alpha_coeffs,
                delta_deg: w.delta_deg,
                coeff,
            })
            .collect();
        json!({
            "depth": self.depth,
            "alpha_max": self.alpha_max,
            "rho_shift": self.rho_shift,
            "terms": entries,
        })
    }
}

/// `e^{-ρ} ∏_{β ∈ Δ₊^re} (1 - e^{-pβ}) / (1 - e^{-β})`, each factor expanded as
/// `1 + e^{-β} + ⋯ + e^{-(p-1)β}`.
pub fn mathieu_product(data: &FiniteLieData, p: Prime, depth: u32) -> CharSeries {
    let q = p.get() as i64;
    affine_positive_real_roots(data, depth)
        .iter()
        .map(|beta| CharSeries::root_factor(data.rank, depth, beta, 0..q, 1))
        .fold(CharSeries::one(data.rank, depth), |acc, f| acc.mul(&f))
        .with_rho_shift(-1)
}

/// `e^{-ρ} ∏_{β ∈ Δ₊^re} 1 / (1 - e^{-β})`, exact for ᾱ-coordinates up to `alpha_max`.
pub fn verma_denominator(data: &FiniteLieData, depth: u32, alpha_max: i64) -> CharSeries {
    // Factors with δ-degree > 0 are finite and exact; the windowed finite-root
    // factors come last so the window shrinks only once.
    let roots = affine_positive_real_roots(data, depth);
    let (finite, affine): (Vec<_>, Vec<_>) = roots.iter().partition(|b| b.delta_deg == 0);
    let mut acc = CharSeries::one(data.rank, depth);
    for beta in affine {
        acc = acc.mul(&CharSeries::root_factor(
            data.rank,
            depth,
            beta,
            0..=depth as i64 / beta.delta_deg,
            1,
        ));
    }
    let mut window = CharSeries::one(data.rank, depth).with_alpha_max(alpha_max);
    for beta in finite {
        let top = alpha_max / beta.max_alpha().max(1);
        window = window.mul(
            &CharSeries::root_factor(data.rank, depth, beta, 0..=top, 1).with_alpha_max(alpha_max),
        );
    }
    acc.mul(&window).with_rho_shift(-1)
}

/// `∏_{β ∈ Δ₊^re} (1 - e^{-pβ})`.
pub fn steinberg_factor(data: &FiniteLieData, p: Prime, depth: u32) -> CharSeries {
    let q = p.get() as i64;
    affine_positive_real_roots(data, depth)
        .iter()
        .map(|beta| CharSeries::root_factor(data.rank, depth, &beta.scaled(q), 0..=1, -1))
        .fold(CharSeries::one(data.rank, depth), |acc, f| acc.mul(&f))
}

/// `e^{(p-1)ρ} ∏_{β ∈ Δ₊^re} (1 - e^{-pβ}) / (1 - e^{-β})`.
pub fn steinberg_character(data: &FiniteLieData, p: Prime, depth: u32) -> CharSeries {
    mathieu_product(data, p, depth).with_rho_shift(p.get() as i64 - 1)
}

/// Character of a Fock-type module by enumerating its basis; monomials of
/// ᾱ-weight `μ` and depth `d` contribute to `e^{-(-μ + dδ)}`.
pub fn fock_character<S: Scalar>(
    module: &ModuleSpec<S>,
    depth: u32,
    exp_cap: Option<u32>,
) -> CharSeries {
    let data = &module.data;
    let bound = match exp_cap {
        Some(_) => None,
        None => Some(Truncation::default_alpha_bound(depth)),
    };
    let t = Truncation {
        depth,
        exp_cap,
        alpha_bound: bound,
    };
    let mut s = CharSeries::zero(data.rank, depth);
    if let Some(b) = bound {
        s = s.with_alpha_max(b);
    }
    for m in module.basis_enumerate_with(t) {
        let w = AffineWeight::new(m.weight(data).iter().map(|c| -c).collect(), m.depth());
        s.add_term(w, 1);
    }
    s
}

pub fn quotient_character<S: Scalar>(q: &RestrictedQuotient<S>, depth: u32) -> CharSeries {
    fock_character(&q.module, depth, Some(q.prime().get()))
}

fn mismatch(report: &mut CheckReport, what: &str, (w, a, b): (AffineWeight, i64, i64)) {
    report.fail(crate::report::Witness {
        description: format!("{what} at e^-({w})"),
        probe: Vec::new(),
        lhs: vec![crate::report::TermJson {
            monomial: w.to_string(),
            coeff: a.to_string(),
        }],
        rhs: vec![crate::report::TermJson {
            monomial: w.to_string(),
            coeff: b.to_string(),
        }],
    });
}

/// Brute-force character of the cap-`p` quotient of `M` against the Mathieu product.
pub fn verify_mathieu_character(data: &FiniteLieData, p: Prime, depth: u32) -> CheckReport {
    let m = ModuleSpec::<crate::scalars::Fp>::weyl(std::sync::Arc::new(data.clone()), p);
    let brute = fock_character(&m, depth, Some(p.get())).with_rho_shift(-1);
    let product = mathieu_product(data, p, depth);
    let mut report = CheckReport::new(
        "mathieu-character",
        json!({"algebra": data.name, "p": p.get(), "depth": depth}),
    );
    report.checked = brute.len().max(product.len()) as u64;
    if let Err(e) = brute.agrees_with(&product) {
        mismatch(&mut report, "fock character vs product", e);
    }
    if !brute.is_nonnegative() {
        report.passed = false;
    }
    report.with_details(json!({"character": product.to_json()}))
}

/// `mathieu = verma_denominator × steinberg_factor` and the `e^{pρ}` shift
/// between the characters of `𝔩(-ρ)` and `l((p-1)ρ)`.
pub fn verify_series_identities(data: &FiniteLieData, p: Prime, depth: u32) -> CheckReport {
    let q = p.get() as i64;
    let window = Truncation::default_alpha_bound(depth);
    let verma = verma_denominator(data, depth, window + 2 * depth as i64);
    let product = verma.mul(&steinberg_factor(data, p, depth));
    let mathieu = mathieu_product(data, p, depth);
    let mut report = CheckReport::new(
        "series-identities",
        json!({"algebra": data.name, "p": q, "depth": depth, "alpha_window": product.alpha_max()}),
    );
    report.checked = product.len() as u64 + 1;
    if product.alpha_max().is_none_or(|b| b < window) {
        report.note("exact window narrower than requested");
        report.passed = false;
    }
    if let Err(e) = product.agrees_with(&mathieu) {
        mismatch(&mut report, "verma x steinberg vs mathieu", e);
    }
    let steinberg = steinberg_character(data, p, depth);
    let shifted = mathieu.clone().with_rho_shift(mathieu.rho_shift() + q);
    if let Err(e) = steinberg.agrees_with(&shifted) {
        mismatch(&mut report, "e^(p rho) shift", e);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Fp;
    use std::sync::Arc;

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn w(a: i64, d: i64) -> AffineWeight {
        AffineWeight::new(vec![a], d)
    }

    #[test]
    fn real_roots() {
        let data = FiniteLieData::sl2();
        assert_eq!(affine_positive_real_roots(&data, 0), vec![w(1, 0)]);
        assert_eq!(
            affine_positive_real_roots(&data, 1),
            vec![w(1, 0), w(-1, 1), w(1, 1)]
        );
        for n in 0..6 {
            assert_eq!(
                affine_positive_real_roots(&data, n).len(),
                2 * n as usize + 1
            );
        }
    }

    #[test]
    fn mathieu_low_degrees() {
        let data = FiniteLieData::sl2();
        let s = mathieu_product(&data, prime(2), 1);
        assert_eq!(s.at_delta(0), vec![(vec![0], 1), (vec![1], 1)]);
        // (1 + e^{-α})(e^{-(δ-α)} + e^{-(δ+α)}) at degree 1
        assert_eq!(
            s.at_delta(1),
            vec![(vec![-1], 1), (vec![0], 1), (vec![1], 1), (vec![2], 1)]
        );
        for p in [2, 3, 5] {
            assert_eq!(mathieu_product(&data, prime(p), 4).coeff(&w(0, 0)), 1);
        }
    }

    #[test]
    fn weyl_characters() {
        let data = Arc::new(FiniteLieData::sl2());
        let m = ModuleSpec::<Fp>::weyl(data.clone(), prime(2));
        let s = fock_character(&m, 0, None);
        assert_eq!(s.alpha_max(), Some(4));
        assert_eq!(
            s.at_delta(0),
            (0..=4).map(|k| (vec![k], 1)).collect::<Vec<_>>()
        );
        let s = fock_character(&m, 0, Some(2));
        assert_eq!(s.at_delta(0), vec![(vec![0], 1), (vec![1], 1)]);
        assert_eq!(verma_denominator(&data, 0, 6).at_delta(0).len(), 7);
    }

    #[test]
    fn characters_match_products() {
        let data = FiniteLieData::sl2();
        for p in [2, 3, 5] {
            let r = verify_mathieu_character(&data, prime(p), 6);
            assert!(r.passed, "{:?}", r.witness);
            let r = verify_series_identities(&data, prime(p), 8);
            assert!(r.passed, "{:?} {:?}", r.witness, r.notes);
        }
    }

    #[test]
    fn tensor_product_is_multiplicative() {
        let data = Arc::new(FiniteLieData::sl2());
        let q = prime(3);
        let m = ModuleSpec::<Fp>::weyl(data.clone(), q);
        let pi = ModuleSpec::heisenberg(data.clone(), Fp::one(q), vec![Fp::zero(q)]).unwrap();
        let mp = ModuleSpec::free_field(data, Fp::one(q), vec![Fp::zero(q)]).unwrap();
        for cap in [Some(3), None] {
            let whole = fock_character(&mp, 4, cap);
            let prod = fock_character(&m, 4, cap).mul(&fock_character(&pi, 4, cap));
            assert!(whole.agrees_with(&prod).is_ok());
            assert!(whole.is_nonnegative());
        }
    }

    #[test]
    fn wrong_product_detected() {
        let data = FiniteLieData::sl2();
        let a = mathieu_product(&data, prime(2), 3);
        let b = mathieu_product(&data, prime(3), 3);
        assert!(a.agrees_with(&b).is_err());
    }

    #[test]
    fn json_shape() {
        let data = FiniteLieData::sl2();
        let j = mathieu_product(&data, prime(2), 0).to_json();
        assert_eq!(j["terms"][1]["alpha_coeffs"][0], 1);
        assert_eq!(j["terms"][1]["delta_deg"], 0);
        assert_eq!(j["rho_shift"], -1);
    }
}
