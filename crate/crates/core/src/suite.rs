//! Named verification suites and their configuration.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use crate::characters::{verify_mathieu_character, verify_series_identities};
use crate::error::{Error, Result};
use crate::field::verify_state_field;
use crate::fock::SparseVector;
use crate::pcenter::{
    verify_centrality, verify_iota_commutes_y, verify_wff_pcenter_images, ImageCheck,
};
use crate::report::{CheckReport, SuiteReport, TermJson, Witness};
use crate::root_data::{verify_restricted, FiniteLieData};
use crate::scalars::{fp_binom, Fp, KappaPoly, Prime, Scalar};
use crate::wakimoto::{center_probe, verify_singular_census};
use crate::wff::{
    critical_level, verify_phi_pformula, verify_wff_relations, WffRealization, WffTables,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lucas,
    Restricted,
    StateField,
    IotaCommute,
    Centrality,
    WffRelations,
    PcenterImages,
    PhiPformula,
    Character,
    Singular,
    CenterProbe,
    All,
}

impl Suite {
    pub const EACH: [Suite; 11] = [
        Suite::Lucas,
        Suite::Restricted,
        Suite::StateField,
        Suite::IotaCommute,
        Suite::Centrality,
        Suite::WffRelations,
        Suite::PcenterImages,
        Suite::PhiPformula,
        Suite::Character,
        Suite::Singular,
        Suite::CenterProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lucas => "lucas",
            Suite::Restricted => "restricted",
            Suite::StateField => "state-field",
            Suite::IotaCommute => "iota-commute",
            Suite::Centrality => "centrality",
            Suite::WffRelations => "wff-relations",
            Suite::PcenterImages => "pcenter-images",
            Suite::PhiPformula => "phi-pformula",
            Suite::Character => "character",
            Suite::Singular => "singular",
            Suite::CenterProbe => "center-probe",
            Suite::All => "all",
        }
    }

    fn default_primes(self) -> &'static [u32] {
        match self {
            Suite::Lucas => &[2, 3, 5, 7],
            Suite::StateField | Suite::PcenterImages | Suite::Singular => &[2, 3],
            Suite::CenterProbe => &[2],
            _ => &[2, 3, 5],
        }
    }

    fn default_depth(self) -> u32 {
        match self {
            Suite::Lucas | Suite::PhiPformula => 0,
            Suite::Restricted => 4,
            Suite::StateField | Suite::IotaCommute | Suite::Centrality => 5,
            Suite::WffRelations | Suite::PcenterImages | Suite::Singular => 4,
            Suite::Character => 8,
            Suite::CenterProbe | Suite::All => 3,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(&[Suite::All])
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

/// A level: an `F_p` residue, the critical level, or the formal indeterminate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Level {
    Value(i64),
    Critical,
    Formal,
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "formal" | "k" => Ok(Level::Formal),
            "crit" | "critical" => Ok(Level::Critical),
            t => t
                .parse()
                .map(Level::Value)
                .map_err(|_| Error::InvalidConfig(format!("bad level {s:?}"))),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Value(k) => write!(f, "{k}"),
            Level::Critical => write!(f, "crit"),
            Level::Formal => write!(f, "formal"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteConfig {
    pub suite: Suite,
    /// Empty means the suite's default primes.
    pub primes: Vec<u32>,
    /// Empty means the suite's default levels.
    pub levels: Vec<Level>,
    pub depth: Option<u32>,
    pub mode_bound: Option<i64>,
    /// `λ(h_i)` for the free-field target.
    pub lambda: Vec<i64>,
    pub depth_cap: u32,
    pub seed: u64,
    /// Random combinations of basis probes added to the relation checks.
    pub extra_probes: usize,
    /// Allow pcenter-images outside `p ∈ {2, 3}`.
    pub force: bool,
    pub timings: bool,
}

impl SuiteConfig {
    pub fn new(suite: Suite) -> Self {
        SuiteConfig {
            suite,
            primes: Vec::new(),
            levels: Vec::new(),
            depth: None,
            mode_bound: None,
            lambda: Vec::new(),
            depth_cap: 8,
            seed: 0,
            extra_probes: 0,
            force: false,
            timings: false,
        }
    }

    fn primes_for(&self, suite: Suite) -> Result<Vec<Prime>> {
        let raw = if self.primes.is_empty() {
            suite.default_primes()
        } else {
            &self.primes[..]
        };
        raw.iter().map(|&p| Prime::new(p)).collect()
    }

    fn depth_for(&self, suite: Suite) -> u32 {
        self.depth.unwrap_or_else(|| suite.default_depth())
    }

    fn levels_for(&self, suite: Suite) -> Vec<Level> {
        if !self.levels.is_empty() {
            return self.levels.clone();
        }
        match suite {
            Suite::WffRelations => vec![Level::Value(0), Level::Value(1), Level::Critical],
            Suite::PcenterImages => vec![Level::Value(0), Level::Value(1), Level::Formal],
            Suite::CenterProbe => vec![Level::Value(0), Level::Value(1)],
            _ => vec![Level::Value(1)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let suites: Vec<Suite> = if self.suite == Suite::All {
            Suite::EACH.to_vec()
        } else {
            vec![self.suite]
        };
        for &s in &suites {
            let d = self.depth_for(s);
            if d > self.depth_cap {
                return Err(Error::InvalidConfig(format!(
                    "depth {d} exceeds the cap {}",
                    self.depth_cap
                )));
            }
            let primes = self.primes_for(s)?;
            if s == Suite::PcenterImages && !self.force {
                if let Some(p) = primes.iter().find(|p| p.get() > 3) {
                    return Err(Error::InvalidConfig(format!(
                        "pcenter-images at p = {p} is expensive; pass --force to run it"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sl2() -> Arc<FiniteLieData> {
    Arc::new(FiniteLieData::sl2())
}

fn numeric(level: Level, p: Prime) -> Option<Fp> {
    match level {
        Level::Value(k) => Some(Fp::new(k, p)),
        Level::Critical => Some(critical_level(&FiniteLieData::sl2(), p)),
        Level::Formal => None,
    }
}

fn formal(p: Prime) -> KappaPoly {
    KappaPoly::kappa(p)
}

/// Exact binomial coefficients for `b ∈ [-50, 50]`, `a ∈ [0, 50]` from Pascal's
/// rule in `u128`, compared with `fp_binom`.
pub fn verify_lucas(p: Prime) -> CheckReport {
    const TOP: usize = 100;
    let mut pascal = vec![vec![0u128; TOP + 1]; TOP + 1];
    for n in 0..=TOP {
        pascal[n][0] = 1;
        for k in 1..=n {
            pascal[n][k] = pascal[n - 1][k - 1] + pascal[n - 1][k];
        }
    }
    let exact_mod = |b: i64, a: usize| -> u32 {
        let q = p.get() as u128;
        if b >= 0 {
            let b = b as usize;
            if a > b {
                0
            } else {
                (pascal[b][a] % q) as u32
            }
        } else {
            // binom(-m, a) = (-1)^a binom(m + a - 1, a)
            let m = (-b) as usize;
            let r = (pascal[m + a - 1][a] % q) as u32;
            if a % 2 == 1 {
                (p.get() - r) % p.get()
            } else {
                r
            }
        }
    };
    let mut report = CheckReport::new(
        "lucas",
        json!({"p": p.get(), "upper": [-50, 50], "lower": [0, 50]}),
    );
    for b in -50..=50i64 {
        for a in 0..=50usize {
            report.checked += 1;
            let got = fp_binom(b, a as u64, p).residue();
            let want = exact_mod(b, a);
            if got != want {
                report.fail(Witness {
                    description: format!("binom({b}, {a}) mod {p}"),
                    probe: Vec::new(),
                    lhs: vec![TermJson {
                        monomial: "fp_binom".into(),
                        coeff: got.to_string(),
                    }],
                    rhs: vec![TermJson {
                        monomial: "exact".into(),
                        coeff: want.to_string(),
                    }],
                });
            }
        }
    }
    report
}

fn random_combinations<S: Scalar>(
    probes: &[SparseVector<S>],
    count: usize,
    seed: u64,
    p: Prime,
) -> Vec<SparseVector<S>> {
    if probes.is_empty() {
        return Vec::new();
    }
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v = SparseVector::zero(p);
            for _ in 0..3 {
                let i = rng.random_range(0..probes.len());
                let c = S::from_i64(rng.random_range(1..p.get() as i64 + 1), p);
                v.add_scaled(&probes[i], &c);
            }
            v
        })
        .collect()
}

fn wff_relations<S: Scalar>(
    cfg: &SuiteConfig,
    kappa: S,
    depth: u32,
    mode_bound: i64,
) -> Result<CheckReport> {
    let p = kappa.prime();
    let lambda: Vec<S> = if cfg.lambda.is_empty() {
        vec![S::zero(p)]
    } else {
        cfg.lambda.iter().map(|&l| S::from_i64(l, p)).collect()
    };
    let tables = WffTables::sl2();
    let real = if kappa == critical_level(&FiniteLieData::sl2(), p) {
        let lt = lambda
            .iter()
            .enumerate()
            .map(|(i, l)| ((i, 0), l.clone()))
            .collect();
        WffRealization::critical(sl2(), &tables, lt, p)?
    } else {
        WffRealization::new(sl2(), &tables, kappa, lambda)?
    };
    let mut probes = real.probes(depth, p.get() as i64 + 2);
    let extra = random_combinations(&probes, cfg.extra_probes, cfg.seed, p);
    probes.extend(extra);
    Ok(verify_wff_relations(&real, mode_bound, &probes))
}

fn pcenter_images<S: Scalar>(kappa: S, depth: u32, mode_bound: i64) -> Result<CheckReport> {
    let p = kappa.prime();
    let tables = WffTables::sl2();
    let real = WffRealization::new(sl2(), &tables, kappa, vec![S::zero(p)])?;
    let mut check = ImageCheck::new(depth, p);
    check.mode_bound = mode_bound;
    check.commutant_bound = mode_bound;
    verify_wff_pcenter_images(&real, &tables, check)
}

fn run_one(cfg: &SuiteConfig, suite: Suite, out: &mut SuiteReport) -> Result<()> {
    let data = FiniteLieData::sl2();
    let depth = cfg.depth_for(suite);
    let primes = cfg.primes_for(suite)?;
    let levels = cfg.levels_for(suite);
    let mut push = |r: CheckReport, start: Instant| {
        let mut r = r;
        if cfg.timings {
            r.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        out.push(r);
    };
    for &p in &primes {
        let start = Instant::now();
        match suite {
            Suite::Lucas => push(verify_lucas(p), start),
            Suite::Restricted => push(
                verify_restricted(&data, p, cfg.mode_bound.unwrap_or(depth as i64)),
                start,
            ),
            Suite::PhiPformula => push(verify_phi_pformula(&data, p)?, start),
            Suite::Character => {
                push(verify_mathieu_character(&data, p, depth), start);
                push(
                    verify_series_identities(&data, p, depth.max(2)),
                    Instant::now(),
                );
            }
            Suite::Singular => push(
                verify_singular_census(sl2(), &WffTables::sl2(), p, depth)?,
                start,
            ),
            Suite::StateField
            | Suite::IotaCommute
            | Suite::Centrality
            | Suite::WffRelations
            | Suite::PcenterImages
            | Suite::CenterProbe => {
                for &level in &levels {
                    let start = Instant::now();
                    let report = match (suite, numeric(level, p)) {
                        (Suite::StateField, Some(k)) => {
                            verify_state_field(&data, k, depth, depth.min(3))
                        }
                        (Suite::StateField, None) => {
                            verify_state_field(&data, formal(p), depth, depth.min(3))
                        }
                        (Suite::IotaCommute, Some(k)) => {
                            verify_iota_commutes_y(&data, k, depth, &[1, 2])
                        }
                        (Suite::IotaCommute, None) => {
                            verify_iota_commutes_y(&data, formal(p), depth, &[1, 2])
                        }
                        (Suite::Centrality, Some(k)) => verify_centrality(&data, k, depth),
                        (Suite::Centrality, None) => verify_centrality(&data, formal(p), depth),
                        (Suite::WffRelations, Some(k)) => {
                            wff_relations(cfg, k, depth, cfg.mode_bound.unwrap_or(3))?
                        }
                        (Suite::WffRelations, None) => {
                            wff_relations(cfg, formal(p), depth, cfg.mode_bound.unwrap_or(3))?
                        }
                        (Suite::PcenterImages, Some(k)) => {
                            pcenter_images(k, depth, cfg.mode_bound.unwrap_or(2))?
                        }
                        (Suite::PcenterImages, None) => {
                            pcenter_images(formal(p), depth, cfg.mode_bound.unwrap_or(2))?
                        }
                        (Suite::CenterProbe, Some(k)) => center_probe(sl2(), k, depth)?,
                        (Suite::CenterProbe, None) => {
                            let mut r = CheckReport::new(
                                "center-probe",
                                json!({"p": p.get(), "kappa": "formal"}),
                            );
                            r.note("the center probe runs over F_p only; formal level skipped");
                            r
                        }
                        _ => unreachable!("level-dependent suites only"),
                    };
                    push(report, start);
                }
            }
            Suite::All => unreachable!("expanded by run_suite"),
        }
    }
    Ok(())
}

/// Runs a suite; the report passes iff every exact check passed.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut report = SuiteReport::new(cfg.suite.name(), serde_json::to_value(cfg)?);
    let suites: Vec<Suite> = if cfg.suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![cfg.suite]
    };
    for s in suites {
        if cfg.suite == Suite::All
            && s == Suite::PcenterImages
            && !cfg.force
            && cfg.primes.iter().any(|&p| p > 3)
        {
            continue;
        }
        run_one(cfg, s, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for s in Suite::EACH {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!("formal".parse::<Level>().unwrap(), Level::Formal);
        assert_eq!("-2".parse::<Level>().unwrap(), Level::Value(-2));
    }

    #[test]
    fn lucas_suite() {
        let mut cfg = SuiteConfig::new(Suite::Lucas);
        cfg.primes = vec![2, 3, 5, 7];
        let r = run_suite(&cfg).unwrap();
        assert!(r.passed);
        assert_eq!(r.checks.len(), 4);
        assert_eq!(r.checks[0].checked, 101 * 51);
    }

    #[test]
    fn guards() {
        let mut cfg = SuiteConfig::new(Suite::PcenterImages);
        cfg.primes = vec![5];
        assert!(matches!(run_suite(&cfg), Err(Error::InvalidConfig(_))));
        let mut cfg = SuiteConfig::new(Suite::Character);
        cfg.depth = Some(9);
        assert!(matches!(run_suite(&cfg), Err(Error::InvalidConfig(_))));
        cfg.depth_cap = 10;
        cfg.primes = vec![2];
        assert!(run_suite(&cfg).unwrap().passed);
        let mut cfg = SuiteConfig::new(Suite::Lucas);
        cfg.primes = vec![4];
        assert!(matches!(run_suite(&cfg), Err(Error::NotPrime(4))));
    }

    #[test]
    fn deterministic_json() {
        let mut cfg = SuiteConfig::new(Suite::WffRelations);
        cfg.primes = vec![2];
        cfg.depth = Some(2);
        cfg.mode_bound = Some(1);
        cfg.extra_probes = 4;
        cfg.seed = 7;
        let a = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&cfg).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"passed\":true"));
    }
}
