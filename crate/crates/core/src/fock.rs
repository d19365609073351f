//! Sparse-vector models of the Weyl Fock module `M`, the Heisenberg Fock
//! modules `π^κ(λ)`, the vacuum module `V^κ(ĝ)` and the free-field product
//! `M ⊗ π`, with exact single-mode actions.
//!
//! Grading conventions: every generator mode `g_n` changes δ-depth by `-n`,
//! so a creation operator `a*_{-m}` has depth `m` and `a_{-m}` depth `m`.
//! The ᾱ-weight of `a_β` is `+β`, of `a*_β` is `-β`, of `b_i` is zero and of
//! a loop generator `x_n` is the weight of `x`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::report::TermJson;
use crate::root_data::{affine_bracket, AffineElement, FiniteLieData};
use crate::scalars::{Fp, Prime, Scalar};

/// A generator label. `Lie` indexes the finite basis, `A`/`AStar` the
/// positive roots and `B` the simple coroots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Generator {
    Lie(usize),
    A(usize),
    AStar(usize),
    B(usize),
}

impl Generator {
    /// Conformal weight of the generating field.
    pub fn conformal_weight(self) -> i64 {
        match self {
            Generator::AStar(_) => 0,
            _ => 1,
        }
    }

    /// Classical mode index carried by the generic Fourier coefficient `(n)`.
    pub fn classical_mode(self, generic: i64) -> i64 {
        generic + 1 - self.conformal_weight()
    }

    pub fn label(self, data: &FiniteLieData) -> String {
        let many_roots = data.positive_roots.len() > 1;
        let many_coroots = data.rank > 1;
        match self {
            Generator::Lie(i) => data.labels[i].clone(),
            Generator::A(b) if many_roots => format!("a{}", b + 1),
            Generator::A(_) => "a".into(),
            Generator::AStar(b) if many_roots => format!("a*{}", b + 1),
            Generator::AStar(_) => "a*".into(),
            Generator::B(i) if many_coroots => format!("b{}", i + 1),
            Generator::B(_) => "b".into(),
        }
    }

    fn is_free_field(self) -> bool {
        matches!(self, Generator::A(_) | Generator::AStar(_))
    }
}

/// A generator paired with a classical mode index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorMode {
    pub gen: Generator,
    pub mode: i64,
}

impl GeneratorMode {
    pub fn new(gen: Generator, mode: i64) -> Self {
        GeneratorMode { gen, mode }
    }

    #[inline]
    pub fn depth(self) -> i64 {
        -self.mode
    }

    pub fn weight(self, data: &FiniteLieData) -> Vec<i64> {
        match self.gen {
            Generator::Lie(i) => data.weight(i),
            Generator::A(b) => data.positive_roots[b].clone(),
            Generator::AStar(b) => data.positive_roots[b].iter().map(|c| -c).collect(),
            Generator::B(_) => vec![0; data.rank],
        }
    }

    pub fn label(self, data: &FiniteLieData) -> String {
        format!("{}_{{{}}}", self.gen.label(data), self.mode)
    }
}

/// An ordered product of creation operators with multiplicities; the empty
/// monomial is the highest-weight vector.
///
/// Factors are packed into order-preserving `u32` codes (generator kind,
/// index, biased mode, exponent from high to low bits), so the derived
/// ordering agrees with ordering the `(GeneratorMode, exponent)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u32; 8]>);

const EXP_BITS: u32 = 12;
const MODE_BITS: u32 = 12;
const MODE_BIAS: i64 = 1 << (MODE_BITS - 1);
const INDEX_BITS: u32 = 6;

fn encode_key(g: GeneratorMode) -> u32 {
    let (kind, idx) = match g.gen {
        Generator::Lie(i) => (0, i),
        Generator::A(i) => (1, i),
        Generator::AStar(i) => (2, i),
        Generator::B(i) => (3, i),
    };
    assert!(idx < 1 << INDEX_BITS, "generator index {idx} too large");
    let mode = g.mode + MODE_BIAS;
    assert!(
        (0..1 << MODE_BITS).contains(&mode),
        "mode {} out of range",
        g.mode
    );
    (kind << (INDEX_BITS + MODE_BITS)) | ((idx as u32) << MODE_BITS) | mode as u32
}

fn decode_key(key: u32) -> GeneratorMode {
    let idx = ((key >> MODE_BITS) & ((1 << INDEX_BITS) - 1)) as usize;
    let mode = (key & ((1 << MODE_BITS) - 1)) as i64 - MODE_BIAS;
    let gen = match key >> (INDEX_BITS + MODE_BITS) {
        0 => Generator::Lie(idx),
        1 => Generator::A(idx),
        2 => Generator::AStar(idx),
        _ => Generator::B(idx),
    };
    GeneratorMode::new(gen, mode)
}

#[inline]
fn pack(key: u32, e: u32) -> u32 {
    assert!(e < 1 << EXP_BITS, "exponent {e} too large");
    (key << EXP_BITS) | e
}

#[inline]
fn key_of(code: u32) -> u32 {
    code >> EXP_BITS
}

#[inline]
fn exp_of(code: u32) -> u32 {
    code & ((1 << EXP_BITS) - 1)
}

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    /// Builds a monomial from factors in any order.
    pub fn from_factors(factors: impl IntoIterator<Item = (GeneratorMode, u32)>) -> Self {
        let mut m = Monomial::one();
        for (g, e) in factors {
            let cur = m.exponent(g);
            m = m.with_exponent(g, cur + e);
        }
        m
    }

    pub fn factors(&self) -> impl Iterator<Item = (GeneratorMode, u32)> + '_ {
        self.0.iter().map(|&c| (decode_key(key_of(c)), exp_of(c)))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> i64 {
        self.factors().map(|(g, e)| g.depth() * e as i64).sum()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&c| exp_of(c)).sum()
    }

    pub fn weight(&self, data: &FiniteLieData) -> Vec<i64> {
        let mut w = vec![0; data.rank];
        for (g, e) in self.factors() {
            for (acc, c) in w.iter_mut().zip(g.weight(data)) {
                *acc += c * e as i64;
            }
        }
        w
    }

    fn position(&self, key: u32) -> std::result::Result<usize, usize> {
        self.0.binary_search_by(|&c| key_of(c).cmp(&key))
    }

    pub fn exponent(&self, g: GeneratorMode) -> u32 {
        match self.position(encode_key(g)) {
            Ok(i) => exp_of(self.0[i]),
            Err(_) => 0,
        }
    }

    pub fn first(&self) -> Option<GeneratorMode> {
        self.0.first().map(|&c| decode_key(key_of(c)))
    }

    pub fn multiplied(&self, g: GeneratorMode) -> Self {
        let key = encode_key(g);
        let mut v = self.0.clone();
        match self.position(key) {
            Ok(i) => v[i] = pack(key, exp_of(v[i]) + 1),
            Err(i) => v.insert(i, pack(key, 1)),
        }
        Monomial(v)
    }

    /// Removes one factor `g`, if present.
    pub fn divided(&self, g: GeneratorMode) -> Option<Self> {
        let key = encode_key(g);
        let i = self.position(key).ok()?;
        let mut v = self.0.clone();
        let e = exp_of(v[i]);
        if e == 1 {
            v.remove(i);
        } else {
            v[i] = pack(key, e - 1);
        }
        Some(Monomial(v))
    }

    /// Replaces the exponent of `g`.
    pub fn with_exponent(&self, g: GeneratorMode, e: u32) -> Self {
        let key = encode_key(g);
        let mut v = self.0.clone();
        match self.position(key) {
            Ok(i) if e == 0 => {
                v.remove(i);
            }
            Ok(i) => v[i] = pack(key, e),
            Err(_) if e == 0 => {}
            Err(i) => v.insert(i, pack(key, e)),
        }
        Monomial(v)
    }

    /// Splits into the factors satisfying `pred` and the rest.
    pub fn partition(&self, pred: impl Fn(GeneratorMode) -> bool) -> (Monomial, Monomial) {
        let mut a = SmallVec::new();
        let mut b = SmallVec::new();
        for &c in &self.0 {
            if pred(decode_key(key_of(c))) {
                a.push(c);
            } else {
                b.push(c);
            }
        }
        (Monomial(a), Monomial(b))
    }

    pub fn merged(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (g, e) in other.factors() {
            let cur = out.exponent(g);
            out = out.with_exponent(g, cur + e);
        }
        out
    }

    pub fn max_exponent(&self) -> u32 {
        self.0.iter().map(|&c| exp_of(c)).max().unwrap_or(0)
    }

    pub fn display(&self, data: &FiniteLieData) -> String {
        if self.0.is_empty() {
            return "|0>".into();
        }
        self.factors()
            .map(|(g, e)| {
                if e == 1 {
                    g.label(data)
                } else {
                    format!("{}^{}", g.label(data), e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finite `F_p`-linear (or `F_p[κ]`-linear) combination of monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseVector<S> {
    terms: BTreeMap<Monomial, S>,
    prime: Prime,
}

impl<S: Scalar> SparseVector<S> {
    pub fn zero(prime: Prime) -> Self {
        SparseVector {
            terms: BTreeMap::new(),
            prime,
        }
    }

    pub fn basis(m: Monomial, prime: Prime) -> Self {
        let mut v = Self::zero(prime);
        v.terms.insert(m, S::one(prime));
        v
    }

    pub fn vacuum(prime: Prime) -> Self {
        Self::basis(Monomial::one(), prime)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| S::zero(self.prime))
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                let s = slot.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *slot = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &S) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone() * s.clone());
        }
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Self::zero(self.prime);
        out.add_scaled(self, s);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-S::one(self.prime));
        out
    }

    /// Largest δ-depth among the monomials, `None` for the zero vector.
    pub fn max_depth(&self) -> Option<i64> {
        self.terms.keys().map(Monomial::depth).max()
    }

    /// Applies a linear map given on monomials.
    pub fn map_linear(&self, mut f: impl FnMut(&Monomial) -> SparseVector<S>) -> SparseVector<S> {
        let mut out = Self::zero(self.prime);
        for (m, c) in &self.terms {
            out.add_scaled(&f(m), c);
        }
        out
    }

    pub fn describe(&self, data: &FiniteLieData) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                monomial: m.display(data),
                coeff: c.to_string(),
            })
            .collect()
    }
}

impl<S: Scalar> fmt::Display for SparseVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({c}) {m:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The module family, with its level and highest-weight data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleKind<S> {
    /// Fock module of the Weyl algebra generated by `a_{β,n}`, `a*_{β,n}`.
    WeylM,
    /// `π^κ(λ)`: `b_{i,0}` acts by `λ(h_i)`.
    HeisenbergPi { level: S, lambda: Vec<S> },
    /// `V^κ(ĝ)`.
    VacuumV { level: S },
    /// `M ⊗ π^κ(λ)`, with `κ` the Heisenberg level.
    FreeField { level: S, lambda: Vec<S> },
    /// `M ⊗ K_{λ(t)}` at the critical level: `b_{i,n}` acts by `λ_{i,n}`.
    CriticalFreeField { lambda_t: BTreeMap<(usize, i64), S> },
}

type ActionCache<S> = Arc<Mutex<HashMap<(GeneratorMode, Monomial), SparseVector<S>>>>;

#[derive(Clone)]
pub struct ModuleSpec<S> {
    pub kind: ModuleKind<S>,
    pub data: Arc<FiniteLieData>,
    pub prime: Prime,
    cache: ActionCache<S>,
}

impl<S: Scalar> fmt::Debug for ModuleSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModuleSpec")
            .field("kind", &self.kind)
            .field("prime", &self.prime)
            .finish()
    }
}

/// Which factor of `M ⊗ π` an action targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    Weyl,
    Heisenberg,
}

/// Enumeration bounds for module bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub depth: u32,
    /// Exponents must stay below this cap (restricted quotients use `p`).
    pub exp_cap: Option<u32>,
    /// Bound on every ᾱ-coordinate; needed when depth-0 creation operators
    /// have unbounded powers.
    pub alpha_bound: Option<i64>,
}

impl Truncation {
    pub fn depth(depth: u32) -> Self {
        Truncation {
            depth,
            exp_cap: None,
            alpha_bound: None,
        }
    }

    pub fn capped(depth: u32, cap: u32) -> Self {
        Truncation {
            depth,
            exp_cap: Some(cap),
            alpha_bound: None,
        }
    }

    /// Default ᾱ-bound `4N + 4`.
    pub fn default_alpha_bound(depth: u32) -> i64 {
        4 * depth as i64 + 4
    }
}

impl<S: Scalar> ModuleSpec<S> {
    fn with_kind(kind: ModuleKind<S>, data: Arc<FiniteLieData>, prime: Prime) -> Self {
        ModuleSpec {
            kind,
            data,
            prime,
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn weyl(data: Arc<FiniteLieData>, prime: Prime) -> Self {
        Self::with_kind(ModuleKind::WeylM, data, prime)
    }

    pub fn heisenberg(data: Arc<FiniteLieData>, level: S, lambda: Vec<S>) -> Result<Self> {
        let prime = level.prime();
        check_lambda(&data, &lambda)?;
        Ok(Self::with_kind(
            ModuleKind::HeisenbergPi { level, lambda },
            data,
            prime,
        ))
    }

    pub fn vacuum(data: Arc<FiniteLieData>, level: S) -> Self {
        let prime = level.prime();
        Self::with_kind(ModuleKind::VacuumV { level }, data, prime)
    }

    pub fn free_field(data: Arc<FiniteLieData>, level: S, lambda: Vec<S>) -> Result<Self> {
        let prime = level.prime();
        check_lambda(&data, &lambda)?;
        Ok(Self::with_kind(
            ModuleKind::FreeField { level, lambda },
            data,
            prime,
        ))
    }

    pub fn critical_free_field(
        data: Arc<FiniteLieData>,
        lambda_t: BTreeMap<(usize, i64), S>,
        prime: Prime,
    ) -> Result<Self> {
        if let Some(((i, _), _)) = lambda_t.iter().find(|((i, _), _)| *i >= data.rank) {
            return Err(Error::InvalidConfig(format!(
                "λ(t) refers to coroot {i} beyond rank {}",
                data.rank
            )));
        }
        let lambda_t = lambda_t.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(Self::with_kind(
            ModuleKind::CriticalFreeField { lambda_t },
            data,
            prime,
        ))
    }

    /// The Weyl and Heisenberg factors of a free-field module.
    pub fn factors(&self) -> Option<(ModuleSpec<S>, ModuleSpec<S>)> {
        match &self.kind {
            ModuleKind::FreeField { level, lambda } => Some((
                Self::weyl(self.data.clone(), self.prime),
                Self::with_kind(
                    ModuleKind::HeisenbergPi {
                        level: level.clone(),
                        lambda: lambda.clone(),
                    },
                    self.data.clone(),
                    self.prime,
                ),
            )),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModuleKind::WeylM => "M",
            ModuleKind::HeisenbergPi { .. } => "pi",
            ModuleKind::VacuumV { .. } => "V",
            ModuleKind::FreeField { .. } => "M(x)pi",
            ModuleKind::CriticalFreeField { .. } => "M(x)K_lambda(t)",
        }
    }

    pub fn is_legal(&self, g: Generator) -> bool {
        let roots = self.data.positive_roots.len();
        let in_range = match g {
            Generator::Lie(i) => i < self.data.dim(),
            Generator::A(b) | Generator::AStar(b) => b < roots,
            Generator::B(i) => i < self.data.rank,
        };
        in_range
            && match self.kind {
                ModuleKind::WeylM => g.is_free_field(),
                ModuleKind::HeisenbergPi { .. } => matches!(g, Generator::B(_)),
                ModuleKind::VacuumV { .. } => matches!(g, Generator::Lie(_)),
                ModuleKind::FreeField { .. } | ModuleKind::CriticalFreeField { .. } => {
                    !matches!(g, Generator::Lie(_))
                }
            }
    }

    pub fn check_legal(&self, g: Generator) -> Result<()> {
        if self.is_legal(g) {
            Ok(())
        } else {
            Err(Error::IllegalGenerator {
                generator: format!("{g:?}"),
                module: self.kind_name().into(),
            })
        }
    }

    /// Whether `g` is one of the polynomial generators of the module.
    pub fn is_creation(&self, g: GeneratorMode) -> bool {
        match (&self.kind, g.gen) {
            (ModuleKind::CriticalFreeField { .. }, Generator::B(_)) => false,
            (_, Generator::AStar(_)) => g.mode <= 0,
            _ => g.mode <= -1,
        }
    }

    /// Largest positive mode on which `b_{i,n}` acts by a nonzero scalar
    /// (only the critical module with non-graded `λ(t)` has any).
    pub fn positive_mode_slack(&self) -> i64 {
        match &self.kind {
            ModuleKind::CriticalFreeField { lambda_t } => lambda_t
                .keys()
                .map(|(_, n)| *n)
                .filter(|n| *n > 0)
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Exact action of one generator mode.
    pub fn apply_mode(&self, g: GeneratorMode, v: &SparseVector<S>) -> Result<SparseVector<S>> {
        self.check_legal(g.gen)?;
        Ok(self.apply_unchecked(g, v))
    }

    pub(crate) fn apply_unchecked(&self, g: GeneratorMode, v: &SparseVector<S>) -> SparseVector<S> {
        v.map_linear(|m| self.apply_monomial(g, m))
    }

    /// Action of a generator mode on a basis monomial.
    pub fn apply_monomial(&self, g: GeneratorMode, m: &Monomial) -> SparseVector<S> {
        match &self.kind {
            ModuleKind::VacuumV { level } => self.vacuum_apply(g, m, level),
            _ => self.free_apply(g, m),
        }
    }

    fn free_apply(&self, g: GeneratorMode, m: &Monomial) -> SparseVector<S> {
        let p = self.prime;
        let mut out = SparseVector::zero(p);
        match g.gen {
            Generator::A(b) => {
                if g.mode <= -1 {
                    out.add_term(m.multiplied(g), S::one(p));
                } else {
                    let partner = GeneratorMode::new(Generator::AStar(b), -g.mode);
                    if let Some(rest) = m.divided(partner) {
                        out.add_term(rest, S::from_i64(m.exponent(partner) as i64, p));
                    }
                }
            }
            Generator::AStar(b) => {
                if g.mode <= 0 {
                    out.add_term(m.multiplied(g), S::one(p));
                } else {
                    let partner = GeneratorMode::new(Generator::A(b), -g.mode);
                    if let Some(rest) = m.divided(partner) {
                        out.add_term(rest, S::from_i64(-(m.exponent(partner) as i64), p));
                    }
                }
            }
            Generator::B(i) => match &self.kind {
                ModuleKind::CriticalFreeField { lambda_t } => {
                    if let Some(c) = lambda_t.get(&(i, g.mode)) {
                        out.add_term(m.clone(), c.clone());
                    }
                }
                ModuleKind::HeisenbergPi { level, lambda }
                | ModuleKind::FreeField { level, lambda } => {
                    if g.mode <= -1 {
                        out.add_term(m.multiplied(g), S::one(p));
                    } else if g.mode == 0 {
                        out.add_term(m.clone(), lambda[i].clone());
                    } else {
                        // [b_{i,n}, b_{j,-n}] = n κ ⟨h_i, h_j⟩
                        for j in 0..self.data.rank {
                            let partner = GeneratorMode::new(Generator::B(j), -g.mode);
                            let form = self.data.cartan_form(i, j);
                            if form == 0 {
                                continue;
                            }
                            if let Some(rest) = m.divided(partner) {
                                let c = Fp::new(g.mode, p)
                                    * Fp::new(form, p)
                                    * Fp::new(m.exponent(partner) as i64, p);
                                out.add_term(rest, level.scale_fp(c));
                            }
                        }
                    }
                }
                _ => unreachable!("b generator on a module without a Heisenberg factor"),
            },
            Generator::Lie(_) => unreachable!("loop generator on a free-field module"),
        }
        out
    }

    /// PBW straightening: `g y₁ rest = y₁ (g rest) + [g, y₁] rest`.
    fn vacuum_apply(&self, g: GeneratorMode, m: &Monomial, level: &S) -> SparseVector<S> {
        let key = (g, m.clone());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        let p = self.prime;
        let creation = g.mode <= -1;
        let out = match m.first() {
            None => {
                if creation {
                    SparseVector::basis(m.multiplied(g), p)
                } else {
                    SparseVector::zero(p)
                }
            }
            Some(first) if creation && g <= first => SparseVector::basis(m.multiplied(g), p),
            Some(first) => {
                let rest = m.divided(first).expect("first factor present");
                let inner = self.vacuum_apply_vec(g, &SparseVector::basis(rest.clone(), p), level);
                let mut out = self.vacuum_apply_vec(first, &inner, level);
                let (Generator::Lie(i), Generator::Lie(j)) = (g.gen, first.gen) else {
                    unreachable!("vacuum module only carries loop generators")
                };
                let br = affine_bracket(
                    &self.data,
                    &AffineElement::<S>::basis(i, g.mode, p),
                    &AffineElement::<S>::basis(j, first.mode, p),
                );
                let rest_v = SparseVector::basis(rest, p);
                for (&(k, n), c) in &br.terms {
                    let w = self.vacuum_apply_vec(
                        GeneratorMode::new(Generator::Lie(k), n),
                        &rest_v,
                        level,
                    );
                    out.add_scaled(&w, c);
                }
                if !br.central.is_zero() {
                    out.add_scaled(&rest_v, &(br.central.clone() * level.clone()));
                }
                out
            }
        };
        self.cache
            .lock()
            .expect("cache lock")
            .insert(key, out.clone());
        out
    }

    fn vacuum_apply_vec(
        &self,
        g: GeneratorMode,
        v: &SparseVector<S>,
        level: &S,
    ) -> SparseVector<S> {
        v.map_linear(|m| self.vacuum_apply(g, m, level))
    }

    /// Polynomial generators of depth at most `depth`, in monomial order.
    pub fn creation_generators(&self, depth: u32) -> Vec<GeneratorMode> {
        let d = depth as i64;
        let mut gens = Vec::new();
        let roots = self.data.positive_roots.len();
        let free = |gens: &mut Vec<GeneratorMode>| {
            for b in 0..roots {
                for m in 1..=d {
                    gens.push(GeneratorMode::new(Generator::A(b), -m));
                }
                for m in 0..=d {
                    gens.push(GeneratorMode::new(Generator::AStar(b), -m));
                }
            }
        };
        let heis = |gens: &mut Vec<GeneratorMode>| {
            for i in 0..self.data.rank {
                for m in 1..=d {
                    gens.push(GeneratorMode::new(Generator::B(i), -m));
                }
            }
        };
        match self.kind {
            ModuleKind::WeylM | ModuleKind::CriticalFreeField { .. } => free(&mut gens),
            ModuleKind::HeisenbergPi { .. } => heis(&mut gens),
            ModuleKind::FreeField { .. } => {
                free(&mut gens);
                heis(&mut gens);
            }
            ModuleKind::VacuumV { .. } => {
                for i in 0..self.data.dim() {
                    for m in 1..=d {
                        gens.push(GeneratorMode::new(Generator::Lie(i), -m));
                    }
                }
            }
        }
        gens.sort();
        gens
    }

    /// Basis monomials of δ-depth at most `depth`, exponents below `exp_cap`
    /// when given. Unbounded depth-0 powers are cut at the default ᾱ-bound.
    pub fn basis_enumerate(&self, depth: u32, exp_cap: Option<u32>) -> Vec<Monomial> {
        self.basis_enumerate_with(Truncation {
            depth,
            exp_cap,
            alpha_bound: None,
        })
    }

    pub fn basis_enumerate_with(&self, t: Truncation) -> Vec<Monomial> {
        let gens = self.creation_generators(t.depth);
        let has_free_depth0 = gens.iter().any(|g| g.depth() == 0);
        let alpha_bound = match (t.alpha_bound, t.exp_cap) {
            (Some(b), _) => Some(b),
            (None, None) if has_free_depth0 => Some(Truncation::default_alpha_bound(t.depth)),
            _ => None,
        };
        let height = self
            .data
            .positive_roots
            .iter()
            .flatten()
            .copied()
            .max()
            .unwrap_or(1)
            .max(1);
        let depth0_cap = alpha_bound.map(|b| (b + t.depth as i64 * height) as u32 + 1);
        let mut out = Vec::new();
        let mut current = Vec::new();
        enumerate_rec(
            &gens,
            0,
            t.depth as i64,
            t.exp_cap,
            depth0_cap,
            &mut current,
            &mut out,
        );
        if let Some(b) = alpha_bound {
            let data = &self.data;
            out.retain(|m| m.weight(data).iter().all(|c| c.abs() <= b));
        }
        out.sort_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| a.cmp(b)));
        out
    }
}

fn check_lambda<S: Scalar>(data: &FiniteLieData, lambda: &[S]) -> Result<()> {
    if lambda.len() != data.rank {
        return Err(Error::InvalidConfig(format!(
            "λ has {} entries for rank {}",
            lambda.len(),
            data.rank
        )));
    }
    Ok(())
}

fn enumerate_rec(
    gens: &[GeneratorMode],
    idx: usize,
    remaining: i64,
    cap: Option<u32>,
    depth0_cap: Option<u32>,
    current: &mut Vec<(GeneratorMode, u32)>,
    out: &mut Vec<Monomial>,
) {
    if idx == gens.len() {
        out.push(Monomial::from_factors(current.iter().copied()));
        return;
    }
    let g = gens[idx];
    let d = g.depth();
    let by_depth = if d == 0 {
        match (cap, depth0_cap) {
            (Some(c), _) => c - 1,
            (None, Some(c)) => c,
            (None, None) => 0,
        }
    } else {
        (remaining / d) as u32
    };
    let max_e = match cap {
        Some(c) => by_depth.min(c - 1),
        None => by_depth,
    };
    for e in 0..=max_e {
        if e > 0 {
            current.push((g, e));
        }
        enumerate_rec(
            gens,
            idx + 1,
            remaining - d * e as i64,
            cap,
            depth0_cap,
            current,
            out,
        );
        if e > 0 {
            current.pop();
        }
    }
}

/// Applies `action` to one tensor factor of `M ⊗ π` and the identity to the other.
pub fn tensor_apply<S: Scalar>(
    weyl: &ModuleSpec<S>,
    heisenberg: &ModuleSpec<S>,
    factor: Factor,
    action: impl Fn(&ModuleSpec<S>, &SparseVector<S>) -> SparseVector<S>,
    v: &SparseVector<S>,
) -> SparseVector<S> {
    v.map_linear(|m| {
        let (weyl_part, heis_part) = m.partition(|g| g.gen.is_free_field());
        let p = v.prime();
        match factor {
            Factor::Weyl => action(weyl, &SparseVector::basis(weyl_part, p))
                .map_linear(|w| SparseVector::basis(w.merged(&heis_part), p)),
            Factor::Heisenberg => action(heisenberg, &SparseVector::basis(heis_part, p))
                .map_linear(|h| SparseVector::basis(weyl_part.merged(h), p)),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn sl2() -> Arc<FiniteLieData> {
        Arc::new(FiniteLieData::sl2())
    }

    const F: usize = 0;
    const H: usize = 1;
    const E: usize = 2;

    fn lie(i: usize, n: i64) -> GeneratorMode {
        GeneratorMode::new(Generator::Lie(i), n)
    }

    fn a(n: i64) -> GeneratorMode {
        GeneratorMode::new(Generator::A(0), n)
    }

    fn astar(n: i64) -> GeneratorMode {
        GeneratorMode::new(Generator::AStar(0), n)
    }

    fn b(n: i64) -> GeneratorMode {
        GeneratorMode::new(Generator::B(0), n)
    }

    #[test]
    fn vacuum_examples() {
        let q = p(5);
        let kappa = Fp::new(3, q);
        let v = ModuleSpec::vacuum(sl2(), kappa);
        let f = SparseVector::basis(Monomial::from_factors([(lie(F, -1), 1)]), q);
        let r = v.apply_mode(lie(E, 0), &f).unwrap();
        assert_eq!(
            r,
            SparseVector::basis(Monomial::from_factors([(lie(H, -1), 1)]), q)
        );
        let r = v.apply_mode(lie(E, 1), &f).unwrap();
        assert_eq!(r, SparseVector::vacuum(q).scaled(&kappa));
        for i in 0..3 {
            for n in 0..3 {
                assert!(v
                    .apply_mode(lie(i, n), &SparseVector::vacuum(q))
                    .unwrap()
                    .is_zero());
            }
        }
    }

    #[test]
    fn weyl_examples() {
        let q = p(3);
        let m = ModuleSpec::<Fp>::weyl(sl2(), q);
        let s = SparseVector::basis(Monomial::from_factors([(astar(0), 1)]), q);
        assert_eq!(m.apply_mode(a(0), &s).unwrap(), SparseVector::vacuum(q));
        assert!(m
            .apply_mode(a(0), &SparseVector::vacuum(q))
            .unwrap()
            .is_zero());
        assert!(m
            .apply_mode(astar(1), &SparseVector::vacuum(q))
            .unwrap()
            .is_zero());
        assert!(m.apply_mode(b(-1), &s).is_err());
        assert!(m.apply_mode(lie(E, 0), &s).is_err());
    }

    #[test]
    fn heisenberg_zero_mode_and_level() {
        let q = p(7);
        let pi = ModuleSpec::heisenberg(sl2(), Fp::new(3, q), vec![Fp::new(4, q)]).unwrap();
        let v = SparseVector::basis(Monomial::from_factors([(b(-2), 2)]), q);
        assert_eq!(pi.apply_mode(b(0), &v).unwrap(), v.scaled(&Fp::new(4, q)));
        // b_2 b_{-2}^2 = 2 * (2 * 3 * 2) b_{-2}
        let r = pi.apply_mode(b(2), &v).unwrap();
        let expect =
            SparseVector::basis(Monomial::from_factors([(b(-2), 1)]), q).scaled(&Fp::new(24, q));
        assert_eq!(r, expect);
    }

    #[test]
    fn enumeration_examples() {
        let q = p(2);
        let m = ModuleSpec::<Fp>::weyl(sl2(), q);
        let basis = m.basis_enumerate(0, Some(2));
        assert_eq!(
            basis,
            vec![Monomial::one(), Monomial::from_factors([(astar(0), 1)])]
        );

        let pi = ModuleSpec::heisenberg(sl2(), Fp::one(q), vec![Fp::zero(q)]).unwrap();
        assert_eq!(
            pi.basis_enumerate(1, None),
            vec![Monomial::one(), Monomial::from_factors([(b(-1), 1)])]
        );

        let v = ModuleSpec::vacuum(sl2(), Fp::one(q));
        let basis = v.basis_enumerate(1, None);
        assert_eq!(basis.len(), 4);
        assert!(basis.contains(&Monomial::from_factors([(lie(E, -1), 1)])));
        // ∏(1-q^n)^{-3}: 1, 3, 9, 22, 51, 108
        assert_eq!(v.basis_enumerate(5, None).len(), 1 + 3 + 9 + 22 + 51 + 108);
    }

    #[test]
    fn unbounded_enumeration_uses_alpha_bound() {
        let q = p(3);
        let m = ModuleSpec::<Fp>::weyl(sl2(), q);
        let basis = m.basis_enumerate(0, None);
        // a*_0^k for k ≤ 4
        assert_eq!(basis.len(), 5);
    }

    #[test]
    fn tensor_apply_examples() {
        let q = p(3);
        let data = sl2();
        let ff = ModuleSpec::free_field(data.clone(), Fp::new(2, q), vec![Fp::zero(q)]).unwrap();
        let (weyl, heis) = ff.factors().unwrap();
        let v = SparseVector::basis(Monomial::from_factors([(astar(0), 1)]), q);
        let r = tensor_apply(
            &weyl,
            &heis,
            Factor::Weyl,
            |m, x| m.apply_mode(a(0), x).unwrap(),
            &v,
        );
        assert_eq!(r, SparseVector::vacuum(q));
        let mixed = SparseVector::basis(Monomial::from_factors([(astar(-1), 1), (b(-2), 1)]), q);
        for factor in [Factor::Weyl, Factor::Heisenberg] {
            let id = tensor_apply(&weyl, &heis, factor, |_, x| x.clone(), &mixed);
            assert_eq!(id, mixed);
        }
        // product action agrees with factor actions
        for g in [a(1), astar(1), b(2), b(-1), a(-1)] {
            let direct = ff.apply_mode(g, &mixed).unwrap();
            let factor = if matches!(g.gen, Generator::B(_)) {
                Factor::Heisenberg
            } else {
                Factor::Weyl
            };
            let via = tensor_apply(
                &weyl,
                &heis,
                factor,
                |m, x| m.apply_mode(g, x).unwrap(),
                &mixed,
            );
            assert_eq!(direct, via);
        }
        let (wp, hp) = mixed
            .iter()
            .next()
            .unwrap()
            .0
            .partition(|g| g.gen.is_free_field());
        assert_eq!(wp.depth() + hp.depth(), 3);
    }

    #[test]
    fn depth_and_weight_shift() {
        let q = p(5);
        let data = sl2();
        let v = ModuleSpec::vacuum(data.clone(), Fp::new(2, q));
        for m in v.basis_enumerate(3, None) {
            for i in 0..3 {
                for n in -2..=2 {
                    let g = lie(i, n);
                    let out = v.apply_mode(g, &SparseVector::basis(m.clone(), q)).unwrap();
                    for (r, _) in out.iter() {
                        assert_eq!(r.depth(), m.depth() - n);
                        let w: Vec<i64> = m
                            .weight(&data)
                            .iter()
                            .zip(g.weight(&data))
                            .map(|(x, y)| x + y)
                            .collect();
                        assert_eq!(r.weight(&data), w);
                    }
                }
            }
        }
    }
}
