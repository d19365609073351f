//! Finite and affine Lie algebra data: Chevalley basis, structure constants,
//! invariant form, restricted structure and the affine bracket.
//!
//! All constants are integers and get reduced mod `p` where they are used,
//! so one record serves every prime. The basis order of a record is the PBW
//! order used by the vacuum module (lowering, Cartan, raising for `sl₂`).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{CheckReport, TermJson, Witness};
use crate::scalars::{Fp, Prime, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Raising { root: usize },
    Cartan { index: usize },
    Lowering { root: usize },
}

/// A sparse integer combination of basis elements.
pub type Combination = Vec<(usize, i64)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLieData {
    pub name: String,
    pub rank: usize,
    pub labels: Vec<String>,
    pub kinds: Vec<BasisKind>,
    /// Positive roots in simple-root coordinates; entry `i < rank` is `α_{i+1}`.
    pub positive_roots: Vec<Vec<i64>>,
    /// `cartan_matrix[i][j] = α_j(h_i)`.
    pub cartan_matrix: Vec<Vec<i64>>,
    /// `structure[i][j]` is `[x_i, x_j]`.
    pub structure: Vec<Vec<Combination>>,
    pub form: Vec<Vec<i64>>,
    /// `x_i^{[p]}` for every basis element.
    pub p_power: Vec<Combination>,
    pub rho_on_coroots: Vec<i64>,
    pub dual_coxeter: i64,
}

impl FiniteLieData {
    /// `sl₂` with basis `f, h, e`, `⟨e,f⟩ = 1`, `⟨h,h⟩ = 2`.
    pub fn sl2() -> Self {
        let (f, h, e) = (0usize, 1usize, 2usize);
        let mut structure = vec![vec![Vec::new(); 3]; 3];
        structure[e][f] = vec![(h, 1)];
        structure[f][e] = vec![(h, -1)];
        structure[h][e] = vec![(e, 2)];
        structure[e][h] = vec![(e, -2)];
        structure[h][f] = vec![(f, -2)];
        structure[f][h] = vec![(f, 2)];
        let mut form = vec![vec![0; 3]; 3];
        form[e][f] = 1;
        form[f][e] = 1;
        form[h][h] = 2;
        FiniteLieData {
            name: "sl2".into(),
            rank: 1,
            labels: vec!["f".into(), "h".into(), "e".into()],
            kinds: vec![
                BasisKind::Lowering { root: 0 },
                BasisKind::Cartan { index: 0 },
                BasisKind::Raising { root: 0 },
            ],
            positive_roots: vec![vec![1]],
            cartan_matrix: vec![vec![2]],
            structure,
            form,
            p_power: vec![vec![], vec![(h, 1)], vec![]],
            rho_on_coroots: vec![1],
            dual_coxeter: 2,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let data: FiniteLieData = serde_json::from_str(text)?;
        data.validate()?;
        Ok(data)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, i64)] {
        &self.structure[i][j]
    }

    pub fn form(&self, i: usize, j: usize) -> i64 {
        self.form[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn raising(&self, root: usize) -> Option<usize> {
        self.kinds
            .iter()
            .position(|k| *k == BasisKind::Raising { root })
    }

    pub fn lowering(&self, root: usize) -> Option<usize> {
        self.kinds
            .iter()
            .position(|k| *k == BasisKind::Lowering { root })
    }

    pub fn coroot(&self, index: usize) -> Option<usize> {
        self.kinds
            .iter()
            .position(|k| *k == BasisKind::Cartan { index })
    }

    /// `⟨h_i, h_j⟩` on the Cartan basis.
    pub fn cartan_form(&self, i: usize, j: usize) -> i64 {
        match (self.coroot(i), self.coroot(j)) {
            (Some(a), Some(b)) => self.form[a][b],
            _ => 0,
        }
    }

    /// `β(h_i)` for the positive root with index `beta`.
    pub fn root_on_coroot(&self, beta: usize, i: usize) -> i64 {
        self.positive_roots[beta]
            .iter()
            .enumerate()
            .map(|(j, c)| c * self.cartan_matrix[i][j])
            .sum()
    }

    /// Weight of a basis element in simple-root coordinates.
    pub fn weight(&self, idx: usize) -> Vec<i64> {
        match self.kinds[idx] {
            BasisKind::Raising { root } => self.positive_roots[root].clone(),
            BasisKind::Lowering { root } => self.positive_roots[root].iter().map(|c| -c).collect(),
            BasisKind::Cartan { .. } => vec![0; self.rank],
        }
    }

    /// Structural checks: antisymmetry, Jacobi, invariance of the form and
    /// weight homogeneity of the structure constants.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let bad = |m: String| Err(Error::InvalidData(m));
        if self.kinds.len() != d
            || self.structure.len() != d
            || self.form.len() != d
            || self.p_power.len() != d
        {
            return bad("table sizes disagree with the number of labels".into());
        }
        if self.cartan_matrix.len() != self.rank || self.rho_on_coroots.len() != self.rank {
            return bad("rank-indexed tables have the wrong size".into());
        }
        for i in 0..d {
            if self.structure[i].len() != d || self.form[i].len() != d {
                return bad(format!("row {i} has the wrong length"));
            }
        }
        for i in 0..d {
            for j in 0..d {
                let a = dense(self.bracket(i, j), d);
                let b = dense(self.bracket(j, i), d);
                if a.iter().zip(&b).any(|(x, y)| x + y != 0) {
                    return bad(format!(
                        "bracket not antisymmetric on ({}, {})",
                        self.labels[i], self.labels[j]
                    ));
                }
                if self.form[i][j] != self.form[j][i] {
                    return bad("form is not symmetric".into());
                }
                let w: Vec<i64> = self
                    .weight(i)
                    .iter()
                    .zip(self.weight(j))
                    .map(|(a, b)| a + b)
                    .collect();
                for &(k, c) in self.bracket(i, j) {
                    if c != 0 && self.weight(k) != w {
                        return bad(format!(
                            "bracket of {} and {} is not weight homogeneous",
                            self.labels[i], self.labels[j]
                        ));
                    }
                }
                for k in 0..d {
                    // invariance ⟨[x,y],z⟩ = ⟨x,[y,z]⟩
                    let lhs: i64 = self
                        .bracket(i, j)
                        .iter()
                        .map(|&(t, c)| c * self.form[t][k])
                        .sum();
                    let rhs: i64 = self
                        .bracket(j, k)
                        .iter()
                        .map(|&(t, c)| c * self.form[i][t])
                        .sum();
                    if lhs != rhs {
                        return bad("form is not invariant".into());
                    }
                    let mut jac = vec![0i64; d];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for &(t, c1) in self.bracket(b, c) {
                            for &(s, c2) in self.bracket(a, t) {
                                jac[s] += c1 * c2;
                            }
                        }
                    }
                    if jac.iter().any(|&x| x != 0) {
                        return bad("Jacobi identity fails".into());
                    }
                }
            }
        }
        Ok(())
    }
}

fn dense(c: &[(usize, i64)], d: usize) -> Vec<i64> {
    let mut v = vec![0; d];
    for &(i, x) in c {
        v[i] += x;
    }
    v
}

/// A finitely supported element `Σ c_{x,n} x_n + c·(central)` of the affine algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineElement<S> {
    pub terms: BTreeMap<(usize, i64), S>,
    pub central: S,
}

impl<S: Scalar> AffineElement<S> {
    pub fn zero(p: Prime) -> Self {
        AffineElement {
            terms: BTreeMap::new(),
            central: S::zero(p),
        }
    }

    pub fn basis(idx: usize, mode: i64, p: Prime) -> Self {
        let mut e = Self::zero(p);
        e.terms.insert((idx, mode), S::one(p));
        e
    }

    pub fn central_unit(p: Prime) -> Self {
        AffineElement {
            terms: BTreeMap::new(),
            central: S::one(p),
        }
    }

    pub fn prime(&self) -> Prime {
        self.central.prime()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.central.is_zero()
    }

    pub fn add_term(&mut self, idx: usize, mode: i64, c: S) {
        if c.is_zero() {
            return;
        }
        let p = self.prime();
        let slot = self.terms.entry((idx, mode)).or_insert_with(|| S::zero(p));
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&(idx, mode));
        }
    }

    pub fn add(&mut self, other: &Self) {
        for ((i, n), c) in &other.terms {
            self.add_term(*i, *n, c.clone());
        }
        self.central = self.central.clone() + other.central.clone();
    }

    pub fn scaled(&self, s: &S) -> Self {
        let mut out = Self::zero(self.prime());
        for ((i, n), c) in &self.terms {
            out.add_term(*i, *n, c.clone() * s.clone());
        }
        out.central = self.central.clone() * s.clone();
        out
    }

    /// Loop part together with the scalar by which the central term acts at level `κ`.
    pub fn at_level(&self, level: &S) -> (BTreeMap<(usize, i64), S>, S) {
        (self.terms.clone(), self.central.clone() * level.clone())
    }

    pub fn describe(&self, data: &FiniteLieData) -> Vec<TermJson> {
        let mut out: Vec<TermJson> = self
            .terms
            .iter()
            .map(|((i, n), c)| TermJson {
                monomial: format!("{}_{{{}}}", data.labels[*i], n),
                coeff: c.to_string(),
            })
            .collect();
        if !self.central.is_zero() {
            out.push(TermJson {
                monomial: "c".into(),
                coeff: self.central.to_string(),
            });
        }
        out
    }
}

impl<S: Scalar> fmt::Display for AffineElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|((i, n), c)| format!("{c}*x{i}_{{{n}}}"))
            .collect();
        if !self.central.is_zero() {
            parts.push(format!("{}*c", self.central));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `[x_m, y_n] = [x,y]_{m+n} + m δ_{m,-n} ⟨x,y⟩ c`, bilinearly extended;
/// `c` is central. The returned `central` field is the coefficient of `c`.
pub fn affine_bracket<S: Scalar>(
    data: &FiniteLieData,
    x: &AffineElement<S>,
    y: &AffineElement<S>,
) -> AffineElement<S> {
    let p = x.prime();
    let mut out = AffineElement::zero(p);
    for (&(i, m), cx) in &x.terms {
        for (&(j, n), cy) in &y.terms {
            let c = cx.clone() * cy.clone();
            for &(k, s) in data.bracket(i, j) {
                out.add_term(k, m + n, c.scale_fp(Fp::new(s, p)));
            }
            if m + n == 0 {
                let central = Fp::new(m, p) * Fp::new(data.form(i, j), p);
                out.central = out.central.clone() + c.scale_fp(central);
            }
        }
    }
    out
}

/// The restricted structure `(t^n ⊗ x)^{[p]} = t^{np} ⊗ x^{[p]}`, `c^{[p]} = c`.
/// Defined on single basis elements (with a scalar, which is raised to the
/// `p`-th power) and on multiples of `c`.
pub fn p_power<S: Scalar>(data: &FiniteLieData, x: &AffineElement<S>) -> Result<AffineElement<S>> {
    let p = x.prime();
    let q = p.get() as i64;
    match (x.terms.len(), x.central.is_zero()) {
        (0, _) => Ok(AffineElement {
            terms: BTreeMap::new(),
            central: x.central.pow(q as u64),
        }),
        (1, true) => {
            let (&(i, n), c) = x.terms.iter().next().expect("one term");
            let cp = c.pow(q as u64);
            let mut out = AffineElement::zero(p);
            for &(k, s) in &data.p_power[i] {
                out.add_term(k, n * q, cp.scale_fp(Fp::new(s, p)));
            }
            Ok(out)
        }
        _ => Err(Error::NotBasisElement(x.to_string())),
    }
}

/// Checks `(ad x_m)^p y_n = [x_m^{[p]}, y_n]` for all basis `x, y` and
/// `|m|, |n| <= mode_bound`, at levels 0 and 1.
pub fn verify_restricted(data: &FiniteLieData, p: Prime, mode_bound: i64) -> CheckReport {
    let mut report = CheckReport::new(
        "restricted-structure",
        json!({"algebra": data.name, "p": p.get(), "mode_bound": mode_bound, "levels": [0, 1]}),
    );
    let d = data.dim();
    for x in 0..d {
        for m in -mode_bound..=mode_bound {
            let xm = AffineElement::<Fp>::basis(x, m, p);
            let xp = p_power(data, &xm).expect("basis element");
            for y in 0..d {
                for n in -mode_bound..=mode_bound {
                    let yn = AffineElement::<Fp>::basis(y, n, p);
                    let mut lhs = yn.clone();
                    for _ in 0..p.get() {
                        lhs = affine_bracket(data, &xm, &lhs);
                    }
                    let rhs = affine_bracket(data, &xp, &yn);
                    for level in [0i64, 1] {
                        report.checked += 1;
                        let level = Fp::new(level, p);
                        if lhs.at_level(&level) != rhs.at_level(&level) {
                            report.fail(Witness {
                                description: format!(
                                    "(ad {}_{{{m}}})^{} {}_{{{n}}} at level {level}",
                                    data.labels[x], p, data.labels[y]
                                ),
                                probe: vec![],
                                lhs: lhs.describe(data),
                                rhs: rhs.describe(data),
                            });
                        }
                    }
                }
            }
        }
    }
    report
}
