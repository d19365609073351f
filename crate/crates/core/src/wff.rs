//! The free-field realization `V^κ(ĝ) → M ⊗ π^{κ-κ_c}` and its finite-type
//! shadow `φ: U(ḡ) → D(U)` in differential operators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{record, Evaluator, FieldExpr};
use crate::fock::{Generator, ModuleSpec, SparseVector, Truncation};
use crate::report::{CheckReport, TermJson, Witness};
use crate::root_data::{affine_bracket, AffineElement, BasisKind, FiniteLieData};
use crate::scalars::{fp_binom, fp_falling, Fp, Prime, Scalar};

/// One monomial `coeff · Π a*_β^{e_β}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: i64,
}

/// Polynomial data for the realization: per simple index `i`, the integers
/// `c_i` and the polynomials `P^i_β`, `Q^i_β` in the `a*` variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WffTables {
    pub rank: usize,
    pub c: Vec<i64>,
    /// `p[i][β]`; the entry for `β = α_i` is ignored.
    pub p: Vec<Vec<Vec<PolyTerm>>>,
    /// `q[i][β]`.
    pub q: Vec<Vec<Vec<PolyTerm>>>,
}

impl WffTables {
    pub fn sl2() -> Self {
        WffTables {
            rank: 1,
            c: vec![-2],
            p: vec![vec![vec![]]],
            q: vec![vec![vec![PolyTerm {
                exponents: vec![2],
                coeff: -1,
            }]]],
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Builtin tables for a shipped algebra.
    pub fn for_algebra(data: &FiniteLieData) -> Result<Self> {
        if data.name == "sl2" {
            Ok(Self::sl2())
        } else {
            Err(Error::MissingTables(data.rank))
        }
    }

    fn validate(&self, data: &FiniteLieData) -> Result<()> {
        let roots = data.positive_roots.len();
        if self.rank != data.rank
            || self.c.len() != data.rank
            || self.p.len() != data.rank
            || self.q.len() != data.rank
        {
            return Err(Error::MissingTables(data.rank));
        }
        for table in self.p.iter().chain(&self.q) {
            if table.len() != roots || table.iter().flatten().any(|t| t.exponents.len() != roots) {
                return Err(Error::InvalidData(
                    "polynomial table does not match the positive roots".into(),
                ));
            }
        }
        Ok(())
    }
}

/// `κ_c = -h^∨` for the normalized form.
pub fn critical_level<S: Scalar>(data: &FiniteLieData, p: Prime) -> S {
    S::from_i64(-data.dual_coxeter, p)
}

fn poly_times_a<S: Scalar>(poly: &[PolyTerm], beta: usize, p: Prime) -> Vec<FieldExpr<S>> {
    poly.iter()
        .filter(|t| t.coeff.rem_euclid(p.get() as i64) != 0)
        .map(|t| {
            let mut factors = Vec::new();
            for (gamma, &e) in t.exponents.iter().enumerate() {
                for _ in 0..e {
                    factors.push(FieldExpr::gen(Generator::AStar(gamma)));
                }
            }
            factors.push(FieldExpr::gen(Generator::A(beta)));
            let f = if factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                FieldExpr::nop(factors)
            };
            scaled(S::from_i64(t.coeff, p), f)
        })
        .collect()
}

fn scaled<S: Scalar>(s: S, f: FieldExpr<S>) -> FieldExpr<S> {
    if s == S::one(s.prime()) {
        f
    } else {
        FieldExpr::scale(s, f)
    }
}

/// Images of `e_i`, `h_i`, `f_i`:
///
/// `e_i ↦ a_{α_i} + Σ_{β≠α_i} :P^i_β(a*) a_β:`,
/// `h_i ↦ -Σ_β β(h_i) :a*_β a_β: + b_i`,
/// `f_i ↦ Σ_β :Q^i_β(a*) a_β: + (c_i + (κ-κ_c)⟨e_i,f_i⟩) ∂a*_{α_i} + :a*_{α_i} b_i:`.
pub fn wff_image<S: Scalar>(
    data: &FiniteLieData,
    tables: &WffTables,
    i: usize,
    kappa: &S,
) -> Result<(FieldExpr<S>, FieldExpr<S>, FieldExpr<S>)> {
    tables.validate(data)?;
    if i >= data.rank {
        return Err(Error::InvalidConfig(format!(
            "simple index {i} beyond rank {}",
            data.rank
        )));
    }
    let p = kappa.prime();
    let roots = data.positive_roots.len();

    let mut e_terms = vec![FieldExpr::gen(Generator::A(i))];
    for beta in (0..roots).filter(|&b| b != i) {
        e_terms.extend(poly_times_a(&tables.p[i][beta], beta, p));
    }

    let mut h_terms = Vec::new();
    for beta in 0..roots {
        let c = data.root_on_coroot(beta, i);
        if c.rem_euclid(p.get() as i64) != 0 {
            let nop = FieldExpr::nop(vec![
                FieldExpr::gen(Generator::AStar(beta)),
                FieldExpr::gen(Generator::A(beta)),
            ]);
            h_terms.push(scaled(S::from_i64(-c, p), nop));
        }
    }
    h_terms.push(FieldExpr::gen(Generator::B(i)));

    let mut f_terms = Vec::new();
    for beta in 0..roots {
        f_terms.extend(poly_times_a(&tables.q[i][beta], beta, p));
    }
    let ef = data.form(
        data.raising(i)
            .ok_or_else(|| Error::InvalidData("missing raising element".into()))?,
        data.lowering(i)
            .ok_or_else(|| Error::InvalidData("missing lowering element".into()))?,
    );
    let coeff = S::from_i64(tables.c[i], p)
        + (kappa.clone() - critical_level(data, p)) * S::from_i64(ef, p);
    if !coeff.is_zero() {
        f_terms.push(scaled(
            coeff,
            FieldExpr::deriv(1, FieldExpr::gen(Generator::AStar(i))),
        ));
    }
    f_terms.push(FieldExpr::nop(vec![
        FieldExpr::gen(Generator::AStar(i)),
        FieldExpr::gen(Generator::B(i)),
    ]));

    let collapse = |mut ts: Vec<FieldExpr<S>>| {
        if ts.len() == 1 {
            ts.pop().expect("one term")
        } else {
            FieldExpr::sum(ts)
        }
    };
    Ok((collapse(e_terms), collapse(h_terms), collapse(f_terms)))
}

/// The realization at a fixed level on a fixed target module.
pub struct WffRealization<S> {
    pub data: Arc<FiniteLieData>,
    pub kappa: S,
    pub module: ModuleSpec<S>,
    images: BTreeMap<usize, FieldExpr<S>>,
}

impl<S: Scalar> WffRealization<S> {
    /// Target `M ⊗ π^{κ-κ_c}(λ)`.
    pub fn new(
        data: Arc<FiniteLieData>,
        tables: &WffTables,
        kappa: S,
        lambda: Vec<S>,
    ) -> Result<Self> {
        let p = kappa.prime();
        let level = kappa.clone() - critical_level(&data, p);
        let module = ModuleSpec::free_field(data.clone(), level, lambda)?;
        Self::on_module(data, tables, kappa, module)
    }

    /// Target `M ⊗ K_{λ(t)}` at the critical level.
    pub fn critical(
        data: Arc<FiniteLieData>,
        tables: &WffTables,
        lambda_t: BTreeMap<(usize, i64), S>,
        p: Prime,
    ) -> Result<Self> {
        let kappa = critical_level(&data, p);
        let module = ModuleSpec::critical_free_field(data.clone(), lambda_t, p)?;
        Self::on_module(data, tables, kappa, module)
    }

    fn on_module(
        data: Arc<FiniteLieData>,
        tables: &WffTables,
        kappa: S,
        module: ModuleSpec<S>,
    ) -> Result<Self> {
        let mut images = BTreeMap::new();
        for i in 0..data.rank {
            let (e, h, f) = wff_image(&data, tables, i, &kappa)?;
            let missing = || Error::InvalidData("incomplete Chevalley basis".into());
            images.insert(data.raising(i).ok_or_else(missing)?, e);
            images.insert(data.coroot(i).ok_or_else(missing)?, h);
            images.insert(data.lowering(i).ok_or_else(missing)?, f);
        }
        Ok(WffRealization {
            data,
            kappa,
            module,
            images,
        })
    }

    pub fn image(&self, idx: usize) -> Option<&FieldExpr<S>> {
        self.images.get(&idx)
    }

    pub fn images(&self) -> impl Iterator<Item = (usize, &FieldExpr<S>)> {
        self.images.iter().map(|(i, f)| (*i, f))
    }

    pub fn prime(&self) -> Prime {
        self.module.prime
    }

    /// `x^w_n v` for a loop generator `x_n`.
    pub fn act<'a>(
        &'a self,
        ev: &mut Evaluator<'a, S>,
        x: usize,
        n: i64,
        v: &SparseVector<S>,
    ) -> SparseVector<S> {
        let f = self.images.get(&x).expect("image of every basis element");
        ev.mode(f, n, v)
    }

    /// Action of a combination of loop generators plus the central term at level `κ`.
    pub fn act_element<'a>(
        &'a self,
        ev: &mut Evaluator<'a, S>,
        x: &AffineElement<S>,
        v: &SparseVector<S>,
    ) -> SparseVector<S> {
        let (terms, central) = x.at_level(&self.kappa);
        let mut out = v.scaled(&central);
        for ((i, n), c) in &terms {
            out.add_scaled(&self.act(ev, *i, *n, v), c);
        }
        out
    }

    /// Probe vectors of depth at most `depth` whose ᾱ-coordinates are bounded by `alpha_bound`.
    pub fn probes(&self, depth: u32, alpha_bound: i64) -> Vec<SparseVector<S>> {
        let p = self.prime();
        self.module
            .basis_enumerate_with(Truncation {
                depth,
                exp_cap: None,
                alpha_bound: Some(alpha_bound),
            })
            .into_iter()
            .map(|m| SparseVector::basis(m, p))
            .collect()
    }
}

/// Checks `[x^w_m, y^w_n] = [x,y]^w_{m+n} + m δ_{m,-n} ⟨x,y⟩ κ` for every
/// pair of basis elements with images and `|m|, |n| ≤ mode_bound`.
pub fn verify_wff_relations<S: Scalar>(
    real: &WffRealization<S>,
    mode_bound: i64,
    probes: &[SparseVector<S>],
) -> CheckReport {
    let data = &real.data;
    let p = real.prime();
    let mut report = CheckReport::new(
        "wff-relations",
        json!({
            "algebra": data.name,
            "p": p.get(),
            "kappa": real.kappa.to_string(),
            "target": real.module.kind_name(),
            "mode_bound": mode_bound,
            "probes": probes.len(),
        }),
    );
    let basis: Vec<usize> = real.images().map(|(i, _)| i).collect();
    let chunk = probes.len().div_ceil(rayon::current_num_threads()).max(1);
    let partial: Vec<CheckReport> = probes
        .par_chunks(chunk)
        .map(|chunk| {
            let mut r = CheckReport::new("wff-relations", json!({}));
            let mut ev = Evaluator::new(&real.module);
            let modes: Vec<i64> = (-mode_bound..=mode_bound).collect();
            for v in chunk {
                let single: BTreeMap<(usize, i64), SparseVector<S>> = basis
                    .iter()
                    .flat_map(|&x| modes.iter().map(move |&m| (x, m)))
                    .map(|(x, m)| ((x, m), real.act(&mut ev, x, m, v)))
                    .collect();
                for &x in &basis {
                    for &y in &basis {
                        for &m in &modes {
                            let xv = &single[&(x, m)];
                            for &n in &modes {
                                let yv = &single[&(y, n)];
                                let xyv = real.act(&mut ev, x, m, yv);
                                let lhs = xyv.sub(&real.act(&mut ev, y, n, xv));
                                let br = affine_bracket(
                                    data,
                                    &AffineElement::basis(x, m, p),
                                    &AffineElement::basis(y, n, p),
                                );
                                let rhs = real.act_element(&mut ev, &br, v);
                                let (lx, ly) = (&data.labels[x], &data.labels[y]);
                                record(
                                    &mut r,
                                    data,
                                    || format!("[{lx}_{m}, {ly}_{n}]"),
                                    v,
                                    &lhs,
                                    &rhs,
                                );
                            }
                        }
                    }
                }
            }
            r
        })
        .collect();
    partial.iter().for_each(|r| report.absorb(r));
    report
}

/// A differential operator `Σ c y^A ∂^B` in normal form (all `y` left of all `∂`),
/// with no divided powers of `∂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    vars: usize,
    prime: Prime,
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Fp>,
}

impl DiffOp {
    pub fn zero(vars: usize, prime: Prime) -> Self {
        DiffOp {
            vars,
            prime,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: usize, c: Fp) -> Self {
        let mut d = Self::zero(vars, c.prime());
        d.add_term(vec![0; vars], vec![0; vars], c);
        d
    }

    pub fn y(vars: usize, i: usize, prime: Prime) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut d = Self::zero(vars, prime);
        d.add_term(e, vec![0; vars], Fp::one(prime));
        d
    }

    pub fn d(vars: usize, i: usize, prime: Prime) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        let mut d = Self::zero(vars, prime);
        d.add_term(vec![0; vars], e, Fp::one(prime));
        d
    }

    pub fn monomial(ys: Vec<u32>, ds: Vec<u32>, c: Fp) -> Self {
        let mut d = Self::zero(ys.len(), c.prime());
        d.add_term(ys, ds, c);
        d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u32>, &Fp)> {
        self.terms.iter().map(|((a, b), c)| (a, b, c))
    }

    fn add_term(&mut self, ys: Vec<u32>, ds: Vec<u32>, c: Fp) {
        if c.is_zero() {
            return;
        }
        let key = (ys, ds);
        let s = self
            .terms
            .get(&key)
            .copied()
            .unwrap_or(Fp::zero(self.prime))
            + c;
        if s.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, s);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), *c);
        }
        out
    }

    pub fn scaled(&self, s: Fp) -> Self {
        let mut out = Self::zero(self.vars, self.prime);
        for ((a, b), c) in &self.terms {
            out.add_term(a.clone(), b.clone(), *c * s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-Fp::one(self.prime)))
    }

    /// Product via `∂^b y^c = Σ_k binom(b,k) c(c-1)…(c-k+1) y^{c-k} ∂^{b-k}` per variable.
    pub fn mul(&self, other: &Self) -> Self {
        let p = self.prime;
        let mut out = Self::zero(self.vars, p);
        for ((ya, da), ca) in &self.terms {
            for ((yb, db), cb) in &other.terms {
                // Expand variable by variable.
                let mut partial: Vec<(Vec<u32>, Vec<u32>, Fp)> =
                    vec![(ya.clone(), vec![0; self.vars], *ca * *cb)];
                for v in 0..self.vars {
                    let mut next = Vec::new();
                    for (ys, ds, c) in &partial {
                        for k in 0..=da[v].min(yb[v]) {
                            let coeff = fp_binom(da[v] as i64, k as u64, p)
                                * fp_falling(yb[v] as i64, k as u64, p);
                            if coeff.is_zero() {
                                continue;
                            }
                            let mut ys = ys.clone();
                            let mut ds = ds.clone();
                            ys[v] += yb[v] - k;
                            ds[v] = da[v] - k + db[v];
                            next.push((ys, ds, *c * coeff));
                        }
                    }
                    partial = next;
                }
                for (ys, ds, c) in partial {
                    out.add_term(ys, ds, c);
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.vars, Fp::one(self.prime));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn bracket(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Membership in `K[y^p, ∂^p]`.
    pub fn in_p_center(&self) -> bool {
        let q = self.prime.get();
        self.terms
            .keys()
            .all(|(a, b)| a.iter().chain(b).all(|e| e % q == 0))
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let var = |name: &str, i: usize, e: u32| -> String {
            let sub = if self.vars > 1 {
                format!("{}", i + 1)
            } else {
                String::new()
            };
            match e {
                0 => String::new(),
                1 => format!("{name}{sub}"),
                _ => format!("{name}{sub}^{e}"),
            }
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((a, b), c)| {
                let mut s = vec![c.to_string()];
                s.extend(
                    a.iter()
                        .enumerate()
                        .map(|(i, e)| var("y", i, *e))
                        .filter(|x| !x.is_empty()),
                );
                s.extend(
                    b.iter()
                        .enumerate()
                        .map(|(i, e)| var("d", i, *e))
                        .filter(|x| !x.is_empty()),
                );
                s.join(" ")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn fail(report: &mut CheckReport, description: String, lhs: &DiffOp, rhs: &DiffOp) {
    let as_terms = |d: &DiffOp| {
        vec![TermJson {
            monomial: d.to_string(),
            coeff: String::new(),
        }]
    };
    report.fail(Witness {
        description,
        probe: vec![],
        lhs: as_terms(lhs),
        rhs: as_terms(rhs),
    });
}

fn require_sl2(data: &FiniteLieData) -> Result<()> {
    if data.name == "sl2" && data.rank == 1 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "φ is only shipped for sl2, got {}",
            data.name
        )))
    }
}

/// `e ↦ ∂`, `h ↦ -2y∂`, `f ↦ -y²∂`, extended linearly to combinations.
pub fn phi(data: &FiniteLieData, idx: usize, p: Prime) -> Result<DiffOp> {
    require_sl2(data)?;
    Ok(match data.kinds[idx] {
        BasisKind::Raising { .. } => DiffOp::monomial(vec![0], vec![1], Fp::one(p)),
        BasisKind::Cartan { .. } => DiffOp::monomial(vec![1], vec![1], Fp::new(-2, p)),
        BasisKind::Lowering { .. } => DiffOp::monomial(vec![2], vec![1], Fp::new(-1, p)),
    })
}

fn phi_combination(data: &FiniteLieData, comb: &[(usize, i64)], p: Prime) -> Result<DiffOp> {
    let mut out = DiffOp::zero(1, p);
    for &(j, c) in comb {
        out = out.add(&phi(data, j, p)?.scaled(Fp::new(c, p)));
    }
    Ok(out)
}

/// `φ(x)^p - φ(x^{[p]}) = c^p m(y^p) ∂^p` where `φ(x) = c m(y) ∂`, membership
/// in `K[y^p, ∂^p]`, bracket preservation and centrality of `φ(ι(x))`.
pub fn verify_phi_pformula(data: &FiniteLieData, p: Prime) -> Result<CheckReport> {
    require_sl2(data)?;
    let q = p.get();
    let mut report = CheckReport::new("phi-pformula", json!({"algebra": data.name, "p": q}));
    let mut iotas = Vec::new();
    for x in 0..data.dim() {
        let fx = phi(data, x, p)?;
        let lhs = fx.pow(q).sub(&phi_combination(data, &data.p_power[x], p)?);
        let mut closed = DiffOp::zero(1, p);
        for (ys, ds, c) in fx.terms() {
            closed = closed.add(&DiffOp::monomial(
                ys.iter().map(|e| e * q).collect(),
                ds.iter().map(|e| e * q).collect(),
                c.pow(q as u64),
            ));
        }
        report.checked += 2;
        if lhs != closed {
            fail(
                &mut report,
                format!("φ({0})^p - φ({0}^[p])", data.labels[x]),
                &lhs,
                &closed,
            );
        }
        if !lhs.in_p_center() {
            fail(
                &mut report,
                format!("φ(ι({})) outside K[y^p, d^p]", data.labels[x]),
                &lhs,
                &closed,
            );
        }
        iotas.push(lhs);
    }
    for x in 0..data.dim() {
        for y in 0..data.dim() {
            let (fx, fy) = (phi(data, x, p)?, phi(data, y, p)?);
            let lhs = fx.bracket(&fy);
            let rhs = phi_combination(data, data.bracket(x, y), p)?;
            report.checked += 2;
            if lhs != rhs {
                fail(
                    &mut report,
                    format!("[φ({}), φ({})]", data.labels[x], data.labels[y]),
                    &lhs,
                    &rhs,
                );
            }
            let c = iotas[x].bracket(&fy);
            if !c.is_zero() {
                fail(
                    &mut report,
                    format!("[φ(ι({})), φ({})]", data.labels[x], data.labels[y]),
                    &c,
                    &DiffOp::zero(1, p),
                );
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{field_mode, vector_of, ModeIndex};
    use crate::scalars::KappaPoly;

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn sl2() -> Arc<FiniteLieData> {
        Arc::new(FiniteLieData::sl2())
    }

    const A: Generator = Generator::A(0);
    const ASTAR: Generator = Generator::AStar(0);
    const B: Generator = Generator::B(0);

    #[test]
    fn sl2_images_have_the_expected_shape() {
        let q = prime(5);
        let kappa = Fp::new(3, q);
        let (e, h, f) = wff_image(&FiniteLieData::sl2(), &WffTables::sl2(), 0, &kappa).unwrap();
        assert_eq!(e, FieldExpr::gen(A));
        let ast_a = FieldExpr::nop(vec![FieldExpr::gen(ASTAR), FieldExpr::gen(A)]);
        assert_eq!(
            h,
            FieldExpr::sum(vec![
                FieldExpr::scale(Fp::new(-2, q), ast_a),
                FieldExpr::gen(B)
            ])
        );
        let FieldExpr::Sum(terms) = f else {
            panic!("f image is a sum")
        };
        assert_eq!(terms.len(), 3);
        // ∂a* coefficient c + (κ - κ_c) = -2 + 3 + 2 = κ
        assert_eq!(
            terms[1],
            FieldExpr::scale(kappa, FieldExpr::deriv(1, FieldExpr::gen(ASTAR)))
        );
    }

    #[test]
    fn c_equals_critical_level() {
        let t = WffTables::sl2();
        assert_eq!(t.c[0], -FiniteLieData::sl2().dual_coxeter);
    }

    #[test]
    fn tables_round_trip_and_reject_wrong_rank() {
        let t = WffTables::sl2();
        let back = WffTables::from_json(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(t, back);
        let mut bad = t.clone();
        bad.rank = 2;
        let r = wff_image(&FiniteLieData::sl2(), &bad, 0, &Fp::one(prime(3)));
        assert!(matches!(r, Err(Error::MissingTables(1))));
    }

    #[test]
    fn level_reproduced_by_free_fields() {
        let q = prime(7);
        let kappa = Fp::new(4, q);
        let real = WffRealization::new(sl2(), &WffTables::sl2(), kappa, vec![Fp::zero(q)]).unwrap();
        let (f, h, e) = (0, 1, 2);
        let vac = SparseVector::vacuum(q);
        let mut ev = Evaluator::new(&real.module);
        let fv = real.act(&mut ev, f, -1, &vac);
        let lhs = real.act(&mut ev, e, 1, &fv);
        let mut rhs = real.act(&mut ev, h, 0, &vac);
        rhs.add_scaled(&vac, &kappa);
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, vac.scaled(&kappa));
    }

    #[test]
    fn relations_hold_small() {
        for p in [2u32, 3, 5] {
            let q = prime(p);
            for k in [0i64, 1, -2] {
                let real = WffRealization::new(
                    sl2(),
                    &WffTables::sl2(),
                    Fp::new(k, q),
                    vec![Fp::new(1, q)],
                )
                .unwrap();
                let probes = real.probes(2, p as i64 + 1);
                let r = verify_wff_relations(&real, 2, &probes);
                assert!(r.passed, "p={p} κ={k}: {:?}", r.witness);
            }
        }
    }

    #[test]
    fn relations_hold_formally() {
        let q = prime(3);
        let kappa = KappaPoly::kappa(q);
        let real =
            WffRealization::new(sl2(), &WffTables::sl2(), kappa, vec![KappaPoly::zero(q)]).unwrap();
        let probes = real.probes(2, 3);
        let r = verify_wff_relations(&real, 2, &probes);
        assert!(r.passed, "{:?}", r.witness);
    }

    #[test]
    fn wrong_sign_in_h_is_detected() {
        let q = prime(5);
        let kappa = Fp::new(1, q);
        let mut real =
            WffRealization::new(sl2(), &WffTables::sl2(), kappa, vec![Fp::zero(q)]).unwrap();
        let nop = FieldExpr::nop(vec![FieldExpr::gen(ASTAR), FieldExpr::gen(A)]);
        real.images.insert(
            1,
            FieldExpr::sum(vec![
                FieldExpr::scale(Fp::new(2, q), nop),
                FieldExpr::gen(B),
            ]),
        );
        let probes = real.probes(1, 2);
        assert!(!verify_wff_relations(&real, 1, &probes).passed);
    }

    #[test]
    fn highest_weight_eigenvalue() {
        let q = prime(3);
        let real = WffRealization::new(
            sl2(),
            &WffTables::sl2(),
            Fp::new(1, q),
            vec![Fp::new(-1, q)],
        )
        .unwrap();
        let h = real.image(1).unwrap();
        let r = field_mode(
            h,
            ModeIndex::Classical(0),
            &real.module,
            &SparseVector::vacuum(q),
        )
        .unwrap();
        assert_eq!(r, SparseVector::vacuum(q).scaled(&Fp::new(-1, q)));
        let e = real.image(2).unwrap();
        let r = field_mode(
            e,
            ModeIndex::Classical(0),
            &real.module,
            &vector_of(&[(ASTAR, 0, 1)], q),
        )
        .unwrap();
        assert_eq!(r, SparseVector::vacuum(q));
    }

    #[test]
    fn diffop_examples() {
        let q = prime(3);
        let data = FiniteLieData::sl2();
        let (f, h, e) = (
            phi(&data, 0, q).unwrap(),
            phi(&data, 1, q).unwrap(),
            phi(&data, 2, q).unwrap(),
        );
        assert_eq!(e.bracket(&f), h);
        assert_eq!(h.bracket(&e), e.scaled(Fp::new(2, q)));
        assert!(e.pow(3).in_p_center());
        // (y∂)^3 - y∂ = y^3 ∂^3 in characteristic 3
        let yd = DiffOp::monomial(vec![1], vec![1], Fp::one(q));
        assert_eq!(
            yd.pow(3).sub(&yd),
            DiffOp::monomial(vec![3], vec![3], Fp::one(q))
        );
        assert_eq!(f.pow(3), DiffOp::monomial(vec![6], vec![3], Fp::new(-1, q)));
        // ∂ y = y ∂ + 1
        let dy = DiffOp::d(1, 0, q).mul(&DiffOp::y(1, 0, q));
        assert_eq!(
            dy,
            DiffOp::monomial(vec![1], vec![1], Fp::one(q)).add(&DiffOp::constant(1, Fp::one(q)))
        );
    }

    #[test]
    fn pformula_passes() {
        for p in [2u32, 3, 5, 7] {
            let r = verify_phi_pformula(&FiniteLieData::sl2(), prime(p)).unwrap();
            assert!(r.passed, "p={p}: {:?}", r.witness);
        }
    }

    #[test]
    fn phi_rejects_other_algebras() {
        let mut data = FiniteLieData::sl2();
        data.name = "other".into();
        assert!(matches!(
            phi(&data, 0, prime(3)),
            Err(Error::Unsupported(_))
        ));
    }
}
