//! The p-center: `ι(x_n) = x_n^p - (x^{[p]})_{np}`, its images under the
//! free-field realization, p-characters and restricted quotients.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{apply_power, reconstruct_y, record, Evaluator, FieldExpr, ModeIndex};
use crate::fock::{
    Generator, GeneratorMode, ModuleKind, ModuleSpec, Monomial, SparseVector, Truncation,
};
use crate::report::CheckReport;
use crate::root_data::FiniteLieData;
use crate::scalars::{fp_binom, Fp, Prime, Scalar};
use crate::wff::{WffRealization, WffTables};

/// `(x_{-r})^p |0⟩ - (x^{[p]})_{-rp} |0⟩` in the vacuum module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IotaState<S> {
    pub x: usize,
    pub r: i64,
    pub vector: SparseVector<S>,
}

pub fn iota_state<S: Scalar>(data: &FiniteLieData, x: usize, r: i64, p: Prime) -> IotaState<S> {
    let q = p.get() as i64;
    let mut v = SparseVector::basis(
        Monomial::from_factors([(GeneratorMode::new(Generator::Lie(x), -r), q as u32)]),
        p,
    );
    for &(j, c) in &data.p_power[x] {
        let m = Monomial::from_factors([(GeneratorMode::new(Generator::Lie(j), -r * q), 1)]);
        v.add_term(m, S::from_i64(-c, p));
    }
    IotaState { x, r, vector: v }
}

/// `(x_n^p - (x^{[p]})_{np}) v` on a module carrying loop generators.
pub fn iota_operator<S: Scalar>(
    module: &ModuleSpec<S>,
    x: usize,
    n: i64,
    v: &SparseVector<S>,
) -> SparseVector<S> {
    let p = module.prime;
    let q = p.get() as i64;
    let mut out = apply_power(
        module,
        GeneratorMode::new(Generator::Lie(x), n),
        q as u32,
        v,
    );
    for &(j, c) in &module.data.p_power[x] {
        let w = module.apply_unchecked(GeneratorMode::new(Generator::Lie(j), n * q), v);
        out.add_scaled(&w, &S::from_i64(-c, p));
    }
    out
}

fn vacuum_probes<S: Scalar>(module: &ModuleSpec<S>, depth: u32) -> Vec<SparseVector<S>> {
    module
        .basis_enumerate_with(Truncation::depth(depth))
        .into_iter()
        .map(|m| SparseVector::basis(m, module.prime))
        .collect()
}

/// Eq 2.6: the modes of `Y(ι(x_{-r})|0⟩, z)` are `binom(-n-1, r-1) ι(x_n)` at
/// `z^{-np-rp}` and vanish elsewhere; checked for `|n| ≤ 2`.
pub fn verify_iota_commutes_y<S: Scalar>(
    data: &FiniteLieData,
    level: S,
    depth: u32,
    rs: &[i64],
) -> CheckReport {
    let p = level.prime();
    let q = p.get() as i64;
    let module = ModuleSpec::vacuum(Arc::new(data.clone()), level.clone());
    let probes = vacuum_probes(&module, depth);
    let mut report = CheckReport::new(
        "iota-commutes-y",
        json!({"algebra": data.name, "p": q, "level": level.to_string(), "depth": depth, "r": rs, "mode_bound": 2}),
    );
    let jobs: Vec<(usize, i64)> = (0..data.dim())
        .flat_map(|x| rs.iter().map(move |&r| (x, r)))
        .collect();
    let partial: Vec<CheckReport> = jobs
        .par_iter()
        .map(|&(x, r)| {
            let mut rep = CheckReport::new("iota-commutes-y", json!({}));
            let state = iota_state::<S>(data, x, r, p);
            for big_n in (-2 + r) * q - 1..=(2 + r) * q - 1 {
                let hit = (big_n + 1 - r * q).rem_euclid(q) == 0;
                let n = (big_n + 1 - r * q).div_euclid(q);
                let c = S::from_fp(fp_binom(-n - 1, (r - 1) as u64, p));
                for v in &probes {
                    let lhs = reconstruct_y(&state.vector, ModeIndex::Generic(big_n), &module, v)
                        .expect("legal state");
                    let rhs = if hit {
                        iota_operator(&module, x, n, v).scaled(&c)
                    } else {
                        SparseVector::zero(p)
                    };
                    let label = &data.labels[x];
                    record(
                        &mut rep,
                        data,
                        || format!("Y(iota({label}_-{r}))_({big_n})"),
                        v,
                        &lhs,
                        &rhs,
                    );
                }
            }
            rep
        })
        .collect();
    partial.iter().for_each(|r| report.absorb(r));
    report
}

/// `[x_n^p - (x^{[p]})_{np}, y_m] = 0` for all basis `x, y`, `|n|, |m| ≤ 2`.
pub fn verify_centrality<S: Scalar>(data: &FiniteLieData, level: S, depth: u32) -> CheckReport {
    let p = level.prime();
    let module = ModuleSpec::vacuum(Arc::new(data.clone()), level.clone());
    let probes = vacuum_probes(&module, depth);
    let mut report = CheckReport::new(
        "centrality",
        json!({"algebra": data.name, "p": p.get(), "level": level.to_string(), "depth": depth, "mode_bound": 2}),
    );
    let jobs: Vec<(usize, i64)> = (0..data.dim())
        .flat_map(|x| (-2..=2).map(move |n| (x, n)))
        .collect();
    let partial: Vec<CheckReport> = jobs
        .par_iter()
        .map(|&(x, n)| {
            let mut rep = CheckReport::new("centrality", json!({}));
            for v in &probes {
                let zv = iota_operator(&module, x, n, v);
                for y in 0..data.dim() {
                    for m in -2..=2 {
                        let g = GeneratorMode::new(Generator::Lie(y), m);
                        let lhs = iota_operator(&module, x, n, &module.apply_unchecked(g, v));
                        let rhs = module.apply_unchecked(g, &zv);
                        let (lx, ly) = (&data.labels[x], &data.labels[y]);
                        record(
                            &mut rep,
                            data,
                            || format!("[iota({lx}_{n}), {ly}_{m}]"),
                            v,
                            &lhs,
                            &rhs,
                        );
                    }
                }
            }
            rep
        })
        .collect();
    partial.iter().for_each(|r| report.absorb(r));
    report
}

fn power<S: Scalar>(g: Generator) -> FieldExpr<S> {
    FieldExpr::pth_power(FieldExpr::gen(g))
}

/// `b_i^p - ∂^{(p-1)} b_i`.
pub fn r_of_b<S: Scalar>(i: usize, p: Prime) -> FieldExpr<S> {
    FieldExpr::sum(vec![
        power(Generator::B(i)),
        FieldExpr::scale(
            -S::one(p),
            FieldExpr::deriv(p.get() - 1, FieldExpr::gen(Generator::B(i))),
        ),
    ])
}

fn poly_power_times_a_power<S: Scalar>(
    terms: &[crate::wff::PolyTerm],
    beta: usize,
    p: Prime,
) -> Vec<FieldExpr<S>> {
    terms
        .iter()
        .filter(|t| t.coeff.rem_euclid(p.get() as i64) != 0)
        .map(|t| {
            let mut factors = Vec::new();
            for (gamma, &e) in t.exponents.iter().enumerate() {
                for _ in 0..e {
                    factors.push(power(Generator::AStar(gamma)));
                }
            }
            factors.push(power(Generator::A(beta)));
            // Coefficients lie in F_p, so c^p = c.
            FieldExpr::scale(S::from_i64(t.coeff, p), FieldExpr::nop(factors))
        })
        .collect()
}

/// The closed forms for `ι(e_i)^w`, `ι(h_i)^w`, `ι(f_i)^w`: p-th powers of
/// the free fields with the polynomial tables raised coefficientwise, the
/// correction `b_i^p - ∂^{(p-1)} b_i` and the term `(κ^p - κ)⟨e_i,f_i⟩ (∂a*)^p`.
pub fn iota_closed_forms<S: Scalar>(
    data: &FiniteLieData,
    tables: &WffTables,
    i: usize,
    kappa: &S,
) -> Result<(FieldExpr<S>, FieldExpr<S>, FieldExpr<S>)> {
    let p = kappa.prime();
    let roots = data.positive_roots.len();
    if tables.rank != data.rank {
        return Err(Error::MissingTables(data.rank));
    }

    let mut e_terms = vec![power(Generator::A(i))];
    for beta in (0..roots).filter(|&b| b != i) {
        e_terms.extend(poly_power_times_a_power(&tables.p[i][beta], beta, p));
    }

    let mut h_terms = Vec::new();
    for beta in 0..roots {
        let c = data.root_on_coroot(beta, i);
        if c.rem_euclid(p.get() as i64) != 0 {
            let nop = FieldExpr::nop(vec![
                power(Generator::AStar(beta)),
                power(Generator::A(beta)),
            ]);
            h_terms.push(FieldExpr::scale(S::from_i64(-c, p), nop));
        }
    }
    h_terms.push(r_of_b(i, p));

    let mut f_terms = Vec::new();
    for beta in 0..roots {
        f_terms.extend(poly_power_times_a_power(&tables.q[i][beta], beta, p));
    }
    let ef = data.form(
        data.raising(i).expect("raising"),
        data.lowering(i).expect("lowering"),
    );
    let eta = (kappa.pow(p.get() as u64) - kappa.clone()) * S::from_i64(ef, p);
    if !eta.is_zero() {
        f_terms.push(FieldExpr::scale(
            eta,
            FieldExpr::pth_power(FieldExpr::deriv(1, FieldExpr::gen(Generator::AStar(i)))),
        ));
    }
    f_terms.push(FieldExpr::nop(vec![
        power(Generator::AStar(i)),
        r_of_b(i, p),
    ]));
    Ok((
        FieldExpr::sum(e_terms),
        FieldExpr::sum(h_terms),
        FieldExpr::sum(f_terms),
    ))
}

/// `((x^w_n)^p - (x^{[p]})^w_{np}) v`, the image of `ι(x_n)` as an honest operator power.
pub fn iota_image<'a, S: Scalar>(
    real: &'a WffRealization<S>,
    ev: &mut Evaluator<'a, S>,
    x: usize,
    n: i64,
    v: &SparseVector<S>,
) -> SparseVector<S> {
    let p = real.prime();
    let q = p.get() as i64;
    let mut out = v.clone();
    for _ in 0..q {
        if out.is_zero() {
            break;
        }
        out = real.act(ev, x, n, &out);
    }
    for &(j, c) in &real.data.p_power[x] {
        let w = real.act(ev, j, n * q, v);
        out.add_scaled(&w, &S::from_i64(-c, p));
    }
    out
}

/// Configuration of the p-center image check.
#[derive(Clone, Copy, Debug)]
pub struct ImageCheck {
    pub depth: u32,
    pub alpha_bound: i64,
    pub mode_bound: i64,
    /// Modes `m` of `a_m`, `a*_m`, `b_m` in the commutant sub-checks.
    pub commutant_bound: i64,
    /// Probes for the commutant sub-checks have depth at most this.
    pub commutant_depth: u32,
}

impl ImageCheck {
    pub fn new(depth: u32, p: Prime) -> Self {
        ImageCheck {
            depth,
            alpha_bound: p.get() as i64 + 1,
            mode_bound: 2,
            commutant_bound: 2,
            commutant_depth: depth,
        }
    }
}

/// Images of the p-center generators under the free field realization on
/// `M ⊗ π^{κ-κ_c}(λ)`, checked against their closed forms.
pub fn verify_wff_pcenter_images<S: Scalar>(
    real: &WffRealization<S>,
    tables: &WffTables,
    cfg: ImageCheck,
) -> Result<CheckReport> {
    let data = &real.data;
    let p = real.prime();
    let q = p.get() as i64;
    let mut report = CheckReport::new(
        "pcenter-images",
        json!({
            "algebra": data.name,
            "p": q,
            "kappa": real.kappa.to_string(),
            "depth": cfg.depth,
            "alpha_bound": cfg.alpha_bound,
            "mode_bound": cfg.mode_bound,
            "commutant_bound": cfg.commutant_bound,
            "commutant_depth": cfg.commutant_depth,
        }),
    );
    let mut closed: BTreeMap<usize, FieldExpr<S>> = BTreeMap::new();
    for i in 0..data.rank {
        let (e, h, f) = iota_closed_forms(data, tables, i, &real.kappa)?;
        closed.insert(data.raising(i).expect("raising"), e);
        closed.insert(data.coroot(i).expect("coroot"), h);
        closed.insert(data.lowering(i).expect("lowering"), f);
    }
    let probes = real.probes(cfg.depth, cfg.alpha_bound);
    let basis: Vec<usize> = closed.keys().copied().collect();
    let modes: Vec<i64> = (-cfg.mode_bound..=cfg.mode_bound).collect();

    // Closed forms against operator powers.
    let chunk = probes.len().div_ceil(rayon::current_num_threads()).max(1);
    let partial: Vec<CheckReport> = probes
        .par_chunks(chunk)
        .map(|chunk| {
            let mut rep = CheckReport::new("pcenter-images/closed-forms", json!({}));
            let mut ev = Evaluator::new(&real.module);
            for v in chunk {
                for &x in &basis {
                    for &n in &modes {
                        let lhs = iota_image(real, &mut ev, x, n, v);
                        let rhs = ev.mode(&closed[&x], n * q + q - 1, v);
                        let label = &data.labels[x];
                        record(
                            &mut rep,
                            data,
                            || format!("iota({label}_{n})^w"),
                            v,
                            &lhs,
                            &rhs,
                        );
                    }
                }
            }
            rep
        })
        .collect();
    let mut sub = CheckReport::new("pcenter-images/closed-forms", json!({}));
    partial.iter().for_each(|r| sub.absorb(r));
    report.absorb(&sub);

    // The images commute with a, a* and b.
    let small: Vec<&SparseVector<S>> = probes
        .iter()
        .filter(|v| v.max_depth().unwrap_or(0) <= cfg.commutant_depth as i64)
        .collect();
    let roots = data.positive_roots.len();
    let mut free_gens = Vec::new();
    for m in -cfg.commutant_bound..=cfg.commutant_bound {
        for beta in 0..roots {
            free_gens.push(GeneratorMode::new(Generator::AStar(beta), m));
            free_gens.push(GeneratorMode::new(Generator::A(beta), m));
        }
        for i in 0..data.rank {
            free_gens.push(GeneratorMode::new(Generator::B(i), m));
        }
    }
    let chunk = small.len().div_ceil(rayon::current_num_threads()).max(1);
    let partial: Vec<(CheckReport, CheckReport, CheckReport)> = small
        .par_chunks(chunk)
        .map(|chunk| {
            let mut reps = (
                CheckReport::new("pcenter-images/commutes-with-a*", json!({})),
                CheckReport::new("pcenter-images/commutes-with-a", json!({})),
                CheckReport::new("pcenter-images/commutes-with-b", json!({})),
            );
            let mut ev = Evaluator::new(&real.module);
            for v in chunk {
                for &x in &basis {
                    for &n in &modes {
                        let zv = iota_image(real, &mut ev, x, n, v);
                        for &g in &free_gens {
                            let gv = real.module.apply_unchecked(g, v);
                            let lhs = iota_image(real, &mut ev, x, n, &gv);
                            let rhs = real.module.apply_unchecked(g, &zv);
                            let rep = match g.gen {
                                Generator::AStar(_) => &mut reps.0,
                                Generator::A(_) => &mut reps.1,
                                _ => &mut reps.2,
                            };
                            let (label, gl) = (&data.labels[x], g.label(data));
                            record(
                                rep,
                                data,
                                || format!("[iota({label}_{n})^w, {gl}]"),
                                v,
                                &lhs,
                                &rhs,
                            );
                        }
                    }
                }
            }
            reps
        })
        .collect();
    let mut subs = (
        CheckReport::new("pcenter-images/commutes-with-a*", json!({})),
        CheckReport::new("pcenter-images/commutes-with-a", json!({})),
        CheckReport::new("pcenter-images/commutes-with-b", json!({})),
    );
    for (a, b, c) in &partial {
        subs.0.absorb(a);
        subs.1.absorb(b);
        subs.2.absorb(c);
    }
    report.absorb(&subs.0);
    report.absorb(&subs.1);
    report.absorb(&subs.2);

    // η and R(b) isolated from the operator side.
    let corrections: Vec<FieldExpr<S>> = (0..data.rank).map(|i| r_of_b(i, p)).collect();
    let mut ev = Evaluator::new(&real.module);
    let mut isolated = CheckReport::new("pcenter-images/isolated-coefficients", json!({}));
    let mut etas = Vec::new();
    for i in 0..data.rank {
        let f = data.lowering(i).expect("lowering");
        let h = data.coroot(i).expect("coroot");
        let vac = SparseVector::vacuum(p);
        let lhs = iota_image(real, &mut ev, f, -1, &vac);
        let pure =
            Monomial::from_factors([(GeneratorMode::new(Generator::AStar(i), -1), q as u32)]);
        let eta = lhs.coeff(&pure);
        let ef = data.form(data.raising(i).expect("raising"), f);
        let expected = (real.kappa.pow(q as u64) - real.kappa.clone()) * S::from_i64(ef, p);
        isolated.checked += 1;
        if eta != expected {
            isolated.fail(crate::report::Witness {
                description: format!("eta for simple index {i}"),
                probe: vac.describe(data),
                lhs: vec![crate::report::TermJson {
                    monomial: pure.display(data),
                    coeff: eta.to_string(),
                }],
                rhs: vec![crate::report::TermJson {
                    monomial: pure.display(data),
                    coeff: expected.to_string(),
                }],
            });
        }
        etas.push(
            json!({"simple_index": i, "eta": eta.to_string(), "expected": expected.to_string()}),
        );

        let r = &corrections[i];
        let astar0_p =
            Monomial::from_factors([(GeneratorMode::new(Generator::AStar(i), 0), q as u32)]);
        let is_free = |g: GeneratorMode| matches!(g.gen, Generator::A(_) | Generator::AStar(_));
        for v in probes
            .iter()
            .filter(|v| v.iter().all(|(m, _)| m.factors().all(|(g, _)| !is_free(g))))
        {
            for &n in &modes {
                let rhs = ev.mode(r, n * q + q - 1, v);
                let mut from_h = SparseVector::zero(p);
                let mut from_f = SparseVector::zero(p);
                for (m, c) in iota_image(real, &mut ev, h, n, v).iter() {
                    let (free, heis) = m.partition(is_free);
                    if free.is_one() {
                        from_h.add_term(heis, c.clone());
                    }
                }
                for (m, c) in iota_image(real, &mut ev, f, n, v).iter() {
                    let (free, heis) = m.partition(is_free);
                    if free == astar0_p {
                        from_f.add_term(heis, c.clone());
                    }
                }
                record(
                    &mut isolated,
                    data,
                    || format!("R(b) from iota(h_{n})"),
                    v,
                    &from_h,
                    &rhs,
                );
                record(
                    &mut isolated,
                    data,
                    || format!("R(b) from iota(f_{n})"),
                    v,
                    &from_f,
                    &rhs,
                );
            }
        }
    }
    report.absorb(&isolated);
    report.details = json!({
        "eta": etas,
        "closed_forms": closed.iter().map(|(x, f)| json!({"x": data.labels[*x], "field": f.render(data)})).collect::<Vec<_>>(),
    });
    report.note("the eta term is verified as (k^p - k) (d a*(z))^p");
    Ok(report)
}

/// Values of a p-character on the p-center generators attached to creation
/// operators: `g^p - g^{[p]}` acts by `values[g]` (zero when absent).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PCharacter<S> {
    pub values: BTreeMap<GeneratorMode, S>,
}

impl<S: Scalar> PCharacter<S> {
    pub fn zero() -> Self {
        PCharacter {
            values: BTreeMap::new(),
        }
    }

    pub fn value(&self, g: GeneratorMode, p: Prime) -> S {
        self.values.get(&g).cloned().unwrap_or_else(|| S::zero(p))
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Scalar::is_zero)
    }
}

/// A module cut down by a p-character: powers `g^p` of creation operators
/// are rewritten as `χ(g) + g^{[p]}`, leaving a basis of exponent-capped monomials.
#[derive(Clone, Debug)]
pub struct RestrictedQuotient<S: Scalar> {
    pub module: ModuleSpec<S>,
    pub chi: PCharacter<S>,
}

impl<S: Scalar> RestrictedQuotient<S> {
    pub fn new(module: ModuleSpec<S>, chi: PCharacter<S>) -> Result<Self> {
        for g in chi.values.keys() {
            module.check_legal(g.gen)?;
            if !module.is_creation(*g) {
                return Err(Error::IncompatibleCharacter(format!(
                    "p-character must vanish on annihilation modes, got {g:?}"
                )));
            }
        }
        Ok(RestrictedQuotient { module, chi })
    }

    pub fn prime(&self) -> Prime {
        self.module.prime
    }

    /// `g^{[p]} v` in the module.
    fn apply_restricted_power(&self, g: GeneratorMode, v: &SparseVector<S>) -> SparseVector<S> {
        let p = self.prime();
        let q = p.get() as i64;
        match g.gen {
            Generator::Lie(x) => {
                let mut out = SparseVector::zero(p);
                for &(j, c) in &self.module.data.p_power[x] {
                    let w = self
                        .module
                        .apply_unchecked(GeneratorMode::new(Generator::Lie(j), g.mode * q), v);
                    out.add_scaled(&w, &S::from_i64(c, p));
                }
                out
            }
            Generator::B(i) => self
                .module
                .apply_unchecked(GeneratorMode::new(Generator::B(i), g.mode * q), v),
            Generator::A(_) | Generator::AStar(_) => SparseVector::zero(p),
        }
    }

    /// Normal form in the quotient.
    pub fn reduce(&self, v: &SparseVector<S>) -> SparseVector<S> {
        let mut out = SparseVector::zero(self.prime());
        for (m, c) in v.iter() {
            out.add_scaled(&self.reduce_monomial(m), c);
        }
        out
    }

    fn reduce_monomial(&self, m: &Monomial) -> SparseVector<S> {
        let p = self.prime();
        let q = p.get();
        let factors: Vec<(GeneratorMode, u32)> = m.factors().collect();
        let Some(pos) = factors.iter().position(|&(_, e)| e >= q) else {
            return SparseVector::basis(m.clone(), p);
        };
        let (g, e) = factors[pos];
        // g^e = g^{e-p} (g^p - g^{[p]}) + g^{e-p} g^{[p]}, with the central part acting by χ.
        let lowered = m.with_exponent(g, e - q);
        let mut out = self.reduce_monomial(&lowered).scaled(&self.chi.value(g, p));
        let suffix = Monomial::from_factors(factors[pos + 1..].iter().copied());
        let mut w = self.apply_restricted_power(g, &SparseVector::basis(suffix, p));
        w = apply_power(&self.module, g, e - q, &w);
        for &(h, k) in factors[..pos].iter().rev() {
            w = apply_power(&self.module, h, k, &w);
        }
        out.add_assign(&self.reduce(&w));
        out
    }

    /// A single generator mode acting on the quotient.
    pub fn act(&self, g: GeneratorMode, v: &SparseVector<S>) -> Result<SparseVector<S>> {
        Ok(self.reduce(&self.module.apply_mode(g, v)?))
    }

    pub fn basis(&self, depth: u32) -> Vec<Monomial> {
        self.module.basis_enumerate(depth, Some(self.prime().get()))
    }

    /// Checks that each p-center generator `g^p - g^{[p]}` with `g` among the
    /// given modes acts on every basis vector by its character value.
    pub fn verify_scalar_action(&self, depth: u32, modes: &[GeneratorMode]) -> CheckReport {
        let p = self.prime();
        let q = p.get();
        let data = &self.module.data;
        let mut report = CheckReport::new(
            "restricted-quotient-scalars",
            json!({"module": self.module.kind_name(), "p": q, "depth": depth, "generators": modes.len()}),
        );
        for m in self.basis(depth) {
            let v = SparseVector::basis(m, p);
            for &g in modes {
                let mut w = v.clone();
                for _ in 0..q {
                    w = self.reduce(&self.module.apply_unchecked(g, &w));
                }
                let lhs = w.sub(&self.reduce(&self.apply_restricted_power(g, &v)));
                let chi = if self.module.is_creation(g) {
                    self.chi.value(g, p)
                } else {
                    S::zero(p)
                };
                let rhs = v.scaled(&chi);
                let gl = g.label(data);
                record(
                    &mut report,
                    data,
                    || format!("({gl})^p - ({gl})^[p]"),
                    &v,
                    &lhs,
                    &rhs,
                );
            }
        }
        report
    }
}

/// Graded dimensions of `z_0(V^κ)`, the polynomial algebra on the states
/// `ι(x_{-r})|0⟩` of depth `rp`, for depths `0..=depth`.
pub fn z0_graded_dims(data: &FiniteLieData, p: Prime, depth: u32) -> Vec<u64> {
    let q = p.get() as usize;
    let n = depth as usize;
    let mut dims = vec![0u64; n + 1];
    dims[0] = 1;
    // Each generator of depth rp contributes a factor 1/(1 - t^{rp}), one per basis element.
    for r in 1.. {
        let d = r * q;
        if d > n {
            break;
        }
        for _ in 0..data.dim() {
            for k in d..=n {
                dims[k] += dims[k - d];
            }
        }
    }
    dims
}

/// The vectors `Π ι(x_{-r})|0⟩` spanning `z_0(V^κ)` up to `depth`, grouped by depth.
pub fn z0_vectors<S: Scalar>(
    module: &ModuleSpec<S>,
    depth: u32,
) -> Result<BTreeMap<u32, Vec<SparseVector<S>>>> {
    if !matches!(module.kind, ModuleKind::VacuumV { .. }) {
        return Err(Error::InvalidConfig(
            "z_0 vectors are built in the vacuum module".into(),
        ));
    }
    let p = module.prime;
    let q = p.get() as i64;
    let data = &module.data;
    let mut gens = Vec::new();
    for r in 1.. {
        if r * q > depth as i64 {
            break;
        }
        for x in 0..data.dim() {
            gens.push((x, r));
        }
    }
    let mut out: BTreeMap<u32, Vec<SparseVector<S>>> = BTreeMap::new();
    fn rec<S: Scalar>(
        module: &ModuleSpec<S>,
        gens: &[(usize, i64)],
        start: usize,
        remaining: i64,
        v: SparseVector<S>,
        used: i64,
        out: &mut BTreeMap<u32, Vec<SparseVector<S>>>,
    ) {
        out.entry(used as u32).or_default().push(v.clone());
        let q = module.prime.get() as i64;
        for (k, &(x, r)) in gens.iter().enumerate().skip(start) {
            if r * q > remaining {
                continue;
            }
            let w = iota_operator(module, x, -r, &v);
            rec(module, gens, k, remaining - r * q, w, used + r * q, out);
        }
    }
    rec(
        module,
        &gens,
        0,
        depth as i64,
        SparseVector::vacuum(p),
        0,
        &mut out,
    );
    Ok(out)
}

/// Convenience for numeric suites: the restricted quotient of the Weyl module.
pub fn restricted_weyl(
    data: Arc<FiniteLieData>,
    p: Prime,
    chi: PCharacter<Fp>,
) -> Result<RestrictedQuotient<Fp>> {
    RestrictedQuotient::new(ModuleSpec::weyl(data, p), chi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::KappaPoly;

    fn prime(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn sl2() -> Arc<FiniteLieData> {
        Arc::new(FiniteLieData::sl2())
    }

    const F: usize = 0;
    const H: usize = 1;
    const E: usize = 2;

    #[test]
    fn iota_state_examples() {
        let data = FiniteLieData::sl2();
        let q = prime(3);
        let s = iota_state::<Fp>(&data, H, 1, q);
        let mut expect = SparseVector::basis(
            Monomial::from_factors([(GeneratorMode::new(Generator::Lie(H), -1), 3)]),
            q,
        );
        expect.add_term(
            Monomial::from_factors([(GeneratorMode::new(Generator::Lie(H), -3), 1)]),
            Fp::new(-1, q),
        );
        assert_eq!(s.vector, expect);
        let s = iota_state::<Fp>(&data, E, 1, q);
        assert_eq!(s.vector.len(), 1);
        assert_eq!(s.vector.max_depth(), Some(3));
        assert_eq!(iota_state::<Fp>(&data, F, 2, q).vector.max_depth(), Some(6));
    }

    #[test]
    fn iota_and_centrality_small() {
        let data = FiniteLieData::sl2();
        for p in [2u32, 3] {
            let r = verify_iota_commutes_y(&data, Fp::new(1, prime(p)), 2, &[1, 2]);
            assert!(r.passed, "{:?}", r.witness);
            let r = verify_centrality(&data, Fp::new(2, prime(p)), 2);
            assert!(r.passed, "{:?}", r.witness);
        }
    }

    #[test]
    fn non_central_element_is_detected() {
        // h_0^p alone does not commute with e_{-1}; h_0^p - h_0 does.
        let q = prime(3);
        let module = ModuleSpec::vacuum(sl2(), Fp::new(1, q));
        let e = GeneratorMode::new(Generator::Lie(E), -1);
        let h = GeneratorMode::new(Generator::Lie(H), 0);
        let vac = SparseVector::vacuum(q);
        let ev = module.apply_unchecked(e, &vac);
        assert_ne!(
            apply_power(&module, h, 3, &ev),
            module.apply_unchecked(e, &apply_power(&module, h, 3, &vac))
        );
        assert_eq!(
            iota_operator(&module, H, 0, &ev),
            module.apply_unchecked(e, &iota_operator(&module, H, 0, &vac))
        );
    }

    #[test]
    fn pcenter_images_small() {
        for p in [2u32, 3] {
            let q = prime(p);
            let tables = WffTables::sl2();
            let real =
                WffRealization::new(sl2(), &tables, Fp::new(1, q), vec![Fp::new(2, q)]).unwrap();
            let mut cfg = ImageCheck::new(2, q);
            cfg.mode_bound = 1;
            cfg.commutant_bound = 1;
            let r = verify_wff_pcenter_images(&real, &tables, cfg).unwrap();
            assert!(r.passed, "p={p}: {:?}", r.witness);
        }
    }

    #[test]
    fn pcenter_images_formal_level() {
        let q = prime(2);
        let tables = WffTables::sl2();
        let kappa = KappaPoly::kappa(q);
        let real = WffRealization::new(sl2(), &tables, kappa, vec![KappaPoly::zero(q)]).unwrap();
        let mut cfg = ImageCheck::new(2, q);
        cfg.mode_bound = 1;
        cfg.commutant_bound = 1;
        let r = verify_wff_pcenter_images(&real, &tables, cfg).unwrap();
        assert!(r.passed, "{:?}", r.witness);
        assert_eq!(r.details["eta"][0]["eta"], "k^2 + k");
    }

    #[test]
    fn wrong_eta_is_detected() {
        // Dropping the p-th power on ∂a* (the printed example) breaks the identity formally.
        let q = prime(2);
        let tables = WffTables::sl2();
        let data = FiniteLieData::sl2();
        let kappa = KappaPoly::kappa(q);
        let real =
            WffRealization::new(sl2(), &tables, kappa.clone(), vec![KappaPoly::zero(q)]).unwrap();
        let (_, _, f) = iota_closed_forms(&data, &tables, 0, &kappa).unwrap();
        let FieldExpr::Sum(mut terms) = f else {
            panic!()
        };
        let eta = kappa.pow(2) - kappa.clone();
        terms[1] = FieldExpr::scale(
            eta,
            FieldExpr::deriv(1, FieldExpr::gen(Generator::AStar(0))),
        );
        let wrong = FieldExpr::sum(terms);
        let mut ev = Evaluator::new(&real.module);
        let vac = SparseVector::vacuum(q);
        let lhs = iota_image(&real, &mut ev, F, -1, &vac);
        let rhs = ev.mode(&wrong, -2 + 2 - 1, &vac);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn restricted_quotient_examples() {
        let q = prime(2);
        let m = restricted_weyl(sl2(), q, PCharacter::zero()).unwrap();
        assert_eq!(m.basis(0).len(), 2);
        let pi = RestrictedQuotient::new(
            ModuleSpec::heisenberg(sl2(), Fp::one(q), vec![Fp::zero(q)]).unwrap(),
            PCharacter::zero(),
        )
        .unwrap();
        let basis = pi.basis(2);
        assert_eq!(basis.len(), 3);
        // b_{-1}^2 = b_{-2} in the quotient
        let b1 = GeneratorMode::new(Generator::B(0), -1);
        let sq = pi
            .act(
                b1,
                &SparseVector::basis(Monomial::from_factors([(b1, 1)]), q),
            )
            .unwrap();
        assert_eq!(
            sq,
            SparseVector::basis(
                Monomial::from_factors([(GeneratorMode::new(Generator::B(0), -2), 1)]),
                q
            )
        );
    }

    #[test]
    fn quotient_scalars_hold() {
        for p in [2u32, 3] {
            let q = prime(p);
            let v = RestrictedQuotient::new(
                ModuleSpec::vacuum(sl2(), Fp::new(1, q)),
                PCharacter::zero(),
            )
            .unwrap();
            let modes: Vec<GeneratorMode> = (0..3)
                .flat_map(|x| (-2..=1).map(move |n| GeneratorMode::new(Generator::Lie(x), n)))
                .collect();
            let r = v.verify_scalar_action(2, &modes);
            assert!(r.passed, "{:?}", r.witness);

            let mut chi = PCharacter::zero();
            chi.values
                .insert(GeneratorMode::new(Generator::AStar(0), 0), Fp::new(1, q));
            chi.values
                .insert(GeneratorMode::new(Generator::A(0), -1), Fp::new(1, q));
            let m = restricted_weyl(sl2(), q, chi).unwrap();
            let modes: Vec<GeneratorMode> = (-2..=2)
                .flat_map(|n| {
                    [
                        GeneratorMode::new(Generator::A(0), n),
                        GeneratorMode::new(Generator::AStar(0), n),
                    ]
                })
                .collect();
            let r = m.verify_scalar_action(2, &modes);
            assert!(r.passed, "{:?}", r.witness);
        }
    }

    #[test]
    fn character_on_annihilators_is_rejected() {
        let q = prime(3);
        let mut chi = PCharacter::zero();
        chi.values
            .insert(GeneratorMode::new(Generator::AStar(0), 1), Fp::one(q));
        assert!(matches!(
            restricted_weyl(sl2(), q, chi),
            Err(Error::IncompatibleCharacter(_))
        ));
    }

    #[test]
    fn z0_dims_match_vectors() {
        let data = FiniteLieData::sl2();
        for p in [2u32, 3] {
            let q = prime(p);
            let dims = z0_graded_dims(&data, q, 6);
            let module = ModuleSpec::vacuum(sl2(), Fp::new(1, q));
            let vecs = z0_vectors(&module, 6).unwrap();
            for (d, dim) in dims.iter().enumerate() {
                let n = vecs.get(&(d as u32)).map_or(0, |v| v.len()) as u64;
                assert_eq!(n, *dim, "p={p} depth {d}");
            }
        }
        assert_eq!(z0_graded_dims(&data, prime(2), 2), vec![1, 0, 3]);
    }
}
