//! Baby Wakimoto modules, singular-vector censuses and the center probe.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::field::{record, Evaluator};
use crate::fock::{Generator, GeneratorMode, ModuleKind, ModuleSpec, Monomial, SparseVector};
use crate::linalg::kernel_of_images;
use crate::pcenter::{z0_graded_dims, z0_vectors, PCharacter, RestrictedQuotient};
use crate::report::CheckReport;
use crate::root_data::{affine_bracket, AffineElement, FiniteLieData};
use crate::scalars::{Fp, Prime, Scalar};
use crate::wff::{critical_level, WffRealization, WffTables};

/// p-character data of a baby Wakimoto module.
///
/// `m` holds the values of `a_{α,n-1}^p` and `(a*_{α,n})^p` (`n ≤ 0`) keyed by
/// classical generator mode. `pi` holds the value `ξ^π(b_{i,n})^p` assigned to
/// `b_{i,n}^p - b_{i,np}`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WakimotoCharacter<S> {
    pub m: BTreeMap<GeneratorMode, S>,
    pub pi: BTreeMap<(usize, i64), S>,
}

impl<S: Scalar> WakimotoCharacter<S> {
    pub fn zero() -> Self {
        WakimotoCharacter {
            m: BTreeMap::new(),
            pi: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.values().chain(self.pi.values()).all(Scalar::is_zero)
    }

    /// Nonzero only on generators of mode zero.
    pub fn is_graded(&self) -> bool {
        self.m.iter().all(|(g, c)| g.mode == 0 || c.is_zero())
            && self.pi.iter().all(|(&(_, n), c)| n == 0 || c.is_zero())
    }

    fn pi_value(&self, i: usize, n: i64, p: Prime) -> S {
        self.pi.get(&(i, n)).cloned().unwrap_or_else(|| S::zero(p))
    }

    fn check_m_support(&self) -> Result<()> {
        for g in self.m.keys() {
            let ok = match g.gen {
                Generator::AStar(_) => g.mode <= 0,
                Generator::A(_) => g.mode <= -1,
                _ => false,
            };
            if !ok {
                return Err(Error::IncompatibleCharacter(format!(
                    "the M-part is supported on a_(n-1), a*_n with n <= 0, got {g:?}"
                )));
            }
        }
        Ok(())
    }
}

/// A baby Wakimoto module: the cap-`p` quotient of `M ⊗ π^{κ-κ_c}(λ)`, or of
/// `M ⊗ K_{λ(t)}` at the critical level, with the `ĝ`-action pulled back
/// along the free-field realization.
pub struct BabyWakimoto<S: Scalar> {
    pub real: WffRealization<S>,
    pub quotient: RestrictedQuotient<S>,
    pub character: WakimotoCharacter<S>,
    /// `λ(h_i)`, or the zero modes `λ_{i,0}` at the critical level.
    pub lambda: Vec<S>,
    pub critical: bool,
}

impl<S: Scalar> BabyWakimoto<S> {
    /// The noncritical module `𝔴^κ_{ξ,ξ^π}(λ)`.
    pub fn new(
        data: Arc<FiniteLieData>,
        tables: &WffTables,
        kappa: S,
        lambda: Vec<S>,
        character: WakimotoCharacter<S>,
    ) -> Result<Self> {
        let p = kappa.prime();
        let q = p.get() as u64;
        if kappa == critical_level(&data, p) {
            return Err(Error::InvalidConfig(
                "noncritical construction at the critical level".into(),
            ));
        }
        if lambda.len() != data.rank {
            return Err(Error::InvalidConfig(format!(
                "lambda has {} entries for rank {}",
                lambda.len(),
                data.rank
            )));
        }
        character.check_m_support()?;
        if let Some(&(i, n)) = character
            .pi
            .keys()
            .find(|&&(i, n)| n >= 0 || i >= data.rank)
        {
            return Err(Error::IncompatibleCharacter(format!(
                "xi^pi must vanish on b_({i},{n})"
            )));
        }
        for (i, l) in lambda.iter().enumerate() {
            // λ(h_i)^p - λ(h_i) = ξ^π(h_i)^p, and ξ^π vanishes in mode zero.
            if !(l.pow(q) - l.clone()).is_zero() {
                return Err(Error::IncompatibleCharacter(format!(
                    "lambda(h_{}) = {l} is not in F_p while xi^pi(h_{}) = 0",
                    i + 1,
                    i + 1
                )));
            }
        }
        let real = WffRealization::new(data, tables, kappa, lambda.clone())?;
        let mut values: BTreeMap<GeneratorMode, S> = character.m.clone();
        for (&(i, n), c) in &character.pi {
            values.insert(GeneratorMode::new(Generator::B(i), n), c.clone());
        }
        let quotient = RestrictedQuotient::new(real.module.clone(), PCharacter { values })?;
        Ok(BabyWakimoto {
            real,
            quotient,
            character,
            lambda,
            critical: false,
        })
    }

    /// The critical-level module `𝔴_ξ(λ)` with `b_{i,n}` acting by `λ_{i,n}`.
    pub fn critical(
        data: Arc<FiniteLieData>,
        tables: &WffTables,
        lambda_t: BTreeMap<(usize, i64), S>,
        character: WakimotoCharacter<S>,
        p: Prime,
    ) -> Result<Self> {
        character.check_m_support()?;
        let q = p.get() as i64;
        let lam = |i: usize, n: i64| lambda_t.get(&(i, n)).cloned().unwrap_or_else(|| S::zero(p));
        let mut modes: BTreeSet<(usize, i64)> = (0..data.rank).map(|i| (i, 0)).collect();
        modes.extend(lambda_t.keys().copied());
        modes.extend(character.pi.keys().copied());
        modes.extend(
            lambda_t
                .keys()
                .filter(|(_, n)| n % q == 0)
                .map(|&(i, n)| (i, n / q)),
        );
        for (i, n) in modes {
            let lhs = lam(i, n).pow(q as u64) - lam(i, n * q);
            if lhs != character.pi_value(i, n, p) {
                return Err(Error::IncompatibleCharacter(format!(
                    "lambda_({i},{n})^p - lambda_({i},{}) = {lhs} but xi^pi(b_({i},{n}))^p = {}",
                    n * q,
                    character.pi_value(i, n, p)
                )));
            }
        }
        let lambda = (0..data.rank).map(|i| lam(i, 0)).collect();
        let real = WffRealization::critical(data, tables, lambda_t, p)?;
        let quotient = RestrictedQuotient::new(
            real.module.clone(),
            PCharacter {
                values: character.m.clone(),
            },
        )?;
        Ok(BabyWakimoto {
            real,
            quotient,
            character,
            lambda,
            critical: true,
        })
    }

    pub fn prime(&self) -> Prime {
        self.real.prime()
    }

    pub fn data(&self) -> &FiniteLieData {
        &self.real.data
    }

    pub fn evaluator(&self) -> Evaluator<'_, S> {
        Evaluator::new(&self.real.module)
    }

    pub fn basis(&self, depth: u32) -> Vec<Monomial> {
        self.quotient.basis(depth)
    }

    pub fn highest_weight_vector(&self) -> SparseVector<S> {
        SparseVector::vacuum(self.prime())
    }

    /// `x_n v`, reduced in the quotient.
    pub fn g_action<'a>(
        &'a self,
        ev: &mut Evaluator<'a, S>,
        x: usize,
        n: i64,
        v: &SparseVector<S>,
    ) -> SparseVector<S> {
        self.quotient.reduce(&self.real.act(ev, x, n, v))
    }

    pub fn g_action_element<'a>(
        &'a self,
        ev: &mut Evaluator<'a, S>,
        x: &AffineElement<S>,
        v: &SparseVector<S>,
    ) -> SparseVector<S> {
        self.quotient.reduce(&self.real.act_element(ev, x, v))
    }

    /// `(x_n^p - (x^{[p]})_{np}) v` through the quotient action.
    pub fn iota_action<'a>(
        &'a self,
        ev: &mut Evaluator<'a, S>,
        x: usize,
        n: i64,
        v: &SparseVector<S>,
    ) -> SparseVector<S> {
        let p = self.prime();
        let mut out = v.clone();
        for _ in 0..p.get() {
            out = self.g_action(ev, x, n, &out);
        }
        for &(j, c) in &self.data().p_power[x] {
            out.add_scaled(
                &self.g_action(ev, j, n * p.get() as i64, v),
                &S::from_i64(-c, p),
            );
        }
        out
    }

    fn probes(&self, depth: u32) -> Vec<SparseVector<S>> {
        self.basis(depth)
            .into_iter()
            .map(|m| SparseVector::basis(m, self.prime()))
            .collect()
    }

    /// The affine relations for the quotient action, `|m|, |n| ≤ mode_bound`.
    pub fn verify_relations(&self, depth: u32, mode_bound: i64) -> CheckReport {
        let data = self.data();
        let p = self.prime();
        let mut report = CheckReport::new(
            "wakimoto-relations",
            json!({"p": p.get(), "kappa": self.real.kappa.to_string(), "critical": self.critical, "depth": depth, "mode_bound": mode_bound}),
        );
        let probes = self.probes(depth);
        let chunk = probes.len().div_ceil(rayon::current_num_threads()).max(1);
        let partial: Vec<CheckReport> = probes
            .par_chunks(chunk)
            .map(|chunk| {
                let mut rep = CheckReport::new("wakimoto-relations", json!({}));
                let mut ev = self.evaluator();
                for v in chunk {
                    for x in 0..data.dim() {
                        for y in 0..data.dim() {
                            for m in -mode_bound..=mode_bound {
                                for n in -mode_bound..=mode_bound {
                                    let yv = self.g_action(&mut ev, y, n, v);
                                    let xyv = self.g_action(&mut ev, x, m, &yv);
                                    let xv = self.g_action(&mut ev, x, m, v);
                                    let yxv = self.g_action(&mut ev, y, n, &xv);
                                    let lhs = xyv.sub(&yxv);
                                    let br = affine_bracket(
                                        data,
                                        &AffineElement::basis(x, m, p),
                                        &AffineElement::basis(y, n, p),
                                    );
                                    let rhs = self.g_action_element(&mut ev, &br, v);
                                    let (lx, ly) = (&data.labels[x], &data.labels[y]);
                                    record(
                                        &mut rep,
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
                rep
            })
            .collect();
        partial.iter().for_each(|r| report.absorb(r));
        report
    }

    /// Each `ι(x_n)`, `|n| ≤ mode_bound`, acts on the basis of depth at most
    /// `depth` by one scalar; that scalar must vanish when the p-character is
    /// zero and `λ` is `F_p`-valued. The generators of the free-field
    /// p-centers are checked to act by their character values.
    pub fn verify_iota_scalars(&self, depth: u32, mode_bound: i64) -> CheckReport {
        let data = self.data();
        let p = self.prime();
        let mut report = CheckReport::new(
            "wakimoto-iota-scalars",
            json!({"p": p.get(), "kappa": self.real.kappa.to_string(), "critical": self.critical, "depth": depth, "mode_bound": mode_bound}),
        );
        let probes = self.probes(depth);
        let expect_zero = self.character.is_zero();
        let mut ev = self.evaluator();
        let mut scalars = Vec::new();
        for x in 0..data.dim() {
            for n in -mode_bound..=mode_bound {
                let hw = self.highest_weight_vector();
                let c = if expect_zero {
                    S::zero(p)
                } else {
                    self.iota_action(&mut ev, x, n, &hw).coeff(&Monomial::one())
                };
                for v in &probes {
                    let lhs = self.iota_action(&mut ev, x, n, v);
                    let rhs = v.scaled(&c);
                    let label = &data.labels[x];
                    record(
                        &mut report,
                        data,
                        || format!("iota({label}_{n})"),
                        v,
                        &lhs,
                        &rhs,
                    );
                }
                scalars.push(json!({"x": data.labels[x], "n": n, "scalar": c.to_string()}));
            }
        }
        let gens = self.quotient.module.creation_generators(depth);
        report.absorb(&self.quotient.verify_scalar_action(depth, &gens));
        report.with_details(json!({"iota_scalars": scalars}))
    }
}

/// The kernel of the raising conditions in one weight space.
#[derive(Clone, Debug, Serialize)]
pub struct SingularSpace {
    pub weight: Vec<i64>,
    pub depth: i64,
    pub dimension: usize,
    pub vectors: Vec<Vec<crate::report::TermJson>>,
}

/// Singular vectors per weight space at depths `1..=depth`: solutions of
/// `e_{i,0} v = 0` and `x_n v = 0` for every basis `x` and `1 ≤ n ≤ depth`.
pub fn singular_census(
    data: &FiniteLieData,
    prime: Prime,
    basis: Vec<Monomial>,
    depth: u32,
    act: &(dyn Fn(usize, i64, &SparseVector<Fp>) -> SparseVector<Fp> + Sync),
) -> Vec<SingularSpace> {
    let mut spaces: BTreeMap<(i64, Vec<i64>), Vec<Monomial>> = BTreeMap::new();
    for m in basis {
        let d = m.depth();
        if d >= 1 && d <= depth as i64 {
            spaces.entry((d, m.weight(data))).or_default().push(m);
        }
    }
    let conditions: Vec<(usize, i64)> = (0..data.rank)
        .filter_map(|i| data.raising(i).map(|e| (e, 0)))
        .chain((1..=depth as i64).flat_map(|n| (0..data.dim()).map(move |x| (x, n))))
        .collect();
    let spaces: Vec<_> = spaces.into_iter().collect();
    spaces
        .par_iter()
        .filter_map(|((d, weight), monomials)| {
            let conds: Vec<&(usize, i64)> = conditions.iter().filter(|(_, n)| n <= d).collect();
            let images: Vec<Vec<SparseVector<Fp>>> = monomials
                .iter()
                .map(|m| {
                    let v = SparseVector::basis(m.clone(), prime);
                    conds.iter().map(|&&(x, n)| act(x, n, &v)).collect()
                })
                .collect();
            let kernel = kernel_of_images(&images, prime);
            if kernel.is_empty() {
                return None;
            }
            let vectors = kernel
                .iter()
                .map(|coords| {
                    let mut v = SparseVector::zero(prime);
                    for (m, c) in monomials.iter().zip(coords) {
                        v.add_term(m.clone(), *c);
                    }
                    v.describe(data)
                })
                .collect();
            Some(SingularSpace {
                weight: weight.clone(),
                depth: *d,
                dimension: kernel.len(),
                vectors,
            })
        })
        .collect()
}

pub fn singular_vectors(w: &BabyWakimoto<Fp>, depth: u32) -> Vec<SingularSpace> {
    let act = |x: usize, n: i64, v: &SparseVector<Fp>| {
        let mut ev = w.evaluator();
        w.g_action(&mut ev, x, n, v)
    };
    singular_census(w.data(), w.prime(), w.basis(depth), depth, &act)
}

/// The census on a restricted quotient of a vacuum module.
pub fn singular_vectors_vacuum(
    v: &RestrictedQuotient<Fp>,
    depth: u32,
) -> Result<Vec<SingularSpace>> {
    if !matches!(v.module.kind, ModuleKind::VacuumV { .. }) {
        return Err(Error::InvalidConfig(
            "expected a quotient of the vacuum module".into(),
        ));
    }
    let act = |x: usize, n: i64, w: &SparseVector<Fp>| {
        v.act(GeneratorMode::new(Generator::Lie(x), n), w)
            .expect("loop generators act on the vacuum module")
    };
    Ok(singular_census(
        &v.module.data,
        v.prime(),
        v.basis(depth),
        depth,
        &act,
    ))
}

/// `𝔴(-ρ)` at the critical level with zero p-character.
pub fn w_minus_rho(
    data: Arc<FiniteLieData>,
    tables: &WffTables,
    p: Prime,
) -> Result<BabyWakimoto<Fp>> {
    let lambda_t = (0..data.rank).map(|i| ((i, 0), Fp::new(-1, p))).collect();
    BabyWakimoto::critical(data, tables, lambda_t, WakimotoCharacter::zero(), p)
}

/// Census for `𝔴(-ρ)` together with the reducible control `V_0` at `κ = 0`.
pub fn verify_singular_census(
    data: Arc<FiniteLieData>,
    tables: &WffTables,
    p: Prime,
    depth: u32,
) -> Result<CheckReport> {
    let w = w_minus_rho(data.clone(), tables, p)?;
    let found = singular_vectors(&w, depth);
    let control = RestrictedQuotient::new(
        ModuleSpec::vacuum(data.clone(), Fp::zero(p)),
        PCharacter::zero(),
    )?;
    let control_found = singular_vectors_vacuum(&control, depth.min(2))?;
    let mut report = CheckReport::new(
        "singular-census",
        json!({"algebra": data.name, "p": p.get(), "depth": depth, "control": "V_0 at level 0"}),
    );
    report.checked = 2;
    if !found.is_empty() {
        report.passed = false;
        report.note(format!(
            "w(-rho) has singular vectors in {} weight spaces",
            found.len()
        ));
    }
    if control_found.is_empty() {
        report.passed = false;
        report.note("positive control found no singular vectors");
    }
    Ok(report.with_details(json!({"w_minus_rho": found, "control": control_found})))
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CenterRow {
    pub depth: u32,
    pub commutant_dim: usize,
    pub z0_dim: u64,
    pub excess: i64,
}

/// Dimensions of `{v ∈ V^κ : x_n v = 0 for all x, n ≥ 0}` per depth next to
/// the graded dimension of `z_0(V^κ)`.
pub fn center_probe(data: Arc<FiniteLieData>, kappa: Fp, depth: u32) -> Result<CheckReport> {
    let p = kappa.prime();
    let module = ModuleSpec::vacuum(data.clone(), kappa);
    let z0 = z0_graded_dims(&data, p, depth);
    let mut spaces: BTreeMap<(i64, Vec<i64>), Vec<Monomial>> = BTreeMap::new();
    for m in module.basis_enumerate(depth, None) {
        spaces
            .entry((m.depth(), m.weight(&data)))
            .or_default()
            .push(m);
    }
    let spaces: Vec<_> = spaces.into_iter().collect();
    let dims: Vec<(i64, usize)> = spaces
        .par_iter()
        .map(|((d, _), monomials)| {
            let images: Vec<Vec<SparseVector<Fp>>> = monomials
                .iter()
                .map(|m| {
                    let v = SparseVector::basis(m.clone(), p);
                    (0..=*d)
                        .flat_map(|n| (0..data.dim()).map(move |x| (x, n)))
                        .map(|(x, n)| {
                            module.apply_unchecked(GeneratorMode::new(Generator::Lie(x), n), &v)
                        })
                        .collect()
                })
                .collect();
            (*d, kernel_of_images(&images, p).len())
        })
        .collect();
    let mut commutant = vec![0usize; depth as usize + 1];
    for (d, k) in dims {
        commutant[d as usize] += k;
    }
    let mut report = CheckReport::new(
        "center-probe",
        json!({"algebra": data.name, "p": p.get(), "kappa": kappa.to_string(), "depth": depth}),
    );
    let critical = kappa == critical_level::<Fp>(&data, p);
    // The z_0 states themselves must pass the positivity test.
    for (d, vectors) in z0_vectors(&module, depth)? {
        for v in vectors {
            for x in 0..data.dim() {
                for n in 0..=d as i64 {
                    let w = module.apply_unchecked(GeneratorMode::new(Generator::Lie(x), n), &v);
                    let label = &data.labels[x];
                    record(
                        &mut report,
                        &data,
                        || format!("{label}_{n} on a z_0 state"),
                        &v,
                        &w,
                        &SparseVector::zero(p),
                    );
                }
            }
        }
    }
    let rows: Vec<CenterRow> = (0..=depth)
        .map(|d| {
            let (c, z) = (commutant[d as usize], z0[d as usize]);
            CenterRow {
                depth: d,
                commutant_dim: c,
                z0_dim: z,
                excess: c as i64 - z as i64,
            }
        })
        .collect();
    for row in &rows {
        report.checked += 1;
        if row.excess < 0 {
            report.passed = false;
            report.note(format!("commutant smaller than z_0 at depth {}", row.depth));
        } else if row.excess > 0 {
            report.note(format!(
                "depth {}: commutant exceeds z_0 by {}",
                row.depth, row.excess
            ));
        }
    }
    Ok(report.with_details(json!({"critical": critical, "rows": rows})))
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
    fn minus_rho_basics() {
        let q = prime(2);
        let w = w_minus_rho(sl2(), &WffTables::sl2(), q).unwrap();
        assert_eq!(w.basis(0).len(), 2);
        let mut ev = w.evaluator();
        let hw = w.highest_weight_vector();
        for n in 0..3 {
            assert!(w.g_action(&mut ev, E, n, &hw).is_zero());
        }
        assert_eq!(w.g_action(&mut ev, H, 0, &hw), hw.scaled(&Fp::new(-1, q)));
        let fv = w.g_action(&mut ev, F, 0, &hw);
        assert!(!fv.is_zero());
        assert_eq!(w.g_action(&mut ev, H, 0, &fv), fv.scaled(&Fp::new(-3, q)));
    }

    #[test]
    fn incompatible_data_rejected() {
        let q = prime(3);
        let tables = WffTables::sl2();
        let lambda = vec![KappaPoly::kappa(q)];
        let r = BabyWakimoto::new(
            sl2(),
            &tables,
            KappaPoly::constant(Fp::zero(q)),
            lambda,
            WakimotoCharacter::zero(),
        );
        assert!(matches!(r, Err(Error::IncompatibleCharacter(_))));
        let r = BabyWakimoto::new(
            sl2(),
            &tables,
            Fp::new(-2, q),
            vec![Fp::zero(q)],
            WakimotoCharacter::zero(),
        );
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
        let mut chi = WakimotoCharacter::zero();
        chi.m
            .insert(GeneratorMode::new(Generator::A(0), 0), Fp::one(q));
        let r = BabyWakimoto::new(sl2(), &tables, Fp::zero(q), vec![Fp::zero(q)], chi);
        assert!(matches!(r, Err(Error::IncompatibleCharacter(_))));
        // λ_{0}^p - λ_{0} must match ξ^π(b_0)^p at the critical level.
        let mut lt = BTreeMap::new();
        lt.insert((0, 1), Fp::one(q));
        let r = BabyWakimoto::critical(sl2(), &tables, lt, WakimotoCharacter::zero(), q);
        assert!(matches!(r, Err(Error::IncompatibleCharacter(_))));
    }

    #[test]
    fn critical_character_with_graded_data() {
        let q = prime(3);
        let mut chi = WakimotoCharacter::zero();
        chi.m
            .insert(GeneratorMode::new(Generator::AStar(0), 0), Fp::new(2, q));
        assert!(chi.is_graded());
        let mut lt = BTreeMap::new();
        lt.insert((0, 0), Fp::new(1, q));
        let w = BabyWakimoto::critical(sl2(), &WffTables::sl2(), lt, chi, q).unwrap();
        let r = w.verify_iota_scalars(2, 1);
        assert!(r.passed, "{:?}", r.witness);
    }

    #[test]
    fn noncritical_zero_character_annihilated() {
        for p in [2u32, 3] {
            let q = prime(p);
            let kappa = Fp::new(-1, q);
            let w = BabyWakimoto::new(
                sl2(),
                &WffTables::sl2(),
                kappa,
                vec![Fp::new(1, q)],
                WakimotoCharacter::zero(),
            )
            .unwrap();
            let r = w.verify_iota_scalars(3, 2);
            assert!(r.passed, "{:?}", r.witness);
            let r = w.verify_relations(2, 1);
            assert!(r.passed, "{:?}", r.witness);
        }
    }

    #[test]
    fn critical_relations_and_iota() {
        let q = prime(3);
        let w = w_minus_rho(sl2(), &WffTables::sl2(), q).unwrap();
        let r = w.verify_relations(2, 1);
        assert!(r.passed, "{:?}", r.witness);
        let r = w.verify_iota_scalars(3, 1);
        assert!(r.passed, "{:?}", r.witness);
    }

    #[test]
    fn census_small() {
        for p in [2u32, 3] {
            let r = verify_singular_census(sl2(), &WffTables::sl2(), prime(p), 3).unwrap();
            assert!(r.passed, "{:?}", r.notes);
        }
    }

    #[test]
    fn control_singular_vector_is_e() {
        let q = prime(3);
        let v = RestrictedQuotient::new(ModuleSpec::vacuum(sl2(), Fp::zero(q)), PCharacter::zero())
            .unwrap();
        let found = singular_vectors_vacuum(&v, 1).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].weight, vec![1]);
        assert_eq!(found[0].vectors[0][0].monomial, "e_{-1}");
        // At κ = 1 the vacuum module has no singular vector at depth 1.
        let v = RestrictedQuotient::new(ModuleSpec::vacuum(sl2(), Fp::one(q)), PCharacter::zero())
            .unwrap();
        assert!(singular_vectors_vacuum(&v, 1).unwrap().is_empty());
    }

    #[test]
    fn center_probe_rows() {
        let q = prime(2);
        let r = center_probe(sl2(), Fp::one(q), 2).unwrap();
        assert!(r.passed, "{:?}", r.witness);
        let rows = &r.details["rows"];
        assert_eq!(rows[0]["commutant_dim"], 1);
        assert_eq!(rows[2]["z0_dim"], 3);
        assert!(rows[2]["commutant_dim"].as_u64().unwrap() >= 3);
    }
}
