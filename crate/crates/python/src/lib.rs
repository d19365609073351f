use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use modvertex::characters::{fock_character as fock_char, mathieu_product as mathieu, CharSeries};
use modvertex::pcenter::iota_state as iota;
use modvertex::wakimoto::{center_probe as probe, singular_vectors, w_minus_rho};
use modvertex::wff::wff_image;
use modvertex::{
    run_suite as run, BabyWakimoto, FiniteLieData, Fp, Level, ModuleSpec, Prime, SparseVector,
    Suite, SuiteConfig, SuiteReport, WakimotoCharacter, WffTables,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn prime(p: u32) -> PyResult<Prime> {
    Prime::new(p).map_err(err)
}

fn sl2() -> Arc<FiniteLieData> {
    Arc::new(FiniteLieData::sl2())
}

fn basis_index(data: &FiniteLieData, label: &str) -> PyResult<usize> {
    data.index_of(label)
        .ok_or_else(|| err(format!("unknown basis element {label:?}")))
}

fn terms(v: &SparseVector<Fp>, data: &FiniteLieData) -> Vec<(String, u32)> {
    v.iter()
        .map(|(m, c)| (m.display(data), c.residue()))
        .collect()
}

fn series(s: &CharSeries) -> Vec<(Vec<i64>, i64, i64)> {
    s.terms()
        .map(|(w, c)| (w.alpha_coeffs.clone(), w.delta_deg, c))
        .collect()
}

/// `binom(b, a) mod p`, with negative `b` allowed.
#[pyfunction]
fn fp_binom(b: i64, a: u64, p: u32) -> PyResult<u32> {
    Ok(modvertex::fp_binom(b, a, prime(p)?).residue())
}

/// Outcome of a verification suite.
#[pyclass(frozen)]
struct SuiteResult {
    report: SuiteReport,
}

#[pymethods]
impl SuiteResult {
    #[getter]
    fn passed(&self) -> bool {
        self.report.passed
    }

    #[getter]
    fn checks(&self) -> Vec<(String, bool, u64)> {
        self.report
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.passed, c.checked))
            .collect()
    }

    fn summary(&self) -> String {
        self.report.summary()
    }

    fn json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.report).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (suite, p=None, kappa=None, depth=None, mode_bound=None, seed=0, extra_probes=0, force=false))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    suite: &str,
    p: Option<Vec<u32>>,
    kappa: Option<Vec<String>>,
    depth: Option<u32>,
    mode_bound: Option<i64>,
    seed: u64,
    extra_probes: usize,
    force: bool,
) -> PyResult<SuiteResult> {
    let mut cfg = SuiteConfig::new(suite.parse::<Suite>().map_err(err)?);
    cfg.primes = p.unwrap_or_default();
    cfg.levels = kappa
        .unwrap_or_default()
        .iter()
        .map(|k| k.parse::<Level>())
        .collect::<Result<_, _>>()
        .map_err(err)?;
    cfg.depth = depth;
    cfg.mode_bound = mode_bound;
    cfg.seed = seed;
    cfg.extra_probes = extra_probes;
    cfg.force = force;
    let report = py.detach(|| run(&cfg)).map_err(err)?;
    Ok(SuiteResult { report })
}

/// `(x_{-r})^p |0⟩ - (x^{[p]})_{-rp} |0⟩` as `(monomial, coefficient)` pairs.
#[pyfunction]
fn iota_state(x: &str, r: i64, p: u32) -> PyResult<Vec<(String, u32)>> {
    if r < 1 {
        return Err(err("r must be at least 1"));
    }
    let data = FiniteLieData::sl2();
    let s = iota::<Fp>(&data, basis_index(&data, x)?, r, prime(p)?);
    Ok(terms(&s.vector, &data))
}

/// Free-field images of `e`, `h`, `f` at level `kappa`.
#[pyfunction]
fn wff_images(p: u32, kappa: i64) -> PyResult<BTreeMap<String, String>> {
    let data = FiniteLieData::sl2();
    let q = prime(p)?;
    let (e, h, f) = wff_image(&data, &WffTables::sl2(), 0, &Fp::new(kappa, q)).map_err(err)?;
    Ok([("e", e), ("h", h), ("f", f)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.render(&data)))
        .collect())
}

/// Coefficients `(alpha_coeffs, delta_deg, coeff)` of the Mathieu product.
#[pyfunction]
fn mathieu_product(p: u32, depth: u32) -> PyResult<Vec<(Vec<i64>, i64, i64)>> {
    Ok(series(&mathieu(&FiniteLieData::sl2(), prime(p)?, depth)))
}

/// Character of the Weyl module with exponents capped at `cap` (or uncapped).
#[pyfunction]
#[pyo3(signature = (p, depth, cap=None))]
fn fock_character(p: u32, depth: u32, cap: Option<u32>) -> PyResult<Vec<(Vec<i64>, i64, i64)>> {
    let m = ModuleSpec::<Fp>::weyl(sl2(), prime(p)?);
    Ok(series(&fock_char(&m, depth, cap)))
}

/// Rows `(depth, commutant_dim, z0_dim)` of the center probe on the vacuum module.
#[pyfunction]
fn center_probe(p: u32, kappa: i64, depth: u32) -> PyResult<Vec<(u64, u64, u64)>> {
    let r = probe(sl2(), Fp::new(kappa, prime(p)?), depth).map_err(err)?;
    let rows = r.details["rows"].as_array().cloned().unwrap_or_default();
    Ok(rows
        .iter()
        .map(|row| {
            (
                row["depth"].as_u64().unwrap_or(0),
                row["commutant_dim"].as_u64().unwrap_or(0),
                row["z0_dim"].as_u64().unwrap_or(0),
            )
        })
        .collect())
}

/// A baby Wakimoto module for sl2 with zero p-character.
#[pyclass(name = "BabyWakimoto")]
struct PyBabyWakimoto {
    inner: BabyWakimoto<Fp>,
}

#[pymethods]
impl PyBabyWakimoto {
    /// `kappa=None` builds the critical-level module with `b_0` acting by `lam`.
    #[new]
    #[pyo3(signature = (p, lam=-1, kappa=None))]
    fn new(p: u32, lam: i64, kappa: Option<i64>) -> PyResult<Self> {
        let q = prime(p)?;
        let tables = WffTables::sl2();
        let inner = match kappa {
            None if lam == -1 => w_minus_rho(sl2(), &tables, q),
            None => BabyWakimoto::critical(
                sl2(),
                &tables,
                [((0, 0), Fp::new(lam, q))].into(),
                WakimotoCharacter::zero(),
                q,
            ),
            Some(k) => BabyWakimoto::new(
                sl2(),
                &tables,
                Fp::new(k, q),
                vec![Fp::new(lam, q)],
                WakimotoCharacter::zero(),
            ),
        }
        .map_err(err)?;
        Ok(PyBabyWakimoto { inner })
    }

    #[getter]
    fn critical(&self) -> bool {
        self.inner.critical
    }

    fn basis(&self, depth: u32) -> Vec<String> {
        let data = self.inner.data();
        self.inner
            .basis(depth)
            .iter()
            .map(|m| m.display(data))
            .collect()
    }

    /// Applies `x_n` for each `(x, n)` in `word`, rightmost first, to the highest-weight vector.
    fn act_on_highest_weight(&self, word: Vec<(String, i64)>) -> PyResult<Vec<(String, u32)>> {
        let data = self.inner.data();
        let mut ev = self.inner.evaluator();
        let mut v = self.inner.highest_weight_vector();
        for (x, n) in word.iter().rev() {
            v = self.inner.g_action(&mut ev, basis_index(data, x)?, *n, &v);
        }
        Ok(terms(&v, data))
    }

    /// Weight spaces with singular vectors at depths `1..=depth`, as `(weight, depth, dimension)`.
    fn singular_vectors(&self, py: Python<'_>, depth: u32) -> Vec<(Vec<i64>, i64, usize)> {
        let found = py.detach(|| singular_vectors(&self.inner, depth));
        found
            .into_iter()
            .map(|s| (s.weight, s.depth, s.dimension))
            .collect()
    }

    fn character(&self, depth: u32) -> Vec<(Vec<i64>, i64, i64)> {
        series(&modvertex::characters::quotient_character(
            &self.inner.quotient,
            depth,
        ))
    }
}

#[pymodule]
#[pyo3(name = "modvertex")]
fn modvertex_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(fp_binom, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(iota_state, m)?)?;
    m.add_function(wrap_pyfunction!(wff_images, m)?)?;
    m.add_function(wrap_pyfunction!(mathieu_product, m)?)?;
    m.add_function(wrap_pyfunction!(fock_character, m)?)?;
    m.add_function(wrap_pyfunction!(center_probe, m)?)?;
    m.add_class::<SuiteResult>()?;
    m.add_class::<PyBabyWakimoto>()?;
    Ok(())
}
