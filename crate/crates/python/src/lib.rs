use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use arboreq::rda_engine::{build_joint_optimal_rda, d_values};
use arboreq::strategy::randomized::Class;
use arboreq::suite::{
    analyze, chimera_suite, corpus, equilibrium, is_weakly_balanced, mixture_suite,
    product_bound_suite, random_tree, replacement_suite, verify_collapse, verify_corpus,
    verify_weakly_balanced_collapse, verify_yao, CorpusSpec,
};
use arboreq::{Error, Filter, Tree, Verdict};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_all<T: std::str::FromStr<Err = Error> + Clone>(
    items: Option<Vec<String>>,
    default: &[T],
) -> PyResult<Vec<T>> {
    match items {
        None => Ok(default.to_vec()),
        Some(v) => v.iter().map(|s| s.parse().map_err(err)).collect(),
    }
}

#[pyclass(name = "Verdict", frozen)]
struct PyVerdict {
    #[pyo3(get)]
    name: String,
    #[pyo3(get)]
    passed: bool,
    #[pyo3(get)]
    checks: usize,
    #[pyo3(get)]
    failures: Vec<String>,
}

impl From<Verdict> for PyVerdict {
    fn from(v: Verdict) -> Self {
        PyVerdict {
            name: v.name,
            passed: v.passed,
            checks: v.checks,
            failures: v.failures,
        }
    }
}

#[pymethods]
impl PyVerdict {
    fn __bool__(&self) -> bool {
        self.passed
    }

    fn __repr__(&self) -> String {
        format!(
            "Verdict({:?}, passed={}, checks={})",
            self.name,
            if self.passed { "True" } else { "False" },
            self.checks
        )
    }
}

/// An AND-OR tree in s-expression form, e.g. `(and (or * *) *)`.
#[pyclass(name = "Tree", frozen)]
struct PyTree {
    inner: Tree,
}

#[pymethods]
impl PyTree {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyTree {
            inner: Tree::parse(text).map_err(err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (leaves, max_arity = 3, seed = 0))]
    fn random(leaves: usize, max_arity: usize, seed: u64) -> PyResult<Self> {
        Ok(PyTree {
            inner: random_tree(leaves, max_arity, seed).map_err(err)?,
        })
    }

    #[getter]
    fn leaf_count(&self) -> usize {
        self.inner.leaf_count()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    fn is_leaf(&self) -> bool {
        self.inner.is_leaf()
    }

    fn canonical_key(&self) -> String {
        self.inner.canonical_key()
    }

    /// Root value under a bitstring assignment, leaf 1 first.
    fn evaluate(&self, bits: &str) -> PyResult<bool> {
        let omega = bits.parse().map_err(err)?;
        self.inner.eval(&omega).map_err(err)
    }

    #[pyo3(signature = (class_ = "dir", filter = "all"))]
    fn equilibrium(&self, py: Python<'_>, class_: &str, filter: &str) -> PyResult<Py<PyAny>> {
        let class: Class = class_.parse().map_err(err)?;
        let filter: Filter = filter.parse().map_err(err)?;
        let e = py
            .detach(|| equilibrium(&self.inner, class, filter))
            .map_err(err)?;
        to_python(py, &e)
    }

    #[pyo3(signature = (classes = None, filters = None))]
    fn analyze(
        &self,
        py: Python<'_>,
        classes: Option<Vec<String>>,
        filters: Option<Vec<String>>,
    ) -> PyResult<Py<PyAny>> {
        let classes = parse_all(classes, &Class::ALL)?;
        let filters = parse_all(filters, &Filter::ALL)?;
        let report = py
            .detach(|| analyze(&self.inner, &classes, &filters))
            .map_err(err)?;
        to_python(py, &report)
    }

    /// Worst-case costs of the optimal randomized directional algorithm.
    fn d_values(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &d_values(&self.inner).map_err(err)?)
    }

    fn joint_optimal_rda(&self) -> PyResult<String> {
        Ok(build_joint_optimal_rda(&self.inner)
            .map_err(err)?
            .rda
            .encode())
    }

    fn is_weakly_balanced(&self, py: Python<'_>) -> PyResult<bool> {
        Ok(py
            .detach(|| is_weakly_balanced(&self.inner))
            .map_err(err)?
            .balanced)
    }

    /// Runs one check: collapse, yao, weak-balance, chimera, replacement,
    /// mixture or product.
    #[pyo3(signature = (check, seed = 0, samples = 20))]
    fn verify(
        &self,
        py: Python<'_>,
        check: &str,
        seed: u64,
        samples: usize,
    ) -> PyResult<PyVerdict> {
        let tree = &self.inner;
        let pool = [tree.clone()];
        let v = py.detach(|| -> Result<Verdict, Error> {
            match check {
                "collapse" => verify_collapse(tree),
                "yao" => {
                    let mut v = Verdict::new("yao");
                    for class in Class::ALL {
                        for filter in Filter::ALL {
                            v.absorb(verify_yao(tree, class, filter)?);
                        }
                    }
                    Ok(v)
                }
                "weak-balance" => verify_weakly_balanced_collapse(tree),
                "chimera" => Ok(chimera_suite(&pool, seed, samples)?.verdict),
                "replacement" => Ok(replacement_suite(&pool, seed, samples)?.verdict),
                "mixture" => Ok(mixture_suite(&pool, seed, samples)?.verdict),
                "product" => Ok(product_bound_suite(&pool, seed, samples)?.verdict),
                other => Err(Error::Parse(format!("unknown check {other:?}"))),
            }
        });
        Ok(v.map_err(err)?.into())
    }

    fn __str__(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?})", self.inner.render())
    }

    fn __eq__(&self, other: &PyTree) -> bool {
        self.inner.render() == other.inner.render()
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.inner.render().hash(&mut h);
        h.finish()
    }
}

/// Every tree of the exhaustive corpus up to `max_leaves` leaves.
#[pyfunction]
#[pyo3(signature = (max_leaves = 6))]
fn corpus_trees(max_leaves: usize) -> Vec<PyTree> {
    corpus(&CorpusSpec::with_max_leaves(max_leaves))
        .into_iter()
        .map(|inner| PyTree { inner })
        .collect()
}

/// Verifies the corpus and returns the full report.
#[pyfunction]
#[pyo3(signature = (max_leaves = 6, jobs = None))]
fn verify_corpus_report(
    py: Python<'_>,
    max_leaves: usize,
    jobs: Option<usize>,
) -> PyResult<Py<PyAny>> {
    let report = py
        .detach(|| verify_corpus(&CorpusSpec::with_max_leaves(max_leaves), jobs))
        .map_err(err)?;
    to_python(py, &report)
}

#[pymodule]
fn pyarboreq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyVerdict>()?;
    m.add_function(wrap_pyfunction!(corpus_trees, m)?)?;
    m.add_function(wrap_pyfunction!(verify_corpus_report, m)?)?;
    Ok(())
}
