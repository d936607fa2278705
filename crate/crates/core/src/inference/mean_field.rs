use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::exact::exact_filter;
use crate::inference::lattice::{FilterLattice, LatticeOptions, LatticeScratch};
use crate::potentials::CrfProblem;

/// Largest `N` for which the exact backend caches the full similarity matrix.
const DENSE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Exact,
    /// Lattice filtering per kernel. Kernels whose lattice cannot be built
    /// (too many dimensions or vertices) use the exact sum instead.
    Filtered,
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "filtered" => Ok(Backend::Filtered),
            other => Err(Error::invalid(format!("unknown backend `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InferenceSettings {
    pub backend: Backend,
    pub max_iterations: usize,
    /// Stop once no marginal moves by this much in a sweep.
    pub convergence_tol: f64,
    /// Weight kept on the previous marginals, in `[0, 1)`.
    pub damping: f64,
    pub lattice: LatticeOptions,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        InferenceSettings {
            backend: Backend::Exact,
            max_iterations: 100,
            convergence_tol: 1e-5,
            damping: 0.0,
            lattice: LatticeOptions::default(),
        }
    }
}

impl InferenceSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be positive"));
        }
        if !(self.convergence_tol > 0.0 && self.convergence_tol.is_finite()) {
            return Err(Error::invalid(format!(
                "convergence tolerance must be positive, got {}",
                self.convergence_tol
            )));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::invalid(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        self.lattice.stencil.taps()?;
        Ok(())
    }
}

/// `q[i]` is the probability that gallery node `i` shows the probe's identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Marginals {
    pub q: Vec<f64>,
}

impl Marginals {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.q
    }

    /// Largest componentwise absolute difference.
    pub fn max_change(&self, other: &Marginals) -> f64 {
        max_abs_diff(&self.q, &other.q)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inference {
    pub marginals: Marginals,
    pub iterations: usize,
    pub converged: bool,
}

/// `1 / (1 + exp(-z))` without overflow for large `|z|`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Unary-only marginals `exp(-u) / (1 + exp(-u))`.
pub fn init_marginals(problem: &CrfProblem) -> Marginals {
    Marginals {
        q: problem.unary_cost.iter().map(|&u| logistic(-u)).collect(),
    }
}

enum KernelFilter {
    Lattice {
        weight: f64,
        lattice: FilterLattice,
        ones: Vec<f64>,
    },
    Exact {
        weight: f64,
        index: usize,
        ones: Vec<f64>,
    },
}

/// Computes `S_i = sum_{j != i} kappa(i, j) q_j` and the matching row sums.
enum Messages {
    Dense { kappa: Vec<f64>, row_sum: Vec<f64> },
    Filtered(Vec<KernelFilter>),
}

fn dense_messages(problem: &CrfProblem) -> Messages {
    let n = problem.len();
    let mut kappa = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let k = problem.similarity_unchecked(i, j);
            kappa[i * n + j] = k;
            kappa[j * n + i] = k;
        }
    }
    let row_sum = kappa.chunks(n.max(1)).map(|r| r.iter().sum()).collect();
    Messages::Dense { kappa, row_sum }
}

fn per_kernel_messages(problem: &CrfProblem, settings: &InferenceSettings, use_lattice: bool) -> Messages {
    let n = problem.len();
    let all_ones = vec![1.0; n];
    let filters = problem
        .kernels
        .iter()
        .enumerate()
        .filter(|(_, k)| k.weight > 0.0)
        .map(|(index, k)| {
            let lattice = if use_lattice {
                FilterLattice::build(k.points.view(), k.sigma, &settings.lattice).ok()
            } else {
                None
            };
            match lattice {
                Some(lattice) => {
                    let ones = lattice.filter(&all_ones);
                    KernelFilter::Lattice {
                        weight: k.weight,
                        lattice,
                        ones,
                    }
                }
                None => KernelFilter::Exact {
                    weight: k.weight,
                    index,
                    ones: exact_filter(k.points.view(), &all_ones, k.sigma),
                },
            }
        })
        .collect();
    Messages::Filtered(filters)
}

/// A problem prepared for repeated mean-field sweeps with one backend.
pub struct MeanField<'a> {
    problem: &'a CrfProblem,
    settings: InferenceSettings,
    messages: Messages,
}

impl<'a> MeanField<'a> {
    pub fn new(problem: &'a CrfProblem, settings: &InferenceSettings) -> Result<Self> {
        settings.validate()?;
        let messages = match settings.backend {
            Backend::Exact if problem.len() <= DENSE_LIMIT => dense_messages(problem),
            Backend::Exact => per_kernel_messages(problem, settings, false),
            Backend::Filtered => per_kernel_messages(problem, settings, true),
        };
        Ok(MeanField {
            problem,
            settings: *settings,
            messages,
        })
    }

    /// Fills `s` with `sum_j kappa(i, j) q_j` and `t` with
    /// `sum_j kappa(i, j) (1 - q_j)`, both over `j != i`.
    fn messages(&self, q: &[f64], s: &mut [f64], t: &mut [f64]) {
        let n = q.len();
        match &self.messages {
            Messages::Dense { kappa, row_sum } => {
                for i in 0..n {
                    let row = &kappa[i * n..(i + 1) * n];
                    let si: f64 = row.iter().zip(q).map(|(k, qj)| k * qj).sum();
                    s[i] = si;
                    t[i] = row_sum[i] - si;
                }
            }
            Messages::Filtered(filters) => {
                s.fill(0.0);
                t.fill(0.0);
                let mut scratch = LatticeScratch::default();
                let mut buf = vec![0.0; n];
                for f in filters {
                    let (weight, ones) = match f {
                        KernelFilter::Lattice { weight, lattice, ones } => {
                            lattice.filter_into(q, &mut buf, &mut scratch);
                            (*weight, ones)
                        }
                        KernelFilter::Exact { weight, index, ones } => {
                            let k = &self.problem.kernels[*index];
                            buf = exact_filter(k.points.view(), q, k.sigma);
                            (*weight, ones)
                        }
                    };
                    for i in 0..n {
                        s[i] += weight * buf[i];
                        t[i] += weight * (ones[i] - buf[i]);
                    }
                }
            }
        }
    }

    /// One synchronous update of every node.
    pub fn sweep(&self, q: &Marginals) -> Marginals {
        let n = self.problem.len();
        assert_eq!(q.len(), n, "one marginal per node");
        let mut s = vec![0.0; n];
        let mut t = vec![0.0; n];
        self.messages(&q.q, &mut s, &mut t);
        let alpha = self.problem.alpha;
        let delta = self.settings.damping;
        let next = (0..n)
            .map(|i| {
                let z = -self.problem.unary_cost[i] - alpha * (t[i] - s[i]);
                let fresh = logistic(z);
                if delta > 0.0 {
                    (1.0 - delta) * fresh + delta * q.q[i]
                } else {
                    fresh
                }
            })
            .collect();
        Marginals { q: next }
    }

    pub fn run(&self) -> Inference {
        let mut q = init_marginals(self.problem);
        for iteration in 1..=self.settings.max_iterations {
            let next = self.sweep(&q);
            let change = next.max_change(&q);
            q = next;
            if change < self.settings.convergence_tol {
                return Inference {
                    marginals: q,
                    iterations: iteration,
                    converged: true,
                };
            }
        }
        Inference {
            marginals: q,
            iterations: self.settings.max_iterations,
            converged: false,
        }
    }
}

/// A single mean-field update. Builds the backend on every call; use
/// [`MeanField`] when sweeping repeatedly.
pub fn mean_field_sweep(problem: &CrfProblem, q: &Marginals, settings: &InferenceSettings) -> Result<Marginals> {
    if q.len() != problem.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.len(),
            found: q.len(),
        });
    }
    Ok(MeanField::new(problem, settings)?.sweep(q))
}

/// Iterates mean-field sweeps from the unary-only marginals until the largest
/// change falls below the tolerance or the iteration budget runs out.
pub fn infer_marginals(problem: &CrfProblem, settings: &InferenceSettings) -> Result<Inference> {
    Ok(MeanField::new(problem, settings)?.run())
}

/// Largest change an undamped exact sweep would make to `q`.
pub fn fixed_point_residual(problem: &CrfProblem, q: &Marginals) -> Result<f64> {
    let settings = InferenceSettings::default();
    let next = mean_field_sweep(problem, q, &settings)?;
    Ok(next.max_change(q))
}
