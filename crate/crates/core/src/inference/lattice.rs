//! Approximate Gaussian filtering on the permutohedral lattice.
//!
//! Points are embedded in the hyperplane `x . 1 = 0` of `R^(d+1)`, splatted
//! onto the vertices of their enclosing simplex with barycentric weights,
//! blurred with a one-dimensional stencil along each of the `d + 1` lattice
//! axes, and sliced back with the same weights.
//!
//! The embedding scale is chosen so that the total mass of the lattice kernel
//! equals the mass of `exp(-|a - b|^2 / sigma)`. Every point is normalized by
//! its own zero-displacement response, which is known in closed form, so the
//! approximate kernel is exactly 1 at zero displacement and the self term can
//! be subtracted after slicing.
//!
//! The vertex set is closed under the stencil offsets before filtering, so the
//! blur itself is exact on the lattice; the only approximation is the
//! barycentric interpolation.

use std::collections::HashMap;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DIM: usize = 8;
pub const DEFAULT_MAX_VERTICES: usize = 1 << 20;

const NONE: u32 = u32::MAX;

/// One-dimensional blur applied along every lattice axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Stencil {
    /// `passes` repetitions of `[1, 2, 1] / 4`.
    Binomial { passes: usize },
    /// Sampled Gaussian with standard deviation `std` lattice steps,
    /// truncated at four standard deviations and renormalized.
    Gaussian { std: f64 },
}

impl Stencil {
    /// Tap weights indexed by offset `-h..=h`.
    pub fn taps(&self) -> Result<Vec<f64>> {
        match *self {
            Stencil::Binomial { passes } if passes >= 1 => Ok(binomial_stencil(passes)),
            Stencil::Gaussian { std } if std > 0.0 && std <= 8.0 => Ok(gaussian_stencil(std)),
            other => Err(Error::invalid(format!("unusable blur stencil {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeOptions {
    /// Largest feature dimension accepted by [`FilterLattice::build`].
    pub max_dim: usize,
    /// Builds that would exceed this many vertices fail instead.
    pub max_vertices: usize,
    pub stencil: Stencil,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        LatticeOptions {
            max_dim: DEFAULT_MAX_DIM,
            max_vertices: DEFAULT_MAX_VERTICES,
            stencil: Stencil::Gaussian { std: 1.7 },
        }
    }
}

/// A lattice built for one point set and one kernel width. Reusable for any
/// number of value vectors.
#[derive(Debug, Clone)]
pub struct FilterLattice {
    dim: usize,
    points: usize,
    stencil: Vec<f64>,
    /// `d + 1` vertex indices per point.
    splat_index: Vec<u32>,
    /// `d + 1` barycentric weights per point.
    splat_weight: Vec<f64>,
    /// `1 / sqrt(s_i)` where `s_i` is point `i`'s zero-displacement response.
    norm: Vec<f64>,
    /// Per vertex and axis: the neighbours at stencil offsets, centre excluded.
    neighbours: Vec<u32>,
    vertices: usize,
}

/// Binomial weights of `passes` repetitions of `[1, 2, 1] / 4`, indexed by
/// offset `-passes..=passes`.
fn binomial_stencil(passes: usize) -> Vec<f64> {
    let n = 2 * passes;
    let mut row = vec![1.0f64];
    for _ in 0..n {
        let mut next = vec![0.0; row.len() + 1];
        for (k, &c) in row.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c;
        }
        row = next;
    }
    let total = 4f64.powi(passes as i32);
    row.into_iter().map(|c| c / total).collect()
}

fn gaussian_stencil(std: f64) -> Vec<f64> {
    let h = (4.0 * std).ceil() as i64;
    let raw: Vec<f64> = (-h..=h).map(|k| (-(k * k) as f64 / (2.0 * std * std)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Blur response between two vertices of one simplex whose remainders differ
/// by `m`, on the unbounded lattice.
///
/// An offset `o` of the lattice decomposes as `sum_j n_j u_j` with
/// `u_j = (d + 1) e_j - 1`; the decomposition is unique up to adding a common
/// integer to every `n_j`, and each axis contributes an independent stencil
/// factor. For the offset between remainders `m` apart the base solution has
/// `n_j = -1` on `m` axes and `0` on the rest.
fn simplex_response(dim: usize, stencil: &[f64], m: usize) -> f64 {
    let h = (stencil.len() / 2) as i64;
    let p = |n: i64| -> f64 {
        let idx = n + h;
        if idx < 0 || idx as usize >= stencil.len() {
            0.0
        } else {
            stencil[idx as usize]
        }
    };
    let axes = dim + 1;
    (-h..=h + 1)
        .map(|k| p(k - 1).powi(m as i32) * p(k).powi((axes - m) as i32))
        .sum()
}

/// Embedding scale at which the lattice kernel, normalized by its mean peak
/// over uniformly placed points, has the mass of the target Gaussian.
///
/// A lattice cell has volume `(d + 1)^(d - 1/2)` in the embedded hyperplane
/// and a blurred delta has unit total mass. The mean of `w^T R w` over the
/// uniform distribution on the simplex uses `E[w_k w_l] = (1 + [k = l]) /
/// ((d + 1)(d + 2))`.
fn mass_matched_scale(dim: usize, response: &[f64], sigma: f64) -> f64 {
    let d1 = dim + 1;
    let mut s = 0.0;
    for k in 0..d1 {
        for l in 0..d1 {
            let moment = if k == l { 2.0 } else { 1.0 };
            s += moment * response[k.abs_diff(l)];
        }
    }
    let mean_peak = s / ((d1 * (d1 + 1)) as f64);
    let cell = (d1 as f64).powf(dim as f64 - 0.5);
    let gauss_mass = (std::f64::consts::PI * sigma).powf(dim as f64 / 2.0);
    (cell / (mean_peak * gauss_mass)).powf(1.0 / dim as f64)
}

struct Simplex {
    /// Keys (first `d` coordinates) of the `d + 1` enclosing vertices.
    keys: Vec<i32>,
    weights: Vec<f64>,
}

/// Locates the enclosing simplex of an elevated point.
fn enclosing_simplex(elevated: &[f64], dim: usize) -> Simplex {
    let d1 = dim + 1;
    let df = d1 as f64;
    let mut greedy = vec![0i64; d1];
    let mut rank = vec![0i64; d1];
    let mut sum = 0i64;
    for i in 0..d1 {
        let v = elevated[i] / df;
        let up = v.ceil() * df;
        let down = v.floor() * df;
        greedy[i] = if up - elevated[i] < elevated[i] - down {
            up as i64
        } else {
            down as i64
        };
        sum += greedy[i];
    }
    sum /= d1 as i64;

    for i in 0..dim {
        for j in i + 1..d1 {
            if elevated[i] - (greedy[i] as f64) < elevated[j] - (greedy[j] as f64) {
                rank[i] += 1;
            } else {
                rank[j] += 1;
            }
        }
    }

    let d1i = d1 as i64;
    if sum > 0 {
        for i in 0..d1 {
            if rank[i] >= d1i - sum {
                greedy[i] -= d1i;
                rank[i] += sum - d1i;
            } else {
                rank[i] += sum;
            }
        }
    } else if sum < 0 {
        for i in 0..d1 {
            if rank[i] < -sum {
                greedy[i] += d1i;
                rank[i] += d1i + sum;
            } else {
                rank[i] += sum;
            }
        }
    }

    let mut bary = vec![0.0; d1 + 1];
    for i in 0..d1 {
        let delta = (elevated[i] - greedy[i] as f64) / df;
        bary[dim - rank[i] as usize] += delta;
        bary[d1 - rank[i] as usize] -= delta;
    }
    bary[0] += 1.0 + bary[d1];
    bary.truncate(d1);

    let mut keys = Vec::with_capacity(d1 * dim);
    for remainder in 0..d1i {
        for i in 0..dim {
            let canonical = if rank[i] <= dim as i64 - remainder {
                remainder
            } else {
                remainder - d1i
            };
            keys.push((greedy[i] + canonical) as i32);
        }
    }
    Simplex { keys, weights: bary }
}

fn axis_offset(key: &[i32], axis: usize, dim: usize, step: i32) -> Vec<i32> {
    // Moving along +u_axis adds d at `axis` and -1 elsewhere; only the first
    // d coordinates are stored.
    let mut out: Vec<i32> = key.iter().map(|&k| k - step).collect();
    if axis < dim {
        out[axis] += step * (dim as i32 + 1);
    }
    out
}

impl FilterLattice {
    /// Builds the lattice for `points` (one row per point) and kernel
    /// `exp(-|a - b|^2 / sigma)`.
    pub fn build(points: ArrayView2<'_, f64>, sigma: f64, options: &LatticeOptions) -> Result<Self> {
        let (n, dim) = points.dim();
        if dim > options.max_dim {
            return Err(Error::DimensionTooLarge {
                dim,
                max: options.max_dim,
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!(
                "kernel width must be positive and finite, got {sigma}"
            )));
        }
        if dim == 0 {
            return Err(Error::invalid("points need at least one dimension"));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("non-finite point coordinate"));
        }
        let d1 = dim + 1;
        let stencil = options.stencil.taps()?;
        let half = stencil.len() / 2;
        // The closure of a single vertex already spans a (2h + 1)^d grid.
        if ((2 * half + 1) as f64).powi(dim as i32) > options.max_vertices as f64 {
            return Err(Error::LatticeTooLarge {
                max: options.max_vertices,
            });
        }
        let response: Vec<f64> = (0..d1).map(|m| simplex_response(dim, &stencil, m)).collect();

        // Isometric embedding into the hyperplane, scaled by `scale`.
        let scale = mass_matched_scale(dim, &response, sigma);
        let coord_scale: Vec<f64> = (0..dim).map(|i| scale / (((i + 1) * (i + 2)) as f64).sqrt()).collect();

        let mut table: HashMap<Vec<i32>, u32> = HashMap::new();
        let mut keys: Vec<Vec<i32>> = Vec::new();
        let mut splat_index = Vec::with_capacity(n * d1);
        let mut splat_weight = Vec::with_capacity(n * d1);
        let mut elevated = vec![0.0; d1];

        let intern = |key: Vec<i32>, table: &mut HashMap<Vec<i32>, u32>, keys: &mut Vec<Vec<i32>>| -> u32 {
            if let Some(&idx) = table.get(&key) {
                return idx;
            }
            let idx = keys.len() as u32;
            keys.push(key.clone());
            table.insert(key, idx);
            idx
        };

        for row in points.rows() {
            let mut partial = 0.0;
            for i in (1..=dim).rev() {
                let cf = row[i - 1] * coord_scale[i - 1];
                elevated[i] = partial - i as f64 * cf;
                partial += cf;
            }
            elevated[0] = partial;
            let simplex = enclosing_simplex(&elevated, dim);
            for (r, key) in simplex.keys.chunks(dim).enumerate() {
                splat_index.push(intern(key.to_vec(), &mut table, &mut keys));
                splat_weight.push(simplex.weights[r]);
            }
        }

        // Forward closure: every vertex that can receive mass during the
        // axis blurs, so that the blur is exact.
        for axis in 0..d1 {
            let current = keys.len();
            for v in 0..current {
                if keys.len() > options.max_vertices {
                    return Err(Error::LatticeTooLarge {
                        max: options.max_vertices,
                    });
                }
                for k in 1..=half as i32 {
                    for sign in [-1, 1] {
                        let nk = axis_offset(&keys[v], axis, dim, sign * k);
                        intern(nk, &mut table, &mut keys);
                    }
                }
            }
        }

        let vertices = keys.len();
        let taps = 2 * half;
        let mut neighbours = vec![NONE; vertices * d1 * taps];
        for (v, key) in keys.iter().enumerate() {
            for axis in 0..d1 {
                let mut slot = 0;
                for k in -(half as i32)..=half as i32 {
                    if k == 0 {
                        continue;
                    }
                    if let Some(&idx) = table.get(&axis_offset(key, axis, dim, k)) {
                        neighbours[(v * d1 + axis) * taps + slot] = idx;
                    }
                    slot += 1;
                }
            }
        }

        let norm = splat_weight
            .chunks(d1)
            .map(|w| {
                let mut s = 0.0;
                for k in 0..d1 {
                    for l in 0..d1 {
                        s += w[k] * w[l] * response[k.abs_diff(l)];
                    }
                }
                1.0 / s.sqrt()
            })
            .collect();

        Ok(FilterLattice {
            dim,
            points: n,
            stencil,
            splat_index,
            splat_weight,
            norm,
            neighbours,
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Approximates `out_i = sum_{j != i} exp(-|p_i - p_j|^2 / sigma) v_j`.
    pub fn filter(&self, values: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.points];
        let mut scratch = LatticeScratch::default();
        self.filter_into(values, &mut out, &mut scratch);
        out
    }

    /// Allocation-free variant of [`filter`](Self::filter) for repeated use.
    pub fn filter_into(&self, values: &[f64], out: &mut [f64], scratch: &mut LatticeScratch) {
        assert_eq!(values.len(), self.points, "one value per lattice point");
        assert_eq!(out.len(), self.points, "one output per lattice point");
        let d1 = self.dim + 1;
        scratch.a.clear();
        scratch.a.resize(self.vertices, 0.0);
        scratch.b.clear();
        scratch.b.resize(self.vertices, 0.0);

        for (i, &v) in values.iter().enumerate() {
            let scaled = v * self.norm[i];
            for k in 0..d1 {
                let idx = self.splat_index[i * d1 + k] as usize;
                scratch.a[idx] += self.splat_weight[i * d1 + k] * scaled;
            }
        }

        let (mut src, mut dst) = (&mut scratch.a, &mut scratch.b);
        let half = self.stencil.len() / 2;
        let taps = 2 * half;
        let centre = self.stencil[half];
        let side: Vec<f64> = self
            .stencil
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != half)
            .map(|(_, w)| *w)
            .collect();
        for axis in 0..d1 {
            for v in 0..self.vertices {
                let nb = &self.neighbours[(v * d1 + axis) * taps..(v * d1 + axis + 1) * taps];
                let mut acc = centre * src[v];
                for (w, &idx) in side.iter().zip(nb) {
                    if idx != NONE {
                        acc += w * src[idx as usize];
                    }
                }
                dst[v] = acc;
            }
            std::mem::swap(&mut src, &mut dst);
        }

        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in 0..d1 {
                let idx = self.splat_index[i * d1 + k] as usize;
                acc += self.splat_weight[i * d1 + k] * src[idx];
            }
            *o = acc * self.norm[i] - values[i];
        }
    }
}

/// Reusable vertex buffers for [`FilterLattice::filter_into`].
#[derive(Debug, Default, Clone)]
pub struct LatticeScratch {
    a: Vec<f64>,
    b: Vec<f64>,
}
