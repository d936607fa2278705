use crate::error::{Error, Result};
use crate::potentials::CrfProblem;

pub const MAX_ENUMERATION_NODES: usize = 20;

/// True marginals `P(x_i = 1)` of the joint distribution, by visiting all
/// `2^N` labellings in Gray-code order.
///
/// The energy of a labelling is `sum_i u_i x_i + alpha sum_{i<j} kappa(i, j)
/// [x_i != x_j]`. A first pass finds the minimum energy and a second pass
/// accumulates `exp(E_min - E)`, so no term overflows.
pub fn exact_joint_enumeration(problem: &CrfProblem) -> Result<Vec<f64>> {
    let n = problem.len();
    if n > MAX_ENUMERATION_NODES {
        return Err(Error::TooManyNodes {
            nodes: n,
            max: MAX_ENUMERATION_NODES,
        });
    }
    let mut kappa = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let k = problem.alpha * problem.similarity_unchecked(i, j);
            kappa[i * n + j] = k;
            kappa[j * n + i] = k;
        }
    }
    let row_sum: Vec<f64> = kappa.chunks(n).map(|r| r.iter().sum()).collect();
    let u = problem.unary_cost.as_slice().expect("contiguous unary vector");

    let walk = |visit: &mut dyn FnMut(u64, f64)| {
        let mut state = 0u64;
        let mut energy = 0.0;
        // active[k] = alpha * sum_j kappa(k, j) [x_j = 1]
        let mut active = vec![0.0; n];
        visit(state, energy);
        for step in 1u64..(1u64 << n) {
            let k = step.trailing_zeros() as usize;
            let on = state & (1 << k) == 0;
            let delta = u[k] + row_sum[k] - 2.0 * active[k];
            let sign = if on { 1.0 } else { -1.0 };
            energy += sign * delta;
            state ^= 1 << k;
            let row = &kappa[k * n..(k + 1) * n];
            for (a, kv) in active.iter_mut().zip(row) {
                *a += sign * kv;
            }
            visit(state, energy);
        }
    };

    let mut min_energy = f64::INFINITY;
    walk(&mut |_, e| min_energy = min_energy.min(e));

    let mut z = 0.0;
    let mut on_mass = vec![0.0; n];
    walk(&mut |state, e| {
        let w = (min_energy - e).exp();
        z += w;
        let mut bits = state;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            on_mass[i] += w;
            bits &= bits - 1;
        }
    });
    Ok(on_mass.into_iter().map(|m| m / z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::ResolvedKernel;
    use ndarray::{array, Array1, Array2};

    #[test]
    fn symmetric_pair_is_one_half() {
        let k = ResolvedKernel::new("f", array![[0.0], [0.3]], 1.0, 1.0).unwrap();
        for alpha in [0.0, 0.5, 7.0] {
            let p = CrfProblem::new(array![0.0, 0.0], vec![k.clone()], alpha).unwrap();
            let m = exact_joint_enumeration(&p).unwrap();
            assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_zero_is_logistic() {
        let u = array![0.1, 1.3, 2.2, 0.0, 4.0];
        let k = ResolvedKernel::new("f", Array2::from_shape_fn((5, 2), |(i, j)| (i + j) as f64), 1.0, 1.0).unwrap();
        let p = CrfProblem::new(u.clone(), vec![k], 0.0).unwrap();
        let m = exact_joint_enumeration(&p).unwrap();
        for (mi, ui) in m.iter().zip(&u) {
            assert!((mi - 1.0 / (1.0 + ui.exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn too_many_nodes() {
        let p = CrfProblem::new(Array1::zeros(21), vec![], 1.0).unwrap();
        assert!(matches!(
            exact_joint_enumeration(&p),
            Err(Error::TooManyNodes { nodes: 21, max: 20 })
        ));
    }

    #[test]
    fn large_costs_do_not_overflow() {
        let k = ResolvedKernel::new("f", array![[0.0], [0.0], [0.0]], 1.0, 1.0).unwrap();
        let p = CrfProblem::new(array![900.0, 0.0, 1200.0], vec![k], 500.0).unwrap();
        let m = exact_joint_enumeration(&p).unwrap();
        assert!(m.iter().all(|x| x.is_finite() && (0.0..=1.0).contains(x)));
    }
}
