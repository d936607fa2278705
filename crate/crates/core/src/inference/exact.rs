use ndarray::ArrayView2;

use crate::potentials::squared_distance;

/// `out_i = sum_{j != i} exp(-|p_i - p_j|^2 / sigma) v_j` by the double loop.
pub fn exact_filter(points: ArrayView2<'_, f64>, values: &[f64], sigma: f64) -> Vec<f64> {
    let n = points.nrows();
    assert_eq!(values.len(), n, "one value per point");
    (0..n)
        .map(|i| {
            let pi = points.row(i);
            let mut acc = 0.0;
            for (j, v) in values.iter().enumerate() {
                if j != i {
                    acc += (-squared_distance(pi, points.row(j)) / sigma).exp() * v;
                }
            }
            acc
        })
        .collect()
}
