//! Mean-field marginals on a small CRF next to the exact marginals from
//! enumerating all labelings, plus the effect of damping.
//!
//!     cargo run --example mean_field

use ndarray::{array, Array1};
use reid_crf::inference::{
    exact_joint_enumeration, fixed_point_residual, infer_marginals, init_marginals, Backend, InferenceSettings,
};
use reid_crf::potentials::{CrfProblem, ResolvedKernel};

fn main() -> reid_crf::Result<()> {
    // Two tight groups of gallery items in a 2-d feature space.
    let points = array![
        [0.0, 0.0],
        [0.1, 0.0],
        [0.0, 0.15],
        [2.0, 2.0],
        [2.1, 1.9],
        [1.9, 2.2],
        [4.0, 0.0]
    ];
    let unary: Array1<f64> = array![0.3, 1.2, 1.4, 0.9, 2.5, 2.6, 1.0];
    let kernel = ResolvedKernel::new("demo", points, 0.5, 1.0)?;

    for alpha in [0.0, 0.5, 2.0] {
        let problem = CrfProblem::new(unary.clone(), vec![kernel.clone()], alpha)?;
        let result = infer_marginals(&problem, &InferenceSettings::default())?;
        let exact = exact_joint_enumeration(&problem)?;
        println!(
            "alpha {alpha}: {} sweeps, converged {}, residual {:.1e}",
            result.iterations,
            result.converged,
            fixed_point_residual(&problem, &result.marginals)?
        );
        println!("  init        {}", fmt(&init_marginals(&problem).q));
        println!("  mean field  {}", fmt(&result.marginals.q));
        println!("  exact       {}", fmt(&exact));
    }

    let problem = CrfProblem::new(unary, vec![kernel], 6.0)?;
    println!("\nstrong coupling (alpha 6):");
    for damping in [0.0, 0.3, 0.6] {
        let settings = InferenceSettings {
            damping,
            backend: Backend::Exact,
            ..InferenceSettings::default()
        };
        let r = infer_marginals(&problem, &settings)?;
        println!(
            "  damping {damping}: {:>3} sweeps, converged {}",
            r.iterations, r.converged
        );
    }
    Ok(())
}

fn fmt(q: &[f64]) -> String {
    q.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}
