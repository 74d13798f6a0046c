//! Property-based checks of the eigensolver over randomized potentials
//! and shears: variational minimality, positivity, and concavity in
//! lambda hold for arbitrary coefficients, not just the curated cases.

use kppfront::eigen::{BoundaryCondition, CrossProblem};
use kppfront::grid::CrossSectionGrid;
use kppfront::models::FlowProfile;
use proptest::prelude::*;

const N: usize = 48;

fn problem(potential: Vec<f64>, shear: f64, robin_q: Option<f64>) -> CrossProblem {
    let grid = CrossSectionGrid::build(1.0, N).unwrap();
    let flow = if shear == 0.0 {
        FlowProfile::zero(&grid)
    } else {
        FlowProfile::cosine(shear, 1, &grid).unwrap()
    };
    let bc = match robin_q {
        Some(q) => BoundaryCondition::Robin(q),
        None => BoundaryCondition::Neumann,
    };
    CrossProblem::new(grid, flow, potential, bc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn principal_pair_is_positive_and_minimal(
        seed_vals in proptest::collection::vec(-2.0_f64..2.0, 5),
        shear in 0.0_f64..1.5,
        lambda in -1.5_f64..1.5,
        q in 0.0_f64..2.0,
    ) {
        // Smooth potential from a short cosine series.
        let grid = CrossSectionGrid::build(1.0, N).unwrap();
        let potential: Vec<f64> = grid
            .nodes()
            .iter()
            .map(|&y| {
                seed_vals
                    .iter()
                    .enumerate()
                    .map(|(m, a)| a * ((m as f64) * std::f64::consts::PI * y).cos())
                    .sum()
            })
            .collect();
        let p = problem(potential, shear, Some(q));
        let pair = p.principal(lambda).unwrap();

        // Positive principal eigenfunction.
        prop_assert!(pair.eigenfunction.iter().all(|&v| v > 0.0));

        // Rayleigh minimality against a handful of deterministic trials.
        for freq in 0..4 {
            let trial: Vec<f64> = grid
                .nodes()
                .iter()
                .map(|&y| 1.0 + 0.5 * ((freq as f64) * std::f64::consts::PI * y).cos())
                .collect();
            let quotient = p.rayleigh(lambda, &trial).unwrap();
            prop_assert!(quotient >= pair.value - 1e-7);
        }

        // Concavity of lambda -> mu(lambda) on a random triple.
        let h = 0.3;
        let lo = p.principal(lambda - h).unwrap().value;
        let hi = p.principal(lambda + h).unwrap().value;
        prop_assert!(lo + hi - 2.0 * pair.value <= 1e-8);
    }
}
