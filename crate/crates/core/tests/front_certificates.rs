//! Discrete sub/super-solution certificates for the front barriers:
//! the k-uniform constants must produce an ordered, sign-correct pair
//! for every family member and for the Robin limit, including with
//! shear.

use kppfront::eigen::CrossProblem;
use kppfront::front::{
    build_auxiliary_rates, build_front_context, build_subsupersolutions, solve_front,
    verify_ordered_pair, FrontProblem, FrontVariant,
};
use kppfront::grid::{CrossSectionGrid, CylinderGrid};
use kppfront::models::{FamilySpec, FlowProfile, ReactionModel};

struct Setup {
    ctx: kppfront::front::FrontContext,
    family: FamilySpec,
    flow_amplitude: f64,
    ks: Vec<u32>,
}

fn build_setup(ks: &[u32], flow_amplitude: f64) -> Setup {
    let family = FamilySpec::Quadratic { q: 1.0 };
    let make_flow = |grid: &CrossSectionGrid| {
        if flow_amplitude == 0.0 {
            FlowProfile::zero(grid)
        } else {
            FlowProfile::cosine(flow_amplitude, 1, grid).unwrap()
        }
    };

    let ref_grid = CrossSectionGrid::build(1.0, 512).unwrap();
    let reaction = ReactionModel::linear(vec![2.0; ref_grid.num_nodes()], &ref_grid).unwrap();
    let robin = CrossProblem::robin(
        ref_grid.clone(),
        make_flow(&ref_grid),
        1.0,
        reaction.fprime0_samples(),
    )
    .unwrap();
    let disp = kppfront::dispersion::minimal_speed(&robin, 50.0).unwrap();
    let c = disp.c_star + 0.5;

    let member_problems: Vec<(u32, CrossProblem)> = ks
        .iter()
        .map(|&k| {
            let n = family.resolution_for(k, 1.0);
            let grid = CrossSectionGrid::build(1.0, n).unwrap();
            let member = family.member(k, &grid).unwrap();
            let fp = vec![2.0; grid.num_nodes()];
            (
                k,
                CrossProblem::interior_loss(grid.clone(), make_flow(&grid), &member.loss, &fp)
                    .unwrap(),
            )
        })
        .collect();

    let ctx = build_front_context(c, 1.0, &reaction, &robin, &member_problems, 50.0).unwrap();
    Setup { ctx, family, flow_amplitude, ks: ks.to_vec() }
}

fn front_for(setup: &Setup, k: Option<u32>) -> FrontProblem {
    let cons = &setup.ctx.constants;
    let a = cons.suggested_half_length().ceil();
    let m = ((2.0 * a / 0.5).ceil() as usize).next_multiple_of(8);
    let n = match k {
        Some(k) => setup.family.resolution_for(k, 1.0),
        None => 512,
    };
    let grid = CrossSectionGrid::build(1.0, n).unwrap();
    let flow = if setup.flow_amplitude == 0.0 {
        FlowProfile::zero(&grid)
    } else {
        FlowProfile::cosine(setup.flow_amplitude, 1, &grid).unwrap()
    };
    let reaction = ReactionModel::linear(vec![2.0; grid.num_nodes()], &grid).unwrap();
    let variant = match k {
        Some(k) => FrontVariant::InteriorLoss(setup.family.member(k, &grid).unwrap()),
        None => FrontVariant::RobinLimit,
    };
    let cyl = CylinderGrid::build(a, m, grid).unwrap();
    FrontProblem::new(cyl, flow, reaction, cons.c, 1.0, 1.0, variant).unwrap()
}

#[test]
fn certificates_hold_uniformly_across_the_family() {
    let setup = build_setup(&[8, 16], 0.0);
    let cons = &setup.ctx.constants;
    // The k-uniform constraints of the construction.
    assert!(cons.eta < cons.beta && cons.eta < cons.lambda_inf);
    assert!(cons.eps_margin > 0.0 && cons.gamma > 1.0 && cons.delta > 0.0);
    for member in &setup.ctx.members {
        assert!(member.eps_k > 0.0, "eps_k not positive at k = {:?}", member.k);
    }

    for k in setup.ks.iter().map(|&k| Some(k)).chain([None]) {
        let barriers = build_subsupersolutions(&setup.ctx, k).unwrap();
        let front = front_for(&setup, k);
        let cert = verify_ordered_pair(&front, &barriers).unwrap();
        assert!(cert.pass, "certificate failed at k = {k:?}: {cert:?}");
        assert!(cert.checked_sub_t > 0 && cert.checked_sub_y > 0, "empty positive set");
        assert!(cert.ordering_margin <= 1e-12, "barriers out of order at k = {k:?}");
    }
}

#[test]
fn certificates_hold_with_shear() {
    let setup = build_setup(&[8], 0.5);
    for k in [Some(8), None] {
        let barriers = build_subsupersolutions(&setup.ctx, k).unwrap();
        let front = front_for(&setup, k);
        let cert = verify_ordered_pair(&front, &barriers).unwrap();
        assert!(cert.pass, "sheared certificate failed at k = {k:?}: {cert:?}");
    }
}

/// The solved member front stays inside its barrier corridor, and the
/// solution is sandwiched between sub- and super-solution on the tail.
#[test]
fn solved_front_respects_the_corridor() {
    let setup = build_setup(&[8], 0.0);
    let barriers = build_subsupersolutions(&setup.ctx, Some(8)).unwrap();
    let front = front_for(&setup, Some(8));
    let profile = solve_front(&front, &barriers).unwrap();
    let ny = front.grid.cross().num_nodes();
    for (i, &x) in front.grid.xs().iter().enumerate() {
        for j in 0..ny {
            let t = profile.t[i * ny + j];
            assert!(t <= barriers.t_bar(x, j) + 1e-9, "T above super at ({x}, {j})");
            assert!(t >= barriers.t_under(x, j) - 1e-9, "T below sub at ({x}, {j})");
            let y = profile.y[i * ny + j];
            assert!(y >= barriers.y_under(x, j) - 1e-9 && y <= 1.0 + 1e-12);
        }
    }
}

/// The auxiliary decay rate beta satisfies its defining inequality
/// rho(beta Le) - beta^2 + c beta Le > 0 with a recorded margin.
#[test]
fn auxiliary_rates_satisfy_their_inequality() {
    let grid = CrossSectionGrid::build(1.0, 256).unwrap();
    let flow = FlowProfile::zero(&grid);
    let fp = vec![2.0; grid.num_nodes()];
    let robin = CrossProblem::robin(grid.clone(), flow.clone(), 1.0, &fp).unwrap();
    let disp = kppfront::dispersion::minimal_speed(&robin, 50.0).unwrap();
    let c = disp.c_star + 0.5;
    let plain = CrossProblem::new(
        grid.clone(),
        flow,
        vec![0.0; grid.num_nodes()],
        kppfront::eigen::BoundaryCondition::Neumann,
    )
    .unwrap();
    for le in [0.5, 1.0, 2.0] {
        let rates = build_auxiliary_rates(c, le, &plain, disp.lambda_star).unwrap();
        let rho = plain.principal(rates.beta * le).unwrap().value;
        let margin = rho - rates.beta * rates.beta + c * rates.beta * le;
        assert!(margin > 0.0, "Le = {le}: margin {margin}");
        assert!(rates.chi_min > 0.0 && rates.chi_min <= 1.0);
    }
}
