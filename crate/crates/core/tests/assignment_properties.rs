use qdetect::assignment::{
    assignment_probs, check_c1, check_c2, check_c3, cz_property_check, detection_form_equality, joint_distribution,
    simulation_equalities,
};
use qdetect::observables::complement;
use qdetect::random::{self, CommonBasis};
use qdetect::{DensityOperator, Projection, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn proj(name: &str, b: &CommonBasis, k: usize) -> Projection {
    Projection::new(name, b.projection(k), &tol()).unwrap()
}

fn density(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let rank = rng.random_range(1..=dim);
    DensityOperator::new("rho", random::density(rng, dim, rank), &tol()).unwrap()
}

/// `T`, `E` detecting in `ρ`, plus further projections diagonal in the same basis.
fn detecting_setup(rng: &mut ChaCha8Rng, extra: usize) -> Option<(CommonBasis, DensityOperator)> {
    let dim = rng.random_range(2..=16);
    let b = random::common_basis(rng, dim, 2 + extra);
    let rho = random::density_in(rng, &b.agreement(0, 1))?;
    Some((b, DensityOperator::new("rho", rho, &tol()).unwrap()))
}

#[test]
fn sandwich_matches_joint_atom_mass_for_commuting_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..1000 {
        let dim = rng.random_range(2..=16);
        let b = random::common_basis(&mut rng, dim, 2);
        let (e, f) = (proj("E", &b, 0), proj("F", &b, 1));
        let rho = density(&mut rng, dim);
        let ap = assignment_probs(&e, &f, &rho, &tol()).unwrap();
        let d = joint_distribution(&[&e, &f], &rho, &tol()).unwrap();
        assert!((ap.p_e_and_f - d.mass(&[(0, true), (1, true)])).abs() <= 4e-10);
        assert!((ap.p_eprime_and_f - d.mass(&[(0, false), (1, true)])).abs() <= 4e-10);
        assert!(check_c1(&e, &f, &rho, &tol()).unwrap().pass);
    }
}

#[test]
fn additivity_over_orthogonal_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let dim = rng.random_range(2..=16);
        // Disjoint spectral slices of one random basis.
        let u = random::unitary(&mut rng, dim);
        let parts = rng.random_range(1..=dim.min(4));
        let labels: Vec<usize> = (0..dim).map(|_| rng.random_range(0..=parts)).collect();
        let family: Vec<Projection> = (0..parts)
            .map(|p| {
                let m: Vec<f64> = labels.iter().map(|&l| if l == p { 1.0 } else { 0.0 }).collect();
                Projection::new(format!("F{p}"), random::with_spectrum(&u, &m), &tol()).unwrap()
            })
            .collect();
        let rank = rng.random_range(0..=dim);
        let e = Projection::new("E", random::projection(&mut rng, dim, rank), &tol()).unwrap();
        let rho = density(&mut rng, dim);
        let refs: Vec<&Projection> = family.iter().collect();
        let c = check_c2(&e, &refs, &rho, &tol()).unwrap();
        assert!(c.residual <= 4e-10, "{}", c.residual);
    }
}

#[test]
fn consistency_condition_holds_under_detection() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let mut n = 0;
    while n < 1000 {
        let Some((b, rho)) = detecting_setup(&mut rng, 1) else {
            continue;
        };
        let (t, e, f) = (proj("T", &b, 0), proj("E", &b, 1), proj("F", &b, 2));
        assert!(check_c3(&e, &f, &rho, &tol()).unwrap().pass);
        assert!(detection_form_equality(&t, &e, &f, &rho, &tol()).unwrap().pass);
        n += 1;
    }
}

#[test]
fn detection_form_equality_for_f_commuting_only_with_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut n = 0;
    while n < 1000 {
        let dim = rng.random_range(2..=10);
        let b = random::common_basis(&mut rng, dim, 2);
        let Some(rho) = random::density_in(&mut rng, &b.agreement(0, 1)) else {
            continue;
        };
        let rho = DensityOperator::new("rho", rho, &tol()).unwrap();
        let (t, e) = (proj("T", &b, 0), proj("E", &b, 1));
        // F = T G T + T' H T' with G, H random projections inside the two
        // eigenspaces of T, so F commutes with T but generally not with E.
        let tm = t.matrix();
        let tc = complement(&t);
        let inside = |space: &qdetect::CMatrix, rng: &mut ChaCha8Rng| {
            let rank = rng.random_range(0..=dim);
            let g = random::projection(rng, dim, rank);
            // Eigenvectors of P G P with large eigenvalue lie in range(P).
            let m = space.mul(&g).unwrap().mul(space).unwrap();
            m.eigh(&tol()).unwrap().projector_onto(|l| l > 0.5)
        };
        let f = inside(tm, &mut rng).add(&inside(tc.matrix(), &mut rng)).unwrap();
        let Ok(f) = Projection::new("F", f, &tol()) else {
            continue;
        };
        let c = detection_form_equality(&t, &e, &f, &rho, &tol()).unwrap();
        assert!(c.pass, "{c:?}");
        assert!(check_c3(&e, &f, &rho, &tol()).unwrap().pass);
        n += 1;
    }
}

#[test]
fn conditional_statistics_are_simulated_by_the_detector() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let mut n = 0;
    while n < 1000 {
        let Some((b, rho)) = detecting_setup(&mut rng, 3) else {
            continue;
        };
        let (t, e) = (proj("T", &b, 0), proj("E", &b, 1));
        let fs: Vec<Projection> = (2..5).map(|k| proj(&format!("F{k}"), &b, k)).collect();
        let refs: Vec<&Projection> = fs.iter().collect();
        for s in simulation_equalities(&t, &e, &rho, &refs, &tol()).unwrap() {
            assert!(s.holds, "{s:?}");
        }
        n += 1;
    }
}

#[test]
fn conditional_functional_properties_for_subprojections() {
    let mut rng = ChaCha8Rng::seed_from_u64(46);
    let mut n = 0;
    while n < 300 {
        let Some((b, rho)) = detecting_setup(&mut rng, 0) else {
            continue;
        };
        let (t, e) = (proj("T", &b, 0), proj("E", &b, 1));
        if rho.expectation(e.matrix()).unwrap().re < 1e-3 {
            continue;
        }
        // Sub-projections of E built from its eigenvectors, so F ≤ E and [F, T] = 0.
        let mask_e = &b.masks[1];
        let sample: Vec<Projection> = (0..4)
            .map(|k| {
                let m: Vec<f64> = mask_e
                    .iter()
                    .map(|&x| if x == 1.0 && rng.random_bool(0.5) { 1.0 } else { 0.0 })
                    .collect();
                Projection::new(format!("F{k}"), random::with_spectrum(&b.u, &m), &tol()).unwrap()
            })
            .collect();
        let refs: Vec<&Projection> = sample.iter().collect();
        let cz = cz_property_check(&t, &e, &rho, &refs, &tol()).unwrap();
        assert!(cz.pass, "{cz:?}");
        assert_eq!(cz.ratio_members, 4);
        n += 1;
    }
}
