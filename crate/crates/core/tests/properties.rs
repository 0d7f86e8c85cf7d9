use chen_bounds::ambient::{ambient_curvature, curvature_component, validate_ambient, CurvatureTerm, FCoefficients};
use chen_bounds::forge::{
    forge_instance, make_ambient, make_equality_basic, make_equality_delta, DeltaBlockSpec, Family, FrameKind, GeneratorSpec,
};
use chen_bounds::inequalities::{detect_equality_form_basic, detect_equality_form_delta, CheckMode, InequalityContext, Tolerances};
use chen_bounds::invariants::{enumerate_tuples, CurvatureTable, SearchBudget, TupleSpec, Witness};
use chen_bounds::linalg::{
    gram_error, min_eigenvalue, orthonormalize, random_orthogonal, random_unit, rng_from_seed, Subspace, SymOp, Vector,
};
use chen_bounds::submanifold::SubmanifoldPoint;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

fn f_strategy() -> impl Strategy<Value = FCoefficients> {
    prop::array::uniform7(-1.0f64..1.0).prop_map(FCoefficients::from_array)
}

/// n in 3..=5, m in n..=5, either mode, either frame.
fn spec_strategy() -> impl Strategy<Value = GeneratorSpec> {
    (3usize..=5, 0usize..3, any::<bool>(), any::<bool>(), any::<bool>(), f_strategy(), any::<u64>(), 0.1f64..2.0).prop_map(
        |(n, dm, general, twisted, conjugate, f, seed, scale)| {
            let m = (n + dm).min(5);
            let mut spec = if general { GeneratorSpec::general(m, n, f, seed) } else { GeneratorSpec::sasakian(m, n, seed) };
            spec.frame = if twisted { FrameKind::Twisted } else { FrameKind::Adapted };
            spec.conjugate = conjugate;
            spec.sigma_scale = scale;
            spec
        },
    )
}

fn instance() -> impl Strategy<Value = SubmanifoldPoint> {
    spec_strategy().prop_map(|s| forge_instance(&s).expect("valid spec"))
}

fn sym_strategy(n: usize) -> impl Strategy<Value = SymOp> {
    prop::collection::vec(-5.0f64..5.0, n * n)
        .prop_map(move |v| SymOp::new(DMatrix::from_vec(n, n, v)).expect("square"))
}

fn unit(n: usize, i: usize) -> Vector {
    Subspace::coordinate(n, &[i]).vector(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_subspaces_are_orthonormal(d in 2usize..10, k in 1usize..10, seed in any::<u64>()) {
        let k = k.min(d);
        let q = random_orthogonal(d, seed);
        let s = Subspace::from_orthonormal(q.columns(0, k).into_owned()).unwrap();
        prop_assert!(gram_error(s.basis()) <= 1e-12);
        prop_assert!(gram_error(s.complement().basis()) <= 1e-12);
    }

    #[test]
    fn min_eigenvalue_bounded_by_max(a in (1usize..8).prop_flat_map(sym_strategy)) {
        prop_assert!(min_eigenvalue(&a) + min_eigenvalue(&a.scale(-1.0)) <= 1e-12);
    }

    #[test]
    fn orthonormalize_is_idempotent(vs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 6), 1..5)) {
        let vs: Vec<Vector> = vs.into_iter().map(Vector::from_vec).collect();
        if let Ok(s) = orthonormalize(&vs) {
            let again = orthonormalize(&s.vectors()).unwrap();
            prop_assert!((again.basis() - s.basis()).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn ambient_curvature_symmetries(spec in spec_strategy(), seed in any::<u64>()) {
        let a = make_ambient(&spec).unwrap();
        prop_assert!(validate_ambient(&a).is_empty());
        let mut rng = rng_from_seed(seed);
        let d = a.dim();
        let [x, y, z, w, x2] = [0; 5].map(|_| random_unit(&mut rng, d));
        for term in CurvatureTerm::ALL {
            let r = |x: &Vector, y: &Vector, z: &Vector, w: &Vector| curvature_component(&a, term, x, y, z).unwrap().dot(w);
            let v = r(&x, &y, &z, &w);
            prop_assert!((v + r(&y, &x, &z, &w)).abs() <= 1e-10, "{term:?} antisymmetry in X, Y");
            prop_assert!((v + r(&x, &y, &w, &z)).abs() <= 1e-10, "{term:?} antisymmetry in Z, W");
            prop_assert!((v - r(&z, &w, &x, &y)).abs() <= 1e-10, "{term:?} pair symmetry");
        }
        let (s, t) = (0.7, -1.3);
        let lin = ambient_curvature(&a, &(&x * s + &x2 * t), &y, &z, &w).unwrap();
        let sep = s * ambient_curvature(&a, &x, &y, &z, &w).unwrap() + t * ambient_curvature(&a, &x2, &y, &z, &w).unwrap();
        prop_assert!(close(lin, sep, 1e-10));
    }

    #[test]
    fn undivided_form_matches_r5_difference(f in prop::array::uniform6(-1.0f64..1.0), seed in any::<u64>()) {
        let coeffs = FCoefficients::undivided(f[0], f[1], f[2], f[3], f[4], f[5]);
        let mut spec = GeneratorSpec::general(4, 3, coeffs, seed);
        spec.conjugate = true;
        let a = make_ambient(&spec).unwrap();
        let mut rng = rng_from_seed(seed);
        let [x, y, z, w] = [0; 4].map(|_| random_unit(&mut rng, a.dim()));
        let total = ambient_curvature(&a, &x, &y, &z, &w).unwrap();
        let mut by_hand = 0.0;
        for (term, c) in [
            (CurvatureTerm::R1, f[0]),
            (CurvatureTerm::R2, f[1]),
            (CurvatureTerm::R3, f[2]),
            (CurvatureTerm::R4, f[3]),
            (CurvatureTerm::R6, f[5]),
        ] {
            by_hand += c * curvature_component(&a, term, &x, &y, &z).unwrap().dot(&w);
        }
        let r5 = curvature_component(&a, CurvatureTerm::R51, &x, &y, &z).unwrap()
            - curvature_component(&a, CurvatureTerm::R52, &x, &y, &z).unwrap();
        by_hand += f[4] * r5.dot(&w);
        prop_assert!(close(total, by_hand, 1e-12));
    }

    #[test]
    fn gauss_equation_term_by_term(s in instance()) {
        let n = s.n();
        let t = s.tangent_frame();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (ei, ej) = (t.column(i).into_owned(), t.column(j).into_owned());
                let mut expected = ambient_curvature(s.ambient(), &ei, &ej, &ej, &ei).unwrap();
                for a in s.shape_operators().iter() {
                    expected += a.get(i, i) * a.get(j, j) - a.get(i, j).powi(2);
                }
                let got = s.induced_curvature(&ei, &ej, &ej, &ei).unwrap();
                prop_assert!(close(got, expected, 1e-10), "K(e{i}, e{j}) = {got}, expected {expected}");
            }
        }
    }

    #[test]
    fn sigma_round_trips(s in instance()) {
        let free = s.sigma_free();
        for (r, m) in free.iter().enumerate() {
            prop_assert_eq!(s.sigma(r).matrix(), m);
        }
        let rebuilt = s.with_sigma_free(&free).unwrap();
        prop_assert_eq!(rebuilt.sigma_free(), free);
    }

    #[test]
    fn tangent_rotation_covariance(s in instance(), seed in any::<u64>()) {
        let q = random_orthogonal(s.n(), seed);
        let r = s.rotate_tangent(&q).unwrap();
        let (ts, tr) = (CurvatureTable::new(&s).scalar_curvature(), CurvatureTable::new(&r).scalar_curvature());
        prop_assert!(close(ts, tr, 1e-10));
        prop_assert!(close(s.sigma_norm_sq(), r.sigma_norm_sq(), 1e-10));
        prop_assert!(close(s.mean_curvature().norm_sq, r.mean_curvature().norm_sq, 1e-10));
        prop_assert!(close(s.tangential_h().trace(), r.tangential_h().trace(), 1e-10));
        prop_assert!(close(s.tangential_h().norm_sq(), r.tangential_h().norm_sq(), 1e-10));
    }

    #[test]
    fn mean_curvature_scales_quadratically(n in 3usize..=5, seed in any::<u64>(), t in -3.0f64..3.0) {
        let s = forge_instance(&GeneratorSpec::sasakian(5, n, seed)).unwrap();
        let scaled: Vec<DMatrix<f64>> = s.sigma_free().into_iter().map(|m| m * t).collect();
        let r = s.with_sigma_free(&scaled).unwrap();
        prop_assert!(close(r.mean_curvature().norm_sq, t * t * s.mean_curvature().norm_sq, 1e-12));
    }

    #[test]
    fn subspace_invariants_ignore_rebasing(s in instance(), seed in any::<u64>(), k in 2usize..=5) {
        let n = s.n();
        let k = k.min(n);
        let table = CurvatureTable::new(&s);
        let q = random_orthogonal(n, seed);
        let l = Subspace::from_orthonormal(q.columns(0, k).into_owned()).unwrap();
        let l2 = l.rotated(&random_orthogonal(k, seed ^ 1)).unwrap();
        let pi = Subspace::from_orthonormal(q.columns(0, 2).into_owned()).unwrap();
        let pi2 = pi.rotated(&random_orthogonal(2, seed ^ 2)).unwrap();
        prop_assert!(close(table.sectional_curvature(&pi).unwrap(), table.sectional_curvature(&pi2).unwrap(), 1e-10));
        prop_assert!(close(table.subspace_scalar_curvature(&l).unwrap(), table.subspace_scalar_curvature(&l2).unwrap(), 1e-10));
        let u = q.column(0).into_owned();
        prop_assert!(close(table.k_ricci(&l, &u).unwrap(), table.k_ricci(&l2, &u).unwrap(), 1e-10));
    }

    #[test]
    fn tau_is_half_ricci_trace(s in instance()) {
        let table = CurvatureTable::new(&s);
        prop_assert!(close(table.scalar_curvature(), 0.5 * table.ricci_tensor().trace(), 1e-10));
    }

    #[test]
    fn tau_averages_over_coordinate_planes(s in instance(), k in 2usize..=5) {
        let n = s.n();
        let k = k.min(n);
        let table = CurvatureTable::new(&s);
        let mut sum = 0.0;
        let mut subsets = 0usize;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let axes: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            sum += table.subspace_scalar_curvature(&Subspace::coordinate(n, &axes)).unwrap();
            subsets += 1;
        }
        let choose = |a: usize, b: usize| (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1));
        prop_assert_eq!(subsets, choose(n, k));
        prop_assert!(close(table.scalar_curvature(), sum / choose(n - 2, k - 2) as f64, 1e-10));
    }

    #[test]
    fn delta_dominates_coordinate_tuples_and_tilde(s in instance(), seed in any::<u64>()) {
        let n = s.n();
        let table = CurvatureTable::new(&s);
        let budget = SearchBudget { samples: 256, multistarts: 4, seed, ..SearchBudget::default() };
        for t in enumerate_tuples(n).into_iter().filter(|t| !t.is_empty()) {
            let (d, dt) = table.delta_pair(&t, &budget).unwrap();
            prop_assert!(d.value >= dt.value, "delta {} < tilde {} for {t}", d.value, dt.value);
            let mut c = 0;
            let mut aligned = 0.0;
            for &dim in t.dims() {
                aligned += table.subspace_scalar_curvature(&Subspace::coordinate(n, &(c..c + dim).collect::<Vec<_>>())).unwrap();
                c += dim;
            }
            prop_assert!(d.value >= table.scalar_curvature() - aligned - 1e-10);
            if let Witness::Tuple(ls) = &d.witness {
                prop_assert_eq!(ls.len(), t.k());
            }
        }
    }

    #[test]
    fn scalar_curvature_identity_holds(s in instance()) {
        let r = InequalityContext::new(&s, Tolerances::default()).scalar_curvature_identity();
        prop_assert!((r.lhs - r.rhs).abs() <= 1e-9 * (1.0 + r.lhs.abs()));
        prop_assert!(r.equality);
    }

    #[test]
    fn chen_slack_is_smallest_at_inf_witness(n in 3usize..=5, seed in any::<u64>(), kappa_seed in 0u8..3) {
        // f4 = f51 = f52 = 0, so the bound does not depend on the plane.
        let f = FCoefficients::from_array([1.0 + kappa_seed as f64, 0.4, -0.3, 0.0, 0.0, 0.0, 0.2]);
        let s = forge_instance(&GeneratorSpec::general(5, n, f, seed)).unwrap();
        let ctx = InequalityContext::new(&s, Tolerances::default());
        let inf = ctx.table().inf_sectional(&SearchBudget::with_seed(seed));
        let Witness::Plane(pi) = inf.witness else { panic!("plane witness expected") };
        let at_witness = ctx.chen_first(&pi).unwrap().slack;
        for i in 0..16u64 {
            let q = random_orthogonal(n, seed.wrapping_add(i));
            let p = Subspace::from_orthonormal(q.columns(0, 2).into_owned()).unwrap();
            prop_assert!(at_witness <= ctx.chen_first(&p).unwrap().slack + 1e-9);
        }
    }

    #[test]
    fn conservative_reports_carry_no_flags(s in instance(), seed in any::<u64>()) {
        let ctx = InequalityContext::new(&s, Tolerances::default());
        let budget = SearchBudget { samples: 128, multistarts: 2, seed, ..SearchBudget::default() };
        for k in 2..=s.n() {
            let r = ctx.theta_bound(k, &budget).unwrap();
            if r.mode == CheckMode::Conservative {
                prop_assert!(!r.equality && !r.violated());
            }
            if r.equality {
                prop_assert!(r.slack.abs() <= r.tolerances.eq_tol);
            }
        }
    }

    #[test]
    fn sasakian_ricci_equality_on_null_space(n in 3usize..=5, seed in any::<u64>()) {
        let s = forge_instance(&GeneratorSpec::sasakian(5, n, seed)).unwrap();
        // Minimal, with e_1 in the relative null space.
        let free: Vec<DMatrix<f64>> = s
            .sigma_free()
            .into_iter()
            .map(|mut a| {
                a.row_mut(0).fill(0.0);
                a.column_mut(0).fill(0.0);
                let shift = a.trace() / (n - 1) as f64;
                for k in 1..n {
                    a[(k, k)] -= shift;
                }
                a
            })
            .collect();
        let s = s.with_sigma_free(&free).unwrap();
        prop_assert!(s.mean_curvature().norm_sq <= 1e-24);
        let null = s.relative_null_space();
        prop_assert!(null.residual(&unit(n, 0)) <= 1e-9);
        let ctx = InequalityContext::new(&s, Tolerances::default());
        for u in null.vectors() {
            let r = ctx.ricci_bound(&u).unwrap();
            prop_assert!((r.lhs - (n - 1) as f64 * s.ambient().f().f1).abs() <= 1e-9);
        }
    }

    #[test]
    fn basic_equality_round_trip(n in 3usize..=5, seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let amb = make_ambient(&GeneratorSpec::sasakian(5, n, seed)).unwrap();
        let others = 10 - n - 1;
        let mut rng = rng_from_seed(seed);
        let cs: Vec<f64> = (0..others).map(|_| rng.random_range(-0.7..0.7)).collect();
        let ds: Vec<f64> = (0..others).map(|_| rng.random_range(-0.3..0.3)).collect();
        let s = make_equality_basic(&amb, n, a, b, &cs, &ds).unwrap();
        let pi = Subspace::coordinate(n, &[0, 1]);
        let tol = Tolerances::default();
        prop_assert!(InequalityContext::new(&s, tol).chen_first(&pi).unwrap().slack.abs() <= 1e-9);
        prop_assert!(detect_equality_form_basic(&s, &pi, tol.form_tol).unwrap().matched);
        let p = s.perturbed(0, 0, n - 1, 0.1).unwrap();
        prop_assert!(!detect_equality_form_basic(&p, &pi, tol.form_tol).unwrap().matched);
    }

    #[test]
    fn delta_equality_round_trip(n in 3usize..=5, seed in any::<u64>(), pick in 0usize..8) {
        let amb = make_ambient(&GeneratorSpec::sasakian(5, n, seed)).unwrap();
        let tuples: Vec<TupleSpec> = enumerate_tuples(n).into_iter().filter(|t| !t.is_empty()).collect();
        let t = &tuples[pick % tuples.len()];
        let s = make_equality_delta(&amb, n, t, &DeltaBlockSpec::random(t, 10 - n, 1.0, seed)).unwrap();
        let tol = Tolerances::default();
        let mut c = 0;
        let blocks: Vec<Subspace> = t
            .dims()
            .iter()
            .map(|&d| {
                c += d;
                Subspace::coordinate(n, &(c - d..c).collect::<Vec<_>>())
            })
            .collect();
        prop_assert!(InequalityContext::new(&s, tol).delta_tuple(t, &blocks).unwrap().slack.abs() <= 1e-9);
        prop_assert!(detect_equality_form_delta(&s, t, tol.form_tol).unwrap().matched);
        let p = s.perturbed(0, 0, n - 1, 0.1).unwrap();
        prop_assert!(!detect_equality_form_delta(&p, t, tol.form_tol).unwrap().matched);
    }

    #[test]
    fn totally_geodesic_is_equality_everywhere(n in 3usize..=5, seed in any::<u64>()) {
        let s = forge_instance(&GeneratorSpec::sasakian(5, n, seed).with_family(Family::TotallyGeodesic)).unwrap();
        let q = random_orthogonal(n, seed);
        let pi = Subspace::from_orthonormal(q.columns(0, 2).into_owned()).unwrap();
        let r = InequalityContext::new(&s, Tolerances::default()).chen_first(&pi).unwrap();
        prop_assert!(r.slack.abs() <= 1e-9 && r.equality);
    }

    #[test]
    fn generated_instances_are_valid_and_deterministic(spec in spec_strategy()) {
        let a = forge_instance(&spec).unwrap();
        prop_assert!(validate_ambient(a.ambient()).is_empty());
        let b = forge_instance(&spec).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let back: SubmanifoldPoint = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), serde_json::to_string(&a).unwrap());
    }
}
