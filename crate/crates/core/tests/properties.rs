mod common;

use common::{leibniz_det, random_controllable, random_zero_set};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zeroassign::assigner::{assign_zeros, equivalence_gap, AssignmentRequest, Target};
use zeroassign::numkit::{
    complement_to_minors, faddeev, pair_roots, pencil_at, poly_roots, polymat_det, rank,
    signed_minor_vector, Matrix, Polynomial, Tolerance,
};
use zeroassign::placement::{place_deficient, place_regular, RandomPolicy};
use zeroassign::sysmodel::{controllable, invariant_zeros, pbh_controllable, StateSpaceSystem};
use zeroassign::transform::{build_transform, recover_h, select_permutation};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn int_matrix(rows: usize, cols: usize, lo: i32, hi: i32) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(lo..=hi, rows * cols).prop_map(move |v| {
        let data: Vec<f64> = v.into_iter().map(f64::from).collect();
        Matrix::from_dmatrix(DMatrix::from_row_slice(rows, cols, &data)).unwrap()
    })
}

fn square(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max).prop_flat_map(|n| int_matrix(n, n, -4, 4))
}

/// A pair `(a, b)` with `a` n x n and `b` n x r.
fn pair(max_n: usize, max_r: usize, lo: i32, hi: i32) -> impl Strategy<Value = (Matrix, Matrix)> {
    (1..=max_n)
        .prop_flat_map(move |n| (Just(n), 1..=max_r.min(n)))
        .prop_flat_map(move |(n, r)| (int_matrix(n, n, lo, hi), int_matrix(n, r, lo, hi)))
}

/// Well-conditioned similarity `I + 0.25 U` with `U` uniform in [-1, 1).
fn similarity(n: usize, seed: u64) -> (Matrix, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = common::uniform(&mut rng, n, n);
    let t = &Matrix::identity(n) + &u.scale(0.25 / n as f64);
    let ti = zeroassign::numkit::inverse(&t, &tol()).unwrap();
    (t, ti)
}

fn permutation(n: usize, seed: u64) -> Matrix {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Matrix::from_dmatrix(DMatrix::from_fn(
        n,
        n,
        |i, j| if idx[i] == j { 1.0 } else { 0.0 },
    ))
    .unwrap()
}

fn controllable_system(seed: u64, n: usize, r: usize) -> StateSpaceSystem {
    random_controllable(&mut ChaCha8Rng::seed_from_u64(seed), n, r)
}

/// 64 cases unless `PROPTEST_CASES` says otherwise.
fn cases() -> u32 {
    std::env::var("PROPTEST_CASES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(64)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: cases(), ..ProptestConfig::default() })]

    #[test]
    fn faddeev_reassembles_charpoly_identity(a in square(6)) {
        let m = a.rows();
        let fad = faddeev(&a).unwrap();
        let scale = fad.charpoly.max_abs_coeff().max(1.0);
        // coefficient of s^k in (sI - a) sum_k s^k B_k is B_{k-1} - a B_k
        for k in 0..=m {
            let mut lhs = Matrix::zeros(m, m);
            if k > 0 {
                lhs = &lhs + &fad.adj_coeffs[k - 1];
            }
            if k < m {
                lhs = &lhs - &(&a * &fad.adj_coeffs[k]);
            }
            let rhs = Matrix::identity(m).scale(fad.charpoly.coeff(k));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-9 * scale);
        }
    }

    #[test]
    fn sampled_determinant_matches_charpoly(a in square(6)) {
        let id = DMatrix::identity(a.rows(), a.rows());
        let det = polymat_det(|s| pencil_at(&id, a.as_dmatrix(), s), a.rows(), &tol()).unwrap();
        let cp = faddeev(&a).unwrap().charpoly;
        prop_assert!(det.relative_diff(&cp) <= 1e-9, "{det} vs {cp}");
    }

    #[test]
    fn roots_reconstruct_polynomial(
        reals in prop::collection::btree_set(-8i32..=8, 1..5),
        pairs in prop::collection::btree_set((-4i32..=4, 1i32..=4), 0..=2),
    ) {
        let mut roots: Vec<Complex64> = reals.iter().map(|&x| Complex64::new(x.into(), 0.0)).collect();
        for &(re, im) in &pairs {
            roots.push(Complex64::new(re.into(), im.into()));
            roots.push(Complex64::new(re.into(), (-im).into()));
        }
        let p = Polynomial::from_roots(&roots).unwrap();
        let found = poly_roots(&p).unwrap();
        let err = pair_roots(&found, &roots).unwrap();
        prop_assert!(err <= 1e-6, "root error {err}");
    }

    #[test]
    fn minor_vector_round_trip(g in prop::collection::vec(-5.0f64..5.0, 2..=5)) {
        prop_assume!(g.iter().any(|x| x.abs() > 1e-3));
        let c = complement_to_minors(&g, &tol()).unwrap();
        prop_assert_eq!((c.rows(), c.cols()), (g.len() - 1, g.len()));
        let w = signed_minor_vector(&c);
        let scale = g.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (a, b) in w.iter().zip(&g) {
            prop_assert!((a - b).abs() <= 1e-9 * scale, "{w:?} vs {g:?}");
        }
    }

    #[test]
    fn minor_vector_agrees_with_leibniz(c in int_matrix(2, 3, -5, 5), x in int_matrix(1, 3, -5, 5)) {
        // det([x; c]) expands along the first row into x . w
        let w = signed_minor_vector(&c);
        let full = x.vstack(&c);
        let dot: f64 = (0..3).map(|j| x[(0, j)] * w[j]).sum();
        prop_assert!((dot - leibniz_det(&full)).abs() <= 1e-9);
    }

    #[test]
    fn rank_is_invariant_under_permutation_and_similarity(
        n in 1usize..=6, k in 0usize..=6, seed in any::<u64>(),
    ) {
        let k = k.min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = common::integer(&mut rng, n, k, -3, 3);
        let v = common::integer(&mut rng, k, n, -3, 3);
        let a = if k == 0 { Matrix::zeros(n, n) } else { &u * &v };
        let base = rank(&a, &tol());
        prop_assert!(base <= k);
        let p = permutation(n, seed ^ 1);
        let q = permutation(n, seed ^ 2);
        prop_assert_eq!(rank(&(&(&p * &a) * &q), &tol()), base);
        let (t, ti) = similarity(n, seed ^ 3);
        prop_assert_eq!(rank(&(&(&t * &a) * &ti), &tol()), base);
    }

    #[test]
    fn controllability_is_invariant_under_similarity((a, b) in pair(5, 3, -1, 1), seed in any::<u64>()) {
        let (t, ti) = similarity(a.rows(), seed);
        let before = controllable(&a, &b, &tol());
        let after = controllable(&(&(&t * &a) * &ti), &(&t * &b), &tol());
        prop_assert_eq!(before, after);
    }

    #[test]
    fn pbh_agrees_with_krylov_rank((a, b) in pair(4, 2, -1, 1)) {
        prop_assert_eq!(pbh_controllable(&a, &b, &tol()).unwrap(), controllable(&a, &b, &tol()).0);
    }

    #[test]
    fn zero_counts_add_up((a, b) in pair(6, 3, -3, 3), seed in any::<u64>()) {
        let (n, r) = (a.rows(), b.cols());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::integer(&mut rng, r, n, -3, 3);
        let sys = StateSpaceSystem::new(a, b, Some(h)).unwrap();
        if let Ok(z) = invariant_zeros(&sys, &tol()) {
            prop_assert!(z.finite_count <= n - r);
            prop_assert_eq!(z.finite_count + z.infinite_count, n - r);
            prop_assert_eq!(z.finite_count, z.zero_polynomial.degree().unwrap());
        }
    }

    #[test]
    fn zeros_invariant_under_output_scaling((a, b) in pair(6, 3, -3, 3), seed in any::<u64>()) {
        let (n, r) = (a.rows(), b.cols());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::integer(&mut rng, r, n, -3, 3);
        let (d, _) = similarity(r, seed ^ 7);
        let sys = StateSpaceSystem::new(a.clone(), b.clone(), Some(h.clone())).unwrap();
        let scaled = StateSpaceSystem::new(a, b, Some(&d * &h)).unwrap();
        match (invariant_zeros(&sys, &tol()), invariant_zeros(&scaled, &tol())) {
            (Ok(z1), Ok(z2)) => {
                prop_assert_eq!(z1.finite_count, z2.finite_count);
                let (c, resid) = z2.zero_polynomial.scalar_match(&z1.zero_polynomial).unwrap();
                prop_assert!(resid <= 1e-8, "residual {resid}");
                let det_d = zeroassign::numkit::det(&d);
                prop_assert!((c - det_d).abs() <= 1e-8 * det_d.abs().max(1.0));
            }
            (Err(e1), Err(e2)) => prop_assert_eq!(e1.kind(), e2.kind()),
            (x, y) => prop_assert!(false, "outcomes differ: {:?} / {:?}", x.is_ok(), y.is_ok()),
        }
    }

    #[test]
    fn transform_invariants(
        seed in any::<u64>(), n in 2usize..=7, r in 1usize..=3, hseed in any::<u64>(),
    ) {
        let r = r.min(n - 1);
        let sys = controllable_system(seed, n, r);
        let bundle = build_transform(sys.a(), sys.b(), &select_permutation(sys.b(), &tol()).unwrap(), &tol()).unwrap();
        let m = n - r;

        let nb = &bundle.n_bar() * sys.b();
        prop_assert!(nb.block(0, 0, m, r).max_abs() <= 1e-12 * sys.b().max_abs());
        prop_assert!(nb.block(m, 0, r, r).max_abs_diff(&bundle.b2_tilde) <= 1e-12);

        let h = common::integer(&mut ChaCha8Rng::seed_from_u64(hseed), r, n, -3, 3);
        let (h1, h2) = bundle.forward_h(&h);
        let back = recover_h(&h1, &h2, &bundle).unwrap();
        prop_assert!(back.max_abs_diff(&h) <= 1e-12 * h.max_abs().max(1.0));

        let with_h = sys.with_output(h).unwrap();
        if invariant_zeros(&with_h, &tol()).is_ok() {
            let gap = equivalence_gap(&with_h, &bundle, &tol()).unwrap();
            prop_assert!(gap <= 1e-9, "gap {gap}");
        }
    }

    #[test]
    fn placement_postconditions(
        seed in any::<u64>(), n in 2usize..=7, r in 1usize..=3, mu_frac in 0.0f64..=1.0, zseed in any::<u64>(),
    ) {
        let r = r.min(n - 1);
        let sys = controllable_system(seed, n, r);
        let bundle = build_transform(sys.a(), sys.b(), &select_permutation(sys.b(), &tol()).unwrap(), &tol()).unwrap();
        let m = n - r;
        let mu = ((m as f64) * mu_frac).round() as usize;
        let zs = random_zero_set(&mut ChaCha8Rng::seed_from_u64(zseed), sys.a(), mu);
        let psi = Polynomial::from_roots(&zs).unwrap().scale(2.0);
        let policy = RandomPolicy::with_seed(seed);
        let out = if mu == m {
            place_regular(&bundle.a11_bar, &bundle.a12_bar, &psi, &policy, &tol()).unwrap()
        } else {
            place_deficient(&bundle.a11_bar, &bundle.a12_bar, &psi, &policy, &tol()).unwrap()
        };
        prop_assert_eq!((out.h1_bar.rows(), out.h1_bar.cols()), (r, m));
        prop_assert_eq!((out.h2_bar.rows(), out.h2_bar.cols()), (r, r));
        prop_assert_eq!(rank(&out.h1_bar.hstack(&out.h2_bar), &tol()), r);
        prop_assert!(out.achieved_poly.relative_diff(&psi.scale(out.scalar_factor)) <= 1e-8);
    }

    #[test]
    fn assignment_is_deterministic(seed in any::<u64>(), n in 2usize..=6, r in 1usize..=2, rseed in any::<u64>()) {
        let r = r.min(n - 1);
        let sys = controllable_system(seed, n, r);
        let zs = random_zero_set(&mut ChaCha8Rng::seed_from_u64(seed ^ 5), sys.a(), n - r);
        let mut req = AssignmentRequest::new(sys, Target::Zeros(zs));
        req.policy = RandomPolicy::with_seed(rseed);
        let first = assign_zeros(&req).unwrap();
        let second = assign_zeros(&req).unwrap();
        prop_assert_eq!(first.to_json(), second.to_json());
        prop_assert_eq!(first, second);
    }
}
