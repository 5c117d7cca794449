//! Randomized invariant checks shared by the property tests and the
//! acceptance harness. Each check runs a deterministic proptest runner.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ridge_sdr::diagnostics::bootstrap_eigs;
use ridge_sdr::linalg::sym_eig;
use ridge_sdr::{
    fit, partition, subspace_distance, suggest_dimension, Dataset, EigenDecomposition, Method, OrthonormalBasis,
    SlicingStrategy, Standardizer, TestFunction,
};

use super::{gaussian_matrix, random_dataset};

pub type Check = fn(u32) -> Result<(), String>;

pub const SUITE: &[(&str, Check)] = &[
    ("moment matrices are PSD with eigenvalues summing to the trace", psd),
    ("SIR eigenvalues vanish beyond min(R-1, m)", sir_rank_bound),
    ("eigenvalues are invariant under affine input maps", affine_invariance),
    ("subspace distance satisfies the metric axioms", metric_axioms),
    ("seeded runs are bit-identical at any thread count", seed_determinism),
    ("ridge functions are constant along the oracle complement", ridge_invariance),
    ("testbed symmetries and bullseye levels", testbed_symmetries),
    ("partition is permutation invariant and self-consistent", partition_invariants),
    ("suggested dimension is invariant under rescaling", suggest_scale_invariance),
    ("standardizing standardized data is the identity", standardize_idempotent),
    ("moment matrices are equivariant under coordinate permutation", coordinate_equivariance),
];

pub const CASES: u32 = 128;

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn values(e: &EigenDecomposition) -> Vec<f64> {
    e.values.iter().copied().collect()
}

pub fn psd(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 30usize..150, 1usize..6, 1usize..12), |(seed, n, m, r)| {
        let data = random_dataset(seed, n, m);
        for method in [Method::Sir, Method::Save] {
            let est = fit(&data, method, SlicingStrategy::equal_count(r)).map_err(|e| fail(e.to_string()))?.estimate;
            let v = values(&est.eig);
            let scale = 1.0 + v[0].abs();
            prop_assert!(v.iter().all(|&l| l >= -1e-12 * scale), "{method}: negative eigenvalue in {v:?}");
            let trace = est.matrix.trace();
            prop_assert!((v.iter().sum::<f64>() - trace).abs() <= 1e-8 * (1.0 + trace.abs()));
        }
        Ok(())
    })
}

pub fn sir_rank_bound(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 40usize..150, 2usize..8, 1usize..10), |(seed, n, m, r)| {
        let data = random_dataset(seed, n, m);
        let run = fit(&data, Method::Sir, SlicingStrategy::equal_count(r)).map_err(|e| fail(e.to_string()))?;
        let v = values(&run.estimate.eig);
        let bound = (run.partition.len() - 1).min(m);
        let scale = 1.0 + v[0];
        for (k, &l) in v.iter().enumerate().skip(bound) {
            prop_assert!(l.abs() <= 1e-12 * scale, "λ[{k}] = {l} with {} slices", run.partition.len());
        }
        Ok(())
    })
}

pub fn affine_invariance(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 40usize..150, 1usize..6, 2usize..8), |(seed, n, m, r)| {
        let data = random_dataset(seed, n, m);
        let b = gaussian_matrix(m, m, seed ^ 0x5eed) + DMatrix::identity(m, m) * 2.0;
        let sv = b.singular_values();
        prop_assume!(sv.max() / sv.min() < 1e4);
        let shift = gaussian_matrix(1, m, seed ^ 0xbeef) * 5.0;
        let mut moved = data.x() * b.transpose();
        for mut row in moved.row_iter_mut() {
            row += &shift;
        }
        let other = Dataset::new(moved, data.y().to_vec()).unwrap();
        for method in [Method::Sir, Method::Save] {
            let s = SlicingStrategy::equal_count(r);
            let a = values(&fit(&data, method, s).map_err(|e| fail(e.to_string()))?.estimate.eig);
            let c = values(&fit(&other, method, s).map_err(|e| fail(e.to_string()))?.estimate.eig);
            let tol = 1e-6 * a[0].abs().max(1.0);
            for (x, y) in a.iter().zip(&c) {
                prop_assert!((x - y).abs() <= tol, "{method}: {a:?} vs {c:?}");
            }
        }
        Ok(())
    })
}

fn random_basis(m: usize, n: usize, seed: u64) -> OrthonormalBasis {
    OrthonormalBasis::orthonormalize(gaussian_matrix(m, n, seed)).unwrap()
}

pub fn metric_axioms(cases: u32) -> Result<(), String> {
    let strategy = (any::<u64>(), 2usize..9).prop_flat_map(|(seed, m)| (Just(seed), Just(m), 1..m));
    run(cases, strategy, |(seed, m, n)| {
        let a = random_basis(m, n, seed);
        let b = random_basis(m, n, seed.wrapping_add(1));
        let c = random_basis(m, n, seed.wrapping_add(2));
        let d = |x: &OrthonormalBasis, y: &OrthonormalBasis| subspace_distance(x, y).unwrap();
        prop_assert!(d(&a, &a) <= 1e-12);
        prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&d(&a, &b)));
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-10);
        // same subspace under a change of basis
        let mixed = a.columns() * (gaussian_matrix(n, n, seed ^ 7) + DMatrix::identity(n, n) * 3.0);
        if let Ok(a2) = OrthonormalBasis::orthonormalize(mixed) {
            prop_assert!(d(&a, &a2) <= 1e-8);
        }
        // agrees with the projector-difference norm
        let pa = a.columns() * a.columns().transpose();
        let pb = b.columns() * b.columns().transpose();
        let direct = (pa - pb).singular_values().max();
        prop_assert!((direct - d(&a, &b)).abs() <= 1e-10);
        Ok(())
    })
}

fn testbed_function(k: usize) -> TestFunction {
    match k % 7 {
        0 => TestFunction::quad1d_default(),
        1 => TestFunction::quad3d_default(),
        2 => TestFunction::Product,
        3 => TestFunction::shifted_product(1.0, 1.0),
        4 => TestFunction::bullseye_default(),
        5 => TestFunction::linear_default(),
        _ => TestFunction::hartmann_log(),
    }
}

pub fn seed_determinism(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 0usize..7, 30usize..120), |(seed, k, n)| {
        let f = testbed_function(k);
        let a = f.sample_inputs(n, seed).unwrap();
        prop_assert_eq!(&a, &f.sample_inputs(n, seed).unwrap());
        let other = f.sample_inputs(n, seed.wrapping_add(1)).unwrap();
        prop_assert_ne!(a.x(), other.x());

        let s = SlicingStrategy::equal_count(3);
        let r1 = fit(&a, Method::Sir, s).unwrap();
        let r2 = fit(&a, Method::Sir, s).unwrap();
        prop_assert_eq!(&r1.estimate, &r2.estimate);
        prop_assert_eq!(sym_eig(&r1.estimate.matrix).unwrap(), r1.estimate.eig.clone());

        let boot = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| bootstrap_eigs(&a, Method::Sir, s, 4, (2.5, 97.5), seed))
        };
        match (boot(1), boot(3)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x, y),
            (Err(x), Err(y)) => prop_assert_eq!(x, y),
            (x, y) => return Err(fail(format!("thread count changed the outcome: {x:?} vs {y:?}"))),
        }
        Ok(())
    })
}

pub fn ridge_invariance(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 0usize..4, 0.01f64..3.0), |(seed, k, step)| {
        let f = match k {
            0 => TestFunction::quad1d_default(),
            1 => TestFunction::quad3d_default(),
            2 => TestFunction::linear_default(),
            _ => TestFunction::hartmann_log(),
        };
        let basis = f.oracle_subspace().basis.unwrap();
        let m = f.input_dim();
        let x = f.sample_inputs(1, seed).unwrap().x().row(0).transpose();
        let g = DVector::from_column_slice(gaussian_matrix(m, 1, seed ^ 3).as_slice());
        let q = basis.columns();
        let w = &g - q * (q.transpose() * &g);
        let w = w.normalize() * step;
        let fx = f.evaluate(x.as_slice()).unwrap();
        let fw = f.evaluate((&x + &w).as_slice()).unwrap();
        let tol = 1e-10 * fx.abs().max(fw.abs()).max(1e-3);
        prop_assert!((fx - fw).abs() <= tol, "{}: {fx} vs {fw}", f.name());
        Ok(())
    })
}

pub fn testbed_symmetries(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 50usize..400), |(seed, n)| {
        let p = TestFunction::Product;
        let x = p.sample_inputs(n, seed).unwrap();
        for row in x.x().row_iter() {
            let v = [row[0], row[1]];
            prop_assert_eq!(p.evaluate(&v).unwrap(), p.evaluate(&[-v[0], -v[1]]).unwrap());
        }
        let b = TestFunction::bullseye_default().sample_inputs(n, seed).unwrap();
        let mut levels: Vec<f64> = b.y().to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        prop_assert!(levels.iter().all(|&l| l == 0.0 || l == 1.0));
        prop_assert!(levels.len() <= 2);
        if n >= 200 {
            prop_assert_eq!(levels.len(), 2);
        }
        Ok(())
    })
}

pub fn partition_invariants(cases: u32) -> Result<(), String> {
    let ys = prop_oneof![
        prop::collection::vec(-100.0f64..100.0, 1..200),
        prop::collection::vec((0i32..6).prop_map(f64::from), 1..200),
    ];
    run(cases, (ys, 1usize..25, any::<u64>(), any::<bool>()), |(y, r, seed, width)| {
        let r = r.min(y.len());
        let s = if width {
            SlicingStrategy::equal_width(r)
        } else {
            SlicingStrategy::equal_count(r)
        };
        let p = partition(&y, s).unwrap();
        prop_assert_eq!(p.total(), y.len());
        for (k, members) in p.membership().iter().enumerate() {
            prop_assert!(!members.is_empty());
            for &i in members {
                prop_assert_eq!(p.assign(y[i]), k);
            }
        }

        let mut perm: Vec<usize> = (0..y.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let q = partition(&shuffled, s).unwrap();
        prop_assert_eq!(p.edges(), q.edges());
        for (a, b) in p.membership().iter().zip(q.membership()) {
            let mut mapped: Vec<usize> = b.iter().map(|&i| perm[i]).collect();
            mapped.sort_unstable();
            prop_assert_eq!(a, &mapped);
        }

        let mut distinct = y.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        if !width && distinct.len() == y.len() && y.len() > 1 {
            let counts = p.counts();
            prop_assert_eq!(counts.len(), r);
            prop_assert!(counts.iter().max().unwrap() - counts.iter().min().unwrap() <= 1);
        }
        Ok(())
    })
}

pub fn suggest_scale_invariance(cases: u32) -> Result<(), String> {
    let vals = prop::collection::vec(0.0f64..10.0, 2..12);
    run(cases, (vals, -20i32..20), |(mut v, k)| {
        v.sort_by(|a, b| b.total_cmp(a));
        let base = EigenDecomposition {
            values: DVector::from_vec(v.clone()),
            vectors: DMatrix::identity(v.len(), v.len()),
        };
        let n = suggest_dimension(&base);
        prop_assert!(n >= 1 && n < v.len());
        // powers of two scale exactly, so gap ties are preserved
        let scaled = EigenDecomposition {
            values: base.values.map(|l| l * 2f64.powi(k)),
            ..base.clone()
        };
        prop_assert_eq!(suggest_dimension(&scaled), n);
        let gaps: Vec<f64> = v.windows(2).map(|w| w[0] - w[1]).collect();
        prop_assert!(gaps.iter().all(|&g| g <= gaps[n - 1]));
        prop_assert!(gaps[..n - 1].iter().all(|&g| g < gaps[n - 1]));
        Ok(())
    })
}

pub fn standardize_idempotent(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 20usize..200, 1usize..8), |(seed, n, m)| {
        prop_assume!(n > m + 1);
        let data = random_dataset(seed, n, m);
        let z = Standardizer::fit(&data).unwrap().apply(&data).unwrap();
        let zz = Standardizer::fit(&z).unwrap().apply(&z).unwrap();
        prop_assert!((z.x() - zz.x()).amax() <= 1e-8);
        Ok(())
    })
}

pub fn coordinate_equivariance(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 40usize..150, 2usize..6, 2usize..8), |(seed, n, m, r)| {
        let data = random_dataset(seed, n, m);
        let mut perm: Vec<usize> = (0..m).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted = Dataset::new(data.x().select_columns(&perm), data.y().to_vec()).unwrap();
        for method in [Method::Sir, Method::Save] {
            let s = SlicingStrategy::equal_count(r);
            let c = fit(&data, method, s).unwrap().estimate.matrix;
            let cp = fit(&permuted, method, s).unwrap().estimate.matrix;
            let scale = 1.0 + c.as_matrix().amax();
            for i in 0..m {
                for j in 0..m {
                    prop_assert!((cp.get(i, j) - c.get(perm[i], perm[j])).abs() <= 1e-10 * scale);
                }
            }
        }
        Ok(())
    })
}
