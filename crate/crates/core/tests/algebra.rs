use nalgebra::{DMatrix, DVector};
use octorecon::algebra::{build_family, OrthoFamily, RotationCoeffs};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / len).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
}

#[test]
fn families_verify_exactly() {
    for n in [1, 2, 4, 8] {
        assert!(build_family(n).unwrap().verify(), "n = {n}");
    }
}

#[test]
fn round_trip_over_ten_thousand_pairs() {
    for n in [2, 4, 8] {
        let family = OrthoFamily::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let x = random_unit(&mut rng, n);
            let y = random_unit(&mut rng, n);
            let coeffs = family.rotation_coeffs(&x, &y).unwrap();
            assert!((coeffs.norm() - 1.0).abs() < 1e-12);
            worst = worst.max(max_abs_diff(&family.apply_rotation(&coeffs, &x).unwrap(), &y));
        }
        assert!(worst < 1e-12, "n = {n}: {worst:e}");
    }
}

#[test]
fn images_of_a_unit_vector_are_orthonormal() {
    for n in [2, 4, 8] {
        let family = OrthoFamily::new(n).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + n as u64);
        for _ in 0..10_000 {
            let x = random_unit(&mut rng, n);
            let basis: Vec<Vec<f64>> = family.matrices().iter().map(|a| a.apply(&x)).collect();
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = basis[i].iter().zip(&basis[j]).map(|(p, q)| p * q).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expected).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn hand_computed_quarter_turn() {
    let family = OrthoFamily::new(2).unwrap();
    let coeffs = family.rotation_coeffs(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
    assert_eq!(coeffs.alpha, vec![0.0, 1.0]);
    let dense = family.rotation_as_dense(&coeffs).unwrap();
    assert_eq!(dense, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
}

#[test]
fn identity_coefficients() {
    for n in [1, 2, 4, 8] {
        let family = OrthoFamily::new(n).unwrap();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        assert_eq!(family.rotation_coeffs(&e1, &e1).unwrap(), RotationCoeffs::identity(n));
        assert_eq!(
            family.rotation_as_dense(&RotationCoeffs::identity(n)).unwrap(),
            DMatrix::identity(n, n)
        );
    }
}

#[test]
fn rotated_noise_keeps_its_covariance() {
    // M(x, y)(x + w) - y = M w for any w, so the covariance of w is preserved.
    let family = OrthoFamily::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = random_unit(&mut rng, 8);
    let y = random_unit(&mut rng, 8);
    let coeffs = family.rotation_coeffs(&x, &y).unwrap();
    let s2: f64 = 0.3;
    let samples = 100_000;
    let s = s2.sqrt();
    let mut cov = DMatrix::<f64>::zeros(8, 8);
    for _ in 0..samples {
        let v: Vec<f64> = x
            .iter()
            .map(|&xi| {
                let z: f64 = StandardNormal.sample(&mut rng);
                xi + s * z
            })
            .collect();
        let out = family.apply_rotation(&coeffs, &v).unwrap();
        let e = DVector::from_iterator(8, out.iter().zip(&y).map(|(o, t)| o - t));
        cov += &e * e.transpose();
    }
    cov /= samples as f64;
    for i in 0..8 {
        for j in 0..8 {
            let expected = if i == j { s2 } else { 0.0 };
            // sampling sd of a covariance entry of white Gaussian noise
            let sd = s2 * ((1.0 + f64::from(u8::from(i == j))) / samples as f64).sqrt();
            assert!((cov[(i, j)] - expected).abs() < 5.0 * sd, "({i},{j}) {}", cov[(i, j)]);
        }
    }
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
        .prop_filter("non-degenerate", |v| v.iter().map(|a| a * a).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / len).collect()
        })
}

proptest! {
    #[test]
    fn sparse_rotation_matches_dense(alpha in unit_vector(8), v in prop::collection::vec(-10.0f64..10.0, 8)) {
        let family = OrthoFamily::new(8).unwrap();
        let coeffs = RotationCoeffs::new(alpha);
        let sparse = family.apply_rotation(&coeffs, &v).unwrap();
        let dense = family.rotation_as_dense(&coeffs).unwrap() * DVector::from_column_slice(&v);
        prop_assert!(max_abs_diff(&sparse, dense.as_slice()) < 1e-13);
    }

    #[test]
    fn unit_coefficients_give_orthogonal_maps(alpha in unit_vector(8), v in prop::collection::vec(-10.0f64..10.0, 8)) {
        let family = OrthoFamily::new(8).unwrap();
        let coeffs = RotationCoeffs::new(alpha);
        let m = family.rotation_as_dense(&coeffs).unwrap();
        prop_assert!((m.transpose() * &m - DMatrix::identity(8, 8)).abs().max() < 1e-12);
        let out = family.apply_rotation(&coeffs, &v).unwrap();
        let before = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        let after = out.iter().map(|a| a * a).sum::<f64>().sqrt();
        prop_assert!((before - after).abs() < 1e-12 * before.max(1.0));
    }

    #[test]
    fn round_trip_in_every_dimension(x in unit_vector(4), y in unit_vector(4), x8 in unit_vector(8), y8 in unit_vector(8)) {
        let f4 = OrthoFamily::new(4).unwrap();
        let c = f4.rotation_coeffs(&x, &y).unwrap();
        prop_assert!(max_abs_diff(&f4.apply_rotation(&c, &x).unwrap(), &y) < 1e-12);
        let f8 = OrthoFamily::new(8).unwrap();
        let c = f8.rotation_coeffs(&x8, &y8).unwrap();
        prop_assert!(max_abs_diff(&f8.apply_rotation(&c, &x8).unwrap(), &y8) < 1e-12);
    }
}
