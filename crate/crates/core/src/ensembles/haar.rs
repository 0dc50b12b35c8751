use nalgebra::{DMatrix, DVector};

use crate::numerics::{ComplexMatrix, C64};
use crate::randomness::Stream;

fn complex_normal(stream: &mut Stream) -> C64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(h * stream.standard_normal(), h * stream.standard_normal())
}

/// Haar-random `n×n` unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn sample_haar_unitary(n: usize, stream: &mut Stream) -> ComplexMatrix {
    assert!(n >= 1, "unitary dimension must be positive");
    let g = DMatrix::from_fn(n, n, |_, _| complex_normal(stream));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_matrix_unchecked(q)
}

/// Haar-uniform unit vector in `ℂⁿ`.
pub fn sample_haar_pure_state(n: usize, stream: &mut Stream) -> DVector<C64> {
    assert!(n >= 1, "state dimension must be positive");
    loop {
        let v = DVector::from_fn(n, |_, _| complex_normal(stream));
        let norm = v.norm();
        if norm > 1e-150 {
            return v / C64::new(norm, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{adjoint, matmul};
    use crate::randomness::SeedSpec;
    use crate::stats::ks_statistic;

    #[test]
    fn unitaries_are_unitary() {
        let mut s = SeedSpec::new(10, 0).stream();
        for n in [1, 2, 5, 16] {
            let u = sample_haar_unitary(n, &mut s);
            let gram = matmul(&u, &adjoint(&u)).unwrap();
            let defect = gram.sub(&ComplexMatrix::identity(n)).unwrap().frobenius_norm();
            assert!(defect <= 1e-12, "n = {n}: {defect}");
        }
    }

    #[test]
    fn one_by_one_is_a_phase() {
        let mut s = SeedSpec::new(11, 0).stream();
        for _ in 0..10 {
            let u = sample_haar_unitary(1, &mut s);
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_states_are_normalized() {
        let mut s = SeedSpec::new(12, 0).stream();
        for n in [1, 3, 8, 30] {
            let psi = sample_haar_pure_state(n, &mut s);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn coordinate_weights_are_exchangeable() {
        let mut s = SeedSpec::new(13, 0).stream();
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| sample_haar_pure_state(8, &mut s)[0].norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 0.125).abs() < 0.01 * 0.125, "mean {mean}");
    }

    #[test]
    fn qubit_population_is_uniform() {
        let mut s = SeedSpec::new(14, 0).stream();
        let pops: Vec<f64> = (0..100_000).map(|_| sample_haar_pure_state(2, &mut s)[0].norm_sqr()).collect();
        let d = ks_statistic(&pops, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.01, "KS {d}");
    }
}
