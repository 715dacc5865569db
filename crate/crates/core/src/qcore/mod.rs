//! Dense complex linear algebra for registers of up to eight qubits.
//!
//! Qubit 0 is the leftmost letter of every word and the most significant bit
//! of every amplitude index. Time evolution uses `ħ = 1`; Hamiltonians carry
//! angular frequencies in rad/s.

mod operator;
mod pauli;
mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub use operator::{
    hermitian_deviation, hermitian_eigen, matrix_exponential, unitary_deviation,
    HermitianOperator, UnitaryMatrix,
};
pub(crate) use operator::check_same;
pub use pauli::{all_pauli_words, Pauli, PauliString};
pub use state::{
    amplitudes_from, apply_unitary, conjugate_state, evolve, expectation, partial_expectation,
    BasisProjector, DensityMatrix, QuantumState, StateVector,
};
pub(crate) use state::symmetrize;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Qubit count of a square `2ⁿ × 2ⁿ` shape.
pub(crate) fn qubits_for_dim(rows: usize, cols: usize) -> crate::error::Result<usize> {
    use crate::error::EqsError;
    if rows != cols {
        return Err(EqsError::DimensionMismatch {
            expected: rows,
            found: cols,
        });
    }
    if rows == 0 || !rows.is_power_of_two() {
        return Err(EqsError::DimensionMismatch {
            expected: rows.next_power_of_two(),
            found: rows,
        });
    }
    let n = rows.trailing_zeros() as usize;
    if n > crate::tolerance::MAX_QUBITS {
        return Err(EqsError::RegisterTooLarge {
            n,
            limit: crate::tolerance::MAX_QUBITS,
        });
    }
    Ok(n)
}

/// `a ⊗ b` for raw matrices or column vectors.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Random Hermitian operator with standard-normal entries (GUE-like), scaled by `scale`.
pub fn random_hermitian<R: rand::RngExt + ?Sized>(n: usize, scale: f64, rng: &mut R) -> HermitianOperator {
    use rand_distr::{Distribution, StandardNormal};
    let dim = 1 << n;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let mut h = (&g + g.adjoint()) * C64::new(0.5 * scale, 0.0);
    symmetrize(&mut h);
    HermitianOperator::new(h).expect("symmetrized matrix is Hermitian")
}

/// Random unitary `e^{−iHt}` for a random Hermitian `H` and time `t ∈ [0, 10)`.
pub fn random_unitary<R: rand::RngExt + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let h = random_hermitian(n, 1.0, rng);
    let t: f64 = rng.random::<f64>() * 10.0;
    matrix_exponential(&h, t).expect("non-negative time")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn evolution_preserves_norm(seed in any::<u64>(), n in 1usize..=4, t in 0.0f64..50.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = StateVector::random(n, &mut rng);
            let h = random_hermitian(n, 3.0, &mut rng);
            let out = evolve(&psi, &h, t).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn exponentials_compose(seed in any::<u64>(), n in 1usize..=3, t in 0.0f64..5.0, s in 0.0f64..5.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = random_hermitian(n, 2.0, &mut rng);
            let lhs = matrix_exponential(&h, t).unwrap().compose(&matrix_exponential(&h, s).unwrap()).unwrap();
            let rhs = matrix_exponential(&h, t + s).unwrap();
            prop_assert!((lhs.matrix() - rhs.matrix()).norm() < 1e-10);
        }

        #[test]
        fn conjugation_is_an_involution(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = StateVector::random(n, &mut rng);
            prop_assert_eq!(conjugate_state(&conjugate_state(&psi)), psi);
        }

        #[test]
        fn unitary_round_trip(seed in any::<u64>(), n in 1usize..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_unitary(n, &mut rng);
            let psi = StateVector::random(n, &mut rng);
            let back = apply_unitary(&u.adjoint(), &apply_unitary(&u, &psi).unwrap()).unwrap();
            prop_assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-12);
        }

        #[test]
        fn pauli_words_square_to_identity(index in 1usize..256) {
            let words = all_pauli_words(4);
            let m = words[index - 1].to_matrix();
            prop_assert_eq!(&m * &m, CMatrix::identity(16, 16));
        }
    }
}
