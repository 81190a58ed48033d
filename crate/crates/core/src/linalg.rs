//! Small dense linear-algebra helpers shared by the control stages.

use nalgebra::{DMatrix, Dim, Matrix, RawStorage, SMatrix, SVector};

use crate::ModelError;

/// Condition-number gate applied to every matrix inverted by the control law.
pub const CONDITION_LIMIT: f64 = 1e6;

/// Singular values of an arbitrary real matrix, in no particular order.
pub fn singular_values<R, C, S>(m: &Matrix<f64, R, C, S>) -> Vec<f64>
where
    R: Dim,
    C: Dim,
    S: RawStorage<f64, R, C>,
{
    let dynamic = DMatrix::from_iterator(m.nrows(), m.ncols(), m.iter().copied());
    dynamic.singular_values().iter().copied().collect()
}

/// 2-norm condition number `σ_max / σ_min`; infinite for a singular matrix.
pub fn condition_number<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    let sv = singular_values(m);
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !max.is_finite() || !min.is_finite() || min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `m x = rhs`, refusing when `m` fails the condition-number gate.
pub fn solve_gated<const N: usize>(
    m: &SMatrix<f64, N, N>,
    rhs: &SVector<f64, N>,
    name: &'static str,
) -> Result<SVector<f64, N>, ModelError> {
    let condition = condition_number(m);
    if condition.is_nan() || condition >= CONDITION_LIMIT {
        return Err(ModelError::Singular {
            matrix: name,
            condition,
        });
    }
    let lu = DMatrix::from_column_slice(N, N, m.as_slice()).lu();
    let b = DMatrix::from_column_slice(N, 1, rhs.as_slice());
    let x = lu.solve(&b).ok_or(ModelError::Singular {
        matrix: name,
        condition,
    })?;
    Ok(SVector::<f64, N>::from_column_slice(x.as_slice()))
}
