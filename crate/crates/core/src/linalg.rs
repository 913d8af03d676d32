//! Dense complex solves with residual reporting.

use crate::error::{Error, Result};
use nalgebra::{Const, DMatrix, DVector, DimMin, SMatrix, SVector};
use num_complex::Complex64;

/// Relative residual above which a solve is treated as singular.
const RESIDUAL_LIMIT: f64 = 1e-6;

/// Solution of a linear system together with its relative residual
/// ‖Ax − b‖/‖b‖ (absolute when b = 0).
#[derive(Clone, Debug)]
pub struct Solved<const N: usize> {
    pub x: SVector<Complex64, N>,
    pub residual: f64,
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve<const N: usize>(
    a: &SMatrix<Complex64, N, N>,
    b: &SVector<Complex64, N>,
    context: impl FnOnce() -> String,
) -> Result<Solved<N>>
where
    Const<N>: DimMin<Const<N>, Output = Const<N>>,
{
    let Some(x) = a.lu().solve(b) else {
        return Err(Error::Singular { context: context() });
    };
    let residual = relative((a * x - b).norm(), b.norm());
    if !is_finite(x.iter()) || !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::Singular { context: context() });
    }
    Ok(Solved { x, residual })
}

/// Dynamic-size variant used by the oracles.
pub fn solve_dyn(
    a: &DMatrix<Complex64>,
    b: &DVector<Complex64>,
    context: &str,
) -> Result<(DVector<Complex64>, f64)> {
    let singular = || Error::Singular {
        context: context.to_string(),
    };
    let x = a.clone().lu().solve(b).ok_or_else(singular)?;
    let residual = relative((a * &x - b).norm(), b.norm());
    if !is_finite(x.iter()) || !(residual <= RESIDUAL_LIMIT) {
        return Err(singular());
    }
    Ok((x, residual))
}

fn relative(diff: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

fn is_finite<'a>(mut it: impl Iterator<Item = &'a Complex64>) -> bool {
    it.all(|z| z.re.is_finite() && z.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Vector2};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solves_small_system() {
        let a = Matrix2::new(c(2.0, 1.0), c(0.0, -1.0), c(1.0, 0.0), c(3.0, 0.5));
        let b = Vector2::new(c(1.0, 0.0), c(0.0, 2.0));
        let s = solve(&a, &b, || "test".into()).unwrap();
        assert!(s.residual < 1e-14);
        assert!((a * s.x - b).norm() < 1e-14);
    }

    #[test]
    fn reports_singular() {
        let a = Matrix2::new(c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0));
        let b = Vector2::new(c(1.0, 0.0), c(0.0, 0.0));
        assert!(matches!(
            solve(&a, &b, || "rank one".into()),
            Err(Error::Singular { .. })
        ));
    }
}
