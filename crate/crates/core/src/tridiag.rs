//! Tridiagonal matrices and the Thomas algorithm.

use crate::error::{Error, Result};

/// `sub[i]` couples row `i` to `i-1` (`sub[0]` unused), `sup[i]` couples row
/// `i` to `i+1` (`sup[n-1]` unused).
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Tridiagonal {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// `I + scale * A`.
    pub fn shifted_identity(&self, scale: f64) -> Tridiagonal {
        Tridiagonal {
            sub: self.sub.iter().map(|v| scale * v).collect(),
            diag: self.diag.iter().map(|v| 1.0 + scale * v).collect(),
            sup: self.sup.iter().map(|v| scale * v).collect(),
        }
    }

    /// LU factorization without pivoting; fails on a vanishing pivot.
    pub fn factor(&self) -> Result<FactoredTridiagonal> {
        let n = self.len();
        let mut c_prime = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        for i in 0..n {
            let pivot = if i == 0 {
                self.diag[0]
            } else {
                self.diag[i] - self.sub[i] * c_prime[i - 1]
            };
            if !pivot.is_finite() || pivot.abs() < 1e-300 {
                return Err(Error::SingularRow { row: i });
            }
            inv_pivot[i] = 1.0 / pivot;
            if i + 1 < n {
                c_prime[i] = self.sup[i] * inv_pivot[i];
            }
        }
        Ok(FactoredTridiagonal {
            sub: self.sub.clone(),
            c_prime,
            inv_pivot,
        })
    }
}

/// Forward-sweep coefficients of the Thomas algorithm, reusable across
/// right-hand sides.
#[derive(Clone, Debug)]
pub struct FactoredTridiagonal {
    sub: Vec<f64>,
    c_prime: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl FactoredTridiagonal {
    /// Solves in place: on entry `rhs` holds the right-hand side.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        if n == 0 {
            return;
        }
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= self.c_prime[i] * rhs[i + 1];
        }
    }
}

/// One-shot solve of `A x = rhs`.
pub fn thomas_solve(matrix: &Tridiagonal, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut x = rhs.to_vec();
    matrix.factor()?.solve_in_place(&mut x);
    Ok(x)
}
