//! Dense real linear algebra used by the samplers.

pub mod bidiag;
pub mod blas;
pub mod symtri;

pub use bidiag::{bidiagonal_largest_sv, bidiagonal_singular_values, bidiagonalize};
pub use symtri::{
    symmetric_eigenvalues, tridiagonal_eigenvalues, tridiagonal_largest, tridiagonalize,
};

/// AᵀA for a column-major m×n matrix, as a full column-major n×n matrix.
pub fn gram(m: usize, n: usize, a: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    // SAFETY: the pointers cover m·n and n·n elements with the given strides.
    unsafe {
        matrixmultiply::dgemm(
            n,
            m,
            n,
            1.0,
            a.as_ptr(),
            m as isize,
            1,
            a.as_ptr(),
            1,
            m as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            n as isize,
        );
    }
    c
}

/// C = A·B for column-major A (m×k) and B (k×n).
pub fn matmul(m: usize, k: usize, n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    assert!(a.len() == m * k && b.len() == k * n);
    let mut c = vec![0.0; m * n];
    // SAFETY: sizes are asserted above.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            1,
            k as isize,
            0.0,
            c.as_mut_ptr(),
            1,
            m as isize,
        );
    }
    c
}
