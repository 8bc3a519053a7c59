//! Wire encoding shared by certificate files and the CLI: complex numbers
//! are `[re, im]` pairs, matrices are row-major nested arrays.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type MatrixData = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_data(m: &DMatrix<Complex64>) -> MatrixData {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_data(data: &MatrixData) -> Result<DMatrix<Complex64>, String> {
    let rows = data.len();
    if rows == 0 {
        return Err("empty matrix".into());
    }
    let cols = data[0].len();
    if data.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix rows".into());
    }
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (i, row) in data.iter().enumerate() {
        for (j, &[re, im]) in row.iter().enumerate() {
            m[(i, j)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

pub fn vector_to_data(v: &nalgebra::DVector<Complex64>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_data(data: &[[f64; 2]]) -> nalgebra::DVector<Complex64> {
    nalgebra::DVector::from_iterator(data.len(), data.iter().map(|&[re, im]| Complex64::new(re, im)))
}
