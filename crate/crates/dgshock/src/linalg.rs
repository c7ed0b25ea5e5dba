//! Small dense linear algebra: real matrices, the nonsymmetric eigenvalue
//! problem (balancing, Householder Hessenberg reduction, Francis
//! double-shift QR), complex inverse iteration and complex one-sided
//! Jacobi singular values.

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            m.data[i * c..(i + 1) * c].copy_from_slice(row);
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a + b)
            .collect();
        DenseMatrix { data, ..*self }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a - b)
            .collect();
        DenseMatrix { data, ..*self }
    }

    pub fn scale(&self, c: T) -> Self {
        let data = self.data.iter().map(|&a| a * c).collect();
        DenseMatrix { data, ..*self }
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &a| m.max(a.abs()))
    }

    pub fn frobenius(&self) -> T {
        self.data.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn to_complex(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|&a| Complex::new(a, T::zero()))
                    .collect()
            })
            .collect()
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Diagonal similarity scaling rows and columns to comparable norms.
fn balance<T: Real>(a: &mut [Vec<T>]) {
    let n = a.len();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place.
fn hessenberg<T: Real>(a: &mut [Vec<T>]) {
    let n = a.len();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha: T = (k + 1..n).map(|i| a[i][k] * a[i][k]).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let sign = if a[k + 1][k] >= T::zero() {
            T::one()
        } else {
            -T::one()
        };
        let mut v: Vec<T> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] += sign * alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        // A <- H A
        for j in 0..n {
            let dot: T = (0..v.len()).map(|t| v[t] * a[k + 1 + t][j]).sum();
            let f = two * dot / vnorm2;
            for t in 0..v.len() {
                a[k + 1 + t][j] -= f * v[t];
            }
        }
        // A <- A H
        for row in a.iter_mut() {
            let dot: T = (0..v.len()).map(|t| row[k + 1 + t] * v[t]).sum();
            let f = two * dot / vnorm2;
            for t in 0..v.len() {
                row[k + 1 + t] -= f * v[t];
            }
        }
        for row in a.iter_mut().skip(k + 2) {
            row[k] = T::zero();
        }
    }
}

fn sign_of<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hqr<T: Real>(a: &mut [Vec<T>], max_iter: usize) -> Result<Vec<Complex<T>>> {
    let n = a.len();
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let half = T::lit(0.5);
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let mut total = 0usize;
    let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
    let (mut x, mut y, mut z, mut w);
    while nn >= 0 {
        let mut its = 0usize;
        loop {
            let mut l = nn;
            while l >= 1 {
                let (lu, nu) = ((l - 1) as usize, l as usize);
                let mut s = a[lu][lu].abs() + a[nu][nu].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[nu][lu].abs() + s == s {
                    a[nu][lu] = T::zero();
                    break;
                }
                l -= 1;
            }
            let nu = nn as usize;
            x = a[nu][nu];
            if l == nn {
                wr[nu] = x + t;
                wi[nu] = T::zero();
                nn -= 1;
                break;
            }
            y = a[nu - 1][nu - 1];
            w = a[nu][nu - 1] * a[nu - 1][nu];
            if l == nn - 1 {
                p = half * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    z = p + sign_of(z, p);
                    wr[nu - 1] = x + z;
                    wr[nu] = x + z;
                    if z != T::zero() {
                        wr[nu] = x - w / z;
                    }
                    wi[nu - 1] = T::zero();
                    wi[nu] = T::zero();
                } else {
                    wr[nu - 1] = x + p;
                    wr[nu] = x + p;
                    wi[nu - 1] = -z;
                    wi[nu] = z;
                }
                nn -= 2;
                break;
            }
            if total >= max_iter {
                return Err(Error::NoConvergence {
                    what: "Hessenberg QR iteration",
                    iterations: total,
                });
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nu {
                    a[i][i] -= x;
                }
                let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            total += 1;
            let mut m = nn - 2;
            while m >= l {
                let mu = m as usize;
                z = a[mu][mu];
                r = x - z;
                let s = y - z;
                p = (r * s - w) / a[mu + 1][mu] + a[mu][mu + 1];
                q = a[mu + 1][mu + 1] - z - r - s;
                r = a[mu + 2][mu + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[mu][mu - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[mu - 1][mu - 1].abs() + z.abs() + a[mu + 1][mu + 1].abs());
                if u + v == v {
                    break;
                }
                m -= 1;
            }
            let mu = m as usize;
            for i in mu + 2..=nu {
                a[i][i - 2] = T::zero();
                if i != mu + 2 {
                    a[i][i - 3] = T::zero();
                }
            }
            let mut k = mu;
            while k < nu {
                if k != mu {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = T::zero();
                    if k + 1 != nu {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign_of((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == mu {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nu {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nu < k + 3 { nu } else { k + 3 };
                    for i in l as usize..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k + 1 != nu {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex::new(re, im))
        .collect())
}

/// Eigenvalues of a dense real matrix; the iteration cap is `100 n`.
pub fn eigenvalues_dense<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "{}x{} matrix is not square",
            m.rows, m.cols
        )));
    }
    if !m.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let n = m.rows;
    match n {
        0 => return Ok(vec![]),
        1 => return Ok(vec![Complex::new(m[(0, 0)], T::zero())]),
        _ => {}
    }
    let mut a = m.to_rows();
    balance(&mut a);
    hessenberg(&mut a);
    hqr(&mut a, 100 * n)
}

/// Complex LU with partial pivoting; tiny pivots are replaced by `floor`.
fn complex_lu<T: Real>(
    mut a: Vec<Vec<Complex<T>>>,
    floor: T,
) -> (Vec<Vec<Complex<T>>>, Vec<usize>) {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().partial_cmp(&a[j][col].norm()).unwrap())
            .unwrap();
        a.swap(col, piv);
        perm.swap(col, piv);
        if a[col][col].norm() < floor {
            a[col][col] = Complex::new(floor, T::zero());
        }
        let d = a[col][col];
        for i in col + 1..n {
            let f = a[i][col] / d;
            a[i][col] = f;
            for j in col + 1..n {
                let v = a[col][j];
                a[i][j] = a[i][j] - f * v;
            }
        }
    }
    (a, perm)
}

fn lu_solve<T: Real>(lu: &[Vec<Complex<T>>], perm: &[usize], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = lu.len();
    let mut x: Vec<Complex<T>> = perm.iter().map(|&i| b[i]).collect();
    for i in 0..n {
        for j in 0..i {
            let v = lu[i][j] * x[j];
            x[i] = x[i] - v;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let v = lu[i][j] * x[j];
            x[i] = x[i] - v;
        }
        x[i] = x[i] / lu[i][i];
    }
    x
}

fn normalize<T: Real>(v: &mut [Complex<T>]) -> T {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if nrm > T::zero() {
        for z in v.iter_mut() {
            *z = *z / nrm;
        }
    }
    nrm
}

/// Unit-norm eigenvector for the eigenvalue estimate `mu` by inverse
/// iteration on `A - mu I`.
pub fn inverse_iteration<T: Real>(m: &DenseMatrix<T>, mu: Complex<T>) -> Vec<Complex<T>> {
    let n = m.rows;
    let scale = m.max_abs().max(T::one());
    let mut a = m.to_complex();
    // Shift slightly off the estimate so the factorization stays regular.
    let shift = mu + Complex::new(scale * T::lit(1e-13), scale * T::lit(1e-13));
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = row[i] - shift;
    }
    let (lu, perm) = complex_lu(a, scale * T::epsilon());
    let mut v: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let t = T::int(i as i64 + 1);
            Complex::new(
                T::one() + t.sin() * T::lit(0.5),
                (t * T::lit(0.7)).cos() * T::lit(0.3),
            )
        })
        .collect();
    normalize(&mut v);
    for _ in 0..4 {
        v = lu_solve(&lu, &perm, &v);
        if normalize(&mut v) == T::zero()
            || v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            break;
        }
    }
    v
}

/// Singular values of a complex matrix by one-sided Jacobi rotations,
/// in decreasing order.
pub fn singular_values_complex<T: Real>(a: &[Vec<Complex<T>>]) -> Vec<T> {
    let rows = a.len();
    if rows == 0 {
        return vec![];
    }
    let cols = a[0].len();
    let mut c: Vec<Vec<Complex<T>>> = (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect();
    let tol = T::epsilon() * T::int(rows as i64);
    for _sweep in 0..80 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha: T = c[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: T = c[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex<T> = c[i].iter().zip(&c[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == T::zero() || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.conj() / g;
                for y in c[j].iter_mut() {
                    *y = *y * phase;
                }
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = sign_of(T::one(), zeta) / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for r in 0..rows {
                    let (x, y) = (c[i][r], c[j][r]);
                    c[i][r] = x * cs - y * sn;
                    c[j][r] = x * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<T> = c
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s
}

/// Singular values of `A - mu I`.
pub fn shifted_singular_values<T: Real>(m: &DenseMatrix<T>, mu: Complex<T>) -> Vec<T> {
    let mut a = m.to_complex();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = row[i] - mu;
    }
    singular_values_complex(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sorted(mut v: Vec<Complex<f64>>) -> Vec<Complex<f64>> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn diagonal_matrix() {
        let m = DenseMatrix::diag(&[3.0, -1.0, 0.5]);
        let ev = sorted(eigenvalues_dense(&m).unwrap());
        assert_abs_diff_eq!(ev[0].re, -1.0);
        assert_abs_diff_eq!(ev[1].re, 0.5);
        assert_abs_diff_eq!(ev[2].re, 3.0);
    }

    #[test]
    fn companion_matrix() {
        // z² - 2z + 2
        let m = DenseMatrix::from_rows(&[vec![2.0, -2.0], vec![1.0, 0.0]]);
        let ev = sorted(eigenvalues_dense(&m).unwrap());
        assert_abs_diff_eq!(ev[0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[0].im.abs(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ev[0].im, -ev[1].im);
    }

    #[test]
    fn companion_of_known_roots() {
        // (z-1)(z+2)(z-3)(z²+1) = z⁵ - 2z⁴ - 4z³ + 4z² - 5z + 6
        let c = [-2.0, -4.0, 4.0, -5.0, 6.0];
        let mut rows = vec![vec![0.0; 5]; 5];
        for j in 0..5 {
            rows[0][j] = -c[j];
        }
        for i in 1..5 {
            rows[i][i - 1] = 1.0;
        }
        let ev = sorted(eigenvalues_dense(&DenseMatrix::from_rows(&rows)).unwrap());
        let want = [(-2.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0), (3.0, 0.0)];
        for (z, (re, im)) in ev.iter().zip(want) {
            assert_abs_diff_eq!(z.re, re, epsilon = 1e-10);
            assert_abs_diff_eq!(z.im, im, epsilon = 1e-10);
        }
    }

    #[test]
    fn trace_and_determinant_preserved() {
        let n = 12;
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = ((i * 7 + j * 3) as f64 * 0.37).sin() + if i == j { 2.0 } else { 0.0 };
            }
        }
        let ev = eigenvalues_dense(&m).unwrap();
        let tr: Complex<f64> = ev.iter().sum();
        let want: f64 = (0..n).map(|i| m[(i, i)]).sum();
        assert_abs_diff_eq!(tr.re, want, epsilon = 1e-10);
        assert_abs_diff_eq!(tr.im, 0.0, epsilon = 1e-10);
        for z in &ev {
            let s = shifted_singular_values(&m, *z);
            assert!(*s.last().unwrap() < 1e-9, "{z} {:?}", s.last());
        }
    }

    #[test]
    fn eigenvector_residual() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 2.0, 0.0],
            vec![-1.0, 0.5, 0.3],
            vec![0.2, 0.0, -1.0],
        ]);
        for mu in eigenvalues_dense(&m).unwrap() {
            let v = inverse_iteration(&m, mu);
            let a = m.to_complex();
            for i in 0..3 {
                let av: Complex<f64> = (0..3).map(|j| a[i][j] * v[j]).sum();
                assert!((av - mu * v[i]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_values_of_known_matrix() {
        let m = DenseMatrix::from_rows(&[vec![3.0, 0.0], vec![4.0, 5.0]]);
        let s = singular_values_complex(&m.to_complex());
        // σ² are the eigenvalues of AᵀA = [[25, 20], [20, 25]].
        assert_abs_diff_eq!(s[0], 45f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 5f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn jordan_block_nullity() {
        let m = DenseMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![2.0, 1.0, 0.0],
            vec![0.0, 2.0, 1.0],
        ]);
        let s = shifted_singular_values(&m, Complex::new(1.0, 0.0));
        assert!(s[1] > 0.5);
        assert!(s[2] < 1e-14);
    }

    #[test]
    fn matrix_products() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let b = a.mul(&DenseMatrix::identity(2));
        assert_eq!(a, b);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, 7.0]);
        assert_eq!(a.sub(&a).max_abs(), 0.0);
        assert_eq!(a.add(&a), a.scale(2.0));
    }
}
