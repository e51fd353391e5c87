//! Compressed sparse row matrices and a Jacobi-preconditioned conjugate
//! gradient solver.

use alloc::vec::Vec;

/// Symmetric sparse matrix in CSR form.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<u32>,
    pub values: Vec<f64>,
}

/// Coordinate-format accumulator; duplicate entries are summed on build.
pub struct CooBuilder {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl CooBuilder {
    pub fn new(n: usize) -> CooBuilder {
        CooBuilder {
            n,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries.push((i as u32, j as u32, v));
    }

    pub fn build(mut self) -> CsrMatrix {
        self.entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = alloc::vec![0usize; self.n + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut last: Option<(u32, u32)> = None;
        for (i, j, v) in self.entries {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i as usize + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl CsrMatrix {
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = alloc::vec![0.0; self.n];
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.col_idx[k] as usize == i {
                    d[i] = self.values[k];
                }
            }
        }
        d
    }

    /// `y = A x + c .* x` for a diagonal shift `c` (no allocation of a new
    /// matrix for Newton systems with changing diagonal terms).
    pub fn matvec_shifted(&self, shift: &[f64], x: &[f64], y: &mut [f64]) {
        self.matvec(x, y);
        for i in 0..self.n {
            y[i] += shift[i] * x[i];
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of a conjugate gradient solve.
#[derive(Debug, Clone, Copy)]
pub struct CgStats {
    pub iterations: usize,
    pub rel_residual: f64,
    pub converged: bool,
    /// Set if a direction with non-positive curvature was encountered
    /// (matrix not positive definite).
    pub indefinite: bool,
}

/// Jacobi-preconditioned CG on `(A + diag(shift)) x = b`, overwriting `x`
/// with the solution (input is the initial guess).
pub fn pcg_shifted(
    a: &CsrMatrix,
    shift: &[f64],
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> CgStats {
    let n = a.n;
    let mut diag = a.diagonal();
    for i in 0..n {
        diag[i] += shift[i];
        if diag[i].abs() < 1e-300 {
            diag[i] = 1.0;
        }
    }
    let mut r = alloc::vec![0.0; n];
    let mut ap = alloc::vec![0.0; n];
    a.matvec_shifted(shift, x, &mut ap);
    for i in 0..n {
        r[i] = b[i] - ap[i];
    }
    let b_norm = crate::fmath::sqrt(dot(b, b)).max(1e-300);
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut stats = CgStats {
        iterations: 0,
        rel_residual: crate::fmath::sqrt(dot(&r, &r)) / b_norm,
        converged: false,
        indefinite: false,
    };
    if stats.rel_residual <= rel_tol {
        stats.converged = true;
        return stats;
    }
    for it in 0..max_iter {
        a.matvec_shifted(shift, &p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            stats.indefinite = true;
            stats.iterations = it;
            return stats;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = crate::fmath::sqrt(dot(&r, &r)) / b_norm;
        stats.iterations = it + 1;
        stats.rel_residual = res;
        if res <= rel_tol {
            stats.converged = true;
            return stats;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coo_merges_duplicates() {
        let mut b = CooBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(0, 0, 2.0);
        b.add(1, 1, 5.0);
        b.add(0, 1, -1.0);
        b.add(1, 0, -1.0);
        let m = b.build();
        let mut y = [0.0; 2];
        m.matvec(&[1.0, 1.0], &mut y);
        assert_eq!(y, [2.0, 4.0]);
    }

    #[test]
    fn cg_solves_laplacian_chain() {
        // 1D Dirichlet Laplacian, solution recovered to tight tolerance
        let n = 50;
        let mut b = CooBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
                b.add(i + 1, i, -1.0);
            }
        }
        let a = b.build();
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut rhs = alloc::vec![0.0; n];
        a.matvec(&x_true, &mut rhs);
        let mut x = alloc::vec![0.0; n];
        let shift = alloc::vec![0.0; n];
        let st = pcg_shifted(&a, &shift, &rhs, &mut x, 1e-12, 1000);
        assert!(st.converged);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-8);
        }
    }
}
