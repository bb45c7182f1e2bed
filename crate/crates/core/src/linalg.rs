//! Small dense helpers. Dimensions here never exceed a few dozen, so plain
//! slices and Gaussian elimination are enough.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    // scaled to avoid overflow/underflow for extreme inputs
    let m = a.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * a.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

/// Solves `A x = b` for square `A` (row-major, `n x n`) with partial
/// pivoting. Returns `None` when a pivot falls below `rel_tol` times the
/// largest entry of `A`.
pub fn solve(a: &[f64], b: &[f64], n: usize, rel_tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|r| (r, m[r * n + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pval <= rel_tol * scale {
            return None;
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                m[r * n + k] -= f * m[col * n + k];
            }
            x[r] -= f * x[col];
        }
    }
    for col in (0..n).rev() {
        let mut s = x[col];
        for k in col + 1..n {
            s -= m[col * n + k] * x[k];
        }
        x[col] = s / m[col * n + col];
    }
    Some(x)
}

/// Orthonormal basis (modified Gram-Schmidt, two passes) of the span of
/// `rows`. Rows whose residual falls below `tol` are dropped.
pub fn orthonormal_basis(rows: &[&[f64]], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for r in rows {
        if let Some(v) = orthogonalize(r, &basis, tol) {
            basis.push(v);
        }
    }
    basis
}

/// Component of `v` orthogonal to the orthonormal `basis`, normalized, or
/// `None` when its norm relative to `|v|` is below `tol`.
pub fn orthogonalize(v: &[f64], basis: &[Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let n0 = norm(v);
    if n0 == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(&w, b);
            axpy(-c, b, &mut w);
        }
    }
    let n = norm(&w);
    if n <= tol * n0 {
        return None;
    }
    Some(scaled(&w, 1.0 / n))
}

/// A unit vector orthogonal to every row. Requires fewer independent rows
/// than the ambient dimension. Among the standard basis vectors the one with
/// the largest residual against the rows' span is projected (ties go to the
/// lowest index), and the sign is fixed so the first nonzero coordinate is
/// positive.
pub fn complement_vector(rows: &[&[f64]], dim: usize) -> Option<Vec<f64>> {
    let basis = orthonormal_basis(rows, 1e-12);
    if basis.len() >= dim {
        return None;
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in 0..dim {
        let mut e = vec![0.0; dim];
        e[axis] = 1.0;
        let mut w = e.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                axpy(-c, b, &mut w);
            }
        }
        let r = norm(&w);
        if best.as_ref().map_or(true, |(br, _)| r > *br + 1e-12) {
            best = Some((r, w));
        }
    }
    let (r, w) = best?;
    if r < 1e-8 {
        return None;
    }
    let mut v = scaled(&w, 1.0 / r);
    // one more projection pass after normalizing, then renormalize
    for b in &basis {
        let c = dot(&v, b);
        axpy(-c, b, &mut v);
    }
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-14) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = [2.0, 1.0, 1.0, 3.0];
        let x = solve(&a, &[3.0, 5.0], 2, 1e-14).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
        assert!(solve(&[1.0, 2.0, 2.0, 4.0], &[1.0, 1.0], 2, 1e-12).is_none());
    }

    #[test]
    fn complement_is_orthogonal() {
        let r1 = [1.0, 0.0, 0.0];
        let r2 = [0.0, 1.0, 0.0];
        let v = complement_vector(&[&r1, &r2], 3).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 1.0]);
        let v = complement_vector(&[&[1.0, 0.0]], 2).unwrap();
        assert_eq!(v, vec![0.0, 1.0]);
        assert!(complement_vector(&[&r1, &r2, &[0.0, 0.0, 1.0]], 3).is_none());
    }

    #[test]
    fn norm_handles_extremes() {
        assert!((norm(&[3e200, 4e200]) / 5e200 - 1.0).abs() < 1e-15);
        assert!((norm(&[3e-200, 4e-200]) - 5e-200).abs() < 1e-214);
    }
}
