//! Small numeric helpers shared across modules.

/// Pairwise (cascade) summation.
///
/// Quadrature accumulates in a fixed order with this, so results are
/// deterministic and rounding error grows like O(log n) instead of O(n).
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Visit every counter tuple with `c[i] in 0..dims[i]` in odometer order
/// (last axis fastest), reusing a single buffer.
pub(crate) fn try_for_each_counter<E>(
    dims: &[usize],
    mut f: impl FnMut(&[usize]) -> std::result::Result<(), E>,
) -> std::result::Result<(), E> {
    let k = dims.len();
    if k == 0 {
        return f(&[]);
    }
    if dims.contains(&0) {
        return Ok(());
    }
    let mut c = vec![0usize; k];
    'outer: loop {
        f(&c)?;
        let mut axis = k - 1;
        loop {
            c[axis] += 1;
            if c[axis] < dims[axis] {
                continue 'outer;
            }
            c[axis] = 0;
            if axis == 0 {
                return Ok(());
            }
            axis -= 1;
        }
    }
}

/// Determinant of a small dense row-major p-by-p matrix.
///
/// Direct formulas through 3x3, Gaussian elimination with partial pivoting
/// above.  Clobbers `m`.
pub(crate) fn det_in_place(m: &mut [f64], p: usize) -> f64 {
    debug_assert_eq!(m.len(), p * p);
    match p {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut det = 1.0;
            for col in 0..p {
                let mut piv = col;
                for r in col + 1..p {
                    if m[r * p + col].abs() > m[piv * p + col].abs() {
                        piv = r;
                    }
                }
                if m[piv * p + col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    for c in 0..p {
                        m.swap(col * p + c, piv * p + c);
                    }
                    det = -det;
                }
                let d = m[col * p + col];
                det *= d;
                for r in col + 1..p {
                    let factor = m[r * p + col] / d;
                    if factor == 0.0 {
                        continue;
                    }
                    for c in col..p {
                        m[r * p + c] -= factor * m[col * p + c];
                    }
                }
            }
            det
        }
    }
}
