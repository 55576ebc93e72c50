//! Linear algebra over truncated power series: row elimination with
//! valuation-based pivoting and explicit effective-order (valuation-loss)
//! bookkeeping.

use crate::error::{Error, Result};
use crate::series::TruncSeries;

/// Solves the linear system `rows · c = rhs` for `c` over truncated
/// series. Returns the solution and the effective order it is guaranteed
/// to: every pivot of positive valuation loses that many orders, and the
/// min-order arithmetic of `TruncSeries` tracks the loss automatically.
///
/// Unconstrained unknowns are set to zero; inconsistency is reported as
/// `NotInSpan` with the valuation of the first nonzero residual.
pub fn series_solve(
    rows: &[Vec<TruncSeries>],
    rhs: &[TruncSeries],
) -> Result<(Vec<TruncSeries>, usize)> {
    let nrows = rows.len();
    assert_eq!(nrows, rhs.len());
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let order = rhs
        .iter()
        .map(TruncSeries::order)
        .chain(rows.iter().flatten().map(TruncSeries::order))
        .min()
        .unwrap_or(0);
    let var = rhs
        .first()
        .map(TruncSeries::var)
        .unwrap_or(crate::series::VarTag::B);

    let mut m: Vec<Vec<TruncSeries>> = rows.to_vec();
    let mut y: Vec<TruncSeries> = rhs.to_vec();
    let mut used = vec![false; nrows];
    // (row, col) in pivoting order
    let mut pivots: Vec<(usize, usize)> = Vec::new();

    for col in 0..ncols {
        // choose an unused row with minimal valuation in this column,
        // preferring unit leading scalars
        let mut best: Option<(usize, usize, bool)> = None;
        for r in 0..nrows {
            if used[r] {
                continue;
            }
            if let Some(v) = m[r][col].valuation() {
                let unit = m[r][col].coeff(v).is_unit();
                let better = match best {
                    None => true,
                    Some((_, bv, bu)) => v < bv || (v == bv && unit && !bu),
                };
                if better {
                    best = Some((r, v, unit));
                }
            }
        }
        let (prow, _, _) = match best {
            Some(b) => b,
            None => continue, // column vanishes in the remaining rows
        };
        used[prow] = true;
        pivots.push((prow, col));
        for r in 0..nrows {
            if used[r] || m[r][col].is_zero() {
                continue;
            }
            let q = m[r][col].div(&m[prow][col])?;
            for k in 0..ncols {
                m[r][k] = m[r][k].sub(&q.mul(&m[prow][k]));
            }
            y[r] = y[r].sub(&q.mul(&y[prow]));
        }
    }

    let mut c: Vec<TruncSeries> = (0..ncols)
        .map(|_| TruncSeries::zero(var, order))
        .collect();
    for &(prow, pcol) in pivots.iter().rev() {
        let mut acc = y[prow].clone();
        for k in 0..ncols {
            if k != pcol && !m[prow][k].is_zero() && !c[k].is_zero() {
                acc = acc.sub(&m[prow][k].mul(&c[k]));
            }
        }
        c[pcol] = acc.div(&m[prow][pcol])?;
    }

    // residual check against the original system
    let mut effective = c.iter().map(TruncSeries::order).min().unwrap_or(order);
    for i in 0..nrows {
        let mut res = rhs[i].clone();
        for k in 0..ncols {
            if !c[k].is_zero() {
                res = res.sub(&rows[i][k].mul(&c[k]));
            }
        }
        effective = effective.min(res.order());
        if !res.is_zero() {
            return Err(Error::NotInSpan {
                residual_valuation: res.valuation(),
            });
        }
    }
    if effective == 0 && order > 0 {
        return Err(Error::OrderExhausted {
            loss: order,
            order,
        });
    }
    Ok((c, effective))
}

/// Exact Gaussian elimination over scalar matrices: returns the rank and
/// a basis of the (right) nullspace as coefficient vectors.
pub fn scalar_nullspace(
    rows: &[Vec<crate::scalar::Scalar>],
) -> Result<(usize, Vec<Vec<crate::scalar::Scalar>>)> {
    use crate::scalar::Scalar;
    let nrows = rows.len();
    let ncols = if nrows == 0 { 0 } else { rows[0].len() };
    let mut m = rows.to_vec();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut pivot_cols = vec![false; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        // find a row below `rank` with nonzero entry, prefer units
        let mut sel = None;
        for r in rank..nrows {
            if !m[r][col].is_zero() {
                if m[r][col].is_unit() {
                    sel = Some(r);
                    break;
                }
                if sel.is_none() {
                    sel = Some(r);
                }
            }
        }
        let Some(r) = sel else { continue };
        m.swap(rank, r);
        let piv = m[rank][col].clone();
        for r2 in 0..nrows {
            if r2 == rank || m[r2][col].is_zero() {
                continue;
            }
            let q = m[r2][col].checked_div(&piv)?;
            for k in 0..ncols {
                let t = q.mul(&m[rank][k]);
                m[r2][k] = m[r2][k].sub(&t);
            }
        }
        pivot_col_of_row.push(col);
        pivot_cols[col] = true;
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols[free] {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            // m[row][pc]·v[pc] + m[row][free] = 0
            v[pc] = m[row][free].neg().checked_div(&m[row][pc])?;
        }
        basis.push(v);
    }
    Ok((rank, basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use crate::series::{TruncSeries, VarTag};

    fn s(ints: &[i64], n: usize) -> TruncSeries {
        TruncSeries::from_ints(VarTag::B, ints, n)
    }

    #[test]
    fn solves_a_unit_system() {
        let n = 8;
        // [1+b, b; 0, 1] c = [1+2b+b^2... ] pick c = (1+b, 2)
        let rows = vec![
            vec![s(&[1, 1], n), s(&[0, 1], n)],
            vec![s(&[0], n), s(&[1], n)],
        ];
        let c_true = [s(&[1, 1], n), s(&[2], n)];
        let rhs: Vec<TruncSeries> = (0..2)
            .map(|i| {
                rows[i][0]
                    .mul(&c_true[0])
                    .add(&rows[i][1].mul(&c_true[1]))
            })
            .collect();
        let (c, eff) = series_solve(&rows, &rhs).unwrap();
        assert_eq!(eff, n);
        assert!(c[0].eq_trunc(&c_true[0]));
        assert!(c[1].eq_trunc(&c_true[1]));
    }

    #[test]
    fn tracks_valuation_loss() {
        let n = 8;
        // b·c = b^2 + b^3: pivot valuation 1 costs one order
        let rows = vec![vec![s(&[0, 1], n)]];
        let rhs = vec![s(&[0, 0, 1, 1], n)];
        let (c, eff) = series_solve(&rows, &rhs).unwrap();
        assert_eq!(eff, n - 1);
        assert!(c[0].eq_trunc(&s(&[0, 1, 1], n - 1)));
    }

    #[test]
    fn reports_not_in_span() {
        let n = 6;
        let rows = vec![vec![s(&[0, 1], n)], vec![s(&[0], n)]];
        let rhs = vec![s(&[0, 0, 1], n), s(&[1], n)];
        match series_solve(&rows, &rhs) {
            Err(Error::NotInSpan { residual_valuation }) => {
                assert_eq!(residual_valuation, Some(0));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nullspace_of_rank_deficient_matrix() {
        let r = |v: &[i64]| v.iter().map(|&x| Scalar::from_int(x)).collect::<Vec<_>>();
        let rows = vec![r(&[1, 2, 3]), r(&[2, 4, 6]), r(&[1, 0, 1])];
        let (rank, basis) = scalar_nullspace(&rows).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(basis.len(), 1);
        // check M v = 0
        let v = &basis[0];
        for row in &rows {
            let mut acc = Scalar::zero();
            for (a, b) in row.iter().zip(v) {
                acc = acc.add(&a.mul(b));
            }
            assert!(acc.is_zero());
        }
    }
}
