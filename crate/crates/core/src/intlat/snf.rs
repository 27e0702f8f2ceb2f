use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMat;

/// Smith normal form `P * A * Q = D` together with `Q^-1`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    /// Diagonal of `D`, length `min(rows, cols)`, nonnegative, `d[i] | d[i+1]`
    /// (a trailing run of zeros is allowed).
    pub divisors: Vec<BigInt>,
    pub p: IntMat,
    pub q: IntMat,
    pub q_inv: IntMat,
}

impl SnfResult {
    pub fn rank(&self) -> usize {
        self.divisors.iter().take_while(|d| !d.is_zero()).count()
    }
}

pub fn snf(a: &IntMat) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut p = IntMat::identity(r);
    let mut q = IntMat::identity(c);
    let mut q_inv = IntMat::identity(c);
    let steps = r.min(c);

    for t in 0..steps {
        let Some((pi, pj)) = min_abs_in(&m, t..r, t..c) else {
            break;
        };
        swap_rows(&mut m, &mut p, t, pi);
        swap_cols(&mut m, &mut q, &mut q_inv, t, pj);

        loop {
            let mut clean = true;
            for i in (t + 1)..r {
                if m.get(i, t).is_zero() {
                    continue;
                }
                let f = m.get(i, t).div_floor(m.get(t, t));
                add_row(&mut m, &mut p, i, t, &-f);
                if !m.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in (t + 1)..c {
                if m.get(t, j).is_zero() {
                    continue;
                }
                let f = m.get(t, j).div_floor(m.get(t, t));
                add_col(&mut m, &mut q, &mut q_inv, j, t, &-f);
                if !m.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a smaller remainder now sits in row or column t
                let cand_col = min_abs_in(&m, t..r, t..t + 1);
                let cand_row = min_abs_in(&m, t..t + 1, t..c);
                let best = [cand_col, cand_row]
                    .into_iter()
                    .flatten()
                    .min_by(|x, y| m.get(x.0, x.1).abs().cmp(&m.get(y.0, y.1).abs()))
                    .expect("pivot column or row is nonzero");
                swap_rows(&mut m, &mut p, t, best.0);
                swap_cols(&mut m, &mut q, &mut q_inv, t, best.1);
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let piv = m.get(t, t).clone();
            let offending =
                ((t + 1)..r).find(|&i| ((t + 1)..c).any(|j| !m.get(i, j).is_multiple_of(&piv)));
            match offending {
                Some(i) => add_row(&mut m, &mut p, t, i, &BigInt::from(1)),
                None => break,
            }
        }
        if m.get(t, t).is_negative() {
            negate_row(&mut m, &mut p, t);
        }
    }

    let divisors = (0..steps).map(|i| m.get(i, i).clone()).collect();
    SnfResult {
        divisors,
        p,
        q,
        q_inv,
    }
}

fn min_abs_in(
    m: &IntMat,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let v = m.get(i, j);
            if v.is_zero() {
                continue;
            }
            let a = v.abs();
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn swap_rows(m: &mut IntMat, p: &mut IntMat, a: usize, b: usize) {
    if a != b {
        m.swap_rows(a, b);
        p.swap_rows(a, b);
    }
}

fn swap_cols(m: &mut IntMat, q: &mut IntMat, q_inv: &mut IntMat, a: usize, b: usize) {
    if a != b {
        m.swap_cols(a, b);
        q.swap_cols(a, b);
        q_inv.swap_rows(a, b);
    }
}

/// row[dst] += f * row[src]
fn add_row(m: &mut IntMat, p: &mut IntMat, dst: usize, src: usize, f: &BigInt) {
    m.add_row_multiple(dst, src, f);
    p.add_row_multiple(dst, src, f);
}

/// col[dst] += f * col[src]; the inverse transform does row[src] -= f * row[dst].
fn add_col(m: &mut IntMat, q: &mut IntMat, q_inv: &mut IntMat, dst: usize, src: usize, f: &BigInt) {
    m.add_col_multiple(dst, src, f);
    q.add_col_multiple(dst, src, f);
    q_inv.add_row_multiple(src, dst, &-f);
}

fn negate_row(m: &mut IntMat, p: &mut IntMat, i: usize) {
    m.negate_row(i);
    p.negate_row(i);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMat) -> SnfResult {
        let s = snf(a);
        let d = s.p.mul(a).mul(&s.q);
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i == j {
                    assert_eq!(d.get(i, j), &s.divisors[i]);
                } else {
                    assert!(d.get(i, j).is_zero());
                }
            }
        }
        assert_eq!(s.q.mul(&s.q_inv), IntMat::identity(a.cols()));
        for w in s.divisors.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    #[test]
    fn diag_2_3() {
        let s = check(&IntMat::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.divisors, vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix() {
        let s = check(&IntMat::zeros(2, 3));
        assert!(s.divisors.iter().all(|d| d.is_zero()));
    }

    #[test]
    fn two_two() {
        let s = check(&IntMat::from_i64(&[&[2, 0], &[0, 2]]));
        assert_eq!(s.divisors, vec![BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn dense_example() {
        let s = check(&IntMat::from_i64(&[
            &[2, 4, 4],
            &[-6, 6, 12],
            &[10, -4, -16],
        ]));
        assert_eq!(
            s.divisors,
            vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]
        );
    }
}
