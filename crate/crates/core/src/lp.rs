//! Exact convex-hull membership by a phase-one simplex method with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Outcome of a membership query.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// The target is a convex combination of the points, with these weights.
    Inside { weights: Vec<BigRational> },
    /// A linear functional strictly smaller on the target than on every point.
    Outside { functional: Vec<BigRational> },
}

/// Decide whether `target` lies in the convex hull of `points`, all of length `dim`.
///
/// Coordinates are assumed to sum to zero, so the last coordinate is dropped from the
/// equality system and the returned functional has a zero last entry.
pub fn convex_membership(points: &[Vec<BigRational>], target: &[BigRational]) -> Membership {
    let dim = target.len();
    let n = points.len();
    if n == 0 {
        let mut functional = vec![BigRational::zero(); dim];
        if dim > 0 {
            functional[0] = BigRational::one();
        }
        return Membership::Outside { functional };
    }
    let d = dim.saturating_sub(1);
    let m = d + 1;
    let width = n + m;

    // Rows: the first `d` coordinates, then the affine row sum(mu) = 1.
    let mut tab: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
    let mut flip: Vec<bool> = Vec::with_capacity(m);
    for r in 0..m {
        let mut row: Vec<BigRational> = (0..n)
            .map(|i| if r < d { points[i][r].clone() } else { BigRational::one() })
            .collect();
        row.extend((0..m).map(|k| if k == r { BigRational::one() } else { BigRational::zero() }));
        let mut b = if r < d { target[r].clone() } else { BigRational::one() };
        let neg = b.is_negative();
        if neg {
            for v in row.iter_mut().take(n) {
                *v = -v.clone();
            }
            b = -b;
        }
        tab.push(row);
        rhs.push(b);
        flip.push(neg);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut cost_row: Vec<BigRational> = (0..width)
        .map(|c| if c < n { -tab.iter().map(|row| row[c].clone()).sum::<BigRational>() } else { BigRational::zero() })
        .collect();
    let mut objective: BigRational = rhs.iter().cloned().sum();

    loop {
        let Some(enter) = (0..width).find(|&c| cost_row[c].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for r in 0..m {
            if tab[r][enter].is_positive() {
                let ratio = &rhs[r] / &tab[r][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[r] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(r);
                }
            }
        }
        let Some(pr) = leave else {
            // Unbounded direction cannot occur in phase one; treat as optimal.
            break;
        };
        let piv = tab[pr][enter].clone();
        for v in tab[pr].iter_mut() {
            *v = &*v / &piv;
        }
        rhs[pr] = &rhs[pr] / &piv;
        for r in 0..m {
            if r == pr || tab[r][enter].is_zero() {
                continue;
            }
            let f = tab[r][enter].clone();
            for c in 0..width {
                if !tab[pr][c].is_zero() {
                    let v = &tab[r][c] - &f * &tab[pr][c];
                    tab[r][c] = v;
                }
            }
            rhs[r] = &rhs[r] - &f * &rhs[pr];
        }
        let f = cost_row[enter].clone();
        for c in 0..width {
            if !tab[pr][c].is_zero() {
                cost_row[c] = &cost_row[c] - &f * &tab[pr][c];
            }
        }
        objective = &objective + &f * &rhs[pr];
        basis[pr] = enter;
    }

    if objective.is_zero() {
        let mut weights = vec![BigRational::zero(); n];
        for (r, &b) in basis.iter().enumerate() {
            if b < n {
                weights[b] = rhs[r].clone();
            }
        }
        return Membership::Inside { weights };
    }

    // Dual values of the phase-one optimum: y_r = 1 - (reduced cost of artificial r).
    let y: Vec<BigRational> = (0..m)
        .map(|r| {
            let v = BigRational::one() - &cost_row[n + r];
            if flip[r] {
                -v
            } else {
                v
            }
        })
        .collect();
    let mut functional = vec![BigRational::zero(); dim];
    for j in 0..d.min(dim) {
        functional[j] = -y[j].clone();
    }
    Membership::Outside { functional }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
