//! Integer linear systems via column Hermite reduction.

/// Solution set of A x = b over Z: a particular solution plus a kernel basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSolution {
    pub particular: Vec<i64>,
    pub kernel: Vec<Vec<i64>>,
}

/// Solves `sum_j x_j cols[j] = b` over the integers.
pub fn solve_integer(cols: &[Vec<i64>], b: &[i64]) -> Option<IntSolution> {
    let k = cols.len();
    let m = b.len();
    assert!(cols.iter().all(|c| c.len() == m), "column length mismatch");
    let mut a: Vec<Vec<i128>> = cols.iter().map(|c| c.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..k).map(|i| (0..k).map(|j| (i == j) as i128).collect()).collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pc = 0;
    for row in 0..m {
        if pc == k {
            break;
        }
        loop {
            let nz: Vec<usize> = (pc..k).filter(|&c| a[c][row] != 0).collect();
            if nz.is_empty() {
                break;
            }
            let p = *nz.iter().min_by_key(|&&c| a[c][row].abs()).unwrap();
            if nz.len() == 1 {
                a.swap(pc, p);
                u.swap(pc, p);
                pivots.push((row, pc));
                pc += 1;
                break;
            }
            for &c in &nz {
                if c == p {
                    continue;
                }
                let q = a[c][row].div_euclid(a[p][row]);
                for i in 0..m {
                    a[c][i] -= q * a[p][i];
                }
                for i in 0..k {
                    u[c][i] -= q * u[p][i];
                }
            }
        }
    }
    let mut y = vec![0i128; k];
    let mut next = 0;
    for row in 0..m {
        let cur: i128 = (0..next).map(|c| a[c][row] * y[c]).sum();
        let want = b[row] as i128 - cur;
        if next < pivots.len() && pivots[next].0 == row {
            let c = pivots[next].1;
            if want % a[c][row] != 0 {
                return None;
            }
            y[c] = want / a[c][row];
            next += 1;
        } else if want != 0 {
            return None;
        }
    }
    let to_i64 = |v: Vec<i128>| v.into_iter().map(|x| i64::try_from(x).ok()).collect::<Option<Vec<i64>>>();
    let particular = to_i64((0..k).map(|i| (0..k).map(|c| u[c][i] * y[c]).sum()).collect())?;
    let kernel = (pc..k).map(|c| to_i64(u[c].clone())).collect::<Option<Vec<_>>>()?;
    Some(IntSolution { particular, kernel })
}

/// Unique integer coordinates of `b` in the span of independent `cols`.
pub fn express_in(cols: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let s = solve_integer(cols, b)?;
    if s.kernel.is_empty() {
        Some(s.particular)
    } else {
        None
    }
}

/// All solutions `particular + sum t_i kernel_i` with |t_i| <= bound.
pub fn enumerate_box(sol: &IntSolution, bound: i64) -> Vec<Vec<i64>> {
    let mut out = vec![sol.particular.clone()];
    for kv in &sol.kernel {
        let mut next = Vec::with_capacity(out.len() * (2 * bound as usize + 1));
        for x in &out {
            for t in -bound..=bound {
                next.push(x.iter().zip(kv).map(|(a, b)| a + t * b).collect());
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn detects_non_integral() {
        assert!(solve_integer(&[vec![2, 0]], &[1, 0]).is_none());
        assert!(solve_integer(&[vec![1, 1]], &[1, 0]).is_none());
        let s = solve_integer(&[vec![2, 0], vec![3, 0]], &[1, 0]).unwrap();
        assert_eq!(s.kernel.len(), 1);
    }

    proptest! {
        #[test]
        fn solutions_solve(cols in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 1..6),
                           x in prop::collection::vec(-3i64..=3, 6)) {
            let k = cols.len();
            let b: Vec<i64> = (0..5).map(|i| (0..k).map(|j| cols[j][i] * x[j]).sum()).collect();
            let s = solve_integer(&cols, &b).expect("consistent system");
            let check = |v: &Vec<i64>| (0..5).map(|i| (0..k).map(|j| cols[j][i] * v[j]).sum::<i64>()).collect::<Vec<_>>();
            prop_assert_eq!(check(&s.particular), b.clone());
            for kv in &s.kernel {
                prop_assert!(check(kv).iter().all(|&v| v == 0));
            }
        }
    }
}
