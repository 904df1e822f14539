//! Dense Gaussian elimination over a finite field.
//!
//! Matrices are row-major `Vec<Vec<u32>>` of raw field values (see
//! [`FieldSpec`]). Used for the Artin-Schreier solver, the characteristic-2
//! unit search and Berlekamp factorization.

use crate::ff::FieldSpec;

/// Reduced row echelon form in place. Returns the pivot column of each
/// nonzero row.
fn rref(field: &FieldSpec, m: &mut [Vec<u32>], cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, pr);
        let inv = field.inv(m[r][c]).expect("pivot is nonzero");
        for v in m[r].iter_mut() {
            *v = field.mul(*v, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let factor = m[i][c];
                for j in 0..m[i].len() {
                    let t = field.mul(factor, m[r][j]);
                    m[i][j] = field.sub(m[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// One solution of `a · v = rhs`, free variables set to zero.
pub fn solve(field: &FieldSpec, a: &[Vec<u32>], rhs: &[u32]) -> Option<Vec<u32>> {
    assert_eq!(a.len(), rhs.len());
    let cols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<u32>> = a
        .iter()
        .zip(rhs)
        .map(|(row, &b)| {
            let mut r = row.clone();
            r.push(b);
            r
        })
        .collect();
    let pivots = rref(field, &mut aug, cols);
    // a pivot in the augmented column means the system is inconsistent
    for row in aug.iter().skip(pivots.len()) {
        if row[cols] != 0 {
            return None;
        }
    }
    let mut sol = vec![0u32; cols];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = aug[r][cols];
    }
    Some(sol)
}

/// A basis of the right null space `{ v : a · v = 0 }`.
pub fn nullspace(field: &FieldSpec, a: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let mut m: Vec<Vec<u32>> = a.to_vec();
    let pivots = rref(field, &mut m, cols);
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u32; cols];
        v[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = field.neg(m[r][free]);
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system_mod_5() {
        let f = FieldSpec::prime(5).unwrap();
        // x + y = 2, x + 2y = 3  =>  x = 1, y = 1
        let a = vec![vec![1, 1], vec![1, 2]];
        assert_eq!(solve(&f, &a, &[2, 3]), Some(vec![1, 1]));
    }

    #[test]
    fn inconsistent_system() {
        let f = FieldSpec::prime(2).unwrap();
        let a = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(solve(&f, &a, &[0, 1]), None);
    }

    #[test]
    fn nullspace_of_rank_one() {
        let f = FieldSpec::prime(3).unwrap();
        let a = vec![vec![1, 2, 0]];
        let ns = nullspace(&f, &a, 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            let dot = f.add(f.mul(1, v[0]), f.mul(2, v[1]));
            assert_eq!(dot, 0);
        }
    }
}
