//! Exact Gaussian elimination over GF(q²).

use crate::gf::{Field, FieldElem};

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(f: &Field, rows: &mut Vec<Vec<FieldElem>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = f.inv(rows[r][c]).expect("pivot is nonzero");
        for x in rows[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c];
                for j in 0..ncols {
                    let t = f.mul(factor, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(f: &Field, rows: &[Vec<FieldElem>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(f, &mut m, ncols).len()
}

/// Basis of `{v : A v = 0}` for the matrix given by `rows` (each of length `ncols`).
pub fn nullspace(f: &Field, rows: &[Vec<FieldElem>], ncols: usize) -> Vec<Vec<FieldElem>> {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![f.zero(); ncols];
            v[fc] = f.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[r][fc]);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let f = Field::new(3, 1).unwrap();
        let one = f.one();
        let two = f.from_int(2);
        let rows = vec![vec![one, two, one], vec![two, one, two]];
        assert_eq!(rank(&f, &rows, 3), 1);
        let basis = nullspace(&f, &rows, 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for row in &rows {
                let dot = row.iter().zip(v).fold(f.zero(), |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let f = Field::new(2, 2).unwrap();
        let g = f.generator();
        let rows = vec![vec![f.one(), g], vec![f.zero(), f.one()]];
        assert!(nullspace(&f, &rows, 2).is_empty());
        assert_eq!(rank(&f, &[], 4), 0);
        assert_eq!(nullspace(&f, &[], 2).len(), 2);
    }
}
