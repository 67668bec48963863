use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::{block_op_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Bound on `|M^dagger M - I|` promised by [`exp_antihermitian`].
pub const UNITARITY_TOL: f64 = 1e-12;

const ANTIHERMITIAN_TOL: f64 = 1e-12;

/// A matrix exponential together with its measured distance from unitarity.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryResult {
    pub matrix: ComplexMatrix,
    pub unitarity_defect: f64,
}

/// Splits the index set into connected components of the sparsity graph of `g`.
fn components(g: &DMatrix<Complex64>) -> Vec<Vec<usize>> {
    let n = g.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && g[(i, j)] != Complex64::new(0.0, 0.0) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

/// `exp(G)` for anti-Hermitian `G` through the eigendecomposition of the
/// Hermitian matrix `iG`.
///
/// The sparsity graph is split into connected components first, so operators
/// with conserved quantities (parity, total quanta, `n1 - n2`) are exponentiated
/// one invariant block at a time.
pub fn exp_antihermitian(g: &ComplexMatrix) -> Result<UnitaryResult> {
    let gi = g.inner();
    let n = g.dim();
    let mut defect = 0.0_f64;
    for j in 0..n {
        for i in 0..n {
            defect = defect.max((gi[(i, j)] + gi[(j, i)].conj()).norm());
        }
    }
    let norm = g.max_abs();
    if defect > ANTIHERMITIAN_TOL * norm.max(f64::MIN_POSITIVE) && defect > 0.0 {
        return Err(Error::NotAntiHermitian { defect, norm });
    }

    let i_unit = Complex64::new(0.0, 1.0);
    let mut out = DMatrix::<Complex64>::zeros(n, n);
    let mut unitarity_defect = 0.0_f64;
    for block in components(gi) {
        let k = block.len();
        if k == 1 {
            let d = gi[(block[0], block[0])];
            // the real part is a rounding-level Hermitian defect
            out[(block[0], block[0])] = Complex64::new(0.0, d.im).exp();
            continue;
        }
        // H = iG, symmetrised to remove rounding-level asymmetry
        let h = DMatrix::from_fn(k, k, |a, b| {
            let x = i_unit * gi[(block[a], block[b])];
            let y = i_unit * gi[(block[b], block[a])];
            (x + y.conj()) * 0.5
        });
        let eig = h.symmetric_eigen();
        let phases = eig.eigenvalues.map(|lam| Complex64::new(0.0, -lam).exp());
        let v = &eig.eigenvectors;
        let mut vd = v.clone();
        for (c, ph) in phases.iter().enumerate() {
            let col = vd.column(c).map(|x| x * ph);
            vd.set_column(c, &col);
        }
        let e = &vd * v.adjoint();
        let gram = e.adjoint() * &e - DMatrix::<Complex64>::identity(k, k);
        unitarity_defect = unitarity_defect.max(block_op_norm(&gram));
        for (a, &ia) in block.iter().enumerate() {
            for (b, &ib) in block.iter().enumerate() {
                out[(ia, ib)] = e[(a, b)];
            }
        }
    }
    let matrix = ComplexMatrix::new(out)?;
    Ok(UnitaryResult {
        matrix,
        unitarity_defect,
    })
}

/// The single diagonal offset `d = i - j` carrying every nonzero entry, if any.
fn single_offset(g: &DMatrix<Complex64>) -> Option<isize> {
    let n = g.nrows();
    let mut offset = None;
    for j in 0..n {
        for i in 0..n {
            if g[(i, j)] != Complex64::new(0.0, 0.0) {
                let d = i as isize - j as isize;
                match offset {
                    None => offset = Some(d),
                    Some(o) if o != d => return None,
                    _ => {}
                }
            }
        }
    }
    offset
}

/// `exp(G)` for a general square matrix.
///
/// Diagonal matrices and matrices supported on a single off-diagonal (which are
/// nilpotent) are exponentiated exactly; everything else goes through
/// scaling-and-squaring of a Taylor series truncated at relative size `tol`.
pub fn exp_general(g: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    if !(tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            requirement: "tol > 0",
        });
    }
    let n = g.dim();
    let gi = g.inner();
    let out = if g.is_diagonal() {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = gi[(i, i)].exp();
        }
        m
    } else {
        match single_offset(gi) {
            Some(d) => nilpotent_exp(gi, d),
            None => taylor_exp(gi, tol),
        }
    };
    ComplexMatrix::new(out)
}

/// Exact exponential of a matrix with entries only on diagonal offset `d != 0`.
fn nilpotent_exp(g: &DMatrix<Complex64>, d: isize) -> DMatrix<Complex64> {
    let n = g.nrows() as isize;
    let mut m = DMatrix::<Complex64>::identity(n as usize, n as usize);
    for j in 0..n {
        let mut i = j;
        let mut val = Complex64::new(1.0, 0.0);
        let mut k = 1.0;
        loop {
            let next = i + d;
            if next < 0 || next >= n {
                break;
            }
            val = val * g[(next as usize, i as usize)] / k;
            if val == Complex64::new(0.0, 0.0) {
                break;
            }
            m[(next as usize, j as usize)] = val;
            i = next;
            k += 1.0;
        }
    }
    m
}

fn taylor_exp(g: &DMatrix<Complex64>, tol: f64) -> DMatrix<Complex64> {
    let n = g.nrows();
    let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = g * Complex64::new(scale, 0.0);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    let floor = (tol * 1e-3).max(f64::EPSILON * 0.25);
    for k in 1..200 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let t = term.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if t <= floor {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
        if !sum.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let r = exp_antihermitian(&ComplexMatrix::zeros(6)).unwrap();
        assert_eq!(r.matrix, ComplexMatrix::identity(6));
        assert_eq!(r.unitarity_defect, 0.0);
        assert_eq!(
            exp_general(&ComplexMatrix::zeros(3), 1e-14).unwrap(),
            ComplexMatrix::identity(3)
        );
    }

    #[test]
    fn rejects_hermitian_generator() {
        let g = ComplexMatrix::from_fn(3, |i, j| c((i + j) as f64, 0.0));
        assert!(matches!(
            exp_antihermitian(&g),
            Err(Error::NotAntiHermitian { .. })
        ));
    }

    #[test]
    fn two_by_two_rotation() {
        // exp(t [[0,-1],[1,0]]) is a rotation by t
        let t = 0.7;
        let g = ComplexMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 1) => c(-t, 0.0),
            (1, 0) => c(t, 0.0),
            _ => c(0.0, 0.0),
        });
        let r = exp_antihermitian(&g).unwrap();
        assert!((r.matrix[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-15);
        assert!((r.matrix[(1, 0)] - c(t.sin(), 0.0)).norm() < 1e-15);
        let e = exp_general(&g, 1e-15).unwrap();
        assert!((&e - &r.matrix).max_abs() < 1e-14);
    }

    #[test]
    fn diagonal_exponential_is_exact() {
        let d = [c(0.3, 0.0), c(-2.0, 1.0), c(5.0, 0.0)];
        let e = exp_general(&ComplexMatrix::from_diagonal(&d), 1e-12).unwrap();
        for (i, di) in d.iter().enumerate() {
            assert_eq!(e[(i, i)], di.exp());
        }
    }

    #[test]
    fn nilpotent_matches_taylor() {
        let g = ComplexMatrix::from_fn(6, |i, j| {
            if i == j + 1 {
                c(0.4 * i as f64, -0.1)
            } else {
                c(0.0, 0.0)
            }
        });
        let exact = exp_general(&g, 1e-15).unwrap();
        let series = ComplexMatrix::new(taylor_exp(g.inner(), 1e-15)).unwrap();
        assert!((&exact - &series).max_abs() < 1e-13);
    }

    #[test]
    fn overflow_is_reported() {
        let g = ComplexMatrix::from_diagonal(&[c(800.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(exp_general(&g, 1e-12), Err(Error::Overflow));
        let h = ComplexMatrix::from_fn(2, |_, _| c(800.0, 0.0));
        assert_eq!(exp_general(&h, 1e-12), Err(Error::Overflow));
    }

    #[test]
    fn block_decomposition_finds_parity_sectors() {
        let g = ComplexMatrix::from_fn(6, |i, j| {
            if i == j + 2 {
                c(1.0, 0.0)
            } else if j == i + 2 {
                c(-1.0, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let blocks = components(g.inner());
        assert_eq!(blocks, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        let r = exp_antihermitian(&g).unwrap();
        assert!(r.unitarity_defect < 1e-14);
        assert_eq!(r.matrix[(1, 0)], c(0.0, 0.0));
    }
}
