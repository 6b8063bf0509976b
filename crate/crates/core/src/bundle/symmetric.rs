//! Monomial bases of `SᵏE` and the Gram matrix induced by a Hermitian metric.

use crate::numerics::linalg::CMatrix;
use crate::scalar::{lit, Complex, Real};

/// Exponent multi-indices of degree `k` in `r` variables, lexicographically
/// descending: `(k,0,…,0)` first, `(0,…,0,k)` last.
pub fn monomial_basis(r: usize, k: usize) -> Vec<Vec<u32>> {
    fn rec(r: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == r {
            prefix.push(left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e as u32);
            rec(r, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if r == 0 {
        return out;
    }
    rec(r, k, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Number of monomials, `C(k+r−1, r−1)`.
pub fn basis_len(r: usize, k: usize) -> usize {
    binomial(k + r - 1, r - 1) as usize
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Multinomial coefficient `k! / α!`.
pub fn multinomial(alpha: &[u32]) -> u128 {
    let k: u32 = alpha.iter().sum();
    let mut acc = factorial(k as usize);
    for &a in alpha {
        acc /= factorial(a as usize);
    }
    acc
}

/// `u^α = Π u_i^{α_i}`.
pub fn monomial<T: Real>(u: &[Complex<T>], alpha: &[u32]) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for (x, &a) in u.iter().zip(alpha) {
        for _ in 0..a {
            acc *= *x;
        }
    }
    acc
}

/// Coefficients of `u^k` in the monomial basis: `c_α = (k!/α!) u^α`.
pub fn power_coefficients<T: Real>(u: &[Complex<T>], basis: &[Vec<u32>]) -> Vec<Complex<T>> {
    basis
        .iter()
        .map(|alpha| monomial(u, alpha) * lit::<T>(multinomial(alpha) as f64))
        .collect()
}

fn expand(alpha: &[u32]) -> Vec<usize> {
    alpha
        .iter()
        .enumerate()
        .flat_map(|(i, &a)| std::iter::repeat_n(i, a as usize))
        .collect()
}

/// Permanent by Ryser's formula with Gray-code updates.
pub fn permanent<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let n = m.nrows();
    if n == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let mut row_sums = vec![Complex::new(T::zero(), T::zero()); n];
    let mut total = Complex::new(T::zero(), T::zero());
    let mut gray = 0usize;
    for step in 1..(1usize << n) {
        let next = step ^ (step >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << flipped) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, flipped)];
            } else {
                *s -= m[(i, flipped)];
            }
        }
        gray = next;
        let prod = row_sums
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |a, b| a * b);
        if (n - next.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Gram matrix of the monomial basis of `SᵏE` for the metric matrix `h`,
/// normalized so that `⟨v^k, w^k⟩ = ⟨v, w⟩^k`.
pub fn symmetric_power_gram<T: Real>(h: &CMatrix<T>, k: usize) -> CMatrix<T> {
    let r = h.nrows();
    let basis = monomial_basis(r, k);
    let idx: Vec<Vec<usize>> = basis.iter().map(|a| expand(a)).collect();
    let kf = lit::<T>(factorial(k) as f64);
    let n = basis.len();
    let mut g = CMatrix::<T>::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let sub = CMatrix::<T>::from_fn(k, k, |i, j| h[(idx[a][i], idx[b][j])]);
            let v = permanent(&sub) / kf;
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::linalg::{diag, quad_form};
    use proptest::prelude::*;

    #[test]
    fn basis_order_and_size() {
        let b = monomial_basis(3, 2);
        assert_eq!(
            b,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(basis_len(3, 6), 28);
        assert_eq!(monomial_basis(2, 10).len(), 11);
        assert_eq!(monomial_basis(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn permanent_small_cases() {
        let m = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[1.0, 2.0, 3.0, 4.0].map(|x| Complex::new(x, 0.0)),
        );
        assert_eq!(permanent(&m), Complex::new(10.0, 0.0));
        let ones = CMatrix::<f64>::from_element(4, 4, Complex::new(1.0, 0.0));
        assert!((permanent(&ones).re - 24.0).abs() < 1e-12);
    }

    #[test]
    fn flat_rank_two_square() {
        let g = symmetric_power_gram(&CMatrix::<f64>::identity(2, 2), 2);
        assert!((g[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!((g[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(g[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn first_power_is_the_metric() {
        let h = CMatrix::<f64>::from_row_slice(
            2,
            2,
            &[
                Complex::new(2.0, 0.0),
                Complex::new(0.3, 0.4),
                Complex::new(0.3, -0.4),
                Complex::new(1.0, 0.0),
            ],
        );
        let g = symmetric_power_gram(&h, 1);
        assert!((g - h).norm() < 1e-15);
    }

    #[test]
    fn diagonal_metric_gives_multinomial_diagonal() {
        let h = diag(&[2.0, 3.0, 5.0]);
        let k = 3;
        let g = symmetric_power_gram(&h, k);
        for (a, alpha) in monomial_basis(3, k).iter().enumerate() {
            let expected = [2.0f64, 3.0, 5.0]
                .iter()
                .zip(alpha)
                .map(|(x, &e)| x.powi(e as i32))
                .product::<f64>()
                / multinomial(alpha) as f64;
            assert!((g[(a, a)].re - expected).abs() < 1e-12);
        }
        let off: f64 = (0..g.nrows())
            .flat_map(|i| (0..g.ncols()).map(move |j| (i, j)))
            .filter(|(i, j)| i != j)
            .map(|(i, j)| g[(i, j)].norm())
            .fold(0.0, f64::max);
        assert!(off < 1e-15);
    }

    fn arb_metric() -> impl Strategy<Value = CMatrix<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 18).prop_map(|v| {
            let a =
                CMatrix::<f64>::from_fn(3, 3, |i, j| Complex::new(v[3 * i + j], v[9 + 3 * i + j]));
            &a * a.adjoint() + CMatrix::<f64>::identity(3, 3)
        })
    }

    fn arb_vec() -> impl Strategy<Value = Vec<Complex<f64>>> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn power_norm_is_power_of_norm(h in arb_metric(), u in arb_vec(), k in 1usize..5) {
            let g = symmetric_power_gram(&h, k);
            let c = power_coefficients(&u, &monomial_basis(3, k));
            let lhs = quad_form(&g, &c);
            let rhs = quad_form(&h, &u).powi(k as i32);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
        }

        #[test]
        fn polarized_power_inner_product(h in arb_metric(), u in arb_vec(), v in arb_vec(), k in 1usize..4) {
            let g = symmetric_power_gram(&h, k);
            let basis = monomial_basis(3, k);
            let (cu, cv) = (power_coefficients(&u, &basis), power_coefficients(&v, &basis));
            // ⟨u^k, v^k⟩ = cv^* G cu against ⟨u, v⟩ = v^* H u
            let inner = |m: &CMatrix<f64>, x: &[Complex<f64>], y: &[Complex<f64>]| {
                let n = x.len();
                (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(Complex::new(0.0, 0.0), |acc, (i, j)| acc + y[i].conj() * m[(i, j)] * x[j])
            };
            let lhs = inner(&g, &cu, &cv);
            let rhs = inner(&h, &u, &v).powi(k as i32);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
        }
    }
}
