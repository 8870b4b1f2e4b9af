//! Transforms on functions of the Boolean lattice `{0,1}ⁿ`, stored as slices
//! of length `2ⁿ` indexed by bitmask.
//!
//! The square-free polynomial algebra `S[x₁…xₙ]/(xᵢ²)` uses the same
//! layout: coefficient of `x^I` at the mask of `I`. Its product is subset
//! convolution, computed here with ranked zeta transforms in `O(n²·2ⁿ)`.

use crate::scalar::Scalar;

fn bits(len: usize) -> usize {
    assert!(len.is_power_of_two(), "lattice functions have length 2^n, got {len}");
    len.trailing_zeros() as usize
}

/// `x[I] ← Σ_{J ⊇ I} x[J]`.
pub fn superset_zeta<S: Scalar>(x: &mut [S]) {
    for bit in (0..bits(x.len())).map(|i| 1 << i) {
        for idx in 0..x.len() {
            if idx & bit == 0 {
                x[idx] = x[idx].clone() + x[idx | bit].clone();
            }
        }
    }
}

/// Inverse of [`superset_zeta`].
pub fn superset_mobius<S: Scalar>(x: &mut [S]) {
    for bit in (0..bits(x.len())).map(|i| 1 << i) {
        for idx in 0..x.len() {
            if idx & bit == 0 {
                x[idx] = x[idx].clone() - x[idx | bit].clone();
            }
        }
    }
}

/// `x[I] ← Σ_{J ⊆ I} x[J]`.
pub fn subset_zeta<S: Scalar>(x: &mut [S]) {
    for bit in (0..bits(x.len())).map(|i| 1 << i) {
        for idx in 0..x.len() {
            if idx & bit != 0 {
                x[idx] = x[idx].clone() + x[idx ^ bit].clone();
            }
        }
    }
}

/// Inverse of [`subset_zeta`].
pub fn subset_mobius<S: Scalar>(x: &mut [S]) {
    for bit in (0..bits(x.len())).map(|i| 1 << i) {
        for idx in 0..x.len() {
            if idx & bit != 0 {
                x[idx] = x[idx].clone() - x[idx ^ bit].clone();
            }
        }
    }
}

/// Ranked zeta transform: `out[S][k] = Σ_{J ⊆ S, |J| = k} f[J]`.
fn ranked_zeta<S: Scalar>(f: &[S]) -> Vec<Vec<S>> {
    let n = bits(f.len());
    let mut ranked = vec![vec![S::zero(); n + 1]; f.len()];
    for (mask, x) in f.iter().enumerate() {
        ranked[mask][mask.count_ones() as usize] = x.clone();
    }
    for k in 0..=n {
        let mut layer: Vec<S> = ranked.iter().map(|r| r[k].clone()).collect();
        subset_zeta(&mut layer);
        for (r, x) in ranked.iter_mut().zip(layer) {
            r[k] = x;
        }
    }
    ranked
}

/// Inverse of [`ranked_zeta`], keeping only the diagonal `k = |I|`.
fn ranked_mobius_diagonal<S: Scalar>(ranked: Vec<Vec<S>>) -> Vec<S> {
    let len = ranked.len();
    let n = bits(len);
    let mut out = vec![S::zero(); len];
    for k in 0..=n {
        let mut layer: Vec<S> = ranked.iter().map(|r| r[k].clone()).collect();
        subset_mobius(&mut layer);
        for (mask, x) in layer.into_iter().enumerate() {
            if mask.count_ones() as usize == k {
                out[mask] = x;
            }
        }
    }
    out
}

/// Truncated product of polynomials in the rank variable.
fn poly_mul<S: Scalar>(p: &[S], q: &[S]) -> Vec<S> {
    let deg = p.len();
    let mut out = vec![S::zero(); deg];
    for (i, pi) in p.iter().enumerate() {
        if pi.is_zero() {
            continue;
        }
        for (j, qj) in q.iter().enumerate().take(deg - i) {
            if !qj.is_zero() {
                out[i + j] = out[i + j].clone() + pi.clone() * qj.clone();
            }
        }
    }
    out
}

/// Product in the square-free algebra (subset convolution):
/// `(f·g)[I] = Σ_{J ⊆ I} f[J]·g[I∖J]`.
pub fn multiply<S: Scalar>(f: &[S], g: &[S]) -> Vec<S> {
    assert_eq!(f.len(), g.len());
    let fr = ranked_zeta(f);
    let gr = ranked_zeta(g);
    let prod = fr.iter().zip(&gr).map(|(p, q)| poly_mul(p, q)).collect();
    ranked_mobius_diagonal(prod)
}

/// `coeffs[0] + Σ_{r ≥ 1} coeffs[r]·f^r` for `f` with zero constant term.
///
/// Powers beyond `n` vanish in the square-free algebra, so the series is
/// summed up to `r = min(n, coeffs.len() − 1)`.
pub fn power_series<S: Scalar>(f: &[S], coeffs: &[S]) -> Vec<S> {
    let n = bits(f.len());
    assert!(f[0].is_zero(), "power series needs a zero constant term");
    let ranked = ranked_zeta(f);
    let terms = n.min(coeffs.len().saturating_sub(1));
    let summed = ranked
        .into_iter()
        .map(|base| {
            let mut acc = vec![S::zero(); n + 1];
            acc[0] = coeffs.first().cloned().unwrap_or_else(S::zero);
            let mut power = base.clone();
            for (r, c) in coeffs.iter().enumerate().take(terms + 1).skip(1) {
                if r > 1 {
                    power = poly_mul(&power, &base);
                }
                for (a, p) in acc.iter_mut().zip(&power) {
                    *a = a.clone() + c.clone() * p.clone();
                }
            }
            acc
        })
        .collect();
    ranked_mobius_diagonal(summed)
}

/// Square-free `log(f)` for `f[∅] = 1`, via `Σ (−1)^{r+1} (f − 1)^r / r`.
pub fn log<S: Scalar>(f: &[S]) -> Vec<S> {
    let n = bits(f.len());
    let mut g = f.to_vec();
    g[0] = S::zero();
    let coeffs: Vec<S> = (0..=n as i64)
        .map(|r| if r == 0 { S::zero() } else { S::from_ratio(if r % 2 == 1 { 1 } else { -1 }, r) })
        .collect();
    power_series(&g, &coeffs)
}

/// Square-free `exp(h)` for `h[∅] = 0`, via `Σ h^r / r!`.
pub fn exp<S: Scalar>(h: &[S]) -> Vec<S> {
    let n = bits(h.len());
    let mut coeffs = vec![S::one()];
    let mut fact = S::one();
    for r in 1..=n as i64 {
        fact = fact * S::from_int(r);
        coeffs.push(S::one() / fact.clone());
    }
    power_series(h, &coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    /// O(3ⁿ) subset convolution straight from the definition.
    fn naive_multiply(f: &[Rational], g: &[Rational]) -> Vec<Rational> {
        (0..f.len())
            .map(|i| {
                let mut acc = q(0, 1);
                let mut j = i;
                loop {
                    acc += &f[j] * &g[i ^ j];
                    if j == 0 {
                        break;
                    }
                    j = (j - 1) & i;
                }
                acc
            })
            .collect()
    }

    fn sample(len: usize, seed: i64) -> Vec<Rational> {
        (0..len as i64).map(|i| q((i * 7 + seed) % 11 - 5, (i % 4) + 1)).collect()
    }

    #[test]
    fn zeta_mobius_round_trip() {
        let x = sample(16, 3);
        let mut y = x.clone();
        superset_zeta(&mut y);
        assert_eq!(y[0], x.iter().cloned().sum::<Rational>());
        superset_mobius(&mut y);
        assert_eq!(y, x);
        subset_zeta(&mut y);
        assert_eq!(y[15], x.iter().cloned().sum::<Rational>());
        subset_mobius(&mut y);
        assert_eq!(y, x);
    }

    #[test]
    fn fast_multiply_matches_naive() {
        for n in 0..=5 {
            let f = sample(1 << n, 1);
            let g = sample(1 << n, 4);
            assert_eq!(multiply(&f, &g), naive_multiply(&f, &g), "n = {n}");
        }
    }

    #[test]
    fn log_matches_naive_series() {
        let n = 4;
        let mut f = sample(1 << n, 2);
        f[0] = q(1, 1);
        let mut g = f.clone();
        g[0] = q(0, 1);
        let mut expected = vec![q(0, 1); 1 << n];
        let mut power = g.clone();
        for r in 1..=n as i64 {
            let c = q(if r % 2 == 1 { 1 } else { -1 }, r);
            for (e, p) in expected.iter_mut().zip(&power) {
                *e += &c * p;
            }
            power = naive_multiply(&power, &g);
        }
        assert_eq!(log(&f), expected);
        assert_eq!(exp(&expected), f);
    }
}
