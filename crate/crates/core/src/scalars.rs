//! Scalar conventions: the deformation parameter, q-numbers, q-exponentials
//! and truncated power series with scalar or matrix coefficients.

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Default truncation order for every series computation.
pub const DEFAULT_SERIES_ORDER: usize = 40;
/// Default numerical tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Minimal admissible distance `|q^n - 1|` for exponents used in series work.
pub const ROOT_OF_UNITY_GUARD: f64 = 1e-6;

/// The deformation parameter `q = exp(hbar)` together with the numerical
/// settings shared by all computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QContext {
    q: C64,
    hbar: C64,
    tolerance: f64,
    series_order: usize,
}

impl QContext {
    /// Context with the default tolerance and series order. `hbar` is the
    /// principal logarithm of `q`.
    pub fn new(q: C64) -> Result<Self> {
        Self::with_options(q, DEFAULT_TOLERANCE, DEFAULT_SERIES_ORDER)
    }

    pub fn with_options(q: C64, tolerance: f64, series_order: usize) -> Result<Self> {
        if !(q.re.is_finite() && q.im.is_finite()) || q.norm() == 0.0 {
            return Err(Error::DegenerateQ(format!("q = {q} must be finite and nonzero")));
        }
        if !(tolerance >= 0.0) {
            return Err(Error::Config(format!("tolerance {tolerance} must be nonnegative")));
        }
        if series_order == 0 {
            return Err(Error::Config("series order must be positive".into()));
        }
        Ok(Self { q, hbar: q.ln(), tolerance, series_order })
    }

    /// Context defined by `hbar` directly; keeps the given branch.
    pub fn from_hbar(hbar: C64, tolerance: f64, series_order: usize) -> Result<Self> {
        let mut ctx = Self::with_options(hbar.exp(), tolerance, series_order)?;
        ctx.hbar = hbar;
        Ok(ctx)
    }

    pub fn q(&self) -> C64 {
        self.q
    }

    pub fn hbar(&self) -> C64 {
        self.hbar
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn series_order(&self) -> usize {
        self.series_order
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_series_order(mut self, order: usize) -> Self {
        self.series_order = order.max(1);
        self
    }

    /// The context for `q^n`, with `hbar` scaled accordingly.
    pub fn at_power(&self, n: i64) -> Self {
        Self { q: self.powi(n), hbar: self.hbar * n as f64, ..*self }
    }

    /// `q^ν = exp(ν hbar)`.
    pub fn pow(&self, nu: f64) -> C64 {
        (self.hbar * nu).exp()
    }

    /// `q^ν` for complex ν.
    pub fn cpow(&self, nu: C64) -> C64 {
        (self.hbar * nu).exp()
    }

    /// Integer power of `q` by repeated multiplication.
    pub fn powi(&self, n: i64) -> C64 {
        ipow(self.q, n)
    }

    /// `q - q^{-1}`.
    pub fn q_minus_qinv(&self) -> C64 {
        self.q - self.q.inv()
    }

    /// `[n]_q` for an integer argument, computed with integer powers.
    pub fn bracket(&self, n: i64) -> Result<C64> {
        let den = self.checked_denominator()?;
        Ok((self.powi(n) - self.powi(-n)) / den)
    }

    fn checked_denominator(&self) -> Result<C64> {
        let den = self.q_minus_qinv();
        if den.norm() <= self.tolerance || den.norm() == 0.0 {
            return Err(Error::DegenerateQ(format!("|q - 1/q| = {:e}", den.norm())));
        }
        Ok(den)
    }

    /// Rejects q when `|q^n - 1|` falls below the root-of-unity guard for some
    /// `1 <= n <= n_max`.
    pub fn ensure_generic(&self, n_max: usize) -> Result<()> {
        for n in 1..=n_max {
            let distance = (self.powi(n as i64) - 1.0).norm();
            if distance < ROOT_OF_UNITY_GUARD {
                return Err(Error::NearRootOfUnity { n, distance });
            }
        }
        Ok(())
    }
}

/// Largest entry modulus of a matrix.
pub fn max_modulus(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `z^n` for any integer `n`.
pub fn ipow(z: C64, n: i64) -> C64 {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        z.inv().powu((-n) as u32)
    }
}

/// `(-1)^n` as a float.
pub fn sign_pow(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `[ν]_q = (q^ν - q^{-ν}) / (q - q^{-1})` with `q^ν = exp(ν hbar)`.
pub fn q_number(nu: C64, ctx: &QContext) -> Result<C64> {
    let den = ctx.checked_denominator()?;
    Ok((ctx.cpow(nu) - ctx.cpow(-nu)) / den)
}

/// `(n)_t = (1 - t^n) / (1 - t)`, equal to `n` at `t = 1`.
pub fn t_number(n: usize, t: C64) -> C64 {
    if t == C64::new(1.0, 0.0) {
        return C64::new(n as f64, 0.0);
    }
    (C64::new(1.0, 0.0) - t.powu(n as u32)) / (C64::new(1.0, 0.0) - t)
}

/// `Σ_{n ≥ 0} x^n / ((1)_t (2)_t ⋯ (n)_t)` truncated at the context order.
/// The sum stops as soon as a power of `x` is exactly zero, so nilpotent
/// arguments never touch the factorials past their nilpotency index.
pub fn q_exponential(x: &CMatrix, q_base: C64, ctx: &QContext) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", x.nrows(), x.ncols())));
    }
    let dim = x.nrows();
    let mut result = CMatrix::identity(dim, dim);
    let mut term = CMatrix::identity(dim, dim);
    for n in 1..=ctx.series_order() {
        term = &term * x;
        if term.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            break;
        }
        let tn = t_number(n, q_base);
        if tn.norm() <= ctx.tolerance() || tn.norm() == 0.0 {
            return Err(Error::DegenerateBase { n, value: tn.norm() });
        }
        term /= tn;
        result += &term;
    }
    Ok(result)
}

/// `F_m(ζ) = Σ_{n=1}^{order} ζ^n / (n [m]_{q^n})`.
pub fn f_m(zeta: C64, m: i64, ctx: &QContext) -> Result<C64> {
    if zeta.norm() >= 1.0 {
        return Err(Error::Divergence(format!("|zeta| = {} >= 1", zeta.norm())));
    }
    if m == 0 {
        return Err(Error::Domain("F_m needs m != 0".into()));
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut zn = C64::new(1.0, 0.0);
    for n in 1..=ctx.series_order() {
        zn *= zeta;
        let b = checked_bracket_at_power(ctx, n as i64, m)?;
        sum += zn / (n as f64 * b);
    }
    Ok(sum)
}

/// `F_m(q^k x) - F_m(q^{-k} x)` summed termwise. The `n`-th term behaves
/// like `(|x| Q^{|k|-|m|+1})^n` with `Q = max(|q|, 1/|q|)`, so for
/// `|k| <= |m| - 1` the sum converges on `|x| < 1` even when `|q^{±k} x| >= 1`.
pub fn f_m_difference(x: C64, m: i64, k: i64, ctx: &QContext) -> Result<C64> {
    let big_q = ctx.q().norm().max(1.0 / ctx.q().norm());
    let ratio = x.norm() * big_q.powi((k.abs() - m.abs() + 1).max(0) as i32);
    if x.norm() >= 1.0 || ratio >= 1.0 {
        return Err(Error::Divergence(format!("|x| = {}, term ratio {ratio} >= 1", x.norm())));
    }
    if m == 0 {
        return Err(Error::Domain("F_m needs m != 0".into()));
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut xn = C64::new(1.0, 0.0);
    for n in 1..=ctx.series_order() {
        xn *= x;
        let n = n as i64;
        let b = checked_bracket_at_power(ctx, n, m)?;
        sum += xn * (ctx.powi(n * k) - ctx.powi(-n * k)) / (n as f64 * b);
    }
    Ok(sum)
}

fn checked_bracket_at_power(ctx: &QContext, n: i64, m: i64) -> Result<C64> {
    let b = ctx.at_power(n).bracket(m)?;
    if b.norm() <= ctx.tolerance() {
        return Err(Error::DegenerateQ(format!("[{m}]_(q^{n}) = {b}")));
    }
    Ok(b)
}

/// Coefficient ring for [`TruncatedSeries`].
pub trait SeriesCoeff: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, s: C64) -> Self;
    fn max_abs_diff(&self, other: &Self) -> f64;
    fn same_shape(&self, other: &Self) -> bool;
    /// Exact commutation test.
    fn commutes_with(&self, other: &Self) -> bool;
}

impl SeriesCoeff for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        C64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: C64) -> Self {
        self * s
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).norm()
    }
    fn same_shape(&self, _other: &Self) -> bool {
        true
    }
    fn commutes_with(&self, _other: &Self) -> bool {
        true
    }
}

impl SeriesCoeff for CMatrix {
    fn zero_like(&self) -> Self {
        CMatrix::zeros(self.nrows(), self.ncols())
    }
    fn one_like(&self) -> Self {
        CMatrix::identity(self.nrows(), self.ncols())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, s: C64) -> Self {
        self * s
    }
    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
    fn same_shape(&self, other: &Self) -> bool {
        self.shape() == other.shape()
    }
    fn commutes_with(&self, other: &Self) -> bool {
        let diagonal = |m: &CMatrix| m.iter().enumerate().all(|(k, z)| k % (m.nrows() + 1) == 0 || *z == C64::new(0.0, 0.0));
        (diagonal(self) && diagonal(other)) || self * other == other * self
    }
}

/// Power series `Σ_{k=0}^{order} c_k u^k` truncated at a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<C> {
    coeffs: Vec<C>,
}

impl<C: SeriesCoeff> TruncatedSeries<C> {
    /// Builds a series from `order + 1` coefficients of a common shape.
    pub fn new(coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Domain("a truncated series needs order >= 1".into()));
        }
        if !coeffs.iter().all(|c| c.same_shape(&coeffs[0])) {
            return Err(Error::ShapeMismatch("series coefficients differ in shape".into()));
        }
        Ok(Self { coeffs })
    }

    /// The series with constant term `template.one_like()` and nothing else.
    pub fn one(template: &C, order: usize) -> Self {
        let mut coeffs = vec![template.zero_like(); order.max(1) + 1];
        coeffs[0] = template.one_like();
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() || !self.coeffs[0].same_shape(&other.coeffs[0]) {
            return Err(Error::ShapeMismatch("series of different order or shape".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Ok(Self { coeffs })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.scale(s)).collect() }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order();
        let zero = self.coeffs[0].zero_like();
        let coeffs = (0..=order)
            .map(|k| {
                (0..=k).fold(zero.clone(), |acc, i| acc.add(&self.coeffs[i].mul(&other.coeffs[k - i])))
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// Largest coefficientwise deviation.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }

    fn with_zero_constant(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = coeffs[0].zero_like();
        Self { coeffs }
    }

    fn commutative(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, a)| self.coeffs[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// `log f`. With pairwise commuting coefficients this uses the
    /// recurrence from `f (log f)′ = f′`, `g_n = f_n - (1/n) Σ_{k<n} k g_k f_{n-k}`,
    /// which avoids the cancellations of the power sum
    /// `Σ_{m ≥ 1} (-1)^{m+1} X^m / m`, `X = f - 1`, used otherwise.
    pub fn log(&self, tolerance: f64) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let dev = c0.max_abs_diff(&c0.one_like());
        if dev > tolerance {
            return Err(Error::Domain(format!("constant coefficient deviates from 1 by {dev:e}")));
        }
        if self.commutative() {
            let zero = c0.zero_like();
            let mut g = vec![zero.clone(); self.order() + 1];
            for n in 1..=self.order() {
                let acc = (1..n).fold(zero.clone(), |acc, k| acc.add(&g[k].mul(&self.coeffs[n - k]).scale(C64::new(k as f64, 0.0))));
                g[n] = self.coeffs[n].add(&acc.scale(C64::new(-1.0 / n as f64, 0.0)));
            }
            return Ok(Self { coeffs: g });
        }
        let x = self.with_zero_constant();
        let mut result = x.scale(C64::new(0.0, 0.0));
        let mut power = x.clone();
        for m in 1..=self.order() {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            result = result.add(&power.scale(C64::new(sign / m as f64, 0.0)))?;
            power = power.mul(&x)?;
        }
        Ok(result)
    }

    /// `exp g` for `g` with vanishing constant term. Commuting coefficients
    /// use `h_n = (1/n) Σ_{k=1}^{n} k g_k h_{n-k}`, otherwise `Σ_{m ≥ 0} g^m / m!`.
    pub fn exp(&self, tolerance: f64) -> Result<Self> {
        let c0 = &self.coeffs[0];
        let dev = c0.max_abs_diff(&c0.zero_like());
        if dev > tolerance {
            return Err(Error::Domain(format!("constant coefficient deviates from 0 by {dev:e}")));
        }
        if self.commutative() {
            let zero = c0.zero_like();
            let mut h = vec![c0.one_like()];
            for n in 1..=self.order() {
                let acc = (1..=n).fold(zero.clone(), |acc, k| acc.add(&self.coeffs[k].mul(&h[n - k]).scale(C64::new(k as f64, 0.0))));
                h.push(acc.scale(C64::new(1.0 / n as f64, 0.0)));
            }
            return Ok(Self { coeffs: h });
        }
        let g = self.with_zero_constant();
        let mut result = Self::one(c0, self.order());
        let mut power = result.clone();
        for m in 1..=self.order() {
            power = power.mul(&g)?.scale(C64::new(1.0 / m as f64, 0.0));
            result = result.add(&power)?;
        }
        Ok(result)
    }
}

/// Logarithm of a series with unit constant term.
pub fn series_log<C: SeriesCoeff>(f: &TruncatedSeries<C>, tolerance: f64) -> Result<TruncatedSeries<C>> {
    f.log(tolerance)
}

/// Exponential of a series with vanishing constant term.
pub fn series_exp<C: SeriesCoeff>(g: &TruncatedSeries<C>, tolerance: f64) -> Result<TruncatedSeries<C>> {
    g.exp(tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ctx() -> QContext {
        QContext::new(c(1.1, 0.3)).unwrap()
    }

    #[test]
    fn q_number_small_values() {
        let ctx = ctx();
        assert_eq!(q_number(c(0.0, 0.0), &ctx).unwrap(), c(0.0, 0.0));
        assert!((q_number(c(1.0, 0.0), &ctx).unwrap() - 1.0).norm() < 1e-15);
        let q = ctx.q();
        assert!((q_number(c(2.0, 0.0), &ctx).unwrap() - (q + q.inv())).norm() < 1e-14);
        assert!((ctx.bracket(2).unwrap() - (q + q.inv())).norm() < 1e-14);
    }

    #[test]
    fn degenerate_q_is_rejected() {
        let ctx = QContext::new(c(1.0, 0.0)).unwrap();
        assert!(matches!(q_number(c(1.0, 0.0), &ctx), Err(Error::DegenerateQ(_))));
        assert!(QContext::new(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn root_of_unity_guard() {
        let ctx = QContext::new(C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 5.0)).unwrap();
        assert!(ctx.ensure_generic(4).is_ok());
        assert!(matches!(ctx.ensure_generic(5), Err(Error::NearRootOfUnity { n: 5, .. })));
    }

    #[test]
    fn q_number_near_classical_limit() {
        let ctx = QContext::new(c(1.0 + 1e-6, 0.0)).unwrap();
        for nu in [0.5, 1.0, 2.5, -3.0, 7.0] {
            assert!((q_number(c(nu, 0.0), &ctx).unwrap() - nu).norm() < 1e-4);
        }
    }

    #[test]
    fn q_exponential_zero_and_nilpotent() {
        let ctx = ctx();
        let zero = CMatrix::zeros(3, 3);
        assert_eq!(q_exponential(&zero, ctx.q(), &ctx).unwrap(), CMatrix::identity(3, 3));
        let mut x = CMatrix::zeros(3, 3);
        x[(0, 2)] = c(0.7, -1.3);
        let expected = CMatrix::identity(3, 3) + &x;
        for base in [ctx.q(), c(-1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)] {
            assert_eq!(q_exponential(&x, base, &ctx).unwrap(), expected);
        }
    }

    #[test]
    fn q_exponential_matches_direct_summation() {
        let ctx = QContext::new(c(1.2, 0.1)).unwrap().with_series_order(10);
        let mut x = CMatrix::zeros(3, 3);
        x[(0, 1)] = c(0.4, 0.2);
        x[(0, 2)] = c(-1.1, 0.5);
        x[(1, 2)] = c(0.9, -0.3);
        let t = c(2.0, 0.0);
        let got = q_exponential(&x, t, &ctx).unwrap();
        let mut direct = CMatrix::identity(3, 3);
        let mut fact = c(1.0, 0.0);
        let mut power = CMatrix::identity(3, 3);
        for n in 1..=20usize {
            power = &power * &x;
            let tn: C64 = (0..n).map(|k| t.powu(k as u32)).sum();
            fact *= tn;
            direct += &power / fact;
        }
        assert!(got.max_abs_diff(&direct) < 1e-14);
        // ((1)_2 (2)_2) = 3 is the second-order denominator.
        let x01x12 = x[(0, 1)] * x[(1, 2)];
        assert!((got[(0, 2)] - (x[(0, 2)] + x01x12 / 3.0)).norm() < 1e-14);
    }

    #[test]
    fn q_exponential_degenerate_base() {
        let ctx = ctx();
        let mut x = CMatrix::zeros(2, 2);
        x[(0, 0)] = c(0.5, 0.0);
        assert!(matches!(q_exponential(&x, c(-1.0, 0.0), &ctx), Err(Error::DegenerateBase { n: 2, .. })));
    }

    #[test]
    fn f_m_cases() {
        let ctx = ctx();
        assert_eq!(f_m(c(0.0, 0.0), 3, &ctx).unwrap(), c(0.0, 0.0));
        let z = c(0.3, 0.2);
        let want = -(c(1.0, 0.0) - z).ln();
        let got = f_m(z, 1, &ctx.with_series_order(200)).unwrap();
        assert!((got - want).norm() < 1e-14);
        assert!(matches!(f_m(c(1.0, 0.0), 2, &ctx), Err(Error::Divergence(_))));
    }

    #[test]
    fn f_m_tail_bound() {
        let base = ctx();
        let z = c(0.5, -0.3);
        let order = base.series_order();
        let a = f_m(z, 3, &base).unwrap();
        let b = f_m(z, 3, &base.with_series_order(2 * order)).unwrap();
        assert!((a - b).norm() < z.norm().powi(order as i32) / order as f64);
    }

    #[test]
    fn f_m_difference_agrees_with_two_calls() {
        let ctx = QContext::new(c(1.05, 0.1)).unwrap().with_series_order(80);
        let x = c(0.3, 0.1);
        let direct = f_m(ctx.powi(2) * x, 5, &ctx).unwrap() - f_m(ctx.powi(-2) * x, 5, &ctx).unwrap();
        assert!((f_m_difference(x, 5, 2, &ctx).unwrap() - direct).norm() < 1e-14);
    }

    #[test]
    fn series_log_basics() {
        let one = TruncatedSeries::one(&c(0.0, 0.0), 6);
        let l = series_log(&one, 1e-12).unwrap();
        assert!(l.coeffs().iter().all(|z| z.norm() == 0.0));

        let a = c(0.7, 0.4);
        let geo = TruncatedSeries::new((0..=8).map(|k| a.powu(k)).collect()).unwrap();
        let l = series_log(&geo, 1e-12).unwrap();
        for k in 1..=8u32 {
            assert!((l.coeff(k as usize) - a.powu(k) / k as f64).norm() < 1e-14);
        }

        let bad = TruncatedSeries::new(vec![c(2.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(series_log(&bad, 1e-12), Err(Error::Domain(_))));
    }

    #[test]
    fn series_log_diagonal_matrices_act_entrywise() {
        let order = 7;
        let d1 = [c(0.3, 0.1), c(-0.2, 0.5)];
        let d2 = [c(0.05, -0.1), c(0.4, 0.0)];
        let diag = |a: C64, b: C64| CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b]));
        let mut coeffs = vec![CMatrix::identity(2, 2), diag(d1[0], d1[1]), diag(d2[0], d2[1])];
        coeffs.resize(order + 1, CMatrix::zeros(2, 2));
        let m = series_log(&TruncatedSeries::new(coeffs).unwrap(), 1e-12).unwrap();
        for slot in 0..2 {
            let mut sc = vec![c(1.0, 0.0), d1[slot], d2[slot]];
            sc.resize(order + 1, c(0.0, 0.0));
            let s = series_log(&TruncatedSeries::new(sc).unwrap(), 1e-12).unwrap();
            for k in 0..=order {
                assert!((m.coeff(k)[(slot, slot)] - s.coeff(k)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn truncation_respected() {
        let x = TruncatedSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let sq = x.mul(&x).unwrap();
        assert_eq!(sq.order(), 2);
        assert_eq!(*sq.coeff(2), c(1.0, 0.0));
        let cube = sq.mul(&x).unwrap();
        assert!(cube.coeffs().iter().all(|z| z.norm() == 0.0));
        let other = TruncatedSeries::new(vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(x.add(&other).is_err());
    }

    #[test]
    fn log_stays_accurate_at_high_order() {
        let a = c(0.85, 0.3);
        let mut cs = vec![c(0.0, 0.0); 41];
        cs[0] = c(1.0, 0.0);
        cs[1] = -a;
        let f = TruncatedSeries::new(cs).unwrap();
        let g = series_log(&f, 1e-12).unwrap();
        for k in 1..=40 {
            let expected = -ipow(a, k as i64) / k as f64;
            assert!((*g.coeff(k) - expected).norm() <= 1e-13 * (1.0 + expected.norm()), "k = {k}");
        }
    }

    proptest! {
        #[test]
        fn q_number_is_odd(nu in -8.0f64..8.0, qr in 0.8f64..1.25, qa in -1.0f64..1.0) {
            let ctx = QContext::new(C64::from_polar(qr, qa)).unwrap();
            prop_assume!(ctx.q_minus_qinv().norm() > 1e-3);
            let a = q_number(c(nu, 0.0), &ctx).unwrap();
            let b = q_number(c(-nu, 0.0), &ctx).unwrap();
            prop_assert!((a + b).norm() <= 1e-12 * (1.0 + a.norm()));
        }

        #[test]
        fn log_exp_round_trip(coeffs in proptest::collection::vec((-0.5f64..0.5, -0.5f64..0.5), 6)) {
            let mut cs = vec![c(1.0, 0.0)];
            cs.extend(coeffs.into_iter().map(|(a, b)| c(a, b)));
            let f = TruncatedSeries::new(cs).unwrap();
            let back = series_exp(&series_log(&f, 1e-12).unwrap(), 1e-12).unwrap();
            prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
        }

        #[test]
        fn log_exp_round_trip_matrix(entries in proptest::collection::vec(-0.4f64..0.4, 12)) {
            let mut cs = vec![CMatrix::identity(2, 2)];
            for chunk in entries.chunks(4) {
                cs.push(CMatrix::from_iterator(2, 2, chunk.iter().map(|&v| c(v, 0.5 * v))));
            }
            let f = TruncatedSeries::new(cs).unwrap();
            let back = series_exp(&series_log(&f, 1e-12).unwrap(), 1e-12).unwrap();
            prop_assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
        }
    }
}
