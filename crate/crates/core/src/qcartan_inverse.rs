//! Tridiagonal inverses by the Θ/Φ recurrences and the inverse of the
//! q-deformed symmetrized Cartan matrix `B_q`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::root_data::{RootSystem, SuperRank};
use crate::scalars::QContext;
use crate::{CMatrix, C64};

/// An `L × L` tridiagonal matrix with sub-diagonal `α_2..α_L`, diagonal
/// `β_1..β_L` and super-diagonal `γ_1..γ_{L-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    sub: Vec<C64>,
    diag: Vec<C64>,
    sup: Vec<C64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<C64>, diag: Vec<C64>, sup: Vec<C64>) -> Result<Self> {
        let l = diag.len();
        if l == 0 || sub.len() + 1 != l || sup.len() + 1 != l {
            return Err(Error::ShapeMismatch(format!(
                "tridiagonal bands of lengths {}, {}, {}",
                sub.len(),
                diag.len(),
                sup.len()
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    /// Reads the three bands of a square matrix; fails if anything lies
    /// outside them.
    pub fn from_dense(m: &CMatrix) -> Result<Self> {
        let l = m.nrows();
        if !m.is_square() || l == 0 {
            return Err(Error::ShapeMismatch("tridiagonal matrix must be square and nonempty".into()));
        }
        for r in 0..l {
            for c in 0..l {
                if r.abs_diff(c) > 1 && m[(r, c)] != C64::new(0.0, 0.0) {
                    return Err(Error::Domain(format!("entry ({}, {}) lies outside the band", r + 1, c + 1)));
                }
            }
        }
        Self::new((1..l).map(|i| m[(i, i - 1)]).collect(), (0..l).map(|i| m[(i, i)]).collect(), (1..l).map(|i| m[(i - 1, i)]).collect())
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    fn alpha(&self, i: usize) -> C64 {
        self.sub[i - 2]
    }

    fn beta(&self, i: usize) -> C64 {
        self.diag[i - 1]
    }

    fn gamma(&self, i: usize) -> C64 {
        self.sup[i - 1]
    }

    pub fn to_dense(&self) -> CMatrix {
        let l = self.size();
        CMatrix::from_fn(l, l, |r, c| {
            let (i, j) = (r + 1, c + 1);
            if i == j {
                self.beta(i)
            } else if i == j + 1 {
                self.alpha(i)
            } else if j == i + 1 {
                self.gamma(i)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `Θ_0, …, Θ_L` from `Θ_i = β_i Θ_{i-1} - α_i γ_{i-1} Θ_{i-2}`,
    /// `Θ_{-1} = 0`, `Θ_0 = 1`.
    pub fn theta(&self) -> Vec<C64> {
        let l = self.size();
        let mut t = vec![C64::new(1.0, 0.0)];
        for i in 1..=l {
            let mut v = self.beta(i) * t[i - 1];
            if i >= 2 {
                v -= self.alpha(i) * self.gamma(i - 1) * t[i - 2];
            }
            t.push(v);
        }
        t
    }

    /// `Φ_1, …, Φ_{L+1}` (stored at indices `1..=L+1`; index 0 is unused)
    /// from `Φ_i = β_i Φ_{i+1} - γ_i α_{i+1} Φ_{i+2}`, `Φ_{L+1} = 1`,
    /// `Φ_{L+2} = 0`.
    pub fn phi(&self) -> Vec<C64> {
        let l = self.size();
        let mut p = vec![C64::new(0.0, 0.0); l + 3];
        p[l + 1] = C64::new(1.0, 0.0);
        for i in (1..=l).rev() {
            let mut v = self.beta(i) * p[i + 1];
            if i < l {
                v -= self.gamma(i) * self.alpha(i + 1) * p[i + 2];
            }
            p[i] = v;
        }
        p.truncate(l + 2);
        p
    }

    pub fn determinant(&self) -> C64 {
        self.theta()[self.size()]
    }

    /// The inverse, entry by entry from the Θ and Φ sequences.
    pub fn inverse(&self, tolerance: f64) -> Result<CMatrix> {
        let l = self.size();
        let theta = self.theta();
        let phi = self.phi();
        let det = theta[l];
        if det.norm() <= tolerance || det.norm() == 0.0 {
            return Err(Error::Singular(format!("|det| = {:e}", det.norm())));
        }
        // Θ_{k} lives at theta[k] for k >= 0; Θ_{-1} = 0 is handled inline.
        let th = |k: usize| theta[k];
        let ph = |k: usize| if k <= l + 1 { phi[k] } else { C64::new(0.0, 0.0) };
        Ok(CMatrix::from_fn(l, l, |r, c| {
            let (i, j) = (r + 1, c + 1);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            if i < j {
                let g: C64 = (i..j).map(|k| self.gamma(k)).product();
                g * th(i - 1) * ph(j + 1) * sign / det
            } else if i == j {
                th(i - 1) * ph(i + 1) / det
            } else {
                let a: C64 = (j + 1..=i).map(|k| self.alpha(k)).product();
                a * th(j - 1) * ph(i + 1) * sign / det
            }
        }))
    }
}

/// Inverse of a tridiagonal matrix.
pub fn tridiag_inverse(u: &Tridiagonal, tolerance: f64) -> Result<CMatrix> {
    u.inverse(tolerance)
}

/// `B_q` from the case table: sub- and super-diagonal `∓1`, diagonal
/// `[2]_q`, `0`, `-[2]_q` before, at and after the odd node.
pub fn bq_tridiagonal(rank: &SuperRank, ctx: &QContext) -> Result<Tridiagonal> {
    let l = rank.rank();
    let m = rank.m();
    let two = ctx.bracket(2)?;
    let one = C64::new(1.0, 0.0);
    let sub = (2..=l).map(|i| if i <= m { -one } else { one }).collect();
    let diag = (1..=l)
        .map(|i| match i.cmp(&m) {
            std::cmp::Ordering::Less => two,
            std::cmp::Ordering::Equal => C64::new(0.0, 0.0),
            std::cmp::Ordering::Greater => -two,
        })
        .collect();
    let sup = (1..l).map(|i| if i < m { -one } else { one }).collect();
    Tridiagonal::new(sub, diag, sup)
}

/// `B_q` with entries `[B_ij]_q`.
pub fn bq_from_cartan(rank: &SuperRank, ctx: &QContext) -> Result<CMatrix> {
    let b = &RootSystem::new(*rank).cartan().b.clone();
    let l = rank.rank();
    let mut out = CMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            out[(i, j)] = ctx.bracket(b[(i, j)])?;
        }
    }
    Ok(out)
}

fn closed_inverse<T>(rank: &SuperRank, num: impl Fn(i64) -> T) -> DMatrix<T>
where
    T: nalgebra::Scalar + Copy + std::ops::Mul<Output = T> + std::ops::Div<Output = T> + std::ops::Neg<Output = T>,
{
    let (m, n) = (rank.m() as i64, rank.n() as i64);
    let l = rank.rank();
    let den = num(m - n);
    DMatrix::from_fn(l, l, |r, c| {
        let (i, j) = ((r.min(c) + 1) as i64, (r.max(c) + 1) as i64);
        if j < m {
            num(i) * num(m - n - j) / den
        } else if j == m {
            -(num(i) * num(n) / den)
        } else if i < m {
            -(num(i) * num(m + n - j) / den)
        } else if i == m {
            -(num(m) * num(m + n - j) / den)
        } else {
            -(num(2 * m - i) * num(m + n - j) / den)
        }
    })
}

/// Closed form of `B_q^{-1}`, symmetric by construction.
pub fn bq_inverse_closed(rank: &SuperRank, ctx: &QContext) -> Result<CMatrix> {
    let den = ctx.bracket(rank.m_minus_n())?;
    if den.norm() <= ctx.tolerance() {
        return Err(Error::DegenerateQ(format!("[M - N]_q = {den}")));
    }
    Ok(closed_inverse(rank, |k| ctx.bracket(k).expect("q checked above")))
}

/// `C = B^{-1}`, the classical limit of the closed form.
pub fn c_matrix(rank: &SuperRank) -> DMatrix<f64> {
    closed_inverse(rank, |k| k as f64)
}
