//! Roots of sl(M|N) and of its affinization.
//!
//! Indices follow the usual conventions: basis vectors `v_1..v_{M+N}`,
//! simple roots `α_0..α_L` with `L = M+N-1`, `α_ij = α_i + … + α_{j-1}` and
//! `δ = α_0 + … + α_L`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Element of ℤ₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_int(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    /// `(-1)^[self]`.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// `(-1)^{[self][other]}`.
    pub fn koszul(self, other: Parity) -> f64 {
        if self == Parity::Odd && other == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, other: Parity) -> Parity {
        Parity::from_int(self.bit() + other.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// The pair `(M, N)` with `M, N >= 1` and `M != N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SuperRank {
    m: usize,
    n: usize,
}

impl SuperRank {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::NonPositiveRank { m, n });
        }
        if m == n {
            return Err(Error::EqualRanks);
        }
        Ok(Self { m, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `M + N`, the dimension of the vector representation.
    pub fn dim(&self) -> usize {
        self.m + self.n
    }

    /// `L = M + N - 1`.
    pub fn rank(&self) -> usize {
        self.m + self.n - 1
    }

    /// `M - N` as a signed integer.
    pub fn m_minus_n(&self) -> i64 {
        self.m as i64 - self.n as i64
    }

    /// `[i]` for a basis index `1 <= i <= M+N`.
    pub fn index_parity(&self, i: usize) -> Parity {
        debug_assert!((1..=self.dim()).contains(&i));
        if i <= self.m {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `d_i = (-1)^[i]` for `1 <= i <= M+N`, and `d_0 = 1`.
    pub fn d(&self, i: usize) -> i64 {
        if i == 0 || i <= self.m {
            1
        } else {
            -1
        }
    }

    /// `o_i = (-1)^{i-1}` for `i < M` and `(-1)^i` for `i >= M`.
    pub fn o(&self, i: usize) -> i64 {
        let e = if i < self.m { i as i64 - 1 } else { i as i64 };
        if e.rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// Parity of the simple root `α_k`, `0 <= k <= L`.
    pub fn simple_parity(&self, k: usize) -> Parity {
        if k == 0 || k == self.m {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Parities `[1], …, [M+N]` in order.
    pub fn parities(&self) -> Vec<Parity> {
        (1..=self.dim()).map(|i| self.index_parity(i)).collect()
    }
}

impl fmt::Display for SuperRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sl({}|{})", self.m, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootSign {
    Positive,
    Negative,
}

/// Classification of a positive affine root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RootKind {
    /// `α_ij + nδ`.
    RealPlus { i: usize, j: usize, n: usize },
    /// `(δ - α_ij) + nδ`.
    RealMinusWrap { i: usize, j: usize, n: usize },
    /// `nδ`, labelled by a simple root `α_simple` with `1 <= simple <= L`.
    Imaginary { n: usize, simple: usize },
}

/// An affine root given by kind and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineRoot {
    pub kind: RootKind,
    pub sign: RootSign,
}

impl AffineRoot {
    pub fn real_plus(i: usize, j: usize, n: usize) -> Self {
        Self { kind: RootKind::RealPlus { i, j, n }, sign: RootSign::Positive }
    }

    pub fn real_minus_wrap(i: usize, j: usize, n: usize) -> Self {
        Self { kind: RootKind::RealMinusWrap { i, j, n }, sign: RootSign::Positive }
    }

    pub fn imaginary(n: usize, simple: usize) -> Self {
        Self { kind: RootKind::Imaginary { n, simple }, sign: RootSign::Positive }
    }

    /// The simple root `α_k`; `α_0 = δ - α_{1,M+N}`.
    pub fn simple(rank: &SuperRank, k: usize) -> Self {
        if k == 0 {
            Self::real_minus_wrap(1, rank.dim(), 0)
        } else {
            Self::real_plus(k, k + 1, 0)
        }
    }

    pub fn negated(self) -> Self {
        let sign = match self.sign {
            RootSign::Positive => RootSign::Negative,
            RootSign::Negative => RootSign::Positive,
        };
        Self { sign, ..self }
    }

    pub fn is_positive(&self) -> bool {
        self.sign == RootSign::Positive
    }

    pub fn is_real(&self) -> bool {
        !matches!(self.kind, RootKind::Imaginary { .. })
    }

    pub fn validate(&self, rank: &SuperRank) -> Result<()> {
        let dim = rank.dim();
        match self.kind {
            RootKind::RealPlus { i, j, .. } | RootKind::RealMinusWrap { i, j, .. } => {
                if !(1 <= i && i < j && j <= dim) {
                    return Err(Error::IndexOutOfRange(format!("root indices ({i}, {j}) for {rank}")));
                }
            }
            RootKind::Imaginary { n, simple } => {
                if n == 0 {
                    return Err(Error::Domain("imaginary roots need n >= 1".into()));
                }
                if !(1..=rank.rank()).contains(&simple) {
                    return Err(Error::IndexOutOfRange(format!("simple root index {simple} for {rank}")));
                }
            }
        }
        Ok(())
    }

    /// Coefficients `m_0..m_L` over the simple roots.
    pub fn coefficients(&self, rank: &SuperRank) -> RootVector {
        let len = rank.dim();
        let v = match self.kind {
            RootKind::RealPlus { i, j, n } => {
                let mut v = vec![n as i64; len];
                for k in i..j {
                    v[k] += 1;
                }
                v
            }
            RootKind::RealMinusWrap { i, j, n } => {
                let mut v = vec![n as i64 + 1; len];
                for k in i..j {
                    v[k] -= 1;
                }
                v
            }
            RootKind::Imaginary { n, .. } => vec![n as i64; len],
        };
        let v = RootVector(v);
        match self.sign {
            RootSign::Positive => v,
            RootSign::Negative => -v,
        }
    }

    /// The level `n` of the root.
    pub fn level(&self) -> usize {
        match self.kind {
            RootKind::RealPlus { n, .. } | RootKind::RealMinusWrap { n, .. } | RootKind::Imaginary { n, .. } => n,
        }
    }
}

impl fmt::Display for AffineRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == RootSign::Negative {
            f.write_str("-")?;
        }
        match self.kind {
            RootKind::RealPlus { i, j, n } => write!(f, "(a{i}{j}+{n}d)"),
            RootKind::RealMinusWrap { i, j, n } => write!(f, "((d-a{i}{j})+{n}d)"),
            RootKind::Imaginary { n, simple } => write!(f, "({n}d;a{simple})"),
        }
    }
}

/// Element of the affine root lattice, as coefficients over `α_0..α_L`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootVector(pub Vec<i64>);

impl RootVector {
    pub fn zero(rank: &SuperRank) -> Self {
        RootVector(vec![0; rank.dim()])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// `Positive` if all coefficients are `>= 0`, `Negative` if all are `<= 0`
    /// (the zero vector counts as positive), `None` otherwise.
    pub fn sign_class(&self) -> Option<RootSign> {
        if self.0.iter().all(|&c| c >= 0) {
            Some(RootSign::Positive)
        } else if self.0.iter().all(|&c| c <= 0) {
            Some(RootSign::Negative)
        } else {
            None
        }
    }

    /// `Σ m_k [α_k]` modulo 2.
    pub fn parity(&self, rank: &SuperRank) -> Parity {
        Parity::from_int(self.0[0] + self.0[rank.m()])
    }
}

impl Add for &RootVector {
    type Output = RootVector;
    fn add(self, other: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RootVector {
    type Output = RootVector;
    fn sub(self, other: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for RootVector {
    type Output = RootVector;
    fn neg(self) -> RootVector {
        RootVector(self.0.into_iter().map(|c| -c).collect())
    }
}

/// Cartan data of sl(M|N) and its affine extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartanData {
    /// `A_ij = ⟨α_j, h_i⟩`, `1 <= i, j <= L`.
    pub a: DMatrix<i64>,
    /// `B = D A`.
    pub b: DMatrix<i64>,
    /// Extended matrix over `0..=L`.
    pub a1: DMatrix<i64>,
    /// `B1 = D1 A1`.
    pub b1: DMatrix<i64>,
    /// `d_0..d_{M+N}`.
    pub d: Vec<i64>,
    /// `o_1..o_{M+N}` stored at indices `1..`; index 0 holds 1.
    pub o: Vec<i64>,
}

impl CartanData {
    pub fn new(rank: &SuperRank) -> Self {
        let dim = rank.dim();
        let l = rank.rank();
        // Pairing of ε_a (the weight of v_a) with K_b is δ_ab; the Cartan
        // elements h_i are combinations of the K_b.
        let h = |i: usize| -> Vec<i64> {
            let mut v = vec![0; dim + 1];
            if i == 0 {
                v[1] = -1;
                v[dim] -= 1;
            } else {
                v[i] = 1;
                v[i + 1] = -rank.d(i) * rank.d(i + 1);
            }
            v
        };
        let alpha = |k: usize| -> Vec<i64> {
            let mut v = vec![0; dim + 1];
            if k == 0 {
                v[1] = -1;
                v[dim] = 1;
            } else {
                v[k] = 1;
                v[k + 1] = -1;
            }
            v
        };
        let pair = |x: &[i64], y: &[i64]| -> i64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
        let a1 = DMatrix::from_fn(l + 1, l + 1, |i, j| pair(&alpha(j), &h(i)));
        let d: Vec<i64> = (0..=dim).map(|i| rank.d(i)).collect();
        let b1 = DMatrix::from_fn(l + 1, l + 1, |i, j| d[i] * a1[(i, j)]);
        let a = a1.view((1, 1), (l, l)).into_owned();
        let b = DMatrix::from_fn(l, l, |i, j| d[i + 1] * a[(i, j)]);
        let mut o = vec![1];
        o.extend((1..=dim).map(|i| rank.o(i)));
        Self { a, b, a1, b1, d, o }
    }

    /// `B1` computed from the form `(ε_i|ε_j) = d_i δ_ij` on the weights.
    pub fn b1_from_weights(rank: &SuperRank) -> DMatrix<i64> {
        let dim = rank.dim();
        let alpha = |k: usize| -> Vec<i64> {
            let mut v = vec![0; dim + 1];
            if k == 0 {
                v[1] = -1;
                v[dim] = 1;
            } else {
                v[k] = 1;
                v[k + 1] = -1;
            }
            v
        };
        let form = |x: &[i64], y: &[i64]| -> i64 { (1..=dim).map(|i| rank.d(i) * x[i] * y[i]).sum() };
        DMatrix::from_fn(dim, dim, |i, j| form(&alpha(i), &alpha(j)))
    }
}

/// A rank together with its Cartan data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystem {
    rank: SuperRank,
    cartan: CartanData,
}

impl RootSystem {
    pub fn new(rank: SuperRank) -> Self {
        Self { cartan: CartanData::new(&rank), rank }
    }

    pub fn rank(&self) -> &SuperRank {
        &self.rank
    }

    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    /// `(γ1|γ2)` on lattice vectors.
    pub fn bilinear_vec(&self, x: &RootVector, y: &RootVector) -> i64 {
        let b1 = &self.cartan.b1;
        let n = b1.nrows();
        let mut acc = 0;
        for i in 0..n {
            if x.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += x.0[i] * b1[(i, j)] * y.0[j];
            }
        }
        acc
    }

    pub fn bilinear(&self, x: &AffineRoot, y: &AffineRoot) -> i64 {
        self.bilinear_vec(&x.coefficients(&self.rank), &y.coefficients(&self.rank))
    }

    /// `[α_ij + nδ] = [(δ - α_ij) + nδ] = [i] + [j]`, `[nδ] = 0`.
    pub fn parity(&self, x: &AffineRoot) -> Parity {
        match x.kind {
            RootKind::RealPlus { i, j, .. } | RootKind::RealMinusWrap { i, j, .. } => {
                self.rank.index_parity(i) + self.rank.index_parity(j)
            }
            RootKind::Imaginary { .. } => Parity::Even,
        }
    }

    /// `h_γ` as coefficients `d_i m_i` over `h_0..h_L`.
    pub fn h_gamma(&self, x: &AffineRoot) -> Vec<i64> {
        self.h_gamma_vec(&x.coefficients(&self.rank))
    }

    pub fn h_gamma_vec(&self, x: &RootVector) -> Vec<i64> {
        x.0.iter().enumerate().map(|(i, m)| self.cartan.d[i] * m).collect()
    }

    /// All positive roots up to level `n_max`, in normal order.
    pub fn positive_roots(&self, n_max: usize) -> Vec<AffineRoot> {
        let dim = self.rank.dim();
        let mut roots = Vec::new();
        for n in 0..=n_max {
            for i in 1..dim {
                for j in i + 1..=dim {
                    roots.push(AffineRoot::real_plus(i, j, n));
                    roots.push(AffineRoot::real_minus_wrap(i, j, n));
                }
            }
            if n >= 1 {
                for k in 1..=self.rank.rank() {
                    roots.push(AffineRoot::imaginary(n, k));
                }
            }
        }
        roots.sort_by_key(order_key);
        roots
    }
}

fn order_key(x: &AffineRoot) -> (u8, i64, i64, i64) {
    match x.kind {
        RootKind::RealPlus { i, j, n } => (0, i as i64, j as i64, n as i64),
        RootKind::Imaginary { n, simple } => (1, n as i64, simple as i64, 0),
        RootKind::RealMinusWrap { i, j, n } => (2, i as i64, j as i64, -(n as i64)),
    }
}

/// The normal order on positive roots: `α_ij + mδ` (ordered by `(i, j)` then
/// `m`), then imaginary roots (by `(n, i)`), then `(δ - α_ij) + mδ` (ordered by
/// `(i, j)` then decreasing `m`).
pub fn normal_order_cmp(x: &AffineRoot, y: &AffineRoot) -> Result<Ordering> {
    if !x.is_positive() || !y.is_positive() {
        return Err(Error::Domain("normal order is defined on positive roots only".into()));
    }
    Ok(order_key(x).cmp(&order_key(y)))
}

/// Pairs `(α, β)` from `candidates` with `α + β = γ` and `α ≺ β`.
pub fn generating_pairs(system: &RootSystem, gamma: &AffineRoot, candidates: &[AffineRoot]) -> Vec<(AffineRoot, AffineRoot)> {
    let rank = system.rank();
    let target = gamma.coefficients(rank);
    let mut pairs = Vec::new();
    for (ia, a) in candidates.iter().enumerate() {
        let rest = &target - &a.coefficients(rank);
        for b in &candidates[ia + 1..] {
            if b.coefficients(rank) == rest {
                pairs.push((*a, *b));
            }
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ranks(max_dim: usize) -> Vec<SuperRank> {
        let mut out = Vec::new();
        for m in 1..max_dim {
            for n in 1..=(max_dim - m) {
                if m != n {
                    out.push(SuperRank::new(m, n).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn rank_validation() {
        assert_eq!(SuperRank::new(2, 2), Err(Error::EqualRanks));
        assert_eq!(Error::EqualRanks.to_string(), "M and N must differ");
        assert!(SuperRank::new(0, 3).is_err());
    }

    #[test]
    fn parities() {
        let r = SuperRank::new(2, 1).unwrap();
        let s = RootSystem::new(r);
        assert_eq!(s.parity(&AffineRoot::simple(&r, 2)), Parity::Odd);
        assert_eq!(s.parity(&AffineRoot::imaginary(3, 1)), Parity::Even);
        assert_eq!(s.parity(&AffineRoot::real_plus(1, 3, 0)), Parity::Odd);
        assert_eq!(s.parity(&AffineRoot::real_plus(1, 2, 4)), Parity::Even);
        for x in s.positive_roots(2) {
            assert_eq!(s.parity(&x), x.coefficients(&r).parity(&r), "{x}");
        }
    }

    #[test]
    fn sign_vectors() {
        let r = SuperRank::new(3, 2).unwrap();
        let c = CartanData::new(&r);
        assert_eq!(c.d, vec![1, 1, 1, 1, -1, -1]);
        assert_eq!(&c.o[1..], &[1, -1, -1, 1, -1]);
    }

    #[test]
    fn cartan_matrices_agree() {
        for r in ranks(8) {
            let c = CartanData::new(&r);
            assert_eq!(c.b1, CartanData::b1_from_weights(&r), "{r}");
            assert_eq!(c.b, c.b.transpose());
            assert_eq!(c.b1, c.b1.transpose());
            let l = r.rank();
            for i in 0..l {
                for j in 0..l {
                    assert_eq!(c.b[(i, j)], c.d[i + 1] * c.a[(i, j)]);
                    assert_eq!(c.b[(i, j)], c.b1[(i + 1, j + 1)]);
                }
            }
            for i in 1..=r.dim() {
                assert_eq!(c.d[i], if i <= r.m() { 1 } else { -1 });
            }
        }
    }

    #[test]
    fn sl21_cartan() {
        let c = CartanData::new(&SuperRank::new(2, 1).unwrap());
        assert_eq!(c.b, DMatrix::from_row_slice(2, 2, &[2, -1, -1, 0]));
        assert_eq!(c.b1, DMatrix::from_row_slice(3, 3, &[0, -1, 1, -1, 2, -1, 1, -1, 0]));
    }

    #[test]
    fn bilinear_relations() {
        for r in ranks(6) {
            let s = RootSystem::new(r);
            let dim = r.dim();
            let delta = AffineRoot::imaginary(1, 1);
            for i in 1..dim {
                for j in i + 1..=dim {
                    let aij = AffineRoot::real_plus(i, j, 0);
                    assert_eq!(s.bilinear(&aij, &aij), r.d(i) + r.d(j));
                    assert_eq!(s.bilinear(&delta, &aij), 0);
                    for l in j + 1..=dim {
                        let ajl = AffineRoot::real_plus(j, l, 0);
                        assert_eq!(s.bilinear(&aij, &ajl), -r.d(j));
                    }
                }
            }
            for x in s.positive_roots(2) {
                assert_eq!(s.bilinear(&delta, &x), 0);
            }
        }
    }

    #[test]
    fn h_gamma_examples() {
        let r = SuperRank::new(2, 1).unwrap();
        let s = RootSystem::new(r);
        assert_eq!(s.h_gamma(&AffineRoot::real_plus(1, 3, 0)), vec![0, 1, 1]);
        assert_eq!(s.h_gamma(&AffineRoot::imaginary(1, 1)), vec![1, 1, 1]);
        assert_eq!(s.h_gamma(&AffineRoot::simple(&r, 1)), vec![0, 1, 0]);
        let r = SuperRank::new(1, 3).unwrap();
        let s = RootSystem::new(r);
        assert_eq!(s.h_gamma(&AffineRoot::imaginary(1, 1)), s.cartan().d[..r.dim()].to_vec());
    }

    #[test]
    fn normal_order_examples() {
        let a12 = AffineRoot::real_plus(1, 2, 0);
        let a13 = AffineRoot::real_plus(1, 3, 0);
        assert_eq!(normal_order_cmp(&a12, &a13).unwrap(), Ordering::Less);
        let a12_3 = AffineRoot::real_plus(1, 2, 3);
        assert_eq!(normal_order_cmp(&a12_3, &AffineRoot::imaginary(1, 1)).unwrap(), Ordering::Less);
        let w2 = AffineRoot::real_minus_wrap(1, 2, 2);
        let w1 = AffineRoot::real_minus_wrap(1, 2, 1);
        assert_eq!(normal_order_cmp(&w2, &w1).unwrap(), Ordering::Less);
        assert!(normal_order_cmp(&a12.negated(), &a13).is_err());
    }

    #[test]
    fn positive_roots_listing() {
        let r = SuperRank::new(2, 1).unwrap();
        let s = RootSystem::new(r);
        let roots = s.positive_roots(0);
        let want = vec![
            AffineRoot::real_plus(1, 2, 0),
            AffineRoot::real_plus(1, 3, 0),
            AffineRoot::real_plus(2, 3, 0),
            AffineRoot::real_minus_wrap(1, 2, 0),
            AffineRoot::real_minus_wrap(1, 3, 0),
            AffineRoot::real_minus_wrap(2, 3, 0),
        ];
        assert_eq!(roots, want);
        for rr in ranks(6) {
            let s = RootSystem::new(rr);
            for n_max in 0..4 {
                let roots = s.positive_roots(n_max);
                let d = rr.dim();
                assert_eq!(roots.len(), d * (d - 1) * (n_max + 1) + (d - 1) * n_max);
                for w in roots.windows(2) {
                    assert_eq!(normal_order_cmp(&w[0], &w[1]).unwrap(), Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn normal_order_is_total() {
        for r in ranks(5) {
            let roots = RootSystem::new(r).positive_roots(3);
            for x in &roots {
                for y in &roots {
                    let xy = normal_order_cmp(x, y).unwrap();
                    assert_eq!(xy, normal_order_cmp(y, x).unwrap().reverse());
                    assert_eq!(xy == Ordering::Equal, x == y);
                    if xy != Ordering::Less {
                        continue;
                    }
                    for z in &roots {
                        if normal_order_cmp(y, z).unwrap() == Ordering::Less {
                            assert_eq!(normal_order_cmp(x, z).unwrap(), Ordering::Less);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn finite_roots_have_minimal_pairs() {
        for r in ranks(5) {
            let s = RootSystem::new(r);
            let finite: Vec<_> = s
                .positive_roots(0)
                .into_iter()
                .filter(|x| matches!(x.kind, RootKind::RealPlus { .. }))
                .collect();
            for g in &finite {
                let RootKind::RealPlus { i, j, .. } = g.kind else { unreachable!() };
                if j == i + 1 {
                    continue;
                }
                let found = generating_pairs(&s, g, &finite).into_iter().any(|(a, b)| {
                    normal_order_cmp(&a, g).unwrap() == Ordering::Less
                        && normal_order_cmp(g, &b).unwrap() == Ordering::Less
                });
                assert!(found, "{g} in {r}");
            }
        }
    }

    proptest! {
        #[test]
        fn bilinear_symmetric(seed in 0usize..1000, a in proptest::collection::vec(-3i64..4, 8), b in proptest::collection::vec(-3i64..4, 8)) {
            let all = ranks(8);
            let r = all[seed % all.len()];
            let s = RootSystem::new(r);
            let x = RootVector(a[..r.dim()].to_vec());
            let y = RootVector(b[..r.dim()].to_vec());
            prop_assert_eq!(s.bilinear_vec(&x, &y), s.bilinear_vec(&y, &x));
        }
    }
}
