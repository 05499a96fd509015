//! Super linear algebra on parity-graded spaces.
//!
//! Graded tensor products are realized as sign-twisted Kronecker products:
//! `(a⊗b)_{(i,k),(j,l)} = (-1)^{[k]([i]+[j])} a_ij b_kl`. With this embedding
//! `(a₁⊗b₁)(a₂⊗b₂) = (-1)^{[b₁][a₂]} (a₁a₂)⊗(b₁b₂)` holds for homogeneous
//! factors, so graded algebra reduces to ordinary matrix products.

use std::ops::{Add, Mul, Sub};

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::root_data::{Parity, RootSign, RootSystem, RootVector, SuperRank};
use crate::scalars::QContext;
use crate::{CMatrix, C64};

/// A finite-dimensional space with a parity attached to each basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    parities: Vec<Parity>,
}

impl GradedSpace {
    pub fn new(parities: Vec<Parity>) -> Self {
        Self { parities }
    }

    /// The vector representation space of gl(M|N).
    pub fn vector(rank: &SuperRank) -> Self {
        Self::new(rank.parities())
    }

    pub fn dim(&self) -> usize {
        self.parities.len()
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn parities(&self) -> &[Parity] {
        &self.parities
    }

    /// `self ⊗ other`, basis `(a, b) ↦ a·dim(other) + b`.
    pub fn tensor(&self, other: &GradedSpace) -> GradedSpace {
        let mut p = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.parities {
            for &b in &other.parities {
                p.push(a + b);
            }
        }
        GradedSpace::new(p)
    }
}

/// Dense matrix acting on a graded space.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperMatrix {
    space: GradedSpace,
    data: CMatrix,
}

impl SuperMatrix {
    pub fn new(space: GradedSpace, data: CMatrix) -> Result<Self> {
        if data.nrows() != space.dim() || data.ncols() != space.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} matrix on a space of dimension {}",
                data.nrows(),
                data.ncols(),
                space.dim()
            )));
        }
        if data.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self { space, data })
    }

    pub fn zeros(space: &GradedSpace) -> Self {
        Self { data: CMatrix::zeros(space.dim(), space.dim()), space: space.clone() }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        Self { data: CMatrix::identity(space.dim(), space.dim()), space: space.clone() }
    }

    pub fn diagonal(space: &GradedSpace, entries: &[C64]) -> Result<Self> {
        Self::new(space.clone(), CMatrix::from_diagonal(&DVector::from_column_slice(entries)))
    }

    /// `E_ij` on the vector representation, 1-based indices.
    pub fn matrix_unit(rank: &SuperRank, i: usize, j: usize) -> Result<Self> {
        let dim = rank.dim();
        if !(1..=dim).contains(&i) || !(1..=dim).contains(&j) {
            return Err(Error::IndexOutOfRange(format!("E_({i},{j}) in dimension {dim}")));
        }
        let mut m = Self::zeros(&GradedSpace::vector(rank));
        m.data[(i - 1, j - 1)] = C64::new(1.0, 0.0);
        Ok(m)
    }

    /// `E_ij` on an arbitrary graded space, 0-based indices.
    pub fn unit(space: &GradedSpace, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(space);
        m.data[(r, c)] = C64::new(1.0, 0.0);
        m
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut CMatrix {
        &mut self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[(r, c)]
    }

    /// Parity of the matrix unit at `(r, c)`.
    pub fn entry_parity(&self, r: usize, c: usize) -> Parity {
        self.space.parity(r) + self.space.parity(c)
    }

    /// Even and odd parts.
    pub fn parity_components(&self) -> (SuperMatrix, SuperMatrix) {
        let mut even = Self::zeros(&self.space);
        let mut odd = Self::zeros(&self.space);
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let target = if self.entry_parity(r, c) == Parity::Even { &mut even } else { &mut odd };
                target.data[(r, c)] = self.data[(r, c)];
            }
        }
        (even, odd)
    }

    /// The parity of a homogeneous matrix; `None` for a mixed one. The zero
    /// matrix is reported as even.
    pub fn homogeneous_parity(&self) -> Option<Parity> {
        let (even, odd) = self.parity_components();
        match (even.max_abs() > 0.0, odd.max_abs() > 0.0) {
            (_, false) => Some(Parity::Even),
            (false, true) => Some(Parity::Odd),
            (true, true) => None,
        }
    }

    /// Whether every entry of parity other than `p` is at most `tol` in modulus.
    pub fn is_homogeneous_of(&self, p: Parity, tol: f64) -> bool {
        (0..self.dim()).all(|r| {
            (0..self.dim()).all(|c| self.entry_parity(r, c) == p || self.data[(r, c)].norm() <= tol)
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { data: &self.data * s, space: self.space.clone() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SuperMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.data.iter().zip(other.data.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `Σ_i (-1)^[i] X_ii`.
    pub fn supertrace(&self) -> C64 {
        (0..self.dim()).map(|i| self.data[(i, i)] * self.space.parity(i).sign()).sum()
    }

    /// Graded Kronecker product on `self.space ⊗ other.space`.
    pub fn graded_kron(&self, other: &SuperMatrix) -> SuperMatrix {
        let (da, db) = (self.dim(), other.dim());
        let space = self.space.tensor(&other.space);
        let mut data = CMatrix::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self.data[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let pij = self.space.parity(i) + self.space.parity(j);
                for k in 0..db {
                    let s = other.space.parity(k).koszul(pij);
                    for l in 0..db {
                        data[(i * db + k, j * db + l)] = a * other.data[(k, l)] * s;
                    }
                }
            }
        }
        SuperMatrix { space, data }
    }

    fn check_same_space(&self, other: &SuperMatrix) {
        assert_eq!(self.space, other.space, "supermatrices live on different graded spaces");
    }
}

impl Mul for &SuperMatrix {
    type Output = SuperMatrix;
    fn mul(self, other: &SuperMatrix) -> SuperMatrix {
        self.check_same_space(other);
        SuperMatrix { data: &self.data * &other.data, space: self.space.clone() }
    }
}

impl Add for &SuperMatrix {
    type Output = SuperMatrix;
    fn add(self, other: &SuperMatrix) -> SuperMatrix {
        self.check_same_space(other);
        SuperMatrix { data: &self.data + &other.data, space: self.space.clone() }
    }
}

impl Sub for &SuperMatrix {
    type Output = SuperMatrix;
    fn sub(self, other: &SuperMatrix) -> SuperMatrix {
        self.check_same_space(other);
        SuperMatrix { data: &self.data - &other.data, space: self.space.clone() }
    }
}

/// One term `coeff · (E_{left} ⊗ E_{right})` of a tensor decomposition
/// (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensorTerm {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub coeff: C64,
}

fn check_tensor_shape(x: &SuperMatrix, left: &GradedSpace, right: &GradedSpace) -> Result<()> {
    if x.space != left.tensor(right) {
        return Err(Error::ShapeMismatch("operator does not live on the given tensor product".into()));
    }
    Ok(())
}

/// Writes an operator on `left ⊗ right` as a sum of graded matrix-unit
/// tensors; zero terms are dropped.
pub fn decompose(x: &SuperMatrix, left: &GradedSpace, right: &GradedSpace) -> Result<Vec<TensorTerm>> {
    check_tensor_shape(x, left, right)?;
    let (da, db) = (left.dim(), right.dim());
    let mut terms = Vec::new();
    for i in 0..da {
        for j in 0..da {
            let pij = left.parity(i) + left.parity(j);
            for k in 0..db {
                let s = right.parity(k).koszul(pij);
                for l in 0..db {
                    let v = x.data[(i * db + k, j * db + l)];
                    if v != C64::new(0.0, 0.0) {
                        terms.push(TensorTerm { left: (i, j), right: (k, l), coeff: v * s });
                    }
                }
            }
        }
    }
    Ok(terms)
}

/// The graded flip `Π(a⊗b) = (-1)^{[a][b]} b⊗a`, mapping operators on
/// `left ⊗ right` to operators on `right ⊗ left`.
pub fn graded_flip(x: &SuperMatrix, left: &GradedSpace, right: &GradedSpace) -> Result<SuperMatrix> {
    let mut out = SuperMatrix::zeros(&right.tensor(left));
    for t in decompose(x, left, right)? {
        let pa = left.parity(t.left.0) + left.parity(t.left.1);
        let pb = right.parity(t.right.0) + right.parity(t.right.1);
        let term = SuperMatrix::unit(right, t.right.0, t.right.1)
            .graded_kron(&SuperMatrix::unit(left, t.left.0, t.left.1));
        out = &out + &term.scale(t.coeff * pa.koszul(pb));
    }
    Ok(out)
}

/// Slots of a two-site operator inside a triple tensor product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriplePosition {
    P12,
    P13,
    P23,
}

/// Lifts an operator on `V ⊗ V` to `V ⊗ V ⊗ V` at the given position.
pub fn lift_to_triple(x: &SuperMatrix, v: &GradedSpace, position: TriplePosition) -> Result<SuperMatrix> {
    check_tensor_shape(x, v, v)?;
    let id = SuperMatrix::identity(v);
    Ok(match position {
        TriplePosition::P12 => x.graded_kron(&id),
        TriplePosition::P23 => id.graded_kron(x),
        TriplePosition::P13 => {
            let mut out = SuperMatrix::zeros(&v.tensor(v).tensor(v));
            for t in decompose(x, v, v)? {
                let a = SuperMatrix::unit(v, t.left.0, t.left.1);
                let b = SuperMatrix::unit(v, t.right.0, t.right.1);
                out = &out + &a.graded_kron(&id).graded_kron(&b).scale(t.coeff);
            }
            out
        }
    })
}

/// `XY - (-1)^{[X][Y]} YX` for homogeneous matrices of the given parities.
pub fn supercommutator(x: &SuperMatrix, px: Parity, y: &SuperMatrix, py: Parity) -> SuperMatrix {
    &(x * y) - &(y * x).scale(C64::new(px.koszul(py), 0.0))
}

/// A matrix image of a root vector, tagged with its root.
#[derive(Debug, Clone, PartialEq)]
pub struct RootGradedElement {
    root: RootVector,
    parity: Parity,
    matrix: SuperMatrix,
}

impl RootGradedElement {
    /// Checks that the matrix is homogeneous of the root's parity.
    pub fn new(root: RootVector, matrix: SuperMatrix, rank: &SuperRank) -> Result<Self> {
        if root.0.len() != rank.dim() {
            return Err(Error::ShapeMismatch("root vector length does not match the rank".into()));
        }
        let parity = root.parity(rank);
        let tol = 1e-12 * (1.0 + matrix.max_abs());
        if !matrix.is_homogeneous_of(parity, tol) {
            return Err(Error::Construction(format!("matrix is not homogeneous of parity {parity}")));
        }
        Ok(Self { root, parity, matrix })
    }

    pub fn root(&self) -> &RootVector {
        &self.root
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn matrix(&self) -> &SuperMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SuperMatrix {
        self.matrix
    }

    /// Same root and parity, rescaled matrix.
    pub fn scaled(&self, s: C64) -> Self {
        Self { matrix: self.matrix.scale(s), ..self.clone() }
    }
}

/// The q-supercommutator `⟦X, Y⟧`: for roots in `Q̂₊` it is
/// `XY - (-1)^{[X][Y]} q^{-(α|β)} YX`, for roots in `Q̂₋` it is
/// `YX - (-1)^{[X][Y]} q^{(α|β)} XY`, and for mixed signs `XY - (-1)^{[X][Y]} YX`.
pub fn q_supercommutator(
    x: &RootGradedElement,
    y: &RootGradedElement,
    system: &RootSystem,
    ctx: &QContext,
) -> Result<RootGradedElement> {
    let sx = x.root.sign_class();
    let sy = y.root.sign_class();
    let (Some(sx), Some(sy)) = (sx, sy) else {
        return Err(Error::Domain("q-supercommutator needs sign-homogeneous roots".into()));
    };
    let sign = C64::new(x.parity.koszul(y.parity), 0.0);
    let xy = &x.matrix * &y.matrix;
    let yx = &y.matrix * &x.matrix;
    let ab = system.bilinear_vec(&x.root, &y.root);
    let matrix = match (sx, sy) {
        (RootSign::Positive, RootSign::Positive) => &xy - &yx.scale(sign * ctx.powi(-ab)),
        (RootSign::Negative, RootSign::Negative) => &yx - &xy.scale(sign * ctx.powi(ab)),
        _ => &xy - &yx.scale(sign),
    };
    let root = &x.root + &y.root;
    Ok(RootGradedElement { parity: x.parity + y.parity, root, matrix })
}
