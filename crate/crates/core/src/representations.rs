//! The vector representation of Uq(gl(M|N)), the evaluation representations
//! `φ_ζ = π ∘ ε ∘ Γ_ζ` of the loop superalgebra, coproduct images and the
//! defining relations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded_matrix::{graded_flip, q_supercommutator, supercommutator, GradedSpace, RootGradedElement, SuperMatrix};
use crate::root_data::{AffineRoot, Parity, RootSystem, SuperRank};
use crate::scalars::{ipow, QContext};
use crate::C64;

/// Integers `s_0..s_L` defining the ℤ-grading, with `s = Σ s_i ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradingVector(Vec<i64>);

impl GradingVector {
    pub fn new(s: Vec<i64>, rank: &SuperRank) -> Result<Self> {
        if s.len() != rank.dim() {
            return Err(Error::Config(format!("grading needs {} entries, got {}", rank.dim(), s.len())));
        }
        if s.iter().sum::<i64>() == 0 {
            return Err(Error::Config("the grading total s must be nonzero".into()));
        }
        Ok(Self(s))
    }

    /// `s_i = 1` for every `i`.
    pub fn standard(rank: &SuperRank) -> Self {
        Self(vec![1; rank.dim()])
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn s(&self, i: usize) -> i64 {
        self.0[i]
    }

    /// `s = Σ s_i`.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    /// `s_ij = s_i + … + s_{j-1}`.
    pub fn s_ij(&self, i: usize, j: usize) -> i64 {
        self.0[i..j].iter().sum()
    }
}

/// The vector representation `π` of Uq(gl(M|N)).
#[derive(Debug, Clone, PartialEq)]
pub struct VectorRep {
    rank: SuperRank,
    ctx: QContext,
    space: GradedSpace,
}

/// `π` for the given rank.
pub fn pi_generators(rank: &SuperRank, ctx: &QContext) -> VectorRep {
    VectorRep { rank: *rank, ctx: *ctx, space: GradedSpace::vector(rank) }
}

impl VectorRep {
    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    fn unit(&self, i: usize, j: usize) -> SuperMatrix {
        SuperMatrix::unit(&self.space, i - 1, j - 1)
    }

    /// `π(q^{Σ_k c_k K_k})`.
    pub fn q_cartan(&self, coeffs: &[f64]) -> SuperMatrix {
        let diag: Vec<C64> = coeffs.iter().map(|&c| self.ctx.pow(c)).collect();
        SuperMatrix::diagonal(&self.space, &diag).expect("diagonal of matching size")
    }

    /// `π(q^{ν K_k})`.
    pub fn q_k(&self, k: usize, nu: f64) -> SuperMatrix {
        let mut c = vec![0.0; self.rank.dim()];
        c[k - 1] = nu;
        self.q_cartan(&c)
    }

    /// `π(q^{ν H_i})` with `H_i = K_i - (-1)^{[i]+[i+1]} K_{i+1}`.
    pub fn q_h(&self, i: usize, nu: f64) -> SuperMatrix {
        let mut c = vec![0.0; self.rank.dim()];
        c[i - 1] = nu;
        c[i] = -nu * (self.rank.d(i) * self.rank.d(i + 1)) as f64;
        self.q_cartan(&c)
    }

    pub fn e(&self, i: usize) -> SuperMatrix {
        self.unit(i, i + 1)
    }

    pub fn f(&self, i: usize) -> SuperMatrix {
        self.unit(i + 1, i)
    }

    /// `π(E_ij)` from `E_{i,k+1} = E_ik E_{k,k+1} - q^{d_k} E_{k,k+1} E_ik`.
    pub fn cw_e(&self, i: usize, j: usize) -> SuperMatrix {
        let mut x = self.e(i);
        for k in i + 1..j {
            let y = self.e(k);
            x = &(&x * &y) - &(&y * &x).scale(self.ctx.powi(self.rank.d(k)));
        }
        x
    }

    /// `π(F_ij)` from `F_{i,k+1} = F_{k,k+1} F_ik - q^{-d_k} F_ik F_{k,k+1}`.
    pub fn cw_f(&self, i: usize, j: usize) -> SuperMatrix {
        let mut x = self.f(i);
        for k in i + 1..j {
            let y = self.f(k);
            x = &(&y * &x) - &(&x * &y).scale(self.ctx.powi(-self.rank.d(k)));
        }
        x
    }
}

/// Generators of the loop superalgebra whose coproduct is used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    E(usize),
    F(usize),
    /// `q^{ν h_i}`.
    QH { i: usize, nu: f64 },
}

impl std::fmt::Display for Generator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Generator::E(i) => write!(f, "e_{i}"),
            Generator::F(i) => write!(f, "f_{i}"),
            Generator::QH { i, nu } => write!(f, "q^({nu} h_{i})"),
        }
    }
}

/// The evaluation representation `φ_ζ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationRep {
    system: RootSystem,
    ctx: QContext,
    zeta: C64,
    grading: GradingVector,
    space: GradedSpace,
    /// Exponents of the diagonal of `φ_ζ(q^{h_i})`, per `i`.
    cartan_exponents: Vec<Vec<i64>>,
    e: Vec<SuperMatrix>,
    f: Vec<SuperMatrix>,
}

/// `φ_ζ` for the given data.
pub fn evaluation_rep(rank: &SuperRank, ctx: &QContext, zeta: C64, grading: &GradingVector) -> Result<EvaluationRep> {
    EvaluationRep::new(rank, ctx, zeta, grading)
}

impl EvaluationRep {
    pub fn new(rank: &SuperRank, ctx: &QContext, zeta: C64, grading: &GradingVector) -> Result<Self> {
        if zeta.norm() == 0.0 || !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::Config(format!("spectral parameter {zeta} must be finite and nonzero")));
        }
        if grading.as_slice().len() != rank.dim() || grading.total() == 0 {
            return Err(Error::Config("grading does not match the rank or has s = 0".into()));
        }
        let pi = pi_generators(rank, ctx);
        let dim = rank.dim();
        let (mut e, mut f) = jimbo_images(&pi, rank);
        for i in 0..dim {
            let g = ipow(zeta, grading.s(i));
            e[i] = e[i].scale(g);
            f[i] = f[i].scale(g.inv());
        }
        let mut cartan_exponents = Vec::with_capacity(dim);
        let mut h0 = vec![0; dim];
        h0[0] = -1;
        h0[dim - 1] = -1;
        cartan_exponents.push(h0);
        for i in 1..dim {
            let mut hi = vec![0; dim];
            hi[i - 1] = 1;
            hi[i] = -rank.d(i) * rank.d(i + 1);
            cartan_exponents.push(hi);
        }
        Ok(Self {
            system: RootSystem::new(*rank),
            ctx: *ctx,
            zeta,
            grading: grading.clone(),
            space: GradedSpace::vector(rank),
            cartan_exponents,
            e,
            f,
        })
    }

    /// The same representation at another spectral parameter.
    pub fn at_zeta(&self, zeta: C64) -> Result<Self> {
        Self::new(self.rank(), &self.ctx, zeta, &self.grading)
    }

    pub fn system(&self) -> &RootSystem {
        &self.system
    }

    pub fn rank(&self) -> &SuperRank {
        self.system.rank()
    }

    pub fn ctx(&self) -> &QContext {
        &self.ctx
    }

    pub fn zeta(&self) -> C64 {
        self.zeta
    }

    pub fn grading(&self) -> &GradingVector {
        &self.grading
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    /// `φ_ζ(e_i)`, `0 <= i <= L`.
    pub fn e(&self, i: usize) -> &SuperMatrix {
        &self.e[i]
    }

    /// `φ_ζ(f_i)`, `0 <= i <= L`.
    pub fn f(&self, i: usize) -> &SuperMatrix {
        &self.f[i]
    }

    /// `φ_ζ(e_i)` tagged with the root `α_i`.
    pub fn e_element(&self, i: usize) -> RootGradedElement {
        let root = AffineRoot::simple(self.rank(), i).coefficients(self.rank());
        RootGradedElement::new(root, self.e[i].clone(), self.rank()).expect("simple generators are homogeneous")
    }

    /// `φ_ζ(f_i)` tagged with the root `-α_i`.
    pub fn f_element(&self, i: usize) -> RootGradedElement {
        let root = AffineRoot::simple(self.rank(), i).negated().coefficients(self.rank());
        RootGradedElement::new(root, self.f[i].clone(), self.rank()).expect("simple generators are homogeneous")
    }

    /// The exponents `⟨λ_k, h_i⟩` on the diagonal of `φ_ζ(q^{h_i})`.
    pub fn cartan_exponents(&self, i: usize) -> &[i64] {
        &self.cartan_exponents[i]
    }

    /// `φ_ζ(q^{ν h_i})`.
    pub fn cartan(&self, i: usize, nu: f64) -> SuperMatrix {
        let mut c = vec![0.0; self.rank().rank() + 1];
        c[i] = nu;
        self.cartan_product(&c)
    }

    /// `φ_ζ(q^{Σ_i c_i h_i})`.
    pub fn cartan_product(&self, coeffs: &[f64]) -> SuperMatrix {
        let dim = self.rank().dim();
        let diag: Vec<C64> = (0..dim)
            .map(|k| {
                let x: f64 = coeffs.iter().enumerate().map(|(i, c)| c * self.cartan_exponents[i][k] as f64).sum();
                self.ctx.pow(x)
            })
            .collect();
        SuperMatrix::diagonal(&self.space, &diag).expect("diagonal of matching size")
    }

    /// `φ_ζ(q_i^{± h_i}) = φ_ζ(q^{± d_i h_i})`.
    pub fn q_i_h_i(&self, i: usize, sign: f64) -> SuperMatrix {
        self.cartan(i, sign * self.rank().d(i) as f64)
    }

    /// The image of a coproduct tensor leg.
    fn generator(&self, g: Generator) -> SuperMatrix {
        match g {
            Generator::E(i) => self.e[i].clone(),
            Generator::F(i) => self.f[i].clone(),
            Generator::QH { i, nu } => self.cartan(i, nu),
        }
    }
}

/// `π(ε(q^{ν h_i}))`, computed from the Jimbo homomorphism.
pub fn jimbo_cartan(rank: &SuperRank, ctx: &QContext, i: usize, nu: f64) -> SuperMatrix {
    let pi = pi_generators(rank, ctx);
    let dim = rank.dim();
    if i == 0 {
        let mut c = vec![0.0; dim];
        c[0] = -nu;
        c[dim - 1] -= nu;
        pi.q_cartan(&c)
    } else {
        pi.q_h(i, nu)
    }
}

fn jimbo_images(pi: &VectorRep, rank: &SuperRank) -> (Vec<SuperMatrix>, Vec<SuperMatrix>) {
    let dim = rank.dim();
    let mut c = vec![0.0; dim];
    c[0] = rank.d(1) as f64;
    c[dim - 1] = rank.d(dim) as f64;
    let k_plus = pi.q_cartan(&c);
    let k_minus = pi.q_cartan(&c.iter().map(|x| -x).collect::<Vec<_>>());
    let mut e = vec![(&pi.cw_f(1, dim) * &k_plus).scale(C64::new(-1.0, 0.0))];
    let mut f = vec![&k_minus * &pi.cw_e(1, dim)];
    for i in 1..dim {
        e.push(pi.e(i));
        f.push(pi.f(i));
    }
    (e, f)
}

fn check_pair(rep1: &EvaluationRep, rep2: &EvaluationRep) -> Result<()> {
    if rep1.rank() != rep2.rank() || rep1.ctx.q() != rep2.ctx.q() {
        return Err(Error::ShapeMismatch("representations differ in rank or q".into()));
    }
    Ok(())
}

/// `(φ1 ⊗ φ2)(Δ(g))` with `Δ(e_i) = e_i ⊗ 1 + q_i^{h_i} ⊗ e_i`,
/// `Δ(f_i) = f_i ⊗ q_i^{-h_i} + 1 ⊗ f_i` and `Δ(q^x) = q^x ⊗ q^x`.
pub fn coproduct_image(g: Generator, rep1: &EvaluationRep, rep2: &EvaluationRep) -> Result<SuperMatrix> {
    check_pair(rep1, rep2)?;
    let id1 = SuperMatrix::identity(&rep1.space);
    let id2 = SuperMatrix::identity(&rep2.space);
    Ok(match g {
        Generator::QH { .. } => rep1.generator(g).graded_kron(&rep2.generator(g)),
        Generator::E(i) => &rep1.e[i].graded_kron(&id2) + &rep1.q_i_h_i(i, 1.0).graded_kron(&rep2.e[i]),
        Generator::F(i) => &rep1.f[i].graded_kron(&rep2.q_i_h_i(i, -1.0)) + &id1.graded_kron(&rep2.f[i]),
    })
}

/// `(φ1 ⊗ φ2)(Δ′(g))` with `Δ′ = Π ∘ Δ`.
pub fn opposite_coproduct_image(g: Generator, rep1: &EvaluationRep, rep2: &EvaluationRep) -> Result<SuperMatrix> {
    let swapped = coproduct_image(g, rep2, rep1)?;
    graded_flip(&swapped, &rep2.space, &rep1.space)
}

/// One named residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub name: String,
    pub residual: f64,
}

/// Residuals of the defining relations in a representation.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub entries: Vec<RelationResidual>,
}

impl RelationReport {
    fn push(&mut self, name: String, residual: f64) {
        self.entries.push(RelationResidual { name, residual });
    }

    pub fn max_residual(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }
}

/// Evaluates every defining relation of Uq(L(sl(M|N))) in `rep`. Neighbours
/// `i ± 1` are taken cyclically on the affine diagram. For `M + N = 3` the
/// quartic relations are replaced by the two quintic ones.
pub fn check_defining_relations(rep: &EvaluationRep) -> Result<RelationReport> {
    let sys = rep.system();
    let rank = *rep.rank();
    let ctx = rep.ctx();
    let nodes = rank.rank() + 1;
    let b1 = &sys.cartan().b1;
    let a1 = &sys.cartan().a1;
    let id = SuperMatrix::identity(rep.space());
    let mut report = RelationReport::default();
    let br = |x: &RootGradedElement, y: &RootGradedElement| q_supercommutator(x, y, sys, ctx);
    let e: Vec<_> = (0..nodes).map(|i| rep.e_element(i)).collect();
    let f: Vec<_> = (0..nodes).map(|i| rep.f_element(i)).collect();

    for nu in [0.7, -1.3] {
        let d: Vec<f64> = (0..nodes).map(|i| rank.d(i) as f64 * nu).collect();
        report.push(format!("q^(nu c) = 1, nu = {nu}"), rep.cartan_product(&d).max_abs_diff(&id));
    }
    for i in 0..nodes {
        let prod = &rep.cartan(i, 0.4) * &rep.cartan(i, 1.1);
        report.push(format!("q^x1 q^x2 = q^(x1+x2), h_{i}"), prod.max_abs_diff(&rep.cartan(i, 1.5)));
    }
    for j in 0..nodes {
        let nu = 0.9;
        let h = rep.cartan(j, nu);
        let hinv = rep.cartan(j, -nu);
        for i in 0..nodes {
            let w = ctx.pow(nu * a1[(j, i)] as f64);
            let ce = &(&h * rep.e(i)) * &hinv;
            let cf = &(&h * rep.f(i)) * &hinv;
            report.push(format!("weight e_{i} under h_{j}"), ce.max_abs_diff(&rep.e(i).scale(w)));
            report.push(format!("weight f_{i} under h_{j}"), cf.max_abs_diff(&rep.f(i).scale(w.inv())));
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            let lhs = br(&e[i], &f[j])?;
            let rhs = if i == j {
                let qi = ctx.powi(rank.d(i));
                (&rep.q_i_h_i(i, 1.0) - &rep.q_i_h_i(i, -1.0)).scale((qi - qi.inv()).inv())
            } else {
                SuperMatrix::zeros(rep.space())
            };
            report.push(format!("[[e_{i}, f_{j}]]"), lhs.matrix().max_abs_diff(&rhs));
        }
    }
    for i in 0..nodes {
        for j in 0..nodes {
            if b1[(i, j)] == 0 {
                report.push(format!("[[e_{i}, e_{j}]] = 0"), br(&e[i], &e[j])?.matrix().max_abs());
                report.push(format!("[[f_{i}, f_{j}]] = 0"), br(&f[i], &f[j])?.matrix().max_abs());
            }
        }
    }
    let next = |i: usize| (i + 1) % nodes;
    let prev = |i: usize| (i + nodes - 1) % nodes;
    for i in 0..nodes {
        if b1[(i, i)] == 0 {
            continue;
        }
        for j in [next(i), prev(i)] {
            let se = br(&e[i], &br(&e[i], &e[j])?)?;
            let sf = br(&f[i], &br(&f[i], &f[j])?)?;
            report.push(format!("serre e_{i}, e_{j}"), se.matrix().max_abs());
            report.push(format!("serre f_{i}, f_{j}"), sf.matrix().max_abs());
        }
    }
    let m = rank.m();
    let quartic = if rank.dim() > 3 { vec![(prev(m), m, next(m), m), (1, 0, rank.rank(), 0)] } else { vec![] };
    for &(a, b, c, d) in &quartic {
        let qe = br(&br(&br(&e[a], &e[b])?, &e[c])?, &e[d])?;
        let qf = br(&br(&br(&f[a], &f[b])?, &f[c])?, &f[d])?;
        report.push(format!("quartic e_{a} e_{b} e_{c} e_{d}"), qe.matrix().max_abs());
        report.push(format!("quartic f_{a} f_{b} f_{c} f_{d}"), qf.matrix().max_abs());
    }
    if rank.dim() == 3 {
        for (name, g) in [("e", &e), ("f", &f)] {
            let lhs = br(&g[0], &br(&g[2], &br(&g[0], &br(&g[2], &g[1])?)?)?)?;
            let rhs = br(&g[2], &br(&g[0], &br(&g[2], &br(&g[0], &g[1])?)?)?)?;
            report.push(format!("quintic {name}"), lhs.matrix().max_abs_diff(rhs.matrix()));
        }
    }
    Ok(report)
}

/// Parity of `e_i` and `f_i`.
pub fn generator_parity(rank: &SuperRank, i: usize) -> Parity {
    rank.simple_parity(i)
}

/// `⟦π(E_i), π(F_i)⟧ - (π(q_i^{H_i}) - π(q_i^{-H_i})) / (q_i - q_i^{-1})`, maximized over `i`.
pub fn gl_relation_residual(pi: &VectorRep, rank: &SuperRank, ctx: &QContext) -> f64 {
    (1..rank.dim())
        .map(|i| {
            let p = rank.simple_parity(i);
            let lhs = supercommutator(&pi.e(i), p, &pi.f(i), p);
            let di = rank.d(i) as f64;
            let qi = ctx.powi(rank.d(i));
            let rhs = (&pi.q_h(i, di) - &pi.q_h(i, -di)).scale((qi - qi.inv()).inv());
            lhs.max_abs_diff(&rhs)
        })
        .fold(0.0, f64::max)
}
