//! Assembly of the R-operator on `V ⊗ V`.
//!
//! `R = ρ · R_{≺δ} · R_{∼δ} · R_{≻δ} · K`. Every factor has a closed form and
//! a construction from root-vector tables, and the product is compared
//! with the closed Perk–Schultz matrix.

use serde::{Deserialize, Serialize};

use crate::cartan_weyl::{a_gamma, build_root_vectors, u_matrix, unprimed_imaginary, RootVectorTable};
use crate::error::{Error, Result};
use crate::graded_matrix::{GradedSpace, SuperMatrix};
use crate::qcartan_inverse::c_matrix;
use crate::representations::{evaluation_rep, EvaluationRep, GradingVector};
use crate::root_data::{AffineRoot, SuperRank};
use crate::scalars::{f_m_difference, ipow, q_exponential, sign_pow, QContext};
use crate::{CMatrix, C64};

/// Points with `|1 - q² ζ^s|` below this are rejected as poles.
pub const POLE_GUARD: f64 = 1e-8;
/// Level cutoff for the real-root products.
pub const DEFAULT_PRODUCT_ORDER: usize = 60;
/// Level cutoff for the imaginary-root exponent.
pub const DEFAULT_SIM_ORDER: usize = 40;

/// The ratio `ζ12 = ζ1/ζ2` together with its grading powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Zeta12 {
    ratio: C64,
    grading: GradingVector,
}

impl Zeta12 {
    pub fn new(zeta1: C64, zeta2: C64, grading: &GradingVector) -> Result<Self> {
        if zeta1.norm() == 0.0 || zeta2.norm() == 0.0 || !zeta1.is_finite() || !zeta2.is_finite() {
            return Err(Error::Domain(format!("spectral parameters must be finite and nonzero, got {zeta1}, {zeta2}")));
        }
        Ok(Self { ratio: zeta1 / zeta2, grading: grading.clone() })
    }

    /// Directly from the ratio.
    pub fn from_ratio(ratio: C64, grading: &GradingVector) -> Self {
        Self { ratio, grading: grading.clone() }
    }

    pub fn ratio(&self) -> C64 {
        self.ratio
    }

    pub fn grading(&self) -> &GradingVector {
        &self.grading
    }

    pub fn pow(&self, k: i64) -> C64 {
        ipow(self.ratio, k)
    }

    /// `ζ12^s`.
    pub fn zs(&self) -> C64 {
        self.pow(self.grading.total())
    }

    /// `ζ12^{s_ij}` for `i < j`.
    pub fn s_ij(&self, i: usize, j: usize) -> C64 {
        self.pow(self.grading.s_ij(i, j))
    }

    /// `ζ12^{s - s_ji}` for `i > j`.
    pub fn s_wrap(&self, i: usize, j: usize) -> C64 {
        self.pow(self.grading.total() - self.grading.s_ij(j, i))
    }

    fn require_convergent(&self) -> Result<C64> {
        let zs = self.zs();
        if zs.norm() >= 1.0 {
            return Err(Error::Domain(format!("|zeta12^s| = {} >= 1", zs.norm())));
        }
        Ok(zs)
    }
}

/// Radius in `ζ12^s` of the truncated products and the imaginary-root series:
/// `min(|q|², |q|⁻²)`.
pub fn series_radius(ctx: &QContext) -> f64 {
    let a = ctx.q().norm();
    a.min(a.recip()).powi(2)
}

fn pair_space(rank: &SuperRank) -> GradedSpace {
    let v = GradedSpace::vector(rank);
    v.tensor(&v)
}

/// `E_ij ⊗ E_kl` embedded with the Koszul sign.
fn unit2(rank: &SuperRank, i: usize, j: usize, k: usize, l: usize) -> SuperMatrix {
    let v = GradedSpace::vector(rank);
    SuperMatrix::unit(&v, i - 1, j - 1).graded_kron(&SuperMatrix::unit(&v, k - 1, l - 1))
}

fn diag_pairs(rank: &SuperRank, f: impl Fn(usize, usize) -> C64) -> SuperMatrix {
    let d = rank.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 1..=d {
        for j in 1..=d {
            entries.push(f(i, j));
        }
    }
    SuperMatrix::diagonal(&pair_space(rank), &entries).expect("diagonal of matching size")
}

fn odd_sign(rank: &SuperRank, j: usize) -> f64 {
    rank.index_parity(j).sign()
}

fn normalization_exponent(rank: &SuperRank) -> f64 {
    let m = rank.m_minus_n() as f64;
    (m - 1.0) / m
}

/// `K` from the weights: the entry at `v_k ⊗ v_l` is
/// `q^{-Σ_{i,j} d_i d_j C_ij ⟨λ_k, h_i⟩⟨λ_l, h_j⟩}`.
pub fn k_operator_weights(rep1: &EvaluationRep, rep2: &EvaluationRep) -> Result<SuperMatrix> {
    if rep1.rank() != rep2.rank() {
        return Err(Error::ShapeMismatch("K needs two modules of the same rank".into()));
    }
    let rank = rep1.rank();
    let c = c_matrix(rank);
    let l = rank.rank();
    let ctx = rep1.ctx();
    let d = rank.dim();
    let mut entries = Vec::with_capacity(d * d);
    for k in 0..d {
        for kk in 0..d {
            let mut ex = 0.0;
            for i in 1..=l {
                for j in 1..=l {
                    let w1 = rep1.cartan_exponents(i)[k] as f64;
                    let w2 = rep2.cartan_exponents(j)[kk] as f64;
                    ex += (rank.d(i) * rank.d(j)) as f64 * c[(i - 1, j - 1)] * w1 * w2;
                }
            }
            entries.push(ctx.pow(-ex));
        }
    }
    SuperMatrix::diagonal(&pair_space(rank), &entries)
}

/// Closed form of `K`.
pub fn k_operator_closed(rank: &SuperRank, ctx: &QContext) -> SuperMatrix {
    let pre = ctx.pow(-normalization_exponent(rank));
    let m = rank.m();
    diag_pairs(rank, |i, j| {
        let v = if i != j {
            ctx.q()
        } else if i <= m {
            C64::new(1.0, 0.0)
        } else {
            ctx.powi(2)
        };
        v * pre
    })
}

/// Resummed `R_{≺δ} = 1 - (q - q^{-1})/(1 - ζ^s) Σ_{i<j} (-1)^{[j]} ζ12^{s_ij} E_ij ⊗ E_ji`.
pub fn r_prec_closed(rank: &SuperRank, ctx: &QContext, z: &Zeta12) -> Result<SuperMatrix> {
    let zs = z.require_convergent()?;
    let pre = -ctx.q_minus_qinv() / (C64::new(1.0, 0.0) - zs);
    let mut r = SuperMatrix::identity(&pair_space(rank));
    for i in 1..=rank.dim() {
        for j in i + 1..=rank.dim() {
            r = &r + &unit2(rank, i, j, j, i).scale(pre * odd_sign(rank, j) * z.s_ij(i, j));
        }
    }
    Ok(r)
}

/// Resummed `R_{≻δ}`, mirrored with `ζ12^{s - s_ji}` and `i > j`.
pub fn r_succ_closed(rank: &SuperRank, ctx: &QContext, z: &Zeta12) -> Result<SuperMatrix> {
    let zs = z.require_convergent()?;
    let pre = -ctx.q_minus_qinv() / (C64::new(1.0, 0.0) - zs);
    let mut r = SuperMatrix::identity(&pair_space(rank));
    for i in 1..=rank.dim() {
        for j in 1..i {
            r = &r + &unit2(rank, i, j, j, i).scale(pre * odd_sign(rank, j) * z.s_wrap(i, j));
        }
    }
    Ok(r)
}

/// `R_{≺δ}` as the ordered product of the factors
/// `1 - ζ12^{s_ij + ns} (q - q^{-1}) (-1)^{[j]} E_ij ⊗ E_ji`, `n <= n_max`.
pub fn r_prec_product(rank: &SuperRank, ctx: &QContext, z: &Zeta12, n_max: usize) -> Result<SuperMatrix> {
    z.require_convergent()?;
    let s = z.grading().total();
    let id = SuperMatrix::identity(&pair_space(rank));
    let mut r = id.clone();
    for i in 1..=rank.dim() {
        for j in i + 1..=rank.dim() {
            let u = unit2(rank, i, j, j, i);
            for n in 0..=n_max as i64 {
                let c = -z.pow(z.grading().s_ij(i, j) + n * s) * ctx.q_minus_qinv() * odd_sign(rank, j);
                r = &r * &(&id + &u.scale(c));
            }
        }
    }
    Ok(r)
}

/// `R_{≻δ}` as an ordered product, levels descending within each `(i, j)`.
pub fn r_succ_product(rank: &SuperRank, ctx: &QContext, z: &Zeta12, n_max: usize) -> Result<SuperMatrix> {
    z.require_convergent()?;
    let s = z.grading().total();
    let id = SuperMatrix::identity(&pair_space(rank));
    let mut r = id.clone();
    for i in 1..=rank.dim() {
        for j in i + 1..=rank.dim() {
            let u = unit2(rank, j, i, i, j);
            for n in (0..=n_max as i64).rev() {
                let c = -z.pow(s - z.grading().s_ij(i, j) + n * s) * ctx.q_minus_qinv() * odd_sign(rank, i);
                r = &r * &(&id + &u.scale(c));
            }
        }
    }
    Ok(r)
}

fn sim_scalar_exponent(rank: &SuperRank, ctx: &QContext, zs: C64) -> Result<C64> {
    let m = rank.m_minus_n();
    f_m_difference(zs, m, m - 1, ctx)
}

/// Closed `R_{∼δ}`: a diagonal operator times
/// `exp(-F_{M-N}(q^{M-N-1} ζ^s) + F_{M-N}(q^{-(M-N-1)} ζ^s))`.
pub fn r_sim_closed(rank: &SuperRank, ctx: &QContext, z: &Zeta12) -> Result<SuperMatrix> {
    let zs = z.require_convergent()?;
    let scalar = (-sim_scalar_exponent(rank, ctx, zs)?).exp();
    let one = C64::new(1.0, 0.0);
    let q2 = ctx.powi(2);
    let m = rank.m();
    Ok(diag_pairs(rank, |i, j| {
        let v = if i == j {
            if i <= m {
                one
            } else {
                (one - zs / q2) / (one - q2 * zs)
            }
        } else if i < j {
            (one - zs / q2) / (one - zs)
        } else {
            (one - zs) / (one - q2 * zs)
        };
        v * scalar
    }))
}

/// Series `R_{∼δ} = exp(X)` with
/// `X = -(q - q^{-1}) Σ_{n<=n_max} Σ_{ij} (-1)^n o_i^n o_j^n d_i d_j U_nij e_{nδ;α_i} ⊗ f_{nδ;α_j}`.
pub fn r_sim_series(rep1: &EvaluationRep, rep2: &EvaluationRep, t1: &RootVectorTable, t2: &RootVectorTable, n_max: usize) -> Result<SuperMatrix> {
    if rep1.rank() != rep2.rank() {
        return Err(Error::ShapeMismatch("R_sim needs two modules of the same rank".into()));
    }
    let rank = *rep1.rank();
    let ctx = rep1.ctx();
    if t1.unprimed_max() < n_max || t2.unprimed_max() < n_max {
        return Err(Error::Truncation { order: t1.unprimed_max().min(t2.unprimed_max()), required: n_max });
    }
    let space = pair_space(&rank);
    let dd = space.dim();
    let mut x = CMatrix::zeros(dd, dd);
    let l = rank.rank();
    for n in 1..=n_max {
        let u = u_matrix(n, ctx, &rank)?;
        let ni = n as i64;
        for i in 1..=l {
            for j in 1..=l {
                let sign = sign_pow(ni) * ipow(C64::new((rank.o(i) * rank.o(j)) as f64, 0.0), ni).re * (rank.d(i) * rank.d(j)) as f64;
                let c = -ctx.q_minus_qinv() * sign * u[(i - 1, j - 1)];
                let a = t1.unprimed(n, i).expect("checked above").e.matrix();
                let b = t2.unprimed(n, j).expect("checked above").f.matrix();
                x += a.graded_kron(b).data() * c;
            }
        }
    }
    SuperMatrix::new(space, x.exp())
}

/// The real-root factor `exp_{q_γ}(-(-1)^{[γ]} (q - q^{-1})/a_γ e_γ(ζ1) ⊗ f_γ(ζ2))`
/// with `q_γ = (-1)^{[γ]} q^{(γ|γ)}`.
pub fn real_root_factor(root: &AffineRoot, rep1: &EvaluationRep, t1: &RootVectorTable, t2: &RootVectorTable) -> Result<SuperMatrix> {
    let ctx = rep1.ctx();
    let e = &t1.real(root).ok_or_else(|| Error::Construction(format!("root {root} missing from first table")))?.e;
    let f = &t2.real(root).ok_or_else(|| Error::Construction(format!("root {root} missing from second table")))?.f;
    let a = a_gamma(root, t1, rep1)?;
    let par = rep1.system().parity(root).sign();
    let q_gamma = ctx.powi(rep1.system().bilinear(root, root)) * par;
    let x = e.matrix().graded_kron(f.matrix());
    let arg = x.data() * (-ctx.q_minus_qinv() * par / a);
    SuperMatrix::new(x.space().clone(), q_exponential(&arg, q_gamma, ctx)?)
}

/// `R_{≺δ}` or `R_{≻δ}` from root-vector tables, in normal order.
pub fn real_product_from_tables(rep1: &EvaluationRep, t1: &RootVectorTable, t2: &RootVectorTable, n_max: usize, wrap: bool) -> Result<SuperMatrix> {
    let rank = *rep1.rank();
    let mut r = SuperMatrix::identity(&pair_space(&rank));
    for i in 1..=rank.dim() {
        for j in i + 1..=rank.dim() {
            let levels: Vec<usize> = if wrap { (0..=n_max).rev().collect() } else { (0..=n_max).collect() };
            for n in levels {
                let root = if wrap { AffineRoot::real_minus_wrap(i, j, n) } else { AffineRoot::real_plus(i, j, n) };
                r = &r * &real_root_factor(&root, rep1, t1, t2)?;
            }
        }
    }
    Ok(r)
}

/// Normalization `ρ = q^{(M-N-1)/(M-N)} exp(F_{M-N}(q^{M-N-1} ζ^s) - F_{M-N}(q^{-(M-N-1)} ζ^s))`,
/// chosen so that `ρ R_{≺δ} R_{∼δ} R_{≻δ} K` is the closed matrix.
pub fn rho(rank: &SuperRank, ctx: &QContext, z: &Zeta12) -> Result<C64> {
    let zs = z.require_convergent()?;
    Ok(ctx.pow(normalization_exponent(rank)) * sim_scalar_exponent(rank, ctx, zs)?.exp())
}

/// The closed R-operator.
pub fn r_operator_closed(rank: &SuperRank, ctx: &QContext, z: &Zeta12) -> Result<SuperMatrix> {
    let zs = z.zs();
    let one = C64::new(1.0, 0.0);
    let q2 = ctx.powi(2);
    let den = one - q2 * zs;
    if den.norm() < POLE_GUARD {
        return Err(Error::Pole { distance: den.norm(), zeta_s: format!("{zs}") });
    }
    let m = rank.m();
    let mut r = diag_pairs(rank, |i, j| {
        if i != j {
            ctx.q() * (one - zs) / den
        } else if i <= m {
            one
        } else {
            q2 * (one - zs / q2) / den
        }
    });
    let off = (one - q2) / den;
    for i in 1..=rank.dim() {
        for j in 1..=rank.dim() {
            let c = if i < j {
                z.s_ij(i, j)
            } else if i > j {
                z.s_wrap(i, j)
            } else {
                continue;
            };
            r = &r + &unit2(rank, i, j, j, i).scale(off * odd_sign(rank, j) * c);
        }
    }
    Ok(r)
}

/// Series cutoffs for the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOrders {
    pub products: usize,
    pub sim: usize,
}

impl Default for PipelineOrders {
    fn default() -> Self {
        Self { products: DEFAULT_PRODUCT_ORDER, sim: DEFAULT_SIM_ORDER }
    }
}

/// Evaluation mode of [`r_operator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RMode {
    #[default]
    Closed,
    Pipeline,
}

impl std::str::FromStr for RMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(RMode::Closed),
            "pipeline" => Ok(RMode::Pipeline),
            other => Err(Error::Config(format!("unknown mode '{other}' (expected closed or pipeline)"))),
        }
    }
}

impl std::fmt::Display for RMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RMode::Closed => "closed",
            RMode::Pipeline => "pipeline",
        })
    }
}

/// Parameters of one R-operator evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RParameters {
    pub m: usize,
    pub n: usize,
    pub q: C64,
    pub zeta1: C64,
    pub zeta2: C64,
    pub grading: Vec<i64>,
    pub orders: PipelineOrders,
}

/// All factors of the pipeline at one parameter point.
#[derive(Debug, Clone)]
pub struct RFactorSet {
    pub k: SuperMatrix,
    pub r_prec: SuperMatrix,
    pub r_sim: SuperMatrix,
    pub r_succ: SuperMatrix,
    pub rho: C64,
    pub r_total: SuperMatrix,
    pub parameters: RParameters,
}

impl RFactorSet {
    /// Builds root-vector tables at `ζ1` and `ζ2` and multiplies the factors.
    pub fn compute(rank: &SuperRank, ctx: &QContext, zeta1: C64, zeta2: C64, grading: &GradingVector, orders: PipelineOrders) -> Result<Self> {
        let z = Zeta12::new(zeta1, zeta2, grading)?;
        let x = z.require_convergent()?.norm();
        if x >= series_radius(ctx) {
            return Err(Error::Divergence(format!("|zeta12^s| = {x} outside the series radius {}", series_radius(ctx))));
        }
        let ctx = if ctx.series_order() < orders.sim { (*ctx).with_series_order(orders.sim) } else { *ctx };
        let rep1 = evaluation_rep(rank, &ctx, zeta1, grading)?;
        let rep2 = evaluation_rep(rank, &ctx, zeta2, grading)?;
        let levels = orders.products.max(orders.sim);
        let mut t1 = build_root_vectors(&rep1, levels)?;
        let mut t2 = build_root_vectors(&rep2, levels)?;
        unprimed_imaginary(&mut t1, &rep1, orders.sim)?;
        unprimed_imaginary(&mut t2, &rep2, orders.sim)?;
        let r_prec = real_product_from_tables(&rep1, &t1, &t2, orders.products, false)?;
        let r_succ = real_product_from_tables(&rep1, &t1, &t2, orders.products, true)?;
        let r_sim = r_sim_series(&rep1, &rep2, &t1, &t2, orders.sim)?;
        let k = k_operator_weights(&rep1, &rep2)?;
        let rho = rho(rank, &ctx, &z)?;
        let r_total = (&(&(&r_prec * &r_sim) * &r_succ) * &k).scale(rho);
        let parameters = RParameters { m: rank.m(), n: rank.n(), q: ctx.q(), zeta1, zeta2, grading: grading.as_slice().to_vec(), orders };
        Ok(Self { k, r_prec, r_sim, r_succ, rho, r_total, parameters })
    }
}

/// The R-operator at `(ζ1, ζ2)` in the chosen mode.
pub fn r_operator(rank: &SuperRank, ctx: &QContext, zeta1: C64, zeta2: C64, grading: &GradingVector, mode: RMode) -> Result<SuperMatrix> {
    let z = Zeta12::new(zeta1, zeta2, grading)?;
    match mode {
        RMode::Closed => r_operator_closed(rank, ctx, &z),
        RMode::Pipeline => {
            r_operator_closed(rank, ctx, &z)?;
            Ok(RFactorSet::compute(rank, ctx, zeta1, zeta2, grading, PipelineOrders::default())?.r_total)
        }
    }
}

/// True when every entry outside the `E_ii ⊗ E_jj` and `E_ij ⊗ E_ji` slots
/// is below `tol`.
pub fn has_perk_schultz_sparsity(r: &SuperMatrix, rank: &SuperRank, tol: f64) -> bool {
    let d = rank.dim();
    for row in 0..d * d {
        for col in 0..d * d {
            let (i, k) = (row / d, row % d);
            let (j, l) = (col / d, col % d);
            let allowed = (i == j && k == l) || (i == l && k == j);
            if !allowed && r.get(row, col).norm() > tol {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ranks() -> Vec<SuperRank> {
        [(2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3)].iter().map(|&(m, n)| SuperRank::new(m, n).unwrap()).collect()
    }

    fn ctx() -> QContext {
        QContext::new(c(1.05, 0.3)).unwrap()
    }

    #[test]
    fn k_two_constructions_agree() {
        for r in ranks() {
            let ctx = ctx();
            let g = GradingVector::standard(&r);
            let r1 = evaluation_rep(&r, &ctx, c(0.4, 0.2), &g).unwrap();
            let r2 = evaluation_rep(&r, &ctx, c(1.3, -0.7), &g).unwrap();
            let kw = k_operator_weights(&r1, &r2).unwrap();
            let kc = k_operator_closed(&r, &ctx);
            assert!(kw.max_abs_diff(&kc) < 1e-10, "{r}");
        }
    }

    #[test]
    fn k_example_sl21_and_trace() {
        let r = SuperRank::new(2, 1).unwrap();
        let ctx = ctx();
        let k = k_operator_closed(&r, &ctx);
        let mut want = [ctx.q(); 9];
        want[0] = c(1.0, 0.0);
        want[4] = c(1.0, 0.0);
        want[8] = ctx.powi(2);
        for (idx, w) in want.iter().enumerate() {
            assert!((k.get(idx, idx) - w).norm() < 1e-14);
        }
        for r in ranks() {
            let k = k_operator_closed(&r, &ctx);
            let (m, n, d) = (r.m() as f64, r.n() as f64, r.dim() as f64);
            let want = ctx.pow(-normalization_exponent(&r)) * (ctx.powi(2) * n + ctx.q() * (d * d - d) + m);
            let tr: C64 = (0..r.dim() * r.dim()).map(|i| k.get(i, i)).sum();
            assert!((tr - want).norm() < 1e-12, "{r}");
        }
        let r31 = SuperRank::new(3, 1).unwrap();
        assert_eq!(normalization_exponent(&r31), 0.5);
    }

    #[test]
    fn prec_succ_products_converge() {
        for r in ranks() {
            let ctx = ctx();
            let g = GradingVector::standard(&r);
            let z = Zeta12::from_ratio(C64::from_polar(0.5f64.powf(1.0 / g.total() as f64), 0.7), &g);
            assert!((z.zs().norm() - 0.5).abs() < 1e-12);
            let dp = r_prec_product(&r, &ctx, &z, 60).unwrap().max_abs_diff(&r_prec_closed(&r, &ctx, &z).unwrap());
            let ds = r_succ_product(&r, &ctx, &z, 60).unwrap().max_abs_diff(&r_succ_closed(&r, &ctx, &z).unwrap());
            assert!(dp < 1e-8 && ds < 1e-8, "{r}: {dp:e} {ds:e}");
        }
    }

    #[test]
    fn zero_ratio_limits() {
        for r in ranks() {
            let ctx = ctx();
            let g = GradingVector::standard(&r);
            let z = Zeta12::from_ratio(c(0.0, 0.0), &g);
            let id = SuperMatrix::identity(&pair_space(&r));
            assert!(r_prec_closed(&r, &ctx, &z).unwrap().max_abs_diff(&id) == 0.0);
            assert!(r_succ_closed(&r, &ctx, &z).unwrap().max_abs_diff(&id) == 0.0);
            assert!(r_sim_closed(&r, &ctx, &z).unwrap().max_abs_diff(&id) < 1e-15);
            let want = ctx.pow(normalization_exponent(&r));
            assert!((rho(&r, &ctx, &z).unwrap() - want).norm() < 1e-15);
        }
        let r = SuperRank::new(2, 1).unwrap();
        let g = GradingVector::standard(&r);
        assert!((rho(&r, &ctx(), &Zeta12::from_ratio(c(0.3, 0.4), &g)).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn rho_stable_under_order_doubling() {
        for r in ranks() {
            let g = GradingVector::standard(&r);
            let ratio = C64::from_polar(0.3f64.powf(1.0 / g.total() as f64), 0.7);
            let z = Zeta12::from_ratio(ratio, &g);
            let a = rho(&r, &ctx().with_series_order(40), &z).unwrap();
            let b = rho(&r, &ctx().with_series_order(80), &z).unwrap();
            assert!((a - b).norm() < 1e-10, "{r}");
        }
    }

    #[test]
    fn sim_diagonal_slot() {
        let r = SuperRank::new(2, 3).unwrap();
        let ctx = ctx();
        let g = GradingVector::standard(&r);
        let z = Zeta12::from_ratio(C64::from_polar(0.3f64.powf(0.2), 0.4), &g);
        let zs = z.zs();
        let sim = r_sim_closed(&r, &ctx, &z).unwrap();
        let scalar = sim.get(0, 0);
        let want = (1.0 - zs / ctx.powi(2)) / (1.0 - ctx.powi(2) * zs) * scalar;
        assert!((sim.get(24, 24) - want).norm() < 1e-14);
    }

    #[test]
    fn closed_r_examples() {
        for r in ranks() {
            let ctx = ctx();
            let g = GradingVector::standard(&r);
            let z = Zeta12::from_ratio(c(0.6, 0.2), &g);
            let rm = r_operator_closed(&r, &ctx, &z).unwrap();
            assert_eq!(rm.get(0, 0), c(1.0, 0.0));
            assert!(has_perk_schultz_sparsity(&rm, &r, 0.0));
            let one = Zeta12::from_ratio(c(1.0, 0.0), &g);
            let rm = r_operator_closed(&r, &ctx, &one).unwrap();
            let d = r.dim();
            for i in 0..d {
                for j in 0..d {
                    let v = rm.get(i * d + j, i * d + j);
                    let want = if i != j {
                        c(0.0, 0.0)
                    } else if i < r.m() {
                        c(1.0, 0.0)
                    } else {
                        c(-1.0, 0.0)
                    };
                    assert!((v - want).norm() < 1e-14);
                    if i != j {
                        let off = rm.get(i * d + j, j * d + i);
                        let sign = r.index_parity(j + 1).sign();
                        let koszul = GradedSpace::vector(&r).parity(j).koszul(r.index_parity(i + 1) + r.index_parity(j + 1));
                        assert!((off - sign * koszul).norm() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn pole_rejected() {
        let r = SuperRank::new(2, 1).unwrap();
        let ctx = ctx();
        let g = GradingVector::standard(&r);
        let ratio = (ctx.powi(-2)).powf(1.0 / 3.0);
        let z = Zeta12::from_ratio(ratio, &g);
        assert!(matches!(r_operator_closed(&r, &ctx, &z), Err(Error::Pole { .. })));
    }

    #[test]
    fn pipeline_matches_closed() {
        for r in ranks() {
            let ctx = ctx();
            let g = GradingVector::standard(&r);
            let z1 = c(0.47, 0.21);
            let z2 = c(1.1, -0.3);
            let set = RFactorSet::compute(&r, &ctx, z1, z2, &g, PipelineOrders::default()).unwrap();
            let z = Zeta12::new(z1, z2, &g).unwrap();
            let closed = r_operator_closed(&r, &ctx, &z).unwrap();
            assert!(set.r_total.max_abs_diff(&closed) < 1e-8, "{r}: {:e}", set.r_total.max_abs_diff(&closed));
            assert!(set.r_prec.max_abs_diff(&r_prec_closed(&r, &ctx, &z).unwrap()) < 1e-8);
            assert!(set.r_succ.max_abs_diff(&r_succ_closed(&r, &ctx, &z).unwrap()) < 1e-8);
            assert!(set.r_sim.max_abs_diff(&r_sim_closed(&r, &ctx, &z).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn nilpotent_factor() {
        let r = SuperRank::new(2, 1).unwrap();
        let u = unit2(&r, 1, 3, 3, 1);
        assert_eq!((&u * &u).max_abs(), 0.0);
    }

    #[test]
    fn pipeline_refuses_outside_series_radius() {
        let r = SuperRank::new(2, 1).unwrap();
        let g = GradingVector::standard(&r);
        let ctx = QContext::new(C64::from_polar(1.25, 0.7)).unwrap();
        let s = g.total() as f64;
        let orders = PipelineOrders { products: 8, sim: 8 };
        let at = |x: f64| RFactorSet::compute(&r, &ctx, C64::new(x.powf(1.0 / s), 0.0), C64::new(1.0, 0.0), &g, orders);
        assert!(matches!(at(0.7), Err(Error::Divergence(_))));
        assert!(at(0.5).is_ok());
    }
}
