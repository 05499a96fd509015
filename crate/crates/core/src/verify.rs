//! Numerical verification: graded Yang–Baxter equation, intertwining of the
//! two coproducts, and a suite that runs every module-level oracle.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cartan_weyl::{closed_form_deviation, t_matrix, t_relation_residual, u_matrix, RootVectorTable, TRelationSigns};
use crate::error::{Error, Result};
use crate::graded_matrix::{lift_to_triple, GradedSpace, SuperMatrix, TriplePosition};
use crate::qcartan_inverse::{bq_from_cartan, bq_inverse_closed, bq_tridiagonal};
use crate::r_factors::{
    k_operator_closed, k_operator_weights, r_operator_closed, r_prec_closed, r_prec_product, r_sim_closed, r_sim_series, r_succ_closed, r_succ_product,
    PipelineOrders, RFactorSet, Zeta12,
};
use crate::representations::{check_defining_relations, coproduct_image, evaluation_rep, opposite_coproduct_image, EvaluationRep, Generator, GradingVector};
use crate::root_data::{CartanData, SuperRank};
use crate::scalars::{f_m, ipow, max_modulus, q_exponential, QContext, TruncatedSeries};
use crate::{CMatrix, C64};

/// `‖R12 R13 R23 - R23 R13 R12‖_max` for given `R(ζ1,ζ2)`, `R(ζ1,ζ3)`, `R(ζ2,ζ3)`.
pub fn ybe_residual(r12: &SuperMatrix, r13: &SuperMatrix, r23: &SuperMatrix, v: &GradedSpace) -> Result<f64> {
    let a = lift_to_triple(r12, v, TriplePosition::P12)?;
    let b = lift_to_triple(r13, v, TriplePosition::P13)?;
    let c = lift_to_triple(r23, v, TriplePosition::P23)?;
    Ok((&(&a * &b) * &c).max_abs_diff(&(&(&c * &b) * &a)))
}

/// Yang–Baxter residual of the closed R-operator.
pub fn verify_ybe(rank: &SuperRank, ctx: &QContext, zeta1: C64, zeta2: C64, zeta3: C64, grading: &GradingVector) -> Result<f64> {
    let r = |a, b| r_operator_closed(rank, ctx, &Zeta12::new(a, b, grading)?);
    ybe_residual(&r(zeta1, zeta2)?, &r(zeta1, zeta3)?, &r(zeta2, zeta3)?, &GradedSpace::vector(rank))
}

/// Every generator of the algebra: `q^{h_i}`, `e_i`, `f_i` for `i = 0..=L`.
pub fn all_generators(rank: &SuperRank) -> Vec<Generator> {
    let mut g = Vec::new();
    for i in 0..=rank.rank() {
        g.push(Generator::QH { i, nu: 1.0 });
        g.push(Generator::E(i));
        g.push(Generator::F(i));
    }
    g
}

/// Per-generator intertwining residuals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntertwiningReport {
    pub residuals: Vec<(String, f64)>,
}

impl IntertwiningReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn residual(&self, name: &str) -> Option<f64> {
        self.residuals.iter().find(|(n, _)| n == name).map(|(_, r)| *r)
    }
}

/// `‖(φ1⊗φ2)(Δ′(a)) R - R (φ1⊗φ2)(Δ(a))‖_max` for every generator `a`.
pub fn intertwining_residuals(r: &SuperMatrix, rep1: &EvaluationRep, rep2: &EvaluationRep) -> Result<IntertwiningReport> {
    let mut residuals = Vec::new();
    for g in all_generators(rep1.rank()) {
        let d = coproduct_image(g, rep1, rep2)?;
        let dp = opposite_coproduct_image(g, rep1, rep2)?;
        residuals.push((g.to_string(), (&dp * r).max_abs_diff(&(r * &d))));
    }
    Ok(IntertwiningReport { residuals })
}

/// Intertwining residuals of the closed R-operator at `(ζ1, ζ2)`.
pub fn verify_intertwining(rank: &SuperRank, ctx: &QContext, zeta1: C64, zeta2: C64, grading: &GradingVector) -> Result<IntertwiningReport> {
    let r = r_operator_closed(rank, ctx, &Zeta12::new(zeta1, zeta2, grading)?)?;
    let rep1 = evaluation_rep(rank, ctx, zeta1, grading)?;
    let rep2 = evaluation_rep(rank, ctx, zeta2, grading)?;
    intertwining_residuals(&r, &rep1, &rep2)
}

/// One random parameter point: `q` and three spectral parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub q: C64,
    pub zeta: [C64; 3],
}

/// Sampling ranges for [`sample_points`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Range of `|q|`, sampled log-uniformly.
    pub q_modulus: (f64, f64),
    /// Range of `|ζ12^s|` and `|ζ23^s|`; `|ζ13^s|` is their product.
    pub ratio_modulus: (f64, f64),
    /// Minimal `|1 - q² ζab^s|` accepted.
    pub pole_margin: f64,
    /// Orders checked against roots of unity.
    pub generic_order: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { q_modulus: (0.8, 1.25), ratio_modulus: (0.05, 0.8), pole_margin: 0.05, generic_order: 24 }
    }
}

/// Rejection sampler for parameter points. `q` avoids roots of unity up to
/// `generic_order`; every ratio keeps `pole_margin` away from the pole of the
/// closed R-operator.
pub fn sample_points(rng: &mut ChaCha8Rng, grading: &GradingVector, grid: &GridSpec, count: usize) -> Vec<ParameterPoint> {
    let s = grading.total() as f64;
    let tau = std::f64::consts::TAU;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (lo, hi) = grid.q_modulus;
        let q = C64::from_polar((rng.gen_range(lo.ln()..=hi.ln())).exp(), rng.gen_range(0.0..tau));
        let Ok(ctx) = QContext::new(q) else { continue };
        if ctx.ensure_generic(grid.generic_order).is_err() {
            continue;
        }
        let (a, b) = grid.ratio_modulus;
        let mut ratio = || C64::from_polar(rng.gen_range(a..=b).powf(1.0 / s), rng.gen_range(0.0..tau));
        let (w12, w23) = (ratio(), ratio());
        let zeta3 = C64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..tau));
        let zeta2 = zeta3 * w23;
        let zeta1 = zeta2 * w12;
        let q2 = q * q;
        let total = grading.total();
        let ok = [w12, w23, w12 * w23].iter().all(|w| (1.0 - q2 * ipow(*w, total)).norm() >= grid.pole_margin);
        if ok {
            out.push(ParameterPoint { q, zeta: [zeta1, zeta2, zeta3] });
        }
    }
    out
}

/// Names of the suite checks, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Scalars,
    Relations,
    ClosedForms,
    TRelation,
    BqInverse,
    KTwoPath,
    FactorConvergence,
    TwoPathR,
    Homogeneity,
    Intertwining,
    Ybe,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Scalars,
        CheckKind::Relations,
        CheckKind::ClosedForms,
        CheckKind::TRelation,
        CheckKind::BqInverse,
        CheckKind::KTwoPath,
        CheckKind::FactorConvergence,
        CheckKind::TwoPathR,
        CheckKind::Homogeneity,
        CheckKind::Intertwining,
        CheckKind::Ybe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Scalars => "scalars",
            CheckKind::Relations => "relations",
            CheckKind::ClosedForms => "closed_forms",
            CheckKind::TRelation => "t_relation",
            CheckKind::BqInverse => "bq_inverse",
            CheckKind::KTwoPath => "k_two_path",
            CheckKind::FactorConvergence => "factor_convergence",
            CheckKind::TwoPathR => "two_path_r",
            CheckKind::Homogeneity => "homogeneity",
            CheckKind::Intertwining => "intertwining",
            CheckKind::Ybe => "ybe",
        }
    }

    /// Threshold at the reference tolerance `1e-9`.
    pub fn base_threshold(self) -> f64 {
        match self {
            CheckKind::Scalars => 1e-12,
            CheckKind::Relations | CheckKind::ClosedForms | CheckKind::TRelation | CheckKind::KTwoPath | CheckKind::Homogeneity => 1e-10,
            CheckKind::BqInverse => 1e-12,
            CheckKind::FactorConvergence | CheckKind::TwoPathR => 1e-8,
            CheckKind::Intertwining | CheckKind::Ybe => 1e-9,
        }
    }
}

impl std::str::FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown check '{s}'")))
    }
}

/// Reference tolerance at which every check uses its base threshold.
pub const REFERENCE_TOLERANCE: f64 = 1e-9;

/// Configuration of [`run_suite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub rank: SuperRank,
    pub grading: Vec<i64>,
    /// Scales every base threshold by `tolerance / 1e-9`.
    pub tolerance: f64,
    pub seed: u64,
    /// Random parameter points per check.
    pub points: usize,
    /// Level cutoff for the closed-form and `T_n` checks.
    pub n_max: usize,
    pub series_order: usize,
    pub orders: PipelineOrders,
    pub grid: GridSpec,
    /// Largest `|ζ12^s|` used for the series-based checks.
    pub series_ratio: f64,
    /// `None` runs every check.
    pub checks: Option<Vec<CheckKind>>,
    /// Evaluated before the random points when present.
    pub base_point: Option<ParameterPoint>,
}

impl SuiteConfig {
    pub fn new(rank: SuperRank) -> Self {
        Self {
            grading: vec![1; rank.dim()],
            rank,
            tolerance: REFERENCE_TOLERANCE,
            seed: 7,
            points: 3,
            n_max: 4,
            series_order: crate::scalars::DEFAULT_SERIES_ORDER,
            orders: PipelineOrders::default(),
            grid: GridSpec::default(),
            series_ratio: 0.4,
            checks: None,
            base_point: None,
        }
    }

    fn enabled(&self, c: CheckKind) -> bool {
        self.checks.as_ref().is_none_or(|v| v.contains(&c))
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub parameters: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

/// Machine-readable suite output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub m: usize,
    pub n: usize,
    pub grading: Vec<i64>,
    pub seed: u64,
    pub tolerance: f64,
    pub points: Vec<ParameterPoint>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Suite<'a> {
    config: &'a SuiteConfig,
    grading: GradingVector,
    points: Vec<ParameterPoint>,
    rng: ChaCha8Rng,
}

fn worst(values: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut w = 0.0f64;
    for v in values {
        w = w.max(v?);
    }
    Ok(w)
}

impl<'a> Suite<'a> {
    fn ctx(&self, q: C64) -> Result<QContext> {
        Ok(QContext::new(q)?.with_series_order(self.config.series_order))
    }

    /// `ζ2 = ζ1 w` rescaled so that `|ζ12^s| = series_ratio`.
    fn series_pair(&self, p: &ParameterPoint) -> (C64, C64) {
        let s = self.grading.total() as f64;
        let w = p.zeta[0] / p.zeta[1];
        let w = w / w.norm() * self.config.series_ratio.powf(1.0 / s);
        (p.zeta[1] * w, p.zeta[1])
    }

    fn scalars(&self) -> Result<f64> {
        let mut res = Vec::new();
        for p in &self.points {
            let ctx = self.ctx(p.q)?;
            for n in 1..8i64 {
                let sum: C64 = (0..n).map(|k| ctx.powi(n - 1 - 2 * k)).sum();
                res.push((ctx.bracket(n)? - sum).norm() / sum.norm().max(1.0));
            }
            let mut x = CMatrix::zeros(2, 2);
            x[(0, 1)] = p.zeta[0];
            let e = q_exponential(&x, p.q, &ctx)?;
            res.push(max_modulus(&(e - (CMatrix::identity(2, 2) + &x))));
            let g = TruncatedSeries::new(vec![C64::new(0.0, 0.0), p.zeta[0] * 0.3, p.zeta[1] * 0.2, p.q * 0.1])?;
            let back = g.exp(1e-14)?.log(1e-14)?;
            res.push(back.max_abs_diff(&g)?);
            let y = p.zeta[2] / p.zeta[2].norm() * 0.3;
            res.push((f_m(y, 1, &ctx.with_series_order(80))? + (1.0 - y).ln()).norm());
        }
        Ok(res.into_iter().fold(0.0, f64::max))
    }

    fn reps(&self, p: &ParameterPoint) -> Result<Vec<EvaluationRep>> {
        let ctx = self.ctx(p.q)?;
        p.zeta.iter().map(|z| evaluation_rep(&self.config.rank, &ctx, *z, &self.grading)).collect()
    }

    fn relations(&self) -> Result<f64> {
        worst(self.points.iter().flat_map(|p| match self.reps(p) {
            Ok(reps) => reps.into_iter().map(|r| Ok(check_defining_relations(&r)?.max_residual())).collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        }))
    }

    fn closed_forms(&self) -> Result<f64> {
        worst(self.points.iter().map(|p| {
            let rep = &self.reps(p)?[0];
            closed_form_deviation(&RootVectorTable::complete(rep, self.config.n_max)?, rep)
        }))
    }

    fn t_relation(&self) -> Result<f64> {
        let rank = self.config.rank;
        let b = CartanData::new(&rank).b;
        worst(self.points.iter().map(|p| {
            let rep = &self.reps(p)?[0];
            let table = RootVectorTable::complete(rep, self.config.n_max)?;
            let mut w = t_relation_residual(&table, rep, self.config.n_max, TRelationSigns::Both)?;
            for n in 1..=self.config.n_max {
                let t = t_matrix(n, rep.ctx(), &rank)?;
                let u = u_matrix(n, rep.ctx(), &rank)?;
                for i in 0..rank.rank() {
                    for j in 0..rank.rank() {
                        let direct = rep.ctx().bracket(n as i64 * b[(i, j)])? / n as f64;
                        w = w.max((t[(i, j)] - direct).norm());
                    }
                }
                let l = rank.rank();
                w = w.max(max_modulus(&(u * t - CMatrix::identity(l, l))));
            }
            Ok(w)
        }))
    }

    fn bq_inverse(&mut self) -> Result<f64> {
        let rank = self.config.rank;
        let mut w = 0.0f64;
        let tau = std::f64::consts::TAU;
        let mut done = 0;
        while done < 5 {
            let q = C64::from_polar(self.rng.gen_range(0.8..1.25), self.rng.gen_range(0.0..tau));
            let ctx = QContext::new(q)?;
            if ctx.ensure_generic(2 * rank.dim()).is_err() {
                continue;
            }
            done += 1;
            let closed = bq_inverse_closed(&rank, &ctx)?;
            let tri = bq_tridiagonal(&rank, &ctx)?.inverse(1e-14)?;
            let dense = bq_from_cartan(&rank, &ctx)?.try_inverse().ok_or_else(|| Error::Singular("B_q".into()))?;
            w = w.max(max_modulus(&(&closed - tri))).max(max_modulus(&(&closed - dense)));
            w = w.max(max_modulus(&(&closed - closed.transpose())));
        }
        Ok(w)
    }

    fn k_two_path(&self) -> Result<f64> {
        worst(self.points.iter().map(|p| {
            let reps = self.reps(p)?;
            Ok(k_operator_weights(&reps[0], &reps[1])?.max_abs_diff(&k_operator_closed(&self.config.rank, reps[0].ctx())))
        }))
    }

    fn factor_convergence(&self) -> Result<f64> {
        let rank = self.config.rank;
        worst(self.points.iter().map(|p| {
            let ctx = self.ctx(p.q)?;
            let s = self.grading.total() as f64;
            let w = p.zeta[0] / p.zeta[1];
            let half = Zeta12::from_ratio(w / w.norm() * 0.5f64.powf(1.0 / s), &self.grading);
            let n = self.config.orders.products;
            let mut r = r_prec_product(&rank, &ctx, &half, n)?.max_abs_diff(&r_prec_closed(&rank, &ctx, &half)?);
            r = r.max(r_succ_product(&rank, &ctx, &half, n)?.max_abs_diff(&r_succ_closed(&rank, &ctx, &half)?));
            let (z1, z2) = self.series_pair(p);
            let rep1 = evaluation_rep(&rank, &ctx, z1, &self.grading)?;
            let rep2 = evaluation_rep(&rank, &ctx, z2, &self.grading)?;
            let sim = self.config.orders.sim;
            let t1 = RootVectorTable::complete(&rep1, sim)?;
            let t2 = RootVectorTable::complete(&rep2, sim)?;
            let series = r_sim_series(&rep1, &rep2, &t1, &t2, sim)?;
            let closed = r_sim_closed(&rank, &ctx, &Zeta12::new(z1, z2, &self.grading)?)?;
            Ok(r.max(series.max_abs_diff(&closed)))
        }))
    }

    fn two_path_r(&self) -> Result<f64> {
        let rank = self.config.rank;
        worst(self.points.iter().map(|p| {
            let ctx = self.ctx(p.q)?;
            let (z1, z2) = self.series_pair(p);
            let set = RFactorSet::compute(&rank, &ctx, z1, z2, &self.grading, self.config.orders)?;
            Ok(set.r_total.max_abs_diff(&r_operator_closed(&rank, &ctx, &Zeta12::new(z1, z2, &self.grading)?)?))
        }))
    }

    fn homogeneity(&mut self) -> Result<f64> {
        let rank = self.config.rank;
        let tau = std::f64::consts::TAU;
        let mut w = 0.0f64;
        for p in self.points.clone() {
            let ctx = self.ctx(p.q)?;
            let c = C64::from_polar(self.rng.gen_range(0.3..3.0), self.rng.gen_range(0.0..tau));
            let a = r_operator_closed(&rank, &ctx, &Zeta12::new(p.zeta[0], p.zeta[1], &self.grading)?)?;
            let b = r_operator_closed(&rank, &ctx, &Zeta12::new(c * p.zeta[0], c * p.zeta[1], &self.grading)?)?;
            w = w.max(a.max_abs_diff(&b));
        }
        Ok(w)
    }

    fn intertwining(&self) -> Result<f64> {
        worst(self.points.iter().map(|p| {
            Ok(verify_intertwining(&self.config.rank, &self.ctx(p.q)?, p.zeta[0], p.zeta[1], &self.grading)?.max_residual())
        }))
    }

    fn ybe(&self) -> Result<f64> {
        worst(self.points.iter().map(|p| verify_ybe(&self.config.rank, &self.ctx(p.q)?, p.zeta[0], p.zeta[1], p.zeta[2], &self.grading)))
    }

    fn run(&mut self, kind: CheckKind) -> Result<f64> {
        match kind {
            CheckKind::Scalars => self.scalars(),
            CheckKind::Relations => self.relations(),
            CheckKind::ClosedForms => self.closed_forms(),
            CheckKind::TRelation => self.t_relation(),
            CheckKind::BqInverse => self.bq_inverse(),
            CheckKind::KTwoPath => self.k_two_path(),
            CheckKind::FactorConvergence => self.factor_convergence(),
            CheckKind::TwoPathR => self.two_path_r(),
            CheckKind::Homogeneity => self.homogeneity(),
            CheckKind::Intertwining => self.intertwining(),
            CheckKind::Ybe => self.ybe(),
        }
    }

    fn describe(&self, kind: CheckKind) -> String {
        let c = self.config;
        match kind {
            CheckKind::ClosedForms | CheckKind::TRelation => format!("n_max = {}", c.n_max),
            CheckKind::BqInverse => "5 random q".into(),
            CheckKind::FactorConvergence => {
                format!("products n_max = {} at |z12^s| = 0.5, sim n_max = {} at |z12^s| = {}", c.orders.products, c.orders.sim, c.series_ratio)
            }
            CheckKind::TwoPathR => format!("n_max = {}/{} at |z12^s| = {}", c.orders.products, c.orders.sim, c.series_ratio),
            _ => format!("{} points", self.points.len()),
        }
    }
}

/// Runs every enabled check in a fixed order. Check failures, including
/// errors raised inside a check, are recorded in the report; only invalid
/// configurations are returned as errors.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    if !(config.tolerance >= 0.0) || !config.tolerance.is_finite() {
        return Err(Error::Config(format!("tolerance must be finite and nonnegative, got {}", config.tolerance)));
    }
    if config.points == 0 {
        return Err(Error::Config("at least one parameter point is needed".into()));
    }
    if config.series_ratio <= 0.0 || config.series_ratio >= 1.0 {
        return Err(Error::Config(format!("series ratio must lie in (0, 1), got {}", config.series_ratio)));
    }
    let grading = GradingVector::new(config.grading.clone(), &config.rank).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points: Vec<ParameterPoint> = config.base_point.into_iter().collect();
    points.extend(sample_points(&mut rng, &grading, &config.grid, config.points));
    let mut suite = Suite { config, grading, points, rng };
    let scale = config.tolerance / REFERENCE_TOLERANCE;
    let mut checks = Vec::new();
    for kind in CheckKind::ALL {
        if !config.enabled(kind) {
            continue;
        }
        let start = Instant::now();
        let outcome = suite.run(kind);
        let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
        let threshold = kind.base_threshold() * scale;
        let (residual, error) = match outcome {
            Ok(r) if r.is_finite() => (r, None),
            Ok(r) => (f64::MAX, Some(format!("non-finite residual {r}"))),
            Err(e) => (f64::MAX, Some(e.to_string())),
        };
        checks.push(CheckResult {
            name: kind.name().into(),
            parameters: suite.describe(kind),
            residual,
            threshold,
            passed: error.is_none() && residual < threshold,
            wall_time_ms,
            error,
        });
    }
    Ok(VerificationReport {
        m: config.rank.m(),
        n: config.rank.n(),
        grading: config.grading.clone(),
        seed: config.seed,
        tolerance: config.tolerance,
        points: suite.points,
        checks,
    })
}
