//! Cartan–Weyl root vectors of the evaluation representation.
//!
//! Real root vectors are built by iterated q-supercommutators following the
//! normal order, the primed imaginary vectors `e′_{nδ;α_i}` from the
//! real ones, and the unprimed `e_{nδ;α_i}` from a logarithm of generating
//! series. Closed forms of every image are provided as a cross-check.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded_matrix::{q_supercommutator, RootGradedElement, SuperMatrix};
use crate::qcartan_inverse::bq_inverse_closed;
use crate::representations::EvaluationRep;
use crate::root_data::{AffineRoot, RootKind, RootSign, SuperRank};
use crate::scalars::{ipow, sign_pow, QContext, TruncatedSeries};
use crate::{CMatrix, C64};

/// Images of `e_γ` and `f_γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootVectorPair {
    pub e: RootGradedElement,
    pub f: RootGradedElement,
}

/// All root-vector images up to a level cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct RootVectorTable {
    n_max: usize,
    real: HashMap<AffineRoot, RootVectorPair>,
    primed: BTreeMap<(usize, usize), RootVectorPair>,
    unprimed: BTreeMap<(usize, usize), RootVectorPair>,
}

impl RootVectorTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Vectors of a positive real root.
    pub fn real(&self, root: &AffineRoot) -> Option<&RootVectorPair> {
        self.real.get(root)
    }

    /// `e′_{nδ;α_i}`, `f′_{nδ;α_i}`.
    pub fn primed(&self, n: usize, i: usize) -> Option<&RootVectorPair> {
        self.primed.get(&(n, i))
    }

    /// `e_{nδ;α_i}`, `f_{nδ;α_i}`; present after [`unprimed_imaginary`].
    pub fn unprimed(&self, n: usize, i: usize) -> Option<&RootVectorPair> {
        self.unprimed.get(&(n, i))
    }

    pub fn has_unprimed(&self) -> bool {
        !self.unprimed.is_empty()
    }

    /// Largest `n` with unprimed vectors present.
    pub fn unprimed_max(&self) -> usize {
        self.unprimed.keys().map(|&(n, _)| n).max().unwrap_or(0)
    }

    pub fn real_roots(&self) -> impl Iterator<Item = (&AffineRoot, &RootVectorPair)> {
        self.real.iter()
    }

    /// Real and primed imaginary entries, with the imaginary root attached.
    pub fn entries(&self) -> Vec<(AffineRoot, &RootVectorPair)> {
        let mut out: Vec<_> = self.real.iter().map(|(k, v)| (*k, v)).collect();
        out.extend(self.primed.iter().map(|(&(n, i), v)| (AffineRoot::imaginary(n, i), v)));
        out
    }

    /// Builds the real and primed vectors and then the unprimed ones.
    pub fn complete(rep: &EvaluationRep, n_max: usize) -> Result<Self> {
        let mut table = build_root_vectors(rep, n_max)?;
        unprimed_imaginary(&mut table, rep, n_max)?;
        Ok(table)
    }
}

struct Builder<'a> {
    rep: &'a EvaluationRep,
    e: HashMap<AffineRoot, RootGradedElement>,
    f: HashMap<AffineRoot, RootGradedElement>,
    ep: BTreeMap<(usize, usize), RootGradedElement>,
    fp: BTreeMap<(usize, usize), RootGradedElement>,
}

impl<'a> Builder<'a> {
    fn br(&self, x: &RootGradedElement, y: &RootGradedElement) -> Result<RootGradedElement> {
        q_supercommutator(x, y, self.rep.system(), self.rep.ctx())
    }

    fn get(map: &HashMap<AffineRoot, RootGradedElement>, root: AffineRoot) -> Result<&RootGradedElement> {
        map.get(&root).ok_or_else(|| Error::Construction(format!("missing root vector {root}")))
    }

    fn set_pair(&mut self, root: AffineRoot, e: RootGradedElement, f: RootGradedElement) {
        self.e.insert(root, e);
        self.f.insert(root, f);
    }

    /// `e_x ⟦·,·⟧ e_y` and the mirrored f-version, stored under `target`.
    fn combine(&mut self, target: AffineRoot, x: AffineRoot, y: AffineRoot, ce: C64, cf: C64) -> Result<()> {
        let e = self.br(Self::get(&self.e, x)?, Self::get(&self.e, y)?)?.scaled(ce);
        let f = self.br(Self::get(&self.f, x)?, Self::get(&self.f, y)?)?.scaled(cf);
        self.set_pair(target, e, f);
        Ok(())
    }

    fn primed_pair(&self, k: usize) -> Result<(&RootGradedElement, &RootGradedElement)> {
        let e = self.ep.get(&(1, k)).ok_or_else(|| Error::Construction(format!("missing e'(delta; a{k})")))?;
        let f = self.fp.get(&(1, k)).ok_or_else(|| Error::Construction(format!("missing f'(delta; a{k})")))?;
        Ok((e, f))
    }

    /// `e′_{nδ;α_i} = (-1)^{[α_i]} ⟦e_{α_i+(n-1)δ}, e_{δ-α_i}⟧`.
    fn primed(&mut self, i: usize, n: usize) -> Result<()> {
        let s = C64::new(self.rep.rank().simple_parity(i).sign(), 0.0);
        let plus = AffineRoot::real_plus(i, i + 1, n - 1);
        let wrap = AffineRoot::real_minus_wrap(i, i + 1, 0);
        let e = self.br(Self::get(&self.e, plus)?, Self::get(&self.e, wrap)?)?.scaled(s);
        let f = self.br(Self::get(&self.f, plus)?, Self::get(&self.f, wrap)?)?.scaled(s);
        self.ep.insert((n, i), e);
        self.fp.insert((n, i), f);
        Ok(())
    }

    /// `(-1)^{[α_k]} / [(α_ij|α_k)]_q`.
    fn prefactor(&self, i: usize, j: usize, k: usize) -> Result<C64> {
        let rank = self.rep.rank();
        let pairing = self.rep.system().bilinear(&AffineRoot::real_plus(i, j, 0), &AffineRoot::simple(rank, k));
        let b = self.rep.ctx().bracket(pairing)?;
        if b.norm() <= self.rep.ctx().tolerance() {
            return Err(Error::DegenerateQ(format!("[(a{i}{j}|a{k})]_q = {b}")));
        }
        Ok(rank.simple_parity(k).sign() / b)
    }

    /// Level-`n` vectors from level `n - 1` for `(i, j)` with a usable
    /// neighbouring imaginary vector `e′_{δ;α_k}`.
    fn raise_generic(&mut self, i: usize, j: usize, n: usize, k: usize) -> Result<()> {
        let pre = self.prefactor(i, j, k)?;
        let plus = AffineRoot::real_plus(i, j, n - 1);
        let wrap = AffineRoot::real_minus_wrap(i, j, n - 1);
        let (epk, fpk) = self.primed_pair(k)?;
        let (epk, fpk) = (epk.clone(), fpk.clone());
        let e = self.br(Self::get(&self.e, plus)?, &epk)?.scaled(pre);
        let f = self.br(Self::get(&self.f, plus)?, &fpk)?.scaled(pre);
        self.set_pair(AffineRoot::real_plus(i, j, n), e, f);
        let e = self.br(&epk, Self::get(&self.e, wrap)?)?.scaled(pre);
        let f = self.br(&fpk, Self::get(&self.f, wrap)?)?.scaled(pre);
        self.set_pair(AffineRoot::real_minus_wrap(i, j, n), e, f);
        Ok(())
    }

    /// For `M = 1` the row `i = 1` has no neighbouring imaginary vector on
    /// the left; it is raised through `α_2` and the wrap-around root through
    /// `e′_{δ;α_1}`.
    fn raise_first_row_m1(&mut self, n: usize) -> Result<()> {
        let dim = self.rep.rank().dim();
        let one = C64::new(1.0, 0.0);
        let pre = self.prefactor(1, 2, 2)?;
        let (ep2, fp2) = self.primed_pair(2)?;
        let (ep2, fp2) = (ep2.clone(), fp2.clone());
        let prev = AffineRoot::real_plus(1, 2, n - 1);
        let e = self.br(Self::get(&self.e, prev)?, &ep2)?.scaled(pre);
        let f = self.br(Self::get(&self.f, prev)?, &fp2)?.scaled(pre);
        self.set_pair(AffineRoot::real_plus(1, 2, n), e, f);
        for j in 3..=dim {
            self.combine(AffineRoot::real_plus(1, j, n), AffineRoot::real_plus(1, j - 1, n), AffineRoot::real_plus(j - 1, j, 0), one, one)?;
        }
        let q = self.rep.ctx().q();
        let (ep1, fp1) = self.primed_pair(1)?;
        let (ep1, fp1) = (ep1.clone(), fp1.clone());
        let wrap = AffineRoot::real_minus_wrap(1, dim, n - 1);
        let e = self.br(&ep1, Self::get(&self.e, wrap)?)?.scaled(q);
        let f = self.br(&fp1, Self::get(&self.f, wrap)?)?.scaled(q.inv());
        self.set_pair(AffineRoot::real_minus_wrap(1, dim, n), e, f);
        for j in (2..dim).rev() {
            self.combine(AffineRoot::real_minus_wrap(1, j, n), AffineRoot::real_plus(j, j + 1, 0), AffineRoot::real_minus_wrap(1, j + 1, n), one, one)?;
        }
        Ok(())
    }
}

/// Real root vectors `e_γ, f_γ` for all real `γ` up to level `n_max` and the
/// primed imaginary vectors up to level `n_max`.
pub fn build_root_vectors(rep: &EvaluationRep, n_max: usize) -> Result<RootVectorTable> {
    let rank = *rep.rank();
    let dim = rank.dim();
    let m = rank.m();
    let one = C64::new(1.0, 0.0);
    let mut b = Builder { rep, e: HashMap::new(), f: HashMap::new(), ep: BTreeMap::new(), fp: BTreeMap::new() };

    for i in 1..dim {
        b.set_pair(AffineRoot::real_plus(i, i + 1, 0), rep.e_element(i), rep.f_element(i));
    }
    for i in 1..dim {
        for j in i + 2..=dim {
            b.combine(AffineRoot::real_plus(i, j, 0), AffineRoot::real_plus(i, j - 1, 0), AffineRoot::real_plus(j - 1, j, 0), one, one)?;
        }
    }
    b.set_pair(AffineRoot::real_minus_wrap(1, dim, 0), rep.e_element(0), rep.f_element(0));
    for i in 2..dim {
        b.combine(AffineRoot::real_minus_wrap(i, dim, 0), AffineRoot::real_plus(i - 1, i, 0), AffineRoot::real_minus_wrap(i - 1, dim, 0), one, one)?;
    }
    for i in 1..dim {
        for j in (i + 1..dim).rev() {
            b.combine(AffineRoot::real_minus_wrap(i, j, 0), AffineRoot::real_plus(j, j + 1, 0), AffineRoot::real_minus_wrap(i, j + 1, 0), one, one)?;
        }
    }
    if n_max >= 1 {
        for i in 1..dim {
            b.primed(i, 1)?;
        }
    }
    for n in 1..=n_max {
        for i in 1..dim {
            let k = if i < m { i } else { i - 1 };
            if k == 0 {
                continue;
            }
            for j in i + 1..=dim {
                b.raise_generic(i, j, n, k)?;
            }
        }
        if m == 1 {
            b.raise_first_row_m1(n)?;
        }
        if n < n_max {
            for i in 1..dim {
                b.primed(i, n + 1)?;
            }
        }
    }

    let mut real = HashMap::new();
    for (root, e) in b.e.drain() {
        let f = b.f.remove(&root).expect("e and f are stored together");
        real.insert(root, RootVectorPair { e, f });
    }
    let mut primed = BTreeMap::new();
    for (key, e) in std::mem::take(&mut b.ep) {
        let f = b.fp.remove(&key).expect("e' and f' are stored together");
        primed.insert(key, RootVectorPair { e, f });
    }
    Ok(RootVectorTable { n_max, real, primed, unprimed: BTreeMap::new() })
}

/// Adds `e_{nδ;α_i}` and `f_{nδ;α_i}` for `1 <= n <= n_max` (at most the
/// table cutoff), defined by
/// `-(q_i - q_i^{-1}) e_{δ;α_i}(u) = log(1 - (q_i - q_i^{-1}) e′_{δ;α_i}(u))` and
/// `(q_i - q_i^{-1}) f_{δ;α_i}(u) = log(1 + (q_i - q_i^{-1}) f′_{δ;α_i}(u))`.
pub fn unprimed_imaginary(table: &mut RootVectorTable, rep: &EvaluationRep, n_max: usize) -> Result<()> {
    if n_max > table.n_max {
        return Err(Error::Truncation { order: table.n_max, required: n_max });
    }
    if n_max == 0 {
        return Ok(());
    }
    let ctx = rep.ctx();
    if ctx.series_order() < n_max {
        return Err(Error::Truncation { order: ctx.series_order(), required: n_max });
    }
    let rank = *rep.rank();
    let dim = rank.dim();
    for i in 1..dim {
        let qi = ctx.powi(rank.d(i));
        let k = qi - qi.inv();
        let id = CMatrix::identity(dim, dim);
        let mut ec = vec![id.clone()];
        let mut fc = vec![id];
        for n in 1..=n_max {
            let pair = table.primed(n, i).ok_or_else(|| Error::Construction(format!("missing primed vector ({n}, {i})")))?;
            ec.push(pair.e.matrix().data() * (-k));
            fc.push(pair.f.matrix().data() * k);
        }
        let le = TruncatedSeries::new(ec)?.log(ctx.tolerance().max(1e-12))?;
        let lf = TruncatedSeries::new(fc)?.log(ctx.tolerance().max(1e-12))?;
        for n in 1..=n_max {
            let root = AffineRoot::imaginary(n, i);
            let e = SuperMatrix::new(rep.space().clone(), le.coeff(n) / (-k))?;
            let f = SuperMatrix::new(rep.space().clone(), lf.coeff(n) / k)?;
            let e = RootGradedElement::new(root.coefficients(&rank), e, &rank)?;
            let f = RootGradedElement::new(root.negated().coefficients(&rank), f, &rank)?;
            table.unprimed.insert((n, i), RootVectorPair { e, f });
        }
    }
    Ok(())
}

/// The closed-form image of a real root vector: `ζ^{zeta_power} (-1)^{sign}
/// q^{q_power} E_{unit}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub zeta_power: i64,
    /// `+1` or `-1`.
    pub sign: i64,
    pub q_power: i64,
    /// 1-based matrix-unit indices.
    pub unit: (usize, usize),
}

impl Monomial {
    pub fn to_matrix(&self, rep: &EvaluationRep) -> SuperMatrix {
        let c = ipow(rep.zeta(), self.zeta_power) * rep.ctx().powi(self.q_power) * self.sign as f64;
        SuperMatrix::unit(rep.space(), self.unit.0 - 1, self.unit.1 - 1).scale(c)
    }
}

fn mono(zeta_power: i64, sign_exp: i64, q_power: i64, unit: (usize, usize)) -> Monomial {
    Monomial { zeta_power, sign: sign_pow(sign_exp) as i64, q_power, unit }
}

/// Closed form of `e_γ` (positive `γ`) or `f_γ` (negative `γ`) for a real
/// root `γ`.
pub fn real_root_monomial(root: &AffineRoot, rank: &SuperRank, grading: &crate::representations::GradingVector) -> Result<Monomial> {
    root.validate(rank)?;
    let m = rank.m() as i64;
    let s = grading.total();
    let is_e = root.sign == RootSign::Positive;
    match root.kind {
        RootKind::RealPlus { i, j, n } => {
            let (ii, n) = (i as i64, n as i64);
            let z = grading.s_ij(i, j) + n * s;
            Ok(if is_e {
                if ii < m && j == i + 1 {
                    mono(z, n * (ii + 1), n * (ii + 1), (i, j))
                } else if ii < m {
                    mono(z, n * (ii + 1), n * ii, (i, j))
                } else {
                    mono(z, n * ii, n * (2 * m - ii + 1), (i, j))
                }
            } else if ii < m && j == i + 1 {
                mono(-z, n * ii, -n * (ii + 1), (j, i))
            } else if ii < m {
                mono(-z, n * ii, -n * ii, (j, i))
            } else {
                mono(-z, n * (ii + 1), -n * (2 * m - ii + 1), (j, i))
            })
        }
        RootKind::RealMinusWrap { i, j, n } => {
            let (ii, n) = (i as i64, n as i64);
            let z = (s - grading.s_ij(i, j)) + n * s;
            Ok(if is_e {
                if ii < m && j == i + 1 {
                    mono(z, (n + 1) * ii + n, (n + 1) * ii + n, (j, i))
                } else if ii < m {
                    mono(z, (n + 1) * ii + n, (n + 1) * ii, (j, i))
                } else if ii == m {
                    mono(z, (n + 1) * m, (n + 1) * m + n, (j, i))
                } else {
                    mono(z, (n + 1) * ii + 1, (n + 1) * (2 * m - ii + 1) + 1, (j, i))
                }
            } else if ii < m && j == i + 1 {
                mono(-z, (n + 1) * ii + 1, -(n + 1) * ii - n, (i, j))
            } else if ii < m {
                mono(-z, (n + 1) * ii + 1, -(n + 1) * ii, (i, j))
            } else if ii == m {
                mono(-z, (n + 1) * m + n + 1, -(n + 1) * m - n, (i, j))
            } else {
                mono(-z, (n + 1) * ii + n, -(n + 1) * (2 * m - ii + 1) - 1, (i, j))
            })
        }
        RootKind::Imaginary { .. } => Err(Error::Domain("imaginary roots have no monomial image".into())),
    }
}

fn two_slot(rep: &EvaluationRep, i: usize, a: C64, b: C64) -> SuperMatrix {
    let dim = rep.rank().dim();
    let mut diag = vec![C64::new(0.0, 0.0); dim];
    diag[i - 1] = a;
    diag[i] = b;
    SuperMatrix::diagonal(rep.space(), &diag).expect("diagonal of matching size")
}

/// Closed form of a real root vector image or of a primed imaginary vector
/// image `e′_{nδ;α_i}` (positive) / `f′_{nδ;α_i}` (negative).
pub fn closed_form_root_vector(root: &AffineRoot, rep: &EvaluationRep) -> Result<SuperMatrix> {
    let rank = rep.rank();
    match root.kind {
        RootKind::Imaginary { n, simple } => {
            root.validate(rank)?;
            let (i, n, m) = (simple as i64, n as i64, rank.m() as i64);
            let s = rep.grading().total();
            let q = |k: i64| rep.ctx().powi(k);
            let one = C64::new(1.0, 0.0);
            let (zp, sign, qp, a, b) = if root.sign == RootSign::Positive {
                if i < m {
                    (n * s, n * i + n + 1, n * (i + 1) - 1, one, -q(2))
                } else if i == m {
                    (n * s, n * m + 1, n * (m + 1) - 1, one, one)
                } else {
                    (n * s, n * i + 1, n * (2 * m - i + 1) + 1, one, -q(-2))
                }
            } else if i < m {
                (-n * s, n * i + 1, -n * (i + 1) + 1, one, -q(-2))
            } else if i == m {
                (-n * s, n * m + n + 1, -n * (m + 1) + 1, one, one)
            } else {
                (-n * s, n * i + n + 1, -n * (2 * m - i + 1) - 1, one, -q(2))
            };
            let c = ipow(rep.zeta(), zp) * sign_pow(sign) * q(qp);
            Ok(two_slot(rep, simple, a * c, b * c))
        }
        _ => Ok(real_root_monomial(root, rank, rep.grading())?.to_matrix(rep)),
    }
}

/// Closed form of `e_{nδ;α_i}` (`sign` positive) or `f_{nδ;α_i}` (negative).
pub fn closed_form_unprimed(n: usize, i: usize, sign: RootSign, rep: &EvaluationRep) -> Result<SuperMatrix> {
    let rank = rep.rank();
    AffineRoot::imaginary(n, i).validate(rank)?;
    let ctx = rep.ctx();
    let (i_, n, m) = (i as i64, n as i64, rank.m() as i64);
    let s = rep.grading().total();
    let q = |k: i64| ctx.powi(k);
    let c = ctx.bracket(n)? / n as f64;
    let one = C64::new(1.0, 0.0);
    let (zp, sg, qp, a, b) = if sign == RootSign::Positive {
        if i_ < m {
            (n * s, n * i_ + n + 1, n * i_, one, -q(2 * n))
        } else if i_ == m {
            (n * s, n * m + 1, n * m, one, one)
        } else {
            (n * s, n * i_ + 1, n * (2 * m - i_ + 2), one, -q(-2 * n))
        }
    } else if i_ < m {
        (-n * s, n * i_ + 1, -n * i_, one, -q(-2 * n))
    } else if i_ == m {
        (-n * s, n * m + n + 1, -n * m, one, one)
    } else {
        (-n * s, n * i_ + n + 1, -n * (2 * m - i_ + 2), one, -q(2 * n))
    };
    let k = ipow(rep.zeta(), zp) * sign_pow(sg) * q(qp) * c;
    Ok(two_slot(rep, i, a * k, b * k))
}

fn rel_diff(a: &SuperMatrix, b: &SuperMatrix) -> f64 {
    a.max_abs_diff(b) / (1.0 + b.max_abs())
}

/// Largest relative deviation between the recursion and the closed forms
/// over all real roots and (primed and unprimed) imaginary vectors in the
/// table.
pub fn closed_form_deviation(table: &RootVectorTable, rep: &EvaluationRep) -> Result<f64> {
    let mut worst = 0.0f64;
    for (root, pair) in table.real_roots() {
        worst = worst.max(rel_diff(pair.e.matrix(), &closed_form_root_vector(root, rep)?));
        worst = worst.max(rel_diff(pair.f.matrix(), &closed_form_root_vector(&root.negated(), rep)?));
    }
    let dim = rep.rank().dim();
    for n in 1..=table.n_max() {
        for i in 1..dim {
            let root = AffineRoot::imaginary(n, i);
            let p = table.primed(n, i).ok_or_else(|| Error::Construction("missing primed vector".into()))?;
            worst = worst.max(rel_diff(p.e.matrix(), &closed_form_root_vector(&root, rep)?));
            worst = worst.max(rel_diff(p.f.matrix(), &closed_form_root_vector(&root.negated(), rep)?));
            if let Some(u) = table.unprimed(n, i) {
                worst = worst.max(rel_diff(u.e.matrix(), &closed_form_unprimed(n, i, RootSign::Positive, rep)?));
                worst = worst.max(rel_diff(u.f.matrix(), &closed_form_unprimed(n, i, RootSign::Negative, rep)?));
            }
        }
    }
    Ok(worst)
}

/// `T_n` with entries `[n B_ij]_q / n`.
pub fn t_matrix(n: usize, ctx: &QContext, rank: &SuperRank) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Domain("T_n needs n >= 1".into()));
    }
    let b = crate::root_data::CartanData::new(rank).b;
    let l = rank.rank();
    let mut t = CMatrix::zeros(l, l);
    for i in 0..l {
        for j in 0..l {
            t[(i, j)] = ctx.bracket(n as i64 * b[(i, j)])? / n as f64;
        }
    }
    Ok(t)
}

/// `U_n = T_n^{-1} = (n / [n]_q) (B_{q^n})^{-1}`.
pub fn u_matrix(n: usize, ctx: &QContext, rank: &SuperRank) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Domain("U_n needs n >= 1".into()));
    }
    let qn = ctx.at_power(n as i64);
    let den = qn.bracket(rank.m_minus_n())?;
    if den.norm() <= ctx.tolerance() {
        return Err(Error::DegenerateQ(format!("[M - N]_(q^{n}) = {den}")));
    }
    let scale = n as f64 / ctx.bracket(n as i64)?;
    Ok(bq_inverse_closed(rank, &qn)? * scale)
}

/// Sign convention for the relation between real and imaginary vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TRelationSigns {
    /// Coefficient `d_j o_j^n T_nij`.
    TargetOnly,
    /// Coefficient `d_j o_i^n o_j^n T_nij`.
    Both,
}

/// Largest residual of
/// `⟦e_{α_i+mδ}, e_{nδ;α_j}⟧ - c_{ij}^{(n)} e_{α_i+(m+n)δ}` over all
/// `1 <= i, j <= L`, `n >= 1`, `m >= 0`, `m + n <= max_total`.
pub fn t_relation_residual(table: &RootVectorTable, rep: &EvaluationRep, max_total: usize, signs: TRelationSigns) -> Result<f64> {
    if max_total > table.n_max() || max_total > table.unprimed_max() {
        return Err(Error::Truncation { order: table.n_max(), required: max_total });
    }
    let rank = rep.rank();
    let ctx = rep.ctx();
    let dim = rank.dim();
    let mut worst = 0.0f64;
    for n in 1..=max_total {
        let t = t_matrix(n, ctx, rank)?;
        for i in 1..dim {
            for j in 1..dim {
                let oi = if signs == TRelationSigns::Both { ipow(C64::new(rank.o(i) as f64, 0.0), n as i64) } else { C64::new(1.0, 0.0) };
                let coeff = t[(i - 1, j - 1)] * (rank.d(j) as f64) * ipow(C64::new(rank.o(j) as f64, 0.0), n as i64) * oi;
                let imag = &table.unprimed(n, j).expect("checked above").e;
                for m in 0..=max_total - n {
                    let x = &table.real(&AffineRoot::real_plus(i, i + 1, m)).expect("within cutoff").e;
                    let target = &table.real(&AffineRoot::real_plus(i, i + 1, m + n)).expect("within cutoff").e;
                    let lhs = q_supercommutator(x, imag, rep.system(), ctx)?;
                    worst = worst.max(lhs.matrix().max_abs_diff(&target.matrix().scale(coeff)));
                }
            }
        }
    }
    Ok(worst)
}

/// `a_γ` from `⟦e_γ, f_γ⟧ = a_γ (q^{h_γ} - q^{-h_γ}) / (q - q^{-1})`, solved by
/// least squares over the matrix entries.
pub fn a_gamma(root: &AffineRoot, table: &RootVectorTable, rep: &EvaluationRep) -> Result<C64> {
    if !root.is_positive() || !root.is_real() {
        return Err(Error::Domain(format!("a_gamma needs a positive real root, got {root}")));
    }
    let pair = table.real(root).ok_or_else(|| Error::Construction(format!("root {root} not in table")))?;
    let ctx = rep.ctx();
    let lhs = q_supercommutator(&pair.e, &pair.f, rep.system(), ctx)?;
    let h: Vec<f64> = rep.system().h_gamma(root).into_iter().map(|x| x as f64).collect();
    let hp = rep.cartan_product(&h);
    let hm = rep.cartan_product(&h.iter().map(|x| -x).collect::<Vec<_>>());
    let rhs = (&hp - &hm).scale(ctx.q_minus_qinv().inv());
    let num: C64 = rhs.data().iter().zip(lhs.matrix().data().iter()).map(|(r, l)| r.conj() * l).sum();
    let den: f64 = rhs.data().iter().map(|r| r.norm_sqr()).sum();
    if den == 0.0 {
        return Err(Error::Construction(format!("q^(h) - q^(-h) vanishes for {root}")));
    }
    let a = num / den;
    let residual = lhs.matrix().max_abs_diff(&rhs.scale(a));
    let scale = 1.0 + lhs.matrix().max_abs();
    if residual > 1e-9 * scale {
        return Err(Error::Construction(format!("a_gamma solve for {root} leaves residual {residual:e}")));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{evaluation_rep, GradingVector};
    use crate::scalars::max_modulus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ranks() -> Vec<SuperRank> {
        [(2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3), (4, 1), (1, 4)]
            .iter()
            .map(|&(m, n)| SuperRank::new(m, n).unwrap())
            .collect()
    }

    fn rep(r: &SuperRank, grading: Option<Vec<i64>>) -> EvaluationRep {
        let ctx = QContext::new(c(0.93, 0.37)).unwrap();
        let g = grading.map(|g| GradingVector::new(g, r).unwrap()).unwrap_or_else(|| GradingVector::standard(r));
        evaluation_rep(r, &ctx, c(0.71, 0.23), &g).unwrap()
    }

    #[test]
    fn finite_vectors_are_matrix_units() {
        let r = SuperRank::new(3, 2).unwrap();
        let g = vec![2, 1, -1, 3, 1];
        let rp = rep(&r, Some(g.clone()));
        let t = build_root_vectors(&rp, 0).unwrap();
        let gv = GradingVector::new(g, &r).unwrap();
        for i in 1..5 {
            for j in i + 1..=5 {
                let e = &t.real(&AffineRoot::real_plus(i, j, 0)).unwrap().e;
                let want = SuperMatrix::matrix_unit(&r, i, j).unwrap().scale(ipow(rp.zeta(), gv.s_ij(i, j)));
                assert!(e.matrix().max_abs_diff(&want) < 1e-14);
            }
        }
        let e0 = &t.real(&AffineRoot::real_minus_wrap(1, 5, 0)).unwrap().e;
        let s = gv.total() - gv.s_ij(1, 5);
        let want = SuperMatrix::matrix_unit(&r, 5, 1).unwrap().scale(-ipow(rp.zeta(), s) * rp.ctx().q());
        assert!(e0.matrix().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn single_step_expansion_sl21() {
        let r = SuperRank::new(2, 1).unwrap();
        let rp = rep(&r, None);
        let t = build_root_vectors(&rp, 0).unwrap();
        let q = rp.ctx().q();
        let z = rp.zeta();
        let u = |i, j| SuperMatrix::matrix_unit(&r, i, j).unwrap();
        // e_{δ-α_13} = e_0, e_{δ-α_23} = ⟦e_1, e_0⟧, e_{δ-α_12} = ⟦e_2, e_{δ-α_13}⟧.
        let e0 = u(3, 1).scale(-z * q);
        let e1 = u(1, 2).scale(z);
        let e2 = u(2, 3).scale(z);
        let b10 = -1;
        let e_w23 = &(&e1 * &e0) - &(&e0 * &e1).scale(rp.ctx().powi(-b10));
        let e_w12 = &(&e2 * &e0) + &(&e0 * &e2).scale(rp.ctx().powi(-1));
        let e13 = &(&e1 * &e2) - &(&e2 * &e1).scale(rp.ctx().powi(1));
        let got = |root| t.real(&root).unwrap().e.matrix().clone();
        assert!(got(AffineRoot::real_minus_wrap(2, 3, 0)).max_abs_diff(&e_w23) < 1e-14);
        assert!(got(AffineRoot::real_minus_wrap(1, 2, 0)).max_abs_diff(&e_w12) < 1e-14);
        assert!(got(AffineRoot::real_plus(1, 3, 0)).max_abs_diff(&e13) < 1e-14);
    }

    #[test]
    fn recursion_matches_closed_forms() {
        for r in ranks() {
            for g in [None, Some((0..r.dim() as i64).map(|k| 1 + k % 3).collect())] {
                let rp = rep(&r, g);
                let t = RootVectorTable::complete(&rp, 4).unwrap();
                let dev = closed_form_deviation(&t, &rp).unwrap();
                assert!(dev < 1e-10, "{r}: {dev:e}");
            }
        }
    }

    #[test]
    fn t_matrix_entries() {
        let ctx = QContext::new(c(1.1, 0.25)).unwrap();
        for r in ranks() {
            let b = crate::qcartan_inverse::bq_from_cartan(&r, &ctx).unwrap();
            assert!(max_modulus(&(t_matrix(1, &ctx, &r).unwrap() - &b)) < 1e-14);
            for n in 1..5 {
                let t = t_matrix(n, &ctx, &r).unwrap();
                let u = u_matrix(n, &ctx, &r).unwrap();
                let l = r.rank();
                assert!(max_modulus(&(&u * &t - CMatrix::identity(l, l))) < 1e-12, "{r} n = {n}");
            }
        }
    }

    #[test]
    fn t_relation_needs_both_signs() {
        for r in ranks() {
            let rp = rep(&r, None);
            let t = RootVectorTable::complete(&rp, 4).unwrap();
            let both = t_relation_residual(&t, &rp, 4, TRelationSigns::Both).unwrap();
            assert!(both < 1e-10, "{r}: {both:e}");
        }
        let r = SuperRank::new(3, 2).unwrap();
        let rp = rep(&r, None);
        let t = RootVectorTable::complete(&rp, 4).unwrap();
        assert!(t_relation_residual(&t, &rp, 4, TRelationSigns::TargetOnly).unwrap() > 1e-3);
    }

    #[test]
    fn a_gamma_values() {
        for r in ranks() {
            let rp = rep(&r, None);
            let t = build_root_vectors(&rp, 3).unwrap();
            for (root, _) in t.real_roots() {
                let a = a_gamma(root, &t, &rp).unwrap();
                match root.kind {
                    RootKind::RealPlus { i, n, .. } => {
                        let want = sign_pow(n as i64) * r.d(i) as f64;
                        assert!((a - want).norm() < 1e-10, "{r} {root}: {a}");
                    }
                    _ => assert!((a.norm() - 1.0).abs() < 1e-10 && a.im.abs() < 1e-10, "{r} {root}: {a}"),
                }
            }
        }
        let r = SuperRank::new(2, 1).unwrap();
        let rp = rep(&r, None);
        let t = build_root_vectors(&rp, 1).unwrap();
        assert!(a_gamma(&AffineRoot::imaginary(1, 1), &t, &rp).is_err());
    }

    #[test]
    fn weight_covariance_and_shape() {
        for r in ranks() {
            let rp = rep(&r, None);
            let t = RootVectorTable::complete(&rp, 3).unwrap();
            let nodes = r.dim();
            for (root, pair) in t.entries() {
                let h = rp.system().cartan().a1.clone();
                let coeffs = root.coefficients(&r);
                for j in 0..nodes {
                    let nu = 0.6;
                    let w: i64 = (0..nodes).map(|k| h[(j, k)] * coeffs.0[k]).sum();
                    let d = rp.cartan(j, nu);
                    let di = rp.cartan(j, -nu);
                    let conj_e = &(&d * pair.e.matrix()) * &di;
                    let conj_f = &(&d * pair.f.matrix()) * &di;
                    let s = rp.ctx().pow(nu * w as f64);
                    let tol = 1e-10 * (1.0 + pair.e.matrix().max_abs());
                    assert!(conj_e.max_abs_diff(&pair.e.matrix().scale(s)) < tol, "{r} {root}");
                    let tol = 1e-10 * (1.0 + pair.f.matrix().max_abs());
                    assert!(conj_f.max_abs_diff(&pair.f.matrix().scale(s.inv())) < tol, "{r} {root}");
                }
                let nonzero = pair.e.matrix().data().iter().filter(|z| z.norm() > 0.0).count();
                if root.is_real() {
                    assert_eq!(nonzero, 1, "{root}");
                } else {
                    let RootKind::Imaginary { simple, .. } = root.kind else { unreachable!() };
                    for k in 0..nodes {
                        for l in 0..nodes {
                            let on = k == l && (k + 1 == simple || k == simple);
                            if !on {
                                assert_eq!(pair.e.matrix().get(k, l), c(0.0, 0.0));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn first_unprimed_equals_primed() {
        let r = SuperRank::new(2, 3).unwrap();
        let rp = rep(&r, None);
        let t = RootVectorTable::complete(&rp, 2).unwrap();
        for i in 1..r.dim() {
            let p = t.primed(1, i).unwrap();
            let u = t.unprimed(1, i).unwrap();
            assert!(p.e.matrix().max_abs_diff(u.e.matrix()) < 1e-14);
            assert!(p.f.matrix().max_abs_diff(u.f.matrix()) < 1e-14);
        }
    }

    #[test]
    fn truncation_error() {
        let r = SuperRank::new(2, 1).unwrap();
        let ctx = QContext::new(c(0.93, 0.37)).unwrap().with_series_order(2);
        let rp = evaluation_rep(&r, &ctx, c(0.5, 0.1), &GradingVector::standard(&r)).unwrap();
        let mut t = build_root_vectors(&rp, 3).unwrap();
        assert!(matches!(unprimed_imaginary(&mut t, &rp, 3), Err(Error::Truncation { .. })));
    }

    #[test]
    fn closed_form_rejects_bad_roots() {
        let r = SuperRank::new(2, 1).unwrap();
        let rp = rep(&r, None);
        assert!(closed_form_root_vector(&AffineRoot::real_plus(2, 2, 0), &rp).is_err());
        assert!(closed_form_unprimed(1, 3, RootSign::Positive, &rp).is_err());
    }
}
