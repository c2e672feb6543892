//! Symbolic three-dimensional Fourier transforms of power-law angular
//! monomials, in both directions, plus generated derivative identities.
//!
//! Forward convention: `F(r) = integral d^3p / (2 pi)^3 e^(i p.r) f(p)`;
//! inverse convention: `f(p) = integral d^3r e^(-i p.r) F(r)`. Position
//! results are linear combinations of `r^k`, an optional point mass
//! `delta3` (the three-dimensional delta at the origin), and exact
//! angular factors; momentum results mirror them with `p^k` and
//! `deltap3`.

use std::collections::BTreeMap;
use std::fmt;

use crate::exact::{chi, double_factorial, ExactScalar};
use crate::tensor::{
    default_indices, traceless_top_indices, IndexName, Side, TensorExpr,
};
use crate::{Error, Result};

/// A momentum-space monomial `p^n` times an angular expression. With
/// `hat_normalized` set the expression's hat factors are unit-vector
/// components; otherwise each hat factor is a full vector component and
/// carries one extra power of `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumExpr {
    n: i64,
    angular: TensorExpr,
    hat_normalized: bool,
}

impl MomentumExpr {
    /// `p^n` times an angular expression over unit-vector factors.
    pub fn hat(n: i64, angular: TensorExpr) -> Result<Self> {
        Self::build(n, angular, true)
    }

    /// `p^n` times an expression whose hat factors denote full vector
    /// components.
    pub fn full(n: i64, angular: TensorExpr) -> Result<Self> {
        Self::build(n, angular, false)
    }

    fn build(n: i64, angular: TensorExpr, hat_normalized: bool) -> Result<Self> {
        if angular.side() != Side::Momentum {
            return Err(Error::Argument(
                "momentum expression requires momentum-side angular factors".into(),
            ));
        }
        Ok(MomentumExpr {
            n,
            angular,
            hat_normalized,
        })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn angular(&self) -> &TensorExpr {
        &self.angular
    }

    pub fn is_hat_normalized(&self) -> bool {
        self.hat_normalized
    }

    /// Uniform hat count across terms, when one exists.
    fn uniform_hats(&self) -> Result<i64> {
        let mut counts = self.angular.terms().map(|(t, _)| t.hats().len() as i64);
        let Some(first) = counts.next() else {
            return Ok(0);
        };
        if counts.all(|h| h == first) {
            Ok(first)
        } else {
            Err(Error::Argument(
                "terms carry different hat counts; no uniform power normalization exists".into(),
            ))
        }
    }

    /// The effective radial power once hat factors are unit-normalized.
    pub fn n_eff(&self) -> Result<i64> {
        if self.hat_normalized {
            Ok(self.n)
        } else {
            Ok(self.n + self.uniform_hats()?)
        }
    }

    /// Rewrites full vector factors as `p^h` times unit vectors. Fails
    /// when terms carry different hat counts.
    pub fn hat_normalize(&self) -> Result<MomentumExpr> {
        if self.hat_normalized {
            return Ok(self.clone());
        }
        Ok(MomentumExpr {
            n: self.n + self.uniform_hats()?,
            angular: self.angular.clone(),
            hat_normalized: true,
        })
    }
}

impl fmt::Display for MomentumExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vectors = if self.hat_normalized { "unit" } else { "full" };
        write!(f, "p^{} * ({}) [{vectors} vectors]", self.n, self.angular.render())
    }
}

/// Shared canonical form for position and momentum results: terms are
/// merged on (point mass, radial power, index set) with coefficients
/// folded through the angular part, the leading angular coefficient is
/// renormalized to 1, and point-mass terms are validated to pair
/// `r^(-l)` with a pure angular momentum `l` factor.
fn canonicalize_terms(
    indices: &[IndexName],
    side: Side,
    raw: Vec<(ExactScalar, i64, bool, TensorExpr)>,
) -> Result<Vec<(ExactScalar, i64, bool, TensorExpr)>> {
    let mut expected = indices.to_vec();
    expected.sort();
    if expected.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Argument("duplicate free index".into()));
    }
    // Key orders point-mass terms first, then descending radial power.
    let mut merged: BTreeMap<(bool, i64), TensorExpr> = BTreeMap::new();
    for (coeff, r_pow, delta3, angular) in raw {
        if angular.side() != side {
            return Err(Error::Argument("angular factor on the wrong side".into()));
        }
        let mut got = angular.indices().to_vec();
        got.sort();
        if got != expected {
            return Err(Error::Argument(format!(
                "term indices {got:?} do not match expression indices {expected:?}"
            )));
        }
        let folded = angular.scale(&coeff);
        match merged.entry((!delta3, -r_pow)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(folded);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() = o.get().add(&folded)?;
            }
        }
    }
    let mut out = Vec::new();
    for ((not_delta3, neg_r_pow), angular) in merged {
        if angular.is_zero() {
            continue;
        }
        let (delta3, r_pow) = (!not_delta3, -neg_r_pow);
        let leading = angular
            .terms()
            .next()
            .map(|(_, c)| c.clone())
            .expect("nonzero expression has a leading term");
        let normalized = angular.scale(&leading.inverse()?);
        if delta3 {
            // Every angular component must carry the one rank the radial
            // power pairs with; report the first component that does not.
            let failing = normalized
                .components()?
                .into_keys()
                .find(|ell| r_pow != -ell);
            if let Some(ell) = failing {
                return Err(Error::UnpairedDelta { r_pow, ell });
            }
        }
        out.push((leading, r_pow, delta3, normalized));
    }
    Ok(out)
}

fn render_terms(
    terms: &[(ExactScalar, i64, bool, TensorExpr)],
    radial_symbol: &str,
    delta_symbol: &str,
) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (coeff, r_pow, delta3, angular) in terms {
        let mut parts = vec![coeff.to_string()];
        if *r_pow != 0 {
            parts.push(format!("{radial_symbol}^{r_pow}"));
        }
        if *delta3 {
            parts.push(delta_symbol.to_string());
        }
        if !(angular.rank() == 0 && angular.term_count() == 1) {
            parts.push(format!("({})", angular.render()));
        }
        let piece = parts.join(" * ");
        if out.is_empty() {
            out = piece;
        } else if let Some(rest) = piece.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&piece);
        }
    }
    out
}

/// One canonical position-space term
/// `coeff * r^r_pow * [delta3] * angular(unit vectors)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionTerm {
    coeff: ExactScalar,
    r_pow: i64,
    delta3: bool,
    angular: TensorExpr,
}

impl PositionTerm {
    pub fn new(coeff: ExactScalar, r_pow: i64, delta3: bool, angular: TensorExpr) -> Result<Self> {
        if angular.side() != Side::Position {
            return Err(Error::Argument(
                "position term requires position-side angular factors".into(),
            ));
        }
        Ok(PositionTerm {
            coeff,
            r_pow,
            delta3,
            angular,
        })
    }

    pub fn coeff(&self) -> &ExactScalar {
        &self.coeff
    }

    pub fn r_pow(&self) -> i64 {
        self.r_pow
    }

    pub fn has_delta3(&self) -> bool {
        self.delta3
    }

    pub fn angular(&self) -> &TensorExpr {
        &self.angular
    }
}

/// A canonical position-space expression: merged, ordered (point-mass
/// terms first, then descending radial power), with each term's leading
/// angular coefficient normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionExpr {
    indices: Vec<IndexName>,
    terms: Vec<PositionTerm>,
}

impl PositionExpr {
    pub fn new(indices: Vec<IndexName>, terms: Vec<PositionTerm>) -> Result<Self> {
        let raw = terms
            .into_iter()
            .map(|t| (t.coeff, t.r_pow, t.delta3, t.angular))
            .collect();
        let canonical = canonicalize_terms(&indices, Side::Position, raw)?;
        Ok(PositionExpr {
            indices,
            terms: canonical
                .into_iter()
                .map(|(coeff, r_pow, delta3, angular)| PositionTerm {
                    coeff,
                    r_pow,
                    delta3,
                    angular,
                })
                .collect(),
        })
    }

    pub fn indices(&self) -> &[IndexName] {
        &self.indices
    }

    pub fn terms(&self) -> &[PositionTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &ExactScalar) -> Result<PositionExpr> {
        let terms = self
            .terms
            .iter()
            .map(|t| PositionTerm {
                coeff: t.coeff.mul(c),
                ..t.clone()
            })
            .collect();
        PositionExpr::new(self.indices.clone(), terms)
    }

    pub fn add(&self, other: &PositionExpr) -> Result<PositionExpr> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        PositionExpr::new(self.indices.clone(), terms)
    }

    /// Contracts two free indices in every term and recanonicalizes.
    pub fn contract(&self, a: &IndexName, b: &IndexName) -> Result<PositionExpr> {
        let indices: Vec<IndexName> = self
            .indices
            .iter()
            .filter(|i| *i != a && *i != b)
            .cloned()
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(PositionTerm {
                    coeff: t.coeff.clone(),
                    r_pow: t.r_pow,
                    delta3: t.delta3,
                    angular: t.angular.contract(a, b)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PositionExpr::new(indices, terms)
    }

    /// Keeps only the angular-momentum-`ell` content of every term.
    pub fn project(&self, ell: i64) -> Result<PositionExpr> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(PositionTerm {
                    coeff: t.coeff.clone(),
                    r_pow: t.r_pow,
                    delta3: t.delta3,
                    angular: t.angular.project(ell)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PositionExpr::new(self.indices.clone(), terms)
    }

    pub fn render(&self) -> String {
        let tuples: Vec<_> = self
            .terms
            .iter()
            .map(|t| (t.coeff.clone(), t.r_pow, t.delta3, t.angular.clone()))
            .collect();
        render_terms(&tuples, "r", "delta3")
    }
}

impl fmt::Display for PositionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// One canonical momentum-space term
/// `coeff * p^p_pow * [deltap3] * angular(unit vectors)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumTerm {
    coeff: ExactScalar,
    p_pow: i64,
    deltap3: bool,
    angular: TensorExpr,
}

impl MomentumTerm {
    pub fn new(coeff: ExactScalar, p_pow: i64, deltap3: bool, angular: TensorExpr) -> Result<Self> {
        if angular.side() != Side::Momentum {
            return Err(Error::Argument(
                "momentum term requires momentum-side angular factors".into(),
            ));
        }
        Ok(MomentumTerm {
            coeff,
            p_pow,
            deltap3,
            angular,
        })
    }

    pub fn coeff(&self) -> &ExactScalar {
        &self.coeff
    }

    pub fn p_pow(&self) -> i64 {
        self.p_pow
    }

    pub fn has_deltap3(&self) -> bool {
        self.deltap3
    }

    pub fn angular(&self) -> &TensorExpr {
        &self.angular
    }
}

/// Canonical momentum-space image of an inverse transform, mirroring
/// [`PositionExpr`] with `p^k` powers and the momentum point mass
/// `deltap3` (which carries a `(2 pi)^3` normalization when produced).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumImage {
    indices: Vec<IndexName>,
    terms: Vec<MomentumTerm>,
}

impl MomentumImage {
    pub fn new(indices: Vec<IndexName>, terms: Vec<MomentumTerm>) -> Result<Self> {
        let raw = terms
            .into_iter()
            .map(|t| (t.coeff, t.p_pow, t.deltap3, t.angular))
            .collect();
        let canonical = canonicalize_terms(&indices, Side::Momentum, raw)?;
        Ok(MomentumImage {
            indices,
            terms: canonical
                .into_iter()
                .map(|(coeff, p_pow, deltap3, angular)| MomentumTerm {
                    coeff,
                    p_pow,
                    deltap3,
                    angular,
                })
                .collect(),
        })
    }

    /// The canonical image of a bare momentum monomial, used to compare
    /// round trips structurally.
    pub fn of_expr(expr: &MomentumExpr) -> Result<MomentumImage> {
        let indices = expr.angular().indices().to_vec();
        let mut terms = Vec::new();
        for (t, c) in expr.angular().terms() {
            let extra = if expr.is_hat_normalized() {
                0
            } else {
                t.hats().len() as i64
            };
            let mut single = TensorExpr::zero(indices.clone(), Side::Momentum)?;
            single.add_term(t.clone(), ExactScalar::one())?;
            terms.push(MomentumTerm::new(
                c.clone(),
                expr.n() + extra,
                false,
                single,
            )?);
        }
        MomentumImage::new(indices, terms)
    }

    pub fn indices(&self) -> &[IndexName] {
        &self.indices
    }

    pub fn terms(&self) -> &[MomentumTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn render(&self) -> String {
        let tuples: Vec<_> = self
            .terms
            .iter()
            .map(|t| (t.coeff.clone(), t.p_pow, t.deltap3, t.angular.clone()))
            .collect();
        render_terms(&tuples, "p", "deltap3")
    }
}

impl fmt::Display for MomentumImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Forward transform of `p^n` times an angular expression.
///
/// Terms are grouped by effective power, summed, and split into pure
/// angular-momentum components so that cancellations are honored before
/// domain checks. A component with angular momentum `ell` maps by
/// `-(ell+3) < n_eff < ell` to `(i^ell / 2 pi^2) chi(n_eff, ell)` times
/// `r^-(n_eff+3)`, and at `n_eff = ell` to the point-mass term
/// `i^ell (2 ell + 1)!! delta3 r^-ell`; anything else is outside the
/// framework.
pub fn forward(expr: &MomentumExpr) -> Result<PositionExpr> {
    let indices = expr.angular().indices().to_vec();
    // Group terms by their effective power of p.
    let mut groups: BTreeMap<i64, TensorExpr> = BTreeMap::new();
    for (t, c) in expr.angular().terms() {
        let extra = if expr.is_hat_normalized() {
            0
        } else {
            t.hats().len() as i64
        };
        let group = groups
            .entry(expr.n() + extra)
            .or_insert_with(|| TensorExpr::zero(indices.clone(), Side::Momentum).expect("valid indices"));
        group.add_term(t.clone(), c.clone())?;
    }
    let mut out_terms = Vec::new();
    for (n_eff, group) in groups {
        for (ell, part) in group.components()? {
            let angular = part.with_side(Side::Position);
            if n_eff == ell {
                let coeff = ExactScalar::from_bigint(double_factorial(2 * ell + 1)?)
                    .mul_i_pow(ell);
                out_terms.push(PositionTerm::new(coeff, -ell, true, angular)?);
            } else if n_eff < ell && n_eff > -(ell + 3) {
                let coeff = chi(n_eff, ell)?
                    .mul(&ExactScalar::from_parts(1, 2, 0, -2))
                    .mul_i_pow(ell);
                out_terms.push(PositionTerm::new(coeff, -(n_eff + 3), false, angular)?);
            } else {
                return Err(Error::OutsideFramework { n: n_eff, ell });
            }
        }
    }
    PositionExpr::new(indices, out_terms)
}

/// Inverse transform of a canonical position expression back to
/// momentum space.
///
/// Regular `r^n` components with `-(ell+3) < n < ell` map to
/// `4 pi (-i)^ell chi(n, ell) p^-(n+3)`; the boundary `n = ell` maps to
/// `(-i)^ell (2 ell + 1)!! (2 pi)^3 deltap3 p^-ell`; point-mass terms
/// `delta3 r^-ell` map to `(-i)^ell p^ell / (2 ell + 1)!!`.
pub fn inverse(expr: &PositionExpr) -> Result<MomentumImage> {
    let indices = expr.indices().to_vec();
    let mut out_terms = Vec::new();
    for term in expr.terms() {
        for (ell, part) in term.angular().components()? {
            let angular = part.with_side(Side::Momentum);
            let minus_i_ell = ExactScalar::one().mul_i_pow(-ell);
            if term.has_delta3() {
                let coeff = term
                    .coeff()
                    .mul(&minus_i_ell)
                    .mul(&ExactScalar::from_bigint(double_factorial(2 * ell + 1)?).inverse()?);
                out_terms.push(MomentumTerm::new(coeff, ell, false, angular)?);
            } else {
                let n = term.r_pow();
                if n == ell {
                    let coeff = term
                        .coeff()
                        .mul(&minus_i_ell)
                        .mul(&ExactScalar::from_bigint(double_factorial(2 * ell + 1)?))
                        .mul(&ExactScalar::from_parts(8, 1, 0, 3));
                    out_terms.push(MomentumTerm::new(coeff, -ell, true, angular)?);
                } else if n < ell && n > -(ell + 3) {
                    let coeff = term
                        .coeff()
                        .mul(&minus_i_ell)
                        .mul(&chi(n, ell)?)
                        .mul(&ExactScalar::from_parts(4, 1, 0, 1));
                    out_terms.push(MomentumTerm::new(coeff, -(n + 3), false, angular)?);
                } else {
                    return Err(Error::OutsideFramework { n, ell });
                }
            }
        }
    }
    MomentumImage::new(indices, out_terms)
}

/// The base function a derivative identity acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseFunction {
    /// `1/r`.
    InvR,
    /// `1/r^2`.
    InvRSquared,
    /// The point mass `delta3`.
    DeltaPoint,
}

/// Which identity family a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityKind {
    /// Traceless derivative combination of `1/r`.
    TracelessInvR,
    /// Traceless derivative combination of `1/r^2`.
    TracelessInvRSquared,
    /// Traceless derivative combination of the point mass.
    TracelessDelta,
    /// Plain (trace-carrying) derivatives of `1/r`.
    FullInvR,
    /// Static dipole field with a `-(4 pi / 3) d[i,j] delta3` point term.
    DipoleE,
    /// Static dipole field with a `+(8 pi / 3) d[i,j] delta3` point term.
    DipoleB,
}

/// A generated derivative identity: `operator` applied to the base
/// function of `kind` equals `rhs`. In the operator expression a hat
/// factor stands for one derivative along that index and a delta pair
/// stands for the index pairing of a Laplacian factor.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRecord {
    kind: IdentityKind,
    order: usize,
    indices: Vec<IndexName>,
    operator: TensorExpr,
    rhs: PositionExpr,
}

impl IdentityRecord {
    pub fn kind(&self) -> IdentityKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn indices(&self) -> &[IndexName] {
        &self.indices
    }

    pub fn operator(&self) -> &TensorExpr {
        &self.operator
    }

    pub fn rhs(&self) -> &PositionExpr {
        &self.rhs
    }

    #[cfg(test)]
    pub(crate) fn set_rhs_for_tests(&mut self, rhs: PositionExpr) {
        self.rhs = rhs;
    }

    /// Short text for the differentiated object, e.g. `dtop[i1,i2](1/r)`.
    pub fn lhs_text(&self) -> String {
        let list = self
            .indices
            .iter()
            .map(|i| i.as_str())
            .collect::<Vec<_>>()
            .join(",");
        match self.kind {
            IdentityKind::TracelessInvR => format!("dtop[{list}](1/r)"),
            IdentityKind::TracelessInvRSquared => format!("dtop[{list}](1/r^2)"),
            IdentityKind::TracelessDelta => format!("dtop[{list}](delta3)"),
            IdentityKind::FullInvR => format!("d[{list}](1/r)"),
            IdentityKind::DipoleE => format!("E[{list}]"),
            IdentityKind::DipoleB => format!("B[{list}]"),
        }
    }

    pub fn render(&self) -> String {
        format!("{} = {}", self.lhs_text(), self.rhs.render())
    }
}

/// The traceless `k`-th derivative combination of a base function,
/// generated through the forward transform rather than transcribed:
/// differentiation multiplies the momentum image by `i p` factors.
pub fn traceless_derivative(base: BaseFunction, k: usize) -> Result<IdentityRecord> {
    let indices = default_indices(k);
    let operator = traceless_top_indices(&indices, Side::Momentum)?;
    // Momentum images: 1/r = FT of 4 pi / p^2, 1/r^2 = FT of 2 pi^2 / p,
    // delta3 = FT of 1. Applying the traceless derivatives multiplies
    // by i^k p^k times the unit-vector combination.
    let (kind, base_power, prefactor) = match base {
        BaseFunction::InvR => (
            IdentityKind::TracelessInvR,
            -2,
            ExactScalar::from_parts(4, 1, 0, 1),
        ),
        BaseFunction::InvRSquared => (
            IdentityKind::TracelessInvRSquared,
            -1,
            ExactScalar::from_parts(2, 1, 0, 2),
        ),
        BaseFunction::DeltaPoint => (IdentityKind::TracelessDelta, 0, ExactScalar::one()),
    };
    let momentum = MomentumExpr::hat(base_power + k as i64, operator.clone())?;
    let rhs = forward(&momentum)?.scale(&prefactor.mul_i_pow(k as i64))?;
    Ok(IdentityRecord {
        kind,
        order: k,
        indices,
        operator,
        rhs,
    })
}

/// The plain `k`-th derivative of `1/r` including trace terms, defined
/// for `k <= 3`. Beyond that the transform of the trace parts requires
/// derivative-of-point-mass terms outside this framework.
pub fn full_derivative_inv_r(k: usize) -> Result<IdentityRecord> {
    if k > 3 {
        return Err(Error::Domain(format!(
            "full derivative of order {k}: trace parts need derivative point masses, only k <= 3 is representable"
        )));
    }
    let indices = default_indices(k);
    let operator = TensorExpr::hat_monomial(indices.clone(), Side::Momentum)?;
    let momentum = MomentumExpr::full(-2, operator.clone())?;
    let prefactor = ExactScalar::from_parts(4, 1, 0, 1).mul_i_pow(k as i64);
    let rhs = forward(&momentum)?.scale(&prefactor)?;
    Ok(IdentityRecord {
        kind: IdentityKind::FullInvR,
        order: k,
        indices,
        operator,
        rhs,
    })
}

/// The two point-dipole field patterns: both share the same smooth
/// `r^-3` part; they differ in the point-mass term, `-(4 pi / 3)` for
/// the first and `+(8 pi / 3)` for the second. Returned as `(E, B)`.
pub fn dipole_fields() -> Result<(IdentityRecord, IdentityRecord)> {
    let e = full_derivative_inv_r(2)?;
    let e_record = IdentityRecord {
        kind: IdentityKind::DipoleE,
        order: 2,
        indices: e.indices.clone(),
        operator: e.operator.clone(),
        rhs: e.rhs.clone(),
    };
    let extra = PositionExpr::new(
        e.indices.clone(),
        vec![PositionTerm::new(
            ExactScalar::from_parts(4, 1, 0, 1),
            0,
            true,
            TensorExpr::kronecker(e.indices[0].clone(), e.indices[1].clone(), Side::Position)?,
        )?],
    )?;
    let b_record = IdentityRecord {
        kind: IdentityKind::DipoleB,
        order: 2,
        indices: e.indices.clone(),
        operator: e.operator.clone(),
        rhs: e.rhs.add(&extra)?,
    };
    Ok((e_record, b_record))
}
