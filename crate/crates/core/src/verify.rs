//! Numerical verification of generated identities by pairing both sides
//! with smooth rapidly decaying test functions.
//!
//! Smooth terms are integrated angular-first, so radial powers that are
//! only conditionally integrable are handled by their angular content;
//! point-mass terms pair in closed form through derivatives of the test
//! function at the origin. A shrinking-ball surface check validates
//! point-mass coefficients independently via the divergence theorem.

use std::collections::BTreeMap;

use crate::quad::{gauss_legendre_on, sphere_rule};
use crate::tensor::IndexName;
use crate::transform::{IdentityKind, IdentityRecord, PositionTerm};
use crate::{Error, Result};

/// A polynomial times an off-center Gaussian,
/// `F(v) = poly(v) exp(-|v - center|^2 / (2 width^2))`,
/// closed under differentiation.
#[derive(Debug, Clone)]
pub struct TestFunction {
    label: String,
    center: [f64; 3],
    width: f64,
    poly: BTreeMap<[u32; 3], f64>,
}

impl TestFunction {
    pub fn gaussian(center: [f64; 3], width: f64) -> Self {
        let mut poly = BTreeMap::new();
        poly.insert([0, 0, 0], 1.0);
        TestFunction {
            label: format!(
                "gauss(center=({},{},{}), width={width})",
                center[0], center[1], center[2]
            ),
            center,
            width,
            poly,
        }
    }

    /// Multiplies by a polynomial given as `(coefficient, powers)` terms.
    pub fn with_poly(mut self, factor: &[(f64, [u32; 3])]) -> Self {
        let mut product: BTreeMap<[u32; 3], f64> = BTreeMap::new();
        for (&powers, &coeff) in &self.poly {
            for &(fc, fp) in factor {
                let key = [powers[0] + fp[0], powers[1] + fp[1], powers[2] + fp[2]];
                *product.entry(key).or_insert(0.0) += coeff * fc;
            }
        }
        product.retain(|_, c| *c != 0.0);
        self.poly = product;
        self.label = format!("{} * poly", self.label);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, v: [f64; 3]) -> f64 {
        let mut poly = 0.0;
        for (&powers, &coeff) in &self.poly {
            let mut term = coeff;
            for (axis, &p) in powers.iter().enumerate() {
                term *= v[axis].powi(p as i32);
            }
            poly += term;
        }
        let d2: f64 = (0..3).map(|a| (v[a] - self.center[a]).powi(2)).sum();
        poly * (-d2 / (2.0 * self.width * self.width)).exp()
    }

    /// Exact partial derivative along axis 0, 1, or 2; the result stays
    /// in the polynomial-times-Gaussian class.
    pub fn derivative(&self, axis: usize) -> TestFunction {
        assert!(axis < 3, "axis out of range");
        let inv_w2 = 1.0 / (self.width * self.width);
        let mut poly: BTreeMap<[u32; 3], f64> = BTreeMap::new();
        let mut add = |key: [u32; 3], c: f64| {
            if c != 0.0 {
                *poly.entry(key).or_insert(0.0) += c;
            }
        };
        for (&powers, &coeff) in &self.poly {
            // d/dv poly part.
            if powers[axis] > 0 {
                let mut key = powers;
                key[axis] -= 1;
                add(key, coeff * powers[axis] as f64);
            }
            // poly * d/dv Gaussian part: -(v - c)/w^2 times the term.
            let mut key = powers;
            key[axis] += 1;
            add(key, -coeff * inv_w2);
            add(powers, coeff * self.center[axis] * inv_w2);
        }
        poly.retain(|_, c| *c != 0.0);
        TestFunction {
            label: self.label.clone(),
            center: self.center,
            width: self.width,
            poly,
        }
    }

    /// Repeated derivative along the given axes.
    pub fn derivative_multi(&self, axes: &[usize]) -> TestFunction {
        let mut f = self.clone();
        for &a in axes {
            f = f.derivative(a);
        }
        f
    }

    pub fn laplacian(&self) -> TestFunction {
        let mut out = self.derivative(0).derivative(0);
        for axis in 1..3 {
            out = out
                .add(&self.derivative(axis).derivative(axis))
                .expect("same Gaussian");
        }
        out
    }

    pub fn laplacian_pow(&self, count: usize) -> TestFunction {
        let mut f = self.clone();
        for _ in 0..count {
            f = f.laplacian();
        }
        f
    }

    pub fn scale(&self, c: f64) -> TestFunction {
        let mut out = self.clone();
        for v in out.poly.values_mut() {
            *v *= c;
        }
        out.poly.retain(|_, c| *c != 0.0);
        out
    }

    /// Sum of two functions sharing the same Gaussian envelope.
    pub fn add(&self, other: &TestFunction) -> Result<TestFunction> {
        if self.center != other.center || self.width != other.width {
            return Err(Error::Argument(
                "cannot merge test functions with different Gaussian envelopes".into(),
            ));
        }
        let mut out = self.clone();
        for (&powers, &coeff) in &other.poly {
            *out.poly.entry(powers).or_insert(0.0) += coeff;
        }
        out.poly.retain(|_, c| *c != 0.0);
        Ok(out)
    }

    fn zero_like(&self) -> TestFunction {
        TestFunction {
            label: self.label.clone(),
            center: self.center,
            width: self.width,
            poly: BTreeMap::new(),
        }
    }
}

/// The fixed verification family: centered and off-center Gaussians of
/// two widths, plus one polynomial-weighted member, so that parity
/// accidents in any single function cannot hide a defect.
pub fn standard_family() -> Vec<TestFunction> {
    let off = [0.3, -0.2, 0.5];
    vec![
        TestFunction::gaussian([0.0, 0.0, 0.0], 0.7),
        TestFunction::gaussian([0.0, 0.0, 0.0], 1.3),
        TestFunction::gaussian(off, 0.7),
        TestFunction::gaussian(off, 1.3),
        TestFunction::gaussian(off, 1.0).with_poly(&[(1.0, [0, 0, 0]), (1.0, [1, 1, 0])]),
    ]
}

/// Quadrature layout for pairings and ball checks.
#[derive(Debug, Clone)]
pub struct BallConfig {
    /// Boundary between the single core radial interval and the tail
    /// panels of the infinite-range pairing integral.
    pub radius: f64,
    /// Gauss-Legendre nodes on the core interval and on ball integrals.
    pub radial_nodes: usize,
    /// Sphere-rule resolution (polar x azimuthal).
    pub cos_nodes: usize,
    pub phi_nodes: usize,
    /// Shrinking radii for the surface check, in decreasing order.
    pub radius_sequence: Vec<f64>,
}

impl Default for BallConfig {
    fn default() -> Self {
        BallConfig {
            radius: 1.0,
            radial_nodes: 40,
            cos_nodes: 32,
            phi_nodes: 48,
            radius_sequence: vec![0.2, 0.1, 0.05, 0.025, 0.0125],
        }
    }
}

impl BallConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0)
            || self.radial_nodes < 8
            || self.cos_nodes < 8
            || self.phi_nodes < 8
        {
            return Err(Error::Argument(
                "ball config needs radius > 0 and at least 8 nodes per direction".into(),
            ));
        }
        if self.radius_sequence.is_empty()
            || self.radius_sequence.windows(2).any(|w| w[1] >= w[0])
            || self.radius_sequence.iter().any(|r| !(*r > 0.0))
        {
            return Err(Error::Argument(
                "radius sequence must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

const TAIL_NODES: usize = 24;
const TAIL_WIDTHS: f64 = 10.0;

fn assignment_map(
    indices: &[IndexName],
    assignment: &BTreeMap<IndexName, usize>,
) -> Result<()> {
    for i in indices {
        match assignment.get(i) {
            Some(v) if (1..=3).contains(v) => {}
            _ => {
                return Err(Error::Argument(format!(
                    "index {i} needs an assigned component in 1..=3"
                )))
            }
        }
    }
    Ok(())
}

/// Pairs a smooth position term with a test function:
/// `coeff integral F(v) r^r_pow angular(unit v) d^3v`, computed
/// angular-first on spheres, then radially over a core interval plus
/// Gaussian-tail panels. Requires the angular content to make the
/// radial integrand integrable at the origin:
/// `min angular momentum + r_pow + 2 >= 0`.
pub fn pair_regular(
    term: &PositionTerm,
    f: &TestFunction,
    assignment: &BTreeMap<IndexName, usize>,
    config: &BallConfig,
) -> Result<f64> {
    config.validate()?;
    if term.has_delta3() {
        return Err(Error::Argument(
            "point-mass terms pair in closed form; use pair_delta".into(),
        ));
    }
    assignment_map(term.angular().indices(), assignment)?;
    let ell_min = term
        .angular()
        .components()?
        .into_keys()
        .next()
        .unwrap_or(0);
    if ell_min + term.r_pow() + 2 < 0 {
        return Err(Error::Domain(format!(
            "pairing integrand r^{} with angular momentum floor {ell_min} is not integrable at the origin",
            term.r_pow()
        )));
    }
    let coeff = term.coeff().to_f64()?;
    if coeff == 0.0 {
        return Ok(0.0);
    }
    let sphere = sphere_rule(config.cos_nodes, config.phi_nodes);
    let angular: Vec<f64> = sphere
        .iter()
        .map(|&(dir, _)| term.angular().eval(assignment, dir))
        .collect::<Result<Vec<_>>>()?;
    let inner = |r: f64| -> f64 {
        sphere
            .iter()
            .zip(&angular)
            .map(|(&(dir, w), a)| w * a * f.eval([r * dir[0], r * dir[1], r * dir[2]]))
            .sum()
    };
    let power = term.r_pow() + 2;
    let weighted = |r: f64| inner(r) * r.powi(power as i32);

    let center_norm = (f.center[0].powi(2) + f.center[1].powi(2) + f.center[2].powi(2)).sqrt();
    let r_max = center_norm + TAIL_WIDTHS * f.width;
    let core_end = config.radius.min(r_max);
    let mut total = 0.0;
    for (r, w) in gauss_legendre_on(0.0, core_end, config.radial_nodes) {
        total += w * weighted(r);
    }
    let mut a = core_end;
    while a < r_max {
        let b = (a + f.width).min(r_max);
        for (r, w) in gauss_legendre_on(a, b, TAIL_NODES) {
            total += w * weighted(r);
        }
        a = b;
    }
    Ok(coeff * total)
}

/// Double factorial as a float, with `(-1)!! = 0!! = 1`.
fn df(k: i64) -> f64 {
    let mut out = 1.0;
    let mut m = k;
    while m > 1 {
        out *= m as f64;
        m -= 2;
    }
    out
}

/// All multisets of size `k` over components 1..=3, each as a sorted
/// tuple; one representative per permutation class.
pub fn component_multisets(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(k: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in min..=3 {
            cur.push(c);
            rec(k, c, cur, out);
            cur.pop();
        }
    }
    rec(k, 1, &mut Vec::new(), &mut out);
    out
}

/// Pairs a point-mass term with a test function in closed form:
/// `integral F (coeff r^-l T(unit) delta3) d^3v` equals a combination
/// of order-`l` derivatives of `F` at the origin weighted by angular
/// averages of `T` against unit-vector monomials.
pub fn pair_delta(
    term: &PositionTerm,
    f: &TestFunction,
    assignment: &BTreeMap<IndexName, usize>,
) -> Result<f64> {
    if !term.has_delta3() {
        return Err(Error::Argument(
            "smooth terms pair by quadrature; use pair_regular".into(),
        ));
    }
    assignment_map(term.angular().indices(), assignment)?;
    let ell = -term.r_pow();
    let coeff = term.coeff().to_f64()?;
    let mut total = 0.0;
    for multiset in component_multisets(ell as usize) {
        // Angular average of the term's angular factor times the
        // unit-vector monomial for this derivative multiset.
        let mut avg = 0.0;
        for (t, c) in term.angular().terms() {
            let mut consistent = true;
            for (a, b) in t.deltas() {
                if assignment[a] != assignment[b] {
                    consistent = false;
                    break;
                }
            }
            if !consistent {
                continue;
            }
            let mut counts = [0i64; 3];
            for &comp in &multiset {
                counts[comp - 1] += 1;
            }
            for h in t.hats() {
                counts[assignment[h] - 1] += 1;
            }
            if counts.iter().any(|&q| q % 2 != 0) {
                continue;
            }
            let q_total: i64 = counts.iter().sum();
            let moment =
                counts.iter().map(|&q| df(q - 1)).product::<f64>() / df(q_total + 1);
            avg += c.to_f64()? * moment;
        }
        if avg == 0.0 {
            continue;
        }
        // Multiplicity over ordered derivative tuples divided by l!
        // leaves 1 / (m1! m2! m3!).
        let mut m_fact = 1.0;
        let mut axes = Vec::with_capacity(ell as usize);
        let mut counts = [0u32; 3];
        for &comp in &multiset {
            counts[comp - 1] += 1;
            axes.push(comp - 1);
        }
        for q in counts {
            for j in 2..=q as u64 {
                m_fact *= j as f64;
            }
        }
        let deriv = f.derivative_multi(&axes).eval([0.0, 0.0, 0.0]);
        total += avg * deriv / m_fact;
    }
    Ok(coeff * total)
}

/// Average of `F` over the sphere of radius `r`.
pub fn spherical_average(f: &TestFunction, r: f64, config: &BallConfig) -> f64 {
    let sphere = sphere_rule(config.cos_nodes, config.phi_nodes);
    let total: f64 = sphere
        .iter()
        .map(|&(dir, w)| w * f.eval([r * dir[0], r * dir[1], r * dir[2]]))
        .sum();
    total / (4.0 * std::f64::consts::PI)
}

/// One pairing comparison within a verification run.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub function: String,
    pub assignment: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub error: f64,
    pub pass: bool,
}

/// Outcome of verifying one identity against a family of test
/// functions over all distinct component assignments.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub identity: String,
    pub tol: f64,
    pub rows: Vec<ReportRow>,
    pub max_error: f64,
    pub passed: bool,
}

fn base_term_power(kind: IdentityKind) -> Option<i64> {
    match kind {
        IdentityKind::TracelessInvR
        | IdentityKind::FullInvR
        | IdentityKind::DipoleE
        | IdentityKind::DipoleB => Some(-1),
        IdentityKind::TracelessInvRSquared => Some(-2),
        IdentityKind::TracelessDelta => None,
    }
}

/// Moves the derivative combination of an identity onto the test
/// function: for operator term deltas acting as Laplacian pairings and
/// hats as single derivatives, builds
/// `sum_t c_t [sigma consistent on deltas] d_H (lap)^(pairs) F`.
fn derived_test_function(
    record: &IdentityRecord,
    assignment: &BTreeMap<IndexName, usize>,
    f: &TestFunction,
) -> Result<TestFunction> {
    let mut out = f.zero_like();
    for (t, c) in record.operator().terms() {
        let consistent = t
            .deltas()
            .iter()
            .all(|(a, b)| assignment[a] == assignment[b]);
        if !consistent {
            continue;
        }
        let axes: Vec<usize> = t.hats().iter().map(|h| assignment[h] - 1).collect();
        let part = f
            .derivative_multi(&axes)
            .laplacian_pow(t.deltas().len())
            .scale(c.to_f64()?);
        out = out.add(&part)?;
    }
    Ok(out)
}

/// Verifies an identity numerically: for every test function and every
/// distinct component assignment, the left side is evaluated by moving
/// the derivatives onto the test function (sign `(-1)^k`) and pairing
/// with the base function, the right side by pairing with the generated
/// expression; a row passes when
/// `|lhs - rhs| <= tol * max(1, |rhs|)`.
pub fn verify_identity(
    record: &IdentityRecord,
    family: &[TestFunction],
    tol: f64,
    config: &BallConfig,
) -> Result<VerificationReport> {
    config.validate()?;
    if !(tol > 0.0) {
        return Err(Error::Argument("tolerance must be positive".into()));
    }
    let sign = if record.order() % 2 == 0 { 1.0 } else { -1.0 };
    let mut rows = Vec::new();
    let mut max_error: f64 = 0.0;
    for f in family {
        for tuple in component_multisets(record.order()) {
            let assignment: BTreeMap<IndexName, usize> = record
                .indices()
                .iter()
                .cloned()
                .zip(tuple.iter().copied())
                .collect();
            let df_combo = derived_test_function(record, &assignment, f)?;
            let empty = BTreeMap::new();
            let mut lhs = match base_term_power(record.kind()) {
                Some(r_pow) => {
                    let base = PositionTerm::new(
                        crate::exact::ExactScalar::one(),
                        r_pow,
                        false,
                        crate::tensor::TensorExpr::one(crate::tensor::Side::Position),
                    )?;
                    sign * pair_regular(&base, &df_combo, &empty, config)?
                }
                None => sign * df_combo.eval([0.0, 0.0, 0.0]),
            };
            if record.kind() == IdentityKind::DipoleB && tuple[0] == tuple[1] {
                lhs += 4.0 * std::f64::consts::PI * f.eval([0.0, 0.0, 0.0]);
            }
            let mut rhs = 0.0;
            for term in record.rhs().terms() {
                rhs += if term.has_delta3() {
                    pair_delta(term, f, &assignment)?
                } else {
                    pair_regular(term, f, &assignment, config)?
                };
            }
            let error = (lhs - rhs).abs();
            let pass = error <= tol * rhs.abs().max(1.0);
            max_error = max_error.max(error);
            rows.push(ReportRow {
                function: f.label().to_string(),
                assignment: tuple,
                lhs,
                rhs,
                error,
                pass,
            });
        }
    }
    Ok(VerificationReport {
        identity: record.lhs_text(),
        tol,
        passed: rows.iter().all(|r| r.pass),
        rows,
        max_error,
    })
}

/// A polynomial in position components over powers of the radius:
/// `sum c r^e x^a y^b z^c`, closed under differentiation; used to
/// carry derivative combinations of `1/r` and `1/r^2` exactly.
type RExpr = Vec<(f64, i64, [u32; 3])>;

fn rexpr_derivative(expr: &RExpr, axis: usize) -> RExpr {
    let mut out: RExpr = Vec::with_capacity(expr.len() * 2);
    for &(c, e, powers) in expr {
        if e != 0 {
            let mut p = powers;
            p[axis] += 1;
            out.push((c * e as f64, e - 2, p));
        }
        if powers[axis] > 0 {
            let mut p = powers;
            p[axis] -= 1;
            out.push((c * powers[axis] as f64, e, p));
        }
    }
    merge_rexpr(out)
}

fn merge_rexpr(expr: RExpr) -> RExpr {
    let mut map: BTreeMap<(i64, [u32; 3]), f64> = BTreeMap::new();
    for (c, e, p) in expr {
        *map.entry((e, p)).or_insert(0.0) += c;
    }
    map.into_iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|((e, p), c)| (c, e, p))
        .collect()
}

fn rexpr_laplacian(expr: &RExpr) -> RExpr {
    let mut out = Vec::new();
    for axis in 0..3 {
        out.extend(rexpr_derivative(&rexpr_derivative(expr, axis), axis));
    }
    merge_rexpr(out)
}

fn rexpr_eval(expr: &RExpr, v: [f64; 3]) -> f64 {
    let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    expr.iter()
        .map(|&(c, e, powers)| {
            let mut term = c * r.powi(e as i32);
            for (axis, &p) in powers.iter().enumerate() {
                term *= v[axis].powi(p as i32);
            }
            term
        })
        .sum()
}

/// Result of the shrinking-ball check: the residual
/// `surface(R) - ball(R) - point_pairing` and its log-log decay slope.
#[derive(Debug, Clone)]
pub struct BallCheck {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    pub slope: f64,
}

/// Validates point-mass coefficients by the divergence theorem on a
/// shrinking ball: one derivative is peeled off the identity's operator
/// (the first hat when present, otherwise a symbolic direction from a
/// Laplacian pairing), leaving explicit functions `L_m`; then
/// `surface(R) - ball(R)` with
/// `surface(R) = contour integral of F L_m unit_m R^2` and
/// `ball(R) = integral over the ball of (d_m F) L_m`
/// approaches the point-mass pairing as `R -> 0`, with the smooth
/// remainder decaying like `R` for an inverse-square base. The returned
/// slope fits `log |residual|` against `log R`.
pub fn ball_surface_check(
    record: &IdentityRecord,
    assignment: &BTreeMap<IndexName, usize>,
    f: &TestFunction,
    config: &BallConfig,
) -> Result<BallCheck> {
    config.validate()?;
    assignment_map(record.indices(), assignment)?;
    let base: RExpr = match record.kind() {
        IdentityKind::TracelessInvR
        | IdentityKind::FullInvR
        | IdentityKind::DipoleE => vec![(1.0, -1, [0, 0, 0])],
        IdentityKind::TracelessInvRSquared => vec![(1.0, -2, [0, 0, 0])],
        IdentityKind::TracelessDelta | IdentityKind::DipoleB => {
            return Err(Error::Domain(
                "surface check needs an identity whose left side is a derivative of a classical function".into(),
            ))
        }
    };
    if record.order() == 0 {
        return Err(Error::Domain(
            "surface check needs at least one derivative to peel".into(),
        ));
    }
    // Peel one derivative from each operator term, accumulating the
    // remaining explicit derivative of the base per peeled axis.
    let mut lambda: [RExpr; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for (t, c) in record.operator().terms() {
        if !t
            .deltas()
            .iter()
            .all(|(a, b)| assignment[a] == assignment[b])
        {
            continue;
        }
        let coeff = c.to_f64()?;
        let hats = t.hats();
        if let Some(first) = hats.first() {
            let mut expr = base.clone();
            for h in &hats[1..] {
                expr = rexpr_derivative(&expr, assignment[h] - 1);
            }
            for _ in 0..t.deltas().len() {
                expr = rexpr_laplacian(&expr);
            }
            let m = assignment[first] - 1;
            lambda[m].extend(expr.into_iter().map(|(cc, e, p)| (cc * coeff, e, p)));
        } else {
            // Pure Laplacian powers: peel a symbolic gradient direction.
            let mut expr = base.clone();
            for _ in 0..t.deltas().len() - 1 {
                expr = rexpr_laplacian(&expr);
            }
            for (m, slot) in lambda.iter_mut().enumerate() {
                let d = rexpr_derivative(&expr, m);
                slot.extend(d.into_iter().map(|(cc, e, p)| (cc * coeff, e, p)));
            }
        }
    }
    for slot in &mut lambda {
        *slot = merge_rexpr(std::mem::take(slot));
    }

    let mut point_pairing = 0.0;
    for term in record.rhs().terms() {
        if term.has_delta3() {
            point_pairing += pair_delta(term, f, assignment)?;
        }
    }

    let sphere = sphere_rule(config.cos_nodes, config.phi_nodes);
    let gradients: Vec<TestFunction> = (0..3).map(|m| f.derivative(m)).collect();
    let mut radii = Vec::new();
    let mut residuals = Vec::new();
    for &radius in &config.radius_sequence {
        let mut surface = 0.0;
        for &(dir, w) in &sphere {
            let v = [radius * dir[0], radius * dir[1], radius * dir[2]];
            let lam: f64 = (0..3).map(|m| dir[m] * rexpr_eval(&lambda[m], v)).sum();
            surface += w * f.eval(v) * lam * radius * radius;
        }
        let mut ball = 0.0;
        for (r, wr) in gauss_legendre_on(0.0, radius, config.radial_nodes) {
            let mut shell = 0.0;
            for &(dir, w) in &sphere {
                let v = [r * dir[0], r * dir[1], r * dir[2]];
                let integrand: f64 = (0..3)
                    .map(|m| gradients[m].eval(v) * rexpr_eval(&lambda[m], v))
                    .sum();
                shell += w * integrand;
            }
            ball += wr * r * r * shell;
        }
        radii.push(radius);
        residuals.push(surface - ball - point_pairing);
    }
    // Least-squares slope of log |residual| against log R.
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = residuals
        .iter()
        .map(|r| r.abs().max(1e-300).ln())
        .collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(BallCheck {
        radii,
        residuals,
        slope: sxy / sxx,
    })
}
