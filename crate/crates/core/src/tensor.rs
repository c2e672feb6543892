//! Exact symmetric tensor algebra over abstract 3D indices: angular
//! averages, contractions, and the angular-momentum decomposition of
//! unit-vector monomials.
//!
//! A [`TensorTerm`] is a product of Kronecker deltas and unit-vector
//! ("hat") factors over named indices; a [`TensorExpr`] is an exact
//! linear combination of such terms. Rendering uses `d[a,b]` for a delta
//! and `h[a]` for a hat factor.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::exact::{double_factorial, BigRational, ExactScalar};
use crate::quad::sphere_rule;
use crate::{Error, Result};

/// Largest monomial rank accepted by the decomposition routines by
/// default; the number of delta pairings grows factorially beyond this.
pub const L_MAX: i64 = 8;

/// An abstract tensor index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexName(String);

impl IndexName {
    pub fn new(symbol: impl Into<String>) -> Self {
        IndexName(symbol.into())
    }

    /// `numbered("i", 3)` is the index `i3`.
    pub fn numbered(prefix: &str, k: usize) -> Self {
        IndexName(format!("{prefix}{k}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The default index list `i1, ..., iL`.
pub fn default_indices(l_rank: usize) -> Vec<IndexName> {
    (1..=l_rank).map(|k| IndexName::numbered("i", k)).collect()
}

/// Which space an expression's unit vectors live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Momentum,
    Position,
}

/// One product of Kronecker deltas and hat factors; every free index
/// appears exactly once across `deltas` and `hats`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TensorTerm {
    deltas: Vec<(IndexName, IndexName)>,
    hats: Vec<IndexName>,
}

impl TensorTerm {
    pub fn new(deltas: Vec<(IndexName, IndexName)>, hats: Vec<IndexName>) -> Result<Self> {
        let term = Self::canonical(deltas, hats);
        let mut seen = term.hats.clone();
        for (a, b) in &term.deltas {
            if a == b {
                return Err(Error::Argument(format!(
                    "delta pair with repeated index {a}"
                )));
            }
            seen.push(a.clone());
            seen.push(b.clone());
        }
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument(
                "index appears more than once in a tensor term".into(),
            ));
        }
        Ok(term)
    }

    fn canonical(deltas: Vec<(IndexName, IndexName)>, mut hats: Vec<IndexName>) -> Self {
        let mut deltas: Vec<(IndexName, IndexName)> = deltas
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        deltas.sort();
        hats.sort();
        TensorTerm { deltas, hats }
    }

    pub fn unit() -> Self {
        TensorTerm {
            deltas: Vec::new(),
            hats: Vec::new(),
        }
    }

    pub fn deltas(&self) -> &[(IndexName, IndexName)] {
        &self.deltas
    }

    pub fn hats(&self) -> &[IndexName] {
        &self.hats
    }

    pub fn rank(&self) -> usize {
        2 * self.deltas.len() + self.hats.len()
    }

    fn index_multiset(&self) -> Vec<IndexName> {
        let mut v = self.hats.clone();
        for (a, b) in &self.deltas {
            v.push(a.clone());
            v.push(b.clone());
        }
        v.sort();
        v
    }

    fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .deltas
            .iter()
            .map(|(a, b)| format!("d[{a},{b}]"))
            .collect();
        parts.extend(self.hats.iter().map(|h| format!("h[{h}]")));
        parts.join("*")
    }
}

/// An exact linear combination of tensor terms sharing one ordered list
/// of free indices and one side.
#[derive(Debug, Clone)]
pub struct TensorExpr {
    indices: Vec<IndexName>,
    side: Side,
    terms: BTreeMap<TensorTerm, ExactScalar>,
}

/// Equality is semantic: the presentation order of free indices does
/// not matter, only the side, the index set, and the canonical terms.
impl PartialEq for TensorExpr {
    fn eq(&self, other: &Self) -> bool {
        self.side == other.side
            && self.sorted_indices() == other.sorted_indices()
            && self.terms == other.terms
    }
}

impl Eq for TensorExpr {}

impl TensorExpr {
    pub fn zero(indices: Vec<IndexName>, side: Side) -> Result<Self> {
        let mut sorted = indices.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument("duplicate free index".into()));
        }
        Ok(TensorExpr {
            indices,
            side,
            terms: BTreeMap::new(),
        })
    }

    /// The rank-0 expression with value 1.
    pub fn one(side: Side) -> Self {
        let mut e = Self::zero(Vec::new(), side).unwrap();
        e.add_term(TensorTerm::unit(), ExactScalar::one()).unwrap();
        e
    }

    /// The rank-0 expression with a given scalar value.
    pub fn scalar(c: ExactScalar, side: Side) -> Self {
        let mut e = Self::zero(Vec::new(), side).unwrap();
        e.add_term(TensorTerm::unit(), c).unwrap();
        e
    }

    /// The single-term monomial `h[i1]*...*h[iL]`.
    pub fn hat_monomial(indices: Vec<IndexName>, side: Side) -> Result<Self> {
        let mut e = Self::zero(indices.clone(), side)?;
        e.add_term(TensorTerm::new(Vec::new(), indices)?, ExactScalar::one())?;
        Ok(e)
    }

    /// The rank-2 expression `d[a,b]`.
    pub fn kronecker(a: IndexName, b: IndexName, side: Side) -> Result<Self> {
        let mut e = Self::zero(vec![a.clone(), b.clone()], side)?;
        e.add_term(TensorTerm::new(vec![(a, b)], Vec::new())?, ExactScalar::one())?;
        Ok(e)
    }

    pub fn indices(&self) -> &[IndexName] {
        &self.indices
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TensorTerm, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, term: &TensorTerm) -> ExactScalar {
        self.terms.get(term).cloned().unwrap_or_else(ExactScalar::zero)
    }

    fn sorted_indices(&self) -> Vec<IndexName> {
        let mut v = self.indices.clone();
        v.sort();
        v
    }

    /// Adds `coeff * term`, validating that the term covers exactly the
    /// expression's free indices.
    pub fn add_term(&mut self, term: TensorTerm, coeff: ExactScalar) -> Result<()> {
        if term.index_multiset() != self.sorted_indices() {
            return Err(Error::Argument(format!(
                "term indices {:?} do not match expression indices {:?}",
                term.index_multiset(),
                self.indices
            )));
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(term);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().try_add(&coeff)?;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    /// Sum of two expressions over the same index set and side.
    pub fn add(&self, other: &TensorExpr) -> Result<TensorExpr> {
        if self.side != other.side {
            return Err(Error::Argument("cannot add across sides".into()));
        }
        if self.sorted_indices() != other.sorted_indices() {
            return Err(Error::Argument(
                "cannot add expressions over different index sets".into(),
            ));
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorExpr) -> Result<TensorExpr> {
        self.add(&other.scale(&ExactScalar::from_integer(-1)))
    }

    pub fn scale(&self, c: &ExactScalar) -> TensorExpr {
        if c.is_zero() {
            return TensorExpr {
                indices: self.indices.clone(),
                side: self.side,
                terms: BTreeMap::new(),
            };
        }
        TensorExpr {
            indices: self.indices.clone(),
            side: self.side,
            terms: self
                .terms
                .iter()
                .map(|(t, q)| (t.clone(), q.mul(c)))
                .collect(),
        }
    }

    pub fn neg(&self) -> TensorExpr {
        self.scale(&ExactScalar::from_integer(-1))
    }

    /// Product of expressions over disjoint index sets.
    pub fn mul(&self, other: &TensorExpr) -> Result<TensorExpr> {
        if self.side != other.side {
            return Err(Error::Argument("cannot multiply across sides".into()));
        }
        let mut indices = self.indices.clone();
        indices.extend(other.indices.iter().cloned());
        let mut out = TensorExpr::zero(indices, self.side)?;
        for (t1, c1) in &self.terms {
            for (t2, c2) in &other.terms {
                let mut deltas = t1.deltas.clone();
                deltas.extend(t2.deltas.iter().cloned());
                let mut hats = t1.hats.clone();
                hats.extend(t2.hats.iter().cloned());
                out.add_term(TensorTerm::canonical(deltas, hats), c1.mul(c2))?;
            }
        }
        Ok(out)
    }

    /// Retags the expression's side without touching its content.
    pub fn with_side(&self, side: Side) -> TensorExpr {
        TensorExpr {
            indices: self.indices.clone(),
            side,
            terms: self.terms.clone(),
        }
    }

    /// Renames free indices; `map` must cover them all injectively.
    pub fn rename(&self, map: &BTreeMap<IndexName, IndexName>) -> Result<TensorExpr> {
        let get = |i: &IndexName| -> Result<IndexName> {
            map.get(i)
                .cloned()
                .ok_or_else(|| Error::Argument(format!("index {i} missing from rename map")))
        };
        let indices = self
            .indices
            .iter()
            .map(get)
            .collect::<Result<Vec<_>>>()?;
        let mut out = TensorExpr::zero(indices, self.side)?;
        for (t, c) in &self.terms {
            let deltas = t
                .deltas
                .iter()
                .map(|(a, b)| Ok((get(a)?, get(b)?)))
                .collect::<Result<Vec<_>>>()?;
            let hats = t.hats.iter().map(get).collect::<Result<Vec<_>>>()?;
            out.add_term(TensorTerm::canonical(deltas, hats), c.clone())?;
        }
        Ok(out)
    }

    /// Contracts two free indices using `d[a,a] = 3`, `d[a,b] h[b] = h[a]`,
    /// `h[a] h[a] = 1`, and `d[a,b] d[b,c] = d[a,c]`. Rank drops by two.
    pub fn contract(&self, a: &IndexName, b: &IndexName) -> Result<TensorExpr> {
        if a == b {
            return Err(Error::Argument("contraction indices must differ".into()));
        }
        if !self.indices.contains(a) || !self.indices.contains(b) {
            return Err(Error::Argument(format!(
                "contraction indices {a}, {b} not free in expression"
            )));
        }
        let indices: Vec<IndexName> = self
            .indices
            .iter()
            .filter(|i| *i != a && *i != b)
            .cloned()
            .collect();
        let mut out = TensorExpr::zero(indices, self.side)?;
        for (t, c) in &self.terms {
            let mut deltas = t.deltas.clone();
            let mut hats = t.hats.clone();
            let mut coeff = c.clone();
            let pos_a = deltas.iter().position(|(x, y)| x == a || y == a);
            match pos_a {
                Some(pa) => {
                    let (x, y) = deltas.remove(pa);
                    let partner_a = if x == *a { y } else { x };
                    if partner_a == *b {
                        // d[a,b] closing on itself: trace 3.
                        coeff = coeff.mul(&ExactScalar::from_integer(3));
                    } else if let Some(pb) =
                        deltas.iter().position(|(x, y)| x == b || y == b)
                    {
                        let (x, y) = deltas.remove(pb);
                        let partner_b = if x == *b { y } else { x };
                        deltas.push((partner_a, partner_b));
                    } else {
                        // b is a hat: d[a,c] h[b] -> h[c].
                        let hb = hats.iter().position(|h| h == b).expect("index in term");
                        hats[hb] = partner_a;
                    }
                }
                None => {
                    // a is a hat.
                    let ha = hats.iter().position(|h| h == a).expect("index in term");
                    hats.remove(ha);
                    if let Some(pb) = deltas.iter().position(|(x, y)| x == b || y == b) {
                        let (x, y) = deltas.remove(pb);
                        let partner_b = if x == *b { y } else { x };
                        hats.push(partner_b);
                    } else {
                        // h[a] h[a] = 1.
                        let hb = hats.iter().position(|h| h == b).expect("index in term");
                        hats.remove(hb);
                    }
                }
            }
            out.add_term(TensorTerm::canonical(deltas, hats), coeff)?;
        }
        Ok(out)
    }

    /// The part of the expression carrying angular momentum `ell`: each
    /// term's hat monomial is decomposed and only the `ell` piece kept,
    /// with delta factors passed through unchanged.
    pub fn project(&self, ell: i64) -> Result<TensorExpr> {
        let mut out = TensorExpr::zero(self.indices.clone(), self.side)?;
        for (t, c) in &self.terms {
            let h = t.hats.len() as i64;
            if ell > h || (h - ell) % 2 != 0 {
                continue;
            }
            let parts = decompose_indices(&t.hats, self.side)?;
            let Some(part) = parts.get(&ell) else {
                continue;
            };
            for (pt, pc) in &part.terms {
                let mut deltas = t.deltas.clone();
                deltas.extend(pt.deltas.iter().cloned());
                out.add_term(
                    TensorTerm::canonical(deltas, pt.hats.clone()),
                    c.mul(pc),
                )?;
            }
        }
        Ok(out)
    }

    /// All nonzero angular-momentum components, keyed by `ell`. Their sum
    /// reproduces the expression.
    pub fn components(&self) -> Result<BTreeMap<i64, TensorExpr>> {
        let max_h = self
            .terms
            .keys()
            .map(|t| t.hats.len() as i64)
            .max()
            .unwrap_or(0);
        let mut out = BTreeMap::new();
        let mut ell = max_h;
        while ell >= 0 {
            let part = self.project(ell)?;
            if !part.is_zero() {
                out.insert(ell, part);
            }
            ell -= 2;
        }
        Ok(out)
    }

    /// `Some(ell)` when the expression is a pure angular-momentum-`ell`
    /// object, `None` when it mixes components (zero counts as pure 0).
    pub fn angular_momentum(&self) -> Result<Option<i64>> {
        if self.is_zero() {
            return Ok(Some(0));
        }
        let comps = self.components()?;
        if comps.len() == 1 {
            Ok(comps.into_keys().next())
        } else {
            Ok(None)
        }
    }

    /// Numeric value with `d[a,b] -> [a == b]` and `h[a] -> unit[a]`.
    /// `assignment` maps every free index to a component 1..=3 and
    /// `unit` must have unit length within 1e-12.
    pub fn eval(
        &self,
        assignment: &BTreeMap<IndexName, usize>,
        unit: [f64; 3],
    ) -> Result<f64> {
        let norm = (unit[0] * unit[0] + unit[1] * unit[1] + unit[2] * unit[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "direction vector has length {norm}, expected 1"
            )));
        }
        let comp = |i: &IndexName| -> Result<usize> {
            match assignment.get(i) {
                Some(&v) if (1..=3).contains(&v) => Ok(v),
                Some(&v) => Err(Error::Argument(format!(
                    "index {i} assigned {v}, expected 1..=3"
                ))),
                None => Err(Error::Argument(format!("index {i} not assigned"))),
            }
        };
        let mut total = 0.0;
        for (t, c) in &self.terms {
            let mut factor = c.to_f64()?;
            for (a, b) in &t.deltas {
                if comp(a)? != comp(b)? {
                    factor = 0.0;
                }
            }
            for h in &t.hats {
                factor *= unit[comp(h)? - 1];
            }
            total += factor;
        }
        Ok(total)
    }

    /// Canonical rendering: terms as `c * d[a,b]*h[c]` joined by ` + `
    /// or ` - ` according to the sign of the coefficient.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (t, c) in &self.terms {
            let piece = if t.deltas.is_empty() && t.hats.is_empty() {
                c.to_string()
            } else {
                format!("{c} * {}", t.render())
            };
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
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Exact coefficients of the Legendre polynomial `P_ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegendreCoeffs {
    pub ell: i64,
    /// `coeffs[k]` multiplies `u^k`; entries with `k` of the wrong parity
    /// are zero.
    pub coeffs: Vec<BigRational>,
}

/// Coefficients of `P_ell` by the Bonnet recurrence
/// `(k+1) P_{k+1} = (2k+1) u P_k - k P_{k-1}`.
pub fn legendre_coeffs(ell: i64) -> Result<LegendreCoeffs> {
    if ell < 0 {
        return Err(Error::Domain(format!("legendre_coeffs({ell}): need l >= 0")));
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let mut p0 = vec![one.clone()];
    if ell == 0 {
        return Ok(LegendreCoeffs { ell, coeffs: p0 });
    }
    let mut p1 = vec![BigRational::zero(), one];
    for k in 1..ell {
        let mut next = vec![BigRational::zero(); (k + 2) as usize];
        let a = BigRational::new(BigInt::from(2 * k + 1), BigInt::from(k + 1));
        let b = BigRational::new(BigInt::from(k), BigInt::from(k + 1));
        for (j, c) in p1.iter().enumerate() {
            next[j + 1] += &a * c;
        }
        for (j, c) in p0.iter().enumerate() {
            next[j] -= &b * c;
        }
        p0 = p1;
        p1 = next;
    }
    Ok(LegendreCoeffs { ell, coeffs: p1 })
}

/// A tensor term over integer positions, used while enumerating delta
/// pairings before index names are attached.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct CompactTerm {
    deltas: Vec<(u8, u8)>,
    hats: Vec<u8>,
}

/// Calls `f` once per perfect matching of `0..total` (nothing when
/// `total` is odd).
fn for_each_matching(total: usize, f: &mut impl FnMut(&[(u8, u8)])) {
    assert!(total <= 16, "matching enumeration limited to 16 positions");
    if total % 2 != 0 {
        return;
    }
    let mut pairs: Vec<(u8, u8)> = Vec::with_capacity(total / 2);
    fn rec(used: u32, total: usize, pairs: &mut Vec<(u8, u8)>, f: &mut impl FnMut(&[(u8, u8)])) {
        let Some(a) = (0..total).find(|i| used & (1 << i) == 0) else {
            f(pairs);
            return;
        };
        for b in (a + 1)..total {
            if used & (1 << b) != 0 {
                continue;
            }
            pairs.push((a as u8, b as u8));
            rec(used | (1 << a) | (1 << b), total, pairs, f);
            pairs.pop();
        }
    }
    rec(0, total, &mut pairs, f);
}

/// The normalized angular average of the product of hat vectors over the
/// given indices: `[N even] / (N+1)!!` times the sum of all complete
/// delta pairings; the zero expression for odd `N`.
pub fn angular_average(indices: &[IndexName], side: Side) -> Result<TensorExpr> {
    let n = indices.len();
    let mut out = TensorExpr::zero(indices.to_vec(), side)?;
    if n % 2 != 0 {
        return Ok(out);
    }
    let norm = ExactScalar::from_bigint(double_factorial(n as i64 + 1)?)
        .inverse()
        .expect("nonzero double factorial");
    let mut err = None;
    for_each_matching(n, &mut |pairs| {
        if err.is_some() {
            return;
        }
        let deltas = pairs
            .iter()
            .map(|&(a, b)| (indices[a as usize].clone(), indices[b as usize].clone()))
            .collect();
        if let Err(e) = out.add_term(TensorTerm::canonical(deltas, Vec::new()), norm.clone()) {
            err = Some(e);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Core of the angular-momentum decomposition for one `ell`: accumulates
/// delta pairings of `L` free positions plus `k` dummy positions for
/// every power `u^k` appearing in `P_ell`.
fn decompose_component(l_rank: usize, ell: i64) -> Result<BTreeMap<CompactTerm, BigRational>> {
    let leg = legendre_coeffs(ell)?;
    let mut acc: BTreeMap<CompactTerm, BigRational> = BTreeMap::new();
    let weight_2l1 = BigRational::from_integer(BigInt::from(2 * ell + 1));
    let mut k = ell % 2;
    while k <= ell {
        let ck = &leg.coeffs[k as usize];
        if !ck.is_zero() {
            let total = l_rank + k as usize;
            // Average of L free hats and k dummy hats: dummy-dummy pairs
            // contract to 1, free-dummy pairs leave a free hat, free-free
            // pairs leave a delta.
            let mut counts: HashMap<CompactTerm, u64> = HashMap::new();
            for_each_matching(total, &mut |pairs| {
                let mut deltas = Vec::new();
                let mut hats = Vec::new();
                for &(a, b) in pairs {
                    let a_free = (a as usize) < l_rank;
                    let b_free = (b as usize) < l_rank;
                    match (a_free, b_free) {
                        (true, true) => deltas.push((a, b)),
                        (true, false) => hats.push(a),
                        (false, true) => hats.push(b),
                        (false, false) => {}
                    }
                }
                *counts.entry(CompactTerm { deltas, hats }).or_insert(0) += 1;
            });
            let norm = BigRational::from_integer(double_factorial(total as i64 + 1)?);
            for (key, cnt) in counts {
                let add = &weight_2l1 * ck * BigRational::from_integer(BigInt::from(cnt)) / &norm;
                *acc.entry(key).or_insert_with(BigRational::zero) += add;
            }
        }
        k += 2;
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(acc)
}

fn compact_to_expr(
    indices: &[IndexName],
    side: Side,
    terms: BTreeMap<CompactTerm, BigRational>,
) -> Result<TensorExpr> {
    let mut out = TensorExpr::zero(indices.to_vec(), side)?;
    for (key, q) in terms {
        let deltas = key
            .deltas
            .iter()
            .map(|&(a, b)| (indices[a as usize].clone(), indices[b as usize].clone()))
            .collect();
        let hats = key
            .hats
            .iter()
            .map(|&a| indices[a as usize].clone())
            .collect();
        out.add_term(TensorTerm::canonical(deltas, hats), ExactScalar::new(q, 0, 0))?;
    }
    Ok(out)
}

/// Angular-momentum decomposition of the hat monomial over the given
/// indices: keys run over `ell = L, L-2, ..., 1 or 0` and the components
/// sum back to the monomial.
pub fn decompose_indices(
    indices: &[IndexName],
    side: Side,
) -> Result<BTreeMap<i64, TensorExpr>> {
    decompose_indices_limit(indices, side, L_MAX)
}

/// As [`decompose_indices`] with an explicit rank ceiling.
pub fn decompose_indices_limit(
    indices: &[IndexName],
    side: Side,
    l_max: i64,
) -> Result<BTreeMap<i64, TensorExpr>> {
    let l_rank = indices.len() as i64;
    if l_rank > l_max {
        return Err(Error::Domain(format!(
            "decompose rank {l_rank} exceeds limit {l_max}"
        )));
    }
    let mut out = BTreeMap::new();
    let mut ell = l_rank % 2;
    while ell <= l_rank {
        let acc = decompose_component(indices.len(), ell)?;
        out.insert(ell, compact_to_expr(indices, side, acc)?);
        ell += 2;
    }
    Ok(out)
}

/// Decomposition of the rank-`L` momentum-side monomial over default
/// indices `i1..iL`.
pub fn decompose(l_rank: i64) -> Result<BTreeMap<i64, TensorExpr>> {
    if l_rank < 0 {
        return Err(Error::Domain(format!("decompose({l_rank}): need L >= 0")));
    }
    decompose_indices(&default_indices(l_rank as usize), Side::Momentum)
}

/// Enumerates the symmetrized delta-pairing basis: all ways to choose
/// exactly `j` disjoint index pairs, remaining indices as hats.
fn partial_pairings(total: usize, j: usize, f: &mut impl FnMut(&[(u8, u8)], &[u8])) {
    let mut pairs: Vec<(u8, u8)> = Vec::with_capacity(j);
    let mut hats: Vec<u8> = Vec::with_capacity(total);
    fn rec(
        pos: usize,
        used: u32,
        total: usize,
        left: usize,
        pairs: &mut Vec<(u8, u8)>,
        hats: &mut Vec<u8>,
        f: &mut impl FnMut(&[(u8, u8)], &[u8]),
    ) {
        if pos == total {
            if left == 0 {
                f(pairs, hats);
            }
            return;
        }
        if used & (1 << pos) != 0 {
            rec(pos + 1, used, total, left, pairs, hats, f);
            return;
        }
        // pos stays unpaired.
        hats.push(pos as u8);
        rec(pos + 1, used, total, left, pairs, hats, f);
        hats.pop();
        // pos pairs with a later unused position.
        if left > 0 {
            for b in (pos + 1)..total {
                if used & (1 << b) != 0 {
                    continue;
                }
                pairs.push((pos as u8, b as u8));
                rec(pos + 1, used | (1 << pos) | (1 << b), total, left - 1, pairs, hats, f);
                pairs.pop();
            }
        }
    }
    rec(0, 0, total, j, &mut pairs, &mut hats, f);
}

/// The rank-`L` symmetric traceless tensor built independently of the
/// projection route: delta-pairing terms with `j` pairs carry unknown
/// coefficients `A_j` (with `A_0 = 1`) fixed by requiring one index
/// contraction to vanish; the linear system is solved exactly.
pub fn traceless_top_indices(indices: &[IndexName], side: Side) -> Result<TensorExpr> {
    let l_rank = indices.len();
    if l_rank as i64 > L_MAX {
        return Err(Error::Domain(format!(
            "traceless rank {l_rank} exceeds limit {L_MAX}"
        )));
    }
    let j_max = l_rank / 2;
    // Basis element T_j: the symmetrized sum of all terms with j deltas.
    let mut basis = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let mut t = TensorExpr::zero(indices.to_vec(), side)?;
        partial_pairings(l_rank, j, &mut |pairs, hats| {
            let deltas = pairs
                .iter()
                .map(|&(a, b)| (indices[a as usize].clone(), indices[b as usize].clone()))
                .collect();
            let hats = hats
                .iter()
                .map(|&a| indices[a as usize].clone())
                .collect();
            t.add_term(TensorTerm::canonical(deltas, hats), ExactScalar::one())
                .expect("basis term matches indices");
        });
        basis.push(t);
    }
    if l_rank < 2 {
        return Ok(basis.swap_remove(0));
    }

    // One contraction of the symmetric ansatz must vanish identically.
    let contracted: Vec<TensorExpr> = basis
        .iter()
        .map(|t| t.contract(&indices[0], &indices[1]))
        .collect::<Result<Vec<_>>>()?;
    let mut keys: Vec<TensorTerm> = Vec::new();
    for c in &contracted {
        for (t, _) in c.terms() {
            if !keys.contains(t) {
                keys.push(t.clone());
            }
        }
    }
    // Rows: sum_j coef[j] A_j = 0 with A_0 = 1, unknowns A_1..A_jmax.
    let unknowns = j_max;
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for key in &keys {
        let mut row = Vec::with_capacity(unknowns + 1);
        for c in contracted.iter().skip(1) {
            row.push(c.coeff_of(key).rational().clone());
        }
        row.push(-contracted[0].coeff_of(key).rational().clone());
        rows.push(row);
    }
    let solution = solve_exact(rows, unknowns)?;

    let mut out = basis[0].clone();
    for (j, a) in solution.into_iter().enumerate() {
        out = out.add(&basis[j + 1].scale(&ExactScalar::new(a, 0, 0)))?;
    }
    Ok(out)
}

/// [`traceless_top_indices`] over default indices `i1..iL`.
pub fn traceless_top(l_rank: i64) -> Result<TensorExpr> {
    if l_rank < 0 {
        return Err(Error::Domain(format!("traceless_top({l_rank}): need L >= 0")));
    }
    traceless_top_indices(&default_indices(l_rank as usize), Side::Momentum)
}

/// Gaussian elimination for a (possibly overdetermined but consistent)
/// exact linear system in augmented form.
fn solve_exact(mut rows: Vec<Vec<BigRational>>, unknowns: usize) -> Result<Vec<BigRational>> {
    let mut pivot_row = 0;
    for col in 0..unknowns {
        let Some(r) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            return Err(Error::Internal(
                "singular traceless-projection system".into(),
            ));
        };
        rows.swap(pivot_row, r);
        let inv = rows[pivot_row][col].recip();
        for v in rows[pivot_row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in 0..=unknowns {
                    let delta = &f * &rows[pivot_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    for row in rows.iter().skip(pivot_row) {
        if !row[unknowns].is_zero() {
            return Err(Error::Internal(
                "inconsistent traceless-projection system".into(),
            ));
        }
    }
    Ok((0..unknowns)
        .map(|c| {
            rows[..pivot_row]
                .iter()
                .find(|row| !row[c].is_zero())
                .map(|row| row[unknowns].clone())
                .unwrap_or_else(BigRational::zero)
        })
        .collect())
}

/// Associated Legendre `P_l^m(x)` (Condon-Shortley phase), `0 <= m <= l`.
fn assoc_legendre(l: i64, m: i64, x: f64) -> f64 {
    debug_assert!((0..=l).contains(&m));
    let somx2 = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= -(2.0 * k as f64 - 1.0) * somx2;
    }
    if l == m {
        return pmm;
    }
    let mut pm1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut p = 0.0;
    for ll in (m + 2)..=l {
        p = ((2.0 * ll as f64 - 1.0) * x * pm1 - (ll + m - 1) as f64 * pmm) / (ll - m) as f64;
        pmm = pm1;
        pm1 = p;
    }
    p
}

/// Complex spherical harmonic `Y_l^m` at a unit direction.
fn ylm(l: i64, m: i64, dir: [f64; 3]) -> Complex64 {
    let am = m.abs();
    let cos_theta = dir[2];
    let phi = dir[1].atan2(dir[0]);
    let mut norm = (2.0 * l as f64 + 1.0) / (4.0 * std::f64::consts::PI);
    for k in (l - am + 1)..=(l + am) {
        norm /= k as f64;
    }
    let base = norm.sqrt() * assoc_legendre(l, am, cos_theta);
    let phase = Complex64::new(0.0, am as f64 * phi).exp();
    if m >= 0 {
        base * phase
    } else {
        // Y_{l,-m} = (-1)^m conj(Y_{l,m}).
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        sign * base * phase.conj()
    }
}

/// Deterministic well-spread sample directions (Fibonacci sphere).
fn sample_directions(count: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..count.max(1))
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count.max(1) as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Cross-checks `decompose(L)[ell]` against a spherical-harmonic
/// expansion: expands one concrete component of the rank-`L` monomial in
/// `Y_ell^m` by sphere quadrature, reconstructs at `sample_count`
/// directions, and returns the maximum absolute deviation from
/// [`TensorExpr::eval`]. For mismatched parity the expansion coefficients
/// must vanish, and the deviation of the reconstruction from zero is
/// returned instead.
pub fn ylm_cross_check(l_rank: i64, ell: i64, sample_count: usize) -> Result<f64> {
    if !(0..=l_rank).contains(&ell) || ell > 8 || l_rank > L_MAX {
        return Err(Error::Domain(format!(
            "ylm_cross_check(L={l_rank}, ell={ell}): need 0 <= ell <= L <= {L_MAX}, ell <= 8"
        )));
    }
    let indices = default_indices(l_rank as usize);
    // Fixed concrete assignment cycling x, y, z.
    let assignment: BTreeMap<IndexName, usize> = indices
        .iter()
        .enumerate()
        .map(|(t, i)| (i.clone(), (t % 3) + 1))
        .collect();
    let monomial = |dir: [f64; 3]| -> f64 {
        indices
            .iter()
            .map(|i| dir[assignment[i] - 1])
            .product()
    };
    let rule = sphere_rule(2 * l_rank.max(1) as usize + 2, 4 * l_rank.max(1) as usize + 4);
    let coeffs: Vec<Complex64> = (-ell..=ell)
        .map(|m| {
            rule.iter()
                .map(|&(dir, w)| ylm(ell, m, dir).conj() * monomial(dir) * w)
                .sum()
        })
        .collect();

    // Components exist only for matching parity; otherwise the
    // expansion coefficients themselves must vanish.
    let component = if (l_rank - ell) % 2 == 0 {
        Some(decompose(l_rank)?.remove(&ell).expect("component exists"))
    } else {
        None
    };
    let mut max_dev: f64 = 0.0;
    for dir in sample_directions(sample_count) {
        let recon: Complex64 = (-ell..=ell)
            .zip(&coeffs)
            .map(|(m, c)| c * ylm(ell, m, dir))
            .sum();
        let target = match &component {
            Some(part) => part.eval(&assignment, dir)?,
            None => 0.0,
        };
        max_dev = max_dev.max((recon - target).norm());
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(s: &str) -> IndexName {
        IndexName::new(s)
    }

    fn rational(num: i64, den: i64) -> ExactScalar {
        ExactScalar::from_ratio(num, den)
    }

    fn term(deltas: &[(&str, &str)], hats: &[&str]) -> TensorTerm {
        TensorTerm::new(
            deltas.iter().map(|&(a, b)| (idx(a), idx(b))).collect(),
            hats.iter().map(|&h| idx(h)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn term_rejects_repeated_indices() {
        assert!(TensorTerm::new(vec![(idx("a"), idx("a"))], vec![]).is_err());
        assert!(TensorTerm::new(vec![(idx("a"), idx("b"))], vec![idx("a")]).is_err());
    }

    #[test]
    fn angular_average_rank_two() {
        let avg = angular_average(&[idx("i1"), idx("i2")], Side::Momentum).unwrap();
        assert_eq!(avg.term_count(), 1);
        assert_eq!(avg.coeff_of(&term(&[("i1", "i2")], &[])), rational(1, 3));
    }

    #[test]
    fn angular_average_odd_vanishes() {
        let avg = angular_average(&[idx("i1")], Side::Momentum).unwrap();
        assert!(avg.is_zero());
    }

    #[test]
    fn angular_average_rank_four() {
        let names = ["i1", "i2", "i3", "i4"];
        let avg =
            angular_average(&names.map(idx), Side::Momentum).unwrap();
        assert_eq!(avg.term_count(), 3);
        for pairs in [
            [("i1", "i2"), ("i3", "i4")],
            [("i1", "i3"), ("i2", "i4")],
            [("i1", "i4"), ("i2", "i3")],
        ] {
            assert_eq!(avg.coeff_of(&term(&pairs, &[])), rational(1, 15));
        }
    }

    #[test]
    fn contract_examples() {
        let d = TensorExpr::kronecker(idx("a"), idx("b"), Side::Momentum).unwrap();
        let traced = d.contract(&idx("a"), &idx("b")).unwrap();
        assert_eq!(traced, TensorExpr::scalar(ExactScalar::from_integer(3), Side::Momentum));

        let hh = TensorExpr::hat_monomial(vec![idx("a"), idx("b")], Side::Momentum).unwrap();
        let traced = hh.contract(&idx("a"), &idx("b")).unwrap();
        assert_eq!(traced, TensorExpr::one(Side::Momentum));

        let top = decompose(2).unwrap().remove(&2).unwrap();
        let traced = top.contract(&idx("i1"), &idx("i2")).unwrap();
        assert!(traced.is_zero());
    }

    #[test]
    fn contract_chains_deltas() {
        // d[a,c] d[b,e] contracted over (a, b) leaves d[c,e].
        let mut e = TensorExpr::zero(
            vec![idx("a"), idx("b"), idx("c"), idx("e")],
            Side::Position,
        )
        .unwrap();
        e.add_term(term(&[("a", "c"), ("b", "e")], &[]), ExactScalar::one())
            .unwrap();
        let got = e.contract(&idx("a"), &idx("b")).unwrap();
        assert_eq!(got.term_count(), 1);
        assert_eq!(got.coeff_of(&term(&[("c", "e")], &[])), ExactScalar::one());
    }

    #[test]
    fn legendre_first_few() {
        let one = BigRational::from_integer(BigInt::from(1));
        assert_eq!(legendre_coeffs(0).unwrap().coeffs, vec![one.clone()]);
        assert_eq!(
            legendre_coeffs(1).unwrap().coeffs,
            vec![BigRational::zero(), one.clone()]
        );
        assert_eq!(
            legendre_coeffs(2).unwrap().coeffs,
            vec![
                BigRational::new(BigInt::from(-1), BigInt::from(2)),
                BigRational::zero(),
                BigRational::new(BigInt::from(3), BigInt::from(2)),
            ]
        );
    }

    #[test]
    fn legendre_normalization_and_parity() {
        for ell in 0..=10i64 {
            let p = legendre_coeffs(ell).unwrap();
            let sum: BigRational = p.coeffs.iter().cloned().sum();
            assert_eq!(sum, BigRational::from_integer(BigInt::from(1)), "P_{ell}(1)");
            for (k, c) in p.coeffs.iter().enumerate() {
                if (k as i64 - ell) % 2 != 0 {
                    assert!(c.is_zero(), "parity at l={ell}, k={k}");
                }
            }
        }
    }

    #[test]
    fn decompose_rank_two() {
        let parts = decompose(2).unwrap();
        assert_eq!(parts.len(), 2);
        let l0 = &parts[&0];
        assert_eq!(l0.coeff_of(&term(&[("i1", "i2")], &[])), rational(1, 3));
        assert_eq!(l0.term_count(), 1);
        let l2 = &parts[&2];
        assert_eq!(l2.coeff_of(&term(&[], &["i1", "i2"])), rational(1, 1));
        assert_eq!(l2.coeff_of(&term(&[("i1", "i2")], &[])), rational(-1, 3));
    }

    #[test]
    fn decompose_rank_three_vector_part() {
        let parts = decompose(3).unwrap();
        let l1 = &parts[&1];
        assert_eq!(l1.term_count(), 3);
        assert_eq!(l1.coeff_of(&term(&[("i2", "i3")], &["i1"])), rational(1, 5));
        assert_eq!(l1.coeff_of(&term(&[("i1", "i3")], &["i2"])), rational(1, 5));
        assert_eq!(l1.coeff_of(&term(&[("i1", "i2")], &["i3"])), rational(1, 5));
    }

    #[test]
    fn decompose_rank_four_scalar_part() {
        let parts = decompose(4).unwrap();
        let l0 = &parts[&0];
        assert_eq!(l0.term_count(), 3);
        assert_eq!(
            l0.coeff_of(&term(&[("i1", "i2"), ("i3", "i4")], &[])),
            rational(1, 15)
        );
    }

    #[test]
    fn decompose_rank_five_vector_part() {
        let parts = decompose(5).unwrap();
        let l1 = &parts[&1];
        assert_eq!(l1.term_count(), 15);
        assert_eq!(
            l1.coeff_of(&term(&[("i2", "i3"), ("i4", "i5")], &["i1"])),
            rational(1, 35)
        );
    }

    #[test]
    fn traceless_coefficients() {
        let t3 = traceless_top(3).unwrap();
        assert_eq!(t3.coeff_of(&term(&[], &["i1", "i2", "i3"])), rational(1, 1));
        assert_eq!(t3.coeff_of(&term(&[("i2", "i3")], &["i1"])), rational(-1, 5));

        let t4 = traceless_top(4).unwrap();
        assert_eq!(
            t4.coeff_of(&term(&[("i3", "i4")], &["i1", "i2"])),
            rational(-1, 7)
        );
        assert_eq!(
            t4.coeff_of(&term(&[("i1", "i2"), ("i3", "i4")], &[])),
            rational(1, 35)
        );

        let t5 = traceless_top(5).unwrap();
        assert_eq!(
            t5.coeff_of(&term(&[("i4", "i5")], &["i1", "i2", "i3"])),
            rational(-1, 9)
        );
        assert_eq!(
            t5.coeff_of(&term(&[("i2", "i3"), ("i4", "i5")], &["i1"])),
            rational(1, 63)
        );
    }

    #[test]
    fn decompose_agrees_with_traceless_ansatz() {
        for l in 0..=5i64 {
            assert_eq!(
                decompose(l).unwrap().remove(&l).unwrap(),
                traceless_top(l).unwrap(),
                "L={l}"
            );
        }
    }

    #[test]
    fn decompose_completeness_small() {
        for l in 0..=5i64 {
            let indices = default_indices(l as usize);
            let monomial =
                TensorExpr::hat_monomial(indices.clone(), Side::Momentum).unwrap();
            let mut sum = TensorExpr::zero(indices, Side::Momentum).unwrap();
            for (_, part) in decompose(l).unwrap() {
                sum = sum.add(&part).unwrap();
            }
            assert_eq!(sum, monomial, "L={l}");
        }
    }

    #[test]
    fn decompose_tracelessness_small() {
        for l in 2..=5i64 {
            let top = decompose(l).unwrap().remove(&l).unwrap();
            let indices = default_indices(l as usize);
            for a in 0..l as usize {
                for b in (a + 1)..l as usize {
                    let traced = top.contract(&indices[a], &indices[b]).unwrap();
                    assert!(traced.is_zero(), "L={l} pair ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn decompose_recursive_structure() {
        // The next-to-top component is 1/(2L-1) times the symmetrized
        // product of a delta with the rank L-2 traceless tensor.
        for l in [4i64, 5] {
            let indices = default_indices(l as usize);
            let expect = decompose(l).unwrap().remove(&(l - 2)).unwrap();
            let mut sum = TensorExpr::zero(indices.clone(), Side::Momentum).unwrap();
            for a in 0..l as usize {
                for b in (a + 1)..l as usize {
                    let rest: Vec<IndexName> = indices
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| *t != a && *t != b)
                        .map(|(_, i)| i.clone())
                        .collect();
                    let top = traceless_top_indices(&rest, Side::Momentum).unwrap();
                    let delta = TensorExpr::kronecker(
                        indices[a].clone(),
                        indices[b].clone(),
                        Side::Momentum,
                    )
                    .unwrap();
                    sum = sum.add(&delta.mul(&top).unwrap()).unwrap();
                }
            }
            let scaled = sum.scale(&rational(1, 2 * l - 1));
            assert_eq!(scaled, expect, "L={l}");
        }
    }

    #[test]
    fn decompose_symmetric_under_relabeling() {
        // Swapping index names leaves each component invariant.
        let parts = decompose(4).unwrap();
        let mut map = BTreeMap::new();
        map.insert(idx("i1"), idx("i3"));
        map.insert(idx("i3"), idx("i1"));
        map.insert(idx("i2"), idx("i4"));
        map.insert(idx("i4"), idx("i2"));
        for (ell, part) in &parts {
            assert_eq!(&part.rename(&map).unwrap(), part, "ell={ell}");
        }
    }

    #[test]
    fn project_splits_components() {
        let monomial =
            TensorExpr::hat_monomial(default_indices(3), Side::Momentum).unwrap();
        let parts = decompose(3).unwrap();
        assert_eq!(monomial.project(3).unwrap(), parts[&3]);
        assert_eq!(monomial.project(1).unwrap(), parts[&1]);
        assert_eq!(parts[&3].angular_momentum().unwrap(), Some(3));
        assert_eq!(parts[&1].angular_momentum().unwrap(), Some(1));
        assert_eq!(monomial.angular_momentum().unwrap(), None);
        let comps = monomial.components().unwrap();
        assert_eq!(comps.len(), 2);
    }

    #[test]
    fn eval_examples() {
        let top2 = decompose(2).unwrap().remove(&2).unwrap();
        let mut assign = BTreeMap::new();
        assign.insert(idx("i1"), 3);
        assign.insert(idx("i2"), 3);
        let v = top2.eval(&assign, [0.0, 0.0, 1.0]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);

        assign.insert(idx("i1"), 1);
        assign.insert(idx("i2"), 2);
        let v = top2.eval(&assign, [0.0, 0.0, 1.0]).unwrap();
        assert!(v.abs() < 1e-15);

        let top3 = decompose(3).unwrap().remove(&3).unwrap();
        let assign: BTreeMap<_, _> =
            default_indices(3).into_iter().map(|i| (i, 1)).collect();
        let v = top3.eval(&assign, [1.0, 0.0, 0.0]).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_bad_input() {
        let top2 = decompose(2).unwrap().remove(&2).unwrap();
        let assign: BTreeMap<_, _> =
            default_indices(2).into_iter().map(|i| (i, 1)).collect();
        assert!(matches!(
            top2.eval(&assign, [0.0, 0.0, 1.1]),
            Err(Error::Argument(_))
        ));
        let empty = BTreeMap::new();
        assert!(matches!(
            top2.eval(&empty, [0.0, 0.0, 1.0]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn eval_components_sum_to_monomial() {
        let dirs = [
            [0.6, 0.8, 0.0],
            [0.0, -0.6, 0.8],
            [
                1.0 / 3.0f64.sqrt(),
                1.0 / 3.0f64.sqrt(),
                -(1.0 / 3.0f64.sqrt()),
            ],
        ];
        for l in 1..=4usize {
            let indices = default_indices(l);
            let assign: BTreeMap<_, _> = indices
                .iter()
                .enumerate()
                .map(|(t, i)| (i.clone(), (t % 3) + 1))
                .collect();
            for dir in dirs {
                let product: f64 = indices.iter().map(|i| dir[assign[i] - 1]).product();
                let total: f64 = decompose(l as i64)
                    .unwrap()
                    .values()
                    .map(|part| part.eval(&assign, dir).unwrap())
                    .sum();
                assert!((total - product).abs() < 1e-14, "L={l} dir={dir:?}");
            }
        }
    }

    #[test]
    fn render_canonical() {
        let l2 = decompose(2).unwrap().remove(&2).unwrap();
        assert_eq!(l2.render(), "1 * h[i1]*h[i2] - 1/3 * d[i1,i2]");
        assert_eq!(TensorExpr::one(Side::Momentum).render(), "1");
        assert_eq!(
            TensorExpr::zero(vec![], Side::Momentum).unwrap().render(),
            "0"
        );
    }

    #[test]
    fn ylm_expansion_matches_decomposition() {
        assert!(ylm_cross_check(0, 0, 10).unwrap() < 1e-12);
        assert!(ylm_cross_check(2, 2, 50).unwrap() < 1e-10);
        assert!(ylm_cross_check(2, 0, 50).unwrap() < 1e-10);
        assert!(ylm_cross_check(3, 3, 50).unwrap() < 1e-10);
        assert!(ylm_cross_check(4, 2, 50).unwrap() < 1e-10);
        // Mismatched parity: the coefficients vanish.
        assert!(ylm_cross_check(3, 2, 50).unwrap() < 1e-10);
        assert!(ylm_cross_check(4, 1, 50).unwrap() < 1e-10);
    }
}
