//! Command line front end: a small expression grammar for radial-power
//! times angular-monomial inputs, verb dispatch, and text or JSON
//! rendering of the results.
//!
//! Exit codes: 0 on success, 1 for domain and computational failures,
//! 2 for malformed input (argument or expression syntax, semantic
//! misuse), 3 when a verification verb finds a numerical mismatch.

use std::io::Write;

use clap::error::ErrorKind;
use clap::{Parser as ArgParser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::exact::{chi, double_factorial, ExactScalar};
use crate::radial::{regulated_radial, sift, yukawa_check, QuadratureConfig, RadialSpec};
use crate::tensor::{decompose, default_indices, traceless_top, IndexName, Side, TensorExpr, L_MAX};
use crate::transform::{
    dipole_fields, forward, full_derivative_inv_r, inverse, traceless_derivative, BaseFunction,
    IdentityRecord, MomentumExpr, MomentumImage, PositionExpr, PositionTerm,
};
use crate::verify::{standard_family, verify_identity, BallConfig, TestFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    /// Traceless derivatives of 1/r.
    InvR,
    /// Traceless derivatives of 1/r^2.
    InvR2,
    /// Traceless derivatives of the point mass.
    Delta3,
    /// Full (trace-carrying) derivatives of 1/r.
    FullInvR,
    /// Second-derivative field of 1/r with its point term.
    DipoleE,
    /// The same field with the solenoidal point term.
    DipoleB,
}

impl IdentityArg {
    fn as_str(self) -> &'static str {
        match self {
            IdentityArg::InvR => "inv-r",
            IdentityArg::InvR2 => "inv-r2",
            IdentityArg::Delta3 => "delta3",
            IdentityArg::FullInvR => "full-inv-r",
            IdentityArg::DipoleE => "dipole-e",
            IdentityArg::DipoleB => "dipole-b",
        }
    }
}

#[derive(Debug, ArgParser)]
#[command(
    name = "angularft",
    version,
    about = "Exact three-dimensional Fourier transforms of radial powers times angular monomials"
)]
pub struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Verification tolerance.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,

    /// Regulator scale for oscillatory radial integrals.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub lambda: f64,

    /// Core radius separating the inner quadrature interval from the
    /// Gaussian tail when pairing with test functions.
    #[arg(long = "ball-radius", global = true, default_value_t = 1.0)]
    pub ball_radius: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform a momentum-side expression to position space.
    Transform {
        /// Expression such as `p^-2*phat[i1]*phat[i2]` or `p^0*ylm[2,1]`.
        expr: String,
    },
    /// Transform a position-side expression back to momentum space.
    Inverse {
        /// Expression such as `r^-1`, `delta3`, or `x[i1]*r^-4`.
        expr: String,
    },
    /// Split a unit-vector monomial into pure angular-momentum parts.
    Decompose {
        /// Monomial rank (number of unit-vector factors), 0 to 8.
        rank: usize,
    },
    /// Print one exact radial transform coefficient.
    #[command(allow_negative_numbers = true)]
    Chi { n: i64, ell: i64 },
    /// Evaluate the regulated oscillatory radial integral and compare
    /// it against the exact coefficient.
    #[command(allow_negative_numbers = true)]
    Radial { n: i64, ell: i64, r: f64 },
    /// Print a generated derivative identity.
    Identity {
        #[arg(value_enum)]
        kind: IdentityArg,
        order: usize,
    },
    /// Verify a generated identity by pairing both sides with a family
    /// of test functions.
    Verify {
        #[arg(value_enum)]
        kind: IdentityArg,
        order: usize,
    },
    /// Run a built-in battery of exactness and quadrature checks.
    Selftest,
}

/// Entry point used by the binary and by in-process tests; returns the
/// process exit code.
pub fn run<O: Write, E: Write>(
    args: impl IntoIterator<Item = String>,
    out: &mut O,
    err: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                0
            } else {
                let _ = write!(err, "{e}");
                2
            };
        }
    };
    match execute(&cli) {
        Ok(output) => {
            let rendered = match cli.format {
                OutputFormat::Text => output.text.clone(),
                OutputFormat::Json => {
                    let envelope = json!({
                        "command": output.command,
                        "inputs": output.inputs,
                        "result_terms": output.result_terms,
                        "diagnostics": output.diagnostics,
                        "verdict": output.verdict,
                    });
                    let mut s = serde_json::to_string_pretty(&envelope)
                        .expect("serializable envelope");
                    s.push('\n');
                    s
                }
            };
            let _ = write!(out, "{rendered}");
            output.exit
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Parse { .. } | Error::Semantic(_) => 2,
                _ => 1,
            }
        }
    }
}

struct Output {
    command: &'static str,
    text: String,
    inputs: Value,
    result_terms: Value,
    diagnostics: Value,
    verdict: String,
    exit: i32,
}

impl Output {
    fn ok(command: &'static str, text: String, inputs: Value, result_terms: Value) -> Output {
        Output {
            command,
            text,
            inputs,
            result_terms,
            diagnostics: json!({}),
            verdict: "ok".into(),
            exit: 0,
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Transform { expr } => cmd_transform(expr),
        Command::Inverse { expr } => cmd_inverse(expr),
        Command::Decompose { rank } => cmd_decompose(*rank),
        Command::Chi { n, ell } => cmd_chi(*n, *ell),
        Command::Radial { n, ell, r } => cmd_radial(*n, *ell, *r, cli.lambda),
        Command::Identity { kind, order } => cmd_identity(*kind, *order),
        Command::Verify { kind, order } => cmd_verify(*kind, *order, cli),
        Command::Selftest => cmd_selftest(),
    }
}

// ---------------------------------------------------------------------
// Expression grammar
//
//   EXPR   := ITEM (ws* '*' ws* ITEM)*
//   ITEM   := ('p' | 'r') '^' INT          radial power
//           | ('p' | 'x') '[' IDENT ']'    full vector component
//           | ('phat' | 'xhat') '[' IDENT ']'
//           | 'delta3'
//           | 'ylm' '[' INT ',' INT ']'
//
// `p`-family symbols mark the momentum side, `r`/`x`/`delta3` the
// position side; a single expression cannot mix sides.
// ---------------------------------------------------------------------

#[derive(Debug, Default)]
struct ParsedExpr {
    side: Option<Side>,
    radial_pow: i64,
    indices: Vec<IndexName>,
    full_count: i64,
    delta3: bool,
    ylm: Option<(i64, i64)>,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn fail(&self, expected: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8, expected: &str) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.fail(expected))
        }
    }

    fn word(&mut self) -> Result<String> {
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return Err(self.fail("a symbol name")),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit()) {
            self.pos += 1;
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii slice")
            .to_string())
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return Err(self.fail("an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii slice")
            .parse()
            .map_err(|_| Error::Parse {
                offset: start,
                expected: "an integer within i64 range".to_string(),
            })
    }
}

fn vote(parsed: &mut ParsedExpr, side: Side) -> Result<()> {
    match parsed.side {
        None => {
            parsed.side = Some(side);
            Ok(())
        }
        Some(s) if s == side => Ok(()),
        Some(_) => Err(Error::Semantic(
            "expression mixes momentum-side and position-side symbols".into(),
        )),
    }
}

fn parse_index(cur: &mut Cursor) -> Result<IndexName> {
    cur.expect(b'[', "'['")?;
    let name = cur.word()?;
    cur.expect(b']', "']'")?;
    Ok(IndexName::new(name))
}

fn parse_item(cur: &mut Cursor, parsed: &mut ParsedExpr) -> Result<()> {
    let start = cur.pos;
    let word = cur.word()?;
    match word.as_str() {
        "p" => {
            if cur.eat(b'^') {
                parsed.radial_pow += cur.integer()?;
            } else if cur.peek() == Some(b'[') {
                parsed.indices.push(parse_index(cur)?);
                parsed.full_count += 1;
            } else {
                return Err(cur.fail("'^' or '['"));
            }
            vote(parsed, Side::Momentum)
        }
        "r" => {
            cur.expect(b'^', "'^'")?;
            parsed.radial_pow += cur.integer()?;
            vote(parsed, Side::Position)
        }
        "x" => {
            parsed.indices.push(parse_index(cur)?);
            parsed.full_count += 1;
            vote(parsed, Side::Position)
        }
        "phat" => {
            parsed.indices.push(parse_index(cur)?);
            vote(parsed, Side::Momentum)
        }
        "xhat" => {
            parsed.indices.push(parse_index(cur)?);
            vote(parsed, Side::Position)
        }
        "delta3" => {
            if parsed.delta3 {
                return Err(Error::Semantic("delta3 appears more than once".into()));
            }
            parsed.delta3 = true;
            vote(parsed, Side::Position)
        }
        "ylm" => {
            if parsed.ylm.is_some() {
                return Err(Error::Semantic(
                    "only one spherical-harmonic factor is supported".into(),
                ));
            }
            cur.expect(b'[', "'['")?;
            let l = cur.integer()?;
            cur.expect(b',', "','")?;
            let m = cur.integer()?;
            cur.expect(b']', "']'")?;
            if l < 0 || m.abs() > l {
                return Err(Error::Semantic(format!(
                    "ylm[{l},{m}] needs l >= 0 and |m| <= l"
                )));
            }
            parsed.ylm = Some((l, m));
            Ok(())
        }
        _ => Err(Error::Parse {
            offset: start,
            expected: "one of 'p', 'r', 'x', 'phat', 'xhat', 'delta3', 'ylm'".to_string(),
        }),
    }
}

fn parse_expression(src: &str) -> Result<ParsedExpr> {
    let mut cur = Cursor::new(src);
    let mut parsed = ParsedExpr::default();
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.fail("an expression"));
    }
    loop {
        parse_item(&mut cur, &mut parsed)?;
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(b'*') => {
                cur.pos += 1;
                cur.skip_ws();
            }
            Some(_) => return Err(cur.fail("'*' or end of input")),
        }
    }
    let mut sorted = parsed.indices.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Semantic(format!(
            "index {} appears more than once; contracted inputs are not supported",
            w[0]
        )));
    }
    if parsed.ylm.is_some() && !parsed.indices.is_empty() {
        return Err(Error::Semantic(
            "a spherical-harmonic factor cannot be combined with vector factors".into(),
        ));
    }
    Ok(parsed)
}

/// Parses the momentum-side grammar (`p^n` times `p[...]`/`phat[...]`
/// factors) into an expression ready for [`forward`]. Spherical-harmonic
/// factors are handled only by the CLI's scalar path and are rejected
/// here.
pub fn parse_momentum(src: &str) -> Result<MomentumExpr> {
    let parsed = parse_expression(src)?;
    if parsed.side == Some(Side::Position) {
        return Err(Error::Semantic(
            "expected a momentum-side expression".into(),
        ));
    }
    if parsed.ylm.is_some() {
        return Err(Error::Semantic(
            "spherical-harmonic factors are not supported here".into(),
        ));
    }
    let n = parsed.radial_pow + parsed.full_count;
    let angular = TensorExpr::hat_monomial(parsed.indices, Side::Momentum)?;
    MomentumExpr::hat(n, angular)
}

/// Parses the position-side grammar (`r^n`, `x[...]`/`xhat[...]`,
/// optional `delta3`) into a canonical expression ready for [`inverse`].
pub fn parse_position(src: &str) -> Result<PositionExpr> {
    let parsed = parse_expression(src)?;
    if parsed.side == Some(Side::Momentum) {
        return Err(Error::Semantic(
            "expected a position-side expression".into(),
        ));
    }
    if parsed.ylm.is_some() {
        return Err(Error::Semantic(
            "spherical-harmonic factors are not supported here".into(),
        ));
    }
    let n = parsed.radial_pow + parsed.full_count;
    let angular = TensorExpr::hat_monomial(parsed.indices.clone(), Side::Position)?;
    let term = PositionTerm::new(ExactScalar::one(), n, parsed.delta3, angular)?;
    PositionExpr::new(parsed.indices, vec![term])
}

fn render_scalar_row(coeff: &ExactScalar, radial: &str, pow: i64, delta: Option<&str>, tail: &str) -> String {
    let mut parts = vec![coeff.to_string()];
    if pow != 0 {
        parts.push(format!("{radial}^{pow}"));
    }
    if let Some(d) = delta {
        parts.push(d.to_string());
    }
    parts.push(tail.to_string());
    parts.join(" * ")
}

/// Transform row for `p^n ylm[l,m]`: the spherical harmonic passes
/// through unchanged and the coefficient comes from the scalar table.
fn transform_ylm_row(n: i64, l: i64) -> Result<(ExactScalar, i64, bool)> {
    if n == l {
        let coeff = ExactScalar::new(BigRational::from(double_factorial(2 * l + 1)?), l, 0);
        Ok((coeff, -l, true))
    } else if n > -(l + 3) && n < l {
        let coeff = chi(n, l)?
            .mul(&ExactScalar::from_parts(1, 2, 0, -2))
            .mul_i_pow(l);
        Ok((coeff, -(n + 3), false))
    } else {
        Err(Error::OutsideFramework { n, ell: l })
    }
}

fn inverse_ylm_row(n: i64, l: i64, delta3: bool) -> Result<(ExactScalar, i64, bool)> {
    if delta3 {
        if n != -l {
            return Err(Error::UnpairedDelta { r_pow: n, ell: l });
        }
        let coeff = ExactScalar::new(
            BigRational::new(BigInt::from(1), double_factorial(2 * l + 1)?),
            3 * l,
            0,
        );
        return Ok((coeff, l, false));
    }
    if n == l {
        let coeff = ExactScalar::new(
            BigRational::from(double_factorial(2 * l + 1)? * BigInt::from(8)),
            3 * l,
            3,
        );
        Ok((coeff, -l, true))
    } else if n > -(l + 3) && n < l {
        let coeff = chi(n, l)?
            .mul(&ExactScalar::from_parts(4, 1, 0, 1))
            .mul_i_pow(3 * l);
        Ok((coeff, -(n + 3), false))
    } else {
        Err(Error::OutsideFramework { n, ell: l })
    }
}

fn position_terms_json(expr: &PositionExpr) -> Value {
    Value::Array(
        expr.terms()
            .iter()
            .map(|t| {
                json!({
                    "coeff": t.coeff().to_string(),
                    "power": t.r_pow(),
                    "point_mass": t.has_delta3(),
                    "angular": t.angular().render(),
                })
            })
            .collect(),
    )
}

fn momentum_terms_json(image: &MomentumImage) -> Value {
    Value::Array(
        image
            .terms()
            .iter()
            .map(|t| {
                json!({
                    "coeff": t.coeff().to_string(),
                    "power": t.p_pow(),
                    "point_mass": t.has_deltap3(),
                    "angular": t.angular().render(),
                })
            })
            .collect(),
    )
}

fn cmd_transform(src: &str) -> Result<Output> {
    let parsed = parse_expression(src)?;
    if parsed.side == Some(Side::Position) {
        return Err(Error::Semantic(
            "transform takes a momentum-side expression; use `inverse` for position-side input"
                .into(),
        ));
    }
    let n = parsed.radial_pow + parsed.full_count;
    let inputs = json!({ "expr": src });
    if let Some((l, m)) = parsed.ylm {
        let (coeff, r_pow, delta3) = transform_ylm_row(n, l)?;
        let tail = format!("ylm[{l},{m}]");
        let rendered = render_scalar_row(
            &coeff,
            "r",
            r_pow,
            if delta3 { Some("delta3") } else { None },
            &tail,
        );
        let text = format!("input:  {src}\noutput: {rendered}\n");
        let terms = json!([{
            "coeff": coeff.to_string(),
            "power": r_pow,
            "point_mass": delta3,
            "angular": tail,
        }]);
        return Ok(Output::ok("transform", text, inputs, terms));
    }
    let angular = TensorExpr::hat_monomial(parsed.indices.clone(), Side::Momentum)?;
    let expr = MomentumExpr::hat(n, angular)?;
    let result = forward(&expr)?;
    let text = format!("input:  {src}\noutput: {}\n", result.render());
    let terms = position_terms_json(&result);
    Ok(Output::ok("transform", text, inputs, terms))
}

fn cmd_inverse(src: &str) -> Result<Output> {
    let parsed = parse_expression(src)?;
    if parsed.side == Some(Side::Momentum) {
        return Err(Error::Semantic(
            "inverse takes a position-side expression; use `transform` for momentum-side input"
                .into(),
        ));
    }
    let n = parsed.radial_pow + parsed.full_count;
    let inputs = json!({ "expr": src });
    if let Some((l, m)) = parsed.ylm {
        let (coeff, p_pow, deltap3) = inverse_ylm_row(n, l, parsed.delta3)?;
        let tail = format!("ylm[{l},{m}]");
        let rendered = render_scalar_row(
            &coeff,
            "p",
            p_pow,
            if deltap3 { Some("deltap3") } else { None },
            &tail,
        );
        let text = format!("input:  {src}\noutput: {rendered}\n");
        let terms = json!([{
            "coeff": coeff.to_string(),
            "power": p_pow,
            "point_mass": deltap3,
            "angular": tail,
        }]);
        return Ok(Output::ok("inverse", text, inputs, terms));
    }
    let angular = TensorExpr::hat_monomial(parsed.indices.clone(), Side::Position)?;
    let term = PositionTerm::new(ExactScalar::one(), n, parsed.delta3, angular)?;
    let expr = PositionExpr::new(parsed.indices.clone(), vec![term])?;
    let image = inverse(&expr)?;
    let text = format!("input:  {src}\noutput: {}\n", image.render());
    let terms = momentum_terms_json(&image);
    Ok(Output::ok("inverse", text, inputs, terms))
}

fn cmd_decompose(rank: usize) -> Result<Output> {
    if rank as i64 > L_MAX {
        return Err(Error::Semantic(format!(
            "rank {rank} exceeds the supported maximum {L_MAX}"
        )));
    }
    let components = decompose(rank as i64)?;
    let monomial = TensorExpr::hat_monomial(default_indices(rank), Side::Position)?;
    let mut text = format!("input:  {}\n", monomial.render());
    let mut terms = Vec::new();
    for (ell, expr) in components.iter().rev() {
        text.push_str(&format!("ell {ell}: {}\n", expr.render()));
        terms.push(json!({ "ell": ell, "expr": expr.render() }));
    }
    Ok(Output::ok(
        "decompose",
        text,
        json!({ "rank": rank }),
        Value::Array(terms),
    ))
}

fn cmd_chi(n: i64, ell: i64) -> Result<Output> {
    let value = chi(n, ell)?;
    let float = value.to_f64()?;
    let text = format!("chi({n}, {ell}) = {value} = {float}\n");
    let terms = json!([{
        "rational": value.rational().to_string(),
        "i_pow": value.i_pow(),
        "pi_pow": value.pi_pow(),
    }]);
    let mut output = Output::ok("chi", text, json!({ "n": n, "ell": ell }), terms);
    output.diagnostics = json!({ "float": float });
    Ok(output)
}

fn cmd_radial(n: i64, ell: i64, r: f64, lambda: f64) -> Result<Output> {
    let spec = RadialSpec::new(n, ell)?;
    let config = QuadratureConfig::default();
    let estimate = regulated_radial(&spec, r, lambda, &config)?;
    let inputs = json!({ "n": n, "ell": ell, "r": r, "lambda": lambda });
    let envelope = 5.0 * lambda / r;
    if n == ell {
        let text = format!(
            "estimate (lambda={lambda}) = {estimate}\nlimit: none (the transform develops a point mass at this power)\n"
        );
        let terms = json!([{ "estimate": estimate, "limit": null, "scaled_deviation": null }]);
        let mut output = Output::ok("radial", text, inputs, terms);
        output.diagnostics = json!({ "envelope": envelope });
        return Ok(output);
    }
    let exact = chi(n, ell)?;
    let limit = exact.to_f64()? / r.powi((n + 3) as i32);
    let scaled = (estimate / limit - 1.0).abs();
    let text = format!(
        "estimate (lambda={lambda}) = {estimate}\nlimit (lambda -> 0)     = {limit}  [{exact} * r^{}]\nscaled deviation = {scaled:.3e}  (envelope 5*lambda/r = {envelope:.3e})\n",
        -(n + 3)
    );
    let terms = json!([{ "estimate": estimate, "limit": limit, "scaled_deviation": scaled }]);
    let mut output = Output::ok("radial", text, inputs, terms);
    output.diagnostics = json!({ "envelope": envelope });
    Ok(output)
}

fn build_identity(kind: IdentityArg, order: usize) -> Result<IdentityRecord> {
    if order as i64 > L_MAX {
        return Err(Error::Semantic(format!(
            "order {order} exceeds the supported maximum {L_MAX}"
        )));
    }
    match kind {
        IdentityArg::InvR => traceless_derivative(BaseFunction::InvR, order),
        IdentityArg::InvR2 => traceless_derivative(BaseFunction::InvRSquared, order),
        IdentityArg::Delta3 => traceless_derivative(BaseFunction::DeltaPoint, order),
        IdentityArg::FullInvR => full_derivative_inv_r(order),
        IdentityArg::DipoleE | IdentityArg::DipoleB => {
            if order != 2 {
                return Err(Error::Semantic(
                    "dipole field identities are second order; pass order 2".into(),
                ));
            }
            let (e, b) = dipole_fields()?;
            Ok(if kind == IdentityArg::DipoleE { e } else { b })
        }
    }
}

fn cmd_identity(kind: IdentityArg, order: usize) -> Result<Output> {
    let record = build_identity(kind, order)?;
    let text = format!("{}\n", record.render());
    let inputs = json!({ "kind": kind.as_str(), "order": order });
    let terms = position_terms_json(record.rhs());
    let mut output = Output::ok("identity", text, inputs, terms);
    output.diagnostics = json!({
        "lhs": record.lhs_text(),
        "operator": record.operator().render(),
    });
    Ok(output)
}

fn cmd_verify(kind: IdentityArg, order: usize, cli: &Cli) -> Result<Output> {
    let record = build_identity(kind, order)?;
    let family = standard_family();
    let config = BallConfig {
        radius: cli.ball_radius,
        ..BallConfig::default()
    };
    let report = verify_identity(&record, &family, cli.tol, &config)?;
    let mut text = format!("identity: {}\ntol: {}\n", report.identity, report.tol);
    let mut rows = Vec::new();
    for row in &report.rows {
        let status = if row.pass { "pass" } else { "FAIL" };
        let sigma = row
            .assignment
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        text.push_str(&format!(
            "{status} f={} sigma=({sigma}) lhs={:.9e} rhs={:.9e} err={:.3e}\n",
            row.function, row.lhs, row.rhs, row.error
        ));
        rows.push(json!({
            "function": row.function,
            "assignment": row.assignment,
            "lhs": row.lhs,
            "rhs": row.rhs,
            "error": row.error,
            "pass": row.pass,
        }));
    }
    let verdict = if report.passed { "pass" } else { "fail" };
    text.push_str(&format!("verdict: {verdict}\n"));
    Ok(Output {
        command: "verify",
        text,
        inputs: json!({ "kind": kind.as_str(), "order": order, "tol": cli.tol }),
        result_terms: Value::Array(rows),
        diagnostics: json!({ "max_error": report.max_error }),
        verdict: verdict.into(),
        exit: if report.passed { 0 } else { 3 },
    })
}

fn selftest_checks() -> Vec<(&'static str, std::result::Result<(), String>)> {
    let mut checks = Vec::new();
    checks.push((
        "exact coefficient pinned values",
        (|| {
            let table = [
                (-2, 0, ExactScalar::from_parts(1, 2, 0, 1)),
                (0, 2, ExactScalar::from_parts(3, 2, 0, 1)),
                (2, 3, ExactScalar::from_parts(48, 1, 0, 0)),
                (-3, 1, ExactScalar::from_parts(1, 4, 0, 1)),
                (1, 3, ExactScalar::from_parts(15, 2, 0, 1)),
            ];
            for (n, ell, expect) in table {
                let got = chi(n, ell).map_err(|e| e.to_string())?;
                if got != expect {
                    return Err(format!("chi({n}, {ell}) = {got}, expected {expect}"));
                }
            }
            Ok(())
        })(),
    ));
    checks.push((
        "coefficient reciprocity",
        (|| {
            let half_pi = ExactScalar::from_parts(1, 2, 0, 1);
            for (n, ell) in [(-2, 0), (-1, 1), (0, 2), (1, 3)] {
                let product = chi(n, ell)
                    .and_then(|a| Ok(a.mul(&chi(-(n + 3), ell)?)))
                    .map_err(|e| e.to_string())?;
                if product != half_pi {
                    return Err(format!("chi({n},{ell}) reciprocity product {product}"));
                }
            }
            Ok(())
        })(),
    ));
    checks.push((
        "transform round trip",
        (|| {
            for ell in 0..=2i64 {
                // A pure-rank angular factor admits the full power window.
                let angular = traceless_top(ell).map_err(|e| e.to_string())?;
                for n in (-(ell + 3) + 1)..=ell {
                    let expr =
                        MomentumExpr::hat(n, angular.clone()).map_err(|e| e.to_string())?;
                    let round = forward(&expr)
                        .and_then(|p| inverse(&p))
                        .map_err(|e| e.to_string())?;
                    let original = MomentumImage::of_expr(&expr).map_err(|e| e.to_string())?;
                    if round != original {
                        return Err(format!("round trip changed p^{n} at rank {ell}"));
                    }
                }
            }
            Ok(())
        })(),
    ));
    checks.push((
        "oscillatory quadrature against closed form",
        (|| {
            let config = QuadratureConfig::default();
            let (lhs, rhs) = yukawa_check(1.0, 0.5, &config).map_err(|e| e.to_string())?;
            if ((lhs - rhs) / rhs).abs() > 1e-8 {
                return Err(format!("lhs {lhs} vs rhs {rhs}"));
            }
            Ok(())
        })(),
    ));
    checks.push((
        "point-mass kernel normalization",
        (|| {
            let config = QuadratureConfig::default();
            let total = sift(|_| 1.0, 0, 0.04, &config).map_err(|e| e.to_string())?;
            if (total - 1.0).abs() > 1e-8 {
                return Err(format!("normalization {total}"));
            }
            Ok(())
        })(),
    ));
    checks.push((
        "identity pairing",
        (|| {
            let record =
                traceless_derivative(BaseFunction::InvR, 1).map_err(|e| e.to_string())?;
            let family = vec![TestFunction::gaussian([0.3, -0.2, 0.5], 0.8)];
            let report = verify_identity(&record, &family, 1e-6, &BallConfig::default())
                .map_err(|e| e.to_string())?;
            if !report.passed {
                return Err(format!("max error {}", report.max_error));
            }
            Ok(())
        })(),
    ));
    checks
}

fn cmd_selftest() -> Result<Output> {
    let checks = selftest_checks();
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all_pass = true;
    for (name, outcome) in &checks {
        match outcome {
            Ok(()) => {
                text.push_str(&format!("pass: {name}\n"));
                rows.push(json!({ "check": name, "pass": true }));
            }
            Err(detail) => {
                all_pass = false;
                text.push_str(&format!("fail: {name}: {detail}\n"));
                rows.push(json!({ "check": name, "pass": false, "detail": detail }));
            }
        }
    }
    let verdict = if all_pass { "pass" } else { "fail" };
    text.push_str(&format!("selftest: {verdict}\n"));
    Ok(Output {
        command: "selftest",
        text,
        inputs: json!({}),
        result_terms: Value::Array(rows),
        diagnostics: json!({}),
        verdict: verdict.into(),
        exit: if all_pass { 0 } else { 3 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("angularft".to_string())
            .chain(args.iter().map(|s| s.to_string()));
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn transform_scalar_inverse_square() {
        let (code, out, _) = run_capture(&["transform", "p^-2"]);
        assert_eq!(code, 0);
        assert!(out.contains("output: 1/4*pi^-1 * r^-1"), "{out}");
    }

    #[test]
    fn transform_vector_over_p_squared() {
        let (code, out, _) = run_capture(&["transform", "p^-2*phat[i1]*phat[i2]"]);
        assert_eq!(code, 0);
        assert!(
            out.contains("-1/8*pi^-1 * r^-1 * (1 * h[i1]*h[i2] - 1 * d[i1,i2])"),
            "{out}"
        );
    }

    #[test]
    fn transform_full_vector_matches_hat_with_extra_power() {
        let (_, full, _) = run_capture(&["transform", "p^-3*p[i1]"]);
        let (_, hat, _) = run_capture(&["transform", "p^-2*phat[i1]"]);
        let full_out = full.lines().nth(1).unwrap();
        let hat_out = hat.lines().nth(1).unwrap();
        assert_eq!(full_out, hat_out);
    }

    #[test]
    fn transform_spherical_harmonic_row() {
        let (code, out, _) = run_capture(&["transform", "p^0*ylm[2,1]"]);
        assert_eq!(code, 0);
        assert!(out.contains("-3/4*pi^-1 * r^-3 * ylm[2,1]"), "{out}");
    }

    #[test]
    fn transform_boundary_power_gives_point_mass() {
        let (code, out, _) = run_capture(&["transform", "p^2*ylm[2,0]"]);
        assert_eq!(code, 0);
        assert!(out.contains("-15 * r^-2 * delta3 * ylm[2,0]"), "{out}");
    }

    #[test]
    fn inverse_coulomb() {
        let (code, out, _) = run_capture(&["inverse", "r^-1"]);
        assert_eq!(code, 0);
        assert!(out.contains("output: 4*pi * p^-2"), "{out}");
    }

    #[test]
    fn inverse_point_mass() {
        let (code, out, _) = run_capture(&["inverse", "delta3"]);
        assert_eq!(code, 0);
        assert!(out.contains("output: 1"), "{out}");
    }

    #[test]
    fn chi_exact_value() {
        let (code, out, _) = run_capture(&["chi", "0", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("chi(0, 2) = 3/2*pi = 4.71238898038469"), "{out}");
    }

    #[test]
    fn chi_json_envelope() {
        let (code, out, _) = run_capture(&["--format", "json", "chi", "0", "2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["command"], "chi");
        assert_eq!(v["result_terms"][0]["rational"], "3/2");
        assert_eq!(v["result_terms"][0]["pi_pow"], 1);
        assert_eq!(v["verdict"], "ok");
    }

    #[test]
    fn malformed_expression_exits_2() {
        let (code, _, err) = run_capture(&["transform", "p^-2*junk[i1]"]);
        assert_eq!(code, 2);
        assert!(err.contains("byte 5"), "{err}");
    }

    #[test]
    fn mixed_sides_exit_2() {
        let (code, _, err) = run_capture(&["transform", "p^-2*xhat[i1]"]);
        assert_eq!(code, 2);
        assert!(err.contains("mixes"), "{err}");
    }

    #[test]
    fn out_of_framework_exits_1() {
        let (code, _, err) = run_capture(&["transform", "p^3*ylm[2,0]"]);
        assert_eq!(code, 1);
        assert!(err.contains("outside"), "{err}");
    }

    #[test]
    fn repeated_index_exits_2() {
        let (code, _, err) = run_capture(&["transform", "phat[i1]*phat[i1]"]);
        assert_eq!(code, 2);
        assert!(err.contains("appears more than once"), "{err}");
    }

    #[test]
    fn unpaired_point_mass_exits_1() {
        let (code, _, err) = run_capture(&["inverse", "delta3*r^-1"]);
        assert_eq!(code, 1);
        assert!(err.contains("unpaired"), "{err}");
    }

    #[test]
    fn decompose_rank_two() {
        let (code, out, _) = run_capture(&["decompose", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("ell 2: 1 * h[i1]*h[i2] - 1/3 * d[i1,i2]"), "{out}");
        assert!(out.contains("ell 0: 1/3 * d[i1,i2]"), "{out}");
    }

    #[test]
    fn identity_render() {
        let (code, out, _) = run_capture(&["identity", "inv-r", "2"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("dtop[i1,i2](1/r) = "), "{out}");
    }

    #[test]
    fn dipole_identity_requires_order_two() {
        let (code, _, err) = run_capture(&["identity", "dipole-e", "3"]);
        assert_eq!(code, 2);
        assert!(err.contains("order 2"), "{err}");
    }

    #[test]
    fn radial_matches_limit() {
        let (code, out, _) = run_capture(&["radial", "-2", "0", "1.0"]);
        assert_eq!(code, 0);
        assert!(out.contains("scaled deviation"), "{out}");
    }

    #[test]
    fn help_exits_0_and_usage_error_exits_2() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("Usage"), "{out}");
        let (code, _, err) = run_capture(&["chi", "0"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn parse_error_offsets() {
        for (src, offset) in [("", 0), ("p^", 2), ("phat[i1", 7), ("p^-2 phat[i1]", 5)] {
            match parse_expression(src) {
                Err(Error::Parse { offset: got, .. }) => {
                    assert_eq!(got, offset, "source {src:?}")
                }
                other => panic!("expected parse error for {src:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn verify_first_order_via_cli() {
        let (code, out, _) = run_capture(&["verify", "delta3", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict: pass"), "{out}");
    }
}
