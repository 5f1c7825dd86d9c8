//! Random fields on `R^n`: a small expression tree with exact symbolic
//! gradients and a JSON wire format.
//!
//! Atoms: coordinates, constants, single-axis polynomials, Hermite series,
//! the squared norm `|x|^2`, affine combinations, products, composition with
//! scalar activations, radial truncation `f 1(|x| <= N)`, and translation
//! `(tau_h f)(x) = f(x - h)`.
//!
//! Gradients are formed symbolically and are exact for every tree whose
//! atoms have (at least weak) derivatives; radial truncation and the hard
//! threshold/sign activations have none, and any tree containing them
//! reports [`Error::MissingGradient`].
//!
//! # Wire format
//!
//! A field serializes as `{"dim": n, "expr": E}` where `E` is a tagged
//! object, e.g.
//!
//! ```json
//! {"op": "affine",
//!  "terms": [{"coeff": 0.5, "expr": {"op": "coord", "axis": 0}}],
//!  "offset": -0.125}
//! ```
//!
//! The other tags are `const`, `poly`, `hermite`, `sqnorm`, `product`,
//! `compose`, `truncate`, and `translate`. [`RandomField::parse`] also
//! accepts a small infix language for one-liners: `"0.5*x^2 + x - 1"`,
//! `"H3/6"`, `"abs(x)"`, `"relu(1 - x^2)"`, `"trunc(x^2, 3)"`, `"|x|^2"`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{he_value, HermiteSeries};

/// Scalar activations available for composition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Identity,
    Relu,
    /// Heaviside `1(t > 0)`; bounded but not Lipschitz.
    Step,
    Abs,
    /// `-1, 0, +1`; the a.e. derivative of `abs`.
    Sign,
    Tanh,
    Sigmoid,
    Softplus,
    Exp,
    Log,
    /// `t -> 1/t`.
    Recip,
    Clip {
        lo: f64,
        hi: f64,
    },
}

impl Activation {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Activation::Identity => t,
            Activation::Relu => t.max(0.0),
            Activation::Step => {
                if t > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Abs => t.abs(),
            Activation::Sign => {
                if t > 0.0 {
                    1.0
                } else if t < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => t.tanh(),
            Activation::Sigmoid => {
                if t >= 0.0 {
                    1.0 / (1.0 + (-t).exp())
                } else {
                    let e = t.exp();
                    e / (1.0 + e)
                }
            }
            Activation::Softplus => t.max(0.0) + (-t.abs()).exp().ln_1p(),
            Activation::Exp => t.exp(),
            Activation::Log => t.ln(),
            Activation::Recip => 1.0 / t,
            Activation::Clip { lo, hi } => t.clamp(*lo, *hi),
        }
    }

    /// Lipschitz constant when the activation is (globally) Lipschitz with
    /// a bounded a.e. derivative; `None` otherwise.
    pub fn lipschitz_constant(&self) -> Option<f64> {
        match self {
            Activation::Identity | Activation::Relu | Activation::Abs | Activation::Softplus => {
                Some(1.0)
            }
            Activation::Tanh => Some(1.0),
            Activation::Sigmoid => Some(0.25),
            Activation::Clip { .. } => Some(1.0),
            Activation::Step
            | Activation::Sign
            | Activation::Exp
            | Activation::Log
            | Activation::Recip => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Activation::Identity => "identity".into(),
            Activation::Relu => "relu".into(),
            Activation::Step => "step".into(),
            Activation::Abs => "abs".into(),
            Activation::Sign => "sign".into(),
            Activation::Tanh => "tanh".into(),
            Activation::Sigmoid => "sigmoid".into(),
            Activation::Softplus => "softplus".into(),
            Activation::Exp => "exp".into(),
            Activation::Log => "log".into(),
            Activation::Recip => "recip".into(),
            Activation::Clip { lo, hi } => format!("clip[{lo},{hi}]"),
        }
    }

    /// The derivative `G'(inner)` as an expression, when it exists as an
    /// a.e.-defined function.
    fn derivative_of(&self, inner: &Expr) -> Option<Expr> {
        let compose = |act: Activation| Expr::Compose {
            activation: act,
            inner: Box::new(inner.clone()),
        };
        match self {
            Activation::Identity => Some(Expr::Const { value: 1.0 }),
            Activation::Relu => Some(compose(Activation::Step)),
            Activation::Abs => Some(compose(Activation::Sign)),
            Activation::Step | Activation::Sign => None,
            Activation::Tanh => {
                let t = compose(Activation::Tanh);
                Some(Expr::Affine {
                    terms: vec![AffineTerm {
                        coeff: -1.0,
                        expr: Expr::Product { factors: vec![t.clone(), t] },
                    }],
                    offset: 1.0,
                })
            }
            Activation::Sigmoid => {
                let s = compose(Activation::Sigmoid);
                let one_minus = Expr::Affine {
                    terms: vec![AffineTerm { coeff: -1.0, expr: s.clone() }],
                    offset: 1.0,
                };
                Some(Expr::Product { factors: vec![s, one_minus] })
            }
            Activation::Softplus => Some(compose(Activation::Sigmoid)),
            Activation::Exp => Some(compose(Activation::Exp)),
            Activation::Log => Some(compose(Activation::Recip)),
            Activation::Recip => {
                let r = compose(Activation::Recip);
                Some(Expr::Affine {
                    terms: vec![AffineTerm {
                        coeff: -1.0,
                        expr: Expr::Product { factors: vec![r.clone(), r] },
                    }],
                    offset: 0.0,
                })
            }
            Activation::Clip { lo, hi } => {
                let above_lo = Expr::Compose {
                    activation: Activation::Step,
                    inner: Box::new(Expr::Affine {
                        terms: vec![AffineTerm { coeff: 1.0, expr: inner.clone() }],
                        offset: -lo,
                    }),
                };
                let below_hi = Expr::Compose {
                    activation: Activation::Step,
                    inner: Box::new(Expr::Affine {
                        terms: vec![AffineTerm { coeff: -1.0, expr: inner.clone() }],
                        offset: *hi,
                    }),
                };
                Some(Expr::Product { factors: vec![above_lo, below_hi] })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct HermiteTerm {
    index: Vec<usize>,
    coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AffineTerm {
    coeff: f64,
    expr: Expr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum Expr {
    Coord { axis: usize },
    Const { value: f64 },
    Poly { axis: usize, coeffs: Vec<f64> },
    Hermite { terms: Vec<HermiteTerm> },
    Sqnorm,
    Affine { terms: Vec<AffineTerm>, offset: f64 },
    Product { factors: Vec<Expr> },
    Compose { activation: Activation, inner: Box<Expr> },
    Truncate { radius: f64, inner: Box<Expr> },
    Translate { shift: Vec<f64>, inner: Box<Expr> },
}

fn eval_expr(expr: &Expr, x: &[f64]) -> f64 {
    match expr {
        Expr::Coord { axis } => x[*axis],
        Expr::Const { value } => *value,
        Expr::Poly { axis, coeffs } => {
            let t = x[*axis];
            let mut acc = 0.0;
            for &c in coeffs.iter().rev() {
                acc = acc * t + c;
            }
            acc
        }
        Expr::Hermite { terms } => {
            let mut total = 0.0;
            for term in terms {
                let mut prod = term.coeff;
                for (i, &k) in term.index.iter().enumerate() {
                    if k > 0 {
                        prod *= he_value(k, x[i]);
                    }
                }
                total += prod;
            }
            total
        }
        Expr::Sqnorm => x.iter().map(|v| v * v).sum(),
        Expr::Affine { terms, offset } => {
            let mut acc = *offset;
            for t in terms {
                acc += t.coeff * eval_expr(&t.expr, x);
            }
            acc
        }
        Expr::Product { factors } => factors.iter().map(|f| eval_expr(f, x)).product(),
        Expr::Compose { activation, inner } => activation.value(eval_expr(inner, x)),
        Expr::Truncate { radius, inner } => {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 <= radius * radius {
                eval_expr(inner, x)
            } else {
                0.0
            }
        }
        Expr::Translate { shift, inner } => {
            let n = x.len();
            if n <= 8 {
                let mut buf = [0.0_f64; 8];
                for i in 0..n {
                    buf[i] = x[i] - shift[i];
                }
                eval_expr(inner, &buf[..n])
            } else {
                let moved: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
                eval_expr(inner, &moved)
            }
        }
    }
}

fn zero_grad(dim: usize) -> Vec<Expr> {
    vec![Expr::Const { value: 0.0 }; dim]
}

fn grad_expr(expr: &Expr, dim: usize) -> Option<Vec<Expr>> {
    match expr {
        Expr::Coord { axis } => {
            let mut g = zero_grad(dim);
            g[*axis] = Expr::Const { value: 1.0 };
            Some(g)
        }
        Expr::Const { .. } => Some(zero_grad(dim)),
        Expr::Poly { axis, coeffs } => {
            let mut g = zero_grad(dim);
            if coeffs.len() > 1 {
                let deriv: Vec<f64> = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(k, c)| k as f64 * c)
                    .collect();
                g[*axis] = Expr::Poly { axis: *axis, coeffs: deriv };
            }
            Some(g)
        }
        Expr::Hermite { terms } => {
            // d_i He_alpha = alpha_i He_{alpha - e_i}: exact transport.
            let mut out = Vec::with_capacity(dim);
            for i in 0..dim {
                let mut shifted = Vec::new();
                for term in terms {
                    if term.index[i] > 0 {
                        let mut idx = term.index.clone();
                        idx[i] -= 1;
                        shifted.push(HermiteTerm {
                            index: idx,
                            coeff: term.coeff * term.index[i] as f64,
                        });
                    }
                }
                out.push(if shifted.is_empty() {
                    Expr::Const { value: 0.0 }
                } else {
                    Expr::Hermite { terms: shifted }
                });
            }
            Some(out)
        }
        Expr::Sqnorm => Some(
            (0..dim)
                .map(|axis| Expr::Affine {
                    terms: vec![AffineTerm { coeff: 2.0, expr: Expr::Coord { axis } }],
                    offset: 0.0,
                })
                .collect(),
        ),
        Expr::Affine { terms, .. } => {
            let mut grads = Vec::with_capacity(terms.len());
            for t in terms {
                grads.push(grad_expr(&t.expr, dim)?);
            }
            Some(
                (0..dim)
                    .map(|i| Expr::Affine {
                        terms: terms
                            .iter()
                            .zip(&grads)
                            .map(|(t, g)| AffineTerm { coeff: t.coeff, expr: g[i].clone() })
                            .collect(),
                        offset: 0.0,
                    })
                    .collect(),
            )
        }
        Expr::Product { factors } => {
            let grads: Option<Vec<Vec<Expr>>> =
                factors.iter().map(|f| grad_expr(f, dim)).collect();
            let grads = grads?;
            Some(
                (0..dim)
                    .map(|i| {
                        let terms = factors
                            .iter()
                            .enumerate()
                            .map(|(j, _)| {
                                let mut fs: Vec<Expr> = Vec::with_capacity(factors.len());
                                for (l, f) in factors.iter().enumerate() {
                                    if l == j {
                                        fs.push(grads[j][i].clone());
                                    } else {
                                        fs.push(f.clone());
                                    }
                                }
                                AffineTerm { coeff: 1.0, expr: Expr::Product { factors: fs } }
                            })
                            .collect();
                        Expr::Affine { terms, offset: 0.0 }
                    })
                    .collect(),
            )
        }
        Expr::Compose { activation, inner } => {
            let dact = activation.derivative_of(inner)?;
            let gi = grad_expr(inner, dim)?;
            Some(
                gi.into_iter()
                    .map(|g| Expr::Product { factors: vec![dact.clone(), g] })
                    .collect(),
            )
        }
        Expr::Truncate { .. } => None,
        Expr::Translate { shift, inner } => {
            let gi = grad_expr(inner, dim)?;
            Some(
                gi.into_iter()
                    .map(|g| Expr::Translate { shift: shift.clone(), inner: Box::new(g) })
                    .collect(),
            )
        }
    }
}

fn poly_degree_expr(expr: &Expr) -> Option<usize> {
    match expr {
        Expr::Coord { .. } => Some(1),
        Expr::Const { .. } => Some(0),
        Expr::Poly { coeffs, .. } => {
            let mut deg = 0;
            for (k, &c) in coeffs.iter().enumerate() {
                if c != 0.0 {
                    deg = k;
                }
            }
            Some(deg)
        }
        Expr::Hermite { terms } => terms
            .iter()
            .map(|t| t.index.iter().sum::<usize>())
            .max()
            .or(Some(0)),
        Expr::Sqnorm => Some(2),
        Expr::Affine { terms, .. } => {
            let mut deg = 0;
            for t in terms {
                if t.coeff != 0.0 {
                    deg = deg.max(poly_degree_expr(&t.expr)?);
                }
            }
            Some(deg)
        }
        Expr::Product { factors } => {
            let mut deg = 0;
            for f in factors {
                deg += poly_degree_expr(f)?;
            }
            Some(deg)
        }
        Expr::Compose { activation: Activation::Identity, inner } => poly_degree_expr(inner),
        Expr::Compose { .. } => None,
        Expr::Truncate { .. } => None,
        Expr::Translate { inner, .. } => poly_degree_expr(inner),
    }
}

fn validate_expr(expr: &Expr, dim: usize) -> Result<()> {
    let bad = |msg: String| Err(Error::MalformedExpression(msg));
    match expr {
        Expr::Coord { axis } => {
            if *axis >= dim {
                return bad(format!("coordinate axis {axis} outside dimension {dim}"));
            }
        }
        Expr::Const { value } => {
            if !value.is_finite() {
                return bad("non-finite constant".into());
            }
        }
        Expr::Poly { axis, coeffs } => {
            if *axis >= dim {
                return bad(format!("polynomial axis {axis} outside dimension {dim}"));
            }
            if coeffs.is_empty() {
                return bad("polynomial needs at least one coefficient".into());
            }
        }
        Expr::Hermite { terms } => {
            for t in terms {
                if t.index.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: t.index.len() });
                }
            }
        }
        Expr::Sqnorm => {}
        Expr::Affine { terms, .. } => {
            for t in terms {
                validate_expr(&t.expr, dim)?;
            }
        }
        Expr::Product { factors } => {
            if factors.is_empty() {
                return bad("product needs at least one factor".into());
            }
            for f in factors {
                validate_expr(f, dim)?;
            }
        }
        Expr::Compose { inner, .. } => validate_expr(inner, dim)?,
        Expr::Truncate { radius, inner } => {
            if !(*radius > 0.0) {
                return bad(format!("truncation radius must be positive, got {radius}"));
            }
            validate_expr(inner, dim)?;
        }
        Expr::Translate { shift, inner } => {
            if shift.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: shift.len() });
            }
            validate_expr(inner, dim)?;
        }
    }
    Ok(())
}

/// A scalar random field on `R^n` under the standard Gaussian.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomField {
    dim: usize,
    expr: Expr,
}

impl RandomField {
    /// The coordinate field `x_i`.
    pub fn coordinate(dim: usize, axis: usize) -> Result<Self> {
        if axis >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: axis + 1 });
        }
        Ok(Self { dim, expr: Expr::Coord { axis } })
    }

    /// The constant field.
    pub fn constant(dim: usize, value: f64) -> Self {
        Self { dim, expr: Expr::Const { value } }
    }

    /// `sum_k coeffs[k] x_axis^k`.
    pub fn polynomial(dim: usize, axis: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expr = Expr::Poly { axis, coeffs };
        validate_expr(&expr, dim)?;
        Ok(Self { dim, expr })
    }

    /// A Hermite series as a field.
    pub fn hermite_series(series: &HermiteSeries) -> Self {
        let terms: Vec<HermiteTerm> = series
            .coeffs()
            .iter()
            .map(|(index, &coeff)| HermiteTerm { index: clone_index(index), coeff })
            .collect();
        Self {
            dim: series.dim(),
            expr: if terms.is_empty() {
                Expr::Const { value: 0.0 }
            } else {
                Expr::Hermite { terms }
            },
        }
    }

    /// `|x|^2`.
    pub fn squared_norm(dim: usize) -> Self {
        Self { dim, expr: Expr::Sqnorm }
    }

    /// `offset + sum_j coeff_j f_j`. All fields must share a dimension.
    pub fn affine(terms: &[(f64, RandomField)], offset: f64) -> Result<Self> {
        let dim = terms
            .first()
            .map(|(_, f)| f.dim)
            .ok_or_else(|| Error::InvalidArgument("affine combination needs terms".into()))?;
        for (_, f) in terms {
            if f.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: f.dim });
            }
        }
        Ok(Self {
            dim,
            expr: Expr::Affine {
                terms: terms
                    .iter()
                    .map(|(c, f)| AffineTerm { coeff: *c, expr: f.expr.clone() })
                    .collect(),
                offset,
            },
        })
    }

    /// Pointwise product.
    pub fn product(&self, other: &RandomField) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        Ok(Self {
            dim: self.dim,
            expr: Expr::Product { factors: vec![self.expr.clone(), other.expr.clone()] },
        })
    }

    /// `f^k` (with `f^0 = 1`).
    pub fn powi(&self, k: usize) -> Self {
        match k {
            0 => Self::constant(self.dim, 1.0),
            1 => self.clone(),
            _ => Self {
                dim: self.dim,
                expr: Expr::Product { factors: vec![self.expr.clone(); k] },
            },
        }
    }

    /// `G(f)` for a scalar activation `G`.
    pub fn compose(&self, activation: Activation) -> Self {
        Self {
            dim: self.dim,
            expr: Expr::Compose { activation, inner: Box::new(self.expr.clone()) },
        }
    }

    /// `|f|`.
    pub fn abs(&self) -> Self {
        self.compose(Activation::Abs)
    }

    /// `c f`.
    pub fn scale(&self, c: f64) -> Self {
        Self::affine(&[(c, self.clone())], 0.0).expect("single term")
    }

    /// `f + c`.
    pub fn add_constant(&self, c: f64) -> Self {
        Self::affine(&[(1.0, self.clone())], c).expect("single term")
    }

    /// `f + g`.
    pub fn add(&self, other: &RandomField) -> Result<Self> {
        Self::affine(&[(1.0, self.clone()), (1.0, other.clone())], 0.0)
    }

    /// `f - g`.
    pub fn sub(&self, other: &RandomField) -> Result<Self> {
        Self::affine(&[(1.0, self.clone()), (-1.0, other.clone())], 0.0)
    }

    /// Radial truncation `f 1(|x| <= radius)`. Not differentiable.
    pub fn truncate(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "truncation radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            dim: self.dim,
            expr: Expr::Truncate { radius, inner: Box::new(self.expr.clone()) },
        })
    }

    /// The translate `(tau_h f)(x) = f(x - h)`.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: shift.len() });
        }
        Ok(Self {
            dim: self.dim,
            expr: Expr::Translate { shift: shift.to_vec(), inner: Box::new(self.expr.clone()) },
        })
    }

    /// Pointwise minimum `(f + g - |f - g|) / 2`.
    pub fn min(f: &RandomField, g: &RandomField) -> Result<Self> {
        let diff = f.sub(g)?.abs();
        Self::affine(&[(0.5, f.clone()), (0.5, g.clone()), (-0.5, diff)], 0.0)
    }

    /// Pointwise maximum `(f + g + |f - g|) / 2`.
    pub fn max(f: &RandomField, g: &RandomField) -> Result<Self> {
        let diff = f.sub(g)?.abs();
        Self::affine(&[(0.5, f.clone()), (0.5, g.clone()), (0.5, diff)], 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Evaluate at a point. `x.len()` must equal [`dim`](Self::dim).
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim, "evaluation point dimension");
        eval_expr(&self.expr, x)
    }

    /// Whether a symbolic (weak) gradient exists for the whole tree.
    pub fn differentiable(&self) -> bool {
        grad_expr(&self.expr, self.dim).is_some()
    }

    /// The exact symbolic gradient, one field per axis.
    pub fn gradient(&self) -> Result<Vec<RandomField>> {
        let g = grad_expr(&self.expr, self.dim).ok_or(Error::MissingGradient)?;
        Ok(g.into_iter().map(|expr| Self { dim: self.dim, expr }).collect())
    }

    /// Total polynomial degree when the tree is a polynomial.
    pub fn poly_degree(&self) -> Option<usize> {
        poly_degree_expr(&self.expr)
    }

    /// Serialize to the JSON wire format.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("field serialization cannot fail")
    }

    /// Parse the JSON wire format, validating axes and dimensions.
    pub fn from_json(text: &str) -> Result<Self> {
        let field: RandomField =
            serde_json::from_str(text).map_err(|e| Error::MalformedExpression(e.to_string()))?;
        validate_expr(&field.expr, field.dim)?;
        Ok(field)
    }

    /// Parse either the JSON wire format (text starting with `{`) or the
    /// infix mini-language described in the module docs.
    pub fn parse(dim: usize, text: &str) -> Result<Self> {
        let trimmed = text.trim();
        if trimmed.starts_with('{') {
            let field = Self::from_json(trimmed)?;
            if field.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: field.dim });
            }
            return Ok(field);
        }
        let expr = parser::parse(dim, trimmed)?;
        validate_expr(&expr, dim)?;
        Ok(Self { dim, expr })
    }
}

fn clone_index(index: &[usize]) -> Vec<usize> {
    index.to_vec()
}

mod parser {
    //! Recursive-descent parser for the infix mini-language.

    use super::{Activation, AffineTerm, Expr, HermiteTerm};
    use crate::error::{Error, Result};

    #[derive(Debug, Clone, PartialEq)]
    enum Tok {
        Num(f64),
        Ident(String),
        Sym(char),
        SqNorm,
    }

    fn lex(text: &str) -> Result<Vec<Tok>> {
        let bytes: Vec<char> = text.chars().collect();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == '.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == 'e' || bytes[i] == 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == '+' || bytes[j] == '-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = bytes[start..i].iter().collect();
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::MalformedExpression(format!("bad number `{s}`")))?;
                toks.push(Tok::Num(v));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                toks.push(Tok::Ident(bytes[start..i].iter().collect()));
            } else if c == '|' {
                // Only the literal `|x|^2` is supported.
                let rest: String = bytes[i..].iter().collect();
                if rest.starts_with("|x|^2") {
                    toks.push(Tok::SqNorm);
                    i += 5;
                } else {
                    return Err(Error::MalformedExpression(
                        "`|` only appears in the literal `|x|^2`".into(),
                    ));
                }
            } else if "+-*/()^,".contains(c) {
                toks.push(Tok::Sym(c));
                i += 1;
            } else {
                return Err(Error::MalformedExpression(format!("unexpected character `{c}`")));
            }
        }
        Ok(toks)
    }

    struct Parser {
        dim: usize,
        toks: Vec<Tok>,
        pos: usize,
    }

    pub(super) fn parse(dim: usize, text: &str) -> Result<Expr> {
        let toks = lex(text)?;
        if toks.is_empty() {
            return Err(Error::MalformedExpression("empty expression".into()));
        }
        let mut p = Parser { dim, toks, pos: 0 };
        let expr = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::MalformedExpression("trailing input".into()));
        }
        Ok(expr)
    }

    impl Parser {
        fn peek(&self) -> Option<&Tok> {
            self.toks.get(self.pos)
        }

        fn eat_sym(&mut self, c: char) -> bool {
            if self.peek() == Some(&Tok::Sym(c)) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        fn expect_sym(&mut self, c: char) -> Result<()> {
            if self.eat_sym(c) {
                Ok(())
            } else {
                Err(Error::MalformedExpression(format!("expected `{c}`")))
            }
        }

        fn number(&mut self) -> Result<f64> {
            let neg = self.eat_sym('-');
            match self.peek().cloned() {
                Some(Tok::Num(v)) => {
                    self.pos += 1;
                    Ok(if neg { -v } else { v })
                }
                _ => Err(Error::MalformedExpression("expected a number".into())),
            }
        }

        fn expr(&mut self) -> Result<Expr> {
            let mut terms = vec![AffineTerm { coeff: 1.0, expr: self.term()? }];
            loop {
                if self.eat_sym('+') {
                    terms.push(AffineTerm { coeff: 1.0, expr: self.term()? });
                } else if self.eat_sym('-') {
                    terms.push(AffineTerm { coeff: -1.0, expr: self.term()? });
                } else {
                    break;
                }
            }
            if terms.len() == 1 && terms[0].coeff == 1.0 {
                Ok(terms.pop().unwrap().expr)
            } else {
                Ok(Expr::Affine { terms, offset: 0.0 })
            }
        }

        fn term(&mut self) -> Result<Expr> {
            let mut factors = vec![self.unary()?];
            let mut inv_scale = 1.0;
            loop {
                if self.eat_sym('*') {
                    factors.push(self.unary()?);
                } else if self.eat_sym('/') {
                    let d = self.number()?;
                    if d == 0.0 {
                        return Err(Error::MalformedExpression("division by zero".into()));
                    }
                    inv_scale /= d;
                } else {
                    break;
                }
            }
            let core = if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                Expr::Product { factors }
            };
            if inv_scale == 1.0 {
                Ok(core)
            } else {
                Ok(Expr::Affine {
                    terms: vec![AffineTerm { coeff: inv_scale, expr: core }],
                    offset: 0.0,
                })
            }
        }

        fn unary(&mut self) -> Result<Expr> {
            if self.eat_sym('-') {
                let inner = self.unary()?;
                return Ok(Expr::Affine {
                    terms: vec![AffineTerm { coeff: -1.0, expr: inner }],
                    offset: 0.0,
                });
            }
            self.postfix()
        }

        fn postfix(&mut self) -> Result<Expr> {
            let mut e = self.primary()?;
            while self.eat_sym('^') {
                let p = self.number()?;
                if p.fract() != 0.0 || p < 0.0 || p > 64.0 {
                    return Err(Error::MalformedExpression(format!(
                        "exponent must be an integer in 0..=64, got {p}"
                    )));
                }
                let k = p as usize;
                e = match k {
                    0 => Expr::Const { value: 1.0 },
                    1 => e,
                    _ => Expr::Product { factors: vec![e; k] },
                };
            }
            Ok(e)
        }

        fn primary(&mut self) -> Result<Expr> {
            match self.peek().cloned() {
                Some(Tok::Num(v)) => {
                    self.pos += 1;
                    Ok(Expr::Const { value: v })
                }
                Some(Tok::SqNorm) => {
                    self.pos += 1;
                    Ok(Expr::Sqnorm)
                }
                Some(Tok::Sym('(')) => {
                    self.pos += 1;
                    let e = self.expr()?;
                    self.expect_sym(')')?;
                    Ok(e)
                }
                Some(Tok::Ident(name)) => {
                    self.pos += 1;
                    self.ident(&name)
                }
                _ => Err(Error::MalformedExpression("expected a value".into())),
            }
        }

        fn ident(&mut self, name: &str) -> Result<Expr> {
            // Coordinates: x, x0, x1, ...
            if name == "x" {
                return Ok(Expr::Coord { axis: 0 });
            }
            if let Some(digits) = name.strip_prefix('x') {
                if let Ok(axis) = digits.parse::<usize>() {
                    if axis >= self.dim {
                        return Err(Error::MalformedExpression(format!(
                            "coordinate `{name}` outside dimension {}",
                            self.dim
                        )));
                    }
                    return Ok(Expr::Coord { axis });
                }
            }
            // Hermite basis on axis 0: H0, H1, H2, ...
            if let Some(digits) = name.strip_prefix('H') {
                if let Ok(k) = digits.parse::<usize>() {
                    let mut index = vec![0usize; self.dim];
                    index[0] = k;
                    return Ok(Expr::Hermite {
                        terms: vec![HermiteTerm { index, coeff: 1.0 }],
                    });
                }
            }
            let activation = match name {
                "abs" => Some(Activation::Abs),
                "relu" => Some(Activation::Relu),
                "step" => Some(Activation::Step),
                "sign" => Some(Activation::Sign),
                "tanh" => Some(Activation::Tanh),
                "sigmoid" => Some(Activation::Sigmoid),
                "softplus" => Some(Activation::Softplus),
                "exp" => Some(Activation::Exp),
                "log" => Some(Activation::Log),
                "recip" => Some(Activation::Recip),
                _ => None,
            };
            if let Some(act) = activation {
                self.expect_sym('(')?;
                let inner = self.expr()?;
                self.expect_sym(')')?;
                return Ok(Expr::Compose { activation: act, inner: Box::new(inner) });
            }
            match name {
                "clip" => {
                    self.expect_sym('(')?;
                    let inner = self.expr()?;
                    self.expect_sym(',')?;
                    let lo = self.number()?;
                    self.expect_sym(',')?;
                    let hi = self.number()?;
                    self.expect_sym(')')?;
                    Ok(Expr::Compose {
                        activation: Activation::Clip { lo, hi },
                        inner: Box::new(inner),
                    })
                }
                "trunc" => {
                    self.expect_sym('(')?;
                    let inner = self.expr()?;
                    self.expect_sym(',')?;
                    let radius = self.number()?;
                    self.expect_sym(')')?;
                    Ok(Expr::Truncate { radius, inner: Box::new(inner) })
                }
                _ => Err(Error::UnknownPreset(name.to_string())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe_points(dim: usize) -> Vec<Vec<f64>> {
        let base = [-2.3, -1.0, -0.4, 0.0, 0.3, 0.9, 1.7];
        match dim {
            1 => base.iter().map(|&x| vec![x]).collect(),
            2 => base
                .iter()
                .zip(base.iter().rev())
                .map(|(&a, &b)| vec![a, b])
                .collect(),
            _ => base
                .iter()
                .map(|&a| (0..dim).map(|i| a + 0.1 * i as f64).collect())
                .collect(),
        }
    }

    #[test]
    fn atoms_evaluate() {
        let x = RandomField::coordinate(2, 1).unwrap();
        assert_eq!(x.eval(&[3.0, -4.0]), -4.0);
        let p = RandomField::polynomial(1, 0, vec![1.0, 0.0, 2.0]).unwrap();
        assert_eq!(p.eval(&[3.0]), 19.0);
        let n = RandomField::squared_norm(3);
        assert_eq!(n.eval(&[1.0, 2.0, 2.0]), 9.0);
        let t = RandomField::coordinate(1, 0).unwrap().truncate(2.0).unwrap();
        assert_eq!(t.eval(&[1.5]), 1.5);
        assert_eq!(t.eval(&[2.5]), 0.0);
        let shifted = RandomField::coordinate(1, 0).unwrap().translate(&[0.5]).unwrap();
        assert_eq!(shifted.eval(&[2.0]), 1.5);
    }

    #[test]
    fn activations_evaluate_and_classify() {
        assert_eq!(Activation::Relu.value(-3.0), 0.0);
        assert_eq!(Activation::Step.value(0.0), 0.0);
        assert_eq!(Activation::Sign.value(0.0), 0.0);
        assert_eq!(Activation::Clip { lo: -1.0, hi: 1.0 }.value(3.0), 1.0);
        assert!((Activation::Sigmoid.value(0.0) - 0.5).abs() < 1e-15);
        assert!((Activation::Softplus.value(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(Activation::Tanh.lipschitz_constant().is_some());
        assert!(Activation::Exp.lipschitz_constant().is_none());
        assert!(Activation::Step.lipschitz_constant().is_none());
    }

    #[test]
    fn gradients_match_central_differences() {
        let cases: Vec<RandomField> = vec![
            RandomField::parse(1, "x^3 - 2*x + 1").unwrap(),
            RandomField::parse(1, "H4/24").unwrap(),
            RandomField::parse(1, "tanh(x^2)").unwrap(),
            RandomField::parse(1, "softplus(3*x)").unwrap(),
            RandomField::parse(1, "exp(0.3*x)").unwrap(),
            RandomField::parse(1, "sigmoid(x) * x").unwrap(),
            RandomField::parse(2, "x0*x1 + |x|^2").unwrap(),
            RandomField::parse(2, "clip(x0 - x1, -1, 2)").unwrap(),
            RandomField::parse(1, "log(exp(x) + 2)").unwrap(),
            RandomField::coordinate(1, 0)
                .unwrap()
                .translate(&[0.25])
                .unwrap()
                .powi(3),
        ];
        let h = 1e-5;
        for f in cases {
            let grad = f.gradient().unwrap();
            for pt in probe_points(f.dim()) {
                for i in 0..f.dim() {
                    let mut up = pt.clone();
                    let mut dn = pt.clone();
                    up[i] += h;
                    dn[i] -= h;
                    // Skip probe points that straddle an activation kink.
                    let fd = (f.eval(&up) - f.eval(&dn)) / (2.0 * h);
                    let sym = grad[i].eval(&pt);
                    let scale = 1.0 + fd.abs().max(sym.abs());
                    assert!(
                        (fd - sym).abs() <= 1e-7 * scale,
                        "{:?} at {pt:?}, axis {i}: fd {fd} vs sym {sym}",
                        f.to_json()
                    );
                }
            }
        }
    }

    #[test]
    fn weak_gradients_of_kinked_fields() {
        // |x| has a.e. derivative sign(x); relu has the step.
        let f = RandomField::parse(1, "abs(x)").unwrap();
        let g = f.gradient().unwrap();
        assert_eq!(g[0].eval(&[2.0]), 1.0);
        assert_eq!(g[0].eval(&[-2.0]), -1.0);
        let r = RandomField::parse(1, "relu(x)").unwrap();
        let gr = r.gradient().unwrap();
        assert_eq!(gr[0].eval(&[1.0]), 1.0);
        assert_eq!(gr[0].eval(&[-1.0]), 0.0);
    }

    #[test]
    fn truncation_and_hard_threshold_have_no_gradient() {
        let t = RandomField::parse(1, "trunc(x^2, 3)").unwrap();
        assert!(!t.differentiable());
        assert!(matches!(t.gradient(), Err(Error::MissingGradient)));
        let s = RandomField::parse(1, "step(x)").unwrap();
        assert!(!s.differentiable());
    }

    #[test]
    fn min_max_identities() {
        let f = RandomField::parse(1, "x").unwrap();
        let g = RandomField::parse(1, "x^2 - 1").unwrap();
        let mn = RandomField::min(&f, &g).unwrap();
        let mx = RandomField::max(&f, &g).unwrap();
        for pt in probe_points(1) {
            let (a, b) = (f.eval(&pt), g.eval(&pt));
            assert!((mn.eval(&pt) - a.min(b)).abs() < 1e-14);
            assert!((mx.eval(&pt) - a.max(b)).abs() < 1e-14);
        }
    }

    #[test]
    fn poly_degree_detection() {
        assert_eq!(RandomField::parse(1, "x^2").unwrap().poly_degree(), Some(2));
        assert_eq!(RandomField::parse(1, "H3").unwrap().poly_degree(), Some(3));
        assert_eq!(
            RandomField::parse(2, "x0 * x1 * |x|^2").unwrap().poly_degree(),
            Some(4)
        );
        assert_eq!(RandomField::parse(1, "abs(x)").unwrap().poly_degree(), None);
        assert_eq!(RandomField::parse(1, "trunc(x, 1)").unwrap().poly_degree(), None);
        assert_eq!(RandomField::parse(1, "3.5").unwrap().poly_degree(), Some(0));
    }

    #[test]
    fn json_round_trip_preserves_evaluation() {
        let fields = [
            RandomField::parse(1, "0.5*x^2 + x - 1").unwrap(),
            RandomField::parse(2, "relu(x0 - x1)").unwrap(),
            RandomField::parse(1, "trunc(H2, 4)").unwrap(),
            RandomField::parse(1, "x").unwrap().translate(&[1.5]).unwrap(),
        ];
        for f in fields {
            let json = f.to_json();
            let back = RandomField::from_json(&json).unwrap();
            for pt in probe_points(f.dim()) {
                assert_eq!(f.eval(&pt), back.eval(&pt), "{json}");
            }
        }
    }

    #[test]
    fn json_shape_is_documented_grammar() {
        let f = RandomField::coordinate(1, 0).unwrap();
        assert_eq!(f.to_json(), r#"{"dim":1,"expr":{"op":"coord","axis":0}}"#);
        let parsed =
            RandomField::from_json(r#"{"dim":1,"expr":{"op":"poly","axis":0,"coeffs":[0.0,1.0]}}"#)
                .unwrap();
        assert_eq!(parsed.eval(&[2.5]), 2.5);
        let composed = RandomField::from_json(
            r#"{"dim":1,"expr":{"op":"compose","activation":"relu","inner":{"op":"coord","axis":0}}}"#,
        )
        .unwrap();
        assert_eq!(composed.eval(&[-1.0]), 0.0);
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(matches!(
            RandomField::from_json(r#"{"dim":1,"expr":{"op":"coord","axis":3}}"#),
            Err(Error::MalformedExpression(_))
        ));
        assert!(RandomField::from_json("{not json").is_err());
        assert!(matches!(
            RandomField::from_json(r#"{"dim":2,"expr":{"op":"translate","shift":[1.0],"inner":{"op":"sqnorm"}}}"#),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parser_accepts_documented_examples() {
        for (text, x, want) in [
            ("x", 2.0, 2.0),
            ("x^2", 3.0, 9.0),
            ("H2", 2.0, 3.0),
            ("H3/6", 2.0, (8.0 - 6.0) / 6.0),
            ("0.5*x^2 + x - 1", 2.0, 3.0),
            ("abs(x)", -3.0, 3.0),
            ("relu(1 - x^2)", 0.5, 0.75),
            ("trunc(x^2, 3)", 4.0, 0.0),
            ("-x", 2.0, -2.0),
            ("2e-1 * x", 1.0, 0.2),
            ("(x + 1) * (x - 1)", 3.0, 8.0),
        ] {
            let f = RandomField::parse(1, text).unwrap();
            assert!(
                (f.eval(&[x]) - want).abs() < 1e-12,
                "`{text}` at {x}: {} vs {want}",
                f.eval(&[x])
            );
        }
        let f = RandomField::parse(3, "|x|^2").unwrap();
        assert_eq!(f.eval(&[1.0, 2.0, 2.0]), 9.0);
    }

    #[test]
    fn parser_rejects_bad_input() {
        assert!(matches!(
            RandomField::parse(1, "foo(x)"),
            Err(Error::UnknownPreset(_))
        ));
        assert!(RandomField::parse(1, "x2").is_err());
        assert!(RandomField::parse(1, "x +").is_err());
        assert!(RandomField::parse(1, "x^2.5").is_err());
        assert!(RandomField::parse(1, "").is_err());
        assert!(RandomField::parse(1, "x / x").is_err());
    }

    #[test]
    fn dimension_mismatches_are_rejected() {
        let f = RandomField::coordinate(1, 0).unwrap();
        let g = RandomField::coordinate(2, 0).unwrap();
        assert!(f.product(&g).is_err());
        assert!(RandomField::affine(&[(1.0, f.clone()), (1.0, g)], 0.0).is_err());
        assert!(f.translate(&[1.0, 2.0]).is_err());
        assert!(RandomField::coordinate(1, 1).is_err());
    }
}
