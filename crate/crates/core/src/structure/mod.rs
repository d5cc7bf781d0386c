//! Structure functions: the named families, the expression-backed custom
//! family, and the factorial products built from them.

mod expr;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use expr::{BinOp, Bindings, Expr, Func, ParseError, Scope};

use crate::error::{Error, Result};

/// Imaginary parts below `IMAG_TOL * max(1, |re|)` are treated as rounding.
pub const IMAG_TOL: f64 = 1e-12;
/// Values in `[-NEG_TOL, 0)` are clamped to zero.
pub const NEG_TOL: f64 = 1e-12;

/// Whether `x` is the integer eigenvalue of 𝒩 or an exponent of `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgKind {
    Gdo,
    QGdo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Harmonic,
    QSymmetric,
    QAbs,
    QAbsShift,
    Isos,
    SelfSimilar,
    CustomExpr,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Harmonic => "harmonic",
            Family::QSymmetric => "q_symmetric",
            Family::QAbs => "q_abs",
            Family::QAbsShift => "q_abs_shift",
            Family::Isos => "isos",
            Family::SelfSimilar => "self_similar",
            Family::CustomExpr => "custom_expr",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `q` at the primitive (S+1)-th root of unity, `exp(2πi/(S+1))`.
pub fn root_of_unity(s: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / (s as f64 + 1.0))
}

/// The q-bracket `[x] = (q^x - q^-x)/(q - q^-1)`.
///
/// Unit-modulus `q = e^{iφ}` uses `sin(φx)/sin φ`; real positive `q` uses
/// `sinh(x ln q)/sinh(ln q)` with the `q = 1` limit `x`. Other `q` fall back
/// to complex powers.
pub fn qbracket(q: Complex64, x: Complex64) -> Complex64 {
    if x.im == 0.0 {
        if let Some(v) = qbracket_real(q, x.re) {
            return Complex64::new(v, 0.0);
        }
    }
    let ln_q = q.ln();
    let num = (ln_q * x).exp() - (-ln_q * x).exp();
    let den = q - q.inv();
    num / den
}

fn qbracket_real(q: Complex64, x: f64) -> Option<f64> {
    if q.im == 0.0 && q.re > 0.0 {
        if q.re == 1.0 {
            return Some(x);
        }
        let l = q.re.ln();
        return Some((x * l).sinh() / l.sinh());
    }
    if (q.norm() - 1.0).abs() < 1e-14 {
        let phi = q.arg();
        let s = phi.sin();
        if s.abs() < 1e-300 {
            return None;
        }
        return Some((phi * x).sin() / s);
    }
    None
}

#[derive(Debug, Clone, PartialEq)]
pub struct CustomExpr {
    source: String,
    ast: Expr,
    params: BTreeMap<String, f64>,
}

impl CustomExpr {
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Harmonic,
    QSymmetric,
    QAbs,
    QAbsShift { k: f64 },
    Isos,
    SelfSimilar { omegas: Vec<f64> },
    Custom(CustomExpr),
}

/// An evaluable structure function `F(x)` or `𝓕(q^x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFunction {
    kind: Kind,
    q: Option<Complex64>,
    arg_kind: ArgKind,
}

fn check_q(q: Complex64) -> Result<()> {
    if !q.re.is_finite() || !q.im.is_finite() || q.norm() == 0.0 {
        return Err(Error::invalid(format!("deformation parameter q = {q} must be finite and nonzero")));
    }
    let den = q - q.inv();
    if den.norm() < 1e-14 && !(q.im == 0.0 && q.re == 1.0) {
        return Err(Error::invalid(format!("q = {q} makes the q-bracket singular")));
    }
    Ok(())
}

impl StructureFunction {
    pub fn harmonic() -> Self {
        Self {
            kind: Kind::Harmonic,
            q: None,
            arg_kind: ArgKind::Gdo,
        }
    }

    pub fn isos() -> Self {
        Self {
            kind: Kind::Isos,
            q: None,
            arg_kind: ArgKind::Gdo,
        }
    }

    /// Signed bracket `[x]`.
    pub fn q_symmetric(q: Complex64) -> Result<Self> {
        check_q(q)?;
        Ok(Self {
            kind: Kind::QSymmetric,
            q: Some(q),
            arg_kind: ArgKind::QGdo,
        })
    }

    /// `|[x]|`.
    pub fn q_abs(q: Complex64) -> Result<Self> {
        check_q(q)?;
        Ok(Self {
            kind: Kind::QAbs,
            q: Some(q),
            arg_kind: ArgKind::QGdo,
        })
    }

    /// `|[x] + K|`.
    pub fn q_abs_shift(q: Complex64, k: f64) -> Result<Self> {
        check_q(q)?;
        if !k.is_finite() {
            return Err(Error::invalid("shift K must be finite"));
        }
        Ok(Self {
            kind: Kind::QAbsShift { k },
            q: Some(q),
            arg_kind: ArgKind::QGdo,
        })
    }

    /// `∏_{n=0}^{M} (q^{2x} + ω_n)` with `M = omegas.len() - 1`.
    pub fn self_similar(q: f64, omegas: Vec<f64>) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::invalid(format!("self_similar needs real q > 0, got {q}")));
        }
        if omegas.len() < 2 {
            return Err(Error::invalid("self_similar needs M >= 1, i.e. at least two omegas"));
        }
        if let Some(w) = omegas.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::invalid(format!("omegas must be positive, got {w}")));
        }
        Ok(Self {
            kind: Kind::SelfSimilar { omegas },
            q: Some(Complex64::new(q, 0.0)),
            arg_kind: ArgKind::QGdo,
        })
    }

    /// Parse a custom expression in the variable `x` and validate it on the
    /// grid `0, 0.5, ..., 64`.
    pub fn custom(
        source: &str,
        params: BTreeMap<String, f64>,
        q: Option<Complex64>,
        arg_kind: ArgKind,
    ) -> Result<Self> {
        let f = Self::custom_unvalidated(source, params, q, arg_kind)?;
        for step in 0..=128 {
            f.eval(step as f64 * 0.5)?;
        }
        Ok(f)
    }

    /// Parse without the grid check. Complex or sign-changing functions are
    /// accepted here; the cyclic admissibility checker is their gate.
    pub fn custom_unvalidated(
        source: &str,
        params: BTreeMap<String, f64>,
        q: Option<Complex64>,
        arg_kind: ArgKind,
    ) -> Result<Self> {
        if let Some(q) = q {
            check_q(q)?;
        }
        let scope = Scope {
            variables: &["x"],
            allow_q: q.is_some(),
            params: Some(&params),
        };
        let ast = Expr::parse(source, &scope)?;
        Ok(Self {
            kind: Kind::Custom(CustomExpr {
                source: source.to_string(),
                ast,
                params,
            }),
            q,
            arg_kind,
        })
    }

    pub fn family(&self) -> Family {
        match self.kind {
            Kind::Harmonic => Family::Harmonic,
            Kind::QSymmetric => Family::QSymmetric,
            Kind::QAbs => Family::QAbs,
            Kind::QAbsShift { .. } => Family::QAbsShift,
            Kind::Isos => Family::Isos,
            Kind::SelfSimilar { .. } => Family::SelfSimilar,
            Kind::Custom(_) => Family::CustomExpr,
        }
    }

    pub fn q(&self) -> Option<Complex64> {
        self.q
    }

    pub fn k(&self) -> Option<f64> {
        match self.kind {
            Kind::QAbsShift { k } => Some(k),
            _ => None,
        }
    }

    pub fn omegas(&self) -> Option<&[f64]> {
        match &self.kind {
            Kind::SelfSimilar { omegas } => Some(omegas),
            _ => None,
        }
    }

    pub fn custom_expr(&self) -> Option<&CustomExpr> {
        match &self.kind {
            Kind::Custom(c) => Some(c),
            _ => None,
        }
    }

    pub fn arg_kind(&self) -> ArgKind {
        self.arg_kind
    }

    /// True if `q^(S+1) = 1` for some `S` (i.e. `q` is on the unit circle
    /// at a rational angle). Checks against the given `s`.
    pub fn is_root_of_unity(&self, s: usize) -> bool {
        match self.q {
            Some(q) => (q.powu(s as u32 + 1) - 1.0).norm() < 1e-10,
            None => false,
        }
    }

    /// The raw value before the reality and sign checks.
    pub fn value(&self, x: f64) -> Complex64 {
        let re = |v: f64| Complex64::new(v, 0.0);
        let xc = re(x);
        match &self.kind {
            Kind::Harmonic => xc,
            Kind::Isos => re((x - 1.0) * (x - 1.0) * x),
            Kind::QSymmetric => qbracket(self.q_or_nan(), xc),
            Kind::QAbs => re(qbracket(self.q_or_nan(), xc).norm()),
            Kind::QAbsShift { k } => re((qbracket(self.q_or_nan(), xc) + k).norm()),
            Kind::SelfSimilar { omegas } => {
                let q = self.q_or_nan().re;
                let q2x = q.powf(2.0 * x);
                re(omegas.iter().map(|w| q2x + w).product())
            }
            Kind::Custom(c) => c.ast.eval(&Bindings {
                variables: &[xc],
                q: self.q,
            }),
        }
    }

    fn q_or_nan(&self) -> Complex64 {
        self.q.unwrap_or(Complex64::new(f64::NAN, 0.0))
    }

    /// Evaluate, insisting on a finite, real, nonnegative result.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: format!("structure argument {x}"),
            });
        }
        let v = self.value(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("{}({x})", self.family()),
            });
        }
        if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
            return Err(Error::NotReal { x, im: v.im });
        }
        if v.re < -NEG_TOL {
            return Err(Error::Negative { x, value: v.re });
        }
        Ok(v.re.max(0.0))
    }

    /// Real part of the raw value with only a finiteness check; sign is kept.
    pub fn eval_signed(&self, x: f64) -> Result<f64> {
        let v = self.value(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("{}({x})", self.family()),
            });
        }
        if v.im.abs() > IMAG_TOL * v.re.abs().max(1.0) {
            return Err(Error::NotReal { x, im: v.im });
        }
        Ok(v.re)
    }

    /// `[[F(n)]]! = F(n)F(n-1)...F(1)`, with `[[F(0)]]! = 1`.
    pub fn factorial(&self, n: u64) -> Result<f64> {
        let mut acc = 1.0;
        for k in 1..=n {
            acc *= self.eval(k as f64)?;
            if !acc.is_finite() {
                return Err(Error::Overflow { n: n as i64 });
            }
        }
        Ok(acc)
    }

    /// `[[F(n)]]!! = F(n)F(n-2)...`, ending at `F(2)` or `F(1)`; `1` for
    /// `n ∈ {-1, 0}`.
    pub fn double_factorial(&self, n: i64) -> Result<f64> {
        if n < -1 {
            return Err(Error::invalid(format!("double factorial needs n >= -1, got {n}")));
        }
        let mut acc = 1.0;
        let mut k = n;
        while k >= 1 {
            acc *= self.eval(k as f64)?;
            if !acc.is_finite() {
                return Err(Error::Overflow { n });
            }
            k -= 2;
        }
        Ok(acc)
    }

    pub fn to_spec(&self) -> StructureSpec {
        let mut spec = StructureSpec {
            family: self.family(),
            q: self.q.map(Into::into),
            k: self.k(),
            omegas: None,
            m: None,
            expr: None,
            params: None,
            arg_kind: Some(self.arg_kind),
        };
        if let Some(w) = self.omegas() {
            spec.omegas = Some(w.to_vec());
            spec.m = Some(w.len() - 1);
        }
        if let Some(c) = self.custom_expr() {
            spec.expr = Some(c.source.clone());
            if !c.params.is_empty() {
                spec.params = Some(c.params.clone());
            }
        }
        spec
    }

    pub fn from_spec(spec: &StructureSpec) -> Result<Self> {
        let q = spec.q.map(Complex64::from);
        let need_q = || {
            q.ok_or_else(|| Error::invalid(format!("family {} needs q", spec.family)))
        };
        let f = match spec.family {
            Family::Harmonic => Self::harmonic(),
            Family::Isos => Self::isos(),
            Family::QSymmetric => Self::q_symmetric(need_q()?)?,
            Family::QAbs => Self::q_abs(need_q()?)?,
            Family::QAbsShift => {
                let k = spec
                    .k
                    .ok_or_else(|| Error::invalid("q_abs_shift needs K"))?;
                Self::q_abs_shift(need_q()?, k)?
            }
            Family::SelfSimilar => {
                let q = need_q()?;
                if q.im != 0.0 {
                    return Err(Error::invalid("self_similar needs real q"));
                }
                let omegas = spec
                    .omegas
                    .clone()
                    .ok_or_else(|| Error::invalid("self_similar needs omegas"))?;
                if let Some(m) = spec.m {
                    if m + 1 != omegas.len() {
                        return Err(Error::invalid(format!(
                            "self_similar: M = {m} needs {} omegas, got {}",
                            m + 1,
                            omegas.len()
                        )));
                    }
                }
                Self::self_similar(q.re, omegas)?
            }
            Family::CustomExpr => {
                let src = spec
                    .expr
                    .as_deref()
                    .ok_or_else(|| Error::invalid("custom_expr needs expr"))?;
                Self::custom(
                    src,
                    spec.params.clone().unwrap_or_default(),
                    q,
                    spec.arg_kind.unwrap_or(ArgKind::Gdo),
                )?
            }
        };
        match spec.arg_kind {
            Some(a) if a != f.arg_kind && spec.family != Family::CustomExpr => {
                Err(Error::invalid(format!(
                    "family {} does not take arg_kind {a:?}",
                    spec.family
                )))
            }
            _ => Ok(f),
        }
    }
}

/// Parse a custom structure function of `x`; `q` is not in scope.
pub fn parse_structure(expr: &str, params: BTreeMap<String, f64>) -> Result<StructureFunction> {
    StructureFunction::custom(expr, params, None, ArgKind::Gdo)
}

pub fn eval_structure(f: &StructureFunction, x: f64) -> Result<f64> {
    f.eval(x)
}

pub fn structure_factorial(f: &StructureFunction, n: u64) -> Result<f64> {
    f.factorial(n)
}

pub fn structure_double_factorial(f: &StructureFunction, n: i64) -> Result<f64> {
    f.double_factorial(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(c: Complex64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(c: ComplexJson) -> Self {
        Complex64::new(c.re, c.im)
    }
}

/// Serialized form of a structure function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureSpec {
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ComplexJson>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<BTreeMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg_kind: Option<ArgKind>,
}

impl Serialize for StructureFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StructureFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let spec = StructureSpec::deserialize(d)?;
        StructureFunction::from_spec(&spec).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn family_values() {
        assert_eq!(StructureFunction::isos().eval(3.0).unwrap(), 12.0);
        assert_eq!(StructureFunction::harmonic().eval(0.0).unwrap(), 0.0);
        let f = StructureFunction::q_abs(root_of_unity(3)).unwrap();
        let expect = (PI * 0.5 / 2.0).sin().abs();
        assert!((f.eval(0.5).unwrap() - expect).abs() < 1e-15);
        assert!((f.eval(0.5).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let f = StructureFunction::q_symmetric(c(2.0)).unwrap();
        assert!((f.eval(2.0).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn shift_family_at_zero() {
        let f = StructureFunction::q_abs_shift(root_of_unity(4), 0.25).unwrap();
        assert!((f.eval(0.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn self_similar_product() {
        let f = StructureFunction::self_similar(1.2, vec![1.0, 2.0]).unwrap();
        assert!((f.eval(0.0).unwrap() - 6.0).abs() < 1e-15);
        let q2 = 1.44;
        assert!((f.eval(1.0).unwrap() - (q2 + 1.0) * (q2 + 2.0)).abs() < 1e-14);
        assert!(StructureFunction::self_similar(-1.0, vec![1.0, 2.0]).is_err());
        assert!(StructureFunction::self_similar(1.2, vec![1.0]).is_err());
        assert!(StructureFunction::self_similar(1.2, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn factorials() {
        let h = StructureFunction::harmonic();
        assert_eq!(h.factorial(4).unwrap(), 24.0);
        assert_eq!(h.factorial(0).unwrap(), 1.0);
        assert_eq!(StructureFunction::isos().factorial(3).unwrap(), 0.0);
        assert_eq!(h.double_factorial(4).unwrap(), 8.0);
        assert_eq!(h.double_factorial(3).unwrap(), 3.0);
        assert_eq!(h.double_factorial(-1).unwrap(), 1.0);
        assert_eq!(StructureFunction::isos().double_factorial(0).unwrap(), 1.0);
        assert!(h.double_factorial(-2).is_err());
    }

    #[test]
    fn factorial_overflow_names_n() {
        let h = StructureFunction::harmonic();
        assert_eq!(h.factorial(400).unwrap_err(), Error::Overflow { n: 400 });
        assert_eq!(h.double_factorial(401).unwrap_err(), Error::Overflow { n: 401 });
    }

    #[test]
    fn parse_accepts_and_rejects() {
        let f = parse_structure("x*(x-1)^2", BTreeMap::new()).unwrap();
        assert_eq!(f.eval(2.0).unwrap(), 2.0);
        assert_eq!(f.family(), Family::CustomExpr);
        let f = parse_structure("x", BTreeMap::new()).unwrap();
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        match parse_structure("x-2", BTreeMap::new()).unwrap_err() {
            Error::Negative { x, .. } => assert_eq!(x, 0.0),
            e => panic!("unexpected {e:?}"),
        }
        match parse_structure("x + y", BTreeMap::new()).unwrap_err() {
            Error::Parse(p) => assert_eq!(p.position, 4),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn params_and_q_in_custom() {
        let mut p = BTreeMap::new();
        p.insert("c".to_string(), 3.0);
        let f = parse_structure("c*x", p).unwrap();
        assert_eq!(f.eval(2.0).unwrap(), 6.0);
        let f = StructureFunction::custom("bracket(x)", BTreeMap::new(), Some(c(2.0)), ArgKind::QGdo)
            .unwrap();
        assert!((f.eval(2.0).unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn complex_custom_is_rejected_as_not_real() {
        let q = root_of_unity(3);
        let err = StructureFunction::custom("(1 - q^x)/(1 - q)", BTreeMap::new(), Some(q), ArgKind::QGdo)
            .unwrap_err();
        assert!(matches!(err, Error::NotReal { .. }), "{err:?}");
    }

    #[test]
    fn q_minus_one_is_rejected() {
        assert!(StructureFunction::q_symmetric(c(-1.0)).is_err());
        assert!(StructureFunction::q_abs(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn spec_round_trip() {
        let fs = vec![
            StructureFunction::harmonic(),
            StructureFunction::isos(),
            StructureFunction::q_symmetric(c(2.0)).unwrap(),
            StructureFunction::q_abs(root_of_unity(5)).unwrap(),
            StructureFunction::q_abs_shift(root_of_unity(4), 0.25).unwrap(),
            StructureFunction::self_similar(1.2, vec![1.0, 2.0]).unwrap(),
            parse_structure("x*(x-1)^2", BTreeMap::new()).unwrap(),
        ];
        for f in fs {
            let json = serde_json::to_string(&f).unwrap();
            let back: StructureFunction = serde_json::from_str(&json).unwrap();
            assert_eq!(back, f, "{json}");
        }
        let f: StructureFunction =
            serde_json::from_str(r#"{"family":"q_abs","q":{"re":0.0,"im":1.0}}"#).unwrap();
        assert_eq!(f.family(), Family::QAbs);
        assert!(serde_json::from_str::<StructureFunction>(r#"{"family":"q_abs"}"#).is_err());
        assert!(serde_json::from_str::<StructureFunction>(
            r#"{"family":"self_similar","q":{"re":1.2,"im":0},"omegas":[1,2],"M":2}"#
        )
        .is_err());
    }

    #[test]
    fn root_of_unity_detection() {
        let f = StructureFunction::q_abs(root_of_unity(5)).unwrap();
        assert!(f.is_root_of_unity(5));
        assert!(!f.is_root_of_unity(4));
    }
}
