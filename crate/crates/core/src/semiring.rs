//! Exact semiring and semifield arithmetic for measure coefficients.
//!
//! A semiring here is a commutative additive monoid with an associative
//! multiplication that distributes over addition and is annihilated by
//! zero. Capability flags record what extra structure is present:
//! `cancellative` (a+c = b+c implies a = b, hence a ring completion
//! exists), `has_negation` (additive inverses), and `has_division`
//! (multiplicative inverses for nonzero elements, i.e. a semifield).
//!
//! Elements are immutable exact values; equality is structural.

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemiringError {
    #[error("semiring `{0}` is not cancellative and admits no ring completion")]
    NotCancellative(String),
    #[error("semiring `{0}` has no additive inverses")]
    NoNegation(String),
    #[error("semiring `{0}` is not a semifield")]
    NotSemifield(String),
    #[error("unknown semiring name `{0}`")]
    UnknownName(String),
    #[error("`{value}` is not an element of semiring `{semiring}`")]
    InvalidValue { semiring: String, value: String },
    #[error("division by zero in semiring `{0}`")]
    DivisionByZero(String),
}

/// Carrier selection for a [`Semiring`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SemiringKind {
    /// Two-element Boolean semifield; 1 + 1 = 1.
    Boolean,
    /// Nonnegative exact rationals.
    NonnegRational,
    /// Exact rationals (a field).
    Rational,
    /// Arbitrary-precision integers (a ring).
    Integer,
    /// Nonnegative integers.
    Natural,
}

/// An exact element of one of the shipped carriers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Int(BigInt),
    Rat(BigRational),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(false) => write!(f, "0"),
            Value::Bool(true) => write!(f, "1"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Rat(q) => write!(f, "{q}"),
        }
    }
}

impl Value {
    pub fn from_u64(semiring: &Semiring, n: u64) -> Value {
        match semiring.kind() {
            SemiringKind::Boolean => Value::Bool(n != 0),
            SemiringKind::Integer | SemiringKind::Natural => Value::Int(BigInt::from(n)),
            SemiringKind::Rational | SemiringKind::NonnegRational => {
                Value::Rat(BigRational::from(BigInt::from(n)))
            }
        }
    }

    pub fn ratio(num: i64, den: i64) -> Value {
        Value::Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    /// Exact rational view, for handing values to the LP layer.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Value::Bool(b) => BigRational::from(BigInt::from(u8::from(*b))),
            Value::Int(n) => BigRational::from(n.clone()),
            Value::Rat(q) => q.clone(),
        }
    }
}

/// Minimal operation surface shared by shipped semirings and by the
/// deliberately corrupted specs used to exercise [`axiom_check`].
pub trait SemiringOps {
    fn zero(&self) -> Value;
    fn one(&self) -> Value;
    fn add(&self, a: &Value, b: &Value) -> Value;
    fn mul(&self, a: &Value, b: &Value) -> Value;
}

/// A named exact semiring with capability flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Semiring {
    kind: SemiringKind,
    name: &'static str,
    cancellative: bool,
    has_negation: bool,
    has_division: bool,
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

impl Semiring {
    pub fn boolean() -> Semiring {
        Semiring {
            kind: SemiringKind::Boolean,
            name: "boolean",
            cancellative: false,
            has_negation: false,
            has_division: true,
        }
    }

    pub fn nonneg_rational() -> Semiring {
        Semiring {
            kind: SemiringKind::NonnegRational,
            name: "nonneg-rational",
            cancellative: true,
            has_negation: false,
            has_division: true,
        }
    }

    pub fn rational() -> Semiring {
        Semiring {
            kind: SemiringKind::Rational,
            name: "rational",
            cancellative: true,
            has_negation: true,
            has_division: true,
        }
    }

    pub fn integer() -> Semiring {
        Semiring {
            kind: SemiringKind::Integer,
            name: "integer",
            cancellative: true,
            has_negation: true,
            has_division: false,
        }
    }

    pub fn natural() -> Semiring {
        Semiring {
            kind: SemiringKind::Natural,
            name: "natural",
            cancellative: true,
            has_negation: false,
            has_division: false,
        }
    }

    /// Resolves the name strings used in model files and on the CLI.
    pub fn from_name(name: &str) -> Result<Semiring, SemiringError> {
        match name {
            "boolean" => Ok(Semiring::boolean()),
            "nonneg-rational" => Ok(Semiring::nonneg_rational()),
            "rational" => Ok(Semiring::rational()),
            "integer" => Ok(Semiring::integer()),
            "natural" => Ok(Semiring::natural()),
            other => Err(SemiringError::UnknownName(other.to_string())),
        }
    }

    pub fn kind(&self) -> SemiringKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn is_cancellative(&self) -> bool {
        self.cancellative
    }

    pub fn has_negation(&self) -> bool {
        self.has_negation
    }

    pub fn has_division(&self) -> bool {
        self.has_division
    }

    /// The ring of formal differences, defined exactly when the additive
    /// monoid is cancellative. The Boolean semiring is the standard
    /// counterexample: 1 + 1 = 1 + 0 but 1 != 0.
    pub fn ring_completion(&self) -> Result<Semiring, SemiringError> {
        if !self.cancellative {
            return Err(SemiringError::NotCancellative(self.name.to_string()));
        }
        Ok(match self.kind {
            SemiringKind::NonnegRational | SemiringKind::Rational => Semiring::rational(),
            SemiringKind::Natural | SemiringKind::Integer => Semiring::integer(),
            SemiringKind::Boolean => unreachable!("boolean is not cancellative"),
        })
    }

    /// Membership test: the representation matches the carrier and any
    /// positivity constraint holds.
    pub fn contains(&self, v: &Value) -> bool {
        match (self.kind, v) {
            (SemiringKind::Boolean, Value::Bool(_)) => true,
            (SemiringKind::Integer, Value::Int(_)) => true,
            (SemiringKind::Natural, Value::Int(n)) => !n.is_negative(),
            (SemiringKind::Rational, Value::Rat(_)) => true,
            (SemiringKind::NonnegRational, Value::Rat(q)) => !q.is_negative(),
            _ => false,
        }
    }

    fn expect_member(&self, v: &Value) {
        assert!(
            self.contains(v),
            "value {v} is not an element of semiring {}",
            self.name
        );
    }

    pub fn add(&self, a: &Value, b: &Value) -> Value {
        self.expect_member(a);
        self.expect_member(b);
        match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (Value::Int(x), Value::Int(y)) => Value::Int(x + y),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            _ => unreachable!("membership checked above"),
        }
    }

    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        self.expect_member(a);
        self.expect_member(b);
        match (a, b) {
            (Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (Value::Int(x), Value::Int(y)) => Value::Int(x * y),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
            _ => unreachable!("membership checked above"),
        }
    }

    pub fn try_negate(&self, a: &Value) -> Result<Value, SemiringError> {
        if !self.has_negation {
            return Err(SemiringError::NoNegation(self.name.to_string()));
        }
        self.expect_member(a);
        Ok(match a {
            Value::Int(n) => Value::Int(-n),
            Value::Rat(q) => Value::Rat(-q),
            Value::Bool(_) => unreachable!("boolean has no negation"),
        })
    }

    pub fn sub(&self, a: &Value, b: &Value) -> Result<Value, SemiringError> {
        let nb = self.try_negate(b)?;
        Ok(self.add(a, &nb))
    }

    pub fn try_invert(&self, a: &Value) -> Result<Value, SemiringError> {
        if !self.has_division {
            return Err(SemiringError::NotSemifield(self.name.to_string()));
        }
        self.expect_member(a);
        if self.is_zero(a) {
            return Err(SemiringError::DivisionByZero(self.name.to_string()));
        }
        Ok(match a {
            Value::Bool(true) => Value::Bool(true),
            Value::Rat(q) => Value::Rat(q.recip()),
            _ => unreachable!(),
        })
    }

    pub fn is_zero(&self, a: &Value) -> bool {
        a == &self.zero()
    }

    pub fn is_one(&self, a: &Value) -> bool {
        a == &self.one()
    }

    pub fn sum<'a, I: IntoIterator<Item = &'a Value>>(&self, values: I) -> Value {
        values
            .into_iter()
            .fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    /// Parses the file-format rendering: `0`/`1` for booleans, decimal
    /// integers, and `p/q` (or plain `p`) rationals.
    pub fn parse(&self, text: &str) -> Result<Value, SemiringError> {
        let invalid = || SemiringError::InvalidValue {
            semiring: self.name.to_string(),
            value: text.to_string(),
        };
        let value = match self.kind {
            SemiringKind::Boolean => match text.trim() {
                "0" => Value::Bool(false),
                "1" => Value::Bool(true),
                _ => return Err(invalid()),
            },
            SemiringKind::Integer | SemiringKind::Natural => {
                Value::Int(text.trim().parse::<BigInt>().map_err(|_| invalid())?)
            }
            SemiringKind::Rational | SemiringKind::NonnegRational => {
                let t = text.trim();
                let (num, den) = match t.split_once('/') {
                    Some((n, d)) => (
                        n.trim().parse::<BigInt>().map_err(|_| invalid())?,
                        d.trim().parse::<BigInt>().map_err(|_| invalid())?,
                    ),
                    None => (t.parse::<BigInt>().map_err(|_| invalid())?, BigInt::one()),
                };
                if den.is_zero() {
                    return Err(invalid());
                }
                Value::Rat(BigRational::new(num, den))
            }
        };
        if !self.contains(&value) {
            return Err(invalid());
        }
        Ok(value)
    }

    /// Uniform-ish sample used by the law sweeps. Denominators stay small
    /// so that sums remain readable in failure reports.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Value {
        match self.kind {
            SemiringKind::Boolean => Value::Bool(rng.gen_bool(0.5)),
            SemiringKind::Integer => Value::Int(BigInt::from(rng.gen_range(-30i64..=30))),
            SemiringKind::Natural => Value::Int(BigInt::from(rng.gen_range(0i64..=30))),
            SemiringKind::Rational => Value::Rat(BigRational::new(
                BigInt::from(rng.gen_range(-30i64..=30)),
                BigInt::from(rng.gen_range(1i64..=8)),
            )),
            SemiringKind::NonnegRational => Value::Rat(BigRational::new(
                BigInt::from(rng.gen_range(0i64..=30)),
                BigInt::from(rng.gen_range(1i64..=8)),
            )),
        }
    }
}

impl SemiringOps for Semiring {
    fn zero(&self) -> Value {
        match self.kind {
            SemiringKind::Boolean => Value::Bool(false),
            SemiringKind::Integer | SemiringKind::Natural => Value::Int(BigInt::zero()),
            SemiringKind::Rational | SemiringKind::NonnegRational => {
                Value::Rat(BigRational::zero())
            }
        }
    }

    fn one(&self) -> Value {
        match self.kind {
            SemiringKind::Boolean => Value::Bool(true),
            SemiringKind::Integer | SemiringKind::Natural => Value::Int(BigInt::one()),
            SemiringKind::Rational | SemiringKind::NonnegRational => Value::Rat(BigRational::one()),
        }
    }

    fn add(&self, a: &Value, b: &Value) -> Value {
        Semiring::add(self, a, b)
    }

    fn mul(&self, a: &Value, b: &Value) -> Value {
        Semiring::mul(self, a, b)
    }
}

// Inherent forwarding so callers don't need the trait in scope.
impl Semiring {
    pub fn zero(&self) -> Value {
        SemiringOps::zero(self)
    }

    pub fn one(&self) -> Value {
        SemiringOps::one(self)
    }
}

/// One failed axiom instance, with the triple that witnessed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: &'static str,
    pub witness: [Value; 3],
}

/// Checks every semiring axiom on each sampled triple `(a, b, c)` and
/// reports all violations. Shipped semirings produce an empty report;
/// the test suite also feeds corrupted operation tables through this.
pub fn axiom_check<S: SemiringOps>(ops: &S, samples: &[[Value; 3]]) -> Vec<AxiomViolation> {
    let mut out = Vec::new();
    let zero = ops.zero();
    let one = ops.one();
    for triple in samples {
        let [a, b, c] = triple;
        let mut check = |axiom: &'static str, lhs: Value, rhs: Value| {
            if lhs != rhs {
                out.push(AxiomViolation {
                    axiom,
                    witness: triple.clone(),
                });
            }
        };
        check(
            "additive associativity",
            ops.add(&ops.add(a, b), c),
            ops.add(a, &ops.add(b, c)),
        );
        check("additive commutativity", ops.add(a, b), ops.add(b, a));
        check("additive identity", ops.add(&zero, a), a.clone());
        check(
            "multiplicative associativity",
            ops.mul(&ops.mul(a, b), c),
            ops.mul(a, &ops.mul(b, c)),
        );
        check("left multiplicative identity", ops.mul(&one, a), a.clone());
        check("right multiplicative identity", ops.mul(a, &one), a.clone());
        check(
            "left distributivity",
            ops.mul(a, &ops.add(b, c)),
            ops.add(&ops.mul(a, b), &ops.mul(a, c)),
        );
        check(
            "right distributivity",
            ops.mul(&ops.add(a, b), c),
            ops.add(&ops.mul(a, c), &ops.mul(b, c)),
        );
        check("left annihilation", ops.mul(&zero, a), zero.clone());
        check("right annihilation", ops.mul(a, &zero), zero.clone());
    }
    out
}

/// Searches the samples for a cancellation counterexample
/// (`a + c = b + c` with `a != b`). Returns the first one found.
pub fn cancellation_counterexample(
    semiring: &Semiring,
    samples: &[[Value; 3]],
) -> Option<[Value; 3]> {
    samples.iter().find(|&[a, b, c]| {
        semiring.add(a, c) == semiring.add(b, c) && a != b
    }).cloned()
}
