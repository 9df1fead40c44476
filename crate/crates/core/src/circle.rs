//! Circle points, the arc-length metric, and a closed-form algebra of the
//! homeomorphism families used by the cocycle constructions.
//!
//! Rotations carry exact rational turn fractions so that compositions and
//! powers cancel exactly; arc power maps store the exponent in log space so
//! that astronomically large powers degrade gracefully (the map saturates at
//! the attracting endpoint of each arc instead of overflowing).

use std::cell::Cell;
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

thread_local! {
    static HOMEO_OPS: Cell<u64> = const { Cell::new(0) };
}

fn bump_op() {
    HOMEO_OPS.with(|c| c.set(c.get() + 1));
}

/// Number of primitive homeomorphism operations (applies, composes, inverts,
/// powers) performed on this thread. Lets tests assert closed-form cost
/// bounds instead of wall time.
pub fn homeo_op_count() -> u64 {
    HOMEO_OPS.with(|c| c.get())
}

pub fn reset_homeo_op_count() {
    HOMEO_OPS.with(|c| c.set(0));
}

/// A circle point as a turn fraction in `[0, 1)`, i.e. the point `e^(i 2π x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleAngle(f64);

impl CircleAngle {
    pub fn new(x: f64) -> Self {
        assert!(x.is_finite(), "circle angle must be finite");
        let mut v = x.rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs
        if v >= 1.0 {
            v = 0.0;
        }
        CircleAngle(v)
    }

    pub fn turns(self) -> f64 {
        self.0
    }
}

/// An exact rotation amount: a rational number of turns reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Turns(BigRational);

impl Turns {
    pub fn new(r: BigRational) -> Self {
        Turns(&r - r.floor())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0);
        Turns::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact conversion; every finite f64 is a dyadic rational.
    pub fn from_f64(x: f64) -> Self {
        Turns::new(BigRational::from_float(x).expect("finite turn fraction"))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().expect("rational fits in f64 range")
    }

    fn plus(&self, other: &Turns) -> Turns {
        Turns::new(&self.0 + &other.0)
    }

    fn negated(&self) -> Turns {
        Turns::new(-&self.0)
    }

    fn scaled(&self, c: &BigInt) -> Turns {
        Turns::new(&self.0 * BigRational::from(c.clone()))
    }
}

/// A closed-form orientation-preserving circle homeomorphism.
///
/// `ArcPower { arcs: n, log_exp: s }` fixes the `n` equally spaced points
/// `q/n` and maps the local coordinate `u` of each arc to `u^exp(s)`; with
/// `n = 1` this is the full-circle power map `x -> x^t`. A `Chain` holds
/// maps of mixed families; its elements are stored in application order
/// (first-applied first) and kept free of identities, nested chains, and
/// adjacent same-family pairs, so algebraic cancellations happen eagerly.
#[derive(Debug, Clone, PartialEq)]
pub enum CircleHomeo {
    Identity,
    Rotation(Turns),
    ArcPower { arcs: u32, log_exp: f64 },
    Chain(Vec<CircleHomeo>),
}

impl CircleHomeo {
    pub fn rotation(turns: Turns) -> Self {
        if turns.is_zero() {
            CircleHomeo::Identity
        } else {
            CircleHomeo::Rotation(turns)
        }
    }

    pub fn arc_power(arcs: u32, log_exp: f64) -> Self {
        assert!(arcs >= 1, "arc count must be positive");
        assert!(!log_exp.is_nan(), "log exponent must not be NaN");
        if log_exp == 0.0 {
            CircleHomeo::Identity
        } else {
            CircleHomeo::ArcPower { arcs, log_exp }
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CircleHomeo::Identity)
    }

    /// Chain length (1 for the single-family maps); a proxy for apply cost.
    pub fn size(&self) -> usize {
        match self {
            CircleHomeo::Chain(v) => v.len(),
            _ => 1,
        }
    }
}

/// Arc-length distance in radians (circumference `2π`); range `[0, π]`.
pub fn arc_metric(a: CircleAngle, b: CircleAngle) -> f64 {
    let d = (a.turns() - b.turns()).abs();
    TAU * d.min(1.0 - d)
}

/// Evaluates the homeomorphism at a point.
pub fn apply(h: &CircleHomeo, a: CircleAngle) -> CircleAngle {
    match h {
        CircleHomeo::Identity => {
            bump_op();
            a
        }
        CircleHomeo::Rotation(t) => {
            bump_op();
            CircleAngle::new(a.turns() + t.to_f64())
        }
        CircleHomeo::ArcPower { arcs, log_exp } => {
            bump_op();
            let n = *arcs as f64;
            let scaled = a.turns() * n;
            let q = scaled.floor().min(n - 1.0);
            let u = scaled - q;
            let t = log_exp.exp();
            let u_mapped = if u == 0.0 {
                0.0
            } else if t == 0.0 {
                // degenerate limit of u^t as t -> 0+: the arc collapses to
                // its right endpoint
                1.0
            } else if t.is_infinite() {
                0.0
            } else {
                (t * u.ln()).exp()
            };
            CircleAngle::new((q + u_mapped) / n)
        }
        CircleHomeo::Chain(v) => v.iter().fold(a, |acc, e| apply(e, acc)),
    }
}

/// Merges `second ∘ first` when both live in the same closed-form family.
fn merge(first: &CircleHomeo, second: &CircleHomeo) -> Option<CircleHomeo> {
    match (first, second) {
        (CircleHomeo::Rotation(a), CircleHomeo::Rotation(b)) => {
            Some(CircleHomeo::rotation(a.plus(b)))
        }
        (
            CircleHomeo::ArcPower { arcs: n1, log_exp: s1 },
            CircleHomeo::ArcPower { arcs: n2, log_exp: s2 },
        ) if n1 == n2 => Some(CircleHomeo::arc_power(*n1, s1 + s2)),
        _ => None,
    }
}

fn push_normalized(stack: &mut Vec<CircleHomeo>, h: CircleHomeo) {
    match h {
        CircleHomeo::Identity => {}
        CircleHomeo::Chain(v) => {
            for e in v {
                push_normalized(stack, e);
            }
        }
        mut simple => {
            while let Some(top) = stack.last() {
                match merge(top, &simple) {
                    Some(CircleHomeo::Identity) => {
                        stack.pop();
                        return;
                    }
                    Some(m) => {
                        stack.pop();
                        simple = m;
                    }
                    None => break,
                }
            }
            stack.push(simple);
        }
    }
}

fn from_elements(mut elems: Vec<CircleHomeo>) -> CircleHomeo {
    match elems.len() {
        0 => CircleHomeo::Identity,
        1 => elems.pop().expect("len checked"),
        _ => CircleHomeo::Chain(elems),
    }
}

/// `compose(f, g)` is the map `a -> f(g(a))`. Same-family neighbours merge
/// (rotation angles add exactly, arc power log-exponents add), so ladders of
/// mutually inverse maps telescope to the identity at the representation
/// level.
pub fn compose(outer: &CircleHomeo, inner: &CircleHomeo) -> CircleHomeo {
    bump_op();
    let mut elems = Vec::new();
    push_normalized(&mut elems, inner.clone());
    push_normalized(&mut elems, outer.clone());
    from_elements(elems)
}

/// Exact inverse at the representation level.
pub fn invert(h: &CircleHomeo) -> CircleHomeo {
    bump_op();
    match h {
        CircleHomeo::Identity => CircleHomeo::Identity,
        CircleHomeo::Rotation(t) => CircleHomeo::rotation(t.negated()),
        CircleHomeo::ArcPower { arcs, log_exp } => CircleHomeo::arc_power(*arcs, -log_exp),
        CircleHomeo::Chain(v) => {
            let mut elems = Vec::new();
            for e in v.iter().rev() {
                push_normalized(&mut elems, invert(e));
            }
            from_elements(elems)
        }
    }
}

/// Closed-form power `h^c` for single-family maps and exact big-integer `c`.
///
/// Rotations stay exact (`c·r mod 1` in rational arithmetic). Arc powers
/// scale the log exponent; once `|c·s|` passes the f64 exp range the map has
/// already saturated at the arc endpoints, so the conversion loss of huge
/// `c` values is immaterial.
pub fn power(h: &CircleHomeo, c: &BigInt) -> Result<CircleHomeo> {
    bump_op();
    if c.is_zero() {
        return Ok(CircleHomeo::Identity);
    }
    match h {
        CircleHomeo::Identity => Ok(CircleHomeo::Identity),
        CircleHomeo::Rotation(t) => Ok(CircleHomeo::rotation(t.scaled(c))),
        CircleHomeo::ArcPower { arcs, log_exp } => {
            let cf = c.to_f64().unwrap_or_else(|| {
                if c.is_negative() {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            });
            Ok(CircleHomeo::arc_power(*arcs, cf * log_exp))
        }
        CircleHomeo::Chain(_) => Err(Error::UnsupportedChain),
    }
}
