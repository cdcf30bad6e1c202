//! Max-times semiring weights.
//!
//! Every dynamic program in this crate is written against [`Weight`], which
//! has two implementations: [`LogWeight`] (floating point, log domain, the
//! default) and [`Exact`] (arbitrary precision rationals in the linear
//! domain, used when strict-versus-non-strict decisions must be exact).

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

/// Absolute tolerance on log values under which two float weights are a tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A float weight must exceed another by more than this (in log domain) to
/// count as strictly larger.
pub const STRICT_MARGIN: f64 = 1e-10;

pub trait Weight: Clone + fmt::Debug + PartialEq + Send + Sync {
    /// Whether per-step rescaling should be applied by default.
    const NORMALIZE: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn times(&self, rhs: &Self) -> Self;
    /// `self / rhs`; `rhs` must be non-zero.
    fn divide(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;
    /// Raw total order, no tolerance.
    fn exact_cmp(&self, rhs: &Self) -> Ordering;
    /// Order used to classify ties: values within [`TIE_TOLERANCE`] compare equal.
    fn tie_cmp(&self, rhs: &Self) -> Ordering;
    /// Strictly larger by more than [`STRICT_MARGIN`] (exact for rationals).
    fn exceeds(&self, rhs: &Self) -> bool;
    /// Natural logarithm of the represented probability.
    fn ln(&self) -> f64;
    fn from_ratio(r: &BigRational) -> Self;

    fn at_least(&self, rhs: &Self) -> bool {
        !rhs.exceeds(self)
    }

    fn max_of<'a>(items: impl IntoIterator<Item = &'a Self>) -> Self
    where
        Self: 'a,
    {
        let mut best = Self::zero();
        for w in items {
            if w.exact_cmp(&best) == Ordering::Greater {
                best = w.clone();
            }
        }
        best
    }

    fn product<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::one(), |acc, w| acc.times(&w))
    }
}

/// Log-domain weight. `-inf` encodes probability zero; NaN never occurs.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wraps a log value. NaN is mapped to `-inf`.
    pub fn new(ln: f64) -> Self {
        if ln.is_nan() {
            Self::ZERO
        } else {
            LogWeight(ln)
        }
    }

    pub fn from_prob(p: f64) -> Self {
        if p <= 0.0 {
            Self::ZERO
        } else {
            LogWeight(p.ln())
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Debug for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogWeight({})", self.0)
    }
}

impl fmt::Display for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl Weight for LogWeight {
    const NORMALIZE: bool = true;

    fn zero() -> Self {
        Self::ZERO
    }

    fn one() -> Self {
        Self::ONE
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.0 == f64::NEG_INFINITY || rhs.0 == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogWeight(self.0 + rhs.0)
        }
    }

    fn divide(&self, rhs: &Self) -> Self {
        debug_assert!(rhs.0 != f64::NEG_INFINITY, "division by zero weight");
        if self.0 == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogWeight(self.0 - rhs.0)
        }
    }

    fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    fn exact_cmp(&self, rhs: &Self) -> Ordering {
        self.0.total_cmp(&rhs.0)
    }

    fn tie_cmp(&self, rhs: &Self) -> Ordering {
        match (self.is_zero(), rhs.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => {
                let d = self.0 - rhs.0;
                if d.abs() <= TIE_TOLERANCE {
                    Ordering::Equal
                } else if d > 0.0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    fn exceeds(&self, rhs: &Self) -> bool {
        match (self.is_zero(), rhs.is_zero()) {
            (true, _) => false,
            (false, true) => true,
            (false, false) => self.0 - rhs.0 > STRICT_MARGIN,
        }
    }

    fn ln(&self) -> f64 {
        self.0
    }

    fn from_ratio(r: &BigRational) -> Self {
        LogWeight::new(ratio_ln(r))
    }

    fn product<I: IntoIterator<Item = Self>>(items: I) -> Self {
        let mut sum = NeumaierSum::default();
        for w in items {
            if w.is_zero() {
                return Self::ZERO;
            }
            sum.add(w.0);
        }
        LogWeight(sum.total())
    }
}

/// Exact probability as a reduced big rational.
#[derive(Clone, PartialEq, Eq)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn new(r: BigRational) -> Self {
        Exact(r)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exact({})", self.0)
    }
}

impl Weight for Exact {
    const NORMALIZE: bool = false;

    fn zero() -> Self {
        Exact(BigRational::zero())
    }

    fn one() -> Self {
        Exact(BigRational::one())
    }

    fn times(&self, rhs: &Self) -> Self {
        if self.0.is_zero() || rhs.0.is_zero() {
            return Self::zero();
        }
        Exact(&self.0 * &rhs.0)
    }

    fn divide(&self, rhs: &Self) -> Self {
        Exact(&self.0 / &rhs.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn exact_cmp(&self, rhs: &Self) -> Ordering {
        self.0.cmp(&rhs.0)
    }

    fn tie_cmp(&self, rhs: &Self) -> Ordering {
        self.0.cmp(&rhs.0)
    }

    fn exceeds(&self, rhs: &Self) -> bool {
        self.0 > rhs.0
    }

    fn ln(&self) -> f64 {
        ratio_ln(&self.0)
    }

    fn from_ratio(r: &BigRational) -> Self {
        Exact(r.clone())
    }
}

/// Natural log of a non-negative rational without overflowing to `inf`.
pub fn ratio_ln(r: &BigRational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    debug_assert!(!r.is_negative());
    bigint_ln(r.numer()) - bigint_ln(r.denom())
}

fn bigint_ln(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 60;
    let head: BigInt = n >> shift;
    head.to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Compensated (Neumaier) summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
