//! Cost-vector arithmetic, dominance relations and non-dominated-subset kernels.
//!
//! Every path and edge in the planner carries an `M`-dimensional [`CostVec`].
//! Components are non-negative integers or the [`Cost::Inf`] sentinel; addition
//! saturates so that an infinite component can never decay back to a finite
//! value. All dominance tests are pure value comparisons.

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;
use std::ops::Add;

/// One objective value: a finite non-negative cost or the infinity sentinel
/// used for non-traversable edges.
///
/// `Inf` is a dedicated variant rather than a large finite number, so
/// saturating addition cannot overflow into it and obstacle edges are exactly
/// non-traversable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Cost {
    Finite(u64),
    Inf,
}

impl Cost {
    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    /// Saturating addition: anything plus `Inf` is `Inf`.
    pub fn saturating_add(self, other: Cost) -> Cost {
        match (self, other) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a.saturating_add(b)),
            _ => Cost::Inf,
        }
    }

    /// `self <= (1 + eps) * other`.
    ///
    /// Uses exact integer arithmetic when `eps` is a short decimal (the common
    /// case: 0.01, 0.02, 0.05), otherwise falls back to floating point with a
    /// 1e-12 relative tolerance.
    fn le_scaled(self, other: Cost, eps: f64) -> bool {
        match (self, other) {
            (_, Cost::Inf) => true,
            (Cost::Inf, Cost::Finite(_)) => false,
            (Cost::Finite(a), Cost::Finite(b)) => {
                if eps == 0.0 {
                    return a <= b;
                }
                const DEN: u64 = 1_000_000_000;
                let num = (eps * DEN as f64).round();
                if num >= 0.0 && num <= u32::MAX as f64 && num / DEN as f64 == eps {
                    // eps is exactly num/DEN: compare a*DEN <= b*(DEN+num) exactly.
                    (a as u128) * (DEN as u128) <= (b as u128) * (DEN as u128 + num as u128)
                } else {
                    (a as f64) <= (1.0 + eps) * (b as f64) * (1.0 + 1e-12)
                }
            }
        }
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, other: Cost) -> Cost {
        self.saturating_add(other)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(v) => write!(f, "{v}"),
            Cost::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(v) => serializer.serialize_u64(*v),
            Cost::Inf => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CostVisitor;
        impl Visitor<'_> for CostVisitor {
            type Value = Cost;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or the string \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
                Ok(Cost::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
                u64::try_from(v)
                    .map(Cost::Finite)
                    .map_err(|_| E::custom("negative cost"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
                if v == "inf" {
                    Ok(Cost::Inf)
                } else {
                    Err(E::custom(format!("unknown cost literal {v:?}")))
                }
            }
        }
        deserializer.deserialize_any(CostVisitor)
    }
}

/// An `M`-dimensional cost vector.
///
/// Derived `Ord` is lexicographic over the components, which is exactly the
/// priority order used by the planners' open lists. Two vectors are comparable
/// only when their objective counts match; mixing lengths is a caller bug.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct CostVec(SmallVec<[Cost; 4]>);

impl CostVec {
    pub fn new(components: impl IntoIterator<Item = Cost>) -> Self {
        CostVec(components.into_iter().collect())
    }

    /// All-zero vector of `m` objectives.
    pub fn zeros(m: usize) -> Self {
        assert!(m >= 1, "objective count must be >= 1");
        CostVec(std::iter::repeat_n(Cost::Finite(0), m).collect())
    }

    /// All-infinite vector of `m` objectives.
    pub fn inf(m: usize) -> Self {
        assert!(m >= 1, "objective count must be >= 1");
        CostVec(std::iter::repeat_n(Cost::Inf, m).collect())
    }

    /// Vector with every component equal to `value`.
    pub fn uniform(m: usize, value: u64) -> Self {
        assert!(m >= 1, "objective count must be >= 1");
        CostVec(std::iter::repeat_n(Cost::Finite(value), m).collect())
    }

    pub fn from_finite(components: &[u64]) -> Self {
        CostVec(components.iter().map(|&v| Cost::Finite(v)).collect())
    }

    /// Objective count M.
    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Cost] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Strict Pareto dominance: `self(m) <= other(m)` for all m and strictly
    /// less for at least one. A vector never dominates itself.
    pub fn dominates(&self, other: &CostVec) -> bool {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        let mut strict = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            if a > b {
                return false;
            }
            if a < b {
                strict = true;
            }
        }
        strict
    }

    /// Componentwise `<=`, equality allowed everywhere.
    pub fn weakly_dominates(&self, other: &CostVec) -> bool {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self(m) <= (1 + eps) * other(m)` for all m. With `eps == 0` this
    /// coincides with [`weakly_dominates`](Self::weakly_dominates). Note that
    /// mutual eps-dominance between distinct vectors is possible.
    pub fn eps_dominates(&self, other: &CostVec, eps: f64) -> bool {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        assert!(eps >= 0.0, "eps must be non-negative");
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| a.le_scaled(*b, eps))
    }

    /// Strict lexicographic order.
    pub fn lex_less(&self, other: &CostVec) -> bool {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        self < other
    }

    /// Componentwise subtraction; `None` when any component would go negative
    /// or either operand has an infinite component.
    pub fn checked_sub(&self, other: &CostVec) -> Option<CostVec> {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        let mut out = SmallVec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            match (a, b) {
                (Cost::Finite(a), Cost::Finite(b)) if a >= b => out.push(Cost::Finite(a - b)),
                _ => return None,
            }
        }
        Some(CostVec(out))
    }

    /// Componentwise saturating addition.
    pub fn saturating_add(&self, other: &CostVec) -> CostVec {
        assert_eq!(self.m(), other.m(), "objective count mismatch");
        CostVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.saturating_add(*b))
                .collect(),
        )
    }
}

impl Add for &CostVec {
    type Output = CostVec;
    fn add(self, other: &CostVec) -> CostVec {
        self.saturating_add(other)
    }
}

impl fmt::Display for CostVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for CostVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
        for c in &self.0 {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for CostVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct VecVisitor;
        impl<'de> Visitor<'de> for VecVisitor {
            type Value = CostVec;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a sequence of costs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<CostVec, A::Error> {
                let mut out = SmallVec::new();
                while let Some(c) = seq.next_element::<Cost>()? {
                    out.push(c);
                }
                Ok(CostVec(out))
            }
        }
        deserializer.deserialize_seq(VecVisitor)
    }
}

/// `approx(m) <= factor * exact(m)` for all m: the cover predicate behind the
/// approximation bound, with `factor = (1 + eps)^L` for a path-length bound L.
pub fn covered_within_factor(approx: &CostVec, exact: &CostVec, factor: f64) -> bool {
    assert_eq!(approx.m(), exact.m(), "objective count mismatch");
    assert!(factor >= 1.0, "factor must be >= 1");
    approx
        .components()
        .iter()
        .zip(exact.components())
        .all(|(a, b)| match (a, b) {
            (_, Cost::Inf) => true,
            (Cost::Inf, Cost::Finite(_)) => false,
            (Cost::Finite(a), Cost::Finite(b)) => (*a as f64) <= factor * (*b as f64),
        })
}

/// Which non-dominated-subset kernel the planners use.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum NdKernel {
    /// Pairwise comparisons, O(n^2), any M.
    #[default]
    Naive,
    /// Sort-and-sweep for M = 2, falling back to naive otherwise.
    Kung2d,
}

/// Non-dominated subset by pairwise comparison.
///
/// Returns the cost-unique maximal subset in which no member dominates
/// another; exactly one representative is kept per distinct vector value
/// (the first occurrence).
pub fn nd_filter_naive(input: &[CostVec]) -> Vec<CostVec> {
    let mut out = Vec::new();
    'outer: for (i, v) in input.iter().enumerate() {
        for (j, w) in input.iter().enumerate() {
            if i == j {
                continue;
            }
            if w.dominates(v) || (w == v && j < i) {
                continue 'outer;
            }
        }
        out.push(v.clone());
    }
    out
}

/// Non-dominated subset for M = 2 via sort and sweep.
///
/// Sorts by first component ascending (ties sub-sorted by second component
/// ascending), then keeps a vector iff its second component is strictly below
/// the running minimum. Produces the same set as [`nd_filter_naive`].
pub fn nd_filter_kung_2d(input: &[CostVec]) -> Vec<CostVec> {
    assert!(
        input.iter().all(|v| v.m() == 2),
        "kung sweep requires M = 2"
    );
    let mut sorted: Vec<CostVec> = input.to_vec();
    sorted.sort(); // lexicographic: first component, then second
    let mut out = Vec::new();
    let mut second_min = Cost::Inf;
    for v in sorted {
        let second = v.components()[1];
        if out.is_empty() || second < second_min {
            second_min = second;
            out.push(v);
        }
    }
    out
}

/// Kernel dispatch: `Kung2d` applies the sweep when every vector has M = 2
/// and falls back to the naive filter otherwise.
pub fn nd_filter(kernel: NdKernel, input: &[CostVec]) -> Vec<CostVec> {
    match kernel {
        NdKernel::Naive => nd_filter_naive(input),
        NdKernel::Kung2d => {
            if input.iter().all(|v| v.m() == 2) {
                nd_filter_kung_2d(input)
            } else {
                nd_filter_naive(input)
            }
        }
    }
}
