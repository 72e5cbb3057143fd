//! Identifiers for the constant-time observations and the three-way answer
//! they produce.

use std::fmt;

/// A sufficient condition for deciding `s ->* t` without traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Observation {
    /// `s == t`.
    Trivial,
    /// `s` and `t` lie in the same strongly connected component.
    SameScc,
    /// Different weakly connected components.
    B2,
    /// `t` precedes `s` in a topological ordering.
    B4,
    /// Forward level of `t` not above that of `s`.
    B5,
    /// Backward level of `s` not above that of `t`.
    B6,
    /// `t` inside `s`'s high range.
    T1,
    /// `t` beyond `s`'s max index.
    T2,
    /// `t` at `s`'s max index.
    T3,
    /// `s` inside `t`'s low range.
    T4,
    /// `s` before `t`'s min index.
    T5,
    /// `s` at `t`'s min index.
    T6,
    /// `s` reaches a supportive vertex that reaches `t`.
    S1,
    /// A support reaches `s` but not `t`.
    S2,
    /// `t` reaches a support that `s` does not reach.
    S3,
}

impl Observation {
    pub const ALL: [Observation; 15] = [
        Observation::Trivial,
        Observation::SameScc,
        Observation::B2,
        Observation::B4,
        Observation::B5,
        Observation::B6,
        Observation::T1,
        Observation::T2,
        Observation::T3,
        Observation::T4,
        Observation::T5,
        Observation::T6,
        Observation::S1,
        Observation::S2,
        Observation::S3,
    ];

    pub const COUNT: usize = Self::ALL.len();

    pub fn index(self) -> usize {
        self as usize
    }

    /// Whether the observation proves reachability (as opposed to its absence).
    pub fn is_positive(self) -> bool {
        use Observation::*;
        matches!(self, Trivial | SameScc | T1 | T3 | T4 | T6 | S1)
    }

    pub fn name(self) -> &'static str {
        use Observation::*;
        match self {
            Trivial => "s=t",
            SameScc => "B3",
            B2 => "B2",
            B4 => "B4",
            B5 => "B5",
            B6 => "B6",
            T1 => "T1",
            T2 => "T2",
            T3 => "T3",
            T4 => "T4",
            T5 => "T5",
            T6 => "T6",
            S1 => "S1",
            S2 => "S2",
            S3 => "S3",
        }
    }
}

impl fmt::Display for Observation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of a constant-time test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Reachable(Observation),
    Unreachable(Observation),
    Unknown,
}

impl Answer {
    pub(crate) fn decided(reachable: bool, by: Observation) -> Answer {
        debug_assert_eq!(reachable, by.is_positive());
        if reachable {
            Answer::Reachable(by)
        } else {
            Answer::Unreachable(by)
        }
    }

    /// `Some(reachability)` for decisive answers.
    pub fn reachable(self) -> Option<bool> {
        match self {
            Answer::Reachable(_) => Some(true),
            Answer::Unreachable(_) => Some(false),
            Answer::Unknown => None,
        }
    }

    pub fn observation(self) -> Option<Observation> {
        match self {
            Answer::Reachable(o) | Answer::Unreachable(o) => Some(o),
            Answer::Unknown => None,
        }
    }

    pub fn is_decisive(self) -> bool {
        !matches!(self, Answer::Unknown)
    }
}
