//! Violation records shared by every validator.
//!
//! Validators never fail: they return a [`ValidationReport`] whose entries
//! carry a stable [`ViolationCode`] plus a human-readable message naming the
//! offending item.

use std::fmt;

use serde::Serialize;

/// Stable violation codes. The `SCREAMING_SNAKE` spelling returned by
/// [`ViolationCode::as_str`] is part of the CLI contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    EmptyGraph,
    DuplicateModule,
    DuplicatePort,
    UnknownModule,
    UnknownPort,
    TypeMismatch,
    Cycle,
    UnconnectedPort,
    MultiplyConnectedPort,
    ExitCount,
    MissingPool,
    DuplicatePool,
    EmptyPool,
    PoolModuleMismatch,
    DuplicateImplementation,
    InvalidImplementation,
    Unmapped,
    NotInPool,
    UnknownNode,
    DuplicateNode,
    InvalidNode,
    MobilityDomainMismatch,
    InvalidMobility,
    InvalidLinkRule,
    DuplicateLinkRule,
    UnknownReference,
    InvalidWorkload,
    InvalidSlo,
    InvalidEpoch,
    InvalidPolicy,
    InvalidWeights,
    InvalidBudgets,
    MemoryCapacity,
    ComputeCapacity,
    UnreachableRoute,
    ImplementationAffinity,
    DomainAffinity,
    Colocation,
    DataLocality,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            EmptyGraph => "EMPTY_GRAPH",
            DuplicateModule => "DUPLICATE_MODULE",
            DuplicatePort => "DUPLICATE_PORT",
            UnknownModule => "UNKNOWN_MODULE",
            UnknownPort => "UNKNOWN_PORT",
            TypeMismatch => "TYPE_MISMATCH",
            Cycle => "CYCLE",
            UnconnectedPort => "UNCONNECTED_PORT",
            MultiplyConnectedPort => "MULTIPLY_CONNECTED_PORT",
            ExitCount => "EXIT_COUNT",
            MissingPool => "MISSING_POOL",
            DuplicatePool => "DUPLICATE_POOL",
            EmptyPool => "EMPTY_POOL",
            PoolModuleMismatch => "POOL_MODULE_MISMATCH",
            DuplicateImplementation => "DUPLICATE_IMPLEMENTATION",
            InvalidImplementation => "INVALID_IMPLEMENTATION",
            Unmapped => "UNMAPPED",
            NotInPool => "NOT_IN_POOL",
            UnknownNode => "UNKNOWN_NODE",
            DuplicateNode => "DUPLICATE_NODE",
            InvalidNode => "INVALID_NODE",
            MobilityDomainMismatch => "MOBILITY_DOMAIN_MISMATCH",
            InvalidMobility => "INVALID_MOBILITY",
            InvalidLinkRule => "INVALID_LINK_RULE",
            DuplicateLinkRule => "DUPLICATE_LINK_RULE",
            UnknownReference => "UNKNOWN_REFERENCE",
            InvalidWorkload => "INVALID_WORKLOAD",
            InvalidSlo => "INVALID_SLO",
            InvalidEpoch => "INVALID_EPOCH",
            InvalidPolicy => "INVALID_POLICY",
            InvalidWeights => "INVALID_WEIGHTS",
            InvalidBudgets => "INVALID_BUDGETS",
            MemoryCapacity => "MEMORY_CAPACITY",
            ComputeCapacity => "COMPUTE_CAPACITY",
            UnreachableRoute => "UNREACHABLE_ROUTE",
            ImplementationAffinity => "IMPLEMENTATION_AFFINITY",
            DomainAffinity => "DOMAIN_AFFINITY",
            Colocation => "COLOCATION",
            DataLocality => "DATA_LOCALITY",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Ordered list of violations; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, code: ViolationCode, message: impl Into<String>) {
        self.violations.push(Violation::new(code, message));
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl IntoIterator for ValidationReport {
    type Item = Violation;
    type IntoIter = std::vec::IntoIter<Violation>;

    fn into_iter(self) -> Self::IntoIter {
        self.violations.into_iter()
    }
}
