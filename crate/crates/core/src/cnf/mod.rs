//! CNF formulas, Tseitin encoding of circuits, and the attack-formula
//! constructions (KDC, DIVC, SCKVC, key generation).
//!
//! Literals use DIMACS conventions throughout: variables are 1-based, a
//! negative integer is a negated variable, and clause lines end in `0`.

mod satc;
mod tseitin;

pub use satc::{DivcGroup, SatcState};
pub use tseitin::{allocate_net_vars, encode_circuit, equivalence_miter, tseitin, MiterFormula, VarAllocator};

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroI32;

/// 1-based CNF variable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    /// `index` is 1-based, as in DIMACS.
    pub fn new(index: u32) -> Var {
        debug_assert!(index >= 1);
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// 0-based index, for dense arrays.
    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }
}

/// Signed variable reference; never refers to variable 0.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lit(NonZeroI32);

impl Lit {
    pub fn positive(var: Var) -> Lit {
        Lit(NonZeroI32::new(var.0 as i32).expect("variables are 1-based"))
    }

    pub fn negative(var: Var) -> Lit {
        Lit(NonZeroI32::new(-(var.0 as i32)).expect("variables are 1-based"))
    }

    pub fn new(var: Var, positive: bool) -> Lit {
        if positive {
            Lit::positive(var)
        } else {
            Lit::negative(var)
        }
    }

    pub fn from_dimacs(value: i32) -> Option<Lit> {
        NonZeroI32::new(value).map(Lit)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0.get()
    }

    pub fn var(self) -> Var {
        Var(self.0.get().unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0.get() > 0
    }

    /// Truth value under a 0-indexed assignment.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var().offset()] == self.is_positive()
    }
}

impl core::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(NonZeroI32::new(-self.0.get()).expect("nonzero"))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.get())
    }
}

/// A disjunction of literals.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause(Vec<Lit>);

impl Clause {
    pub fn new(lits: Vec<Lit>) -> Clause {
        debug_assert!(
            lits.iter()
                .enumerate()
                .all(|(i, a)| lits[..i].iter().all(|b| a != b)),
            "duplicate literal in clause"
        );
        Clause(lits)
    }

    pub fn unit(lit: Lit) -> Clause {
        Clause(alloc::vec![lit])
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.0.iter().any(|l| l.eval(assignment))
    }

    pub fn max_var(&self) -> u32 {
        self.0.iter().map(|l| l.var().index()).max().unwrap_or(0)
    }
}

impl<'a> IntoIterator for &'a Clause {
    type Item = &'a Lit;
    type IntoIter = core::slice::Iter<'a, Lit>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Variable count plus clause list.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new() -> CnfFormula {
        CnfFormula::default()
    }

    pub fn with_vars(num_vars: u32) -> CnfFormula {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Raises the variable count (never lowers it).
    pub fn ensure_vars(&mut self, num_vars: u32) {
        self.num_vars = self.num_vars.max(num_vars);
    }

    pub fn push(&mut self, clause: Clause) {
        self.num_vars = self.num_vars.max(clause.max_var());
        self.clauses.push(clause);
    }

    /// Pushes a clause after normalization: duplicate literals collapse and
    /// tautologies (a gate fed the same net twice produces both) vanish.
    pub fn push_lits(&mut self, lits: &[Lit]) {
        let mut out = Vec::with_capacity(lits.len());
        for &l in lits {
            if out.contains(&!l) {
                return;
            }
            if !out.contains(&l) {
                out.push(l);
            }
        }
        self.push(Clause::new(out));
    }

    pub fn extend_from(&mut self, clauses: &[Clause]) {
        for c in clauses {
            self.push(c.clone());
        }
    }

    /// True when the 0-indexed assignment satisfies every clause.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.eval(assignment))
    }
}

/// Renders the standard DIMACS CNF text form.
pub fn to_dimacs(f: &CnfFormula) -> String {
    let mut s = String::new();
    s.push_str(&alloc::format!("p cnf {} {}\n", f.num_vars, f.clauses.len()));
    for clause in &f.clauses {
        for lit in clause {
            s.push_str(&alloc::format!("{lit} "));
        }
        s.push_str("0\n");
    }
    s
}

/// Parses DIMACS CNF text.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut formula = CnfFormula::new();
    let mut lits: Vec<Lit> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let mut parts = rest.split_whitespace();
            if parts.next() != Some("cnf") {
                return Err(CnfError::MalformedDimacs(line.to_string()));
            }
            let vars: u32 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| CnfError::MalformedDimacs(line.to_string()))?;
            formula.ensure_vars(vars);
            continue;
        }
        for tok in line.split_whitespace() {
            let value: i32 = tok
                .parse()
                .map_err(|_| CnfError::MalformedDimacs(tok.to_string()))?;
            match Lit::from_dimacs(value) {
                Some(lit) => lits.push(lit),
                None => formula.push(Clause::new(core::mem::take(&mut lits))),
            }
        }
    }
    if !lits.is_empty() {
        formula.push(Clause::new(lits));
    }
    Ok(formula)
}

/// Result of a SAT-competition-format solver run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SolverOutput {
    /// The literals reported on `v` lines.
    Sat(Vec<Lit>),
    Unsat,
    Unknown,
}

/// Parses SAT-competition output: an `s` status line plus `v` model lines
/// terminated by `0`.
pub fn parse_solver_output(text: &str) -> Result<SolverOutput, CnfError> {
    let mut status: Option<&str> = None;
    let mut model: Vec<Lit> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            if status.is_some() {
                return Err(CnfError::MalformedOutput("duplicate status line".into()));
            }
            status = Some(rest.trim());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let value: i32 = tok.parse().map_err(|_| {
                    CnfError::MalformedOutput(alloc::format!("bad model token `{tok}`"))
                })?;
                if let Some(lit) = Lit::from_dimacs(value) {
                    model.push(lit);
                }
            }
        }
    }
    match status {
        Some("SATISFIABLE") => Ok(SolverOutput::Sat(model)),
        Some("UNSATISFIABLE") => Ok(SolverOutput::Unsat),
        Some("UNKNOWN" | "INDETERMINATE") => Ok(SolverOutput::Unknown),
        Some(other) => Err(CnfError::MalformedOutput(alloc::format!(
            "unrecognized status `{other}`"
        ))),
        None => Err(CnfError::MalformedOutput("missing status line".into())),
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CnfError {
    /// A learned clause references a variable the formula does not know.
    ForeignVariable { var: u32, num_vars: u32 },
    MalformedOutput(String),
    MalformedDimacs(String),
    /// Miter construction over circuits with mismatched interfaces.
    MiterMismatch(String),
}

impl fmt::Display for CnfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CnfError::ForeignVariable { var, num_vars } => write!(
                f,
                "clause references variable {var} but only {num_vars} exist"
            ),
            CnfError::MalformedOutput(msg) => write!(f, "malformed solver output: {msg}"),
            CnfError::MalformedDimacs(msg) => write!(f, "malformed DIMACS: {msg}"),
            CnfError::MiterMismatch(msg) => write!(f, "miter interface mismatch: {msg}"),
        }
    }
}

impl core::error::Error for CnfError {}
