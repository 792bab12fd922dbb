//! Solver backends: the embedded CDCL engine with metering, and external
//! solver processes driven over DIMACS files.
//!
//! External solvers follow SAT-competition conventions: `s SATISFIABLE` /
//! `s UNSATISFIABLE` status lines, `v`-prefixed model lines terminated by
//! `0`, and exit codes 10/20 honored when the status line is missing.
//! Peak memory of a child is taken from the kernel's child accounting at
//! reap time, with `/proc/<pid>/status` sampling as a fallback while the
//! process runs.

use keyforge_core::cnf::{self, Clause, CnfFormula, Lit, SolverOutput};
use keyforge_core::sat::{Limits, SolveStatus, Solver};
use std::io::Read;
use std::io::Write as _;
use std::time::{Duration, Instant};
use thiserror::Error;

/// Default attack/solve cap, matching the benchmarking cap of one day.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(86_400);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Sat,
    Unsat,
    /// Budget exhausted (or the solver itself gave up).
    Timeout,
}

/// Effort and footprint of one solve call. Search counters and learned
/// statistics are reported by the embedded backend only.
#[derive(Clone, Debug, Default)]
pub struct ResourceReport {
    pub wall_time: f64,
    pub peak_memory: u64,
    pub conflicts: Option<u64>,
    pub decisions: Option<u64>,
    pub propagations: Option<u64>,
    pub restarts: Option<u64>,
    pub mean_learned_len: Option<f64>,
    /// Clauses learned during the call (embedded only).
    pub learned_count: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: Status,
    /// Present iff `status == Sat`; indexed by variable offset.
    pub model: Option<Vec<bool>>,
    /// Exported conflict clauses (embedded backend only).
    pub learned: Option<Vec<Clause>>,
    pub resources: ResourceReport,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BackendKind {
    Embedded,
    /// Command tokens; exactly one contains the `{cnf}` placeholder.
    External { command: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct BackendSpec {
    pub kind: BackendKind,
    pub timeout: Option<Duration>,
}

impl BackendSpec {
    pub fn embedded() -> BackendSpec {
        BackendSpec {
            kind: BackendKind::Embedded,
            timeout: None,
        }
    }

    pub fn external(template: &str) -> Result<BackendSpec, SolverError> {
        let command: Vec<String> = template.split_whitespace().map(str::to_string).collect();
        if command.is_empty() {
            return Err(SolverError::BadSpec("empty command template".into()));
        }
        if !command.iter().any(|t| t.contains("{cnf}")) {
            return Err(SolverError::BadSpec(
                "command template needs a {cnf} placeholder".into(),
            ));
        }
        Ok(BackendSpec {
            kind: BackendKind::External { command },
            timeout: None,
        })
    }

    /// `embedded`, or a command template containing `{cnf}`.
    pub fn parse(spec: &str) -> Result<BackendSpec, SolverError> {
        if spec.trim() == "embedded" {
            Ok(BackendSpec::embedded())
        } else {
            BackendSpec::external(spec)
        }
    }

    pub fn with_timeout(mut self, timeout: Option<Duration>) -> BackendSpec {
        self.timeout = timeout;
        self
    }

    pub fn label(&self) -> String {
        match &self.kind {
            BackendKind::Embedded => "embedded".to_string(),
            BackendKind::External { command } => {
                let exe = command[0].rsplit('/').next().unwrap_or(&command[0]);
                format!("ext:{exe}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to launch solver: {0}")]
    SpawnFailure(String),
    #[error("malformed solver output: {0}")]
    MalformedOutput(String),
    #[error("solver session is closed")]
    SessionClosed,
    #[error("invalid backend spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An incremental embedded solving session: clauses accumulate and learned
/// clauses persist across calls, so each solve continues where the last
/// one stopped.
pub struct EmbeddedSession {
    solver: Solver,
    closed: bool,
}

impl Default for EmbeddedSession {
    fn default() -> Self {
        Self::new()
    }
}

impl EmbeddedSession {
    pub fn new() -> EmbeddedSession {
        EmbeddedSession {
            solver: Solver::new(),
            closed: false,
        }
    }

    pub fn ensure_vars(&mut self, n: u32) {
        self.solver.ensure_vars(n);
    }

    pub fn add_clause(&mut self, clause: &Clause) {
        self.solver.add_clause(clause.lits());
    }

    pub fn add_clauses(&mut self, clauses: &[Clause]) {
        for c in clauses {
            self.add_clause(c);
        }
    }

    pub fn add_formula(&mut self, f: &CnfFormula) {
        self.solver.add_formula(f);
    }

    /// Marks the session unusable; later solves fail with `SessionClosed`.
    pub fn close(&mut self) {
        self.closed = true;
    }

    pub fn footprint_bytes(&self) -> u64 {
        self.solver.footprint_bytes()
    }

    pub fn solve(
        &mut self,
        assumptions: &[Lit],
        timeout: Option<Duration>,
    ) -> Result<SolveResult, SolverError> {
        if self.closed {
            return Err(SolverError::SessionClosed);
        }
        let before = *self.solver.stats();
        let start = Instant::now();
        let deadline = timeout.map(|t| start + t);
        let mut stop = move || deadline.is_some_and(|d| Instant::now() >= d);
        let limits = Limits {
            max_conflicts: None,
            stop: deadline.is_some().then_some(&mut stop as &mut dyn FnMut() -> bool),
        };
        let status = self.solver.solve_assuming(assumptions, limits);
        let wall_time = start.elapsed().as_secs_f64();

        let after = *self.solver.stats();
        let learned_count = after.learned - before.learned;
        let learned_literals = after.learned_literals - before.learned_literals;
        let resources = ResourceReport {
            wall_time,
            peak_memory: self.solver.footprint_bytes(),
            conflicts: Some(after.conflicts - before.conflicts),
            decisions: Some(after.decisions - before.decisions),
            propagations: Some(after.propagations - before.propagations),
            restarts: Some(after.restarts - before.restarts),
            mean_learned_len: (learned_count > 0)
                .then(|| learned_literals as f64 / learned_count as f64),
            learned_count: Some(learned_count),
        };
        let (status, model) = match status {
            SolveStatus::Sat => (Status::Sat, self.solver.model().map(<[bool]>::to_vec)),
            SolveStatus::Unsat => (Status::Unsat, None),
            SolveStatus::Interrupted => (Status::Timeout, None),
        };
        Ok(SolveResult {
            status,
            model,
            learned: Some(self.solver.take_exported_learned()),
            resources,
        })
    }
}

/// One-shot solve with the embedded engine.
pub fn solve_embedded(
    f: &CnfFormula,
    assumptions: &[Lit],
    timeout: Option<Duration>,
) -> Result<SolveResult, SolverError> {
    let mut session = EmbeddedSession::new();
    session.ensure_vars(f.num_vars());
    session.add_formula(f);
    session.solve(assumptions, timeout)
}

/// One-shot solve through either backend.
pub fn solve_oneshot(f: &CnfFormula, spec: &BackendSpec) -> Result<SolveResult, SolverError> {
    match &spec.kind {
        BackendKind::Embedded => solve_embedded(f, &[], spec.timeout),
        BackendKind::External { .. } => solve_external(f, spec),
    }
}

/// Writes DIMACS, launches the external solver, parses competition output,
/// kills the child at the deadline, and records wall time plus the child's
/// peak resident memory.
pub fn solve_external(f: &CnfFormula, spec: &BackendSpec) -> Result<SolveResult, SolverError> {
    let BackendKind::External { command } = &spec.kind else {
        return Err(SolverError::BadSpec("not an external backend".into()));
    };

    let mut cnf_file = tempfile::Builder::new()
        .prefix("keyforge-")
        .suffix(".cnf")
        .tempfile()?;
    cnf_file.write_all(cnf::to_dimacs(f).as_bytes())?;
    cnf_file.flush()?;
    let cnf_path = cnf_file.path().to_string_lossy().into_owned();

    let argv: Vec<String> = command
        .iter()
        .map(|t| t.replace("{cnf}", &cnf_path))
        .collect();

    let start = Instant::now();
    let mut child = std::process::Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(std::process::Stdio::null())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::SpawnFailure(format!("{}: {e}", argv[0])))?;

    let mut stdout_pipe = child.stdout.take().expect("piped");
    let mut stderr_pipe = child.stderr.take().expect("piped");
    let stdout_thread = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout_pipe.read_to_end(&mut buf);
        buf
    });
    let stderr_thread = std::thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stderr_pipe.read_to_end(&mut buf);
        buf
    });

    let deadline = spec.timeout.map(|t| start + t);
    let wait = wait_child(&mut child, deadline)?;
    let wall_time = start.elapsed().as_secs_f64();
    let stdout = stdout_thread.join().unwrap_or_default();
    let _ = stderr_thread.join();

    let resources = ResourceReport {
        wall_time,
        peak_memory: wait.peak_memory,
        ..ResourceReport::default()
    };
    if wait.killed {
        return Ok(SolveResult {
            status: Status::Timeout,
            model: None,
            learned: None,
            resources,
        });
    }

    let text = String::from_utf8_lossy(&stdout);
    let parsed = match cnf::parse_solver_output(&text) {
        Ok(out) => out,
        // No status line: fall back to the exit-code convention.
        Err(_) => match wait.exit_code {
            Some(10) => SolverOutput::Sat(collect_v_lits(&text)),
            Some(20) => SolverOutput::Unsat,
            other => {
                return Err(SolverError::MalformedOutput(format!(
                    "no status line and unrecognized exit code {other:?}"
                )))
            }
        },
    };

    match parsed {
        SolverOutput::Unsat => Ok(SolveResult {
            status: Status::Unsat,
            model: None,
            learned: None,
            resources,
        }),
        SolverOutput::Unknown => Ok(SolveResult {
            status: Status::Timeout,
            model: None,
            learned: None,
            resources,
        }),
        SolverOutput::Sat(lits) => {
            let mut model = vec![false; f.num_vars() as usize];
            for lit in lits {
                let offset = lit.var().offset();
                if offset < model.len() {
                    model[offset] = lit.is_positive();
                }
            }
            // External output is untrusted: re-evaluate the formula.
            if !f.eval(&model) {
                return Err(SolverError::MalformedOutput(
                    "reported model does not satisfy the formula".into(),
                ));
            }
            Ok(SolveResult {
                status: Status::Sat,
                model: Some(model),
                learned: None,
                resources,
            })
        }
    }
}

fn collect_v_lits(text: &str) -> Vec<Lit> {
    text.lines()
        .filter_map(|l| l.strip_prefix("v "))
        .flat_map(str::split_whitespace)
        .filter_map(|t| t.parse::<i32>().ok())
        .filter_map(Lit::from_dimacs)
        .collect()
}

struct WaitOutcome {
    exit_code: Option<i32>,
    peak_memory: u64,
    killed: bool,
}

/// Polls the child with `wait4` so the kernel's resource accounting for
/// that specific pid is captured at reap time; samples `VmHWM` while the
/// child runs as a fallback. Kills at the deadline.
#[cfg(unix)]
fn wait_child(
    child: &mut std::process::Child,
    deadline: Option<Instant>,
) -> Result<WaitOutcome, SolverError> {
    let pid = child.id() as libc::pid_t;
    let mut sampled_peak = 0u64;
    let mut killed = false;
    loop {
        let mut status: libc::c_int = 0;
        // SAFETY: plain FFI wait on a pid we spawned; the rusage struct is
        // zero-initialized out-param memory.
        let (ret, rusage) = unsafe {
            let mut ru: libc::rusage = std::mem::zeroed();
            let ret = libc::wait4(pid, &mut status, libc::WNOHANG, &mut ru);
            (ret, ru)
        };
        if ret == pid {
            // Linux reports ru_maxrss in kilobytes.
            let reaped_peak = (rusage.ru_maxrss as u64).saturating_mul(1024);
            let exit_code = if !killed && libc::WIFEXITED(status) {
                Some(libc::WEXITSTATUS(status))
            } else {
                None
            };
            return Ok(WaitOutcome {
                exit_code,
                peak_memory: reaped_peak.max(sampled_peak),
                killed,
            });
        }
        if ret < 0 {
            return Err(SolverError::SpawnFailure(
                "lost track of the solver process".into(),
            ));
        }
        if let Some(hwm) = read_vmhwm(pid) {
            sampled_peak = sampled_peak.max(hwm);
        }
        if !killed {
            if let Some(d) = deadline {
                if Instant::now() >= d {
                    // SAFETY: signalling the child we spawned.
                    unsafe {
                        libc::kill(pid, libc::SIGKILL);
                    }
                    killed = true;
                }
            }
        }
        std::thread::sleep(Duration::from_millis(10));
    }
}

#[cfg(not(unix))]
fn wait_child(
    _child: &mut std::process::Child,
    _deadline: Option<Instant>,
) -> Result<WaitOutcome, SolverError> {
    Err(SolverError::SpawnFailure(
        "external solver backends need a unix host".into(),
    ))
}

#[cfg(target_os = "linux")]
fn read_vmhwm(pid: libc::pid_t) -> Option<u64> {
    let text = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    let line = text.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

#[cfg(all(unix, not(target_os = "linux")))]
fn read_vmhwm(_pid: libc::pid_t) -> Option<u64> {
    None
}
