//! DIMACS I/O and the external-solver backend.

use super::cdcl::SolveResult;
use super::cnf::Cnf;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExternalSolverError {
    #[error("could not run `{exe}`: {source}")]
    Spawn { exe: String, source: std::io::Error },
    #[error("could not write the DIMACS file: {0}")]
    Io(#[from] std::io::Error),
    #[error("`{exe}` exited with status {status}")]
    Status { exe: String, status: i32 },
    #[error("unparsable solver output: {0}")]
    Output(String),
    #[error("solver model violates the problem clauses")]
    BadModel,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DimacsError {
    pub line: usize,
    pub message: String,
}

/// Reads a DIMACS CNF file. Comments (`c ...`) are skipped; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf: Option<Cnf> = None;
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let err = |m: &str| DimacsError {
            line: i + 1,
            message: m.to_string(),
        };
        if let Some(rest) = line.strip_prefix("p") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(err("expected `p cnf <vars> <clauses>`"));
            }
            let n = parts[1].parse().map_err(|_| err("bad variable count"))?;
            cnf = Some(Cnf::new(n));
            continue;
        }
        let c = cnf.as_mut().ok_or_else(|| err("clause before header"))?;
        for tok in line.split_whitespace() {
            let l: i32 = tok.parse().map_err(|_| err("bad literal"))?;
            if l == 0 {
                c.clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() > c.num_vars {
                return Err(err("literal out of range"));
            } else {
                current.push(l);
            }
        }
    }
    let mut cnf = cnf.ok_or(DimacsError {
        line: 0,
        message: "missing header".into(),
    })?;
    if !current.is_empty() {
        cnf.clauses.push(current);
    }
    Ok(cnf)
}

/// Parses SAT-competition output: an `s` status line and `v` value lines.
pub fn parse_solver_output(text: &str, num_vars: u32) -> Result<SolveResult, ExternalSolverError> {
    let mut status = None;
    let mut model = vec![false; num_vars as usize];
    for line in text.lines() {
        let line = line.trim();
        if let Some(s) = line.strip_prefix("s ") {
            status = Some(s.trim().to_string());
        } else if let Some(vs) = line.strip_prefix("v ") {
            for tok in vs.split_whitespace() {
                let l: i64 = tok
                    .parse()
                    .map_err(|_| ExternalSolverError::Output(format!("bad value `{tok}`")))?;
                if l == 0 {
                    continue;
                }
                let v = l.unsigned_abs() as usize;
                if v > model.len() {
                    return Err(ExternalSolverError::Output(format!("variable {v} out of range")));
                }
                model[v - 1] = l > 0;
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(SolveResult::Sat(model)),
        Some("UNSATISFIABLE") => Ok(SolveResult::Unsat),
        Some(other) => Err(ExternalSolverError::Output(format!("status `{other}`"))),
        None => Err(ExternalSolverError::Output("no `s` line".into())),
    }
}

/// Runs `exe <file.cnf>` and reads its verdict. Exit codes 0, 10, and 20
/// are accepted (the latter two are the competition convention).
pub fn solve_external(cnf: &Cnf, exe: &Path) -> Result<SolveResult, ExternalSolverError> {
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(cnf.to_dimacs().as_bytes())?;
    file.flush()?;
    let exe_name = exe.display().to_string();
    let out = Command::new(exe)
        .arg(file.path())
        .output()
        .map_err(|source| ExternalSolverError::Spawn {
            exe: exe_name.clone(),
            source,
        })?;
    let code = out.status.code().unwrap_or(-1);
    if ![0, 10, 20].contains(&code) {
        return Err(ExternalSolverError::Status {
            exe: exe_name,
            status: code,
        });
    }
    let result = parse_solver_output(&String::from_utf8_lossy(&out.stdout), cnf.num_vars)?;
    if let SolveResult::Sat(m) = &result {
        if !cnf.satisfied_by(m) {
            return Err(ExternalSolverError::BadModel);
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_round_trip() {
        let mut c = Cnf::new(3);
        c.add(vec![1, -2]);
        c.add(vec![3]);
        assert_eq!(parse_dimacs(&c.to_dimacs()).unwrap(), c);
    }

    #[test]
    fn competition_output() {
        let r = parse_solver_output("c hello\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(r, SolveResult::Sat(vec![true, false, true]));
        assert_eq!(parse_solver_output("s UNSATISFIABLE\n", 3).unwrap(), SolveResult::Unsat);
        assert!(parse_solver_output("nothing\n", 3).is_err());
    }
}
