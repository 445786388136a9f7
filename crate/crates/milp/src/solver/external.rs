use std::env;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use crate::decode::VERIFY_TOLERANCE;
use crate::error::{MilpError, Result};
use crate::lp::{emit_lp, objective_scale};
use crate::model::MilpModel;
use crate::solver::{Assignment, Incumbent, MilpSolver, SolveStatus};

/// Default command template, split on whitespace.
pub const ENV_COMMAND: &str = "JOINOPT_SOLVER_CMD";
/// Solution dialect for [`ENV_COMMAND`]; required when the command is set.
pub const ENV_DIALECT: &str = "JOINOPT_SOLVER_DIALECT";

const MODEL_FILE: &str = "model.lp";
const SOLUTION_FILE: &str = "solution.txt";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionDialect {
    /// `name value` per line; optional `# status <s>` and `# objective <v>`.
    NameValue,
    /// CBC `solu` output: a status line, then `index name value [reduced cost]`.
    CbcStyle,
    /// HiGHS solution files (`Model status`, `# Columns N`, ...).
    HighsStyle,
}

impl SolutionDialect {
    pub fn as_str(self) -> &'static str {
        match self {
            SolutionDialect::NameValue => "name-value",
            SolutionDialect::CbcStyle => "cbc-style",
            SolutionDialect::HighsStyle => "highs-style",
        }
    }
}

impl fmt::Display for SolutionDialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolutionDialect {
    type Err = MilpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "name-value" => Ok(SolutionDialect::NameValue),
            "cbc-style" => Ok(SolutionDialect::CbcStyle),
            "highs-style" => Ok(SolutionDialect::HighsStyle),
            other => Err(MilpError::InvalidArgument(format!(
                "unknown solution dialect '{other}'"
            ))),
        }
    }
}

/// How to run an external solver. The command template is split on
/// whitespace; `{model}`, `{solution}` and `{time_limit}` (seconds) are
/// substituted inside each argument. No shell is involved.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub command_template: String,
    pub dialect: SolutionDialect,
    pub time_limit: Duration,
    pub work_dir: PathBuf,
    /// Extra time granted beyond `time_limit` before the process is killed.
    pub kill_grace: Duration,
}

impl SolverConfig {
    pub fn new(
        command_template: impl Into<String>,
        dialect: SolutionDialect,
        time_limit: Duration,
    ) -> Result<Self> {
        let config = Self {
            command_template: command_template.into(),
            dialect,
            time_limit,
            work_dir: env::temp_dir(),
            kill_grace: Duration::from_secs(2),
        };
        config.validate()?;
        Ok(config)
    }

    /// CBC with its own time limit and `solu` output.
    pub fn cbc(binary: impl AsRef<Path>, time_limit: Duration) -> Result<Self> {
        Self::cbc_with_args(binary, time_limit, &[])
    }

    /// CBC with extra options placed before `solve`, e.g. `["-cuts", "off"]`.
    pub fn cbc_with_args(
        binary: impl AsRef<Path>,
        time_limit: Duration,
        args: &[&str],
    ) -> Result<Self> {
        let bin = binary.as_ref().display().to_string();
        if bin.contains(char::is_whitespace)
            || args
                .iter()
                .any(|a| a.is_empty() || a.contains(char::is_whitespace))
        {
            return Err(MilpError::InvalidArgument(format!(
                "solver path or options contain whitespace: '{bin}' {args:?}"
            )));
        }
        let extra: String = args.iter().map(|a| format!("{a} ")).collect();
        Self::new(
            format!("{bin} {{model}} sec {{time_limit}} {extra}solve solu {{solution}}"),
            SolutionDialect::CbcStyle,
            time_limit,
        )
    }

    /// The configuration named by the environment, if any.
    pub fn from_env(time_limit: Duration) -> Result<Option<Self>> {
        let Ok(cmd) = env::var(ENV_COMMAND) else {
            return Ok(None);
        };
        let dialect = env::var(ENV_DIALECT).map_err(|_| {
            MilpError::InvalidArgument(format!("{ENV_COMMAND} is set but {ENV_DIALECT} is not"))
        })?;
        Self::new(cmd, dialect.parse()?, time_limit).map(Some)
    }

    /// The environment configuration, else a CBC binary on `PATH`, else one
    /// bundled with a Python installation of PuLP.
    pub fn discover(time_limit: Duration) -> Option<Self> {
        if let Ok(Some(c)) = Self::from_env(time_limit) {
            return Some(c);
        }
        find_cbc().and_then(|bin| Self::cbc(bin, time_limit).ok())
    }

    pub fn with_time_limit(mut self, time_limit: Duration) -> Self {
        self.time_limit = time_limit;
        self
    }

    pub fn with_work_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.work_dir = dir.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        for placeholder in ["{model}", "{solution}"] {
            if !self.command_template.contains(placeholder) {
                return Err(MilpError::InvalidArgument(format!(
                    "command template lacks the {placeholder} placeholder"
                )));
            }
        }
        if self.time_limit.is_zero() {
            return Err(MilpError::InvalidArgument(
                "time limit must be positive".into(),
            ));
        }
        Ok(())
    }

    fn arguments(&self, model: &Path, solution: &Path) -> Vec<String> {
        let secs = format!("{:.3}", self.time_limit.as_secs_f64());
        let secs = secs.trim_end_matches('0').trim_end_matches('.');
        self.command_template
            .split_whitespace()
            .map(|arg| {
                arg.replace("{model}", &model.display().to_string())
                    .replace("{solution}", &solution.display().to_string())
                    .replace("{time_limit}", secs)
            })
            .collect()
    }
}

impl MilpSolver for SolverConfig {
    fn solve(&self, model: &MilpModel) -> Assignment {
        solve_external(model, self)
    }

    fn describe(&self) -> String {
        format!(
            "external solver `{}` ({})",
            self.command_template, self.dialect
        )
    }
}

/// A CBC binary on `PATH` or bundled with a PuLP installation.
pub fn find_cbc() -> Option<PathBuf> {
    if let Some(path) = env::var_os("PATH") {
        for dir in env::split_paths(&path) {
            let c = dir.join("cbc");
            if c.is_file() {
                return Some(c);
            }
        }
    }
    for lib in ["/usr/local/lib", "/usr/lib", "/opt/conda/lib"] {
        let Ok(entries) = fs::read_dir(lib) else {
            continue;
        };
        let mut pythons: Vec<PathBuf> = entries
            .flatten()
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .is_some_and(|n| n.to_string_lossy().starts_with("python3"))
            })
            .collect();
        pythons.sort();
        for py in pythons {
            for site in ["dist-packages", "site-packages"] {
                for arch in ["i64", "64"] {
                    let c = py
                        .join(site)
                        .join("pulp/solverdir/cbc/linux")
                        .join(arch)
                        .join("cbc");
                    if c.is_file() {
                        return Some(c);
                    }
                }
            }
        }
    }
    None
}

/// Writes the model, runs the configured solver under its time limit and
/// reads the solution back. Returned values are rounded to integers and
/// re-checked against every constraint; a failed check yields an `Error`
/// status. The work directory is kept only when the status is `Error`.
pub fn solve_external(model: &MilpModel, config: &SolverConfig) -> Assignment {
    let start = Instant::now();
    let fail = |msg: String| Assignment::without_solution(SolveStatus::Error, msg, start.elapsed());
    if let Err(e) = config.validate() {
        return fail(e.to_string());
    }
    let lp = match emit_lp(model) {
        Ok(t) => t,
        Err(e) => return fail(e.to_string()),
    };
    if let Err(e) = fs::create_dir_all(&config.work_dir) {
        return fail(format!("cannot create {}: {e}", config.work_dir.display()));
    }
    let dir = match tempfile::Builder::new()
        .prefix("joinopt-")
        .tempdir_in(&config.work_dir)
    {
        Ok(d) => d,
        Err(e) => return fail(format!("cannot create a work directory: {e}")),
    };
    let mut result = run_in(model, config, dir.path(), &lp, start);
    result.wall_time = start.elapsed();
    if result.status == SolveStatus::Error {
        let kept = dir.keep();
        let msg = result.message.take().unwrap_or_default();
        result.message = Some(format!("{msg} (files kept in {})", kept.display()));
    }
    result
}

fn run_in(
    model: &MilpModel,
    config: &SolverConfig,
    dir: &Path,
    lp: &str,
    start: Instant,
) -> Assignment {
    let fail = |msg: String| Assignment::without_solution(SolveStatus::Error, msg, start.elapsed());
    let model_path = dir.join(MODEL_FILE);
    let solution_path = dir.join(SOLUTION_FILE);
    if let Err(e) = fs::write(&model_path, lp) {
        return fail(format!("cannot write the model: {e}"));
    }
    let args = config.arguments(&model_path, &solution_path);
    let Some((program, rest)) = args.split_first() else {
        return fail("empty solver command".into());
    };
    let mut command = Command::new(program);
    #[cfg(unix)]
    std::os::unix::process::CommandExt::process_group(&mut command, 0);
    let mut child = match command
        .args(rest)
        .current_dir(dir)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return fail(format!("cannot start '{program}': {e}")),
    };

    let launched = Instant::now();
    let (tx, rx) = mpsc::channel::<(Duration, String)>();
    let readers: Vec<_> = [
        child
            .stdout
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
        child
            .stderr
            .take()
            .map(|s| Box::new(s) as Box<dyn Read + Send>),
    ]
    .into_iter()
    .flatten()
    .map(|stream| {
        let tx = tx.clone();
        thread::spawn(move || {
            for line in BufReader::new(stream).lines().map_while(|l| l.ok()) {
                let _ = tx.send((launched.elapsed(), line));
            }
        })
    })
    .collect();
    drop(tx);

    let hard_limit = config.time_limit + config.kill_grace;
    let mut killed = false;
    let exit = loop {
        match child.try_wait() {
            Ok(Some(status)) => break Some(status),
            Ok(None) if launched.elapsed() > hard_limit => {
                kill_group(&mut child);
                let _ = child.wait();
                killed = true;
                break None;
            }
            Ok(None) => thread::sleep(Duration::from_millis(5)),
            Err(e) => return fail(format!("cannot wait for the solver: {e}")),
        }
    };
    for r in readers {
        let _ = r.join();
    }
    let log: Vec<(Duration, String)> = rx.into_iter().collect();
    // the LP objective was scaled; report incumbents in model units
    let scale = objective_scale(model);
    let incumbents: Vec<Incumbent> = parse_incumbents(&log)
        .into_iter()
        .map(|i| Incumbent {
            objective: i.objective / scale,
            ..i
        })
        .collect();
    let tail = || {
        let lines: Vec<&str> = log.iter().rev().take(20).map(|(_, l)| l.as_str()).collect();
        lines.into_iter().rev().collect::<Vec<_>>().join("\n")
    };

    if let Some(status) = exit {
        if !status.success() {
            return fail(format!("solver exited with {status}:\n{}", tail()));
        }
    }
    let text = match fs::read_to_string(&solution_path) {
        Ok(t) => t,
        Err(_) if killed => {
            let mut a = Assignment::without_solution(
                SolveStatus::Timeout,
                format!("solver killed after {:.1}s", hard_limit.as_secs_f64()),
                start.elapsed(),
            );
            a.incumbents = incumbents;
            return a;
        }
        Err(e) => return fail(format!("solver wrote no solution file ({e}):\n{}", tail())),
    };
    let parsed = match parse_solution(config.dialect, &text, model) {
        Ok(p) => p,
        Err(e) => return fail(format!("unparsable solution: {e}")),
    };
    let mut out = finish(model, parsed, start);
    out.incumbents = incumbents;
    out
}

/// Kills the solver together with anything it spawned, so that no
/// grandchild keeps the output pipes open.
fn kill_group(child: &mut std::process::Child) {
    #[cfg(unix)]
    if let Ok(pid) = libc::pid_t::try_from(child.id()) {
        // SAFETY: plain syscall on the group created at spawn time
        unsafe {
            libc::kill(-pid, libc::SIGKILL);
        }
    }
    let _ = child.kill();
}

/// A solution file as read, before verification.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub values: Option<Vec<f64>>,
    pub message: String,
}

fn finish(model: &MilpModel, parsed: ParsedSolution, start: Instant) -> Assignment {
    let ParsedSolution {
        status,
        values,
        message,
    } = parsed;
    let Some(values) = values.filter(|_| status.has_solution()) else {
        let status = if status.has_solution() {
            SolveStatus::Error
        } else {
            status
        };
        return Assignment::without_solution(status, message, start.elapsed());
    };
    let rounded = match model.round_values(&values, 1e-6) {
        Ok(r) => r,
        Err(e) => {
            return Assignment::without_solution(SolveStatus::Error, e.to_string(), start.elapsed())
        }
    };
    if let Some(c) = model.first_violation(&rounded, VERIFY_TOLERANCE) {
        return Assignment::without_solution(
            SolveStatus::Error,
            format!("solver solution violates constraint {}", c.name),
            start.elapsed(),
        );
    }
    Assignment {
        status,
        objective: Some(model.evaluate_objective(&rounded)),
        values: Some(rounded),
        message: Some(message),
        incumbents: Vec::new(),
        wall_time: start.elapsed(),
    }
}

fn number(tok: &str) -> std::result::Result<f64, String> {
    tok.parse::<f64>()
        .map_err(|_| format!("'{tok}' is not a number"))
}

/// Reads a solution file in the given dialect. Variables absent from a CBC
/// file are zero (CBC lists non-zero values only); the other dialects must
/// list every variable.
pub fn parse_solution(
    dialect: SolutionDialect,
    text: &str,
    model: &MilpModel,
) -> std::result::Result<ParsedSolution, String> {
    let mut values: Vec<Option<f64>> = vec![None; model.n_variables()];
    let mut assign = |name: &str, tok: &str| -> std::result::Result<(), String> {
        let i = model
            .var(name)
            .ok_or_else(|| format!("unknown variable '{name}'"))?;
        values[i] = Some(number(tok)?);
        Ok(())
    };
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let (status, message, default_zero) = match dialect {
        SolutionDialect::CbcStyle => {
            let head = lines.next().ok_or("empty solution file")?;
            let lower = head.to_ascii_lowercase();
            let mut any = false;
            for line in lines {
                let toks: Vec<&str> = line.split_whitespace().filter(|t| *t != "**").collect();
                if toks.len() < 3 {
                    return Err(format!("malformed line '{line}'"));
                }
                assign(toks[1], toks[2])?;
                any = true;
            }
            let status = if lower.starts_with("optimal") {
                SolveStatus::Optimal
            } else if lower.contains("infeasible") {
                SolveStatus::Infeasible
            } else if lower.starts_with("stopped") {
                if any && !lower.contains("no integer") {
                    SolveStatus::Feasible
                } else {
                    SolveStatus::Timeout
                }
            } else {
                SolveStatus::Error
            };
            (status, head.to_string(), true)
        }
        SolutionDialect::HighsStyle => {
            let mut model_status = None;
            let mut primal_feasible = false;
            let mut columns = 0usize;
            while let Some(line) = lines.next() {
                if line == "Model status" {
                    model_status = lines.next().map(str::to_string);
                } else if line == "# Primal solution values" {
                    primal_feasible = lines.next() == Some("Feasible");
                } else if let Some(n) = line.strip_prefix("# Columns ") {
                    if columns > 0 {
                        continue;
                    }
                    columns = n
                        .trim()
                        .parse()
                        .map_err(|_| format!("bad column count '{n}'"))?;
                    for _ in 0..columns {
                        let l = lines.next().ok_or("truncated column section")?;
                        let toks: Vec<&str> = l.split_whitespace().collect();
                        if toks.len() < 2 {
                            return Err(format!("malformed column line '{l}'"));
                        }
                        assign(toks[0], toks[1])?;
                    }
                } else if line.starts_with("# Dual solution values") {
                    break;
                }
            }
            let ms = model_status.ok_or("missing model status")?;
            let status = match ms.as_str() {
                "Optimal" => SolveStatus::Optimal,
                "Infeasible" => SolveStatus::Infeasible,
                _ if primal_feasible && columns > 0 => SolveStatus::Feasible,
                s if s.contains("limit") => SolveStatus::Timeout,
                _ => SolveStatus::Error,
            };
            (status, ms, false)
        }
        SolutionDialect::NameValue => {
            let mut status = None;
            let mut any = false;
            for line in lines {
                if let Some(rest) = line.strip_prefix('#') {
                    let toks: Vec<&str> = rest.split_whitespace().collect();
                    if toks.first() == Some(&"status") && toks.len() >= 2 {
                        status = Some(match toks[1] {
                            "optimal" => SolveStatus::Optimal,
                            "feasible" => SolveStatus::Feasible,
                            "infeasible" => SolveStatus::Infeasible,
                            "timeout" => SolveStatus::Timeout,
                            other => return Err(format!("unknown status '{other}'")),
                        });
                    }
                    continue;
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 2 {
                    return Err(format!("malformed line '{line}'"));
                }
                assign(toks[0], toks[1])?;
                any = true;
            }
            let status = status.unwrap_or(if any {
                SolveStatus::Feasible
            } else {
                SolveStatus::Error
            });
            (status, format!("status {status}"), false)
        }
    };
    let values = if status.has_solution() {
        let mut out = Vec::with_capacity(values.len());
        for (i, v) in values.into_iter().enumerate() {
            match v {
                Some(x) => out.push(x),
                None if default_zero => out.push(0.0),
                None => {
                    return Err(format!(
                        "no value for variable '{}'",
                        model.variables()[i].name
                    ))
                }
            }
        }
        Some(out)
    } else {
        None
    };
    Ok(ParsedSolution {
        status,
        values,
        message,
    })
}

/// Improving objective values announced in a solver log, as
/// `Integer solution of X found ... (T seconds)` (CBC) or
/// `incumbent T X`. Times reported by the solver take precedence over the
/// time a line was read.
pub fn parse_incumbents(log: &[(Duration, String)]) -> Vec<Incumbent> {
    let mut out: Vec<Incumbent> = Vec::new();
    for (seen, line) in log {
        let parsed = if let Some(rest) = line.split("Integer solution of ").nth(1) {
            let obj = rest
                .split_whitespace()
                .next()
                .and_then(|t| t.parse::<f64>().ok());
            let secs = line
                .rsplit_once(" seconds)")
                .and_then(|(head, _)| head.rsplit('(').next())
                .and_then(|t| t.trim().parse::<f64>().ok());
            obj.map(|o| (secs.map(Duration::from_secs_f64).unwrap_or(*seen), o))
        } else if let Some(rest) = line.trim().strip_prefix("incumbent ") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            match (
                toks.first().and_then(|t| t.parse::<f64>().ok()),
                toks.get(1).and_then(|t| t.parse::<f64>().ok()),
            ) {
                (Some(t), Some(o)) if t >= 0.0 && t.is_finite() => {
                    Some((Duration::from_secs_f64(t), o))
                }
                _ => None,
            }
        } else {
            None
        };
        if let Some((time, objective)) = parsed {
            if out.last().is_none_or(|l| objective < l.objective) {
                let time = out.last().map_or(time, |l| time.max(l.time));
                out.push(Incumbent { time, objective });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> MilpModel {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        let y = m.add_binary("y").unwrap();
        m.add_constraint("c", vec![(x, 1.0), (y, 1.0)], crate::model::Sense::Ge, 1.0)
            .unwrap();
        m.set_objective(vec![(x, 2.0), (y, 1.0)]).unwrap();
        m
    }

    #[test]
    fn config_validation_and_substitution() {
        assert!(SolverConfig::new(
            "solve {model}",
            SolutionDialect::NameValue,
            Duration::from_secs(1)
        )
        .is_err());
        assert!(SolverConfig::new(
            "s {model} {solution}",
            SolutionDialect::NameValue,
            Duration::ZERO
        )
        .is_err());
        let c = SolverConfig::new(
            "s -m={model} {solution} -t {time_limit}",
            SolutionDialect::NameValue,
            Duration::from_millis(1500),
        )
        .unwrap();
        let args = c.arguments(Path::new("/w/m.lp"), Path::new("/w/s.txt"));
        assert_eq!(args, vec!["s", "-m=/w/m.lp", "/w/s.txt", "-t", "1.5"]);
        let c = c.with_time_limit(Duration::from_millis(1));
        assert_eq!(c.arguments(Path::new("m"), Path::new("s"))[4], "0.001");
        assert_eq!(
            "highs-style".parse::<SolutionDialect>().unwrap(),
            SolutionDialect::HighsStyle
        );
        assert!("glpk".parse::<SolutionDialect>().is_err());
    }

    #[test]
    fn cbc_dialect() {
        let m = toy();
        let p = parse_solution(
            SolutionDialect::CbcStyle,
            "Optimal - objective value 1.00000000\n      1 y  1  1\n",
            &m,
        )
        .unwrap();
        assert_eq!(p.status, SolveStatus::Optimal);
        assert_eq!(p.values, Some(vec![0.0, 1.0]));
        let p = parse_solution(
            SolutionDialect::CbcStyle,
            "Infeasible - objective value 0.00000000\n",
            &m,
        )
        .unwrap();
        assert_eq!(p.status, SolveStatus::Infeasible);
        let p = parse_solution(
            SolutionDialect::CbcStyle,
            "Stopped on time - objective value 2\n 0 x 1 0\n",
            &m,
        )
        .unwrap();
        assert_eq!(p.status, SolveStatus::Feasible);
        let p = parse_solution(
            SolutionDialect::CbcStyle,
            "Stopped on time - no integer solution\n",
            &m,
        )
        .unwrap();
        assert_eq!(p.status, SolveStatus::Timeout);
        assert!(parse_solution(SolutionDialect::CbcStyle, "", &m).is_err());
        assert!(parse_solution(SolutionDialect::CbcStyle, "Optimal\n 0 z 1 0\n", &m).is_err());
    }

    #[test]
    fn highs_dialect() {
        let m = toy();
        let text = "Model status\nOptimal\n\n# Primal solution values\nFeasible\nObjective 1\n# Columns 2\nx 0\ny 1\n# Rows 1\nc 1\n\n# Dual solution values\nNone\n";
        let p = parse_solution(SolutionDialect::HighsStyle, text, &m).unwrap();
        assert_eq!(p.status, SolveStatus::Optimal);
        assert_eq!(p.values, Some(vec![0.0, 1.0]));
        let text = "Model status\nTime limit reached\n\n# Primal solution values\nNone\n";
        assert_eq!(
            parse_solution(SolutionDialect::HighsStyle, text, &m)
                .unwrap()
                .status,
            SolveStatus::Timeout
        );
        let text = "Model status\nInfeasible\n";
        assert_eq!(
            parse_solution(SolutionDialect::HighsStyle, text, &m)
                .unwrap()
                .status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn name_value_dialect() {
        let m = toy();
        let p = parse_solution(
            SolutionDialect::NameValue,
            "# status optimal\nx 0\ny 1\n",
            &m,
        )
        .unwrap();
        assert_eq!(
            (p.status, p.values),
            (SolveStatus::Optimal, Some(vec![0.0, 1.0]))
        );
        assert!(parse_solution(SolutionDialect::NameValue, "x 0\n", &m).is_err());
        assert!(parse_solution(SolutionDialect::NameValue, "x 0 1\n", &m).is_err());
        let p = parse_solution(SolutionDialect::NameValue, "# status infeasible\n", &m).unwrap();
        assert_eq!(p.status, SolveStatus::Infeasible);
    }

    #[test]
    fn verification_rejects_wrong_solutions() {
        let m = toy();
        let bad = ParsedSolution {
            status: SolveStatus::Optimal,
            values: Some(vec![0.0, 0.0]),
            message: String::new(),
        };
        assert_eq!(finish(&m, bad, Instant::now()).status, SolveStatus::Error);
        let near = ParsedSolution {
            status: SolveStatus::Optimal,
            values: Some(vec![1e-8, 0.99999999]),
            message: String::new(),
        };
        let a = finish(&m, near, Instant::now());
        assert_eq!(a.status, SolveStatus::Optimal);
        assert_eq!(a.values, Some(vec![0.0, 1.0]));
        assert_eq!(a.objective, Some(1.0));
    }

    #[test]
    fn incumbent_log_parsing() {
        let s = |t: f64, l: &str| (Duration::from_secs_f64(t), l.to_string());
        let log = vec![
            s(0.5, "Cbc0012I Integer solution of 120 found by DiveCoefficient after 0 iterations and 0 nodes (0.10 seconds)"),
            s(0.6, "noise"),
            s(0.7, "Cbc0004I Integer solution of 130 found after 5 iterations and 2 nodes (0.30 seconds)"),
            s(0.9, "Cbc0004I Integer solution of 90 found after 9 iterations and 4 nodes (0.40 seconds)"),
            s(1.0, "incumbent 2.5 80"),
            s(1.1, "Integer solution of 70 found"),
        ];
        let inc = parse_incumbents(&log);
        let objs: Vec<f64> = inc.iter().map(|i| i.objective).collect();
        assert_eq!(objs, vec![120.0, 90.0, 80.0, 70.0]);
        assert_eq!(inc[0].time, Duration::from_secs_f64(0.10));
        assert_eq!(inc[2].time, Duration::from_secs_f64(2.5));
        assert_eq!(inc[3].time, Duration::from_secs_f64(2.5));
    }

    #[test]
    fn missing_program_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let c = SolverConfig::new(
            "/nonexistent/solver {model} {solution}",
            SolutionDialect::NameValue,
            Duration::from_secs(1),
        )
        .unwrap()
        .with_work_dir(dir.path());
        let a = solve_external(&toy(), &c);
        assert_eq!(a.status, SolveStatus::Error);
        assert!(a.message.unwrap().contains("cannot start"));
    }
}
