use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ensreach::approx::Mode;
use ensreach::ensemble::{
    check_n1, check_n2, check_s1, check_s2, eigendecompose_continuous, simulate_continuous_pwc, simulate_discrete,
    sup_error_profile, ConditionTolerances, N1Report, N2Report, S1Report, S2Report,
};
use ensreach::synthesis::{
    hermite_decompose, method_s1, method_s2, method_s2_continuous, SynthesisOptions, SynthesisReport, Validation,
};
use ensreach::{InputSequence, PiecewiseConstantInput};
use serde::{Deserialize, Serialize};

use crate::files::{write_profile, InputFile};
use crate::spec::{validation_grid, SystemSpec, TargetSpec, TimeKind};
use crate::{CliError, MethodChoice};

/// Result of a command that ran to completion.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Human-readable summary for stdout.
    pub summary: String,
    /// Set when the command finished but its verdict is negative (exit 1).
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HermiteSummary {
    pub constant: bool,
    pub indices: Option<Vec<usize>>,
    pub reachable: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub samples: usize,
    pub n: usize,
    pub m: usize,
    pub n1: N1Report,
    pub n2: N2Report,
    pub s1: S1Report,
    pub s2: S2Report,
    pub hermite: Option<HermiteSummary>,
    /// `N1 ∧ N2 ∧ (S1 ∨ S2)`.
    pub pass: bool,
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn check(system: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let spec = SystemSpec::load(system)?;
    let sys = spec.evaluate(&spec.grid(None)?)?;
    let tol = ConditionTolerances::default();
    let n1 = check_n1(&sys, &tol);
    let n2 = check_n2(&sys, &tol);
    let s1 = check_s1(&sys, &tol);
    let s2 = check_s2(&sys, &tol);
    let hermite = (sys.input_dim() >= 2).then(|| match hermite_decompose(&sys) {
        Ok(d) => HermiteSummary { constant: true, indices: Some(d.indices), reachable: d.reachable, detail: None },
        Err(e) => HermiteSummary { constant: false, indices: None, reachable: false, detail: Some(e.to_string()) },
    });
    let pass = n1.pass && n2.pass && (s1.pass || s2.pass);

    let mut summary = String::new();
    let _ = writeln!(summary, "samples {}, n = {}, m = {}", sys.len(), sys.state_dim(), sys.input_dim());
    let _ = writeln!(summary, "N1 {}  min sigma_n {:e}", verdict(n1.pass), n1.min_margin());
    let _ = writeln!(summary, "N2 {}  min spectral distance {:e}", verdict(n2.pass), n2.min_distance);
    let _ = writeln!(summary, "S1 {}  coefficient deviation {:e}", verdict(s1.pass), s1.max_deviation);
    let _ = writeln!(summary, "S2 {}  min eigengap {:e}", verdict(s2.pass), s2.min_gap);
    if let Some(h) = &hermite {
        match &h.indices {
            Some(idx) => {
                let _ = writeln!(summary, "hermite indices {idx:?}, reachable {}", h.reachable);
            }
            None => {
                let _ = writeln!(summary, "hermite indices vary along the grid");
            }
        }
    }
    let report = CheckReport {
        samples: sys.len(),
        n: sys.state_dim(),
        m: sys.input_dim(),
        n1,
        n2,
        s1,
        s2,
        hermite,
        pass,
    };
    if let Some(path) = out {
        write_json(path, &report)?;
    }
    let failure = (!pass).then(|| {
        let failed: Vec<&str> = [
            (!report.n1.pass).then_some("check_N1"),
            (!report.n2.pass).then_some("check_N2"),
            (!report.s1.pass && !report.s2.pass).then_some("check_S1 and check_S2"),
        ]
        .into_iter()
        .flatten()
        .collect();
        format!("conditions not satisfied: {}", failed.join(", "))
    });
    Ok(Outcome { summary, failure })
}

/// Report file written next to a synthesized input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisFile {
    pub input: String,
    pub grid_samples: usize,
    pub validation_samples: Option<usize>,
    #[serde(flatten)]
    pub report: SynthesisReport,
}

pub fn synthesize(
    system: &Path,
    target: &Path,
    eps: f64,
    method: MethodChoice,
    mode: Mode,
    grid: Option<usize>,
    out: &Path,
) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let sys_spec = SystemSpec::load(system)?;
    let target_spec = TargetSpec::load(target)?;
    let grid = sys_spec.grid(grid)?;
    let sys = sys_spec.evaluate(&grid)?;
    let f = target_spec.evaluate(&grid, sys_spec.n)?;
    let mut opts = SynthesisOptions::with_mode(mode);
    if let Some(vgrid) = validation_grid(&sys_spec, &target_spec, &grid) {
        opts.validation = Some(Validation {
            system: sys_spec.evaluate(&vgrid)?,
            target: target_spec.evaluate(&vgrid, sys_spec.n)?,
        });
    }
    let validation_samples = opts.validation.as_ref().map(|v| v.target.len());

    let (input, mut report) = match (sys_spec.time, method) {
        (TimeKind::Discrete, MethodChoice::S2ct) => {
            return Err(CliError::Usage("method s2ct needs a continuous-time system".into()));
        }
        (TimeKind::Continuous, MethodChoice::S1 | MethodChoice::S2) => {
            return Err(CliError::Usage("methods s1 and s2 need a discrete-time system".into()));
        }
        (TimeKind::Continuous, _) => {
            let out = method_s2_continuous(&sys, &f, eps, &opts)?;
            (InputFile::from(&out.input), out.report)
        }
        (TimeKind::Discrete, choice) => {
            let use_s1 = match choice {
                MethodChoice::S1 => true,
                MethodChoice::S2 => false,
                _ => check_s1(&sys, &opts.tolerances).pass,
            };
            let out = if use_s1 { method_s1(&sys, &f, eps, &opts)? } else { method_s2(&sys, &f, eps, &opts)? };
            (InputFile::from(&out.input), out.report)
        }
    };
    report.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);

    input.save(out)?;
    let report_path = out.with_extension("report.json");
    let file = SynthesisFile {
        input: out.display().to_string(),
        grid_samples: grid.len(),
        validation_samples,
        report,
    };
    write_json(&report_path, &file)?;

    let r = &file.report;
    let mut summary = String::new();
    let _ = writeln!(summary, "method {} ({:?}), degree {}, {:?}", r.method, r.mode, r.degree, r.horizon);
    let _ = writeln!(summary, "achieved {:e} on {} samples", r.achieved, grid.len());
    if let (Some(v), Some(count)) = (r.validated, validation_samples) {
        let _ = writeln!(summary, "validated {v:e} on {count} samples");
    }
    for w in &r.warnings {
        let _ = writeln!(summary, "warning: {w}");
    }
    let _ = writeln!(summary, "wrote {} and {}", out.display(), report_path.display());
    Ok(Outcome { summary, failure: None })
}

pub fn simulate(
    system: &Path,
    input: &Path,
    target: &Path,
    eps: Option<f64>,
    grid: Option<usize>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    if let Some(e) = eps {
        if !(e > 0.0) {
            return Err(CliError::Usage(format!("--eps must be positive, got {e}")));
        }
    }
    let sys_spec = SystemSpec::load(system)?;
    let target_spec = TargetSpec::load(target)?;
    let input = InputFile::load(input)?;
    let grid = sys_spec.grid(grid)?;
    let sys = sys_spec.evaluate(&grid)?;
    let f = target_spec.evaluate(&grid, sys_spec.n)?;
    let x = match (sys_spec.time, input) {
        (TimeKind::Discrete, InputFile::Discrete(values)) => simulate_discrete(&sys, &InputSequence::scalar(values)?)?,
        (TimeKind::Continuous, InputFile::PiecewiseConstant { tau, values }) => {
            let input = PiecewiseConstantInput::new(tau, values).map_err(|e| CliError::Parse(e.to_string()))?;
            simulate_continuous_pwc(&eigendecompose_continuous(&sys)?, &input)?
        }
        (TimeKind::Discrete, _) => {
            return Err(CliError::Parse("a discrete-time system needs a `t,re,im` input".into()));
        }
        (TimeKind::Continuous, _) => {
            return Err(CliError::Parse("a continuous-time system needs a `tau=` input".into()));
        }
    };
    let profile = sup_error_profile(&x, &f)?;
    let sup = profile.iter().copied().fold(0.0, f64::max);

    let mut summary = String::new();
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_profile(file, &profile, sup).map_err(|e| CliError::Io(e.to_string()))?;
            let _ = writeln!(summary, "sup error {sup:e} on {} samples, profile in {}", profile.len(), path.display());
        }
        None => {
            let mut buf = Vec::new();
            write_profile(&mut buf, &profile, sup).map_err(|e| CliError::Io(e.to_string()))?;
            summary.push_str(&String::from_utf8_lossy(&buf));
        }
    }
    let failure = eps.filter(|e| sup > *e).map(|e| format!("sup error {sup:e} exceeds eps {e:e}"));
    Ok(Outcome { summary, failure })
}
