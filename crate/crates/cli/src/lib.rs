//! Report type and command implementations behind the `qdetect` binary.
//!
//! Every command returns a [`Report`]; the binary maps `failed == 0` to exit
//! code 0, any failed check to 1, and errors (usage, IO, invalid input) to 2.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_6;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use qdetect::assignment::{assignment_probs, check_c1, joint_distribution, simulation_equalities};
use qdetect::detection::{complement_lemma_check, detects};
use qdetect::ensemble::{check_support_statements, detection_frequency_audit, sample_ensemble_with_workers};
use qdetect::observables::commutes;
use qdetect::scenarios::{build_ghsz, load_scenario, verify_ghsz, verify_mixture_counterexample};
use qdetect::{Error, Projection, Result, Tolerance};

/// Exit code for a report with at least one failed check.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for usage, IO and validation errors.
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_THETA: f64 = FRAC_PI_6;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_Z: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub reference: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            checks: Vec::new(),
            summary: Summary::default(),
            notes: Vec::new(),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, residual: f64, reference: &str) -> &mut Self {
        self.checks.push(Check {
            name: name.into(),
            pass,
            residual,
            reference: reference.into(),
        });
        if pass {
            self.summary.passed += 1;
        } else {
            self.summary.failed += 1;
        }
        self
    }

    pub fn note(&mut self, note: impl Into<String>) -> &mut Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            EXIT_CHECK_FAILED
        }
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        }
    }

    fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "pass", "residual", "reference"])
            .expect("in-memory write");
        for c in &self.checks {
            w.write_record([
                c.name.as_str(),
                if c.pass { "true" } else { "false" },
                &format!("{:e}", c.residual),
                &c.reference,
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.command);
        for (k, v) in &self.inputs {
            out += &format!("  {k} = {v}\n");
        }
        for c in &self.checks {
            out += &format!(
                "[{}] {}  (residual {:.3e}; {})\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.reference
            );
        }
        for n in &self.notes {
            out += &format!("note: {n}\n");
        }
        out + &format!("{} passed, {} failed\n", self.summary.passed, self.summary.failed)
    }
}

fn tol_inputs(report: &mut Report, tol: &Tolerance) {
    report.input("tol", tol.atol()).input("eig_cut", tol.eig_cut());
}

/// Builds the four-qubit no-go scenario and checks every claim, the validity
/// of the state and projections at `tol`, and the contradiction among the
/// induced outcome constraints.
pub fn cmd_ghsz(tol: &Tolerance) -> Result<Report> {
    let scn = build_ghsz()?;
    let mut r = Report::new("ghsz");
    tol_inputs(&mut r, tol);
    let bound = tol.scaled(scn.dim());

    let trace_defect = (scn.state().matrix().trace() - qdetect::C64::new(1.0, 0.0)).norm();
    r.check(
        "Tr(rho0) = 1",
        trace_defect <= bound,
        trace_defect,
        "state normalization",
    );
    let herm = scn.state().matrix().hermiticity_defect();
    r.check("rho0 Hermitian", herm <= bound, herm, "state validity");
    for p in scn.observables() {
        let m = p.matrix();
        let idem = m.mul(m)?.dist(m)?;
        r.check(
            format!("{}^2 = {}", p.name(), p.name()),
            idem <= bound,
            idem,
            "projection validity",
        );
    }

    let report = verify_ghsz(&scn, tol)?;
    for o in &report.outcomes {
        let reference = match o.kind {
            "commute" => "co-measurability of the pair",
            "detect" => "detection in rho0",
            _ => "sign constraints forced by identifying detection with measurement",
        };
        r.check(o.label.clone(), o.pass, o.residual, reference);
        if let (Some(s), Some(t)) = (o.satisfying, o.total) {
            r.input("satisfying_assignments", s).input("total_assignments", t);
        }
    }
    r.input("max_residual", report.max_residual);
    r.check(
        "identification of detected and measured outcomes is inconsistent",
        report.identification_inconsistent,
        report.max_residual,
        "no-go conclusion",
    );
    Ok(r)
}

/// Detection check for `t` and `e` in the scenario state, with the complement
/// lemma and the conditional-statistics equalities for every other observable
/// commuting with both.
pub fn cmd_detect(path: &Path, t_name: &str, e_name: &str, tol: &Tolerance) -> Result<Report> {
    let scn = load_scenario(path, tol)?;
    let (t, e) = (scn.observable(t_name)?, scn.observable(e_name)?);
    let mut r = Report::new("detect");
    tol_inputs(&mut r, tol);
    r.input("scenario", path.display().to_string())
        .input("t", t.name())
        .input("e", e.name());

    let check = detects(t, e, scn.state(), tol)?;
    r.check(
        format!("[{},{}] = 0", t.name(), e.name()),
        check.commutes,
        check.commutation_defect,
        "co-measurability",
    );
    r.check(
        format!("{} detects {}", t.name(), e.name()),
        check.holds,
        check.residual(),
        "E rho = T rho with [T,E] = 0",
    );
    r.input("discord_10", check.discord_10)
        .input("discord_01", check.discord_01)
        .input("trace_rho_t", check.trace_rho_t);
    if let Some(n) = check.note() {
        r.note(n);
    }

    match complement_lemma_check(t, e, scn.state(), tol) {
        Ok(_) => r.check("complements detect iff the pair does", true, 0.0, "complement lemma"),
        Err(Error::LemmaViolation { .. }) => {
            r.check("complements detect iff the pair does", false, 1.0, "complement lemma")
        }
        Err(err) => return Err(err),
    };

    if check.holds {
        let mut others = Vec::new();
        for f in scn.observables() {
            if f.name() != t.name()
                && f.name() != e.name()
                && commutes(f.matrix(), t.matrix(), tol)?
                && commutes(f.matrix(), e.matrix(), tol)?
            {
                others.push(f);
            }
        }
        for s in simulation_equalities(t, e, scn.state(), &others, tol)? {
            let residual = s
                .outcome_one_residual
                .unwrap_or(0.0)
                .max(s.outcome_zero_residual.unwrap_or(0.0));
            r.check(
                format!(
                    "P({}|{}) = P({}|{}) and on outcome 0",
                    s.observable,
                    t.name(),
                    s.observable,
                    e.name()
                ),
                s.holds,
                residual,
                "detector simulates the conditional statistics",
            );
        }
        if others.is_empty() {
            r.note("no other observable commutes with both; no conditional equalities to check");
        }
    }
    Ok(r)
}

/// Two-dimensional counterexample: the consistency condition must fail for
/// both pure components and hold for their mixture. Those expected failures
/// count as passes.
pub fn cmd_mixture(theta: f64, tol: &Tolerance) -> Result<Report> {
    let m = verify_mixture_counterexample(theta, tol)?;
    let mut r = Report::new("mixture");
    tol_inputs(&mut r, tol);
    r.input("theta", theta);
    for (o, want_hold) in [(&m.rho1, false), (&m.rho2, false), (&m.mixture, true)] {
        let verb = if want_hold { "holds" } else { "fails (expected)" };
        r.check(
            format!("Tr({0} F) = p(E&F) + p(E'&F) {verb} for {0}", o.state),
            o.holds == want_hold,
            o.residual,
            "consistency of assignment probabilities",
        );
        let dev = (o.residual - o.expected_residual).abs();
        r.check(
            format!("residual for {} matches closed form", o.state),
            dev <= m.bound,
            dev,
            "closed-form residual",
        );
        r.input(&format!("{}_tr_rho_f", o.state), o.tr_rho_f)
            .input(&format!("{}_p_e_and_f", o.state), o.p_e_and_f)
            .input(&format!("{}_p_eprime_and_f", o.state), o.p_eprime_and_f);
    }
    r.input("cross_term", m.cross_term);
    if !m.pattern_matched {
        r.note("expected failure pattern not matched; theta must lie strictly between 0 and pi/4 (mod pi/2)");
    }
    Ok(r)
}

/// Consistency condition for `E` jointly with `F` in the scenario state, plus
/// reduction to ordinary joint probabilities when the two commute.
pub fn cmd_c3(path: &Path, e_name: &str, f_name: &str, tol: &Tolerance) -> Result<Report> {
    let scn = load_scenario(path, tol)?;
    let (e, f) = (scn.observable(e_name)?, scn.observable(f_name)?);
    let mut r = Report::new("c3");
    tol_inputs(&mut r, tol);
    r.input("scenario", path.display().to_string())
        .input("e", e.name())
        .input("f", f.name());
    let ap = assignment_probs(e, f, scn.state(), tol)?;
    r.input("p_e_and_f", ap.p_e_and_f)
        .input("p_eprime_and_f", ap.p_eprime_and_f)
        .input("tr_rho_f", ap.tr_rho_f);
    let bound = tol.scaled(scn.dim());
    r.check(
        format!("Tr(rho {0}) = p({1}&{0}) + p({1}'&{0})", f.name(), e.name()),
        ap.c3_residual <= bound,
        ap.c3_residual,
        "consistency of assignment probabilities",
    );
    if commutes(e.matrix(), f.matrix(), tol)? {
        let c1 = check_c1(e, f, scn.state(), tol)?;
        r.check(
            "commuting pair: assignment probabilities are joint probabilities",
            c1.pass,
            c1.residual,
            "reduction for commuting pairs",
        );
    } else {
        r.note(format!("{} and {} do not commute", e.name(), f.name()));
    }
    Ok(r)
}

#[derive(Clone, Debug)]
pub struct SimulateOptions {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    pub z: f64,
    /// Defaults to `<scenario stem>.ensemble.csv` beside the scenario file.
    pub csv: Option<PathBuf>,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            z: DEFAULT_Z,
            csv: None,
        }
    }
}

pub fn default_csv_path(scenario: &Path) -> PathBuf {
    let stem = scenario
        .file_stem()
        .map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
    scenario.with_file_name(format!("{stem}.ensemble.csv"))
}

/// Samples an ensemble for a commuting family, writes it as CSV and checks the
/// support statements plus zero discordance for every detecting pair in the
/// family.
pub fn cmd_simulate(path: &Path, family: &[String], opts: &SimulateOptions, tol: &Tolerance) -> Result<Report> {
    if opts.samples == 0 {
        return Err(Error::Precondition("--samples must be at least 1".into()));
    }
    if family.is_empty() {
        return Err(Error::Precondition("family must name at least one observable".into()));
    }
    let scn = load_scenario(path, tol)?;
    let obs: Vec<&Projection> = family.iter().map(|n| scn.observable(n)).collect::<Result<_>>()?;
    let dist = joint_distribution(&obs, scn.state(), tol)?;
    let ens = sample_ensemble_with_workers(&dist, scn.state().name(), opts.samples, opts.seed, opts.workers)?;
    let csv_path = opts.csv.clone().unwrap_or_else(|| default_csv_path(path));
    ens.save_csv(&csv_path)?;

    let mut r = Report::new("simulate");
    tol_inputs(&mut r, tol);
    let names: Vec<&str> = obs.iter().map(|p| p.name()).collect();
    r.input("scenario", path.display().to_string())
        .input("family", json!(names))
        .input("samples", opts.samples)
        .input("seed", opts.seed)
        .input("z", opts.z)
        .input("csv", csv_path.display().to_string());

    let mut orthogonal = Vec::new();
    let bound = tol.scaled(scn.dim());
    for (i, a) in obs.iter().enumerate() {
        for b in &obs[i + 1..] {
            if a.matrix().mul(b.matrix())?.max_abs() <= bound {
                orthogonal.push((a.name(), b.name()));
            }
        }
    }
    let support = check_support_statements(&ens, &dist, opts.z, &orthogonal)?;
    r.check(
        "extensions partition the ensemble",
        support.partition_holds,
        0.0,
        "support extensions",
    );
    for a in &support.atoms {
        let label: String = a.outcome.iter().map(u8::to_string).collect();
        let dev = if a.sigma > 0.0 {
            (a.count as f64 - a.expected).abs() / a.sigma
        } else {
            a.count as f64
        };
        r.check(
            format!(
                "frequency of outcome {label} within {} sigma of {:.6}",
                opts.z, a.probability
            ),
            a.within,
            dev,
            "sampling from the joint outcome distribution",
        );
        if let Some(nonempty) = a.nonempty {
            r.check(
                format!("outcome {label} occurs"),
                nonempty,
                0.0,
                "nonempty extension for positive probability",
            );
        }
    }
    for o in &support.orthogonal {
        r.check(
            format!("no record with {} = {} = 1", o.f, o.g),
            o.both_one == 0,
            o.both_one as f64,
            "mutually exclusive outcomes",
        );
    }
    for (i, t) in obs.iter().enumerate() {
        for e in &obs[i + 1..] {
            if detects(t, e, scn.state(), tol)?.holds {
                let (discordant, concordant) = detection_frequency_audit(t.name(), e.name(), &ens)?;
                r.input(&format!("concordant_{}_{}", t.name(), e.name()), concordant);
                r.check(
                    format!("{} and {} never disagree", t.name(), e.name()),
                    discordant == 0,
                    discordant as f64,
                    "perfect correlation of a detection pair",
                );
            }
        }
    }
    Ok(r)
}
