//! Batch jobs: JSON configuration in, a versioned report document out.
//!
//! A job is one of `dims`, `defo`, `gaudin`, `spectral` or `audit`. Every
//! report carries the tool version, the seed, an echo of the parsed
//! configuration, and a list of checks, each with the formula it evaluates.
//! Reports are deterministic: the same configuration and version produce the
//! same bytes.

use std::fmt;

use num_traits::{Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::{json, Value};

use crate::curve::MarkedCurve;
use crate::defo::{analyze, FramedHiggsModel, HyperDims};
use crate::dims::{consistency_audit, fiber_formula, DimReport, FramingDims};
use crate::error::{invalid, Error, Result};
use crate::exact::{parse_q, Q};
use crate::gaudin::{commutativity_check, conjugate_residues, gaudin_flow, hitchin_map, negative_control, FlowOptions};
use crate::lie::{check_invariance, group_data, Framing, FramingKind, FramingSpec, GroupId, InvariantForm, LieAlgebra};
use crate::linalg::Matrix;
use crate::random::{RationalSampler, DEFAULT_HEIGHT};
use crate::spectral::{matrix_discriminant, spectral_data, spectral_genus, torsor_fiber_report};

/// Version of the report layout; bumped on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

/// A rational read from JSON as an integer or a string such as `"-7/2"`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rational(pub Q);

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational number such as 3, \"-7/2\" or \"0.25\"")
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
                Ok(Rational(crate::exact::q(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
                Ok(Rational(Q::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
                parse_q(v).map(Rational).ok_or_else(|| E::invalid_value(de::Unexpected::Str(v), &self))
            }
        }
        d.deserialize_any(V)
    }
}

/// Square matrix given by rows.
pub type MatrixInput = Vec<Vec<Rational>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Dims,
    Defo,
    Gaudin,
    Spectral,
    Audit,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Dims => "dims",
            Subcommand::Defo => "defo",
            Subcommand::Gaudin => "gaudin",
            Subcommand::Spectral => "spectral",
            Subcommand::Audit => "audit",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Framing subalgebra selector at one marked point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Selector {
    Trivial,
    Torus,
    /// Basis matrices of `h_x`.
    Custom(Vec<MatrixInput>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted relative drift of a conserved quantity along a flow.
    #[serde(default = "default_drift")]
    pub flow_drift: f64,
}

fn default_drift() -> f64 {
    1e-8
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { flow_drift: default_drift() }
    }
}

/// Which principal-part coefficient generates the flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    /// Index of the invariant polynomial, zero-based. Defaults to the first
    /// invariant of degree at least 2, since a linear one generates a
    /// stationary flow.
    #[serde(default)]
    pub invariant: Option<usize>,
    /// Marked point, zero-based.
    #[serde(default)]
    pub site: usize,
    /// Pole order, `1..=degree`.
    #[serde(default = "one")]
    pub order: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integrator {
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_record")]
    pub record_every: usize,
    #[serde(default = "default_generator")]
    pub generator: Generator,
}

fn default_t_end() -> f64 {
    1.0
}
fn default_steps() -> usize {
    10_000
}
fn default_record() -> usize {
    1000
}
fn default_generator() -> Generator {
    Generator { invariant: None, site: 0, order: 1 }
}

/// Parameter grid for `dims` jobs (trivial framing at every point).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub groups: Vec<String>,
    pub genus: Vec<i64>,
    pub n: Vec<i64>,
}

fn default_height() -> i64 {
    DEFAULT_HEIGHT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub subcommand: Subcommand,
    /// `sl(2)`, `gl3`, `sp(4)`, `G2`, ...; unused by grid jobs.
    #[serde(default)]
    pub group: Option<String>,
    #[serde(default)]
    pub genus: i64,
    /// Marked points on the rational curve (model jobs).
    #[serde(default)]
    pub points: Vec<Rational>,
    /// Number of marked points for `dims` jobs without explicit points.
    #[serde(default)]
    pub n: Option<i64>,
    /// One selector per point, or a single selector used at every point.
    /// Empty means trivial framing.
    #[serde(default)]
    pub framing: Vec<Selector>,
    /// Residue matrices `A_i`; when absent they are drawn from `seed`.
    #[serde(default)]
    pub residues: Option<Vec<MatrixInput>>,
    #[serde(default)]
    pub seed: u64,
    /// Height bound of random rationals.
    #[serde(default = "default_height")]
    pub height: i64,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub integrator: Option<Integrator>,
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Further random residue tuples for the commutativity check.
    #[serde(default)]
    pub extra_points: usize,
    /// Emit the pairing and Poisson matrices in `defo` reports.
    #[serde(default)]
    pub include_matrices: bool,
}

/// Parses a configuration, naming the offending field and position on error.
pub fn parse_config(text: &str) -> Result<JobConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            Error::Invalid(format!("config: {inner}"))
        } else {
            Error::Invalid(format!("config field `{path}`: {inner}"))
        }
    })
}

/// One verified (or reported) statement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportCheck {
    pub name: String,
    /// Formula or oracle the check evaluates.
    pub provenance: String,
    /// Report-only checks never change the exit code.
    pub asserted: bool,
    pub passed: bool,
    pub detail: String,
}

impl ReportCheck {
    fn new(
        name: impl Into<String>,
        provenance: impl Into<String>,
        asserted: bool,
        passed: bool,
        detail: impl Into<String>,
    ) -> Self {
        ReportCheck { name: name.into(), provenance: provenance.into(), asserted, passed, detail: detail.into() }
    }

    fn from_dim(prefix: &str, c: &crate::dims::Check) -> Self {
        ReportCheck::new(
            format!("{prefix}{}", c.name),
            c.provenance.clone(),
            c.asserted,
            c.passed,
            format!("lhs = {}, rhs = {}", c.lhs, c.rhs),
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub subcommand: Subcommand,
    pub seed: u64,
    pub config: JobConfig,
    pub passed: bool,
    pub failed_checks: Vec<String>,
    pub checks: Vec<ReportCheck>,
    pub result: Value,
    /// Flat rows for CSV output of grid jobs.
    #[serde(skip)]
    pub rows: Option<Vec<Vec<String>>>,
}

impl Report {
    /// 0 when every asserted check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.render_csv(),
        }
    }

    fn render_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::Internal(e.to_string());
        match &self.rows {
            Some(rows) => {
                w.write_record(GRID_COLUMNS).map_err(err)?;
                for r in rows {
                    w.write_record(r).map_err(err)?;
                }
            }
            None => {
                w.write_record(["name", "asserted", "passed", "detail", "provenance"]).map_err(err)?;
                for c in &self.checks {
                    w.write_record([&c.name, &c.asserted.to_string(), &c.passed.to_string(), &c.detail, &c.provenance])
                        .map_err(err)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

const GRID_COLUMNS: [&str; 11] = [
    "group",
    "genus",
    "n",
    "dim_moduli_higgs",
    "hitchin_base_dim",
    "fiber_dim",
    "relatively_framed_fiber_dim",
    "dim_moduli_framed",
    "framed_discrepancy",
    "two_dim_center",
    "asserted_checks_passed",
];

/// Exit code for an error raised while running a job: invalid input is 2,
/// an internal identity failure is 1.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Internal(_) => 1,
        _ => 2,
    }
}

/// Runs a job and assembles its report.
pub fn run(config: &JobConfig) -> Result<Report> {
    if config.height < 1 {
        return invalid("config field `height`: must be at least 1");
    }
    let (result, checks, rows) = match config.subcommand {
        Subcommand::Dims => dims_job(config)?,
        Subcommand::Defo => {
            let m = build_model(config)?;
            let (v, c) = defo_section(&m, config.include_matrices)?;
            (v, c, None)
        }
        Subcommand::Gaudin => {
            let m = build_model(config)?;
            let (v, c) = gaudin_section(&m, config)?;
            (v, c, None)
        }
        Subcommand::Spectral => {
            let m = build_model(config)?;
            let (v, c) = spectral_section(&m)?;
            (v, c, None)
        }
        Subcommand::Audit => {
            let (v, c) = audit_job(config)?;
            (v, c, None)
        }
    };
    let failed_checks: Vec<String> =
        checks.iter().filter(|c| c.asserted && !c.passed).map(|c| c.name.clone()).collect();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: "hfb".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: config.subcommand,
        seed: config.seed,
        config: config.clone(),
        passed: failed_checks.is_empty(),
        failed_checks,
        checks,
        result,
        rows,
    })
}

fn parse_group(s: &str, field: &str) -> Result<GroupId> {
    s.parse().map_err(|e: Error| Error::Invalid(format!("config field `{field}`: {e}")))
}

fn config_group(config: &JobConfig) -> Result<GroupId> {
    let g = config.group.as_deref().ok_or_else(|| Error::Invalid("config field `group` is required".into()))?;
    parse_group(g, "group")
}

fn to_matrix(m: &MatrixInput, size: usize, what: &str) -> Result<Matrix> {
    if m.len() != size || m.iter().any(|r| r.len() != size) {
        return Err(Error::Shape(format!("{what} must be a {size}x{size} matrix")));
    }
    Ok(Matrix::from_rows(m.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect()))
}

fn selectors(config: &JobConfig, n: usize) -> Result<Vec<Selector>> {
    match config.framing.len() {
        0 => Ok(vec![Selector::Trivial; n]),
        1 => Ok(vec![config.framing[0].clone(); n]),
        k if k == n => Ok(config.framing.clone()),
        k => invalid(format!("config field `framing`: {k} selectors for {n} marked points")),
    }
}

fn framing_spec(alg: &LieAlgebra, form: &InvariantForm, sel: &[Selector]) -> Result<FramingSpec> {
    let mut points = Vec::with_capacity(sel.len());
    for (i, s) in sel.iter().enumerate() {
        let kind = match s {
            Selector::Trivial => FramingKind::Trivial,
            Selector::Torus => FramingKind::Torus,
            Selector::Custom(b) => FramingKind::Custom(
                b.iter()
                    .enumerate()
                    .map(|(j, m)| to_matrix(m, alg.size(), &format!("framing[{i}].custom[{j}]")))
                    .collect::<Result<_>>()?,
            ),
        };
        points.push(
            Framing::new(alg, form, kind).map_err(|e| Error::Invalid(format!("config field `framing[{i}]`: {e}")))?,
        );
    }
    Ok(FramingSpec { points, dim_z_h: None })
}

/// The explicit model described by a configuration.
pub fn build_model(config: &JobConfig) -> Result<FramedHiggsModel> {
    let id = config_group(config)?;
    if config.genus != 0 {
        return invalid("config field `genus`: explicit models live on the rational curve; genus must be 0");
    }
    if config.points.is_empty() {
        return invalid("config field `points`: at least one marked point is required");
    }
    let alg = LieAlgebra::new(id)?;
    let form = InvariantForm::trace(id);
    let curve = MarkedCurve::rational(config.points.iter().map(|p| p.0.clone()).collect())?;
    let n = curve.n();
    let framing = framing_spec(&alg, &form, &selectors(config, n)?)?;
    match &config.residues {
        Some(rs) => {
            if rs.len() != n {
                return Err(Error::Shape(format!(
                    "config field `residues`: {} matrices for {n} marked points",
                    rs.len()
                )));
            }
            let mats = rs
                .iter()
                .enumerate()
                .map(|(i, m)| to_matrix(m, alg.size(), &format!("residues[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            FramedHiggsModel::new(alg, form, curve, framing, mats)
        }
        None => {
            FramedHiggsModel::random(alg, form, curve, framing, &mut RationalSampler::new(config.seed, config.height))
        }
    }
}

type Section = (Value, Vec<ReportCheck>);
/// Grid and single-case dimension jobs also yield CSV rows.
type DimsSection = (Value, Vec<ReportCheck>, Option<Vec<Vec<String>>>);

fn to_json<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Internal(e.to_string()))
}

fn grid_row(r: &DimReport, two_center: i64) -> Vec<String> {
    vec![
        r.group.to_string(),
        r.genus.to_string(),
        r.n.to_string(),
        r.dim_moduli_higgs.to_string(),
        r.hitchin_base_dim.to_string(),
        r.fiber_dim.to_string(),
        r.relatively_framed_fiber_dim.to_string(),
        r.dim_moduli_framed.to_string(),
        r.framed_discrepancy.to_string(),
        two_center.to_string(),
        r.passed().to_string(),
    ]
}

fn dims_job(config: &JobConfig) -> Result<DimsSection> {
    if let Some(grid) = &config.grid {
        let mut tuples = Vec::new();
        for (gi, gs) in grid.groups.iter().enumerate() {
            let id = parse_group(gs, &format!("grid.groups[{gi}]"))?;
            for &g in &grid.genus {
                for &n in &grid.n {
                    if n < 1 {
                        return invalid("config field `grid.n`: entries must be at least 1");
                    }
                    tuples.push((id, g, n));
                }
            }
        }
        // fan out over tuples; results come back in tuple order
        let workers = std::thread::available_parallelism().map_or(1, |w| w.get()).min(tuples.len().max(1));
        let chunk = tuples.len().div_ceil(workers).max(1);
        let audited: Vec<Result<DimReport>> = std::thread::scope(|sc| {
            let handles: Vec<_> = tuples
                .chunks(chunk)
                .map(|part| {
                    sc.spawn(move || {
                        part.iter()
                            .map(|&(id, g, n)| consistency_audit(id, g, n, &FramingDims::trivial(n as usize)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("grid worker panicked")).collect()
        });
        let mut reports = Vec::new();
        let mut checks = Vec::new();
        let mut rows = Vec::new();
        for (r, &(id, g, n)) in audited.into_iter().zip(&tuples) {
            let r = r?;
            let prefix = format!("{id} g={g} n={n}: ");
            checks.extend(r.checks.iter().map(|c| ReportCheck::from_dim(&prefix, c)));
            rows.push(grid_row(&r, 2 * group_data(id)?.dim_center_alg as i64));
            reports.push(r);
        }
        return Ok((json!({ "cases": to_json(&reports)? }), checks, Some(rows)));
    }
    let id = config_group(config)?;
    let n = match (config.n, config.points.len()) {
        (Some(n), 0) => n,
        (Some(n), k) if n == k as i64 => n,
        (None, k) if k > 0 => k as i64,
        (None, _) => return invalid("config field `n`: give `n` or the marked `points`"),
        (Some(n), k) => return invalid(format!("config field `n`: n = {n} but {k} points are listed")),
    };
    if n < 1 {
        return invalid("config field `n`: the divisor D must be nonempty (n >= 1)");
    }
    let sel = selectors(config, n as usize)?;
    let framing = if sel.iter().all(|s| *s == Selector::Trivial) {
        FramingDims::trivial(n as usize)
    } else {
        let alg = LieAlgebra::new(id)?;
        let form = InvariantForm::trace(id);
        FramingDims::from_spec(&alg, &framing_spec(&alg, &form, &sel)?)
    };
    let r = consistency_audit(id, config.genus, n, &framing)?;
    let checks = r.checks.iter().map(|c| ReportCheck::from_dim("", c)).collect();
    let two_center = 2 * group_data(id)?.dim_center_alg as i64;
    Ok((to_json(&r)?, checks, Some(vec![grid_row(&r, two_center)])))
}

fn matrix_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
}

fn euler_check(label: &str, d: &HyperDims) -> ReportCheck {
    ReportCheck::new(
        format!("euler_characteristic_{label}"),
        "h0 - h1 + h2 = chi(F0) - chi(F1), chi(F) = deg F + rank F (1 - g)",
        true,
        d.euler == d.expected_euler,
        format!("h = ({}, {}, {}), chi = {}, expected {}", d.h0, d.h1, d.h2, d.euler, d.expected_euler),
    )
}

/// Hypercohomology, the pairing `Φ`, and the forgetful-map identity.
pub fn defo_section(model: &FramedHiggsModel, include_matrices: bool) -> Result<Section> {
    let r = analyze(model)?;
    let mut checks =
        vec![euler_check("D", &r.d), euler_check("C_prime", &r.c_prime), euler_check("C_prime_dual", &r.c_dual)];
    let rank = r.phi.rank();
    checks.push(ReportCheck::new("phi_skew", "Phi(a, b) = -Phi(b, a) on H^1(D)", true, r.phi.is_skew(), ""));
    let nondeg_expected = r.d.h0 == 0 && r.d.h2 == 0;
    checks.push(ReportCheck::new(
        "phi_nondegenerate",
        "rank Phi = dim H^1(D) when H^0(D) = H^2(D) = 0",
        nondeg_expected,
        rank == r.d.h1,
        format!("rank {rank} of {}", r.d.h1),
    ));
    let mut identity = Value::Null;
    match r.poisson_identity() {
        Ok(t) => {
            checks.push(ReportCheck::new(
                "forgetful_poisson_identity",
                "d(phi) Phi^{-1} d(phi)^* = P = R S^{-T}",
                true,
                t.holds,
                format!("max |residual| = {}", t.residual.max_abs()),
            ));
            checks.push(ReportCheck::new(
                "dual_forgetful_is_adjoint",
                "Phi(J a, b) = S(a, d(phi) b)",
                true,
                t.adjunction_holds,
                "",
            ));
            checks.push(ReportCheck::new(
                "negative_control_sign_flip",
                "residual with d(phi)^* replaced by -d(phi)^* is nonzero unless P = 0",
                false,
                !t.corrupted_residual.is_zero() || r.poisson.as_ref().is_some_and(Matrix::is_zero),
                format!("max |corrupted residual| = {}", t.corrupted_residual.max_abs()),
            ));
            identity = json!({ "residual_max_abs": t.residual.max_abs().to_string(),
                          "corrupted_residual_max_abs": t.corrupted_residual.max_abs().to_string() });
        }
        Err(e) => checks.push(ReportCheck::new(
            "forgetful_poisson_identity",
            "d(phi) Phi^{-1} d(phi)^* = P = R S^{-T}",
            false,
            false,
            format!("not applicable: {e}"),
        )),
    }
    if r.poisson.is_some() {
        checks.push(ReportCheck::new("poisson_skew", "<P a, b> + <P b, a> = 0", true, r.poisson_is_skew(), ""));
    }
    let mut v = json!({
        "framed": to_json(&r.d)?,
        "twisted": to_json(&r.c_prime)?,
        "twisted_dual": to_json(&r.c_dual)?,
        "phi_rank": rank,
        "poisson_rank": r.poisson.as_ref().map(Matrix::rank),
        "identity": identity,
    });
    if include_matrices {
        v["phi"] = to_json(&matrix_strings(&r.phi))?;
        v["forgetful"] = to_json(&matrix_strings(&r.forget))?;
        v["poisson"] = to_json(&r.poisson.as_ref().map(matrix_strings))?;
    }
    Ok((v, checks))
}

/// Hitchin coefficients, pairwise brackets, and an optional flow.
pub fn gaudin_section(model: &FramedHiggsModel, config: &JobConfig) -> Result<Section> {
    let mut sampler = RationalSampler::new(config.seed.wrapping_add(1), config.height);
    let point = hitchin_map(model)?;
    let mut checks = Vec::new();
    let g = sampler.invertible(model.alg.size());
    let conj = conjugate_residues(&model.residues, &g)?;
    let moved = crate::gaudin::HitchinSystem::for_model(model)?.evaluate(&conj)?;
    checks.push(ReportCheck::new(
        "hitchin_map_conjugation_invariant",
        "p_k(g theta g^{-1}) = p_k(theta)",
        true,
        moved.coords == point.coords,
        "",
    ));
    let mut v = json!({ "hitchin_point": to_json(&point)? });
    if model.curve.n() >= 2 {
        let rep = commutativity_check(model, config.extra_points, &mut sampler)?;
        checks.push(ReportCheck::new(
            "hitchin_coefficients_commute",
            "{H_a, H_b} = sum_i sigma(A_i, [grad_i H_a, grad_i H_b]) = 0",
            true,
            rep.all_zero(),
            format!(
                "{} pairs at {} residue tuple(s), max |bracket| = {}",
                rep.pairs_checked, rep.points_checked, rep.max_abs
            ),
        ));
        let neg = negative_control(model, &mut sampler)?;
        checks.push(ReportCheck::new(
            "negative_control_linear_probe",
            "{H_a, sigma(B, A_1)} for random B is generically nonzero",
            false,
            !neg.is_zero(),
            format!("max |bracket| = {neg}"),
        ));
        v["commutativity"] = to_json(&rep)?;
        v["negative_control_max_abs"] = Value::String(neg.to_string());
    }
    if let Some(it) = &config.integrator {
        let opts = FlowOptions {
            t_end: it.t_end,
            steps: it.steps,
            tolerance: f64::INFINITY,
            float_mode: true,
            record_every: it.record_every.max(1),
        };
        let gen = &it.generator;
        let k = match gen.invariant {
            Some(k) => k,
            None => group_data(model.alg.id())?.degrees.iter().position(|&d| d >= 2).unwrap_or(0),
        };
        let flow = gaudin_flow(model, k, gen.site, gen.order, &opts)?;
        checks.push(ReportCheck::new(
            "flow_conserves_hitchin_coefficients",
            "max_t |c(t) - c(0)| / |c(0)| below the drift tolerance (RK4)",
            true,
            flow.max_drift < config.tolerances.flow_drift,
            format!("max drift {:e}, tolerance {:e}", flow.max_drift, config.tolerances.flow_drift),
        ));
        v["flow"] = to_json(&flow)?;
        v["flow_generator"] = json!({ "invariant": k, "site": gen.site, "order": gen.order });
    }
    Ok((v, checks))
}

/// Spectral cover, branch data, and torsor dimensions at a model.
pub fn spectral_section(model: &FramedHiggsModel) -> Result<Section> {
    let s = spectral_data(model)?;
    let t = torsor_fiber_report(model)?;
    let n = s.n as i64;
    let mut checks = Vec::new();
    let gs = spectral_genus(s.r as i64, 0, n)?;
    let fib = fiber_formula(&group_data(GroupId::Gl(s.r))?, 0, n);
    checks.push(ReportCheck::new(
        "spectral_genus_equals_gl_fiber_dim",
        "r(g-1) + 1 + r(r-1)(2g-2+n)/2 = (g-1) dim G + n(dim B - dim T) + dim Z(G) for gl(r)",
        true,
        gs == fib,
        format!("g_s = {gs}, fiber = {fib}"),
    ));
    if let Some(count) = s.branch_point_count {
        checks.push(ReportCheck::new(
            "branch_point_count",
            "deg of the discriminant divisor = r(r-1)(2g-2+n)",
            true,
            count == s.branch_divisor_degree,
            format!("{count} branch points counted with multiplicity, expected {}", s.branch_divisor_degree),
        ));
    }
    let consistent = model
        .residues
        .iter()
        .zip(model.curve.points())
        .all(|(a, x)| s.discriminant_numerator.eval(x).is_zero() == matrix_discriminant(a).is_zero());
    checks.push(ReportCheck::new(
        "ramification_over_d_matches_residues",
        "D(x_i) = disc(A_i) prod_{l != i} (x_i - x_l)^{r(r-1)}",
        true,
        consistent,
        "",
    ));
    if let Some(eq) = t.relatively_framed_equals_base {
        checks.push(ReportCheck::new(
            "relatively_framed_fiber_equals_base",
            "fiber_dim + n dim T - dim Z(G) = N",
            true,
            eq,
            format!(
                "lhs = {}, rhs = {}",
                t.relatively_framed_fiber_dim.unwrap_or_default(),
                t.hitchin_base_dim.unwrap_or_default()
            ),
        ));
    }
    Ok((json!({ "spectral": to_json(&s)?, "torsors": to_json(&t)? }), checks))
}

/// Invariance of the form and `[h, h⊥] ⊆ h⊥` for the configured group and
/// framings, checked exactly on basis triples.
pub fn lie_section(alg: &LieAlgebra, form: &InvariantForm, spec: &FramingSpec) -> Result<Section> {
    let b = alg.basis();
    let mut worst = Q::default();
    for x in b {
        for y in b {
            for z in b {
                let r = check_invariance(form, x, y, z).abs();
                if r > worst {
                    worst = r;
                }
            }
        }
    }
    let mut checks = vec![ReportCheck::new(
        "form_invariance",
        "sigma([a, c], b) + sigma(c, [a, b]) = 0 on basis triples",
        true,
        worst.is_zero(),
        format!("{} triples, max |residual| = {worst}", b.len().pow(3)),
    )];
    for (i, f) in spec.points.iter().enumerate() {
        checks.push(ReportCheck::new(
            format!("bracket_containment_x{}", i + 1),
            "[h_x, h_x^perp] in h_x^perp",
            true,
            f.bracket_containment_holds(alg),
            format!("dim h = {}, dim h^perp = {}", f.dim_h(), f.perp_basis.len()),
        ));
    }
    Ok((json!({ "dim_g": alg.dim(), "framing_dims": spec.dims_h() }), checks))
}

fn prefixed(prefix: &str, checks: Vec<ReportCheck>) -> impl Iterator<Item = ReportCheck> + '_ {
    checks.into_iter().map(move |mut c| {
        c.name = format!("{prefix}.{}", c.name);
        c
    })
}

/// Every applicable check for one model: Lie data, dimension formulas at
/// genera 1 to 4 with the same framing, deformation complexes, Hitchin
/// coefficients, and (for `gl`/`sl` of rank at most 3) the spectral cover.
fn audit_job(config: &JobConfig) -> Result<Section> {
    let model = build_model(config)?;
    let id = model.alg.id();
    let mut checks = Vec::new();
    let mut v = serde_json::Map::new();
    let (lv, lc) = lie_section(&model.alg, &model.form, &model.framing)?;
    v.insert("lie".into(), lv);
    checks.extend(prefixed("lie", lc));
    let fd = FramingDims::from_spec(&model.alg, &model.framing);
    let n = model.curve.n() as i64;
    let mut dims = Vec::new();
    for g in 1..=4 {
        let r = consistency_audit(id, g, n, &fd)?;
        checks.extend(r.checks.iter().map(|c| ReportCheck::from_dim(&format!("dims.g{g}."), c)));
        dims.push(r);
    }
    v.insert("dims".into(), to_json(&dims)?);
    let (dv, dc) = defo_section(&model, config.include_matrices)?;
    v.insert("defo".into(), dv);
    checks.extend(prefixed("defo", dc));
    let (gv, gc) = gaudin_section(&model, config)?;
    v.insert("gaudin".into(), gv);
    checks.extend(prefixed("gaudin", gc));
    if matches!(id, GroupId::Gl(2..=3) | GroupId::Sl(2..=3)) {
        let (sv, sc) = spectral_section(&model)?;
        v.insert("spectral".into(), sv);
        checks.extend(prefixed("spectral", sc));
    }
    Ok((Value::Object(v), checks))
}
