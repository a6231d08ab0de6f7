//! Command-line front end.
//!
//! Every subcommand reads an optional design document, writes its results
//! into the output directory (atomically, one file at a time) and lists the
//! written paths on stdout. Failures print one JSON line on stderr.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::design::{parse_design_with_overrides, DesignDoc, MaterialOverrides};
use crate::error::Error;
use crate::fsutil::write_atomic;
use crate::gait::speed_curve;
use crate::geometry::{
    build_extensional_features, build_flexional_features, build_flexure_solid, export_stl, ExportManifest,
    TriangleMesh,
};
use crate::joint_limits::{
    extensional_inverse, extensional_jam_angle, extensional_residual, flexional_inverse, flexional_jam_angle,
    flexional_residual, ExtensionalLimitSpec, FlexionalLimitSpec,
};
use crate::limb::{sweep_cycle_with_bins, DEFAULT_CURVATURE_BINS};
use crate::material::FlexureSpec;
use crate::process::validate_process;
use crate::stiffness::{homogenized_ei, solve_feature_height, solve_width_ratio, tip_stiffness, tip_stiffness_exact};
use crate::sweep::SweepSpec;
use crate::units::{deg_to_rad, m_to_mm, mm_to_m, rad_to_deg};

/// Environment variable naming a materials-override JSON file.
pub const MATERIALS_ENV: &str = "FLEXOKIT_MATERIALS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_WARNINGS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "flexokit",
    version,
    about = "Design and analysis of printed flexure joints, jamming limits, tendon-driven limbs and gaits",
    long_about = "Design and analysis of printed flexure joints, jamming limits, tendon-driven limbs and gaits.\n\n\
        Design documents are JSON in millimeters, degrees, GPa and °C. Results are written to the \
        output directory as CSV (curves, sweeps), JSON (scalars, reports) or binary STL (geometry). \
        Set FLEXOKIT_MATERIALS to a JSON file of material entries to override the document's materials.\n\n\
        Exit status: 0 success, 1 warnings with --strict, 2 errors."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a design document and its print-process settings.
    ///
    /// Input: design document. Output: validation_report.json with document
    /// counts and the process report (temperatures °C, offsets mm).
    Validate(ValidateArgs),
    /// Predict flexure stiffness, optionally over a rib-geometry sweep.
    ///
    /// Input: design document with a flexure. Output: stiffness.csv (or .json)
    /// with columns width_ratio, feature_height_mm, EI_eff_Nmm2,
    /// k_tip_N_per_m, k_exact_N_per_m.
    PredictStiffness(StiffnessArgs),
    /// Jam angle of a flexional or extensional limit, forward or inverse.
    ///
    /// Input: geometry flags in mm/deg, or --limit with a design document.
    /// Output: limit.json {angle_deg, angle_rad, residual (mm), inputs},
    /// limit_inverse.json with --inverse, or limit_sweep.csv with --sweep.
    SolveLimit(SolveLimitArgs),
    /// Inverse design: rib geometry for a target stiffness, or limit geometry
    /// for a target jam angle.
    ///
    /// Input: --target and --value (N/m for stiffness targets, degrees for
    /// angle targets). Output: design.json with the solution and a forward check.
    Design(DesignArgs),
    /// Quasi-static tendon pull-and-release cycle of a limb.
    ///
    /// Input: design document with a limb. Output: <limb>_trajectory.csv
    /// (pull_mm, foot_x_mm, foot_y_mm, theta_<i>_rad..., tension_N),
    /// <limb>_curvature.csv (rows = pull steps, columns = arc-length bins,
    /// 1/m) and <limb>_metrics.json {stroke_distance_mm, stroke_ratio}.
    SimulateLimb(LimbArgs),
    /// Trot speed against gait frequency.
    ///
    /// Input: design document with a gait. Output: gait_speed.csv (or .json)
    /// with columns frequency_hz, speed_mm_s.
    SimulateGait(GaitArgs),
    /// Binary STL export of flexures and jamming features.
    ///
    /// Input: design document. Output: <part>.stl in millimeters and
    /// <part>.manifest.json {part_name, volume_mm3, bbox_mm,
    /// pc_film_thickness_mm, process_config}.
    ExportGeometry(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Design document (JSON, millimeters).
    #[arg(short, long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Design document, as a positional argument.
    #[arg(value_name = "INPUT", conflicts_with = "input")]
    pub document: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Exit with status 1 when the run produced warnings.
    #[arg(long)]
    pub strict: bool,
    /// Output format for tabular results.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Common {
    fn input_path(&self) -> Option<&Path> {
        self.input.as_deref().or(self.document.as_deref())
    }

    fn require_doc(&self) -> anyhow::Result<DesignDoc> {
        let path = self
            .input_path()
            .ok_or_else(|| anyhow!(Error::InvalidParameter("a design document is required (--input)".into())))?;
        load_design(path)
    }

    fn optional_doc(&self) -> anyhow::Result<Option<DesignDoc>> {
        self.input_path().map(load_design).transpose()
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct StiffnessArgs {
    #[command(flatten)]
    pub common: Common,
    /// Flexure name; defaults to the first flexure in the document.
    #[arg(long)]
    pub flexure: Option<String>,
    /// width_ratio=<start>:<stop>:<step> or feature_height=<start>:<stop>:<step> (mm).
    #[arg(long, value_name = "NAME=START:STOP:STEP")]
    pub sweep: Option<SweepSpec>,
}

/// Limit geometry given on the command line or by name from a document.
#[derive(Debug, Args)]
pub struct LimitGeometry {
    /// Named flexional or extensional limit from the design document.
    #[arg(long)]
    pub limit: Option<String>,
    /// Flexional feature spacing D, mm.
    #[arg(long, default_value_t = 6.0)]
    pub spacing_mm: f64,
    /// Head radius r, mm [default: 2 flexional, 1.8 extensional].
    #[arg(long)]
    pub head_radius_mm: Option<f64>,
    /// Flexional stem height or extensional standoff height h, mm [default: 4 flexional, 2 extensional].
    #[arg(long)]
    pub height_mm: Option<f64>,
    /// Extensional diagonal feature length L, mm.
    #[arg(long, default_value_t = 7.0)]
    pub length_mm: f64,
    /// Extensional base width b, mm.
    #[arg(long, default_value_t = 5.4)]
    pub base_width_mm: f64,
    /// Extensional feature angle γ, degrees.
    #[arg(long, default_value_t = 45.0)]
    pub gamma_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LimitKind {
    Flexional,
    Extensional,
}

impl LimitKind {
    fn as_str(self) -> &'static str {
        match self {
            LimitKind::Flexional => "flexional",
            LimitKind::Extensional => "extensional",
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum LimitSpec {
    Flexional(FlexionalLimitSpec),
    Extensional(ExtensionalLimitSpec),
}

impl LimitSpec {
    fn kind(&self) -> LimitKind {
        match self {
            LimitSpec::Flexional(_) => LimitKind::Flexional,
            LimitSpec::Extensional(_) => LimitKind::Extensional,
        }
    }

    fn jam_angle(&self) -> crate::Result<f64> {
        match self {
            LimitSpec::Flexional(s) => flexional_jam_angle(s),
            LimitSpec::Extensional(s) => extensional_jam_angle(s),
        }
    }

    fn residual(&self, angle: f64) -> f64 {
        match self {
            LimitSpec::Flexional(s) => flexional_residual(s, angle),
            LimitSpec::Extensional(s) => extensional_residual(s, angle),
        }
    }

    fn inputs(&self) -> Value {
        match self {
            LimitSpec::Flexional(s) => json!({
                "spacing_mm": m_to_mm(s.spacing),
                "head_radius_mm": m_to_mm(s.head_radius),
                "feature_height_mm": m_to_mm(s.height),
            }),
            LimitSpec::Extensional(s) => json!({
                "feature_length_mm": m_to_mm(s.length),
                "base_width_mm": m_to_mm(s.base_width),
                "head_radius_mm": m_to_mm(s.head_radius),
                "height_mm": m_to_mm(s.height),
                "feature_angle_deg": rad_to_deg(s.gamma),
            }),
        }
    }
}

impl LimitGeometry {
    /// Resolve the limit; `kind` is required unless `--limit` names one.
    fn resolve(&self, kind: Option<LimitKind>, doc: Option<&DesignDoc>) -> anyhow::Result<LimitSpec> {
        if let Some(name) = &self.limit {
            let doc = doc.ok_or_else(|| {
                anyhow!(Error::InvalidParameter("--limit needs a design document (--input)".into()))
            })?;
            let found = match kind {
                Some(LimitKind::Flexional) => doc.flexional_limits.get(name).map(|s| LimitSpec::Flexional(*s)),
                Some(LimitKind::Extensional) => doc.extensional_limits.get(name).map(|s| LimitSpec::Extensional(*s)),
                None => doc
                    .flexional_limits
                    .get(name)
                    .map(|s| LimitSpec::Flexional(*s))
                    .or_else(|| doc.extensional_limits.get(name).map(|s| LimitSpec::Extensional(*s))),
            };
            return found.ok_or_else(|| {
                anyhow!(Error::DanglingReference {
                    kind: "limit",
                    name: name.clone(),
                    path: "--limit".into(),
                })
            });
        }
        match kind {
            Some(LimitKind::Flexional) => Ok(LimitSpec::Flexional(FlexionalLimitSpec::new(
                mm_to_m(self.spacing_mm),
                mm_to_m(self.head_radius_mm.unwrap_or(2.0)),
                mm_to_m(self.height_mm.unwrap_or(4.0)),
            )?)),
            Some(LimitKind::Extensional) => Ok(LimitSpec::Extensional(ExtensionalLimitSpec::new(
                mm_to_m(self.length_mm),
                mm_to_m(self.base_width_mm),
                mm_to_m(self.head_radius_mm.unwrap_or(1.8)),
                mm_to_m(self.height_mm.unwrap_or(2.0)),
                deg_to_rad(self.gamma_deg),
            )?)),
            None => Err(anyhow!(Error::InvalidParameter(
                "choose --flexional or --extensional, or name a document limit with --limit".into()
            ))),
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveLimitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Mushroom-pillar limit on the flexion side.
    #[arg(long, conflicts_with = "extensional")]
    pub flexional: bool,
    /// Inclined-standoff limit on the extension side.
    #[arg(long)]
    pub extensional: bool,
    #[command(flatten)]
    pub geometry: LimitGeometry,
    /// Solve for the feature height (flexional) or length (extensional) that jams at --angle-deg.
    #[arg(long, requires = "angle_deg", conflicts_with = "sweep")]
    pub inverse: bool,
    /// Target jam angle for --inverse, degrees.
    #[arg(long)]
    pub angle_deg: Option<f64>,
    /// h=<start>:<stop>:<step> (flexional) or L=<start>:<stop>:<step> (extensional), mm.
    #[arg(long, value_name = "NAME=START:STOP:STEP")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignTarget {
    /// Rib width ratio for a tip stiffness (N/m).
    WidthRatio,
    /// Rib height for a tip stiffness (N/m).
    FeatureHeight,
    /// Pillar stem height for a flexional jam angle (degrees).
    FlexionalHeight,
    /// Standoff length for an extensional jam angle (degrees).
    ExtensionalLength,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub common: Common,
    /// Quantity to solve for.
    #[arg(long, value_enum)]
    pub target: DesignTarget,
    /// Target value: N/m for stiffness targets, degrees for angle targets.
    #[arg(long, allow_negative_numbers = true)]
    pub value: f64,
    /// Template flexure for stiffness targets; defaults to the first flexure.
    #[arg(long)]
    pub flexure: Option<String>,
    #[command(flatten)]
    pub geometry: LimitGeometry,
}

#[derive(Debug, Args)]
pub struct LimbArgs {
    #[command(flatten)]
    pub common: Common,
    /// Limb name; defaults to the first limb in the document.
    #[arg(long)]
    pub limb: Option<String>,
    /// Pull steps per half cycle (overrides the document).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Maximum tendon pull, mm (overrides the document).
    #[arg(long)]
    pub max_pull_mm: Option<f64>,
    /// Arc-length bins of the curvature map.
    #[arg(long, default_value_t = DEFAULT_CURVATURE_BINS)]
    pub bins: usize,
}

#[derive(Debug, Args)]
pub struct GaitArgs {
    #[command(flatten)]
    pub common: Common,
    /// f=<start>:<stop>:<step> in Hz; replaces the document's frequency list.
    #[arg(long, value_name = "f=START:STOP:STEP")]
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Export only this part (entry name or `<category>_<name>`); repeatable.
    #[arg(long)]
    pub part: Vec<String>,
}

/// What a subcommand did.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: bool,
}

impl Outcome {
    fn write(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        let path = dir.join(name);
        write_atomic(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push(path);
        Ok(())
    }
}

/// Read and resolve a design document, applying `FLEXOKIT_MATERIALS` overrides.
pub fn load_design(path: &Path) -> anyhow::Result<DesignDoc> {
    let text = std::fs::read_to_string(path)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", path.display()))?;
    let overrides = match std::env::var_os(MATERIALS_ENV) {
        Some(p) if !p.is_empty() => {
            let p = PathBuf::from(p);
            let t = std::fs::read_to_string(&p)
                .map_err(Error::from)
                .with_context(|| format!("reading {MATERIALS_ENV} file {}", p.display()))?;
            MaterialOverrides::parse(&t).with_context(|| format!("parsing {}", p.display()))?
        }
        _ => MaterialOverrides::default(),
    };
    parse_design_with_overrides(&text, &overrides).with_context(|| format!("loading {}", path.display()))
}

fn pretty(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        // `+ 0.0` prints negative zero as 0.
        let cells: Vec<String> = row.iter().map(|v| (v + 0.0).to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_rows(header: &[String], rows: &[Vec<f64>]) -> String {
    let objects: Vec<serde_json::Map<String, Value>> = rows
        .iter()
        .map(|row| header.iter().cloned().zip(row.iter().map(|v| json!(v + 0.0))).collect())
        .collect();
    pretty(&objects)
}

fn table(format: Format, stem: &str, header: &[String], rows: &[Vec<f64>]) -> (String, String) {
    match format {
        Format::Csv => (format!("{stem}.csv"), csv(header, rows)),
        Format::Json => (format!("{stem}.json"), json_rows(header, rows)),
    }
}

fn headers(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn ensure_out_dir(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(Error::from)
        .with_context(|| format!("creating {}", dir.display()))
}

pub fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Validate(a) => validate(a),
        Command::PredictStiffness(a) => predict_stiffness(a),
        Command::SolveLimit(a) => solve_limit(a),
        Command::Design(a) => design(a),
        Command::SimulateLimb(a) => simulate_limb(a),
        Command::SimulateGait(a) => simulate_gait(a),
        Command::ExportGeometry(a) => export_geometry(a),
    }
}

fn validate(a: ValidateArgs) -> anyhow::Result<Outcome> {
    if a.common.format == Some(Format::Csv) {
        bail!(Error::InvalidParameter("validate writes JSON only".into()));
    }
    let doc = a.common.require_doc()?;
    ensure_out_dir(&a.common.out_dir)?;
    let process = doc.process.as_ref().map(validate_process);
    let report = json!({
        "valid": process.as_ref().is_none_or(|r| !r.has_errors()),
        "schema_version": doc.schema_version,
        "counts": {
            "materials": doc.materials.len(),
            "flexures": doc.flexures.len(),
            "flexional_limits": doc.flexional_limits.len(),
            "extensional_limits": doc.extensional_limits.len(),
            "limbs": doc.limbs.len(),
            "gait": doc.gait.is_some(),
        },
        "process": process,
    });
    let mut out = Outcome::default();
    if let Some(r) = &process {
        print!("{}", r.to_text());
        out.warnings = r.has_warnings();
        if r.has_errors() {
            out.write(&a.common.out_dir, "validation_report.json", pretty(&report).as_bytes())?;
            bail!(Error::InvalidParameter(format!(
                "process validation reported {} error(s)",
                r.count(crate::process::Level::Error)
            )));
        }
    }
    out.write(&a.common.out_dir, "validation_report.json", pretty(&report).as_bytes())?;
    Ok(out)
}

fn pick_flexure<'d>(doc: &'d DesignDoc, name: Option<&str>) -> anyhow::Result<&'d FlexureSpec> {
    match name {
        Some(n) => Ok(doc.flexure(n)?),
        None => doc
            .flexures
            .values()
            .next()
            .ok_or_else(|| anyhow!(Error::InvalidParameter("document has no flexures".into()))),
    }
}

fn stiffness_row(f: &FlexureSpec) -> Vec<f64> {
    let r = homogenized_ei(f);
    vec![
        f.width_ratio(),
        m_to_mm(f.feature_height()),
        r.ei_eff * 1e6,
        r.k_tip,
        tip_stiffness_exact(f),
    ]
}

fn predict_stiffness(a: StiffnessArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.require_doc()?;
    let flex = pick_flexure(&doc, a.flexure.as_deref())?;
    let rows = match &a.sweep {
        None => vec![stiffness_row(flex)],
        Some(s) => {
            let vary: fn(&FlexureSpec, f64) -> crate::Result<FlexureSpec> = match s.name.as_str() {
                "width_ratio" | "w" => |f, v| f.with_width_ratio(v),
                "feature_height" | "feature_height_mm" | "h" => |f, v| f.with_feature_height(mm_to_m(v)),
                other => bail!(Error::InvalidParameter(format!(
                    "unknown stiffness sweep parameter `{other}` (use width_ratio or feature_height)"
                ))),
            };
            s.values()
                .into_iter()
                .map(|v| vary(flex, v).map(|f| stiffness_row(&f)))
                .collect::<crate::Result<Vec<_>>>()?
        }
    };
    ensure_out_dir(&a.common.out_dir)?;
    let header = headers(&["width_ratio", "feature_height_mm", "EI_eff_Nmm2", "k_tip_N_per_m", "k_exact_N_per_m"]);
    let (name, body) = table(a.common.format(Format::Csv), "stiffness", &header, &rows);
    let mut out = Outcome::default();
    out.write(&a.common.out_dir, &name, body.as_bytes())?;
    Ok(out)
}

fn with_limit_parameter(spec: LimitSpec, mm: f64) -> crate::Result<LimitSpec> {
    Ok(match spec {
        LimitSpec::Flexional(s) => LimitSpec::Flexional(FlexionalLimitSpec::new(s.spacing, s.head_radius, mm_to_m(mm))?),
        LimitSpec::Extensional(s) => LimitSpec::Extensional(ExtensionalLimitSpec::new(
            mm_to_m(mm),
            s.base_width,
            s.head_radius,
            s.height,
            s.gamma,
        )?),
    })
}

fn varied_parameter(kind: LimitKind) -> &'static str {
    match kind {
        LimitKind::Flexional => "feature_height_mm",
        LimitKind::Extensional => "feature_length_mm",
    }
}

/// Inverse solve of one limit kind; returns the parameter value in meters.
fn invert_limit(spec: LimitSpec, angle: f64) -> crate::Result<(f64, LimitSpec)> {
    let value = match spec {
        LimitSpec::Flexional(s) => flexional_inverse(angle, s.head_radius, s.spacing)?,
        LimitSpec::Extensional(s) => extensional_inverse(angle, s.base_width, s.head_radius, s.height, s.gamma)?,
    };
    Ok((value, with_limit_parameter(spec, m_to_mm(value))?))
}

fn solve_limit(a: SolveLimitArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.optional_doc()?;
    let kind = match (a.flexional, a.extensional) {
        (true, _) => Some(LimitKind::Flexional),
        (_, true) => Some(LimitKind::Extensional),
        _ => None,
    };
    let spec = a.geometry.resolve(kind, doc.as_ref())?;
    let kind = spec.kind();
    let mut out = Outcome::default();

    if let Some(sweep) = &a.sweep {
        let allowed: &[&str] = match kind {
            LimitKind::Flexional => &["h", "height", "feature_height", "feature_height_mm"],
            LimitKind::Extensional => &["L", "length", "feature_length", "feature_length_mm"],
        };
        if !allowed.contains(&sweep.name.as_str()) {
            bail!(Error::InvalidParameter(format!(
                "a {} sweep varies one of {}, not `{}`",
                kind.as_str(),
                allowed.join(", "),
                sweep.name
            )));
        }
        let rows = sweep
            .values()
            .into_iter()
            .map(|v| {
                let s = with_limit_parameter(spec, v)?;
                let angle = s.jam_angle()?;
                Ok(vec![v, rad_to_deg(angle), angle, m_to_mm(s.residual(angle))])
            })
            .collect::<crate::Result<Vec<_>>>()?;
        ensure_out_dir(&a.common.out_dir)?;
        let header = headers(&[varied_parameter(kind), "angle_deg", "angle_rad", "residual_mm"]);
        let (name, body) = table(a.common.format(Format::Csv), "limit_sweep", &header, &rows);
        out.write(&a.common.out_dir, &name, body.as_bytes())?;
        return Ok(out);
    }

    if a.common.format == Some(Format::Csv) {
        bail!(Error::InvalidParameter("single solves write JSON; use --sweep for CSV".into()));
    }
    let body = if a.inverse {
        let target_deg = a.angle_deg.expect("clap requires --angle-deg");
        let target = deg_to_rad(target_deg);
        let (value, solved) = invert_limit(spec, target)?;
        let check = solved.jam_angle()?;
        json!({
            "kind": kind.as_str(),
            "target_angle_deg": target_deg,
            "target_angle_rad": target,
            "parameter": varied_parameter(kind),
            "value": m_to_mm(value),
            "angle_rad": check,
            "residual": m_to_mm(solved.residual(target)),
            "inputs": solved.inputs(),
        })
    } else {
        let angle = spec.jam_angle()?;
        json!({
            "kind": kind.as_str(),
            "angle_deg": rad_to_deg(angle),
            "angle_rad": angle,
            "residual": m_to_mm(spec.residual(angle)),
            "inputs": spec.inputs(),
        })
    };
    ensure_out_dir(&a.common.out_dir)?;
    let name = if a.inverse { "limit_inverse.json" } else { "limit.json" };
    out.write(&a.common.out_dir, name, pretty(&body).as_bytes())?;
    Ok(out)
}

fn design(a: DesignArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.optional_doc()?;
    let body = match a.target {
        DesignTarget::WidthRatio | DesignTarget::FeatureHeight => {
            let doc = doc.as_ref().ok_or_else(|| {
                anyhow!(Error::InvalidParameter("stiffness targets need a design document (--input)".into()))
            })?;
            let template = pick_flexure(doc, a.flexure.as_deref())?;
            let (name, solution, unit, solved) = if a.target == DesignTarget::WidthRatio {
                let w = solve_width_ratio(a.value, template)?;
                ("width_ratio", w, "1", template.with_width_ratio(w)?)
            } else {
                let h = solve_feature_height(a.value, template)?;
                ("feature_height_mm", m_to_mm(h), "mm", template.with_feature_height(h)?)
            };
            json!({
                "target": name,
                "target_k_tip_N_per_m": a.value,
                "solution": solution,
                "solution_unit": unit,
                "k_tip_N_per_m": tip_stiffness(&solved),
                "k_exact_N_per_m": tip_stiffness_exact(&solved),
            })
        }
        DesignTarget::FlexionalHeight | DesignTarget::ExtensionalLength => {
            let kind = if a.target == DesignTarget::FlexionalHeight {
                LimitKind::Flexional
            } else {
                LimitKind::Extensional
            };
            let spec = a.geometry.resolve(Some(kind), doc.as_ref())?;
            let target = deg_to_rad(a.value);
            let (value, solved) = invert_limit(spec, target)?;
            json!({
                "target": varied_parameter(kind),
                "target_angle_deg": a.value,
                "solution": m_to_mm(value),
                "solution_unit": "mm",
                "angle_rad": solved.jam_angle()?,
                "residual": m_to_mm(solved.residual(target)),
                "inputs": solved.inputs(),
            })
        }
    };
    ensure_out_dir(&a.common.out_dir)?;
    let mut out = Outcome::default();
    out.write(&a.common.out_dir, "design.json", pretty(&body).as_bytes())?;
    Ok(out)
}

fn simulate_limb(a: LimbArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.require_doc()?;
    let (name, limb) = match &a.limb {
        Some(n) => (n.clone(), doc.limb(n)?),
        None => doc
            .limbs
            .iter()
            .next()
            .map(|(n, l)| (n.clone(), l))
            .ok_or_else(|| anyhow!(Error::InvalidParameter("document has no limbs".into())))?,
    };
    let steps = a.steps.unwrap_or(limb.steps);
    let max_pull = a.max_pull_mm.map(mm_to_m).unwrap_or_else(|| limb.max_pull());
    if a.bins == 0 {
        bail!(Error::InvalidParameter("at least one curvature bin is required".into()));
    }
    let cycle = sweep_cycle_with_bins(&limb.spec, max_pull, steps, a.bins)?;

    let n_joints = limb.spec.joint_count();
    let mut header = headers(&["pull_mm", "foot_x_mm", "foot_y_mm"]);
    header.extend((1..=n_joints).map(|i| format!("theta_{i}_rad")));
    header.push("tension_N".into());
    let rows: Vec<Vec<f64>> = cycle
        .samples
        .iter()
        .map(|s| {
            let mut r = vec![m_to_mm(s.state.pull), m_to_mm(s.foot[0]), m_to_mm(s.foot[1])];
            r.extend(&s.state.theta);
            r.push(s.state.tension);
            r
        })
        .collect();

    let mut curv_header = headers(&["pull_mm"]);
    curv_header.extend((0..a.bins).map(|b| format!("kappa_bin_{b}_per_m")));
    let curv_rows: Vec<Vec<f64>> = cycle
        .samples
        .iter()
        .zip(&cycle.curvature_map)
        .map(|(s, k)| std::iter::once(m_to_mm(s.state.pull)).chain(k.iter().copied()).collect())
        .collect();

    let metrics = json!({
        "limb": name,
        "stroke_distance_mm": m_to_mm(cycle.metrics.stroke_distance),
        "stroke_ratio": cycle.metrics.stroke_ratio,
        "max_pull_mm": m_to_mm(max_pull),
        "tendon_capacity_mm": m_to_mm(limb.spec.capacity()),
        "steps": steps,
        "jam_events_mm": limb.spec.jam_events().into_iter().map(m_to_mm).collect::<Vec<_>>(),
        "curvature_bin_edges_mm": (0..=a.bins)
            .map(|b| m_to_mm(limb.spec.total_length()) * b as f64 / a.bins as f64)
            .collect::<Vec<_>>(),
        "joints": limb.joints.iter().map(|j| j.name.clone()).collect::<Vec<_>>(),
    });

    ensure_out_dir(&a.common.out_dir)?;
    let mut out = Outcome::default();
    let dir = &a.common.out_dir;
    out.write(dir, &format!("{name}_trajectory.csv"), csv(&header, &rows).as_bytes())?;
    out.write(dir, &format!("{name}_curvature.csv"), csv(&curv_header, &curv_rows).as_bytes())?;
    out.write(dir, &format!("{name}_metrics.json"), pretty(&metrics).as_bytes())?;
    Ok(out)
}

fn simulate_gait(a: GaitArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.require_doc()?;
    let mut gait = doc
        .gait
        .clone()
        .ok_or_else(|| anyhow!(Error::InvalidParameter("document has no gait".into())))?;
    if let Some(s) = &a.sweep {
        if !matches!(s.name.as_str(), "f" | "frequency" | "frequency_hz") {
            bail!(Error::InvalidParameter(format!(
                "a gait sweep varies f (Hz), not `{}`",
                s.name
            )));
        }
        gait.frequencies = s.values();
    }
    if gait.frequencies.is_empty() {
        bail!(Error::InvalidParameter(
            "no gait frequencies: set gait.frequencies_hz or pass --sweep f=...".into()
        ));
    }
    let mut limbs: Vec<String> = gait.legs.iter().map(|l| l.limb.clone()).collect();
    limbs.dedup();
    let mut seen = std::collections::HashSet::new();
    for name in limbs.into_iter().filter(|n| seen.insert(n.clone())) {
        let limb = doc.limb(&name)?;
        let cycle = crate::limb::sweep_cycle(&limb.spec, limb.max_pull(), limb.steps)?;
        gait.set_limb_stroke(&name, cycle.metrics);
    }
    let curve = speed_curve(&gait)?;
    let rows: Vec<Vec<f64>> = curve.points.iter().map(|&(f, v)| vec![f, m_to_mm(v)]).collect();
    ensure_out_dir(&a.common.out_dir)?;
    let (name, body) = table(
        a.common.format(Format::Csv),
        "gait_speed",
        &headers(&["frequency_hz", "speed_mm_s"]),
        &rows,
    );
    let mut out = Outcome::default();
    out.write(&a.common.out_dir, &name, body.as_bytes())?;
    Ok(out)
}

struct Part {
    name: String,
    entry: String,
    mesh: crate::Result<TriangleMesh>,
    film_mm: Option<f64>,
}

fn export_geometry(a: ExportArgs) -> anyhow::Result<Outcome> {
    let doc = a.common.require_doc()?;
    let opts = doc.export.features;
    let count = doc.export.feature_count;
    let process_film = doc.process.as_ref().map(|p| p.pc_thickness);

    let mut parts = Vec::new();
    for (name, f) in &doc.flexures {
        let film = f.base.film_thickness();
        parts.push(Part {
            name: format!("flexure_{name}"),
            entry: name.clone(),
            mesh: build_flexure_solid(f),
            film_mm: (film > 0.0).then(|| m_to_mm(film)).or(process_film),
        });
    }
    for (name, s) in &doc.flexional_limits {
        parts.push(Part {
            name: format!("flexional_{name}"),
            entry: name.clone(),
            mesh: build_flexional_features(s, count, &opts),
            film_mm: process_film,
        });
    }
    for (name, s) in &doc.extensional_limits {
        parts.push(Part {
            name: format!("extensional_{name}"),
            entry: name.clone(),
            mesh: build_extensional_features(s, count, &opts),
            film_mm: process_film,
        });
    }
    if !a.part.is_empty() {
        for want in &a.part {
            if !parts.iter().any(|p| &p.name == want || &p.entry == want) {
                bail!(Error::DanglingReference {
                    kind: "part",
                    name: want.clone(),
                    path: "--part".into(),
                });
            }
        }
        parts.retain(|p| a.part.iter().any(|w| w == &p.name || w == &p.entry));
    }
    if parts.is_empty() {
        bail!(Error::InvalidParameter("document has no exportable parts".into()));
    }

    // Build everything before writing anything.
    let mut built = Vec::with_capacity(parts.len());
    for p in parts {
        let mesh = p.mesh.with_context(|| format!("building part {}", p.name))?;
        mesh.validate().with_context(|| format!("validating part {}", p.name))?;
        built.push((p.name, mesh, p.film_mm));
    }
    ensure_out_dir(&a.common.out_dir)?;
    let mut out = Outcome::default();
    let process = doc.source().process.clone();
    for (name, mesh, film) in built {
        let stl_name = format!("{name}.stl");
        let path = a.common.out_dir.join(&stl_name);
        export_stl(&mesh, &path).with_context(|| format!("writing {}", path.display()))?;
        out.files.push(path);
        let manifest = ExportManifest::new(&name, &stl_name, &mesh, film, process.clone());
        out.write(&a.common.out_dir, &format!("{name}.manifest.json"), manifest.to_json().as_bytes())?;
    }
    Ok(out)
}

/// One-line machine-readable diagnostic for a failed run.
pub fn error_line(err: &anyhow::Error) -> String {
    let code = err
        .chain()
        .find_map(|c| c.downcast_ref::<Error>())
        .map_or("cli_error", Error::code);
    let mut message = String::new();
    let _ = write!(message, "{err:#}");
    json!({ "error": { "code": code, "message": message } }).to_string()
}

/// Parse arguments, run, print diagnostics and return the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let strict = match &cli.command {
        Command::Validate(a) => a.common.strict,
        Command::PredictStiffness(a) => a.common.strict,
        Command::SolveLimit(a) => a.common.strict,
        Command::Design(a) => a.common.strict,
        Command::SimulateLimb(a) => a.common.strict,
        Command::SimulateGait(a) => a.common.strict,
        Command::ExportGeometry(a) => a.common.strict,
    };
    match run(cli) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            if strict && outcome.warnings {
                EXIT_WARNINGS
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            eprintln!("{}", error_line(&e));
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_subcommand_has_help() {
        for sub in Cli::command().get_subcommands() {
            let about = sub.get_long_about().or(sub.get_about()).map(|s| s.to_string());
            let about = about.unwrap_or_default();
            assert!(about.contains("Input") && about.contains("Output"), "{}", sub.get_name());
        }
    }

    #[test]
    fn error_line_carries_code() {
        let e = anyhow!(Error::UnreachableLimit).context("solving");
        let line = error_line(&e);
        assert!(!line.contains('\n'));
        let v: Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["error"]["code"], "unreachable_limit");
    }

    #[test]
    fn unknown_subcommand_is_an_error() {
        assert_eq!(main_with_args(["flexokit", "frobnicate"]), EXIT_ERROR);
    }
}
