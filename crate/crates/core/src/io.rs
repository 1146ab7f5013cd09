//! Scenario configuration, the four driver commands, reports and CSV tables.

use crate::dbar::{CorridorGrid, JonesConfig, PlateauSpec, QuadratureSpec, SolverKind};
use crate::geometry::{classify_arcs, classify_pair, ClassifierConfig, GraphFunction, GraphSpec, Verdict};
use crate::numerics::C64;
use crate::scenarios::{
    cauchy_sequence, chain_bound_certificates, chain_test_function, circle_bound_check, f1_growth, scenario_in,
    theorem9_probes, theorem9_split, CertificateGrid, ChainFunctionSpec, ScenarioBundle, ScenarioSpec, Theorem9Config,
    Theorem9Probes,
};
use crate::splitter::{split, test_function, SplitConfig, TestFunctionSpec};
use crate::witness::{witness_family, ProbeSpec, ScheduleConfig, ScheduleKind};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSpec,
    /// Overrides the scenario's recommended test function for `split`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_function: Option<TestFunctionSpec>,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem9: Option<Theorem9Section>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// `split` settings; unset fields fall back to the scenario bundle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverKind>,
    pub grid: CorridorGrid,
    pub quadrature: QuadratureSpec,
    pub jones: JonesConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour_end: Option<f64>,
    pub contour_coefficient: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plateau: Option<PlateauSpec>,
    pub cr_step: f64,
    pub check_level: usize,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitConfig::default();
        Self {
            solver: None,
            grid: d.grid,
            quadrature: d.quadrature,
            jones: d.jones,
            contour_end: None,
            contour_coefficient: d.contour_coefficient,
            plateau: None,
            cr_step: d.cr_step,
            check_level: d.check_level,
        }
    }
}

impl SplitSection {
    pub fn resolve(&self, bundle: &ScenarioBundle) -> SplitConfig {
        let base = bundle.split_config();
        SplitConfig {
            solver: self.solver.unwrap_or(base.solver),
            grid: self.grid,
            quadrature: self.quadrature,
            jones: self.jones,
            contour_end: self.contour_end,
            contour_coefficient: self.contour_coefficient,
            plateau: self.plateau.unwrap_or(base.plateau),
            cr_step: self.cr_step,
            check_level: self.check_level,
        }
    }
}

fn default_witness_end() -> f64 {
    0.1
}

/// Witness family over x = b·2⁻ⁿ, n = n_min..=n_max. Graphs default to the scenario pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi1: Option<GraphSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi2: Option<GraphSpec>,
    #[serde(default = "default_witness_end")]
    pub domain_end: f64,
    #[serde(default = "default_kind")]
    pub kind: ScheduleKind,
    #[serde(default = "default_witness_end")]
    pub b: f64,
    #[serde(default = "default_n_min")]
    pub n_min: i32,
    #[serde(default = "default_n_max")]
    pub n_max: i32,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default)]
    pub probes: ProbeSpec,
}

fn default_kind() -> ScheduleKind {
    ScheduleKind::Angle
}
fn default_n_min() -> i32 {
    3
}
fn default_n_max() -> i32 {
    13
}

impl Default for WitnessSection {
    fn default() -> Self {
        Self {
            phi1: None,
            phi2: None,
            domain_end: default_witness_end(),
            kind: default_kind(),
            b: default_witness_end(),
            n_min: default_n_min(),
            n_max: default_n_max(),
            schedule: ScheduleConfig::default(),
            probes: ProbeSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem9Section {
    pub function: ChainFunctionSpec,
    /// Successively finer truncations (N, Y); the last one is the reported split.
    pub levels: Vec<Theorem9Config>,
    pub probes: Theorem9Probes,
    pub circle_points: usize,
    pub growth_sector: f64,
    pub growth_levels: usize,
    pub growth_directions: usize,
    pub certificates: CertificateGrid,
}

impl Default for Theorem9Section {
    fn default() -> Self {
        Self {
            function: ChainFunctionSpec::Sum {
                terms: vec![
                    ChainFunctionSpec::Constant { re: 0.5, im: 0.0 },
                    ChainFunctionSpec::DiscCharges { plus: 1.0, minus: -0.5, terms: 12 },
                    ChainFunctionSpec::Exponential { scale: 1.0 },
                ],
            },
            levels: theorem9_levels(3),
            probes: Theorem9Probes::default(),
            circle_points: 50,
            growth_sector: 3.0,
            growth_levels: 20,
            growth_directions: 5,
            certificates: CertificateGrid::default(),
        }
    }
}

/// (N, Y) = (4·2^i, 100·10^i), i < levels.
pub fn theorem9_levels(levels: usize) -> Vec<Theorem9Config> {
    (0..levels)
        .map(|i| Theorem9Config {
            truncation: 4 << i,
            axis_window: 100.0 * 10f64.powi(i as i32),
            ..Theorem9Config::default()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// sup |f − f₁ − f₂| after a split.
    pub split_identity: f64,
    /// Scale-free CR residual of f₁, f₂ off their singular sets.
    pub split_cr: f64,
    /// Slope of |φ₁ˣ(Aˣ)| against log((X − x)/h), relative to 1/2π.
    pub witness_slope: f64,
    pub witness_sum_ratio: f64,
    pub witness_rotundity_variation: f64,
    pub theorem9_identity: f64,
    /// |f₁| growth slope relative to the majorant's.
    pub theorem9_growth_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            split_identity: 1e-8,
            split_cr: 1e-3,
            witness_slope: 0.2,
            witness_sum_ratio: 4.0,
            witness_rotundity_variation: 0.01,
            theorem9_identity: 1e-3,
            theorem9_growth_ratio: 1.2,
        }
    }
}

impl Tolerances {
    fn validate(&self) -> Result<()> {
        let all = [
            self.split_identity,
            self.split_cr,
            self.witness_slope,
            self.witness_sum_ratio,
            self.witness_rotundity_variation,
            self.theorem9_identity,
            self.theorem9_growth_ratio,
        ];
        if all.iter().all(|t| *t > 0.0 && t.is_finite()) {
            Ok(())
        } else {
            Err(Error::Config(format!("tolerances must be positive and finite: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    /// Write CSV tables next to the report.
    pub tables: bool,
    /// Rays of the polar field dump of f₁, f₂, u.
    pub field_angles: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { tables: true, field_angles: 32 }
    }
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioSpec) -> Self {
        Self {
            scenario,
            test_function: None,
            classifier: ClassifierConfig::default(),
            split: SplitSection::default(),
            witness: None,
            theorem9: None,
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
            seed: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.tolerances.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Reads a config; relative CSV graph paths resolve against its directory.
    pub fn load(path: &Path) -> Result<(Self, Option<PathBuf>)> {
        let text = std::fs::read_to_string(path)?;
        let cfg = Self::from_json(&text)?;
        Ok((cfg, path.parent().map(Path::to_path_buf)))
    }

    /// sha256 of the canonical (compact) serialisation.
    pub fn digest(&self) -> Result<String> {
        let text = serde_json::to_string(self)?;
        Ok(format!("{:x}", Sha256::digest(text.as_bytes())))
    }
}

/// One reported number with the grid it was measured on and its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub name: String,
    pub value: f64,
    pub grid: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Entry {
    fn info(name: &str, value: f64, grid: impl Into<String>) -> Self {
        Self { name: name.into(), value, grid: grid.into(), tolerance: None, pass: None }
    }
    fn at_most(name: &str, value: f64, tol: f64, grid: impl Into<String>) -> Self {
        Self { name: name.into(), value, grid: grid.into(), tolerance: Some(tol), pass: Some(value <= tol) }
    }
    fn at_least(name: &str, value: f64, tol: f64, grid: impl Into<String>) -> Self {
        Self { name: name.into(), value, grid: grid.into(), tolerance: Some(tol), pass: Some(value >= tol) }
    }
    fn flag(name: &str, ok: bool, grid: impl Into<String>) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, grid: grid.into(), tolerance: None, pass: Some(ok) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub refine: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub passed: bool,
    pub exit_code: i32,
    pub entries: Vec<Entry>,
    /// Full structured output of the command.
    pub details: serde_json::Value,
    pub provenance: Provenance,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// A CSV table; `name` becomes the file stem.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(name: &str, headers: &[&str]) -> Self {
        Self { name: name.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:e}")))?;
        }
        w.flush()?;
        Ok(path)
    }
}

pub struct Output {
    pub report: Report,
    pub tables: Vec<Table>,
}

impl Output {
    /// Writes report.json and the tables into `dir`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = vec![dir.join("report.json")];
        std::fs::write(&paths[0], self.report.to_json()?)?;
        for t in &self.tables {
            paths.push(t.write(dir)?);
        }
        Ok(paths)
    }
}

/// Shared command options: `refine` sets the number of refinement levels, `seed` the
/// random probes of the circle bound.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub refine: Option<usize>,
    pub seed: Option<u64>,
}

struct Context {
    cfg: ScenarioConfig,
    bundle: ScenarioBundle,
    provenance: Provenance,
}

fn context(cfg: &ScenarioConfig, base: Option<&Path>, opts: RunOptions) -> Result<Context> {
    let mut cfg = cfg.clone();
    if opts.seed.is_some() {
        cfg.seed = opts.seed;
    }
    cfg.tolerances.validate()?;
    let bundle = scenario_in(&cfg.scenario, base)?;
    let provenance =
        Provenance { version: VERSION.into(), config_sha256: cfg.digest()?, seed: cfg.seed, refine: opts.refine };
    Ok(Context { cfg, bundle, provenance })
}

fn finish(command: &str, ctx: Context, verdict: Option<Verdict>, entries: Vec<Entry>, details: serde_json::Value, tables: Vec<Table>) -> Output {
    let passed = entries.iter().all(|e| e.pass != Some(false));
    let exit_code = match verdict {
        Some(v) => v.exit_code(),
        None => i32::from(!passed),
    };
    let tables = if ctx.cfg.output.tables { tables } else { Vec::new() };
    Output {
        report: Report {
            command: command.into(),
            scenario: ctx.bundle.spec.label().into(),
            verdict,
            passed,
            exit_code,
            entries,
            details,
            provenance: ctx.provenance,
        },
        tables,
    }
}

pub fn cmd_classify(cfg: &ScenarioConfig, base: Option<&Path>, opts: RunOptions) -> Result<Output> {
    let ctx = context(cfg, base, opts)?;
    let mut ccfg = ctx.cfg.classifier;
    if let Some(n) = opts.refine {
        ccfg.n_max = n;
    }
    let decision = match (&ctx.bundle.pair, ctx.bundle.arcs.as_slice()) {
        (Some(pair), _) => classify_pair(pair, &ccfg)?,
        (None, [a1, a2]) => classify_arcs(a1, a2, &ccfg)?,
        _ => return Err(Error::Config(format!("{} has no pair of arcs to classify", ctx.bundle.spec.label()))),
    };
    let grid = format!("x = b·2^-n, n ≤ {}", ccfg.n_max);
    let ev = &decision.evidence;
    let mut entries = vec![
        Entry::info("tau1_arg", ev.tau1.arg(), "tangent at the origin"),
        Entry::info("tau2_arg", ev.tau2.arg(), "tangent at the origin"),
    ];
    if let Some(m) = ev.tail_min {
        entries.push(Entry::info("ratio_tail_min", m, grid.clone()));
    }
    if let Some(e) = ctx.bundle.expected {
        entries.push(Entry::flag("matches_expected", e == decision.verdict, "scenario hypothesis"));
    }
    let mut table = Table::new("ratio_samples", &["n", "x", "ratio"]);
    for s in &ev.ratio_samples {
        table.rows.push(vec![s.n as f64, s.x, s.ratio]);
    }
    let details = serde_json::to_value(&decision)?;
    Ok(finish("classify", ctx, Some(decision.verdict), entries, details, vec![table]))
}

pub fn cmd_split(cfg: &ScenarioConfig, base: Option<&Path>, opts: RunOptions) -> Result<Output> {
    let ctx = context(cfg, base, opts)?;
    let b = &ctx.bundle;
    let cf = b
        .cutting
        .as_ref()
        .ok_or_else(|| Error::Config(format!("{} has no cutting function: not a separated pair", b.spec.label())))?;
    let mut scfg = ctx.cfg.split.resolve(b);
    if let Some(n) = opts.refine {
        scfg.plateau.levels = n;
    }
    let tf = ctx.cfg.test_function.clone().unwrap_or_else(|| b.test_function.clone());
    let f = test_function(&tf, &b.arcs)?;
    let sr = split(&f, cf, &b.s1, &b.s2, &scfg)?;
    let d = &sr.diagnostics;
    let tol = ctx.cfg.tolerances;
    let p = scfg.plateau;
    let check_grid = format!("plateau level {} ({} rays, r0 = {})", scfg.check_level, p.angles, p.r0);
    let rings = format!("rings r0·2^-n, n ≤ {}·2^L, L ≤ {}, {} rays", p.base_rings, p.levels, p.angles);
    let mut entries = vec![
        Entry::at_most("identity_residual", d.identity_residual, tol.split_identity, check_grid.clone()),
        Entry::at_most("cr_residual_f1", d.cr_residual_f1_off_s1, tol.split_cr, check_grid.clone()),
        Entry::at_most("cr_residual_f2", d.cr_residual_f2_off_s2, tol.split_cr, check_grid.clone()),
        Entry::info("sup_f1", d.sup_f1, rings.clone()),
        Entry::info("sup_f2", d.sup_f2, rings.clone()),
    ];
    for (name, pr) in [("f1", &d.plateau_f1), ("f2", &d.plateau_f2)] {
        for (l, g) in pr.growth.iter().enumerate() {
            entries.push(Entry::at_most(&format!("growth_{name}_level{}", l + 1), *g, p.threshold, rings.clone()));
        }
    }
    entries.push(Entry::flag("certified_bounded", d.certified_bounded, rings.clone()));

    let mut plateau = Table::new("plateau", &["level", "r_min", "points", "sup_f1", "sup_f2"]);
    for (a, c) in d.plateau_f1.levels.iter().zip(&d.plateau_f2.levels) {
        plateau.rows.push(vec![a.level as f64, a.r_min, a.points as f64, a.sup, c.sup]);
    }
    let mut field = Table::new("field", &["re", "im", "abs_f1", "abs_f2", "abs_u", "chi"]);
    let n_rings = p.rings(scfg.check_level);
    let angles = ctx.cfg.output.field_angles.max(1);
    let pts: Vec<C64> = (0..=n_rings)
        .flat_map(|n| {
            let r = p.r0 * 0.5f64.powi(n as i32);
            (0..angles).map(move |i| C64::from_polar(r, std::f64::consts::PI * (i as f64 + 0.5) / angles as f64))
        })
        .collect();
    for z in pts {
        field.rows.push(vec![z.re, z.im, sr.f1.eval(z).norm(), sr.f2.eval(z).norm(), sr.u.eval(z).norm(), cf.chi(z)]);
    }
    let details = serde_json::json!({
        "solver": scfg.solver,
        "test_function": tf,
        "config": scfg,
        "diagnostics": d,
    });
    Ok(finish("split", ctx, None, entries, details, vec![plateau, field]))
}

pub fn cmd_witness(cfg: &ScenarioConfig, base: Option<&Path>, opts: RunOptions) -> Result<Output> {
    let ctx = context(cfg, base, opts)?;
    let w = ctx.cfg.witness.clone().unwrap_or_default();
    let graph = |spec: &Option<GraphSpec>, fallback: Option<&GraphFunction>| -> Result<GraphFunction> {
        match (spec, fallback) {
            (Some(s), _) => GraphFunction::with_base(s.clone(), w.domain_end, base),
            (None, Some(g)) => Ok(g.with_domain_end(w.domain_end.min(g.domain_end()))),
            (None, None) => Err(Error::Config("witness graphs missing and the scenario has no graph pair".into())),
        }
    };
    let pair = ctx.bundle.pair.as_ref();
    let phi1 = graph(&w.phi1, pair.map(|p| &p.lower))?;
    let phi2 = graph(&w.phi2, pair.map(|p| &p.upper))?;
    let n_max = match opts.refine {
        Some(r) => w.n_min + r as i32,
        None => w.n_max,
    };
    if n_max < w.n_min + 1 {
        return Err(Error::Config(format!("need at least two schedule levels, got n = {}..={n_max}", w.n_min)));
    }
    let ns: Vec<i32> = (w.n_min..=n_max).collect();
    let fam = witness_family(&phi1, &phi2, w.kind, w.b, &ns, &w.schedule, &w.probes)?;
    let tol = ctx.cfg.tolerances;
    let grid = format!("x = {}·2^-n, n = {}..={n_max}", w.b, w.n_min);
    let target = 1.0 / (2.0 * std::f64::consts::PI);
    let entries = vec![
        Entry::flag("lower_bound_holds", fam.lower_bound_holds, grid.clone()),
        Entry::at_most("slope_rel_error", (fam.slope - target).abs() / target, tol.witness_slope, grid.clone()),
        Entry::info("slope", fam.slope, grid.clone()),
        Entry::at_most("sum_ratio", fam.sum_ratio, tol.witness_sum_ratio, format!("{grid}; {} probes along", w.probes.along)),
        Entry::info("sum_max", fam.sum_max, grid.clone()),
        Entry::at_most("rotundity_variation", fam.rotundity_variation, tol.witness_rotundity_variation, grid.clone()),
        Entry::at_least("rotundity_min", fam.rotundity_min, f64::MIN_POSITIVE, grid),
    ];
    let mut table = Table::new(
        "witness_family",
        &["n", "x", "X", "h", "eps", "log_ratio", "phi1_A", "lower_bound", "sum_scan", "delta_probe", "rotundity"],
    );
    for r in &fam.rows {
        table.rows.push(vec![
            r.n as f64,
            r.x,
            r.x_end,
            r.h,
            r.eps,
            r.log_ratio,
            r.phi1_a,
            r.lower_bound,
            r.sum_scan,
            r.delta_probe,
            r.rotundity,
        ]);
    }
    let details = serde_json::to_value(&fam)?;
    Ok(finish("witness", ctx, None, entries, details, vec![table]))
}

pub fn cmd_theorem9(cfg: &ScenarioConfig, base: Option<&Path>, opts: RunOptions) -> Result<Output> {
    let ctx = context(cfg, base, opts)?;
    let chain = ctx
        .bundle
        .chain
        .clone()
        .ok_or_else(|| Error::Config(format!("{} is not a disc chain", ctx.bundle.spec.label())))?;
    let sec = ctx.cfg.theorem9.clone().unwrap_or_default();
    let levels = match opts.refine {
        Some(r) => theorem9_levels(r.max(1)),
        None => sec.levels.clone(),
    };
    let Some(last) = levels.last().copied() else {
        return Err(Error::Config("theorem9 needs at least one truncation level".into()));
    };
    let f = chain_test_function(&sec.function, &chain)?;
    let (probes, excluded) = theorem9_probes(&chain, &sec.probes);
    let tol = ctx.cfg.tolerances;
    let seq = cauchy_sequence(&f, &chain, &levels, &probes, excluded, tol.theorem9_identity)?;
    let s = theorem9_split(&f, &chain, last)?;
    let seed = ctx.cfg.seed.unwrap_or(0);
    let circle = circle_bound_check(&s, sec.circle_points, seed)?;
    let growth = f1_growth(&s, sec.growth_sector, sec.probes.radius, sec.growth_levels, sec.growth_directions)?;
    let cert = chain_bound_certificates(&chain, &sec.certificates)?;
    let fin = seq.levels.last().unwrap();
    let pgrid = format!(
        "{} probes ({} excluded), N = {}, Y = {:e}",
        fin.points, fin.excluded, last.truncation, last.axis_window
    );
    let ggrid = format!("|ζ| = R·2^-j, j ≤ {}, {} rays in |η| < {}ξ", sec.growth_levels, sec.growth_directions, sec.growth_sector);
    let cgrid = format!("{} levels × {} angles, k = {}", sec.certificates.levels, sec.certificates.angles, sec.certificates.k);
    let entries = vec![
        Entry::at_most("identity_residual", fin.identity_residual, tol.theorem9_identity, pgrid.clone()),
        Entry::info("literal_grouping_residual", fin.literal_grouping_residual, pgrid.clone()),
        Entry::flag("cauchy_monotone", seq.monotone, format!("{} truncation levels", levels.len())),
        Entry::info("cr_residual_f_minus", fin.cr_residual_f_minus, pgrid.clone()),
        Entry::info("axis_tail_bound", fin.max_axis_tail_bound, pgrid.clone()),
        Entry::info("disc_tail_bound", fin.max_disc_tail_bound, pgrid),
        Entry::at_most("circle_bound_ratio", circle.max_ratio, 1.0 + 1e-9, format!("{} random points, seed {seed}", circle.points)),
        Entry::at_most(
            "f1_slope_over_majorant",
            growth.f1_slope / growth.majorant_slope,
            tol.theorem9_growth_ratio,
            ggrid.clone(),
        ),
        Entry::flag("f1_below_majorant", growth.below_majorant, ggrid),
        Entry::flag("distance_bound", cert.distance_bound_holds && cert.left_half_plane_holds, cgrid.clone()),
        Entry::info("min_distance_ratio", cert.min_distance_ratio, cgrid),
        Entry::info("ratio_sum_remainder", cert.remainder_bound, format!("after N = {}", cert.partial_sums.len())),
    ];
    let mut ptable = Table::new("theorem9_probes", &["re", "im", "residual", "abs_f1", "abs_f_plus", "abs_f_minus"]);
    for z in &probes {
        let p = s.decompose(*z)?;
        ptable.rows.push(vec![z.re, z.im, p.residual, p.f1.norm(), p.f_plus.norm(), p.f_minus.norm()]);
    }
    let mut gtable = Table::new("theorem9_growth", &["radius", "sup_f1", "majorant"]);
    for ((r, a), m) in growth.radii.iter().zip(&growth.sup_f1).zip(&growth.majorant) {
        gtable.rows.push(vec![*r, *a, *m]);
    }
    let details = serde_json::json!({
        "levels": seq.levels,
        "circle_bound": circle,
        "growth": growth,
        "certificates": cert,
        "groupings": {
            "sum": "f = (f1 + f_plus) + f_minus",
            "literal": "f = (f1 + f_plus) - f_minus",
        },
    });
    Ok(finish("theorem9", ctx, None, entries, details, vec![ptable, gtable]))
}
