//! The `lss` command line: argument handling, report formatting and the
//! exit-code contract (0 done, 1 input error, 2 resource budget exceeded).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::Pow;
use serde_json::{json, Value};

use crate::coincidence::{
    analyze, AnalysisError, AnalysisOptions, Nonperiodicity, NotModelSetWitness, RowDisjointness,
    UnknownReason, Verdict,
};
use crate::format::parse_system;
use crate::mfs::MatrixFunctionSystem;
use crate::patch::{self, Patch, PatchError, DEFAULT_POINT_BUDGET, DEFAULT_SEED_BOUND};
use crate::render;
use crate::sequence::{self, exclusion_report, find_sequences, SequenceError, WitnessCheck};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;

const CHECKERBOARD_GUIDANCE: &str =
    "combine the excluded period lengths with the lattice structure of the \
color classes (checkerboard parity) to rule out model sets; this step is not automated";

#[derive(Parser, Debug)]
#[command(
    name = "lss",
    version,
    about = "Exact analysis of lattice substitution systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the system consists of model sets.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        opts: AnalyzeArgs,
        #[arg(long)]
        json: bool,
    },
    /// Print the fixed-point patch, one point per line.
    Generate {
        file: PathBuf,
        #[command(flatten)]
        patch: PatchArgs,
        /// Write SVG instead of the text dump.
        #[arg(long)]
        render: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Draw the fixed-point patch as SVG.
    Render {
        file: PathBuf,
        #[command(flatten)]
        patch: PatchArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search a fixed-point patch for equidistant `a ... a b` sequences.
    Sequences {
        file: PathBuf,
        /// Axis of the progression.
        #[arg(long)]
        dir: usize,
        /// Stride.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        r: u64,
        /// Pattern period (at least 2).
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        l: u64,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Substitution steps; by default the least giving a side of 2·r·l·min-periods.
        #[arg(long)]
        iters: Option<u32>,
        #[arg(long, default_value_t = sequence::DEFAULT_MIN_PERIODS)]
        min_periods: u64,
        #[arg(long, default_value_t = DEFAULT_SEED_BOUND)]
        seed_bound: u32,
        #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
        budget: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, default_value_t = 8)]
    max_k: u32,
    #[arg(long, default_value_t = DEFAULT_SEED_BOUND)]
    seed_bound: u32,
    #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
    budget: u64,
    #[arg(long)]
    assume_nonperiodic: bool,
    #[arg(long, default_value_t = 8)]
    period_scan_radius: u32,
}

#[derive(Args, Debug)]
struct PatchArgs {
    #[arg(long, default_value_t = 3)]
    iters: u32,
    #[arg(long, default_value_t = DEFAULT_SEED_BOUND)]
    seed_bound: u32,
    #[arg(long, default_value_t = DEFAULT_POINT_BUDGET)]
    budget: u64,
}

/// A failed run: exit code and message for standard error.
struct Failure(i32, String);

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure(EXIT_INPUT, msg.into())
    }
}

impl From<PatchError> for Failure {
    fn from(e: PatchError) -> Self {
        let code = if matches!(e, PatchError::Budget { .. }) {
            EXIT_BUDGET
        } else {
            EXIT_INPUT
        };
        Failure(code, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        Failure(
            if e.is_budget() {
                EXIT_BUDGET
            } else {
                EXIT_INPUT
            },
            e.to_string(),
        )
    }
}

impl From<SequenceError> for Failure {
    fn from(e: SequenceError) -> Self {
        match e {
            SequenceError::Patch(p) => p.into(),
            other => Failure::input(other.to_string()),
        }
    }
}

/// Runs `lss` with `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match dispatch(cli.command, err) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INPUT
            }
        },
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn load(path: &PathBuf) -> Result<(MatrixFunctionSystem, Option<String>), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let parsed =
        parse_system(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let problems = (!parsed.report.is_valid()).then(|| parsed.report.to_string());
    Ok((parsed.system, problems))
}

fn write_or_return(output: Option<PathBuf>, text: String) -> Result<String, Failure> {
    match output {
        Some(path) => {
            std::fs::write(&path, text)
                .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn warn_partial(err: &mut dyn Write, problems: &Option<String>) {
    if let Some(p) = problems {
        let _ = writeln!(
            err,
            "warning: system fails block validation; continuing on the partial system"
        );
        for line in p.lines() {
            let _ = writeln!(err, "warning:   {line}");
        }
    }
}

fn fixed_point(sys: &MatrixFunctionSystem, args: &PatchArgs) -> Result<Patch, Failure> {
    let seed = patch::find_seed(sys, args.seed_bound)?;
    Ok(patch::generate(sys, seed, args.iters, args.budget)?)
}

fn dispatch(command: Command, err: &mut dyn Write) -> Result<String, Failure> {
    match command {
        Command::Analyze { file, opts, json } => {
            let (sys, problems) = load(&file)?;
            if let Some(p) = problems {
                return Err(Failure::input(format!("invalid system:\n{}", p.trim_end())));
            }
            let options = AnalysisOptions {
                k_max: opts.max_k,
                seed_bound: opts.seed_bound,
                budget: opts.budget,
                assume_nonperiodic: opts.assume_nonperiodic,
                period_scan_radius: opts.period_scan_radius,
            };
            let analysis = analyze(&sys, &options)?;
            Ok(if json {
                format!("{:#}\n", analysis_json(&sys, &analysis))
            } else {
                analysis_text(&sys, &analysis)
            })
        }
        Command::Generate {
            file,
            patch,
            render,
            output,
        } => {
            let (sys, problems) = load(&file)?;
            if render && sys.dim() > 2 {
                return Err(Failure::input(
                    render::RenderError::Dimension(sys.dim()).to_string(),
                ));
            }
            warn_partial(err, &problems);
            let p = fixed_point(&sys, &patch)?;
            let text = if render {
                render::svg(&sys, &p).map_err(|e| Failure::input(e.to_string()))?
            } else {
                render::dump(&sys, &p)
            };
            write_or_return(output, text)
        }
        Command::Render {
            file,
            patch,
            output,
        } => {
            let (sys, problems) = load(&file)?;
            if sys.dim() > 2 {
                return Err(Failure::input(
                    render::RenderError::Dimension(sys.dim()).to_string(),
                ));
            }
            warn_partial(err, &problems);
            let p = fixed_point(&sys, &patch)?;
            let text = render::svg(&sys, &p).map_err(|e| Failure::input(e.to_string()))?;
            write_or_return(output, text)
        }
        Command::Sequences {
            file,
            dir,
            r,
            l,
            a,
            b,
            iters,
            min_periods,
            seed_bound,
            budget,
            json,
        } => {
            let (sys, problems) = load(&file)?;
            if dir >= sys.dim() {
                return Err(Failure::input(format!(
                    "--dir {dir} out of range for dimension {}",
                    sys.dim()
                )));
            }
            let lookup = |name: &Option<String>| -> Result<Option<usize>, Failure> {
                name.as_ref()
                    .map(|n| {
                        sys.color_index(n)
                            .ok_or_else(|| Failure::input(format!("unknown color `{n}`")))
                    })
                    .transpose()
            };
            let (fa, fb) = (lookup(&a)?, lookup(&b)?);
            warn_partial(err, &problems);
            let seed = patch::find_seed(&sys, seed_bound)?;
            let iters = match iters {
                Some(n) => n,
                None => default_iterations(&sys, seed, r, l, min_periods),
            };
            let p = patch::generate(&sys, seed, iters, budget)?;
            let mut found = find_sequences(&p, dir, r, l, min_periods)?;
            found.retain(|w| {
                fa.is_none_or(|c| w.colors().0 == c) && fb.is_none_or(|c| w.colors().1 == c)
            });
            let report = SequenceRun::build(&sys, &p, found, min_periods)?;
            let header = SequenceHeader {
                dir,
                r,
                l,
                iters,
                points: p.len(),
            };
            Ok(if json {
                format!("{:#}\n", report.json(&sys, &header))
            } else {
                report.text(&sys, &header)
            })
        }
    }
}

fn default_iterations(
    sys: &MatrixFunctionSystem,
    seed: patch::Seed,
    r: u64,
    l: u64,
    min_periods: u64,
) -> u32 {
    let want = BigInt::from(2) * r * l * min_periods.max(1);
    let step: BigInt = Pow::pow(sys.expansion(), seed.level);
    let mut n = 1;
    let mut side = step.clone();
    while side < want {
        side *= &step;
        n += 1;
    }
    n
}

fn name_list(sys: &MatrixFunctionSystem, items: impl Iterator<Item = (usize, String)>) -> String {
    items
        .map(|(c, v)| format!("{}={v}", sys.color_name(c)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn row_disjointness_text(sys: &MatrixFunctionSystem, rd: &RowDisjointness) -> String {
    match rd {
        RowDisjointness::Disjoint => "disjoint".into(),
        RowDisjointness::Overlap { row, cols, map } => format!(
            "overlap row={} cols={},{} map={map}",
            sys.color_name(*row),
            sys.color_name(cols.0),
            sys.color_name(cols.1)
        ),
    }
}

fn nonperiodicity_text(n: &Option<Nonperiodicity>) -> String {
    match n {
        None => "not checked".into(),
        Some(Nonperiodicity::Assumed) => "assumed".into(),
        Some(Nonperiodicity::Scanned(scan)) => format!(
            "scanned radius={} side={} period={}",
            scan.radius,
            scan.side,
            scan.period
                .as_ref()
                .map_or("none".into(), |p| p.to_string())
        ),
    }
}

fn unknown_text(reason: &UnknownReason) -> String {
    match reason {
        UnknownReason::NotPrimitive => "not-primitive".into(),
        UnknownReason::NoSeed { bound } => format!("no-seed bound={bound}"),
        UnknownReason::BoundReached { k_max } => format!("bound-reached k_max={k_max}"),
    }
}

/// The line-oriented report: `VERDICT`, `WITNESS`, then `EVIDENCE.*` keys.
pub fn analysis_text(
    sys: &MatrixFunctionSystem,
    analysis: &crate::coincidence::Analysis,
) -> String {
    let mut s = String::new();
    let ev = &analysis.evidence;
    writeln!(s, "VERDICT: {}", analysis.verdict.outcome()).unwrap();
    match &analysis.verdict {
        Verdict::ModelSet(c) => writeln!(
            s,
            "WITNESS: modular coincidence k={} residue={} row={}",
            c.k,
            c.residue,
            sys.color_name(c.row)
        )
        .unwrap(),
        Verdict::NotModelSet(NotModelSetWitness::RowDisjointness { .. }) => {
            writeln!(s, "WITNESS: row-disjointness").unwrap()
        }
        Verdict::Unknown(_) => writeln!(s, "WITNESS: none").unwrap(),
    }
    let exponent = ev
        .primitivity_exponent
        .map_or("none".into(), |e| e.to_string());
    writeln!(s, "EVIDENCE.primitivity_exponent: {exponent}").unwrap();
    let seed = ev.seed.map_or("none".into(), |sd| {
        format!("color={} level={}", sys.color_name(sd.color), sd.level)
    });
    writeln!(s, "EVIDENCE.seed: {seed}").unwrap();
    writeln!(
        s,
        "EVIDENCE.row_disjointness: {}",
        row_disjointness_text(sys, &ev.row_disjointness)
    )
    .unwrap();
    writeln!(
        s,
        "EVIDENCE.nonperiodicity: {}",
        nonperiodicity_text(&ev.nonperiodicity)
    )
    .unwrap();
    if let Some(c) = &ev.cosets {
        let lats = name_list(
            sys,
            c.color_lattices.iter().map(|l| l.to_string()).enumerate(),
        );
        writeln!(s, "EVIDENCE.color_lattices: {lats}").unwrap();
        writeln!(s, "EVIDENCE.L_prime: {}", c.modulus).unwrap();
        let cosets = name_list(sys, c.cosets.iter().map(|p| p.to_string()).enumerate());
        writeln!(s, "EVIDENCE.cosets: {cosets}").unwrap();
    }
    if let Some(k) = ev.searched_k {
        writeln!(s, "EVIDENCE.searched_k: {k}").unwrap();
    }
    match &analysis.verdict {
        Verdict::ModelSet(c) => {
            writeln!(s, "EVIDENCE.coincidence_modulus: {}", c.modulus).unwrap();
            let fiber: Vec<String> = c
                .fiber
                .iter()
                .map(|(r, col, f)| format!("{}<-{}:{f}", sys.color_name(*r), sys.color_name(*col)))
                .collect();
            writeln!(s, "EVIDENCE.coincidence_fiber: {}", fiber.join(" ")).unwrap();
            let common = c
                .common_row_element
                .as_ref()
                .map_or("none".into(), |(r, f)| {
                    format!("row={} map={f}", sys.color_name(*r))
                });
            writeln!(s, "EVIDENCE.common_row_element: {common}").unwrap();
        }
        Verdict::Unknown(reason) => {
            writeln!(s, "EVIDENCE.unknown_reason: {}", unknown_text(reason)).unwrap()
        }
        Verdict::NotModelSet(_) => {}
    }
    s
}

/// The structured form of [`analysis_text`].
pub fn analysis_json(sys: &MatrixFunctionSystem, analysis: &crate::coincidence::Analysis) -> Value {
    let ev = &analysis.evidence;
    let witness = match &analysis.verdict {
        Verdict::ModelSet(c) => json!({
            "kind": "modular-coincidence",
            "k": c.k,
            "residue": c.residue.to_string(),
            "row": sys.color_name(c.row),
            "modulus": c.modulus.to_string(),
            "fiber": c.fiber.iter().map(|(r, col, f)| json!({
                "row": sys.color_name(*r),
                "col": sys.color_name(*col),
                "map": f.to_string(),
            })).collect::<Vec<_>>(),
        }),
        Verdict::NotModelSet(NotModelSetWitness::RowDisjointness {
            primitivity_exponent,
            ..
        }) => json!({
            "kind": "row-disjointness",
            "primitivity_exponent": primitivity_exponent,
        }),
        Verdict::Unknown(reason) => json!({ "kind": "none", "reason": unknown_text(reason) }),
    };
    let cosets = ev.cosets.as_ref().map(|c| {
        json!({
            "level": c.level,
            "color_lattices": c.color_lattices.iter().enumerate()
                .map(|(i, l)| json!({ "color": sys.color_name(i), "lattice": l.to_string() }))
                .collect::<Vec<_>>(),
            "L_prime": c.modulus.to_string(),
            "cosets": c.cosets.iter().enumerate()
                .map(|(i, p)| json!({ "color": sys.color_name(i), "representative": p.to_string() }))
                .collect::<Vec<_>>(),
        })
    });
    json!({
        "verdict": analysis.verdict.outcome(),
        "witness": witness,
        "evidence": {
            "primitivity_exponent": ev.primitivity_exponent,
            "seed": ev.seed.map(|sd| json!({ "color": sys.color_name(sd.color), "level": sd.level })),
            "row_disjointness": row_disjointness_text(sys, &ev.row_disjointness),
            "nonperiodicity": nonperiodicity_text(&ev.nonperiodicity),
            "cosets": cosets,
            "searched_k": ev.searched_k,
        },
    })
}

struct SequenceHeader {
    dir: usize,
    r: u64,
    l: u64,
    iters: u32,
    points: usize,
}

/// Candidates grouped by color pair; conditions 4 and 5 depend only on the
/// pair, so each group is checked on its first anchor.
struct SequenceRun {
    groups: Vec<(usize, WitnessCheck, Option<sequence::ExclusionReport>)>,
}

impl SequenceRun {
    fn build(
        sys: &MatrixFunctionSystem,
        p: &Patch,
        found: Vec<sequence::SequenceWitness>,
        min_periods: u64,
    ) -> Result<Self, Failure> {
        let mut pairs: std::collections::BTreeMap<(usize, usize), Vec<sequence::SequenceWitness>> =
            Default::default();
        for w in found {
            pairs.entry(w.colors()).or_default().push(w);
        }
        let mut groups = Vec::new();
        for ws in pairs.into_values() {
            let best = ws
                .iter()
                .max_by(|x, y| {
                    x.observed()
                        .cmp(&y.observed())
                        .then(y.anchor().cmp(x.anchor()))
                })
                .expect("nonempty group");
            let check = sequence::check_witness_conditions(sys, best, p, min_periods)?;
            let report = exclusion_report(sys, &check).ok();
            groups.push((ws.len(), check, report));
        }
        Ok(SequenceRun { groups })
    }

    fn verified(&self) -> usize {
        self.groups.iter().filter(|g| g.2.is_some()).count()
    }

    fn text(&self, sys: &MatrixFunctionSystem, h: &SequenceHeader) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "SEQUENCES: dir={} r={} l={} iters={} points={} candidates={}",
            h.dir,
            h.r,
            h.l,
            h.iters,
            h.points,
            self.groups.len()
        )
        .unwrap();
        for (count, check, report) in &self.groups {
            let w = &check.witness;
            let (a, b) = w.colors();
            writeln!(
                s,
                "CANDIDATE a={} b={} anchors={count} anchor={} periods={}",
                sys.color_name(a),
                sys.color_name(b),
                w.anchor(),
                w.observed()
            )
            .unwrap();
            writeln!(s, "  CONDITION.1-3: {}", check.geometry).unwrap();
            writeln!(s, "  CONDITION.4: {}", check.disjoint_superelements).unwrap();
            match &check.shared_position {
                Some(p) => writeln!(s, "  CONDITION.5: verified at {p}").unwrap(),
                None if check.disjoint_superelements == sequence::Condition::Unavailable => {
                    writeln!(s, "  CONDITION.5: unavailable").unwrap()
                }
                None => writeln!(s, "  CONDITION.5: failed").unwrap(),
            }
            writeln!(s, "  SELF_REPRODUCTION: {}", check.self_reproduction).unwrap();
            if let Some(rep) = report {
                writeln!(s, "  EXCLUSION: {}", rep.describe()).unwrap();
                writeln!(s, "  SCALE: witness verified at finite scale").unwrap();
                writeln!(s, "  GUIDANCE: {CHECKERBOARD_GUIDANCE}").unwrap();
            }
        }
        writeln!(s, "VERIFIED: {}", self.verified()).unwrap();
        s
    }

    fn json(&self, sys: &MatrixFunctionSystem, h: &SequenceHeader) -> Value {
        let candidates: Vec<Value> = self
            .groups
            .iter()
            .map(|(count, check, report)| {
                let w = &check.witness;
                json!({
                    "a": sys.color_name(w.colors().0),
                    "b": sys.color_name(w.colors().1),
                    "anchors": count,
                    "anchor": w.anchor().to_string(),
                    "periods": w.observed(),
                    "conditions": {
                        "1-3": check.geometry.to_string(),
                        "4": check.disjoint_superelements.to_string(),
                        "5": check.shared_position.as_ref().map(|p| p.to_string()),
                    },
                    "self_reproduction": check.self_reproduction.to_string(),
                    "exclusion": report.as_ref().map(|r| json!({
                        "set": r.describe(),
                        "scale": "witness verified at finite scale",
                        "guidance": CHECKERBOARD_GUIDANCE,
                    })),
                })
            })
            .collect();
        json!({
            "dir": h.dir,
            "r": h.r,
            "l": h.l,
            "iters": h.iters,
            "points": h.points,
            "candidates": candidates,
            "verified": self.verified(),
        })
    }
}
