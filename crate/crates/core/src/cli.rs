//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the model rejects the input, 2 on usage
//! errors. Results go to `--out`, else to `$BETAHAND_OUT_DIR/<verb>.<ext>`
//! when that variable is set, else to standard output.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::collision::{exhaustive_sweep, is_self_intersecting, no_self_intersection_guarantee};
use crate::error::{Error, Result};
use crate::geometry::{convex_hausdorff, convex_hull};
use crate::grasp::{grasp_family, grasp_transformed_circle, GraspOptions};
use crate::hand::{grasp_cylinder_scene, HandSpec, SceneOptions};
use crate::kinematics::{evaluate_junctions, junctions_csv};
use crate::model::{ControlSequence, Digit, FingerSpec, Vec2, ALGEBRAIC_TOL, GEOMETRIC_TOL};
use crate::reach::{enumerate_reachable, hull_vertices_2pi3, DEFAULT_DEDUPE_TOL};
use crate::render;

pub const OUT_DIR_VAR: &str = "BETAHAND_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "betahand", version, about = "Self-similar robot hand: kinematics, reachable sets, grasps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct FingerArgs {
    /// Ratio between consecutive phalanx lengths (> 1).
    #[arg(long)]
    rho: f64,
    /// Rotation angle in radians (degrees with --degrees).
    #[arg(long, allow_negative_numbers = true)]
    omega: f64,
    #[arg(long)]
    degrees: bool,
}

impl FingerArgs {
    fn omega(&self) -> f64 {
        if self.degrees {
            self.omega * PI / 180.0
        } else {
            self.omega
        }
    }

    fn spec(&self) -> Result<FingerSpec> {
        FingerSpec::canonical(self.rho, self.omega()).validate()
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Junctions of one finger under a control file.
    Eval {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long)]
        controls: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Every endpoint reachable with exactly `depth` controls.
    Reach {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_DEDUPE_TOL)]
        dedupe_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Convex hull of the depth-`depth` reachable set.
    Hull {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_DEDUPE_TOL)]
        dedupe_tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Self-intersection of one control file, or of every sequence up to `depth`.
    CheckIntersect {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long, conflicts_with = "depth", required_unless_present = "depth")]
        controls: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, default_value_t = GEOMETRIC_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Primary grasp, optionally moved by a prefix control file.
    GraspCircle {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long)]
        prefix: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        extra: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Graspable images of the primary circle under prefixes up to `depth`.
    GraspFamily {
        #[command(flatten)]
        finger: FingerArgs,
        #[arg(long)]
        depth: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Cylinder grasp by a whole hand.
    HandScene {
        #[arg(long)]
        hand: PathBuf,
        /// Digits (1-4) mapping the primary circle to the cylinder section.
        #[arg(long, default_value = "3")]
        prefix_digits: String,
        /// Control file driving finger 1 as a thumb.
        #[arg(long)]
        thumb: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        extra: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

impl Command {
    fn verb(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Reach { .. } => "reach",
            Command::Hull { .. } => "hull",
            Command::CheckIntersect { .. } => "check-intersect",
            Command::GraspCircle { .. } => "grasp-circle",
            Command::GraspFamily { .. } => "grasp-family",
            Command::HandScene { .. } => "hand-scene",
        }
    }

    fn out(&self) -> &OutArgs {
        match self {
            Command::Eval { out, .. }
            | Command::Reach { out, .. }
            | Command::Hull { out, .. }
            | Command::CheckIntersect { out, .. }
            | Command::GraspCircle { out, .. }
            | Command::GraspFamily { out, .. }
            | Command::HandScene { out, .. } => out,
        }
    }

    fn formats(&self) -> &'static [Format] {
        match self {
            Command::Eval { .. } | Command::Reach { .. } | Command::Hull { .. } => {
                &[Format::Csv, Format::Json, Format::Svg]
            }
            Command::CheckIntersect { .. } => &[Format::Json],
            _ => &[Format::Json, Format::Svg],
        }
    }
}

/// Hull vertices, with the closed-form vertices and their distance when `omega = 2 pi / 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullOutput {
    pub depth: usize,
    pub vertices: Vec<Vec2>,
    pub closed_form: Option<Vec<Vec2>>,
    pub hausdorff: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionOutput {
    pub self_intersecting: bool,
    pub pair: Option<(usize, usize)>,
    pub guaranteed_free: bool,
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_digits(text: &str) -> Result<Vec<Digit>> {
    text.chars()
        .filter(|c| !matches!(c, ',' | ' '))
        .map(|c| {
            let n = c
                .to_digit(10)
                .ok_or_else(|| Error::InvalidControls(format!("'{c}' is not a digit")))?;
            Digit::try_from(n as u8)
        })
        .collect()
}

fn execute(cmd: &Command, format: Format) -> Result<String> {
    match cmd {
        Command::Eval { finger, controls, .. } => {
            let controls: ControlSequence = read_json(controls)?;
            let config = evaluate_junctions(&finger.spec()?, &controls)?;
            match format {
                Format::Csv => Ok(junctions_csv(&config)),
                Format::Json => to_json(&config),
                Format::Svg => Ok(render::configuration_svg(&config, None)),
            }
        }
        Command::Reach {
            finger,
            depth,
            dedupe_tol,
            ..
        } => {
            let cloud = enumerate_reachable(&finger.spec()?, *depth, *dedupe_tol)?;
            match format {
                Format::Csv => Ok(cloud.to_csv()),
                Format::Json => to_json(&cloud),
                Format::Svg => Ok(render::cloud_svg(&cloud)),
            }
        }
        Command::Hull {
            finger,
            depth,
            dedupe_tol,
            ..
        } => {
            let spec = finger.spec()?;
            let cloud = enumerate_reachable(&spec, *depth, *dedupe_tol)?;
            let vertices = convex_hull(&cloud.points);
            let closed_form = if (spec.omega - 2.0 * PI / 3.0).abs() <= ALGEBRAIC_TOL {
                Some(convex_hull(&hull_vertices_2pi3(spec.rho)?))
            } else {
                None
            };
            let hausdorff = closed_form.as_ref().map(|c| convex_hausdorff(&vertices, c));
            match format {
                Format::Csv => {
                    let mut out = String::from("x,y\n");
                    for p in &vertices {
                        out.push_str(&format!("{},{}\n", p.x, p.y));
                    }
                    Ok(out)
                }
                Format::Json => to_json(&HullOutput {
                    depth: *depth,
                    vertices,
                    closed_form,
                    hausdorff,
                }),
                Format::Svg => Ok(render::hull_svg(&cloud, &vertices)),
            }
        }
        Command::CheckIntersect {
            finger,
            controls,
            depth,
            tol,
            ..
        } => {
            let spec = finger.spec()?;
            match (controls, depth) {
                (Some(path), _) => {
                    let controls: ControlSequence = read_json(path)?;
                    let pair = is_self_intersecting(&evaluate_junctions(&spec, &controls)?, *tol);
                    to_json(&IntersectionOutput {
                        self_intersecting: pair.is_some(),
                        pair,
                        guaranteed_free: no_self_intersection_guarantee(spec.rho, spec.omega),
                    })
                }
                (None, Some(depth)) => to_json(&exhaustive_sweep(spec.rho, spec.omega, *depth, *tol)?),
                (None, None) => unreachable!("clap requires one of --controls and --depth"),
            }
        }
        Command::GraspCircle {
            finger, prefix, extra, ..
        } => {
            let spec = finger.spec()?;
            let prefix: ControlSequence = match prefix {
                Some(path) => read_json(path)?,
                None => ControlSequence::default(),
            };
            let opts = GraspOptions {
                extra_phalanxes: *extra,
                ..GraspOptions::default()
            };
            let report = grasp_transformed_circle(spec.rho, spec.omega, &prefix, &opts)?;
            match format {
                Format::Svg => {
                    let config = evaluate_junctions(&spec, &report.controls)?;
                    Ok(render::grasp_svg(&config, &report))
                }
                _ => to_json(&report),
            }
        }
        Command::GraspFamily { finger, depth, .. } => {
            let spec = finger.spec()?;
            let reports = grasp_family(spec.rho, spec.omega, *depth, &GraspOptions::default())?;
            match format {
                Format::Svg => Ok(render::family_svg(&spec, &reports)),
                _ => to_json(&reports),
            }
        }
        Command::HandScene {
            hand,
            prefix_digits,
            thumb,
            extra,
            ..
        } => {
            let hand: HandSpec = read_json(hand)?;
            let opts = SceneOptions {
                thumb_controls: match thumb {
                    Some(path) => Some(read_json(path)?),
                    None => None,
                },
                extra_phalanxes: *extra,
                ..SceneOptions::default()
            };
            let scene = grasp_cylinder_scene(&hand, &parse_digits(prefix_digits)?, &opts)?;
            match format {
                Format::Svg => {
                    let configs = scene
                        .fingers
                        .iter()
                        .map(|f| {
                            let spec = hand.fingers[f.finger - 1];
                            Ok((evaluate_junctions(&spec, &f.report.controls)?, f.plane_offset))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(render::scene_svg(&scene, &configs))
                }
                _ => to_json(&scene),
            }
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> std::result::Result<(), Failure> {
    let cmd = &cli.command;
    let out = cmd.out();
    let allowed = cmd.formats();
    let format = out.format.unwrap_or(allowed[0]);
    if !allowed.contains(&format) {
        return Err(Failure::Usage(format!(
            "{} does not support --format {}",
            cmd.verb(),
            format.ext()
        )));
    }
    let _ = writeln!(stderr, "betahand {}: {:?}", cmd.verb(), cmd);

    let text = execute(cmd, format)?;
    let target = match (&out.out, std::env::var_os(OUT_DIR_VAR)) {
        (Some(path), _) => Some(path.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("{}.{}", cmd.verb(), format.ext()))),
        (None, None) => None,
    };
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(Error::from)?;
            }
            fs::write(&path, text).map_err(Error::from)?;
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
        None => stdout.write_all(text.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) with explicit output streams.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match dispatch(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.name());
            1
        }
    }
}

/// Runs the CLI against the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
