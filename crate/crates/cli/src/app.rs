//! Subcommand dispatch. Exit codes: 0 success, 1 domain error (valid usage,
//! impossible request or failed verification), 2 usage error.
//!
//! Angles use the shared grammar `p/q` or binary `0.<bits>:<bits>`; complex
//! numbers are `re,im` (or a bare real part); the machine flag `--machine`
//! switches to the stable whitespace-separated record formats documented in
//! the README.

use std::io::Write;
use std::path::PathBuf;

use num_complex::Complex64;

use externray_core::combinat::{
    count_parabolic, is_primitive, lavaurs_pairs, misiurewicz_class, portrait_cycle,
    sector_widths, RayPair,
};
use externray_core::kneading::{internal_address_of_angle, kneading};
use externray_core::numerics::{
    component_boundary, find_centers, solve_misiurewicz, trace_dynamic_ray,
    trace_parameter_ray, verify_structure, RayTrace, SolverConfig, TraceStatus,
};
use externray_core::Angle;

use crate::render::{overlay_trace, render, write_image, PlaneSpec, RenderSpec};

/// Largest ray period / Misiurewicz `l+n` the numeric subcommands accept.
const NUMERIC_ANGLE_CAP: u64 = 16;
/// Largest period for center/boundary solving.
const CENTER_CAP: u32 = 12;
/// Largest `l+n` the misiurewicz subcommand enumerates.
const MISIUREWICZ_ENUM_CAP: u64 = 24;

const USAGE: &str = "usage: externray [--machine] <command> [args]

commands:
  knead <angle>                         kneading sequence of an angle
  address <angle>                       internal address of a periodic angle
  pair <angle>                          the partner angle whose ray lands with it
  pairs --period <n>                    all ray pairs of exact period n
  count --max <n>                       parabolic counts s_1 .. s_n
  portrait <angle>                      orbit portrait of a periodic angle
  misiurewicz <angle>                   all angles landing with a preperiodic angle
  trace --parameter --angle <a>         trace a parameter ray
  trace --dynamic <c> --angle <a>       trace a dynamic ray in the plane of c
  solve center --period <n>             all period-n centers
  solve boundary --center <c> --period <n> --t <t>   boundary point at multiplier angle t
  solve misiurewicz --preperiod <l> --period <n> --seed <c>
  verify --max-period <n> [--misiurewicz-sum <m>]    structure checks
  render --plane mandelbrot|julia [--c <c>] [--center <c>] [--width <w>]
         [--pixels WxH] [--max-iter <n>] [--escape-radius <r>]
         [--ray <angle>]... --out <file.ppm>

angles: p/q or 0.<bits>:<bits>;  complex numbers: re,im";

pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(args, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\n{USAGE}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

enum Failure {
    Usage(String),
    Domain(String),
    Io(String),
}

impl From<externray_core::Error> for Failure {
    fn from(e: externray_core::Error) -> Failure {
        Failure::Domain(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn domain<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Domain(msg.into()))
}

struct Ctx<'a> {
    machine: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn say(&mut self, line: impl AsRef<str>) -> Result<(), Failure> {
        writeln!(self.out, "{}", line.as_ref()).map_err(|e| Failure::Io(e.to_string()))
    }
}

fn dispatch(args: &[String], out: &mut dyn Write) -> Result<(), Failure> {
    let mut rest: Vec<String> = args.to_vec();
    let machine = {
        let before = rest.len();
        rest.retain(|a| a != "--machine");
        rest.len() != before
    };
    let mut ctx = Ctx { machine, out };
    let Some(command) = rest.first().cloned() else {
        return usage("missing command");
    };
    let rest = &rest[1..];
    match command.as_str() {
        "knead" => cmd_knead(&mut ctx, rest),
        "address" => cmd_address(&mut ctx, rest),
        "pair" => cmd_pair(&mut ctx, rest),
        "pairs" => cmd_pairs(&mut ctx, rest),
        "count" => cmd_count(&mut ctx, rest),
        "portrait" => cmd_portrait(&mut ctx, rest),
        "misiurewicz" => cmd_misiurewicz(&mut ctx, rest),
        "trace" => cmd_trace(&mut ctx, rest),
        "solve" => cmd_solve(&mut ctx, rest),
        "verify" => cmd_verify(&mut ctx, rest),
        "render" => cmd_render(&mut ctx, rest),
        other => usage(format!("unknown command `{other}`")),
    }
}

fn parse_angle(text: &str) -> Result<Angle, Failure> {
    text.parse::<Angle>()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_complex(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || Failure::Usage(format!("malformed complex number `{text}` (want re,im)"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(Complex64::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

/// `t` as a real in [0,1): accepts `p/q` or a float literal.
fn parse_turn(text: &str) -> Result<f64, Failure> {
    let value = if let Some((p, q)) = text.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| Failure::Usage(format!("bad t `{text}`")))?;
        let q: f64 = q.trim().parse().map_err(|_| Failure::Usage(format!("bad t `{text}`")))?;
        if q == 0.0 {
            return usage(format!("bad t `{text}`"));
        }
        p / q
    } else {
        text.parse().map_err(|_| Failure::Usage(format!("bad t `{text}`")))?
    };
    if !(0.0..1.0).contains(&value) {
        return usage(format!("t = {value} outside [0, 1)"));
    }
    Ok(value)
}

/// Pulls `--flag value` pairs and positionals out of an argument list.
struct Flags {
    positional: Vec<String>,
    pairs: Vec<(String, String)>,
    switches: Vec<String>,
}

fn collect_flags(args: &[String], value_flags: &[&str], switch_flags: &[&str]) -> Result<Flags, Failure> {
    let mut flags = Flags { positional: vec![], pairs: vec![], switches: vec![] };
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        if let Some(name) = arg.strip_prefix("--") {
            if switch_flags.contains(&name) {
                flags.switches.push(name.to_string());
            } else if value_flags.contains(&name) {
                match it.next() {
                    Some(v) => flags.pairs.push((name.to_string(), v.clone())),
                    None => return usage(format!("--{name} needs a value")),
                }
            } else {
                return usage(format!("unknown flag --{name}"));
            }
        } else {
            flags.positional.push(arg.clone());
        }
    }
    Ok(flags)
}

impl Flags {
    fn get(&self, name: &str) -> Option<&str> {
        self.pairs
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn get_all(&self, name: &str) -> Vec<&str> {
        self.pairs
            .iter()
            .filter(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    fn has(&self, name: &str) -> bool {
        self.switches.iter().any(|s| s == name)
    }

    fn require(&self, name: &str) -> Result<&str, Failure> {
        self.get(name)
            .ok_or_else(|| Failure::Usage(format!("missing --{name}")))
    }
}

fn one_positional<'a>(flags: &'a Flags, what: &str) -> Result<&'a str, Failure> {
    match flags.positional.as_slice() {
        [single] => Ok(single),
        [] => usage(format!("missing {what}")),
        _ => usage(format!("too many arguments, expected one {what}")),
    }
}

fn cmd_knead(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &[], &[])?;
    let theta = parse_angle(one_positional(&flags, "angle")?)?;
    ctx.say(kneading(&theta).to_string())
}

fn cmd_address(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &[], &[])?;
    let theta = parse_angle(one_positional(&flags, "angle")?)?;
    let addr = internal_address_of_angle(&theta)?;
    ctx.say(addr.to_string())
}

fn cmd_pair(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &[], &[])?;
    let theta = parse_angle(one_positional(&flags, "angle")?)?;
    let partner = externray_core::combinat::conjugate_angle(&theta)?;
    ctx.say(partner.to_string())
}

fn pair_record(pair: &RayPair) -> String {
    let addr = internal_address_of_angle(pair.low())
        .map(|a| a.to_string())
        .unwrap_or_else(|_| "-".into());
    format!(
        "{} {} {} {} {} {}",
        pair.period(),
        pair.low(),
        pair.high(),
        pair.kneading_sequence(),
        addr,
        if is_primitive(pair) { "primitive" } else { "satellite" }
    )
}

fn cmd_pairs(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &["period"], &[])?;
    let n: u32 = flags
        .require("period")?
        .parse()
        .map_err(|_| Failure::Usage("bad --period".into()))?;
    let pairs = lavaurs_pairs(n)?;
    if !ctx.machine {
        ctx.say("period low high kneading address kind")?;
    }
    for pair in pairs.iter().filter(|p| p.period() == n as u64) {
        ctx.say(pair_record(pair))?;
    }
    Ok(())
}

fn cmd_count(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &["max"], &[])?;
    let n: u32 = flags
        .require("max")?
        .parse()
        .map_err(|_| Failure::Usage("bad --max".into()))?;
    if n == 0 || n > 64 {
        return domain("--max must be between 1 and 64");
    }
    let counts: Vec<String> = (1..=n).map(|k| count_parabolic(k).to_string()).collect();
    ctx.say(counts.join(" "))
}

fn cmd_portrait(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &[], &[])?;
    let theta = parse_angle(one_positional(&flags, "angle")?)?;
    let portrait = portrait_cycle(&theta)?;
    if ctx.machine {
        ctx.say(format!(
            "portrait {} {} {} {}/{}",
            portrait.ray_period(),
            portrait.orbit_period(),
            portrait.rays_per_point(),
            portrait.rotation().numer(),
            portrait.rotation().denom(),
        ))?;
    } else {
        ctx.say(format!(
            "ray period {}, orbit period {}, {} rays per point, rotation {}/{}",
            portrait.ray_period(),
            portrait.orbit_period(),
            portrait.rays_per_point(),
            portrait.rotation().numer(),
            portrait.rotation().denom(),
        ))?;
    }
    for (i, set) in portrait.point_angles().iter().enumerate() {
        let angles: Vec<String> = set.iter().map(|a| a.to_string()).collect();
        let mut line = format!("point {i} {}", angles.join(" "));
        if !ctx.machine && set.len() >= 2 {
            let widths = sector_widths(set)?;
            let ws: Vec<String> = widths.widths().iter().map(|w| w.to_string()).collect();
            line.push_str(&format!("  widths {}", ws.join(" ")));
        }
        ctx.say(line)?;
    }
    Ok(())
}

fn cmd_misiurewicz(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &[], &[])?;
    let theta = parse_angle(one_positional(&flags, "angle")?)?;
    let t = theta.orbit_type();
    if t.preperiod + t.period > MISIUREWICZ_ENUM_CAP {
        return domain(format!(
            "preperiod + period = {} exceeds the enumeration cap {MISIUREWICZ_ENUM_CAP}",
            t.preperiod + t.period
        ));
    }
    let class = misiurewicz_class(&theta)?;
    let angles: Vec<String> = class.angles().iter().map(|a| a.to_string()).collect();
    if ctx.machine {
        ctx.say(format!(
            "misiurewicz {} {} {} {}",
            class.preperiod(),
            class.ray_period(),
            class.kneading_period(),
            angles.join(" ")
        ))
    } else {
        ctx.say(angles.join(" "))
    }
}

fn trace_lines(ctx: &mut Ctx, trace: &RayTrace) -> Result<(), Failure> {
    let status = match trace.status {
        TraceStatus::Landed => "landed".to_string(),
        TraceStatus::Truncated => "truncated".to_string(),
        TraceStatus::Lost { level } => format!("lost-at-level-{level}"),
    };
    if ctx.machine {
        for (i, (t, z)) in trace.points.iter().enumerate() {
            ctx.say(format!("point {i} {t:.17e} {:.17} {:.17}", z.re, z.im))?;
        }
        match trace.landing {
            Some(z) => ctx.say(format!("landing {:.17} {:.17} {status}", z.re, z.im))?,
            None => ctx.say(format!("landing nan nan {status}"))?,
        }
    } else {
        let last = trace.points.last().unwrap();
        ctx.say(format!(
            "{} levels traced down to potential {:.3e}; status {status}",
            trace.points.len(),
            last.0
        ))?;
        if let Some(z) = trace.landing {
            ctx.say(format!("landing estimate {:.12} {:+.12}i", z.re, z.im))?;
        }
    }
    Ok(())
}

fn check_numeric_angle(theta: &Angle) -> Result<(), Failure> {
    let t = theta.orbit_type();
    if t.preperiod + t.period > NUMERIC_ANGLE_CAP {
        return domain(format!(
            "angle type ({}, {}) too deep for double-precision tracing (cap {NUMERIC_ANGLE_CAP})",
            t.preperiod, t.period
        ));
    }
    Ok(())
}

fn cmd_trace(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &["angle", "dynamic"], &["parameter"])?;
    let theta = parse_angle(flags.require("angle")?)?;
    check_numeric_angle(&theta)?;
    let cfg = SolverConfig::default();
    let trace = match (flags.has("parameter"), flags.get("dynamic")) {
        (true, None) => trace_parameter_ray(&theta, &cfg),
        (false, Some(c)) => trace_dynamic_ray(parse_complex(c)?, &theta, &cfg),
        _ => return usage("pass exactly one of --parameter or --dynamic <c>"),
    };
    trace_lines(ctx, &trace)
}

fn cmd_solve(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let Some(kind) = args.first() else {
        return usage("solve needs a kind: center, boundary or misiurewicz");
    };
    let rest = &args[1..];
    let cfg = SolverConfig::default();
    match kind.as_str() {
        "center" => {
            let flags = collect_flags(rest, &["period"], &[])?;
            let n: u32 = flags
                .require("period")?
                .parse()
                .map_err(|_| Failure::Usage("bad --period".into()))?;
            if n == 0 || n > CENTER_CAP {
                return domain(format!("--period must be between 1 and {CENTER_CAP}"));
            }
            for r in find_centers(n, &cfg)? {
                ctx.say(format!("{:.17} {:.17} {:.3e}", r.parameter.re, r.parameter.im, r.residual))?;
            }
            Ok(())
        }
        "boundary" => {
            let flags = collect_flags(rest, &["center", "period", "t"], &[])?;
            let center = parse_complex(flags.require("center")?)?;
            let n: u32 = flags
                .require("period")?
                .parse()
                .map_err(|_| Failure::Usage("bad --period".into()))?;
            if n == 0 || n > CENTER_CAP {
                return domain(format!("--period must be between 1 and {CENTER_CAP}"));
            }
            let t = parse_turn(flags.require("t")?)?;
            let r = component_boundary(center, n, t, &cfg)?;
            let m = r.multiplier.unwrap_or_default();
            ctx.say(format!(
                "{:.17} {:.17} {:.3e} multiplier {:.12} {:+.12}i",
                r.parameter.re, r.parameter.im, r.residual, m.re, m.im
            ))
        }
        "misiurewicz" => {
            let flags = collect_flags(rest, &["preperiod", "period", "seed"], &[])?;
            let l: u32 = flags
                .require("preperiod")?
                .parse()
                .map_err(|_| Failure::Usage("bad --preperiod".into()))?;
            let n: u32 = flags
                .require("period")?
                .parse()
                .map_err(|_| Failure::Usage("bad --period".into()))?;
            if l == 0 || (l + n) as u64 > NUMERIC_ANGLE_CAP {
                return domain(format!(
                    "need preperiod >= 1 and preperiod + period <= {NUMERIC_ANGLE_CAP}"
                ));
            }
            let seed = parse_complex(flags.require("seed")?)?;
            let r = solve_misiurewicz(l, n, seed, &cfg)?;
            let m = r.multiplier.unwrap_or_default();
            ctx.say(format!(
                "{:.17} {:.17} {:.3e} multiplier {:.12} {:+.12}i",
                r.parameter.re, r.parameter.im, r.residual, m.re, m.im
            ))
        }
        other => usage(format!("unknown solve kind `{other}`")),
    }
}

fn cmd_verify(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(args, &["max-period", "misiurewicz-sum"], &[])?;
    let max_period: u32 = flags
        .require("max-period")?
        .parse()
        .map_err(|_| Failure::Usage("bad --max-period".into()))?;
    if max_period == 0 || max_period as u64 > NUMERIC_ANGLE_CAP.min(CENTER_CAP as u64) {
        return domain(format!("--max-period must be between 1 and {CENTER_CAP}"));
    }
    let mis_sum: u32 = match flags.get("misiurewicz-sum") {
        Some(v) => v.parse().map_err(|_| Failure::Usage("bad --misiurewicz-sum".into()))?,
        None => 0,
    };
    if mis_sum as u64 > NUMERIC_ANGLE_CAP {
        return domain(format!("--misiurewicz-sum capped at {NUMERIC_ANGLE_CAP}"));
    }
    let report = verify_structure(max_period, mis_sum, &SolverConfig::default())?;
    for check in &report.checks {
        ctx.say(check.to_string())?;
    }
    let (passed, total) = (
        report.checks.iter().filter(|c| c.pass).count(),
        report.checks.len(),
    );
    if !ctx.machine {
        ctx.say(format!("{passed}/{total} checks passed"))?;
    }
    if report.all_pass() {
        Ok(())
    } else {
        domain(format!("{} checks failed", total - passed))
    }
}

fn cmd_render(ctx: &mut Ctx, args: &[String]) -> Result<(), Failure> {
    let flags = collect_flags(
        args,
        &["plane", "c", "center", "width", "pixels", "max-iter", "escape-radius", "ray", "out"],
        &[],
    )?;
    let plane = match flags.get("plane").unwrap_or("mandelbrot") {
        "mandelbrot" => PlaneSpec::Mandelbrot,
        "julia" => PlaneSpec::Julia(parse_complex(
            flags.get("c").ok_or_else(|| Failure::Usage("julia needs --c".into()))?,
        )?),
        other => return usage(format!("unknown plane `{other}`")),
    };
    let default_center = match plane {
        PlaneSpec::Mandelbrot => Complex64::new(-0.5, 0.0),
        PlaneSpec::Julia(_) => Complex64::new(0.0, 0.0),
    };
    let center = match flags.get("center") {
        Some(v) => parse_complex(v)?,
        None => default_center,
    };
    let width: f64 = match flags.get("width") {
        Some(v) => v.parse().map_err(|_| Failure::Usage("bad --width".into()))?,
        None => 3.2,
    };
    let pixels = match flags.get("pixels") {
        Some(v) => {
            let (w, h) = v
                .split_once('x')
                .ok_or_else(|| Failure::Usage("bad --pixels (want WxH)".into()))?;
            (
                w.parse().map_err(|_| Failure::Usage("bad --pixels".into()))?,
                h.parse().map_err(|_| Failure::Usage("bad --pixels".into()))?,
            )
        }
        None => (800, 600),
    };
    let max_iterations: u32 = match flags.get("max-iter") {
        Some(v) => v.parse().map_err(|_| Failure::Usage("bad --max-iter".into()))?,
        None => 256,
    };
    let escape_radius: f64 = match flags.get("escape-radius") {
        Some(v) => v.parse().map_err(|_| Failure::Usage("bad --escape-radius".into()))?,
        None => 2.0,
    };
    let mut overlays = Vec::new();
    for ray in flags.get_all("ray") {
        let theta = parse_angle(ray)?;
        check_numeric_angle(&theta)?;
        overlays.push(theta);
    }
    let out_path = PathBuf::from(flags.require("out")?);

    let spec = RenderSpec {
        plane,
        center,
        width,
        pixels,
        max_iterations,
        escape_radius,
        overlays,
    };
    spec.validate().map_err(Failure::Domain)?;
    let mut img = render(&spec).map_err(Failure::Domain)?;
    let cfg = SolverConfig::default();
    for theta in &spec.overlays {
        let trace = match spec.plane {
            PlaneSpec::Mandelbrot => trace_parameter_ray(theta, &cfg),
            PlaneSpec::Julia(c) => trace_dynamic_ray(c, theta, &cfg),
        };
        img = overlay_trace(img, &spec, &trace);
    }
    write_image(&img, &out_path).map_err(Failure::Io)?;
    if !ctx.machine {
        ctx.say(format!(
            "wrote {} ({}x{}, {} rays)",
            out_path.display(),
            spec.pixels.0,
            spec.pixels.1,
            spec.overlays.len()
        ))?;
    }
    Ok(())
}
