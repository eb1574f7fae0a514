//! Command-line front end: one subcommand per operation, text or JSON output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::artin_schreier::{
    build_deformed_cover, deformation_direction_valuation, direction_range, genus_rh, harbater_dim,
    independence_check, parameter_count, polar_reduce, AsClass,
};
use crate::automorphisms::default_prec;
use crate::chebyshev::{chebyshev_report, mobius_order_test, versal_m1_check};
use crate::cohomology::{cohomology_report, distinguished_class, h1_module_structure, PrecisionPolicy};
use crate::deformations::{
    default_small_quotient, global_dim_report, krull_dim_local, obstruction_class, order_condition_check,
};
use crate::error::{Error, Result};
use crate::rings::{mk_ring, parse_ring, AnyRing, ArtinRing, Ring};
use crate::suite::{run_suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(name = "wildram", version, about = "Deformations of order-p automorphisms of k[[T]]")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PM {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub m: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// dim H¹ and H² by brute force against the closed form.
    Cohom {
        #[command(flatten)]
        pm: PM,
        /// Initial window size.
        #[arg(long)]
        prec: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Elementary divisors of H¹ as a module over k[[Y]].
    CohomStructure {
        #[command(flatten)]
        pm: PM,
        #[command(flatten)]
        common: Common,
    },
    /// T_p, S_{p−1}, the Bézout certificate and ψ; with --ring/--a also the Möbius order test.
    Chebyshev {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ring: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Order-p check of σ_X over Z/p^n[X]/(ψ).
    VersalM1 {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Polar part of an Artin–Schreier class.
    Polar {
        #[arg(long)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Dimension of the Harbater space.
    Harbater {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        conductors: Vec<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Genus by Riemann–Hurwitz.
    Genus {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        conductors: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        genus_quotient: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Deformed Artin–Schreier cover, a single direction, or the independence check.
    Asdeform {
        #[command(flatten)]
        pm: PM,
        /// Coefficient ring; defaults to F_p.
        #[arg(long)]
        ring: Option<String>,
        /// Comma-separated parameters; defaults to the ring variables.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long)]
        direction: Option<u64>,
        #[arg(long)]
        independence: bool,
        #[arg(long)]
        prec: Option<i64>,
        #[command(flatten)]
        common: Common,
    },
    /// σ_a^p = Id by composition against Σ a^i = 0.
    OrderCheck {
        #[command(flatten)]
        pm: PM,
        #[arg(long)]
        ring: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        common: Common,
    },
    /// Obstruction to lifting σ_a along a small extension.
    Obstruction {
        #[command(flatten)]
        pm: PM,
        /// The larger ring A′.
        #[arg(long)]
        ring: String,
        /// The quotient A; defaults to A′ modulo its socle power.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        common: Common,
    },
    /// Local Krull dimension of the versal ring.
    Krull {
        #[command(flatten)]
        pm: PM,
        #[command(flatten)]
        common: Common,
    },
    /// Local and global tangent counts with consistency flags.
    Global {
        #[arg(long)]
        p: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        conductors: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        genus_quotient: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

/// Result of a subcommand: the payload and whether every checked identity held.
struct Outcome {
    value: Value,
    verified: bool,
}

fn ok<T: Serialize>(v: &T) -> Outcome {
    Outcome {
        value: serde_json::to_value(v).expect("reports serialize"),
        verified: true,
    }
}

fn checked<T: Serialize>(v: &T, verified: bool) -> Outcome {
    Outcome {
        verified,
        ..ok(v)
    }
}

macro_rules! with_ring {
    ($any:expr, $r:ident => $body:expr) => {
        match $any {
            AnyRing::Zmod($r) => $body,
            AnyRing::Artin($r) => $body,
            AnyRing::Rationals($r) => $body,
        }
    };
}

fn artin(text: &str) -> Result<(crate::rings::RingDescriptor, ArtinRing)> {
    let d = parse_ring(text)?;
    let r = ArtinRing::new(&d)?;
    Ok((d, r))
}

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Cohom { pm, prec, .. } => {
            let policy = PrecisionPolicy {
                initial_window: *prec,
                max_window: None,
            };
            let r = cohomology_report(pm.p, pm.m, &policy, false)?;
            let class = if pm.p > 2 {
                Some(distinguished_class(pm.p, pm.m, &policy)?.as_str())
            } else {
                None
            };
            let mut v = serde_json::to_value(&r).expect("reports serialize");
            v["distinguished_class"] = json!(class);
            let verified = r.dim_h1 == r.dim_h1_formula && r.dim_h2 == r.dim_h2_formula;
            Ok(Outcome { value: v, verified })
        }
        Command::CohomStructure { pm, .. } => {
            let r = h1_module_structure(pm.p, pm.m)?;
            let verified = r.failures().is_empty();
            Ok(checked(&r, verified))
        }
        Command::Chebyshev { p, ring, a, .. } => {
            let r = chebyshev_report(*p)?;
            let verified = r.laurent_identities
                && r.bezout_verified
                && r.denominators_powers_of_two
                && r.psi_divides_generators;
            let mut v = serde_json::to_value(&r).expect("reports serialize");
            match (ring, a) {
                (Some(ring), Some(a)) => {
                    let any = mk_ring(&parse_ring(ring)?)?;
                    let t = with_ring!(&any, r => {
                        let x = r.parse_element(a)?;
                        serde_json::to_value(mobius_order_test(*p, r, &x)?).expect("reports serialize")
                    });
                    v["mobius"] = t;
                }
                (None, None) => {}
                _ => return Err(Error::Precondition("--ring and --a go together".into())),
            }
            Ok(Outcome { value: v, verified })
        }
        Command::VersalM1 { p, n, .. } => {
            let r = versal_m1_check(*p, *n)?;
            let verified = r.order_p && r.nontrivial;
            Ok(checked(&r, verified))
        }
        Command::Polar { p, input, .. } => {
            let r = polar_reduce(&AsClass::parse(*p, input)?);
            let verified = r.verify();
            let v = json!({
                "p": p,
                "input": r.input.to_literal(),
                "polar": r.polar.as_class().to_literal(),
                "conductor": r.polar.m,
                "witness": r.witness.to_literal(),
                "steps": r.steps,
                "verified": verified,
            });
            Ok(Outcome { value: v, verified })
        }
        Command::Harbater { p, conductors, .. } => Ok(ok(&harbater_dim(*p, conductors)?)),
        Command::Genus {
            p,
            conductors,
            genus_quotient,
            ..
        } => {
            let g = genus_rh(*p, conductors, *genus_quotient)?;
            Ok(ok(&json!({
                "p": p,
                "conductors": conductors,
                "genus_quotient": genus_quotient,
                "genus": g,
            })))
        }
        Command::Asdeform {
            pm,
            ring,
            a,
            direction,
            independence,
            prec,
            ..
        } => {
            if let Some(j) = direction {
                return Ok(ok(&deformation_direction_valuation(pm.p, pm.m, *j)?));
            }
            if *independence {
                let dirs: Vec<u64> = direction_range(pm.p, pm.m).collect();
                let r = independence_check(pm.p, pm.m, &dirs)?;
                let verified = r.independent;
                return Ok(checked(&r, verified));
            }
            let ring_text = ring.clone().unwrap_or_else(|| format!("Fp({})", pm.p));
            let (_, r) = artin(&ring_text)?;
            let xs: Vec<Vec<u64>> = match a {
                Some(list) => list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| r.parse_element(s.trim()))
                    .collect::<Result<_>>()?,
                None => r
                    .variables()
                    .iter()
                    .take(parameter_count(pm.p, pm.m) as usize)
                    .map(|v| r.generator(v).expect("ring variable"))
                    .collect(),
            };
            let prec = prec.unwrap_or_else(|| default_prec(pm.p, pm.m));
            Ok(ok(&build_deformed_cover(pm.p, pm.m, &r, &xs, prec)?.report()?))
        }
        Command::OrderCheck { pm, ring, a, .. } => {
            let any = mk_ring(&parse_ring(ring)?)?;
            with_ring!(&any, r => {
                let x = r.parse_element(a)?;
                Ok(ok(&order_condition_check(pm.p, pm.m, r, &x)?))
            })
        }
        Command::Obstruction { pm, ring, target, a, .. } => {
            let (src, r) = artin(ring)?;
            let tgt = match target {
                Some(t) => parse_ring(t)?,
                None => default_small_quotient(&src)
                    .ok_or_else(|| Error::Precondition(format!("no default quotient for {src}; pass --target")))?,
            };
            let x = r.parse_element(a)?;
            let rep = obstruction_class(pm.p, pm.m, &src, &tgt, &x)?;
            let verified = rep.formula_matches;
            Ok(checked(&rep, verified))
        }
        Command::Krull { pm, .. } => Ok(ok(&krull_dim_local(pm.p, pm.m)?)),
        Command::Global {
            p,
            conductors,
            genus_quotient,
            ..
        } => Ok(ok(&global_dim_report(*p, conductors, *genus_quotient)?)),
        Command::Verify { config, out, .. } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                    SuiteConfig::from_json(&text)?
                }
                None => SuiteConfig::shipped_default(),
            };
            let report = run_suite(&cfg)?;
            if let Some(path) = out {
                std::fs::write(path, report.to_json())
                    .map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            }
            let verified = report.summary.fail == 0;
            let v = if out.is_some() {
                let flagged: Vec<&str> = report
                    .records
                    .iter()
                    .filter(|r| r.status == crate::suite::Status::Flagged)
                    .map(|r| r.id.as_str())
                    .collect();
                let failed: Vec<&str> = report.failures().map(|r| r.id.as_str()).collect();
                json!({ "summary": report.summary, "failed": failed, "flagged": flagged })
            } else {
                serde_json::to_value(&report).expect("reports serialize")
            };
            Ok(Outcome { value: v, verified })
        }
    }
}

fn is_json(cmd: &Command) -> bool {
    match cmd {
        Command::Cohom { common, .. }
        | Command::CohomStructure { common, .. }
        | Command::Chebyshev { common, .. }
        | Command::VersalM1 { common, .. }
        | Command::Polar { common, .. }
        | Command::Harbater { common, .. }
        | Command::Genus { common, .. }
        | Command::Asdeform { common, .. }
        | Command::OrderCheck { common, .. }
        | Command::Obstruction { common, .. }
        | Command::Krull { common, .. }
        | Command::Global { common, .. }
        | Command::Verify { common, .. } => common.json,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn text_lines(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                text_lines(&key, x, out);
            }
        }
        Value::Array(xs) if xs.iter().any(|x| x.is_object()) => {
            for (i, x) in xs.iter().enumerate() {
                text_lines(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::Array(xs) => {
            let items: Vec<String> = xs.iter().map(scalar).collect();
            out.push(format!("{prefix}: [{}]", items.join(", ")));
        }
        other => out.push(format!("{prefix}: {}", scalar(other))),
    }
}

/// Human-readable rendering: one `key: value` line per leaf, nested keys dotted.
pub fn render_text(v: &Value) -> String {
    let mut lines = Vec::new();
    text_lines("", v, &mut lines);
    let mut s = lines.join("\n");
    s.push('\n');
    s
}

/// JSON rendering; re-parsing and re-serializing reproduces it byte for byte.
pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// Parses `args` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(o) => {
            let body = if is_json(&cli.command) {
                render_json(&o.value)
            } else {
                render_text(&o.value)
            };
            let _ = out.write_all(body.as_bytes());
            if o.verified {
                0
            } else {
                let _ = writeln!(err, "error: a checked identity failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("wildram").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cohom_json() {
        let (code, out, _) = call(&["cohom", "--p", "5", "--m", "2", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["dim_h1"], json!(1));
        assert_eq!(v["dim_h2"], json!(1));
        assert_eq!(v["stabilized"], json!(true));
        assert_eq!(render_json(&v), out);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["cohom", "--p", "4", "--m", "2"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
        assert_eq!(call(&["cohom", "--p", "5", "--m", "2", "--prec", "1"]).0, 3);
    }

    #[test]
    fn text_matches_json() {
        let (_, text, _) = call(&["krull", "--p", "5", "--m", "3"]);
        let (_, js, _) = call(&["krull", "--p", "5", "--m", "3", "--json"]);
        let v: Value = serde_json::from_str(&js).unwrap();
        assert_eq!(render_text(&v), text);
        assert!(text.contains("absolute: 1"));
    }

    #[test]
    fn chebyshev_text() {
        let (code, out, _) = call(&["chebyshev", "--p", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains("psi: X^2+5*X+5"));
        assert!(out.contains("bezout_verified: true"));
    }

    #[test]
    fn obstruction_default_target() {
        let (code, out, _) = call(&["obstruction", "--p", "5", "--m", "2", "--ring", "F5[u]/(u^5)", "--a", "1+u", "--json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["target"], json!("Fp(5)[u]/(u^4)"));
        assert_eq!(v["class_vanishes"], json!(false));
    }
}
