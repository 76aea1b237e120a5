//! Command-line front end: every operation exposed with machine-readable
//! certificates.
//!
//! Exit codes: 0 computed/verified, 1 a claim check falsified, 2
//! inconclusive or caps-limited, 3 usage or domain error. Structured
//! reports go to standard output (stable key order; rationals as `"a/b"`,
//! magnitudes as `{reciprocal, level, lo, hi}`); diagnostics to standard
//! error.

mod report;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gapcert::boundchain::{beta_lower_with, l_upper_with, upsilon_lower_with};
use gapcert::constaudit::{
    eval_constant, index_gap_identity_negative_control, registry,
    v0_window_negative_control, verify_index_gap_identity, verify_orderings,
    verify_threefold_delta_chain, verify_v0_window, verify_volume_floor_decomposition,
    AuditResult, Verdict,
};
use gapcert::egyptian::{
    curtiss_min_gap, max_unit_sum_under, sylvester, sylvester_bound_holds,
};
use gapcert::exactnum::{parse_rational, rat, CompareOutcome, Rational};
use gapcert::gapsearch::{
    curve_complement_index, epsilon2, glct_max_dim1_with_caps, lct_gap_dim1, mld_gap_dim1,
    min_sum_exceeding, equation_two_solver, CertStatus, Eps2, SearchCaps,
};
use gapcert::hyperstd::membership;
use report::Report;

const EXIT_OK: i32 = 0;
const EXIT_FALSIFIED: i32 = 1;
const EXIT_INCONCLUSIVE: i32 = 2;
const EXIT_USAGE: i32 = 3;

#[derive(Parser)]
#[command(name = "gapcert", version, about = "Exact gap calculator and bound verifier")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Emit the structured JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Omit the elapsed-time field for byte-identical reports
    #[arg(long, global = true)]
    stable: bool,
    /// Bits for certified log2 extraction
    #[arg(long, global = true, default_value_t = 96)]
    precision_bits: u32,
    /// Search caps as "depth=D,den=N"
    #[arg(long, global = true)]
    caps: Option<String>,
}

#[derive(Subcommand)]
#[command(rename_all = "kebab-case")]
enum Cmd {
    /// Minimal Φ_p-sum exceeding q, with certificate
    Epsilon1 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// ε₂(p,q) = ε₁/(q+ε₁)
    Epsilon2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
    },
    /// Dimension-1 lc-threshold gap
    LctGap {
        #[arg(long)]
        p: u64,
    },
    /// Dimension-1 global lc-threshold gap
    GlctGap {
        #[arg(long)]
        p: u64,
    },
    /// Dimension-1 exceptional-mld gap
    MldGap {
        #[arg(long)]
        p: u64,
    },
    /// Solvability of 2 = Σγ + Σb with b in (1-δ, 1)
    Eq2 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        delta: String,
    },
    /// Minimal I with p·I·b integral
    CurveIndex {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        value: String,
    },
    /// Optimal n-term unit-fraction approach to 1 from below
    Curtiss {
        #[arg(long)]
        n: u32,
    },
    /// Sylvester number with its double-exponential bound
    Sylvester {
        #[arg(long)]
        n: u32,
    },
    /// Maximal sum of n unit fractions strictly below a target
    MaxUnder {
        #[arg(long)]
        value: String,
        #[arg(long)]
        n: u32,
    },
    /// Membership in the hyperstandard set Φ_p
    Member {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        value: String,
    },
    /// Certified lower bound for β(p) against its tower forms
    Beta {
        #[arg(long)]
        p: u64,
    },
    /// Certified υ(p) lower bound (and the l(p) upper bound behind it)
    Upsilon {
        #[arg(long)]
        p: u64,
    },
    /// Evaluate one or all registered constants
    Constants {
        #[arg(long)]
        id: Option<String>,
    },
    /// Run every identity, ordering, window, chain, and β-suite audit
    AuditAll {
        /// Also run the perturbed-identity negative controls (these are
        /// expected to falsify, so the exit code becomes 1)
        #[arg(long)]
        include_negative_controls: bool,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_USAGE
                }
            }
        }
    };
    let caps = match parse_caps(cli.caps.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let start = std::time::Instant::now();
    let mut report = Report::new(command_name(&cli.cmd));
    let code = dispatch(&cli, &caps, &mut report);
    if !cli.stable {
        report.set_elapsed_ms(start.elapsed().as_secs_f64() * 1e3);
    }
    report.set_exit_code(code);
    if cli.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    code
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Epsilon1 { .. } => "epsilon1",
        Cmd::Epsilon2 { .. } => "epsilon2",
        Cmd::LctGap { .. } => "lct-gap",
        Cmd::GlctGap { .. } => "glct-gap",
        Cmd::MldGap { .. } => "mld-gap",
        Cmd::Eq2 { .. } => "eq2",
        Cmd::CurveIndex { .. } => "curve-index",
        Cmd::Curtiss { .. } => "curtiss",
        Cmd::Sylvester { .. } => "sylvester",
        Cmd::MaxUnder { .. } => "max-under",
        Cmd::Member { .. } => "member",
        Cmd::Beta { .. } => "beta",
        Cmd::Upsilon { .. } => "upsilon",
        Cmd::Constants { .. } => "constants",
        Cmd::AuditAll { .. } => "audit-all",
    }
}

fn parse_caps(spec: Option<&str>) -> Result<SearchCaps, String> {
    let mut caps = SearchCaps::default();
    let Some(spec) = spec else { return Ok(caps) };
    for part in spec.split(',') {
        let mut kv = part.splitn(2, '=');
        let key = kv.next().unwrap_or("").trim();
        let value = kv.next().ok_or_else(|| format!("caps: missing '=' in {part:?}"))?;
        match key {
            "depth" => {
                caps.max_depth = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("caps: bad depth {value:?}"))?
            }
            "den" => {
                caps.max_den = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("caps: bad den {value:?}"))?
            }
            other => return Err(format!("caps: unknown key {other:?}")),
        }
    }
    Ok(caps)
}

fn parse_rat_flag(report: &mut Report, name: &str, s: &str) -> Result<Rational, i32> {
    match parse_rational(s) {
        Ok(v) => Ok(v),
        Err(e) => {
            report.set_error(&format!("{name}: {e}"));
            Err(EXIT_USAGE)
        }
    }
}

fn dispatch(cli: &Cli, caps: &SearchCaps, report: &mut Report) -> i32 {
    match &cli.cmd {
        Cmd::Epsilon1 { p, q } => {
            report.input_u64("p", *p);
            report.input_u64("q", *q);
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            let cert = min_sum_exceeding(*p, *q, caps);
            report.result_certificate(&cert);
            match cert.status {
                CertStatus::Proven => EXIT_OK,
                CertStatus::ProvenWithinCaps(_) => EXIT_INCONCLUSIVE,
            }
        }
        Cmd::Epsilon2 { p, q } => {
            report.input_u64("p", *p);
            report.input_u64("q", *q);
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            let (e2, cert) = epsilon2(*p, *q, caps);
            report.result_eps2(&e2, &cert);
            match e2 {
                Eps2::Exact(_) => EXIT_OK,
                Eps2::Bracket { .. } => EXIT_INCONCLUSIVE,
            }
        }
        Cmd::LctGap { p } => {
            report.input_u64("p", *p);
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            report.result_dim1(&lct_gap_dim1(*p));
            EXIT_OK
        }
        Cmd::GlctGap { p } => {
            report.input_u64("p", *p);
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            let r = glct_max_dim1_with_caps(*p, caps);
            let capped = matches!(
                r.certificate.as_ref().map(|c| &c.status),
                Some(CertStatus::ProvenWithinCaps(_))
            );
            report.result_dim1(&r);
            if capped {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
        Cmd::MldGap { p } => {
            report.input_u64("p", *p);
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            report.result_dim1(&mld_gap_dim1(*p));
            EXIT_OK
        }
        Cmd::Eq2 { p, delta } => {
            report.input_u64("p", *p);
            let delta = match parse_rat_flag(report, "delta", delta) {
                Ok(v) => v,
                Err(code) => return code,
            };
            report.input_str("delta", &gapcert::exactnum::format_rational(&delta));
            if *p == 0 || delta <= rat(0, 1) || delta >= rat(1, 1) {
                report.set_error("requires p >= 1 and delta in (0, 1)");
                return EXIT_USAGE;
            }
            report.result_eq2(&equation_two_solver(*p, &delta));
            EXIT_OK
        }
        Cmd::CurveIndex { p, value } => {
            report.input_u64("p", *p);
            let b = match parse_rat_flag(report, "value", value) {
                Ok(v) => v,
                Err(code) => return code,
            };
            report.input_str("value", &gapcert::exactnum::format_rational(&b));
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            match curve_complement_index(*p, &b) {
                Ok(i) => {
                    report.result_u64("index", i);
                    EXIT_OK
                }
                Err(e) => {
                    report.set_error(&e.to_string());
                    EXIT_USAGE
                }
            }
        }
        Cmd::Curtiss { n } => {
            report.input_u64("n", *n as u64);
            match curtiss_min_gap(*n) {
                Ok(c) => {
                    report.result_curtiss(&c);
                    EXIT_OK
                }
                Err(e) => {
                    report.set_error(&e.to_string());
                    EXIT_USAGE
                }
            }
        }
        Cmd::Sylvester { n } => {
            report.input_u64("n", *n as u64);
            if *n == 0 {
                report.set_error("n must be >= 1");
                return EXIT_USAGE;
            }
            let entry = sylvester(*n);
            let holds = sylvester_bound_holds(&entry);
            report.result_sylvester(&entry, holds);
            if holds {
                EXIT_OK
            } else {
                EXIT_FALSIFIED
            }
        }
        Cmd::MaxUnder { value, n } => {
            let r = match parse_rat_flag(report, "value", value) {
                Ok(v) => v,
                Err(code) => return code,
            };
            report.input_str("value", &gapcert::exactnum::format_rational(&r));
            report.input_u64("n", *n as u64);
            if r <= rat(0, 1) || *n == 0 {
                report.set_error("requires value > 0 and n >= 1");
                return EXIT_USAGE;
            }
            let result = max_unit_sum_under(&r, *n, None);
            report.result_max_under(&result);
            EXIT_OK
        }
        Cmd::Member { p, value } => {
            report.input_u64("p", *p);
            let x = match parse_rat_flag(report, "value", value) {
                Ok(v) => v,
                Err(code) => return code,
            };
            report.input_str("value", &gapcert::exactnum::format_rational(&x));
            if *p == 0 {
                report.set_error("p must be >= 1");
                return EXIT_USAGE;
            }
            report.result_membership(membership(*p, &x).as_ref());
            EXIT_OK
        }
        Cmd::Beta { p } => {
            report.input_u64("p", *p);
            match beta_lower_with(*p, 3, cli.precision_bits) {
                Ok((bound, checks)) => {
                    report.result_beta(&bound, &checks);
                    if checks.all_certified() {
                        EXIT_OK
                    } else if [
                        checks.exceeds_tower14,
                        checks.exceeds_tower17,
                        checks.below_min_upper,
                    ]
                    .contains(&CompareOutcome::Inconclusive)
                    {
                        EXIT_INCONCLUSIVE
                    } else {
                        EXIT_FALSIFIED
                    }
                }
                Err(e) => {
                    report.set_error(&e.to_string());
                    EXIT_USAGE
                }
            }
        }
        Cmd::Upsilon { p } => {
            report.input_u64("p", *p);
            let l = l_upper_with(*p, 3, cli.precision_bits);
            let u = upsilon_lower_with(*p, 3, cli.precision_bits);
            match (l, u) {
                (Ok((l_rep, l_cmp)), Ok((u_rep, u_cmp))) => {
                    report.result_upsilon(&l_rep, l_cmp, &u_rep, u_cmp);
                    if l_cmp == CompareOutcome::Lt && u_cmp == CompareOutcome::Gt {
                        EXIT_OK
                    } else if l_cmp == CompareOutcome::Inconclusive
                        || u_cmp == CompareOutcome::Inconclusive
                    {
                        EXIT_INCONCLUSIVE
                    } else {
                        EXIT_FALSIFIED
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    report.set_error(&e.to_string());
                    EXIT_USAGE
                }
            }
        }
        Cmd::Constants { id } => match id {
            Some(id) => match eval_constant(id) {
                Some(c) => {
                    report.input_str("id", id);
                    report.result_constant(&c);
                    EXIT_OK
                }
                None => {
                    report.set_error(&format!("unknown constant id {id:?}"));
                    EXIT_USAGE
                }
            },
            None => {
                let defs = registry();
                report.result_constant_list(&defs);
                EXIT_OK
            }
        },
        Cmd::AuditAll {
            include_negative_controls,
        } => {
            let mut audits: Vec<AuditResult> = vec![
                verify_index_gap_identity(),
                verify_volume_floor_decomposition(),
                verify_v0_window(),
            ];
            audits.extend(verify_orderings());
            audits.extend(verify_threefold_delta_chain());
            if *include_negative_controls {
                audits.push(index_gap_identity_negative_control());
                audits.push(v0_window_negative_control());
            }
            let mut beta_rows = Vec::new();
            for p in 2..=10u64 {
                match beta_lower_with(p, 3, cli.precision_bits) {
                    Ok((_, checks)) => beta_rows.push((p, checks)),
                    Err(e) => {
                        report.set_error(&e.to_string());
                        return EXIT_USAGE;
                    }
                }
            }
            report.result_audit_all(&audits, &beta_rows);
            let any_falsified = audits.iter().any(|a| a.verdict == Verdict::Falsified)
                || beta_rows.iter().any(|(_, c)| {
                    !c.all_certified()
                        && ![
                            c.exceeds_tower14,
                            c.exceeds_tower17,
                            c.below_min_upper,
                        ]
                        .contains(&CompareOutcome::Inconclusive)
                });
            let any_inconclusive = audits
                .iter()
                .any(|a| a.verdict == Verdict::Inconclusive)
                || beta_rows.iter().any(|(_, c)| {
                    [c.exceeds_tower14, c.exceeds_tower17, c.below_min_upper]
                        .contains(&CompareOutcome::Inconclusive)
                });
            if any_falsified {
                EXIT_FALSIFIED
            } else if any_inconclusive {
                EXIT_INCONCLUSIVE
            } else {
                EXIT_OK
            }
        }
    }
}
