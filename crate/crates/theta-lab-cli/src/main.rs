use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use theta_lab::serre::{
    borel_as_displayed, case_mu, check_standard_recipes, companion_cases, entailment_targets, fl_case_predicate,
    fl_conjugate_filtration, herzig_set, is_tame_generic, recipe_check, siegel_nonord_family, tame_equal, tame_type,
    tame_type_from_case, CompanionCase, FLModule, GaloisCase, WeightPath,
};
use theta_lab::suite::{run_all, SuiteConfig};
use theta_lab::thetalocal::{
    self, cycle_digits, kernel_basis_theta4, kernel_basis_theta4_reflection, kernels_match, random_section,
    rng_for, theta_cycle, verify_relations, Chart, ChartSection, ThetaOperator,
};
use theta_lab::uea::{
    bgg_verify_commutativity, singular_vectors, theta_linkage_alpha_beta, verma_hom_modp, CoeffRing,
};
use theta_lab::weights::{
    alcove_of, bgg_weights, is_delta_generic, jh_factors, linked_chain_c0, up_arrow_min, AffineReflection, PosRoot,
    Weight, RHO,
};
use theta_lab::Error;

#[derive(Parser)]
#[command(name = "theta-lab", version, about = "Exact mod-p computations for GSp4 weights, Verma modules, theta operators and Serre weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Alcove of a weight
    Alcove,
    /// Jordan–Hölder factors of the Weyl module V(λ)
    Jh,
    /// Linked chain from C0, or the minimal upward reflection along --gamma
    Link,
    /// The two weights entailed by λ0 ∈ C0
    Entail,
    /// Weights of the BGG complex for (k, l)
    Bgg,
    /// Singular vectors of weight μ − nγ in Ver(μ)
    Singular,
    /// Verma map for the affine reflection (γ, n) mod p
    VermaHom,
    /// The α+β linkage element f(X) for (k, l)
    LinkageMap,
    /// Commutativity of the BGG square at the Verma level
    BggSquare,
    /// Apply a theta operator to a section
    Theta,
    /// Random-section check of the operator relations
    ThetaVerify,
    /// Kernels of θ₄ and θ⁴ against brute force
    Kernel,
    /// Theta cycle weight map, checked on a random section
    Cycle,
    /// Tame inertial type of a case family
    Tame,
    /// Obvious and shadow weights of a tame type
    Herzig,
    /// Candidate companion weights
    Companion,
    /// Conjugate filtration and case predicates of an FL module
    FlCase,
    /// Weight arithmetic of recipe paths
    Recipe,
    /// Acceptance suite
    VerifyAll,
}

#[derive(Args, Clone, Debug)]
struct Opts {
    #[arg(long, global = true)]
    p: Option<u64>,
    /// a,b or a,b,c
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_weight)]
    weight: Option<Weight>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    l: Option<i64>,
    /// alpha, beta, alpha+beta or 2alpha+beta
    #[arg(long, global = true, value_parser = parse_gamma)]
    gamma: Option<PosRoot>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    n: Option<i64>,
    /// Case family (tame, herzig) or companion case 1-4 (fl-case)
    #[arg(long, global = true)]
    case: Option<String>,
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,
    #[arg(long, global = true, default_value_t = 4)]
    max_deg: u32,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 4)]
    delta: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    quick: bool,
    /// Operator for `theta`: theta1, theta2, theta3, theta4, Theta, h1, h2
    #[arg(long, global = true)]
    op: Option<String>,
    /// Section JSON for `theta`; a seeded random section otherwise
    #[arg(long, global = true)]
    section: Option<PathBuf>,
    /// FL module JSON for `fl-case`; the Siegel family at (--x, --y) otherwise
    #[arg(long, global = true)]
    module: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = 0)]
    x: i64,
    #[arg(long, global = true, allow_hyphen_values = true, default_value_t = 0)]
    y: i64,
    /// Recipe path JSON for `recipe`; the standard recipes otherwise
    #[arg(long, global = true)]
    path: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

fn parse_weight(s: &str) -> Result<Weight, String> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| format!("{x:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match parts[..] {
        [a, b] => Ok(Weight::new(a, b)),
        [a, b, c] => Weight::with_central(a, b, c).map_err(|e| e.to_string()),
        _ => Err("expected a,b or a,b,c".into()),
    }
}

fn parse_gamma(s: &str) -> Result<PosRoot, String> {
    PosRoot::parse(s).ok_or_else(|| format!("unknown root {s:?}; expected alpha, beta, alpha+beta or 2alpha+beta"))
}

enum Failure {
    Usage(String),
    Theorem(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::TheoremViolation(_) => Failure::Theorem(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

type Res<T> = Result<T, Failure>;

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, ok: true }
    }

    fn check(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Res<T> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required")))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Res<T> {
    let s = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&s).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn galois_case(o: &Opts) -> Res<GaloisCase> {
    let s = o.case.as_deref().ok_or_else(|| Failure::Usage("--case is required".into()))?;
    GaloisCase::parse(s).ok_or_else(|| {
        let names: Vec<&str> = GaloisCase::ALL.iter().map(|c| c.name()).collect();
        Failure::Usage(format!("unknown case {s:?}; expected one of {}", names.join(", ")))
    })
}

fn kl(o: &Opts) -> Res<(i64, i64)> {
    Ok((need(o.k, "k")?, need(o.l, "l")?))
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn run(cmd: Command, o: &Opts) -> Res<Output> {
    match cmd {
        Command::Alcove => {
            let (p, w) = (need(o.p, "p")?, need(o.weight, "weight")?);
            let a = alcove_of(w, p);
            Ok(Output::new(a.to_string(), json!({"weight": w, "alcove": a})))
        }
        Command::Jh => {
            let (p, w) = (need(o.p, "p")?, need(o.weight, "weight")?);
            let f = jh_factors(w, p)?;
            Ok(Output::new(join(&f), json!({"weight": w, "factors": f})))
        }
        Command::Link => {
            let (p, w) = (need(o.p, "p")?, need(o.weight, "weight")?);
            match o.gamma {
                Some(g) => {
                    let (mu, r) = up_arrow_min(w, g, p)?;
                    let text = format!("{mu} via s({},{})", g.name(), r.n);
                    Ok(Output::new(text, json!({"weight": w, "target": mu, "reflection": r})))
                }
                None => {
                    let chain = linked_chain_c0(w, p)?;
                    Ok(Output::new(join(&chain), json!({"weight": w, "chain": chain})))
                }
            }
        }
        Command::Entail => {
            let (p, w) = (need(o.p, "p")?, need(o.weight, "weight")?);
            let (l1, l2) = entailment_targets(w, p)?;
            Ok(Output::new(format!("{l1} {l2}"), json!({"lambda1": l1, "lambda2": l2})))
        }
        Command::Bgg => {
            let (k, l) = kl(o)?;
            let b = bgg_weights(k, l, o.p);
            let mut text = format!("shimura: {}\nflag: {}\nhodge jumps: {:?}", join(&b.shimura), join(&b.flag), b.hodge_jumps);
            if let Some(w) = &b.warning {
                text.push_str(&format!("\nwarning: {w}"));
            }
            Ok(Output::new(text, to_value(&b)))
        }
        Command::Singular => {
            let (mu, g, n) = (need(o.weight, "weight")?, need(o.gamma, "gamma")?, need(o.n, "n")?);
            let lambda = mu.minus(g.vector().scale(n));
            let ring = o.p.map_or(CoeffRing::Rationals, CoeffRing::PrimeField);
            let vs = singular_vectors(mu, lambda, ring);
            let text = if vs.is_empty() { "none".to_string() } else { vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n") };
            Ok(Output::new(text, json!({"mu": mu, "lambda": lambda, "vectors": vs})))
        }
        Command::VermaHom => {
            let (p, w, g, n) = (need(o.p, "p")?, need(o.weight, "weight")?, need(o.gamma, "gamma")?, need(o.n, "n")?);
            let h = verma_hom_modp(w, AffineReflection { gamma: g, n }, p)?;
            let text = format!("Ver({}) -> Ver({}): {}", h.source, h.target, h.vector);
            Ok(Output::new(text, to_value(&h)))
        }
        Command::LinkageMap => {
            let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
            let f = theta_linkage_alpha_beta(k, l, p)?;
            Ok(Output::new(f.to_string(), json!({"k": k, "l": l, "p": p, "f": f})))
        }
        Command::BggSquare => {
            let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
            let r = bgg_verify_commutativity(k, l, p)?;
            let text = format!(
                "commutes: {}\nscalar: {}\nd1: {}",
                r.commutes,
                r.scalar.as_deref().unwrap_or("none"),
                r.d1
            );
            Ok(Output::new(text, to_value(&r)).check(r.commutes))
        }
        Command::Theta => {
            let op_name = o.op.as_deref().ok_or_else(|| Failure::Usage("--op is required".into()))?;
            let op = ThetaOperator::parse(op_name).ok_or_else(|| Failure::Usage(format!("unknown operator {op_name:?}")))?;
            let s: ChartSection = match &o.section {
                Some(path) => read_json(path)?,
                None => {
                    let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
                    random_section(p, (k, l), Chart::Ordinary, o.max_deg, &mut rng_for(o.seed))
                }
            };
            let r = thetalocal::apply(op, &s)?;
            let text = format!("{:?}: {}", r.weight, r.poly);
            Ok(Output::new(text, json!({"input": s, "output": r})))
        }
        Command::ThetaVerify => {
            let p = need(o.p, "p")?;
            let r = verify_relations(p, o.trials, o.max_deg, o.seed);
            let lines: Vec<String> =
                r.relations.iter().map(|x| format!("{} {}", if x.passed { "PASS" } else { "FAIL" }, x.name)).collect();
            Ok(Output::new(lines.join("\n"), to_value(&r)).check(r.all_passed()))
        }
        Command::Kernel => {
            let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
            let (m4, mr) = kernels_match(k, l, p)?;
            let b4: Vec<String> = kernel_basis_theta4(k, l, p).iter().map(|s| s.poly.to_string()).collect();
            let br: Vec<String> = kernel_basis_theta4_reflection(k, l, p).iter().map(|s| s.poly.to_string()).collect();
            let text = format!(
                "ker theta4: dim {} (brute force agrees: {m4})\nker theta4 reflection: dim {} (brute force agrees: {mr})",
                b4.len(),
                br.len()
            );
            let json = json!({
                "k": k, "l": l, "p": p,
                "theta4": {"dim": b4.len(), "basis": b4, "matches": m4},
                "theta4_reflection": {"dim": br.len(), "basis": br, "matches": mr},
            });
            Ok(Output::new(text, json).check(m4 && mr))
        }
        Command::Cycle => {
            let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
            let (b, a) = cycle_digits(k, p);
            let s = random_section(p, (k, l), Chart::Ordinary, o.max_deg, &mut rng_for(o.seed));
            let r = theta_cycle(&s)?;
            let text = format!("({k},{l}) -> ({},{})  k = {p}·{b} + {a}", r.weight.0, r.weight.1);
            Ok(Output::new(text, json!({"k": k, "l": l, "p": p, "a": a, "b": b, "target": [r.weight.0, r.weight.1]})))
        }
        Command::Tame => {
            let (case, (k, l), p) = (galois_case(o)?, kl(o)?, need(o.p, "p")?);
            let t = tame_type_from_case(case, k, l, p);
            let direct = tame_type(case_mu(k, l), case.weyl_element(), p)?;
            let agrees = tame_equal(&t, &direct);
            let mut json = json!({"case": case.name(), "type": t, "agrees_with_weyl_formula": agrees});
            let mut text = format!("{t}\nagrees with τ(μ, {}): {agrees}", case.weyl_element().name());
            if case == GaloisCase::Borel {
                let shown = borel_as_displayed(k, l, p);
                text.push_str(&format!("\nas displayed (ω^(l−1)): {shown}"));
                json["as_displayed"] = to_value(&shown);
            }
            Ok(Output::new(text, json))
        }
        Command::Herzig => {
            let (case, p) = (galois_case(o)?, need(o.p, "p")?);
            let (k, l) = match o.weight {
                Some(mu) => (mu.a + 3, mu.b + 3),
                None => kl(o)?,
            };
            let mu = Weight::new(k - 3, l - 3);
            let h = herzig_set(&tame_type_from_case(case, k, l, p), p);
            let generic = is_delta_generic(mu.plus(RHO), p, o.delta);
            let tame_generic = is_tame_generic(mu, p, o.delta);
            let obvious: Vec<Weight> = h.obvious.iter().copied().collect();
            let shadows: Vec<Weight> = h.shadows.iter().copied().collect();
            let text = format!(
                "{} weights ({} obvious, {} shadow)\nobvious: {}\nshadow: {}\n{}-generic: {generic}, off the half-lines: {tame_generic}",
                h.weights.len(),
                obvious.len(),
                shadows.len(),
                join(&obvious),
                join(&shadows),
                o.delta
            );
            let json = json!({
                "case": case.name(), "mu": mu, "p": p, "delta": o.delta,
                "generic": generic, "tame_generic": tame_generic,
                "count": h.weights.len(), "obvious": obvious, "shadows": shadows,
            });
            Ok(Output::new(text, json))
        }
        Command::Companion => {
            let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
            let cs = companion_cases(k, l, p);
            let lines: Vec<String> =
                cs.iter().map(|c| format!("case {}: {} ({})", c.case.index(), c.weight, c.galois_types)).collect();
            Ok(Output::new(lines.join("\n"), to_value(&cs)))
        }
        Command::FlCase => {
            let m: FLModule = match &o.module {
                Some(path) => read_json(path)?,
                None => {
                    let ((k, l), p) = (kl(o)?, need(o.p, "p")?);
                    siegel_nonord_family(p, k, l, o.x, o.y)?
                }
            };
            let cases: Vec<CompanionCase> = match o.case.as_deref() {
                Some(s) => vec![CompanionCase::parse(s).ok_or_else(|| Failure::Usage(format!("unknown companion case {s:?}")))?],
                None => vec![CompanionCase::One, CompanionCase::Two, CompanionCase::Three, CompanionCase::Four],
            };
            let preds: Vec<(u8, bool)> = cases.iter().map(|&c| (c.index(), fl_case_predicate(&m, c))).collect();
            let filt = fl_conjugate_filtration(&m);
            let mut text: Vec<String> = preds.iter().map(|(i, b)| format!("case {i}: {b}")).collect();
            for (jump, basis) in &filt {
                text.push(format!("D at {jump}: {basis:?}"));
            }
            let json = json!({
                "predicates": preds.iter().map(|(i, b)| json!({"case": i.to_string(), "holds": b})).collect::<Vec<_>>(),
                "conjugate_filtration": filt.iter().map(|(j, b)| json!({"jump": j, "basis": b})).collect::<Vec<_>>(),
            });
            Ok(Output::new(text.join("\n"), json))
        }
        Command::Recipe => {
            let p = need(o.p, "p")?;
            match &o.path {
                Some(file) => {
                    let path: WeightPath = read_json(file)?;
                    let start = need(o.weight, "weight")?;
                    let target = o.k.zip(o.l);
                    let r = recipe_check(&path, (start.a, start.b), target, p);
                    let text = format!("endpoint {:?}, matches: {}", r.endpoint, r.matches);
                    let ok = r.error.is_none() && (target.is_none() || r.matches);
                    Ok(Output::new(text, to_value(&r)).check(ok))
                }
                None => {
                    let (k, l) = kl(o)?;
                    let outs = check_standard_recipes(k, l, p);
                    let ok = outs.iter().all(|x| x.report.matches && x.lands_on_case);
                    let text: Vec<String> = outs
                        .iter()
                        .map(|x| {
                            let status = if x.report.matches && x.lands_on_case { "PASS" } else { "FAIL" };
                            format!("{status} {}: {:?} -> {:?}", x.recipe.name, x.recipe.start, x.report.endpoint)
                        })
                        .collect();
                    Ok(Output::new(text.join("\n"), to_value(&outs)).check(ok))
                }
            }
        }
        Command::VerifyAll => {
            let cfg = SuiteConfig { quick: o.quick, prime: o.p, seed: o.seed };
            let reports = run_all(&cfg);
            let ok = reports.iter().all(|r| r.status != theta_lab::suite::Status::Fail);
            let text: Vec<String> = reports.iter().map(|r| r.to_string()).collect();
            Ok(Output::new(text.join("\n"), to_value(&reports)).check(ok))
        }
    }
}

fn emit(out: &Output, o: &Opts) -> std::io::Result<()> {
    let mut s = match o.format {
        Format::Text => out.text.clone(),
        Format::Json => serde_json::to_string(&out.json).expect("serializable"),
    };
    s.push('\n');
    match &o.out {
        Some(path) => fs::write(path, s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn workers() -> Result<Option<rayon::ThreadPool>, String> {
    let Ok(v) = std::env::var("THETA_LAB_WORKERS") else { return Ok(None) };
    let n: usize = v.parse().map_err(|_| format!("THETA_LAB_WORKERS={v:?} is not a number"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map(Some).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match workers() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match &pool {
        Some(pool) => pool.install(|| run(cli.command, &cli.opts)),
        None => run(cli.command, &cli.opts),
    };
    match result {
        Ok(out) => {
            if let Err(e) = emit(&out, &cli.opts) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Theorem(m)) => {
            eprintln!("theorem violation: {m}");
            ExitCode::from(3)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_and_root_parsing() {
        assert_eq!(parse_weight("2,1").unwrap(), Weight::new(2, 1));
        assert_eq!(parse_weight("-3, 5").unwrap(), Weight::new(-3, 5));
        assert!(parse_weight("2,1,4").is_err());
        assert!(parse_weight("2").is_err());
        assert_eq!(parse_gamma("2alpha+beta").unwrap(), PosRoot::TwoAlphaBeta);
        assert!(parse_gamma("gamma").is_err());
    }

    #[test]
    fn theorem_violations_are_kept_apart() {
        assert!(matches!(Failure::from(Error::TheoremViolation("x".into())), Failure::Theorem(_)));
        assert!(matches!(Failure::from(Error::Precondition("x".into())), Failure::Usage(_)));
    }
}
