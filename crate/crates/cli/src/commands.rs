//! Subcommands. Each one returns a [`Report`] holding both renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lambda_forge::algebra::check::{check_axioms, check_parity, check_weights, CheckReport};
use lambda_forge::algebra::superconf::s_n_span;
use lambda_forge::algebra::{ConfElt, Gen};
use lambda_forge::arith::rat::fmt_rat;
use lambda_forge::arith::{Rat, Var};
use lambda_forge::cohomology::{totals, Complex, ComplexKind, DEFAULT_LIMIT};
use lambda_forge::dist::{law_suite, oracle_check, product_distribution};
use lambda_forge::modes::{display_shift, mode_table, verify_mode_axioms, Mode, ModeElt};
use lambda_forge::module::chom::{check_chom, has_isomorphism, intertwiners, monomial_maps};
use lambda_forge::module::check_module;
use lambda_forge::module::ext::{extension_condition, extension_dim, extension_dim_full, ExtensionProblem, Locus};
use serde_json::{json, Value};

use crate::defs::{load_algebra, load_module, parse_alg_elt, parse_mod_elt, AlgebraFile, ALGEBRA_PRESETS, MODULE_PRESETS};
use crate::error::CliError;
use crate::expr::parse_rational;

#[derive(Debug, Parser)]
#[command(name = "lambda-forge", version, about = "Exact computations with Lie conformal algebras")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (0 picks the number of cores). Overrides LAMBDAFORGE_THREADS.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the axioms of an algebra, a module, or a conformal Hom module.
    Check(CheckArgs),
    /// The λ-bracket of two elements, or the λ-action on a module element.
    Bracket(BracketArgs),
    /// The n-th product `a_(n) b`.
    Nprod(NprodArgs),
    /// Mode products as CSV.
    Modes(ModesArgs),
    /// Extensions between modules M(Δ,α) over the Virasoro algebra.
    Ext(ExtArgs),
    /// The polynomial condition on Δ for extensions with a fixed shift.
    Extcond(ExtcondArgs),
    /// Dimensions of the cohomology of an algebra with coefficients in a module.
    Cohom(CohomArgs),
    /// OPE tables from modes and the random distribution law suite.
    Dist(DistArgs),
    /// Print the JSON definition of an algebra.
    Show(ShowArgs),
    /// List presets and target families.
    List,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Algebra target, or `sN:<n>` for the divergence-free subalgebra.
    pub target: String,
    /// Largest index m for the generators J^m of gc and cend.
    #[arg(long, default_value_t = 2)]
    pub bound: u32,
    /// Also check this module.
    #[arg(long)]
    pub module: Option<String>,
    /// Check Chom(module, V) on test maps, for this V.
    #[arg(long, requires = "module")]
    pub chom: Option<String>,
    /// Look for an isomorphism between the module and this one.
    #[arg(long, requires = "module")]
    pub iso: Option<String>,
    /// Degree of the Chom test maps.
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
}

#[derive(Debug, Args)]
pub struct BracketArgs {
    pub target: String,
    pub a: String,
    pub b: String,
    /// Read `b` as an element of this module.
    #[arg(long)]
    pub module: Option<String>,
}

#[derive(Debug, Args)]
pub struct NprodArgs {
    pub target: String,
    pub a: String,
    pub b: String,
    pub n: u32,
}

#[derive(Debug, Args)]
pub struct ModesArgs {
    pub target: String,
    /// Modes m, n range over [-window, window].
    #[arg(long, default_value_t = 3)]
    pub window: i64,
    /// Label a_n by n − w(a) + 1.
    #[arg(long)]
    pub reindex: bool,
    /// Also verify the mode identities.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 1)]
    pub bound: u32,
}

#[derive(Debug, Args)]
pub struct ExtArgs {
    /// Δ of the quotient.
    #[arg(long, allow_hyphen_values = true)]
    pub delta: String,
    /// Δ′ of the submodule.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_sub: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub alpha: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub alpha_sub: String,
    /// Degree bound for the cocycle ansatz.
    #[arg(long)]
    pub degree: Option<u32>,
    /// Skip the fast paths and solve the full linear system.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args)]
pub struct ExtcondArgs {
    /// Δ − Δ′.
    #[arg(long, allow_hyphen_values = true)]
    pub shift: i64,
    #[arg(long)]
    pub degree: Option<u32>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ComplexArg {
    Basic,
    Reduced,
}

#[derive(Debug, Args)]
pub struct CohomArgs {
    pub target: String,
    #[arg(long, default_value = "trivial")]
    pub module: String,
    #[arg(long, default_value_t = 2)]
    pub nmax: usize,
    /// Largest weight, an integer or p/q.
    #[arg(long, default_value = "6", allow_hyphen_values = true)]
    pub wmax: String,
    #[arg(long, value_enum, default_value_t = ComplexArg::Reduced)]
    pub complex: ComplexArg,
    /// Refuse components with more basis elements than this.
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    pub limit: usize,
    /// Print representative cocycles of the nonzero components.
    #[arg(long)]
    pub reps: bool,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    pub target: String,
    /// Modes range over [-window, window].
    #[arg(long, default_value_t = 16)]
    pub window: i64,
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ShowArgs {
    pub target: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A verification ran and found failures.
    Failed,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: Status,
}

impl Report {
    fn new(text: String, json: Value, ok: bool) -> Self {
        Report {
            text,
            json,
            status: if ok { Status::Ok } else { Status::Failed },
        }
    }
}

pub fn run(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Check(a) => check(a),
        Command::Bracket(a) => bracket(a),
        Command::Nprod(a) => nprod(a),
        Command::Modes(a) => modes(a),
        Command::Ext(a) => ext(a),
        Command::Extcond(a) => extcond(a),
        Command::Cohom(a) => cohom(a),
        Command::Dist(a) => dist(a),
        Command::Show(a) => show(a),
        Command::List => list(),
    }
}

fn report_json(name: &str, r: &CheckReport) -> Value {
    json!({
        "check": name,
        "checked": r.checked,
        "passed": r.passed(),
        "failures": r.failures.iter().map(|f| json!({
            "identity": f.identity,
            "tuple": f.tuple,
            "residual": f.residual,
        })).collect::<Vec<_>>(),
    })
}

fn report_text(out: &mut String, name: &str, r: &CheckReport) {
    let verdict = if r.passed() { "ok" } else { "FAILED" };
    let _ = writeln!(out, "{name}: {verdict} ({} cases)", r.checked);
    for f in r.failures.iter().take(10) {
        let _ = writeln!(out, "  {} at ({}): {}", f.identity, f.tuple.join(", "), f.residual);
    }
    if r.failures.len() > 10 {
        let _ = writeln!(out, "  ... {} more", r.failures.len() - 10);
    }
}

fn check(a: &CheckArgs) -> Result<Report, CliError> {
    if let Some(n) = a.target.strip_prefix("sN:") {
        let n: usize = n.parse().map_err(|_| CliError::Input(format!("`{n}` is not a valid rank")))?;
        let span = s_n_span(n)?;
        let mut text = format!("S_{n}: {} spanning elements in W_{n}\n", span.span.len());
        for e in &span.certificate {
            let _ = writeln!(
                text,
                "  [s{} s{}]: divergence-free {}, recomposed {}",
                e.left, e.right, e.div_zero, e.recomposed
            );
        }
        let ok = span.certified();
        let _ = writeln!(text, "closure: {}", if ok { "certified" } else { "FAILED" });
        let json = json!({
            "target": a.target,
            "span": span.span.iter().map(|x| span.algebra.render(x)).collect::<Vec<_>>(),
            "certified": ok,
        });
        return Ok(Report::new(text, json, ok));
    }
    let alg = Arc::new(load_algebra(&a.target)?);
    let scope = alg.generators(a.bound);
    let mut checks: Vec<(String, CheckReport)> = vec![
        ("axioms".into(), check_axioms(&alg, &scope)?),
        ("parity".into(), check_parity(&alg, &scope)?),
        ("weights".into(), check_weights(&alg, &scope)?),
    ];
    if let Some(spec) = &a.module {
        let m = load_module(spec, alg.clone())?;
        checks.push((format!("module {}", m.name()), check_module(&m, &scope)?));
        if let Some(v) = &a.chom {
            let v = load_module(v, alg.clone())?;
            let maps = monomial_maps(m.dim(), v.dim(), a.degree);
            checks.push((format!("chom({}, {})", m.name(), v.name()), check_chom(&m, &v, &maps, &scope)?));
        }
        if let Some(other) = &a.iso {
            let o = load_module(other, alg.clone())?;
            let found = has_isomorphism(&intertwiners(&m, &o)?);
            let mut r = CheckReport {
                checked: 1,
                failures: Vec::new(),
            };
            if !found {
                r.failures.push(lambda_forge::algebra::check::Failure {
                    identity: "isomorphism".into(),
                    tuple: vec![m.name().to_string(), o.name().to_string()],
                    residual: "no invertible intertwiner".into(),
                });
            }
            checks.push((format!("iso({}, {})", m.name(), o.name()), r));
        }
    }
    let mut text = format!("{} ({}, {} generators in scope)\n", alg.name(), alg.kind(), scope.len());
    for (name, r) in &checks {
        report_text(&mut text, name, r);
    }
    let ok = checks.iter().all(|(_, r)| r.passed());
    let json = json!({
        "target": a.target,
        "algebra": alg.name(),
        "kind": alg.kind().to_string(),
        "checks": checks.iter().map(|(n, r)| report_json(n, r)).collect::<Vec<_>>(),
        "passed": ok,
    });
    Ok(Report::new(text, json, ok))
}

fn bracket(a: &BracketArgs) -> Result<Report, CliError> {
    let alg = Arc::new(load_algebra(&a.target)?);
    let x = parse_alg_elt(&alg, &a.a)?;
    let rendered = match &a.module {
        Some(spec) => {
            let m = load_module(spec, alg.clone())?;
            let v = parse_mod_elt(&m, &a.b)?;
            m.render(&m.lambda_action(&x, &v, Var::Lambda)?)
        }
        None => {
            let y = parse_alg_elt(&alg, &a.b)?;
            alg.render(&alg.lambda_product(&x, &y, Var::Lambda)?)
        }
    };
    let text = format!("[{} l {}] = {rendered}\n", a.a, a.b);
    Ok(Report::new(text, json!({"a": a.a, "b": a.b, "value": rendered}), true))
}

fn nprod(a: &NprodArgs) -> Result<Report, CliError> {
    let alg = load_algebra(&a.target)?;
    let x = parse_alg_elt(&alg, &a.a)?;
    let y = parse_alg_elt(&alg, &a.b)?;
    let v = alg.render(&alg.nth_product(&x, &y, a.n)?);
    let text = format!("{}_({}) {} = {v}\n", a.a, a.n, a.b);
    Ok(Report::new(text, json!({"a": a.a, "b": a.b, "n": a.n, "value": v}), true))
}

fn num_den(c: &Rat) -> (String, String) {
    (c.numer().to_string(), c.denom().to_string())
}

fn modes(a: &ModesArgs) -> Result<Report, CliError> {
    let alg = load_algebra(&a.target)?;
    let scope = alg.generators(a.bound);
    let shift: BTreeMap<Gen, i64> = if a.reindex {
        scope
            .iter()
            .map(|g| {
                display_shift(&alg, g)
                    .map(|s| (*g, s))
                    .ok_or_else(|| CliError::Input(format!("{} has a non-integer weight", alg.gen_name(g))))
            })
            .collect::<Result<_, _>>()?
    } else {
        BTreeMap::new()
    };
    let label = |m: &Mode| m.n - shift.get(&m.gen).copied().unwrap_or(0);
    let table = mode_table(&alg, &scope, a.window)?;
    let mut text = String::from("gen_a,m,gen_b,n,term_gen,term_index,coeff_num,coeff_den\n");
    let mut rows = Vec::new();
    for (x, y, v) in &table {
        let v: ModeElt = if a.reindex { v.reindex(|g| shift.get(g).copied().unwrap_or(0)) } else { v.clone() };
        for (t, c) in v.terms() {
            let (num, den) = num_den(c);
            let (ga, gb, gt) = (alg.gen_name(&x.gen), alg.gen_name(&y.gen), alg.gen_name(&t.gen));
            let _ = writeln!(text, "{ga},{},{gb},{},{gt},{},{num},{den}", label(x), label(y), t.n);
            rows.push(json!([ga, label(x), gb, label(y), gt, t.n, num, den]));
        }
    }
    let mut ok = true;
    let mut json = json!({
        "columns": ["gen_a", "m", "gen_b", "n", "term_gen", "term_index", "coeff_num", "coeff_den"],
        "rows": rows,
    });
    if a.verify {
        let r = verify_mode_axioms(&alg, &scope, a.window)?;
        ok = r.passed();
        let mut summary = String::new();
        report_text(&mut summary, "mode identities", &r);
        eprint!("{summary}");
        json["verify"] = report_json("mode identities", &r);
    }
    Ok(Report::new(text, json, ok))
}

fn ext(a: &ExtArgs) -> Result<Report, CliError> {
    let mut p = ExtensionProblem::new(
        parse_rational(&a.delta)?,
        parse_rational(&a.delta_sub)?,
        parse_rational(&a.alpha)?,
        parse_rational(&a.alpha_sub)?,
    );
    if let Some(d) = a.degree {
        p = p.with_degree(d);
    }
    let r = if a.full { extension_dim_full(&p)? } else { extension_dim(&p)? };
    let cocycles: Vec<String> = r.cocycles.iter().map(|f| f.to_string()).collect();
    let mut text = format!(
        "0 -> M({}, {}) -> E -> M({}, {}) -> 0\nnontrivial extensions: {}\n",
        a.delta_sub, a.alpha_sub, a.delta, a.alpha, r.dim
    );
    let _ = writeln!(
        text,
        "degree bound {}, cocycles {}, coboundaries {}",
        r.bound, r.cocycle_dim, r.coboundary_rank
    );
    if let Some(f) = &r.fast_path {
        let _ = writeln!(text, "shortcut: {f:?}");
    }
    for c in &cocycles {
        let _ = writeln!(text, "  f = {c}");
    }
    let json = json!({
        "dim": r.dim,
        "bound": r.bound,
        "cocycle_dim": r.cocycle_dim,
        "coboundary_rank": r.coboundary_rank,
        "fast_path": r.fast_path.as_ref().map(|f| format!("{f:?}")),
        "cocycles": cocycles,
    });
    Ok(Report::new(text, json, true))
}

fn extcond(a: &ExtcondArgs) -> Result<Report, CliError> {
    let c = extension_condition(a.shift, a.degree)?;
    let locus = |l: &Locus| match l {
        Locus::Never => "never".to_string(),
        Locus::Always => "always".to_string(),
        Locus::Roots(p) => format!("roots of {p}"),
    };
    let mut text = format!("shift {} (degree bound {})\ncondition: {}\n", c.shift, c.bound, c.condition);
    for (d, l) in &c.per_degree {
        let _ = writeln!(text, "  degree {d}: {}", locus(l));
    }
    let json = json!({
        "shift": c.shift,
        "bound": c.bound,
        "condition": c.condition.to_string(),
        "per_degree": c.per_degree.iter().map(|(d, l)| json!({"degree": d, "locus": locus(l)})).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json, true))
}

fn cohom(a: &CohomArgs) -> Result<Report, CliError> {
    let alg = Arc::new(load_algebra(&a.target)?);
    let m = load_module(&a.module, alg)?;
    let kind = match a.complex {
        ComplexArg::Basic => ComplexKind::Basic,
        ComplexArg::Reduced => ComplexKind::Reduced,
    };
    let wmax = parse_rational(&a.wmax)?;
    let cx = Complex::new(m)?.with_limit(a.limit);
    let rows = cx.dims(a.nmax, &wmax, kind)?;
    let tot = totals(&rows, a.nmax);
    let mut text = format!(
        "{} complex of {} with coefficients in {}, weights <= {}\n",
        kind,
        cx.algebra().name(),
        cx.module().name(),
        fmt_rat(&wmax)
    );
    text.push_str("n\tweight\tdim_C\trank_in\trank_out\tdim_H\n");
    let mut json_rows = Vec::new();
    let mut reps = Vec::new();
    for r in &rows {
        let w = fmt_rat(&r.weight);
        let _ = writeln!(text, "{}\t{w}\t{}\t{}\t{}\t{}", r.n, r.dim_c, r.rank_in, r.rank_out, r.dim_h);
        json_rows.push(json!({
            "n": r.n, "weight": w, "dim_c": r.dim_c,
            "rank_in": r.rank_in, "rank_out": r.rank_out, "dim_h": r.dim_h,
        }));
        if a.reps && r.dim_h > 0 {
            for c in cx.representatives(r.n, &r.weight, kind)? {
                reps.push(json!({"n": r.n, "weight": w, "cocycle": cx.render(&c)}));
            }
        }
    }
    let _ = writeln!(
        text,
        "totals: {}",
        tot.iter().enumerate().map(|(n, d)| format!("H^{n} = {d}")).collect::<Vec<_>>().join(", ")
    );
    for r in &reps {
        let _ = writeln!(text, "  n={} weight={}: {}", r["n"], r["weight"].as_str().unwrap_or(""), r["cocycle"].as_str().unwrap_or(""));
    }
    let json = json!({
        "complex": kind.to_string(),
        "algebra": cx.algebra().name(),
        "module": cx.module().name(),
        "wmax": fmt_rat(&wmax),
        "rows": json_rows,
        "totals": tot,
        "representatives": reps,
    });
    Ok(Report::new(text, json, true))
}

fn dist(a: &DistArgs) -> Result<Report, CliError> {
    let alg = load_algebra(&a.target)?;
    let gens = alg.generators(0);
    let mut text = String::new();
    let mut pairs = Vec::new();
    let mut ok = true;
    for x in &gens {
        for y in &gens {
            let d = product_distribution(&alg, x, y, a.window)?;
            let order = d.locality_order()?;
            let lam = alg.lambda_product(&ConfElt::basis(*x), &ConfElt::basis(*y), Var::Lambda)?;
            let coeffs: Vec<String> = (0..order)
                .map(|j| alg.nth_product(&ConfElt::basis(*x), &ConfElt::basis(*y), j).map(|c| alg.render(&c)))
                .collect::<Result<_, _>>()?;
            let agrees = oracle_check(&alg, x, y, a.window)?;
            ok &= agrees;
            let (nx, ny) = (alg.gen_name(x), alg.gen_name(y));
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.as_str() != "0")
                .map(|(j, c)| format!("({c})(w) d^({j})delta(z-w)"))
                .collect();
            let _ = writeln!(
                text,
                "[{nx}(z), {ny}(w)] = {}  (order {order}, modes {})",
                if terms.is_empty() { "0".into() } else { terms.join(" + ") },
                if agrees { "agree" } else { "DISAGREE" }
            );
            pairs.push(json!({
                "a": nx, "b": ny, "order": order, "coefficients": coeffs,
                "lambda_bracket": alg.render(&lam), "modes_agree": agrees,
            }));
        }
    }
    let rows = law_suite(a.seed, a.samples, a.window)?;
    let mut by_law: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &rows {
        let e = by_law.entry(r.law).or_default();
        e.0 += 1;
        e.1 += r.passed as usize;
    }
    let _ = writeln!(text, "law suite: {} samples, window {}, seed {}", a.samples, a.window, a.seed);
    for (law, (n, p)) in &by_law {
        let _ = writeln!(text, "  {law}: {p}/{n}");
    }
    for r in rows.iter().filter(|r| !r.passed) {
        let _ = writeln!(text, "  FAILED {} sample {} (order {}, guard {})", r.law, r.sample, r.order, r.guard);
    }
    ok &= rows.iter().all(|r| r.passed);
    let json = json!({
        "algebra": alg.name(),
        "window": a.window,
        "products": pairs,
        "laws": rows.iter().map(|r| json!({
            "sample": r.sample, "law": r.law, "order": r.order,
            "window": r.window, "guard": r.guard, "passed": r.passed,
        })).collect::<Vec<_>>(),
    });
    Ok(Report::new(text, json, ok))
}

fn show(a: &ShowArgs) -> Result<Report, CliError> {
    let alg = load_algebra(&a.target)?;
    let file = AlgebraFile::from_algebra(&alg)?;
    let json = serde_json::to_value(&file).map_err(|e| CliError::Input(e.to_string()))?;
    let text = serde_json::to_string_pretty(&json).map_err(|e| CliError::Input(e.to_string()))? + "\n";
    Ok(Report::new(text, json, true))
}

fn list() -> Result<Report, CliError> {
    let mut algebras = Vec::new();
    for (name, _) in ALGEBRA_PRESETS {
        let alg = load_algebra(name)?;
        algebras.push((name, alg.generators(0).len()));
    }
    let mut modules = Vec::new();
    for (name, src) in MODULE_PRESETS {
        let file = crate::defs::ModuleFile::parse(src, name)?;
        let m = load_module(name, Arc::new(load_algebra(&file.algebra)?))?;
        modules.push((name, file.algebra, m.dim()));
    }
    let families = [
        "cur:<algebra>", "semidirect:<algebra>", "wN:<n>", "kN:<n>", "gc:<n>", "cend:<n>", "sN:<n> (check only)",
        "<file>.json",
    ];
    let module_specs = ["trivial", "m:<Delta>,<alpha>", "standard", "adjoint", "cend:<alpha>", "dual:<module>", "<file>.json"];
    let mut text = String::from("algebra presets:\n");
    for (n, g) in &algebras {
        let _ = writeln!(text, "  {n}: {g} generator{}", if *g == 1 { "" } else { "s" });
    }
    text.push_str("module presets:\n");
    for (n, a, d) in &modules {
        let _ = writeln!(text, "  {n}: rank {d} over {a}");
    }
    let _ = writeln!(text, "algebra families: {}", families.join(", "));
    let _ = writeln!(text, "modules: {}", module_specs.join(", "));
    let json = json!({
        "algebra_presets": algebras.iter().map(|(n, g)| json!({"name": n, "generators": g})).collect::<Vec<_>>(),
        "module_presets": modules.iter().map(|(n, a, d)| json!({"name": n, "algebra": a, "rank": d})).collect::<Vec<_>>(),
        "algebra_families": families,
        "modules": module_specs,
    });
    Ok(Report::new(text, json, true))
}
