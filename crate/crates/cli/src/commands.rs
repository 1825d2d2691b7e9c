use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Map, Value};

use regopen::counterexamples::{
    cantor_trace, coverage_radius, dense_open_below_one, dyadic_sequence, fat_cantor, left_right_halves,
    smith_volterra_ratios, MATERIALIZE_CAP,
};
use regopen::credence::Credence;
use regopen::elementary::{AmbientKind, ElementarySet};
use regopen::finite_oracle::{run_oracle, Check};
use regopen::integrator::{
    bayes_expectation, conditional_expectation, conditional_expectation_exact, convergence_trace, integrate,
    integrate_exact, integrate_over_partition, mesh_for, simple_integral, BPartition,
};
use regopen::json::{
    credence_from_json, credence_to_json, decomposition_to_json, function_from_json, map_from_json, scalar_to_json,
    set_from_json, set_to_json, sets_from_json,
};
use regopen::liminal::{compactify, decompose};
use regopen::maps::change_of_variables_check;
use regopen::piecewise::PiecewiseAffine;
use regopen::selftest::{run_all, Sizes};
use regopen::stone::{atom_function, star_function, star_mass, star_measure, star_sum, FiniteAlgebra, StoneSpace};
use regopen::{Rational as Q, Scalar};

use crate::{AlgebraOp, Cli, IntegrandArgs, LiminalAction, Verb};

pub enum Status {
    Ok,
    Failed,
}

/// Atom counts up to this get every element checked by `stone`.
const STONE_EXHAUSTIVE_ATOMS: usize = 12;
/// Dyadic centres offered to the dense-open recursion.
const CENTRES: usize = 1 << 16;

pub fn run(cli: &Cli) -> Result<Status> {
    let dec = cli.decimals;
    match &cli.verb {
        Verb::Algebra { op, sets } => algebra(*op, sets),
        Verb::Integrate { input, eps, trace, emit } => integrate_cmd(input, eps, trace.is_some(), emit.as_deref(), dec),
        Verb::Expect { input, eps, partition } => expect(input, eps, partition.as_deref(), dec),
        Verb::Pushforward { map, credence, function, set, eps } => {
            pushforward(map, credence, function.as_deref(), set.as_deref(), eps, dec)
        }
        Verb::Liminal { action: LiminalAction::Decompose { credence } } => liminal(credence),
        Verb::Stone { generators, credence, emit } => stone(generators, credence, emit.as_deref(), dec),
        Verb::Oracle { max_points, checks, emit } => oracle(*max_points, checks, emit.as_deref()),
        Verb::Cantor { depth, ratios, csv } => cantor(*depth, ratios, csv.as_deref(), dec),
        Verb::Nocredence { cdf, depth, csv } => nocredence(cdf, *depth, csv.as_deref(), dec),
        Verb::Selftest { quick, seed, emit } => selftest(*quick, *seed, emit.as_deref()),
    }
}

/// Inline JSON when the argument starts with `{` or `[`, otherwise a file path.
fn load(arg: &str) -> Result<Value> {
    let text = match arg.trim_start().chars().next() {
        Some('{') | Some('[') => arg.to_string(),
        _ => fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?,
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON from {arg}"))
}

fn parse_q(s: &str) -> Result<Q> {
    Ok(Q::parse(s)?)
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values serialize"));
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v).expect("values serialize") + "\n";
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Inserts `key` as an exact rational, plus `key_decimal` when asked for.
fn put(m: &mut Map<String, Value>, key: &str, x: &Q, dec: Option<usize>) {
    m.insert(key.to_string(), scalar_to_json(x));
    if let Some(d) = dec {
        m.insert(format!("{key}_decimal"), Value::String(x.to_decimal(d)));
    }
}

fn fail(witness: Value) -> Result<Status> {
    print(&json!({"verified": false, "witness": witness}));
    Ok(Status::Failed)
}

fn algebra(op: AlgebraOp, args: &[String]) -> Result<Status> {
    let first = set_from_json::<Q>(&load(&args[0])?, None)?;
    let mut sets = vec![first.clone()];
    for a in &args[1..] {
        sets.push(set_from_json(&load(a)?, Some(first.ambient()))?);
    }
    let arity = |n: usize| -> Result<()> {
        if sets.len() != n {
            bail!("{op:?} takes {n} set(s), got {}", sets.len());
        }
        Ok(())
    };
    let out = match op {
        AlgebraOp::Join => set_to_json(&ElementarySet::join_all(&sets, first.ambient())?),
        AlgebraOp::Meet => {
            let mut acc = first.clone();
            for s in &sets[1..] {
                acc = acc.meet(s)?;
            }
            set_to_json(&acc)
        }
        AlgebraOp::Neg => {
            arity(1)?;
            set_to_json(&first.neg())
        }
        AlgebraOp::Boundary => {
            arity(1)?;
            json!({"points": first.boundary().points.iter().map(scalar_to_json).collect::<Vec<_>>()})
        }
        AlgebraOp::Extend => {
            arity(1)?;
            set_to_json(&first.extend()?)
        }
        AlgebraOp::Restrict => {
            arity(1)?;
            set_to_json(&first.restrict()?)
        }
        AlgebraOp::Regularize => {
            arity(1)?;
            set_to_json(&first)
        }
        AlgebraOp::Subset => {
            arity(2)?;
            json!({"result": sets[0].is_subset(&sets[1])?})
        }
        AlgebraOp::Disjoint => {
            arity(2)?;
            json!({"result": sets[0].is_disjoint(&sets[1])?})
        }
    };
    print(&out);
    Ok(Status::Ok)
}

struct Integrand {
    mu: Credence<Q>,
    g: PiecewiseAffine<Q>,
    b: ElementarySet<Q>,
}

fn integrand(input: &IntegrandArgs) -> Result<Integrand> {
    let mu = credence_from_json::<Q>(&load(&input.credence)?, None)?;
    let g = function_from_json(&load(&input.function)?)?;
    let b = match &input.set {
        Some(s) => set_from_json(&load(s)?, Some(mu.ambient()))?,
        None => ElementarySet::full(mu.ambient()),
    };
    Ok(Integrand { mu, g, b })
}

fn integrate_cmd(input: &IntegrandArgs, eps: &str, trace: bool, emit: Option<&Path>, dec: Option<usize>) -> Result<Status> {
    let Integrand { mu, g, b } = integrand(input)?;
    let eps = parse_q(eps)?;
    let n = mesh_for(&eps)?;
    if trace {
        let mut meshes = Vec::new();
        let mut m = Q::from_i64(1);
        while m < n {
            meshes.push(m.clone());
            m *= Q::two();
        }
        meshes.push(n);
        println!("{}", if dec.is_some() { "N,value,decimal" } else { "N,value" });
        for (mesh, v) in convergence_trace(&g, &mu, &b, &meshes)? {
            match dec {
                Some(d) => println!("{mesh},{v},{}", v.to_decimal(d)),
                None => println!("{mesh},{v}"),
            }
        }
        return Ok(Status::Ok);
    }
    let value = integrate(&g, &mu, &b, &eps)?;
    let exact = integrate_exact(&g, &mu, &b)?;
    let mass = mu.eval(&b)?;
    let gap = exact.clone() - value.clone();
    let within = gap >= Q::from_i64(0) && gap <= eps.clone() * mass.clone();
    let mut m = Map::new();
    put(&mut m, "value", &value, None);
    m.insert("decimal".into(), Value::String(value.to_decimal(dec.unwrap_or(10))));
    put(&mut m, "exact", &exact, dec);
    put(&mut m, "mass", &mass, dec);
    put(&mut m, "eps", &eps, None);
    put(&mut m, "mesh", &mesh_for(&eps)?, None);
    m.insert("within_tolerance".into(), Value::Bool(within));
    let report = Value::Object(m);
    if let Some(p) = emit {
        write_json(p, &report)?;
    }
    if !within {
        return fail(report);
    }
    print(&report);
    Ok(Status::Ok)
}

fn expect(input: &IntegrandArgs, eps: &str, partition: Option<&str>, dec: Option<usize>) -> Result<Status> {
    let Integrand { mu, g, b } = integrand(input)?;
    let eps = parse_q(eps)?;
    let exact = conditional_expectation_exact(&g, &mu, &b)?;
    let approx = conditional_expectation(&g, &mu, &b, &eps)?;
    let mut m = Map::new();
    put(&mut m, "exact", &exact, dec);
    put(&mut m, "approx", &approx, dec);
    put(&mut m, "eps", &eps, None);
    let mut ok = true;
    if let Some(p) = partition {
        let (_, cells) = sets_from_json(&load(p)?, Some(mu.ambient()))?;
        let part = BPartition::new(b.clone(), cells)?;
        let bayes = bayes_expectation(&g, &mu, &part)?;
        let summed = integrate_over_partition(&g, &mu, &part)?;
        let whole = integrate_exact(&g, &mu, &b)?;
        put(&mut m, "bayes", &bayes, dec);
        put(&mut m, "partition_sum", &summed, dec);
        put(&mut m, "integral", &whole, dec);
        ok = bayes == exact && summed == whole;
        m.insert("partition_consistent".into(), Value::Bool(ok));
    }
    let report = Value::Object(m);
    if !ok {
        return fail(report);
    }
    print(&report);
    Ok(Status::Ok)
}

fn pushforward(
    map: &str,
    credence: &str,
    function: Option<&str>,
    set: Option<&str>,
    eps: &str,
    dec: Option<usize>,
) -> Result<Status> {
    let phi = map_from_json::<Q>(&load(map)?)?;
    let mu = credence_from_json(&load(credence)?, Some(phi.domain()))?;
    let nu = phi.pushforward(&mu)?;
    let mut m = Map::new();
    m.insert("credence".into(), credence_to_json(&nu));
    let (Some(f), Some(s)) = (function, set) else {
        print(&Value::Object(m));
        return Ok(Status::Ok);
    };
    let g = function_from_json(&load(f)?)?;
    let b = set_from_json(&load(s)?, Some(phi.codomain()))?;
    let eps = parse_q(eps)?;
    let cov = change_of_variables_check(&phi, &mu, &g, &b, &eps)?;
    let mut c = Map::new();
    c.insert("preimage".into(), set_to_json(&phi.preimage(&b)?));
    put(&mut c, "lhs_exact", &cov.lhs_exact, dec);
    put(&mut c, "rhs_exact", &cov.rhs_exact, dec);
    put(&mut c, "lhs_approx", &cov.lhs_approx, dec);
    put(&mut c, "rhs_approx", &cov.rhs_approx, dec);
    put(&mut c, "eps", &cov.eps, None);
    c.insert("exact_holds".into(), Value::Bool(cov.exact_holds()));
    c.insert("approx_holds".into(), Value::Bool(cov.approx_holds()));
    m.insert("change_of_variables".into(), Value::Object(c));
    let report = Value::Object(m);
    if !cov.holds() {
        return fail(report);
    }
    print(&report);
    Ok(Status::Ok)
}

fn liminal(credence: &str) -> Result<Status> {
    let mut mu = credence_from_json::<Q>(&load(credence)?, None)?;
    if mu.ambient().kind() == AmbientKind::Open && mu.ambient().is_bounded() {
        mu = compactify(&mu)?;
    }
    print(&decomposition_to_json(&decompose(&mu)?));
    Ok(Status::Ok)
}

fn stone(generators: &str, credence: &str, emit: Option<&Path>, dec: Option<usize>) -> Result<Status> {
    let (ambient, gens) = sets_from_json::<Q>(&load(generators)?, None)?;
    let mu = credence_from_json(&load(credence)?, Some(&ambient))?;
    let alg = FiniteAlgebra::generate(&gens, &ambient)?;
    let space = StoneSpace::new(alg.clone());
    let weights = star_measure(&mu, &alg)?;
    let values: Vec<Q> = (1..=alg.atom_count()).map(|i| Q::from_i64(i as i64)).collect();
    let f = atom_function(&alg, values)?;
    let star = star_function(&f, &alg)?;

    let k = alg.atom_count();
    let exhaustive = k <= STONE_EXHAUSTIVE_ATOMS;
    let masks: Vec<u128> = if exhaustive {
        (0..1u128 << k).collect()
    } else {
        let full = alg.full_mask();
        let mut v = vec![0, full];
        for i in 0..k {
            v.push(1 << i);
            v.push(full & !(1 << i));
        }
        v
    };
    let mut failures = Vec::new();
    for &mask in &masks {
        let e = alg.element(mask);
        let round_trip = space.clopen(&e)? == mask;
        let mass = mu.eval(&e)?;
        let integral = simple_integral(&f, &mu, &e)?;
        let star_m = star_mass(&weights, mask);
        let star_i = star_sum(&star, &weights, mask);
        if !round_trip || mass != star_m || integral != star_i {
            failures.push(json!({
                "element": set_to_json(&e),
                "mask": mask.to_string(),
                "round_trip": round_trip,
                "mass": scalar_to_json(&mass),
                "star_mass": scalar_to_json(&star_m),
                "integral": scalar_to_json(&integral),
                "star_integral": scalar_to_json(&star_i),
            }));
        }
    }
    let total = star_mass(&weights, alg.full_mask());
    let mut rep = Map::new();
    rep.insert("elements_checked".into(), json!(masks.len()));
    rep.insert("exhaustive".into(), Value::Bool(exhaustive));
    put(&mut rep, "total_weight", &total, dec);
    rep.insert("failures".into(), Value::Array(failures.clone()));
    rep.insert("passed".into(), Value::Bool(failures.is_empty() && total == Q::from_i64(1)));
    let report = json!({
        "atoms": alg.atoms().iter().map(set_to_json).collect::<Vec<_>>(),
        "weights": weights.iter().map(scalar_to_json).collect::<Vec<_>>(),
        "report": rep,
    });
    if let Some(p) = emit {
        write_json(p, &report)?;
    }
    if !failures.is_empty() || total != Q::from_i64(1) {
        return fail(report);
    }
    print(&report);
    Ok(Status::Ok)
}

fn oracle(max_points: usize, checks: &str, emit: Option<&Path>) -> Result<Status> {
    let mut parsed = checks.split(',').filter(|s| !s.trim().is_empty()).map(Check::parse).collect::<regopen::Result<Vec<_>>>()?;
    parsed.sort();
    parsed.dedup();
    if parsed.is_empty() {
        bail!("--checks selects nothing");
    }
    let report = run_oracle(max_points, &parsed)?;
    let names: Vec<&str> = parsed.iter().map(|c| c.name()).collect();
    println!("checks: {}", names.join(","));
    println!("{:>6} {:>10} {:>8} {:>8}", "points", "topologies", "runs", "failures");
    for &(n, tops, runs) in &report.rows {
        let failed = report.failures.iter().filter(|f| f.points == n).count();
        println!("{n:>6} {tops:>10} {runs:>8} {failed:>8}");
    }
    let failures: Vec<Value> = report
        .failures
        .iter()
        .map(|f| json!({"points": f.points, "opens": f.opens, "check": f.check.name(), "detail": f.detail}))
        .collect();
    if let Some(p) = emit {
        write_json(p, &Value::Array(failures.clone()))?;
    }
    if let Some(first) = failures.into_iter().next() {
        return fail(first);
    }
    Ok(Status::Ok)
}

fn parse_ratios(arg: &str, depth: usize) -> Result<Vec<Q>> {
    if arg.trim() == "quarter" {
        return Ok(smith_volterra_ratios(depth));
    }
    let ratios = arg.split(',').map(parse_q).collect::<Result<Vec<_>>>()?;
    if ratios.len() < depth {
        bail!("--ratios lists {} ratios but --depth is {depth}", ratios.len());
    }
    Ok(ratios)
}

struct CantorRow {
    depth: usize,
    measure: Q,
    gap: Q,
    l_plus_r: Q,
    materialized: bool,
    consistent: bool,
}

/// Stages up to the cap are built out and cross-checked against the
/// block-count summary; deeper stages use the summary alone, where `L` and
/// `R` split `U_n` at ½ so their lengths sum to its measure.
fn cantor_row(n: usize, ratios: &[Q], summary_measure: &Q, summary_gap: &Q) -> Result<CantorRow> {
    if n > MATERIALIZE_CAP {
        return Ok(CantorRow {
            depth: n,
            measure: summary_measure.clone(),
            gap: summary_gap.clone(),
            l_plus_r: summary_measure.clone(),
            materialized: false,
            consistent: true,
        });
    }
    let st = fat_cantor(n, ratios)?;
    let (l, r) = left_right_halves(&st.removed)?;
    let lr = l.length().expect("bounded") + r.length().expect("bounded");
    let gap = coverage_radius(&st.removed)?;
    let consistent = st.measure == *summary_measure && gap == *summary_gap && lr == st.measure;
    Ok(CantorRow { depth: n, measure: st.measure, gap, l_plus_r: lr, materialized: true, consistent })
}

fn cantor(depth: usize, ratios: &str, csv: Option<&Path>, dec: Option<usize>) -> Result<Status> {
    let ratios = parse_ratios(ratios, depth)?;
    let trace = cantor_trace(depth, &ratios)?;
    let rows = if csv.is_some() { 0..=depth } else { depth..=depth };
    let rows = rows
        .map(|n| cantor_row(n, &ratios, &trace[n].measure, &trace[n].coverage_radius))
        .collect::<Result<Vec<_>>>()?;
    if let Some(p) = csv {
        let mut text = String::from("depth,measure,gap,L_plus_R\n");
        for r in &rows {
            text += &format!("{},{},{},{}\n", r.depth, r.measure, r.gap, r.l_plus_r);
        }
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let last = rows.last().expect("at least the final stage");
    let mut m = Map::new();
    m.insert("depth".into(), json!(depth));
    put(&mut m, "measure", &last.measure, dec);
    put(&mut m, "gap", &last.gap, dec);
    put(&mut m, "L_plus_R", &last.l_plus_r, dec);
    m.insert("materialized".into(), Value::Bool(last.materialized));
    let report = Value::Object(m);
    if let Some(bad) = rows.iter().find(|r| !r.consistent) {
        return fail(json!({"depth": bad.depth, "measure": bad.measure.to_string(), "gap": bad.gap.to_string()}));
    }
    print(&report);
    Ok(Status::Ok)
}

fn nocredence(cdf: &str, depth: usize, csv: Option<&Path>, dec: Option<usize>) -> Result<Status> {
    let cdf = function_from_json::<Q>(&load(cdf)?)?;
    let rs = dyadic_sequence::<Q>(CENTRES);
    let st = dense_open_below_one(&cdf, &rs, depth)?;
    if let Some(p) = csv {
        let mut text = String::from("depth,measure,gap,L_plus_R,bound\n");
        for n in 1..=depth {
            let s = if n == depth { st.clone() } else { dense_open_below_one(&cdf, &rs, n)? };
            text += &format!("{n},{},{},{},{}\n", s.mass, s.coverage_radius, s.halves_mass, s.bound);
        }
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    let mut m = Map::new();
    m.insert("depth".into(), json!(depth));
    put(&mut m, "measure", &st.mass, dec);
    put(&mut m, "gap", &st.coverage_radius, dec);
    put(&mut m, "L_plus_R", &st.halves_mass, dec);
    put(&mut m, "bound", &st.bound, dec);
    m.insert("set".into(), set_to_json(&st.set));
    let report = Value::Object(m);
    if st.mass >= Q::from_i64(1) || st.halves_mass >= Q::from_i64(1) {
        return fail(report);
    }
    print(&report);
    Ok(Status::Ok)
}

fn selftest(quick: bool, seed: u64, emit: Option<&Path>) -> Result<Status> {
    let sizes = if quick { Sizes::QUICK } else { Sizes::FULL };
    let outcomes = run_all(sizes, seed);
    let passed = outcomes.iter().all(|o| o.passed());
    for o in &outcomes {
        eprintln!("{} {} ({} cases)", if o.passed() { "PASS" } else { "FAIL" }, o.name, o.cases);
    }
    let report = json!({"passed": passed, "checks": outcomes.iter().map(|o| o.to_json()).collect::<Vec<_>>()});
    if let Some(p) = emit {
        write_json(p, &report)?;
    }
    print(&report);
    Ok(if passed { Status::Ok } else { Status::Failed })
}
