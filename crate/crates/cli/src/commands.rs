use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use ncpauli::approx::{approximation_report, ApproxOptions, GreedyOptions, TieBreak};
use ncpauli::epistemic::{evaluate_objective, joint_distribution, EpistemicError, EpistemicState};
use ncpauli::solver::{verify_witness, SolverOptions};
use ncpauli::structure::find_contextuality_certificate;
use ncpauli::{fixtures, load_hamiltonian, oracle, Hamiltonian, NoncontextualModel, PauliOp};
use serde_json::{json, Value};

use crate::{Format, GlobalArgs, TieBreakArg};

fn read_input(path: Option<&Path>) -> Result<Hamiltonian> {
    let text = match path {
        None => read_stdin()?,
        Some(p) if p.as_os_str() == "-" => read_stdin()?,
        Some(p) => {
            let resolved = if p.exists() {
                p.to_path_buf()
            } else {
                let mut with_ext = p.as_os_str().to_owned();
                with_ext.push(".json");
                let alt = PathBuf::from(with_ext);
                if alt.exists() { alt } else { p.to_path_buf() }
            };
            fs::read_to_string(&resolved).with_context(|| format!("reading {}", resolved.display()))?
        }
    };
    load_hamiltonian(&text).context("parsing Hamiltonian")
}

fn read_stdin() -> Result<String> {
    let mut s = String::new();
    io::stdin().read_to_string(&mut s).context("reading stdin")?;
    Ok(s)
}

fn solver_options(g: &GlobalArgs) -> SolverOptions {
    SolverOptions {
        exhaustive_threshold: g.exhaustive_threshold,
        restarts: g.restarts,
        seed: g.seed,
    }
}

fn emit(v: &Value) {
    println!("{v}");
}

fn labels(ops: &[PauliOp]) -> Vec<String> {
    ops.iter().map(PauliOp::label).collect()
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn build_model(h: &Hamiltonian) -> Result<NoncontextualModel> {
    NoncontextualModel::build(h).context("building noncontextual model")
}

pub fn check(g: &GlobalArgs, input: Option<&Path>) -> Result<ExitCode> {
    let h = read_input(input)?;
    let cert = find_contextuality_certificate(&h.ops());
    match g.format {
        Format::Json => emit(&json!({
            "noncontextual": cert.is_none(),
            "certificate": cert.as_ref().map(|c| vec![c.a.label(), c.b.label(), c.c.label()]),
        })),
        Format::Text => match &cert {
            None => println!("noncontextual"),
            Some(c) => println!("contextual: {c}"),
        },
    }
    Ok(exit(cert.is_none()))
}

pub fn generators(g: &GlobalArgs, input: Option<&Path>) -> Result<ExitCode> {
    let h = read_input(input)?;
    let model = build_model(&h)?;
    let gens = labels(model.generators.generators());
    let reps = labels(model.generators.representatives());
    let terms: Vec<(String, String)> = h
        .terms()
        .iter()
        .zip(&model.decompositions)
        .map(|(t, d)| (t.op.label(), d.to_string()))
        .collect();
    match g.format {
        Format::Json => emit(&json!({
            "generators": gens,
            "representatives": reps,
            "universal": labels(model.structure.universal()),
            "decompositions": terms.iter().map(|(l, d)| json!([l, d])).collect::<Vec<_>>(),
        })),
        Format::Text => {
            for (j, l) in gens.iter().enumerate() {
                println!("G{} = {l}", j + 1);
            }
            for (i, l) in reps.iter().enumerate() {
                println!("C{} = {l}", i + 1);
            }
            for (l, d) in &terms {
                println!("{l} = {d}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn model(g: &GlobalArgs, input: Option<&Path>, state: Option<(Vec<i64>, Vec<f64>)>) -> Result<ExitCode> {
    let h = read_input(input)?;
    let model = build_model(&h)?;
    let f = &model.objective;
    let mut record = json!({
        "constant": f.constant,
        "num_generators": f.num_generators,
        "num_cliques": f.num_cliques,
        "rows": f.rows.iter().map(|row| json!({
            "generators": row.generators,
            "h": row.h,
            "h_clique": row.h_clique,
        })).collect::<Vec<_>>(),
    });
    let mut text = vec![format!("constant {}", f.constant)];
    for row in &f.rows {
        let js: Vec<String> = row.generators.iter().map(|j| format!("q{}", j + 1)).collect();
        let mut linear = format!("{}", row.h);
        for (i, v) in row.h_clique.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            let sign = if *v < 0.0 { '-' } else { '+' };
            linear.push_str(&format!(" {sign} {}*r{}", v.abs(), i + 1));
        }
        let factor = if js.is_empty() { String::new() } else { format!(" * {}", js.join("*")) };
        text.push(format!("({linear}){factor}"));
    }

    if let Some((q, r)) = state {
        let s = EpistemicState::from_signs(&q, r).context("invalid state")?;
        let energy = evaluate_objective(f, &s).context("evaluating objective")?;
        record["energy"] = json!(energy);
        text.push(format!("energy {energy}"));
        match joint_distribution(&s, &model.generators) {
            Ok(table) => {
                let mut support = Vec::new();
                for (idx, &p) in table.probabilities().iter().enumerate() {
                    if p > 0.0 {
                        let (c, gv) = table.ontic_state(idx);
                        text.push(format!("P(c={c:?}, g={gv:?}) = {p}"));
                        support.push(json!({"c": c, "g": gv, "p": p}));
                    }
                }
                record["distribution"] = json!(support);
            }
            Err(EpistemicError::TableTooLarge(bits)) => {
                text.push(format!("distribution omitted ({bits} ontic bits)"));
            }
            Err(e) => return Err(e).context("building distribution"),
        }
    }

    match g.format {
        Format::Json => emit(&record),
        Format::Text => println!("{}", text.join("\n")),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn solve(g: &GlobalArgs, input: Option<&Path>) -> Result<ExitCode> {
    let h = read_input(input)?;
    let model = build_model(&h)?;
    let result = model.solve(&solver_options(g));
    let gens = labels(model.generators.generators());
    let reps = labels(model.generators.representatives());
    let q = result.witness.q();
    // Adding zero turns a negative zero into a positive one.
    let r: Vec<f64> = result.witness.r().iter().map(|v| v + 0.0).collect();
    match g.format {
        Format::Json => emit(&json!({
            "energy": result.energy,
            "method": result.method,
            "q_evaluations": result.q_evaluations,
            "generators": gens,
            "q": q,
            "representatives": reps,
            "r": r,
        })),
        Format::Text => {
            println!("energy {:.12}", result.energy);
            println!("method {} ({} q evaluations)", result.method, result.q_evaluations);
            for (l, v) in gens.iter().zip(q) {
                println!("q {l} {v:+}");
            }
            for (l, v) in reps.iter().zip(&r) {
                println!("r {l} {v:.12}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn witness_from_file(path: &Path) -> Result<(Vec<i64>, Vec<f64>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: Value = serde_json::from_str(text.trim()).context("parsing witness")?;
    let q = v["q"]
        .as_array()
        .context("witness has no q array")?
        .iter()
        .map(|x| x.as_i64().context("q entries must be integers"))
        .collect::<Result<Vec<_>>>()?;
    let r = v["r"]
        .as_array()
        .context("witness has no r array")?
        .iter()
        .map(|x| x.as_f64().context("r entries must be numbers"))
        .collect::<Result<Vec<_>>>()?;
    Ok((q, r))
}

pub fn verify(
    g: &GlobalArgs,
    input: Option<&Path>,
    state: Option<(Vec<i64>, Vec<f64>)>,
    witness: Option<&Path>,
    below: f64,
) -> Result<ExitCode> {
    let (q, r) = match (state, witness) {
        (Some(s), _) => s,
        (None, Some(p)) => witness_from_file(p)?,
        (None, None) => bail!("provide --q and --r, or --witness"),
    };
    let h = read_input(input)?;
    let model = build_model(&h)?;
    let s = EpistemicState::from_signs(&q, r).context("invalid witness")?;
    let energy = evaluate_objective(&model.objective, &s).context("evaluating witness")?;
    let ok = verify_witness(&model.objective, &s, below).context("evaluating witness")?;
    match g.format {
        Format::Json => emit(&json!({"energy": energy, "threshold": below, "verified": ok})),
        Format::Text => println!("energy {energy:.12} {} {below}", if ok { "<=" } else { ">" }),
    }
    Ok(exit(ok))
}

pub fn approx(
    g: &GlobalArgs,
    input: Option<&Path>,
    batch: usize,
    brute_force: bool,
    chem_accuracy: f64,
    tie_break: TieBreakArg,
) -> Result<ExitCode> {
    let h = read_input(input)?;
    let opts = ApproxOptions {
        greedy: GreedyOptions {
            tie_break: match tie_break {
                TieBreakArg::Lex => TieBreak::Lexicographic,
                TieBreakArg::Table => TieBreak::InputOrder,
            },
            batch,
        },
        brute_force,
        chem_accuracy,
        solver: solver_options(g),
    };
    let report = approximation_report(&h, &opts)?;
    match g.format {
        Format::Json => emit(&serde_json::to_value(&report)?),
        Format::Text => println!("{report}"),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn oracle(g: &GlobalArgs, input: Option<&Path>, expect: &[String]) -> Result<ExitCode> {
    let h = read_input(input)?;
    let ops = expect
        .iter()
        .map(|l| l.parse::<PauliOp>().with_context(|| format!("parsing {l}")))
        .collect::<Result<Vec<_>>>()?;
    let state = oracle::ground_state(&h)?;
    let values: Vec<f64> = ops.iter().map(|op| state.vector.expectation(op)).collect::<Result<_, _>>()?;
    match g.format {
        Format::Json => emit(&json!({
            "energy": state.energy,
            "gap": state.gap,
            "expectations": expect.iter().zip(&values).map(|(l, v)| json!([l, v])).collect::<Vec<_>>(),
        })),
        Format::Text => {
            println!("energy {:.12}", state.energy);
            println!("gap {:.6e}", state.gap);
            for (l, v) in expect.iter().zip(&values) {
                println!("<{l}> {v:.12}");
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn close(value: f64, reference: f64) -> bool {
    (value - reference).abs() <= (0.02 * reference.abs()).max(0.05)
}

pub fn report(g: &GlobalArgs) -> Result<ExitCode> {
    let opts = ApproxOptions {
        solver: solver_options(g),
        ..ApproxOptions::default()
    };
    let mut all_ok = true;
    if g.format == Format::Text {
        println!(
            "{:<12} {:>2} {:>5} {:>9} {:>7} {:>17} {:>17}  status",
            "system", "n", "terms", "kept", "|R|", "eps_noncon", "eps_diag"
        );
    }
    for f in fixtures::all() {
        let e = f.expected();
        let r = approximation_report(&f.full(), &opts).with_context(|| f.name.to_string())?;
        let ok = r.full_terms == e.full_terms
            && r.noncon_terms == e.noncontextual_terms
            && r.generating_set_size == e.generating_set_size
            && close(r.eps_noncon, e.eps_noncontextual)
            && close(r.eps_diag, e.eps_diagonal);
        all_ok &= ok;
        match g.format {
            Format::Json => emit(&json!({
                "system": f.name,
                "qubits": e.qubits,
                "full_terms": r.full_terms,
                "noncon_terms": r.noncon_terms,
                "generating_set_size": r.generating_set_size,
                "eps_noncon": r.eps_noncon,
                "eps_diag": r.eps_diag,
                "reference": {
                    "noncon_terms": e.noncontextual_terms,
                    "generating_set_size": e.generating_set_size,
                    "eps_noncon": e.eps_noncontextual,
                    "eps_diag": e.eps_diagonal,
                },
                "ok": ok,
            })),
            Format::Text => println!(
                "{:<12} {:>2} {:>5} {:>4}/{:<4} {:>3}/{:<3} {:>8.3}/{:<8} {:>8.3}/{:<8}  {}",
                f.name,
                e.qubits,
                r.full_terms,
                r.noncon_terms,
                e.noncontextual_terms,
                r.generating_set_size,
                e.generating_set_size,
                r.eps_noncon,
                e.eps_noncontextual,
                r.eps_diag,
                e.eps_diagonal,
                if ok { "ok" } else { "MISMATCH" },
            ),
        }
    }
    Ok(exit(all_ok))
}
