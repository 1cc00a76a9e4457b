use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::time::Duration;

use bimodal::fmp::{shrink, FmpError};
use bimodal::formula::{parse, print, print_raw, Formula};
use bimodal::frames::World;
use bimodal::machines::{
    bounded_oracle, parse_machine, Config, Machine, Problem, Semantics, StateId,
};
use bimodal::reductions::{compile_machine, CompiledEncoding, EncodingError, Target};
use bimodal::semantics::{
    bounded_sat, parse_model, print_model, valid_in_frame, Checker, FrameClass, Model, SearchOutcome, SearchSpec,
    Validity,
};
use bimodal::witnesses::{
    build, decode_run, verify, verify_backward_claims, verify_model, Witness, WitnessKind, WitnessSpec,
};
use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Cli, Command};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn usage(msg: impl Display) -> Failure {
    Failure { code: 2, message: msg.to_string() }
}

fn failed(msg: impl Display) -> Failure {
    Failure { code: 1, message: msg.to_string() }
}

fn budget(msg: impl Display) -> Failure {
    Failure { code: 3, message: msg.to_string() }
}

type Out<'a> = &'a mut dyn Write;

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| usage(format!("write error: {e}")))?
    };
}

fn read(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
}

fn write_file(path: &str, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| usage(format!("{path}: {e}")))
}

fn formula(arg: &str) -> Result<Formula, Failure> {
    let src = match arg.strip_prefix('@') {
        Some(path) => read(path)?,
        None => arg.to_string(),
    };
    parse(&src).map_err(|e| usage(format!("formula: {e}")))
}

fn model(path: &str) -> Result<Model, Failure> {
    parse_model(&read(path)?).map_err(|e| usage(format!("{path}: {e}")))
}

fn machine(path: &str) -> Result<Machine, Failure> {
    parse_machine(&read(path)?).map_err(|e| usage(format!("{path}: {e}")))
}

fn encoding(path: &str) -> Result<CompiledEncoding, Failure> {
    CompiledEncoding::from_text(&read(path)?).map_err(|e| usage(format!("{path}: {e}")))
}

fn state(m: &Machine, name: Option<&str>) -> Result<(StateId, String), Failure> {
    match name {
        None => Ok((0, m.states[0].clone())),
        Some(q) => m.state_id(q).map(|id| (id, q.to_string())).map_err(usage),
    }
}

fn kind(name: &str) -> Result<WitnessKind, Failure> {
    WitnessKind::from_name(name).ok_or_else(|| {
        let all: Vec<&str> = WitnessKind::ALL.iter().map(|k| k.name()).collect();
        usage(format!("unknown witness kind `{name}` (expected one of {})", all.join(", ")))
    })
}

fn compile(m: &Machine, target: &str, q0: &str, qr: Option<&str>) -> Result<(Target, CompiledEncoding), Failure> {
    let t = Target::from_name(target, q0, qr).map_err(|e| match e {
        EncodingError::UnknownTarget(_) => usage(format!("{e} (expected one of {})", Target::NAMES.join(", "))),
        _ => usage(e),
    })?;
    let enc = compile_machine(m, &t).map_err(usage)?;
    Ok((t, enc))
}

/// Witness models are written with their kind and boundary as comments so
/// `verify-witness` can tell truncation failures from real ones.
fn witness_text(w: &Witness) -> String {
    let labels = &w.model.frame.labels;
    let boundary: Vec<&str> = w.boundary.ones().map(|b| labels[b].as_str()).collect();
    format!(
        "# witness: {}\n# boundary-note: {}\n# boundary: {}\n{}",
        w.kind,
        w.boundary_note,
        boundary.join(" "),
        print_model(&w.model)
    )
}

struct WitnessNotes {
    kind: Option<WitnessKind>,
    boundary: FixedBitSet,
}

fn witness_notes(src: &str, m: &Model) -> Result<WitnessNotes, Failure> {
    let mut notes = WitnessNotes { kind: None, boundary: FixedBitSet::with_capacity(m.len()) };
    for line in src.lines() {
        if let Some(k) = line.strip_prefix("# witness:") {
            notes.kind = Some(kind(k.trim())?);
        } else if let Some(b) = line.strip_prefix("# boundary:") {
            for l in b.split_whitespace() {
                let w = m.frame.world_by_label(l).ok_or_else(|| usage(format!("unknown boundary world `{l}`")))?;
                notes.boundary.insert(w);
            }
        }
    }
    Ok(notes)
}

fn target_kind(enc: &CompiledEncoding) -> Option<WitnessKind> {
    let name = enc.target.split('(').next()?.trim();
    WitnessKind::ALL.into_iter().find(|k| k.target_name() == name)
}

fn world(m: &Model, label: Option<&str>) -> Result<World, Failure> {
    match label {
        Some(l) => m.frame.world_by_label(l).ok_or_else(|| usage(format!("unknown world `{l}`"))),
        None => m.root.ok_or_else(|| usage("model has no root; pass --world")),
    }
}

pub fn run(cli: &Cli, out: Out) -> Result<(), Failure> {
    match &cli.command {
        Command::Parse { formula: f, raw } => {
            let f = formula(f)?;
            say!(out, "{}", if *raw { print_raw(&f) } else { print(&f) });
            say!(out, "size: {}", f.size());
            say!(out, "modal depth: {}", f.modal_depth());
            say!(out, "subformulas: {}", f.subformulas().len());
        }
        Command::Check { model: path, formula: f, world: w } => {
            let m = model(path)?;
            let f = formula(f)?;
            let w = world(&m, w.as_deref())?;
            let holds = Checker::new(&m).holds(w, &f);
            say!(out, "{} at {}", if holds { "HOLDS" } else { "FAILS" }, m.world_name(w));
            if !holds {
                return Err(failed("formula fails"));
            }
        }
        Command::Valid { model: path, formula: f, budget: b, sample } => {
            let m = model(path)?;
            let f = formula(f)?;
            match valid_in_frame(&m.frame, &f, *b) {
                Ok(Validity::Valid) => say!(out, "VALID in the frame ({} worlds)", m.len()),
                Ok(Validity::Refuted { model: r, world: w }) => {
                    say!(out, "REFUTED at {}", r.world_name(w));
                    say!(out, "{}", print_model(&r).trim_end());
                    return Err(failed("formula is not valid in the frame"));
                }
                Err(e) => {
                    let Some(n) = sample else { return Err(budget(e)) };
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    let vars = f.vars();
                    for i in 0..*n {
                        let mut r = Model::new(m.frame.clone());
                        for v in &vars {
                            r.declare(v);
                            for w in 0..r.len() {
                                if rng.gen_bool(0.5) {
                                    r.set(v, w);
                                }
                            }
                        }
                        if let Some(w) = Checker::new(&r).eval(&bimodal::formula::not(f.clone())).ones().next() {
                            say!(out, "REFUTED at {} by sample {i} (seed {})", r.world_name(w), cli.seed);
                            say!(out, "{}", print_model(&r).trim_end());
                            return Err(failed("formula is not valid in the frame"));
                        }
                    }
                    say!(out, "not refuted by {n} random valuations (seed {})", cli.seed);
                    return Err(budget(e));
                }
            }
        }
        Command::Search { formula: f, class, hmax, vmax, max_worlds, timeout, max_candidates, out: dest } => {
            let f = formula(f)?;
            let class = FrameClass::from_name(class).ok_or_else(|| usage(format!("unknown frame class `{class}`")))?;
            let mut spec = SearchSpec::new(class, *hmax, *vmax);
            if let Some(n) = max_worlds {
                spec.max_worlds = *n;
            }
            spec.budget.max_time = timeout.map(Duration::from_secs);
            spec.budget.max_candidates = *max_candidates;
            spec.jobs = cli.jobs.max(1);
            match bounded_sat(&f, &spec) {
                Ok(SearchOutcome::Found(found)) => {
                    say!(out, "model found: {} (candidate {})", found.description, found.candidate);
                    say!(out, "satisfied at {}", found.model.world_name(found.world));
                    let mut m = found.model.clone();
                    m.root = Some(found.world);
                    let text = print_model(&m);
                    match dest {
                        Some(p) => write_file(p, &text)?,
                        None => say!(out, "{}", text.trim_end()),
                    }
                }
                Ok(SearchOutcome::Exhausted(rep)) => {
                    say!(out, "no model within bounds: {rep}");
                    if cli.timings {
                        say!(out, "elapsed: {:.3}s", rep.elapsed.as_secs_f64());
                    }
                }
                Err(e) => return Err(budget(e)),
            }
        }
        Command::Compile { machine: path, target, q0, qr, out: dest } => {
            let m = machine(path)?;
            let (_, q0) = state(&m, q0.as_deref())?;
            let (_, enc) = compile(&m, target, &q0, qr.as_deref())?;
            let text = enc.to_text();
            match dest {
                Some(p) => write_file(p, &text)?,
                None => say!(out, "{}", text.trim_end()),
            }
            say!(out, "compiled {}: {} conjuncts, formula size {}", enc.target, enc.conjuncts.len(), enc.formula.size());
        }
        Command::Simulate { machine: path, q0, depth, lossy, limit } => {
            let m = machine(path)?;
            let (q0, _) = state(&m, q0.as_deref())?;
            let sem = match lossy {
                Some(cap) => Semantics::Lossy { cap: *cap },
                None => Semantics::Reliable,
            };
            let mut count = 0;
            for r in m.bounded_runs(m.initial(q0), *depth, sem).take(*limit) {
                say!(out, "{}", r.display(&m));
                count += 1;
            }
            say!(out, "{count} run(s)");
        }
        Command::Oracle { machine: path, problem, q0, qr, k, cap, depth } => {
            let m = machine(path)?;
            let (q0, _) = state(&m, q0.as_deref())?;
            let start: Config = m.initial(q0);
            let target = || -> Result<StateId, Failure> {
                let q = qr.as_deref().ok_or_else(|| usage(format!("{problem} needs --qr")))?;
                m.state_id(q).map_err(usage)
            };
            let p = match problem.as_str() {
                "nontermination" => Problem::NonTermination { start },
                "reachability" => Problem::Reachability { start, target: target()? },
                "recurrence" => Problem::Recurrence { start, target: target()?, k: *k },
                "lossy-reach" => Problem::LossyReachability { start, target: target()?, cap: *cap },
                "lossy-omega" => Problem::LossyOmegaReach { start, target: target()?, k: *k, cap: *cap },
                other => return Err(usage(format!("unknown problem `{other}`"))),
            };
            let v = bounded_oracle(&m, &p, *depth);
            say!(out, "{v}");
            if let bimodal::machines::Verdict::YesWithinBound { run, .. } = &v {
                say!(out, "{}", run.display(&m));
            }
        }
        Command::BuildWitness { machine: path, kind: k, q0, qr, k: kk, width, depth, out: dest } => {
            let m = machine(path)?;
            let k = kind(k)?;
            let (q0, _) = state(&m, q0.as_deref())?;
            let qr = qr.as_deref().map(|q| m.state_id(q).map_err(usage)).transpose()?;
            let mut spec = WitnessSpec::from_oracle(k, &m, q0, qr, *kk, *depth).map_err(failed)?;
            spec.width = *width;
            let w = build(&spec).map_err(failed)?;
            for r in &spec.runs {
                say!(out, "run: {}", r.display(&m));
            }
            say!(out, "witness {}: {} worlds; boundary: {}", k, w.model.len(), w.boundary_note);
            let text = witness_text(&w);
            match dest {
                Some(p) => write_file(p, &text)?,
                None => say!(out, "{}", text.trim_end()),
            }
        }
        Command::VerifyWitness { model: path, enc, backward } => {
            let src = read(path)?;
            let m = parse_model(&src).map_err(|e| usage(format!("{path}: {e}")))?;
            if m.root.is_none() {
                return Err(usage("model has no root"));
            }
            let notes = witness_notes(&src, &m)?;
            let enc = encoding(enc)?;
            let mut rep = verify_model(&m, &enc, &notes.boundary, cli.jobs.max(1));
            rep.exact = notes.kind.is_none_or(|k| k.is_exact());
            write!(out, "{rep}").map_err(usage)?;
            let mut ok = rep.contract_holds();
            if let Some(kb) = backward {
                let claims = verify_backward_claims(&m, &enc, *kb);
                write!(out, "backward claims: {claims}").map_err(usage)?;
                ok &= claims.ok();
            }
            if !ok {
                return Err(failed("verification failed"));
            }
        }
        Command::Decode { model: path, enc, machine: mpath, kind: k, max_len } => {
            let src = read(path)?;
            let m = parse_model(&src).map_err(|e| usage(format!("{path}: {e}")))?;
            let enc = encoding(enc)?;
            let mach = machine(mpath)?;
            let k = match k {
                Some(k) => kind(k)?,
                None => witness_notes(&src, &m)?
                    .kind
                    .or_else(|| target_kind(&enc))
                    .ok_or_else(|| usage("cannot tell the witness kind; pass --kind"))?,
            };
            let runs = decode_run(&m, &enc, &mach, k, *max_len).map_err(failed)?;
            for (i, d) in runs.iter().enumerate() {
                let extra = if k == WitnessKind::LossyExp { format!(" ({} S* points)", d.sstar) } else { String::new() };
                say!(out, "run {i}: {}{extra}", d.run.display(&mach));
            }
        }
        Command::Shrink { model: path, formula: f, out: dest, trace } => {
            let m = model(path)?;
            let f = formula(f)?;
            let root = m.root.ok_or_else(|| usage("model has no root"))?;
            let (small, tr) = shrink(&m, &f, root).map_err(|e| match e {
                FmpError::NotPreserved { .. } | FmpError::Bound { .. } | FmpError::Inconsistent { .. } => failed(e),
                _ => usage(e),
            })?;
            match trace {
                Some(p) => write_file(p, &tr.to_string())?,
                None => write!(out, "{tr}").map_err(usage)?,
            }
            match dest {
                Some(p) => write_file(p, &print_model(&small))?,
                None => say!(out, "{}", print_model(&small).trim_end()),
            }
        }
        Command::Roundtrip { machine: path, target, q0, qr, k, width, depth } => {
            roundtrip(cli, out, path, target, q0.as_deref(), qr.as_deref(), *k, *width, *depth)?;
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn roundtrip(
    cli: &Cli,
    out: Out,
    path: &str,
    target: &str,
    q0: Option<&str>,
    qr: Option<&str>,
    k: usize,
    width: usize,
    depth: usize,
) -> Result<(), Failure> {
    let m = machine(path)?;
    let (q0id, q0) = state(&m, q0)?;
    let (t, enc) = compile(&m, target, &q0, qr)?;
    say!(out, "compiled {}: {} conjuncts", enc.target, enc.conjuncts.len());
    let kind = WitnessKind::for_target(&t);
    let qrid = qr.map(|q| m.state_id(q).map_err(usage)).transpose()?;
    let mut spec = WitnessSpec::from_oracle(kind, &m, q0id, qrid, k, depth).map_err(failed)?;
    spec.width = width;
    let w = build(&spec).map_err(failed)?;
    say!(out, "witness {}: {} worlds", kind, w.model.len());
    let rep = verify(&w, &enc, cli.jobs.max(1));
    let failing = rep.failing().count();
    say!(out, "verify: {} conjuncts, {} failing", rep.lines.len(), failing);
    for l in rep.failing() {
        say!(out, "  {l}");
    }
    if !rep.contract_holds() {
        return Err(failed(if rep.exact {
            "round trip open: some conjunct fails"
        } else {
            "round trip open: interior failure"
        }));
    }
    let max_len = match kind {
        WitnessKind::FwRec => Some(k),
        WitnessKind::BwInf | WitnessKind::BwRec => Some(k),
        _ => None,
    };
    let decoded = decode_run(&w.model, &enc, &m, kind, max_len).map_err(failed)?;
    if decoded.len() != spec.runs.len() {
        return Err(failed(format!("decoded {} run(s), built from {}", decoded.len(), spec.runs.len())));
    }
    for (d, r) in decoded.iter().zip(&spec.runs) {
        let n = d.run.len();
        if n == 0 || n > r.len() || d.run.configs[..] != r.configs[..n] {
            say!(out, "built:   {}", r.display(&m));
            say!(out, "decoded: {}", d.run.display(&m));
            return Err(failed("round trip open: decoded run differs"));
        }
        say!(out, "decoded: {}", d.run.display(&m));
        say!(out, "run of length {n} recovered");
    }
    Ok(())
}
