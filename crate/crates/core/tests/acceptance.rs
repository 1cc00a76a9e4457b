//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bimodal::fmp::shrink;
use bimodal::foltl::*;
use bimodal::formula::*;
use bimodal::frames::*;
use bimodal::machines::*;
use bimodal::reductions::*;
use bimodal::semantics::*;
use bimodal::witnesses::*;

type Outcome = (bool, String);

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// 1. frame correspondence

/// Successor masks of a relation on at most 8 worlds.
type Masks = [u8; 8];

fn masks_of(r: &Relation) -> Masks {
    let mut m = [0u8; 8];
    for (a, b) in r.pairs() {
        m[a] |= 1 << b;
    }
    m
}

/// Truth sets indexed by world; bit `v` of entry `w` is the truth value under
/// valuation number `v` (bit `w` of `v` decides `p` at `w`).
fn dia_bits(n: usize, r: &Masks, x: &[u64; 8]) -> [u64; 8] {
    let mut out = [0u64; 8];
    for w in 0..n {
        let mut s = r[w];
        while s != 0 {
            let u = s.trailing_zeros() as usize;
            out[w] |= x[u];
            s &= s - 1;
        }
    }
    out
}

fn box_bits(n: usize, r: &Masks, x: &[u64; 8], full: u64) -> [u64; 8] {
    let mut neg = [0u64; 8];
    for w in 0..n {
        neg[w] = !x[w] & full;
    }
    let d = dia_bits(n, r, &neg);
    let mut out = [0u64; 8];
    for w in 0..n {
        out[w] = !d[w] & full;
    }
    out
}

/// Validity of the three interaction formulas by enumerating all `2^n`
/// valuations of `p` at once (`n <= 6`).
fn interaction_validity(n: usize, r0: &Masks, r1: &Masks) -> [bool; 3] {
    let vals = 1usize << n;
    let full = if vals == 64 { u64::MAX } else { (1u64 << vals) - 1 };
    // p at w under every valuation: the standard "bit w of the index" masks
    const P: [u64; 6] = [
        0xAAAA_AAAA_AAAA_AAAA,
        0xCCCC_CCCC_CCCC_CCCC,
        0xF0F0_F0F0_F0F0_F0F0,
        0xFF00_FF00_FF00_FF00,
        0xFFFF_0000_FFFF_0000,
        0xFFFF_FFFF_0000_0000,
    ];
    let mut p = [0u64; 8];
    for w in 0..n {
        p[w] = P[w] & full;
    }
    let d1p = dia_bits(n, r1, &p);
    let d0p = dia_bits(n, r0, &p);
    let d0d1 = dia_bits(n, r0, &d1p);
    let d1d0 = dia_bits(n, r1, &d0p);
    let b1p = box_bits(n, r1, &p, full);
    let d0b1 = dia_bits(n, r0, &b1p);
    let b1d0 = box_bits(n, r1, &d0p, full);
    let valid = |lhs: &[u64; 8], rhs: &[u64; 8]| (0..n).all(|w| (!lhs[w] | rhs[w]) & full == full);
    [valid(&d0d1, &d1d0), valid(&d1d0, &d0d1), valid(&d0b1, &b1d0)]
}

fn interaction_formulas() -> [Formula; 3] {
    [
        parse("<0><1>p -> <1><0>p").unwrap(),
        parse("<1><0>p -> <0><1>p").unwrap(),
        parse("<0>[1]p -> [1]<0>p").unwrap(),
    ]
}

fn masks_to_relation(n: usize, m: &Masks) -> Relation {
    Relation::from_pairs(n, (0..n).flat_map(|a| (0..n).filter(move |&b| m[a] >> b & 1 == 1).map(move |b| (a, b))))
}

/// Canonical 4-world relation codes (bit `4a + b`) under relabelling.
fn canonical_relations_4() -> Vec<u16> {
    let mut perms = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let permute = |code: u16, p: &[usize; 4]| {
        let mut out = 0u16;
        for a in 0..4 {
            for b in 0..4 {
                if code >> (4 * a + b) & 1 == 1 {
                    out |= 1 << (4 * p[a] + p[b]);
                }
            }
        }
        out
    };
    (0..=u16::MAX).filter(|&c| perms.iter().all(|p| permute(c, p) >= c)).collect()
}

fn code_masks(code: u16) -> Masks {
    let mut m = [0u8; 8];
    for (a, ma) in m.iter_mut().enumerate().take(4) {
        *ma = (code >> (4 * a) & 0xf) as u8;
    }
    m
}

struct Tally {
    frames: u64,
    positive: u64,
    mismatches: Vec<String>,
}

impl Tally {
    fn record(&mut self, n: usize, f: &TwoFrame, valid: [bool; 3]) {
        self.frames += 1;
        let cond = f.commute() && f.confluent();
        let all = valid.iter().all(|&v| v);
        if cond {
            self.positive += 1;
        }
        if cond != all && self.mismatches.len() < 5 {
            self.mismatches.push(format!(
                "n={n} r0={:?} r1={:?} valid={valid:?} commute={} confluent={}",
                f.r0.pairs().collect::<Vec<_>>(),
                f.r1.pairs().collect::<Vec<_>>(),
                f.commute(),
                f.confluent()
            ));
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let forms = interaction_formulas();
    let mut t = Tally { frames: 0, positive: 0, mismatches: Vec::new() };
    let mut oracle_mismatch = 0usize;
    let lib_valid = |f: &TwoFrame| -> [bool; 3] {
        let v = |phi: &Formula| valid_in_frame(f, phi, 1 << 20).unwrap().is_valid();
        [v(&forms[0]), v(&forms[1]), v(&forms[2])]
    };

    // every labelled frame on up to 3 worlds; the bit oracle is cross-checked
    // against full model checking on up to 2 worlds and a sample of 3
    let mut r = rng(1);
    for n in 1..=3usize {
        let bits = n * n;
        for c0 in 0u32..1 << bits {
            let m0 = small_masks(n, c0);
            let mut frame = TwoFrame::new(masks_to_relation(n, &m0), Relation::empty(n));
            for c1 in 0u32..1 << bits {
                let m1 = small_masks(n, c1);
                frame.r1 = masks_to_relation(n, &m1);
                let valid = interaction_validity(n, &m0, &m1);
                if (n <= 2 || r.gen_ratio(1, 64)) && lib_valid(&frame) != valid {
                    oracle_mismatch += 1;
                }
                t.record(n, &frame, valid);
            }
        }
    }

    // four worlds: R0 up to isomorphism, R1 arbitrary (in Gray-code order)
    let reps = canonical_relations_4();
    for &code in &reps {
        let m0 = code_masks(code);
        let mut frame = TwoFrame::new(masks_to_relation(4, &m0), Relation::empty(4));
        let mut g = 0u16;
        let mut m1 = [0u8; 8];
        for i in 0u32..1 << 16 {
            if i > 0 {
                let bit = i.trailing_zeros() as usize;
                g ^= 1 << bit;
                let (a, b) = (bit / 4, bit % 4);
                if g >> bit & 1 == 1 {
                    frame.r1.insert(a, b);
                } else {
                    frame.r1.remove(a, b);
                }
                m1 = code_masks(g);
            }
            let valid = interaction_validity(4, &m0, &m1);
            if i % 4099 == 0 && lib_valid(&frame) != valid {
                oracle_mismatch += 1;
            }
            t.record(4, &frame, valid);
        }
    }
    let exhaustive = t.frames;

    // random frames with 5 or 6 worlds: plain random, products, perturbed products
    let mut r = rng(2);
    for i in 0..200 {
        let frame = match i % 3 {
            0 => {
                let n = r.gen_range(5..=6);
                let density = r.gen_range(0.1..0.6);
                let mut rel = || Relation::from_pairs(n, (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| r.gen_bool(density)));
                let r0 = rel();
                TwoFrame::new(r0, rel())
            }
            k => {
                let (h, v) = if r.gen_bool(0.5) { (2, 3) } else { (3, 2) };
                let f = Frame::new(random_relation(&mut r, h));
                let g = Frame::new(random_relation(&mut r, v));
                let mut frame = product(&f, &g).frame;
                if k == 2 {
                    let (a, b) = (r.gen_range(0..6), r.gen_range(0..6));
                    let rel = if r.gen_bool(0.5) { &mut frame.r0 } else { &mut frame.r1 };
                    if rel.holds(a, b) {
                        rel.remove(a, b);
                    } else {
                        rel.insert(a, b);
                    }
                }
                frame
            }
        };
        let n = frame.len();
        let valid = lib_valid(&frame);
        if valid != interaction_validity(n, &masks_of(&frame.r0), &masks_of(&frame.r1)) {
            oracle_mismatch += 1;
        }
        t.record(n, &frame, valid);
    }

    let elapsed = start.elapsed();
    let ok = t.mismatches.is_empty() && oracle_mismatch == 0 && elapsed < Duration::from_secs(60);
    let mut detail = format!(
        "{exhaustive} frames on <= 4 worlds ({} R0 classes on 4) + 200 random, {} commuting+confluent, {} mismatches, {oracle_mismatch} oracle disagreements, {:.1}s",
        reps.len(),
        t.positive,
        t.mismatches.len(),
        elapsed.as_secs_f64()
    );
    for m in &t.mismatches {
        detail.push_str(&format!("; {m}"));
    }
    (ok, detail)
}

fn small_masks(n: usize, code: u32) -> Masks {
    let mut m = [0u8; 8];
    for (a, ma) in m.iter_mut().enumerate().take(n) {
        *ma = (code >> (n * a) & ((1 << n) - 1)) as u8;
    }
    m
}

fn random_relation(r: &mut ChaCha8Rng, n: usize) -> Relation {
    let density = r.gen_range(0.2..0.8);
    Relation::from_pairs(n, (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).filter(|_| r.gen_bool(density)))
}

// ---------------------------------------------------------------------------
// 2. FOLTL and the grid translation

fn random_foltl(r: &mut ChaCha8Rng, depth: usize) -> Foltl {
    if depth == 0 || r.gen_ratio(1, 4) {
        return match r.gen_range(0..10) {
            0 => Foltl::Top,
            1 => Foltl::Bot,
            k => pred(["P", "Q", "R"][k % 3]),
        };
    }
    match r.gen_range(0..6) {
        0 => fnot(random_foltl(r, depth - 1)),
        1 => fand(random_foltl(r, depth - 1), random_foltl(r, depth - 1)),
        2 => f_or(random_foltl(r, depth - 1), random_foltl(r, depth - 1)),
        3 => dia_f(random_foltl(r, depth - 1)),
        4 => exists_ne(random_foltl(r, depth - 1)),
        _ => box_f(random_foltl(r, depth - 1)),
    }
}

fn random_foltl_model(r: &mut ChaCha8Rng, mode: DomainMode) -> FoltlModel {
    let instants = r.gen_range(1..=4);
    let elements = r.gen_range(1..=4);
    let sizes: Vec<usize> = {
        let mut s: Vec<usize> = (0..instants).map(|_| r.gen_range(1..=elements)).collect();
        match mode {
            DomainMode::Constant => s.iter_mut().for_each(|x| *x = elements),
            DomainMode::Expanding => s.sort(),
            DomainMode::Decreasing => s.sort_by(|a, b| b.cmp(a)),
            DomainMode::Free => {}
        }
        s
    };
    // element ids are scattered so the grid translation has to relabel them
    let ids: Vec<usize> = (0..elements).map(|a| 3 * a + 1).collect();
    let domains: Vec<BTreeSet<usize>> = sizes.iter().map(|&k| ids[..k].iter().copied().collect()).collect();
    let mut preds = BTreeMap::new();
    for p in ["P", "Q", "R"] {
        let set: BTreeSet<(usize, usize)> =
            domains.iter().enumerate().flat_map(|(t, d)| d.iter().map(move |&a| (t, a))).filter(|_| r.gen_bool(0.4)).collect();
        preds.insert(p.to_string(), set);
    }
    FoltlModel::new(mode, domains, preds).unwrap()
}

fn criterion_2() -> Outcome {
    let mut r = rng(3);
    let modes = [DomainMode::Constant, DomainMode::Decreasing, DomainMode::Expanding];
    let (mut points, mut mismatches) = (0usize, Vec::new());
    for i in 0..200 {
        let mode = modes[i % 3];
        let m = random_foltl_model(&mut r, mode);
        let f = random_foltl(&mut r, 4);
        let g = bimodal::foltl::dagger(&m);
        let universe: Vec<usize> = m.universe().into_iter().collect();
        let tr = star(&f);
        let mut ck = Checker::new(&g);
        for (t, d) in m.domains.iter().enumerate() {
            for &a in d {
                let w = g.at(t, universe.binary_search(&a).unwrap()).unwrap();
                points += 1;
                if m.eval(t, a, &f) != ck.holds(w, &tr) && mismatches.len() < 3 {
                    mismatches.push(format!("instance {i} ({mode:?}) at ({t}, {a}): {f:?}"));
                }
            }
        }
    }
    let detail = format!("200 instances, {points} points, {} mismatches {}", mismatches.len(), mismatches.join("; "));
    (mismatches.is_empty(), detail.trim_end().to_string())
}

// ---------------------------------------------------------------------------
// 3. fw_finite_reach round trip

fn criterion_3() -> Outcome {
    let cases = [
        ("M_A", corpus::M_A, "h"),
        ("M_D", corpus::M_D, "h"),
        ("M_E", corpus::M_E, "r"),
        ("M_G", corpus::M_G, "h"),
        ("M_B", corpus::M_B, "q0"),
        ("M_A", corpus::M_A, "q1"),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, src, qr) in cases {
        let t0 = Instant::now();
        let m = parse_machine(src).unwrap();
        let qrid = m.state_id(qr).unwrap();
        let spec = WitnessSpec::from_oracle(WitnessKind::FwFin, &m, 0, Some(qrid), 0, 12).unwrap();
        let w = build(&spec).unwrap();
        let enc = compile_machine(&m, &Target::from_name("fw_finite_reach", &m.states[0], Some(qr)).unwrap()).unwrap();
        let rep = verify(&w, &enc, 1);
        let root = w.model.root.expect("witness root");
        let at_root = enc.conjuncts.iter().all(|(_, f)| check(&w.model, root, f));
        let all_hold = rep.lines.iter().all(|l| l.holds);
        let exact = decode_run(&w.model, &enc, &m, WitnessKind::FwFin, None)
            .is_ok_and(|d| d.len() == 1 && d[0].run == spec.runs[0]);
        let dt = t0.elapsed();
        let good = at_root && all_hold && exact && dt < Duration::from_secs(5);
        ok &= good;
        parts.push(format!(
            "{name}->{qr} len {} {}{}",
            spec.runs[0].len(),
            if good { "ok" } else { "FAILED" },
            if good { format!(" {:.0}ms", dt.as_secs_f64() * 1e3) } else { format!(" (root {at_root}, holds {all_hold}, exact {exact}, {dt:?})") }
        ));
    }
    (ok, parts.join(", "))
}

// ---------------------------------------------------------------------------
// 4. search-side soundness and agreement with the oracle

fn criterion_4() -> Outcome {
    // a model within h columns and v rows exists iff a run with at most
    // min(h, v) - 1 steps does
    let bounds = [(4, 5), (4, 3), (3, 5), (2, 4), (1, 3)];
    let mut pairs = 0usize;
    let mut found = 0usize;
    let mut bad = Vec::new();
    for (target, class, kind) in [
        ("fw_finite_reach", FrameClass::Product, WitnessKind::FwFin),
        ("lossy_finite_reach", FrameClass::Expanding, WitnessKind::LossyFin),
    ] {
        for (name, src) in corpus::ALL {
            let m = parse_machine(src).unwrap();
            for qr in m.states.clone() {
                let t = Target::from_name(target, &m.states[0], Some(&qr)).unwrap();
                let enc = compile_machine(&m, &t).unwrap();
                let qrid = m.state_id(&qr).unwrap();
                for (h, v) in bounds {
                    pairs += 1;
                    let depth = h.min(v) - 1;
                    let problem = match kind {
                        WitnessKind::FwFin => Problem::Reachability { start: m.initial(0), target: qrid },
                        _ => Problem::LossyReachability { start: m.initial(0), target: qrid, cap: 8 },
                    };
                    let yes = matches!(bounded_oracle(&m, &problem, depth), Verdict::YesWithinBound { .. });
                    let tag = format!("{target} {name}->{qr} at {h}x{v}");
                    let outcome = match bounded_sat(&enc.formula, &SearchSpec::new(class, h, v)) {
                        Ok(o) => o,
                        Err(e) => {
                            bad.push(format!("{tag}: {e}"));
                            continue;
                        }
                    };
                    match outcome {
                        SearchOutcome::Found(f) => {
                            found += 1;
                            if !yes {
                                bad.push(format!("{tag}: model found, oracle says no at depth {depth}"));
                            }
                            if !check(&f.model, f.world, &enc.formula) {
                                bad.push(format!("{tag}: found model does not satisfy the formula"));
                            }
                            let mut model = f.model.clone();
                            model.root = Some(f.world);
                            let sem = match kind {
                                WitnessKind::FwFin => Semantics::Reliable,
                                _ => Semantics::Lossy { cap: u64::MAX },
                            };
                            match decode_run(&model, &enc, &m, kind, None) {
                                Ok(d) if !d.is_empty() => {
                                    let run = &d[0].run;
                                    let valid = run.validate(&m, sem).is_ok()
                                        && run.configs.first() == Some(&m.initial(0))
                                        && run.configs.last().map(|c| c.state) == Some(qrid);
                                    if !valid {
                                        bad.push(format!("{tag}: decoded {} is not a run to {qr}", run.display(&m)));
                                    }
                                }
                                other => bad.push(format!("{tag}: decode failed: {other:?}")),
                            }
                        }
                        SearchOutcome::Exhausted(_) => {
                            if yes {
                                bad.push(format!("{tag}: no model, oracle says yes at depth {depth}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let ok = bad.is_empty() && pairs >= 20;
    let mut detail = format!("{pairs} (target, machine, state, bound) cases, {found} models found and decoded, {} disagreements", bad.len());
    for b in bad.iter().take(3) {
        detail.push_str(&format!("; {b}"));
    }
    (ok, detail)
}

// ---------------------------------------------------------------------------
// 5. bw_inf on M_B

fn criterion_5() -> Outcome {
    let m = parse_machine(corpus::M_B).unwrap();
    let enc = compile_machine(&m, &Target::from_name("bw_nontermination", "q0", None).unwrap()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 3..=5 {
        let spec = WitnessSpec::from_oracle(WitnessKind::BwInf, &m, 0, None, k, 12).unwrap();
        let w = build(&spec).unwrap();
        let rep = verify(&w, &enc, 1);
        let boundary_only = rep.lines.iter().all(|l| l.holds || l.boundary_only());
        let failing: Vec<&str> = rep.failing().map(|l| l.label.as_str()).collect();
        let claims = verify_backward_claims(&w.model, &enc, k);
        let good = boundary_only && claims.ok() && claims.checks > 0;
        ok &= good;
        parts.push(format!(
            "K={k}: boundary failures [{}], {} claim checks, {} violations",
            failing.join(" "),
            claims.checks,
            claims.violations.len()
        ));
    }
    (ok, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 6. tick trick on dense witnesses

fn criterion_6() -> Outcome {
    let grid = compile_grid(GridVariant::Star);
    let subs: BTreeSet<Formula> = grid.conjuncts.iter().flat_map(|(_, f)| f.subformulas()).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, src) in [("M_B", corpus::M_B), ("M_E", corpus::M_E), ("M_D", corpus::M_D)] {
        let m = parse_machine(src).unwrap();
        for k in 2..=5 {
            let spec = WitnessSpec::from_oracle(WitnessKind::Dense, &m, 0, None, k, 12).unwrap();
            assert_eq!(spec.width, 2);
            let w = build(&spec).unwrap();
            let model = &w.model;
            let layout = model.layout.as_ref().unwrap();
            let ts = derive_tick_structure(model, names::TICK).unwrap();
            let mut ck = Checker::new(model);
            let mut diamond = 0usize;
            for psi in &subs {
                let inner = ck.eval(psi).clone();
                let black = ck.eval(&black_dia0(psi.clone(), names::TICK)).clone();
                for wd in 0..model.len() {
                    let (x, u) = layout.coords[wd];
                    let semantic = ts.rm.successors(x).any(|y| layout.world_at(y, u).is_some_and(|w2| inner.contains(w2)));
                    if semantic != black.contains(wd) {
                        diamond += 1;
                    }
                }
            }
            let mut interval = 0usize;
            for p in [names::N, names::S] {
                for wd in 0..model.len() {
                    if !model.holds_var(p, wd) {
                        continue;
                    }
                    let (x, y) = layout.coords[wd];
                    for x2 in ts.interval(x) {
                        if !layout.world_at(x2, y).is_some_and(|w2| model.holds_var(p, w2)) {
                            interval += 1;
                        }
                    }
                }
            }
            let good = diamond == 0 && interval == 0 && ts.violations().is_empty();
            ok &= good;
            if !good {
                parts.push(format!("{name} K={k}: {diamond} diamond and {interval} interval disagreements, {:?}", ts.violations()));
            }
        }
    }
    let detail = if ok {
        format!("M_B, M_E, M_D at K=2..5, width 2: {} grid* subformulas agree, Interval claim holds for N and S", subs.len())
    } else {
        parts.join("; ")
    };
    (ok, detail)
}

// ---------------------------------------------------------------------------
// 7. lossy recurrence gadget

fn criterion_7() -> Outcome {
    let m = parse_machine(corpus::M_E).unwrap();
    let qr = m.state_id("r").unwrap();
    let spec = WitnessSpec::from_oracle(WitnessKind::LossyExp, &m, 0, Some(qr), 3, 12).unwrap();
    let w = build(&spec).unwrap();
    let enc = compile_machine(&m, &Target::from_name("lossy_omega_reach", "q0", Some("r")).unwrap()).unwrap();
    let rep = verify(&w, &enc, 1);
    let interior: usize = rep.lines.iter().map(|l| l.interior().count()).sum();
    let mut bad = Vec::new();
    let mut sstar = Vec::new();
    match decode_run(&w.model, &enc, &m, WitnessKind::LossyExp, None) {
        Ok(dec) if dec.len() == 3 => {
            for (i, d) in dec.iter().enumerate() {
                let n = i + 1;
                sstar.push(d.sstar);
                if d.run.configs.first() != Some(&m.initial(0)) {
                    bad.push(format!("segment {n} does not start at <q0, 0>"));
                }
                if let Err(e) = d.run.validate(&m, Semantics::Lossy { cap: u64::MAX }) {
                    bad.push(format!("segment {n}: {e}"));
                }
                if d.sstar < n {
                    bad.push(format!("segment {n} has {} S* points", d.sstar));
                }
            }
        }
        other => bad.push(format!("decode: {other:?}")),
    }
    let ok = bad.is_empty() && interior == 0;
    let detail = format!("M_E, 3 runs: S* points per segment {sstar:?}, {interior} interior violations {}", bad.join("; "));
    (ok, detail.trim_end().to_string())
}

// ---------------------------------------------------------------------------
// 8. finite model property closure

fn random_formula(r: &mut ChaCha8Rng, vars: &[&str], depth: usize) -> Formula {
    if depth == 0 || r.gen_ratio(1, 4) {
        return match r.gen_range(0..12) {
            0 => top(),
            1 => bot(),
            k => var(vars[k % vars.len()]),
        };
    }
    let i = r.gen_range(0..2u8);
    match r.gen_range(0..6) {
        0 => not(random_formula(r, vars, depth - 1)),
        1 => and(random_formula(r, vars, depth - 1), random_formula(r, vars, depth - 1)),
        2 => or(random_formula(r, vars, depth - 1), random_formula(r, vars, depth - 1)),
        3 => dia(i, random_formula(r, vars, depth - 1)),
        4 => boxm(i, random_formula(r, vars, depth - 1)),
        _ => implies(random_formula(r, vars, depth - 1), random_formula(r, vars, depth - 1)),
    }
}

fn random_grid_model(r: &mut ChaCha8Rng, vars: &[&str]) -> Model {
    let h = r.gen_range(1..=4);
    let v = r.gen_range(1..=8);
    let g = if r.gen_bool(0.5) {
        product(&make_linear(h), &make_difference(v))
    } else {
        let mut sizes: Vec<usize> = (0..h).map(|_| r.gen_range(1..=v)).collect();
        sizes.sort();
        let domains: Vec<Vec<usize>> = sizes.iter().map(|&k| (0..k).collect()).collect();
        assemble(&make_linear(h), &make_difference(v), &domains, GridTag::Expanding).unwrap()
    };
    let mut m = Model::on_grid(g);
    for p in vars {
        m.declare(p);
        for w in 0..m.len() {
            if r.gen_bool(0.5) {
                m.set(p, w);
            }
        }
    }
    m
}

fn criterion_8() -> Outcome {
    let mut r = rng(8);
    let vars = ["P", "Q", "R"];
    let (mut pairs, mut tries, mut shrunk) = (0usize, 0usize, 0usize);
    let mut bad = Vec::new();
    while pairs < 50 && tries < 10_000 {
        tries += 1;
        let m = random_grid_model(&mut r, &vars);
        let phi = random_formula(&mut r, &vars, 4);
        if phi.modal_depth() == 0 || phi.modal_depth() > 4 {
            continue;
        }
        let Some(root) = satisfiable_in(&m, &phi) else { continue };
        pairs += 1;
        let subs: Vec<Formula> = phi.subformulas().into_iter().collect();
        match shrink(&m, &phi, root) {
            Ok((small, trace)) => {
                if trace.after < trace.before {
                    shrunk += 1;
                }
                for s in &trace.steps {
                    if s.output.len() > s.input.len() + 2 * subs.len() {
                        bad.push(format!("pair {pairs}: instant {} grew to {} from {}", s.instant, s.output.len(), s.input.len()));
                    }
                }
                let (lo, hi) = (m.layout.as_ref().unwrap(), small.layout.as_ref().unwrap());
                let kept: Vec<usize> = hi.vertical.labels.iter().map(|l| lo.vertical.labels.iter().position(|x| x == l).unwrap()).collect();
                let mut before = Checker::new(&m);
                let mut after = Checker::new(&small);
                for psi in &subs {
                    for w2 in 0..small.len() {
                        let (x, y) = hi.coords[w2];
                        let w = lo.world_at(x, kept[y]).unwrap();
                        if before.holds(w, psi) != after.holds(w2, psi) {
                            bad.push(format!("pair {pairs}: {psi} changes at ({x}, {})", kept[y]));
                        }
                    }
                }
                if !small.root.is_some_and(|w| after.holds(w, &phi)) {
                    bad.push(format!("pair {pairs}: root lost {phi}"));
                }
            }
            Err(e) => bad.push(format!("pair {pairs}: {e}")),
        }
    }
    let ok = pairs == 50 && bad.is_empty();
    let mut detail = format!("{pairs} satisfiable pairs ({shrunk} strictly shrunk), {} violations", bad.len());
    for b in bad.iter().take(3) {
        detail.push_str(&format!("; {b}"));
    }
    (ok, detail)
}

// ---------------------------------------------------------------------------
// 9. reductions within bounds

fn sat_within(f: &Formula, class: FrameClass, h: usize, v: usize) -> Option<bool> {
    match bounded_sat(f, &SearchSpec::new(class, h, v)) {
        Ok(SearchOutcome::Found(_)) => Some(true),
        Ok(SearchOutcome::Exhausted(_)) => Some(false),
        Err(_) => None,
    }
}

fn criterion_9() -> Outcome {
    let vars = ["P", "Q"];
    let mut ok = true;
    let mut parts = Vec::new();
    type Reduction = fn(&Formula) -> Formula;
    let cases: [(&str, Reduction, FrameClass, FrameClass); 4] = [
        ("relativize decreasing", |f| relativize(f, DomainKind::Decreasing), FrameClass::Decreasing, FrameClass::Product),
        ("relativize expanding", |f| relativize(f, DomainKind::Expanding), FrameClass::Expanding, FrameClass::Product),
        ("product_to_decreasing", product_to_decreasing, FrameClass::Product, FrameClass::Decreasing),
        ("diff_to_linear", |f| diff_to_linear(f).formula, FrameClass::Expanding, FrameClass::ExpandingLinear),
    ];
    for (i, (name, reduce, src, dst)) in cases.into_iter().enumerate() {
        let mut r = rng(90 + i as u64);
        let (mut sat, mut disagree) = (0usize, Vec::new());
        for j in 0..50 {
            // two conjuncts push roughly half of the samples to unsatisfiable
            let phi = and(random_formula(&mut r, &vars, 3), random_formula(&mut r, &vars, 3));
            let a = sat_within(&phi, src, 3, 3);
            let b = sat_within(&reduce(&phi), dst, 3, 3);
            if a == Some(true) {
                sat += 1;
            }
            if a.is_none() || a != b {
                disagree.push(format!("#{j} {phi}: {a:?} vs {b:?}"));
            }
        }
        ok &= disagree.is_empty();
        parts.push(format!("{name} {} disagreements ({sat}/50 satisfiable){}", disagree.len(), disagree.first().map(|d| format!(" {d}")).unwrap_or_default()));
    }
    (ok, parts.join(", "))
}

// ---------------------------------------------------------------------------
// 10. performance floor

fn criterion_10() -> Outcome {
    let vars = ["A", "B", "C", "D", "E", "F", "G", "H"];
    // needs nine distinct points on a vertical line in every column
    let exclusive = |i: usize| conj((0..8).map(|j| if i == j { var(vars[j]) } else { not(var(vars[j])) }));
    let spread = conj((0..8).map(|i| dia(1, exclusive(i))));
    let crowded = and(boxm(0, spread.clone()), and(spread, dia(0, top())));
    let mut r = rng(10);
    let mut instances: Vec<(String, Formula)> = vec![("crowded".into(), crowded)];
    while instances.len() < 4 {
        let f = conj((0..4).map(|_| random_formula(&mut r, &vars, 4)));
        if f.vars().len() == 8 {
            instances.push((format!("random#{}", instances.len()), f));
        }
    }
    let mut ok = true;
    let mut worst = (Duration::ZERO, String::new());
    let mut runs = 0usize;
    for (h, v) in [(3, 4), (4, 3), (2, 6), (6, 2), (1, 12), (12, 1)] {
        for (name, f) in &instances {
            let mut spec = SearchSpec::new(FrameClass::Product, h, v);
            spec.budget.max_time = Some(Duration::from_secs(120));
            let t0 = Instant::now();
            let done = bounded_sat(f, &spec).is_ok();
            let dt = t0.elapsed();
            runs += 1;
            ok &= done && dt < Duration::from_secs(120);
            if dt >= worst.0 {
                worst = (dt, format!("{name} at {h}x{v}"));
            }
        }
    }
    (ok, format!("{runs} product searches with 8 variables, slowest {} in {:.2}s", worst.1, worst.0.as_secs_f64()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("frame correspondence", criterion_1),
        ("FOLTL grid translation", criterion_2),
        ("finite forward round trip", criterion_3),
        ("search soundness and oracle agreement", criterion_4),
        ("backward omega witness", criterion_5),
        ("tick coherence", criterion_6),
        ("lossy recurrence gadget", criterion_7),
        ("finite model closure", criterion_8),
        ("reductions within bounds", criterion_9),
        ("performance floor", criterion_10),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let t0 = Instant::now();
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {} [{name}]: {} ({detail}) [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
