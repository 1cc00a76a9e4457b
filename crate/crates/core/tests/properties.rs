use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use bimodal::foltl::{self, DomainMode, Foltl, FoltlModel};
use bimodal::formula::*;
use bimodal::frames::*;
use bimodal::machines::*;
use bimodal::reductions::{compile_machine, CompiledEncoding, Target};
use bimodal::semantics::*;

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(var),
        1 => Just(top()),
        1 => Just(bot()),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| implies(a, b)),
            (0..2u8, inner.clone()).prop_map(|(i, a)| dia(i, a)),
            (0..2u8, inner).prop_map(|(i, a)| boxm(i, a)),
        ]
    })
}

fn relation(n: usize) -> impl Strategy<Value = Relation> {
    prop::collection::vec(any::<bool>(), n * n)
        .prop_map(move |bits| Relation::from_pairs(n, (0..n * n).filter(|&k| bits[k]).map(|k| (k / n, k % n))))
}

fn model() -> impl Strategy<Value = Model> {
    (1..=5usize)
        .prop_flat_map(|n| (relation(n), relation(n), prop::collection::vec(0u8..8, n)))
        .prop_map(|(r0, r1, vals)| {
            let mut m = Model::new(TwoFrame::new(r0, r1));
            for (i, p) in ["p", "q", "r"].into_iter().enumerate() {
                m.declare(p);
                for (w, v) in vals.iter().enumerate() {
                    if v >> i & 1 == 1 {
                        m.set(p, w);
                    }
                }
            }
            m
        })
}

/// Truth straight from the clauses, no memoisation.
fn naive(m: &Model, w: usize, f: &Formula) -> bool {
    match f {
        Formula::Var(p) => m.holds_var(p, w),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Neg(a) => !naive(m, w, a),
        Formula::And(a, b) => naive(m, w, a) && naive(m, w, b),
        Formula::Dia0(a) => m.frame.r0.successors(w).any(|u| naive(m, u, a)),
        Formula::Dia1(a) => m.frame.r1.successors(w).any(|u| naive(m, u, a)),
    }
}

fn machine() -> impl Strategy<Value = Machine> {
    let op = prop_oneof![(0..2usize).prop_map(Op::Inc), (0..2usize).prop_map(Op::Dec), (0..2usize).prop_map(Op::Zero)];
    (2..=3usize)
        .prop_flat_map(move |n| (Just(n), prop::collection::vec(prop::collection::vec((op.clone(), 0..n), 1..3), n)))
        .prop_map(|(n, instrs)| {
            let states: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
            let mut src = format!("counters: 2\nstates: {}\nhalt:\n", states.join(" "));
            let flat = instrs.into_iter().enumerate().flat_map(|(q, v)| v.into_iter().map(move |(op, q2)| (q, op, q2)));
            for (q, op, q2) in flat {
                let op = match op {
                    Op::Inc(i) => format!("inc {i}"),
                    Op::Dec(i) => format!("dec {i}"),
                    Op::Zero(i) => format!("zero {i}"),
                };
                src.push_str(&format!("{}: {op} -> {}\n", states[q], states[q2]));
            }
            parse_machine(&src).unwrap()
        })
}

fn config(n: usize) -> impl Strategy<Value = Config> {
    (0..n, 0..4u64, 0..4u64).prop_map(|(q, a, b)| Config::new(q, vec![a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(f in formula()) {
        prop_assert_eq!(parse(&print(&f)).unwrap(), f.clone());
        prop_assert_eq!(parse(&print_raw(&f)).unwrap(), f);
    }

    #[test]
    fn subformulas_are_closed(f in formula()) {
        let subs = f.subformulas();
        prop_assert!(subs.contains(&f));
        for g in &subs {
            prop_assert!(g.subformulas().is_subset(&subs));
        }
        prop_assert!(subs.len() <= f.size());
    }

    #[test]
    fn checker_matches_the_clauses(m in model(), f in formula()) {
        let mut ck = Checker::new(&m);
        for w in 0..m.len() {
            prop_assert_eq!(ck.holds(w, &f), naive(&m, w, &f));
        }
    }

    #[test]
    fn model_text_round_trip(m in model()) {
        let back = parse_model(&print_model(&m)).unwrap();
        prop_assert_eq!(print_model(&back), print_model(&m));
        prop_assert_eq!(back.len(), m.len());
    }

    #[test]
    fn lossy_step_matches_brute_force(m in machine(), a in config(3), b in config(3)) {
        prop_assume!(a.state < m.states.len() && b.state < m.states.len());
        // some a1 <= a steps reliably to some a2 >= b
        let mut brute = false;
        for x in 0..=a.counters[0] {
            for y in 0..=a.counters[1] {
                let a1 = Config::new(a.state, vec![x, y]);
                brute |= m
                    .successors(&a1)
                    .iter()
                    .any(|(_, c)| c.state == b.state && c.counters.iter().zip(&b.counters).all(|(u, v)| u >= v));
            }
        }
        prop_assert_eq!(m.lossy_step(&a, &b).is_some(), brute);
    }

    #[test]
    fn reliable_runs_are_lossy_runs(m in machine(), depth in 1..6usize) {
        let lossy = Semantics::Lossy { cap: u64::MAX };
        for run in m.bounded_runs(m.initial(0), depth, Semantics::Reliable).take(50) {
            prop_assert!(run.validate(&m, Semantics::Reliable).is_ok());
            prop_assert!(run.validate(&m, lossy).is_ok());
        }
    }

    #[test]
    fn reliable_reachability_implies_lossy(m in machine(), target in 0..3usize, depth in 0..6usize) {
        prop_assume!(target < m.states.len());
        let reliable = bounded_oracle(&m, &Problem::Reachability { start: m.initial(0), target }, depth);
        let lossy = bounded_oracle(&m, &Problem::LossyReachability { start: m.initial(0), target, cap: 8 }, depth);
        if reliable.is_yes() {
            prop_assert!(lossy.is_yes());
        }
        if let Verdict::YesWithinBound { run, .. } = lossy {
            let sem = Semantics::Lossy { cap: 8 };
            prop_assert!(run.validate(&m, sem).is_ok());
            prop_assert_eq!(run.configs.last().unwrap().state, target);
        }
    }

    #[test]
    fn prefill_starts_from_the_target(m in machine(), c in config(3), depth in 1..4usize) {
        prop_assume!(c.state < m.states.len());
        let (pm, start) = m.prefill(&c);
        let fill = (c.counters[0] + c.counters[1]) as usize;
        let direct: BTreeSet<Vec<Config>> =
            m.bounded_runs(c.clone(), depth, Semantics::Reliable).map(|r| r.configs).collect();
        let through: BTreeSet<Vec<Config>> = pm
            .bounded_runs(pm.initial(start), fill + depth, Semantics::Reliable)
            .filter(|r| r.len() > fill)
            .map(|r| r.configs[fill..].to_vec())
            .collect();
        prop_assert_eq!(through, direct);
    }

    #[test]
    fn encoding_text_round_trip(m in machine(), target in prop::sample::select(Target::NAMES.to_vec())) {
        let qr = m.states.last().unwrap().clone();
        let t = Target::from_name(target, &m.states[0], Some(&qr)).unwrap();
        let enc = compile_machine(&m, &t).unwrap();
        prop_assert_eq!(CompiledEncoding::from_text(&enc.to_text()).unwrap(), enc);
    }

    #[test]
    fn foltl_grid_round_trip(
        instants in 1..4usize,
        sizes in prop::collection::vec(1..4usize, 3),
        bits in prop::collection::vec(any::<bool>(), 9),
    ) {
        let mut sizes = sizes[..instants].to_vec();
        sizes.sort();
        let domains: Vec<BTreeSet<usize>> = sizes.iter().map(|&k| (0..k).collect()).collect();
        let mut preds = BTreeMap::new();
        let set: BTreeSet<(usize, usize)> = domains
            .iter()
            .enumerate()
            .flat_map(|(t, d)| d.iter().map(move |&a| (t, a)))
            .filter(|&(t, a)| bits[3 * t + a])
            .collect();
        preds.insert("P".to_string(), set);
        let fm = FoltlModel::new(DomainMode::Expanding, domains, preds).unwrap();
        prop_assert_eq!(foltl::undagger(&foltl::dagger(&fm)).unwrap(), fm);
    }

    #[test]
    fn star_unstar(f in formula()) {
        let g: Foltl = foltl::unstar(&f);
        prop_assert_eq!(foltl::star(&g), f);
    }
}
