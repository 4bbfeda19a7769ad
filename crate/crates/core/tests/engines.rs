mod common;

use common::*;
use kanren::machine::{answers, trace_events, Search};
use kanren::reify::reify;
use kanren::{initial_state, parse_spec, CutSignal, Interleaving, Label, Rule, Sld, Spec, State, Term};

fn spec(text: &str) -> Spec {
    parse_spec(text).unwrap()
}

fn run(search: &dyn Search, spec: &Spec, max_answers: usize, max_steps: usize) -> (Vec<String>, bool) {
    let (start, vars) = initial_state(spec);
    let found = answers(search, start, max_answers, max_steps);
    (found.answers.iter().map(|(s, _)| reify(s, &vars).to_string()).collect(), found.exhausted)
}

#[test]
fn appendo_forward_is_concatenation() {
    let elems = [Term::atom("A"), Term::atom("B")];
    let lists = lists_up_to(&elems, 2);
    for x in &lists {
        for y in &lists {
            let s = spec(&format!("{APPENDO}? appendo ({x}) ({y}) q"));
            let concat = list(&[as_list(x).unwrap(), as_list(y).unwrap()].concat());
            for engine in [&Interleaving::new(&s) as &dyn Search, &Sld::new(&s)] {
                let (got, done) = run(engine, &s, 10, 10_000);
                assert!(done);
                assert_eq!(got, [format!("q = {concat}")]);
            }
        }
    }
}

#[test]
fn appendo_backward_enumerates_every_split() {
    let elems = [Term::atom("A"), Term::atom("B")];
    for z in lists_up_to(&elems, 3) {
        let zs = as_list(&z).unwrap();
        let s = spec(&format!("{APPENDO}? appendo x y ({z})"));
        let mut expected: Vec<String> = (0..=zs.len())
            .map(|k| format!("x = {}, y = {}", list(&zs[..k]), list(&zs[k..])))
            .collect();
        expected.sort();
        for engine in [&Interleaving::new(&s) as &dyn Search, &Sld::new(&s)] {
            let (mut got, done) = run(engine, &s, 100, 100_000);
            assert!(done);
            got.sort();
            assert_eq!(got, expected, "{z}");
        }
    }
}

#[test]
fn sld_keeps_left_to_right_order() {
    let s = spec("? x === A \\/ (x === B \\/ x === C)");
    assert_eq!(run(&Sld::new(&s), &s, 10, 100).0, ["x = A", "x = B", "x = C"]);
    let s = spec("? (x === A \\/ x === B) /\\ (y === C \\/ y === D)");
    let (got, _) = run(&Sld::new(&s), &s, 10, 100);
    assert_eq!(got, ["x = A, y = C", "x = A, y = D", "x = B, y = C", "x = B, y = D"]);
}

#[test]
fn interleaving_alternates_between_disjuncts() {
    let s = spec("n x = x === Z \\/ (fresh y . x === S(y) /\\ n y);\n? n q \\/ q === A");
    let (got, _) = run(&Interleaving::new(&s), &s, 3, 10_000);
    assert!(got.contains(&"q = A".to_string()), "{got:?}");
}

#[test]
fn literal_ast_swap_changes_order_only() {
    let s = spec("? (x === A \\/ x === B) /\\ (y === C \\/ (y === D \\/ y === E))");
    let (plain, _) = run(&Sld::new(&s), &s, 20, 1000);
    let (swapped, _) = run(&Sld::new(&s).with_literal_ast_swap(true), &s, 20, 1000);
    let mut a = plain.clone();
    let mut b = swapped.clone();
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert_eq!(plain.len(), 6);
}

#[test]
fn cut_commits_to_first_clause() {
    let s = spec("#sld\nfirst x = x === A /\\ ! \\/ x === B;\n? first q");
    assert_eq!(run(&Sld::new(&s), &s, 10, 100).0, ["q = A"]);
    let s = spec("#sld\nfirst x = x === A /\\ ! \\/ x === B;\n? first B");
    // The first clause fails before reaching the cut.
    assert_eq!(run(&Sld::new(&s), &s, 10, 100).0, [String::new()]);
}

#[test]
fn cut_signal_at_the_root_keeps_the_residual_state() {
    let s = spec("#sld\n? ! /\\ x === A");
    assert_eq!(run(&Sld::new(&s), &s, 10, 100).0, ["x = A"]);
}

#[test]
fn cut_rules_are_named() {
    let s = spec("#sld\n? (x === A /\\ !) \\/ x === B");
    let (start, _) = initial_state(&s);
    let events = trace_events(&Sld::new(&s), start, 100);
    let cut = events.iter().find(|e| e.axiom == Rule::Cut).expect("cut leaf fires");
    assert!(matches!(cut.label, Label::Answer(..)));
    assert_eq!(cut.rule, Rule::SumStopAnsC);
    assert_eq!(cut.signal, CutSignal::NoCut);
    assert!(events.iter().all(|e| e.rule != Rule::SumStop));
}

#[test]
fn both_engines_agree_on_finite_answer_sets() {
    let mut compared = 0;
    for seed in 0..300 {
        let mut g = Gen::new(seed);
        let sig = g.signature();
        let s = g.spec(&sig, 4, false);
        let (start, vars) = initial_state(&s);
        let Some(a) = finite_answers(&Interleaving::new(&s), start.clone(), 5_000) else { continue };
        let Some(b) = finite_answers(&Sld::new(&s), start, 5_000) else { continue };
        assert_eq!(reified_set(&a, &vars), reified_set(&b, &vars), "seed {seed}\n{s}");
        compared += 1;
    }
    assert!(compared > 100);
}

#[test]
fn trace_rule_names() {
    let s = spec("? x === A \\/ x === B");
    let (start, _) = initial_state(&s);
    let events = trace_events(&Interleaving::new(&s), start, 10);
    assert_eq!(events[0].rule, Rule::Disj);
    assert!(matches!(events[1].rule, Rule::SumStepAns | Rule::SumStopAns | Rule::SumStep | Rule::SumStop));
    assert_eq!(events.len(), 3);
}

#[test]
fn sum_with_empty_operand_behaves_like_the_other() {
    let s = spec("? x === A");
    let (leaf, vars) = initial_state(&s);
    let failing = State::leaf(kanren::Goal::Fail, kanren::Subst::empty(), 1);
    for st in [State::sum(failing.clone(), leaf.clone()), State::sum(leaf.clone(), failing)] {
        let found = answers(&Interleaving::new(&s), st, 10, 100);
        let got: Vec<String> = found.answers.iter().map(|(s, _)| reify(s, &vars).to_string()).collect();
        assert_eq!(got, ["x = A"]);
    }
}

fn lockstep(search: &dyn Search, start: State, steps: usize, g: &mut Gen) {
    let mut cur = start;
    let mut kept = Vec::new();
    for i in 0..steps {
        if g.chance(0.05) {
            kept.push(cur.clone());
        }
        let copy = cur.clone();
        let expected = search.step(&copy);
        drop(copy);
        let got = search.advance(cur);
        assert_eq!(got, expected, "step {i}");
        match got.next {
            kanren::ExtState::Stop => break,
            kanren::ExtState::Running(s) => cur = s,
        }
    }
    // Copies taken along the way were not disturbed.
    for s in kept {
        let expected = search.step(&s);
        assert_eq!(search.advance(s), expected);
    }
}

#[test]
fn in_place_steps_match_the_transition_function() {
    for seed in 0..300u64 {
        let mut g = Gen::new(60_000 + seed);
        let sig = g.signature();
        let sld = seed % 2 == 0;
        let s = g.spec(&sig, 4, sld);
        let (_, vars) = initial_state(&s);
        let start = g.state(&s, &sig, vars.len() as u32, 2, sld);
        if sld {
            lockstep(&Sld::new(&s), start.clone(), 2_000, &mut g);
            lockstep(&Sld::new(&s).with_literal_ast_swap(true), start, 2_000, &mut g);
        } else {
            lockstep(&Interleaving::new(&s), start, 2_000, &mut g);
        }
    }
}
