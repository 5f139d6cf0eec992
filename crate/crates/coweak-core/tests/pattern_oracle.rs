//! Word-membership of the built-in patterns against an independent
//! regular-expression oracle, over all words of length ≤ 4 on a three
//! letter alphabet.

use coweak_core::pattern::PatternAutomaton;
use regex::Regex;

fn labels() -> Vec<String> {
    vec!["a".into(), "b".into(), "tau".into()]
}

fn to_chars(word: &[&str]) -> String {
    word.iter()
        .map(|l| match *l {
            "a" => 'a',
            "b" => 'b',
            "tau" => 't',
            _ => unreachable!(),
        })
        .collect()
}

fn words_up_to(len: usize) -> Vec<Vec<&'static str>> {
    let alphabet = ["a", "b", "tau"];
    let mut out: Vec<Vec<&'static str>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<&'static str>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &frontier {
            for l in alphabet {
                let mut w2 = w.clone();
                w2.push(l);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn check_against(pattern: &PatternAutomaton, oracles: &[(&str, Option<Regex>)]) {
    for (state_name, regex) in oracles {
        let b = pattern
            .state_index(state_name)
            .unwrap_or_else(|| panic!("state {state_name} missing"));
        for word in words_up_to(4) {
            let automaton_says = pattern.member_word(b, &word).unwrap();
            let oracle_says = match regex {
                Some(r) => r.is_match(&to_chars(&word)),
                None => false,
            };
            assert_eq!(
                automaton_says, oracle_says,
                "pattern state {state_name}, word {word:?}"
            );
        }
    }
}

#[test]
fn strong_pattern_matches_singleton_regexes() {
    let p = PatternAutomaton::strong(&labels()).unwrap();
    check_against(
        &p,
        &[
            ("s_a", Some(Regex::new("^a$").unwrap())),
            ("s_b", Some(Regex::new("^b$").unwrap())),
            ("s_tau", Some(Regex::new("^t$").unwrap())),
            ("eps", Some(Regex::new("^$").unwrap())),
            ("empty", None),
        ],
    );
}

#[test]
fn weak_pattern_matches_weak_regexes() {
    let p = PatternAutomaton::weak(&labels(), "tau").unwrap();
    check_against(
        &p,
        &[
            ("w_tau", Some(Regex::new("^t*$").unwrap())),
            ("w_a", Some(Regex::new("^t*at*$").unwrap())),
            ("w_b", Some(Regex::new("^t*bt*$").unwrap())),
            ("empty", None),
        ],
    );
}

#[test]
fn delay_pattern_matches_delay_regexes() {
    let p = PatternAutomaton::delay(&labels(), "tau").unwrap();
    check_against(
        &p,
        &[
            ("d_tau", Some(Regex::new("^t*$").unwrap())),
            ("d_a", Some(Regex::new("^t*a$").unwrap())),
            ("d_b", Some(Regex::new("^t*b$").unwrap())),
            ("eps", Some(Regex::new("^$").unwrap())),
            ("empty", None),
        ],
    );
}

#[test]
fn derivative_closure_stays_inside() {
    for p in [
        PatternAutomaton::strong(&labels()).unwrap(),
        PatternAutomaton::weak(&labels(), "tau").unwrap(),
        PatternAutomaton::delay(&labels(), "tau").unwrap(),
    ] {
        let reachable = p.reachable_from_observables();
        for &b in &reachable {
            for a in 0..labels().len() {
                assert!(reachable.contains(&p.derivative(b, a)));
            }
        }
    }
}
