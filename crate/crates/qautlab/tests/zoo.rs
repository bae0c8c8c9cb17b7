use qautlab::machines::validate;
use qautlab::semantics::{Evaluator, RunOptions};
use qautlab::textio::{parse_machine, serialize_machine};
use qautlab::zoo::{sample_machines, ZooMachine};
use qautlab::Tolerance;

fn max_len(z: &ZooMachine) -> usize {
    match z.machine.alphabet().len() {
        1 => 12,
        2 => 10,
        3 => 8,
        _ => 5,
    }
}

#[test]
fn every_machine_validates() {
    for z in sample_machines().unwrap() {
        let rep = validate(&z.machine, Tolerance::default());
        assert!(rep.is_ok(), "{}: {:?}", z.name, &rep.violations[..rep.violations.len().min(5)]);
    }
}

#[test]
fn certified_bounds_hold() {
    for z in sample_machines().unwrap() {
        let ev = Evaluator::new(&z.machine, RunOptions::default());
        let alphabet = z.machine.alphabet().clone();
        let mut bad = Vec::new();
        for w in alphabet.words_up_to(max_len(&z)) {
            let p = ev.run(&w).unwrap_or_else(|e| panic!("{} on {}: {e}", z.name, alphabet.render(&w))).p_accept;
            let member = z.language.member(&w).unwrap();
            if !z.certified.holds(member, p, 1e-9) {
                bad.push(format!("{} member={member} p={p}", alphabet.render(&w)));
            }
        }
        assert!(bad.is_empty(), "{}: {} failures, first {:?}", z.name, bad.len(), &bad[..bad.len().min(5)]);
    }
}

#[test]
fn machines_round_trip() {
    for z in sample_machines().unwrap() {
        let text = serialize_machine(&z.machine);
        let back = parse_machine(&text).unwrap_or_else(|e| panic!("{}: {e}", z.name));
        assert_eq!(back, z.machine, "{}", z.name);
    }
}
