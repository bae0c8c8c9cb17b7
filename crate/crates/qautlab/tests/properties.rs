use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qautlab::machines::random::{random_isometry, random_pfa, random_qfa};
use qautlab::machines::{compose_operator, validate, Alphabet, MachineSpec};
use qautlab::numerics::{is_superoperator, tensor, vec_map, CMatrix, C64};
use qautlab::semantics::{kwqfa_halt_trace, kwqfa_run, restart_accept, restart_round, Evaluator, RunOptions};
use qautlab::textio::{parse_machine, serialize_machine, REQUIRED_KEYS};
use qautlab::zoo::{self, sample_machines, LanguageId};
use qautlab::Tolerance;

fn ab() -> Alphabet {
    Alphabet::from_chars("ab").unwrap()
}

fn square(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| CMatrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1)))
}

fn triple() -> impl Strategy<Value = (CMatrix, CMatrix, CMatrix)> {
    (1usize..=4).prop_flat_map(|n| (square(n), square(n), square(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vec_of_product((a, b, c) in triple()) {
        let lhs = vec_map(&(&a * &b * &c)).unwrap();
        let rhs = tensor(&a, &c.transpose()) * vec_map(&b).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9);
        let tr = (a.transpose() * &b).trace();
        let dot = vec_map(&a).unwrap().transpose() * vec_map(&b).unwrap();
        prop_assert!((tr - dot[(0, 0)]).norm() <= 1e-9);
    }

    #[test]
    fn tensor_is_associative((a, b, c) in triple()) {
        // entries are the same triple products, grouped differently
        prop_assert!((tensor(&tensor(&a, &b), &c) - tensor(&a, &tensor(&b, &c))).norm() <= 1e-12);
    }

    #[test]
    fn single_element_superoperator_iff_unitary(seed in any::<u64>(), n in 1usize..=4, scale in 0.5f64..1.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_isometry(n, n, &mut rng);
        prop_assert!(is_superoperator(&[u.clone()], Tolerance::default()).unwrap());
        let v = u * C64::new(scale, 0.0);
        let unitary = (scale - 1.0).abs() < 1e-12;
        prop_assert_eq!(is_superoperator(&[v], Tolerance::default()).unwrap(), unitary);
    }

    #[test]
    fn composed_operators_are_superoperators(seed in any::<u64>(), n in 1usize..=3, w in prop::collection::vec(0usize..4, 0..4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_qfa(&ab(), n, 2, &mut rng);
        let elems = compose_operator(&q.ops, &w).unwrap();
        prop_assert!(is_superoperator(&elems, Tolerance::default()).unwrap());
    }

    #[test]
    fn validate_is_idempotent(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = random_pfa(&ab(), n, &mut rng);
        p.ops.ops[1][0][(0, 0)] += C64::new(0.25, 0.0);
        let spec = MachineSpec::Pfa(p);
        let before = spec.clone();
        let first = validate(&spec, Tolerance::default());
        prop_assert!(!first.is_ok());
        prop_assert_eq!(&validate(&spec, Tolerance::default()), &first);
        prop_assert_eq!(spec, before);
    }

    #[test]
    fn random_machines_conserve_probability(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specs = [MachineSpec::Pfa(random_pfa(&ab(), n, &mut rng)), MachineSpec::Qfa(random_qfa(&ab(), n, 2, &mut rng))];
        for spec in &specs {
            let ev = Evaluator::new(spec, RunOptions::default());
            for w in ab().words_up_to(5) {
                let r = ev.run(&w).unwrap();
                prop_assert!((r.p_accept + r.p_reject + r.residual - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn random_machines_round_trip(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for spec in [MachineSpec::Pfa(random_pfa(&ab(), n, &mut rng)), MachineSpec::Qfa(random_qfa(&ab(), n, 2, &mut rng))] {
            let back = parse_machine(&serialize_machine(&spec)).unwrap();
            prop_assert_eq!(back, spec);
        }
    }

    #[test]
    fn equal_halting_masses_give_half(p in 1e-6f64..=0.5) {
        prop_assert!((restart_accept(p, p).unwrap() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn zoo_machines_conserve_probability() {
    for z in sample_machines().unwrap() {
        let ev = Evaluator::new(&z.machine, RunOptions::default());
        let alphabet = z.machine.alphabet().clone();
        let len = match alphabet.len() {
            1 | 2 => 8,
            3 => 6,
            _ => 4,
        };
        for w in alphabet.words_up_to(len) {
            let r = ev.run(&w).unwrap();
            let total = r.p_accept + r.p_reject + r.residual;
            assert!((total - 1.0).abs() <= 1e-9, "{} on {}: {total}", z.name, alphabet.render(&w));
        }
    }
}

#[test]
fn dropping_a_required_key_is_reported() {
    for z in sample_machines().unwrap() {
        let text = serialize_machine(&z.machine);
        let kind = z.machine.kind_name();
        let (_, keys) = REQUIRED_KEYS.iter().find(|(k, _)| *k == kind).unwrap();
        for key in keys.iter().filter(|k| **k != "kind") {
            let mutated: String = text
                .lines()
                .filter(|l| l.split('=').next().map(str::trim) != Some(*key))
                .map(|l| format!("{l}\n"))
                .collect();
            let err = parse_machine(&mutated).expect_err(key);
            assert!(err.message.contains(key), "{}: {key}: {}", z.name, err.message);
        }
    }
}

/// Words outside (aa*b)(aa*b)(aa*b)*.
fn off_shape(w: &[usize]) -> bool {
    let mut blocks = 0;
    let mut run = 0;
    for &s in w {
        if s == 0 {
            run += 1;
        } else if run == 0 {
            return true;
        } else {
            blocks += 1;
            run = 0;
        }
    }
    run != 0 || blocks < 2
}

#[test]
fn lnh_machine_sits_at_half_off_shape() {
    let z = zoo::lnh_kwqfa1().unwrap();
    let MachineSpec::Kwqfa(k) = &z.machine else { panic!() };
    for w in ab().words_up_to(10) {
        let r = kwqfa_run(k, &w, None).unwrap();
        assert_eq!(r.residual, 0.0, "one-way run hit the step cap");
        if off_shape(&w) {
            assert!((r.p_accept - 0.5).abs() <= 1e-9, "{w:?}");
        }
    }
}

#[test]
fn lnh_members_cancel_exactly() {
    // on a^x b a^x b the two paths meet in r1 with opposite signs, so R17 receives nothing
    let z = zoo::lnh_kwqfa1().unwrap();
    let MachineSpec::Kwqfa(k) = &z.machine else { panic!() };
    let (a17, r17) = (k.roster.idx("A17").unwrap(), k.roster.idx("R17").unwrap());
    for x in 1..=5 {
        let block: Vec<usize> = std::iter::repeat(0).take(x).chain([1]).collect();
        let w = [block.clone(), block].concat();
        let tr = kwqfa_halt_trace(k, &w).unwrap();
        assert!(tr.iter().any(|t| t.state == a17 && t.net.norm() > 1e-3));
        assert!(tr.iter().filter(|t| t.state == r17).all(|t| t.net.norm() <= 1e-12));
    }
}

#[test]
fn leq_round_closed_forms() {
    for eps in [0.1, 0.3] {
        let z = zoo::leq_pfa_restart(eps).unwrap();
        let MachineSpec::Restart(r) = &z.machine else { panic!() };
        let x = eps * eps / 2.0;
        for m in 0..=6 {
            for n in 0..=6 {
                let w: Vec<usize> = std::iter::repeat(0).take(m).chain(std::iter::repeat(1).take(n)).collect();
                let s = restart_round(r, &w).unwrap();
                let pa = x.powi((m + n) as i32) / 3.0;
                let pr = eps / 6.0 * (x.powi(2 * m as i32) + x.powi(2 * n as i32));
                assert!((s.p_a - pa).abs() <= 1e-12 && (s.p_a - pa).abs() <= 1e-9 * pa, "m={m} n={n}");
                assert!((s.p_r - pr).abs() <= 1e-12, "m={m} n={n}");
            }
        }
    }
}
