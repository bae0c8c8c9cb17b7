use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qautlab::constructions::*;
use qautlab::machines::random::{random_pfa, random_qfa};
use qautlab::machines::{
    validate, Alphabet, CounterSpec, MachineSpec, OpTable, PfaSpec, PostInner, PostSpec, RestartInner, RestartSpec,
    Role, Roster, WomVariant,
};
use qautlab::numerics::{CMatrix, C64};
use qautlab::semantics::*;
use qautlab::zoo::{self, LanguageId};
use qautlab::Tolerance;

fn ab() -> Alphabet {
    Alphabet::from_chars("ab").unwrap()
}

fn valid(spec: &MachineSpec) {
    let rep = validate(spec, Tolerance::default());
    assert!(rep.is_ok(), "{:?}", &rep.violations[..rep.violations.len().min(5)]);
}

fn real(rows: &[&[f64]]) -> CMatrix {
    CMatrix::from_fn(rows.len(), rows[0].len(), |i, j| C64::new(rows[i][j], 0.0))
}

/// Deterministic PFA accepting words with an even number of a's.
fn parity_pfa() -> PfaSpec {
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let flip = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let mut roster = Roster::new(["even", "odd"], 0);
    roster.roles[0] = Role::Accept;
    PfaSpec { alphabet: ab(), roster, ops: OpTable::single(vec![id.clone(), flip, id.clone(), id]) }
}

fn pfa_f(p: &PfaSpec, w: &[usize]) -> f64 {
    pfa_accept(p, w).unwrap()
}

fn restart_f(r: &RestartSpec, w: &[usize]) -> f64 {
    restart_run(r, w, RunOptions::default()).unwrap().p_accept
}

fn inner_pfa(z: &zoo::ZooMachine) -> RestartSpec {
    match &z.machine {
        MachineSpec::Restart(r) => r.clone(),
        _ => panic!("not a restart machine"),
    }
}

fn counter(z: &zoo::ZooMachine) -> CounterSpec {
    match &z.machine {
        MachineSpec::Counter(c) => c.clone(),
        _ => panic!("not a counter machine"),
    }
}

#[test]
fn pfa_to_kwqfa_on_parity() {
    let p = parity_pfa();
    let k = pfa_to_kwqfa(&p).unwrap();
    assert_eq!(k.roster.len(), 3 * 2 + 6);
    valid(&MachineSpec::Kwqfa(k.clone()));
    for w in ab().words_up_to(8) {
        let f = pfa_f(&p, &w);
        let m = kwqfa_margin(&k, &w).unwrap();
        assert_eq!(m > 0.0, f > 0.5, "{w:?}");
    }
}

#[test]
fn pfa_to_kwqfa_top_entries() {
    // the last measurement sees (1/l)^{|w̃|}·(f, 1−f) on the accept/reject pair
    let p = parity_pfa();
    let k = pfa_to_kwqfa(&p).unwrap();
    let l = (2 * 4 + 1) as f64;
    for w in [vec![], vec![0], vec![1, 0, 0]] {
        let f = pfa_f(&p, &w);
        let tr = kwqfa_halt_trace(&k, &w).unwrap();
        let last = tr.iter().map(|t| t.step).max().unwrap();
        let scale = l.powi(-(w.len() as i32 + 2));
        for t in tr.iter().filter(|t| t.step == last && t.state < 4) {
            let want = if t.state == 2 { f } else { 1.0 - f };
            assert!((t.net.re - scale * want).abs() < 1e-15, "{w:?}");
        }
    }
}

#[test]
fn random_pfa_verdicts_survive_kwqfa_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let n = 1 + (rand::Rng::gen_range(&mut rng, 0..4));
        let p = random_pfa(&ab(), n, &mut rng);
        let k = pfa_to_kwqfa(&p).unwrap();
        assert_eq!(k.roster.len(), 3 * n + 6);
        valid(&MachineSpec::Kwqfa(k.clone()));
        for w in ab().words_up_to(5) {
            let f = pfa_f(&p, &w);
            let m = kwqfa_margin(&k, &w).unwrap();
            if (f - 0.5).abs() > 1e-9 {
                assert_eq!(m > 0.0, f > 0.5);
            }
        }
    }
}

#[test]
fn exclusive_cutpoint_embedding() {
    let p = parity_pfa();
    let nq = exclusive_pfa_to_nqfa(&p).unwrap();
    valid(&MachineSpec::Kwqfa(nq.clone()));
    for w in ab().words_up_to(6) {
        assert!(kwqfa_run(&nq, &w, None).unwrap().p_accept > 0.0);
    }
    let coin = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let mut roster = Roster::new(["h", "t"], 0);
    roster.roles[0] = Role::Accept;
    let fair = PfaSpec { alphabet: ab(), roster, ops: OpTable::single(vec![coin, id.clone(), id.clone(), id]) };
    let nq = exclusive_pfa_to_nqfa(&fair).unwrap();
    for w in ab().words_up_to(4) {
        assert!(kwqfa_run(&nq, &w, None).unwrap().p_accept < 1e-30);
    }
}

#[test]
fn linearization_matches_density_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 1..=3 {
        let q = random_qfa(&ab(), n, 2, &mut rng);
        let g = qfa_to_gfa(&q).unwrap();
        assert_eq!(g.names.len(), 2 * n * n);
        for w in ab().words_up_to(6) {
            assert!((qfa_accept(&q, &w).unwrap() - gfa_value(&g, &w).unwrap()).abs() < 1e-9);
        }
    }
}

#[test]
fn hadamard_qfa_linearized() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let had = real(&[&[h, h], &[h, -h]]);
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let mut roster = Roster::new(["q0", "q1"], 0);
    roster.roles[0] = Role::Accept;
    let q = qautlab::machines::QfaSpec {
        alphabet: Alphabet::from_chars("a").unwrap(),
        roster,
        ops: OpTable::single(vec![id.clone(), had, id]),
    };
    let g = qfa_to_gfa(&q).unwrap();
    assert!((qfa_accept(&q, &[0]).unwrap() - 0.5).abs() < 1e-12);
    assert!((gfa_value(&g, &[0]).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn squared_error_formula() {
    assert!((squared_error_bound(0.3) - 0.09 / 0.58).abs() < 1e-15);
    assert_eq!(squared_error_bound(0.0), 0.0);
}

#[test]
fn pfa_restart_becomes_quantum_restart() {
    let eps = 0.3;
    let r = inner_pfa(&zoo::leq_pfa_restart(eps).unwrap());
    let n = r.roster().len();
    let q = pfa_restart_to_qfa_restart(&r).unwrap();
    assert_eq!(q.roster().len(), 2 * n + 4);
    valid(&MachineSpec::Restart(q.clone()));
    let bound = squared_error_bound(eps);
    for w in ab().words_up_to(6) {
        let f = restart_f(&q, &w);
        if LanguageId::Leq.member(&w).unwrap() {
            assert!(1.0 - f <= bound + 1e-9, "{w:?}: {f}");
        } else {
            assert!(f <= bound + 1e-9, "{w:?}: {f}");
        }
    }
}

#[test]
fn general_restart_linearized() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..4 {
        let mut q = random_qfa(&ab(), 3, 2, &mut rng);
        q.roster.roles = vec![Role::Restart, Role::Accept, Role::Reject];
        let g = RestartSpec::new(RestartInner::Qfa(q));
        let k = gqfa_restart_to_kwqfa_restart(&g).unwrap();
        valid(&MachineSpec::Restart(k.clone()));
        for w in ab().words_up_to(4) {
            let (a, b) = (restart_f(&g, &w), restart_f(&k, &w));
            if (a - 0.5).abs() > 1e-6 {
                assert_eq!(a > 0.5, b > 0.5, "{w:?}: {a} vs {b}");
            }
        }
    }
}

/// Three-state restart PFA that accepts w.p. 0.6 and rejects w.p. 0.4 on ¢.
fn coin_restart() -> RestartSpec {
    let a = Alphabet::from_chars("a").unwrap();
    let cent = real(&[&[0.0, 0.0, 0.0], &[0.6, 1.0, 0.0], &[0.4, 0.0, 1.0]]);
    let id = real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    let mut roster = Roster::new(["s", "A", "R"], 0);
    roster.roles[1] = Role::Accept;
    roster.roles[2] = Role::Reject;
    RestartSpec::new(RestartInner::Pfa(PfaSpec { alphabet: a, roster, ops: OpTable::single(vec![cent, id.clone(), id]) }))
}

#[test]
fn reset_majority_grid() {
    let r = coin_restart();
    assert_eq!(restart_to_reset_majority(&r, 0).unwrap(), r);
    let g = restart_to_reset_majority(&r, 1).unwrap();
    assert_eq!(g.roster().len(), 4 * 3);
    valid(&MachineSpec::Restart(g.clone()));
    assert!((restart_f(&g, &[0]) - 0.648).abs() < 1e-12);
    let g2 = restart_to_reset_majority(&r, 2).unwrap();
    assert!(restart_f(&g2, &[]) > 0.648);
}

#[test]
fn restart_and_post_agree() {
    let r = inner_pfa(&zoo::leq_pfa_restart(0.25).unwrap());
    let p = restart_to_post(&r).unwrap();
    valid(&MachineSpec::Post(p.clone()));
    let back = post_to_restart(&p);
    for w in ab().words_up_to(6) {
        let f = restart_f(&r, &w);
        assert!((post_accept(&p, &w).unwrap() - f).abs() < 1e-12);
        assert!((restart_f(&back, &w) - f).abs() < 1e-12);
    }
}

/// Deterministic post machine for words of even length.
fn even_post() -> PostSpec {
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let flip = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let mut roster = Roster::new(["e", "o"], 0);
    roster.roles = vec![Role::PostAccept, Role::PostReject];
    PostSpec {
        inner: PostInner::Pfa(PfaSpec { alphabet: ab(), roster, ops: OpTable::single(vec![id.clone(), flip.clone(), flip, id]) }),
        latvian: None,
    }
}

#[test]
fn tensor_amplification_squares_error() {
    let eps = 0.25;
    let p = restart_to_post(&inner_pfa(&zoo::leq_pfa_restart(eps).unwrap())).unwrap();
    let amp = post_tensor_amplify(&p, eps).unwrap();
    assert_eq!(amp.roster().len(), p.roster().len().pow(3));
    for w in ab().words_up_to(4) {
        let f = post_accept(&amp, &w).unwrap();
        let err = if LanguageId::Leq.member(&w).unwrap() { 1.0 - f } else { f };
        assert!(err <= eps * eps + 1e-9, "{w:?}: {f}");
    }
}

#[test]
fn boolean_closure() {
    let eq = restart_to_post(&inner_pfa(&zoo::leq_pfa_restart(1.0 / 16.0).unwrap())).unwrap();
    let even = even_post();
    let u = post_combine(&eq, Some(&even), CombineOp::Union).unwrap();
    let i = post_combine(&eq, Some(&even), CombineOp::Intersection).unwrap();
    let c = post_combine(&eq, None, CombineOp::Complement).unwrap();
    let cc = post_combine(&c, None, CombineOp::Complement).unwrap();
    assert_eq!(cc, eq);
    assert!(post_combine(&eq, None, CombineOp::Union).is_err());
    for w in ab().words_up_to(4) {
        let in_eq = LanguageId::Leq.member(&w).unwrap();
        let in_even = w.len() % 2 == 0;
        let fu = post_accept(&u, &w).unwrap();
        let fi = post_accept(&i, &w).unwrap();
        assert!(if in_eq || in_even { fu >= 15.0 / 16.0 } else { fu <= 1.0 / 16.0 }, "{w:?}: {fu}");
        assert!(if in_eq && in_even { fi >= 15.0 / 16.0 } else { fi <= 1.0 / 16.0 }, "{w:?}: {fi}");
        let fc = post_accept(&c, &w).unwrap();
        assert_eq!(fc > 0.5, !in_eq);
    }
}

/// Final state and counter values of a deterministic blind counter machine; `None` when it blocks.
fn d_final(d: &CounterSpec, w: &[usize]) -> Option<(usize, Vec<i64>)> {
    let mut q = d.roster.start;
    let mut c = vec![0i64; d.counters];
    for &s in &d.alphabet.tilde(w) {
        let r = d.rows.iter().find(|r| r.src == q && r.sym == s)?;
        q = r.dst;
        c.iter_mut().zip(&r.incs).for_each(|(x, d)| *x += d);
    }
    Some((q, c))
}

#[test]
fn d1bca_reduction_error_profile() {
    let d = counter(&zoo::leq_d1bca().unwrap());
    for m in [2usize, 4] {
        let ioc = d1bca_to_qfa_ioc(&d, m).unwrap();
        valid(&MachineSpec::Wom(ioc.clone()));
        for w in ab().words_up_to(8) {
            let f = wom_run(&ioc, &w, 4096).unwrap().p_accept;
            let want = match d_final(&d, &w) {
                Some((q, c)) if d.roster.roles[q] == Role::Accept => {
                    if c[0] == 0 {
                        1.0
                    } else {
                        1.0 / m as f64
                    }
                }
                _ => 0.0,
            };
            assert!((f - want).abs() < 1e-9, "m={m} {w:?}: {f}");
        }
    }
    assert!(d1bca_to_qfa_ioc(&d, 1).is_err());
}

#[test]
fn quantum_counter_error_formula() {
    let d = counter(&zoo::leq_d1bca().unwrap());
    let (_, e) = q1bca_to_qfa_ioc(&d, 3, 0.0).unwrap();
    assert!((e - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn one_reversal_reduction_on_lnh() {
    let d = counter(&zoo::lnh_rev1_d1ca().unwrap());
    let ioc = rev1_d1ca_to_qfa_ioc(&d).unwrap();
    valid(&MachineSpec::Wom(ioc.clone()));
    for w in ab().words_up_to(10) {
        let f = wom_run(&ioc, &w, 4096).unwrap().p_accept;
        let member = LanguageId::Lnh.member(&w).unwrap();
        assert_eq!(f > 0.5 + 1e-9, member, "{w:?}: {f}");
        if !member {
            assert!(f <= 0.5 + 1e-9);
        }
    }
}

#[test]
fn counter_merging_inequality() {
    let eps = 0.25;
    let d = counter(&zoo::leqk_dkbca(2).unwrap());
    let one = pkbca_to_p1bca(&d, eps).unwrap();
    assert_eq!(one.counters, 1);
    valid(&MachineSpec::Counter(one.clone()));
    let alpha = LanguageId::LeqK(2).alphabet();
    for w in alpha.words_up_to(5) {
        let f = counter_run(&d, &w).unwrap().p_accept;
        let g = counter_run(&one, &w).unwrap().p_accept;
        assert!(f - 1e-9 <= g && g <= f + eps * (1.0 - f) + 1e-9, "{w:?}: {f} {g}");
    }
    assert_eq!(freivalds_r(2, 0.5).unwrap(), 16);
    assert!(freivalds_r(31, 1.0).is_err());
}

#[test]
fn multi_increment_counter_unrolled() {
    let d = counter(&zoo::leq_d1bca().unwrap());
    let ioc = d1bca_to_qfa_ioc(&d, 2).unwrap();
    let WomVariant::Ioc { max_inc } = ioc.variant else { panic!() };
    let flat = ioc_m_to_ioc(&ioc).unwrap();
    assert_eq!(flat.roster.len(), ioc.roster.len() * max_inc.max(1) as usize);
    valid(&MachineSpec::Wom(flat.clone()));
    for w in ab().words_up_to(6) {
        let a = wom_run(&ioc, &w, 4096).unwrap().p_accept;
        let b = wom_run(&flat, &w, 4096).unwrap().p_accept;
        assert!((a - b).abs() < 1e-12, "{w:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linearization_is_exact(seed in any::<u64>(), n in 1usize..=3, elems in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_qfa(&ab(), n, elems, &mut rng);
        let g = qfa_to_gfa(&q).unwrap();
        for w in ab().words_up_to(4) {
            prop_assert!((qfa_accept(&q, &w).unwrap() - gfa_value(&g, &w).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn embedded_pfa_validates_and_agrees(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_pfa(&ab(), n, &mut rng);
        let k = pfa_to_kwqfa(&p).unwrap();
        prop_assert!(validate(&MachineSpec::Kwqfa(k.clone()), Tolerance::default()).is_ok());
        for w in ab().words_up_to(3) {
            let f = pfa_f(&p, &w);
            if (f - 0.5).abs() > 1e-9 {
                prop_assert_eq!(kwqfa_margin(&k, &w).unwrap() > 0.0, f > 0.5);
            }
        }
    }

    #[test]
    fn amplification_copies_grow(eps in 0.01f64..0.49) {
        let k = amplification_k(eps).unwrap();
        prop_assert!(k >= 2);
        prop_assert!(amplification_k(eps * eps).unwrap() >= 2);
    }
}
