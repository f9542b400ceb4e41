//! Three-party encrypted loop: setup, step protocol, oracle equality and closed-loop runs.

mod common;

use common::random_loop;
use iohfc_core::bfv::BfvParams;
use iohfc_core::encoding::Sensitivity;
use iohfc_core::encsys::{
    bench, digest, run_closed_loop, EncryptedLoop, EncsysError, MessageKind, QuantizedOracle, ReferenceSchedule, Role,
    RunOptions, Segment, BENCH_OPERATIONS,
};
use iohfc_core::iohfc::{tank_controller, tank_plant, transform, IohfcGain, NoiseSequence, TANK_LENGTH};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn sens(x: f64) -> Sensitivity {
    Sensitivity::new(x).unwrap()
}

fn tank_gain() -> IohfcGain {
    transform(&tank_controller(), TANK_LENGTH).unwrap()
}

// the smallest ring whose slots fit the tank layout (m·h = 12)
fn small() -> BfvParams {
    BfvParams { n: 32, lambda: 0, ..BfvParams::default_profile() }
}

fn tank_loop(params: BfvParams, seed: u8) -> EncryptedLoop {
    EncryptedLoop::setup(params, Some(&tank_plant()), &tank_gain(), sens(2e-4), sens(1e-3), [seed; 32]).unwrap()
}

#[test]
fn setup_builds_zero_queue_and_gain_ciphertexts() {
    let lp = tank_loop(BfvParams::default_profile(), 1);
    let audit = lp.audit_queue().unwrap();
    assert_eq!(audit.slots.len(), TANK_LENGTH + 1);
    assert!(audit.slots.iter().all(|s| s.as_slice().iter().all(|&x| x == 0)));
    assert!(audit.min_margin() > 0.0);
    let gains = lp.setup_messages().iter().filter(|m| matches!(m.kind, MessageKind::Gain(_))).count();
    assert_eq!(gains, TANK_LENGTH + 1);
    assert_eq!(lp.controller_ciphertexts().len(), 2 * (TANK_LENGTH + 1));
    assert!(lp.warnings().is_empty(), "{:?}", lp.warnings());
    assert!(lp.certificate().unwrap().admits(2e-4));
}

#[test]
fn controller_receives_no_secret_material() {
    let lp = tank_loop(small(), 2);
    for m in lp.setup_messages() {
        if m.kind == MessageKind::SecretKey {
            assert_eq!(m.to, Role::Plant);
        }
        if m.to == Role::Controller {
            assert!(m.kind.is_ciphertext() || matches!(m.kind, MessageKind::RelinKey | MessageKind::GaloisKey));
        }
    }
}

#[test]
fn setup_transcript_is_deterministic() {
    let a = tank_loop(small(), 3);
    let b = tank_loop(small(), 3);
    let c = tank_loop(small(), 4);
    assert_eq!(a.setup_messages(), b.setup_messages());
    assert_eq!(digest(a.setup_messages()), digest(b.setup_messages()));
    assert_ne!(digest(a.setup_messages()), digest(c.setup_messages()));
}

#[test]
fn setup_rejects_layouts_beyond_capacity() {
    // h = 3 + 3 + 3 and m = 3 need 27 slots, the toy ring has 8
    let k = DMatrix::from_element(3, 3 * 3 + 3 * 3 + 3 * 2, 0.1);
    let g = IohfcGain::from_matrix(k, 2, 3, 3).unwrap();
    let err = EncryptedLoop::setup(BfvParams::toy_profile(), None, &g, sens(1e-2), sens(1e-2), [0; 32]).unwrap_err();
    assert!(matches!(err, EncsysError::Shape(_)));
}

#[test]
fn oversized_delta_k_only_warns() {
    let lp = EncryptedLoop::setup(small(), Some(&tank_plant()), &tank_gain(), sens(0.5), sens(1e-2), [5; 32]).unwrap();
    assert!(lp.warnings().iter().any(|w| w.contains("stability threshold")));
}

#[test]
fn zero_inputs_give_zero_output() {
    let mut lp = tank_loop(BfvParams::default_profile(), 6);
    let tr = lp.step(&DVector::zeros(2), &DVector::zeros(2)).unwrap();
    assert_eq!(tr.z, vec![0, 0]);
    assert_eq!(tr.u, DVector::zeros(2));
}

#[test]
fn step_counts_and_messages() {
    let mut lp = tank_loop(BfvParams::default_profile(), 7);
    let (l, h) = (TANK_LENGTH, 6);
    for t in 0..3 {
        let tr = lp.step(&DVector::from_element(2, 0.5), &DVector::from_element(2, 0.1 * t as f64)).unwrap();
        let c = tr.counts.controller;
        assert_eq!(c.add, l + h + 2);
        assert_eq!(c.mult, l + 1);
        assert_eq!(c.rotate, h - 1);
        assert_eq!((c.enc, c.dec), (0, 0));
        assert_eq!((tr.counts.operator.enc, tr.counts.operator.dec), (1, 0));
        assert_eq!((tr.counts.plant.enc, tr.counts.plant.dec), (2, 1));

        let link = |from, to| tr.messages.iter().filter(|m| m.from == from && m.to == to).count();
        assert_eq!(link(Role::Operator, Role::Controller), 1);
        assert_eq!(link(Role::Plant, Role::Controller), 2);
        assert_eq!(link(Role::Controller, Role::Plant), 1);
        assert_eq!(tr.messages.len(), 4);
        assert!(tr.messages.iter().all(|m| m.kind.is_ciphertext()));
        assert_eq!(tr.t, t);
    }
}

#[test]
fn random_loops_match_oracle_and_queue_ages() {
    let mut rng = ChaCha20Rng::seed_from_u64(40);
    for trial in 0..6 {
        let lp = random_loop(&mut rng, 0.9);
        let length = common::smallest_length(&lp.ctrl);
        let g = transform(&lp.ctrl, length).unwrap();
        if g.m() * g.h() > 2048 {
            continue;
        }
        let mut el =
            EncryptedLoop::setup(BfvParams::default_profile(), None, &g, sens(1e-3), sens(1e-3), [trial; 32]).unwrap();
        let refs: Vec<_> = (0..25).map(|_| DVector::from_fn(g.q(), |_, _| rng.gen_range(-1.0..1.0))).collect();
        let x0 = DVector::from_fn(lp.plant.n(), |_, _| rng.gen_range(-0.5..0.5));
        let opts = RunOptions { plain: true, oracle: true, audit: true };
        let run = run_closed_loop(&mut el, &lp.plant, &x0, &refs, None, opts).unwrap();
        assert_eq!(run.oracle_mismatches(), 0);
        assert_eq!(run.queue_mismatches(), 0);
        assert!(run.min_margin().unwrap() > 0.0);
        let counts = run.records[0].counts.controller;
        assert_eq!(counts.add, length + g.h() + 2);
        assert_eq!(counts.mult, length + 1);
        assert_eq!(counts.rotate, g.h() - 1);
    }
}

#[test]
fn identical_seeds_give_identical_runs() {
    let plant = tank_plant();
    let refs = ReferenceSchedule::tank().sample(30);
    let x0 = DVector::from_element(4, 1.0);
    let noise = NoiseSequence::gaussian(&plant, 30, 1e-3, 9).unwrap();
    let run = |seed| {
        let mut lp = tank_loop(small(), seed);
        run_closed_loop(&mut lp, &plant, &x0, &refs, Some(&noise), RunOptions::default()).unwrap()
    };
    let (a, b, c) = (run(8), run(8), run(9));
    assert_eq!(a.encrypted, b.encrypted);
    assert_eq!(a.transcript_digest(), b.transcript_digest());
    assert_ne!(a.transcript_digest(), c.transcript_digest());
}

#[test]
fn tank_run_tracks_plain_loop_bit_exactly() {
    let plant = tank_plant();
    let refs = ReferenceSchedule::tank().sample(1400);
    let x0 = DVector::from_element(4, 1.0);
    let mut lp = tank_loop(BfvParams::default_profile(), 10);
    let opts = RunOptions { plain: true, oracle: true, audit: false };
    let run = run_closed_loop(&mut lp, &plant, &x0, &refs, None, opts).unwrap();
    assert_eq!(run.oracle_mismatches(), 0);
    let err = run.max_output_error().unwrap();
    assert!((0.004..=0.01).contains(&err), "max error {err}");
    // the outputs settle on the last reference, -0.5
    let last = run.encrypted.y.last().unwrap();
    assert!((last - DVector::from_element(2, -0.5)).amax() < 0.05, "{last}");
}

#[test]
fn oracle_matches_plain_quantized_product() {
    let g = tank_gain();
    let (dk, dd) = (sens(2e-4), sens(1e-3));
    let mut oracle = QuantizedOracle::new(&g, dk, dd, iohfc_core::bfv::DEFAULT_T).unwrap();
    let k_bar = DMatrix::from_fn(2, g.width(), |i, j| (g.k()[(i, j)] / 2e-4 + 0.5).floor() * 2e-4);
    let mut hist = iohfc_core::iohfc::History::for_gain(&g);
    let q = |x: f64| (x / 1e-3 + 0.5).floor() * 1e-3;
    for t in 0..10 {
        let r = DVector::from_element(2, 0.5);
        let y = DVector::from_vec(vec![0.1 * t as f64, -0.03 * t as f64]);
        let (_, u) = oracle.step(&r, &y).unwrap();
        let expect = &k_bar * hist.d(&r, &y).map(q);
        assert!((&u - &expect).amax() < 1e-9, "{u} vs {expect}");
        hist.push(r, y, u);
    }
}

#[test]
fn schedule_json_and_lookup() {
    let s = ReferenceSchedule::tank();
    assert_eq!(s.at(0), DVector::zeros(2));
    assert_eq!(s.at(599), DVector::zeros(2));
    assert_eq!(s.at(600), DVector::from_element(2, 0.5));
    assert_eq!(s.at(800), DVector::from_element(2, -0.5));
    assert_eq!(s.at(1399), DVector::from_element(2, -0.5));
    assert_eq!(s.sample(1400), common::tank_schedule(1400));
    assert!((s.sup_norm() - 0.5f64.hypot(0.5)).abs() < 1e-15);
    let json = serde_json::to_string(&s).unwrap();
    let back: ReferenceSchedule = serde_json::from_str(&json).unwrap();
    assert_eq!(back, s);
    assert!(ReferenceSchedule::new(vec![Segment { start: 1, r: vec![0.0] }]).is_err());
    assert!(serde_json::from_str::<ReferenceSchedule>(r#"[{"start":0,"r":[1]},{"start":0,"r":[2]}]"#).is_err());
}

#[test]
fn bench_reports_every_operation() {
    let lp = tank_loop(BfvParams::default_profile(), 11);
    let rows = bench(&lp, 5, 1).unwrap();
    assert_eq!(rows.iter().map(|r| r.operation).collect::<Vec<_>>(), BENCH_OPERATIONS);
    for r in &rows {
        assert!(r.min_ms <= r.avg_ms && r.avg_ms <= r.max_ms && r.std_us >= 0.0);
    }
    let avg = |op| rows.iter().find(|r| r.operation == op).unwrap().avg_ms;
    assert!(avg("Mult") > avg("Rotate") && avg("Mult") > avg("Add"));
    assert!(bench(&lp, 0, 1).is_err());
}
