//! Packed mat-vec kernels against direct modular oracles.

use std::sync::Arc;

use iohfc_core::bfv::{keygen, BfvContext, BfvParams, KeySet};
use iohfc_core::encoding::{Encoder, SlotVector};
use iohfc_core::simd_linalg::{extract, matvec, matvec_sum, OpCounts, PackedMatrix, PackedVector, SimdError};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

macro_rules! lazy {
    ($name:ident: $t:ty = $init:expr) => {
        fn $name() -> &'static $t {
            static CELL: std::sync::OnceLock<$t> = std::sync::OnceLock::new();
            CELL.get_or_init(|| $init)
        }
    };
}

lazy!(toy: (Arc<BfvContext>, KeySet, Encoder) = {
    let ctx = BfvContext::new(BfvParams::toy_profile()).unwrap();
    let keys = keygen(&ctx, [3; 32]).unwrap();
    let enc = Encoder::new(ctx.clone()).unwrap();
    (ctx, keys, enc)
});

lazy!(full: (Arc<BfvContext>, KeySet, Encoder) = {
    let ctx = BfvContext::new(BfvParams::default_profile()).unwrap();
    let keys = keygen(&ctx, [4; 32]).unwrap();
    let enc = Encoder::new(ctx.clone()).unwrap();
    (ctx, keys, enc)
});

fn minimal(z: i128, t: u64) -> i64 {
    let t = t as i128;
    let r = z.rem_euclid(t);
    (if r > t / 2 { r - t } else { r }) as i64
}

// plain Σ_i M_i v_i reduced to minimal residues
fn oracle(ms: &[DMatrix<i64>], vs: &[Vec<i64>], t: u64) -> Vec<i64> {
    let rows = ms[0].nrows();
    (0..rows)
        .map(|i| {
            let s: i128 = ms
                .iter()
                .zip(vs)
                .map(|(m, v)| (0..v.len()).map(|j| m[(i, j)] as i128 * v[j] as i128).sum::<i128>())
                .sum();
            minimal(s, t)
        })
        .collect()
}

fn run_matvec(
    (ctx, keys, enc): &(Arc<BfvContext>, KeySet, Encoder),
    m: &DMatrix<i64>,
    v: &[i64],
    rng: &mut ChaCha20Rng,
) -> Vec<i64> {
    let pm = PackedMatrix::encrypt(enc, &keys.pk, m, rng).unwrap();
    let pv = PackedVector::encrypt(enc, &keys.pk, v, m.nrows(), rng).unwrap();
    let mut counts = OpCounts::default();
    let ct = matvec(ctx, Some(&keys.gk), Some(&keys.rlk), &pm, &pv, &mut counts).unwrap();
    assert_eq!(counts.mult, 1);
    assert_eq!(counts.rotate, m.ncols() - 1);
    assert_eq!(counts.add, m.ncols() - 1);
    extract(&enc.decrypt_slots(&keys.sk, &ct).unwrap(), m.nrows(), m.ncols()).unwrap()
}

#[test]
fn identity_returns_vector() {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let i2 = DMatrix::<i64>::identity(2, 2);
    assert_eq!(run_matvec(toy(), &i2, &[11, -5], &mut rng), vec![11, -5]);
    assert_eq!(run_matvec(full(), &i2, &[123456, -98765], &mut rng), vec![123456, -98765]);
}

#[test]
fn two_by_three_example() {
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let m = DMatrix::from_row_slice(2, 3, &[1, 2, 3, 4, 5, 6]);
    assert_eq!(run_matvec(toy(), &m, &[7, 8, 9], &mut rng), vec![50, 122]);
    assert_eq!(run_matvec(full(), &m, &[7, 8, 9], &mut rng), vec![50, 122]);
}

#[test]
fn random_two_by_three_matches_oracle() {
    let env = toy();
    let t = env.0.params().t;
    let half = (t / 2) as i64;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..500 {
        let m = DMatrix::from_fn(2, 3, |_, _| rng.gen_range(-half..=half));
        let v: Vec<i64> = (0..3).map(|_| rng.gen_range(-half..=half)).collect();
        let got = run_matvec(env, &m, &v, &mut rng);
        assert_eq!(got, oracle(&[m], &[v], t));
    }
}

#[test]
fn random_full_profile_matches_oracle() {
    let env = full();
    let t = env.0.params().t;
    let half = (t / 2) as i64;
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for (rows, cols) in [(2, 3), (3, 5), (1, 7)] {
        let m = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-half..=half));
        let v: Vec<i64> = (0..cols).map(|_| rng.gen_range(-half..=half)).collect();
        assert_eq!(run_matvec(env, &m, &v, &mut rng), oracle(&[m], &[v], t));
    }
}

fn run_sum(
    (ctx, keys, enc): &(Arc<BfvContext>, KeySet, Encoder),
    ms: &[DMatrix<i64>],
    vs: &[Vec<i64>],
    rng: &mut ChaCha20Rng,
) -> (Vec<i64>, OpCounts) {
    let rows = ms[0].nrows();
    let gains: Vec<_> = ms.iter().map(|m| PackedMatrix::encrypt(enc, &keys.pk, m, rng).unwrap()).collect();
    let datas: Vec<_> = vs.iter().map(|v| PackedVector::encrypt(enc, &keys.pk, v, rows, rng).unwrap()).collect();
    let mut counts = OpCounts::default();
    let ct = matvec_sum(ctx, Some(&keys.gk), Some(&keys.rlk), &gains, &datas, &mut counts).unwrap();
    let out = extract(&enc.decrypt_slots(&keys.sk, &ct).unwrap(), rows, ms[0].ncols()).unwrap();
    (out, counts)
}

#[test]
fn sum_over_tank_shaped_history() {
    let env = full();
    let t = env.0.params().t;
    let half = (t / 2) as i64;
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let (l, m, h) = (2, 2, 6);
    for _ in 0..3 {
        let ms: Vec<_> = (0..=l).map(|_| DMatrix::from_fn(m, h, |_, _| rng.gen_range(-half..=half))).collect();
        let vs: Vec<Vec<i64>> = (0..=l).map(|_| (0..h).map(|_| rng.gen_range(-half..=half)).collect()).collect();
        let (got, counts) = run_sum(env, &ms, &vs, &mut rng);
        assert_eq!(got, oracle(&ms, &vs, t));
        assert_eq!(counts.mult, l + 1);
        assert_eq!(counts.rotate, h - 1);
        // the remaining 3 additions of a control step are queue updates
        assert_eq!(counts.add + 3, l + h + 2);
    }
}

#[test]
fn sum_degenerate_cases() {
    let env = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let m = DMatrix::from_row_slice(2, 3, &[1, -2, 3, 4, 5, -6]);
    let v = vec![7, 8, 9];
    let (single, counts) = run_sum(env, std::slice::from_ref(&m), std::slice::from_ref(&v), &mut rng);
    assert_eq!(single, run_matvec(env, &m, &v, &mut rng));
    assert_eq!(counts.mult, 1);
    let (zero, _) = run_sum(env, &[m.clone(), m], &[vec![0; 3], vec![0; 3]], &mut rng);
    assert_eq!(zero, vec![0, 0]);
}

#[test]
fn structural_and_key_errors() {
    let (ctx, keys, enc) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let m = PackedMatrix::encrypt(enc, &keys.pk, &DMatrix::from_element(2, 3, 1), &mut rng).unwrap();
    let v = PackedVector::encrypt(enc, &keys.pk, &[1, 2], 2, &mut rng).unwrap();
    let mut c = OpCounts::default();
    assert!(matches!(matvec(ctx, Some(&keys.gk), Some(&keys.rlk), &m, &v, &mut c), Err(SimdError::Shape(_))));
    let v = PackedVector::encrypt(enc, &keys.pk, &[1, 2, 3], 2, &mut rng).unwrap();
    assert_eq!(matvec(ctx, None, Some(&keys.rlk), &m, &v, &mut c).unwrap_err(), SimdError::MissingKey("rotation"));
    assert_eq!(
        matvec(ctx, Some(&keys.gk), None, &m, &v, &mut c).unwrap_err(),
        SimdError::MissingKey("relinearization")
    );
    assert!(matches!(matvec_sum(ctx, Some(&keys.gk), Some(&keys.rlk), &[m], &[], &mut c), Err(SimdError::Shape(_))));
    assert!(PackedVector::encrypt(enc, &keys.pk, &[1, 2, 3], 3, &mut rng).is_err());
}

#[test]
fn extract_with_history_stride() {
    // h-stride reads land on the first slot of each block
    let (m, h) = (3, 6);
    let slots: Vec<i64> = (0..32).collect();
    let got = extract(&SlotVector::new(slots), m, h).unwrap();
    let want: Vec<i64> = (1..=m).map(|i| ((i - 1) * h) as i64).collect();
    assert_eq!(got, want);
}
