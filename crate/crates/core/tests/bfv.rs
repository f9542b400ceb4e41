//! BFV scheme behavior against plaintext-ring oracles.

use std::sync::Arc;

use iohfc_core::bfv::{
    keygen, BfvContext, BfvError, BfvParams, Ciphertext, GaloisKey, KeySet, PublicKey, RelinKey, SecretKey,
};
use iohfc_core::ring::RingElement;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

// builds a shared value once per test binary
macro_rules! lazy {
    ($name:ident: $t:ty = $init:expr) => {
        fn $name() -> &'static $t {
            static CELL: std::sync::OnceLock<$t> = std::sync::OnceLock::new();
            CELL.get_or_init(|| $init)
        }
    };
}

lazy!(toy: (Arc<BfvContext>, KeySet) = {
    let ctx = BfvContext::new(BfvParams::toy_profile()).unwrap();
    let keys = keygen(&ctx, [7; 32]).unwrap();
    (ctx, keys)
});

lazy!(full: (Arc<BfvContext>, KeySet) = {
    let ctx = BfvContext::new(BfvParams::default_profile()).unwrap();
    let keys = keygen(&ctx, [9; 32]).unwrap();
    (ctx, keys)
});

fn random_plain(ctx: &BfvContext, rng: &mut ChaCha20Rng) -> RingElement {
    let t = ctx.params().t as i64;
    let coeffs: Vec<i64> = (0..ctx.n()).map(|_| rng.gen_range(0..t)).collect();
    RingElement::from_coeffs(&coeffs, *ctx.plain_modulus()).unwrap()
}

#[test]
fn keygen_is_deterministic() {
    let (ctx, keys) = toy();
    let again = keygen(ctx, [7; 32]).unwrap();
    assert_eq!(&again, keys);
    assert_eq!(again.pk.to_bytes(ctx), keys.pk.to_bytes(ctx));
    assert_eq!(again.rlk.to_bytes(ctx), keys.rlk.to_bytes(ctx));
    assert_ne!(keygen(ctx, [8; 32]).unwrap().pk, keys.pk);
}

fn check_key_relations(ctx: &BfvContext, keys: &KeySet) {
    let b = ctx.q_basis();
    let bound = (6.0 * ctx.params().noise_std * (ctx.n() as f64).sqrt()) as u128;
    let s = b.from_i64(keys.sk.coeffs()).unwrap();
    let [p0, p1] = keys.pk.parts(ctx);
    // pk[0] + pk[1]·s = -e
    let resid = b.to_centered(&b.add(&p0, &b.mul(&p1, &s)));
    assert!(resid.iter().all(|c| c.unsigned_abs() <= bound), "pk residual too large");
    let s2 = b.mul(&s, &s);
    let w = ctx.params().w as i128;
    for i in 0..keys.rlk.key().len() {
        let (k0, k1) = keys.rlk.key().pair(ctx, i);
        let target = b.scalar_mul(&s2, w.pow(i as u32));
        let resid = b.to_centered(&b.sub(&b.add(&k0, &b.mul(&k1, &s)), &target));
        assert!(resid.iter().all(|c| c.unsigned_abs() <= bound), "rlk[{i}] residual too large");
    }
}

#[test]
fn key_relations_hold() {
    let (ctx, keys) = toy();
    check_key_relations(ctx, keys);
    let (ctx, keys) = full();
    check_key_relations(ctx, keys);
}

#[test]
fn encrypt_decrypt_identity_default_profile() {
    let (ctx, keys) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..100 {
        let m = random_plain(ctx, &mut rng);
        let ct = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
        assert_eq!(ctx.decrypt(&keys.sk, &ct).unwrap(), m);
    }
}

#[test]
fn boundary_residues_round_trip() {
    let (ctx, keys) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let t = ctx.params().t as i64;
    for v in [t / 2, -(t / 2), t / 2 - 1, 1 - t / 2, 0, 1, -1] {
        let m = RingElement::from_coeffs(&vec![v; ctx.n()], *ctx.plain_modulus()).unwrap();
        let ct = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
        assert_eq!(ctx.decrypt(&keys.sk, &ct).unwrap(), m, "v={v}");
    }
}

#[test]
fn fresh_encryptions_differ_but_decrypt_alike() {
    let (ctx, keys) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let m = random_plain(ctx, &mut rng);
    let a = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
    let b = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
    assert_ne!(a, b);
    assert_eq!(ctx.decrypt(&keys.sk, &a).unwrap(), ctx.decrypt(&keys.sk, &b).unwrap());
    let zero = RingElement::zero(ctx.n(), *ctx.plain_modulus()).unwrap();
    assert!(ctx.decrypt(&keys.sk, &ctx.encrypt(&keys.pk, &zero, &mut rng).unwrap()).unwrap().is_zero());
}

#[test]
fn add_mult_relin_default_profile() {
    let (ctx, keys) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..5 {
        let m1 = random_plain(ctx, &mut rng);
        let m2 = random_plain(ctx, &mut rng);
        let c1 = ctx.encrypt(&keys.pk, &m1, &mut rng).unwrap();
        let c2 = ctx.encrypt(&keys.pk, &m2, &mut rng).unwrap();
        assert_eq!(ctx.decrypt(&keys.sk, &ctx.add(&c1, &c2).unwrap()).unwrap(), m1.add(&m2).unwrap());
        let prod = m1.mul_negacyclic(&m2).unwrap();
        let c3 = ctx.mult(&c1, &c2).unwrap();
        assert_eq!(c3.len(), 3);
        assert_eq!(ctx.decrypt(&keys.sk, &c3).unwrap(), prod);
        let c = ctx.relin(&keys.rlk, &c3).unwrap();
        assert_eq!(ctx.decrypt(&keys.sk, &c).unwrap(), prod);
        assert!(ctx.noise_margin(&keys.sk, &c).unwrap() > 20.0);
    }
}

#[test]
fn fresh_noise_margin_default_profile() {
    let (ctx, keys) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    for _ in 0..100 {
        let m = random_plain(ctx, &mut rng);
        let ct = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
        let margin = ctx.noise_margin(&keys.sk, &ct).unwrap();
        assert!(margin >= 60.0, "fresh margin {margin}");
    }
}

#[test]
fn margin_decreases_along_mult_chain() {
    let (ctx, keys) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let m = random_plain(ctx, &mut rng);
    let one = RingElement::constant(ctx.n(), 1, *ctx.plain_modulus()).unwrap();
    let c = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
    let fresh = ctx.noise_margin(&keys.sk, &c).unwrap();
    let prod = ctx.mult_relin(&keys.rlk, &c, &ctx.encrypt(&keys.pk, &one, &mut rng).unwrap()).unwrap();
    assert_eq!(ctx.decrypt(&keys.sk, &prod).unwrap(), m);
    let after_mult = ctx.noise_margin(&keys.sk, &prod).unwrap();
    let after_rot = ctx.noise_margin(&keys.sk, &ctx.rotate(&keys.gk, &prod).unwrap()).unwrap();
    assert!(fresh > after_mult && after_mult >= after_rot - 0.5, "{fresh} {after_mult} {after_rot}");
}

#[test]
fn depth_and_shape_errors() {
    let (ctx, keys) = toy();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let m = random_plain(ctx, &mut rng);
    let c = ctx.encrypt(&keys.pk, &m, &mut rng).unwrap();
    let c3 = ctx.mult(&c, &c).unwrap();
    assert!(matches!(ctx.add(&c3, &c), Err(BfvError::PartCount { .. })));
    assert!(matches!(ctx.rotate(&keys.gk, &c3), Err(BfvError::PartCount { .. })));
    let c2 = ctx.relin(&keys.rlk, &c3).unwrap();
    assert!(matches!(ctx.mult(&c2, &c), Err(BfvError::NoiseBudget { .. })));
    assert!(matches!(ctx.relin(&keys.rlk, &c), Err(BfvError::PartCount { .. })));
}

#[test]
fn digit_recomposition_is_exact() {
    let (ctx, _) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let b = ctx.q_basis();
    let p = iohfc_core::bfv::sampling::uniform(b, &mut rng);
    let digits = ctx.decompose(&p);
    assert_eq!(digits.len(), ctx.ell() + 1);
    let w = ctx.params().w as i128;
    let centered = b.to_centered(&p);
    for j in 0..ctx.n() {
        let sum: i128 = digits.iter().enumerate().map(|(i, d)| d[j] as i128 * w.pow(i as u32)).sum();
        assert_eq!(sum, centered[j]);
    }
}

#[test]
fn serialization_round_trips_byte_exact() {
    for (ctx, keys) in [toy(), full()] {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let ct = ctx.encrypt(&keys.pk, &random_plain(ctx, &mut rng), &mut rng).unwrap();
        let bytes = ct.to_bytes(ctx);
        assert_eq!(&bytes[..4], b"EIOH");
        let back = Ciphertext::from_bytes(ctx, &bytes).unwrap();
        assert_eq!(back, ct);
        assert_eq!(back.to_bytes(ctx), bytes);
        let ct3 = ctx.mult(&ct, &ct).unwrap();
        assert_eq!(Ciphertext::from_bytes(ctx, &ct3.to_bytes(ctx)).unwrap().parts(), ct3.parts());

        assert_eq!(PublicKey::from_bytes(ctx, &keys.pk.to_bytes(ctx)).unwrap(), keys.pk);
        assert_eq!(SecretKey::from_bytes(ctx, &keys.sk.to_bytes(ctx)).unwrap(), keys.sk);
        assert_eq!(RelinKey::from_bytes(ctx, &keys.rlk.to_bytes(ctx)).unwrap(), keys.rlk);
        assert_eq!(GaloisKey::from_bytes(ctx, &keys.gk.to_bytes(ctx)).unwrap(), keys.gk);
        let gk_bytes = keys.gk.to_bytes(ctx);
        assert_eq!(GaloisKey::from_bytes(ctx, &gk_bytes).unwrap().to_bytes(ctx), gk_bytes);
    }
}

#[test]
fn deserialization_rejects_foreign_or_truncated_data() {
    let (ctx, keys) = toy();
    let (full_ctx, _) = full();
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let ct = ctx.encrypt(&keys.pk, &random_plain(ctx, &mut rng), &mut rng).unwrap();
    let bytes = ct.to_bytes(ctx);
    assert!(Ciphertext::from_bytes(full_ctx, &bytes).is_err());
    assert!(Ciphertext::from_bytes(ctx, &bytes[..bytes.len() - 1]).is_err());
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(Ciphertext::from_bytes(ctx, &bad).is_err());
    assert!(PublicKey::from_bytes(ctx, &keys.sk.to_bytes(ctx)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn toy_homomorphisms(seed in any::<u64>()) {
        let (ctx, keys) = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let m1 = random_plain(ctx, &mut rng);
        let m2 = random_plain(ctx, &mut rng);
        let c1 = ctx.encrypt(&keys.pk, &m1, &mut rng).unwrap();
        let c2 = ctx.encrypt(&keys.pk, &m2, &mut rng).unwrap();
        prop_assert_eq!(ctx.decrypt(&keys.sk, &c1).unwrap(), m1.clone());
        prop_assert_eq!(ctx.decrypt(&keys.sk, &ctx.add(&c1, &c2).unwrap()).unwrap(), m1.add(&m2).unwrap());
        prop_assert_eq!(
            ctx.decrypt(&keys.sk, &ctx.mult_relin(&keys.rlk, &c1, &c2).unwrap()).unwrap(),
            m1.mul_negacyclic(&m2).unwrap()
        );
        prop_assert_eq!(
            ctx.decrypt(&keys.sk, &ctx.rotate(&keys.gk, &c1).unwrap()).unwrap(),
            m1.automorphism(3).unwrap()
        );
    }

    #[test]
    fn toy_add_is_associative(seed in any::<u64>()) {
        let (ctx, keys) = toy();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let ms: Vec<RingElement> = (0..3).map(|_| random_plain(ctx, &mut rng)).collect();
        let cs: Vec<Ciphertext> = ms.iter().map(|m| ctx.encrypt(&keys.pk, m, &mut rng).unwrap()).collect();
        let left = ctx.add(&ctx.add(&cs[0], &cs[1]).unwrap(), &cs[2]).unwrap();
        let right = ctx.add(&cs[0], &ctx.add(&cs[1], &cs[2]).unwrap()).unwrap();
        prop_assert_eq!(ctx.decrypt(&keys.sk, &left).unwrap(), ctx.decrypt(&keys.sk, &right).unwrap());
        prop_assert_eq!(ctx.decrypt(&keys.sk, &left).unwrap(), ms[0].add(&ms[1]).unwrap().add(&ms[2]).unwrap());
    }
}
