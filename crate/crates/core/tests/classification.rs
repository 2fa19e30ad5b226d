use p20_core::atverify::{classify_h1, classify_two_torsion, lemma_r_check};
use p20_core::qforms::class_number;

const HEEGNER_STARK: [i64; 13] = [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163];

#[test]
fn class_number_one_stabilizes() {
    assert_eq!(classify_h1(200), HEEGNER_STARK);
    assert_eq!(classify_h1(100_000), HEEGNER_STARK);
    let mut prev = 0;
    for b in [4u64, 10, 20, 50, 100, 163, 164, 1000] {
        let n = classify_h1(b).len();
        assert!(n >= prev);
        prev = n;
    }
    assert_eq!(classify_h1(162).len(), 12);
    assert_eq!(classify_h1(163).len(), 13);
}

#[test]
fn idoneal_discriminants() {
    let list = classify_two_torsion(10_000);
    assert_eq!(list.len(), 101);
    assert_eq!(*list.last().unwrap(), -7392);
    assert!(list.windows(2).all(|w| w[0] > w[1]));
    for d in HEEGNER_STARK {
        assert!(list.contains(&d));
    }
    assert_eq!(classify_two_torsion(20_000).len(), 101);
}

#[test]
fn lemma_r_holds_for_small_discriminants() {
    for n in 3..=50i64 {
        let d = -n;
        if !matches!(d.rem_euclid(4), 0 | 1) {
            continue;
        }
        for r in [2u64, 3] {
            let rep = lemma_r_check(d, r, 100_000).unwrap();
            assert!(rep.verdict, "d = {d}, r = {r}: {rep:?}");
            assert_eq!(rep.h_dr2, class_number(d * (r * r) as i64).unwrap());
        }
    }
}
