use fibrank_core::density::is_member;
use fibrank_core::fib::Sequence;
use fibrank_core::oracle::{count_classes, gcd_distribution, partial_ell_sum, witnesses};
use fibrank_core::rank::fibonacci_cache;
use fibrank_core::{LucasParams, RankCache};

#[test]
fn classes_partition_the_range() {
    for seq in [
        Sequence::Fibonacci,
        Sequence::Lucas(LucasParams::new(2, 1).unwrap()),
    ] {
        let x = 100_000;
        let dist = gcd_distribution(&seq, x).unwrap();
        assert_eq!(dist.values().sum::<u64>(), x);
        let ks: Vec<u64> = dist.keys().copied().take(40).collect();
        let counts = count_classes(&seq, &ks, x, &[], 0).unwrap();
        for (k, reports) in ks.iter().zip(counts) {
            assert_eq!(reports.last().unwrap().count, dist[k], "k = {k}");
        }
    }
}

#[test]
fn counted_classes_are_members_with_least_witness_ell() {
    let cache = fibonacci_cache();
    let dist = gcd_distribution(&Sequence::Fibonacci, 1_000_000).unwrap();
    for k in 1..=100u64 {
        let v = is_member(k).unwrap();
        if dist.contains_key(&k) {
            assert!(v.member, "k = {k}");
        }
        let ell = cache.ell_of(k).unwrap();
        if v.member && ell <= 1_000_000 {
            assert_eq!(
                witnesses(cache, k, 1, 1_000_000).unwrap(),
                vec![ell],
                "k = {k}"
            );
        }
    }
}

#[test]
fn ell_sums_converge() {
    let cache: &RankCache = fibonacci_cache();
    let s = |n| partial_ell_sum(cache, n).unwrap();
    let late = s(40_000) - s(10_000);
    let early = s(4000) - s(1000);
    assert!(late < early);
}

#[test]
fn scans_are_identical_across_thread_pools() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                let seq = Sequence::Lucas(LucasParams::new(1, 2).unwrap());
                let counts = count_classes(&seq, &[1, 3, 9], 200_000, &[1000, 50_000], 5).unwrap();
                (counts, partial_ell_sum(fibonacci_cache(), 30_000).unwrap())
            })
    };
    assert_eq!(run(1), run(6));
}
