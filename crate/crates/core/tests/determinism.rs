use ci_count::{census, count_single, CensusOptions};
use sha2::{Digest, Sha256};

fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[test]
fn census_identical_across_worker_counts() {
    for n in 1..=4 {
        for k in 1..=n {
            let hashes: Vec<String> = [1, 2, 8]
                .iter()
                .map(|&w| {
                    digest(
                        &census(n, k, &CensusOptions::with_workers(w))
                            .unwrap()
                            .to_csv(),
                    )
                })
                .collect();
            assert!(
                hashes.windows(2).all(|p| p[0] == p[1]),
                "n = {n}, k = {k}: {hashes:?}"
            );
        }
    }
}

#[test]
fn sharded_slices_identical_across_worker_counts() {
    // q = 4 visits C(32, 8) support sets, several shards
    for q in [2, 3, 4] {
        let counts: Vec<u64> = [1, 2, 8]
            .iter()
            .map(|&w| {
                count_single(5, 1, q, &CensusOptions::with_workers(w))
                    .unwrap()
                    .count
            })
            .collect();
        assert!(
            counts.windows(2).all(|p| p[0] == p[1]),
            "q = {q}: {counts:?}"
        );
    }
}

#[test]
fn repeated_runs_identical() {
    let opts = CensusOptions::with_workers(8);
    let first = census(4, 1, &opts).unwrap().to_csv();
    for _ in 0..5 {
        assert_eq!(census(4, 1, &opts).unwrap().to_csv(), first);
    }
}
