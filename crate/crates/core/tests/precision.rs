mod common;

use astro_float::RoundingMode;
use ci_count::asymptotics::{self, EvalMode};
use common::{agrees, precision_grid, Hp, PREC};

const TOL: f64 = 1e-9;

#[test]
fn stirling_branch_matches_direct_product() {
    let mut hp = Hp::new();
    let mut acc = hp.int(1);
    for i in 2..=2500u128 {
        acc = acc.mul(&hp.int(i), PREC, RoundingMode::ToEven);
    }
    let direct = hp.ln(&acc);
    let series = hp.ln_factorial(2500);
    assert!(agrees(
        0.0,
        &direct.sub(&series, PREC, RoundingMode::ToEven),
        1e-50
    ));
}

#[test]
fn log_space_formulas_match_high_precision() {
    let mut hp = Hp::new();
    let mut checked = 0;
    for (n, k, q) in precision_grid() {
        let p = asymptotics::params(n, k, q).unwrap();
        let main = asymptotics::estimate_main(&p).unwrap().log2_value;
        let oracle = hp.main(n, k, q);
        assert!(agrees(main, &oracle, TOL), "main {n} {k} {q}: {main}");
        let res = asymptotics::estimate_resilient(n, k).unwrap().log2_value;
        let oracle = hp.resilient(n, k);
        assert!(agrees(res, &oracle, TOL), "resilient {n} {k}");
        let nk = asymptotics::estimate_nk(n, k).unwrap().log2_value;
        let oracle = hp.nk(n, k);
        assert!(agrees(nk, &oracle, TOL), "nk {n} {k}");
        checked += 3;
        if k == 1 {
            let k1 = asymptotics::estimate_k1_exact_form(n, q, EvalMode::LogSpace)
                .unwrap()
                .log2_value;
            let oracle = hp.k1(n, q);
            assert!(agrees(k1, &oracle, TOL), "k1 {n} {q}: {k1}");
            let sq = asymptotics::estimate_small_q(n, q).unwrap().log2_value;
            let oracle = hp.small_q(n, q);
            assert!(agrees(sq, &oracle, TOL), "small q {n} {q}: {sq}");
            checked += 2;
        }
    }
    assert!(checked >= 150);
}

#[test]
fn exact_k1_form_matches_high_precision() {
    let mut hp = Hp::new();
    for n in 2..=12u32 {
        for q in [1, (1u64 << (n - 1)) / 3 + 1, 1 << (n - 2)] {
            let v = asymptotics::estimate_k1_exact_form(n, q, EvalMode::Exact)
                .unwrap()
                .log2_value;
            let oracle = hp.k1(n, q);
            assert!(agrees(v, &oracle, 1e-12), "{n} {q}");
        }
    }
}
