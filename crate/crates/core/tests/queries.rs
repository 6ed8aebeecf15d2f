use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use tracemix_core::algebra::{setup, Scalar};
use tracemix_core::mixnet::{self, btrace_in, btrace_out, QueryOutcome};
use tracemix_core::runtime::{PhaseTimer, ProtocolEnv, RngForge, RunKind, TamperSet};

fn random_subset(n: usize, rng: &mut ChaCha20Rng) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

#[test]
fn smoke_trace_in_and_out() {
    let (n, m) = (6, 2);
    let params = setup(b"smoke", m, n).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (mpk, secrets) = mixnet::keygen(&params, m, 1024, &mut rng).unwrap();
    let values: Vec<Scalar> = (0..n).map(|_| Scalar::from(rng.gen::<u64>())).collect();
    let cts: Vec<_> = values.iter().map(|v| mixnet::enc(&params, &mpk, v, &mut rng).unwrap()).collect();
    let forge = RngForge::new(1);
    let tamper = TamperSet::none();
    let mut timer = PhaseTimer::new();
    let mut env = ProtocolEnv {
        session: [0; 16],
        query: 0,
        run: RunKind::Primary,
        forge: &forge,
        tamper: &tamper,
        timer: &mut timer,
        white_box: true,
    };
    let mixed = mixnet::mix(&mut env, &params, &mpk, &cts, &secrets).unwrap();
    for _ in 0..2 {
        let i_set = random_subset(n, &mut rng);
        let j_set = random_subset(n, &mut rng);
        let want_in: BTreeSet<usize> =
            i_set.iter().copied().filter(|&i| j_set.iter().any(|&j| mixed.v_out[j] == values[i])).collect();
        let want_out: BTreeSet<usize> =
            j_set.iter().copied().filter(|&j| i_set.iter().any(|&i| mixed.v_out[j] == values[i])).collect();
        env.query += 1;
        let r =
            btrace_in(&mut env, &params, &mpk, &cts, &mixed.v_out, &i_set, &j_set, &secrets, &mixed.witnesses).unwrap();
        assert_eq!(r.outcome, QueryOutcome::Output(want_in));
        env.query += 1;
        let r = btrace_out(&mut env, &params, &mpk, &cts, &mixed.v_out, &i_set, &j_set, &secrets, &mixed.witnesses)
            .unwrap();
        assert_eq!(r.outcome, QueryOutcome::Output(want_out));
    }
}
