//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 2 5`.

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::Integer;

use tracemix_core::algebra::{pairing, q_integer, random_scalar, scalar_inverse, scalar_to_integer};
use tracemix_core::commitment::commit;
use tracemix_core::encryption::shuffle::{compose, shuffle};
use tracemix_core::encryption::{elgamal, paillier, EgScheme, Permutation};
use tracemix_core::harness::bench::{bench, total};
use tracemix_core::harness::transcript::Verdict;
use tracemix_core::harness::{oracle, run_session, verify_transcript_bytes, SessionConfig, SessionOutput};
use tracemix_core::membership::complement;
use tracemix_core::membership::single::{single_prover_rsm, single_prover_sm};
use tracemix_core::mixnet::{QueryAbort, QueryKind, QueryOutcome, QueryResult, RunOutput};
use tracemix_core::runtime::TamperDirective;
use tracemix_core::sharing::{deal_triples, mult, recons, share_mm, LocalChannel};
use tracemix_core::signatures::{
    bb_keygen, bb_sign, bb_verify, bbsplus_keygen, bbsplus_sign, bbsplus_verify, derive_from_quasi, quasi_sign,
    BBSPlusSignature,
};
use tracemix_core::wire::Encode;
use tracemix_core::{setup, Scalar, SetupParams, G1};

type Outcome = Result<String, String>;

/// Transcripts gathered by criteria 1 to 4 for re-verification.
#[derive(Default)]
struct Corpus {
    honest: Vec<(String, Vec<u8>)>,
    /// (label, bytes, index whose proof or publication was tampered)
    tampered: Vec<(String, Vec<u8>, usize)>,
}

fn main() {
    let only: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |k: u32| only.is_empty() || only.contains(&k);
    let mut corpus = Corpus::default();
    let mut failed = 0;
    let criteria: [(u32, &str); 7] = [
        (1, "completeness"),
        (2, "single-prover equivalence"),
        (3, "white-box lemmas"),
        (4, "soundness tamper suite"),
        (5, "primitive invariants"),
        (6, "linear scaling"),
        (7, "transcript re-verification"),
    ];
    for (k, name) in criteria {
        if !wanted(k) {
            continue;
        }
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(|| match k {
            1 => completeness(&mut corpus),
            2 => single_prover_equivalence(&mut corpus),
            3 => white_box(&mut corpus),
            4 => tamper_suite(&mut corpus),
            5 => primitives(),
            6 => scaling(),
            _ => reverification(&corpus),
        }))
        .unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("PASS criterion {k} ({name}): {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {k} ({name}): {detail} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn random_subset<R: Rng>(n: usize, rng: &mut R) -> BTreeSet<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

fn expected(out: &SessionOutput, r: &QueryResult) -> BTreeSet<usize> {
    match r.kind {
        QueryKind::TraceIn => oracle::trace_in(&out.values, &out.mix.v_out, &r.i_set, &r.j_set),
        QueryKind::TraceOut => oracle::trace_out(&out.values, &out.mix.v_out, &r.i_set, &r.j_set),
    }
}

fn run(cfg: &SessionConfig) -> Result<SessionOutput, String> {
    run_session(cfg).map_err(|e| format!("session seed {} failed: {e}", cfg.seed))
}

fn completeness(corpus: &mut Corpus) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0);
    let (mut queries, mut mismatches) = (0, Vec::new());
    for s in 0..50u64 {
        let n = *[8, 16, 32].choose(&mut rng).unwrap();
        let m = *[1, 2, 4].choose(&mut rng).unwrap();
        let cfg = SessionConfig::new(n, m, 1000 + s)
            .with_query(QueryKind::TraceIn, random_subset(n, &mut rng), random_subset(n, &mut rng))
            .with_query(QueryKind::TraceOut, random_subset(n, &mut rng), random_subset(n, &mut rng));
        let out = run(&cfg)?;
        let distinct: HashSet<_> = out.values.iter().collect();
        if distinct.len() != n {
            return Err(format!("session {s}: sender values are not distinct"));
        }
        for r in &out.results {
            queries += 1;
            let want = QueryOutcome::Output(expected(&out, r));
            if r.outcome != want {
                mismatches.push(format!("session {s} (n={n}, m={m}) {}: got {:?}, want {:?}", r.kind, r.outcome, want));
            }
        }
        corpus.honest.push((format!("completeness session {s}"), out.transcript.to_bytes()));
    }
    if mismatches.is_empty() {
        Ok(format!("50 sessions, {queries} queries, 0 mismatches or aborts"))
    } else {
        Err(format!("{} mismatches; first: {}", mismatches.len(), mismatches[0]))
    }
}

fn run_accepted(o: &RunOutput) -> &BTreeSet<usize> {
    match o {
        RunOutput::Sm(s) => &s.record.accepted,
        RunOutput::Rsm(s) => &s.record.accepted,
    }
}

fn single_prover_equivalence(corpus: &mut Corpus) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xC2);
    let (mut sm, mut rsm) = (0usize, 0usize);
    let mut mismatches = Vec::new();
    let mut s = 0u64;
    while sm < 100 || rsm < 100 {
        let n = rng.gen_range(8..=12);
        let m = *[1, 2, 3].choose(&mut rng).unwrap();
        let all: BTreeSet<usize> = (0..n).collect();
        let cfg = SessionConfig::new(n, m, 2000 + s)
            .with_query(QueryKind::TraceIn, all.clone(), random_subset(n, &mut rng))
            .with_query(QueryKind::TraceOut, random_subset(n, &mut rng), all);
        let out = run(&cfg)?;
        let (p, v_out) = (&out.params, &out.mix.v_out);
        for r in &out.results {
            let comp = r.complement.as_ref().ok_or_else(|| format!("session {s}: {} has no complement run", r.kind))?;
            match r.kind {
                QueryKind::TraceIn => {
                    let runs = [(r.j_set.clone(), &r.primary), (complement(&r.j_set, n), comp)];
                    for (j_set, o) in runs {
                        let phi: Vec<Scalar> = j_set.iter().map(|&j| v_out[j]).collect();
                        for &i in &r.i_set {
                            sm += 1;
                            let member = phi.contains(&out.values[i]);
                            let single =
                                single_prover_sm(p, &out.transcript.cts[i].gamma, &phi, &out.openings[i], &mut rng);
                            let db = run_accepted(o).contains(&i);
                            if single != member || db != member {
                                mismatches.push(format!(
                                    "sm session {s} index {i}: member {member}, single {single}, db {db}"
                                ));
                            }
                        }
                    }
                }
                QueryKind::TraceOut => {
                    let runs = [(r.i_set.clone(), &r.primary), (complement(&r.i_set, n), comp)];
                    for (i_set, o) in runs {
                        let phi: Vec<_> =
                            i_set.iter().map(|&i| (out.transcript.cts[i].gamma, out.openings[i])).collect();
                        for &j in &r.j_set {
                            rsm += 1;
                            let member = i_set.iter().any(|&i| out.values[i] == v_out[j]);
                            let single = single_prover_rsm(p, &phi, &v_out[j], &mut rng);
                            let db = run_accepted(o).contains(&j);
                            if single != member || db != member {
                                mismatches.push(format!(
                                    "rsm session {s} index {j}: member {member}, single {single}, db {db}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        corpus.honest.push((format!("equivalence session {s}"), out.transcript.to_bytes()));
        s += 1;
    }
    if mismatches.is_empty() {
        Ok(format!("{sm} set-membership and {rsm} reverse set-membership instances over {s} sessions, 0 mismatches"))
    } else {
        Err(format!("{} mismatches; first: {}", mismatches.len(), mismatches[0]))
    }
}

fn check_sm_lemma(
    p: &SetupParams,
    out: &SessionOutput,
    o: &RunOutput,
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
) -> Result<usize, String> {
    let RunOutput::Sm(run) = o else { return Err("expected a set-membership run".into()) };
    let wb = run.white_box.as_ref().ok_or("no white-box data")?;
    let n = out.values.len();
    for i in 0..n {
        let member = j_set.iter().any(|&j| out.mix.v_out[j] == out.values[i]);
        let want: G1 = if member {
            let inv = scalar_inverse(&(wb.x + out.values[i])).ok_or("x + v is zero")?;
            p.g1 * (wb.b[i] * inv)
        } else {
            p.g1 * wb.b[i]
        };
        if run.record.blinded[i] != want {
            return Err(format!("blinded signature at {i} (member {member}) has the wrong form"));
        }
        if i_set.contains(&i) && run.record.accepted.contains(&i) != member {
            return Err(format!("proof at {i} accepted = {}, member = {member}", !member));
        }
    }
    Ok(n)
}

fn check_rsm_lemma(
    p: &SetupParams,
    out: &SessionOutput,
    o: &RunOutput,
    i_set: &BTreeSet<usize>,
    j_set: &BTreeSet<usize>,
    m: usize,
) -> Result<usize, String> {
    let RunOutput::Rsm(run) = o else { return Err("expected a reverse set-membership run".into()) };
    let wb = run.white_box.as_ref().ok_or("no white-box data")?;
    let publish = run.record.publish.as_ref().ok_or("no publication")?;
    let perms: Vec<Permutation> = out.mix.witnesses.iter().map(|w| w.perm.clone()).collect();
    let pi = compose(&perms).map_err(|e| e.to_string())?;
    let q = q_integer();
    let bound = Integer::from(m + 2) * Integer::from(q * q);
    let n = out.values.len();
    for j in 0..n {
        let i = pi.get(j);
        if out.mix.v_out[j] != out.values[i] {
            return Err(format!("output {j} does not hold input {i}"));
        }
        let t = run.record.blinded[j];
        let unblinded = BBSPlusSignature { s: t.s - p.g1 * wb.b_s[j], c: t.c - wb.b_c[j], r: t.r - wb.b_r[j] };
        let member = i_set.contains(&i);
        if bbsplus_verify(p, &publish.y, &out.mix.v_out[j], &unblinded) != member {
            return Err(format!("unblinded signature at {j} verifies = {}, member = {member}", !member));
        }
        if t.c != wb.c[i] + wb.b_c[j] || t.r != wb.r_hat[i] + out.openings[i].r + wb.b_r[j] {
            return Err(format!("mod-q blinding identity fails at {j}"));
        }
        for (raw, reduced) in [(&wb.c_raw[j], &t.c), (&wb.r_raw[j], &t.r)] {
            if *raw >= bound || Integer::from(raw % q) != scalar_to_integer(reduced) {
                return Err(format!("raw decryption at {j} is out of range or reduces wrongly"));
            }
        }
        if j_set.contains(&j) && run.record.accepted.contains(&j) != member {
            return Err(format!("proof at {j} accepted = {}, member = {member}", !member));
        }
    }
    for (j, [d0, d1, d2]) in &wb.deltas {
        if *d1 != wb.b_s[*j] * wb.b_c[*j] || *d2 != *d0 * wb.b_c[*j] {
            return Err(format!("Beaver products at {j} are inconsistent"));
        }
    }
    if wb.deltas.iter().map(|(j, _)| *j).collect::<BTreeSet<_>>() != *j_set {
        return Err("products were not recorded for every queried index".into());
    }
    Ok(n)
}

fn white_box(corpus: &mut Corpus) -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xC3);
    let (mut sm_idx, mut rsm_idx) = (0, 0);
    for s in 0..20u64 {
        let n = rng.gen_range(4..=8);
        let m = *[1, 2, 4].choose(&mut rng).unwrap();
        let mut cfg = SessionConfig::new(n, m, 3000 + s)
            .with_query(QueryKind::TraceIn, random_subset(n, &mut rng), random_subset(n, &mut rng))
            .with_query(QueryKind::TraceOut, random_subset(n, &mut rng), random_subset(n, &mut rng));
        cfg.white_box = true;
        let out = run(&cfg)?;
        let p = &out.params;
        for r in &out.results {
            let ctx = |e: String| format!("session {s} {}: {e}", r.kind);
            let comp = r.complement.as_ref().ok_or_else(|| ctx("no complement run".into()))?;
            match r.kind {
                QueryKind::TraceIn => {
                    sm_idx += check_sm_lemma(p, &out, &r.primary, &r.i_set, &r.j_set).map_err(ctx)?;
                    sm_idx += check_sm_lemma(p, &out, comp, &r.i_set, &complement(&r.j_set, n)).map_err(ctx)?;
                }
                QueryKind::TraceOut => {
                    rsm_idx += check_rsm_lemma(p, &out, &r.primary, &r.i_set, &r.j_set, m).map_err(ctx)?;
                    rsm_idx += check_rsm_lemma(p, &out, comp, &complement(&r.i_set, n), &r.j_set, m).map_err(ctx)?;
                }
            }
        }
        corpus.honest.push((format!("white-box session {s}"), out.transcript.to_bytes()));
    }
    Ok(format!("20 sessions, {sm_idx} blinded BB and {rsm_idx} blinded BBS+ positions checked"))
}

enum Expect {
    /// The targeted member goes missing from the union.
    Union(usize),
    /// A server rejects the querier's publication.
    Stage1,
}

fn tamper_suite(corpus: &mut Corpus) -> Outcome {
    let (n, m) = (8, 2);
    let all: BTreeSet<usize> = (0..n).collect();
    let half: BTreeSet<usize> = (0..n / 2).collect();
    let sm_cfg = SessionConfig::new(n, m, 4000).with_query(QueryKind::TraceIn, all.clone(), half.clone());
    let rsm_cfg = SessionConfig::new(n, m, 4001).with_query(QueryKind::TraceOut, half, all);

    let sm_base = run(&sm_cfg)?;
    let sm_want = expected(&sm_base, &sm_base.results[0]);
    let i = *sm_want.first().ok_or("no trace-in member")?;
    let ic = *complement(&sm_want, n).first().ok_or("no trace-in non-member")?;
    let j_of_i = sm_base.mix.v_out.iter().position(|v| *v == sm_base.values[i]).unwrap();

    let rsm_base = run(&rsm_cfg)?;
    let rsm_want = expected(&rsm_base, &rsm_base.results[0]);
    let j = *rsm_want.first().ok_or("no trace-out member")?;
    let jc = *complement(&rsm_want, n).first().ok_or("no trace-out non-member")?;
    let i_of_j = rsm_base.values.iter().position(|v| *v == rsm_base.mix.v_out[j]).unwrap();

    // Shuffle tampers act on the last hop, where positions are final:
    // server 1 for the reverse shuffle, server m for the forward one.
    let cases: Vec<(String, Expect)> = vec![
        (format!("s1:sm-witness-v:{i}"), Expect::Union(i)),
        (format!("s2:sm-witness-r:{i}"), Expect::Union(i)),
        (format!("s1:sm-witness-b:{i}"), Expect::Union(i)),
        (format!("s1:sm-shuffle:{i}:fake"), Expect::Union(i)),
        (format!("s1:sm-shuffle:{i}"), Expect::Union(i)),
        (format!("s2:sm-blind:{i}"), Expect::Union(i)),
        (format!("s1:sm-dec-share:{i}"), Expect::Union(i)),
        (format!("s2:sm-a-share:{i}"), Expect::Union(i)),
        (format!("s1:sm-z-share:{i}"), Expect::Union(i)),
        (format!("s2:sm-witness-b:{ic}:inc:complement"), Expect::Union(ic)),
        (format!("q:sm-signature:{j_of_i}:fake"), Expect::Stage1),
        (format!("q:sm-signature:{j_of_i}"), Expect::Stage1),
        (format!("s2:rsm-shuffle:{j}:fake"), Expect::Union(j)),
        (format!("s1:rsm-blind-s:{j}"), Expect::Union(j)),
        (format!("s2:rsm-blind-c:{j}"), Expect::Union(j)),
        (format!("s1:rsm-blind-r:{j}"), Expect::Union(j)),
        (format!("s2:rsm-dec-share:{j}"), Expect::Union(j)),
        (format!("s1:rsm-z1-share:{j}"), Expect::Union(j)),
        (format!("s2:rsm-delta0:{j}"), Expect::Union(j)),
        (format!("s1:rsm-delta1:{j}"), Expect::Union(j)),
        (format!("s1:rsm-a-share:{j}"), Expect::Union(j)),
        (format!("s2:rsm-z-share:{j}"), Expect::Union(j)),
        (format!("s1:rsm-z-share:{jc}:inc:complement"), Expect::Union(jc)),
        (format!("q:rsm-quasi:{i_of_j}:fake"), Expect::Stage1),
        (format!("q:rsm-quasi:{i_of_j}"), Expect::Stage1),
    ];

    let (mut wrong, mut unsuppressed) = (Vec::new(), Vec::new());
    for (spec, expect) in &cases {
        let d: TamperDirective = spec.parse().map_err(|e| format!("{spec}: {e}"))?;
        let mut cfg = if d.phase.is_sm() { sm_cfg.clone() } else { rsm_cfg.clone() };
        cfg.tamper.0.push(d);
        let out = run(&cfg)?;
        let r = &out.results[0];
        let want = expected(&out, r);
        let requested = match r.kind {
            QueryKind::TraceIn => &r.i_set,
            QueryKind::TraceOut => &r.j_set,
        };
        let want_c: BTreeSet<usize> = requested.difference(&want).copied().collect();
        if !run_accepted(&r.primary).is_subset(&want)
            || r.complement.as_ref().is_some_and(|c| !run_accepted(c).is_subset(&want_c))
        {
            wrong.push(format!("{spec}: a run accepted an index outside the oracle set"));
        }
        if let QueryOutcome::Output(got) = &r.outcome {
            if *got != want {
                wrong.push(format!("{spec}: output {got:?}, oracle {want:?}"));
            }
        }
        let target = match (expect, &r.outcome) {
            (Expect::Union(t), QueryOutcome::Abort(QueryAbort::Union { missing })) if missing.contains(t) => Some(*t),
            (Expect::Stage1, QueryOutcome::Abort(QueryAbort::Stage1 { info, .. })) => Some(info.index),
            _ => None,
        };
        match target {
            Some(t) => corpus.tampered.push((spec.clone(), out.transcript.to_bytes(), t)),
            None => unsuppressed.push(format!("{spec}: outcome {:?}", r.outcome)),
        }
    }
    let detail = format!(
        "{} directives, {} wrong acceptances, {} without the expected abort",
        cases.len(),
        wrong.len(),
        unsuppressed.len()
    );
    if wrong.is_empty() && unsuppressed.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail}; {}", wrong.iter().chain(&unsuppressed).cloned().collect::<Vec<_>>().join("; ")))
    }
}

fn trials(name: &str, rng: &mut ChaCha20Rng, mut f: impl FnMut(&mut ChaCha20Rng) -> bool, failures: &mut Vec<String>) {
    let bad = (0..100).filter(|_| !f(rng)).count();
    if bad > 0 {
        failures.push(format!("{name}: {bad}/100"));
    }
}

fn primitives() -> Outcome {
    let p = setup(b"acceptance-primitives", 3, 8).map_err(|e| e.to_string())?;
    let mut rng = ChaCha20Rng::seed_from_u64(0xC5);
    let mut failures = Vec::new();
    let rs = |rng: &mut ChaCha20Rng| random_scalar(rng);

    trials(
        "pedersen homomorphism",
        &mut rng,
        |rng| {
            let (v1, r1, v2, r2) = (rs(rng), rs(rng), rs(rng), rs(rng));
            commit(&p, &v1, &r1).combine(&commit(&p, &v2, &r2)) == commit(&p, &(v1 + v2), &(r1 + r2))
        },
        &mut failures,
    );

    trials(
        "bb sign/verify",
        &mut rng,
        |rng| {
            let key = bb_keygen(&p, rng);
            let v = rs(rng);
            let Ok(sig) = bb_sign(&p, &key, &v) else { return false };
            bb_verify(&p, &key.y, &v, &sig)
                && pairing(&sig.0, &(key.y + p.g2 * v)) == pairing(&p.g1, &p.g2)
                && !bb_verify(&p, &key.y, &(v + Scalar::from(1u64)), &sig)
        },
        &mut failures,
    );

    trials(
        "bbs+ sign/verify",
        &mut rng,
        |rng| {
            let key = bbsplus_keygen(&p, rng);
            let v = rs(rng);
            let sig = bbsplus_sign(&p, &key, &v, rng);
            bbsplus_verify(&p, &key.y, &v, &sig)
                && pairing(&sig.s, &(key.y + p.f2 * sig.c)) == pairing(&(p.f1 + p.g1 * v + p.h1 * sig.r), &p.f2)
                && !bbsplus_verify(&p, &key.y, &(v + Scalar::from(1u64)), &sig)
        },
        &mut failures,
    );

    trials(
        "quasi to full signature",
        &mut rng,
        |rng| {
            let key = bbsplus_keygen(&p, rng);
            let (v, r) = (rs(rng), rs(rng));
            let full = derive_from_quasi(&quasi_sign(&p, &key, &commit(&p, &v, &r), rng), &r);
            bbsplus_verify(&p, &key.y, &v, &full)
        },
        &mut failures,
    );

    trials(
        "share round trip",
        &mut rng,
        |rng| {
            let m = rng.gen_range(1..=6);
            let x = rs(rng);
            let Ok(sh) = share_mm(&x, m, rng) else { return false };
            sh.0.len() == m && sh.0.iter().copied().sum::<Scalar>() == x && recons(&sh.0).ok() == Some(x)
        },
        &mut failures,
    );

    trials(
        "beaver multiplication",
        &mut rng,
        |rng| {
            let m = rng.gen_range(1..=5);
            let (x, y) = (rs(rng), rs(rng));
            let (Ok(xs), Ok(ys), Ok(mut t)) = (share_mm(&x, m, rng), share_mm(&y, m, rng), deal_triples(m, 1, rng))
            else {
                return false;
            };
            let z = mult(&xs, &ys, t.remove(0), &mut LocalChannel::default());
            z.ok().and_then(|z| z.recons().ok()) == Some(x * y)
        },
        &mut failures,
    );

    let keys = elgamal::keygen(&p, 3, &mut rng);
    let eg = EgScheme::new(&p, keys.pk);
    trials(
        "elgamal homomorphism",
        &mut rng,
        |rng| {
            let (a, b, k) = (p.g1 * rs(rng), p.g1 * rs(rng), rs(rng));
            let (ca, cb) = (eg.enc(&a, rng), eg.enc(&b, rng));
            elgamal::tdec(&elgamal::mul(&ca, &cb), &keys.shares).ok() == Some(a + b)
                && elgamal::tdec(&elgamal::exp(&ca, &k), &keys.shares).ok() == Some(a * k)
                && elgamal::tdec(&eg.renc(&ca, rng), &keys.shares).ok() == Some(a)
        },
        &mut failures,
    );

    let (pk, sks) = paillier::keygen_dealer(2048, 3, &mut rng).map_err(|e| e.to_string())?;
    pk.precompute();
    trials(
        "paillier homomorphism",
        &mut rng,
        |rng| {
            let (x, y) = (paillier::random_below(pk.n(), rng), paillier::random_below(pk.n(), rng));
            let (Ok(cx), Ok(cy)) = (pk.enc(&x, rng), pk.enc(&y, rng)) else { return false };
            let sum = Integer::from(&x + &y) % pk.n();
            pk.tdec(&pk.add(&cx, &cy), &sks).ok() == Some(sum) && pk.tdec(&pk.renc(&cx, rng), &sks).ok() == Some(x)
        },
        &mut failures,
    );

    trials(
        "shuffle multiset preservation",
        &mut rng,
        |rng| {
            let n = rng.gen_range(1..=8);
            let msgs: Vec<G1> = (0..n).map(|_| p.g1 * rs(rng)).collect();
            let cts: Vec<_> = msgs.iter().map(|x| eg.enc(x, rng)).collect();
            let perms: Vec<_> = (0..3).map(|_| Permutation::random(n, rng)).collect();
            let Ok(out) = shuffle(&eg, &cts, &perms, rng) else { return false };
            let dec: Vec<G1> = out.iter().filter_map(|c| elgamal::tdec(c, &keys.shares).ok()).collect();
            let key = |v: &[G1]| {
                let mut b: Vec<Vec<u8>> = v.iter().map(|x| x.to_bytes()).collect();
                b.sort();
                b
            };
            let pi = compose(&perms).unwrap();
            dec.len() == n && key(&dec) == key(&msgs) && (0..n).all(|j| dec[j] == msgs[pi.get(j)])
        },
        &mut failures,
    );

    let q = q_integer().clone();
    let q_minus_1 = Integer::from(&q - 1u32);
    trials(
        "padded blinding mod q",
        &mut rng,
        |rng| {
            let m = rng.gen_range(1..=3);
            let x = rs(rng);
            let Ok(mut ct) = pk.enc(&scalar_to_integer(&x), rng) else { return false };
            let mut want = x;
            for _ in 0..m {
                let b = rs(rng);
                want += b;
                let chi = paillier::random_below(&q_minus_1, rng);
                let Ok(c) = pk.enc(&(scalar_to_integer(&b) + Integer::from(&chi * &q)), rng) else { return false };
                ct = pk.add(&ct, &c);
            }
            let Ok(d) = pk.tdec(&ct, &sks[..]) else { return false };
            let bound = Integer::from(m + 2) * Integer::from(&q * &q);
            d < bound && Integer::from(&d % &q) == scalar_to_integer(&want)
        },
        &mut failures,
    );

    if failures.is_empty() {
        Ok("10 suites x 100 trials, 0 failures".into())
    } else {
        Err(failures.join("; "))
    }
}

fn scaling() -> Outcome {
    let rows = bench(&[256, 512], 2, 6, 2048).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for prefix in ["db-sm.", "db-rsm."] {
        let (a, b) = (total(&rows, 256, prefix), total(&rows, 512, prefix));
        let ratio = b / a;
        ok &= (1.6..=2.6).contains(&ratio);
        parts.push(format!("{}: t(256) = {a:.1} s, t(512) = {b:.1} s, ratio {ratio:.2}", prefix.trim_end_matches('.')));
    }
    let detail = parts.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(format!("{detail}; want ratios in [1.6, 2.6]"))
    }
}

fn reverification(corpus: &Corpus) -> Outcome {
    if corpus.honest.is_empty() || corpus.tampered.is_empty() {
        return Err("criteria 1 to 4 must run first".into());
    }
    let mut problems = Vec::new();
    for (label, bytes) in &corpus.honest {
        match verify_transcript_bytes(bytes) {
            Ok(Verdict::Accept { .. }) => {}
            Ok(v) => problems.push(format!("{label}: {v}")),
            Err(e) => problems.push(format!("{label}: {e}")),
        }
    }
    for (label, bytes, index) in &corpus.tampered {
        match verify_transcript_bytes(bytes) {
            Ok(Verdict::Reject { location, .. }) if location.contains(&format!("index {index}")) => {}
            Ok(v) => problems.push(format!("{label}: {v}")),
            Err(e) => problems.push(format!("{label}: {e}")),
        }
    }
    let detail = format!(
        "{} honest accepted, {} tampered rejected at the tampered index",
        corpus.honest.len(),
        corpus.tampered.len()
    );
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{} problems; first: {}", problems.len(), problems[0]))
    }
}
