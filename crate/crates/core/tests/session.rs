use std::collections::BTreeSet;

use tracemix_core::harness::oracle;
use tracemix_core::harness::transcript::{Transcript, Verdict};
use tracemix_core::harness::{run_session, verify_transcript, verify_transcript_bytes, SessionConfig};
use tracemix_core::mixnet::{QueryAbort, QueryKind, QueryOutcome};
use tracemix_core::runtime::{Mutation, Role, TamperDirective, TamperPhase, TamperSet};

fn config(n: usize, m: usize, seed: u64) -> SessionConfig {
    let mut cfg = SessionConfig::new(n, m, seed)
        .with_query(QueryKind::TraceIn, (0..n).collect(), (0..n / 2).collect())
        .with_query(QueryKind::TraceOut, (0..n / 2).collect(), (0..n).collect());
    cfg.paillier_bits = 1024;
    cfg
}

#[test]
fn honest_session_matches_oracle_and_verifies() {
    let out = run_session(&config(8, 2, 11)).unwrap();
    let v_out = &out.mix.v_out;
    for r in &out.results {
        let want = match r.kind {
            QueryKind::TraceIn => oracle::trace_in(&out.values, v_out, &r.i_set, &r.j_set),
            QueryKind::TraceOut => oracle::trace_out(&out.values, v_out, &r.i_set, &r.j_set),
        };
        assert_eq!(r.outcome, QueryOutcome::Output(want));
    }
    let bytes = out.transcript.to_bytes();
    assert_eq!(Transcript::from_bytes(&bytes).unwrap(), out.transcript);
    assert_eq!(verify_transcript_bytes(&bytes).unwrap(), Verdict::Accept { queries: 2 });
}

#[test]
fn same_seed_same_bytes() {
    let a = run_session(&config(4, 2, 3)).unwrap().transcript.to_bytes();
    let b = run_session(&config(4, 2, 3)).unwrap().transcript.to_bytes();
    assert_eq!(a, b);
    let c = run_session(&config(4, 2, 4)).unwrap().transcript.to_bytes();
    assert_ne!(a, c);
}

#[test]
fn member_blind_tamper_forces_union_abort() {
    let mut cfg = config(6, 2, 21);
    cfg.queries.truncate(1);
    // Find a member of I* first, then tamper with its blinding.
    let honest = run_session(&cfg).unwrap();
    let member = *honest.results[0].outcome.output().unwrap().iter().next().unwrap();
    cfg.tamper = TamperSet(vec![TamperDirective::new(Role::Server(1), TamperPhase::SmBlind, member)]);
    let out = run_session(&cfg).unwrap();
    match &out.results[0].outcome {
        QueryOutcome::Abort(QueryAbort::Union { missing }) => assert_eq!(missing, &BTreeSet::from([member])),
        other => panic!("expected a union abort, got {other:?}"),
    }
    match verify_transcript(&out.transcript) {
        Verdict::Reject { location, .. } => assert!(location.contains(&format!("index {member}")), "{location}"),
        v => panic!("{v}"),
    }
}

#[test]
fn querier_signature_tamper_aborts_before_shuffle() {
    let mut cfg = config(4, 2, 5);
    cfg.queries.truncate(1);
    cfg.tamper =
        TamperSet(vec![TamperDirective::new(Role::Querier, TamperPhase::SmSignature, 0).with_mutation(Mutation::Fake)]);
    let out = run_session(&cfg).unwrap();
    let r = &out.results[0];
    assert!(matches!(r.outcome, QueryOutcome::Abort(QueryAbort::Stage1 { .. })));
    assert!(r.complement.is_none());
    assert!(!verify_transcript(&out.transcript).is_accept());
}

#[test]
fn flipped_z_share_byte_is_located() {
    let out = run_session(&config(4, 2, 8)).unwrap();
    let mut t = out.transcript.clone();
    let tracemix_core::mixnet::RunRecord::Sm(rec) = &mut t.queries[0].primary else { panic!() };
    let proof = rec.proofs.iter_mut().find(|p| p.accepted).expect("some member");
    let index = proof.index;
    proof.transcript.z_shares[1][0] += tracemix_core::Scalar::from(1u64);
    match verify_transcript(&t) {
        Verdict::Reject { location, reason } => {
            assert!(location.contains(&format!("index {index}")), "{location}");
            assert!(reason.contains("does not verify"), "{reason}");
        }
        v => panic!("{v}"),
    }
}

#[test]
fn truncated_file_is_a_parse_error() {
    let bytes = run_session(&config(4, 1, 2)).unwrap().transcript.to_bytes();
    let err = verify_transcript_bytes(&bytes[..bytes.len() - 7]).unwrap_err();
    assert!(err.to_string().contains("byte"), "{err}");
    assert!(verify_transcript_bytes(b"nope").is_err());
}

#[test]
fn output_path_round_trips_through_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.tmxt");
    let mut cfg = config(4, 2, 6);
    cfg.output = Some(path.clone());
    let out = run_session(&cfg).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), out.transcript.to_bytes());
    assert!(tracemix_core::harness::verify_transcript_file(&path).unwrap().is_accept());
}
