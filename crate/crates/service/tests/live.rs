use decoynet::agents::AgentSpec;
use decoynet::equilibrium::UtilitySpec;
use decoynet::session::{run_session, Seat, SessionConfig, SessionType};
use decoynet::{Action, BallBox, PositionId};
use decoynet_service::{LiveOptions, LiveSession, Phase, ServiceError};

fn agent() -> AgentSpec {
    AgentSpec::decoy_susceptible(UtilitySpec::RiskNeutral, 10.0, 5.0).unwrap()
}

/// One group; subjects listed in `humans` are human seats.
fn config(session_type: SessionType, humans: &[usize], rounds: u32) -> SessionConfig {
    let seats = (0..6)
        .map(|s| {
            if humans.contains(&s) {
                Seat::Human
            } else {
                Seat::Agent(agent())
            }
        })
        .collect();
    let mut c = SessionConfig::new(session_type, vec![seats], 42);
    c.rounds_per_part = rounds;
    c
}

fn live(c: SessionConfig, options: LiveOptions) -> LiveSession {
    LiveSession::create(LiveSession::creation_event("t1", c, options, 0).unwrap(), None).unwrap()
}

fn token(s: &LiveSession, subject: usize) -> String {
    s.tokens().iter().find(|t| t.subject == subject).unwrap().token.clone()
}

fn join_all(s: &mut LiveSession) {
    for t in s.tokens().to_vec() {
        s.join(&t.token, 0).unwrap();
    }
}

/// Plays every remaining round with each human choosing NoBuy.
fn play_out(s: &mut LiveSession, at: u64) {
    let tokens = s.tokens().to_vec();
    while !s.is_finished() {
        match s.phase(0) {
            Phase::Collecting { part, round } => {
                for t in &tokens {
                    s.submit(&t.token, Some(part), round, Action::NoBuy, at).unwrap();
                }
            }
            Phase::Feedback { .. } => {
                for t in &tokens {
                    s.continue_round(&t.token, at).unwrap();
                }
            }
            p => panic!("stuck in {p:?}"),
        }
    }
}

#[test]
fn zero_human_session_matches_batch_engine() {
    for st in SessionType::ALL {
        let mut c = config(st, &[], 4);
        c.session_id = "t1".into();
        let s = live(c.clone(), LiveOptions::default());
        assert!(s.is_finished());
        assert_eq!(s.records(), run_session(&c).unwrap());
    }
}

#[test]
fn six_distinct_tokens_for_six_humans() {
    let s = live(
        config(SessionType::IndThenNetBaseline, &[0, 1, 2, 3, 4, 5], 2),
        LiveOptions::default(),
    );
    let mut tokens: Vec<&str> = s.tokens().iter().map(|t| t.token.as_str()).collect();
    assert!(tokens
        .iter()
        .all(|t| t.len() == 32 && t.chars().all(|c| c.is_ascii_hexdigit())));
    tokens.push(s.admin_token());
    tokens.sort();
    tokens.dedup();
    assert_eq!(tokens.len(), 7);
}

#[test]
fn waits_until_every_human_joins() {
    let mut s = live(
        config(SessionType::IndThenNetBaseline, &[0, 3], 2),
        LiveOptions::default(),
    );
    assert_eq!(s.phase(0), Phase::Waiting);
    s.join(&token(&s, 0), 0).unwrap();
    assert_eq!(s.phase(0), Phase::Waiting);
    s.join(&token(&s, 3), 0).unwrap();
    assert_eq!(s.phase(0), Phase::Collecting { part: 1, round: 1 });
}

#[test]
fn degree_three_seat_starts_with_its_box() {
    let mut s = live(config(SessionType::NetThenIndBaseline, &[3], 2), LiveOptions::default());
    join_all(&mut s);
    let v = s.view(&token(&s, 3), 0).unwrap();
    assert_eq!(v.position, PositionId::D);
    assert_eq!(v.degree, 3);
    assert_eq!(v.own_box, BallBox::new(45, 25, 30).unwrap());
    assert!(v.feedback.is_none());
    assert_eq!(
        v.menu.iter().map(|m| m.action).collect::<Vec<_>>(),
        [Action::NoBuy, Action::TokenX]
    );
}

#[test]
fn token_y_rejected_in_baseline() {
    let mut s = live(config(SessionType::IndThenNetBaseline, &[0], 2), LiveOptions::default());
    join_all(&mut s);
    let err = s.submit(&token(&s, 0), None, 1, Action::TokenY, 0).unwrap_err();
    assert!(matches!(err, ServiceError::Inadmissible { .. }), "{err}");
    assert_eq!(err.status(), 400);
}

#[test]
fn duplicate_and_stale_submissions_rejected() {
    let mut s = live(config(SessionType::IndThenNetDecoy, &[0, 1], 2), LiveOptions::default());
    join_all(&mut s);
    let t0 = token(&s, 0);
    assert_eq!(
        s.submit(&t0, None, 1, Action::TokenY, 0).unwrap(),
        Phase::Collecting { part: 1, round: 1 }
    );
    let err = s.submit(&t0, None, 1, Action::NoBuy, 0).unwrap_err();
    assert!(matches!(err, ServiceError::AlreadySubmitted));
    assert_eq!(err.status(), 409);
    let err = s.submit(&token(&s, 1), None, 2, Action::NoBuy, 0).unwrap_err();
    assert!(matches!(err, ServiceError::WrongRound { part: 1, round: 1 }));
    assert!(matches!(
        s.submit("nope", None, 1, Action::NoBuy, 0),
        Err(ServiceError::BadToken)
    ));
}

#[test]
fn last_submission_opens_feedback() {
    let mut s = live(config(SessionType::IndThenNetDecoy, &[0, 1], 2), LiveOptions::default());
    join_all(&mut s);
    s.submit(&token(&s, 0), None, 1, Action::TokenX, 0).unwrap();
    let phase = s.submit(&token(&s, 1), None, 1, Action::NoBuy, 0).unwrap();
    assert_eq!(phase, Phase::Feedback { part: 1, round: 1 });
    let v = s.view(&token(&s, 0), 0).unwrap();
    let fb = v.feedback.unwrap();
    assert_eq!(fb.members[0].action, Action::TokenX);
    assert_eq!(v.history.len(), 1);
    // One acknowledgement is not enough.
    s.continue_round(&token(&s, 0), 0).unwrap();
    assert_eq!(s.phase(0), Phase::Feedback { part: 1, round: 1 });
    s.continue_round(&token(&s, 1), 0).unwrap();
    assert_eq!(s.phase(0), Phase::Collecting { part: 1, round: 2 });
}

#[test]
fn pending_choices_never_leak_to_other_seats() {
    let mut s = live(
        config(SessionType::NetThenIndDecoy, &[0, 1, 2, 3, 4, 5], 3),
        LiveOptions::default(),
    );
    join_all(&mut s);
    for round in 1..=2 {
        let before = serde_json::to_string(&s.view(&token(&s, 0), 0).unwrap()).unwrap();
        for subject in 1..6 {
            s.submit(&token(&s, subject), None, round, Action::TokenX, 0).unwrap();
            let now = serde_json::to_string(&s.view(&token(&s, 0), 0).unwrap()).unwrap();
            assert_eq!(before, now, "seat 0 saw something change after seat {subject} chose");
        }
        s.submit(&token(&s, 0), None, round, Action::NoBuy, 0).unwrap();
        for subject in 0..6 {
            s.continue_round(&token(&s, subject), 0).unwrap();
        }
    }
    // Own history only.
    let v = s.view(&token(&s, 0), 0).unwrap();
    assert!(v.history.iter().all(|h| h.action == Action::NoBuy));
}

#[test]
fn no_feedback_carries_into_a_new_part() {
    let mut s = live(config(SessionType::IndThenNetBaseline, &[0], 1), LiveOptions::default());
    join_all(&mut s);
    let t = token(&s, 0);
    s.submit(&t, None, 1, Action::NoBuy, 0).unwrap();
    assert!(s.view(&t, 0).unwrap().feedback.is_some());
    s.continue_round(&t, 0).unwrap();
    assert_eq!(s.phase(0), Phase::Collecting { part: 2, round: 1 });
    assert!(s.view(&t, 0).unwrap().feedback.is_none());
}

#[test]
fn deadlines_time_out_absent_seats() {
    let options = LiveOptions {
        round_timeout_ms: Some(1000),
        feedback_timeout_ms: Some(500),
    };
    let mut s = live(config(SessionType::IndThenNetDecoy, &[0, 1], 2), options);
    join_all(&mut s);
    s.submit(&token(&s, 0), None, 1, Action::TokenY, 100).unwrap();
    assert!(!s.tick(999).unwrap());
    assert!(s.tick(1000).unwrap());
    assert_eq!(s.phase(0), Phase::Feedback { part: 1, round: 1 });
    let recs = s.records();
    assert!(recs
        .iter()
        .any(|r| r.subject == 1 && r.timed_out && r.action == Action::NoBuy));
    assert!(recs
        .iter()
        .any(|r| r.subject == 0 && !r.timed_out && r.action == Action::TokenY));
    assert!(s.tick(1500).unwrap());
    assert_eq!(s.phase(0), Phase::Collecting { part: 1, round: 2 });
}

#[test]
fn finished_seat_sees_paid_rounds_and_payoff() {
    let mut s = live(config(SessionType::NetThenIndBaseline, &[2], 3), LiveOptions::default());
    join_all(&mut s);
    play_out(&mut s, 0);
    let v = s.view(&token(&s, 2), 0).unwrap();
    assert_eq!(v.phase, Phase::Finished);
    let paid = v.paid_rounds.unwrap();
    let expected: i64 = s
        .records()
        .iter()
        .filter(|r| r.subject == 2 && r.paid)
        .map(|r| r.payoff)
        .sum();
    assert_eq!(v.final_payoff, Some(expected));
    assert!(paid.iter().all(|&r| (1..=3).contains(&r)));
    assert_eq!(s.records().len(), 36);
}

#[test]
fn replaying_the_log_restores_the_session() {
    let dir = tempfile::tempdir().unwrap();
    let options = LiveOptions {
        round_timeout_ms: Some(1000),
        feedback_timeout_ms: None,
    };
    let c = config(SessionType::IndThenNetDecoy, &[0, 4], 3);
    let event = LiveSession::creation_event("rec", c, options, 0).unwrap();
    let mut a = LiveSession::create(event.clone(), Some(dir.path())).unwrap();
    join_all(&mut a);
    let t0 = token(&a, 0);
    let t4 = token(&a, 4);
    a.submit(&t0, None, 1, Action::TokenX, 10).unwrap();
    a.submit(&t4, None, 1, Action::TokenY, 20).unwrap();
    a.continue_round(&t0, 30).unwrap();
    a.continue_round(&t4, 30).unwrap();
    a.submit(&t4, None, 2, Action::NoBuy, 40).unwrap();
    a.tick(2000).unwrap();
    let path = dir.path().join("rec.jsonl");

    // A second create with the same id collides with the log on disk.
    assert!(matches!(
        LiveSession::create(event, Some(dir.path())),
        Err(ServiceError::DuplicateSession(_))
    ));

    let mut b = LiveSession::recover(&path).unwrap();
    assert_eq!(a.records(), b.records());
    assert_eq!(a.phase(0), b.phase(0));
    assert_eq!(
        serde_json::to_value(a.view(&t0, 0).unwrap()).unwrap(),
        serde_json::to_value(b.view(&t0, 0).unwrap()).unwrap()
    );
    drop(a);

    // The recovered session keeps logging; a second recovery sees the rest.
    play_out(&mut b, 3000);
    let c = LiveSession::recover(&path).unwrap();
    assert!(c.is_finished());
    assert_eq!(b.records(), c.records());
}

#[test]
fn invalid_config_is_rejected_up_front() {
    let mut c = config(SessionType::IndThenNetBaseline, &[0], 2);
    c.groups[0].pop();
    let err = LiveSession::creation_event("x", c, LiveOptions::default(), 0).unwrap_err();
    assert_eq!(err.status(), 400);
}
