//! Event-sourced state machine for one live session. Every accepted operation
//! becomes an [`Event`]; replaying the events of a session rebuilds it exactly.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use decoynet::agents::{Menu, MenuItem};
use decoynet::session::{Choice, GroupRun, RoundRecord, SessionConfig};
use decoynet::{Action, BallBox, Colour, PerPosition, PositionId, Treatment};
use serde::{Deserialize, Serialize};

use crate::ServiceError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiveOptions {
    /// Collecting deadline; absent human seats then default to NoBuy.
    #[serde(default)]
    pub round_timeout_ms: Option<u64>,
    /// Feedback deadline; the group then moves on without acknowledgements.
    #[serde(default)]
    pub feedback_timeout_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatToken {
    pub group: usize,
    pub subject: usize,
    pub token: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Created {
        session_id: String,
        config: Box<SessionConfig>,
        options: LiveOptions,
        admin_token: String,
        tokens: Vec<SeatToken>,
        at_ms: u64,
    },
    Joined {
        group: usize,
        subject: usize,
        at_ms: u64,
    },
    Choice {
        group: usize,
        subject: usize,
        part: u8,
        round: u32,
        action: Action,
        at_ms: u64,
    },
    RoundTimeout {
        group: usize,
        part: u8,
        round: u32,
        at_ms: u64,
    },
    Continued {
        group: usize,
        subject: usize,
        part: u8,
        round: u32,
        at_ms: u64,
    },
    FeedbackTimeout {
        group: usize,
        part: u8,
        round: u32,
        at_ms: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    Waiting,
    Collecting { part: u8, round: u32 },
    Feedback { part: u8, round: u32 },
    Finished,
}

impl Phase {
    fn name(&self) -> &'static str {
        match self {
            Phase::Waiting => "waiting",
            Phase::Collecting { .. } => "collecting",
            Phase::Feedback { .. } => "feedback",
            Phase::Finished => "finished",
        }
    }
}

#[derive(Debug, Clone)]
struct LiveGroup {
    run: GroupRun,
    phase: Phase,
    since_ms: u64,
    /// Choices for the round being collected, by position.
    pending: [Option<Choice>; 6],
    joined: [bool; 6],
    acknowledged: [bool; 6],
}

impl LiveGroup {
    fn humans(&self) -> impl Iterator<Item = usize> + '_ {
        (0..6).filter(|&s| self.run.seat(s).is_human())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberFeedback {
    pub position: PositionId,
    pub action: Action,
    pub loss_probability: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeedbackView {
    pub part: u8,
    pub round: u32,
    pub members: Vec<MemberFeedback>,
    pub own_box: BallBox,
    pub own_draw: Colour,
    pub own_payoff: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub part: u8,
    pub round: u32,
    pub treatment: Treatment,
    pub action: Action,
    pub loss_probability: f64,
    pub draw: Colour,
    pub payoff: i64,
    pub timed_out: bool,
}

/// What one seat is allowed to see.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeatView {
    pub session_id: String,
    pub group: usize,
    pub subject: usize,
    pub phase: Phase,
    pub part: u8,
    pub round: u32,
    pub rounds_per_part: u32,
    pub treatment: Treatment,
    pub position: PositionId,
    pub degree: u32,
    /// Box before any purchase this round.
    pub own_box: BallBox,
    pub loss_probability: f64,
    pub menu: Vec<MenuItem>,
    pub joined: bool,
    pub submitted: bool,
    pub acknowledged: bool,
    pub deadline_ms: Option<u64>,
    pub feedback: Option<FeedbackView>,
    pub history: Vec<HistoryEntry>,
    pub paid_rounds: Option<[u32; 2]>,
    pub final_payoff: Option<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: usize,
    pub phase: Phase,
    pub human_seats: usize,
    pub joined: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub session_type: String,
    pub finished: bool,
    pub groups: Vec<GroupSummary>,
}

#[derive(Debug)]
pub struct LiveSession {
    session_id: String,
    config: SessionConfig,
    options: LiveOptions,
    admin_token: String,
    tokens: Vec<SeatToken>,
    groups: Vec<LiveGroup>,
    sink: Option<File>,
}

pub fn new_token() -> String {
    format!("{:032x}", rand::random::<u128>())
}

impl LiveSession {
    /// Validates the config and builds the creation event with fresh tokens.
    pub fn creation_event(
        session_id: &str,
        mut config: SessionConfig,
        options: LiveOptions,
        at_ms: u64,
    ) -> Result<Event, ServiceError> {
        config.session_id = session_id.to_string();
        config
            .validate()
            .map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        for g in 0..config.groups.len() {
            GroupRun::new(&config, g).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        }
        let tokens = config
            .human_seats()
            .map(|(group, subject)| SeatToken {
                group,
                subject,
                token: new_token(),
            })
            .collect();
        Ok(Event::Created {
            session_id: session_id.to_string(),
            config: Box::new(config),
            options,
            admin_token: new_token(),
            tokens,
            at_ms,
        })
    }

    pub fn from_created(event: &Event) -> Result<Self, ServiceError> {
        let Event::Created {
            session_id,
            config,
            options,
            admin_token,
            tokens,
            at_ms,
        } = event
        else {
            return Err(ServiceError::Log(
                "event log does not start with a creation event".into(),
            ));
        };
        let mut groups = Vec::with_capacity(config.groups.len());
        for g in 0..config.groups.len() {
            let run = GroupRun::new(config, g)?;
            groups.push(LiveGroup {
                run,
                phase: Phase::Waiting,
                since_ms: *at_ms,
                pending: [None; 6],
                joined: [false; 6],
                acknowledged: [false; 6],
            });
        }
        let mut s = LiveSession {
            session_id: session_id.clone(),
            config: (**config).clone(),
            options: *options,
            admin_token: admin_token.clone(),
            tokens: tokens.clone(),
            groups,
            sink: None,
        };
        for g in 0..s.groups.len() {
            s.maybe_start(g, *at_ms)?;
        }
        Ok(s)
    }

    /// New session, persisted under `dir` when given.
    pub fn create(event: Event, dir: Option<&Path>) -> Result<Self, ServiceError> {
        let mut s = Self::from_created(&event)?;
        if let Some(dir) = dir {
            let path = dir.join(format!("{}.jsonl", s.session_id));
            let file = OpenOptions::new()
                .create_new(true)
                .append(true)
                .open(&path)
                .map_err(|e| {
                    if e.kind() == std::io::ErrorKind::AlreadyExists {
                        ServiceError::DuplicateSession(s.session_id.clone())
                    } else {
                        ServiceError::Io(e)
                    }
                })?;
            s.sink = Some(file);
            s.persist(&event)?;
        }
        Ok(s)
    }

    /// Rebuilds a session from its event log and keeps appending to it.
    pub fn recover(path: &Path) -> Result<Self, ServiceError> {
        let reader = BufReader::new(File::open(path)?);
        let mut session: Option<LiveSession> = None;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let event: Event = serde_json::from_str(&line)
                .map_err(|e| ServiceError::Log(format!("{}:{}: {e}", path.display(), i + 1)))?;
            match session.as_mut() {
                None => session = Some(Self::from_created(&event)?),
                Some(s) => s.apply(&event)?,
            }
        }
        let mut s = session.ok_or_else(|| ServiceError::Log(format!("{} is empty", path.display())))?;
        s.sink = Some(OpenOptions::new().append(true).open(path)?);
        Ok(s)
    }

    fn persist(&mut self, event: &Event) -> Result<(), ServiceError> {
        if let Some(f) = self.sink.as_mut() {
            let mut line = serde_json::to_string(event).map_err(|e| ServiceError::Log(e.to_string()))?;
            line.push('\n');
            f.write_all(line.as_bytes())?;
            f.flush()?;
        }
        Ok(())
    }

    fn commit(&mut self, event: Event) -> Result<(), ServiceError> {
        self.apply(&event)?;
        self.persist(&event)
    }

    pub fn id(&self) -> &str {
        &self.session_id
    }

    pub fn tokens(&self) -> &[SeatToken] {
        &self.tokens
    }

    pub fn admin_token(&self) -> &str {
        &self.admin_token
    }

    pub fn is_admin(&self, token: &str) -> bool {
        constant_time_eq(token, &self.admin_token)
    }

    pub fn is_finished(&self) -> bool {
        self.groups.iter().all(|g| g.phase == Phase::Finished)
    }

    pub fn seat_for(&self, token: &str) -> Result<(usize, usize), ServiceError> {
        self.tokens
            .iter()
            .find(|t| constant_time_eq(&t.token, token))
            .map(|t| (t.group, t.subject))
            .ok_or(ServiceError::BadToken)
    }

    pub fn phase(&self, group: usize) -> Phase {
        self.groups[group].phase
    }

    /// Completed-round records in group order.
    pub fn records(&self) -> Vec<RoundRecord> {
        self.groups
            .iter()
            .flat_map(|g| g.run.records().iter().cloned())
            .collect()
    }

    pub fn join(&mut self, token: &str, at_ms: u64) -> Result<SeatView, ServiceError> {
        let (group, subject) = self.seat_for(token)?;
        if !self.groups[group].joined[subject] {
            self.commit(Event::Joined { group, subject, at_ms })?;
        }
        self.view(token, at_ms)
    }

    pub fn submit(
        &mut self,
        token: &str,
        part: Option<u8>,
        round: u32,
        action: Action,
        at_ms: u64,
    ) -> Result<Phase, ServiceError> {
        let (group, subject) = self.seat_for(token)?;
        let g = &self.groups[group];
        let Phase::Collecting {
            part: cur_part,
            round: cur_round,
        } = g.phase
        else {
            return Err(ServiceError::WrongPhase {
                expected: "collecting",
                actual: g.phase.name(),
            });
        };
        if round != cur_round || part.is_some_and(|p| p != cur_part) {
            return Err(ServiceError::WrongRound {
                part: cur_part,
                round: cur_round,
            });
        }
        let treatment = g.run.game().treatment;
        if !treatment.admits(action) {
            return Err(ServiceError::Inadmissible { action, treatment });
        }
        if g.pending[g.run.position_of(subject).index()].is_some() {
            return Err(ServiceError::AlreadySubmitted);
        }
        self.commit(Event::Choice {
            group,
            subject,
            part: cur_part,
            round: cur_round,
            action,
            at_ms,
        })?;
        Ok(self.groups[group].phase)
    }

    pub fn continue_round(&mut self, token: &str, at_ms: u64) -> Result<SeatView, ServiceError> {
        let (group, subject) = self.seat_for(token)?;
        let g = &self.groups[group];
        let Phase::Feedback { part, round } = g.phase else {
            return Err(ServiceError::WrongPhase {
                expected: "feedback",
                actual: g.phase.name(),
            });
        };
        if !g.acknowledged[subject] {
            self.commit(Event::Continued {
                group,
                subject,
                part,
                round,
                at_ms,
            })?;
        }
        self.view(token, at_ms)
    }

    /// Applies any expired deadlines. Returns whether anything changed.
    pub fn tick(&mut self, now_ms: u64) -> Result<bool, ServiceError> {
        let mut changed = false;
        for group in 0..self.groups.len() {
            let g = &self.groups[group];
            let event = match (g.phase, self.options) {
                (
                    Phase::Collecting { part, round },
                    LiveOptions {
                        round_timeout_ms: Some(t),
                        ..
                    },
                ) if now_ms >= g.since_ms + t => Some(Event::RoundTimeout {
                    group,
                    part,
                    round,
                    at_ms: now_ms,
                }),
                (
                    Phase::Feedback { part, round },
                    LiveOptions {
                        feedback_timeout_ms: Some(t),
                        ..
                    },
                ) if now_ms >= g.since_ms + t => Some(Event::FeedbackTimeout {
                    group,
                    part,
                    round,
                    at_ms: now_ms,
                }),
                _ => None,
            };
            if let Some(e) = event {
                self.commit(e)?;
                changed = true;
            }
        }
        Ok(changed)
    }

    fn apply(&mut self, event: &Event) -> Result<(), ServiceError> {
        match *event {
            Event::Created { .. } => Err(ServiceError::Log("duplicate creation event".into())),
            Event::Joined { group, subject, at_ms } => {
                self.group_mut(group)?.joined[subject] = true;
                self.maybe_start(group, at_ms)
            }
            Event::Choice {
                group,
                subject,
                part,
                round,
                action,
                at_ms,
            } => {
                let g = self.group_mut(group)?;
                if g.phase != (Phase::Collecting { part, round }) {
                    return Err(ServiceError::Log(format!(
                        "choice for part {part} round {round} out of phase"
                    )));
                }
                let p = g.run.position_of(subject);
                g.pending[p.index()] = Some(Choice::Made(action));
                if g.pending.iter().all(Option::is_some) {
                    self.resolve(group, at_ms)?;
                }
                Ok(())
            }
            Event::RoundTimeout {
                group,
                part,
                round,
                at_ms,
            } => {
                let g = self.group_mut(group)?;
                if g.phase != (Phase::Collecting { part, round }) {
                    return Err(ServiceError::Log("round timeout out of phase".into()));
                }
                for c in g.pending.iter_mut().filter(|c| c.is_none()) {
                    *c = Some(Choice::TimedOut);
                }
                self.resolve(group, at_ms)
            }
            Event::Continued {
                group,
                subject,
                part,
                round,
                at_ms,
            } => {
                let g = self.group_mut(group)?;
                if g.phase != (Phase::Feedback { part, round }) {
                    return Err(ServiceError::Log("continue out of phase".into()));
                }
                g.acknowledged[subject] = true;
                let humans: Vec<usize> = g.humans().collect();
                if humans.iter().all(|&s| g.acknowledged[s]) {
                    self.start_round(group, at_ms)?;
                }
                Ok(())
            }
            Event::FeedbackTimeout {
                group,
                part,
                round,
                at_ms,
            } => {
                let g = self.group_mut(group)?;
                if g.phase != (Phase::Feedback { part, round }) {
                    return Err(ServiceError::Log("feedback timeout out of phase".into()));
                }
                self.start_round(group, at_ms)
            }
        }
    }

    fn group_mut(&mut self, group: usize) -> Result<&mut LiveGroup, ServiceError> {
        self.groups
            .get_mut(group)
            .ok_or_else(|| ServiceError::Log(format!("no group {group}")))
    }

    fn maybe_start(&mut self, group: usize, at_ms: u64) -> Result<(), ServiceError> {
        let g = &self.groups[group];
        if g.phase == Phase::Waiting && g.humans().all(|s| g.joined[s]) {
            self.start_round(group, at_ms)?;
        }
        Ok(())
    }

    /// Opens the next round, pre-filling agent choices. Groups without humans
    /// run straight through.
    fn start_round(&mut self, group: usize, at_ms: u64) -> Result<(), ServiceError> {
        let g = &mut self.groups[group];
        let Some((part, round)) = g.run.current() else {
            g.phase = Phase::Finished;
            g.since_ms = at_ms;
            return Ok(());
        };
        let agents = g.run.agent_choices()?;
        g.pending = agents.0.map(|a| a.map(Choice::Made));
        g.acknowledged = [false; 6];
        g.phase = Phase::Collecting { part, round };
        g.since_ms = at_ms;
        if g.pending.iter().all(Option::is_some) {
            self.resolve(group, at_ms)?;
        }
        Ok(())
    }

    fn resolve(&mut self, group: usize, at_ms: u64) -> Result<(), ServiceError> {
        let g = &mut self.groups[group];
        let choices = PerPosition(g.pending.map(|c| c.expect("all seats decided")));
        let (part, round) = g.run.current().expect("collecting implies unfinished");
        g.run.play(choices)?;
        g.pending = [None; 6];
        g.since_ms = at_ms;
        if g.run.is_finished() {
            g.phase = Phase::Finished;
        } else if g.humans().next().is_none() {
            return self.start_round(group, at_ms);
        } else {
            g.phase = Phase::Feedback { part, round };
        }
        Ok(())
    }

    pub fn view(&self, token: &str, _now_ms: u64) -> Result<SeatView, ServiceError> {
        let (group, subject) = self.seat_for(token)?;
        let g = &self.groups[group];
        let run = &g.run;

        // Part and round on display: the one being collected, or the one just played.
        let (part, round) = match g.phase {
            Phase::Collecting { part, round } | Phase::Feedback { part, round } => (part, round),
            Phase::Waiting => (1, 1),
            Phase::Finished => (2, run.rounds_per_part()),
        };
        let game = run.game_for_part(part);
        let position = run.position_in_part(part, subject);
        let degree = game.degree(position);
        let own_box = game.params.initial_box(degree);
        let menu = Menu::for_treatment(game.treatment, &game.params, degree).items;

        // The round just played; while collecting, only if it belongs to this part.
        let shown = match g.phase {
            Phase::Feedback { .. } | Phase::Finished => run.last_outcome(),
            Phase::Collecting { .. } => run.previous().and(run.last_outcome()),
            Phase::Waiting => None,
        };
        let feedback = shown.map(|o| {
            let pos = run.position_in_part(o.part, subject);
            FeedbackView {
                part: o.part,
                round: o.round,
                members: PositionId::ALL
                    .iter()
                    .map(|&p| MemberFeedback {
                        position: p,
                        action: o.profile.get(p),
                        loss_probability: o.feedback.loss_probabilities[p],
                    })
                    .collect(),
                own_box: o.boxes[pos],
                own_draw: o.draws[pos].draw,
                own_payoff: o.draws[pos].payoff,
            }
        });
        let history = run
            .records()
            .iter()
            .filter(|r| r.subject as usize == subject)
            .map(|r| HistoryEntry {
                part: r.part,
                round: r.round,
                treatment: r.treatment,
                action: r.action,
                loss_probability: r.loss_probability,
                draw: r.draw,
                payoff: r.payoff,
                timed_out: r.timed_out,
            })
            .collect();
        let deadline_ms = match g.phase {
            Phase::Collecting { .. } => self.options.round_timeout_ms.map(|t| g.since_ms + t),
            Phase::Feedback { .. } => self.options.feedback_timeout_ms.map(|t| g.since_ms + t),
            _ => None,
        };
        Ok(SeatView {
            session_id: self.session_id.clone(),
            group,
            subject,
            phase: g.phase,
            part,
            round,
            rounds_per_part: run.rounds_per_part(),
            treatment: game.treatment,
            position,
            degree: degree.into(),
            own_box,
            loss_probability: own_box.loss_probability::<f64>(),
            menu,
            joined: g.joined[subject],
            submitted: matches!(g.phase, Phase::Collecting { .. }) && g.pending[position.index()].is_some(),
            acknowledged: g.acknowledged[subject],
            deadline_ms,
            feedback,
            history,
            paid_rounds: run.paid_rounds(),
            final_payoff: run.final_payoffs().map(|p| p[subject]),
        })
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session_id: self.session_id.clone(),
            session_type: self.config.session_type.label().to_string(),
            finished: self.is_finished(),
            groups: self
                .groups
                .iter()
                .enumerate()
                .map(|(i, g)| GroupSummary {
                    group: i,
                    phase: g.phase,
                    human_seats: g.humans().count(),
                    joined: g.humans().filter(|&s| g.joined[s]).count(),
                })
                .collect(),
        }
    }
}

fn constant_time_eq(a: &str, b: &str) -> bool {
    a.len() == b.len() && a.bytes().zip(b.bytes()).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}
