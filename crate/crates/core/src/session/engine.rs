use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{seeds, RoundRecord, Seat, SessionConfig, SessionError};
use crate::agents::{decide, Observation, RoundFeedback};
use crate::game::{Action, ActionProfile, BallBox, Game, PerPosition, PositionId, RoundDraw, Treatment};

/// A seat's input for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    Made(Action),
    /// No choice before the deadline; recorded as NoBuy.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub part: u8,
    pub round: u32,
    pub profile: ActionProfile,
    pub boxes: PerPosition<BallBox>,
    pub draws: PerPosition<RoundDraw>,
    pub feedback: RoundFeedback,
}

/// Step-by-step protocol for one group: two parts of `rounds_per_part`
/// rounds, feedback after each round, one paid round per part.
#[derive(Debug, Clone)]
pub struct GroupRun {
    session_id: String,
    group: usize,
    games: [Game; 2],
    seats: Vec<Seat>,
    /// Subject sitting at each position, per part.
    seating: [[usize; 6]; 2],
    rounds_per_part: u32,
    group_seed: u64,
    paid_rounds: [u32; 2],
    part: u8,
    round: u32,
    finished: bool,
    previous: Option<RoundFeedback>,
    last: Option<RoundOutcome>,
    records: Vec<RoundRecord>,
}

impl GroupRun {
    pub fn new(config: &SessionConfig, group: usize) -> Result<Self, SessionError> {
        config.validate()?;
        let seats = config
            .groups
            .get(group)
            .ok_or_else(|| SessionError::Config(format!("no group {group}")))?
            .clone();
        let [t1, t2] = config.session_type.treatments();
        let game = |t: Treatment| Game::new(config.topology.clone(), config.params.clone(), t);
        let games = [game(t1)?, game(t2)?];
        let group_seed = seeds::group_seed(config.seed, group);

        let identity = [0, 1, 2, 3, 4, 5];
        let mut second = identity;
        if config.reshuffle_positions {
            second.shuffle(&mut seeds::rng(seeds::seating_seed(group_seed, 2)));
        }
        let paid = |part: u8| seeds::rng(seeds::paid_seed(group_seed, part)).random_range(1..=config.rounds_per_part);

        Ok(GroupRun {
            session_id: config.session_id.clone(),
            group,
            games,
            seats,
            seating: [identity, second],
            rounds_per_part: config.rounds_per_part,
            group_seed,
            paid_rounds: [paid(1), paid(2)],
            part: 1,
            round: 1,
            finished: false,
            previous: None,
            last: None,
            records: Vec::with_capacity(12 * config.rounds_per_part as usize),
        })
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// Part and round currently being collected.
    pub fn current(&self) -> Option<(u8, u32)> {
        (!self.finished).then_some((self.part, self.round))
    }

    pub fn rounds_per_part(&self) -> u32 {
        self.rounds_per_part
    }

    pub fn game(&self) -> &Game {
        &self.games[self.part_index()]
    }

    pub fn game_for_part(&self, part: u8) -> &Game {
        &self.games[(part.clamp(1, 2) - 1) as usize]
    }

    fn part_index(&self) -> usize {
        (self.part - 1) as usize
    }

    pub fn subject_at(&self, p: PositionId) -> usize {
        self.seating[self.part_index()][p.index()]
    }

    pub fn position_of(&self, subject: usize) -> PositionId {
        self.position_in_part(self.part, subject)
    }

    /// Position of `subject` during `part`.
    pub fn position_in_part(&self, part: u8, subject: usize) -> PositionId {
        let row = &self.seating[(part.clamp(1, 2) - 1) as usize];
        let i = row.iter().position(|&s| s == subject).expect("every subject is seated");
        PositionId::ALL[i]
    }

    pub fn seat(&self, subject: usize) -> &Seat {
        &self.seats[subject]
    }

    /// Feedback for the round just played, if any in the current part.
    pub fn previous(&self) -> Option<&RoundFeedback> {
        self.previous.as_ref()
    }

    pub fn last_outcome(&self) -> Option<&RoundOutcome> {
        self.last.as_ref()
    }

    pub fn observation(&self, p: PositionId) -> Observation {
        Observation::new(self.game(), p, self.part, self.round, self.previous.clone())
    }

    /// Decisions of all agent seats for the current round.
    pub fn agent_choices(&self) -> Result<PerPosition<Option<Action>>, SessionError> {
        if self.finished {
            return Err(SessionError::Finished);
        }
        let rs = seeds::round_seed(self.group_seed, self.part, self.round);
        let mut out = PerPosition([None; 6]);
        for p in PositionId::ALL {
            if let Seat::Agent(spec) = &self.seats[self.subject_at(p)] {
                let mut rng = seeds::rng(seeds::decision_seed(rs, p.index(), spec.seed));
                out[p] = Some(decide(spec, self.game(), &self.observation(p), &mut rng)?);
            }
        }
        Ok(out)
    }

    /// Resolves the current round from a complete set of choices.
    pub fn play(&mut self, choices: PerPosition<Choice>) -> Result<&RoundOutcome, SessionError> {
        if self.finished {
            return Err(SessionError::Finished);
        }
        let game = &self.games[self.part_index()];
        let profile = ActionProfile(choices.0.map(|c| match c {
            Choice::Made(a) => a,
            Choice::TimedOut => Action::NoBuy,
        }));
        let boxes = game.apply_profile(&profile)?;
        let rs = seeds::round_seed(self.group_seed, self.part, self.round);
        let mut streams = PerPosition::from_fn(|p| seeds::rng(seeds::draw_seed(rs, p.index())));
        let draws = game.realize_round_streams(&boxes, &profile, &mut streams);
        let loss = boxes.map(|_, b| b.loss_probability::<f64>());

        for p in PositionId::ALL {
            self.records.push(RoundRecord {
                session_id: self.session_id.clone(),
                group: self.group as u32,
                subject: self.seating[self.part_index()][p.index()] as u32,
                part: self.part,
                treatment: game.treatment,
                round: self.round,
                position: p,
                degree: game.degree(p).get(),
                action: profile.get(p),
                loss_probability: loss[p],
                draw: draws[p].draw,
                payoff: draws[p].payoff,
                paid: false,
                timed_out: choices[p] == Choice::TimedOut,
            });
        }

        let feedback = RoundFeedback {
            profile,
            loss_probabilities: loss,
        };
        self.last = Some(RoundOutcome {
            part: self.part,
            round: self.round,
            profile,
            boxes,
            draws,
            feedback: feedback.clone(),
        });

        if self.round < self.rounds_per_part {
            self.round += 1;
            self.previous = Some(feedback);
        } else if self.part == 1 {
            self.part = 2;
            self.round = 1;
            self.previous = None;
        } else {
            self.finished = true;
            self.previous = Some(feedback);
            let paid = self.paid_rounds;
            for r in &mut self.records {
                r.paid = r.round == paid[(r.part - 1) as usize];
            }
        }
        Ok(self.last.as_ref().expect("just set"))
    }

    /// Plays one round in which every seat is an agent.
    pub fn step_agents(&mut self) -> Result<&RoundOutcome, SessionError> {
        let agent = self.agent_choices()?;
        let mut choices = PerPosition([Choice::TimedOut; 6]);
        for p in PositionId::ALL {
            choices[p] = Choice::Made(agent[p].ok_or(SessionError::HumanSeat {
                group: self.group,
                subject: self.subject_at(p),
            })?);
        }
        self.play(choices)
    }

    pub fn run_to_end(&mut self) -> Result<(), SessionError> {
        while !self.finished {
            self.step_agents()?;
        }
        Ok(())
    }

    /// Paid round of each part, revealed once the session is over.
    pub fn paid_rounds(&self) -> Option<[u32; 2]> {
        self.finished.then_some(self.paid_rounds)
    }

    /// Sum of the paid-round payoffs per subject.
    pub fn final_payoffs(&self) -> Option<Vec<i64>> {
        if !self.finished {
            return None;
        }
        let mut out = vec![0; self.seats.len()];
        for r in self.records.iter().filter(|r| r.paid) {
            out[r.subject as usize] += r.payoff;
        }
        Some(out)
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<RoundRecord> {
        self.records
    }
}
