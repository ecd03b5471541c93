//! Exhaustive and property checks of the box mechanics against a separately
//! written rule oracle.

use decoynet::equilibrium::enumerate_profiles;
use decoynet::{Action, ActionProfile, Game, GameParameters, PositionId, Topology, Treatment};
use proptest::prelude::*;

/// Plain re-statement of the rules over arrays: (red, brown, green) per seat.
fn oracle(edges: &[(usize, usize)], t: Treatment, prof: &[char; 6]) -> [(i32, i32, i32); 6] {
    let mut deg = [0; 6];
    let mut adj = [[false; 6]; 6];
    for &(a, b) in edges {
        deg[a] += 1;
        deg[b] += 1;
        adj[a][b] = true;
        adj[b][a] = true;
    }
    let start = |d: usize| match d {
        1 => (15, 25, 60),
        2 => (30, 25, 45),
        _ => (45, 25, 30),
    };
    let mut out = [(0, 0, 0); 6];
    for p in 0..6 {
        let (mut r, mut b, mut g) = start(deg[p]);
        let own = match prof[p] {
            'X' => 10 * deg[p] as i32,
            'Y' => 8 * deg[p] as i32,
            _ => 0,
        };
        let mut red_conv = own;
        let mut brown_conv = 0;
        if t.externalities {
            let others_buying = (0..6).filter(|&q| q != p && prof[q] != 'N').count() as i32;
            brown_conv = 5 * others_buying;
            for q in (0..6).filter(|&q| adj[p][q]) {
                red_conv += match (prof[p], prof[q]) {
                    ('N', 'X') => 10,
                    ('N', 'Y') => 8,
                    ('Y', 'X') if t.decoy => 2,
                    _ => 0,
                };
            }
        }
        assert!(red_conv <= r && brown_conv <= b, "oracle assumes no clamping");
        r -= red_conv;
        b -= brown_conv;
        g += red_conv + brown_conv;
        out[p] = (r, b, g);
    }
    out
}

fn codes(p: &ActionProfile) -> [char; 6] {
    p.0.map(|a| a.code())
}

fn edge_list(t: &Topology) -> Vec<(usize, usize)> {
    t.edges()
        .map(|e| {
            let (a, b) = e.endpoints();
            (a.index(), b.index())
        })
        .collect()
}

#[test]
fn engine_matches_oracle_on_every_topology_and_profile() {
    let topologies = Topology::enumerate_admissible();
    assert!(topologies.contains(&Topology::default()));
    for topo in &topologies {
        let edges = edge_list(topo);
        for t in Treatment::ALL {
            let game = Game::new(topo.clone(), GameParameters::default(), t).unwrap();
            for prof in enumerate_profiles(t) {
                let out = game.apply_profile_traced(&prof).unwrap();
                assert!(!out.clamped(), "clamping bound for {prof} in {t} on {topo:?}");
                let ours: Vec<_> = out
                    .boxes
                    .values()
                    .iter()
                    .map(|b| (b.red() as i32, b.brown() as i32, b.green() as i32))
                    .collect();
                assert_eq!(ours, oracle(&edges, t, &codes(&prof)).to_vec(), "{prof} {t}");
            }
        }
    }
}

#[test]
fn exhaustive_box_invariants() {
    for t in Treatment::ALL {
        let game = Game::standard(t);
        let init = game.initial_boxes();
        for prof in enumerate_profiles(t) {
            let boxes = game.apply_profile(&prof).unwrap();
            for p in PositionId::ALL {
                let b = boxes[p];
                assert_eq!(b.red() + b.brown() + b.green(), 100);
                assert!(b.green() >= init[p].green());
                if !t.externalities && prof.get(p) == Action::NoBuy {
                    assert_eq!(b, init[p]);
                }
            }
        }
    }
}

#[test]
fn extra_purchase_never_raises_others_risk() {
    for t in Treatment::ALL {
        let game = Game::standard(t);
        for prof in enumerate_profiles(t) {
            let before = game.apply_profile(&prof).unwrap();
            for q in PositionId::ALL.into_iter().filter(|&q| prof.get(q) == Action::NoBuy) {
                for &tok in &t.menu()[1..] {
                    let after = game.apply_profile(&prof.with(q, tok)).unwrap();
                    for p in PositionId::ALL.into_iter().filter(|&p| p != q) {
                        assert!(
                            after[p].loss_probability::<f64>() <= before[p].loss_probability::<f64>(),
                            "{t}: {q} buying {tok} in {prof} hurts {p}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn x_statewise_dominates_y_when_isolated() {
    let game = Game::standard(Treatment::DEC_IND);
    for prof in enumerate_profiles(Treatment::DEC_IND) {
        for p in PositionId::ALL {
            let bx = game.apply_profile(&prof.with(p, Action::TokenX)).unwrap()[p];
            let by = game.apply_profile(&prof.with(p, Action::TokenY)).unwrap()[p];
            assert!(bx.green() > by.green());
            assert!(game.params.cost(Action::TokenX) < game.params.cost(Action::TokenY));
        }
    }
}

#[test]
fn clamping_applies_in_documented_order() {
    let mut params = GameParameters::default();
    params.own_red_x = [20, 30, 50];
    params.own_red_y = [14, 20, 40];
    params.ext_brown_per_buyer = 20;
    let game = Game::new(Topology::default(), params, Treatment::BAS_NET).unwrap();
    let prof: ActionProfile = "NXNXNN".parse().unwrap();
    let out = game.apply_profile_traced(&prof).unwrap();
    assert!(out.clamped());
    // C (degree 2): brown 25 minus 2 x 20 clamps at 0; red 30 minus 2 x 10 from B and D.
    let c = out.boxes[PositionId::C];
    assert_eq!((c.red(), c.brown(), c.green()), (10, 0, 90));
    assert_eq!(out.shortfall[PositionId::C], 15);
    // D (degree 3) buys X: 45 red minus 50 clamps.
    assert_eq!(out.shortfall[PositionId::D], 5);
}

fn profile_strategy(t: Treatment) -> impl Strategy<Value = ActionProfile> {
    (0..ActionProfile::count(t)).prop_map(move |i| ActionProfile::from_index(i, t).unwrap())
}

proptest! {
    #[test]
    fn boxes_stay_valid_under_arbitrary_parameters(
        idx in 0usize..729,
        brown in 0u32..40,
        red_x in 0u32..20,
        red_y in 0u32..20,
        own in prop::array::uniform3(1u32..60),
        self_brown in any::<bool>(),
    ) {
        let mut params = GameParameters::default();
        params.ext_brown_per_buyer = brown;
        params.ext_red_x_to_nonbuyer = red_x;
        params.ext_red_y_to_nonbuyer = red_y;
        params.own_red_x = own;
        params.own_red_y = own.map(|v| v - 1);
        params.y_brown_includes_self = self_brown;
        let game = Game::new(Topology::default(), params, Treatment::DEC_NET).unwrap();
        let prof = ActionProfile::from_index(idx, Treatment::DEC_NET).unwrap();
        let init = game.initial_boxes();
        let out = game.apply_profile_traced(&prof).unwrap();
        for p in PositionId::ALL {
            let b = out.boxes[p];
            prop_assert_eq!(b.red() + b.brown() + b.green(), 100);
            prop_assert!(b.green() >= init[p].green());
        }
    }

    #[test]
    fn payoff_formula(prof in profile_strategy(Treatment::DEC_NET), p in 0usize..6) {
        let game = Game::standard(Treatment::DEC_NET);
        let pos = PositionId::ALL[p];
        let boxes = game.apply_profile(&prof).unwrap();
        let v: f64 = game.expected_payoff(pos, &prof, &boxes);
        let b = boxes[pos];
        let cost = [0.0, 32.0, 42.0][prof.get(pos).index()];
        prop_assert!((v - (150.0 - cost - (b.red() + b.brown()) as f64)).abs() < 1e-9);
    }
}
