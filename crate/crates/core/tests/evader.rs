use std::sync::Arc;

use pursuit_core::construction::{Construction, ConstructionParams, VertexRole};
use pursuit_core::engine::{GameConfig, GameState, History, RobberStrategy};
use pursuit_core::evader::{
    corner_local, escape_center, return_to_center, safe_exits, spoke_local, threat_view, Evader, EvaderMode, UnitTables,
};
use pursuit_core::graph::VertexId;

fn arena() -> Arc<Construction> {
    Arc::new(Construction::assemble(ConstructionParams::default()).unwrap())
}

fn local(c: &Construction, unit: usize, x: usize) -> VertexId {
    VertexId::from(c.unit_base(unit) + x)
}

#[test]
fn threat_counts() {
    let c = arena();
    let s = c.params.spoke;
    let u = &c.units[3];
    let entry = *u.entries.first().unwrap();
    let on_inbound = local(&c, 3, spoke_local(s, entry, 1));
    let v = threat_view(&c, &[on_inbound], 3);
    assert_eq!((v.cops_in_unit, v.mobile), (1, 0));

    let none = threat_view(&c, &[], 3);
    assert_eq!((none.cops_in_unit, none.mobile, none.entrants.len()), (0, 0, 0));

    // last vertex of a path into unit 3
    let p = c.paths.iter().find(|p| p.to == 3).unwrap();
    let last = *p.interior.last().unwrap();
    assert!(matches!(c.role(last), VertexRole::Green { position, .. } if position == c.params.green - 1));
    let v = threat_view(&c, &[last], 3);
    assert_eq!(v.cops_in_unit, 1);
    assert_eq!(v.effective[0].vertex, p.entry);
    assert_eq!(v.effective[0].lag, 1);
}

#[test]
fn safe_exit_counts() {
    let c = arena();
    for u in 0..12 {
        assert_eq!(safe_exits(&c, u, &[]).len(), 5);
        for x in 0..12 {
            if x != u {
                assert!(safe_exits(&c, u, &[x]).len() >= 2, "unit {u}, outside cop in {x}");
            }
        }
    }
}

#[test]
fn straight_escape_without_cops() {
    let c = arena();
    let t = UnitTables::new(&c).unwrap();
    let all = c.units[0].exits.clone();
    let e = escape_center(&c, &t, &[], 0, &all).unwrap();
    assert_eq!(e, all[0]);
    assert_eq!(t.dist(0, corner_local(e)), c.params.spoke);
}

#[test]
fn two_perimeter_cops_leave_an_exit_of_any_three() {
    let c = arena();
    let t = UnitTables::new(&c).unwrap();
    let exits = c.units[0].exits.clone();
    let perimeter: Vec<usize> = (0..t.size).filter(|&x| c.is_perimeter(local(&c, 0, x))).collect();
    let mut triples = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for d in b + 1..5 {
                triples.push(vec![exits[a], exits[b], exits[d]]);
            }
        }
    }
    for (i, &x) in perimeter.iter().enumerate() {
        for &y in &perimeter[i..] {
            let cops = [local(&c, 0, x), local(&c, 0, y)];
            for s in &triples {
                let e = escape_center(&c, &t, &cops, 0, s).unwrap_or_else(|err| panic!("{x} {y} {s:?}: {err}"));
                assert!(s.contains(&e));
            }
        }
    }
}

#[test]
fn outbound_spoke_cop_blocks_only_its_own_exit() {
    let c = arena();
    let t = UnitTables::new(&c).unwrap();
    let s = c.params.spoke;
    let exits = c.units[0].exits.clone();
    for &k in &exits {
        for p in 1..s {
            let cop = [local(&c, 0, spoke_local(s, k, p))];
            for &other in exits.iter().filter(|&&e| e != k) {
                assert_eq!(escape_center(&c, &t, &cop, 0, &[other]).unwrap(), other);
            }
            assert!(escape_center(&c, &t, &cop, 0, &[k]).is_err());
        }
    }
}

#[test]
fn return_paths_fit_the_budget() {
    let c = arena();
    let t = UnitTables::new(&c).unwrap();
    let s = c.params.spoke;
    let cop = [local(&c, 0, spoke_local(s, c.units[0].exits[0], 1))];
    let mut worst = 0;
    for x in (0..t.size).filter(|&x| c.is_perimeter(local(&c, 0, x))) {
        let path = return_to_center(&c, &t, &cop, local(&c, 0, x)).unwrap();
        assert_eq!(*path.last().unwrap(), c.center_of(0));
        worst = worst.max(path.len());
    }
    assert!(worst as u64 <= c.params.return_budget());
    let entry = c.units[0].entries[0];
    let from_entry = return_to_center(&c, &t, &cop, c.units[0].corners[entry]).unwrap();
    assert_eq!(from_entry.len() as u32, s);
}

#[test]
fn waits_until_a_cop_is_adjacent() {
    let c = arena();
    let config = GameConfig::new(c.graph.clone(), 1, Some(100)).unwrap();
    let mut ev = Evader::new(c.clone()).unwrap();
    let cops = vec![c.center_of(0)];
    let mut st = GameState::new(&config).place_cops(&config, &cops).unwrap();
    let start = ev.place(&config, &st).unwrap();
    assert_ne!(start, c.center_of(0));
    st = st.place_robber(&config, start).unwrap();
    let mv = ev.step(&config, &st, &History::default()).unwrap();
    assert_eq!(mv.0, start);
    assert!(matches!(ev.mode(), EvaderMode::WaitAtCenter { .. }));
}
