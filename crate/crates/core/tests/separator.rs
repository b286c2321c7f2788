use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::gen::{grid, random_triangulation};
use pursuit_core::separator::{separate, separate_components};

#[test]
fn random_triangulations_meet_bounds() {
    for seed in 0..60u64 {
        let n = 4 + (seed as usize * 97) % 3000;
        let e = random_triangulation(n, seed).unwrap();
        let r = separate(&e.rotation).unwrap();
        r.check(&e.rotation, 4.0)
            .unwrap_or_else(|err| panic!("seed {seed}, n {n}: {err}"));
    }
}

#[test]
fn grids_meet_bounds() {
    for (w, h) in [(20, 20), (1, 30), (50, 3), (31, 17)] {
        let e = grid(w, h).unwrap();
        let r = separate(&e.rotation).unwrap();
        r.check(&e.rotation, 4.0).unwrap();
    }
}

#[test]
fn construction_underlying_graph() {
    let c = Construction::assemble(ConstructionParams::new(250, 10, 16)).unwrap();
    let r = separate_components(&c.rotation).unwrap();
    r.check(&c.rotation, 4.0).unwrap();
}
