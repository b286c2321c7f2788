use pursuit_core::construction::{Construction, ConstructionParams};
use pursuit_core::evader::UnitTables;
use pursuit_core::lemma::{verify_center_escape, verify_return};

#[test]
fn default_unit_claims() {
    let c = Construction::assemble(ConstructionParams::default()).unwrap();
    let t = UnitTables::new(&c).unwrap();
    let s = c.params.spoke;
    for cops in [1, 2] {
        let r = verify_center_escape(&c, &t, cops, s, 24).unwrap();
        println!(
            "c={cops}: {} cases, max {} moves, {} cross-checked",
            r.cases, r.max_moves, r.cross_checked
        );
        assert!(r.passed(), "{r:?}");
        assert!(r.max_moves <= 10);
    }
    let r = verify_return(&c, &t, 27).unwrap();
    println!("return: {} cases, max {} moves", r.cases, r.max_moves);
    assert!(r.passed(), "{r:?}");
    assert_eq!(r.perimeter, 310);
}
