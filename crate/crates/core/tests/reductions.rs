use linmodal::formula::metrics;
use linmodal::reductions::*;
use linmodal::tiling::{TileSet, TileType};
use proptest::prelude::*;

fn two() -> TileSet {
    TileSet::new(vec![TileType::new(0, 1, 5, 5), TileType::new(1, 0, 6, 6)]).unwrap()
}

fn tile_set() -> impl Strategy<Value = TileSet> {
    prop::collection::vec((0..3u32, 0..3u32, 0..3u32, 0..3u32), 1..=5)
        .prop_map(|v| TileSet::new(v.into_iter().map(|(l, r, u, d)| TileType::new(l, r, u, d)).collect()).unwrap())
}

#[test]
fn base_goldens() {
    let a = gen_base(&two());
    let printed: Vec<String> = a.conjuncts.iter().map(|c| format!("{}: {}", c.name, c.formula)).collect();
    let expected = [
        "A_0: ∃x □(¬P0(x) ∧ ¬P1(x))",
        "A_1: ∃x (¬(¬P0(x) ∧ ¬P1(x)) ∧ M(x))",
        "A_2: ∀x∃y Succ(x, y)",
        "A_3: ∀x∀y (Succ(x, y) → □(∃x M(x) → Succ(x, y)))",
        "A_4: ∀x∀y (Succ(x, y) → □(M(x) ↔ ¬p ∧ ⧈M(y) ∧ ¬⧈²M(y)))",
        "A_5: ∀x∀y □((M(x) ∧ P0(y) → □(M(x) → P0(y))) ∧ (M(x) ∧ P1(y) → □(M(x) → P1(y))))",
        "A_6: ∀x □((P0(x) → ¬P1(x)) ∧ (P1(x) → ¬P0(x)))",
        "A_7: ∀x∀y □((Succ(x, y) ∧ P0(x) → P1(y)) ∧ (Succ(x, y) ∧ P1(x) → P0(y)))",
        "A_8: ∀x∀y □((M(x) ∧ P0(y) → □(∃y (Succ(x, y) ∧ M(y)) → P0(y))) ∧ (M(x) ∧ P1(y) → □(∃y (Succ(x, y) ∧ M(y)) → P1(y))))",
        "A_9: ∀x (M(x) → □⧈P0(x))",
    ];
    assert_eq!(printed, expected);
}

#[test]
fn special_conjunct_goldens() {
    assert_eq!(
        a4_star(1).to_string(),
        "∀x∀y (⧈₂(∃y (⧈₂⁵(q ∧ P(y)) ∧ ¬⧈₂⁶(q ∧ P(y)) ∧ ⧈₂(⧈₂³(q ∧ P(y)) ∧ ¬⧈₂⁴(q ∧ P(y)) ∧ P(x))) ∧ \
         ∃x (⧈₂⁵(q ∧ P(x)) ∧ ¬⧈₂⁶(q ∧ P(x)) ∧ ⧈₂(⧈₂⁴(q ∧ P(x)) ∧ ¬⧈₂⁵(q ∧ P(x)) ∧ P(y)))) → \
         □(q ∧ P(x) ↔ ¬∀x P(x) ∧ ⧈₂⁵(q ∧ P(y)) ∧ ¬⧈₂⁶(q ∧ P(y))))"
    );
    assert_eq!(
        a9_star(1).to_string(),
        "∀x (q ∧ P(x) → □⧈₂∃y (⧈₂⁵(q ∧ P(y)) ∧ ¬⧈₂⁶(q ∧ P(y)) ∧ ⧈₂(⧈₂¹(q ∧ P(y)) ∧ ¬⧈₂²(q ∧ P(y)) ∧ P(x))))"
    );
    assert_eq!(a9_bullet().to_string(), "∀x (M(x) → □(∃y M(y) → ⧈(∃y M(y) → P0(x))))");
    assert_eq!(gen_separation(Separation::Z).to_string(), "□(□p → p) → (◇□p → □p)");
    assert_eq!(gen_separation(Separation::Ref).to_string(), "□p → p");
    let beta = gen_beta(0, "x", 0);
    assert_eq!(beta.to_string(), "∃y (⧈₂⁴(q ∧ P(y)) ∧ ¬⧈₂⁵(q ∧ P(y)) ∧ ⧈₂(⧈₂¹(q ∧ P(y)) ∧ ¬⧈₂²(q ∧ P(y)) ∧ P(x)))");
    assert_eq!(metrics(&beta).unwrap().modal_depth, 10);
}

#[test]
fn conjunct_counts() {
    let t = two();
    for (v, n) in [
        (Variant::A, 10),
        (Variant::APrime, 10),
        (Variant::AStar, 10),
        (Variant::APlus, 10),
        (Variant::B, 9),
        (Variant::ABullet, 10),
    ] {
        assert_eq!(gen_variant(&t, v).unwrap().conjuncts.len(), n, "{v}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_keeps_two_variables(t in tile_set()) {
        let a = gen_base(&t);
        let p = prime_pass(&a).unwrap();
        let s = star_pass(&p).unwrap();
        for art in [&a, &p, &s] {
            let m = art.metrics().unwrap();
            prop_assert_eq!(m.variables.len(), 2);
            for c in &art.conjuncts {
                prop_assert!(metrics(&c.formula).unwrap().uses_only_vars(&["x", "y"]));
                prop_assert!(c.formula.free_vars().is_empty());
            }
        }
        prop_assert!(p.metrics().unwrap().letters.values().all(|c| c.arity <= 1));
    }

    #[test]
    fn star_and_plus_use_one_monadic_and_one_nullary_letter(t in tile_set()) {
        for v in [Variant::AStar, Variant::APlus] {
            let m = gen_variant(&t, v).unwrap().metrics().unwrap();
            let census: Vec<(String, usize)> = m.letters.iter().map(|(l, c)| (l.clone(), c.arity)).collect();
            prop_assert_eq!(census, vec![("P".to_string(), 1), ("q".to_string(), 0)]);
        }
    }

    #[test]
    fn generation_is_deterministic(t in tile_set()) {
        for v in Variant::ALL {
            let a = gen_variant(&t, v).unwrap().to_file();
            let b = gen_variant(&t.clone(), v).unwrap().to_file();
            prop_assert_eq!(&a, &b);
            let back = ReductionArtifact::parse_file(&a).unwrap();
            prop_assert_eq!(back.to_file(), a);
        }
    }
}
