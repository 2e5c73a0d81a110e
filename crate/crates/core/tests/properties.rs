//! Randomized invariants spanning the statistics, marker, encoder, and
//! geometry modules.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_rational::Ratio;
use proptest::prelude::*;
use zdm_core::encoder::{array_name, build_cover_family, CirclePoint, CoverFamily, MetricSystem, Point};
use zdm_core::markers::{find_marker, verify_marker, MarkerSet};
use zdm_core::simplex::decompose::{decompose, Splitter};
use zdm_core::simplex::retract::retract;
use zdm_core::simplex::{Face, FiniteSimplex};
use zdm_core::symbolic::{
    measure_distance, Alphabet, ArraySchema, ArrayWindow, FrequencyTable, Shape, Subshift,
};

const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

fn binary_table(p0: f64) -> FrequencyTable {
    FrequencyTable::given(
        ArraySchema::new(vec![Alphabet::binary()]),
        vec![Shape::new(1, 1)],
        vec![vec![(vec![0], p0), (vec![1], 1.0 - p0)]],
    )
}

fn fib_marker(n: usize) -> &'static MarkerSet {
    static CELL: OnceLock<MarkerSet> = OnceLock::new();
    assert_eq!(n, 3);
    CELL.get_or_init(|| find_marker(&Subshift::fibonacci(), 3, 8).unwrap())
}

fn fib_row() -> &'static Vec<u8> {
    static CELL: OnceLock<Vec<u8>> = OnceLock::new();
    CELL.get_or_init(|| Subshift::fibonacci().generic_row(4096).unwrap())
}

fn rotation_schedule() -> &'static (MetricSystem, Vec<CoverFamily>) {
    static CELL: OnceLock<(MetricSystem, Vec<CoverFamily>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let sys = MetricSystem::circle(SILVER).unwrap();
        let schedule = (1..=2)
            .map(|k| build_cover_family(&sys, k, 1 << k, 0.2).unwrap())
            .collect();
        (sys, schedule)
    })
}

proptest! {
    #[test]
    fn empirical_frequencies_sum_to_one(letters in proptest::collection::vec(0u8..2, 20..200)) {
        let window = ArrayWindow::single_row(Alphabet::binary(), 0, letters).unwrap();
        let shapes = [Shape::new(1, 1), Shape::new(1, 2)];
        let table = FrequencyTable::empirical(&window, &shapes).unwrap();
        for i in 0..shapes.len() {
            let total: f64 = table.entries(i).values().map(|f| f.value()).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert_eq!(table.exact_sum(i), Some(Ratio::new(1, 1)));
        }
    }

    #[test]
    fn distance_is_a_metric_on_tables(
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
        r in 0.0f64..=1.0,
    ) {
        let a = binary_table(p);
        let b = binary_table(q);
        let c = binary_table(r);
        let ab = measure_distance(&a, &b).unwrap();
        let ba = measure_distance(&b, &a).unwrap();
        let aa = measure_distance(&a, &a).unwrap();
        let ac = measure_distance(&a, &c).unwrap();
        let bc = measure_distance(&b, &c).unwrap();
        prop_assert_eq!(aa, 0.0);
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn marker_hits_respect_certified_gap_range(
        offset in 0usize..3500,
        len in 100usize..400,
    ) {
        let ms = fib_marker(3);
        let row = &fib_row()[offset..offset + len];
        let hits = zdm_core::embedding::marker_hits(ms, row, 0);
        prop_assert!(hits.len() >= 2);
        for pair in hits.windows(2) {
            let gap = (pair[1] - pair[0]) as usize;
            prop_assert!(gap >= ms.n, "gap {gap} below separation {}", ms.n);
            prop_assert!(
                gap <= ms.covering_bound,
                "gap {gap} above covering bound {}",
                ms.covering_bound
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn names_commute_with_the_rotation(
        base in 0.0f64..1.0,
        steps in 0i64..50,
        t in 0.0f64..=1.0,
    ) {
        let (sys, schedule) = rotation_schedule();
        let x = Point::Circle(CirclePoint { base, steps });
        let tx = sys.step(&x, 1).unwrap();
        let hw = 6i64;
        let name_x = array_name(sys, schedule, t, &x, 2, hw).unwrap();
        let name_tx = array_name(sys, schedule, t, &tx, 2, hw).unwrap();
        for k in 1..=2usize {
            for c in -(hw - 1)..=(hw - 1) {
                prop_assert_eq!(name_x.cell(k, c + 1), name_tx.cell(k, c));
            }
        }
    }

    #[test]
    fn retraction_is_affine_idempotent_and_short(
        seed_coords in proptest::collection::vec(-1.0f64..1.0, 12),
        dim in 2usize..=3,
        face_bits in 1u32..7,
        weights in proptest::collection::vec(0.01f64..1.0, 4),
    ) {
        let n = dim + 1;
        let vertices: Vec<Vec<f64>> = (0..n)
            .map(|i| seed_coords[i * dim..(i + 1) * dim].to_vec())
            .collect();
        let simplex = match FiniteSimplex::unlabeled(vertices) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        let indices: Vec<usize> = (0..n).filter(|i| face_bits & (1 << i) != 0).collect();
        prop_assume!(!indices.is_empty());
        let face = Face::new(&simplex, &indices).unwrap();
        let eps = simplex.diameter() + 1.0;
        let map = retract(&simplex, &face, eps).unwrap();

        for &i in &indices {
            prop_assert_eq!(map.image(i), simplex.vertex(i));
        }

        let total: f64 = weights[..n].iter().sum();
        let mut p = vec![0.0; dim];
        let mut image_mix = vec![0.0; dim];
        for (i, weight) in weights.iter().enumerate().take(n) {
            let w = weight / total;
            for d in 0..dim {
                p[d] += w * simplex.vertex(i)[d];
                image_mix[d] += w * map.image(i)[d];
            }
        }
        let fp = map.apply(&p).unwrap();
        for d in 0..dim {
            prop_assert!((fp[d] - image_mix[d]).abs() < 1e-9);
        }
        let ffp = map.apply(&fp).unwrap();
        for d in 0..dim {
            prop_assert!((ffp[d] - fp[d]).abs() < 1e-9);
        }
        let moved: f64 = fp
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        prop_assert!(moved <= eps + 1e-9);
    }

    #[test]
    fn decomposition_partitions_the_union(
        sets in proptest::collection::vec(
            proptest::collection::btree_set(0u8..12, 1..6),
            1..6,
        ),
        whole in proptest::bool::ANY,
    ) {
        let splitter = if whole { Splitter::Whole } else { Splitter::Singletons };
        let parts = decompose(&sets, splitter);
        let union_in: BTreeSet<u8> = sets.iter().flatten().copied().collect();
        let mut union_out: BTreeSet<u8> = BTreeSet::new();
        for part in &parts {
            prop_assert!(!part.is_empty());
            for el in part {
                prop_assert!(union_out.insert(*el), "element {el} appears twice");
            }
            prop_assert!(
                sets.iter().any(|s| part.is_subset(s)),
                "a part is not contained in any input set"
            );
        }
        prop_assert_eq!(union_in, union_out);
    }
}

#[test]
fn marker_verification_reproduces_search_certificates() {
    for shift in [Subshift::fibonacci(), Subshift::thue_morse()] {
        for n in 2..=4 {
            let ms = find_marker(&shift, n, 8).unwrap();
            assert!(ms.covering_bound >= ms.n);
            assert!(ms.covering_bound <= 4 * n);
            let check = verify_marker(&shift, &ms.words, n, 4 * n).unwrap();
            assert!(check.separated);
            assert_eq!(check.covering_bound, Some(ms.covering_bound));
        }
    }
}
