//! Property tests for the algebraic invariants.

use latnoma_core::distance::dpmin_upper_bound;
use latnoma_core::lattice::{make_lattice, round_tie, LatticeKind};
use latnoma_core::partitions::{build_constellation, PartitionSpec};
use proptest::prelude::*;

fn lattice_strategy() -> impl Strategy<Value = LatticeKind> {
    prop_oneof![
        (1usize..=4).prop_map(LatticeKind::Zn),
        Just(LatticeKind::A2),
        Just(LatticeKind::D4),
        Just(LatticeKind::E8),
        prop_oneof![Just(5u32), Just(7), Just(11), Just(13)]
            .prop_map(LatticeKind::CyclotomicIdeal),
    ]
}

proptest! {
    #[test]
    fn round_tie_stays_in_half_open_cell(x in -1e6f64..1e6) {
        let q = round_tie(x);
        prop_assert_eq!(q, q.round());
        let r = x - q;
        // The half-integer snap widens the cell boundary by 1e-9.
        prop_assert!(r > -0.5 - 1e-9 && r <= 0.5 + 1e-9, "x {} -> {}", x, q);
    }

    #[test]
    fn modulo_output_quantizes_to_zero(
        kind in lattice_strategy(),
        raw in proptest::collection::vec(-25.0f64..25.0, 8),
    ) {
        let lat = make_lattice(kind).unwrap();
        let x = &raw[..lat.n];
        let m = lat.modulo(x).unwrap();
        let q = lat.quantize(&m).unwrap();
        prop_assert!(q.coords.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn quantizer_never_beaten_by_nearby_lattice_points(
        kind in lattice_strategy(),
        raw in proptest::collection::vec(-4.0f64..4.0, 8),
        probe in proptest::collection::vec(-3i64..=3, 8),
    ) {
        let lat = make_lattice(kind).unwrap();
        let x = &raw[..lat.n];
        let q = lat.quantize(x).unwrap().coords;
        let candidate = lat.point_from_integers(&probe[..lat.n]);
        let dq: f64 = x.iter().zip(&q).map(|(a, b)| (a - b) * (a - b)).sum();
        let dc: f64 = x.iter().zip(&candidate).map(|(a, b)| (a - b) * (a - b)).sum();
        prop_assert!(dq <= dc + 1e-9);
    }

    #[test]
    fn bit_labels_round_trip(
        kind in prop_oneof![Just(LatticeKind::Zn(2)), Just(LatticeKind::A2), Just(LatticeKind::D4)],
        m in 0u32..=3,
        label_seed in any::<u64>(),
    ) {
        let base = make_lattice(kind).unwrap();
        if base.n as u32 * m > 12 {
            return Ok(());
        }
        let c = build_constellation(&PartitionSpec::new(base, m).unwrap()).unwrap();
        let label = (label_seed as usize) % c.len();
        let bits = c.bits_from_label(label);
        prop_assert_eq!(c.label_from_bits(&bits).unwrap(), label);
    }

    #[test]
    fn product_distance_additivity_on_lines(
        base in proptest::collection::vec(-5.0f64..5.0, 3),
        dir in proptest::collection::vec(0.1f64..2.0, 3),
        signs in proptest::collection::vec(any::<bool>(), 3),
        s in 0.1f64..0.9,
        t in 1.1f64..4.0,
    ) {
        let v: Vec<f64> = dir
            .iter()
            .zip(&signs)
            .map(|(d, &neg)| if neg { -d } else { *d })
            .collect();
        let b: Vec<f64> = base.iter().zip(&v).map(|(a, vi)| a + s * vi).collect();
        let c: Vec<f64> = base.iter().zip(&v).map(|(a, vi)| a + t * vi).collect();
        let dp = |x: &[f64], y: &[f64]| -> f64 {
            x.iter().zip(y).map(|(xi, yi)| (xi - yi).abs()).product()
        };
        let n = 3.0;
        let lhs = dp(&base, &c).powf(1.0 / n);
        let rhs = dp(&base, &b).powf(1.0 / n) + dp(&b, &c).powf(1.0 / n);
        prop_assert!((lhs - rhs).abs() < 1e-9, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn bound_swap_symmetry(
        alpha in 0.0f64..=1.0,
        m1 in 1u32..=3,
        m2 in 1u32..=3,
    ) {
        let a = dpmin_upper_bound(alpha, m1, m2, 2, 1.0).unwrap();
        let b = dpmin_upper_bound(1.0 - alpha, m2, m1, 2, 1.0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
