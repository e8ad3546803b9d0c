use proptest::prelude::*;

use qsdesign::design::{
    bounds, hamming_distance, is_marginally_coupled, l1_distance, l2_distance_sq, latin_block_structure, pair_counts,
    r_ave, DesignMeta, QSDesign, QuantDesign, Route, SeqDesign,
};
use qsdesign::multi::generate;
use qsdesign::TaConfig;

fn permutation(n: usize) -> impl Strategy<Value = Vec<u32>> {
    Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle()
}

/// `m` independent columns, each a permutation of `1..=n`, returned row-major.
fn lhd(n: usize, m: usize) -> impl Strategy<Value = QuantDesign> {
    proptest::collection::vec(permutation(n), m).prop_map(move |cols| {
        let data = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
        QuantDesign::new(n, m, data).unwrap()
    })
}

fn seq(n: usize, m: usize) -> impl Strategy<Value = SeqDesign> {
    proptest::collection::vec(permutation(m), n).prop_map(move |rows| SeqDesign::from_rows(&rows).unwrap())
}

fn sized_lhd() -> impl Strategy<Value = QuantDesign> {
    (2usize..=50, 1usize..=20).prop_flat_map(|(n, m)| lhd(n, m))
}

fn sized_seq() -> impl Strategy<Value = SeqDesign> {
    (2usize..=30, 2usize..=12).prop_flat_map(|(n, m)| seq(n, m))
}

/// Plain floating-point mean absolute Pearson correlation over column pairs.
fn float_r_ave(o: &SeqDesign) -> f64 {
    let (n, m) = (o.n(), o.m());
    let cols: Vec<Vec<f64>> = (0..m).map(|j| o.column(j).iter().map(|&v| f64::from(v)).collect()).collect();
    let centred: Vec<Vec<f64>> = cols
        .iter()
        .map(|c| {
            let mean = c.iter().sum::<f64>() / n as f64;
            c.iter().map(|v| v - mean).collect()
        })
        .collect();
    let mut total = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            let dot: f64 = centred[a].iter().zip(&centred[b]).map(|(x, y)| x * y).sum();
            let na: f64 = centred[a].iter().map(|x| x * x).sum();
            let nb: f64 = centred[b].iter().map(|x| x * x).sum();
            total += (dot / (na * nb).sqrt()).abs();
        }
    }
    total / (m * (m - 1) / 2) as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn distances_respect_upper_bounds(x in sized_lhd()) {
        let b = bounds(x.n(), x.m());
        prop_assert!(l1_distance(&x).unwrap() <= b.d1_upper);
        prop_assert!(l2_distance_sq(&x).unwrap() <= b.d2sq_upper);
    }

    #[test]
    fn pair_counts_cover_every_adjacent_pair(o in sized_seq()) {
        prop_assert_eq!(pair_counts(&o).total(), (o.n() * (o.m() - 1)) as u64);
    }

    #[test]
    fn hamming_respects_upper_bound(o in sized_seq()) {
        prop_assert!(hamming_distance(&o).unwrap() <= bounds(o.n(), o.m()).dh_upper);
    }

    #[test]
    fn metrics_ignore_row_order(
        (x, o, order) in (2usize..=20, 2usize..=8).prop_flat_map(|(n, m)| {
            (lhd(n, m), seq(n, m), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        })
    ) {
        let o2 = o.permute_rows(&order).unwrap();
        let xs: Vec<Vec<u32>> = order.iter().map(|&i| x.row(i).to_vec()).collect();
        let x2 = QuantDesign::from_rows(&xs).unwrap();
        prop_assert_eq!(l1_distance(&x).unwrap(), l1_distance(&x2).unwrap());
        prop_assert_eq!(l2_distance_sq(&x).unwrap(), l2_distance_sq(&x2).unwrap());
        prop_assert_eq!(hamming_distance(&o).unwrap(), hamming_distance(&o2).unwrap());
        prop_assert_eq!(pair_counts(&o), pair_counts(&o2));
        let (a, b) = (r_ave(&o), r_ave(&o2));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.exact, b.exact);
                prop_assert!((a.value - b.value).abs() < 1e-12);
            }
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn exact_and_float_correlation_agree(o in sized_seq()) {
        if let Ok(r) = r_ave(&o) {
            prop_assert!((r.value - float_r_ave(&o)).abs() < 1e-12, "{} vs {}", r.value, float_r_ave(&o));
        }
    }

    #[test]
    fn coupling_checks_agree_on_perturbations(
        (n, m, seed) in prop_oneof![Just((12usize, 6usize)), Just((12, 4)), Just((16, 8)), Just((20, 4)), Just((18, 6))]
            .prop_flat_map(|(n, m)| (Just(n), Just(m), 0u64..4)),
        col in 0usize..4,
        a in 0usize..20,
        b in 0usize..20,
    ) {
        let cfg = TaConfig { outer: 5, inner: 20, ..TaConfig::default() };
        let d = generate(n, m, &cfg, seed).unwrap();
        prop_assert!(is_marginally_coupled(&d).unwrap());
        prop_assert!(latin_block_structure(&d).unwrap());
        let (a, b, col) = (a % n, b % n, col % m);
        let mut xs = d.x().to_rows();
        let tmp = xs[a][col];
        xs[a][col] = xs[b][col];
        xs[b][col] = tmp;
        let perturbed = QSDesign::new(QuantDesign::from_rows(&xs).unwrap(), d.o().clone(), DesignMeta::new(Route::External)).unwrap();
        prop_assert_eq!(is_marginally_coupled(&perturbed).unwrap(), latin_block_structure(&perturbed).unwrap());
    }

    #[test]
    fn coupling_checks_agree_on_random_designs(
        (x, o) in (1usize..=4, 2usize..=6).prop_flat_map(|(k, m)| (lhd(k * m, m), seq(k * m, m)))
    ) {
        let d = QSDesign::new(x, o, DesignMeta::new(Route::External)).unwrap();
        prop_assert_eq!(is_marginally_coupled(&d).unwrap(), latin_block_structure(&d).unwrap());
    }
}
