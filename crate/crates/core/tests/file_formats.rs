use besov_tree::boundary_space::BoundaryFn;
use besov_tree::extension_ops::whitney_extend;
use besov_tree::io::{boundary_from_str, boundary_to_string, read_boundary, tree_from_str, tree_to_string};
use besov_tree::{Error, SpaceParams};
use proptest::prelude::*;

fn arb_boundary() -> impl Strategy<Value = BoundaryFn> {
    (2usize..4, 1usize..5).prop_flat_map(|(k, depth)| {
        proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), k.pow(depth as u32))
            .prop_map(move |v| BoundaryFn::new(k, depth, v).unwrap())
    })
}

proptest! {
    #[test]
    fn boundary_files_are_lossless(f in arb_boundary()) {
        let back = boundary_from_str(&boundary_to_string(&f)).unwrap();
        prop_assert_eq!(back.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                        f.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn tree_files_are_lossless(f in arb_boundary()) {
        let params = SpaceParams::new(f.k(), 0.7, 3.0, 0.0, 1.0, f.depth()).unwrap();
        let u = whitney_extend(&f.map(|v| v.clamp(-1e300, 1e300)), &params);
        prop_assert_eq!(tree_from_str(&tree_to_string(&u)).unwrap(), u);
    }
}

#[test]
fn missing_file_reports_path() {
    let err = read_boundary(std::path::Path::new("/no/such/f.txt")).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/no/such/f.txt"));
}

#[test]
fn wrong_cell_count_is_rejected() {
    assert!(matches!(boundary_from_str("2 3\n1 2 3 4 5 6 7"), Err(Error::WrongLength { .. })));
}
