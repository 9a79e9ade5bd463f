macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $module() {
            $module::run_example().expect("example should run");
        }
    };
}

example!(sample_systems, "sample_systems.rs");
example!(exact_checks, "exact_checks.rs");
example!(exponent_fit, "exponent_fit.rs");
example!(half_plane, "half_plane.rs");
example!(percolation_boxes, "percolation_boxes.rs");
example!(planar_maps, "planar_maps.rs");
example!(tutte_picture, "tutte_picture.rs");
