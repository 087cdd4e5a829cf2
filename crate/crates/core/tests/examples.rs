macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(collision_maps, collision_maps_runs, "collision_maps.rs");
example!(cooling_spectral, cooling_spectral_runs, "cooling_spectral.rs");
example!(cooling_state, cooling_state_runs, "cooling_state.rs");
example!(inequalities, inequalities_runs, "inequalities.rs");
example!(dsmc_cross_check, dsmc_cross_check_runs, "dsmc_cross_check.rs");
example!(verify_report, verify_report_runs, "verify_report.rs");
