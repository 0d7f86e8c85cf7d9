macro_rules! example {
    ($name:ident) => {
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));

            #[test]
            fn runs() {
                run_example().unwrap();
            }
        }
    };
}

example!(ambient_structure);
example!(gauss_equation);
example!(chen_first_inequality);
example!(ricci_bounds);
example!(delta_invariants);
example!(theta_and_mean_curvature);
example!(oracle_cross_check);
example!(batch_pipeline);
