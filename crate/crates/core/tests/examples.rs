mod firing {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/firing.rs"));
}

#[test]
fn firing_example_runs() {
    firing::run_example().expect("firing example should run");
}

mod build_net {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/build_net.rs"
    ));
}

#[test]
fn build_net_example_runs() {
    build_net::run_example().expect("build_net example should run");
}

mod unroll {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/unroll.rs"));
}

#[test]
fn unroll_example_runs() {
    unroll::run_example().expect("unroll example should run");
}

mod traces {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/traces.rs"));
}

#[test]
fn traces_example_runs() {
    traces::run_example().expect("traces example should run");
}

mod timing_windows {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/timing_windows.rs"
    ));
}

#[test]
fn timing_windows_example_runs() {
    timing_windows::run_example().expect("timing_windows example should run");
}

mod scoreboard {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/scoreboard.rs"
    ));
}

#[test]
fn scoreboard_example_runs() {
    scoreboard::run_example().expect("scoreboard example should run");
}

mod coverage {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coverage.rs"));
}

#[test]
fn coverage_example_runs() {
    coverage::run_example().expect("coverage example should run");
}

mod codegen {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/codegen.rs"));
}

#[test]
fn codegen_example_runs() {
    codegen::run_example().expect("codegen example should run");
}

mod compare_nets {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/compare_nets.rs"
    ));
}

#[test]
fn compare_nets_example_runs() {
    compare_nets::run_example().expect("compare_nets example should run");
}

mod custom_scope {
    include!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/examples/custom_scope.rs"
    ));
}

#[test]
fn custom_scope_example_runs() {
    custom_scope::run_example().expect("custom_scope example should run");
}
