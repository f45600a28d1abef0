use std::process::{Command, Output};

fn opencore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opencore"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim_end().to_string()
}

#[test]
fn coding_queries() {
    assert_eq!(stdout(&opencore(&["rho", "-1/2"])), "{1}");
    assert_eq!(stdout(&opencore(&["witness", "3"])), "-1/32768 fiber_size=4");
    assert_eq!(stdout(&opencore(&["fiber", "2"])), "{}");
}

#[test]
fn omin_reports_the_non_open_fiber() {
    let o = opencore(&["omin", "(A -1/2 y)"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("not open, interior empty, fiber {1}"));
}

#[test]
fn structured_output_is_one_stable_record() {
    let args = ["--format", "structured", "--seed", "7", "interior", "(not (A x y))"];
    let (a, b) = (opencore(&args), opencore(&args));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 1);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["command"], "interior");
    assert_eq!(v["result"], "(or (< y 0) (< 0 x))");
}

#[test]
fn exit_statuses() {
    assert_eq!(opencore(&["qe", "(exists x (A x y))"]).status.code(), Some(2));
    assert_eq!(opencore(&["rho", "1/0"]).status.code(), Some(1));
    assert_eq!(opencore(&["eval", "(< x y)", "--at", "x=1"]).status.code(), Some(1));
    assert_eq!(opencore(&["qe", "(exists x (< x y))"]).status.code(), Some(0));
}
