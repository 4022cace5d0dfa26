use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filtersort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn parse_prints_canonical_text() {
    let o = run(&["parse", &fixture("worked.dsl")]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "sort desc price |> filter rating >= 4 |> sort asc price |> sort desc rating\n"
    );
    let o = run(&["parse", "--json", &fixture("house.dsl")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"canonical\""));
    assert!(stdout(&o).contains("\"or\""));
}

#[test]
fn parse_errors_exit_two() {
    for f in ["garbage.dsl", "empty.dsl"] {
        let o = run(&["parse", &fixture(f)]);
        assert_eq!(code(&o), 2, "{f}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(" at "), "{f}");
    }
    assert_eq!(code(&run(&["parse", &fixture("missing.dsl")])), 2);
    assert_eq!(code(&run(&["bench", "--attrs", "x"])), 2);
}

#[test]
fn normalize_reports_length() {
    let o = run(&["normalize", &fixture("worked.dsl")]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o),
        "filter rating >= 4 |> sort asc price |> sort desc rating\nlength=3\n"
    );

    let o = run(&["normalize", &fixture("contradiction.dsl")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("length=3"));
    assert!(stdout(&o).contains("empty-interval: price"));

    let o = run(&["normalize", &fixture("house.dsl")]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("length=2"));
}

#[test]
fn eval_runs_procedures() {
    let o = run(&[
        "eval",
        &fixture("worked.dsl"),
        "--catalog",
        &fixture("shop.json"),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "p4\np1\np2\np5\n");

    let o = run(&[
        "eval",
        &fixture("cheapest.dsl"),
        "--catalog",
        &fixture("shop.json"),
    ]);
    assert_eq!(stdout(&o), "p3\n");

    let o = run(&[
        "eval",
        &fixture("cheapest.dsl"),
        "--catalog",
        &fixture("shop.json"),
        "--list",
        "",
    ]);
    assert_eq!(code(&o), 3);

    let o = run(&[
        "eval",
        &fixture("cheapest.dsl"),
        "--catalog",
        &fixture("shop.json"),
        "--list",
        "p9",
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn prefer_compares_items() {
    let base = [
        "prefer",
        &fixture("spec.json"),
        "--catalog",
        &fixture("shop.json"),
    ];
    let o = run(&[&base[..], &["--x", "p4", "--y", "p1"]].concat());
    assert_eq!((code(&o), stdout(&o)), (0, "x>y\n".to_string()));
    let o = run(&[&base[..], &["--x", "p3", "--y", "p2"]].concat());
    assert_eq!((code(&o), stdout(&o)), (1, "x<y\n".to_string()));
    let o = run(&[&base[..], &["--x", "p2", "--y", "p5"]].concat());
    assert_eq!((code(&o), stdout(&o)), (0, "x>y\n".to_string()));
    let o = run(&[&base[..], &["--x", "p2", "--y", "p2"]].concat());
    assert_eq!((code(&o), stdout(&o)), (0, "x~y\n".to_string()));
}

#[test]
fn derive_and_synth_round_trip() {
    let o = run(&["derive", &fixture("worked_nf.dsl")]);
    assert_eq!(code(&o), 0);
    let spec = std::fs::read_to_string(fixture("spec.json")).unwrap();
    let reformat = |s: &str| s.split_whitespace().collect::<String>();
    assert_eq!(reformat(&stdout(&o)), reformat(&spec));

    let o = run(&["synth", &fixture("spec.json")]);
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("worked_nf.dsl")).unwrap()
    );

    let o = run(&["synth", &fixture("house_spec.json")]);
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("house.dsl")).unwrap()
    );

    let dir = tempfile::tempdir().unwrap();
    let derived = dir.path().join("house_spec.json");
    let o = run(&["derive", &fixture("house.dsl")]);
    std::fs::write(&derived, &o.stdout).unwrap();
    let o = run(&["synth", derived.to_str().unwrap()]);
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("house.dsl")).unwrap()
    );
}

#[test]
fn check_equivalence() {
    let u = fixture("shop.json");
    let o = run(&[
        "check",
        &fixture("worked.dsl"),
        &fixture("worked_nf.dsl"),
        "--universe",
        &u,
    ]);
    assert_eq!((code(&o), stdout(&o)), (0, "equivalent\n".to_string()));
    let o = run(&[
        "check",
        &fixture("worked.dsl"),
        &fixture("worked.dsl"),
        "--universe",
        &u,
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "check",
        &fixture("asc.dsl"),
        &fixture("desc.dsl"),
        "--universe",
        &u,
        "--max-len",
        "2",
    ]);
    assert_eq!(code(&o), 1);
    assert!(
        stdout(&o).starts_with("counterexample: [p1,p2]\n"),
        "{}",
        stdout(&o)
    );
    // Sorting cannot reorder lists of one item.
    let o = run(&[
        "check",
        &fixture("asc.dsl"),
        &fixture("desc.dsl"),
        "--universe",
        &u,
        "--attrs",
        "brand",
        "--max-len",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&[
        "check",
        &fixture("asc.dsl"),
        &fixture("desc.dsl"),
        "--universe",
        &u,
        "--max-len",
        "12",
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn satisfice_picks_first_satisfactory() {
    let cat = fixture("hard_disks.json");
    let o = run(&[
        "satisfice",
        &fixture("disks.dsl"),
        "--missing",
        "capacity >= 1000000000",
        "--catalog",
        &cat,
    ]);
    assert_eq!((code(&o), stdout(&o)), (0, "d\n".to_string()));
    let o = run(&[
        "satisfice",
        &fixture("disks.dsl"),
        "--missing",
        "capacity >= 9000000000",
        "--catalog",
        &cat,
    ]);
    assert_eq!(code(&o), 3);
    let o = run(&[
        "satisfice",
        &fixture("disks.dsl"),
        "--missing",
        "capacity >=",
        "--catalog",
        &cat,
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn bench_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = run(&[
            "bench",
            "--attrs",
            "2",
            "--items",
            "10",
            "--trials",
            "5",
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "trial,N,n,n′,procSteps,baselineSteps,verdict");
    assert_eq!(lines.len(), 6);
    assert!(lines[1..]
        .iter()
        .all(|l| l.ends_with(",6,9,procedureQuicker")));

    let o = run(&["bench", "--attrs", "3", "--items", "10", "--trials", "2"]);
    assert!(stdout(&o)
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",9,9,equal")));
    assert_eq!(
        code(&run(&[
            "bench", "--attrs", "0", "--items", "3", "--trials", "1"
        ])),
        2
    );
}
