use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qci_core::channel::{ChoiMatrix, KrausChannel};
use qci_core::io::ChannelDoc;
use qci_core::matrix::{pauli_x, pauli_y, pauli_z, Matrix};
use qci_core::random::{random_channel, random_state, seeded};
use serde_json::{json, Value};

fn qci(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qci"))
        .args(args)
        .env_remove("QCI_SEED")
        .output()
        .unwrap()
}

fn qci_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qci"))
        .args(args)
        .env("QCI_SEED", seed)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Mantissa digits of the `delta=` token, which must be `d.dddddddde±xx`.
fn delta_digits(line: &str) -> usize {
    let tok = line.split_whitespace().find_map(|t| t.strip_prefix("delta=")).expect("delta token");
    let mantissa = tok.split('e').next().unwrap().trim_start_matches('-');
    mantissa.chars().filter(char::is_ascii_digit).count()
}

fn channel_doc(v: &Value) -> ChannelDoc {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn orthogonal_diagonal_inputs_give_an_ebt_channel() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = seeded(1);
    let b = vec![random_state(&mut rng, 2), random_state(&mut rng, 2)];
    let a = vec![Matrix::from_diag(&[1.0, 0.0]), Matrix::from_diag(&[0.0, 1.0])];
    let input = write(dir.path(), "p.json", &json!({ "A": a, "B": b }));
    let out = dir.path().join("ch.json");
    let o = qci(&["interpolate", "--method", "orthogonal", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let line = stdout(&o);
    assert_eq!(line.lines().count(), 1);
    assert!(line.starts_with("EBT "), "{line}");
    assert_eq!(delta_digits(&line), 9);
    let v = read(&out);
    assert_eq!(v["version"], 1);
    assert_eq!(v["certificate"]["ebt"], true);
    let ch = channel_doc(&v).to_kraus().unwrap();
    for (ai, bi) in a.iter().zip(&b) {
        assert!((&ch.apply(ai).unwrap() - bi).max_abs() <= 1e-9);
    }
}

#[test]
fn depolarizing_choi_is_ebt_certified() {
    let dir = tempfile::tempdir().unwrap();
    let doc = ChannelDoc::from_choi(&ChoiMatrix::new(Matrix::identity(4).scale(0.5), 2, 2).unwrap());
    let input = write(dir.path(), "c.json", &serde_json::to_value(doc).unwrap());
    let out = dir.path().join("r.json");
    let o = qci(&["check", "--what", "ebt", "--in", s(&input), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("EBT-certified"));
    let v = read(&out);
    let atoms = v["atoms"].as_array().unwrap();
    assert!(!atoms.is_empty());
    assert!(atoms.iter().all(|a| a["kind"] == "product"));
}

#[test]
fn convert_identity_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let id = ChannelDoc::from_kraus(&KrausChannel::new(2, 2, vec![Matrix::identity(2)]).unwrap());
    let input = write(dir.path(), "k.json", &serde_json::to_value(id).unwrap());
    let choi = dir.path().join("c.json");
    assert_eq!(qci(&["convert", "--in", s(&input), "--out", s(&choi)]).status.code(), Some(0));
    let c = channel_doc(&read(&choi)).to_choi().unwrap();
    let mut omega = Matrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            omega[(i * 2 + i, j * 2 + j)] = 1.0.into();
        }
    }
    assert!((c.matrix() - &omega).max_abs() <= 1e-12);

    let mut rng = seeded(4);
    for (din, dout, rank) in [(2, 2, 3), (3, 2, 2), (2, 3, 1)] {
        let ch = random_channel(&mut rng, din, dout, rank);
        let k = write(dir.path(), "rk.json", &serde_json::to_value(ChannelDoc::from_kraus(&ch)).unwrap());
        let c = dir.path().join("rc.json");
        let back = dir.path().join("rb.json");
        assert_eq!(qci(&["convert", "--in", s(&k), "--out", s(&c), "--to", "choi"]).status.code(), Some(0));
        assert_eq!(qci(&["convert", "--in", s(&c), "--out", s(&back)]).status.code(), Some(0));
        let ch2 = channel_doc(&read(&back)).to_kraus().unwrap();
        for i in 0..din {
            for j in 0..din {
                let e = Matrix::unit(din, i, j);
                assert!((&ch.apply(&e).unwrap() - &ch2.apply(&e).unwrap()).max_abs() <= 1e-9);
            }
        }
    }
}

fn program(dir: &Path) -> PathBuf {
    let mut rng = seeded(7);
    let x: Vec<Matrix> = (0..3).map(|_| random_state(&mut rng, 2)).collect();
    let y: Vec<Matrix> = (0..3).map(|_| random_state(&mut rng, 2)).collect();
    write(dir, "prog.json", &json!({ "X": x, "Y": y }))
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = program(dir.path());
    for cone in ["psd", "sep", "ru"] {
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        let args = |out: &Path| -> Vec<String> {
            ["interpolate", "--cone", cone, "--seed", "3", "--max-iter", "30", "--in", s(&input), "--out", s(out)]
                .map(String::from)
                .to_vec()
        };
        let oa = qci(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
        let ob = qci(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(oa.stdout, ob.stdout);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{cone}");
        assert_eq!(delta_digits(&stdout(&oa)), 9);
    }
}

#[test]
fn environment_seed_overrides_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let input = program(dir.path());
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let common = ["interpolate", "--cone", "sep", "--max-iter", "5", "--in", s(&input)];
    let mut with_env = common.to_vec();
    with_env.extend(["--seed", "1", "--out", s(&a)]);
    let mut with_flag = common.to_vec();
    with_flag.extend(["--seed", "11", "--out", s(&b)]);
    qci_env(&with_env, "11");
    qci(&with_flag);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let bad = qci_env(&with_env, "eleven");
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let input = program(dir.path());

    // trace increase on a single pair rules out trace preserving maps
    let grow = write(
        dir.path(),
        "grow.json",
        &json!({ "X": [Matrix::from_diag(&[1.0, 0.0])], "Y": [Matrix::from_diag(&[2.0, 0.0])] }),
    );
    assert_eq!(qci(&["interpolate", "--in", s(&grow)]).status.code(), Some(2));

    // identity data in the separable cone: no certificate either way
    let paulis = vec![Matrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
    let ident = write(dir.path(), "id.json", &json!({ "X": paulis, "Y": paulis }));
    assert_eq!(qci(&["interpolate", "--cone", "sep", "--max-iter", "10", "--in", s(&ident)]).status.code(), Some(3));

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{not json").unwrap();
    assert_eq!(qci(&["interpolate", "--in", s(&junk)]).status.code(), Some(64));

    let mixed = write(
        dir.path(),
        "mixed.json",
        &json!({ "X": [Matrix::identity(2), Matrix::identity(3)], "Y": [Matrix::identity(2), Matrix::identity(2)] }),
    );
    assert_eq!(qci(&["interpolate", "--in", s(&mixed)]).status.code(), Some(65));

    assert_eq!(qci(&["interpolate", "--w", "0", "--in", s(&input)]).status.code(), Some(64));
    assert_eq!(qci(&["interpolate", "--cone", "hull", "--in", s(&input)]).status.code(), Some(64));
    assert_eq!(qci(&["interpolate", "--bogus", "--in", s(&input)]).status.code(), Some(64));
    assert_eq!(qci(&["interpolate", "--in", "/nonexistent/p.json"]).status.code(), Some(66));
}

#[test]
fn hull_generators_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let gens = vec![Matrix::identity(4).scale(0.5), Matrix::from_diag(&[1.0, 0.0, 0.0, 1.0])];
    let g = write(dir.path(), "g.json", &json!({ "generators": gens }));
    let x = vec![Matrix::from_diag(&[1.0, 0.0]), Matrix::from_diag(&[0.0, 1.0])];
    let input = write(dir.path(), "p.json", &json!({ "X": x, "Y": x }));
    let o = qci(&["interpolate", "--cone", "hull", "--generators", s(&g), "--in", s(&input)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
}

#[test]
fn checks_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let mut omega = Matrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            omega[(i * 2 + i, j * 2 + j)] = 1.0.into();
        }
    }
    let id = write(
        dir.path(),
        "id.json",
        &serde_json::to_value(ChannelDoc::from_choi(&ChoiMatrix::new(omega, 2, 2).unwrap())).unwrap(),
    );
    assert_eq!(qci(&["check", "--what", "cptp", "--in", s(&id)]).status.code(), Some(0));
    assert_eq!(qci(&["check", "--what", "ebt", "--in", s(&id)]).status.code(), Some(2));
    assert_eq!(qci(&["check", "--what", "ru", "--in", s(&id)]).status.code(), Some(0));

    let out = dir.path().join("w.json");
    let o = qci(&["witness", "--in", s(&id), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!((read(&out)["pt_value"].as_f64().unwrap() + 1.0).abs() < 1e-9);

    let damp = KrausChannel::new(
        2,
        2,
        vec![Matrix::from_diag(&[1.0, 0.6f64.sqrt()]), {
            let mut k = Matrix::zeros(2, 2);
            k[(0, 1)] = 0.4f64.sqrt().into();
            k
        }],
    )
    .unwrap();
    let d = write(dir.path(), "d.json", &serde_json::to_value(ChannelDoc::from_kraus(&damp)).unwrap());
    assert_eq!(qci(&["check", "--what", "ru", "--in", s(&d)]).status.code(), Some(2));

    let lossy = KrausChannel::new(2, 2, vec![Matrix::from_diag(&[1.0, 0.5])]).unwrap();
    let l = write(dir.path(), "l.json", &serde_json::to_value(ChannelDoc::from_kraus(&lossy)).unwrap());
    assert_eq!(qci(&["check", "--what", "cptp", "--in", s(&l)]).status.code(), Some(2));

    let input = program(dir.path());
    let dual = dir.path().join("dual.json");
    let o = qci(&["witness", "--in", s(&input), "--out", s(&dual)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert_eq!(read(&dual)["witnesses"].as_array().unwrap().len(), 3);
}
