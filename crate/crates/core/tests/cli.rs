use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn hseal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hseal"))
        .args(args)
        .output()
        .expect("running hseal")
}

fn ok(args: &[&str]) -> String {
    let out = hseal(args);
    assert!(
        out.status.success(),
        "hseal {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        ok(&[
            "keygen",
            "--bits",
            "64",
            "--seed",
            "11",
            "--out-pub",
            ws.s("k.pub"),
            "--out-priv",
            ws.s("k.priv"),
        ]);
        ws
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> &str {
        // Leaked so argument slices can borrow freely; tests are short-lived.
        Box::leak(
            self.path(name)
                .to_str()
                .unwrap()
                .to_owned()
                .into_boxed_str(),
        )
    }
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap()
}

#[test]
fn encrypt_decrypt_round_trip() {
    let ws = Workspace::new();
    let msg: Vec<u8> = (0..=255u8).cycle().take(1000).collect();
    fs::write(ws.path("msg"), &msg).unwrap();
    ok(&[
        "encrypt",
        "--in",
        ws.s("msg"),
        "--pub",
        ws.s("k.pub"),
        "--out",
        ws.s("c"),
        "--seed",
        "1",
    ]);
    ok(&[
        "decrypt",
        "--in",
        ws.s("c"),
        "--priv",
        ws.s("k.priv"),
        "--out",
        ws.s("back"),
    ]);
    assert_eq!(read(&ws.path("back")), msg);
}

#[test]
fn inspect_reveals_the_order() {
    let ws = Workspace::new();
    fs::write(ws.path("msg"), b"hello there").unwrap();
    ok(&[
        "auth-send",
        "--in",
        ws.s("msg"),
        "--pub",
        ws.s("k.pub"),
        "--out",
        ws.s("c"),
        "--n",
        "13",
        "--m",
        "5",
    ]);
    let out = ok(&["inspect", "--in", ws.s("c")]);
    assert!(out.contains("order: 13"), "{out}");
    assert!(out.contains("mode: auth"), "{out}");
    assert!(out.contains("blocks: 3"), "{out}");
    assert!(out.contains("garbage length: 8"), "{out}");
}

#[test]
fn auth_verify_accepts_and_rejects() {
    let ws = Workspace::new();
    fs::write(ws.path("msg"), b"pay bob 5").unwrap();
    ok(&[
        "auth-send",
        "--in",
        ws.s("msg"),
        "--pub",
        ws.s("k.pub"),
        "--out",
        ws.s("c"),
        "--seed",
        "3",
    ]);
    let verify = |bundle: &str| {
        hseal(&[
            "auth-verify",
            "--in",
            ws.s(bundle),
            "--priv",
            ws.s("k.priv"),
            "--pub",
            ws.s("k.pub"),
            "--out",
            ws.s("back"),
        ])
    };
    let good = verify("c");
    assert!(good.status.success());
    assert_eq!(read(&ws.path("back")), b"pay bob 5");

    // Drop the tag line of the only block and graft in a tag from another session.
    ok(&[
        "auth-send",
        "--in",
        ws.s("msg"),
        "--pub",
        ws.s("k.pub"),
        "--out",
        ws.s("other"),
        "--seed",
        "4",
    ]);
    let text = String::from_utf8(read(&ws.path("c"))).unwrap();
    let other = String::from_utf8(read(&ws.path("other"))).unwrap();
    let tag = |t: &str| t.lines().find(|l| l.starts_with("K':")).unwrap().to_owned();
    let forged = text.replacen(&tag(&text), &tag(&other), 1);
    assert_ne!(forged, text);
    fs::write(ws.path("forged"), forged).unwrap();
    let bad = verify("forged");
    assert!(!bad.status.success());
}

#[test]
fn sum_demo_prints_every_hop() {
    let out = ok(&["sum-demo", "--secrets", "4,7,11", "--blind", "5"]);
    for line in ["1->2: 9", "2->3: 16", "3->1: 27", "broadcast: 22"] {
        assert!(out.contains(line), "missing {line:?} in {out}");
    }
}

#[test]
fn sum_demo_needs_two_parties() {
    let out = hseal(&["sum-demo", "--secrets", "4", "--blind", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn stability_csv() {
    let out = ok(&["stability", "--max-order", "4"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "order,float_residual,exact_residual");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",0")), "{out}");
}

#[test]
fn keygen_is_deterministic_with_a_seed() {
    let ws = Workspace::new();
    let args = |p: &str, q: &str| {
        ok(&[
            "keygen",
            "--bits",
            "32",
            "--seed",
            "9",
            "--out-pub",
            ws.s(p),
            "--out-priv",
            ws.s(q),
        ]);
    };
    args("a.pub", "a.priv");
    args("b.pub", "b.priv");
    assert_eq!(read(&ws.path("a.pub")), read(&ws.path("b.pub")));
    assert_eq!(read(&ws.path("a.priv")), read(&ws.path("b.priv")));
}

#[test]
fn bad_parameters_are_reported() {
    let ws = Workspace::new();
    fs::write(ws.path("msg"), b"x").unwrap();
    let out = hseal(&[
        "encrypt",
        "--in",
        ws.s("msg"),
        "--pub",
        ws.s("k.pub"),
        "--out",
        ws.s("c"),
        "--n",
        "12",
        "--m",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!ws.path("c").exists());
}
