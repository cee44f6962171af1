#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// Golden invocations: file stem, arguments, expected exit status.
pub const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("check_sound", &["check", "fixtures/sound.a2"], 0),
    (
        "check_broken",
        &["check", "crates/cli/tests/data/broken.a2"],
        2,
    ),
    (
        "validity_bare_doubt",
        &["validity", "fixtures/bare_doubt.a2", "--concur-all"],
        1,
    ),
    (
        "validity_no_concurrence",
        &["validity", "fixtures/sound.a2"],
        1,
    ),
    (
        "validity_exoneration",
        &["validity", "fixtures/exoneration.a2", "--concur-all"],
        0,
    ),
    (
        "validity_eliminative",
        &["validity", "fixtures/eliminative.a2", "--concur-all"],
        0,
    ),
    (
        "sound_sound",
        &["sound", "fixtures/sound.a2", "--concur-all"],
        0,
    ),
    (
        "sound_bare_doubt",
        &["sound", "fixtures/bare_doubt.a2", "--concur-all"],
        1,
    ),
    (
        "confidence_product",
        &[
            "confidence",
            "fixtures/sound.a2",
            "--method",
            "product",
            "--concur-all",
        ],
        0,
    ),
    (
        "confidence_doubts",
        &[
            "confidence",
            "fixtures/sound.a2",
            "--method",
            "doubts",
            "--concur-all",
        ],
        0,
    ),
    (
        "confidence_unsound",
        &["confidence", "fixtures/sound.a2", "--method", "product"],
        1,
    ),
    (
        "confidence_exploratory",
        &[
            "confidence",
            "fixtures/bare_doubt.a2",
            "--method",
            "product",
            "--exploratory",
        ],
        0,
    ),
    (
        "confidence_config",
        &[
            "confidence",
            "fixtures/sound.a2",
            "--config",
            "crates/cli/tests/data/doubts.toml",
        ],
        0,
    ),
    (
        "confidence_flag_wins",
        &[
            "confidence",
            "fixtures/sound.a2",
            "--config",
            "crates/cli/tests/data/doubts.toml",
            "--method",
            "product",
        ],
        0,
    ),
    ("measures_sound", &["measures", "fixtures/sound.a2"], 0),
    (
        "measures_e1_natural",
        &[
            "measures",
            "fixtures/sound.a2",
            "--node",
            "E1",
            "--base",
            "2.718281828459045",
        ],
        0,
    ),
    (
        "measures_linda_json",
        &["measures", "fixtures/linda.a2", "--format", "json"],
        1,
    ),
    (
        "measures_bad_base",
        &["measures", "fixtures/sound.a2", "--base", "0.5"],
        2,
    ),
    (
        "measures_unknown_node",
        &["measures", "fixtures/sound.a2", "--node", "ZZ"],
        2,
    ),
    ("risks_10", &["risks", "fixtures/residuals_10.a2"], 0),
    ("risks_100", &["risks", "fixtures/residuals_100.a2"], 1),
    (
        "export_dot",
        &["export", "fixtures/bare_doubt.a2", "--dot", "--concur-all"],
        0,
    ),
    (
        "export_json",
        &["export", "fixtures/sound.a2", "--json", "--concur-all"],
        0,
    ),
    (
        "fmt_to_json",
        &["fmt", "fixtures/sound.a2", "--to", "json"],
        0,
    ),
    ("fmt_qualitative", &["fmt", "fixtures/qualitative.a2"], 0),
    ("usage_error", &["confidence"], 2),
];

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    /// The form stored in a golden file.
    pub fn transcript(&self) -> String {
        format!(
            "exit {}\n--- stdout\n{}--- stderr\n{}",
            self.code, self.stdout, self.stderr
        )
    }
}

pub fn a2(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_a2"))
        .args(args)
        .current_dir(workspace())
        .env_remove("A2_LOG")
        .output()
        .expect("run a2");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Compare every golden invocation, run twice, with its stored transcript.
/// With `A2_BLESS=1` the transcripts are rewritten instead.
pub fn check_golden() -> Vec<String> {
    let bless = std::env::var_os("A2_BLESS").is_some();
    let mut problems = Vec::new();
    for (name, args, code) in GOLDEN {
        let first = a2(args);
        let second = a2(args);
        if first.transcript() != second.transcript() {
            problems.push(format!("{name}: output differs between two runs"));
        }
        if first.code != *code {
            problems.push(format!("{name}: exit {} (expected {code})", first.code));
        }
        let path = golden_dir().join(format!("{name}.txt"));
        if bless {
            std::fs::write(&path, first.transcript()).expect("write golden");
            continue;
        }
        match std::fs::read_to_string(&path) {
            Ok(stored) if stored == first.transcript() => {}
            Ok(_) => problems.push(format!("{name}: differs from {}", path.display())),
            Err(e) => problems.push(format!("{name}: {e}")),
        }
    }
    problems
}
