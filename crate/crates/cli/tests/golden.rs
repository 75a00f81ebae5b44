//! Runs the binary on pinned inputs and compares stdout with the files in
//! `tests/golden`. `UPDATE_GOLDEN=1` rewrites them.

use std::path::PathBuf;
use std::process::Command;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    exit: i32,
}

const CASES: &[Case] = &[
    Case {
        name: "bsupp_p7_consecutive.json",
        args: &["bsupp", "--p", "7", "--L", "0,1,2"],
        exit: 0,
    },
    Case {
        name: "bsupp_p5.json",
        args: &["bsupp", "--p", "5", "--L", "0,2"],
        exit: 0,
    },
    Case {
        name: "bsupp_integers.json",
        args: &["bsupp", "--L", "1", "--integers"],
        exit: 0,
    },
    Case {
        name: "bsupp_p5.csv",
        args: &["--format", "csv", "bsupp", "--p", "5", "--L", "0,2"],
        exit: 0,
    },
    Case {
        name: "bound_sharp.json",
        args: &[
            "bound",
            "inputs/sharp_4_2_2.txt",
            "--theorem",
            "multilevel",
            "--K",
            "1,2",
            "--L",
            "0,1",
        ],
        exit: 0,
    },
    Case {
        name: "bound_empty.json",
        args: &[
            "bound",
            "inputs/empty_4.txt",
            "--theorem",
            "multilevel",
            "--K",
            "1,2",
            "--L",
            "0,1",
        ],
        exit: 0,
    },
    Case {
        name: "bound_star.json",
        args: &[
            "bound",
            "inputs/star_5.json",
            "--theorem",
            "multilevel",
            "--K",
            "2",
            "--L",
            "0,1",
        ],
        exit: 0,
    },
    Case {
        name: "bound_violated.json",
        args: &[
            "bound",
            "inputs/triangle_3.txt",
            "--theorem",
            "multilevel",
            "--K",
            "2",
            "--L",
            "0",
        ],
        exit: 0,
    },
    Case {
        name: "certificate_singletons.json",
        args: &[
            "certificate",
            "inputs/singletons_3.txt",
            "--K",
            "1",
            "--L",
            "0",
        ],
        exit: 0,
    },
    Case {
        name: "certificate_gram_pairs.json",
        args: &[
            "certificate",
            "inputs/pairs_5.txt",
            "--kind",
            "gram",
            "--p",
            "5",
            "--L",
            "0,1",
        ],
        exit: 0,
    },
    Case {
        name: "certificate_unchecked_triangle.json",
        args: &[
            "certificate",
            "inputs/triangle_3.txt",
            "--unchecked",
            "--K",
            "2",
            "--L",
            "0",
        ],
        exit: 0,
    },
    Case {
        name: "certificate_triangle_refused.txt",
        args: &[
            "--format",
            "text",
            "certificate",
            "inputs/triangle_3.txt",
            "--K",
            "2",
            "--L",
            "0",
        ],
        exit: 2,
    },
    Case {
        name: "search_unattainable.json",
        args: &[
            "search",
            "--n",
            "5",
            "--p",
            "5",
            "--K",
            "2,4",
            "--L",
            "0,1",
            "--threads",
            "1",
        ],
        exit: 0,
    },
    Case {
        name: "search_timeout.json",
        args: &[
            "search",
            "--n",
            "5",
            "--K",
            "2,3",
            "--L",
            "1",
            "--time-budget",
            "0",
            "--threads",
            "1",
        ],
        exit: 3,
    },
    Case {
        name: "search_over_cap.txt",
        args: &["search", "--n", "11", "--K", "1", "--L", "0"],
        exit: 3,
    },
    Case {
        name: "sweep_sharpness.csv",
        args: &[
            "--format",
            "csv",
            "sweep",
            "sharpness",
            "--n-max",
            "5",
            "--s-max",
            "3",
            "--threads",
            "1",
        ],
        exit: 0,
    },
    Case {
        name: "shadow_star.txt",
        args: &["--format", "text", "shadow", "inputs/star_5.json"],
        exit: 0,
    },
    Case {
        name: "shadow_star.json",
        args: &["shadow", "inputs/star_5.json", "--levels", "1,2"],
        exit: 0,
    },
    Case {
        name: "shadow_bad_element.txt",
        args: &["shadow", "inputs/bad_element.txt"],
        exit: 2,
    },
    Case {
        name: "generate_seed3.txt",
        args: &[
            "--format", "text", "generate", "--n", "5", "--K", "2", "--L", "0,1", "--seed", "3",
        ],
        exit: 0,
    },
];

#[test]
fn golden_outputs() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut mismatches = Vec::new();
    for case in CASES {
        let out = Command::new(env!("CARGO_BIN_EXE_lintersect"))
            .args(case.args)
            .current_dir(dir())
            .env_remove("LINTERSECT_MATRIX_CAP")
            .env_remove("LINTERSECT_SEARCH_CAP")
            .env_remove("LINTERSECT_TIME_BUDGET")
            .output()
            .expect("binary runs");
        assert_eq!(
            out.status.code(),
            Some(case.exit),
            "{}: {}",
            case.name,
            String::from_utf8_lossy(&out.stderr)
        );
        // Refusals without a result pin stderr.
        let actual = if out.stdout.is_empty() {
            &out.stderr
        } else {
            &out.stdout
        };
        let path = dir().join(case.name);
        if update {
            std::fs::write(&path, actual).unwrap();
            continue;
        }
        let expected = std::fs::read(&path).unwrap_or_default();
        if expected != *actual {
            mismatches.push(format!(
                "{}:\n{}",
                case.name,
                String::from_utf8_lossy(actual)
            ));
        }
    }
    assert!(
        mismatches.is_empty(),
        "golden mismatches:\n{}",
        mismatches.join("\n")
    );
}

#[test]
fn json_outputs_carry_schema_and_parse() {
    for case in CASES.iter().filter(|c| c.name.ends_with(".json")) {
        let text = std::fs::read_to_string(dir().join(case.name)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], "1", "{}", case.name);
    }
}

#[test]
fn family_json_round_trips_through_generate() {
    let out = Command::new(env!("CARGO_BIN_EXE_lintersect"))
        .args([
            "generate", "--n", "6", "--K", "3", "--L", "1", "--seed", "9",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let dir = std::env::temp_dir().join(format!("lintersect-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("family.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let shadow = Command::new(env!("CARGO_BIN_EXE_lintersect"))
        .args(["shadow", path.to_str().unwrap(), "--levels", "0"])
        .output()
        .unwrap();
    assert!(
        shadow.status.success(),
        "{}",
        String::from_utf8_lossy(&shadow.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&shadow.stdout).unwrap();
    let generated: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["family_size"],
        generated["sets"].as_array().unwrap().len()
    );
    std::fs::remove_dir_all(&dir).ok();
}
