//! Drives the `tauh` command line in-process: writes a spec and a function
//! file, transforms it and verifies the group.
//!
//! Run with `cargo run --example command_line`.

use std::io;

use tauh::cli::run;

fn main() -> io::Result<()> {
    let dir = std::env::temp_dir().join(format!("tauh-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let spec = dir.join("z6.json");
    let function = dir.join("f.json");
    std::fs::write(
        &spec,
        r#"{"kind": "finite_semidirect", "schema_version": 1, "name": "ℤ_2 ⋉ ℤ_6",
            "divisors": [6],
            "h": [{"label": "e", "matrix": [[1]]}, {"label": "s", "matrix": [[5]]}],
            "cayley": [[0, 1], [1, 0]]}"#,
    )?;
    std::fs::write(
        &function,
        r#"{"schema_version": 1, "side": "primal",
            "entries": [{"h": "s", "k_or_omega": [2], "re": 1.0, "im": 0.0}]}"#,
    )?;

    let (mut out, mut err) = (io::stdout(), io::stderr());
    let spec = spec.to_str().unwrap();
    let code = run(["tauh", "transform", spec, function.to_str().unwrap(), "--variant", "generalized"], &mut out, &mut err);
    println!("transform exit code {code}");
    let code = run(["tauh", "verify", spec, "--suite", "plancherel", "--trials", "10"], &mut out, &mut err);
    println!("verify exit code {code}");
    std::fs::remove_dir_all(&dir)
}
