//! Compiles a small C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "resgroupoid.h"

int main(void) {
    double data[8] = {3, 0, 0, 0, 0, 0, 4, 0};
    RgMatrix *m = NULL;
    if (rg_matrix_new(2, 2, data, &m) != RG_STATUS_OK) return 1;
    double v = 0;
    if (rg_schatten_norm(m, 1.0, &v) != RG_STATUS_OK || fabs(v - 7.0) > 1e-12) return 2;
    if (rg_schatten_norm(m, 0.5, &v) != RG_STATUS_INVALID_ARGUMENT) return 3;
    if (rg_last_error_message() == NULL) return 4;
    rg_matrix_free(m);
    puts("ok");
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header_dir = manifest.join("include");
    assert!(
        header_dir.join("resgroupoid.h").exists(),
        "header not generated"
    );

    // Test binaries live in target/<profile>/deps; the static library one level up.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap();
    let lib = profile_dir.join("libresgroupoid_ffi.a");
    if !lib.exists() {
        eprintln!(
            "static library not built at {}; skipping C link check",
            lib.display()
        );
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}); skipping C link check");
        return;
    }

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&header_dir)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(
        out.status.success(),
        "C program exited with {:?}",
        out.status
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
