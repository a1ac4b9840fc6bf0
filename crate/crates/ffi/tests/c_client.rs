//! Compiles a small C program against the generated header and the static
//! library, then runs it.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include "topoprint.h"

int main(void) {
    size_t n = 22050 * 4;
    double *s = malloc(n * sizeof(double));
    for (size_t i = 0; i < n; i++) s[i] = sin(2.0 * M_PI * 440.0 * (double)i / 22050.0);
    TopoWaveform *w = NULL;
    if (topo_waveform_from_samples(s, n, 22050, &w) != TOPO_STATUS_OK) return 1;
    free(s);
    TopoFingerprintConfig cfg = topo_fingerprint_config_default();
    TopoFingerprint *fp = NULL;
    if (topo_fingerprint_compute(w, &cfg, &fp) != TOPO_STATUS_OK) return 2;
    TopoMatch *m = NULL;
    if (topo_compare(fp, fp, NULL, &m) != TOPO_STATUS_OK) return 3;
    printf("%zu %g %d\n", topo_fingerprint_len(fp), topo_match_error(m), topo_match_is_positive(m));
    if (topo_waveform_load_wav("/nonexistent.wav", &w) != TOPO_STATUS_IO) return 4;
    printf("%s\n", topo_last_error());
    topo_match_free(m);
    topo_fingerprint_free(fp);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libtopoprint_ffi.a");
    assert!(lib.exists(), "static library not built at {}", lib.display());

    let work = tempfile::tempdir().unwrap();
    let src = work.path().join("client.c");
    let exe = work.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c11", "-D_DEFAULT_SOURCE", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());

    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("6 0 1"));
    assert!(lines.next().unwrap().contains("/nonexistent.wav"));
}
