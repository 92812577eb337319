use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use circle_subgroups_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    cs_string_free(p);
    s
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn chain_lifecycle_and_terms() {
    unsafe {
        let mut chain = ptr::null_mut();
        assert_eq!(cs_chain_new(c("ratios:2,3:repeat").as_ptr(), 4, &mut chain), CsStatus::Ok);
        assert_eq!(cs_chain_len(chain), 4);
        let mut out = ptr::null_mut();
        assert_eq!(cs_chain_term(chain, 6, &mut out), CsStatus::Ok);
        assert_eq!(take(out), "216");
        assert_eq!(cs_chain_len(chain), 6);
        assert_eq!(cs_chain_term(chain, 0, &mut out), CsStatus::OutOfHorizon);
        let mut h = 0u64;
        assert_eq!(cs_derived_horizon(chain, 3, &mut h), CsStatus::Ok);
        assert_eq!(h, 1 + 1 + 2 + 1);
        cs_chain_free(chain);
        cs_chain_free(ptr::null_mut());
    }
}

#[test]
fn verdicts_as_json() {
    unsafe {
        let mut chain = ptr::null_mut();
        assert_eq!(cs_chain_new(c("geometric:2").as_ptr(), 1, &mut chain), CsStatus::Ok);
        let mut out = ptr::null_mut();
        assert_eq!(cs_member(chain, c("1/3").as_ptr(), 0, &mut out), CsStatus::Ok);
        assert_eq!(json(&take(out))["status"], "non_member");
        assert_eq!(cs_member(chain, c("3/8").as_ptr(), 1, &mut out), CsStatus::Ok);
        assert_eq!(json(&take(out))["status"], "member");
        assert_eq!(cs_smember(chain, c("1/3").as_ptr(), 50, &mut out), CsStatus::Ok);
        assert_eq!(json(&take(out))["certificate"]["kind"], "density_lower_bound");
        assert_eq!(cs_block_counts(chain, c("1/3").as_ptr(), c("1/10").as_ptr(), 4, &mut out), CsStatus::Ok);
        assert_eq!(json(&take(out)).as_array().unwrap().len(), 4);
        cs_chain_free(chain);
    }
}

#[test]
fn density_and_seminorm() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(cs_upper_density(c("every:2").as_ptr(), 1000, 10, &mut out), CsStatus::Ok);
        assert_eq!(json(&take(out))["sup_tail_partial"], "1/2");
        assert_eq!(cs_seminorm(c("-7/3").as_ptr(), &mut out), CsStatus::Ok);
        assert_eq!(take(out), "1/3");
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(cs_seminorm(ptr::null(), &mut out), CsStatus::NullPointer);
        assert!(out.is_null());
        assert_eq!(cs_seminorm(c("1/0").as_ptr(), ptr::null_mut()), CsStatus::ParseRational);
        let msg = CStr::from_ptr(cs_last_error()).to_str().unwrap();
        assert!(msg.contains("1/0"), "{msg}");
        let mut chain = ptr::null_mut();
        assert_eq!(cs_chain_new(c("explicit:2,5").as_ptr(), 2, &mut chain), CsStatus::NotDivisibilityChain);
        assert!(chain.is_null());
        assert_eq!(cs_chain_new(c("nope").as_ptr(), 2, &mut chain), CsStatus::InvalidDescriptor);
        assert_eq!(cs_member(ptr::null(), c("1/2").as_ptr(), 0, &mut out), CsStatus::NullPointer);
        assert_eq!(cs_upper_density(c("every:2").as_ptr(), 10, 11, &mut out), CsStatus::Hypothesis);
        let bad = [0xffu8, 0];
        assert_eq!(cs_seminorm(bad.as_ptr().cast(), &mut out), CsStatus::InvalidUtf8);
    }
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn committed_header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/circle_subgroups.h")).unwrap();
    let source = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Static library next to the test binary's `deps` directory, if cargo built it.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libcircle_subgroups_ffi.a");
    lib.exists().then_some(lib)
}

fn have_cc() -> bool {
    Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success())
}

#[test]
fn c_program_links_against_header_and_staticlib() {
    let Some(lib) = static_lib() else {
        eprintln!("static library not built; skipping C link check");
        return;
    };
    if !have_cc() {
        eprintln!("no C compiler; skipping C link check");
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("cs-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
    std::fs::remove_dir_all(&out_dir).ok();
}
