use std::ffi::{CStr, CString};
use std::ptr;

use stable_fixtures_ffi::*;

const TABLE4: &str = "5\n2 2 4 3 5\n2 4 3 1 5\n2 1 5 2 4\n2 3 1 2 5\n1 3 1 2 4\n";
const TABLE3: &str = "5\n2 2 3 4 5\n2 1 3 5 4\n2 1 2 4 5\n2 1 2 3 5\n2 2 1 3 4\n";

fn parse(text: &str) -> *mut SfxInstance {
    let c = CString::new(text).unwrap();
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sfx_instance_parse(c.as_ptr(), &mut h) }, SfxStatus::Ok);
    h
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { sfx_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(sfx_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn gsp_and_solve() {
    let h = parse(TABLE4);
    assert_eq!(unsafe { sfx_instance_agents(h) }, 5);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sfx_gsp(h, true, &mut s) }, SfxStatus::Ok);
    assert_eq!(take(s), "( 1 2 3 )\n( 1 4 )\n( 2 4 )\n( 3 5 )\n");
    assert_eq!(unsafe { sfx_solve(h, &mut s) }, SfxStatus::Unsolvable);
    assert_eq!(take(s), "( 1 2 3 )\n");
    assert!(last_error().contains("no stable matching"));
    unsafe { sfx_instance_free(h) };

    let h = parse(TABLE3);
    assert_eq!(unsafe { sfx_solve(h, &mut s) }, SfxStatus::Ok);
    assert_eq!(take(s), "1 2\n1 3\n2 3\n4 5\n");
    unsafe { sfx_instance_free(h) };
}

#[test]
fn near_feasible_and_ilp() {
    let h = parse(TABLE4);
    let mut caps = [0u32; 5];
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sfx_near_feasible(h, caps.as_mut_ptr(), 5, &mut s) }, SfxStatus::Ok);
    assert_eq!(caps, [3, 2, 2, 2, 1]);
    assert_eq!(take(s), "1 2\n1 3\n1 4\n2 4\n3 5\n");
    assert_eq!(unsafe { sfx_near_feasible(h, caps.as_mut_ptr(), 4, &mut s) }, SfxStatus::BufferTooSmall);

    let (mut num, mut den) = (0i64, 0i64);
    assert_eq!(unsafe { sfx_ilp_optimum(h, SfxObjective::Reduced, 0, &mut num, &mut den) }, SfxStatus::Ok);
    assert_eq!((num, den), (6, 1));
    unsafe { sfx_instance_free(h) };
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    let bad = CString::new("3\n1 2\n").unwrap();
    assert_eq!(unsafe { sfx_instance_parse(bad.as_ptr(), &mut h) }, SfxStatus::Parse);
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { sfx_instance_parse(ptr::null(), &mut h) }, SfxStatus::NullPointer);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sfx_gsp(ptr::null(), false, &mut s) }, SfxStatus::NullPointer);
    assert_eq!(unsafe { sfx_instance_random(1, 1, 0, &mut h) }, SfxStatus::InvalidInstance);
    unsafe { sfx_instance_free(ptr::null_mut()) };
    unsafe { sfx_string_free(ptr::null_mut()) };
}

#[test]
fn random_round_trip() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { sfx_instance_random(8, 2, 11, &mut h) }, SfxStatus::Ok);
    let mut caps = [0u32; 8];
    assert_eq!(unsafe { sfx_instance_caps(h, caps.as_mut_ptr(), 8) }, SfxStatus::Ok);
    assert_eq!(caps, [2; 8]);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { sfx_instance_to_text(h, &mut s) }, SfxStatus::Ok);
    let text = take(s);
    let h2 = parse(&text);
    assert_eq!(unsafe { sfx_instance_to_text(h2, &mut s) }, SfxStatus::Ok);
    assert_eq!(take(s), text);
    unsafe {
        sfx_instance_free(h);
        sfx_instance_free(h2);
    }
}

/// The generated header compiles as C.
#[test]
fn header_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let header = dir.join("stable_fixtures.h");
    let text = std::fs::read_to_string(&header).unwrap();
    assert!(text.contains("sfx_instance_parse"));
    assert!(text.contains("SFX_STATUS_UNSOLVABLE"));
    let Ok(o) = std::process::Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() else {
        eprintln!("no C compiler found; syntax check skipped");
        return;
    };
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
