use std::ffi::{c_char, CStr, CString};
use std::ptr;

use gck_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    gck_string_free(p);
    s
}

unsafe fn last_error() -> String {
    let p = gck_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_string()
}

const GLUED: &str = "v i\nv a\nv b\ne i i 3\ne a a 2\ne b b 2\ne a b 1\ne b a 1\ne a i 1\n";

#[test]
fn k_groups_of_a_finite_graph() {
    unsafe {
        let src = c("v a\nv b\ne a a 2\ne a b 1\ne b a 1\ne b b 2\n");
        let mut g = ptr::null_mut();
        assert_eq!(gck_graph_parse(src.as_ptr(), &mut g), GckStatus::Ok);
        let mut n = 0usize;
        assert_eq!(gck_graph_vertex_count(g, &mut n), GckStatus::Ok);
        assert_eq!(n, 2);
        let (mut k0, mut k1) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(gck_graph_k_groups(g, &mut k0, &mut k1), GckStatus::Ok);
        assert_eq!(take(k0), "Z");
        assert_eq!(take(k1), "Z");
        gck_graph_free(g);
    }
}

#[test]
fn staged_graph_reports_a_colimit() {
    unsafe {
        let src = c("v x\nstationary 1,1:2 x\n");
        let mut g = ptr::null_mut();
        assert_eq!(gck_graph_parse(src.as_ptr(), &mut g), GckStatus::Ok);
        let (mut k0, mut k1) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(gck_graph_k_groups(g, &mut k0, &mut k1), GckStatus::Ok);
        let k0 = take(k0);
        assert!(k0.starts_with("colim(Z via"), "{k0}");
        gck_string_free(k1);
        gck_graph_free(g);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let src = c("v a\ne a b 1\n");
        let mut g = ptr::null_mut();
        assert_eq!(gck_graph_parse(src.as_ptr(), &mut g), GckStatus::Parse);
        assert!(g.is_null());
        assert!(last_error().contains("line 2"));
        assert_eq!(gck_graph_parse(ptr::null(), &mut g), GckStatus::NullArgument);
        let mut n = 0usize;
        assert_eq!(gck_graph_vertex_count(ptr::null(), &mut n), GckStatus::NullArgument);
        let ok = c("v a\n");
        assert_eq!(gck_graph_parse(ok.as_ptr(), ptr::null_mut()), GckStatus::NullArgument);
        assert_eq!(gck_graph_parse(ok.as_ptr(), &mut g), GckStatus::Ok);
        assert!(gck_last_error().is_null());
        gck_graph_free(g);
        gck_graph_free(ptr::null_mut());
        gck_invariant_free(ptr::null_mut());
        gck_string_free(ptr::null_mut());
    }
}

#[test]
fn invariant_round_trip_and_resynthesis() {
    unsafe {
        let src = c(GLUED);
        let mut g = ptr::null_mut();
        assert_eq!(gck_graph_parse(src.as_ptr(), &mut g), GckStatus::Ok);
        let ideal = c("i");
        let mut inv = ptr::null_mut();
        assert_eq!(gck_invariant_from_graph(g, ideal.as_ptr(), &mut inv), GckStatus::Ok, "{}", last_error());
        let mut text = ptr::null_mut();
        assert_eq!(gck_invariant_to_text(inv, &mut text), GckStatus::Ok);
        let text = take(text);
        let again_src = c(&text);
        let mut again = ptr::null_mut();
        assert_eq!(gck_invariant_parse(again_src.as_ptr(), &mut again), GckStatus::Ok);

        let mut verdict = GckVerdict::Fail;
        let mut report = ptr::null_mut();
        assert_eq!(gck_invariant_check_hypotheses(again, &mut verdict, &mut report), GckStatus::Ok);
        let report = take(report);
        assert!(!report.is_empty());

        let mut out = ptr::null_mut();
        assert_eq!(gck_synthesize(again, &mut out, &mut verdict), GckStatus::Ok, "{}", last_error());
        assert_eq!(verdict, GckVerdict::Pass);
        let mut n = 0usize;
        assert_eq!(gck_graph_vertex_count(out, &mut n), GckStatus::Ok);
        assert!(n >= 3);
        gck_graph_free(out);
        gck_invariant_free(again);
        gck_invariant_free(inv);
        gck_graph_free(g);
    }
}

#[test]
fn extension_check_returns_a_verdict() {
    unsafe {
        let src = c(gck::fixtures::TABLE[0].text);
        let mut verdict = GckVerdict::Pass;
        let mut report = ptr::null_mut();
        assert_eq!(gck_check_extension(src.as_ptr(), &mut verdict, &mut report), GckStatus::Ok);
        assert_eq!(verdict, GckVerdict::Fail);
        assert!(take(report).contains(gck::fixtures::TABLE[0].fails));
        assert_eq!(gck_check_extension(src.as_ptr(), &mut verdict, ptr::null_mut()), GckStatus::Ok);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/gck.h")).unwrap();
    for f in [
        "gck_last_error",
        "gck_string_free",
        "gck_graph_parse",
        "gck_graph_free",
        "gck_graph_vertex_count",
        "gck_graph_to_text",
        "gck_graph_k_groups",
        "gck_invariant_from_graph",
        "gck_invariant_parse",
        "gck_invariant_free",
        "gck_invariant_to_text",
        "gck_check_extension",
        "gck_invariant_check_hypotheses",
        "gck_synthesize",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from gck.h");
    }
    assert!(header.contains("typedef struct GckGraph GckGraph;"));
}
