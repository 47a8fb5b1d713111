use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use flowdec_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(flowdec_last_error()) }.to_string_lossy().into_owned()
}

fn small() -> *mut FlowdecInstance {
    let mut inst = ptr::null_mut();
    let name = CString::new("small").unwrap();
    assert_eq!(unsafe { flowdec_instance_bundled(name.as_ptr(), &mut inst) }, FlowdecStatus::Ok);
    inst
}

#[test]
fn solve_small_through_the_abi() {
    let inst = small();
    assert_eq!(unsafe { flowdec_instance_edge_count(inst) }, 12);
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { flowdec_solve(inst, 1.0, 0.0, ptr::null(), &mut sol) }, FlowdecStatus::Ok);
    assert_eq!(last_error(), "");
    unsafe {
        assert_eq!(flowdec_solution_path_count(sol), 5);
        assert_eq!(flowdec_solution_objective(sol), 5.0);
        assert_eq!(flowdec_solution_is_optimal(sol), 1);
        let mut weights = Vec::new();
        for i in 0..5 {
            let (mut w, mut len) = (0u64, 0usize);
            assert_eq!(flowdec_solution_path(sol, i, &mut w, &mut len), FlowdecStatus::Ok);
            let mut edges = vec![0u32; len];
            assert_eq!(flowdec_solution_path_edges(sol, inst, i, edges.as_mut_ptr(), len), FlowdecStatus::Ok);
            assert!(edges.last().is_some_and(|&e| e == 10 || e == 11), "{edges:?}");
            weights.push(w);
        }
        weights.sort();
        assert_eq!(weights, vec![1, 2, 2, 2, 3]);
        let (mut w, mut len) = (0u64, 0usize);
        assert_eq!(flowdec_solution_path(sol, 5, &mut w, &mut len), FlowdecStatus::OutOfRange);
        assert!(!last_error().is_empty());
        flowdec_solution_free(sol);
        flowdec_instance_free(inst);
    }
}

#[test]
fn errors_are_reported_with_codes() {
    let mut inst = ptr::null_mut();
    let bad = CString::new("{ not json").unwrap();
    assert_eq!(unsafe { flowdec_instance_parse(bad.as_ptr(), &mut inst) }, FlowdecStatus::Parse);
    assert!(last_error().contains("parse"));
    assert!(inst.is_null());
    assert_eq!(unsafe { flowdec_instance_parse(ptr::null(), &mut inst) }, FlowdecStatus::NullPointer);
    let unknown = CString::new("nope").unwrap();
    assert_eq!(unsafe { flowdec_instance_bundled(unknown.as_ptr(), &mut inst) }, FlowdecStatus::InvalidInput);
    let mut sol = ptr::null_mut();
    assert_eq!(unsafe { flowdec_solve(ptr::null(), 1.0, 0.0, ptr::null(), &mut sol) }, FlowdecStatus::NullPointer);
    unsafe {
        flowdec_instance_free(ptr::null_mut());
        flowdec_solution_free(ptr::null_mut());
        flowdec_adjustable_free(ptr::null_mut());
    }
}

#[test]
fn infeasible_instance() {
    let text = r#"{"name": "x", "nodes": ["s", "a", "t"], "source": "s", "sink": "t",
        "edges": [{"id": 0, "from": "s", "to": "a", "lower": 1, "upper": 2},
                  {"id": 1, "from": "a", "to": "t", "lower": 3, "upper": 4}]}"#;
    let text = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(unsafe { flowdec_instance_parse(text.as_ptr(), &mut inst) }, FlowdecStatus::Ok);
    let mut sol = ptr::null_mut();
    let opts = FlowdecOptions { kbar: 3, wmax: 4, time_limit: 10.0 };
    assert_eq!(unsafe { flowdec_solve(inst, 1.0, 1.0, &opts, &mut sol) }, FlowdecStatus::Infeasible);
    unsafe { flowdec_instance_free(inst) };
}

#[test]
fn adjustable_single_scenario() {
    let inst = small();
    let scenario = r#"{"nominal": null, "gamma": null, "scenarios": [
        {"lower": {"0": 4, "1": 3, "2": 3, "3": 2, "4": 2, "5": 1, "6": 2, "7": 3, "8": 3, "9": 2, "10": 3, "11": 7},
         "upper": {"0": 4, "1": 3, "2": 3, "3": 2, "4": 2, "5": 1, "6": 2, "7": 3, "8": 3, "9": 2, "10": 3, "11": 7}}]}"#;
    let scenario = CString::new(scenario).unwrap();
    for f in [FlowdecFormulation::Ma, FlowdecFormulation::La, FlowdecFormulation::Naive] {
        let mut out = ptr::null_mut();
        assert_eq!(unsafe { flowdec_adjustable_solve(inst, scenario.as_ptr(), f, ptr::null(), &mut out) }, FlowdecStatus::Ok);
        unsafe {
            assert_eq!(flowdec_adjustable_objective(out), 15.0, "{f:?}");
            assert_eq!(flowdec_adjustable_path_count(out) as u64 + flowdec_adjustable_weight(out), 15);
            flowdec_adjustable_free(out);
        }
    }
    unsafe { flowdec_instance_free(inst) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(flowdec_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_abi_and_compiles() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/flowdec.h")).unwrap();
    for name in ["flowdec_solve", "flowdec_last_error", "flowdec_adjustable_solve", "FLOWDEC_STATUS_INFEASIBLE", "typedef struct FlowdecInstance FlowdecInstance"] {
        assert!(header.contains(name), "{name} missing from header");
    }
    // Syntax check with whatever C compiler is around.
    for cc in ["cc", "clang", "gcc"] {
        let status = Command::new(cc)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", &format!("{dir}/include/flowdec.h")])
            .status();
        if let Ok(status) = status {
            assert!(status.success(), "{cc} rejected the header");
            return;
        }
    }
}
