use std::ffi::{CStr, CString};
use std::io::Write;
use std::ptr;

use ge_dbs_ffi::*;

fn last_error() -> String {
    let p = gedbs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(id: &str) -> *mut GedbsDataset {
    let id = CString::new(id).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { gedbs_dataset_generate(id.as_ptr(), 0, &mut d) },
        GedbsStatus::Ok
    );
    d
}

#[test]
fn dataset_roundtrip() {
    let d = generate("parity5");
    let (mut n, mut f, mut o) = (0, 0, 0);
    unsafe {
        assert_eq!(
            gedbs_dataset_shape(d, &mut n, &mut f, &mut o),
            GedbsStatus::Ok
        );
        gedbs_dataset_free(d);
    }
    assert_eq!((n, f, o), (32, 5, 1));
}

#[test]
fn unknown_benchmark_sets_error() {
    let id = CString::new("nope").unwrap();
    let mut d = ptr::null_mut();
    let status = unsafe { gedbs_dataset_generate(id.as_ptr(), 0, &mut d) };
    assert_eq!(status, GedbsStatus::UnknownBenchmark);
    assert!(d.is_null());
    assert!(last_error().contains("parity5"));
}

#[test]
fn null_arguments_are_rejected() {
    let mut d = ptr::null_mut();
    assert_eq!(
        unsafe { gedbs_dataset_generate(ptr::null(), 0, &mut d) },
        GedbsStatus::NullPointer
    );
    assert_eq!(
        unsafe {
            gedbs_dataset_shape(
                ptr::null(),
                ptr::null_mut(),
                ptr::null_mut(),
                ptr::null_mut(),
            )
        },
        GedbsStatus::NullPointer
    );
    unsafe {
        gedbs_dataset_free(ptr::null_mut());
        gedbs_string_free(ptr::null_mut());
    }
}

#[test]
fn csv_loading() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "a,b,y\n0,1,1\n1,1,0").unwrap();
    let path = CString::new(file.path().to_str().unwrap()).unwrap();
    let mut d = ptr::null_mut();
    let status =
        unsafe { gedbs_dataset_load_csv(path.as_ptr(), GedbsDomain::Circuit, true, 1, &mut d) };
    assert_eq!(status, GedbsStatus::Ok);
    let mut n = 0;
    unsafe {
        gedbs_dataset_shape(d, &mut n, ptr::null_mut(), ptr::null_mut());
        gedbs_dataset_free(d);
    }
    assert_eq!(n, 2);

    let missing = CString::new("/definitely/not/here.csv").unwrap();
    let status = unsafe {
        gedbs_dataset_load_csv(missing.as_ptr(), GedbsDomain::Regression, true, 1, &mut d)
    };
    assert_eq!(status, GedbsStatus::IoError);
}

#[test]
fn mapping() {
    let text = CString::new("<e> ::= <e> + <e> | x | y\n").unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(
        unsafe { gedbs_grammar_parse(text.as_ptr(), &mut g) },
        GedbsStatus::Ok
    );

    let codons = [0u8, 1, 2];
    let mut phenotype = ptr::null_mut();
    let mut used = 0;
    let status = unsafe {
        gedbs_map_genotype(
            g,
            codons.as_ptr(),
            codons.len(),
            0,
            &mut phenotype,
            &mut used,
        )
    };
    assert_eq!(status, GedbsStatus::Ok);
    assert_eq!(
        unsafe { CStr::from_ptr(phenotype) }.to_str().unwrap(),
        "x + y"
    );
    assert_eq!(used, 3);
    unsafe { gedbs_string_free(phenotype) };

    // Endless recursion without wrapping leaves no phenotype.
    let codons = [0u8];
    let status = unsafe { gedbs_map_genotype(g, codons.as_ptr(), 1, 0, &mut phenotype, &mut used) };
    assert_eq!(status, GedbsStatus::Ok);
    assert!(phenotype.is_null());
    unsafe { gedbs_grammar_free(g) };

    let bad = CString::new("<e> x").unwrap();
    assert_eq!(
        unsafe { gedbs_grammar_parse(bad.as_ptr(), &mut g) },
        GedbsStatus::ParseError
    );
    assert!(last_error().contains("::="));
}

#[test]
fn fitness_of_parity() {
    let d = generate("parity5");
    let mut g = ptr::null_mut();
    let mut f = 0.0;
    let exact = CString::new("i0 XOR i1 XOR i2 XOR i3 XOR i4").unwrap();
    unsafe {
        assert_eq!(gedbs_grammar_for_dataset(d, &mut g), GedbsStatus::Ok);
        assert_eq!(gedbs_fitness(d, exact.as_ptr(), &mut f), GedbsStatus::Ok);
        gedbs_grammar_free(g);
        gedbs_dataset_free(d);
    }
    assert_eq!(f, -32.0);
}

#[test]
fn distances() {
    let p = [0.0, 0.0];
    let q = [3.0, 4.0];
    let mut e = 0.0;
    assert_eq!(
        unsafe { gedbs_distance_euclidean(p.as_ptr(), q.as_ptr(), 2, &mut e) },
        GedbsStatus::Ok
    );
    assert_eq!(e, 5.0);

    let a = [1u8, 0, 1, 1];
    let b = [0u8, 0, 1, 0];
    let mut h = 0;
    assert_eq!(
        unsafe { gedbs_distance_hamming(a.as_ptr(), b.as_ptr(), 4, &mut h) },
        GedbsStatus::Ok
    );
    assert_eq!(h, 2);
}

#[test]
fn selection() {
    let d = generate("parity5");
    let mut plan = ptr::null_mut();
    assert_eq!(
        unsafe { gedbs_dbs_select(d, 50.0, 0, &mut plan) },
        GedbsStatus::Ok
    );
    let (mut n, mut k) = (0, 0);
    unsafe { gedbs_plan_shape(plan, &mut n, &mut k) };
    assert_eq!((n, k), (16, 2));

    let mut small = vec![0usize; 3];
    assert_eq!(
        unsafe { gedbs_plan_indices(plan, small.as_mut_ptr(), small.len()) },
        GedbsStatus::BufferTooSmall
    );
    let mut idx = vec![usize::MAX; n];
    assert_eq!(
        unsafe { gedbs_plan_indices(plan, idx.as_mut_ptr(), n) },
        GedbsStatus::Ok
    );
    idx.sort_unstable();
    idx.dedup();
    assert_eq!(idx.len(), 16);
    assert!(idx.iter().all(|&i| i < 32));

    let mut bad = ptr::null_mut();
    assert_eq!(
        unsafe { gedbs_dbs_select(d, 0.0, 0, &mut bad) },
        GedbsStatus::InvalidArgument
    );
    unsafe {
        gedbs_plan_free(plan);
        gedbs_dataset_free(d);
    }
}

#[test]
fn wilcoxon() {
    let a = [1.0, 2.0];
    let b = [3.0, 4.0];
    let mut r = GedbsRankSum::default();
    assert_eq!(
        unsafe { gedbs_wilcoxon(a.as_ptr(), 2, b.as_ptr(), 2, &mut r) },
        GedbsStatus::Ok
    );
    assert!(r.exact);
    assert!((r.p_less - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(
        unsafe { gedbs_wilcoxon(a.as_ptr(), 2, b.as_ptr(), 0, &mut r) },
        GedbsStatus::InvalidArgument
    );
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/ge_dbs.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}
