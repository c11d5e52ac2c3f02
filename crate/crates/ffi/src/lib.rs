//! C ABI over `ge-dbs`.
//!
//! Every function returns a [`GedbsStatus`]; results come back through out
//! pointers. On failure the message is kept per thread and can be read with
//! [`gedbs_last_error`]. Handles are opaque and must be released with their
//! `_free` function. Strings returned by the library are released with
//! [`gedbs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ge_dbs::clustering::cluster_dataset;
use ge_dbs::datasets::{self, CsvOptions, Dataset, DatasetError, Domain, Target};
use ge_dbs::dbs::{dbs_select, distance_euclidean, distance_hamming, BitString, SelectionPlan};
use ge_dbs::experiment::wilcoxon_rank_sum;
use ge_dbs::fitness::training_fitness;
use ge_dbs::ge::map_genotype;
use ge_dbs::grammar::{parse_bnf, Grammar};
use ge_dbs::grammars::default_grammar;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GedbsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    UnknownBenchmark = 3,
    ParseError = 4,
    IoError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GedbsDomain {
    Regression = 0,
    Circuit = 1,
}

/// Opaque dataset handle.
pub struct GedbsDataset(Dataset);

/// Opaque grammar handle.
pub struct GedbsGrammar(Grammar);

/// Opaque selection handle.
pub struct GedbsPlan {
    plan: SelectionPlan,
    cluster_count: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct GedbsRankSum {
    pub rank_sum: f64,
    pub p_less: f64,
    pub p_greater: f64,
    pub p_two_sided: f64,
    pub exact: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GedbsStatus, String);

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure(GedbsStatus::InvalidArgument, message.into())
    }

    fn null(what: &str) -> Self {
        Failure(GedbsStatus::NullPointer, format!("`{what}` is null"))
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        let status = match e {
            DatasetError::UnknownBenchmark { .. } | DatasetError::UnknownCircuit { .. } => {
                GedbsStatus::UnknownBenchmark
            }
            DatasetError::Io(_) => GedbsStatus::IoError,
            DatasetError::Parse { .. } | DatasetError::NonNumericCell { .. } => {
                GedbsStatus::ParseError
            }
            _ => GedbsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GedbsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            GedbsStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GedbsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::invalid(format!("`{what}` is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn gedbs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn gedbs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Generate a built-in benchmark by id.
///
/// # Safety
/// `id` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_dataset_generate(
    id: *const c_char,
    seed: u64,
    out: *mut *mut GedbsDataset,
) -> GedbsStatus {
    guard(|| {
        let id = str_arg(id, "id")?;
        let d = datasets::generate(id, seed)?;
        write_out(out, Box::into_raw(Box::new(GedbsDataset(d))), "out")
    })
}

/// Load a CSV whose last `output_count` columns are outputs.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_dataset_load_csv(
    path: *const c_char,
    domain: GedbsDomain,
    has_header: bool,
    output_count: usize,
    out: *mut *mut GedbsDataset,
) -> GedbsStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let options = CsvOptions {
            has_header,
            target: Target::Last(output_count),
            domain: match domain {
                GedbsDomain::Regression => Domain::RealSr,
                GedbsDomain::Circuit => Domain::Circuit,
            },
        };
        let d = datasets::load_csv(Path::new(path), &options)?;
        write_out(out, Box::into_raw(Box::new(GedbsDataset(d))), "out")
    })
}

/// # Safety
/// `dataset` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gedbs_dataset_free(dataset: *mut GedbsDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// Case count, feature count and output count.
///
/// # Safety
/// `dataset` must be a live handle; out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn gedbs_dataset_shape(
    dataset: *const GedbsDataset,
    cases: *mut usize,
    features: *mut usize,
    outputs: *mut usize,
) -> GedbsStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        for (p, v) in [
            (cases, d.len()),
            (features, d.feature_count()),
            (outputs, d.output_count()),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Parse BNF text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_grammar_parse(
    text: *const c_char,
    out: *mut *mut GedbsGrammar,
) -> GedbsStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let g = parse_bnf(text).map_err(|e| Failure(GedbsStatus::ParseError, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(GedbsGrammar(g))), "out")
    })
}

/// The built-in grammar matching a dataset.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_grammar_for_dataset(
    dataset: *const GedbsDataset,
    out: *mut *mut GedbsGrammar,
) -> GedbsStatus {
    guard(|| {
        let g = default_grammar(&handle(dataset, "dataset")?.0);
        write_out(out, Box::into_raw(Box::new(GedbsGrammar(g))), "out")
    })
}

/// # Safety
/// `grammar` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gedbs_grammar_free(grammar: *mut GedbsGrammar) {
    if !grammar.is_null() {
        drop(Box::from_raw(grammar));
    }
}

/// Map a genotype. On success `*phenotype` is a new string, or null when
/// the mapping is invalid; `*effective_length` counts consumed codons.
///
/// # Safety
/// `grammar` must be a live handle, `codons` must point to `len` bytes and
/// both out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_map_genotype(
    grammar: *const GedbsGrammar,
    codons: *const u8,
    len: usize,
    max_wraps: usize,
    phenotype: *mut *mut c_char,
    effective_length: *mut usize,
) -> GedbsStatus {
    guard(|| {
        let g = &handle(grammar, "grammar")?.0;
        let codons = slice_arg(codons, len, "codons")?;
        if phenotype.is_null() {
            return Err(Failure::null("phenotype"));
        }
        let m = map_genotype(codons, g, max_wraps);
        write_out(effective_length, m.effective_length, "effective_length")?;
        let text = match m.phenotype {
            Some(p) => CString::new(p)
                .map_err(|_| Failure::invalid("phenotype contains NUL"))?
                .into_raw(),
            None => ptr::null_mut(),
        };
        phenotype.write(text);
        Ok(())
    })
}

/// Engine fitness of a phenotype on a dataset: RMSE for regression, negated
/// hit count for circuits, 1e12 when the phenotype is invalid.
///
/// # Safety
/// `dataset` must be a live handle, `phenotype` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_fitness(
    dataset: *const GedbsDataset,
    phenotype: *const c_char,
    out: *mut f64,
) -> GedbsStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        let p = str_arg(phenotype, "phenotype")?;
        write_out(out, training_fitness(p, d), "out")
    })
}

/// # Safety
/// `p` and `q` must point to `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_distance_euclidean(
    p: *const f64,
    q: *const f64,
    len: usize,
    out: *mut f64,
) -> GedbsStatus {
    guard(|| {
        let p = slice_arg(p, len, "p")?;
        let q = slice_arg(q, len, "q")?;
        let d = distance_euclidean(p, q).map_err(|e| Failure::invalid(e.to_string()))?;
        write_out(out, d, "out")
    })
}

/// Hamming distance between two bit vectors given one byte per bit
/// (zero is 0, anything else is 1).
///
/// # Safety
/// `p` and `q` must point to `len` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_distance_hamming(
    p: *const u8,
    q: *const u8,
    len: usize,
    out: *mut u32,
) -> GedbsStatus {
    guard(|| {
        let bits = |s: &[u8]| BitString::from_bools(&s.iter().map(|&b| b != 0).collect::<Vec<_>>());
        let p = bits(slice_arg(p, len, "p")?);
        let q = bits(slice_arg(q, len, "q")?);
        let d = distance_hamming(&p, &q).map_err(|e| Failure::invalid(e.to_string()))?;
        write_out(out, d, "out")
    })
}

/// Cluster the dataset (seeded) and select `budget_percent` of each cluster.
///
/// # Safety
/// `dataset` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_dbs_select(
    dataset: *const GedbsDataset,
    budget_percent: f64,
    seed: u64,
    out: *mut *mut GedbsPlan,
) -> GedbsStatus {
    guard(|| {
        let d = &handle(dataset, "dataset")?.0;
        let assignment = cluster_dataset(d, seed).map_err(|e| Failure::invalid(e.to_string()))?;
        let plan = dbs_select(d, &assignment, budget_percent)
            .map_err(|e| Failure::invalid(e.to_string()))?;
        let plan = GedbsPlan {
            plan,
            cluster_count: assignment.k(),
        };
        write_out(out, Box::into_raw(Box::new(plan)), "out")
    })
}

/// Selected count and cluster count.
///
/// # Safety
/// `plan` must be a live handle; out pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn gedbs_plan_shape(
    plan: *const GedbsPlan,
    selected: *mut usize,
    clusters: *mut usize,
) -> GedbsStatus {
    guard(|| {
        let p = handle(plan, "plan")?;
        if !selected.is_null() {
            selected.write(p.plan.len());
        }
        if !clusters.is_null() {
            clusters.write(p.cluster_count);
        }
        Ok(())
    })
}

/// Copy the selected case indices into `buf`, which must hold at least the
/// selected count.
///
/// # Safety
/// `plan` must be a live handle and `buf` must point to `capacity` writable
/// elements.
#[no_mangle]
pub unsafe extern "C" fn gedbs_plan_indices(
    plan: *const GedbsPlan,
    buf: *mut usize,
    capacity: usize,
) -> GedbsStatus {
    guard(|| {
        let idx = &handle(plan, "plan")?.plan.selected_indices;
        if capacity < idx.len() {
            return Err(Failure(
                GedbsStatus::BufferTooSmall,
                format!("need {} slots, got {capacity}", idx.len()),
            ));
        }
        if idx.is_empty() {
            return Ok(());
        }
        if buf.is_null() {
            return Err(Failure::null("buf"));
        }
        ptr::copy_nonoverlapping(idx.as_ptr(), buf, idx.len());
        Ok(())
    })
}

/// # Safety
/// `plan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gedbs_plan_free(plan: *mut GedbsPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Wilcoxon rank-sum test of `a` against `b`.
///
/// # Safety
/// `a` and `b` must point to `na` and `nb` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gedbs_wilcoxon(
    a: *const f64,
    na: usize,
    b: *const f64,
    nb: usize,
    out: *mut GedbsRankSum,
) -> GedbsStatus {
    guard(|| {
        let a = slice_arg(a, na, "a")?;
        let b = slice_arg(b, nb, "b")?;
        let r = wilcoxon_rank_sum(a, b).map_err(|e| Failure::invalid(e.to_string()))?;
        let r = GedbsRankSum {
            rank_sum: r.rank_sum,
            p_less: r.p_less,
            p_greater: r.p_greater,
            p_two_sided: r.p_two_sided,
            exact: r.exact,
        };
        write_out(out, r, "out")
    })
}
