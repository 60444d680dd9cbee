//! C ABI for `wsn-sim`.
//!
//! Simulations live behind an opaque `WsnSimulation` handle. Every fallible
//! call returns a `WsnStatus`; on failure a description can be fetched with
//! [`wsn_last_error`], which is per thread and overwritten by the next failure.
//! The header `include/wsn_sim.h` is regenerated by cbindgen on every build.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use wsn_sim::output::{emit_run, Format, RunManifest};
use wsn_sim::{utility_pct, Error, RadioParams, SimConfig, Simulation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    Io = 4,
    /// The simulation has no alive nodes left or reached its round cap.
    Finished = 5,
    OutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsnStrategy {
    Direct = 0,
    Mte = 1,
    Diffusion = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsnFormat {
    Csv = 0,
    Json = 1,
}

/// Radio constants; see `wsn_radio_params_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsnRadioParams {
    pub e_tx_elec: f64,
    pub e_rx_elec: f64,
    pub eps_amp: f64,
    pub path_loss_exponent: f64,
    pub idle_power: f64,
    pub round_period: f64,
    pub link_bandwidth: f64,
    pub packet_bits: u64,
    pub ctrl_bits: u64,
    pub initial_energy: f64,
}

impl From<RadioParams> for WsnRadioParams {
    fn from(p: RadioParams) -> Self {
        Self {
            e_tx_elec: p.e_tx_elec,
            e_rx_elec: p.e_rx_elec,
            eps_amp: p.eps_amp,
            path_loss_exponent: p.path_loss_exponent,
            idle_power: p.idle_power,
            round_period: p.round_period,
            link_bandwidth: p.link_bandwidth,
            packet_bits: p.packet_bits,
            ctrl_bits: p.ctrl_bits,
            initial_energy: p.initial_energy,
        }
    }
}

impl From<WsnRadioParams> for RadioParams {
    fn from(p: WsnRadioParams) -> Self {
        Self {
            e_tx_elec: p.e_tx_elec,
            e_rx_elec: p.e_rx_elec,
            eps_amp: p.eps_amp,
            path_loss_exponent: p.path_loss_exponent,
            idle_power: p.idle_power,
            round_period: p.round_period,
            link_bandwidth: p.link_bandwidth,
            packet_bits: p.packet_bits,
            ctrl_bits: p.ctrl_bits,
            initial_energy: p.initial_energy,
        }
    }
}

/// Counters for one round.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WsnRoundStats {
    pub round: u64,
    pub originated: u64,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
    pub alive_after: u64,
}

/// Lifetime metrics. Rounds are 0 and `utility_pct` is NaN until known.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WsnLifetime {
    pub first_death_round: u64,
    pub last_death_round: u64,
    pub utility_pct: f64,
    pub rounds_run: u64,
    pub truncated: bool,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
    pub energy_used_uj: f64,
}

/// Opaque simulation handle.
pub struct WsnSimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: WsnStatus, msg: impl Into<String>) -> WsnStatus {
    set_error(msg);
    status
}

fn from_error(err: Error) -> WsnStatus {
    let status = match err {
        Error::Argument { .. } => WsnStatus::InvalidArgument,
        Error::Io { .. } | Error::Csv { .. } | Error::Json { .. } => WsnStatus::Io,
        _ => WsnStatus::InvalidConfig,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> WsnStatus) -> WsnStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WsnStatus::Panic, "internal panic"))
}

/// # Safety
/// `p` must be NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<Option<&'a str>, WsnStatus> {
    if p.is_null() {
        return Ok(None);
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Some)
        .map_err(|_| fail(WsnStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(WsnStatus::NullPointer, concat!("`", stringify!($p), "` is NULL"));
        })+
    };
}

/// NUL-terminated library version; static storage.
#[no_mangle]
pub extern "C" fn wsn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated and
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator.
///
/// # Safety
/// `buf` must be NULL or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wsn_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

#[no_mangle]
pub extern "C" fn wsn_radio_params_default() -> WsnRadioParams {
    RadioParams::default().into()
}

/// Energy (µJ) to transmit `bits` over `distance` meters.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wsn_tx_energy(
    params: *const WsnRadioParams,
    bits: u64,
    distance: f64,
    out: *mut f64,
) -> WsnStatus {
    non_null!(params, out);
    match RadioParams::from(*params).tx_energy(bits, distance) {
        Ok(e) => {
            *out = e;
            WsnStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Energy (µJ) to receive `bits`.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wsn_rx_energy(params: *const WsnRadioParams, bits: u64, out: *mut f64) -> WsnStatus {
    non_null!(params, out);
    *out = RadioParams::from(*params).rx_energy(bits);
    WsnStatus::Ok
}

/// Idle drain (µJ) over `seconds`.
///
/// # Safety
/// `params` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn wsn_idle_energy(params: *const WsnRadioParams, seconds: f64, out: *mut f64) -> WsnStatus {
    non_null!(params, out);
    match RadioParams::from(*params).idle_energy(seconds) {
        Ok(e) => {
            *out = e;
            WsnStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// # Safety
/// `params` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wsn_max_packets_per_round(params: *const WsnRadioParams) -> u64 {
    if params.is_null() {
        return 0;
    }
    RadioParams::from(*params).max_packets_per_round()
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wsn_utility_pct(first: u64, last: u64, out: *mut f64) -> WsnStatus {
    non_null!(out);
    match utility_pct(first, last) {
        Ok(u) => {
            *out = u;
            WsnStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// Creates a simulation from `key=value` configuration text (NULL for all
/// defaults). On success `*out` owns a handle to release with
/// `wsn_simulation_free`.
///
/// # Safety
/// `config` must be NULL or a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_new(config: *const c_char, out: *mut *mut WsnSimulation) -> WsnStatus {
    non_null!(out);
    *out = ptr::null_mut();
    let text = match str_arg(config, "config") {
        Ok(t) => t.unwrap_or(""),
        Err(s) => return s,
    };
    guard(|| {
        let sim = match SimConfig::parse(text).and_then(Simulation::new) {
            Ok(sim) => sim,
            Err(e) => return from_error(e),
        };
        *out = Box::into_raw(Box::new(WsnSimulation { sim }));
        WsnStatus::Ok
    })
}

/// Overrides the routing strategy of configuration text and creates a
/// simulation; a convenience for bindings that sweep strategies.
///
/// # Safety
/// As for `wsn_simulation_new`.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_new_with(
    config: *const c_char,
    strategy: WsnStrategy,
    seed: u64,
    out: *mut *mut WsnSimulation,
) -> WsnStatus {
    non_null!(out);
    *out = ptr::null_mut();
    let text = match str_arg(config, "config") {
        Ok(t) => t.unwrap_or(""),
        Err(s) => return s,
    };
    guard(|| {
        let mut cfg = match SimConfig::parse(text) {
            Ok(c) => c,
            Err(e) => return from_error(e),
        };
        cfg.strategy = match strategy {
            WsnStrategy::Direct => wsn_sim::Strategy::Direct,
            WsnStrategy::Mte => wsn_sim::Strategy::Mte,
            WsnStrategy::Diffusion => wsn_sim::Strategy::Diffusion,
        };
        cfg.seed = seed;
        match Simulation::new(cfg) {
            Ok(sim) => {
                *out = Box::into_raw(Box::new(WsnSimulation { sim }));
                WsnStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sim` must be NULL or a handle from `wsn_simulation_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_free(sim: *mut WsnSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs one round. Returns `WSN_STATUS_FINISHED` without doing anything once
/// every node is dead or the round cap is reached.
///
/// # Safety
/// `sim` must be a live handle; `stats` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_step(sim: *mut WsnSimulation, stats: *mut WsnRoundStats) -> WsnStatus {
    non_null!(sim);
    let sim = &mut (*sim).sim;
    if sim.is_finished() {
        return fail(WsnStatus::Finished, "simulation finished");
    }
    guard(|| {
        let report = sim.run_round();
        if !stats.is_null() {
            *stats = WsnRoundStats {
                round: report.round,
                originated: report.originated,
                delivered: report.delivered,
                lost: report.lost,
                exceptions: report.exceptions,
                alive_after: report.alive_after as u64,
            };
        }
        WsnStatus::Ok
    })
}

/// Runs the remaining rounds and fills `lifetime`.
///
/// # Safety
/// `sim` must be a live handle; `lifetime` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_run(sim: *mut WsnSimulation, lifetime: *mut WsnLifetime) -> WsnStatus {
    non_null!(sim);
    let handle = &mut *sim;
    let status = guard(|| {
        while !handle.sim.is_finished() {
            handle.sim.run_round();
        }
        WsnStatus::Ok
    });
    if status != WsnStatus::Ok {
        return status;
    }
    if lifetime.is_null() {
        WsnStatus::Ok
    } else {
        wsn_simulation_lifetime(sim, lifetime)
    }
}

/// Lifetime metrics as of the last completed round.
///
/// # Safety
/// `sim` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_lifetime(sim: *const WsnSimulation, out: *mut WsnLifetime) -> WsnStatus {
    non_null!(sim, out);
    let sim = &(*sim).sim;
    guard(|| {
        let nodes = sim.nodes();
        let first = nodes.iter().filter_map(|n| n.death_round).min();
        let last = if sim.alive_count() == 0 { nodes.iter().filter_map(|n| n.death_round).max() } else { None };
        let utility = match (first, last) {
            (Some(f), Some(l)) => utility_pct(f, l).unwrap_or(f64::NAN),
            _ => f64::NAN,
        };
        *out = WsnLifetime {
            first_death_round: first.unwrap_or(0),
            last_death_round: last.unwrap_or(0),
            utility_pct: utility,
            rounds_run: sim.round(),
            truncated: sim.alive_count() > 0,
            delivered: sim.delivered(),
            lost: sim.lost(),
            exceptions: sim.exceptions(),
            energy_used_uj: sim.ledger().total(),
        };
        WsnStatus::Ok
    })
}

/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_node_count(sim: *const WsnSimulation) -> usize {
    if sim.is_null() {
        return 0;
    }
    (*sim).sim.nodes().len()
}

/// # Safety
/// `sim` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_alive_count(sim: *const WsnSimulation) -> usize {
    if sim.is_null() {
        return 0;
    }
    (*sim).sim.alive_count()
}

/// Remaining energy (µJ) of node `node`.
///
/// # Safety
/// `sim` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_node_energy(sim: *const WsnSimulation, node: usize, out: *mut f64) -> WsnStatus {
    non_null!(sim, out);
    match (*sim).sim.nodes().get(node) {
        Some(n) => {
            *out = n.energy;
            WsnStatus::Ok
        }
        None => fail(WsnStatus::OutOfRange, format!("node {node} does not exist")),
    }
}

/// Position (m) of node `node`.
///
/// # Safety
/// `sim` must be a live handle; `x` and `y` valid.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_node_position(
    sim: *const WsnSimulation,
    node: usize,
    x: *mut f64,
    y: *mut f64,
) -> WsnStatus {
    non_null!(sim, x, y);
    match (*sim).sim.nodes().get(node) {
        Some(n) => {
            *x = n.position.x;
            *y = n.position.y;
            WsnStatus::Ok
        }
        None => fail(WsnStatus::OutOfRange, format!("node {node} does not exist")),
    }
}

/// Copies up to `cap` alive counts (entry `i` is round `i + 1`) into `buf`
/// and returns the total number of completed rounds. Pass `cap = 0` to query
/// the length.
///
/// # Safety
/// `sim` must be a live handle; `buf` must hold `cap` elements.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_alive_curve(sim: *const WsnSimulation, buf: *mut u32, cap: usize) -> usize {
    if sim.is_null() {
        return 0;
    }
    let curve = (*sim).sim.alive_curve();
    if !buf.is_null() {
        let n = curve.len().min(cap);
        ptr::copy_nonoverlapping(curve.as_ptr(), buf, n);
    }
    curve.len()
}

/// Writes summary, alive curve, energy trace and manifest into `out_dir`.
///
/// # Safety
/// `sim` must be a live handle and `out_dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn wsn_simulation_write_outputs(
    sim: *const WsnSimulation,
    out_dir: *const c_char,
    format: WsnFormat,
) -> WsnStatus {
    non_null!(sim, out_dir);
    let dir = match str_arg(out_dir, "out_dir") {
        Ok(Some(d)) => d,
        Ok(None) => unreachable!(),
        Err(s) => return s,
    };
    let sim = &(*sim).sim;
    guard(|| {
        let format = match format {
            WsnFormat::Csv => Format::Csv,
            WsnFormat::Json => Format::Json,
        };
        let manifest = RunManifest::new("ffi", sim.config());
        match emit_run(&sim.result(), &manifest, format, Path::new(dir)) {
            Ok(_) => WsnStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}
