//! C ABI over `ingham_spectral`.
//!
//! Every fallible call returns an [`IspStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`isp_last_error_message`] on the same thread until the next call.
//! Handles are created by `isp_*_new`-style constructors and released with
//! the matching `isp_*_free`; freeing NULL is a no-op. Array arguments are
//! (pointer, length) pairs and are copied, never retained.

#![allow(clippy::missing_safety_doc, clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use ingham_spectral::dunkl::{make_setting, phi_kappa, DunklSetting, RootConfig};
use ingham_spectral::ingham::{
    carleman_verdict, classify_theta, construct_box_product, CarlemanVerdict, ThetaClass, ThetaSpec, DEFAULT_T_MAX,
};
use ingham_spectral::numerics::{RadialGrid, SampledRadialFunction, SpectralSamples};
use ingham_spectral::specfun::{bessel_psi, c_function_inv_sq, jacobi_phi, JacobiParams};
use ingham_spectral::symmetric_space::{space_from_multiplicities, spherical_fn};
use ingham_spectral::transforms::{
    hankel_forward, hankel_inverse, jacobi_forward, jacobi_inverse, plancherel_check, PairKind,
};
use ingham_spectral::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 10,
    Pole = 11,
    StepUnderflow = 12,
    Invariant = 13,
    OutOfWindow = 14,
    SingularProfile = 15,
    UnsupportedRoots = 16,
    NonMonotone = 17,
    BudgetInfeasible = 18,
    WindowTooSmall = 19,
    IllPosed = 20,
    Parse = 21,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspPair {
    Hankel = 0,
    Jacobi = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspThetaClass {
    Divergent = 0,
    Convergent = 1,
    Undetermined = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IspCarlemanVerdict {
    Diverging = 0,
    Converging = 1,
    Inconclusive = 2,
}

/// Quadrature grid on a half-line.
#[repr(C)]
pub struct IspGrid {
    _private: [u8; 0],
}

/// Radial profile sampled on a grid.
#[repr(C)]
pub struct IspProfile {
    _private: [u8; 0],
}

/// Transform values on a λ-grid, tagged with their Plancherel measure.
#[repr(C)]
pub struct IspSpectral {
    _private: [u8; 0],
}

/// Decay modulus θ.
#[repr(C)]
pub struct IspTheta {
    _private: [u8; 0],
}

/// Dimension, reflection group and multiplicities of a Dunkl setting.
#[repr(C)]
pub struct IspDunklSetting {
    _private: [u8; 0],
}

trait Handle {
    type Inner;
    const NAME: &'static str;
}

impl Handle for IspGrid {
    type Inner = Arc<RadialGrid>;
    const NAME: &'static str = "grid";
}

impl Handle for IspProfile {
    type Inner = SampledRadialFunction;
    const NAME: &'static str = "profile";
}

impl Handle for IspSpectral {
    type Inner = SpectralSamples;
    const NAME: &'static str = "spectral samples";
}

impl Handle for IspTheta {
    type Inner = ThetaSpec;
    const NAME: &'static str = "theta";
}

impl Handle for IspDunklSetting {
    type Inner = DunklSetting;
    const NAME: &'static str = "Dunkl setting";
}

fn new_handle<H: Handle>(v: H::Inner) -> *mut H {
    Box::into_raw(Box::new(v)).cast()
}

unsafe fn borrow<'a, H: Handle>(p: *const H) -> Result<&'a H::Inner, Failure> {
    p.cast::<H::Inner>().as_ref().ok_or(Failure::Null(H::NAME))
}

unsafe fn release<H: Handle>(p: *mut H) {
    if !p.is_null() {
        drop(Box::from_raw(p.cast::<H::Inner>()));
    }
}

enum Failure {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn status_of(e: &Error) -> IspStatus {
    match e {
        Error::Domain(_) => IspStatus::Domain,
        Error::Pole(_) => IspStatus::Pole,
        Error::StepUnderflow { .. } => IspStatus::StepUnderflow,
        Error::Invariant(_) => IspStatus::Invariant,
        Error::OutOfWindow { .. } => IspStatus::OutOfWindow,
        Error::SingularProfile(_) => IspStatus::SingularProfile,
        Error::UnsupportedRoots(_) => IspStatus::UnsupportedRoots,
        Error::NonMonotone(_) => IspStatus::NonMonotone,
        Error::BudgetInfeasible { .. } => IspStatus::BudgetInfeasible,
        Error::WindowTooSmall { .. } => IspStatus::WindowTooSmall,
        Error::IllPosed(_) => IspStatus::IllPosed,
        Error::Parse { .. } => IspStatus::Parse,
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IspStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return IspStatus::Ok,
        Ok(Err(Failure::Null(what))) => (IspStatus::NullPointer, format!("null pointer: {what}")),
        Ok(Err(Failure::Arg(m))) => (IspStatus::InvalidArgument, m),
        Ok(Err(Failure::Lib(e))) => (status_of(&e), e.to_string()),
        Err(p) => {
            let m = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned());
            (IspStatus::Panic, format!("internal panic: {}", m.unwrap_or_default()))
        }
    };
    set_last_error(msg);
    status
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if len != src.len() {
        return Err(Failure::Arg(format!("buffer holds {len} values, {} needed", src.len())));
    }
    if len > 0 {
        if buf.is_null() {
            return Err(Failure::Null("output buffer"));
        }
        std::ptr::copy_nonoverlapping(src.as_ptr(), buf, len);
    }
    Ok(())
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Arg(format!("{what} is not UTF-8")))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn isp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL after a
/// success. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn isp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// ψ_α(t) = 2^α Γ(α+1) t^{-α} J_α(t).
#[no_mangle]
pub unsafe extern "C" fn isp_bessel_psi(alpha: f64, t: f64, value: *mut f64) -> IspStatus {
    guard(|| {
        *out(value, "value")? = bessel_psi(alpha, t)?;
        Ok(())
    })
}

/// φ_λ^(α,β)(r).
#[no_mangle]
pub unsafe extern "C" fn isp_jacobi_phi(alpha: f64, beta: f64, lambda: f64, r: f64, value: *mut f64) -> IspStatus {
    guard(|| {
        *out(value, "value")? = jacobi_phi(&JacobiParams::new(alpha, beta)?, lambda, r)?;
        Ok(())
    })
}

/// |c(λ)|^{-2}; `limiting` is set to 1 where the continuous extension at
/// λ = 0 was used. `limiting` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_c_function_inv_sq(
    alpha: f64,
    beta: f64,
    lambda: f64,
    value: *mut f64,
    limiting: *mut i32,
) -> IspStatus {
    guard(|| {
        let c = c_function_inv_sq(&JacobiParams::new(alpha, beta)?, lambda);
        *out(value, "value")? = c.value;
        if let Some(l) = limiting.as_mut() {
            *l = c.limiting as i32;
        }
        Ok(())
    })
}

/// Φ_λ(a_r) on the rank-one space with root multiplicities m_γ, m_2γ.
#[no_mangle]
pub unsafe extern "C" fn isp_spherical_fn(
    m_gamma: u32,
    m_2gamma: u32,
    lambda: f64,
    r: f64,
    value: *mut f64,
) -> IspStatus {
    guard(|| {
        *out(value, "value")? = spherical_fn(&space_from_multiplicities(m_gamma, m_2gamma)?, lambda, r)?;
        Ok(())
    })
}

/// Composite Gauss–Legendre grid with `panels` equal panels on [lo, hi].
#[no_mangle]
pub unsafe extern "C" fn isp_grid_uniform(
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
    grid: *mut *mut IspGrid,
) -> IspStatus {
    guard(|| {
        let slot = out(grid, "grid")?;
        *slot = new_handle::<IspGrid>(RadialGrid::uniform_panels(lo, hi, panels, order)?.into_shared());
        Ok(())
    })
}

/// As isp_grid_uniform on [0, r_max], with the first panel split
/// geometrically `levels` times toward 0.
#[no_mangle]
pub unsafe extern "C" fn isp_grid_graded(
    r_max: f64,
    panels: usize,
    order: usize,
    levels: usize,
    grid: *mut *mut IspGrid,
) -> IspStatus {
    guard(|| {
        let slot = out(grid, "grid")?;
        *slot = new_handle::<IspGrid>(RadialGrid::graded(r_max, panels, order, levels)?.into_shared());
        Ok(())
    })
}

/// Trapezoid weights on strictly increasing nonnegative nodes.
#[no_mangle]
pub unsafe extern "C" fn isp_grid_from_nodes(nodes: *const f64, len: usize, grid: *mut *mut IspGrid) -> IspStatus {
    guard(|| {
        let slot = out(grid, "grid")?;
        let nodes = slice(nodes, len, "nodes")?.to_vec();
        *slot = new_handle::<IspGrid>(RadialGrid::from_nodes(nodes)?.into_shared());
        Ok(())
    })
}

/// Node count; 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_grid_len(grid: *const IspGrid) -> usize {
    borrow(grid).map_or(0, |g| g.len())
}

#[no_mangle]
pub unsafe extern "C" fn isp_grid_copy_nodes(grid: *const IspGrid, buf: *mut f64, len: usize) -> IspStatus {
    guard(|| copy_out(borrow(grid)?.nodes(), buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn isp_grid_copy_weights(grid: *const IspGrid, buf: *mut f64, len: usize) -> IspStatus {
    guard(|| copy_out(borrow(grid)?.weights(), buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn isp_grid_free(grid: *mut IspGrid) {
    release(grid);
}

/// A profile from one value per grid node.
#[no_mangle]
pub unsafe extern "C" fn isp_profile_new(
    grid: *const IspGrid,
    values: *const f64,
    len: usize,
    profile: *mut *mut IspProfile,
) -> IspStatus {
    guard(|| {
        let slot = out(profile, "profile")?;
        let g = Arc::clone(borrow(grid)?);
        let f = SampledRadialFunction::new(g, slice(values, len, "values")?.to_vec())?;
        *slot = new_handle::<IspProfile>(f);
        Ok(())
    })
}

/// Declares the profile zero outside [a, b].
#[no_mangle]
pub unsafe extern "C" fn isp_profile_set_support(profile: *mut IspProfile, a: f64, b: f64) -> IspStatus {
    guard(|| {
        let f = profile.cast::<SampledRadialFunction>().as_mut().ok_or(Failure::Null("profile"))?;
        *f = f.clone().with_support(a, b)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn isp_profile_len(profile: *const IspProfile) -> usize {
    borrow(profile).map_or(0, |f| f.values().len())
}

#[no_mangle]
pub unsafe extern "C" fn isp_profile_copy_values(profile: *const IspProfile, buf: *mut f64, len: usize) -> IspStatus {
    guard(|| copy_out(borrow(profile)?.values(), buf, len))
}

#[no_mangle]
pub unsafe extern "C" fn isp_profile_free(profile: *mut IspProfile) {
    release(profile);
}

fn pair_kind(pair: IspPair, alpha: f64, beta: f64) -> Result<PairKind, Failure> {
    Ok(match pair {
        IspPair::Hankel => PairKind::Hankel { alpha },
        IspPair::Jacobi => PairKind::Jacobi(JacobiParams::new(alpha, beta)?),
    })
}

/// Forward transform on `lambdas`. `beta` is ignored for the Hankel pair,
/// whose order is `alpha`.
#[no_mangle]
pub unsafe extern "C" fn isp_transform_forward(
    profile: *const IspProfile,
    pair: IspPair,
    alpha: f64,
    beta: f64,
    lambdas: *const IspGrid,
    spectral: *mut *mut IspSpectral,
) -> IspStatus {
    guard(|| {
        let slot = out(spectral, "spectral")?;
        let f = borrow(profile)?;
        let ls = borrow(lambdas)?;
        let big_f = match pair_kind(pair, alpha, beta)? {
            PairKind::Hankel { alpha } => hankel_forward(f, alpha, ls)?,
            PairKind::Jacobi(p) => jacobi_forward(f, &p, ls)?,
        };
        *slot = new_handle::<IspSpectral>(big_f);
        Ok(())
    })
}

/// Inverse transform onto `r_grid`.
#[no_mangle]
pub unsafe extern "C" fn isp_transform_inverse(
    spectral: *const IspSpectral,
    pair: IspPair,
    alpha: f64,
    beta: f64,
    r_grid: *const IspGrid,
    profile: *mut *mut IspProfile,
) -> IspStatus {
    guard(|| {
        let slot = out(profile, "profile")?;
        let big_f = borrow(spectral)?;
        let rg = borrow(r_grid)?;
        let f = match pair_kind(pair, alpha, beta)? {
            PairKind::Hankel { alpha } => hankel_inverse(big_f, alpha, rg)?,
            PairKind::Jacobi(p) => jacobi_inverse(big_f, &p, rg)?,
        };
        *slot = new_handle::<IspProfile>(f);
        Ok(())
    })
}

/// Relative L² round-trip error and relative Plancherel mismatch.
#[no_mangle]
pub unsafe extern "C" fn isp_plancherel_check(
    profile: *const IspProfile,
    pair: IspPair,
    alpha: f64,
    beta: f64,
    lambdas: *const IspGrid,
    roundtrip_error: *mut f64,
    plancherel_error: *mut f64,
) -> IspStatus {
    guard(|| {
        let rt = out(roundtrip_error, "roundtrip_error")?;
        let pl = out(plancherel_error, "plancherel_error")?;
        let rep = plancherel_check(borrow(profile)?, pair_kind(pair, alpha, beta)?, borrow(lambdas)?)?;
        *rt = rep.roundtrip_l2_rel_error;
        *pl = rep.plancherel_rel_error();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn isp_spectral_len(spectral: *const IspSpectral) -> usize {
    borrow(spectral).map_or(0, |s| s.values().len())
}

#[no_mangle]
pub unsafe extern "C" fn isp_spectral_copy_values(
    spectral: *const IspSpectral,
    buf: *mut f64,
    len: usize,
) -> IspStatus {
    guard(|| copy_out(borrow(spectral)?.values(), buf, len))
}

/// Linear interpolation inside the λ-window.
#[no_mangle]
pub unsafe extern "C" fn isp_spectral_interpolate(
    spectral: *const IspSpectral,
    lambda: f64,
    value: *mut f64,
) -> IspStatus {
    guard(|| {
        *out(value, "value")? = borrow(spectral)?.interpolate(lambda)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn isp_spectral_free(spectral: *mut IspSpectral) {
    release(spectral);
}

/// One of "inv-sqrt", "inv-log", "log-log", "zero".
#[no_mangle]
pub unsafe extern "C" fn isp_theta_builtin(name: *const c_char, theta: *mut *mut IspTheta) -> IspStatus {
    guard(|| {
        let slot = out(theta, "theta")?;
        *slot = new_handle::<IspTheta>(ThetaSpec::builtin(string(name, "name")?)?);
        Ok(())
    })
}

/// θ from (t, θ(t)) samples, interpolated in between.
#[no_mangle]
pub unsafe extern "C" fn isp_theta_from_table(
    t: *const f64,
    values: *const f64,
    len: usize,
    theta: *mut *mut IspTheta,
) -> IspStatus {
    guard(|| {
        let slot = out(theta, "theta")?;
        let pts = slice(t, len, "t")?.iter().copied().zip(slice(values, len, "values")?.iter().copied()).collect();
        *slot = new_handle::<IspTheta>(ThetaSpec::from_table(pts)?);
        Ok(())
    })
}

/// θ(t); NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_theta_eval(theta: *const IspTheta, t: f64) -> f64 {
    borrow(theta).map_or(f64::NAN, |th| th.eval(t))
}

/// Decides ∫₁^∞ θ(t)/t dt; `p`, `q` receive the fitted block decay
/// exponents and may be NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_theta_classify(
    theta: *const IspTheta,
    class: *mut IspThetaClass,
    p: *mut f64,
    q: *mut f64,
) -> IspStatus {
    guard(|| {
        let slot = out(class, "class")?;
        let c = classify_theta(borrow(theta)?, DEFAULT_T_MAX)?;
        *slot = match c.verdict {
            ThetaClass::Divergent => IspThetaClass::Divergent,
            ThetaClass::Convergent => IspThetaClass::Convergent,
            ThetaClass::Undetermined => IspThetaClass::Undetermined,
        };
        if let Some(p) = p.as_mut() {
            *p = c.p;
        }
        if let Some(q) = q.as_mut() {
            *q = c.q;
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn isp_theta_free(theta: *mut IspTheta) {
    release(theta);
}

/// Ingham's box product for a convergent θ: writes the `n` half-widths to
/// `lengths`, their sum, and the envelope constant C with
/// |f̂(ξ)| ≤ C e^{-ξθ(ξ)} on [1, xi_max].
#[no_mangle]
pub unsafe extern "C" fn isp_box_product(
    theta: *const IspTheta,
    n: usize,
    support_budget: f64,
    xi_max: f64,
    lengths: *mut f64,
    total_support: *mut f64,
    envelope_constant: *mut f64,
) -> IspStatus {
    guard(|| {
        let s = out(total_support, "total_support")?;
        let c = out(envelope_constant, "envelope_constant")?;
        if !(xi_max >= 1.0) {
            return Err(Failure::Arg(format!("xi_max = {xi_max} must be at least 1")));
        }
        let th = borrow(theta)?;
        let boxes = construct_box_product(th, n, support_budget)?.boxes;
        copy_out(boxes.lengths(), lengths, n)?;
        let xis: Vec<f64> = (1..=xi_max.floor() as usize).map(|i| i as f64).collect();
        *s = boxes.total_support();
        *c = boxes.envelope(th, &xis).constant;
        Ok(())
    })
}

/// Carleman test on norms n_1, …, n_len; `partial_sum` and
/// `tail_exponent` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_carleman_verdict(
    norms: *const f64,
    len: usize,
    verdict: *mut IspCarlemanVerdict,
    partial_sum: *mut f64,
    tail_exponent: *mut f64,
) -> IspStatus {
    guard(|| {
        let slot = out(verdict, "verdict")?;
        let rep = carleman_verdict(slice(norms, len, "norms")?);
        *slot = match rep.verdict {
            CarlemanVerdict::Diverging => IspCarlemanVerdict::Diverging,
            CarlemanVerdict::Converging => IspCarlemanVerdict::Converging,
            CarlemanVerdict::Inconclusive => IspCarlemanVerdict::Inconclusive,
        };
        if let Some(p) = partial_sum.as_mut() {
            *p = rep.total();
        }
        if let Some(t) = tail_exponent.as_mut() {
            *t = rep.tail_exponent;
        }
        Ok(())
    })
}

/// Setting in R^n for roots "Z2" or "Z2^d"; κ has d entries or one value
/// shared by all roots.
#[no_mangle]
pub unsafe extern "C" fn isp_dunkl_setting_new(
    n: usize,
    roots: *const c_char,
    kappa: *const f64,
    len: usize,
    setting: *mut *mut IspDunklSetting,
) -> IspStatus {
    guard(|| {
        let slot = out(setting, "setting")?;
        let root: RootConfig = string(roots, "roots")?.parse()?;
        *slot = new_handle::<IspDunklSetting>(make_setting(n, root, slice(kappa, len, "kappa")?)?);
        Ok(())
    })
}

/// γ and λ_κ = γ + (n-2)/2; either pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn isp_dunkl_setting_orders(
    setting: *const IspDunklSetting,
    gamma: *mut f64,
    lambda_kappa: *mut f64,
) -> IspStatus {
    guard(|| {
        let s = borrow(setting)?;
        if let Some(g) = gamma.as_mut() {
            *g = s.gamma();
        }
        if let Some(l) = lambda_kappa.as_mut() {
            *l = s.lambda_kappa();
        }
        Ok(())
    })
}

/// The radial Dunkl kernel φ_{κ,λ} at |x| = x_norm.
#[no_mangle]
pub unsafe extern "C" fn isp_dunkl_phi(
    setting: *const IspDunklSetting,
    lambda: f64,
    x_norm: f64,
    value: *mut f64,
) -> IspStatus {
    guard(|| {
        *out(value, "value")? = phi_kappa(borrow(setting)?, lambda, x_norm)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn isp_dunkl_setting_free(setting: *mut IspDunklSetting) {
    release(setting);
}
