use std::ffi::{CStr, CString};
use std::ptr;

use ingham_spectral_ffi::*;

fn last_error() -> String {
    let p = isp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn gaussian(x: f64) -> f64 {
    (-0.5 * x * x).exp()
}

unsafe fn grid(lo: f64, hi: f64, panels: usize) -> *mut IspGrid {
    let mut g = ptr::null_mut();
    assert_eq!(isp_grid_uniform(lo, hi, panels, 16, &mut g), IspStatus::Ok);
    g
}

unsafe fn nodes(g: *const IspGrid) -> Vec<f64> {
    let mut v = vec![0.0; isp_grid_len(g)];
    assert_eq!(isp_grid_copy_nodes(g, v.as_mut_ptr(), v.len()), IspStatus::Ok);
    v
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(isp_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn scalar_kernels() {
    unsafe {
        let mut v = 0.0;
        // ψ_{1/2}(t) = sin t / t
        assert_eq!(isp_bessel_psi(0.5, 2.0, &mut v), IspStatus::Ok);
        assert!((v - 2f64.sin() / 2.0).abs() < 1e-14);
        // φ at α = β = -1/2 is cos(λr)
        assert_eq!(isp_jacobi_phi(-0.5, -0.5, 3.0, 0.7, &mut v), IspStatus::Ok);
        assert!((v - (2.1f64).cos()).abs() < 1e-12);
        let mut limiting = -1;
        assert_eq!(isp_c_function_inv_sq(-0.5, -0.5, 10.0, &mut v, &mut limiting), IspStatus::Ok);
        assert!((v - 4.0).abs() < 1e-10 && limiting == 0);
        assert_eq!(isp_c_function_inv_sq(-0.5, -0.5, 1.0, &mut v, ptr::null_mut()), IspStatus::Ok);
        assert_eq!(isp_spherical_fn(2, 0, 0.0, 0.0, &mut v), IspStatus::Ok);
        assert_eq!(v, 1.0);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(isp_jacobi_phi(-2.0, 0.0, 1.0, 1.0, &mut v), IspStatus::Invariant);
        assert!(last_error().contains("alpha"));
        assert_eq!(isp_bessel_psi(0.5, 1.0, ptr::null_mut()), IspStatus::NullPointer);
        assert!(last_error().contains("value"));
        assert_eq!(isp_spherical_fn(0, 1, 1.0, 1.0, &mut v), IspStatus::Invariant);
        // a success clears the message
        assert_eq!(isp_bessel_psi(0.5, 1.0, &mut v), IspStatus::Ok);
        assert!(isp_last_error_message().is_null());

        let name = CString::new("no-such-theta").unwrap();
        let mut th = ptr::null_mut();
        assert_eq!(isp_theta_builtin(name.as_ptr(), &mut th), IspStatus::Domain);
        assert!(th.is_null());
        let roots = CString::new("A2").unwrap();
        let mut s = ptr::null_mut();
        assert_eq!(isp_dunkl_setting_new(2, roots.as_ptr(), [0.5].as_ptr(), 1, &mut s), IspStatus::UnsupportedRoots);

        // freeing NULL is harmless
        isp_grid_free(ptr::null_mut());
        isp_profile_free(ptr::null_mut());
        isp_spectral_free(ptr::null_mut());
        isp_theta_free(ptr::null_mut());
        isp_dunkl_setting_free(ptr::null_mut());
        assert_eq!(isp_grid_len(ptr::null()), 0);
        assert!(isp_theta_eval(ptr::null(), 1.0).is_nan());
    }
}

#[test]
fn hankel_gaussian_is_fixed_and_round_trips() {
    unsafe {
        let rg = grid(0.0, 12.0, 48);
        let ls = grid(0.0, 12.0, 48);
        let values: Vec<f64> = nodes(rg).iter().map(|&r| gaussian(r)).collect();
        let mut f = ptr::null_mut();
        assert_eq!(isp_profile_new(rg, values.as_ptr(), values.len(), &mut f), IspStatus::Ok);
        let mut big_f = ptr::null_mut();
        assert_eq!(isp_transform_forward(f, IspPair::Hankel, 1.5, 0.0, ls, &mut big_f), IspStatus::Ok);
        let mut out = vec![0.0; isp_spectral_len(big_f)];
        assert_eq!(isp_spectral_copy_values(big_f, out.as_mut_ptr(), out.len()), IspStatus::Ok);
        for (l, v) in nodes(ls).iter().zip(&out) {
            assert!((v - gaussian(*l)).abs() < 1e-10);
        }
        let mut v = 0.0;
        assert_eq!(isp_spectral_interpolate(big_f, 20.0, &mut v), IspStatus::OutOfWindow);
        // wrong buffer length is rejected
        assert_eq!(isp_spectral_copy_values(big_f, out.as_mut_ptr(), 3), IspStatus::InvalidArgument);

        let mut back = ptr::null_mut();
        assert_eq!(isp_transform_inverse(big_f, IspPair::Hankel, 1.5, 0.0, rg, &mut back), IspStatus::Ok);
        let mut bv = vec![0.0; isp_profile_len(back)];
        assert_eq!(isp_profile_copy_values(back, bv.as_mut_ptr(), bv.len()), IspStatus::Ok);
        assert!(bv.iter().zip(&values).all(|(a, b)| (a - b).abs() < 1e-10));

        let (mut rt, mut pl) = (0.0, 0.0);
        assert_eq!(isp_plancherel_check(f, IspPair::Hankel, 1.5, 0.0, ls, &mut rt, &mut pl), IspStatus::Ok);
        assert!(rt < 1e-10 && pl < 1e-10);

        isp_profile_free(back);
        isp_spectral_free(big_f);
        isp_profile_free(f);
        isp_grid_free(ls);
        isp_grid_free(rg);
    }
}

#[test]
fn jacobi_bump_round_trips() {
    unsafe {
        let rg = grid(0.0, 3.0, 48);
        let ls = grid(0.0, 64.0, 32);
        let bump = |r: f64| if r > 1.0 && r < 2.0 { ((r - 1.0) * (2.0 - r) * 4.0).powi(12) } else { 0.0 };
        let values: Vec<f64> = nodes(rg).iter().map(|&r| bump(r)).collect();
        let mut f = ptr::null_mut();
        assert_eq!(isp_profile_new(rg, values.as_ptr(), values.len(), &mut f), IspStatus::Ok);
        assert_eq!(isp_profile_set_support(f, 1.0, 2.0), IspStatus::Ok);
        let (mut rt, mut pl) = (0.0, 0.0);
        assert_eq!(isp_plancherel_check(f, IspPair::Jacobi, 0.5, -0.5, ls, &mut rt, &mut pl), IspStatus::Ok);
        assert!(rt <= 1e-4 && pl <= 1e-4, "{rt} {pl}");
        assert_eq!(isp_plancherel_check(f, IspPair::Jacobi, 0.5, 3.0, ls, &mut rt, &mut pl), IspStatus::Invariant);
        // profile length must match the grid
        let mut g = ptr::null_mut();
        assert_eq!(isp_profile_new(rg, values.as_ptr(), 5, &mut g), IspStatus::Domain);
        isp_profile_free(f);
        isp_grid_free(ls);
        isp_grid_free(rg);
    }
}

#[test]
fn grids_from_nodes_and_graded() {
    unsafe {
        let pts = [0.0, 0.5, 1.0];
        let mut g = ptr::null_mut();
        assert_eq!(isp_grid_from_nodes(pts.as_ptr(), 3, &mut g), IspStatus::Ok);
        let mut w = [0.0; 3];
        assert_eq!(isp_grid_copy_weights(g, w.as_mut_ptr(), 3), IspStatus::Ok);
        assert_eq!(w, [0.25, 0.5, 0.25]);
        isp_grid_free(g);
        let bad = [1.0, 0.5];
        assert_eq!(isp_grid_from_nodes(bad.as_ptr(), 2, &mut g), IspStatus::Domain);
        assert_eq!(isp_grid_from_nodes(ptr::null(), 2, &mut g), IspStatus::NullPointer);
        assert_eq!(isp_grid_graded(1.0, 4, 8, 3, &mut g), IspStatus::Ok);
        assert_eq!(isp_grid_len(g), 7 * 8);
        isp_grid_free(g);
    }
}

#[test]
fn theta_and_boxes() {
    unsafe {
        let mut th = ptr::null_mut();
        let name = CString::new("inv-sqrt").unwrap();
        assert_eq!(isp_theta_builtin(name.as_ptr(), &mut th), IspStatus::Ok);
        assert!((isp_theta_eval(th, 3.0) - 0.5).abs() < 1e-15);
        let mut class = IspThetaClass::Undetermined;
        let (mut p, mut q) = (0.0, 0.0);
        assert_eq!(isp_theta_classify(th, &mut class, &mut p, &mut q), IspStatus::Ok);
        assert_eq!(class, IspThetaClass::Convergent);

        let mut lengths = vec![0.0; 64];
        let (mut s, mut c) = (0.0, 0.0);
        assert_eq!(isp_box_product(th, 64, 1.0, 1000.0, lengths.as_mut_ptr(), &mut s, &mut c), IspStatus::Ok);
        assert!(s <= 1.0 && (lengths.iter().sum::<f64>() - s).abs() < 1e-12);
        assert!(lengths.windows(2).all(|w| w[1] <= w[0]));
        for k in 0..4000 {
            let xi = 1.0 + 0.25 * k as f64;
            let fhat: f64 = lengths.iter().map(|&a| ((a * xi).sin() / (a * xi)).abs()).product();
            assert!(fhat <= c * (-xi * isp_theta_eval(th, xi)).exp() * (1.0 + 1e-9));
        }
        assert_eq!(
            isp_box_product(th, 64, 0.1, 1000.0, lengths.as_mut_ptr(), &mut s, &mut c),
            IspStatus::BudgetInfeasible
        );
        assert_eq!(isp_box_product(th, 8, 1.0, 1000.0, ptr::null_mut(), &mut s, &mut c), IspStatus::NullPointer);
        assert_eq!(isp_box_product(th, 64, 1.0, 0.5, lengths.as_mut_ptr(), &mut s, &mut c), IspStatus::InvalidArgument);
        isp_theta_free(th);

        let name = CString::new("inv-log").unwrap();
        assert_eq!(isp_theta_builtin(name.as_ptr(), &mut th), IspStatus::Ok);
        assert_eq!(isp_theta_classify(th, &mut class, ptr::null_mut(), ptr::null_mut()), IspStatus::Ok);
        assert_eq!(class, IspThetaClass::Divergent);
        assert_eq!(isp_box_product(th, 64, 1.0, 10.0, lengths.as_mut_ptr(), &mut s, &mut c), IspStatus::IllPosed);
        isp_theta_free(th);

        let t = [0.0, 1.0, 2.0];
        let v = [1.0, 0.5, 0.25];
        assert_eq!(isp_theta_from_table(t.as_ptr(), v.as_ptr(), 3, &mut th), IspStatus::Ok);
        assert!((isp_theta_eval(th, 1.5) - 0.375).abs() < 1e-15);
        isp_theta_free(th);
        let rising = [0.1, 0.5, 0.2];
        assert_eq!(isp_theta_from_table(t.as_ptr(), rising.as_ptr(), 3, &mut th), IspStatus::NonMonotone);
    }
}

#[test]
fn carleman_on_geometric_and_factorial_norms() {
    unsafe {
        let geo: Vec<f64> = (1..=40).map(|m| 3f64.powi(2 * m)).collect();
        let mut v = IspCarlemanVerdict::Inconclusive;
        let mut sum = 0.0;
        assert_eq!(isp_carleman_verdict(geo.as_ptr(), geo.len(), &mut v, &mut sum, ptr::null_mut()), IspStatus::Ok);
        assert_eq!(v, IspCarlemanVerdict::Diverging);
        assert!((sum - 40.0 / 3.0).abs() < 1e-12);
        // ((2m)!)² for m ≤ 20 stays in range
        let sq: Vec<f64> = (1..=20).map(|m| (1..=2 * m).map(f64::from).product::<f64>().powi(2)).collect();
        let mut p = 0.0;
        assert_eq!(isp_carleman_verdict(sq.as_ptr(), sq.len(), &mut v, ptr::null_mut(), &mut p), IspStatus::Ok);
        assert_eq!(v, IspCarlemanVerdict::Converging);
        assert!(p > 1.5);
    }
}

#[test]
fn dunkl_setting_orders_and_kernel() {
    unsafe {
        let roots = CString::new("Z2^2").unwrap();
        let kappa = [0.3, 0.7];
        let mut s = ptr::null_mut();
        assert_eq!(isp_dunkl_setting_new(2, roots.as_ptr(), kappa.as_ptr(), 2, &mut s), IspStatus::Ok);
        let (mut g, mut lk) = (0.0, 0.0);
        assert_eq!(isp_dunkl_setting_orders(s, &mut g, &mut lk), IspStatus::Ok);
        assert!((g - 1.0).abs() < 1e-15 && (lk - 1.0).abs() < 1e-15);
        let mut v = 0.0;
        assert_eq!(isp_dunkl_phi(s, 2.0, 0.0, &mut v), IspStatus::Ok);
        let at_origin = v;
        assert_eq!(isp_dunkl_phi(s, 0.0, 1.3, &mut v), IspStatus::Ok);
        assert!((v - at_origin).abs() < 1e-14 * at_origin.abs());
        isp_dunkl_setting_free(s);
        let neg = [-0.5];
        assert_eq!(isp_dunkl_setting_new(2, roots.as_ptr(), neg.as_ptr(), 1, &mut s), IspStatus::Domain);
    }
}
