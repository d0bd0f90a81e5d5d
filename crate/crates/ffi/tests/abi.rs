use std::ffi::CStr;
use std::ptr;

use setquad_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sq_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

struct Handles {
    lip: *mut SqModulus,
    one: *mut SqWeight,
    grid: *mut SqGrid,
}

impl Handles {
    fn new() -> Self {
        let mut h = Handles {
            lip: ptr::null_mut(),
            one: ptr::null_mut(),
            grid: ptr::null_mut(),
        };
        unsafe {
            assert_eq!(sq_modulus_power(1.0, 1.0, &mut h.lip), SqStatus::Ok);
            assert_eq!(sq_weight_constant_one(&mut h.one), SqStatus::Ok);
            assert_eq!(sq_grid_with_size(2, 64, &mut h.grid), SqStatus::Ok);
        }
        h
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            sq_modulus_free(self.lip);
            sq_weight_free(self.one);
            sq_grid_free(self.grid);
        }
    }
}

#[test]
fn bound_and_closed_forms() {
    let h = Handles::new();
    unsafe {
        let mut k = ptr::null_mut();
        assert_eq!(sq_knots_midpoints(4, &mut k), SqStatus::Ok);
        assert_eq!(sq_knots_len(k), 4);
        let mut buf = [0.0; 4];
        assert_eq!(sq_knots_copy(k, buf.as_mut_ptr(), 4), SqStatus::Ok);
        assert_eq!(buf, [0.125, 0.375, 0.625, 0.875]);
        let mut v = 0.0;
        assert_eq!(sq_worst_case_error(h.lip, h.one, k, &mut v), SqStatus::Ok);
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(sq_uniform_optimal_error(h.lip, 4, &mut v), SqStatus::Ok);
        assert!((v - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(sq_asymptotic_b(h.one, h.lip, 32, &mut v), SqStatus::Ok);
        assert!((v - 1.0).abs() < 1e-12);
        let e1 = [1.0, 0.0];
        assert_eq!(sq_sharpness_gap(h.lip, h.one, k, h.grid, e1.as_ptr(), 2, &mut v), SqStatus::Ok);
        assert!(v <= 1e-6);
        sq_knots_free(k);
    }
}

#[test]
fn noisy_values_and_pruning() {
    let h = Handles::new();
    unsafe {
        let mut mid = ptr::null_mut();
        assert_eq!(sq_knots_midpoints(4, &mut mid), SqStatus::Ok);
        let eps = [0.05; 4];
        let mut v = 0.0;
        assert_eq!(sq_noisy_error_value(h.lip, mid, eps.as_ptr(), 4, h.one, &mut v), SqStatus::Ok);
        assert!((v - 0.1125).abs() < 1e-12);

        let mut pair = ptr::null_mut();
        assert_eq!(sq_knots_new([0.5, 0.51].as_ptr(), 2, &mut pair), SqStatus::Ok);
        let mut idx = [99usize; 2];
        let mut nu = 0;
        let eps = [0.0, 1.0];
        let st = sq_noisy_active_indices(h.lip, pair, eps.as_ptr(), 2, h.one, idx.as_mut_ptr(), 2, &mut nu);
        assert_eq!(st, SqStatus::Ok);
        assert_eq!((nu, idx[0]), (1, 0));

        let mut three = ptr::null_mut();
        assert_eq!(sq_knots_new([0.4, 0.5, 0.6].as_ptr(), 3, &mut three), SqStatus::Ok);
        let eps = [0.0, 10.0, 0.0];
        let st = sq_noisy_active_indices(h.lip, three, eps.as_ptr(), 3, h.one, idx.as_mut_ptr(), 1, &mut nu);
        assert_eq!(st, SqStatus::BufferTooSmall);

        let mut capped = ptr::null_mut();
        assert_eq!(sq_modulus_capped_linear(2.0, 0.3, &mut capped), SqStatus::Ok);
        let st = sq_noisy_error_value(capped, pair, [0.0, 0.0].as_ptr(), 2, h.one, &mut v);
        assert_eq!(st, SqStatus::NotStrictlyIncreasing);
        assert!(last_error().contains("strictly increasing"));

        sq_modulus_free(capped);
        sq_knots_free(three);
        sq_knots_free(pair);
        sq_knots_free(mid);
    }
}

#[test]
fn clouds_bodies_and_recovery() {
    let h = Handles::new();
    unsafe {
        let mut a = ptr::null_mut();
        let mut b = ptr::null_mut();
        assert_eq!(sq_cloud_new(2, [0.0, 0.0, 1.0, 0.0].as_ptr(), 2, &mut a), SqStatus::Ok);
        assert_eq!(sq_cloud_new(2, [0.0, 0.0].as_ptr(), 1, &mut b), SqStatus::Ok);
        let mut d = 0.0;
        assert_eq!(sq_cloud_hausdorff(a, b, &mut d), SqStatus::Ok);
        assert_eq!(d, 1.0);

        let mut ea = ptr::null_mut();
        assert_eq!(sq_body_embed(a, h.grid, &mut ea), SqStatus::Ok);
        assert_eq!(sq_body_len(ea), 64);
        let mut support = vec![0.0; 64];
        assert_eq!(sq_body_support(ea, support.as_mut_ptr(), 64), SqStatus::Ok);
        assert_eq!(support[0], 1.0);
        assert_eq!(sq_body_support(ea, support.as_mut_ptr(), 10), SqStatus::BufferTooSmall);

        let mut k = ptr::null_mut();
        assert_eq!(sq_knots_new([0.25, 0.75].as_ptr(), 2, &mut k), SqStatus::Ok);
        let samples = [a as *const SqCloud, b as *const SqCloud];
        let mut phi = ptr::null_mut();
        assert_eq!(sq_phi_star(samples.as_ptr(), 2, k, h.one, h.grid, &mut phi), SqStatus::Ok);
        // half of the segment [0, e1]
        let mut half = ptr::null_mut();
        assert_eq!(sq_cloud_new(2, [0.0, 0.0, 0.5, 0.0].as_ptr(), 2, &mut half), SqStatus::Ok);
        let mut eh = ptr::null_mut();
        assert_eq!(sq_body_embed(half, h.grid, &mut eh), SqStatus::Ok);
        assert_eq!(sq_body_hausdorff(phi, eh, &mut d), SqStatus::Ok);
        assert!(d < 1e-15);

        assert_eq!(sq_phi_star(samples.as_ptr(), 1, k, h.one, h.grid, &mut phi), SqStatus::CountMismatch);

        for body in [ea, phi, eh] {
            sq_body_free(body);
        }
        for cloud in [a, b, half] {
            sq_cloud_free(cloud);
        }
        sq_knots_free(k);
    }
}

#[test]
fn errors_and_null_handling() {
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(sq_modulus_power(1.0, 2.0, &mut m), SqStatus::InvalidInput);
        assert!(m.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(sq_modulus_power(1.0, 0.5, ptr::null_mut()), SqStatus::NullPointer);
        let mut v = 0.0;
        assert_eq!(sq_modulus_eval(ptr::null(), 0.5, &mut v), SqStatus::NullPointer);
        assert_eq!(sq_modulus_power(1.0, 0.5, &mut m), SqStatus::Ok);
        assert_eq!(sq_modulus_eval(m, 0.25, &mut v), SqStatus::Ok);
        assert_eq!(v, 0.5);
        assert_eq!(sq_modulus_eval(m, 1.5, &mut v), SqStatus::OutOfDomain);
        sq_modulus_free(m);

        let mut k = ptr::null_mut();
        assert_eq!(sq_knots_new([0.7, 0.2].as_ptr(), 2, &mut k), SqStatus::InvalidInput);
        assert_eq!(sq_knots_new(ptr::null(), 3, &mut k), SqStatus::NullPointer);
        assert_eq!(sq_knots_len(ptr::null()), 0);

        let mut c = ptr::null_mut();
        assert_eq!(sq_cloud_new(2, [1.0, 2.0].as_ptr(), 0, &mut c), SqStatus::InvalidInput);

        let mut g = ptr::null_mut();
        assert_eq!(sq_grid_default(3, &mut g), SqStatus::Ok);
        assert_eq!(sq_grid_len(g), 2048);
        sq_grid_free(g);

        // freeing null is a no-op
        sq_modulus_free(ptr::null_mut());
        sq_body_free(ptr::null_mut());
        assert!(!CStr::from_ptr(sq_version()).to_bytes().is_empty());
    }
}

#[test]
fn optimized_knots_for_unit_weight_are_midpoints() {
    let h = Handles::new();
    unsafe {
        let mut k = ptr::null_mut();
        let mut err = 0.0;
        assert_eq!(sq_knots_optimize(h.one, h.lip, 3, 2, 7, &mut k, &mut err), SqStatus::Ok);
        let mut buf = [0.0; 3];
        assert_eq!(sq_knots_copy(k, buf.as_mut_ptr(), 3), SqStatus::Ok);
        for (x, m) in buf.iter().zip([1.0 / 6.0, 0.5, 5.0 / 6.0]) {
            assert!((x - m).abs() < 1e-6);
        }
        assert!((err - 1.0 / 12.0).abs() < 1e-12);
        sq_knots_free(k);
    }
}
