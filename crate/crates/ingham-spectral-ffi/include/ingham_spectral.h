/* Generated by cbindgen from ingham-spectral-ffi; do not edit. */

#ifndef INGHAM_SPECTRAL_H
#define INGHAM_SPECTRAL_H

#include <stddef.h>
#include <stdint.h>

typedef struct IspGrid IspGrid;
typedef struct IspProfile IspProfile;
typedef struct IspSpectral IspSpectral;
typedef struct IspTheta IspTheta;
typedef struct IspDunklSetting IspDunklSetting;

typedef enum IspCarlemanVerdict {
  ISP_CARLEMAN_VERDICT_DIVERGING = 0,
  ISP_CARLEMAN_VERDICT_CONVERGING = 1,
  ISP_CARLEMAN_VERDICT_INCONCLUSIVE = 2,
} IspCarlemanVerdict;

typedef enum IspPair {
  ISP_PAIR_HANKEL = 0,
  ISP_PAIR_JACOBI = 1,
} IspPair;

// Result of every fallible call.
typedef enum IspStatus {
  ISP_STATUS_OK = 0,
  ISP_STATUS_NULL_POINTER = 1,
  ISP_STATUS_INVALID_ARGUMENT = 2,
  ISP_STATUS_DOMAIN = 10,
  ISP_STATUS_POLE = 11,
  ISP_STATUS_STEP_UNDERFLOW = 12,
  ISP_STATUS_INVARIANT = 13,
  ISP_STATUS_OUT_OF_WINDOW = 14,
  ISP_STATUS_SINGULAR_PROFILE = 15,
  ISP_STATUS_UNSUPPORTED_ROOTS = 16,
  ISP_STATUS_NON_MONOTONE = 17,
  ISP_STATUS_BUDGET_INFEASIBLE = 18,
  ISP_STATUS_WINDOW_TOO_SMALL = 19,
  ISP_STATUS_ILL_POSED = 20,
  ISP_STATUS_PARSE = 21,
  ISP_STATUS_PANIC = 99,
} IspStatus;

typedef enum IspThetaClass {
  ISP_THETA_CLASS_DIVERGENT = 0,
  ISP_THETA_CLASS_CONVERGENT = 1,
  ISP_THETA_CLASS_UNDETERMINED = 2,
} IspThetaClass;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *isp_version(void);

// Message for the last failed call on this thread, or NULL after a
// success. Valid until the next call into the library on this thread.
const char *isp_last_error_message(void);

// ψ_α(t) = 2^α Γ(α+1) t^{-α} J_α(t).
enum IspStatus isp_bessel_psi(double alpha, double t, double *value);

// φ_λ^(α,β)(r).
enum IspStatus isp_jacobi_phi(double alpha, double beta, double lambda, double r, double *value);

// |c(λ)|^{-2}; `limiting` is set to 1 where the continuous extension at
// λ = 0 was used. `limiting` may be NULL.
enum IspStatus isp_c_function_inv_sq(double alpha,
                                     double beta,
                                     double lambda,
                                     double *value,
                                     int32_t *limiting);

// Φ_λ(a_r) on the rank-one space with root multiplicities m_γ, m_2γ.
enum IspStatus isp_spherical_fn(uint32_t m_gamma,
                                uint32_t m_2gamma,
                                double lambda,
                                double r,
                                double *value);

// Composite Gauss–Legendre grid with `panels` equal panels on [lo, hi].
enum IspStatus isp_grid_uniform(double lo, double hi, size_t panels, size_t order, IspGrid **grid);

// As isp_grid_uniform on [0, r_max], with the first panel split
// geometrically `levels` times toward 0.
enum IspStatus isp_grid_graded(double r_max,
                               size_t panels,
                               size_t order,
                               size_t levels,
                               IspGrid **grid);

// Trapezoid weights on strictly increasing nonnegative nodes.
enum IspStatus isp_grid_from_nodes(const double *nodes, size_t len, IspGrid **grid);

// Node count; 0 for NULL.
size_t isp_grid_len(const IspGrid *grid);

enum IspStatus isp_grid_copy_nodes(const IspGrid *grid, double *buf, size_t len);

enum IspStatus isp_grid_copy_weights(const IspGrid *grid, double *buf, size_t len);

void isp_grid_free(IspGrid *grid);

// A profile from one value per grid node.
enum IspStatus isp_profile_new(const IspGrid *grid,
                               const double *values,
                               size_t len,
                               IspProfile **profile);

// Declares the profile zero outside [a, b].
enum IspStatus isp_profile_set_support(IspProfile *profile, double a, double b);

size_t isp_profile_len(const IspProfile *profile);

enum IspStatus isp_profile_copy_values(const IspProfile *profile, double *buf, size_t len);

void isp_profile_free(IspProfile *profile);

// Forward transform on `lambdas`. `beta` is ignored for the Hankel pair,
// whose order is `alpha`.
enum IspStatus isp_transform_forward(const IspProfile *profile,
                                     enum IspPair pair,
                                     double alpha,
                                     double beta,
                                     const IspGrid *lambdas,
                                     IspSpectral **spectral);

// Inverse transform onto `r_grid`.
enum IspStatus isp_transform_inverse(const IspSpectral *spectral,
                                     enum IspPair pair,
                                     double alpha,
                                     double beta,
                                     const IspGrid *r_grid,
                                     IspProfile **profile);

// Relative L² round-trip error and relative Plancherel mismatch.
enum IspStatus isp_plancherel_check(const IspProfile *profile,
                                    enum IspPair pair,
                                    double alpha,
                                    double beta,
                                    const IspGrid *lambdas,
                                    double *roundtrip_error,
                                    double *plancherel_error);

size_t isp_spectral_len(const IspSpectral *spectral);

enum IspStatus isp_spectral_copy_values(const IspSpectral *spectral, double *buf, size_t len);

// Linear interpolation inside the λ-window.
enum IspStatus isp_spectral_interpolate(const IspSpectral *spectral, double lambda, double *value);

void isp_spectral_free(IspSpectral *spectral);

// One of "inv-sqrt", "inv-log", "log-log", "zero".
enum IspStatus isp_theta_builtin(const char *name, IspTheta **theta);

// θ from (t, θ(t)) samples, interpolated in between.
enum IspStatus isp_theta_from_table(const double *t,
                                    const double *values,
                                    size_t len,
                                    IspTheta **theta);

// θ(t); NaN for NULL.
double isp_theta_eval(const IspTheta *theta, double t);

// Decides ∫₁^∞ θ(t)/t dt; `p`, `q` receive the fitted block decay
// exponents and may be NULL.
enum IspStatus isp_theta_classify(const IspTheta *theta,
                                  enum IspThetaClass *class_,
                                  double *p,
                                  double *q);

void isp_theta_free(IspTheta *theta);

// Ingham's box product for a convergent θ: writes the `n` half-widths to
// `lengths`, their sum, and the envelope constant C with
// |f̂(ξ)| ≤ C e^{-ξθ(ξ)} on [1, xi_max].
enum IspStatus isp_box_product(const IspTheta *theta,
                               size_t n,
                               double support_budget,
                               double xi_max,
                               double *lengths,
                               double *total_support,
                               double *envelope_constant);

// Carleman test on norms n_1, …, n_len; `partial_sum` and
// `tail_exponent` may be NULL.
enum IspStatus isp_carleman_verdict(const double *norms,
                                    size_t len,
                                    enum IspCarlemanVerdict *verdict,
                                    double *partial_sum,
                                    double *tail_exponent);

// Setting in R^n for roots "Z2" or "Z2^d"; κ has d entries or one value
// shared by all roots.
enum IspStatus isp_dunkl_setting_new(size_t n,
                                     const char *roots,
                                     const double *kappa,
                                     size_t len,
                                     IspDunklSetting **setting);

// γ and λ_κ = γ + (n-2)/2; either pointer may be NULL.
enum IspStatus isp_dunkl_setting_orders(const IspDunklSetting *setting,
                                        double *gamma,
                                        double *lambda_kappa);

// The radial Dunkl kernel φ_{κ,λ} at |x| = x_norm.
enum IspStatus isp_dunkl_phi(const IspDunklSetting *setting,
                             double lambda,
                             double x_norm,
                             double *value);

void isp_dunkl_setting_free(IspDunklSetting *setting);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INGHAM_SPECTRAL_H */
