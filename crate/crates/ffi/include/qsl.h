#ifndef QSL_H
#define QSL_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result of every call.
typedef enum QslStatus {
  QSL_STATUS_OK = 0,
  QSL_STATUS_NULL_POINTER = 1,
  // The input is not a valid density matrix or has the wrong shape.
  QSL_STATUS_VALIDATION = 2,
  // Numerical failure: pole, drift, positivity loss, inconsistent path.
  QSL_STATUS_NUMERICAL = 3,
  QSL_STATUS_INVALID_ARGUMENT = 4,
  // Malformed JSON or an unreadable file.
  QSL_STATUS_CONFIG = 5,
  QSL_STATUS_PANIC = 6,
} QslStatus;

// Interpolation profile for [`qsl_trajectory_geodesic`].
typedef enum QslBeta {
  QSL_BETA_LINEAR = 0,
  QSL_BETA_QUADRATIC = 1,
  QSL_BETA_SINE = 2,
} QslBeta;

// Opaque density matrix.
typedef struct QslDensity QslDensity;

// Opaque sampled trajectory.
typedef struct QslTrajectory QslTrajectory;

// Bounds for one trajectory.
typedef struct QslReport {
  double tau;
  double length_d;
  double length_e;
  double dist_d;
  double dist_e;
  double dist_phi;
  double tau_qsl;
  double tau_e;
  double tau_phi;
  double tau_combined;
  double ratio_qsl;
  double ratio_e;
  double ratio_phi;
  double gap;
  size_t nodes;
} QslReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` as a
// NUL-terminated string, truncating if needed. Returns the full message
// length in bytes, excluding the terminator.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
size_t qsl_last_error_message(char *buf, size_t len);

// Library version as a static NUL-terminated string.
const char *qsl_version(void);

// Builds a `dim × dim` density matrix from row-major real and imaginary
// parts. `im` may be null for a real matrix.
//
// # Safety
// `re` (and `im` when non-null) must point to `dim * dim` doubles; `out`
// must be a valid pointer.
enum QslStatus qsl_density_new(size_t dim,
                               const double *re,
                               const double *im,
                               struct QslDensity **out);

// Qubit state `(I + r·σ)/2`.
//
// # Safety
// `out` must be a valid pointer.
enum QslStatus qsl_density_from_bloch(double x, double y, double z, struct QslDensity **out);

// # Safety
// `rho` must be null or a handle from this library not yet freed.
void qsl_density_free(struct QslDensity *rho);

// # Safety
// `rho` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_density_dim(const struct QslDensity *rho, size_t *out);

// # Safety
// `rho` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_density_purity(const struct QslDensity *rho, double *out);

// Angle between the normalized states, in `[0, π/2]`.
//
// # Safety
// `a` and `b` must be live handles and `out` a valid pointer.
enum QslStatus qsl_distance_d(const struct QslDensity *a, const struct QslDensity *b, double *out);

// Hilbert–Schmidt distance `‖a − b‖`.
//
// # Safety
// `a` and `b` must be live handles and `out` a valid pointer.
enum QslStatus qsl_distance_e(const struct QslDensity *a, const struct QslDensity *b, double *out);

// # Safety
// `a` and `b` must be live handles and `out` a valid pointer.
enum QslStatus qsl_distance_phi(const struct QslDensity *a,
                                const struct QslDensity *b,
                                double *out);

// # Safety
// `a` and `b` must be live handles and `out` a valid pointer.
enum QslStatus qsl_fidelity_gm(const struct QslDensity *a, const struct QslDensity *b, double *out);

// Amplitude damping into the ground state at constant rate `gamma`;
// `excited` holds the `n_excited` excited-level populations.
//
// # Safety
// `excited` must point to `n_excited` doubles and `out` be a valid pointer.
enum QslStatus qsl_trajectory_gad(const double *excited,
                                  size_t n_excited,
                                  double gamma,
                                  double tau,
                                  size_t grid,
                                  struct QslTrajectory **out);

// Pure dephasing of `rho0` at constant rate `gamma`.
//
// # Safety
// `rho0` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_trajectory_dephasing(const struct QslDensity *rho0,
                                        double gamma,
                                        double tau,
                                        size_t grid,
                                        struct QslTrajectory **out);

// Thermal Kraus channel on a pure qubit with `p(t) = ln(1 + t/scale)`.
//
// # Safety
// `out` must be a valid pointer.
enum QslStatus qsl_trajectory_thermal_kraus(double c,
                                            double rho11,
                                            double scale,
                                            double tau,
                                            size_t grid,
                                            struct QslTrajectory **out);

// Driven, damped qubit from Bloch vector `r0[3]`.
//
// # Safety
// `r0` must point to three doubles and `out` be a valid pointer.
enum QslStatus qsl_trajectory_appendix_b(double theta,
                                         double omega_l,
                                         double gamma,
                                         const double *r0,
                                         double tau,
                                         size_t grid,
                                         struct QslTrajectory **out);

// Straight segment from `rho0` to `rho_tau`; `beta` is a [`QslBeta`] value.
//
// # Safety
// `rho0` and `rho_tau` must be live handles and `out` a valid pointer.
enum QslStatus qsl_trajectory_geodesic(const struct QslDensity *rho0,
                                       const struct QslDensity *rho_tau,
                                       uint32_t beta,
                                       double tau,
                                       size_t grid,
                                       struct QslTrajectory **out);

// Trajectory from a JSON model description, e.g.
// `{"model": "gad", "excited": [0.6], "tau": 1}`, on `grid` nodes.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QslStatus qsl_trajectory_from_json(const char *json, size_t grid, struct QslTrajectory **out);

// # Safety
// `traj` must be null or a handle from this library not yet freed.
void qsl_trajectory_free(struct QslTrajectory *traj);

// Number of time nodes.
//
// # Safety
// `traj` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_trajectory_len(const struct QslTrajectory *traj, size_t *out);

// Copy of the state at node `index`.
//
// # Safety
// `traj` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_trajectory_state(const struct QslTrajectory *traj,
                                    size_t index,
                                    struct QslDensity **out);

// Every bound for the sampled trajectory.
//
// # Safety
// `traj` must be a live handle and `out` a valid pointer.
enum QslStatus qsl_trajectory_report(const struct QslTrajectory *traj, struct QslReport *out);

// Whether the trajectory is a straight segment within `tol`.
//
// # Safety
// `traj` must be a live handle; `is_geodesic` must be valid; `max_residual`
// may be null.
enum QslStatus qsl_trajectory_is_geodesic(const struct QslTrajectory *traj,
                                          double tol,
                                          bool *is_geodesic,
                                          double *max_residual);

// Grid-converged report for a JSON state pair or model description, as
// accepted by `qsl bounds`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum QslStatus qsl_bounds_from_json(const char *json, struct QslReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QSL_H */
