#ifndef SCISSORTRUSS_H
#define SCISSORTRUSS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StStatus {
  ST_STATUS_OK = 0,
  ST_STATUS_NULL_POINTER = 1,
  ST_STATUS_DOMAIN = 2,
  ST_STATUS_RANGE = 3,
  ST_STATUS_CONFIG = 4,
  ST_STATUS_IO = 5,
  ST_STATUS_INFEASIBLE = 6,
  ST_STATUS_NO_CANDIDATE = 7,
  ST_STATUS_BUFFER_TOO_SMALL = 8,
  ST_STATUS_OTHER = 9,
  ST_STATUS_PANIC = 10,
} StStatus;

typedef enum StDirection {
  ST_DIRECTION_DEPLOY = 0,
  ST_DIRECTION_STOW = 1,
  ST_DIRECTION_FULL_CYCLE = 2,
} StDirection;

// Opaque antenna design.
typedef struct StDesign StDesign;

// Opaque deployment profile.
typedef struct StProfile StProfile;

// Ring-level design metrics.
typedef struct StMetrics {
  double stretched_length;
  double deployed_height;
  double stowed_height;
  double deployed_diameter;
  double stowed_diameter;
  double deployed_volume;
  double stowed_volume;
  double sr_diameter;
  double sr_height;
  double sr_volume;
  // Nonzero when the unit count differs from the 12-unit baseline.
  int extrapolated;
} StMetrics;

// One sample of a deployment profile, curves taken at the top point.
typedef struct StSample {
  double t;
  double slider;
  double theta;
  double theta_dot;
  double theta_ddot;
  double linear_velocity;
  double angular_velocity;
  double linear_acceleration;
  double angular_acceleration;
} StSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, NUL-terminated.
//
// # Safety
// `buf` must point to `len` writable bytes.
enum StStatus st_last_error(char *buf, size_t len);

// Chord length of one unit on a ring of diameter `aperture`.
//
// # Safety
// `out` must be a valid pointer to an `f64`.
enum StStatus st_stretched_length(double aperture, uint32_t unit_count, double *out);

// Span of a scissor pair of link length `link` opened to `angle_deg`.
double st_scissor_span(double link, double angle_deg);

// Planar Gruebler mobility `3(n - 1) - 2 jp - jh`.
//
// # Safety
// `out` must be a valid pointer to an `i64`.
enum StStatus st_gruebler_mobility(uint32_t n, uint32_t jp, uint32_t jh, int64_t *out);

// Undamped natural frequency for unit mass `mass`, stiffness, ring radius
// and unit length, gravity excluded.
//
// # Safety
// `omega_n` and `f_n` must be valid pointers to `f64`.
enum StStatus st_natural_frequency(double mass,
                                   double stiffness,
                                   double ring_radius,
                                   double unit_length,
                                   double *omega_n,
                                   double *f_n);

// Create a design; release it with [`st_design_free`].
//
// # Safety
// `out` must be a valid pointer to a handle slot.
enum StStatus st_design_new(double aperture,
                            uint32_t unit_count,
                            int with_links,
                            double deployed_angle_deg,
                            double stowed_angle_deg,
                            struct StDesign **out);

// # Safety
// `design` must come from [`st_design_new`] and not be used afterwards.
void st_design_free(struct StDesign *design);

// Number of links per unit.
size_t st_link_count(void);

// Copy L1..L14 into `out`, which holds `len` values.
//
// # Safety
// `design` must be a live handle and `out` must point to `len` writable `f64`.
enum StStatus st_design_link_lengths(const struct StDesign *design, double *out, size_t len);

// Ring-level metrics of a design.
//
// # Safety
// `design` must be a live handle and `out` a valid pointer.
enum StStatus st_design_metrics(const struct StDesign *design, struct StMetrics *out);

// Sample a deployment of `design` at constant slider speed; release with
// [`st_profile_free`].
//
// # Safety
// `design` must be a live handle and `out` a valid pointer to a handle slot.
enum StStatus st_profile_new(const struct StDesign *design,
                             double slider_speed,
                             enum StDirection direction,
                             size_t samples,
                             struct StProfile **out);

// Number of samples in a profile; 0 for a null handle.
//
// # Safety
// `profile` must be null or a live handle.
size_t st_profile_len(const struct StProfile *profile);

// # Safety
// `profile` must be a live handle and `out` a valid pointer.
enum StStatus st_profile_sample(const struct StProfile *profile,
                                size_t index,
                                struct StSample *out);

// # Safety
// `profile` must come from [`st_profile_new`] and not be used afterwards.
void st_profile_free(struct StProfile *profile);

// Run material selection on the bundled table and write the winner's name.
//
// # Safety
// `name` must point to `len` writable bytes.
enum StStatus st_select_material(double t_max_req, double t_min_req, char *name, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCISSORTRUSS_H */
