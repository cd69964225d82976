#ifndef PERCOLAB_H
#define PERCOLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PercolabStatus {
  PercolabStatus_Ok = 0,
  PercolabStatus_NullPointer = 1,
  PercolabStatus_InvalidParameter = 2,
  PercolabStatus_CapExceeded = 3,
  PercolabStatus_Budget = 4,
  PercolabStatus_Unsupported = 5,
  PercolabStatus_Algorithm = 6,
  PercolabStatus_Hypothesis = 7,
  PercolabStatus_InfiniteMoment = 8,
  PercolabStatus_Input = 9,
  PercolabStatus_Io = 10,
  PercolabStatus_Panic = 11,
} PercolabStatus;

/**
 * Verdict of a statistical or exact check.
 */
typedef enum PercolabVerdict {
  PercolabVerdict_Pass = 0,
  PercolabVerdict_Inconclusive = 1,
  PercolabVerdict_Fail = 2,
} PercolabVerdict;

/**
 * Open/closed state of every edge of one lattice.
 */
typedef struct PercolabConfig PercolabConfig;

/**
 * Box of radius n in Z^d with its edge list.
 */
typedef struct PercolabLattice PercolabLattice;

typedef struct PercolabEstimate {
  double value;
  double std_error;
} PercolabEstimate;

typedef struct PercolabRusso {
  double probability;
  double derivative;
  double pivotal_sum;
  double covariance_sum;
  /**
   * 1 when both residuals are within tolerance.
   */
  int32_t pass;
} PercolabRusso;

typedef struct PercolabVacancy {
  double closed_form;
  struct PercolabEstimate estimate;
  enum PercolabVerdict verdict;
} PercolabVacancy;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *percolab_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *percolab_version(void);

/**
 * Creates the box of radius `n` in Z^`d`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum PercolabStatus percolab_lattice_new(uintptr_t d, uintptr_t n, struct PercolabLattice **out);

/**
 * Releases a lattice. Null is accepted.
 *
 * # Safety
 * `lattice` must come from `percolab_lattice_new` and not be freed twice.
 */
void percolab_lattice_free(struct PercolabLattice *lattice);

/**
 * Vertex and edge counts of a lattice.
 *
 * # Safety
 * All pointers must be valid; `lattice` must be a live handle.
 */
enum PercolabStatus percolab_lattice_counts(const struct PercolabLattice *lattice,
                                            uintptr_t *vertices,
                                            uintptr_t *edges);

/**
 * Samples each edge open with probability `p` from the stream of `seed`.
 *
 * # Safety
 * `lattice` must be a live handle and `out` valid for one handle.
 */
enum PercolabStatus percolab_config_sample(const struct PercolabLattice *lattice,
                                           double p,
                                           uint64_t seed,
                                           struct PercolabConfig **out);

/**
 * Releases a configuration. Null is accepted.
 *
 * # Safety
 * `config` must come from `percolab_config_sample` and not be freed twice.
 */
void percolab_config_free(struct PercolabConfig *config);

/**
 * Number of open edges.
 *
 * # Safety
 * `config` must be a live handle and `open` valid.
 */
enum PercolabStatus percolab_config_open_count(const struct PercolabConfig *config,
                                               uintptr_t *open);

/**
 * Writes 1 to `result` if the origin reaches the boundary through open edges.
 *
 * # Safety
 * Both handles must be live and `result` valid; the configuration must
 * have been sampled on this lattice.
 */
enum PercolabStatus percolab_connected_to_boundary(const struct PercolabLattice *lattice,
                                                   const struct PercolabConfig *config,
                                                   int32_t *result);

/**
 * Monte Carlo estimate of theta_n(p) on Z^d.
 *
 * # Safety
 * `out` must be valid.
 */
enum PercolabStatus percolab_estimate_theta(uintptr_t d,
                                            uintptr_t n,
                                            double p,
                                            uint64_t replicas,
                                            uint64_t seed,
                                            struct PercolabEstimate *out);

/**
 * Russo's formula for {0 <-> boundary} on the box of radius n, by enumeration.
 *
 * # Safety
 * `out` must be valid.
 */
enum PercolabStatus percolab_exact_russo(uintptr_t d,
                                         uintptr_t n,
                                         double p,
                                         struct PercolabRusso *out);

/**
 * Vacancy probability of the Boolean model with radius law `nu`
 * ("fixed:1", "uniform:0.5:1.5", "pareto:2.5:1").
 *
 * # Safety
 * `nu` must be a NUL-terminated string and `out` valid.
 */
enum PercolabStatus percolab_boolean_vacancy(uintptr_t d,
                                             double lambda,
                                             const char *nu,
                                             uint64_t replicas,
                                             uint64_t seed,
                                             double trunc_eps,
                                             struct PercolabVacancy *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERCOLAB_H */
