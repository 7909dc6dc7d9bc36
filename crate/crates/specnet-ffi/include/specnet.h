/* C interface to the specnet spectral network analysis library. */

#ifndef SPECNET_H
#define SPECNET_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every fallible call.
 */
typedef enum SnStatus {
  SN_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL or a buffer had the wrong length.
   */
  SN_STATUS_NULL_ARGUMENT = 1,
  /**
   * Rejected configuration (sizes, probabilities, ranges).
   */
  SN_STATUS_INVALID_CONFIG = 2,
  /**
   * Malformed input data (edge lists, ids, weights).
   */
  SN_STATUS_INVALID_DATA = 3,
  /**
   * The graph is not connected where connectivity is required.
   */
  SN_STATUS_DISCONNECTED = 4,
  /**
   * Numerical failure (no convergence, degenerate spectrum, censoring).
   */
  SN_STATUS_NUMERIC = 5,
  /**
   * File I/O failure.
   */
  SN_STATUS_IO = 6,
  /**
   * A panic was caught at the boundary.
   */
  SN_STATUS_PANIC = 7,
} SnStatus;

typedef enum SnModel {
  SN_MODEL_ER = 0,
  SN_MODEL_BA = 1,
} SnModel;

typedef enum SnWeightKind {
  SN_WEIGHT_KIND_CONSTANT = 0,
  SN_WEIGHT_KIND_UNIFORM = 1,
  SN_WEIGHT_KIND_EXPONENTIAL = 2,
} SnWeightKind;

typedef enum SnRadiusMode {
  SN_RADIUS_MODE_LOW = 0,
  SN_RADIUS_MODE_HIGH = 1,
  SN_RADIUS_MODE_MEAN = 2,
  SN_RADIUS_MODE_MAX = 3,
} SnRadiusMode;

/**
 * Opaque undirected weighted graph handle.
 */
typedef struct SnGraph SnGraph;

/**
 * Opaque eigendecomposition handle (normalized Laplacian spectrum).
 */
typedef struct SnSpectrum SnSpectrum;

/**
 * Degree summary of a graph.
 */
typedef struct SnDegreeStats {
  size_t k_min;
  double k_ave;
  double d_min;
  double d_ave;
  /**
   * k_min^2 / k_ave.
   */
  double ratio;
} SnDegreeStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *sn_version(void);

/**
 * Message of the last failure on this thread (empty string if none).
 */
const char *sn_last_error_message(void);

/**
 * One ER draw with unit weights: every pair linked with probability
 * k_ave/(n-1).
 */
enum SnStatus sn_graph_gen_er(size_t n, double k_ave, uint64_t seed, struct SnGraph **out);

/**
 * One cut-BA draw with unit weights: preferential attachment, then each
 * link deleted independently with probability q.
 */
enum SnStatus sn_graph_gen_ba_cut(size_t n,
                                  double k_ave,
                                  double q,
                                  uint64_t seed,
                                  struct SnGraph **out);

/**
 * Full generation pipeline: redraw until connected (up to `max_attempts`,
 * 0 for the default budget), then assign random weights. Writes the number
 * of rejected draws to `rejections_out` when non-NULL.
 */
enum SnStatus sn_graph_gen_connected(enum SnModel model,
                                     size_t n,
                                     double k_ave,
                                     double q,
                                     enum SnWeightKind weights,
                                     double w_mean,
                                     uint64_t seed,
                                     size_t max_attempts,
                                     size_t *rejections_out,
                                     struct SnGraph **out);

/**
 * New graph with the same topology and fresh random weights. The input
 * must have unit weights.
 */
enum SnStatus sn_graph_assign_weights(const struct SnGraph *graph,
                                      enum SnWeightKind weights,
                                      double w_mean,
                                      uint64_t seed,
                                      struct SnGraph **out);

/**
 * Reads an `i j w` edge list (optional `n <count>` header).
 */
enum SnStatus sn_graph_read_edge_list(const char *path, struct SnGraph **out);

/**
 * Writes the graph in the same edge-list format (exact round trip).
 */
enum SnStatus sn_graph_write_edge_list(const struct SnGraph *graph, const char *path);

/**
 * Releases a graph handle (NULL is a no-op).
 */
void sn_graph_free(struct SnGraph *graph);

/**
 * Node count (0 for NULL).
 */
size_t sn_graph_node_count(const struct SnGraph *graph);

/**
 * Undirected edge count (0 for NULL).
 */
size_t sn_graph_edge_count(const struct SnGraph *graph);

/**
 * vol(G) = sum of weighted degrees (0 for NULL).
 */
double sn_graph_volume(const struct SnGraph *graph);

/**
 * True iff one component spans all nodes (false for NULL).
 */
bool sn_graph_is_connected(const struct SnGraph *graph);

/**
 * Degree summary.
 */
enum SnStatus sn_graph_degree_stats(const struct SnGraph *graph, struct SnDegreeStats *out);

/**
 * Full eigendecomposition of the normalized Laplacian. Every node needs
 * positive degree.
 */
enum SnStatus sn_spectrum_compute(const struct SnGraph *graph, struct SnSpectrum **out);

/**
 * Releases a spectrum handle (NULL is a no-op).
 */
void sn_spectrum_free(struct SnSpectrum *spectrum);

/**
 * Matrix dimension of the decomposition (0 for NULL).
 */
size_t sn_spectrum_node_count(const struct SnSpectrum *spectrum);

/**
 * Copies the ascending eigenvalues into `buf` (length must equal the node
 * count).
 */
enum SnStatus sn_spectrum_eigenvalues(const struct SnSpectrum *spectrum, double *buf, size_t len);

/**
 * Second-smallest eigenvalue (the spectral gap).
 */
enum SnStatus sn_spectrum_lambda2(const struct SnSpectrum *spectrum, double *out);

/**
 * Largest eigenvalue.
 */
enum SnStatus sn_spectrum_lambda_max(const struct SnSpectrum *spectrum, double *out);

/**
 * Semicircle radius read off the spectrum with the given mode.
 */
enum SnStatus sn_spectrum_radius(const struct SnSpectrum *spectrum,
                                 enum SnRadiusMode mode,
                                 double *out);

/**
 * Mean relative deviation between the n_h-bin eigenvalue histogram and the
 * fitted semicircle.
 */
enum SnStatus sn_spectrum_fit_error(const struct SnSpectrum *spectrum,
                                    size_t n_h,
                                    enum SnRadiusMode mode,
                                    double *out);

/**
 * Expected first-arrival time under the stationary target distribution:
 * the sum of inverse nonzero eigenvalues.
 */
enum SnStatus sn_spectrum_mean_first_arrival(const struct SnSpectrum *spectrum, double *out);

/**
 * Expected first-arrival times from `source` to every node; `buf` length
 * must equal the node count. The graph must be the one the spectrum was
 * computed from.
 */
enum SnStatus sn_spectrum_arrival_times(const struct SnSpectrum *spectrum,
                                        const struct SnGraph *graph,
                                        size_t source,
                                        double *buf,
                                        size_t len);

/**
 * Closed-form semicircle approximation of the mean first-arrival time.
 */
enum SnStatus sn_m_tilde(size_t n, double r, double *out);

/**
 * Monte Carlo first-arrival estimates from `source`: per-node means into
 * `mean_buf` and, when non-NULL, standard errors into `stderr_buf`. Pass
 * t_max = 0 for the default step cap.
 */
enum SnStatus sn_mc_first_arrival(const struct SnGraph *graph,
                                  size_t source,
                                  size_t runs,
                                  size_t t_max,
                                  uint64_t seed,
                                  double *mean_buf,
                                  double *stderr_buf,
                                  size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECNET_H */
