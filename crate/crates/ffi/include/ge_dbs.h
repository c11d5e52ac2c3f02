#ifndef GE_DBS_H
#define GE_DBS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GedbsStatus {
  GEDBS_STATUS_OK = 0,
  GEDBS_STATUS_NULL_POINTER = 1,
  GEDBS_STATUS_INVALID_ARGUMENT = 2,
  GEDBS_STATUS_UNKNOWN_BENCHMARK = 3,
  GEDBS_STATUS_PARSE_ERROR = 4,
  GEDBS_STATUS_IO_ERROR = 5,
  GEDBS_STATUS_BUFFER_TOO_SMALL = 6,
  GEDBS_STATUS_PANIC = 7,
} GedbsStatus;

typedef enum GedbsDomain {
  GEDBS_DOMAIN_REGRESSION = 0,
  GEDBS_DOMAIN_CIRCUIT = 1,
} GedbsDomain;

// Opaque dataset handle.
typedef struct GedbsDataset GedbsDataset;

// Opaque grammar handle.
typedef struct GedbsGrammar GedbsGrammar;

// Opaque selection handle.
typedef struct GedbsPlan GedbsPlan;

typedef struct GedbsRankSum {
  double rank_sum;
  double p_less;
  double p_greater;
  double p_two_sided;
  bool exact;
} GedbsRankSum;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *gedbs_last_error(void);

// # Safety
// `s` must be null or a string returned by this library.
void gedbs_string_free(char *s);

// Generate a built-in benchmark by id.
//
// # Safety
// `id` must be a NUL-terminated string; `out` must be writable.
enum GedbsStatus gedbs_dataset_generate(const char *id, uint64_t seed, struct GedbsDataset **out);

// Load a CSV whose last `output_count` columns are outputs.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum GedbsStatus gedbs_dataset_load_csv(const char *path,
                                        enum GedbsDomain domain,
                                        bool has_header,
                                        size_t output_count,
                                        struct GedbsDataset **out);

// # Safety
// `dataset` must be null or a live handle.
void gedbs_dataset_free(struct GedbsDataset *dataset);

// Case count, feature count and output count.
//
// # Safety
// `dataset` must be a live handle; out pointers may be null.
enum GedbsStatus gedbs_dataset_shape(const struct GedbsDataset *dataset,
                                     size_t *cases,
                                     size_t *features,
                                     size_t *outputs);

// Parse BNF text.
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum GedbsStatus gedbs_grammar_parse(const char *text, struct GedbsGrammar **out);

// The built-in grammar matching a dataset.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum GedbsStatus gedbs_grammar_for_dataset(const struct GedbsDataset *dataset,
                                           struct GedbsGrammar **out);

// # Safety
// `grammar` must be null or a live handle.
void gedbs_grammar_free(struct GedbsGrammar *grammar);

// Map a genotype. On success `*phenotype` is a new string, or null when
// the mapping is invalid; `*effective_length` counts consumed codons.
//
// # Safety
// `grammar` must be a live handle, `codons` must point to `len` bytes and
// both out pointers must be writable.
enum GedbsStatus gedbs_map_genotype(const struct GedbsGrammar *grammar,
                                    const uint8_t *codons,
                                    size_t len,
                                    size_t max_wraps,
                                    char **phenotype,
                                    size_t *effective_length);

// Engine fitness of a phenotype on a dataset: RMSE for regression, negated
// hit count for circuits, 1e12 when the phenotype is invalid.
//
// # Safety
// `dataset` must be a live handle, `phenotype` a NUL-terminated string and
// `out` writable.
enum GedbsStatus gedbs_fitness(const struct GedbsDataset *dataset,
                               const char *phenotype,
                               double *out);

// # Safety
// `p` and `q` must point to `len` doubles; `out` must be writable.
enum GedbsStatus gedbs_distance_euclidean(const double *p,
                                          const double *q,
                                          size_t len,
                                          double *out);

// Hamming distance between two bit vectors given one byte per bit
// (zero is 0, anything else is 1).
//
// # Safety
// `p` and `q` must point to `len` bytes; `out` must be writable.
enum GedbsStatus gedbs_distance_hamming(const uint8_t *p,
                                        const uint8_t *q,
                                        size_t len,
                                        uint32_t *out);

// Cluster the dataset (seeded) and select `budget_percent` of each cluster.
//
// # Safety
// `dataset` must be a live handle; `out` must be writable.
enum GedbsStatus gedbs_dbs_select(const struct GedbsDataset *dataset,
                                  double budget_percent,
                                  uint64_t seed,
                                  struct GedbsPlan **out);

// Selected count and cluster count.
//
// # Safety
// `plan` must be a live handle; out pointers may be null.
enum GedbsStatus gedbs_plan_shape(const struct GedbsPlan *plan, size_t *selected, size_t *clusters);

// Copy the selected case indices into `buf`, which must hold at least the
// selected count.
//
// # Safety
// `plan` must be a live handle and `buf` must point to `capacity` writable
// elements.
enum GedbsStatus gedbs_plan_indices(const struct GedbsPlan *plan, size_t *buf, size_t capacity);

// # Safety
// `plan` must be null or a live handle.
void gedbs_plan_free(struct GedbsPlan *plan);

// Wilcoxon rank-sum test of `a` against `b`.
//
// # Safety
// `a` and `b` must point to `na` and `nb` doubles; `out` must be writable.
enum GedbsStatus gedbs_wilcoxon(const double *a,
                                size_t na,
                                const double *b,
                                size_t nb,
                                struct GedbsRankSum *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GE_DBS_H */
