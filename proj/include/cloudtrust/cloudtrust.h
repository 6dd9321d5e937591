#ifndef CLOUDTRUST_CLOUDTRUST_H
#define CLOUDTRUST_CLOUDTRUST_H

/*
 * C interface to the cloudtrust library.
 *
 * Every fallible call returns a ct_status. On failure the calling thread's
 * last error message is set and stays valid until that thread's next call
 * into the library. Objects are opaque handles released with the matching
 * *_free function; passing NULL to a *_free function is a no-op. Strings
 * returned through `const char**` out-parameters are owned by the handle
 * they came from.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CLOUDTRUST_BUILDING)
#    define CT_API __declspec(dllexport)
#  else
#    define CT_API __declspec(dllimport)
#  endif
#else
#  define CT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ct_status {
  CT_OK = 0,
  CT_ERR_INVALID_ARGUMENT = 1,
  CT_ERR_PARSE = 2,
  CT_ERR_IO = 3,
  CT_ERR_NOT_FOUND = 4,
  CT_ERR_INTERNAL = 5
} ct_status;

typedef enum ct_path {
  CT_PATH_IGNORANCE = 0,
  CT_PATH_DIRECT = 1,
  CT_PATH_RECOMMENDED = 2
} ct_path;

/* Trust levels I..V are the integers 1..5. */
enum { CT_LEVEL_MIN = 1, CT_LEVEL_MAX = 5 };

typedef struct ct_graph ct_graph;
typedef struct ct_chain_list ct_chain_list;
typedef struct ct_tables ct_tables;
typedef struct ct_scenario ct_scenario;
typedef struct ct_sim_result ct_sim_result;

CT_API const char* ct_last_error(void);
CT_API const char* ct_status_string(ct_status status);
CT_API const char* ct_version(void);

/* ---- trust calculus ---------------------------------------------------- */

CT_API ct_status ct_decay_factor(double t_current, double t_last, unsigned k, double tau,
                                 double* out);
CT_API ct_status ct_classify_level(double td, int* out_level);
/* "I".."V"; NULL for an out-of-range level. */
CT_API const char* ct_level_roman(int level);
/* "No Opinion", "Low distrust", ...; NULL for an out-of-range level. */
CT_API const char* ct_level_label(int level);
CT_API const char* ct_path_name(ct_path path);
/* Fixed 4-decimal rendering with ties to even, NUL-terminated. */
CT_API ct_status ct_format_decimal(double value, char* buf, size_t capacity);

/* ---- trust graph and chains -------------------------------------------- */

CT_API ct_status ct_graph_load_file(const char* path, ct_graph** out);
CT_API ct_status ct_graph_parse(const char* json, size_t length, ct_graph** out);
CT_API void ct_graph_free(ct_graph* graph);
CT_API int ct_graph_has_node(const ct_graph* graph, const char* id);

typedef struct ct_trust_result {
  double td;
  int level;
  ct_path path;
  size_t chain_count;
} ct_trust_result;

/*
 * Resolves the trust `source` places in `target` for `service`: the direct
 * edge when one exists, otherwise the recommendation over chains of at most
 * `max_len` edges, otherwise the ignorance value 0. Unknown entities yield
 * CT_ERR_NOT_FOUND.
 */
CT_API ct_status ct_trust_query(const ct_graph* graph, const char* source, const char* target,
                                const char* service, size_t max_len, ct_trust_result* out);

CT_API ct_status ct_chains_discover(const ct_graph* graph, const char* source,
                                    const char* target, const char* service, size_t max_len,
                                    ct_chain_list** out);
CT_API size_t ct_chain_list_size(const ct_chain_list* list);
/* `nodes` receives the chain rendered as "p>q>r". */
CT_API ct_status ct_chain_list_get(const ct_chain_list* list, size_t index, const char** nodes,
                                   double* total_weight, double* trust);
CT_API void ct_chain_list_free(ct_chain_list* list);

/* ---- trust tables (snapshots) ------------------------------------------ */

typedef struct ct_direct_info {
  const char* trustee;
  const char* service;
  uint64_t n_positive;
  uint64_t n_total;
  double last_time;
  double mean_score;
} ct_direct_info;

typedef struct ct_recommended_info {
  const char* service;
  const char* peer;
  int has_td;
  double td;
  double updated_at;
} ct_recommended_info;

CT_API ct_status ct_tables_load_file(const char* path, ct_tables** out);
CT_API ct_status ct_tables_parse(const char* json, size_t length, ct_tables** out);
CT_API void ct_tables_free(ct_tables* tables);
CT_API const char* ct_tables_owner(const ct_tables* tables);
CT_API size_t ct_tables_direct_count(const ct_tables* tables);
CT_API ct_status ct_tables_direct_entry(const ct_tables* tables, size_t index,
                                        ct_direct_info* out);
/* Direct trust of entry `index` at `t_now` with the given decay and bonus. */
CT_API ct_status ct_tables_direct_trust(const ct_tables* tables, size_t index, double t_now,
                                        unsigned k, double tau, double bonus, double* out);
CT_API size_t ct_tables_recommended_count(const ct_tables* tables);
CT_API ct_status ct_tables_recommended_entry(const ct_tables* tables, size_t index,
                                             ct_recommended_info* out);
/* Snapshot document; release with ct_string_free. */
CT_API ct_status ct_tables_snapshot(const ct_tables* tables, char** out);
CT_API void ct_string_free(char* str);

/* ---- simulation -------------------------------------------------------- */

CT_API ct_status ct_scenario_load_file(const char* path, ct_scenario** out);
CT_API ct_status ct_scenario_parse(const char* json, size_t length, ct_scenario** out);
CT_API void ct_scenario_free(ct_scenario* scenario);
CT_API void ct_scenario_set_seed(ct_scenario* scenario, uint64_t seed);
CT_API void ct_scenario_set_decay_k(ct_scenario* scenario, unsigned k);
CT_API void ct_scenario_set_decay_tau(ct_scenario* scenario, double tau);
CT_API void ct_scenario_set_max_chain_length(ct_scenario* scenario, size_t max_len);
CT_API void ct_scenario_set_record_graphs(ct_scenario* scenario, int enabled);
/* Checks the (possibly overridden) scenario without running it. */
CT_API ct_status ct_scenario_validate(const ct_scenario* scenario);

CT_API ct_status ct_simulate(const ct_scenario* scenario, ct_sim_result** out);
CT_API void ct_sim_result_free(ct_sim_result* result);
CT_API size_t ct_sim_trace_size(const ct_sim_result* result);

typedef struct ct_trace_info {
  uint64_t tick;
  const char* requester;
  const char* provider;
  const char* service;
  ct_path path;
  double td;
  int level;
  int granted;
  int has_score;
  double score;
} ct_trace_info;

CT_API ct_status ct_sim_trace_entry(const ct_sim_result* result, size_t index,
                                    ct_trace_info* out);
CT_API ct_status ct_sim_write_trace_csv(const ct_sim_result* result, const char* path);
/*
 * Writes <dir>/trace.csv, <dir>/tables/<entity>.json and, when graphs were
 * recorded, <dir>/graphs/event_<index>.json. The directory is created if
 * missing.
 */
CT_API ct_status ct_sim_write_outputs(const ct_sim_result* result, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* CLOUDTRUST_CLOUDTRUST_H */
