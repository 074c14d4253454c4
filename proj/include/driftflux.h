/* C API for the drift flux exact-solution and symmetry toolkit.
 *
 * All entry points return a dfx_status; DFX_OK on success, DFX_CHECK_FAILED
 * when a verification ran but some check did not pass, DFX_ERROR on usage or
 * domain errors (details via dfx_last_error). Outputs are returned as opaque
 * buffers owned by the library; free them with dfx_buffer_free.
 */
#ifndef DRIFTFLUX_H
#define DRIFTFLUX_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    DFX_OK = 0,
    DFX_CHECK_FAILED = 1,
    DFX_ERROR = 2
} dfx_status;

typedef struct dfx_scenario dfx_scenario;
typedef struct dfx_buffer dfx_buffer;

const char* dfx_version(void);
/* Message of the most recent failure on this thread; empty string if none. */
const char* dfx_last_error(void);

dfx_status dfx_scenario_parse(const char* json_text, dfx_scenario** out);
dfx_status dfx_scenario_load(const char* path, dfx_scenario** out);
void dfx_scenario_free(dfx_scenario* sc);
dfx_status dfx_scenario_set_seed(dfx_scenario* sc, unsigned long long seed);
dfx_status dfx_scenario_set_threads(dfx_scenario* sc, int threads);
/* Solver overrides; pass cells <= 0, cfl <= 0, t_end = NAN or snapshots < 0
 * to keep the scenario value. */
dfx_status dfx_scenario_override_solver(dfx_scenario* sc, int cells, double cfl, double t_end,
                                        int snapshots);

const char* dfx_buffer_data(const dfx_buffer* buf);
size_t dfx_buffer_size(const dfx_buffer* buf);
void dfx_buffer_free(dfx_buffer* buf);

/* Sampled exact solution as CSV (t,x,u,v,w,r1,r2,r3). */
dfx_status dfx_generate(const dfx_scenario* sc, dfx_buffer** csv_out);
/* Upwind run: trajectory CSV plus an L1-error table against the exact solution. */
dfx_status dfx_simulate(const dfx_scenario* sc, dfx_buffer** csv_out, dfx_buffer** table_out);
/* Verification suite ("residual", "orbit", "flow", "gensym", "conservation",
 * "omega-chain", "hamiltonian", "all", or NULL for the scenario default);
 * JSON report out. Returns DFX_CHECK_FAILED when the report is not clean. */
dfx_status dfx_verify(const dfx_scenario* sc, const char* suite, dfx_buffer** report_out);
/* Three-level refinement study; CSV table with fitted convergence orders. */
dfx_status dfx_compare(const dfx_scenario* sc, dfx_buffer** table_out);
/* Symmetry-algebra report; request_json may be NULL or "{}" for defaults.
 * Returns DFX_CHECK_FAILED when any algebraic verification fails. */
dfx_status dfx_algebra(const char* request_json, dfx_buffer** report_out);

#ifdef __cplusplus
}
#endif

#endif /* DRIFTFLUX_H */
