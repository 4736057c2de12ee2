#ifndef UPG_H
#define UPG_H

/*
 * C interface to the planar-embedding / end-decomposition / graph-statistics
 * library. Every fallible function returns 0 on success or one of the error
 * codes below; a human-readable message for the most recent failure on the
 * calling thread is available from upg_error_message(). Objects returned
 * through out-parameters are owned by the caller and released with the
 * matching _free function; strings and arrays with upg_string_free /
 * upg_ints_free.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Stable error codes (also used as CLI exit codes where documented). */
enum {
    UPG_OK = 0,
    UPG_ERR_INVALID_ARGUMENT = 1,
    UPG_ERR_PARSE = 2,
    UPG_ERR_NOT_PLANAR = 3,
    UPG_ERR_NOT_BICONNECTED = 4,
    UPG_ERR_HORIZON_EXHAUSTED = 5,
    UPG_ERR_UNKNOWN_ORACLE = 6,
    UPG_ERR_GUARD_EXCEEDED = 7,
    UPG_ERR_IO = 8
};

/* Message for the most recent failure on this thread; empty string if none.
 * The pointer stays valid until the next failing call on the same thread. */
const char* upg_error_message(void);

void upg_string_free(char* text);
void upg_ints_free(int* values);

/* ------------------------------------------------------------------ */
/* Multigraphs (text format: "graph <n>" header, "e <id> <u> <v>" lines) */

typedef struct upg_graph upg_graph;

int upg_graph_parse(const char* text, upg_graph** out);
int upg_graph_format(const upg_graph* graph, char** out_text);
int upg_graph_counts(const upg_graph* graph, int* num_vertices, int* num_edges);
void upg_graph_free(upg_graph* graph);

/* ------------------------------------------------------------------ */
/* Planar embeddings (rotation systems) */

typedef struct upg_rotation upg_rotation;

/* Embeds a connected planar multigraph, sampling uniformly over the
 * embedding choices the block structure leaves free. chirality 0 flips a
 * seeded coin between the two mirror images; chirality 1 returns the
 * lexicographically smaller mirror, making the output independent of the
 * coin. Fails with UPG_ERR_NOT_PLANAR (message lists the obstruction edges)
 * on non-planar input. */
int upg_embed(const upg_graph* graph, uint64_t seed, int chirality, upg_rotation** out);
int upg_rotation_format(const upg_rotation* rotation, char** out_text);
int upg_rotation_genus(const upg_rotation* rotation, int* genus_out, int* faces_out);
void upg_rotation_free(upg_rotation* rotation);

/* ------------------------------------------------------------------ */
/* 3-block trees of 2-connected multigraphs */

typedef struct upg_blocktree upg_blocktree;

int upg_blocktree_build(const upg_graph* graph, upg_blocktree** out);
int upg_blocktree_format(const upg_blocktree* tree, char** out_text);
int upg_blocktree_counts(const upg_blocktree* tree, int* num_blocks, int* num_links);
/* Decomposes, reconstructs, and reports whether the reconstruction maps back
 * onto the input exactly (1) or not (0). */
int upg_blocktree_roundtrip(const upg_graph* graph, int* ok);
void upg_blocktree_free(upg_blocktree* tree);

/* ------------------------------------------------------------------ */
/* End decomposition over infinite-graph oracles */

/* Newline-separated list of known oracle names. */
int upg_oracle_names(char** out_text);

typedef struct upg_decompose_summary {
    int64_t window_vertices;
    int64_t window_edges;
    int64_t edges_removed;
    int factor_is_forest; /* 0/1 */
    int64_t components;
    int64_t components_finite;       /* no escape direction */
    int64_t components_one_escape;   /* exactly one */
    int64_t components_multi_escape; /* two or more */
} upg_decompose_summary;

/* Runs the full staged removal on the named oracle and returns a
 * line-oriented report (stage lines, component classes, factor links) plus
 * machine-readable tallies. h_esc 0 selects the per-stage default.
 * out_report and out_summary may each be NULL if not wanted. */
int upg_decompose(const char* oracle_name, uint64_t oracle_seed, uint64_t run_seed,
                  int horizon, int r_max, int f_max, int h_esc, char** out_report,
                  upg_decompose_summary* out_summary);

/* ------------------------------------------------------------------ */
/* Unimodularity statistics */

/* Newline-separated list of builtin transport function names. */
int upg_transport_names(char** out_text);

/* Evaluates both transport sums for a builtin transport function; equal is
 * 1 when they balance (exactly, for the integer-valued builtins). */
int upg_mtp_check(const upg_graph* graph, const char* transport_name, double* lhs,
                  double* rhs, int* equal);

typedef struct upg_balldist upg_balldist;

/* n_samples 0 sweeps every vertex once; otherwise that many seeded draws. */
int upg_sample_balls(const upg_graph* graph, int radius, int64_t n_samples, uint64_t seed,
                     upg_balldist** out);
/* Point mass at the oracle origin's r-ball, recorded max(n_samples,1) times. */
int upg_sample_balls_oracle(const char* oracle_name, uint64_t oracle_seed, int radius,
                            int64_t n_samples, upg_balldist** out);
int upg_balldist_parse(const char* text, upg_balldist** out);
int upg_balldist_format(const upg_balldist* dist, char** out_text);
int upg_tv_distance(const upg_balldist* p, const upg_balldist* q, double* out);
void upg_balldist_free(upg_balldist* dist);

/* Uniform spanning tree edge ids (sorted); caller frees with upg_ints_free. */
int upg_wilson_ust(const upg_graph* graph, uint64_t seed, int** out_edges, int* out_count);

#ifdef __cplusplus
}
#endif

#endif /* UPG_H */
