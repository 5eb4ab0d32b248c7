/*
 * selftrain - unsupervised self-training for two-class sentiment
 * classification of code-switched text.
 *
 * C interface of the shared library. Handles are opaque; every function
 * that can fail returns an st_status and leaves a human-readable message
 * in st_last_error() (thread-local). Strings returned through char** out
 * parameters are heap-allocated and must be released with st_string_free().
 */
#ifndef SELFTRAIN_H
#define SELFTRAIN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct st_corpus st_corpus;

typedef enum st_status {
    ST_OK = 0,
    ST_ERR_INVALID = 1,  /* bad arguments */
    ST_ERR_PARSE = 2,    /* malformed input data */
    ST_ERR_CONFIG = 3,   /* invalid configuration */
    ST_ERR_IO = 4,       /* file system failure */
    ST_ERR_BACKEND = 5,  /* backend process lost or protocol violation */
    ST_ERR_NUMERIC = 6,  /* non-finite weights, run aborted */
    ST_ERR_ABORTED = 7,  /* interactive annotation cancelled */
    ST_ERR_INTERNAL = 8
} st_status;

/* How a completed run stopped. */
typedef enum st_stop_reason {
    ST_STOP_EXHAUSTED = 0,      /* the whole unlabeled pool was consumed */
    ST_STOP_RATIO_POSITIVE = 1, /* positive-class quota reached */
    ST_STOP_RATIO_NEGATIVE = 2,
    ST_STOP_MAX_ITERATIONS = 3,
    ST_STOP_NUMERIC_ABORT = 4, /* partial results were still exported */
    ST_STOP_BACKEND_LOST = 5
} st_stop_reason;

/* Message describing the most recent failure on this thread. */
const char* st_last_error(void);

void st_string_free(char* s);

uint32_t st_version(void);

/* ------------------------------------------------------------------ */
/* Corpus handling                                                     */

/* Sniffs JSONL vs token-tagged from the first non-blank line. */
st_status st_corpus_read(const char* path, st_corpus** out);

st_status st_corpus_read_jsonl(const char* path, st_corpus** out);

/* tag_map_json maps tag strings to "L1"/"L2"/"O", e.g.
 * {"ENG":"L1","HIN":"L2","0":"O"} (which is the default when NULL). */
st_status st_corpus_read_token_tagged(const char* path, const char* tag_map_json,
                                      st_corpus** out);

st_status st_corpus_write_jsonl(const st_corpus* corpus, const char* path);

/* URL-token removal + lowercase + NFC; counts come back through the
 * optional out parameters. */
st_status st_corpus_preprocess(const st_corpus* corpus, st_corpus** out,
                               size_t* url_tokens_removed, size_t* emptied_count);

/* Drops neutral-gold utterances, keeps unlabeled ones. */
st_status st_corpus_filter_two_class(const st_corpus* corpus, st_corpus** out,
                                     size_t* removed_neutral);

size_t st_corpus_size(const st_corpus* corpus);

/* Borrowed pointers, valid until the corpus is freed; NULL out of range. */
const char* st_corpus_id(const st_corpus* corpus, size_t index);
const char* st_corpus_text(const st_corpus* corpus, size_t index);

/* -1 = no gold label, 0 = positive, 1 = negative, 2 = neutral,
 * -2 = index out of range. */
int st_corpus_gold(const st_corpus* corpus, size_t index);

void st_corpus_free(st_corpus* corpus);

/* ------------------------------------------------------------------ */
/* Synthetic corpora                                                   */

/* Generates train.jsonl / test.jsonl / source.jsonl under out_dir from a
 * SyntheticSpec JSON. Deterministic in the seed; when use_seed_override is
 * nonzero, seed_override replaces the spec seed (the SELFTRAIN_SEED hook).
 * summary_json_out (optional) receives sizes and paths. */
st_status st_synth_generate(const char* spec_json, int use_seed_override,
                            int64_t seed_override, const char* out_dir,
                            char** summary_json_out);

/* ------------------------------------------------------------------ */
/* The self-training loop                                              */

/* Runs the loop described by config_json over the corpus (preprocessing and
 * two-class filtering are applied internally). Writes pseudo_labels.jsonl,
 * metrics.csv and run_report.json under out_dir. heldout may be NULL; when
 * given, its gold labels feed the per-iteration metrics history.
 *
 * Returns ST_OK whenever a run result exists, including numeric-abort and
 * backend-lost endings; inspect *stop_reason_out for those. Setup failures
 * (bad config, unreadable corpus, backend that never comes up) return the
 * matching error code instead. */
st_status st_run(const char* config_json, const st_corpus* corpus,
                 const st_corpus* heldout, int use_seed_override,
                 int64_t seed_override, const char* out_dir,
                 int progress_to_stderr, int* stop_reason_out,
                 char** report_json_out);

/* ------------------------------------------------------------------ */
/* Class-ratio estimation                                              */

/* Annotator callback: return 1 for positive, 0 for negative, -1 to abort.
 * index is 1-based, total is the sample size. */
typedef int (*st_annotator)(void* user, const char* utterance_text,
                            size_t index, size_t total);

/* Samples k utterances without replacement (seeded) and annotates them.
 * A NULL annotator uses the corpus gold labels (the oracle path).
 * estimate_json_out receives the RatioEstimate JSON accepted by the run
 * config's "ratio_estimate" field. */
st_status st_estimate_ratio(const st_corpus* corpus, size_t k, uint64_t seed,
                            st_annotator annotate, void* user,
                            char** estimate_json_out);

/* ------------------------------------------------------------------ */
/* Evaluation and analysis                                             */

/* Scores a pseudo-label export against the corpus gold labels. Writes the
 * algorithmic-perspective curve CSV when curve_csv_path is non-NULL.
 * report_json_out receives the classification report. */
st_status st_evaluate(const char* labels_path, const st_corpus* corpus,
                      const char* curve_csv_path, char** report_json_out);

/* Token-ratio analysis. Writes histogram_gold.csv (when gold labels exist),
 * and with labels_path also histogram_pred.csv plus buckets.csv (per-bucket
 * performance), all under out_dir. summary_json_out reports counts,
 * undefined-ratio utterances and the gold/predicted TV distance. */
st_status st_analyze(const st_corpus* corpus, const char* labels_path,
                     const char* out_dir, char** summary_json_out);

#ifdef __cplusplus
}
#endif

#endif /* SELFTRAIN_H */
