/* C API for the event-driven auto-ROI eye tracking pipeline.
 *
 * All functions return an edar_status; on failure edar_last_error() holds a
 * human-readable message for the calling thread. Strings returned through
 * char** out-parameters are heap-allocated JSON documents owned by the
 * caller; release them with edar_string_free(). The edar_config handle is
 * opaque and not thread-safe; treat one handle as owned by one thread.
 */
#ifndef EDAR_H
#define EDAR_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum edar_status {
  EDAR_OK = 0,
  EDAR_ERROR = 1,        /* unexpected internal failure */
  EDAR_CONFIG_ERROR = 2, /* invalid option or config file */
  EDAR_DATA_ERROR = 3,   /* unreadable or inconsistent input data */
} edar_status;

typedef struct edar_config edar_config;

const char* edar_last_error(void);
void edar_string_free(char* s);

/* Configuration: a JSON document with "pipeline", "synth", "roinet",
 * "train_seg", "train_roi" and "finetune" sections. A fresh handle holds the
 * defaults; merges overlay individual fields. */
edar_config* edar_config_create(void);
void edar_config_free(edar_config* config);
edar_status edar_config_load_file(edar_config* config, const char* path);
edar_status edar_config_merge_json(edar_config* config, const char* json_text);
char* edar_config_json(const edar_config* config);
/* Convenience: sets every rng seed in the config at once. */
edar_status edar_config_set_seed(edar_config* config, unsigned long long seed);

/* Writes frames/, labels/, gt.csv and params.json under out_dir. */
edar_status edar_synth_generate(const edar_config* config, const char* out_dir, char** summary_json);

/* Training; data_dirs are sequence directories in the synth layout.
 * loss_csv may be NULL. */
edar_status edar_train_segnet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                              const char* weights_out, const char* loss_csv, char** summary_json);
edar_status edar_train_roinet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                              const char* weights_out, const char* loss_csv, char** summary_json);
edar_status edar_finetune_segnet(const edar_config* config, const char* const* data_dirs, int n_dirs,
                                 const char* seg_weights_in, const char* roi_weights_in,
                                 const char* weights_out, const char* loss_csv, char** summary_json);

/* Runs the per-frame pipeline over a directory of PGM frames; writes
 * seg/NNNNN.pgm, roi_trace.csv and report.json under out_dir. roi_weights may
 * be NULL (or full_res_only nonzero) to process every frame at full
 * resolution. When frames_dir sits in a sequence directory with labels and
 * gt.csv, metrics are embedded in the report. */
edar_status edar_run(const edar_config* config, const char* frames_dir, const char* roi_weights,
                     const char* seg_weights, const char* out_dir, int full_res_only,
                     char** report_json);

/* Metrics of a finished run directory against a ground-truth sequence
 * directory. */
edar_status edar_eval(const char* run_dir, const char* truth_dir, char** metrics_json);

/* Analytic FLOP/parameter/output-size accounting for the configured networks
 * at the given input resolution. */
edar_status edar_flops_report(const edar_config* config, int width, int height, char** json_out);

/* Energy model; mode is "a", "b", "c" or "search". */
edar_status edar_energy_report(const char* mode, double sensor_node, double processor_node,
                               double roi_fraction, double extrapolated_fraction, double tx_ratio,
                               char** json_out);

/* Times the pipeline stages over a sequence. */
edar_status edar_bench(const edar_config* config, const char* frames_dir, const char* roi_weights,
                       const char* seg_weights, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* EDAR_H */
