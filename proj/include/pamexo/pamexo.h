/*
 * pamexo C API.
 *
 * Opaque handles own their data; every handle returned through an out
 * parameter must be released with the matching *_destroy function. Borrowed
 * pointers (const handles returned by accessors) stay valid until their owner
 * is destroyed. Functions return a pamexo_status; on failure a message is
 * available from pamexo_last_error() on the calling thread.
 *
 * Pressures are gauge bar, angles degrees, times seconds.
 */
#ifndef PAMEXO_H
#define PAMEXO_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(PAMEXO_BUILDING)
#    define PAMEXO_API __declspec(dllexport)
#  else
#    define PAMEXO_API __declspec(dllimport)
#  endif
#else
#  define PAMEXO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pamexo_status {
  PAMEXO_OK = 0,
  PAMEXO_ERR_INVALID_ARGUMENT = 1,
  PAMEXO_ERR_DOMAIN = 2,
  PAMEXO_ERR_UNREACHABLE_PRESSURE = 3,
  PAMEXO_ERR_SOLVER = 4,
  PAMEXO_ERR_ITERATION_LIMIT = 5,
  PAMEXO_ERR_ILL_CONDITIONED = 6,
  PAMEXO_ERR_PARSE = 7,
  PAMEXO_ERR_IO = 8,
  PAMEXO_ERR_SCENARIO = 9,
  PAMEXO_ERR_SEGMENTATION = 10,
  PAMEXO_ERR_FILTER_DESIGN = 11,
  PAMEXO_ERR_INTERNAL = 99
} pamexo_status;

PAMEXO_API const char* pamexo_version(void);
PAMEXO_API const char* pamexo_status_name(pamexo_status status);
/* Message of the last failed call on this thread; "" when none. */
PAMEXO_API const char* pamexo_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct pamexo_config pamexo_config;

PAMEXO_API pamexo_status pamexo_config_create(pamexo_config** out);
PAMEXO_API void pamexo_config_destroy(pamexo_config* cfg);
PAMEXO_API pamexo_status pamexo_config_load(pamexo_config* cfg, const char* path);
/* key is "section.name", e.g. "pump.name". */
PAMEXO_API pamexo_status pamexo_config_set(pamexo_config* cfg, const char* key, const char* value);
PAMEXO_API pamexo_status pamexo_config_get_double(const pamexo_config* cfg, const char* key, double* out);

/* ---- tables ----------------------------------------------------------- */

typedef struct pamexo_table pamexo_table;

PAMEXO_API void pamexo_table_destroy(pamexo_table* table);
PAMEXO_API size_t pamexo_table_rows(const pamexo_table* table);
PAMEXO_API size_t pamexo_table_cols(const pamexo_table* table);
PAMEXO_API const char* pamexo_table_column_name(const pamexo_table* table, size_t col);
/* Numeric cell; text cells (mode names, triggers) report INVALID_ARGUMENT. */
PAMEXO_API pamexo_status pamexo_table_value(const pamexo_table* table, size_t row, size_t col, double* out);
/* Cell exactly as written to CSV. */
PAMEXO_API const char* pamexo_table_text(const pamexo_table* table, size_t row, size_t col);
/* path NULL or "-" writes to stdout. */
PAMEXO_API pamexo_status pamexo_table_write_csv(const pamexo_table* table, const char* path);

/* ---- component models ------------------------------------------------- */

typedef struct pamexo_linkage_info {
  double a_m;
  double b_m;
  double gamma0_deg;
  double theta_hi_deg;
  double l_min_m;
  double l_max_m;
} pamexo_linkage_info;

PAMEXO_API pamexo_status pamexo_pump_pressure_at(const pamexo_config* cfg, double t_s, double* out_bar);
PAMEXO_API pamexo_status pamexo_pump_time_to(const pamexo_config* cfg, double from_bar, double to_bar,
                                              double* out_s);
PAMEXO_API pamexo_status pamexo_linkage(const pamexo_config* cfg, pamexo_linkage_info* out);
/* Pressure of the joined PAM+cylinder at theta after starting at p_init at
 * theta_init (no entry dilution). */
PAMEXO_API pamexo_status pamexo_coupled_pressure(const pamexo_config* cfg, double p_init_bar,
                                                 double theta_init_deg, double theta_deg, double* out_bar);
PAMEXO_API pamexo_status pamexo_torque(const pamexo_config* cfg, double p_bar, double theta_deg, double* out_nm);

/* ---- profiles --------------------------------------------------------- */

PAMEXO_API pamexo_status pamexo_profiles(const pamexo_config* cfg, double p_init_bar, double theta_from_deg,
                                         double theta_to_deg, int steps, pamexo_table** out);

/* ---- energy report ---------------------------------------------------- */

typedef struct pamexo_energy_report {
  int legs;
  double p_set_bar;
  double p_standing_bar;
  double p_recovered_bar;
  double refill_with_er_leg_s;
  double refill_without_er_leg_s;
  double refill_with_er_all_s;
  double refill_without_er_all_s;
  double max_freq_with_er_per_min;
  double max_freq_without_er_per_min;
  double endurance_factor;
  double pump_on_total_s;
  int has_battery_autonomy;
  double battery_autonomy_h;
  char pump_label[32];
} pamexo_energy_report;

PAMEXO_API pamexo_status pamexo_energy_report_compute(const pamexo_config* cfg, double p_set_bar,
                                                      double p_standing_bar, double p_recovered_bar, int legs,
                                                      pamexo_energy_report* out);
/* Flat key=value text. path NULL or "-" writes to stdout. */
PAMEXO_API pamexo_status pamexo_energy_report_write(const pamexo_energy_report* report, const char* path);

/* ---- scenario --------------------------------------------------------- */

typedef struct pamexo_scenario pamexo_scenario;

/* trajectory_csv: file with columns t,theta_deg; NULL selects the synthetic
 * minimum-jerk sit-stand motion derived from the configuration. */
PAMEXO_API pamexo_status pamexo_scenario_run(const pamexo_config* cfg, const char* trajectory_csv,
                                             pamexo_scenario** out);
PAMEXO_API void pamexo_scenario_destroy(pamexo_scenario* s);
PAMEXO_API const pamexo_table* pamexo_scenario_samples(const pamexo_scenario* s);
/* Columns t,mode_from,mode_to,trigger. */
PAMEXO_API const pamexo_table* pamexo_scenario_events(const pamexo_scenario* s);
/* One row per pump-charging cycle. */
PAMEXO_API const pamexo_table* pamexo_scenario_cycles(const pamexo_scenario* s);
PAMEXO_API pamexo_status pamexo_scenario_report(const pamexo_scenario* s, pamexo_energy_report* out);
/* Protocol phase numbers (1..7) in order of entry, starting with the initial
 * phase 1. Writes up to cap entries; *count receives the full length. */
PAMEXO_API pamexo_status pamexo_scenario_phases(const pamexo_scenario* s, int* buf, size_t cap, size_t* count);

/* ---- identification --------------------------------------------------- */

typedef struct pamexo_fit {
  size_t n_params;
  char names[5][8];
  double params[5];
  double r_squared;
  double rms_residual;
} pamexo_fit;

PAMEXO_API pamexo_status pamexo_fit_pump(const double* t_s, const double* p_bar, size_t n, pamexo_fit* out);
PAMEXO_API pamexo_status pamexo_fit_pam(const double* p_bar, const double* eps_mm, size_t n, pamexo_fit* out);
/* CSV with header x,y. */
PAMEXO_API pamexo_status pamexo_fit_pump_csv(const char* path, pamexo_fit* out);
PAMEXO_API pamexo_status pamexo_fit_pam_csv(const char* path, pamexo_fit* out);
PAMEXO_API pamexo_status pamexo_fit_write(const pamexo_fit* fit, const char* path);

/* ---- EMG -------------------------------------------------------------- */

typedef struct pamexo_emg_options {
  double sample_rate_hz; /* <= 0: derived from the t column */
  double band_low_hz;
  double band_high_hz;
  double lowpass_hz;
  int order;
  double mvc_level;      /* <= 0: no normalisation */
  int grid_points;
} pamexo_emg_options;

PAMEXO_API void pamexo_emg_options_default(pamexo_emg_options* opt);
/* Envelope of n samples into out (n entries). */
PAMEXO_API pamexo_status pamexo_emg_envelope(const double* samples, size_t n, const pamexo_emg_options* opt,
                                             double* out);
/* Input CSV t,value or t,emg,knee_deg. envelope_out gets t,envelope. When
 * sitting_out / standing_out are non-NULL the knee column is required and
 * each receives phase_pct,mean,std averaged over the detected transitions. */
PAMEXO_API pamexo_status pamexo_emg_envelope_csv(const char* path, const pamexo_emg_options* opt,
                                                 pamexo_table** envelope_out, pamexo_table** sitting_out,
                                                 pamexo_table** standing_out);

#ifdef __cplusplus
}
#endif

#endif /* PAMEXO_H */
