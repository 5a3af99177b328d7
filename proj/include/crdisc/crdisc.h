#ifndef CRDISC_H
#define CRDISC_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CRD_BUILDING_LIBRARY)
#define CRD_API __attribute__((visibility("default")))
#else
#define CRD_API
#endif

typedef struct crd_session crd_session;

typedef enum {
  CRD_OK = 0,
  CRD_FAIL = 1,      /* ran to completion, some verdict row is FAIL */
  CRD_CONFIG = 2,    /* unknown key, bad value, unreadable or malformed config */
  CRD_INPUT = 3,     /* bad subcommand or argument */
  CRD_NUMERICAL = 4, /* solver, construction or coverage failure */
  CRD_INVARIANT = 5,
  CRD_INTERNAL = 6,
  CRD_IO = 7
} crd_status;

/* Sessions start from the default configuration. */
CRD_API crd_session* crd_session_create(void);
CRD_API void crd_session_destroy(crd_session* s);

/* Replaces the configuration; keys missing from the file take their defaults. */
CRD_API crd_status crd_session_load_config(crd_session* s, const char* path);
CRD_API crd_status crd_session_set(crd_session* s, const char* key, const char* value);
/* Canonical "key = value" lines of the whole configuration; owned by the session. */
CRD_API const char* crd_session_config_text(crd_session* s);

/* command is space separated, e.g. "verify all". CSVs land in out_dir (created if missing).
   Returns CRD_OK or CRD_FAIL when the command ran, an error code otherwise. */
CRD_API crd_status crd_session_run(crd_session* s, const char* command, const char* out_dir);
/* Summary text of the last run; owned by the session. */
CRD_API const char* crd_session_output(crd_session* s);

/* Message of the last error on this thread, "" if none. */
CRD_API const char* crd_last_error(void);

#ifdef __cplusplus
}
#endif

#endif
