/* C ABI for hosting the engine from another language. All buffers are
 * contiguous row-major (height, width, channels) doubles. */
#ifndef PANOFUSE_C_API_H
#define PANOFUSE_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pnf_status {
  PNF_OK = 0,
  PNF_CONFIG_ERROR = 1,
  PNF_DENOISER_ERROR = 2,
  PNF_SHAPE_MISMATCH = 3,
  PNF_ALREADY_REGISTERED = 4,
  PNF_NOT_REGISTERED = 5,
  PNF_INTERNAL_ERROR = 6
} pnf_status;

typedef struct pnf_call_frame {
  const double* latent;
  uint32_t height;
  uint32_t width;
  uint32_t channels;
  int32_t timestep;
  int32_t x_offset;
  const char* condition;
  /* Reply buffer with room for height*width*channels values. The callback sets
   * reply_* to the shape it actually produced. */
  double* reply;
  uint32_t reply_height;
  uint32_t reply_width;
  uint32_t reply_channels;
} pnf_call_frame;

/* Return 0 on success; any other value aborts the run. `message` (capacity
 * `message_size`) may receive a diagnostic. */
typedef int (*pnf_denoise_fn)(pnf_call_frame* frame, void* user_data, char* message,
                              size_t message_size);

typedef struct pnf_run_result {
  pnf_status status;
  uint8_t* raw_grid; /* raw grid file bytes */
  size_t raw_grid_size;
  char* seams_csv;
  char* timing_csv;
  char* error_message;
  int32_t error_crop;     /* 1-based crop index, 0 when not applicable */
  int32_t error_timestep; /* -1 when not applicable */
} pnf_run_result;

pnf_status pnf_register_external(pnf_denoise_fn fn, void* user_data);
pnf_status pnf_unregister_external(void);

/* Runs the panorama pipeline described by a JSON config. The result must be
 * released with pnf_free_result. */
pnf_status pnf_run_config(const char* config_json, pnf_run_result* result);
void pnf_free_result(pnf_run_result* result);

#ifdef __cplusplus
}
#endif

#endif
