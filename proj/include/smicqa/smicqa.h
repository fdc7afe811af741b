// Copyright 2026 The smicqa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the smicqa library.
 *
 * Every fallible call returns a smicqa_status. On failure the message for the
 * calling thread is available from smicqa_last_error() until the next call on
 * that thread. Handles are opaque; free them with the matching *_free call.
 * Strings returned through char** belong to the caller and are released with
 * smicqa_string_free.
 */
#ifndef SMICQA_SMICQA_H_
#define SMICQA_SMICQA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SMICQA_BUILDING_LIBRARY)
#define SMICQA_API __attribute__((visibility("default")))
#else
#define SMICQA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum smicqa_status {
  SMICQA_OK = 0,
  SMICQA_ERR_INVALID_ARGUMENT = 1,
  SMICQA_ERR_SEARCH_TOO_LARGE = 2,
  SMICQA_ERR_STAGE_TOO_SMALL = 3,
  SMICQA_ERR_MODEL_NOT_FOUND = 4,
  SMICQA_ERR_MODEL_LOAD = 5,
  SMICQA_ERR_MISSING_TAP = 6,
  SMICQA_ERR_SHAPE_PROBE = 7,
  SMICQA_ERR_INFERENCE = 8,
  SMICQA_ERR_IMAGE_IO = 9,
  SMICQA_ERR_CONFIG = 10,
  SMICQA_ERR_MANIFEST = 11,
  SMICQA_ERR_DEGENERATE = 12,
  SMICQA_ERR_INTERNAL = 13
} smicqa_status;

SMICQA_API const char* smicqa_version(void);
SMICQA_API const char* smicqa_status_name(smicqa_status status);
/* Message of the last failed call on this thread, "" if none. */
SMICQA_API const char* smicqa_last_error(void);
SMICQA_API void smicqa_string_free(char* text);

/* ---- images ---- */

typedef struct smicqa_image smicqa_image;

/* PNG/BMP, 8- or 16-bit; samples are scaled to [0, 1]. */
SMICQA_API smicqa_status smicqa_image_load(const char* path, smicqa_image** out);
/* Interleaved row-major samples in [0, 1]; channels is 1 or 3 (RGB). */
SMICQA_API smicqa_status smicqa_image_from_pixels(const double* values, size_t width,
                                                  size_t height, size_t channels,
                                                  smicqa_image** out);
SMICQA_API smicqa_status smicqa_image_size(const smicqa_image* image, size_t* width,
                                           size_t* height, size_t* channels);
SMICQA_API void smicqa_image_free(smicqa_image* image);

/* ---- backbones ---- */

typedef struct smicqa_backbone smicqa_backbone;

/* A path ending in .toml is read as a backbone config; anything else is an
 * ONNX model with the default tap names. */
SMICQA_API smicqa_status smicqa_backbone_load(const char* path, smicqa_backbone** out);
/* channel_plan may be NULL for the default (8, 16, 32, 64, 64). */
SMICQA_API smicqa_status smicqa_backbone_synthetic(uint64_t seed, const size_t* channel_plan,
                                                   smicqa_backbone** out);
/* 1 for an ONNX model, 0 for the synthetic stack. */
SMICQA_API int smicqa_backbone_is_pretrained(const smicqa_backbone* backbone);
SMICQA_API smicqa_status smicqa_backbone_stage_channels(const smicqa_backbone* backbone,
                                                        size_t channels[5]);
SMICQA_API void smicqa_backbone_free(smicqa_backbone* backbone);

/* ---- scoring ---- */

typedef enum smicqa_metric {
  SMICQA_METRIC_PSNR = 0,
  SMICQA_METRIC_SSIM = 1,
  SMICQA_METRIC_LPIPS = 2
} smicqa_metric;

typedef enum smicqa_projection {
  SMICQA_PROJ_SHARED = 0,
  SMICQA_PROJ_INDEPENDENT = 1
} smicqa_projection;

typedef struct smicqa_score_options {
  smicqa_metric metric;
  int smic; /* nonzero: attention weighting on */
  uint64_t seed;
  size_t k; /* projection slices */
  int stage_first;
  int stage_last;
  smicqa_projection projection;
  int normalize; /* unit-normalise deep feature sites */
  size_t patch;
  size_t deep_stride;
  size_t traditional_stride;
  double bound_exponent;
  int force_unit_attention; /* debug */
  int resample_per_patch;
} smicqa_score_options;

/* psnr, smic on, seed 0, k 32, stages 3:4, shared, normalize, patch 7,
 * deep stride 7, traditional stride 1, exponent 0.5. */
SMICQA_API void smicqa_score_options_init(smicqa_score_options* options);

typedef struct smicqa_score {
  double value;
  double db; /* valid when has_db */
  int has_db;
  size_t term_count;
  int term_stage[5];
  double term_value[5];
  int term_weighted[5];
} smicqa_score;

/* backbone may be NULL for psnr/ssim with smic off. */
SMICQA_API smicqa_status smicqa_score_pair(const smicqa_score_options* options,
                                           const smicqa_image* ref, const smicqa_image* dist,
                                           const smicqa_backbone* backbone, smicqa_score* out);
/* Same as smicqa_score_pair, rendered as a JSON object with fields metric,
 * value, db (psnr only), smic, seed, per_stage_terms. */
SMICQA_API smicqa_status smicqa_score_json(const smicqa_score_options* options,
                                           const smicqa_image* ref, const smicqa_image* dist,
                                           const smicqa_backbone* backbone, char** out_json);

/* ---- attention maps ---- */

typedef struct smicqa_attention smicqa_attention;

/* Attention maps for stages stage_first..stage_last at the given stride. */
SMICQA_API smicqa_status smicqa_attention_compute(const smicqa_score_options* options,
                                                  const smicqa_image* ref,
                                                  const smicqa_image* dist,
                                                  const smicqa_backbone* backbone, size_t stride,
                                                  smicqa_attention** out);
SMICQA_API size_t smicqa_attention_count(const smicqa_attention* attention);
/* values stays valid until the handle is freed. */
SMICQA_API smicqa_status smicqa_attention_get(const smicqa_attention* attention, size_t index,
                                              int* stage, size_t* rows, size_t* cols,
                                              const double** values);
/* 8-bit grayscale, value * 255 rounded half-up. */
SMICQA_API smicqa_status smicqa_attention_write_image(const smicqa_attention* attention,
                                                      size_t index, const char* path);
SMICQA_API void smicqa_attention_free(smicqa_attention* attention);

/* ---- benchmark ---- */

typedef enum smicqa_report_format {
  SMICQA_REPORT_JSON = 0,
  SMICQA_REPORT_CSV = 1
} smicqa_report_format;

typedef struct smicqa_eval_options {
  const char* manifest;
  const char* root;
  const smicqa_metric* metrics;
  size_t metric_count;
  const int* smic_modes; /* each 0 or 1 */
  size_t smic_mode_count;
  smicqa_score_options base; /* metric and smic are ignored */
  size_t threads;            /* 0: all cores */
  smicqa_report_format format;
} smicqa_eval_options;

SMICQA_API void smicqa_eval_options_init(smicqa_eval_options* options);

/* Runs every (metric, smic mode) cell. A cell whose pair fails is reported as
 * aborted inside the report and sets *any_aborted; the call still returns
 * SMICQA_OK. */
SMICQA_API smicqa_status smicqa_evaluate(const smicqa_eval_options* options,
                                         const smicqa_backbone* backbone, char** out_report,
                                         int* any_aborted);

/* ---- MIC ---- */

/* exact != 0 enumerates every admissible grid (n <= 64). */
SMICQA_API smicqa_status smicqa_mic(const double* xs, const double* ys, size_t n, int exact,
                                    double bound_exponent, double* out);

#ifdef __cplusplus
}
#endif

#endif /* SMICQA_SMICQA_H_ */
