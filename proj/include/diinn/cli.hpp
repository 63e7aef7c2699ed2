// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. run() parses argv-style arguments and dispatches to
// train / sr / eval / ablate / bench / gradcheck. The building blocks are
// exposed so that tests can compose them directly.
//
// Exit codes: 0 success, 1 verification or numerical failure, 2 usage or I/O.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diinn/config.hpp"
#include "diinn/gradcheck.hpp"

namespace diinn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "HxW" -> {H, W}.
std::pair<std::size_t, std::size_t> parse_size(const std::string& text);
/// "2,3,4" or "2.5, 3.14" -> reals.
std::vector<double> parse_scales(const std::string& text);
/// Applies "key=value" overrides; values are parsed as JSON, bare words as strings.
RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& overrides);

// ---- training ----

struct TrainRun {
  TrainState state;
  std::vector<EpochLog> log;
};

/// Trains into `out_dir`: config.json, loss.csv (epoch,step,loss,lr),
/// last.ckpt after every epoch and at the end, best.ckpt on a new best epoch
/// loss. With `resume`, model, optimizer and counters continue from that
/// checkpoint and loss.csv is appended to.
TrainRun run_training(const RunConfig& cfg, const DatasetFolder& data,
                      const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& resume, std::ostream& log);

// ---- evaluation ----

struct EvalOptions {
  std::vector<double> scales{2.0, 3.0, 4.0};
  MetricOptions metrics;
  bool antialias = true;  // kernel for HR -> LR and for LR-PSNR
};

struct EvalRecord {
  std::string image;
  double scale = 0.0;
  std::size_t lr_h = 0, lr_w = 0, hr_h = 0, hr_w = 0;
  double psnr_db = 0.0, ssim = 0.0, lr_psnr_db = 0.0;
};

struct EvalSummary {
  double scale = 0.0;
  std::size_t images = 0;
  double psnr_db = 0.0, ssim = 0.0, lr_psnr_db = 0.0;  // means; an infinite PSNR counts as 100 dB unless all are infinite
};

/// Per image and scale: LR = bicubic downscale to floor(H/s) x floor(W/s)
/// (the HR is first cropped top-left to LR*s when s is an integer); SR by the
/// model, or by bicubic upscaling when `model` is null; then PSNR / SSIM /
/// LR-PSNR against the HR. Images are processed in parallel; the result order
/// is fixed (scale-major, then file order).
std::vector<EvalRecord> evaluate(const Model<float>* model, const DatasetFolder& data,
                                 const EvalOptions& opt);
std::vector<EvalSummary> summarize(const std::vector<EvalRecord>& records);

std::string format_eval_table(const std::string& method, const std::vector<EvalSummary>& rows);
std::string eval_csv(const std::string& method, const std::vector<EvalSummary>& rows);
std::string eval_detail_csv(const std::vector<EvalRecord>& records);

// ---- ablation ----

struct AblationVariant {
  char label;  // 'a'..'f'
  ModulationInput mode;
  bool init_positional;
};

/// (a)..(f): [m], [m z], [s z], each with and then without IP.
const std::vector<AblationVariant>& ablation_variants();
const AblationVariant& ablation_variant(char label);
std::string modulation_label(ModulationInput mode);  // "[m]", "[m z]", "[s z]"

struct AblationRow {
  AblationVariant variant;
  std::size_t decoder_params = 0;
  std::size_t total_params = 0;
  std::vector<EvalSummary> metrics;
};

RunConfig ablation_config(const RunConfig& base, const AblationVariant& v);
std::string ablation_csv(const std::vector<AblationRow>& rows);

// ---- benchmark ----

struct BenchRow {
  std::size_t out_h = 0, out_w = 0;
  std::size_t repeats = 0;
  double mean_ms = 0.0;
};

/// One warm-up pass, then `repeats` timed forward passes per output size.
std::vector<BenchRow> bench(const Model<float>& model, std::size_t in_h, std::size_t in_w,
                            const std::vector<std::pair<std::size_t, std::size_t>>& outputs,
                            std::size_t repeats);
std::string format_bench_table(std::size_t in_h, std::size_t in_w, const std::vector<BenchRow>& rows);

// ---- gradient check ----

struct GradCheckRun {
  GradCheckReport report;
  std::string worst_name;
  std::uint64_t seed = 0;     // data/init seed that satisfied the kink margin
  double kink_margin = 0.0;
  std::size_t resamples = 0;
};

/// Full-model gradient check in 64-bit on a random lr_size x lr_size input
/// at scale 2 against a random target. Initialization and data are redrawn
/// from successive seeds until every relu input and l1 residual is farther
/// than `margin` from its kink.
GradCheckRun full_model_gradcheck(const ModelConfig& cfg, std::size_t lr_size = 6, double h = 1e-3,
                                  double margin = 1e-4, std::size_t max_resamples = 1000);

}  // namespace diinn::cli
