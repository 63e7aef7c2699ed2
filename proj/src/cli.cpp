// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include "diinn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "diinn/checkpoint.hpp"
#include "diinn/kernels.hpp"
#include "diinn/resample.hpp"

namespace diinn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string scale_str(double s) { return fmt("%g", s); }

std::string db_str(double v) { return std::isinf(v) ? "inf" : fmt("%.4f", v); }

bool is_integer(double s) { return std::floor(s) == s; }

std::string pad(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ArgumentError("size must look like HxW, got '" + text + "'");
  try {
    std::size_t used = 0;
    const long h = std::stol(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("h");
    const std::string ws = text.substr(x + 1);
    const long w = std::stol(ws, &used);
    if (used != ws.size()) throw std::invalid_argument("w");
    if (h < 1 || w < 1) throw std::invalid_argument("non-positive");
    return {std::size_t(h), std::size_t(w)};
  } catch (const std::logic_error&) {
    throw ArgumentError("size must look like HxW, got '" + text + "'");
  }
}

std::vector<double> parse_scales(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw ArgumentError("empty entry in scale list '" + text + "'");
    try {
      std::size_t used = 0;
      const double s = std::stod(item, &used);
      if (used != item.size() || !(s >= 1.0) || !std::isfinite(s)) throw std::invalid_argument(item);
      out.push_back(s);
    } catch (const std::logic_error&) {
      throw ArgumentError("scales must be reals >= 1, got '" + item + "'");
    }
  }
  if (out.empty()) throw ArgumentError("no scales given");
  return out;
}

RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& overrides) {
  json j = to_json(cfg);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override must look like key=value, got '" + o + "'");
    const std::string key = o.substr(0, eq), value = o.substr(eq + 1);
    if (!j.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    try {
      j[key] = json::parse(value);
    } catch (const json::parse_error&) {
      j[key] = value;
    }
  }
  return run_config_from_json(j);
}

// ---------------------------------------------------------------- training

TrainRun run_training(const RunConfig& cfg, const DatasetFolder& data, const fs::path& out_dir,
                      const std::optional<fs::path>& resume, std::ostream& log) {
  if (data.empty()) throw IoError("no PNG/BMP images in " + data.root().string());
  fs::create_directories(out_dir);
  save_run_config(cfg, out_dir / "config.json");

  TrainRun run;
  if (resume) {
    Checkpoint ckpt = load_checkpoint(*resume);
    if (model_config_to_json(ckpt.model.config) != model_config_to_json(cfg.model))
      throw ConfigError("checkpoint " + resume->string() + " was trained with a different model config");
    run.state = to_train_state(std::move(ckpt));
    log << "resuming at epoch " << run.state.meta.epoch << ", step " << run.state.meta.step << "\n";
  } else {
    run.state.model = Model<float>::initialize(cfg.model);
  }

  const fs::path csv_path = out_dir / "loss.csv";
  const bool append = resume && fs::exists(csv_path);
  std::ofstream csv(csv_path, append ? std::ios::app : std::ios::trunc);
  if (!csv) throw IoError("cannot write " + csv_path.string());
  if (!append) csv << "epoch,step,loss,lr\n";

  TrainHooks hooks;
  hooks.on_step = [&](const StepLog& s) {
    csv << s.epoch << ',' << s.step << ',' << fmt("%.9g", s.loss) << ',' << fmt("%.9g", s.lr) << '\n';
  };
  hooks.on_epoch_end = [&](const TrainState& st, const EpochLog& e, bool best) {
    csv.flush();
    save_checkpoint(make_checkpoint(st), out_dir / "last.ckpt");
    if (best) save_checkpoint(make_checkpoint(st), out_dir / "best.ckpt");
    log << "epoch " << e.epoch << "  steps " << e.steps << "  loss " << fmt("%.6f", e.mean_loss)
        << "  lr " << fmt("%.3g", e.lr) << (best ? "  *best" : "") << "\n";
  };

  try {
    run.log = train(run.state, data, cfg.train, hooks);
  } catch (const NumericalError& e) {
    csv.flush();
    log << "training aborted: " << e.what() << "; last.ckpt holds the last completed epoch\n";
    throw;
  }
  csv.flush();
  save_checkpoint(make_checkpoint(run.state), out_dir / "last.ckpt");
  log << "finished at epoch " << run.state.meta.epoch << ", step " << run.state.meta.step << "\n";
  return run;
}

// ---------------------------------------------------------------- evaluation

std::vector<EvalRecord> evaluate(const Model<float>* model, const DatasetFolder& data,
                                 const EvalOptions& opt) {
  if (data.empty()) throw IoError("no PNG/BMP images in " + data.root().string());
  BicubicKernel degrade;
  degrade.antialias = opt.antialias;
  BicubicKernel upsample;
  upsample.antialias = false;

  const std::size_t n = data.size();
  std::vector<EvalRecord> records(opt.scales.size() * n);
  const long total = long(records.size());
  std::vector<std::string> errors(records.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < total; ++k) {
    try {
      const double s = opt.scales[std::size_t(k) / n];
      const std::size_t i = std::size_t(k) % n;
      const ImageRGB& full = data.image(i);
      EvalRecord r;
      r.image = data.name(i);
      r.scale = s;
      r.lr_h = std::size_t(std::floor(double(full.height) / s));
      r.lr_w = std::size_t(std::floor(double(full.width) / s));
      if (r.lr_h == 0 || r.lr_w == 0)
        throw ArgumentError(r.image + " is too small for scale " + scale_str(s));
      const ImageRGB hr = is_integer(s) ? crop(full, 0, 0, r.lr_h * std::size_t(s), r.lr_w * std::size_t(s))
                                        : full;
      r.hr_h = hr.height;
      r.hr_w = hr.width;
      const Tensor<float> lr = bicubic_resize(to_tensor(hr), r.lr_h, r.lr_w, degrade);
      const ImageRGB sr =
          model ? super_resolve(*model, from_tensor(lr), hr.height, hr.width)
                : clamp01(from_tensor(bicubic_resize(lr, hr.height, hr.width, upsample)));
      r.psnr_db = psnr(sr, hr, 1.0, opt.metrics);
      r.ssim = ssim(sr, hr, 1.0, opt.metrics);
      r.lr_psnr_db = lr_psnr(sr, hr, r.lr_h, r.lr_w, degrade, opt.metrics);
      records[std::size_t(k)] = std::move(r);
    } catch (const std::exception& e) {
      errors[std::size_t(k)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw ArgumentError(e);
  return records;
}

std::vector<EvalSummary> summarize(const std::vector<EvalRecord>& records) {
  struct Acc {
    EvalSummary s;
    std::size_t inf_psnr = 0, inf_lr_psnr = 0;
  };
  std::vector<Acc> acc;
  auto capped = [](double v) { return std::min(v, kPsnrTableCap); };
  for (const auto& r : records) {
    auto it = std::find_if(acc.begin(), acc.end(), [&](const Acc& a) { return a.s.scale == r.scale; });
    if (it == acc.end()) {
      acc.push_back({{r.scale, 0, 0.0, 0.0, 0.0}, 0, 0});
      it = acc.end() - 1;
    }
    ++it->s.images;
    it->s.psnr_db += capped(r.psnr_db);
    it->s.ssim += r.ssim;
    it->s.lr_psnr_db += capped(r.lr_psnr_db);
    it->inf_psnr += std::isinf(r.psnr_db) ? 1 : 0;
    it->inf_lr_psnr += std::isinf(r.lr_psnr_db) ? 1 : 0;
  }
  std::vector<EvalSummary> out;
  for (auto& a : acc) {
    const double n = double(a.s.images);
    a.s.psnr_db = a.inf_psnr == a.s.images ? kInfinitePsnr : a.s.psnr_db / n;
    a.s.ssim /= n;
    a.s.lr_psnr_db = a.inf_lr_psnr == a.s.images ? kInfinitePsnr : a.s.lr_psnr_db / n;
    out.push_back(a.s);
  }
  return out;
}

std::string format_eval_table(const std::string& method, const std::vector<EvalSummary>& rows) {
  std::ostringstream os;
  os << pad("method", 10) << pad("scale", 8) << pad("images", 8) << pad("PSNR", 10) << pad("SSIM", 8)
     << "LR-PSNR\n";
  for (const auto& r : rows)
    os << pad(method, 10) << pad("x" + scale_str(r.scale), 8) << pad(std::to_string(r.images), 8)
       << pad(db_str(r.psnr_db), 10) << pad(fmt("%.4f", r.ssim), 8) << db_str(r.lr_psnr_db) << "\n";
  return os.str();
}

std::string eval_csv(const std::string& method, const std::vector<EvalSummary>& rows) {
  std::ostringstream os;
  os << "method,scale,images,psnr_db,ssim,lr_psnr_db\n";
  for (const auto& r : rows)
    os << method << ',' << scale_str(r.scale) << ',' << r.images << ',' << db_str(r.psnr_db) << ','
       << fmt("%.6f", r.ssim) << ',' << db_str(r.lr_psnr_db) << "\n";
  return os.str();
}

std::string eval_detail_csv(const std::vector<EvalRecord>& records) {
  std::ostringstream os;
  os << "image,scale,lr_h,lr_w,hr_h,hr_w,psnr_db,ssim,lr_psnr_db\n";
  for (const auto& r : records)
    os << r.image << ',' << scale_str(r.scale) << ',' << r.lr_h << ',' << r.lr_w << ',' << r.hr_h
       << ',' << r.hr_w << ',' << db_str(r.psnr_db) << ',' << fmt("%.6f", r.ssim) << ','
       << db_str(r.lr_psnr_db) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- ablation

const std::vector<AblationVariant>& ablation_variants() {
  static const std::vector<AblationVariant> v = {
      {'a', ModulationInput::MOnly, true}, {'b', ModulationInput::MOnly, false},
      {'c', ModulationInput::MZ, true},    {'d', ModulationInput::MZ, false},
      {'e', ModulationInput::SZ, true},    {'f', ModulationInput::SZ, false}};
  return v;
}

const AblationVariant& ablation_variant(char label) {
  for (const auto& v : ablation_variants())
    if (v.label == label) return v;
  throw ArgumentError(std::string("unknown ablation variant '") + label + "' (expected a..f)");
}

std::string modulation_label(ModulationInput mode) {
  switch (mode) {
    case ModulationInput::MOnly: return "[m]";
    case ModulationInput::MZ: return "[m z]";
    case ModulationInput::SZ: return "[s z]";
  }
  return "?";
}

RunConfig ablation_config(const RunConfig& base, const AblationVariant& v) {
  RunConfig cfg = base;
  cfg.model.decoder.mode = v.mode;
  cfg.model.decoder.init_positional = v.init_positional;
  return cfg;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "model,MI,IP,decoder_params,total_params";
  if (!rows.empty())
    for (const auto& m : rows.front().metrics) {
      const std::string s = scale_str(m.scale);
      os << ",psnr_x" << s << ",ssim_x" << s << ",lr_psnr_x" << s;
    }
  os << "\n";
  for (const auto& r : rows) {
    os << '(' << r.variant.label << "),\"" << modulation_label(r.variant.mode) << "\","
       << (r.variant.init_positional ? "Yes" : "No") << ',' << r.decoder_params << ','
       << r.total_params;
    for (const auto& m : r.metrics)
      os << ',' << db_str(m.psnr_db) << ',' << fmt("%.6f", m.ssim) << ',' << db_str(m.lr_psnr_db);
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- benchmark

std::vector<BenchRow> bench(const Model<float>& model, std::size_t in_h, std::size_t in_w,
                            const std::vector<std::pair<std::size_t, std::size_t>>& outputs,
                            std::size_t repeats) {
  if (repeats == 0) throw ArgumentError("repeats must be >= 1");
  Rng rng = Rng(model.config.seed).stream("bench");
  Tensor<float> lr({3, in_h, in_w});
  for (auto& v : lr.data()) v = float(rng.uniform(0.0, 1.0));
  std::vector<BenchRow> rows;
  for (const auto& [oh, ow] : outputs) {
    (void)predict(model, lr, oh, ow);
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t r = 0; r < repeats; ++r) (void)predict(model, lr, oh, ow);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back({oh, ow, repeats, ms / double(repeats)});
  }
  return rows;
}

std::string format_bench_table(std::size_t in_h, std::size_t in_w, const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "input " << in_h << "x" << in_w << "\n";
  os << pad("output", 12) << pad("pixels", 10) << pad("repeats", 9) << "mean_ms\n";
  for (const auto& r : rows)
    os << pad(std::to_string(r.out_h) + "x" + std::to_string(r.out_w), 12)
       << pad(std::to_string(r.out_h * r.out_w), 10) << pad(std::to_string(r.repeats), 9)
       << fmt("%.3f", r.mean_ms) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- gradient check

GradCheckRun full_model_gradcheck(const ModelConfig& cfg, std::size_t lr_size, double h,
                                  double margin, std::size_t max_resamples) {
  const std::size_t out = 2 * lr_size;
  for (std::size_t attempt = 0; attempt <= max_resamples; ++attempt) {
    ModelConfig c = cfg;
    c.seed = cfg.seed + attempt;
    Model<double> model = Model<float>::initialize(c).cast<double>();
    Rng rng = Rng(c.seed).stream("gradcheck");
    Tensor<double> lr({1, 3, lr_size, lr_size}), hr({1, 3, out, out});
    for (auto& v : lr.data()) v = rng.uniform(0.0, 1.0);
    for (auto& v : hr.data()) v = rng.uniform(0.0, 1.0);
    LossBuilder loss = [&](Tape<double>& t) {
      return l1_loss(forward(t, model, t.constant(lr), out, out), t.constant(hr));
    };
    double kink;
    {
      Tape<double> t;
      (void)loss(t);
      kink = t.kink_margin();
    }
    if (!(kink > margin)) continue;
    GradCheckRun run;
    run.report = grad_check(loss, model.params.pointers(), h);
    run.worst_name = model.params.entries()[run.report.worst_param].first;
    run.seed = c.seed;
    run.kink_margin = kink;
    run.resamples = attempt;
    return run;
  }
  throw NumericalError("no draw satisfied the kink margin after " + std::to_string(max_resamples) +
                       " resamples");
}

// ---------------------------------------------------------------- command line

namespace {

struct Common {
  int threads = 0;
  std::string config;
  std::vector<std::string> overrides;
};

RunConfig load_config(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  cfg = apply_overrides(cfg, c.overrides);
  if (c.threads > 0) cfg.threads = c.threads;
  return cfg;
}

void apply_threads(int threads) {
  if (threads > 0) set_num_threads(threads);
}

void add_common(CLI::App* app, Common& c, bool with_config) {
  app->add_option("--threads", c.threads, "OpenMP threads (0: default)")->check(CLI::NonNegativeNumber);
  if (with_config) {
    app->add_option("--config", c.config, "flat JSON run config");
    app->add_option("--set", c.overrides, "override a config key, key=value (repeatable)");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> parse_sizes(const std::string& text) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(parse_size(item));
  if (out.empty()) throw ArgumentError("no output sizes given");
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Arbitrary-scale image super-resolution with a dual implicit decoder", "diinn"};
  app.require_subcommand(1);

  Common common;

  std::string data_dir, out_dir, resume;
  auto* train_cmd = app.add_subcommand("train", "train a model on a folder of HR images");
  add_common(train_cmd, common, true);
  train_cmd->add_option("--data", data_dir, "directory of PNG/BMP HR images")->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  train_cmd->add_option("--resume", resume, "checkpoint to continue from");

  std::string model_path, input, output, size_text;
  double scale = 0.0;
  auto* sr_cmd = app.add_subcommand("sr", "super-resolve one image");
  add_common(sr_cmd, common, false);
  sr_cmd->add_option("--model", model_path, "checkpoint")->required();
  sr_cmd->add_option("--input", input, "LR image")->required();
  sr_cmd->add_option("--output", output, "output image (.png or .bmp)")->required();
  auto* scale_opt = sr_cmd->add_option("--scale", scale, "upscaling factor (>= 1)");
  auto* size_opt = sr_cmd->add_option("--size", size_text, "exact output size HxW");
  scale_opt->excludes(size_opt);

  std::string method = "model", dataset, scales_text = "2,3,4", csv_path, detail_path, antialias = "on";
  MetricOptions metric_flags;
  bool y_flag = false, quantize_flag = false;
  std::size_t crop_flag = 0;
  auto* eval_cmd = app.add_subcommand("eval", "PSNR / SSIM / LR-PSNR on a folder of HR images");
  add_common(eval_cmd, common, true);
  eval_cmd->add_option("--model", model_path, "checkpoint (method=model)");
  eval_cmd->add_option("--method", method, "model or bicubic")->check(CLI::IsMember({"model", "bicubic"}));
  eval_cmd->add_option("--dataset", dataset, "directory of HR images")->required();
  eval_cmd->add_option("--scales", scales_text, "comma-separated scales");
  eval_cmd->add_option("--antialias", antialias, "bicubic downscaling antialias: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  auto* y_opt = eval_cmd->add_flag("--y-channel", y_flag, "score luma only");
  auto* crop_opt = eval_cmd->add_option("--crop-border", crop_flag, "pixels cropped on every side");
  auto* q_opt = eval_cmd->add_flag("--quantize", quantize_flag, "score 8-bit rounded values");
  eval_cmd->add_option("--csv", csv_path, "write per-scale means as CSV");
  eval_cmd->add_option("--detail-csv", detail_path, "write per-image rows as CSV");

  std::string variants_text = "a,b,c,d,e,f", eval_dir, ablate_scales = "3.14,4,8";
  auto* ablate_cmd = app.add_subcommand("ablate", "train and evaluate decoder variants (a)..(f)");
  add_common(ablate_cmd, common, true);
  ablate_cmd->add_option("--data", data_dir, "training images")->required();
  ablate_cmd->add_option("--eval-data", eval_dir, "evaluation images (default: --data)");
  ablate_cmd->add_option("--variants", variants_text, "comma-separated subset of a..f");
  ablate_cmd->add_option("--scales", ablate_scales, "evaluation scales");
  ablate_cmd->add_option("--out", out_dir, "output directory")->required();

  std::string input_size = "48x48", output_sizes = "128x128,256x256,512x512";
  std::size_t repeats = 100;
  auto* bench_cmd = app.add_subcommand("bench", "time the forward pass");
  add_common(bench_cmd, common, true);
  bench_cmd->add_option("--model", model_path, "checkpoint (default: fresh weights from --config)");
  bench_cmd->add_option("--input-size", input_size, "LR size HxW");
  bench_cmd->add_option("--output-sizes", output_sizes, "comma-separated HxW list");
  bench_cmd->add_option("--repeats", repeats, "timed passes per size")->check(CLI::PositiveNumber);

  double h = 1e-3, tol = 1e-4;
  std::size_t lr_size = 6;
  auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference check of the full model");
  add_common(gc_cmd, common, true);
  gc_cmd->add_option("--step", h, "central-difference step");
  gc_cmd->add_option("--tolerance", tol, "maximum relative error for success");
  gc_cmd->add_option("--lr-size", lr_size, "square LR input side");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) {
      const RunConfig cfg = load_config(common);
      apply_threads(cfg.threads);
      const DatasetFolder data = DatasetFolder::open(data_dir);
      run_training(cfg, data, out_dir, resume.empty() ? std::nullopt : std::optional<fs::path>(resume), out);
      return kExitOk;
    }

    if (*sr_cmd) {
      apply_threads(common.threads);
      const Checkpoint ckpt = load_checkpoint(model_path);
      const ImageRGB lr = load_image(input);
      std::size_t oh, ow;
      if (!size_text.empty()) {
        std::tie(oh, ow) = parse_size(size_text);
      } else {
        if (scale_opt->count() == 0) throw ArgumentError("give --scale or --size");
        if (!(scale >= 1.0)) throw ArgumentError("--scale must be >= 1");
        oh = std::size_t(std::llround(scale * double(lr.height)));
        ow = std::size_t(std::llround(scale * double(lr.width)));
      }
      save_image(super_resolve(ckpt.model, lr, oh, ow), output);
      out << "wrote " << output << " (" << oh << "x" << ow << ")\n";
      return kExitOk;
    }

    if (*eval_cmd) {
      RunConfig cfg = load_config(common);
      apply_threads(cfg.threads);
      EvalOptions opt;
      opt.scales = parse_scales(scales_text);
      opt.antialias = antialias == "on";
      opt.metrics = cfg.metrics;
      if (y_opt->count()) opt.metrics.y_channel = y_flag;
      if (crop_opt->count()) opt.metrics.crop_border = crop_flag;
      if (q_opt->count()) opt.metrics.quantize = quantize_flag;
      std::optional<Checkpoint> ckpt;
      if (method == "model") {
        if (model_path.empty()) throw ArgumentError("--method model needs --model");
        ckpt = load_checkpoint(model_path);
      }
      const DatasetFolder data = DatasetFolder::open(dataset);
      const auto records = evaluate(ckpt ? &ckpt->model : nullptr, data, opt);
      const auto rows = summarize(records);
      out << format_eval_table(method, rows);
      if (!csv_path.empty()) write_file(csv_path, eval_csv(method, rows));
      if (!detail_path.empty()) write_file(detail_path, eval_detail_csv(records));
      return kExitOk;
    }

    if (*ablate_cmd) {
      const RunConfig base = load_config(common);
      apply_threads(base.threads);
      const DatasetFolder train_data = DatasetFolder::open(data_dir);
      const DatasetFolder eval_data = eval_dir.empty() ? train_data : DatasetFolder::open(eval_dir);
      EvalOptions opt;
      opt.scales = parse_scales(ablate_scales);
      opt.antialias = base.train.antialias;
      opt.metrics = base.metrics;
      std::vector<AblationRow> rows;
      std::stringstream ss(variants_text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (item.size() != 1) throw ArgumentError("variants are single letters a..f, got '" + item + "'");
        const AblationVariant& v = ablation_variant(item[0]);
        const RunConfig cfg = ablation_config(base, v);
        out << "variant (" << v.label << ") MI " << modulation_label(v.mode) << " IP "
            << (v.init_positional ? "Yes" : "No") << "\n";
        const fs::path dir = fs::path(out_dir) / (std::string("variant_") + v.label);
        TrainRun tr = run_training(cfg, train_data, dir, std::nullopt, out);
        AblationRow row;
        row.variant = v;
        row.decoder_params = param_count(cfg.model.decoder, cfg.model.content_channels());
        row.total_params = tr.state.model.params.scalar_count();
        row.metrics = summarize(evaluate(&tr.state.model, eval_data, opt));
        rows.push_back(std::move(row));
      }
      const std::string csv = ablation_csv(rows);
      write_file(fs::path(out_dir) / "ablation.csv", csv);
      out << csv;
      return kExitOk;
    }

    if (*bench_cmd) {
      const RunConfig cfg = load_config(common);
      apply_threads(cfg.threads);
      const Model<float> model =
          model_path.empty() ? Model<float>::initialize(cfg.model) : load_checkpoint(model_path).model;
      const auto [ih, iw] = parse_size(input_size);
      const auto rows = bench(model, ih, iw, parse_sizes(output_sizes), repeats);
      out << format_bench_table(ih, iw, rows);
      return kExitOk;
    }

    if (*gc_cmd) {
      const RunConfig cfg = load_config(common);
      apply_threads(cfg.threads);
      const GradCheckRun r = full_model_gradcheck(cfg.model, lr_size, h);
      out << "checked " << r.report.checked << " parameters (seed " << r.seed << ", kink margin "
          << fmt("%.3g", r.kink_margin) << ")\n";
      out << "max relative error " << fmt("%.3e", r.report.max_rel_error) << " at "
          << r.worst_name << "[" << r.report.worst_index << "] (analytic "
          << fmt("%.6e", r.report.worst_analytic) << ", numeric " << fmt("%.6e", r.report.worst_numeric)
          << ")\n";
      const bool ok = r.report.max_rel_error < tol;
      out << (ok ? "PASS" : "FAIL") << " (tolerance " << fmt("%g", tol) << ")\n";
      return ok ? kExitOk : kExitFailure;
    }
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace diinn::cli
