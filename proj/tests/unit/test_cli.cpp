// Copyright 2026 The DIINN-cpp Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "diinn/checkpoint.hpp"
#include "diinn/cli.hpp"
#include "diinn/metrics.hpp"
#include "util.hpp"

using namespace diinn;
using namespace diinn::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return slurp(test::data_dir() / "golden" / name); }

std::string tiny_config_path() { return (test::data_dir() / ".." / ".." / "configs" / "tiny.json").string(); }

std::string desk() { return (test::data_dir() / "desk").string(); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, sep);) v.push_back(f);
  return v;
}

}  // namespace

TEST_CASE("size and scale parsing") {
  CHECK(parse_size("48x64") == std::pair<std::size_t, std::size_t>{48, 64});
  CHECK(parse_size("151X151") == std::pair<std::size_t, std::size_t>{151, 151});
  for (const char* bad : {"", "48", "x48", "48x", "0x4", "4x-1", "axb"}) CHECK_THROWS(parse_size(bad));
  CHECK(parse_scales("2,3.14,4") == std::vector<double>{2.0, 3.14, 4.0});
  CHECK_THROWS(parse_scales("2,,3"));
  CHECK_THROWS(parse_scales("0.5"));
}

TEST_CASE("run configuration round-trips and rejects unknown keys") {
  const RunConfig cfg = load_run_config(tiny_config_path());
  CHECK(cfg.model.encoder.feat_channels == 8);
  CHECK(cfg.model.decoder.mode == ModulationInput::SZ);
  const std::string text = emit_run_config(cfg);
  CHECK(emit_run_config(parse_run_config(text)) == text);

  RunConfig custom;
  custom.model.decoder.mode = ModulationInput::MOnly;
  custom.model.decoder.init_positional = true;
  custom.model.decoder.omega0 = 12.5;
  custom.train.scales = {2, 4};
  custom.train.antialias = false;
  custom.metrics.y_channel = true;
  custom.metrics.crop_border = 4;
  custom.seed = 77;
  const auto back = parse_run_config(emit_run_config(custom));
  CHECK(emit_run_config(back) == emit_run_config(custom));
  CHECK(back.model.seed == 77);
  CHECK(back.train.seed == 77);
  CHECK(back.model.decoder.omega0 == 12.5);

  CHECK_THROWS_AS(parse_run_config(R"({"hiden": 3})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"mode": "X"})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("{not json"), ConfigError);
}

TEST_CASE("overrides replace configuration keys") {
  const RunConfig base = load_run_config(tiny_config_path());
  const auto cfg = apply_overrides(base, {"epochs=5", "mode=M_Z", "scales=[2,3]", "lr0=0.001"});
  CHECK(cfg.train.epochs == 5);
  CHECK(cfg.model.decoder.mode == ModulationInput::MZ);
  CHECK(cfg.train.scales == std::vector<int>{2, 3});
  CHECK(cfg.train.lr0 == 0.001);
  CHECK_THROWS_AS(apply_overrides(base, {"nonsense=1"}), ConfigError);
  CHECK_THROWS(apply_overrides(base, {"epochs"}));
}

TEST_CASE("report formats match the golden files") {
  const std::vector<EvalSummary> rows{{2.0, 5, 31.80912, 0.909712, 40.7654},
                                      {3.14, 5, 27.5, 0.81234, 38.1},
                                      {1.0, 5, kInfinitePsnr, 1.0, kInfinitePsnr}};
  CHECK(format_eval_table("bicubic", rows) == golden("table.txt"));
  CHECK(eval_csv("bicubic", rows) == golden("csv.txt"));
  const std::vector<EvalRecord> rec{{"baby.png", 2.0, 256, 256, 512, 512, 33.9, 0.95, 42.1},
                                    {"bird.png", 2.0, 144, 144, 288, 288, kInfinitePsnr, 1.0, kInfinitePsnr}};
  CHECK(eval_detail_csv(rec) == golden("detail.txt"));
  std::vector<AblationRow> ab;
  for (char c : std::string("af"))
    ab.push_back({ablation_variant(c), 1234, 5678, {{3.14, 2, 25.1, 0.8, 35.2}, {4.0, 2, 24.0, 0.7, 34.0}}});
  CHECK(ablation_csv(ab) == golden("ablation.txt"));
  const std::vector<BenchRow> b{{128, 128, 100, 1.5}, {256, 256, 100, 6.25}, {512, 512, 100, 25.0}};
  CHECK(format_bench_table(48, 48, b) == golden("bench.txt"));
}

TEST_CASE("summaries cap infinite PSNR unless every image is infinite") {
  std::vector<EvalRecord> rec{{"a", 2.0, 1, 1, 2, 2, kInfinitePsnr, 1.0, kInfinitePsnr},
                              {"b", 2.0, 1, 1, 2, 2, 30.0, 0.5, 40.0},
                              {"c", 3.0, 1, 1, 3, 3, kInfinitePsnr, 1.0, kInfinitePsnr}};
  const auto rows = summarize(rec);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].scale == 2.0);
  CHECK(rows[0].images == 2);
  CHECK(rows[0].psnr_db == doctest::Approx((kPsnrTableCap + 30.0) / 2));
  CHECK(rows[0].lr_psnr_db == doctest::Approx((kPsnrTableCap + 40.0) / 2));
  CHECK(rows[0].ssim == doctest::Approx(0.75));
  CHECK(rows[1].psnr_db == kInfinitePsnr);
}

TEST_CASE("ablation variants follow the table rows") {
  const char* mi[6] = {"[m]", "[m]", "[m z]", "[m z]", "[s z]", "[s z]"};
  const auto& vs = ablation_variants();
  REQUIRE(vs.size() == 6);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(vs[i].label == char('a' + i));
    CHECK(modulation_label(vs[i].mode) == mi[i]);
    CHECK(vs[i].init_positional == (i % 2 == 0));
  }
  CHECK_THROWS(ablation_variant('g'));
  const RunConfig base = load_run_config(tiny_config_path());
  const auto cfg = [&](char c) { return ablation_config(base, ablation_variant(c)).model; };
  const auto count = [&](char c) { return param_count(cfg(c).decoder, cfg(c).content_channels()); };
  CHECK(count('c') == count('e'));
  CHECK(count('d') == count('f'));
  CHECK(count('a') < count('c'));
  const std::size_t cz = cfg('e').content_channels(), h = cfg('e').decoder.hidden;
  CHECK(count('e') - count('f') == 4 * cz + (cz - 3) * h);
}

TEST_CASE("usage and IO errors exit with code 2") {
  CHECK(call({}).code == kExitUsage);
  CHECK(call({"frobnicate"}).code == kExitUsage);
  CHECK(call({"train", "--data", desk()}).code == kExitUsage);
  CHECK(call({"--help"}).code == kExitOk);

  const auto dir = test::scratch_dir("cli_errors");
  const auto r = call({"train", "--config", tiny_config_path(), "--data", (dir / "missing").string(), "--out",
                       (dir / "run").string()});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("not found") != std::string::npos);
  CHECK(call({"eval", "--method", "bicubic", "--dataset", (dir / "missing").string()}).code == kExitUsage);
  CHECK(call({"sr", "--model", (dir / "none.ckpt").string(), "--input", "x.png", "--output", "y.png", "--scale",
              "2"})
            .code == kExitUsage);
  CHECK(call({"train", "--config", tiny_config_path(), "--set", "bogus=1", "--data", desk(), "--out",
              (dir / "run").string()})
            .code == kExitUsage);
}

TEST_CASE("sr writes the requested sizes") {
  const auto dir = test::scratch_dir("cli_sr");
  save_checkpoint(Model<float>::initialize(load_run_config(tiny_config_path()).model), dir / "m.ckpt");
  Rng rng(1);
  save_image(test::random_image(48, 48, rng), dir / "in.png");
  const auto sr = [&](std::vector<std::string> extra) {
    std::vector<std::string> a{"sr", "--model", (dir / "m.ckpt").string(), "--input", (dir / "in.png").string(),
                               "--output", (dir / "out.png").string()};
    a.insert(a.end(), extra.begin(), extra.end());
    const auto r = call(a);
    REQUIRE(r.code == kExitOk);
    const auto img = load_image(dir / "out.png");
    return std::pair{img.height, img.width};
  };
  CHECK(sr({"--scale", "2.5"}) == std::pair<std::size_t, std::size_t>{120, 120});
  CHECK(sr({"--scale", "1"}) == std::pair<std::size_t, std::size_t>{48, 48});
  CHECK(sr({"--size", "151x151"}) == std::pair<std::size_t, std::size_t>{151, 151});
  CHECK(sr({"--size", "60x97"}) == std::pair<std::size_t, std::size_t>{60, 97});
  CHECK(call({"sr", "--model", (dir / "m.ckpt").string(), "--input", (dir / "in.png").string(), "--output",
              (dir / "out.png").string(), "--scale", "2", "--size", "96x96"})
            .code == kExitUsage);
  CHECK(call({"sr", "--model", (dir / "m.ckpt").string(), "--input", (dir / "in.png").string(), "--output",
              (dir / "out.png").string(), "--scale", "0.5"})
            .code == kExitUsage);
}

TEST_CASE("bicubic eval is deterministic and infinite at scale 1") {
  const auto dir = test::scratch_dir("cli_eval");
  const auto eval = [&](const std::string& tag) {
    const auto r = call({"eval", "--method", "bicubic", "--dataset", desk(), "--scales", "1,2,3.5", "--csv",
                         (dir / (tag + ".csv")).string(), "--detail-csv", (dir / (tag + "_detail.csv")).string()});
    REQUIRE(r.code == kExitOk);
    return r.out;
  };
  const auto first = eval("a"), second = eval("b");
  CHECK(first == second);
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  CHECK(slurp(dir / "a_detail.csv") == slurp(dir / "b_detail.csv"));
  const auto rows = lines(slurp(dir / "a.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "method,scale,images,psnr_db,ssim,lr_psnr_db");
  CHECK(rows[1] == "bicubic,1,4,inf,1.000000,inf");
  CHECK(split(rows[3], ',')[1] == "3.5");
  CHECK(lines(slurp(dir / "a_detail.csv")).size() == 1 + 4 * 3);
}

TEST_CASE("resumed training matches an uninterrupted run") {
  const auto dir = test::scratch_dir("cli_resume");
  const std::string cfg = tiny_config_path();
  const auto train = [&](const std::string& out, std::vector<std::string> extra) {
    std::vector<std::string> a{"train", "--config", cfg, "--data", desk(), "--out", (dir / out).string(),
                               "--set", "patch_base=8"};
    a.insert(a.end(), extra.begin(), extra.end());
    const auto r = call(a);
    REQUIRE(r.code == kExitOk);
    return r.out;
  };
  train("straight", {"--set", "epochs=3"});
  train("split", {"--set", "epochs=1"});
  train("split", {"--set", "epochs=3", "--resume", (dir / "split" / "last.ckpt").string()});
  CHECK(slurp(dir / "straight" / "last.ckpt") == slurp(dir / "split" / "last.ckpt"));
  CHECK(slurp(dir / "straight" / "loss.csv") == slurp(dir / "split" / "loss.csv"));
  CHECK(fs::exists(dir / "straight" / "best.ckpt"));
  const auto echoed = load_run_config(dir / "straight" / "config.json");
  CHECK(echoed.train.epochs == 3);
  CHECK(echoed.train.patch_base == 8);
  const auto loss = lines(slurp(dir / "straight" / "loss.csv"));
  CHECK(loss[0] == "epoch,step,loss,lr");
  CHECK(loss.size() == 1 + 3 * 2);

  const auto ckpt = load_checkpoint(dir / "split" / "last.ckpt");
  CHECK(ckpt.meta.epoch == 3);
  CHECK(ckpt.meta.step == 6);
  CHECK(ckpt.has_optimizer);
  CHECK(ckpt.optimizer.step == 6);

  // Resuming with a different architecture is refused.
  CHECK(call({"train", "--config", cfg, "--data", desk(), "--out", (dir / "other").string(), "--set", "hidden=8",
              "--resume", (dir / "split" / "last.ckpt").string()})
            .code == kExitUsage);
}

TEST_CASE("a single-variant ablation equals train followed by eval") {
  const auto dir = test::scratch_dir("cli_ablate");
  const std::string cfg = tiny_config_path();
  const std::vector<std::string> common{"--config", cfg, "--set", "patch_base=8", "--set", "epochs=1"};
  std::vector<std::string> ab{"ablate", "--data", desk(), "--variants", "f", "--scales", "2,3.14", "--out",
                              (dir / "ablate").string()};
  ab.insert(ab.end(), common.begin(), common.end());
  REQUIRE(call(ab).code == kExitOk);
  std::vector<std::string> tr{"train", "--data", desk(), "--out", (dir / "train").string()};
  tr.insert(tr.end(), common.begin(), common.end());
  REQUIRE(call(tr).code == kExitOk);
  CHECK(slurp(dir / "ablate" / "variant_f" / "last.ckpt") == slurp(dir / "train" / "last.ckpt"));
  REQUIRE(call({"eval", "--model", (dir / "train" / "last.ckpt").string(), "--dataset", desk(), "--scales", "2,3.14",
                "--csv", (dir / "eval.csv").string()})
              .code == kExitOk);

  const auto ab_rows = lines(slurp(dir / "ablate" / "ablation.csv"));
  const auto ev_rows = lines(slurp(dir / "eval.csv"));
  REQUIRE(ab_rows.size() == 2);
  REQUIRE(ev_rows.size() == 3);
  CHECK(ab_rows[0] ==
        "model,MI,IP,decoder_params,total_params,psnr_x2,ssim_x2,lr_psnr_x2,psnr_x3.14,ssim_x3.14,lr_psnr_x3.14");
  const auto a = split(ab_rows[1], ',');
  CHECK(a[0] == "(f)");
  CHECK(a[1] == "\"[s z]\"");
  CHECK(a[2] == "No");
  const auto ckpt = load_checkpoint(dir / "train" / "last.ckpt");
  CHECK(a[3] == std::to_string(param_count(ckpt.model.config.decoder, ckpt.model.config.content_channels())));
  CHECK(a[4] == std::to_string(ckpt.model.params.scalar_count()));
  for (std::size_t s = 0; s < 2; ++s) {
    const auto e = split(ev_rows[1 + s], ',');
    CHECK(a[5 + 3 * s] == e[3]);
    CHECK(a[6 + 3 * s] == e[4]);
    CHECK(a[7 + 3 * s] == e[5]);
  }
}

TEST_CASE("bench prints a well-formed table with one repeat") {
  const auto r = call({"bench", "--config", tiny_config_path(), "--input-size", "8x8", "--output-sizes",
                       "16x16,32x32,24x40", "--repeats", "1"});
  REQUIRE(r.code == kExitOk);
  const auto l = lines(r.out);
  REQUIRE(l.size() == 5);
  CHECK(l[0] == "input 8x8");
  CHECK(split(l[1], ' ')[0] == "output");
  for (std::size_t i = 2; i < 5; ++i) {
    std::istringstream row(l[i]);
    std::string size;
    std::size_t pixels = 0, repeats = 0;
    double ms = -1;
    row >> size >> pixels >> repeats >> ms;
    CHECK(repeats == 1);
    CHECK(ms >= 0.0);
  }
  CHECK(l[4].rfind("24x40", 0) == 0);
  CHECK(call({"bench", "--config", tiny_config_path(), "--repeats", "0"}).code == kExitUsage);
}
