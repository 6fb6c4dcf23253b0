// Copyright 2026 The piecefit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pf/cmx.hpp"
#include "pf/compat.hpp"
#include "pf/dataset.hpp"
#include "pf/error.hpp"
#include "pf/ga.hpp"
#include "pf/image.hpp"
#include "pf/metrics.hpp"
#include "pf/postprocess.hpp"

namespace pf::cli {

namespace {

using ojson = nlohmann::ordered_json;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

ojson read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return ojson::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

const GroundTruth& require_truth(const PuzzleBundle& b) {
  if (!b.ground_truth) throw DataError("bundle has no ground truth");
  return *b.ground_truth;
}

CompatibilityTensor load_scores(const std::filesystem::path& path, const PuzzleBundle& b) {
  CompatibilityTensor t = read_cmx(path);
  if (t.size() != b.size() || t.type() != b.type) {
    throw DataError("scores " + path.string() + " do not match the bundle (n=" + std::to_string(t.size()) +
                    ", bundle n=" + std::to_string(b.size()) + ")");
  }
  return t;
}

std::vector<Phase> parse_phase_list(const std::string& list) {
  std::vector<Phase> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto p = parse_phase(item);
    if (!p) throw UsageError("unknown phase '" + item + "'");
    out.push_back(*p);
  }
  return out;
}

// --- subcommand options -------------------------------------------------

struct ScrambleOpts {
  std::string input, out;
  int piece_size = 0;
  int type = 1;
  int erode = 0;
  std::uint64_t seed = 0;
};

struct ShredOpts {
  std::vector<std::string> inputs;
  std::string out;
  int strip_width = 0;
  std::uint64_t seed = 0;
};

struct CompatOpts {
  std::string bundle, measure, out;
  int skip_eroded = 0;
  bool raw = false;
  int workers = 1;
};

struct SolveOpts {
  std::string bundle, scores, dims = "known", out, render, disable;
  GaConfig ga;
};

struct EvalOpts {
  std::string bundle, arrangement, scores, out;
  int imax = 10;
};

struct TopkOpts {
  std::string bundle, scores, out;
  int imax = 32;
};

struct HeatmapOpts {
  std::string bundle, scores, relation = "right", arrangement, out;
  bool local_fitness = false;
  int cell = 8;
};

// --- commands -----------------------------------------------------------

void cmd_scramble(const ScrambleOpts& o, std::ostream& out) {
  if (o.type != 1 && o.type != 2) throw UsageError("--type must be 1 or 2");
  const Image img = read_image(o.input);
  BundleManifest m = cut_and_scramble(img, o.piece_size, static_cast<PuzzleType>(o.type), o.seed);
  m.source = std::filesystem::path(o.input).filename().string();
  if (o.erode > 0) m.bundle = erode(m.bundle, o.erode);
  save_bundle(o.out, m);
  out << "pieces=" << m.bundle.size() << " rows=" << m.bundle.known_dims->rows
      << " cols=" << m.bundle.known_dims->cols << "\n";
}

void cmd_shred(const ShredOpts& o, std::ostream& out) {
  std::vector<Image> pages;
  for (const auto& p : o.inputs) pages.push_back(read_image(p));
  BundleManifest m = shred(pages, o.strip_width, o.seed);
  m.source = std::filesystem::path(o.inputs.front()).filename().string();
  save_bundle(o.out, m);
  out << "strips=" << m.bundle.size() << "\n";
}

void cmd_compat(const CompatOpts& o, std::ostream& out) {
  const auto kind = parse_measure(o.measure);
  if (!kind || *kind == MeasureKind::External) throw UsageError("unknown measure '" + o.measure + "'");
  const BundleManifest m = load_bundle(o.bundle);
  CompatibilityTensor t = full_tensor(*kind, m.bundle, o.skip_eroded, o.workers);
  PostprocessStats stats;
  if (!o.raw) t = postprocess(t, &stats);
  const std::size_t bytes = write_cmx(t, std::filesystem::path(o.out));
  out << "measure=" << measure_name(*kind) << " n=" << t.size() << " bytes=" << bytes
      << " degenerate_slices=" << stats.degenerate_slices << "\n";
}

ojson placements_json(const Arrangement& a) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Placement& p = a.cells()[i];
    arr.push_back({{"piece", i}, {"row", p.row}, {"col", p.col}, {"orientation", p.orientation}});
  }
  return arr;
}

void cmd_solve(SolveOpts o, std::ostream& out) {
  if (o.dims == "known") {
    o.ga.dims_mode = DimsMode::Known;
  } else if (o.dims == "unknown") {
    o.ga.dims_mode = DimsMode::Unknown;
  } else {
    throw UsageError("--dims must be known or unknown");
  }
  const std::vector<Phase> off = parse_phase_list(o.disable);
  const GaConfig cfg = ablate(o.ga, off);
  cfg.validate();

  const BundleManifest m = load_bundle(o.bundle);
  CompatibilityTensor t = load_scores(o.scores, m.bundle);
  if (!t.normalized || !t.symmetric) t = postprocess(t);
  const SolverReport r = evolve(m.bundle, t, cfg);

  ojson j;
  j["format"] = "piecefit-report";
  j["version"] = 1;
  j["pieces"] = m.bundle.size();
  j["puzzle_type"] = static_cast<int>(m.bundle.type);
  ojson c;
  c["dims"] = o.dims;
  c["population"] = cfg.population;
  c["elitism"] = cfg.elitism;
  c["stall_generations"] = cfg.stall_generations;
  c["max_generations"] = cfg.max_generations;
  c["restarts"] = cfg.restarts;
  c["alpha0"] = cfg.alpha0;
  c["skip_p1"] = cfg.skip_phase1_prob;
  c["skip_p23"] = cfg.skip_phase23_prob;
  ojson disabled = ojson::array();
  for (int k = 0; k < kPhaseCount; ++k)
    if (cfg.disabled[k]) disabled.push_back(phase_label(static_cast<Phase>(k)));
  c["disabled_phases"] = disabled;
  c["seed"] = cfg.seed;
  j["config"] = c;
  j["rows"] = r.best.dims().rows;
  j["cols"] = r.best.dims().cols;
  j["fitness"] = r.best_fitness;
  j["best_restart"] = r.best_restart;
  j["generations"] = r.generations;
  j["restart_fitness"] = r.restart_fitness;
  j["fitness_trace"] = r.fitness_trace;
  ojson phases;
  for (int k = 0; k < kPhaseCount; ++k) phases[phase_label(static_cast<Phase>(k))] = r.phase_counts[k];
  j["phase_counts"] = phases;
  if (m.bundle.ground_truth) {
    j["neighbor_accuracy"] = neighbor_accuracy(r.best, *m.bundle.ground_truth, m.bundle.type);
  }
  j["placements"] = placements_json(r.best);
  write_text(o.out, j.dump(2) + "\n");

  if (!o.render.empty()) write_image(o.render, render(m.bundle, r.best));
  out << "fitness=" << shortest(r.best_fitness) << " generations=" << r.generations;
  if (j.contains("neighbor_accuracy")) out << " neighbor_accuracy=" << shortest(j["neighbor_accuracy"].get<double>());
  out << "\n";
}

void cmd_eval(const EvalOpts& o, std::ostream& out) {
  const BundleManifest m = load_bundle(o.bundle);
  const GroundTruth& gt = require_truth(m.bundle);
  const Arrangement a = read_report_arrangement(o.arrangement);
  if (a.size() != m.bundle.size()) throw DataError("arrangement and bundle differ in piece count");
  EvalReport rep;
  rep.neighbor_accuracy = neighbor_accuracy(a, gt, m.bundle.type);
  rep.perfect = rep.neighbor_accuracy == 1.0;
  if (!o.scores.empty()) {
    CompatibilityTensor t = load_scores(o.scores, m.bundle);
    rep.top_i = top_i(t, gt, o.imax).top;
    rep.fitness = fitness(a, t);
    rep.truth_fitness = fitness(Arrangement::from_ground_truth(gt), t);
    rep.fitness_gap_percent = fitness_gap_percent(*rep.truth_fitness, *rep.fitness);
    rep.local_fitness = local_fitness_grid(a, t);
  }
  if (!o.out.empty()) write_text(o.out, rep.to_json());
  out << rep.to_text();
}

void cmd_topk(const TopkOpts& o, std::ostream& out) {
  const BundleManifest m = load_bundle(o.bundle);
  const CompatibilityTensor t = load_scores(o.scores, m.bundle);
  const TopCurve curve = top_i(t, require_truth(m.bundle), o.imax);
  std::string csv = "i,top_i\n";
  for (std::size_t i = 0; i < curve.top.size(); ++i) csv += std::to_string(i + 1) + "," + shortest(curve.top[i]) + "\n";
  if (o.out.empty()) {
    out << csv;
  } else {
    write_text(o.out, csv);
    out << "top1=" << shortest(curve.top.empty() ? 0.0 : curve.top.front()) << " boundaries=" << curve.boundaries
        << "\n";
  }
}

void cmd_heatmap(const HeatmapOpts& o, std::ostream& out) {
  const BundleManifest m = load_bundle(o.bundle);
  const CompatibilityTensor t = load_scores(o.scores, m.bundle);
  Image img;
  if (o.local_fitness) {
    if (o.arrangement.empty()) throw UsageError("--local-fitness needs --arrangement");
    const Arrangement a = read_report_arrangement(o.arrangement);
    if (a.size() != m.bundle.size()) throw DataError("arrangement and bundle differ in piece count");
    img = grid_image(local_fitness_grid(a, t), o.cell);
  } else {
    const auto side = parse_edge(o.relation);
    if (!side) throw UsageError("unknown relation '" + o.relation + "'");
    img = score_map(t, require_truth(m.bundle), *side);
  }
  write_image(o.out, img);
  out << "width=" << img.width << " height=" << img.height << "\n";
}

}  // namespace

int default_workers() {
  const char* env = std::getenv("PF_WORKERS");
  if (env == nullptr) return 1;
  int v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto res = std::from_chars(env, end, v);
  if (res.ec != std::errc() || res.ptr != end || v < 1) return 1;
  return v;
}

Arrangement read_report_arrangement(const std::filesystem::path& path) {
  const ojson j = read_json(path);
  try {
    const Dims d{j.at("rows").get<int>(), j.at("cols").get<int>()};
    const auto& list = j.at("placements");
    std::vector<Placement> cells(list.size());
    for (const auto& e : list) {
      const auto piece = e.at("piece").get<std::size_t>();
      if (piece >= cells.size()) throw DataError("placement for unknown piece " + std::to_string(piece));
      cells[piece] = {e.at("row").get<int>(), e.at("col").get<int>(), e.value("orientation", 0)};
    }
    Arrangement a(d, std::move(cells));
    if (!a.complete()) throw DataError("arrangement in " + path.string() + " is not complete");
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed report " + path.string() + ": " + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"piecefit: jigsaw puzzle reconstruction", "pf"};
  app.require_subcommand(1);
  const int workers = default_workers();

  ScrambleOpts so;
  auto* scramble = app.add_subcommand("scramble", "cut an image into square pieces and scramble them");
  scramble->add_option("--input", so.input, "source image (png or pgm)")->required();
  scramble->add_option("--piece-size", so.piece_size, "piece side in pixels")->required();
  scramble->add_option("--type", so.type, "1: locations only, 2: locations and orientations");
  scramble->add_option("--erode", so.erode, "zero this many boundary pixel layers");
  scramble->add_option("--seed", so.seed);
  scramble->add_option("--out", so.out, "bundle directory")->required();

  ShredOpts sh;
  auto* shredc = app.add_subcommand("shred", "cut pages into vertical strips");
  shredc->add_option("--input", sh.inputs, "page images")->required();
  shredc->add_option("--strip-width", sh.strip_width)->required();
  shredc->add_option("--seed", sh.seed);
  shredc->add_option("--out", sh.out, "bundle directory")->required();

  CompatOpts co;
  co.workers = workers;
  auto* compat = app.add_subcommand("compat", "score every edge pair of a bundle");
  compat->add_option("--bundle", co.bundle)->required();
  compat->add_option("--measure", co.measure, "ssd-rgb, ssd-lab, mgc, l1, prediction or oracle")->required();
  compat->add_option("--skip-eroded", co.skip_eroded, "ignore this many boundary layers");
  compat->add_flag("--raw", co.raw, "write scores before normalization and symmetrization");
  compat->add_option("--workers", co.workers);
  compat->add_option("--out", co.out, "CMX file")->required();

  SolveOpts sv;
  sv.ga.workers = workers;
  auto* solve = app.add_subcommand("solve", "reconstruct a bundle with the genetic solver");
  solve->add_option("--bundle", sv.bundle)->required();
  solve->add_option("--scores", sv.scores, "CMX file")->required();
  solve->add_option("--dims", sv.dims, "known or unknown");
  solve->add_option("--pop", sv.ga.population);
  solve->add_option("--elitism", sv.ga.elitism);
  solve->add_option("--stall", sv.ga.stall_generations);
  solve->add_option("--max-generations", sv.ga.max_generations, "0 stops on stall only");
  solve->add_option("--restarts", sv.ga.restarts);
  solve->add_option("--alpha0", sv.ga.alpha0);
  solve->add_option("--skip-p1", sv.ga.skip_phase1_prob);
  solve->add_option("--skip-p23", sv.ga.skip_phase23_prob);
  solve->add_option("--disable-phases", sv.disable, "comma separated, e.g. 1.1,1.2");
  solve->add_option("--seed", sv.ga.seed);
  solve->add_option("--workers", sv.ga.workers);
  solve->add_option("--out", sv.out, "report JSON")->required();
  solve->add_option("--render", sv.render, "write the solved image");

  EvalOpts ev;
  auto* eval = app.add_subcommand("eval", "score a solved arrangement against the ground truth");
  eval->add_option("--bundle", ev.bundle)->required();
  eval->add_option("--arrangement", ev.arrangement, "report JSON from solve")->required();
  eval->add_option("--scores", ev.scores);
  eval->add_option("--imax", ev.imax);
  eval->add_option("--out", ev.out, "eval JSON");

  TopkOpts tk;
  auto* topk = app.add_subcommand("topk", "Top-i curve of a score tensor as CSV");
  topk->add_option("--bundle", tk.bundle)->required();
  topk->add_option("--scores", tk.scores)->required();
  topk->add_option("--imax", tk.imax);
  topk->add_option("--out", tk.out, "CSV file (stdout when omitted)");

  HeatmapOpts hm;
  auto* heatmap = app.add_subcommand("heatmap", "score map or local fitness grid as an image");
  heatmap->add_option("--bundle", hm.bundle)->required();
  heatmap->add_option("--scores", hm.scores)->required();
  heatmap->add_option("--relation", hm.relation, "anchor side: top, right, bottom or left");
  heatmap->add_flag("--local-fitness", hm.local_fitness);
  heatmap->add_option("--arrangement", hm.arrangement);
  heatmap->add_option("--cell", hm.cell, "pixels per grid cell");
  heatmap->add_option("--out", hm.out, "png or pgm")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pf: usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (scramble->parsed()) cmd_scramble(so, out);
    else if (shredc->parsed()) cmd_shred(sh, out);
    else if (compat->parsed()) cmd_compat(co, out);
    else if (solve->parsed()) cmd_solve(sv, out);
    else if (eval->parsed()) cmd_eval(ev, out);
    else if (topk->parsed()) cmd_topk(tk, out);
    else if (heatmap->parsed()) cmd_heatmap(hm, out);
    return kExitOk;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::Usage:
        err << "pf: usage error: " << e.what() << "\n";
        return kExitUsage;
      case ErrorKind::Io:
        err << "pf: i/o error: " << e.what() << "\n";
        return kExitIo;
      case ErrorKind::Data:
        break;
    }
    err << "pf: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "pf: data error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace pf::cli
