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

#include "pf/compat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pf/error.hpp"
#include "pf/parallel.hpp"

namespace pf {

const char* measure_name(MeasureKind k) noexcept {
  switch (k) {
    case MeasureKind::SsdRgb: return "ssd-rgb";
    case MeasureKind::SsdLab: return "ssd-lab";
    case MeasureKind::Mgc: return "mgc";
    case MeasureKind::L1Asym: return "l1";
    case MeasureKind::Prediction: return "prediction";
    case MeasureKind::Oracle: return "oracle";
    case MeasureKind::External: return "external";
  }
  return "?";
}

std::optional<MeasureKind> parse_measure(std::string_view name) {
  for (MeasureKind k : {MeasureKind::SsdRgb, MeasureKind::SsdLab, MeasureKind::Mgc, MeasureKind::L1Asym,
                        MeasureKind::Prediction, MeasureKind::Oracle}) {
    if (name == measure_name(k)) return k;
  }
  return std::nullopt;
}

std::array<double, 3> srgb_to_lab(double r8, double g8, double b8) noexcept {
  auto linear = [](double v) {
    v /= 255.0;
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
  };
  const double r = linear(r8), g = linear(g8), b = linear(b8);
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / 0.95047;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / 1.08883;
  constexpr double delta = 6.0 / 29.0;
  auto f = [](double t) {
    return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
  };
  const double fx = f(x), fy = f(y), fz = f(z);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

namespace {

/// Pixel line `depth` pixels in from edge `e`, ordered as if the piece were
/// turned so that `e` is its right side (top to bottom).
std::vector<double> edge_line(const Piece& p, Edge e, int depth) {
  const int o = (index(Edge::Right) - index(e)) & 3;  // turns that carry e to Right
  const int h = p.oriented_height(o);
  const int w = p.oriented_width(o);
  const int col = w - 1 - depth;
  std::vector<double> line(static_cast<std::size_t>(h) * p.channels());
  std::size_t k = 0;
  for (int r = 0; r < h; ++r)
    for (int ch = 0; ch < p.channels(); ++ch) line[k++] = p.oriented(o, r, col, ch);
  return line;
}

std::vector<double> reversed_pixels(const std::vector<double>& line, int channels) {
  std::vector<double> out(line.size());
  const std::size_t len = line.size() / static_cast<std::size_t>(channels);
  for (std::size_t i = 0; i < len; ++i)
    for (int ch = 0; ch < channels; ++ch) out[i * channels + ch] = line[(len - 1 - i) * channels + ch];
  return out;
}

std::vector<double> to_lab(const std::vector<double>& line, int channels) {
  const std::size_t len = line.size() / static_cast<std::size_t>(channels);
  std::vector<double> out(len * 3);
  for (std::size_t i = 0; i < len; ++i) {
    const double* px = &line[i * channels];
    const auto lab = channels == 3 ? srgb_to_lab(px[0], px[1], px[2]) : srgb_to_lab(px[0], px[0], px[0]);
    std::copy(lab.begin(), lab.end(), &out[i * 3]);
  }
  return out;
}

/// Everything a measure needs from one edge of one piece.
struct EdgeProfile {
  int length = 0;
  int channels = 0;
  std::vector<double> last;         // seam-side line, "as right" order
  std::vector<double> penultimate;  // next line inward
  std::vector<double> lab_last;
  Eigen::VectorXd grad_mean;
  Eigen::MatrixXd grad_inv_cov;
};

constexpr double kMgcRegularizer = 1e-6;

void fill_gradient_stats(EdgeProfile& prof) {
  const int c = prof.channels;
  // Dummy gradients 0 and +-e_k keep the covariance invertible on flat edges.
  const int samples = prof.length + 1 + 2 * c;
  Eigen::MatrixXd g(samples, c);
  g.setZero();
  for (int p = 0; p < prof.length; ++p)
    for (int ch = 0; ch < c; ++ch) {
      const std::size_t k = static_cast<std::size_t>(p) * c + ch;
      g(p, ch) = prof.last[k] - prof.penultimate[k];
    }
  for (int ch = 0; ch < c; ++ch) {
    g(prof.length + 1 + 2 * ch, ch) = 1.0;
    g(prof.length + 2 + 2 * ch, ch) = -1.0;
  }
  prof.grad_mean = g.colwise().mean().transpose();
  const Eigen::MatrixXd centered = g.rowwise() - prof.grad_mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(samples - 1);
  cov += kMgcRegularizer * Eigen::MatrixXd::Identity(c, c);
  prof.grad_inv_cov = cov.ldlt().solve(Eigen::MatrixXd::Identity(c, c));
}

EdgeProfile make_profile(const Piece& p, Edge e, int skip, bool need_lab, bool need_stats) {
  EdgeProfile prof;
  prof.channels = p.channels();
  prof.last = edge_line(p, e, skip);
  prof.penultimate = edge_line(p, e, skip + 1);
  prof.length = static_cast<int>(prof.last.size()) / prof.channels;
  if (need_lab) prof.lab_last = to_lab(prof.last, prof.channels);
  if (need_stats) fill_gradient_stats(prof);
  return prof;
}

void check_skip(const Piece& p, int skip) {
  const int side = std::min(p.height(), p.width());
  if (skip < 0 || (skip > 0 && skip >= side / 2 - 1)) {
    throw DataError("skip_eroded " + std::to_string(skip) + " too large for piece size " + std::to_string(side));
  }
}

double mahalanobis_sum(const EdgeProfile& from, const EdgeProfile& to) {
  // Cross-seam gradients measured outward from `from`, scored against from's
  // own boundary gradient distribution. Both lines are in "as right" order,
  // so position pf on one side meets len-1-pf on the other.
  const int c = from.channels;
  const int len = from.length;
  Eigen::VectorXd d(c);
  double total = 0.0;
  for (int pf = 0; pf < len; ++pf) {
    const int pt = len - 1 - pf;
    for (int ch = 0; ch < c; ++ch) {
      d(ch) = to.last[static_cast<std::size_t>(pt) * c + ch] - from.last[static_cast<std::size_t>(pf) * c + ch];
    }
    d -= from.grad_mean;
    total += std::sqrt(std::max(0.0, d.dot(from.grad_inv_cov * d)));
  }
  return total;
}

double pair_dissimilarity(MeasureKind kind, const EdgeProfile& a, const EdgeProfile& b) {
  if (a.length != b.length || a.channels != b.channels) throw DataError("edge lengths differ");
  const int c = a.channels;
  const int len = a.length;
  auto bidx = [&](int p, int ch) { return static_cast<std::size_t>(len - 1 - p) * c + ch; };
  auto aidx = [&](int p, int ch) { return static_cast<std::size_t>(p) * c + ch; };
  switch (kind) {
    case MeasureKind::SsdRgb: {
      std::int64_t sum = 0;
      for (int p = 0; p < len; ++p)
        for (int ch = 0; ch < c; ++ch) {
          const auto diff = static_cast<std::int64_t>(a.last[aidx(p, ch)]) - static_cast<std::int64_t>(b.last[bidx(p, ch)]);
          sum += diff * diff;
        }
      return static_cast<double>(sum);
    }
    case MeasureKind::SsdLab: {
      double sum = 0.0;
      for (int p = 0; p < len; ++p)
        for (int ch = 0; ch < 3; ++ch) {
          const double diff = a.lab_last[static_cast<std::size_t>(p) * 3 + ch] -
                              b.lab_last[static_cast<std::size_t>(len - 1 - p) * 3 + ch];
          sum += diff * diff;
        }
      return sum;
    }
    case MeasureKind::Mgc:
      return mahalanobis_sum(a, b) + mahalanobis_sum(b, a);
    case MeasureKind::L1Asym:
    case MeasureKind::Prediction: {
      const bool squared = kind == MeasureKind::Prediction;
      double sum = 0.0;
      for (int p = 0; p < len; ++p)
        for (int ch = 0; ch < c; ++ch) {
          const double al = a.last[aidx(p, ch)], ap = a.penultimate[aidx(p, ch)];
          const double bf = b.last[bidx(p, ch)], bs = b.penultimate[bidx(p, ch)];
          const double fwd = bf - (2.0 * al - ap);
          const double bwd = al - (2.0 * bf - bs);
          sum += squared ? fwd * fwd + bwd * bwd : std::abs(fwd) + std::abs(bwd);
        }
      return sum;
    }
    case MeasureKind::Oracle:
    case MeasureKind::External:
      break;
  }
  throw DataError(std::string("measure ") + measure_name(kind) + " has no pairwise formula");
}

void check_pair(const Piece& a, const Piece& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.channels() != b.channels()) {
    throw DataError("pieces " + std::to_string(a.id()) + " and " + std::to_string(b.id()) + " differ in shape");
  }
}

}  // namespace

BoundaryColumns boundary_columns(const Piece& a, const Piece& b, Relation rel, int skip_eroded) {
  check_pair(a, b);
  check_skip(a, skip_eroded);
  BoundaryColumns cols;
  cols.channels = a.channels();
  cols.anchor_last = edge_line(a, rel.anchor_edge, skip_eroded);
  cols.anchor_penultimate = edge_line(a, rel.anchor_edge, skip_eroded + 1);
  cols.candidate_first = reversed_pixels(edge_line(b, rel.candidate_edge, skip_eroded), cols.channels);
  cols.candidate_second = reversed_pixels(edge_line(b, rel.candidate_edge, skip_eroded + 1), cols.channels);
  if (cols.anchor_last.size() != cols.candidate_first.size()) throw DataError("edge lengths differ");
  cols.length = static_cast<int>(cols.anchor_last.size()) / cols.channels;
  return cols;
}

double dissimilarity(MeasureKind kind, const Piece& a, const Piece& b, Relation rel, int skip_eroded) {
  check_pair(a, b);
  check_skip(a, skip_eroded);
  const bool lab = kind == MeasureKind::SsdLab;
  const bool stats = kind == MeasureKind::Mgc;
  const EdgeProfile pa = make_profile(a, rel.anchor_edge, skip_eroded, lab, stats);
  const EdgeProfile pb = make_profile(b, rel.candidate_edge, skip_eroded, lab, stats);
  return pair_dissimilarity(kind, pa, pb);
}

CompatibilityTensor oracle_tensor(const PuzzleBundle& bundle) {
  if (!bundle.ground_truth) throw DataError("oracle scores need ground truth");
  const GroundTruth& gt = *bundle.ground_truth;
  gt.validate(bundle.type);
  if (gt.placements.size() != bundle.size()) throw DataError("ground truth size mismatch");
  CompatibilityTensor t(bundle.size(), bundle.type, 0.0f);
  for (const Adjacency& adj : adjacent_pairs(Arrangement::from_ground_truth(gt))) {
    t.at(adj.a, relation_index(bundle.type, {adj.ea, adj.eb}), adj.b) = 1.0f;
    t.at(adj.b, relation_index(bundle.type, {adj.eb, adj.ea}), adj.a) = 1.0f;
  }
  t.normalized = true;
  t.symmetric = true;
  return t;
}

CompatibilityTensor full_tensor(MeasureKind kind, const PuzzleBundle& bundle, int skip_eroded, int workers) {
  if (kind == MeasureKind::Oracle) return oracle_tensor(bundle);
  if (kind == MeasureKind::External) throw DataError("external scores are read from CMX files, not computed");
  bundle.validate();
  check_skip(bundle.pieces.front(), skip_eroded);

  const std::size_t n = bundle.size();
  const bool lab = kind == MeasureKind::SsdLab;
  const bool stats = kind == MeasureKind::Mgc;
  std::vector<EdgeProfile> profiles(n * 4);
  parallel_for(n, workers, [&](std::size_t i) {
    for (Edge e : kEdges) profiles[i * 4 + index(e)] = make_profile(bundle.pieces[i], e, skip_eroded, lab, stats);
  });

  CompatibilityTensor t(n, bundle.type);
  const int rels = t.relations();
  parallel_for(n, workers, [&](std::size_t a) {
    for (int r = 0; r < rels; ++r) {
      const Relation rel = relation_at(bundle.type, r);
      const EdgeProfile& pa = profiles[a * 4 + index(rel.anchor_edge)];
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const EdgeProfile& pb = profiles[b * 4 + index(rel.candidate_edge)];
        if (pa.length != pb.length) {
          // Type-1 strips: top/bottom lines never meet left/right ones, so this never fires there.
          throw DataError("edge lengths differ");
        }
        t.at(a, r, b) = static_cast<float>(-pair_dissimilarity(kind, pa, pb));
      }
    }
  });
  t.reset_diagonal();
  return t;
}

double strip_pair_score(std::span<const double> chunk_scores) {
  if (chunk_scores.empty()) throw DataError("no chunks");
  return std::accumulate(chunk_scores.begin(), chunk_scores.end(), 0.0);
}

}  // namespace pf
