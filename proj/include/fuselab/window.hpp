#pragma once

#include <set>
#include <unordered_map>
#include <vector>

#include "fuselab/errors.hpp"
#include "fuselab/label.hpp"
#include "fuselab/module.hpp"

namespace fuselab {

/// A finite truncation domain: the ball of the given radius around the
/// module seed under the symmetrized test support. Windows of increasing
/// radius nest as prefixes, so a smaller window's matrix is a leading
/// principal submatrix of a larger one's.
struct ActionWindow {
  std::vector<Label> labels;
  std::vector<std::size_t> layer_offsets;  // layer_offsets[r] = labels within radius r
  int radius = 0;
  std::vector<Label> test_support;  // symmetrized algebra labels used to enumerate
  std::vector<char> interior;       // one-step action support stays inside the window
  std::unordered_map<Label, std::size_t, LabelHash> pos;

  std::size_t size() const { return labels.size(); }
  bool contains(Label l) const { return pos.count(l) != 0; }

  /// Number of labels within the given (smaller) radius; prefix lengths for
  /// nested-window norm sweeps.
  std::size_t prefix_size(int r) const {
    if (r < 0 || static_cast<std::size_t>(r) >= layer_offsets.size())
      raise(Errc::usage_error, "radius " + std::to_string(r) + " outside enumerated window");
    return layer_offsets[static_cast<std::size_t>(r)];
  }
};

/// Breadth-first ball from the seed under action by the given algebra
/// labels and their conjugates. Deterministic: generation order, ties by
/// label order.
inline ActionWindow enumerate_ball(const FusionModule& M, const std::vector<Label>& test_support,
                                   int radius, std::size_t cap = max_ball_cap()) {
  if (radius < 0) raise(Errc::usage_error, "radius must be nonnegative");
  std::set<Label> sym;
  for (Label u : test_support) {
    sym.insert(u);
    sym.insert(M.algebra().conjugate_label(u));
  }
  ActionWindow w;
  w.radius = radius;
  w.test_support.assign(sym.begin(), sym.end());
  BallLayers ball = module_ball(M, w.test_support, radius, cap);
  w.labels = std::move(ball.labels);
  w.layer_offsets = std::move(ball.layer_offsets);
  w.pos.reserve(w.labels.size());
  for (std::size_t i = 0; i < w.labels.size(); ++i) w.pos.emplace(w.labels[i], i);
  w.interior.assign(w.labels.size(), 1);
  for (std::size_t i = 0; i < w.labels.size(); ++i)
    for (Label u : w.test_support)
      for (const auto& [l, n] : M.action(u, w.labels[i]))
        if (!w.contains(l)) {
          w.interior[i] = 0;
          break;
        }
  return w;
}

}  // namespace fuselab
