#pragma once

// Quantized toy used as an exact oracle: d = 1, L = 3, D = 1 (T = 6), S = 2,
// slab with 5 levels on [-2, 2], 8 fixed data points. Every state is
// enumerated; the network is evaluated by hand-written code that does not
// touch the library's forward pass.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "sparsepac/network.hpp"
#include "sparsepac/prior.hpp"
#include "sparsepac/risk.hpp"

namespace toy {

inline constexpr std::size_t kT = 6;
inline constexpr std::size_t kS = 2;
inline constexpr std::size_t kLevels = 5;
inline constexpr double kCb = 2.0;

inline sparsepac::Architecture arch() { return sparsepac::Architecture(1, 3, 1, kS, kCb); }
inline sparsepac::Slab slab() { return sparsepac::Slab::quantized(kLevels); }

inline double level(std::size_t j) { return -kCb + 2.0 * kCb * static_cast<double>(j) / (kLevels - 1); }

// Layout for (d, L, D) = (1, 3, 1): a1, b1, a2, b2, a3, b3.
inline double relu(double u) { return u > 0.0 ? u : 0.0; }
inline double net(const std::array<double, kT>& w, double x) {
  const double h1 = relu(w[0] * x + w[1]);
  const double h2 = relu(w[2] * h1 + w[3]);
  return w[4] * h2 + w[5];
}

inline sparsepac::Dataset data() {
  std::vector<double> xs;
  std::vector<int> ys;
  const std::array<int, 8> labels{-1, -1, 1, -1, 1, 1, -1, 1};
  for (std::size_t i = 0; i < 8; ++i) {
    xs.push_back(-1.0 + 2.0 * static_cast<double>(i) / 7.0);
    ys.push_back(labels[i]);
  }
  return sparsepac::Dataset(1, xs, ys);
}

inline double hinge(const std::array<double, kT>& w, const sparsepac::Dataset& d) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) s += std::max(0.0, 1.0 - d.label(i) * net(w, d.row(i)[0]));
  return s / static_cast<double>(d.size());
}

// State key: (t1, t2, j1, j2) with t1 < t2 active and j the level indices.
using Key = std::array<std::size_t, 4>;

struct State {
  Key key;
  std::array<double, kT> w{};
  double hinge = 0.0;
};

inline std::vector<State> enumerate(const sparsepac::Dataset& d) {
  std::vector<State> out;
  for (std::size_t t1 = 0; t1 < kT; ++t1) {
    for (std::size_t t2 = t1 + 1; t2 < kT; ++t2) {
      for (std::size_t j1 = 0; j1 < kLevels; ++j1) {
        for (std::size_t j2 = 0; j2 < kLevels; ++j2) {
          State s;
          s.key = {t1, t2, j1, j2};
          s.w[t1] = level(j1);
          s.w[t2] = level(j2);
          s.hinge = hinge(s.w, d);
          out.push_back(s);
        }
      }
    }
  }
  return out;
}

// log sum_states prior(state) exp(-lambda r), prior uniform over 15 * 25 states.
inline double exact_log_z(const std::vector<State>& states, double lambda) {
  double top = -INFINITY;
  for (const State& s : states) top = std::max(top, -lambda * s.hinge);
  double acc = 0.0;
  for (const State& s : states) acc += std::exp(-lambda * s.hinge - top);
  return top + std::log(acc) - std::log(static_cast<double>(states.size()));
}

inline std::map<Key, double> gibbs(const std::vector<State>& states, double lambda) {
  const double log_z = exact_log_z(states, lambda) + std::log(static_cast<double>(states.size()));
  std::map<Key, double> p;
  for (const State& s : states) p[s.key] = std::exp(-lambda * s.hinge - log_z);
  return p;
}

inline Key key_of(const sparsepac::SparseParams& p) {
  const auto act = p.active();
  const auto lv = slab();
  return {act[0], act[1], lv.level_index(p.value(act[0]), kCb), lv.level_index(p.value(act[1]), kCb)};
}

inline sparsepac::SparseParams params_of(const Key& k) {
  const std::array<std::pair<std::size_t, double>, 2> entries{
      std::pair{k[0], level(k[2])}, std::pair{k[1], level(k[3])}};
  return sparsepac::SparseParams::from_active(arch(), entries);
}

}  // namespace toy
