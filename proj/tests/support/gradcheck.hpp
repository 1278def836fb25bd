#pragma once

// Central-difference gradient check for the regression network. The loss
// is piecewise linear in each parameter, so a difference quotient is exact
// up to rounding unless the step moves some ReLU input or loss residual
// across zero. Such parameters are detected by comparing activation sign
// patterns at p - h, p and p + h, and are counted instead of compared.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "solartrack/regnet.hpp"
#include "support/oracles.hpp"

namespace oracle {

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
};

inline std::vector<std::uint8_t> sign_pattern(const solartrack::regnet::RegNetParams& p,
                                              const solartrack::regnet::Crop& a, const solartrack::regnet::Crop& b,
                                              const solartrack::regnet::Output& target) {
  const auto cache = solartrack::regnet::forward_cached(p, a, b);
  std::vector<std::uint8_t> s;
  for (const auto* acts : {&cache.branch_a, &cache.branch_b}) {
    for (std::size_t l = 1; l < acts->size(); ++l)
      for (double v : (*acts)[l]) s.push_back(v > 0.0);
  }
  for (std::size_t j = 1; j + 1 < cache.fc.size(); ++j)
    for (double v : cache.fc[j]) s.push_back(v > 0.0);
  const auto out = cache.output();
  for (std::size_t i = 0; i < out.size(); ++i) s.push_back(out[i] > target[i]);
  return s;
}

/// Random crops, target half a unit away from the initial output on every
/// coordinate, He-initialized weights from `seed`. The relative-error floor
/// sits above the rounding noise of the difference quotient (about
/// eps * loss / h, near 1e-10 here), so near-zero gradients are compared
/// absolutely instead of amplifying that noise.
inline GradCheck gradient_check(const solartrack::regnet::RegNetConfig& cfg, std::uint64_t seed, double h = 1e-5,
                                double floor = 1e-5) {
  using namespace solartrack;
  using namespace solartrack::regnet;
  Rng rng(seed ^ 0x5bd1e995ULL);
  RegNetParams params = RegNetParams::initialized(cfg, seed);
  // non-zero biases so no unit sits exactly at a kink by construction
  for (auto& v : params.values()) v += 0.01 * rng.normal();
  const std::size_t n = static_cast<std::size_t>(cfg.crop_size) * cfg.crop_size;
  Crop a(n), b(n);
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform();
  Output target = forward(params, a, b);
  for (auto& t : target) t += rng.uniform() < 0.5 ? -0.5 : 0.5;

  const Gradient g = backward(params, a, b, target);
  const auto base = sign_pattern(params, a, b, target);
  GradCheck out;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double p0 = params.values()[i];
    params.values()[i] = p0 + h;
    const double lp = loss(forward(params, a, b), target);
    const bool same_p = sign_pattern(params, a, b, target) == base;
    params.values()[i] = p0 - h;
    const double lm = loss(forward(params, a, b), target);
    const bool same_m = sign_pattern(params, a, b, target) == base;
    params.values()[i] = p0;
    if (!same_p || !same_m) {
      ++out.skipped;
      continue;
    }
    const double fd = (lp - lm) / (2 * h);
    out.max_rel_error = std::max(out.max_rel_error, relative_error(g.values[i], fd, floor));
    ++out.checked;
  }
  return out;
}

/// The two architectures used for gradient checks.
inline std::vector<solartrack::regnet::RegNetConfig> gradcheck_configs() {
  solartrack::regnet::RegNetConfig a;
  a.crop_size = 16;
  a.conv = {{2, 3, 2}, {3, 3, 2}};
  a.fc_widths = {6};
  a.share_branch_weights = true;
  solartrack::regnet::RegNetConfig b;
  b.crop_size = 16;
  b.conv = {{2, 5, 2}, {2, 3, 1}};
  b.fc_widths = {5, 4};
  b.share_branch_weights = false;
  return {a, b};
}

}  // namespace oracle
