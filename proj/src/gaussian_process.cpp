// Copyright 2026 The xferbound Authors
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

#include "xferbound/gaussian_process.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace xferbound::gp {

namespace {

constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;
// Pivots below this fraction of the prior variance are treated as a failed
// factorization.
constexpr double kPivotFloor = 1e-15;

}  // namespace

GpModel::GpModel(std::vector<Sample> dataset, double prior_mean, SeKernel kernel, double noise_variance)
    : dataset_(std::move(dataset)),
      prior_mean_(prior_mean),
      kernel_(kernel),
      noise_variance_(noise_variance) {
  if (!(kernel_.signal_variance > 0.0) || !(kernel_.length_scale > 0.0) ||
      !std::isfinite(kernel_.signal_variance) || !std::isfinite(kernel_.length_scale)) {
    throw std::invalid_argument("GpModel: kernel hyperparameters must be positive and finite");
  }
  if (!(noise_variance_ >= 0.0) || !std::isfinite(noise_variance_)) {
    throw std::invalid_argument("GpModel: noise variance must be non-negative");
  }
  if (!std::isfinite(prior_mean_)) throw std::invalid_argument("GpModel: non-finite prior mean");

  const auto n = static_cast<Eigen::Index>(dataset_.size());
  inputs_.resize(n);
  Eigen::VectorXd resid(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = dataset_[static_cast<size_t>(i)];
    if (!(s.omega > 0.0) || !std::isfinite(s.omega) || !std::isfinite(s.value)) {
      throw std::invalid_argument(fmt::format("GpModel: invalid sample ({}, {})", s.omega, s.value));
    }
    inputs_(i) = std::log10(s.omega);
    resid(i) = s.value - prior_mean_;
  }
  if (noise_variance_ == 0.0) {
    std::vector<double> sorted(inputs_.data(), inputs_.data() + n);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("GpModel: duplicate frequencies require a positive noise variance");
    }
  }
  if (n == 0) return;

  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      gram(i, j) = gram(j, i) = kernel_(inputs_(i), inputs_(j));
    }
    gram(i, i) += noise_variance_;
  }
  const double floor = kPivotFloor * (kernel_.signal_variance + noise_variance_);
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const Eigen::MatrixXd l = llt.matrixL();
      ok = (l.diagonal().array().square() > floor).all();
      if (ok) {
        chol_ = l;
        jitter_ = jitter;
        break;
      }
    }
    jitter = jitter == 0.0 ? kJitterStart : jitter * 10.0;
    if (jitter > kJitterMax * (1.0 + 1e-9)) {
      throw std::runtime_error(fmt::format(
          "GpModel: Gram matrix not positive definite after jitter {} "
          "(n = {}, signal_variance = {}, length_scale = {}, noise_variance = {})",
          kJitterMax, n, kernel_.signal_variance, kernel_.length_scale, noise_variance_));
    }
  }
  const Eigen::VectorXd half = chol_.triangularView<Eigen::Lower>().solve(resid);
  alpha_ = chol_.transpose().triangularView<Eigen::Upper>().solve(half);
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

Posterior GpModel::posterior(double omega) const {
  if (dataset_.empty()) throw std::invalid_argument("posterior: empty dataset");
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument(fmt::format("posterior: invalid query frequency {}", omega));
  }
  const double x = std::log10(omega);
  const auto n = inputs_.size();
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) k(i) = kernel_(x, inputs_(i));
  Posterior p;
  p.mean = prior_mean_ + k.dot(alpha_);
  const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
  p.variance = std::max(0.0, kernel_.signal_variance - v.squaredNorm());
  return p;
}

double GpModel::log_marginal_likelihood() const {
  const auto n = static_cast<double>(dataset_.size());
  Eigen::VectorXd resid(inputs_.size());
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    resid(i) = dataset_[static_cast<size_t>(i)].value - prior_mean_;
  }
  return -0.5 * resid.dot(alpha_) - 0.5 * log_det_ - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GpModel GpModel::with_sample(Sample s) const {
  std::vector<Sample> data = dataset_;
  data.push_back(s);
  return GpModel(std::move(data), prior_mean_, kernel_, noise_variance_);
}

GpModel GpModel::with_prior_mean(double mean) const {
  GpModel out(dataset_, mean, kernel_, noise_variance_);
  out.degenerate_ = degenerate_;
  return out;
}

GpModel GpModel::with_kernel(SeKernel kernel) const {
  return GpModel(dataset_, prior_mean_, kernel, noise_variance_);
}

GpModel GpModel::flagged_degenerate() const {
  GpModel out = *this;
  out.degenerate_ = true;
  return out;
}

Posterior posterior(const GpModel& m, double omega) { return m.posterior(omega); }

double dataset_mean(std::span<const Sample> data) {
  if (data.empty()) return 0.0;
  double acc = 0.0;
  for (const Sample& s : data) acc += s.value;
  return acc / static_cast<double>(data.size());
}

double dataset_max(std::span<const Sample> data) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Sample& s : data) best = std::max(best, s.value);
  return best;
}

namespace {

using Point = std::array<double, 2>;  // (ln signal_variance, ln length_scale)

struct Box {
  Point lo;
  Point hi;
  Point clamp(Point p) const {
    for (size_t i = 0; i < 2; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
    return p;
  }
};

// Negative log marginal likelihood; +inf when the factorization fails.
double objective(const GpModel& base, const Point& p) {
  try {
    const SeKernel k{std::exp(p[0]), std::exp(p[1])};
    return -base.with_kernel(k).log_marginal_likelihood();
  } catch (const std::runtime_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// Box-clamped Nelder-Mead on two parameters.
std::pair<Point, double> nelder_mead(const GpModel& base, const Box& box, Point start, int iterations) {
  const Point step{0.1 * (box.hi[0] - box.lo[0]), 0.1 * (box.hi[1] - box.lo[1])};
  std::array<Point, 3> simplex{start, box.clamp({start[0] + step[0], start[1]}),
                               box.clamp({start[0], start[1] + step[1]})};
  std::array<double, 3> value{};
  for (size_t i = 0; i < 3; ++i) value[i] = objective(base, simplex[i]);

  for (int it = 0; it < iterations; ++it) {
    std::array<size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return value[a] < value[b]; });
    const size_t best = order[0], mid = order[1], worst = order[2];
    if (std::abs(value[worst] - value[best]) < 1e-10 * (1.0 + std::abs(value[best]))) break;

    const Point centroid{0.5 * (simplex[best][0] + simplex[mid][0]),
                         0.5 * (simplex[best][1] + simplex[mid][1])};
    auto along = [&](double t) {
      return box.clamp({centroid[0] + t * (simplex[worst][0] - centroid[0]),
                        centroid[1] + t * (simplex[worst][1] - centroid[1])});
    };
    const Point reflected = along(-1.0);
    const double fr = objective(base, reflected);
    if (fr < value[best]) {
      const Point expanded = along(-2.0);
      const double fe = objective(base, expanded);
      if (fe < fr) {
        simplex[worst] = expanded;
        value[worst] = fe;
      } else {
        simplex[worst] = reflected;
        value[worst] = fr;
      }
    } else if (fr < value[mid]) {
      simplex[worst] = reflected;
      value[worst] = fr;
    } else {
      const Point contracted = along(0.5);
      const double fc = objective(base, contracted);
      if (fc < value[worst]) {
        simplex[worst] = contracted;
        value[worst] = fc;
      } else {
        for (size_t i : {mid, worst}) {
          simplex[i] = box.clamp({0.5 * (simplex[i][0] + simplex[best][0]),
                                  0.5 * (simplex[i][1] + simplex[best][1])});
          value[i] = objective(base, simplex[i]);
        }
      }
    }
  }
  size_t best = 0;
  for (size_t i = 1; i < 3; ++i) {
    if (value[i] < value[best]) best = i;
  }
  return {simplex[best], value[best]};
}

}  // namespace

GpModel fit_hyperparameters(const GpModel& m, const FitBounds& bounds) {
  const auto& data = m.dataset();
  if (data.size() < 3) {
    throw std::invalid_argument("fit_hyperparameters: need at least three samples");
  }
  double lo = data.front().value, hi = data.front().value, scale = 0.0;
  for (const Sample& s : data) {
    lo = std::min(lo, s.value);
    hi = std::max(hi, s.value);
    scale = std::max(scale, std::abs(s.value));
  }
  if (hi - lo <= 1e-12 * std::max(1.0, scale)) {
    SeKernel k = m.kernel();
    k.length_scale = bounds.length_scale_max;
    return m.with_kernel(k).flagged_degenerate();
  }

  const double mean = dataset_mean(data);
  double var = 0.0;
  for (const Sample& s : data) var += (s.value - mean) * (s.value - mean);
  var /= static_cast<double>(data.size());

  const Box box{{std::log(var * bounds.signal_ratio_min), std::log(bounds.length_scale_min)},
                {std::log(var * bounds.signal_ratio_max), std::log(bounds.length_scale_max)}};

  // Coarse grid, keeping the two best starts.
  const int g = std::max(2, bounds.grid_points);
  std::vector<std::pair<double, Point>> starts;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      const Point p{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (g - 1),
                    box.lo[1] + (box.hi[1] - box.lo[1]) * j / (g - 1)};
      starts.emplace_back(objective(m, p), p);
    }
  }
  std::stable_sort(starts.begin(), starts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  Point best = starts.front().second;
  double best_value = starts.front().first;
  for (size_t s = 0; s < std::min<size_t>(2, starts.size()); ++s) {
    if (!std::isfinite(starts[s].first)) continue;
    const auto [p, v] = nelder_mead(m, box, starts[s].second, bounds.refine_iterations);
    if (v < best_value) {
      best = p;
      best_value = v;
    }
  }
  if (!std::isfinite(best_value)) {
    throw std::runtime_error("fit_hyperparameters: no hyperparameters gave a factorizable Gram matrix");
  }
  return m.with_kernel({std::exp(best[0]), std::exp(best[1])});
}

nlohmann::json to_json_value(const GpModel& m) {
  nlohmann::json data = nlohmann::json::array();
  for (const Sample& s : m.dataset()) data.push_back({s.omega, s.value});
  return {{"dataset", data},
          {"prior_mean", m.prior_mean()},
          {"signal_variance", m.kernel().signal_variance},
          {"length_scale", m.kernel().length_scale},
          {"noise_variance", m.noise_variance()},
          {"jitter", m.jitter()},
          {"degenerate", m.degenerate()}};
}

GpModel gp_model_from_json(const nlohmann::json& j) {
  std::vector<Sample> data;
  for (const auto& row : j.at("dataset")) data.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
  GpModel m(std::move(data), j.at("prior_mean").get<double>(),
            {j.at("signal_variance").get<double>(), j.at("length_scale").get<double>()},
            j.at("noise_variance").get<double>());
  return j.value("degenerate", false) ? m.flagged_degenerate() : m;
}

}  // namespace xferbound::gp
