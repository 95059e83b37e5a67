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

#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace xferbound::gp {

// One observation (omega in rad/s, objective value).
struct Sample {
  double omega = 0.0;
  double value = 0.0;
};

// Squared-exponential kernel on x = log10(omega). The length scale is in
// decades of frequency.
struct SeKernel {
  double signal_variance = 1.0;
  double length_scale = 1.0;

  double operator()(double x1, double x2) const {
    const double r = (x1 - x2) / length_scale;
    return signal_variance * std::exp(-0.5 * r * r);
  }
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
  double sigma() const { return std::sqrt(variance); }
};

// Exact GP regression model with constant prior mean.
//
// Immutable: the Gram matrix K + noise I is factored once at construction.
// If the Cholesky factorization fails, diagonal jitter is added starting at
// 1e-10 and multiplied by ten up to 1e-4; beyond that the constructor throws
// std::runtime_error.
class GpModel {
 public:
  GpModel(std::vector<Sample> dataset, double prior_mean, SeKernel kernel, double noise_variance);

  const std::vector<Sample>& dataset() const { return dataset_; }
  double prior_mean() const { return prior_mean_; }
  const SeKernel& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  // Jitter that was needed on the Gram diagonal (0 if none).
  double jitter() const { return jitter_; }
  // Set by fit_hyperparameters when the data carried no information.
  bool degenerate() const { return degenerate_; }

  Posterior posterior(double omega) const;
  double log_marginal_likelihood() const;

  GpModel with_sample(Sample s) const;
  GpModel with_prior_mean(double mean) const;
  GpModel with_kernel(SeKernel kernel) const;
  GpModel flagged_degenerate() const;

  friend nlohmann::json to_json_value(const GpModel& m);

 private:
  std::vector<Sample> dataset_;
  double prior_mean_;
  SeKernel kernel_;
  double noise_variance_;
  double jitter_ = 0.0;
  bool degenerate_ = false;

  Eigen::VectorXd inputs_;  // log10(omega)
  Eigen::MatrixXd chol_;    // lower-triangular factor
  Eigen::VectorXd alpha_;   // (K + noise I)^-1 (f - mu)
  double log_det_ = 0.0;
};

// Free-function form of GpModel::posterior. Throws std::invalid_argument for
// an empty dataset or non-finite/non-positive omega.
Posterior posterior(const GpModel& m, double omega);

double dataset_mean(std::span<const Sample> data);
double dataset_max(std::span<const Sample> data);

// Search box for fit_hyperparameters, in absolute length-scale units and
// relative to the sample variance of the data for signal variance.
struct FitBounds {
  double length_scale_min = 0.02;
  double length_scale_max = 10.0;
  double signal_ratio_min = 1e-2;
  double signal_ratio_max = 1e3;
  int grid_points = 10;
  int refine_iterations = 80;
};

// Maximizes the log marginal likelihood over (signal_variance, length_scale)
// with a log-spaced multi-start grid and Nelder-Mead refinement; noise and
// prior mean stay fixed. Requires at least three samples. When every value
// is identical the data carries no length-scale information: the returned
// model keeps its signal variance, takes the upper length-scale bound and is
// flagged degenerate.
GpModel fit_hyperparameters(const GpModel& m, const FitBounds& bounds = {});

nlohmann::json to_json_value(const GpModel& m);
GpModel gp_model_from_json(const nlohmann::json& j);

}  // namespace xferbound::gp
