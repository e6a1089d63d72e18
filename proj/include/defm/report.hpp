#pragma once

#include <string>
#include <vector>

#include "defm/fit.hpp"

namespace defm {

struct ReportRow {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double p = 1.0;
  std::string stars;
};

struct ReportTable {
  std::vector<ReportRow> rows;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_transitions = 0;
  bool converged = false;
  bool singular_hessian = false;
  int iterations = 0;
  double gradient_norm = 0.0;
};

/// Significance stars at 0.05 / 0.01 / 0.001, strict inequalities.
std::string significance_stars(double p);

/// Two-sided normal p-value for z = estimate / std.error.
double two_sided_p(double z);

ReportTable summarize(const FitResult& fit);

std::string render_text(const ReportTable& table);
std::string render_csv(const ReportTable& table);
std::string render_json(const ReportTable& table);

/// Machine-readable fit artifact (stable key order); bit-reproducible for
/// identical fits.
std::string fit_artifact_json(const FitResult& fit);

}  // namespace defm
