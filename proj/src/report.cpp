#include "defm/report.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "defm/csv.hpp"

namespace defm {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

double two_sided_p(double z) {
  boost::math::normal dist;
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(z)));
}

ReportTable summarize(const FitResult& fit) {
  ReportTable table;
  for (std::size_t j = 0; j < fit.dim(); ++j) {
    ReportRow row;
    row.name = fit.term_names[j];
    row.estimate = fit.theta[j];
    row.std_error = fit.std_errors[j];
    if (row.std_error > 0.0) {
      row.z = row.estimate / row.std_error;
      row.p = two_sided_p(row.z);
    } else {
      row.z = 0.0;
      row.p = 1.0;
    }
    row.stars = significance_stars(row.p);
    table.rows.push_back(std::move(row));
  }
  table.loglik = fit.loglik;
  table.aic = fit.aic;
  table.bic = fit.bic;
  table.n_obs = fit.n_obs;
  table.n_transitions = fit.n_transitions;
  table.converged = fit.converged;
  table.singular_hessian = fit.singular_hessian;
  table.iterations = fit.iterations;
  table.gradient_norm = fit.gradient_norm;
  return table;
}

std::string render_text(const ReportTable& table) {
  std::size_t name_w = 4;
  for (const auto& row : table.rows) name_w = std::max(name_w, row.name.size());

  std::ostringstream os;
  auto pad = [&os](const std::string& s, std::size_t w, bool left) {
    if (left) os << s << std::string(w > s.size() ? w - s.size() : 0, ' ');
    else os << std::string(w > s.size() ? w - s.size() : 0, ' ') << s;
  };
  pad("term", name_w, true);
  os << "  ";
  pad("estimate", 10, false);
  pad("std.error", 11, false);
  pad("z", 9, false);
  pad("p", 10, false);
  os << '\n';
  for (const auto& row : table.rows) {
    pad(row.name, name_w, true);
    os << "  ";
    pad(fixed(row.estimate, 4), 10, false);
    pad(fixed(row.std_error, 4), 11, false);
    pad(fixed(row.z, 3), 9, false);
    pad(sci(row.p), 10, false);
    if (!row.stars.empty()) os << ' ' << row.stars;
    os << '\n';
  }
  os << "---\n";
  os << "signif. codes: *** p<0.001, ** p<0.01, * p<0.05\n";
  os << "loglik    " << fixed(table.loglik, 4) << '\n';
  os << "AIC       " << fixed(table.aic, 4) << '\n';
  os << "BIC       " << fixed(table.bic, 4) << '\n';
  os << "N         " << table.n_obs << '\n';
  os << "N events  " << table.n_transitions << '\n';
  os << "converged " << (table.converged ? "yes" : "NO") << " ("
     << table.iterations << " iterations, max|grad| "
     << sci(table.gradient_norm) << ")\n";
  if (table.singular_hessian)
    os << "warning: singular Hessian; standard errors use a pseudo-inverse\n";
  return os.str();
}

std::string render_csv(const ReportTable& table) {
  std::ostringstream os;
  os << "term,estimate,std_error,z,p,stars\n";
  for (const auto& row : table.rows)
    os << row.name << ',' << format_double(row.estimate) << ','
       << format_double(row.std_error) << ',' << format_double(row.z) << ','
       << format_double(row.p) << ',' << row.stars << '\n';
  return os.str();
}

std::string render_json(const ReportTable& table) {
  nlohmann::json j;
  j["terms"] = nlohmann::json::array();
  for (const auto& row : table.rows)
    j["terms"].push_back({{"name", row.name},
                          {"estimate", row.estimate},
                          {"std_error", row.std_error},
                          {"z", row.z},
                          {"p", row.p},
                          {"stars", row.stars}});
  j["loglik"] = table.loglik;
  j["aic"] = table.aic;
  j["bic"] = table.bic;
  j["n"] = table.n_obs;
  j["n_events"] = table.n_transitions;
  j["converged"] = table.converged;
  return j.dump(2) + "\n";
}

std::string fit_artifact_json(const FitResult& fit) {
  nlohmann::json j;
  j["terms"] = fit.term_names;
  j["theta"] = fit.theta;
  j["std_errors"] = fit.std_errors;
  const std::size_t d = fit.dim();
  nlohmann::json vcov = nlohmann::json::array();
  for (std::size_t a = 0; a < d; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < d; ++b) row.push_back(fit.vcov[a * d + b]);
    vcov.push_back(std::move(row));
  }
  j["vcov"] = std::move(vcov);
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["bic"] = fit.bic;
  j["n"] = fit.n_obs;
  j["n_events"] = fit.n_transitions;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["gradient_norm"] = fit.gradient_norm;
  j["singular_hessian"] = fit.singular_hessian;
  j["separation"] = fit.separation;
  return j.dump(2) + "\n";
}

}  // namespace defm
