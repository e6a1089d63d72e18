#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "defm/model.hpp"
#include "defm/panel.hpp"

namespace defm {

/// Big-endian state encoding: outcome 0 is the most significant bit, so a
/// state vector read left-to-right is the binary expansion of its code.
inline std::uint32_t encode_state(std::span<const std::uint8_t> y) {
  std::uint32_t code = 0;
  for (auto v : y) code = (code << 1) | (v ? 1u : 0u);
  return code;
}

std::vector<std::uint8_t> decode_state(std::uint32_t code, std::size_t K);

/// Index-resolved pattern pair; matches via mask/value tests on state codes.
struct CompiledPattern {
  std::uint32_t prev_mask = 0;
  std::uint32_t prev_value = 0;
  std::uint32_t cur_mask = 0;
  std::uint32_t cur_value = 0;

  bool matches(std::uint32_t prev_code, std::uint32_t cur_code) const {
    return (prev_code & prev_mask) == prev_value &&
           (cur_code & cur_mask) == cur_value;
  }
};

struct CompiledTerm {
  std::string name;
  TermKind kind = TermKind::logit;
  std::vector<CompiledPattern> patterns;  // summed
  int covariate = -1;                     // index into TransitionRecord::x
};

/// The statistic map s(prev, cur, x): entry j sums term j's pattern-match
/// indicators, scaled by the term's covariate when one is attached.
struct TermSet {
  std::vector<std::string> outcome_names;
  std::vector<std::string> covariate_names;
  std::vector<CompiledTerm> terms;

  std::size_t size() const { return terms.size(); }
  std::size_t n_outcomes() const { return outcome_names.size(); }
  std::vector<std::string> term_names() const;
  /// Sorted unique covariate indices referenced by any term.
  std::vector<int> referenced_covariates() const;
  /// Fails unless every referenced covariate index is < n_available.
  void require_covariates(std::size_t n_available) const;
};

struct ForbidRules {
  std::size_t n_outcomes = 0;
  std::vector<CompiledPattern> rules;

  bool empty() const { return rules.empty(); }
  bool allows(std::uint32_t prev_code, std::uint32_t cur_code) const {
    for (const auto& r : rules)
      if (r.matches(prev_code, cur_code)) return false;
    return true;
  }
};

struct CompiledModel {
  TermSet terms;
  ForbidRules forbids;
};

/// Resolves a ModelSpec against concrete outcome/covariate name lists.
/// Spec outcomes must all be present; term covariates must resolve.
/// The compiled state order is the spec's declaration order.
CompiledModel compile(const ModelSpec& spec,
                      const std::vector<std::string>& outcome_names,
                      const std::vector<std::string>& covariate_names);
CompiledModel compile(const ModelSpec& spec, const PanelDataset& data);

/// Statistic vector s(prev, cur, x), length d, in term declaration order.
std::vector<double> suff_stats(const TermSet& terms,
                               std::span<const std::uint8_t> prev,
                               std::span<const std::uint8_t> cur,
                               std::span<const double> x);

/// Code-level evaluation into a caller buffer of length terms.size().
void suff_stats_into(const TermSet& terms, std::uint32_t prev_code,
                     std::uint32_t cur_code, const double* x, double* out);

/// Change statistics for outcome k: s with cur[k]=1 minus s with cur[k]=0,
/// all other entries of cur held fixed.
std::vector<double> change_stats(const TermSet& terms,
                                 std::span<const std::uint8_t> prev,
                                 std::span<const std::uint8_t> cur,
                                 std::size_t k, std::span<const double> x);

void change_stats_into(const TermSet& terms, std::uint32_t prev_code,
                       std::uint32_t cur_code, std::size_t k, const double* x,
                       double* out);

/// Exhaustive count of observed (prev, cur) patterns over an outcome subset.
struct MotifCensus {
  struct Entry {
    std::vector<std::uint8_t> prev;
    std::vector<std::uint8_t> cur;
    std::size_t count = 0;
  };
  std::vector<std::string> outcome_subset;
  /// Nonzero entries, descending count; ties by the prev-then-cur pattern
  /// read as a big-endian integer.
  std::vector<Entry> entries;
  std::size_t total = 0;

  std::size_t count_for(std::span<const std::uint8_t> prev,
                        std::span<const std::uint8_t> cur) const;
};

MotifCensus motif_census(const std::vector<TransitionRecord>& transitions,
                         const std::vector<std::string>& outcome_names,
                         const std::vector<std::string>& subset);

/// Reorders each transition's state vectors from one outcome-name order to
/// another (used when data columns and model declaration differ).
std::vector<TransitionRecord> project_transitions(
    const std::vector<TransitionRecord>& transitions,
    const std::vector<std::string>& from_names,
    const std::vector<std::string>& to_names);

}  // namespace defm
