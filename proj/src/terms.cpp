#include "defm/terms.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "defm/errors.hpp"

namespace defm {

namespace {

int find_name(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

// Bit of outcome k under big-endian encoding.
std::uint32_t bit_of(std::size_t k, std::size_t K) {
  return 1u << (K - 1 - k);
}

CompiledPattern compile_pattern(const PatternPair& p,
                                const std::vector<std::string>& outcomes) {
  const std::size_t K = outcomes.size();
  CompiledPattern out;
  for (const auto& [name, value] : p.prev) {
    const int k = find_name(outcomes, name);
    if (k < 0) fail(errc::unknown_outcome, "unknown outcome '" + name + "'");
    out.prev_mask |= bit_of(k, K);
    if (value) out.prev_value |= bit_of(k, K);
  }
  for (const auto& [name, value] : p.cur) {
    const int k = find_name(outcomes, name);
    if (k < 0) fail(errc::unknown_outcome, "unknown outcome '" + name + "'");
    out.cur_mask |= bit_of(k, K);
    if (value) out.cur_value |= bit_of(k, K);
  }
  return out;
}

}  // namespace

std::vector<std::uint8_t> decode_state(std::uint32_t code, std::size_t K) {
  std::vector<std::uint8_t> y(K);
  for (std::size_t k = 0; k < K; ++k)
    y[k] = (code >> (K - 1 - k)) & 1u;
  return y;
}

std::vector<std::string> TermSet::term_names() const {
  std::vector<std::string> names;
  names.reserve(terms.size());
  for (const auto& t : terms) names.push_back(t.name);
  return names;
}

std::vector<int> TermSet::referenced_covariates() const {
  std::set<int> idx;
  for (const auto& t : terms)
    if (t.covariate >= 0) idx.insert(t.covariate);
  return {idx.begin(), idx.end()};
}

void TermSet::require_covariates(std::size_t n_available) const {
  for (const auto& t : terms)
    if (t.covariate >= 0 && static_cast<std::size_t>(t.covariate) >= n_available)
      fail(errc::invalid_argument,
           "term '" + t.name + "' references covariate '" +
               covariate_names[t.covariate] +
               "' but only " + std::to_string(n_available) +
               " covariate values were supplied");
}

CompiledModel compile(const ModelSpec& spec,
                      const std::vector<std::string>& outcome_names,
                      const std::vector<std::string>& covariate_names) {
  for (const auto& o : spec.outcomes)
    if (find_name(outcome_names, o) < 0)
      fail(errc::unknown_outcome,
           "model outcome '" + o + "' not present in the data");

  CompiledModel model;
  model.terms.outcome_names = spec.outcomes;
  model.terms.covariate_names = covariate_names;
  for (const auto& decl : spec.terms) {
    CompiledTerm term;
    term.name = decl.name;
    term.kind = decl.kind;
    for (const auto& p : decl.patterns)
      term.patterns.push_back(compile_pattern(p, spec.outcomes));
    if (decl.covariate) {
      term.covariate = find_name(covariate_names, *decl.covariate);
      if (term.covariate < 0)
        fail(errc::unknown_covariate,
             "term '" + decl.name + "': unknown covariate '" +
                 *decl.covariate + "'");
    }
    model.terms.terms.push_back(std::move(term));
  }
  model.forbids.n_outcomes = spec.outcomes.size();
  for (const auto& p : spec.forbids)
    model.forbids.rules.push_back(compile_pattern(p, spec.outcomes));
  return model;
}

CompiledModel compile(const ModelSpec& spec, const PanelDataset& data) {
  return compile(spec, data.outcome_names, data.covariate_names);
}

void suff_stats_into(const TermSet& terms, std::uint32_t prev_code,
                     std::uint32_t cur_code, const double* x, double* out) {
  for (std::size_t j = 0; j < terms.terms.size(); ++j) {
    const CompiledTerm& term = terms.terms[j];
    int hits = 0;
    for (const auto& p : term.patterns)
      hits += p.matches(prev_code, cur_code) ? 1 : 0;
    double v = static_cast<double>(hits);
    if (term.covariate >= 0) v *= x[term.covariate];
    out[j] = v;
  }
}

std::vector<double> suff_stats(const TermSet& terms,
                               std::span<const std::uint8_t> prev,
                               std::span<const std::uint8_t> cur,
                               std::span<const double> x) {
  if (prev.size() != terms.n_outcomes() || cur.size() != terms.n_outcomes())
    fail(errc::invalid_argument, "state vector length does not match the model");
  std::vector<double> out(terms.size());
  suff_stats_into(terms, encode_state(prev), encode_state(cur), x.data(),
                  out.data());
  return out;
}

void change_stats_into(const TermSet& terms, std::uint32_t prev_code,
                       std::uint32_t cur_code, std::size_t k, const double* x,
                       double* out) {
  const std::uint32_t bit = 1u << (terms.n_outcomes() - 1 - k);
  const std::uint32_t on = cur_code | bit;
  const std::uint32_t off = cur_code & ~bit;
  for (std::size_t j = 0; j < terms.terms.size(); ++j) {
    const CompiledTerm& term = terms.terms[j];
    int delta = 0;
    for (const auto& p : term.patterns) {
      delta += p.matches(prev_code, on) ? 1 : 0;
      delta -= p.matches(prev_code, off) ? 1 : 0;
    }
    double v = static_cast<double>(delta);
    if (term.covariate >= 0) v *= x[term.covariate];
    out[j] = v;
  }
}

std::vector<double> change_stats(const TermSet& terms,
                                 std::span<const std::uint8_t> prev,
                                 std::span<const std::uint8_t> cur,
                                 std::size_t k, std::span<const double> x) {
  if (k >= terms.n_outcomes())
    fail(errc::invalid_argument, "outcome index out of range");
  std::vector<double> out(terms.size());
  change_stats_into(terms, encode_state(prev), encode_state(cur), k, x.data(),
                    out.data());
  return out;
}

std::size_t MotifCensus::count_for(std::span<const std::uint8_t> prev,
                                   std::span<const std::uint8_t> cur) const {
  for (const auto& e : entries)
    if (std::equal(prev.begin(), prev.end(), e.prev.begin(), e.prev.end()) &&
        std::equal(cur.begin(), cur.end(), e.cur.begin(), e.cur.end()))
      return e.count;
  return 0;
}

MotifCensus motif_census(const std::vector<TransitionRecord>& transitions,
                         const std::vector<std::string>& outcome_names,
                         const std::vector<std::string>& subset) {
  if (subset.empty())
    fail(errc::invalid_argument, "census subset must be nonempty");
  std::vector<std::size_t> idx;
  for (const auto& name : subset) {
    const int k = find_name(outcome_names, name);
    if (k < 0) fail(errc::unknown_outcome, "unknown outcome '" + name + "'");
    idx.push_back(static_cast<std::size_t>(k));
  }

  const std::size_t m = idx.size();
  std::map<std::uint64_t, std::size_t> counts;
  for (const auto& rec : transitions) {
    std::uint32_t prev_code = 0, cur_code = 0;
    for (auto k : idx) {
      prev_code = (prev_code << 1) | (rec.prev[k] ? 1u : 0u);
      cur_code = (cur_code << 1) | (rec.cur[k] ? 1u : 0u);
    }
    // prev followed by cur, read as one big-endian integer
    ++counts[(static_cast<std::uint64_t>(prev_code) << m) | cur_code];
  }

  MotifCensus census;
  census.outcome_subset = subset;
  census.total = transitions.size();
  for (const auto& [key, count] : counts) {
    MotifCensus::Entry e;
    e.prev = decode_state(static_cast<std::uint32_t>(key >> m), m);
    e.cur = decode_state(static_cast<std::uint32_t>(key & ((1u << m) - 1)), m);
    e.count = count;
    census.entries.push_back(std::move(e));
  }
  std::stable_sort(census.entries.begin(), census.entries.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  return census;
}

std::vector<TransitionRecord> project_transitions(
    const std::vector<TransitionRecord>& transitions,
    const std::vector<std::string>& from_names,
    const std::vector<std::string>& to_names) {
  std::vector<std::size_t> idx;
  for (const auto& name : to_names) {
    const int k = find_name(from_names, name);
    if (k < 0) fail(errc::unknown_outcome, "unknown outcome '" + name + "'");
    idx.push_back(static_cast<std::size_t>(k));
  }
  std::vector<TransitionRecord> out;
  out.reserve(transitions.size());
  for (const auto& rec : transitions) {
    TransitionRecord r;
    r.individual_id = rec.individual_id;
    r.time = rec.time;
    r.x = rec.x;
    for (auto k : idx) {
      r.prev.push_back(rec.prev[k]);
      r.cur.push_back(rec.cur[k]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace defm
