#include "defm/support.hpp"

#include <cstring>

#include "defm/errors.hpp"

namespace defm {

SupportSet enumerate_support(std::size_t K, std::span<const std::uint8_t> prev,
                             const ForbidRules& forbids,
                             std::size_t max_outcomes) {
  if (K == 0 || prev.size() != K)
    fail(errc::invalid_argument, "previous state length does not match K");
  if (K > max_outcomes || K > 31)
    fail(errc::support_too_large,
         "K = " + std::to_string(K) + " exceeds the enumeration cap of " +
             std::to_string(max_outcomes) +
             " outcomes (2^K support states); raise the cap only if you "
             "really want 2^" + std::to_string(K) + " rows");

  SupportSet support;
  support.prev.assign(prev.begin(), prev.end());
  const std::uint32_t prev_code = encode_state(prev);
  const std::uint32_t n_states = 1u << K;
  for (std::uint32_t code = 0; code < n_states; ++code)
    if (forbids.allows(prev_code, code)) support.state_codes.push_back(code);
  if (support.state_codes.empty())
    fail(errc::empty_support,
         "forbid rules exclude every current state for previous state code " +
             std::to_string(prev_code));
  return support;
}

int StatMatrix::find_state(std::uint32_t code) const {
  // state_codes is ascending; binary search
  std::size_t lo = 0, hi = state_codes.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (state_codes[mid] < code)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < state_codes.size() && state_codes[lo] == code)
    return static_cast<int>(lo);
  return -1;
}

StatMatrix build_stat_matrix(const TermSet& terms, const SupportSet& support,
                             const double* x) {
  StatMatrix m;
  m.prev_code = encode_state(support.prev);
  m.d = terms.size();
  m.state_codes = support.state_codes;
  m.rows.resize(m.size() * m.d);
  for (std::size_t i = 0; i < m.size(); ++i)
    suff_stats_into(terms, m.prev_code, m.state_codes[i], x,
                    m.rows.data() + i * m.d);
  return m;
}

std::size_t StatMatrixCache::KeyHash::operator()(const Key& k) const {
  // FNV-1a over the prev code and the raw covariate bit patterns.
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  mix(&k.prev_code, sizeof k.prev_code);
  if (!k.covariates.empty())
    mix(k.covariates.data(), k.covariates.size() * sizeof(double));
  return static_cast<std::size_t>(h);
}

StatMatrixCache::StatMatrixCache(const TermSet& terms,
                                 const ForbidRules& forbids,
                                 std::size_t max_outcomes)
    : terms_(terms),
      forbids_(forbids),
      max_outcomes_(max_outcomes),
      referenced_(terms.referenced_covariates()) {}

const StatMatrix& StatMatrixCache::get(std::span<const std::uint8_t> prev,
                                       std::span<const double> x) {
  Key key;
  key.prev_code = encode_state(prev);
  key.covariates.reserve(referenced_.size());
  for (int c : referenced_) {
    if (static_cast<std::size_t>(c) >= x.size())
      fail(errc::invalid_argument,
           "transition carries fewer covariates than the model references");
    key.covariates.push_back(x[c]);
  }
  auto it = matrices_.find(key);
  if (it == matrices_.end()) {
    auto support = enumerate_support(terms_.n_outcomes(), prev, forbids_,
                                     max_outcomes_);
    auto matrix = std::make_unique<StatMatrix>(
        build_stat_matrix(terms_, support, x.data()));
    it = matrices_.emplace(std::move(key), std::move(matrix)).first;
  }
  return *it->second;
}

}  // namespace defm
