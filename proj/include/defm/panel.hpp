#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace defm {

struct Wave {
  long time = 0;
  std::vector<std::uint8_t> y;  // K binary outcomes
  std::vector<double> x;        // C covariates
};

struct IndividualSeries {
  std::string id;
  std::vector<Wave> waves;  // strictly increasing time
};

/// Counts of rows discarded during ingestion, kept so any downstream filter
/// chain can be audited.
struct LoadInfo {
  std::size_t rows_read = 0;
  std::size_t dropped_missing_outcome = 0;
  std::size_t dropped_missing_covariate = 0;
};

/// Immutable after construction; safe for concurrent reads.
struct PanelDataset {
  std::vector<IndividualSeries> individuals;
  std::vector<std::string> outcome_names;
  std::vector<std::string> covariate_names;
  LoadInfo load_info;

  std::size_t n_outcomes() const { return outcome_names.size(); }
  std::size_t n_individuals() const { return individuals.size(); }
  std::size_t n_waves() const;
};

/// One Markov step: the (previous state, current state, covariates) triple
/// contributing one factor to the conditional likelihood. Covariates are the
/// ones attached to the current wave.
struct TransitionRecord {
  std::string individual_id;
  long time = 0;  // time of the current wave
  std::vector<std::uint8_t> prev;
  std::vector<std::uint8_t> cur;
  std::vector<double> x;
};

/// Loads a panel CSV (header row, comma delimiter, "." decimal point, empty
/// cell = missing). Rows with a missing outcome or covariate are dropped and
/// counted in LoadInfo. Outcome cells must be "0" or "1".
PanelDataset load_panel(const std::string& path, const std::string& id_col,
                        const std::string& time_col,
                        const std::vector<std::string>& outcome_cols,
                        const std::vector<std::string>& covariate_cols);

/// As load_panel but from an already-parsed table (used for tests and
/// in-memory round trips). `origin` labels diagnostics.
struct CsvTable;
PanelDataset panel_from_table(const CsvTable& table, const std::string& origin,
                              const std::string& id_col,
                              const std::string& time_col,
                              const std::vector<std::string>& outcome_cols,
                              const std::vector<std::string>& covariate_cols);

/// One record per consecutive wave pair within each individual; individuals
/// with a single wave contribute none. With strict_gaps, pairs whose time
/// difference is not exactly 1 are skipped.
std::vector<TransitionRecord> build_transitions(const PanelDataset& data,
                                                bool strict_gaps = false);

/// Writes the ingestion CSV schema: id,time,<outcomes...>,<covariates...>.
void write_panel_csv(const PanelDataset& data, std::ostream& os);

}  // namespace defm
