#include "defm/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include "defm/csv.hpp"
#include "defm/errors.hpp"

namespace defm {

namespace {

long parse_time(const std::string& cell, const std::string& origin,
                std::size_t row) {
  long v = 0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    fail(errc::unparseable_value, origin + ": row " + std::to_string(row) +
                                      ": time value '" + cell +
                                      "' is not an integer");
  return v;
}

double parse_real(const std::string& cell, const std::string& origin,
                  std::size_t row, const std::string& col) {
  double v = 0;
  auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
      !std::isfinite(v))
    fail(errc::unparseable_value, origin + ": row " + std::to_string(row) +
                                      ", column '" + col + "': '" + cell +
                                      "' is not a finite real");
  return v;
}

}  // namespace

std::size_t PanelDataset::n_waves() const {
  std::size_t n = 0;
  for (const auto& ind : individuals) n += ind.waves.size();
  return n;
}

PanelDataset panel_from_table(const CsvTable& table, const std::string& origin,
                              const std::string& id_col,
                              const std::string& time_col,
                              const std::vector<std::string>& outcome_cols,
                              const std::vector<std::string>& covariate_cols) {
  if (outcome_cols.empty())
    fail(errc::invalid_argument, "at least one outcome column is required");

  auto need = [&](const std::string& name) {
    int idx = table.column(name);
    if (idx < 0)
      fail(errc::missing_column, origin + ": missing column '" + name + "'");
    return idx;
  };

  const int id_idx = need(id_col);
  const int time_idx = need(time_col);
  std::vector<int> y_idx, x_idx;
  for (const auto& c : outcome_cols) y_idx.push_back(need(c));
  for (const auto& c : covariate_cols) x_idx.push_back(need(c));

  PanelDataset data;
  data.outcome_names = outcome_cols;
  data.covariate_names = covariate_cols;
  data.load_info.rows_read = table.rows.size();

  // Group rows by individual id, preserving first-appearance order.
  std::vector<std::string> id_order;
  std::map<std::string, std::vector<Wave>> by_id;

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t rowno = r + 2;  // 1-based, after header

    Wave w;
    bool drop_outcome = false, drop_covariate = false;
    for (std::size_t j = 0; j < y_idx.size(); ++j) {
      const std::string& cell = row[y_idx[j]];
      if (cell.empty()) {
        drop_outcome = true;
        break;
      }
      if (cell == "0")
        w.y.push_back(0);
      else if (cell == "1")
        w.y.push_back(1);
      else
        fail(errc::non_binary_outcome,
             origin + ": row " + std::to_string(rowno) + ", column '" +
                 outcome_cols[j] + "': outcome value '" + cell +
                 "' is not 0 or 1");
    }
    if (drop_outcome) {
      ++data.load_info.dropped_missing_outcome;
      continue;
    }
    for (std::size_t j = 0; j < x_idx.size(); ++j) {
      const std::string& cell = row[x_idx[j]];
      if (cell.empty()) {
        drop_covariate = true;
        break;
      }
      w.x.push_back(parse_real(cell, origin, rowno, covariate_cols[j]));
    }
    if (drop_covariate) {
      ++data.load_info.dropped_missing_covariate;
      continue;
    }

    w.time = parse_time(row[time_idx], origin, rowno);
    const std::string& id = row[id_idx];
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      id_order.push_back(id);
      it = by_id.emplace(id, std::vector<Wave>{}).first;
    }
    it->second.push_back(std::move(w));
  }

  for (const auto& id : id_order) {
    IndividualSeries series;
    series.id = id;
    series.waves = std::move(by_id[id]);
    std::stable_sort(series.waves.begin(), series.waves.end(),
                     [](const Wave& a, const Wave& b) { return a.time < b.time; });
    for (std::size_t i = 1; i < series.waves.size(); ++i)
      if (series.waves[i].time == series.waves[i - 1].time)
        fail(errc::duplicate_wave,
             origin + ": individual '" + id + "' has duplicate time " +
                 std::to_string(series.waves[i].time));
    data.individuals.push_back(std::move(series));
  }
  return data;
}

PanelDataset load_panel(const std::string& path, const std::string& id_col,
                        const std::string& time_col,
                        const std::vector<std::string>& outcome_cols,
                        const std::vector<std::string>& covariate_cols) {
  return panel_from_table(read_csv(path), path, id_col, time_col, outcome_cols,
                          covariate_cols);
}

std::vector<TransitionRecord> build_transitions(const PanelDataset& data,
                                                bool strict_gaps) {
  std::vector<TransitionRecord> out;
  for (const auto& ind : data.individuals) {
    for (std::size_t t = 1; t < ind.waves.size(); ++t) {
      const Wave& a = ind.waves[t - 1];
      const Wave& b = ind.waves[t];
      if (strict_gaps && b.time - a.time != 1) continue;
      TransitionRecord rec;
      rec.individual_id = ind.id;
      rec.time = b.time;
      rec.prev = a.y;
      rec.cur = b.y;
      rec.x = b.x;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_panel_csv(const PanelDataset& data, std::ostream& os) {
  os << "id,time";
  for (const auto& n : data.outcome_names) os << ',' << n;
  for (const auto& n : data.covariate_names) os << ',' << n;
  os << '\n';
  for (const auto& ind : data.individuals) {
    for (const auto& w : ind.waves) {
      os << ind.id << ',' << w.time;
      for (auto v : w.y) os << ',' << int(v);
      for (auto v : w.x) os << ',' << format_double(v);
      os << '\n';
    }
  }
}

}  // namespace defm
