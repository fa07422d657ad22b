#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "distbeam/beam.hpp"
#include "distbeam/errors.hpp"

namespace distbeam::beam {

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Lambda: return "lambda";
    case SweepParam::Ratio: return "k";
    case SweepParam::Xi0: return "xi0";
  }
  return "?";
}

std::optional<SweepParam> parse_sweep_param(const std::string& name) {
  if (name == "lambda") return SweepParam::Lambda;
  if (name == "k") return SweepParam::Ratio;
  if (name == "xi0") return SweepParam::Xi0;
  return std::nullopt;
}

BeamModel apply_sweep_value(const BeamModel& base, SweepParam p, double value) {
  BeamModel bm = base;
  switch (p) {
    case SweepParam::Lambda: bm.lambda0 = bm.lambda1 = value; break;
    case SweepParam::Ratio: bm.ratio = value; break;
    case SweepParam::Xi0: bm.xi0 = value; break;
  }
  return bm;
}

namespace {

SweepRow evaluate_row(const SweepSpec& spec, double value) {
  SweepRow row;
  row.value = value;
  row.alphas.assign(static_cast<std::size_t>(spec.search.n_modes), std::nullopt);
  const BeamModel bm = apply_sweep_value(spec.base, spec.varying, value);
  try {
    const std::vector<double> found = find_frequencies(bm, spec.search);
    std::copy(found.begin(), found.end(), row.alphas.begin());
  } catch (const FrequencyShortfall& e) {
    std::copy(e.found().begin(), e.found().end(), row.alphas.begin());
    row.flagged = true;
    row.note = e.what();
  } catch (const InvalidInput& e) {
    row.flagged = true;
    row.note = e.what();
  }
  return row;
}

// Consecutive alphas of one mode should move smoothly; a jump far larger than
// both the scan resolution and the previous step suggests a lost or swapped root.
void flag_jumps(std::vector<SweepRow>& rows, double grid_step) {
  const std::size_t n_modes = rows.empty() ? 0 : rows.front().alphas.size();
  for (std::size_t m = 0; m < n_modes; ++m) {
    double prev_step = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& a = rows[r - 1].alphas[m];
      const auto& b = rows[r].alphas[m];
      if (!a || !b) {
        prev_step = 0.0;
        continue;
      }
      const double step = std::abs(*b - *a);
      if (r >= 2 && step > 10.0 * std::max(grid_step, prev_step)) {
        rows[r].flagged = true;
        std::ostringstream os;
        os << (rows[r].note.empty() ? "" : "; ") << "alpha" << (m + 1) << " jumps by " << step;
        rows[r].note += os.str();
      }
      prev_step = step;
    }
  }
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, unsigned threads) {
  if (spec.grid.empty()) {
    throw InvalidInput("sweep grid must not be empty");
  }
  std::vector<double> grid = spec.grid;
  std::sort(grid.begin(), grid.end());
  for (double v : grid) {
    // Surfaces invalid grid values before any work starts.
    validate(apply_sweep_value(spec.base, spec.varying, v));
  }

  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      rows[i] = evaluate_row(spec, grid[i]);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size())));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  pool.clear();

  flag_jumps(rows, spec.search.grid_step);
  return rows;
}

}  // namespace distbeam::beam
