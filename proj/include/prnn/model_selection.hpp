#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "prnn/training.hpp"

namespace prnn {

struct SelectionGrid {
  std::vector<LayerSizes> layer_sizes;
  std::vector<int> training_sizes;  // path counts, prefix slices of the training set
  int n_inits = 10;
  bool enforce_ratio = true;  // n_bulk = 4 * n_cohesive in every row

  void validate(std::size_t available_paths) const {
    if (layer_sizes.empty() || training_sizes.empty())
      throw ConfigError("SelectionGrid: empty grid");
    if (n_inits < 1) throw ConfigError("SelectionGrid: n_inits must be >= 1");
    for (const auto& s : layer_sizes) {
      s.validate();
      if (enforce_ratio && s.n_bulk != 4 * s.n_cohesive)
        throw ConfigError("SelectionGrid: layer sizes must honor the 4:1 bulk:cohesive ratio");
    }
    for (int n : training_sizes) {
      if (n < 1 || n > static_cast<int>(available_paths))
        throw ConfigError("SelectionGrid: training size exceeds the available paths");
    }
  }
};

struct SelectionRow {
  LayerSizes sizes;
  int train_size = 0;
  std::uint64_t seed = 0;
  double val_mse = 0.0;
};

struct SelectionResult {
  std::vector<SelectionRow> rows;  // one row per (cell, init)
  LayerSizes selected_sizes;
  int selected_train_size = 0;
  double selected_val_mse = 0.0;
};

// Pure argmin over the recorded table: per-cell minimum across seeds, overall
// minimum across cells, ties broken toward the smaller layer and then the
// smaller training size.
inline SelectionResult select_from_rows(std::vector<SelectionRow> rows) {
  if (rows.empty()) throw std::invalid_argument("select_from_rows: empty table");
  SelectionResult res;
  res.rows = std::move(rows);
  struct Cell {
    LayerSizes sizes;
    int tsize;
    double best;
  };
  std::vector<Cell> cells;
  for (const auto& r : res.rows) {
    auto it = std::find_if(cells.begin(), cells.end(), [&](const Cell& c) {
      return c.sizes.n_bulk == r.sizes.n_bulk && c.sizes.n_cohesive == r.sizes.n_cohesive &&
             c.tsize == r.train_size;
    });
    if (it == cells.end())
      cells.push_back({r.sizes, r.train_size, r.val_mse});
    else
      it->best = std::min(it->best, r.val_mse);
  }
  const Cell* winner = &cells.front();
  for (const auto& c : cells) {
    const bool better = c.best < winner->best ||
                        (c.best == winner->best &&
                         (c.sizes.n_bulk < winner->sizes.n_bulk ||
                          (c.sizes.n_bulk == winner->sizes.n_bulk && c.tsize < winner->tsize)));
    if (better) winner = &c;
  }
  res.selected_sizes = winner->sizes;
  res.selected_train_size = winner->tsize;
  res.selected_val_mse = winner->best;
  return res;
}

// For each (layer size, training size) cell, train n_inits restarts and
// record the per-seed validation minima, then select via select_from_rows.
inline SelectionResult model_select(const SelectionGrid& grid, Architecture arch, bool leaky,
                                    const std::vector<DatasetPath>& train_set,
                                    const std::vector<DatasetPath>& val_set,
                                    const TrainConfig& base_cfg, const BulkProps& bulk_props,
                                    const CzmProps& czm_props) {
  grid.validate(train_set.size());
  std::vector<SelectionRow> rows;
  std::uint64_t cell_index = 0;
  for (const auto& sizes : grid.layer_sizes) {
    for (int tsize : grid.training_sizes) {
      for (int init = 0; init < grid.n_inits; ++init) {
        const std::uint64_t seed =
            derive_seed(base_cfg.rng_seed, cell_index * 1000 + static_cast<std::uint64_t>(init));
        PrnnModel model;
        model.params = NetworkParams::init(arch, sizes, seed, leaky);
        model.bulk_props = bulk_props;
        model.czm_props = czm_props;
        TrainConfig cfg = base_cfg;
        cfg.rng_seed = seed;
        const std::vector<DatasetPath> slice(train_set.begin(), train_set.begin() + tsize);
        const TrainResult r = train(model, slice, val_set, cfg);
        const double val = r.diverged ? std::numeric_limits<double>::infinity() : r.best_val_mse;
        rows.push_back({sizes, tsize, seed, val});
      }
      ++cell_index;
    }
  }
  return select_from_rows(std::move(rows));
}

}  // namespace prnn
