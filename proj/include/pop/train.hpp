#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "pop/dataset.hpp"
#include "pop/model.hpp"

namespace pop {

struct TrainConfig {
    int batch_size = 14;
    double momentum = 0.8;
    double lr_initial = 0.01;
    double lr_final = 0.0001;
    double lr_divisor = 10.0;
    int plateau_patience = 25;   // epochs without relative improvement > 1e-4
    double weight_decay = 1e-4;  // L2, weights only
    int max_epochs = 2000;
    std::uint64_t seed = 0;

    void validate() const;
};

// Momentum velocity buffers, one per parameter array.
struct OptimizerState {
    std::array<std::vector<double>, kParamArrayCount> velocity;

    static OptimizerState for_network(const PopNetwork& network);
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double lr = 0.0;
    double val_correlation = 0.0;  // NaN when no validation set
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
};

// v <- momentum*v - lr*(g + weight_decay*theta); theta <- theta + v.
// Callers pass weight_decay = 0 for bias arrays.
void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              double lr, double momentum, double weight_decay);

// Divide lr by lr_divisor on plateau, floored at lr_final.
double lr_schedule_step(double current_lr, bool plateau_detected, const TrainConfig& config);

// Tracks the best training loss; reports a plateau after `patience` epochs
// without a relative improvement above 1e-4.
class PlateauTracker {
public:
    explicit PlateauTracker(int patience) : patience_(patience) {}
    bool observe(double loss);

private:
    int patience_;
    int stale_epochs_ = 0;
    double best_ = 0.0;
    bool has_best_ = false;
};

// Momentum SGD over seeded shuffled mini-batches; deterministic given seed.
TrainHistory train(PopNetwork& network, const Dataset& train_set, const Dataset* val_set,
                   const TrainConfig& config);

// Seeded split by odor id: all repeats of an odor stay on one side.
std::pair<Dataset, Dataset> random_split(const Dataset& dataset, int n_train_odors,
                                         std::uint64_t seed);

struct RunSummary {
    int n_train_odors = 0;
    std::vector<double> correlations;  // per run, validation odors
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
};

// k independent split+init+train runs with derived seeds (seed + run index).
RunSummary repeated_runs(const Dataset& dataset, int n_train_odors, int k_runs,
                         const PopConfig& model_config, const TrainConfig& train_config);

// Seeded epoch shuffle; every sample index appears exactly once.
std::vector<int> epoch_permutation(std::mt19937_64& rng, int n);

// Odor-level Pearson correlation of network predictions against the median
// label per odor. Needs at least two odors and non-constant predictions.
double validation_correlation(const PopNetwork& network, const Dataset& val_set);

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);
void write_run_summary_csv(const RunSummary& summary, const std::filesystem::path& path);

} // namespace pop
