#include "pop/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "pop/eval.hpp"
#include "pop/io.hpp"
#include "pop/util.hpp"

namespace pop {

namespace {

constexpr double kImprovementThreshold = 1e-4;  // relative

} // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) {
        throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("TrainConfig: momentum must be in [0, 1)");
    }
    if (!(lr_initial > 0.0) || !(lr_final > 0.0) || lr_final > lr_initial) {
        throw std::invalid_argument("TrainConfig: need 0 < lr_final <= lr_initial");
    }
    if (!(lr_divisor > 1.0)) {
        throw std::invalid_argument("TrainConfig: lr_divisor must be > 1");
    }
    if (plateau_patience < 1) {
        throw std::invalid_argument("TrainConfig: plateau_patience must be >= 1");
    }
    if (weight_decay < 0.0) {
        throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    }
    if (max_epochs < 1) {
        throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
    }
}

OptimizerState OptimizerState::for_network(const PopNetwork& net) {
    OptimizerState state;
    state.velocity[0].assign(net.conv1.kernels.size(), 0.0);
    state.velocity[1].assign(net.conv1.biases.size(), 0.0);
    state.velocity[2].assign(net.conv2.kernels.size(), 0.0);
    state.velocity[3].assign(net.conv2.biases.size(), 0.0);
    state.velocity[4].assign(net.head.weights.size(), 0.0);
    state.velocity[5].assign(net.head.bias.size(), 0.0);
    return state;
}

void sgd_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity,
              double lr, double momentum, double weight_decay) {
    if (params.size() != grads.size() || params.size() != velocity.size()) {
        throw std::invalid_argument("sgd_step: parameter/gradient/velocity size mismatch");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i] + weight_decay * params[i];
        velocity[i] = momentum * velocity[i] - lr * g;
        params[i] += velocity[i];
    }
}

double lr_schedule_step(double current_lr, bool plateau_detected, const TrainConfig& config) {
    if (!plateau_detected) {
        return current_lr;
    }
    return std::max(current_lr / config.lr_divisor, config.lr_final);
}

bool PlateauTracker::observe(double loss) {
    if (!has_best_ || loss < best_ - kImprovementThreshold * std::max(std::abs(best_), 1e-12)) {
        best_ = std::min(loss, has_best_ ? best_ : loss);
        has_best_ = true;
        stale_epochs_ = 0;
        return false;
    }
    if (++stale_epochs_ >= patience_) {
        stale_epochs_ = 0;
        return true;
    }
    return false;
}

std::vector<int> epoch_permutation(std::mt19937_64& rng, int n) {
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

double validation_correlation(const PopNetwork& net, const Dataset& val_set) {
    if (val_set.empty()) {
        throw std::invalid_argument("validation_correlation: empty validation set");
    }
    std::vector<double> machine;
    std::vector<double> human;
    for (const auto& id : val_set.odor_ids()) {
        std::vector<OdorSample> repeats;
        std::vector<double> labels;
        for (const auto& s : val_set.samples) {
            if (s.odor_id == id) {
                repeats.push_back(s);
                labels.push_back(s.label);
            }
        }
        machine.push_back(predict_odor(net, repeats));
        human.push_back(median_of(std::move(labels)));
    }
    return pearson(machine, human);
}

TrainHistory train(PopNetwork& net, const Dataset& train_set, const Dataset* val_set,
                   const TrainConfig& config) {
    config.validate();
    if (train_set.empty()) {
        throw std::invalid_argument("train: empty training set");
    }
    train_set.check_consistent_shapes();
    const int n = static_cast<int>(train_set.size());

    OptimizerState state = OptimizerState::for_network(net);
    std::mt19937_64 rng(config.seed);
    PlateauTracker plateau(config.plateau_patience);

    TrainHistory history;
    double lr = config.lr_initial;

    for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
        const std::vector<int> order = epoch_permutation(rng, n);
        double epoch_loss_sum = 0.0;

        for (int start = 0; start < n; start += config.batch_size) {
            const int count = std::min(config.batch_size, n - start);
            std::vector<PopGrads> per_sample(static_cast<std::size_t>(count));

            // Per-sample backprop in parallel; the reduction below walks
            // sample-index order so results are bit-reproducible.
#pragma omp parallel for schedule(static) if (count > 1)
            for (int j = 0; j < count; ++j) {
                const OdorSample& s =
                    train_set.samples[static_cast<std::size_t>(order[static_cast<std::size_t>(start + j)])];
                per_sample[static_cast<std::size_t>(j)] = loss_and_grads(net, s.matrix, s.label);
            }

            PopGrads batch = zero_grads(net);
            for (int j = 0; j < count; ++j) {
                accumulate_grads(batch, per_sample[static_cast<std::size_t>(j)]);
            }
            epoch_loss_sum += batch.loss;
            scale_grads(batch, 1.0 / static_cast<double>(count));

            const auto views = parameter_views(net);
            for (int a = 0; a < kParamArrayCount; ++a) {
                const auto& view = views[static_cast<std::size_t>(a)];
                sgd_step({view.data, view.size}, batch.arrays[static_cast<std::size_t>(a)],
                         state.velocity[static_cast<std::size_t>(a)], lr, config.momentum,
                         view.is_bias ? 0.0 : config.weight_decay);
            }
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = epoch_loss_sum / static_cast<double>(n);
        record.lr = lr;
        record.val_correlation = std::numeric_limits<double>::quiet_NaN();
        if (val_set != nullptr && !val_set->empty()) {
            try {
                record.val_correlation = validation_correlation(net, *val_set);
            } catch (const std::domain_error&) {
                // constant predictions early in training: leave NaN
            }
        }
        history.epochs.push_back(record);

        const bool plateaued = plateau.observe(record.train_loss);
        if (plateaued) {
            const bool at_floor = lr <= config.lr_final;
            if (at_floor) {
                break;  // lr exhausted and loss no longer improving
            }
            lr = lr_schedule_step(lr, true, config);
        }
    }
    return history;
}

std::pair<Dataset, Dataset> random_split(const Dataset& dataset, int n_train_odors,
                                         std::uint64_t seed) {
    const std::vector<std::string> ids = dataset.odor_ids();
    const int n_odors = static_cast<int>(ids.size());
    if (n_train_odors < 1 || n_train_odors >= n_odors) {
        throw std::invalid_argument("random_split: n_train_odors must be in [1, " +
                                    std::to_string(n_odors - 1) + "], got " +
                                    std::to_string(n_train_odors));
    }
    std::vector<int> order(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) order[i] = static_cast<int>(i);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::map<std::string, bool> goes_to_train;
    for (int i = 0; i < n_odors; ++i) {
        goes_to_train[ids[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]] =
            i < n_train_odors;
    }

    Dataset train_out;
    Dataset val_out;
    train_out.norm_stats = dataset.norm_stats;
    val_out.norm_stats = dataset.norm_stats;
    for (const auto& s : dataset.samples) {
        (goes_to_train.at(s.odor_id) ? train_out : val_out).samples.push_back(s);
    }
    return {std::move(train_out), std::move(val_out)};
}

RunSummary repeated_runs(const Dataset& dataset, int n_train_odors, int k_runs,
                         const PopConfig& model_config, const TrainConfig& train_config) {
    if (k_runs < 1) {
        throw std::invalid_argument("repeated_runs: k_runs must be >= 1");
    }
    RunSummary summary;
    summary.n_train_odors = n_train_odors;
    summary.correlations.assign(static_cast<std::size_t>(k_runs), 0.0);
    std::exception_ptr first_error = nullptr;

    // Runs are independent; each owns its network, split and seed.
#pragma omp parallel for schedule(dynamic) if (k_runs > 1)
    for (int run = 0; run < k_runs; ++run) {
        try {
            const std::uint64_t run_seed = train_config.seed + static_cast<std::uint64_t>(run);
            auto [train_split, val_split] = random_split(dataset, n_train_odors, run_seed);

            PopConfig model_cfg = model_config;
            model_cfg.seed = run_seed;
            TrainConfig run_cfg = train_config;
            run_cfg.seed = run_seed;

            PopNetwork net = build(model_cfg);
            train(net, train_split, nullptr, run_cfg);
            summary.correlations[static_cast<std::size_t>(run)] =
                validation_correlation(net, val_split);
        } catch (...) {
#pragma omp critical
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }

    summary.mean = mean_of(summary.correlations);
    summary.median = median_of(summary.correlations);
    summary.stddev = stddev_of(summary.correlations);
    return summary;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "epoch,loss,lr,val_correlation\n";
    for (const auto& e : history.epochs) {
        out << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.lr) << ','
            << (std::isnan(e.val_correlation) ? std::string() : format_double(e.val_correlation))
            << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

void write_run_summary_csv(const RunSummary& summary, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << "run,val_correlation\n";
    for (std::size_t i = 0; i < summary.correlations.size(); ++i) {
        out << i << ',' << format_double(summary.correlations[i]) << '\n';
    }
    out << "# n_train_odors=" << summary.n_train_odors << " mean=" << format_double(summary.mean)
        << " median=" << format_double(summary.median) << " stddev=" << format_double(summary.stddev)
        << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace pop
