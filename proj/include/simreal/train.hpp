#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simreal/dataset.hpp"
#include "simreal/network.hpp"
#include "simreal/optim.hpp"
#include "json.hpp"

namespace simreal {

enum class LambdaMode { constant, ganin_schedule };

LambdaMode lambda_mode_from_string(const std::string& s);
std::string lambda_mode_name(LambdaMode mode);

struct TrainConfig {
    std::size_t hidden = 100;
    std::size_t batch_size = 3000;
    std::size_t epochs = 0;  // required; there is no default and no early stopping
    double train_fraction = 0.7;
    AdamConfig adam;
    LambdaMode lambda_mode = LambdaMode::constant;
    double lambda_value = 1.0;
    std::size_t domain_batch_size = 3000;
    bool use_domain_weights = false;
    std::uint64_t seed = 1;

    void validate() const;
};

struct HistoryRecord {
    std::size_t epoch = 0;  // 1-based
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double class_loss = 0.0;
    std::optional<double> domain_loss;  // DANN only
    double lambda = 0.0;                // 0 for the plain NN
};

struct History {
    std::string model;  // "nn" or "dann"
    std::vector<HistoryRecord> records;
};

struct TrainResult {
    NetParams params;
    Standardizer standardizer;
    History history;
};

// lambda for a given training progress p in [0, 1]. Constant mode ignores p;
// the schedule ramps as value * (2 / (1 + exp(-10 p)) - 1).
double lambda_at(LambdaMode mode, double value, double progress);

// Benchmark classifier: class-only training on the labeled source sample.
// Splits train/test, fits the standardizer on the train split, and leaves the
// domain head at its initialized values.
TrainResult train_nn(const TrainConfig& cfg, const Dataset& labeled);

// Adversarial training: every step pairs one class batch from the training
// split with one balanced domain batch drawn from the two control samples
// (domain label 0 = control_source, 1 = control_target), standardized by the
// source-fitted standardizer, through a joint backward pass at the epoch's
// lambda. Domain sampling uses its own rng sub-stream, so the class-batch
// sequence matches train_nn's for the same seed.
TrainResult train_dann(const TrainConfig& cfg, const Dataset& labeled,
                       const Dataset& control_source, const Dataset& control_target);

// Standardize, forward, return the class-head probability of label 1.
std::vector<double> predict(const NetParams& params, const Standardizer& st,
                            const Matrix& X);

// Feature-alignment probe: freeze the hidden layer, fit a fresh softmax head
// on hidden activations of the control rows (half for fitting, half held
// out, 200 full-batch steps), and report held-out source-vs-target accuracy.
// Lower accuracy means better-aligned features.
double domain_probe_accuracy(const NetParams& params, const Standardizer& st,
                             const Dataset& control_source,
                             const Dataset& control_target, std::uint64_t seed);

void write_history_csv(const std::string& path, const History& history);
void write_history_json(const std::string& path, const History& history);
History read_history_json(const std::string& path);

}  // namespace simreal
