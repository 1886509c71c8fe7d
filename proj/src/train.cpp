#include "simreal/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "simreal/errors.hpp"
#include "simreal/num_format.hpp"
#include "simreal/stats.hpp"

namespace simreal {

LambdaMode lambda_mode_from_string(const std::string& s) {
    if (s == "constant") return LambdaMode::constant;
    if (s == "ganin_schedule") return LambdaMode::ganin_schedule;
    throw ConfigError("unknown lambda_mode '" + s +
                      "' (expected constant or ganin_schedule)");
}

std::string lambda_mode_name(LambdaMode mode) {
    return mode == LambdaMode::constant ? "constant" : "ganin_schedule";
}

void TrainConfig::validate() const {
    if (hidden == 0) throw ConfigError("train: hidden must be >= 1");
    if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
    if (epochs == 0) throw ConfigError("train: epochs must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train: train_fraction must be in (0,1)");
    if (!(lambda_value >= 0.0)) throw ConfigError("train: lambda_value must be >= 0");
    if (domain_batch_size < 2) throw ConfigError("train: domain_batch_size must be >= 2");
    adam.validate();
}

double lambda_at(LambdaMode mode, double value, double progress) {
    if (!(progress >= 0.0 && progress <= 1.0))
        throw ValidationError("lambda_at: progress must be in [0,1]");
    if (mode == LambdaMode::constant) return value;
    return value * (2.0 / (1.0 + std::exp(-10.0 * progress)) - 1.0);
}

namespace {

// Training progress for the lambda schedule: 0 at the first epoch, 1 at the
// last (a single-epoch run counts as fully progressed).
double epoch_progress(std::size_t epoch, std::size_t epochs) {
    if (epochs <= 1) return 1.0;
    return static_cast<double>(epoch - 1) / static_cast<double>(epochs - 1);
}

std::vector<double> class_scores(const NetParams& params, const Matrix& X) {
    const ForwardTrace trace = forward(params, X);
    std::vector<double> probs(X.rows());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = trace.class_probs.at(i, 1);
    return probs;
}

struct EpochEval {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double class_loss = 0.0;  // on the test split
};

EpochEval evaluate_epoch(const NetParams& params, const Dataset& train_s,
                         const Dataset& test_s) {
    EpochEval eval;
    eval.train_accuracy = accuracy(class_scores(params, train_s.features), *train_s.labels);
    const ForwardTrace test_trace = forward(params, test_s.features);
    std::vector<double> test_probs(test_s.n());
    for (std::size_t i = 0; i < test_probs.size(); ++i)
        test_probs[i] = test_trace.class_probs.at(i, 1);
    eval.test_accuracy = accuracy(test_probs, *test_s.labels);
    eval.class_loss = class_loss(test_trace, *test_s.labels,
                                 test_s.weights ? &*test_s.weights : nullptr);
    return eval;
}

struct RngStreams {
    Rng init;
    Rng split;
    Rng class_batches;
    Rng domain_batches;

    // Fixed fork order; both trainers consume it identically so the
    // class-side streams coincide between nn and dann runs.
    explicit RngStreams(std::uint64_t seed)
        : init(0), split(0), class_batches(0), domain_batches(0) {
        Rng root(seed);
        init = root.fork();
        split = root.fork();
        class_batches = root.fork();
        domain_batches = root.fork();
    }
};

struct Prepared {
    Dataset train_s;
    Dataset test_s;
    Standardizer standardizer;
    NetParams params;
};

Prepared prepare(const TrainConfig& cfg, const Dataset& labeled, RngStreams& streams,
                 const char* who) {
    if (!labeled.labels)
        throw ValidationError(std::string(who) + ": dataset has no labels");
    if (labeled.n() < 10)
        throw ValidationError(std::string(who) + ": need at least 10 rows, got " +
                              std::to_string(labeled.n()));
    Prepared prep;
    prep.params = init(labeled.d(), cfg.hidden, streams.init);
    auto [train_ds, test_ds] = split(labeled, cfg.train_fraction, streams.split);
    prep.standardizer = fit_standardizer(train_ds);
    prep.train_s = apply_standardizer(prep.standardizer, train_ds);
    prep.test_s = apply_standardizer(prep.standardizer, test_ds);
    return prep;
}

}  // namespace

TrainResult train_nn(const TrainConfig& cfg, const Dataset& labeled) {
    cfg.validate();
    RngStreams streams(cfg.seed);
    Prepared prep = prepare(cfg, labeled, streams, "train_nn");
    AdamState adam = AdamState::fresh(prep.params, cfg.adam);

    History history;
    history.model = "nn";
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        for (const Dataset& batch : batches(prep.train_s, cfg.batch_size, streams.class_batches)) {
            const BackwardResult step =
                backward(prep.params, batch.features, &*batch.labels,
                         batch.weights ? &*batch.weights : nullptr, nullptr, nullptr, 0.0);
            adam_step(adam, prep.params, step.grads);
        }
        const EpochEval eval = evaluate_epoch(prep.params, prep.train_s, prep.test_s);
        history.records.push_back({epoch, eval.train_accuracy, eval.test_accuracy,
                                   eval.class_loss, std::nullopt, 0.0});
    }
    return {std::move(prep.params), std::move(prep.standardizer), std::move(history)};
}

TrainResult train_dann(const TrainConfig& cfg, const Dataset& labeled,
                       const Dataset& control_source, const Dataset& control_target) {
    cfg.validate();
    if (control_source.n() == 0 || control_target.n() == 0)
        throw ValidationError("train_dann: control sets must be non-empty");
    if (control_source.d() != labeled.d() || control_target.d() != labeled.d())
        throw ShapeError("train_dann: control sets must share the labeled feature space");

    RngStreams streams(cfg.seed);
    Prepared prep = prepare(cfg, labeled, streams, "train_dann");
    const Dataset ctrl_src_s = apply_standardizer(prep.standardizer, control_source);
    const Dataset ctrl_tgt_s = apply_standardizer(prep.standardizer, control_target);

    // Optional sPlot-style weights on the target half, normalized to mean 1.
    std::vector<double> target_weights(ctrl_tgt_s.n(), 1.0);
    if (cfg.use_domain_weights && ctrl_tgt_s.weights) {
        double total = 0.0;
        for (double w : *ctrl_tgt_s.weights) total += w;
        const double mean = total / static_cast<double>(ctrl_tgt_s.n());
        for (std::size_t i = 0; i < target_weights.size(); ++i)
            target_weights[i] = (*ctrl_tgt_s.weights)[i] / mean;
    }

    AdamState adam = AdamState::fresh(prep.params, cfg.adam);
    const std::size_t n_half = cfg.domain_batch_size / 2;
    const std::size_t d = labeled.d();

    History history;
    history.model = "dann";
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const double lambda =
            lambda_at(cfg.lambda_mode, cfg.lambda_value, epoch_progress(epoch, cfg.epochs));
        double domain_loss_sum = 0.0;
        std::size_t steps = 0;
        for (const Dataset& batch : batches(prep.train_s, cfg.batch_size, streams.class_batches)) {
            BackwardResult step =
                backward(prep.params, batch.features, &*batch.labels,
                         batch.weights ? &*batch.weights : nullptr, nullptr, nullptr, 0.0);

            // Balanced domain batch, sampled with replacement from each
            // control set through the dedicated sub-stream.
            Matrix domain_x(2 * n_half, d);
            std::vector<int> domain_labels(2 * n_half);
            std::vector<double> domain_weights(2 * n_half, 1.0);
            for (std::size_t i = 0; i < n_half; ++i) {
                const auto r = static_cast<std::size_t>(
                    streams.domain_batches.next_below(ctrl_src_s.n()));
                const auto row = ctrl_src_s.features.row(r);
                std::copy(row.begin(), row.end(), domain_x.row(i).begin());
                domain_labels[i] = 0;
            }
            for (std::size_t i = 0; i < n_half; ++i) {
                const auto r = static_cast<std::size_t>(
                    streams.domain_batches.next_below(ctrl_tgt_s.n()));
                const auto row = ctrl_tgt_s.features.row(r);
                std::copy(row.begin(), row.end(), domain_x.row(n_half + i).begin());
                domain_labels[n_half + i] = 1;
                domain_weights[n_half + i] = target_weights[r];
            }
            const BackwardResult domain_step =
                backward(prep.params, domain_x, nullptr, nullptr, &domain_labels,
                         cfg.use_domain_weights ? &domain_weights : nullptr, lambda);
            accumulate(step.grads, domain_step.grads);
            adam_step(adam, prep.params, step.grads);
            domain_loss_sum += *domain_step.domain_loss;
            ++steps;
        }
        const EpochEval eval = evaluate_epoch(prep.params, prep.train_s, prep.test_s);
        history.records.push_back({epoch, eval.train_accuracy, eval.test_accuracy,
                                   eval.class_loss,
                                   domain_loss_sum / static_cast<double>(steps), lambda});
    }
    return {std::move(prep.params), std::move(prep.standardizer), std::move(history)};
}

std::vector<double> predict(const NetParams& params, const Standardizer& st,
                            const Matrix& X) {
    if (X.cols() != st.mean.size()) {
        throw ShapeError("predict: input " + X.shape_str() + " vs standardizer with " +
                         std::to_string(st.mean.size()) + " features");
    }
    Matrix standardized = X;
    for (std::size_t r = 0; r < standardized.rows(); ++r) {
        auto row = standardized.row(r);
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = (row[j] - st.mean[j]) / st.scale[j];
    }
    return class_scores(params, standardized);
}

double domain_probe_accuracy(const NetParams& params, const Standardizer& st,
                             const Dataset& control_source, const Dataset& control_target,
                             std::uint64_t seed) {
    const Dataset src_s = apply_standardizer(st, control_source);
    const Dataset tgt_s = apply_standardizer(st, control_target);
    const Matrix hidden_src = forward(params, src_s.features).hidden;
    const Matrix hidden_tgt = forward(params, tgt_s.features).hidden;

    const std::size_t n = hidden_src.rows() + hidden_tgt.rows();
    const std::size_t h = params.hidden_dim();
    Matrix features(n, h);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < hidden_src.rows(); ++i) {
        std::copy(hidden_src.row(i).begin(), hidden_src.row(i).end(), features.row(i).begin());
        labels[i] = 0;
    }
    for (std::size_t i = 0; i < hidden_tgt.rows(); ++i) {
        const std::size_t r = hidden_src.rows() + i;
        std::copy(hidden_tgt.row(i).begin(), hidden_tgt.row(i).end(), features.row(r).begin());
        labels[r] = 1;
    }

    Rng rng(seed);
    const auto perm = rng.permutation(n);
    const std::size_t n_fit = n / 2;
    Matrix fit_x(n_fit, h), eval_x(n - n_fit, h);
    std::vector<int> fit_y(n_fit), eval_y(n - n_fit);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src_row = features.row(perm[i]);
        if (i < n_fit) {
            std::copy(src_row.begin(), src_row.end(), fit_x.row(i).begin());
            fit_y[i] = labels[perm[i]];
        } else {
            std::copy(src_row.begin(), src_row.end(), eval_x.row(i - n_fit).begin());
            eval_y[i - n_fit] = labels[perm[i]];
        }
    }

    // Softmax regression head, zero init, 200 full-batch Adam steps.
    Matrix w(h, 2, 0.0);
    std::vector<double> b(2, 0.0);
    Matrix mw(h, 2, 0.0), vw(h, 2, 0.0);
    std::vector<double> mb(2, 0.0), vb(2, 0.0);
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const auto n_fit_d = static_cast<double>(n_fit);
    for (int step = 1; step <= 200; ++step) {
        Matrix logits = add_row_broadcast(matmul(fit_x, w), b);
        Matrix d_logits(n_fit, 2);
        for (std::size_t i = 0; i < n_fit; ++i) {
            const double mx = std::max(logits.at(i, 0), logits.at(i, 1));
            const double e0 = std::exp(logits.at(i, 0) - mx);
            const double e1 = std::exp(logits.at(i, 1) - mx);
            const double p1 = e1 / (e0 + e1);
            d_logits.at(i, 0) = ((1.0 - p1) - (fit_y[i] == 0 ? 1.0 : 0.0)) / n_fit_d;
            d_logits.at(i, 1) = (p1 - (fit_y[i] == 1 ? 1.0 : 0.0)) / n_fit_d;
        }
        const Matrix gw = matmul(transpose(fit_x), d_logits);
        const std::vector<double> gb = col_sum(d_logits);
        const double corr1 = 1.0 - std::pow(b1, step);
        const double corr2 = 1.0 - std::pow(b2, step);
        for (std::size_t i = 0; i < w.size(); ++i) {
            double& m = mw.data()[i];
            double& v = vw.data()[i];
            m = b1 * m + (1.0 - b1) * gw.data()[i];
            v = b2 * v + (1.0 - b2) * gw.data()[i] * gw.data()[i];
            w.data()[i] -= lr * (m / corr1) / (std::sqrt(v / corr2) + eps);
        }
        for (std::size_t i = 0; i < 2; ++i) {
            mb[i] = b1 * mb[i] + (1.0 - b1) * gb[i];
            vb[i] = b2 * vb[i] + (1.0 - b2) * gb[i] * gb[i];
            b[i] -= lr * (mb[i] / corr1) / (std::sqrt(vb[i] / corr2) + eps);
        }
    }

    const Matrix logits = add_row_broadcast(matmul(eval_x, w), b);
    std::vector<double> probs(eval_y.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double mx = std::max(logits.at(i, 0), logits.at(i, 1));
        const double e0 = std::exp(logits.at(i, 0) - mx);
        const double e1 = std::exp(logits.at(i, 1) - mx);
        probs[i] = e1 / (e0 + e1);
    }
    return accuracy(probs, eval_y);
}

void write_history_csv(const std::string& path, const History& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path + "'");
    const bool with_domain = history.model == "dann";
    out << "epoch,train_accuracy,test_accuracy,class_loss";
    if (with_domain) out << ",domain_loss";
    out << ",lambda\n";
    for (const auto& rec : history.records) {
        out << rec.epoch << ',' << format_double(rec.train_accuracy) << ','
            << format_double(rec.test_accuracy) << ',' << format_double(rec.class_loss);
        if (with_domain) out << ',' << format_double(rec.domain_loss.value_or(0.0));
        out << ',' << format_double(rec.lambda) << '\n';
    }
}

void write_history_json(const std::string& path, const History& history) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : history.records) {
        nlohmann::json row{{"epoch", rec.epoch},
                           {"train_accuracy", rec.train_accuracy},
                           {"test_accuracy", rec.test_accuracy},
                           {"class_loss", rec.class_loss},
                           {"lambda", rec.lambda}};
        if (rec.domain_loss) row["domain_loss"] = *rec.domain_loss;
        records.push_back(std::move(row));
    }
    nlohmann::json doc{{"model", history.model}, {"records", std::move(records)}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

History read_history_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    History history;
    try {
        history.model = doc.at("model").get<std::string>();
        for (const auto& row : doc.at("records")) {
            HistoryRecord rec;
            rec.epoch = row.at("epoch").get<std::size_t>();
            rec.train_accuracy = row.at("train_accuracy").get<double>();
            rec.test_accuracy = row.at("test_accuracy").get<double>();
            rec.class_loss = row.at("class_loss").get<double>();
            rec.lambda = row.at("lambda").get<double>();
            if (row.contains("domain_loss")) rec.domain_loss = row["domain_loss"].get<double>();
            history.records.push_back(rec);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': malformed history: " + e.what());
    }
    return history;
}

}  // namespace simreal
