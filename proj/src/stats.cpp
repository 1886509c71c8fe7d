#include "simreal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "simreal/errors.hpp"

namespace simreal {

namespace {

void validate_sample(const WeightedSample& s, const char* who) {
    if (s.scores.empty()) throw ValidationError(std::string(who) + ": empty sample");
    if (s.scores.size() != s.weights.size()) {
        throw ValidationError(std::string(who) + ": " + std::to_string(s.scores.size()) +
                              " scores vs " + std::to_string(s.weights.size()) + " weights");
    }
    double total = 0.0;
    for (double w : s.weights) {
        if (!std::isfinite(w) || w <= 0.0)
            throw ValidationError(std::string(who) + ": weights must be finite and positive");
        total += w;
    }
    if (total <= 0.0) throw ValidationError(std::string(who) + ": zero total weight");
}

// (score, weight) pairs sorted by score with a running cumulative weight.
struct SortedSample {
    std::vector<double> scores;
    std::vector<double> cum_weight;
    double total = 0.0;

    explicit SortedSample(const WeightedSample& s) {
        std::vector<std::size_t> order(s.scores.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return s.scores[a] < s.scores[b];
        });
        scores.reserve(order.size());
        cum_weight.reserve(order.size());
        double acc = 0.0;
        for (std::size_t i : order) {
            acc += s.weights[i];
            scores.push_back(s.scores[i]);
            cum_weight.push_back(acc);
        }
        total = acc;
    }

    // F(x) with ties resolved to the right (<= x).
    double cdf(double x) const {
        const auto it = std::upper_bound(scores.begin(), scores.end(), x);
        if (it == scores.begin()) return 0.0;
        const auto idx = static_cast<std::size_t>(it - scores.begin()) - 1;
        return cum_weight[idx] / total;
    }
};

}  // namespace

WeightedSample WeightedSample::unweighted(std::vector<double> scores) {
    WeightedSample s;
    s.weights.assign(scores.size(), 1.0);
    s.scores = std::move(scores);
    return s;
}

WeightedSample WeightedSample::weighted(std::vector<double> scores,
                                        std::vector<double> weights) {
    WeightedSample s;
    s.scores = std::move(scores);
    s.weights = std::move(weights);
    validate_sample(s, "WeightedSample");
    return s;
}

double WeightedSample::total_weight() const {
    double total = 0.0;
    for (double w : weights) total += w;
    return total;
}

double weighted_ecdf(const WeightedSample& s, double x) {
    validate_sample(s, "weighted_ecdf");
    double hit = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        total += s.weights[i];
        if (s.scores[i] <= x) hit += s.weights[i];
    }
    return hit / total;
}

double ks_distance(const WeightedSample& a, const WeightedSample& b) {
    validate_sample(a, "ks_distance");
    validate_sample(b, "ks_distance");
    const SortedSample sa(a), sb(b);

    // Walk the merged distinct score values; after consuming all ties at a
    // value, both running CDFs sit at their right limits there.
    double max_diff = 0.0;
    std::size_t ia = 0, ib = 0;
    double fa = 0.0, fb = 0.0;
    while (ia < sa.scores.size() || ib < sb.scores.size()) {
        double x;
        if (ib == sb.scores.size() || (ia < sa.scores.size() && sa.scores[ia] <= sb.scores[ib]))
            x = sa.scores[ia];
        else
            x = sb.scores[ib];
        while (ia < sa.scores.size() && sa.scores[ia] == x) {
            fa = sa.cum_weight[ia] / sa.total;
            ++ia;
        }
        while (ib < sb.scores.size() && sb.scores[ib] == x) {
            fb = sb.cum_weight[ib] / sb.total;
            ++ib;
        }
        max_diff = std::max(max_diff, std::abs(fa - fb));
    }
    return max_diff;
}

KSReport agreement_check(const WeightedSample& model_scores_source,
                         const WeightedSample& model_scores_target, double threshold) {
    KSReport report;
    report.statistic = ks_distance(model_scores_source, model_scores_target);
    report.threshold = threshold;
    report.pass = report.statistic < threshold;
    report.n_source = model_scores_source.scores.size();
    report.n_target = model_scores_target.scores.size();
    return report;
}

nlohmann::json agreement_to_json(const KSReport& report) {
    return nlohmann::json{{"statistic", report.statistic},
                          {"threshold", report.threshold},
                          {"pass", report.pass},
                          {"n_source", report.n_source},
                          {"n_target", report.n_target}};
}

double accuracy(const std::vector<double>& probs, const std::vector<int>& labels,
                double cut) {
    if (probs.size() != labels.size()) {
        throw ShapeError("accuracy: " + std::to_string(probs.size()) + " probs vs " +
                         std::to_string(labels.size()) + " labels");
    }
    if (probs.empty()) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const int predicted = probs[i] >= cut ? 1 : 0;
        if (predicted == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(probs.size());
}

}  // namespace simreal
