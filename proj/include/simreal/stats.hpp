#pragma once

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace simreal {

// Scores with strictly positive per-example weights (unit if omitted).
struct WeightedSample {
    std::vector<double> scores;
    std::vector<double> weights;

    static WeightedSample unweighted(std::vector<double> scores);
    static WeightedSample weighted(std::vector<double> scores, std::vector<double> weights);

    double total_weight() const;
};

struct KSReport {
    double statistic = 0.0;
    double threshold = 0.09;
    bool pass = false;  // statistic strictly below threshold
    std::size_t n_source = 0;
    std::size_t n_target = 0;
};

// F(x) = (sum of weights with score <= x) / total weight; right-continuous.
double weighted_ecdf(const WeightedSample& s, double x);

// sup |F_a - F_b| over the merged score set. ECDF differences are piecewise
// constant between sample points, so evaluating at every distinct score is
// exact, not an approximation.
double ks_distance(const WeightedSample& a, const WeightedSample& b);

KSReport agreement_check(const WeightedSample& model_scores_source,
                         const WeightedSample& model_scores_target,
                         double threshold = 0.09);

nlohmann::json agreement_to_json(const KSReport& report);

// Fraction of examples where (prob >= cut) equals the label; a probability
// exactly at the cut predicts 1.
double accuracy(const std::vector<double>& probs, const std::vector<int>& labels,
                double cut = 0.5);

}  // namespace simreal
