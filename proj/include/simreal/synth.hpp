#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simreal/dataset.hpp"
#include "json.hpp"

namespace simreal {

enum class ScenarioKind { none, prior_shift, covariate_shift, concept_shift };

ScenarioKind scenario_kind_from_string(const std::string& s);
std::string scenario_kind_name(ScenarioKind kind);

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::covariate_shift;
    std::size_t d = 10;
    std::size_t n_source = 5000;
    std::size_t n_target = 5000;
    std::size_t n_control_source = 2000;
    std::size_t n_control_target = 2000;
    double shift_magnitude = 1.0;
    double source_signal_fraction = 0.5;
    double target_signal_fraction = 0.5;  // prior_shift only
    std::uint64_t seed = 20250;

    void validate() const;
};

// Affine feature-space map x -> scale * x + translation describing how the
// target domain differs from the source. Identity except for covariate
// scenarios. One transform instance serves both the process-of-interest and
// the control channel.
struct DomainTransform {
    std::vector<double> scale;
    std::vector<double> translation;

    bool is_identity() const;
    void apply_row(std::span<double> x) const;
};

struct ScenarioBundle {
    Dataset source;          // labeled, domain=source
    Dataset target;          // domain=target; labels kept for evaluation only
    Dataset control_source;  // unlabeled, domain=source
    Dataset control_target;  // unlabeled + positive weights, domain=target
    ScenarioConfig truth;
    DomainTransform transform;
};

// Draws the four samples of a scenario. Features come from a two-class
// Gaussian mixture (unit covariance, class means +/- delta along a fixed
// direction); labels from a fixed logistic rule evaluated on the observed
// features, so p(y|x) is shared across domains for every kind except
// concept_shift. The control channel uses a rotated mixture direction but the
// identical domain transform. Deterministic: equal configs give equal bundles.
ScenarioBundle generate(const ScenarioConfig& cfg);

// Writes source.csv, target.csv, control_source.csv, control_target.csv and
// truth.json into dir (which must exist).
void write_bundle(const std::string& dir, const ScenarioBundle& bundle);

// The logistic weight vector labels are drawn with: y ~ Bernoulli(sigmoid(w .
// x_observed)). The same vector serves both domains for every kind;
// concept_shift negates it per-row for a random target subpopulation at draw
// time rather than changing the vector.
std::vector<double> scenario_label_rule(const ScenarioConfig& cfg, Domain domain);

// The unit direction the covariate translation acts along (fixed per d).
std::vector<double> scenario_shift_dir(const ScenarioConfig& cfg);

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg);

}  // namespace simreal
