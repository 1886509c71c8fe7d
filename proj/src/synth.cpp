#include "simreal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "simreal/errors.hpp"
#include "simreal/rng.hpp"

namespace simreal {

namespace {

// Scenario geometry. The class mixture sits at +/- kSeparation along the
// class direction; the logistic labeling rule is kLabelSharpness times that
// direction; the covariate translation direction overlaps the class direction
// by kShiftClassOverlap; the control channel's mixture direction overlaps it
// by kControlClassOverlap. Scaling multiplies the first half of the features
// by 1 + kScaleSlope * magnitude.
constexpr double kSeparation = 2.25;
constexpr double kLabelSharpness = 6.0;
constexpr double kShiftClassOverlap = 0.5;
constexpr double kControlClassOverlap = 0.6;
constexpr double kScaleSlope = 0.05;
constexpr int kWeightGammaShape = 4;
constexpr double kWeightGammaScale = 0.25;

std::vector<double> normalize(std::vector<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

// Unit direction from `raw` orthogonalized against previously built ones.
std::vector<double> orthonormal_against(std::vector<double> raw,
                                        const std::vector<std::vector<double>>& basis) {
    for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t j = 0; j < raw.size(); ++j) dot += raw[j] * b[j];
        for (std::size_t j = 0; j < raw.size(); ++j) raw[j] -= dot * b[j];
    }
    return normalize(std::move(raw));
}

struct Geometry {
    std::vector<double> class_dir;    // process-of-interest mixture axis
    std::vector<double> control_dir;  // rotated control mixture axis
    std::vector<double> label_rule;   // logistic weights, shared across domains
    std::vector<double> shift_dir;    // covariate translation direction

    explicit Geometry(std::size_t d) {
        class_dir = normalize(std::vector<double>(d, 1.0));
        std::vector<double> e0(d, 0.0), e1(d, 0.0);
        e0[0] = 1.0;
        e1[1] = 1.0;
        const auto perp0 = orthonormal_against(e0, {class_dir});
        const auto perp1 = orthonormal_against(e1, {class_dir, perp0});

        shift_dir.resize(d);
        control_dir.resize(d);
        const double sin_shift = std::sqrt(1.0 - kShiftClassOverlap * kShiftClassOverlap);
        const double sin_ctrl = std::sqrt(1.0 - kControlClassOverlap * kControlClassOverlap);
        for (std::size_t j = 0; j < d; ++j) {
            shift_dir[j] = kShiftClassOverlap * class_dir[j] + sin_shift * perp0[j];
            control_dir[j] = kControlClassOverlap * class_dir[j] + sin_ctrl * perp1[j];
        }
        label_rule.resize(d);
        for (std::size_t j = 0; j < d; ++j) label_rule[j] = kLabelSharpness * class_dir[j];
    }
};

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Schema process_schema(std::size_t d, bool with_label, bool with_weight) {
    Schema s;
    s.feature_columns.reserve(d);
    for (std::size_t j = 0; j < d; ++j) s.feature_columns.push_back("f" + std::to_string(j));
    if (with_label) s.label_column = "signal";
    if (with_weight) s.weight_column = "weight";
    return s;
}

struct SampleSpec {
    std::size_t n = 0;
    const std::vector<double>* mixture_dir = nullptr;
    double signal_fraction = 0.5;
    bool transform = false;       // apply the domain transform (target side)
    bool labeled = false;
    double flip_fraction = 0.0;   // concept shift: labeling rule negated
};

Dataset draw_sample(const SampleSpec& spec, const Geometry& geo,
                    const DomainTransform& transform, Domain domain, Rng& rng) {
    const std::size_t d = geo.class_dir.size();
    Dataset ds;
    ds.features = Matrix(spec.n, d);
    ds.domain = domain;
    ds.schema = process_schema(d, spec.labeled, false);
    if (spec.labeled) ds.labels.emplace(spec.n, 0);

    for (std::size_t i = 0; i < spec.n; ++i) {
        const bool component = rng.next_double() < spec.signal_fraction;
        const double side = component ? 1.0 : -1.0;
        auto row = ds.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            row[j] = side * kSeparation * (*spec.mixture_dir)[j] + rng.next_normal();
        }
        if (spec.transform) transform.apply_row(row);
        if (spec.labeled) {
            double logit = 0.0;
            for (std::size_t j = 0; j < d; ++j) logit += geo.label_rule[j] * row[j];
            if (spec.flip_fraction > 0.0 && rng.next_double() < spec.flip_fraction) {
                logit = -logit;  // concept shift: rule inverted for this subpopulation
            }
            (*ds.labels)[i] = rng.next_double() < sigmoid(logit) ? 1 : 0;
        }
    }
    return ds;
}

}  // namespace

ScenarioKind scenario_kind_from_string(const std::string& s) {
    if (s == "none") return ScenarioKind::none;
    if (s == "prior_shift") return ScenarioKind::prior_shift;
    if (s == "covariate_shift") return ScenarioKind::covariate_shift;
    if (s == "concept_shift") return ScenarioKind::concept_shift;
    throw ConfigError("unknown scenario kind '" + s +
                      "' (expected none, prior_shift, covariate_shift or concept_shift)");
}

std::string scenario_kind_name(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::none: return "none";
        case ScenarioKind::prior_shift: return "prior_shift";
        case ScenarioKind::covariate_shift: return "covariate_shift";
        case ScenarioKind::concept_shift: return "concept_shift";
    }
    throw ConfigError("invalid scenario kind value");
}

void ScenarioConfig::validate() const {
    if (d < 3) throw ConfigError("scenario: d must be >= 3, got " + std::to_string(d));
    for (auto [n, name] : {std::pair{n_source, "n_source"}, {n_target, "n_target"},
                           {n_control_source, "n_control_source"},
                           {n_control_target, "n_control_target"}}) {
        if (n < 2) throw ConfigError(std::string("scenario: ") + name + " must be >= 2");
    }
    if (!(shift_magnitude >= 0.0))
        throw ConfigError("scenario: shift_magnitude must be >= 0");
    if (!(source_signal_fraction > 0.0 && source_signal_fraction < 1.0))
        throw ConfigError("scenario: source_signal_fraction must be in (0,1)");
    if (!(target_signal_fraction > 0.0 && target_signal_fraction < 1.0))
        throw ConfigError("scenario: target_signal_fraction must be in (0,1)");
}

bool DomainTransform::is_identity() const {
    for (double s : scale)
        if (s != 1.0) return false;
    for (double t : translation)
        if (t != 0.0) return false;
    return true;
}

void DomainTransform::apply_row(std::span<double> x) const {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = scale[j] * x[j] + translation[j];
}

ScenarioBundle generate(const ScenarioConfig& cfg) {
    cfg.validate();
    const std::size_t d = cfg.d;
    const Geometry geo(d);

    // kind=none is covariate shift of magnitude zero; prior and concept
    // shifts leave the feature map untouched.
    const double magnitude =
        cfg.kind == ScenarioKind::covariate_shift ? cfg.shift_magnitude : 0.0;
    DomainTransform transform;
    transform.scale.assign(d, 1.0);
    transform.translation.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (j < d / 2) transform.scale[j] = 1.0 + kScaleSlope * magnitude;
        transform.translation[j] = magnitude * geo.shift_dir[j];
    }

    const double target_fraction = cfg.kind == ScenarioKind::prior_shift
                                       ? cfg.target_signal_fraction
                                       : cfg.source_signal_fraction;
    const double flip_fraction =
        cfg.kind == ScenarioKind::concept_shift ? std::clamp(cfg.shift_magnitude, 0.0, 1.0)
                                                : 0.0;

    Rng root(cfg.seed);
    Rng rng_source = root.fork();
    Rng rng_target = root.fork();
    Rng rng_ctrl_source = root.fork();
    Rng rng_ctrl_target = root.fork();
    Rng rng_weights = root.fork();

    ScenarioBundle bundle;
    bundle.truth = cfg;
    bundle.transform = transform;

    SampleSpec spec;
    spec.mixture_dir = &geo.class_dir;
    spec.labeled = true;

    spec.n = cfg.n_source;
    spec.signal_fraction = cfg.source_signal_fraction;
    spec.transform = false;
    bundle.source = draw_sample(spec, geo, transform, Domain::source, rng_source);

    spec.n = cfg.n_target;
    spec.signal_fraction = target_fraction;
    spec.transform = true;
    spec.flip_fraction = flip_fraction;
    bundle.target = draw_sample(spec, geo, transform, Domain::target, rng_target);
    spec.flip_fraction = 0.0;

    spec.mixture_dir = &geo.control_dir;
    spec.labeled = false;
    spec.signal_fraction = 0.5;

    spec.n = cfg.n_control_source;
    spec.transform = false;
    bundle.control_source =
        draw_sample(spec, geo, transform, Domain::source, rng_ctrl_source);

    spec.n = cfg.n_control_target;
    spec.transform = true;
    bundle.control_target =
        draw_sample(spec, geo, transform, Domain::target, rng_ctrl_target);

    bundle.control_target.schema.weight_column = "weight";
    bundle.control_target.weights.emplace(cfg.n_control_target);
    for (double& w : *bundle.control_target.weights) {
        w = rng_weights.next_gamma_int(kWeightGammaShape, kWeightGammaScale);
    }
    return bundle;
}

std::vector<double> scenario_label_rule(const ScenarioConfig& cfg, Domain) {
    // One rule vector for every domain: p(y|x) is shared by construction.
    // concept_shift negates it per-row at draw time, never per-domain.
    return Geometry(cfg.d).label_rule;
}

std::vector<double> scenario_shift_dir(const ScenarioConfig& cfg) {
    return Geometry(cfg.d).shift_dir;
}

nlohmann::json scenario_config_to_json(const ScenarioConfig& cfg) {
    return nlohmann::json{{"kind", scenario_kind_name(cfg.kind)},
                          {"d", cfg.d},
                          {"n_source", cfg.n_source},
                          {"n_target", cfg.n_target},
                          {"n_control_source", cfg.n_control_source},
                          {"n_control_target", cfg.n_control_target},
                          {"shift_magnitude", cfg.shift_magnitude},
                          {"source_signal_fraction", cfg.source_signal_fraction},
                          {"target_signal_fraction", cfg.target_signal_fraction},
                          {"seed", cfg.seed}};
}

void write_bundle(const std::string& dir, const ScenarioBundle& bundle) {
    save_csv(dir + "/source.csv", bundle.source);
    save_csv(dir + "/target.csv", bundle.target);
    save_csv(dir + "/control_source.csv", bundle.control_source);
    save_csv(dir + "/control_target.csv", bundle.control_target);

    nlohmann::json truth;
    truth["config"] = scenario_config_to_json(bundle.truth);
    truth["transform"] = {{"scale", bundle.transform.scale},
                          {"translation", bundle.transform.translation}};
    std::ofstream out(dir + "/truth.json", std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + dir + "/truth.json'");
    out << truth.dump(2) << '\n';
}

}  // namespace simreal
