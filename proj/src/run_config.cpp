#include "simreal/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "json.hpp"
#include "simreal/errors.hpp"

namespace simreal {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown config key \"" + prefix + it.key() + "\"");
        }
    }
}

const json& expect_object(const json& j, const std::string& name) {
    if (!j.is_object()) throw ConfigError("config section \"" + name + "\" must be an object");
    return j;
}

double get_number(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(std::string("config key \"") + key + "\" must be a number");
    return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key, std::size_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("config key \"") + key + "\" must be a non-negative integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
}

std::uint64_t get_seed(const json& obj, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigError(std::string("config key \"") + key + "\" must be a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(std::string("config key \"") + key + "\" must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, const char* key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) throw ConfigError(std::string("config key \"") + key + "\" must be a boolean");
    return v.get<bool>();
}

void parse_schema(const json& j, Schema& schema) {
    expect_object(j, "schema");
    reject_unknown(j, "schema.", {"feature_columns", "label_column", "weight_column", "id_column"});
    if (!j.contains("feature_columns")) {
        throw ConfigError("schema.feature_columns is required when a schema section is given");
    }
    const json& cols = j.at("feature_columns");
    if (!cols.is_array() || cols.empty()) {
        throw ConfigError("schema.feature_columns must be a non-empty array of column names");
    }
    schema.feature_columns.clear();
    for (const json& c : cols) {
        if (!c.is_string()) throw ConfigError("schema.feature_columns entries must be strings");
        schema.feature_columns.push_back(c.get<std::string>());
    }
    if (j.contains("label_column")) schema.label_column = get_string(j, "label_column", "");
    if (j.contains("weight_column")) schema.weight_column = get_string(j, "weight_column", "");
    if (j.contains("id_column")) schema.id_column = get_string(j, "id_column", "");
    schema.validate();
}

void parse_paths(const json& j, RunConfig::Paths& paths) {
    expect_object(j, "paths");
    reject_unknown(j, "paths.", {"source", "target", "control_source", "control_target"});
    paths.source = get_string(j, "source", paths.source);
    paths.target = get_string(j, "target", paths.target);
    paths.control_source = get_string(j, "control_source", paths.control_source);
    paths.control_target = get_string(j, "control_target", paths.control_target);
}

void parse_train(const json& j, TrainConfig& t) {
    expect_object(j, "train");
    reject_unknown(j, "train.",
                   {"hidden", "batch_size", "epochs", "train_fraction", "lr", "beta1", "beta2",
                    "epsilon", "lambda_mode", "lambda_value", "domain_batch_size",
                    "use_domain_weights", "seed"});
    t.hidden = get_count(j, "hidden", t.hidden);
    t.batch_size = get_count(j, "batch_size", t.batch_size);
    t.epochs = get_count(j, "epochs", t.epochs);
    t.train_fraction = get_number(j, "train_fraction", t.train_fraction);
    t.adam.lr = get_number(j, "lr", t.adam.lr);
    t.adam.beta1 = get_number(j, "beta1", t.adam.beta1);
    t.adam.beta2 = get_number(j, "beta2", t.adam.beta2);
    t.adam.epsilon = get_number(j, "epsilon", t.adam.epsilon);
    if (j.contains("lambda_mode")) {
        t.lambda_mode = lambda_mode_from_string(get_string(j, "lambda_mode", ""));
    }
    t.lambda_value = get_number(j, "lambda_value", t.lambda_value);
    t.domain_batch_size = get_count(j, "domain_batch_size", t.domain_batch_size);
    t.use_domain_weights = get_bool(j, "use_domain_weights", t.use_domain_weights);
    t.seed = get_seed(j, "seed", t.seed);
}

void parse_scenario(const json& j, ScenarioConfig& s) {
    expect_object(j, "scenario");
    reject_unknown(j, "scenario.",
                   {"kind", "d", "n_source", "n_target", "n_control_source", "n_control_target",
                    "shift_magnitude", "source_signal_fraction", "target_signal_fraction", "seed"});
    if (j.contains("kind")) s.kind = scenario_kind_from_string(get_string(j, "kind", ""));
    s.d = get_count(j, "d", s.d);
    s.n_source = get_count(j, "n_source", s.n_source);
    s.n_target = get_count(j, "n_target", s.n_target);
    s.n_control_source = get_count(j, "n_control_source", s.n_control_source);
    s.n_control_target = get_count(j, "n_control_target", s.n_control_target);
    s.shift_magnitude = get_number(j, "shift_magnitude", s.shift_magnitude);
    s.source_signal_fraction = get_number(j, "source_signal_fraction", s.source_signal_fraction);
    s.target_signal_fraction = get_number(j, "target_signal_fraction", s.target_signal_fraction);
    s.seed = get_seed(j, "seed", s.seed);
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file \"" + path + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config file \"" + path + "\" is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    reject_unknown(j, "", {"schema", "paths", "train", "scenario", "agreement", "output_dir"});

    RunConfig cfg;
    if (j.contains("scenario")) parse_scenario(j.at("scenario"), cfg.scenario);
    if (j.contains("schema")) {
        parse_schema(j.at("schema"), cfg.schema);
        cfg.schema_given = true;
    }
    if (j.contains("paths")) parse_paths(j.at("paths"), cfg.paths);
    if (j.contains("train")) parse_train(j.at("train"), cfg.train);
    if (j.contains("agreement")) {
        const json& a = expect_object(j.at("agreement"), "agreement");
        reject_unknown(a, "agreement.", {"threshold"});
        cfg.agreement_threshold = get_number(a, "threshold", cfg.agreement_threshold);
        if (!(cfg.agreement_threshold > 0.0)) {
            throw ConfigError("agreement.threshold must be positive");
        }
    }
    cfg.output_dir = get_string(j, "output_dir", cfg.output_dir);
    if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");

    cfg.scenario.validate();
    return cfg;
}

Schema effective_schema(const RunConfig& cfg) {
    if (cfg.schema_given) return cfg.schema;
    Schema s;
    s.feature_columns.reserve(cfg.scenario.d);
    for (std::size_t k = 0; k < cfg.scenario.d; ++k) {
        s.feature_columns.push_back("f" + std::to_string(k));
    }
    s.label_column = "signal";
    s.weight_column = "weight";
    return s;
}

}  // namespace simreal
