#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simreal/checkpoint.hpp"
#include "simreal/dataset.hpp"
#include "simreal/errors.hpp"
#include "simreal/num_format.hpp"
#include "simreal/run_config.hpp"
#include "simreal/stats.hpp"
#include "simreal/synth.hpp"
#include "simreal/train.hpp"

namespace fs = std::filesystem;
using namespace simreal;

namespace {

// Column subset a given file role is expected to carry: labeled splits have
// the label column, the weighted control file has the weight column, plain
// control files have features only.
Schema role_schema(const Schema& base, bool with_label, bool with_weight) {
    Schema s;
    s.feature_columns = base.feature_columns;
    if (with_label) s.label_column = base.label_column;
    if (with_weight) s.weight_column = base.weight_column;
    s.id_column = base.id_column;
    return s;
}

bool header_has_column(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open \"" + path + "\"");
    std::string header;
    if (!std::getline(in, header)) throw ParseError("\"" + path + "\" is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::stringstream ss(header);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell == column) return true;
    }
    return false;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open \"" + path + "\" for writing");
    out << content;
    if (!out) throw ParseError("failed writing \"" + path + "\"");
}

// 50 equal-width bins over [0, 1]; scores of exactly 1 land in the last bin.
// Each density column integrates to one: sum(density * width) = 1.
constexpr std::size_t kHistBins = 50;

std::vector<double> bin_densities(const WeightedSample& s) {
    std::vector<double> mass(kHistBins, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < s.scores.size(); ++i) {
        double x = s.scores[i];
        auto bin = static_cast<std::size_t>(x * kHistBins);
        if (bin >= kHistBins) bin = kHistBins - 1;
        mass[bin] += s.weights[i];
        total += s.weights[i];
    }
    const double width = 1.0 / kHistBins;
    for (double& m : mass) m /= total * width;
    return mass;
}

void write_histogram_csv(const std::string& path, const WeightedSample& src,
                         const WeightedSample& tgt) {
    std::vector<double> ds = bin_densities(src);
    std::vector<double> dt = bin_densities(tgt);
    std::ostringstream out;
    out << "bin_low,bin_high,density_source,density_target\n";
    for (std::size_t k = 0; k < kHistBins; ++k) {
        out << format_double(static_cast<double>(k) / kHistBins) << ','
            << format_double(static_cast<double>(k + 1) / kHistBins) << ','
            << format_double(ds[k]) << ',' << format_double(dt[k]) << '\n';
    }
    write_text_file(path, out.str());
}

int cmd_synth(const RunConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    ScenarioBundle bundle = generate(cfg.scenario);
    write_bundle(cfg.output_dir, bundle);
    std::cout << "scenario=" << scenario_kind_name(cfg.scenario.kind)
              << " d=" << cfg.scenario.d << " seed=" << cfg.scenario.seed << " wrote "
              << cfg.output_dir << "/{source,target,control_source,control_target}.csv"
              << " and truth.json\n";
    return 0;
}

int cmd_train(const RunConfig& cfg, const std::string& model) {
    if (cfg.paths.source.empty()) {
        throw ConfigError("paths.source is required for train");
    }
    Schema base = effective_schema(cfg);
    if (!base.label_column) {
        throw ConfigError("schema.label_column is required for train");
    }
    Dataset labeled = load_csv(cfg.paths.source, role_schema(base, true, false), Domain::source);

    TrainResult result;
    if (model == "dann") {
        if (cfg.paths.control_source.empty() || cfg.paths.control_target.empty()) {
            throw ConfigError(
                "model=dann requires paths.control_source and paths.control_target");
        }
        Dataset control_source = load_csv(cfg.paths.control_source,
                                          role_schema(base, false, false), Domain::source);
        bool weighted = base.weight_column &&
                        header_has_column(cfg.paths.control_target, *base.weight_column);
        Dataset control_target = load_csv(cfg.paths.control_target,
                                          role_schema(base, false, weighted), Domain::target);
        result = train_dann(cfg.train, labeled, control_source, control_target);
    } else {
        result = train_nn(cfg.train, labeled);
    }

    fs::create_directories(cfg.output_dir);
    Checkpoint ckpt{result.params, result.standardizer, base.feature_columns};
    save_checkpoint(cfg.output_dir + "/checkpoint.json", ckpt);
    write_history_csv(cfg.output_dir + "/history.csv", result.history);
    write_history_json(cfg.output_dir + "/history.json", result.history);

    const HistoryRecord& last = result.history.records.back();
    std::cout << "model=" << model << " epochs=" << cfg.train.epochs;
    if (model == "dann") {
        std::cout << " lambda_mode=" << lambda_mode_name(cfg.train.lambda_mode)
                  << " lambda_value=" << format_double(cfg.train.lambda_value);
    }
    std::cout << " final_test_accuracy=" << format_double(last.test_accuracy) << "\n";

    if (!cfg.paths.target.empty() && header_has_column(cfg.paths.target, *base.label_column)) {
        Dataset target = load_csv(cfg.paths.target, role_schema(base, true, false),
                                  Domain::target);
        std::vector<double> probs = predict(result.params, result.standardizer,
                                            target.features);
        std::cout << "target_test_accuracy=" << format_double(accuracy(probs, *target.labels))
                  << "\n";
    }
    return 0;
}

int cmd_agreement(const RunConfig& cfg, const std::string& checkpoint_path) {
    if (cfg.paths.control_source.empty() || cfg.paths.control_target.empty()) {
        throw ConfigError("agreement requires paths.control_source and paths.control_target");
    }
    Checkpoint ckpt = load_checkpoint(checkpoint_path);
    Schema base = effective_schema(cfg);
    if (schema_fingerprint(base.feature_columns) != ckpt.fingerprint()) {
        throw MismatchError("feature columns do not match the checkpoint schema fingerprint");
    }

    Dataset control_source = load_csv(cfg.paths.control_source,
                                      role_schema(base, false, false), Domain::source);
    bool weighted = base.weight_column &&
                    header_has_column(cfg.paths.control_target, *base.weight_column);
    Dataset control_target = load_csv(cfg.paths.control_target,
                                      role_schema(base, false, weighted), Domain::target);

    std::vector<double> src_scores = predict(ckpt.params, ckpt.standardizer,
                                             control_source.features);
    std::vector<double> tgt_scores = predict(ckpt.params, ckpt.standardizer,
                                             control_target.features);
    WeightedSample src = WeightedSample::unweighted(std::move(src_scores));
    WeightedSample tgt = control_target.weights
                             ? WeightedSample::weighted(std::move(tgt_scores),
                                                        *control_target.weights)
                             : WeightedSample::unweighted(std::move(tgt_scores));

    KSReport report = agreement_check(src, tgt, cfg.agreement_threshold);
    fs::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/agreement.json", agreement_to_json(report).dump(2) + "\n");
    write_histogram_csv(cfg.output_dir + "/histogram.csv", src, tgt);

    std::cout << "ks_statistic=" << format_double(report.statistic)
              << " threshold=" << format_double(report.threshold)
              << (report.pass ? " PASS" : " FAIL") << "\n";
    return report.pass ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& history_paths, const std::string& out_path) {
    std::ostringstream out;
    out << "model,epoch,metric,value\n";
    for (const std::string& path : history_paths) {
        History h = read_history_json(path);
        for (const HistoryRecord& rec : h.records) {
            auto emit = [&](const char* metric, double value) {
                out << h.model << ',' << rec.epoch << ',' << metric << ','
                    << format_double(value) << '\n';
            };
            emit("train_accuracy", rec.train_accuracy);
            emit("test_accuracy", rec.test_accuracy);
            emit("class_loss", rec.class_loss);
            if (rec.domain_loss) emit("domain_loss", *rec.domain_loss);
            emit("lambda", rec.lambda);
        }
    }
    fs::path parent = fs::path(out_path).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    write_text_file(out_path, out.str());
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

struct ScenarioFlags {
    std::string kind;
    std::size_t d = 0, n_source = 0, n_target = 0, n_control_source = 0, n_control_target = 0;
    double magnitude = 0.0, source_fraction = 0.0, target_fraction = 0.0;
    std::uint64_t seed = 0;
};

struct TrainFlags {
    std::string model;
    std::size_t epochs = 0, batch_size = 0, hidden = 0, domain_batch_size = 0;
    double lambda_value = 0.0, lr = 0.0, train_fraction = 0.0;
    std::string lambda_mode;
    bool use_domain_weights = false;
    std::uint64_t seed = 0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sim-to-real domain adaptation toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string checkpoint_path;
    std::string report_out = "curves.csv";
    double threshold = 0.0;
    std::vector<std::string> history_paths;
    ScenarioFlags sf;
    TrainFlags tf;

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic shift scenario");
    synth->add_option("--config", config_path, "run config JSON")->required();
    synth->add_option("--out", out_dir, "output directory (overrides output_dir)");
    synth->add_option("--kind", sf.kind, "scenario kind");
    synth->add_option("--seed", sf.seed, "scenario seed");
    synth->add_option("--magnitude", sf.magnitude, "shift magnitude");
    synth->add_option("--d", sf.d, "feature count");
    synth->add_option("--n-source", sf.n_source, "labeled source rows");
    synth->add_option("--n-target", sf.n_target, "target rows");
    synth->add_option("--n-control-source", sf.n_control_source, "control source rows");
    synth->add_option("--n-control-target", sf.n_control_target, "control target rows");
    synth->add_option("--source-fraction", sf.source_fraction, "source signal fraction");
    synth->add_option("--target-fraction", sf.target_fraction, "target signal fraction");

    CLI::App* train = app.add_subcommand("train", "train the plain NN or the DANN");
    train->add_option("--config", config_path, "run config JSON")->required();
    train->add_option("--model", tf.model, "nn or dann")
        ->required()
        ->check(CLI::IsMember({"nn", "dann"}));
    train->add_option("--out", out_dir, "output directory (overrides output_dir)");
    train->add_option("--epochs", tf.epochs, "training epochs");
    train->add_option("--batch-size", tf.batch_size, "class batch size");
    train->add_option("--hidden", tf.hidden, "hidden layer width");
    train->add_option("--lambda", tf.lambda_value, "gradient reversal strength");
    train->add_option("--lambda-mode", tf.lambda_mode, "constant or ganin_schedule");
    train->add_option("--domain-batch-size", tf.domain_batch_size, "domain batch size");
    train->add_option("--lr", tf.lr, "Adam learning rate");
    train->add_option("--train-fraction", tf.train_fraction, "train split fraction");
    train->add_option("--use-domain-weights", tf.use_domain_weights,
                      "weight the domain loss by control weights");
    train->add_option("--seed", tf.seed, "training seed");

    CLI::App* agreement = app.add_subcommand("agreement", "run the sim/real agreement gate");
    agreement->add_option("--config", config_path, "run config JSON")->required();
    agreement->add_option("--checkpoint", checkpoint_path, "trained checkpoint JSON")->required();
    agreement->add_option("--out", out_dir, "output directory (overrides output_dir)");
    agreement->add_option("--threshold", threshold, "agreement threshold");

    CLI::App* report = app.add_subcommand("report", "merge history files into a curves CSV");
    report->add_option("--out", report_out, "output CSV path");
    report->add_option("files", history_paths, "history JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (report->parsed()) return cmd_report(history_paths, report_out);

        RunConfig cfg = load_run_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        if (synth->parsed()) {
            if (synth->count("--kind")) cfg.scenario.kind = scenario_kind_from_string(sf.kind);
            if (synth->count("--seed")) cfg.scenario.seed = sf.seed;
            if (synth->count("--magnitude")) cfg.scenario.shift_magnitude = sf.magnitude;
            if (synth->count("--d")) cfg.scenario.d = sf.d;
            if (synth->count("--n-source")) cfg.scenario.n_source = sf.n_source;
            if (synth->count("--n-target")) cfg.scenario.n_target = sf.n_target;
            if (synth->count("--n-control-source"))
                cfg.scenario.n_control_source = sf.n_control_source;
            if (synth->count("--n-control-target"))
                cfg.scenario.n_control_target = sf.n_control_target;
            if (synth->count("--source-fraction"))
                cfg.scenario.source_signal_fraction = sf.source_fraction;
            if (synth->count("--target-fraction"))
                cfg.scenario.target_signal_fraction = sf.target_fraction;
            cfg.scenario.validate();
            return cmd_synth(cfg);
        }
        if (train->parsed()) {
            if (train->count("--epochs")) cfg.train.epochs = tf.epochs;
            if (train->count("--batch-size")) cfg.train.batch_size = tf.batch_size;
            if (train->count("--hidden")) cfg.train.hidden = tf.hidden;
            if (train->count("--lambda")) cfg.train.lambda_value = tf.lambda_value;
            if (train->count("--lambda-mode"))
                cfg.train.lambda_mode = lambda_mode_from_string(tf.lambda_mode);
            if (train->count("--domain-batch-size"))
                cfg.train.domain_batch_size = tf.domain_batch_size;
            if (train->count("--lr")) cfg.train.adam.lr = tf.lr;
            if (train->count("--train-fraction")) cfg.train.train_fraction = tf.train_fraction;
            if (train->count("--use-domain-weights"))
                cfg.train.use_domain_weights = tf.use_domain_weights;
            if (train->count("--seed")) cfg.train.seed = tf.seed;
            return cmd_train(cfg, tf.model);
        }
        if (agreement->parsed()) {
            if (agreement->count("--threshold")) {
                if (!(threshold > 0.0)) throw ConfigError("threshold must be positive");
                cfg.agreement_threshold = threshold;
            }
            return cmd_agreement(cfg, checkpoint_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const MismatchError& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return 4;
    } catch (const ShapeError& e) {
        std::cerr << "mismatch: " << e.what() << "\n";
        return 4;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
