// Acceptance gate. Each criterion prints exactly one PASS/FAIL/SKIP line
// (indented lines are per-case detail); the process exits non-zero iff any
// criterion failed. Criterion 6 needs the external Kaggle files and is
// reported as skipped when they are absent.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "simreal/dataset.hpp"
#include "simreal/matrix.hpp"
#include "simreal/network.hpp"
#include "simreal/optim.hpp"
#include "simreal/rng.hpp"
#include "simreal/stats.hpp"
#include "simreal/synth.hpp"
#include "simreal/train.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace simreal;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
    std::printf("SKIP criterion %d: %s\n", criterion, detail.c_str());
    std::fflush(stdout);
}

std::string str(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string str(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> column(const Matrix& m, std::size_t j) {
    std::vector<double> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m.at(i, j);
    return out;
}

// --- criterion 1: analytic gradients vs central finite differences ---------

void criterion1() {
    const auto t0 = Clock::now();
    Rng meta(2026);
    double worst = 0.0;
    for (int problem = 0; problem < 20; ++problem) {
        const std::size_t d = 2 + meta.next_below(7);   // 2..8
        const std::size_t h = 1 + meta.next_below(10);  // 1..10
        const std::size_t n = 2 + meta.next_below(15);  // 2..16
        Rng draw = meta.fork();
        NetParams params = init(d, h, draw);
        Matrix X = rand_normal(draw, n, d);
        std::vector<int> cls(n), dom(n);
        std::vector<double> cw(n), dw(n);
        for (std::size_t i = 0; i < n; ++i) {
            cls[i] = static_cast<int>(draw.next_below(2));
            dom[i] = static_cast<int>(draw.next_below(2));
            cw[i] = 0.25 + draw.next_double();
            dw[i] = 0.25 + draw.next_double();
        }
        // Rotate through the three label configurations backward() accepts:
        // joint, class-only, domain-only.
        const int mode = problem % 3;
        const std::vector<int>* pc = mode == 2 ? nullptr : &cls;
        const std::vector<double>* pcw = mode == 2 ? nullptr : &cw;
        const std::vector<int>* pd = mode == 1 ? nullptr : &dom;
        const std::vector<double>* pdw = mode == 1 ? nullptr : &dw;
        for (double lambda : {0.0, 0.5, 1.0}) {
            BackwardResult got = backward(params, X, pc, pcw, pd, pdw, lambda);
            NetTensors fd = oracles::fd_gradients(params, X, pc, pcw, pd, pdw, lambda);
            worst = std::max(worst, oracles::max_rel_err(got.grads, fd));
        }
    }
    const double elapsed = seconds_since(t0);
    report(1, worst < 1e-5 && elapsed < 10.0,
           str("gradients vs finite differences on 20 random problems x 3 lambdas: "
               "max rel err %.2e (need < 1e-5) in %.1fs (need < 10s)",
               worst, elapsed));
}

// --- criterion 2: weighted KS vs exhaustive oracle --------------------------

void criterion2() {
    const auto t0 = Clock::now();
    Rng meta(515);
    auto draw_sample = [&](bool gridded, bool unit_weights) {
        const std::size_t n = 1 + meta.next_below(50);
        std::vector<double> xs(n), ws(n);
        for (std::size_t i = 0; i < n; ++i) {
            // A coarse value grid forces ties within and across samples.
            xs[i] = gridded ? static_cast<double>(meta.next_below(8)) / 7.0
                            : meta.next_double();
            ws[i] = unit_weights ? 1.0 : 0.25 + meta.next_double();
        }
        return std::pair{xs, ws};
    };
    double worst_weighted = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto [xa, wa] = draw_sample(i % 2 == 0, false);
        auto [xb, wb] = draw_sample(i % 3 == 0, false);
        WeightedSample a = WeightedSample::weighted(xa, wa);
        WeightedSample b = WeightedSample::weighted(xb, wb);
        worst_weighted =
            std::max(worst_weighted, std::fabs(ks_distance(a, b) - oracles::ks_exhaustive(a, b)));
    }
    double worst_unit = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto [xa, wa] = draw_sample(i % 2 == 0, true);
        auto [xb, wb] = draw_sample(i % 3 == 0, true);
        const double got = ks_distance(WeightedSample::unweighted(xa),
                                       WeightedSample::unweighted(xb));
        worst_unit = std::max(worst_unit, std::fabs(got - oracles::ks_textbook(xa, xb)));
    }
    const double elapsed = seconds_since(t0);
    report(2, worst_weighted <= 1e-12 && worst_unit <= 1e-12 && elapsed < 5.0,
           str("ks_distance vs exhaustive oracle on 100 weighted + 100 unit-weight "
               "instances: max diff %.2e / %.2e (need <= 1e-12) in %.1fs (need < 5s)",
               worst_weighted, worst_unit, elapsed));
}

// --- criterion 3: Adam vs hand-written recurrence ---------------------------

void criterion3() {
    const std::vector<double> start = {0.5, -0.3, 0.1};
    NetParams params = NetTensors::zeros(3, 1);  // W1 is exactly 3 entries
    params.W1.data() = start;
    AdamState state = AdamState::fresh(params, AdamConfig{});
    oracles::AdamTrace trace(start);
    Rng g(77);
    double worst = 0.0;
    for (int step = 0; step < 100; ++step) {
        std::vector<double> grad(3);
        for (double& v : grad) v = g.next_normal();
        Grads grads = NetTensors::zeros(3, 1);
        grads.W1.data() = grad;
        adam_step(state, params, grads);
        trace.step(grad);
        for (std::size_t i = 0; i < 3; ++i)
            worst = std::max(worst, std::fabs(params.W1.data()[i] - trace.theta[i]));
    }
    // Zero-gradient coordinates must not have moved at all.
    double stray = 0.0;
    auto arrays = params.arrays();
    for (std::size_t a = 1; a < arrays.size(); ++a)
        for (double v : *arrays[a]) stray = std::max(stray, std::fabs(v));
    report(3, worst <= 1e-12 && stray == 0.0,
           str("adam_step vs reference recurrence over 100 steps on a 3-parameter toy: "
               "max param diff %.2e (need <= 1e-12), untouched tensors moved %.1e",
               worst, stray));
}

// --- criterion 4: gradient reversal laws ------------------------------------

void criterion4() {
    Rng r(31);
    Matrix x = rand_normal(r, 7, 5);
    const bool forward_ok = grl_forward(x).data() == x.data();

    bool backward_ok = true;
    for (double lambda : {0.0, 0.5, 1.0, 2.5}) {
        Matrix g = rand_normal(r, 7, 5);
        Matrix back = grl_backward(g, lambda);
        for (std::size_t i = 0; i < g.data().size(); ++i)
            backward_ok = backward_ok && back.data()[i] == g.data()[i] * (-lambda);
    }

    // At lambda = 0 the adversarial run must trace the plain classifier's
    // feature layer exactly.
    ScenarioConfig scfg;
    scfg.d = 6;
    scfg.n_source = 800;
    scfg.n_target = 800;
    scfg.n_control_source = 400;
    scfg.n_control_target = 400;
    scfg.seed = 3;
    ScenarioBundle bundle = generate(scfg);
    TrainConfig cfg;
    cfg.hidden = 12;
    cfg.batch_size = 200;
    cfg.epochs = 5;
    cfg.seed = 5;
    TrainResult nn = train_nn(cfg, bundle.source);
    TrainConfig dcfg = cfg;
    dcfg.lambda_mode = LambdaMode::constant;
    dcfg.lambda_value = 0.0;
    TrainResult dann =
        train_dann(dcfg, bundle.source, bundle.control_source, bundle.control_target);
    double drift = 0.0;
    const auto na = nn.params.arrays();
    const auto da = dann.params.arrays();
    for (std::size_t a = 0; a < 4; ++a)  // W1, b1, Wc, bc
        for (std::size_t i = 0; i < na[a]->size(); ++i)
            drift = std::max(drift, std::fabs((*na[a])[i] - (*da[a])[i]));

    report(4, forward_ok && backward_ok && drift <= 1e-12,
           str("reversal layer: forward identity %s, backward -lambda scaling %s, "
               "lambda=0 five-epoch feature trajectory drift %.2e (need <= 1e-12)",
               forward_ok ? "exact" : "BROKEN", backward_ok ? "exact" : "BROKEN", drift));
}

// --- criterion 5: desk-scale sim-to-real contrast ---------------------------

void criterion5() {
    const auto t0 = Clock::now();
    int direction = 0, nn_fail = 0, dann_pass = 0, acc_ok = 0;
    for (std::uint64_t s = 1; s <= 10; ++s) {
        ScenarioConfig scfg;  // default covariate scenario
        scfg.seed = 1000 + s;
        ScenarioBundle bundle = generate(scfg);

        TrainConfig cfg;
        cfg.batch_size = 500;
        cfg.epochs = 120;
        cfg.adam.lr = 5e-4;
        cfg.seed = s;
        TrainResult nn = train_nn(cfg, bundle.source);

        TrainConfig dcfg = cfg;
        dcfg.lambda_mode = LambdaMode::ganin_schedule;
        dcfg.lambda_value = 10.0;
        TrainResult dann =
            train_dann(dcfg, bundle.source, bundle.control_source, bundle.control_target);

        auto control_ks = [&](const TrainResult& res) {
            std::vector<double> src =
                predict(res.params, res.standardizer, bundle.control_source.features);
            std::vector<double> tgt =
                predict(res.params, res.standardizer, bundle.control_target.features);
            return ks_distance(
                WeightedSample::unweighted(src),
                WeightedSample::weighted(tgt, *bundle.control_target.weights));
        };
        const double nn_ks = control_ks(nn);
        const double dann_ks = control_ks(dann);
        const double nn_acc = nn.history.records.back().test_accuracy;
        const double dann_acc = dann.history.records.back().test_accuracy;
        if (dann_ks < nn_ks) ++direction;
        if (nn_ks >= 0.09) ++nn_fail;
        if (dann_ks < 0.09) ++dann_pass;
        if (nn_acc >= dann_acc - 0.01) ++acc_ok;
        std::printf("  seed %llu: nn_ks=%.4f dann_ks=%.4f nn_acc=%.4f dann_acc=%.4f\n",
                    static_cast<unsigned long long>(s), nn_ks, dann_ks, nn_acc, dann_acc);
        std::fflush(stdout);
    }
    const double elapsed = seconds_since(t0);
    const bool ok = direction >= 9 && dann_pass >= 7 && nn_fail >= 7 && acc_ok >= 8 &&
                    elapsed < 300.0;
    report(5, ok,
           str("10-seed covariate benchmark: dann<nn statistic %d/10 (need >=9), "
               "dann gate pass %d/10 (need >=7), nn gate fail %d/10 (need >=7), "
               "accuracy trade-off %d/10 (need >=8), %.0fs (need < 300s)",
               direction, dann_pass, nn_fail, acc_ok, elapsed));
}

// --- criterion 6: conditional Kaggle reproduction ---------------------------

std::vector<std::string> csv_header(const fs::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    return cols;
}

void criterion6() {
    const char* env = std::getenv("SIMREAL_KAGGLE_DIR");
    const fs::path dir = env ? fs::path(env) : fs::path(SIMREAL_SOURCE_DIR) / "data" / "kaggle";
    const fs::path train_csv = dir / "training.csv";
    const fs::path agree_csv = dir / "check_agreement.csv";
    if (!fs::exists(train_csv) || !fs::exists(agree_csv)) {
        report_skip(6, "tau->3mu reproduction: place training.csv and check_agreement.csv in " +
                           dir.string() + " (or point SIMREAL_KAGGLE_DIR at them)");
        return;
    }

    // Feature set: columns common to both files, minus ids, labels, weights
    // and the training-only physics columns.
    const std::vector<std::string> train_cols = csv_header(train_csv);
    const std::vector<std::string> agree_cols = csv_header(agree_csv);
    const std::vector<std::string> special = {"id",         "signal",    "weight",
                                              "mass",       "production", "min_ANNmuon"};
    std::vector<std::string> features;
    for (const std::string& c : train_cols) {
        if (std::find(special.begin(), special.end(), c) != special.end()) continue;
        if (std::find(agree_cols.begin(), agree_cols.end(), c) == agree_cols.end()) continue;
        features.push_back(c);
    }

    Schema labeled_schema;
    labeled_schema.feature_columns = features;
    labeled_schema.label_column = "signal";
    Dataset labeled = load_csv(train_csv.string(), labeled_schema, Domain::source);

    Schema control_schema = labeled_schema;
    control_schema.weight_column = "weight";
    Dataset agreement = load_csv(agree_csv.string(), control_schema, Domain::source);
    std::vector<std::size_t> sim_rows, real_rows;
    for (std::size_t i = 0; i < agreement.n(); ++i) {
        ((*agreement.labels)[i] == 1 ? sim_rows : real_rows).push_back(i);
    }
    Dataset control_source = agreement.take_rows(sim_rows);
    Dataset control_target = agreement.take_rows(real_rows);
    control_source.labels.reset();
    control_target.labels.reset();
    control_target.domain = Domain::target;

    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.seed = 1;
    TrainResult nn = train_nn(cfg, labeled);
    TrainConfig dcfg = cfg;
    dcfg.lambda_mode = LambdaMode::ganin_schedule;
    dcfg.lambda_value = 10.0;
    dcfg.use_domain_weights = true;
    TrainResult dann = train_dann(dcfg, labeled, control_source, control_target);

    auto control_ks = [&](const TrainResult& res) {
        std::vector<double> src =
            predict(res.params, res.standardizer, control_source.features);
        std::vector<double> tgt =
            predict(res.params, res.standardizer, control_target.features);
        return ks_distance(WeightedSample::weighted(src, *control_source.weights),
                           WeightedSample::weighted(tgt, *control_target.weights));
    };
    const double nn_ks = control_ks(nn);
    const double dann_ks = control_ks(dann);
    const double nn_acc = nn.history.records.back().test_accuracy;
    const double dann_acc = dann.history.records.back().test_accuracy;
    const bool ok = std::fabs(nn_acc - 0.881) <= 0.03 && std::fabs(dann_acc - 0.840) <= 0.03 &&
                    dann_ks < 0.09 && dann_ks < nn_ks;
    report(6, ok,
           str("tau->3mu reproduction: nn_acc=%.3f (want 0.881+-0.03) dann_acc=%.3f "
               "(want 0.840+-0.03) dann_ks=%.3f (need < 0.09) nn_ks=%.3f",
               nn_acc, dann_acc, dann_ks, nn_ks));
}

// --- criterion 7: pipeline determinism through the CLI ----------------------

void criterion7() {
    const fs::path dir = "/tmp/simreal_accept/pipeline";
    fs::remove_all(dir);
    fs::create_directories(dir);

    nlohmann::json cfg;
    cfg["scenario"] = {{"kind", "covariate_shift"}, {"d", 6},      {"n_source", 500},
                       {"n_target", 500},           {"n_control_source", 300},
                       {"n_control_target", 300},   {"seed", 11}};
    cfg["paths"] = {{"source", (dir / "source.csv").string()},
                    {"target", (dir / "target.csv").string()},
                    {"control_source", (dir / "control_source.csv").string()},
                    {"control_target", (dir / "control_target.csv").string()}};
    cfg["train"] = {{"epochs", 4},         {"hidden", 10}, {"batch_size", 128},
                    {"lambda_value", 1.0}, {"seed", 7}};
    const fs::path cfg_path = dir / "cfg.json";
    {
        std::ofstream out(cfg_path, std::ios::binary);
        out << cfg.dump(2) << "\n";
    }

    const std::string bin = std::string(SIMREAL_BIN_DIR) + "/simreal";
    auto run = [&](const std::string& args) {
        const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    struct RunArtifacts {
        int agreement_code = -99;
        std::string history, agreement;
    };
    auto one_pass = [&]() -> std::optional<RunArtifacts> {
        fs::remove_all(dir / "out");
        fs::remove_all(dir / "gate");
        if (run("synth --config " + cfg_path.string() + " --out " + dir.string()) != 0)
            return std::nullopt;
        if (run("train --config " + cfg_path.string() + " --model dann --out " +
                (dir / "out").string()) != 0)
            return std::nullopt;
        RunArtifacts art;
        art.agreement_code =
            run("agreement --config " + cfg_path.string() + " --checkpoint " +
                (dir / "out" / "checkpoint.json").string() + " --out " +
                (dir / "gate").string());
        if (art.agreement_code != 0 && art.agreement_code != 1) return std::nullopt;
        art.history = slurp(dir / "out" / "history.csv");
        art.agreement = slurp(dir / "gate" / "agreement.json");
        if (art.history.empty() || art.agreement.empty()) return std::nullopt;
        return art;
    };

    std::optional<RunArtifacts> first = one_pass();
    std::optional<RunArtifacts> second = one_pass();
    if (!first || !second) {
        report(7, false, "pipeline run failed (synth/train/agreement exit codes)");
        return;
    }
    const bool ok = first->history == second->history &&
                    first->agreement == second->agreement &&
                    first->agreement_code == second->agreement_code;
    report(7, ok,
           str("synth->train->agreement rerun: history.csv %s, agreement.json %s, "
               "gate exit %d vs %d",
               first->history == second->history ? "byte-identical" : "DIFFERS",
               first->agreement == second->agreement ? "byte-identical" : "DIFFERS",
               first->agreement_code, second->agreement_code));
}

// --- criterion 8: shift-taxonomy sanity --------------------------------------

void criterion8() {
    ScenarioConfig pcfg;
    pcfg.kind = ScenarioKind::prior_shift;
    pcfg.target_signal_fraction = 0.3;
    pcfg.n_target = 20000;
    pcfg.seed = 77;
    ScenarioBundle prior = generate(pcfg);
    std::size_t positives = 0;
    for (int label : *prior.target.labels) positives += label == 1 ? 1u : 0u;
    const double fraction = static_cast<double>(positives) / static_cast<double>(prior.target.n());
    const bool prior_ok = std::fabs(fraction - 0.3) <= 0.02;

    ScenarioConfig ccfg;  // covariate defaults
    const bool rule_ok = scenario_label_rule(ccfg, Domain::source) ==
                         scenario_label_rule(ccfg, Domain::target);

    auto worst_feature_ks = [](const ScenarioBundle& b) {
        double worst = 0.0;
        for (std::size_t j = 0; j < b.source.d(); ++j) {
            worst = std::max(
                worst, ks_distance(WeightedSample::unweighted(column(b.source.features, j)),
                                   WeightedSample::unweighted(column(b.target.features, j))));
        }
        return worst;
    };
    ScenarioConfig none_cfg;
    none_cfg.kind = ScenarioKind::none;
    none_cfg.seed = 5150;
    const double worst_none = worst_feature_ks(generate(none_cfg));
    ScenarioConfig zero_cfg;
    zero_cfg.shift_magnitude = 0.0;
    zero_cfg.seed = 6160;
    const double worst_zero = worst_feature_ks(generate(zero_cfg));

    report(8, prior_ok && rule_ok && worst_none <= 0.05 && worst_zero <= 0.05,
           str("prior_shift fraction %.3f (want 0.300+-0.020), label rule %s across "
               "domains, zero-shift per-feature ks %.3f / %.3f (need <= 0.05)",
               fraction, rule_ok ? "bit-identical" : "DIFFERS", worst_none, worst_zero));
}

}  // namespace

int main() {
    struct Entry {
        int number;
        void (*fn)();
    };
    const Entry entries[] = {{1, criterion1}, {2, criterion2}, {3, criterion3},
                             {4, criterion4}, {5, criterion5}, {6, criterion6},
                             {7, criterion7}, {8, criterion8}};
    for (const Entry& e : entries) {
        try {
            e.fn();
        } catch (const std::exception& ex) {
            report(e.number, false, std::string("unexpected exception: ") + ex.what());
        }
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
