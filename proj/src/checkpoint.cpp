#include "simreal/checkpoint.hpp"

#include <fstream>

#include "simreal/errors.hpp"
#include "json.hpp"

namespace simreal {

std::uint64_t schema_fingerprint(const std::vector<std::string>& feature_columns) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    auto mix = [&hash](unsigned char byte) {
        hash ^= byte;
        hash *= 0x100000001B3ULL;
    };
    for (const auto& name : feature_columns) {
        for (char c : name) mix(static_cast<unsigned char>(c));
        mix(0x1F);  // column separator
    }
    return hash;
}

std::uint64_t Checkpoint::fingerprint() const { return schema_fingerprint(feature_columns); }

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    nlohmann::json doc{
        {"input_dim", ckpt.params.input_dim()},
        {"hidden_dim", ckpt.params.hidden_dim()},
        {"W1", ckpt.params.W1.data()},
        {"b1", ckpt.params.b1},
        {"Wc", ckpt.params.Wc.data()},
        {"bc", ckpt.params.bc},
        {"Wd", ckpt.params.Wd.data()},
        {"bd", ckpt.params.bd},
        {"standardizer", {{"mean", ckpt.standardizer.mean}, {"scale", ckpt.standardizer.scale}}},
        {"schema", {{"feature_columns", ckpt.feature_columns},
                    {"fingerprint", ckpt.fingerprint()}}}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    try {
        const auto d = doc.at("input_dim").get<std::size_t>();
        const auto h = doc.at("hidden_dim").get<std::size_t>();
        Checkpoint ckpt;
        ckpt.params.W1 = Matrix(d, h, doc.at("W1").get<std::vector<double>>());
        ckpt.params.b1 = doc.at("b1").get<std::vector<double>>();
        ckpt.params.Wc = Matrix(h, 2, doc.at("Wc").get<std::vector<double>>());
        ckpt.params.bc = doc.at("bc").get<std::vector<double>>();
        ckpt.params.Wd = Matrix(h, 2, doc.at("Wd").get<std::vector<double>>());
        ckpt.params.bd = doc.at("bd").get<std::vector<double>>();
        ckpt.standardizer.mean = doc.at("standardizer").at("mean").get<std::vector<double>>();
        ckpt.standardizer.scale = doc.at("standardizer").at("scale").get<std::vector<double>>();
        ckpt.feature_columns =
            doc.at("schema").at("feature_columns").get<std::vector<std::string>>();
        if (ckpt.params.b1.size() != h || ckpt.params.bc.size() != 2 ||
            ckpt.params.bd.size() != 2 || ckpt.standardizer.mean.size() != d ||
            ckpt.standardizer.scale.size() != d || ckpt.feature_columns.size() != d) {
            throw ParseError("'" + path + "': inconsistent checkpoint shapes");
        }
        const auto stored = doc.at("schema").at("fingerprint").get<std::uint64_t>();
        if (stored != ckpt.fingerprint())
            throw ParseError("'" + path + "': schema fingerprint does not match columns");
        return ckpt;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("'" + path + "': malformed checkpoint: " + e.what());
    }
}

}  // namespace simreal
