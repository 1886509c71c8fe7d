#include "simreal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "simreal/errors.hpp"
#include "simreal/num_format.hpp"

namespace simreal {

std::string domain_name(Domain d) { return d == Domain::source ? "source" : "target"; }

void Schema::validate() const {
    if (feature_columns.empty()) throw ConfigError("schema: feature_columns is empty");
    std::set<std::string> seen;
    for (const auto& name : feature_columns) {
        if (!seen.insert(name).second)
            throw ConfigError("schema: duplicate feature column '" + name + "'");
    }
    for (const auto& special : {label_column, weight_column, id_column}) {
        if (special && seen.count(*special))
            throw ConfigError("schema: column '" + *special +
                              "' is both a feature and a special column");
    }
}

Dataset Dataset::take_rows(const std::vector<std::size_t>& idx) const {
    Dataset out;
    out.domain = domain;
    out.schema = schema;
    out.features = Matrix(idx.size(), d());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const auto src = features.row(idx[r]);
        std::copy(src.begin(), src.end(), out.features.row(r).begin());
    }
    if (labels) {
        out.labels.emplace(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) (*out.labels)[r] = (*labels)[idx[r]];
    }
    if (weights) {
        out.weights.emplace(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) (*out.weights)[r] = (*weights)[idx[r]];
    }
    return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    double value = 0.0;
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ParseError("row " + std::to_string(row) + ", column '" + col +
                         "': cannot parse '" + cell + "' as a number");
    }
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const Schema& schema, Domain domain) {
    schema.validate();
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");

    std::string header_line;
    if (!std::getline(in, header_line)) throw ParseError("'" + path + "' is empty");
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();

    const auto header = split_line(header_line);
    std::unordered_map<std::string, std::size_t> col_index;
    for (std::size_t i = 0; i < header.size(); ++i) col_index[header[i]] = i;

    auto require_col = [&](const std::string& name) -> std::size_t {
        auto it = col_index.find(name);
        if (it == col_index.end())
            throw ParseError("'" + path + "': schema column '" + name + "' not in header");
        return it->second;
    };

    std::vector<std::size_t> feat_idx;
    feat_idx.reserve(schema.feature_columns.size());
    for (const auto& name : schema.feature_columns) feat_idx.push_back(require_col(name));
    std::optional<std::size_t> label_idx, weight_idx;
    if (schema.label_column) label_idx = require_col(*schema.label_column);
    if (schema.weight_column) weight_idx = require_col(*schema.weight_column);

    const std::size_t d = feat_idx.size();
    std::vector<double> values;
    std::vector<int> labels;
    std::vector<double> weights;
    std::string line;
    std::size_t row = 1;  // header was row 0
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ParseError("row " + std::to_string(row) + ": expected " +
                             std::to_string(header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < d; ++j)
            values.push_back(parse_cell(cells[feat_idx[j]], row, schema.feature_columns[j]));
        if (label_idx) {
            const double raw = parse_cell(cells[*label_idx], row, *schema.label_column);
            if (raw != 0.0 && raw != 1.0) {
                throw ValidationError("row " + std::to_string(row) + ": label " +
                                      format_double(raw) + " is not 0 or 1");
            }
            labels.push_back(raw == 1.0 ? 1 : 0);
        }
        if (weight_idx) {
            const double w = parse_cell(cells[*weight_idx], row, *schema.weight_column);
            if (!std::isfinite(w) || w <= 0.0) {
                throw ValidationError("row " + std::to_string(row) + ": weight " +
                                      format_double(w) + " must be finite and positive");
            }
            weights.push_back(w);
        }
        ++row;
    }

    const std::size_t n = values.size() / d;
    if (n == 0) throw ParseError("'" + path + "' has no data rows");

    Dataset ds;
    ds.features = Matrix(n, d, std::move(values));
    if (label_idx) ds.labels = std::move(labels);
    if (weight_idx) ds.weights = std::move(weights);
    ds.domain = domain;
    ds.schema = schema;
    return ds;
}

void save_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot write '" + path + "'");
    std::string line;
    for (std::size_t j = 0; j < ds.schema.feature_columns.size(); ++j) {
        if (j) line += ',';
        line += ds.schema.feature_columns[j];
    }
    if (ds.labels && ds.schema.label_column) line += ',' + *ds.schema.label_column;
    if (ds.weights && ds.schema.weight_column) line += ',' + *ds.schema.weight_column;
    out << line << '\n';
    for (std::size_t r = 0; r < ds.n(); ++r) {
        line.clear();
        for (std::size_t j = 0; j < ds.d(); ++j) {
            if (j) line += ',';
            line += format_double(ds.features.at(r, j));
        }
        if (ds.labels && ds.schema.label_column)
            line += ',' + std::to_string((*ds.labels)[r]);
        if (ds.weights && ds.schema.weight_column)
            line += ',' + format_double((*ds.weights)[r]);
        out << line << '\n';
    }
}

Standardizer fit_standardizer(const Dataset& ds) {
    const std::size_t n = ds.n(), d = ds.d();
    if (n < 2) throw ValidationError("fit_standardizer: need at least 2 rows, got " +
                                     std::to_string(n));
    Standardizer st;
    st.mean.assign(d, 0.0);
    st.scale.assign(d, 1.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < d; ++j) st.mean[j] += ds.features.at(r, j);
    for (std::size_t j = 0; j < d; ++j) st.mean[j] /= static_cast<double>(n);
    std::vector<double> var(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = ds.features.at(r, j) - st.mean[j];
            var[j] += diff * diff;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        st.scale[j] = sd < 1e-12 ? 1.0 : sd;  // constant features pass through
    }
    return st;
}

Dataset apply_standardizer(const Standardizer& st, const Dataset& ds) {
    if (st.mean.size() != ds.d()) {
        throw ShapeError("apply_standardizer: standardizer has " +
                         std::to_string(st.mean.size()) + " features, dataset has " +
                         std::to_string(ds.d()));
    }
    Dataset out = ds;
    for (std::size_t r = 0; r < out.n(); ++r) {
        for (std::size_t j = 0; j < out.d(); ++j) {
            out.features.at(r, j) = (out.features.at(r, j) - st.mean[j]) / st.scale[j];
        }
    }
    return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, Rng& rng) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("split: train_fraction must be in (0,1), got " +
                          format_double(train_fraction));
    }
    const auto perm = rng.permutation(ds.n());
    const auto n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(ds.n()) * train_fraction));
    std::vector<std::size_t> train_idx(perm.begin(), perm.begin() + n_train);
    std::vector<std::size_t> test_idx(perm.begin() + n_train, perm.end());
    return {ds.take_rows(train_idx), ds.take_rows(test_idx)};
}

std::vector<Dataset> batches(const Dataset& ds, std::size_t batch_size, Rng& rng) {
    if (batch_size == 0) throw ConfigError("batches: batch_size must be >= 1");
    const auto perm = rng.permutation(ds.n());
    std::vector<Dataset> out;
    for (std::size_t start = 0; start < perm.size(); start += batch_size) {
        const std::size_t stop = std::min(start + batch_size, perm.size());
        out.push_back(ds.take_rows(
            std::vector<std::size_t>(perm.begin() + start, perm.begin() + stop)));
    }
    return out;
}

}  // namespace simreal
