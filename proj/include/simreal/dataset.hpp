#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simreal/matrix.hpp"
#include "simreal/rng.hpp"

namespace simreal {

enum class Domain { source, target };

std::string domain_name(Domain d);

// Column-name view of a CSV file: which columns are features, and which
// (optional) columns carry the label, the per-example weight, and an id.
struct Schema {
    std::vector<std::string> feature_columns;
    std::optional<std::string> label_column;
    std::optional<std::string> weight_column;
    std::optional<std::string> id_column;

    // Throws ConfigError unless feature names are non-empty, unique and
    // disjoint from the special columns.
    void validate() const;
};

// Tabular sample: n x d features plus optional {0,1} labels and positive
// per-example weights. Immutable after construction by convention.
struct Dataset {
    Matrix features;                           // n x d
    std::optional<std::vector<int>> labels;    // values in {0,1}
    std::optional<std::vector<double>> weights;  // strictly positive
    Domain domain = Domain::source;
    Schema schema;

    std::size_t n() const { return features.rows(); }
    std::size_t d() const { return features.cols(); }

    // Row-subset copy in the order given by idx; labels/weights follow.
    Dataset take_rows(const std::vector<std::size_t>& idx) const;
};

// Per-feature location/scale, fitted on source training data only.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;  // strictly positive
};

// Parses a CSV file (UTF-8, header row, '.' decimal separator) selecting
// columns by name per the schema. Throws ParseError for unreadable or
// non-numeric content, ValidationError for bad labels/weights.
Dataset load_csv(const std::string& path, const Schema& schema, Domain domain);

// Fixture/synth writer; the exact inverse of load_csv for the columns it emits.
void save_csv(const std::string& path, const Dataset& ds);

// Unweighted per-feature mean and population std; features with
// std < 1e-12 pass through with scale 1.
Standardizer fit_standardizer(const Dataset& ds);

Dataset apply_standardizer(const Standardizer& st, const Dataset& ds);

// Random permutation split: first floor(n * train_fraction) rows to train.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, Rng& rng);

// One epoch worth of batches: fresh shuffle, ceil(n / batch_size) slices,
// final batch possibly smaller, every row exactly once.
std::vector<Dataset> batches(const Dataset& ds, std::size_t batch_size, Rng& rng);

}  // namespace simreal
