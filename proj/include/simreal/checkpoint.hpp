#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simreal/dataset.hpp"
#include "simreal/network.hpp"

namespace simreal {

// Trained model bundle: parameters, the source-fitted standardizer, and the
// feature schema it was trained against. JSON on disk; doubles are encoded as
// shortest-round-trip decimals, so save/load is bit-exact.
struct Checkpoint {
    NetParams params;
    Standardizer standardizer;
    std::vector<std::string> feature_columns;

    std::uint64_t fingerprint() const;
};

// FNV-1a over the ordered feature names.
std::uint64_t schema_fingerprint(const std::vector<std::string>& feature_columns);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace simreal
