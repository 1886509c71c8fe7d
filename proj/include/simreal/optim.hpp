#pragma once

#include <cstdint>

#include "simreal/network.hpp"

namespace simreal {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

struct AdamState {
    NetTensors m;  // first-moment accumulator
    NetTensors v;  // second-moment accumulator
    std::uint64_t t = 0;
    AdamConfig hyper;

    static AdamState fresh(const NetParams& shape_like, const AdamConfig& hyper);
};

// One bias-corrected Adam update: theta -= lr * m_hat / (sqrt(v_hat) + eps),
// with epsilon added outside the square root. A non-finite gradient refuses
// the step and leaves both state and params untouched.
void adam_step(AdamState& state, NetParams& params, const Grads& grads);

void sgd_step(NetParams& params, const Grads& grads, double lr);

}  // namespace simreal
