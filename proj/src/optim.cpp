#include "simreal/optim.hpp"

#include <cmath>

#include "simreal/errors.hpp"

namespace simreal {

void AdamConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("adam: lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must be in [0,1)");
    if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
}

AdamState AdamState::fresh(const NetParams& shape_like, const AdamConfig& hyper) {
    hyper.validate();
    AdamState state;
    state.m = NetTensors::zeros(shape_like.input_dim(), shape_like.hidden_dim());
    state.v = NetTensors::zeros(shape_like.input_dim(), shape_like.hidden_dim());
    state.t = 0;
    state.hyper = hyper;
    return state;
}

void adam_step(AdamState& state, NetParams& params, const Grads& grads) {
    if (!grads.all_finite()) {
        throw NumericError("adam_step: non-finite gradient, step refused");
    }
    state.t += 1;
    const double b1 = state.hyper.beta1, b2 = state.hyper.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.t));

    auto ms = state.m.arrays();
    auto vs = state.v.arrays();
    auto ps = params.arrays();
    auto gs = grads.arrays();
    for (std::size_t t = 0; t < ps.size(); ++t) {
        if (ps[t]->size() != gs[t]->size())
            throw ShapeError("adam_step: param/grad tensor size mismatch");
        for (std::size_t i = 0; i < ps[t]->size(); ++i) {
            const double g = (*gs[t])[i];
            double& m = (*ms[t])[i];
            double& v = (*vs[t])[i];
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            const double m_hat = m / corr1;
            const double v_hat = v / corr2;
            (*ps[t])[i] -= state.hyper.lr * m_hat / (std::sqrt(v_hat) + state.hyper.epsilon);
        }
    }
}

void sgd_step(NetParams& params, const Grads& grads, double lr) {
    if (!(lr > 0.0)) throw ConfigError("sgd_step: lr must be > 0");
    if (!grads.all_finite()) {
        throw NumericError("sgd_step: non-finite gradient, step refused");
    }
    auto ps = params.arrays();
    auto gs = grads.arrays();
    for (std::size_t t = 0; t < ps.size(); ++t) {
        if (ps[t]->size() != gs[t]->size())
            throw ShapeError("sgd_step: param/grad tensor size mismatch");
        for (std::size_t i = 0; i < ps[t]->size(); ++i)
            (*ps[t])[i] -= lr * (*gs[t])[i];
    }
}

}  // namespace simreal
