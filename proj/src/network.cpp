#include "simreal/network.hpp"

#include <algorithm>
#include <cmath>

#include "simreal/errors.hpp"

namespace simreal {

namespace {

constexpr double kProbClamp = 1e-12;

// Per-example weights normalized to sum 1; uniform when absent.
std::vector<double> normalized_weights(const std::vector<double>* weights, std::size_t n,
                                       const char* who) {
    std::vector<double> out(n, 1.0 / static_cast<double>(n));
    if (!weights) return out;
    if (weights->size() != n) {
        throw ShapeError(std::string(who) + ": " + std::to_string(weights->size()) +
                         " weights for " + std::to_string(n) + " examples");
    }
    double total = 0.0;
    for (double w : *weights) {
        if (!std::isfinite(w) || w < 0.0)
            throw ValidationError(std::string(who) + ": weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw ValidationError(std::string(who) + ": zero total weight");
    for (std::size_t i = 0; i < n; ++i) out[i] = (*weights)[i] / total;
    return out;
}

void check_labels(const std::vector<int>& labels, std::size_t n, const char* who) {
    if (labels.size() != n) {
        throw ShapeError(std::string(who) + ": " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(n) + " examples");
    }
    for (int y : labels) {
        if (y != 0 && y != 1)
            throw ValidationError(std::string(who) + ": labels must be 0 or 1");
    }
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const auto in = logits.row(r);
        auto out = probs.row(r);
        double mx = in[0];
        for (double v : in) mx = std::max(mx, v);
        double sum = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            out[j] = std::exp(in[j] - mx);
            sum += out[j];
        }
        for (std::size_t j = 0; j < in.size(); ++j) out[j] /= sum;
    }
    return probs;
}

double weighted_nll(const Matrix& probs, const std::vector<int>& labels,
                    const std::vector<double>& norm_weights) {
    double loss = 0.0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        const double p = std::clamp(probs.at(i, static_cast<std::size_t>(labels[i])),
                                    kProbClamp, 1.0 - kProbClamp);
        loss -= norm_weights[i] * std::log(p);
    }
    return loss;
}

// d(loss)/d(logits) for softmax + weighted NLL: a_i * (p - onehot).
Matrix logit_grad(const Matrix& probs, const std::vector<int>& labels,
                  const std::vector<double>& norm_weights) {
    Matrix g(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            const double onehot = (static_cast<std::size_t>(labels[i]) == c) ? 1.0 : 0.0;
            g.at(i, c) = norm_weights[i] * (probs.at(i, c) - onehot);
        }
    }
    return g;
}

}  // namespace

NetTensors NetTensors::zeros(std::size_t d, std::size_t h) {
    NetTensors t;
    t.W1 = Matrix(d, h);
    t.b1.assign(h, 0.0);
    t.Wc = Matrix(h, 2);
    t.bc.assign(2, 0.0);
    t.Wd = Matrix(h, 2);
    t.bd.assign(2, 0.0);
    return t;
}

std::array<std::vector<double>*, 6> NetTensors::arrays() {
    return {&W1.data(), &b1, &Wc.data(), &bc, &Wd.data(), &bd};
}

std::array<const std::vector<double>*, 6> NetTensors::arrays() const {
    return {&W1.data(), &b1, &Wc.data(), &bc, &Wd.data(), &bd};
}

bool NetTensors::all_finite() const {
    for (const auto* arr : arrays())
        for (double v : *arr)
            if (!std::isfinite(v)) return false;
    return true;
}

NetParams init(std::size_t d, std::size_t h, Rng& rng, InitRule rule) {
    if (d == 0 || h == 0) {
        throw ConfigError("init: dimensions must be >= 1, got d=" + std::to_string(d) +
                          " h=" + std::to_string(h));
    }
    (void)rule;  // glorot_uniform is the only rule
    NetParams p = NetTensors::zeros(d, h);
    const double limit1 = std::sqrt(6.0 / static_cast<double>(d + h));
    const double limit2 = std::sqrt(6.0 / static_cast<double>(h + 2));
    p.W1 = rand_uniform(rng, d, h, -limit1, limit1);
    p.Wc = rand_uniform(rng, h, 2, -limit2, limit2);
    p.Wd = rand_uniform(rng, h, 2, -limit2, limit2);
    return p;
}

ForwardTrace forward(const NetParams& p, const Matrix& X) {
    if (X.cols() != p.input_dim()) {
        throw ShapeError("forward: input " + X.shape_str() + " vs W1 " + p.W1.shape_str());
    }
    ForwardTrace trace;
    Matrix z1 = add_row_broadcast(matmul(X, p.W1), p.b1);
    trace.hidden = z1;
    for (double& v : trace.hidden.data()) v = std::tanh(v);
    trace.class_probs = softmax_rows(add_row_broadcast(matmul(trace.hidden, p.Wc), p.bc));
    trace.domain_probs = softmax_rows(add_row_broadcast(matmul(trace.hidden, p.Wd), p.bd));
    return trace;
}

double class_loss(const ForwardTrace& trace, const std::vector<int>& labels,
                  const std::vector<double>* weights) {
    const std::size_t n = trace.class_probs.rows();
    check_labels(labels, n, "class_loss");
    return weighted_nll(trace.class_probs, labels, normalized_weights(weights, n, "class_loss"));
}

double domain_loss(const ForwardTrace& trace, const std::vector<int>& domain_labels,
                   const std::vector<double>* weights) {
    const std::size_t n = trace.domain_probs.rows();
    check_labels(domain_labels, n, "domain_loss");
    return weighted_nll(trace.domain_probs, domain_labels,
                        normalized_weights(weights, n, "domain_loss"));
}

Matrix grl_forward(const Matrix& x) { return x; }

Matrix grl_backward(const Matrix& upstream_grad, double lambda) {
    return scale(upstream_grad, -lambda);
}

BackwardResult backward(const NetParams& p, const Matrix& X,
                        const std::vector<int>* class_labels,
                        const std::vector<double>* class_weights,
                        const std::vector<int>* domain_labels,
                        const std::vector<double>* domain_weights, double lambda) {
    if (!class_labels && !domain_labels) {
        throw ValidationError("backward: need class labels, domain labels, or both");
    }
    const ForwardTrace trace = forward(p, X);
    const std::size_t n = X.rows();
    const std::size_t h = p.hidden_dim();

    BackwardResult result;
    result.grads = NetTensors::zeros(p.input_dim(), h);
    Matrix d_hidden(n, h, 0.0);
    const Matrix hidden_t = transpose(trace.hidden);

    if (class_labels) {
        check_labels(*class_labels, n, "backward(class)");
        const auto cw = normalized_weights(class_weights, n, "backward(class)");
        result.class_loss = weighted_nll(trace.class_probs, *class_labels, cw);
        const Matrix d_logits = logit_grad(trace.class_probs, *class_labels, cw);
        result.grads.Wc = matmul(hidden_t, d_logits);
        result.grads.bc = col_sum(d_logits);
        d_hidden = add(d_hidden, matmul(d_logits, transpose(p.Wc)));
    }
    if (domain_labels) {
        check_labels(*domain_labels, n, "backward(domain)");
        const auto dw = normalized_weights(domain_weights, n, "backward(domain)");
        result.domain_loss = weighted_nll(trace.domain_probs, *domain_labels, dw);
        const Matrix d_logits = logit_grad(trace.domain_probs, *domain_labels, dw);
        result.grads.Wd = matmul(hidden_t, d_logits);
        result.grads.bd = col_sum(d_logits);
        // The reversal sits between the shared layer and the domain head.
        d_hidden = add(d_hidden, grl_backward(matmul(d_logits, transpose(p.Wd)), lambda));
    }

    Matrix d_z1 = d_hidden;
    for (std::size_t i = 0; i < d_z1.size(); ++i) {
        const double hval = trace.hidden.data()[i];
        d_z1.data()[i] *= 1.0 - hval * hval;  // tanh'
    }
    result.grads.W1 = matmul(transpose(X), d_z1);
    result.grads.b1 = col_sum(d_z1);
    return result;
}

void accumulate(Grads& grads, const Grads& more) {
    auto dst = grads.arrays();
    auto src = more.arrays();
    for (std::size_t t = 0; t < dst.size(); ++t) {
        if (dst[t]->size() != src[t]->size())
            throw ShapeError("accumulate: tensor size mismatch");
        for (std::size_t i = 0; i < dst[t]->size(); ++i) (*dst[t])[i] += (*src[t])[i];
    }
}

}  // namespace simreal
