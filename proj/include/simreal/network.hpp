#pragma once

#include <array>
#include <optional>
#include <vector>

#include "simreal/matrix.hpp"
#include "simreal/rng.hpp"

namespace simreal {

// Parameter pack of the two-headed MLP: shared tanh hidden layer (W1, b1),
// class head (Wc, bc) and domain head (Wd, bd), both softmax over 2 outputs.
// The same shape carries gradients and Adam moment accumulators.
struct NetTensors {
    Matrix W1;               // d x h
    std::vector<double> b1;  // h
    Matrix Wc;               // h x 2
    std::vector<double> bc;  // 2
    Matrix Wd;               // h x 2
    std::vector<double> bd;  // 2

    std::size_t input_dim() const { return W1.rows(); }
    std::size_t hidden_dim() const { return W1.cols(); }

    static NetTensors zeros(std::size_t d, std::size_t h);

    // Fixed traversal order: W1, b1, Wc, bc, Wd, bd.
    std::array<std::vector<double>*, 6> arrays();
    std::array<const std::vector<double>*, 6> arrays() const;

    bool all_finite() const;
};

using NetParams = NetTensors;
using Grads = NetTensors;

enum class InitRule { glorot_uniform };

struct ForwardTrace {
    Matrix hidden;        // n x h, tanh activations
    Matrix class_probs;   // n x 2, rows sum to 1
    Matrix domain_probs;  // n x 2, rows sum to 1
};

struct BackwardResult {
    Grads grads;
    std::optional<double> class_loss;
    std::optional<double> domain_loss;

    double total_loss() const {
        return class_loss.value_or(0.0) + domain_loss.value_or(0.0);
    }
};

// Glorot-uniform weights, zero biases. Draw order: W1, Wc, Wd.
NetParams init(std::size_t d, std::size_t h, Rng& rng,
               InitRule rule = InitRule::glorot_uniform);

// hidden = tanh(X W1 + b1); each head applies a row-wise softmax with
// max-subtraction stabilization.
ForwardTrace forward(const NetParams& p, const Matrix& X);

// Normalized-weight mean of -log p(true class); probabilities are clamped to
// [1e-12, 1 - 1e-12] before the log so the loss stays finite under saturation.
double class_loss(const ForwardTrace& trace, const std::vector<int>& labels,
                  const std::vector<double>* weights = nullptr);

double domain_loss(const ForwardTrace& trace, const std::vector<int>& domain_labels,
                   const std::vector<double>* weights = nullptr);

// Gradient reversal layer. Forward is the identity; backward scales the
// upstream gradient by -lambda.
Matrix grl_forward(const Matrix& x);
Matrix grl_backward(const Matrix& upstream_grad, double lambda);

// Analytic gradients of class_loss + domain_loss for whichever label sets are
// present. The domain branch's gradient reaches (W1, b1) through
// grl_backward(., lambda); head-only parameters of an absent branch stay zero.
BackwardResult backward(const NetParams& p, const Matrix& X,
                        const std::vector<int>* class_labels,
                        const std::vector<double>* class_weights,
                        const std::vector<int>* domain_labels,
                        const std::vector<double>* domain_weights, double lambda);

// grads += more, tensor by tensor.
void accumulate(Grads& grads, const Grads& more);

}  // namespace simreal
