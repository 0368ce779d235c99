#pragma once

#include <span>
#include <vector>

#include "lc/matrix.hpp"

namespace lc {

enum class Transfer { Identity, Tanh, Logistic, Relu, Softmax, Power };

struct TransferFunction {
    Transfer kind = Transfer::Identity;
    double mu = 1.0;  // exponent for Power

    static TransferFunction identity() { return {Transfer::Identity}; }
    static TransferFunction tanh_fn() { return {Transfer::Tanh}; }
    static TransferFunction logistic() { return {Transfer::Logistic}; }
    static TransferFunction relu() { return {Transfer::Relu}; }
    static TransferFunction softmax() { return {Transfer::Softmax}; }
    static TransferFunction power(double mu) { return {Transfer::Power, mu}; }

    bool has_derivative() const { return kind != Transfer::Softmax; }
};

/// Apply f to one layer's pre-activations. Softmax normalizes over the whole
/// span; all other kinds act elementwise. Power with non-integer mu throws
/// domain_error on negative input.
void apply_transfer(const TransferFunction& f, std::span<const double> s, std::span<double> out);

/// Elementwise derivative at s. Softmax has no pointwise derivative here; it
/// is only legal at the top paired with cross-entropy (delta = T - O).
void transfer_derivative(const TransferFunction& f, std::span<const double> s, std::span<double> out);

std::vector<double> apply_transfer(const TransferFunction& f, const std::vector<double>& s);
std::vector<double> transfer_derivative(const TransferFunction& f, const std::vector<double>& s);

/// Row-wise application to a batch x N matrix.
Matrix apply_transfer_rows(const TransferFunction& f, const Matrix& s);
Matrix transfer_derivative_rows(const TransferFunction& f, const Matrix& s);

enum class LossKind { SquaredError, CrossEntropySoftmax, CrossEntropyLogistic };

struct Loss {
    LossKind kind = LossKind::SquaredError;
};

/// T - O for the matched output-transfer/loss pairing. The pairing makes the
/// pre-activation delta exactly T - O for all three supported losses.
std::vector<double> output_delta(const Loss& loss, std::span<const double> target,
                                 std::span<const double> output);

Matrix output_delta_rows(const Loss& loss, const Matrix& targets, const Matrix& outputs);

/// Per-example loss value, summed over output units.
double loss_value(const Loss& loss, std::span<const double> target, std::span<const double> output);

/// Checks that the output transfer matches the loss; throws config_error.
void check_pairing(const Loss& loss, const TransferFunction& output_transfer);

}  // namespace lc
