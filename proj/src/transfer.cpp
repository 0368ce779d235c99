#include "lc/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace lc {

namespace {
bool is_integer(double x) { return x == std::floor(x); }

double logistic_fn(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace

void apply_transfer(const TransferFunction& f, std::span<const double> s, std::span<double> out) {
    switch (f.kind) {
        case Transfer::Identity:
            std::copy(s.begin(), s.end(), out.begin());
            return;
        case Transfer::Tanh:
            for (std::size_t i = 0; i < s.size(); ++i) out[i] = std::tanh(s[i]);
            return;
        case Transfer::Logistic:
            for (std::size_t i = 0; i < s.size(); ++i) out[i] = logistic_fn(s[i]);
            return;
        case Transfer::Relu:
            for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] > 0.0 ? s[i] : 0.0;
            return;
        case Transfer::Softmax: {
            // shift by max for stability
            double m = s[0];
            for (double v : s) m = std::max(m, v);
            double z = 0.0;
            for (std::size_t i = 0; i < s.size(); ++i) {
                out[i] = std::exp(s[i] - m);
                z += out[i];
            }
            for (std::size_t i = 0; i < s.size(); ++i) out[i] /= z;
            return;
        }
        case Transfer::Power:
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] < 0.0 && !is_integer(f.mu))
                    throw domain_error("power transfer: fractional exponent on negative input");
                out[i] = std::pow(s[i], f.mu);
            }
            return;
    }
}

void transfer_derivative(const TransferFunction& f, std::span<const double> s, std::span<double> out) {
    switch (f.kind) {
        case Transfer::Identity:
            std::fill(out.begin(), out.end(), 1.0);
            return;
        case Transfer::Tanh:
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double t = std::tanh(s[i]);
                out[i] = 1.0 - t * t;
            }
            return;
        case Transfer::Logistic:
            for (std::size_t i = 0; i < s.size(); ++i) {
                const double g = logistic_fn(s[i]);
                out[i] = g * (1.0 - g);
            }
            return;
        case Transfer::Relu:
            for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] > 0.0 ? 1.0 : 0.0;
            return;
        case Transfer::Softmax:
            throw config_error("softmax has no elementwise derivative; pair it with cross-entropy");
        case Transfer::Power:
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (s[i] < 0.0 && !is_integer(f.mu))
                    throw domain_error("power transfer: fractional exponent on negative input");
                out[i] = f.mu * std::pow(s[i], f.mu - 1.0);
            }
            return;
    }
}

std::vector<double> apply_transfer(const TransferFunction& f, const std::vector<double>& s) {
    std::vector<double> out(s.size());
    apply_transfer(f, s, out);
    return out;
}

std::vector<double> transfer_derivative(const TransferFunction& f, const std::vector<double>& s) {
    std::vector<double> out(s.size());
    transfer_derivative(f, s, out);
    return out;
}

Matrix apply_transfer_rows(const TransferFunction& f, const Matrix& s) {
    Matrix out(s.rows(), s.cols());
    for (std::size_t r = 0; r < s.rows(); ++r)
        apply_transfer(f, std::span(s.row(r), s.cols()), std::span(out.row(r), s.cols()));
    return out;
}

Matrix transfer_derivative_rows(const TransferFunction& f, const Matrix& s) {
    Matrix out(s.rows(), s.cols());
    for (std::size_t r = 0; r < s.rows(); ++r)
        transfer_derivative(f, std::span(s.row(r), s.cols()), std::span(out.row(r), s.cols()));
    return out;
}

std::vector<double> output_delta(const Loss& loss, std::span<const double> target,
                                 std::span<const double> output) {
    (void)loss;
    if (target.size() != output.size()) throw config_error("output_delta: size mismatch");
    std::vector<double> d(target.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = target[i] - output[i];
    return d;
}

Matrix output_delta_rows(const Loss& loss, const Matrix& targets, const Matrix& outputs) {
    (void)loss;
    if (targets.rows() != outputs.rows() || targets.cols() != outputs.cols())
        throw config_error("output_delta: shape mismatch");
    return targets - outputs;
}

double loss_value(const Loss& loss, std::span<const double> target, std::span<const double> output) {
    if (target.size() != output.size()) throw config_error("loss_value: size mismatch");
    switch (loss.kind) {
        case LossKind::SquaredError: {
            double s = 0.0;
            for (std::size_t i = 0; i < target.size(); ++i) {
                const double d = target[i] - output[i];
                s += d * d;
            }
            return 0.5 * s;
        }
        case LossKind::CrossEntropySoftmax: {
            double s = 0.0;
            for (std::size_t i = 0; i < target.size(); ++i)
                if (target[i] != 0.0) s -= target[i] * std::log(std::max(output[i], 1e-300));
            return s;
        }
        case LossKind::CrossEntropyLogistic: {
            double s = 0.0;
            for (std::size_t i = 0; i < target.size(); ++i) {
                const double o = std::clamp(output[i], 1e-15, 1.0 - 1e-15);
                s -= target[i] * std::log(o) + (1.0 - target[i]) * std::log(1.0 - o);
            }
            return s;
        }
    }
    return 0.0;
}

void check_pairing(const Loss& loss, const TransferFunction& output_transfer) {
    const Transfer t = output_transfer.kind;
    switch (loss.kind) {
        case LossKind::SquaredError:
            if (t != Transfer::Identity)
                throw config_error("squared-error loss requires an identity output transfer");
            return;
        case LossKind::CrossEntropySoftmax:
            if (t != Transfer::Softmax)
                throw config_error("cross-entropy-softmax loss requires a softmax output transfer");
            return;
        case LossKind::CrossEntropyLogistic:
            if (t != Transfer::Logistic)
                throw config_error("cross-entropy-logistic loss requires a logistic output transfer");
            return;
    }
}

}  // namespace lc
