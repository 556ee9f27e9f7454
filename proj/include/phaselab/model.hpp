#pragma once
// Synthetic weak/strong-feature classification problem and the four softmax
// outputs that remain distinct under its symmetry.
//
// Every sample of class y is supported on the attribute block
// A_y = [y*d/l, (y+1)*d/l): weak samples carry value 1 there, strong samples
// carry value k, everything else is 0. Classes are balanced and each class is
// split half weak / half strong. With all rows of the weight matrix equal on
// and off the active block, the whole training state collapses to two sums:
//   f = sum of own-class weights over A_y,   u = the cross-class sum.
// Outputs are then o_{y'}(sample of class y, strength v) = v * S_{y,y'}, so
// only four distinct softmax probabilities exist.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace phaselab {

enum class InitMode { Deterministic, Random };

struct ModelParams {
    long n = 0;             // sample count, divisible by 2l
    long d = 0;             // input dimension, divisible by l
    long l = 2;             // class count, >= 2
    double k = 2.0;         // strong-feature factor, >= 2
    double lambda = 0.0;    // learning rate, >= 0
    InitMode init = InitMode::Deterministic;
    std::uint64_t seed = 0; // used when init == Random

    long block() const { return d / l; }         // |A_y|
    long per_class() const { return n / l; }
    long per_group() const { return n / (2 * l); }

    void validate() const {
        if (l < 2) throw std::invalid_argument("ModelParams: l must be >= 2");
        if (k < 2.0) throw std::invalid_argument("ModelParams: k must be >= 2");
        if (d <= 0 || d % l != 0) throw std::invalid_argument("ModelParams: d must be positive and divisible by l");
        if (n <= 0 || n % (2 * l) != 0) throw std::invalid_argument("ModelParams: n must be positive and divisible by 2l");
        if (!(lambda >= 0.0)) throw std::invalid_argument("ModelParams: lambda must be non-negative");
    }
};

struct SymState {
    long t = 0;   // iteration index
    double f = 0; // S_{y,y}
    double u = 0; // S_{y,y' != y}
};

struct ClassProbs {
    double q_self_weak = 0;    // q(y | C^y_1)
    double q_self_strong = 0;  // q(y | C^y_k)
    double q_cross_weak = 0;   // q(y | C^{y' != y}_1)
    double q_cross_strong = 0; // q(y | C^{y' != y}_k)
};

namespace detail {
// q_self = e^a / (e^a + (l-1) e^b), q_cross = e^b / (same), with the shared
// max subtracted first so that exponents up to ~700 stay finite.
inline void softmax_pair(double a, double b, long l, double& q_self, double& q_cross) {
    const double m = a > b ? a : b;
    const double ea = std::exp(a - m);
    const double eb = std::exp(b - m);
    const double denom = ea + static_cast<double>(l - 1) * eb;
    q_self = ea / denom;
    q_cross = eb / denom;
}
} // namespace detail

inline ClassProbs class_probs(const SymState& s, const ModelParams& p) {
    ClassProbs q;
    detail::softmax_pair(s.f, s.u, p.l, q.q_self_weak, q.q_cross_weak);
    detail::softmax_pair(s.f * p.k, s.u * p.k, p.l, q.q_self_strong, q.q_cross_strong);
    return q;
}

struct Dataset {
    long n = 0;
    long d = 0;
    std::vector<double> inputs;    // row-major n x d
    std::vector<int> labels;       // length n
    std::vector<char> weak_mask;   // length n, 1 if the sample is weak

    double at(long row, long col) const { return inputs[static_cast<std::size_t>(row) * d + col]; }
};

// Rows are emitted class-major, weak before strong, so the layout is
// reproducible bit for bit.
inline Dataset generate_dataset(const ModelParams& p) {
    p.validate();
    Dataset ds;
    ds.n = p.n;
    ds.d = p.d;
    ds.inputs.assign(static_cast<std::size_t>(p.n) * p.d, 0.0);
    ds.labels.resize(p.n);
    ds.weak_mask.resize(p.n);
    const long block = p.block();
    const long per_group = p.per_group();
    long row = 0;
    for (long y = 0; y < p.l; ++y) {
        for (long g = 0; g < 2; ++g) { // 0: weak, 1: strong
            const double v = g == 0 ? 1.0 : p.k;
            for (long i = 0; i < per_group; ++i, ++row) {
                ds.labels[row] = static_cast<int>(y);
                ds.weak_mask[row] = g == 0 ? 1 : 0;
                double* r = ds.inputs.data() + static_cast<std::size_t>(row) * p.d;
                for (long j = y * block; j < (y + 1) * block; ++j) r[j] = v;
            }
        }
    }
    return ds;
}

} // namespace phaselab
