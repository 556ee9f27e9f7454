#pragma once
// Symmetry-reduced full-batch gradient descent. One step costs O(1):
//   dS_{y,y'} = (lambda*d / 2l^2) * sum_{v in {1,k}} v*(q(y'|C^y_v) - [y==y'])
//   S <- S - dS
// The own-class gradient is negative, so f rises; the cross-class one is a
// positive probability, so u falls. The wrong-class probability is taken as
// (1 - q_self)/(l-1), which keeps the softmax normalization exact.

#include <optional>
#include <stdexcept>
#include <vector>

#include "phaselab/model.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

inline SymState initial_state(const ModelParams& p) {
    p.validate();
    if (p.init == InitMode::Deterministic) {
        const double s = 1.0 / static_cast<double>(p.l);
        return SymState{0, s, s};
    }
    // Random init: f and u are block sums of N(0, 1/d) weights, one block of
    // the own-class row and one of a cross-class row.
    SplitMix64 rng(p.seed);
    const double sd = std::sqrt(1.0 / static_cast<double>(p.d));
    double f = 0.0, u = 0.0;
    for (long i = 0; i < p.block(); ++i) f += sd * rng.next_gaussian();
    for (long i = 0; i < p.block(); ++i) u += sd * rng.next_gaussian();
    return SymState{0, f, u};
}

inline SymState step(const SymState& s, const ModelParams& p) {
    const ClassProbs q = class_probs(s, p);
    const double scale = p.lambda * static_cast<double>(p.d) /
                         (2.0 * static_cast<double>(p.l) * static_cast<double>(p.l));
    const double d_self = scale * ((q.q_self_weak - 1.0) + p.k * (q.q_self_strong - 1.0));
    const double q_wrong_weak = (1.0 - q.q_self_weak) / static_cast<double>(p.l - 1);
    const double q_wrong_strong = (1.0 - q.q_self_strong) / static_cast<double>(p.l - 1);
    const double d_cross = scale * (q_wrong_weak + p.k * q_wrong_strong);
    return SymState{s.t + 1, s.f - d_self, s.u - d_cross};
}

struct Trajectory {
    ModelParams params;
    std::vector<SymState> states;  // t = 0 .. t_max
    std::vector<ClassProbs> probs; // matching

    long length() const { return static_cast<long>(states.size()); }
};

inline Trajectory simulate(const ModelParams& p, long t_max) {
    if (t_max < 1) throw std::invalid_argument("simulate: t_max must be >= 1");
    Trajectory tr;
    tr.params = p;
    tr.states.reserve(static_cast<std::size_t>(t_max) + 1);
    tr.probs.reserve(static_cast<std::size_t>(t_max) + 1);
    SymState s = initial_state(p);
    tr.states.push_back(s);
    tr.probs.push_back(class_probs(s, p));
    for (long t = 0; t < t_max; ++t) {
        s = step(s, p);
        tr.states.push_back(s);
        tr.probs.push_back(class_probs(s, p));
    }
    return tr;
}

// Smallest t with f(t) >= f_target, or nullopt if the trajectory never gets
// there. f is monotone under these dynamics, so a forward scan suffices.
inline std::optional<long> first_crossing(const Trajectory& tr, double f_target) {
    if (tr.states.empty()) throw std::invalid_argument("first_crossing: empty trajectory");
    if (f_target < 1.0 / static_cast<double>(tr.params.l))
        throw std::invalid_argument("first_crossing: f_target must be >= 1/l");
    for (const SymState& s : tr.states) {
        if (s.f >= f_target) return s.t;
    }
    return std::nullopt;
}

} // namespace phaselab
