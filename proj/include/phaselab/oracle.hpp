#pragma once
// Explicit weight-matrix gradient descent on the generated dataset. This is
// the brute-force reference the reduced dynamics are checked against; it
// knows nothing about the symmetry it is supposed to certify.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "phaselab/model.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

struct SymmetryBroken : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct WeightMatrix {
    Eigen::MatrixXd w; // l x d
    long t = 0;

    static WeightMatrix initial(const ModelParams& p) {
        p.validate();
        WeightMatrix wm;
        wm.w.resize(p.l, p.d);
        if (p.init == InitMode::Deterministic) {
            wm.w.setConstant(1.0 / static_cast<double>(p.d));
        } else {
            SplitMix64 rng(p.seed);
            const double sd = std::sqrt(1.0 / static_cast<double>(p.d));
            for (long y = 0; y < p.l; ++y)
                for (long j = 0; j < p.d; ++j) wm.w(y, j) = sd * rng.next_gaussian();
        }
        return wm;
    }
};

namespace detail {
inline Eigen::VectorXd stable_softmax(const Eigen::VectorXd& o) {
    Eigen::VectorXd q = (o.array() - o.maxCoeff()).exp();
    return q / q.sum();
}
} // namespace detail

// One full-batch cross-entropy step; gradient accumulated sample-major so the
// result does not depend on any internal scheduling.
inline WeightMatrix full_step(const WeightMatrix& wm, const Dataset& ds, double lambda) {
    if (wm.w.cols() != ds.d) throw std::invalid_argument("full_step: dimension mismatch");
    const long l = wm.w.rows();
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(l, ds.d);
    Eigen::VectorXd x(ds.d);
    for (long i = 0; i < ds.n; ++i) {
        for (long j = 0; j < ds.d; ++j) x(j) = ds.at(i, j);
        Eigen::VectorXd q = detail::stable_softmax(wm.w * x);
        q(ds.labels[i]) -= 1.0;
        grad.noalias() += q * x.transpose();
    }
    WeightMatrix out;
    out.w = wm.w - (lambda / static_cast<double>(ds.n)) * grad;
    out.t = wm.t + 1;
    return out;
}

// Collapse the matrix to (f, u) and refuse if the sums the reduction relies
// on disagree by more than tol.
inline SymState reduce(const WeightMatrix& wm, const ModelParams& p, double tol = 1e-10) {
    if (wm.w.rows() != p.l || wm.w.cols() != p.d) throw std::invalid_argument("reduce: dimension mismatch");
    const long block = p.block();
    Eigen::MatrixXd sums(p.l, p.l); // sums(y, y') = sum_{i in A_y} w(y', i)
    for (long y = 0; y < p.l; ++y)
        for (long yp = 0; yp < p.l; ++yp)
            sums(y, yp) = wm.w.row(yp).segment(y * block, block).sum();
    const double f = sums(0, 0);
    const double u = p.l > 1 ? sums(0, 1) : f;
    for (long y = 0; y < p.l; ++y) {
        for (long yp = 0; yp < p.l; ++yp) {
            const double ref = (y == yp) ? f : u;
            if (std::abs(sums(y, yp) - ref) > tol)
                throw SymmetryBroken("reduce: weight sums differ across equivalent class pairs");
        }
    }
    return SymState{wm.t, f, u};
}

// Mean cross-entropy and argmax accuracy; ties go to the lowest class index.
inline std::pair<double, double> loss_and_accuracy(const WeightMatrix& wm, const Dataset& ds) {
    if (wm.w.cols() != ds.d) throw std::invalid_argument("loss_and_accuracy: dimension mismatch");
    double loss = 0.0;
    long correct = 0;
    Eigen::VectorXd x(ds.d);
    for (long i = 0; i < ds.n; ++i) {
        for (long j = 0; j < ds.d; ++j) x(j) = ds.at(i, j);
        Eigen::VectorXd o = wm.w * x;
        long best = 0;
        for (long y = 1; y < o.size(); ++y)
            if (o(y) > o(best)) best = y; // strict: first max wins
        Eigen::VectorXd q = detail::stable_softmax(o);
        loss += -std::log(q(ds.labels[i]));
        if (best == ds.labels[i]) ++correct;
    }
    return {loss / static_cast<double>(ds.n), static_cast<double>(correct) / static_cast<double>(ds.n)};
}

} // namespace phaselab
