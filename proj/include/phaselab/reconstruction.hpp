#pragma once
// Linear reconstruction of input attributes from classifier outputs, reduced
// to the four archetype points (abscissa = softmax probability of the class
// owning the attribute, ordinate = attribute value):
//   (q_cross_weak, 0)  (q_cross_strong, 0)  (q_self_weak, 1)  (q_self_strong, k)
//
// Three fits are supported:
//   ConstantT0  — the degenerate-start constant (1+k)/l
//   TwoPointGj  — the line through (q_cross_strong, 0) and (q_self_strong, k)
//   OptimalLS   — exact frequency-weighted least squares over all four points
//
// Two totals are reported. total_exact weights each archetype by its true
// sample frequency: 1/(2l) for each value group and (1-1/l)/2 for each zero
// group. total_paper is the headline weighting used by the closed-form
// results this module is checked against: 1/l per value group and (1-2/l)
// for the pooled zero groups.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "phaselab/model.hpp"
#include "phaselab/oracle.hpp"

namespace phaselab {

struct DegenerateAnchor : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ReconKind { ConstantT0, TwoPointGj, OptimalLS };

struct ReconFit {
    ReconKind kind = ReconKind::ConstantT0;
    double slope = 0.0;
    double intercept = 0.0;

    double eval(double q) const { return slope * q + intercept; }
};

inline ReconFit fit_gj(const ClassProbs& q, double k) {
    const double gap = q.q_self_strong - q.q_cross_strong;
    if (std::abs(gap) < 1e-14)
        throw DegenerateAnchor("fit_gj: strong anchors coincide (use fit_t0)");
    ReconFit fit;
    fit.kind = ReconKind::TwoPointGj;
    fit.slope = k / gap;
    fit.intercept = -fit.slope * q.q_cross_strong;
    return fit;
}

inline ReconFit fit_t0(const ModelParams& p) {
    return ReconFit{ReconKind::ConstantT0, 0.0, (1.0 + p.k) / static_cast<double>(p.l)};
}

inline ReconFit fit_optimal(const ClassProbs& q, const ModelParams& p) {
    const double l = static_cast<double>(p.l);
    const double w0 = (1.0 - 1.0 / l) / 2.0; // each zero group
    const double wv = 1.0 / (2.0 * l);       // each value group
    const double xs[4] = {q.q_cross_weak, q.q_cross_strong, q.q_self_weak, q.q_self_strong};
    const double ys[4] = {0.0, 0.0, 1.0, p.k};
    const double ws[4] = {w0, w0, wv, wv};
    double wsum = 0, mx = 0, my = 0;
    for (int i = 0; i < 4; ++i) {
        wsum += ws[i];
        mx += ws[i] * xs[i];
        my += ws[i] * ys[i];
    }
    mx /= wsum;
    my /= wsum;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < 4; ++i) {
        sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
        sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    }
    ReconFit fit;
    fit.kind = ReconKind::OptimalLS;
    if (sxx < 1e-28) { // all abscissae coincide: weighted-mean constant
        fit.slope = 0.0;
        fit.intercept = my;
    } else {
        fit.slope = sxy / sxx;
        fit.intercept = my - fit.slope * mx;
    }
    return fit;
}

struct ErrorBreakdown {
    double r1 = 0;
    double rk = 0;
    double r0_weak = 0;
    double r0_strong = 0;
    double total_paper = 0;
    double total_exact = 0;
};

inline ErrorBreakdown error_breakdown(const ReconFit& fit, const ClassProbs& q, const ModelParams& p) {
    const double l = static_cast<double>(p.l);
    ErrorBreakdown e;
    const double g_sw = fit.eval(q.q_self_weak);
    const double g_ss = fit.eval(q.q_self_strong);
    const double g_cw = fit.eval(q.q_cross_weak);
    const double g_cs = fit.eval(q.q_cross_strong);
    e.r1 = (1.0 - g_sw) * (1.0 - g_sw);
    e.rk = (p.k - g_ss) * (p.k - g_ss);
    e.r0_weak = g_cw * g_cw;
    e.r0_strong = g_cs * g_cs;
    e.total_paper = (e.r1 + e.rk) / l + (1.0 - 2.0 / l) * (e.r0_weak + e.r0_strong) / 2.0;
    e.total_exact = (e.r1 + e.rk) / (2.0 * l) + (1.0 - 1.0 / l) * (e.r0_weak + e.r0_strong) / 2.0;
    return e;
}

// Brute-force check of the archetype algebra: fit one linear decoder from the
// per-sample softmax probability vector (plus bias) to all d attributes at
// once and return the mean squared error over attributes and samples. The
// probability vector lives on the simplex, so per attribute this spans the
// same function class as the scalar fits above; the value should match
// error_breakdown(fit_optimal(...)).total_exact.
inline double reconstruct_full(const Dataset& ds, const WeightMatrix& wm, double ridge = 1e-8) {
    if (wm.w.cols() != ds.d) throw std::invalid_argument("reconstruct_full: dimension mismatch");
    const long l = wm.w.rows();
    Eigen::MatrixXd A(ds.n, l + 1);
    Eigen::VectorXd x(ds.d);
    for (long i = 0; i < ds.n; ++i) {
        for (long j = 0; j < ds.d; ++j) x(j) = ds.at(i, j);
        A.row(i).head(l) = detail::stable_softmax(wm.w * x).transpose();
        A(i, l) = 1.0;
    }
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        ds.inputs.data(), ds.n, ds.d);
    Eigen::MatrixXd gram = A.transpose() * A;
    gram.diagonal().array() += ridge;
    Eigen::MatrixXd coef = gram.ldlt().solve(A.transpose() * X);
    const double sq = (A * coef - X).squaredNorm();
    return sq / (static_cast<double>(ds.n) * static_cast<double>(ds.d));
}

} // namespace phaselab
