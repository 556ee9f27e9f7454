#pragma once
// Desk-scale training track: a single dense layer + softmax classifier
// trained by seeded mini-batch SGD with snapshots at power-of-two iterations,
// an exact ridge linear decoder from the pre-softmax outputs back to the
// inputs, and a linear probe trained on frozen outputs for a second task.
// All randomness flows through one seeded generator with fixed accumulation
// order, so identical configs produce bit-identical metrics.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "phaselab/idx_io.hpp"
#include "phaselab/rng.hpp"

namespace phaselab {

enum class LossKind { CrossEntropy, Hinge };

struct TrainConfig {
    double lr = 0.002;
    long batch = 128;
    long epochs = 256;
    LossKind loss = LossKind::CrossEntropy;
    std::uint64_t seed = 0;
    bool bias = true;

    void validate() const {
        if (!(lr >= 0)) throw std::invalid_argument("TrainConfig: lr must be non-negative");
        if (batch < 1 || epochs < 1) throw std::invalid_argument("TrainConfig: batch and epochs must be positive");
    }
};

struct Checkpoint {
    long t = 0;
    Eigen::MatrixXd weights; // classes x d
    Eigen::VectorXd bias;    // classes
    double train_acc = 0;
    double test_acc = 0;
    double recon_loss = std::numeric_limits<double>::quiet_NaN(); // filled by fit_decoder
    std::optional<double> probe_acc;

    Eigen::MatrixXd outputs(const RealDataset& ds) const {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
            ds.images.data(), ds.n, ds.d);
        Eigen::MatrixXd o = X * weights.transpose();
        o.rowwise() += bias.transpose();
        return o; // n x classes, pre-softmax
    }
};

namespace detail {

inline double accuracy(const Eigen::MatrixXd& outputs, const std::vector<int>& labels) {
    long correct = 0;
    for (long i = 0; i < outputs.rows(); ++i) {
        long best = 0;
        for (long y = 1; y < outputs.cols(); ++y)
            if (outputs(i, y) > outputs(i, best)) best = y;
        if (best == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(outputs.rows());
}

// dL/do for one mini-batch, written into `go` (rows = batch).
inline void loss_grad(const Eigen::MatrixXd& o, const std::vector<int>& labels,
                      const std::vector<long>& batch_rows, LossKind loss, Eigen::MatrixXd& go) {
    const long b = static_cast<long>(batch_rows.size());
    go.resize(b, o.cols());
    if (loss == LossKind::CrossEntropy) {
        for (long r = 0; r < b; ++r) {
            Eigen::RowVectorXd q = (o.row(r).array() - o.row(r).maxCoeff()).exp();
            q /= q.sum();
            go.row(r) = q;
            go(r, labels[batch_rows[r]]) -= 1.0;
        }
    } else { // multiclass hinge with margin 1: sum_{y' != y} max(0, 1 + o_{y'} - o_y)
        go.setZero();
        for (long r = 0; r < b; ++r) {
            const long y = labels[batch_rows[r]];
            for (long c = 0; c < o.cols(); ++c) {
                if (c == y) continue;
                if (1.0 + o(r, c) - o(r, y) > 0.0) {
                    go(r, c) += 1.0;
                    go(r, y) -= 1.0;
                }
            }
        }
    }
}

struct DenseTrainer {
    Eigen::MatrixXd W; // classes x d
    Eigen::VectorXd b;

    void init(long classes, long d, std::uint64_t seed) {
        SplitMix64 rng(seed);
        const double sd = std::sqrt(1.0 / static_cast<double>(d));
        W.resize(classes, d);
        for (long y = 0; y < classes; ++y)
            for (long j = 0; j < d; ++j) W(y, j) = sd * rng.next_gaussian();
        b = Eigen::VectorXd::Zero(classes);
    }

    // runs `epochs` passes; calls on_checkpoint(t) for t = 0 and powers of two
    template <typename Matrix, typename Callback>
    void run(const Matrix& X, const std::vector<int>& labels, const TrainConfig& cfg, bool use_bias,
             Callback&& on_checkpoint) {
        const long n = X.rows();
        const long total = cfg.epochs * ((n + cfg.batch - 1) / cfg.batch);
        std::vector<long> order(n);
        std::iota(order.begin(), order.end(), 0);
        SplitMix64 shuffle_rng(cfg.seed + 0x5851f42d4c957f2dULL);
        long next_ckpt = 1;
        long t = 0;
        on_checkpoint(0L);
        std::vector<long> rows;
        Eigen::MatrixXd xb, ob, go;
        for (long ep = 0; ep < cfg.epochs && t < total; ++ep) {
            shuffle_in_place(order, shuffle_rng);
            for (long s = 0; s < n && t < total; s += cfg.batch) {
                const long b_n = std::min(cfg.batch, n - s);
                rows.assign(order.begin() + s, order.begin() + s + b_n);
                xb.resize(b_n, X.cols());
                for (long r = 0; r < b_n; ++r) xb.row(r) = X.row(rows[r]);
                ob.noalias() = xb * W.transpose();
                if (use_bias) ob.rowwise() += b.transpose();
                loss_grad(ob, labels, rows, cfg.loss, go);
                const double scale = cfg.lr / static_cast<double>(b_n);
                W.noalias() -= scale * (go.transpose() * xb);
                if (use_bias) b -= scale * go.colwise().sum().transpose();
                ++t;
                if (t == next_ckpt) {
                    on_checkpoint(t);
                    next_ckpt *= 2;
                }
            }
        }
    }
};

} // namespace detail

// Train the single-layer classifier; snapshot weights plus train/test
// accuracy at t = 0, 1, 2, 4, ...
inline std::vector<Checkpoint> train_f0(const RealDataset& train, const RealDataset& test,
                                        const TrainConfig& cfg) {
    cfg.validate();
    if (train.split != Split::Train) throw std::invalid_argument("train_f0: first dataset must be the train split");
    if (train.d != test.d) throw std::invalid_argument("train_f0: train/test dimension mismatch");
    const long classes = std::max(train.classes, test.classes);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        train.images.data(), train.n, train.d);
    detail::DenseTrainer tr;
    tr.init(classes, train.d, cfg.seed);
    std::vector<Checkpoint> out;
    tr.run(X, train.labels, cfg, cfg.bias, [&](long t) {
        Checkpoint ck;
        ck.t = t;
        ck.weights = tr.W;
        ck.bias = cfg.bias ? tr.b : Eigen::VectorXd::Zero(classes);
        ck.train_acc = detail::accuracy(ck.outputs(train), train.labels);
        ck.test_acc = detail::accuracy(ck.outputs(test), test.labels);
        out.push_back(std::move(ck));
    });
    return out;
}

// Exact ridge least squares from pre-softmax outputs to inputs, fit on the
// train split, scored as mean squared reconstruction norm on the held-out
// split.
inline double fit_decoder(const Checkpoint& ck, const RealDataset& train, const RealDataset& heldout,
                          double ridge = 1e-6) {
    const Eigen::MatrixXd O = ck.outputs(train);
    const long m = O.cols();
    Eigen::MatrixXd A(O.rows(), m + 1);
    A.leftCols(m) = O;
    A.col(m).setOnes();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
        train.images.data(), train.n, train.d);
    Eigen::MatrixXd gram = A.transpose() * A;
    gram.diagonal().array() += ridge;
    const Eigen::MatrixXd coef = gram.ldlt().solve(A.transpose() * X);

    const Eigen::MatrixXd Oe = ck.outputs(heldout);
    Eigen::MatrixXd Ae(Oe.rows(), m + 1);
    Ae.leftCols(m) = Oe;
    Ae.col(m).setOnes();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Xe(
        heldout.images.data(), heldout.n, heldout.d);
    return (Ae * coef - Xe).rowwise().squaredNorm().mean();
}

// Dense layer + softmax trained by SGD on the frozen classifier outputs;
// returns accuracy on the probe task's held-out split.
inline double linear_probe(const Checkpoint& ck, const RealDataset& probe_train,
                           const RealDataset& probe_test, double lr = 0.003, long epochs = 20,
                           long batch = 128, std::uint64_t seed = 0) {
    if (probe_train.d != ck.weights.cols() || probe_test.d != ck.weights.cols())
        throw std::invalid_argument("linear_probe: probe data dimension does not match the frozen layer");
    const Eigen::MatrixXd O = ck.outputs(probe_train);
    const Eigen::MatrixXd Ot = ck.outputs(probe_test);
    const long classes = std::max(probe_train.classes, probe_test.classes);
    TrainConfig cfg;
    cfg.lr = lr;
    cfg.batch = batch;
    cfg.epochs = epochs;
    cfg.seed = seed;
    detail::DenseTrainer tr;
    tr.init(classes, O.cols(), seed);
    tr.run(O, probe_train.labels, cfg, true, [](long) {});
    Eigen::MatrixXd logits = Ot * tr.W.transpose();
    logits.rowwise() += tr.b.transpose();
    return detail::accuracy(logits, probe_test.labels);
}

struct TransferRow {
    long t = 0;
    double source_acc = 0;
    double recon_loss = 0;
    double probe_acc = 0;
};

struct TransferCurve {
    std::vector<TransferRow> rows;
    std::vector<TransferRow> normalized; // min-max per column, t untouched
};

inline TransferCurve transfer_curve(const RealDataset& source_train, const RealDataset& source_test,
                                    const RealDataset& probe_train, const RealDataset& probe_test,
                                    const TrainConfig& cfg) {
    if (source_train.d != probe_train.d)
        throw std::invalid_argument("transfer_curve: source and probe input dimensions differ");
    std::vector<Checkpoint> cks = train_f0(source_train, source_test, cfg);
    TransferCurve out;
    for (Checkpoint& ck : cks) {
        ck.recon_loss = fit_decoder(ck, source_train, source_test);
        ck.probe_acc = linear_probe(ck, probe_train, probe_test, 0.003, 20, 128, cfg.seed);
        out.rows.push_back({ck.t, ck.test_acc, ck.recon_loss, *ck.probe_acc});
    }
    auto norm = [](std::vector<double>& v) {
        const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
        const double lo = *mn_it, hi = *mx_it;
        for (double& x : v) x = hi > lo ? (x - lo) / (hi - lo) : 0.5;
    };
    std::vector<double> a, r, p;
    for (const TransferRow& row : out.rows) {
        a.push_back(row.source_acc);
        r.push_back(row.recon_loss);
        p.push_back(row.probe_acc);
    }
    norm(a);
    norm(r);
    norm(p);
    for (std::size_t i = 0; i < out.rows.size(); ++i)
        out.normalized.push_back({out.rows[i].t, a[i], r[i], p[i]});
    return out;
}

} // namespace phaselab
