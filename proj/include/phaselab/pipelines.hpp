#pragma once
// Table builders behind the command-line surface. The acceptance and
// determinism checks run these directly, so the bytes they compare are the
// bytes the tool writes.

#include <cmath>
#include <string>
#include <vector>

#include "phaselab/certify.hpp"
#include "phaselab/dynamics.hpp"
#include "phaselab/model.hpp"
#include "phaselab/oracle.hpp"
#include "phaselab/reconstruction.hpp"
#include "phaselab/table.hpp"
#include "phaselab/train.hpp"

namespace phaselab {

inline Table simulate_table(const ModelParams& p, long t_max) {
    const Trajectory tr = simulate(p, t_max);
    Table t;
    t.header = {"t",       "f",        "u",          "q_self_weak", "q_self_strong",
                "q_cross_weak", "q_cross_strong", "r1",          "rk",
                "r0_weak", "r0_strong", "total_paper_gj", "total_exact_gj", "total_exact_opt"};
    for (long i = 0; i < tr.length(); ++i) {
        const SymState& s = tr.states[i];
        const ClassProbs& q = tr.probs[i];
        const bool collapsed = std::abs(q.q_self_strong - q.q_cross_strong) < 1e-14;
        const ReconFit fit = (s.t == 0 || collapsed) ? fit_t0(p) : fit_gj(q, p.k);
        const ErrorBreakdown e = error_breakdown(fit, q, p);
        const ErrorBreakdown eo = error_breakdown(fit_optimal(q, p), q, p);
        t.add_row({static_cast<double>(s.t), s.f, s.u, q.q_self_weak, q.q_self_strong,
                   q.q_cross_weak, q.q_cross_strong, e.r1, e.rk, e.r0_weak, e.r0_strong,
                   e.total_paper, e.total_exact, eo.total_exact});
    }
    return t;
}

// Runs the reduced dynamics and the explicit-matrix descent side by side and
// reports per-step deviations of the reduced sums.
inline Table oracle_check_table(const ModelParams& p, long steps, double& max_dev) {
    const Dataset ds = generate_dataset(p);
    WeightMatrix wm = WeightMatrix::initial(p);
    SymState s = initial_state(p);
    Table t;
    t.header = {"t", "f_reduced", "u_reduced", "f_full", "u_full", "abs_df", "abs_du"};
    max_dev = 0.0;
    for (long i = 0; i <= steps; ++i) {
        const SymState full = reduce(wm, p);
        const double df = std::abs(full.f - s.f);
        const double du = std::abs(full.u - s.u);
        max_dev = std::max(max_dev, std::max(df, du));
        t.add_row({static_cast<double>(i), s.f, s.u, full.f, full.u, df, du});
        if (i == steps) break;
        wm = full_step(wm, ds, p.lambda);
        s = step(s, p);
    }
    return t;
}

inline Table phases_table(const Trajectory& tr, const ModelParams& p) {
    Table t;
    t.header = {"t", "f", "u", "q_self_weak", "total_paper"};
    for (long i = 0; i < tr.length(); ++i) {
        const SymState& s = tr.states[i];
        const ClassProbs& q = tr.probs[i];
        t.add_row({static_cast<double>(s.t), s.f, s.u, q.q_self_weak,
                   recon_total_paper(s, q, p)});
    }
    return t;
}

inline Table checkpoints_table(const std::vector<Checkpoint>& cks) {
    Table t;
    t.header = {"t", "train_acc", "test_acc", "recon_loss"};
    for (const Checkpoint& ck : cks)
        t.add_row({static_cast<double>(ck.t), ck.train_acc, ck.test_acc, ck.recon_loss});
    return t;
}

inline Table transfer_table(const TransferCurve& tc) {
    Table t;
    t.header = {"t",         "source_acc", "recon_loss", "probe_acc",
                "source_acc_norm", "recon_loss_norm", "probe_acc_norm"};
    for (std::size_t i = 0; i < tc.rows.size(); ++i) {
        const TransferRow& r = tc.rows[i];
        const TransferRow& n = tc.normalized[i];
        t.add_row({static_cast<double>(r.t), r.source_acc, r.recon_loss, r.probe_acc,
                   n.source_acc, n.recon_loss, n.probe_acc});
    }
    return t;
}

// Canonical small-step tuples for the crossing-window certification.
inline std::vector<ModelParams> crossing_sweep() {
    std::vector<ModelParams> sweep;
    const long ls[] = {5, 10, 10, 20, 20, 50, 50, 100, 100, 200};
    const double ks[] = {2, 2, 3, 2, 4, 2, 3, 2, 3, 2};
    const double lams[] = {1e-3, 1e-3, 5e-4, 1e-3, 5e-4, 2e-3, 1e-3, 5e-3, 2e-3, 5e-3};
    for (int i = 0; i < 10; ++i) {
        ModelParams p;
        p.l = ls[i];
        p.d = 10 * ls[i];
        p.n = 2 * ls[i];
        p.k = ks[i];
        p.lambda = lams[i];
        sweep.push_back(p);
    }
    return sweep;
}

inline Table stage_certificates_table(const std::vector<BoundCertificate>& certs) {
    Table t;
    t.header = {"claim_index", "l", "k", "f", "measured", "predicted_scale", "constant",
                "fitted_constant", "max_ratio_deviation", "pass"};
    for (std::size_t ci = 0; ci < certs.size(); ++ci) {
        const BoundCertificate& c = certs[ci];
        for (const BoundCertificate::Row& r : c.sweep)
            t.add_row({static_cast<double>(ci), static_cast<double>(r.params.l), r.params.k, r.f,
                       r.measured, r.predicted_scale, r.constant(), c.fitted_constant,
                       c.max_ratio_deviation, c.pass ? 1.0 : 0.0});
    }
    return t;
}

inline Table crossing_table(const CrossingCertificate& cert) {
    Table t;
    t.header = {"l", "d", "k", "lambda", "f_target", "t_star", "t_measured",
                "window_lo", "window_hi", "in_window", "in_derived_window", "side_condition"};
    for (const CrossingResult& r : cert.rows)
        t.add_row({static_cast<double>(r.params.l), static_cast<double>(r.params.d), r.params.k,
                   r.params.lambda, r.f_target, r.t_star, static_cast<double>(r.t_measured),
                   2.0 * r.t_star, 12.0 * r.t_star, r.in_window ? 1.0 : 0.0,
                   r.in_derived_window ? 1.0 : 0.0, r.side_condition ? 1.0 : 0.0});
    return t;
}

} // namespace phaselab
