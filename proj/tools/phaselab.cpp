// Command-line surface: simulation runs, bound certification, empirical
// experiments, CSV/SVG export.
//
// Exit codes: 0 success (all checks passed), 2 certification failure,
// 1 usage or I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "phaselab/args.hpp"
#include "phaselab/certify.hpp"
#include "phaselab/idx_io.hpp"
#include "phaselab/pipelines.hpp"
#include "phaselab/svg.hpp"

namespace {

using namespace phaselab;

void usage(std::ostream& os) {
    os << "usage: phaselab <command> [--flags] [--config FILE]\n"
          "\n"
          "commands:\n"
          "  simulate       --l L --d D --k K --lambda LR --t-max T [--n N] [--init det|random]\n"
          "                 [--seed S] [--stride S]   reduced-dynamics trajectory table\n"
          "  oracle-check   --l L --d D --n N --k K --lambda LR --steps T\n"
          "                 reduced dynamics vs explicit matrix descent\n"
          "  certify        --suite stage-bounds|crossing|series|tails|concentration|all\n"
          "                 [--c-f C]                 certificate tables, exit 2 on failure\n"
          "  phases         --l L --d D --k K --lambda LR [--t-max T]\n"
          "                 reconstruction-error phase detection\n"
          "  empirical      --train-images P --train-labels P --test-images P --test-labels P\n"
          "                 (or --cifar-train P1,P2,... --cifar-test P) [--n N] [--loss ce|hinge]\n"
          "                 [--lr R] [--batch B] [--epochs E] [--seed S]\n"
          "  transfer       empirical flags plus --probe-train-images/labels,\n"
          "                 --probe-test-images/labels\n"
          "  concentration  --l L --d D [--trials T] [--seed S]\n"
          "\n"
          "common flags: --out DIR (env PHASELAB_OUT overrides), --format csv|svg|both,\n"
          "              --config FILE (key = value lines, # comments; flags win)\n";
}

struct Output {
    std::filesystem::path dir;
    std::string format; // csv | svg | both

    void emit(const Table& t, const std::string& stem, const PlotSpec* spec) const {
        std::filesystem::create_directories(dir);
        if (format == "csv" || format == "both") write_csv(t, (dir / (stem + ".csv")).string());
        if ((format == "svg" || format == "both") && spec != nullptr) {
            std::ofstream out(dir / (stem + ".svg"), std::ios::binary);
            out << render_svg(t, *spec);
        }
    }
};

ModelParams params_from(const Args& a) {
    ModelParams p;
    p.l = a.get_long("l", 10);
    p.d = a.get_long("d", 10 * p.l);
    p.n = a.get_long("n", 2 * p.l);
    p.k = a.get_double("k", 2.0);
    p.lambda = a.get_double("lambda", 0.01);
    p.seed = static_cast<std::uint64_t>(a.get_long("seed", 0));
    const std::string init = a.get("init", "det");
    if (init == "det" || init == "deterministic")
        p.init = InitMode::Deterministic;
    else if (init == "random")
        p.init = InitMode::Random;
    else
        throw UsageError("--init must be det or random");
    p.validate();
    return p;
}

int cmd_simulate(const Args& a, const Output& out) {
    const ModelParams p = params_from(a);
    const long t_max = a.get_long("t-max", 1000);
    const long stride = std::max(1L, a.get_long("stride", 1));
    Table t = simulate_table(p, t_max);
    if (stride > 1) {
        Table thin;
        thin.header = t.header;
        for (long i = 0; i < t.size(); i += stride) thin.rows.push_back(t.rows[i]);
        if ((t.size() - 1) % stride != 0) thin.rows.push_back(t.rows.back());
        t = std::move(thin);
    }
    PlotSpec spec;
    spec.columns = {"q_self_weak", "q_self_strong", "total_paper_gj", "total_exact_opt"};
    spec.title = "reduced dynamics l=" + std::to_string(p.l) + " k=" + format_double(p.k);
    out.emit(t, "simulate", &spec);
    std::cout << "simulate: " << t.size() << " rows, final f=" << format_double(t.rows.back()[1])
              << " u=" << format_double(t.rows.back()[2]) << "\n";
    return 0;
}

int cmd_oracle_check(const Args& a, const Output& out) {
    const ModelParams p = params_from(a);
    const long steps = a.get_long("steps", 1000);
    double max_dev = 0;
    Table t = oracle_check_table(p, steps, max_dev);
    PlotSpec spec;
    spec.columns = {"abs_df", "abs_du"};
    spec.title = "reduction deviation";
    out.emit(t, "oracle_check", &spec);
    const bool ok = max_dev < 1e-8;
    std::cout << (ok ? "PASS" : "FAIL") << " oracle-check: max deviation "
              << format_double(max_dev) << " over " << steps << " steps\n";
    return ok ? 0 : 2;
}

int cmd_phases(const Args& a, const Output& out) {
    const ModelParams p = params_from(a);
    const long t_max = a.get_long("t-max", 0);
    Trajectory tr;
    if (t_max > 0) {
        tr = simulate(p, t_max);
    } else {
        // grow until the weak self-probability saturates
        tr.params = p;
        SymState s = initial_state(p);
        tr.states.push_back(s);
        tr.probs.push_back(class_probs(s, p));
        const long cap = a.get_long("t-cap", 50'000'000);
        while (tr.probs.back().q_self_weak < 0.99 && s.t < cap) {
            s = step(s, p);
            tr.states.push_back(s);
            tr.probs.push_back(class_probs(s, p));
        }
    }
    const PhaseReport rep = detect_phases(tr, p);
    Table t = phases_table(tr, p);
    PlotSpec spec;
    spec.columns = {"q_self_weak", "total_paper"};
    spec.title = "reconstruction error phases";
    out.emit(t, "phases", &spec);
    const bool three = rep.verdict == PhaseVerdict::ThreePhases;
    std::cout << (three ? "PASS" : "FAIL") << " phases: verdict="
              << (three ? "ThreePhases" : "Degenerate") << " r_initial=" << format_double(rep.r_initial)
              << " r_min=" << format_double(rep.r_min) << "@t=" << rep.t_min_error
              << " r_final=" << format_double(rep.r_final) << " phase1_end=" << rep.phase1_end << "\n";
    return three ? 0 : 2;
}

int cmd_certify(const Args& a, const Output& out, std::string suite = "") {
    if (suite.empty()) suite = a.get("suite", "all");
    bool all_pass = true;
    bool ran = false;

    if (suite == "stage-bounds" || suite == "all") {
        ran = true;
        const auto certs = certify_stage_bounds({100, 1000, 10000}, {2.0, 3.0, 4.0},
                                                a.get_double("c-f", 2.0));
        out.emit(stage_certificates_table(certs), "stage_bounds", nullptr);
        for (const auto& c : certs) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.claim
                      << " fitted_constant=" << format_double(c.fitted_constant)
                      << " max_ratio_deviation=" << format_double(c.max_ratio_deviation) << "\n";
            all_pass = all_pass && c.pass;
        }
    }
    if (suite == "crossing" || suite == "all") {
        ran = true;
        const CrossingCertificate cert = certify_crossing_window(crossing_sweep());
        out.emit(crossing_table(cert), "crossing_window", nullptr);
        std::cout << (cert.pass ? "PASS" : "FAIL")
                  << " crossing-window [2t*,12t*]; fallback window [t*,6t*] "
                  << (cert.derived_pass ? "holds" : "fails") << "\n";
        all_pass = all_pass && cert.pass;
    }
    if (suite == "series" || suite == "all") {
        ran = true;
        Table t;
        t.header = {"expansion", "k", "l", "ratio_l", "ratio_4l", "shrink"};
        bool pass = true;
        for (double k : {2.0, 3.0, 4.0}) {
            const long l = 1000;
            const auto r1 = series_residuals(2.0 / l, 1.0 / l, k, l, SeriesRegime::Small);
            const auto r4 =
                series_residuals(2.0 / (4 * l), 1.0 / (4 * l), k, 4 * l, SeriesRegime::Small);
            for (int e = 0; e < 3; ++e) {
                const double shrink = r1[e].residual_ratio / r4[e].residual_ratio;
                pass = pass && shrink >= 2.8 && shrink <= 5.2;
                t.add_row({static_cast<double>(e), k, static_cast<double>(l),
                           r1[e].residual_ratio, r4[e].residual_ratio, shrink});
            }
        }
        out.emit(t, "series_residuals", nullptr);
        std::cout << (pass ? "PASS" : "FAIL") << " series-residuals quartering\n";
        all_pass = all_pass && pass;
    }
    if (suite == "tails" || suite == "all") {
        ran = true;
        Table t;
        t.header = {"a", "sigma", "lower", "exact", "upper", "lower_holds", "half_lower_holds"};
        bool upper_ok = true;
        for (double a_v : {0.1, 0.3, 0.5, 1.0, 2.0, 3.0, 5.0}) {
            for (double s_v : {0.25, 0.5, 1.0, 2.0, 10.0}) {
                const auto [lo, hi] = gaussian_tail_bounds(a_v, s_v);
                const double exact = gaussian_tail_exact(a_v, s_v);
                upper_ok = upper_ok && exact <= hi;
                t.add_row({a_v, s_v, lo, exact, hi, exact >= lo ? 1.0 : 0.0,
                           exact >= 0.5 * lo ? 1.0 : 0.0});
            }
        }
        out.emit(t, "gaussian_tails", nullptr);
        std::cout << (upper_ok ? "PASS" : "FAIL") << " gaussian-tail upper bound\n";
        all_pass = all_pass && upper_ok;
    }
    if (suite == "concentration" || suite == "all") {
        ran = true;
        ModelParams p;
        p.l = a.get_long("l", 100);
        p.d = a.get_long("d", 10000);
        p.n = 2 * p.l;
        p.k = 2;
        p.lambda = 0.0;
        p.init = InitMode::Random;
        const long trials = a.get_long("trials", 100000);
        const auto rep = init_concentration_mc(p, trials, static_cast<std::uint64_t>(a.get_long("seed", 0)));
        Table t;
        t.header = {"l", "d", "trials", "band", "fraction_within", "band_sqrt",
                    "fraction_within_sqrt", "sample_var", "floor"};
        const double floor = 1.0 - 4.0 / (static_cast<double>(p.l) * p.l);
        t.add_row({static_cast<double>(p.l), static_cast<double>(p.d),
                   static_cast<double>(trials), rep.band, rep.fraction_within, rep.band_sqrt,
                   rep.fraction_within_sqrt, rep.sample_var, floor});
        out.emit(t, "concentration", nullptr);
        const bool var_ok = std::abs(rep.sample_var - 1.0 / p.l) <= 0.05 / p.l;
        const bool pass = rep.fraction_within >= floor && var_ok;
        std::cout << (pass ? "PASS" : "FAIL") << " concentration: fraction "
                  << format_double(rep.fraction_within) << " (floor " << format_double(floor)
                  << "), var " << format_double(rep.sample_var) << ", wider-band fraction "
                  << format_double(rep.fraction_within_sqrt) << "\n";
        all_pass = all_pass && pass;
    }
    if (!ran) throw UsageError("unknown suite '" + suite + "'");
    return all_pass ? 0 : 2;
}

TrainConfig train_config_from(const Args& a) {
    TrainConfig cfg;
    cfg.lr = a.get_double("lr", 0.002);
    cfg.batch = a.get_long("batch", 128);
    cfg.epochs = a.get_long("epochs", 256);
    cfg.seed = static_cast<std::uint64_t>(a.get_long("seed", 0));
    const std::string loss = a.get("loss", "ce");
    if (loss == "ce" || loss == "cross-entropy")
        cfg.loss = LossKind::CrossEntropy;
    else if (loss == "hinge")
        cfg.loss = LossKind::Hinge;
    else
        throw UsageError("--loss must be ce or hinge");
    const std::string bias = a.get("bias", "on");
    if (bias == "on")
        cfg.bias = true;
    else if (bias == "off")
        cfg.bias = false;
    else
        throw UsageError("--bias must be on or off");
    cfg.validate();
    return cfg;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const std::size_t pos = csv.find(',', start);
        out.push_back(csv.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

RealDataset load_split(const Args& a, const std::string& img_key, const std::string& lab_key,
                       Split split, long subset) {
    RealDataset ds;
    const std::string cifar_key = split == Split::Train ? "cifar-train" : "cifar-test";
    if (a.has(cifar_key)) {
        ds = load_cifar10(split_list(a.get(cifar_key)), "cifar10", split);
    } else {
        if (!a.has(img_key) || !a.has(lab_key))
            throw UsageError("missing --" + img_key + " / --" + lab_key);
        ds = load_idx(a.get(img_key), a.get(lab_key), a.get(img_key), split);
    }
    if (subset > 0 && split == Split::Train) ds = ds.head(subset);
    return ds;
}

int cmd_empirical(const Args& a, const Output& out) {
    const TrainConfig cfg = train_config_from(a);
    const long subset = a.get_long("n", 10000);
    const RealDataset train = load_split(a, "train-images", "train-labels", Split::Train, subset);
    const RealDataset test = load_split(a, "test-images", "test-labels", Split::Test, 0);
    std::vector<Checkpoint> cks = train_f0(train, test, cfg);
    for (Checkpoint& ck : cks) ck.recon_loss = fit_decoder(ck, train, test);
    Table t = checkpoints_table(cks);
    PlotSpec spec;
    spec.columns = {"train_acc", "test_acc", "recon_loss"};
    spec.title = "classifier accuracy and reconstruction loss";
    out.emit(t, "empirical", &spec);
    std::cout << "empirical: " << cks.size() << " checkpoints, final test_acc "
              << format_double(cks.back().test_acc) << ", final recon "
              << format_double(cks.back().recon_loss) << "\n";
    return 0;
}

int cmd_transfer(const Args& a, const Output& out) {
    const TrainConfig cfg = train_config_from(a);
    const long subset = a.get_long("n", 10000);
    const RealDataset src_train = load_split(a, "train-images", "train-labels", Split::Train, subset);
    const RealDataset src_test = load_split(a, "test-images", "test-labels", Split::Test, 0);
    const RealDataset probe_train =
        load_split(a, "probe-train-images", "probe-train-labels", Split::Train, subset);
    const RealDataset probe_test =
        load_split(a, "probe-test-images", "probe-test-labels", Split::Test, 0);
    const TransferCurve tc = transfer_curve(src_train, src_test, probe_train, probe_test, cfg);
    Table t = transfer_table(tc);
    PlotSpec spec;
    spec.columns = {"source_acc", "recon_loss", "probe_acc"};
    spec.title = "transfer: source accuracy, reconstruction, probe accuracy";
    out.emit(t, "transfer", &spec);
    std::size_t best = 0;
    for (std::size_t i = 1; i < tc.rows.size(); ++i)
        if (tc.rows[i].probe_acc > tc.rows[best].probe_acc) best = i;
    std::cout << "transfer: probe_acc peaks at t=" << tc.rows[best].t << " ("
              << format_double(tc.rows[best].probe_acc) << "), source_acc there "
              << format_double(tc.rows[best].source_acc) << "\n";
    return 0;
}

int dispatch(const std::string& cmd, const Args& a, const Output& out) {
    if (cmd == "simulate") return cmd_simulate(a, out);
    if (cmd == "oracle-check") return cmd_oracle_check(a, out);
    if (cmd == "certify") return cmd_certify(a, out);
    if (cmd == "phases") return cmd_phases(a, out);
    if (cmd == "empirical") return cmd_empirical(a, out);
    if (cmd == "transfer") return cmd_transfer(a, out);
    if (cmd == "concentration") return cmd_certify(a, out, "concentration");
    throw UsageError("unknown command '" + cmd + "'");
}

} // namespace

int main(int argc, char** argv) {
    using namespace phaselab;
    if (argc < 2) {
        usage(std::cerr);
        return 1;
    }
    const std::string cmd = argv[1];
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        usage(std::cout);
        return 0;
    }
    try {
        Args args;
        args.parse_flags(argc, argv, 2);
        if (args.has("config")) args.load_config(args.get("config"));
        Output out;
        out.dir = args.get("out", ".");
        if (const char* env = std::getenv("PHASELAB_OUT"); env != nullptr && *env != '\0')
            out.dir = env;
        out.format = args.get("format", "csv");
        if (out.format != "csv" && out.format != "svg" && out.format != "both")
            throw UsageError("--format must be csv, svg or both");
        return dispatch(cmd, args, out);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        usage(std::cerr);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
