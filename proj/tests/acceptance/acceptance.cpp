// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "cli.hpp"
#include "oracles.hpp"
#include "random_inputs.hpp"

#include "vqc/dataio.hpp"
#include "vqc/encoding.hpp"
#include "vqc/metrics.hpp"
#include "vqc/model.hpp"
#include "vqc/rng.hpp"
#include "vqc/statevector.hpp"
#include "vqc/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using namespace vqc;
using vqc::testing::random_angle;
using vqc::testing::random_circuit;
using vqc::testing::random_state;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

Outcome gate_algebra() {
    Rng rng(101);
    bool ok = true;
    std::ostringstream d;

    const Matrix2 r0 = rot_matrix({0.0, 0.0, 0.0});
    const bool identity = r0[0] == Complex{1, 0} && r0[1] == Complex{0, 0} &&
                          r0[2] == Complex{0, 0} && r0[3] == Complex{1, 0};
    ok &= identity;
    d << "R(0,0,0)=I " << (identity ? "yes" : "no");

    bool cnot_inverse = true;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.below(5);
        const StateVector s = random_state(n, rng);
        StateVector twice = s;
        const std::size_t c = rng.below(n);
        const std::size_t tg = (c + 1 + rng.below(n - 1)) % n;
        twice.apply_cnot(c, tg);
        twice.apply_cnot(c, tg);
        cnot_inverse &= std::ranges::equal(twice.amplitudes(), s.amplitudes());
    }
    ok &= cnot_inverse;
    d << "; CNOT^2=I " << (cnot_inverse ? "yes" : "no");

    double norm_dev = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.below(8);
        StateVector s = random_state(n, rng);
        s.apply(random_circuit(n, 100, rng));
        norm_dev = std::max(norm_dev, std::abs(s.norm_squared() - 1.0));
    }
    ok &= norm_dev <= 1e-10;
    d << "; norm dev " << sci(norm_dev) << " (tol 1e-10)";

    double oracle_dev = 0.0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng.below(3);
        const Circuit circ = random_circuit(n, 1 + rng.below(30), rng);
        StateVector s = random_state(n, rng);
        const auto ref = oracle::apply(oracle::full_unitary_oracle(circ, n), s.amplitudes());
        s.apply(circ);
        oracle_dev = std::max(oracle_dev, max_abs_diff(s.amplitudes(), ref));
    }
    ok &= oracle_dev <= 1e-12;
    d << "; oracle dev " << sci(oracle_dev) << " (tol 1e-12)";
    return {ok, d.str()};
}

Outcome rot_decomposition() {
    Rng rng(202);
    double dev = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(4);
        const std::size_t q = rng.below(n);
        const RotationAngles a{random_angle(rng), random_angle(rng), random_angle(rng)};
        StateVector fused = random_state(n, rng);
        StateVector composed = fused;
        fused.apply_rot(q, a);
        composed.apply_rz(q, a.phi);
        composed.apply_ry(q, a.theta);
        composed.apply_rz(q, a.omega);
        dev = std::max(dev, max_abs_diff(fused.amplitudes(), composed.amplitudes()));
    }
    return {dev <= 1e-12, "1000 pairs, max dev " + sci(dev) + " (tol 1e-12)"};
}

Outcome gradient_check() {
    Rng rng(303);
    const EncodingConfig enc{EncodingScheme::amplitude, 4, 16, 0.0};
    constexpr double margin = 0.15;
    double dev = 0.0;
    std::size_t partials = 0;
    std::size_t nonzero = 0;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const EnsembleModel model = init_ensemble(enc, 2, 1000 + trial, false, std::numbers::pi);
        std::vector<double> x(16);
        for (auto &v : x) {
            v = rng.normal();
        }
        const StateVector encoded = encode(x, enc);
        const std::size_t y = rng.below(kNumClasses);
        const auto analytic = sample_loss_gradient(model, encoded, y, margin, 1.0);
        const auto fd = oracle::finite_difference_loss_gradient(model, encoded, y, margin, 1.0, 1e-5);
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            const auto g = analytic[c].angles.flat();
            for (std::size_t k = 0; k < g.size(); ++k) {
                dev = std::max(dev, std::abs(g[k] - fd[c][k]));
                nonzero += g[k] != 0.0;
                ++partials;
            }
        }
    }
    return {dev <= 1e-6, "20 models (4 qubits, 2 layers), " + std::to_string(partials) +
                             " partials (" + std::to_string(nonzero) + " nonzero), max |diff| " +
                             sci(dev) + " (h 1e-5, tol 1e-6)"};
}

Outcome loss_arithmetic() {
    const Scores s{0.9, -0.5, -0.2, -0.8};
    const double a = margin_loss(s, 1, 0.2, 1.0);
    const double b = margin_loss(s, 0, 0.2, 1.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "y=1 -> %.17g (want 2.1), y=0 -> %.17g (want 0)", a, b);
    return {a == 2.1 && b == 0.0, buf};
}

Outcome metric_oracles() {
    Rng rng(404);
    std::size_t mismatches = 0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + rng.below(199);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse quantisation forces plenty of ties.
            scores[i] = static_cast<double>(rng.below(20)) / 10.0 - 1.0;
            labels[i] = static_cast<int>(rng.below(2));
        }
        labels[0] = 0;
        labels[1] = 1;
        mismatches += auc_ovr(scores, labels) != oracle::auc_pair_counting(scores, labels);
    }

    constexpr std::size_t n = 2000;
    std::vector<Scores> scores(n);
    std::vector<std::size_t> truths(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto &s : scores[i]) {
            s = rng.uniform(-1.0, 1.0);
        }
        truths[i] = rng.below(kNumClasses);
    }
    const double macro = make_report(scores, truths).macro_auc.value_or(-1.0);
    const bool scrambled_ok = std::abs(macro - 0.5) <= 0.1;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "50 datasets, %zu mismatches vs pair counting; scrambled macro-AUC %.4f "
                  "(want 0.5 +/- 0.1, n=2000)",
                  mismatches, macro);
    return {mismatches == 0 && scrambled_ok, buf};
}

struct E2eSetup {
    Dataset data = synth_blobs(50, 8, 10.0, 7);
    EncodingConfig enc{EncodingScheme::amplitude, 3, 8, 0.0};
    TrainConfig config;
    E2eSetup() {
        config.max_epochs = 200;
        config.seed = 7;
        config.learning_rate = 0.01;
        config.margin = 0.15;
        config.optimizer = OptimizerKind::adam;
    }
};

Outcome end_to_end() {
    const E2eSetup s;
    const auto start = std::chrono::steady_clock::now();
    const TrainResult r = train(s.data, s.data, s.config, init_ensemble(s.enc, 2, 7));
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double acc = evaluate_loss(r.model, s.data, 0.15, s.config.class_weights).accuracy;
    // First epoch at which the training accuracy reached the target.
    std::size_t reached = 0;
    for (const auto &e : r.report.epochs) {
        if (e.train_acc >= 0.9) {
            reached = e.epoch;
            break;
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "train accuracy %.4f after %zu epochs (>= 0.90 first at epoch %zu), %.1f s "
                  "(limit 300 s)",
                  acc, r.report.epochs.size(), reached, secs);
    return {acc >= 0.9 && secs < 300.0, buf};
}

int cli(std::vector<std::string> args, std::string *stdout_text = nullptr) {
    args.insert(args.begin(), "vqc");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (stdout_text != nullptr) {
        *stdout_text = out.str();
    }
    if (code != 0) {
        std::cerr << err.str();
    }
    return code;
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("vqc_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    auto p = [&](const char *name) { return (dir / name).string(); };
    const std::vector<std::string> base{"train", "--synth", "blobs", "--qubits", "3", "--layers",
                                        "2", "--epochs", "40", "--seed", "7"};
    bool ok = true;
    std::ostringstream d;
    for (auto [name, workers] : {std::pair{"a.vqc", "1"}, {"b.vqc", "1"}, {"c.vqc", "4"}}) {
        auto args = base;
        args.insert(args.end(), {"--workers", workers, "--out", p(name)});
        ok &= cli(args) == 0;
    }
    ok &= cli({"synth", "--seed", "7", "--out", p("d.csv")}) == 0;
    for (auto [model, json, workers] :
         {std::tuple{"a.vqc", "ra.json", "1"}, {"b.vqc", "rb.json", "1"}, {"c.vqc", "rc.json", "3"}}) {
        ok &= cli({"eval", "--model", p(model), "--data", p("d.csv"), "--json", p(json),
                   "--workers", workers}) == 0;
    }
    if (ok) {
        const bool same_runs = read_file(p("a.vqc")) == read_file(p("b.vqc"));
        const bool same_workers = read_file(p("a.vqc")) == read_file(p("c.vqc"));
        const bool same_reports = read_file(p("ra.json")) == read_file(p("rb.json")) &&
                                  read_file(p("ra.json")) == read_file(p("rc.json"));
        // The library path must agree with itself too, independent of the CLI.
        const E2eSetup s;
        TrainConfig c1 = s.config, c4 = s.config;
        c1.max_epochs = c4.max_epochs = 20;
        c4.workers = 4;
        const auto m1 = train(s.data, s.data, c1, init_ensemble(s.enc, 2, 7)).model;
        const auto m4 = train(s.data, s.data, c4, init_ensemble(s.enc, 2, 7)).model;
        const bool same_lib = model_to_string(m1) == model_to_string(m4);
        ok = same_runs && same_workers && same_reports && same_lib;
        d << "model files identical across runs " << (same_runs ? "yes" : "no")
          << ", across 1/4 workers " << (same_workers ? "yes" : "no") << "; eval reports identical "
          << (same_reports ? "yes" : "no") << "; library 1/4 workers " << (same_lib ? "yes" : "no");
    } else {
        d << "a CLI step failed";
    }
    fs::remove_all(dir);
    return {ok, d.str()};
}

Outcome reference_numbers() {
    return {true, "published blind-test macro-AUC 0.7133 / macro-F1 0.5587 are reference only; "
                  "that test set is not public, nothing is asserted against them"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"gate algebra", gate_algebra},
        {"rot decomposition", rot_decomposition},
        {"gradient check", gradient_check},
        {"loss arithmetic", loss_arithmetic},
        {"metric oracles", metric_oracles},
        {"end-to-end learning", end_to_end},
        {"determinism", determinism},
        {"reference numbers", reference_numbers},
    };
    int failures = 0;
    for (const auto &[name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS  " : "FAIL  ") << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
              << '\n';
    return failures == 0 ? 0 : 1;
}
