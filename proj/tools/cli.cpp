#include "cli.hpp"

#include "vqc/dataio.hpp"
#include "vqc/errors.hpp"
#include "vqc/metrics.hpp"
#include "vqc/model.hpp"
#include "vqc/rng.hpp"
#include "vqc/training.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

namespace vqc::cli {

namespace {

struct TrainArgs {
    std::string train_path;
    std::string val_path;
    std::string synth;
    std::size_t n_per_class = 50;
    std::size_t dim = 8;
    double separation = 10.0;
    double val_fraction = 0.2;
    std::string encoding = "amplitude";
    std::size_t qubits = 0; // 0 = derive from the data
    std::size_t layers = kDefaultLayers;
    bool bias = false;
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    double lr = 0.01;
    double margin = 0.15;
    std::string optimizer = "adam";
    std::size_t patience = 0; // 0 = no early stopping
    double min_delta = 0.0;
    std::vector<double> class_weights{1.0, 1.0, 1.0, 1.0};
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out;
    std::string log;
};

struct EvalArgs {
    std::string model;
    std::string data;
    std::string json;
    std::size_t workers = 1;
};

struct PredictArgs {
    std::string model;
    std::string data;
    std::string out;
};

struct GradcheckArgs {
    std::size_t trials = 20;
    std::size_t qubits = 4;
    std::size_t layers = 2;
    double h = 1e-5;
    double tol = 1e-6;
    double margin = 0.15;
    std::uint64_t seed = 0;
};

struct SynthArgs {
    std::size_t n_per_class = 50;
    std::size_t dim = 8;
    double separation = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

std::string fmt_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void echo_config(const CLI::App &sub, std::ostream &out) {
    out << "# effective configuration (" << sub.get_name() << ")\n";
    std::istringstream lines(sub.config_to_str(true, false));
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty()) {
            out << "#   " << line << '\n';
        }
    }
}

TrainConfig make_train_config(const TrainArgs &a) {
    TrainConfig c;
    c.margin = a.margin;
    c.learning_rate = a.lr;
    c.batch_size = a.batch_size;
    c.max_epochs = a.epochs;
    c.seed = a.seed;
    c.optimizer = optimizer_from_string(a.optimizer);
    if (a.patience > 0) {
        c.early_stopping = EarlyStopping{a.patience, a.min_delta};
    } else if (a.min_delta != 0.0) {
        throw InvalidArgument("--min-delta requires --patience");
    }
    if (a.class_weights.size() != kNumClasses) {
        throw InvalidArgument("--class-weights needs exactly 4 values");
    }
    std::copy(a.class_weights.begin(), a.class_weights.end(), c.class_weights.begin());
    c.workers = std::max<std::size_t>(a.workers, 1);
    c.validate();
    return c;
}

int cmd_train(const CLI::App &sub, const TrainArgs &a, std::ostream &out) {
    // Flags first, before touching any file.
    const TrainConfig config = make_train_config(a);
    const EncodingScheme scheme = encoding_scheme_from_string(a.encoding);
    if (a.layers == 0) {
        throw InvalidArgument("--layers must be >= 1");
    }
    if (a.train_path.empty() == a.synth.empty()) {
        throw InvalidArgument("give exactly one of --train or --synth");
    }
    if (!a.synth.empty() && a.synth != "blobs") {
        throw InvalidArgument("unknown --synth kind '" + a.synth + "' (supported: blobs)");
    }
    if (!(a.val_fraction > 0.0 && a.val_fraction < 1.0)) {
        throw InvalidArgument("--val-fraction must be in (0, 1)");
    }
    echo_config(sub, out);
    const auto started = std::chrono::steady_clock::now();

    Dataset train_set;
    Dataset val_set;
    if (!a.synth.empty()) {
        train_set = synth_blobs(a.n_per_class, a.dim, a.separation, a.seed);
        // Independent draw for validation.
        val_set = synth_blobs(std::max<std::size_t>(a.n_per_class / 4, 1), a.dim, a.separation,
                              a.seed + 1);
    } else {
        Dataset all = load_csv(a.train_path);
        if (!a.val_path.empty()) {
            train_set = std::move(all);
            val_set = load_csv(a.val_path);
        } else {
            auto parts = split(all, {1.0 - a.val_fraction, a.val_fraction, 0.0}, a.seed);
            for (const auto &w : parts.warnings) {
                out << "warning: " << w << '\n';
            }
            train_set = std::move(parts.train);
            val_set = std::move(parts.validation);
        }
    }
    if (val_set.feature_dim != train_set.feature_dim) {
        throw InvalidArgument("validation set has " + std::to_string(val_set.feature_dim) +
                              " features, training set has " +
                              std::to_string(train_set.feature_dim));
    }

    EncodingConfig encoding;
    encoding.scheme = scheme;
    encoding.input_dim = train_set.feature_dim;
    encoding.n_qubits = a.qubits != 0 ? a.qubits
                        : scheme == EncodingScheme::amplitude
                            ? qubits_for_amplitude(train_set.feature_dim)
                            : train_set.feature_dim;
    encoding.validate();

    const EnsembleModel initial = init_ensemble(encoding, a.layers, a.seed, a.bias);
    out << "data: " << train_set.size() << " train / " << val_set.size() << " validation samples, "
        << train_set.feature_dim << " features, " << encoding.n_qubits << " qubits, " << a.layers
        << " layers\n";

    std::string log;
    const TrainResult result = train(train_set, val_set, config, initial,
                                     [&](const EpochRecord &r) {
                                         log += epoch_record_to_json(r);
                                         log += '\n';
                                     });

    save_model(result.model, a.out);
    if (!a.log.empty()) {
        write_file_atomic(a.log, log);
    }

    const auto &rep = result.report;
    if (!rep.epochs.empty()) {
        const EpochRecord &last = rep.epochs.back();
        out << "final: epoch " << last.epoch << " train_loss " << fixed(last.train_loss, 6)
            << " train_acc " << fixed(last.train_acc) << " val_loss " << fixed(last.val_loss, 6)
            << " val_acc " << fixed(last.val_acc) << '\n';
        out << "stopped_epoch " << rep.stopped_epoch << " best_epoch " << rep.best_epoch << '\n';
    } else {
        out << "no epochs run; initial model written\n";
    }
    const LossAccuracy fit = evaluate_loss(result.model, train_set, config.margin,
                                           config.class_weights, config.workers);
    out << "train accuracy of saved model: " << fixed(fit.accuracy) << '\n';
    out << "model written to " << a.out << '\n';
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    out << "elapsed: " << fixed(secs, 2) << " s\n";
    return kExitOk;
}

int cmd_eval(const EvalArgs &a, std::ostream &out) {
    const EnsembleModel model = load_model(a.model);
    const Dataset data = load_csv(a.data);
    if (data.feature_dim != model.encoding.input_dim) {
        throw InvalidArgument("dimension mismatch: dataset has " + std::to_string(data.feature_dim) +
                              " features, model expects " +
                              std::to_string(model.encoding.input_dim));
    }
    const EvalReport report = evaluate(model, data, std::max<std::size_t>(a.workers, 1));
    out << "evaluated " << report.n_samples << " samples from " << a.data << "\n\n";
    out << format_report(report);
    if (!a.json.empty()) {
        write_file_atomic(a.json, report_to_json(report));
        out << "\nreport written to " << a.json << '\n';
    }
    return kExitOk;
}

int cmd_predict(const PredictArgs &a, std::ostream &out) {
    const EnsembleModel model = load_model(a.model);
    const FeatureTable table = load_features_csv(a.data);
    if (table.feature_dim != model.encoding.input_dim) {
        throw InvalidArgument("dimension mismatch: data has " + std::to_string(table.feature_dim) +
                              " features, model expects " +
                              std::to_string(model.encoding.input_dim));
    }
    std::string text;
    for (const auto &row : table.rows) {
        const Scores s = score_all(model, row);
        text += to_string(model.label_map[argmax(s)]);
        for (double v : s) {
            text += ' ';
            text += fmt_double(v);
        }
        text += '\n';
    }
    if (a.out.empty()) {
        out << text;
    } else {
        write_file_atomic(a.out, text);
        out << table.rows.size() << " predictions written to " << a.out << '\n';
    }
    return kExitOk;
}

int cmd_gradcheck(const GradcheckArgs &a, std::ostream &out) {
    if (a.trials == 0) {
        throw InvalidArgument("--trials must be >= 1");
    }
    if (a.qubits == 0 || a.qubits > kMaxQubits || a.layers == 0) {
        throw InvalidArgument("--qubits must be in 1..12 and --layers >= 1");
    }
    if (!(a.h > 0.0) || !(a.tol > 0.0) || !(a.margin >= 0.0)) {
        throw InvalidArgument("--step and --tol must be > 0, --margin >= 0");
    }
    Rng rng(a.seed);
    const std::size_t dim = std::size_t{1} << a.qubits;
    const EncodingConfig encoding{EncodingScheme::amplitude, a.qubits, dim, 0.0};
    double max_dev = 0.0;
    std::size_t checked = 0;
    for (std::size_t t = 0; t < a.trials; ++t) {
        EnsembleModel model = init_ensemble(encoding, a.layers, rng.next_u64());
        for (auto &p : model.classifiers) {
            for (double &angle : p.angles.flat()) {
                angle = rng.uniform(-std::numbers::pi, std::numbers::pi);
            }
        }
        std::vector<double> features(dim);
        for (double &f : features) {
            f = rng.normal();
        }
        const StateVector encoded = encode(features, encoding);
        const auto y = static_cast<std::size_t>(rng.below(kNumClasses));
        const EnsembleGradient grad = sample_loss_gradient(model, encoded, y, a.margin, 1.0);
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            auto angles = model.classifiers[c].angles.flat();
            const auto g = grad[c].angles.flat();
            for (std::size_t k = 0; k < angles.size(); ++k) {
                const double orig = angles[k];
                angles[k] = orig + a.h;
                const double up = margin_loss(score_encoded(model, encoded), y, a.margin);
                angles[k] = orig - a.h;
                const double down = margin_loss(score_encoded(model, encoded), y, a.margin);
                angles[k] = orig;
                max_dev = std::max(max_dev, std::abs((up - down) / (2 * a.h) - g[k]));
                ++checked;
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "trials %zu, %zu-qubit %zu-layer models, %zu partials checked\n",
                  a.trials, a.qubits, a.layers, checked);
    out << buf;
    const bool ok = max_dev < a.tol;
    std::snprintf(buf, sizeof buf, "max |Δ| = %.3e %s %g\n", max_dev, ok ? "<" : ">=", a.tol);
    out << buf;
    return ok ? kExitOk : kExitFailure;
}

int cmd_synth(const SynthArgs &a, std::ostream &out) {
    const Dataset data = synth_blobs(a.n_per_class, a.dim, a.separation, a.seed);
    save_csv(data, a.out);
    out << data.size() << " samples (" << data.provenance << ") written to " << a.out << '\n';
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Variational quantum one-vs-all classifier (statevector simulation)", "vqc"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option values; explicit flags win");

    TrainArgs ta;
    auto *train_cmd = app.add_subcommand("train", "Train the 4-classifier ensemble");
    train_cmd->add_option("--train", ta.train_path, "Training feature CSV");
    train_cmd->add_option("--val", ta.val_path,
                          "Validation CSV (default: stratified split of --train)");
    train_cmd->add_option("--synth", ta.synth, "Use a synthetic dataset instead (blobs)");
    train_cmd->add_option("--n-per-class", ta.n_per_class, "Synthetic samples per class")
        ->capture_default_str();
    train_cmd->add_option("--dim", ta.dim, "Synthetic feature dimension")->capture_default_str();
    train_cmd->add_option("--separation", ta.separation, "Synthetic cluster separation")
        ->capture_default_str();
    train_cmd->add_option("--val-fraction", ta.val_fraction,
                          "Validation share when splitting --train")
        ->capture_default_str();
    train_cmd->add_option("--encoding", ta.encoding, "amplitude | angle")->capture_default_str();
    train_cmd->add_option("--qubits", ta.qubits, "Qubit count (0 = derive from feature width)")
        ->capture_default_str();
    train_cmd->add_option("--layers", ta.layers, "Variational layers")->capture_default_str();
    train_cmd->add_flag("--bias", ta.bias, "Add a trainable bias to each classifier score");
    train_cmd->add_option("--epochs", ta.epochs, "Maximum epochs")->capture_default_str();
    train_cmd->add_option("--batch-size", ta.batch_size, "Mini-batch size")->capture_default_str();
    train_cmd->add_option("--lr", ta.lr, "Learning rate")->capture_default_str();
    train_cmd->add_option("--margin", ta.margin, "Hinge margin")->capture_default_str();
    train_cmd->add_option("--optimizer", ta.optimizer, "sgd | sgd_momentum | adam")
        ->capture_default_str();
    train_cmd->add_option("--patience", ta.patience, "Early-stopping patience (0 = off)")
        ->capture_default_str();
    train_cmd->add_option("--min-delta", ta.min_delta, "Early-stopping minimum improvement")
        ->capture_default_str();
    train_cmd->add_option("--class-weights", ta.class_weights,
                          "Four loss weights in label order (none infection ischaemia both)")
        ->expected(4)
        ->capture_default_str();
    train_cmd->add_option("--seed", ta.seed, "Seed for data synthesis, init and shuffling")
        ->capture_default_str();
    train_cmd->add_option("--workers", ta.workers, "Threads for circuit evaluation")
        ->capture_default_str();
    train_cmd->add_option("--out", ta.out, "Model file to write")->required();
    train_cmd->add_option("--log", ta.log, "Epoch log (one JSON object per line)");

    EvalArgs ea;
    auto *eval_cmd = app.add_subcommand("eval", "Per-class AUC / F1 report");
    eval_cmd->add_option("--model", ea.model, "Model file")->required();
    eval_cmd->add_option("--data", ea.data, "Labelled feature CSV")->required();
    eval_cmd->add_option("--json", ea.json, "Also write the report as JSON");
    eval_cmd->add_option("--workers", ea.workers, "Threads")->capture_default_str();

    PredictArgs pa;
    auto *predict_cmd = app.add_subcommand("predict", "Predicted label and 4 scores per sample");
    predict_cmd->add_option("--model", pa.model, "Model file")->required();
    predict_cmd->add_option("--data", pa.data, "Feature CSV (label column optional)")->required();
    predict_cmd->add_option("--out", pa.out, "Write predictions here instead of stdout");

    GradcheckArgs ga;
    auto *grad_cmd =
        app.add_subcommand("gradcheck", "Parameter-shift vs finite-difference gradient check");
    grad_cmd->add_option("--trials", ga.trials, "Random models")->capture_default_str();
    grad_cmd->add_option("--qubits", ga.qubits, "Qubits")->capture_default_str();
    grad_cmd->add_option("--layers", ga.layers, "Layers")->capture_default_str();
    grad_cmd->add_option("--step", ga.h, "Finite-difference step")->capture_default_str();
    grad_cmd->add_option("--tol", ga.tol, "Pass threshold")->capture_default_str();
    grad_cmd->add_option("--margin", ga.margin, "Hinge margin")->capture_default_str();
    grad_cmd->add_option("--seed", ga.seed, "Seed")->capture_default_str();

    SynthArgs sa;
    auto *synth_cmd = app.add_subcommand("synth", "Write a synthetic 4-blob dataset as CSV");
    synth_cmd->add_option("--n-per-class", sa.n_per_class, "Samples per class")
        ->capture_default_str();
    synth_cmd->add_option("--dim", sa.dim, "Feature dimension")->capture_default_str();
    synth_cmd->add_option("--separation", sa.separation, "Cluster separation")
        ->capture_default_str();
    synth_cmd->add_option("--seed", sa.seed, "Seed")->capture_default_str();
    synth_cmd->add_option("--out", sa.out, "Output CSV")->required();

    std::vector<const char *> argv;
    argv.reserve(args.size());
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (*train_cmd) {
            return cmd_train(*train_cmd, ta, out);
        }
        if (*eval_cmd) {
            return cmd_eval(ea, out);
        }
        if (*predict_cmd) {
            return cmd_predict(pa, out);
        }
        if (*grad_cmd) {
            return cmd_gradcheck(ga, out);
        }
        if (*synth_cmd) {
            return cmd_synth(sa, out);
        }
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace vqc::cli
