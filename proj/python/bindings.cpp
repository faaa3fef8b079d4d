#include "vqc/dataio.hpp"
#include "vqc/encoding.hpp"
#include "vqc/errors.hpp"
#include "vqc/metrics.hpp"
#include "vqc/model.hpp"
#include "vqc/statevector.hpp"
#include "vqc/training.hpp"

#include <pybind11/complex.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace vqc;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>> &features,
                     const std::vector<std::string> &labels, const std::string &provenance) {
    if (features.size() != labels.size()) {
        throw InvalidArgument(std::to_string(features.size()) + " feature rows but " +
                              std::to_string(labels.size()) + " labels");
    }
    if (features.empty()) {
        throw InvalidArgument("dataset has no samples");
    }
    Dataset d;
    d.feature_dim = features.front().size();
    d.provenance = provenance;
    for (std::size_t i = 0; i < features.size(); ++i) {
        d.samples.push_back({features[i], label_from_string(labels[i])});
    }
    d.validate();
    return d;
}

std::vector<std::string> label_names(const LabelMap &map) {
    std::vector<std::string> out;
    for (Label l : map) {
        out.emplace_back(to_string(l));
    }
    return out;
}

std::vector<std::vector<double>> gradient_lists(const EnsembleGradient &g) {
    std::vector<std::vector<double>> out;
    for (const auto &p : g) {
        const auto flat = p.angles.flat();
        out.emplace_back(flat.begin(), flat.end());
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_pyvqc, m) {
    m.doc() = "Statevector simulation and one-vs-all variational classifiers";

    py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);
    py::register_exception<UndefinedMetric>(m, "UndefinedMetric", PyExc_ValueError);
    py::register_exception<UnsupportedSize>(m, "UnsupportedSize", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<VersionError>(m, "VersionError", PyExc_ValueError);
    py::register_exception<CorruptFile>(m, "CorruptFile", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    // InvalidArgument derives from std::invalid_argument and surfaces as ValueError.

    m.attr("NUM_CLASSES") = kNumClasses;
    m.attr("MAX_QUBITS") = kMaxQubits;

    py::class_<RotationAngles>(m, "RotationAngles")
        .def(py::init<double, double, double>(), py::arg("phi"), py::arg("theta"), py::arg("omega"))
        .def_readwrite("phi", &RotationAngles::phi)
        .def_readwrite("theta", &RotationAngles::theta)
        .def_readwrite("omega", &RotationAngles::omega);

    m.def("rot_matrix", [](double phi, double theta, double omega) {
        const Matrix2 u = rot_matrix({phi, theta, omega});
        return std::vector<std::vector<Complex>>{{u[0], u[1]}, {u[2], u[3]}};
    }, py::arg("phi"), py::arg("theta"), py::arg("omega"));

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<std::size_t>(), py::arg("n_qubits"))
        .def_static("from_amplitudes", &StateVector::from_amplitudes, py::arg("amplitudes"))
        .def_static("basis", &StateVector::basis, py::arg("n_qubits"), py::arg("index"))
        .def_property_readonly("n_qubits", &StateVector::n_qubits)
        .def_property_readonly("dim", &StateVector::dim)
        .def_property_readonly("amplitudes", [](const StateVector &s) {
            const auto a = s.amplitudes();
            return std::vector<Complex>(a.begin(), a.end());
        })
        .def("norm_squared", &StateVector::norm_squared)
        .def("apply_rx", &StateVector::apply_rx, py::arg("qubit"), py::arg("angle"))
        .def("apply_ry", &StateVector::apply_ry, py::arg("qubit"), py::arg("angle"))
        .def("apply_rz", &StateVector::apply_rz, py::arg("qubit"), py::arg("angle"))
        .def("apply_rot", [](StateVector &s, std::size_t q, double phi, double theta, double omega) {
            s.apply_rot(q, {phi, theta, omega});
        }, py::arg("qubit"), py::arg("phi"), py::arg("theta"), py::arg("omega"))
        .def("apply_cnot", &StateVector::apply_cnot, py::arg("control"), py::arg("target"))
        .def("expectation_z", &StateVector::expectation_z, py::arg("qubit"));

    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));

    py::class_<EncodingConfig>(m, "EncodingConfig")
        .def(py::init([](const std::string &scheme, std::size_t n_qubits, std::size_t input_dim,
                         double pad_value) {
            EncodingConfig c{encoding_scheme_from_string(scheme), n_qubits, input_dim, pad_value};
            c.validate();
            return c;
        }), py::arg("scheme") = "amplitude", py::arg("n_qubits") = 7, py::arg("input_dim") = 128,
            py::arg("pad_value") = 0.0)
        .def_property_readonly("scheme", [](const EncodingConfig &c) { return std::string(to_string(c.scheme)); })
        .def_readonly("n_qubits", &EncodingConfig::n_qubits)
        .def_readonly("input_dim", &EncodingConfig::input_dim)
        .def_readonly("pad_value", &EncodingConfig::pad_value)
        .def(py::self == py::self);

    m.def("encode", [](const std::vector<double> &x, const EncodingConfig &c) { return encode(x, c); },
          py::arg("features"), py::arg("config"));
    m.def("qubits_for_amplitude", &qubits_for_amplitude, py::arg("input_dim"));

    py::class_<Dataset>(m, "Dataset")
        .def(py::init(&make_dataset), py::arg("features"), py::arg("labels"),
             py::arg("provenance") = "<python>")
        .def("__len__", &Dataset::size)
        .def_readonly("feature_dim", &Dataset::feature_dim)
        .def_readonly("provenance", &Dataset::provenance)
        .def_property_readonly("features", [](const Dataset &d) {
            std::vector<std::vector<double>> out;
            for (const auto &s : d.samples) {
                out.push_back(s.features);
            }
            return out;
        })
        .def_property_readonly("labels", [](const Dataset &d) {
            std::vector<std::string> out;
            for (const auto &s : d.samples) {
                out.emplace_back(to_string(s.label));
            }
            return out;
        });

    py::class_<EnsembleModel>(m, "EnsembleModel")
        .def_readonly("encoding", &EnsembleModel::encoding)
        .def_readonly("n_layers", &EnsembleModel::n_layers)
        .def_property_readonly("label_map", [](const EnsembleModel &e) { return label_names(e.label_map); })
        .def("angles", [](const EnsembleModel &e, std::size_t c) {
            if (c >= kNumClasses) {
                throw InvalidArgument("classifier index out of range");
            }
            const auto f = e.classifiers[c].angles.flat();
            return std::vector<double>(f.begin(), f.end());
        }, py::arg("classifier"))
        .def("bias", [](const EnsembleModel &e, std::size_t c) {
            if (c >= kNumClasses) {
                throw InvalidArgument("classifier index out of range");
            }
            return e.classifiers[c].bias;
        }, py::arg("classifier"))
        .def("parameters", &flatten_params)
        .def("set_parameters", [](EnsembleModel &e, const std::vector<double> &flat) {
            unflatten_params(e, flat);
        }, py::arg("flat"))
        .def("to_json", &model_to_string)
        .def_static("from_json", &model_from_string, py::arg("text"))
        .def(py::self == py::self);

    m.def("init_ensemble", &init_ensemble, py::arg("encoding"), py::arg("n_layers") = kDefaultLayers,
          py::arg("seed") = 0, py::arg("with_bias") = false, py::arg("init_scale") = 0.1);
    m.def("score_all", [](const EnsembleModel &e, const std::vector<double> &x) { return score_all(e, x); },
          py::arg("model"), py::arg("features"));
    m.def("predict", [](const EnsembleModel &e, const std::vector<double> &x) {
        return std::string(to_string(e.label_map[predict(e, x)]));
    }, py::arg("model"), py::arg("features"));

    m.def("margin_loss", &margin_loss, py::arg("scores"), py::arg("true_class"),
          py::arg("margin") = 0.15, py::arg("weight") = 1.0);
    m.def("margin_loss_score_grad", &margin_loss_score_grad, py::arg("scores"),
          py::arg("true_class"), py::arg("margin") = 0.15, py::arg("weight") = 1.0);
    m.def("loss_gradient", [](const EnsembleModel &e, const std::vector<double> &x,
                              std::size_t true_class, double margin, double weight) {
        return gradient_lists(sample_loss_gradient(e, encode(x, e.encoding), true_class, margin, weight));
    }, py::arg("model"), py::arg("features"), py::arg("true_class"), py::arg("margin") = 0.15,
          py::arg("weight") = 1.0);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("margin", &TrainConfig::margin)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("max_epochs", &TrainConfig::max_epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_property("optimizer",
            [](const TrainConfig &c) { return std::string(to_string(c.optimizer)); },
            [](TrainConfig &c, const std::string &s) { c.optimizer = optimizer_from_string(s); })
        .def_readwrite("momentum", &TrainConfig::momentum)
        .def_readwrite("beta1", &TrainConfig::beta1)
        .def_readwrite("beta2", &TrainConfig::beta2)
        .def_readwrite("epsilon", &TrainConfig::epsilon)
        .def_property("patience",
            [](const TrainConfig &c) -> std::optional<std::size_t> {
                return c.early_stopping ? std::optional(c.early_stopping->patience) : std::nullopt;
            },
            [](TrainConfig &c, std::optional<std::size_t> p) {
                if (!p) {
                    c.early_stopping.reset();
                } else {
                    c.early_stopping = EarlyStopping{*p, c.early_stopping ? c.early_stopping->min_delta : 0.0};
                }
            })
        .def_readwrite("class_weights", &TrainConfig::class_weights)
        .def_readwrite("workers", &TrainConfig::workers)
        .def("validate", &TrainConfig::validate);

    m.def("_train", [](const Dataset &tr, const Dataset &val, const TrainConfig &c,
                       const EnsembleModel &init) {
        TrainResult r;
        {
            py::gil_scoped_release release;
            r = train(tr, val, c, init);
        }
        std::vector<std::string> epochs;
        for (const auto &e : r.report.epochs) {
            epochs.push_back(epoch_record_to_json(e));
        }
        return py::make_tuple(r.model, epochs, r.report.stopped_epoch, r.report.best_epoch);
    }, py::arg("train_set"), py::arg("validation_set"), py::arg("config"), py::arg("initial"));

    m.def("_evaluate", [](const EnsembleModel &e, const Dataset &d, std::size_t workers) {
        EvalReport r;
        {
            py::gil_scoped_release release;
            r = evaluate(e, d, workers);
        }
        return report_to_json(r);
    }, py::arg("model"), py::arg("data"), py::arg("workers") = 1);
    m.def("format_report", [](const EnsembleModel &e, const Dataset &d) {
        return format_report(evaluate(e, d));
    }, py::arg("model"), py::arg("data"));

    m.def("auc_ovr", [](const std::vector<double> &scores, const std::vector<int> &labels) {
        return auc_ovr(scores, labels);
    }, py::arg("scores"), py::arg("labels"));
    m.def("synth_blobs", &synth_blobs, py::arg("n_per_class"), py::arg("feature_dim"),
          py::arg("separation"), py::arg("seed"));
    m.def("split", [](const Dataset &d, std::array<double, 3> fractions, std::uint64_t seed) {
        SplitResult r = split(d, fractions, seed);
        return py::make_tuple(r.train, r.validation, r.test, r.warnings);
    }, py::arg("data"), py::arg("fractions"), py::arg("seed"));
    m.def("load_csv", &load_csv, py::arg("path"));
    m.def("parse_csv", &parse_csv, py::arg("text"), py::arg("provenance") = "<memory>");
    m.def("save_csv", &save_csv, py::arg("data"), py::arg("path"));
    m.def("to_csv", &to_csv, py::arg("data"));
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));
}
