#include "vqc/dataio.hpp"

#include "vqc/errors.hpp"
#include "vqc/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

namespace vqc {

using json = nlohmann::ordered_json;

void Dataset::validate() const {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].features.size() != feature_dim) {
            throw InvalidArgument("sample " + std::to_string(i) + " has " +
                                  std::to_string(samples[i].features.size()) +
                                  " features, dataset width is " + std::to_string(feature_dim));
        }
        for (double f : samples[i].features) {
            if (!std::isfinite(f)) {
                throw InvalidArgument("sample " + std::to_string(i) + " has a non-finite feature");
            }
        }
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            return out;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
    double value = 0.0;
    const char *begin = field.data();
    const char *end = field.data() + field.size();
    if (!field.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": '" + std::string(field) + "' is not a number",
                         line, column);
    }
    if (!std::isfinite(value)) {
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": non-finite feature value",
                         line, column);
    }
    return value;
}

struct RawTable {
    std::vector<std::vector<double>> rows;
    std::vector<Label> labels;
    std::size_t feature_dim = 0;
    bool has_labels = false;
};

RawTable parse_table(const std::string &text, bool require_labels) {
    // UTF-8 byte order mark
    const bool bom = text.rfind("\xEF\xBB\xBF", 0) == 0;
    std::istringstream in(bom ? text.substr(3) : text);
    std::string line;
    std::size_t line_no = 0;
    RawTable table;
    bool header_seen = false;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        if (!header_seen) {
            header_seen = true;
            width = fields.size();
            table.has_labels = iequals(fields.back(), "label");
            if (require_labels && !table.has_labels) {
                throw ParseError("line " + std::to_string(line_no) +
                                     ": header must end with a 'label' column",
                                 line_no);
            }
            table.feature_dim = table.has_labels ? width - 1 : width;
            if (table.feature_dim == 0) {
                throw ParseError("line " + std::to_string(line_no) + ": header has no feature columns",
                                 line_no);
            }
            continue;
        }
        if (fields.size() != width) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        std::vector<double> row(table.feature_dim);
        for (std::size_t j = 0; j < table.feature_dim; ++j) {
            row[j] = parse_number(fields[j], line_no, j + 1);
        }
        if (table.has_labels) {
            try {
                table.labels.push_back(label_from_string(fields.back()));
            } catch (const InvalidArgument &) {
                throw ParseError("line " + std::to_string(line_no) + ", column " +
                                     std::to_string(width) + ": unknown label '" +
                                     std::string(fields.back()) + "'",
                                 line_no, width);
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!header_seen) {
        throw ParseError("empty file: missing header", 1);
    }
    if (table.rows.empty()) {
        throw ParseError("file has a header but no samples", line_no);
    }
    return table;
}

void append_double(std::string &out, double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

} // namespace

std::string read_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out << contents;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

Dataset parse_csv(const std::string &text, const std::string &provenance) {
    RawTable table = parse_table(text, true);
    Dataset data;
    data.feature_dim = table.feature_dim;
    data.provenance = provenance;
    data.samples.reserve(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        data.samples.push_back({std::move(table.rows[i]), table.labels[i]});
    }
    return data;
}

Dataset load_csv(const std::filesystem::path &path) {
    return parse_csv(read_file(path), path.string());
}

FeatureTable load_features_csv(const std::filesystem::path &path) {
    RawTable table = parse_table(read_file(path), false);
    FeatureTable out;
    out.feature_dim = table.feature_dim;
    out.rows = std::move(table.rows);
    if (table.has_labels) {
        out.labels = std::move(table.labels);
    }
    return out;
}

std::string to_csv(const Dataset &data) {
    data.validate();
    std::string out;
    for (std::size_t j = 0; j < data.feature_dim; ++j) {
        out += 'f';
        out += std::to_string(j);
        out += ',';
    }
    out += "label\n";
    for (const auto &s : data.samples) {
        for (double f : s.features) {
            append_double(out, f);
            out += ',';
        }
        out += to_string(s.label);
        out += '\n';
    }
    return out;
}

void save_csv(const Dataset &data, const std::filesystem::path &path) {
    write_file_atomic(path, to_csv(data));
}

SplitResult split(const Dataset &data, const std::array<double, 3> &fractions, std::uint64_t seed) {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f >= 0.0) || !std::isfinite(f)) {
            throw InvalidArgument("split fractions must be finite and non-negative");
        }
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidArgument("split fractions must sum to 1");
    }
    constexpr std::size_t parts = 3;
    const std::size_t n = data.size();

    // Overall part sizes by largest remainder.
    std::array<std::size_t, parts> global{};
    {
        std::array<double, parts> rem{};
        std::size_t assigned = 0;
        for (std::size_t p = 0; p < parts; ++p) {
            const double q = fractions[p] * static_cast<double>(n);
            global[p] = static_cast<std::size_t>(std::floor(q));
            rem[p] = q - std::floor(q);
            assigned += global[p];
        }
        std::array<std::size_t, parts> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
        for (std::size_t k = 0; assigned < n; k = (k + 1) % parts) {
            if (fractions[order[k]] > 0.0) {
                ++global[order[k]];
                ++assigned;
            }
        }
    }

    std::array<std::vector<std::size_t>, kNumClasses> by_class;
    for (std::size_t i = 0; i < n; ++i) {
        by_class[static_cast<std::size_t>(data.samples[i].label)].push_back(i);
    }

    SplitResult result;
    const auto positive_parts = static_cast<std::size_t>(
        std::count_if(fractions.begin(), fractions.end(), [](double f) { return f > 0.0; }));

    // Per-class counts: floors of the quotas, then hand out the leftovers so
    // row sums equal class sizes and column sums equal the overall sizes.
    std::array<std::array<std::size_t, parts>, kNumClasses> counts{};
    std::array<std::array<double, parts>, kNumClasses> rem{};
    std::array<std::size_t, kNumClasses> row_left{};
    std::array<std::size_t, parts> col_left = global;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        const std::size_t nc = by_class[c].size();
        if (nc > 0 && nc < positive_parts) {
            result.warnings.push_back("class '" + std::string(to_string(static_cast<Label>(c))) +
                                      "' has " + std::to_string(nc) + " sample(s) for " +
                                      std::to_string(positive_parts) +
                                      " split parts; stratification is best-effort");
        }
        std::size_t used = 0;
        for (std::size_t p = 0; p < parts; ++p) {
            const double q = fractions[p] * static_cast<double>(nc);
            counts[c][p] = static_cast<std::size_t>(std::floor(q));
            rem[c][p] = q - std::floor(q);
            used += counts[c][p];
            col_left[p] -= counts[c][p];
        }
        row_left[c] = nc - used;
    }
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        for (std::size_t p = 0; p < parts; ++p) {
            cells.emplace_back(c, p);
        }
    }
    std::stable_sort(cells.begin(), cells.end(), [&](const auto &a, const auto &b) {
        return rem[a.first][a.second] > rem[b.first][b.second];
    });
    for (const auto &[c, p] : cells) {
        if (row_left[c] > 0 && col_left[p] > 0) {
            ++counts[c][p];
            --row_left[c];
            --col_left[p];
        }
    }
    for (const auto &[c, p] : cells) {
        const std::size_t k = std::min(row_left[c], col_left[p]);
        counts[c][p] += k;
        row_left[c] -= k;
        col_left[p] -= k;
    }

    Rng rng(seed);
    std::array<std::vector<std::size_t>, parts> assigned;
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        auto idx = by_class[c];
        rng.shuffle(std::span<std::size_t>(idx));
        std::size_t pos = 0;
        for (std::size_t p = 0; p < parts; ++p) {
            for (std::size_t k = 0; k < counts[c][p]; ++k) {
                assigned[p].push_back(idx[pos++]);
            }
        }
    }

    std::array<Dataset *, parts> outs{&result.train, &result.validation, &result.test};
    const std::array<const char *, parts> names{"train", "validation", "test"};
    for (std::size_t p = 0; p < parts; ++p) {
        std::sort(assigned[p].begin(), assigned[p].end());
        outs[p]->feature_dim = data.feature_dim;
        outs[p]->provenance = data.provenance + " [" + names[p] + " split, seed " +
                              std::to_string(seed) + "]";
        for (std::size_t i : assigned[p]) {
            outs[p]->samples.push_back(data.samples[i]);
        }
    }
    return result;
}

std::array<std::vector<double>, kNumClasses> blob_centers(std::size_t feature_dim,
                                                          double separation) {
    std::array<std::vector<double>, kNumClasses> centers;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        centers[k].assign(feature_dim, 0.0);
        if (feature_dim >= kNumClasses) {
            centers[k][k * (feature_dim / kNumClasses)] = separation;
        } else {
            const double angle = static_cast<double>(k) * 3.14159265358979323846 / 4.0;
            centers[k][0] = separation * std::cos(angle);
            centers[k][1] = separation * std::sin(angle);
        }
    }
    return centers;
}

Dataset synth_blobs(std::size_t n_per_class, std::size_t feature_dim, double separation,
                    std::uint64_t seed) {
    if (feature_dim < 2) {
        throw InvalidArgument("synth_blobs needs feature_dim >= 2");
    }
    if (!(separation > 0.0) || !std::isfinite(separation)) {
        throw InvalidArgument("synth_blobs needs a finite separation > 0");
    }
    if (n_per_class == 0) {
        throw InvalidArgument("synth_blobs needs n_per_class >= 1");
    }
    const auto centers = blob_centers(feature_dim, separation);
    Rng rng(seed);
    Dataset data;
    data.feature_dim = feature_dim;
    std::ostringstream prov;
    prov << "synth_blobs(n_per_class=" << n_per_class << ", dim=" << feature_dim
         << ", separation=" << separation << ", seed=" << seed << ")";
    data.provenance = prov.str();
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            Sample s{centers[k], static_cast<Label>(k)};
            for (double &f : s.features) {
                f += rng.normal();
            }
            data.samples.push_back(std::move(s));
        }
    }
    return data;
}

std::string model_to_string(const EnsembleModel &model) {
    model.validate();
    json j;
    j["format"] = "vqc-ensemble";
    j["version"] = kModelFormatVersion;
    j["encoding"] = {{"scheme", std::string(to_string(model.encoding.scheme))},
                     {"n_qubits", model.encoding.n_qubits},
                     {"input_dim", model.encoding.input_dim},
                     {"pad_value", model.encoding.pad_value}};
    j["n_layers"] = model.n_layers;
    json labels = json::array();
    for (Label l : model.label_map) {
        labels.push_back(std::string(to_string(l)));
    }
    j["label_map"] = labels;
    json lineage = json::object();
    lineage["init_seed"] = model.lineage.init_seed ? json(*model.lineage.init_seed) : json(nullptr);
    lineage["train_seed"] =
        model.lineage.train_seed ? json(*model.lineage.train_seed) : json(nullptr);
    j["lineage"] = lineage;
    json classifiers = json::array();
    for (const auto &p : model.classifiers) {
        json c;
        c["angles"] = std::vector<double>(p.angles.flat().begin(), p.angles.flat().end());
        c["bias"] = p.bias ? json(*p.bias) : json(nullptr);
        classifiers.push_back(c);
    }
    j["classifiers"] = classifiers;
    return j.dump(1) + "\n";
}

EnsembleModel model_from_string(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw CorruptFile(std::string("model file is corrupted: ") + e.what());
    }
    try {
        if (!j.is_object() || j.value("format", "") != "vqc-ensemble") {
            throw CorruptFile("not a vqc model file");
        }
        if (!j.contains("version") || !j["version"].is_number_integer()) {
            throw CorruptFile("model file has no version tag");
        }
        const int version = j["version"].get<int>();
        if (version != kModelFormatVersion) {
            throw VersionError("unsupported model file version " + std::to_string(version) +
                               " (this build reads version " +
                               std::to_string(kModelFormatVersion) + ")");
        }
        EnsembleModel model;
        const auto &enc = j.at("encoding");
        model.encoding.scheme = encoding_scheme_from_string(enc.at("scheme").get<std::string>());
        model.encoding.n_qubits = enc.at("n_qubits").get<std::size_t>();
        model.encoding.input_dim = enc.at("input_dim").get<std::size_t>();
        model.encoding.pad_value = enc.at("pad_value").get<double>();
        model.n_layers = j.at("n_layers").get<std::size_t>();
        const auto &labels = j.at("label_map");
        if (!labels.is_array() || labels.size() != kNumClasses) {
            throw CorruptFile("label_map must list 4 labels");
        }
        for (std::size_t i = 0; i < kNumClasses; ++i) {
            model.label_map[i] = label_from_string(labels[i].get<std::string>());
        }
        const auto &lineage = j.at("lineage");
        if (!lineage.at("init_seed").is_null()) {
            model.lineage.init_seed = lineage["init_seed"].get<std::uint64_t>();
        }
        if (!lineage.at("train_seed").is_null()) {
            model.lineage.train_seed = lineage["train_seed"].get<std::uint64_t>();
        }
        const auto &classifiers = j.at("classifiers");
        if (!classifiers.is_array() || classifiers.size() != kNumClasses) {
            throw CorruptFile("model file must hold exactly 4 classifiers");
        }
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            const auto angles = classifiers[c].at("angles").get<std::vector<double>>();
            AngleTensor tensor(model.n_layers, model.encoding.n_qubits);
            if (angles.size() != tensor.size()) {
                throw CorruptFile("classifier " + std::to_string(c) + " has " +
                                  std::to_string(angles.size()) + " angles, expected " +
                                  std::to_string(tensor.size()));
            }
            std::copy(angles.begin(), angles.end(), tensor.flat().begin());
            model.classifiers[c].angles = std::move(tensor);
            const auto &bias = classifiers[c].at("bias");
            if (!bias.is_null()) {
                model.classifiers[c].bias = bias.get<double>();
            }
        }
        model.validate();
        return model;
    } catch (const json::exception &e) {
        throw CorruptFile(std::string("model file is malformed: ") + e.what());
    } catch (const InvalidArgument &e) {
        throw CorruptFile(std::string("model file is inconsistent: ") + e.what());
    }
}

void save_model(const EnsembleModel &model, const std::filesystem::path &path) {
    write_file_atomic(path, model_to_string(model));
}

EnsembleModel load_model(const std::filesystem::path &path) {
    return model_from_string(read_file(path));
}

std::string report_to_json(const EvalReport &report) {
    json j;
    j["n_samples"] = report.n_samples;
    json per_class = json::array();
    for (std::size_t c = 0; c < kNumClasses; ++c) {
        per_class.push_back(
            {{"label", std::string(to_string(report.label_map[c]))},
             {"auc", report.per_class_auc[c] ? json(*report.per_class_auc[c]) : json(nullptr)},
             {"f1", report.per_class_f1[c]},
             {"f1_zero_denominator", report.f1_zero_denominator[c]}});
    }
    j["per_class"] = per_class;
    j["macro_auc"] = report.macro_auc ? json(*report.macro_auc) : json(nullptr);
    j["auc_excluded"] = report.auc_excluded;
    j["macro_f1"] = report.macro_f1;
    json confusion = json::array();
    for (const auto &row : report.confusion) {
        confusion.push_back(std::vector<std::size_t>(row.begin(), row.end()));
    }
    j["confusion"] = confusion;
    return j.dump(2) + "\n";
}

std::string epoch_record_to_json(const EpochRecord &r) {
    json j;
    j["epoch"] = r.epoch;
    j["train_loss"] = r.train_loss;
    j["train_acc"] = r.train_acc;
    j["val_loss"] = r.val_loss;
    j["val_acc"] = r.val_acc;
    return j.dump();
}

} // namespace vqc
