#include "oracles.hpp"
#include "test_util.hpp"

#include "vqc/dataio.hpp"
#include "vqc/errors.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <unistd.h>

using namespace vqc;
namespace fs = std::filesystem;

namespace {
class TempDir {
  public:
    TempDir() : path_(fs::temp_directory_path() / ("vqc_test_" + std::to_string(::getpid()) + "_" +
                                                    std::to_string(counter_++))) {
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    fs::path operator/(const std::string &name) const { return path_ / name; }
    const fs::path &path() const { return path_; }

  private:
    static inline int counter_ = 0;
    fs::path path_;
};

void write(const fs::path &p, const std::string &text) {
    std::ofstream(p, std::ios::binary) << text;
}
} // namespace

TEST(LoadCsv, TwoRows) {
    TempDir dir;
    write(dir / "a.csv", "f0,f1,f2,f3,label\n1,2,3,4,none\n-0.5,1e-3,0,7,both\n");
    const Dataset d = load_csv(dir / "a.csv");
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.feature_dim, 4u);
    EXPECT_EQ(d.samples[0].label, Label::none);
    EXPECT_EQ(d.samples[1].label, Label::both);
    EXPECT_EQ(d.samples[1].features, (std::vector<double>{-0.5, 1e-3, 0, 7}));
}

TEST(LoadCsv, ControlAliasAndCaseInsensitivity) {
    const Dataset d = parse_csv("f0,f1,label\r\n1,2,Control\r\n3,4,ISCHAEMIA\r\n\n5,6,Infection\n");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.samples[0].label, Label::none);
    EXPECT_EQ(d.samples[1].label, Label::ischaemia);
    EXPECT_EQ(d.samples[2].label, Label::infection);
}

TEST(LoadCsv, NonNumericFeatureNamesRowAndColumn) {
    try {
        parse_csv("f0,f1,label\n1,2,none\n1,abc,both\n");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.line(), 3u);
        EXPECT_EQ(e.column(), 2u);
        EXPECT_NE(std::string(e.what()).find("line 3, column 2"), std::string::npos);
    }
}

TEST(LoadCsv, LabelledErrors) {
    EXPECT_THROW(parse_csv("f0,f1,label\n1,2,maybe\n"), ParseError);
    EXPECT_THROW(parse_csv("f0,f1,label\n1,2,none\n1,none\n"), ParseError);
    EXPECT_THROW(parse_csv(""), ParseError);
    EXPECT_THROW(parse_csv("f0,f1,label\n"), ParseError);
    EXPECT_THROW(parse_csv("f0,f1\n1,2\n"), ParseError);
    EXPECT_THROW(parse_csv("f0,label\ninf,none\n"), ParseError);
    EXPECT_THROW(load_csv("/nonexistent/features.csv"), IoError);
}

TEST(LoadFeaturesCsv, LabelColumnOptional) {
    TempDir dir;
    write(dir / "u.csv", "f0,f1\n1,2\n3,4\n");
    const FeatureTable t = load_features_csv(dir / "u.csv");
    EXPECT_EQ(t.rows.size(), 2u);
    EXPECT_FALSE(t.labels.has_value());
    write(dir / "l.csv", "f0,f1,label\n1,2,both\n");
    const FeatureTable l = load_features_csv(dir / "l.csv");
    ASSERT_TRUE(l.labels.has_value());
    EXPECT_EQ((*l.labels)[0], Label::both);
}

TEST(CsvProperties, SaveLoadRoundTripIsExact) {
    Rng rng(51);
    TempDir dir;
    for (int trial = 0; trial < 20; ++trial) {
        Dataset d;
        d.feature_dim = 1 + rng.below(10);
        const std::size_t n = 1 + rng.below(30);
        for (std::size_t i = 0; i < n; ++i) {
            Sample s;
            s.label = static_cast<Label>(rng.below(4));
            for (std::size_t j = 0; j < d.feature_dim; ++j) {
                s.features.push_back(rng.normal() * std::ldexp(1.0, static_cast<int>(rng.below(80)) - 40));
            }
            d.samples.push_back(s);
        }
        save_csv(d, dir / "rt.csv");
        const Dataset back = load_csv(dir / "rt.csv");
        EXPECT_EQ(back.samples, d.samples);
        EXPECT_EQ(back.feature_dim, d.feature_dim);
    }
}

TEST(Split, EverythingToTrain) {
    const Dataset d = synth_blobs(5, 4, 1.0, 1);
    const SplitResult s = split(d, {1.0, 0.0, 0.0}, 9);
    EXPECT_EQ(s.train.samples, d.samples);
    EXPECT_TRUE(s.validation.empty());
    EXPECT_TRUE(s.test.empty());
}

TEST(Split, StratifiedEightyTenTen) {
    const Dataset d = synth_blobs(25, 4, 1.0, 2);
    const SplitResult s = split(d, {0.8, 0.1, 0.1}, 3);
    EXPECT_EQ(s.train.size(), 80u);
    EXPECT_EQ(s.validation.size(), 10u);
    EXPECT_EQ(s.test.size(), 10u);
    const std::array<const Dataset *, 3> parts{&s.train, &s.validation, &s.test};
    const std::array<double, 3> quota{20.0, 2.5, 2.5};
    for (std::size_t p = 0; p < 3; ++p) {
        std::array<int, 4> per{};
        for (const auto &x : parts[p]->samples) {
            ++per[static_cast<std::size_t>(x.label)];
        }
        for (int c : per) {
            EXPECT_LE(std::abs(c - quota[p]), 1.0);
        }
    }
    EXPECT_TRUE(s.warnings.empty());
}

TEST(SplitProperties, DeterministicPartition) {
    Rng rng(52);
    for (int trial = 0; trial < 30; ++trial) {
        Dataset d = synth_blobs(1 + rng.below(20), 3, 1.0, rng.next_u64());
        // Unbalance the classes.
        d.samples.erase(d.samples.begin(), d.samples.begin() + static_cast<long>(rng.below(d.size() / 2 + 1)));
        if (d.empty()) {
            continue;
        }
        const double a = rng.uniform(0.1, 0.8);
        const double b = rng.uniform(0.0, 1.0 - a);
        const std::array<double, 3> f{a, b, 1.0 - a - b};
        const std::uint64_t seed = rng.next_u64();
        const SplitResult s1 = split(d, f, seed);
        const SplitResult s2 = split(d, f, seed);
        EXPECT_EQ(s1.train.samples, s2.train.samples);
        EXPECT_EQ(s1.validation.samples, s2.validation.samples);
        EXPECT_EQ(s1.test.samples, s2.test.samples);

        std::multiset<std::vector<double>> all, joined;
        for (const auto &x : d.samples) {
            all.insert(x.features);
        }
        for (const Dataset *p : {&s1.train, &s1.validation, &s1.test}) {
            for (const auto &x : p->samples) {
                joined.insert(x.features);
            }
        }
        EXPECT_EQ(all, joined);
        // Overall part sizes follow the fractions to within one sample.
        EXPECT_LE(std::abs(static_cast<double>(s1.train.size()) - a * static_cast<double>(d.size())), 1.0);
    }
}

TEST(Split, TinyClassWarnsAndErrors) {
    Dataset d = synth_blobs(10, 3, 1.0, 3);
    d.samples.erase(d.samples.begin() + 1, d.samples.begin() + 10); // one 'none' sample left
    const SplitResult s = split(d, {0.5, 0.25, 0.25}, 1);
    ASSERT_EQ(s.warnings.size(), 1u);
    EXPECT_NE(s.warnings[0].find("none"), std::string::npos);
    EXPECT_EQ(s.train.size() + s.validation.size() + s.test.size(), d.size());
    EXPECT_THROW(split(d, {0.5, 0.5, 0.5}, 1), InvalidArgument);
    EXPECT_THROW(split(d, {1.5, -0.5, 0.0}, 1), InvalidArgument);
}

TEST(SynthBlobs, WellSeparatedIsLinearlyEasy) {
    const Dataset d = synth_blobs(50, 8, 10.0, 7);
    EXPECT_EQ(d.size(), 200u);
    EXPECT_EQ(d.feature_dim, 8u);
    EXPECT_GE(oracle::nearest_centroid_accuracy(d, d), 0.99);
}

TEST(SynthBlobs, TinySeparationIsNearChance) {
    const Dataset fit = synth_blobs(500, 8, 0.01, 7);
    const Dataset eval = synth_blobs(500, 8, 0.01, 8);
    EXPECT_NEAR(oracle::nearest_centroid_accuracy(fit, eval), 0.25, 0.05);
}

TEST(SynthBlobs, SeededAndValidated) {
    EXPECT_EQ(synth_blobs(10, 5, 3.0, 1).samples, synth_blobs(10, 5, 3.0, 1).samples);
    EXPECT_NE(synth_blobs(10, 5, 3.0, 1).samples, synth_blobs(10, 5, 3.0, 2).samples);
    EXPECT_THROW(synth_blobs(10, 1, 3.0, 1), InvalidArgument);
    EXPECT_THROW(synth_blobs(10, 4, 0.0, 1), InvalidArgument);
    // Low-dimensional centers are distinct directions (not sign flips of each other).
    const auto c = blob_centers(2, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double dot = c[i][0] * c[j][0] + c[i][1] * c[j][1];
            EXPECT_LT(std::abs(dot), 0.99);
        }
    }
}

TEST(SynthBlobs, PortableStreamSnapshot) {
    // Expected values come from an independent Python mt19937_64 + Box-Muller.
    const Dataset d = synth_blobs(1, 2, 1.0, 0);
    EXPECT_EQ(d.samples[0].features[0], 0x1.74d6c760755acp+1);
    EXPECT_EQ(d.samples[0].features[1], -0x1.82fd0012d09aep-4);
}

TEST(ModelFile, RoundTripIsBitExact) {
    TempDir dir;
    Rng rng(53);
    EnsembleModel m = init_ensemble({EncodingScheme::amplitude, 3, 6, 0.25}, 2, 77, true);
    for (auto &p : m.classifiers) {
        for (double &a : p.angles.flat()) {
            a = rng.normal() * 1e3 + 1e-300;
        }
        p.bias = rng.normal();
    }
    m.label_map = {Label::both, Label::none, Label::ischaemia, Label::infection};
    m.lineage.train_seed = 99;
    save_model(m, dir / "m.vqc");
    const EnsembleModel back = load_model(dir / "m.vqc");
    EXPECT_EQ(back, m);
    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(score_all(back, x), score_all(m, x));
    EXPECT_FALSE(fs::exists(dir / "m.vqc.tmp"));
}

TEST(ModelFile, VersionAndCorruption) {
    TempDir dir;
    const EnsembleModel m = init_ensemble({EncodingScheme::amplitude, 2, 4, 0.0}, 1, 1);
    std::string text = model_to_string(m);
    const auto pos = text.find("\"version\": 1");
    ASSERT_NE(pos, std::string::npos);
    std::string bumped = text;
    bumped.replace(pos, 12, "\"version\": 7");
    EXPECT_THROW(model_from_string(bumped), VersionError);
    EXPECT_THROW(model_from_string(text.substr(0, text.size() / 2)), CorruptFile);
    EXPECT_THROW(model_from_string("{}"), CorruptFile);
    EXPECT_THROW(model_from_string(""), CorruptFile);
    std::string short_angles = text;
    short_angles.replace(short_angles.find("\"n_layers\": 1"), 13, "\"n_layers\": 2");
    EXPECT_THROW(model_from_string(short_angles), CorruptFile);
    EXPECT_THROW(load_model(dir / "missing.vqc"), IoError);
}

TEST(ReportJson, Schema) {
    const std::vector<Scores> scores{{0.9, 0.1, 0, 0}, {0.1, 0.9, 0, 0}, {0.5, 0.2, 0, 0}};
    const EvalReport rep = make_report(scores, std::vector<std::size_t>{0, 1, 0});
    const auto j = nlohmann::json::parse(report_to_json(rep));
    EXPECT_EQ(j["n_samples"], 3);
    ASSERT_EQ(j["per_class"].size(), 4u);
    EXPECT_EQ(j["per_class"][0]["label"], "none");
    EXPECT_TRUE(j["per_class"][2]["auc"].is_null());
    EXPECT_EQ(j["auc_excluded"], 2);
    EXPECT_EQ(j["confusion"][0][0], 2);
    EXPECT_TRUE(j.contains("macro_auc"));
    EXPECT_TRUE(j.contains("macro_f1"));
}

TEST(EpochLog, KeysInDocumentedOrder) {
    const std::string line = epoch_record_to_json({3, 0.5, 0.75, 0.625, 0.5});
    EXPECT_EQ(line, R"({"epoch":3,"train_loss":0.5,"train_acc":0.75,"val_loss":0.625,"val_acc":0.5})");
}
