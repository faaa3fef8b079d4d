#pragma once

#include "vqc/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace vqc {

struct Sample {
    std::vector<double> features;
    Label label = Label::none;

    bool operator==(const Sample &) const = default;
};

/// Labelled feature vectors of a common width. Loaders reject empty inputs;
/// split() may legitimately produce an empty part.
struct Dataset {
    std::vector<Sample> samples;
    std::size_t feature_dim = 0;
    std::string provenance;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }

    /// Throws InvalidArgument when a sample's width differs from feature_dim
    /// or a feature is not finite.
    void validate() const;
};

} // namespace vqc
