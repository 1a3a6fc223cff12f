#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wassrobust/error.hpp"
#include "wassrobust/model.hpp"

namespace wassrobust {

/// Labelled samples with a declared feature range.
struct Dataset {
    std::vector<Datum> items;
    double range_lo = -1.0;
    double range_hi = 1.0;
    /// Number of classes; 0 for regression targets.
    std::size_t class_count = 2;

    std::size_t size() const { return items.size(); }
    std::size_t dim() const { return items.empty() ? 0 : items.front().x.size(); }
    bool is_classification() const { return class_count > 0; }

    /// Non-empty, rectangular, features inside the range, labels valid class indices.
    void validate() const;
};

enum class SyntheticKind { TwoGaussians, TwoMoons, LinearRegression };

SyntheticKind parse_synthetic_kind(const std::string& s);

struct SyntheticSpec {
    SyntheticKind kind = SyntheticKind::TwoGaussians;
    std::size_t n = 200;
    std::size_t dim = 2;
    double noise = 0.3;
    std::uint64_t seed = 0;
    /// Two-gaussians center magnitude per coordinate: classes sit at +/- separation * (1, ..., 1).
    double separation = 0.5;
};

/// Deterministic for a fixed seed. Features are clipped to [-1, 1].
///
/// two-gaussians: item i has label 1 - i % 2 and center +separation for label 1,
/// -separation for label 0. two-moons: the interleaved half circles rescaled
/// into the box, extra dimensions pure noise (dim >= 2). linear-regression:
/// x ~ U[-1, 1]^d, y = w.x + noise * N(0, 1) with w ~ U[-1, 1]^d.
Dataset gen_synthetic(const SyntheticSpec& spec);

struct IdxBadMagic : FormatError {
    using FormatError::FormatError;
};
struct IdxTruncated : FormatError {
    using FormatError::FormatError;
};
struct IdxCountMismatch : FormatError {
    using FormatError::FormatError;
};

/// Reads an IDX image/label pair (magics 0x00000803 / 0x00000801), keeping
/// at most `limit` items (0 = all) and mapping pixels p to 2p/255 - 1.
Dataset load_idx(const std::string& images_path, const std::string& labels_path, std::size_t limit = 0);

/// Writes an IDX pair; images are rows*cols bytes each.
void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<std::vector<std::uint8_t>>& images, std::uint32_t rows, std::uint32_t cols,
               const std::vector<std::uint8_t>& labels);

/// Header + rows; every column except `label_column` is a feature.
Dataset load_csv(const std::string& path, const std::string& label_column = "label", char delimiter = ',');
void write_csv(const Dataset& data, const std::string& path, const std::string& label_column = "label",
               char delimiter = ',');

/// Keeps the listed classes and relabels them 0, 1, ... in list order.
Dataset select_classes(const Dataset& data, const std::vector<int>& classes);

/// Shortest decimal that round-trips to the same double.
std::string format_real(double v);
double parse_real(const std::string& s);

}  // namespace wassrobust
