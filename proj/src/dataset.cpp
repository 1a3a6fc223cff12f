#include "wassrobust/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>

#include "wassrobust/rng.hpp"

namespace wassrobust {

void Dataset::validate() const {
    if (items.empty()) throw ValidationError("dataset is empty");
    if (!(range_lo < range_hi)) throw ValidationError("feature range is empty");
    const std::size_t d = dim();
    if (d == 0) throw ValidationError("dataset has no features");
    for (std::size_t n = 0; n < items.size(); ++n) {
        const Datum& z = items[n];
        if (z.x.size() != d) throw ValidationError("item " + std::to_string(n) + " has a ragged feature vector");
        for (double v : z.x)
            if (!(v >= range_lo && v <= range_hi))
                throw ValidationError("item " + std::to_string(n) + " has a feature outside the declared range");
        if (class_count > 0 &&
            (z.y < 0.0 || z.y >= static_cast<double>(class_count) || z.y != std::floor(z.y)))
            throw ValidationError("item " + std::to_string(n) + " has label outside [0, class_count)");
    }
}

SyntheticKind parse_synthetic_kind(const std::string& s) {
    if (s == "two-gaussians") return SyntheticKind::TwoGaussians;
    if (s == "two-moons") return SyntheticKind::TwoMoons;
    if (s == "linear-regression") return SyntheticKind::LinearRegression;
    throw ConfigError("unknown synthetic dataset '" + s + "'");
}

Dataset gen_synthetic(const SyntheticSpec& spec) {
    if (spec.n < 2) throw ConfigError("synthetic datasets need n >= 2");
    if (spec.dim < 1) throw ConfigError("synthetic datasets need dim >= 1");
    if (!(spec.noise >= 0.0)) throw ConfigError("noise must be nonnegative");
    if (spec.kind == SyntheticKind::TwoMoons && spec.dim < 2) throw ConfigError("two-moons needs dim >= 2");

    Rng rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    auto clip = [](double v) { return std::clamp(v, -1.0, 1.0); };

    Dataset out;
    out.items.reserve(spec.n);
    switch (spec.kind) {
        case SyntheticKind::TwoGaussians:
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double label = i % 2 == 0 ? 1.0 : 0.0;
                const double center = label > 0.0 ? spec.separation : -spec.separation;
                Datum z{Vec(spec.dim), label};
                for (double& v : z.x) v = clip(center + spec.noise * gauss(rng));
                out.items.push_back(std::move(z));
            }
            break;
        case SyntheticKind::TwoMoons: {
            std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
            for (std::size_t i = 0; i < spec.n; ++i) {
                const double label = i % 2 == 0 ? 1.0 : 0.0;
                const double t = angle(rng);
                double a = label > 0.0 ? 1.0 - std::cos(t) : std::cos(t);
                double b = label > 0.0 ? 0.5 - std::sin(t) : std::sin(t);
                Datum z{Vec(spec.dim), label};
                z.x[0] = clip((a - 0.5) / 1.5 + spec.noise * gauss(rng));
                z.x[1] = clip((b - 0.25) / 0.75 + spec.noise * gauss(rng));
                for (std::size_t j = 2; j < spec.dim; ++j) z.x[j] = clip(spec.noise * gauss(rng));
                out.items.push_back(std::move(z));
            }
            break;
        }
        case SyntheticKind::LinearRegression: {
            Vec w(spec.dim);
            for (double& v : w) v = unit(rng);
            for (std::size_t i = 0; i < spec.n; ++i) {
                Datum z{Vec(spec.dim), 0.0};
                for (double& v : z.x) v = unit(rng);
                z.y = dot(w, z.x) + spec.noise * gauss(rng);
                out.items.push_back(std::move(z));
            }
            out.class_count = 0;
            break;
        }
    }
    return out;
}

namespace {

std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) | (std::uint32_t{b[off + 2]} << 8) |
           std::uint32_t{b[off + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                           static_cast<char>(v)};
    out.write(bytes, 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path, std::size_t limit) {
    const auto img = read_bytes(images_path);
    const auto lab = read_bytes(labels_path);
    if (img.size() >= 4 && read_be32(img, 0) != 0x00000803)
        throw IdxBadMagic("'" + images_path + "' is not an IDX image file");
    if (lab.size() >= 4 && read_be32(lab, 0) != 0x00000801)
        throw IdxBadMagic("'" + labels_path + "' is not an IDX label file");
    if (img.size() < 16) throw IdxTruncated("image file '" + images_path + "' is shorter than its header");
    if (lab.size() < 8) throw IdxTruncated("label file '" + labels_path + "' is shorter than its header");

    const std::size_t n_img = read_be32(img, 4);
    const std::size_t rows = read_be32(img, 8), cols = read_be32(img, 12);
    const std::size_t n_lab = read_be32(lab, 4);
    if (n_img != n_lab)
        throw IdxCountMismatch(std::to_string(n_img) + " images but " + std::to_string(n_lab) + " labels");
    const std::size_t pixels = rows * cols;
    if (img.size() < 16 + n_img * pixels) throw IdxTruncated("image file '" + images_path + "' is truncated");
    if (lab.size() < 8 + n_lab) throw IdxTruncated("label file '" + labels_path + "' is truncated");

    const std::size_t n = limit == 0 ? n_img : std::min(limit, n_img);
    Dataset out;
    out.items.reserve(n);
    std::size_t max_label = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Datum z{Vec(pixels), static_cast<double>(lab[8 + i])};
        for (std::size_t p = 0; p < pixels; ++p) z.x[p] = 2.0 * img[16 + i * pixels + p] / 255.0 - 1.0;
        max_label = std::max<std::size_t>(max_label, lab[8 + i]);
        out.items.push_back(std::move(z));
    }
    out.class_count = max_label + 1;
    return out;
}

void write_idx(const std::string& images_path, const std::string& labels_path,
               const std::vector<std::vector<std::uint8_t>>& images, std::uint32_t rows, std::uint32_t cols,
               const std::vector<std::uint8_t>& labels) {
    if (images.size() != labels.size()) throw ConfigError("image and label counts differ");
    std::ofstream img(images_path, std::ios::binary);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!img || !lab) throw IoError("cannot create IDX output files");
    put_be32(img, 0x00000803);
    put_be32(img, static_cast<std::uint32_t>(images.size()));
    put_be32(img, rows);
    put_be32(img, cols);
    for (const auto& im : images) {
        if (im.size() != std::size_t{rows} * cols) throw ConfigError("image size does not match rows * cols");
        img.write(reinterpret_cast<const char*>(im.data()), static_cast<std::streamsize>(im.size()));
    }
    put_be32(lab, 0x00000801);
    put_be32(lab, static_cast<std::uint32_t>(labels.size()));
    lab.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
    if (!img || !lab) throw IoError("failed writing IDX files");
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_real(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (!s.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || s.empty()) throw FormatError("'" + s + "' is not a number");
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, delimiter)) out.push_back(cell);
    if (!line.empty() && line.back() == delimiter) out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column, char delimiter) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw FormatError("'" + path + "' has no header");
    auto header = split(line, delimiter);
    for (auto& h : header) h = trim(h);
    const auto label_it = std::find(header.begin(), header.end(), label_column);
    if (label_it == header.end()) throw FormatError("no column named '" + label_column + "' in '" + path + "'");
    const auto label_idx = static_cast<std::size_t>(label_it - header.begin());
    if (header.size() < 2) throw FormatError("'" + path + "' has no feature columns");

    Dataset out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto cells = split(line, delimiter);
        if (cells.size() != header.size())
            throw FormatError("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                              " cells, header has " + std::to_string(header.size()));
        Datum z;
        for (std::size_t j = 0; j < cells.size(); ++j) {
            double v = 0.0;
            try {
                v = parse_real(trim(cells[j]));
            } catch (const FormatError&) {
                throw FormatError("line " + std::to_string(line_no) + ", column '" + header[j] + "': '" + cells[j] +
                                  "' is not numeric");
            }
            if (j == label_idx)
                z.y = v;
            else
                z.x.push_back(v);
        }
        out.items.push_back(std::move(z));
    }
    if (out.items.empty()) throw FormatError("'" + path + "' has no data rows");

    double lo = 0.0, hi = 0.0;
    bool first = true, integral = true;
    double max_label = 0.0;
    for (const Datum& z : out.items) {
        for (double v : z.x) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
        integral = integral && z.y >= 0.0 && z.y == std::floor(z.y);
        max_label = std::max(max_label, z.y);
    }
    if (lo >= -1.0 && hi <= 1.0) {
        out.range_lo = -1.0;
        out.range_hi = 1.0;
    } else {
        out.range_lo = lo;
        out.range_hi = hi > lo ? hi : lo + 1.0;
    }
    out.class_count = integral ? static_cast<std::size_t>(max_label) + 1 : 0;
    if (out.class_count == 1) out.class_count = 2;
    return out;
}

void write_csv(const Dataset& data, const std::string& path, const std::string& label_column, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot create '" + path + "'");
    for (std::size_t j = 0; j < data.dim(); ++j) out << 'f' << j << delimiter;
    out << label_column << '\n';
    for (const Datum& z : data.items) {
        for (double v : z.x) out << format_real(v) << delimiter;
        out << format_real(z.y) << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

Dataset select_classes(const Dataset& data, const std::vector<int>& classes) {
    if (classes.empty()) throw ConfigError("class selection is empty");
    Dataset out;
    out.range_lo = data.range_lo;
    out.range_hi = data.range_hi;
    out.class_count = classes.size() < 2 ? 2 : classes.size();
    for (const Datum& z : data.items) {
        const auto it = std::find(classes.begin(), classes.end(), static_cast<int>(z.y));
        if (it != classes.end()) out.items.push_back(Datum{z.x, static_cast<double>(it - classes.begin())});
    }
    return out;
}

}  // namespace wassrobust
