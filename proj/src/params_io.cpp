#include "wassrobust/params_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <limits>

#include "wassrobust/error.hpp"
#include "wassrobust/metrics.hpp"

namespace wassrobust {

namespace {

void put_le(std::string& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint64_t get_le(const std::string& in, std::size_t off, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{static_cast<unsigned char>(in[off + i])} << (8 * i);
    return v;
}

}  // namespace

std::string encode_params(const ModelParams& p) {
    if (p.theta.size() > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("parameter vector too long");
    std::string out = "WRB1";
    put_le(out, p.theta.size(), 4);
    for (double v : p.theta) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
    put_le(out, std::bit_cast<std::uint64_t>(p.gamma), 8);
    return out;
}

ModelParams decode_params(const std::string& bytes) {
    if (bytes.size() < 8 || bytes.compare(0, 4, "WRB1") != 0) throw FormatError("not a WRB1 parameter dump");
    const std::size_t dim = get_le(bytes, 4, 4);
    if (bytes.size() != 8 + 8 * (dim + 1)) throw FormatError("WRB1 dump size does not match its dimension");
    ModelParams p;
    p.theta.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) p.theta[i] = std::bit_cast<double>(get_le(bytes, 8 + 8 * i, 8));
    p.gamma = std::bit_cast<double>(get_le(bytes, 8 + 8 * dim, 8));
    return p;
}

void write_params(const ModelParams& p, const std::string& path) { write_file_atomic(path, encode_params(p)); }

ModelParams read_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return decode_params({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace wassrobust
