#pragma once

#include <string>

#include "wassrobust/model.hpp"

namespace wassrobust {

/// Binary dump: "WRB1", u32 dim, dim f64 entries of theta, f64 gamma; all little-endian.
std::string encode_params(const ModelParams& p);
ModelParams decode_params(const std::string& bytes);

void write_params(const ModelParams& p, const std::string& path);
ModelParams read_params(const std::string& path);

}  // namespace wassrobust
