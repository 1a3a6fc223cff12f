#pragma once

#include <cstddef>

#include "wassrobust/vec.hpp"

namespace wassrobust {

/// Dense row-major matrix, just enough for small linear programs.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    Vec data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Vec x;
};

/// minimize c.x subject to A x = b, x >= 0.
///
/// Two-phase tableau simplex with Bland's anti-cycling rule. Redundant
/// equality rows are tolerated. Intended for instances with at most a few
/// hundred rows and a few thousand columns.
LpSolution solve_lp(const DenseMatrix& a, const Vec& b, const Vec& c);

}  // namespace wassrobust
