#include "wassrobust/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wassrobust/error.hpp"

namespace wassrobust {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

class Tableau {
  public:
    // Columns: n originals, m artificials, rhs.
    Tableau(const DenseMatrix& a, const Vec& b)
        : m_(a.rows), n_(a.cols), width_(a.cols + a.rows + 1), t_((a.rows + 1) * width_, 0.0), basis_(a.rows) {
        for (std::size_t i = 0; i < m_; ++i) {
            const double s = b[i] < 0.0 ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) at(i, j) = s * a(i, j);
            at(i, n_ + i) = 1.0;
            at(i, rhs()) = s * b[i];
            basis_[i] = n_ + i;
        }
    }

    double& at(std::size_t i, std::size_t j) { return t_[i * width_ + j]; }
    double at(std::size_t i, std::size_t j) const { return t_[i * width_ + j]; }
    std::size_t rhs() const { return width_ - 1; }
    std::size_t obj() const { return m_; }

    void load_phase_one_costs() {
        for (std::size_t j = 0; j < width_; ++j) at(obj(), j) = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) at(obj(), j) -= at(i, j);
            at(obj(), rhs()) -= at(i, rhs());
        }
    }

    void load_phase_two_costs(const Vec& c) {
        for (std::size_t j = 0; j < width_; ++j) at(obj(), j) = j < n_ ? c[j] : 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t bj = basis_[i];
            const double cb = bj < n_ ? c[bj] : 0.0;
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) at(obj(), j) -= cb * at(i, j);
        }
    }

    // Returns false when the objective is unbounded below.
    bool optimize(std::size_t enterable) {
        for (;;) {
            std::size_t enter = enterable;
            for (std::size_t j = 0; j < enterable; ++j) {
                if (at(obj(), j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter == enterable) return true;
            std::size_t leave = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = at(i, enter);
                if (a <= kPivotTol) continue;
                const double ratio = at(i, rhs()) / a;
                if (leave == m_ || ratio < best - 1e-14 ||
                    (std::abs(ratio - best) <= 1e-14 && basis_[i] < basis_[leave])) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
    }

    // Pivots artificial variables out of the basis where possible.
    void expel_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (std::abs(at(i, j)) > 1e-9) {
                    pivot(i, j);
                    break;
                }
            }
        }
    }

    void pivot(std::size_t row, std::size_t col) {
        const double p = at(row, col);
        for (std::size_t j = 0; j < width_; ++j) at(row, j) /= p;
        for (std::size_t i = 0; i <= m_; ++i) {
            if (i == row) continue;
            const double f = at(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) at(i, j) -= f * at(row, j);
            at(i, col) = 0.0;
        }
        basis_[row] = col;
    }

    Vec primal() const {
        Vec x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, at(i, rhs()));
        return x;
    }

    std::size_t originals() const { return n_; }

  private:
    std::size_t m_, n_, width_;
    Vec t_;
    std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const DenseMatrix& a, const Vec& b, const Vec& c) {
    if (b.size() != a.rows || c.size() != a.cols) throw InternalError("LP dimensions are inconsistent");
    Tableau t(a, b);
    t.load_phase_one_costs();
    t.optimize(a.cols + a.rows);
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    if (-t.at(t.obj(), t.rhs()) > 1e-9 * scale) return {LpStatus::Infeasible, 0.0, {}};
    t.expel_artificials();
    t.load_phase_two_costs(c);
    if (!t.optimize(a.cols)) return {LpStatus::Unbounded, -std::numeric_limits<double>::infinity(), {}};
    LpSolution s{LpStatus::Optimal, 0.0, t.primal()};
    s.value = dot(c, s.x);
    return s;
}

}  // namespace wassrobust
