#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace mll {

using Int = mpz_class;
using Rat = mpq_class;

/// Dense row-major matrix over Z with exact arithmetic.
class MatZ {
public:
    MatZ() : rows_(0), cols_(0) {}
    MatZ(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    static MatZ identity(std::size_t n) {
        MatZ m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& at(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return a_[i * cols_ + j];
    }
    const Int& at(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return a_[i * cols_ + j];
    }

    MatZ transpose() const {
        MatZ t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    MatZ operator*(const MatZ& rhs) const {
        assert(cols_ == rhs.rows_);
        MatZ p(rows_, rhs.cols_);
        Int tmp;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& aik = at(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < rhs.cols_; ++j) {
                    tmp = aik * rhs.at(k, j);
                    p.at(i, j) += tmp;
                }
            }
        return p;
    }

    bool operator==(const MatZ& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && a_ == rhs.a_;
    }
    bool operator!=(const MatZ& rhs) const { return !(*this == rhs); }

    void swap_rows(std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
    }

    void negate_row(std::size_t i) {
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) = -at(i, c);
    }

    /// row i -= q * row j
    void submul_row(std::size_t i, std::size_t j, const Int& q) {
        if (q == 0) return;
        for (std::size_t c = 0; c < cols_; ++c) at(i, c) -= q * at(j, c);
    }

    /// Fraction-free Gaussian elimination (Bareiss). Exact for square input.
    Int det() const {
        assert(rows_ == cols_);
        const std::size_t n = rows_;
        if (n == 0) return 1;
        MatZ m = *this;
        Int prev = 1;
        int sign = 1;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            if (m.at(k, k) == 0) {
                std::size_t piv = k + 1;
                while (piv < n && m.at(piv, k) == 0) ++piv;
                if (piv == n) return 0;
                m.swap_rows(k, piv);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                for (std::size_t j = k + 1; j < n; ++j) {
                    Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                    mpz_divexact(m.at(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
                }
                m.at(i, k) = 0;
            }
            prev = m.at(k, k);
        }
        Int d = m.at(n - 1, n - 1);
        return sign < 0 ? Int(-d) : d;
    }

    std::string str() const {
        std::string s;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += "[";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) s += " ";
                s += at(i, j).get_str();
            }
            s += "]\n";
        }
        return s;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Int> a_;
};

}  // namespace mll
