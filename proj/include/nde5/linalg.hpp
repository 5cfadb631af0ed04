#pragma once

// Banded LU with partial pivoting (compact diagonal storage) plus a small
// Woodbury correction for a handful of dense rows, as needed by nonlocal
// boundary closures in the collocation solver.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nde5/fitting.hpp"

namespace nde5 {

// A(i, j) stored at band(i, j - i + m1) for |j - i| within the bandwidths.
class BandMatrix {
public:
    BandMatrix(int n, int m1, int m2)
        : n_(n), m1_(m1), m2_(m2), mm_(m1 + m2 + 1), a_(static_cast<std::size_t>(n) * mm_, 0.0) {}

    int size() const { return n_; }

    double& at(int i, int j) {
        const int k = j - i + m1_;
        if (k < 0 || k >= mm_) throw std::out_of_range("band: entry outside bandwidth");
        return a_[static_cast<std::size_t>(i) * mm_ + k];
    }
    double get(int i, int j) const {
        const int k = j - i + m1_;
        if (k < 0 || k >= mm_) return 0.0;
        return a_[static_cast<std::size_t>(i) * mm_ + k];
    }

    // LU factorization with partial pivoting; returns false on a zero pivot.
    bool factorize() {
        al_.assign(static_cast<std::size_t>(n_) * m1_, 0.0);
        indx_.assign(n_, 0);
        pivot_min_ = 1e300;
        pivot_max_ = 0.0;

        int l = m1_;
        for (int i = 0; i < m1_; ++i) {
            for (int j = m1_ - i; j < mm_; ++j) a_[idx(i, j - l)] = a_[idx(i, j)];
            --l;
            for (int j = mm_ - l - 1; j < mm_; ++j) a_[idx(i, j)] = 0.0;
        }
        l = m1_;
        for (int k = 0; k < n_; ++k) {
            double dum = a_[idx(k, 0)];
            int ip = k;
            if (l < n_) ++l;
            for (int j = k + 1; j < l; ++j) {
                if (std::fabs(a_[idx(j, 0)]) > std::fabs(dum)) {
                    dum = a_[idx(j, 0)];
                    ip = j;
                }
            }
            indx_[k] = ip;
            if (dum == 0.0) return false;
            if (ip != k)
                for (int j = 0; j < mm_; ++j) std::swap(a_[idx(k, j)], a_[idx(ip, j)]);
            pivot_min_ = std::min(pivot_min_, std::fabs(a_[idx(k, 0)]));
            pivot_max_ = std::max(pivot_max_, std::fabs(a_[idx(k, 0)]));
            for (int i = k + 1; i < l; ++i) {
                const double mult = a_[idx(i, 0)] / a_[idx(k, 0)];
                al_[static_cast<std::size_t>(k) * m1_ + (i - k - 1)] = mult;
                for (int j = 1; j < mm_; ++j) a_[idx(i, j - 1)] = a_[idx(i, j)] - mult * a_[idx(k, j)];
                a_[idx(i, mm_ - 1)] = 0.0;
            }
        }
        factored_ = true;
        return true;
    }

    void solve(std::vector<double>& b) const {
        if (!factored_) throw std::runtime_error("band: solve before factorize");
        int l = m1_;
        for (int k = 0; k < n_; ++k) {
            const int i = indx_[k];
            if (i != k) std::swap(b[k], b[i]);
            if (l < n_) ++l;
            for (int j = k + 1; j < l; ++j)
                b[j] -= al_[static_cast<std::size_t>(k) * m1_ + (j - k - 1)] * b[k];
        }
        l = 1;
        for (int i = n_ - 1; i >= 0; --i) {
            double dum = b[i];
            for (int k = 1; k < l; ++k) dum -= a_[idx(i, k)] * b[i + k];
            b[i] = dum / a_[idx(i, 0)];
            if (l < mm_) ++l;
        }
    }

    double pivot_ratio() const { return (pivot_min_ > 0) ? pivot_max_ / pivot_min_ : 1e300; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * mm_ + j; }

    int n_, m1_, m2_, mm_;
    std::vector<double> a_, al_;
    std::vector<int> indx_;
    bool factored_ = false;
    double pivot_min_ = 0, pivot_max_ = 0;
};

// Solve (B + sum_k e_{rk} w_k^T) x = b given a factorized band matrix B,
// where row rk of the true matrix is the dense vector (proxy row + w_k).
class BorderedBandSolver {
public:
    BorderedBandSolver(BandMatrix band, std::vector<int> rows, std::vector<std::vector<double>> w)
        : band_(std::move(band)), rows_(std::move(rows)), w_(std::move(w)) {
        if (!band_.factorize()) throw std::runtime_error("band: singular factor");
        const std::size_t r = rows_.size();
        cols_.assign(r, std::vector<double>(band_.size(), 0.0));
        for (std::size_t k = 0; k < r; ++k) {
            cols_[k][rows_[k]] = 1.0;
            band_.solve(cols_[k]);
        }
        // capacitance C = I + W^T B^{-1} U
        cap_.assign(r * r, 0.0);
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t k = 0; k < r; ++k) {
                double s = (j == k) ? 1.0 : 0.0;
                for (int i = 0; i < band_.size(); ++i) s += w_[j][i] * cols_[k][i];
                cap_[j * r + k] = s;
            }
    }

    std::vector<double> solve(std::vector<double> b) const {
        band_.solve(b);
        const std::size_t r = rows_.size();
        if (r == 0) return b;
        std::vector<double> rhs(r);
        for (std::size_t j = 0; j < r; ++j) {
            double s = 0;
            for (int i = 0; i < band_.size(); ++i) s += w_[j][i] * b[i];
            rhs[j] = s;
        }
        std::vector<double> y = solve_dense(cap_, rhs);
        for (std::size_t k = 0; k < r; ++k)
            for (int i = 0; i < band_.size(); ++i) b[i] -= cols_[k][i] * y[k];
        return b;
    }

    double pivot_ratio() const { return band_.pivot_ratio(); }

private:
    BandMatrix band_;
    std::vector<int> rows_;
    std::vector<std::vector<double>> w_;
    std::vector<std::vector<double>> cols_;
    std::vector<double> cap_;
};

} // namespace nde5
