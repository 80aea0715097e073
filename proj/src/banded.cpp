#include "chgrow/banded.hpp"

#include <cmath>
#include <cstdlib>

#include "chgrow/errors.hpp"

namespace chgrow {

// Rows of the band storage hold matrix rows; column index within a row is
// ku + kl + (j - i). Row i can see columns [i - kl, i + ku + kl] after
// pivoting fill-in.
BandedLU::BandedLU(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), stride_(2 * kl + ku + 1),
      a_(static_cast<size_t>(n) * (2 * kl + ku + 1), 0.0),
      piv_(static_cast<size_t>(n), 0) {
    if (n <= 0 || kl < 0 || ku < 0) throw SizingError("BandedLU: bad dimensions");
}

double& BandedLU::at(int i, int j) {
    return a_[static_cast<size_t>(i) * stride_ + (kl_ + ku_ + j - i)];
}

double BandedLU::at(int i, int j) const {
    return a_[static_cast<size_t>(i) * stride_ + (kl_ + ku_ + j - i)];
}

void BandedLU::zero() {
    std::fill(a_.begin(), a_.end(), 0.0);
    factored_ = false;
}

void BandedLU::factorize() {
    const int w = kl_ + ku_;  // widest reachable superdiagonal after pivoting
    for (int k = 0; k < n_; ++k) {
        // Partial pivot among rows k .. k+kl.
        int p = k;
        double best = std::abs(at(k, k));
        for (int i = k + 1; i < std::min(n_, k + kl_ + 1); ++i) {
            const double v = std::abs(at(i, k));
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw LinearSolveError("BandedLU: singular pivot column");
        piv_[k] = p;
        if (p != k) {
            for (int j = k; j < std::min(n_, k + w + 1); ++j) {
                double& x = a_[static_cast<size_t>(k) * stride_ + (kl_ + ku_ + j - k)];
                double& y = a_[static_cast<size_t>(p) * stride_ + (kl_ + ku_ + j - p)];
                std::swap(x, y);
            }
        }
        const double pivot = at(k, k);
        for (int i = k + 1; i < std::min(n_, k + kl_ + 1); ++i) {
            const double m = at(i, k) / pivot;
            at(i, k) = m;  // store multiplier in place
            if (m != 0.0) {
                for (int j = k + 1; j < std::min(n_, k + w + 1); ++j)
                    at(i, j) -= m * at(k, j);
            }
        }
    }
    factored_ = true;
}

void BandedLU::solve(std::span<double> b) const {
    if (!factored_) throw LinearSolveError("BandedLU: solve before factorize");
    const int w = kl_ + ku_;
    // Forward substitution with pivoting.
    for (int k = 0; k < n_; ++k) {
        if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        for (int i = k + 1; i < std::min(n_, k + kl_ + 1); ++i)
            b[i] -= at(i, k) * b[k];
    }
    // Back substitution.
    for (int i = n_ - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < std::min(n_, i + w + 1); ++j)
            s -= at(i, j) * b[j];
        b[i] = s / at(i, i);
    }
}

DirichletTridiagonal::DirichletTridiagonal(int n) : n_(n), diag_(static_cast<size_t>(n)) {
    if (n <= 0) throw SizingError("DirichletTridiagonal: n must be positive");
    // Elimination of tridiag(-1,2,-1); pivots are 2 - 1/d_{i-1}, all > 1.
    diag_[0] = 2.0;
    for (int i = 1; i < n_; ++i) diag_[i] = 2.0 - 1.0 / diag_[i - 1];
}

void DirichletTridiagonal::solve(std::span<const double> rhs, std::span<double> w) const {
    w[0] = rhs[0];
    for (int i = 1; i < n_; ++i) w[i] = rhs[i] + w[i - 1] / diag_[i - 1];
    w[n_ - 1] /= diag_[n_ - 1];
    for (int i = n_ - 2; i >= 0; --i) w[i] = (w[i] + w[i + 1]) / diag_[i];
}

}  // namespace chgrow
