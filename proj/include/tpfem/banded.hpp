#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <span>
#include <vector>

#include "tpfem/error.hpp"

namespace tpfem {

/// Square matrix with `lower` subdiagonals and `upper` superdiagonals,
/// stored row-wise. Entry (r, c) exists for r - lower <= c <= r + upper.
template <class T>
class BasicBandedMatrix {
 public:
  using value_type = T;

  BasicBandedMatrix() = default;
  BasicBandedMatrix(int n, int lower, int upper)
      : n_(n),
        lower_(lower),
        upper_(upper),
        width_(static_cast<std::size_t>(lower + upper + 1)),
        data_(static_cast<std::size_t>(n) * width_, T(0)) {
    if (n < 1 || lower < 0 || upper < 0) fail(ErrorKind::parameter, "invalid banded matrix shape");
  }

  int size() const { return n_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }

  bool in_band(int r, int c) const {
    return c >= r - lower_ && c <= r + upper_ && c >= 0 && c < n_;
  }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  T operator()(int r, int c) const { return data_[index(r, c)]; }

  /// Entry or zero outside the band.
  T get(int r, int c) const { return in_band(r, c) ? (*this)(r, c) : T(0); }

  /// y = A x
  template <class U>
  std::vector<T> multiply(std::span<const U> x) const {
    std::vector<T> y(static_cast<std::size_t>(n_), T(0));
    for (int r = 0; r < n_; ++r) {
      const int lo = std::max(0, r - lower_);
      const int hi = std::min(n_ - 1, r + upper_);
      T s(0);
      for (int c = lo; c <= hi; ++c) s += (*this)(r, c) * T(x[c]);
      y[r] = s;
    }
    return y;
  }

  /// Largest |r - c| over stored nonzero entries.
  int occupied_bandwidth() const {
    int w = 0;
    for (int r = 0; r < n_; ++r) {
      const int lo = std::max(0, r - lower_);
      const int hi = std::min(n_ - 1, r + upper_);
      for (int c = lo; c <= hi; ++c) {
        if ((*this)(r, c) != T(0)) w = std::max(w, std::abs(r - c));
      }
    }
    return w;
  }

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * width_ + static_cast<std::size_t>(c - r + lower_);
  }

  int n_ = 0;
  int lower_ = 0;
  int upper_ = 0;
  std::size_t width_ = 0;
  std::vector<T> data_;
};

/// LU factorization with partial (row) pivoting of a banded matrix. Row
/// interchanges widen the upper band of U to lower + upper.
template <class T>
class BasicBandedLu {
 public:
  /// Throws ErrorKind::solver when a pivot falls below
  /// pivot_tolerance times the scale of its row.
  explicit BasicBandedLu(const BasicBandedMatrix<T>& a, double pivot_tolerance = 1e-14)
      : lu_(a.size(), a.lower(), a.lower() + a.upper()),
        pivots_(static_cast<std::size_t>(a.size())),
        lower_(a.lower()) {
    const int n = a.size();
    const int kl = a.lower();
    const int ku = kl + a.upper();

    std::vector<T> scale(static_cast<std::size_t>(n), T(0));
    for (int r = 0; r < n; ++r) {
      const int lo = std::max(0, r - kl);
      const int hi = std::min(n - 1, r + a.upper());
      for (int c = lo; c <= hi; ++c) {
        lu_(r, c) = a(r, c);
        scale[r] = std::max(scale[r], std::abs(a(r, c)));
      }
    }

    for (int j = 0; j < n; ++j) {
      const int last_row = std::min(n - 1, j + kl);
      int p = j;
      T best = std::abs(lu_(j, j));
      for (int r = j + 1; r <= last_row; ++r) {
        if (std::abs(lu_(r, j)) > best) {
          best = std::abs(lu_(r, j));
          p = r;
        }
      }
      pivots_[j] = p;
      const int last_col = std::min(n - 1, j + ku);
      if (p != j) {
        for (int c = j; c <= last_col; ++c) std::swap(lu_(j, c), lu_(p, c));
        std::swap(scale[j], scale[p]);
      }
      const T pivot = lu_(j, j);
      if (!(std::abs(pivot) > T(pivot_tolerance) * scale[j])) {
        std::ostringstream os;
        os << "singular pivot " << static_cast<double>(pivot) << " in column " << j
           << " (row scale " << static_cast<double>(scale[j])
           << "); check coercivity of the problem and the mesh";
        fail(ErrorKind::solver, os.str());
      }
      for (int r = j + 1; r <= last_row; ++r) {
        const T l = lu_(r, j) / pivot;
        lu_(r, j) = l;
        if (l == T(0)) continue;
        for (int c = j + 1; c <= last_col; ++c) lu_(r, c) -= l * lu_(j, c);
      }
    }
  }

  template <class U>
  std::vector<T> solve(std::span<const U> b) const {
    const int n = lu_.size();
    const int kl = lower_;
    const int ku = lu_.upper();
    std::vector<T> x(b.begin(), b.end());
    for (int j = 0; j < n; ++j) {
      const int p = pivots_[j];
      if (p != j) std::swap(x[j], x[p]);
      const int last_row = std::min(n - 1, j + kl);
      for (int r = j + 1; r <= last_row; ++r) x[r] -= lu_(r, j) * x[j];
    }
    for (int r = n - 1; r >= 0; --r) {
      const int last_col = std::min(n - 1, r + ku);
      T s = x[r];
      for (int c = r + 1; c <= last_col; ++c) s -= lu_(r, c) * x[c];
      x[r] = s / lu_(r, r);
    }
    return x;
  }

  /// Upper bandwidth of the computed U factor.
  int factor_upper_bandwidth() const {
    int w = 0;
    const int n = lu_.size();
    for (int r = 0; r < n; ++r) {
      const int hi = std::min(n - 1, r + lu_.upper());
      for (int c = r + 1; c <= hi; ++c) {
        if (lu_(r, c) != T(0)) w = std::max(w, c - r);
      }
    }
    return w;
  }

 private:
  BasicBandedMatrix<T> lu_;
  std::vector<int> pivots_;
  int lower_;
};

using BandedMatrix = BasicBandedMatrix<double>;
using BandedLu = BasicBandedLu<double>;

}  // namespace tpfem
