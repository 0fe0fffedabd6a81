#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace hsplab {

using BigInt = boost::multiprecision::cpp_int;

/// Dense integer matrix, row-major, arbitrary precision entries.
class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<long long>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& r : init) {
      for (auto v : r) a_.emplace_back(v);
    }
  }

  static IntegerMatrix identity(std::size_t n) {
    IntegerMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  BigInt& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const BigInt& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  friend IntegerMatrix operator*(const IntegerMatrix& x, const IntegerMatrix& y) {
    IntegerMatrix out(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i) {
      for (std::size_t k = 0; k < x.cols_; ++k) {
        if (x(i, k) == 0) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) out(i, j) += x(i, k) * y(k, j);
      }
    }
    return out;
  }
  friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(i, c), (*this)(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, i), (*this)(r, j));
  }
  /// row[dst] += q * row[src]
  void add_row(std::size_t dst, std::size_t src, const BigInt& q) {
    if (q == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += q * (*this)(src, c);
  }
  /// col[dst] += q * col[src]
  void add_col(std::size_t dst, std::size_t src, const BigInt& q) {
    if (q == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, dst) += q * (*this)(r, src);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(i, c) = -(*this)(i, c);
  }
  void negate_col(std::size_t j) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, j) = -(*this)(r, j);
  }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < rows_; ++i) {
      s += i ? ",[" : "[";
      for (std::size_t j = 0; j < cols_; ++j) s += (j ? "," : "") + (*this)(i, j).str();
      s += "]";
    }
    return s + "]";
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> a_;
};

/// U·A·V = D with U, V unimodular and D diagonal, d1 | d2 | ... (all >= 0).
/// The inverses of U and V are tracked alongside.
struct SmithForm {
  IntegerMatrix U, D, V;
  IntegerMatrix U_inv, V_inv;

  std::size_t rank() const {
    std::size_t r = 0;
    while (r < std::min(D.rows(), D.cols()) && D(r, r) != 0) ++r;
    return r;
  }
  std::vector<BigInt> diagonal() const {
    std::vector<BigInt> d;
    for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
    return d;
  }
};

namespace detail {

/// Floor division for signed BigInt.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace detail

inline SmithForm smith_normal_form(const IntegerMatrix& A) {
  const std::size_t m = A.rows(), n = A.cols();
  SmithForm s{IntegerMatrix::identity(m), A, IntegerMatrix::identity(n), IntegerMatrix::identity(m), IntegerMatrix::identity(n)};
  IntegerMatrix& D = s.D;

  // Row op "row i += q row j" on D is U <- E U; U_inv <- U_inv E^-1 (col j -= q col i).
  auto row_add = [&](std::size_t i, std::size_t j, const BigInt& q) {
    D.add_row(i, j, q);
    s.U.add_row(i, j, q);
    s.U_inv.add_col(j, i, -q);
  };
  auto row_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    D.swap_rows(i, j);
    s.U.swap_rows(i, j);
    s.U_inv.swap_cols(i, j);
  };
  auto row_neg = [&](std::size_t i) {
    D.negate_row(i);
    s.U.negate_row(i);
    s.U_inv.negate_col(i);
  };
  // Col op "col i += q col j" on D is V <- V E; V_inv <- E^-1 V_inv (row j -= q row i).
  auto col_add = [&](std::size_t i, std::size_t j, const BigInt& q) {
    D.add_col(i, j, q);
    s.V.add_col(i, j, q);
    s.V_inv.add_row(j, i, -q);
  };
  auto col_swap = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    D.swap_cols(i, j);
    s.V.swap_cols(i, j);
    s.V_inv.swap_rows(i, j);
  };

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::size_t pi = m, pj = n;
      BigInt best;
      for (std::size_t i = t; i < m; ++i) {
        for (std::size_t j = t; j < n; ++j) {
          if (D(i, j) == 0) continue;
          BigInt v = abs(D(i, j));
          if (pi == m || v < best) {
            best = v;
            pi = i;
            pj = j;
          }
        }
      }
      if (pi == m) return s;  // trailing block is zero
      row_swap(t, pi);
      col_swap(t, pj);

      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t) == 0) continue;
        row_add(i, t, -detail::floor_div(D(i, t), D(t, t)));
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D(t, j) == 0) continue;
        col_add(j, t, -detail::floor_div(D(t, j), D(t, t)));
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility: pull an offending row into row t and go again.
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i) {
        for (std::size_t j = t + 1; j < n; ++j) {
          if (D(i, j) % D(t, t) != 0) {
            row_add(t, i, 1);
            divides = false;
            break;
          }
        }
      }
      if (divides) break;
    }
    if (D(t, t) < 0) row_neg(t);
  }
  return s;
}

/// Basis of {x in Z^n : A x = 0}, one vector per entry.
inline std::vector<std::vector<BigInt>> integer_kernel(const IntegerMatrix& A) {
  const SmithForm s = smith_normal_form(A);
  std::vector<std::vector<BigInt>> basis;
  for (std::size_t j = s.rank(); j < A.cols(); ++j) {
    std::vector<BigInt> v(A.cols());
    for (std::size_t i = 0; i < A.cols(); ++i) v[i] = s.V(i, j);
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Full-rank sublattice of Z^k kept in upper-triangular Hermite form. Every
/// lattice used here contains m_1 e_1, ..., m_k e_k, so the basis is square
/// with positive pivots.
class Lattice {
 public:
  Lattice() = default;
  /// Starts from the diagonal lattice diag(moduli).
  explicit Lattice(const std::vector<std::uint64_t>& moduli) : k_(moduli.size()), basis_(k_, std::vector<BigInt>(k_)) {
    for (std::size_t i = 0; i < k_; ++i) basis_[i][i] = moduli[i];
  }

  std::size_t dim() const noexcept { return k_; }
  const std::vector<std::vector<BigInt>>& basis() const noexcept { return basis_; }

  BigInt determinant() const {
    BigInt d = 1;
    for (std::size_t i = 0; i < k_; ++i) d *= basis_[i][i];
    return d;
  }

  bool contains(std::vector<BigInt> v) const {
    for (std::size_t c = 0; c < k_; ++c) {
      if (v[c] % basis_[c][c] != 0) return false;
      const BigInt q = v[c] / basis_[c][c];
      if (q != 0) {
        for (std::size_t j = c; j < k_; ++j) v[j] -= q * basis_[c][j];
      }
    }
    return true;
  }

  /// Adds v; returns true when the lattice grew.
  bool add(const std::vector<BigInt>& v) {
    if (contains(v)) return false;
    std::vector<std::vector<BigInt>> rows = basis_;
    rows.push_back(v);
    rebuild(std::move(rows));
    return true;
  }

  /// Lattice generated by `rows` (which must span a full-rank lattice).
  static Lattice from_rows(std::size_t k, std::vector<std::vector<BigInt>> rows) {
    Lattice L;
    L.k_ = k;
    L.rebuild(std::move(rows));
    return L;
  }

 private:
  void rebuild(std::vector<std::vector<BigInt>> rows) {
    std::vector<std::vector<BigInt>> out;
    for (std::size_t c = 0; c < k_; ++c) {
      // Euclid on column c over the remaining rows until one nonzero remains.
      for (;;) {
        std::size_t piv = rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i][c] != 0 && (piv == rows.size() || abs(rows[i][c]) < abs(rows[piv][c]))) piv = i;
        }
        if (piv == rows.size()) {
          basis_.clear();
          k_ = 0;
          throw std::logic_error("Lattice::rebuild: rows are not full rank");
        }
        bool done = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (i == piv || rows[i][c] == 0) continue;
          const BigInt q = detail::floor_div(rows[i][c], rows[piv][c]);
          for (std::size_t j = c; j < k_; ++j) rows[i][j] -= q * rows[piv][j];
          if (rows[i][c] != 0) done = false;
        }
        if (done) {
          auto r = std::move(rows[piv]);
          rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(piv));
          if (r[c] < 0) {
            for (auto& x : r) x = -x;
          }
          out.push_back(std::move(r));
          break;
        }
      }
      rows.erase(std::remove_if(rows.begin(), rows.end(),
                                [&](const std::vector<BigInt>& r) {
                                  return std::all_of(r.begin() + static_cast<std::ptrdiff_t>(c), r.end(),
                                                     [](const BigInt& x) { return x == 0; });
                                }),
                 rows.end());
    }
    // Reduce entries above each pivot into [0, pivot).
    for (std::size_t c = 0; c < k_; ++c) {
      for (std::size_t i = 0; i < c; ++i) {
        const BigInt q = detail::floor_div(out[i][c], out[c][c]);
        if (q != 0) {
          for (std::size_t j = c; j < k_; ++j) out[i][j] -= q * out[c][j];
        }
      }
    }
    basis_ = std::move(out);
  }

  std::size_t k_ = 0;
  std::vector<std::vector<BigInt>> basis_;
};

}  // namespace hsplab
