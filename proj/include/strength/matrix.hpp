#pragma once

#include <optional>
#include <string>
#include <vector>

#include "strength/error.hpp"
#include "strength/field.hpp"

namespace strength {

template <class F>
struct Mat {
  using E = typename F::Elem;
  const F* K = nullptr;
  size_t rows = 0, cols = 0;
  std::vector<E> a;

  Mat() = default;
  Mat(const F& k, size_t r, size_t c) : K(&k), rows(r), cols(c), a(r * c, k.zero()) {}

  static Mat identity(const F& k, size_t n) {
    Mat m(k, n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = k.one();
    return m;
  }

  E& operator()(size_t i, size_t j) { return a[i * cols + j]; }
  const E& operator()(size_t i, size_t j) const { return a[i * cols + j]; }

  std::vector<E> row(size_t i) const { return {a.begin() + i * cols, a.begin() + (i + 1) * cols}; }
  std::vector<E> col(size_t j) const {
    std::vector<E> v(rows);
    for (size_t i = 0; i < rows; ++i) v[i] = (*this)(i, j);
    return v;
  }
  void set_row(size_t i, const std::vector<E>& v) {
    for (size_t j = 0; j < cols; ++j) (*this)(i, j) = v[j];
  }
  void set_col(size_t j, const std::vector<E>& v) {
    for (size_t i = 0; i < rows; ++i) (*this)(i, j) = v[i];
  }

  bool is_zero() const {
    for (auto& x : a)
      if (!x.is_zero()) return false;
    return true;
  }

  Mat transpose() const {
    Mat t(*K, cols, rows);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Mat act(GalEl g) const {
    Mat m = *this;
    for (auto& x : m.a) x = K->act(x, g);
    return m;
  }

  Mat scaled(const E& s) const {
    Mat m = *this;
    for (auto& x : m.a) x = x * s;
    return m;
  }
};

template <class F>
bool operator==(const Mat<F>& A, const Mat<F>& B) {
  if (A.rows != B.rows || A.cols != B.cols) return false;
  for (size_t i = 0; i < A.a.size(); ++i)
    if (A.a[i] != B.a[i]) return false;
  return true;
}

template <class F>
Mat<F> operator*(const Mat<F>& A, const Mat<F>& B) {
  if (A.cols != B.rows) fail("DimensionMismatch", "matrix product");
  Mat<F> C(*A.K, A.rows, B.cols);
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t k = 0; k < A.cols; ++k) {
      const auto& x = A(i, k);
      if (x.is_zero()) continue;
      for (size_t j = 0; j < B.cols; ++j) C(i, j) += x * B(k, j);
    }
  return C;
}

template <class F>
Mat<F> operator+(const Mat<F>& A, const Mat<F>& B) {
  if (A.rows != B.rows || A.cols != B.cols) fail("DimensionMismatch", "matrix sum");
  Mat<F> C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
  return C;
}

template <class F>
Mat<F> operator-(const Mat<F>& A, const Mat<F>& B) {
  if (A.rows != B.rows || A.cols != B.cols) fail("DimensionMismatch", "matrix difference");
  Mat<F> C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
  return C;
}

template <class F>
std::vector<typename F::Elem> mat_vec(const Mat<F>& A, const std::vector<typename F::Elem>& v) {
  if (A.cols != v.size()) fail("DimensionMismatch", "matrix-vector product");
  std::vector<typename F::Elem> r(A.rows, A.K->zero());
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t j = 0; j < A.cols; ++j)
      if (!v[j].is_zero()) r[i] += A(i, j) * v[j];
  return r;
}

template <class F>
Mat<F> block_diag(const Mat<F>& A, const Mat<F>& B) {
  Mat<F> C(*A.K, A.rows + B.rows, A.cols + B.cols);
  for (size_t i = 0; i < A.rows; ++i)
    for (size_t j = 0; j < A.cols; ++j) C(i, j) = A(i, j);
  for (size_t i = 0; i < B.rows; ++i)
    for (size_t j = 0; j < B.cols; ++j) C(A.rows + i, A.cols + j) = B(i, j);
  return C;
}

// In-place reduced row echelon form.  Pivot columns are chosen left to right;
// returns them.  Rows beyond the rank become zero.
template <class F>
std::vector<size_t> rref(Mat<F>& M) {
  using E = typename F::Elem;
  std::vector<size_t> piv;
  size_t r = 0;
  for (size_t c = 0; c < M.cols && r < M.rows; ++c) {
    size_t p = r;
    while (p < M.rows && M(p, c).is_zero()) ++p;
    if (p == M.rows) continue;
    if (p != r)
      for (size_t j = 0; j < M.cols; ++j) std::swap(M(p, j), M(r, j));
    E iv = inv(M(r, c));
    for (size_t j = c; j < M.cols; ++j) M(r, j) = M(r, j) * iv;
    for (size_t i = 0; i < M.rows; ++i) {
      if (i == r || M(i, c).is_zero()) continue;
      E t = M(i, c);
      for (size_t j = c; j < M.cols; ++j)
        if (!M(r, j).is_zero()) M(i, j) -= t * M(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

template <class F>
size_t rank(Mat<F> M) {
  return rref(M).size();
}

template <class F>
Mat<F> inverse(const Mat<F>& A) {
  if (A.rows != A.cols) fail("DimensionMismatch", "inverse of a non-square matrix");
  size_t n = A.rows;
  Mat<F> W(*A.K, n, 2 * n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) W(i, j) = A(i, j);
    W(i, n + i) = A.K->one();
  }
  auto piv = rref(W);
  if (piv.size() < n || piv[n - 1] != n - 1) fail("SingularMatrix", "matrix is not invertible");
  Mat<F> R(*A.K, n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) R(i, j) = W(i, n + j);
  return R;
}

// Basis of {x : A x = 0}, one vector per free column.
template <class F>
std::vector<std::vector<typename F::Elem>> nullspace(Mat<F> A) {
  auto piv = rref(A);
  std::vector<char> is_piv(A.cols, 0);
  for (auto p : piv) is_piv[p] = 1;
  std::vector<std::vector<typename F::Elem>> out;
  for (size_t f = 0; f < A.cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<typename F::Elem> v(A.cols, A.K->zero());
    v[f] = A.K->one();
    for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -A(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

// Some solution of A x = b, or nothing.
template <class F>
std::optional<std::vector<typename F::Elem>> solve(const Mat<F>& A, const std::vector<typename F::Elem>& b) {
  Mat<F> W(*A.K, A.rows, A.cols + 1);
  for (size_t i = 0; i < A.rows; ++i) {
    for (size_t j = 0; j < A.cols; ++j) W(i, j) = A(i, j);
    W(i, A.cols) = b[i];
  }
  auto piv = rref(W);
  if (!piv.empty() && piv.back() == A.cols) return std::nullopt;
  std::vector<typename F::Elem> x(A.cols, A.K->zero());
  for (size_t i = 0; i < piv.size(); ++i) x[piv[i]] = W(i, A.cols);
  return x;
}

template <class F>
Mat<F> from_rows(const F& K, const std::vector<std::vector<typename F::Elem>>& rows, size_t cols) {
  Mat<F> M(K, rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i) M.set_row(i, rows[i]);
  return M;
}

template <class F>
Mat<F> from_cols(const F& K, const std::vector<std::vector<typename F::Elem>>& cs, size_t rows) {
  Mat<F> M(K, rows, cs.size());
  for (size_t j = 0; j < cs.size(); ++j) M.set_col(j, cs[j]);
  return M;
}

template <class F>
std::string format(const Mat<F>& M) {
  std::string s = "[";
  for (size_t i = 0; i < M.rows; ++i) {
    s += i ? "; " : "";
    for (size_t j = 0; j < M.cols; ++j) s += (j ? " " : "") + M.K->format(M(i, j));
  }
  return s + "]";
}

// ---------------------------------------------------------------- vectors

template <class E>
bool all_zero(const std::vector<E>& v) {
  for (auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

template <class E>
void axpy(std::vector<E>& y, const E& a, const std::vector<E>& x) {
  if (a.is_zero()) return;
  for (size_t i = 0; i < y.size(); ++i)
    if (!x[i].is_zero()) y[i] += a * x[i];
}

template <class F>
std::vector<typename F::Elem> act_vec(const F& K, const std::vector<typename F::Elem>& v, GalEl g) {
  std::vector<typename F::Elem> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = K.act(v[i], g);
  return r;
}

}  // namespace strength
