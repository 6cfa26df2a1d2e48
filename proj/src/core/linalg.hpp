// SPDX-License-Identifier: Apache-2.0
//
// Dense real matrix kernel for desk-scale rate computations: RQ and
// symmetric eigen decompositions, PSD log-determinants, scalar
// water-filling, and a seedable portable Gaussian sampler.

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdrc {

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  RankDeficient,
  NotSymmetric,
  NotPsd,
  TraceBudgetExceeded,
  EmptyGains,
  ZeroGain,
  InconsistentInputs,
  Unbounded,
  NonConvergence,
  InvalidRegime,
  IoError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

/// Row-major dense real matrix. Small sizes only (relay counts and
/// antenna counts are single digits), so everything is plain loops.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  Matrix transposed() const;
  Matrix operator*(const Matrix& rhs) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;
  Matrix scaled(double s) const;

  /// a * a^T
  Matrix gram() const;
  /// a^T * a
  Matrix gram_t() const;

  Matrix top_rows(std::size_t r) const;
  Matrix left_cols(std::size_t c) const;
  std::vector<double> row(std::size_t i) const;
  std::vector<double> col(std::size_t j) const;

  void add_scaled(const Matrix& rhs, double s);
  double trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

Matrix outer(const std::vector<double>& u, const std::vector<double>& v);

/// h = r * u with r upper-triangular (nonnegative diagonal) and
/// u having orthonormal rows.
struct RqFactors {
  Matrix r;  // n x n upper-triangular
  Matrix u;  // n x m, u * u^T = I
};

/// RQ factorization of a full-row-rank h (rows <= cols), computed by
/// Householder QR of the row-reversed transpose. Throws RankDeficient
/// when the smallest singular value is below 1e-10 of the largest.
RqFactors rq_decompose(const Matrix& h);

/// Thin QR of an m x n matrix with m >= n: a = q * r, q with
/// orthonormal columns, r upper-triangular with nonnegative diagonal.
struct QrFactors {
  Matrix q;  // m x n
  Matrix r;  // n x n
};
QrFactors householder_qr(const Matrix& a);

/// Symmetric eigendecomposition (cyclic Jacobi). Eigenvalues ascending,
/// columns of `vectors` are the corresponding orthonormal eigenvectors.
struct EighResult {
  std::vector<double> values;
  Matrix vectors;
};
EighResult eigh(const Matrix& a);

struct LogDetResult {
  double log2_det = 0.0;
  bool degenerate = false;  // some eigenvalue was clamped up to 1e-12
};

/// Base-2 log-determinant of a symmetric PSD matrix via its spectrum.
/// Eigenvalues below 1e-12 are clamped to 1e-12 and flagged; an
/// eigenvalue below -1e-8 (relative to the largest) raises NotPsd.
LogDetResult logdet_psd(const Matrix& a);

/// Spectral helpers for PSD matrices (used by whitening and covariance
/// projections). `inverse_sqrt_psd` clamps eigenvalues at 1e-12.
Matrix inverse_sqrt_psd(const Matrix& a);
Matrix project_psd_trace(const Matrix& a, double trace_budget);

struct WaterfillResult {
  std::vector<double> powers;
  double value_bits = 0.0;  // sum_n log2(1 + g_n p_n / noise)
  double level = 0.0;       // water level mu
};

/// Maximizes sum_n log2(1 + g_n p_n / noise) subject to sum p_n <= budget,
/// p_n >= 0. KKT form p_n = max(0, mu - noise/g_n); the budget is tight
/// to 1e-10 relative. Gains <= 0 receive zero power.
WaterfillResult waterfill(const std::vector<double>& gains, double budget,
                          double noise_var);

/// Deterministic, portable random stream: mt19937_64 with Box-Muller
/// normals and Marsaglia-Tsang gamma variates. The seed is part of every
/// result record, so runs are reproducible bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on (0,1), 53-bit resolution, never exactly 0.
  double uniform01();
  double normal();
  /// Chi-square with `dof` degrees of freedom.
  double chi_square(double dof);

 private:
  double gamma(double shape);  // scale 1

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64-style mixing for deriving independent substreams.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);
Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols,
                              std::uint64_t seed);

}  // namespace mdrc
