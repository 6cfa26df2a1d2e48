// SPDX-License-Identifier: Apache-2.0

#include "core/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mdrc {

namespace {

constexpr double kLog2E = 1.4426950408889634074;  // 1/ln(2)

void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) throw Error(code, what);
}

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::TraceBudgetExceeded: return "TraceBudgetExceeded";
    case ErrorCode::EmptyGains: return "EmptyGains";
    case ErrorCode::ZeroGain: return "ZeroGain";
    case ErrorCode::InconsistentInputs: return "InconsistentInputs";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::InvalidRegime: return "InvalidRegime";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r ? rows.begin()->size() : 0;
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == c, ErrorCode::InvalidArgument, "ragged row list");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  require(cols_ == rhs.rows_, ErrorCode::InvalidArgument, "matmul shape mismatch");
  Matrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      double aik = (*this)(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) out(i, j) += aik * rhs(k, j);
    }
  }
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorCode::InvalidArgument,
          "matrix add shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] += rhs.a_[i];
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorCode::InvalidArgument,
          "matrix sub shape mismatch");
  Matrix out = *this;
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] -= rhs.a_[i];
  return out;
}

Matrix Matrix::scaled(double s) const {
  Matrix out = *this;
  for (double& v : out.a_) v *= s;
  return out;
}

Matrix Matrix::gram() const { return (*this) * this->transposed(); }

Matrix Matrix::gram_t() const { return this->transposed() * (*this); }

Matrix Matrix::top_rows(std::size_t r) const {
  require(r <= rows_, ErrorCode::InvalidArgument, "top_rows out of range");
  Matrix out(r, cols_);
  std::copy(a_.begin(), a_.begin() + static_cast<long>(r * cols_), out.a_.begin());
  return out;
}

Matrix Matrix::left_cols(std::size_t c) const {
  require(c <= cols_, ErrorCode::InvalidArgument, "left_cols out of range");
  Matrix out(rows_, c);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < c; ++j) out(i, j) = (*this)(i, j);
  return out;
}

std::vector<double> Matrix::row(std::size_t i) const {
  return std::vector<double>(a_.begin() + static_cast<long>(i * cols_),
                             a_.begin() + static_cast<long>((i + 1) * cols_));
}

std::vector<double> Matrix::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Matrix::add_scaled(const Matrix& rhs, double s) {
  require(rows_ == rhs.rows_ && cols_ == rhs.cols_, ErrorCode::InvalidArgument,
          "add_scaled shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * rhs.a_[i];
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : a_) m = std::max(m, std::fabs(v));
  return m;
}

bool Matrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
}

Matrix outer(const std::vector<double>& u, const std::vector<double>& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  return m;
}

QrFactors householder_qr(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  require(m >= n, ErrorCode::InvalidArgument, "householder_qr needs rows >= cols");

  Matrix work = a;                    // becomes R in the upper triangle
  Matrix q = Matrix::identity(m);    // accumulated as full, thinned at the end
  std::vector<double> v(m);

  for (std::size_t k = 0; k < n; ++k) {
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) norm += work(i, k) * work(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;  // column already zero below the diagonal

    double alpha = work(k, k) >= 0.0 ? -norm : norm;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      v[i] = work(i, k);
      if (i == k) v[i] -= alpha;
      vnorm2 += v[i] * v[i];
    }
    if (vnorm2 == 0.0) continue;

    // work <- (I - 2 v v^T / v^T v) * work
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i] * work(i, j);
      double f = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < m; ++i) work(i, j) -= f * v[i];
    }
    // q <- q * (I - 2 v v^T / v^T v)
    for (std::size_t i = 0; i < m; ++i) {
      double dot = 0.0;
      for (std::size_t j = k; j < m; ++j) dot += q(i, j) * v[j];
      double f = 2.0 * dot / vnorm2;
      for (std::size_t j = k; j < m; ++j) q(i, j) -= f * v[j];
    }
  }

  QrFactors out;
  out.q = Matrix(m, n);
  out.r = Matrix(n, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.q(i, j) = q(i, j);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = work(i, j);

  // Fix the sign convention: diagonal of R nonnegative.
  for (std::size_t i = 0; i < n; ++i) {
    if (out.r(i, i) < 0.0) {
      for (std::size_t j = i; j < n; ++j) out.r(i, j) = -out.r(i, j);
      for (std::size_t k2 = 0; k2 < m; ++k2) out.q(k2, i) = -out.q(k2, i);
    }
  }
  return out;
}

RqFactors rq_decompose(const Matrix& h) {
  const std::size_t n = h.rows();
  const std::size_t m = h.cols();
  require(n >= 1 && m >= n, ErrorCode::InvalidArgument, "rq_decompose needs rows <= cols");
  require(h.all_finite(), ErrorCode::InvalidArgument, "rq_decompose: non-finite input");

  // Rank check through the spectrum of h h^T.
  EighResult es = eigh(h.gram());
  double lo = std::sqrt(std::max(0.0, es.values.front()));
  double hi = std::sqrt(std::max(0.0, es.values.back()));
  require(lo > 1e-10 * hi && hi > 0.0, ErrorCode::RankDeficient,
          "rq_decompose: numerically rank-deficient input");

  // QR of the row-reversed transpose, reversed back:
  //   A = (J h)^T = Q Rt  =>  h = (J Rt^T J)(J Q^T).
  Matrix a(m, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) a(j, i) = h(n - 1 - i, j);

  QrFactors qr = householder_qr(a);

  RqFactors out;
  out.r = Matrix(n, n);
  out.u = Matrix(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      out.r(i, j) = qr.r(n - 1 - j, n - 1 - i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out.u(i, j) = qr.q(j, n - 1 - i);

  for (std::size_t i = 0; i < n; ++i) {
    if (out.r(i, i) < 0.0) {
      for (std::size_t k = 0; k <= i; ++k) out.r(k, i) = -out.r(k, i);
      for (std::size_t j = 0; j < m; ++j) out.u(i, j) = -out.u(i, j);
    }
  }
  return out;
}

EighResult eigh(const Matrix& a) {
  const std::size_t n = a.rows();
  require(n == a.cols(), ErrorCode::InvalidArgument, "eigh needs a square matrix");
  double scale = std::max(1.0, a.max_abs());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      require(std::fabs(a(i, j) - a(j, i)) <= 1e-10 * scale, ErrorCode::NotSymmetric,
              "eigh: input not symmetric");

  Matrix d = a;
  Matrix v = Matrix::identity(n);

  // Cyclic Jacobi sweeps; n is tiny so this converges in a handful of passes.
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += d(i, j) * d(i, j);
    if (off <= 1e-30 * scale * scale) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = d(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        double theta = (d(q, q) - d(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          double dkp = d(k, p), dkq = d(k, q);
          d(k, p) = c * dkp - s * dkq;
          d(k, q) = s * dkp + c * dkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double dpk = d(p, k), dqk = d(q, k);
          d(p, k) = c * dpk - s * dqk;
          d(q, k) = s * dpk + c * dqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return d(i, i) < d(j, j); });

  EighResult out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    out.values[idx] = d(order[idx], order[idx]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, idx) = v(k, order[idx]);
  }
  return out;
}

LogDetResult logdet_psd(const Matrix& a) {
  EighResult es = eigh(a);  // symmetry enforced there
  double top = std::max(1.0, std::fabs(es.values.back()));
  LogDetResult out;
  for (double lam : es.values) {
    if (lam < -1e-8 * top)
      throw Error(ErrorCode::NotPsd, "logdet_psd: negative eigenvalue");
    if (lam < 1e-12) {
      lam = 1e-12;
      out.degenerate = true;
    }
    out.log2_det += std::log(lam) * kLog2E;
  }
  return out;
}

Matrix inverse_sqrt_psd(const Matrix& a) {
  EighResult es = eigh(a);
  const std::size_t n = a.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double lam = std::max(es.values[k], 1e-12);
    double w = 1.0 / std::sqrt(lam);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += w * es.vectors(i, k) * es.vectors(j, k);
  }
  return out;
}

Matrix project_psd_trace(const Matrix& a, double trace_budget) {
  EighResult es = eigh(a);
  const std::size_t n = a.rows();
  Matrix out(n, n);
  double tr = 0.0;
  for (double lam : es.values) tr += std::max(lam, 0.0);
  double scale = (tr > trace_budget && tr > 0.0) ? trace_budget / tr : 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    double lam = std::max(es.values[k], 0.0) * scale;
    if (lam == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out(i, j) += lam * es.vectors(i, k) * es.vectors(j, k);
  }
  return out;
}

WaterfillResult waterfill(const std::vector<double>& gains, double budget,
                          double noise_var) {
  require(!gains.empty(), ErrorCode::EmptyGains, "waterfill: no gains");
  require(budget > 0.0 && noise_var > 0.0, ErrorCode::InvalidArgument,
          "waterfill: budget and noise must be positive");
  bool any = std::any_of(gains.begin(), gains.end(), [](double g) { return g > 0.0; });
  require(any, ErrorCode::EmptyGains, "waterfill: all gains nonpositive");

  double floor_lo = std::numeric_limits<double>::infinity();
  for (double g : gains)
    if (g > 0.0) floor_lo = std::min(floor_lo, noise_var / g);

  auto total = [&](double mu) {
    double s = 0.0;
    for (double g : gains)
      if (g > 0.0) s += std::max(0.0, mu - noise_var / g);
    return s;
  };

  double lo = floor_lo;
  double hi = floor_lo + budget;  // best channel alone absorbs the budget
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (total(mid) < budget)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-15 * std::max(1.0, hi)) break;
  }
  double mu = 0.5 * (lo + hi);

  WaterfillResult out;
  out.level = mu;
  out.powers.resize(gains.size(), 0.0);
  double used = 0.0;
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (gains[i] > 0.0) {
      out.powers[i] = std::max(0.0, mu - noise_var / gains[i]);
      used += out.powers[i];
    }
  }
  // Land exactly on the budget (bisection leaves ~1e-15 relative slack).
  if (used > 0.0) {
    double fix = budget / used;
    for (double& p : out.powers) p *= fix;
  }
  for (std::size_t i = 0; i < gains.size(); ++i)
    if (out.powers[i] > 0.0)
      out.value_bits += std::log(1.0 + gains[i] * out.powers[i] / noise_var) * kLog2E;
  return out;
}

double Rng::uniform01() {
  // 53-bit mantissa; shift by half an ulp so 0 is never returned.
  return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586477 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

double Rng::gamma(double shape) {
  // Marsaglia-Tsang squeeze; shape < 1 boosted via the u^(1/shape) trick.
  if (shape < 1.0) {
    double u = uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform01();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::chi_square(double dof) {
  if (!(dof > 0.0)) throw Error(ErrorCode::InvalidArgument, "chi_square: dof <= 0");
  return 2.0 * gamma(0.5 * dof);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  if (rows < 1 || cols < 1)
    throw Error(ErrorCode::InvalidArgument, "sample_gaussian_matrix: empty shape");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix sample_gaussian_matrix(std::size_t rows, std::size_t cols,
                              std::uint64_t seed) {
  Rng rng(seed);
  return sample_gaussian_matrix(rows, cols, rng);
}

}  // namespace mdrc
