#include "mixsat/qalgebra.hpp"

#include <algorithm>
#include <cmath>

namespace mixsat {

double norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

template <std::size_t Dim>
std::array<cplx, Dim> canonicalize(std::array<cplx, Dim> v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw RayError("cannot normalize a zero or non-finite vector");
  for (auto& a : v) a /= n;
  for (std::size_t k = 0; k < Dim; ++k) {
    const double mag = std::abs(v[k]);
    if (mag == 0.0) continue;
    const cplx phase = std::conj(v[k]) / mag;
    for (auto& a : v) a *= phase;
    v[k] = cplx(mag, 0.0);
    break;
  }
  return v;
}

template <std::size_t Dim>
Ray<Dim> Ray<Dim>::from_vector(const Amplitudes& v) {
  Ray r;
  r.amps_ = canonicalize(v);
  return r;
}

template <std::size_t Dim>
Ray<Dim> Ray<Dim>::from_canonical(const Amplitudes& v) {
  for (const auto& a : v) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw RayError("non-finite ray amplitude");
  }
  const double n = norm(v);
  if (std::abs(n - 1.0) > kRayNormTolerance) throw RayError("non-normalized ray");
  for (const auto& a : v) {
    if (a == cplx(0.0, 0.0)) continue;
    if (a.imag() != 0.0 || a.real() <= 0.0) throw RayError("non-canonical ray phase");
    break;
  }
  Ray r;
  r.amps_ = v;
  return r;
}

template <std::size_t Dim>
Ray<Dim> Ray<Dim>::basis(std::size_t index) {
  if (index >= Dim) throw RayError("basis index out of range");
  Ray r;
  r.amps_ = {};
  r.amps_[index] = 1.0;
  return r;
}

template <std::size_t Dim>
bool Ray<Dim>::is_basis_state() const {
  int nonzero = 0;
  for (const auto& a : amps_) nonzero += (a != cplx(0.0, 0.0));
  return nonzero == 1;
}

template <std::size_t Dim>
double Ray<Dim>::overlap(const Ray& other) const {
  cplx s = 0.0;
  for (std::size_t k = 0; k < Dim; ++k) s += std::conj(amps_[k]) * other.amps_[k];
  return std::abs(s);
}

template <std::size_t Dim>
Ray<Dim> haar_ray(RandomStream& rng) {
  std::array<cplx, Dim> v;
  for (;;) {
    for (auto& a : v) {
      const double re = rng.normal();
      const double im = rng.normal();
      a = cplx(re, im);
    }
    if (norm(v) > 0.0) return Ray<Dim>::from_vector(v);
  }
}

template class Ray<2>;
template class Ray<4>;
template std::array<cplx, 2> canonicalize<2>(std::array<cplx, 2>);
template std::array<cplx, 4> canonicalize<4>(std::array<cplx, 4>);
template Ray<2> haar_ray<2>(RandomStream&);
template Ray<4> haar_ray<4>(RandomStream&);

Mat2 Mat2::identity() { return diag(1.0, 1.0); }

Mat2 Mat2::epsilon() {
  Mat2 e;
  e.m[0][1] = 1.0;
  e.m[1][0] = -1.0;
  return e;
}

Mat2 Mat2::diag(cplx a, cplx b) {
  Mat2 d;
  d.m[0][0] = a;
  d.m[1][1] = b;
  return d;
}

Mat2 Mat2::transpose() const {
  Mat2 t;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) t.m[r][c] = m[c][r];
  return t;
}

Mat2 Mat2::conj() const {
  Mat2 t;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) t.m[r][c] = std::conj(m[r][c]);
  return t;
}

Mat2 Mat2::adjoint() const { return transpose().conj(); }

cplx Mat2::det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

cplx Mat2::trace() const { return m[0][0] + m[1][1]; }

double Mat2::frobenius() const {
  double s = 0.0;
  for (const auto& row : m)
    for (const auto& a : row) s += std::norm(a);
  return std::sqrt(s);
}

bool Mat2::is_finite() const {
  for (const auto& row : m)
    for (const auto& a : row)
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) return false;
  return true;
}

bool Mat2::is_scalar(double tol) const {
  const double scale = frobenius();
  if (scale == 0.0) return true;
  return std::abs(m[0][1]) <= tol * scale && std::abs(m[1][0]) <= tol * scale &&
         std::abs(m[0][0] - m[1][1]) <= tol * scale;
}

Vec2 Mat2::apply(const Vec2& v) const {
  return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
  Mat2 p;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) p.m[r][c] = a.m[r][0] * b.m[0][c] + a.m[r][1] * b.m[1][c];
  return p;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
  Mat2 s;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) s.m[r][c] = a.m[r][c] + b.m[r][c];
  return s;
}

Mat2 operator*(cplx s, const Mat2& a) {
  Mat2 p;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) p.m[r][c] = s * a.m[r][c];
  return p;
}

Mat2 clause_form(const Ray4& phi) {
  Mat2 c;
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj) c.m[bi][bj] = std::conj(phi[2 * bi + bj]);
  return c;
}

Mat2 transfer_matrix(const Ray4& phi) {
  // Phi[b_j][b_i] = phi(b_i b_j), so Phi^dagger[b_i][b_j] = conj(phi(b_i b_j)),
  // which is exactly the clause form C.
  return Mat2::epsilon() * clause_form(phi);
}

Mat2 transfer_matrix_to_j(const Ray4& phi) { return Mat2::epsilon() * clause_form(phi).transpose(); }

cplx clause_overlap(const Ray4& phi, const Vec2& psi_i, const Vec2& psi_j) {
  cplx s = 0.0;
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj) s += std::conj(phi[2 * bi + bj]) * psi_i[bi] * psi_j[bj];
  return s;
}

NullspaceResult nullspace(const Eigen::MatrixXcd& a, double rel_tol, double abs_floor) {
  if (!(rel_tol > 0.0)) throw std::invalid_argument("nullspace tolerance must be positive");
  if (!a.allFinite()) throw std::invalid_argument("nullspace input has non-finite entries");
  const auto cols = static_cast<std::size_t>(a.cols());
  NullspaceResult out;
  if (cols == 0) {
    out.basis.resize(0, 0);
    return out;
  }
  if (a.rows() == 0) {
    out.basis = Eigen::MatrixXcd::Identity(a.cols(), a.cols());
    out.dimension = cols;
    return out;
  }
  // Eigen's BDCSVD mishandles some exactly structured inputs (NaNs or a
  // non-orthonormal V), so the two-sided Jacobi method is used throughout.
  auto decompose = [](const Eigen::MatrixXcd& m, Eigen::MatrixXcd& v, Eigen::VectorXd& sv) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    v = svd.matrixV();
    sv = svd.singularValues();
  };
  Eigen::MatrixXcd v;
  Eigen::VectorXd sv;
  if (a.rows() > 2 * a.cols()) {
    // Tall input: reduce to the triangular factor first; R has the same
    // singular values and right singular vectors as A.
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    const Eigen::MatrixXcd r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    decompose(r, v, sv);
  } else {
    decompose(a, v, sv);
  }
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  std::size_t rank = 0;
  const double cut = std::max(rel_tol * smax, abs_floor);
  if (smax > 0.0) {
    for (Eigen::Index k = 0; k < sv.size(); ++k)
      if (sv(k) > cut) ++rank;
  }
  out.rank = rank;
  out.dimension = cols - rank;
  out.basis = v.rightCols(static_cast<Eigen::Index>(out.dimension));
  out.singular_values = sv;
  return out;
}

std::vector<Ray2> eigenvectors(const Mat2& a, double rel_tol) {
  if (a.is_scalar(rel_tol)) return {Ray2::basis(0)};
  const cplx tr = a.trace();
  const cplx disc = std::sqrt(tr * tr - 4.0 * a.det());
  const std::array<cplx, 2> lambdas{(tr + disc) / 2.0, (tr - disc) / 2.0};
  std::vector<Ray2> out;
  for (const cplx lambda : lambdas) {
    // A null vector of (A - lambda I): pick the better-conditioned row.
    const cplx a00 = a(0, 0) - lambda, a01 = a(0, 1), a10 = a(1, 0), a11 = a(1, 1) - lambda;
    Vec2 v;
    if (std::abs(a00) + std::abs(a01) >= std::abs(a10) + std::abs(a11)) {
      v = {a01, -a00};
    } else {
      v = {a11, -a10};
    }
    if (norm(v) == 0.0) continue;
    const Ray2 r = Ray2::from_vector(v);
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Ray2& o) {
      return 1.0 - o.overlap(r) < rel_tol;
    });
    if (!duplicate) out.push_back(r);
  }
  if (out.empty()) out.push_back(Ray2::basis(0));
  return out;
}

namespace {

double eigen_residual(const Mat2& m, const Ray2& r) {
  const Vec2 v = r.amplitudes();
  const Vec2 mv = m.apply(v);
  const cplx rayleigh = std::conj(v[0]) * mv[0] + std::conj(v[1]) * mv[1];
  const Vec2 res{mv[0] - rayleigh * v[0], mv[1] - rayleigh * v[1]};
  return norm(res);
}

}  // namespace

std::optional<Ray2> common_eigenvector(std::span<const Mat2> mats, double rel_tol) {
  if (mats.empty()) throw std::invalid_argument("common_eigenvector needs at least one matrix");
  const auto pivot = std::find_if(mats.begin(), mats.end(),
                                  [&](const Mat2& m) { return !m.is_scalar(rel_tol); });
  if (pivot == mats.end()) return Ray2::basis(0);
  for (const Ray2& candidate : eigenvectors(*pivot, rel_tol)) {
    const bool shared = std::all_of(mats.begin(), mats.end(), [&](const Mat2& m) {
      return eigen_residual(m, candidate) <= rel_tol * std::max(m.frobenius(), 1e-300);
    });
    if (shared) return candidate;
  }
  return std::nullopt;
}

}  // namespace mixsat
