#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "mixsat/rng.hpp"

namespace mixsat {

using cplx = std::complex<double>;
using Vec2 = std::array<cplx, 2>;
using Vec4 = std::array<cplx, 4>;

inline constexpr double kRayNormTolerance = 1e-12;

class RayError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A normalized complex vector modulo global phase. Stored with unit norm
/// and canonical phase: the first nonzero amplitude is real and positive.
template <std::size_t Dim>
class Ray {
  static_assert(Dim == 2 || Dim == 4, "rays are qubit (2) or qubit-pair (4) states");

 public:
  using Amplitudes = std::array<cplx, Dim>;

  /// |0...0>.
  Ray() { amps_[0] = 1.0; }

  /// Normalizes and canonicalizes an arbitrary nonzero vector.
  static Ray from_vector(const Amplitudes& v);

  /// Accepts amplitudes that are already normalized and phase-canonical
  /// (within kRayNormTolerance) without touching a single bit. Used when
  /// loading serialized instances so that round trips are exact.
  static Ray from_canonical(const Amplitudes& v);

  static Ray basis(std::size_t index);

  const Amplitudes& amplitudes() const { return amps_; }
  const cplx& operator[](std::size_t k) const { return amps_[k]; }
  static constexpr std::size_t dimension() { return Dim; }

  bool is_basis_state() const;
  /// |<this|other>|, phase-insensitive.
  double overlap(const Ray& other) const;

  friend bool operator==(const Ray&, const Ray&) = default;

 private:
  Amplitudes amps_{};
};

using Ray2 = Ray<2>;
using Ray4 = Ray<4>;

double norm(std::span<const cplx> v);

/// Rescales to unit norm and rotates the global phase so the first nonzero
/// amplitude is real positive. Throws RayError on the zero vector.
template <std::size_t Dim>
std::array<cplx, Dim> canonicalize(std::array<cplx, Dim> v);

/// Haar-uniform ray: i.i.d. standard complex Gaussian components, normalized
/// and phase-canonicalized.
template <std::size_t Dim>
Ray<Dim> haar_ray(RandomStream& rng);

/// 2x2 complex matrix, row-major.
struct Mat2 {
  std::array<std::array<cplx, 2>, 2> m{};

  static Mat2 identity();
  static Mat2 zero() { return {}; }
  /// The antisymmetric symbol [[0, 1], [-1, 0]].
  static Mat2 epsilon();
  static Mat2 diag(cplx a, cplx b);

  cplx& operator()(int r, int c) { return m[r][c]; }
  const cplx& operator()(int r, int c) const { return m[r][c]; }

  Mat2 transpose() const;
  Mat2 adjoint() const;
  Mat2 conj() const;
  cplx det() const;
  cplx trace() const;
  double frobenius() const;
  bool is_finite() const;
  /// True when the matrix is a multiple of the identity within tol*|M|.
  bool is_scalar(double tol) const;

  Vec2 apply(const Vec2& v) const;
  friend Mat2 operator*(const Mat2& a, const Mat2& b);
  friend Mat2 operator+(const Mat2& a, const Mat2& b);
  friend Mat2 operator*(cplx s, const Mat2& a);
};

/// Clause matrix C with C[b_i][b_j] = conj(phi(b_i b_j)), so that
/// <phi| x (tensor) y> = x^T C y. Amplitude order of phi is |b_i b_j> with
/// b_i the major index.
Mat2 clause_form(const Ray4& phi);

/// Transfer matrix T = eps * Phi^dagger with Phi[b_j][b_i] = phi(b_i b_j).
/// Maps a state on the j-site to an i-site state that annihilates the clause:
/// <phi| (T psi)_i (tensor) psi_j> = 0 for every psi.
Mat2 transfer_matrix(const Ray4& phi);

/// Counterpart of transfer_matrix for the other orientation: maps an i-site
/// state to a j-site state annihilating the clause.
Mat2 transfer_matrix_to_j(const Ray4& phi);

/// <phi| psi_i (tensor) psi_j>.
cplx clause_overlap(const Ray4& phi, const Vec2& psi_i, const Vec2& psi_j);

struct NullspaceResult {
  /// Orthonormal kernel basis, one vector per column, ordered from largest
  /// to smallest singular value among the discarded directions.
  Eigen::MatrixXcd basis;
  std::size_t dimension = 0;
  std::size_t rank = 0;
  Eigen::VectorXd singular_values;
};

inline constexpr double kDefaultRankTolerance = 1e-9;

/// Kernel of a complex matrix. Singular values below rel_tol times the
/// largest singular value count as zero, and so do those below abs_floor
/// (for inputs whose entries have a known O(1) scale, where an all-noise
/// matrix must come out as rank 0). Throws std::invalid_argument on
/// non-finite input or non-positive tolerance.
NullspaceResult nullspace(const Eigen::MatrixXcd& a, double rel_tol = kDefaultRankTolerance, double abs_floor = 0.0);

/// Eigenvectors of a 2x2 matrix as rays; one entry when the matrix is
/// defective or scalar (scalar matrices report |0>).
std::vector<Ray2> eigenvectors(const Mat2& a, double rel_tol = kDefaultRankTolerance);

/// A ray v with M v parallel to v for every matrix, or nullopt.
std::optional<Ray2> common_eigenvector(std::span<const Mat2> mats,
                                       double rel_tol = kDefaultRankTolerance);

}  // namespace mixsat
