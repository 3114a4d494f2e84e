#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gdl/grid.hpp"
#include "gdl/linalg.hpp"

namespace gdl {

/// Eigenvalues of Y0(z) as a probability measure with weight 1/n per atom.
struct SpectralMeasure {
  std::vector<double> atoms;  ///< ascending, >= 0

  /// Sorts and clamps eigenvalues to >= 0. Throws NumericError if one is below
  /// -1e-10 * max(1, largest).
  static SpectralMeasure from_eigenvalues(std::vector<double> eigenvalues);

  std::size_t size() const { return atoms.size(); }
  double min_atom() const { return atoms.front(); }
  double max_atom() const { return atoms.back(); }
};

/// (1/n) sum_i (atom_i + x)^{-power}, power in {1, 2}, x > 0.
double stieltjes(const SpectralMeasure& mu, double x, int power);

enum class SaddleKind { X0, XEpsilon };

struct SaddleSolution {
  double x = 0.0;
  double residual = 0.0;
  SaddleKind kind = SaddleKind::X0;
  double eps = 0.0;  ///< XEpsilon only
  double lo = 0.0;
  double hi = 0.0;
};

/// Root of stieltjes(mu, x^2, 1) = 1, present iff tr_n Y0^{-1} > 1 (an atom at 0 counts
/// as +infinity). Throws BracketFailure.
std::optional<SaddleSolution> solve_x0(const SpectralMeasure& mu);

/// Root of 1 - stieltjes(mu, x^2, 1) = eps / x. Always exists and exceeds eps.
SaddleSolution solve_x_eps(const SpectralMeasure& mu, double eps);

struct DomainVerdict {
  bool in_D = false;
  double min_eig_Y0 = 0.0;
  double inv_trace = 0.0;  ///< tr_n Y0^{-1}; +inf when Y0 is numerically singular
};

/// Singularity cushion 1e-12 * (1 + largest atom).
double singular_tolerance(const SpectralMeasure& mu);

DomainVerdict domain_verdict(const SpectralMeasure& mu);

/// Resolvent traces at (z, x): t1 = tr_n (A - z) G^2, t2 = tr_n G G~ with
/// G = (Y0 + x)^{-1}, G~ = (Y0~ + x)^{-1}.
struct ResolventTraces {
  cplx t1;
  double t2 = 0.0;
};

enum class Reduction {
  None,  ///< always work with the full dense matrix
  Auto,  ///< split into unitarily equivalent small blocks when possible
};

/// A deformation matrix prepared for repeated evaluation over many z.
///
/// All quantities here are invariant under A -> U A U^*, so with Reduction::Auto a
/// matrix of the form H + cI (H Hermitian) is replaced by the diagonal of its
/// eigenvalues, and the result is split into the connected components of its nonzero
/// pattern. Identical components are evaluated once.
class DeformationModel {
 public:
  explicit DeformationModel(ComplexMatrix a, Reduction reduction = Reduction::Auto);

  std::size_t size() const { return n_; }
  const ComplexMatrix& matrix() const { return a_; }
  /// Number of distinct blocks evaluated per point (1 for the unreduced route).
  std::size_t distinct_blocks() const { return scalars_.size() + blocks_.size(); }
  std::size_t largest_block() const;

  SpectralMeasure nu(cplx z) const;
  DomainVerdict verdict(cplx z) const { return domain_verdict(nu(z)); }
  ResolventTraces traces(cplx z, double x) const;

 private:
  struct Block {
    ComplexMatrix matrix;
    std::size_t multiplicity = 0;
  };
  struct Scalar {
    cplx value;
    std::size_t multiplicity = 0;
  };

  std::size_t n_ = 0;
  ComplexMatrix a_;
  std::vector<Scalar> scalars_;
  std::vector<Block> blocks_;
};

/// Eigenvalues of Y0(z) computed from the full matrix.
SpectralMeasure nu_measure(const ComplexMatrix& a, cplx z);
/// tr_n (A - z)(Y0 + x)^{-2} from the full matrix.
cplx trace_T1(const ComplexMatrix& a, cplx z, double x);
/// tr_n (Y0 + x)^{-1}(Y0~ + x)^{-1} from the full matrix.
double trace_T2(const ComplexMatrix& a, cplx z, double x);
DomainVerdict domain_verdict(const ComplexMatrix& a, cplx z);

struct BoundaryLoop {
  std::vector<cplx> points;
  bool closed = false;
};

/// Level set tr_n Y0^{-1} = 1, oriented with D on the left of the direction of travel.
struct BoundaryPolyline {
  std::vector<BoundaryLoop> loops;
  Window window;
  std::size_t resolution = 0;
  double boundary_tol = 1e-8;
};

/// Marching squares on a resolution x resolution lattice; every vertex is refined along
/// its cell edge until |tr_n Y0^{-1} - 1| <= boundary_tol. Throws ConfigError for a bad
/// window or resolution < 16, EmptyBoundary if no cell edge changes sign.
BoundaryPolyline trace_boundary(const DeformationModel& model, const Window& window,
                                std::size_t resolution, double boundary_tol = 1e-8);
BoundaryPolyline trace_boundary(const ComplexMatrix& a, const Window& window,
                                std::size_t resolution);

/// CSV "loop_id,re,im".
std::string boundary_csv(const BoundaryPolyline& boundary);
/// JSON object {window, resolution, boundary_tol, loops: [{id, closed, points}]}.
std::string boundary_metadata_json(const BoundaryPolyline& boundary);

}  // namespace gdl
