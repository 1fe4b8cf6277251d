#pragma once

#include "holelab/fields.hpp"
#include "holelab/stokes.hpp"

#include <vector>

namespace holelab {

/// p/(p-1). Throws DomainError unless p > 1.
double conjugate(double p);
/// dp/(d-p). Throws DomainError unless 1 < p < d.
double sobolev_star(double p, int d);

/// A quadrature norm with the difference against a rule two degrees
/// higher. Table fields only exist on one rule; their estimate is 0 and
/// `estimated` is false.
struct NormValue {
  double value = 0.0;
  double error_estimate = 0.0;
  bool estimated = true;
};

/// Restricts a norm to the triangles t with mask[t] != 0.
using TriangleMask = std::vector<char>;

NormValue lp_norm(const TriMesh& mesh, const ScalarField& f, double p, int degree = 6, const TriangleMask* mask = nullptr);
NormValue lp_norm(const TriMesh& mesh, const VectorField& f, double p, int degree = 6, const TriangleMask* mask = nullptr);
/// Frobenius norm pointwise.
NormValue lp_norm(const TriMesh& mesh, const TensorField& f, double p, int degree = 6, const TriangleMask* mask = nullptr);

/// Norms of finite-element coefficient vectors.
NormValue lp_norm_gradient(const TriMesh& mesh, const Eigen::VectorXd& velocity, double p, int degree = 6,
                           const TriangleMask* mask = nullptr);
NormValue lp_norm_velocity(const TriMesh& mesh, const Eigen::VectorXd& velocity, double p, int degree = 6,
                           const TriangleMask* mask = nullptr);
NormValue lp_norm_pressure(const PressureSpace& space, const TriMesh& mesh, const Eigen::VectorXd& pressure, double p,
                           int degree = 6, const TriangleMask* mask = nullptr);

struct NormReport {
  double p = 2.0;
  double grad_velocity_lp = 0.0;
  double pressure_lp = 0.0;
  double velocity_lp = 0.0;
  double source_lp = 0.0;
  double quadrature_error = 0.0;  ///< largest estimate relative to its norm
  bool flagged = false;           ///< quadrature_error above 1%
};

/// Norms of (v, pi) and G at exponent p. The pressure is measured after
/// removing its mean.
NormReport norm_report(const StokesSolution& s, const TensorField& G, double p, int degree = 6);

/// (||grad v||_p + ||pi||_p) / ||G||_p. Throws DomainError when ||G||_p = 0.
double estimate_ratio(const StokesSolution& s, const TensorField& G, double p, int degree = 6);
double estimate_ratio(const NormReport& r);

}  // namespace holelab
