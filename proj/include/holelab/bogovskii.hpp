#pragma once

#include "holelab/restriction.hpp"

#include <cstdint>

namespace holelab {

/// int f over the mesh (or the masked triangles).
double integrate(const TriMesh& mesh, const ScalarField& f, int degree = 6, const TriangleMask* mask = nullptr);

/// f - mean(f); closed-form fields stay closed-form.
ScalarField remove_mean(const TriMesh& mesh, const ScalarField& f, int degree = 6);

/// Throws PreconditionError unless |mean f| <= 1e-10 * rms(f).
void check_mean_zero(const TriMesh& mesh, const ScalarField& f, int degree = 6);

/// f on the fluid triangles of D, 0 on the hole triangles. f is a field on
/// the mesh of D_eps and must have zero mean there.
ScalarField zero_extend(const PerforatedMesh& pm, const ScalarField& f_fluid);

/// Zero-trace w with div w = f, by a prescribed-divergence Stokes solve.
StokesSolution bogovskii_reference(std::shared_ptr<const StokesOperator> op, const ScalarField& f);

struct BogovskiiResult {
  Eigen::VectorXd velocity;  ///< on D_eps
  StokesSolution reference;  ///< B_D(E f) on D
  double max_mismatch = 0.0; ///< worst local compatibility mismatch
};

/// R_eps(B_D(E f)) with B_D on the broken pressure space of D.
BogovskiiResult bogovskii_perforated(const PerforatedMesh& pm, const ScalarField& f_fluid);

/// ||(int q_i (div w - f))|| / ||(int q_i f)|| over continuous P1 on D_eps.
double divergence_residual(const PerforatedMesh& pm, const Eigen::VectorXd& w_fluid, const ScalarField& f_fluid);

/// Continuous P1 field on D_eps with coefficients uniform in [-1, 1] from a
/// 64-bit Mersenne twister, shifted to zero mean.
ScalarField random_mean_zero(const PerforatedMesh& pm, std::uint64_t seed);

/// sum_{j,k <= modes} a_jk cos(j pi x) cos(k pi y) with a_jk uniform in
/// [-1, 1], shifted to zero mean on D_eps. The same seed gives the same
/// function on every mesh.
ScalarField random_smooth_mean_zero(const PerforatedMesh& pm, std::uint64_t seed, int modes = 3);

struct BogovskiiNorm {
  double epsilon = 0.0;
  double w_norm = 0.0;     ///< ||w||_{W^{1,p}(D_eps)}
  double f_norm = 0.0;
  double exponent = 0.0;
  double constant = 0.0;   ///< w_norm / ((1 + eps^e) f_norm)
};

BogovskiiNorm bogovskii_norm(const PerforatedMesh& pm, const Eigen::VectorXd& w_fluid, const ScalarField& f_fluid,
                             double p);

}  // namespace holelab
