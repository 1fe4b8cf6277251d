#pragma once

#include "holelab/geometry.hpp"
#include "holelab/lp_norms.hpp"
#include "holelab/stokes.hpp"

#include <string>
#include <vector>

namespace holelab {

/// G = psi * [[0, 1], [-1, 0]] with psi = x2 (1 - |x|^2/R^2)^3_+, R = 3/2.
/// div G = (d2 psi, -d1 psi) is a solenoidal dipole force supported in
/// B_R that pushes fluid through the origin.
TensorField default_source();
/// G = [[0, x2 - x2^3/12], [0, 0]], div G = (1 - x2^2/4, 0): channel-type
/// forcing of the whole square.
TensorField channel_source();
/// G = x1 * I. Its divergence e1 is a gradient, so the velocity vanishes.
TensorField pressure_only_source();
/// (G(x) + G(-x)) / 2, whose solution on a centrally symmetric domain is odd.
TensorField even_part(const TensorField& G);

struct SweepOptions {
  int n_hole = 32;
  double h_far = 0.25;
  int quad_degree = 6;
  bool refinement_check = true;  ///< repeat the smallest eps with 2 n_hole, h_far/2
};

struct SweepRecord {
  double epsilon = 0.0;
  double p = 2.0;
  NormReport norms;
  double ratio = 0.0;
  int dofs = 0;
  double seconds = 0.0;
};

enum class Trend { bounded, growing, inconclusive };
std::string to_string(Trend t);

/// Fit of log(value) against log(1/eps) over the last four points.
struct GrowthFit {
  double slope = 0.0;
  double residual = 0.0;  ///< RMS of the fit residuals
  bool increasing = false;  ///< strictly, over the last four points
  double band = 0.0;        ///< max/min over the last four points
  Trend verdict = Trend::inconclusive;
  int window = 4;
  double growth_threshold = 0.05;
  double band_threshold = 1.2;
};

GrowthFit fit_growth(const std::vector<double>& eps, const std::vector<double>& values, double band_threshold = 1.2);

struct SweepResult {
  std::vector<SweepRecord> records;
  std::vector<std::string> failures;  ///< "eps=...: message" for points that failed
  GrowthFit fit;
  /// Value at the smallest eps on the refined mesh, and its relative change.
  double refined_value = 0.0;
  double refinement_change = 0.0;
};

/// Checks a sweep's eps list: nonempty, in (0, 1], strictly decreasing.
void validate_eps_list(const std::vector<double>& eps);

/// The hole-domain mesh of `family` at eps.
TriMesh sweep_mesh(const DomainSpec& family, double eps, const SweepOptions& options);

SweepResult run_uniform_sweep(const DomainSpec& family, const TensorField& G, double p, const std::vector<double>& eps,
                              const SweepOptions& options = {});

struct CenterCheck {
  Vec2 value = Vec2::Zero();  ///< v_Omega(0) on the refined mesh
  double magnitude = 0.0;
  double error_bar = 0.0;     ///< change under one refinement
};

/// Solves on Omega without hole at two resolutions and returns |v_Omega(0)|.
/// Throws DegenerateSource when it does not exceed 10 error bars.
CenterCheck verify_nondegenerate_center(const DomainSpec& omega, const TensorField& G, double h_far = 0.25,
                                        int n_core = 32);

SweepResult run_blowup_sweep(const DomainSpec& family, const TensorField& G, double p, const std::vector<double>& eps,
                             const SweepOptions& options = {});

struct DualSource {
  TensorField H;              ///< table on the rule of `degree`
  int degree = 6;
  double gradient_norm = 0.0;  ///< ||grad v||_{p'}
  double norm = 0.0;           ///< ||H||_p
  double pairing = 0.0;        ///< <H, grad v>
};

/// H = |grad v|^(p'-2) grad v / ||grad v||_{p'}^(p'/p), tabulated on the
/// rule of `degree`. Throws DomainError when grad v = 0.
DualSource construct_dual_source(const StokesSolution& v, double p, int degree = 6);

struct DualPoint {
  double epsilon = 0.0;
  double h_norm = 0.0;            ///< ||H||_p
  double duality_error = 0.0;     ///< |<H, grad v> - ||grad v||_{p'}| / ||grad v||_{p'}
  double grad_w = 0.0;            ///< ||grad w||_p
  double lower_bound = 0.0;       ///< ||grad v||_{p'} / ||G||_{p'}
};

struct DualSweepResult {
  SweepResult sweep;  ///< records hold the norms of w against H; fit on ||grad w||_p
  std::vector<DualPoint> points;
};

DualSweepResult run_dual_blowup_sweep(const DomainSpec& family, const TensorField& G, double p,
                                      const std::vector<double>& eps, const SweepOptions& options = {});

struct RescalingResult {
  double ratio_original = 0.0;
  double ratio_rescaled = 0.0;
  double discrepancy = 0.0;        ///< |R_orig - R_resc| / R_orig
  double gradient_law_error = 0.0;  ///< relative error of ||grad v1|| = eps^(1-d/p) ||grad v||
  NormReport original;
  int dofs = 0;
};

RescalingResult rescaling_consistency(const DomainSpec& spec, const TensorField& G, double p, double eps,
                                      const SweepOptions& options = {});

/// Compactly supported swirl force a (1 - |x|^2/r^2)^3_+ (-x2, x1) with zero
/// net force.
struct BumpForce {
  double radius = 0.75;
  double amplitude = 1.0;
  VectorField field() const;
};

/// Solves -Lap w + grad xi = g on Omega/eps (no hole) and records
/// (||grad w||_p + ||xi||_p) / ||g||_p. Throws ConfigError when the
/// support radius exceeds 1.
SweepResult run_enlarging_domain_sweep(const DomainSpec& omega, const BumpForce& g, double p,
                                       const std::vector<double>& eps, const SweepOptions& options = {});

}  // namespace holelab
