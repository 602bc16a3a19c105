#pragma once

#include "nrpca/core.hpp"
#include "nrpca/graphs.hpp"

#include <optional>
#include <string>

namespace nrpca {

/// Constant in the rectangle identifiability inequalities.
inline constexpr double kRectangleConstant = 49.0;
/// Constant in the raw identifiability inequality.
inline constexpr double kIdentifiabilityConstant = 48.0;
/// Entries of w below this fraction of max(w) count as zero for kappa.
inline constexpr double kKappaDegenerateRatio = 1e-9;

/// Rectangular object size, obscurement and (optional) constant speeds.
/// A zero-area rectangle (p_m == 0 or p_n == 0) is only meaningful for scene
/// generation.
struct RectangleSpec {
  std::size_t p_m = 1;
  std::size_t p_n = 1;
  std::size_t p_f = 1;
  double speed_x = 0.0;  // columns per frame
  double speed_y = 0.0;  // rows per frame

  std::size_t area() const { return p_m * p_n; }
};

struct ObjectSizeVerdict {
  std::size_t foreground = 0;
  std::size_t bound = 0;
  bool pass = false;
  bool tight = false;
};

struct FrameConnectivityVerdict {
  bool pass = false;
  std::optional<std::size_t> witness_frame;  // 0-based
};

struct PixelConnectivityVerdict {
  bool pass = false;
  std::optional<std::size_t> witness_pixel;  // 0-based pixel number
};

struct NecessaryConditions {
  ObjectSizeVerdict object_size;
  FrameConnectivityVerdict frame_connectivity;
  PixelConnectivityVerdict pixel_connectivity;
  bool all_pass() const {
    return object_size.pass && frame_connectivity.pass && pixel_connectivity.pass;
  }
};

/// Object-size bound, no fully covered frame, no always-covered pixel.
NecessaryConditions check_necessary(const PerFrameSets& sets);

/// (d_m d_n d_f - (d_m d_n + d_f - 1)) / (d_m d_n + d_f - 1).
double max_relative_object_size(const FrameGeometry& geometry);

struct CommonPixelVerdict {
  bool pass = false;
  bool every_pixel_uncovered = false;
  std::optional<std::size_t> witness_pixel;  // 0-based, background in every frame
};

/// Sufficient test for a connected background graph: some pixel is background
/// in all frames and every pixel is background in at least one frame.
CommonPixelVerdict check_common_background_pixel(const PerFrameSets& sets);

/// max(w) / min(w) over the stacked (u, v). Throws std::domain_error when an
/// entry is at most kKappaDegenerateRatio * max(w).
double condition_number(const Decomposition& w);

/// Upper bound x_white / x_black on kappa for an exact constant-v background.
double condition_number_bound(double x_black, double x_white);

struct CParameter {
  double c = 0.0;
  double block_minimum = 0.0;  // min entry of the lifted matrix
  double w_min = 0.0;
};

/// Largest margin c in (0, 1] with S_bar + w w^T > c w_min^2 entrywise, shrunk
/// by the factor (1 - eps_c). Block minima come from min(u), min(v), min(X);
/// the (m+n)^2 lifted matrix is never formed. Throws std::domain_error when the
/// block minimum is not positive.
CParameter compute_c(const DataMatrix& X, const Decomposition& w, double eps_c = 1e-6);

struct IdentifiabilityVerdict {
  double lhs = 0.0;  // delta(G(B))
  double rhs = 0.0;  // 48 / c^2 * kappa^4 * Delta(G(F))
  bool pass = false;
};

IdentifiabilityVerdict check_identifiability(double min_background_degree, double max_foreground_degree,
                                             double kappa, double c);

struct RectangleVerdict {
  double frames_bound = 0.0;  // d_f / 49
  double area_bound = 0.0;    // d_m d_n / 49
  bool frames_ok = false;
  bool area_ok = false;
  bool pass = false;
};

/// p_f < d_f / 49 and p_m p_n < d_m d_n / 49. Requires d_f == d_m d_n.
RectangleVerdict rectangle_identifiability(const RectangleSpec& rect, const FrameGeometry& geometry);

struct TrajectoryObscurement {
  std::size_t p_f = 0;
  /// d_f > p_f: the object travels far enough to uncover every pixel.
  bool travel_premise = false;
  std::string warning;
};

/// min(ceil(p_n / speed_x), ceil(p_m / speed_y)); a zero speed contributes
/// +infinity. With both speeds zero the result is d_f and a warning is set.
TrajectoryObscurement pf_constant_trajectory(const RectangleSpec& rect, std::size_t frames);

/// Every verdict and computed quantity of a certificate run. Set-based fields
/// are empty when no foreground sets were available (a priori mode without a
/// footprint); solution-based fields are empty without a decomposition.
struct CertificateReport {
  FrameGeometry geometry{1, 1, 1};
  double p_max = 0.0;

  std::optional<NecessaryConditions> necessary;
  std::optional<CommonPixelVerdict> common_pixel;
  std::optional<bool> background_connected;
  std::optional<DegreeStats> foreground_degrees;
  std::optional<DegreeStats> background_degrees;

  std::optional<double> kappa;
  std::optional<double> kappa_bound;
  std::optional<CParameter> c_param;
  std::optional<IdentifiabilityVerdict> identifiability_raw;

  std::optional<RectangleSpec> rectangle;
  std::optional<TrajectoryObscurement> trajectory;
  std::optional<RectangleVerdict> identifiability_rectangle;

  std::string error;  // why kappa, c or the rectangle test could not be evaluated

  /// Every evaluated check passed and at least one check was evaluated.
  bool pass() const;
};

struct CertifyOptions {
  double eps_s = 0.5;
  double eps_c = 1e-6;
};

/// Full a posteriori certificate for data X and decomposition w.
CertificateReport certify(const DataMatrix& X, const Decomposition& w, const CertifyOptions& options = {});

/// A priori certificate from a rectangle description. When the rectangle has
/// speeds, p_f is taken from the constant-trajectory formula. An optional
/// footprint (the object's per-frame coverage) enables the connectivity checks.
CertificateReport certify_a_priori(const RectangleSpec& rect, const FrameGeometry& geometry,
                                   const PerFrameSets* footprint = nullptr);

/// Attaches the rectangle identifiability verdict to an existing report.
void add_rectangle_check(CertificateReport& report, const RectangleSpec& rect);

}  // namespace nrpca
