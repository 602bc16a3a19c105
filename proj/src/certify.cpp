#include "nrpca/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nrpca {

NecessaryConditions check_necessary(const PerFrameSets& sets) {
  const std::size_t m = sets.pixels();
  const std::size_t n = sets.frames();
  NecessaryConditions out;

  out.object_size.foreground = sets.foreground_count();
  out.object_size.bound = m * n - (m + n - 1);
  out.object_size.pass = out.object_size.foreground <= out.object_size.bound;
  out.object_size.tight = out.object_size.foreground == out.object_size.bound;

  out.frame_connectivity.pass = true;
  for (std::size_t k = 0; k < n; ++k) {
    if (sets.foreground_in_frame(k) == m) {
      out.frame_connectivity.pass = false;
      out.frame_connectivity.witness_frame = k;
      break;
    }
  }

  out.pixel_connectivity.pass = true;
  for (std::size_t h = 0; h < m; ++h) {
    if (sets.foreground_at_pixel(h) == n) {
      out.pixel_connectivity.pass = false;
      out.pixel_connectivity.witness_pixel = h;
      break;
    }
  }
  return out;
}

double max_relative_object_size(const FrameGeometry& geometry) {
  const double pixels = static_cast<double>(geometry.pixels());
  const double frames = static_cast<double>(geometry.frames());
  const double min_edges = pixels + frames - 1.0;
  return (pixels * frames - min_edges) / min_edges;
}

CommonPixelVerdict check_common_background_pixel(const PerFrameSets& sets) {
  CommonPixelVerdict out;
  out.every_pixel_uncovered = true;
  for (std::size_t h = 0; h < sets.pixels(); ++h) {
    const std::size_t covered = sets.foreground_at_pixel(h);
    if (covered == sets.frames()) out.every_pixel_uncovered = false;
    if (covered == 0 && !out.witness_pixel) out.witness_pixel = h;
  }
  out.pass = out.every_pixel_uncovered && out.witness_pixel.has_value();
  return out;
}

double condition_number(const Decomposition& w) {
  if (w.size() == 0) {
    throw InputError("condition number of an empty vector");
  }
  const Vector stacked = w.stacked();
  const double hi = stacked.maxCoeff();
  const double lo = stacked.minCoeff();
  if (!(hi > 0.0) || !(lo > kKappaDegenerateRatio * hi)) {
    throw std::domain_error("condition number undefined: w has an entry that is zero or numerically "
                            "negligible (min " + std::to_string(lo) + ", max " + std::to_string(hi) +
                            ")");
  }
  return hi / lo;
}

double condition_number_bound(double x_black, double x_white) {
  if (!(x_black > 0.0)) {
    throw std::domain_error("x_black must be strictly positive");
  }
  if (!(x_white >= x_black)) {
    throw InputError("x_white must be at least x_black");
  }
  return x_white / x_black;
}

CParameter compute_c(const DataMatrix& X, const Decomposition& w, double eps_c) {
  if (static_cast<std::size_t>(w.u.size()) != X.rows() ||
      static_cast<std::size_t>(w.v.size()) != X.cols()) {
    throw InputError("decomposition dimensions do not match the data matrix");
  }
  if (!(eps_c >= 0.0 && eps_c < 1.0)) {
    throw InputError("c margin must lie in [0, 1)");
  }
  const double u_min = w.u.minCoeff();
  const double v_min = w.v.minCoeff();
  const double w_min = std::min(u_min, v_min);
  if (!(w_min > 0.0)) {
    throw std::domain_error("c undefined: w is not strictly positive");
  }
  // Four blocks of S_bar + w w^T: u u^T, v v^T, and X (twice, transposed).
  const double block_min = std::min({u_min * u_min, v_min * v_min, X.values().minCoeff()});
  if (!(block_min > 0.0)) {
    throw std::domain_error("c undefined: the lifted matrix has a nonpositive entry");
  }
  CParameter out;
  out.block_minimum = block_min;
  out.w_min = w_min;
  out.c = std::min(1.0, (1.0 - eps_c) * block_min / (w_min * w_min));
  return out;
}

IdentifiabilityVerdict check_identifiability(double min_background_degree, double max_foreground_degree,
                                             double kappa, double c) {
  if (!(c > 0.0 && c <= 1.0)) throw InputError("c must lie in (0, 1]");
  if (!(kappa >= 1.0)) throw InputError("kappa must be at least 1");
  if (!(max_foreground_degree >= 0.0) || !(min_background_degree >= 0.0)) {
    throw InputError("degrees must be nonnegative");
  }
  IdentifiabilityVerdict out;
  out.lhs = min_background_degree;
  out.rhs = kIdentifiabilityConstant / (c * c) * std::pow(kappa, 4) * max_foreground_degree;
  out.pass = out.lhs > out.rhs;
  return out;
}

RectangleVerdict rectangle_identifiability(const RectangleSpec& rect, const FrameGeometry& geometry) {
  if (!geometry.balanced()) {
    throw InputError("rectangle identifiability needs d_f == d_m*d_n; preprocess the video first "
                     "(rescale or repeat)");
  }
  if (rect.p_m < 1 || rect.p_m > geometry.rows() || rect.p_n < 1 || rect.p_n > geometry.cols() ||
      rect.p_f < 1 || rect.p_f > geometry.frames()) {
    throw InputError("rectangle size out of range for the geometry");
  }
  RectangleVerdict out;
  out.frames_bound = static_cast<double>(geometry.frames()) / kRectangleConstant;
  out.area_bound = static_cast<double>(geometry.pixels()) / kRectangleConstant;
  out.frames_ok = static_cast<double>(rect.p_f) < out.frames_bound;
  out.area_ok = static_cast<double>(rect.area()) < out.area_bound;
  out.pass = out.frames_ok && out.area_ok;
  return out;
}

namespace {

std::size_t passes_needed(std::size_t extent, double speed) {
  if (!(speed > 0.0)) return std::numeric_limits<std::size_t>::max();
  const double ratio = static_cast<double>(extent) / speed;
  // Shave relative rounding so exact quotients such as 1 / 0.1 stay exact.
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

}  // namespace

TrajectoryObscurement pf_constant_trajectory(const RectangleSpec& rect, std::size_t frames) {
  if (rect.speed_x < 0.0 || rect.speed_y < 0.0) {
    throw InputError("speeds must be nonnegative");
  }
  TrajectoryObscurement out;
  if (rect.speed_x == 0.0 && rect.speed_y == 0.0) {
    out.p_f = frames;
    out.travel_premise = false;
    out.warning = "object is static: every covered pixel is obscured in all frames";
    return out;
  }
  out.p_f = std::min(passes_needed(rect.p_n, rect.speed_x), passes_needed(rect.p_m, rect.speed_y));
  out.travel_premise = frames > out.p_f;
  if (!out.travel_premise) {
    out.warning = "video too short for the object to uncover the pixels it passes over";
  }
  return out;
}

bool CertificateReport::pass() const {
  bool evaluated = false;
  bool ok = error.empty();
  if (necessary) {
    evaluated = true;
    ok = ok && necessary->all_pass();
  }
  if (background_connected) {
    evaluated = true;
    ok = ok && *background_connected;
  }
  if (identifiability_raw) {
    evaluated = true;
    ok = ok && identifiability_raw->pass;
  }
  if (identifiability_rectangle) {
    evaluated = true;
    ok = ok && identifiability_rectangle->pass;
  }
  return evaluated && ok;
}

namespace {

void add_set_checks(CertificateReport& report, const PerFrameSets& sets) {
  report.necessary = check_necessary(sets);
  report.common_pixel = check_common_background_pixel(sets);
  report.background_connected = background_graph_connected(sets);
  report.foreground_degrees = foreground_degree_stats(sets);
  report.background_degrees = background_degree_stats(sets);
}

}  // namespace

CertificateReport certify(const DataMatrix& X, const Decomposition& w, const CertifyOptions& options) {
  CertificateReport report;
  report.geometry = X.geometry();
  report.p_max = max_relative_object_size(X.geometry());
  const auto [residual, sets] = residual_sets(X, w, options.eps_s);
  add_set_checks(report, sets);
  if (X.x_black() > 0.0) {
    report.kappa_bound = condition_number_bound(X.x_black(), X.x_white());
  }
  try {
    report.kappa = condition_number(w);
    report.c_param = compute_c(X, w, options.eps_c);
    report.identifiability_raw =
        check_identifiability(static_cast<double>(report.background_degrees->min_degree),
                              static_cast<double>(report.foreground_degrees->max_degree), *report.kappa,
                              report.c_param->c);
  } catch (const std::domain_error& e) {
    report.error = e.what();
  }
  return report;
}

void add_rectangle_check(CertificateReport& report, const RectangleSpec& rect) {
  RectangleSpec r = rect;
  if (rect.speed_x > 0.0 || rect.speed_y > 0.0) {
    report.trajectory = pf_constant_trajectory(rect, report.geometry.frames());
    r.p_f = std::max<std::size_t>(1, std::min(report.trajectory->p_f, report.geometry.frames()));
  }
  report.rectangle = r;
  try {
    report.identifiability_rectangle = rectangle_identifiability(r, report.geometry);
  } catch (const InputError& e) {
    if (!report.error.empty()) report.error += "; ";
    report.error += e.what();
  }
}

CertificateReport certify_a_priori(const RectangleSpec& rect, const FrameGeometry& geometry,
                                   const PerFrameSets* footprint) {
  CertificateReport report;
  report.geometry = geometry;
  report.p_max = max_relative_object_size(geometry);
  if (footprint != nullptr) {
    if (!(footprint->geometry() == geometry)) {
      throw InputError("footprint geometry does not match");
    }
    add_set_checks(report, *footprint);
  }
  add_rectangle_check(report, rect);
  return report;
}

}  // namespace nrpca
