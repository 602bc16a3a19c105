#include "nrpca/report.hpp"

#include "nrpca/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace nrpca::report {

double round6(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return std::strtod(buf, nullptr);
}

json to_json(const FrameGeometry& g) {
  return {{"rows", g.rows()}, {"cols", g.cols()}, {"frames", g.frames()}};
}

FrameGeometry geometry_from_json(const json& j) {
  return {j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
          j.at("frames").get<std::size_t>()};
}

json to_json(const RectangleSpec& r) {
  return {{"p_m", r.p_m},
          {"p_n", r.p_n},
          {"p_f", r.p_f},
          {"speed_x", round6(r.speed_x)},
          {"speed_y", round6(r.speed_y)}};
}

RectangleSpec rectangle_from_json(const json& j) {
  RectangleSpec r;
  r.p_m = j.at("p_m").get<std::size_t>();
  r.p_n = j.at("p_n").get<std::size_t>();
  r.p_f = j.value("p_f", std::size_t{1});
  r.speed_x = j.value("speed_x", 0.0);
  r.speed_y = j.value("speed_y", 0.0);
  return r;
}

namespace {

json pixel_json(std::size_t h0, const FrameGeometry& g) {
  const PixelCoord p = pixel_of_index(h0 + 1, g);
  return {{"h", h0 + 1}, {"i", p.i}, {"j", p.j}};
}

json vertex_json(std::size_t vertex, const FrameGeometry& g) {
  if (vertex < g.pixels()) return {{"pixel", pixel_json(vertex, g)}};
  return {{"frame", vertex - g.pixels() + 1}};
}

json degrees_json(const DegreeStats& s, const FrameGeometry& g) {
  return {{"max_degree", s.max_degree},
          {"max_vertex", vertex_json(s.max_vertex, g)},
          {"min_degree", s.min_degree},
          {"min_vertex", vertex_json(s.min_vertex, g)}};
}

}  // namespace

json to_json(const CertificateReport& r) {
  const FrameGeometry& g = r.geometry;
  json doc;
  doc["verdict"] = r.pass() ? "pass" : "fail";
  doc["geometry"] = to_json(g);
  doc["p_max"] = round6(r.p_max);
  if (!r.error.empty()) doc["error"] = r.error;

  if (r.necessary) {
    const auto& n = *r.necessary;
    json nec;
    nec["object_size"] = {{"foreground", n.object_size.foreground},
                          {"bound", n.object_size.bound},
                          {"tight", n.object_size.tight},
                          {"pass", n.object_size.pass}};
    nec["frame_connectivity"] = {{"pass", n.frame_connectivity.pass}};
    if (n.frame_connectivity.witness_frame) {
      nec["frame_connectivity"]["witness_frame"] = *n.frame_connectivity.witness_frame + 1;
    }
    nec["pixel_connectivity"] = {{"pass", n.pixel_connectivity.pass}};
    if (n.pixel_connectivity.witness_pixel) {
      nec["pixel_connectivity"]["witness_pixel"] = pixel_json(*n.pixel_connectivity.witness_pixel, g);
    }
    doc["connectivity_necessary"] = nec;
  }
  if (r.common_pixel || r.background_connected) {
    json suf;
    if (r.common_pixel) {
      suf["common_background_pixel"] = {{"pass", r.common_pixel->pass},
                                        {"every_pixel_uncovered", r.common_pixel->every_pixel_uncovered}};
      if (r.common_pixel->witness_pixel) {
        suf["common_background_pixel"]["witness_pixel"] = pixel_json(*r.common_pixel->witness_pixel, g);
      }
    }
    if (r.background_connected) suf["background_graph_connected"] = *r.background_connected;
    doc["connectivity"] = suf;
  }
  if (r.foreground_degrees && r.background_degrees) {
    doc["degrees"] = {{"foreground", degrees_json(*r.foreground_degrees, g)},
                      {"background", degrees_json(*r.background_degrees, g)}};
  }
  if (r.kappa) doc["kappa"] = round6(*r.kappa);
  if (r.kappa_bound) doc["kappa_bound"] = round6(*r.kappa_bound);
  if (r.c_param) {
    doc["c"] = {{"c", round6(r.c_param->c)},
                {"block_minimum", round6(r.c_param->block_minimum)},
                {"w_min", round6(r.c_param->w_min)}};
  }
  if (r.identifiability_raw) {
    doc["identifiability_raw"] = {{"lhs_min_background_degree", round6(r.identifiability_raw->lhs)},
                                  {"rhs", round6(r.identifiability_raw->rhs)},
                                  {"pass", r.identifiability_raw->pass}};
  }
  if (r.rectangle) doc["rectangle"] = to_json(*r.rectangle);
  if (r.trajectory) {
    doc["trajectory"] = {{"p_f", r.trajectory->p_f}, {"travel_premise", r.trajectory->travel_premise}};
    if (!r.trajectory->warning.empty()) doc["trajectory"]["warning"] = r.trajectory->warning;
  }
  if (r.identifiability_rectangle) {
    const auto& v = *r.identifiability_rectangle;
    doc["identifiability_rectangle"] = {{"c0", kRectangleConstant},
                                        {"frames_bound", round6(v.frames_bound)},
                                        {"area_bound", round6(v.area_bound)},
                                        {"frames_ok", v.frames_ok},
                                        {"area_ok", v.area_ok},
                                        {"pass", v.pass}};
  }
  return doc;
}

json to_json(const Decomposition& w) {
  return {{"u", std::vector<double>(w.u.data(), w.u.data() + w.u.size())},
          {"v", std::vector<double>(w.v.data(), w.v.data() + w.v.size())},
          {"lambda", w.lambda}};
}

Decomposition decomposition_from_json(const json& j) {
  const auto u = j.at("u").get<std::vector<double>>();
  const auto v = j.at("v").get<std::vector<double>>();
  Decomposition w;
  w.u = Eigen::Map<const Vector>(u.data(), static_cast<Eigen::Index>(u.size()));
  w.v = Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  w.lambda = j.value("lambda", 1.0);
  return w;
}

json to_json(const SolverConfig& c) {
  return {{"lambda", c.lambda},
          {"learning_rate", c.learning_rate},
          {"final_learning_rate", c.final_learning_rate},
          {"decay_start", c.decay_start},
          {"momentum", c.momentum},
          {"iterations", c.iterations},
          {"batch", c.batch},
          {"seed", c.seed},
          {"init_scale", c.init_scale},
          {"trace_stride", c.trace_stride}};
}

json solve_summary(const SolveResult& r) {
  return {{"final_objective", round6(r.final_objective)},
          {"iterations_run", r.iterations_run},
          {"converged", r.converged},
          {"balance_gap", round6(r.w.u.squaredNorm() - r.w.v.squaredNorm())}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw io::IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw io::IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw io::IoError(path.string() + ": " + e.what());
  }
}

}  // namespace nrpca::report
