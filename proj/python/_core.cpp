// Python bindings. Videos are (frames, rows, cols) float arrays, data
// matrices are m x n with column k the vectorized frame k, and masks are
// boolean m x n arrays with True marking foreground.

#include "nrpca/certify.hpp"
#include "nrpca/core.hpp"
#include "nrpca/graphs.hpp"
#include "nrpca/preprocess.hpp"
#include "nrpca/report.hpp"
#include "nrpca/solver.hpp"
#include "nrpca/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nrpca;

namespace {

using ArrayD = py::array_t<double, py::array::c_style | py::array::forcecast>;
using MaskArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

std::vector<Frame> frames_from_array(const ArrayD& a) {
  if (a.ndim() != 3) throw InputError("video must have shape (frames, rows, cols)");
  const auto r = a.unchecked<3>();
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t k = 0; k < r.shape(0); ++k) {
    Frame f(r.shape(1), r.shape(2));
    for (py::ssize_t i = 0; i < r.shape(1); ++i) {
      for (py::ssize_t j = 0; j < r.shape(2); ++j) f(i, j) = r(k, i, j);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

ArrayD frames_to_array(const std::vector<Frame>& frames) {
  if (frames.empty()) return ArrayD(std::vector<py::ssize_t>{0, 0, 0});
  const auto rows = frames.front().rows(), cols = frames.front().cols();
  ArrayD out({static_cast<py::ssize_t>(frames.size()), static_cast<py::ssize_t>(rows),
              static_cast<py::ssize_t>(cols)});
  auto w = out.mutable_unchecked<3>();
  for (std::size_t k = 0; k < frames.size(); ++k) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) w(static_cast<py::ssize_t>(k), i, j) = frames[k](i, j);
    }
  }
  return out;
}

Video video_from_array(const ArrayD& a, double x_black, double x_white) {
  Video v;
  v.frames = frames_from_array(a);
  v.x_black = x_black;
  v.x_white = x_white;
  return v;
}

DataMatrix data_matrix(const ArrayD& video, double x_black, double x_white) {
  return assemble_data_matrix(video_from_array(video, x_black, x_white));
}

MaskArray mask_from_sets(const PerFrameSets& s) {
  MaskArray out({static_cast<py::ssize_t>(s.pixels()), static_cast<py::ssize_t>(s.frames())});
  auto w = out.mutable_unchecked<2>();
  for (std::size_t h = 0; h < s.pixels(); ++h) {
    for (std::size_t k = 0; k < s.frames(); ++k) {
      w(static_cast<py::ssize_t>(h), static_cast<py::ssize_t>(k)) = s.is_foreground(h, k);
    }
  }
  return out;
}

// Graph checks only depend on the pixel count, so the frame shape is m x 1.
PerFrameSets sets_from_mask(const MaskArray& mask) {
  if (mask.ndim() != 2) throw InputError("mask must have shape (pixels, frames)");
  const auto r = mask.unchecked<2>();
  PerFrameSets s(FrameGeometry(static_cast<std::size_t>(r.shape(0)), 1, static_cast<std::size_t>(r.shape(1))));
  for (py::ssize_t h = 0; h < r.shape(0); ++h) {
    for (py::ssize_t k = 0; k < r.shape(1); ++k) {
      if (r(h, k)) s.set_foreground(static_cast<std::size_t>(h), static_cast<std::size_t>(k));
    }
  }
  return s;
}

py::object to_python(const nlohmann::json& doc) {
  return py::module_::import("json").attr("loads")(doc.dump());
}

SolverConfig make_config(double lambda, double lr, double lr_final, double decay_start, double momentum,
                         std::size_t iterations, std::size_t batch, std::uint64_t seed, double init_scale,
                         std::size_t trace_stride) {
  SolverConfig c;
  c.lambda = lambda;
  c.learning_rate = lr;
  c.final_learning_rate = lr_final;
  c.decay_start = decay_start;
  c.momentum = momentum;
  c.iterations = iterations;
  c.batch = batch;
  c.seed = seed;
  c.init_scale = init_scale;
  c.trace_stride = trace_stride;
  return c;
}

py::dict solve_dict(const SolveResult& r) {
  py::dict d;
  d["u"] = r.w.u;
  d["v"] = r.w.v;
  d["objective_trace"] = r.objective_trace;
  d["iterations_run"] = r.iterations_run;
  d["converged"] = r.converged;
  d["final_objective"] = r.final_objective;
  return d;
}

RectangleSpec make_rect(std::size_t p_m, std::size_t p_n, std::size_t p_f, double speed_x, double speed_y) {
  RectangleSpec r;
  r.p_m = p_m;
  r.p_n = p_n;
  r.p_f = p_f;
  r.speed_x = speed_x;
  r.speed_y = speed_y;
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rank-1 background and moving-object separation with identifiability certificates";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<SolverDiverged>(m, "SolverDiverged", PyExc_RuntimeError);

  m.def(
      "data_matrix",
      [](const ArrayD& video, double x_black, double x_white) { return data_matrix(video, x_black, x_white).values(); },
      py::arg("video"), py::arg("x_black"), py::arg("x_white"),
      "Stacks the frames column-major into the m x n data matrix after a range check.");

  m.def(
      "shift_pixels",
      [](const ArrayD& video, double delta_x) {
        return frames_to_array(shift_pixels(video_from_array(video, 0.0, 255.0), delta_x).frames);
      },
      py::arg("video"), py::arg("delta_x") = 5000.0);

  m.def(
      "preprocess",
      [](const ArrayD& video, double delta_x, const std::string& square) {
        PreprocessConfig config;
        config.delta_x = delta_x;
        config.square = parse_square_strategy(square);
        const PreprocessResult r = preprocess(video_from_array(video, 0.0, 255.0), config);
        py::dict d;
        d["video"] = frames_to_array(r.video.frames);
        d["x_black"] = r.video.x_black;
        d["x_white"] = r.video.x_white;
        d["beta"] = r.beta;
        d["square"] = to_string(r.square);
        return d;
      },
      py::arg("video"), py::arg("delta_x") = 5000.0, py::arg("square") = "rescale",
      "Shift into [delta_x, 255 + delta_x] then square the geometry (rescale, repeat or none).");

  m.def(
      "objective",
      [](const Matrix& X, const Vector& u, const Vector& v, double lambda) {
        const DataMatrix D(FrameGeometry(static_cast<std::size_t>(X.rows()), 1, static_cast<std::size_t>(X.cols())),
                           X, X.minCoeff(), X.maxCoeff());
        return objective(D, u, v, lambda);
      },
      py::arg("X"), py::arg("u"), py::arg("v"), py::arg("lam") = 1.0);

  m.def(
      "subgradient",
      [](const Matrix& X, const Vector& u, const Vector& v, double lambda) {
        const DataMatrix D(FrameGeometry(static_cast<std::size_t>(X.rows()), 1, static_cast<std::size_t>(X.cols())),
                           X, X.minCoeff(), X.maxCoeff());
        const Subgradient s = subgradient(D, u, v, lambda);
        return py::make_tuple(s.g_u, s.g_v);
      },
      py::arg("X"), py::arg("u"), py::arg("v"), py::arg("lam") = 1.0, "Full-sum subgradient (g_u, g_v).");

  m.def(
      "solve",
      [](const ArrayD& video, double x_black, double x_white, double lambda, double lr, double lr_final,
         double decay_start, double momentum, std::size_t iterations, std::size_t batch, std::uint64_t seed,
         double init_scale, std::size_t trace_stride) {
        const DataMatrix X = data_matrix(video, x_black, x_white);
        const SolverConfig c = make_config(lambda, lr, lr_final, decay_start, momentum, iterations, batch, seed,
                                           init_scale, trace_stride);
        SolveResult r;
        {
          py::gil_scoped_release release;
          r = solve(X, c);
        }
        return solve_dict(r);
      },
      py::arg("video"), py::arg("x_black"), py::arg("x_white"), py::arg("lam") = 1.0, py::arg("lr") = 1e-4,
      py::arg("lr_final") = 1e-8, py::arg("decay_start") = 0.6, py::arg("momentum") = 0.9,
      py::arg("iterations") = 5000, py::arg("batch") = 0, py::arg("seed") = 0, py::arg("init_scale") = 1.0,
      py::arg("trace_stride") = 1);

  m.def(
      "multi_restart",
      [](const ArrayD& video, double x_black, double x_white, std::size_t restarts, double lambda, double lr,
         std::size_t iterations, std::uint64_t seed, std::size_t threads) {
        const DataMatrix X = data_matrix(video, x_black, x_white);
        SolverConfig c;
        c.lambda = lambda;
        c.learning_rate = lr;
        c.iterations = iterations;
        c.seed = seed;
        MultiRestartResult r;
        {
          py::gil_scoped_release release;
          r = multi_restart(X, restarts, c, threads);
        }
        py::dict d;
        py::list runs;
        for (const auto& run : r.results) runs.append(solve_dict(run));
        d["runs"] = runs;
        d["seeds"] = r.seeds;
        d["failures"] = r.failures;
        d["reference"] = r.reference;
        d["max_relative_distance"] = r.max_relative_distance;
        return d;
      },
      py::arg("video"), py::arg("x_black"), py::arg("x_white"), py::arg("restarts") = 10, py::arg("lam") = 1.0,
      py::arg("lr") = 1e-4, py::arg("iterations") = 5000, py::arg("seed") = 0, py::arg("threads") = 0);

  m.def(
      "residual_mask",
      [](const ArrayD& video, double x_black, double x_white, const Vector& u, const Vector& v, double eps_s) {
        const DataMatrix X = data_matrix(video, x_black, x_white);
        return mask_from_sets(residual_sets(X, Decomposition{u, v, 1.0}, eps_s).second);
      },
      py::arg("video"), py::arg("x_black"), py::arg("x_white"), py::arg("u"), py::arg("v"),
      py::arg("eps_s") = 0.5);

  m.def(
      "certify",
      [](const ArrayD& video, double x_black, double x_white, const Vector& u, const Vector& v, double eps_s,
         double eps_c) {
        const DataMatrix X = data_matrix(video, x_black, x_white);
        CertifyOptions opts;
        opts.eps_s = eps_s;
        opts.eps_c = eps_c;
        return to_python(report::to_json(certify(X, Decomposition{u, v, 1.0}, opts)));
      },
      py::arg("video"), py::arg("x_black"), py::arg("x_white"), py::arg("u"), py::arg("v"), py::arg("eps_s") = 0.5,
      py::arg("eps_c") = 1e-6, "A posteriori certificate as a dict.");

  m.def(
      "certify_a_priori",
      [](std::size_t rows, std::size_t cols, std::size_t frames, std::size_t p_m, std::size_t p_n, std::size_t p_f,
         double speed_x, double speed_y) {
        return to_python(
            report::to_json(certify_a_priori(make_rect(p_m, p_n, p_f, speed_x, speed_y), FrameGeometry(rows, cols, frames))));
      },
      py::arg("rows"), py::arg("cols"), py::arg("frames"), py::arg("p_m"), py::arg("p_n"), py::arg("p_f") = 1,
      py::arg("speed_x") = 0.0, py::arg("speed_y") = 0.0,
      "Rectangle certificate; with speeds, p_f comes from the constant-trajectory formula.");

  m.def(
      "check_identifiability",
      [](double delta, double Delta, double kappa, double c) {
        const IdentifiabilityVerdict v = check_identifiability(delta, Delta, kappa, c);
        return py::make_tuple(v.pass, v.lhs, v.rhs);
      },
      py::arg("min_background_degree"), py::arg("max_foreground_degree"), py::arg("kappa"), py::arg("c"),
      "Returns (pass, lhs, rhs) of delta > 48 / c^2 * kappa^4 * Delta.");

  m.def("condition_number_bound", &condition_number_bound, py::arg("x_black"), py::arg("x_white"));
  m.def("max_relative_object_size", [](std::size_t rows, std::size_t cols, std::size_t frames) {
    return max_relative_object_size(FrameGeometry(rows, cols, frames));
  }, py::arg("rows"), py::arg("cols"), py::arg("frames"));
  m.def(
      "pf_constant_trajectory",
      [](std::size_t p_m, std::size_t p_n, double speed_x, double speed_y, std::size_t frames) {
        return pf_constant_trajectory(make_rect(p_m, p_n, 1, speed_x, speed_y), frames).p_f;
      },
      py::arg("p_m"), py::arg("p_n"), py::arg("speed_x"), py::arg("speed_y"), py::arg("frames"));

  m.def(
      "background_connected", [](const MaskArray& mask) { return background_graph_connected(sets_from_mask(mask)); },
      py::arg("mask"), "Connectivity of the background graph for an m x n foreground mask.");
  m.def(
      "background_connected_exhaustive",
      [](const MaskArray& mask) { return background_connected_exhaustive(sets_from_mask(mask)); }, py::arg("mask"),
      "Split-enumeration test; at most 20 frames.");
  m.def(
      "degree_stats",
      [](const MaskArray& mask) {
        const PerFrameSets s = sets_from_mask(mask);
        const DegreeStats f = foreground_degree_stats(s), b = background_degree_stats(s);
        return py::make_tuple(f.max_degree, b.min_degree);
      },
      py::arg("mask"), "Returns (max foreground degree, min background degree).");

  m.def(
      "generate_scene",
      [](std::size_t rows, std::size_t cols, std::size_t frames, bool certified, std::size_t p_m, std::size_t p_n,
         double speed_x, double speed_y, std::uint64_t seed) {
        const FrameGeometry g(rows, cols, frames);
        SceneSpec spec;
        if (certified) {
          spec = certified_scene(g);
        } else {
          spec.geometry = g;
          spec.rect = make_rect(p_m, p_n, 1, speed_x, speed_y);
        }
        const Scene scene = generate(spec, seed);
        py::dict d;
        d["video"] = frames_to_array(scene.video.frames);
        d["x_black"] = scene.video.x_black;
        d["x_white"] = scene.video.x_white;
        d["truth"] = mask_from_sets(scene.truth);
        d["true_pf"] = scene.true_pf;
        // Balanced so that kappa reflects the scene rather than the v0 scaling.
        const Decomposition w = balance(scene.background);
        d["u"] = w.u;
        d["v"] = w.v;
        d["rectangle"] = to_python(report::to_json(spec.rect));
        return d;
      },
      py::arg("rows"), py::arg("cols"), py::arg("frames"), py::arg("certified") = true, py::arg("p_m") = 1,
      py::arg("p_n") = 1, py::arg("speed_x") = 1.0, py::arg("speed_y") = 0.0, py::arg("seed") = 0,
      "Synthetic video of a moving rectangle over a rank-1 background. With certified=True the rectangle "
      "is chosen so the scene passes the certificate.");
}
