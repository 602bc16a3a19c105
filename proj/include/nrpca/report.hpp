#pragma once

#include "nrpca/certify.hpp"
#include "nrpca/core.hpp"
#include "nrpca/solver.hpp"
#include "nrpca/synth.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace nrpca::report {

using nlohmann::json;

/// Rounds to 6 significant digits so reports diff cleanly.
double round6(double x);

json to_json(const FrameGeometry& g);
FrameGeometry geometry_from_json(const json& j);

json to_json(const RectangleSpec& r);
RectangleSpec rectangle_from_json(const json& j);

/// Certificate document. Pixels and frames in witnesses are 1-based; pixels
/// carry both the pixel number h and (i, j).
json to_json(const CertificateReport& report);

/// Decompositions keep full precision so that runs reproduce bit for bit.
json to_json(const Decomposition& w);
Decomposition decomposition_from_json(const json& j);

json to_json(const SolverConfig& c);

json solve_summary(const SolveResult& r);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);

}  // namespace nrpca::report
