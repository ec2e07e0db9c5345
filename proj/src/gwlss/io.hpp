#pragma once

// Serialization: matrix CSV for profiles, JSON reports, CSV tables.
// Numbers are written with std::to_chars (shortest round-trip form), which
// does not depend on the locale.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gwlss/functionals.hpp"
#include "gwlss/harness.hpp"
#include "gwlss/profile.hpp"
#include "gwlss/spectral.hpp"

namespace gwlss {

using Json = nlohmann::ordered_json;

std::string format_double(double x);

Eigen::MatrixXd read_matrix_csv(const std::string& path);
std::string matrix_csv(const Eigen::MatrixXd& S);

/// Writes text, creating parent directories.
void write_text(const std::string& path, const std::string& text);

Json descriptor_json(const VarianceProfile& p);
Json profile_json(const VarianceProfile& p);
Json prediction_json(const CltPrediction& p);
Json kstats_json(const KStats& k);
Json compare_json(const CompareReport& r);
Json run_result_json(const RunResult& r);

/// replica, then one column per test function.
std::string samples_csv(const RunResult& r);
/// replica, re, im_plus, im_minus, rigidity_max, rigidity_min, perturbed.
std::string maxfield_csv(const RunResult& r);
/// E, ReL, ImL on the given grid at eta = 0.
std::string field_csv(const SpectralSample& s, const std::vector<double>& grid);

}  // namespace gwlss
