#include "gwlss/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gwlss/error.hpp"

namespace gwlss {

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        std::ostringstream os;
        os << path << ":" << lineno << ": malformed number in matrix row";
        fail(ErrorKind::Io, os.str());
      }
      row.push_back(v);
      p = res.ptr;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') {
        std::ostringstream os;
        os << path << ":" << lineno << ": expected ',' in matrix row";
        fail(ErrorKind::Io, os.str());
      }
      ++p;
    }
    rows.push_back(std::move(row));
  }
  const long N = static_cast<long>(rows.size());
  if (N == 0) fail(ErrorKind::Io, path + ": empty matrix file");
  Eigen::MatrixXd S(N, N);
  for (long i = 0; i < N; ++i) {
    if (static_cast<long>(rows[i].size()) != N) {
      std::ostringstream os;
      os << path << ": row " << i + 1 << " has " << rows[i].size() << " entries, expected " << N;
      fail(ErrorKind::Io, os.str());
    }
    for (long j = 0; j < N; ++j) S(i, j) = rows[i][j];
  }
  return S;
}

std::string matrix_csv(const Eigen::MatrixXd& S) {
  std::string out;
  for (Eigen::Index i = 0; i < S.rows(); ++i) {
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      if (j) out += ',';
      out += format_double(S(i, j));
    }
    out += '\n';
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

VarianceProfile profile_from_descriptor(const ProfileDescriptor& d) {
  if (d.type == "flat") return profile_flat(d.N);
  if (d.type == "band") return profile_band(d.N, d.W);
  if (d.type == "random") return profile_random_ds(d.N, d.seed, d.roughness);
  if (d.type == "csv" || d.type == "matrix") {
    ProfileDescriptor desc = d;
    desc.type = "matrix";
    return VarianceProfile(read_matrix_csv(d.path), desc);
  }
  fail(ErrorKind::Config, "unknown profile type '" + d.type + "'");
}

namespace {

Json complex_json(cplx z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

Json descriptor_json(const VarianceProfile& p) {
  const auto& d = p.descriptor();
  Json params = Json::object();
  if (d.type == "band") params["W"] = d.W;
  if (d.type == "random") params["roughness"] = d.roughness;
  if (!d.path.empty()) params["path"] = d.path;
  return Json{{"type", d.type}, {"N", p.size()}, {"params", params}, {"seed", d.seed}};
}

Json profile_json(const VarianceProfile& p) {
  const auto& r = p.report();
  Json j = descriptor_json(p);
  j["row_sum_err"] = r.row_sum_err;
  j["c_low"] = p.c_low();
  j["c_high"] = p.c_high();
  j["spectral_gap"] = r.spectral_gap;
  j["a_radius"] = p.a_radius();
  j["trace"] = p.trace();
  return j;
}

Json prediction_json(const CltPrediction& p) {
  Json j{{"V", p.V},
         {"E", p.E},
         {"B", p.B},
         {"beta", p.beta},
         {"J", p.J},
         {"tail_estimate", p.tail_estimate},
         {"paths_agree", p.paths_agree},
         {"provenance", p.provenance},
         {"truncation_bound", p.truncation_bound},
         {"tail_warning", p.tail_warning}};
  if (p.has_integral) j["V_integral"] = p.V_integral;
  const auto k = predicted_cumulants(p);
  j["kappa3_taylor"] = k.k3_taylor;
  j["kappa3_magnitude"] = k.k3_magnitude;
  return j;
}

Json kstats_json(const KStats& k) {
  return Json{{"k1", k.k1}, {"k2", k.k2}, {"k3", k.k3},
              {"se1", k.se1}, {"se2", k.se2}, {"se3", k.se3}};
}

Json compare_json(const CompareReport& r) {
  Json items = Json::array();
  for (const auto& it : r.items)
    items.push_back(Json{{"name", it.name},
                         {"observed", it.observed},
                         {"predicted", it.predicted},
                         {"statistic", it.statistic},
                         {"threshold", it.threshold},
                         {"pass", it.pass}});
  return Json{{"pass", r.pass},
              {"cf_threshold", r.cf_threshold},
              {"z_threshold", r.z_threshold},
              {"items", items},
              {"third_cumulant",
               {{"k3", r.k3},
                {"se", r.k3_se},
                {"taylor_minus_2B", r.k3_taylor},
                {"direct_B", r.k3_direct},
                {"supported", r.k3_supported},
                {"sign_relative_to_B", r.k3_sign}}}};
}

Json run_result_json(const RunResult& r) {
  Json j{{"spec_hash", r.spec_hash},
         {"seed", r.master_seed},
         {"N", r.N},
         {"beta", r.beta},
         {"replicas", r.replicas},
         {"lambda", r.lambda_grid}};
  Json fns = Json::array();
  for (const auto& f : r.functions) {
    Json cf = Json::array();
    for (std::size_t i = 0; i < f.char_emp.size(); ++i)
      cf.push_back(Json{{"lambda", r.lambda_grid[i]},
                        {"value", complex_json(f.char_emp[i])},
                        {"stderr", 1.0 / std::sqrt(static_cast<double>(r.replicas))}});
    Json fj{{"testfn", f.name}, {"char_emp", cf}, {"kstats", kstats_json(f.kstats)}};
    if (f.has_prediction) fj["prediction"] = prediction_json(f.prediction);
    fns.push_back(fj);
  }
  j["functions"] = fns;
  if (!r.maxfield.empty()) {
    const auto& s = r.maxfield_summary;
    j["maxfield"] = Json{{"replicas", s.replicas},
                         {"median_re", s.median_re},
                         {"median_im_plus", s.median_im_plus},
                         {"median_im_minus", s.median_im_minus},
                         {"median_rigidity_max", s.median_rigidity_max},
                         {"median_rigidity_min", s.median_rigidity_min},
                         {"perturbations", s.perturbations}};
  }
  j["log"] = r.log;
  return j;
}

std::string samples_csv(const RunResult& r) {
  std::string out = "replica";
  for (const auto& f : r.functions) out += "," + f.name;
  out += '\n';
  for (long i = 0; i < r.replicas; ++i) {
    out += std::to_string(i);
    for (const auto& f : r.functions) out += "," + format_double(f.samples[i]);
    out += '\n';
  }
  return out;
}

std::string maxfield_csv(const RunResult& r) {
  std::string out = "replica,re,im_plus,im_minus,rigidity_max,rigidity_min,perturbed\n";
  for (std::size_t i = 0; i < r.maxfield.size(); ++i) {
    const auto& m = r.maxfield[i];
    out += std::to_string(i) + "," + format_double(m.re) + "," + format_double(m.im_plus) + "," +
           format_double(m.im_minus) + "," + format_double(m.rigidity_max) + "," +
           format_double(m.rigidity_min) + "," + std::to_string(m.perturbed) + "\n";
  }
  return out;
}

std::string field_csv(const SpectralSample& s, const std::vector<double>& grid) {
  std::string out = "E,ReL,ImL\n";
  for (double E : grid) {
    const cplx L = log_char_field(s, E, 0.0);
    out += format_double(E) + "," + format_double(L.real()) + "," + format_double(L.imag()) + "\n";
  }
  return out;
}

}  // namespace gwlss
