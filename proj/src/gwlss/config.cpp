#include "gwlss/config.hpp"

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "gwlss/error.hpp"

namespace gwlss {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void error(const YAML::Node& node, const std::string& msg) const {
    std::ostringstream os;
    os << origin_;
    if (node.IsDefined() && node.Mark().line >= 0)
      os << ":" << node.Mark().line + 1 << ":" << node.Mark().column + 1;
    os << ": " << msg;
    fail(ErrorKind::Config, os.str());
  }

  void expect_map(const YAML::Node& node, const std::string& where,
                  std::initializer_list<const char*> keys) const {
    if (!node.IsMap()) error(node, "'" + where + "' must be a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (const char* k : keys) known = known || key == k;
      if (!known) error(kv.first, "unknown key '" + key + "' in '" + where + "'");
    }
  }

  template <class T>
  T get(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, "'" + what + "' must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      error(node, "'" + what + "' has the wrong type (value '" + node.Scalar() + "')");
    }
  }

  template <class T>
  void opt(const YAML::Node& parent, const char* key, T& out, const std::string& where) const {
    const YAML::Node n = parent[key];
    if (n) out = get<T>(n, where + "." + key);
  }

  std::uint64_t seed(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) error(node, "'" + what + "' must be a scalar");
    const std::string& s = node.Scalar();
    try {
      std::size_t pos = 0;
      if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
      const auto v = std::stoull(s, &pos, 0);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      error(node, "'" + what + "' must be an unsigned 64-bit integer");
    }
  }

 private:
  std::string origin_;
};

void read_entry(const Reader& rd, const YAML::Node& node, const std::string& where, EntrySpec& e) {
  if (node.IsScalar()) {
    e.family = node.as<std::string>();
  } else {
    rd.expect_map(node, where, {"family", "p"});
    rd.opt(node, "family", e.family, where);
    rd.opt(node, "p", e.p, where);
  }
  try {
    (void)EntryDistribution::from_name(e.family, e.p);
  } catch (const Error& err) {
    rd.error(node, err.what());
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
    fail(ErrorKind::Config, os.str());
  }
  if (!root || root.IsNull()) fail(ErrorKind::Config, origin + ": empty configuration");
  rd.expect_map(root, "<root>",
                {"profile", "ensemble", "testfn", "run", "verify", "maxpoly", "predict", "quick",
                 "output"});

  ExperimentConfig c;
  c.source = origin;

  const YAML::Node prof = root["profile"];
  if (!prof) rd.error(root, "missing required section 'profile'");
  rd.expect_map(prof, "profile", {"type", "N", "W", "seed", "roughness", "path"});
  if (!prof["type"]) rd.error(prof, "'profile.type' is required");
  c.profile.type = rd.get<std::string>(prof["type"], "profile.type");
  rd.opt(prof, "N", c.profile.N, "profile");
  rd.opt(prof, "W", c.profile.W, "profile");
  rd.opt(prof, "roughness", c.profile.roughness, "profile");
  rd.opt(prof, "path", c.profile.path, "profile");
  if (prof["seed"]) c.profile.seed = rd.seed(prof["seed"], "profile.seed");
  const auto& t = c.profile.type;
  if (t != "flat" && t != "band" && t != "random" && t != "csv")
    rd.error(prof["type"], "profile.type must be one of flat, band, random, csv");
  if (t == "csv") {
    if (c.profile.path.empty()) rd.error(prof, "'profile.path' is required for type csv");
    std::filesystem::path p(c.profile.path);
    if (p.is_relative() && origin != "<string>")
      p = std::filesystem::path(origin).parent_path() / p;
    c.profile.path = p.string();
  } else {
    if (!prof["N"]) rd.error(prof, "'profile.N' is required");
    if (c.profile.N < 2) rd.error(prof["N"], "'profile.N' must be >= 2");
  }
  if (t == "band") {
    if (!prof["W"]) rd.error(prof, "'profile.W' is required for type band");
    if (c.profile.W < 1 || 2 * c.profile.W + 1 > c.profile.N)
      rd.error(prof["W"], "'profile.W' must satisfy 1 <= W <= (N-1)/2");
  }
  if (t == "random" && (c.profile.roughness < 0.0 || c.profile.roughness > 1.0))
    rd.error(prof["roughness"], "'profile.roughness' must lie in [0, 1]");

  if (const YAML::Node ens = root["ensemble"]) {
    rd.expect_map(ens, "ensemble", {"beta", "offdiag", "diag"});
    rd.opt(ens, "beta", c.beta, "ensemble");
    if (c.beta != 1 && c.beta != 2) rd.error(ens["beta"], "'ensemble.beta' must be 1 or 2");
    if (ens["offdiag"]) read_entry(rd, ens["offdiag"], "ensemble.offdiag", c.offdiag);
    if (ens["diag"]) read_entry(rd, ens["diag"], "ensemble.diag", c.diag);
  }

  if (const YAML::Node tf = root["testfn"]) {
    if (tf.IsScalar()) {
      c.testfns.push_back(tf.as<std::string>());
    } else if (tf.IsSequence()) {
      for (const auto& n : tf) c.testfns.push_back(rd.get<std::string>(n, "testfn[]"));
    } else {
      rd.error(tf, "'testfn' must be a string or a list of strings");
    }
    for (std::size_t i = 0; i < c.testfns.size(); ++i) {
      try {
        (void)TestFunction::parse(c.testfns[i]);
      } catch (const Error& e) {
        rd.error(tf.IsSequence() ? tf[i] : tf, e.what());
      }
    }
  }

  if (const YAML::Node run = root["run"]) {
    rd.expect_map(run, "run", {"replicas", "seed", "lambda", "threads"});
    rd.opt(run, "replicas", c.replicas, "run");
    rd.opt(run, "threads", c.threads, "run");
    if (run["seed"]) c.seed = rd.seed(run["seed"], "run.seed");
    if (const YAML::Node lam = run["lambda"]) {
      if (!lam.IsSequence()) rd.error(lam, "'run.lambda' must be a list");
      c.lambda.clear();
      for (const auto& n : lam) c.lambda.push_back(rd.get<double>(n, "run.lambda[]"));
    }
    if (c.replicas < 2) rd.error(run["replicas"], "'run.replicas' must be >= 2");
    if (c.threads < 0) rd.error(run["threads"], "'run.threads' must be >= 0");
  }

  if (const YAML::Node v = root["verify"]) {
    rd.expect_map(v, "verify", {"cf_const", "z_threshold", "variance_scale"});
    rd.opt(v, "cf_const", c.verify.cf_const, "verify");
    rd.opt(v, "z_threshold", c.verify.z_threshold, "verify");
    rd.opt(v, "variance_scale", c.variance_scale, "verify");
    if (c.variance_scale <= 0.0) rd.error(v["variance_scale"], "'verify.variance_scale' must be > 0");
  }

  if (const YAML::Node m = root["maxpoly"]) {
    rd.expect_map(m, "maxpoly", {"kappa", "grid", "replicas", "dump_fields"});
    rd.opt(m, "kappa", c.maxpoly.kappa, "maxpoly");
    rd.opt(m, "grid", c.maxpoly.grid, "maxpoly");
    rd.opt(m, "replicas", c.maxpoly_replicas, "maxpoly");
    rd.opt(m, "dump_fields", c.dump_fields, "maxpoly");
    if (!(c.maxpoly.kappa > 0.0 && c.maxpoly.kappa < 1.0))
      rd.error(m["kappa"], "'maxpoly.kappa' must lie in (0, 1)");
    if (c.maxpoly.grid < 100) rd.error(m["grid"], "'maxpoly.grid' must be >= 100");
    if (c.maxpoly_replicas < 2) rd.error(m["replicas"], "'maxpoly.replicas' must be >= 2");
  }

  if (const YAML::Node p = root["predict"]) {
    rd.expect_map(p, "predict", {"J", "J_max", "M", "integral", "integral_nodes", "mean_nodes"});
    rd.opt(p, "J", c.predict.J, "predict");
    rd.opt(p, "J_max", c.predict.J_max, "predict");
    rd.opt(p, "M", c.predict.M, "predict");
    rd.opt(p, "integral", c.predict.with_integral, "predict");
    rd.opt(p, "mean_nodes", c.predict.mean_nodes, "predict");
    if (p["integral_nodes"]) {
      const int n = rd.get<int>(p["integral_nodes"], "predict.integral_nodes");
      if (n < 8) rd.error(p["integral_nodes"], "'predict.integral_nodes' must be >= 8");
      c.predict.integral.nodes_x = n;
      c.predict.integral.nodes_y = n + 1;
    }
    if (c.predict.J < 2) rd.error(p["J"], "'predict.J' must be >= 2");
    if (c.predict.J_max < c.predict.J) rd.error(p, "'predict.J_max' must be >= predict.J");
    if (c.predict.M < 2 * c.predict.J) rd.error(p, "'predict.M' must be >= 2 * predict.J");
    if (c.predict.mean_nodes < 8) rd.error(p["mean_nodes"], "'predict.mean_nodes' must be >= 8");
  }

  if (const YAML::Node q = root["quick"]) {
    rd.expect_map(q, "quick", {"N", "replicas"});
    rd.opt(q, "N", c.quick_N, "quick");
    rd.opt(q, "replicas", c.quick_replicas, "quick");
  }

  if (const YAML::Node o = root["output"]) {
    rd.expect_map(o, "output", {"dir"});
    rd.opt(o, "dir", c.out_dir, "output");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

EnsembleSpec build_spec(const ExperimentConfig& cfg) {
  EnsembleSpec spec;
  spec.beta = cfg.beta;
  spec.profile = std::make_shared<const VarianceProfile>(profile_from_descriptor(cfg.profile));
  spec.offdiag = EntryDistribution::from_name(cfg.offdiag.family, cfg.offdiag.p);
  spec.diag = EntryDistribution::from_name(cfg.diag.family, cfg.diag.p);
  return spec;
}

std::vector<TestFunction> build_testfns(const ExperimentConfig& cfg) {
  if (cfg.testfns.empty()) fail(ErrorKind::Config, cfg.source + ": 'testfn' is required");
  std::vector<TestFunction> out;
  for (const auto& d : cfg.testfns) out.push_back(TestFunction::parse(d));
  return out;
}

}  // namespace gwlss
