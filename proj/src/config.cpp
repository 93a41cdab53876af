#include "klmap/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "klmap/errors.hpp"
#include "klmap/io.hpp"

namespace klmap {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

// section -> key -> entry
using RawConfig = std::map<std::string, std::map<std::string, RawEntry>>;

const std::set<std::string> kKnownSections = {"grid",   "prior", "forward", "noise",
                                              "data",   "solver", "sweep",  "output"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

RawConfig tokenize(const std::string& text, const std::string& name) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']') {
        throw ConfigError(name + ":" + std::to_string(lineno) +
                          ": malformed section header '" + stripped + "'");
      }
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (!kKnownSections.count(section)) {
        throw ConfigError(name + ":" + std::to_string(lineno) + ": unknown section '" +
                          section + "'");
      }
      raw[section];  // section may legitimately stay empty
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 'key = value', got '" + stripped + "'");
    }
    if (section.empty()) {
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": key outside any [section]");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    }
    auto [it, inserted] = raw[section].emplace(key, RawEntry{value, lineno, false});
    if (!inserted) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" +
                        section + "." + key + "' (first at line " +
                        std::to_string(it->second.line) + ")");
    }
  }
  return raw;
}

class Reader {
 public:
  Reader(RawConfig raw, std::string name) : raw_(std::move(raw)), name_(std::move(name)) {}

  bool has(const std::string& section, const std::string& key) {
    auto sit = raw_.find(section);
    if (sit == raw_.end()) return false;
    return sit->second.count(key) > 0;
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) {
    auto sit = raw_.find(section);
    if (sit == raw_.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    kit->second.consumed = true;
    last_line_ = kit->second.line;
    return kit->second.value;
  }

  std::string require(const std::string& section, const std::string& key) {
    auto v = get(section, key);
    if (!v) {
      throw ConfigError(name_ + ": missing required key '" + section + "." + key + "'");
    }
    return *v;
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) {
    throw ConfigError(name_ + ":" + std::to_string(last_line_) + ": key '" + section +
                      "." + key + "': " + message);
  }

  double number(const std::string& section, const std::string& key,
                const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
      fail(section, key, "cannot parse '" + text + "' as a number");
    }
    return v;
  }

  long long integer(const std::string& section, const std::string& key,
                    const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    long long v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
      fail(section, key, "cannot parse '" + text + "' as an integer");
    }
    return v;
  }

  std::uint64_t unsigned_integer(const std::string& section, const std::string& key,
                                 const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    std::uint64_t v = 0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
      fail(section, key, "cannot parse '" + text + "' as a nonnegative integer");
    }
    return v;
  }

  bool boolean(const std::string& section, const std::string& key,
               const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    fail(section, key, "cannot parse '" + text + "' as a boolean (true/false/1/0)");
  }

  std::vector<double> number_list(const std::string& section, const std::string& key,
                                  const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(number(section, key, trim(item)));
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
  }

  std::vector<int> int_list(const std::string& section, const std::string& key,
                            const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(static_cast<int>(integer(section, key, trim(item))));
    }
    if (out.empty()) fail(section, key, "empty list");
    return out;
  }

  /// Every key must have been consumed by the schema walk.
  void reject_unconsumed() const {
    for (const auto& [section, entries] : raw_) {
      for (const auto& [key, entry] : entries) {
        if (!entry.consumed) {
          throw ConfigError(name_ + ":" + std::to_string(entry.line) +
                            ": unknown key '" + section + "." + key + "'");
        }
      }
    }
  }

  const std::string& name() const { return name_; }

 private:
  RawConfig raw_;
  std::string name_;
  int last_line_ = 0;
};

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& name) {
  Reader r(tokenize(text, name), name);
  ExperimentConfig cfg;

  // [grid]
  cfg.grid.a = r.number("grid", "a", r.require("grid", "a"));
  cfg.grid.b = r.number("grid", "b", r.require("grid", "b"));
  cfg.grid.m = static_cast<int>(r.integer("grid", "m", r.require("grid", "m")));
  if (!(cfg.grid.a < cfg.grid.b)) {
    throw ConfigError(name + ": grid.a must be less than grid.b");
  }
  if (cfg.grid.m < 3) {
    throw ConfigError(name + ": grid.m must be at least 3");
  }

  // [prior]
  cfg.prior.family = kernel_family_from_string(r.require("prior", "family"));
  if (auto v = r.get("prior", "variance")) {
    cfg.prior.variance = r.number("prior", "variance", *v);
  }
  if (auto v = r.get("prior", "length_scale")) {
    cfg.prior.length_scale = r.number("prior", "length_scale", *v);
  }
  if (auto v = r.get("prior", "drop_tol")) {
    cfg.prior.drop_tol = r.number("prior", "drop_tol", *v);
  }
  if (cfg.prior.family != KernelFamily::brownian && !cfg.prior.length_scale) {
    throw ConfigError(name + ": prior.length_scale required for family '" +
                      to_string(cfg.prior.family) + "'");
  }
  if (cfg.prior.drop_tol < 0.0) {
    throw ConfigError(name + ": prior.drop_tol must be nonnegative");
  }

  // [forward]
  cfg.forward.kind = forward_kind_from_string(r.require("forward", "kind"));
  if (auto v = r.get("forward", "obs_locations")) {
    cfg.forward.obs_locations = r.number_list("forward", "obs_locations", *v);
  }
  if (auto v = r.get("forward", "obs_count")) {
    cfg.forward.obs_count = static_cast<int>(r.integer("forward", "obs_count", *v));
  }
  if (cfg.forward.obs_locations && cfg.forward.obs_count) {
    throw ConfigError(name + ": give forward.obs_locations or forward.obs_count, not both");
  }
  if (!cfg.forward.obs_locations && !cfg.forward.obs_count) {
    throw ConfigError(name + ": forward section needs obs_locations or obs_count");
  }
  if (cfg.forward.obs_count && *cfg.forward.obs_count < 0) {
    throw ConfigError(name + ": forward.obs_count must be nonnegative");
  }
  if (auto v = r.get("forward", "blur_width")) {
    if (cfg.forward.kind != ForwardKind::convolution) {
      r.fail("forward", "blur_width", "only valid for kind = convolution");
    }
    cfg.forward.blur_width = r.number("forward", "blur_width", *v);
  }
  if (cfg.forward.kind == ForwardKind::convolution && !cfg.forward.blur_width) {
    throw ConfigError(name + ": forward.blur_width required for convolution");
  }
  if (auto v = r.get("forward", "nonlinearity_eps")) {
    if (cfg.forward.kind != ForwardKind::nonlinear_pointwise) {
      r.fail("forward", "nonlinearity_eps", "only valid for kind = nonlinear_pointwise");
    }
    cfg.forward.nonlinearity_eps = r.number("forward", "nonlinearity_eps", *v);
  }

  // [noise]
  if (auto v = r.get("noise", "variance")) {
    cfg.noise.variance = r.number("noise", "variance", *v);
  }
  if (auto v = r.get("noise", "variances")) {
    cfg.noise.variances = r.number_list("noise", "variances", *v);
  }
  if (cfg.noise.variance && cfg.noise.variances) {
    throw ConfigError(name + ": give noise.variance or noise.variances, not both");
  }
  if (!cfg.noise.variance && !cfg.noise.variances) {
    throw ConfigError(name + ": noise section needs variance or variances");
  }

  // [data]
  {
    const std::string mode = r.require("data", "mode");
    if (mode == "synthesize") {
      cfg.data.mode = ExperimentConfig::DataMode::synthesize;
    } else if (mode == "load") {
      cfg.data.mode = ExperimentConfig::DataMode::load;
    } else {
      r.fail("data", "mode", "expected 'synthesize' or 'load', got '" + mode + "'");
    }
  }
  if (cfg.data.mode == ExperimentConfig::DataMode::synthesize) {
    if (auto v = r.get("data", "truth")) {
      if (*v == "prior_sample") {
        cfg.data.truth = ExperimentConfig::TruthSource::prior_sample;
      } else if (*v == "file") {
        cfg.data.truth = ExperimentConfig::TruthSource::file;
      } else {
        r.fail("data", "truth", "expected 'prior_sample' or 'file', got '" + *v + "'");
      }
    }
    if (cfg.data.truth == ExperimentConfig::TruthSource::prior_sample) {
      cfg.data.truth_seed =
          r.unsigned_integer("data", "truth_seed", r.require("data", "truth_seed"));
    } else {
      cfg.data.truth_path = r.require("data", "truth_path");
    }
    cfg.data.seed = r.unsigned_integer("data", "seed", r.require("data", "seed"));
  } else {
    cfg.data.path = r.require("data", "path");
    if (auto v = r.get("data", "truth_path")) {
      cfg.data.truth_path = *v;
    }
  }

  // [solver]
  if (auto v = r.get("solver", "grad_tol")) {
    cfg.solver.grad_tol = r.number("solver", "grad_tol", *v);
  }
  if (auto v = r.get("solver", "max_iters")) {
    cfg.solver.max_iters = static_cast<int>(r.integer("solver", "max_iters", *v));
  }
  if (auto v = r.get("solver", "armijo_c")) {
    cfg.solver.armijo_c = r.number("solver", "armijo_c", *v);
  }
  if (auto v = r.get("solver", "backtrack_factor")) {
    cfg.solver.backtrack_factor = r.number("solver", "backtrack_factor", *v);
  }
  if (auto v = r.get("solver", "init_step")) {
    cfg.solver.init_step = r.number("solver", "init_step", *v);
  }
  try {
    cfg.solver.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(name + ": solver section: " + ex.what());
  }

  // [sweep]
  if (auto v = r.get("sweep", "ns")) {
    cfg.sweep.present = true;
    cfg.sweep.ns = r.int_list("sweep", "ns", *v);
    for (std::size_t i = 0; i < cfg.sweep.ns.size(); ++i) {
      if (cfg.sweep.ns[i] < 1) r.fail("sweep", "ns", "entries must be positive");
      if (i > 0 && cfg.sweep.ns[i] <= cfg.sweep.ns[i - 1]) {
        r.fail("sweep", "ns", "entries must be strictly ascending");
      }
    }
  }
  if (auto v = r.get("sweep", "lipschitz_samples")) {
    cfg.sweep.lipschitz_samples =
        static_cast<int>(r.integer("sweep", "lipschitz_samples", *v));
    if (cfg.sweep.lipschitz_samples < 2) {
      r.fail("sweep", "lipschitz_samples", "must be at least 2");
    }
  }
  if (auto v = r.get("sweep", "seed")) {
    cfg.sweep.seed = r.unsigned_integer("sweep", "seed", *v);
  }

  // [output]
  if (auto v = r.get("output", "directory")) {
    cfg.output.directory = *v;
  }
  if (auto v = r.get("output", "emit_svg")) {
    cfg.output.emit_svg = r.boolean("output", "emit_svg", *v);
  }

  r.reject_unconsumed();
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

namespace {

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::string join_ints(const std::vector<int>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[grid]\n";
  out << "a = " << format_double(cfg.grid.a) << '\n';
  out << "b = " << format_double(cfg.grid.b) << '\n';
  out << "m = " << cfg.grid.m << '\n';

  out << "\n[prior]\n";
  out << "family = " << to_string(cfg.prior.family) << '\n';
  out << "variance = " << format_double(cfg.prior.variance) << '\n';
  if (cfg.prior.length_scale) {
    out << "length_scale = " << format_double(*cfg.prior.length_scale) << '\n';
  }
  out << "drop_tol = " << format_double(cfg.prior.drop_tol) << '\n';

  out << "\n[forward]\n";
  out << "kind = " << to_string(cfg.forward.kind) << '\n';
  if (cfg.forward.obs_locations) {
    out << "obs_locations = " << join_doubles(*cfg.forward.obs_locations) << '\n';
  } else if (cfg.forward.obs_count) {
    out << "obs_count = " << *cfg.forward.obs_count << '\n';
  }
  if (cfg.forward.kind == ForwardKind::convolution && cfg.forward.blur_width) {
    out << "blur_width = " << format_double(*cfg.forward.blur_width) << '\n';
  }
  if (cfg.forward.kind == ForwardKind::nonlinear_pointwise) {
    out << "nonlinearity_eps = "
        << format_double(cfg.forward.nonlinearity_eps.value_or(0.0)) << '\n';
  }

  out << "\n[noise]\n";
  if (cfg.noise.variances) {
    out << "variances = " << join_doubles(*cfg.noise.variances) << '\n';
  } else if (cfg.noise.variance) {
    out << "variance = " << format_double(*cfg.noise.variance) << '\n';
  }

  out << "\n[data]\n";
  if (cfg.data.mode == ExperimentConfig::DataMode::synthesize) {
    out << "mode = synthesize\n";
    if (cfg.data.truth == ExperimentConfig::TruthSource::prior_sample) {
      out << "truth = prior_sample\n";
      out << "truth_seed = " << cfg.data.truth_seed << '\n';
    } else {
      out << "truth = file\n";
      out << "truth_path = " << *cfg.data.truth_path << '\n';
    }
    out << "seed = " << cfg.data.seed << '\n';
  } else {
    out << "mode = load\n";
    out << "path = " << *cfg.data.path << '\n';
    if (cfg.data.truth_path) {
      out << "truth_path = " << *cfg.data.truth_path << '\n';
    }
  }

  out << "\n[solver]\n";
  out << "grad_tol = " << format_double(cfg.solver.grad_tol) << '\n';
  out << "max_iters = " << cfg.solver.max_iters << '\n';
  out << "armijo_c = " << format_double(cfg.solver.armijo_c) << '\n';
  out << "backtrack_factor = " << format_double(cfg.solver.backtrack_factor) << '\n';
  out << "init_step = " << format_double(cfg.solver.init_step) << '\n';

  if (cfg.sweep.present) {
    out << "\n[sweep]\n";
    out << "ns = " << join_ints(cfg.sweep.ns) << '\n';
    out << "lipschitz_samples = " << cfg.sweep.lipschitz_samples << '\n';
    out << "seed = " << cfg.sweep.seed << '\n';
  }

  out << "\n[output]\n";
  out << "directory = " << cfg.output.directory << '\n';
  out << "emit_svg = " << (cfg.output.emit_svg ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace klmap
