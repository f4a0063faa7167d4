#include "triax/model_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "triax/error.hpp"
#include "triax/format.hpp"

namespace triax {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw Error(Errc::parse, "line " + std::to_string(line_no) + ": " + what);
}

/// Parses "name[i]" or "name[i][j]" keys; returns the bracket values.
std::vector<long long> indices_of(const std::string& key, const std::string& name, int arity,
                                  int line_no) {
  std::string rest = key.substr(name.size());
  std::vector<long long> out;
  for (int a = 0; a < arity; ++a) {
    if (rest.empty() || rest.front() != '[') fail(line_no, "expected '[' in " + key);
    std::size_t close = rest.find(']');
    if (close == std::string::npos) fail(line_no, "missing ']' in " + key);
    std::string num = rest.substr(1, close - 1);
    try {
      std::size_t used = 0;
      long long v = std::stoll(num, &used);
      if (used != num.size()) throw std::invalid_argument(num);
      out.push_back(v);
    } catch (const std::exception&) {
      fail(line_no, "bad index '" + num + "' in " + key);
    }
    rest = rest.substr(close + 1);
  }
  if (!rest.empty()) fail(line_no, "trailing text after " + key);
  return out;
}

double parse_number(const std::string& value, int line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(line_no, "bad number '" + value + "'");
  }
}

long long parse_count(const std::string& value, int line_no) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(line_no, "bad integer '" + value + "'");
  }
}

struct Assignment {
  int line_no;
  std::string key;
  std::string value;
};

}  // namespace

const ModelSpec& ModelFile::resolve() {
  if (!resolved_) {
    if (sre)
      resolved_ = *sre;
    else if (garch)
      resolved_ = to_sre(*garch);
    else
      throw Error(Errc::parse, "model file declares neither a recursion nor GARCH parameters");
  }
  return *resolved_;
}

ModelFile parse_model_file(const std::string& text) {
  std::vector<Assignment> assigns;
  {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::size_t hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      std::string line = trim(raw);
      if (line.empty()) continue;
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
      Assignment a;
      a.line_no = line_no;
      a.key = trim(line.substr(0, eq));
      a.value = trim(line.substr(eq + 1));
      if (a.key.empty() || a.value.empty()) fail(line_no, "expected 'key = value'");
      assigns.push_back(a);
    }
  }

  std::set<std::string> seen;
  for (const Assignment& a : assigns) {
    if (!seen.insert(a.key).second) fail(a.line_no, "duplicate assignment of " + a.key);
  }

  ModelFile file;
  int dim = 0, gdim = 0;
  for (const Assignment& a : assigns) {
    if (a.key == "dim") {
      long long v = parse_count(a.value, a.line_no);
      if (v < 1 || v > 64) fail(a.line_no, "dim must be in [1, 64]");
      dim = static_cast<int>(v);
    } else if (a.key == "garch.dim") {
      long long v = parse_count(a.value, a.line_no);
      if (v < 1 || v > 64) fail(a.line_no, "garch.dim must be in [1, 64]");
      gdim = static_cast<int>(v);
    }
  }

  std::vector<std::vector<bool>> a_set;
  std::vector<bool> b_set;
  if (dim > 0) {
    file.sre = ModelSpec{};
    file.sre->d = dim;
    file.sre->A.assign(dim, std::vector<DistributionSpec>(dim, zero_dist()));
    file.sre->B.assign(dim, zero_dist());
    a_set.assign(dim, std::vector<bool>(dim, false));
    b_set.assign(dim, false);
  }
  if (gdim > 0) {
    file.garch = GarchSpec{};
    file.garch->d = gdim;
    file.garch->alpha0.assign(gdim, 0.0);
    file.garch->alpha.assign(gdim, std::vector<double>(gdim, 0.0));
    file.garch->beta.assign(gdim, std::vector<double>(gdim, 0.0));
  }

  auto check_pair = [](long long i, long long j, int d, int line_no) {
    if (i < 1 || i > d || j < 1 || j > d) fail(line_no, "index out of range");
    if (j < i) fail(line_no, "below-diagonal entry (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") is not allowed");
  };

  for (const Assignment& a : assigns) {
    if (a.key == "dim" || a.key == "garch.dim") continue;
    if (a.key.rfind("A[", 0) == 0) {
      if (dim == 0) fail(a.line_no, "dim must be declared for A entries");
      auto ix = indices_of(a.key, "A", 2, a.line_no);
      check_pair(ix[0], ix[1], dim, a.line_no);
      file.sre->A[ix[0] - 1][ix[1] - 1] = parse_literal(a.value);
      a_set[ix[0] - 1][ix[1] - 1] = true;
    } else if (a.key.rfind("B[", 0) == 0) {
      if (dim == 0) fail(a.line_no, "dim must be declared for B entries");
      auto ix = indices_of(a.key, "B", 1, a.line_no);
      if (ix[0] < 1 || ix[0] > dim) fail(a.line_no, "index out of range");
      file.sre->B[ix[0] - 1] = parse_literal(a.value);
      b_set[ix[0] - 1] = true;
    } else if (a.key.rfind("garch.alpha0[", 0) == 0) {
      if (gdim == 0) fail(a.line_no, "garch.dim must be declared first");
      auto ix = indices_of(a.key, "garch.alpha0", 1, a.line_no);
      if (ix[0] < 1 || ix[0] > gdim) fail(a.line_no, "index out of range");
      file.garch->alpha0[ix[0] - 1] = parse_number(a.value, a.line_no);
    } else if (a.key.rfind("garch.alpha[", 0) == 0) {
      if (gdim == 0) fail(a.line_no, "garch.dim must be declared first");
      auto ix = indices_of(a.key, "garch.alpha", 2, a.line_no);
      check_pair(ix[0], ix[1], gdim, a.line_no);
      file.garch->alpha[ix[0] - 1][ix[1] - 1] = parse_number(a.value, a.line_no);
    } else if (a.key.rfind("garch.beta[", 0) == 0) {
      if (gdim == 0) fail(a.line_no, "garch.dim must be declared first");
      auto ix = indices_of(a.key, "garch.beta", 2, a.line_no);
      check_pair(ix[0], ix[1], gdim, a.line_no);
      file.garch->beta[ix[0] - 1][ix[1] - 1] = parse_number(a.value, a.line_no);
    } else if (a.key == "garch.common_shock") {
      if (gdim == 0) fail(a.line_no, "garch.dim must be declared first");
      if (a.value == "true")
        file.garch->common_shock = true;
      else if (a.value == "false")
        file.garch->common_shock = false;
      else
        fail(a.line_no, "expected true or false");
    } else {
      fail(a.line_no, "unknown key '" + a.key + "'");
    }
  }

  if (file.sre) {
    for (int i = 0; i < dim; ++i) {
      if (!a_set[i][i])
        throw Error(Errc::parse,
                    "diagonal entry A[" + std::to_string(i + 1) + "][" + std::to_string(i + 1) +
                        "] is not assigned");
      if (!b_set[i])
        throw Error(Errc::parse, "B[" + std::to_string(i + 1) + "] is not assigned");
      if (file.sre->A[i][i].is_zero())
        throw Error(Errc::parse, "diagonal entry A[" + std::to_string(i + 1) + "][" +
                                     std::to_string(i + 1) + "] must not be zero");
    }
    file.sre->check_shape();
  }
  if (file.garch) file.garch->check();
  if (!file.sre && !file.garch)
    throw Error(Errc::parse, "model file declares neither a recursion nor GARCH parameters");
  return file;
}

ModelFile load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::parse, "cannot open model file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_file(buf.str());
}

namespace {

json profile_json(const TailProfile& profile) {
  json j;
  j["alpha"] = profile.alpha;
  j["tilde_alpha"] = profile.tilde_alpha;
  json j0 = json::array();
  for (int v : profile.j0) j0.push_back(v + 1);
  j["j0"] = j0;
  return j;
}

}  // namespace

std::string profile_to_json(const TailProfile& profile) {
  return profile_json(profile).dump(2) + "\n";
}

std::string validation_to_json(const ValidationReport& report) {
  json j;
  j["accepted"] = report.accepted;
  json conds = json::array();
  for (const ConditionCheck& c : report.conditions) {
    json e;
    e["id"] = c.id;
    e["checked"] = c.checked;
    e["pass"] = c.pass;
    e["detail"] = c.detail;
    conds.push_back(e);
  }
  j["conditions"] = conds;
  if (report.profile) j["profile"] = profile_json(*report.profile);
  if (report.lyapunov) {
    json l;
    l["eps"] = report.lyapunov->eps;
    l["rho"] = report.lyapunov->rho;
    l["sufficient"] = report.lyapunov->sufficient;
    j["lyapunov"] = l;
  }
  return j.dump(2) + "\n";
}

std::string estimates_to_json(const std::vector<TailEstimate>& estimates,
                              const std::vector<int>& coordinates, std::uint64_t seed) {
  json arr = json::array();
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    json e;
    e["coordinate"] = coordinates[i] + 1;
    e["method"] = estimates[i].method;
    e["point"] = estimates[i].point;
    e["std_error"] = estimates[i].std_error;
    e["k"] = estimates[i].k;
    e["n"] = estimates[i].n;
    e["seed"] = seed;
    arr.push_back(e);
  }
  return arr.dump(2) + "\n";
}

std::string constants_to_json(const ConstantsReport& report, std::uint64_t seed) {
  json arr = json::array();
  for (std::size_t i = 0; i < report.coordinate.size(); ++i) {
    json e;
    e["coordinate"] = report.coordinate[i] + 1;
    e["constant"] = report.constant[i];
    e["std_error"] = report.std_error[i];
    e["method"] = report.method[i];
    if (!std::isnan(report.u_used[i])) e["u"] = report.u_used[i];
    e["chain"] = report.chain[i];
    e["seed"] = seed;
    arr.push_back(e);
  }
  return arr.dump(2) + "\n";
}

std::string lyapunov_to_json(double eps, const LyapunovSufficiency& bound,
                             const LyapunovMcResult& mc) {
  json j;
  j["eps"] = eps;
  j["sufficient"] = bound.sufficient;
  j["rho"] = bound.rho;
  json m;
  m["estimate"] = mc.estimate;
  m["std_error"] = mc.std_error;
  m["steps"] = mc.steps;
  m["paths"] = mc.paths;
  j["mc"] = m;
  return j.dump(2) + "\n";
}

std::string batch_to_csv(const std::vector<std::vector<double>>& states) {
  std::string out;
  if (states.empty()) return out;
  std::size_t d = states[0].size();
  for (std::size_t i = 0; i < d; ++i) {
    if (i) out += ',';
    out += "w_" + std::to_string(i + 1);
  }
  out += '\n';
  for (const auto& w : states) {
    for (std::size_t i = 0; i < d; ++i) {
      if (i) out += ',';
      out += fmt_double(w[i]);
    }
    out += '\n';
  }
  return out;
}

std::string traces_to_csv(const std::vector<DecompositionTrace>& traces) {
  std::string out =
      "path_id,s,Q_F,Q_T,Q_W,Q_B,QpW,QppW,QstarW,R,pi_lj0,W_j0_ms,W_l_0\n";
  for (std::size_t p = 0; p < traces.size(); ++p) {
    const DecompositionTrace& t = traces[p];
    out += std::to_string(p);
    out += ',';
    out += std::to_string(t.s);
    for (double v : {t.Q_F, t.Q_T, t.Q_W, t.Q_B, t.QpW, t.QppW, t.QstarW, t.R, t.pi_lj0,
                     t.W_j0_ms, t.W_l_0}) {
      out += ',';
      out += fmt_double(v);
    }
    out += '\n';
  }
  return out;
}

std::string useq_to_csv(const USequence& u) {
  std::string out = "s,u_estimate,std_error\n";
  for (std::size_t i = 0; i < u.s.size(); ++i) {
    out += std::to_string(u.s[i]);
    out += ',';
    out += fmt_double(u.estimate[i]);
    out += ',';
    out += fmt_double(u.std_error[i]);
    out += '\n';
  }
  return out;
}

std::string survival_to_csv(const std::vector<double>& grid, const std::vector<double>& curve) {
  std::string out = "x,x_pow_alpha_times_survival\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += fmt_double(grid[i]);
    out += ',';
    out += fmt_double(curve[i]);
    out += '\n';
  }
  return out;
}

std::string garch_to_csv(const GarchPath& path) {
  std::string out = "t";
  for (int i = 0; i < path.d; ++i) out += ",X_" + std::to_string(i + 1);
  for (int i = 0; i < path.d; ++i) out += ",sigma2_" + std::to_string(i + 1);
  out += '\n';
  for (long long t = 0; t < path.steps; ++t) {
    out += std::to_string(t);
    for (int i = 0; i < path.d; ++i) {
      out += ',';
      out += fmt_double(path.x(t, i));
    }
    for (int i = 0; i < path.d; ++i) {
      out += ',';
      out += fmt_double(path.s2(t, i));
    }
    out += '\n';
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::parse, "cannot open output file '" + path + "'");
  out << content;
  if (!out) throw Error(Errc::parse, "failed writing output file '" + path + "'");
}

}  // namespace triax
