#include "loveres/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "loveres/errors.hpp"

namespace loveres::io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

template <class T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("field \"") + key + "\": " + e.what());
  }
}

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const char* b = s.data();
  while (b < s.data() + s.size() && *b == ' ') ++b;
  auto res = std::from_chars(b, s.data() + s.size(), v);
  if (res.ec != std::errc()) throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

Json to_json(const ShearProfile& p) {
  Json j;
  j["depth_grid"] = p.depth_grid;
  j["mu"] = p.mu;
  j["mu_tail"] = p.mu_tail;
  j["x_I"] = p.x_I;
  return j;
}

ShearProfile shear_from_json(const Json& j) {
  ShearProfile p;
  p.depth_grid = get<std::vector<double>>(j, "depth_grid");
  p.mu = get<std::vector<double>>(j, "mu");
  p.mu_tail = get<double>(j, "mu_tail");
  p.x_I = get<double>(j, "x_I");
  return p;
}

Json to_json(const PotentialProfile& V) {
  Json j;
  j["grid"] = V.grid;
  j["V"] = V.values;
  j["h"] = V.h;
  j["x_I"] = V.x_I;
  j["omega"] = V.omega ? Json(*V.omega) : Json(nullptr);
  return j;
}

PotentialProfile potential_from_json(const Json& j) {
  PotentialProfile V;
  V.grid = get<std::vector<double>>(j, "grid");
  V.values = get<std::vector<double>>(j, "V");
  V.h = get<double>(j, "h");
  V.x_I = get<double>(j, "x_I");
  if (j.contains("omega") && !j.at("omega").is_null()) V.omega = get<double>(j, "omega");
  return V;
}

std::string resonance_csv(const ResonanceSet& set, std::optional<double> omega, double mu_tail) {
  std::string s = "re_k,im_k,re_xi,im_xi,kind,residual,multiplicity\n";
  auto row = [&](const Zero& z, const char* kind) {
    std::string xr, xi;
    if (omega) {
      const SheetPoint p = xi_of_k(z.k, *omega, mu_tail);
      xr = format_double(p.xi.real());
      xi = format_double(p.xi.imag());
    }
    s += format_double(z.k.real()) + "," + format_double(z.k.imag()) + "," + xr + "," + xi + "," + kind + "," +
         format_double(z.residual) + "," + std::to_string(z.multiplicity) + "\n";
  };
  for (const Zero& z : set.eigenvalues) row(z, "eigenvalue");
  for (const Zero& z : set.resonances) row(z, "resonance");
  return s;
}

std::vector<Complex> zeros_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("zero csv is empty");
  const auto header = split(line, ',');
  int ire = -1, iim = -1, imult = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "re_k") ire = i;
    if (header[i] == "im_k") iim = i;
    if (header[i] == "multiplicity") imult = i;
  }
  if (ire < 0 || iim < 0) throw ConfigError("zero csv needs re_k and im_k columns");
  std::vector<Complex> zeros;
  for (int n = 2; std::getline(in, line); ++n) {
    if (line.empty() || line == "\r") continue;
    const auto f = split(line, ',');
    if (static_cast<int>(f.size()) <= std::max({ire, iim, imult}))
      throw ConfigError("csv line " + std::to_string(n) + ": too few columns");
    const Complex k(parse_double(f[ire], n), parse_double(f[iim], n));
    const int mult = imult >= 0 ? static_cast<int>(parse_double(f[imult], n)) : 1;
    if (mult < 1) throw ConfigError("csv line " + std::to_string(n) + ": multiplicity below 1");
    for (int m = 0; m < mult; ++m) zeros.push_back(k);
  }
  return zeros;
}

std::string kernel_csv(const MarchenkoKernel& ker) {
  std::string s = "y,G,G0\n";
  for (std::size_t i = 0; i < ker.y.size(); ++i)
    s += format_double(ker.y[i]) + "," + format_double(ker.G[i]) + "," + format_double(ker.G0[i]) + "\n";
  return s;
}

std::string solution_csv(const MarchenkoSolution& sol) {
  std::string s = "x,A_diag,V_recovered,cond\n";
  for (std::size_t i = 0; i < sol.x_grid.size(); ++i)
    s += format_double(sol.x_grid[i]) + "," + format_double(sol.diag[i]) + "," + format_double(sol.V_recovered[i]) +
         "," + format_double(sol.condition_numbers[i]) + "\n";
  return s;
}

Json to_json(const ClassReport& r) {
  Json j;
  j["condition1"] = {{"passed", r.condition1},
                     {"unimodularity_residual", r.unimodularity_residual},
                     {"conjugate_residual", r.conjugate_residual},
                     {"inverse_residual", r.inverse_residual}};
  j["condition2"] = {{"decay_constant_low", r.decay_constant_low},
                     {"decay_constant_high", r.decay_constant_high},
                     {"decay_ok", r.condition2_decay}};
  j["condition3"] = {{"passed", r.condition3},
                     {"S0", complex_pair(r.S0)},
                     {"degenerate_S0", r.degenerate_S0},
                     {"increment", r.increment},
                     {"literal_rhs", r.literal_rhs},
                     {"literal_residual", r.literal_residual},
                     {"implied_N", r.implied_N},
                     {"N", r.N}};
  j["passed"] = r.passed();
  return j;
}

Json to_json(const InversionDiagnostics& d) {
  Json j;
  j["R"] = d.R;
  j["zeros_used"] = d.zeros_used;
  Json cal;
  cal["fit_window"] = {d.calibration.fit_lo, d.calibration.fit_hi};
  cal["residual_re"] = d.calibration.residual_re;
  cal["residual_im"] = d.calibration.residual_im;
  cal["probe_T"] = d.calibration.probe_T;
  cal["probe_residual"] = d.calibration.probe_residual;
  cal["f0"] = complex_pair(d.f0);
  cal["exp_coeff"] = complex_pair(d.exp_coeff);
  j["calibration"] = cal;
  j["eigen_class"] = {{"N", d.eigen_class.N},
                      {"max_real_part", d.eigen_class.max_real_part},
                      {"partner_values", d.eigen_class.partner_values},
                      {"on_axis", d.eigen_class.on_axis},
                      {"ordered", d.eigen_class.ordered},
                      {"signs", d.eigen_class.signs}};
  j["scattering_class"] = to_json(d.class_report);
  j["norming_constants"] = d.norming_constants;
  j["explicit_products"] = {{"m", d.explicit_check.m},
                            {"max_S_diff", d.explicit_check.max_S_diff},
                            {"literal_S_diff", d.explicit_check.literal_S_diff},
                            {"max_m_rel_diff", d.explicit_check.max_m_rel_diff}};
  j["kernel"] = {{"K_max", d.kernel_K_max}, {"decay_certificate", d.decay_certificate}, {"support_ok", d.support_ok}};
  j["marchenko"] = {{"max_condition", d.max_condition}, {"support_residual", d.support_residual}};
  j["h_recovered"] = d.h_recovered;
  return j;
}

Json scattering_manifest(const ScatteringData& d, const ClassReport& r) {
  Json j;
  Json kj = Json::array();
  for (Complex k : d.k_bound) kj.push_back(complex_pair(k));
  j["k_j"] = kj;
  j["m_j"] = d.m;
  j["N"] = d.N;
  j["tail_coeff"] = d.tail_coeff;
  j["class_validation"] = to_json(r);
  return j;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[i] = digits[h & 0xf];
  return s;
}

Json to_json(const Manifest& m) {
  Json j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  Json files = Json::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
  j["files"] = files;
  return j;
}

}  // namespace loveres::io
