#include "loveres/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <random>

#include "loveres/errors.hpp"
#include "loveres/inversion.hpp"
#include "loveres/jost.hpp"
#include "loveres/marchenko.hpp"
#include "loveres/resonances.hpp"
#include "loveres/scattering.hpp"

namespace fs = std::filesystem;

namespace loveres::cli {

namespace {

const char* const kCommands[] = {"forward", "resonances", "invert", "recover-mu", "check"};

template <class T>
std::optional<T> opt(const io::Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  try {
    return j.at(key).get<T>();
  } catch (const io::Json::exception& e) {
    throw ConfigError(std::string("config field \"") + key + "\": " + e.what());
  }
}

std::string resolve(const RunConfig& c, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(c.base_dir) / p).string();
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// Collects outputs so the manifest can hash exactly what was written.
struct Writer {
  fs::path dir;
  io::Manifest manifest;
  std::vector<std::string> written;

  void put(const std::string& name, const std::string& content) {
    io::write_file((dir / name).string(), content);
    manifest.files.push_back({name, content.size(), io::hex64(io::fnv1a64(content))});
    written.push_back(name);
  }
  void finish() {
    const std::string m = io::dump(io::to_json(manifest));
    io::write_file((dir / "manifest.json").string(), m);
    written.push_back("manifest.json");
  }
};

PotentialProfile load_potential(const RunConfig& c) {
  if (!c.potential.empty()) {
    PotentialProfile V = io::potential_from_json(io::read_json(resolve(c, c.potential)));
    validate(V);
    return V;
  }
  require(!c.profile.empty(), "command needs \"potential\" or \"profile\"");
  require(c.omega.has_value(), "\"profile\" input needs \"omega\"");
  ShearProfile p = io::shear_from_json(io::read_json(resolve(c, c.profile)));
  return calibrate(p, *c.omega, c.grid_intervals);
}

double mu_tail_of(const RunConfig& c) {
  if (c.mu_tail) return *c.mu_tail;
  if (!c.profile.empty()) return io::shear_from_json(io::read_json(resolve(c, c.profile))).mu_tail;
  return 1.0;
}

Rectangle default_region(const RunConfig& c, const PotentialProfile& V) {
  const double r = c.radius > 0.0 ? c.radius : 30.0 / V.x_I;
  return {-r, r, -8.0 / V.x_I, eigenvalue_search_height(V, V.h)};
}

// Zeros in the region; eigenvalues snapped to the sign-change scan on i R_+,
// which places them exactly on the axis.
ResonanceSet zeros_of(const RunConfig& c, std::shared_ptr<const JostSolver> js) {
  const PotentialProfile& V = js->potential();
  const Rectangle region = c.region ? *c.region : default_region(c, V);
  FinderOptions fo;
  fo.workers = c.workers;
  ResonanceSet set = find_zeros(jost_evaluator(js), jost_derivative_evaluator(js), region, c.tol, fo);
  const std::vector<Complex> scan = eigenvalues(*js, V.h);
  for (Zero& z : set.eigenvalues)
    for (Complex s : scan)
      if (std::abs(z.k - s) <= 1e-6 * (1.0 + std::abs(s))) {
        z.k = s;
        z.residual = std::abs(js->fh(s));
      }
  return set;
}

io::Json resonance_manifest(const RunConfig& c, const ResonanceSet& set, const PotentialProfile& V) {
  io::Json j;
  const Rectangle& r = set.search_region;
  j["region"] = {{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max}};
  j["tol"] = c.tol;
  j["argument_principle_count"] = set.region_count;
  j["found"] = set.total_multiplicity();
  j["complete"] = set.complete();
  j["unresolved_boxes"] = set.unresolved.size();
  const double omega = V.omega.value_or(c.omega.value_or(1.0));
  const ForbiddenReport f = forbidden_domain_xi(set, omega, mu_tail_of(c), V, V.h);
  const double inf = std::numeric_limits<double>::infinity();
  auto finite = [&](double v) { return v == inf ? io::Json(nullptr) : io::Json(v); };
  j["slack"] = {{"C0", f.C0},
                {"min_slack_k", finite(f.min_c0_slack_k)},
                {"min_slack_xi", finite(f.min_c0_slack_xi)},
                {"violations", f.c0_violations},
                {"second_order_violations", f.c1_violations},
                {"xi_omega", omega}};
  const double rr = std::min({-r.re_min, r.re_max, -r.im_min});
  const LevinsonReport lv = levinson_statistics(set.all_zeros(), rr, V.x_I, 0.2);
  j["levinson"] = {{"r", rr}, {"count", lv.count_in_disk}, {"ratio", lv.ratio}, {"outside_fraction", lv.outside_fraction}};
  return j;
}

void cmd_resonances(const RunConfig& c, Writer& w, bool full) {
  const PotentialProfile V = load_potential(c);
  auto js = std::make_shared<const JostSolver>(V);
  const ResonanceSet set = zeros_of(c, js);
  std::optional<double> omega = V.omega;
  if (!omega) omega = c.omega;
  w.put("resonances.csv", io::resonance_csv(set, omega, mu_tail_of(c)));
  w.put("resonances.json", io::dump(resonance_manifest(c, set, V)));
  if (!full) return;

  w.put("potential.json", io::dump(io::to_json(V)));
  const ScatteringData data = forward_scattering_data(js);
  const ClassReport rep = validate_scattering_class(data);
  w.put("scattering.json", io::dump(io::scattering_manifest(data, rep)));
  KernelOptions ko;
  ko.x_I = V.x_I;
  ko.K_max = c.kernel_K_max;
  ko.points_per_xI = c.kernel_points;
  const MarchenkoKernel ker = build_G0(data, ko);
  w.put("kernel.csv", io::kernel_csv(ker));
  MarchenkoOptions mo;
  mo.workers = c.workers;
  w.put("solution.csv", io::solution_csv(solve_marchenko_all(ker, mo)));
}

void cmd_invert(const RunConfig& c, Writer& w) {
  require(!c.zeros.empty(), "invert needs \"zeros\" (resonance csv)");
  require(c.x_I.has_value() && *c.x_I > 0.0, "invert needs a positive \"x_I\"");
  const std::vector<Complex> zeros = io::zeros_from_csv(io::read_file(resolve(c, c.zeros)));
  InvertOptions o;
  o.R = c.radius;
  o.kernel.K_max = c.kernel_K_max;
  o.kernel.points_per_xI = c.kernel_points;
  o.marchenko.workers = c.workers;
  const InversionResult r = invert(zeros, *c.x_I, o);
  w.put("potential.json", io::dump(io::to_json(r.V)));
  w.put("diagnostics.json", io::dump(io::to_json(r.diagnostics)));
  w.put("scattering.json", io::dump(io::scattering_manifest(r.data, r.diagnostics.class_report)));
  w.put("kernel.csv", io::kernel_csv(r.kernel));
  w.put("solution.csv", io::solution_csv(r.solution));
}

void cmd_recover_mu(const RunConfig& c, Writer& w) {
  require(!c.potential1.empty() && !c.potential2.empty(), "recover-mu needs \"potential1\" and \"potential2\"");
  const PotentialProfile V1 = io::potential_from_json(io::read_json(resolve(c, c.potential1)));
  const PotentialProfile V2 = io::potential_from_json(io::read_json(resolve(c, c.potential2)));
  const std::optional<double> w1 = c.omega1 ? c.omega1 : V1.omega, w2 = c.omega2 ? c.omega2 : V2.omega;
  require(w1 && w2, "recover-mu needs omega1 and omega2 (config or potential files)");
  require(c.mu_tail.has_value(), "recover-mu needs \"mu_tail\"");
  const ShearProfile mu = recover_shear(V1, V2, *w1, *w2, *c.mu_tail);
  w.put("shear.json", io::dump(io::to_json(mu)));
}

// Randomized invariant checks on one potential; failures are collected and
// reported after the report is written.
void cmd_check(const RunConfig& c, Writer& w) {
  const PotentialProfile V = load_potential(c);
  auto js = std::make_shared<const JostSolver>(V);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> re(-50.0, 50.0), im(-5.0, 5.0);
  const double tol = c.doc.value("check_tol", 1e-9);
  require(tol > 0.0, "check_tol must be positive");

  io::Json j;
  double wr = 0.0, sym = 0.0, min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < c.check_samples; ++s) {
    double k = re(rng);
    if (k == 0.0) k = 1.0;
    wr = std::max({wr, js->wronskian_residual(k, 0.0), js->wronskian_residual(k, 0.5 * V.x_I)});
    const Complex z(re(rng), im(rng));
    const Complex f = js->fh(z);
    sym = std::max(sym, std::abs(js->fh(-std::conj(z)) - std::conj(f)) / (1.0 + std::abs(f)));
    const BoundReport b = bound_check(*js, V.h, z);
    min_slack = std::min({min_slack, b.slack1(), b.slack2()});
  }
  j["seed"] = c.seed;
  j["samples"] = c.check_samples;
  j["wronskian_residual"] = wr;
  j["symmetry_residual"] = sym;
  j["bound_min_slack"] = min_slack;

  const ScatteringData data = forward_scattering_data(js);
  const auto nc = norming_constants_detail(*js, V.h, data.k_bound);
  bool ladder = true;
  io::Json rows = io::Json::array();
  for (std::size_t i = 0; i < nc.size(); ++i) {
    ladder = ladder && nc[i].derivative_sign > 0.0 && nc[i].partner_sign < 0.0;
    rows.push_back({{"kappa", data.k_bound[i].imag()},
                    {"m_ratio", nc[i].ratio},
                    {"m_integral", nc[i].integral},
                    {"derivative_sign", nc[i].derivative_sign},
                    {"partner_sign", nc[i].partner_sign}});
  }
  j["eigenvalues"] = rows;
  j["sign_ladder"] = ladder;
  const ClassReport rep = validate_scattering_class(data);
  j["scattering_class"] = io::to_json(rep);
  w.put("check.json", io::dump(j));

  if (!rep.passed() || !ladder) throw ClassViolationError("check: scattering data outside the class");
  if (!(wr < tol)) throw InconsistencyError("check: Wronskian residual " + io::format_double(wr));
  if (!(sym < tol)) throw InconsistencyError("check: symmetry residual " + io::format_double(sym));
  if (!(min_slack >= 0.0)) throw InconsistencyError("check: Jost bound violated, slack " + io::format_double(min_slack));
}

}  // namespace

RunConfig parse_config(const io::Json& doc, const std::string& base_dir) {
  require(doc.is_object(), "config must be a JSON object");
  RunConfig c;
  c.doc = doc;
  c.base_dir = base_dir;
  c.command = opt<std::string>(doc, "command").value_or("");
  bool known = false;
  for (const char* k : kCommands) known = known || c.command == k;
  require(known, "unknown command '" + c.command + "'");
  c.out_dir = opt<std::string>(doc, "out").value_or("out");
  c.potential = opt<std::string>(doc, "potential").value_or("");
  c.profile = opt<std::string>(doc, "profile").value_or("");
  c.zeros = opt<std::string>(doc, "zeros").value_or("");
  c.potential1 = opt<std::string>(doc, "potential1").value_or("");
  c.potential2 = opt<std::string>(doc, "potential2").value_or("");
  c.omega = opt<double>(doc, "omega");
  c.omega1 = opt<double>(doc, "omega1");
  c.omega2 = opt<double>(doc, "omega2");
  c.mu_tail = opt<double>(doc, "mu_tail");
  c.x_I = opt<double>(doc, "x_I");
  c.grid_intervals = opt<int>(doc, "grid_intervals").value_or(2048);
  c.tol = opt<double>(doc, "tol").value_or(1e-10);
  c.radius = opt<double>(doc, "radius").value_or(0.0);
  c.check_samples = opt<int>(doc, "check_samples").value_or(100);
  c.workers = opt<unsigned>(doc, "workers").value_or(0);
  c.seed = opt<uint64_t>(doc, "seed").value_or(1);
  if (doc.contains("kernel")) {
    const io::Json& k = doc.at("kernel");
    c.kernel_K_max = opt<double>(k, "K_max").value_or(0.0);
    c.kernel_points = opt<int>(k, "points_per_xI").value_or(256);
  }
  if (doc.contains("region")) {
    const io::Json& r = doc.at("region");
    Rectangle rect;
    auto field = [&](const char* name) {
      auto v = opt<double>(r, name);
      require(v.has_value(), std::string("region needs \"") + name + "\"");
      return *v;
    };
    rect.re_min = field("re_min");
    rect.re_max = field("re_max");
    rect.im_min = field("im_min");
    rect.im_max = field("im_max");
    require(rect.re_min < rect.re_max && rect.im_min < rect.im_max, "region must have min < max on both axes");
    c.region = rect;
  }
  require(c.tol > 0.0, "tol must be positive");
  require(c.radius >= 0.0, "radius must be non-negative");
  require(c.grid_intervals >= 4, "grid_intervals must be at least 4");
  require(c.kernel_points >= 4, "kernel.points_per_xI must be at least 4");
  require(c.check_samples > 0, "check_samples must be positive");
  for (auto v : {c.omega, c.omega1, c.omega2, c.mu_tail, c.x_I})
    require(!v || *v > 0.0, "frequencies, mu_tail and x_I must be positive");
  return c;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ClassViolationError*>(&e) || dynamic_cast<const SymmetryError*>(&e)) return kClassViolation;
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const InvariantError*>(&e))
    return kConfigError;
  return kNumericalFailure;
}

RunResult run(const RunConfig& c) {
  RunResult out;
  Writer w;
  w.dir = c.out_dir;
  w.manifest.version = kVersion;
  w.manifest.command = c.command;
  w.manifest.config_hash = io::hex64(io::fnv1a64(c.doc.dump()));
  try {
    fs::create_directories(w.dir);
    if (c.command == "forward") {
      cmd_resonances(c, w, true);
    } else if (c.command == "resonances") {
      cmd_resonances(c, w, false);
    } else if (c.command == "invert") {
      cmd_invert(c, w);
    } else if (c.command == "recover-mu") {
      cmd_recover_mu(c, w);
    } else if (c.command == "check") {
      cmd_check(c, w);
    } else {
      throw ConfigError("unknown command '" + c.command + "'");
    }
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e);
    out.stage = e.stage().empty() ? c.command : e.stage();
    out.message = e.what();
  } catch (const fs::filesystem_error& e) {
    out.exit_code = kConfigError;
    out.stage = "io";
    out.message = e.what();
  } catch (const std::exception& e) {
    out.exit_code = kNumericalFailure;
    out.stage = c.command;
    out.message = e.what();
  }
  // partial outputs still get a manifest, so a failed run is self-describing
  try {
    if (!w.manifest.files.empty() || out.exit_code == kOk) w.finish();
  } catch (const std::exception& e) {
    if (out.exit_code == kOk) {
      out.exit_code = kConfigError;
      out.stage = "io";
      out.message = e.what();
    }
  }
  out.files = w.written;
  return out;
}

}  // namespace loveres::cli
