#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loveres/inversion.hpp"
#include "loveres/marchenko.hpp"
#include "loveres/profile.hpp"
#include "loveres/resonances.hpp"
#include "loveres/scattering.hpp"

namespace loveres::io {

using Json = nlohmann::ordered_json;

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
Json read_json(const std::string& path);
std::string dump(const Json& j);  // two-space indent, trailing newline

// shortest representation that parses back to the same double
std::string format_double(double v);

Json to_json(const ShearProfile& p);
ShearProfile shear_from_json(const Json& j);
Json to_json(const PotentialProfile& V);
PotentialProfile potential_from_json(const Json& j);

// re_k,im_k,re_xi,im_xi,kind,residual,multiplicity. The xi columns are left
// empty when omega is unknown.
std::string resonance_csv(const ResonanceSet& set, std::optional<double> omega, double mu_tail);
// Only re_k, im_k and multiplicity are needed; other columns are ignored.
std::vector<Complex> zeros_from_csv(const std::string& text);

std::string kernel_csv(const MarchenkoKernel& ker);
std::string solution_csv(const MarchenkoSolution& sol);

Json to_json(const ClassReport& r);
Json to_json(const InversionDiagnostics& d);
Json scattering_manifest(const ScatteringData& d, const ClassReport& r);

uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t h);

struct ManifestEntry {
  std::string name;
  std::size_t bytes = 0;
  std::string fnv1a64;
};

struct Manifest {
  std::string tool = "loveres";
  std::string version;
  std::string command;
  std::string config_hash;
  std::vector<ManifestEntry> files;
};

Json to_json(const Manifest& m);

}  // namespace loveres::io
