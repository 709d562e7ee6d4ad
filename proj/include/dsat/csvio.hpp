#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsat/control.hpp"
#include "dsat/simulate.hpp"

namespace dsat {

// Shortest round-trip decimal form of a double, so output files are
// byte-identical across runs and platforms with the same inputs.
std::string format_double(double v);

// FNV-1a 64-bit hash, hex-encoded; stamps configs into run manifests.
std::string fnv1a_hex(const std::string& data);

// Simulation trace as CSV: time, plant states (angles in degrees),
// compensator states, applied actuation, and the dn input fed in.
// Columns: t,p,q,r,phi_s_deg,theta_s_deg,psi_s_deg,xc_1..xc_m,
// de_applied,dn_applied.
void write_result_csv(const SimulationResult& result,
                      const std::string& path);

// Root locus as CSV (gain,re_1,im_1,...,re_n,im_n) plus a JSON sidecar
// with the critical gains and breakaway points.
void write_locus_csv(const LocusData& locus, const std::string& path);
nlohmann::json locus_annotations(const LocusData& locus);

// Run manifest: tool version, the exact command, config provenance, and a
// seed-free determinism stamp (hash of the effective config).
struct RunManifest {
  std::string command;
  std::vector<std::string> config_paths;
  std::string out_dir;
  std::string config_hash;
  std::vector<std::string> outputs;
};

nlohmann::json manifest_to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

extern const char* const kToolVersion;

}  // namespace dsat
