#include "dsat/csvio.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace dsat {

const char* const kToolVersion = "dsat 1.0.0";

std::string format_double(double v) {
  char buf[32];
  const std::to_chars_result res =
      std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) {
    throw std::runtime_error("number formatting failed");
  }
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[15 - i] = hex[(h >> (4 * i)) & 0xf];
  }
  buf[16] = '\0';
  return std::string(buf);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path);
  }
  return out;
}

constexpr double kDegPerRad = 180.0 / 3.14159265358979323846;

}  // namespace

void write_result_csv(const SimulationResult& result,
                      const std::string& path) {
  std::ofstream out = open_out(path);
  const int n_comp = result.closed.size() - kNumStates;
  out << "t,p,q,r,phi_s_deg,theta_s_deg,psi_s_deg";
  for (int c = 0; c < n_comp; ++c) out << ",xc_" << c + 1;
  out << ",de_applied,dn_applied\n";
  for (int i = 0; i < result.samples(); ++i) {
    out << format_double(result.t[i]);
    for (int c = 0; c < kNumStates; ++c) {
      const bool angle = c >= kPhiS;
      out << ',' << format_double(angle ? result.X(i, c) * kDegPerRad
                                        : result.X(i, c));
    }
    for (int c = 0; c < n_comp; ++c) {
      out << ',' << format_double(result.X(i, kNumStates + c));
    }
    out << ',' << format_double(result.de_applied[i]) << ','
        << format_double(result.dn_applied[i]) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

void write_locus_csv(const LocusData& locus, const std::string& path) {
  std::ofstream out = open_out(path);
  const size_t nb = locus.branches.size();
  out << "gain";
  for (size_t b = 1; b <= nb; ++b) out << ",re_" << b << ",im_" << b;
  out << '\n';
  for (size_t g = 0; g < locus.gains.size(); ++g) {
    out << format_double(locus.gains[g]);
    for (size_t b = 0; b < nb; ++b) {
      out << ',' << format_double(locus.branches[b][g].real()) << ','
          << format_double(locus.branches[b][g].imag());
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

nlohmann::json locus_annotations(const LocusData& locus) {
  nlohmann::json critical = nlohmann::json::array();
  for (const CriticalGain& c : find_critical_gains(locus)) {
    critical.push_back({{"K", c.K},
                        {"re", c.s.real()},
                        {"im", c.s.imag()}});
  }
  nlohmann::json breakaway = nlohmann::json::array();
  for (const BreakawayPoint& b : find_breakaway(locus)) {
    breakaway.push_back({{"K", b.K}, {"s", b.s}});
  }
  return {{"critical_gains", critical}, {"breakaway", breakaway}};
}

nlohmann::json manifest_to_json(const RunManifest& manifest) {
  return {{"version", kToolVersion},
          {"command", manifest.command},
          {"config_paths", manifest.config_paths},
          {"out_dir", manifest.out_dir},
          {"config_hash", manifest.config_hash},
          {"outputs", manifest.outputs}};
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out = open_out(path);
  out << manifest_to_json(manifest).dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

}  // namespace dsat
