#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace galton {

inline constexpr const char* kToolName = "galton-dnp";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit content hash (stable across platforms, no dependencies).
std::uint64_t fnv1a_hash(std::string_view data);
std::string fnv1a_hex(std::string_view data);

// Reproducibility sidecar for every CLI run: tool identity, subcommand,
// parameters, seed, and content hashes of inputs and outputs.  Contains no
// timestamps or host details, so reruns produce identical manifests.
class ManifestBuilder {
 public:
  explicit ManifestBuilder(std::string command);

  void set_seed(std::uint64_t seed);
  void set_parameters(nlohmann::json params);
  void add_input(const std::string& name, std::string_view content);
  void add_input_file(const std::string& name, const std::string& path);
  void add_output(const std::string& name, std::string_view content);

  nlohmann::json build() const;
  std::string to_string() const;  // pretty JSON, trailing newline

 private:
  nlohmann::json doc_;
};

}  // namespace galton
