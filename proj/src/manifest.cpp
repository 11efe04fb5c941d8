#include "galton/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "galton/errors.hpp"

namespace galton {

std::uint64_t fnv1a_hash(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fnv1a_hex(std::string_view data) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a_hash(data)));
  return buf;
}

ManifestBuilder::ManifestBuilder(std::string command) {
  doc_["tool"] = kToolName;
  doc_["version"] = kToolVersion;
  doc_["command"] = std::move(command);
  doc_["seed"] = nullptr;
  doc_["parameters"] = nlohmann::json::object();
  doc_["inputs"] = nlohmann::json::array();
  doc_["outputs"] = nlohmann::json::array();
}

void ManifestBuilder::set_seed(std::uint64_t seed) { doc_["seed"] = seed; }

void ManifestBuilder::set_parameters(nlohmann::json params) {
  doc_["parameters"] = std::move(params);
}

void ManifestBuilder::add_input(const std::string& name,
                                std::string_view content) {
  doc_["inputs"].push_back({{"name", name},
                            {"fnv1a", fnv1a_hex(content)},
                            {"bytes", content.size()}});
}

void ManifestBuilder::add_input_file(const std::string& name,
                                     const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "' for hashing");
  std::ostringstream ss;
  ss << is.rdbuf();
  add_input(name, ss.str());
}

void ManifestBuilder::add_output(const std::string& name,
                                 std::string_view content) {
  doc_["outputs"].push_back({{"name", name},
                             {"fnv1a", fnv1a_hex(content)},
                             {"bytes", content.size()}});
}

nlohmann::json ManifestBuilder::build() const { return doc_; }

std::string ManifestBuilder::to_string() const {
  return doc_.dump(2) + "\n";
}

}  // namespace galton
