// Copyright 2026 The genmetrics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <jpeglib.h>
#include <json.hpp>
#include <png.h>

#include "genmetrics/csv.hpp"
#include "genmetrics/error.hpp"

namespace genmetrics::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

inline std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorCode::kIoFailure, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct InputDigest {
  std::string path;
  std::size_t bytes = 0;
  std::string sha256;
};

// Tracks every file a subcommand reads, keyed by the path as configured.
class InputLog {
 public:
  void Add(const std::string& path) {
    for (const auto& d : digests_) {
      if (d.path == path) return;
    }
    const std::string content = ReadTextFile(path);
    digests_.push_back({path, content.size(), Sha256Hex(content)});
  }
  const std::vector<InputDigest>& digests() const { return digests_; }

 private:
  std::vector<InputDigest> digests_;
};

inline nlohmann::ordered_json LibraryVersions() {
  return {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"libpng", PNG_LIBPNG_VER_STRING},
          {"libjpeg", std::to_string(JPEG_LIB_VERSION)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

// Config hash uses the canonical (key-sorted) dump of the effective config.
inline nlohmann::ordered_json RunRecord(std::string_view subcommand,
                                        const nlohmann::json& canonical_config,
                                        const InputLog& inputs,
                                        const std::vector<std::string>& outputs) {
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& d : inputs.digests()) {
    files.push_back({{"path", d.path}, {"bytes", d.bytes}, {"sha256", d.sha256}});
  }
  const std::string config_text = canonical_config.dump();
  return {{"tool", "genmetrics"},
          {"version", kToolVersion},
          {"subcommand", subcommand},
          {"config_sha256", Sha256Hex(config_text)},
          {"config", nlohmann::ordered_json::parse(config_text)},
          {"inputs", files},
          {"outputs", outputs},
          {"libraries", LibraryVersions()}};
}

}  // namespace genmetrics::cli
