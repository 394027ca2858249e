#pragma once
// Checksummed JSONL persistence. Each line is one record object carrying a
// "_checksum" field computed over the record without it, so truncated or
// hand-mangled lines are caught on scan.

#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace forge {

using Json = nlohmann::json;

class StoreError : public std::runtime_error {
 public:
  StoreError(const std::string& msg, size_t line = 0)
      : std::runtime_error(line ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_(line) {}
  size_t line() const { return line_; }

 private:
  size_t line_;
};

void store_append(const std::string& path, const std::vector<Json>& records);
void store_append(const std::string& path, const Json& record);

// Missing file scans as empty; a corrupt or truncated line throws StoreError
// naming the line number.
std::vector<Json> store_scan(const std::string& path);

// Content fingerprint for run manifests: "<short-hash>:<record-count>".
std::string store_version(const std::string& path);

}  // namespace forge
