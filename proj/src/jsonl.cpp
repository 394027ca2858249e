#include "forge/jsonl.hpp"

#include <filesystem>
#include <fstream>

#include "forge/util.hpp"

namespace forge {

namespace {

std::string checksum_of(const Json& record) { return short_hash(record.dump()); }

}  // namespace

void store_append(const std::string& path, const std::vector<Json>& records) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw StoreError("cannot open store for append: " + path);
  for (const Json& rec : records) {
    Json body = rec;
    body.erase("_checksum");
    std::string sum = checksum_of(body);
    body["_checksum"] = sum;
    out << body.dump() << "\n";
  }
  if (!out) throw StoreError("write failed: " + path);
}

void store_append(const std::string& path, const Json& record) {
  store_append(path, std::vector<Json>{record});
}

std::vector<Json> store_scan(const std::string& path) {
  std::vector<Json> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    Json rec = Json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object())
      throw StoreError("corrupt store line in " + path, lineno);
    if (!rec.contains("_checksum") || !rec["_checksum"].is_string())
      throw StoreError("store line missing checksum in " + path, lineno);
    std::string expected = rec["_checksum"].get<std::string>();
    rec.erase("_checksum");
    if (checksum_of(rec) != expected)
      throw StoreError("store line checksum mismatch in " + path, lineno);
    out.push_back(std::move(rec));
  }
  return out;
}

std::string store_version(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return "absent:0";
  std::string content = read_file(path);
  size_t count = 0;
  for (char c : content)
    if (c == '\n') ++count;
  return short_hash(content) + ":" + std::to_string(count);
}

}  // namespace forge
