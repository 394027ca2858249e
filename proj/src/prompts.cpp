#include "forge/prompts.hpp"

#include <cctype>
#include <filesystem>

#include "forge/util.hpp"

namespace forge {

PromptLibrary PromptLibrary::load(const std::string& dir) {
  PromptLibrary lib;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw PromptError("prompt directory not found: " + dir);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    lib.templates_[entry.path().stem().string()] = read_file(entry.path().string());
  }
  if (lib.templates_.empty()) throw PromptError("no *.txt templates in " + dir);
  return lib;
}

const std::string& PromptLibrary::raw(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw PromptError("unknown prompt template: " + name);
  return it->second;
}

std::string PromptLibrary::render(const std::string& name,
                                  const std::map<std::string, std::string>& vars) const {
  return render_template(raw(name), vars);
}

std::string PromptLibrary::content_hash() const {
  std::string acc;
  for (const auto& [name, content] : templates_) {
    acc += name;
    acc += '\x1f';
    acc += content;
    acc += '\x1e';
  }
  return short_hash(acc);
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      size_t close = text.find('}', i + 1);
      if (close != std::string::npos) {
        std::string key = text.substr(i + 1, close - i - 1);
        bool ident = !key.empty();
        for (char c : key)
          if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) ident = false;
        if (ident) {
          auto it = vars.find(key);
          if (it != vars.end()) {
            out += it->second;
            i = close + 1;
            continue;
          }
        }
      }
    }
    out += text[i];
    ++i;
  }
  return out;
}

}  // namespace forge
