#pragma once
// Versioned prompt templates. Templates are plain text files with {name}
// placeholders; only placeholders whose value is supplied get substituted, so
// literal braces (e.g. JSON examples inside a prompt) pass through untouched.
// The library hash feeds the run config hash: editing a template changes it.

#include <map>
#include <stdexcept>
#include <string>

namespace forge {

class PromptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PromptLibrary {
 public:
  static PromptLibrary load(const std::string& dir);  // reads every *.txt

  bool has(const std::string& name) const { return templates_.count(name) > 0; }
  const std::string& raw(const std::string& name) const;
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& vars) const;

  // Hash over sorted (name, content) pairs.
  std::string content_hash() const;

 private:
  std::map<std::string, std::string> templates_;  // file stem -> content
};

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& vars);

}  // namespace forge
