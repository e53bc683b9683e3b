#pragma once

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

namespace audit {

namespace fs = std::filesystem;

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::string> includes_of(const fs::path& p) {
  static const std::regex inc(R"(^\s*#\s*include\s*[<"]([^>"]+)[>"])");
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  std::smatch m;
  while (std::getline(in, line))
    if (std::regex_search(line, m, inc)) out.push_back(m[1]);
  return out;
}

inline std::vector<fs::path> sources_under(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (ext == ".cpp" || ext == ".hpp" || ext == ".h") out.push_back(e.path());
  }
  return out;
}

// Violations of the rule that the reference oracle and the solver share no code.
// Empty means the audit passed.
inline std::vector<std::string> oracle_independence(const fs::path& root) {
  std::vector<std::string> bad;
  const auto oracle_files = sources_under(root / "oracle");
  if (oracle_files.empty()) bad.push_back("no oracle sources found under " + (root / "oracle").string());
  for (const auto& f : oracle_files)
    for (const std::string& inc : includes_of(f))
      if (inc.find('/') != std::string::npos && inc.rfind("oracle/", 0) != 0)
        bad.push_back(f.string() + " includes " + inc);
  if (slurp(root / "oracle" / "CMakeLists.txt").find("target_link_libraries") != std::string::npos)
    bad.push_back("oracle/CMakeLists.txt links other targets");

  std::vector<fs::path> solver = sources_under(root / "include" / "bspeig");
  for (const auto& f : sources_under(root / "src"))
    if (f.parent_path().filename() != "harness") solver.push_back(f);
  for (const auto& f : solver) {
    if (f.parent_path().filename() == "harness") continue;
    for (const std::string& inc : includes_of(f))
      if (inc.rfind("oracle/", 0) == 0) bad.push_back(f.string() + " includes " + inc);
  }

  static const std::regex link(R"(target_link_libraries\s*\(\s*bspeig\s[^)]*bspeig_oracle)");
  if (std::regex_search(slurp(root / "CMakeLists.txt"), link)) bad.push_back("bspeig links bspeig_oracle");
  return bad;
}

}  // namespace audit
