#include <doctest.h>

#include "audit.hpp"

TEST_CASE("oracle shares no code with the solver") {
  const auto bad = audit::oracle_independence(SOURCE_ROOT);
  for (const auto& v : bad) MESSAGE(v);
  CHECK(bad.empty());
}

TEST_CASE("audit catches a solver file that includes the oracle") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "bspeig_audit";
  fs::remove_all(root);
  fs::create_directories(root / "oracle" / "src");
  fs::create_directories(root / "src");
  std::ofstream(root / "oracle" / "CMakeLists.txt") << "add_library(o src/j.cpp)\n";
  std::ofstream(root / "oracle" / "src" / "j.cpp") << "#include <cmath>\n#include \"oracle/jacobi.hpp\"\n";
  std::ofstream(root / "CMakeLists.txt") << "";
  CHECK(audit::oracle_independence(root).empty());
  std::ofstream(root / "src" / "solver.cpp") << "#include \"oracle/jacobi.hpp\"\n";
  CHECK(audit::oracle_independence(root).size() == 1);
  std::ofstream(root / "oracle" / "src" / "k.cpp") << "#include \"bspeig/kernels.hpp\"\n";
  CHECK(audit::oracle_independence(root).size() == 2);
  fs::remove_all(root);
}
