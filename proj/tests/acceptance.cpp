// Runs every verification suite and prints one PASS/FAIL line per suite.
// With arguments, runs only the named suites. --verbose adds the per-check
// lines.

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "cantorlc/suites.hpp"

int main(int argc, char** argv) {
  bool verbose = false;
  std::vector<std::string> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--verbose") == 0)
      verbose = true;
    else
      ids.emplace_back(argv[i]);
  }
  if (ids.empty()) ids = cantorlc::suite_ids();

  int failed = 0;
  for (const auto& id : ids) {
    cantorlc::SuiteReport r;
    try {
      r = cantorlc::run_suite(id);
    } catch (const std::exception& e) {
      std::printf("FAIL %s: %s\n", id.c_str(), e.what());
      ++failed;
      continue;
    }
    if (verbose || !r.pass)
      for (const auto& l : r.lines)
        std::printf("    %s %s%s%s\n", l.pass ? "ok  " : "FAIL", l.check.c_str(), l.detail.empty() ? "" : ": ",
                    l.detail.c_str());
    std::printf("%s %s (%zu checks, %.2f s)\n", r.pass ? "PASS" : "FAIL", r.id.c_str(), r.lines.size(), r.seconds);
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
