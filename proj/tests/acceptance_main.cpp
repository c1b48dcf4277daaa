// One PASS/FAIL line per acceptance criterion 1-14; exits nonzero if any fails.
//
//   qkdv_acceptance [--jobs N] [--out DIR] [id ...]

#include <cstdlib>
#include <iostream>
#include <string>

#include "qkdv/acceptance.hpp"

int main(int argc, char** argv) {
  qkdv::AcceptanceOptions opts;
  std::string out;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--jobs" && i + 1 < argc) opts.jobs = std::stoul(argv[++i]);
    else if (a == "--out" && i + 1 < argc) out = argv[++i];
    else opts.only.push_back(std::stoi(a));
  }
  try {
    const qkdv::AcceptanceReport rep =
        qkdv::run_acceptance(opts, [](const qkdv::CriterionResult& r) { std::cout << qkdv::format_result_line(r) << std::endl; });
    if (!out.empty()) qkdv::write_acceptance_files(rep, out);
    std::size_t passed = 0;
    for (const auto& r : rep.criteria) passed += r.pass;
    std::cout << passed << "/" << rep.criteria.size() << " criteria passed" << std::endl;
    return rep.all_pass() ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "acceptance run aborted: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
}
