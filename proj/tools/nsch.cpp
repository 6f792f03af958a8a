#include <cstdio>
#include <exception>

#include "nsch/app.hpp"

int main(int argc, char** argv) {
  try {
    nsch::ensure_working_blas(argv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return nsch::cli_main(argc, argv);
}
