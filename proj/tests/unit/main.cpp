#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "vmeme/util.hpp"

int main(int argc, char** argv) {
  vmeme::set_log_quiet(true);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
