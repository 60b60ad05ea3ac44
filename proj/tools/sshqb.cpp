#include <cstdio>
#include <string>
#include <vector>

#include "sshqb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  sshqb::RunConfig cfg;
  try {
    cfg = sshqb::parse_config(args);
  } catch (const sshqb::HelpRequested& help) {
    std::fputs(help.what(), stdout);
    return 0;
  } catch (const sshqb::Error& e) {
    std::fprintf(stderr, "sshqb: %s\n", e.what());
    return 2;
  }
  return sshqb::run(cfg);
}
