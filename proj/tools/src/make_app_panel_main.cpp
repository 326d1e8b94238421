// Regenerates the bundled synthetic application panel committed under
// data/. The seed is fixed in app_panel.hpp, so output is byte-stable.

#include <fstream>
#include <iostream>
#include <string>

#include "app_panel.hpp"

int main(int argc, char** argv) {
  std::string out_path = "application_panel.csv";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--out" && i + 1 < argc) {
      out_path = argv[++i];
    } else {
      std::cerr << "usage: policybound-make-app-panel [--out PATH]\n";
      return 1;
    }
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) {
    std::cerr << "error: cannot open '" << out_path << "' for writing\n";
    return 2;
  }
  out << policybound::build_application_panel().to_csv();
  return out ? 0 : 2;
}
