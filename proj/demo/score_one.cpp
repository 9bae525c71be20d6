// Scores one architecture on synthetic images and prints its measures.
//   score_one ['|op~0|+|op~0|op~1|+|op~0|op~1|op~2|'] [inits]

#include <cstdio>
#include <string>

#include "nasgeom/nasgeom.hpp"

int main(int argc, char** argv) {
  using namespace nasgeom;
  const std::string arch =
      argc > 1 ? argv[1] : "|nor_conv_3x3~0|+|nor_conv_3x3~0|skip_connect~1|+|skip_connect~0|nor_conv_3x3~1|nor_conv_1x1~2|";
  ScoreConfig cfg;
  if (argc > 2) cfg.inits = std::stoi(argv[2]);
  const SyntheticImageSource images({3, 32, 32}, cfg.master_seed);

  const ArchScore score = score_architecture(arch, images, cfg);
  std::printf("%s\n", score.arch.c_str());
  for (const auto& [name, stat] : score.measures) {
    if (stat.has_value())
      std::printf("  %-9s %9.4f +- %.4f\n", name.c_str(), stat.mean, stat.std);
    else
      std::printf("  %-9s %9s  (%s)\n", name.c_str(), "-", stat.errors.empty() ? "" : stat.errors.front().c_str());
  }
  for (const auto& [rules, keep] : score.verdicts) std::printf("  %s: %s\n", rules.c_str(), keep ? "keep" : "drop");
}
