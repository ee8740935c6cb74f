// Generates synthetic mocap CSVs (sinusoidal joint angles plus a slow
// constant global motion) so the pipeline can be tried without capture data.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erd/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic mocap data generator"};
  std::size_t sequences = 4, joints = 6, frames = 500;
  double rate = 25.0;
  std::uint64_t seed = 0;
  std::string out_dir = "data";
  app.add_option("--sequences", sequences, "number of sequences");
  app.add_option("--joints", joints, "joints per skeleton");
  app.add_option("--frames", frames, "frames per sequence");
  app.add_option("--rate", rate, "frame rate (Hz)");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", out_dir, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    erd::RandomStream rng = erd::RandomStream::derive(seed, erd::stream::data);
    for (std::size_t s = 0; s < sequences; ++s) {
      erd::MocapSequence seq =
          erd::make_synthetic_mocap(joints, frames, rate, rng);
      char name[32];
      std::snprintf(name, sizeof name, "seq%03zu.csv", s);
      const std::string path =
          (std::filesystem::path(out_dir) / name).string();
      erd::write_mocap(seq, path);
      std::cout << path << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
