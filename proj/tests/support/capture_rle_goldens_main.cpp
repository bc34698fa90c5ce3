// One-shot capture tool: writes the RLE golden file from the reference
// coder. Run once before the production codec was written; kept so the
// goldens can be audited or regenerated.
//
//   capture_rle_goldens <output-file>
//
// File format: first line "seed <seed> cases <n>", then one line per case
// "<index> <height> <width> <string>". The mask for each case is
// random_mask(seed, index) from mask_gen.hpp. An empty string is written
// as the placeholder "-" (cannot occur: every mask emits at least one run).
#include <fstream>
#include <iostream>

#include "mask_gen.hpp"
#include "reference_rle.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: capture_rle_goldens <output-file>\n";
    return 1;
  }
  const std::uint64_t seed = 20240917;
  const int cases = 1000;
  std::ofstream out(argv[1]);
  if (!out) {
    std::cerr << "cannot open " << argv[1] << "\n";
    return 1;
  }
  out << "seed " << seed << " cases " << cases << "\n";
  for (int i = 0; i < cases; ++i) {
    auto m = vegtrack::test::random_mask(seed, i);
    std::string s = vegtrack::test::ref_encode(m);
    // sanity: reference decode must invert reference encode
    auto back = vegtrack::test::ref_decode(s, m.height, m.width);
    if (back.pixels != m.pixels) {
      std::cerr << "reference coder self-check failed at case " << i << "\n";
      return 2;
    }
    out << i << " " << m.height << " " << m.width << " "
        << (s.empty() ? std::string("-") : s) << "\n";
  }
  std::cout << "wrote " << cases << " golden cases\n";
  return 0;
}
