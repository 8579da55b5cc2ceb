// SPDX-License-Identifier: Apache-2.0

#include "crbmo/combiner_io.hpp"

#include <sstream>
#include <stdexcept>

#include "crbmo/text_io.hpp"

namespace crbmo {

namespace {
constexpr const char* kFormatTag = "crbmo-combiner-v1";
constexpr const char* kPhasesMarker = "phases";
}  // namespace

std::string serialize_combiner(const UpaGeometry& geom, const CombinerSet& combiners) {
  const auto& lay = combiners.layout();
  if (geom.n_bs() != lay.n_bs)
    throw std::invalid_argument("serialize_combiner: geometry/layout mismatch");
  std::ostringstream out;
  out << "# partially-connected analog combiner (unit-modulus phases, radians)\n";
  out << "format = " << kFormatTag << "\n";
  out << "p_rows = " << geom.p_rows << "\n";
  out << "q_cols = " << geom.q_cols << "\n";
  out << "n_rf = " << lay.n_rf << "\n";
  out << "n_snapshots = " << lay.n_snapshots << "\n";
  out << "layout = block_diagonal\n";
  out << kPhasesMarker << "\n";
  const int b = lay.block_size();
  for (int n = 0; n < lay.n_snapshots; ++n) {
    out << "# snapshot " << n << "\n";
    for (int i = 0; i < lay.n_bs; ++i) {
      out << format_g17(combiners.phases()(i, n));
      out << ((i + 1) % b == 0 ? "\n" : " ");
    }
  }
  return out.str();
}

void save_combiner(const std::string& path, const UpaGeometry& geom,
                   const CombinerSet& combiners) {
  write_text_file(path, serialize_combiner(geom, combiners));
}

LoadedCombiner parse_combiner(const std::string& text, const std::string& source_name) {
  std::istringstream in(text);
  std::string line;
  std::string header;
  int lineno = 0;
  bool found_marker = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string stripped = line.substr(0, line.find('#'));
    stripped.erase(0, stripped.find_first_not_of(" \t\r\n"));
    stripped.erase(stripped.find_last_not_of(" \t\r\n") + 1);
    if (stripped == kPhasesMarker) {
      found_marker = true;
      break;
    }
    header += line + "\n";
  }
  if (!found_marker)
    throw std::runtime_error(source_name + ": missing '" + kPhasesMarker + "' section");

  KvReader kv(parse_kv_text(header, source_name), source_name);
  if (kv.get_string("format") != kFormatTag)
    throw std::runtime_error(source_name + ": unsupported format tag");
  if (kv.get_string("layout") != "block_diagonal")
    throw std::runtime_error(source_name + ": unsupported layout descriptor");

  LoadedCombiner out;
  out.geom.p_rows = static_cast<int>(kv.get_int("p_rows"));
  out.geom.q_cols = static_cast<int>(kv.get_int("q_cols"));
  CombinerLayout lay;
  lay.n_bs = out.geom.n_bs();
  lay.n_rf = static_cast<int>(kv.get_int("n_rf"));
  lay.n_snapshots = static_cast<int>(kv.get_int("n_snapshots"));
  lay.validate();
  if (!out.geom.valid()) throw std::runtime_error(source_name + ": invalid geometry");

  MatrixXd phases(lay.n_bs, lay.n_snapshots);
  int count = 0;
  const int total = lay.n_bs * lay.n_snapshots;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      if (count >= total)
        throw std::runtime_error(source_name + ":" + std::to_string(lineno) +
                                 ": more phase values than expected");
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size())
        throw std::runtime_error(source_name + ":" + std::to_string(lineno) +
                                 ": bad phase value '" + tok + "'");
      phases(count % lay.n_bs, count / lay.n_bs) = v;
      ++count;
    }
  }
  if (count != total)
    throw std::runtime_error(source_name + ": expected " + std::to_string(total) +
                             " phase values, found " + std::to_string(count));
  out.combiners = CombinerSet::from_phases(lay, phases);
  return out;
}

LoadedCombiner load_combiner(const std::string& path) {
  return parse_combiner(read_text_file(path), path);
}

}  // namespace crbmo
