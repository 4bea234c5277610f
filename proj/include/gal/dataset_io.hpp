#pragma once
// Dataset container: a directory with edges.csv, features.csv, labels.csv and
// meta.json declaring n, d, C.

#include <filesystem>

#include "gal/graph.hpp"

namespace gal {

// Throws ParseError (malformed record, names the file and line) or
// ValidationError (counts/ranges disagree with meta.json).
Graph load_dataset(const std::filesystem::path& dir);

// Writes the container for g; creates dir if needed.
void save_dataset(const Graph& g, const std::filesystem::path& dir);

}  // namespace gal
