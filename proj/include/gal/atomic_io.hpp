#pragma once
// Whole-file writes via a temp file + rename, so readers never see a
// truncated CSV/JSON.

#include <filesystem>
#include <fstream>
#include <string>

#include "gal/error.hpp"

namespace gal {

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.good()) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace gal
