#include "gal/dataset_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gal/atomic_io.hpp"
#include "gal/error.hpp"
#include "json.hpp"

namespace gal {
namespace {

using json = nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

std::string at(const std::string& file, std::size_t line_no) {
    return file + ":" + std::to_string(line_no);
}

long parse_int(const std::string& s, const std::string& file, std::size_t line_no) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(at(file, line_no) + ": expected integer, got '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size())
        throw ParseError(at(file, line_no) + ": expected integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& file, std::size_t line_no) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError(at(file, line_no) + ": expected number, got '" + s + "'");
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size())
        throw ParseError(at(file, line_no) + ": expected number, got '" + s + "'");
    return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

Graph load_dataset(const std::filesystem::path& dir) {
    const auto meta_path = dir / "meta.json";
    std::ifstream meta_in(meta_path);
    if (!meta_in) throw ParseError("cannot open " + meta_path.string());
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::parse_error& e) {
        throw ParseError(meta_path.string() + ": " + e.what());
    }
    for (const char* key : {"n", "d", "C"})
        if (!meta.contains(key) || !meta[key].is_number_integer())
            throw ParseError(meta_path.string() + ": missing integer field '" + std::string(key) + "'");
    const int n = meta["n"].get<int>();
    const int d = meta["d"].get<int>();
    const int num_classes = meta["C"].get<int>();
    if (n <= 0 || d <= 0 || num_classes <= 0)
        throw ValidationError(meta_path.string() + ": n, d, C must be positive");

    const auto feat_path = dir / "features.csv";
    Eigen::MatrixXd features(n, d);
    {
        const auto lines = read_lines(feat_path);
        int row = 0;
        for (std::size_t ln = 0; ln < lines.size(); ++ln) {
            if (is_blank(lines[ln])) continue;
            if (row >= n)
                throw ValidationError(feat_path.string() + ": more than " + std::to_string(n) + " rows");
            const auto fields = split_csv(lines[ln]);
            if (static_cast<int>(fields.size()) != d)
                throw ValidationError(at(feat_path.string(), ln + 1) + ": expected " + std::to_string(d) +
                                      " fields, got " + std::to_string(fields.size()));
            for (int j = 0; j < d; ++j)
                features(row, j) = parse_double(fields[static_cast<std::size_t>(j)], feat_path.string(), ln + 1);
            ++row;
        }
        if (row != n)
            throw ValidationError(feat_path.string() + ": expected " + std::to_string(n) +
                                  " rows, got " + std::to_string(row));
    }

    const auto label_path = dir / "labels.csv";
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(n));
    {
        const auto lines = read_lines(label_path);
        for (std::size_t ln = 0; ln < lines.size(); ++ln) {
            if (is_blank(lines[ln])) continue;
            const long v = parse_int(lines[ln], label_path.string(), ln + 1);
            if (v < 0 || v >= num_classes)
                throw ValidationError(at(label_path.string(), ln + 1) + ": label " + std::to_string(v) +
                                      " outside {0.." + std::to_string(num_classes - 1) + "}");
            labels.push_back(static_cast<int>(v));
        }
        if (static_cast<int>(labels.size()) != n)
            throw ValidationError(label_path.string() + ": expected " + std::to_string(n) +
                                  " labels, got " + std::to_string(labels.size()));
    }

    const auto edge_path = dir / "edges.csv";
    std::vector<std::pair<int, int>> edges;
    {
        const auto lines = read_lines(edge_path);
        for (std::size_t ln = 0; ln < lines.size(); ++ln) {
            if (is_blank(lines[ln])) continue;
            const auto fields = split_csv(lines[ln]);
            if (fields.size() != 2)
                throw ParseError(at(edge_path.string(), ln + 1) + ": expected two fields, got " +
                                 std::to_string(fields.size()));
            const long u = parse_int(fields[0], edge_path.string(), ln + 1);
            const long v = parse_int(fields[1], edge_path.string(), ln + 1);
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw ValidationError(at(edge_path.string(), ln + 1) + ": endpoint out of range");
            edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        }
    }

    return Graph(num_classes, std::move(features), std::move(labels), edges);
}

void save_dataset(const Graph& g, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        json meta;
        meta["n"] = g.n();
        meta["d"] = g.feature_dim();
        meta["C"] = g.num_classes();
        write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
    }
    {
        std::string out;
        char buf[64];
        for (int i = 0; i < g.n(); ++i) {
            for (int j = 0; j < g.feature_dim(); ++j) {
                std::snprintf(buf, sizeof(buf), "%.17g", g.features()(i, j));
                if (j) out += ',';
                out += buf;
            }
            out += '\n';
        }
        write_file_atomic(dir / "features.csv", out);
    }
    {
        std::string out;
        for (int i = 0; i < g.n(); ++i) {
            out += std::to_string(g.label(i));
            out += '\n';
        }
        write_file_atomic(dir / "labels.csv", out);
    }
    {
        std::string out;
        for (const auto& [u, v] : g.edge_list()) {
            out += std::to_string(u);
            out += ',';
            out += std::to_string(v);
            out += '\n';
        }
        write_file_atomic(dir / "edges.csv", out);
    }
}

}  // namespace gal
