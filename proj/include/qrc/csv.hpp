// csv.hpp — Locale-independent CSV serialization for features, weights,
// datasets, and metric tables. Files are written atomically (temp + rename).

#pragma once

#include "qrc/errors.hpp"
#include "qrc/features.hpp"
#include "qrc/readout.hpp"
#include "qrc/tasks.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace qrc {

// 17 significant digits, '.' decimal point regardless of locale.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc()) {
        throw ConfigError("not a number: '" + s + "'");
    }
    return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Replaces `path` with `content` via a sibling temporary file and rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        }
        out << content;
    }
    fs::rename(tmp, path);
}

// Header row names the feature rows in order; each data row is one feature
// across samples (one column per sample).
inline std::string feature_matrix_csv(const FeatureMatrix& fm) {
    std::string out;
    for (std::size_t i = 0; i < fm.names.size(); ++i) {
        if (i) out += ',';
        out += fm.names[i];
    }
    out += '\n';
    for (Eigen::Index r = 0; r < fm.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(fm.values(r, c));
        }
        out += '\n';
    }
    return out;
}

// One-line header recording the feature ordering, then one row per output.
inline std::string weights_csv(const ReadoutWeights& w, const std::vector<std::string>& feature_names) {
    std::string out = "# features:";
    for (const auto& n : feature_names) {
        out += ' ';
        out += n;
    }
    out += '\n';
    for (Eigen::Index r = 0; r < w.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.values.cols(); ++c) {
            if (c) out += ',';
            out += format_double(w.values(r, c));
        }
        out += '\n';
    }
    return out;
}

// Columns: index, input, then one target column per output row; metadata goes
// into a JSON-style comment line.
inline std::string dataset_csv(const Dataset& ds) {
    std::string out = "# {\"kind\":\"" + ds.kind + "\",\"seed\":" + std::to_string(ds.seed);
    for (const auto& [k, v] : ds.metadata) {
        out += ",\"" + k + "\":" + format_double(v);
    }
    out += "}\n";
    out += "index,input";
    if (ds.delays.empty()) {
        for (Eigen::Index r = 0; r < ds.targets.rows(); ++r) out += ",target_class";
    } else {
        for (int d : ds.delays) out += ",target_" + std::to_string(d);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < ds.inputs.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_double(ds.inputs(i));
        for (Eigen::Index r = 0; r < ds.targets.rows(); ++r) {
            out += ',';
            out += format_double(ds.targets(r, i));
        }
        out += '\n';
    }
    return out;
}

inline Dataset dataset_from_csv(const std::string& content) {
    std::istringstream in(content);
    std::string line;
    Dataset ds;
    std::vector<double> inputs;
    std::vector<std::vector<double>> targets;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto kpos = line.find("\"kind\":\"");
            if (kpos != std::string::npos) {
                const auto start = kpos + 8;
                ds.kind = line.substr(start, line.find('"', start) - start);
            }
            const auto spos = line.find("\"seed\":");
            if (spos != std::string::npos) {
                ds.seed = static_cast<std::uint64_t>(std::strtoull(line.c_str() + spos + 7, nullptr, 10));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            const auto fields = split_csv_line(line);
            for (std::size_t f = 2; f < fields.size(); ++f) {
                targets.emplace_back();
                if (fields[f].rfind("target_", 0) == 0 && fields[f] != "target_class") {
                    ds.delays.push_back(std::stoi(fields[f].substr(7)));
                }
            }
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != targets.size() + 2) {
            throw ConfigError("dataset_from_csv: ragged row '" + line + "'");
        }
        inputs.push_back(parse_double(fields[1]));
        for (std::size_t f = 0; f < targets.size(); ++f) {
            targets[f].push_back(parse_double(fields[f + 2]));
        }
    }
    ds.inputs = Eigen::Map<const RealVector>(inputs.data(), static_cast<Eigen::Index>(inputs.size()));
    ds.targets.resize(static_cast<Eigen::Index>(targets.size()),
                      static_cast<Eigen::Index>(inputs.size()));
    for (std::size_t r = 0; r < targets.size(); ++r) {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            ds.targets(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = targets[r][i];
        }
    }
    return ds;
}

} // namespace qrc
