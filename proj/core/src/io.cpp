// Copyright 2026 The gilbert-hsd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hsd/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hsd {

StateFile make_state_file(const DensityMatrix& rho, std::optional<std::string> name) {
    return StateFile{rho.dims(), MatrixKind::density, rho.matrix(), std::move(name), nullptr};
}

StateFile make_operator_file(const ComplexMatrix& op, Dims dims, std::optional<std::string> name) {
    const int n = total_dim(dims);
    if (op.rows() != n || op.cols() != n) {
        throw DimensionError("operator size does not match subsystem dimensions");
    }
    return StateFile{std::move(dims), MatrixKind::operator_, op, std::move(name), nullptr};
}

StateFile parse_state_file(const nlohmann::json& doc) {
    try {
        if (!doc.is_object()) throw IoError("state file: top level must be an object");
        StateFile file;
        file.dims = doc.at("dims").get<Dims>();
        const auto kind = doc.contains("kind") ? doc.at("kind").get<std::string>() : "density";
        if (kind == "density") {
            file.kind = MatrixKind::density;
        } else if (kind == "operator") {
            file.kind = MatrixKind::operator_;
        } else {
            throw IoError("state file: unknown kind '" + kind + "'");
        }
        const int n = total_dim(file.dims);
        const auto& rows = doc.at("matrix");
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw IoError("state file: matrix must have one row per basis state");
        }
        file.matrix.resize(n, n);
        for (int i = 0; i < n; ++i) {
            const auto& row = rows[i];
            if (!row.is_array() || static_cast<int>(row.size()) != n) {
                throw IoError("state file: matrix row has the wrong length");
            }
            for (int j = 0; j < n; ++j) {
                const auto& entry = row[j];
                if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
                    !entry[1].is_number()) {
                    throw IoError("state file: entries must be [re, im] number pairs");
                }
                file.matrix(i, j) = Complex(entry[0].get<double>(), entry[1].get<double>());
            }
        }
        if (doc.contains("name")) file.name = doc.at("name").get<std::string>();
        if (doc.contains("metadata")) file.metadata = doc.at("metadata");
        return file;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("state file: ") + e.what());
    } catch (const DimensionError& e) {
        throw IoError(std::string("state file: ") + e.what());
    }
}

nlohmann::json to_json(const StateFile& file) {
    nlohmann::json doc;
    doc["dims"] = file.dims;
    doc["kind"] = file.kind == MatrixKind::density ? "density" : "operator";
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < file.matrix.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < file.matrix.cols(); ++j) {
            row.push_back({file.matrix(i, j).real(), file.matrix(i, j).imag()});
        }
        rows.push_back(std::move(row));
    }
    doc["matrix"] = std::move(rows);
    if (file.name) doc["name"] = *file.name;
    if (!file.metadata.is_null()) doc["metadata"] = file.metadata;
    return doc;
}

std::string dump_state_file(const StateFile& file) { return to_json(file).dump() + "\n"; }

StateFile read_state_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open state file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("state file " + path.string() + ": " + e.what());
    }
    return parse_state_file(doc);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

void write_state_file(const std::filesystem::path& path, const StateFile& file) {
    write_text_file(path, dump_state_file(file));
}

DensityMatrix to_density(const StateFile& file) {
    if (file.kind != MatrixKind::density) {
        throw ValidationError("state file holds an operator, not a density matrix");
    }
    return DensityMatrix(file.dims, file.matrix);
}

std::string format_real(double value) {
    char buf[40];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "c_t,c_s,d2\n";
    for (const auto& rec : trace) {
        out << rec.c_t << ',' << rec.c_s << ',' << format_real(rec.d2) << '\n';
    }
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw IoError("trace CSV line " + std::to_string(line) + ": malformed field '" +
                      std::string(text) + "'");
    }
    return value;
}

}  // namespace

Trace read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("trace CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "c_t,c_s,d2") throw IoError("trace CSV header must be exactly c_t,c_s,d2");
    Trace trace;
    std::size_t number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw IoError("trace CSV line " + std::to_string(number) + ": expected 3 fields");
        }
        const std::string_view view(line);
        TraceRecord rec;
        rec.c_t = parse_field<std::uint64_t>(view.substr(0, c1), number);
        rec.c_s = parse_field<std::uint64_t>(view.substr(c1 + 1, c2 - c1 - 1), number);
        rec.d2 = parse_field<double>(view.substr(c2 + 1), number);
        trace.push_back(rec);
    }
    return trace;
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    write_text_file(path, out.str());
}

Trace read_trace_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace file " + path.string());
    return read_trace_csv(in);
}

}  // namespace hsd
