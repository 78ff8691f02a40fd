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

#pragma once

// File formats shared by the CLI and downstream tooling:
//  - state files: one JSON document
//      {"dims": [...], "kind": "density" | "operator",
//       "matrix": [[[re, im], ...], ...], "name": ..., "metadata": {...}}
//  - trace files: CSV with header exactly `c_t,c_s,d2`, one row per
//    accepted correction.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "hsd/gilbert.hpp"
#include "hsd/linalg.hpp"

namespace hsd {

enum class MatrixKind { density, operator_ };

struct StateFile {
    Dims dims;
    MatrixKind kind = MatrixKind::density;
    ComplexMatrix matrix;
    std::optional<std::string> name;
    nlohmann::json metadata;  // null when absent
};

StateFile make_state_file(const DensityMatrix& rho, std::optional<std::string> name = {});
StateFile make_operator_file(const ComplexMatrix& op, Dims dims,
                             std::optional<std::string> name = {});

/// Throws IoError when the document does not follow the schema.
StateFile parse_state_file(const nlohmann::json& doc);
nlohmann::json to_json(const StateFile& file);

/// Deterministic text form; write -> read -> write is byte-identical.
std::string dump_state_file(const StateFile& file);

StateFile read_state_file(const std::filesystem::path& path);
void write_state_file(const std::filesystem::path& path, const StateFile& file);

/// Validated density matrix. Operator files are rejected (ValidationError).
DensityMatrix to_density(const StateFile& file);

/// At least 15 significant digits, more only when needed to round-trip.
std::string format_real(double value);

void write_trace_csv(std::ostream& out, const Trace& trace);
Trace read_trace_csv(std::istream& in);

void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
Trace read_trace_csv(const std::filesystem::path& path);

/// Writes `text` to `path`, throwing IoError on failure.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hsd
