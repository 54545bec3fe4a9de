#pragma once

#include <string>
#include <utility>
#include <vector>

#include "actr/declarative.hpp"
#include "actr/params.hpp"
#include "actr/procedural.hpp"

namespace actr {

/// A parsed model file: parameters, the initial declarative memory, the
/// production set and the initial goal. Copyable; a copy is an independent
/// simulation state.
struct Model {
    Parameters params;
    std::vector<std::pair<std::string, std::string>> raw_params;  // as written
    Memory memory;
    ProductionSet productions;
    ChunkId goal = kNoChunk;
};

/// Parses the line-oriented model grammar:
///
///   [parameters]   key = value
///   [chunks]       name kind slot=value ...
///   [productions]  rule NAME / if ... / guard ... / then ... / end
///   [goal]         name
///
/// '#' starts a comment. Values are numbers, symbols or @chunk references.
/// Pattern terms are constants, ?variables or * wildcards. Throws ParseError
/// with a line number on syntax errors, unknown parameter keys, dangling
/// references and unbound guard/action variables.
Model parse_model(const std::string& text);

Model load_model_file(const std::string& path);

/// Canonical text form; parse(print(m)) yields an identical model and
/// print is a fixpoint on parsed models.
std::string print_model(const Model& m);

std::string print_production(const Production& p, const Memory& memory);

}  // namespace actr
