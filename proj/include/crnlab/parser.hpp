#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "crnlab/core.hpp"

namespace crnlab {

struct ModelSource {
  std::string text;
  std::string name;
};

/// Located syntax or semantic error in a model file. Line and column are
/// 1-based and point at the first character of the offending token.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source_name, std::size_t line, std::size_t column, std::string message,
             std::string token);

  const std::string& source_name() const { return source_name_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }
  const std::string& token() const { return token_; }

 private:
  std::string source_name_;
  std::size_t line_;
  std::size_t column_;
  std::string message_;
  std::string token_;
};

// Model text format (.crn):
//
//   # comment to end of line
//   %species A B C             optional; fixes species numbering
//   0 <-> S1 @ 1.0, 2.0        "<->" needs a forward and a backward rate
//   2 S1 + S2 -> 2 S1 + 2 S2 @ 0.5
//
// Species are numbered by declaration, then by first appearance. Repeated
// species within a side add up. The same (source, target) pair may only be
// declared once.
ReactionNetwork parse_network(const ModelSource& src);

/// Canonical text; parse_network(render_network(net)) has the same structure
/// as net. Emits a %species line only when first-appearance order would not
/// reproduce the numbering.
std::string render_network(const ReactionNetwork& net);

/// Reads a .crn file. Throws std::runtime_error if it cannot be read.
ModelSource read_model_file(const std::filesystem::path& path);

}  // namespace crnlab
