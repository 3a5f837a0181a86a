#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "lqp/protocol.hpp"

namespace lqp {

// Canonical JSON text of a protocol. Nodes are renumbered in preorder with
// children in measurement order, one node per line, so equal trees always
// serialize to identical bytes.
std::string write_protocol(const ProtocolTree& pi);

// Parses and checks a protocol. Syntax errors carry line and column; shape
// errors carry the JSON path of the offending field. Throws ParseError.
ProtocolTree read_protocol(std::string_view text);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

void save_protocol(const std::filesystem::path& path, const ProtocolTree& pi);
ProtocolTree load_protocol(const std::filesystem::path& path);

// {"kind":"gf2"}, {"kind":"modq","q":3} or {"kind":"int","B":8}.
std::string ring_json(const Ring& ring);

}  // namespace lqp
