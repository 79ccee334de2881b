#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace shuffleval::text {

std::string_view trim(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split(std::string_view s, std::string_view sep);

std::string to_lower_ascii(std::string_view s);
std::string to_upper_ascii(std::string_view s);

// Number of Unicode code points in a UTF-8 string (continuation bytes skipped).
std::size_t utf8_length(std::string_view s);

// Lowercased alphanumeric runs; any other byte separates tokens. Bytes >= 0x80
// count as word characters so non-Latin scripts tokenize on whitespace/punct.
std::vector<std::string> word_tokens(std::string_view s);

// Replaces every "{name}" with value, for each pair, in one left-to-right pass.
std::string fill(std::string_view tmpl,
                 const std::vector<std::pair<std::string, std::string>>& values);

// Contents of the first <tag>...</tag> block, untrimmed. offset, when given,
// receives the position just past the closing tag.
std::optional<std::string> tagged_block(std::string_view s, std::string_view tag,
                                        std::size_t* end_offset = nullptr);

std::string read_file(const std::filesystem::path& path);
// Writes via a temporary sibling and rename so readers never see partial files.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace shuffleval::text
