#ifndef POLYRC_TEXT_HPP_
#define POLYRC_TEXT_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyrc {

class Utf8Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Byte offset of every code point in `text`, plus a final entry equal to
// text.size(). Throws Utf8Error on malformed input.
std::vector<std::size_t> codepoint_offsets(std::string_view text);

std::size_t codepoint_length(std::string_view text);

// Substring by code-point range [begin, end).
std::string codepoint_substr(std::string_view text, std::size_t begin,
                             std::size_t end);

// Last code point of `text`, or empty when text is empty.
std::string_view last_codepoint(std::string_view text);

std::string to_lower_ascii(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);

// Splits on runs of ASCII whitespace; never yields empty tokens.
std::vector<std::string> split_whitespace(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Anything that turns text into a token sequence. Used for length statistics
// and by the backends.
class TextTokenizer {
 public:
  virtual ~TextTokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view text) const = 0;
  std::size_t count(std::string_view text) const {
    return tokenize(text).size();
  }
};

class WhitespaceTokenizer final : public TextTokenizer {
 public:
  std::vector<std::string> tokenize(std::string_view text) const override {
    return split_whitespace(text);
  }
};

}  // namespace polyrc

#endif  // POLYRC_TEXT_HPP_
