#ifndef LABNER_TEXT_H_
#define LABNER_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace labner {

std::string_view Trim(std::string_view text);

// Splits on runs of spaces, tabs and other ASCII whitespace.
std::vector<std::string_view> SplitWhitespace(std::string_view text);

std::vector<std::string> Split(std::string_view text, char separator);

std::string Join(const std::vector<std::string> &parts, std::string_view sep);

std::string AsciiLower(std::string_view text);

// Byte offset of the start of every code point in a UTF-8 string, followed
// by text.size(). Invalid bytes count as one code point each.
std::vector<int> CodePointOffsets(std::string_view text);

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view data, uint64_t seed = 0xcbf29ce484222325ULL);

std::string Hex64(uint64_t value);

}  // namespace labner

#endif  // LABNER_TEXT_H_
