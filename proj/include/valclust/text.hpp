// Copyright 2026 The valclust Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace valclust::text {

/// Decodes UTF-8. Throws Error(kEncodingError) naming the byte offset of the
/// first invalid sequence (relative to the start of `bytes`, plus `base_offset`).
std::u32string decode_utf8(std::string_view bytes, std::size_t base_offset = 0);

std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

/// ISO-8859-1 bytes to UTF-8.
std::string latin1_to_utf8(std::string_view bytes);

/// Top-level character groups used by abstraction rules.
enum class CharGroup { kLetter, kDigit, kSpecial };

/// Codepoints reserved for abstraction placeholders. They belong to none of
/// the three groups, so placeholder output is never rewritten again.
inline constexpr char32_t kReservedFirst = 0xE000;
inline constexpr char32_t kReservedLast = 0xE0FF;

inline bool is_reserved(char32_t cp) { return cp >= kReservedFirst && cp <= kReservedLast; }
bool is_control(char32_t cp);

bool is_digit(char32_t cp);   // ASCII 0-9
bool is_letter(char32_t cp);  // Unicode alphabetic, excluding digits
bool is_special(char32_t cp);  // everything else that is not control or reserved

bool in_group(char32_t cp, CharGroup group);
char32_t to_lower(char32_t cp);

std::string_view group_name(CharGroup group);
CharGroup group_from_name(std::string_view name);

}  // namespace valclust::text
