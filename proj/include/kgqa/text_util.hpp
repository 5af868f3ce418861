#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kgqa {

std::string to_lower(std::string_view s);

// Split on runs of whitespace; no empty tokens.
std::vector<std::string> split_ws(std::string_view s);

std::vector<std::string> split_on(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Classic edit distance (insert/delete/substitute, unit costs).
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein(a,b) / max(|a|,|b|), in [0,1]; 0 for two empty strings.
double levenshtein_norm(std::string_view a, std::string_view b);

// 1 - levenshtein_norm(a,b).
double similarity_ratio(std::string_view a, std::string_view b);

bool starts_with_ci(std::string_view text, std::string_view prefix);

// "doctoralAdvisor" -> "doctoral advisor", "Albert_Einstein" -> "Albert Einstein".
std::string de_camel(std::string_view s);

// Local name of an IRI: text after the last '/' or '#'.
std::string iri_local_name(std::string_view iri);

}  // namespace kgqa
