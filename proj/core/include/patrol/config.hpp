#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "patrol/generator.hpp"

namespace patrol {

// Flat key-value text format (one `key value` pair per line, '#' comments).
using KeyValueList = std::vector<std::pair<std::string, std::string>>;

void write_key_values(std::ostream& os, const KeyValueList& pairs);
void write_key_values(const std::string& path, const KeyValueList& pairs);
KeyValueList read_key_values(std::istream& is);
KeyValueList read_key_values(const std::string& path);

// Every GeneratorConfig field, written in a fixed order with full precision.
KeyValueList to_key_values(const GeneratorConfig& config);
void write_generator_config(const std::string& path, const GeneratorConfig& config);

// Starts from defaults, overrides from the file; unknown keys are rejected.
GeneratorConfig read_generator_config(std::istream& is);
GeneratorConfig read_generator_config(const std::string& path);

// FNV-1a over the canonical serialization; stable across runs and platforms.
std::string config_hash(const GeneratorConfig& config);

}  // namespace patrol
