#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gkpqec/code.hpp"
#include "gkpqec/noise.hpp"
#include "gkpqec/policy.hpp"
#include "gkpqec/sbs.hpp"
#include "gkpqec/trainer.hpp"
#include "gkpqec/types.hpp"

namespace gkpqec {

// Strict run-file parsing: unknown keys, wrong types and out-of-range values
// are ConfigErrors so a typo fails loudly instead of silently falling back to
// a default.

nlohmann::json load_config_file(const std::string& path);

// Throws when j (an object) holds a key outside `allowed`.
void require_keys_known(const nlohmann::json& j, const std::string& section,
                        const std::vector<std::string>& allowed);

// Section accessor: returns the sub-object or an empty object; a present
// non-object is an error.
nlohmann::json config_section(const nlohmann::json& root, const std::string& name);

// Typed getters with defaults ("section" only labels error messages).
double get_number(const nlohmann::json& j, const std::string& section,
                  const std::string& key, double fallback);
int get_int(const nlohmann::json& j, const std::string& section,
            const std::string& key, int fallback);
bool get_bool(const nlohmann::json& j, const std::string& section,
              const std::string& key, bool fallback);
std::string get_string(const nlohmann::json& j, const std::string& section,
                       const std::string& key, const std::string& fallback);
// Lifetime: a positive number, or the string "inf" for a disabled channel.
double get_lifetime(const nlohmann::json& j, const std::string& section,
                    const std::string& key, double fallback);

HilbertConfig parse_hilbert(const nlohmann::json& root);
GkpStateSpec parse_state(const nlohmann::json& root);
LogicalLabel parse_state_label(const nlohmann::json& root);  // default +Z
NoiseModel parse_noise(const nlohmann::json& root);
HamiltonianParams parse_hamiltonian(const nlohmann::json& root);
SbsOptions parse_sbs(const nlohmann::json& root);

struct PolicySpec {
  std::string kind = "static";
  std::string file;  // non-empty: load saved weights instead of initializing
  int lookup_depth = 4;
};
PolicySpec parse_policy(const nlohmann::json& root);
FeedbackPolicy realize_policy(const PolicySpec& spec, unsigned seed);

// Assembles a TrainConfig from the whole document (train + shared sections).
TrainConfig parse_train(const nlohmann::json& root, unsigned seed);

// Rejects unknown top-level sections.
void check_top_level(const nlohmann::json& root);

}  // namespace gkpqec
