#ifndef MODBOX_RUNCONFIG_HPP
#define MODBOX_RUNCONFIG_HPP

#include <cstdint>
#include <string>

#include <json.hpp>

#include "modbox/errors.hpp"

namespace modbox {

// Fully validated run description for one CLI invocation.  Unknown keys are
// rejected; keys starting with '_' are documentation and ignored.
struct RunConfig {
    std::string subcommand;  // norm | evolve | verify | admissible | embed
    nlohmann::json config;   // subcommand-specific block
    std::string out_dir = ".";
    std::string estimate_id;  // verify only
    bool list_estimates = false;

    void validate() const;
};

// Executes the run; writes declared artifacts atomically under out_dir.
// Exit status: 0 success (blow-up termination included), 2 validation
// error, 3 numerical failure (Picard divergence).
int run(const RunConfig& cfg);

// FNV-1a hash of the canonical config dump, embedded in every artifact.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hash_hex(std::uint64_t h);

// Convention flags embedded in every artifact.
nlohmann::json convention_flags();

// Atomic file write: temp file plus rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace modbox

#endif
