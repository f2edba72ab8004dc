#ifndef LTOS_HARNESS_HPP
#define LTOS_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltos {

enum class Command { kTrain, kOracle, kMatrix };

Command command_from_string(const std::string& name);

struct RunManifest {
  Command command = Command::kTrain;
  std::string config_path;
  std::string method = "ltos";  // ltos, fixed, independent, oracle, matrix
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::optional<std::uint64_t> episodes;
};

// "1,2,3" -> {1, 2, 3}. Throws std::invalid_argument on empty or
// non-numeric entries.
std::vector<std::uint64_t> parse_seeds(const std::string& csv);

// Value of LTOS_SEED_OFFSET, 0 when unset. Throws on a malformed value.
std::uint64_t seed_offset_from_env();

// Thrown for manifests that cannot run (bad method, unreadable config...).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Executes the manifest and writes its artifacts under out_dir. Returns 0
// when every seed completed, 1 otherwise; progress goes to `log`.
int run(const RunManifest& manifest, std::ostream& log);

}  // namespace ltos

#endif  // LTOS_HARNESS_HPP
