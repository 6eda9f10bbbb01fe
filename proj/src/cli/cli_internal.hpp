#pragma once

#include "torus_atlas/action_angle.hpp"
#include "torus_atlas/diophantine.hpp"
#include "torus_atlas/kam.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace torus_atlas::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

// Reads one object of the config and remembers which keys were consumed, so
// that leftovers can be reported as unknown fields.
class Block {
public:
    Block(const Json& j, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key, double def);
    int integer(const std::string& key, int def);
    std::uint64_t u64(const std::string& key, std::uint64_t def);
    bool boolean(const std::string& key, bool def);
    std::string text(const std::string& key, const std::string& def);
    std::pair<double, double> range(const std::string& key, std::pair<double, double> def);
    std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
    Block child(const std::string& key);
    std::vector<Block> children(const std::string& key);
    const Json& raw(const std::string& key);
    // Throws ConfigError naming the first key that was never read.
    void finish() const;
    // Effective values (defaults included), for the manifest.
    const Json& effective() const { return eff_; }
    Json& effective() { return eff_; }

private:
    const Json* at(const std::string& key);
    Json j_;
    std::string path_;
    std::set<std::string> used_;
    Json eff_ = Json::object();
};

struct Context {
    std::string command;
    std::filesystem::path out_dir;
    int jobs = 0;
    std::uint64_t seed = 1;
    bool seed_given = false;
    bool quiet = false;
    Json config = Json::object();  // full file, or empty
    std::ostream* log = nullptr;

    void note(const std::string& line) const;
};

Json load_config(const std::string& path);
// Block of the command, validated against the schema version; empty when absent.
Block command_block(const Context& ctx);

std::string sha256_hex(const std::string& data);
std::string fmt_double(double v);

// Writes files relative to the output directory.
void write_text(const Context& ctx, const std::string& name, const std::string& text);
void write_json(const Context& ctx, const std::string& name, const Json& j);
void write_manifest(const Context& ctx, const Json& effective, const std::vector<std::string>& files);

// Shared parameter blocks.
ChartSpec read_chart(Block& b, const ChartSpec& def);
DiophantineParams read_diophantine(Block& b, const DiophantineParams& def);
KamConfig read_kam(Block& b);
HamiltonianSpec read_hamiltonian(Block& b, const HamiltonianSpec& def);
Json chart_json(const ChartSpec& c);

int cmd_bifurcation(const Context& ctx);
int cmd_freqmap(const Context& ctx);
int cmd_diophantine(const Context& ctx);
int cmd_monodromy(const Context& ctx);
int cmd_solve_tori(const Context& ctx);
int cmd_glue(const Context& ctx);
int cmd_verify_freq(const Context& ctx);

}  // namespace torus_atlas::cli
