#include "cli/cli_internal.hpp"

#include "torus_atlas/errors.hpp"

#include <Eigen/Core>
#include <fftw3.h>
#include <fmt/format.h>
#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace torus_atlas::cli {

namespace {

const char* const kCommands[] = {"bifurcation", "freqmap", "diophantine", "monodromy",
                                 "solve-tori",  "glue",    "verify-freq"};

}  // namespace

Block::Block(const Json& j, std::string path) : j_(j.is_null() ? Json::object() : j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(fmt::format("'{}' must be an object", path_));
}

bool Block::has(const std::string& key) const { return j_.contains(key); }

const Json* Block::at(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
}

double Block::number(const std::string& key, double def) {
    const Json* v = at(key);
    double x = def;
    if (v) {
        if (!v->is_number()) throw ConfigError(fmt::format("'{}.{}' must be a number", path_, key));
        x = v->get<double>();
    }
    if (std::isfinite(x))
        eff_[key] = x;
    else
        eff_[key] = nullptr;
    return x;
}

int Block::integer(const std::string& key, int def) {
    const Json* v = at(key);
    int x = def;
    if (v) {
        if (!v->is_number_integer()) throw ConfigError(fmt::format("'{}.{}' must be an integer", path_, key));
        x = v->get<int>();
    }
    eff_[key] = x;
    return x;
}

std::uint64_t Block::u64(const std::string& key, std::uint64_t def) {
    const Json* v = at(key);
    std::uint64_t x = def;
    if (v) {
        if (!v->is_number_unsigned()) throw ConfigError(fmt::format("'{}.{}' must be a non-negative integer", path_, key));
        x = v->get<std::uint64_t>();
    }
    eff_[key] = x;
    return x;
}

bool Block::boolean(const std::string& key, bool def) {
    const Json* v = at(key);
    bool x = def;
    if (v) {
        if (!v->is_boolean()) throw ConfigError(fmt::format("'{}.{}' must be true or false", path_, key));
        x = v->get<bool>();
    }
    eff_[key] = x;
    return x;
}

std::string Block::text(const std::string& key, const std::string& def) {
    const Json* v = at(key);
    std::string x = def;
    if (v) {
        if (!v->is_string()) throw ConfigError(fmt::format("'{}.{}' must be a string", path_, key));
        x = v->get<std::string>();
    }
    eff_[key] = x;
    return x;
}

std::vector<double> Block::numbers(const std::string& key, const std::vector<double>& def) {
    const Json* v = at(key);
    std::vector<double> x = def;
    if (v) {
        if (!v->is_array()) throw ConfigError(fmt::format("'{}.{}' must be an array of numbers", path_, key));
        x.clear();
        for (const auto& e : *v) {
            if (!e.is_number()) throw ConfigError(fmt::format("'{}.{}' must be an array of numbers", path_, key));
            x.push_back(e.get<double>());
        }
    }
    eff_[key] = x;
    return x;
}

std::pair<double, double> Block::range(const std::string& key, std::pair<double, double> def) {
    std::vector<double> v = numbers(key, {def.first, def.second});
    if (v.size() != 2 || !(v[1] > v[0]))
        throw ConfigError(fmt::format("'{}.{}' must be [low, high] with low < high", path_, key));
    return {v[0], v[1]};
}

Block Block::child(const std::string& key) {
    const Json* v = at(key);
    return Block(v ? *v : Json::object(), path_ + "." + key);
}

std::vector<Block> Block::children(const std::string& key) {
    const Json* v = at(key);
    std::vector<Block> out;
    if (!v) return out;
    if (!v->is_array()) throw ConfigError(fmt::format("'{}.{}' must be an array of objects", path_, key));
    for (std::size_t k = 0; k < v->size(); ++k) out.emplace_back((*v)[k], fmt::format("{}.{}[{}]", path_, key, k));
    return out;
}

const Json& Block::raw(const std::string& key) {
    static const Json null_json;
    const Json* v = at(key);
    return v ? *v : null_json;
}

void Block::finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
        if (!used_.count(it.key())) throw ConfigError(fmt::format("unknown field '{}.{}'", path_, it.key()));
}

void Context::note(const std::string& line) const {
    if (!quiet && log) *log << line << '\n';
}

Json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    Json j;
    try {
        j = Json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("config {} is not valid JSON: {}", path, e.what()));
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schema_version")) throw ConfigError("config lacks schema_version");
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kSchemaVersion)
        throw ConfigError(fmt::format("unsupported schema_version (expected {})", kSchemaVersion));
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.key() == "schema_version") continue;
        bool known = false;
        for (const char* c : kCommands) known = known || it.key() == c;
        if (!known) throw ConfigError(fmt::format("unknown field '{}'", it.key()));
    }
    return j;
}

Block command_block(const Context& ctx) {
    auto it = ctx.config.find(ctx.command);
    return Block(it == ctx.config.end() ? Json::object() : *it, ctx.command);
}

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 failed");
    std::string hex;
    for (unsigned int k = 0; k < len; ++k) hex += fmt::format("{:02x}", md[k]);
    return hex;
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

void write_text(const Context& ctx, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(ctx.out_dir);
    std::ofstream os(ctx.out_dir / name, std::ios::binary);
    if (!os) throw ValidationError("cannot write " + (ctx.out_dir / name).string());
    os << text;
    if (!os) throw ValidationError("failed writing " + (ctx.out_dir / name).string());
}

void write_json(const Context& ctx, const std::string& name, const Json& j) { write_text(ctx, name, j.dump(2) + "\n"); }

void write_manifest(const Context& ctx, const Json& effective, const std::vector<std::string>& files) {
    Json m;
    m["tool"] = "torus_atlas";
    m["version"] = kToolVersion;
    m["command"] = ctx.command;
    m["schema_version"] = kSchemaVersion;
    std::string canon = effective.dump();
    m["config_sha256"] = sha256_hex(canon);
    m["seed"] = ctx.seed;
    m["effective_config"] = effective;
    m["libraries"] = {{"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
                      {"fftw", std::string(fftw_version)},
                      {"fmt", FMT_VERSION}};
    Json fl = Json::array();
    for (const auto& f : files) {
        std::ifstream is(ctx.out_dir / f, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        fl.push_back({{"name", f}, {"sha256", sha256_hex(ss.str())}});
    }
    m["files"] = fl;
    write_json(ctx, "manifest.json", m);
}

ChartSpec read_chart(Block& b, const ChartSpec& def) {
    ChartSpec c = def;
    c.id = b.integer("id", def.id);
    auto I = b.range("I", {def.window.I0, def.window.I1});
    auto E = b.range("E", {def.window.E0, def.window.E1});
    c.window = {I.first, I.second, E.first, E.second};
    c.gamma = b.number("gamma", def.gamma);
    std::vector<double> g = b.numbers("gauge", {def.gauge(0, 0), def.gauge(0, 1), def.gauge(1, 1)});
    if (g.size() != 3) throw ConfigError("chart gauge must be [g11, g12, g22]");
    c.gauge << g[0], g[1], g[1], g[2];
    b.finish();
    validate_chart(c);
    return c;
}

Json chart_json(const ChartSpec& c) {
    return {{"id", c.id},
            {"I", {c.window.I0, c.window.I1}},
            {"E", {c.window.E0, c.window.E1}},
            {"gamma", c.gamma},
            {"gauge", {c.gauge(0, 0), c.gauge(0, 1), c.gauge(1, 1)}}};
}

DiophantineParams read_diophantine(Block& b, const DiophantineParams& def) {
    DiophantineParams p = def;
    p.gamma = b.number("gamma", def.gamma);
    p.tau = b.number("tau", def.tau);
    p.k_max = b.integer("k_max", def.k_max);
    p.gamma_tilde = b.number("gamma_tilde", def.gamma_tilde);
    p.validate();
    return p;
}

KamConfig read_kam(Block& b) {
    KamConfig k;
    k.N = b.integer("N", k.N);
    k.newton_tol = b.number("newton_tol", k.newton_tol);
    k.max_newton = b.integer("max_newton", k.max_newton);
    k.tail_tol = b.number("tail_tol", k.tail_tol);
    k.smallness_guard = b.number("smallness_guard", k.smallness_guard);
    k.filter_fraction = b.number("filter_fraction", k.filter_fraction);
    k.tau = b.number("tau", k.tau);
    b.finish();
    k.validate();
    return k;
}

HamiltonianSpec read_hamiltonian(Block& b, const HamiltonianSpec& def) {
    HamiltonianSpec h;
    h.epsilon = b.number("epsilon", def.epsilon);
    h.perturbation = parse_perturbation(b.text("perturbation", perturbation_name(def.perturbation)));
    if (!std::isfinite(h.epsilon)) throw ConfigError("epsilon must be finite");
    return h;
}

}  // namespace torus_atlas::cli
