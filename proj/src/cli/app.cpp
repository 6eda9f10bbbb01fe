#include "torus_atlas/cli.hpp"

#include "cli/cli_internal.hpp"
#include "torus_atlas/errors.hpp"
#include "torus_atlas/parallel.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <ostream>

namespace torus_atlas::cli {

namespace {

struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Context&);
};

const Command kTable[] = {
    {"bifurcation", "classify a grid of (I, E) values and sample the boundary curves", cmd_bifurcation},
    {"freqmap", "periods, frequencies and the nondegeneracy determinant on a grid", cmd_freqmap},
    {"diophantine", "Diophantine labeling of a chart and measure estimates", cmd_diophantine},
    {"monodromy", "rotation-angle continuation around a loop of regular values", cmd_monodromy},
    {"solve-tori", "invariant tori of the perturbed system over chart grids", cmd_solve_tori},
    {"glue", "partition of unity, glued conjugacy and flow-commutation check", cmd_glue},
    {"verify-freq", "quadrature frequencies against trajectory frequency analysis", cmd_verify_freq},
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"torus_atlas: quasi-periodic stability experiments for the perturbed spherical pendulum",
                 "torus_atlas"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    std::string config_path, out_path;
    int jobs = 0;
    std::uint64_t seed = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON config with a top-level schema_version");
    auto* jobs_opt = app.add_option("--jobs", jobs, "worker threads (default: logical cores)");
    auto* seed_opt = app.add_option("--seed", seed, "seed overriding the config");
    app.add_option("--out", out_path, "output directory (default: $TORUS_ATLAS_OUT or ./torus_atlas_out)");
    app.add_flag("--quiet", quiet, "suppress progress notes");

    std::vector<CLI::App*> subs;
    for (const auto& c : kTable) subs.push_back(app.add_subcommand(c.name, c.help)->fallthrough());

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    const Command* cmd = nullptr;
    for (std::size_t k = 0; k < subs.size(); ++k)
        if (subs[k]->parsed()) cmd = &kTable[k];

    Context ctx;
    ctx.command = cmd->name;
    ctx.quiet = quiet;
    ctx.log = &err;
    ctx.seed_given = seed_opt->count() > 0;
    if (ctx.seed_given) ctx.seed = seed;
    try {
        if (jobs_opt->count() > 0 && jobs < 1) throw ValidationError("--jobs must be at least 1");
        ctx.jobs = jobs_opt->count() > 0 ? jobs : default_jobs();
        set_default_jobs(ctx.jobs);
        if (out_path.empty()) {
            const char* env = std::getenv("TORUS_ATLAS_OUT");
            out_path = env && *env ? env : "torus_atlas_out";
        }
        ctx.out_dir = std::filesystem::path(out_path) / ctx.command;
        if (!config_path.empty()) ctx.config = load_config(config_path);
        return cmd->fn(ctx);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace torus_atlas::cli
