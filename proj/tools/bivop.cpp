#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bivop/cli.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> tolerance;
    std::optional<int> threads;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "experiment config file (defaults built in)");
        app->add_option("--seed", seed, "global seed, overrides [run] seed");
        app->add_option("--out", out, "output directory, overrides [run] out");
        app->add_option("--tolerance", tolerance, "residual tolerance, overrides [run] tolerance")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--threads", threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    }

    bivop::ExperimentConfig resolve() const {
        bivop::ExperimentConfig c = config.empty() ? bivop::ExperimentConfig{} : bivop::load_config(config);
        if (seed) c.seed = *seed;
        if (out) c.out = *out;
        if (tolerance) c.tolerance = *tolerance;
        if (threads) c.threads = *threads;
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functions of pairs of Hermitian matrices: operator integrals, Besov norms, Lipschitz experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bivop::kToolVersion);

    using Command = int (*)(const bivop::ExperimentConfig&, std::ostream&, std::ostream&);
    struct Entry {
        const char* name;
        const char* help;
        Command run;
    };
    const Entry entries[] = {
        {"verify-dois", "check operator integrals against explicit projector sums and trace pairings", bivop::cmd_verify_dois},
        {"verify-identities", "residuals of the operator-difference representations", bivop::cmd_verify_identities},
        {"scan", "Lipschitz ratio scan over dims x p x sigma", bivop::cmd_scan},
        {"search", "hill-climbing search for large ratios", bivop::cmd_search},
        {"converge", "convergence of the regularized differences", bivop::cmd_converge},
        {"sharp", "norms of f#(A,B) against (1 + sigma) sup|f|", bivop::cmd_sharp},
    };
    CommonFlags flags;
    for (const auto& e : entries) flags.attach(app.add_subcommand(e.name, e.help));

    bivop::BesovRequest besov;
    std::string file, inline_terms;
    double sigma = 0.0;
    auto* b = app.add_subcommand("besov", "Besov norms of a trigonometric polynomial");
    auto* file_opt = b->add_option("--file", file, "term file, one 'xi1 xi2 re im' per line");
    auto* inline_opt = b->add_option("--inline", inline_terms, "terms separated by ';'");
    auto* sigma_opt = b->add_option("--sigma", sigma, "draw a random real function of this band")->check(CLI::PositiveNumber);
    file_opt->excludes(inline_opt)->excludes(sigma_opt);
    inline_opt->excludes(sigma_opt);
    b->add_option("--terms", besov.terms, "frequency draws for --sigma")->check(CLI::PositiveNumber);
    b->add_option("--seed", besov.seed, "seed for --sigma");
    b->add_flag("--real", besov.real, "require conjugate-symmetric coefficients");
    b->add_flag("--approximate", besov.approximate, "also report the sampled-grid estimate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bivop::kExitUsage;
    }

    if (b->parsed()) {
        if (*file_opt) besov.file = file;
        if (*inline_opt) besov.inline_terms = inline_terms;
        if (*sigma_opt) besov.sigma = sigma;
        return bivop::cmd_besov(besov, std::cout, std::cerr);
    }
    for (const auto& e : entries) {
        if (!app.got_subcommand(e.name)) continue;
        bivop::ExperimentConfig c;
        try {
            c = flags.resolve();
        } catch (const bivop::ParseError& err) {
            std::cerr << "config parse error: " << err.what() << '\n';
            return bivop::kExitUsage;
        } catch (const bivop::ConfigError& err) {
            std::cerr << "error: " << err.what() << '\n';
            return bivop::kExitUsage;
        }
        return e.run(c, std::cout, std::cerr);
    }
    return bivop::kExitUsage;
}
