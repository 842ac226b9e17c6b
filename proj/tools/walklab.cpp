// walklab: configuration-driven quantum walk experiments.

#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"

namespace {

using walklab::cli::Overrides;

void add_options(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON configuration file");
    sub->add_option("--model", o.model, "zoo model name");
    sub->add_option("--walk-file", o.walk_file, "JSON file holding a model section");
    sub->add_option("--a", o.a, "coin entry a");
    sub->add_option("--b", o.b, "coin entry b");
    sub->add_option("--c", o.c, "coin entry c");
    sub->add_option("--d", o.d, "coin entry d");
    sub->add_option("--r", o.r, "split-step reflection amplitude");
    sub->add_option("--t", o.t, "split-step transmission amplitude");
    sub->add_option("--coin", o.coin, "row-major square coin, comma separated");
    sub->add_option("--alpha", o.alpha, "left step length");
    sub->add_option("--beta", o.beta, "right step length");
    sub->add_option("--dim", o.dim, "lattice dimension for PUTO models");
    sub->add_option("--parts", o.parts, "comma separated constituents for tensor and directsum");
    sub->add_option("--N", o.N, "box sizes")->delimiter(',');
    sub->add_option("--state", o.state, "initial state 'pos:spinJ:amp;...'");
    sub->add_option("--observable", o.observable, "position observable preset");
    sub->add_option("--spin-observable", o.spin_observable, "one preset per spin, separated by '|'");
    sub->add_option("--window", o.window, "escape window lo:hi");
    sub->add_option("--k", o.k, "subsequence offset");
    sub->add_option("--M", o.M, "subsequence modulus");
    sub->add_option("--G", o.G, "quadrature or branch grid size");
    sub->add_option("--q-max", o.q_max, "largest relation denominator");
    sub->add_option("--Q", o.Q, "largest zeta-shift denominator");
    sub->add_option("--j", o.spin, "spin component (1-based)");
    sub->add_option("--n-max", o.n_max, "escape horizon");
    sub->add_option("--T", o.T, "time horizon for Cesaro averages");
    sub->add_option("--steps", o.steps, "number of walk steps");
    sub->add_option("--method", o.method, "evolution or measure method");
    sub->add_option("--group-tol", o.group_tol, "eigenvalue grouping tolerance");
    sub->add_option("--eig-tol", o.eig_tol, "eigenvalue coincidence tolerance");
    sub->add_option("--rel-tol", o.rel_tol, "phase relation tolerance");
    sub->add_option("--output,-o", o.output, "artifact path, '-' for stdout");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"walklab: spectral and ergodicity diagnostics for quantum walks"};
    app.require_subcommand(1);
    Overrides o;
    for (const auto& name : walklab::cli::command_names()) add_options(app.add_subcommand(name, name), o);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : walklab::cli::kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return walklab::cli::run(walklab::cli::load_config(command, o));
    } catch (const walklab::Error& e) {
        std::cerr << "walklab " << command << ": " << e.what() << "\n";
        return walklab::cli::exit_status(e.kind());
    }
}
