#pragma once
// Experiment configuration: a JSON document, optionally overridden by flags.

#include <json.hpp>
#include <optional>
#include <string>

#include "walklab/walklab.hpp"

namespace walklab::cli {

using json = nlohmann::json;

// Flag values are kept as strings so that numbers accept the amplitude grammar.
struct Overrides {
    std::optional<std::string> config, model, walk_file, state, observable, spin_observable, window, parts, output;
    std::optional<std::string> a, b, c, d, r, t, coin;
    std::optional<int> alpha, beta, dim, k, M, G, q_max, Q, spin, n_max;
    std::optional<long long> T, steps;
    std::optional<std::vector<int>> N;
    std::optional<double> group_tol, eig_tol, rel_tol;
    std::optional<std::string> method, theta;
};

struct ExperimentConfig {
    std::string command;
    json doc;  // merged configuration (file values with flag overrides applied)

    WalkSpec walk() const;
    ModelParams model_params() const;
    std::vector<int> box_sizes() const;  // explicit N list or subsequence spec
    int box_size() const;                 // first entry of box_sizes()
    std::vector<StateEntry> state() const;  // normalized
    Observable observable(int N, int d) const;
    std::vector<Observable> spin_observable(int N, int d, int nu) const;
    std::vector<LatticeVector> window(int d) const;

    double group_tol() const { return num("group_tol", kGroupTol); }
    double eig_tol() const { return num("eig_tol", kEigTol); }
    double rel_tol() const { return num("relation_tol", kRelationTol); }
    int G(int fallback) const { return static_cast<int>(num("G", fallback)); }
    int q_max() const { return static_cast<int>(num("q_max", 12)); }
    int Q() const { return static_cast<int>(num("Q", 8)); }
    long long T() const { return static_cast<long long>(num("T", 1000)); }
    long long steps() const { return static_cast<long long>(num("steps", 1)); }
    std::optional<long long> opt_int(const std::string& key) const;
    std::string str(const std::string& key, const std::string& fallback) const;
    double num(const std::string& key, double fallback) const;

    void validate() const;
};

ExperimentConfig load_config(const std::string& command, const Overrides& o);

// Parses "pos[,pos..]:spinJ:amp;..." with 1-based spin labels.
std::vector<StateEntry> parse_state_string(const std::string& s, int d);

// Parses presets such as "delta:0", "odd", "even", "const:1", "indicator:0,1", "set:0;3".
Observable parse_observable_preset(const std::string& s, int N, int d);

cplx json_amplitude(const json& v);

}  // namespace walklab::cli
