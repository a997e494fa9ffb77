#include "forestlab/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forestlab/errors.hpp"
#include "forestlab/experiments.hpp"
#include "forestlab/grid.hpp"
#include "forestlab/io.hpp"
#include "forestlab/profile.hpp"
#include "forestlab/rationality.hpp"
#include "forestlab/sphere_cover.hpp"
#include "forestlab/torus_flow.hpp"

namespace forestlab {

namespace {

std::vector<double> parse_csv_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ValidationError(std::string(what) + ": bad number '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
            ++used;
        if (used != item.size())
            throw ValidationError(std::string(what) + ": bad number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    Eigen::VectorXd x(static_cast<int>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
    return x;
}

Eigen::VectorXd parse_direction_vector(const std::string& text, const char* what) {
    if (text == "golden") {
        Eigen::VectorXd u(2);
        u << 1.0, 0.5 * (1.0 + std::sqrt(5.0));
        return u;
    }
    return to_eigen(parse_csv_doubles(text, what));
}

void table_lines(const Json& node, const std::string& prefix, std::ostream& os) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it)
            table_lines(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
                        os);
    } else if (node.is_array()) {
        if (node.size() > 24) {
            os << prefix << " = <" << node.size() << " entries>\n";
            return;
        }
        for (size_t i = 0; i < node.size(); ++i)
            table_lines(node[i], prefix + "[" + std::to_string(i) + "]", os);
    } else {
        os << prefix << " = " << node.dump() << "\n";
    }
}

void emit(const Json& artifact, const std::string& out_path, const std::string& format) {
    std::string text;
    if (format == "table") {
        std::ostringstream os;
        table_lines(artifact, "", os);
        text = os.str();
    } else {
        text = artifact.dump(2) + "\n";
    }
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
}

int resolve_threads(int flag_value, bool flag_given) {
    if (flag_given) return flag_value;
    if (const char* env = std::getenv("FORESTLAB_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception&) {
            throw ValidationError("FORESTLAB_THREADS must be an integer");
        }
    }
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"dense-forest and lattice-visibility toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int threads = 1;
    std::uint64_t budget = 0;  // 0: per-module defaults
    std::string out_path;
    std::string format = "json";
    app.add_option("--seed", seed, "root random seed");
    auto* threads_opt = app.add_option("--threads", threads, "worker threads");
    app.add_option("--budget", budget, "override enumeration/search budgets");
    app.add_option("--out", out_path, "write the artifact here instead of stdout");
    app.add_option("--format", format, "json or table")
        ->check(CLI::IsMember({"json", "table"}));

    auto* check = app.add_subcommand("check", "decide the dense-forest criterion");
    std::string check_grids;
    long long check_height = kDefaultHeight;
    double check_tol = kDefaultRelationTol;
    check->add_option("--grids", check_grids, "forest JSON file or preset")->required();
    check->add_option("--height", check_height, "witness height bound");
    check->add_option("--tol", check_tol, "relation tolerance");

    auto* vis = app.add_subcommand("visibility", "directional visibility queries");
    std::string vis_grids, vis_anchor, vis_direction, vis_levels;
    double vis_epsilon = 0.0, vis_length = 0.0;
    int vis_anchors = 16;
    vis->add_option("--grids", vis_grids, "forest JSON file or preset")->required();
    auto* vis_eps_opt = vis->add_option("--epsilon", vis_epsilon, "ball radius");
    vis->add_option("--anchor", vis_anchor, "segment centre (comma separated)");
    vis->add_option("--direction", vis_direction, "sight direction (comma separated)");
    vis->add_option("--length-budget", vis_length, "give-up half-length");
    auto* vis_levels_opt =
        vis->add_option("--levels", vis_levels, "profile mode: levels l for eps=2^-l");
    vis->add_option("--anchors", vis_anchors, "profile mode: anchor count");

    auto* flow = app.add_subcommand("flow", "torus flow analyses");
    std::string flow_u, flow_mode = "fill", flow_ratios, flow_targets;
    double flow_delta = 0.0, flow_horizon = -1.0, flow_c = 0.0;
    long long flow_s = 0, flow_x = 0;
    flow->add_option("--u", flow_u, "direction (comma separated) or preset 'golden'");
    flow->add_option("--delta", flow_delta, "density radius");
    flow->add_option("--mode", flow_mode, "fill|dense|discrete|hypothesis|witness|dirichlet|transfer")
        ->check(CLI::IsMember(
            {"fill", "dense", "discrete", "hypothesis", "witness", "dirichlet", "transfer"}));
    flow->add_option("-S,--section", flow_s, "discrete section range");
    flow->add_option("--horizon", flow_horizon, "continuous horizon");
    flow->add_option("--ratios", flow_ratios, "ratio list for dirichlet/transfer");
    flow->add_option("--targets", flow_targets, "inhomogeneous targets");
    flow->add_option("-C,--homogeneous-min", flow_c, "verified homogeneous minimum");
    flow->add_option("-X,--range", flow_x, "approximation range");

    auto* cover = app.add_subcommand("cover", "projective cap covers");
    int cover_d = 1;
    double cover_eta = 0.0;
    std::uint64_t cover_trials = 0;
    cover->add_option("--d", cover_d, "projective dimension")->required();
    cover->add_option("--eta", cover_eta, "cap radius")->required();
    cover->add_option("--trials", cover_trials, "verification sample count");

    auto* exp = app.add_subcommand("experiment", "random-forest visibility sweeps");
    std::string exp_manifest;
    exp->add_option("--manifest", exp_manifest, "manifest JSON file")->required();

    auto* sig = app.add_subcommand("sigma", "exponent penalty for k grids in dimension d");
    int sig_d = 0, sig_k = 0;
    sig->add_option("--d", sig_d, "dimension")->required();
    sig->add_option("--k", sig_k, "grid count")->required();

    std::vector<const char*> argv;
    argv.push_back("forestlab");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        threads = resolve_threads(threads, threads_opt->count() > 0);
        if (threads < 1) throw ValidationError("threads must be >= 1");

        Json config;
        config["seed"] = seed;
        config["threads"] = threads;
        config["budget"] = budget;
        config["format"] = format;

        if (app.got_subcommand(check)) {
            config["subcommand"] = "check";
            config["grids"] = check_grids;
            config["height"] = check_height;
            config["tol"] = check_tol;
            Forest forest = load_forest(check_grids);
            std::vector<Matrix> mats;
            for (const auto& g : forest.grids) mats.push_back(g.basis);
            auto verdict = dense_forest_check(mats, check_height, check_tol,
                                              budget ? budget : kDefaultSearchBudget);
            Json artifact;
            artifact["config"] = config;
            artifact["verdict"] = verdict_to_json(verdict);
            emit(artifact, out_path, format);
            return verdict.status == ForestVerdict::Status::NotDenseForest
                       ? kExitNegative
                       : kExitOk;
        }

        if (app.got_subcommand(vis)) {
            config["subcommand"] = "visibility";
            config["grids"] = vis_grids;
            Forest forest = load_forest(vis_grids);
            const int n = forest.dim();
            std::uint64_t cells = budget ? budget : kDefaultCellBudget;
            Json artifact;
            if (vis_levels_opt->count() > 0) {
                ProfilePlan plan;
                for (double l : parse_csv_doubles(vis_levels, "--levels")) {
                    auto li = static_cast<int>(l);
                    if (li < 1 || static_cast<double>(li) != l)
                        throw ValidationError("--levels entries must be positive integers");
                    plan.levels.push_back(li);
                    double eps = std::pow(2.0, -li);
                    plan.covers.push_back(build_cap_cover(n - 1, eps));
                    plan.budgets.push_back(vis_length > 0.0
                                               ? vis_length
                                               : default_length_budget(eps, n));
                }
                plan.anchor_count = vis_anchors;
                plan.cell_budget = cells;
                config["levels"] = plan.levels;
                config["anchors"] = vis_anchors;
                if (vis_length > 0.0) config["length_budget"] = vis_length;
                auto profile = visibility_profile(forest, plan);
                Json rows = Json::array();
                bool any_blocked = false;
                for (const auto& p : profile) {
                    Json r;
                    r["level"] = p.level;
                    r["epsilon"] = p.epsilon;
                    r["v_hat"] = p.v_hat;
                    r["blocked"] = p.blocked;
                    r["blocked_count"] = p.blocked_count;
                    r["samples"] = p.samples;
                    if (p.worst_anchor.size()) {
                        r["worst_anchor"] = Json::array();
                        for (int i = 0; i < p.worst_anchor.size(); ++i)
                            r["worst_anchor"].push_back(p.worst_anchor[i]);
                        r["worst_direction"] = Json::array();
                        for (int i = 0; i < p.worst_direction.size(); ++i)
                            r["worst_direction"].push_back(p.worst_direction[i]);
                    }
                    rows.push_back(r);
                    any_blocked = any_blocked || p.blocked;
                }
                artifact["config"] = config;
                artifact["profile"] = rows;
                emit(artifact, out_path, format);
                return any_blocked ? kExitNegative : kExitOk;
            }
            if (vis_eps_opt->count() == 0)
                throw ValidationError("--epsilon is required for a single query");
            if (vis_direction.empty())
                throw ValidationError("--direction is required for a single query");
            Eigen::VectorXd anchor = Eigen::VectorXd::Zero(n);
            if (!vis_anchor.empty())
                anchor = to_eigen(parse_csv_doubles(vis_anchor, "--anchor"));
            Eigen::VectorXd dir = to_eigen(parse_csv_doubles(vis_direction, "--direction"));
            if (anchor.size() != n || dir.size() != n)
                throw ValidationError("anchor/direction dimension mismatch");
            if (dir.norm() == 0.0) throw ValidationError("direction must be nonzero");
            dir.normalize();
            double length = vis_length > 0.0 ? vis_length
                                             : default_length_budget(vis_epsilon, n);
            SegmentQuery q(anchor, dir, vis_epsilon, length);
            auto outcome = directional_visibility(forest, q, cells);
            config["epsilon"] = vis_epsilon;
            config["length_budget"] = length;
            Json artifact2;
            artifact2["config"] = config;
            artifact2["visibility"] = visibility_to_json(outcome);
            emit(artifact2, out_path, format);
            return outcome.hit ? kExitOk : kExitNegative;
        }

        if (app.got_subcommand(flow)) {
            config["subcommand"] = "flow";
            config["mode"] = flow_mode;
            std::uint64_t boxes = budget ? budget : kDefaultBoxBudget;
            Json artifact;
            artifact["config"] = config;
            if (flow_mode == "dirichlet" || flow_mode == "transfer") {
                if (flow_ratios.empty()) throw ValidationError("--ratios is required");
                if (flow_x < 1) throw ValidationError("-X must be >= 1");
                Eigen::VectorXd ratios =
                    to_eigen(parse_csv_doubles(flow_ratios, "--ratios"));
                config["ratios"] = flow_ratios;
                config["X"] = flow_x;
                artifact["config"] = config;
                if (flow_mode == "dirichlet") {
                    auto res = dirichlet_witness(ratios, flow_x);
                    Json r;
                    r["m"] = res.m;
                    r["value"] = res.value;
                    r["bound"] = res.bound;
                    r["within_bound"] = res.within_bound;
                    artifact["dirichlet"] = r;
                    emit(artifact, out_path, format);
                    return kExitOk;
                }
                if (flow_targets.empty()) throw ValidationError("--targets is required");
                if (!(flow_c > 0.0)) throw ValidationError("-C must be positive");
                Eigen::VectorXd targets =
                    to_eigen(parse_csv_doubles(flow_targets, "--targets"));
                auto res = transference_apply(ratios, flow_c, flow_x, targets);
                Json r;
                r["x"] = res.x;
                r["error"] = res.error;
                r["h"] = res.h;
                r["c_prime"] = res.c_prime;
                r["x_prime"] = res.x_prime;
                artifact["transference"] = r;
                emit(artifact, out_path, format);
                return kExitOk;
            }
            if (flow_u.empty()) throw ValidationError("--u is required");
            Eigen::VectorXd u = parse_direction_vector(flow_u, "--u");
            config["u"] = flow_u;
            if (flow_mode == "fill" || flow_mode == "dense" || flow_mode == "discrete" ||
                flow_mode == "hypothesis")
                if (!(flow_delta > 0.0)) throw ValidationError("--delta must be positive");
            config["delta"] = flow_delta;
            artifact["config"] = config;
            if (flow_mode == "fill") {
                FillingOptions opts;
                opts.box_budget = boxes;
                auto fill = filling_time(u, flow_delta, opts);
                artifact["filling"] = filling_to_json(fill);
                emit(artifact, out_path, format);
                return fill.infinite ? kExitNegative : kExitOk;
            }
            if (flow_mode == "dense") {
                if (!(flow_horizon >= 0.0)) throw ValidationError("--horizon is required");
                auto rep = flow_density_continuous(u, flow_horizon, flow_delta, boxes);
                artifact["density"] = density_to_json(rep);
                emit(artifact, out_path, format);
                return !rep.dense && rep.certified ? kExitNegative : kExitOk;
            }
            if (flow_s < 1) throw ValidationError("-S must be >= 1");
            config["S"] = flow_s;
            artifact["config"] = config;
            if (flow_mode == "discrete") {
                auto rep = flow_density_discrete(u, flow_s, flow_delta, boxes);
                artifact["density"] = density_to_json(rep);
                emit(artifact, out_path, format);
                return !rep.dense && rep.certified ? kExitNegative : kExitOk;
            }
            if (flow_mode == "hypothesis") {
                auto check3 = flow_density_hypothesis(u, flow_s, flow_delta);
                Json r;
                r["holds"] = check3.holds;
                r["threshold"] = check3.threshold;
                r["range"] = check3.range;
                if (!check3.holds) {
                    r["violator"] = check3.violator;
                    r["value"] = check3.value;
                }
                artifact["hypothesis"] = r;
                emit(artifact, out_path, format);
                return check3.holds ? kExitOk : kExitNegative;
            }
            if (!(flow_delta > 0.0)) throw ValidationError("--delta must be positive");
            auto witness = diophantine_witness_search(u, flow_s, flow_delta);
            Json r;
            r["found"] = witness.has_value();
            if (witness) {
                Json w;
                w["q"] = witness->q;
                w["sup_norm"] = witness->sup_norm;
                w["psi"] = witness->psi;
                w["norm_bound"] = witness->norm_bound;
                w["psi_bound"] = witness->psi_bound;
                r["witness"] = w;
            }
            artifact["dual_witness"] = r;
            emit(artifact, out_path, format);
            return kExitOk;
        }

        if (app.got_subcommand(cover)) {
            config["subcommand"] = "cover";
            config["d"] = cover_d;
            config["eta"] = cover_eta;
            config["trials"] = cover_trials;
            auto c = build_cap_cover(cover_d, cover_eta);
            if (cover_trials > 0) verify_cover(c, cover_trials, seed);
            Json artifact;
            artifact["config"] = config;
            artifact["cover"] = cover_to_json(c);
            emit(artifact, out_path, format);
            return kExitOk;
        }

        if (app.got_subcommand(exp)) {
            config["subcommand"] = "experiment";
            config["manifest"] = exp_manifest;
            auto manifest = parse_manifest(read_json_file(exp_manifest));
            auto result = run_experiment(manifest);
            Json artifact;
            artifact["config"] = config;
            artifact["summary"] = summary_to_json(result);
            emit(artifact, out_path, format);
            return kExitOk;
        }

        config["subcommand"] = "sigma";
        double value = sigma_exponent(sig_d, sig_k);
        if (out_path.empty())
            std::cout << format_double(value) << "\n";
        else
            write_text_file(out_path, format_double(value) + "\n");
        return kExitOk;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const HypothesisViolated& e) {
        std::cerr << "error: hypothesis fails at index " << e.index << ": " << e.what()
                  << "\n";
        return kExitInvalid;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << " (budget " << e.budget << ")\n";
        return kExitBudget;
    }
}

}  // namespace forestlab
