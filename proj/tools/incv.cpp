// Command-line front end: metrics for labelled cohorts, alpha curves,
// probit scenarios, the scenario grid, and seeded simulation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "incv/incv.hpp"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kInput = 2, kNumerical = 3 };

struct Common {
    std::string data;
    std::string label = "D";
    std::string old_model;
    std::string new_model;
    std::string out;
    std::string ties = "strict";
    std::size_t alpha_points = 999;
};

struct ScenarioArgs {
    std::optional<double> beta1, beta2, beta3, pi;
    double ee_tol = 1e-9;
    int density_nodes = 2001;
};

incv::TieRule tie_rule(const std::string& s) {
    if (s == "strict") return incv::TieRule::Strict;
    if (s == "midrank") return incv::TieRule::Midrank;
    throw incv::InputError("--ties must be 'strict' or 'midrank'");
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    auto out = incv::io::open_output(path);
    out << text;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    const auto slash = path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix;
}

incv::probit::StudySettings settings_from(const ScenarioArgs& a) {
    incv::probit::StudySettings st;
    if (!(a.ee_tol > 0.0)) throw incv::InputError("--ee-tol must be positive");
    if (a.density_nodes < 5) throw incv::InputError("--density-nodes must be at least 5");
    st.ee_tol = a.ee_tol;
    st.density_nodes = a.density_nodes;
    return st;
}

incv::probit::ScenarioSpec scenario_from(const ScenarioArgs& a) {
    if (!a.beta1 || !a.beta2 || !a.beta3 || !a.pi) {
        throw incv::InputError("--beta1, --beta2, --beta3 and --pi are all required");
    }
    if (!(*a.pi > 0.0 && *a.pi < 1.0)) throw incv::InputError("--pi must lie strictly inside (0, 1)");
    return incv::probit::make_scenario(*a.beta1, *a.beta2, *a.beta3, *a.pi, settings_from(a));
}

// ---------------------------------------------------------------------------

int run_evaluate(const Common& c) {
    std::vector<std::string> cols;
    if (!c.old_model.empty()) cols.push_back(c.old_model);
    if (!c.new_model.empty()) cols.push_back(c.new_model);
    if (cols.size() == 2 && cols[0] == cols[1]) cols.pop_back();
    const auto table = incv::io::read_table_file(c.data, c.label, cols);
    const auto cohort = table.to_cohort();
    const auto ties = tie_rule(c.ties);

    json report;
    report["n"] = cohort.size();
    report["events"] = cohort.events();
    report["event_rate"] = incv::io::number(cohort.event_rate());
    json models = json::object();
    for (const auto& name : table.names) models[name] = incv::io::to_json(incv::metric_triple(cohort, name, ties));
    report["models"] = models;
    if (!c.old_model.empty() && !c.new_model.empty()) {
        auto r = incv::io::to_json(incv::incremental_value(cohort, c.old_model, c.new_model, ties));
        r["old"] = c.old_model;
        r["new"] = c.new_model;
        report["incremental_value"] = r;
    }
    emit(c.out, report.dump(2) + "\n");
    return kOk;
}

int run_curves(const Common& c) {
    if (c.old_model.empty() || c.new_model.empty()) throw incv::InputError("curves needs --old and --new");
    if (c.alpha_points < 1) throw incv::InputError("--alpha-points must be at least 1");
    const auto table = incv::io::read_table_file(c.data, c.label, {c.old_model, c.new_model});
    const auto cohort = table.to_cohort();
    const auto grid = incv::alpha_grid(c.alpha_points);
    const auto delta = incv::delta_alpha_curve(cohort, c.old_model, c.new_model, grid);
    const auto weight = incv::ap_weight_curve(cohort, c.old_model, c.new_model, grid);

    std::ostringstream curve;
    curve << "alpha,delta,ap_weight,weighted_delta\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        curve << incv::io::format_full(grid[i]) << ',' << incv::io::format_full(delta[i].value) << ','
              << incv::io::format_full(weight[i].value) << ','
              << incv::io::format_full(weight[i].value * delta[i].value) << '\n';
    }
    emit(c.out, curve.str());

    if (!c.out.empty() && c.out != "-") {
        std::ostringstream roc, pr;
        roc << "model,fpr,tpr\n";
        pr << "model,recall,precision\n";
        for (const auto& m : {c.old_model, c.new_model}) {
            for (const auto& p : incv::roc_points(cohort, m)) {
                roc << m << ',' << incv::io::format_full(p.x) << ',' << incv::io::format_full(p.y) << '\n';
            }
            for (const auto& p : incv::pr_points(cohort, m)) {
                pr << m << ',' << incv::io::format_full(p.x) << ',' << incv::io::format_full(p.y) << '\n';
            }
        }
        emit(with_suffix(c.out, "_roc.csv"), roc.str());
        emit(with_suffix(c.out, "_pr.csv"), pr.str());
    }
    return kOk;
}

int run_scenario(const ScenarioArgs& a, const std::string& out) {
    const auto st = settings_from(a);
    const auto spec = scenario_from(a);
    const auto r = incv::probit::evaluate_scenario(spec, st);
    emit(out, incv::io::to_json(r).dump(2) + "\n");
    return kOk;
}

std::vector<double> number_list(const json& j, const char* key, std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_array()) throw incv::InputError(std::string("grid config: '") + key + "' must be an array");
    std::vector<double> v;
    for (const auto& x : j.at(key)) {
        if (!x.is_number()) throw incv::InputError(std::string("grid config: '") + key + "' must hold numbers");
        v.push_back(x.get<double>());
    }
    return v;
}

incv::study::GridSpec grid_from(const std::string& config_path, bool no_interaction) {
    auto g = no_interaction ? incv::study::GridSpec::no_interaction() : incv::study::GridSpec::standard();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw incv::InputError("cannot open '" + config_path + "' for reading");
        json j;
        try {
            j = json::parse(in);
        } catch (const json::parse_error& e) {
            throw incv::InputError("grid config: " + std::string(e.what()));
        }
        if (!j.is_object()) throw incv::InputError("grid config: expected a JSON object");
        g.beta1 = number_list(j, "beta1", g.beta1);
        g.beta2 = number_list(j, "beta2", g.beta2);
        g.beta3 = number_list(j, "beta3", g.beta3);
        g.pi = number_list(j, "pi", g.pi);
    }
    g.validate();
    return g;
}

int run_grid(const std::string& config, bool no_interaction, const ScenarioArgs& a, const std::string& out,
             const std::string& summary_out, unsigned threads, bool quiet) {
    if (out.empty()) throw incv::InputError("grid needs --out for the results CSV");
    const auto grid = grid_from(config, no_interaction);
    const auto st = settings_from(a);
    incv::study::RunOptions opt;
    opt.threads = threads;
    if (!quiet) {
        opt.progress = [](std::size_t done, std::size_t total) {
            if (done % 100 == 0 || done == total) std::cerr << "scenarios: " << done << "/" << total << "\n";
        };
    }
    const auto entries = incv::study::run_grid(grid, st, opt);
    {
        std::ostringstream csv;
        incv::io::write_grid_csv(csv, entries);
        emit(out, csv.str());
    }
    const auto summary = incv::study::summarize(entries);
    emit(summary_out, incv::io::to_json(summary).dump(2) + "\n");
    for (const auto& f : summary.failures) std::cerr << "failed: " << f << "\n";
    return kOk;
}

incv::sim::NamedGaussian parse_model(const std::string& text, double pi) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0) {
        throw incv::InputError("--model expects NAME:EVENT_MEAN,EVENT_VAR,NONEVENT_MEAN,NONEVENT_VAR, got '" + text + "'");
    }
    std::vector<double> v;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        double x;
        if (!incv::io::detail::parse_double(incv::io::detail::trim(item), x)) {
            throw incv::InputError("--model '" + text + "': '" + item + "' is not a number");
        }
        v.push_back(x);
    }
    if (v.size() != 4) throw incv::InputError("--model '" + text + "': expected four numbers");
    incv::sim::NamedGaussian m{text.substr(0, colon), {v[0], v[1], v[2], v[3], pi}};
    m.pair.validate();
    return m;
}

int run_simulate(const ScenarioArgs& a, const std::vector<std::string>& models, std::optional<std::uint64_t> seed,
                 std::size_t n, const std::string& label, const std::string& out) {
    if (!seed) throw incv::InputError("simulate needs --seed");
    if (n < 2) throw incv::InputError("simulate: --n must be at least 2");
    incv::io::Table t;
    if (!models.empty()) {
        if (!a.pi) throw incv::InputError("simulate with --model needs --pi");
        std::vector<incv::sim::NamedGaussian> ms;
        for (const auto& m : models) ms.push_back(parse_model(m, *a.pi));
        t = incv::sim::simulate_gaussian(ms, n, *seed);
    } else {
        t = incv::sim::simulate_scenario(scenario_from(a), n, *seed, settings_from(a));
    }
    t.label = label;
    std::ostringstream csv;
    incv::io::write_table(csv, t);
    emit(out, csv.str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incremental value of risk models: AUC, average precision and scaled Brier score"};
    app.require_subcommand(1);

    Common common;
    ScenarioArgs sargs;
    std::string config, summary_out;
    bool no_interaction = false, quiet = false;
    unsigned threads = 0;
    std::vector<std::string> models;
    std::optional<std::uint64_t> seed;
    std::size_t n = 1000;

    auto add_data = [&](CLI::App* sub, bool pair_required) {
        sub->add_option("--data", common.data, "Input CSV with a header row")->required()->check(CLI::ExistingFile);
        sub->add_option("--label", common.label, "Binary outcome column (values 0/1)")->capture_default_str();
        auto* o = sub->add_option("--old", common.old_model, "Baseline model column");
        auto* w = sub->add_option("--new", common.new_model, "New model column");
        if (pair_required) {
            o->required();
            w->required();
        }
        sub->add_option("--out", common.out, "Output path (default: standard output)");
    };
    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("--beta1", sargs.beta1, "Coefficient of X");
        sub->add_option("--beta2", sargs.beta2, "Coefficient of Y");
        sub->add_option("--beta3", sargs.beta3, "Coefficient of X*Y");
        sub->add_option("--pi", sargs.pi, "Event rate in (0, 1)");
    };
    auto add_numerics = [&](CLI::App* sub) {
        sub->add_option("--ee-tol", sargs.ee_tol, "Residual tolerance for the working-model fits")->capture_default_str();
        sub->add_option("--density-nodes", sargs.density_nodes, "Score-density tabulation nodes")->capture_default_str();
    };

    auto* evaluate = app.add_subcommand("evaluate", "AUC, AP and sBrS per model column, and their increments");
    add_data(evaluate, false);
    evaluate->add_option("--ties", common.ties, "AUC tie handling: strict or midrank")
        ->check(CLI::IsMember({"strict", "midrank"}))
        ->capture_default_str();

    auto* curves = app.add_subcommand("curves", "Delta(alpha) and AP weight curves, plus ROC and PR points");
    add_data(curves, true);
    curves->add_option("--alpha-points", common.alpha_points, "Number of interior alpha grid points")
        ->capture_default_str();

    auto* scenario = app.add_subcommand("scenario", "Evaluate one probit scenario");
    add_scenario(scenario);
    add_numerics(scenario);
    scenario->add_option("--out", common.out, "Output JSON path (default: standard output)");

    auto* grid = app.add_subcommand("grid", "Evaluate a grid of probit scenarios");
    grid->add_option("--grid-config", config, "JSON file with beta1, beta2, beta3 and pi lists")
        ->check(CLI::ExistingFile);
    grid->add_flag("--no-interaction", no_interaction, "Default grid with beta3 = 0");
    grid->add_option("--out", common.out, "Results CSV path")->required();
    grid->add_option("--summary", summary_out, "Summary JSON path (default: standard output)");
    grid->add_option("--threads", threads, "Worker threads (default: all cores)");
    grid->add_flag("--quiet", quiet, "No progress output");
    add_numerics(grid);

    auto* simulate = app.add_subcommand("simulate", "Draw a seeded cohort from Gaussian score models or a scenario");
    add_scenario(simulate);
    simulate->add_option("--model", models, "NAME:EVENT_MEAN,EVENT_VAR,NONEVENT_MEAN,NONEVENT_VAR (repeatable)");
    simulate->add_option("--seed", seed, "RNG seed")->required();
    simulate->add_option("--n", n, "Number of subjects")->capture_default_str();
    simulate->add_option("--label", common.label, "Name of the outcome column")->capture_default_str();
    simulate->add_option("--out", common.out, "Output CSV path (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (*evaluate) return run_evaluate(common);
        if (*curves) return run_curves(common);
        if (*scenario) return run_scenario(sargs, common.out);
        if (*grid) return run_grid(config, no_interaction, sargs, common.out, summary_out, threads, quiet);
        if (*simulate) return run_simulate(sargs, models, seed, n, common.label, common.out);
    } catch (const incv::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    } catch (const incv::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    }
    return kInput;
}
