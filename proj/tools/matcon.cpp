#include "matcon/bounds.hpp"
#include "matcon/parallel.hpp"
#include "matcon/report.hpp"
#include "matcon/scenario_io.hpp"
#include "matcon/verification.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace matcon;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Common {
    std::string scenario_path;
    std::string preset;
    std::vector<std::string> params;
    std::string out = ".";
    std::uint64_t seed = 42;
    unsigned threads = 0;
    std::size_t reps = 10000;
    std::vector<double> x{1.0, 2.0, 3.0};
    std::vector<double> xi; // per-command default
    int K = 25;
    std::size_t trials = 100;
    bool record_runtime = false;
};

std::map<std::string, double> parse_params(const std::vector<std::string>& items)
{
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--param", "expected key=value, got '" + item + "'");
        try {
            out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--param", "value of '" + item.substr(0, eq) + "' is not a number");
        }
    }
    return out;
}

struct Loaded {
    ScenarioConfig scenario;
    bool from_preset = false;
    PresetResult preset;
};

Loaded load(const Common& c)
{
    Loaded l;
    if (!c.preset.empty() && !c.scenario_path.empty())
        throw ConfigError("--preset", "give either a scenario file or --preset, not both");
    if (!c.preset.empty()) {
        const auto& names = preset_names();
        if (std::find(names.begin(), names.end(), c.preset) == names.end())
            throw ConfigError("--preset", "unknown preset '" + c.preset + "'");
        try {
            l.preset = corollary_preset(c.preset, parse_params(c.params));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("--param", e.what());
        }
        l.scenario = l.preset.scenario;
        l.from_preset = true;
        return l;
    }
    if (c.scenario_path.empty())
        throw ConfigError("scenario", "a scenario file or --preset is required");
    l.scenario = load_scenario(c.scenario_path);
    if (!l.scenario.preset.empty()) {
        l.preset = corollary_preset(l.scenario.preset, l.scenario.preset_params);
        l.from_preset = true;
    }
    return l;
}

void write_file(const Common& c, const std::string& name, const std::string& content)
{
    fs::create_directories(c.out);
    const auto path = fs::path(c.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_json(const Common& c, const std::string& name, const json& j) { write_file(c, name, j.dump(2) + "\n"); }

// Wall time goes to stderr and a side file so result files stay byte-identical.
void record_runtime(const Common& c, const std::string& command, std::chrono::steady_clock::time_point start)
{
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "%s: runtime_seconds=%.3f\n", command.c_str(), secs);
    write_file(c, command + ".timing", format_double(secs) + "\n");
}

json run_header(const Common& c, const ScenarioConfig& s)
{
    return {{"toolkit_version", kToolkitVersion}, {"seed", c.seed}, {"scenario_config", scenario_to_json(s)}};
}

RunOptions options(const Common& c) { return {c.seed, c.reps, resolve_threads(c.threads)}; }

TailRule rule_for(const Loaded& l, const VarianceReport& report)
{
    return l.from_preset ? l.preset.rule : scenario_rule(l.scenario, report);
}

int cmd_bound(const Common& c)
{
    const auto l = load(c);
    const double xi = c.xi.empty() ? 3.0 : c.xi.front();
    const auto report = analyze(l.scenario, xi);
    const auto rule = rule_for(l, report);
    json j = run_header(c, l.scenario);
    j["variance"] = variance_report_json(l.scenario, report, rule, c.x);
    j["xi"] = xi;
    if (l.from_preset)
        j["preset"] = {{"name", l.preset.scenario.preset}, {"sigma_sq", l.preset.sigma_sq}, {"b_t", l.preset.b_t}};
    j["mean_bound"] = mean_bound(std::sqrt(report.sigma_sq), report.b_t, l.scenario.m, l.scenario.n);
    write_json(c, "bound.json", j);

    std::printf("scenario=%s\n", l.scenario.name.c_str());
    std::printf("sigma_sq=%s\n", format_double(report.sigma_sq).c_str());
    std::printf("b_t=%s\n", format_double(report.b_t).c_str());
    if (l.from_preset)
        std::printf("preset_sigma_sq=%s\n", format_double(l.preset.sigma_sq).c_str());
    for (double x : c.x)
        std::printf("threshold[x=%s]=%s cap=%s\n", format_double(x).c_str(), format_double(rule.threshold(x)).c_str(),
                    format_double(rule.cap(x)).c_str());
    return kExitPass;
}

int cmd_simulate(const Common& c)
{
    const auto l = load(c);
    const auto tensor = l.scenario.resolved_tensor();
    const auto opts = options(c);
    const auto zs = parallel_map(opts.replicates, opts.threads, [&](std::size_t r) {
        return MatrixXd(simulate_scenario(l.scenario, tensor, StreamKey{opts.seed, r}).terminal());
    });
    std::string csv = "replicate,op_norm";
    for (Index i = 0; i < l.scenario.m; ++i)
        for (Index j = 0; j < l.scenario.n; ++j)
            csv += ",z_" + std::to_string(i) + "_" + std::to_string(j);
    csv += "\n";
    for (std::size_t r = 0; r < zs.size(); ++r) {
        csv += std::to_string(r) + "," + format_double(dilation_norm(zs[r]));
        for (Index i = 0; i < zs[r].rows(); ++i)
            for (Index j = 0; j < zs[r].cols(); ++j)
                csv += "," + format_double(zs[r](i, j));
        csv += "\n";
    }
    write_file(c, "simulate.csv", csv);
    return kExitPass;
}

int cmd_verify_tail(const Common& c)
{
    const auto l = load(c);
    const auto report = analyze(l.scenario);
    const auto exp = run_tail_experiment(l.scenario, c.x, options(c), rule_for(l, report));
    write_file(c, "tail.csv", tail_csv({exp}));
    json j = run_header(c, l.scenario);
    j["tail"] = tail_json(exp);
    j["verdict"] = verdict(exp.pass());
    write_json(c, "tail.json", j);
    std::printf("verdict=%s\n", verdict(exp.pass()));
    return exp.pass() ? kExitPass : kExitFail;
}

int cmd_check_supermartingale(const Common& c)
{
    const auto l = load(c);
    std::vector<SupermartingaleCheck> checks;
    for (double xi : c.xi.empty() ? std::vector<double>{1.0} : c.xi)
        checks.push_back(l.scenario.driver == Driver::brownian
                             ? check_supermartingale_continuous(l.scenario, xi, options(c))
                             : check_supermartingale_jump(l.scenario, xi, options(c)));
    const std::string kind = l.scenario.driver == Driver::brownian ? "continuous" : "jump";
    write_file(c, "supermartingale.csv", supermartingale_csv(l.scenario.name, kind, checks));
    bool pass = true;
    json rows = json::array();
    for (const auto& s : checks) {
        pass = pass && s.pass;
        rows.push_back(supermartingale_json(s));
    }
    json j = run_header(c, l.scenario);
    j["supermartingale"] = {{"check", kind}, {"rows", rows}};
    j["verdict"] = verdict(pass);
    write_json(c, "supermartingale.json", j);
    std::printf("verdict=%s\n", verdict(pass));
    return pass ? kExitPass : kExitFail;
}

int cmd_check_lemmas(const Common& c)
{
    std::vector<std::pair<std::string, LemmaCheck>> lemmas;
    for (int k : {0, 1, 2})
        lemmas.emplace_back("4x6:k=" + std::to_string(k), check_odd_power_bound(c.trials, 4, 6, {k}, c.seed));
    lemmas.emplace_back("5x5", check_golden_thompson(c.trials, 5, c.seed));

    std::vector<std::pair<std::string, DeviationCheck>> deviation;
    const std::vector<double> xs{1.0, 2.0};
    const RunOptions opts = options(c);
    deviation.emplace_back("equal", check_deviation_lemma(equal_pair_sampler(3), xs, opts));
    deviation.emplace_back("diagonal_noise", check_deviation_lemma(diagonal_noise_sampler(3), xs, opts));
    deviation.emplace_back("wigner", check_deviation_lemma(wigner_sampler(3), xs, opts));

    bool pass = true;
    json j{{"toolkit_version", kToolkitVersion}, {"seed", c.seed}, {"replicates", c.reps}, {"trials", c.trials}};
    json rows = json::array();
    for (const auto& [param, l] : lemmas) {
        pass = pass && l.pass();
        rows.push_back({{"check", l.name},
                        {"param", param},
                        {"trials", l.trials},
                        {"failures", l.failures},
                        {"worst_margin", l.worst_margin},
                        {"verdict", verdict(l.pass())}});
    }
    for (const auto& [name, d] : deviation) {
        pass = pass && d.pass();
        for (const auto& r : d.rows)
            rows.push_back({{"check", "deviation"},
                            {"param", name},
                            {"x", r.x},
                            {"exceed_count", r.exceed_count},
                            {"upper_cl", r.upper_cl},
                            {"k_hat", r.k_hat},
                            {"bound", r.bound},
                            {"verdict", verdict(r.pass)}});
    }
    j["lemmas"] = rows;
    j["verdict"] = verdict(pass);
    write_file(c, "lemmas.csv", lemma_csv(lemmas, deviation));
    write_json(c, "lemmas.json", j);
    std::printf("verdict=%s\n", verdict(pass));
    return pass ? kExitPass : kExitFail;
}

int cmd_check_compensator(const Common& c)
{
    const auto l = load(c);
    const double xi = c.xi.empty() ? 1.0 : c.xi.front();
    const auto series = check_compensator_domination(l.scenario, xi, c.K);
    json j = run_header(c, l.scenario);
    j["compensator"] = compensator_json(series);
    j["verdict"] = verdict(series.pass);
    write_json(c, "compensator.json", j);
    std::printf("margin=%s tolerance=%s verdict=%s\n", format_double(series.margin).c_str(),
                format_double(series.tolerance).c_str(), verdict(series.pass));
    return series.pass ? kExitPass : kExitFail;
}

int cmd_report(const Common& c)
{
    json report{{"toolkit_version", kToolkitVersion}};
    json sections = json::object();
    bool pass = true;
    for (const char* name : {"bound", "tail", "supermartingale", "lemmas", "compensator"}) {
        const auto path = fs::path(c.out) / (std::string(name) + ".json");
        if (!fs::exists(path))
            continue;
        std::ifstream in(path);
        json j;
        try {
            in >> j;
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string(), e.what());
        }
        if (j.contains("verdict"))
            pass = pass && j["verdict"] == "PASS";
        if (c.record_runtime) {
            std::ifstream t(fs::path(c.out) / (std::string(name) + ".timing"));
            double secs = 0.0;
            if (t >> secs)
                j["runtime_seconds"] = secs;
        }
        sections[name] = std::move(j);
    }
    if (sections.empty())
        throw ConfigError("--out", "no prior outputs found in '" + c.out + "'");
    report["sections"] = sections;
    report["verdict"] = verdict(pass);
    write_json(c, "report.json", report);
    std::printf("verdict=%s\n", verdict(pass));
    return pass ? kExitPass : kExitFail;
}

int cmd_presets(const Common& c)
{
    if (!c.preset.empty()) {
        const auto p = corollary_preset(c.preset, parse_params(c.params));
        std::printf("%s\n", scenario_to_json(p.scenario).dump(2).c_str());
        return kExitPass;
    }
    for (const auto& name : preset_names())
        std::printf("%s\n", name.c_str());
    return kExitPass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Matrix martingale concentration toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolkitVersion);
    Common c;

    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("scenario", c.scenario_path, "Scenario JSON file");
        sub->add_option("--preset", c.preset, "Use a named preset instead of a file");
        sub->add_option("--param", c.params, "Preset parameter key=value (repeatable)");
    };
    auto add_run = [&](CLI::App* sub) {
        sub->add_option("--reps", c.reps, "Monte Carlo replicates")->check(CLI::PositiveNumber);
        sub->add_option("--seed", c.seed, "Master seed");
        sub->add_option("--threads", c.threads, "Worker threads (0: MATCON_THREADS or 1)");
    };
    auto add_out = [&](CLI::App* sub) { sub->add_option("--out", c.out, "Output directory"); };

    auto* bound = app.add_subcommand("bound", "Variance report and thresholds");
    add_scenario(bound);
    add_out(bound);
    bound->add_option("--x", c.x, "Comma-separated x values")->delimiter(',');
    bound->add_option("--xi", c.xi, "xi for the integrability integral")->delimiter(',');

    auto* simulate = app.add_subcommand("simulate", "Simulate terminal values Z_t");
    add_scenario(simulate);
    add_run(simulate);
    add_out(simulate);

    auto* tail = app.add_subcommand("verify-tail", "Monte Carlo tail experiment");
    add_scenario(tail);
    add_run(tail);
    add_out(tail);
    tail->add_option("--x", c.x, "Comma-separated x values")->delimiter(',');

    auto* sm = app.add_subcommand("check-supermartingale", "Terminal mean of the trace-exponential supermartingale");
    add_scenario(sm);
    add_run(sm);
    add_out(sm);
    sm->add_option("--xi", c.xi, "Comma-separated xi values")->delimiter(',');

    auto* lemmas = app.add_subcommand("check-lemmas", "Deviation, odd-power and Golden-Thompson checks");
    add_run(lemmas);
    add_out(lemmas);
    lemmas->add_option("--trials", c.trials, "Random instances per deterministic check");

    auto* comp = app.add_subcommand("check-compensator", "Truncated compensator series domination");
    add_scenario(comp);
    add_out(comp);
    comp->add_option("--xi", c.xi, "xi")->delimiter(',');
    comp->add_option("--K", c.K, "Truncation order (>= 2)");

    auto* report = app.add_subcommand("report", "Aggregate outputs in --out into report.json");
    add_out(report);
    report->add_flag("--record-runtime", c.record_runtime, "Embed wall times from *.timing files");

    auto* presets = app.add_subcommand("presets", "List presets, or print one with --preset");
    presets->add_option("--preset", c.preset, "Preset to print as scenario JSON");
    presets->add_option("--param", c.params, "Preset parameter key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        int code = kExitConfig;
        std::string name;
        if (*bound)
            code = cmd_bound(c), name = "bound";
        else if (*simulate)
            code = cmd_simulate(c), name = "simulate";
        else if (*tail)
            code = cmd_verify_tail(c), name = "tail";
        else if (*sm)
            code = cmd_check_supermartingale(c), name = "supermartingale";
        else if (*lemmas)
            code = cmd_check_lemmas(c), name = "lemmas";
        else if (*comp)
            code = cmd_check_compensator(c), name = "compensator";
        else if (*report)
            code = cmd_report(c);
        else if (*presets)
            code = cmd_presets(c);
        if (!name.empty())
            record_runtime(c, name, start);
        return code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
}
