#include "matcon/scenario_io.hpp"

#include "matcon/bounds.hpp"

#include <fstream>
#include <set>

namespace matcon {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& prefix)
{
    const std::string field = prefix.empty() ? key : prefix + "." + key;
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(field, "missing");
    return j.at(key);
}

double number(const json& j, const std::string& field)
{
    if (!j.is_number())
        throw ConfigError(field, "expected a number");
    return j.get<double>();
}

Index integer(const json& j, const std::string& field)
{
    if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
        throw ConfigError(field, "expected an integer");
    return static_cast<Index>(j.get<double>());
}

std::string text(const json& j, const std::string& field)
{
    if (!j.is_string())
        throw ConfigError(field, "expected a string");
    return j.get<std::string>();
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix)
{
    if (!j.is_object())
        throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw ConfigError(prefix.empty() ? key : prefix + "." + key, "unknown field");
}

Tensor4d tensor_from_json(const json& j, Index m, Index n, Index p, Index q, const std::string& field)
{
    auto len = [&](const json& a, Index want, const std::string& f, const char* what) {
        if (!a.is_array())
            throw ConfigError(f, "expected an array");
        if (static_cast<Index>(a.size()) != want)
            throw ConfigError(f, "length (" + std::to_string(a.size()) + ") does not match dims." + what + " (" +
                                     std::to_string(want) + ")");
    };
    Tensor4d t(m, n, p, q);
    len(j, m, field, "m");
    for (Index i = 0; i < m; ++i) {
        const std::string fi = field + "[" + std::to_string(i) + "]";
        len(j[i], n, fi, "n");
        for (Index jj = 0; jj < n; ++jj) {
            const std::string fj = fi + "[" + std::to_string(jj) + "]";
            len(j[i][jj], p, fj, "p");
            for (Index k = 0; k < p; ++k) {
                const std::string fk = fj + "[" + std::to_string(k) + "]";
                len(j[i][jj][k], q, fk, "q");
                for (Index l = 0; l < q; ++l)
                    t.slice(k, l)(i, jj) = number(j[i][jj][k][l], fk + "[" + std::to_string(l) + "]");
            }
        }
    }
    return t;
}

json tensor_to_json(const Tensor4d& t)
{
    json out = json::array();
    for (Index i = 0; i < t.m(); ++i) {
        json row = json::array();
        for (Index j = 0; j < t.n(); ++j) {
            json kk = json::array();
            for (Index k = 0; k < t.p(); ++k) {
                json ll = json::array();
                for (Index l = 0; l < t.q(); ++l)
                    ll.push_back(t(i, j, k, l));
                kk.push_back(std::move(ll));
            }
            row.push_back(std::move(kk));
        }
        out.push_back(std::move(row));
    }
    return out;
}

// {"breakpoints": [...], "values": [...]} or {"value": v}, the latter
// constant on [0, horizon].
template <typename Value, typename Parse>
PiecewiseProcess<Value> process_from_json(const json& j, double horizon, const std::string& field, Parse&& parse)
{
    if (!j.is_object())
        throw ConfigError(field, "expected an object with 'value' or 'breakpoints' and 'values'");
    if (j.contains("value")) {
        check_keys(j, {"value"}, field);
        return PiecewiseProcess<Value>::constant(parse(j.at("value"), field + ".value"), horizon);
    }
    check_keys(j, {"breakpoints", "values"}, field);
    const json& bj = require(j, "breakpoints", field);
    const json& vj = require(j, "values", field);
    if (!bj.is_array() || bj.size() < 2)
        throw ConfigError(field + ".breakpoints", "expected an array of at least two times");
    if (!vj.is_array() || vj.size() + 1 != bj.size())
        throw ConfigError(field + ".values", "expected one value per piece (" + std::to_string(bj.size() - 1) + ")");
    std::vector<double> bps;
    for (std::size_t i = 0; i < bj.size(); ++i)
        bps.push_back(number(bj[i], field + ".breakpoints[" + std::to_string(i) + "]"));
    std::vector<Value> vals;
    for (std::size_t i = 0; i < vj.size(); ++i)
        vals.push_back(parse(vj[i], field + ".values[" + std::to_string(i) + "]"));
    try {
        return PiecewiseProcess<Value>(std::move(bps), std::move(vals));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field + ".breakpoints", e.what());
    }
}

template <typename Value, typename Dump>
json process_to_json(const PiecewiseProcess<Value>& proc, Dump&& dump)
{
    json vals = json::array();
    for (const auto& v : proc.values())
        vals.push_back(dump(v));
    return json{{"breakpoints", proc.breakpoints()}, {"values", std::move(vals)}};
}

json marks_to_json(const JumpMarkSpec& marks)
{
    json j{{"law", to_string(marks.law())}};
    if (marks.law() != MarkLaw::constant_one)
        j["a"] = marks.a();
    if (marks.law() == MarkLaw::two_point)
        j["prob"] = marks.prob();
    return j;
}

JumpMarkSpec marks_from_json(const json& j)
{
    check_keys(j, {"law", "a", "prob"}, "marks");
    MarkLaw law;
    try {
        law = mark_law_from_string(text(require(j, "law", "marks"), "marks.law"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("marks.law", e.what());
    }
    const double a = j.contains("a") ? number(j.at("a"), "marks.a") : 1.0;
    try {
        switch (law) {
        case MarkLaw::constant_one: return JumpMarkSpec::constant_one();
        case MarkLaw::uniform: return JumpMarkSpec::uniform(a);
        case MarkLaw::rademacher_scaled: return JumpMarkSpec::rademacher_scaled(a);
        case MarkLaw::two_point:
            return JumpMarkSpec::two_point(a, number(require(j, "prob", "marks"), "marks.prob"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("marks", e.what());
    }
    throw ConfigError("marks.law", "unsupported law");
}

} // namespace

json matrix_to_json(const MatrixXd& a)
{
    json out = json::array();
    for (Index i = 0; i < a.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < a.cols(); ++j)
            row.push_back(a(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

MatrixXd matrix_from_json(const json& j, const std::string& field)
{
    if (!j.is_array() || j.empty())
        throw ConfigError(field, "expected a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    if (cols == 0)
        throw ConfigError(field, "expected a non-empty array of rows");
    MatrixXd a(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string fi = field + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != cols)
            throw ConfigError(fi, "row length differs from row 0 (" + std::to_string(cols) + ")");
        for (std::size_t c = 0; c < cols; ++c)
            a(static_cast<Index>(i), static_cast<Index>(c)) = number(j[i][c], fi + "[" + std::to_string(c) + "]");
    }
    return a;
}

ScenarioConfig scenario_from_json(const json& j)
{
    check_keys(j,
               {"name", "dims", "driver", "horizon", "T", "AB", "integrand", "C", "intensity", "marks", "grid_steps",
                "threshold_form", "preset"},
               "");
    const int forms = int(j.contains("T")) + int(j.contains("AB")) + int(j.contains("integrand"));
    if (forms > 1)
        throw ConfigError("T|AB|integrand", "exactly one coefficient form may be given");

    ScenarioConfig s;
    std::map<std::string, double> preset_params;
    std::string preset_name;
    if (j.contains("preset")) {
        const json& pj = j.at("preset");
        check_keys(pj, {"name", "params"}, "preset");
        preset_name = text(require(pj, "name", "preset"), "preset.name");
        if (pj.contains("params")) {
            if (!pj.at("params").is_object())
                throw ConfigError("preset.params", "expected an object");
            for (const auto& [k, v] : pj.at("params").items())
                preset_params[k] = number(v, "preset.params." + k);
        }
        const auto& names = preset_names();
        if (std::find(names.begin(), names.end(), preset_name) == names.end())
            throw ConfigError("preset.name", "unknown preset '" + preset_name + "'");
    }

    if (forms == 0) {
        if (preset_name.empty())
            throw ConfigError("T|AB|integrand", "no coefficient form and no preset given");
        try {
            s = corollary_preset(preset_name, preset_params).scenario;
        } catch (const std::invalid_argument& e) {
            throw ConfigError("preset.params", e.what());
        }
        if (j.contains("name"))
            s.name = text(j.at("name"), "name");
        s.validate();
        return s;
    }

    s.preset = preset_name;
    s.preset_params = preset_params;
    if (j.contains("name"))
        s.name = text(j.at("name"), "name");
    const json& dims = require(j, "dims", "");
    check_keys(dims, {"m", "n", "p", "q"}, "dims");
    s.m = integer(require(dims, "m", "dims"), "dims.m");
    s.n = integer(require(dims, "n", "dims"), "dims.n");
    s.p = integer(require(dims, "p", "dims"), "dims.p");
    s.q = integer(require(dims, "q", "dims"), "dims.q");
    if (s.m < 1 || s.n < 1 || s.p < 1 || s.q < 1)
        throw ConfigError("dims", "all dimensions must be >= 1");
    s.driver = driver_from_string(text(require(j, "driver", ""), "driver"));
    s.horizon = number(require(j, "horizon", ""), "horizon");
    if (!(s.horizon > 0.0))
        throw ConfigError("horizon", "must be > 0");
    if (j.contains("grid_steps"))
        s.grid_steps = static_cast<int>(integer(j.at("grid_steps"), "grid_steps"));
    if (j.contains("threshold_form"))
        s.threshold_form = threshold_form_from_string(text(j.at("threshold_form"), "threshold_form"));

    auto matrix = [](const json& v, const std::string& f) { return matrix_from_json(v, f); };
    if (j.contains("T")) {
        s.form = CoefficientForm::tensor;
        s.tensor = process_from_json<Tensor4d>(j.at("T"), s.horizon, "T", [&](const json& v, const std::string& f) {
            return tensor_from_json(v, s.m, s.n, s.p, s.q, f);
        });
    } else if (j.contains("AB")) {
        s.form = CoefficientForm::ab;
        const json& ab = j.at("AB");
        check_keys(ab, {"A", "B"}, "AB");
        s.a = process_from_json<MatrixXd>(require(ab, "A", "AB"), s.horizon, "AB.A", matrix);
        s.b = process_from_json<MatrixXd>(require(ab, "B", "AB"), s.horizon, "AB.B", matrix);
    } else {
        s.form = CoefficientForm::matrix_integrand;
        s.a = process_from_json<MatrixXd>(j.at("integrand"), s.horizon, "integrand", matrix);
    }
    s.c = process_from_json<MatrixXd>(require(j, "C", ""), s.horizon, "C", matrix);

    if (s.driver == Driver::jump) {
        const auto rate = process_from_json<MatrixXd>(require(j, "intensity", ""), s.horizon, "intensity", matrix);
        try {
            s.intensity = IntensitySpec(rate);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("intensity", e.what());
        }
        s.marks = j.contains("marks") ? marks_from_json(j.at("marks")) : JumpMarkSpec::constant_one();
    } else {
        if (j.contains("intensity"))
            throw ConfigError("intensity", "only allowed with driver 'jump'");
        if (j.contains("marks"))
            throw ConfigError("marks", "only allowed with driver 'jump'");
    }
    s.validate();
    return s;
}

json scenario_to_json(const ScenarioConfig& s)
{
    auto matrix = [](const MatrixXd& a) { return matrix_to_json(a); };
    json j;
    j["name"] = s.name;
    j["dims"] = {{"m", s.m}, {"n", s.n}, {"p", s.p}, {"q", s.q}};
    j["driver"] = to_string(s.driver);
    j["horizon"] = s.horizon;
    switch (s.form) {
    case CoefficientForm::tensor:
        j["T"] = process_to_json(s.tensor, [](const Tensor4d& t) { return tensor_to_json(t); });
        break;
    case CoefficientForm::ab:
        j["AB"] = {{"A", process_to_json(s.a, matrix)}, {"B", process_to_json(s.b, matrix)}};
        break;
    case CoefficientForm::matrix_integrand: j["integrand"] = process_to_json(s.a, matrix); break;
    }
    j["C"] = process_to_json(s.c, matrix);
    if (s.driver == Driver::jump) {
        j["intensity"] = process_to_json(s.intensity.rate(), matrix);
        j["marks"] = marks_to_json(s.marks);
    } else {
        j["grid_steps"] = s.grid_steps;
    }
    j["threshold_form"] = to_string(s.threshold_form);
    if (!s.preset.empty()) {
        json params = json::object();
        for (const auto& [k, v] : s.preset_params)
            params[k] = v;
        j["preset"] = {{"name", s.preset}, {"params", params}};
    }
    return j;
}

ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("<file>", std::string("malformed JSON: ") + e.what());
    }
    return scenario_from_json(j);
}

void save_scenario(const ScenarioConfig& s, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << scenario_to_json(s).dump(2) << '\n';
}

} // namespace matcon
