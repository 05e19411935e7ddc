#include "qkemp/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkemp/asymptotics.hpp"
#include "qkemp/distributions.hpp"
#include "qkemp/error.hpp"
#include "qkemp/format.hpp"
#include "qkemp/metrics.hpp"
#include "qkemp/solvers.hpp"

namespace qkemp::cli {

namespace {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string render_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
            else if constexpr (std::is_same_v<T, double>) return format_real(v);
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else return v;
        },
        c);
}

std::string render_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + render_cell(row[i]);
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& t, const std::string& subcommand, const nlohmann::ordered_json& params,
                        const std::optional<std::uint64_t>& seed) {
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
        }
        data.push_back(std::move(obj));
    }
    nlohmann::ordered_json doc;
    doc["meta"] = {{"subcommand", subcommand}, {"params", params}, {"seed", nullptr}};
    if (seed) doc["meta"]["seed"] = *seed;
    doc["data"] = std::move(data);
    return doc.dump(2) + "\n";
}

double parse_real(const std::string& text, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw ParameterError(std::string("cannot parse ") + what + " from '" + text + "'");
    }
    return v;
}

std::int64_t parse_integer(const std::string& text, const char* what) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParameterError(std::string("cannot parse ") + what + " from '" + text + "'");
    }
}

// Raw option values as given on the command line, keyed by option name.
struct Options {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    const std::string& text(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw ParameterError("missing required option --" + key);
        return it->second;
    }
    double real(const std::string& key) const { return parse_real(text(key), key.c_str()); }
    std::int64_t integer(const std::string& key) const { return parse_integer(text(key), key.c_str()); }
    std::optional<double> maybe_real(const std::string& key) const {
        return has(key) ? std::optional<double>(real(key)) : std::nullopt;
    }
    QBase q() const { return QBase(real("q")); }
    std::int64_t trials() const {
        const std::int64_t n = integer("n");
        if (n < 0) throw ParameterError("--n must be >= 0");
        return n;
    }
};

Table pmf_table_rows(const PmfTable& t) {
    Table out{{"x", "p"}, {}};
    for (std::int64_t x = t.lo(); x <= t.hi(); ++x) out.rows.push_back({x, t.at(x)});
    return out;
}

double tolerance(const Options& o) {
    const double tol = o.maybe_real("tol").value_or(1e-12);
    if (!(tol > 0.0 && tol <= 1e-6)) throw ParameterError("--tol must lie in (0, 1e-6]");
    return tol;
}

Law law_from(const Options& o) {
    const std::string dist = o.text("dist");
    const QBase q = o.q();
    if (dist == "kb") return KempBinomial(o.trials(), parse_theta(o.text("theta"), q));
    if (dist == "heine") {
        const double theta = parse_theta(o.text("theta"), q).to_double();
        if (!std::isfinite(theta)) throw ParameterError("Heine theta overflows binary64");
        return Heine(theta, q);
    }
    if (dist == "dnorm") return DiscreteNormal{o.real("alpha"), q};
    throw ParameterError("--dist must be kb, heine or dnorm");
}

Table cmd_pmf(const Options& o) {
    return pmf_table_rows(tabulate(law_from(o), tolerance(o)));
}

Table cmd_moments(const Options& o) {
    const Law law = law_from(o);
    Table out{{"mean", "variance"}, {}};
    if (const auto* kb = std::get_if<KempBinomial>(&law)) {
        const MomentPair m = kb_moments(*kb);
        out.rows.push_back({m.mean, m.variance});
    } else if (const auto* h = std::get_if<Heine>(&law)) {
        out.rows.push_back({heine_mean(*h), tabulate(*h, tolerance(o)).variance()});
    } else {
        const PmfTable t = tabulate(law, tolerance(o));
        out.rows.push_back({t.mean(), t.variance()});
    }
    return out;
}

Table cmd_sample(const Options& o, std::uint64_t seed) {
    const std::int64_t count = o.integer("count");
    if (count < 0 || count > 100'000'000) throw ParameterError("--count must lie in [0, 1e8]");
    const Law law = law_from(o);
    UniformSource rng(seed);
    Table out{{"x"}, {}};
    out.rows.reserve(static_cast<std::size_t>(count));
    if (const auto* kb = std::get_if<KempBinomial>(&law)) {
        const KbSampler sampler(*kb);
        for (std::int64_t i = 0; i < count; ++i) out.rows.push_back({sampler(rng)});
    } else {
        const InversionSampler sampler(tabulate(law, tolerance(o)));
        for (std::int64_t i = 0; i < count; ++i) out.rows.push_back({sampler(rng)});
    }
    return out;
}

FractionalDrift drift_from(const Options& o) {
    const auto [num, den] = parse_fraction(o.text("slope"));
    return FractionalDrift(num, den, o.maybe_real("offset").value_or(0.0));
}

std::vector<std::int64_t> n_values(const Options& o) {
    if (o.has("n-list")) return parse_n_list(o.text("n-list"));
    return {o.integer("n")};
}

Table cmd_asym(const Options& o) {
    const QBase q = o.q();
    const FractionalDrift drift = drift_from(o);
    const int terms = o.has("terms") ? static_cast<int>(o.integer("terms")) : default_fourier_terms(q);
    if (terms < 1 || terms > 10000) throw ParameterError("--terms must lie in [1, 10000]");
    Table out{{"n", "f", "beta", "c", "estimate", "direct_mean", "abs_error", "error_bound", "terms"}, {}};
    for (std::int64_t n : n_values(o)) {
        const DriftValue f = drift.at(n);
        const MeanAsymptotics m = mean_expansion(n, f, q, terms);
        const double direct = kb_moments(kb_with_drift(n, f, q)).mean;
        out.rows.push_back({n, m.f_value, m.beta, m.c_value, m.estimate, direct, std::fabs(direct - m.estimate),
                            m.error_bound, static_cast<std::int64_t>(m.terms_used)});
    }
    return out;
}

Table cmd_limit(const Options& o) {
    const double beta = o.real("beta");
    const LimitLaw law = limit_law(beta, o.q());
    const double alpha = dnorm_alpha(beta);
    Table out{{"x", "p", "location", "alpha", "delta", "c", "sigma"}, {}};
    for (std::int64_t x = law.lattice_probs.lo(); x <= law.lattice_probs.hi(); ++x) {
        out.rows.push_back({x, law.lattice_probs.at(x), law.location(x), alpha, static_cast<std::int64_t>(law.delta),
                            law.c_value, law.sigma});
    }
    return out;
}

Table cmd_solve_theta(const Options& o) {
    const QBase q = o.q();
    Table out{{"theta", "residual", "iterations"}, {}};
    if (o.has("mu") == o.has("lambda")) throw ParameterError("give exactly one of --mu and --lambda");
    if (o.has("lambda")) {
        const double theta = theta_for_poisson(o.integer("n"), q, o.real("lambda"));
        out.rows.push_back({theta, 0.0, std::int64_t{0}});
        return out;
    }
    const ThetaSolveResult r = o.has("n") ? theta_for_mean(o.integer("n"), q, o.real("mu"))
                                          : theta_limit_for_mean(q, o.real("mu"));
    out.rows.push_back({r.theta, r.residual, static_cast<std::int64_t>(r.iterations)});
    return out;
}

Table cmd_converge(const Options& o) {
    const Scenario scenario = parse_scenario(o.text("scenario"));
    SweepParams params;
    params.q = o.real("q");
    params.lambda = o.maybe_real("lambda");
    params.mu = o.maybe_real("mu");
    params.threshold = o.maybe_real("threshold");
    if (o.has("theta")) {
        const double theta = parse_theta(o.text("theta"), QBase(params.q)).to_double();
        if (!std::isfinite(theta)) throw ParameterError("--theta overflows binary64");
        params.theta = theta;
    }
    if (o.has("slope")) params.drift = drift_from(o);
    if (o.has("trials")) params.trials = o.integer("trials");
    if (scenario == Scenario::Degenerate && o.text("fn") != "sqrt") {
        throw ParameterError("degenerate scenario supports --fn sqrt only");
    }
    const SweepReport report = convergence_sweep(scenario, params, n_values(o));

    std::set<std::string> keys;
    for (const auto& row : report.rows) {
        for (const auto& [k, v] : row.auxiliary) keys.insert(k);
    }
    Table out{{"n", "distance"}, {}};
    out.columns.insert(out.columns.end(), keys.begin(), keys.end());
    out.columns.push_back("threshold");
    out.columns.push_back("pass");
    for (const auto& row : report.rows) {
        std::vector<Cell> cells{row.n, row.distance};
        for (const auto& k : keys) {
            const auto it = row.auxiliary.find(k);
            cells.emplace_back(it == row.auxiliary.end() ? std::nan("") : it->second);
        }
        cells.emplace_back(report.threshold);
        cells.emplace_back(report.pass);
        out.rows.push_back(std::move(cells));
    }
    return out;
}

struct Subcommand {
    const char* name;
    const char* help;
    std::vector<const char*> options;
};

const std::vector<Subcommand>& subcommands() {
    static const std::vector<Subcommand> all{
        {"pmf", "tabulate a KB, Heine or discrete normal law", {"dist", "n", "theta", "q", "alpha", "tol"}},
        {"moments", "mean and variance of a law", {"dist", "n", "theta", "q", "alpha", "tol"}},
        {"sample", "seeded draws from a law", {"dist", "n", "theta", "q", "alpha", "tol", "count", "seed"}},
        {"asym", "mean expansion for theta_n = q^-f(n)", {"q", "slope", "offset", "n", "n-list", "terms"}},
        {"limit", "lattice limit law for a fixed fractional part", {"beta", "q"}},
        {"solve-theta", "theta for a target mean or Poisson coupling", {"n", "q", "mu", "lambda"}},
        {"converge",
         "distance sweep between KB laws and a limit law",
         {"scenario", "q", "lambda", "mu", "theta", "slope", "offset", "fn", "n", "n-list", "trials", "threshold"}},
    };
    return all;
}

}  // namespace

ScaledReal parse_theta(const std::string& text, QBase q) {
    static const std::regex power_form(R"(^\s*(?:([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*)?q\^\(?([-+]?[0-9.]+(?:[eE][-+]?[0-9]+)?)\)?\s*$)");
    std::smatch m;
    ScaledReal theta(q);
    if (std::regex_match(text, m, power_form)) {
        const double coefficient = m[1].matched ? parse_real(m[1].str(), "theta coefficient") : 1.0;
        theta = ScaledReal::scaled_q_power(coefficient, parse_real(m[2].str(), "theta exponent"), q);
    } else {
        theta = ScaledReal::from_double(parse_real(text, "theta"), q);
    }
    if (theta.sign() < 0 && !theta.is_zero()) throw ParameterError("theta must be >= 0");
    return theta;
}

std::pair<std::int64_t, std::int64_t> parse_fraction(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw ParameterError("slope must be written p/r, got '" + text + "'");
    return {parse_integer(text.substr(0, slash), "slope numerator"),
            parse_integer(text.substr(slash + 1), "slope denominator")};
}

std::vector<std::int64_t> parse_n_list(const std::string& text) {
    std::vector<std::int64_t> out;
    if (text.find(':') != std::string::npos) {
        std::vector<std::int64_t> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(parse_integer(item, "n-list bound"));
        if (parts.size() < 2 || parts.size() > 3) throw ParameterError("n-list range must be a:b or a:b:step");
        const std::int64_t step = parts.size() == 3 ? parts[2] : 1;
        if (step < 1 || parts[1] < parts[0]) throw ParameterError("n-list range must be increasing");
        if ((parts[1] - parts[0]) / step > 1'000'000) throw ParameterError("n-list too long");
        for (std::int64_t n = parts[0]; n <= parts[1]; n += step) out.push_back(n);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_integer(item, "n-list entry"));
    }
    if (out.empty()) throw ParameterError("n-list is empty");
    for (std::int64_t n : out) {
        if (n < 0) throw ParameterError("n-list entries must be >= 0");
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qkemp: Kemp q-binomial laws, their limits and convergence diagnostics"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string out_path;
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::App*> apps;
    for (const Subcommand& sc : subcommands()) {
        CLI::App* sub = app.add_subcommand(sc.name, sc.help);
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--out", out_path, "write the document here instead of stdout");
        for (const char* name : sc.options) sub->add_option(std::string("--") + name, raw[std::string(sc.name) + "/" + name]);
        apps[sc.name] = sub;
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    const Subcommand* chosen = nullptr;
    for (const Subcommand& sc : subcommands()) {
        if (apps[sc.name]->parsed()) chosen = &sc;
    }

    Options opts;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const char* name : chosen->options) {
        if (apps[chosen->name]->count(std::string("--") + name) > 0) {
            opts.values[name] = raw[std::string(chosen->name) + "/" + name];
            if (std::string(name) != "seed") params[name] = opts.values[name];
        }
    }

    try {
        std::optional<std::uint64_t> seed;
        Table table;
        const std::string cmd = chosen->name;
        if (cmd == "pmf") {
            table = cmd_pmf(opts);
        } else if (cmd == "moments") {
            table = cmd_moments(opts);
        } else if (cmd == "sample") {
            const std::int64_t s = opts.has("seed") ? opts.integer("seed") : 0;
            if (s < 0) throw ParameterError("--seed must be >= 0");
            seed = static_cast<std::uint64_t>(s);
            table = cmd_sample(opts, *seed);
        } else if (cmd == "asym") {
            table = cmd_asym(opts);
        } else if (cmd == "limit") {
            table = cmd_limit(opts);
        } else if (cmd == "solve-theta") {
            table = cmd_solve_theta(opts);
        } else {
            table = cmd_converge(opts);
        }
        const std::string doc = format == "json" ? render_json(table, cmd, params, seed) : render_csv(table);
        if (out_path.empty()) {
            out << doc;
        } else {
            std::ofstream file(out_path, std::ios::binary);
            if (!file) throw ParameterError("cannot open --out file '" + out_path + "'");
            file << doc;
        }
        return kExitOk;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace qkemp::cli
