#include "qrob/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qrob/metrics.hpp"
#include "qrob/risk.hpp"
#include "qrob/robustness.hpp"

namespace qrob {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// rows and serialization

void ReportRow::set(std::string key, FieldValue value) {
    fields.emplace_back(std::move(key), std::move(value));
}

const FieldValue* ReportRow::find(const std::string& key) const {
    for (const auto& [k, v] : fields)
        if (k == key) return &v;
    return nullptr;
}

bool ReportRow::operator==(const ReportRow& other) const {
    if (fields.size() != other.fields.size()) return false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i].first != other.fields[i].first) return false;
        if (field_to_string(fields[i].second) != field_to_string(other.fields[i].second))
            return false;
    }
    return true;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string field_to_string(const FieldValue& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
    if (std::holds_alternative<std::int64_t>(v))
        return std::to_string(std::get<std::int64_t>(v));
    return std::get<bool>(v) ? "true" : "false";
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string to_csv(const std::vector<ReportRow>& rows,
                   const std::vector<std::string>& header) {
    std::ostringstream os;
    std::vector<std::string> cols = header;
    if (cols.empty() && !rows.empty())
        for (const auto& [k, v] : rows.front().fields) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i)
        os << (i ? "," : "") << csv_escape(cols[i]);
    if (!cols.empty()) os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const FieldValue* v = row.find(cols[i]);
            os << (i ? "," : "") << (v ? csv_escape(field_to_string(*v)) : "");
        }
        os << "\n";
    }
    return os.str();
}

std::string to_json(const std::vector<ReportRow>& rows) {
    ordered_json arr = ordered_json::array();
    for (const auto& row : rows) {
        ordered_json obj = ordered_json::object();
        for (const auto& [k, v] : row.fields) {
            if (std::holds_alternative<std::string>(v))
                obj[k] = std::get<std::string>(v);
            else if (std::holds_alternative<double>(v))
                obj[k] = std::get<double>(v);
            else if (std::holds_alternative<std::int64_t>(v))
                obj[k] = std::get<std::int64_t>(v);
            else
                obj[k] = std::get<bool>(v);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

std::vector<ReportRow> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> current;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            current.push_back(std::move(field));
            field.clear();
        } else if (c == '\n') {
            current.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(current));
            current.clear();
        } else {
            field += c;
        }
    }
    if (!field.empty() || !current.empty()) {
        current.push_back(std::move(field));
        records.push_back(std::move(current));
    }

    std::vector<ReportRow> rows;
    if (records.empty()) return rows;
    const auto& head = records.front();
    for (std::size_t r = 1; r < records.size(); ++r) {
        ReportRow row;
        for (std::size_t c = 0; c < head.size() && c < records[r].size(); ++c)
            row.set(head[c], records[r][c]);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_atomic(const std::string& text, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp + " for writing");
        os << text;
        if (!os) throw std::runtime_error("write failed for " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed for " + path);
}

void emit(const std::vector<ReportRow>& rows, const std::string& format,
          const std::string& path, const std::vector<std::string>& header) {
    if (format != "csv" && format != "json")
        throw std::invalid_argument("emit: format must be csv or json");
    const std::string text = format == "csv" ? to_csv(rows, header) : to_json(rows);
    if (path.empty())
        std::cout << text;
    else
        write_atomic(text, path);
}

// ---------------------------------------------------------------------------
// config parsing

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

const ordered_json& need(const ordered_json& j, const std::string& key,
                         const std::string& where) {
    if (!j.contains(key))
        throw ConfigError("missing field \"" + key + "\" in " + where);
    return j.at(key);
}

double need_number(const ordered_json& j, const std::string& key,
                   const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_number()) throw ConfigError("field \"" + key + "\" in " + where + " must be a number");
    return v.get<double>();
}

double opt_number(const ordered_json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number())
        throw ConfigError("field \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

std::string need_string(const ordered_json& j, const std::string& key,
                        const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_string()) throw ConfigError("field \"" + key + "\" in " + where + " must be a string");
    return v.get<std::string>();
}

std::vector<double> need_array(const ordered_json& j, const std::string& key,
                               const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_array()) throw ConfigError("field \"" + key + "\" in " + where + " must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError("field \"" + key + "\" in " + where + " must hold numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Distribution parse_distribution(const ordered_json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::string kind = need_string(j, "kind", where);
    try {
        if (kind == "dirac") return Distribution::dirac(need_number(j, "c", where));
        if (kind == "uniform")
            return Distribution::uniform(need_number(j, "a", where), need_number(j, "b", where));
        if (kind == "normal")
            return Distribution::normal(need_number(j, "mu", where), need_number(j, "sigma", where));
        if (kind == "pareto")
            return Distribution::pareto(need_number(j, "scale", where),
                                        need_number(j, "alpha", where),
                                        j.value("reflected", false));
        if (kind == "empirical")
            return Distribution::empirical(need_array(j, "samples", where));
        if (kind == "mixture")
            return Distribution::mixture(need_number(j, "weight", where),
                                         parse_distribution(need(j, "left", where), where + ".left"),
                                         parse_distribution(need(j, "right", where), where + ".right"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown distribution kind \"" + kind + "\"");
}

GaugeFunction parse_gauge(const ordered_json& j, const std::string& where) {
    const std::string kind = need_string(j, "kind", where);
    try {
        if (kind == "abs_pow") return GaugeFunction::abs_pow(need_number(j, "p", where));
        if (kind == "phi_p") return GaugeFunction::phi_p(need_number(j, "p", where));
        if (kind == "max_one_pow")
            return GaugeFunction::max_one_pow(need_number(j, "p", where));
        if (kind == "u_shaped_table")
            return GaugeFunction::u_shaped_table(need_array(j, "breakpoints", where),
                                                 need_array(j, "values", where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown gauge kind \"" + kind + "\"");
}

MetricKind parse_metric(const ordered_json& j, const std::string& where) {
    const std::string kind = need_string(j, "kind", where);
    try {
        if (kind == "kantorovich") return MetricKind::kantorovich();
        if (kind == "fortet_mourier")
            return MetricKind::fortet_mourier(need_number(j, "p", where));
        if (kind == "kolmogorov") return MetricKind::kolmogorov();
        if (kind == "weighted_kolmogorov")
            return MetricKind::weighted_kolmogorov(parse_gauge(need(j, "gauge", where), where + ".gauge"));
        if (kind == "levy") return MetricKind::levy();
        if (kind == "prokhorov") return MetricKind::prokhorov();
        if (kind == "d_phi")
            return MetricKind::d_phi(parse_gauge(need(j, "gauge", where), where + ".gauge"));
        if (kind == "bl_bracket") return MetricKind::bl_bracket();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown metric kind \"" + kind + "\"");
}

RiskFunctionalSpec parse_risk(const ordered_json& j, const std::string& where) {
    const std::string tag = need_string(j, "tag", where);
    try {
        if (tag == "expectation") return RiskFunctionalSpec::expectation();
        if (tag == "cvar") return RiskFunctionalSpec::cvar(need_number(j, "tau", where));
        if (tag == "upper_semideviation") return RiskFunctionalSpec::upper_semideviation();
        if (tag == "oce") {
            const auto& u = need(j, "utility", where);
            const std::string ukind = need_string(u, "kind", where + ".utility");
            if (ukind == "quadratic") return RiskFunctionalSpec::oce(QuadraticUtility{});
            if (ukind == "piecewise_linear")
                return RiskFunctionalSpec::oce(PiecewiseLinearUtility{
                    need_number(u, "gamma1", where + ".utility"),
                    need_number(u, "gamma2", where + ".utility")});
            throw ConfigError(where + ".utility: unknown kind \"" + ukind + "\"");
        }
        if (tag == "shortfall") {
            const auto& l = need(j, "loss", where);
            const std::string lkind = need_string(l, "kind", where + ".loss");
            const double x0 = need_number(j, "x0", where);
            if (lkind == "deposit_insurance")
                return RiskFunctionalSpec::shortfall(DepositInsuranceLoss{}, x0);
            if (lkind == "pth_power")
                return RiskFunctionalSpec::shortfall(
                    PthPowerLoss{need_number(l, "p", where + ".loss")}, x0);
            throw ConfigError(where + ".loss: unknown kind \"" + lkind + "\"");
        }
        if (tag == "pth_moment")
            return RiskFunctionalSpec::pth_moment(need_number(j, "p", where));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown risk tag \"" + tag + "\"");
}

double elapsed_ms(const std::chrono::steady_clock::time_point& start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

void push_metric_value(ReportRow& row, const MetricValue& mv) {
    row.set("value", mv.value);
    row.set("exactness", mv.exactness_str());
    row.set("lo", mv.lo);
    row.set("hi", mv.hi);
}

} // namespace

int run_experiment(const std::string& config_path, const RunOverrides& overrides) {
    std::vector<ReportRow> rows;
    std::string out_path, format;
    int exit_code = 0;
    try {
        std::ifstream is(config_path);
        if (!is) {
            std::cerr << "error: cannot open config file " << config_path << "\n";
            return 1;
        }
        ordered_json config;
        try {
            config = ordered_json::parse(is);
        } catch (const ordered_json::parse_error& e) {
            std::cerr << "error: config " << config_path << " is not valid JSON: "
                      << e.what() << "\n";
            return 1;
        }

        const auto schema = static_cast<int>(opt_number(config, "schema_version", 1));
        if (schema != 1) throw ConfigError("unsupported schema_version (expected 1)");

        const std::string experiment = need_string(config, "experiment", "config");
        if (overrides.expect_experiment && experiment != *overrides.expect_experiment)
            throw ConfigError("config experiment \"" + experiment +
                              "\" does not match subcommand \"" +
                              *overrides.expect_experiment + "\"");

        if (!config.contains("seed") && !overrides.seed)
            throw ConfigError("missing field \"seed\" in config (wall-clock seeding is not supported)");
        const std::uint64_t seed = overrides.seed
                                       ? *overrides.seed
                                       : static_cast<std::uint64_t>(need_number(config, "seed", "config"));
        const double tol = opt_number(config, "tol", 1e-10);
        if (!(tol > 0.0)) throw ConfigError("field \"tol\" must be > 0");
        const int threads = static_cast<int>(opt_number(config, "threads", 1));
        if (threads < 1) throw ConfigError("field \"threads\" must be >= 1");

        out_path = overrides.out ? *overrides.out : config.value("out", "");
        format = overrides.format ? *overrides.format : config.value("format", "csv");
        if (format != "csv" && format != "json")
            throw ConfigError("field \"format\" must be \"csv\" or \"json\"");

        const auto start = std::chrono::steady_clock::now();

        if (experiment == "metric") {
            const Distribution P = parse_distribution(need(config, "P", "config"), "P");
            const Distribution Q = parse_distribution(need(config, "Q", "config"), "Q");
            const MetricKind kind = parse_metric(need(config, "metric", "config"), "metric");
            const MetricValue mv = compute_metric(kind, P, Q, tol);
            ReportRow row;
            row.set("experiment", std::string("metric"));
            row.set("metric", kind.name());
            row.set("P", P.describe());
            row.set("Q", Q.describe());
            row.set("seed", static_cast<std::int64_t>(seed));
            row.set("tol", tol);
            push_metric_value(row, mv);
            row.set("runtime_ms", elapsed_ms(start));
            rows.push_back(std::move(row));
        } else if (experiment == "risk") {
            const Distribution G = parse_distribution(need(config, "P", "config"), "P");
            const RiskFunctionalSpec spec = parse_risk(need(config, "risk", "config"), "risk");
            const double value = evaluate(spec, G, tol);
            const LipschitzCertificate cert = certificate(spec);
            ReportRow row;
            row.set("experiment", std::string("risk"));
            row.set("risk", spec.name());
            row.set("P", G.describe());
            row.set("seed", static_cast<std::int64_t>(seed));
            row.set("tol", tol);
            row.set("value", value);
            row.set("cert_L", cert.L);
            row.set("cert_p", cert.p);
            row.set("cert_iqr", cert.iqr);
            row.set("cert_conditions", cert.conditions);
            row.set("runtime_ms", elapsed_ms(start));
            rows.push_back(std::move(row));
        } else if (experiment == "lipschitz-check") {
            const RiskFunctionalSpec spec = parse_risk(need(config, "risk", "config"), "risk");
            if (config.contains("samples") || config.contains("perturbed")) {
                const auto samples = need_array(config, "samples", "config");
                const auto perturbed = need_array(config, "perturbed", "config");
                PairedSampleCheck check;
                try {
                    check = paired_lipschitz_check(spec, samples, perturbed, tol);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
                ReportRow row;
                row.set("experiment", std::string("lipschitz-check"));
                row.set("risk", spec.name());
                row.set("seed", static_cast<std::int64_t>(seed));
                row.set("N", static_cast<std::int64_t>(samples.size()));
                row.set("cert_L", check.cert.L);
                row.set("cert_p", check.cert.p);
                row.set("lhs", check.lhs);
                row.set("rhs", check.rhs);
                row.set("holds", check.holds);
                row.set("condition_met", check.condition_met);
                row.set("runtime_ms", elapsed_ms(start));
                rows.push_back(std::move(row));
                if (check.condition_met && !check.holds) exit_code = 2;
            } else {
                const auto trials =
                    static_cast<std::size_t>(opt_number(config, "trials", 1000));
                const auto max_n = static_cast<std::size_t>(opt_number(config, "N", 100));
                if (trials == 0 || max_n == 0)
                    throw ConfigError("fields \"trials\" and \"N\" must be >= 1");
                std::size_t checked = 0, violations = 0;
                double worst_excess = 0.0;
                for (std::size_t t = 0; t < trials; ++t) {
                    RngStream stream(seed, 1 + t);
                    const SamplePair pair = random_condition_pair(spec, stream, max_n);
                    if (!pair.condition_met) continue;
                    const PairedSampleCheck check =
                        paired_lipschitz_check(spec, pair.samples, pair.perturbed, tol);
                    if (!check.condition_met) continue;
                    ++checked;
                    if (!check.holds) {
                        ++violations;
                        worst_excess = std::max(worst_excess, check.lhs - check.rhs);
                    }
                }
                const LipschitzCertificate cert = certificate(spec);
                ReportRow row;
                row.set("experiment", std::string("lipschitz-check"));
                row.set("risk", spec.name());
                row.set("seed", static_cast<std::int64_t>(seed));
                row.set("trials", static_cast<std::int64_t>(trials));
                row.set("checked", static_cast<std::int64_t>(checked));
                row.set("cert_L", cert.L);
                row.set("cert_p", cert.p);
                row.set("violations", static_cast<std::int64_t>(violations));
                row.set("worst_excess", worst_excess);
                row.set("runtime_ms", elapsed_ms(start));
                rows.push_back(std::move(row));
                if (violations > 0) exit_code = 2;
            }
        } else if (experiment == "robustness") {
            const Distribution P = parse_distribution(need(config, "P", "config"), "P");
            const Distribution Q = parse_distribution(need(config, "Q", "config"), "Q");
            const RiskFunctionalSpec spec = parse_risk(need(config, "risk", "config"), "risk");
            const auto N = static_cast<std::size_t>(need_number(config, "N", "config"));
            const auto M = static_cast<std::size_t>(need_number(config, "M", "config"));
            if (N == 0 || M == 0) throw ConfigError("fields \"N\" and \"M\" must be >= 1");
            EstimatorLawReport rep;
            try {
                rep = robustness_gap(spec, P, Q, N, M, seed, tol, threads);
            } catch (const std::domain_error& e) {
                throw ConfigError(e.what());
            }
            ReportRow row;
            row.set("experiment", std::string("robustness"));
            row.set("risk", rep.spec_name);
            row.set("P", P.describe());
            row.set("Q", Q.describe());
            row.set("N", static_cast<std::int64_t>(rep.N));
            row.set("M", static_cast<std::int64_t>(rep.M));
            row.set("seed", static_cast<std::int64_t>(rep.seed));
            row.set("cert_L", rep.cert.L);
            row.set("cert_p", rep.cert.p);
            row.set("d_input", rep.d_input);
            row.set("d_estimator_laws", rep.d_estimator_laws);
            row.set("bound", rep.bound);
            row.set("gap_ratio", rep.gap_ratio);
            row.set("mc_halfwidth", rep.mc_halfwidth);
            row.set("condition_met", rep.condition_met);
            row.set("runtime_ms", elapsed_ms(start));
            rows.push_back(std::move(row));
            if (rep.condition_met &&
                rep.d_estimator_laws > rep.bound + rep.mc_halfwidth + 1e-12)
                exit_code = 2;
        } else if (experiment == "iqr-scan") {
            const RiskFunctionalSpec spec = parse_risk(need(config, "risk", "config"), "risk");
            const auto trials = static_cast<std::size_t>(opt_number(config, "trials", 1000));
            if (trials == 0) throw ConfigError("field \"trials\" must be >= 1");
            std::vector<double> p_grid = {1.0, 1.25, 1.5, 2.0, 3.0};
            if (config.contains("p_grid")) p_grid = need_array(config, "p_grid", "config");
            IqrScan scan;
            try {
                scan = iqr_scan(spec, trials, p_grid, seed);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            for (std::size_t i = 0; i < scan.p_grid.size(); ++i) {
                ReportRow row;
                row.set("experiment", std::string("iqr-scan"));
                row.set("risk", scan.spec_name);
                row.set("seed", static_cast<std::int64_t>(seed));
                row.set("trials", static_cast<std::int64_t>(trials));
                row.set("p", scan.p_grid[i]);
                row.set("checked", static_cast<std::int64_t>(scan.checked[i]));
                row.set("violation_fraction", scan.violation_fraction[i]);
                row.set("reported_iqr", scan.reported_iqr);
                row.set("runtime_ms", elapsed_ms(start));
                rows.push_back(std::move(row));
            }
        } else {
            throw ConfigError("unknown experiment \"" + experiment + "\"");
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        emit(rows, format, out_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

} // namespace qrob
