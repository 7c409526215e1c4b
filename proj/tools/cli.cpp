#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "compdist/distributions.hpp"
#include "compdist/errors.hpp"
#include "compdist/format.hpp"
#include "compdist/sampling.hpp"
#include "compdist/simplex.hpp"

namespace compdist::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A CSV row that is well-formed but not a valid point for the transform.
class RowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DistEntry {
    std::string_view name;
    std::vector<std::string_view> required;
    std::vector<std::string_view> optional;
};

const std::vector<DistEntry>& dist_table() {
    static const std::vector<DistEntry> table = {
        {"dirichlet", {"alpha"}, {}},
        {"inverted-dirichlet", {"alpha"}, {}},
        {"alr-dirichlet", {"alpha"}, {}},
        {"gamma", {"shape", "scale"}, {}},
        {"poisson", {"rate"}, {}},
        {"negative-binomial", {"R"}, {"p", "theta"}},
        {"multinomial", {"probs", "m"}, {}},
        {"dirichlet-multinomial", {"shapes", "m"}, {"scale"}},
        {"beta-binomial", {"a", "b", "m"}, {}},
        {"normalized-nb", {"shapes", "scale", "component"}, {}},
        {"normalized-nb-value", {"shapes", "scale", "component"}, {"bound"}},
    };
    return table;
}

std::string canonical_name(const std::string& name) { return name == "nb" ? "negative-binomial" : name; }

const DistEntry& lookup(const std::string& name) {
    for (const auto& entry : dist_table()) {
        if (entry.name == name) return entry;
    }
    throw UsageError("unknown distribution '" + name + "'");
}

void validate_params(const DistEntry& entry, const json& params) {
    if (!params.is_object()) throw UsageError("parameters must be a JSON object");
    for (const auto& [key, value] : params.items()) {
        const bool known = std::find(entry.required.begin(), entry.required.end(), key) != entry.required.end() ||
                           std::find(entry.optional.begin(), entry.optional.end(), key) != entry.optional.end();
        if (!known) throw UsageError("unknown parameter '" + key + "' for " + std::string(entry.name));
    }
    for (const auto key : entry.required) {
        if (!params.contains(std::string(key))) {
            throw UsageError("missing parameter '" + std::string(key) + "' for " + std::string(entry.name));
        }
    }
    if (entry.name == "negative-binomial" && params.contains("p") == params.contains("theta")) {
        throw UsageError("negative-binomial needs exactly one of 'p' or 'theta'");
    }
}

double as_real(const json& v, const std::string& what) {
    if (!v.is_number()) throw UsageError(what + " must be a number");
    return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 0x1.0p63) return static_cast<std::uint64_t>(d);
    }
    throw UsageError(what + " must be a non-negative integer");
}

std::vector<double> as_real_vector(const json& v, const std::string& what) {
    if (!v.is_array()) throw UsageError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_real(e, what));
    return out;
}

std::vector<std::uint64_t> as_count_vector(const json& v, const std::string& what) {
    if (!v.is_array()) throw UsageError(what + " must be an array of non-negative integers");
    std::vector<std::uint64_t> out;
    for (const auto& e : v) out.push_back(as_count(e, what));
    return out;
}

double scalar_point(const json& point) {
    if (point.is_array() && point.size() == 1) return as_real(point[0], "point");
    return as_real(point, "point");
}

std::uint64_t count_point(const json& point) {
    if (point.is_array() && point.size() == 1) return as_count(point[0], "point");
    return as_count(point, "point");
}

CountPair pair_point(const json& point) {
    const auto v = as_count_vector(point, "point");
    if (v.size() != 2) throw UsageError("point must be a pair [k, m]");
    return {v[0], v[1]};
}

DirichletParams dirichlet_params(const json& p) { return DirichletParams(as_real_vector(p.at("alpha"), "alpha")); }

GammaMixtureParams mixture_params(const json& p) {
    const double scale = p.contains("scale") ? as_real(p.at("scale"), "scale") : 1.0;
    return GammaMixtureParams(as_real_vector(p.at("shapes"), "shapes"), scale);
}

std::size_t component_param(const json& p) { return static_cast<std::size_t>(as_count(p.at("component"), "component")); }

struct NbParams {
    double shape;
    double p;
    double theta;
};

NbParams nb_params(const json& params) {
    NbParams out{as_real(params.at("R"), "R"), 0.0, 0.0};
    if (params.contains("p")) {
        out.p = as_real(params.at("p"), "p");
        if (!(out.p > 0.0 && out.p < 1.0)) throw DomainError("p must lie in (0, 1)");
        out.theta = out.p / (1.0 - out.p);
    } else {
        out.theta = as_real(params.at("theta"), "theta");
        if (!(out.theta > 0.0) || !std::isfinite(out.theta)) throw DomainError("theta must be positive and finite");
        out.p = out.theta / (1.0 + out.theta);
    }
    return out;
}

json read_params(const std::string& inline_text, const std::string& path) {
    std::string text = inline_text;
    if (!path.empty()) {
        std::ifstream file(path);
        if (!file) throw UsageError("cannot read params file '" + path + "'");
        std::ostringstream buf;
        buf << file.rdbuf();
        text = buf.str();
    }
    if (text.empty()) throw UsageError("one of --params or --params-file is required");
    return json::parse(text);
}

struct Evaluation {
    double log_value;
    std::optional<std::uint64_t> truncation_bound;
};

Evaluation evaluate(const std::string& dist, const json& params, const json& point) {
    if (dist == "dirichlet") {
        return {dirichlet_log_pdf(dirichlet_params(params), Composition(as_real_vector(point, "point"))), {}};
    }
    if (dist == "inverted-dirichlet") {
        return {inverted_dirichlet_log_pdf(dirichlet_params(params), RatioVector(as_real_vector(point, "point"))), {}};
    }
    if (dist == "alr-dirichlet") {
        return {alr_dirichlet_log_pdf(dirichlet_params(params), LogRatioVector(as_real_vector(point, "point"))), {}};
    }
    if (dist == "gamma") {
        return {gamma_log_pdf(as_real(params.at("shape"), "shape"), as_real(params.at("scale"), "scale"),
                              scalar_point(point)),
                {}};
    }
    if (dist == "poisson") return {poisson_log_pmf(as_real(params.at("rate"), "rate"), count_point(point)), {}};
    if (dist == "negative-binomial") {
        const auto nb = nb_params(params);
        return {negative_binomial_log_pmf(nb.shape, nb.p, count_point(point)), {}};
    }
    if (dist == "multinomial") {
        const Composition probs(as_real_vector(params.at("probs"), "probs"));
        return {multinomial_log_pmf(as_count(params.at("m"), "m"), probs, CountVector(as_count_vector(point, "point"))),
                {}};
    }
    if (dist == "dirichlet-multinomial") {
        return {dirichlet_multinomial_log_pmf(mixture_params(params), as_count(params.at("m"), "m"),
                                              CountVector(as_count_vector(point, "point"))),
                {}};
    }
    if (dist == "beta-binomial") {
        const BetaBinomialParams bb(as_real(params.at("a"), "a"), as_real(params.at("b"), "b"),
                                    as_count(params.at("m"), "m"));
        return {beta_binomial_log_pmf(bb, count_point(point)), {}};
    }
    if (dist == "normalized-nb") {
        const auto [k, m] = pair_point(point);
        return {normalized_nb_log_pmf(mixture_params(params), component_param(params), k, m), {}};
    }
    if (dist == "normalized-nb-value") {
        const auto [k, m] = pair_point(point);
        std::optional<std::uint64_t> bound;
        if (params.contains("bound")) bound = as_count(params.at("bound"), "bound");
        const auto value = normalized_nb_value_pmf(mixture_params(params), component_param(params), k, m, bound);
        return {value.mass.log(), value.truncation_bound};
    }
    throw UsageError("unknown distribution '" + dist + "'");
}

std::string join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    return out;
}

std::vector<std::string> numbered(const char* prefix, std::size_t count) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

std::string real_row(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

std::string count_row(std::span<const std::uint64_t> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

void sample(const std::string& dist, const json& params, std::uint64_t count, std::uint64_t seed, std::ostream& out) {
    RngStream rng(seed);
    if (dist == "dirichlet" || dist == "inverted-dirichlet" || dist == "alr-dirichlet") {
        const auto alpha = dirichlet_params(params);
        const std::size_t width = dist == "dirichlet" ? alpha.size() : alpha.size() - 1;
        out << join(numbered(dist == "dirichlet" ? "x" : "y", width)) << '\n';
        for (std::uint64_t i = 0; i < count; ++i) {
            const Composition x = dirichlet_sample(alpha, rng);
            if (dist == "dirichlet") {
                out << real_row(x.entries()) << '\n';
            } else if (dist == "inverted-dirichlet") {
                out << real_row(ratio_forward(x).entries()) << '\n';
            } else {
                out << real_row(log_ratio_forward(x).entries()) << '\n';
            }
        }
        return;
    }
    if (dist == "gamma") {
        const double shape = as_real(params.at("shape"), "shape");
        const double scale = as_real(params.at("scale"), "scale");
        out << "x\n";
        for (std::uint64_t i = 0; i < count; ++i) out << format_double(gamma_sample(shape, scale, rng)) << '\n';
        return;
    }
    if (dist == "poisson") {
        const double rate = as_real(params.at("rate"), "rate");
        if (!(rate > 0.0)) throw DomainError("Poisson rate must be positive");
        out << "k\n";
        for (std::uint64_t i = 0; i < count; ++i) out << poisson_sample(rate, rng) << '\n';
        return;
    }
    if (dist == "negative-binomial") {
        const auto nb = nb_params(params);
        out << "m\n";
        for (std::uint64_t i = 0; i < count; ++i) out << negative_binomial_sample_via_mixture(nb.shape, nb.theta, rng) << '\n';
        return;
    }
    if (dist == "multinomial") {
        const Composition probs(as_real_vector(params.at("probs"), "probs"));
        const std::uint64_t m = as_count(params.at("m"), "m");
        out << join(numbered("x", probs.size())) << '\n';
        for (std::uint64_t i = 0; i < count; ++i) out << count_row(multinomial_sample(m, probs, rng).counts()) << '\n';
        return;
    }
    if (dist == "dirichlet-multinomial") {
        const auto mixture = mixture_params(params);
        const std::uint64_t m = as_count(params.at("m"), "m");
        out << join(numbered("x", mixture.size())) << '\n';
        for (std::uint64_t i = 0; i < count; ++i) {
            out << count_row(dirichlet_multinomial_sample(mixture, m, rng).counts()) << '\n';
        }
        return;
    }
    if (dist == "beta-binomial") {
        const BetaBinomialParams bb(as_real(params.at("a"), "a"), as_real(params.at("b"), "b"),
                                    as_count(params.at("m"), "m"));
        out << "k\n";
        for (std::uint64_t i = 0; i < count; ++i) out << beta_binomial_sample(bb, rng) << '\n';
        return;
    }
    if (dist == "normalized-nb") {
        const auto mixture = mixture_params(params);
        const std::size_t component = component_param(params);
        out << "k,m\n";
        for (std::uint64_t i = 0; i < count; ++i) {
            const auto pair = normalized_nb_sample(mixture, component, rng);
            out << pair.k << ',' << pair.m << '\n';
        }
        return;
    }
    throw DomainError("no sampler for distribution '" + dist + "'");
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<std::vector<double>> parse_numeric_row(std::string_view line) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const auto field = trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

void transform_rows(const std::string& family, const std::string& direction, bool jacobian, std::istream& in,
               std::ostream& out) {
    const bool ratio = family == "ratio";
    const bool forward = direction == "forward";
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool seen_data = false;
    bool seen_any = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto row = parse_numeric_row(line);
        if (!row) {
            if (!seen_any) {
                seen_any = true;  // header
                continue;
            }
            throw UsageError("line " + std::to_string(line_no) + ": not a row of numbers");
        }
        seen_any = true;
        if (!seen_data) {
            width = row->size();
            const std::size_t out_width = forward ? width - 1 : width + 1;
            std::vector<std::string> header = numbered(forward ? "y" : "x", out_width);
            if (jacobian) header.emplace_back("log_jacobian");
            out << join(header) << '\n';
            seen_data = true;
        } else if (row->size() != width) {
            throw UsageError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) + " columns");
        }
        try {
            std::vector<double> result;
            double log_jac = 0.0;
            if (forward) {
                const Composition x(*row);
                if (ratio) {
                    const RatioVector y = ratio_forward(x);
                    result.assign(y.entries().begin(), y.entries().end());
                    log_jac = log_det_jacobian_ratio_inverse(y, x.size());
                } else {
                    const LogRatioVector y = log_ratio_forward(x);
                    result.assign(y.entries().begin(), y.entries().end());
                    log_jac = log_det_jacobian_log_ratio_inverse(y, x.size());
                }
            } else {
                if (ratio) {
                    const RatioVector y(*row);
                    const Composition x = ratio_inverse(y);
                    result.assign(x.entries().begin(), x.entries().end());
                    log_jac = log_det_jacobian_ratio_inverse(y, x.size());
                } else {
                    const LogRatioVector y(*row);
                    const Composition x = log_ratio_inverse(y);
                    result.assign(x.entries().begin(), x.entries().end());
                    log_jac = log_det_jacobian_log_ratio_inverse(y, x.size());
                }
            }
            if (jacobian) result.push_back(log_jac);
            out << real_row(result) << '\n';
        } catch (const std::logic_error& e) {
            throw RowError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!seen_data) throw UsageError("no data rows on input");
}

std::string one_line(std::string message) {
    std::replace(message.begin(), message.end(), '\n', ' ');
    return message;
}

}  // namespace

int run_verify(std::uint64_t seed, const VerifyOptions& options, std::ostream& out) {
    const auto reports = run_all(seed, options);
    bool all_passed = true;
    std::ostringstream buf;
    for (const auto& r : reports) {
        buf << to_json_line(r) << '\n';
        all_passed = all_passed && r.passed;
    }
    out << buf.str();
    out.flush();
    return all_passed ? kSuccess : kFailure;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distributions on counts and compositions", "compdist"};
    app.require_subcommand(1);

    std::string dist;
    std::string params_text;
    std::string params_file;
    std::string point_text;
    bool log_only = false;
    std::uint64_t count = 1;
    std::uint64_t seed = 0;
    std::string level = "quick";
    std::string family;
    std::string direction;
    std::string input_path = "-";
    bool jacobian = false;

    const auto add_params = [&](CLI::App* cmd) {
        cmd->add_option("--dist", dist, "Distribution name")->required();
        auto* inline_opt = cmd->add_option("--params", params_text, "Parameters as inline JSON");
        auto* file_opt = cmd->add_option("--params-file", params_file, "Read parameters JSON from a file");
        inline_opt->excludes(file_opt);
    };

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a log density or log pmf at one point");
    add_params(eval_cmd);
    eval_cmd->add_option("--point", point_text, "Point as JSON (array, number, or [k, m] pair)")->required();
    eval_cmd->add_flag("--log", log_only, "Print only the log value");

    auto* sample_cmd = app.add_subcommand("sample", "Draw samples as CSV");
    add_params(sample_cmd);
    sample_cmd->add_option("--count", count, "Number of rows");
    sample_cmd->add_option("--seed", seed, "Random seed");

    auto* transform_cmd = app.add_subcommand("transform", "Apply ratio / log-ratio maps to CSV rows");
    transform_cmd->add_option("family", family, "ratio or alr")->required()->check(CLI::IsMember({"ratio", "alr"}));
    transform_cmd->add_option("direction", direction, "forward or inverse")
        ->required()
        ->check(CLI::IsMember({"forward", "inverse"}));
    transform_cmd->add_option("input", input_path, "Input CSV file ('-' for stdin)");
    transform_cmd->add_flag("--jacobian", jacobian, "Append the log |det J| of the inverse map");

    auto* verify_cmd = app.add_subcommand("verify", "Run the verification suite, JSON lines out");
    verify_cmd->add_option("--seed", seed, "Master seed");
    verify_cmd->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        std::ostringstream buf;
        int code = kSuccess;
        if (*eval_cmd || *sample_cmd) {
            const std::string name = canonical_name(dist);
            const json params = read_params(params_text, params_file);
            validate_params(lookup(name), params);
            if (*eval_cmd) {
                const json point = json::parse(point_text);
                const Evaluation result = evaluate(name, params, point);
                nlohmann::ordered_json obj;
                obj["dist"] = name;
                obj["params"] = params;
                obj["point"] = point;
                obj["logValue"] = result.log_value;
                const double linear = std::exp(result.log_value);
                if (!log_only && linear >= std::numeric_limits<double>::min()) obj["value"] = linear;
                if (result.truncation_bound) obj["truncationBound"] = *result.truncation_bound;
                buf << obj.dump() << '\n';
            } else {
                sample(name, params, count, seed, buf);
            }
        } else if (*transform_cmd) {
            if (input_path == "-") {
                transform_rows(family, direction, jacobian, in, buf);
            } else {
                std::ifstream file(input_path);
                if (!file) throw UsageError("cannot read input file '" + input_path + "'");
                transform_rows(family, direction, jacobian, file, buf);
            }
        } else if (*verify_cmd) {
            VerifyOptions options;
            options.level = level == "full" ? VerifyLevel::kFull : VerifyLevel::kQuick;
            return run_verify(seed, options, out);
        }
        out << buf.str();
        out.flush();
        return code;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const json::exception& e) {
        err << "error: malformed JSON: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const ContractViolation& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kUsage;
    } catch (const RowError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kFailure;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kFailure;
    }
}

}  // namespace compdist::cli
