// freeprod: command-line front end for the free-cumulant engine.

#include "freeprod/errors.hpp"
#include "freeprod/io.hpp"
#include "freeprod/nc_lattice.hpp"
#include "freeprod/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fp = freeprod;
using fp::io::json;

namespace {

enum class Level { quiet = 0, info = 1, debug = 2 };

Level log_level() {
    const char* env = std::getenv("FREEPROD_LOG");
    if (env == nullptr) {
        return Level::quiet;
    }
    const std::string v(env);
    if (v == "debug") {
        return Level::debug;
    }
    if (v == "info" || v == "1") {
        return Level::info;
    }
    return Level::quiet;
}

void log(Level level, const std::string& msg) {
    static const Level current = log_level();
    if (static_cast<int>(level) <= static_cast<int>(current) && level != Level::quiet) {
        std::cerr << "[freeprod] " << msg << "\n";
    }
}

/// Rows of cells printed with padded columns.
void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::string cell = row[c];
            if (c + 1 < row.size()) {
                cell.resize(width[c], ' ');
                cell += "  ";
            }
            line += cell;
        }
        out << line << "\n";
    }
}

struct Output {
    bool table = false;

    void emit(const json& j, const std::vector<std::vector<std::string>>& rows) const {
        if (table) {
            print_table(std::cout, rows);
        } else {
            std::cout << j.dump(2) << "\n";
        }
    }
};

std::vector<std::vector<std::string>> map_rows(const json& map, const char* header) {
    std::vector<std::vector<std::string>> rows{{"word", header}};
    for (const auto& [k, v] : map.items()) {
        rows.push_back({k, v.get<std::string>()});
    }
    return rows;
}

std::vector<std::vector<std::string>> sequence_rows(const json& list, const char* header) {
    std::vector<std::vector<std::string>> rows{{"n", header}};
    for (std::size_t k = 0; k < list.size(); ++k) {
        rows.push_back({std::to_string(k + 1), list[k].get<std::string>()});
    }
    return rows;
}

int run_nc(const Output& out, int n) {
    const auto& all = fp::enumerate_nc(n);
    json parts = json::array();
    std::vector<std::vector<std::string>> rows{{"#", "partition"}};
    for (std::size_t k = 0; k < all.size(); ++k) {
        parts.push_back(fp::to_string(all[k]));
        rows.push_back({std::to_string(k + 1), fp::to_string(all[k])});
    }
    out.emit({{"n", n}, {"count", all.size()}, {"partitions", parts}}, rows);
    return 0;
}

int run_moebius(const Output& out, int n, const std::string& sigma_text, const std::string& pi_text) {
    const auto sigma = fp::parse_partition(sigma_text, n);
    const auto pi = fp::parse_partition(pi_text, n);
    const auto mu = fp::moebius(sigma, pi);
    out.emit({{"n", n}, {"sigma", fp::to_string(sigma)}, {"pi", fp::to_string(pi)}, {"mu", mu}},
             {{"sigma", "pi", "mu"}, {fp::to_string(sigma), fp::to_string(pi), std::to_string(mu)}});
    return 0;
}

int run_cumulants(const Output& out, const std::string& path) {
    const json in = fp::io::read_json_file(path);
    if (fp::io::is_sequence_spec(in, "moments")) {
        const json result = fp::io::to_json(fp::cumulants_from_moments(fp::io::moment_sequence_from_json(in)));
        out.emit(result, sequence_rows(result["cumulants"], "kappa_n"));
        return 0;
    }
    const json result = fp::io::cumulant_table_to_json(fp::io::factor_from_json(in, 0));
    out.emit(result, map_rows(result["cumulants"], "kappa"));
    return 0;
}

int run_moments(const Output& out, const std::string& path) {
    const json in = fp::io::read_json_file(path);
    if (fp::io::is_sequence_spec(in, "cumulants")) {
        const json result = fp::io::to_json(fp::moments_from_cumulants(fp::io::cumulant_sequence_from_json(in)));
        out.emit(result, sequence_rows(result["moments"], "m_n"));
        return 0;
    }
    const json result = fp::io::factor_to_json(fp::io::factor_from_cumulants_json(in));
    out.emit(result, map_rows(result["moments"], "phi"));
    return 0;
}

int run_product_eval(const Output& out, const std::string& path, const std::string& word_text) {
    const fp::ProductSpace space = fp::io::product_from_json(fp::io::read_json_file(path));
    fp::Word w;
    try {
        w = space.alphabet().parse_word(word_text);
    } catch (const fp::ParseError& e) {
        throw fp::ParseError(e.message(), e.location().empty() ? "--word" : "--word, " + e.location());
    }
    const fp::Complex value = fp::state_eval_word(space, w);
    const std::string word = space.alphabet().format(w);
    out.emit({{"word", word}, {"value", fp::to_string(value)}}, {{"word", "value"}, {word, fp::to_string(value)}});
    return 0;
}

int run_convolve(const Output& out, const std::string& x_path, const std::string& y_path) {
    const auto x = fp::io::moment_sequence_from_json(fp::io::read_json_file(x_path));
    const auto y = fp::io::moment_sequence_from_json(fp::io::read_json_file(y_path));
    const json result = fp::io::to_json(fp::free_convolve_additive(x, y));
    out.emit(result, sequence_rows(result["moments"], "m_n"));
    return 0;
}

json psd_violation(const std::string& name, const fp::PositivityResult& r) {
    return {{"word", "gram(" + name + ")"},
            {"value", fp::to_string(fp::quadratic_form(r.gram.entries, *r.psd.witness))}};
}

std::string pattern_label(const fp::Alphabet& alphabet, const std::vector<fp::FactorIndex>& pattern) {
    std::string s;
    for (auto f : pattern) {
        s += (s.empty() ? "" : " ") + alphabet.factor(f).name;
    }
    return s;
}

int run_verify(const Output& out, const std::string& path, int max_degree, const std::string& mode) {
    const json in = fp::io::read_json_file(path);
    json result = {{"mode", mode}, {"max_degree", max_degree}};
    json violations = json::array();
    std::vector<std::vector<std::string>> rows;
    auto add_report = [&](const fp::FreenessReport& report) {
        const json j = fp::io::to_json(report);
        result["reports"].push_back(j);
        rows.push_back({fp::to_string(report.mode), "checked " + std::to_string(report.checked_words),
                        std::to_string(report.violations.size()) + " violations"});
        for (const auto& v : j["violations"]) {
            violations.push_back(v);
        }
    };
    const auto start = std::chrono::steady_clock::now();
    if (mode == "positivity") {
        if (fp::io::is_joint_spec(in)) {
            throw fp::ParseError("positivity needs a product spec, not a joint moment table", "/moments");
        }
        const fp::ProductSpace space = fp::io::product_from_json(in);
        const int d = max_degree / 2;
        result["basis_degree"] = d;
        for (auto index : space.factor_indices()) {
            const auto& factor = space.factor(index);
            const auto r = fp::check_positivity(factor, d);
            json j = fp::io::to_json(r.psd, r.gram);
            j["factor"] = factor.name();
            result["factors"].push_back(j);
            rows.push_back({"factor " + factor.name(), r.psd.psd ? "psd" : "not psd",
                            "rank " + std::to_string(r.psd.rank) + "/" + std::to_string(r.gram.size())});
            if (!r.psd.psd) {
                violations.push_back(psd_violation(factor.name(), r));
            }
        }
        const auto r = fp::check_positivity(space, d);
        result["product"] = fp::io::to_json(r.psd, r.gram);
        result["product"]["schur"] = r.schur_holds();
        rows.push_back({"product", r.psd.psd ? "psd" : "not psd",
                        "rank " + std::to_string(r.psd.rank) + "/" + std::to_string(r.gram.size())});
        if (!r.psd.psd) {
            violations.push_back(psd_violation("product", r));
        }
        for (const auto& check : r.schur) {
            if (check.holds) {
                continue;
            }
            violations.push_back({{"word", "schur(" + pattern_label(space.alphabet(), check.pattern) + ")"},
                                  {"value", "mismatch"}});
        }
    } else {
        if (mode != "moments" && mode != "cumulants" && mode != "both") {
            throw fp::ParseError("unknown mode '" + mode + "'", "--mode");
        }
        const fp::JointState state = fp::io::is_joint_spec(in)
                                         ? fp::io::joint_from_json(in)
                                         : fp::JointState::of(fp::io::product_from_json(in), max_degree);
        log(Level::info, "joint state tabulated up to degree " + std::to_string(state.degree_bound()));
        result["reports"] = json::array();
        if (mode != "cumulants") {
            add_report(fp::check_freeness_moments(state, max_degree));
        }
        if (mode != "moments") {
            add_report(fp::check_freeness_cumulants(state, max_degree));
        }
    }
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    log(Level::debug, "verify took " + std::to_string(ms) + " ms");
    result["violations"] = violations;
    for (const auto& v : violations) {
        rows.push_back({"violation", v["word"].get<std::string>(), v["value"].get<std::string>()});
    }
    out.emit(result, rows);
    return violations.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact free cumulants, free products and freeness checks"};
    app.require_subcommand(1);
    std::string format = "json";
    app.add_option("--output", format, "Output format")->check(CLI::IsMember({"json", "table"}));

    int nc_n = 0;
    auto* nc = app.add_subcommand("nc", "List the non-crossing partitions of {1..n}");
    nc->add_option("n", nc_n)->required();

    int mu_n = 0;
    std::string mu_sigma;
    std::string mu_pi;
    auto* mu = app.add_subcommand("moebius", "Möbius function of NC(n) on [sigma, pi]");
    mu->add_option("n", mu_n)->required();
    mu->add_option("sigma", mu_sigma)->required();
    mu->add_option("pi", mu_pi)->required();

    std::string from_moments;
    auto* cum = app.add_subcommand("cumulants", "Free cumulants from a moment file");
    cum->add_option("--from-moments", from_moments)->required();

    std::string from_cumulants;
    auto* mom = app.add_subcommand("moments", "Moments from a cumulant file");
    mom->add_option("--from-cumulants", from_cumulants)->required();

    std::string eval_spec;
    std::string eval_word;
    auto* eval = app.add_subcommand("product-eval", "Free product state of a word");
    eval->add_option("--spec", eval_spec)->required();
    eval->add_option("--word", eval_word)->required();

    std::string conv_x;
    std::string conv_y;
    auto* conv = app.add_subcommand("convolve", "Free additive convolution of two moment sequences");
    conv->add_option("x", conv_x)->required();
    conv->add_option("y", conv_y)->required();

    std::string verify_spec;
    int verify_degree = 0;
    std::string verify_mode = "both";
    auto* verify = app.add_subcommand("verify", "Check freeness or positivity up to a degree");
    verify->add_option("--spec", verify_spec)->required();
    verify->add_option("--max-degree", verify_degree)->required();
    verify->add_option("--mode", verify_mode)->check(CLI::IsMember({"moments", "cumulants", "both", "positivity"}));

    for (auto* sub : {nc, mu, cum, mom, eval, conv, verify}) {
        sub->add_option("--output", format, "Output format")->check(CLI::IsMember({"json", "table"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const Output out{format == "table"};
    try {
        if (*nc) {
            return run_nc(out, nc_n);
        }
        if (*mu) {
            return run_moebius(out, mu_n, mu_sigma, mu_pi);
        }
        if (*cum) {
            return run_cumulants(out, from_moments);
        }
        if (*mom) {
            return run_moments(out, from_cumulants);
        }
        if (*eval) {
            return run_product_eval(out, eval_spec, eval_word);
        }
        if (*conv) {
            return run_convolve(out, conv_x, conv_y);
        }
        return run_verify(out, verify_spec, verify_degree, verify_mode);
    } catch (const fp::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const fp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
