#include "freeprod/io.hpp"

#include "freeprod/errors.hpp"

#include <fstream>
#include <sstream>

namespace freeprod::io {

namespace {

std::string child(const std::string& where, const std::string& key) {
    return where + "/" + key;
}

const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) {
        throw ParseError("expected an object", where.empty() ? "/" : where);
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(std::string("missing \"") + key + "\"", where.empty() ? "/" : where);
    }
    return *it;
}

int int_from_json(const json& j, const std::string& where) {
    if (!j.is_number_integer()) {
        throw ParseError("expected an integer", where);
    }
    return j.get<int>();
}

/// Reads a {"word": scalar} map, rejecting two keys that spell the same word
/// with different values.
std::map<Word, Complex> word_map_from_json(const Alphabet& alphabet, const json& j, const std::string& where) {
    if (!j.is_object()) {
        throw ParseError("expected an object of word: value pairs", where);
    }
    std::map<Word, Complex> out;
    for (const auto& [key, value] : j.items()) {
        const std::string loc = child(where, key);
        Word w;
        try {
            w = alphabet.parse_word(key);
        } catch (const ParseError& e) {
            throw ParseError(e.message(), e.location().empty() ? loc : loc + ", " + e.location());
        } catch (const FactorMismatchError& e) {
            throw ParseError(e.what(), loc);
        }
        const Complex z = scalar_from_json(value, loc);
        auto [it, inserted] = out.try_emplace(w, z);
        if (!inserted && !(it->second == z)) {
            throw ParseError("word '" + alphabet.format(w) + "' is given twice with different values", loc);
        }
    }
    return out;
}

std::vector<Complex> scalar_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw ParseError("expected a non-empty array of scalars", where);
    }
    std::vector<Complex> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(scalar_from_json(j[k], child(where, std::to_string(k))));
    }
    return out;
}

template <class F>
auto rethrow_as_parse(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), where.empty() ? "/" : where);
    }
}

} // namespace

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::string msg = e.what();
        if (auto p = msg.find("] "); p != std::string::npos) {
            msg = msg.substr(p + 2);
        }
        throw ParseError("invalid JSON: " + msg, source + ": byte " + std::to_string(e.byte));
    }
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open file", path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json(buffer.str(), path);
}

Complex scalar_from_json(const json& j, const std::string& where) {
    try {
        if (j.is_string()) {
            return parse_scalar(j.get<std::string>());
        }
        if (j.is_number_integer()) {
            return Complex(parse_rational(j.dump()));
        }
        if (j.is_number_float()) {
            return Complex(parse_rational(j.dump()));
        }
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad scalar: ") + e.what(), where);
    }
    throw ParseError("expected a scalar string or number", where);
}

json scalar_to_json(const Complex& z) {
    return to_string(z);
}

std::vector<GeneratorSymbol> generators_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) {
        throw ParseError("expected a non-empty array of generators", where);
    }
    std::vector<GeneratorSymbol> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const std::string loc = child(where, std::to_string(k));
        const json& g = j[k];
        if (g.is_string()) {
            out.push_back({g.get<std::string>(), true});
            continue;
        }
        const json& name = require(g, "name", loc);
        if (!name.is_string()) {
            throw ParseError("generator name must be a string", child(loc, "name"));
        }
        bool selfadjoint = true;
        if (auto it = g.find("selfadjoint"); it != g.end()) {
            if (!it->is_boolean()) {
                throw ParseError("\"selfadjoint\" must be a boolean", child(loc, "selfadjoint"));
            }
            selfadjoint = it->get<bool>();
        }
        out.push_back({name.get<std::string>(), selfadjoint});
    }
    return out;
}

json generators_to_json(const std::vector<GeneratorSymbol>& generators) {
    json out = json::array();
    for (const auto& g : generators) {
        out.push_back({{"name", g.name}, {"selfadjoint", g.selfadjoint}});
    }
    return out;
}

namespace {

struct FactorHeader {
    std::string name;
    int degree_bound = 0;
    std::vector<GeneratorSymbol> generators;
};

FactorHeader header_from_json(const json& j, const std::string& where, std::optional<int> default_bound) {
    FactorHeader h;
    const json& name = require(j, "factor", where);
    if (!name.is_string()) {
        throw ParseError("factor name must be a string", child(where, "factor"));
    }
    h.name = name.get<std::string>();
    if (j.contains("degree_bound") || !default_bound) {
        h.degree_bound = int_from_json(require(j, "degree_bound", where), child(where, "degree_bound"));
    } else {
        h.degree_bound = *default_bound;
    }
    h.generators = generators_from_json(require(j, "generators", where), child(where, "generators"));
    return h;
}

Alphabet single(FactorIndex index, const FactorHeader& h, const std::string& where) {
    Alphabet a;
    rethrow_as_parse(child(where, "generators"), [&] {
        a.add_factor(index, h.name, h.generators);
        return 0;
    });
    return a;
}

FactorState factor_from_json_impl(const json& j, FactorIndex index, const std::string& where,
                                  std::optional<int> default_bound) {
    const FactorHeader h = header_from_json(j, where, default_bound);
    const Alphabet a = single(index, h, where);
    const auto moments = word_map_from_json(a, require(j, "moments", where), child(where, "moments"));
    return rethrow_as_parse(child(where, "moments"),
                            [&] { return FactorState(index, h.name, h.generators, h.degree_bound, moments); });
}

} // namespace

FactorState factor_from_json(const json& j, FactorIndex index, const std::string& where) {
    return factor_from_json_impl(j, index, where, std::nullopt);
}

json factor_to_json(const FactorState& state) {
    json moments = json::object();
    for (const auto& w : words_up_to(state.letters(), state.degree_bound(), 1)) {
        moments[state.alphabet().format(w)] = scalar_to_json(state.moment(w));
    }
    return {{"factor", state.name()},
            {"degree_bound", state.degree_bound()},
            {"generators", generators_to_json(state.generators())},
            {"moments", moments}};
}

namespace {

const json& factor_list(const json& j) {
    const json& factors = require(j, "factors", "");
    if (!factors.is_array() || factors.empty()) {
        throw ParseError("expected a non-empty array of factors", "/factors");
    }
    return factors;
}

} // namespace

ProductSpace product_from_json(const json& j) {
    if (j.is_object() && j.contains("factor")) {
        FactorState f = factor_from_json(j, 0);
        const int n = f.degree_bound();
        std::vector<FactorState> factors;
        factors.push_back(std::move(f));
        return ProductSpace(std::move(factors), n);
    }
    const int n = int_from_json(require(j, "degree_bound", ""), "/degree_bound");
    const json& list = factor_list(j);
    std::vector<FactorState> factors;
    for (std::size_t k = 0; k < list.size(); ++k) {
        factors.push_back(factor_from_json_impl(list[k], static_cast<FactorIndex>(k),
                                                "/factors/" + std::to_string(k), n));
    }
    return rethrow_as_parse("/factors", [&] { return ProductSpace(std::move(factors), n); });
}

bool is_joint_spec(const json& j) {
    return j.is_object() && j.contains("factors") && j.contains("moments");
}

JointState joint_from_json(const json& j) {
    const int n = int_from_json(require(j, "degree_bound", ""), "/degree_bound");
    const json& list = factor_list(j);
    Alphabet alphabet;
    for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string where = "/factors/" + std::to_string(k);
        const FactorHeader h = header_from_json(list[k], where, n);
        rethrow_as_parse(where, [&] {
            alphabet.add_factor(static_cast<FactorIndex>(k), h.name, h.generators);
            return 0;
        });
    }
    const auto moments = word_map_from_json(alphabet, require(j, "moments", ""), "/moments");
    return rethrow_as_parse("/moments", [&] { return JointState(alphabet, n, moments); });
}

bool is_sequence_spec(const json& j, const char* key) {
    return j.is_object() && j.contains(key) && j.at(key).is_array();
}

MomentSequence moment_sequence_from_json(const json& j) {
    return MomentSequence{scalar_list(require(j, "moments", ""), "/moments")};
}

CumulantSequence cumulant_sequence_from_json(const json& j) {
    return CumulantSequence{scalar_list(require(j, "cumulants", ""), "/cumulants")};
}

json to_json(const MomentSequence& m) {
    json values = json::array();
    for (const auto& z : m.values) {
        values.push_back(scalar_to_json(z));
    }
    return {{"moments", values}};
}

json to_json(const CumulantSequence& k) {
    json values = json::array();
    for (const auto& z : k.values) {
        values.push_back(scalar_to_json(z));
    }
    return {{"cumulants", values}};
}

json cumulant_table_to_json(const FactorState& state) {
    const CumulantTable table(state);
    json cumulants = json::object();
    for (const auto& w : words_up_to(state.letters(), state.degree_bound(), 1)) {
        const auto letters = w.letters();
        cumulants[state.alphabet().format(w)] = scalar_to_json(table.value(letters));
    }
    return {{"factor", state.name()},
            {"degree_bound", state.degree_bound()},
            {"generators", generators_to_json(state.generators())},
            {"cumulants", cumulants}};
}

FactorState factor_from_cumulants_json(const json& j, FactorIndex index) {
    const FactorHeader h = header_from_json(j, "", std::nullopt);
    const Alphabet a = single(index, h, "");
    const auto given = word_map_from_json(a, require(j, "cumulants", ""), "/cumulants");
    std::map<CumulantTable::Key, Complex> values;
    for (const auto& [w, z] : given) {
        CumulantTable::Key key;
        for (const auto& l : w.letters()) {
            key.push_back(Word{{l}});
        }
        values.emplace(std::move(key), z);
    }
    const CumulantTable table = rethrow_as_parse("/cumulants", [&] {
        return CumulantTable(index, h.degree_bound, values);
    });
    return rethrow_as_parse("/cumulants", [&] {
        return FactorState::from_function(index, h.name, h.generators, h.degree_bound, [&](const Word& w) {
            if (w.empty()) {
                return Complex(1);
            }
            const auto letters = w.letters();
            return moments_from_cumulants(table, letters);
        });
    });
}

json to_json(const FreenessReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        violations.push_back({{"word", v.word}, {"value", scalar_to_json(v.value)}});
    }
    return {{"mode", to_string(report.mode)},
            {"max_degree", report.max_degree},
            {"checked_words", report.checked_words},
            {"violations", violations}};
}

json to_json(const PsdResult& psd, const GramMatrix& gram) {
    json pivots = json::array();
    for (const auto& p : psd.pivots) {
        pivots.push_back(to_string(p));
    }
    json out = {{"psd", psd.psd}, {"size", gram.size()}, {"rank", psd.rank}, {"pivots", pivots}};
    if (psd.witness) {
        json witness = json::array();
        for (const auto& z : *psd.witness) {
            witness.push_back(scalar_to_json(z));
        }
        out["witness"] = witness;
        out["witness_value"] = scalar_to_json(quadratic_form(gram.entries, *psd.witness));
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

} // namespace freeprod::io
