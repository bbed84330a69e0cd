#pragma once

// Config ingestion and machine-readable output.
//
// Config files are JSON objects with exactly these keys:
//
//   J       integer, number of locations
//   lambda  list of J arrival rates
//   mu      list of J objects {"head": [mu(1), ..., mu(m)], "tail": mu_inf};
//           "head" may be omitted
//   b       list of J base-stock levels
//   nu      supplier rate
//   beta    optional channel-transfer rate
//
// Every number written by this module uses 17 significant digits, so values
// read back compare equal to the doubles that were written.

#include <nlohmann/json.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "lbnet/model.hpp"
#include "lbnet/theta.hpp"

namespace lbnet {

namespace detail {

inline double number_field(const nlohmann::json& j, const std::string& field) {
    if (!j.is_number()) throw invalid_config(field, "expected a number");
    return j.get<double>();
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& field) {
    if (!j.is_array()) throw invalid_config(field, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(number_field(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

}  // namespace detail

inline NetworkConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) throw invalid_config("<root>", "expected a JSON object");
    static const std::set<std::string> known{"J", "lambda", "mu", "b", "nu", "beta"};
    for (const auto& [key, value] : doc.items())
        if (!known.count(key)) throw invalid_config(key, "unknown key");
    for (const char* key : {"J", "lambda", "mu", "b", "nu"})
        if (!doc.contains(key)) throw invalid_config(key, "missing required key");

    if (!doc["J"].is_number_integer()) throw invalid_config("J", "expected an integer");
    const auto J = doc["J"].get<long long>();

    NetworkConfig c;
    c.lambda = detail::number_list(doc["lambda"], "lambda");

    const auto& mu = doc["mu"];
    if (!mu.is_array()) throw invalid_config("mu", "expected a list of service profiles");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const std::string field = "mu[" + std::to_string(i) + "]";
        const auto& p = mu[i];
        if (!p.is_object()) throw invalid_config(field, "expected {\"head\": [...], \"tail\": x}");
        for (const auto& [key, value] : p.items())
            if (key != "head" && key != "tail") throw invalid_config(field + "." + key, "unknown key");
        if (!p.contains("tail")) throw invalid_config(field + ".tail", "missing required key");
        std::vector<double> head;
        if (p.contains("head")) head = detail::number_list(p["head"], field + ".head");
        c.mu.emplace_back(std::move(head), detail::number_field(p["tail"], field + ".tail"));
    }

    const auto& b = doc["b"];
    if (!b.is_array()) throw invalid_config("b", "expected a list of integers");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].is_number_integer())
            throw invalid_config("b[" + std::to_string(i) + "]", "expected an integer");
        c.b.push_back(b[i].get<int>());
    }
    c.nu = detail::number_field(doc["nu"], "nu");
    if (doc.contains("beta")) c.transfer_beta = detail::number_field(doc["beta"], "beta");

    if (J < 2) throw invalid_config("J", "at least two locations are required");
    if (c.lambda.size() != static_cast<std::size_t>(J))
        throw invalid_config("lambda", "expected J entries");
    if (c.mu.size() != static_cast<std::size_t>(J)) throw invalid_config("mu", "expected J entries");
    if (c.b.size() != static_cast<std::size_t>(J)) throw invalid_config("b", "expected J entries");
    c.validate();
    return c;
}

inline NetworkConfig parse_config(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw invalid_config("<file>", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline NetworkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_config("<file>", "cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

// %.17g; non-finite values become null.
inline std::string format_number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Minimal streaming JSON emitter; callers are responsible for structure.
class JsonWriter {
public:
    explicit JsonWriter(std::ostream& out) : out_(out) {}

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& k) {
        separator();
        string_literal(k);
        out_ << ':';
        pending_key_ = true;
        return *this;
    }

    JsonWriter& value(double v) { return raw(format_number(v)); }
    template <std::integral T>
        requires(!std::is_same_v<T, bool>)
    JsonWriter& value(T v) {
        return raw(std::to_string(v));
    }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const std::string& v) {
        separator();
        string_literal(v);
        return *this;
    }
    JsonWriter& value(const char* v) { return value(std::string(v)); }
    JsonWriter& null() { return raw("null"); }

    template <class T>
    JsonWriter& values(const std::vector<T>& vs) {
        begin_array();
        for (const auto& v : vs) value(v);
        return end_array();
    }

    template <class T>
    JsonWriter& field(const std::string& k, const T& v) {
        key(k);
        if constexpr (requires { v.begin(); } && !std::is_convertible_v<T, std::string>)
            return values(v);
        else
            return value(v);
    }

private:
    JsonWriter& open(char c) {
        separator();
        out_ << c;
        first_ = true;
        return *this;
    }
    JsonWriter& close(char c) {
        out_ << c;
        first_ = false;
        return *this;
    }
    JsonWriter& raw(const std::string& s) {
        separator();
        out_ << s;
        return *this;
    }
    void separator() {
        if (pending_key_) {
            pending_key_ = false;
            return;
        }
        if (!first_) out_ << ',';
        first_ = false;
    }
    void string_literal(const std::string& s) { out_ << nlohmann::json(s).dump(); }

    std::ostream& out_;
    bool first_ = true;
    bool pending_key_ = false;
};

// {"base_stock": [...], "provenance": "...", "normalized": true,
//  "theta": [{"k": [k1, ..., kJ, kJ+1], "weight": w}, ...]}
inline void write_theta_json(JsonWriter& w, const ThetaMeasure& theta) {
    w.field("base_stock", theta.base_stock);
    w.field("provenance", std::string(to_string(theta.provenance)));
    w.field("normalized", theta.normalized);
    w.key("theta").begin_array();
    for (std::size_t i = 0; i < theta.size(); ++i) {
        w.begin_object();
        w.field("k", theta.states[i].k);
        w.field("weight", theta.weights[i]);
        w.end_object();
    }
    w.end_array();
}

inline ThetaMeasure read_theta_json(const nlohmann::json& doc) {
    const auto b = doc.at("base_stock").get<std::vector<int>>();
    ThetaMeasure m;
    m.base_stock = b;
    m.states = enumerate_inventory_states(b);
    m.weights.assign(m.states.size(), 0.0);
    const StateIndex index(b);
    std::vector<char> seen(m.states.size(), 0);
    for (const auto& entry : doc.at("theta")) {
        InventoryState s{entry.at("k").get<std::vector<int>>()};
        if (!is_valid_state(b, s)) throw precondition_error("theta entry outside K");
        const std::size_t i = index(s);
        m.weights[i] = entry.at("weight").get<double>();
        seen[i] = 1;
    }
    for (char c : seen)
        if (!c) throw precondition_error("theta table is missing states");
    const auto p = doc.at("provenance").get<std::string>();
    if (p == "exact") m.provenance = Provenance::exact;
    else if (p == "closed_form") m.provenance = Provenance::closed_form;
    else if (p == "recursive") m.provenance = Provenance::recursive;
    else if (p == "empirical") m.provenance = Provenance::empirical;
    else throw precondition_error("unknown provenance " + p);
    m.normalized = doc.value("normalized", true);
    return m;
}

// CSV with sections separated by a blank line, each with its own header:
// the theta table (k1..kJ, k{J+1}, weight), inventory marginals
// (location, level, probability) and named check residuals (check, value).
inline void write_theta_csv(std::ostream& out, const ThetaMeasure& theta) {
    const std::size_t J = theta.locations();
    for (std::size_t j = 0; j < J; ++j) out << 'k' << j + 1 << ',';
    out << 'k' << J + 1 << ",weight\n";
    for (std::size_t i = 0; i < theta.size(); ++i) {
        for (int v : theta.states[i].k) out << v << ',';
        out << format_number(theta.weights[i]) << '\n';
    }
}

inline void write_marginals_csv(std::ostream& out,
                                const std::vector<std::vector<double>>& marginals) {
    out << "location,level,probability\n";
    for (std::size_t j = 0; j < marginals.size(); ++j)
        for (std::size_t l = 0; l < marginals[j].size(); ++l)
            out << j + 1 << ',' << l << ',' << format_number(marginals[j][l]) << '\n';
}

inline void write_checks_csv(std::ostream& out,
                             const std::vector<std::pair<std::string, double>>& checks) {
    out << "check,value\n";
    for (const auto& [name, value] : checks) out << name << ',' << format_number(value) << '\n';
}

}  // namespace lbnet
