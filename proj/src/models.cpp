/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "desplan/models.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "desplan/errors.hpp"

namespace desplan {

// ---------------------------------------------------------------------------
// Quotas

std::uint32_t QuotaExpr::resolve(std::uint32_t batch) const {
    const std::int64_t v = per_batch * static_cast<std::int64_t>(batch) + constant;
    if (v < 1 || v > 0xffffffffLL)
        throw ModelError("quota " + str() + " resolves to " + std::to_string(v) + " for N=" +
                         std::to_string(batch));
    return static_cast<std::uint32_t>(v);
}

std::string QuotaExpr::str() const {
    std::string out;
    if (per_batch != 0) out = (per_batch == 1 ? std::string() : std::to_string(per_batch)) + "N";
    if (constant != 0 || out.empty()) {
        if (!out.empty() && constant > 0) out += "+";
        out += std::to_string(constant);
    }
    return out;
}

QuotaExpr QuotaExpr::parse(std::string_view text) {
    QuotaExpr q{0, 0};
    if (text.empty()) throw ModelError("empty quota expression");
    std::size_t i = 0;
    bool any = false;
    while (i < text.size()) {
        std::int64_t sign = 1;
        if (text[i] == '+' || text[i] == '-') {
            if (text[i] == '-') sign = -1;
            ++i;
        } else if (any) {
            throw ModelError("malformed quota expression '" + std::string(text) + "'");
        }
        std::int64_t coef = 1;
        bool digits = false;
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            auto [p, ec] = std::from_chars(text.data() + i, text.data() + text.size(), coef);
            if (ec != std::errc()) throw ModelError("malformed quota expression '" + std::string(text) + "'");
            i = static_cast<std::size_t>(p - text.data());
            digits = true;
        }
        if (i < text.size() && text[i] == '*') {
            if (!digits) throw ModelError("malformed quota expression '" + std::string(text) + "'");
            ++i;
            if (i >= text.size() || text[i] != 'N')
                throw ModelError("malformed quota expression '" + std::string(text) + "'");
        }
        if (i < text.size() && text[i] == 'N') {
            q.per_batch += sign * coef;
            ++i;
        } else if (digits) {
            q.constant += sign * coef;
        } else {
            throw ModelError("malformed quota expression '" + std::string(text) + "'");
        }
        any = true;
    }
    return q;
}

// ---------------------------------------------------------------------------
// Bundles

std::vector<Recipe> ModelBundle::recipes_for(std::uint32_t batch) const {
    std::vector<Recipe> out;
    out.reserve(recipes.size());
    for (const RecipeSpec& r : recipes) out.push_back({r.name, r.steps, r.quota.resolve(batch)});
    return out;
}

void ModelBundle::validate() const {
    std::map<std::string, bool> controllable;
    std::map<std::string, bool> in_plant;
    auto scan = [&](const std::vector<Automaton>& list, bool plant) {
        for (const Automaton& a : list) {
            for (const Event& e : a.alphabet()) {
                auto [it, fresh] = controllable.emplace(e.id, e.controllable);
                if (!fresh && it->second != e.controllable)
                    throw ModelError("event '" + e.id + "' has conflicting controllability (automaton '" +
                                     a.name() + "')");
                if (plant) in_plant[e.id] = true;
            }
        }
    };
    if (plants.empty()) throw ModelError("model '" + name + "' has no plant automata");
    scan(plants, true);
    scan(specs, false);
    for (const RecipeSpec& r : recipes) {
        if (r.steps.empty()) throw ModelError("recipe '" + r.name + "' has no steps");
        for (const std::string& s : r.steps) {
            if (!in_plant.count(s))
                throw ModelError("recipe '" + r.name + "' step '" + s + "' is not a plant event");
            if (!controllable[s])
                throw ModelError("recipe '" + r.name + "' step '" + s + "' is not controllable");
        }
    }
    std::vector<Event> alphabet;
    for (const auto& [id, c] : controllable) alphabet.push_back({id, c});
    timing.validate(alphabet);
}

// ---------------------------------------------------------------------------
// Built-in benchmarks

namespace {

struct Arc {
    const char* src;
    const char* event;
    const char* dst;
};

// State labels double as names; tasks[i] belongs to labels[i]; the first
// state is initial and the only marked one.
Automaton make_automaton(const std::string& name, const std::vector<std::string>& labels,
                         const std::vector<std::uint32_t>& tasks, const std::vector<Arc>& arcs) {
    AutomatonBuilder b(name);
    for (const Arc& a : arcs) {
        const int id = std::stoi(a.event);
        b.add_event(a.event, id % 2 == 1);
    }
    for (std::size_t i = 0; i < labels.size(); ++i) b.add_state(labels[i], tasks.empty() ? 0 : tasks[i], i == 0);
    b.set_initial(labels.front());
    for (const Arc& a : arcs) b.add_transition(a.src, a.event, a.dst);
    return b.build();
}

// Idle state "0" plus one working state per operation (start, finish).
Automaton machine(const std::string& name, const std::vector<std::pair<const char*, const char*>>& ops) {
    AutomatonBuilder b(name);
    b.add_state("0", 0, true);
    b.set_initial("0");
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const std::string w = std::to_string(i + 1);
        b.add_event(ops[i].first, true);
        b.add_event(ops[i].second, false);
        b.add_state(w, 1, false);
        b.add_transition("0", ops[i].first, w);
        b.add_transition(w, ops[i].second, "0");
    }
    return b.build();
}

// Cyclic specification visiting `events` in order.
Automaton cycle(const std::string& name, const std::vector<const char*>& events) {
    std::vector<std::string> labels;
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < events.size(); ++i) labels.push_back(std::to_string(i));
    std::vector<std::string> src(events.size()), dst(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        src[i] = labels[i];
        dst[i] = labels[(i + 1) % events.size()];
    }
    for (std::size_t i = 0; i < events.size(); ++i) arcs.push_back({src[i].c_str(), events[i], dst[i].c_str()});
    return make_automaton(name, labels, {}, arcs);
}

} // namespace

ModelBundle builtin_small_factory() {
    ModelBundle m;
    m.name = "small-factory";

    auto unit = [](const std::string& name, const char* start, const char* finish) {
        AutomatonBuilder b(name);
        b.add_event(start, true);
        b.add_event(finish, false);
        b.add_state("I", 0, true);
        b.add_state("W", 1, false);
        b.set_initial("I");
        b.add_transition("I", start, "W");
        b.add_transition("W", finish, "I");
        return b.build();
    };
    m.plants.push_back(unit("M1", "a1", "b1"));
    m.plants.push_back(unit("M2", "a2", "b2"));

    AutomatonBuilder e("E");
    e.add_event("b1", false);
    e.add_event("a2", true);
    e.add_state("E", 0, true);
    e.add_state("F", 0, false);
    e.set_initial("E");
    e.add_transition("E", "b1", "F");
    e.add_transition("F", "a2", "E");
    m.specs.push_back(e.build());

    m.timing.add_completion("a1", "b1", 10);
    m.timing.add_completion("a2", "b2", 5);
    m.recipes.push_back({"product", QuotaExpr{1, 0}, {"a1", "a2"}});
    return m;
}

ModelBundle builtin_fms() {
    ModelBundle m;
    m.name = "fms";

    m.plants.push_back(machine("C1", {{"11", "12"}}));
    m.plants.push_back(machine("C2", {{"21", "22"}}));
    m.plants.push_back(machine("Mill", {{"41", "42"}}));
    m.plants.push_back(machine("PD", {{"81", "82"}}));
    m.plants.push_back(machine("Lathe", {{"51", "52"}, {"53", "54"}}));
    m.plants.push_back(machine("C3", {{"71", "72"}, {"73", "74"}}));
    m.plants.push_back(make_automaton("AM", {"0", "1", "2", "3"}, {0, 1, 1, 1},
                                      {{"0", "61", "1"},
                                       {"1", "63", "2"},
                                       {"1", "65", "3"},
                                       {"2", "64", "0"},
                                       {"3", "66", "0"}}));
    m.plants.push_back(
        machine("Robot", {{"31", "32"}, {"33", "34"}, {"39", "30"}, {"37", "38"}, {"35", "36"}}));

    // Buffer specifications.
    m.specs.push_back(cycle("E1", {"12", "31"}));
    m.specs.push_back(cycle("E2", {"22", "33"}));
    m.specs.push_back(cycle("E3", {"32", "41", "42", "35"}));
    m.specs.push_back(make_automaton("E4", {"0", "1", "2", "3", "4", "5"}, {},
                                     {{"0", "34", "1"},
                                      {"1", "51", "2"},
                                      {"1", "53", "3"},
                                      {"2", "52", "4"},
                                      {"4", "37", "0"},
                                      {"3", "54", "5"},
                                      {"5", "39", "0"}}));
    m.specs.push_back(cycle("E5", {"36", "61"}));
    m.specs.push_back(cycle("E6", {"38", "63"}));
    m.specs.push_back(cycle("E7", {"30", "71", "72", "81", "82", "73", "74", "65"}));
    m.specs.push_back(cycle("E8", {"74", "65"}));

    m.timing.add_completion("11", "12", 25);
    m.timing.add_completion("21", "22", 25);
    m.timing.add_completion("31", "32", 21);
    m.timing.add_completion("33", "34", 19);
    m.timing.add_completion("35", "36", 16);
    m.timing.add_completion("37", "38", 24);
    m.timing.add_completion("39", "30", 20);
    m.timing.add_completion("41", "42", 30);
    m.timing.add_completion("51", "52", 38);
    m.timing.add_completion("53", "54", 32);
    m.timing.add_guard("61", {"63", "65"}, 15);
    m.timing.add_completion("63", "64", 26);
    m.timing.add_completion("65", "66", 26);
    m.timing.add_completion("71", "72", 25);
    m.timing.add_completion("73", "74", 25);
    m.timing.add_completion("81", "82", 24);

    m.recipes.push_back({"base", QuotaExpr{2, 0}, {"11", "31", "41", "35", "61"}});
    m.recipes.push_back({"pin-a", QuotaExpr{1, 0}, {"21", "33", "51", "37", "63"}});
    m.recipes.push_back({"pin-b", QuotaExpr{1, 0}, {"21", "33", "53", "39", "71", "81", "73", "65"}});
    return m;
}

ModelBundle builtin_model(std::string_view name) {
    if (name == "small-factory") return builtin_small_factory();
    if (name == "fms") return builtin_fms();
    throw InputError("unknown builtin model '" + std::string(name) + "' (expected small-factory or fms)");
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct Token {
    std::string_view text;
    std::size_t column; // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size() || line[i] == '#') break;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
        out.push_back({line.substr(start, i - start), start + 1});
    }
    return out;
}

std::optional<double> parse_number(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

class Parser {
public:
    ModelBundle run(std::string_view text) {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            ++lineno_;
            line_ = line;
            handle(tokenize(line));
            if (end == text.size()) break;
            pos = end + 1;
        }
        close_block();
        if (bundle_.name.empty()) bundle_.name = "model";
        try {
            bundle_.validate();
        } catch (const ModelError& e) {
            throw ParseError(lineno_, 1, e.what());
        }
        return std::move(bundle_);
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& what) { throw ParseError(lineno_, t.column, what); }
    [[noreturn]] void fail_at(std::size_t column, const std::string& what) {
        throw ParseError(lineno_, column, what);
    }

    void expect_args(const std::vector<Token>& tok, std::size_t n, const char* usage) {
        if (tok.size() != n) fail(tok.front(), std::string("expected ") + usage);
    }

    void handle(const std::vector<Token>& tok) {
        if (tok.empty()) return;
        const std::string_view kw = tok[0].text;
        if (kw == ".model") {
            expect_args(tok, 2, "'.model <name>'");
            bundle_.name = std::string(tok[1].text);
        } else if (kw == ".automaton") {
            close_block();
            if (tok.size() != 2 && tok.size() != 3) fail(tok[0], "expected '.automaton <name> [plant|spec]'");
            is_spec_ = false;
            if (tok.size() == 3) {
                if (tok[2].text == "spec")
                    is_spec_ = true;
                else if (tok[2].text != "plant")
                    fail(tok[2], "automaton kind must be 'plant' or 'spec'");
            }
            block_.emplace(std::string(tok[1].text));
            block_line_ = lineno_;
            has_initial_ = false;
        } else if (kw == ".events") {
            need_block(tok[0]);
            if (tok.size() < 3 || tok.size() % 2 == 0) fail(tok[0], "expected '.events <id> <c|u> ...'");
            for (std::size_t i = 1; i < tok.size(); i += 2) {
                const auto kind = tok[i + 1].text;
                if (kind != "c" && kind != "u") fail(tok[i + 1], "event kind must be 'c' or 'u'");
                try {
                    block_->add_event(std::string(tok[i].text), kind == "c");
                } catch (const ModelError& e) {
                    fail(tok[i], e.what());
                }
            }
        } else if (kw == ".states") {
            need_block(tok[0]);
            if (tok.size() < 2) fail(tok[0], "expected '.states <id> [tasks=<k>] [marked] [initial]'");
            std::uint32_t tasks = 0;
            bool marked = false, initial = false;
            for (std::size_t i = 2; i < tok.size(); ++i) {
                const auto t = tok[i].text;
                if (t == "marked") {
                    marked = true;
                } else if (t == "initial") {
                    initial = true;
                } else if (t.substr(0, 6) == "tasks=") {
                    const auto v = t.substr(6);
                    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), tasks);
                    if (ec != std::errc() || p != v.data() + v.size())
                        fail(tok[i], "tasks must be a non-negative integer");
                } else {
                    fail(tok[i], "unknown state attribute '" + std::string(t) + "'");
                }
            }
            try {
                const StateId q = block_->add_state(std::string(tok[1].text), tasks, marked);
                if (initial) {
                    if (has_initial_) fail(tok[1], "second initial state");
                    block_->set_initial(q);
                    has_initial_ = true;
                }
            } catch (const ParseError&) {
                throw;
            } catch (const ModelError& e) {
                fail(tok[1], e.what());
            }
        } else if (kw == ".trans") {
            need_block(tok[0]);
            expect_args(tok, 4, "'.trans <src> <event> <dst>'");
            if (!block_->has_state(tok[1].text)) fail(tok[1], "unknown state '" + std::string(tok[1].text) + "'");
            if (!block_->has_event(tok[2].text)) fail(tok[2], "unknown event '" + std::string(tok[2].text) + "'");
            if (!block_->has_state(tok[3].text)) fail(tok[3], "unknown state '" + std::string(tok[3].text) + "'");
            try {
                block_->add_transition(tok[1].text, tok[2].text, tok[3].text);
            } catch (const ModelError& e) {
                fail(tok[2], e.what());
            }
        } else if (kw == ".timing") {
            close_block();
            if (tok.size() != 5 || tok[2].text != "->") fail(tok[0], "expected '.timing <trigger> -> <target> <duration>'");
            const auto d = parse_number(tok[4].text);
            if (!d) fail(tok[4], "duration must be a number");
            try {
                bundle_.timing.add_completion(std::string(tok[1].text), std::string(tok[3].text), *d);
            } catch (const ModelError& e) {
                fail(tok[1], e.what());
            }
        } else if (kw == ".guard") {
            close_block();
            guard(tok);
        } else if (kw == ".recipe") {
            close_block();
            recipe(tok);
        } else {
            fail(tok[0], "unknown directive '" + std::string(kw) + "'");
        }
    }

    void guard(const std::vector<Token>& tok) {
        if (tok.size() < 5 || tok[2].text != "->") fail(tok[0], "expected '.guard <trigger> -> {<targets>} <duration>'");
        const Token& last = tok.back();
        const auto d = parse_number(last.text);
        if (!d) fail(last, "duration must be a number");
        // Targets span from the token after "->" up to the duration.
        const std::size_t from = tok[3].column - 1;
        const std::size_t to = last.column - 1;
        std::string_view set = line_.substr(from, to - from);
        while (!set.empty() && std::isspace(static_cast<unsigned char>(set.back()))) set.remove_suffix(1);
        if (set.size() < 2 || set.front() != '{' || set.back() != '}') fail(tok[3], "guard targets must be '{a,b,...}'");
        set = set.substr(1, set.size() - 2);
        std::vector<std::string> targets;
        std::string cur;
        for (char c : set) {
            if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                if (!cur.empty()) targets.push_back(std::move(cur));
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        if (!cur.empty()) targets.push_back(std::move(cur));
        if (targets.empty()) fail(tok[3], "guard has no targets");
        try {
            bundle_.timing.add_guard(std::string(tok[1].text), std::move(targets), *d);
        } catch (const ModelError& e) {
            fail(tok[1], e.what());
        }
    }

    void recipe(const std::vector<Token>& tok) {
        if (tok.size() < 5 || tok[2].text.substr(0, 6) != "quota=" || tok[3].text != ":")
            fail(tok[0], "expected '.recipe <name> quota=<expr> : <events>'");
        RecipeSpec r;
        r.name = std::string(tok[1].text);
        try {
            r.quota = QuotaExpr::parse(tok[2].text.substr(6));
        } catch (const ModelError& e) {
            fail_at(tok[2].column + 6, e.what());
        }
        for (std::size_t i = 4; i < tok.size(); ++i) r.steps.emplace_back(tok[i].text);
        bundle_.recipes.push_back(std::move(r));
    }

    void need_block(const Token& t) {
        if (!block_) fail(t, "'" + std::string(t.text) + "' outside an .automaton block");
    }

    void close_block() {
        if (!block_) return;
        try {
            Automaton a = block_->build();
            (is_spec_ ? bundle_.specs : bundle_.plants).push_back(std::move(a));
        } catch (const ModelError& e) {
            throw ParseError(block_line_, 1, e.what());
        }
        block_.reset();
    }

    ModelBundle bundle_;
    std::optional<AutomatonBuilder> block_;
    bool is_spec_ = false;
    bool has_initial_ = false;
    std::size_t block_line_ = 0;
    std::size_t lineno_ = 0;
    std::string_view line_;
};

void write_automaton(std::ostream& out, const Automaton& a, bool spec) {
    out << ".automaton " << a.name() << (spec ? " spec" : " plant") << '\n';
    for (const Event& e : a.alphabet()) out << ".events " << e.id << (e.controllable ? " c" : " u") << '\n';
    for (StateId q = 0; q < a.state_count(); ++q) {
        out << ".states " << a.label(q) << " tasks=" << a.tasks(q);
        if (q == a.initial()) out << " initial";
        if (a.marked(q)) out << " marked";
        out << '\n';
    }
    for (StateId q = 0; q < a.state_count(); ++q)
        for (const auto& e : a.edges(q))
            out << ".trans " << a.label(q) << ' ' << a.event(e.event).id << ' ' << a.label(e.target) << '\n';
}

} // namespace

ModelBundle parse_model(std::string_view text) { return Parser().run(text); }

std::string serialize_model(const ModelBundle& bundle) {
    std::ostringstream out;
    out << ".model " << bundle.name << '\n';
    for (const Automaton& a : bundle.plants) {
        out << '\n';
        write_automaton(out, a, false);
    }
    for (const Automaton& a : bundle.specs) {
        out << '\n';
        write_automaton(out, a, true);
    }
    if (!bundle.timing.empty()) out << '\n';
    for (const TimingEntry& t : bundle.timing.entries()) {
        if (t.kind == TimingEntry::Kind::Completion) {
            out << ".timing " << t.trigger << " -> " << t.targets.front() << ' ' << format_time(t.duration) << '\n';
        } else {
            out << ".guard " << t.trigger << " -> {";
            for (std::size_t i = 0; i < t.targets.size(); ++i) out << (i ? "," : "") << t.targets[i];
            out << "} " << format_time(t.duration) << '\n';
        }
    }
    if (!bundle.recipes.empty()) out << '\n';
    for (const RecipeSpec& r : bundle.recipes) {
        out << ".recipe " << r.name << " quota=" << r.quota.str() << " :";
        for (const auto& s : r.steps) out << ' ' << s;
        out << '\n';
    }
    return out.str();
}

ModelBundle load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

} // namespace desplan
