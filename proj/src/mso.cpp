#include "msckit/mso.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <functional>
#include <optional>
#include <regex>

#include "msckit/relations.hpp"

namespace msckit::mso {

bool is_set_variable(const std::string& name) {
    return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

namespace {

// ---------------------------------------------------------------- lexer

enum class Tok {
    Ident, LParen, RParen, LBrack, RBrack, Comma, Dot, Colon, Not, And, Or, Implies, Iff,
    Arrow, ArrowPlus, ArrowStar, Msg, Le, Lt, Eq, Neq, Bang, Quest, Plus, Star, End
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t pos;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto starts = [&](const char* lit) { return s.compare(i, std::char_traits<char>::length(lit), lit) == 0; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (ident_char(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        struct Sym {
            const char* lit;
            Tok kind;
        };
        static const Sym syms[] = {
            {"<->", Tok::Iff}, {"->+", Tok::ArrowPlus}, {"->*", Tok::ArrowStar}, {"->", Tok::Arrow},
            {"=>", Tok::Implies}, {"<|", Tok::Msg}, {"<=", Tok::Le}, {"<", Tok::Lt}, {"!=", Tok::Neq},
            {"=", Tok::Eq}, {"!", Tok::Bang}, {"?", Tok::Quest}, {"(", Tok::LParen}, {")", Tok::RParen},
            {"[", Tok::LBrack}, {"]", Tok::RBrack}, {",", Tok::Comma}, {".", Tok::Dot}, {":", Tok::Colon},
            {"~", Tok::Not}, {"&", Tok::And}, {"|", Tok::Or}, {"+", Tok::Plus}, {"*", Tok::Star},
        };
        bool matched = false;
        for (const auto& sym : syms) {
            if (starts(sym.lit)) {
                out.push_back({sym.kind, sym.lit, i});
                i += std::char_traits<char>::length(sym.lit);
                matched = true;
                break;
            }
        }
        if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({Tok::End, "", s.size()});
    return out;
}

// ---------------------------------------------------------------- construction helpers

FormulaPtr make(Kind k, std::vector<FormulaPtr> kids = {}) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->kids = std::move(kids);
    return f;
}

FormulaPtr make_rel(std::vector<std::string> rels, Star star, std::string x, std::string y) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::Rel;
    f->rels = std::move(rels);
    f->star = star;
    f->x = std::move(x);
    f->y = std::move(y);
    return f;
}

FormulaPtr make_quant(Kind k, std::string var, FormulaPtr body) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->var = std::move(var);
    f->kids = {std::move(body)};
    return f;
}

FormulaPtr make_in(std::string x, std::string set) {
    auto f = std::make_shared<Formula>();
    f->kind = Kind::In;
    f->x = std::move(x);
    f->y = std::move(set);
    return f;
}

bool valid_relation_name(const std::string& r) {
    static const std::set<std::string> fixed = {"proc", "msg", "mb", "1n", "nn", "bowtie", "prec"};
    static const std::regex bounded("relb(asy)?[0-9]+");
    return fixed.count(r) || std::regex_match(r, bounded);
}

const std::set<std::string>& predicate_names() {
    static const std::set<std::string> p = {"send", "recv", "matched", "chan", "dest", "src"};
    return p;
}

int predicate_arity(const std::string& p) { return p == "chan" || p == "dest" || p == "src" ? 2 : 1; }

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    FormulaPtr parse() {
        auto f = formula();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return f;
    }

private:
    const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, peek().pos); }
    void expect(Tok k, const char* what) {
        if (peek().kind != k) fail(std::string("expected ") + what);
        next();
    }
    std::string ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
        return next().text;
    }
    std::string event_var() {
        auto v = ident("an event variable");
        if (is_set_variable(v)) fail("'" + v + "' is a set variable, an event variable is needed here");
        return v;
    }

    FormulaPtr formula() { return iff(); }

    FormulaPtr iff() {
        auto l = implies();
        while (peek().kind == Tok::Iff) {
            next();
            l = make(Kind::Iff, {l, implies()});
        }
        return l;
    }

    FormulaPtr implies() {
        auto l = disj();
        if (peek().kind == Tok::Implies) {
            next();
            return make(Kind::Implies, {l, implies()});
        }
        return l;
    }

    FormulaPtr disj() {
        auto l = conj();
        while (peek().kind == Tok::Or) {
            next();
            l = make(Kind::Or, {l, conj()});
        }
        return l;
    }

    FormulaPtr conj() {
        auto l = unary();
        while (peek().kind == Tok::And) {
            next();
            l = make(Kind::And, {l, unary()});
        }
        return l;
    }

    FormulaPtr unary() {
        if (peek().kind == Tok::Not) {
            next();
            return make(Kind::Not, {unary()});
        }
        if (peek().kind == Tok::Ident && (peek().text == "E" || peek().text == "A") && peek(1).kind == Tok::Ident) {
            Kind k = next().text == "E" ? Kind::Exists : Kind::Forall;
            std::vector<std::string> vars{ident("a variable")};
            while (peek().kind == Tok::Comma) {
                next();
                vars.push_back(ident("a variable"));
            }
            expect(Tok::Dot, "'.' after the quantified variables");
            auto body = formula();
            for (auto it = vars.rbegin(); it != vars.rend(); ++it) body = make_quant(k, *it, body);
            return body;
        }
        return primary();
    }

    LabelPattern label_pattern() {
        LabelPattern lp;
        if (peek().kind == Tok::Bang) {
            lp.kind = ActionKind::send;
        } else if (peek().kind == Tok::Quest) {
            lp.kind = ActionKind::receive;
        } else {
            fail("expected '!' or '?'");
        }
        next();
        expect(Tok::LParen, "'('");
        lp.sender = ident("a process name or _");
        expect(Tok::Comma, "','");
        lp.receiver = ident("a process name or _");
        expect(Tok::Comma, "','");
        lp.payload = ident("a message name or _");
        expect(Tok::RParen, "')'");
        return lp;
    }

    FormulaPtr primary() {
        const Token& t = peek();
        if (t.kind == Tok::LParen) {
            next();
            auto f = formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind != Tok::Ident) fail("expected a formula");
        const std::string w = t.text;
        if (w == "true") {
            next();
            return make(Kind::True);
        }
        if (w == "false") {
            next();
            return make(Kind::False);
        }
        if (w == "lab" && peek(1).kind == Tok::LParen) {
            next();
            next();
            auto f = std::make_shared<Formula>();
            f->kind = Kind::Label;
            f->x = event_var();
            expect(Tok::RParen, "')'");
            expect(Tok::Eq, "'='");
            f->label = label_pattern();
            return f;
        }
        if (w == "TC" && peek(1).kind == Tok::LBrack) {
            next();
            next();
            auto f = std::make_shared<Formula>();
            f->kind = Kind::Closure;
            f->var = event_var();
            expect(Tok::Comma, "','");
            f->var2 = event_var();
            expect(Tok::Colon, "':'");
            f->kids = {formula()};
            expect(Tok::RBrack, "']'");
            if (peek().kind == Tok::Plus) {
                f->star = Star::plus;
            } else if (peek().kind == Tok::Star) {
                f->star = Star::star;
            } else {
                fail("expected '+' or '*' after TC[...]");
            }
            next();
            expect(Tok::LParen, "'('");
            f->x = event_var();
            expect(Tok::Comma, "','");
            f->y = event_var();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (predicate_names().count(w) && peek(1).kind == Tok::LParen) {
            next();
            next();
            auto f = std::make_shared<Formula>();
            f->kind = Kind::Pred;
            f->pred = w;
            f->x = event_var();
            if (predicate_arity(w) == 2) {
                expect(Tok::Comma, "','");
                f->y = event_var();
            }
            expect(Tok::RParen, "')'");
            return f;
        }
        static const std::map<std::string, ModelId> builtins = {
            {"phi_asy", ModelId::asy}, {"phi_pp", ModelId::p2p}, {"phi_co", ModelId::co}, {"phi_mb", ModelId::mb},
            {"phi_1n", ModelId::onen}, {"phi_nn", ModelId::nn},  {"phi_rsc", ModelId::rsc}};
        if (auto it = builtins.find(w); it != builtins.end()) {
            next();
            return builtin(it->second);
        }
        if (w == "no_unmatched") {
            next();
            return no_unmatched();
        }
        // atom starting with a variable
        std::string x = next().text;
        if (peek().kind == Tok::Ident && peek().text == "in") {
            next();
            if (is_set_variable(x)) fail("'" + x + "' is a set variable on the left of 'in'");
            auto set = ident("a set variable");
            if (!is_set_variable(set)) fail("'" + set + "' is not a set variable (use an uppercase name)");
            return make_in(x, set);
        }
        if (is_set_variable(x)) fail("set variable '" + x + "' used as an event");
        Tok op = peek().kind;
        std::vector<std::string> rels;
        Star star = Star::none;
        switch (op) {
            case Tok::Arrow: rels = {"proc"}; break;
            case Tok::ArrowPlus: rels = {"proc"}; star = Star::plus; break;
            case Tok::ArrowStar: rels = {"proc"}; star = Star::star; break;
            case Tok::Msg: rels = {"msg"}; break;
            case Tok::Lt: rels = {"proc", "msg"}; star = Star::plus; break;
            case Tok::Le: rels = {"proc", "msg"}; star = Star::star; break;
            case Tok::Eq:
            case Tok::Neq: {
                next();
                auto f = std::make_shared<Formula>();
                f->kind = op == Tok::Eq ? Kind::Eq : Kind::Neq;
                f->x = x;
                f->y = event_var();
                return f;
            }
            case Tok::LBrack: {
                next();
                while (true) {
                    std::size_t p = peek().pos;
                    auto r = ident("a relation name");
                    if (!valid_relation_name(r)) throw SyntaxError("unknown relation '" + r + "'", p);
                    rels.push_back(r);
                    if (peek().kind != Tok::Comma) break;
                    next();
                }
                if (peek().kind != Tok::RBrack) fail("expected ']'");
                if (peek(1).kind == Tok::Plus) {
                    star = Star::plus;
                    next();
                } else if (peek(1).kind == Tok::Star) {
                    star = Star::star;
                    next();
                }
                break;
            }
            default: fail("expected a relation after '" + x + "'");
        }
        next();
        return make_rel(rels, star, x, event_var());
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

std::string rel_text(const Formula& f) {
    const auto& r = f.rels;
    auto is = [&](std::initializer_list<const char*> names) {
        if (r.size() != names.size()) return false;
        std::set<std::string> a(r.begin(), r.end());
        for (const char* n : names)
            if (!a.count(n)) return false;
        return true;
    };
    if (is({"proc"})) return f.star == Star::none ? "->" : f.star == Star::plus ? "->+" : "->*";
    if (is({"msg"}) && f.star == Star::none) return "<|";
    if (is({"proc", "msg"}) && f.star == Star::plus) return "<";
    if (is({"proc", "msg"}) && f.star == Star::star) return "<=";
    std::string s = "[";
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "]";
    if (f.star == Star::plus) s += "+";
    if (f.star == Star::star) s += "*";
    return s;
}

void print(const Formula& f, std::string& out) {
    auto bin = [&](const char* op) {
        out += "(";
        print(*f.kids[0], out);
        out += op;
        print(*f.kids[1], out);
        out += ")";
    };
    switch (f.kind) {
        case Kind::True: out += "true"; break;
        case Kind::False: out += "false"; break;
        case Kind::Not:
            out += "~";
            print(*f.kids[0], out);
            break;
        case Kind::And: bin(" & "); break;
        case Kind::Or: bin(" | "); break;
        case Kind::Implies: bin(" => "); break;
        case Kind::Iff: bin(" <-> "); break;
        case Kind::Exists:
        case Kind::Forall:
            out += f.kind == Kind::Exists ? "(E " : "(A ";
            out += f.var + ". ";
            print(*f.kids[0], out);
            out += ")";
            break;
        case Kind::Rel: out += f.x + " " + rel_text(f) + " " + f.y; break;
        case Kind::Eq: out += f.x + " = " + f.y; break;
        case Kind::Neq: out += f.x + " != " + f.y; break;
        case Kind::In: out += f.x + " in " + f.y; break;
        case Kind::Label:
            out += "lab(" + f.x + ") = " + (f.label.kind == ActionKind::send ? "!" : "?") + "(" + f.label.sender + "," +
                   f.label.receiver + "," + f.label.payload + ")";
            break;
        case Kind::Pred:
            out += f.pred + "(" + f.x;
            if (!f.y.empty()) out += "," + f.y;
            out += ")";
            break;
        case Kind::Closure:
            out += "TC[" + f.var + "," + f.var2 + ": ";
            print(*f.kids[0], out);
            out += std::string("]") + (f.star == Star::plus ? "+" : "*") + "(" + f.x + "," + f.y + ")";
            break;
    }
}

void collect_free(const Formula& f, std::set<std::string> bound, std::set<std::string>& out) {
    auto use = [&](const std::string& v) {
        if (!v.empty() && !bound.count(v)) out.insert(v);
    };
    switch (f.kind) {
        case Kind::Exists:
        case Kind::Forall:
            bound.insert(f.var);
            collect_free(*f.kids[0], bound, out);
            return;
        case Kind::Closure: {
            use(f.x);
            use(f.y);
            auto inner = bound;
            inner.insert(f.var);
            inner.insert(f.var2);
            collect_free(*f.kids[0], inner, out);
            return;
        }
        case Kind::Rel:
        case Kind::Eq:
        case Kind::Neq:
        case Kind::In:
        case Kind::Label:
        case Kind::Pred:
            use(f.x);
            use(f.y);
            return;
        default:
            for (const auto& k : f.kids) collect_free(*k, bound, out);
    }
}

// ---------------------------------------------------------------- evaluation

using Mask = std::uint64_t;

struct Node {
    Kind kind = Kind::True;
    std::vector<Node> kids;
    int slot = -1, slot2 = -1;  // binders (Exists/Forall/Closure)
    bool set_binder = false;
    int a = -1, b = -1;         // argument slots
    int rel = -1;               // Rel: index in the relation table
    int tc = -1;                // Closure: cache index, -1 when the body has other free variables
    Star star = Star::none;
    // Label
    ActionKind lkind = ActionKind::send;
    int lsender = -1, lreceiver = -1;  // -1 any, -2 matches nothing
    std::string lpayload;
    bool lpayload_any = true;
    std::string pred;
};

struct RelKey {
    std::vector<std::string> names;
    Star star;
    bool operator<(const RelKey& o) const { return std::tie(names, star) < std::tie(o.names, o.star); }
};

class Evaluator {
public:
    Evaluator(const Msc& msc, const EvalOptions& opts) : msc_(msc), opts_(opts), n_(static_cast<int>(msc.size())) {}

    bool run(const FormulaPtr& f, const Assignment& env) {
        std::map<std::string, std::vector<int>> scope;
        std::vector<std::pair<int, EventId>> fo_init;
        std::vector<std::pair<int, std::set<EventId>>> so_init;
        std::set<std::string> free;
        collect_free(*f, {}, free);
        for (const auto& v : free) {
            if (is_set_variable(v)) {
                auto it = env.sets.find(v);
                if (it == env.sets.end()) throw std::invalid_argument("free set variable " + v + " is unassigned");
                int s = nso_++;
                scope[v].push_back(s);
                so_init.emplace_back(s, it->second);
            } else {
                auto it = env.events.find(v);
                if (it == env.events.end()) throw std::invalid_argument("free variable " + v + " is unassigned");
                if (it->second < 0 || it->second >= n_) throw std::invalid_argument("variable " + v + " is out of range");
                int s = nfo_++;
                scope[v].push_back(s);
                fo_init.emplace_back(s, it->second);
            }
        }
        Node root = compile(*f, scope);
        if ((uses_sets_ || (opts_.closure == ClosureMode::subsets && uses_closure_)) &&
            msc_.size() > std::min<std::size_t>(opts_.so_limit, 63))
            throw SizeLimitExceeded("second-order evaluation limited to " + std::to_string(opts_.so_limit) +
                                    " events, MSC has " + std::to_string(msc_.size()));
        fo_.assign(nfo_, 0);
        so_.assign(nso_, 0);
        for (auto [s, e] : fo_init) fo_[s] = e;
        for (const auto& [s, set] : so_init)
            for (EventId e : set) {
                if (e < 0 || e >= n_) throw std::invalid_argument("set member out of range");
                so_[s] |= Mask(1) << e;
            }
        tc_cache_.assign(ntc_, std::nullopt);
        rels_.assign(rel_keys_.size(), std::nullopt);
        return eval(root);
    }

private:
    Node compile(const Formula& f, std::map<std::string, std::vector<int>>& scope) {
        Node nd;
        nd.kind = f.kind;
        auto lookup = [&](const std::string& v) {
            auto it = scope.find(v);
            if (it == scope.end() || it->second.empty()) throw std::invalid_argument("unbound variable " + v);
            return it->second.back();
        };
        switch (f.kind) {
            case Kind::Exists:
            case Kind::Forall: {
                nd.set_binder = is_set_variable(f.var);
                if (nd.set_binder) uses_sets_ = true;
                nd.slot = nd.set_binder ? nso_++ : nfo_++;
                scope[f.var].push_back(nd.slot);
                nd.kids.push_back(compile(*f.kids[0], scope));
                scope[f.var].pop_back();
                break;
            }
            case Kind::Closure: {
                uses_closure_ = true;
                nd.star = f.star;
                nd.a = lookup(f.x);
                nd.b = lookup(f.y);
                nd.slot = nfo_++;
                nd.slot2 = nfo_++;
                scope[f.var].push_back(nd.slot);
                scope[f.var2].push_back(nd.slot2);
                nd.kids.push_back(compile(*f.kids[0], scope));
                scope[f.var].pop_back();
                scope[f.var2].pop_back();
                std::set<std::string> free;
                collect_free(*f.kids[0], {f.var, f.var2}, free);
                if (free.empty()) nd.tc = ntc_++;
                break;
            }
            case Kind::Rel: {
                nd.a = lookup(f.x);
                nd.b = lookup(f.y);
                nd.star = f.star;
                if (f.star != Star::none) uses_closure_ = true;
                RelKey key{f.rels, f.star};
                std::sort(key.names.begin(), key.names.end());
                auto it = rel_index_.find(key);
                if (it == rel_index_.end()) {
                    it = rel_index_.emplace(key, static_cast<int>(rel_keys_.size())).first;
                    rel_keys_.push_back(key);
                }
                nd.rel = it->second;
                break;
            }
            case Kind::Eq:
            case Kind::Neq:
                nd.a = lookup(f.x);
                nd.b = lookup(f.y);
                break;
            case Kind::In:
                nd.a = lookup(f.x);
                nd.b = lookup(f.y);
                break;
            case Kind::Label: {
                nd.a = lookup(f.x);
                nd.lkind = f.label.kind;
                auto proc = [&](const std::string& name) {
                    if (name == "_") return -1;
                    auto p = msc_.find_process(name);
                    return p ? static_cast<int>(*p) : -2;
                };
                nd.lsender = proc(f.label.sender);
                nd.lreceiver = proc(f.label.receiver);
                nd.lpayload_any = f.label.payload == "_";
                nd.lpayload = f.label.payload;
                break;
            }
            case Kind::Pred:
                nd.pred = f.pred;
                nd.a = lookup(f.x);
                if (!f.y.empty()) nd.b = lookup(f.y);
                break;
            default:
                for (const auto& k : f.kids) nd.kids.push_back(compile(*k, scope));
        }
        return nd;
    }

    RelationGraph base_relation(const std::string& name) {
        if (name == "proc") return process_relation(msc_);
        if (name == "msg") return message_relation(msc_);
        if (name == "mb") return mb_rel(msc_).base;
        if (name == "1n") return onen_rel(msc_).base;
        if (name == "nn") return nn_rel(msc_).base;
        if (name == "bowtie") return nn_bowtie(msc_).base;
        if (name == "prec") {
            RelationGraph hb = happens_before_strict(msc_);
            RelationGraph g(msc_.size());
            for (EventId s1 : msc_.sends())
                for (EventId s2 : msc_.sends())
                    if (s1 != s2 && msc_.matched(s2) && hb.has(s1, msc_.partner(s2))) g.add(s1, s2);
            return g;
        }
        if (name.rfind("relbasy", 0) == 0) return relb_asy(msc_, std::stoi(name.substr(7))).base;
        if (name.rfind("relb", 0) == 0) return relb(msc_, std::stoi(name.substr(4))).base;
        throw std::invalid_argument("unknown relation " + name);
    }

    RelationGraph relation(const RelKey& key) {
        RelationGraph g(msc_.size());
        for (const auto& name : key.names) g.unite(base_relation(name));
        return key.star == Star::none ? g : close(g, key.star);
    }

    RelationGraph close(const RelationGraph& base, Star star) {
        if (opts_.closure == ClosureMode::native) return transitive_closure(base, star == Star::star);
        // literal encoding: x R* y iff every R-forward-closed set holding x holds y;
        // x R+ y iff x R z and z R* y for some z
        const int n = n_;
        const Mask count = Mask(1) << n;
        std::vector<Mask> succ(n, 0);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (base.has(x, y)) succ[x] |= Mask(1) << y;
        RelationGraph rstar(n);
        std::vector<Mask> reach(n, count - 1);  // intersection of closed sets containing x
        for (Mask X = 0; X < count; ++X) {
            bool closed = true;
            for (int u = 0; u < n && closed; ++u)
                if ((X >> u & 1) && (succ[u] & ~X)) closed = false;
            if (!closed) continue;
            for (int x = 0; x < n; ++x)
                if (X >> x & 1) reach[x] &= X;
        }
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                if (reach[x] >> y & 1) rstar.add(x, y);
        if (star == Star::star) return rstar;
        RelationGraph plus(n);
        for (int x = 0; x < n; ++x)
            for (int z = 0; z < n; ++z)
                if (base.has(x, z))
                    for (int y = 0; y < n; ++y)
                        if (rstar.has(z, y)) plus.add(x, y);
        return plus;
    }

    RelationGraph closure_table(const Node& nd) {
        RelationGraph base(msc_.size());
        int save_u = fo_[nd.slot], save_v = fo_[nd.slot2];
        for (int u = 0; u < n_; ++u)
            for (int v = 0; v < n_; ++v) {
                fo_[nd.slot] = u;
                fo_[nd.slot2] = v;
                if (eval(nd.kids[0])) base.add(u, v);
            }
        fo_[nd.slot] = save_u;
        fo_[nd.slot2] = save_v;
        return close(base, nd.star);
    }

    bool pred(const Node& nd) {
        EventId x = fo_[nd.a];
        const Action& a = msc_.label(x);
        if (nd.pred == "send") return a.is_send();
        if (nd.pred == "recv") return a.is_receive();
        if (nd.pred == "matched") return a.is_send() && msc_.matched(x);
        const Action& b = msc_.label(fo_[nd.b]);
        if (nd.pred == "chan") return a.sender == b.sender && a.receiver == b.receiver;
        if (nd.pred == "dest") return a.receiver == b.receiver;
        if (nd.pred == "src") return a.sender == b.sender;
        throw std::logic_error("unknown predicate " + nd.pred);
    }

    bool eval(const Node& nd) {
        switch (nd.kind) {
            case Kind::True: return true;
            case Kind::False: return false;
            case Kind::Not: return !eval(nd.kids[0]);
            case Kind::And: return eval(nd.kids[0]) && eval(nd.kids[1]);
            case Kind::Or: return eval(nd.kids[0]) || eval(nd.kids[1]);
            case Kind::Implies: return !eval(nd.kids[0]) || eval(nd.kids[1]);
            case Kind::Iff: return eval(nd.kids[0]) == eval(nd.kids[1]);
            case Kind::Exists:
            case Kind::Forall: {
                const bool ex = nd.kind == Kind::Exists;
                if (nd.set_binder) {
                    Mask save = so_[nd.slot];
                    const Mask count = Mask(1) << n_;
                    bool result = !ex;
                    for (Mask X = 0; X < count; ++X) {
                        so_[nd.slot] = X;
                        if (eval(nd.kids[0]) == ex) {
                            result = ex;
                            break;
                        }
                    }
                    so_[nd.slot] = save;
                    return result;
                }
                int save = fo_[nd.slot];
                bool result = !ex;
                for (int e = 0; e < n_; ++e) {
                    fo_[nd.slot] = e;
                    if (eval(nd.kids[0]) == ex) {
                        result = ex;
                        break;
                    }
                }
                fo_[nd.slot] = save;
                return result;
            }
            case Kind::Rel: {
                // built on first use, so relb on a non-p2p MSC is never asked for behind a false conjunct
                auto& r = rels_[nd.rel];
                if (!r) r = relation(rel_keys_[nd.rel]);
                return r->has(fo_[nd.a], fo_[nd.b]);
            }
            case Kind::Eq: return fo_[nd.a] == fo_[nd.b];
            case Kind::Neq: return fo_[nd.a] != fo_[nd.b];
            case Kind::In: return so_[nd.b] >> fo_[nd.a] & 1;
            case Kind::Label: {
                const Action& a = msc_.label(fo_[nd.a]);
                if (a.kind != nd.lkind) return false;
                if (nd.lsender == -2 || nd.lreceiver == -2) return false;
                if (nd.lsender >= 0 && a.sender != nd.lsender) return false;
                if (nd.lreceiver >= 0 && a.receiver != nd.lreceiver) return false;
                return nd.lpayload_any || a.payload == nd.lpayload;
            }
            case Kind::Pred: return pred(nd);
            case Kind::Closure: {
                if (nd.tc >= 0) {
                    auto& c = tc_cache_[nd.tc];
                    if (!c) c = closure_table(nd);
                    return c->has(fo_[nd.a], fo_[nd.b]);
                }
                return closure_table(nd).has(fo_[nd.a], fo_[nd.b]);
            }
        }
        return false;
    }

    const Msc& msc_;
    EvalOptions opts_;
    int n_;
    int nfo_ = 0, nso_ = 0, ntc_ = 0;
    bool uses_sets_ = false, uses_closure_ = false;
    std::vector<int> fo_;
    std::vector<Mask> so_;
    std::map<RelKey, int> rel_index_;
    std::vector<RelKey> rel_keys_;
    std::vector<std::optional<RelationGraph>> rels_;
    std::vector<std::optional<RelationGraph>> tc_cache_;
};

// ---------------------------------------------------------------- builtin texts

// Formula text with fresh bound names, so definitions can be pasted into one another.
class Gen {
public:
    explicit Gen(BuiltinMode mode) : mode_(mode) {}
    bool native() const { return mode_ == BuiltinMode::native; }
    std::string fresh(const std::string& base) { return base + std::to_string(++n_); }

    // s [= s' (sends to one process, ordered by their receives or matched before unmatched)
    std::string mb(const std::string& a, const std::string& b) {
        if (native()) return a + " [mb] " + b;
        auto x = fresh("x"), y = fresh("y");
        return "(send(" + a + ") & send(" + b + ") & dest(" + a + "," + b + ") & ((matched(" + a + ") & ~matched(" +
               b + ")) | (E " + x + ". E " + y + ". (" + a + " <| " + x + " & " + b + " <| " + y + " & " + x +
               " ->+ " + y + "))))";
    }

    std::string onen(const std::string& a, const std::string& b) {
        if (native()) return a + " [1n] " + b;
        auto x = fresh("x"), y = fresh("y");
        return "((send(" + a + ") & send(" + b + ") & src(" + a + "," + b + ") & matched(" + a + ") & ~matched(" + b +
               ")) | (recv(" + a + ") & recv(" + b + ") & src(" + a + "," + b + ") & (E " + x + ". E " + y + ". (" +
               x + " <| " + a + " & " + y + " <| " + b + " & " + x + " ->+ " + y + "))))";
    }

    // (-> u <| u [= u 1n)+
    std::string nnrel(const std::string& a, const std::string& b) {
        if (native()) return a + " [nn] " + b;
        auto u = fresh("u"), v = fresh("v");
        return "TC[" + u + "," + v + ": " + u + " -> " + v + " | " + u + " <| " + v + " | " + mb(u, v) + " | " +
               onen(u, v) + "]+(" + a + "," + b + ")";
    }

    std::string bowtie(const std::string& a, const std::string& b) {
        if (native()) return a + " [bowtie] " + b;
        auto x = fresh("x"), y = fresh("y"), x2 = fresh("x"), y2 = fresh("y");
        std::string not_nn = "~" + nnrel(a, b);
        return "(" + nnrel(a, b) + " | (recv(" + a + ") & recv(" + b + ") & (E " + x + ". E " + y + ". (" + x +
               " <| " + a + " & " + y + " <| " + b + " & " + nnrel(x, y) + ")) & " + not_nn + ") | (send(" + a +
               ") & send(" + b + ") & (E " + x2 + ". E " + y2 + ". (" + a + " <| " + x2 + " & " + b + " <| " + y2 +
               " & " + nnrel(x2, y2) + ")) & ~" + nnrel(a, b) + ") | (send(" + a + ") & send(" + b + ") & matched(" +
               a + ") & ~matched(" + b + ") & ~" + nnrel(a, b) + "))";
    }

    std::string prec(const std::string& a, const std::string& b) {
        if (native()) return a + " [prec] " + b;
        auto r = fresh("r");
        return "(send(" + a + ") & " + a + " != " + b + " & (E " + r + ". (" + a + " < " + r + " & " + b + " <| " +
               r + ")))";
    }

    // closure of a binary definition given as a callback
    std::string closure(const std::function<std::string(const std::string&, const std::string&)>& def,
                        const std::string& native_name, Star star, const std::string& a, const std::string& b) {
        const char* s = star == Star::plus ? "+" : "*";
        if (native()) return a + " [" + native_name + "]" + s + " " + b;
        auto u = fresh("u"), v = fresh("v");
        return "TC[" + u + "," + v + ": " + def(u, v) + "]" + s + "(" + a + "," + b + ")";
    }

    // r relbK s for FIFO channels: s is k channel sends after the send matched with r
    std::string relb(int k, const std::string& r, const std::string& s) {
        if (native()) return r + " [relb" + std::to_string(k) + "] " + s;
        if (k == 0) return s + " <| " + r;
        std::vector<std::string> ss;
        for (int i = 0; i < k; ++i) ss.push_back(fresh("s"));
        ss.push_back(s);
        std::string body = "send(" + s + ") & " + ss[0] + " <| " + r;
        for (int i = 0; i < k; ++i) {
            auto z = fresh("z");
            body += " & chan(" + ss[i] + "," + s + ") & " + ss[i] + " ->+ " + ss[i + 1] + " & ~(E " + z +
                    ". (send(" + z + ") & chan(" + z + "," + s + ") & " + ss[i] + " ->+ " + z + " & " + z + " ->+ " +
                    ss[i + 1] + "))";
        }
        std::string out = "(";
        for (int i = 0; i < k; ++i) out += "E " + ss[i] + ". ";
        return out + "(" + body + "))";
    }

    // r relbasyK s: k+1 chained sends on one channel ending in s, r the earliest receive among them
    std::string relbasy(int k, const std::string& r, const std::string& s) {
        if (native()) return r + " [relbasy" + std::to_string(k) + "] " + s;
        std::vector<std::string> ss;
        for (int i = 0; i < k; ++i) ss.push_back(fresh("s"));
        ss.push_back(s);
        std::string body = "send(" + s + ")";
        for (int i = 0; i < k; ++i) body += " & chan(" + ss[i] + "," + s + ") & " + ss[i] + " ->+ " + ss[i + 1];
        body += " & (";
        for (std::size_t i = 0; i < ss.size(); ++i) body += (i ? " | " : "") + ss[i] + " <| " + r;
        body += ")";
        for (const auto& e : ss) {
            auto f = fresh("f");
            body += " & (matched(" + e + ") => (E " + f + ". (" + e + " <| " + f + " & " + r + " ->* " + f + ")))";
        }
        std::string out = "(";
        for (int i = 0; i < k; ++i) out += "E " + ss[i] + ". ";
        return out + "(" + body + "))";
    }

private:
    BuiltinMode mode_;
    int n_ = 0;
};

const char* kNoUnmatched = "~(E x. (send(x) & ~matched(x)))";

std::string phi_text(ModelId m, Gen& g) {
    const std::string psi1 = "(E r. E r'. (s <| r & s' <| r' & r' ->+ r))";
    const std::string psi2 = "(~matched(s) & matched(s'))";
    switch (m) {
        case ModelId::asy: return "true";
        case ModelId::p2p:
            return "~(E s. E s'. (send(s) & send(s') & chan(s,s') & s ->+ s' & (" + psi1 + " | " + psi2 + ")))";
        case ModelId::co:
            return "~(E s. E s'. (send(s) & send(s') & dest(s,s') & s <= s' & (" + psi1 + " | " + psi2 + ")))";
        case ModelId::mb: {
            auto def = [&](const std::string& u, const std::string& v) {
                return u + " -> " + v + " | " + u + " <| " + v + " | " + g.mb(u, v);
            };
            return "~(E x. " + g.closure(def, "proc,msg,mb", Star::plus, "x", "x") + ")";
        }
        case ModelId::onen: {
            auto def = [&](const std::string& u, const std::string& v) {
                return u + " -> " + v + " | " + u + " <| " + v + " | " + g.onen(u, v);
            };
            return "~(E x. E y. (x != y & " + g.closure(def, "proc,msg,1n", Star::star, "x", "y") + " & " +
                   g.closure(def, "proc,msg,1n", Star::star, "y", "x") + "))";
        }
        case ModelId::nn: {
            auto def = [&](const std::string& u, const std::string& v) { return g.bowtie(u, v); };
            return "~(E x. " + g.closure(def, "bowtie", Star::plus, "x", "x") + ")";
        }
        case ModelId::rsc: {
            auto def = [&](const std::string& u, const std::string& v) { return g.prec(u, v); };
            return "~(E s1. E s2. (" + g.prec("s1", "s2") + " & " + g.closure(def, "prec", Star::star, "s2", "s1") +
                   ")) & " + kNoUnmatched;
        }
    }
    return "true";
}

// no channel carries k+1 unmatched sends
std::string unmatched_at_most(int k) {
    std::vector<std::string> ss;
    for (int i = 0; i <= k; ++i) ss.push_back("u" + std::to_string(i + 1));
    std::string body = "~matched(" + ss[0] + ") & send(" + ss[0] + ")";
    for (int i = 1; i <= k; ++i)
        body += " & " + ss[i - 1] + " ->+ " + ss[i] + " & chan(" + ss[0] + "," + ss[i] + ") & ~matched(" + ss[i] + ")";
    std::string out = "~(";
    for (const auto& s : ss) out += "E " + s + ". ";
    return out + "(" + body + "))";
}

// edges of the model order used by the bounded characterizations, as a TC body
std::function<std::string(const std::string&, const std::string&)> model_edges(ModelId m, Gen& g) {
    switch (m) {
        case ModelId::mb:
            return [&g](const std::string& u, const std::string& v) {
                return u + " -> " + v + " | " + u + " <| " + v + " | " + g.mb(u, v);
            };
        case ModelId::onen:
            return [&g](const std::string& u, const std::string& v) {
                return u + " -> " + v + " | " + u + " <| " + v + " | " + g.onen(u, v);
            };
        case ModelId::nn: return [&g](const std::string& u, const std::string& v) { return g.bowtie(u, v); };
        default: return [](const std::string& u, const std::string& v) { return u + " -> " + v + " | " + u + " <| " + v; };
    }
}

std::string model_native_names(ModelId m) {
    switch (m) {
        case ModelId::mb: return "proc,msg,mb";
        case ModelId::onen: return "proc,msg,1n";
        case ModelId::nn: return "bowtie";
        default: return "proc,msg";
    }
}

void require_bounded_model(ModelId m) {
    if (m == ModelId::rsc) throw std::invalid_argument("no boundedness formula for rsc");
}

// ---------------------------------------------------------------- closure expansion

FormulaPtr rename(const FormulaPtr& f, const std::string& from, const std::string& to) {
    auto sub = [&](const std::string& v) { return v == from ? to : v; };
    auto g = std::make_shared<Formula>(*f);
    switch (f->kind) {
        case Kind::Exists:
        case Kind::Forall:
            if (f->var == from) return f;
            g->kids = {rename(f->kids[0], from, to)};
            return g;
        case Kind::Closure:
            g->x = sub(f->x);
            g->y = sub(f->y);
            if (f->var != from && f->var2 != from) g->kids = {rename(f->kids[0], from, to)};
            return g;
        default:
            g->x = sub(f->x);
            g->y = sub(f->y);
            for (auto& k : g->kids) k = rename(k, from, to);
            return g;
    }
}

class Expander {
public:
    FormulaPtr run(const FormulaPtr& f) {
        switch (f->kind) {
            case Kind::Rel: {
                if (f->star == Star::none) return f;
                auto rels = f->rels;
                auto base = [rels](const std::string& a, const std::string& b) {
                    return make_rel(rels, Star::none, a, b);
                };
                return encode(base, f->star, f->x, f->y);
            }
            case Kind::Closure: {
                FormulaPtr body = run(f->kids[0]);
                std::string u = f->var, v = f->var2;
                auto base = [body, u, v](const std::string& a, const std::string& b) {
                    // two-step renaming through placeholders avoids clashes when a or b equals u or v
                    auto t = rename(rename(body, u, "\x01u"), v, "\x01v");
                    return rename(rename(t, "\x01u", a), "\x01v", b);
                };
                return encode(base, f->star, f->x, f->y);
            }
            default: {
                if (f->kids.empty()) return f;
                auto g = std::make_shared<Formula>(*f);
                for (auto& k : g->kids) k = run(k);
                return g;
            }
        }
    }

private:
    std::string fresh(const std::string& base) { return base + "_tc" + std::to_string(++n_); }

    // A X. ((x in X & A u. A v. ((u in X & R(u,v)) => v in X)) => y in X), with a leading R step for +
    FormulaPtr encode(const std::function<FormulaPtr(const std::string&, const std::string&)>& R, Star star,
                      const std::string& x, const std::string& y) {
        std::string start = x;
        std::string z;
        if (star == Star::plus) {
            z = fresh("z");
            start = z;
        }
        auto X = fresh("X"), u = fresh("u"), v = fresh("v");
        FormulaPtr closed = make_quant(
            Kind::Forall, u,
            make_quant(Kind::Forall, v,
                       make(Kind::Implies, {make(Kind::And, {make_in(u, X), R(u, v)}), make_in(v, X)})));
        FormulaPtr star_f = make_quant(
            Kind::Forall, X,
            make(Kind::Implies, {make(Kind::And, {make_in(start, X), closed}), make_in(y, X)}));
        if (star == Star::star) return star_f;
        return make_quant(Kind::Exists, z, make(Kind::And, {R(x, z), star_f}));
    }

    int n_ = 0;
};

}  // namespace

FormulaPtr parse_formula(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const FormulaPtr& f) {
    std::string out;
    print(*f, out);
    return out;
}

std::set<std::string> free_variables(const FormulaPtr& f) {
    std::set<std::string> out;
    collect_free(*f, {}, out);
    return out;
}

bool evaluate(const Msc& msc, const FormulaPtr& f, const Assignment& env, const EvalOptions& opts) {
    if (msc.size() > 63) throw SizeLimitExceeded("formula evaluation supports at most 63 events");
    Evaluator ev(msc, opts);
    return ev.run(f, env);
}

FormulaPtr no_unmatched() { return parse_formula(kNoUnmatched); }

FormulaPtr builtin(ModelId model, BuiltinMode mode) {
    Gen g(mode);
    return parse_formula(phi_text(model, g));
}

FormulaPtr exists_bounded(ModelId model, int k, BuiltinMode mode) {
    require_bounded_model(model);
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    Gen g(mode);
    std::string member = phi_text(model, g);
    std::string cyc;
    if (model == ModelId::asy) {
        auto def = [&](const std::string& u, const std::string& v) {
            return u + " -> " + v + " | " + u + " <| " + v + " | " + g.relbasy(k, u, v);
        };
        cyc = "~(E x. " + g.closure(def, "proc,msg,relbasy" + std::to_string(k), Star::plus, "x", "x") + ")";
    } else {
        auto edges = model_edges(model, g);
        auto def = [&](const std::string& u, const std::string& v) { return edges(u, v) + " | " + g.relb(k, u, v); };
        cyc = "~(E x. " +
              g.closure(def, model_native_names(model) + ",relb" + std::to_string(k), Star::plus, "x", "x") + ")";
    }
    return parse_formula("(" + member + ") & " + cyc + " & " + unmatched_at_most(k));
}

FormulaPtr forall_bounded(ModelId model, int k, BuiltinMode mode) {
    require_bounded_model(model);
    if (k < 0) throw std::invalid_argument("k must be non-negative");
    Gen g(mode);
    std::string member = phi_text(model, g);
    std::string edge = model == ModelId::asy ? g.relbasy(k, "r", "s") : g.relb(k, "r", "s");
    std::string order;
    if (model == ModelId::nn) {
        order = g.bowtie("r", "s");
    } else {
        order = g.closure(model_edges(model, g), model_native_names(model), Star::plus, "r", "s");
    }
    return parse_formula("(" + member + ") & ~(E r. E s. (" + edge + " & ~" + order + ")) & " + unmatched_at_most(k));
}

FormulaPtr expand_closures(const FormulaPtr& f) { return Expander().run(f); }

}  // namespace msckit::mso
