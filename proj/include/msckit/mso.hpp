#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "msckit/classify.hpp"
#include "msckit/msc.hpp"

namespace msckit::mso {

enum class Kind { True, False, Not, And, Or, Implies, Iff, Exists, Forall, Rel, Eq, Neq, In, Label, Pred, Closure };

enum class Star { none, plus, star };

struct LabelPattern {
    ActionKind kind = ActionKind::send;
    // "_" matches anything
    std::string sender = "_", receiver = "_", payload = "_";
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Kind kind = Kind::True;
    std::vector<FormulaPtr> kids;
    // Exists/Forall: bound variable. Closure: the two bound variables (var, var2).
    std::string var, var2;
    // atom arguments
    std::string x, y;
    // Rel: union of base relations, optionally closed
    std::vector<std::string> rels;
    Star star = Star::none;
    // Pred: send, recv, matched, chan, dest, src
    std::string pred;
    LabelPattern label;
};

// Lowercase initial letter: first-order (event). Uppercase: second-order (set of events).
bool is_set_variable(const std::string& name);

struct SyntaxError : std::runtime_error {
    SyntaxError(const std::string& what, std::size_t position)
        : std::runtime_error("at " + std::to_string(position) + ": " + what), position(position) {}
    std::size_t position;
};

// Surface syntax (README has the full grammar):
//   E x. phi   A X. phi   ~ & | => <->   true false
//   x -> y  x <| y  x ->+ y  x ->* y  x < y  x <= y  x = y  x != y  x in X
//   x [mb,proc]+ y    lab(x) = !(p,q,m)    send(x) recv(x) matched(x) chan(x,y) dest(x,y) src(x,y)
//   TC[u,v: phi]+(x,y)    phi_pp phi_co phi_mb phi_1n phi_nn phi_rsc phi_asy no_unmatched
// Builtin names expand to their native forms.
FormulaPtr parse_formula(const std::string& text);

std::string to_string(const FormulaPtr& f);
std::set<std::string> free_variables(const FormulaPtr& f);

enum class ClosureMode { native, subsets };

struct EvalOptions {
    ClosureMode closure = ClosureMode::native;
    // event cap for second-order quantifiers and subset closures
    std::size_t so_limit = 12;
};

struct Assignment {
    std::map<std::string, EventId> events;
    std::map<std::string, std::set<EventId>> sets;
};

// Throws std::invalid_argument on unassigned free variables, SizeLimitExceeded
// past the second-order cap.
bool evaluate(const Msc& msc, const FormulaPtr& f, const Assignment& env = {}, const EvalOptions& opts = {});

// native: relation atoms ([mb], [1n], [bowtie], [prec], relbK ...) are computed by
// the relations module. formula: the same relations written out in the logic,
// closures as TC[...].
enum class BuiltinMode { native, formula };

FormulaPtr builtin(ModelId model, BuiltinMode mode = BuiltinMode::native);
FormulaPtr no_unmatched();
// membership in the model and exists/forall k-boundedness (asy, p2p, co, mb, onen, nn)
FormulaPtr exists_bounded(ModelId model, int k, BuiltinMode mode = BuiltinMode::native);
FormulaPtr forall_bounded(ModelId model, int k, BuiltinMode mode = BuiltinMode::native);

// rewrite every closure (x ->+ y, x [R]* y, TC[...]) into its second-order encoding
FormulaPtr expand_closures(const FormulaPtr& f);

}  // namespace msckit::mso
