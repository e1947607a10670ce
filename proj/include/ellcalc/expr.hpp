#pragma once

// Immutable symbolic expression trees over the chart variables (rho, phi, theta)
// and the shape parameter a, with exact differentiation and numeric evaluation.
//
// Nodes are hash-consed into a process-lifetime intern pool, so structural
// equality is pointer equality and common subexpressions are shared. Smart
// constructors fold constants and eliminate algebraic no-ops (x+0, 1*x, x^1);
// correctness never depends on simplification, it only keeps trees small.

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ellcalc {

enum class Var : uint8_t { rho = 0, phi = 1, theta = 2, a = 3 };

inline const char* var_name(Var v) {
    switch (v) {
        case Var::rho: return "rho";
        case Var::phi: return "phi";
        case Var::theta: return "theta";
        case Var::a: return "a";
    }
    return "?";
}

enum class NodeKind : uint8_t {
    Constant,
    Variable,
    Sum,        // n-ary
    Product,    // n-ary
    Quotient,
    Power,      // integer exponent, stored in `exponent`
    Negate,
    Sin,
    Cos,
    Exp,
    Ln,
    Kernel,     // call to a registered numeric kernel, identified by `kernel_id`
};

struct Node;
class Expr;

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConstructError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct KernelDerivativeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Node {
    NodeKind kind;
    Var var{Var::rho};                  // Variable
    double value{0.0};                  // Constant
    int exponent{0};                    // Power
    int kernel_id{-1};                  // Kernel
    std::vector<const Node*> children;
};

// Value type: a shared pointer into the intern pool. Copy is trivial; equality
// is structural because interning canonicalizes.
class Expr {
  public:
    Expr() : node_(nullptr) {}
    explicit Expr(const Node* n) : node_(n) {}

    const Node* node() const { return node_; }
    bool valid() const { return node_ != nullptr; }
    NodeKind kind() const { return node_->kind; }

    friend bool operator==(Expr x, Expr y) { return x.node_ == y.node_; }
    friend bool operator!=(Expr x, Expr y) { return x.node_ != y.node_; }

    bool is_constant(double v) const {
        return node_ && node_->kind == NodeKind::Constant && node_->value == v;
    }
    bool is_zero() const { return is_constant(0.0); }

  private:
    const Node* node_;
};

// Registered numeric kernel: an opaque scalar function of (rho, phi, theta, a)
// with caller-declared differentiation rules. `derivative` must return the
// exact partial as an Expr (possibly referencing other kernels) or throw
// KernelDerivativeError when no rule is declared for that variable/order.
// `rho_one_value` is the known exact value on the rho = 1 slice when the
// kernel restricts to a constant there (used by pullbacks).
struct KernelInfo {
    std::string name;
    std::function<double(double rho, double phi, double theta, double a)> eval;
    std::function<Expr(Var)> derivative;
    std::optional<double> rho_one_value;
};

namespace detail {

struct NodeKey {
    NodeKind kind;
    Var var;
    double value;
    int exponent;
    int kernel_id;
    std::vector<const Node*> children;

    bool operator==(const NodeKey& o) const {
        return kind == o.kind && var == o.var && value == o.value &&
               exponent == o.exponent && kernel_id == o.kernel_id && children == o.children;
    }
};

struct NodeKeyHash {
    size_t operator()(const NodeKey& k) const {
        size_t h = std::hash<int>()(static_cast<int>(k.kind));
        auto mix = [&h](size_t x) { h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
        mix(std::hash<int>()(static_cast<int>(k.var)));
        mix(std::hash<double>()(k.value));
        mix(std::hash<int>()(k.exponent));
        mix(std::hash<int>()(k.kernel_id));
        for (const Node* c : k.children) mix(std::hash<const void*>()(c));
        return h;
    }
};

class Pool {
  public:
    static Pool& instance() {
        static Pool* p = new Pool;  // never destroyed: nodes live for the process
        return *p;
    }

    const Node* intern(NodeKey key) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        auto owned = std::make_unique<Node>();
        owned->kind = key.kind;
        owned->var = key.var;
        owned->value = key.value;
        owned->exponent = key.exponent;
        owned->kernel_id = key.kernel_id;
        owned->children = key.children;
        const Node* raw = owned.get();
        nodes_.push_back(std::move(owned));
        map_.emplace(std::move(key), raw);
        return raw;
    }

    int register_kernel(KernelInfo info) {
        std::lock_guard<std::mutex> lock(mu_);
        kernels_.push_back(std::move(info));
        return static_cast<int>(kernels_.size()) - 1;
    }

    const KernelInfo& kernel(int id) const {
        std::lock_guard<std::mutex> lock(mu_);
        return kernels_.at(static_cast<size_t>(id));
    }

  private:
    mutable std::mutex mu_;
    std::unordered_map<NodeKey, const Node*, NodeKeyHash> map_;
    std::vector<std::unique_ptr<Node>> nodes_;
    std::deque<KernelInfo> kernels_;  // deque: references stay valid as it grows
};

inline const Node* intern(NodeKind kind, Var var, double value, int exponent, int kernel_id,
                          std::vector<const Node*> children) {
    return Pool::instance().intern(NodeKey{kind, var, value, exponent, kernel_id, std::move(children)});
}

}  // namespace detail

inline int register_kernel(KernelInfo info) {
    return detail::Pool::instance().register_kernel(std::move(info));
}
inline const KernelInfo& kernel_info(int id) { return detail::Pool::instance().kernel(id); }

// ---- smart constructors ----

inline Expr constant(double v) {
    // normalize -0.0 so 0 has one representation
    if (v == 0.0) v = 0.0;
    return Expr(detail::intern(NodeKind::Constant, Var::rho, v, 0, -1, {}));
}

inline Expr variable(Var v) {
    return Expr(detail::intern(NodeKind::Variable, v, 0.0, 0, -1, {}));
}

inline Expr kernel_call(int kernel_id) {
    return Expr(detail::intern(NodeKind::Kernel, Var::rho, 0.0, 0, kernel_id, {}));
}

inline Expr operator-(Expr x);  // fwd

inline Expr sum(const std::vector<Expr>& terms) {
    std::vector<const Node*> flat;
    double c = 0.0;
    for (Expr t : terms) {
        if (!t.valid()) throw ConstructError("sum: invalid operand");
        const Node* n = t.node();
        if (n->kind == NodeKind::Constant) {
            c += n->value;
        } else if (n->kind == NodeKind::Sum) {
            for (const Node* ch : n->children) {
                if (ch->kind == NodeKind::Constant) c += ch->value;
                else flat.push_back(ch);
            }
        } else {
            flat.push_back(n);
        }
    }
    if (c != 0.0 || flat.empty()) flat.push_back(constant(c).node());
    if (flat.size() == 1) return Expr(flat[0]);
    return Expr(detail::intern(NodeKind::Sum, Var::rho, 0.0, 0, -1, std::move(flat)));
}

inline Expr product(const std::vector<Expr>& factors) {
    std::vector<const Node*> flat;
    double c = 1.0;
    for (Expr f : factors) {
        if (!f.valid()) throw ConstructError("product: invalid operand");
        const Node* n = f.node();
        if (n->kind == NodeKind::Constant) {
            c *= n->value;
        } else if (n->kind == NodeKind::Product) {
            for (const Node* ch : n->children) {
                if (ch->kind == NodeKind::Constant) c *= ch->value;
                else flat.push_back(ch);
            }
        } else {
            flat.push_back(n);
        }
    }
    if (c == 0.0) return constant(0.0);
    bool negate = false;
    if (c == -1.0 && !flat.empty()) negate = true;
    else if (c != 1.0 || flat.empty()) flat.insert(flat.begin(), constant(c).node());
    Expr r;
    if (flat.size() == 1) r = Expr(flat[0]);
    else r = Expr(detail::intern(NodeKind::Product, Var::rho, 0.0, 0, -1, std::move(flat)));
    return negate ? -r : r;
}

inline Expr operator+(Expr x, Expr y) { return sum({x, y}); }
inline Expr operator*(Expr x, Expr y) { return product({x, y}); }

inline Expr operator-(Expr x) {
    const Node* n = x.node();
    if (n->kind == NodeKind::Constant) return constant(-n->value);
    if (n->kind == NodeKind::Negate) return Expr(n->children[0]);
    return Expr(detail::intern(NodeKind::Negate, Var::rho, 0.0, 0, -1, {n}));
}

inline Expr operator-(Expr x, Expr y) { return sum({x, -y}); }

inline Expr quotient(Expr num, Expr den) {
    if (den.is_zero()) throw ConstructError("quotient: denominator is the constant 0");
    if (num.is_zero()) return constant(0.0);
    if (den.is_constant(1.0)) return num;
    if (num.node()->kind == NodeKind::Constant && den.node()->kind == NodeKind::Constant)
        return constant(num.node()->value / den.node()->value);
    if (num == den) return constant(1.0);
    return Expr(detail::intern(NodeKind::Quotient, Var::rho, 0.0, 0, -1, {num.node(), den.node()}));
}

inline Expr operator/(Expr x, Expr y) { return quotient(x, y); }

inline Expr pow_int(Expr base, int e) {
    if (e == 0) return constant(1.0);
    if (e == 1) return base;
    if (base.node()->kind == NodeKind::Constant) return constant(std::pow(base.node()->value, e));
    if (base.node()->kind == NodeKind::Power) {
        long long combined = static_cast<long long>(base.node()->exponent) * e;
        if (combined >= -64 && combined <= 64)
            return pow_int(Expr(base.node()->children[0]), static_cast<int>(combined));
    }
    return Expr(detail::intern(NodeKind::Power, Var::rho, 0.0, e, -1, {base.node()}));
}

inline Expr make_unary(NodeKind k, Expr x) {
    if (x.node()->kind == NodeKind::Constant) {
        double v = x.node()->value;
        switch (k) {
            case NodeKind::Sin: return constant(std::sin(v));
            case NodeKind::Cos: return constant(std::cos(v));
            case NodeKind::Exp: return constant(std::exp(v));
            case NodeKind::Ln:
                if (v <= 0.0) throw ConstructError("ln of non-positive constant");
                return constant(std::log(v));
            default: break;
        }
    }
    return Expr(detail::intern(k, Var::rho, 0.0, 0, -1, {x.node()}));
}

inline Expr sin(Expr x) { return make_unary(NodeKind::Sin, x); }
inline Expr cos(Expr x) { return make_unary(NodeKind::Cos, x); }
inline Expr exp(Expr x) { return make_unary(NodeKind::Exp, x); }
inline Expr ln(Expr x) { return make_unary(NodeKind::Ln, x); }

// sqrt(q) for q > 0 on the chart, expressed through exp/ln so the node set
// stays closed under differentiation. Callers guarantee positivity.
inline Expr sqrt_positive(Expr q) {
    if (q.node()->kind == NodeKind::Constant) return constant(std::sqrt(q.node()->value));
    if (q.node()->kind == NodeKind::Power && q.node()->exponent % 2 == 0)
        return pow_int(Expr(q.node()->children[0]), q.node()->exponent / 2);
    return exp(quotient(ln(q), constant(2.0)));
}

// ---- evaluation ----

struct ChartPoint {
    double rho;
    double phi;
    double theta;
};

inline bool chart_point_valid(const ChartPoint& p) {
    constexpr double pi = 3.14159265358979323846;
    return p.rho > 0.0 && p.phi > 0.0 && p.phi < pi && p.theta > -pi && p.theta < pi;
}

// Reusable per-thread evaluation context; the memo makes evaluation linear in
// the number of distinct subtrees, which interning keeps small.
class Evaluator {
  public:
    Evaluator() { memo_.reserve(256); }

    double operator()(Expr e, double rho, double phi, double theta, double a) {
        set_point(rho, phi, theta, a);
        return value(e);
    }

    // set_point + value lets several expressions at one point share the memo,
    // so common subtrees (metric factors, vorticities) are evaluated once
    void set_point(double rho, double phi, double theta, double a) {
        rho_ = rho; phi_ = phi; theta_ = theta; a_ = a;
        memo_.clear();
    }

    double value(Expr e) { return eval(e.node()); }

  private:
    double eval(const Node* n) {
        auto it = memo_.find(n);
        if (it != memo_.end()) return it->second;
        double r = 0.0;
        switch (n->kind) {
            case NodeKind::Constant: r = n->value; break;
            case NodeKind::Variable:
                switch (n->var) {
                    case Var::rho: r = rho_; break;
                    case Var::phi: r = phi_; break;
                    case Var::theta: r = theta_; break;
                    case Var::a: r = a_; break;
                }
                break;
            case NodeKind::Sum:
                for (const Node* c : n->children) r += eval(c);
                break;
            case NodeKind::Product:
                r = 1.0;
                for (const Node* c : n->children) r *= eval(c);
                break;
            case NodeKind::Quotient: {
                double den = eval(n->children[1]);
                if (den == 0.0) throw EvalError("division by zero");
                r = eval(n->children[0]) / den;
                break;
            }
            case NodeKind::Power: r = std::pow(eval(n->children[0]), n->exponent); break;
            case NodeKind::Negate: r = -eval(n->children[0]); break;
            case NodeKind::Sin: r = std::sin(eval(n->children[0])); break;
            case NodeKind::Cos: r = std::cos(eval(n->children[0])); break;
            case NodeKind::Exp: r = std::exp(eval(n->children[0])); break;
            case NodeKind::Ln: {
                double x = eval(n->children[0]);
                if (x <= 0.0) throw EvalError("ln of non-positive value");
                r = std::log(x);
                break;
            }
            case NodeKind::Kernel: r = kernel_info(n->kernel_id).eval(rho_, phi_, theta_, a_); break;
        }
        memo_.emplace(n, r);
        return r;
    }

    double rho_{0}, phi_{0}, theta_{0}, a_{0};
    std::unordered_map<const Node*, double> memo_;
};

inline double evaluate(Expr e, const ChartPoint& p, double a) {
    Evaluator ev;
    return ev(e, p.rho, p.phi, p.theta, a);
}

// ---- differentiation ----

namespace detail {

using DiffKey = std::pair<const Node*, Var>;
struct DiffKeyHash {
    size_t operator()(const DiffKey& k) const {
        return std::hash<const void*>()(k.first) ^ (static_cast<size_t>(k.second) * 0x9e3779b9u);
    }
};

inline std::unordered_map<DiffKey, const Node*, DiffKeyHash>& diff_cache() {
    static auto* m = new std::unordered_map<DiffKey, const Node*, DiffKeyHash>;
    return *m;
}
inline std::mutex& diff_mutex() {
    static auto* m = new std::mutex;
    return *m;
}

}  // namespace detail

Expr differentiate(Expr e, Var v);

namespace detail {

inline Expr differentiate_uncached(const Node* n, Var v) {
    auto D = [v](const Node* c) { return differentiate(Expr(c), v); };
    switch (n->kind) {
        case NodeKind::Constant: return constant(0.0);
        case NodeKind::Variable: return constant(n->var == v ? 1.0 : 0.0);
        case NodeKind::Sum: {
            std::vector<Expr> parts;
            parts.reserve(n->children.size());
            for (const Node* c : n->children) parts.push_back(D(c));
            return sum(parts);
        }
        case NodeKind::Product: {
            std::vector<Expr> parts;
            for (size_t i = 0; i < n->children.size(); ++i) {
                Expr di = D(n->children[i]);
                if (di.is_zero()) continue;
                std::vector<Expr> fs;
                fs.reserve(n->children.size());
                for (size_t j = 0; j < n->children.size(); ++j)
                    fs.push_back(i == j ? di : Expr(n->children[j]));
                parts.push_back(product(fs));
            }
            return parts.empty() ? constant(0.0) : sum(parts);
        }
        case NodeKind::Quotient: {
            Expr u(n->children[0]), w(n->children[1]);
            Expr du = D(n->children[0]), dw = D(n->children[1]);
            if (dw.is_zero()) return quotient(du, w);
            return quotient(du * w - u * dw, pow_int(w, 2));
        }
        case NodeKind::Power: {
            Expr base(n->children[0]);
            Expr db = D(n->children[0]);
            return product({constant(static_cast<double>(n->exponent)),
                            pow_int(base, n->exponent - 1), db});
        }
        case NodeKind::Negate: return -D(n->children[0]);
        case NodeKind::Sin: return cos(Expr(n->children[0])) * D(n->children[0]);
        case NodeKind::Cos: return -(sin(Expr(n->children[0])) * D(n->children[0]));
        case NodeKind::Exp: return exp(Expr(n->children[0])) * D(n->children[0]);
        case NodeKind::Ln: return quotient(D(n->children[0]), Expr(n->children[0]));
        case NodeKind::Kernel: return kernel_info(n->kernel_id).derivative(v);
    }
    throw std::logic_error("differentiate: unreachable");
}

}  // namespace detail

inline Expr differentiate(Expr e, Var v) {
    const Node* n = e.node();
    {
        std::lock_guard<std::mutex> lock(detail::diff_mutex());
        auto it = detail::diff_cache().find({n, v});
        if (it != detail::diff_cache().end()) return Expr(it->second);
    }
    Expr r = detail::differentiate_uncached(n, v);
    {
        std::lock_guard<std::mutex> lock(detail::diff_mutex());
        detail::diff_cache().emplace(detail::DiffKey{n, v}, r.node());
    }
    return r;
}

// ---- substitution ----

// Substitute `replacement` for variable `v`. Kernels are opaque in the chart
// variables; the only substitution they admit is rho -> 1 when the kernel
// declares its exact value there.
inline Expr substitute(Expr e, Var v, Expr replacement) {
    std::unordered_map<const Node*, const Node*> memo;
    std::function<Expr(const Node*)> go = [&](const Node* n) -> Expr {
        auto it = memo.find(n);
        if (it != memo.end()) return Expr(it->second);
        Expr r;
        switch (n->kind) {
            case NodeKind::Constant: r = Expr(n); break;
            case NodeKind::Variable: r = (n->var == v) ? replacement : Expr(n); break;
            case NodeKind::Kernel: {
                const KernelInfo& ki = kernel_info(n->kernel_id);
                if (v == Var::rho && replacement.is_constant(1.0) && ki.rho_one_value)
                    r = constant(*ki.rho_one_value);
                else if (v == Var::a)
                    throw ConstructError("substitute: kernel '" + ki.name + "' is opaque in a");
                else if (v == Var::rho)
                    throw ConstructError("substitute: kernel '" + ki.name +
                                         "' only admits the substitution rho -> 1");
                else
                    throw ConstructError("substitute: kernel '" + ki.name +
                                         "' is opaque in " + var_name(v));
                break;
            }
            case NodeKind::Sum: {
                std::vector<Expr> parts;
                parts.reserve(n->children.size());
                for (const Node* c : n->children) parts.push_back(go(c));
                r = sum(parts);
                break;
            }
            case NodeKind::Product: {
                std::vector<Expr> parts;
                parts.reserve(n->children.size());
                for (const Node* c : n->children) parts.push_back(go(c));
                r = product(parts);
                break;
            }
            case NodeKind::Quotient: r = quotient(go(n->children[0]), go(n->children[1])); break;
            case NodeKind::Power: r = pow_int(go(n->children[0]), n->exponent); break;
            case NodeKind::Negate: r = -go(n->children[0]); break;
            case NodeKind::Sin: r = sin(go(n->children[0])); break;
            case NodeKind::Cos: r = cos(go(n->children[0])); break;
            case NodeKind::Exp: r = exp(go(n->children[0])); break;
            case NodeKind::Ln: r = ln(go(n->children[0])); break;
        }
        memo.emplace(n, r.node());
        return r;
    };
    return go(e.node());
}

// Restrict to the surface rho = 1.
inline Expr restrict_rho1(Expr e) { return substitute(e, Var::rho, constant(1.0)); }

inline bool contains(Expr e, Var v) {
    std::unordered_map<const Node*, bool> memo;
    std::function<bool(const Node*)> go = [&](const Node* n) -> bool {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        bool r = false;
        if (n->kind == NodeKind::Variable) r = (n->var == v);
        else if (n->kind == NodeKind::Kernel) r = true;  // kernels depend on every variable
        else
            for (const Node* c : n->children)
                if (go(c)) { r = true; break; }
        memo.emplace(n, r);
        return r;
    };
    return go(e.node());
}

inline bool contains_kernel(Expr e) {
    std::unordered_map<const Node*, bool> memo;
    std::function<bool(const Node*)> go = [&](const Node* n) -> bool {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        bool r = n->kind == NodeKind::Kernel;
        if (!r)
            for (const Node* c : n->children)
                if (go(c)) { r = true; break; }
        memo.emplace(n, r);
        return r;
    };
    return go(e.node());
}

}  // namespace ellcalc
