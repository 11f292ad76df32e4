#include "periscope/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace periscope {

struct Expression::Node {
  enum class Kind { number, variable, negate, add, sub, mul, div, pow, func };
  Kind kind;
  double number = 0.0;
  int variable = 0;
  std::string func;
  std::vector<std::shared_ptr<const Node>> args;

  bool has_variables() const {
    if (kind == Kind::variable) return true;
    for (const auto& a : args)
      if (a->has_variables()) return true;
    return false;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::parse_error, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr sum() {
    NodePtr lhs = product();
    for (;;) {
      if (accept('+')) lhs = make(Node::Kind::add, {lhs, product()});
      else if (accept('-')) lhs = make(Node::Kind::sub, {lhs, product()});
      else return lhs;
    }
  }

  NodePtr product() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Kind::mul, {lhs, unary()});
      else if (accept('/')) lhs = make(Node::Kind::div, {lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Node::Kind::pow, {base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::number;
      n->number = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x1" || name == "x2") {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::variable;
        n->variable = name == "x1" ? 0 : 1;
        return n;
      }
      if (name == "pi") {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::number;
        n->number = std::numbers::pi;
        return n;
      }
      static const char* kFuncs[] = {"exp", "log", "sin", "cos", "tan", "sqrt"};
      for (const char* f : kFuncs) {
        if (name == f) {
          if (!accept('(')) fail("expected '(' after " + name);
          auto n = std::make_shared<Node>();
          n->kind = Node::Kind::func;
          n->func = name;
          n->args = {sum()};
          if (!accept(')')) fail("expected ')'");
          return n;
        }
      }
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double constant_value(const Node& n);

template <class T>
T eval(const Node& n, const T& x1, const T& x2, const T& one) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::number: return one * n.number;
    case K::variable: return n.variable == 0 ? x1 : x2;
    case K::negate: return -eval(*n.args[0], x1, x2, one);
    case K::add: return eval(*n.args[0], x1, x2, one) + eval(*n.args[1], x1, x2, one);
    case K::sub: return eval(*n.args[0], x1, x2, one) - eval(*n.args[1], x1, x2, one);
    case K::mul: return eval(*n.args[0], x1, x2, one) * eval(*n.args[1], x1, x2, one);
    case K::div: return eval(*n.args[0], x1, x2, one) / eval(*n.args[1], x1, x2, one);
    case K::pow: {
      const T base = eval(*n.args[0], x1, x2, one);
      if (!n.args[1]->has_variables()) {
        using std::pow;
        return pow(base, constant_value(*n.args[1]));
      }
      using std::exp;
      using std::log;
      return exp(eval(*n.args[1], x1, x2, one) * log(base));
    }
    case K::func: {
      using std::cos;
      using std::exp;
      using std::log;
      using std::sin;
      using std::sqrt;
      using std::tan;
      const T a = eval(*n.args[0], x1, x2, one);
      if (n.func == "exp") return exp(a);
      if (n.func == "log") return log(a);
      if (n.func == "sin") return sin(a);
      if (n.func == "cos") return cos(a);
      if (n.func == "tan") return tan(a);
      return sqrt(a);
    }
  }
  return one * 0.0;
}

double constant_value(const Node& n) { return eval<double>(n, 0.0, 0.0, 1.0); }

bool polynomial(const Node& n) {
  using K = Node::Kind;
  switch (n.kind) {
    case K::number:
    case K::variable: return true;
    case K::negate:
    case K::add:
    case K::sub:
    case K::mul: {
      for (const auto& a : n.args)
        if (!polynomial(*a)) return false;
      return true;
    }
    case K::div: return polynomial(*n.args[0]) && !n.args[1]->has_variables();
    case K::pow: {
      if (n.args[1]->has_variables()) return false;
      const double p = constant_value(*n.args[1]);
      return p >= 0.0 && p == std::floor(p) && polynomial(*n.args[0]);
    }
    case K::func: return !n.has_variables();
  }
  return false;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.source_ = text;
  e.root_ = Parser(text).parse();
  return e;
}

double Expression::evaluate(const Vec2& x) const { return eval<double>(*root_, x.x(), x.y(), 1.0); }

Jet Expression::expand(const Vec2& x, int order) const {
  return eval<Jet>(*root_, Jet::variable(order, 0, x.x()), Jet::variable(order, 1, x.y()),
                   Jet(order, 1.0));
}

bool Expression::is_polynomial() const { return polynomial(*root_); }

}  // namespace periscope
